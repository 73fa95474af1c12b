use clarkrif::catalog;
use clarkrif::clark::{radon_nikodym_on_curve, Alpha, ClarkMeasureModel};
use clarkrif::compare::*;
use clarkrif::polyalg::{parse_coeff, GaussRat};
use clarkrif::RationalInnerFunction;

fn q(s: &str) -> GaussRat {
    parse_coeff(s).unwrap()
}

fn check_invariants(v: &ComparisonVerdict) {
    match v.answer {
        Answer::Yes => {
            assert!(v.evidence.iter().any(|e| e.kind == "hb-certificate"
                && e.value["passed"] == true
                && e.value["verdict"]["class"] == "finite"));
        }
        Answer::No => {
            let divergent = v.evidence.iter().any(|e| {
                (e.kind == "l2-ideal" && e.value["kind"] == "divergent")
                    || (e.kind == "hb-certificate" && e.value["verdict"]["class"] == "divergent")
                    || e.kind == "degenerate-obstruction"
            });
            assert!(divergent);
        }
        Answer::Unknown => {}
    }
    assert!(!v.evidence.is_empty());
}

#[test]
fn proportionality_examples() {
    let c = proportionality_constant(&catalog::phi1(), &catalog::phi2(), &Alpha::minus_one()).unwrap();
    assert_eq!(c, Some(q("1/4")));
    for d in [2, 3, 5] {
        let c = proportionality_constant(&catalog::fav_rif(d), &catalog::z1z2(), &Alpha::one()).unwrap();
        assert_eq!(c, Some(GaussRat::ratio(1, d)));
    }
    let i = Alpha::exact(q("i")).unwrap();
    for b in [catalog::phi1(), catalog::fav_rif(3)] {
        assert_eq!(proportionality_constant(&b, &b, &i).unwrap(), Some(q("1")));
    }
    let none = proportionality_constant(&catalog::z1z2(), &catalog::phi2(), &Alpha::one()).unwrap();
    assert_eq!(none, None);
    assert!(proportionality_constant(&catalog::z1z2(), &catalog::z1z2(), &Alpha::from_angle(0.3)).is_err());
}

#[test]
fn containment_example_directions() {
    let opts = CompareOptions::default();
    let yes = compare(&catalog::phi1(), &catalog::phi2(), &Alpha::minus_one(), &opts).unwrap();
    assert_eq!(yes.answer, Answer::Yes);
    assert_eq!(yes.c, Some(q("1/4")));
    check_invariants(&yes);
    let no = compare(&catalog::phi2(), &catalog::phi1(), &Alpha::minus_one(), &opts).unwrap();
    assert_eq!(no.answer, Answer::No);
    assert_eq!(no.c, Some(q("4")));
    check_invariants(&no);
}

#[test]
fn anti_diagonal_directions() {
    let opts = CompareOptions::default();
    let yes = compare(&catalog::fav_rif(2), &catalog::z1z2(), &Alpha::one(), &opts).unwrap();
    assert_eq!(yes.answer, Answer::Yes);
    check_invariants(&yes);
    let no = compare(&catalog::z1z2(), &catalog::fav_rif(2), &Alpha::one(), &opts).unwrap();
    assert_eq!(no.answer, Answer::No);
    check_invariants(&no);
}

#[test]
fn exact_and_numerical_paths_agree_on_example_pairs() {
    let opts = CompareOptions { cross_check: true, ..CompareOptions::default() };
    let pairs: Vec<(RationalInnerFunction, RationalInnerFunction, Alpha)> = vec![
        (catalog::phi1(), catalog::phi2(), Alpha::minus_one()),
        (catalog::phi2(), catalog::phi1(), Alpha::minus_one()),
        (catalog::fav_rif(2), catalog::z1z2(), Alpha::one()),
        (catalog::z1z2(), catalog::fav_rif(2), Alpha::one()),
        (catalog::fav_rif(3), catalog::z1z2(), Alpha::one()),
        (catalog::z1z2(), catalog::fav_rif(3), Alpha::one()),
    ];
    for (b1, b2, a) in &pairs {
        let v = compare(b1, b2, a, &opts).unwrap();
        assert!(v.exact_answer.is_some());
        assert_eq!(v.exact_answer, v.numerical_answer, "{:?}", v.direction);
        assert!(!v.evidence.iter().any(|e| e.kind == "path-disagreement"));
        check_invariants(&v);
    }
}

#[test]
fn comparison_is_reflexive() {
    let alphas = [Alpha::one(), Alpha::minus_one(), Alpha::exact(q("i")).unwrap(), Alpha::exact(q("3/5 + 4/5*i")).unwrap()];
    for b in [catalog::z1z2(), catalog::fav_rif(2), catalog::fav_rif(3), catalog::phi1(), catalog::phi2()] {
        for a in &alphas {
            let v = compare(&b, &b, a, &CompareOptions::default()).unwrap();
            assert_eq!(v.answer, Answer::Yes, "{} {a}", b.p());
            assert_eq!(v.c, Some(q("1")));
            check_invariants(&v);
        }
    }
}

#[test]
fn inexact_alpha_uses_the_certificate_path() {
    let v = compare(&catalog::fav_rif(3), &catalog::z1z2(), &Alpha::from_angle(0.0), &CompareOptions::default()).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert_eq!(v.c, None);
    assert_eq!(v.exact_answer, None);
    assert_eq!(v.numerical_answer, Some(Answer::Yes));
}

#[test]
fn certificate_norm_matches_quadratured_derivative() {
    let v = compare(&catalog::fav_rif(2), &catalog::z1z2(), &Alpha::one(), &CompareOptions::default()).unwrap();
    let norm2 = v
        .evidence
        .iter()
        .find(|e| e.kind == "hb-certificate" && e.value["w"] == serde_json::json!([[0.0, 0.0], [0.0, 0.0]]))
        .and_then(|e| e.value["verdict"]["norm2"].as_f64())
        .unwrap();
    let n = 1024;
    let s1 = ClarkMeasureModel::build(&catalog::fav_rif(2), Alpha::one(), n).unwrap();
    let s2 = ClarkMeasureModel::build(&catalog::z1z2(), Alpha::one(), n).unwrap();
    let rn = radon_nikodym_on_curve(&s1, &s2).unwrap();
    // dσ² is the weight-1 curve measure
    let quadrature: f64 = rn.iter().map(|(_, r)| r * r).sum::<f64>() / n as f64;
    assert!((norm2 - quadrature).abs() <= 1e-4 * quadrature, "{norm2} {quadrature}");
}

#[test]
fn verdict_json_shape() {
    let v = compare(&catalog::phi1(), &catalog::phi2(), &Alpha::minus_one(), &CompareOptions::default()).unwrap();
    let j = v.to_json();
    assert_eq!(j["answer"], "yes");
    assert_eq!(j["c"], "1/4");
    assert_eq!(j["direction"]["alpha"], "-1");
    for e in j["evidence"].as_array().unwrap() {
        assert!(e["kind"].is_string() && e["detail"].is_string() && e.get("value").is_some());
    }
    assert!(j["timings"]["proportionality"].is_number());
    let w = compare(&catalog::z1z2(), &catalog::phi2(), &Alpha::from_angle(0.2), &CompareOptions::default()).unwrap();
    assert!(w.to_json().get("c").is_none());
}

#[test]
fn line_obstruction_is_reported() {
    // φ2 has a vertical line at α = −1; z1z2 has none
    let v = compare(&catalog::phi2(), &catalog::z1z2(), &Alpha::minus_one(), &CompareOptions::default()).unwrap();
    assert_eq!(v.answer, Answer::No);
    assert!(v.evidence.iter().any(|e| e.kind == "degenerate-obstruction"));
    check_invariants(&v);
}
