use std::f64::consts::TAU;

use clarkrif::catalog;
use clarkrif::clark::Alpha;
use clarkrif::polyalg::{parse_poly, ExactPoly, FloatPoly, Poly2};
use clarkrif::spaces::*;
use clarkrif::RationalInnerFunction;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = (Complex64, Complex64);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ex(s: &str) -> ExactPoly {
    parse_poly(s).unwrap()
}

fn rational(num: &str, den: &str) -> RationalFunction {
    RationalFunction::from_exact(&ex(num), &ex(den)).unwrap()
}

const ORIGIN: P = (Complex64 { re: 0.0, im: 0.0 }, Complex64 { re: 0.0, im: 0.0 });

/// Smallest eigenvalue of a Hermitian matrix through its real embedding.
fn min_eigenvalue(g: &[Vec<Complex64>]) -> f64 {
    let n = g.len();
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let v = g[i % n][j % n];
        match (i < n, j < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    });
    m.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn gram(b: &RationalInnerFunction, pts: &[P]) -> Vec<Vec<Complex64>> {
    pts.iter()
        .map(|&z| pts.iter().map(|&w| dbr_kernel(b, z, w).unwrap()).collect())
        .collect()
}

#[test]
fn dbr_kernel_values() {
    let b = catalog::z1z2();
    for z in [(c(0.3, 0.1), c(-0.5, 0.2)), (c(0.9, 0.0), c(0.0, -0.9))] {
        assert!((dbr_kernel(&b, z, ORIGIN).unwrap() - 1.0).norm() < 1e-15);
    }
    let fav = catalog::fav_rif(2);
    let z = (c(0.4, -0.2), c(0.1, 0.6));
    let k = dbr_kernel(&fav, z, z).unwrap();
    assert!(k.re >= 0.0 && k.im.abs() < 1e-15);
}

#[test]
fn gram_matrix_of_monomial_kernel_is_psd() {
    let pts = [ORIGIN, (c(0.3, 0.0), c(0.1, 0.0)), (c(-0.2, 0.0), c(0.4, 0.0))];
    assert!(min_eigenvalue(&gram(&catalog::z1z2(), &pts)) >= -1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn gram_matrices_are_psd(seed in any::<u64>(), n in 2usize..7, which in 0usize..4) {
        let b = match which {
            0 => catalog::z1z2(),
            1 => catalog::fav_rif(2),
            2 => catalog::phi1(),
            _ => catalog::phi2(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<P> = (0..n)
            .map(|_| {
                (
                    Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU)),
                    Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU)),
                )
            })
            .collect();
        prop_assert!(min_eigenvalue(&gram(&b, &pts)) >= -1e-10);
    }
}

#[test]
fn affine_slice_matches_closed_form_in_z1() {
    for z1 in [Complex64::i(), Complex64::from_polar(1.0, TAU / 6.0), c(-1.0, 0.0)] {
        let v = slice_integral_affine(c(2.0, 0.0), z1 + z1 * z1).unwrap();
        let m = 1_000_000;
        let b = z1 + z1 * z1;
        let brute = (0..m)
            .map(|k| 1.0 / (2.0 - b * Complex64::from_polar(1.0, TAU * k as f64 / m as f64)).norm_sqr())
            .sum::<f64>()
            / m as f64;
        assert!((v - 1.0 / (4.0 - (1.0 + z1).norm_sqr())).abs() <= 1e-10);
        assert!((v - brute).abs() <= 1e-10, "{v} {brute}");
    }
}

/// `∫_𝕋 |(c0 + c1ζ)/(a − bζ)|² dm` for `|a| > |b|`, by splitting off the
/// polynomial part.
fn linear_over_linear(c0: Complex64, c1: Complex64, a: Complex64, b: Complex64) -> f64 {
    if b.norm() == 0.0 {
        return (c0.norm_sqr() + c1.norm_sqr()) / a.norm_sqr();
    }
    let s = -c1 / b;
    let r = c0 + c1 * a / b;
    s.norm_sqr() + r.norm_sqr() / (a.norm_sqr() - b.norm_sqr()) + 2.0 * (s.conj() * r / a).re
}

#[test]
fn containment_example_is_finite() {
    let v = h2_classify(&rational(catalog::P1, catalog::P2), DEFAULT_MAX_LEVEL);
    let norm2 = v.norm2().expect("finite");
    // p1 = (4 − 3z1 + z1²) − (1 + z1) z2, p2 = 2 − (z1 + z1²) z2
    let m = 400_000;
    let oracle = (0..m)
        .map(|k| {
            let z = Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / m as f64);
            linear_over_linear(4.0 - 3.0 * z + z * z, -(1.0 + z), c(2.0, 0.0), z + z * z)
        })
        .sum::<f64>()
        / m as f64;
    assert!((norm2 - oracle).abs() < 1e-4 * oracle, "{norm2} {oracle}");
}

#[test]
fn favourite_reciprocal_diverges() {
    let v = h2_classify(&rational("2", "2 - z1 - z2"), DEFAULT_MAX_LEVEL);
    assert!(v.is_divergent(), "{:?}", v.trace);
    let s: Vec<f64> = v.trace.iter().map(|t| t.partial_sum).collect();
    let n = s.len();
    assert!(n > GROWTH_RUN);
    for i in n - GROWTH_RUN..n {
        assert!(s[i] >= GROWTH_FACTOR * s[i - 1]);
    }
}

#[test]
fn bounded_denominator_is_finite() {
    let v = h2_classify(&rational("3", "3 - z1 - z2"), DEFAULT_MAX_LEVEL);
    let oracle = 9.0 * sampled_norm2(|z| 1.0 / (3.0 - z.0 - z.1), 512);
    assert!((v.norm2().unwrap() - oracle).abs() < 1e-10 * oracle);
}

fn sampled_norm2<F: Fn(P) -> Complex64>(f: F, n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            let z = (
                Complex64::from_polar(1.0, TAU * j as f64 / n as f64),
                Complex64::from_polar(1.0, TAU * k as f64 / n as f64),
            );
            s += f(z).norm_sqr();
        }
    }
    s / (n * n) as f64
}

#[test]
fn sampled_classifier_agrees_on_smooth_input() {
    let f = rational("1 + z1*z2", "3 - z1 - z2");
    let a = h2_classify(&f, DEFAULT_MAX_LEVEL).norm2().unwrap();
    let b = h2_classify_sampled(|z| f.eval(z), DEFAULT_SAMPLED_MAX_LEVEL).norm2().unwrap();
    assert!((a - b).abs() < 1e-9 * a);
}

#[test]
fn verdict_json_shape() {
    let v = h2_classify(&rational("3", "3 - z1 - z2"), 6);
    let j = serde_json::to_value(&v).unwrap();
    assert_eq!(j["class"], "finite");
    assert!(j["norm2"].is_f64());
    assert!(j["trace"].as_array().unwrap().len() >= 4);
    assert!(j.get("residual").is_none());
    let d = serde_json::to_value(h2_classify(&rational("2", "2 - z1 - z2"), 8)).unwrap();
    assert_eq!(d["class"], "divergent");
    assert!(d.get("norm2").is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn finite_norms_are_stable_under_more_levels(
        a in 2.0f64..4.0, t1 in 0.0f64..TAU, t2 in 0.0f64..TAU, frac in 0.1f64..0.9,
        q in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let r = a * frac / 2.0;
        let den: FloatPoly = Poly2::from_terms(vec![
            ((0, 0), c(a, 0.0)),
            ((1, 0), -Complex64::from_polar(r, t1)),
            ((0, 1), -Complex64::from_polar(r, t2)),
        ]);
        let num: FloatPoly = Poly2::from_terms(vec![
            ((0, 0), c(q[0].0, q[0].1)),
            ((1, 0), c(q[1].0, q[1].1)),
            ((0, 1), c(q[2].0, q[2].1)),
            ((1, 1), c(q[3].0, q[3].1)),
        ]);
        let f = RationalFunction::new(num, vec![den]).unwrap();
        let first = h2_classify(&f, DEFAULT_MAX_LEVEL);
        let norm = first.norm2().unwrap();
        let reached = first.trace.last().unwrap().level;
        let s: Vec<f64> = first.trace.iter().map(|t| t.partial_sum).collect();
        prop_assert!((s[s.len() - 1] - s[s.len() - 2]).abs() <= CONVERGENCE_TOL * norm);
        for max_level in reached..=reached + 2 {
            prop_assert_eq!(h2_classify(&f, max_level).norm2(), Some(norm));
        }
        let oracle = sampled_norm2(|z| f.eval(z), 256);
        prop_assert!((norm - oracle).abs() <= 1e-8 * oracle);
    }
}

#[test]
fn anti_diagonal_quotient_lies_in_model_space() {
    let o = model_space_orthogonality(|z: P| (2.0 - z.0 - z.1) / 2.0, &catalog::z1z2(), 8, DEFAULT_FOURIER_GRID).unwrap();
    assert!(o.residual <= 1e-10, "{}", o.residual);
    assert!((o.norm2 - 1.5).abs() < 1e-12);
}

#[test]
fn favourite_kernel_is_orthogonal_to_its_range() {
    let phi = catalog::fav_rif(3);
    let o = model_space_orthogonality(|z: P| 3.0 / (3.0 - z.0 - z.1), &phi, 8, DEFAULT_FOURIER_GRID).unwrap();
    assert!(o.residual <= 1e-8, "{}", o.residual);
}

#[test]
fn inner_function_has_unit_norm_channel() {
    for phi in [catalog::z1z2(), catalog::fav_rif(2), catalog::fav_rif(3), catalog::phi2()] {
        let o = model_space_orthogonality(|z: P| phi.boundary_eval(z).unwrap(), &phi, 0, DEFAULT_FOURIER_GRID).unwrap();
        assert!((o.norm2 - 1.0).abs() < 1e-10, "{}", o.norm2);
        // ⟨φ, φ⟩ is the k = 0 pairing itself
        assert!((o.residual - 1.0).abs() < 1e-6);
    }
}

#[test]
fn fourier_parameters_are_validated() {
    let phi = catalog::z1z2();
    assert!(model_space_orthogonality(|_: P| c(1.0, 0.0), &phi, 8, 100).is_err());
    assert!(model_space_orthogonality(|_: P| c(1.0, 0.0), &phi, 65, 256).is_err());
    assert!(model_space_orthogonality(|_: P| c(1.0, 0.0), &phi, 64, 256).is_ok());
}

#[test]
fn rational_and_sampled_pairings_agree() {
    let phi = catalog::fav_rif(3);
    let g = rational("1 + z1^2*z2 - 2*z2", "3 - z1 - z2");
    let a = rational_orthogonality(&g, &phi, 8, 256).unwrap();
    let b = model_space_orthogonality(|z| g.eval(z), &phi, 8, 256).unwrap();
    assert!(a.residual > 1e-3);
    assert!((a.residual - b.residual).abs() < 1e-10, "{} {}", a.residual, b.residual);
    assert!((a.norm2 - b.norm2).abs() < 1e-10);
}

fn random_poly1(rng: &mut ChaCha8Rng, axis_first: bool) -> Vec<((u32, u32), Complex64)> {
    let deg = rng.gen_range(1..=8u32);
    (1..=deg)
        .map(|j| {
            let e = if axis_first { (j, 0) } else { (0, j) };
            (e, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn separated_functions_lie_in_monomial_model_space(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = vec![((0, 0), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))];
        terms.extend(random_poly1(&mut rng, true));
        terms.extend(random_poly1(&mut rng, false));
        let f: FloatPoly = Poly2::from_terms(terms);
        let o = model_space_orthogonality(|z: P| f.eval_c64(z.0, z.1), &catalog::z1z2(), DEFAULT_K, DEFAULT_FOURIER_GRID).unwrap();
        prop_assert!(o.residual <= 1e-10);
    }

    #[test]
    fn mixed_monomials_are_detected(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = random_poly1(&mut rng, true);
        terms.extend(random_poly1(&mut rng, false));
        let e = (rng.gen_range(1..=4u32), rng.gen_range(1..=4u32));
        terms.push((e, Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..TAU))));
        let f: FloatPoly = Poly2::from_terms(terms);
        let o = model_space_orthogonality(|z: P| f.eval_c64(z.0, z.1), &catalog::z1z2(), DEFAULT_K, DEFAULT_FOURIER_GRID).unwrap();
        prop_assert!(o.residual > 1e-3);
    }
}

#[test]
fn favourite_certificate_over_monomial() {
    let cert = hb_membership_certificate(&catalog::fav_rif(2), &catalog::z1z2(), &Alpha::one(), ORIGIN, &HbOptions::default()).unwrap();
    assert!(cert.symbolic && cert.passed);
    assert!((cert.verdict.norm2().unwrap() - 1.5).abs() < 1e-9);
    assert!(cert.verdict.residual.unwrap() <= 1e-8);
    let g = symbolic_certificate_function(&catalog::fav_rif(2), &catalog::z1z2(), &Alpha::one(), ORIGIN).unwrap().unwrap();
    for z in [(c(0.3, 0.2), c(-0.1, 0.5)), (c(0.0, 0.9), c(0.5, 0.0))] {
        assert!((g.eval(z) - (2.0 - z.0 - z.1) / 2.0).norm() < 1e-14);
    }
}

#[test]
fn monomial_certificate_over_favourite_diverges() {
    let cert = hb_membership_certificate(&catalog::z1z2(), &catalog::fav_rif(2), &Alpha::one(), ORIGIN, &HbOptions::default()).unwrap();
    assert!(cert.verdict.is_divergent() && !cert.passed);
    assert!(cert.orthogonality.is_none());
}

#[test]
fn kernels_lie_in_their_own_space() {
    let w_set = [ORIGIN, (c(0.3, 0.0), c(0.1, 0.0)), (c(-0.2, 0.0), c(0.0, 0.4))];
    let cases = [
        (catalog::fav_rif(2), Alpha::one()),
        (catalog::phi1(), Alpha::minus_one()),
        (catalog::phi2(), Alpha::exact(clarkrif::polyalg::parse_coeff("i").unwrap()).unwrap()),
        (catalog::fav_rif(3), Alpha::from_angle(0.4)),
    ];
    for (b, alpha) in cases {
        for w in w_set {
            let cert = hb_membership_certificate(&b, &b, &alpha, w, &HbOptions::default()).unwrap();
            assert!(cert.passed, "{alpha} {w:?} {:?}", cert.orthogonality);
        }
        let g = symbolic_certificate_function(&b, &b, &alpha, ORIGIN).unwrap().unwrap();
        let z = (c(0.2, -0.3), c(0.4, 0.1));
        assert!((g.eval(z) - dbr_kernel(&b, z, ORIGIN).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn sampled_path_without_cancellation() {
    // 1 − z1z2 does not divide 3 + z1 − z1z2 − 3z1²z2
    let b1 = catalog::z1z2();
    let b2 = catalog::phi2();
    let alpha = Alpha::one();
    assert!(symbolic_certificate_function(&b1, &b2, &alpha, ORIGIN).unwrap().is_none());
    let opts = HbOptions { sampled_max_level: 5, ..HbOptions::default() };
    let cert = hb_membership_certificate(&b1, &b2, &alpha, ORIGIN, &opts).unwrap();
    assert!(!cert.symbolic);
    assert_eq!(cert.verdict.method, "sampled-grid");
    assert_eq!(cert.passed, cert.verdict.is_finite() && cert.verdict.residual.unwrap() <= DEFAULT_ORTHO_TOL);
}
