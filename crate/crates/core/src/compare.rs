//! Decides whether `σ¹ ≪ σ²` with `dσ¹/dσ² ∈ L²(σ²)` for the Clark measures
//! of two rational inner functions at the same `α`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clark::{degenerate_components, Alpha, DegenerateLine};
use crate::error::{Error, Point2, Result};
use crate::groebner::{l2_ideal_test, L2IdealVerdict, MonomialOrder};
use crate::polyalg::{Coeff, GaussRat};
use crate::rif::RationalInnerFunction;
use crate::spaces::{hb_membership_certificate, HbCertificate, HbOptions, DEFAULT_MAX_LEVEL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub kind: &'static str,
    pub detail: String,
    pub value: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Direction {
    pub b1: String,
    pub d1: (u32, u32),
    pub b2: String,
    pub d2: (u32, u32),
    pub alpha: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonVerdict {
    pub answer: Answer,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_display")]
    pub c: Option<GaussRat>,
    pub direction: Direction,
    /// Verdict of the proportionality/ideal path, when it applied.
    pub exact_answer: Option<Answer>,
    /// Verdict of the `H(b2)` certificate path, when it ran.
    pub numerical_answer: Option<Answer>,
    pub evidence: Vec<Evidence>,
    /// Wall-clock milliseconds per stage.
    pub timings: BTreeMap<&'static str, f64>,
}

fn ser_opt_display<S: serde::Serializer>(c: &Option<GaussRat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match c {
        Some(c) => s.collect_str(c),
        None => s.serialize_none(),
    }
}

impl ComparisonVerdict {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("verdicts serialize")
    }
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub w_set: Vec<Point2>,
    pub hb: HbOptions,
    pub order: MonomialOrder,
    pub max_level: usize,
    /// Run the numerical path even when the exact path decided.
    pub cross_check: bool,
}

/// `(0, 0)` and two generic interior points.
pub fn default_w_set() -> Vec<Point2> {
    vec![
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.3, 0.0), Complex64::new(0.1, 0.0)),
        (Complex64::new(-0.2, 0.0), Complex64::new(0.0, 0.4)),
    ]
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            w_set: default_w_set(),
            hb: HbOptions::default(),
            order: MonomialOrder::default(),
            max_level: DEFAULT_MAX_LEVEL,
            cross_check: false,
        }
    }
}

/// `c` with `αp2 − p̃2 = c(αp1 − p̃1)`, if any. Needs an exact `α`.
pub fn proportionality_constant(
    b1: &RationalInnerFunction,
    b2: &RationalInnerFunction,
    alpha: &Alpha,
) -> Result<Option<GaussRat>> {
    let a = alpha
        .as_exact()
        .ok_or_else(|| Error::InvalidArgument("proportionality needs an exact alpha".into()))?;
    let l1 = &b1.p().scale(a) - b1.ptilde();
    let l2 = &b2.p().scale(a) - b2.ptilde();
    let Some((&(j, k), c1)) = l1.terms().next() else {
        return Err(Error::InvalidArgument("alpha*p1 - reflect(p1) vanishes identically".into()));
    };
    let c = l2.coeff(j, k) * c1.inv().expect("nonzero term");
    if c.is_zero() || l1.scale(&c) != l2 {
        return Ok(None);
    }
    Ok(Some(c))
}

fn same_line(a: &DegenerateLine, b: &DegenerateLine) -> bool {
    a.axis == b.axis && (a.anchor - b.anchor).norm() <= 1e-8
}

fn cert_evidence(c: &HbCertificate) -> Evidence {
    let detail = match (c.verdict.norm2(), &c.orthogonality) {
        (Some(n), Some(o)) => format!(
            "w = {:?}: g in H^2 with norm^2 {n:.12}, orthogonality residual {:.3e} ({})",
            c.w,
            o.residual,
            if c.passed { "pass" } else { "fail" }
        ),
        _ => format!("w = {:?}: g is {:?}", c.w, c.verdict.class),
    };
    Evidence { kind: "hb-certificate", detail, value: serde_json::to_value(c).expect("serializable") }
}

/// `H(b2)` certificates over `w_set`: any pass → Yes, all divergent → No.
fn numerical_path(
    b1: &RationalInnerFunction,
    b2: &RationalInnerFunction,
    alpha: &Alpha,
    opts: &CompareOptions,
    evidence: &mut Vec<Evidence>,
) -> Result<Answer> {
    let mut all_divergent = !opts.w_set.is_empty();
    for &w in &opts.w_set {
        let cert = hb_membership_certificate(b1, b2, alpha, w, &opts.hb)?;
        evidence.push(cert_evidence(&cert));
        if cert.passed {
            return Ok(Answer::Yes);
        }
        all_divergent &= cert.verdict.is_divergent();
    }
    Ok(if all_divergent { Answer::No } else { Answer::Unknown })
}

pub fn compare(
    b1: &RationalInnerFunction,
    b2: &RationalInnerFunction,
    alpha: &Alpha,
    opts: &CompareOptions,
) -> Result<ComparisonVerdict> {
    let mut evidence = Vec::new();
    let mut timings = BTreeMap::new();
    let mut timed = |name: &'static str, t: Instant| {
        timings.insert(name, t.elapsed().as_secs_f64() * 1e3);
    };

    let t = Instant::now();
    let c = match alpha.as_exact() {
        Some(_) => proportionality_constant(b1, b2, alpha)?,
        None => None,
    };
    evidence.push(Evidence {
        kind: "proportionality",
        detail: match &c {
            Some(c) => format!("alpha*p2 - reflect(p2) = ({c})*(alpha*p1 - reflect(p1))"),
            None if alpha.as_exact().is_none() => "skipped for inexact alpha".into(),
            None => "alpha*p2 - reflect(p2) is not a constant multiple of alpha*p1 - reflect(p1)".into(),
        },
        value: c.as_ref().map_or(Value::Null, |c| json!(c.to_string())),
    });
    timed("proportionality", t);

    let mut exact_answer = None;
    if c.is_some() {
        let t = Instant::now();
        let test = l2_ideal_test(b1.p(), b2.p(), b2.bidegree(), opts.order, opts.max_level)?;
        let answer = match test.verdict {
            L2IdealVerdict::MemberViaPPtilde | L2IdealVerdict::QuadratureFinite { .. } => Some(Answer::Yes),
            L2IdealVerdict::Divergent => Some(Answer::No),
            L2IdealVerdict::Inconclusive => None,
        };
        evidence.push(Evidence {
            kind: "l2-ideal",
            detail: format!("p1 / p2 membership: {:?}, remainder modulo <p2, reflect(p2)> = {}", test.verdict, test.remainder),
            value: serde_json::to_value(&test).expect("serializable"),
        });
        exact_answer = answer;
        timed("l2-ideal", t);
    }

    let t = Instant::now();
    let numerical_answer = match exact_answer {
        Some(_) if !opts.cross_check => {
            // the exact path is authoritative; a Yes still needs a passing certificate
            (exact_answer == Some(Answer::Yes)).then(|| numerical_path(b1, b2, alpha, opts, &mut evidence)).transpose()?
        }
        _ => Some(numerical_path(b1, b2, alpha, opts, &mut evidence)?),
    };
    timed("hb-certificates", t);

    let mut answer = match (exact_answer, numerical_answer) {
        (Some(Answer::Yes), n) if n != Some(Answer::Yes) => {
            evidence.push(Evidence {
                kind: "missing-certificate",
                detail: "no H(b2) certificate passed for any w".into(),
                value: Value::Null,
            });
            Answer::Unknown
        }
        (Some(e), _) => e,
        (None, Some(n)) => n,
        (None, None) => Answer::Unknown,
    };

    let t = Instant::now();
    let lines1 = degenerate_components(b1, alpha)?;
    let lines2 = degenerate_components(b2, alpha)?;
    let missing: Vec<&DegenerateLine> = lines1.iter().filter(|l| !lines2.iter().any(|m| same_line(l, m))).collect();
    evidence.push(Evidence {
        kind: "degenerate-lines",
        detail: format!("sigma1 has {} degenerate line(s), sigma2 has {}", lines1.len(), lines2.len()),
        value: json!({ "sigma1": lines1, "sigma2": lines2 }),
    });
    // σ² gives a line zero mass unless the line is one of its own components
    if !missing.is_empty() {
        answer = Answer::No;
        evidence.push(Evidence {
            kind: "degenerate-obstruction",
            detail: format!("{} degenerate line(s) of sigma1 carry no sigma2 mass", missing.len()),
            value: serde_json::to_value(&missing).expect("serializable"),
        });
    }
    timed("degenerate-lines", t);

    let numerical_answer = if opts.cross_check || exact_answer.is_none() { numerical_answer } else { None };
    if exact_answer.is_some() && numerical_answer.is_some() && exact_answer != numerical_answer {
        evidence.push(Evidence {
            kind: "path-disagreement",
            detail: format!("exact path {:?}, numerical path {:?}", exact_answer, numerical_answer),
            value: Value::Null,
        });
    }

    let direction = Direction {
        b1: b1.p().to_string(),
        d1: b1.bidegree(),
        b2: b2.p().to_string(),
        d2: b2.bidegree(),
        alpha: alpha.to_string(),
    };
    Ok(ComparisonVerdict { answer, c, direction, exact_answer, numerical_answer, evidence, timings })
}
