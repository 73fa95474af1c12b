//! Gröbner bases over `ℚ(i)` for bivariate ideals, and the `L²`-ideal test
//! that combines exact membership in `⟨p, p̃⟩` with quadrature.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polyalg::{Axis, Coeff, ExactPoly, Exp, Poly2, TermFormat};
use crate::rif::check_stable;
use crate::spaces::{h2_classify, MembershipVerdict, RationalFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    Grevlex,
}

/// Monomial order on `z1^j z2^k`; `first` is the variable of highest
/// precedence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub first: Axis,
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder { kind: OrderKind::Grevlex, first: Axis::First }
    }
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, first: Axis) -> Self {
        MonomialOrder { kind, first }
    }

    /// The four supported orders.
    pub fn all() -> [MonomialOrder; 4] {
        [
            MonomialOrder::new(OrderKind::Lex, Axis::First),
            MonomialOrder::new(OrderKind::Lex, Axis::Second),
            MonomialOrder::new(OrderKind::Grevlex, Axis::First),
            MonomialOrder::new(OrderKind::Grevlex, Axis::Second),
        ]
    }

    pub fn cmp(&self, a: Exp, b: Exp) -> Ordering {
        let key = |e: Exp| match self.first {
            Axis::First => (e.0, e.1),
            Axis::Second => (e.1, e.0),
        };
        let (ka, kb) = (key(a), key(b));
        match self.kind {
            OrderKind::Lex => ka.cmp(&kb),
            // with two variables grevlex is graded lex
            OrderKind::Grevlex => (ka.0 + ka.1).cmp(&(kb.0 + kb.1)).then(ka.cmp(&kb)),
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            OrderKind::Lex => "lex",
            OrderKind::Grevlex => "grevlex",
        };
        let vars = match self.first {
            Axis::First => "z1,z2",
            Axis::Second => "z2,z1",
        };
        write!(f, "{kind}:{vars}")
    }
}

impl FromStr for MonomialOrder {
    type Err = Error;

    /// `lex`, `grevlex`, optionally followed by `:z1,z2` or `:z2,z1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown monomial order {s:?}"));
        let (kind, vars) = match s.trim().split_once(':') {
            Some((k, v)) => (k.trim(), Some(v)),
            None => (s.trim(), None),
        };
        let kind = match kind.to_ascii_lowercase().as_str() {
            "lex" => OrderKind::Lex,
            "grevlex" => OrderKind::Grevlex,
            _ => return Err(bad()),
        };
        let first = match vars.map(|v| v.replace(' ', "")) {
            None => Axis::First,
            Some(v) if v == "z1,z2" => Axis::First,
            Some(v) if v == "z2,z1" => Axis::Second,
            Some(_) => return Err(bad()),
        };
        Ok(MonomialOrder { kind, first })
    }
}

impl Serialize for MonomialOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn leading_term<'a, C: Coeff>(p: &'a Poly2<C>, order: &MonomialOrder) -> Option<(Exp, &'a C)> {
    p.terms().max_by(|a, b| order.cmp(*a.0, *b.0)).map(|(e, c)| (*e, c))
}

fn divides(a: Exp, b: Exp) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

fn lcm(a: Exp, b: Exp) -> Exp {
    (a.0.max(b.0), a.1.max(b.1))
}

fn monic<C: Coeff>(p: &Poly2<C>, order: &MonomialOrder) -> Poly2<C> {
    match leading_term(p, order).and_then(|(_, c)| c.inv()) {
        Some(inv) => p.scale(&inv),
        None => p.clone(),
    }
}

/// Full multivariate division remainder of `q` by `divisors`.
fn reduce<C: Coeff>(q: &Poly2<C>, divisors: &[Poly2<C>], order: &MonomialOrder) -> Poly2<C> {
    let leads: Vec<(Exp, C)> = divisors
        .iter()
        .filter_map(|g| leading_term(g, order).map(|(e, c)| (e, c.clone())))
        .collect();
    let mut p = q.clone();
    let mut rem: Vec<(Exp, C)> = Vec::new();
    while let Some((e, c)) = leading_term(&p, order).map(|(e, c)| (e, c.clone())) {
        match leads.iter().position(|(l, _)| divides(*l, e)) {
            Some(i) => {
                let (l, lc) = &leads[i];
                let t = c * lc.inv().expect("nonzero leading coefficient");
                let sub = divisors[i].mul_term(&t, (e.0 - l.0, e.1 - l.1));
                p = &p - &sub;
                p = Poly2::from_terms(p.terms().filter(|(x, _)| **x != e).map(|(x, v)| (*x, v.clone())));
            }
            None => {
                rem.push((e, c));
                p = Poly2::from_terms(p.terms().filter(|(x, _)| **x != e).map(|(x, v)| (*x, v.clone())));
            }
        }
    }
    Poly2::from_terms(rem)
}

fn s_polynomial<C: Coeff>(f: &Poly2<C>, g: &Poly2<C>, order: &MonomialOrder) -> Poly2<C> {
    let (ef, cf) = leading_term(f, order).expect("nonzero");
    let (eg, cg) = leading_term(g, order).expect("nonzero");
    let l = lcm(ef, eg);
    let a = f.mul_term(&cf.inv().expect("nonzero"), (l.0 - ef.0, l.1 - ef.1));
    let b = g.mul_term(&cg.inv().expect("nonzero"), (l.0 - eg.0, l.1 - eg.1));
    &a - &b
}

/// Reduced Gröbner basis: generators are monic, sorted by decreasing
/// leading monomial, and no term of one is divisible by another's leader.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<C: Coeff = crate::polyalg::GaussRat> {
    generators: Vec<Poly2<C>>,
    order: MonomialOrder,
    reduced: bool,
}

impl<C: Coeff> GroebnerBasis<C> {
    pub fn generators(&self) -> &[Poly2<C>] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn normal_form(&self, q: &Poly2<C>) -> Poly2<C> {
        reduce(q, &self.generators, &self.order)
    }

    pub fn contains(&self, q: &Poly2<C>) -> bool {
        self.normal_form(q).is_zero()
    }

    /// Every S-polynomial of a pair of generators reduces to zero.
    pub fn verify(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (0..i).all(|j| self.normal_form(&s_polynomial(&g[i], &g[j], &self.order)).is_zero()))
    }

    /// Both bases generate the same ideal, by mutual reduction.
    pub fn same_ideal(&self, other: &GroebnerBasis<C>) -> bool {
        other.generators.iter().all(|g| self.contains(g)) && self.generators.iter().all(|g| other.contains(g))
    }
}

impl<C: Coeff + TermFormat> GroebnerBasis<C> {
    /// `{order, basis, remainder}` with polynomials in the text grammar.
    pub fn envelope(&self, remainder: Option<&Poly2<C>>) -> serde_json::Value {
        serde_json::json!({
            "order": self.order.to_string(),
            "basis": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "remainder": remainder.map(|r| r.to_string()),
        })
    }
}

/// Buchberger's algorithm with the product and chain criteria, followed by
/// interreduction.
pub fn buchberger<C: Coeff>(gens: &[Poly2<C>], order: MonomialOrder) -> Result<GroebnerBasis<C>> {
    if !C::EXACT {
        return Err(Error::InvalidArgument("Gröbner bases need exact coefficients".into()));
    }
    if gens.is_empty() {
        return Err(Error::InvalidArgument("empty generating set".into()));
    }
    let mut g: Vec<Poly2<C>> = gens.iter().filter(|p| !p.is_zero()).map(|p| monic(p, &order)).collect();
    if g.is_empty() {
        return Ok(GroebnerBasis { generators: Vec::new(), order, reduced: true });
    }
    let lead = |p: &Poly2<C>| leading_term(p, &order).expect("nonzero").0;
    let mut pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|i| (0..i).map(move |j| (j, i))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (lead(&g[i]), lead(&g[j]));
        let l = lcm(li, lj);
        if l == (li.0 + lj.0, li.1 + lj.1) {
            continue;
        }
        let pending = |a: usize, b: usize| pairs.contains(&(a.min(b), a.max(b)));
        let chain = (0..g.len()).any(|k| k != i && k != j && divides(lead(&g[k]), l) && !pending(i, k) && !pending(j, k));
        if chain {
            continue;
        }
        let s = reduce(&s_polynomial(&g[i], &g[j], &order), &g, &order);
        if !s.is_zero() {
            let n = g.len();
            g.push(monic(&s, &order));
            pairs.extend((0..n).map(|k| (k, n)));
        }
    }

    // minimal basis, then interreduce
    let mut minimal: Vec<Poly2<C>> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let lp = lead(p);
        let redundant = g.iter().enumerate().any(|(k, q)| {
            let lq = lead(q);
            k != i && divides(lq, lp) && (lq != lp || k < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly2<C>> = minimal.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, q)| q.clone()).collect();
        let (e, c) = leading_term(&minimal[i], &order).map(|(e, c)| (e, c.clone())).expect("nonzero");
        let tail = Poly2::from_terms(minimal[i].terms().filter(|(x, _)| **x != e).map(|(x, v)| (*x, v.clone())));
        let r = &reduce(&tail, &others, &order) + &Poly2::monomial(c, e.0, e.1);
        reduced.push(monic(&r, &order));
    }
    reduced.sort_by(|a, b| order.cmp(lead(b), lead(a)));
    let basis = GroebnerBasis { generators: reduced, order, reduced: true };
    if !basis.verify() {
        return Err(Error::InvalidArgument("S-polynomial verification failed".into()));
    }
    Ok(basis)
}

pub fn normal_form<C: Coeff>(q: &Poly2<C>, basis: &GroebnerBasis<C>) -> Poly2<C> {
    basis.normal_form(q)
}

pub fn ideal_member<C: Coeff>(q: &Poly2<C>, gens: &[Poly2<C>], order: MonomialOrder) -> Result<bool> {
    Ok(buchberger(gens, order)?.contains(q))
}

/// `⟨a⟩ = ⟨b⟩`.
pub fn ideals_equal<C: Coeff>(a: &[Poly2<C>], b: &[Poly2<C>], order: MonomialOrder) -> Result<bool> {
    Ok(buchberger(a, order)?.same_ideal(&buchberger(b, order)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum L2IdealVerdict {
    MemberViaPPtilde,
    QuadratureFinite { norm2: f64 },
    Divergent,
    Inconclusive,
}

/// Outcome of [`l2_ideal_test`] with its supporting certificates.
#[derive(Clone, Debug, Serialize)]
pub struct L2IdealTest {
    #[serde(flatten)]
    pub verdict: L2IdealVerdict,
    /// Normal form of `q` modulo `⟨p, p̃⟩`, in the text grammar.
    pub remainder: String,
    pub order: MonomialOrder,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<MembershipVerdict>,
}

impl L2IdealTest {
    /// `q/p ∈ H²` was certified.
    pub fn is_member(&self) -> bool {
        matches!(self.verdict, L2IdealVerdict::MemberViaPPtilde | L2IdealVerdict::QuadratureFinite { .. })
    }
}

/// Decides `q ∈ 𝓘_{L²}(p)`, i.e. `q/p ∈ H²(𝔻²)`: exact membership in
/// `⟨p, p̃⟩` is sufficient; otherwise the quotient is classified by
/// quadrature.
pub fn l2_ideal_test(q: &ExactPoly, p: &ExactPoly, d: Exp, order: MonomialOrder, max_level: usize) -> Result<L2IdealTest> {
    check_stable(&p.to_float(), crate::rif::DEFAULT_GRID_N)?;
    let pt = p.reflect(d)?;
    let basis = buchberger(&[p.clone(), pt], order)?;
    let r = basis.normal_form(q);
    let remainder = r.to_string();
    if r.is_zero() {
        return Ok(L2IdealTest { verdict: L2IdealVerdict::MemberViaPPtilde, remainder, order, quadrature: None });
    }
    let v = h2_classify(&RationalFunction::from_exact(q, p)?, max_level);
    let verdict = match v.class {
        crate::spaces::MembershipClass::Finite { norm2 } => L2IdealVerdict::QuadratureFinite { norm2 },
        crate::spaces::MembershipClass::Divergent => L2IdealVerdict::Divergent,
        crate::spaces::MembershipClass::Inconclusive => L2IdealVerdict::Inconclusive,
    };
    Ok(L2IdealTest { verdict, remainder, order, quadrature: Some(v) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    fn p(s: &str) -> ExactPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn order_comparisons() {
        let lex = MonomialOrder::new(OrderKind::Lex, Axis::First);
        assert_eq!(lex.cmp((1, 0), (0, 5)), Ordering::Greater);
        let lex2 = MonomialOrder::new(OrderKind::Lex, Axis::Second);
        assert_eq!(lex2.cmp((1, 0), (0, 5)), Ordering::Less);
        let gr = MonomialOrder::default();
        assert_eq!(gr.cmp((1, 0), (0, 2)), Ordering::Less);
        assert_eq!(gr.cmp((1, 1), (0, 2)), Ordering::Greater);
        let gr2 = MonomialOrder::new(OrderKind::Grevlex, Axis::Second);
        assert_eq!(gr2.cmp((1, 1), (0, 2)), Ordering::Less);
    }

    #[test]
    fn order_parsing_round_trips() {
        for o in MonomialOrder::all() {
            assert_eq!(o.to_string().parse::<MonomialOrder>().unwrap(), o);
        }
        assert_eq!("lex".parse::<MonomialOrder>().unwrap(), MonomialOrder::new(OrderKind::Lex, Axis::First));
        assert!("deglex".parse::<MonomialOrder>().is_err());
        assert!("lex:z1,z3".parse::<MonomialOrder>().is_err());
    }

    #[test]
    fn unit_ideal() {
        for o in MonomialOrder::all() {
            let b = buchberger(&[p("1")], o).unwrap();
            assert_eq!(b.generators(), &[p("1")]);
            let b = buchberger(&[p("z1 - 1"), p("z1 - 2")], o).unwrap();
            assert_eq!(b.generators(), &[p("1")]);
        }
    }

    #[test]
    fn float_input_is_rejected() {
        let f = p("1 + z1").to_float();
        assert!(matches!(buchberger(&[f], MonomialOrder::default()), Err(Error::InvalidArgument(_))));
        assert!(buchberger::<crate::polyalg::GaussRat>(&[], MonomialOrder::default()).is_err());
    }

    #[test]
    fn zero_has_zero_normal_form() {
        let b = buchberger(&[p("1 - z1*z2")], MonomialOrder::default()).unwrap();
        assert!(b.normal_form(&p("0")).is_zero());
    }
}
