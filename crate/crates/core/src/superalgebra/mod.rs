//! Supercommutative Laurent algebra of a chart `C^{n|m}`.
//!
//! Even coordinates carry integer (possibly negative) exponents, odd
//! coordinates form a subset stored as a bitmask. Products pick up the Koszul
//! sign of merging the two odd subsets into increasing order.

mod chart;
mod derivation;
mod explog;

pub use chart::{projective_chart_change, projective_chart_change_with, ChartSubstitution};
pub use derivation::{supercommutator, SuperDerivation};
pub use explog::{super_exp, super_log};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_count(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, o: Parity) -> Parity {
        if self == o {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(−1)^{|a||b|}` as a scalar sign.
    pub fn koszul(a: Parity, b: Parity) -> i64 {
        if a.is_odd() && b.is_odd() {
            -1
        } else {
            1
        }
    }
}

/// Variable names of a chart. `params` are extra commuting indeterminates
/// with no derivation slot (formal coefficients such as `α₁..α₈`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub params: Vec<String>,
}

impl VarContext {
    pub fn new(even: Vec<String>, odd: Vec<String>, params: Vec<String>) -> Arc<Self> {
        assert!(odd.len() <= 64, "at most 64 odd variables");
        Arc::new(VarContext { even, odd, params })
    }

    /// Chart `U` of `P^{1|m}`: `z, t1..tm`.
    pub fn u_chart(m: usize) -> Arc<Self> {
        Self::new(vec!["z".into()], odd_names("t", m), Vec::new())
    }

    /// Chart `V` of `P^{1|m}`: `w, p1..pm`.
    pub fn v_chart(m: usize) -> Arc<Self> {
        Self::new(vec!["w".into()], odd_names("p", m), Vec::new())
    }

    /// Chart `U_0` (`j = 0`) or `U_1` (`j = 1`) of `P^{n|m}`. For `n = 1` these
    /// are [`Self::u_chart`] and [`Self::v_chart`].
    pub fn projective_chart(n: usize, m: usize, j: usize) -> Arc<Self> {
        assert!(j <= 1, "only the charts U_0 and U_1 are modelled");
        let (e, o) = if j == 0 { ("z", "t") } else { ("w", "p") };
        let even = if n == 1 { vec![e.to_string()] } else { (1..=n).map(|k| format!("{e}{k}")).collect() };
        Self::new(even, odd_names(o, m), Vec::new())
    }

    pub fn with_params(&self, params: Vec<String>) -> Arc<Self> {
        Self::new(self.even.clone(), self.odd.clone(), params)
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    /// Even coordinates plus parameters: the length of an exponent vector.
    pub fn n_exps(&self) -> usize {
        self.even.len() + self.params.len()
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(i) = self.even.iter().position(|v| v == name) {
            return Some(Var::Even(i));
        }
        if let Some(i) = self.odd.iter().position(|v| v == name) {
            return Some(Var::Odd(i));
        }
        self.params.iter().position(|v| v == name).map(Var::Param)
    }
}

fn odd_names(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("{prefix}{k}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Even(usize),
    Odd(usize),
    Param(usize),
}

fn same_ctx(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `x^e θ^S` with `S` kept as a bitmask in increasing index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperMonomial {
    pub exps: Vec<i32>,
    pub mask: u64,
}

impl SuperMonomial {
    pub fn one(n_exps: usize) -> Self {
        SuperMonomial { exps: vec![0; n_exps], mask: 0 }
    }

    pub fn odd_degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn parity(&self) -> Parity {
        Parity::of_count(self.odd_degree())
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum::<i64>() + self.odd_degree() as i64
    }

    pub fn is_constant(&self) -> bool {
        self.mask == 0 && self.exps.iter().all(|&e| e == 0)
    }

    pub fn odd_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |i| self.mask >> i & 1 == 1)
    }

    /// Product with Koszul sign, or `None` when an odd variable repeats.
    pub fn mul(&self, o: &SuperMonomial) -> Option<(SuperMonomial, bool)> {
        if self.mask & o.mask != 0 {
            return None;
        }
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect();
        Some((SuperMonomial { exps, mask: self.mask | o.mask }, merge_sign(self.mask, o.mask)))
    }
}

/// Parity of the number of transpositions merging `a` then `b` into sorted order;
/// `true` means the sign is negative.
pub fn merge_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 63 { 0 } else { a >> (j + 1) };
        swaps += above.count_ones();
    }
    swaps % 2 == 1
}

impl Ord for SuperMonomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.total_degree()
            .cmp(&o.total_degree())
            .then_with(|| self.exps.cmp(&o.exps))
            .then_with(|| self.mask.cmp(&o.mask))
    }
}

impl PartialOrd for SuperMonomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Finite Laurent superpolynomial over [`Scalar`].
#[derive(Clone, PartialEq, Eq)]
pub struct SuperPolynomial {
    ctx: Arc<VarContext>,
    terms: BTreeMap<SuperMonomial, Scalar>,
}

impl SuperPolynomial {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        SuperPolynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<VarContext>, c: Scalar) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(SuperMonomial::one(ctx.n_exps()), c);
        p
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, Scalar::one())
    }

    /// `c · x^exps · θ^{odd}` where `odd` may be in any order (the reordering
    /// sign is absorbed); repeated odd indices give zero.
    pub fn monomial(ctx: &Arc<VarContext>, c: Scalar, exps: &[i32], odd: &[usize]) -> Self {
        assert_eq!(exps.len(), ctx.n_exps(), "exponent vector length");
        let mut mask = 0u64;
        let mut neg = false;
        for &j in odd {
            assert!(j < ctx.n_odd(), "odd index out of range");
            if mask >> j & 1 == 1 {
                return Self::zero(ctx);
            }
            neg ^= merge_sign(mask, 1 << j);
            mask |= 1 << j;
        }
        let c = if neg { -c } else { c };
        let mut p = Self::zero(ctx);
        p.add_term(SuperMonomial { exps: exps.to_vec(), mask }, c);
        p
    }

    pub fn var(ctx: &Arc<VarContext>, v: Var) -> Self {
        let mut exps = vec![0; ctx.n_exps()];
        match v {
            Var::Even(i) => {
                exps[i] = 1;
                Self::monomial(ctx, Scalar::one(), &exps, &[])
            }
            Var::Param(i) => {
                exps[ctx.n_even() + i] = 1;
                Self::monomial(ctx, Scalar::one(), &exps, &[])
            }
            Var::Odd(j) => Self::monomial(ctx, Scalar::one(), &exps, &[j]),
        }
    }

    pub fn even_var(ctx: &Arc<VarContext>, i: usize) -> Self {
        Self::var(ctx, Var::Even(i))
    }

    pub fn odd_var(ctx: &Arc<VarContext>, j: usize) -> Self {
        Self::var(ctx, Var::Odd(j))
    }

    pub fn from_terms(ctx: &Arc<VarContext>, terms: impl IntoIterator<Item = (SuperMonomial, Scalar)>) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<SuperMonomial, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<SuperMonomial, Scalar> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &SuperMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: SuperMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.parity().is_some()
    }

    pub fn part(&self, parity: Parity) -> Self {
        SuperPolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.parity() == parity).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn even_part(&self) -> Self {
        self.part(Parity::Even)
    }

    pub fn odd_part(&self) -> Self {
        self.part(Parity::Odd)
    }

    /// Terms without odd variables.
    pub fn reduced_part(&self) -> Self {
        SuperPolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.mask == 0).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.terms.keys().all(|m| m.mask != 0)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&SuperMonomial::one(self.ctx.n_exps()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        SuperPolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&-o)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_ctx(o)?;
        let mut out = Self::zero(&self.ctx);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if let Some((m, neg)) = a.mul(b) {
                    let c = x * y;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    fn check_ctx(&self, o: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &o.ctx) {
            Ok(())
        } else {
            Err(Error::Context(format!("{:?} vs {:?}", self.ctx, o.ctx)))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single Laurent monomial `c·x^e` (no odd part).
    pub fn monomial_inverse(&self) -> Result<Self> {
        match self.terms.iter().next() {
            Some((m, c)) if self.terms.len() == 1 && m.mask == 0 => {
                let exps: Vec<i32> = m.exps.iter().map(|e| -e).collect();
                Ok(Self::monomial(&self.ctx, c.inv()?, &exps, &[]))
            }
            _ => Err(Error::Domain(format!("{self} is not an invertible Laurent monomial"))),
        }
    }

    /// Maps every coefficient and monomial; used for context changes.
    pub fn rebase(&self, ctx: &Arc<VarContext>, f: impl Fn(&SuperMonomial) -> SuperMonomial) -> Self {
        Self::from_terms(ctx, self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    /// Derivative along an even coordinate or parameter (Laurent rule).
    pub fn partial_exp(&self, slot: usize) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.exps[slot];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.exps[slot] -= 1;
            out.add_term(m2, c * &Scalar::from_int(e as i64));
        }
        out
    }

    /// Left derivative along `θ_j`: move `θ_j` to the front, then strike it.
    pub fn partial_odd(&self, j: usize) -> Self {
        let mut out = Self::zero(&self.ctx);
        let bit = 1u64 << j;
        for (m, c) in &self.terms {
            if m.mask & bit == 0 {
                continue;
            }
            let before = (m.mask & (bit - 1)).count_ones();
            let m2 = SuperMonomial { exps: m.exps.clone(), mask: m.mask & !bit };
            out.add_term(m2, if before % 2 == 1 { -c.clone() } else { c.clone() });
        }
        out
    }

    pub fn partial_var(&self, v: Var) -> Self {
        match v {
            Var::Even(i) => self.partial_exp(i),
            Var::Param(i) => self.partial_exp(self.ctx.n_even() + i),
            Var::Odd(j) => self.partial_odd(j),
        }
    }

    pub fn partial(&self, name: &str) -> Result<Self> {
        let v = self.ctx.lookup(name).ok_or_else(|| Error::Context(format!("unknown variable {name}")))?;
        Ok(self.partial_var(v))
    }

    /// Largest absolute even exponent.
    pub fn depth(&self) -> i32 {
        self.terms.keys().flat_map(|m| m.exps.iter().map(|e| e.abs())).max().unwrap_or(0)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            let mono = render_monomial(&self.ctx, m);
            let (neg, coeff) = split_sign(c);
            let body = match (coeff.as_str(), mono.is_empty()) {
                ("1", false) => mono,
                (_, true) => coeff,
                (_, false) => format!("{coeff}*{mono}"),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

/// Sign and magnitude text of a coefficient; sums of several components are parenthesized.
fn split_sign(c: &Scalar) -> (bool, String) {
    if c.component_count() > 1 {
        let r = c.render();
        return (false, format!("({r})"));
    }
    let r = c.render();
    match r.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, r),
    }
}

pub fn render_monomial(ctx: &VarContext, m: &SuperMonomial) -> String {
    let mut parts = Vec::new();
    let names = ctx.even.iter().chain(ctx.params.iter());
    for (name, &e) in names.zip(&m.exps) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    for j in m.odd_indices() {
        parts.push(ctx.odd[j].clone());
    }
    parts.join("*")
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPolynomial({})", self.render())
    }
}

impl Add for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, o: &SuperPolynomial) -> SuperPolynomial {
        self.try_add(o).expect("operands share a context")
    }
}

impl Sub for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, o: &SuperPolynomial) -> SuperPolynomial {
        self.try_sub(o).expect("operands share a context")
    }
}

impl Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, o: &SuperPolynomial) -> SuperPolynomial {
        self.try_mul(o).expect("operands share a context")
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        self.scale(&-Scalar::one())
    }
}

impl Add for SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, o: SuperPolynomial) -> SuperPolynomial {
        &self + &o
    }
}

impl Sub for SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, o: SuperPolynomial) -> SuperPolynomial {
        &self - &o
    }
}

impl Mul for SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, o: SuperPolynomial) -> SuperPolynomial {
        &self * &o
    }
}

impl Neg for SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(ctx: &Arc<VarContext>, j: usize) -> SuperPolynomial {
        SuperPolynomial::odd_var(ctx, j)
    }

    #[test]
    fn koszul_products() {
        let c = VarContext::u_chart(3);
        assert_eq!(&t(&c, 1) * &t(&c, 0), -(&t(&c, 0) * &t(&c, 1)));
        assert!((&t(&c, 0) * &t(&c, 0)).is_zero());
        let v = VarContext::v_chart(2);
        let winv = SuperPolynomial::monomial(&v, Scalar::one(), &[-1], &[0, 1]);
        let one = SuperPolynomial::one(&v);
        assert_eq!(&(&one + &winv) * &(&one - &winv), one);
    }

    #[test]
    fn left_odd_derivative() {
        let c = VarContext::u_chart(2);
        let p = &t(&c, 0) * &t(&c, 1);
        assert_eq!(p.partial("t1").unwrap(), t(&c, 1));
        assert_eq!(p.partial("t2").unwrap(), -t(&c, 0));
        let z = SuperPolynomial::monomial(&c, Scalar::one(), &[-2], &[]);
        assert_eq!(z.partial("z").unwrap().render(), "-2*z^-3");
        assert!(matches!(p.partial("q"), Err(Error::Context(_))));
    }

    #[test]
    fn rendering() {
        let c = VarContext::u_chart(3);
        let a = SuperPolynomial::monomial(&c, Scalar::from_frac(3, 2), &[-2], &[0, 1]);
        let b = SuperPolynomial::monomial(&c, Scalar::i(), &[0], &[2]);
        assert_eq!((&a + &b).render(), "3/2*z^-2*t1*t2 + i*t3");
        let d = SuperPolynomial::monomial(&c, Scalar::from_int(-1), &[1], &[]);
        assert_eq!(d.render(), "-z");
        assert_eq!(SuperPolynomial::zero(&c).render(), "0");
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = SuperPolynomial::one(&VarContext::u_chart(1));
        let b = SuperPolynomial::one(&VarContext::v_chart(1));
        assert!(matches!(a.try_mul(&b), Err(Error::Context(_))));
    }

    pub(crate) fn arb_poly(m: usize) -> impl Strategy<Value = SuperPolynomial> {
        let ctx = VarContext::u_chart(m);
        prop::collection::vec((-2i32..3, 0u64..(1 << m), -3i64..4), 0..6).prop_map(move |ts| {
            SuperPolynomial::from_terms(
                &ctx,
                ts.into_iter().map(|(e, mask, c)| (SuperMonomial { exps: vec![e], mask }, Scalar::from_int(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn supercommutativity(a in arb_poly(4), b in arb_poly(4)) {
            for pa in [Parity::Even, Parity::Odd] {
                for pb in [Parity::Even, Parity::Odd] {
                    let (x, y) = (a.part(pa), b.part(pb));
                    let s = Scalar::from_int(Parity::koszul(pa, pb));
                    prop_assert_eq!(&x * &y, (&y * &x).scale(&s));
                }
            }
        }

        #[test]
        fn parity_split_is_idempotent(a in arb_poly(3)) {
            prop_assert_eq!(&a.even_part() + &a.odd_part(), a.clone());
            prop_assert_eq!(a.even_part().even_part(), a.even_part());
            prop_assert!(a.odd_part().even_part().is_zero());
        }

        #[test]
        fn odd_derivatives_anticommute(a in arb_poly(4), i in 0usize..4, j in 0usize..4) {
            let l = a.partial_odd(j).partial_odd(i);
            let r = a.partial_odd(i).partial_odd(j);
            prop_assert_eq!(l, -r);
        }

        #[test]
        fn associativity(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }
    }
}
