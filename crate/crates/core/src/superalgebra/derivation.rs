use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Parity, SuperPolynomial, Var, VarContext};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Homogeneous vector field `Σ a_i ∂_{z_i} + Σ b_j ∂_{θ_j}` with coefficients on the left.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperDerivation {
    ctx: Arc<VarContext>,
    even: Vec<SuperPolynomial>,
    odd: Vec<SuperPolynomial>,
    parity: Parity,
}

impl SuperDerivation {
    pub fn new(ctx: &Arc<VarContext>, even: Vec<SuperPolynomial>, odd: Vec<SuperPolynomial>, parity: Parity) -> Result<Self> {
        if even.len() != ctx.n_even() || odd.len() != ctx.n_odd() {
            return Err(Error::Context("coefficient count does not match the chart".into()));
        }
        for (k, c) in even.iter().enumerate() {
            if !super::same_ctx(c.ctx(), ctx) {
                return Err(Error::Context("coefficient over a different chart".into()));
            }
            if !c.is_zero() && c.parity() != Some(parity) {
                return Err(Error::Parity(format!("coefficient of d{} is not {:?}", ctx.even[k], parity)));
            }
        }
        for (k, c) in odd.iter().enumerate() {
            if !super::same_ctx(c.ctx(), ctx) {
                return Err(Error::Context("coefficient over a different chart".into()));
            }
            if !c.is_zero() && c.parity() != Some(parity.flip()) {
                return Err(Error::Parity(format!("coefficient of d{} has the wrong parity", ctx.odd[k])));
            }
        }
        Ok(SuperDerivation { ctx: ctx.clone(), even, odd, parity })
    }

    /// Builds a field from coefficients, inferring parity from the first nonzero one.
    pub fn from_coeffs(ctx: &Arc<VarContext>, even: Vec<SuperPolynomial>, odd: Vec<SuperPolynomial>) -> Result<Self> {
        let inferred = even
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.parity())
            .or_else(|| odd.iter().find(|c| !c.is_zero()).map(|c| c.parity().map(Parity::flip)));
        let parity = match inferred {
            None => Parity::Even,
            Some(Some(p)) => p,
            Some(None) => return Err(Error::Parity("inhomogeneous coefficient".into())),
        };
        Self::new(ctx, even, odd, parity)
    }

    pub fn zero(ctx: &Arc<VarContext>, parity: Parity) -> Self {
        SuperDerivation {
            ctx: ctx.clone(),
            even: vec![SuperPolynomial::zero(ctx); ctx.n_even()],
            odd: vec![SuperPolynomial::zero(ctx); ctx.n_odd()],
            parity,
        }
    }

    /// `f ∂_v` for a coordinate `v`.
    pub fn basic(f: SuperPolynomial, v: Var) -> Result<Self> {
        let ctx = f.ctx().clone();
        let mut even = vec![SuperPolynomial::zero(&ctx); ctx.n_even()];
        let mut odd = vec![SuperPolynomial::zero(&ctx); ctx.n_odd()];
        match v {
            Var::Even(i) => even[i] = f,
            Var::Odd(j) => odd[j] = f,
            Var::Param(_) => return Err(Error::Context("parameters carry no derivation".into())),
        }
        Self::from_coeffs(&ctx, even, odd)
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn even_coeffs(&self) -> &[SuperPolynomial] {
        &self.even
    }

    pub fn odd_coeffs(&self) -> &[SuperPolynomial] {
        &self.odd
    }

    pub fn coeff(&self, v: Var) -> &SuperPolynomial {
        match v {
            Var::Even(i) => &self.even[i],
            Var::Odd(j) => &self.odd[j],
            Var::Param(_) => panic!("parameters carry no derivation"),
        }
    }

    /// Coefficients in slot order: even coordinates first, then odd.
    pub fn slots(&self) -> impl Iterator<Item = (Var, &SuperPolynomial)> {
        let e = self.even.iter().enumerate().map(|(i, c)| (Var::Even(i), c));
        let o = self.odd.iter().enumerate().map(|(j, c)| (Var::Odd(j), c));
        e.chain(o)
    }

    pub fn coordinates(ctx: &VarContext) -> Vec<Var> {
        (0..ctx.n_even()).map(Var::Even).chain((0..ctx.n_odd()).map(Var::Odd)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.even.iter().chain(&self.odd).all(|c| c.is_zero())
    }

    pub fn apply(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(&self.ctx);
        for (v, c) in self.slots() {
            if c.is_zero() {
                continue;
            }
            let d = f.partial_var(v);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        out
    }

    fn zip(&self, o: &Self, f: impl Fn(&SuperPolynomial, &SuperPolynomial) -> SuperPolynomial) -> Result<Self> {
        if !super::same_ctx(&self.ctx, &o.ctx) {
            return Err(Error::Context("derivations over different charts".into()));
        }
        let parity = if self.is_zero() { o.parity } else { self.parity };
        if !self.is_zero() && !o.is_zero() && self.parity != o.parity {
            return Err(Error::Parity("sum of derivations of different parity".into()));
        }
        let even = self.even.iter().zip(&o.even).map(|(a, b)| f(a, b)).collect();
        let odd = self.odd.iter().zip(&o.odd).map(|(a, b)| f(a, b)).collect();
        Ok(SuperDerivation { ctx: self.ctx.clone(), even, odd, parity })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a + b)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        SuperDerivation {
            ctx: self.ctx.clone(),
            even: self.even.iter().map(|p| p.scale(c)).collect(),
            odd: self.odd.iter().map(|p| p.scale(c)).collect(),
            parity: self.parity,
        }
    }

    /// `f · D` for homogeneous `f`.
    pub fn left_mul(&self, f: &SuperPolynomial) -> Result<Self> {
        let pf = f.parity().ok_or_else(|| Error::Parity("inhomogeneous multiplier".into()))?;
        Ok(SuperDerivation {
            ctx: self.ctx.clone(),
            even: self.even.iter().map(|p| f * p).collect(),
            odd: self.odd.iter().map(|p| f * p).collect(),
            parity: self.parity.add(pf),
        })
    }

    /// Linear combination of same-parity fields.
    pub fn combination(ctx: &Arc<VarContext>, parity: Parity, terms: &[(Scalar, &SuperDerivation)]) -> Result<Self> {
        let mut acc = Self::zero(ctx, parity);
        for (c, d) in terms {
            if !c.is_zero() {
                acc = acc.try_add(&d.scale(c))?;
            }
        }
        acc.parity = parity;
        Ok(acc)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (v, c) in self.slots() {
            if c.is_zero() {
                continue;
            }
            let name = match v {
                Var::Even(i) => &self.ctx.even[i],
                Var::Odd(j) => &self.ctx.odd[j],
                Var::Param(_) => unreachable!(),
            };
            let coeff = c.render();
            let term = if coeff == "1" {
                format!("d{name}")
            } else if coeff == "-1" {
                format!("-d{name}")
            } else if c.len() == 1 {
                format!("{coeff}*d{name}")
            } else {
                format!("({coeff})*d{name}")
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

impl fmt::Display for SuperDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for SuperDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperDerivation[{:?}]({})", self.parity, self.render())
    }
}

/// `[X, Y] = X∘Y − (−1)^{|X||Y|} Y∘X`.
///
/// The first-order coefficients are read off coordinate functions; the
/// composed operators are then applied to all quadratic coordinate monomials
/// and must agree with the result, i.e. the second-order parts cancel.
pub fn supercommutator(x: &SuperDerivation, y: &SuperDerivation) -> Result<SuperDerivation> {
    if !super::same_ctx(&x.ctx, &y.ctx) {
        return Err(Error::Context("derivations over different charts".into()));
    }
    let ctx = x.ctx.clone();
    let sign = Scalar::from_int(Parity::koszul(x.parity, y.parity));
    let compose = |f: &SuperPolynomial| -> SuperPolynomial { &x.apply(&y.apply(f)) - &y.apply(&x.apply(f)).scale(&sign) };
    let coords = SuperDerivation::coordinates(&ctx);
    let mut even = Vec::with_capacity(ctx.n_even());
    let mut odd = Vec::with_capacity(ctx.n_odd());
    for &v in &coords {
        let c = &x.apply(y.coeff(v)) - &y.apply(x.coeff(v)).scale(&sign);
        match v {
            Var::Even(_) => even.push(c),
            _ => odd.push(c),
        }
    }
    let out = SuperDerivation::new(&ctx, even, odd, x.parity.add(y.parity))?;
    for (a, &va) in coords.iter().enumerate() {
        for &vb in &coords[a..] {
            if va == vb && matches!(va, Var::Odd(_)) {
                continue;
            }
            let f = &SuperPolynomial::var(&ctx, va) * &SuperPolynomial::var(&ctx, vb);
            let lhs = compose(&f);
            let rhs = out.apply(&f);
            if lhs != rhs {
                return Err(Error::Consistency(format!(
                    "second-order part of [{x}, {y}] does not cancel on {f}: {}",
                    (&lhs - &rhs).render()
                )));
            }
        }
    }
    Ok(out)
}

impl SuperDerivation {
    /// Sum of `f_k ∂_k` with the given coordinate-slot coefficients; each must be homogeneous.
    pub fn one_form_like(ctx: &Arc<VarContext>, coeffs: Vec<(Var, SuperPolynomial)>) -> Result<Self> {
        let mut even = vec![SuperPolynomial::zero(ctx); ctx.n_even()];
        let mut odd = vec![SuperPolynomial::zero(ctx); ctx.n_odd()];
        for (v, c) in coeffs {
            match v {
                Var::Even(i) => even[i] = &even[i] + &c,
                Var::Odd(j) => odd[j] = &odd[j] + &c,
                Var::Param(_) => return Err(Error::Context("parameters carry no derivation".into())),
            }
        }
        Self::from_coeffs(ctx, even, odd)
    }

    pub fn d(ctx: &Arc<VarContext>, v: Var) -> Self {
        Self::basic(SuperPolynomial::constant(ctx, Scalar::one()), v).expect("coordinate field")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::SuperPolynomial as P;

    fn ctx2() -> Arc<VarContext> {
        VarContext::u_chart(2)
    }

    #[test]
    fn susy_pair_anticommutes_to_translation() {
        let c = ctx2();
        let d01 = SuperDerivation::d(&c, Var::Odd(0)).try_add(&SuperDerivation::basic(P::odd_var(&c, 1), Var::Even(0)).unwrap()).unwrap();
        let d02 = SuperDerivation::d(&c, Var::Odd(1)).try_add(&SuperDerivation::basic(P::odd_var(&c, 0), Var::Even(0)).unwrap()).unwrap();
        let b = supercommutator(&d01, &d02).unwrap();
        assert_eq!(b, SuperDerivation::d(&c, Var::Even(0)).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn classical_and_nilpotent_brackets() {
        let c = ctx2();
        let z = P::even_var(&c, 0);
        let zdz = SuperDerivation::basic(z, Var::Even(0)).unwrap();
        let dz = SuperDerivation::d(&c, Var::Even(0));
        assert_eq!(supercommutator(&zdz, &dz).unwrap(), dz.scale(&Scalar::from_int(-1)));
        let t1dz = SuperDerivation::basic(P::odd_var(&c, 0), Var::Even(0)).unwrap();
        assert!(supercommutator(&t1dz, &t1dz).unwrap().is_zero());
    }

    #[test]
    fn parity_checked_on_construction() {
        let c = ctx2();
        let bad = SuperDerivation::new(&c, vec![P::odd_var(&c, 0)], vec![P::zero(&c), P::zero(&c)], Parity::Even);
        assert!(matches!(bad, Err(Error::Parity(_))));
        let mixed = &P::one(&c) + &P::odd_var(&c, 0);
        assert!(SuperDerivation::basic(mixed, Var::Even(0)).is_err());
    }

    #[test]
    fn render_fields() {
        let c = ctx2();
        let f = SuperDerivation::basic(&P::even_var(&c, 0) * &P::odd_var(&c, 0), Var::Odd(0)).unwrap();
        assert_eq!(f.render(), "z*t1*dt1");
    }
}
