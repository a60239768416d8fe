use std::sync::Arc;

use num_traits::{One, Zero};

use super::{merge_sign, same_ctx, SuperDerivation, SuperMonomial, SuperPolynomial, Var, VarContext};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Invertible monomial change of coordinates `x_a = c_a·y^{E_a}`, `θ_j = d_j·ψ_{π(j)}·y^{N_j}`.
///
/// Parameters (formal even indeterminates) are carried over unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSubstitution {
    source: Arc<VarContext>,
    target: Arc<VarContext>,
    even_rules: Vec<(Scalar, Vec<i32>)>,
    odd_rules: Vec<(Scalar, usize, Vec<i32>)>,
}

fn scalar_pow(c: &Scalar, e: i32) -> Result<Scalar> {
    if e >= 0 {
        Ok(c.pow(e as u32))
    } else {
        Ok(c.inv()?.pow(e.unsigned_abs()))
    }
}

impl ChartSubstitution {
    /// Reads the rules off single-term target polynomials, one per source coordinate.
    pub fn from_polys(source: &Arc<VarContext>, target: &Arc<VarContext>, even: &[SuperPolynomial], odd: &[SuperPolynomial]) -> Result<Self> {
        if source.params != target.params {
            return Err(Error::Context("charts must share their parameters".into()));
        }
        if even.len() != source.n_even() || odd.len() != source.n_odd() {
            return Err(Error::Context("one rule per source coordinate".into()));
        }
        if source.n_even() != target.n_even() || source.n_odd() != target.n_odd() {
            return Err(Error::Domain("a monomial substitution needs equal dimensions".into()));
        }
        let ne = target.n_even();
        let single = |p: &SuperPolynomial| -> Result<(SuperMonomial, Scalar)> {
            if !same_ctx(p.ctx(), target) || p.len() != 1 {
                return Err(Error::Domain(format!("rule {p} is not a single target monomial")));
            }
            let (m, c) = p.terms().iter().next().unwrap();
            if m.exps[ne..].iter().any(|&e| e != 0) {
                return Err(Error::Domain("rules may not involve parameters".into()));
            }
            Ok((m.clone(), c.clone()))
        };
        let mut even_rules = Vec::new();
        for p in even {
            let (m, c) = single(p)?;
            if m.mask != 0 {
                return Err(Error::Parity(format!("even coordinate mapped to {p}")));
            }
            even_rules.push((c, m.exps[..ne].to_vec()));
        }
        let mut odd_rules = Vec::new();
        let mut seen = 0u64;
        for p in odd {
            let (m, c) = single(p)?;
            if m.odd_degree() != 1 {
                return Err(Error::Parity(format!("odd coordinate mapped to {p}")));
            }
            let t = m.mask.trailing_zeros() as usize;
            if seen >> t & 1 == 1 {
                return Err(Error::Domain("odd rules are not a permutation".into()));
            }
            seen |= 1 << t;
            odd_rules.push((c, t, m.exps[..ne].to_vec()));
        }
        let s = ChartSubstitution { source: source.clone(), target: target.clone(), even_rules, odd_rules };
        s.even_matrix_inverse()?;
        Ok(s)
    }

    pub fn source(&self) -> &Arc<VarContext> {
        &self.source
    }

    pub fn target(&self) -> &Arc<VarContext> {
        &self.target
    }

    pub fn rule_poly(&self, v: Var) -> SuperPolynomial {
        let np = self.target.params.len();
        let pad = |e: &[i32]| -> Vec<i32> { e.iter().copied().chain(std::iter::repeat_n(0, np)).collect() };
        match v {
            Var::Even(a) => {
                let (c, e) = &self.even_rules[a];
                SuperPolynomial::monomial(&self.target, c.clone(), &pad(e), &[])
            }
            Var::Odd(j) => {
                let (c, t, e) = &self.odd_rules[j];
                SuperPolynomial::monomial(&self.target, c.clone(), &pad(e), &[*t])
            }
            Var::Param(i) => SuperPolynomial::var(&self.target, Var::Param(i)),
        }
    }

    fn even_matrix_inverse(&self) -> Result<Vec<Vec<i32>>> {
        let n = self.even_rules.len();
        let mut a: Vec<Vec<Rational>> = self
            .even_rules
            .iter()
            .enumerate()
            .map(|(r, (_, e))| {
                let mut row: Vec<Rational> = e.iter().map(|&x| Rational::from_integer(x.into())).collect();
                row.extend((0..n).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or_else(|| Error::Domain("singular exponent matrix".into()))?;
            a.swap(c, p);
            let inv = a[c][c].recip();
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    let pivot = a[c].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot) {
                        *x -= &f * y;
                    }
                }
            }
        }
        let mut inv = vec![vec![0i32; n]; n];
        for r in 0..n {
            for c in 0..n {
                let x = &a[r][n + c];
                if !x.is_integer() {
                    return Err(Error::Domain("exponent matrix is not unimodular".into()));
                }
                inv[r][c] = i32::try_from(x.to_integer()).map_err(|_| Error::Domain("exponent overflow".into()))?;
            }
        }
        Ok(inv)
    }

    /// Ring homomorphism on a polynomial in the source chart.
    pub fn apply(&self, p: &SuperPolynomial) -> Result<SuperPolynomial> {
        if !same_ctx(p.ctx(), &self.source) {
            return Err(Error::Context("polynomial is not over the source chart".into()));
        }
        let ne = self.target.n_even();
        let mut out = SuperPolynomial::zero(&self.target);
        for (m, c) in p.terms() {
            let mut coeff = c.clone();
            let mut exps = vec![0i32; self.target.n_exps()];
            exps[ne..].copy_from_slice(&m.exps[ne..]);
            for (a, (ca, ea)) in self.even_rules.iter().enumerate() {
                let k = m.exps[a];
                if k == 0 {
                    continue;
                }
                coeff = &coeff * &scalar_pow(ca, k)?;
                for (x, y) in exps.iter_mut().zip(ea) {
                    *x += k * y;
                }
            }
            let mut mask = 0u64;
            let mut neg = false;
            for j in m.odd_indices() {
                let (d, t, n) = &self.odd_rules[j];
                coeff = &coeff * d;
                neg ^= merge_sign(mask, 1 << t);
                mask |= 1 << t;
                for (x, y) in exps.iter_mut().zip(n) {
                    *x += y;
                }
            }
            out.add_term(SuperMonomial { exps, mask }, if neg { -coeff } else { coeff });
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<ChartSubstitution> {
        let minv = self.even_matrix_inverse()?;
        let n = self.even_rules.len();
        let np = self.source.params.len();
        let src = &self.source;
        // x^v expressed through y: y^v = Π_a (x_a / c_a)^{(v·M⁻¹)_a}.
        let y_power = |v: &[i32]| -> Result<SuperPolynomial> {
            let mut exps = vec![0i32; n + np];
            let mut coeff = Scalar::one();
            for a in 0..n {
                let k: i32 = (0..n).map(|b| v[b] * minv[b][a]).sum();
                exps[a] = k;
                coeff = &coeff * &scalar_pow(&self.even_rules[a].0, -k)?;
            }
            Ok(SuperPolynomial::monomial(src, coeff, &exps, &[]))
        };
        let mut even = Vec::with_capacity(n);
        for b in 0..n {
            let unit: Vec<i32> = (0..n).map(|k| if k == b { 1 } else { 0 }).collect();
            even.push(y_power(&unit)?);
        }
        let mut odd = vec![SuperPolynomial::zero(src); self.odd_rules.len()];
        for (j, (d, t, nj)) in self.odd_rules.iter().enumerate() {
            let neg: Vec<i32> = nj.iter().map(|x| -x).collect();
            let theta = SuperPolynomial::odd_var(src, j);
            odd[*t] = (&y_power(&neg)? * &theta).scale(&d.inv()?);
        }
        ChartSubstitution::from_polys(&self.target, &self.source, &even, &odd)
    }

    /// First `self`, then `next`.
    pub fn compose(&self, next: &ChartSubstitution) -> Result<ChartSubstitution> {
        let map = |v: Var| next.apply(&self.rule_poly(v));
        let even = (0..self.source.n_even()).map(|a| map(Var::Even(a))).collect::<Result<Vec<_>>>()?;
        let odd = (0..self.source.n_odd()).map(|j| map(Var::Odd(j))).collect::<Result<Vec<_>>>()?;
        ChartSubstitution::from_polys(&self.source, &next.target, &even, &odd)
    }

    /// Chain rule: `D = Σ_b D(y_b) ∂_{y_b}` with `D(y_b)` computed in the source
    /// coordinates and then rewritten in the target ones.
    pub fn pushforward(&self, d: &SuperDerivation) -> Result<SuperDerivation> {
        if !same_ctx(d.ctx(), &self.source) {
            return Err(Error::Context("field is not over the source chart".into()));
        }
        let inv = self.inverse()?;
        let t = &self.target;
        let mut even = Vec::with_capacity(t.n_even());
        let mut odd = Vec::with_capacity(t.n_odd());
        for v in SuperDerivation::coordinates(t) {
            let yb = inv.rule_poly(v);
            let c = self.apply(&d.apply(&yb))?;
            match v {
                Var::Even(_) => even.push(c),
                _ => odd.push(c),
            }
        }
        SuperDerivation::new(t, even, odd, d.parity())
    }
}

/// Transition from the chart `U_0` to `U_1` of `P^{n|m}`:
/// `z_1 = 1/w_1`, `z_i = w_i/w_1` for `i ≥ 2`, `θ_j = ψ_j/w_1`.
pub fn projective_chart_change(n: usize, m: usize) -> ChartSubstitution {
    projective_chart_change_with(&VarContext::projective_chart(n, m, 0), &VarContext::projective_chart(n, m, 1))
}

/// Same as [`projective_chart_change`] over caller-supplied contexts (e.g. with parameters).
pub fn projective_chart_change_with(u: &Arc<VarContext>, v: &Arc<VarContext>) -> ChartSubstitution {
    let n = u.n_even();
    let np = u.params.len();
    let exps = |first: i32, other: Option<usize>| -> Vec<i32> {
        let mut e = vec![0; n + np];
        e[0] = first;
        if let Some(i) = other {
            e[i] = 1;
        }
        e
    };
    let even: Vec<SuperPolynomial> = (0..n)
        .map(|i| SuperPolynomial::monomial(v, Scalar::one(), &exps(-1, (i > 0).then_some(i)), &[]))
        .collect();
    let odd: Vec<SuperPolynomial> = (0..u.n_odd())
        .map(|j| SuperPolynomial::monomial(v, Scalar::one(), &exps(-1, None), &[j]))
        .collect();
    ChartSubstitution::from_polys(u, v, &even, &odd).expect("standard chart change is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::SuperPolynomial as P;

    #[test]
    fn p1m_rules() {
        let s = projective_chart_change(1, 2);
        let u = s.source().clone();
        assert_eq!(s.apply(&P::even_var(&u, 0)).unwrap().render(), "w^-1");
        let tt = &P::odd_var(&u, 0) * &P::odd_var(&u, 1);
        assert_eq!(s.apply(&tt).unwrap().render(), "w^-2*p1*p2");
        assert_eq!(s.apply(&(&P::even_var(&u, 0) * &tt)).unwrap().render(), "w^-3*p1*p2");
    }

    #[test]
    fn pushforward_of_coordinate_fields() {
        let s = projective_chart_change(1, 2);
        let u = s.source().clone();
        let dz = s.pushforward(&SuperDerivation::d(&u, Var::Even(0))).unwrap();
        assert_eq!(dz.render(), "-w^2*dw - w*p1*dp1 - w*p2*dp2");
        let dt = s.pushforward(&SuperDerivation::d(&u, Var::Odd(0))).unwrap();
        assert_eq!(dt.render(), "w*dp1");
        let zdz = SuperDerivation::basic(P::even_var(&u, 0), Var::Even(0)).unwrap();
        assert_eq!(s.pushforward(&zdz).unwrap().render(), "-w*dw - p1*dp1 - p2*dp2");
    }

    #[test]
    fn round_trips() {
        for n in 1..=3 {
            let s = projective_chart_change(n, 2);
            let inv = s.inverse().unwrap();
            let u = s.source().clone();
            let mut e = vec![0; n];
            e[0] = 2;
            let p = &P::monomial(&u, Scalar::from_int(3), &e, &[0]) + &P::monomial(&u, Scalar::i(), &vec![-1; n], &[1, 0]);
            assert_eq!(inv.apply(&s.apply(&p).unwrap()).unwrap(), p);
            let id = s.compose(&inv).unwrap();
            assert_eq!(id.apply(&p).unwrap(), p);
            let f = SuperDerivation::basic(&P::even_var(&u, 0) * &P::odd_var(&u, 0), Var::Odd(1)).unwrap();
            assert_eq!(inv.pushforward(&s.pushforward(&f).unwrap()).unwrap(), f);
        }
    }
}
