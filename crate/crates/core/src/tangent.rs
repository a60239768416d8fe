//! Tangent sheaf of `P^{n|m}`: cohomology through the super Euler sequence
//! `0 → O → O(1) ⊗ C^{n+1|m} → T → 0`, the super gradient realizing
//! `ẽ_n : Hⁿ(O) → Hⁿ(O(1) ⊗ C^{n+1|m})`, and a direct solver for global
//! vector fields by regularity across charts.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{bareiss_rank, decompose_map, Echelon, Field, SparseVec};
use crate::scalar::{Rational, Scalar};
use crate::sheaf::{decompose, DimPair};
use crate::superalgebra::{
    projective_chart_change, ChartSubstitution, Parity, SuperDerivation, SuperMonomial, SuperPolynomial, Var, VarContext,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentReport {
    pub n: usize,
    pub m: usize,
    pub h0: DimPair,
    pub h1: DimPair,
    pub rigid: bool,
    pub sl_dim: DimPair,
    pub exceptional: bool,
    /// Kernel of `ẽ_n` inside `Hⁿ(O)`.
    pub kernel_e_n: DimPair,
    /// `hⁱ(T)` for every `i`.
    pub all_degrees: BTreeMap<usize, DimPair>,
}

/// `dim sl(n+1|m) = n² + m² + 2n | 2nm + 2m`.
pub fn sl_dim(n: usize, m: usize) -> DimPair {
    let (n, m) = (n as u64, m as u64);
    DimPair::new(n * n + m * m + 2 * n, 2 * n * m + 2 * m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientRank {
    pub n: usize,
    pub m: usize,
    pub domain_dim: DimPair,
    pub codomain_dim: DimPair,
    pub rank: DimPair,
    pub kernel_dim: DimPair,
}

/// Monomials of degree `d` in `n_even` commuting and `n_odd` anticommuting variables.
fn sym_basis(n_even: usize, n_odd: usize, d: usize) -> Vec<(Vec<u32>, u64)> {
    fn compositions(k: usize, total: usize, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
        if cur.len() + 1 == k {
            cur.push(total as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=total {
            cur.push(a as u32);
            compositions(k, total - a, out, cur);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for mask in 0u64..1 << n_odd {
        let k = mask.count_ones() as usize;
        if k > d {
            continue;
        }
        let mut evens = Vec::new();
        if n_even == 0 {
            if k == d {
                evens.push(Vec::new());
            }
        } else {
            compositions(n_even, d - k, &mut evens, &mut Vec::new());
        }
        out.extend(evens.into_iter().map(|e| (e, mask)));
    }
    out
}

/// Exact rank of `∇ = (∂_{X₀}, …, ∂_{X_n}, −∂_{Θ₁}, …, −∂_{Θ_m})` on `Sym^{m−n−1}(U_{n+1|m})`.
pub fn super_gradient_rank(n: usize, m: usize) -> GradientRank {
    let ne = n + 1;
    let empty = GradientRank { n, m, domain_dim: DimPair::ZERO, codomain_dim: DimPair::ZERO, rank: DimPair::ZERO, kernel_dim: DimPair::ZERO };
    if m < n + 1 {
        return empty;
    }
    let d = m - n - 1;
    let domain = sym_basis(ne, m, d);
    let target = if d == 0 { Vec::new() } else { sym_basis(ne, m, d - 1) };
    let tindex: HashMap<(Vec<u32>, u64), usize> = target.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let rows_per_copy = target.len();
    let mut codomain_dim = DimPair::ZERO;
    for r in 0..ne + m {
        for (_, mask) in &target {
            let p = Parity::of_count(mask.count_ones() as usize + usize::from(r >= ne));
            codomain_dim.add_to(p, 1);
        }
    }
    let mut out = GradientRank { domain_dim: DimPair::ZERO, codomain_dim, ..empty };
    for parity in [Parity::Even, Parity::Odd] {
        let block: Vec<&(Vec<u32>, u64)> = domain.iter().filter(|(_, s)| Parity::of_count(s.count_ones() as usize) == parity).collect();
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(block.len());
        for (e, s) in &block {
            let mut col = vec![BigInt::zero(); (ne + m) * rows_per_copy];
            for i in 0..ne {
                if e[i] > 0 {
                    let mut e2 = e.clone();
                    e2[i] -= 1;
                    col[i * rows_per_copy + tindex[&(e2, *s)]] += BigInt::from(e[i]);
                }
            }
            for j in 0..m {
                if s >> j & 1 == 1 {
                    let before = (s & ((1u64 << j) - 1)).count_ones();
                    let sign = if before % 2 == 0 { -1 } else { 1 };
                    col[(ne + j) * rows_per_copy + tindex[&(e.clone(), s & !(1 << j))]] += BigInt::from(sign);
                }
            }
            cols.push(col);
        }
        let rank = bareiss_rank(&cols) as u64;
        out.domain_dim.add_to(parity, block.len() as u64);
        out.rank.add_to(parity, rank);
        out.kernel_dim.add_to(parity, block.len() as u64 - rank);
    }
    out
}

/// Assembles `hⁱ(T) = coker ẽ_i + ker ẽ_{i+1}`; `ẽ_0` is injective and `ker ẽ_n`
/// is the gradient kernel shifted by the parity of the Berezinian, `m mod 2`.
pub fn euler_tangent_dims(n: usize, m: usize) -> TangentReport {
    let o = decompose(n, m, 0).cohomology();
    let e = decompose(n, m, 1).tensor_super(n as u64 + 1, m as u64).cohomology();
    let grad = super_gradient_rank(n, m);
    let kernel_e_n = if m % 2 == 1 { grad.kernel_dim.swapped() } else { grad.kernel_dim };
    let kernel = |i: usize| -> DimPair {
        match i {
            0 => DimPair::ZERO,
            i if i == n => kernel_e_n,
            _ => DimPair::ZERO,
        }
    };
    let mut all = BTreeMap::new();
    for i in 0..=n {
        let rank = o[&i].checked_sub(&kernel(i)).expect("kernel inside the source");
        let coker = e[&i].checked_sub(&rank).expect("rank bounded by the target");
        let h = if i < n { coker + kernel(i + 1) } else { coker };
        all.insert(i, h);
    }
    let h0 = all[&0];
    let h1 = all.get(&1).copied().unwrap_or(DimPair::ZERO);
    let sl = sl_dim(n, m);
    TangentReport { n, m, h0, h1, rigid: h1.is_zero(), sl_dim: sl, exceptional: h0 != sl, kernel_e_n, all_degrees: all }
}

/// `h¹(T_{P^{1|m}})` total from the closed form `(m+2)[(m+2) + (m−4)2^{m−1}] − (m−2)2^{m−1} − 1`, stated for `m ≠ 2`.
pub fn curve_h1_closed_form(m: usize) -> Option<i64> {
    if m == 0 || m == 2 {
        return None;
    }
    let (mm, p) = (m as i64, 1i64 << (m - 1));
    Some((mm + 2) * ((mm + 2) + (mm - 4) * p) - (mm - 2) * p - 1)
}

/// `h¹(O_{P^{1|m}})` with parities merged, `(m−2)2^{m−1} + 1`, for `m ≥ 1`.
pub fn curve_structure_h1_total(m: usize) -> Option<i64> {
    (m >= 1).then(|| (m as i64 - 2) * (1i64 << (m - 1)) + 1)
}

#[derive(Clone, Debug)]
pub struct GlobalFieldBasis {
    pub n: usize,
    pub m: usize,
    pub degree_bound: usize,
    pub even_fields: Vec<SuperDerivation>,
    pub odd_fields: Vec<SuperDerivation>,
}

impl GlobalFieldBasis {
    pub fn dims(&self) -> DimPair {
        DimPair::new(self.even_fields.len() as u64, self.odd_fields.len() as u64)
    }

    pub fn fields(&self) -> impl Iterator<Item = &SuperDerivation> {
        self.even_fields.iter().chain(self.odd_fields.iter())
    }
}

/// Default ansatz bound `2 + m` for the `∂_z` coefficients (`1 + m` for `∂_θ`).
pub fn default_degree_bound(m: usize) -> usize {
    2 + m
}

/// Chart changes from `U_0` to every other standard chart, `U_j` reached through the swap `z_1 ↔ z_j`.
fn chart_changes(n: usize, m: usize) -> Vec<ChartSubstitution> {
    let base = projective_chart_change(n, m);
    let u = base.source().clone();
    let mut out = vec![base.clone()];
    for j in 1..n {
        let even: Vec<SuperPolynomial> = (0..n)
            .map(|a| {
                let b = if a == 0 { j } else if a == j { 0 } else { a };
                SuperPolynomial::even_var(&u, b)
            })
            .collect();
        let odd: Vec<SuperPolynomial> = (0..m).map(|t| SuperPolynomial::odd_var(&u, t)).collect();
        let swap = ChartSubstitution::from_polys(&u, &u, &even, &odd).expect("coordinate swap");
        out.push(swap.compose(&base).expect("composable charts"));
    }
    out
}

fn ansatz(u: &Arc<VarContext>, n: usize, m: usize, bound: usize, parity: Parity) -> Vec<(Var, SuperMonomial)> {
    let mut out = Vec::new();
    for v in SuperDerivation::coordinates(u) {
        let (slot_parity, b) = match v {
            Var::Even(_) => (Parity::Even, bound),
            _ => (Parity::Odd, bound.saturating_sub(1)),
        };
        for d in 0..=b {
            for (e, mask) in sym_basis(n, 0, d).into_iter().flat_map(|(e, _)| (0u64..1 << m).map(move |s| (e.clone(), s))) {
                if Parity::of_count(mask.count_ones() as usize).add(slot_parity) != parity {
                    continue;
                }
                out.push((v, SuperMonomial { exps: e.iter().map(|&x| x as i32).collect(), mask }));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then(slot_key(a.0).cmp(&slot_key(b.0))));
    out
}

fn slot_key(v: Var) -> (u8, usize) {
    match v {
        Var::Even(i) => (0, i),
        Var::Odd(j) => (1, j),
        Var::Param(k) => (2, k),
    }
}

fn solve_parity(n: usize, m: usize, bound: usize, parity: Parity) -> Result<Vec<SuperDerivation>> {
    let charts = chart_changes(n, m);
    let u = charts[0].source().clone();
    let basis = ansatz(&u, n, m, bound, parity);
    let mut rows: HashMap<(usize, (u8, usize), SuperMonomial), usize> = HashMap::new();
    let mut columns: Vec<SparseVec<Rational>> = Vec::with_capacity(basis.len());
    for (v, mono) in &basis {
        let f = SuperPolynomial::from_terms(&u, [(mono.clone(), Scalar::one())]);
        let field = SuperDerivation::basic(f, *v)?;
        let mut col = SparseVec::new();
        for (ci, chart) in charts.iter().enumerate() {
            let pushed = chart.pushforward(&field)?;
            for (slot, coeff) in pushed.slots() {
                for (k, c) in coeff.terms() {
                    if k.exps.iter().all(|&e| e >= 0) {
                        continue;
                    }
                    let next = rows.len();
                    let r = *rows.entry((ci, slot_key(slot), k.clone())).or_insert(next);
                    let c = Rational::from_scalar(c).ok_or_else(|| Error::Domain("chart change left Q".into()))?;
                    col.insert(r, c);
                }
            }
        }
        columns.push(col);
    }
    let kernel = decompose_map(&columns).kernel;
    let mut ech: Echelon<Rational> = Echelon::new();
    for k in &kernel {
        ech.insert(k);
    }
    ech.rref_rows()
        .into_iter()
        .map(|row| {
            let mut even = vec![SuperPolynomial::zero(&u); n];
            let mut odd = vec![SuperPolynomial::zero(&u); m];
            for (idx, c) in row {
                let (v, mono) = &basis[idx];
                let slot = match v {
                    Var::Even(i) => &mut even[*i],
                    Var::Odd(j) => &mut odd[*j],
                    Var::Param(_) => unreachable!(),
                };
                slot.add_term(mono.clone(), c.to_scalar());
            }
            SuperDerivation::new(&u, even, odd, parity)
        })
        .collect()
}

fn solve_at(n: usize, m: usize, bound: usize) -> Result<GlobalFieldBasis> {
    let mut parts: Vec<Result<Vec<SuperDerivation>>> =
        [Parity::Even, Parity::Odd].par_iter().map(|&p| solve_parity(n, m, bound, p)).collect();
    let odd_fields = parts.pop().unwrap()?;
    let even_fields = parts.pop().unwrap()?;
    Ok(GlobalFieldBasis { n, m, degree_bound: bound, even_fields, odd_fields })
}

/// Global vector fields on `P^{n|m}`, as `U_0`-chart representatives regular on every chart.
pub fn global_tangent_fields_n(n: usize, m: usize, degree_bound: usize) -> Result<GlobalFieldBasis> {
    if n == 0 || degree_bound < 2 {
        return Err(Error::Domain(format!("need n ≥ 1 and degree bound ≥ 2, got n = {n}, bound = {degree_bound}")));
    }
    let at = solve_at(n, m, degree_bound)?;
    let next = solve_at(n, m, degree_bound + 1)?;
    if next.dims() != at.dims() {
        return Err(Error::Instability { what: format!("global fields on P^{{{n}|{m}}}"), suggested: degree_bound + 2 });
    }
    Ok(at)
}

/// Global vector fields on `P^{1|m}`.
pub fn global_tangent_fields(m: usize, degree_bound: usize) -> Result<GlobalFieldBasis> {
    if m > 4 {
        return Err(Error::Domain(format!("the field solver runs for m ≤ 4, got {m}")));
    }
    global_tangent_fields_n(1, m, degree_bound)
}

/// Whether some global field has a `θ_iθ_j ∂_{z_k}` term with no `z` dependence.
pub fn bosonization_check(n: usize, m: usize) -> Result<bool> {
    let b = global_tangent_fields_n(n, m, default_degree_bound(m))?;
    Ok(b.even_fields.iter().any(|f| {
        (0..n).any(|k| f.coeff(Var::Even(k)).terms().keys().any(|mono| mono.odd_degree() == 2 && mono.exps.iter().all(|&e| e == 0)))
    }))
}

/// Dimension of the span of `fields`, by exact elimination over the coefficient monomials.
pub fn span_dim(fields: &[SuperDerivation]) -> usize {
    let mut index: HashMap<((u8, usize), SuperMonomial), usize> = HashMap::new();
    let mut ech: Echelon<Scalar> = Echelon::new();
    for f in fields {
        let mut v = SparseVec::new();
        for (slot, coeff) in f.slots() {
            for (k, c) in coeff.terms() {
                let next = index.len();
                let i = *index.entry((slot_key(slot), k.clone())).or_insert(next);
                v.insert(i, c.clone());
            }
        }
        ech.insert(&v);
    }
    ech.rank()
}

pub fn same_span(a: &[SuperDerivation], b: &[SuperDerivation]) -> bool {
    let both: Vec<SuperDerivation> = a.iter().chain(b.iter()).cloned().collect();
    let r = span_dim(&both);
    span_dim(a) == r && span_dim(b) == r
}

/// The listed basis `V₁..V₈ | Ξ₁..Ξ₈` of global fields on `P^{1|2}`, in the `(z | θ₁, θ₂)` chart.
pub fn p12_listed_fields() -> (Vec<SuperDerivation>, Vec<SuperDerivation>) {
    p12_listed_fields_in(&VarContext::u_chart(2))
}

/// Same list over a `1|2` chart context that may carry parameters.
pub fn p12_listed_fields_in(u: &Arc<VarContext>) -> (Vec<SuperDerivation>, Vec<SuperDerivation>) {
    assert!(u.n_even() == 1 && u.n_odd() == 2, "P^{{1|2}} chart expected");
    let np = u.params.len();
    let mono = |c: i64, e: i32, odd: &[usize]| {
        let mut exps = vec![0; 1 + np];
        exps[0] = e;
        SuperPolynomial::monomial(u, Scalar::from_int(c), &exps, odd)
    };
    let field = |parts: &[(SuperPolynomial, Var)]| -> SuperDerivation {
        let mut even = vec![SuperPolynomial::zero(u)];
        let mut odd = vec![SuperPolynomial::zero(u); 2];
        for (f, v) in parts {
            match v {
                Var::Even(_) => even[0] = &even[0] + f,
                Var::Odd(j) => odd[*j] = &odd[*j] + f,
                Var::Param(_) => unreachable!(),
            }
        }
        SuperDerivation::from_coeffs(u, even, odd).expect("homogeneous listed field")
    };
    let (z, t1, t2) = (Var::Even(0), Var::Odd(0), Var::Odd(1));
    let v = vec![
        field(&[(mono(1, 0, &[]), z)]),
        field(&[(mono(1, 1, &[]), z)]),
        field(&[(mono(1, 2, &[]), z), (mono(1, 1, &[0]), t1), (mono(1, 1, &[1]), t2)]),
        field(&[(mono(1, 0, &[0, 1]), z)]),
        field(&[(mono(1, 0, &[0]), t1)]),
        field(&[(mono(1, 0, &[1]), t1)]),
        field(&[(mono(1, 0, &[0]), t2)]),
        field(&[(mono(1, 0, &[1]), t2)]),
    ];
    let xi = vec![
        field(&[(mono(1, 0, &[0]), z)]),
        field(&[(mono(1, 1, &[0]), z), (mono(1, 0, &[0, 1]), t2)]),
        field(&[(mono(1, 0, &[1]), z)]),
        field(&[(mono(1, 1, &[1]), z), (mono(-1, 0, &[0, 1]), t1)]),
        field(&[(mono(1, 0, &[]), t1)]),
        field(&[(mono(1, 1, &[]), t1)]),
        field(&[(mono(1, 0, &[]), t2)]),
        field(&[(mono(1, 1, &[]), t2)]),
    ];
    (v, xi)
}

/// Whether a `U_0`-chart field stays pole-free on every chart of `P^{n|m}`.
pub fn is_global(f: &SuperDerivation, n: usize, m: usize) -> Result<bool> {
    for chart in chart_changes(n, m) {
        let pushed = chart.pushforward(f)?;
        if pushed.slots().any(|(_, c)| c.terms().keys().any(|k| k.exps.iter().any(|&e| e < 0))) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_sequence_values() {
        let r = euler_tangent_dims(3, 4);
        assert_eq!((r.h0, r.h1, r.rigid), (DimPair::new(31, 32), DimPair::ZERO, true));
        assert_eq!(euler_tangent_dims(1, 4).h1, DimPair::new(11, 8));
        assert_eq!(euler_tangent_dims(2, 3).h1, DimPair::new(0, 1));
        let r = euler_tangent_dims(1, 2);
        assert_eq!((r.h0, r.h1, r.exceptional), (DimPair::new(8, 8), DimPair::ZERO, true));
        for n in 1..=3 {
            for m in 0..=4 {
                let r = euler_tangent_dims(n, m);
                assert_eq!(r.exceptional, (n, m) == (1, 2), "({n},{m})");
                if (n, m) != (1, 2) {
                    assert_eq!(r.h0, sl_dim(n, m));
                }
            }
        }
        for m in [1, 3] {
            assert!(euler_tangent_dims(1, m).rigid);
        }
    }

    #[test]
    fn curve_closed_forms() {
        for m in 1..=7 {
            let o = decompose(1, m, 0).cohomology();
            assert_eq!(Some(o[&1].total() as i64), curve_structure_h1_total(m));
            if let Some(t) = curve_h1_closed_form(m) {
                assert_eq!(euler_tangent_dims(1, m).h1.total() as i64, t, "m = {m}");
            }
        }
        assert_eq!(curve_h1_closed_form(4), Some(19));
    }

    #[test]
    fn gradient() {
        let g = super_gradient_rank(1, 2);
        assert_eq!((g.domain_dim, g.kernel_dim), (DimPair::new(1, 0), DimPair::new(1, 0)));
        assert_eq!(super_gradient_rank(1, 3).kernel_dim, DimPair::ZERO);
        let g = super_gradient_rank(1, 4);
        // Sym² of U_{2|4}: 3 + 6 even, 2·4 odd.
        assert_eq!(g.domain_dim, DimPair::new(9, 8));
        assert_eq!(g.kernel_dim, DimPair::ZERO);
        assert_eq!(super_gradient_rank(2, 1).domain_dim, DimPair::ZERO);
    }

    #[test]
    fn p12_fields() {
        let b = global_tangent_fields(2, default_degree_bound(2)).unwrap();
        assert_eq!(b.dims(), DimPair::new(8, 8));
        let (v, xi) = p12_listed_fields();
        assert!(same_span(&b.even_fields, &v));
        assert!(same_span(&b.odd_fields, &xi));
        for f in v.iter().chain(xi.iter()) {
            assert!(is_global(f, 1, 2).unwrap(), "{}", f.render());
        }
    }

    #[test]
    fn small_m_fields() {
        let b = global_tangent_fields(0, 2).unwrap();
        assert_eq!(b.dims(), DimPair::new(3, 0));
        assert_eq!(b.even_fields.iter().map(|f| f.render()).collect::<Vec<_>>(), vec!["dz", "z*dz", "z^2*dz"]);
        assert_eq!(global_tangent_fields(1, 3).unwrap().dims(), DimPair::new(4, 4));
        assert_eq!(global_tangent_fields(3, 5).unwrap().dims(), euler_tangent_dims(1, 3).h0);
    }

    #[test]
    fn bosonization() {
        assert!(bosonization_check(1, 2).unwrap());
        assert!(!bosonization_check(1, 3).unwrap());
        assert!(!bosonization_check(2, 2).unwrap());
    }

    #[test]
    fn p22_fields_match_sl() {
        assert_eq!(global_tangent_fields_n(2, 2, 4).unwrap().dims(), euler_tangent_dims(2, 2).h0);
    }
}
