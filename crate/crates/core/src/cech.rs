//! Čech cohomology of rank `1|0` sheaves on `P^{1|m}` over the cover `{U, V}`.
//!
//! A sheaf is given by its transition function `W` on `U ∩ V`, with frames
//! related by `e_U = W·e_V`. A section is a pair `(P, Q)` with `Q = W·φ(P)`,
//! where `φ` rewrites `P(z, θ)` in the coordinates `(w, ψ)`. Since every
//! cochain with only nonnegative powers of `w` is a coboundary from the `V`
//! side, both groups are read off the map `A(P) = negative part of W·φ(P)`:
//! `H⁰ = ker A` and `H¹ = span{w^{-b}ψ^S : b ≥ 1} / im A`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{decompose_map, Echelon, Field, SparseVec};
use crate::scalar::{Rational, Scalar};
use crate::sheaf::{cohomology_dims, DimPair};
use crate::superalgebra::{merge_sign, Parity, SuperMonomial, SuperPolynomial, VarContext};

/// Even invertible transition function on `U ∩ V`, written in the `V` chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSheaf {
    m: usize,
    w: SuperPolynomial,
}

impl TransitionSheaf {
    pub fn new(w: SuperPolynomial) -> Result<Self> {
        let ctx = w.ctx();
        if ctx.n_even() != 1 || !ctx.params.is_empty() {
            return Err(Error::Context("transition functions live on the V chart of P^{1|m}".into()));
        }
        if w.parity() != Some(Parity::Even) {
            return Err(Error::Parity(format!("transition function {w} is not even")));
        }
        let reduced = w.reduced_part();
        if reduced.len() != 1 {
            return Err(Error::Domain(format!("reduced part of {w} is not a unit c·w^k on U∩V")));
        }
        Ok(TransitionSheaf { m: ctx.n_odd(), w })
    }

    /// `W = w^ℓ`, which represents `O_{P^{1|m}}(ℓ)`.
    pub fn twist(m: usize, ell: i64) -> Self {
        let ctx = VarContext::v_chart(m);
        let w = SuperPolynomial::monomial(&ctx, Scalar::from_int(1), &[ell as i32], &[]);
        TransitionSheaf { m, w }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn transition(&self) -> &SuperPolynomial {
        &self.w
    }

    /// Largest absolute exponent of `w` in `W`.
    pub fn depth(&self) -> usize {
        self.w.depth() as usize
    }

    /// Exponent `k` of the reduced part `c·w^k`.
    pub fn reduced_degree(&self) -> i32 {
        self.w.reduced_part().terms().keys().next().unwrap().exps[0]
    }

    /// Smallest window the engine accepts: `max(|k|, depth) + m + ⌊m/2⌋·max(0, e_max − k)`,
    /// where `e_max` is the largest exponent of `w` in `W`.
    pub fn min_window(&self) -> usize {
        let k = self.reduced_degree();
        let e_max = self.w.terms().keys().map(|t| t.exps[0]).max().unwrap_or(k);
        let lift = (e_max - k).max(0) as usize;
        (k.unsigned_abs() as usize).max(self.depth()) + self.m + (self.m / 2) * lift
    }

    fn is_rational(&self) -> bool {
        self.w.terms().values().all(|c| c.is_rational())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CechWindow {
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyResult {
    pub h0: DimPair,
    pub h1: DimPair,
    /// Global sections, as their `V`-chart component `Q`.
    pub generators_h0: Vec<SuperPolynomial>,
    /// Representatives of `H¹` in echelon normal form, in the `V` chart.
    pub generators_h1: Vec<SuperPolynomial>,
    pub window_used: CechWindow,
    pub stabilized: bool,
}

impl CohomologyResult {
    pub fn dims(&self) -> (DimPair, DimPair) {
        (self.h0, self.h1)
    }
}

/// Odd-mask classes linked by the terms of `W`; the map `A` preserves each.
pub fn sectors(s: &TransitionSheaf) -> Vec<Vec<u64>> {
    let m = s.m;
    let n = 1usize << m;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let masks: Vec<u64> = s.w.terms().keys().map(|k| k.mask).filter(|&t| t != 0).collect();
    for src in 0..n as u64 {
        for &t in &masks {
            if src & t == 0 {
                let (a, b) = (find(&mut parent, src as usize), find(&mut parent, (src | t) as usize));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        groups.entry(r).or_default().push(x as u64);
    }
    groups.into_values().collect()
}

struct SectorOut {
    parity: Parity,
    h0: usize,
    h1: usize,
    gens0: Vec<SuperPolynomial>,
    gens1: Vec<SuperPolynomial>,
}

struct Layout<'a> {
    masks: &'a [u64],
    pos: BTreeMap<u64, usize>,
    amax: usize,
}

impl Layout<'_> {
    fn domain(&self) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for &s in self.masks {
            for a in 0..=self.amax {
                out.push((a, s));
            }
        }
        out
    }
}

fn solve_sector<F: Field>(s: &TransitionSheaf, masks: &[u64], d: usize) -> Result<SectorOut> {
    let ctx = s.w.ctx().clone();
    let uctx = VarContext::u_chart(s.m);
    let terms: Vec<(i32, u64, F)> = s
        .w
        .terms()
        .iter()
        .map(|(k, c)| (k.exps[0], k.mask, F::from_scalar(c).expect("coefficient lies in the chosen field")))
        .collect();
    let depth = s.depth();
    let layout = Layout { masks, pos: masks.iter().enumerate().map(|(i, &x)| (x, i)).collect(), amax: d + depth };
    let nm = masks.len();
    let domain = layout.domain();
    // Every exponent reachable from the domain fits below `bmax`.
    let bmax = layout.amax + s.m + depth + 1;

    // A(z^a θ^S) as a list of ((b, T∪S), coefficient) with b ≥ 1.
    let image = |a: usize, sm: u64| -> Vec<(usize, u64, F)> {
        let mut out = Vec::new();
        for (e, t, c) in &terms {
            if t & sm != 0 {
                continue;
            }
            let x = *e as i64 - a as i64 - sm.count_ones() as i64;
            if x >= 0 {
                continue;
            }
            let c = if merge_sign(*t, sm) { c.neg_ref() } else { c.clone() };
            out.push(((-x) as usize, t | sm, c));
        }
        out
    };

    let full_idx = |b: usize, mask: u64| (bmax - b) * nm + layout.pos[&mask];
    let cols_full: Vec<SparseVec<F>> = domain
        .iter()
        .map(|&(a, sm)| {
            let mut v = SparseVec::new();
            for (b, mask, c) in image(a, sm) {
                crate::linalg::axpy(&mut v, &c, &BTreeMap::from([(full_idx(b, mask), F::one())]));
            }
            v
        })
        .collect();
    let dec = decompose_map(&cols_full);
    let mut gens0 = Vec::new();
    for kv in &dec.kernel {
        let p = SuperPolynomial::from_terms(
            &uctx,
            kv.iter().map(|(j, c)| {
                let (a, sm) = domain[*j];
                (SuperMonomial { exps: vec![a as i32], mask: sm }, c.to_scalar())
            }),
        );
        let phi = SuperPolynomial::from_terms(
            &ctx,
            p.terms().iter().map(|(k, c)| (SuperMonomial { exps: vec![-k.exps[0] - k.odd_degree() as i32], mask: k.mask }, c.clone())),
        );
        let q = &s.w * &phi;
        if q.terms().keys().any(|k| k.exps[0] < 0) {
            return Err(Error::Consistency(format!("kernel vector {p} has a pole on V: {q}")));
        }
        gens0.push(q);
    }

    // Window [−d, −1]; deep exponents get the small indices so they pivot first.
    let win_idx = |b: usize, mask: u64| (d - b) * nm + layout.pos[&mask];
    let mut ech: Echelon<F> = Echelon::new();
    for &(a, sm) in &domain {
        let mut v: SparseVec<F> = SparseVec::new();
        for (b, mask, c) in image(a, sm) {
            if b <= d {
                let idx = win_idx(b, mask);
                let e = v.entry(idx).or_insert_with(F::zero);
                *e = e.add_ref(&c);
                if e.is_zero() {
                    v.remove(&idx);
                }
            }
        }
        ech.insert(&v);
    }
    let mut gens1 = Vec::new();
    for b in (1..=d).rev() {
        for &mask in masks {
            if !ech.is_pivot(win_idx(b, mask)) {
                gens1.push(SuperPolynomial::from_terms(&ctx, [(SuperMonomial { exps: vec![-(b as i32)], mask }, Scalar::from_int(1))]));
            }
        }
    }
    gens1.sort_by(|x, y| x.terms().keys().next().cmp(&y.terms().keys().next()));
    Ok(SectorOut {
        parity: Parity::of_count(masks[0].count_ones() as usize),
        h0: dec.kernel.len(),
        h1: d * nm - ech.rank(),
        gens0,
        gens1,
    })
}

/// Cohomology at a fixed window, without the stabilization check.
pub fn cech_at_window(s: &TransitionSheaf, d: usize) -> Result<CohomologyResult> {
    let secs: Vec<Vec<u64>> = sectors(s).into_iter().flat_map(split_by_parity).collect();
    let rational = s.is_rational();
    let outs: Vec<Result<SectorOut>> = secs
        .par_iter()
        .map(|masks| if rational { solve_sector::<Rational>(s, masks, d) } else { solve_sector::<Scalar>(s, masks, d) })
        .collect();
    let mut h0 = DimPair::ZERO;
    let mut h1 = DimPair::ZERO;
    let mut g0 = Vec::new();
    let mut g1 = Vec::new();
    for o in outs {
        let o = o?;
        h0.add_to(o.parity, o.h0 as u64);
        h1.add_to(o.parity, o.h1 as u64);
        g0.extend(o.gens0);
        g1.extend(o.gens1);
    }
    g1.sort_by(|x, y| x.terms().keys().next().cmp(&y.terms().keys().next()));
    Ok(CohomologyResult { h0, h1, generators_h0: g0, generators_h1: g1, window_used: CechWindow { d }, stabilized: false })
}

fn split_by_parity(masks: Vec<u64>) -> Vec<Vec<u64>> {
    let (even, odd): (Vec<u64>, Vec<u64>) = masks.into_iter().partition(|x| x.count_ones() % 2 == 0);
    [even, odd].into_iter().filter(|v| !v.is_empty()).collect()
}

/// Default window, the minimum accepted by [`cech_cohomology`].
pub fn default_window(s: &TransitionSheaf) -> CechWindow {
    CechWindow { d: s.min_window() }
}

/// Runs at `D` and `D+1`; if they differ, at `D+1` and `D+2`.
pub fn cech_cohomology(s: &TransitionSheaf, win: CechWindow) -> Result<CohomologyResult> {
    if win.d < s.min_window() {
        return Err(Error::Domain(format!("window {} is below the minimum {}", win.d, s.min_window())));
    }
    let mut prev = cech_at_window(s, win.d)?;
    for d in [win.d + 1, win.d + 2] {
        let next = cech_at_window(s, d)?;
        if next.dims() == prev.dims() {
            prev.stabilized = true;
            return Ok(prev);
        }
        prev = next;
    }
    Err(Error::Instability { what: "Čech dimensions".into(), suggested: 2 * win.d + 2 })
}

/// Compares the Čech computation for `W = w^ℓ` with the split-sheaf dimensions.
pub fn oracle_check_line(n: usize, m: usize, ell: i64) -> Result<bool> {
    if n != 1 {
        return Err(Error::Domain("the two-chart Čech oracle covers n = 1 only".into()));
    }
    let s = TransitionSheaf::twist(m, ell);
    let r = cech_cohomology(&s, default_window(&s))?;
    let want = cohomology_dims(1, m, ell);
    Ok(r.h0 == want[&0] && r.h1 == want[&1])
}

/// Whether two lists of `H¹` representatives span the same subspace of the
/// quotient by the image of `A` within the window `[−d, −1]`.
pub fn same_h1_span(s: &TransitionSheaf, a: &[SuperPolynomial], b: &[SuperPolynomial], d: usize) -> Result<bool> {
    let (ech, enc) = image_echelon(s, d)?;
    let rank_with = |lists: &[&[SuperPolynomial]]| -> Result<usize> {
        let mut e = ech.clone();
        for g in lists.iter().flat_map(|l| l.iter()) {
            e.insert(&enc(g)?);
        }
        Ok(e.rank())
    };
    let (ra, rb, rab) = (rank_with(&[a])?, rank_with(&[b])?, rank_with(&[a, b])?);
    Ok(ra == rab && rb == rab)
}

/// Dimension of the span of `gens` in the quotient by the image of `A`.
pub fn h1_span_dim(s: &TransitionSheaf, gens: &[SuperPolynomial], d: usize) -> Result<usize> {
    let (ech, enc) = image_echelon(s, d)?;
    let base = ech.rank();
    let mut e = ech;
    for g in gens {
        e.insert(&enc(g)?);
    }
    Ok(e.rank() - base)
}

type Encoder = Box<dyn Fn(&SuperPolynomial) -> Result<SparseVec<Scalar>>>;

fn image_echelon(s: &TransitionSheaf, d: usize) -> Result<(Echelon<Scalar>, Encoder)> {
    let m = s.m;
    let nm = 1usize << m;
    let depth = s.depth();
    let amax = d + depth;
    let idx = move |b: usize, mask: u64| (d - b) * nm + mask as usize;
    let mut ech: Echelon<Scalar> = Echelon::new();
    for sm in 0..nm as u64 {
        for a in 0..=amax {
            let mut v: SparseVec<Scalar> = SparseVec::new();
            for (k, c) in s.w.terms() {
                if k.mask & sm != 0 {
                    continue;
                }
                let x = k.exps[0] as i64 - a as i64 - sm.count_ones() as i64;
                if x >= 0 || (-x) as usize > d {
                    continue;
                }
                let c = if merge_sign(k.mask, sm) { -c.clone() } else { c.clone() };
                crate::linalg::axpy(&mut v, &c, &BTreeMap::from([(idx((-x) as usize, k.mask | sm), Scalar::from_int(1))]));
            }
            ech.insert(&v);
        }
    }
    let ctx: Arc<VarContext> = s.w.ctx().clone();
    let enc: Encoder = Box::new(move |p: &SuperPolynomial| {
        if **p.ctx() != *ctx {
            return Err(Error::Context("representative is not over the V chart".into()));
        }
        let mut v = SparseVec::new();
        for (k, c) in p.terms() {
            let e = k.exps[0];
            if e >= 0 {
                continue;
            }
            if (-e) as usize > d {
                return Err(Error::Domain(format!("representative {p} reaches beyond the window")));
            }
            v.insert(idx((-e) as usize, k.mask), c.clone());
        }
        Ok(v)
    });
    Ok((ech, enc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::SuperPolynomial as P;

    fn vmono(ctx: &Arc<VarContext>, e: i32, odd: &[usize]) -> P {
        P::monomial(ctx, Scalar::from_int(1), &[e], odd)
    }

    #[test]
    fn structure_sheaf_p12() {
        let s = TransitionSheaf::twist(2, 0);
        let r = cech_cohomology(&s, default_window(&s)).unwrap();
        assert_eq!((r.h0, r.h1), (DimPair::new(1, 0), DimPair::new(1, 0)));
        assert!(r.stabilized);
        let ctx = VarContext::v_chart(2);
        assert_eq!(r.generators_h1, vec![vmono(&ctx, -1, &[0, 1])]);
        assert_eq!(r.generators_h0, vec![P::one(&ctx)]);
    }

    #[test]
    fn line_bundle_p13() {
        let ctx = VarContext::v_chart(3);
        let w = [&[0, 1][..], &[0, 2], &[1, 2]].iter().fold(P::one(&ctx), |acc, o| &acc + &vmono(&ctx, -1, o));
        let s = TransitionSheaf::new(w).unwrap();
        // χ per parity from the graded pieces: even O ⊕ O(−2)³ gives −2, odd O(−1)³ ⊕ O(−3) gives −2.
        for d in 4..8 {
            let r = cech_at_window(&s, d).unwrap();
            assert_eq!((r.h0, r.h1), (DimPair::new(0, 0), DimPair::new(2, 2)));
        }
        let r = cech_cohomology(&s, default_window(&s)).unwrap();
        let listed = vec![
            vmono(&ctx, -1, &[0, 1]),
            vmono(&ctx, -1, &[0, 2]),
            vmono(&ctx, -1, &[1, 2]),
            vmono(&ctx, -1, &[0, 1, 2]),
            vmono(&ctx, -2, &[0, 1, 2]),
        ];
        assert_eq!(h1_span_dim(&s, &listed, 4).unwrap(), 4);
        assert!(same_h1_span(&s, &listed, &r.generators_h1, 4).unwrap());
    }

    #[test]
    fn calibration_against_p1() {
        for k in -3..=3i64 {
            let s = TransitionSheaf::twist(0, k);
            let r = cech_cohomology(&s, default_window(&s)).unwrap();
            let want = cohomology_dims(1, 0, k);
            assert_eq!((r.h0, r.h1), (want[&0], want[&1]), "k = {k}");
        }
    }

    #[test]
    fn oracle_small_cases() {
        assert!(oracle_check_line(1, 2, 0).unwrap());
        assert!(oracle_check_line(1, 3, -1).unwrap());
        let s = TransitionSheaf::twist(3, -1);
        assert_eq!(cech_cohomology(&s, default_window(&s)).unwrap().h1.total(), 12);
        for ell in -8..=8 {
            assert!(oracle_check_line(1, 0, ell).unwrap());
        }
    }

    #[test]
    fn window_below_minimum_is_rejected() {
        let ctx = VarContext::v_chart(2);
        let w = &P::one(&ctx) + &vmono(&ctx, -1, &[0, 1]);
        let s = TransitionSheaf::new(w).unwrap();
        assert!(matches!(cech_cohomology(&s, CechWindow { d: 2 }), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_transitions() {
        let ctx = VarContext::v_chart(2);
        assert!(TransitionSheaf::new(vmono(&ctx, 0, &[0])).is_err());
        assert!(TransitionSheaf::new(vmono(&ctx, -1, &[0, 1])).is_err());
        assert!(TransitionSheaf::new(&P::one(&ctx) + &vmono(&ctx, 1, &[])).is_err());
    }

    #[test]
    fn sectors_follow_transition_masks() {
        let ctx = VarContext::v_chart(3);
        let w = &P::one(&ctx) + &vmono(&ctx, -1, &[0, 1]);
        let s = TransitionSheaf::new(w).unwrap();
        let secs = sectors(&s);
        assert!(secs.contains(&vec![0b000, 0b011]));
        assert!(secs.contains(&vec![0b100, 0b111]));
        assert!(secs.contains(&vec![0b001]));
    }
}
