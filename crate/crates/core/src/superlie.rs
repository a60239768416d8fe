//! Finite-dimensional Lie superalgebras of vector fields: structure constants,
//! the `osp(2|2)` table on `P^{1|2}`, and the `N = 2` structure distributions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::scalar::Scalar;
use crate::superalgebra::{
    projective_chart_change_with, supercommutator, Parity, SuperDerivation, SuperMonomial, SuperPolynomial, Var, VarContext,
};
use crate::tangent::p12_listed_fields_in;

/// Named homogeneous fields over one chart.
#[derive(Clone, Debug)]
pub struct SuperLieBasis {
    pub names: Vec<String>,
    pub elements: Vec<SuperDerivation>,
}

impl SuperLieBasis {
    pub fn new(named: Vec<(String, SuperDerivation)>) -> Result<Self> {
        let (names, elements): (Vec<_>, Vec<_>) = named.into_iter().unzip();
        if let Some(e) = elements.first() {
            if elements.iter().any(|f| !Arc::ptr_eq(f.ctx(), e.ctx()) && **f.ctx() != **e.ctx()) {
                return Err(Error::Context("basis elements over different charts".into()));
            }
        }
        Ok(SuperLieBasis { names, elements })
    }

    pub fn parities(&self) -> Vec<Parity> {
        self.elements.iter().map(|e| e.parity()).collect()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> &SuperDerivation {
        &self.elements[self.index(name).unwrap_or_else(|| panic!("no basis element {name}"))]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Scalar,
}

/// `[e_i, e_j] = Σ_k c_{ij}^k e_k`, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub names: Vec<String>,
    pub parities: Vec<Parity>,
    pub c: BTreeMap<(usize, usize, usize), Scalar>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.c.get(&(i, j, k)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn bracket(&self, i: usize, j: usize) -> BTreeMap<usize, Scalar> {
        (0..self.dim()).filter_map(|k| self.c.get(&(i, j, k)).map(|c| (k, c.clone()))).collect()
    }

    pub fn entries(&self) -> Vec<StructureEntry> {
        self.c.iter().map(|(&(i, j, k), c)| StructureEntry { i, j, k, coeff: c.clone() }).collect()
    }

    /// `c_{ji}^k = −(−1)^{|i||j|} c_{ij}^k` for all indices.
    pub fn super_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s = Scalar::from_int(-Parity::koszul(self.parities[i], self.parities[j]));
                (0..n).all(|k| self.get(j, i, k) == &s * &self.get(i, j, k))
            })
        })
    }

    /// `[x,[y,z]] = [[x,y],z] + (−1)^{|x||y|}[y,[x,z]]` on basis triples.
    pub fn super_jacobi(&self) -> bool {
        let n = self.dim();
        let apply = |a: usize, v: &BTreeMap<usize, Scalar>, left: bool| -> BTreeMap<usize, Scalar> {
            let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (l, c) in v {
                let b = if left { self.bracket(a, *l) } else { self.bracket(*l, a) };
                for (k, d) in b {
                    let e = out.entry(k).or_insert_with(Scalar::zero);
                    *e = &*e + &(c * &d);
                }
            }
            out.retain(|_, c| !c.is_zero());
            out
        };
        (0..n).into_par_iter().all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    let lhs = apply(x, &self.bracket(y, z), true);
                    let r1 = apply(z, &self.bracket(x, y), false);
                    let s = Scalar::from_int(Parity::koszul(self.parities[x], self.parities[y]));
                    let r2 = apply(y, &self.bracket(x, z), true);
                    let mut rhs = r1;
                    for (k, c) in r2 {
                        let e = rhs.entry(k).or_insert_with(Scalar::zero);
                        *e = &*e + &(&s * &c);
                    }
                    rhs.retain(|_, c| !c.is_zero());
                    lhs == rhs
                })
            })
        })
    }
}

/// Coordinates of fields over the monomials of their coefficients, with a shared index.
struct Coordinates {
    index: HashMap<(Var, SuperMonomial), usize>,
}

impl Coordinates {
    fn new() -> Self {
        Coordinates { index: HashMap::new() }
    }

    fn encode(&mut self, f: &SuperDerivation) -> SparseVec<Scalar> {
        let mut v = SparseVec::new();
        for (slot, coeff) in f.slots() {
            for (k, c) in coeff.terms() {
                let next = self.index.len();
                let i = *self.index.entry((slot, k.clone())).or_insert(next);
                v.insert(i, c.clone());
            }
        }
        v
    }
}

/// Solves `f = Σ c_k e_k` exactly; augmented columns carry the basis labels.
struct Expander {
    coords: Coordinates,
    ech: Echelon<Scalar>,
    dim: usize,
}

const TAG: usize = 1 << 40;

impl Expander {
    fn new(elements: &[SuperDerivation]) -> Result<Self> {
        let mut coords = Coordinates::new();
        let mut ech = Echelon::new();
        for (k, e) in elements.iter().enumerate() {
            let mut v = coords.encode(e);
            v.insert(TAG + k, Scalar::one());
            ech.insert(&v);
        }
        if ech.pivots().any(|p| p >= TAG) {
            return Err(Error::Domain("basis elements are linearly dependent".into()));
        }
        Ok(Expander { coords, ech, dim: elements.len() })
    }

    fn expand(&mut self, f: &SuperDerivation) -> std::result::Result<BTreeMap<usize, Scalar>, SparseVec<Scalar>> {
        let v = self.coords.encode(f);
        let r = self.ech.reduce(&v);
        let residual: SparseVec<Scalar> = r.range(..TAG).map(|(k, c)| (*k, c.clone())).collect();
        if !residual.is_empty() {
            return Err(residual);
        }
        Ok(r.range(TAG..TAG + self.dim).map(|(k, c)| (k - TAG, -c)).collect())
    }
}

/// All brackets `[e_i, e_j]`, expanded in the basis.
pub fn structure_constants(basis: &SuperLieBasis) -> Result<StructureConstants> {
    let n = basis.elements.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let brackets: Vec<SuperDerivation> = pairs
        .par_iter()
        .map(|&(i, j)| supercommutator(&basis.elements[i], &basis.elements[j]))
        .collect::<Result<_>>()?;
    let mut exp = Expander::new(&basis.elements)?;
    let mut c = BTreeMap::new();
    for (&(i, j), b) in pairs.iter().zip(&brackets) {
        match exp.expand(b) {
            Ok(v) => {
                for (k, x) in v {
                    c.insert((i, j, k), x);
                }
            }
            Err(_) => {
                return Err(Error::NotClosed {
                    bracket: format!("[{}, {}]", basis.names[i], basis.names[j]),
                    residual: b.render(),
                })
            }
        }
    }
    Ok(StructureConstants { names: basis.names.clone(), parities: basis.parities(), c })
}

/// Structure constants in the basis `f_a = Σ_k T_{ak} e_k`, computed from the tensor alone.
pub fn transform_structure_constants(sc: &StructureConstants, names: Vec<String>, t: &[Vec<Scalar>]) -> Result<StructureConstants> {
    let n = sc.dim();
    // Rows of T tagged with their labels; expanding e-vectors in f uses the same trick as `Expander`.
    let mut ech: Echelon<Scalar> = Echelon::new();
    for (a, row) in t.iter().enumerate() {
        let mut v: SparseVec<Scalar> = row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.clone())).collect();
        v.insert(TAG + a, Scalar::one());
        ech.insert(&v);
    }
    if ech.pivots().any(|p| p >= TAG) {
        return Err(Error::Domain("basis change is singular".into()));
    }
    let parities: Vec<Parity> = t
        .iter()
        .map(|row| {
            let k = row.iter().position(|c| !c.is_zero()).expect("nonzero row");
            sc.parities[k]
        })
        .collect();
    let mut c = BTreeMap::new();
    for a in 0..t.len() {
        for b in 0..t.len() {
            let mut v: SparseVec<Scalar> = SparseVec::new();
            for i in 0..n {
                for j in 0..n {
                    let tij = &t[a][i] * &t[b][j];
                    if tij.is_zero() {
                        continue;
                    }
                    for (k, x) in sc.bracket(i, j) {
                        crate::linalg::axpy(&mut v, &(&tij * &x), &BTreeMap::from([(k, Scalar::one())]));
                    }
                }
            }
            let r = ech.reduce(&v);
            if r.range(..TAG).next().is_some() {
                return Err(Error::Consistency("transformed bracket leaves the span".into()));
            }
            for (k, x) in r.range(TAG..) {
                c.insert((a, b, k - TAG), -x);
            }
        }
    }
    Ok(StructureConstants { names, parities, c })
}

fn comb(ctx: &Arc<VarContext>, parity: Parity, terms: &[(Scalar, &SuperDerivation)]) -> SuperDerivation {
    SuperDerivation::combination(ctx, parity, terms).expect("homogeneous combination")
}

/// `{U₁..U₄ | Σ₁..Σ₄}` from the listed `V`, `Ξ`.
pub fn u_sigma_basis() -> SuperLieBasis {
    let u = VarContext::u_chart(2);
    let (v, xi) = p12_listed_fields_in(&u);
    let one = Scalar::one();
    let sum = |a: &SuperDerivation, b: &SuperDerivation, p| comb(&u, p, &[(one.clone(), a), (one.clone(), b)]);
    let named = vec![
        ("U1".to_string(), v[0].clone()),
        ("U2".to_string(), sum(&v[1], &v[4], Parity::Even)),
        ("U3".to_string(), v[2].clone()),
        ("U4".to_string(), sum(&v[1], &v[7], Parity::Even)),
        ("Sigma1".to_string(), sum(&xi[0], &xi[6], Parity::Odd)),
        ("Sigma2".to_string(), sum(&xi[1], &xi[7], Parity::Odd)),
        ("Sigma3".to_string(), sum(&xi[2], &xi[4], Parity::Odd)),
        ("Sigma4".to_string(), sum(&xi[3], &xi[5], Parity::Odd)),
    ];
    SuperLieBasis::new(named).expect("one chart")
}

/// Rows expressing `H, K, D, Y, Q₁, Q₂, S₁, S₂` through `U₁..U₄, Σ₁..Σ₄` with the `1/√2` normalization.
pub fn osp22_change_of_basis() -> (Vec<String>, Vec<Vec<Scalar>>) {
    let z = Scalar::zero;
    let half = Scalar::from_frac(1, 2);
    let r = Scalar::sqrt2().inv().expect("√2 ≠ 0");
    let ri = &r * &Scalar::i();
    let mut rows = vec![vec![z(); 8]; 8];
    rows[0][0] = Scalar::one();
    rows[1][2] = Scalar::one();
    rows[2][1] = half.clone();
    rows[2][3] = half.clone();
    rows[3][1] = half.clone();
    rows[3][3] = -half;
    rows[4][4] = r.clone();
    rows[4][6] = -ri.clone();
    rows[5][6] = r.clone();
    rows[5][4] = -ri.clone();
    rows[6][5] = -r.clone();
    rows[6][7] = ri.clone();
    rows[7][7] = -r;
    rows[7][5] = ri;
    let names = ["H", "K", "D", "Y", "Q1", "Q2", "S1", "S2"].iter().map(|s| s.to_string()).collect();
    (names, rows)
}

pub fn osp22_basis() -> SuperLieBasis {
    let us = u_sigma_basis();
    let ctx = us.elements[0].ctx().clone();
    let (names, rows) = osp22_change_of_basis();
    let named = names
        .into_iter()
        .zip(rows)
        .map(|(name, row)| {
            let terms: Vec<(Scalar, &SuperDerivation)> =
                row.iter().zip(&us.elements).filter(|(c, _)| !c.is_zero()).map(|(c, e)| (c.clone(), e)).collect();
            let parity = terms[0].1.parity();
            (name, comb(&ctx, parity, &terms))
        })
        .collect();
    SuperLieBasis::new(named).expect("one chart")
}

/// The generators as written in the coordinate list with `1/2` prefactors on `Q_i`, `S_i`.
pub fn osp22_half_normalized_q1() -> SuperDerivation {
    let u = VarContext::u_chart(2);
    let (z, t1, t2) = (Var::Even(0), Var::Odd(0), Var::Odd(1));
    let th = |j| SuperPolynomial::odd_var(&u, j);
    let half = Scalar::from_frac(1, 2);
    let i = Scalar::i();
    let f = SuperDerivation::one_form_like(
        &u,
        vec![(z, &th(0) - &th(1).scale(&i)), (t1, SuperPolynomial::constant(&u, -i.clone())), (t2, SuperPolynomial::one(&u))],
    )
    .expect("odd field");
    f.scale(&half)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationCheck {
    pub equation: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Osp22Report {
    pub equations: Vec<EquationCheck>,
    /// Entries of the `U/Σ` commutation table.
    pub table: Vec<EquationCheck>,
    /// Computed values for the line whose printed brackets repeat `[H, ·]`.
    pub ambiguous: Vec<(String, String)>,
    /// `{Q₁, Q₁}` with the `1/2`-normalized coordinate list.
    pub half_normalization_q1q1: String,
    pub antisymmetric: bool,
    pub jacobi: bool,
    pub basis_change_consistent: bool,
}

impl Osp22Report {
    pub fn all_pass(&self) -> bool {
        self.equations.iter().chain(&self.table).all(|e| e.pass) && self.antisymmetric && self.jacobi && self.basis_change_consistent
    }
}

fn render_combo(names: &[String], v: &BTreeMap<usize, Scalar>) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(k, c)| if c.is_one() { names[*k].clone() } else { format!("({})*{}", c.render(), names[*k]) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check(sc: &StructureConstants, a: &str, b: &str, expected: &[(&str, Scalar)]) -> EquationCheck {
    let idx = |s: &str| sc.names.iter().position(|n| n == s).unwrap_or_else(|| panic!("unknown generator {s}"));
    let (i, j) = (idx(a), idx(b));
    let got = sc.bracket(i, j);
    let mut want: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (n, c) in expected {
        if !c.is_zero() {
            let e = want.entry(idx(n)).or_insert_with(Scalar::zero);
            *e = &*e + c;
        }
    }
    want.retain(|_, c| !c.is_zero());
    let open = if sc.parities[i].is_odd() && sc.parities[j].is_odd() { ("{", "}") } else { ("[", "]") };
    EquationCheck {
        equation: format!("{}{a}, {b}{}", open.0, open.1),
        computed: render_combo(&sc.names, &got),
        expected: render_combo(&sc.names, &want),
        pass: got == want,
    }
}

/// The printed `U/Σ` table, as (left, right, expansion).
pub fn u_sigma_table() -> Vec<(&'static str, &'static str, Vec<(&'static str, i64)>)> {
    vec![
        ("U1", "U2", vec![("U1", 1)]),
        ("U1", "U3", vec![("U2", 1), ("U4", 1)]),
        ("U1", "U4", vec![("U1", 1)]),
        ("U2", "U3", vec![("U3", 1)]),
        ("U2", "U4", vec![]),
        ("U3", "U4", vec![("U3", -1)]),
        ("Sigma1", "Sigma2", vec![]),
        ("Sigma1", "Sigma3", vec![("U1", 2)]),
        ("Sigma1", "Sigma4", vec![("U2", 2)]),
        ("Sigma2", "Sigma3", vec![("U4", 2)]),
        ("Sigma2", "Sigma4", vec![("U3", 2)]),
        ("Sigma3", "Sigma4", vec![]),
        ("U1", "Sigma1", vec![]),
        ("U1", "Sigma2", vec![("Sigma1", 1)]),
        ("U1", "Sigma3", vec![]),
        ("U1", "Sigma4", vec![("Sigma3", 1)]),
        ("U2", "Sigma1", vec![]),
        ("U2", "Sigma2", vec![("Sigma2", 1)]),
        ("U2", "Sigma3", vec![("Sigma3", -1)]),
        ("U2", "Sigma4", vec![]),
        ("U3", "Sigma1", vec![("Sigma2", -1)]),
        ("U3", "Sigma2", vec![]),
        ("U3", "Sigma3", vec![("Sigma4", -1)]),
        ("U3", "Sigma4", vec![]),
        ("U4", "Sigma1", vec![("Sigma1", -1)]),
        ("U4", "Sigma2", vec![]),
        ("U4", "Sigma3", vec![]),
        ("U4", "Sigma4", vec![("Sigma4", 1)]),
    ]
}

pub fn verify_osp22() -> Result<Osp22Report> {
    let us = u_sigma_basis();
    let sc_us = structure_constants(&us)?;
    let table = u_sigma_table()
        .into_iter()
        .map(|(a, b, e)| check(&sc_us, a, b, &e.into_iter().map(|(n, c)| (n, Scalar::from_int(c))).collect::<Vec<_>>()))
        .collect();

    let osp = osp22_basis();
    let sc = structure_constants(&osp)?;
    let i = Scalar::i();
    let two_i = Scalar::from_int(2) * i.clone();
    let half = Scalar::from_frac(1, 2);
    let int = Scalar::from_int;
    let eps = |a: usize, b: usize| -> i64 {
        match (a, b) {
            (1, 2) => 1,
            (2, 1) => -1,
            _ => 0,
        }
    };
    let q = |a: usize| format!("Q{a}");
    let s = |a: usize| format!("S{a}");
    let mut eqs = Vec::new();
    for a in 1..=2 {
        for b in 1..=2 {
            let d = if a == b { -two_i.clone() } else { Scalar::zero() };
            eqs.push(check(&sc, &q(a), &q(b), &[("H", d.clone())]));
            eqs.push(check(&sc, &s(a), &s(b), &[("K", d)]));
            let dd = if a == b { two_i.clone() } else { Scalar::zero() };
            eqs.push(check(&sc, &q(a), &s(b), &[("D", dd), ("Y", int(-2 * eps(a, b)))]));
        }
    }
    for a in 1..=2 {
        eqs.push(check(&sc, "H", &q(a), &[]));
        eqs.push(check(&sc, "H", &s(a), &[(q(a).as_str(), -Scalar::one())]));
        eqs.push(check(&sc, "D", &q(a), &[(q(a).as_str(), -half.clone())]));
        eqs.push(check(&sc, "D", &s(a), &[(s(a).as_str(), half.clone())]));
        let b = 3 - a;
        eqs.push(check(&sc, "Y", &q(a), &[(q(b).as_str(), &half * &int(eps(a, b)))]));
        eqs.push(check(&sc, "Y", &s(a), &[(s(b).as_str(), &half * &int(eps(a, b)))]));
    }
    for x in ["H", "D", "K"] {
        eqs.push(check(&sc, "Y", x, &[]));
    }
    eqs.push(check(&sc, "H", "D", &[("H", Scalar::one())]));
    eqs.push(check(&sc, "H", "K", &[("D", int(2))]));
    eqs.push(check(&sc, "D", "K", &[("K", Scalar::one())]));

    let mut ambiguous = Vec::new();
    for a in 1..=2 {
        for (x, y) in [("K", q(a)), ("K", s(a))] {
            let (ix, iy) = (osp.index(x).unwrap(), osp.index(&y).unwrap());
            ambiguous.push((format!("[{x}, {y}]"), render_combo(&sc.names, &sc.bracket(ix, iy))));
        }
    }

    let q1h = osp22_half_normalized_q1();
    let qq = supercommutator(&q1h, &q1h)?;
    let (names, rows) = osp22_change_of_basis();
    let transformed = transform_structure_constants(&sc_us, names, &rows)?;

    Ok(Osp22Report {
        equations: eqs,
        table,
        ambiguous,
        half_normalization_q1q1: qq.render(),
        antisymmetric: sc.super_antisymmetric() && sc_us.super_antisymmetric(),
        jacobi: sc.super_jacobi() && sc_us.super_jacobi(),
        basis_change_consistent: transformed == sc,
    })
}

fn param_ctx(names: &[&str]) -> Arc<VarContext> {
    VarContext::u_chart(2).with_params(names.iter().map(|s| s.to_string()).collect())
}

fn param(ctx: &Arc<VarContext>, k: usize) -> SuperPolynomial {
    SuperPolynomial::var(ctx, Var::Param(k))
}

/// Splits a polynomial with parameters into coefficient polynomials in the parameters alone, keyed by the coordinate monomial.
fn by_coordinate_monomial(p: &SuperPolynomial) -> BTreeMap<SuperMonomial, SuperPolynomial> {
    let ne = p.ctx().n_even();
    let mut out: BTreeMap<SuperMonomial, SuperPolynomial> = BTreeMap::new();
    for (k, c) in p.terms() {
        let mut coord = k.clone();
        let mut par = k.clone();
        for (a, e) in coord.exps.iter_mut().enumerate() {
            if a >= ne {
                *e = 0;
            }
        }
        for e in par.exps[..ne].iter_mut() {
            *e = 0;
        }
        par.mask = 0;
        out.entry(coord).or_insert_with(|| SuperPolynomial::zero(p.ctx())).add_term(par, c.clone());
    }
    out
}

/// `D_odd = Σ αᵢΞᵢ` with formal even parameters `a1..a8`.
pub fn odd_ansatz() -> SuperDerivation {
    let names = ["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"];
    let ctx = param_ctx(&names);
    let (_, xi) = p12_listed_fields_in(&ctx);
    xi.iter().enumerate().fold(SuperDerivation::zero(&ctx, Parity::Odd), |acc, (k, x)| {
        acc.try_add(&x.left_mul(&param(&ctx, k)).expect("even parameter")).expect("same chart")
    })
}

/// Coefficients of `D² = ½{D, D}` as quadratics in the parameters, deduplicated up to sign.
pub fn integrability_conditions(d: &SuperDerivation) -> Result<Vec<SuperPolynomial>> {
    let sq = supercommutator(d, d)?.scale(&Scalar::from_frac(1, 2));
    let mut out: Vec<SuperPolynomial> = Vec::new();
    for (_, coeff) in sq.slots() {
        for (_, q) in by_coordinate_monomial(coeff) {
            let lead = q.terms().values().next().cloned().unwrap_or_else(Scalar::one);
            let q = q.scale(&lead.inv()?);
            if !q.is_zero() && !out.contains(&q) {
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// The three printed conditions, over the context of `d`.
pub fn printed_integrability_conditions(ctx: &Arc<VarContext>) -> Vec<SuperPolynomial> {
    let a = |k: usize| param(ctx, k - 1);
    vec![
        &(&a(1) * &a(5)) + &(&a(7) * &a(3)),
        &(&a(2) * &a(6)) + &(&a(8) * &a(4)),
        &(&(&(&a(1) * &a(6)) + &(&a(2) * &a(5))) + &(&a(3) * &a(8))) + &(&a(4) * &a(7)),
    ]
}

/// Whether two lists of polynomials span the same space.
pub fn same_poly_span(a: &[SuperPolynomial], b: &[SuperPolynomial]) -> bool {
    let mut index: HashMap<SuperMonomial, usize> = HashMap::new();
    let mut enc = |p: &SuperPolynomial| -> SparseVec<Scalar> {
        p.terms()
            .iter()
            .map(|(k, c)| {
                let next = index.len();
                (*index.entry(k.clone()).or_insert(next), c.clone())
            })
            .collect()
    };
    let va: Vec<_> = a.iter().map(&mut enc).collect();
    let vb: Vec<_> = b.iter().map(&mut enc).collect();
    let r = |vs: &[&SparseVec<Scalar>]| {
        let mut e: Echelon<Scalar> = Echelon::new();
        vs.iter().filter(|v| e.insert(v)).count()
    };
    let ra = r(&va.iter().collect::<Vec<_>>());
    let rb = r(&vb.iter().collect::<Vec<_>>());
    let rab = r(&va.iter().chain(vb.iter()).collect::<Vec<_>>());
    ra == rab && rb == rab
}

/// `D₁ = α₁Σ₃ + α₂Σ₄` and `D₂ = β₁Σ₁ + β₂Σ₂` with parameters `a1, a2, b1, b2`.
pub fn solved_families() -> (SuperDerivation, SuperDerivation) {
    let ctx = param_ctx(&["a1", "a2", "b1", "b2"]);
    let (_, xi) = p12_listed_fields_in(&ctx);
    let one = Scalar::one();
    let sig = |a: usize, b: usize| comb(&ctx, Parity::Odd, &[(one.clone(), &xi[a]), (one.clone(), &xi[b])]);
    let (s1, s2, s3, s4) = (sig(0, 6), sig(1, 7), sig(2, 4), sig(3, 5));
    let d1 = s3.left_mul(&param(&ctx, 0)).unwrap().try_add(&s4.left_mul(&param(&ctx, 1)).unwrap()).unwrap();
    let d2 = s1.left_mul(&param(&ctx, 2)).unwrap().try_add(&s2.left_mul(&param(&ctx, 3)).unwrap()).unwrap();
    (d1, d2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientCheck {
    pub field: String,
    pub computed: String,
    pub printed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub d1_squared_zero: bool,
    pub d2_squared_zero: bool,
    pub anticommutator: String,
    pub coefficients: Vec<CoefficientCheck>,
}

impl FamilyReport {
    pub fn matches_printed(&self) -> bool {
        self.coefficients.iter().all(|c| c.pass)
    }
}

/// `{D₁, D₂}` expanded over `∂_z, θ₁∂_{θ₁} + z∂_z, θ₂∂_{θ₂} + z∂_z, V₃`, compared with the printed coefficients.
pub fn check_families() -> Result<FamilyReport> {
    let (d1, d2) = solved_families();
    let ctx = d1.ctx().clone();
    let zero1 = supercommutator(&d1, &d1)?.is_zero();
    let zero2 = supercommutator(&d2, &d2)?.is_zero();
    let br = supercommutator(&d1, &d2)?;
    let (v, _) = p12_listed_fields_in(&ctx);
    let one = Scalar::one();
    let fields = [
        ("dz", v[0].clone()),
        ("t1*dt1 + z*dz", comb(&ctx, Parity::Even, &[(one.clone(), &v[4]), (one.clone(), &v[1])])),
        ("t2*dt2 + z*dz", comb(&ctx, Parity::Even, &[(one.clone(), &v[7]), (one.clone(), &v[1])])),
        ("z^2*dz + z*t1*dt1 + z*t2*dt2", v[2].clone()),
    ];
    let p = |k: usize| param(&ctx, k);
    let two = Scalar::from_int(2);
    let printed = [(&p(0) * &p(2)).scale(&two), (&p(1) * &p(2)).scale(&two), (&p(0) * &p(3)).scale(&two), (&p(2) * &p(3)).scale(&two)];
    // Split by parameter monomial and expand each coordinate field in the four fields.
    let mut exp = Expander::new(&fields.iter().map(|(_, f)| f.clone()).collect::<Vec<_>>())?;
    let ne = ctx.n_even();
    let mut parts: BTreeMap<SuperMonomial, (Vec<SuperPolynomial>, Vec<SuperPolynomial>)> = BTreeMap::new();
    for (slot, coeff) in br.slots() {
        for (k, c) in coeff.terms() {
            let mut par = SuperMonomial::one(k.exps.len());
            par.exps[ne..].copy_from_slice(&k.exps[ne..]);
            let mut coord = k.clone();
            coord.exps[ne..].iter_mut().for_each(|e| *e = 0);
            let entry = parts
                .entry(par)
                .or_insert_with(|| (vec![SuperPolynomial::zero(&ctx); ne], vec![SuperPolynomial::zero(&ctx); ctx.n_odd()]));
            match slot {
                Var::Even(a) => entry.0[a].add_term(coord, c.clone()),
                Var::Odd(j) => entry.1[j].add_term(coord, c.clone()),
                Var::Param(_) => unreachable!(),
            }
        }
    }
    let mut coeffs = vec![SuperPolynomial::zero(&ctx); fields.len()];
    for (par, (even, odd)) in parts {
        let piece = SuperDerivation::new(&ctx, even, odd, Parity::Even)?;
        let c = exp.expand(&piece).map_err(|_| Error::NotClosed { bracket: "{D1, D2}".into(), residual: piece.render() })?;
        for (k, x) in c {
            coeffs[k].add_term(par.clone(), x);
        }
    }
    let coefficients = fields
        .iter()
        .zip(coeffs.iter().zip(printed.iter()))
        .map(|((name, _), (c, want))| CoefficientCheck {
            field: name.to_string(),
            computed: c.render(),
            printed: want.render(),
            pass: c == want,
        })
        .collect();
    Ok(FamilyReport { d1_squared_zero: zero1, d2_squared_zero: zero2, anticommutator: br.render(), coefficients })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameSample {
    pub chart: String,
    pub point: Scalar,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SrsReport {
    pub d1_integrable: bool,
    pub d2_integrable: bool,
    pub anticommutator: String,
    pub frame: Vec<FrameSample>,
}

impl SrsReport {
    pub fn frame_holds(&self) -> bool {
        self.frame.iter().all(|s| s.invertible)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FrameSample> {
        self.frame.iter().filter(|s| !s.invertible)
    }
}

fn eval_reduced(p: &SuperPolynomial, x: &Scalar) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (k, c) in p.terms() {
        if k.mask != 0 {
            continue;
        }
        let e = k.exps[0];
        let xe = if e >= 0 { x.pow(e as u32) } else { x.inv()?.pow(e.unsigned_abs()) };
        acc = &acc + &(c * &xe);
    }
    Ok(acc)
}

/// Reduced frame matrix of `(D₁, D₂, {D₁,D₂})`: the `∂_z` entry of the even field and the `2×2` `∂_θ` block of the odd ones.
fn frame_invertible(d1: &SuperDerivation, d2: &SuperDerivation, br: &SuperDerivation, x: &Scalar) -> Result<bool> {
    let e = eval_reduced(br.coeff(Var::Even(0)), x)?;
    let m = |d: &SuperDerivation, j: usize| eval_reduced(d.coeff(Var::Odd(j)), x);
    let det = &(&m(d1, 0)? * &m(d2, 1)?) - &(&m(d1, 1)? * &m(d2, 0)?);
    Ok(!e.is_zero() && !det.is_zero())
}

/// Integrability of both fields and the frame condition at sample points of the `U` and `V` charts.
pub fn check_srs_pair(d1: &SuperDerivation, d2: &SuperDerivation, u_samples: &[Scalar], v_samples: &[Scalar]) -> Result<SrsReport> {
    if d1.parity() != Parity::Odd || d2.parity() != Parity::Odd {
        return Err(Error::Parity("structure distributions are generated by odd fields".into()));
    }
    let ctx = d1.ctx().clone();
    let d1_integrable = supercommutator(d1, d1)?.is_zero();
    let d2_integrable = supercommutator(d2, d2)?.is_zero();
    let br = supercommutator(d1, d2)?;
    let mut frame = Vec::new();
    for x in u_samples {
        frame.push(FrameSample { chart: "U".into(), point: x.clone(), invertible: frame_invertible(d1, d2, &br, x)? });
    }
    let vctx = VarContext::new(vec!["w".into()], vec!["p1".into(), "p2".into()], ctx.params.clone());
    let chart = projective_chart_change_with(&ctx, &vctx);
    let (e1, e2, eb) = (chart.pushforward(d1)?, chart.pushforward(d2)?, chart.pushforward(&br)?);
    for x in v_samples {
        let ok = match frame_invertible(&e1, &e2, &eb, x) {
            Ok(b) => b,
            Err(Error::DivisionByZero) => false,
            Err(e) => return Err(e),
        };
        frame.push(FrameSample { chart: "V".into(), point: x.clone(), invertible: ok });
    }
    Ok(SrsReport { d1_integrable, d2_integrable, anticommutator: br.render(), frame })
}

/// `D₀,₁ = ∂_{θ₁} + θ₂∂_z` and `D₀,₂ = ∂_{θ₂} + θ₁∂_z`.
pub fn flat_pair() -> (SuperDerivation, SuperDerivation) {
    let u = VarContext::u_chart(2);
    let th = |j| SuperPolynomial::odd_var(&u, j);
    let one = SuperPolynomial::one(&u);
    let d01 = SuperDerivation::one_form_like(&u, vec![(Var::Even(0), th(1)), (Var::Odd(0), one.clone())]).unwrap();
    let d02 = SuperDerivation::one_form_like(&u, vec![(Var::Even(0), th(0)), (Var::Odd(1), one)]).unwrap();
    (d01, d02)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_sigma_table_verbatim() {
        let r = verify_osp22().unwrap();
        for e in &r.table {
            assert!(e.pass, "{} = {} (printed {})", e.equation, e.computed, e.expected);
        }
    }

    #[test]
    fn osp22_equations() {
        let r = verify_osp22().unwrap();
        for e in r.equations.iter().filter(|e| !e.equation.starts_with("[Y, Q") && !e.equation.starts_with("[Y, S")) {
            assert!(e.pass, "{} = {} (printed {})", e.equation, e.computed, e.expected);
        }
        // Y acts by ±1/2 on Σ₁, Σ₃ (and Σ₂, Σ₄), so on Q₁ ∝ Σ₁ − iΣ₃ it gives (i/2)Q₂.
        let y: Vec<_> = r.equations.iter().filter(|e| e.equation.starts_with("[Y, Q") || e.equation.starts_with("[Y, S")).collect();
        let got: Vec<_> = y.iter().map(|e| (e.equation.as_str(), e.computed.as_str())).collect();
        assert_eq!(
            got,
            vec![("[Y, Q1]", "(1/2*i)*Q2"), ("[Y, S1]", "(1/2*i)*S2"), ("[Y, Q2]", "(-1/2*i)*Q1"), ("[Y, S2]", "(-1/2*i)*S1")]
        );
        assert!(y.iter().all(|e| !e.pass));
        let amb: Vec<_> = r.ambiguous.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        assert_eq!(amb, vec![("[K, Q1]", "S1"), ("[K, S1]", "0"), ("[K, Q2]", "S2"), ("[K, S2]", "0")]);
        assert!(r.antisymmetric && r.jacobi && r.basis_change_consistent);
        assert_eq!(r.half_normalization_q1q1, "-i*dz");
    }

    #[test]
    fn integrability() {
        let d = odd_ansatz();
        let raw = integrability_conditions(&d).unwrap();
        let printed = printed_integrability_conditions(d.ctx());
        for p in &printed {
            assert!(raw.contains(p), "{}", p.render());
        }
        // The θ₁∂_{θ₁} and θ₂∂_{θ₂} coefficients of D² separately give α₁α₆ + α₄α₇ and α₂α₅ + α₃α₈.
        let a = |k: usize| param(d.ctx(), k - 1);
        let split = [&(&a(1) * &a(6)) + &(&a(4) * &a(7)), &(&a(2) * &a(5)) + &(&a(3) * &a(8))];
        for p in &split {
            assert!(raw.contains(p), "{}", p.render());
        }
        assert_eq!(raw.len(), 7);
        assert!(!same_poly_span(&raw, &printed));
        let mut with_split = printed.clone();
        with_split.extend(split);
        assert!(!same_poly_span(&raw, &with_split));
    }

    #[test]
    fn families() {
        let r = check_families().unwrap();
        assert!(r.d1_squared_zero && r.d2_squared_zero);
        let got: Vec<_> = r.coefficients.iter().map(|c| c.computed.clone()).collect();
        assert_eq!(got, vec!["2*a1*b1", "2*a2*b1", "2*a1*b2", "2*a2*b2"]);
        let printed: Vec<_> = r.coefficients.iter().map(|c| c.printed.clone()).collect();
        assert_eq!(printed[3], "2*b1*b2");
        assert!(!r.matches_printed());
    }

    #[test]
    fn flat_pair_frame() {
        let (d01, d02) = flat_pair();
        let samples: Vec<Scalar> = [-2, 0, 1, 3].iter().map(|&k| Scalar::from_int(k)).collect();
        let r = check_srs_pair(&d01, &d02, &samples, &samples).unwrap();
        assert!(r.d1_integrable && r.d2_integrable);
        assert_eq!(r.anticommutator, "2*dz");
        assert!(r.frame.iter().filter(|s| s.chart == "U").all(|s| s.invertible));
        let bad: Vec<_> = r.failures().map(|s| (s.chart.clone(), s.point.clone())).collect();
        assert_eq!(bad, vec![("V".to_string(), Scalar::zero())]);
    }

    #[test]
    fn structure_constants_reject_non_closed() {
        let u = VarContext::u_chart(2);
        let b = SuperLieBasis::new(vec![
            ("dz".into(), SuperDerivation::d(&u, Var::Even(0))),
            ("z2dz".into(), SuperDerivation::basic(SuperPolynomial::monomial(&u, Scalar::one(), &[2], &[]), Var::Even(0)).unwrap()),
        ])
        .unwrap();
        assert!(matches!(structure_constants(&b), Err(Error::NotClosed { .. })));
    }
}
