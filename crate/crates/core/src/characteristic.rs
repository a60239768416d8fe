//! Berezinian, super first Chern class, de Rham dimensions and the topological
//! twists of `P^{1|2}`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sheaf::binom;
use crate::superalgebra::{ChartSubstitution, Parity, SuperPolynomial, VarContext};
use crate::superlie::flat_pair;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacteristicReport {
    pub n: usize,
    pub m: usize,
    /// `d` with `Ber(Ω¹) ≅ O(d)`.
    pub berezinian_twist: i64,
    /// The same twist from the dual Euler sequence.
    pub berezinian_twist_euler: i64,
    pub super_c1: i64,
    pub calabi_yau: bool,
    /// `H_dR^{i;j}` dimensions keyed by `(i, j)`, `0 ≤ i ≤ 2n`, `0 ≤ j ≤ m`.
    #[serde(serialize_with = "serialize_pairs")]
    pub de_rham: BTreeMap<(usize, usize), u64>,
}

fn serialize_pairs<S: serde::Serializer>(map: &BTreeMap<(usize, usize), u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (&(i, j), &d) in map {
        seq.serialize_element(&(i, j, d))?;
    }
    seq.end()
}

impl CharacteristicReport {
    pub fn routes_agree(&self) -> bool {
        self.berezinian_twist == self.berezinian_twist_euler
    }

    pub fn de_rham_dim(&self, i: usize, j: usize) -> u64 {
        self.de_rham.get(&(i, j)).copied().unwrap_or(0)
    }
}

/// Degree of the Berezinian of a split bundle `⊕ O(a)` with the given parities.
pub fn ber_degree(summands: &[(i64, Parity)]) -> i64 {
    summands.iter().map(|&(a, p)| if p.is_odd() { -a } else { a }).sum()
}

/// `K_{Pⁿ} ⊗ (det F)^{-1}` with `F = O(−1)^{⊕m}`.
fn twist_projected(n: usize, m: usize) -> i64 {
    let canonical = ber_degree(&vec![(-1, Parity::Even); n + 1]);
    let det_f = ber_degree(&vec![(-1, Parity::Even); m]);
    canonical - det_f
}

/// `Ber(O(−1)^{⊕ n+1|m}) ⊗ Ber(O)^{-1}`.
fn twist_euler(n: usize, m: usize) -> i64 {
    let mut middle = vec![(-1, Parity::Even); n + 1];
    middle.extend(vec![(-1, Parity::Odd); m]);
    ber_degree(&middle) - ber_degree(&[(0, Parity::Even)])
}

pub fn characteristic_report(n: usize, m: usize) -> Result<CharacteristicReport> {
    if n == 0 {
        return Err(Error::Domain("need n ≥ 1".into()));
    }
    let berezinian_twist = twist_projected(n, m);
    let berezinian_twist_euler = twist_euler(n, m);
    let super_c1 = -(ber_degree(&vec![(-1, Parity::Even); n + 1]) - ber_degree(&vec![(-1, Parity::Even); m]));
    let mut de_rham = BTreeMap::new();
    for i in 0..=2 * n {
        for j in 0..=m {
            de_rham.insert((i, j), if i % 2 == 0 { binom(m as i64, j as i64) } else { 0 });
        }
    }
    Ok(CharacteristicReport { n, m, berezinian_twist, berezinian_twist_euler, super_c1, calabi_yau: berezinian_twist == 0, de_rham })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TwistSign {
    Plus,
    Minus,
}

/// Twists of `(D₊, D₋)` to `(ΠO(a), ΠO(b))`.
pub fn topological_twist(sign: TwistSign) -> (i64, i64) {
    match sign {
        TwistSign::Plus => (0, -2),
        TwistSign::Minus => (-2, 0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    pub plus: (i64, i64),
    pub minus: (i64, i64),
    /// `θ₁ ↔ θ₂` exchanges the two structure distributions.
    pub swap_exchanges_distributions: bool,
    pub isomorphic: bool,
}

pub fn twist_report() -> Result<TwistReport> {
    let u = VarContext::u_chart(2);
    let swap = ChartSubstitution::from_polys(
        &u,
        &u,
        &[SuperPolynomial::even_var(&u, 0)],
        &[SuperPolynomial::monomial(&u, Scalar::from_int(1), &[0], &[1]), SuperPolynomial::monomial(&u, Scalar::from_int(1), &[0], &[0])],
    )?;
    let (d1, d2) = flat_pair();
    let swap_exchanges_distributions = swap.pushforward(&d1)? == d2 && swap.pushforward(&d2)? == d1;
    let plus = topological_twist(TwistSign::Plus);
    let minus = topological_twist(TwistSign::Minus);
    Ok(TwistReport { plus, minus, swap_exchanges_distributions, isomorphic: swap_exchanges_distributions && (plus.1, plus.0) == minus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = characteristic_report(3, 4).unwrap();
        assert!(r.calabi_yau && r.berezinian_twist == 0);
        let r = characteristic_report(1, 2).unwrap();
        assert!(r.calabi_yau && r.super_c1 == 0);
        let r = characteristic_report(3, 0).unwrap();
        assert_eq!((r.berezinian_twist, r.super_c1), (-4, 4));
        assert_eq!(characteristic_report(2, 3).unwrap().de_rham_dim(2, 1), 3);
        assert_eq!(characteristic_report(2, 3).unwrap().de_rham_dim(3, 1), 0);
        assert!(characteristic_report(0, 1).is_err());
    }

    #[test]
    fn grid() {
        for n in 1..=6 {
            for m in 0..=8 {
                let r = characteristic_report(n, m).unwrap();
                assert!(r.routes_agree());
                assert_eq!(r.berezinian_twist, m as i64 - n as i64 - 1);
                assert_eq!(r.super_c1, -r.berezinian_twist);
                assert_eq!(r.calabi_yau, m == n + 1);
                for i in 0..=2 * n {
                    let row: u64 = (0..=m).map(|j| r.de_rham_dim(i, j)).sum();
                    assert_eq!(row, if i % 2 == 0 { 1 << m } else { 0 });
                }
            }
            assert_eq!(characteristic_report(n, 0).unwrap().super_c1, n as i64 + 1);
        }
    }

    #[test]
    fn twists() {
        let t = twist_report().unwrap();
        assert_eq!((t.plus, t.minus), ((0, -2), (-2, 0)));
        assert!(t.swap_exchanges_distributions && t.isomorphic);
    }
}
