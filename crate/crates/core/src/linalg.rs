//! Exact linear algebra over `Q` and `Q(ζ₈)`.
//!
//! Vectors are sparse maps from column index to coefficient. The column index
//! order doubles as the pivot preference: lower indices are eliminated first,
//! so callers choose which coordinates end up as free (non-pivot) ones.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};

/// Exact field used by the elimination routines.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Panics on zero; callers only invert pivots.
    fn inv_ref(&self) -> Self;
    fn from_scalar(s: &Scalar) -> Option<Self>;
    fn to_scalar(&self) -> Scalar;
}

impl Field for Rational {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Self {
        self.recip()
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        s.as_rational().cloned()
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::from_rational(self.clone())
    }
}

impl Field for Scalar {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.clone())
    }
    fn to_scalar(&self) -> Scalar {
        self.clone()
    }
}

pub type SparseVec<F> = BTreeMap<usize, F>;

/// `v += c * w`, dropping entries that cancel.
pub fn axpy<F: Field>(v: &mut SparseVec<F>, c: &F, w: &SparseVec<F>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let t = c.mul_ref(x);
        match v.get_mut(k) {
            Some(e) => {
                *e = e.add_ref(&t);
                if e.is_zero() {
                    v.remove(k);
                }
            }
            None => {
                v.insert(*k, t);
            }
        }
    }
}

pub fn scale<F: Field>(v: &SparseVec<F>, c: &F) -> SparseVec<F> {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(k, x)| (*k, c.mul_ref(x))).collect()
}

/// Semi-echelon basis of a subspace with unique normal forms.
///
/// Every stored row has coefficient 1 at its pivot (its smallest column) and
/// no two rows share a pivot. [`Echelon::reduce`] returns the unique element
/// of `v + span` vanishing on all pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    rows: BTreeMap<usize, SparseVec<F>>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new() }
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseVec<F>)> {
        self.rows.iter()
    }

    pub fn reduce(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut v = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(k, _)| *k).find(|k| self.rows.contains_key(k));
            let Some(col) = next else { break };
            let c = v[&col].neg_ref();
            axpy(&mut v, &c, &self.rows[&col]);
            cursor = col + 1;
        }
        v
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec<F>) -> bool {
        let r = self.reduce(v);
        self.insert_reduced(r)
    }

    fn insert_reduced(&mut self, r: SparseVec<F>) -> bool {
        let Some((&lead, c)) = r.iter().next() else {
            return false;
        };
        let inv = c.inv_ref();
        let r = scale(&r, &inv);
        self.rows.insert(lead, r);
        true
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Fully reduced rows (reduced row echelon form), sorted by pivot.
    pub fn rref_rows(&self) -> Vec<SparseVec<F>> {
        let mut out: BTreeMap<usize, SparseVec<F>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            for (&q, other) in &out {
                if let Some(c) = r.get(&q).cloned() {
                    axpy(&mut r, &c.neg_ref(), other);
                }
            }
            out.insert(p, r);
        }
        out.into_values().collect()
    }
}

/// Kernel and image data of a linear map given by the images of basis vectors.
#[derive(Clone, Debug)]
pub struct MapDecomposition<F: Field> {
    pub image: Echelon<F>,
    /// Kernel basis, as coordinate vectors in the domain basis.
    pub kernel: Vec<SparseVec<F>>,
}

/// Column-by-column elimination tracking combinations, so dependent columns
/// yield kernel vectors directly.
pub fn decompose_map<F: Field>(columns: &[SparseVec<F>]) -> MapDecomposition<F> {
    // Each pivot row carries the domain combination producing it.
    let mut rows: BTreeMap<usize, (SparseVec<F>, SparseVec<F>)> = BTreeMap::new();
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let mut comb: SparseVec<F> = SparseVec::new();
        comb.insert(j, F::one());
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(k, _)| *k).find(|k| rows.contains_key(k));
            let Some(p) = next else { break };
            let c = v[&p].neg_ref();
            let (row, rc) = &rows[&p];
            axpy(&mut v, &c, row);
            axpy(&mut comb, &c, rc);
            cursor = p + 1;
        }
        match v.iter().next() {
            None => kernel.push(comb),
            Some((&lead, c)) => {
                let inv = c.inv_ref();
                rows.insert(lead, (scale(&v, &inv), scale(&comb, &inv)));
            }
        }
    }
    let image = Echelon {
        rows: rows.into_iter().map(|(k, (r, _))| (k, r)).collect(),
    };
    MapDecomposition { image, kernel }
}

pub fn rank<F: Field>(vectors: &[SparseVec<F>]) -> usize {
    let mut e = Echelon::new();
    vectors.iter().filter(|v| e.insert(v)).count()
}

/// Rank of a dense integer matrix by fraction-free (Bareiss) elimination.
///
/// Every intermediate entry is a minor of the input, so the division at each
/// step is exact and entries stay integral.
pub fn bareiss_rank(matrix: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].abs().max(BigInt::one()) * a[r][c].signum();
        r += 1;
    }
    r
}

/// Clears denominators row by row so a rational matrix can go through [`bareiss_rank`].
pub fn integerize_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn sv(entries: &[(usize, i64)]) -> SparseVec<Rational> {
        entries.iter().filter(|(_, x)| *x != 0).map(|&(k, x)| (k, int(x))).collect()
    }

    #[test]
    fn echelon_normal_form_is_unique() {
        let mut e = Echelon::new();
        assert!(e.insert(&sv(&[(0, 1), (1, 1)])));
        assert!(e.insert(&sv(&[(1, 1), (2, 1)])));
        assert!(!e.insert(&sv(&[(0, 1), (2, -1)])));
        assert_eq!(e.rank(), 2);
        let r = e.reduce(&sv(&[(2, 3)]));
        assert_eq!(r, sv(&[(2, 3)]));
        let r = e.reduce(&sv(&[(0, 1)]));
        assert_eq!(r, sv(&[(2, 1)]));
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let cols = vec![sv(&[(0, 1), (1, 2)]), sv(&[(0, 2), (1, 4)]), sv(&[(1, 1)])];
        let d = decompose_map(&cols);
        assert_eq!(d.image.rank(), 2);
        assert_eq!(d.kernel.len(), 1);
        let k = &d.kernel[0];
        let mut img: SparseVec<Rational> = SparseVec::new();
        for (j, c) in k {
            axpy(&mut img, c, &cols[*j]);
        }
        assert!(img.is_empty());
    }

    #[test]
    fn bareiss_small() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![2.into(), 4.into(), 6.into()],
            vec![1.into(), 2.into(), 3.into()],
            vec![0.into(), 1.into(), 1.into()],
        ];
        assert_eq!(bareiss_rank(&m), 2);
        let ints = integerize_rows(&[vec![rat(1, 2), rat(1, 3)]]);
        assert_eq!(ints, vec![vec![BigInt::from(3), BigInt::from(2)]]);
    }

    proptest! {
        #[test]
        fn bareiss_agrees_with_field_elimination(
            m in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..6)
        ) {
            let dense: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let sparse: Vec<SparseVec<Rational>> = m.iter().map(|r| {
                r.iter().enumerate().filter(|(_, x)| **x != 0).map(|(k, &x)| (k, int(x))).collect()
            }).collect();
            prop_assert_eq!(bareiss_rank(&dense), rank(&sparse));
        }
    }
}
