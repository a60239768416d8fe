use num_traits::{One, Zero};

use super::{Parity, SuperPolynomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `exp(f) = Σ f^k / k!` for even nilpotent `f`; the series stops once `f^k = 0`.
pub fn super_exp(f: &SuperPolynomial) -> Result<SuperPolynomial> {
    if f.parity() != Some(Parity::Even) {
        return Err(Error::Domain(format!("exp needs an even argument, got {f}")));
    }
    if !f.is_nilpotent() {
        return Err(Error::Domain(format!("exp needs a nilpotent argument, got {f}")));
    }
    let mut acc = SuperPolynomial::one(f.ctx());
    let mut power = SuperPolynomial::one(f.ctx());
    let mut k = 0i64;
    loop {
        k += 1;
        power = (&power * f).scale(&Scalar::from_frac(1, k));
        if power.is_zero() {
            return Ok(acc);
        }
        acc = &acc + &power;
    }
}

/// Splits an even unit `g = c(1 + n)` into `c` and `log(1 + n) = Σ (−1)^k n^{k+1}/(k+1)`.
pub fn super_log(g: &SuperPolynomial) -> Result<(Scalar, SuperPolynomial)> {
    if g.parity() != Some(Parity::Even) {
        return Err(Error::Domain(format!("log needs an even argument, got {g}")));
    }
    let reduced = g.reduced_part();
    let c = g.constant_term();
    if c.is_zero() || reduced.len() != 1 {
        return Err(Error::Domain(format!("log needs a nonzero constant reduced part, got {g}")));
    }
    let n = &g.scale(&c.inv()?) - &SuperPolynomial::one(g.ctx());
    let mut acc = SuperPolynomial::zero(g.ctx());
    let mut power = SuperPolynomial::one(g.ctx());
    let mut k = 0i64;
    loop {
        k += 1;
        power = &power * &n;
        if power.is_zero() {
            return Ok((c, acc));
        }
        let sign = if k % 2 == 1 { Scalar::one() } else { -Scalar::one() };
        acc = &acc + &power.scale(&(sign * Scalar::from_frac(1, k)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::{SuperMonomial, VarContext};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn mono(ctx: &Arc<VarContext>, e: i32, odd: &[usize]) -> SuperPolynomial {
        SuperPolynomial::monomial(ctx, Scalar::one(), &[e], odd)
    }

    #[test]
    fn small_cases() {
        let c = VarContext::v_chart(4);
        assert_eq!(super_exp(&SuperPolynomial::zero(&c)).unwrap(), SuperPolynomial::one(&c));
        let p12 = mono(&c, 0, &[0, 1]);
        assert_eq!(super_exp(&p12).unwrap(), &SuperPolynomial::one(&c) + &p12);
        let f = &mono(&c, -1, &[0, 1]) + &mono(&c, 0, &[2, 3]);
        let expected = &(&SuperPolynomial::one(&c) + &f) + &mono(&c, -1, &[0, 1, 2, 3]);
        assert_eq!(super_exp(&f).unwrap(), expected);
        let (u, l) = super_log(&SuperPolynomial::constant(&c, Scalar::from_int(2))).unwrap();
        assert_eq!((u, l), (Scalar::from_int(2), SuperPolynomial::zero(&c)));
        let (u, l) = super_log(&(&SuperPolynomial::one(&c) + &p12)).unwrap();
        assert_eq!((u, l), (Scalar::one(), p12));
    }

    #[test]
    fn log_series_with_square_term() {
        // n = a + b with a = ψ₁ψ₂/w, b = ψ₁ψ₂ψ₃ψ₄/w²: n² = 0, so log(1+n) = n.
        let c = VarContext::v_chart(4);
        let n = &mono(&c, -1, &[0, 1]) + &mono(&c, -2, &[0, 1, 2, 3]);
        let (u, l) = super_log(&(&SuperPolynomial::one(&c) + &n)).unwrap();
        assert_eq!(u, Scalar::one());
        assert_eq!(l, n);
        // n = a + a' with a a' ≠ 0: log = n − n²/2.
        let n = &mono(&c, -1, &[0, 1]) + &mono(&c, 0, &[2, 3]);
        let (_, l) = super_log(&(&SuperPolynomial::one(&c) + &n)).unwrap();
        let expected = &n - &(&n * &n).scale(&Scalar::from_frac(1, 2));
        assert_eq!(l, expected);
        assert_eq!(super_exp(&l).unwrap(), &SuperPolynomial::one(&c) + &n);
    }

    #[test]
    fn domain_errors() {
        let c = VarContext::v_chart(2);
        assert!(matches!(super_exp(&SuperPolynomial::one(&c)), Err(Error::Domain(_))));
        assert!(matches!(super_exp(&mono(&c, 0, &[0])), Err(Error::Domain(_))));
        assert!(matches!(super_log(&mono(&c, 0, &[0, 1])), Err(Error::Domain(_))));
        assert!(matches!(super_log(&mono(&c, 1, &[])), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn exp_log_round_trip(ts in prop::collection::vec((-3i32..4, 1u64..64, -4i64..5), 0..8)) {
            let c = VarContext::v_chart(6);
            let n = SuperPolynomial::from_terms(&c, ts.into_iter()
                .filter(|(_, mask, _)| mask.count_ones() % 2 == 0)
                .map(|(e, mask, k)| (SuperMonomial { exps: vec![e], mask }, Scalar::from_frac(k, 3))));
            let g = super_exp(&n).unwrap();
            let (u, l) = super_log(&g).unwrap();
            prop_assert_eq!(u, Scalar::one());
            prop_assert_eq!(&l, &n);
        }
    }
}
