//! Exponents with p-power denominators.
//!
//! Variable exponents live in Z[1/p]: a nonnegative value `num / p^dlog`,
//! kept normalized so that `p` does not divide `num` unless `dlog == 0`.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// One exponent, `num / p^dlog`, normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PExp {
    pub num: u64,
    pub dlog: u32,
}

impl PExp {
    pub const ZERO: PExp = PExp { num: 0, dlog: 0 };

    pub fn int(n: u64) -> Self {
        PExp { num: n, dlog: 0 }
    }

    /// Builds `num / p^dlog` and normalizes.
    pub fn new(p: u64, num: u64, dlog: u32) -> Self {
        let mut e = PExp { num, dlog };
        e.normalize(p);
        e
    }

    /// Builds from an arbitrary fraction; errors unless the reduced
    /// denominator is a power of `p`.
    pub fn from_fraction(p: u64, num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("exponent with zero denominator".into()));
        }
        let g = gcd_u64(num, den);
        let (num, mut den) = (num / g, den / g);
        let mut dlog = 0u32;
        while den > 1 {
            if den % p != 0 {
                return Err(Error::InvalidInput(format!(
                    "exponent denominator {den} is not a power of the characteristic {p}"
                )));
            }
            den /= p;
            dlog += 1;
        }
        Ok(PExp { num, dlog })
    }

    fn normalize(&mut self, p: u64) {
        if self.num == 0 {
            self.dlog = 0;
            return;
        }
        while self.dlog > 0 && self.num % p == 0 {
            self.num /= p;
            self.dlog -= 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.dlog == 0
    }

    /// The integer value, if integral.
    pub fn as_integer(&self) -> Option<u64> {
        self.is_integer().then_some(self.num)
    }

    pub fn add(&self, other: &PExp, p: u64) -> PExp {
        let d = self.dlog.max(other.dlog);
        let a = self.num as u128 * ppow(p, d - self.dlog);
        let b = other.num as u128 * ppow(p, d - other.dlog);
        let mut e = PExp { num: u128_to_u64(a + b), dlog: d };
        e.normalize(p);
        e
    }

    /// `self - other`; errors if the result would be negative.
    pub fn sub(&self, other: &PExp, p: u64) -> Result<PExp> {
        let d = self.dlog.max(other.dlog);
        let a = self.num as u128 * ppow(p, d - self.dlog);
        let b = other.num as u128 * ppow(p, d - other.dlog);
        if b > a {
            return Err(Error::InvalidInput("negative exponent".into()));
        }
        let mut e = PExp { num: u128_to_u64(a - b), dlog: d };
        e.normalize(p);
        Ok(e)
    }

    /// Multiplies by `p^e` (the Frobenius action on exponents).
    pub fn mul_ppow(&self, p: u64, e: u32) -> PExp {
        if self.num == 0 {
            return PExp::ZERO;
        }
        if e >= self.dlog {
            let extra = ppow(p, e - self.dlog);
            PExp { num: u128_to_u64(self.num as u128 * extra), dlog: 0 }
        } else {
            PExp { num: self.num, dlog: self.dlog - e }
        }
    }

    /// Divides by `p^e`.
    pub fn div_ppow(&self, p: u64, e: u32) -> PExp {
        let mut r = PExp { num: self.num, dlog: self.dlog + e };
        r.normalize(p);
        r
    }

    pub fn mul_int(&self, p: u64, n: u64) -> PExp {
        let mut e = PExp { num: u128_to_u64(self.num as u128 * n as u128), dlog: self.dlog };
        e.normalize(p);
        e
    }

    pub fn cmp_p(&self, other: &PExp, p: u64) -> std::cmp::Ordering {
        let d = self.dlog.max(other.dlog);
        let a = self.num as u128 * ppow(p, d - self.dlog);
        let b = other.num as u128 * ppow(p, d - other.dlog);
        a.cmp(&b)
    }

    /// Exact rational value.
    pub fn to_ratio(&self, p: u64) -> Ratio<i64> {
        let den = ppow(p, self.dlog);
        Ratio::new(self.num as i64, den as i64)
    }
}

fn u128_to_u64(v: u128) -> u64 {
    u64::try_from(v).expect("exponent overflow")
}

pub(crate) fn ppow(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Checks that a rational (used for grading weights) has a p-power
/// denominator, so weighted degrees stay in Z[1/p].
pub fn ratio_has_p_power_denominator(r: &Ratio<i64>, p: u64) -> bool {
    let mut den = *r.denom();
    if den < 0 {
        den = -den;
    }
    let mut d = den as u64;
    while d > 1 {
        if d % p != 0 {
            return false;
        }
        d /= p;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_strips_p_factors() {
        let e = PExp::new(2, 4, 2);
        assert_eq!(e, PExp::int(1));
        let e = PExp::new(3, 6, 1);
        assert_eq!(e, PExp { num: 2, dlog: 0 });
    }

    #[test]
    fn from_fraction_rejects_bad_denominators() {
        assert!(PExp::from_fraction(2, 3, 2).is_ok());
        assert!(PExp::from_fraction(2, 1, 6).is_err());
        assert_eq!(PExp::from_fraction(2, 2, 4).unwrap(), PExp { num: 1, dlog: 1 });
    }

    #[test]
    fn add_and_frobenius_round_trip() {
        let p = 2;
        let a = PExp::from_fraction(p, 3, 2).unwrap();
        let b = PExp::from_fraction(p, 1, 4).unwrap();
        let s = a.add(&b, p);
        assert_eq!(s, PExp::from_fraction(p, 7, 4).unwrap());
        assert_eq!(s.mul_ppow(p, 2), PExp::int(7));
        assert_eq!(PExp::int(7).div_ppow(p, 2), s);
    }

    #[test]
    fn comparison_is_exact() {
        let p = 3;
        let a = PExp::from_fraction(p, 2, 3).unwrap();
        let b = PExp::from_fraction(p, 5, 9).unwrap();
        assert_eq!(a.cmp_p(&b, p), std::cmp::Ordering::Greater);
    }
}
