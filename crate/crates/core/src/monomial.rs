//! Monomials with Z[1/p] exponents and the supported term orders.

use num_rational::Ratio;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exponent::PExp;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub exps: SmallVec<[PExp; 6]>,
}

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(PExp::ZERO, nvars) }
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut m = Self::unit(nvars);
        m.exps[i] = PExp::int(1);
        m
    }

    pub fn var_pow(i: usize, e: PExp, nvars: usize) -> Self {
        let mut m = Self::unit(nvars);
        m.exps[i] = e;
        m
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|e| e.is_zero())
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Self, p: u64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.add(b, p))
            .collect();
        Monomial { exps }
    }

    pub fn divides(&self, other: &Self, p: u64) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| a.cmp_p(b, p) != std::cmp::Ordering::Greater)
    }

    /// `other / self`; errors if not divisible.
    pub fn div(&self, other: &Self, p: u64) -> Result<Self> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in other.exps.iter().zip(&self.exps) {
            exps.push(a.sub(b, p)?);
        }
        Ok(Monomial { exps })
    }

    pub fn lcm(&self, other: &Self, p: u64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| {
                if a.cmp_p(b, p) == std::cmp::Ordering::Less {
                    *b
                } else {
                    *a
                }
            })
            .collect();
        Monomial { exps }
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| a.is_zero() || b.is_zero())
    }

    /// Multiplies every exponent by p^e (Frobenius).
    pub fn frobenius(&self, p: u64, e: u32) -> Self {
        Monomial { exps: self.exps.iter().map(|x| x.mul_ppow(p, e)).collect() }
    }

    pub fn pow_int(&self, n: u64, p: u64) -> Self {
        Monomial { exps: self.exps.iter().map(|x| x.mul_int(p, n)).collect() }
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.exps.iter().all(|e| e.is_integer())
    }

    pub fn total_degree(&self, p: u64) -> Ratio<i64> {
        self.exps
            .iter()
            .map(|e| e.to_ratio(p))
            .fold(Ratio::from_integer(0), |a, b| a + b)
    }

    pub fn weighted_degree(&self, p: u64, weights: Option<&[Ratio<i64>]>) -> Ratio<i64> {
        match weights {
            None => self.total_degree(p),
            Some(w) => self
                .exps
                .iter()
                .zip(w)
                .map(|(e, wi)| e.to_ratio(p) * wi)
                .fold(Ratio::from_integer(0), |a, b| a + b),
        }
    }
}

/// Supported term orders. `Elim(k)` compares the first `k` variables by
/// grevlex, breaking ties by grevlex on the remainder; a basis under it
/// eliminates the leading block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderSpec {
    GrevLex,
    Lex,
    Elim(usize),
}

impl OrderSpec {
    pub fn compare(&self, a: &Monomial, b: &Monomial, p: u64) -> std::cmp::Ordering {
        match self {
            OrderSpec::GrevLex => grevlex_slice(&a.exps, &b.exps, p),
            OrderSpec::Lex => lex_slice(&a.exps, &b.exps, p),
            OrderSpec::Elim(k) => {
                let k = (*k).min(a.exps.len());
                grevlex_slice(&a.exps[..k], &b.exps[..k], p)
                    .then_with(|| grevlex_slice(&a.exps[k..], &b.exps[k..], p))
            }
        }
    }
}

fn total_cmp(a: &[PExp], b: &[PExp], p: u64) -> std::cmp::Ordering {
    // compare sums of fractions with p-power denominators exactly
    let da = a.iter().map(|e| e.dlog).max().unwrap_or(0);
    let db = b.iter().map(|e| e.dlog).max().unwrap_or(0);
    let d = da.max(db);
    let sum = |v: &[PExp]| -> u128 {
        v.iter()
            .map(|e| e.num as u128 * crate::exponent::ppow(p, d - e.dlog))
            .sum()
    };
    sum(a).cmp(&sum(b))
}

fn grevlex_slice(a: &[PExp], b: &[PExp], p: u64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match total_cmp(a, b, p) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp_p(&b[i], p) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

fn lex_slice(a: &[PExp], b: &[PExp], p: u64) -> std::cmp::Ordering {
    for i in 0..a.len() {
        match a[i].cmp_p(&b[i], p) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

impl std::str::FromStr for OrderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "grevlex" {
            return Ok(OrderSpec::GrevLex);
        }
        if s == "lex" {
            return Ok(OrderSpec::Lex);
        }
        if let Some(rest) = s.strip_prefix("elim:") {
            let k: usize = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad order spec {s:?}")))?;
            return Ok(OrderSpec::Elim(k));
        }
        Err(Error::InvalidInput(format!("unknown order {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(exps: &[u64]) -> Monomial {
        Monomial { exps: exps.iter().map(|e| PExp::int(*e)).collect() }
    }

    #[test]
    fn grevlex_orders_the_cubics_correctly() {
        // with x > y > z: x^3 > x^2 y > x y^2 > y^3 > x^2 z > ...
        let p = 2;
        let o = OrderSpec::GrevLex;
        let seq = [m(&[3, 0, 0]), m(&[2, 1, 0]), m(&[1, 2, 0]), m(&[0, 3, 0]), m(&[2, 0, 1])];
        for w in seq.windows(2) {
            assert_eq!(o.compare(&w[0], &w[1], p), std::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn fractional_exponents_compare_exactly() {
        let p = 2;
        let o = OrderSpec::GrevLex;
        let a = Monomial {
            exps: smallvec::smallvec![PExp::from_fraction(2, 3, 2).unwrap(), PExp::ZERO],
        };
        let b = Monomial { exps: smallvec::smallvec![PExp::int(1), PExp::int(1)] };
        // 3/2 < 2 total degree
        assert_eq!(o.compare(&a, &b, p), std::cmp::Ordering::Less);
    }

    #[test]
    fn elim_order_prefers_the_leading_block() {
        let p = 3;
        let o = OrderSpec::Elim(1);
        // t > anything in the remaining block
        let t = m(&[1, 0, 0]);
        let xy5 = m(&[0, 3, 2]);
        assert_eq!(o.compare(&t, &xy5, p), std::cmp::Ordering::Greater);
    }

    #[test]
    fn division_and_lcm_agree() {
        let p = 2;
        let a = m(&[2, 1, 0]);
        let b = m(&[1, 3, 0]);
        let l = a.lcm(&b, p);
        assert_eq!(l, m(&[2, 3, 0]));
        assert!(a.divides(&l, p));
        assert!(b.divides(&l, p));
        let q = a.div(&l, p).unwrap();
        assert_eq!(q, m(&[0, 2, 0]));
    }
}
