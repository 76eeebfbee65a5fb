//! The coefficient field F_q, q = p^k, with a fixed irreducible modulus.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Describes F_{p^k}. For k > 1 elements are residues of F_p[T] modulo a
/// monic irreducible polynomial of degree k; the modulus is chosen
/// deterministically (first irreducible in lexicographic coefficient order)
/// so that sessions agree on representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: usize,
    /// Monic modulus, coefficients of T^0 .. T^k, length k+1.
    pub modulus: Vec<u64>,
    /// Printable name for the residue of T when k > 1.
    pub generator: Option<String>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        Self::new(p, 1)
    }

    pub fn new(p: u64, k: usize) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k == 0 || k > 16 {
            return Err(Error::InvalidInput(format!("extension degree {k} out of range")));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            first_irreducible(p, k)
        };
        let generator = (k > 1).then(|| "w".to_string());
        Ok(Arc::new(FieldSpec { p, k, modulus, generator }))
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn zero(&self) -> FieldScalar {
        FieldScalar { c: vec![0; self.k] }
    }

    pub fn one(&self) -> FieldScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldScalar {
        let mut c = vec![0; self.k];
        c[0] = n.rem_euclid(self.p as i64) as u64;
        FieldScalar { c }
    }

    /// The residue of T (only meaningful when k > 1).
    pub fn gen_element(&self) -> FieldScalar {
        let mut c = vec![0; self.k];
        if self.k > 1 {
            c[1] = 1;
        } else {
            // k = 1: T reduces modulo T, i.e. zero; callers guard on k.
        }
        FieldScalar { c }
    }

    /// All q elements, in a fixed order (lexicographic coordinates).
    pub fn enumerate(&self) -> Vec<FieldScalar> {
        let mut out = Vec::with_capacity(self.q() as usize);
        let mut c = vec![0u64; self.k];
        loop {
            out.push(FieldScalar { c: c.clone() });
            let mut i = 0;
            loop {
                if i == self.k {
                    return out;
                }
                c[i] += 1;
                if c[i] < self.p {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    pub fn add(&self, a: &FieldScalar, b: &FieldScalar) -> FieldScalar {
        let c = a
            .c
            .iter()
            .zip(&b.c)
            .map(|(x, y)| (x + y) % self.p)
            .collect();
        FieldScalar { c }
    }

    pub fn neg(&self, a: &FieldScalar) -> FieldScalar {
        let c = a.c.iter().map(|x| (self.p - x) % self.p).collect();
        FieldScalar { c }
    }

    pub fn sub(&self, a: &FieldScalar, b: &FieldScalar) -> FieldScalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldScalar, b: &FieldScalar) -> FieldScalar {
        if self.k == 1 {
            return FieldScalar { c: vec![a.c[0] * b.c[0] % self.p] };
        }
        let mut prod = vec![0u64; 2 * self.k - 1];
        for (i, x) in a.c.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut v: Vec<u64>) -> FieldScalar {
        // modulus is monic: T^k = -(lower part)
        for i in (self.k..v.len()).rev() {
            let c = v[i];
            if c == 0 {
                continue;
            }
            v[i] = 0;
            for j in 0..self.k {
                let m = self.modulus[j];
                if m != 0 {
                    let sub = c * m % self.p;
                    v[i - self.k + j] = (v[i - self.k + j] + self.p - sub) % self.p;
                }
            }
        }
        v.truncate(self.k);
        FieldScalar { c: v }
    }

    pub fn inv(&self, a: &FieldScalar) -> Result<FieldScalar> {
        if a.is_zero() {
            return Err(Error::InvalidInput("division by zero scalar".into()));
        }
        // q is small here; a^(q-2) is simplest and exact.
        Ok(self.pow(a, self.q() - 2))
    }

    pub fn pow(&self, a: &FieldScalar, mut e: u64) -> FieldScalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &FieldScalar) -> FieldScalar {
        self.pow(a, self.p)
    }

    /// The unique p-th root (Frobenius is bijective on a finite field).
    /// a^(p^(k-1)) raised to p gives a^(p^k) = a.
    pub fn p_th_root(&self, a: &FieldScalar) -> FieldScalar {
        self.pow(a, self.q() / self.p)
    }

    pub fn print(&self, a: &FieldScalar) -> String {
        if self.k == 1 {
            return a.c[0].to_string();
        }
        let g = self.generator.as_deref().unwrap_or("w");
        let mut parts = Vec::new();
        for (i, c) in a.c.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let part = match (i, *c) {
                (0, c) => c.to_string(),
                (1, 1) => g.to_string(),
                (1, c) => format!("{c}*{g}"),
                (i, 1) => format!("{g}^{i}"),
                (i, c) => format!("{c}*{g}^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            format!("({})", parts.join(" + "))
        }
    }
}

/// An element of F_q: coordinates over the power basis of the modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    pub c: Vec<u64>,
}

impl FieldScalar {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| *x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|x| *x == 0)
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.len() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// First monic irreducible of degree k over F_p in lexicographic
/// coefficient order (constant coefficient varies fastest).
fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; k]; // low coefficients; leading 1 implied
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
        let mut i = 0;
        loop {
            assert!(i < k, "no irreducible found");
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// Trial division by all monic polynomials of degree <= k/2.
fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let k = f.len() - 1;
    if f[0] == 0 {
        return false; // divisible by T
    }
    for d in 1..=(k / 2) {
        let mut div = vec![0u64; d]; // monic degree-d candidates
        loop {
            let mut g = div.clone();
            g.push(1);
            if poly_rem_is_zero(p, f, &g) {
                return false;
            }
            let mut i = 0;
            loop {
                if i == d {
                    break;
                }
                div[i] += 1;
                if div[i] < p {
                    break;
                }
                div[i] = 0;
                i += 1;
            }
            if div.iter().all(|c| *c == 0) {
                break;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u64, f: &[u64], g: &[u64]) -> bool {
    let mut r: Vec<u64> = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dg;
            for (j, gc) in g.iter().enumerate() {
                let idx = shift + j;
                let sub = lead * gc % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        while r.len() > dg && *r.last().unwrap() == 0 {
            r.pop();
        }
    }
    r.iter().all(|c| *c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_has_the_expected_modulus() {
        let f = FieldSpec::new(2, 2).unwrap();
        // T^2 + T + 1 is the unique irreducible quadratic over F_2
        assert_eq!(f.modulus, vec![1, 1, 1]);
        let w = f.gen_element();
        let w2 = f.mul(&w, &w);
        // w^2 = w + 1
        assert_eq!(w2, f.add(&w, &f.one()));
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)] {
            let f = FieldSpec::new(p, k).unwrap();
            for a in f.enumerate() {
                if a.is_zero() {
                    continue;
                }
                let inv = f.inv(&a).unwrap();
                assert!(f.mul(&a, &inv).is_one(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn frobenius_is_additive_and_bijective() {
        let f = FieldSpec::new(2, 3).unwrap();
        let elems = f.enumerate();
        for a in &elems {
            for b in &elems {
                let lhs = f.frobenius(&f.add(a, b));
                let rhs = f.add(&f.frobenius(a), &f.frobenius(b));
                assert_eq!(lhs, rhs);
            }
        }
        let mut seen: Vec<FieldScalar> = elems.iter().map(|a| f.frobenius(a)).collect();
        seen.sort_by_key(|s| s.c.clone());
        seen.dedup();
        assert_eq!(seen.len(), elems.len());
    }

    #[test]
    fn p_th_root_inverts_frobenius() {
        for (p, k) in [(2, 2), (3, 2), (5, 1)] {
            let f = FieldSpec::new(p, k).unwrap();
            for a in f.enumerate() {
                let r = f.p_th_root(&f.frobenius(&a));
                assert_eq!(r, a);
            }
        }
    }
}
