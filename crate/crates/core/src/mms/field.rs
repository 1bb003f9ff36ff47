//! Finite fields of order `q ≡ 1 (mod 4)`.
//!
//! Elements are the integers `0..q`. For an extension of `GF(p)` the element
//! with coefficient vector `(c_0, …, c_{n-1})` (constant term first) is
//! `Σ c_i p^i`, so canonical order is numeric order on these indices.

use std::fmt;

use crate::error::{Error, Result};

/// Largest accepted field order; arithmetic is table driven.
pub const MAX_FIELD_ORDER: usize = 1024;

pub type Elem = usize;

#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    q: usize,
    p: usize,
    degree: usize,
    modulus: Option<Vec<usize>>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    z: Elem,
    squares: Vec<Elem>,
    is_square: Vec<bool>,
    w: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("modulus", &self.modulus)
            .field("z", &self.z)
            .field("w", &self.w)
            .finish_non_exhaustive()
    }
}

fn prime_power(q: usize) -> Option<(usize, usize)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut degree = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        degree += 1;
    }
    (rest == 1).then_some((p, degree))
}

fn digits(mut e: usize, p: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let c = e % p;
            e /= p;
            c
        })
        .collect()
}

fn undigits(coeffs: &[usize], p: usize) -> usize {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two coefficient vectors reduced modulo a monic polynomial.
fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let n = modulus.len() - 1;
    let mut prod = vec![0usize; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (n..2 * n).rev() {
        let lead = prod[deg];
        if lead != 0 {
            for (k, &m) in modulus.iter().enumerate().take(n) {
                let slot = deg - n + k;
                prod[slot] = (prod[slot] + lead * (p - m)) % p;
            }
            prod[deg] = 0;
        }
    }
    prod.truncate(n);
    prod
}

impl Field {
    /// Prime field `GF(q)`, or `GF(p^n)` modulo `modulus` (monic, constant
    /// term first, length `n + 1`).
    pub fn new(q: usize, modulus: Option<&[usize]>) -> Result<Field> {
        let bad = |reason: &str| Error::BadOrder {
            q: q as u64,
            reason: reason.to_string(),
        };
        if q % 4 != 1 {
            return Err(bad("order must be congruent to 1 mod 4"));
        }
        if q > MAX_FIELD_ORDER {
            return Err(bad(&format!("order above the supported maximum {MAX_FIELD_ORDER}")));
        }
        let (p, degree) = prime_power(q).ok_or_else(|| bad("not a prime power"))?;
        let modulus = match (degree, modulus) {
            (1, None) => None,
            (1, Some(_)) => return Err(bad("prime order takes no polynomial")),
            (_, None) => return Err(bad("prime-power order needs an irreducible polynomial")),
            (n, Some(m)) => {
                if m.len() != n + 1 || m[n] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(bad(&format!(
                        "polynomial must be monic of degree {n} with coefficients below {p}"
                    )));
                }
                Some(m.to_vec())
            }
        };

        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let all_digits: Vec<Vec<usize>> = (0..q).map(|e| digits(e, p, degree)).collect();
        for a in 0..q {
            for b in 0..q {
                let (s, m) = match &modulus {
                    None => ((a + b) % p, (a * b) % p),
                    Some(md) => {
                        let da = &all_digits[a];
                        let db = &all_digits[b];
                        let sum: Vec<usize> = da.iter().zip(db).map(|(x, y)| (x + y) % p).collect();
                        let prod = poly_mul_mod(da, db, md, p);
                        (undigits(&sum, p), undigits(&prod, p))
                    }
                };
                add[a * q + b] = s as u32;
                mul[a * q + b] = m as u32;
            }
        }
        let neg: Vec<u32> = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap_or(0) as u32)
            .collect();
        let mut inv = vec![0u32; q];
        for a in 1..q {
            match (1..q).find(|&b| mul[a * q + b] == 1) {
                Some(b) => inv[a] = b as u32,
                None => {
                    let poly = modulus.clone().unwrap_or_default();
                    return Err(Error::NotIrreducible(poly.into_iter().map(|c| c as u64).collect()));
                }
            }
        }

        let mut field = Field {
            q,
            p,
            degree,
            modulus,
            add,
            mul,
            neg,
            inv,
            z: 0,
            squares: Vec::new(),
            is_square: vec![false; q],
            w: 0,
        };
        field.z = (1..q)
            .find(|&e| field.order(e) == q - 1)
            .ok_or(Error::NoPrimitiveRoot(q as u64))?;
        let z2 = field.mul(field.z, field.z);
        let mut sq = 1;
        for _ in 0..(q - 1) / 2 {
            field.is_square[sq] = true;
            sq = field.mul(sq, z2);
        }
        field.squares = (0..q).filter(|&e| field.is_square[e]).collect();
        field.w = field
            .squares
            .iter()
            .copied()
            .find(|&w| {
                let s = field.add(1, w);
                s != 0 && !field.is_square[s]
            })
            .ok_or_else(|| Error::InternalInconsistency(format!("no square w with 1 + w a non-square in GF({q})")))?;
        Ok(field)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> Option<&[usize]> {
        self.modulus.as_deref()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a * self.q + b] as Elem
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.q + b] as Elem
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a] as Elem
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a] as Elem)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// The integer `k` as a field element.
    pub fn from_int(&self, k: i64) -> Elem {
        k.rem_euclid(self.p as i64) as Elem
    }

    /// Integer value of an element of the prime subfield.
    pub fn as_int(&self, a: Elem) -> Option<u64> {
        (a < self.p).then_some(a as u64)
    }

    pub fn order(&self, a: Elem) -> usize {
        if a == 0 {
            return 0;
        }
        let mut k = 1;
        let mut x = a;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Smallest primitive root.
    pub fn z(&self) -> Elem {
        self.z
    }

    /// Nonzero squares in canonical order.
    pub fn squares(&self) -> &[Elem] {
        &self.squares
    }

    pub fn is_square(&self, a: Elem) -> bool {
        self.is_square[a]
    }

    /// Smallest square `w` with `1 + w` a non-square.
    pub fn w(&self) -> Elem {
        self.w
    }

    pub fn coefficients(&self, a: Elem) -> Vec<usize> {
        digits(a, self.p, self.degree)
    }

    pub fn display(&self, a: Elem) -> String {
        if self.degree == 1 {
            a.to_string()
        } else {
            let c: Vec<String> = self.coefficients(a).iter().map(usize::to_string).collect();
            format!("[{}]", c.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf5() {
        let f = Field::new(5, None).unwrap();
        assert_eq!(f.z(), 2);
        assert_eq!(f.squares(), &[1, 4]);
        assert_eq!(f.w(), 1);
        assert_eq!(f.neg(1), 4);
        assert_eq!(f.inv(2), Some(3));
    }

    #[test]
    fn gf13_squares() {
        let f = Field::new(13, None).unwrap();
        assert_eq!(f.squares(), &[1, 3, 4, 9, 10, 12]);
        assert!(f.is_square(f.w()));
        assert!(!f.is_square(f.add(1, f.w())));
    }

    #[test]
    fn rejected_orders() {
        assert!(matches!(Field::new(7, None), Err(Error::BadOrder { q: 7, .. })));
        assert!(matches!(Field::new(21, None), Err(Error::BadOrder { .. })));
        assert!(matches!(Field::new(9, None), Err(Error::BadOrder { .. })));
    }

    #[test]
    fn gf9_extension() {
        // x^2 + 1 is irreducible over GF(3).
        let f = Field::new(9, Some(&[1, 0, 1])).unwrap();
        let x = 3;
        assert_eq!(f.mul(x, x), f.neg(1));
        assert_eq!(f.order(f.z()), 8);
        assert_eq!(f.squares().len(), 4);
        assert_eq!(f.display(x), "[0,1]");
        // x^2 + 2 = (x + 1)(x + 2) over GF(3).
        assert!(matches!(Field::new(9, Some(&[2, 0, 1])), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn field_axioms_gf25() {
        // x^2 + x + 2 is irreducible over GF(5).
        let f = Field::new(25, Some(&[2, 1, 1])).unwrap();
        for a in 0..25 {
            for b in 0..25 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in [0, 1, 7, 24] {
                    let lhs = f.mul(a, f.add(b, c));
                    assert_eq!(lhs, f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}
