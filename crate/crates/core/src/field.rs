//! Exact arithmetic in GF(p^n) for an odd prime p.
//!
//! Elements are stored as base-p packed coordinate vectors relative to the
//! polynomial basis `1, x, ..., x^(n-1)` of `GF(p)[x] / (modulus)`. The modulus
//! is the lexicographically smallest monic irreducible of degree n, found by
//! trial division, so a given `p^n` names the same field in every run.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic must be an odd prime, got {0}")]
    BadCharacteristic(u64),
    #[error("extension degree must be positive")]
    BadDegree,
    #[error("field too large: p^n must be below 2^32")]
    TooLarge,
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed field spec {0:?}, expected \"p^n\" such as \"3^2\"")]
    BadSpec(String),
}

/// A fixed model of GF(p^n). All element operations go through this struct.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    n: u32,
    q: u64,
    /// Monic modulus, `modulus[i]` the x^i coefficient, `modulus[n] == 1`.
    modulus: Vec<u64>,
}

/// An element of GF(p^n): coordinates packed in base p, always reduced.
///
/// Equality is coordinate equality; the packing makes enumeration order and
/// map keys deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Packed base-p value; mainly useful for hashing and serialization.
    pub fn packed(&self) -> u64 {
        self.0
    }
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Remainder of polynomial division over GF(p); coefficient vectors are
/// little-endian and not required to be trimmed.
fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let deg = |c: &[u64]| c.iter().rposition(|&x| x != 0);
    let mut r: Vec<u64> = f.to_vec();
    let gd = deg(g).expect("divisor must be nonzero");
    let glead = g[gd];
    let glead_inv = mod_inv(glead, p);
    while let Some(rd) = deg(&r) {
        if rd < gd {
            break;
        }
        let factor = r[rd] * glead_inv % p;
        for (i, &gc) in g.iter().enumerate().take(gd + 1) {
            let sub = factor * gc % p;
            let idx = rd - gd + i;
            r[idx] = (r[idx] + p - sub) % p;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is a small prime; Fermat is plenty.
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.iter().rposition(|&x| x != 0).unwrap_or(0);
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // A monic polynomial of degree d is reducible iff some monic polynomial
    // of degree 1..=d/2 divides it.
    for gd in 1..=deg / 2 {
        let count = p.pow(gd as u32);
        for w in 0..count {
            let mut g = vec![0u64; gd + 1];
            let mut v = w;
            for c in g.iter_mut().take(gd) {
                *c = v % p;
                v /= p;
            }
            g[gd] = 1;
            let r = poly_rem(f, &g, p);
            if r.iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn new(p: u64, n: u32) -> Result<FieldSpec, FieldError> {
        if !is_odd_prime(p) {
            return Err(FieldError::BadCharacteristic(p));
        }
        if n == 0 {
            return Err(FieldError::BadDegree);
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q < (1u64 << 32))
            .ok_or(FieldError::TooLarge)?;
        let modulus = Self::smallest_irreducible(p, n);
        Ok(FieldSpec { p, n, q, modulus })
    }

    /// Parse "p^n" (or bare "p") into a field spec.
    pub fn parse(s: &str) -> Result<FieldSpec, FieldError> {
        let bad = || FieldError::BadSpec(s.to_string());
        let (ps, ns) = match s.split_once('^') {
            Some((a, b)) => (a, b),
            None => (s, "1"),
        };
        let p: u64 = ps.trim().parse().map_err(|_| bad())?;
        let n: u32 = ns.trim().parse().map_err(|_| bad())?;
        FieldSpec::new(p, n)
    }

    fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
        let count = p.pow(n);
        for w in 0..count {
            let mut f = vec![0u64; n as usize + 1];
            let mut v = w;
            for c in f.iter_mut().take(n as usize) {
                *c = v % p;
                v /= p;
            }
            f[n as usize] = 1;
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over GF(p)")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Embed an integer via the prime subfield (reduction mod p).
    pub fn element(&self, v: i64) -> FieldElement {
        let r = v.rem_euclid(self.p as i64) as u64;
        FieldElement(r)
    }

    /// Build an element from polynomial-basis coordinates, reducing mod p.
    /// Coordinates beyond degree n-1 are rejected only by debug assertion;
    /// callers parse at most n coordinates.
    pub fn from_coords(&self, coords: &[i64]) -> FieldElement {
        debug_assert!(coords.len() <= self.n as usize);
        let mut packed = 0u64;
        let mut base = 1u64;
        for i in 0..self.n as usize {
            let c = coords.get(i).copied().unwrap_or(0).rem_euclid(self.p as i64) as u64;
            packed += c * base;
            base *= self.p;
        }
        FieldElement(packed)
    }

    pub fn coords(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0;
        (0..self.n)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    /// The residue class of x itself; the multiplicative generator of the
    /// polynomial basis. Only meaningful for n >= 2.
    pub fn generator(&self) -> FieldElement {
        FieldElement(self.p)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<i64> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| ((x + y) % self.p) as i64)
            .collect();
        self.from_coords(&sum)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let ca = self.coords(a);
        let neg: Vec<i64> = ca.iter().map(|&x| ((self.p - x) % self.p) as i64).collect();
        self.from_coords(&neg)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let n = self.n as usize;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        let coords: Vec<i64> = (0..n).map(|i| *r.get(i).unwrap_or(&0) as i64).collect();
        self.from_coords(&coords)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e by square and multiply, with a^0 = 1 (including 0^0 = 1).
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All q elements in a fixed order (packed-value order).
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Render an element; coordinates of extension fields use `a` for the
    /// class of x, e.g. `2a+1` in GF(9).
    pub fn display(&self, el: FieldElement) -> String {
        if self.n == 1 {
            return el.0.to_string();
        }
        let coords = self.coords(el);
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            let part = match (c, var.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => var,
                (_, false) => format!("{c}{var}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    /// The "p^n" string form used by the CLI and JSON output.
    pub fn spec_string(&self) -> String {
        format!("{}^{}", self.p, self.n)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.n)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}
