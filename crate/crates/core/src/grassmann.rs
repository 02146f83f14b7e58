//! The truncated unitary Grassmann algebra E_N over GF(p^n).
//!
//! Basis monomials are bitsets (generator e_i <-> bit i-1), so the truncation
//! is capped at 128 generators; the sign of a wedge is an inversion count
//! done with popcounts. Elements are sparse maps from basis monomials to
//! nonzero coefficients, so equality is structural.

use crate::field::{FieldElement, FieldSpec};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const MAX_GENERATORS: u32 = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrassmannError {
    #[error("truncation {0} exceeds the supported maximum of {MAX_GENERATORS} generators")]
    TruncationTooLarge(u32),
    #[error("generator index {0} outside 1..={1}")]
    GeneratorOutOfRange(u32, u32),
    #[error("generator indices must be strictly increasing")]
    NotIncreasing,
}

/// A product of distinct generators in increasing order, as a bitset.
/// The empty product is the unit 1_G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisMonomial(u128);

impl BasisMonomial {
    pub const ONE: BasisMonomial = BasisMonomial(0);

    pub fn from_indices(indices: &[u32]) -> Result<BasisMonomial, GrassmannError> {
        let mut bits = 0u128;
        let mut last = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_GENERATORS {
                return Err(GrassmannError::GeneratorOutOfRange(i, MAX_GENERATORS));
            }
            if i <= last {
                return Err(GrassmannError::NotIncreasing);
            }
            last = i;
            bits |= 1u128 << (i - 1);
        }
        Ok(BasisMonomial(bits))
    }

    pub fn bits(&self) -> u128 {
        self.0
    }

    pub fn from_bits(bits: u128) -> BasisMonomial {
        BasisMonomial(bits)
    }

    pub fn weight(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_one(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: u32) -> bool {
        (1..=MAX_GENERATORS).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn indices(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        let mut bits = self.0;
        while bits != 0 {
            out.push(bits.trailing_zeros() + 1);
            bits &= bits - 1;
        }
        out
    }

    pub fn max_index(&self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            128 - self.0.leading_zeros()
        }
    }

    /// Wedge with sign: `None` when supports intersect, otherwise the merged
    /// monomial and whether the permutation sign is negative.
    pub fn wedge(&self, other: &BasisMonomial) -> Option<(bool, BasisMonomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        Some((wedge_sign_negative(self.0, other.0), BasisMonomial(self.0 | other.0)))
    }
}

/// Parity of the number of pairs (i in a, j in b) with i > j.
fn wedge_sign_negative(a: u128, b: u128) -> bool {
    let mut parity = 0u32;
    let mut bits = a;
    while bits != 0 {
        let i = bits.trailing_zeros();
        parity ^= (b & ((1u128 << i) - 1)).count_ones() & 1;
        bits &= bits - 1;
    }
    parity == 1
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

/// Context for computing in E_N over a fixed field.
#[derive(Debug, Clone)]
pub struct GrassmannAlgebra {
    field: FieldSpec,
    n_gens: u32,
}

/// A finite F-linear combination of basis monomials; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GrassmannElement {
    terms: BTreeMap<BasisMonomial, FieldElement>,
}

impl GrassmannAlgebra {
    pub fn new(field: FieldSpec, n_gens: u32) -> Result<GrassmannAlgebra, GrassmannError> {
        if n_gens > MAX_GENERATORS {
            return Err(GrassmannError::TruncationTooLarge(n_gens));
        }
        Ok(GrassmannAlgebra { field, n_gens })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n_gens(&self) -> u32 {
        self.n_gens
    }

    pub fn zero(&self) -> GrassmannElement {
        GrassmannElement::default()
    }

    pub fn one(&self) -> GrassmannElement {
        self.scalar(self.field.one())
    }

    pub fn scalar(&self, c: FieldElement) -> GrassmannElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(BasisMonomial::ONE, c);
        }
        GrassmannElement { terms }
    }

    pub fn generator(&self, i: u32) -> Result<GrassmannElement, GrassmannError> {
        if i == 0 || i > self.n_gens {
            return Err(GrassmannError::GeneratorOutOfRange(i, self.n_gens));
        }
        Ok(self.monomial(BasisMonomial::from_indices(&[i])?, self.field.one()))
    }

    pub fn monomial(&self, m: BasisMonomial, c: FieldElement) -> GrassmannElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            debug_assert!(m.max_index() <= self.n_gens);
            terms.insert(m, c);
        }
        GrassmannElement { terms }
    }

    pub fn add(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        let mut terms = a.terms.clone();
        for (&m, &c) in &b.terms {
            add_term(&self.field, &mut terms, m, c);
        }
        GrassmannElement { terms }
    }

    pub fn neg(&self, a: &GrassmannElement) -> GrassmannElement {
        let terms = a
            .terms
            .iter()
            .map(|(&m, &c)| (m, self.field.neg(c)))
            .collect();
        GrassmannElement { terms }
    }

    pub fn sub(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: FieldElement, a: &GrassmannElement) -> GrassmannElement {
        if c.is_zero() {
            return self.zero();
        }
        let terms = a
            .terms
            .iter()
            .map(|(&m, &x)| (m, self.field.mul(c, x)))
            .collect();
        GrassmannElement { terms }
    }

    pub fn mul(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((neg, m)) = ma.wedge(mb) {
                    let mut c = self.field.mul(*ca, *cb);
                    if neg {
                        c = self.field.neg(c);
                    }
                    add_term(&self.field, &mut terms, m, c);
                }
            }
        }
        GrassmannElement { terms }
    }

    pub fn commutator(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }

    pub fn pow(&self, a: &GrassmannElement, e: u32) -> GrassmannElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

fn add_term(
    field: &FieldSpec,
    terms: &mut BTreeMap<BasisMonomial, FieldElement>,
    m: BasisMonomial,
    c: FieldElement,
) {
    if c.is_zero() {
        return;
    }
    let entry = terms.entry(m).or_insert(FieldElement::ZERO);
    *entry = field.add(*entry, c);
    if entry.is_zero() {
        terms.remove(&m);
    }
}

impl GrassmannElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisMonomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &BasisMonomial) -> FieldElement {
        self.terms.get(m).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Union of the supports of all terms, as a bitset monomial.
    pub fn support(&self) -> BasisMonomial {
        let mut bits = 0u128;
        for m in self.terms.keys() {
            bits |= m.bits();
        }
        BasisMonomial::from_bits(bits)
    }

    /// Support-length: the largest weight among terms, 0 for the zero element.
    pub fn weight(&self) -> u32 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    /// Sum of the terms of maximal weight; dom(0) = 0.
    pub fn dominant_part(&self) -> GrassmannElement {
        let w = self.weight();
        if self.terms.is_empty() {
            return GrassmannElement::default();
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.weight() == w)
            .map(|(&m, &c)| (m, c))
            .collect();
        GrassmannElement { terms }
    }

    /// True when the element has no 1_G component, i.e. lies in G*.
    pub fn in_g_star(&self) -> bool {
        !self.terms.contains_key(&BasisMonomial::ONE)
    }

    /// Render like `2*e1e2 + e3`; `1` and `0` for the unit and zero.
    pub fn display(&self, field: &FieldSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let coeff = field.display(*c);
            let part = if m.is_one() {
                coeff
            } else if *c == field.one() {
                m.to_string()
            } else if field.n() == 1 {
                format!("{coeff}*{m}")
            } else {
                format!("({coeff})*{m}")
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (FieldSpec, GrassmannAlgebra) {
        let f = FieldSpec::new(3, 1).unwrap();
        let g = GrassmannAlgebra::new(f.clone(), 8).unwrap();
        (f, g)
    }

    fn blade(alg: &GrassmannAlgebra, idx: &[u32]) -> GrassmannElement {
        alg.monomial(
            BasisMonomial::from_indices(idx).unwrap(),
            alg.field().one(),
        )
    }

    #[test]
    fn wedge_signs() {
        let e1 = BasisMonomial::from_indices(&[1]).unwrap();
        let e2 = BasisMonomial::from_indices(&[2]).unwrap();
        let e12 = BasisMonomial::from_indices(&[1, 2]).unwrap();
        assert_eq!(e1.wedge(&e2), Some((false, e12)));
        assert_eq!(e2.wedge(&e1), Some((true, e12)));
        assert_eq!(e1.wedge(&e1), None);
        // (e1e3) ^ e2 = -e1e2e3: one transposition.
        let e13 = BasisMonomial::from_indices(&[1, 3]).unwrap();
        let e123 = BasisMonomial::from_indices(&[1, 2, 3]).unwrap();
        assert_eq!(e13.wedge(&e2), Some((true, e123)));
    }

    #[test]
    fn unit_and_inverse_of_one_plus_nilpotent() {
        let (f, g) = setup();
        let one = g.one();
        let e1 = blade(&g, &[1]);
        let a = g.add(&one, &e1);
        let b = g.sub(&one, &e1);
        assert_eq!(g.mul(&a, &b), one);
        let _ = f;
    }

    #[test]
    fn disjoint_product() {
        let (_, g) = setup();
        let a = blade(&g, &[1, 2]);
        let b = blade(&g, &[3, 4]);
        assert_eq!(g.mul(&a, &b), blade(&g, &[1, 2, 3, 4]));
    }

    #[test]
    fn supp_wt_dom() {
        let (f, g) = setup();
        // 2*1 + e1 + e1e2e3
        let el = g.add(
            &g.add(&g.scalar(f.element(2)), &blade(&g, &[1])),
            &blade(&g, &[1, 2, 3]),
        );
        assert_eq!(el.support(), BasisMonomial::from_indices(&[1, 2, 3]).unwrap());
        assert_eq!(el.weight(), 3);
        assert_eq!(el.dominant_part(), blade(&g, &[1, 2, 3]));

        let zero = g.zero();
        assert_eq!(zero.support(), BasisMonomial::ONE);
        assert_eq!(zero.weight(), 0);
        assert!(zero.dominant_part().is_zero());

        // Equal weights: dom is the whole element.
        let el2 = g.add(&blade(&g, &[1, 2]), &g.scale(f.element(2), &blade(&g, &[3, 4])));
        assert_eq!(el2.dominant_part(), el2);
    }

    #[test]
    fn commutator_of_generators() {
        let (f, g) = setup();
        let c = g.commutator(&blade(&g, &[1]), &blade(&g, &[2]));
        assert_eq!(c, g.scale(f.element(2), &blade(&g, &[1, 2])));
        // Even-weight monomials are central.
        let e12 = blade(&g, &[1, 2]);
        for other in [blade(&g, &[3]), blade(&g, &[3, 4]), g.add(&g.one(), &blade(&g, &[5]))] {
            assert!(g.commutator(&e12, &other).is_zero());
        }
    }

    #[test]
    fn pth_power_of_scalar_plus_gstar() {
        // (lambda*1 + a)^p = lambda^p*1 for a in G*.
        let (f, g) = setup();
        let a = g.add(
            &g.add(&blade(&g, &[1]), &blade(&g, &[2, 3])),
            &g.scale(f.element(2), &blade(&g, &[1, 4, 5])),
        );
        assert!(a.in_g_star());
        for lambda in f.enumerate() {
            let el = g.add(&g.scalar(lambda), &a);
            let p = g.pow(&el, f.p() as u32);
            assert_eq!(p, g.scalar(f.pow(lambda, f.p())));
        }
    }

    #[test]
    fn display_forms() {
        let (f, g) = setup();
        assert_eq!(g.zero().display(&f), "0");
        assert_eq!(g.one().display(&f), "1");
        let el = g.add(&g.scale(f.element(2), &blade(&g, &[1, 2])), &blade(&g, &[3]));
        assert_eq!(el.display(&f), "2*e1e2 + e3");
    }
}
