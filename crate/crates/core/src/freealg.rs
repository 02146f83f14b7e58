//! The free Z2-graded algebra `F<Y u Z>`: word polynomials, left-normed
//! commutators, straightening onto the PBW-style basis of sorted variable
//! powers times powers of commutator letters, and graded substitution into
//! a Grassmann algebra.
//!
//! Straightening is a collection process: an out-of-order adjacent pair of
//! letters rewrites through `xy -> yx + [x,y]`, and the bracket of two letters
//! is re-expressed in left-normed letters with the Jacobi identity. No
//! identity of any Grassmann algebra is applied here; expanding the result
//! always reproduces the input exactly.

use crate::field::{FieldElement, FieldSpec};
use crate::gradings::Grading;
use crate::grassmann::{GrassmannAlgebra, GrassmannElement};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeAlgError {
    #[error("left-normed commutator needs at least two entries")]
    CommutatorTooShort,
    #[error("variable {0} has no assigned image")]
    UnassignedVariable(String),
    #[error("image of {var} is not homogeneous of degree {expected}")]
    DegreeMismatch { var: String, expected: u8 },
    #[error("parity-generic variable {0} cannot be substituted directly; expand it first")]
    GenericVariable(String),
}

/// y-variables are even, z-variables odd; x-variables are parity-generic
/// placeholders used by identity catalogs and expanded before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Y,
    Z,
    X,
}

/// A variable of the free algebra. The derived order (all y's, then all
/// z's, each by index) is the fixed basis order used everywhere: the
/// straightening, the SS comparisons, and the catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub kind: VarKind,
    pub index: u32,
}

impl Variable {
    pub fn y(index: u32) -> Variable {
        Variable { kind: VarKind::Y, index }
    }

    pub fn z(index: u32) -> Variable {
        Variable { kind: VarKind::Z, index }
    }

    pub fn x(index: u32) -> Variable {
        Variable { kind: VarKind::X, index }
    }

    /// Z2-degree; `None` for parity-generic x-variables.
    pub fn parity(&self) -> Option<u8> {
        match self.kind {
            VarKind::Y => Some(0),
            VarKind::Z => Some(1),
            VarKind::X => None,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            VarKind::Y => 'y',
            VarKind::Z => 'z',
            VarKind::X => 'x',
        };
        write!(f, "{c}{}", self.index)
    }
}

pub type Word = Vec<Variable>;

/// A finite F-linear combination of words; the empty word is 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreePolynomial {
    terms: BTreeMap<Word, FieldElement>,
}

impl FreePolynomial {
    pub fn zero() -> FreePolynomial {
        FreePolynomial::default()
    }

    pub fn one(field: &FieldSpec) -> FreePolynomial {
        FreePolynomial::scalar(field.one())
    }

    pub fn scalar(c: FieldElement) -> FreePolynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        FreePolynomial { terms }
    }

    pub fn var(v: Variable, field: &FieldSpec) -> FreePolynomial {
        FreePolynomial::monomial(vec![v], field.one())
    }

    pub fn monomial(word: Word, c: FieldElement) -> FreePolynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(word, c);
        }
        FreePolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &FreePolynomial, field: &FieldSpec) -> FreePolynomial {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_word(field, &mut terms, w.clone(), *c);
        }
        FreePolynomial { terms }
    }

    pub fn neg(&self, field: &FieldSpec) -> FreePolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), field.neg(*c)))
            .collect();
        FreePolynomial { terms }
    }

    pub fn sub(&self, other: &FreePolynomial, field: &FieldSpec) -> FreePolynomial {
        self.add(&other.neg(field), field)
    }

    pub fn scale(&self, c: FieldElement, field: &FieldSpec) -> FreePolynomial {
        if c.is_zero() {
            return FreePolynomial::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, x)| (w.clone(), field.mul(c, *x)))
            .collect();
        FreePolynomial { terms }
    }

    pub fn mul(&self, other: &FreePolynomial, field: &FieldSpec) -> FreePolynomial {
        let mut terms = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                add_word(field, &mut terms, w, field.mul(*ca, *cb));
            }
        }
        FreePolynomial { terms }
    }

    pub fn pow(&self, e: u32, field: &FieldSpec) -> FreePolynomial {
        let mut acc = FreePolynomial::one(field);
        for _ in 0..e {
            acc = acc.mul(self, field);
        }
        acc
    }

    pub fn commutator(&self, other: &FreePolynomial, field: &FieldSpec) -> FreePolynomial {
        self.mul(other, field).sub(&other.mul(self, field), field)
    }

    /// Word degree: the longest word length.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|w| w.len() as u32).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Multilinear: no variable repeats within any single word.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|w| {
            let set: BTreeSet<_> = w.iter().collect();
            set.len() == w.len()
        })
    }

    /// True when every word contains every variable of the polynomial; the
    /// exhaustive multilinear checker requires this.
    pub fn words_use_all_variables(&self) -> bool {
        let vars = self.variables();
        self.terms.keys().all(|w| {
            let set: BTreeSet<_> = w.iter().copied().collect();
            set.len() == vars.len()
        })
    }

    pub fn has_generic_vars(&self) -> bool {
        self.variables().iter().any(|v| v.kind == VarKind::X)
    }

    /// Render in the expression grammar; terms come out in map order.
    pub fn display(&self, field: &FieldSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.terms {
            let mut factors: Vec<String> = Vec::new();
            if *c != field.one() || w.is_empty() {
                let cs = field.display(*c);
                if field.n() > 1 && cs.contains('+') {
                    factors.push(format!("({cs})"));
                } else {
                    factors.push(cs);
                }
            }
            let mut i = 0;
            while i < w.len() {
                let mut j = i;
                while j < w.len() && w[j] == w[i] {
                    j += 1;
                }
                if j - i == 1 {
                    factors.push(w[i].to_string());
                } else {
                    factors.push(format!("{}^{}", w[i], j - i));
                }
                i = j;
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

fn add_word(
    field: &FieldSpec,
    terms: &mut BTreeMap<Word, FieldElement>,
    w: Word,
    c: FieldElement,
) {
    if c.is_zero() {
        return;
    }
    match terms.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = field.add(*e.get(), c);
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// The fully expanded word polynomial of the left-normed commutator
/// [p_1, ..., p_n] of polynomials.
pub fn left_normed_polys(
    entries: &[FreePolynomial],
    field: &FieldSpec,
) -> Result<FreePolynomial, FreeAlgError> {
    if entries.len() < 2 {
        return Err(FreeAlgError::CommutatorTooShort);
    }
    let mut acc = entries[0].commutator(&entries[1], field);
    for e in &entries[2..] {
        acc = acc.commutator(e, field);
    }
    Ok(acc)
}

/// Left-normed commutator of variables.
pub fn left_normed(vars: &[Variable], field: &FieldSpec) -> Result<FreePolynomial, FreeAlgError> {
    let polys: Vec<FreePolynomial> = vars.iter().map(|&v| FreePolynomial::var(v, field)).collect();
    left_normed_polys(&polys, field)
}

// ---------------------------------------------------------------------------
// Straightening onto the Pr(X) basis.
// ---------------------------------------------------------------------------

/// A letter of the collection alphabet: a single variable (length 1) or a
/// left-normed commutator of variables (length >= 2, first pair ascending).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter(Vec<Variable>);

impl Letter {
    fn var(v: Variable) -> Letter {
        Letter(vec![v])
    }

    pub fn entries(&self) -> &[Variable] {
        &self.0
    }

    pub fn is_var(&self) -> bool {
        self.0.len() == 1
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    /// Variables first (by the fixed variable order), then commutator
    /// letters by (length, entries lexicographically).
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0.len(), other.0.len()) {
            (1, 1) => self.0[0].cmp(&other.0[0]),
            (1, _) => Ordering::Less,
            (_, 1) => Ordering::Greater,
            (a, b) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
        }
    }
}

/// Bracket of two letters as a combination of left-normed letters:
/// [A, b] appends, [A, [B', b]] = [[A, B'], b] - [[A, b], B'].
/// Returns (letter, negated) pairs; an empty result is zero.
fn bracket(a: &Letter, b: &Letter) -> Vec<(Letter, bool)> {
    if b.0.len() == 1 {
        let v = b.0[0];
        if a.0.len() == 1 {
            let u = a.0[0];
            return match u.cmp(&v) {
                Ordering::Equal => Vec::new(),
                Ordering::Less => vec![(Letter(vec![u, v]), false)],
                Ordering::Greater => vec![(Letter(vec![v, u]), true)],
            };
        }
        let mut entries = a.0.clone();
        entries.push(v);
        return vec![(Letter(entries), false)];
    }
    let mut bp = b.0.clone();
    let last = bp.pop().expect("length >= 2");
    let bp = Letter(bp);
    let bl = Letter::var(last);
    let mut out = Vec::new();
    for (l, s) in bracket(a, &bp) {
        for (l2, s2) in bracket(&l, &bl) {
            out.push((l2, s ^ s2));
        }
    }
    for (l, s) in bracket(a, &bl) {
        for (l2, s2) in bracket(&l, &bp) {
            out.push((l2, !(s ^ s2)));
        }
    }
    out
}

/// One Pr(X) basis element: strictly increasing variable powers followed by
/// strictly increasing commutator-letter powers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrTerm {
    pub head: Vec<(Variable, u32)>,
    pub tail: Vec<(Letter, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrPolynomial {
    pub terms: BTreeMap<PrTerm, FieldElement>,
}

impl PrTerm {
    pub fn degree(&self) -> u32 {
        let h: u32 = self.head.iter().map(|(_, e)| e).sum();
        let t: u32 = self
            .tail
            .iter()
            .map(|(l, e)| l.entries().len() as u32 * e)
            .sum();
        h + t
    }

    /// Expand back into the free algebra.
    pub fn expand(&self, field: &FieldSpec) -> FreePolynomial {
        let mut word: Word = Vec::new();
        for (v, e) in &self.head {
            for _ in 0..*e {
                word.push(*v);
            }
        }
        let mut acc = FreePolynomial::monomial(word, field.one());
        for (l, e) in &self.tail {
            let c = left_normed(l.entries(), field).expect("letters have length >= 2");
            acc = acc.mul(&c.pow(*e, field), field);
        }
        acc
    }
}

impl PrPolynomial {
    pub fn expand(&self, field: &FieldSpec) -> FreePolynomial {
        let mut acc = FreePolynomial::zero();
        for (t, c) in &self.terms {
            acc = acc.add(&t.expand(field).scale(*c, field), field);
        }
        acc
    }
}

/// Straighten a free polynomial onto Pr(X) by collection. Expanding the
/// output reproduces the input exactly.
///
/// Collection is exponential in the worst case (the basis itself grows
/// that fast): shuffled words of degree beyond roughly twelve get
/// expensive. Single-variable powers are already sorted and cost nothing,
/// so the usual inputs (capped powers times short chains) stay cheap.
pub fn straighten(f: &FreePolynomial, field: &FieldSpec) -> PrPolynomial {
    let mut pending: BTreeMap<Vec<Letter>, FieldElement> = BTreeMap::new();
    for (w, c) in f.terms() {
        let letters: Vec<Letter> = w.iter().map(|&v| Letter::var(v)).collect();
        merge(field, &mut pending, letters, *c);
    }
    let mut sorted: BTreeMap<Vec<Letter>, FieldElement> = BTreeMap::new();
    while let Some((word, coeff)) = pending.pop_first() {
        if coeff.is_zero() {
            continue;
        }
        match first_descent(&word) {
            None => merge(field, &mut sorted, word, coeff),
            Some(i) => {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                merge(field, &mut pending, swapped, coeff);
                for (letter, negated) in bracket(&word[i], &word[i + 1]) {
                    let mut merged: Vec<Letter> = Vec::with_capacity(word.len() - 1);
                    merged.extend_from_slice(&word[..i]);
                    merged.push(letter);
                    merged.extend_from_slice(&word[i + 2..]);
                    let c = if negated { field.neg(coeff) } else { coeff };
                    merge(field, &mut pending, merged, c);
                }
            }
        }
    }
    let mut out = PrPolynomial::default();
    for (word, coeff) in sorted {
        let mut head = Vec::new();
        let mut tail = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let mut j = i;
            while j < word.len() && word[j] == word[i] {
                j += 1;
            }
            let exp = (j - i) as u32;
            if word[i].is_var() {
                head.push((word[i].entries()[0], exp));
            } else {
                tail.push((word[i].clone(), exp));
            }
            i = j;
        }
        let term = PrTerm { head, tail };
        match out.terms.entry(term) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = field.add(*e.get(), coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }
    out
}

fn first_descent(word: &[Letter]) -> Option<usize> {
    (0..word.len().saturating_sub(1)).find(|&i| word[i] > word[i + 1])
}

fn merge(
    field: &FieldSpec,
    map: &mut BTreeMap<Vec<Letter>, FieldElement>,
    word: Vec<Letter>,
    c: FieldElement,
) {
    if c.is_zero() {
        return;
    }
    match map.entry(word) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = field.add(*e.get(), c);
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Graded substitution.
// ---------------------------------------------------------------------------

/// Evaluate `f` in E_N under a variable assignment. Every assigned image
/// must be homogeneous of the variable's parity, and every variable of `f`
/// must be assigned.
pub fn gsubstitute(
    f: &FreePolynomial,
    assignment: &BTreeMap<Variable, GrassmannElement>,
    grading: Grading,
    alg: &GrassmannAlgebra,
) -> Result<GrassmannElement, FreeAlgError> {
    for v in f.variables() {
        let expected = v
            .parity()
            .ok_or_else(|| FreeAlgError::GenericVariable(v.to_string()))?;
        let image = assignment
            .get(&v)
            .ok_or_else(|| FreeAlgError::UnassignedVariable(v.to_string()))?;
        if !grading.is_homogeneous(image, expected, alg.n_gens()) {
            return Err(FreeAlgError::DegreeMismatch {
                var: v.to_string(),
                expected,
            });
        }
    }
    let mut acc = alg.zero();
    for (w, c) in f.terms() {
        let mut prod = alg.one();
        for v in w {
            prod = alg.mul(&prod, &assignment[v]);
            if prod.is_zero() {
                break;
            }
        }
        acc = alg.add(&acc, &alg.scale(*c, &prod));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    #[test]
    fn variable_order() {
        assert!(Variable::y(1) < Variable::y(2));
        assert!(Variable::y(5) < Variable::z(1));
        assert_eq!(Variable::z(2).cmp(&Variable::z(2)), Ordering::Equal);
    }

    #[test]
    fn left_normed_expansions() {
        let f = field();
        let x1 = Variable::y(1);
        let x2 = Variable::y(2);
        let c = left_normed(&[x1, x2], &f).unwrap();
        let expected = FreePolynomial::monomial(vec![x1, x2], f.one())
            .sub(&FreePolynomial::monomial(vec![x2, x1], f.one()), &f);
        assert_eq!(c, expected);

        let x3 = Variable::z(1);
        let triple = left_normed(&[x1, x2, x3], &f).unwrap();
        let expected = c.commutator(&FreePolynomial::var(x3, &f), &f);
        assert_eq!(triple, expected);

        assert_eq!(left_normed(&[x1, x1], &f).unwrap(), FreePolynomial::zero());
        assert!(left_normed(&[x1], &f).is_err());
    }

    #[test]
    fn straighten_one_collection_step() {
        let f = field();
        let (y1, y2) = (Variable::y(1), Variable::y(2));
        // y2*y1 = y1*y2 - [y1,y2]
        let input = FreePolynomial::monomial(vec![y2, y1], f.one());
        let pr = straighten(&input, &f);
        assert_eq!(pr.terms.len(), 2);
        assert_eq!(pr.expand(&f), input);
        let head_term = PrTerm {
            head: vec![(y1, 1), (y2, 1)],
            tail: vec![],
        };
        let comm_term = PrTerm {
            head: vec![],
            tail: vec![(Letter(vec![y1, y2]), 1)],
        };
        assert_eq!(pr.terms.get(&head_term), Some(&f.one()));
        assert_eq!(pr.terms.get(&comm_term), Some(&f.element(-1)));
    }

    #[test]
    fn straighten_fixes_sorted_words() {
        let f = field();
        let (y1, y2) = (Variable::y(1), Variable::y(2));
        let input = FreePolynomial::monomial(vec![y1, y2], f.one());
        let pr = straighten(&input, &f);
        assert_eq!(pr.terms.len(), 1);
        let t = pr.terms.keys().next().unwrap();
        assert_eq!(t.head, vec![(y1, 1), (y2, 1)]);
        assert!(t.tail.is_empty());
    }

    fn random_poly(rng: &mut ChaCha8Rng, f: &FieldSpec, vars: &[Variable], max_deg: usize) -> FreePolynomial {
        let mut acc = FreePolynomial::zero();
        for _ in 0..rng.random_range(1..5) {
            let len = rng.random_range(0..=max_deg);
            let w: Word = (0..len).map(|_| vars[rng.random_range(0..vars.len())]).collect();
            let c = f.element(rng.random_range(1..3));
            acc = acc.add(&FreePolynomial::monomial(w, c), f);
        }
        acc
    }

    #[test]
    fn straighten_round_trip_random() {
        let f = field();
        let vars = [Variable::y(1), Variable::y(2), Variable::z(1), Variable::z(2)];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let p = random_poly(&mut rng, &f, &vars, 5);
            let pr = straighten(&p, &f);
            assert_eq!(pr.expand(&f), p, "round trip failed for {}", p.display(&f));
        }
    }

    #[test]
    fn straighten_z1y1z1_round_trip() {
        let f = field();
        let w = FreePolynomial::monomial(vec![Variable::z(1), Variable::y(1), Variable::z(1)], f.one());
        let pr = straighten(&w, &f);
        assert_eq!(pr.expand(&f), w);
    }

    #[test]
    fn gsubstitute_known_values() {
        let f = field();
        let alg = GrassmannAlgebra::new(f.clone(), 8).unwrap();
        let e = |i: u32| alg.generator(i).unwrap();

        // Canonical: [y1,y2] with even images e1e2, e3e4 vanishes.
        let comm = left_normed(&[Variable::y(1), Variable::y(2)], &f).unwrap();
        let mut sigma = BTreeMap::new();
        sigma.insert(Variable::y(1), alg.mul(&e(1), &e(2)));
        sigma.insert(Variable::y(2), alg.mul(&e(3), &e(4)));
        let v = gsubstitute(&comm, &sigma, Grading::Canonical, &alg).unwrap();
        assert!(v.is_zero());

        // Canonical: z1z2 + z2z1 vanishes on generators.
        let (z1, z2) = (Variable::z(1), Variable::z(2));
        let anti = FreePolynomial::monomial(vec![z1, z2], f.one())
            .add(&FreePolynomial::monomial(vec![z2, z1], f.one()), &f);
        let mut sigma = BTreeMap::new();
        sigma.insert(z1, e(1));
        sigma.insert(z2, e(2));
        assert!(gsubstitute(&anti, &sigma, Grading::Canonical, &alg).unwrap().is_zero());

        // Infinity: [y1,y2] at e2, e4 equals 2*e2e4.
        let mut sigma = BTreeMap::new();
        sigma.insert(Variable::y(1), e(2));
        sigma.insert(Variable::y(2), e(4));
        let v = gsubstitute(&comm, &sigma, Grading::Infinity, &alg).unwrap();
        assert_eq!(v, alg.scale(f.element(2), &alg.mul(&e(2), &e(4))));
    }

    #[test]
    fn gsubstitute_rejects_bad_assignments() {
        let f = field();
        let alg = GrassmannAlgebra::new(f.clone(), 6).unwrap();
        let p = FreePolynomial::var(Variable::z(1), &f);
        // Even image for an odd variable under canonical.
        let mut sigma = BTreeMap::new();
        sigma.insert(Variable::z(1), alg.mul(&alg.generator(1).unwrap(), &alg.generator(2).unwrap()));
        assert!(matches!(
            gsubstitute(&p, &sigma, Grading::Canonical, &alg),
            Err(FreeAlgError::DegreeMismatch { .. })
        ));
        let empty = BTreeMap::new();
        assert!(matches!(
            gsubstitute(&p, &empty, Grading::Canonical, &alg),
            Err(FreeAlgError::UnassignedVariable(_))
        ));
    }

    #[test]
    fn gsubstitute_is_homomorphism() {
        let f = field();
        let alg = GrassmannAlgebra::new(f.clone(), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vars = [Variable::y(1), Variable::z(1), Variable::z(2)];
        for _ in 0..25 {
            let a = random_poly(&mut rng, &f, &vars, 3);
            let b = random_poly(&mut rng, &f, &vars, 3);
            let mut sigma = BTreeMap::new();
            for v in &vars {
                let parity = v.parity().unwrap();
                let weight = if parity == 0 { 2 } else { 1 };
                let el = Grading::Canonical
                    .sample_homogeneous(&alg, parity, weight, Default::default(), &mut rng)
                    .unwrap();
                sigma.insert(*v, el);
            }
            let va = gsubstitute(&a, &sigma, Grading::Canonical, &alg).unwrap();
            let vb = gsubstitute(&b, &sigma, Grading::Canonical, &alg).unwrap();
            let vab = gsubstitute(&a.mul(&b, &f), &sigma, Grading::Canonical, &alg).unwrap();
            assert_eq!(vab, alg.mul(&va, &vb));
        }
    }
}
