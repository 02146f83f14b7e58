//! Identity checking over E_N and the structured witness constructions:
//! scalar sequences, Type-u and Almost-Type-u sequences, dominant-part
//! verification, and the theorem-style certificates for non-identities.

use crate::field::{FieldElement, FieldSpec};
use crate::freealg::{gsubstitute, FreePolynomial, VarKind, Variable};
use crate::gradings::Grading;
use crate::grassmann::{BasisMonomial, GrassmannAlgebra, GrassmannElement, MAX_GENERATORS};
use crate::ssform::{reduce, PPolynomial, SSMonomial, TestPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("the exhaustive strategy requires a multilinear polynomial")]
    NotMultilinear,
    #[error("sequence unrealizable under this grading: {0}")]
    UnrealizableUnderGrading(String),
    #[error("truncation too small: needs about {0} generators")]
    TruncationTooSmall(u32),
    #[error("the polynomial has no SS part; use a scalar witness")]
    NoSsPart,
    #[error("no witness case applies to this test polynomial")]
    NoCaseApplies,
    #[error("the dominant-part check failed for the constructed sequence")]
    DominantCheckFailed,
    #[error("scalar search space too large: {0} field assignments")]
    ScalarSearchTooLarge(u128),
    #[error(transparent)]
    Grassmann(#[from] crate::grassmann::GrassmannError),
    #[error(transparent)]
    Free(#[from] crate::freealg::FreeAlgError),
    #[error(transparent)]
    Ss(#[from] crate::ssform::SsError),
}

// ---------------------------------------------------------------------------
// Verdicts.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Complete for multilinear polynomials at the truncation bound.
    ExhaustiveMultilinear,
    Randomized { samples: u32, seed: u64 },
    /// Reduce first; a zero normal form proves the identity symbolically,
    /// otherwise a theorem witness is attempted, then random search.
    WitnessFirst { samples: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    /// Vanished, with N at least the multilinearity bound 2*deg + k + 2
    /// (proof for multilinear input and for symbolic reductions to zero;
    /// strong evidence otherwise).
    IdentityVerifiedAtBound,
    /// Vanished, but N was below the bound.
    VanishedAtTruncation,
    NonIdentity,
}

/// A replayable non-identity certificate: the concrete (y/z) instance that
/// was evaluated, the assignment, and the nonzero value it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub instance: FreePolynomial,
    pub assignment: BTreeMap<Variable, GrassmannElement>,
    pub value: GrassmannElement,
}

#[derive(Debug, Clone)]
pub struct IdentityVerdict {
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub n_used: u32,
    pub seed: u64,
    pub strategy: String,
}

/// The truncation at which vanishing of a multilinear polynomial decides
/// the identity question: 2*deg + k + 2.
pub fn truncation_bound(f: &FreePolynomial, grading: Grading) -> u32 {
    2 * f.total_degree() + grading.k().unwrap_or(0) + 2
}

// ---------------------------------------------------------------------------
// Exhaustive multilinear checking.
// ---------------------------------------------------------------------------

/// Blade shapes per variable (`None` is the zero element, `Some` a
/// generator-degree multiset). Evaluation of a multilinear polynomial on
/// disjoint blades depends only on each blade's length parity and grading
/// parity, so weight <= 2 representatives decide vanishing. When every
/// word uses every variable, the unit faithfully represents even-length
/// even blades and zero only produces zero words; otherwise the same-class
/// pairs keep omitted-variable words on distinct supports, and the zero
/// assignment isolates each word-support class even when a finite
/// generator class rules out pairwise-disjoint images for all variables
/// at once.
fn shapes_for(parity: u8, full_support: bool) -> &'static [Option<&'static [u8]>] {
    const EVEN_FULL: [Option<&[u8]>; 2] = [Some(&[]), Some(&[0])];
    const EVEN: [Option<&[u8]>; 5] = [None, Some(&[]), Some(&[0]), Some(&[0, 0]), Some(&[1, 1])];
    const ODD_FULL: [Option<&[u8]>; 2] = [Some(&[1]), Some(&[0, 1])];
    const ODD: [Option<&[u8]>; 3] = [None, Some(&[1]), Some(&[0, 1])];
    match (parity, full_support) {
        (0, true) => &EVEN_FULL,
        (0, false) => &EVEN,
        (_, true) => &ODD_FULL,
        _ => &ODD,
    }
}

/// Run the shape enumeration. The second result reports whether every
/// shape combination realizable in the untruncated algebra was covered at
/// this truncation; skipping a combination is harmless exactly when the
/// exhausted class is intrinsically finite and fully present.
fn exhaustive_multilinear(
    f: &FreePolynomial,
    grading: Grading,
    alg: &GrassmannAlgebra,
) -> Result<(Option<Witness>, bool), WitnessError> {
    if !f.is_multilinear() {
        return Err(WitnessError::NotMultilinear);
    }
    let vars: Vec<Variable> = f.variables().into_iter().collect();
    if vars.is_empty() {
        let found = if f.is_zero() {
            None
        } else {
            Some(Witness {
                instance: f.clone(),
                assignment: BTreeMap::new(),
                value: gsubstitute(f, &BTreeMap::new(), grading, alg).expect("no variables"),
            })
        };
        return Ok((found, true));
    }
    let full_support = f.words_use_all_variables();
    let pool0 = grading.pool(0, alg.n_gens(), BasisMonomial::ONE);
    let pool1 = grading.pool(1, alg.n_gens(), BasisMonomial::ONE);
    let class_full = |class: u8| -> bool {
        let len = if class == 0 { pool0.len() } else { pool1.len() } as u32;
        grading.intrinsic_class_cap(class) == Some(len)
    };
    let mut complete = true;
    let mut choice = vec![0usize; vars.len()];
    'combo: loop {
        let mut used0 = 0usize;
        let mut used1 = 0usize;
        let mut assignment = BTreeMap::new();
        let mut feasible = true;
        'alloc: for (vi, v) in vars.iter().enumerate() {
            let parity = v.parity().expect("generic variables expanded before checking");
            let Some(shape) = shapes_for(parity, full_support)[choice[vi]] else {
                assignment.insert(*v, alg.zero());
                continue;
            };
            let mut indices = Vec::new();
            for &class in shape {
                let (pool, used) = if class == 0 {
                    (&pool0, &mut used0)
                } else {
                    (&pool1, &mut used1)
                };
                if *used >= pool.len() {
                    feasible = false;
                    complete &= class_full(class);
                    break 'alloc;
                }
                indices.push(pool[*used]);
                *used += 1;
            }
            indices.sort_unstable();
            let blade = BasisMonomial::from_indices(&indices)?;
            assignment.insert(*v, alg.monomial(blade, alg.field().one()));
        }
        if feasible {
            let value = gsubstitute(f, &assignment, grading, alg)?;
            if !value.is_zero() {
                return Ok((
                    Some(Witness { instance: f.clone(), assignment, value }),
                    complete,
                ));
            }
        }
        // Advance the mixed-radix counter over shape choices.
        for vi in 0..vars.len() {
            let parity = vars[vi].parity().expect("checked above");
            choice[vi] += 1;
            if choice[vi] < shapes_for(parity, full_support).len() {
                continue 'combo;
            }
            choice[vi] = 0;
        }
        break;
    }
    Ok((None, complete))
}

// ---------------------------------------------------------------------------
// Randomized checking.
// ---------------------------------------------------------------------------

fn random_homogeneous_sum(
    parity: u8,
    max_summands: u32,
    grading: Grading,
    alg: &GrassmannAlgebra,
    rng: &mut ChaCha8Rng,
) -> GrassmannElement {
    let field = alg.field();
    let random_coeff = |rng: &mut ChaCha8Rng| {
        let idx = rng.random_range(1..field.q());
        field
            .enumerate()
            .nth(idx as usize)
            .expect("index below q")
    };
    let mut acc = alg.zero();
    // Even variables may carry a scalar part; p-polynomial witnesses
    // live there.
    if parity == 0 && rng.random_range(0..2) == 1 {
        acc = alg.scalar(random_coeff(rng));
    }
    let mut forbidden = BasisMonomial::ONE;
    let summands = rng.random_range(1..=max_summands.max(1));
    for _ in 0..summands {
        let mut weights: Vec<u32> = (1..=4).collect();
        // Try weights in random order until one is realizable.
        for i in (1..weights.len()).rev() {
            weights.swap(i, rng.random_range(0..=i));
        }
        for w in weights {
            if let Ok(m) =
                grading.sample_homogeneous_monomial(alg.n_gens(), parity, w, forbidden, rng)
            {
                forbidden = BasisMonomial::from_bits(forbidden.bits() | m.bits());
                acc = alg.add(&acc, &alg.monomial(m, random_coeff(rng)));
                break;
            }
        }
    }
    acc
}

fn randomized(
    f: &FreePolynomial,
    grading: Grading,
    alg: &GrassmannAlgebra,
    samples: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Witness>, WitnessError> {
    let vars: Vec<Variable> = f.variables().into_iter().collect();
    if vars.is_empty() {
        let value = gsubstitute(f, &BTreeMap::new(), grading, alg)?;
        return Ok(if value.is_zero() {
            None
        } else {
            Some(Witness { instance: f.clone(), assignment: BTreeMap::new(), value })
        });
    }
    let max_summands = f.total_degree().max(1);
    for _ in 0..samples {
        let mut assignment = BTreeMap::new();
        for v in &vars {
            let parity = v.parity().expect("generic variables expanded before checking");
            let el = random_homogeneous_sum(parity, max_summands, grading, alg, rng);
            assignment.insert(*v, el);
        }
        let value = gsubstitute(f, &assignment, grading, alg)?;
        if !value.is_zero() {
            return Ok(Some(Witness { instance: f.clone(), assignment, value }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// The top-level identity check.
// ---------------------------------------------------------------------------

/// Replace parity-generic x-variables by every y/z combination on fresh
/// indices.
pub fn expand_generic(f: &FreePolynomial, field: &FieldSpec) -> Vec<FreePolynomial> {
    let vars = f.variables();
    let generics: Vec<Variable> = vars.iter().copied().filter(|v| v.kind == VarKind::X).collect();
    if generics.is_empty() {
        return vec![f.clone()];
    }
    let base = vars.iter().map(|v| v.index).max().unwrap_or(0) + 1;
    let mut out = Vec::new();
    for mask in 0..(1u32 << generics.len()) {
        let mut substituted = FreePolynomial::zero();
        for (w, c) in f.terms() {
            let word: Vec<Variable> = w
                .iter()
                .map(|v| {
                    if let Some(gi) = generics.iter().position(|g| g == v) {
                        let idx = base + v.index;
                        if mask >> gi & 1 == 0 {
                            Variable::y(idx)
                        } else {
                            Variable::z(idx)
                        }
                    } else {
                        *v
                    }
                })
                .collect();
            substituted = substituted.add(&FreePolynomial::monomial(word, *c), field);
        }
        out.push(substituted);
    }
    out
}

/// Decide, at truncation `n`, whether `f` is a graded identity. Generic
/// x-variables are expanded over both parities; the verdict aggregates all
/// instances and the witness (if any) names the failing instance.
pub fn is_graded_identity(
    f: &FreePolynomial,
    grading: Grading,
    field: &FieldSpec,
    n: u32,
    strategy: Strategy,
) -> Result<IdentityVerdict, WitnessError> {
    let alg = GrassmannAlgebra::new(field.clone(), n)?;
    let (seed, strategy_name) = match strategy {
        Strategy::ExhaustiveMultilinear => (0, "exhaustive_multilinear".to_string()),
        Strategy::Randomized { samples, seed } => (seed, format!("randomized({samples})")),
        Strategy::WitnessFirst { samples, seed } => (seed, format!("witness_first({samples})")),
    };
    let mut at_bound = true;
    let mut symbolic = false;
    for instance in expand_generic(f, field) {
        let found = match strategy {
            Strategy::ExhaustiveMultilinear => {
                let (found, complete) = exhaustive_multilinear(&instance, grading, &alg)?;
                at_bound &= complete;
                found
            }
            Strategy::Randomized { samples, seed } => {
                at_bound &= n >= truncation_bound(&instance, grading);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                randomized(&instance, grading, &alg, samples, &mut rng)?
            }
            Strategy::WitnessFirst { samples, seed } => {
                at_bound &= n >= truncation_bound(&instance, grading);
                match reduce(&instance, grading, field) {
                    Ok(tp) if tp.is_zero() => {
                        symbolic = true;
                        None
                    }
                    Ok(tp) if tp.pairs().is_empty() => {
                        // A pure p-polynomial: the exhaustive scalar search
                        // decides it (a nonzero reduced p-polynomial always
                        // has a scalar witness).
                        match scalar_witness(&tp.f0, field)? {
                            Some(scalars) => {
                                let mut assignment: BTreeMap<Variable, GrassmannElement> = scalars
                                    .iter()
                                    .map(|(&i, &c)| (Variable::y(i), alg.scalar(c)))
                                    .collect();
                                for v in instance.variables() {
                                    assignment.entry(v).or_insert_with(|| alg.zero());
                                }
                                let value = gsubstitute(
                                    &tp.expand(field),
                                    &assignment,
                                    grading,
                                    &alg,
                                )?;
                                debug_assert!(!value.is_zero());
                                Some(Witness { instance: instance.clone(), assignment, value })
                            }
                            None => {
                                symbolic = true;
                                None
                            }
                        }
                    }
                    Ok(tp) => {
                        let attempt = theorem_witness(&tp, grading, field, seed);
                        match attempt {
                            Ok(tw) => {
                                // Variables of the instance that died in the
                                // reduction get the zero element; evaluation
                                // is unchanged.
                                let mut assignment = tw.assignment;
                                for v in instance.variables() {
                                    assignment.entry(v).or_insert_with(|| alg.zero());
                                }
                                Some(Witness {
                                    instance: instance.clone(),
                                    assignment,
                                    value: tw.value,
                                })
                            }
                            Err(_) => {
                                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                                randomized(&instance, grading, &alg, samples, &mut rng)?
                            }
                        }
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        };
        if let Some(w) = found {
            return Ok(IdentityVerdict {
                status: VerdictStatus::NonIdentity,
                witness: Some(w),
                n_used: n,
                seed,
                strategy: strategy_name,
            });
        }
    }
    let status = if at_bound || symbolic {
        VerdictStatus::IdentityVerifiedAtBound
    } else {
        VerdictStatus::VanishedAtTruncation
    };
    Ok(IdentityVerdict { status, witness: None, n_used: n, seed, strategy: strategy_name })
}

/// Replay a witness: the assignment must be homogeneous, evaluate to the
/// recorded value, and that value must be nonzero.
pub fn verify_witness(
    w: &Witness,
    grading: Grading,
    alg: &GrassmannAlgebra,
) -> Result<bool, WitnessError> {
    let value = gsubstitute(&w.instance, &w.assignment, grading, alg)?;
    Ok(!value.is_zero() && value == w.value)
}

// ---------------------------------------------------------------------------
// Scalar witnesses.
// ---------------------------------------------------------------------------

/// Exhaustive search over F^m for scalars with f0(a1*1, ..., am*1) != 0.
/// `None` means f0 vanishes on all scalar tuples, which for a reduced
/// p-polynomial forces the zero polynomial.
pub fn scalar_witness(
    f0: &PPolynomial,
    field: &FieldSpec,
) -> Result<Option<BTreeMap<u32, FieldElement>>, WitnessError> {
    if f0.is_zero() {
        return Ok(None);
    }
    let vars: Vec<u32> = f0.variables().into_iter().collect();
    let space = (field.q() as u128).pow(vars.len() as u32);
    if space > 1 << 24 {
        return Err(WitnessError::ScalarSearchTooLarge(space));
    }
    let elements: Vec<FieldElement> = field.enumerate().collect();
    let mut counter = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<u32, FieldElement> = vars
            .iter()
            .zip(&counter)
            .map(|(&v, &i)| (v, elements[i]))
            .collect();
        if !f0.eval(&assignment, field).is_zero() {
            return Ok(Some(assignment));
        }
        let mut done = true;
        for c in counter.iter_mut() {
            *c += 1;
            if *c < elements.len() {
                done = false;
                break;
            }
            *c = 0;
        }
        if done || vars.is_empty() {
            return Ok(None);
        }
    }
}

// ---------------------------------------------------------------------------
// Type and Almost-Type sequences.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqKind {
    Type,
    AlmostType,
}

/// A structured substitution for one SS monomial: each variable receives a
/// sum of coefficient-one homogeneous blades with globally disjoint
/// supports, one blade per occurrence of the variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSequence {
    pub kind: SeqKind,
    pub target: SSMonomial,
    pub entries: BTreeMap<Variable, GrassmannElement>,
}

struct Pools {
    even: Vec<u32>,
    odd: Vec<u32>,
    even_unbounded: bool,
    odd_unbounded: bool,
    n: u32,
}

impl Pools {
    fn new(grading: Grading, n: u32) -> Pools {
        let even = grading.pool(0, n, BasisMonomial::ONE);
        let odd = grading.pool(1, n, BasisMonomial::ONE);
        let (even_unbounded, odd_unbounded) = match grading {
            Grading::Canonical => (false, true),
            Grading::Infinity => (true, true),
            Grading::KStar(_) => (true, false),
            Grading::K(_) => (false, true),
        };
        Pools { even, odd, even_unbounded, odd_unbounded, n }
    }

    fn take(&mut self, class: u8, rng: &mut ChaCha8Rng) -> Result<u32, WitnessError> {
        let n = self.n;
        let (pool, unbounded) = if class == 0 {
            (&mut self.even, self.even_unbounded)
        } else {
            (&mut self.odd, self.odd_unbounded)
        };
        if pool.is_empty() {
            return Err(if unbounded {
                WitnessError::TruncationTooSmall(n + 2)
            } else {
                WitnessError::UnrealizableUnderGrading(format!(
                    "no degree-{class} generator left"
                ))
            });
        }
        let i = rng.random_range(0..pool.len());
        Ok(pool.swap_remove(i))
    }

    /// A support-length-2 blade of the given parity, preferring the more
    /// plentiful class for even blades.
    fn take_pair(&mut self, parity: u8, rng: &mut ChaCha8Rng) -> Result<[u32; 2], WitnessError> {
        if parity == 1 {
            let a = self.take(0, rng)?;
            let b = self.take(1, rng)?;
            return Ok([a, b]);
        }
        let prefer_odd = self.odd.len() >= self.even.len();
        let order = if prefer_odd { [1u8, 0] } else { [0, 1] };
        for class in order {
            let pool_len = if class == 0 { self.even.len() } else { self.odd.len() };
            if pool_len >= 2 {
                let a = self.take(class, rng)?;
                let b = self.take(class, rng)?;
                return Ok([a, b]);
            }
        }
        // A same-class pair exists in the untruncated algebra whenever one
        // class is unbounded; then the shortage is the truncation's fault.
        if self.even_unbounded || self.odd_unbounded {
            Err(WitnessError::TruncationTooSmall(self.n + 2))
        } else {
            Err(WitnessError::UnrealizableUnderGrading(
                "no two same-class generators for an even pair".to_string(),
            ))
        }
    }
}

/// Summand profile for one variable: how many blades of support-length one
/// and two it receives.
fn summand_profile(u: &SSMonomial, v: Variable, kind: SeqKind) -> (u32, u32) {
    let d = u.deg_of(v);
    debug_assert!(d >= 1);
    let in_chain = u.psi_contains(v);
    let special = kind == SeqKind::AlmostType
        && !in_chain
        && u.pr_z().map(|z| z == v).unwrap_or(false);
    if in_chain || special {
        (1, d - 1)
    } else {
        (0, d)
    }
}

/// Build a Type-u or Almost-Type-u sequence inside the given algebra.
pub fn build_sequence_in(
    u: &SSMonomial,
    kind: SeqKind,
    grading: Grading,
    alg: &GrassmannAlgebra,
    rng: &mut ChaCha8Rng,
) -> Result<WitnessSequence, WitnessError> {
    if kind == SeqKind::AlmostType && u.deg_z_beg() == 0 {
        return Err(WitnessError::NoSsPart);
    }
    let mut pools = Pools::new(grading, alg.n_gens());
    let mut entries = BTreeMap::new();
    for v in u.variables() {
        let parity = v.parity().expect("SS monomials have no generic variables");
        let (singles, pairs) = summand_profile(u, v, kind);
        let mut acc = alg.zero();
        for _ in 0..singles {
            let g = pools.take(parity, rng)?;
            let blade = BasisMonomial::from_indices(&[g])?;
            acc = alg.add(&acc, &alg.monomial(blade, alg.field().one()));
        }
        for _ in 0..pairs {
            let mut pair = pools.take_pair(parity, rng)?;
            pair.sort_unstable();
            let blade = BasisMonomial::from_indices(&pair)?;
            acc = alg.add(&acc, &alg.monomial(blade, alg.field().one()));
        }
        entries.insert(v, acc);
    }
    Ok(WitnessSequence { kind, target: u.clone(), entries })
}

/// Truncation comfortably holding a sequence for `u` (two spare odd
/// generators beyond the worst-case demand).
pub fn sequence_truncation(u: &SSMonomial, grading: Grading) -> u32 {
    2 * u.deg() + grading.k().unwrap_or(0) + 2
}

/// Check that a sequence is realizable without building it: classify the
/// failure as intrinsic to the grading or as a truncation shortfall.
pub fn sequence_realizable(
    u: &SSMonomial,
    kind: SeqKind,
    grading: Grading,
) -> Result<u32, WitnessError> {
    let n = sequence_truncation(u, grading).min(MAX_GENERATORS);
    let field = crate::field::FieldSpec::new(3, 1).expect("valid probe field");
    let alg = GrassmannAlgebra::new(field, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    build_sequence_in(u, kind, grading, &alg, &mut rng).map(|_| n)
}

// ---------------------------------------------------------------------------
// Dominant-part analysis.
// ---------------------------------------------------------------------------

pub struct DominantCheck {
    pub dom: GrassmannElement,
    /// dom is a single scalar multiple of a blade whose support is the
    /// union of all entry supports.
    pub complete: bool,
    /// Adding the scalar sequence left the dominant part unchanged.
    pub shift_invariant: bool,
}

/// Evaluate an SS monomial at a sequence (variables not in the monomial are
/// irrelevant and may be absent).
pub fn eval_ss(
    u: &SSMonomial,
    entries: &BTreeMap<Variable, GrassmannElement>,
    grading: Grading,
    alg: &GrassmannAlgebra,
) -> Result<GrassmannElement, WitnessError> {
    let f = u.expand(alg.field());
    Ok(gsubstitute(&f, entries, grading, alg)?)
}

/// Compute dom(u(A)) and verify completeness plus invariance under the
/// scalar shift A -> lambda*1 + A.
pub fn dominant_check(
    u: &SSMonomial,
    seq: &WitnessSequence,
    scalars: &BTreeMap<Variable, FieldElement>,
    grading: Grading,
    alg: &GrassmannAlgebra,
) -> Result<DominantCheck, WitnessError> {
    let value = eval_ss(u, &seq.entries, grading, alg)?;
    let dom = value.dominant_part();
    let mut union = 0u128;
    for v in u.variables() {
        if let Some(e) = seq.entries.get(&v) {
            union |= e.support().bits();
        }
    }
    let complete = dom.num_terms() == 1
        && dom.terms().next().map(|(m, _)| m.bits()) == Some(union);
    let shifted = shift_assignment(&seq.entries, scalars, alg);
    let value2 = eval_ss(u, &shifted, grading, alg)?;
    let shift_invariant = value2.dominant_part() == dom;
    Ok(DominantCheck { dom, complete, shift_invariant })
}

fn shift_assignment(
    entries: &BTreeMap<Variable, GrassmannElement>,
    scalars: &BTreeMap<Variable, FieldElement>,
    alg: &GrassmannAlgebra,
) -> BTreeMap<Variable, GrassmannElement> {
    let mut out = entries.clone();
    for (v, lambda) in scalars {
        let shifted = alg.add(&alg.scalar(*lambda), out.get(v).unwrap_or(&alg.zero()));
        out.insert(*v, shifted);
    }
    out
}

// ---------------------------------------------------------------------------
// Theorem witnesses.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessCase {
    /// A Type sequence for the leading term exists.
    TypeLeading,
    /// No bad term; an Almost-Type sequence for the leading term exists.
    AlmostTypeLeading,
    /// A bad term exists; a Type sequence for the greatest bad term.
    TypeLeadingBad,
}

#[derive(Debug, Clone)]
pub struct TheoremWitness {
    pub case: WitnessCase,
    pub target: SSMonomial,
    pub sequence: WitnessSequence,
    pub scalars: BTreeMap<Variable, FieldElement>,
    pub assignment: BTreeMap<Variable, GrassmannElement>,
    pub value: GrassmannElement,
    pub dom: GrassmannElement,
    pub n_used: u32,
    pub seed: u64,
}

/// Build the structured certificate for a reduced test polynomial: pick
/// the applicable case, build its sequence and scalars, evaluate, and
/// verify that the dominant part isolates the target term. Fails (for the
/// caller to fall back on) when no case is realizable or the dominant-part
/// check does not come out.
pub fn theorem_witness(
    tp: &TestPolynomial,
    grading: Grading,
    field: &FieldSpec,
    seed: u64,
) -> Result<TheoremWitness, WitnessError> {
    let lt = tp.leading_term()?.clone();
    let (bad, lbt) = tp.bad_terms();
    let mut cases: Vec<(WitnessCase, SSMonomial, SeqKind)> = Vec::new();
    if sequence_realizable(&lt, SeqKind::Type, grading).is_ok() {
        cases.push((WitnessCase::TypeLeading, lt.clone(), SeqKind::Type));
    }
    if lt.deg_z_beg() > 0
        && bad.is_empty()
        && sequence_realizable(&lt, SeqKind::AlmostType, grading).is_ok()
    {
        cases.push((WitnessCase::AlmostTypeLeading, lt.clone(), SeqKind::AlmostType));
    }
    if let Some(i) = lbt {
        let target = tp.pairs()[i].1.clone();
        if sequence_realizable(&target, SeqKind::Type, grading).is_ok() {
            cases.push((WitnessCase::TypeLeadingBad, target, SeqKind::Type));
        }
    }
    if cases.is_empty() {
        return Err(WitnessError::NoCaseApplies);
    }
    let mut last_err = WitnessError::NoCaseApplies;
    for (case, target, kind) in cases {
        match try_case(tp, grading, field, seed, case, &target, kind) {
            Ok(tw) => return Ok(tw),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn try_case(
    tp: &TestPolynomial,
    grading: Grading,
    field: &FieldSpec,
    seed: u64,
    case: WitnessCase,
    target: &SSMonomial,
    kind: SeqKind,
) -> Result<TheoremWitness, WitnessError> {
    let n = sequence_truncation(target, grading).min(MAX_GENERATORS);
    let alg = GrassmannAlgebra::new(field.clone(), n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = build_sequence_in(target, kind, grading, &alg, &mut rng)?;

    // Scalars making the target's coefficient polynomial nonzero, zero
    // elsewhere; z-variables never receive scalars.
    let f_target = tp
        .coefficient_of(target)
        .expect("target is one of the SS parts");
    let lambda_y = scalar_witness(f_target, field)?;
    let lambda_y = match (lambda_y, f_target.as_constant()) {
        (Some(m), _) => m,
        (None, Some(c)) if !c.is_zero() => BTreeMap::new(),
        _ => return Err(WitnessError::DominantCheckFailed),
    };
    let mut scalars: BTreeMap<Variable, FieldElement> = lambda_y
        .iter()
        .map(|(&i, &c)| (Variable::y(i), c))
        .collect();

    // Every variable of the test polynomial gets lambda*1 + A, with A = 0
    // outside the target and lambda = 0 for z-variables and unconstrained
    // y-variables.
    let mut all_vars: std::collections::BTreeSet<Variable> = std::collections::BTreeSet::new();
    for (fp, u) in tp.pairs() {
        all_vars.extend(u.variables());
        all_vars.extend(fp.variables().into_iter().map(Variable::y));
    }
    all_vars.extend(tp.f0.variables().into_iter().map(Variable::y));
    scalars.retain(|v, _| all_vars.contains(v));

    let mut assignment = BTreeMap::new();
    for v in &all_vars {
        let a = seq.entries.get(v).cloned().unwrap_or_else(|| alg.zero());
        let lambda = scalars.get(v).copied().unwrap_or(FieldElement::ZERO);
        assignment.insert(*v, alg.add(&alg.scalar(lambda), &a));
    }

    let value = gsubstitute(&tp.expand(field), &assignment, grading, &alg)?;
    let dom = value.dominant_part();

    // The certificate is valid when dom(f(lambda + A)) equals the target
    // coefficient at the scalars times dom(target(A)), a nonzero multiple
    // of one complete blade.
    let check = dominant_check(target, &seq, &scalars, grading, &alg)?;
    let coeff = f_target.eval(&lambda_y, field);
    let expected = alg.scale(coeff, &check.dom);
    if coeff.is_zero()
        || !check.complete
        || !check.shift_invariant
        || dom != expected
        || value.is_zero()
    {
        return Err(WitnessError::DominantCheckFailed);
    }
    Ok(TheoremWitness {
        case,
        target: target.clone(),
        sequence: seq,
        scalars,
        assignment,
        value,
        dom,
        n_used: n,
        seed,
    })
}
