//! Heavier randomized cross-checks than the acceptance budgets require:
//! deeper polynomials through the reduce/evaluate oracle, and agreement
//! between the independent checking strategies.

use grident_core::field::FieldSpec;
use grident_core::freealg::{gsubstitute, FreePolynomial, Variable, Word};
use grident_core::gradings::Grading;
use grident_core::grassmann::{BasisMonomial, GrassmannAlgebra};
use grident_core::ssform::reduce;
use grident_core::witness::{is_graded_identity, Strategy, VerdictStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn field3() -> FieldSpec {
    FieldSpec::new(3, 1).unwrap()
}

fn deep_poly(rng: &mut ChaCha8Rng, f: &FieldSpec, max_len: usize) -> FreePolynomial {
    let vars = [
        Variable::y(1),
        Variable::y(2),
        Variable::z(1),
        Variable::z(2),
        Variable::z(3),
        Variable::z(4),
    ];
    let mut acc = FreePolynomial::zero();
    for _ in 0..rng.random_range(1..4) {
        let len = rng.random_range(1..=max_len);
        let w: Word = (0..len).map(|_| vars[rng.random_range(0..vars.len())]).collect();
        acc = acc.add(&FreePolynomial::monomial(w, f.element(rng.random_range(1..3))), f);
    }
    acc
}

/// Words up to degree 9 push the k-grading rewrite through several budget
/// levels (critical degrees up to k+6) and the chain-overlap handling.
#[test]
fn deep_reduce_oracle_for_k_gradings() {
    let f = field3();
    for k in 1..=3u32 {
        let grading = Grading::K(k);
        let mut rng = ChaCha8Rng::seed_from_u64(0xdeef + k as u64);
        for round in 0..120 {
            let p = deep_poly(&mut rng, &f, 9);
            let tp = reduce(&p, grading, &f).unwrap();
            let expanded = tp.expand(&f);
            let n = (2 * p.total_degree() + k + 2).min(24);
            let alg = GrassmannAlgebra::new(f.clone(), n).unwrap();
            let vars: Vec<Variable> =
                p.variables().union(&expanded.variables()).copied().collect();
            for _ in 0..20 {
                let mut sigma = BTreeMap::new();
                for v in &vars {
                    let parity = v.parity().unwrap();
                    let mut acc = alg.zero();
                    let mut forbidden = BasisMonomial::ONE;
                    for _ in 0..rng.random_range(1..4u32) {
                        for w in [1, 2, 3, 4] {
                            if let Ok(m) = grading.sample_homogeneous_monomial(
                                n, parity, w, forbidden, &mut rng,
                            ) {
                                forbidden =
                                    BasisMonomial::from_bits(forbidden.bits() | m.bits());
                                acc = alg.add(
                                    &acc,
                                    &alg.monomial(m, f.element(rng.random_range(1..3))),
                                );
                                break;
                            }
                        }
                    }
                    sigma.insert(*v, acc);
                }
                let lhs = gsubstitute(&p, &sigma, grading, &alg).unwrap();
                let rhs = gsubstitute(&expanded, &sigma, grading, &alg).unwrap();
                assert_eq!(lhs, rhs, "k={k} round={round}: {}", p.display(&f));
            }
        }
    }
}

/// The three strategies never contradict each other on multilinear inputs:
/// exhaustive is the ground truth, and neither witness-first nor random
/// search may flip the verdict.
#[test]
fn strategies_agree_on_multilinear_inputs() {
    let f = field3();
    let vars = [
        Variable::y(1),
        Variable::y(2),
        Variable::z(1),
        Variable::z(2),
        Variable::z(3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xa9ee);
    let mut checked = 0;
    'outer: for _ in 0..300 {
        // Random multilinear polynomial: a few distinct-variable words.
        let mut acc = FreePolynomial::zero();
        for _ in 0..rng.random_range(1..4) {
            let mut pool = vars.to_vec();
            let len = rng.random_range(1..=4usize);
            let mut w = Word::new();
            for _ in 0..len {
                let i = rng.random_range(0..pool.len());
                w.push(pool.swap_remove(i));
            }
            acc = acc.add(&FreePolynomial::monomial(w, f.element(rng.random_range(1..3))), &f);
        }
        if acc.is_zero() {
            continue 'outer;
        }
        for grading in [Grading::Canonical, Grading::Infinity, Grading::KStar(2), Grading::K(2)] {
            let n = grident_core::witness::truncation_bound(&acc, grading);
            let truth = is_graded_identity(&acc, grading, &f, n, Strategy::ExhaustiveMultilinear)
                .unwrap();
            let wf = is_graded_identity(
                &acc,
                grading,
                &f,
                n,
                Strategy::WitnessFirst { samples: 150, seed: 9 },
            )
            .unwrap();
            let rand = is_graded_identity(
                &acc,
                grading,
                &f,
                n,
                Strategy::Randomized { samples: 150, seed: 9 },
            )
            .unwrap();
            let is_id = truth.status != VerdictStatus::NonIdentity;
            // Witness-first and random search must never certify a
            // non-identity for a true identity; witness-first symbolic
            // zero must never happen for a true non-identity.
            if is_id {
                assert_ne!(wf.status, VerdictStatus::NonIdentity, "{}", acc.display(&f));
                assert_ne!(rand.status, VerdictStatus::NonIdentity, "{}", acc.display(&f));
            } else {
                // Sound witnesses only: when the weaker strategies do find
                // one, it must replay.
                for v in [&wf, &rand] {
                    if let Some(w) = &v.witness {
                        let alg = GrassmannAlgebra::new(f.clone(), n).unwrap();
                        assert!(
                            grident_core::witness::verify_witness(w, grading, &alg).unwrap()
                        );
                    }
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

/// Truncations beyond the bitset capacity are rejected, not mangled.
#[test]
fn oversized_truncation_is_rejected() {
    let f = field3();
    assert!(GrassmannAlgebra::new(f.clone(), 129).is_err());
    assert!(GrassmannAlgebra::new(f.clone(), 128).is_ok());
    let p = FreePolynomial::var(Variable::y(1), &f);
    assert!(is_graded_identity(&p, Grading::Canonical, &f, 300, Strategy::ExhaustiveMultilinear)
        .is_err());
}
