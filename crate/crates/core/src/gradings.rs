//! The four Z2-gradings of the Grassmann algebra that make the generator
//! basis homogeneous: canonical, infinity, k*, and k.
//!
//! Each grading is induced by the order-2 automorphism negating its odd
//! generators, so a basis monomial is an eigenvector and its degree is the
//! mod-2 count of odd generators in the support.

use crate::field::FieldSpec;
use crate::grassmann::{BasisMonomial, GrassmannAlgebra, GrassmannElement};
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradingError {
    #[error("generator index {0} outside 1..={1}")]
    IndexOutOfRange(u32, u32),
    #[error("malformed grading {0:?}, expected canonical | infinity | kstar:<k> | k:<k>")]
    BadName(String),
    #[error("no basis monomial of degree {degree} and weight {weight} is available")]
    Unrealizable { degree: u8, weight: u32 },
}

/// One of the four gradings with a homogeneous generator basis;
/// `KStar(k)` makes e_1..e_k odd, `K(k)` makes them even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grading {
    Canonical,
    Infinity,
    KStar(u32),
    K(u32),
}

impl Grading {
    /// Parse the CLI name: `canonical | infinity | kstar:<k> | k:<k>`.
    pub fn parse(s: &str) -> Result<Grading, GradingError> {
        let bad = || GradingError::BadName(s.to_string());
        match s {
            "canonical" => Ok(Grading::Canonical),
            "infinity" => Ok(Grading::Infinity),
            _ => {
                let (name, ks) = s.split_once(':').ok_or_else(bad)?;
                let k: u32 = ks.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                match name {
                    "kstar" => Ok(Grading::KStar(k)),
                    "k" => Ok(Grading::K(k)),
                    _ => Err(bad()),
                }
            }
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self {
            Grading::KStar(k) | Grading::K(k) => Some(*k),
            _ => None,
        }
    }

    /// Z2-degree of the generator e_i.
    pub fn generator_degree(&self, i: u32, n_gens: u32) -> Result<u8, GradingError> {
        if i == 0 || i > n_gens {
            return Err(GradingError::IndexOutOfRange(i, n_gens));
        }
        Ok(match self {
            Grading::Canonical => 1,
            Grading::Infinity => (i % 2) as u8,
            Grading::KStar(k) => u8::from(i <= *k),
            Grading::K(k) => u8::from(i > *k),
        })
    }

    /// Bitmask of the odd (degree-1) generators among e_1..e_n.
    fn odd_mask(&self, n_gens: u32) -> u128 {
        let all = if n_gens == 128 {
            u128::MAX
        } else {
            (1u128 << n_gens) - 1
        };
        match self {
            Grading::Canonical => all,
            Grading::Infinity => {
                // Odd indices i correspond to even bit positions i-1.
                let mut m = 0u128;
                let mut i = 0;
                while i < n_gens {
                    m |= 1u128 << i;
                    i += 2;
                }
                m
            }
            Grading::KStar(k) => {
                let k = (*k).min(n_gens);
                if k == 0 {
                    0
                } else if k == 128 {
                    u128::MAX
                } else {
                    (1u128 << k) - 1
                }
            }
            Grading::K(k) => {
                let k = (*k).min(n_gens);
                let low = if k == 0 {
                    0
                } else if k == 128 {
                    u128::MAX
                } else {
                    (1u128 << k) - 1
                };
                all & !low
            }
        }
    }

    /// Z2-degree of a basis monomial under this grading.
    pub fn monomial_degree(&self, m: &BasisMonomial, n_gens: u32) -> u8 {
        ((m.bits() & self.odd_mask(n_gens)).count_ones() % 2) as u8
    }

    /// True when every term of `g` has the given degree (zero is homogeneous
    /// of every degree).
    pub fn is_homogeneous(&self, g: &GrassmannElement, degree: u8, n_gens: u32) -> bool {
        g.terms().all(|(m, _)| self.monomial_degree(m, n_gens) == degree)
    }

    /// The inducing automorphism: negates each term with an odd number of
    /// odd generators in its support.
    pub fn apply_automorphism(
        &self,
        alg: &GrassmannAlgebra,
        g: &GrassmannElement,
    ) -> GrassmannElement {
        let mut out = alg.zero();
        for (m, c) in g.terms() {
            let c = if self.monomial_degree(m, alg.n_gens()) == 1 {
                alg.field().neg(*c)
            } else {
                *c
            };
            out = alg.add(&out, &alg.monomial(*m, c));
        }
        out
    }

    /// Eigenspace decomposition g = even + odd.
    pub fn homogeneous_components(
        &self,
        alg: &GrassmannAlgebra,
        g: &GrassmannElement,
    ) -> (GrassmannElement, GrassmannElement) {
        let mut even = alg.zero();
        let mut odd = alg.zero();
        for (m, c) in g.terms() {
            let part = alg.monomial(*m, *c);
            if self.monomial_degree(m, alg.n_gens()) == 0 {
                even = alg.add(&even, &part);
            } else {
                odd = alg.add(&odd, &part);
            }
        }
        (even, odd)
    }

    /// Size of the degree class in the untruncated algebra, when finite:
    /// the canonical grading has no even generators at all, and the k-style
    /// gradings cap one class at k.
    pub fn intrinsic_class_cap(&self, degree: u8) -> Option<u32> {
        match (self, degree) {
            (Grading::Canonical, 0) => Some(0),
            (Grading::KStar(k), 1) => Some(*k),
            (Grading::K(k), 0) => Some(*k),
            _ => None,
        }
    }

    /// All generator indices of a given degree within 1..=n_gens, excluding a
    /// forbidden support set.
    pub fn pool(&self, degree: u8, n_gens: u32, forbidden: BasisMonomial) -> Vec<u32> {
        (1..=n_gens)
            .filter(|&i| {
                !forbidden.contains(i)
                    && self.generator_degree(i, n_gens).expect("index in range") == degree
            })
            .collect()
    }

    /// Uniformly sample a basis monomial of the given degree and exact
    /// weight whose support avoids `forbidden`.
    pub fn sample_homogeneous_monomial<R: Rng>(
        &self,
        n_gens: u32,
        degree: u8,
        weight: u32,
        forbidden: BasisMonomial,
        rng: &mut R,
    ) -> Result<BasisMonomial, GradingError> {
        if weight == 0 {
            return if degree == 0 {
                Ok(BasisMonomial::ONE)
            } else {
                Err(GradingError::Unrealizable { degree, weight })
            };
        }
        let odd_pool = self.pool(1, n_gens, forbidden);
        let even_pool = self.pool(0, n_gens, forbidden);
        // Choose how many odd generators to use: j must have the parity of
        // the requested degree, and both pools must cover their share. The
        // choice is weighted by the number of monomials per split, which
        // makes the overall draw uniform.
        let mut splits: Vec<(u32, u128)> = Vec::new();
        let mut j = degree as u32;
        while j <= weight.min(odd_pool.len() as u32) {
            let rest = weight - j;
            if rest <= even_pool.len() as u32 {
                let w = binomial(odd_pool.len() as u32, j) * binomial(even_pool.len() as u32, rest);
                if w > 0 {
                    splits.push((j, w));
                }
            }
            j += 2;
        }
        let total: u128 = splits.iter().map(|(_, w)| w).sum();
        if total == 0 {
            return Err(GradingError::Unrealizable { degree, weight });
        }
        let mut pick = rng.random_range(0..total);
        let mut chosen = splits[0].0;
        for (j, w) in &splits {
            if pick < *w {
                chosen = *j;
                break;
            }
            pick -= w;
        }
        let mut indices = sample_subset(&odd_pool, chosen as usize, rng);
        indices.extend(sample_subset(&even_pool, (weight - chosen) as usize, rng));
        indices.sort_unstable();
        Ok(BasisMonomial::from_indices(&indices).expect("distinct sorted indices"))
    }

    /// As `sample_homogeneous_monomial`, wrapped as an element with
    /// coefficient one.
    pub fn sample_homogeneous<R: Rng>(
        &self,
        alg: &GrassmannAlgebra,
        degree: u8,
        weight: u32,
        forbidden: BasisMonomial,
        rng: &mut R,
    ) -> Result<GrassmannElement, GradingError> {
        let m = self.sample_homogeneous_monomial(alg.n_gens(), degree, weight, forbidden, rng)?;
        Ok(alg.monomial(m, alg.field().one()))
    }

    /// Scalars sit in the even component; used by substitution validation.
    pub fn scalar_degree() -> u8 {
        0
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn sample_subset<R: Rng>(pool: &[u32], k: usize, rng: &mut R) -> Vec<u32> {
    debug_assert!(k <= pool.len());
    let mut scratch: Vec<u32> = pool.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let i = rng.random_range(0..scratch.len());
        out.push(scratch.swap_remove(i));
    }
    out
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grading::Canonical => write!(f, "canonical"),
            Grading::Infinity => write!(f, "infinity"),
            Grading::KStar(k) => write!(f, "kstar:{k}"),
            Grading::K(k) => write!(f, "k:{k}"),
        }
    }
}

/// Convenience bundle: a field, a truncation, and a grading.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    pub alg: GrassmannAlgebra,
    pub grading: Grading,
}

impl GradedAlgebra {
    pub fn new(field: FieldSpec, n_gens: u32, grading: Grading) -> Result<Self, crate::grassmann::GrassmannError> {
        Ok(GradedAlgebra {
            alg: GrassmannAlgebra::new(field, n_gens)?,
            grading,
        })
    }
}
