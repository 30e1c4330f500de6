//! Distance statistics of a point set: `ν_E(λ)`, hinge counts `H_λ(E)` and
//! the set of distinct distances `Δ(E)`.
//!
//! `ν` follows the literal ordered-pair definition and includes the diagonal
//! `x = y` (so `Σ_λ ν(λ) = |E|²`). `Δ` only records distances between distinct
//! points. Hinges `(p, q₁, q₂)` allow `q₁ = q₂` and `q = p`.
//!
//! Everything is computed from per-point tallies
//! `d_p(λ) = #{q ∈ E : ‖p − q‖ = λ}`: `ν(λ) = Σ_p d_p(λ)` and
//! `H_λ = Σ_p d_p(λ)²`, which is quadratic in `|E|`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, Point};

/// Moduli up to this size use dense histograms.
pub const DENSE_MAX_MODULUS: u32 = 10_000;

/// Counts keyed by a field element, dense for small `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tally {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u32, u64>),
}

impl Tally {
    pub fn new(fp: FieldParams) -> Self {
        if fp.modulus() <= DENSE_MAX_MODULUS {
            Tally::Dense(vec![0; fp.modulus() as usize])
        } else {
            Tally::Sparse(BTreeMap::new())
        }
    }

    pub fn add(&mut self, lambda: FieldElement, c: u64) {
        match self {
            Tally::Dense(v) => v[lambda.value() as usize] += c,
            Tally::Sparse(m) => *m.entry(lambda.value()).or_insert(0) += c,
        }
    }

    pub fn sub(&mut self, lambda: FieldElement, c: u64) {
        match self {
            Tally::Dense(v) => v[lambda.value() as usize] -= c,
            Tally::Sparse(m) => {
                let e = m.entry(lambda.value()).or_insert(0);
                *e -= c;
                if *e == 0 {
                    m.remove(&lambda.value());
                }
            }
        }
    }

    pub fn get(&self, lambda: FieldElement) -> u64 {
        self.get_raw(lambda.value())
    }

    fn get_raw(&self, lambda: u32) -> u64 {
        match self {
            Tally::Dense(v) => v.get(lambda as usize).copied().unwrap_or(0),
            Tally::Sparse(m) => m.get(&lambda).copied().unwrap_or(0),
        }
    }

    /// Nonzero entries in increasing `λ`.
    pub fn nonzero(&self) -> Vec<(u32, u64)> {
        match self {
            Tally::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(l, &c)| (l as u32, c))
                .collect(),
            Tally::Sparse(m) => m.iter().filter(|(_, &c)| c > 0).map(|(&l, &c)| (l, c)).collect(),
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            Tally::Dense(v) => v.iter().sum(),
            Tally::Sparse(m) => m.values().sum(),
        }
    }

    /// `Σ c²` with overflow checking.
    pub fn sum_squares(&self) -> Result<u64> {
        self.nonzero().into_iter().try_fold(0u64, |acc, (_, c)| {
            c.checked_mul(c)
                .and_then(|s| acc.checked_add(s))
                .ok_or(Error::Overflow("sum of squared counts"))
        })
    }

    fn merge(mut self, other: Tally) -> Tally {
        match (&mut self, other) {
            (Tally::Dense(a), Tally::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Tally::Sparse(a), Tally::Sparse(b)) => {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
            }
            _ => unreachable!("tallies over one field share a representation"),
        }
        self
    }
}

/// `λ ↦ ν_E(λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceHistogram {
    pub counts: Tally,
    pub total_points: u64,
    pub diagonal_included: bool,
}

impl DistanceHistogram {
    /// Removes the `|E|` diagonal pairs from `ν(0)`.
    pub fn exclude_diagonal(mut self) -> Self {
        if self.diagonal_included && self.total_points > 0 {
            self.counts.sub(FieldElement::ZERO, self.total_points);
            self.diagonal_included = false;
        }
        self
    }

    pub fn nu(&self, lambda: FieldElement) -> u64 {
        self.counts.get(lambda)
    }
}

/// `λ ↦ H_λ(E)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HingeHistogram {
    pub counts: Tally,
}

impl HingeHistogram {
    pub fn hinges(&self, lambda: FieldElement) -> u64 {
        self.counts.get(lambda)
    }

    pub fn total(&self) -> u64 {
        self.counts.total()
    }
}

/// Distances realized by pairs of distinct points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceSet {
    pub values: BTreeSet<FieldElement>,
}

impl DistanceSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn normalized(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// `ν` and `H` from one pass of per-point tallies.
pub fn distance_profile(points: &[Point], fp: FieldParams) -> (DistanceHistogram, HingeHistogram) {
    let pts = normalized(points);
    let (nu, hinge) = pts
        .par_iter()
        .fold(
            || (Tally::new(fp), Tally::new(fp), Vec::with_capacity(pts.len())),
            |(mut nu, mut hinge, mut scratch), &a| {
                scratch.clear();
                scratch.extend(pts.iter().map(|&b| fp.distance(a, b)));
                scratch.sort_unstable();
                for run in scratch.chunk_by(|x, y| x == y) {
                    let d = run.len() as u64;
                    nu.add(run[0], d);
                    hinge.add(run[0], d * d);
                }
                (nu, hinge, scratch)
            },
        )
        .map(|(nu, hinge, _)| (nu, hinge))
        .reduce(
            || (Tally::new(fp), Tally::new(fp)),
            |(n1, h1), (n2, h2)| (n1.merge(n2), h1.merge(h2)),
        );
    (
        DistanceHistogram {
            counts: nu,
            total_points: pts.len() as u64,
            diagonal_included: true,
        },
        HingeHistogram { counts: hinge },
    )
}

/// Ordered-pair distance counts over `E × E`, diagonal included.
pub fn nu_histogram(points: &[Point], fp: FieldParams) -> DistanceHistogram {
    distance_profile(points, fp).0
}

/// `H_λ` for every `λ`.
pub fn hinge_histogram(points: &[Point], fp: FieldParams) -> HingeHistogram {
    distance_profile(points, fp).1
}

/// `{‖x − y‖ : x ≠ y ∈ E}`; empty when `|E| < 2`.
pub fn distinct_distances(points: &[Point], fp: FieldParams) -> DistanceSet {
    let pts = normalized(points);
    let values = (0..pts.len())
        .into_par_iter()
        .fold(BTreeSet::new, |mut set, i| {
            for j in i + 1..pts.len() {
                set.insert(fp.distance(pts[i], pts[j]));
            }
            set
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    DistanceSet { values }
}

/// `Σ_λ ν(λ)²`.
pub fn sum_nu_squared(h: &DistanceHistogram) -> Result<u64> {
    h.counts.sum_squares()
}

/// Aggregate statistics of a point set, with the per-`λ` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatReport {
    pub nu: DistanceHistogram,
    pub hinges: HingeHistogram,
    pub distances: DistanceSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatSummary {
    pub points: u64,
    pub sum_nu_sq: u64,
    pub sum_hinges: u64,
    pub distinct_distances: u64,
    pub nu_includes_diagonal: bool,
    pub hinges_include_degenerate: bool,
    pub distances_exclude_diagonal: bool,
}

impl StatReport {
    pub fn compute(points: &[Point], fp: FieldParams) -> Self {
        let (nu, hinges) = distance_profile(points, fp);
        StatReport {
            nu,
            hinges,
            distances: distinct_distances(points, fp),
        }
    }

    pub fn summary(&self) -> Result<StatSummary> {
        Ok(StatSummary {
            points: self.nu.total_points,
            sum_nu_sq: sum_nu_squared(&self.nu)?,
            sum_hinges: self.hinges.total(),
            distinct_distances: self.distances.len() as u64,
            nu_includes_diagonal: self.nu.diagonal_included,
            hinges_include_degenerate: true,
            distances_exclude_diagonal: true,
        })
    }

    /// Rows `(lambda, nu, hinge)` for every `λ` with `ν(λ) > 0`.
    pub fn rows(&self) -> Vec<(u32, u64, u64)> {
        self.nu
            .counts
            .nonzero()
            .into_iter()
            .map(|(l, n)| (l, n, self.hinges.counts.get_raw(l)))
            .collect()
    }
}
