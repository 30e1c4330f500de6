//! Seeded sweeps over random product sets `A × A`.
//!
//! Trial `t` of a sweep with base seed `s` uses `A = random:<n>:<s + t>`.
//! Rows come back in `(p, n, t)` order whatever the worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, half_power, BoundReport, ReportContext, Symbols, Verdict};
use crate::congruence::Strategy;
use crate::error::Result;
use crate::field::FieldParams;
use crate::sets::random_residues;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: u32,
    pub n: u64,
    pub seed: u64,
    pub distinct_distances: u64,
    pub classes_unordered: u64,
    pub classes_ordered: u64,
    pub sum_nu_sq: u64,
    pub sum_hinges: u64,
    #[serde(rename = "N_pairs")]
    pub n_pairs: u64,
    pub cs_lower: f64,
    pub dezeeuw_lower: f64,
    pub pow_7_2: f64,
    #[serde(rename = "ratio_T_over_pow")]
    pub ratio_t_over_pow: f64,
    pub ratio_hinge_lemma: f64,
    pub ratio_hinges_over_pow_9_2: f64,
    #[serde(rename = "ratio_N_over_step")]
    pub ratio_n_over_step: f64,
    pub in_hypothesis: bool,
    pub cs_holds: bool,
    pub dezeeuw_holds: bool,
    pub petridis_distances_holds: bool,
}

impl SweepRow {
    pub const CSV_HEADER: [&'static str; 20] = [
        "p",
        "n",
        "seed",
        "distinct_distances",
        "classes_unordered",
        "classes_ordered",
        "sum_nu_sq",
        "sum_hinges",
        "N_pairs",
        "cs_lower",
        "dezeeuw_lower",
        "pow_7_2",
        "ratio_T_over_pow",
        "ratio_hinge_lemma",
        "ratio_hinges_over_pow_9_2",
        "ratio_N_over_step",
        "in_hypothesis",
        "cs_holds",
        "dezeeuw_holds",
        "petridis_distances_holds",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.n.to_string(),
            self.seed.to_string(),
            self.distinct_distances.to_string(),
            self.classes_unordered.to_string(),
            self.classes_ordered.to_string(),
            self.sum_nu_sq.to_string(),
            self.sum_hinges.to_string(),
            self.n_pairs.to_string(),
            self.cs_lower.to_string(),
            self.dezeeuw_lower.to_string(),
            self.pow_7_2.to_string(),
            self.ratio_t_over_pow.to_string(),
            self.ratio_hinge_lemma.to_string(),
            self.ratio_hinges_over_pow_9_2.to_string(),
            self.ratio_n_over_step.to_string(),
            self.in_hypothesis.to_string(),
            self.cs_holds.to_string(),
            self.dezeeuw_holds.to_string(),
            self.petridis_distances_holds.to_string(),
        ]
    }
}

/// Rows plus every hard-assertion failure encountered.
#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<BoundReport>,
}

fn find<'a>(reports: &'a [BoundReport], id: &str) -> &'a BoundReport {
    reports
        .iter()
        .find(|r| r.bound_id == id)
        .expect("report ids are fixed")
}

/// One product-set trial.
pub fn run_trial(fp: FieldParams, n: usize, seed: u64, strategy: Strategy) -> Result<(SweepRow, Vec<BoundReport>)> {
    let a = random_residues(n, seed, fp)?;
    let sym = Symbols::for_product(&a, fp, strategy)?;
    let ctx = ReportContext {
        set_spec: format!("random:{n}:{seed}"),
        seed: Some(seed),
    };
    let mut reports = bounds::cauchy_schwarz_chain(&sym, &ctx);
    reports.push(bounds::hinge_lemma(&sym, &ctx));
    reports.extend(bounds::petridis(&sym, &ctx));
    reports.push(bounds::dezeeuw(&sym, &ctx));

    let n_a = n as u64;
    let pow = half_power(n_a, 7);
    let e = sym.e_size as f64;
    let total = sym.ordered_triples as f64;
    let ratio_or_zero = |r: &BoundReport| r.ratio.unwrap_or(0.0);
    let row = SweepRow {
        p: fp.modulus(),
        n: n_a,
        seed,
        distinct_distances: sym.distinct_distances,
        classes_unordered: sym.t_unordered,
        classes_ordered: sym.t_ordered,
        sum_nu_sq: sym.sum_nu_sq,
        sum_hinges: sym.sum_hinges,
        n_pairs: sym.n_pairs,
        cs_lower: total * total / sym.n_pairs as f64,
        dezeeuw_lower: (e - 2.0) * sym.distinct_distances as f64 / 6.0,
        pow_7_2: pow,
        ratio_t_over_pow: sym.t_unordered as f64 / pow,
        ratio_hinge_lemma: ratio_or_zero(find(&reports, "hinge_lemma")),
        ratio_hinges_over_pow_9_2: ratio_or_zero(find(&reports, "petridis_hinges")),
        ratio_n_over_step: ratio_or_zero(find(&reports, "cs_pair_step")),
        in_hypothesis: sym.small_set_hypothesis() == bounds::Hypothesis::In,
        cs_holds: find(&reports, "cs_class_lower_bound").verdict == Verdict::Holds,
        dezeeuw_holds: find(&reports, "dezeeuw").verdict != Verdict::Violated,
        petridis_distances_holds: find(&reports, "petridis_distances").verdict == Verdict::Holds,
    };
    Ok((row, reports))
}

/// Runs every `(p, n, trial)` combination on the current rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let mut jobs = Vec::new();
    for &p in &cfg.primes {
        let fp = FieldParams::new(p)?;
        for &n in &cfg.sizes {
            for t in 0..cfg.trials {
                jobs.push((fp, n, cfg.seed.wrapping_add(t)));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(fp, n, seed)| run_trial(fp, n, seed, cfg.strategy))
        .collect::<Result<Vec<_>>>()?;
    let mut outcome = SweepOutcome::default();
    for (row, reports) in results {
        outcome.rows.push(row);
        outcome.failures.extend(reports.into_iter().filter(BoundReport::is_failure));
    }
    Ok(outcome)
}
