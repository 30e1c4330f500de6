//! Checks of the counting inequalities relating class counts, distance
//! statistics and hinge counts on concrete sets.
//!
//! Statements with explicit constants (or none) are exact integer
//! assertions. Statements that only hold up to an unspecified constant are
//! reported as ratios and never fail.
//!
//! Conventions:
//! * `T_ordered` counts ordered triples from `E³`, repeats allowed, and `N`
//!   is its congruent-pair count `Σ m²`.
//! * `T` (unordered) counts 3-subsets of `E`, collinear triangles included.
//! * `ν` includes the diagonal; `Δ` only uses distinct points.

use std::fmt;

use serde::Serialize;

use crate::congruence::{ClassifyOptions, Classifier, Mode, Strategy};
use crate::error::Result;
use crate::field::{FieldElement, FieldParams, Point};
use crate::sets::product;
use crate::statistics::{distance_profile, distinct_distances, sum_nu_squared};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    ReportOnly,
    Vacuous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::ReportOnly => "report-only",
            Verdict::Vacuous => "vacuous",
        })
    }
}

/// Whether the set satisfies the size hypothesis of the statement checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    #[serde(rename = "in")]
    In,
    #[serde(rename = "out")]
    Out,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Hypothesis {
    fn from_bool(b: bool) -> Self {
        if b {
            Hypothesis::In
        } else {
            Hypothesis::Out
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::In => "in",
            Hypothesis::Out => "out",
            Hypothesis::NotApplicable => "n/a",
        })
    }
}

/// An exact count or a real-valued bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Int(u128),
    Real(f64),
}

impl Quantity {
    pub fn as_f64(self) -> f64 {
        match self {
            Quantity::Int(v) => v as f64,
            Quantity::Real(v) => v,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Int(v) => v.fmt(f),
            Quantity::Real(v) => v.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conventions {
    pub mode: String,
    pub distinctness: String,
    pub diagonal: String,
    pub degenerate: String,
}

impl Conventions {
    fn new(mode: Mode, distinct: bool) -> Self {
        Conventions {
            mode: mode.to_string(),
            distinctness: if distinct { "distinct" } else { "repeats" }.to_string(),
            diagonal: "included".to_string(),
            degenerate: "inclusive".to_string(),
        }
    }

    fn ordered_repeats() -> Self {
        Self::new(Mode::Ordered, false)
    }

    fn unordered_distinct() -> Self {
        Self::new(Mode::Unordered, true)
    }
}

/// Where a report's inputs came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReportContext {
    pub set_spec: String,
    pub seed: Option<u64>,
}

/// One checked (or reported) inequality `lhs ≥ rhs` / `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: &'static str,
    pub p: u32,
    pub set_spec: String,
    pub seed: Option<u64>,
    pub conventions: Conventions,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub ratio: Option<f64>,
    pub verdict: Verdict,
    /// A violation of a hard bound fails the run.
    pub hard: bool,
    pub hypothesis: Hypothesis,
    pub detail: String,
}

impl BoundReport {
    pub fn is_failure(&self) -> bool {
        self.hard && self.verdict == Verdict::Violated
    }

    pub const CSV_HEADER: [&'static str; 15] = [
        "bound_id",
        "p",
        "set_spec",
        "seed",
        "mode",
        "distinctness",
        "diagonal",
        "degenerate",
        "lhs",
        "rhs",
        "ratio",
        "verdict",
        "hard",
        "hypothesis",
        "detail",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.bound_id.to_string(),
            self.p.to_string(),
            self.set_spec.clone(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.conventions.mode.clone(),
            self.conventions.distinctness.clone(),
            self.conventions.diagonal.clone(),
            self.conventions.degenerate.clone(),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.ratio.map(|r| r.to_string()).unwrap_or_default(),
            self.verdict.to_string(),
            self.hard.to_string(),
            self.hypothesis.to_string(),
            self.detail.clone(),
        ]
    }
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if rhs > 0.0 {
        Some(lhs / rhs)
    } else {
        None
    }
}

/// `n^{k/2}` via a correctly rounded square root, so results are portable.
pub fn half_power(n: u64, k: u32) -> f64 {
    ((n as f64).powi(k as i32)).sqrt()
}

/// The aggregate quantities the inequalities relate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Symbols {
    pub p: u32,
    /// `|A|` when `E = A × A`.
    pub n_a: Option<u64>,
    pub e_size: u64,
    /// Unordered triangle classes on distinct vertices, collinear included.
    pub t_unordered: u64,
    pub t_unordered_nondegenerate: u64,
    /// Ordered triangle classes over `E³` with repeats.
    pub t_ordered: u64,
    /// `Σ m` over the ordered count, i.e. `|E|³`.
    pub ordered_triples: u64,
    /// `N = Σ m²` over the ordered count.
    pub n_pairs: u64,
    pub sum_nu_sq: u64,
    pub sum_hinges: u64,
    pub distinct_distances: u64,
    /// `|E| / p²`.
    pub rho: f64,
    #[serde(skip)]
    pub elements: String,
}

impl Symbols {
    pub fn for_product(a: &[FieldElement], fp: FieldParams, strategy: Strategy) -> Result<Self> {
        let mut a = a.to_vec();
        a.sort_unstable();
        a.dedup();
        let mut s = Self::compute(&product(&a), fp, strategy)?;
        s.n_a = Some(a.len() as u64);
        s.elements = format!(
            "A={{{}}}",
            a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        Ok(s)
    }

    pub fn for_points(e: &[Point], fp: FieldParams, strategy: Strategy) -> Result<Self> {
        Self::compute(e, fp, strategy)
    }

    fn compute(e: &[Point], fp: FieldParams, strategy: Strategy) -> Result<Self> {
        let mut e = e.to_vec();
        e.sort_unstable();
        e.dedup();
        let classifier = Classifier::new(fp);
        let unordered = classifier.count_classes(&e, ClassifyOptions::triangles(Mode::Unordered, true).with_strategy(strategy))?;
        let ordered = classifier.count_classes(&e, ClassifyOptions::triangles(Mode::Ordered, false).with_strategy(strategy))?;
        let (nu, hinges) = distance_profile(&e, fp);
        let p = fp.modulus();
        Ok(Symbols {
            p,
            n_a: None,
            e_size: e.len() as u64,
            t_unordered: unordered.total_classes(),
            t_unordered_nondegenerate: unordered.non_degenerate_classes(fp),
            t_ordered: ordered.total_classes(),
            ordered_triples: ordered.simplices,
            n_pairs: ordered.congruent_pair_count()?,
            sum_nu_sq: sum_nu_squared(&nu)?,
            sum_hinges: hinges.total(),
            distinct_distances: distinct_distances(&e, fp).len() as u64,
            rho: e.len() as f64 / (p as f64 * p as f64),
            elements: format!(
                "E={{{}}}",
                e.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
            ),
        })
    }

    /// `|A| ≤ p^{2/3}`, decided as `|A|³ ≤ p²`.
    pub fn small_set_hypothesis(&self) -> Hypothesis {
        match self.n_a {
            Some(n) => Hypothesis::from_bool((n as u128).pow(3) <= (self.p as u128).pow(2)),
            None => Hypothesis::NotApplicable,
        }
    }

    fn report(&self, ctx: &ReportContext, bound_id: &'static str, conventions: Conventions) -> BoundReport {
        BoundReport {
            bound_id,
            p: self.p,
            set_spec: ctx.set_spec.clone(),
            seed: ctx.seed,
            conventions,
            lhs: Quantity::Int(0),
            rhs: Quantity::Int(0),
            ratio: None,
            verdict: Verdict::ReportOnly,
            hard: false,
            hypothesis: Hypothesis::NotApplicable,
            detail: String::new(),
        }
    }

    fn counterexample(&self, what: &str) -> String {
        format!(
            "COUNTEREXAMPLE {what}: p={} {} |E|={} T={} T_ordered={} N={} |Delta|={}",
            self.p, self.elements, self.e_size, self.t_unordered, self.t_ordered, self.n_pairs, self.distinct_distances
        )
    }
}

/// Cauchy–Schwarz over ordered triples: `T_ordered ≥ |E|⁶ / N` (exact, via
/// `T_ordered · N ≥ (Σ m)²`), the pair-count step `N` against `|E|·Σν²`
/// (ratio), and for product sets `T` against `|A|^{7/2}` (ratio).
pub fn cauchy_schwarz_chain(sym: &Symbols, ctx: &ReportContext) -> Vec<BoundReport> {
    let mut out = Vec::new();

    let mut r = sym.report(ctx, "cs_class_lower_bound", Conventions::ordered_repeats());
    let total = sym.ordered_triples as u128;
    let lhs = sym.t_ordered as u128 * sym.n_pairs as u128;
    r.lhs = Quantity::Int(sym.t_ordered as u128);
    r.rhs = Quantity::Real(if sym.n_pairs > 0 {
        (total as f64) * (total as f64) / sym.n_pairs as f64
    } else {
        0.0
    });
    r.ratio = ratio(r.lhs.as_f64(), r.rhs.as_f64());
    r.hard = true;
    if lhs >= total * total {
        r.verdict = Verdict::Holds;
    } else {
        r.verdict = Verdict::Violated;
        r.detail = sym.counterexample("T_ordered*N < |E|^6");
    }
    r.hypothesis = sym.small_set_hypothesis();
    out.push(r);

    let mut r = sym.report(ctx, "cs_pair_step", Conventions::ordered_repeats());
    r.lhs = Quantity::Int(sym.n_pairs as u128);
    let rhs = sym.e_size as u128 * sym.sum_nu_sq as u128;
    r.rhs = Quantity::Int(rhs);
    r.ratio = ratio(sym.n_pairs as f64, rhs as f64);
    r.hypothesis = sym.small_set_hypothesis();
    out.push(r);

    if let Some(n) = sym.n_a {
        let pow = half_power(n, 7);
        for (id, t, conv) in [
            ("main_theorem_unordered", sym.t_unordered, Conventions::unordered_distinct()),
            ("main_theorem_ordered", sym.t_ordered, Conventions::ordered_repeats()),
        ] {
            let mut r = sym.report(ctx, id, conv);
            r.lhs = Quantity::Int(t as u128);
            r.rhs = Quantity::Real(pow);
            r.ratio = ratio(t as f64, pow);
            r.hypothesis = sym.small_set_hypothesis();
            // T ≥ |A|^{7/2} ⇔ T² ≥ |A|⁷
            let exceeds = (t as u128).pow(2) >= (n as u128).pow(7);
            r.detail = format!("T^2 {} |A|^7", if exceeds { ">=" } else { "<" });
            out.push(r);
        }
    }
    out
}

/// `Σν² / ((|E|/4)·ΣH + |E|³)`, reported as `4Σν² / (|E|·ΣH + 4|E|³)`.
pub fn hinge_lemma(sym: &Symbols, ctx: &ReportContext) -> BoundReport {
    let mut r = sym.report(ctx, "hinge_lemma", Conventions::ordered_repeats());
    let e = sym.e_size as f64;
    let rhs = e / 4.0 * sym.sum_hinges as f64 + e * e * e;
    r.lhs = Quantity::Int(sym.sum_nu_sq as u128);
    r.rhs = Quantity::Real(rhs);
    let denom = sym.e_size as u128 * sym.sum_hinges as u128 + 4 * (sym.e_size as u128).pow(3);
    r.ratio = if denom > 0 {
        Some((4 * sym.sum_nu_sq as u128) as f64 / denom as f64)
    } else {
        None
    };
    r
}

/// `ΣH(A×A) / |A|^{9/2}` (ratio) and `|Δ(A×A)| ≥ min{p, |A|^{3/2}}` (exact,
/// recorded as a finding rather than a failure).
pub fn petridis(sym: &Symbols, ctx: &ReportContext) -> Vec<BoundReport> {
    let Some(n) = sym.n_a else {
        return Vec::new();
    };
    let mut out = Vec::new();

    let mut r = sym.report(ctx, "petridis_hinges", Conventions::ordered_repeats());
    let pow = half_power(n, 9);
    r.lhs = Quantity::Int(sym.sum_hinges as u128);
    r.rhs = Quantity::Real(pow);
    r.ratio = ratio(sym.sum_hinges as f64, pow);
    r.hypothesis = sym.small_set_hypothesis();
    out.push(r);

    let mut r = sym.report(ctx, "petridis_distances", Conventions::unordered_distinct());
    let delta = sym.distinct_distances as u128;
    let p = sym.p as u128;
    let pow = half_power(n, 3);
    let rhs = pow.min(sym.p as f64);
    r.lhs = Quantity::Int(delta);
    r.rhs = Quantity::Real(rhs);
    r.ratio = ratio(delta as f64, rhs);
    r.hypothesis = sym.small_set_hypothesis();
    // Δ ≥ min{p, |A|^{3/2}} ⇔ Δ ≥ p or Δ² ≥ |A|³
    if delta >= p || delta * delta >= (n as u128).pow(3) {
        r.verdict = Verdict::Holds;
    } else {
        r.verdict = Verdict::Violated;
        r.detail = format!(
            "FINDING |Delta|^2={} < |A|^3={} and |Delta| < p; {}",
            delta * delta,
            (n as u128).pow(3),
            sym.elements
        );
    }
    out.push(r);
    out
}

fn dezeeuw_report(sym: &Symbols, ctx: &ReportContext, bound_id: &'static str, base: u64) -> BoundReport {
    let mut r = sym.report(ctx, bound_id, Conventions::unordered_distinct());
    r.lhs = Quantity::Int(sym.t_unordered as u128);
    r.hard = true;
    if base < 3 {
        r.verdict = Verdict::Vacuous;
        r.rhs = Quantity::Real(0.0);
        r.detail = "fewer than three points".to_string();
        return r;
    }
    let rhs_times_6 = (base as u128 - 2) * sym.distinct_distances as u128;
    r.rhs = Quantity::Real(rhs_times_6 as f64 / 6.0);
    r.ratio = ratio(sym.t_unordered as f64, r.rhs.as_f64());
    if 6 * sym.t_unordered as u128 >= rhs_times_6 {
        r.verdict = Verdict::Holds;
    } else {
        r.verdict = Verdict::Violated;
        r.detail = sym.counterexample("6T < (base-2)|Delta|");
    }
    r
}

/// `6·T ≥ (|A|² − 2)·|Δ(A×A)|`, exact.
pub fn dezeeuw(sym: &Symbols, ctx: &ReportContext) -> BoundReport {
    let base = sym.n_a.map(|n| n * n).unwrap_or(sym.e_size);
    dezeeuw_report(sym, ctx, "dezeeuw", base)
}

/// The same counting argument on a general `E`: `6·T ≥ (|E| − 2)·|Δ(E)|`
/// (exact), plus `|Δ(E)|` against `p − 1` when `ρ ≥ p^{−1/2}` (ratio).
pub fn covert_recovery(sym: &Symbols, ctx: &ReportContext) -> Vec<BoundReport> {
    let mut out = vec![dezeeuw_report(sym, ctx, "covert_classes", sym.e_size)];
    let mut r = sym.report(ctx, "covert_distances", Conventions::unordered_distinct());
    let target = sym.p as u64 - 1;
    r.lhs = Quantity::Int(sym.distinct_distances as u128);
    r.rhs = Quantity::Int(target as u128);
    r.ratio = ratio(sym.distinct_distances as f64, target as f64);
    // ρ ≥ p^{-1/2} ⇔ |E|² ≥ p³
    r.hypothesis = Hypothesis::from_bool((sym.e_size as u128).pow(2) >= (sym.p as u128).pow(3));
    r.detail = format!("rho={}", sym.rho);
    out.push(r);
    out
}

/// Every report that applies to `E = A × A`.
pub fn verify_product(a: &[FieldElement], fp: FieldParams, ctx: &ReportContext, strategy: Strategy) -> Result<(Symbols, Vec<BoundReport>)> {
    let sym = Symbols::for_product(a, fp, strategy)?;
    let mut out = cauchy_schwarz_chain(&sym, ctx);
    out.push(hinge_lemma(&sym, ctx));
    out.extend(petridis(&sym, ctx));
    out.push(dezeeuw(&sym, ctx));
    Ok((sym, out))
}

/// Every report that applies to a general point set.
pub fn verify_points(e: &[Point], fp: FieldParams, ctx: &ReportContext, strategy: Strategy) -> Result<(Symbols, Vec<BoundReport>)> {
    let sym = Symbols::for_points(e, fp, strategy)?;
    let mut out = cauchy_schwarz_chain(&sym, ctx);
    out.push(hinge_lemma(&sym, ctx));
    out.extend(covert_recovery(&sym, ctx));
    Ok((sym, out))
}

pub fn verify_cauchy_schwarz_chain(a: &[FieldElement], fp: FieldParams, ctx: &ReportContext) -> Result<Vec<BoundReport>> {
    Ok(cauchy_schwarz_chain(&Symbols::for_product(a, fp, Strategy::Fast)?, ctx))
}

pub fn verify_hinge_lemma(e: &[Point], fp: FieldParams, ctx: &ReportContext) -> Result<BoundReport> {
    Ok(hinge_lemma(&Symbols::for_points(e, fp, Strategy::Fast)?, ctx))
}

pub fn verify_petridis(a: &[FieldElement], fp: FieldParams, ctx: &ReportContext) -> Result<Vec<BoundReport>> {
    Ok(petridis(&Symbols::for_product(a, fp, Strategy::Fast)?, ctx))
}

pub fn verify_dezeeuw(a: &[FieldElement], fp: FieldParams, ctx: &ReportContext) -> Result<BoundReport> {
    Ok(dezeeuw(&Symbols::for_product(a, fp, Strategy::Fast)?, ctx))
}

pub fn verify_covert_recovery(e: &[Point], fp: FieldParams, ctx: &ReportContext) -> Result<Vec<BoundReport>> {
    Ok(covert_recovery(&Symbols::for_points(e, fp, Strategy::Fast)?, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn residues(f: FieldParams, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&x| f.elem(x)).collect()
    }

    fn find<'a>(reports: &'a [BoundReport], id: &str) -> &'a BoundReport {
        reports.iter().find(|r| r.bound_id == id).unwrap()
    }

    #[test]
    fn hinge_lemma_single_point() {
        let f = fp(7);
        let r = verify_hinge_lemma(&[f.point(1, 1)], f, &ReportContext::default()).unwrap();
        // 1 / (1/4 + 1)
        assert_eq!(r.ratio, Some(0.8));
        assert_eq!(r.verdict, Verdict::ReportOnly);
    }

    #[test]
    fn hinge_lemma_right_triangle_p5() {
        let f = fp(5);
        let e = [f.point(0, 0), f.point(1, 0), f.point(0, 1)];
        let r = verify_hinge_lemma(&e, f, &ReportContext::default()).unwrap();
        assert_eq!(r.lhs, Quantity::Int(29));
        assert_eq!(r.rhs, Quantity::Real(35.25));
        assert!(r.ratio.unwrap() < 1.0);
        assert!((r.ratio.unwrap() - 29.0 / 35.25).abs() < 1e-15);
    }

    #[test]
    fn petridis_out_of_hypothesis_for_whole_field() {
        let f = fp(3);
        let reports = verify_petridis(&residues(f, &[0, 1, 2]), f, &ReportContext::default()).unwrap();
        assert!(reports.iter().all(|r| r.hypothesis == Hypothesis::Out));
    }

    #[test]
    fn petridis_interval_is_a_finding() {
        let f = fp(7);
        let reports = verify_petridis(&residues(f, &[0, 1, 2]), f, &ReportContext::default()).unwrap();
        let d = find(&reports, "petridis_distances");
        assert_eq!(d.lhs, Quantity::Int(4));
        // 4² = 16 < 27 = 3³ and 4 < 7
        assert_eq!(d.verdict, Verdict::Violated);
        assert!(!d.hard);
        assert!(!d.is_failure());
        assert!(d.detail.starts_with("FINDING"));
    }

    #[test]
    fn dezeeuw_vacuous_for_singleton() {
        let f = fp(7);
        let r = verify_dezeeuw(&residues(f, &[3]), f, &ReportContext::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Vacuous);
        assert!(!r.is_failure());
    }

    #[test]
    fn covert_vacuous_for_two_points() {
        let f = fp(7);
        let reports = verify_covert_recovery(&[f.point(0, 0), f.point(1, 0)], f, &ReportContext::default()).unwrap();
        assert_eq!(find(&reports, "covert_classes").verdict, Verdict::Vacuous);
    }

    #[test]
    fn cauchy_schwarz_instance_always_holds() {
        let f = fp(13);
        for a in [vec![0], vec![0, 1], vec![0, 1, 5], vec![2, 3, 7, 11]] {
            let reports = verify_cauchy_schwarz_chain(&residues(f, &a), f, &ReportContext::default()).unwrap();
            assert_eq!(find(&reports, "cs_class_lower_bound").verdict, Verdict::Holds);
            assert!(reports.iter().all(|r| !r.is_failure()));
        }
    }

    #[test]
    fn half_powers() {
        assert_eq!(half_power(4, 7), 128.0);
        assert_eq!(half_power(9, 3), 27.0);
        assert!((half_power(3, 3) - 5.196152422706632).abs() < 1e-12);
    }

    #[test]
    fn report_json_shape() {
        let f = fp(7);
        let ctx = ReportContext {
            set_spec: "explicit:0,1,2".into(),
            seed: Some(1),
        };
        let (_, reports) = verify_product(&residues(f, &[0, 1, 2]), f, &ctx, Strategy::Fast).unwrap();
        let v = serde_json::to_value(&reports[0]).unwrap();
        for key in ["bound_id", "p", "set_spec", "seed", "conventions", "lhs", "rhs", "ratio", "verdict"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["conventions"]["mode"], "ordered");
        assert_eq!(v["verdict"], "holds");
        assert_eq!(reports[0].csv_record().len(), BoundReport::CSV_HEADER.len());
    }
}
