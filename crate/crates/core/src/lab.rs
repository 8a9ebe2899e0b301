//! Driver layer behind the command-line tool: verification grids, rule
//! comparisons, audits with graph summaries and threshold tables.
//!
//! Every report is plain data with a stable JSON form. Wall-clock timings are
//! only attached when asked for, so that repeated runs serialize identically.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::bias::{audit_profile, BiasReport, BiasType};
use crate::error::{check_range, Result};
use crate::graph::{
    acyclicity_threshold, check_threshold, dominant_set_of, greenberg_threshold,
    minimal_threshold, profile_threshold_of, GraphAnalysis, MajorityGraph,
};
use crate::prefs::Profile;
use crate::rules::Rule;
use crate::search::{
    constructive_witness, enumerate_anonymous, factorial, reduced_count, sample_profiles,
    scan_cell, CellScan, SearchStrategy, MAX_ENUMERATION_N,
};
use crate::set::AltSet;

pub const DEFAULT_BUDGET: u64 = 5_000_000;
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Budget used instead of the default when long runs are enabled.
pub const LONG_RUN_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Constructive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellOutcome {
    CertifiedImmune,
    WitnessFound,
    Inconclusive,
}

/// How `verify` picks a method per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    /// Constructive outside the immunity table, exhaustive within budget,
    /// sampled otherwise.
    Auto,
    Exhaustive,
    Constructive,
    Sampled,
}

impl FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<StrategyChoice, String> {
        match s {
            "auto" => Ok(StrategyChoice::Auto),
            "exhaustive" => Ok(StrategyChoice::Exhaustive),
            "constructive" => Ok(StrategyChoice::Constructive),
            "sampled" => Ok(StrategyChoice::Sampled),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyChoice::Auto => "auto",
            StrategyChoice::Exhaustive => "exhaustive",
            StrategyChoice::Constructive => "constructive",
            StrategyChoice::Sampled => "sampled",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub strategy: StrategyChoice,
    /// Largest enumeration space scanned exhaustively.
    pub budget: u64,
    pub samples: u64,
    pub seed: u64,
    /// Fix the first voter in exhaustive scans.
    pub neutral: bool,
    #[serde(skip)]
    pub timing: bool,
}

impl Default for VerifyConfig {
    fn default() -> VerifyConfig {
        VerifyConfig {
            strategy: StrategyChoice::Auto,
            budget: DEFAULT_BUDGET,
            samples: DEFAULT_SAMPLES,
            seed: SearchStrategy::DEFAULT_SEED,
            neutral: true,
            timing: false,
        }
    }
}

impl VerifyConfig {
    pub fn long_run(mut self) -> VerifyConfig {
        self.budget = self.budget.max(LONG_RUN_BUDGET);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationCell {
    pub h: usize,
    pub n: usize,
    pub j: BiasType,
    /// Whether `(h, n)` lies in the immunity table of `j`.
    pub expected: bool,
    pub method: Method,
    pub outcome: CellOutcome,
    pub profiles_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kramer_mismatches: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl VerificationCell {
    pub fn contradicts(&self) -> bool {
        match self.outcome {
            CellOutcome::WitnessFound => self.expected,
            CellOutcome::CertifiedImmune => !self.expected,
            CellOutcome::Inconclusive => false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub cells: usize,
    pub consistent: usize,
    pub contradictions: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub cells: Vec<VerificationCell>,
    pub summary: VerifySummary,
}

impl VerifyReport {
    /// 0 when every cell agrees with the tables, 2 on any contradiction,
    /// 3 when some cells are inconclusive and none contradict.
    pub fn exit_code(&self) -> i32 {
        if self.summary.contradictions > 0 {
            2
        } else if self.summary.inconclusive > 0 {
            3
        } else {
            0
        }
    }
}

fn exhaustive_feasible(h: usize, n: usize, cfg: &VerifyConfig) -> bool {
    n <= MAX_ENUMERATION_N
        && h <= u8::MAX as usize
        && reduced_count(h, n, cfg.neutral).is_some_and(|c| c <= cfg.budget as u128)
}

fn pick_method(h: usize, n: usize, j: BiasType, cfg: &VerifyConfig) -> Method {
    match cfg.strategy {
        StrategyChoice::Exhaustive => Method::Exhaustive,
        StrategyChoice::Constructive => Method::Constructive,
        StrategyChoice::Sampled => Method::Sampled,
        StrategyChoice::Auto => {
            if !j.minimax_immune(h, n) && crate::search::constructive_source(h, n, j).is_some() {
                Method::Constructive
            } else if exhaustive_feasible(h, n, cfg) {
                Method::Exhaustive
            } else {
                Method::Sampled
            }
        }
    }
}

fn cell(h: usize, n: usize, j: BiasType, method: Method, outcome: CellOutcome) -> VerificationCell {
    VerificationCell {
        h,
        n,
        j,
        expected: j.minimax_immune(h, n),
        method,
        outcome,
        profiles_examined: 0,
        witness: None,
        kramer_mismatches: None,
        elapsed: None,
    }
}

fn exhaustive_cells(h: usize, n: usize, js: &[BiasType], cfg: &VerifyConfig) -> Result<Vec<VerificationCell>> {
    if !exhaustive_feasible(h, n, cfg) {
        return Ok(js
            .iter()
            .map(|&j| cell(h, n, j, Method::Exhaustive, CellOutcome::Inconclusive))
            .collect());
    }
    // a certificate needs the whole space; pure witness hunts may stop early
    let stop: Vec<BiasType> = if js.iter().all(|j| !j.minimax_immune(h, n)) {
        js.to_vec()
    } else {
        Vec::new()
    };
    let scan: CellScan = scan_cell(h, n, Rule::Minimax, cfg.neutral, cfg.budget, &stop)?;
    Ok(js
        .iter()
        .map(|&j| {
            let mut c = match scan.witness(j) {
                Some(w) => {
                    let mut c = cell(h, n, j, Method::Exhaustive, CellOutcome::WitnessFound);
                    c.witness = Some(w.profile.to_text());
                    c
                }
                None if stop.is_empty() => cell(h, n, j, Method::Exhaustive, CellOutcome::CertifiedImmune),
                None => cell(h, n, j, Method::Exhaustive, CellOutcome::Inconclusive),
            };
            c.profiles_examined = scan.examined;
            c.kramer_mismatches = Some(scan.kramer_mismatches);
            c
        })
        .collect())
}

fn constructive_cell(h: usize, n: usize, j: BiasType) -> Result<VerificationCell> {
    Ok(match constructive_witness(h, n, j)? {
        Some(w) => {
            let mut c = cell(h, n, j, Method::Constructive, CellOutcome::WitnessFound);
            c.profiles_examined = 1;
            c.witness = Some(w.profile.to_text());
            c
        }
        None => cell(h, n, j, Method::Constructive, CellOutcome::Inconclusive),
    })
}

fn sampled_cell(h: usize, n: usize, j: BiasType, cfg: &VerifyConfig) -> VerificationCell {
    let strategy = SearchStrategy::sampled(cfg.samples.max(1), cfg.seed);
    let mut c = cell(h, n, j, Method::Sampled, CellOutcome::Inconclusive);
    c.profiles_examined = strategy.budget;
    if let Ok(crate::search::SearchOutcome::Found(w)) =
        crate::search::find_witness(h, n, j, Rule::Minimax, &strategy)
    {
        c.outcome = CellOutcome::WitnessFound;
        c.witness = Some(w.profile.to_text());
    }
    c
}

/// Checks every `(h, n, j)` of the grid against the immunity tables. Cells
/// come back sorted by `(h, n, j)`.
pub fn verify(hs: &[usize], ns: &[usize], js: &[BiasType], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut cells = Vec::new();
    let mut hs = hs.to_vec();
    let mut ns = ns.to_vec();
    let mut js = js.to_vec();
    for v in [&mut hs, &mut ns] {
        v.sort_unstable();
        v.dedup();
    }
    js.sort_unstable();
    js.dedup();
    for &h in &hs {
        check_range("voters", h as u64, 2, u8::MAX as u64)?;
        for &n in &ns {
            check_range("alternatives", n as u64, 2, crate::set::MAX_ALTERNATIVES as u64)?;
            let mut by_method: BTreeMap<u8, Vec<BiasType>> = BTreeMap::new();
            for &j in &js {
                let key = match pick_method(h, n, j, cfg) {
                    Method::Exhaustive => 0,
                    Method::Constructive => 1,
                    Method::Sampled => 2,
                };
                by_method.entry(key).or_default().push(j);
            }
            for (key, group) in by_method {
                let start = Instant::now();
                let mut made = match key {
                    0 => exhaustive_cells(h, n, &group, cfg)?,
                    1 => group
                        .iter()
                        .map(|&j| constructive_cell(h, n, j))
                        .collect::<Result<Vec<_>>>()?,
                    _ => group.iter().map(|&j| sampled_cell(h, n, j, cfg)).collect(),
                };
                if cfg.timing {
                    let secs = start.elapsed().as_secs_f64() / made.len() as f64;
                    made.iter_mut().for_each(|c| c.elapsed = Some(secs));
                }
                cells.extend(made);
            }
        }
    }
    cells.sort_by_key(|c| (c.h, c.n, c.j));
    let contradictions = cells.iter().filter(|c| c.contradicts()).count();
    let inconclusive = cells
        .iter()
        .filter(|c| c.outcome == CellOutcome::Inconclusive)
        .count();
    let summary = VerifySummary {
        cells: cells.len(),
        consistent: cells.len() - contradictions - inconclusive,
        contradictions,
        inconclusive,
    };
    Ok(VerifyReport {
        config: *cfg,
        cells,
        summary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Differ,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub profile: String,
    pub selection_a: AltSet,
    pub selection_b: AltSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub h: usize,
    pub n: usize,
    pub rules: [Rule; 2],
    pub mode: String,
    pub verdict: Verdict,
    /// Profiles evaluated: anonymous representatives or random samples.
    pub examined: u64,
    /// Voter-labelled profiles covered by an exhaustive run, `(n!)^h`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles_covered: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<Difference>,
}

/// Compares two rules on every profile at `(h, n)` (exhaustive) or on seeded
/// random profiles (sampled).
pub fn compare_rules(h: usize, n: usize, a: Rule, b: Rule, strategy: &SearchStrategy) -> Result<CompareReport> {
    check_range("voters", h as u64, 2, u8::MAX as u64)?;
    check_range("alternatives", n as u64, 2, crate::set::MAX_ALTERNATIVES as u64)?;
    let differ = |p: &Profile| {
        let (x, y) = (a.apply(p), b.apply(p));
        (x != y).then(|| Difference {
            profile: p.to_text(),
            selection_a: x,
            selection_b: y,
        })
    };
    let mut report = CompareReport {
        h,
        n,
        rules: [a, b],
        mode: strategy.mode.to_string(),
        verdict: Verdict::Inconclusive,
        examined: 0,
        profiles_covered: None,
        first_difference: None,
    };
    match strategy.mode {
        crate::search::SearchMode::Exhaustive => {
            let mut first = None;
            let visited = enumerate_anonymous(h, n, strategy.budget, |p| {
                if first.is_none() {
                    first = differ(p);
                }
            });
            match visited {
                Ok(count) => {
                    report.examined = count;
                    report.first_difference = first;
                    if report.first_difference.is_some() {
                        report.verdict = Verdict::Differ;
                    } else {
                        report.verdict = Verdict::Equal;
                        report.profiles_covered = factorial(n).checked_pow(h as u32);
                    }
                }
                Err(crate::Error::BudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        _ => {
            let found = sample_profiles(h, n, strategy.budget, strategy.seed, |_, p| differ(p));
            report.examined = strategy.budget;
            report.first_difference = found.into_iter().next();
            if report.first_difference.is_some() {
                report.verdict = Verdict::Differ;
            }
        }
    }
    Ok(report)
}

/// Graph at one threshold with the dominant sets it determines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub mu: usize,
    pub arcs: Vec<(usize, usize)>,
    pub dominant_set: AltSet,
    pub analysis: GraphAnalysis,
}

pub fn graph_summary(p: &Profile, mu: usize) -> Result<GraphSummary> {
    check_threshold(p.h(), mu)?;
    let t = p.tally();
    let g = MajorityGraph::from_tally(&t, mu)?;
    Ok(GraphSummary {
        mu,
        arcs: g.arcs(),
        dominant_set: dominant_set_of(&t, mu)?,
        analysis: g.analysis().clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditOutput {
    pub h: usize,
    pub n: usize,
    pub mu_p: usize,
    pub mu_pr: usize,
    pub reports: Vec<BiasReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub graphs: Vec<GraphSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub graphs_reversal: Vec<GraphSummary>,
}

/// Bias reports for `rules`, plus graph summaries of `p` and its reversal at
/// each threshold in `mus`.
pub fn audit(p: &Profile, rules: &[Rule], mus: &[usize]) -> Result<AuditOutput> {
    let pr = p.reversed();
    let graphs = mus.iter().map(|&mu| graph_summary(p, mu)).collect::<Result<_>>()?;
    let graphs_reversal = mus.iter().map(|&mu| graph_summary(&pr, mu)).collect::<Result<_>>()?;
    let t = p.tally();
    Ok(AuditOutput {
        h: p.h(),
        n: p.n(),
        mu_p: profile_threshold_of(&t),
        mu_pr: profile_threshold_of(&t.transposed()),
        reports: audit_profile(p, rules),
        graphs,
        graphs_reversal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdRow {
    pub h: usize,
    pub n: usize,
    pub mu0: usize,
    pub mu_a: usize,
    pub mu_g: usize,
}

pub fn thresholds(hs: &[usize], ns: &[usize]) -> Result<Vec<ThresholdRow>> {
    let mut rows = Vec::new();
    for &h in hs {
        check_range("voters", h as u64, 2, u64::MAX)?;
        for &n in ns {
            check_range("alternatives", n as u64, 2, crate::set::MAX_ALTERNATIVES as u64)?;
            rows.push(ThresholdRow {
                h,
                n,
                mu0: minimal_threshold(h),
                mu_a: acyclicity_threshold(h, n),
                mu_g: greenberg_threshold(h, n),
            });
        }
    }
    rows.sort_by_key(|r| (r.h, r.n));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::FixtureId;

    #[test]
    fn small_grid_matches_tables() {
        let cfg = VerifyConfig {
            strategy: StrategyChoice::Exhaustive,
            ..VerifyConfig::default()
        };
        let r = verify(&[2, 3, 4], &[2, 3, 4], &BiasType::ALL, &cfg).unwrap();
        assert_eq!(r.cells.len(), 27);
        assert_eq!(r.exit_code(), 0, "{:#?}", r.summary);
        assert!(r.cells.iter().all(|c| c.kramer_mismatches == Some(0)));
    }

    #[test]
    fn seven_four_is_certified() {
        let cfg = VerifyConfig {
            strategy: StrategyChoice::Exhaustive,
            neutral: false,
            ..VerifyConfig::default()
        };
        let r = verify(&[7], &[4], &[BiasType::One], &cfg).unwrap();
        assert_eq!(r.cells[0].outcome, CellOutcome::CertifiedImmune);
        assert_eq!(r.cells[0].profiles_examined, 2_035_800);
    }

    #[test]
    fn constructive_and_inconclusive_cells() {
        let cfg = VerifyConfig {
            strategy: StrategyChoice::Constructive,
            ..VerifyConfig::default()
        };
        let r = verify(&[6, 4], &[4], &[BiasType::One], &cfg).unwrap();
        assert_eq!(r.cells[0].h, 4);
        assert_eq!(r.cells[0].outcome, CellOutcome::Inconclusive);
        assert_eq!(r.cells[1].outcome, CellOutcome::WitnessFound);
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn auto_avoids_oversized_scans() {
        let cfg = VerifyConfig {
            samples: 2_000,
            ..VerifyConfig::default()
        };
        let r = verify(&[5], &[5], &[BiasType::One, BiasType::Two], &cfg).unwrap();
        assert_eq!(r.cells[0].method, Method::Sampled);
        assert_eq!(r.cells[1].method, Method::Constructive);
        assert!(!r.cells.iter().any(VerificationCell::contradicts));
    }

    #[test]
    fn compare_examples() {
        let ex = SearchStrategy::exhaustive(1_000_000);
        let r = compare_rules(3, 3, Rule::Minimax, Rule::Copeland, &ex).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert_eq!(r.profiles_covered, Some(216));
        let r = compare_rules(3, 3, Rule::Minimax, Rule::Borda, &ex).unwrap();
        assert_eq!(r.verdict, Verdict::Differ);
        let d = r.first_difference.unwrap();
        let p = Profile::parse(&d.profile).unwrap();
        assert_ne!(Rule::Minimax.apply(&p), Rule::Borda.apply(&p));
        let r = compare_rules(7, 4, Rule::Minimax, Rule::Borda, &SearchStrategy::exhaustive(10)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn audit_with_graphs() {
        let p = crate::search::fixture(FixtureId::Tm2FiveFour, None).unwrap();
        let a = audit(&p, &Rule::ALL, &[4]).unwrap();
        assert_eq!((a.mu_p, a.mu_pr), (3, 4));
        assert_eq!(a.graphs_reversal[0].dominant_set.to_vec(), vec![1, 2, 4]);
        assert!(audit(&p, &Rule::ALL, &[2]).is_err());
    }

    #[test]
    fn threshold_rows() {
        let rows = thresholds(&[6], &[4]).unwrap();
        assert_eq!(
            rows[0],
            ThresholdRow {
                h: 6,
                n: 4,
                mu0: 4,
                mu_a: 5,
                mu_g: 5
            }
        );
    }
}
