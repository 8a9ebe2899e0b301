//! Witness search: constructions, exhaustive certificates and sampling.
//!
//! Exhaustive scans visit one profile per multiset of rankings, which is
//! sound because all three rules are anonymous. Since they are also neutral,
//! absence queries may additionally fix the first voter to the identity
//! ranking. Absence of a witness is only reported as a certificate when the
//! whole reduced space was visited.
//!
//! Sampled searches split the sample stream into chunks of [`SAMPLE_CHUNK`]
//! profiles; chunk `c` draws from a ChaCha8 generator seeded with the run seed
//! on stream `c`. Results therefore depend only on the seed and the sample
//! budget, not on the number of worker threads.

mod construct;
mod enumerate;
mod fixtures;
mod kernel;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{audit_rule, BiasType};
use crate::error::{Error, Result};
use crate::prefs::{Profile, Ranking};
use crate::rules::Rule;
use crate::set::AltSet;

pub use construct::{
    construct_cycle_profile, construct_witness_even, construct_witness_odd, constructive_source,
    constructive_witness,
};
pub use enumerate::{
    all_rankings, anonymous_count, enumerate_anonymous, factorial, multiset_count, neutral_count,
    reduced_count, MAX_ENUMERATION_N,
};
pub use fixtures::{fixture, fixture_by_name, FixtureId};

use kernel::{RankingTable, Scan};

pub const SAMPLE_CHUNK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Sampled,
    Constructive,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Sampled => "sampled",
            SearchMode::Constructive => "constructive",
        })
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<SearchMode, String> {
        match s {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "sampled" => Ok(SearchMode::Sampled),
            "constructive" => Ok(SearchMode::Constructive),
            other => Err(format!("unknown search mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStrategy {
    pub mode: SearchMode,
    /// Maximum number of profiles examined.
    pub budget: u64,
    pub seed: u64,
    /// Fix the first voter to the identity ranking in exhaustive scans.
    pub neutral: bool,
}

impl SearchStrategy {
    pub const DEFAULT_SEED: u64 = 0x2016_0a11;

    pub fn exhaustive(budget: u64) -> SearchStrategy {
        SearchStrategy {
            mode: SearchMode::Exhaustive,
            budget,
            seed: Self::DEFAULT_SEED,
            neutral: true,
        }
    }

    pub fn sampled(budget: u64, seed: u64) -> SearchStrategy {
        SearchStrategy {
            mode: SearchMode::Sampled,
            budget,
            seed,
            neutral: false,
        }
    }

    pub fn constructive() -> SearchStrategy {
        SearchStrategy {
            mode: SearchMode::Constructive,
            budget: 1,
            seed: Self::DEFAULT_SEED,
            neutral: false,
        }
    }

    pub fn with_neutral(mut self, neutral: bool) -> SearchStrategy {
        self.neutral = neutral;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Precondition("search budget must be positive".into()));
        }
        Ok(())
    }
}

/// How a witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "id")]
pub enum WitnessSource {
    Fixture(FixtureId),
    OddConstruction,
    EvenConstruction,
    Exhaustive,
    Sampled,
    Supplied,
}

/// A profile on which a rule exhibits a reversal bias, together with the
/// evidence. [`Witness::certify`] recomputes everything from the profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub h: usize,
    pub n: usize,
    pub j: BiasType,
    pub rule: Rule,
    pub profile: Profile,
    pub selection_p: AltSet,
    pub selection_pr: AltSet,
    pub mu_p: Option<usize>,
    pub mu_pr: Option<usize>,
    pub source: WitnessSource,
}

impl Witness {
    /// Audits `profile` and records the outcome; not necessarily certified.
    pub fn from_profile(profile: Profile, j: BiasType, rule: Rule, source: WitnessSource) -> Witness {
        let report = audit_rule(&profile, rule);
        Witness {
            h: profile.h(),
            n: profile.n(),
            j,
            rule,
            selection_p: report.selection_p,
            selection_pr: report.selection_pr,
            mu_p: report.mu_p,
            mu_pr: report.mu_pr,
            profile,
            source,
        }
    }

    /// Re-audits the profile: the stored selections and thresholds must be
    /// reproduced and bias type `j` must fire.
    pub fn certify(&self) -> bool {
        let r = audit_rule(&self.profile, self.rule);
        r.flags().get(self.j)
            && r.selection_p == self.selection_p
            && r.selection_pr == self.selection_pr
            && r.mu_p == self.mu_p
            && r.mu_pr == self.mu_pr
            && (self.h, self.n) == (self.profile.h(), self.profile.n())
    }

    pub fn bundle(&self, strategy: Option<&SearchStrategy>) -> WitnessBundle {
        WitnessBundle {
            h: self.h,
            n: self.n,
            j: self.j,
            rule: self.rule,
            profile: self.profile.to_text(),
            selections: Pair {
                p: self.selection_p,
                pr: self.selection_pr,
            },
            mu: match (self.mu_p, self.mu_pr) {
                (Some(p), Some(pr)) => Some(Pair { p, pr }),
                _ => None,
            },
            strategy: strategy.map_or_else(|| "constructive".to_string(), |s| s.mode.to_string()),
            seed: strategy.filter(|s| s.mode == SearchMode::Sampled).map(|s| s.seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair<T> {
    pub p: T,
    pub pr: T,
}

/// On-disk form of a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBundle {
    pub h: usize,
    pub n: usize,
    pub j: BiasType,
    pub rule: Rule,
    pub profile: String,
    pub selections: Pair<AltSet>,
    pub mu: Option<Pair<usize>>,
    pub strategy: String,
    pub seed: Option<u64>,
}

impl WitnessBundle {
    /// Rebuilds the witness; the caller should [`Witness::certify`] it.
    pub fn to_witness(&self) -> Result<Witness> {
        let profile = Profile::parse(&self.profile)?;
        Ok(Witness {
            h: self.h,
            n: self.n,
            j: self.j,
            rule: self.rule,
            profile,
            selection_p: self.selections.p,
            selection_pr: self.selections.pr,
            mu_p: self.mu.map(|m| m.p),
            mu_pr: self.mu.map(|m| m.pr),
            source: WitnessSource::Supplied,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Box<Witness>),
    /// The whole reduced space was visited without a witness.
    CertifiedImmune { examined: u64 },
    Inconclusive { examined: u64, reason: String },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn examined(&self) -> u64 {
        match self {
            SearchOutcome::Found(_) => 1,
            SearchOutcome::CertifiedImmune { examined }
            | SearchOutcome::Inconclusive { examined, .. } => *examined,
        }
    }
}

/// Result of one exhaustive pass over a cell, for all three bias types at once.
#[derive(Clone, Debug)]
pub struct CellScan {
    pub h: usize,
    pub n: usize,
    pub rule: Rule,
    pub neutral: bool,
    pub examined: u64,
    /// First witness in enumeration order for bias type 1, 2, 3.
    pub witnesses: [Option<Witness>; 3],
    /// Profiles where the two Minimax routes disagreed (Minimax only).
    pub kramer_mismatches: u64,
    pub first_mismatch: Option<Profile>,
}

impl CellScan {
    pub fn witness(&self, j: BiasType) -> Option<&Witness> {
        self.witnesses[j.index() as usize - 1].as_ref()
    }
}

/// Exhaustively scans every anonymous profile class at `(h, n)`.
///
/// `stop_after` lists bias types whose first witness ends the scan early;
/// pass an empty slice to visit the whole space.
pub fn scan_cell(
    h: usize,
    n: usize,
    rule: Rule,
    neutral: bool,
    budget: u64,
    stop_after: &[BiasType],
) -> Result<CellScan> {
    let count = reduced_count(h, n, neutral).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let table = RankingTable::new(n)?;
    let stop_mask = stop_after.iter().fold(0u8, |m, j| m | 1 << (j.index() - 1));
    let scan = Scan {
        table: &table,
        h,
        rule,
        neutral,
        stop_mask,
    };
    let raw = scan.run()?;
    let to_profile = |seq: &[u32]| {
        Profile::new(seq.iter().map(|&k| table.ranking(k).clone()).collect())
            .expect("table rankings share n")
    };
    let mut witnesses: [Option<Witness>; 3] = Default::default();
    for (slot, (hit, j)) in witnesses.iter_mut().zip(raw.first.iter().zip(BiasType::ALL)) {
        if let Some(hit) = hit {
            let w = Witness::from_profile(to_profile(&hit.seq), j, rule, WitnessSource::Exhaustive);
            if w.selection_p != hit.selection_p || w.selection_pr != hit.selection_pr || !w.certify() {
                return Err(Error::Construction(format!(
                    "scan hit at ({h}, {n}) failed re-audit: {:?}",
                    w.profile
                )));
            }
            *slot = Some(w);
        }
    }
    Ok(CellScan {
        h,
        n,
        rule,
        neutral,
        examined: raw.examined,
        witnesses,
        kramer_mismatches: raw.kramer_mismatches,
        first_mismatch: raw.first_mismatch.as_deref().map(to_profile),
    })
}

/// A uniformly random profile.
pub fn random_profile<R: Rng + ?Sized>(h: usize, n: usize, rng: &mut R) -> Profile {
    let mut order: Vec<usize> = (1..=n).collect();
    let columns = (0..h)
        .map(|_| {
            order.shuffle(rng);
            Ranking::new(order.clone()).expect("shuffled identity is a permutation")
        })
        .collect();
    Profile::new(columns).expect("h >= 2 and n >= 2")
}

/// Calls `f(index, profile)` on `count` seeded random profiles. Chunks run in
/// parallel; the profile at each index depends only on `(seed, index)`.
/// Returns the results of `f` that are `Some`, in index order.
pub fn sample_profiles<T, F>(h: usize, n: usize, count: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &Profile) -> Option<T> + Sync,
{
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let lo = c * SAMPLE_CHUNK;
            let hi = (lo + SAMPLE_CHUNK).min(count);
            (lo..hi)
                .filter_map(|i| f(i, &random_profile(h, n, &mut rng)))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Looks for a profile on which `rule` shows reversal bias `j`.
pub fn find_witness(
    h: usize,
    n: usize,
    j: BiasType,
    rule: Rule,
    strategy: &SearchStrategy,
) -> Result<SearchOutcome> {
    strategy.validate()?;
    crate::error::check_range("voters", h as u64, 2, u8::MAX as u64)?;
    crate::error::check_range("alternatives", n as u64, 2, crate::set::MAX_ALTERNATIVES as u64)?;
    match strategy.mode {
        SearchMode::Constructive => {
            if rule != Rule::Minimax {
                return Ok(SearchOutcome::Inconclusive {
                    examined: 0,
                    reason: format!("no construction for {rule}"),
                });
            }
            Ok(match constructive_witness(h, n, j)? {
                Some(w) => SearchOutcome::Found(Box::new(w)),
                None => SearchOutcome::Inconclusive {
                    examined: 0,
                    reason: format!("no construction covers ({h}, {n}) for type {j}"),
                },
            })
        }
        SearchMode::Exhaustive => {
            if n > MAX_ENUMERATION_N {
                return Ok(SearchOutcome::Inconclusive {
                    examined: 0,
                    reason: format!("exhaustive scans support n <= {MAX_ENUMERATION_N}"),
                });
            }
            match scan_cell(h, n, rule, strategy.neutral, strategy.budget, &[j]) {
                Ok(scan) => Ok(match scan.witness(j) {
                    Some(w) => SearchOutcome::Found(Box::new(w.clone())),
                    None => SearchOutcome::CertifiedImmune {
                        examined: scan.examined,
                    },
                }),
                Err(Error::BudgetExceeded { count, budget }) => Ok(SearchOutcome::Inconclusive {
                    examined: 0,
                    reason: format!("{count} profiles exceed the budget of {budget}"),
                }),
                Err(e) => Err(e),
            }
        }
        SearchMode::Sampled => {
            let hits = sample_profiles(h, n, strategy.budget, strategy.seed, |i, p| {
                audit_rule(p, rule).flags().get(j).then(|| (i, p.clone()))
            });
            Ok(match hits.into_iter().next() {
                Some((_, p)) => {
                    SearchOutcome::Found(Box::new(Witness::from_profile(p, j, rule, WitnessSource::Sampled)))
                }
                None => SearchOutcome::Inconclusive {
                    examined: strategy.budget,
                    reason: "no witness among the sampled profiles".into(),
                },
            })
        }
    }
}
