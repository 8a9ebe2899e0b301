//! Allocation-free profile evaluation for `n <= 8`, used by exhaustive scans.
//!
//! A tally lives in a fixed 8x8 byte grid, cell `8 * x + y` (0-based) holding
//! the number of voters ranking `x` above `y`. The scan keeps the tally of the
//! profile and of its reversal side by side and updates both as rankings are
//! appended.
//!
//! Minimax is computed twice per profile: from the greatest pairwise defeats,
//! and as the dominant set of the threshold graphs scanned upwards from the
//! minimal majority. The two must agree; disagreements are counted.

use rayon::prelude::*;

use crate::bias::{bias_flags, BiasFlags};
use crate::error::{check_range, Result};
use crate::graph::minimal_threshold;
use crate::prefs::Ranking;
use crate::rules::Rule;
use crate::set::AltSet;

use super::enumerate::{all_rankings, MAX_ENUMERATION_N};

const W: usize = 8;
type Grid = [u8; W * W];

/// Precomputed pair grids for every ranking of `{1..n}`.
pub(crate) struct RankingTable {
    n: usize,
    rankings: Vec<Ranking>,
    above: Vec<Grid>,
    above_reversed: Vec<Grid>,
}

impl RankingTable {
    pub(crate) fn new(n: usize) -> Result<RankingTable> {
        let rankings = all_rankings(n)?;
        let grid_of = |order: &[u8]| {
            let mut g = [0u8; W * W];
            for (a, &x) in order.iter().enumerate() {
                for &y in &order[a + 1..] {
                    g[(x as usize - 1) * W + (y as usize - 1)] = 1;
                }
            }
            g
        };
        let above = rankings.iter().map(|q| grid_of(q.raw())).collect();
        let above_reversed = rankings.iter().map(|q| grid_of(q.reversed().raw())).collect();
        Ok(RankingTable {
            n,
            rankings,
            above,
            above_reversed,
        })
    }

    pub(crate) fn len(&self) -> u32 {
        self.rankings.len() as u32
    }

    pub(crate) fn ranking(&self, k: u32) -> &Ranking {
        &self.rankings[k as usize]
    }

    /// Index of a ranking of `{1..n}`.
    #[cfg(test)]
    pub(crate) fn index_of(&self, q: &Ranking) -> u32 {
        self.rankings.binary_search(q).expect("ranking of this table") as u32
    }
}

#[inline]
fn add(a: &Grid, b: &Grid) -> Grid {
    let mut out = [0u8; W * W];
    for i in 0..W * W {
        out[i] = a[i] + b[i];
    }
    out
}

/// Minimax via greatest pairwise defeat: column maxima of the tally.
#[inline]
fn minimax_by_defeats(t: &Grid, n: usize) -> u64 {
    let mut colmax = [0u8; W];
    for row in t.chunks_exact(W).take(n) {
        for x in 0..W {
            colmax[x] = colmax[x].max(row[x]);
        }
    }
    let best = colmax[..n].iter().copied().min().unwrap_or(0);
    let mut set = 0u64;
    for (x, &d) in colmax[..n].iter().enumerate() {
        if d == best {
            set |= 1 << x;
        }
    }
    set
}

/// Arc mask of the threshold graph: bit `8 * x + y` set iff `t[x][y] >= mu`.
#[inline]
fn arcs_at(t: &Grid, mu: u8) -> u64 {
    let mut m = 0u64;
    for (i, &c) in t.iter().enumerate() {
        m |= u64::from(c >= mu) << i;
    }
    m
}

/// Vertices with an incoming arc.
#[inline]
fn heads(arcs: u64) -> u64 {
    let mut m = arcs | arcs >> 32;
    m |= m >> 16;
    m |= m >> 8;
    m & 0xff
}

/// Vertices with an outgoing arc.
#[inline]
fn tails(arcs: u64) -> u64 {
    let mut out = 0u64;
    for x in 0..W {
        out |= u64::from(arcs >> (W * x) & 0xff != 0) << x;
    }
    out
}

/// Minimax of the profile and of its reversal as dominant sets at the
/// respective profile thresholds, both read off the profile's own graphs.
#[inline]
fn minimax_by_thresholds(t: &Grid, n: usize, h: u8) -> (u64, u64) {
    let full = (1u64 << n) - 1;
    let (mut sel, mut sel_rev) = (0u64, 0u64);
    for mu in minimal_threshold(h as usize) as u8..=h {
        let arcs = arcs_at(t, mu);
        if sel == 0 {
            sel = full & !heads(arcs);
        }
        if sel_rev == 0 {
            // reversing the profile reverses every arc
            sel_rev = full & !tails(arcs);
        }
        if sel != 0 && sel_rev != 0 {
            break;
        }
    }
    (sel, sel_rev)
}

#[inline]
fn borda_by_tally(t: &Grid, n: usize) -> u64 {
    // n - rank(x) counts the alternatives ranked below x
    let mut scores = [0u32; W];
    for x in 0..n {
        scores[x] = t[x * W..x * W + n].iter().map(|&c| u32::from(c)).sum();
    }
    argmax(&scores[..n])
}

#[inline]
fn copeland_by_tally(t: &Grid, n: usize, h: u8) -> u64 {
    let arcs = arcs_at(t, minimal_threshold(h as usize) as u8);
    let mut scores = [0i32; W];
    for x in 0..n {
        let out = (arcs >> (W * x) & 0xff).count_ones() as i32;
        let inn = (0..n).filter(|&y| arcs >> (W * y + x) & 1 == 1).count() as i32;
        scores[x] = out - inn;
    }
    argmax(&scores[..n])
}

fn argmax<T: Ord + Copy>(scores: &[T]) -> u64 {
    let best = scores.iter().copied().max().expect("nonempty");
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == best)
        .fold(0, |acc, (x, _)| acc | 1 << x)
}

/// Selections of `rule` on a profile and on its reversal, given both tallies.
/// Also reports whether the two Minimax routes disagreed.
#[inline]
fn evaluate(rule: Rule, t: &Grid, tr: &Grid, n: usize, h: u8) -> (u64, u64, bool) {
    match rule {
        Rule::Minimax => {
            let direct = minimax_by_defeats(t, n);
            let direct_rev = minimax_by_defeats(tr, n);
            let (thr, thr_rev) = minimax_by_thresholds(t, n, h);
            (direct, direct_rev, direct != thr || direct_rev != thr_rev)
        }
        Rule::Borda => (borda_by_tally(t, n), borda_by_tally(tr, n), false),
        Rule::Copeland => (copeland_by_tally(t, n, h), copeland_by_tally(tr, n, h), false),
    }
}

/// A profile found by a scan, as ranking indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Hit {
    pub seq: Vec<u32>,
    pub selection_p: AltSet,
    pub selection_pr: AltSet,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ScanResult {
    pub examined: u64,
    /// First profile, in enumeration order, showing bias type 1, 2, 3.
    pub first: [Option<Hit>; 3],
    pub kramer_mismatches: u64,
    pub first_mismatch: Option<Vec<u32>>,
}

impl ScanResult {
    fn merge(mut self, other: ScanResult) -> ScanResult {
        self.examined += other.examined;
        self.kramer_mismatches += other.kramer_mismatches;
        for (mine, theirs) in self.first.iter_mut().zip(other.first) {
            if mine.is_none() {
                *mine = theirs;
            }
        }
        if self.first_mismatch.is_none() {
            self.first_mismatch = other.first_mismatch;
        }
        self
    }
}

pub(crate) struct Scan<'a> {
    pub table: &'a RankingTable,
    pub h: usize,
    pub rule: Rule,
    /// Fix the first voter to the identity ranking.
    pub neutral: bool,
    /// Stop a partition once every flag in this mask (bit j-1) has a witness.
    pub stop_mask: u8,
}

struct Acc {
    result: ScanResult,
    found: u8,
}

impl Scan<'_> {
    pub(crate) fn run(&self) -> Result<ScanResult> {
        check_range("voters", self.h as u64, 2, u8::MAX as u64)?;
        check_range("alternatives", self.table.n as u64, 2, MAX_ENUMERATION_N as u64)?;
        let m = self.table.len();
        let zero = [0u8; W * W];
        if self.neutral {
            let (t, tr) = (self.table.above[0], self.table.above_reversed[0]);
            Ok((0..m)
                .into_par_iter()
                .map(|k| self.partition(&[0, k], &t, &tr))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(ScanResult::default(), ScanResult::merge))
        } else {
            Ok((0..m)
                .into_par_iter()
                .map(|k| self.partition(&[k], &zero, &zero))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(ScanResult::default(), ScanResult::merge))
        }
    }

    /// Scans every completion of `prefix`; the last prefix entry is added to
    /// the given tallies here, the earlier ones must already be in them.
    fn partition(&self, prefix: &[u32], t: &Grid, tr: &Grid) -> ScanResult {
        let last = *prefix.last().expect("nonempty prefix");
        let t = add(t, &self.table.above[last as usize]);
        let tr = add(tr, &self.table.above_reversed[last as usize]);
        let mut seq = prefix.to_vec();
        let mut acc = Acc {
            result: ScanResult::default(),
            found: 0,
        };
        if seq.len() == self.h {
            self.leaf(&seq, &t, &tr, &mut acc);
        } else {
            self.descend(&mut seq, last, &t, &tr, &mut acc);
        }
        acc.result
    }

    fn descend(&self, seq: &mut Vec<u32>, lo: u32, t: &Grid, tr: &Grid, acc: &mut Acc) {
        let m = self.table.len();
        let last_level = seq.len() + 1 == self.h;
        for k in lo..m {
            let t2 = add(t, &self.table.above[k as usize]);
            let tr2 = add(tr, &self.table.above_reversed[k as usize]);
            seq.push(k);
            if last_level {
                self.leaf(seq, &t2, &tr2, acc);
            } else {
                self.descend(seq, k, &t2, &tr2, acc);
            }
            seq.pop();
            if self.stop_mask != 0 && acc.found & self.stop_mask == self.stop_mask {
                return;
            }
        }
    }

    #[inline]
    fn leaf(&self, seq: &[u32], t: &Grid, tr: &Grid, acc: &mut Acc) {
        let n = self.table.n;
        let (sel, sel_rev, mismatch) = evaluate(self.rule, t, tr, n, self.h as u8);
        let r = &mut acc.result;
        r.examined += 1;
        if mismatch {
            r.kramer_mismatches += 1;
            if r.first_mismatch.is_none() {
                r.first_mismatch = Some(seq.to_vec());
            }
        }
        let flags = bias_flags(AltSet::from_bits(sel), AltSet::from_bits(sel_rev), n);
        if flags.type3 {
            record(acc, seq, flags, sel, sel_rev);
        }
    }
}

#[cold]
fn record(acc: &mut Acc, seq: &[u32], flags: BiasFlags, sel: u64, sel_rev: u64) {
    for (j, fired) in [flags.type1, flags.type2, flags.type3].into_iter().enumerate() {
        if fired && acc.result.first[j].is_none() {
            acc.result.first[j] = Some(Hit {
                seq: seq.to_vec(),
                selection_p: AltSet::from_bits(sel),
                selection_pr: AltSet::from_bits(sel_rev),
            });
            acc.found |= 1 << j;
        }
    }
}

/// Evaluates a single profile given as ranking indices; used to cross-check
/// the kernel against the general implementation.
#[cfg(test)]
pub(crate) fn evaluate_indices(table: &RankingTable, rule: Rule, seq: &[u32]) -> (AltSet, AltSet, bool) {
    let mut t = [0u8; W * W];
    let mut tr = [0u8; W * W];
    for &k in seq {
        t = add(&t, &table.above[k as usize]);
        tr = add(&tr, &table.above_reversed[k as usize]);
    }
    let (a, b, mismatch) = evaluate(rule, &t, &tr, table.n, seq.len() as u8);
    (AltSet::from_bits(a), AltSet::from_bits(b), mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefs::Profile;
    use crate::rules::{borda, copeland, minimax_direct};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_matches_general_rules_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8 {
            let table = RankingTable::new(n).unwrap();
            for _ in 0..300 {
                let h = rng.gen_range(2..=15);
                let seq: Vec<u32> = (0..h).map(|_| rng.gen_range(0..table.len())).collect();
                let p = Profile::new(seq.iter().map(|&k| table.ranking(k).clone()).collect())
                    .unwrap();
                let pr = p.reversed();
                for rule in Rule::ALL {
                    let (a, b, mismatch) = evaluate_indices(&table, rule, &seq);
                    assert!(!mismatch);
                    let (ea, eb) = match rule {
                        Rule::Minimax => (minimax_direct(&p), minimax_direct(&pr)),
                        Rule::Borda => (borda(&p), borda(&pr)),
                        Rule::Copeland => (copeland(&p), copeland(&pr)),
                    };
                    assert_eq!((a, b), (ea, eb), "rule {rule} on {p:?}");
                }
            }
        }
    }

    #[test]
    fn index_lookup_round_trips() {
        let table = RankingTable::new(4).unwrap();
        for k in 0..table.len() {
            assert_eq!(table.index_of(table.ranking(k)), k);
        }
    }

    #[test]
    fn scan_counts_match_multiset_counts() {
        let table = RankingTable::new(3).unwrap();
        for (h, neutral, expected) in [(3, false, 56), (3, true, 21), (2, true, 6), (4, false, 126)] {
            let scan = Scan {
                table: &table,
                h,
                rule: Rule::Minimax,
                neutral,
                stop_mask: 0,
            };
            let r = scan.run().unwrap();
            assert_eq!(r.examined, expected);
            assert_eq!(r.kramer_mismatches, 0);
        }
    }
}
