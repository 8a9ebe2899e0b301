//! The Minimax, Borda and Copeland social choice correspondences.
//!
//! Every rule returns the full set of tied alternatives; no tie-breaking is
//! ever applied.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{dominant_set_of, minimal_threshold, profile_threshold_of, MajorityGraph};
use crate::prefs::{Profile, TallyMatrix};
use crate::set::AltSet;

/// Integer score per alternative, indexed by 1-based id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Scores(Vec<i64>);

impl Scores {
    pub fn get(&self, x: usize) -> i64 {
        self.0[x - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Alternatives attaining the maximum score.
    pub fn argmax(&self) -> AltSet {
        let best = self.0.iter().copied().max().expect("at least two alternatives");
        (1..=self.0.len()).filter(|&x| self.get(x) == best).collect()
    }
}

/// Greatest pairwise defeat of each alternative: `max_{y != x} t[y][x]`.
pub fn max_defeats(t: &TallyMatrix) -> Vec<usize> {
    let n = t.n();
    (1..=n)
        .map(|x| (1..=n).filter(|&y| y != x).map(|y| t.get(y, x)).max().unwrap_or(0))
        .collect()
}

/// Minimax from its definition: alternatives whose greatest pairwise defeat
/// is smallest.
pub fn minimax_direct_of(t: &TallyMatrix) -> AltSet {
    let defeats = max_defeats(t);
    let best = *defeats.iter().min().expect("at least two alternatives");
    (1..=t.n()).filter(|&x| defeats[x - 1] == best).collect()
}

pub fn minimax_direct(p: &Profile) -> AltSet {
    minimax_direct_of(&p.tally())
}

/// Minimax as the dominant set at the profile threshold.
pub fn minimax_threshold_of(t: &TallyMatrix) -> AltSet {
    dominant_set_of(t, profile_threshold_of(t)).expect("profile threshold is admissible")
}

pub fn minimax_threshold(p: &Profile) -> AltSet {
    minimax_threshold_of(&p.tally())
}

pub fn minimax(p: &Profile) -> AltSet {
    minimax_direct(p)
}

/// `f(x) = sum_i (n - rank_{p_i}(x))`.
pub fn borda_scores(p: &Profile) -> Scores {
    let n = p.n();
    let mut scores = vec![0i64; n];
    for q in p.columns() {
        for (j, x) in q.order().enumerate() {
            scores[x - 1] += (n - (j + 1)) as i64;
        }
    }
    Scores(scores)
}

pub fn borda(p: &Profile) -> AltSet {
    borda_scores(p).argmax()
}

/// Out-degree minus in-degree in the minimal-majority graph.
pub fn copeland_scores_of(t: &TallyMatrix) -> Scores {
    let g = MajorityGraph::from_tally(t, minimal_threshold(t.h()))
        .expect("minimal threshold is admissible");
    let scores = (1..=t.n())
        .map(|x| {
            g.graph().successors(x).len() as i64 - g.graph().predecessors(x).len() as i64
        })
        .collect();
    Scores(scores)
}

pub fn copeland_scores(p: &Profile) -> Scores {
    copeland_scores_of(&p.tally())
}

pub fn copeland(p: &Profile) -> AltSet {
    copeland_scores(p).argmax()
}

/// Alternative beating every other one by a strict majority.
pub fn condorcet_winner_of(t: &TallyMatrix) -> Option<usize> {
    let mu0 = minimal_threshold(t.h());
    let n = t.n();
    (1..=n).find(|&x| (1..=n).all(|y| y == x || t.get(x, y) >= mu0))
}

/// Alternative beaten by every other one by a strict majority.
pub fn condorcet_loser_of(t: &TallyMatrix) -> Option<usize> {
    let mu0 = minimal_threshold(t.h());
    let n = t.n();
    (1..=n).find(|&x| (1..=n).all(|y| y == x || t.get(y, x) >= mu0))
}

pub fn condorcet_winner(p: &Profile) -> Option<usize> {
    condorcet_winner_of(&p.tally())
}

pub fn condorcet_loser(p: &Profile) -> Option<usize> {
    condorcet_loser_of(&p.tally())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Minimax,
    Borda,
    Copeland,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Minimax, Rule::Borda, Rule::Copeland];

    pub fn apply(self, p: &Profile) -> AltSet {
        match self {
            Rule::Minimax => minimax(p),
            Rule::Borda => borda(p),
            Rule::Copeland => copeland(p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Minimax => "minimax",
            Rule::Borda => "borda",
            Rule::Copeland => "copeland",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        match s.to_ascii_lowercase().as_str() {
            "minimax" | "m" => Ok(Rule::Minimax),
            "borda" | "bor" => Ok(Rule::Borda),
            "copeland" | "cop" => Ok(Rule::Copeland),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = "1 1 1 2 3 4\n2 3 4 3 4 2\n3 4 2 4 2 3\n4 2 3 1 1 1";

    fn set(xs: &[usize]) -> AltSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn minimax_examples() {
        let p = Profile::parse(INTRO).unwrap();
        assert_eq!(minimax_direct(&p), set(&[1]));
        assert_eq!(minimax_direct(&p.reversed()), set(&[1]));
        assert_eq!(minimax_threshold(&p), set(&[1]));

        let unanimous = Profile::from_orders(vec![vec![3, 1, 2, 4]; 3]).unwrap();
        assert_eq!(minimax_direct(&unanimous), set(&[3]));

        let p55 = Profile::parse(
            "1 1 1 5 2\n2 3 4 2 3\n3 4 5 3 4\n4 5 2 4 5\n5 2 3 1 1",
        )
        .unwrap();
        assert_eq!(minimax_direct(&p55), set(&[1]));
        assert_eq!(minimax_threshold(&p55.reversed()), set(&[1, 5]));
    }

    #[test]
    fn minimax_two_alternatives_is_majority() {
        let p = Profile::from_orders(vec![vec![1, 2], vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(minimax_threshold(&p), set(&[1]));
        let tie = Profile::from_orders(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(minimax_threshold(&tie), set(&[1, 2]));
        assert_eq!(minimax_direct(&tie), set(&[1, 2]));
    }

    #[test]
    fn borda_examples() {
        let p = Profile::parse("1 1 2\n2 2 3\n3 3 1").unwrap();
        assert_eq!(borda_scores(&p).as_slice(), &[4, 4, 1]);
        assert_eq!(borda(&p), set(&[1, 2]));
        assert_ne!(borda(&p), minimax(&p));
        let unanimous = Profile::from_orders(vec![vec![2, 3, 1]; 4]).unwrap();
        assert_eq!(borda(&unanimous), set(&[2]));
    }

    #[test]
    fn copeland_examples() {
        let rot = Profile::from_orders(vec![vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]]).unwrap();
        assert_eq!(copeland_scores(&rot).as_slice(), &[0, 0, 0]);
        assert_eq!(copeland(&rot), AltSet::full(3));
        let unanimous = Profile::from_orders(vec![vec![2, 3, 1]; 4]).unwrap();
        assert_eq!(copeland(&unanimous), set(&[2]));
        assert_eq!(copeland_scores(&unanimous).as_slice(), &[-2, 2, 0]);
    }

    #[test]
    fn condorcet_examples() {
        let unanimous = Profile::from_orders(vec![vec![2, 3, 1]; 4]).unwrap();
        assert_eq!(condorcet_winner(&unanimous), Some(2));
        assert_eq!(condorcet_loser(&unanimous), Some(1));
        let rot = Profile::from_orders(vec![vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]]).unwrap();
        assert_eq!(condorcet_winner(&rot), None);
        assert_eq!(condorcet_loser(&rot), None);
        let p = Profile::parse(INTRO).unwrap();
        assert_eq!(condorcet_winner(&p), condorcet_loser(&p.reversed()));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.name()));
        }
        assert!("schulze".parse::<Rule>().is_err());
    }
}
