//! Reversal-bias predicates, the immunity tables and per-profile audits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::profile_threshold_of;
use crate::prefs::Profile;
use crate::rules::{
    borda, condorcet_loser_of, condorcet_winner_of, copeland_scores_of, minimax_direct_of, Rule,
};
use crate::set::AltSet;

/// Which of the three reversal biases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum BiasType {
    /// `C(p) = C(p^r) = {x}`.
    One,
    /// `|C(p)| = 1` and `C(p)` meets `C(p^r)`.
    Two,
    /// `|C(p)| < n` and `C(p)` meets `C(p^r)`.
    Three,
}

impl BiasType {
    pub const ALL: [BiasType; 3] = [BiasType::One, BiasType::Two, BiasType::Three];

    pub fn index(self) -> u8 {
        match self {
            BiasType::One => 1,
            BiasType::Two => 2,
            BiasType::Three => 3,
        }
    }

    pub fn from_index(j: u8) -> Result<BiasType> {
        match j {
            1 => Ok(BiasType::One),
            2 => Ok(BiasType::Two),
            3 => Ok(BiasType::Three),
            _ => Err(Error::OutOfRange {
                what: "bias type",
                value: j as u64,
                lo: 1,
                hi: 3,
            }),
        }
    }

    /// Whether Minimax is immune to this bias for `h` voters and `n` alternatives.
    pub fn minimax_immune(self, h: usize, n: usize) -> bool {
        match self {
            BiasType::One => {
                h <= 3 || n <= 3 || matches!((h, n), (4, 4) | (5, 4) | (7, 4) | (5, 5))
            }
            BiasType::Two => h == 2 || n <= 3 || (h, n) == (4, 4),
            BiasType::Three => n == 2 || (h, n) == (3, 3),
        }
    }
}

impl From<BiasType> for u8 {
    fn from(j: BiasType) -> u8 {
        j.index()
    }
}

impl TryFrom<u8> for BiasType {
    type Error = Error;

    fn try_from(j: u8) -> Result<BiasType> {
        BiasType::from_index(j)
    }
}

impl fmt::Display for BiasType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FromStr for BiasType {
    type Err = Error;

    fn from_str(s: &str) -> Result<BiasType> {
        let j: u8 = s.trim().parse().map_err(|_| Error::OutOfRange {
            what: "bias type",
            value: 0,
            lo: 1,
            hi: 3,
        })?;
        BiasType::from_index(j)
    }
}

/// Membership of `(h, n)` in the immunity table of bias type `j`.
pub fn in_table(j: u8, h: usize, n: usize) -> Result<bool> {
    Ok(BiasType::from_index(j)?.minimax_immune(h, n))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BiasFlags {
    pub type1: bool,
    pub type2: bool,
    pub type3: bool,
}

impl BiasFlags {
    pub fn get(self, j: BiasType) -> bool {
        match j {
            BiasType::One => self.type1,
            BiasType::Two => self.type2,
            BiasType::Three => self.type3,
        }
    }

    pub fn any(self) -> bool {
        self.type3
    }
}

/// Evaluates the three bias predicates on the selections for `p` and `p^r`.
pub fn bias_flags(selection_p: AltSet, selection_pr: AltSet, n: usize) -> BiasFlags {
    let meet = !selection_p.intersection(selection_pr).is_empty();
    let single = selection_p.len() == 1;
    BiasFlags {
        type1: single && selection_p == selection_pr,
        type2: single && meet,
        type3: selection_p.len() < n && meet,
    }
}

/// The bias evidence of one rule on one profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiasReport {
    pub rule: Rule,
    pub h: usize,
    pub n: usize,
    pub selection_p: AltSet,
    pub selection_pr: AltSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_pr: Option<usize>,
    pub type1: bool,
    pub type2: bool,
    pub type3: bool,
}

impl BiasReport {
    pub fn flags(&self) -> BiasFlags {
        BiasFlags {
            type1: self.type1,
            type2: self.type2,
            type3: self.type3,
        }
    }
}

pub fn audit_rule(p: &Profile, rule: Rule) -> BiasReport {
    let pr = p.reversed();
    let (selection_p, selection_pr, mu_p, mu_pr) = match rule {
        Rule::Minimax => {
            let (t, tr) = (p.tally(), pr.tally());
            (
                minimax_direct_of(&t),
                minimax_direct_of(&tr),
                Some(profile_threshold_of(&t)),
                Some(profile_threshold_of(&tr)),
            )
        }
        _ => (rule.apply(p), rule.apply(&pr), None, None),
    };
    let flags = bias_flags(selection_p, selection_pr, p.n());
    BiasReport {
        rule,
        h: p.h(),
        n: p.n(),
        selection_p,
        selection_pr,
        mu_p,
        mu_pr,
        type1: flags.type1,
        type2: flags.type2,
        type3: flags.type3,
    }
}

/// One report per requested rule, in the order given.
pub fn audit_profile(p: &Profile, rules: &[Rule]) -> Vec<BiasReport> {
    rules.iter().map(|&r| audit_rule(p, r)).collect()
}

/// Summary of all three rules on a profile and its reversal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    pub profile: String,
    pub mu_p: usize,
    pub mu_pr: usize,
    pub minimax: AltSet,
    pub minimax_reversal: AltSet,
    pub borda: AltSet,
    pub copeland: AltSet,
    pub condorcet_winner: Option<usize>,
    pub condorcet_loser: Option<usize>,
}

pub fn audit_record(p: &Profile) -> AuditRecord {
    let t = p.tally();
    let tr = t.transposed();
    AuditRecord {
        profile: p.to_text(),
        mu_p: profile_threshold_of(&t),
        mu_pr: profile_threshold_of(&tr),
        minimax: minimax_direct_of(&t),
        minimax_reversal: minimax_direct_of(&tr),
        borda: borda(p),
        copeland: copeland_scores_of(&t).argmax(),
        condorcet_winner: condorcet_winner_of(&t),
        condorcet_loser: condorcet_loser_of(&t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> AltSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn flag_examples() {
        let f = bias_flags(set(&[1]), set(&[1]), 4);
        assert_eq!((f.type1, f.type2, f.type3), (true, true, true));
        let f = bias_flags(set(&[1]), set(&[1, 2, 4]), 4);
        assert_eq!((f.type1, f.type2, f.type3), (false, true, true));
        let f = bias_flags(set(&[1, 2, 4]), set(&[1, 3, 4]), 4);
        assert_eq!((f.type1, f.type2, f.type3), (false, false, true));
        let f = bias_flags(AltSet::full(3), set(&[2]), 3);
        assert_eq!(f, BiasFlags::default());
        let f = bias_flags(set(&[1]), set(&[2]), 3);
        assert!(!f.any());
    }

    #[test]
    fn table_examples() {
        assert!(in_table(1, 7, 4).unwrap());
        assert!(!in_table(2, 7, 4).unwrap());
        assert!(in_table(3, 3, 3).unwrap());
        assert!(!in_table(3, 4, 3).unwrap());
        assert!(in_table(1, 2, 100).unwrap());
        assert!(in_table(2, 4, 4).unwrap());
        assert!(!in_table(1, 6, 4).unwrap());
        assert!(matches!(in_table(4, 2, 2), Err(Error::OutOfRange { .. })));
        assert!(in_table(0, 2, 2).is_err());
    }

    #[test]
    fn tables_are_strictly_nested() {
        let mut strict12 = false;
        let mut strict23 = false;
        for h in 2..40 {
            for n in 2..40 {
                let t1 = in_table(1, h, n).unwrap();
                let t2 = in_table(2, h, n).unwrap();
                let t3 = in_table(3, h, n).unwrap();
                assert!(!t3 || t2);
                assert!(!t2 || t1);
                strict12 |= t1 && !t2;
                strict23 |= t2 && !t3;
            }
        }
        assert!(strict12 && strict23);
    }

    #[test]
    fn audit_examples() {
        let intro = Profile::parse("1 1 1 2 3 4\n2 3 4 3 4 2\n3 4 2 4 2 3\n4 2 3 1 1 1").unwrap();
        let r = audit_rule(&intro, Rule::Minimax);
        assert!(r.type1);
        assert_eq!(r.selection_p, set(&[1]));

        let p55 =
            Profile::parse("1 1 1 5 2\n2 3 4 2 3\n3 4 5 3 4\n4 5 2 4 5\n5 2 3 1 1").unwrap();
        let r = audit_rule(&p55, Rule::Minimax);
        assert!(r.type2 && !r.type1);
        assert_eq!(r.selection_pr, set(&[1, 5]));
        assert_eq!((r.mu_p, r.mu_pr), (Some(3), Some(4)));

        let reports = audit_profile(&p55, &[Rule::Borda, Rule::Copeland]);
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| !r.type3 && r.mu_p.is_none()));
    }

    #[test]
    fn report_json_schema() {
        let p = Profile::parse("1 2\n2 1").unwrap();
        let v = serde_json::to_value(audit_rule(&p, Rule::Borda)).unwrap();
        assert!(v.get("mu_p").is_none());
        let v = serde_json::to_value(audit_rule(&p, Rule::Minimax)).unwrap();
        for key in [
            "rule", "h", "n", "selection_p", "selection_pr", "mu_p", "mu_pr", "type1", "type2",
            "type3",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let rec = serde_json::to_value(audit_record(&p)).unwrap();
        assert_eq!(rec["profile"], "1 2\n2 1");
        assert_eq!(rec["condorcet_winner"], serde_json::Value::Null);
    }

    #[test]
    fn bias_type_parsing() {
        assert_eq!("2".parse::<BiasType>().unwrap(), BiasType::Two);
        assert!("7".parse::<BiasType>().is_err());
        assert_eq!(serde_json::to_string(&BiasType::Three).unwrap(), "3");
    }
}
