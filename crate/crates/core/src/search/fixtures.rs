//! Catalogue of hand-built profiles exhibiting each kind of reversal bias.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prefs::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FixtureId {
    /// Six voters, four alternatives; Minimax selects `{1}` on both sides.
    Intro64,
    /// Three voters, `n >= 4`: `{1}` against the whole set.
    Tm2ThreeN,
    Tm2FiveFour,
    Tm2FiveFive,
    Tm2SevenFour,
    /// Two voters, `n >= 3`: `{1, n}` against `{n - 1, n}`.
    Tm3TwoN,
    /// Three alternatives, `h != 3`: `{1, 3}` against `{2, 3}`.
    Tm3HThree,
    Tm3FourFour,
    /// Borda and Minimax disagree here.
    Confronto133,
}

impl FixtureId {
    pub const ALL: [FixtureId; 9] = [
        FixtureId::Intro64,
        FixtureId::Tm2ThreeN,
        FixtureId::Tm2FiveFour,
        FixtureId::Tm2FiveFive,
        FixtureId::Tm2SevenFour,
        FixtureId::Tm3TwoN,
        FixtureId::Tm3HThree,
        FixtureId::Tm3FourFour,
        FixtureId::Confronto133,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureId::Intro64 => "intro-6-4",
            FixtureId::Tm2ThreeN => "tm2-3-n",
            FixtureId::Tm2FiveFour => "tm2-5-4",
            FixtureId::Tm2FiveFive => "tm2-5-5",
            FixtureId::Tm2SevenFour => "tm2-7-4",
            FixtureId::Tm3TwoN => "tm3-2-n",
            FixtureId::Tm3HThree => "tm3-h-3",
            FixtureId::Tm3FourFour => "tm3-4-4",
            FixtureId::Confronto133 => "confronto1-3-3",
        }
    }

    /// Name of the free parameter for parameterized families.
    pub fn parameter(self) -> Option<&'static str> {
        match self {
            FixtureId::Tm2ThreeN | FixtureId::Tm3TwoN => Some("n"),
            FixtureId::Tm3HThree => Some("h"),
            _ => None,
        }
    }

    /// `(h, n)` of the fixture given its parameter.
    pub fn shape(self, param: usize) -> (usize, usize) {
        match self {
            FixtureId::Intro64 => (6, 4),
            FixtureId::Tm2ThreeN => (3, param),
            FixtureId::Tm2FiveFour => (5, 4),
            FixtureId::Tm2FiveFive => (5, 5),
            FixtureId::Tm2SevenFour => (7, 4),
            FixtureId::Tm3TwoN => (2, param),
            FixtureId::Tm3HThree => (param, 3),
            FixtureId::Tm3FourFour => (4, 4),
            FixtureId::Confronto133 => (3, 3),
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FixtureId> {
        FixtureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

fn matrix(text: &str) -> Profile {
    Profile::parse(text).expect("fixture matrices are valid")
}

/// Builds a fixture. Parameterized families need `param`; the others ignore it.
pub fn fixture(id: FixtureId, param: Option<usize>) -> Result<Profile> {
    let need = |lo: usize| -> Result<usize> {
        let value = param.ok_or_else(|| {
            Error::Precondition(format!(
                "fixture {id} needs its parameter {}",
                id.parameter().unwrap_or("?")
            ))
        })?;
        if value < lo {
            return Err(Error::OutOfRange {
                what: "fixture parameter",
                value: value as u64,
                lo: lo as u64,
                hi: u64::MAX,
            });
        }
        Ok(value)
    };
    let p = match id {
        FixtureId::Intro64 => matrix("1 1 1 2 3 4\n2 3 4 3 4 2\n3 4 2 4 2 3\n4 2 3 1 1 1"),
        FixtureId::Tm2FiveFour => matrix("1 1 1 2 3\n2 3 4 3 4\n3 4 2 4 2\n4 2 3 1 1"),
        FixtureId::Tm2FiveFive => {
            matrix("1 1 1 5 2\n2 3 4 2 3\n3 4 5 3 4\n4 5 2 4 5\n5 2 3 1 1")
        }
        FixtureId::Tm2SevenFour => {
            matrix("1 1 1 1 3 4 2\n2 3 4 2 4 2 3\n3 4 2 3 2 3 4\n4 2 3 4 1 1 1")
        }
        FixtureId::Tm3FourFour => matrix("1 1 4 4\n2 2 2 2\n3 3 3 3\n4 4 1 1"),
        FixtureId::Confronto133 => matrix("1 1 2\n2 2 3\n3 3 1"),
        FixtureId::Tm2ThreeN => {
            let n = need(4)?;
            let middle: Vec<usize> = (5..=n).collect();
            let mut p1 = vec![1];
            p1.extend(&middle);
            p1.extend([2, 3, 4]);
            let mut p2 = vec![1];
            p2.extend(&middle);
            p2.extend([3, 4, 2]);
            let mut p3 = vec![4, 2, 3];
            p3.extend(middle.iter().rev());
            p3.push(1);
            Profile::from_orders(vec![p1, p2, p3])?
        }
        FixtureId::Tm3TwoN => {
            let n = need(3)?;
            let p1: Vec<usize> = (1..=n).collect();
            let p2: Vec<usize> = std::iter::once(n).chain(1..n).collect();
            Profile::from_orders(vec![p1, p2])?
        }
        FixtureId::Tm3HThree => {
            let h = need(2)?;
            if h == 3 {
                return Err(Error::Precondition(
                    "fixture tm3-h-3 is defined for h != 3".into(),
                ));
            }
            let (a, b, c, d) = ([1, 2, 3], [3, 1, 2], [2, 3, 1], [1, 3, 2]);
            let k = h / 3;
            let groups: Vec<([usize; 3], usize)> = match h % 3 {
                2 => vec![(a, 1 + k), (b, 1 + k), (c, k)],
                1 => vec![(a, k), (c, k), (b, k), (d, 1)],
                _ => {
                    let k = k - 1;
                    vec![(a, k), (b, k), (c, k + 1), (d, 2)]
                }
            };
            let orders: Vec<Vec<usize>> = groups
                .into_iter()
                .flat_map(|(q, count)| std::iter::repeat(q.to_vec()).take(count))
                .collect();
            Profile::from_orders(orders)?
        }
    };
    Ok(p)
}

/// Looks a fixture up by name.
pub fn fixture_by_name(name: &str, param: Option<usize>) -> Result<Profile> {
    fixture(name.parse()?, param)
}
