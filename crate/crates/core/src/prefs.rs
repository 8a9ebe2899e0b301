//! Linear preference orders, preference profiles and pairwise tallies.
//!
//! Alternatives are the 1-based ids `1..=n`. A [`Ranking`] is stored as the
//! column vector of alternatives by rank position, and a [`Profile`] is the
//! `n x h` matrix whose `i`-th column is the ranking of voter `i`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::set::MAX_ALTERNATIVES;

/// A strict linear order on `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking {
    order: Vec<u8>,
    position: Vec<u8>,
}

impl Ranking {
    /// Builds a ranking from the alternatives listed best first.
    pub fn new(order: Vec<usize>) -> Result<Ranking> {
        let n = order.len();
        let invalid = |reason: &str| Error::InvalidRanking {
            order: order.clone(),
            reason: reason.to_string(),
        };
        if n < 2 {
            return Err(invalid("at least two alternatives are required"));
        }
        if n > MAX_ALTERNATIVES {
            return Err(invalid("too many alternatives"));
        }
        let mut position = vec![0u8; n];
        for (j, &x) in order.iter().enumerate() {
            if x == 0 || x > n {
                return Err(invalid("alternative id outside 1..=n"));
            }
            if position[x - 1] != 0 {
                return Err(invalid("repeated alternative"));
            }
            position[x - 1] = (j + 1) as u8;
        }
        Ok(Ranking {
            order: order.into_iter().map(|x| x as u8).collect(),
            position,
        })
    }

    /// The order `1 > 2 > ... > n`.
    pub fn identity(n: usize) -> Ranking {
        Ranking::new((1..=n).collect()).expect("identity ranking is valid for n >= 2")
    }

    pub(crate) fn from_raw(order: &[u8]) -> Ranking {
        let mut position = vec![0u8; order.len()];
        for (j, &x) in order.iter().enumerate() {
            position[x as usize - 1] = (j + 1) as u8;
        }
        Ranking {
            order: order.to_vec(),
            position,
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Alternative ranked at `position` (1-based).
    pub fn at(&self, position: usize) -> usize {
        self.order[position - 1] as usize
    }

    /// Alternatives best first.
    pub fn order(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.order.iter().map(|&x| x as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.order().collect()
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.order
    }

    /// Position of `x`, `1` meaning best.
    pub fn rank_of(&self, x: usize) -> Result<usize> {
        if x == 0 || x > self.n() {
            return Err(Error::OutOfRange {
                what: "alternative",
                value: x as u64,
                lo: 1,
                hi: self.n() as u64,
            });
        }
        Ok(self.position[x - 1] as usize)
    }

    /// `true` when `x` is ranked strictly above `y`. Ids must be in range.
    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.position[x - 1] < self.position[y - 1]
    }

    /// The ranking read bottom to top.
    pub fn reversed(&self) -> Ranking {
        let mut order = self.order.clone();
        order.reverse();
        Ranking::from_raw(&order)
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.order)
    }
}

/// Reverses a single ranking.
pub fn reverse_ranking(q: &Ranking) -> Ranking {
    q.reversed()
}

/// A list of `h >= 2` rankings over the same `n >= 2` alternatives.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    n: usize,
    columns: Vec<Ranking>,
}

impl Profile {
    pub fn new(columns: Vec<Ranking>) -> Result<Profile> {
        if columns.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "at least two voters are required, got {}",
                columns.len()
            )));
        }
        let n = columns[0].n();
        if let Some((i, q)) = columns.iter().enumerate().find(|(_, q)| q.n() != n) {
            return Err(Error::InvalidProfile(format!(
                "voter {} ranks {} alternatives, voter 1 ranks {n}",
                i + 1,
                q.n()
            )));
        }
        Ok(Profile { n, columns })
    }

    /// Builds a profile from columns given as alternative lists, best first.
    pub fn from_orders<I>(orders: I) -> Result<Profile>
    where
        I: IntoIterator,
        I::Item: Into<Vec<usize>>,
    {
        let columns = orders
            .into_iter()
            .map(|o| Ranking::new(o.into()))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(columns)
    }

    /// Number of alternatives.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of voters.
    pub fn h(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Ranking] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &Ranking {
        &self.columns[i - 1]
    }

    pub fn reversed(&self) -> Profile {
        Profile {
            n: self.n,
            columns: self.columns.iter().map(Ranking::reversed).collect(),
        }
    }

    /// Reorders the voters: voter `i` of the result is voter `perm[i - 1]` here.
    pub fn permute_voters(&self, perm: &[usize]) -> Profile {
        assert_eq!(perm.len(), self.h());
        Profile {
            n: self.n,
            columns: perm.iter().map(|&i| self.columns[i - 1].clone()).collect(),
        }
    }

    /// Renames every alternative `x` to `perm[x - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Profile {
        assert_eq!(perm.len(), self.n);
        let columns = self
            .columns
            .iter()
            .map(|q| {
                let order: Vec<u8> = q.raw().iter().map(|&x| perm[x as usize - 1] as u8).collect();
                Ranking::from_raw(&order)
            })
            .collect();
        Profile { n: self.n, columns }
    }

    pub fn tally(&self) -> TallyMatrix {
        TallyMatrix::of(self)
    }

    /// Parses the whitespace separated matrix format: `n` rows, `h` columns.
    pub fn parse(text: &str) -> Result<Profile> {
        let rows: Vec<Vec<&str>> = text
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>())
            .filter(|r| !r.is_empty())
            .collect();
        let n = rows.len();
        if n < 2 {
            return Err(Error::Parse {
                row: n + 1,
                column: 1,
                message: "at least two rows (alternatives) are required".into(),
            });
        }
        if n > MAX_ALTERNATIVES {
            return Err(Error::Parse {
                row: MAX_ALTERNATIVES + 1,
                column: 1,
                message: format!("at most {MAX_ALTERNATIVES} alternatives are supported"),
            });
        }
        let h = rows[0].len();
        if h < 2 {
            return Err(Error::Parse {
                row: 1,
                column: h + 1,
                message: "at least two columns (voters) are required".into(),
            });
        }
        let mut orders = vec![Vec::with_capacity(n); h];
        let mut seen = vec![vec![false; n]; h];
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != h) {
            return Err(Error::Parse {
                row: r + 1,
                column: row.len().min(h) + 1,
                message: format!("expected {h} entries, found {}", row.len()),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            for (c, token) in row.iter().enumerate() {
                let err = |message: String| Error::Parse {
                    row: r + 1,
                    column: c + 1,
                    message,
                };
                let x: usize = token
                    .parse()
                    .map_err(|_| err(format!("`{token}` is not an alternative id")))?;
                if x == 0 || x > n {
                    return Err(err(format!("alternative {x} outside 1..={n}")));
                }
                if std::mem::replace(&mut seen[c][x - 1], true) {
                    return Err(err(format!(
                        "alternative {x} repeated; column {} is not a permutation",
                        c + 1
                    )));
                }
                orders[c].push(x);
            }
        }
        Profile::from_orders(orders)
    }

    /// Canonical text: rows separated by `\n`, entries by one space, no
    /// trailing whitespace.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.n {
            if j > 1 {
                out.push('\n');
            }
            for (i, q) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&q.at(j).to_string());
            }
        }
        out
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Profile> {
        Profile::parse(s)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.columns.iter()).finish()
    }
}

pub fn reverse_profile(p: &Profile) -> Profile {
    p.reversed()
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    Profile::parse(text)
}

pub fn serialize_profile(p: &Profile) -> String {
    p.to_text()
}

/// Pairwise counts `t[x][y] = |{i : x >_{p_i} y}|`.
#[derive(Clone, PartialEq, Eq)]
pub struct TallyMatrix {
    n: usize,
    h: usize,
    counts: Vec<u32>,
}

impl TallyMatrix {
    fn of(p: &Profile) -> TallyMatrix {
        let n = p.n();
        let mut counts = vec![0u32; n * n];
        for q in p.columns() {
            let order = q.raw();
            for (a, &x) in order.iter().enumerate() {
                let row = (x as usize - 1) * n;
                for &y in &order[a + 1..] {
                    counts[row + y as usize - 1] += 1;
                }
            }
        }
        TallyMatrix {
            n,
            h: p.h(),
            counts,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of voters ranking `x` above `y`; zero on the diagonal.
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.counts[(x - 1) * self.n + (y - 1)] as usize
    }

    /// The tally of the reversed profile.
    pub fn transposed(&self) -> TallyMatrix {
        let n = self.n;
        let mut counts = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                counts[y * n + x] = self.counts[x * n + y];
            }
        }
        TallyMatrix {
            n,
            h: self.h,
            counts,
        }
    }
}

impl fmt::Debug for TallyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u32]> = self.counts.chunks(self.n).collect();
        f.debug_struct("TallyMatrix")
            .field("h", &self.h)
            .field("t", &rows)
            .finish()
    }
}

pub fn tally(p: &Profile) -> TallyMatrix {
    p.tally()
}
