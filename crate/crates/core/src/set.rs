//! Small sets of alternatives packed into a single word.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Maximum number of alternatives supported anywhere in the crate.
pub const MAX_ALTERNATIVES: usize = 64;

/// A set of alternatives `{1..n}` stored as a bitset; bit `x - 1` stands for
/// alternative `x`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AltSet(u64);

impl AltSet {
    pub const EMPTY: AltSet = AltSet(0);

    /// The whole set `{1..n}`.
    pub fn full(n: usize) -> AltSet {
        debug_assert!(n <= MAX_ALTERNATIVES);
        if n == MAX_ALTERNATIVES {
            AltSet(u64::MAX)
        } else {
            AltSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> AltSet {
        debug_assert!((1..=MAX_ALTERNATIVES).contains(&x));
        AltSet(1u64 << (x - 1))
    }

    pub const fn from_bits(bits: u64) -> AltSet {
        AltSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << (x - 1);
    }

    pub fn contains(self, x: usize) -> bool {
        x >= 1 && x <= MAX_ALTERNATIVES && self.0 >> (x - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: AltSet) -> AltSet {
        AltSet(self.0 & other.0)
    }

    pub fn union(self, other: AltSet) -> AltSet {
        AltSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: AltSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The unique element, if the set is a singleton.
    pub fn single(self) -> Option<usize> {
        (self.len() == 1).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for AltSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = AltSet::EMPTY;
        for x in iter {
            set.insert(x);
        }
        set
    }
}

impl fmt::Debug for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for AltSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for AltSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = ids.iter().find(|&&x| x == 0 || x > MAX_ALTERNATIVES) {
            return Err(serde::de::Error::custom(format!(
                "alternative id {bad} out of range"
            )));
        }
        Ok(ids.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: AltSet = [1, 2, 4].into_iter().collect();
        let b: AltSet = [1, 3, 4].into_iter().collect();
        assert_eq!(a.intersection(b).to_vec(), vec![1, 4]);
        assert_eq!(a.union(b), AltSet::full(4));
        assert_eq!(AltSet::singleton(3).single(), Some(3));
        assert_eq!(a.single(), None);
        assert!(AltSet::singleton(2).is_subset(a));
        assert!(!a.contains(3));
        assert_eq!(a.to_string(), "{1,2,4}");
        assert_eq!(AltSet::full(64).len(), 64);
    }

    #[test]
    fn json_is_sorted_id_list() {
        let a: AltSet = [5, 1].into_iter().collect();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,5]");
        let back: AltSet = serde_json::from_str("[5,1]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<AltSet>("[0]").is_err());
    }
}
