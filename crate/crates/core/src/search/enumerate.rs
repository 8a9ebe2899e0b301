//! Anonymous profile enumeration: one representative per multiset of rankings.
//!
//! Rankings are ordered lexicographically by their order vector, so index 0 is
//! the identity ranking. A representative is a nondecreasing sequence of
//! ranking indices.

use crate::error::{check_range, Error, Result};
use crate::prefs::{Profile, Ranking};

/// Largest `n` for which the `n!` rankings are materialized.
pub const MAX_ENUMERATION_N: usize = 8;

/// All rankings of `{1..n}` in lexicographic order of their order vectors.
pub fn all_rankings(n: usize) -> Result<Vec<Ranking>> {
    check_range("alternatives", n as u64, 2, MAX_ENUMERATION_N as u64)?;
    let mut order: Vec<u8> = (1..=n as u8).collect();
    let mut out = Vec::with_capacity(factorial(n) as usize);
    loop {
        out.push(Ranking::from_raw(&order));
        if !next_permutation(&mut order) {
            return Ok(out);
        }
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of multisets of size `k` drawn from `m` kinds, `C(m + k - 1, k)`.
pub fn multiset_count(m: u128, k: u128) -> Option<u128> {
    if m == 0 {
        return Some(u128::from(k == 0));
    }
    let mut r: u128 = 1;
    for i in 1..=k {
        r = r.checked_mul(m - 1 + i)? / i;
    }
    Some(r)
}

/// `C(n! + h - 1, h)`; `None` on overflow.
pub fn anonymous_count(h: usize, n: usize) -> Option<u128> {
    if n > 34 {
        return None;
    }
    multiset_count(factorial(n), h as u128)
}

/// Profiles visited when the first voter is additionally fixed to the
/// identity ranking: `C(n! + h - 2, h - 1)`.
pub fn neutral_count(h: usize, n: usize) -> Option<u128> {
    if n > 34 {
        return None;
    }
    multiset_count(factorial(n), h as u128 - 1)
}

/// Size of the enumeration space with or without the neutrality reduction.
pub fn reduced_count(h: usize, n: usize, neutral: bool) -> Option<u128> {
    if neutral {
        neutral_count(h, n)
    } else {
        anonymous_count(h, n)
    }
}

/// Calls `f` on every nondecreasing sequence of length `len` over `0..m`
/// whose first element is at least `start`.
pub(crate) fn for_each_sequence<F: FnMut(&[u32])>(len: usize, m: u32, start: u32, f: &mut F) {
    fn go<F: FnMut(&[u32])>(seq: &mut Vec<u32>, len: usize, m: u32, lo: u32, f: &mut F) {
        if seq.len() == len {
            f(seq);
            return;
        }
        for k in lo..m {
            seq.push(k);
            go(seq, len, m, k, f);
            seq.pop();
        }
    }
    let mut seq = Vec::with_capacity(len);
    go(&mut seq, len, m, start, f);
}

/// Visits one profile per multiset of `h` rankings of `n` alternatives and
/// returns how many were visited. Refuses, reporting the exact count, when
/// that count exceeds `budget`.
pub fn enumerate_anonymous<F: FnMut(&Profile)>(
    h: usize,
    n: usize,
    budget: u64,
    mut visitor: F,
) -> Result<u64> {
    check_range("voters", h as u64, 2, u64::MAX)?;
    let count = anonymous_count(h, n).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let rankings = all_rankings(n)?;
    let mut visited = 0u64;
    for_each_sequence(h, rankings.len() as u32, 0, &mut |seq| {
        let columns = seq.iter().map(|&k| rankings[k as usize].clone()).collect();
        let p = Profile::new(columns).expect("rankings share n");
        visitor(&p);
        visited += 1;
    });
    debug_assert_eq!(visited as u128, count);
    Ok(visited)
}
