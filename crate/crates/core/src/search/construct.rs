//! Explicit constructions: cyclic majority graphs and type-1 witnesses.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bias::BiasType;
use crate::error::{check_range, Error, Result};
use crate::graph::{check_threshold, minimal_threshold, MajorityGraph};
use crate::prefs::{Profile, Ranking};
use crate::rules::Rule;

use super::fixtures::{fixture, FixtureId};
use super::{Witness, WitnessSource};

const FALLBACK_ATTEMPTS: usize = 10_000;

fn contains_cycle(p: &Profile, mu: usize, cycle: &[usize]) -> bool {
    let g = MajorityGraph::from_tally(&p.tally(), mu).expect("threshold checked by caller");
    let l = cycle.len();
    (0..l).all(|k| g.has_arc(cycle[k], cycle[(k + 1) % l]))
        && g.has_l_cycle(l).expect("cycle length within range")
}

/// Voter ranking: `head` in the given order, then everything else ascending.
fn ranking_with_head(n: usize, head: &[usize]) -> Ranking {
    let mut order = head.to_vec();
    order.extend((1..=n).filter(|x| !head.contains(x)));
    Ranking::new(order).expect("head has distinct ids within 1..=n")
}

/// A profile of `h` voters over `n` alternatives whose `mu`-majority graph
/// contains the cycle `vertices[0] -> vertices[1] -> ... -> vertices[0]`.
///
/// Voters are spread as evenly as possible over the cyclic rotations of
/// `vertices`, each ranking the cycle first. Arc `v_k -> v_{k+1}` then has
/// support `h` minus the number of voters whose rotation starts at `v_{k+1}`,
/// which is at least `mu` exactly when `mu <= floor((l - 1) h / l)`. The result
/// is validated; if validation ever fails a seeded random search takes over.
pub fn construct_cycle_profile(mu: usize, h: usize, n: usize, vertices: &[usize]) -> Result<Profile> {
    let l = vertices.len();
    check_range("voters", h as u64, 2, u64::MAX)?;
    check_range("alternatives", n as u64, 2, crate::set::MAX_ALTERNATIVES as u64)?;
    check_range("cycle length", l as u64, 2, n as u64)?;
    check_threshold(h, mu)?;
    for (i, &v) in vertices.iter().enumerate() {
        check_range("cycle vertex", v as u64, 1, n as u64)?;
        if vertices[..i].contains(&v) {
            return Err(Error::Precondition(format!("cycle vertex {v} repeated")));
        }
    }
    if mu * l > (l - 1) * h {
        return Err(Error::Precondition(format!(
            "no {l}-cycle exists at threshold {mu} with {h} voters: need mu <= {}",
            (l - 1) * h / l
        )));
    }

    let columns = (0..h)
        .map(|i| {
            let r = i % l;
            let head: Vec<usize> = vertices[r..].iter().chain(&vertices[..r]).copied().collect();
            ranking_with_head(n, &head)
        })
        .collect();
    let p = Profile::new(columns)?;
    if contains_cycle(&p, mu, vertices) {
        return Ok(p);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + (h * 1000 + mu) as u64);
    for _ in 0..FALLBACK_ATTEMPTS {
        let columns = (0..h)
            .map(|_| {
                let mut head = vertices.to_vec();
                head.shuffle(&mut rng);
                ranking_with_head(n, &head)
            })
            .collect();
        let p = Profile::new(columns)?;
        if contains_cycle(&p, mu, vertices) {
            return Ok(p);
        }
    }
    Err(Error::Construction(format!(
        "no profile with a {l}-cycle at threshold {mu} found for h = {h}"
    )))
}

/// Puts alternative `n` on top for the first `top` voters of `base` (a
/// profile over `1..n-1`) and at the bottom for the rest.
fn embed_with_extreme(base: &Profile, top: usize) -> Result<Profile> {
    let n = base.n() + 1;
    let columns = base
        .columns()
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut order: Vec<usize> = q.to_vec();
            if i < top {
                order.insert(0, n);
            } else {
                order.push(n);
            }
            Ranking::new(order)
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(columns)
}

fn certified_type1(p: Profile, h: usize, n: usize, source: WitnessSource) -> Result<Witness> {
    let w = Witness::from_profile(p, BiasType::One, Rule::Minimax, source);
    match w.selection_p.single() {
        Some(x) if x == n && w.certify() => Ok(w),
        _ => Err(Error::Construction(format!(
            "type-1 construction failed to certify at (h, n) = ({h}, {n}): {} / {}",
            w.selection_p, w.selection_pr
        ))),
    }
}

/// Type-1 witness for odd `h` and `n >= 4` with `h (n - 3) >= 3 (n - 1)`.
pub fn construct_witness_odd(h: usize, n: usize) -> Result<Witness> {
    if n < 4 || h % 2 == 0 || h * (n - 3) < 3 * (n - 1) {
        return Err(Error::Precondition(format!(
            "odd construction needs n >= 4, h odd and h >= 3(n-1)/(n-3); got (h, n) = ({h}, {n})"
        )));
    }
    let mu0 = minimal_threshold(h);
    let cycle: Vec<usize> = (1..n).collect();
    let base = construct_cycle_profile(mu0 + 1, h, n - 1, &cycle)?;
    let p = embed_with_extreme(&base, mu0)?;
    certified_type1(p, h, n, WitnessSource::OddConstruction)
}

/// Type-1 witness for even `h` and `n >= 4` with `h (n - 3) >= 2 (n - 1)`.
pub fn construct_witness_even(h: usize, n: usize) -> Result<Witness> {
    if n < 4 || h % 2 == 1 || h * (n - 3) < 2 * (n - 1) {
        return Err(Error::Precondition(format!(
            "even construction needs n >= 4, h even and h >= 2(n-1)/(n-3); got (h, n) = ({h}, {n})"
        )));
    }
    let cycle: Vec<usize> = (1..n).collect();
    let base = construct_cycle_profile(minimal_threshold(h), h, n - 1, &cycle)?;
    let p = embed_with_extreme(&base, h / 2)?;
    certified_type1(p, h, n, WitnessSource::EvenConstruction)
}

/// Which explicit construction, if any, covers `(h, n, j)` for Minimax.
pub fn constructive_source(h: usize, n: usize, j: BiasType) -> Option<WitnessSource> {
    if h < 2 || n < 2 {
        return None;
    }
    if !BiasType::One.minimax_immune(h, n) {
        return Some(if h % 2 == 1 {
            WitnessSource::OddConstruction
        } else {
            WitnessSource::EvenConstruction
        });
    }
    let fixture_for = |id: FixtureId| Some(WitnessSource::Fixture(id));
    if j >= BiasType::Two && !BiasType::Two.minimax_immune(h, n) {
        return match (h, n) {
            (3, _) => fixture_for(FixtureId::Tm2ThreeN),
            (5, 4) => fixture_for(FixtureId::Tm2FiveFour),
            (5, 5) => fixture_for(FixtureId::Tm2FiveFive),
            (7, 4) => fixture_for(FixtureId::Tm2SevenFour),
            _ => None,
        };
    }
    if j == BiasType::Three && !BiasType::Three.minimax_immune(h, n) {
        return match (h, n) {
            (2, _) => fixture_for(FixtureId::Tm3TwoN),
            (_, 3) => fixture_for(FixtureId::Tm3HThree),
            (4, 4) => fixture_for(FixtureId::Tm3FourFour),
            _ => None,
        };
    }
    None
}

/// A certified Minimax witness of bias `j` built without search, when one of
/// the constructions or fixtures applies to `(h, n)`.
pub fn constructive_witness(h: usize, n: usize, j: BiasType) -> Result<Option<Witness>> {
    let Some(source) = constructive_source(h, n, j) else {
        return Ok(None);
    };
    let mut w = match source {
        WitnessSource::OddConstruction => construct_witness_odd(h, n)?,
        WitnessSource::EvenConstruction => construct_witness_even(h, n)?,
        WitnessSource::Fixture(id) => {
            let param = match id.parameter() {
                Some("n") => Some(n),
                Some(_) => Some(h),
                None => None,
            };
            Witness::from_profile(fixture(id, param)?, j, Rule::Minimax, source)
        }
        _ => unreachable!("constructive sources only"),
    };
    w.j = j;
    if !w.certify() {
        return Err(Error::Construction(format!(
            "{source:?} does not witness bias type {j} at (h, n) = ({h}, {n})"
        )));
    }
    Ok(Some(w))
}
