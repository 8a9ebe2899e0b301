//! Majority thresholds, mu-majority graphs and the structural queries on them.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::prefs::{Profile, TallyMatrix};
use crate::set::{AltSet, MAX_ALTERNATIVES};

/// Minimal majority threshold `ceil((h + 1) / 2)`.
pub fn minimal_threshold(h: usize) -> usize {
    h / 2 + 1
}

/// Least majority threshold `m` with `m > (n - 1) h / n`. Every profile has a
/// nonempty dominant set at this threshold.
pub fn greenberg_threshold(h: usize, n: usize) -> usize {
    ((n - 1) * h / n + 1).max(minimal_threshold(h))
}

/// Least majority threshold `m` with `m > (n - 2) h / (n - 1)`; the graph at
/// the profile threshold is acyclic whenever that threshold reaches it.
pub fn acyclicity_threshold(h: usize, n: usize) -> usize {
    ((n - 2) * h / (n - 1) + 1).max(minimal_threshold(h))
}

/// Checks `h / 2 < mu <= h`.
pub fn check_threshold(h: usize, mu: usize) -> Result<()> {
    check_range("majority threshold", mu as u64, minimal_threshold(h) as u64, h as u64)
}

/// A directed graph on `{1..n}` without loops, stored as out-neighbour bitsets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
}

impl Digraph {
    pub fn empty(n: usize) -> Digraph {
        assert!((1..=MAX_ALTERNATIVES).contains(&n));
        Digraph {
            n,
            out: vec![0; n],
        }
    }

    /// Builds a graph from explicit arcs; loops and out-of-range ends are rejected.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Digraph> {
        check_range("vertex count", n as u64, 1, MAX_ALTERNATIVES as u64)?;
        let mut g = Digraph::empty(n);
        for &(x, y) in arcs {
            check_range("arc tail", x as u64, 1, n as u64)?;
            check_range("arc head", y as u64, 1, n as u64)?;
            if x == y {
                return Err(Error::Precondition(format!("loop at vertex {x}")));
            }
            g.add_arc(x, y);
        }
        Ok(g)
    }

    fn add_arc(&mut self, x: usize, y: usize) {
        self.out[x - 1] |= 1 << (y - 1);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, x: usize, y: usize) -> bool {
        self.out[x - 1] >> (y - 1) & 1 == 1
    }

    pub fn successors(&self, x: usize) -> AltSet {
        AltSet::from_bits(self.out[x - 1])
    }

    pub fn predecessors(&self, y: usize) -> AltSet {
        (1..=self.n).filter(|&x| self.has_arc(x, y)).collect()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (1..=self.n)
            .flat_map(|x| self.successors(x).iter().map(move |y| (x, y)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|s| s.count_ones() as usize).sum()
    }

    fn in_bits(&self) -> u64 {
        self.out.iter().fold(0, |acc, s| acc | s)
    }

    /// Every pair of distinct vertices is joined by at least one arc.
    pub fn is_complete(&self) -> bool {
        (1..=self.n).all(|x| {
            (x + 1..=self.n).all(|y| self.has_arc(x, y) || self.has_arc(y, x))
        })
    }

    /// `true` iff `self` is a subgraph of `other`.
    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.n <= other.n && self.out.iter().zip(&other.out).all(|(a, b)| a & !b == 0)
    }

    /// Vertices with no incoming arc.
    pub fn maximal(&self) -> AltSet {
        AltSet::from_bits(AltSet::full(self.n).bits() & !self.in_bits())
    }

    /// Vertices with no outgoing arc.
    pub fn minimal(&self) -> AltSet {
        (1..=self.n).filter(|&x| self.out[x - 1] == 0).collect()
    }

    /// Vertices with an arc to every other vertex.
    pub fn maxima(&self) -> AltSet {
        let full = AltSet::full(self.n).bits();
        (1..=self.n)
            .filter(|&x| self.out[x - 1] == full & !(1 << (x - 1)))
            .collect()
    }

    /// Vertices with an arc from every other vertex.
    pub fn minima(&self) -> AltSet {
        (1..=self.n)
            .filter(|&y| (1..=self.n).all(|x| x == y || self.has_arc(x, y)))
            .collect()
    }

    pub fn isolated(&self) -> AltSet {
        self.maximal().intersection(self.minimal())
    }

    /// Connected components of the underlying undirected graph, ordered by
    /// their least vertex.
    pub fn components(&self) -> Vec<AltSet> {
        let n = self.n;
        let mut adjacent = self.out.clone();
        for x in 0..n {
            for y in AltSet::from_bits(self.out[x]).iter() {
                adjacent[y - 1] |= 1 << x;
            }
        }
        let mut unseen = AltSet::full(n).bits();
        let mut components = Vec::new();
        while unseen != 0 {
            let start = unseen.trailing_zeros() as usize;
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = adjacent[v] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            unseen &= !comp;
            components.push(AltSet::from_bits(comp));
        }
        components
    }

    /// `true` when the subgraph induced on `vertices` has no directed cycle.
    pub fn is_acyclic_on(&self, vertices: AltSet) -> bool {
        // Kahn's algorithm restricted to `vertices`.
        let mask = vertices.bits();
        let mut remaining = mask;
        loop {
            let sources: u64 = AltSet::from_bits(remaining)
                .iter()
                .filter(|&v| {
                    (1..=self.n).all(|u| remaining >> (u - 1) & 1 == 0 || !self.has_arc(u, v))
                })
                .fold(0, |acc, v| acc | 1 << (v - 1));
            if sources == 0 {
                return remaining == 0;
            }
            remaining &= !sources;
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_on(AltSet::full(self.n))
    }

    /// Whether some `l` distinct vertices form a directed cycle.
    pub fn has_l_cycle(&self, l: usize) -> Result<bool> {
        check_range("cycle length", l as u64, 2, self.n as u64)?;
        Ok(self.find_l_cycle(l).is_some())
    }

    /// A directed cycle on exactly `l` vertices, starting at its least vertex.
    pub fn find_l_cycle(&self, l: usize) -> Option<Vec<usize>> {
        let mut path = Vec::with_capacity(l);
        for start in 1..=self.n {
            path.clear();
            path.push(start);
            if self.extend_cycle(start, l, &mut path, 1 << (start - 1)) {
                return Some(path);
            }
        }
        None
    }

    fn extend_cycle(&self, start: usize, l: usize, path: &mut Vec<usize>, used: u64) -> bool {
        let last = *path.last().expect("path is never empty");
        if path.len() == l {
            return self.has_arc(last, start);
        }
        // only vertices above `start` so each cycle is found from its least vertex
        let above_start = !((1u64 << start) - 1);
        let candidates = self.out[last - 1] & !used & above_start;
        for y in AltSet::from_bits(candidates).iter() {
            path.push(y);
            if self.extend_cycle(start, l, path, used | 1 << (y - 1)) {
                return true;
            }
            path.pop();
        }
        false
    }

    pub fn analyze(&self) -> GraphAnalysis {
        let components = self
            .components()
            .into_iter()
            .map(|vertices| Component {
                vertices,
                acyclic: self.is_acyclic_on(vertices),
            })
            .collect::<Vec<_>>();
        GraphAnalysis {
            maximal: self.maximal(),
            minimal: self.minimal(),
            isolated: self.isolated(),
            maxima: self.maxima(),
            minima: self.minima(),
            acyclic: components.iter().all(|c| c.acyclic),
            components,
        }
    }

    /// Graphviz text; vertices ascending, arcs in lexicographic order.
    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("digraph G {\n");
        for x in 1..=self.n {
            match labels.and_then(|l| l.get(x - 1)) {
                Some(label) => {
                    let escaped = label.replace('\\', "\\\\").replace('"', "\\\"");
                    writeln!(out, "  {x} [label=\"{escaped}\"];").unwrap();
                }
                None => writeln!(out, "  {x};").unwrap(),
            }
        }
        for (x, y) in self.arcs() {
            writeln!(out, "  {x} -> {y};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vertices: AltSet,
    pub acyclic: bool,
}

/// Structural summary of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphAnalysis {
    pub maximal: AltSet,
    pub minimal: AltSet,
    pub isolated: AltSet,
    pub maxima: AltSet,
    pub minima: AltSet,
    pub components: Vec<Component>,
    pub acyclic: bool,
}

impl GraphAnalysis {
    pub fn acyclic_components(&self) -> usize {
        self.components.iter().filter(|c| c.acyclic).count()
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }
}

pub fn analyze(graph: &Digraph) -> GraphAnalysis {
    graph.analyze()
}

/// The mu-majority graph of a profile: arc `x -> y` iff at least `mu` voters
/// rank `x` above `y`.
#[derive(Clone, Debug)]
pub struct MajorityGraph {
    mu: usize,
    h: usize,
    graph: Digraph,
    analysis: GraphAnalysis,
}

impl MajorityGraph {
    pub fn from_tally(t: &TallyMatrix, mu: usize) -> Result<MajorityGraph> {
        check_threshold(t.h(), mu)?;
        let n = t.n();
        let mut graph = Digraph::empty(n);
        for x in 1..=n {
            for y in 1..=n {
                if x != y && t.get(x, y) >= mu {
                    graph.add_arc(x, y);
                }
            }
        }
        let analysis = graph.analyze();
        Ok(MajorityGraph {
            mu,
            h: t.h(),
            graph,
            analysis,
        })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn analysis(&self) -> &GraphAnalysis {
        &self.analysis
    }

    pub fn has_arc(&self, x: usize, y: usize) -> bool {
        self.graph.has_arc(x, y)
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.graph.arcs()
    }

    pub fn has_l_cycle(&self, l: usize) -> Result<bool> {
        self.graph.has_l_cycle(l)
    }

    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        self.graph.to_dot(labels)
    }
}

pub fn majority_graph(p: &Profile, mu: usize) -> Result<MajorityGraph> {
    MajorityGraph::from_tally(&p.tally(), mu)
}

pub fn has_l_cycle(graph: &Digraph, l: usize) -> Result<bool> {
    graph.has_l_cycle(l)
}

pub fn export_dot(graph: &Digraph, labels: Option<&[String]>) -> String {
    graph.to_dot(labels)
}

/// Alternatives beaten by fewer than `mu` voters against every other
/// alternative, read straight off the tally.
pub fn dominant_set_of(t: &TallyMatrix, mu: usize) -> Result<AltSet> {
    check_threshold(t.h(), mu)?;
    let n = t.n();
    Ok((1..=n)
        .filter(|&x| (1..=n).all(|y| t.get(y, x) < mu))
        .collect())
}

pub fn dominant_set(p: &Profile, mu: usize) -> Result<AltSet> {
    dominant_set_of(&p.tally(), mu)
}

/// Least majority threshold with a nonempty dominant set.
pub fn profile_threshold_of(t: &TallyMatrix) -> usize {
    let h = t.h();
    (minimal_threshold(h)..=h)
        .find(|&mu| !dominant_set_of(t, mu).expect("threshold in range").is_empty())
        .expect("the dominant set at mu = h is never empty")
}

pub fn profile_threshold(p: &Profile) -> usize {
    profile_threshold_of(&p.tally())
}
