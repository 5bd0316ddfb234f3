//! Curvature censuses of a packing.
//!
//! Circles beyond the root quadruple correspond one-to-one with reduced
//! words, and along any reduced word applied to a root the inserted entry is
//! the largest of its quadruple. A depth-first walk over words can therefore
//! stop at the first child whose new curvature exceeds `T`.

mod checkpoint;
mod congruence;
mod growth;
mod heights;

use std::collections::BTreeMap;
use std::path::PathBuf;

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descartes::Quadruple;
use crate::error::{Error, Result};
use crate::group::is_root;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use congruence::{
    allowed_classes, missing_values, orbit_partition, pattern_transitions, residue_cover_witness,
    MissingClass, MissingReport, Orbit, OrbitFilter, OrbitTable, Pattern, ResidueWitness, MAX_ORBIT_MODULUS,
};
pub use growth::{growth_exponent, GrowthFit};
pub use heights::{
    count_quadruples, count_quadruples_sq, r3_square, r3_square_primitive, CATALAN,
};

/// Largest bound accepted, keeping every intermediate sum inside `i64`.
pub const MAX_BOUND: u64 = 1 << 40;

/// Per-curvature multiplicity arrays are kept up to this bound by default.
pub const FULL_MULTIPLICITY_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The set of curvatures.
    Values,
    /// Every circle counted with multiplicity.
    Multiplicity,
}

/// Circle counts from a multiplicity census, excluding the root circles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counts {
    /// `per_value[k]` circles of curvature `k`.
    PerValue(Vec<u64>),
    /// `counts[i]` circles with curvature in `(edges[i−1], edges[i]]`
    /// (the first bucket starts at 0).
    Buckets { edges: Vec<u64>, counts: Vec<u64> },
}

impl Counts {
    fn new(bound: u64, full: bool) -> Self {
        if full {
            Counts::PerValue(vec![0; bound as usize + 1])
        } else {
            Counts::Buckets {
                edges: log_edges(bound, 40),
                counts: vec![0; log_edges(bound, 40).len()],
            }
        }
    }

    #[inline]
    fn add(&mut self, v: u64) {
        match self {
            Counts::PerValue(a) => a[v as usize] += 1,
            Counts::Buckets { edges, counts } => {
                let i = edges.partition_point(|&e| e < v);
                counts[i] += 1;
            }
        }
    }

    fn merge(&mut self, other: &Counts) {
        match (self, other) {
            (Counts::PerValue(a), Counts::PerValue(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y)
            }
            (Counts::Buckets { counts: a, .. }, Counts::Buckets { counts: b, .. }) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y)
            }
            _ => unreachable!("merging counters of different shapes"),
        }
    }

    /// Cumulative `(t, #words with value ≤ t)` at the available resolution.
    pub fn cumulative(&self) -> Vec<(u64, u64)> {
        let mut acc = 0;
        match self {
            Counts::PerValue(a) => a
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    acc += c;
                    (k as u64, acc)
                })
                .collect(),
            Counts::Buckets { edges, counts } => edges
                .iter()
                .zip(counts)
                .map(|(&e, c)| {
                    acc += c;
                    (e, acc)
                })
                .collect(),
        }
    }
}

/// Roughly `per_decade` edges per factor of ten, ending exactly at `bound`.
pub(crate) fn log_edges(bound: u64, per_decade: u32) -> Vec<u64> {
    let mut edges = Vec::new();
    let r = 10f64.powf(1.0 / per_decade as f64);
    let mut x = 1.0f64;
    while (x as u64) < bound {
        let e = x as u64;
        if edges.last() != Some(&e) {
            edges.push(e);
        }
        x *= r;
    }
    edges.push(bound);
    edges
}

/// Result of a census run.
#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub root: Quadruple<i64>,
    pub bound: u64,
    pub mode: Mode,
    /// Bit `k` is set iff some circle has curvature `k`, for `1 ≤ k ≤ T`.
    pub present: BitVec<u64, Lsb0>,
    /// Root entries `≤ 0` (bounding circle, lines).
    pub nonpositive: Vec<i64>,
    /// Per-word circle counts (multiplicity mode only).
    pub multiplicity: Option<Counts>,
    /// Circles visited, including the four root circles.
    pub circles_counted: u64,
}

impl Census {
    pub fn contains(&self, k: i64) -> bool {
        if k <= 0 {
            self.nonpositive.contains(&k)
        } else {
            (k as u64) <= self.bound && self.present[k as usize]
        }
    }

    /// Positive curvatures present, ascending.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.present.iter_ones().map(|i| i as u64)
    }

    pub fn count_present(&self) -> u64 {
        self.present.count_ones() as u64
    }

    /// Present positive values per residue class mod `m`.
    pub fn residue_histogram(&self, m: u64) -> Result<BTreeMap<u64, u64>> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let mut h = BTreeMap::new();
        for v in self.values() {
            *h.entry(v % m).or_insert(0) += 1;
        }
        Ok(h)
    }

    /// `N_P(t)`: circles (root circles included) with curvature at most `t`,
    /// at each available checkpoint `t`.
    pub fn circle_counts(&self) -> Result<Vec<(u64, u64)>> {
        let counts = self
            .multiplicity
            .as_ref()
            .ok_or(Error::WrongMode { expected: "multiplicity" })?;
        Ok(counts
            .cumulative()
            .into_iter()
            .map(|(t, n)| {
                let roots = self.root.entries.iter().filter(|&&e| e <= t as i64).count() as u64;
                (t, n + roots)
            })
            .collect())
    }

    /// `N_P(T)` at the census bound.
    pub fn total_circles(&self) -> Result<u64> {
        Ok(self.circle_counts()?.last().map(|&(_, n)| n).unwrap_or(0))
    }
}

#[derive(Clone, Debug)]
pub struct CheckpointPlan {
    pub path: PathBuf,
    /// Frontier subtrees processed between checkpoint writes.
    pub every: usize,
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub mode: Mode,
    /// Keep a count per curvature; defaults to `T ≤ 10⁶`.
    pub full_multiplicity: Option<bool>,
    /// Minimum number of independent subtrees handed to the thread pool.
    pub frontier_target: usize,
    /// Values mode only.
    pub checkpoint: Option<CheckpointPlan>,
}

impl CensusOptions {
    pub fn new(mode: Mode) -> Self {
        CensusOptions {
            mode,
            full_multiplicity: None,
            frontier_target: 4096,
            checkpoint: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub q: [i64; 4],
    /// Slot of the last generator applied, or 4 at the root.
    pub last: u8,
}

struct Acc {
    bits: BitVec<u64, Lsb0>,
    counts: Option<Counts>,
    visited: u64,
}

impl Acc {
    fn new(bound: u64, counts: Option<Counts>) -> Self {
        Acc {
            bits: bitvec![u64, Lsb0; 0; bound as usize + 1],
            counts,
            visited: 0,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        let raw = self.bits.as_raw_mut_slice();
        for (x, y) in raw.iter_mut().zip(other.bits.as_raw_slice()) {
            *x |= y;
        }
        if let (Some(a), Some(b)) = (self.counts.as_mut(), other.counts.as_ref()) {
            a.merge(b);
        }
        self.visited += other.visited;
        self
    }

    #[inline]
    fn record(&mut self, v: i64) {
        self.bits.set(v as usize, true);
        if let Some(c) = self.counts.as_mut() {
            c.add(v as u64);
        }
        self.visited += 1;
    }
}

/// Children of `node` that survive pruning, recorded into `acc`.
#[inline]
fn expand(node: &Node, bound: i64, dedupe: bool, acc: &mut Acc, out: &mut impl FnMut(Node)) {
    let s: i64 = node.q.iter().sum();
    for g in 0..4u8 {
        if g == node.last {
            continue;
        }
        let old = node.q[g as usize];
        let new = 2 * s - 3 * old;
        if new > bound || (dedupe && new == old) {
            continue;
        }
        acc.record(new);
        let mut q = node.q;
        q[g as usize] = new;
        out(Node { q, last: g });
    }
}

fn dfs(start: Node, bound: i64, dedupe: bool, acc: &mut Acc) {
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        expand(&node, bound, dedupe, acc, &mut |c| stack.push(c));
    }
}

fn validate(root: &Quadruple<i64>, bound: u64, mode: Mode) -> Result<()> {
    root.require_descartes()?;
    if !is_root(root)? {
        return Err(Error::NotRoot(root.to_string()));
    }
    if bound == 0 || bound > MAX_BOUND {
        return Err(Error::InvalidArgument(format!(
            "bound must lie in 1..={MAX_BOUND}, got {bound}"
        )));
    }
    if mode == Mode::Multiplicity && *root.min_entry() >= 0 {
        return Err(Error::InfiniteMultiplicity(root.to_string()));
    }
    if (*root.max_entry() as u64) > bound {
        log::warn!("bound {bound} is below the largest root curvature of {root}; census is trivial");
    }
    Ok(())
}

/// Census with default options.
pub fn census(root: &Quadruple<i64>, bound: u64, mode: Mode) -> Result<Census> {
    census_with(root, bound, &CensusOptions::new(mode))
}

pub fn census_with(root: &Quadruple<i64>, bound: u64, opts: &CensusOptions) -> Result<Census> {
    validate(root, bound, opts.mode)?;
    let dedupe = opts.mode == Mode::Values;
    let counts = (opts.mode == Mode::Multiplicity).then(|| {
        Counts::new(
            bound,
            opts.full_multiplicity
                .unwrap_or(bound <= FULL_MULTIPLICITY_LIMIT),
        )
    });
    let mut acc = Acc::new(bound, counts);
    let mut nonpositive = Vec::new();
    for &e in &root.entries {
        if e <= 0 {
            if !nonpositive.contains(&e) {
                nonpositive.push(e);
            }
        } else if e as u64 <= bound {
            acc.bits.set(e as usize, true);
        }
    }
    nonpositive.sort();
    acc.visited = 4;

    // breadth-first until there are enough independent subtrees
    let b = bound as i64;
    let mut frontier = vec![Node {
        q: root.entries,
        last: 4,
    }];
    while !frontier.is_empty() && frontier.len() < opts.frontier_target {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for n in &frontier {
            expand(n, b, dedupe, &mut acc, &mut |c| next.push(c));
        }
        frontier = next;
    }

    let acc = match (&opts.checkpoint, opts.mode) {
        (Some(plan), Mode::Values) => {
            let base = Checkpoint {
                root: root.clone(),
                bound,
                circles_counted: acc.visited,
                bits: acc.bits,
                frontier,
            };
            return run_checkpointed(base, plan, &nonpositive);
        }
        (Some(_), Mode::Multiplicity) => {
            return Err(Error::InvalidArgument(
                "checkpointing is available for values censuses only".into(),
            ))
        }
        _ => run_frontier(acc, &frontier, b, dedupe),
    };
    Ok(Census {
        root: root.clone(),
        bound,
        mode: opts.mode,
        present: acc.bits,
        nonpositive,
        multiplicity: acc.counts,
        circles_counted: acc.visited,
    })
}

fn run_frontier(acc: Acc, frontier: &[Node], bound: i64, dedupe: bool) -> Acc {
    let template_counts = acc.counts.as_ref().map(|c| match c {
        Counts::PerValue(a) => Counts::PerValue(vec![0; a.len()]),
        Counts::Buckets { edges, counts } => Counts::Buckets {
            edges: edges.clone(),
            counts: vec![0; counts.len()],
        },
    });
    let b = bound as u64;
    let sub = frontier
        .par_iter()
        .fold(
            || Acc::new(b, template_counts.clone()),
            |mut a, n| {
                dfs(*n, bound, dedupe, &mut a);
                a
            },
        )
        .reduce(|| Acc::new(b, template_counts.clone()), Acc::merge);
    acc.merge(sub)
}

fn run_checkpointed(mut state: Checkpoint, plan: &CheckpointPlan, nonpositive: &[i64]) -> Result<Census> {
    let every = plan.every.max(1);
    let bound = state.bound as i64;
    write_checkpoint(&plan.path, &state)?;
    while !state.frontier.is_empty() {
        let take = every.min(state.frontier.len());
        let chunk: Vec<Node> = state.frontier.drain(..take).collect();
        let acc = Acc {
            bits: std::mem::take(&mut state.bits),
            counts: None,
            visited: state.circles_counted,
        };
        let acc = run_frontier(acc, &chunk, bound, true);
        state.bits = acc.bits;
        state.circles_counted = acc.visited;
        write_checkpoint(&plan.path, &state)?;
        log::info!(
            "checkpoint: {} subtrees left, {} circles so far",
            state.frontier.len(),
            state.circles_counted
        );
    }
    Ok(Census {
        root: state.root,
        bound: state.bound,
        mode: Mode::Values,
        present: state.bits,
        nonpositive: nonpositive.to_vec(),
        multiplicity: None,
        circles_counted: state.circles_counted,
    })
}

/// Continue a values census from a checkpoint file.
pub fn resume(plan: &CheckpointPlan) -> Result<Census> {
    let state = read_checkpoint(&plan.path)?;
    validate(&state.root, state.bound, Mode::Values)?;
    let mut nonpositive: Vec<i64> = state.root.entries.iter().copied().filter(|&e| e <= 0).collect();
    nonpositive.sort();
    nonpositive.dedup();
    run_checkpointed(state, plan, &nonpositive)
}
