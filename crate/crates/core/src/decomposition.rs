//! Maximum decomposition with respect to outputs.
//!
//! A network decomposes with order `n − s` exactly when its transition graphs
//! admit a CC-PEVP with `2^s` blocks of size `2^{n−s}`. Such a partition must
//! refine the observability partition 𝓒, so the search only ever merges states
//! inside one 𝓒 block.
//!
//! From a CC-PEVP `{S_l}` the coordinate change is built as
//! `Q = δ_{2^s}[i_1, …, i_{2^n}]` with `i_q = l` for `q ∈ S_l`, then a
//! permutation `T` with `(I_{2^s} ⊗ 1ᵀ_{2^{n−s}}) T = Q`. The subsystem
//! matrices are the exact quotients `G_{1i} = Q L_i Qᵀ / 2^{n−s}` and
//! `M = H Qᵀ / 2^{n−s}`.

use std::fmt;

use thiserror::Error;

use crate::model::Bcn;
use crate::observability;
use crate::partition::Partition;
use crate::stp::{LogicalMatrix, RationalMatrix};

/// Default cap on how many alternative maximum-order partitions are counted.
pub const ALTERNATIVES_CAP: usize = 10_000;

/// Largest `2^{n−s}` for which the dense regularity matrix is formed.
const MAX_DENSE_SIDE: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("T is not a permutation matrix")]
    NotPermutation,
    #[error("partition blocks are not of equal power-of-two size")]
    NotPowerOfTwoBlocks,
    #[error("label {label} appears {count} times in Q, expected {expected}")]
    UnbalancedQ {
        label: usize,
        count: usize,
        expected: usize,
    },
    #[error("{} quotient(s) are not logical matrices", .0.len())]
    QuotientNotLogical(Vec<QuotientFailure>),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

/// 2-adic valuation of the gcd of the block sizes of 𝓒: every CC-PEVP block
/// size `2^d` divides every 𝓒 block size.
pub fn max_feasible_order(c: &Partition) -> usize {
    let g = c
        .blocks()
        .iter()
        .fold(0usize, |g, b| num_integer::gcd(g, b.len()));
    if g == 0 {
        0
    } else {
        g.trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Only the canonically smallest CC-PEVP.
    First,
    /// Every CC-PEVP, in canonical order.
    All,
}

/// CC-PEVPs of `b` with block size `2^d`, canonical (lexicographic) order.
pub fn search_cc_pevp(b: &Bcn, d: usize, mode: SearchMode) -> Vec<Partition> {
    let c = observability::obs_partition(b);
    let search = CcPevpSearch::new(b, &c, d);
    match mode {
        SearchMode::First => search.take(1).collect(),
        SearchMode::All => search.collect(),
    }
}

/// Union-find with union by size and an undo trail; no path compression so
/// that every union can be rolled back.
struct UndoUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    min: Vec<usize>,
    // (attached root, surviving root, previous min of the surviving root)
    trail: Vec<(usize, usize, usize)>,
}

impl UndoUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            min: (0..n).collect(),
            trail: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union_roots(&mut self, a: usize, b: usize) {
        let (big, small) = if self.size[a] >= self.size[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.trail.push((small, big, self.min[big]));
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.min[big] = self.min[big].min(self.min[small]);
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (small, big, old_min) = self.trail.pop().expect("trail longer than mark");
            self.parent[small] = small;
            self.size[big] -= self.size[small];
            self.min[big] = old_min;
        }
    }
}

struct Frame {
    v: usize,
    cursor: usize,
    uf_mark: usize,
    apart_base: usize,
    apart_len: usize,
    last: Option<usize>,
}

enum Phase {
    Expand(usize),
    Advance,
    Done,
}

/// Congruence-closure backtracking over merges of 𝓒-equivalent states.
///
/// Merging two states forces merging their successors under every input, so
/// each class stays forward-closed. A branch fails when a merge would join two
/// 𝓒 blocks or grow a class past `2^d`. Branching picks the smallest state `v`
/// whose class is short and tries partner classes by increasing minimum;
/// partners already tried are recorded as "apart" from `v` for the later
/// siblings, so every partition is produced once. Partitions come out in
/// increasing lexicographic order of their canonical block lists.
pub struct CcPevpSearch {
    successors: Vec<Vec<usize>>,
    cblock: Vec<usize>,
    members: Vec<Vec<usize>>,
    pos_in_block: Vec<usize>,
    target: usize,
    uf: UndoUnionFind,
    apart: Vec<(usize, usize)>,
    stack: Vec<Frame>,
    phase: Phase,
}

impl CcPevpSearch {
    /// `c` must be the observability partition of `b` (or any forward-closed
    /// partition refining the output coloring).
    pub fn new(b: &Bcn, c: &Partition, d: usize) -> Self {
        let n = b.state_count();
        let successors: Vec<Vec<usize>> = b
            .blocks()
            .into_iter()
            .map(|lj| lj.indices().to_vec())
            .collect();
        let cblock = c.labels();
        let members = c.blocks().to_vec();
        let mut pos_in_block = vec![0; n];
        for blk in &members {
            for (i, &v) in blk.iter().enumerate() {
                pos_in_block[v] = i;
            }
        }
        let target = if d >= usize::BITS as usize {
            usize::MAX
        } else {
            1usize << d
        };
        let feasible = c.universe_size() == n && members.iter().all(|blk| blk.len() % target == 0);
        Self {
            successors,
            cblock,
            members,
            pos_in_block,
            target,
            uf: UndoUnionFind::new(n),
            apart: Vec::new(),
            stack: Vec::new(),
            phase: if feasible {
                Phase::Expand(0)
            } else {
                Phase::Done
            },
        }
    }

    fn first_incomplete(&self, from: usize) -> Option<usize> {
        (from..self.uf.parent.len()).find(|&v| self.uf.size[self.uf.find(v)] < self.target)
    }

    fn is_apart(&self, ra: usize, rb: usize) -> bool {
        self.apart.iter().any(|&(x, y)| {
            let (rx, ry) = (self.uf.find(x), self.uf.find(y));
            (rx == ra && ry == rb) || (rx == rb && ry == ra)
        })
    }

    fn apart_ok(&self) -> bool {
        self.apart
            .iter()
            .all(|&(x, y)| self.uf.find(x) != self.uf.find(y))
    }

    /// Next partner class for `v`, scanning its 𝓒 block from `cursor`.
    /// Returns the partner's minimum and its position in the block.
    fn next_candidate(&self, v: usize, cursor: usize) -> Option<(usize, usize)> {
        let rv = self.uf.find(v);
        let room = self.target - self.uf.size[rv];
        let blk = &self.members[self.cblock[v]];
        (cursor..blk.len()).find_map(|pos| {
            let u = blk[pos];
            let ru = self.uf.find(u);
            (self.uf.min[ru] == u && ru != rv && self.uf.size[ru] <= room && !self.is_apart(rv, ru))
                .then_some((u, pos))
        })
    }

    fn merge(&mut self, a: usize, b: usize) -> bool {
        let mut work = vec![(a, b)];
        while let Some((x, y)) = work.pop() {
            let (rx, ry) = (self.uf.find(x), self.uf.find(y));
            if rx == ry {
                continue;
            }
            if self.cblock[x] != self.cblock[y] || self.uf.size[rx] + self.uf.size[ry] > self.target
            {
                return false;
            }
            self.uf.union_roots(rx, ry);
            for succ in &self.successors {
                work.push((succ[x], succ[y]));
            }
        }
        true
    }

    fn snapshot(&self) -> Partition {
        let roots: Vec<usize> = (0..self.uf.parent.len()).map(|v| self.uf.find(v)).collect();
        Partition::from_labels(&roots)
    }
}

impl Iterator for CcPevpSearch {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            match self.phase {
                Phase::Done => return None,
                Phase::Expand(from) => match self.first_incomplete(from) {
                    None => {
                        self.phase = if self.stack.is_empty() {
                            Phase::Done
                        } else {
                            Phase::Advance
                        };
                        return Some(self.snapshot());
                    }
                    Some(v) => {
                        self.stack.push(Frame {
                            v,
                            cursor: self.pos_in_block[v] + 1,
                            uf_mark: self.uf.mark(),
                            apart_base: self.apart.len(),
                            apart_len: self.apart.len(),
                            last: None,
                        });
                        self.phase = Phase::Advance;
                    }
                },
                Phase::Advance => {
                    let Some(frame) = self.stack.last_mut() else {
                        self.phase = Phase::Done;
                        continue;
                    };
                    self.uf.undo_to(frame.uf_mark);
                    self.apart.truncate(frame.apart_len);
                    if let Some(prev) = frame.last.take() {
                        self.apart.push((frame.v, prev));
                        frame.apart_len += 1;
                    }
                    let (v, cursor) = (frame.v, frame.cursor);
                    match self.next_candidate(v, cursor) {
                        None => {
                            let f = self.stack.pop().expect("frame present");
                            self.uf.undo_to(f.uf_mark);
                            self.apart.truncate(f.apart_base);
                        }
                        Some((u, pos)) => {
                            let frame = self.stack.last_mut().expect("frame present");
                            frame.cursor = pos + 1;
                            frame.last = Some(u);
                            if self.merge(v, u) && self.apart_ok() {
                                self.phase = Phase::Expand(v);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `Q = δ_{2^s}[i_1, …]` with `i_q` the canonical (1-based) block number of `q`.
pub fn q_from_partition(s: &Partition) -> Result<LogicalMatrix, DecompositionError> {
    let size = s
        .equal_block_size()
        .ok_or(DecompositionError::NotPowerOfTwoBlocks)?;
    if !size.is_power_of_two() || !s.len().is_power_of_two() {
        return Err(DecompositionError::NotPowerOfTwoBlocks);
    }
    LogicalMatrix::from_indices(s.len(), s.labels())
        .map_err(|e| DecompositionError::Dimension(e.to_string()))
}

/// A permutation `T` with `(I_{2^s} ⊗ 1ᵀ) T = Q`; states sharing a label get
/// consecutive `z` indices in ascending order.
pub fn t_from_q(q: &LogicalMatrix) -> Result<LogicalMatrix, DecompositionError> {
    let cols = q.cols();
    let labels = q.rows();
    if !cols.is_power_of_two() || !labels.is_power_of_two() || !cols.is_multiple_of(labels) {
        return Err(DecompositionError::Dimension(format!(
            "Q must be 2^s x 2^n, got {labels}x{cols}"
        )));
    }
    let width = cols / labels;
    let mut counts = vec![0usize; labels];
    let delta = q
        .indices()
        .iter()
        .map(|&l| {
            let z = l * width + counts[l];
            counts[l] += 1;
            z
        })
        .collect::<Vec<_>>();
    if let Some((label, &count)) = counts.iter().enumerate().find(|(_, &c)| c != width) {
        return Err(DecompositionError::UnbalancedQ {
            label: label + 1,
            count,
            expected: width,
        });
    }
    LogicalMatrix::from_indices(cols, delta)
        .map_err(|e| DecompositionError::Dimension(e.to_string()))
}

/// `Q = (I_{2^s} ⊗ 1ᵀ_{2^{n−s}}) T`.
pub fn q_from_t(t: &LogicalMatrix, s: usize) -> Result<LogicalMatrix, DecompositionError> {
    let n = log2_exact(t.rows())
        .ok_or_else(|| DecompositionError::Dimension("T must be 2^n x 2^n".into()))?;
    if s > n {
        return Err(DecompositionError::Dimension(format!(
            "s = {s} exceeds n = {n}"
        )));
    }
    if !t.is_permutation() {
        return Err(DecompositionError::NotPermutation);
    }
    let shift = n - s;
    Ok(
        LogicalMatrix::from_indices(1 << s, t.indices().iter().map(|z| z >> shift).collect())
            .expect("labels below 2^s"),
    )
}

fn log2_exact(x: usize) -> Option<usize> {
    x.is_power_of_two().then(|| x.trailing_zeros() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientTarget {
    /// `Q L_i Qᵀ / 2^{n−s}` for 1-based input block `i`.
    Block(usize),
    /// `H Qᵀ / 2^{n−s}`.
    Output,
}

impl fmt::Display for QuotientTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientTarget::Block(i) => write!(f, "Q L_{i} Q^T / 2^(n-s)"),
            QuotientTarget::Output => f.write_str("H Q^T / 2^(n-s)"),
        }
    }
}

/// A non-logical column of one of the quotients, as sparse
/// `(1-based row, numerator)` pairs over `denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientFailure {
    pub target: QuotientTarget,
    pub column: usize,
    pub entries: Vec<(usize, i64)>,
    pub denominator: i64,
}

/// Exact `X Qᵀ / w` for logical `X` (`r × 2^n`) and balanced `Q` with `w`
/// states per label: column `l` counts the `X`-values over the states labelled `l`.
fn quotient(
    x: &LogicalMatrix,
    q: &LogicalMatrix,
    target: QuotientTarget,
) -> Result<LogicalMatrix, QuotientFailure> {
    let labels = q.rows();
    let width = q.cols() / labels;
    let mut hits: Vec<Vec<(usize, i64)>> = vec![Vec::new(); labels];
    for col in 0..q.cols() {
        let l = q.index(col);
        let r = x.index(col);
        match hits[l].iter_mut().find(|(row, _)| *row == r) {
            Some((_, c)) => *c += 1,
            None => hits[l].push((r, 1)),
        }
    }
    let mut delta = Vec::with_capacity(labels);
    for (l, mut h) in hits.into_iter().enumerate() {
        if h.len() == 1 && h[0].1 == width as i64 {
            delta.push(h[0].0);
        } else {
            h.sort_unstable();
            return Err(QuotientFailure {
                target,
                column: l + 1,
                entries: h.into_iter().map(|(r, c)| (r + 1, c)).collect(),
                denominator: width as i64,
            });
        }
    }
    Ok(LogicalMatrix::from_indices(x.rows(), delta).expect("rows of X"))
}

/// Outcome of checking a candidate `(T, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub s: usize,
    pub q: LogicalMatrix,
    /// Every quotient column that is not logical; empty on success.
    pub failures: Vec<QuotientFailure>,
    /// `G_{1i}`, present when all block quotients are logical.
    pub g1_blocks: Option<Vec<LogicalMatrix>>,
    /// `M`, present when the output quotient is logical.
    pub m: Option<LogicalMatrix>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `Q L_i Qᵀ / 2^{n−s}` and `H Qᵀ / 2^{n−s}` are logical. On
/// success also checks `Q Qᵀ = 2^{n−s} I`, `Q L_i = G_{1i} Q` and `H = M Q`;
/// a mismatch there is reported as an invariant violation.
pub fn verify_decomposition(
    b: &Bcn,
    t: &LogicalMatrix,
    s: usize,
) -> Result<VerifyReport, DecompositionError> {
    if t.rows() != b.state_count() || t.cols() != b.state_count() {
        return Err(DecompositionError::Dimension(format!(
            "T must be {0}x{0}",
            b.state_count()
        )));
    }
    let q = q_from_t(t, s)?;
    let mut failures = Vec::new();
    let mut g1 = Vec::new();
    for (i, lj) in b.blocks().iter().enumerate() {
        let ql = q.compose(lj).expect("Q is 2^s x 2^n");
        match quotient(&ql, &q, QuotientTarget::Block(i + 1)) {
            Ok(g) => g1.push(g),
            Err(f) => failures.push(f),
        }
    }
    let m = match quotient(b.h(), &q, QuotientTarget::Output) {
        Ok(m) => Some(m),
        Err(f) => {
            failures.push(f);
            None
        }
    };
    let g1_blocks = (g1.len() == b.input_count()).then_some(g1);
    if failures.is_empty() {
        check_identities(
            b,
            &q,
            g1_blocks.as_deref().unwrap_or(&[]),
            m.as_ref().expect("M"),
            s,
        )?;
    }
    Ok(VerifyReport {
        s,
        q,
        failures,
        g1_blocks,
        m,
    })
}

fn check_identities(
    b: &Bcn,
    q: &LogicalMatrix,
    g1: &[LogicalMatrix],
    m: &LogicalMatrix,
    s: usize,
) -> Result<(), DecompositionError> {
    let width = 1usize << (b.n() - s);
    let mut counts = vec![0usize; q.rows()];
    for &l in q.indices() {
        counts[l] += 1;
    }
    if counts.iter().any(|&c| c != width) {
        return Err(DecompositionError::InvariantViolation(
            "Q Q^T differs from 2^(n-s) I".into(),
        ));
    }
    for (i, (lj, gj)) in b.blocks().iter().zip(g1).enumerate() {
        if q.compose(lj).ok() != gj.compose(q).ok() {
            return Err(DecompositionError::InvariantViolation(format!(
                "Q L_{} differs from G_1{} Q",
                i + 1,
                i + 1
            )));
        }
    }
    if m.compose(q).ok().as_ref() != Some(b.h()) {
        return Err(DecompositionError::InvariantViolation(
            "H differs from M Q".into(),
        ));
    }
    Ok(())
}

/// Subsystem matrices of the decomposed form
/// `z¹(t+1) = G_1 u z¹`, `z²(t+1) = G_2 u z`, `y = M z¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedBcn {
    pub s: usize,
    /// `G_{11}, …, G_{12^m}`, each `2^s × 2^s`.
    pub g1_blocks: Vec<LogicalMatrix>,
    /// `2^{n−s} × 2^{m+n}`.
    pub g2: LogicalMatrix,
    /// `2^p × 2^s`.
    pub m: LogicalMatrix,
}

impl DecomposedBcn {
    /// Reassembles the full network in `z` coordinates.
    pub fn to_bcn(&self, n: usize, m: usize, p: usize) -> Result<Bcn, DecompositionError> {
        let width = 1usize << (n - self.s);
        let ns = 1usize << n;
        let mut l = Vec::with_capacity(self.g2.cols());
        for col in 0..self.g2.cols() {
            let (j, z) = (col / ns, col % ns);
            let head = self.g1_blocks[j].index(z / width);
            l.push(head * width + self.g2.index(col));
        }
        let h = (0..ns).map(|z| self.m.index(z / width)).collect();
        let dim = |e: crate::stp::StpError| DecompositionError::Dimension(e.to_string());
        Bcn::new(
            n,
            m,
            p,
            LogicalMatrix::from_indices(ns, l).map_err(dim)?,
            LogicalMatrix::from_indices(1 << p, h).map_err(dim)?,
        )
        .map_err(|e| DecompositionError::Dimension(e.to_string()))
    }
}

/// `G_{1i}` and `M` as exact quotients, `G_2 = (1ᵀ_{2^s} ⊗ I_{2^{n−s}}) T L (I_{2^m} ⊗ Tᵀ)`.
pub fn extract_subsystems(
    b: &Bcn,
    t: &LogicalMatrix,
    s: usize,
) -> Result<DecomposedBcn, DecompositionError> {
    let report = verify_decomposition(b, t, s)?;
    if !report.passed() {
        return Err(DecompositionError::QuotientNotLogical(report.failures));
    }
    let transformed = b
        .transform(t)
        .map_err(|e| DecompositionError::Dimension(e.to_string()))?;
    let width = 1usize << (b.n() - s);
    let g2 = LogicalMatrix::from_indices(
        width,
        transformed
            .l()
            .indices()
            .iter()
            .map(|z| z % width)
            .collect(),
    )
    .expect("remainders below 2^(n-s)");
    Ok(DecomposedBcn {
        s,
        g1_blocks: report.g1_blocks.expect("verified"),
        g2,
        m: report.m.expect("verified"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityVerdict {
    /// `R` is not logical: the largest unobservable subspace is not regular.
    NotRegular,
    /// `R` is logical; the test cannot conclude anything.
    Inconclusive,
}

impl fmt::Display for RegularityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegularityVerdict::NotRegular => "NotRegular",
            RegularityVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub r: RationalMatrix,
    pub r_is_logical: bool,
    pub verdict: RegularityVerdict,
}

/// `R = (1/2^s) (1ᵀ_{2^s} ⊗ I) T T₂ᵀ (1_{2^s} ⊗ I)` for two decomposing
/// transformations of the same order.
///
/// Entry `(a, b)` counts the states whose `z²` part is `a` under `T` and `b`
/// under `T₂`.
pub fn regularity_test(
    t: &LogicalMatrix,
    t2: &LogicalMatrix,
    s: usize,
) -> Result<RegularityReport, DecompositionError> {
    if t.rows() != t2.rows() {
        return Err(DecompositionError::Dimension(format!(
            "T is {0}x{0} but T2 is {1}x{1}",
            t.rows(),
            t2.rows()
        )));
    }
    if !t.is_permutation() || !t2.is_permutation() {
        return Err(DecompositionError::NotPermutation);
    }
    let n = log2_exact(t.rows())
        .ok_or_else(|| DecompositionError::Dimension("T must be 2^n x 2^n".into()))?;
    if s > n {
        return Err(DecompositionError::Dimension(format!(
            "s = {s} exceeds n = {n}"
        )));
    }
    let side = 1usize << (n - s);
    if side > MAX_DENSE_SIDE {
        return Err(DecompositionError::Dimension(format!(
            "R would be {side}x{side}; limit is {MAX_DENSE_SIDE}"
        )));
    }
    let mut counts = vec![0i64; side * side];
    for (&a, &b) in t.indices().iter().zip(t2.indices()) {
        counts[(a % side) * side + b % side] += 1;
    }
    let r = RationalMatrix::new(side, side, counts, 1 << s)
        .expect("shape is side x side")
        .reduced();
    let r_is_logical = r.is_logical();
    Ok(RegularityReport {
        r,
        r_is_logical,
        verdict: if r_is_logical {
            RegularityVerdict::Inconclusive
        } else {
            RegularityVerdict::NotRegular
        },
    })
}

/// A decomposition of a given order together with its coordinate change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    /// `n − s`; zero means undecomposable.
    pub order: usize,
    pub s: usize,
    /// The CC-PEVP realizing the decomposition; `None` for order 0.
    pub partition: Option<Partition>,
    pub q: LogicalMatrix,
    pub t: LogicalMatrix,
    pub decomposed: DecomposedBcn,
    /// Other CC-PEVPs of the same order, counted up to `alternatives_cap`.
    pub alternatives: usize,
    /// False when counting stopped at the cap.
    pub alternatives_complete: bool,
    /// The observability partition 𝓒 the search was seeded with.
    pub observability_partition: Partition,
}

impl DecompositionResult {
    /// The network in `z = T x` coordinates.
    pub fn transformed(&self, b: &Bcn) -> Bcn {
        b.transform(&self.t).expect("T is a 2^n permutation")
    }
}

/// Maximum-order decomposition, counting up to [`ALTERNATIVES_CAP`] alternatives.
pub fn max_decomposition(b: &Bcn) -> Result<DecompositionResult, DecompositionError> {
    max_decomposition_with_cap(b, ALTERNATIVES_CAP)
}

pub fn max_decomposition_with_cap(
    b: &Bcn,
    alternatives_cap: usize,
) -> Result<DecompositionResult, DecompositionError> {
    let c = observability::obs_partition(b);
    let d_max = max_feasible_order(&c).min(b.n());
    for d in (1..=d_max).rev() {
        if let Some(r) = decompose_with(b, &c, d, alternatives_cap)? {
            return Ok(r);
        }
    }
    trivial(b, c)
}

/// Decomposition of exactly order `d`, if one exists.
pub fn decompose_at_order(
    b: &Bcn,
    d: usize,
    alternatives_cap: usize,
) -> Result<Option<DecompositionResult>, DecompositionError> {
    if d > b.n() {
        return Err(DecompositionError::Dimension(format!(
            "order {d} exceeds n = {}",
            b.n()
        )));
    }
    let c = observability::obs_partition(b);
    if d == 0 {
        return trivial(b, c).map(Some);
    }
    decompose_with(b, &c, d, alternatives_cap)
}

/// Every CC-PEVP of the maximum order (empty when undecomposable).
pub fn all_max_order_partitions(b: &Bcn) -> Vec<Partition> {
    let c = observability::obs_partition(b);
    let d_max = max_feasible_order(&c).min(b.n());
    for d in (1..=d_max).rev() {
        let found: Vec<Partition> = CcPevpSearch::new(b, &c, d).collect();
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

fn decompose_with(
    b: &Bcn,
    c: &Partition,
    d: usize,
    alternatives_cap: usize,
) -> Result<Option<DecompositionResult>, DecompositionError> {
    let mut search = CcPevpSearch::new(b, c, d);
    let Some(first) = search.next() else {
        return Ok(None);
    };
    let mut alternatives = 0;
    let mut alternatives_complete = true;
    for _ in search.by_ref() {
        if alternatives == alternatives_cap {
            alternatives_complete = false;
            break;
        }
        alternatives += 1;
    }
    let s = b.n() - d;
    let q = q_from_partition(&first)?;
    let t = t_from_q(&q)?;
    let decomposed = extract_subsystems(b, &t, s).map_err(|e| {
        DecompositionError::InvariantViolation(format!("CC-PEVP {first} did not decompose: {e}"))
    })?;
    Ok(Some(DecompositionResult {
        order: d,
        s,
        partition: Some(first),
        q,
        t,
        decomposed,
        alternatives,
        alternatives_complete,
        observability_partition: c.clone(),
    }))
}

fn trivial(b: &Bcn, c: Partition) -> Result<DecompositionResult, DecompositionError> {
    let t = LogicalMatrix::identity(b.state_count());
    let decomposed = extract_subsystems(b, &t, b.n())?;
    Ok(DecompositionResult {
        order: 0,
        s: b.n(),
        partition: None,
        q: t.clone(),
        t,
        decomposed,
        alternatives: 0,
        alternatives_complete: true,
        observability_partition: c,
    })
}
