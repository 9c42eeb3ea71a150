//! Observability matrix and the partition of states it induces.
//!
//! The family `{H L_{j1} ⋯ L_{jr}}` of output-derivative rows is finite; it is
//! closed breadth-first with value deduplication, so every stored row keeps its
//! shortest (then lexicographically smallest) input word.
//!
//! Distinct columns of the matrix characterize observability only for globally
//! controllable networks; [`is_observable_columns`] is the column test alone
//! and checks no controllability hypothesis.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::model::Bcn;
use crate::partition::{self, Partition};
use crate::stp::LogicalMatrix;

/// One row `H L_{j1} ⋯ L_{jr}` with the word `j1 … jr` (1-based inputs) that
/// first produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationRow {
    pub word: Vec<usize>,
    pub row: LogicalMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityMatrix {
    rows: Vec<ObservationRow>,
    width: usize,
}

impl ObservabilityMatrix {
    /// Rows ordered by (word length, word); the empty word (`H`) comes first.
    pub fn rows(&self) -> &[ObservationRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of columns, `2^n`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Length of the longest shortest witness word.
    pub fn r_star(&self) -> usize {
        self.rows.iter().map(|r| r.word.len()).max().unwrap_or(0)
    }

    pub fn contains(&self, row: &LogicalMatrix) -> bool {
        self.rows.iter().any(|r| &r.row == row)
    }

    /// Classes of equal columns.
    pub fn column_partition(&self) -> Partition {
        let columns: Vec<Vec<usize>> = (0..self.width)
            .map(|q| self.rows.iter().map(|r| r.row.index(q)).collect())
            .collect();
        Partition::from_labels(&columns)
    }

    /// The equal-value partition of each row, in row order.
    pub fn row_partitions(&self) -> Vec<Partition> {
        self.rows
            .iter()
            .map(|r| Partition::from_labels(r.row.indices()))
            .collect()
    }
}

pub fn obs_rows(b: &Bcn) -> ObservabilityMatrix {
    closure(b, usize::MAX).expect("unbounded closure")
}

/// [`obs_rows`], giving up with `None` once more than `max_rows` rows exist.
/// The family can be exponentially large in `2^n`.
pub fn obs_rows_limited(b: &Bcn, max_rows: usize) -> Option<ObservabilityMatrix> {
    closure(b, max_rows)
}

fn closure(b: &Bcn, max_rows: usize) -> Option<ObservabilityMatrix> {
    let blocks = b.blocks();
    let mut index: HashSet<Vec<usize>> = HashSet::new();
    let mut rows = vec![ObservationRow {
        word: Vec::new(),
        row: b.h().clone(),
    }];
    index.insert(b.h().indices().to_vec());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (j, lj) in blocks.iter().enumerate() {
            let next = rows[i].row.compose(lj).expect("H L_j dimensions agree");
            if !index.insert(next.indices().to_vec()) {
                continue;
            }
            if rows.len() == max_rows {
                return None;
            }
            let mut word = rows[i].word.clone();
            word.push(j + 1);
            queue.push_back(rows.len());
            rows.push(ObservationRow { word, row: next });
        }
    }
    Some(ObservabilityMatrix {
        rows,
        width: b.state_count(),
    })
}

/// The partition 𝓒 of states with equal observability-matrix columns.
///
/// Computed by iterated splitting (two states stay together while their
/// colors and the classes of all their successors agree), which reaches the
/// same fixpoint without materializing the matrix, whose row family can grow
/// exponentially.
pub fn obs_partition(b: &Bcn) -> Partition {
    let blocks = b.blocks();
    let mut labels: Vec<usize> = partition::color_classes(b.h()).colors().to_vec();
    let mut count = labels.iter().max().map_or(0, |m| m + 1);
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = Vec::with_capacity(labels.len());
        for q in 0..labels.len() {
            let mut sig = Vec::with_capacity(blocks.len() + 1);
            sig.push(labels[q]);
            sig.extend(blocks.iter().map(|lj| labels[lj.index(q)]));
            let fresh = ids.len();
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        let new_count = ids.len();
        labels = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Partition::from_labels(&labels)
}

/// All columns of the observability matrix distinct.
pub fn is_observable_columns(b: &Bcn) -> bool {
    obs_partition(b).len() == b.state_count()
}

/// Some block of `c` has odd size, which rules out any decomposition of order ≥ 1.
pub fn undecomposable_by_parity(c: &Partition) -> bool {
    c.blocks().iter().any(|blk| blk.len() % 2 == 1)
}
