//! Partitions of the vertex set `{1, …, N}` and the CC-PEVP predicate
//! (common concolorous perfect equal vertex partition).
//!
//! Vertices are 0-based in memory; constructors named `*_one_based` and the
//! `Display` impl use the 1-based numbering of the δ notation.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::stp::LogicalMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("universe size mismatch: {0} vs {1}")]
    UniverseMismatch(usize, usize),
    #[error("vertex {vertex} outside universe 1..={universe}")]
    VertexOutOfRange { vertex: usize, universe: usize },
    #[error("vertex {0} appears in more than one block")]
    Overlap(usize),
    #[error("vertex {0} is not covered by any block")]
    Uncovered(usize),
    #[error("empty block")]
    EmptyBlock,
    #[error("greatest common refinement of an empty family")]
    EmptyFamily,
}

/// A partition in canonical form: blocks ordered by their minimum element,
/// each block ascending. The derived `Ord` is lexicographic on that block list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    universe: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes 0-based blocks.
    pub fn new(universe: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; universe];
        for block in &blocks {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &v in block {
                if v >= universe {
                    return Err(PartitionError::VertexOutOfRange {
                        vertex: v + 1,
                        universe,
                    });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(PartitionError::Overlap(v + 1));
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::Uncovered(v + 1));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { universe, blocks })
    }

    pub fn from_one_based<B, I>(universe: usize, blocks: B) -> Result<Self, PartitionError>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let mut zero = Vec::new();
        for block in blocks {
            let mut b = Vec::new();
            for v in block {
                if v == 0 {
                    return Err(PartitionError::VertexOutOfRange {
                        vertex: 0,
                        universe,
                    });
                }
                b.push(v - 1);
            }
            zero.push(b);
        }
        Self::new(universe, zero)
    }

    /// Vertices with equal labels share a block.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (v, label) in labels.iter().enumerate() {
            let next = blocks.len();
            let id = *ids.entry(label).or_insert(next);
            if id == next {
                blocks.push(Vec::new());
            }
            blocks[id].push(v);
        }
        // first-occurrence order is already canonical
        Self {
            universe: labels.len(),
            blocks,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            universe: n,
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            universe: n,
            blocks: if n == 0 {
                vec![]
            } else {
                vec![(0..n).collect()]
            },
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    /// Canonical 0-based blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|v| v + 1).collect())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Canonical block number of every vertex.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.universe];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                labels[v] = i;
            }
        }
        labels
    }

    /// Common block size, if all blocks have the same size.
    pub fn equal_block_size(&self) -> Option<usize> {
        let first = self.blocks.first()?.len();
        self.blocks
            .iter()
            .all(|b| b.len() == first)
            .then_some(first)
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool, PartitionError> {
        self.same_universe(other)?;
        let labels = other.labels();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&v| labels[v] == labels[b[0]])))
    }

    /// Nonempty pairwise intersections of blocks.
    pub fn meet(&self, other: &Partition) -> Result<Partition, PartitionError> {
        self.same_universe(other)?;
        let (a, b) = (self.labels(), other.labels());
        let pairs: Vec<(usize, usize)> = a.into_iter().zip(b).collect();
        Ok(Self::from_labels(&pairs))
    }

    fn same_universe(&self, other: &Partition) -> Result<(), PartitionError> {
        if self.universe != other.universe {
            return Err(PartitionError::UniverseMismatch(
                self.universe,
                other.universe,
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (k, v) in b.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", v + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// Greatest common refinement, folded left with [`Partition::meet`].
pub fn gcr(parts: &[Partition]) -> Result<Partition, PartitionError> {
    let (first, rest) = parts.split_first().ok_or(PartitionError::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, p| acc.meet(p))
}

/// Vertex colors induced by equal columns of the output matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    color_of: Vec<usize>,
}

impl Coloring {
    pub fn universe_size(&self) -> usize {
        self.color_of.len()
    }

    /// Color id of 0-based vertex `v`; ids count up from 0 in order of first occurrence.
    pub fn color(&self, v: usize) -> usize {
        self.color_of[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    pub fn partition(&self) -> Partition {
        Partition::from_labels(&self.color_of)
    }
}

pub fn color_classes(h: &LogicalMatrix) -> Coloring {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let color_of = h
        .indices()
        .iter()
        .map(|&row| {
            let next = ids.len();
            *ids.entry(row).or_insert(next)
        })
        .collect();
    Coloring { color_of }
}

/// Successors of the 0-based vertex set `set` in the graph with adjacency
/// matrix `lj`, sorted and deduplicated.
pub fn out_neighborhood(lj: &LogicalMatrix, set: &[usize]) -> Result<Vec<usize>, PartitionError> {
    let mut out = Vec::with_capacity(set.len());
    for &q in set {
        if q >= lj.cols() {
            return Err(PartitionError::VertexOutOfRange {
                vertex: q + 1,
                universe: lj.cols(),
            });
        }
        out.push(lj.index(q));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Which clause of the CC-PEVP definition failed. Block and input numbers are
/// 1-based (blocks in canonical order), vertices 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcPevpViolation {
    #[error("partition covers {partition} vertices but the graphs have {expected}")]
    UniverseMismatch { partition: usize, expected: usize },
    #[error("graph {input} is {rows}x{cols}, expected square of size {expected}")]
    GraphShape {
        input: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("block {block} has {size} vertices, expected {expected}")]
    UnequalBlocks {
        block: usize,
        size: usize,
        expected: usize,
    },
    #[error("out-neighborhood of block {block} in graph {input} meets blocks {targets:?}")]
    NotPerfect {
        block: usize,
        input: usize,
        targets: Vec<usize>,
    },
    #[error("block {block} mixes colors: vertices {first} and {second}")]
    MixedColors {
        block: usize,
        first: usize,
        second: usize,
    },
}

/// Checks the CC-PEVP clauses in order: equal block sizes, monochromatic
/// blocks, perfectness for every graph.
pub fn check_cc_pevp(
    s: &Partition,
    graphs: &[LogicalMatrix],
    h: &LogicalMatrix,
) -> Result<(), CcPevpViolation> {
    let n = h.cols();
    if s.universe_size() != n {
        return Err(CcPevpViolation::UniverseMismatch {
            partition: s.universe_size(),
            expected: n,
        });
    }
    for (j, g) in graphs.iter().enumerate() {
        if g.rows() != n || g.cols() != n {
            return Err(CcPevpViolation::GraphShape {
                input: j + 1,
                rows: g.rows(),
                cols: g.cols(),
                expected: n,
            });
        }
    }
    let expected = n / s.len().max(1);
    for (i, b) in s.blocks().iter().enumerate() {
        if b.len() * s.len() != n {
            return Err(CcPevpViolation::UnequalBlocks {
                block: i + 1,
                size: b.len(),
                expected,
            });
        }
    }
    for (i, b) in s.blocks().iter().enumerate() {
        if let Some(&q) = b.iter().find(|&&q| h.index(q) != h.index(b[0])) {
            return Err(CcPevpViolation::MixedColors {
                block: i + 1,
                first: b[0] + 1,
                second: q + 1,
            });
        }
    }
    let labels = s.labels();
    for (i, b) in s.blocks().iter().enumerate() {
        for (j, g) in graphs.iter().enumerate() {
            let target = labels[g.index(b[0])];
            if b.iter().any(|&q| labels[g.index(q)] != target) {
                let mut targets: Vec<usize> = b.iter().map(|&q| labels[g.index(q)] + 1).collect();
                targets.sort_unstable();
                targets.dedup();
                return Err(CcPevpViolation::NotPerfect {
                    block: i + 1,
                    input: j + 1,
                    targets,
                });
            }
        }
    }
    Ok(())
}

pub fn is_cc_pevp(s: &Partition, graphs: &[LogicalMatrix], h: &LogicalMatrix) -> bool {
    check_cc_pevp(s, graphs, h).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::from_one_based(n, blocks.iter().map(|b| b.iter().copied())).unwrap()
    }

    fn lm(rows: usize, d: &[usize]) -> LogicalMatrix {
        LogicalMatrix::new(rows, d).unwrap()
    }

    fn three_state_graphs() -> (Vec<LogicalMatrix>, LogicalMatrix) {
        (
            vec![
                lm(8, &[3, 1, 3, 1, 1, 3, 1, 3]),
                lm(8, &[4, 5, 4, 5, 4, 5, 4, 5]),
            ],
            lm(2, &[2, 1, 1, 1, 1, 1, 1, 2]),
        )
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            Partition::from_one_based(4, [vec![1, 2], vec![2, 3, 4]]),
            Err(PartitionError::Overlap(2))
        ));
        assert!(matches!(
            Partition::from_one_based(4, [vec![1, 2], vec![3]]),
            Err(PartitionError::Uncovered(4))
        ));
        assert!(matches!(
            Partition::from_one_based(4, [vec![1, 2, 3, 5]]),
            Err(PartitionError::VertexOutOfRange { vertex: 5, .. })
        ));
        assert!(matches!(
            Partition::new(2, vec![vec![0, 1], vec![]]),
            Err(PartitionError::EmptyBlock)
        ));
        let q = p(4, &[&[4, 3], &[2, 1]]);
        assert_eq!(q.blocks_one_based(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(q.to_string(), "{{1,2},{3,4}}");
    }

    #[test]
    fn refinement_examples() {
        let any = p(4, &[&[1, 3], &[2, 4]]);
        assert!(Partition::singletons(4).refines(&any).unwrap());
        assert!(!p(4, &[&[1, 2], &[3, 4]]).refines(&any).unwrap());
        let s = p(8, &[&[1, 8], &[3, 6], &[4, 5], &[2, 7]]);
        let c = p(8, &[&[1, 8], &[2, 4, 5, 7], &[3, 6]]);
        assert!(s.refines(&c).unwrap());
        assert!(!c.refines(&s).unwrap());
        assert!(s.refines(&Partition::singletons(4)).is_err());
    }

    #[test]
    fn meet_examples() {
        let a = p(4, &[&[1, 2], &[3, 4]]);
        let b = p(4, &[&[1, 3], &[2, 4]]);
        assert_eq!(
            a.meet(&Partition::singletons(4)).unwrap(),
            Partition::singletons(4)
        );
        assert_eq!(a.meet(&b).unwrap(), Partition::singletons(4));
        let c = p(4, &[&[1, 2, 3], &[4]]);
        assert_eq!(c.meet(&a).unwrap(), p(4, &[&[1, 2], &[3], &[4]]));
    }

    #[test]
    fn gcr_examples() {
        let a = p(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(gcr(std::slice::from_ref(&a)).unwrap(), a);
        let b = p(4, &[&[1, 3], &[2, 4]]);
        assert_eq!(
            gcr(&[a, b, Partition::whole(4)]).unwrap(),
            Partition::singletons(4)
        );
        assert_eq!(gcr(&[]), Err(PartitionError::EmptyFamily));
        // rows of the observability matrix of the first worked example
        let rows: [&[usize]; 4] = [
            &[2, 1, 1, 1, 1, 1, 1, 2],
            &[1, 2, 1, 2, 2, 1, 2, 1],
            &[1; 8],
            &[2; 8],
        ];
        let parts: Vec<Partition> = rows.iter().map(|r| Partition::from_labels(r)).collect();
        assert_eq!(
            gcr(&parts).unwrap(),
            p(8, &[&[1, 8], &[2, 4, 5, 7], &[3, 6]])
        );
    }

    #[test]
    fn colorings() {
        let (_, h) = three_state_graphs();
        assert_eq!(
            color_classes(&h).partition(),
            p(8, &[&[1, 8], &[2, 3, 4, 5, 6, 7]])
        );
        assert_eq!(
            color_classes(&lm(2, &[1, 1, 1])).partition(),
            Partition::whole(3)
        );
        assert_eq!(
            color_classes(&lm(2, &[1, 1, 1, 2])).partition(),
            p(4, &[&[1, 2, 3], &[4]])
        );
        assert_eq!(color_classes(&h).color(0), 0);
        assert_eq!(color_classes(&h).color(1), 1);
    }

    #[test]
    fn out_neighborhoods() {
        let (g, _) = three_state_graphs();
        assert_eq!(out_neighborhood(&g[0], &[0, 7]).unwrap(), vec![2]);
        assert_eq!(out_neighborhood(&g[1], &[0, 7]).unwrap(), vec![3, 4]);
        assert!(out_neighborhood(&g[0], &[]).unwrap().is_empty());
        assert!(out_neighborhood(&g[0], &[8]).is_err());
    }

    #[test]
    fn cc_pevp_examples() {
        let (g, h) = three_state_graphs();
        let s = p(8, &[&[1, 8], &[3, 6], &[4, 5], &[2, 7]]);
        assert_eq!(check_cc_pevp(&s, &g, &h), Ok(()));

        let mixed = p(8, &[&[1, 2], &[3, 6], &[4, 5], &[7, 8]]);
        assert!(!is_cc_pevp(&mixed, &g, &h));
        assert!(matches!(
            check_cc_pevp(&mixed, &g, &h),
            Err(CcPevpViolation::MixedColors { block: 1, .. })
        ));

        let unequal = p(8, &[&[1, 8, 2, 7], &[3, 6], &[4, 5]]);
        assert!(matches!(
            check_cc_pevp(&unequal, &g, &h),
            Err(CcPevpViolation::UnequalBlocks { .. })
        ));

        // {1,8} is concolorous but its block {2,3} breaks perfectness under L_1
        let imperfect = p(8, &[&[1, 8], &[2, 3], &[4, 5], &[6, 7]]);
        assert!(matches!(
            check_cc_pevp(&imperfect, &g, &h),
            Err(CcPevpViolation::NotPerfect { .. })
        ));
        assert!(matches!(
            check_cc_pevp(&Partition::singletons(4), &g, &h),
            Err(CcPevpViolation::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn mixed_colors_reports_witnesses() {
        // single graph, identity dynamics: only the color clause can fail
        let g = vec![LogicalMatrix::identity(4)];
        let h = lm(2, &[1, 2, 1, 1]);
        let s = p(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(
            check_cc_pevp(&s, &g, &h),
            Err(CcPevpViolation::MixedColors {
                block: 1,
                first: 1,
                second: 2
            })
        );
    }
}
