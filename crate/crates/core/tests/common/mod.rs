#![allow(dead_code)]

use bcn_core::partition::color_classes;
use bcn_core::{Bcn, LogicalMatrix, Partition};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const THREE_STATE_DSL: &str = "\
inputs: u
states: x1, x2, x3
outputs: y
x1' = x3 ∨ u
x2' = (x1 ∧ ¬x3) ∨ (¬x1 ∧ (x3 ↔ u))
x3' = x3 → u
y = (x1 ↔ x3) → (x2 \u{2228}\u{0304} x3)
";

pub fn lm(rows: usize, delta: &[usize]) -> LogicalMatrix {
    LogicalMatrix::new(rows, delta).unwrap()
}

pub fn part(n: usize, blocks: &[&[usize]]) -> Partition {
    Partition::from_one_based(n, blocks.iter().map(|b| b.iter().copied())).unwrap()
}

pub fn three_state() -> Bcn {
    Bcn::from_deltas(
        3,
        1,
        1,
        &[vec![3, 1, 3, 1, 1, 3, 1, 3], vec![4, 5, 4, 5, 4, 5, 4, 5]],
        &[2, 1, 1, 1, 1, 1, 1, 2],
    )
    .unwrap()
}

pub fn regularity_example() -> Bcn {
    Bcn::from_deltas(
        3,
        1,
        1,
        &[vec![6, 8, 1, 8, 7, 8, 6, 8], vec![6, 8, 7, 8, 1, 8, 6, 8]],
        &[1, 1, 2, 1, 2, 1, 1, 1],
    )
    .unwrap()
}

pub fn odd_block() -> Bcn {
    Bcn::from_deltas(2, 0, 1, &[vec![1, 2, 3, 1]], &[1, 1, 1, 2]).unwrap()
}

/// `x_i' = x_{i+1}`, `x_n' = u`, `y = x_1`.
pub fn shift_register(n: usize) -> Bcn {
    let ns = 1usize << n;
    let l1: Vec<usize> = (0..ns).map(|q| 2 * (q % (ns / 2)) + 1).collect();
    let l2: Vec<usize> = l1.iter().map(|k| k + 1).collect();
    let h: Vec<usize> = (0..ns).map(|q| if q < ns / 2 { 1 } else { 2 }).collect();
    Bcn::from_deltas(n, 1, 1, &[l1, l2], &h).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, size: usize) -> LogicalMatrix {
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    LogicalMatrix::from_indices(size, perm).unwrap()
}

pub fn random_bcn(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize) -> Bcn {
    let ns = 1usize << n;
    let l = (0..ns << m).map(|_| rng.gen_range(0..ns)).collect();
    let h = (0..ns).map(|_| rng.gen_range(0..1usize << p)).collect();
    Bcn::new(
        n,
        m,
        p,
        LogicalMatrix::from_indices(ns, l).unwrap(),
        LogicalMatrix::from_indices(1 << p, h).unwrap(),
    )
    .unwrap()
}

/// A network built in decomposed coordinates (`z¹` of size `s` autonomous,
/// output reading `z¹` only) and then scrambled by a random state permutation.
pub fn planted_bcn(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize, s: usize) -> Bcn {
    let ns = 1usize << n;
    let width = 1usize << (n - s);
    let g1: Vec<Vec<usize>> = (0..1usize << m)
        .map(|_| {
            (0..1usize << s)
                .map(|_| rng.gen_range(0..1usize << s))
                .collect()
        })
        .collect();
    let mm: Vec<usize> = (0..1usize << s)
        .map(|_| rng.gen_range(0..1usize << p))
        .collect();
    let mut l = Vec::with_capacity(ns << m);
    for g in &g1 {
        for z in 0..ns {
            l.push(g[z / width] * width + rng.gen_range(0..width));
        }
    }
    let h = (0..ns).map(|z| mm[z / width]).collect();
    let bz = Bcn::new(
        n,
        m,
        p,
        LogicalMatrix::from_indices(ns, l).unwrap(),
        LogicalMatrix::from_indices(1 << p, h).unwrap(),
    )
    .unwrap();
    bz.transform(&random_permutation(rng, ns)).unwrap()
}

/// Largest output color class has at most 12 of 16 states, which keeps the
/// brute-force oracle for `n = 4` within tens of thousands of candidates.
pub fn oracle_friendly(b: &Bcn) -> bool {
    if b.n() < 4 {
        return true;
    }
    let colors = color_classes(b.h());
    let mut counts = vec![0usize; b.state_count()];
    for &c in colors.colors() {
        counts[c] += 1;
    }
    counts.into_iter().max().unwrap_or(0) * 4 <= b.state_count() * 3
}

/// Random or planted network accepted by [`oracle_friendly`], redrawn as needed.
pub fn oracle_network(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    p: usize,
    planted: Option<usize>,
) -> Bcn {
    loop {
        let b = match planted {
            Some(s) if n == 4 => planted_bcn(rng, n, m, p, s.clamp(2, n)),
            Some(s) => planted_bcn(rng, n, m, p, s.min(n)),
            None => random_bcn(rng, n, m, p),
        };
        if oracle_friendly(&b) {
            return b;
        }
    }
}

/// Every partition of `{0..N}` into monochromatic blocks of size `k`, by
/// direct enumeration (smallest free vertex plus a combination of partners).
pub fn monochromatic_equal_partitions(colors: &[usize], k: usize) -> Vec<Partition> {
    fn rec(
        colors: &[usize],
        k: usize,
        used: &mut Vec<bool>,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Partition>,
    ) {
        let Some(v) = used.iter().position(|u| !u) else {
            out.push(Partition::new(colors.len(), blocks.clone()).unwrap());
            return;
        };
        let pool: Vec<usize> = (v + 1..colors.len())
            .filter(|&w| !used[w] && colors[w] == colors[v])
            .collect();
        if pool.len() + 1 < k {
            return;
        }
        let mut pick = Vec::new();
        choose(colors, k, used, blocks, out, v, &pool, 0, &mut pick);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        colors: &[usize],
        k: usize,
        used: &mut Vec<bool>,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Partition>,
        v: usize,
        pool: &[usize],
        from: usize,
        pick: &mut Vec<usize>,
    ) {
        if pick.len() + 1 == k {
            let mut block = vec![v];
            block.extend(pick.iter().copied());
            for &w in &block {
                used[w] = true;
            }
            blocks.push(block.clone());
            rec(colors, k, used, blocks, out);
            blocks.pop();
            for &w in &block {
                used[w] = false;
            }
            return;
        }
        for i in from..pool.len() {
            pick.push(pool[i]);
            choose(colors, k, used, blocks, out, v, pool, i + 1, pick);
            pick.pop();
        }
    }

    let mut out = Vec::new();
    if k == 0 || !colors.len().is_multiple_of(k) {
        return out;
    }
    rec(
        colors,
        k,
        &mut vec![false; colors.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Every partition of `{0..N}` into blocks of size `k`, colors ignored.
pub fn equal_partitions(universe: usize, k: usize) -> Vec<Partition> {
    monochromatic_equal_partitions(&vec![0; universe], k)
}

/// CC-PEVPs with block size `2^d` by exhaustive enumeration and filtering.
pub fn oracle_cc_pevps(b: &Bcn, d: usize) -> Vec<Partition> {
    let graphs = b.blocks();
    let candidates = if b.n() <= 3 {
        equal_partitions(b.state_count(), 1 << d)
    } else {
        monochromatic_equal_partitions(color_classes(b.h()).colors(), 1 << d)
    };
    let mut found: Vec<Partition> = candidates
        .into_iter()
        .filter(|s| bcn_core::is_cc_pevp(s, &graphs, b.h()))
        .collect();
    found.sort();
    found
}

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<i64>,
}

impl Dense {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        Dense {
            rows: n,
            cols: n,
            a,
        }
    }

    pub fn from_logical(m: &LogicalMatrix) -> Self {
        let mut a = vec![0; m.rows() * m.cols()];
        for c in 0..m.cols() {
            a[m.index(c) * m.cols() + c] = 1;
        }
        Dense {
            rows: m.rows(),
            cols: m.cols(),
            a,
        }
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        assert_eq!(self.cols, o.rows);
        let mut a = vec![0; self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.a[i * self.cols + k];
                if x != 0 {
                    for j in 0..o.cols {
                        a[i * o.cols + j] += x * o.a[k * o.cols + j];
                    }
                }
            }
        }
        Dense {
            rows: self.rows,
            cols: o.cols,
            a,
        }
    }

    pub fn kron(&self, o: &Dense) -> Dense {
        let (rows, cols) = (self.rows * o.rows, self.cols * o.cols);
        let mut a = vec![0; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        a[(i * o.rows + k) * cols + j * o.cols + l] =
                            self.a[i * self.cols + j] * o.a[k * o.cols + l];
                    }
                }
            }
        }
        Dense { rows, cols, a }
    }

    /// `A ⋉ B = (A ⊗ I_{α/n})(B ⊗ I_{α/p})`, `α = lcm(n, p)`.
    pub fn stp(&self, o: &Dense) -> Dense {
        let alpha = num_lcm(self.cols, o.rows);
        self.kron(&Dense::identity(alpha / self.cols))
            .mul(&o.kron(&Dense::identity(alpha / o.rows)))
    }

    /// Swap matrix from its defining column blocks `[I_n ⊗ δ_m^1, …, I_n ⊗ δ_m^m]`.
    pub fn swap(m: usize, n: usize) -> Dense {
        let mut blocks = Vec::new();
        for i in 0..m {
            let mut e = Dense {
                rows: m,
                cols: 1,
                a: vec![0; m],
            };
            e.a[i] = 1;
            blocks.push(Dense::identity(n).kron(&e));
        }
        let (rows, cols) = (m * n, m * n);
        let mut a = vec![0; rows * cols];
        for (bi, b) in blocks.iter().enumerate() {
            for r in 0..rows {
                for c in 0..n {
                    a[r * cols + bi * n + c] = b.a[r * n + c];
                }
            }
        }
        Dense { rows, cols, a }
    }
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
