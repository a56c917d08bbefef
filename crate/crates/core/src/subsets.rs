//! Subset enumeration helpers: exact binomials, colexicographic ranks, and a
//! depth-first search over r-subsets with incremental per-prefix state that
//! splits on the first element across worker threads.

use rayon::prelude::*;

/// `C(n, k)` exactly; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Table of `C(n, j)` for `n ≤ max_n`, `j ≤ max_j`, for O(1) colex ranking.
#[derive(Clone, Debug)]
pub struct BinomTable {
    rows: Vec<Vec<u64>>,
}

impl BinomTable {
    pub fn new(max_n: usize, max_j: usize) -> BinomTable {
        let rows = (0..=max_n)
            .map(|n| (0..=max_j).map(|j| u64::try_from(binomial(n as u64, j as u64)).unwrap_or(u64::MAX)).collect())
            .collect();
        BinomTable { rows }
    }

    #[inline]
    pub fn get(&self, n: usize, j: usize) -> u64 {
        self.rows[n][j]
    }

    /// Colex rank `Σ C(s_i, i+1)` of a strictly increasing sequence.
    #[inline]
    pub fn colex_rank(&self, sorted: &[usize]) -> u64 {
        sorted.iter().enumerate().map(|(i, &s)| self.rows[s][i + 1]).sum()
    }
}

/// Colex rank without a table.
pub fn colex_rank(sorted: &[usize]) -> u128 {
    sorted.iter().enumerate().map(|(i, &s)| binomial(s as u64, i as u64 + 1)).sum()
}

/// Calls `f` on every r-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn dfs<S, T>(
    n: usize,
    r: usize,
    chosen: &mut Vec<usize>,
    state: &S,
    extend: &(dyn Fn(&S, usize) -> Option<S> + Sync),
    leaf: &(dyn Fn(&[usize], &S) -> Option<T> + Sync),
    out: &mut Vec<T>,
) {
    if chosen.len() == r {
        if let Some(t) = leaf(chosen, state) {
            out.push(t);
        }
        return;
    }
    let start = chosen.last().map_or(0, |&x| x + 1);
    let remaining = r - chosen.len();
    for i in start..=n - remaining {
        if let Some(next) = extend(state, i) {
            chosen.push(i);
            dfs(n, r, chosen, &next, extend, leaf, out);
            chosen.pop();
        }
    }
}

/// Depth-first search over r-subsets of `0..n`. `extend` derives the state of
/// a prefix from its parent (returning `None` prunes the branch) and `leaf`
/// maps complete subsets to optional outputs. Outputs come back in
/// lexicographic subset order regardless of thread scheduling.
pub fn par_subsets<S, T>(
    n: usize,
    r: usize,
    init: S,
    extend: &(dyn Fn(&S, usize) -> Option<S> + Sync),
    leaf: &(dyn Fn(&[usize], &S) -> Option<T> + Sync),
) -> Vec<T>
where
    S: Sync,
    T: Send,
{
    if r > n {
        return Vec::new();
    }
    if r == 0 {
        return leaf(&[], &init).into_iter().collect();
    }
    let branches: Vec<Vec<T>> = (0..=n - r)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            if let Some(s) = extend(&init, first) {
                let mut chosen = vec![first];
                dfs(n, r, &mut chosen, &s, extend, leaf, &mut out);
            }
            out
        })
        .collect();
    branches.into_iter().flatten().collect()
}
