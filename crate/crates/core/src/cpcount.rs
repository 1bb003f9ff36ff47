//! Closed-form and recursive counts over the cycle-prefix shortest-path tree.
//!
//! Notation: `(n)_k` is the falling factorial. `T(c, t)` counts depth-`k`
//! leaves below a node labelled `(c, t)`, `V(c, t)` counts nodes with that
//! label, `U(j, c, t)` counts `F_j` edges leaving them and `S_k(j, t)` counts
//! length-`k` words whose `t`-th letter is `F_j`.

use serde::{Deserialize, Serialize};

use crate::cpgraph::{CpGraph, CpTree};
use crate::digraph::ceil_div;
use crate::error::{Error, Result};

/// Falling factorial `n (n-1) … (n-k+1)`; 1 for `k = 0`, 0 for `k < 0` or `n < 0`.
pub fn ff(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 {
        return 0;
    }
    (0..k).map(|i| n - i).product()
}

/// Degree, diameter and target distance for the tree counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountContext {
    d: usize,
    diameter: usize,
    k: usize,
    // t_table[c][t], 0 <= c <= d+1, 0 <= t <= k+1
    t_table: Vec<Vec<i64>>,
}

impl CountContext {
    pub fn new(d: usize, diameter: usize, k: usize) -> Result<Self> {
        if diameter < 2 || diameter > d {
            return Err(Error::BadParams(format!("need 2 ≤ D ≤ d, got d = {d}, D = {diameter}")));
        }
        if k < 1 || k > diameter {
            return Err(Error::BadParams(format!("need 1 ≤ k ≤ D, got k = {k}, D = {diameter}")));
        }
        let mut t_table = vec![vec![0i64; k + 2]; d + 2];
        for t in (1..=k).rev() {
            for c in 1..=(d + 1 - t) {
                t_table[c][t] = if t == k {
                    1
                } else {
                    let stay = (d + 1 - t - c) as i64;
                    c as i64 * t_table[c - 1][t + 1] + stay * t_table[c][t + 1]
                };
            }
        }
        Ok(CountContext {
            d,
            diameter,
            k,
            t_table,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn in_range(&self, c: i64, t: i64) -> bool {
        t >= 1 && t <= self.k as i64 && c >= 1 && c <= self.d as i64 - t + 1
    }

    /// Leaf count by the two-term recursion, zero outside the label range.
    pub fn t_rec(&self, c: i64, t: i64) -> i64 {
        if self.in_range(c, t) {
            self.t_table[c as usize][t as usize]
        } else {
            0
        }
    }

    pub fn t_closed(&self, c: i64, t: i64) -> i64 {
        if !self.in_range(c, t) {
            return 0;
        }
        let (d, k) = (self.d as i64, self.k as i64);
        let base = ff(d - t + 1, k - t);
        if k - t < c {
            base
        } else {
            base - ff(k - t, c) * ff(d - t + 1 - c, k - t - c)
        }
    }

    /// `S_k(j, t)` from the leaf counts.
    pub fn s_rec(&self, j: i64, t: i64) -> i64 {
        let (d, k) = (self.d as i64, self.k as i64);
        if j < 1 || j > d || t < 1 || t > k {
            return 0;
        }
        if t == 1 {
            return self.t_rec(j, 1);
        }
        let s = t - 1;
        if j < s {
            return 0;
        }
        let inner: i64 = (1..=d - s).map(|c| self.t_rec(c, t)).sum::<i64>() + self.t_rec(j - s, t);
        ff(d + 1, s - 1) * inner
    }

    /// `S_k(j, t)` by the expanded case analysis.
    pub fn s_closed(&self, j: i64, t: i64) -> i64 {
        let (d, k) = (self.d as i64, self.k as i64);
        if j < 1 || j > d || t < 1 || t > k {
            return 0;
        }
        if t == 1 {
            return if j < k {
                ff(d, k - 1) - ff(k - 1, j) * ff(d - j, k - j - 1)
            } else {
                ff(d, k - 1)
            };
        }
        let scale = ff(d + 1, t - 2);
        let shifted = (d - k + 1) * ff(d - t + 2, k - t);
        if j < t - 1 {
            0
        } else if j == t - 1 && j == k - 1 {
            scale * (d - t + 1)
        } else if j == t - 1 {
            scale * shifted
        } else if j < k {
            scale * (shifted + ff(d - t + 1, k - t) - ff(k - t, j - t + 1) * ff(d - j, k - j - 1))
        } else {
            scale * (shifted + ff(d - t + 1, k - t))
        }
    }
}

/// Number of tree nodes labelled `(c, t)`.
pub fn v_closed(c: i64, t: i64, d: i64) -> i64 {
    if t >= 1 && c >= 1 && c <= d - t + 1 {
        ff(d + 1, t - 1)
    } else {
        0
    }
}

/// Number of `F_j` edges leaving nodes labelled `(c, t)`.
pub fn u_count(j: i64, c: i64, t: i64, d: i64) -> i64 {
    if (t < j && j <= d) || (c != 1 && j == t) {
        v_closed(c, t, d)
    } else {
        0
    }
}

/// Total uses of `F_d` in the tree word list.
pub fn mu(d: usize, diameter: usize) -> Result<u64> {
    let mut total = 0i64;
    for k in 1..=diameter {
        let ctx = CountContext::new(d, diameter, k)?;
        total += (1..=k as i64).map(|t| ctx.s_closed(d as i64, t)).sum::<i64>();
    }
    Ok(total as u64)
}

/// Distance lower bound for `G(d, D)` from the vertex count at each distance.
pub fn theta_cp(d: usize, diameter: usize) -> Result<u64> {
    if diameter < 2 || diameter > d {
        return Err(Error::BadParams(format!("need 2 ≤ D ≤ d, got d = {d}, D = {diameter}")));
    }
    let di = d as i64;
    let sum: i64 = (1..=diameter as i64)
        .map(|k| k * ff(di + 1, k - 1) * (di - k + 1))
        .sum();
    Ok(ceil_div(sum as u64, d as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub j: usize,
    pub t: usize,
    pub k: usize,
}

/// Checks `S_k(j+1, t) ≥ S_k(j, t)` for every `t ≤ k ≤ D` and `t-1 ≤ j < d`.
pub fn check_monotone(d: usize, diameter: usize) -> Result<Result<(), Counterexample>> {
    for k in 1..=diameter {
        let ctx = CountContext::new(d, diameter, k)?;
        for t in 1..=k {
            for j in t.saturating_sub(1).max(1)..d {
                if ctx.s_closed(j as i64 + 1, t as i64) < ctx.s_closed(j as i64, t as i64) {
                    return Ok(Err(Counterexample { j, t, k }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// `Σ_{b=1}^{p} (p)_b (a-b)_{p-b} = p (a)_{p-1}`.
pub fn falling_identity_holds(p: i64, a: i64) -> bool {
    let lhs: i64 = (1..=p).map(|b| ff(p, b) * ff(a - b, p - b)).sum();
    lhs == p * ff(a, p - 1)
}

/// Counts read directly off a grown tree, for one target distance `k`.
/// Tables are indexed `[c][t]` or `[j][t]` (1-based, index 0 unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumerated {
    pub k: usize,
    /// Leaf count below the nodes labelled `(c, t)`; `None` when no node has
    /// that label.
    pub leaves: Vec<Vec<Option<i64>>>,
    /// False when two nodes with the same label had different leaf counts.
    pub leaves_consistent: bool,
    pub nodes: Vec<Vec<i64>>,
    /// `edges[j][c][t]`: `F_j` edges leaving `(c, t)` nodes.
    pub edges: Vec<Vec<Vec<i64>>>,
    pub letters: Vec<Vec<i64>>,
}

pub fn enumerate(tree: &CpTree, k: usize) -> Enumerated {
    let d = tree.d;
    let n = tree.nodes.len();
    let mut below = vec![0i64; n];
    for u in (0..n).rev() {
        let node = &tree.nodes[u];
        below[u] = if node.t == k {
            1
        } else {
            node.children.iter().map(|&ch| below[ch]).sum()
        };
    }
    let mut leaves = vec![vec![None; k + 2]; d + 2];
    let mut leaves_consistent = true;
    let mut nodes = vec![vec![0i64; tree.diameter + 2]; d + 2];
    let mut edges = vec![vec![vec![0i64; tree.diameter + 2]; d + 2]; d + 1];
    let mut letters = vec![vec![0i64; k + 1]; d + 1];
    for (u, node) in tree.nodes.iter().enumerate() {
        if node.t == 0 {
            continue;
        }
        nodes[node.c][node.t] += 1;
        for &ch in &node.children {
            let j = tree.nodes[ch].letter.unwrap_or(0) + 1;
            edges[j][node.c][node.t] += 1;
        }
        if node.t <= k {
            match leaves[node.c][node.t] {
                None => leaves[node.c][node.t] = Some(below[u]),
                Some(prev) if prev != below[u] => leaves_consistent = false,
                _ => {}
            }
        }
        if node.t == k {
            let mut cur = u;
            while let (Some(p), Some(l)) = (tree.nodes[cur].parent, tree.nodes[cur].letter) {
                letters[l + 1][tree.nodes[cur].t] += 1;
                cur = p;
            }
        }
    }
    Enumerated {
        k,
        leaves,
        leaves_consistent,
        nodes,
        edges,
        letters,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafRow {
    pub c: usize,
    pub t: usize,
    pub recursive: i64,
    pub closed: i64,
    pub enumerated: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRow {
    pub c: usize,
    pub t: usize,
    pub closed: i64,
    pub enumerated: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub j: usize,
    pub c: usize,
    pub t: usize,
    pub closed: i64,
    /// Absent at depth `D`, where the tree has no out-edges.
    pub enumerated: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterRow {
    pub j: usize,
    pub t: usize,
    pub recursive: i64,
    pub closed: i64,
    pub enumerated: i64,
}

/// Every count for one `(d, D, k)` next to its tree enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub d: usize,
    pub diameter: usize,
    pub k: usize,
    pub leaves: Vec<LeafRow>,
    pub nodes: Vec<NodeRow>,
    pub edges: Vec<EdgeRow>,
    pub letters: Vec<LetterRow>,
    pub mu: u64,
    pub mu_enumerated: u64,
    pub theta: u64,
    pub monotone: bool,
    pub agree: bool,
}

pub fn count_report(d: usize, diameter: usize, k: usize) -> Result<CountReport> {
    let ctx = CountContext::new(d, diameter, k)?;
    let g = CpGraph::new(d, diameter)?;
    let tree = crate::cpgraph::grow_tree_on(&g)?;
    let en = enumerate(&tree, k);
    let di = d as i64;
    let mut agree = en.leaves_consistent;

    let mut leaves = Vec::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for t in 1..=k {
        for c in 1..=(d + 1 - t) {
            let row = LeafRow {
                c,
                t,
                recursive: ctx.t_rec(c as i64, t as i64),
                closed: ctx.t_closed(c as i64, t as i64),
                enumerated: en.leaves[c][t],
            };
            agree &= row.recursive == row.closed && row.enumerated == Some(row.closed);
            leaves.push(row);
            let row = NodeRow {
                c,
                t,
                closed: v_closed(c as i64, t as i64, di),
                enumerated: en.nodes[c][t],
            };
            agree &= row.closed == row.enumerated;
            nodes.push(row);
            for j in 1..=d {
                let enumerated = (t < diameter).then(|| en.edges[j][c][t]);
                let row = EdgeRow {
                    j,
                    c,
                    t,
                    closed: u_count(j as i64, c as i64, t as i64, di),
                    enumerated,
                };
                agree &= enumerated.is_none_or(|e| e == row.closed);
                edges.push(row);
            }
        }
    }
    let mut letters = Vec::new();
    for t in 1..=k {
        for j in 1..=d {
            let row = LetterRow {
                j,
                t,
                recursive: ctx.s_rec(j as i64, t as i64),
                closed: ctx.s_closed(j as i64, t as i64),
                enumerated: en.letters[j][t],
            };
            agree &= row.recursive == row.closed && row.closed == row.enumerated;
            letters.push(row);
        }
    }
    let mu_value = mu(d, diameter)?;
    let mu_enumerated = tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.letter == Some(d - 1))
        .map(|(i, _)| tree.subtree_size(i))
        .sum::<usize>() as u64;
    agree &= mu_value == mu_enumerated;
    Ok(CountReport {
        d,
        diameter,
        k,
        leaves,
        nodes,
        edges,
        letters,
        mu: mu_value,
        mu_enumerated,
        theta: theta_cp(d, diameter)?,
        monotone: check_monotone(d, diameter)?.is_ok(),
        agree,
    })
}
