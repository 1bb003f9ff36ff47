//! Cycle-prefix digraphs `G(d, D)`.
//!
//! Vertices are sequences `x_1 … x_D` of distinct symbols from `1..=d+1`,
//! numbered in lexicographic order. Out-edges are the rotations
//! `R_k(x) = x_k x_1 … x_{k-1} x_{k+1} … x_D` for `2 ≤ k ≤ D` and the shifts
//! `S_m(x) = m x_1 … x_{D-1}` for every symbol `m` not in `x`.
//!
//! Factor `F_j` is `R_{j+1}` for `j < D`. For `j ≥ D`, `F_j` is `S_{y_{j-D}}`
//! where `y_0, y_1, …` lists the missing symbols in cyclic order starting
//! right after `x_D`.

use std::collections::{HashMap, VecDeque};

use crate::cpcount::ff;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::factorization::{Factorization, Word, WordList};
use crate::schedule::{verify_schedule, Schedule};

/// Largest vertex count accepted by [`CpGraph::new`].
pub const MAX_CP_VERTICES: usize = 2_000_000;

#[derive(Debug, Clone)]
pub struct CpGraph {
    d: usize,
    diameter: usize,
    vertices: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

fn check_params(d: usize, diameter: usize) -> Result<()> {
    if diameter < 2 || diameter > d {
        return Err(Error::BadParams(format!("need 2 ≤ D ≤ d, got d = {d}, D = {diameter}")));
    }
    if d >= 255 {
        return Err(Error::BadParams(format!("degree {d} too large")));
    }
    let n = ff(d as i64 + 1, diameter as i64);
    if n > MAX_CP_VERTICES as i64 {
        return Err(Error::BadParams(format!("G({d}, {diameter}) has {n} vertices")));
    }
    Ok(())
}

impl CpGraph {
    pub fn new(d: usize, diameter: usize) -> Result<Self> {
        check_params(d, diameter)?;
        let mut vertices = Vec::new();
        let mut cur = Vec::with_capacity(diameter);
        let mut used = vec![false; d + 2];
        sequences(d as u8 + 1, diameter, &mut cur, &mut used, &mut vertices);
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(CpGraph {
            d,
            diameter,
            vertices,
            index,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &[u8] {
        &self.vertices[v]
    }

    pub fn index_of(&self, seq: &[u8]) -> Option<usize> {
        self.index.get(seq).copied()
    }

    /// The vertex `1 2 … D`.
    pub fn identity(&self) -> usize {
        0
    }

    pub fn label(&self, v: usize) -> String {
        let seq = &self.vertices[v];
        if self.d < 9 {
            seq.iter().map(|s| char::from(b'0' + s)).collect()
        } else {
            seq.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
        }
    }

    /// Image of vertex `v` under factor `F_{factor+1}`.
    pub fn successor_seq(&self, factor: usize, seq: &[u8]) -> Vec<u8> {
        let dd = self.diameter;
        if factor + 1 < dd {
            // R_{factor+2}
            let k = factor + 1;
            let mut out = Vec::with_capacity(dd);
            out.push(seq[k]);
            out.extend_from_slice(&seq[..k]);
            out.extend_from_slice(&seq[k + 1..]);
            out
        } else {
            let j = factor + 1 - dd;
            let y = self.complement_cyclic(seq)[j];
            let mut out = Vec::with_capacity(dd);
            out.push(y);
            out.extend_from_slice(&seq[..dd - 1]);
            out
        }
    }

    /// Missing symbols in cyclic order on `1..=d+1`, starting after the last
    /// entry of `seq`.
    pub fn complement_cyclic(&self, seq: &[u8]) -> Vec<u8> {
        let symbols = self.d as u8 + 1;
        let last = *seq.last().unwrap_or(&symbols);
        (1..=symbols)
            .map(|off| (last - 1 + off) % symbols + 1)
            .filter(|s| !seq.contains(s))
            .collect()
    }

    pub fn successor(&self, factor: usize, v: usize) -> usize {
        let next = self.successor_seq(factor, &self.vertices[v]);
        self.index[&next]
    }

    pub fn digraph(&self) -> Digraph {
        let mut edges = Vec::with_capacity(self.n() * self.d);
        for v in 0..self.n() {
            for j in 0..self.d {
                edges.push((v, self.successor(j, v)));
            }
        }
        let labels = (0..self.n()).map(|v| self.label(v)).collect();
        Digraph::new(self.n(), edges)
            .and_then(|g| g.with_labels(labels))
            .expect("cycle-prefix edges are loop-free and in range")
    }

    pub fn factorization(&self) -> Result<Factorization> {
        let succ = (0..self.d)
            .map(|j| (0..self.n()).map(|v| self.successor(j, v)).collect())
            .collect();
        Factorization::new(self.n(), succ)
    }
}

fn sequences(symbols: u8, len: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for s in 1..=symbols {
        if !used[s as usize] {
            used[s as usize] = true;
            cur.push(s);
            sequences(symbols, len, cur, used, out);
            cur.pop();
            used[s as usize] = false;
        }
    }
}

pub fn build_cp(d: usize, diameter: usize) -> Result<Digraph> {
    Ok(CpGraph::new(d, diameter)?.digraph())
}

pub fn cp_factorization(d: usize, diameter: usize) -> Result<Factorization> {
    CpGraph::new(d, diameter)?.factorization()
}

/// A node of the labelled shortest-path tree. The root has `t = 0` and
/// carries no `c` label (stored as 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub vertex: usize,
    pub c: usize,
    pub t: usize,
    pub parent: Option<usize>,
    /// 0-based factor of the edge from the parent.
    pub letter: Option<usize>,
    pub children: Vec<usize>,
}

/// Shortest-path tree from the identity vertex, in breadth-first order.
/// Node `i` corresponds to word `i` of the tree's word list.
#[derive(Debug, Clone)]
pub struct CpTree {
    pub d: usize,
    pub diameter: usize,
    pub nodes: Vec<TreeNode>,
}

impl CpTree {
    pub fn word(&self, node: usize) -> Word {
        let mut letters = Vec::with_capacity(self.nodes[node].t);
        let mut cur = node;
        while let (Some(p), Some(l)) = (self.nodes[cur].parent, self.nodes[cur].letter) {
            letters.push(l);
            cur = p;
        }
        letters.reverse();
        Word::new(letters)
    }

    pub fn word_list(&self) -> WordList {
        let words = (0..self.nodes.len()).map(|i| self.word(i)).collect();
        WordList::new(self.d, words).expect("tree words use factors 1..=d")
    }

    pub fn depth_count(&self, k: usize) -> usize {
        self.nodes.iter().filter(|n| n.t == k).count()
    }

    pub fn subtree_size(&self, node: usize) -> usize {
        1 + self.nodes[node]
            .children
            .iter()
            .map(|&ch| self.subtree_size(ch))
            .sum::<usize>()
    }

    /// Node indices of the subtree rooted at `node`, in increasing order.
    pub fn subtree(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.nodes[u].children.iter().copied());
        }
        out.sort_unstable();
        out
    }
}

/// Grows the labelled shortest-path tree.
///
/// The root's `F_j` child gets `(c, t) = (j, 1)`. Below a node `(c, t)` with
/// `t < D` there is an `F_j` edge for every `j ≥ t` except `j = t` when
/// `c = 1`; its head is labelled `(c, t+1)` when `j ≥ t + c` and
/// `(c - 1, t+1)` otherwise.
pub fn grow_tree(d: usize, diameter: usize) -> Result<(CpTree, WordList)> {
    let g = CpGraph::new(d, diameter)?;
    let tree = grow_tree_on(&g)?;
    let wl = tree.word_list();
    Ok((tree, wl))
}

pub fn grow_tree_on(g: &CpGraph) -> Result<CpTree> {
    let (d, diameter) = (g.d(), g.diameter());
    let mut nodes = vec![TreeNode {
        vertex: g.identity(),
        c: 0,
        t: 0,
        parent: None,
        letter: None,
        children: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let (c, t, vertex) = (nodes[u].c, nodes[u].t, nodes[u].vertex);
        if t == diameter {
            continue;
        }
        let children: Vec<(usize, usize)> = if t == 0 {
            (1..=d).map(|j| (j, j)).collect()
        } else {
            (t..=d)
                .filter(|&j| !(j == t && c == 1))
                .map(|j| (j, if j >= t + c { c } else { c - 1 }))
                .collect()
        };
        for (j, child_c) in children {
            let idx = nodes.len();
            nodes.push(TreeNode {
                vertex: g.successor(j - 1, vertex),
                c: child_c,
                t: t + 1,
                parent: Some(u),
                letter: Some(j - 1),
                children: Vec::new(),
            });
            nodes[u].children.push(idx);
            queue.push_back(idx);
        }
    }
    let tree = CpTree { d, diameter, nodes };
    let n1 = d as i64 + 1;
    for k in 1..=diameter {
        let expected = ff(n1, k as i64) - ff(n1, k as i64 - 1);
        let got = tree.depth_count(k) as i64;
        if got != expected {
            return Err(Error::InternalInconsistency(format!(
                "tree for G({d}, {diameter}) has {got} nodes at depth {k}, expected {expected}"
            )));
        }
    }
    Ok(tree)
}

/// Minimum schedule for the tree word list.
///
/// `F_d` occurrences are timed `1..=μ` layer by layer (word order inside a
/// layer). Every other occurrence at a tree node `u` borrows the time of an
/// `F_d` occurrence at `u`: the k-th word through the `F_i` child of `u` is
/// paired with the k-th word through the `F_d` child.
pub fn cp_min_schedule(d: usize, diameter: usize) -> Result<Schedule> {
    let (tree, wl) = grow_tree(d, diameter)?;
    cp_min_schedule_for(&tree, &wl)
}

pub fn cp_min_schedule_for(tree: &CpTree, wl: &WordList) -> Result<Schedule> {
    let d = tree.d;
    let top = d - 1;
    let subtrees: Vec<Vec<usize>> = (0..tree.nodes.len()).map(|u| tree.subtree(u)).collect();

    // (layer, word, head node, rank within head's subtree) for every F_d occurrence.
    let mut fd_occ: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (x, node) in tree.nodes.iter().enumerate() {
        if node.letter == Some(top) {
            for (k, &w) in subtrees[x].iter().enumerate() {
                fd_occ.push((node.t, w, x, k));
            }
        }
    }
    fd_occ.sort_unstable();
    let mut fd_time: HashMap<(usize, usize), u32> = HashMap::with_capacity(fd_occ.len());
    let mut times: Vec<Vec<Option<u32>>> = wl.words().iter().map(|w| vec![None; w.len()]).collect();
    for (i, &(layer, w, x, k)) in fd_occ.iter().enumerate() {
        let t = i as u32 + 1;
        fd_time.insert((x, k), t);
        times[w][layer - 1] = Some(t);
    }

    for (u, node) in tree.nodes.iter().enumerate() {
        if node.children.is_empty() {
            continue;
        }
        let fd_child = node
            .children
            .iter()
            .copied()
            .find(|&ch| tree.nodes[ch].letter == Some(top))
            .ok_or(Error::InjectionInfeasible { factor: d, node: u })?;
        for &a in &node.children {
            let letter = tree.nodes[a].letter.unwrap_or(top);
            if letter == top {
                continue;
            }
            if subtrees[a].len() > subtrees[fd_child].len() {
                return Err(Error::InjectionInfeasible {
                    factor: letter + 1,
                    node: u,
                });
            }
            for (k, &w) in subtrees[a].iter().enumerate() {
                times[w][node.t] = Some(fd_time[&(fd_child, k)]);
            }
        }
    }
    let schedule = Schedule::from_partial(times);
    let check = verify_schedule(wl, &schedule).map_err(|v| {
        Error::InternalInconsistency(format!("minimum schedule for G({d}, {}) invalid: {v}", tree.diameter))
    })?;
    if u64::from(check.makespan) != fd_occ.len() as u64 {
        return Err(Error::InternalInconsistency(format!(
            "makespan {} differs from F_d usage {}",
            check.makespan,
            fd_occ.len()
        )));
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::verify_spanning;

    fn seq(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn g22_vertices_and_neighbors() {
        let g = CpGraph::new(2, 2).unwrap();
        let labels: Vec<String> = (0..g.n()).map(|v| g.label(v)).collect();
        assert_eq!(labels, ["12", "13", "21", "23", "31", "32"]);
        let dg = g.digraph();
        let v12 = g.index_of(&seq("12")).unwrap();
        let mut out: Vec<String> = dg.out_neighbors(v12).iter().map(|&v| g.label(v)).collect();
        out.sort();
        assert_eq!(out, ["21", "31"]);
        assert_eq!(dg.check_regular().unwrap(), 2);
    }

    #[test]
    fn g22_cyclic_shift_factor() {
        let g = CpGraph::new(2, 2).unwrap();
        let f2 = |s: &str| g.label(g.successor(1, g.index_of(&seq(s)).unwrap()));
        assert_eq!(f2("12"), "31");
        assert_eq!(f2("21"), "32");
        assert_eq!(f2("31"), "23");
        assert_eq!(g.label(g.successor(0, g.index_of(&seq("12")).unwrap())), "21");
    }

    #[test]
    fn complement_starts_after_last_entry() {
        let g = CpGraph::new(4, 2).unwrap();
        assert_eq!(g.complement_cyclic(&seq("13")), vec![4, 5, 2]);
        assert_eq!(g.complement_cyclic(&seq("25")), vec![1, 3, 4]);
    }

    #[test]
    fn sizes() {
        assert_eq!(CpGraph::new(4, 3).unwrap().n(), 60);
        assert_eq!(CpGraph::new(3, 2).unwrap().n(), 12);
    }

    #[test]
    fn bad_params() {
        assert!(matches!(CpGraph::new(2, 3), Err(Error::BadParams(_))));
        assert!(matches!(CpGraph::new(3, 1), Err(Error::BadParams(_))));
    }

    #[test]
    fn g22_tree_words_and_endpoints() {
        let g = CpGraph::new(2, 2).unwrap();
        let (tree, wl) = grow_tree(2, 2).unwrap();
        let words: Vec<String> = wl.words().iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["∅", "F1", "F2", "F1F2", "F2F1", "F2F2"]);
        let ends: Vec<String> = tree.nodes.iter().map(|n| g.label(n.vertex)).collect();
        assert_eq!(ends, ["12", "21", "31", "32", "13", "23"]);
        verify_spanning(&g.factorization().unwrap(), &wl).unwrap();
    }

    #[test]
    fn depth_one_labels_cover_range() {
        let (tree, _) = grow_tree(3, 2).unwrap();
        let mut cs: Vec<usize> = tree.nodes.iter().filter(|n| n.t == 1).map(|n| n.c).collect();
        cs.sort_unstable();
        assert_eq!(cs, vec![1, 2, 3]);
    }

    #[test]
    fn min_schedule_d2() {
        let s = cp_min_schedule(4, 2).unwrap();
        assert_eq!(s.makespan(), 9);
    }
}
