//! Directed graphs (possibly with parallel edges), regularity checks and
//! distance statistics.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer ceiling of `a / b` for `b > 0`.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// A finite directed graph on vertices `0..n`.
///
/// Edges keep their construction order, which is the order used for
/// serialization. Parallel edges are allowed; self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    out_adj: Vec<Vec<usize>>,
    in_degree: Vec<usize>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_degree = vec![0; n];
        for (idx, &(tail, head)) in edges.iter().enumerate() {
            if tail >= n || head >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} = ({tail}, {head}) has an endpoint outside 0..{n}"
                )));
            }
            if tail == head {
                return Err(Error::InvalidGraph(format!("edge {idx} is a self-loop at {tail}")));
            }
            out_adj[tail].push(head);
            in_degree[head] += 1;
        }
        Ok(Digraph {
            n,
            edges,
            labels: None,
            out_adj,
            in_degree,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a vertex: its label when present, otherwise the index.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_degree[v]
    }

    /// True when no ordered pair occurs twice.
    pub fn is_elementary(&self) -> bool {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Common in/out degree, or the first vertex that breaks regularity.
    pub fn check_regular(&self) -> Result<usize> {
        if self.n == 0 {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        let d = self.out_degree(0);
        for v in 0..self.n {
            let (i, o) = (self.in_degree(v), self.out_degree(v));
            if i != d || o != d {
                return Err(Error::NotRegular {
                    vertex: v,
                    in_degree: i,
                    out_degree: o,
                    expected: d,
                });
            }
        }
        Ok(d)
    }

    /// Breadth-first distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.out_adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Counts of ordered pairs at each distance, from one BFS per source.
    pub fn distance_profile(&self) -> Result<DistanceProfile> {
        let rows: Vec<Result<Vec<u64>>> = (0..self.n)
            .into_par_iter()
            .map(|s| {
                let dist = self.bfs_distances(s);
                let mut row = vec![0u64; 1];
                for (v, dv) in dist.iter().enumerate() {
                    match dv {
                        None => {
                            return Err(Error::Disconnected {
                                source_vertex: s,
                                unreachable: v,
                            })
                        }
                        Some(k) => {
                            if row.len() <= *k {
                                row.resize(k + 1, 0);
                            }
                            row[*k] += 1;
                        }
                    }
                }
                Ok(row)
            })
            .collect();
        let mut per_vertex = Vec::with_capacity(self.n);
        for r in rows {
            per_vertex.push(r?);
        }
        let diameter = per_vertex.iter().map(|r| r.len() - 1).max().unwrap_or(0);
        for r in per_vertex.iter_mut() {
            r.resize(diameter + 1, 0);
        }
        let counts = (1..=diameter)
            .map(|k| per_vertex.iter().map(|r| r[k]).sum())
            .collect();
        Ok(DistanceProfile {
            n: self.n,
            diameter,
            counts,
            per_vertex,
        })
    }

    /// Distance-based lower bound `⌈Σ k·N_k / (n·d)⌉` on per-factor usage.
    pub fn theta(&self) -> Result<u64> {
        let d = self.check_regular()?;
        let profile = self.distance_profile()?;
        Ok(profile.theta(d))
    }

    /// Graph with vertex `v` renamed to `perm[v]`; edge order is kept.
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph> {
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a], perm[b]))
            .collect();
        let g = Digraph::new(self.n, edges)?;
        match &self.labels {
            Some(labels) => {
                let mut relabeled = vec![String::new(); self.n];
                for (v, l) in labels.iter().enumerate() {
                    relabeled[perm[v]] = l.clone();
                }
                g.with_labels(relabeled)
            }
            None => Ok(g),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for &(a, b) in &self.edges {
            match &self.labels {
                Some(l) => {
                    let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(&l[a]), escape(&l[b]));
                }
                None => {
                    let _ = writeln!(out, "  {} -> {};", a, b);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Number of ordered vertex pairs at each distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub n: usize,
    pub diameter: usize,
    /// `counts[k - 1]` is `N_k`.
    pub counts: Vec<u64>,
    /// `per_vertex[v][k]` is the number of vertices at distance `k` from `v`.
    pub per_vertex: Vec<Vec<u64>>,
}

impl DistanceProfile {
    pub fn count(&self, k: usize) -> u64 {
        if k == 0 || k > self.diameter {
            0
        } else {
            self.counts[k - 1]
        }
    }

    /// `Σ k·N_k` over all ordered pairs.
    pub fn distance_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * c)
            .sum()
    }

    pub fn theta(&self, d: usize) -> u64 {
        ceil_div(self.distance_sum(), (self.n * d) as u64)
    }
}

/// Wire form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_labels: Option<Vec<String>>,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Digraph> for GraphFile {
    fn from(g: &Digraph) -> Self {
        GraphFile {
            n: g.n,
            vertex_labels: g.labels.clone(),
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphFile> for Digraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        let g = Digraph::new(f.n, f.edges.into_iter().map(|[a, b]| (a, b)).collect())?;
        match f.vertex_labels {
            Some(l) => g.with_labels(l),
            None => Ok(g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|v| (v, (v + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn three_cycle_is_one_regular() {
        assert_eq!(cycle(3).check_regular().unwrap(), 1);
    }

    #[test]
    fn extra_edge_breaks_regularity() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        assert!(matches!(
            g.check_regular(),
            Err(Error::NotRegular { vertex: 0, .. })
        ));
    }

    #[test]
    fn rejects_loops_and_bad_indices() {
        assert!(Digraph::new(2, vec![(0, 0)]).is_err());
        assert!(Digraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn three_cycle_profile() {
        let p = cycle(3).distance_profile().unwrap();
        assert_eq!(p.counts, vec![3, 3]);
        assert_eq!(p.diameter, 2);
    }

    #[test]
    fn disconnected_is_reported() {
        let g = Digraph::new(3, vec![(0, 1), (1, 0)]).unwrap();
        assert!(matches!(
            g.distance_profile(),
            Err(Error::Disconnected { source_vertex: 0, unreachable: 2 })
        ));
    }

    #[test]
    fn elementary_flag() {
        assert!(cycle(4).is_elementary());
        let g = Digraph::new(2, vec![(0, 1), (0, 1), (1, 0), (1, 0)]).unwrap();
        assert!(!g.is_elementary());
        assert_eq!(g.check_regular().unwrap(), 2);
    }

    #[test]
    fn ceilings_are_exact() {
        assert_eq!(ceil_div(8, 2), 4);
        assert_eq!(ceil_div(9, 2), 5);
        assert_eq!(ceil_div(0, 3), 0);
    }

    #[test]
    fn dot_uses_labels() {
        let g = cycle(2).with_labels(vec!["a".into(), "b\"".into()]).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("  \"a\" -> \"b\\\"\";"));
        assert_eq!(dot.lines().count(), 4);
        assert!(cycle(3).to_dot().contains("  2 -> 0;"));
    }
}
