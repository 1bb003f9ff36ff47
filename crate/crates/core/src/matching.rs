//! Hopcroft–Karp maximum matching on a bipartite multigraph whose edges can
//! be switched off between runs.

use std::collections::VecDeque;

const UNMATCHED: usize = usize::MAX;
const INF: usize = usize::MAX;

/// Bipartite multigraph with `n` left and `n` right vertices. Edge `e` joins
/// left `ends[e].0` to right `ends[e].1`.
pub(crate) struct Bipartite {
    n: usize,
    ends: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Bipartite {
    pub(crate) fn new(n: usize, ends: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (e, &(l, _)) in ends.iter().enumerate() {
            adj[l].push(e);
        }
        let alive = vec![true; ends.len()];
        Bipartite {
            n,
            ends,
            adj,
            alive,
        }
    }

    pub(crate) fn remove(&mut self, edge: usize) {
        self.alive[edge] = false;
    }

    /// Maximum matching over live edges, as the matched edge id per left
    /// vertex (`None` when unmatched).
    pub(crate) fn maximum_matching(&self) -> Vec<Option<usize>> {
        let n = self.n;
        let mut left_edge = vec![UNMATCHED; n];
        let mut right_match = vec![UNMATCHED; n];
        let mut dist = vec![INF; n];

        loop {
            // Layer the left side from the free left vertices.
            let mut queue = VecDeque::new();
            for u in 0..n {
                if left_edge[u] == UNMATCHED {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = INF;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    if !self.alive[e] {
                        continue;
                    }
                    let v = self.ends[e].1;
                    let w = right_match[v];
                    if w == UNMATCHED {
                        found = true;
                    } else if dist[w] == INF {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                break;
            }
            let mut cursor = vec![0usize; n];
            for u in 0..n {
                if left_edge[u] == UNMATCHED {
                    self.augment(u, &mut dist, &mut cursor, &mut left_edge, &mut right_match);
                }
            }
        }
        left_edge
            .into_iter()
            .map(|e| (e != UNMATCHED).then_some(e))
            .collect()
    }

    fn augment(
        &self,
        u: usize,
        dist: &mut [usize],
        cursor: &mut [usize],
        left_edge: &mut [usize],
        right_match: &mut [usize],
    ) -> bool {
        while cursor[u] < self.adj[u].len() {
            let e = self.adj[u][cursor[u]];
            cursor[u] += 1;
            if !self.alive[e] {
                continue;
            }
            let v = self.ends[e].1;
            let w = right_match[v];
            let ok = w == UNMATCHED
                || (dist[w] == dist[u] + 1 && self.augment(w, dist, cursor, left_edge, right_match));
            if ok {
                left_edge[u] = e;
                right_match[v] = u;
                return true;
            }
        }
        dist[u] = INF;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_perfect_matching_needing_augmentation() {
        // Greedy first-edge choice would match 0-0 and leave 1 stuck.
        let b = Bipartite::new(2, vec![(0, 0), (0, 1), (1, 0)]);
        let m = b.maximum_matching();
        assert_eq!(m, vec![Some(1), Some(2)]);
    }

    #[test]
    fn respects_removed_edges() {
        let mut b = Bipartite::new(2, vec![(0, 0), (1, 1), (0, 1), (1, 0)]);
        b.remove(0);
        b.remove(1);
        assert_eq!(b.maximum_matching(), vec![Some(2), Some(3)]);
    }

    #[test]
    fn reports_deficient_side() {
        let b = Bipartite::new(2, vec![(0, 0), (1, 0)]);
        let m = b.maximum_matching();
        assert_eq!(m.iter().filter(|x| x.is_some()).count(), 1);
    }
}
