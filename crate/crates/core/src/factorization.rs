//! 1-factorizations, words over the factors, and spanning word lists.
//!
//! Factor indices are 0-based inside the library and 1-based everywhere they
//! leave it (display strings and the JSON wire formats), so `F_1` is factor 0.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::{ceil_div, Digraph, DistanceProfile};
use crate::error::{Error, Result};
use crate::matching::Bipartite;

/// `d` edge-disjoint 1-factors, each stored as a successor permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: usize,
    succ: Vec<Vec<usize>>,
}

impl Factorization {
    /// Checks that every row is a fixed-point-free permutation of `0..n`.
    pub fn new(n: usize, succ: Vec<Vec<usize>>) -> Result<Self> {
        for (i, row) in succ.iter().enumerate() {
            let factor = i + 1;
            if row.len() != n {
                return Err(Error::FactorNotPermutation {
                    factor,
                    detail: format!("length {} for {} vertices", row.len(), n),
                });
            }
            let mut seen = vec![false; n];
            for (v, &w) in row.iter().enumerate() {
                if w >= n {
                    return Err(Error::FactorNotPermutation {
                        factor,
                        detail: format!("image {w} of vertex {v} out of range"),
                    });
                }
                if w == v {
                    return Err(Error::FactorNotPermutation {
                        factor,
                        detail: format!("vertex {v} is fixed"),
                    });
                }
                if std::mem::replace(&mut seen[w], true) {
                    return Err(Error::FactorNotPermutation {
                        factor,
                        detail: format!("vertex {w} has in-degree 2"),
                    });
                }
            }
        }
        Ok(Factorization { n, succ })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, factor: usize) -> &[usize] {
        &self.succ[factor]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.succ
    }

    #[inline]
    pub fn step(&self, factor: usize, v: usize) -> usize {
        self.succ[factor][v]
    }

    /// The path `v·w`: `v` followed by each vertex reached along the word.
    pub fn apply_word(&self, v: usize, word: &Word) -> Result<Vec<usize>> {
        self.check_word(word)?;
        let mut path = Vec::with_capacity(word.len() + 1);
        path.push(v);
        let mut cur = v;
        for &f in word.letters() {
            cur = self.succ[f][cur];
            path.push(cur);
        }
        Ok(path)
    }

    pub fn endpoint(&self, v: usize, word: &Word) -> Result<usize> {
        self.check_word(word)?;
        Ok(self.endpoint_unchecked(v, word))
    }

    fn endpoint_unchecked(&self, v: usize, word: &Word) -> usize {
        word.letters().iter().fold(v, |cur, &f| self.succ[f][cur])
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|&&f| f >= self.d()) {
            Some(&f) => Err(Error::BadFactorIndex {
                index: f + 1,
                d: self.d(),
            }),
            None => Ok(()),
        }
    }

    /// Checks that the factor edges are exactly the edge multiset of `g`.
    pub fn check_covers(&self, g: &Digraph) -> Result<()> {
        if g.n() != self.n {
            return Err(Error::FactorizationMismatch(format!(
                "graph has {} vertices, factorization {}",
                g.n(),
                self.n
            )));
        }
        let mut graph_edges: Vec<(usize, usize)> = g.edges().to_vec();
        let mut factor_edges: Vec<(usize, usize)> = self
            .succ
            .iter()
            .flat_map(|row| row.iter().enumerate().map(|(v, &w)| (v, w)))
            .collect();
        graph_edges.sort_unstable();
        factor_edges.sort_unstable();
        if graph_edges != factor_edges {
            let missing = graph_edges
                .iter()
                .zip(factor_edges.iter())
                .find(|(a, b)| a != b)
                .map(|(a, _)| *a);
            return Err(Error::FactorizationMismatch(format!(
                "{} graph edges vs {} factor edges; first difference near {:?}",
                graph_edges.len(),
                factor_edges.len(),
                missing
            )));
        }
        Ok(())
    }

    /// The same factorization after renaming vertex `v` to `perm[v]`.
    pub fn conjugate(&self, perm: &[usize]) -> Factorization {
        let succ = self
            .succ
            .iter()
            .map(|row| {
                let mut out = vec![0; self.n];
                for (v, &w) in row.iter().enumerate() {
                    out[perm[v]] = perm[w];
                }
                out
            })
            .collect();
        Factorization { n: self.n, succ }
    }
}

/// Splits a `d`-regular digraph into `d` 1-factors.
///
/// Each vertex `u` is doubled into a left copy and a right copy, every edge
/// `(u, v)` becomes a left-`u`/right-`v` edge, and `d` perfect matchings are
/// peeled off one after another. The remaining bipartite graph stays regular
/// after each removal, so every round has a perfect matching.
pub fn decompose_into_factors(g: &Digraph) -> Result<Factorization> {
    let d = g.check_regular()?;
    let n = g.n();
    let mut bip = Bipartite::new(n, g.edges().to_vec());
    let mut succ = Vec::with_capacity(d);
    for round in 0..d {
        let matching = bip.maximum_matching();
        let mut row = vec![0; n];
        for (u, e) in matching.into_iter().enumerate() {
            let e = e.ok_or(Error::MatchingFailed { round })?;
            row[u] = g.edges()[e].1;
            bip.remove(e);
        }
        succ.push(row);
    }
    let f = Factorization::new(n, succ)?;
    f.check_covers(g)
        .map_err(|e| Error::InternalInconsistency(format!("decomposition lost edges: {e}")))?;
    Ok(f)
}

/// A sequence of factor indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based factor indices.
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or(Error::InvalidWordList("factor index 0 (indices are 1-based)".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&l| l + 1).collect()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        for l in &self.0 {
            write!(f, "F{}", l + 1)?;
        }
        Ok(())
    }
}

/// `n` words over `d` factors; the first word is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    d: usize,
    words: Vec<Word>,
}

impl WordList {
    pub fn new(d: usize, words: Vec<Word>) -> Result<Self> {
        match words.first() {
            None => return Err(Error::InvalidWordList("no words".into())),
            Some(w) if !w.is_empty() => {
                return Err(Error::InvalidWordList("first word must be empty".into()))
            }
            _ => {}
        }
        for (i, w) in words.iter().enumerate() {
            if let Some(&l) = w.letters().iter().find(|&&l| l >= d) {
                return Err(Error::InvalidWordList(format!(
                    "word {i} uses F{} but d = {d}",
                    l + 1
                )));
            }
        }
        Ok(WordList { d, words })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Total number of (word, position) occurrences.
    pub fn occurrences(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }

    /// Occurrence count of each factor over all words and positions.
    pub fn factor_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.d];
        for w in &self.words {
            for &l in w.letters() {
                counts[l] += 1;
            }
        }
        counts
    }
}

/// Why a word list fails to span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanningFailure {
    /// Word count or factor count disagree with the factorization.
    Mismatch(String),
    /// `vertex·ω_i = vertex·ω_j` with `i < j`.
    Collision {
        vertex: usize,
        i: usize,
        j: usize,
    },
}

impl fmt::Display for SpanningFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanningFailure::Mismatch(m) => write!(f, "{m}"),
            SpanningFailure::Collision { vertex, i, j } => {
                write!(f, "words {i} and {j} reach the same vertex from {vertex}")
            }
        }
    }
}

fn check_shapes(f: &Factorization, wl: &WordList) -> Result<(), SpanningFailure> {
    if wl.d() != f.d() {
        return Err(SpanningFailure::Mismatch(format!(
            "word list over {} factors, factorization has {}",
            wl.d(),
            f.d()
        )));
    }
    if wl.len() != f.n() {
        return Err(SpanningFailure::Mismatch(format!(
            "{} words for {} vertices",
            wl.len(),
            f.n()
        )));
    }
    Ok(())
}

fn collision_at(f: &Factorization, wl: &WordList, v: usize, seen: &mut [usize]) -> Option<(usize, usize)> {
    const NONE: usize = usize::MAX;
    seen.iter_mut().for_each(|s| *s = NONE);
    for (i, w) in wl.words().iter().enumerate() {
        let end = f.endpoint_unchecked(v, w);
        if seen[end] != NONE {
            return Some((seen[end], i));
        }
        seen[end] = i;
    }
    None
}

/// Checks that from every vertex the word endpoints are pairwise distinct.
pub fn verify_spanning(f: &Factorization, wl: &WordList) -> Result<(), SpanningFailure> {
    check_shapes(f, wl)?;
    let n = f.n();
    let hit = (0..n).into_par_iter().find_map_first(|v| {
        let mut seen = vec![0; n];
        collision_at(f, wl, v, &mut seen).map(|(i, j)| SpanningFailure::Collision { vertex: v, i, j })
    });
    match hit {
        Some(w) => Err(w),
        None => Ok(()),
    }
}

/// Number of source vertices with a collision, and the first such collision.
pub fn spanning_defects(f: &Factorization, wl: &WordList) -> Result<(usize, Option<SpanningFailure>), SpanningFailure> {
    check_shapes(f, wl)?;
    let n = f.n();
    let hits: Vec<Option<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut seen = vec![0; n];
            collision_at(f, wl, v, &mut seen)
        })
        .collect();
    let count = hits.iter().filter(|h| h.is_some()).count();
    let first = hits
        .iter()
        .enumerate()
        .find_map(|(v, h)| h.map(|(i, j)| SpanningFailure::Collision { vertex: v, i, j }));
    Ok((count, first))
}

/// True when every prefix of every word is itself a word.
pub fn is_hierarchical(wl: &WordList) -> bool {
    let set: HashSet<&[usize]> = wl.words().iter().map(|w| w.letters()).collect();
    wl.words()
        .iter()
        .all(|w| (0..w.len()).all(|p| set.contains(&w.letters()[..p])))
}

/// Factor usage statistics and the balanced/short/optimal predicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageMetrics {
    pub counts: Vec<u64>,
    pub total: u64,
    pub max: u64,
    /// `⌈total / d⌉`.
    pub avg_ceiling: u64,
    pub theta: u64,
    pub balanced: bool,
    pub short: bool,
    pub optimal: bool,
    /// `theta ≤ avg_ceiling ≤ max`.
    pub ordered: bool,
}

pub fn usage_metrics(wl: &WordList, profile: &DistanceProfile, d: usize) -> UsageMetrics {
    let counts = wl.factor_counts();
    let total: u64 = counts.iter().sum();
    let max = counts.iter().copied().max().unwrap_or(0);
    let avg_ceiling = ceil_div(total, d as u64);
    let theta = profile.theta(d);
    let ordered = theta <= avg_ceiling && avg_ceiling <= max;
    if !ordered {
        log::warn!("usage ordering violated: theta {theta}, avg {avg_ceiling}, max {max}");
    }
    UsageMetrics {
        balanced: max == avg_ceiling,
        short: avg_ceiling == theta,
        optimal: max == theta,
        counts,
        total,
        max,
        avg_ceiling,
        theta,
        ordered,
    }
}

/// Word list from a breadth-first tree rooted at vertex 0, exploring factors
/// in `priority` order at each vertex.
pub fn bfs_tree_words(f: &Factorization, priority: &[usize]) -> Option<WordList> {
    let n = f.n();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &fac in priority {
            let v = f.step(fac, u);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, fac));
                queue.push_back(v);
            }
        }
    }
    if order.len() != n {
        return None;
    }
    let mut words: Vec<Option<Word>> = vec![None; n];
    words[0] = Some(Word::empty());
    for &v in &order[1..] {
        let (p, fac) = parent[v]?;
        let mut letters = words[p].as_ref()?.letters().to_vec();
        letters.push(fac);
        words[v] = Some(Word::new(letters));
    }
    let words = order.iter().map(|&v| words[v].clone()).collect::<Option<Vec<_>>>()?;
    WordList::new(f.d(), words).ok()
}

#[derive(Debug, Clone)]
pub struct SearchSuccess {
    pub words: WordList,
    /// 1-based number of the attempt that succeeded.
    pub attempt: usize,
    pub priority: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchFailure {
    pub attempts: usize,
    /// Fewest failing source vertices seen in any attempt.
    pub best_defects: usize,
    pub witness: Option<SpanningFailure>,
}

/// Looks for a spanning word list among breadth-first shortest-path trees.
///
/// Attempt `a < d` explores factors in the rotated order `a, a+1, …, d-1, 0,
/// …`; later attempts use orders shuffled by a ChaCha8 generator seeded with
/// `seed`. Each candidate is checked with [`verify_spanning`].
pub fn search_spanning(
    g: &Digraph,
    f: &Factorization,
    budget: usize,
    seed: u64,
) -> Result<Result<SearchSuccess, SearchFailure>> {
    let d = g.check_regular()?;
    if d != f.d() || g.n() != f.n() {
        return Err(Error::FactorizationMismatch("graph and factorization disagree".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Option<SpanningFailure>)> = None;
    for attempt in 0..budget {
        let priority: Vec<usize> = if attempt < d {
            (0..d).map(|i| (i + attempt) % d).collect()
        } else {
            let mut p: Vec<usize> = (0..d).collect();
            p.shuffle(&mut rng);
            p
        };
        let Some(wl) = bfs_tree_words(f, &priority) else {
            let dist = g.bfs_distances(0);
            let unreachable = dist.iter().position(Option::is_none).unwrap_or(0);
            return Err(Error::Disconnected {
                source_vertex: 0,
                unreachable,
            });
        };
        match spanning_defects(f, &wl) {
            Ok((0, _)) => {
                return Ok(Ok(SearchSuccess {
                    words: wl,
                    attempt: attempt + 1,
                    priority,
                }))
            }
            Ok((count, witness)) => {
                if best.as_ref().is_none_or(|(c, _)| count < *c) {
                    best = Some((count, witness));
                }
            }
            Err(m) => return Err(Error::InternalInconsistency(m.to_string())),
        }
    }
    let (best_defects, witness) = best.unwrap_or((0, None));
    Ok(Err(SearchFailure {
        attempts: budget,
        best_defects,
        witness,
    }))
}

/// Wire form of a factorization; `succ[i]` is factor `F_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationFile {
    pub d: usize,
    pub succ: Vec<Vec<usize>>,
}

impl From<&Factorization> for FactorizationFile {
    fn from(f: &Factorization) -> Self {
        FactorizationFile {
            d: f.d(),
            succ: f.succ.clone(),
        }
    }
}

impl TryFrom<FactorizationFile> for Factorization {
    type Error = Error;

    fn try_from(file: FactorizationFile) -> Result<Self> {
        if file.succ.len() != file.d {
            return Err(Error::FactorizationMismatch(format!(
                "d = {} but {} rows",
                file.d,
                file.succ.len()
            )));
        }
        let n = file.succ.first().map_or(0, Vec::len);
        Factorization::new(n, file.succ)
    }
}

/// Wire form of a word list with 1-based factor indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordsFile {
    pub d: usize,
    pub words: Vec<Vec<usize>>,
}

impl From<&WordList> for WordsFile {
    fn from(wl: &WordList) -> Self {
        WordsFile {
            d: wl.d,
            words: wl.words.iter().map(Word::one_based).collect(),
        }
    }
}

impl TryFrom<WordsFile> for WordList {
    type Error = Error;

    fn try_from(file: WordsFile) -> Result<Self> {
        let words = file
            .words
            .iter()
            .map(|w| Word::from_one_based(w))
            .collect::<Result<Vec<_>>>()?;
        WordList::new(file.d, words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|v| (v, (v + 1) % n)).collect()).unwrap()
    }

    fn complete3() -> Digraph {
        let edges = (0..3)
            .flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        Digraph::new(3, edges).unwrap()
    }

    #[test]
    fn cycle_has_single_factor() {
        let f = decompose_into_factors(&cycle(3)).unwrap();
        assert_eq!(f.rows(), &[vec![1, 2, 0]]);
    }

    #[test]
    fn complete_digraph_on_three_splits_in_two() {
        let g = complete3();
        let f = decompose_into_factors(&g).unwrap();
        assert_eq!(f.d(), 2);
        f.check_covers(&g).unwrap();
    }

    #[test]
    fn decomposition_rejects_irregular() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        assert!(matches!(decompose_into_factors(&g), Err(Error::NotRegular { .. })));
    }

    #[test]
    fn factorization_rejects_fixed_points_and_collisions() {
        assert!(Factorization::new(2, vec![vec![0, 1]]).is_err());
        assert!(Factorization::new(3, vec![vec![1, 1, 0]]).is_err());
        assert!(Factorization::new(3, vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn empty_word_stays_put() {
        let f = decompose_into_factors(&cycle(4)).unwrap();
        assert_eq!(f.apply_word(2, &Word::empty()).unwrap(), vec![2]);
    }

    #[test]
    fn bad_factor_index() {
        let f = decompose_into_factors(&cycle(4)).unwrap();
        assert!(matches!(
            f.apply_word(0, &Word::new(vec![1])),
            Err(Error::BadFactorIndex { index: 2, d: 1 })
        ));
    }

    #[test]
    fn repeated_word_collides() {
        let f = decompose_into_factors(&complete3()).unwrap();
        let wl = WordList::new(2, vec![Word::empty(), Word::new(vec![0]), Word::new(vec![0])]).unwrap();
        assert_eq!(
            verify_spanning(&f, &wl),
            Err(SpanningFailure::Collision { vertex: 0, i: 1, j: 2 })
        );
    }

    #[test]
    fn hierarchical_examples() {
        let ok = WordList::new(2, vec![Word::empty(), Word::new(vec![0]), Word::new(vec![0, 1])]).unwrap();
        assert!(is_hierarchical(&ok));
        let gap = WordList::new(2, vec![Word::empty(), Word::new(vec![0, 1])]).unwrap();
        assert!(!is_hierarchical(&gap));
    }

    #[test]
    fn word_list_shape_errors() {
        assert!(WordList::new(1, vec![]).is_err());
        assert!(WordList::new(1, vec![Word::new(vec![0])]).is_err());
        assert!(WordList::new(1, vec![Word::empty(), Word::new(vec![1])]).is_err());
        assert!(Word::from_one_based(&[0]).is_err());
    }

    #[test]
    fn search_on_cycle() {
        let g = cycle(5);
        let f = decompose_into_factors(&g).unwrap();
        let found = search_spanning(&g, &f, 3, 0).unwrap().unwrap();
        assert_eq!(found.attempt, 1);
        let lens: Vec<usize> = found.words.words().iter().map(Word::len).collect();
        assert_eq!(lens, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn word_display() {
        assert_eq!(Word::new(vec![0, 1]).to_string(), "F1F2");
        assert_eq!(Word::empty().to_string(), "∅");
    }

    #[test]
    fn wire_formats_are_one_based() {
        let wl = WordList::new(2, vec![Word::empty(), Word::new(vec![1, 0])]).unwrap();
        let file = WordsFile::from(&wl);
        assert_eq!(file.words, vec![vec![], vec![2, 1]]);
        assert_eq!(WordList::try_from(file).unwrap(), wl);
    }
}
