//! Cayley graphs and Cayley coset graphs of permutation groups.
//!
//! Products compose right to left: `(a * b)(x) = a(b(x))`. The generator
//! `δ` contributes the edges `g → g δ`, and in a coset graph `gH → g δ H`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::factorization::{Factorization, Word, WordList};

pub const DEFAULT_CAP: usize = 100_000;

/// A permutation of `0..k`, stored as its images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Perm> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k {
                return Err(Error::InvalidPerm(format!("image {x} out of range 0..{k}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPerm(format!("image {x} repeated")));
            }
        }
        Ok(Perm(images.into_iter().map(|x| x as u32).collect()))
    }

    pub fn identity(k: usize) -> Perm {
        Perm((0..k as u32).collect())
    }

    /// Product of disjoint cycles on `0..k`.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..k).collect();
        for cycle in cycles {
            for (idx, &x) in cycle.iter().enumerate() {
                let y = cycle[(idx + 1) % cycle.len()];
                if x >= k || y >= k {
                    return Err(Error::InvalidPerm(format!("cycle entry out of range 0..{k}")));
                }
                images[x] = y;
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`, i.e. `other` applied first.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    /// One-line notation on `1..=k`.
    pub fn one_line(&self) -> String {
        join_symbols(self.0.iter().map(|&x| x as usize + 1), self.degree())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]", self.one_line())
    }
}

fn join_symbols(symbols: impl Iterator<Item = usize>, max: usize) -> String {
    let parts: Vec<String> = symbols.map(|s| s.to_string()).collect();
    if max < 10 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<(String, Perm)>,
    pub cap: usize,
}

impl GroupSpec {
    pub fn new(degree: usize, generators: Vec<(String, Perm)>) -> Result<GroupSpec> {
        for (name, p) in &generators {
            if p.degree() != degree {
                return Err(Error::InvalidPerm(format!(
                    "generator {name} acts on {} points, expected {degree}",
                    p.degree()
                )));
            }
        }
        Ok(GroupSpec {
            degree,
            generators,
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// Elements of a generated group in breadth-first discovery order from the
/// identity (element 0).
#[derive(Debug, Clone)]
pub struct Group {
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl Group {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }
}

fn close(degree: usize, gens: &[&Perm], cap: usize) -> Result<Group> {
    let id = Perm::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for g in gens {
            let next = elements[u].mul(g);
            if !index.contains_key(&next) {
                if elements.len() == cap {
                    return Err(Error::CapExceeded { cap });
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    Ok(Group {
        degree,
        elements,
        index,
    })
}

pub fn close_group(gs: &GroupSpec) -> Result<Group> {
    let gens: Vec<&Perm> = gs.generators.iter().map(|(_, p)| p).collect();
    close(gs.degree, &gens, gs.cap)
}

/// A Cayley graph with its group and one factor per generator.
#[derive(Debug, Clone)]
pub struct Cayley {
    pub group: Group,
    pub graph: Digraph,
    pub factorization: Factorization,
}

pub fn build_cayley(gs: &GroupSpec) -> Result<Cayley> {
    if let Some((name, _)) = gs.generators.iter().find(|(_, p)| p.is_identity()) {
        return Err(Error::IdentityGenerator(name.clone()));
    }
    let group = close_group(gs)?;
    let n = group.order();
    let succ: Vec<Vec<usize>> = gs
        .generators
        .iter()
        .map(|(_, delta)| {
            group
                .elements
                .iter()
                .map(|g| group.index[&g.mul(delta)])
                .collect()
        })
        .collect();
    let factorization = Factorization::new(n, succ)?;
    let mut edges = Vec::with_capacity(n * gs.generators.len());
    for v in 0..n {
        for f in 0..gs.generators.len() {
            edges.push((v, factorization.step(f, v)));
        }
    }
    let labels = group.elements.iter().map(Perm::one_line).collect();
    let graph = Digraph::new(n, edges)?.with_labels(labels)?;
    Ok(Cayley {
        group,
        graph,
        factorization,
    })
}

/// Words along a breadth-first tree from the identity, smallest generator
/// first, one word per element in discovery order.
pub fn cayley_words(gs: &GroupSpec) -> Result<WordList> {
    let cay = build_cayley(gs)?;
    Ok(cayley_words_for(&cay))
}

pub fn cayley_words_for(cay: &Cayley) -> WordList {
    let f = &cay.factorization;
    let n = f.n();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for fac in 0..f.d() {
            let v = f.step(fac, u);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, fac));
                queue.push_back(v);
            }
        }
    }
    let words = order
        .iter()
        .map(|&v| {
            let mut letters = Vec::new();
            let mut cur = v;
            while let Some((p, fac)) = parent[cur] {
                letters.push(fac);
                cur = p;
            }
            letters.reverse();
            Word::new(letters)
        })
        .collect();
    WordList::new(f.d(), words).expect("tree letters are factor indices")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSpec {
    pub group: GroupSpec,
    pub subgroup: Vec<(String, Perm)>,
    pub delta: Vec<(String, Perm)>,
}

/// The closed group and subgroup with every element's left coset.
#[derive(Debug, Clone)]
pub struct CosetData {
    pub group: Group,
    pub subgroup: Group,
    /// `coset_of[g]` for each element index of `group`.
    pub coset_of: Vec<usize>,
    /// Element index of each coset's first-discovered member.
    pub representatives: Vec<usize>,
}

fn violated(which: &'static str, witness: String) -> Error {
    Error::ConditionViolated { which, witness }
}

/// Checks `Δ ∩ H = ∅`, `⟨Δ ∪ H⟩ = Γ`, `HΔH ⊆ ΔH` and that the cosets `δH`
/// are pairwise distinct.
pub fn check_coset_conditions(cs: &CosetSpec) -> Result<CosetData> {
    let degree = cs.group.degree;
    for (name, p) in cs.subgroup.iter().chain(&cs.delta) {
        if p.degree() != degree {
            return Err(Error::InvalidPerm(format!("{name} acts on {} points, expected {degree}", p.degree())));
        }
    }
    let group = close_group(&cs.group)?;
    let sub_gens: Vec<&Perm> = cs.subgroup.iter().map(|(_, p)| p).collect();
    let subgroup = close(degree, &sub_gens, cs.group.cap)?;
    for (name, p) in cs.subgroup.iter().chain(&cs.delta) {
        if !group.contains(p) {
            return Err(violated("i", format!("{name} is not in the group")));
        }
    }
    if let Some((name, _)) = cs.delta.iter().find(|(_, p)| subgroup.contains(p)) {
        return Err(violated("i", format!("{name} lies in the subgroup")));
    }
    let both: Vec<&Perm> = cs.delta.iter().chain(&cs.subgroup).map(|(_, p)| p).collect();
    let generated = close(degree, &both, cs.group.cap)?;
    if generated.order() != group.order() {
        return Err(violated(
            "i",
            format!(
                "generators and subgroup generate {} of {} elements",
                generated.order(),
                group.order()
            ),
        ));
    }

    let mut coset_of = vec![usize::MAX; group.order()];
    let mut representatives = Vec::new();
    for g in 0..group.order() {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(g);
        for h in subgroup.elements() {
            coset_of[group.index[&group.elements[g].mul(h)]] = c;
        }
    }
    let coset = |p: &Perm| coset_of[group.index[p]];

    let delta_cosets: Vec<usize> = cs.delta.iter().map(|(_, p)| coset(p)).collect();
    for (a, ca) in delta_cosets.iter().enumerate() {
        if let Some(b) = delta_cosets[..a].iter().position(|cb| cb == ca) {
            return Err(violated(
                "iii",
                format!("{} and {} lie in the same coset", cs.delta[b].0, cs.delta[a].0),
            ));
        }
    }
    let allowed: HashSet<usize> = delta_cosets.iter().copied().collect();
    for h in subgroup.elements() {
        for (name, p) in &cs.delta {
            let prod = h.mul(p);
            if !allowed.contains(&coset(&prod)) {
                return Err(violated(
                    "ii",
                    format!("{} * {name} H is not of the form δH", h.one_line()),
                ));
            }
        }
    }
    Ok(CosetData {
        group,
        subgroup,
        coset_of,
        representatives,
    })
}

/// Coset graph with vertices numbered in order of their representatives.
#[derive(Debug, Clone)]
pub struct CosetGraph {
    pub data: CosetData,
    pub graph: Digraph,
}

pub fn build_coset_graph(cs: &CosetSpec) -> Result<CosetGraph> {
    let data = check_coset_conditions(cs)?;
    let n = data.representatives.len();
    let mut edges = Vec::with_capacity(n * cs.delta.len());
    for (c, &rep) in data.representatives.iter().enumerate() {
        let g = data.group.element(rep);
        let mut seen = HashSet::new();
        for (_, delta) in &cs.delta {
            let head = data.coset_of[data.group.index[&g.mul(delta)]];
            if seen.insert(head) {
                edges.push((c, head));
            }
        }
    }
    let labels = data
        .representatives
        .iter()
        .map(|&r| data.group.element(r).one_line())
        .collect();
    let graph = Digraph::new(n, edges)?.with_labels(labels)?;
    Ok(CosetGraph { data, graph })
}

impl CosetGraph {
    /// Labels each coset by the images of `points` under its representative
    /// (1-based), e.g. `(g(1), …, g(D))` for a pointwise stabilizer.
    pub fn labels_by_images(&self, points: &[usize]) -> Vec<String> {
        self.data
            .representatives
            .iter()
            .map(|&r| {
                let g = self.data.group.element(r);
                join_symbols(points.iter().map(|&x| g.apply(x) + 1), g.degree())
            })
            .collect()
    }
}

/// The symmetric group on `d + 1` points with generators `(k … 2 1)` for
/// `2 ≤ k ≤ d + 1` and the pointwise stabilizer of `1..D` as subgroup.
pub fn cp_coset_spec(d: usize, diameter: usize) -> Result<CosetSpec> {
    if diameter < 1 || diameter > d {
        return Err(Error::BadParams(format!("need 1 ≤ D ≤ d, got d = {d}, D = {diameter}")));
    }
    let k = d + 1;
    let delta: Vec<(String, Perm)> = (2..=k)
        .map(|top| {
            let cycle: Vec<usize> = (0..top).rev().collect();
            let p = Perm::from_cycles(k, &[&cycle]).expect("cycle within range");
            (format!("d{top}"), p)
        })
        .collect();
    let subgroup = (diameter..k - 1)
        .map(|i| {
            let p = Perm::from_cycles(k, &[&[i, i + 1]]).expect("transposition within range");
            (format!("s{}", i + 1), p)
        })
        .collect();
    Ok(CosetSpec {
        group: GroupSpec::new(k, delta.clone())?,
        subgroup,
        delta,
    })
}

/// Wire form of a group with optional subgroup and generator selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupFile {
    pub generators: BTreeMap<String, Vec<usize>>,
}

fn named(map: &BTreeMap<String, Vec<usize>>) -> Result<Vec<(String, Perm)>> {
    map.iter()
        .map(|(name, images)| Ok((name.clone(), Perm::new(images.clone())?)))
        .collect()
}

impl GroupFile {
    fn all_generators(&self) -> Result<Vec<(String, Perm)>> {
        named(&self.generators)
    }

    fn delta(&self) -> Result<Vec<(String, Perm)>> {
        let all = self.all_generators()?;
        match &self.delta {
            None => Ok(all),
            Some(names) => names
                .iter()
                .map(|n| {
                    all.iter()
                        .find(|(name, _)| name == n)
                        .cloned()
                        .ok_or_else(|| Error::InvalidPerm(format!("unknown generator {n}")))
                })
                .collect(),
        }
    }

    /// Cayley generators: `delta` if given, otherwise every generator.
    pub fn cayley_spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.degree, self.delta()?)
    }

    pub fn coset_spec(&self) -> Result<CosetSpec> {
        let subgroup = match &self.subgroup {
            Some(s) => named(&s.generators)?,
            None => Vec::new(),
        };
        Ok(CosetSpec {
            group: GroupSpec::new(self.degree, self.all_generators()?)?,
            subgroup,
            delta: self.delta()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpgraph::CpGraph;
    use crate::factorization::{is_hierarchical, usage_metrics, verify_spanning};

    fn spec(degree: usize, gens: Vec<Perm>) -> GroupSpec {
        let named = gens.into_iter().enumerate().map(|(i, p)| (format!("g{i}"), p)).collect();
        GroupSpec::new(degree, named).unwrap()
    }

    #[test]
    fn product_is_composition() {
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // (a * b)(1) = a(b(1)) = a(2) = 2
        assert_eq!(a.mul(&b).apply(1), 2);
        assert!(a.mul(&a.inverse()).is_identity());
        assert!(Perm::new(vec![0, 0]).is_err());
    }

    #[test]
    fn closures() {
        let c3 = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let t = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        assert_eq!(close_group(&spec(3, vec![c3.clone()])).unwrap().order(), 3);
        assert_eq!(close_group(&spec(3, vec![t, c3])).unwrap().order(), 6);
        let t4 = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let c4 = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let gs = spec(4, vec![t4, c4]);
        assert_eq!(close_group(&gs).unwrap().order(), 24);
        assert!(matches!(close_group(&gs.with_cap(10)), Err(Error::CapExceeded { cap: 10 })));
    }

    #[test]
    fn cyclic_six() {
        let gs = spec(6, vec![Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap()]);
        let cay = build_cayley(&gs).unwrap();
        assert_eq!(cay.graph.check_regular().unwrap(), 1);
        let wl = cayley_words_for(&cay);
        let lens: Vec<usize> = wl.words().iter().map(Word::len).collect();
        assert_eq!(lens, vec![0, 1, 2, 3, 4, 5]);
        verify_spanning(&cay.factorization, &wl).unwrap();
    }

    #[test]
    fn s3_words_are_short() {
        let t = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let c = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let cay = build_cayley(&spec(3, vec![t, c])).unwrap();
        assert_eq!(cay.graph.check_regular().unwrap(), 2);
        let wl = cayley_words_for(&cay);
        assert_eq!(wl.len(), 6);
        verify_spanning(&cay.factorization, &wl).unwrap();
        assert!(is_hierarchical(&wl));
        let m = usage_metrics(&wl, &cay.graph.distance_profile().unwrap(), 2);
        assert!(m.short);
    }

    #[test]
    fn identity_generator_rejected() {
        let gs = spec(3, vec![Perm::identity(3)]);
        assert!(matches!(build_cayley(&gs), Err(Error::IdentityGenerator(_))));
    }

    #[test]
    fn trivial_subgroup_matches_cayley() {
        let cs = cp_coset_spec(3, 3).unwrap();
        assert!(cs.subgroup.is_empty());
        let coset = build_coset_graph(&cs).unwrap();
        let cay = build_cayley(&cs.group).unwrap();
        assert_eq!(coset.graph.edges(), cay.graph.edges());
    }

    #[test]
    fn delta_inside_subgroup_violates_first_condition() {
        let mut cs = cp_coset_spec(3, 2).unwrap();
        let h = cs.subgroup[0].clone();
        cs.delta.push(h);
        assert!(matches!(
            check_coset_conditions(&cs),
            Err(Error::ConditionViolated { which: "i", .. })
        ));
    }

    #[test]
    fn cp_coset_graph_is_the_cp_graph() {
        for (d, diameter) in [(3, 2), (4, 2), (4, 3)] {
            let coset = build_coset_graph(&cp_coset_spec(d, diameter).unwrap()).unwrap();
            let points: Vec<usize> = (0..diameter).collect();
            let labels = coset.labels_by_images(&points);
            let cp = CpGraph::new(d, diameter).unwrap();
            let cpg = cp.digraph();
            let mut a: Vec<(String, String)> = coset
                .graph
                .edges()
                .iter()
                .map(|&(x, y)| (labels[x].clone(), labels[y].clone()))
                .collect();
            let mut b: Vec<(String, String)> = cpg
                .edges()
                .iter()
                .map(|&(x, y)| (cp.label(x), cp.label(y)))
                .collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "G({d}, {diameter})");
        }
    }

    #[test]
    fn group_file_selects_delta() {
        let json = r#"{"degree": 3, "generators": {"a": [1, 0, 2], "b": [1, 2, 0]}, "delta": ["b"]}"#;
        let gf: GroupFile = serde_json::from_str(json).unwrap();
        let gs = gf.cayley_spec().unwrap();
        assert_eq!(gs.generators.len(), 1);
        assert_eq!(build_cayley(&gs).unwrap().group.order(), 3);
    }
}
