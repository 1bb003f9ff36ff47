//! The diameter-two graphs `H_q` on `GF(q) × GF(q) × {0, 1}`.
//!
//! Vertex `(i, m, r)` has index `r q² + i q + m`. Its out-neighbours are
//! `(i, m + z^r x, r)` for each nonzero square `x` (the fix-r factors, in
//! canonical order of `x`) and `(j, m + (-1)^r i j, 1 - r)` for each `j`.
//! Cross-over factor `F_j` (in canonical order of `j`) sends `(i, m, r)` to
//! `(i + j, m + (-1)^r i (i + j), 1 - r)`.

mod field;
mod relations;

pub use field::{Elem, Field, MAX_FIELD_ORDER};
pub use relations::{
    verify_relations, GSign, RelationCheck, RelationReport, RelationStatus, VertexMap,
};

use serde::{Deserialize, Serialize};

use crate::digraph::{ceil_div, Digraph};
use crate::error::{Error, Result};
use crate::factorization::{Factorization, Word, WordList};
use crate::schedule::{diam2_schedule, verify_schedule, Schedule};

pub fn build_field(q: usize, modulus: Option<&[usize]>) -> Result<Field> {
    Field::new(q, modulus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// Adds `z^r x` to the second coordinate.
    FixR(Elem),
    /// Adds `j` to the first coordinate and switches sides.
    CrossOver(Elem),
}

#[derive(Debug, Clone)]
pub struct Mms {
    field: Field,
}

impl Mms {
    pub fn new(field: Field) -> Self {
        Mms { field }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    pub fn n(&self) -> usize {
        2 * self.q() * self.q()
    }

    pub fn degree(&self) -> usize {
        (3 * self.q() - 1) / 2
    }

    pub fn fix_r_count(&self) -> usize {
        (self.q() - 1) / 2
    }

    pub fn index(&self, i: Elem, m: Elem, r: usize) -> usize {
        let q = self.q();
        r * q * q + i * q + m
    }

    pub fn coords(&self, v: usize) -> (Elem, Elem, usize) {
        let q = self.q();
        (v / q % q, v % q, v / (q * q))
    }

    pub fn label(&self, v: usize) -> String {
        let (i, m, r) = self.coords(v);
        format!("({},{},{})", self.field.display(i), self.field.display(m), r)
    }

    /// Kind of the 0-based factor `f`.
    pub fn factor_kind(&self, f: usize) -> FactorKind {
        let half = self.fix_r_count();
        if f < half {
            FactorKind::FixR(self.field.squares()[f])
        } else {
            FactorKind::CrossOver(f - half)
        }
    }

    pub fn fix_r_factor(&self, x: Elem) -> Option<usize> {
        self.field.squares().iter().position(|&s| s == x)
    }

    pub fn cross_factor(&self, j: Elem) -> usize {
        self.fix_r_count() + j
    }

    pub fn step(&self, f: usize, v: usize) -> usize {
        let fld = &self.field;
        let (i, m, r) = self.coords(v);
        match self.factor_kind(f) {
            FactorKind::FixR(x) => {
                let shift = if r == 0 { x } else { fld.mul(fld.z(), x) };
                self.index(i, fld.add(m, shift), r)
            }
            FactorKind::CrossOver(j) => {
                let head = fld.add(i, j);
                let prod = fld.mul(i, head);
                let signed = if r == 0 { prod } else { fld.neg(prod) };
                self.index(head, fld.add(m, signed), 1 - r)
            }
        }
    }

    pub fn digraph(&self) -> Digraph {
        let d = self.degree();
        let mut edges = Vec::with_capacity(self.n() * d);
        for v in 0..self.n() {
            for f in 0..d {
                edges.push((v, self.step(f, v)));
            }
        }
        let labels = (0..self.n()).map(|v| self.label(v)).collect();
        Digraph::new(self.n(), edges)
            .and_then(|g| g.with_labels(labels))
            .expect("fix-r and cross-over edges are loop-free")
    }

    /// The factorization, checked to be permutations with `F_{-j}` undoing `F_j`.
    pub fn factorization(&self) -> Result<Factorization> {
        let succ: Vec<Vec<usize>> = (0..self.degree())
            .map(|f| (0..self.n()).map(|v| self.step(f, v)).collect())
            .collect();
        let fact = Factorization::new(self.n(), succ)?;
        for j in 0..self.q() {
            let (a, b) = (self.cross_factor(j), self.cross_factor(self.field.neg(j)));
            if let Some(v) = (0..self.n()).find(|&v| fact.step(b, fact.step(a, v)) != v) {
                return Err(Error::InternalInconsistency(format!(
                    "cross-over factor {} is not undone by its negation at {}",
                    a + 1,
                    self.label(v)
                )));
            }
        }
        Ok(fact)
    }

    /// `∅`, every single factor, `F_x F_{xw}`, every cross-over pair except
    /// `F_j F_{-j}`, then `F_j F_x` and `F_x F_j`.
    pub fn words(&self) -> WordList {
        let fld = &self.field;
        let d = self.degree();
        let q = self.q();
        let mut words = vec![Word::empty()];
        words.extend((0..d).map(|f| Word::new(vec![f])));
        for (a, &x) in fld.squares().iter().enumerate() {
            let b = self
                .fix_r_factor(fld.mul(x, fld.w()))
                .expect("squares are closed under multiplication");
            words.push(Word::new(vec![a, b]));
        }
        for j1 in 0..q {
            for j2 in 0..q {
                if j2 != fld.neg(j1) {
                    words.push(Word::new(vec![self.cross_factor(j1), self.cross_factor(j2)]));
                }
            }
        }
        let fixes = 0..self.fix_r_count();
        for j in 0..q {
            for x in fixes.clone() {
                words.push(Word::new(vec![self.cross_factor(j), x]));
            }
        }
        for x in fixes {
            for j in 0..q {
                words.push(Word::new(vec![x, self.cross_factor(j)]));
            }
        }
        WordList::new(d, words).expect("letters are below the degree")
    }

    /// Minimum schedule of makespan `3q - 2` for [`Mms::words`].
    pub fn schedule(&self) -> Result<Schedule> {
        let wl = self.words();
        let q = self.q() as u64;
        let counts = wl.factor_counts();
        for (f, &c) in counts.iter().enumerate() {
            let expected = match self.factor_kind(f) {
                FactorKind::FixR(_) => 2 * q + 3,
                FactorKind::CrossOver(_) => 3 * q - 2,
            };
            if c != expected {
                return Err(Error::InternalInconsistency(format!(
                    "factor F_{} used {c} times, expected {expected}",
                    f + 1
                )));
            }
        }
        let s = diam2_schedule(&wl)?;
        let check = verify_schedule(&wl, &s)
            .map_err(|v| Error::InternalInconsistency(format!("schedule rejected: {v}")))?;
        if u64::from(check.makespan) != 3 * q - 2 {
            return Err(Error::InternalInconsistency(format!(
                "makespan {} instead of {}",
                check.makespan,
                3 * q - 2
            )));
        }
        Ok(s)
    }
}

pub fn build_mms(field: &Field) -> Digraph {
    Mms::new(field.clone()).digraph()
}

pub fn mms_factorization(field: &Field) -> Result<Factorization> {
    Mms::new(field.clone()).factorization()
}

pub fn mms_words(field: &Field) -> WordList {
    Mms::new(field.clone()).words()
}

pub fn mms_schedule(field: &Field) -> Result<Schedule> {
    Mms::new(field.clone()).schedule()
}

/// Lower bounds on the makespan of any schedule for `H_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBounds {
    pub q: usize,
    /// `⌈Σ distances / (n d)⌉` from the measured distance profile.
    pub distance_sum: u64,
    /// `⌈2(n-1)/d⌉ - 1`, the same quantity for any diameter-two graph.
    pub exact: u64,
    /// `⌈8q/3⌉`.
    pub approximate: u64,
    pub achieved: u64,
}

pub fn lower_bounds(field: &Field) -> Result<LowerBounds> {
    let mms = Mms::new(field.clone());
    let g = mms.digraph();
    let (n, d, q) = (mms.n() as u64, mms.degree() as u64, mms.q() as u64);
    let distance_sum = g.distance_profile()?.theta(d as usize);
    let exact = ceil_div(2 * (n - 1), d) - 1;
    let approximate = ceil_div(8 * q, 3);
    if distance_sum != exact {
        log::warn!("H_{q}: distance-sum bound {distance_sum} differs from closed form {exact}");
    }
    if approximate != exact {
        log::warn!("H_{q}: ⌈8q/3⌉ = {approximate} differs from the exact bound {exact}");
    }
    Ok(LowerBounds {
        q: q as usize,
        distance_sum,
        exact,
        approximate,
        achieved: 3 * q - 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{is_hierarchical, verify_spanning};

    fn h5() -> Mms {
        Mms::new(Field::new(5, None).unwrap())
    }

    #[test]
    fn sizes() {
        let m = h5();
        let g = m.digraph();
        assert_eq!(g.n(), 50);
        assert_eq!(g.check_regular().unwrap(), 7);
        assert_eq!(g.distance_profile().unwrap().diameter, 2);
        let g13 = Mms::new(Field::new(13, None).unwrap()).digraph();
        assert_eq!((g13.n(), g13.check_regular().unwrap()), (338, 19));
    }

    #[test]
    fn origin_neighbors() {
        let m = h5();
        let g = m.digraph();
        let mut out: Vec<String> = g.out_neighbors(0).iter().map(|&v| m.label(v)).collect();
        out.sort();
        assert_eq!(
            out,
            ["(0,0,1)", "(0,1,0)", "(0,4,0)", "(1,0,1)", "(2,0,1)", "(3,0,1)", "(4,0,1)"]
        );
        assert_eq!(m.label(m.step(0, 0)), "(0,1,0)");
    }

    #[test]
    fn word_families() {
        let m = h5();
        let wl = m.words();
        assert_eq!(wl.len(), 50);
        let by_len = |k| wl.words().iter().filter(|w| w.len() == k).count();
        assert_eq!((by_len(0), by_len(1), by_len(2)), (1, 7, 42));
        assert!(is_hierarchical(&wl));
        verify_spanning(&m.factorization().unwrap(), &wl).unwrap();
    }

    #[test]
    fn fix_pair_never_hits_single_fix() {
        let m = h5();
        let f = m.factorization().unwrap();
        let fld = m.field();
        for v in 0..m.n() {
            for (a, &x) in fld.squares().iter().enumerate() {
                let b = m.fix_r_factor(fld.mul(x, fld.w())).unwrap();
                let end = f.step(b, f.step(a, v));
                for y in 0..m.fix_r_count() {
                    assert_ne!(end, f.step(y, v));
                }
            }
        }
    }

    #[test]
    fn cross_then_fix_avoids_single_cross() {
        let m = h5();
        let f = m.factorization().unwrap();
        for v in 0..m.n() {
            for j in 0..m.q() {
                for x in 0..m.fix_r_count() {
                    let end = f.step(x, f.step(m.cross_factor(j), v));
                    for k in 0..m.q() {
                        assert_ne!(end, f.step(m.cross_factor(k), v));
                    }
                }
            }
        }
    }

    #[test]
    fn schedule_q5() {
        let s = h5().schedule().unwrap();
        assert_eq!(s.makespan(), 13);
    }

    #[test]
    fn bounds_q5() {
        let b = lower_bounds(&Field::new(5, None).unwrap()).unwrap();
        assert_eq!((b.distance_sum, b.exact, b.approximate, b.achieved), (13, 13, 14, 13));
    }
}
