//! Pointwise checks of the automorphisms `f_s`, `g_t`, `h` of `H_q` and the
//! relations among them.
//!
//! Maps compose right to left: `(a ∘ b)(v) = a(b(v))`, and a product written
//! `a b` means `a ∘ b`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::field::Elem;
use super::Mms;
use crate::digraph::Digraph;

/// A permutation of the vertices, stored as the image of each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap(Vec<u32>);

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        VertexMap((0..n as u32).collect())
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Self {
        VertexMap((0..n).map(|v| f(v) as u32).collect())
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &VertexMap) -> VertexMap {
        VertexMap(other.0.iter().map(|&v| self.0[v as usize]).collect())
    }

    pub fn inverse(&self) -> VertexMap {
        let mut inv = vec![0u32; self.0.len()];
        for (v, &w) in self.0.iter().enumerate() {
            inv[w as usize] = v as u32;
        }
        VertexMap(inv)
    }

    pub fn pow(&self, k: u64) -> VertexMap {
        let mut acc = VertexMap::identity(self.len());
        for _ in 0..k {
            acc = self.after(&acc);
        }
        acc
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.len()];
        self.0.iter().all(|&w| !std::mem::replace(&mut seen[w as usize], true))
    }

    /// First vertex whose out-neighbourhood is not carried onto the
    /// out-neighbourhood of its image.
    pub fn automorphism_defect(&self, g: &Digraph) -> Option<usize> {
        if !self.is_bijection() {
            return Some(0);
        }
        (0..g.n()).find(|&v| {
            let mut mapped: Vec<usize> = g.out_neighbors(v).iter().map(|&u| self.apply(u)).collect();
            let mut target = g.out_neighbors(self.apply(v)).to_vec();
            mapped.sort_unstable();
            target.sort_unstable();
            mapped != target
        })
    }

    /// First vertex where the two maps differ.
    pub fn first_difference(&self, other: &VertexMap) -> Option<usize> {
        self.0.iter().zip(&other.0).position(|(a, b)| a != b)
    }
}

/// Sign convention for the middle term of `g_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GSign {
    /// `(-1)^r`, from the side of the vertex.
    Side,
    /// `(-1)^t`, from the parity of the canonical index of `t`.
    Parity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RelationStatus {
    Pass,
    Fail { counterexample: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    #[serde(flatten)]
    pub status: RelationStatus,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.status == RelationStatus::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, RelationStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub q: usize,
    pub composition: String,
    pub g_sign_side_is_automorphism: bool,
    pub g_sign_parity_is_automorphism: bool,
    pub g_sign: GSign,
    /// Word adopted for `γ`, chosen so that `h g_1 h^-1 = g_1 γ`.
    pub gamma: String,
    /// Orientation of `[g_1, γ]` that equals `(f_1)^-a`, if any.
    pub commutator: Option<String>,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn check(&self, relation: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.relation == relation)
    }
}

struct Maps<'a> {
    mms: &'a Mms,
    n: usize,
}

impl<'a> Maps<'a> {
    fn f(&self, s: Elem) -> VertexMap {
        let fld = self.mms.field();
        VertexMap::from_fn(self.n, |v| {
            let (i, m, r) = self.mms.coords(v);
            self.mms.index(i, fld.add(m, s), r)
        })
    }

    fn g(&self, t: Elem, sign: GSign) -> VertexMap {
        let fld = self.mms.field();
        let t2 = fld.mul(t, t);
        VertexMap::from_fn(self.n, |v| {
            let (i, m, r) = self.mms.coords(v);
            let odd = match sign {
                GSign::Side => r == 1,
                GSign::Parity => t % 2 == 1,
            };
            let it = fld.mul(i, t);
            let middle = if odd { it } else { fld.neg(it) };
            let last = if r == 1 { t2 } else { 0 };
            self.mms.index(fld.add(i, t), fld.add(fld.add(m, middle), last), r)
        })
    }

    fn h(&self) -> VertexMap {
        let fld = self.mms.field();
        let z = fld.z();
        let neg_z = fld.neg(z);
        VertexMap::from_fn(self.n, |v| {
            let (i, m, r) = self.mms.coords(v);
            let i2 = if r == 1 { fld.mul(neg_z, i) } else { i };
            self.mms.index(i2, fld.mul(z, m), 1 - r)
        })
    }

    fn map_coords(&self, f: impl Fn(Elem, Elem, usize) -> (Elem, Elem, usize)) -> VertexMap {
        VertexMap::from_fn(self.n, |v| {
            let (i, m, r) = self.mms.coords(v);
            let (a, b, c) = f(i, m, r);
            self.mms.index(a, b, c)
        })
    }
}

fn compose(maps: &[&VertexMap]) -> VertexMap {
    let n = maps[0].len();
    maps.iter()
        .rev()
        .fold(VertexMap::identity(n), |acc, m| m.after(&acc))
}

struct Checker<'a> {
    mms: &'a Mms,
    checks: Vec<RelationCheck>,
}

impl Checker<'_> {
    fn push(&mut self, relation: &str, status: RelationStatus) {
        self.checks.push(RelationCheck {
            relation: relation.to_string(),
            status,
        });
    }

    fn skip(&mut self, relation: &str, reason: &str) {
        self.push(
            relation,
            RelationStatus::Skipped {
                reason: reason.to_string(),
            },
        );
    }

    fn difference(&self, param: &str, lhs: &VertexMap, rhs: &VertexMap) -> Option<String> {
        lhs.first_difference(rhs).map(|v| {
            format!(
                "{param}at {}: left side gives {}, right side gives {}",
                self.mms.label(v),
                self.mms.label(lhs.apply(v)),
                self.mms.label(rhs.apply(v))
            )
        })
    }

    /// Records the first failing parameter, or a pass.
    fn equal_over<P: std::fmt::Display>(
        &mut self,
        relation: &str,
        params: impl IntoIterator<Item = P>,
        pair: impl Fn(&P) -> (VertexMap, VertexMap),
    ) {
        let mut status = RelationStatus::Pass;
        for p in params {
            let (lhs, rhs) = pair(&p);
            let tag = format!("{p} ");
            if let Some(c) = self.difference(&tag, &lhs, &rhs) {
                status = RelationStatus::Fail { counterexample: c };
                break;
            }
        }
        self.push(relation, status);
    }

    fn equal(&mut self, relation: &str, lhs: &VertexMap, rhs: &VertexMap) {
        let status = match self.difference("", lhs, rhs) {
            Some(c) => RelationStatus::Fail { counterexample: c },
            None => RelationStatus::Pass,
        };
        self.push(relation, status);
    }

    fn automorphic(&mut self, relation: &str, g: &Digraph, maps: &[(String, VertexMap)]) {
        let mut status = RelationStatus::Pass;
        for (name, m) in maps {
            if let Some(v) = m.automorphism_defect(g) {
                status = RelationStatus::Fail {
                    counterexample: format!("{name} breaks adjacency at {}", self.mms.label(v)),
                };
                break;
            }
        }
        self.push(relation, status);
    }
}

struct Param {
    label: &'static str,
    value: Elem,
    display: String,
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.label, self.display)
    }
}

/// Checks every relation pointwise on all `2q²` vertices.
///
/// Relations quantified over field elements use every element when
/// `q ≤ 29` and a fixed sample (`0, 1, 2, z, -1`) otherwise. Relations
/// whose exponents must be integers are skipped when the exponent lies
/// outside the prime subfield.
pub fn verify_relations(mms: &Mms) -> RelationReport {
    let fld = mms.field();
    let q = mms.q();
    let n = mms.n();
    let g = mms.digraph();
    let maps = Maps { mms, n };
    let mut ck = Checker {
        mms,
        checks: Vec::new(),
    };
    let elems: Vec<Elem> = if q <= 29 {
        (0..q).collect()
    } else {
        let mut s = vec![0, 1, fld.from_int(2), fld.z(), fld.neg(1)];
        s.dedup();
        s
    };
    let param = |label: &'static str, value: Elem| Param {
        label,
        value,
        display: fld.display(value),
    };

    // g_t sign convention.
    let side_ok = (0..q).all(|t| maps.g(t, GSign::Side).automorphism_defect(&g).is_none());
    let parity_ok = (0..q).all(|t| maps.g(t, GSign::Parity).automorphism_defect(&g).is_none());
    let sign = if side_ok || !parity_ok {
        GSign::Side
    } else {
        GSign::Parity
    };
    log::info!("H_{q}: g_t sign (-1)^r automorphism = {side_ok}, (-1)^t = {parity_ok}; adopting {sign:?}");

    let f_all: Vec<(String, VertexMap)> = (0..q).map(|s| (format!("f_{}", fld.display(s)), maps.f(s))).collect();
    let g_all: Vec<(String, VertexMap)> = (0..q).map(|t| (format!("g_{}", fld.display(t)), maps.g(t, sign))).collect();
    let h = maps.h();
    let h_inv = h.inverse();
    let h2 = h.after(&h);
    let h2_inv = h2.inverse();
    ck.automorphic("f_s is an automorphism", &g, &f_all);
    ck.automorphic("g_t is an automorphism", &g, &g_all);
    ck.automorphic("h is an automorphism", &g, &[("h".to_string(), h.clone())]);

    let z = fld.z();
    let z_inv = fld.inv(z).expect("primitive root is nonzero");
    let neg_z = fld.neg(z);
    let gm = |t: Elem| maps.g(t, sign);
    let f = |s: Elem| maps.f(s);

    ck.equal_over(
        "h g_t h^-1 = (i + (-z)^(1-r) t, m - z^r i t + z(1-r) t^2, r)",
        elems.iter().map(|&t| param("t", t)),
        |p| {
            let t = p.value;
            let rhs = maps.map_coords(|i, m, r| {
                let step = if r == 0 { fld.mul(neg_z, t) } else { t };
                let zr = if r == 1 { z } else { 1 };
                let tail = if r == 0 { fld.mul(z, fld.mul(t, t)) } else { 0 };
                (fld.add(i, step), fld.add(fld.sub(m, fld.mul(zr, fld.mul(i, t))), tail), r)
            });
            (compose(&[&h, &gm(t), &h_inv]), rhs)
        },
    );
    let h2_formula = maps.map_coords(|i, m, r| (fld.mul(neg_z, i), fld.mul(fld.mul(z, z), m), r));
    ck.equal("h^2 = (-z i, z^2 m, r)", &h2, &h2_formula);
    let h2_inv_formula = maps.map_coords(|i, m, r| {
        (fld.neg(fld.mul(z_inv, i)), fld.mul(fld.mul(z_inv, z_inv), m), r)
    });
    ck.equal("h^-2 = (-z^-1 i, z^-2 m, r)", &h2_inv, &h2_inv_formula);

    let pairs: Vec<(Elem, Elem)> = elems.iter().flat_map(|&s| elems.iter().map(move |&t| (s, t))).collect();
    let pair_params = |label: &'static str| {
        pairs.iter().map(move |&(s, t)| Param {
            label,
            value: s * q + t,
            display: format!("({}, {})", fld.display(s), fld.display(t)),
        })
    };
    ck.equal_over("f_s f_t = f_(s+t)", pair_params("(s, t)"), |p| {
        let (s, t) = (p.value / q, p.value % q);
        (f(s).after(&f(t)), f(fld.add(s, t)))
    });
    ck.equal_over("g_s g_t = f_(-ts) g_(t+s)", pair_params("(s, t)"), |p| {
        let (s, t) = (p.value / q, p.value % q);
        let rhs = f(fld.neg(fld.mul(t, s))).after(&gm(fld.add(t, s)));
        (gm(s).after(&gm(t)), rhs)
    });
    ck.equal_over(
        "h^2 g_t h^-2 = g_(-zt)",
        elems.iter().map(|&t| param("t", t)),
        |p| (compose(&[&h2, &gm(p.value), &h2_inv]), gm(fld.neg(fld.mul(z, p.value)))),
    );
    let p_char = fld.characteristic();
    let g1 = gm(1);
    let g1_inv = g1.inverse();
    ck.equal_over(
        "(g_1)^k = f_(-k(k-1)/2) g_k",
        (0..p_char).map(|k| param("k", k)),
        |p| {
            let k = p.value as i64;
            let shift = fld.neg(fld.div(fld.from_int(k * (k - 1)), fld.from_int(2)).expect("q is odd"));
            (g1.pow(k as u64), f(shift).after(&gm(fld.from_int(k))))
        },
    );
    let f1 = f(1);
    ck.equal("h f_1 h^-1 = f_1", &compose(&[&h, &f1, &h_inv]), &f1);

    // γ: the first commutator word in g_1^±1, h^±1 satisfying h g_1 h^-1 = g_1 γ.
    let hg1h = compose(&[&h, &g1, &h_inv]);
    let names = [("g_1", &g1), ("g_1^-1", &g1_inv), ("h", &h), ("h^-1", &h_inv)];
    let word = |idx: [usize; 4]| {
        let parts: Vec<&str> = idx.iter().map(|&i| names[i].0).collect();
        let ms: Vec<&VertexMap> = idx.iter().map(|&i| names[i].1).collect();
        (parts.join(" "), compose(&ms))
    };
    let candidates = [
        [0, 2, 1, 3],
        [1, 3, 0, 2],
        [2, 0, 3, 1],
        [3, 1, 2, 0],
        [0, 3, 1, 2],
        [3, 0, 2, 1],
        [1, 2, 0, 3],
        [2, 1, 3, 0],
    ];
    let chosen = candidates
        .iter()
        .map(|&c| word(c))
        .find(|(_, gamma)| g1.after(gamma) == hg1h);
    let (gamma_name, gamma) = match chosen {
        Some(c) => {
            ck.push("h g_1 h^-1 = g_1 γ", RelationStatus::Pass);
            c
        }
        None => {
            let fallback = word(candidates[0]);
            ck.equal("h g_1 h^-1 = g_1 γ", &hg1h, &g1.after(&fallback.1));
            fallback
        }
    };
    log::info!("H_{q}: adopting γ = {gamma_name}");
    let gamma_inv = gamma.inverse();

    let a = fld.add(1, z);
    let a_int = fld.as_int(a);
    let z_int = fld.as_int(z);
    let c_pow = |e: Elem| f(fld.neg(fld.mul(a, e)));
    let c = c_pow(1);

    let mut commutator = None;
    match a_int {
        Some(_) => {
            let named = [
                ("g_1 γ g_1^-1 γ^-1", compose(&[&g1, &gamma, &g1_inv, &gamma_inv])),
                ("g_1^-1 γ^-1 g_1 γ", compose(&[&g1_inv, &gamma_inv, &g1, &gamma])),
                ("γ g_1 γ^-1 g_1^-1", compose(&[&gamma, &g1, &gamma_inv, &g1_inv])),
                ("γ^-1 g_1^-1 γ g_1", compose(&[&gamma_inv, &g1_inv, &gamma, &g1])),
            ];
            match named.iter().find(|(_, m)| *m == c) {
                Some((name, _)) => {
                    commutator = Some(name.to_string());
                    ck.push("[g_1, γ] = (f_1)^-a", RelationStatus::Pass);
                }
                None => ck.equal("[g_1, γ] = (f_1)^-a", &named[0].1, &c),
            }
            ck.equal("h c h^-1 = c", &compose(&[&h, &c, &h_inv]), &c);
        }
        None => {
            ck.skip("[g_1, γ] = (f_1)^-a", "a = 1 + z is not an integer in this field");
            ck.skip("h c h^-1 = c", "a = 1 + z is not an integer in this field");
        }
    }

    // x = g_1, y = γ^-1, c = (f_1)^-a.
    let half_z = fld.div(z, fld.from_int(2)).expect("q is odd");
    match (a_int, z_int) {
        (Some(ai), Some(zi)) => {
            let lhs = compose(&[&h, &gamma_inv, &h_inv]);
            let rhs = compose(&[&g1.pow(ai), &gamma, &c_pow(half_z)]);
            ck.equal("h y h^-1 = x^a y^-1 c^(z/2)", &lhs, &rhs);
            let lhs = compose(&[&h2, &g1, &h2_inv]);
            let x_neg_z = g1.pow((p_char as u64 - zi) % p_char as u64);
            let rhs = c_pow(fld.neg(half_z)).after(&x_neg_z);
            ck.equal("h^2 x h^-2 = c^(-z/2) x^(-z)", &lhs, &rhs);
        }
        _ => {
            ck.skip("h y h^-1 = x^a y^-1 c^(z/2)", "exponent outside the prime subfield");
            ck.skip("h^2 x h^-2 = c^(-z/2) x^(-z)", "exponent outside the prime subfield");
        }
    }

    let origin = mms.index(0, 0, 0);
    let fixes = |name: &str, m: &VertexMap, ck: &mut Checker| {
        let img = m.apply(origin);
        let status = if img == origin {
            RelationStatus::Pass
        } else {
            RelationStatus::Fail {
                counterexample: format!("(0,0,0) is sent to {}", mms.label(img)),
            }
        };
        ck.push(name, status);
    };
    fixes("h^2 fixes (0,0,0)", &h2, &mut ck);
    match a_int {
        Some(ai) => {
            let shift = fld.sub(1, fld.div(fld.mul(a, fld.add(a, 1)), fld.from_int(2)).expect("q is odd"));
            let alpha = compose(&[&f(shift), &g1.pow(ai), &gamma]);
            fixes("α = f_(1-a(a+1)/2) (g_1)^a γ fixes (0,0,0)", &alpha, &mut ck);
        }
        None => ck.skip(
            "α = f_(1-a(a+1)/2) (g_1)^a γ fixes (0,0,0)",
            "a = 1 + z is not an integer in this field",
        ),
    }

    // Coset representatives.
    let mut neighbors: Vec<usize> = g.out_neighbors(origin).to_vec();
    neighbors.sort_unstable();
    let fix_images: Vec<usize> = fld
        .squares()
        .iter()
        .map(|&beta| {
            let e = fld.neg(fld.div(beta, a).expect("a = 1 + z is nonzero"));
            c_pow(e).apply(origin)
        })
        .collect();
    let fix_name = "c^(-β/a), β in X, send (0,0,0) to distinct neighbours";
    ck.push(fix_name, image_status(mms, &fix_images, &neighbors));
    let cross_name = "y^j h^-1, j in GF(q), send (0,0,0) to distinct neighbours";
    let all_name = "coset representatives send (0,0,0) onto its out-neighbourhood";
    if fld.degree() == 1 {
        let mut cross_images = Vec::with_capacity(q);
        let mut y_pow = VertexMap::identity(n);
        for _ in 0..q {
            cross_images.push(y_pow.after(&h_inv).apply(origin));
            y_pow = gamma_inv.after(&y_pow);
        }
        ck.push(cross_name, image_status(mms, &cross_images, &neighbors));
        let mut all: Vec<usize> = fix_images.iter().chain(&cross_images).copied().collect();
        all.sort_unstable();
        let status = if all == neighbors {
            RelationStatus::Pass
        } else {
            let shown: Vec<String> = all.iter().map(|&v| mms.label(v)).collect();
            RelationStatus::Fail {
                counterexample: format!("images {}", shown.join(" ")),
            }
        };
        ck.push(all_name, status);
    } else {
        ck.skip(cross_name, "powers of y indexed by field elements need a prime field");
        ck.skip(all_name, "powers of y indexed by field elements need a prime field");
    }

    // Orbit of the origin.
    let mut gens: Vec<&VertexMap> = f_all.iter().chain(&g_all).map(|(_, m)| m).collect();
    gens.push(&h);
    let mut seen = vec![false; n];
    seen[origin] = true;
    let mut queue = VecDeque::from([origin]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for m in &gens {
            let v = m.apply(u);
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    let status = if reached == n {
        RelationStatus::Pass
    } else {
        RelationStatus::Fail {
            counterexample: format!("orbit has {reached} of {n} vertices"),
        }
    };
    ck.push("f_s, g_t, h move (0,0,0) to every vertex", status);

    RelationReport {
        q,
        composition: "right to left: (a b)(v) = a(b(v))".to_string(),
        g_sign_side_is_automorphism: side_ok,
        g_sign_parity_is_automorphism: parity_ok,
        g_sign: sign,
        gamma: gamma_name,
        commutator,
        checks: ck.checks,
    }
}

fn image_status(mms: &Mms, images: &[usize], neighbors: &[usize]) -> RelationStatus {
    for (k, &v) in images.iter().enumerate() {
        if neighbors.binary_search(&v).is_err() {
            return RelationStatus::Fail {
                counterexample: format!("representative {k} sends (0,0,0) to non-neighbour {}", mms.label(v)),
            };
        }
        if images[..k].contains(&v) {
            return RelationStatus::Fail {
                counterexample: format!("representative {k} repeats image {}", mms.label(v)),
            };
        }
    }
    RelationStatus::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mms::Field;

    fn report(q: usize) -> RelationReport {
        verify_relations(&Mms::new(Field::new(q, None).unwrap()))
    }

    fn status(r: &RelationReport, name: &str) -> RelationStatus {
        r.check(name).unwrap_or_else(|| panic!("missing {name}")).status.clone()
    }

    #[test]
    fn map_algebra() {
        let a = VertexMap::from_fn(4, |v| (v + 1) % 4);
        assert_eq!(a.pow(4), VertexMap::identity(4));
        assert_eq!(a.after(&a.inverse()), VertexMap::identity(4));
        assert_eq!(a.after(&a).apply(3), 1);
    }

    #[test]
    fn side_sign_is_the_automorphism() {
        let r = report(5);
        assert!(r.g_sign_side_is_automorphism);
        assert!(!r.g_sign_parity_is_automorphism);
        assert_eq!(r.g_sign, GSign::Side);
    }

    #[test]
    fn q5_relation_outcomes() {
        let r = report(5);
        for name in [
            "f_s is an automorphism",
            "g_t is an automorphism",
            "h is an automorphism",
            "f_s f_t = f_(s+t)",
            "g_s g_t = f_(-ts) g_(t+s)",
            "h^2 g_t h^-2 = g_(-zt)",
            "(g_1)^k = f_(-k(k-1)/2) g_k",
            "h^2 fixes (0,0,0)",
            "h g_1 h^-1 = g_1 γ",
            "[g_1, γ] = (f_1)^-a",
            "α = f_(1-a(a+1)/2) (g_1)^a γ fixes (0,0,0)",
            "c^(-β/a), β in X, send (0,0,0) to distinct neighbours",
            "f_s, g_t, h move (0,0,0) to every vertex",
        ] {
            assert_eq!(status(&r, name), RelationStatus::Pass, "{name}");
        }
        assert!(r.check("h f_1 h^-1 = f_1").unwrap().failed());
        assert_eq!(r.gamma, "g_1^-1 h g_1 h^-1");
    }

    #[test]
    fn conjugating_f1_by_h_scales_by_z() {
        let m = Mms::new(Field::new(13, None).unwrap());
        let maps = Maps { mms: &m, n: m.n() };
        let h = maps.h();
        let lhs = compose(&[&h, &maps.f(1), &h.inverse()]);
        assert_eq!(lhs, maps.f(m.field().z()));
    }
}
