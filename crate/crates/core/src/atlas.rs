//! The named curve alphabet: homology classes, π1 words and registered
//! geometric intersection numbers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{delta_label, delta_prime_label, Class, Surface};

/// How a curve sits on the surface; drives the intersection rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Chain(usize),
    Boundary,
    /// A curve in the planar region bounded by `a`, `b` and the δ's (or the primed
    /// region). Holes are numbered 0 = a, 1..n = δ_k, n+1 = b; the curve encloses `holes`.
    Pants { primed: bool, holes: BTreeSet<usize>, size: usize },
    /// d_j (`positive = false`) or e_j.
    Shifted { j: usize, positive: bool },
    /// Everything else; intersections are registered explicitly.
    Explicit,
}

/// A twist word image `conj(base)` used as a definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub conj: Vec<(String, i32)>,
    pub base: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInfo {
    pub name: String,
    pub kind: Kind,
    pub z_class: Class,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1_word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definition: Option<Definition>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Atlas {
    pub surface: Surface,
    /// Number of δ and δ' labels on the surface the alphabet was loaded for.
    pub n: usize,
    pub n_primed: usize,
    curves: BTreeMap<String, CurveInfo>,
    aliases: BTreeMap<String, String>,
    explicit: BTreeMap<(String, String), u32>,
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn add(x: &[i64], y: &[i64], s: i64) -> Class {
    x.iter().zip(y).map(|(u, v)| u + s * v).collect()
}

fn pants_disjoint(s: &BTreeSet<usize>, t: &BTreeSet<usize>, size: usize) -> bool {
    s.is_subset(t) || t.is_subset(s) || s.is_disjoint(t) || s.union(t).count() == size
}

impl Atlas {
    /// All named curves defined on `surface`.
    pub fn load(surface: &Surface) -> Result<Atlas> {
        let g = surface.genus;
        let n = (1..).take_while(|&k| surface.boundary_index(&delta_label(k)).is_some()).count();
        let n_primed = (1..).take_while(|&k| surface.boundary_index(&delta_prime_label(k)).is_some()).count();
        if n + n_primed != surface.boundary_count() {
            return Err(Error::Range(format!("unsupported boundary labelling {:?}", surface.boundaries)));
        }
        let mut atlas = Atlas {
            surface: surface.clone(),
            n,
            n_primed,
            curves: BTreeMap::new(),
            aliases: BTreeMap::new(),
            explicit: BTreeMap::new(),
        };
        let s = surface;
        let delta = |k: usize| s.boundary_class_or_zero(&delta_label(k));
        let delta_p = |k: usize| s.boundary_class_or_zero(&delta_prime_label(k));
        let mut big_delta = s.zero();
        for k in 1..=n {
            big_delta = add(&big_delta, &delta(k), 1);
        }

        for k in 1..=n {
            atlas.insert(&delta_label(k), Kind::Boundary, delta(k), None);
        }
        for k in 1..=n_primed {
            atlas.insert(&delta_prime_label(k), Kind::Boundary, delta_p(k), None);
        }
        if g == 0 {
            return Ok(atlas);
        }

        // chain c_1 .. c_{2g+1}
        atlas.insert("c1", Kind::Chain(1), s.a(1), Some("a_1"));
        for k in 1..=g {
            atlas.insert(&format!("c{}", 2 * k), Kind::Chain(2 * k), s.b(k), if k == 1 { Some("b_1") } else { None });
            let odd = if k < g { add(&s.a(k + 1), &s.a(k), -1) } else { add(&big_delta, &s.a(g), -1) };
            let word = if k == 1 && g > 1 { Some("b_1 a_1^-1 b_1^-1 a_2") } else { None };
            atlas.insert(&format!("c{}", 2 * k + 1), Kind::Chain(2 * k + 1), odd, word);
        }
        if g < 2 {
            return Ok(atlas);
        }

        // d_j, e_j
        for j in 4..=2 * g + 1 {
            for positive in [false, true] {
                let e = if positive { 1 } else { -1 };
                let mut v = atlas.class(&format!("c{j}")).unwrap();
                for i in (j - 3..j).rev() {
                    v = s.transvect(&atlas.class(&format!("c{i}")).unwrap(), &v, e);
                }
                let name = format!("{}{j}", if positive { 'e' } else { 'd' });
                atlas.insert(&name, Kind::Shifted { j, positive }, v, None);
                atlas.curves.get_mut(&name).unwrap().definition = Some(Definition {
                    conj: (j - 3..j).map(|i| (format!("c{i}"), e as i32)).collect(),
                    base: format!("c{j}"),
                });
            }
        }

        // planar regions around the boundaries
        let a2 = s.a(2);
        atlas.add_pants_family(false, n, &a2, &|k| delta(k), -1);
        atlas.add_pants_family(true, n_primed, &a2, &|k| delta_p(k), 1);
        atlas.curves.get_mut("a").unwrap().pi1_word = Some("a_2".into());
        atlas.curves.get_mut("a'").unwrap().pi1_word = Some("[a_1,b_1] a_2".into());

        if n >= 1 && n_primed >= 1 {
            let mut v = atlas.class("x'1").unwrap();
            for d in ["d4", "d5"] {
                v = s.transvect(&atlas.class(d).unwrap(), &v, -1);
            }
            atlas.insert("x''1", Kind::Explicit, v, None);
            atlas.curves.get_mut("x''1").unwrap().definition = Some(Definition {
                conj: vec![("d5".into(), -1), ("d4".into(), -1)],
                base: "x'1".into(),
            });
            for other in ["c1", "x1", "c5"] {
                atlas.set_intersection("x''1", other, 0);
            }
        }

        if g == 3 && s.boundary_count() == 0 {
            atlas.add_genus3_set();
        }
        Ok(atlas)
    }

    /// a, b, x_k, y_m, z_k (or their primed versions) in the region with `count` boundaries.
    /// `sign` is the sign of the δ's in x_k = a_2 ± δ_k.
    fn add_pants_family(&mut self, primed: bool, count: usize, a2: &Class, delta: &dyn Fn(usize) -> Class, sign: i64) {
        let p = if primed { "'" } else { "" };
        let size = count + 2;
        let pants = |holes: BTreeSet<usize>| Kind::Pants { primed, holes, size };
        let z = |k: usize| {
            let mut v = vec![0; a2.len()];
            for t in k..=count {
                v = add(&v, &delta(t), 1);
            }
            v
        };
        self.insert(&format!("a{p}"), pants([0].into()), a2.clone(), None);
        self.insert(&format!("b{p}"), pants([count + 1].into()), add(a2, &z(1), sign), None);
        self.alias(&format!("y{p}0"), &format!("b{p}"));
        if count == 1 {
            // a single boundary: x_1 and b cobound an annulus
            self.alias(&format!("x{p}1"), &format!("b{p}"));
        }
        for k in (1..=count).filter(|_| count > 1) {
            self.insert(&format!("x{p}{k}"), pants([0, k].into()), add(a2, &delta(k), sign), None);
        }
        for m in 1..count.saturating_sub(1) {
            let holes: BTreeSet<usize> = std::iter::once(0).chain(m + 1..=count).collect();
            self.insert(&format!("y{p}{m}"), pants(holes), add(a2, &z(m + 1), sign), None);
        }
        if count >= 2 {
            self.alias(&format!("y{p}{}", count - 1), &format!("x{p}{count}"));
        }
        for k in 1..count {
            self.insert(&format!("z{p}{k}"), pants((k..=count).collect()), z(k), None);
        }
        if count >= 1 {
            let d = if primed { delta_prime_label(count) } else { delta_label(count) };
            self.alias(&format!("z{p}{count}"), &d);
        }
    }

    /// The curves of the genus-3 lantern configuration on the closed surface.
    fn add_genus3_set(&mut self) {
        let s = self.surface.clone();
        let a1 = s.a(1);
        let a2 = s.a(2);
        let a3 = s.a(3);
        let zero = s.zero();
        let y = add(&add(&a1, &a2, -1), &a3, 1);
        let z = add(&a1, &a3, -1);
        let classes: [(&str, Class); 10] = [
            ("s", zero.clone()),
            ("x", add(&a1, &a2, 1)),
            ("s'", zero.clone()),
            ("x'", add(&a2, &a3, 1)),
            ("y", y.clone()),
            ("z", z.clone()),
            ("y'", y),
            ("z'", z),
            ("v", zero),
            ("w", a2),
        ];
        for (name, class) in classes {
            self.insert(name, Kind::Explicit, class, None);
        }
        // lantern configurations: (boundaries, interiors)
        let lanterns: [(&[&str], [&str; 3]); 5] = [
            (&["a", "c1", "a'"], ["c3", "s", "x"]),
            (&["c7", "a", "a'"], ["c5", "s'", "x'"]),
            (&["c1", "c3", "c5", "c7"], ["a", "y", "z"]),
            (&["c1", "c3", "c5", "c7"], ["a'", "y'", "z'"]),
            (&["a", "s", "s'"], ["a'", "v", "w"]),
        ];
        for (bdry, int) in lanterns {
            self.register_lantern(bdry, &int);
        }
        for p in ["s", "x"] {
            for q in ["c5", "c6", "c7", "s'", "x'"] {
                self.set_intersection(p, q, 0);
            }
        }
        // the two lanterns on c1, c3, c5, c7 live in complementary spheres
        for p in ["a", "y", "z"] {
            for q in ["a'", "y'", "z'"] {
                self.set_intersection(p, q, 0);
            }
        }
        for p in ["s'", "x'"] {
            for q in ["c1", "c2", "c3"] {
                self.set_intersection(p, q, 0);
            }
        }
    }

    /// Interior curves of a lantern miss its boundary and meet each other twice.
    pub fn register_lantern(&mut self, boundary: &[&str], interiors: &[&str; 3]) {
        for i in interiors {
            for b in boundary {
                self.set_intersection(i, b, 0);
            }
        }
        for (k, i) in interiors.iter().enumerate() {
            for j in &interiors[k + 1..] {
                self.set_intersection(i, j, 2);
            }
        }
    }

    fn insert(&mut self, name: &str, kind: Kind, z_class: Class, pi1: Option<&str>) {
        self.curves.insert(
            name.to_string(),
            CurveInfo { name: name.to_string(), kind, z_class, pi1_word: pi1.map(str::to_string), definition: None },
        );
    }

    /// Register an extra curve (for example the interior of a lantern built on the fly).
    pub fn define(&mut self, name: &str, z_class: Class, definition: Option<Definition>) {
        self.insert(name, Kind::Explicit, z_class, None);
        self.curves.get_mut(name).unwrap().definition = definition;
    }

    fn alias(&mut self, name: &str, target: &str) {
        self.aliases.insert(name.to_string(), target.to_string());
    }

    pub fn set_intersection(&mut self, a: &str, b: &str, value: u32) {
        let a = self.canonical(a).to_string();
        let b = self.canonical(b).to_string();
        self.explicit.insert(ordered(&a, &b), value);
    }

    /// Resolve aliases such as `y0 = b` or `z_n = δ_n`.
    pub fn canonical<'a>(&'a self, name: &'a str) -> &'a str {
        self.aliases.get(name).map(String::as_str).unwrap_or(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.curves.contains_key(self.canonical(name))
    }

    pub fn get(&self, name: &str) -> Option<&CurveInfo> {
        self.curves.get(self.canonical(name))
    }

    /// Look up a curve, explaining why it is missing when it is.
    pub fn require(&self, name: &str) -> Result<&CurveInfo> {
        self.get(name).ok_or_else(|| {
            let reason = arity_reason(name).unwrap_or_else(|| "not in the alphabet of this surface".to_string());
            Error::UndefinedCurve { name: name.to_string(), surface: self.surface.to_string(), reason }
        })
    }

    pub fn class(&self, name: &str) -> Option<Class> {
        self.get(name).map(|c| c.z_class.clone())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.curves.keys().map(String::as_str)
    }

    pub fn curves(&self) -> impl Iterator<Item = &CurveInfo> {
        self.curves.values()
    }

    /// Null-homologous after capping every boundary.
    pub fn is_separating(&self, name: &str) -> Result<bool> {
        let c = self.require(name)?;
        Ok(self.surface.is_boundary_class(&c.z_class))
    }

    pub fn is_boundary_parallel(&self, name: &str) -> bool {
        matches!(self.get(name).map(|c| &c.kind), Some(Kind::Boundary))
    }

    /// Registered geometric intersection number; `None` when unknown.
    pub fn intersection(&self, a: &str, b: &str) -> Option<u32> {
        let a = self.canonical(a);
        let b = self.canonical(b);
        if a == b {
            return Some(0);
        }
        if let Some(&v) = self.explicit.get(&ordered(a, b)) {
            return Some(v);
        }
        let ka = &self.curves.get(a)?.kind;
        let kb = &self.curves.get(b)?.kind;
        rule(ka, kb).or_else(|| rule(kb, ka))
    }

    pub fn disjoint(&self, a: &str, b: &str) -> bool {
        self.intersection(a, b) == Some(0)
    }

    /// The registry on the surface obtained by capping `labels`.
    pub fn cap(&self, labels: &[&str]) -> Result<Atlas> {
        let target = self.surface.cap(labels)?;
        let mut out = self.clone();
        out.surface = target.clone();
        for c in out.curves.values_mut() {
            c.z_class = self.surface.push_class(&target, &c.z_class);
        }
        for l in labels {
            out.curves.remove(*l);
        }
        out.aliases.retain(|_, t| !labels.contains(&t.as_str()));
        out.add_braiding_curves();
        Ok(out)
    }

    /// Lantern interiors that appear once a pair δ_k, δ'_k has been capped off.
    fn add_braiding_curves(&mut self) {
        let mut configs: Vec<([String; 4], [String; 3])> = Vec::new();
        for k in 1..=self.n.min(self.n_primed) {
            let gone = !self.contains(&delta_label(k)) && !self.contains(&delta_prime_label(k));
            if !gone || !self.contains(&format!("x{k}")) {
                continue;
            }
            for (c, names) in [("c1", ["bx", "by", "bz"]), ("c3", ["bu", "bv", "bw"])] {
                configs.push((
                    [format!("x{k}"), format!("x'{k}"), c.into(), c.into()],
                    names.map(|m| format!("{m}{k}")),
                ));
            }
            if k == 1 && self.contains("x''1") {
                configs.push((
                    ["c1", "x1", "x''1", "c5"].map(String::from),
                    ["ux", "uy", "uz"].map(String::from),
                ));
            }
        }
        for (bdry, names) in configs {
            if self.contains(&names[0]) {
                continue;
            }
            let classes: Vec<Class> = bdry.iter().map(|b| self.class(b).unwrap()).collect();
            let Some(int) = solve_lantern(&self.surface, &classes) else { continue };
            for (name, class) in names.iter().zip(int) {
                self.insert(name, Kind::Explicit, class, None);
            }
            let b: Vec<&str> = bdry.iter().map(String::as_str).collect();
            self.register_lantern(&b, &[&names[0], &names[1], &names[2]]);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let curves: Vec<serde_json::Value> = self
            .curves
            .values()
            .map(|c| {
                let mut inter = serde_json::Map::new();
                for other in self.curves.keys() {
                    if other != &c.name {
                        if let Some(v) = self.intersection(&c.name, other) {
                            inter.insert(other.clone(), v.into());
                        }
                    }
                }
                let mut obj = serde_json::json!({
                    "name": c.name,
                    "z_class": c.z_class,
                    "separating": self.surface.is_boundary_class(&c.z_class),
                    "intersections": inter,
                });
                if let Some(w) = &c.pi1_word {
                    obj["pi1_word"] = w.clone().into();
                }
                obj
            })
            .collect();
        serde_json::json!({
            "version": 1,
            "surface": {"g": self.surface.genus, "p": self.surface.boundary_count(), "boundaries": self.surface.boundaries},
            "curves": curves,
            "aliases": self.aliases,
        })
    }
}

/// Classes for the interiors (x, y, z) of a lantern with the given boundary classes,
/// ordered so that t_x t_y t_z equals the boundary multi-twist on homology.
pub fn solve_lantern(surface: &Surface, boundary: &[Class]) -> Option<[Class; 3]> {
    let m = |c: &Class| surface.transvection_matrix(c, 1);
    let target = boundary.iter().fold(crate::linalg::Matrix::identity(surface.rank()), |acc, c| acc.mul(&m(c)));
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for signs in 0..8u32 {
        let e: Vec<i64> = std::iter::once(1).chain((0..3).map(|b| if signs >> b & 1 == 1 { -1 } else { 1 })).collect();
        let total = (0..4).fold(surface.zero(), |acc, i| add(&acc, &boundary[i], e[i]));
        if total.iter().any(|&v| v != 0) {
            continue;
        }
        let cand: Vec<Class> = (1..4).map(|i| add(&boundary[0], &boundary[i], e[i])).collect();
        for p in PERMS {
            let prod = m(&cand[p[0]]).mul(&m(&cand[p[1]])).mul(&m(&cand[p[2]]));
            if prod == target {
                return Some([cand[p[0]].clone(), cand[p[1]].clone(), cand[p[2]].clone()]);
            }
        }
    }
    None
}

fn arity_reason(name: &str) -> Option<String> {
    let body = name.trim_start_matches(['x', 'y', 'z']).trim_start_matches('\'');
    let k: usize = body.parse().ok()?;
    let need = match name.chars().next()? {
        'x' | 'z' => 2 * k,
        'y' => 2 * (k + 1),
        _ => return None,
    };
    Some(format!("{name} needs p ≥ {need}"))
}

fn rule(a: &Kind, b: &Kind) -> Option<u32> {
    use Kind::*;
    match (a, b) {
        (Boundary, _) => Some(0),
        (Chain(i), Chain(j)) => Some(if i.abs_diff(*j) == 1 { 1 } else { 0 }),
        // inside the region the chain only shows up as an arc of c_4 running from a to b
        (Chain(i), Pants { holes, size, .. }) => {
            let separates = holes.contains(&0) != holes.contains(&(size - 1));
            Some(if *i == 4 && separates { 1 } else { 0 })
        }
        (Chain(i), Shifted { j, .. }) => (*i + 5 <= *j || *i >= j + 2).then_some(0),
        (Shifted { j, .. }, Shifted { j: k, .. }) => (j.abs_diff(*k) >= 5).then_some(0),
        (Pants { primed: p, holes: s, size }, Pants { primed: q, holes: t, .. }) => {
            Some(if p != q || pants_disjoint(s, t, *size) { 0 } else { 2 })
        }
        (Pants { holes, size, .. }, Shifted { j, .. }) => {
            let separates = holes.contains(&0) != holes.contains(&(size - 1));
            (*j >= 8 || !separates).then_some(0)
        }
        _ => None,
    }
}
