//! Relators (lantern, odd chain, braid, braiding lantern) and monodromy substitution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::hurwitz::push_letter;
use crate::normalize::{Normalizer, Tier};
use crate::surface::{delta_label, delta_prime_label};
use crate::word::{word_action, CurveExpr, DisplayWord, Factorization, SectionRecord, TwistLetter, TwistWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelatorKind {
    Lantern,
    ChainOdd,
    Braid,
    BraidingLantern,
    Custom,
}

/// The relation `lhs = rhs` between two twist words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    pub name: String,
    pub kind: RelatorKind,
    pub lhs: TwistWord,
    pub rhs: TwistWord,
    pub bindings: BTreeMap<String, CurveExpr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forward,
    Backward,
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn plain(names: &[&str]) -> TwistWord {
    names.iter().map(|n| TwistLetter::named(n)).collect()
}

fn incidence(atlas: &Atlas, a: &str, b: &str, want: u32) -> Result<()> {
    match atlas.intersection(a, b) {
        Some(v) if v == want => Ok(()),
        other => Err(Error::Relator(format!("i({a}, {b}) should be {want}, registry has {other:?}"))),
    }
}

impl Relator {
    fn checked(atlas: &Atlas, name: String, kind: RelatorKind, lhs: TwistWord, rhs: TwistWord, bindings: BTreeMap<String, CurveExpr>) -> Result<Relator> {
        let r = Relator { name, kind, lhs, rhs, bindings };
        r.check_homology(atlas)?;
        Ok(r)
    }

    pub fn check_homology(&self, atlas: &Atlas) -> Result<()> {
        if word_action(atlas, &self.lhs)? != word_action(atlas, &self.rhs)? {
            return Err(Error::Relator(format!("{}: sides act differently on homology", self.name)));
        }
        Ok(())
    }

    pub fn side(&self, side: Side) -> (&TwistWord, &TwistWord) {
        match side {
            Side::Forward => (&self.lhs, &self.rhs),
            Side::Backward => (&self.rhs, &self.lhs),
        }
    }

    /// Letter count change of a forward substitution.
    pub fn delta_len(&self) -> isize {
        self.rhs.len() as isize - self.lhs.len() as isize
    }

    /// All curves replaced by their images under `w`.
    pub fn transport(&self, atlas: &Atlas, w: &[TwistLetter]) -> Result<Relator> {
        let nz = Normalizer::new(atlas);
        let map = |v: &TwistWord| v.iter().map(|l| push_letter(&nz, l, w)).collect();
        let bindings = self
            .bindings
            .iter()
            .map(|(k, c)| (k.clone(), push_letter(&nz, &TwistLetter::new(c.clone(), 1), w).curve))
            .collect();
        Relator::checked(atlas, self.name.clone(), self.kind, map(&self.lhs), map(&self.rhs), bindings)
    }
}

impl std::fmt::Display for Relator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} = {}", self.name, DisplayWord(&self.lhs), DisplayWord(&self.rhs))
    }
}

/// (t_{d_1} ⋯ t_{d_{2h+1}})^{2h+2} = t_{b_1} t_{b_2}.
pub fn instantiate_chain(atlas: &Atlas, name: &str, curves: &[&str], boundaries: [&str; 2]) -> Result<Relator> {
    if curves.len() % 2 == 0 {
        return Err(Error::Relator(format!("{name}: chain length must be odd")));
    }
    for (i, a) in curves.iter().enumerate() {
        for (j, b) in curves.iter().enumerate().skip(i + 1) {
            incidence(atlas, a, b, u32::from(j == i + 1))?;
        }
        for b in boundaries {
            incidence(atlas, a, b, 0)?;
        }
    }
    let power = curves.len() + 1;
    let lhs: TwistWord = (0..power).flat_map(|_| plain(curves)).collect();
    let mut bindings = BTreeMap::new();
    for (i, c) in curves.iter().enumerate() {
        bindings.insert(format!("d{}", i + 1), CurveExpr::named(c));
    }
    bindings.insert("b1".into(), CurveExpr::named(boundaries[0]));
    bindings.insert("b2".into(), CurveExpr::named(boundaries[1]));
    Relator::checked(atlas, name.into(), RelatorKind::ChainOdd, lhs, plain(&boundaries), bindings)
}

/// t_{δ_1} t_{δ_2} t_{δ_3} t_{δ_4} = t_x t_y t_z (boundary twists commute; interiors in the given order).
pub fn instantiate_lantern(atlas: &Atlas, name: &str, boundary: [&str; 4], interiors: [&str; 3]) -> Result<Relator> {
    lantern_of_kind(atlas, name, RelatorKind::Lantern, boundary, interiors)
}

fn lantern_of_kind(atlas: &Atlas, name: &str, kind: RelatorKind, boundary: [&str; 4], interiors: [&str; 3]) -> Result<Relator> {
    for (i, a) in boundary.iter().enumerate() {
        for b in &boundary[i + 1..] {
            incidence(atlas, a, b, 0)?;
        }
        for x in interiors {
            incidence(atlas, a, x, 0)?;
        }
    }
    for (i, x) in interiors.iter().enumerate() {
        for y in &interiors[i + 1..] {
            incidence(atlas, x, y, 2)?;
        }
    }
    let mut bindings = BTreeMap::new();
    for (i, b) in boundary.iter().enumerate() {
        bindings.insert(format!("delta{}", i + 1), CurveExpr::named(b));
    }
    for (role, x) in ["x", "y", "z"].iter().zip(interiors) {
        bindings.insert(role.to_string(), CurveExpr::named(x));
    }
    Relator::checked(atlas, name.into(), kind, plain(&boundary), plain(&interiors), bindings)
}

/// t_a t_b t_a = t_b t_a t_b for curves meeting once.
pub fn instantiate_braid(atlas: &Atlas, a: &str, b: &str) -> Result<Relator> {
    incidence(atlas, a, b, 1)?;
    let bindings = [("a".to_string(), CurveExpr::named(a)), ("b".to_string(), CurveExpr::named(b))].into();
    Relator::checked(atlas, format!("braid({a},{b})"), RelatorKind::Braid, plain(&[a, b, a]), plain(&[b, a, b]), bindings)
}

/// Relators used by the catalog, by name.
///
/// `A3`, `A2g-3`, `chain` (the full chain, with boundary z1, z'1), `L1`, `L1'`, `L2`,
/// `L2'`, `L3`, `lift{k}` / `lift'{k}` (the lantern raising the lift from stage k to k+1),
/// `braid-c1-{k}` / `braid-c3-{k}` (braiding lanterns after capping δ_k, δ'_k) and `braid-y2`.
pub fn named_relator(atlas: &Atlas, name: &str) -> Result<Relator> {
    let g = atlas.surface.genus;
    let cs = |r: std::ops::RangeInclusive<usize>| -> Vec<String> { r.map(|i| format!("c{i}")).collect() };
    match name {
        "A3" => instantiate_chain(atlas, name, &["c1", "c2", "c3"], ["a", "a'"]),
        "A2g-3" => {
            let v = cs(5..=2 * g + 1);
            instantiate_chain(atlas, name, &refs(&v), ["b", "b'"])
        }
        "chain" => {
            let v = cs(1..=2 * g + 1);
            instantiate_chain(atlas, name, &refs(&v), ["z1", "z'1"])
        }
        "L1" => instantiate_lantern(atlas, name, ["a'", "c1", "c1", "a"], ["c3", "s", "x"]),
        "L1'" => instantiate_lantern(atlas, name, ["c7", "a'", "a", "c7"], ["c5", "s'", "x'"]),
        "L2" => instantiate_lantern(atlas, name, ["c7", "c3", "c5", "c1"], ["a", "y", "z"]),
        "L2'" => instantiate_lantern(atlas, name, ["c7", "c3", "c5", "c1"], ["a'", "y'", "z'"]),
        "L3" => instantiate_lantern(atlas, name, ["a", "s'", "s", "a"], ["a'", "v", "w"]),
        "braid-y2" => lantern_of_kind(atlas, name, RelatorKind::BraidingLantern, ["c1", "x1", "x''1", "c5"], ["ux", "uy", "uz"]),
        _ => {
            if let Some(k) = name.strip_prefix("lift'").and_then(|k| k.parse::<usize>().ok()) {
                return lift_lantern(atlas, name, k, true);
            }
            if let Some(k) = name.strip_prefix("lift").and_then(|k| k.parse::<usize>().ok()) {
                return lift_lantern(atlas, name, k, false);
            }
            for (prefix, c, names) in [("braid-c1-", "c1", ["bx", "by", "bz"]), ("braid-c3-", "c3", ["bu", "bv", "bw"])] {
                if let Some(k) = name.strip_prefix(prefix).and_then(|k| k.parse::<usize>().ok()) {
                    let x = format!("x{k}");
                    let xp = format!("x'{k}");
                    let int = names.map(|m| format!("{m}{k}"));
                    return lantern_of_kind(
                        atlas,
                        name,
                        RelatorKind::BraidingLantern,
                        [&x, &xp, c, c],
                        [&int[0], &int[1], &int[2]],
                    );
                }
            }
            Err(Error::Unknown { what: "relator", name: name.into() })
        }
    }
}

/// t_{z_{k+1}} t_a t_{y_{k-1}} t_{δ_k} = t_{z_k} t_{y_k} t_{x_k} (or the primed copy).
fn lift_lantern(atlas: &Atlas, name: &str, k: usize, primed: bool) -> Result<Relator> {
    let p = if primed { "'" } else { "" };
    let d = if primed { delta_prime_label(k) } else { delta_label(k) };
    let zb = format!("z{p}{}", k + 1);
    let a = format!("a{p}");
    let y = format!("y{p}{}", k - 1);
    let zk = format!("z{p}{k}");
    let yk = format!("y{p}{k}");
    let xk = format!("x{p}{k}");
    instantiate_lantern(atlas, name, [&zb, &a, &y, &d], [&zk, &yk, &xk])
}

/// Result of matching a subword against a relator side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionLog {
    pub relator: String,
    pub kind: RelatorKind,
    pub side: Side,
    pub position: usize,
    pub tiers: Vec<Tier>,
    pub removed: usize,
    pub inserted: usize,
}

impl SubstitutionLog {
    pub fn min_tier(&self) -> Tier {
        self.tiers.iter().copied().min().unwrap_or(Tier::Syntactic)
    }
}

fn pairwise_commuting(atlas: &Atlas, w: &[TwistLetter]) -> bool {
    w.iter().enumerate().all(|(i, a)| {
        w[i + 1..].iter().all(|b| {
            a.curve.is_plain() && b.curve.is_plain() && atlas.disjoint(&a.curve.base, &b.curve.base)
        })
    })
}

/// Match `sub` against `pattern`, letter by letter, or as a multiset when the
/// pattern's letters pairwise commute. Returns the tier of each matched letter.
pub fn match_subword(nz: &Normalizer, sub: &[TwistLetter], pattern: &[TwistLetter], position: usize) -> Result<Vec<Tier>> {
    if sub.len() != pattern.len() {
        return Err(Error::SubwordMismatch { position, detail: "length differs".into() });
    }
    let mismatch = |i: usize, l: &TwistLetter| Error::SubwordMismatch {
        position: position + i,
        detail: format!("{l} matches no letter of {}", DisplayWord(pattern)),
    };
    if pairwise_commuting(nz.atlas, pattern) {
        let mut used = vec![false; pattern.len()];
        let mut tiers = Vec::new();
        for (i, l) in sub.iter().enumerate() {
            let best = (0..pattern.len())
                .filter(|&j| !used[j])
                .map(|j| (nz.letters_equal(l, &pattern[j]).tier, j))
                .max_by_key(|&(t, j)| (t, std::cmp::Reverse(j)));
            match best {
                Some((t, j)) if t.is_equal() => {
                    used[j] = true;
                    tiers.push(t);
                }
                _ => return Err(mismatch(i, l)),
            }
        }
        Ok(tiers)
    } else {
        let mut tiers = Vec::new();
        for (i, (l, p)) in sub.iter().zip(pattern).enumerate() {
            let t = nz.letters_equal(l, p).tier;
            if !t.is_equal() {
                return Err(Error::SubwordMismatch { position: position + i, detail: format!("{l} vs {p}: distinct") });
            }
            tiers.push(t);
        }
        Ok(tiers)
    }
}

/// Replace the subword at `position` matching one side of `r` by the other side.
pub fn substitute(f: &Factorization, r: &Relator, position: usize, side: Side) -> Result<(Factorization, SubstitutionLog)> {
    let (from, to) = r.side(side);
    if position + from.len() > f.len() {
        return Err(Error::SubwordMismatch { position, detail: "subword runs past the end".into() });
    }
    let nz = Normalizer::new(&f.atlas);
    let tiers = match_subword(&nz, &f.letters[position..position + from.len()], from, position)?;
    let mut out = f.clone();
    out.letters.splice(position..position + from.len(), to.iter().cloned());
    if tiers.contains(&Tier::HomologyOnly) {
        out.homology_tainted = true;
    }
    if r.kind == RelatorKind::BraidingLantern && side == Side::Forward {
        merge_sections(&mut out, r);
    }
    if out.homology_action()? != f.homology_action()? {
        return Err(Error::Relator(format!("{}: substitution changed the homology action", r.name)));
    }
    let log = SubstitutionLog {
        relator: r.name.clone(),
        kind: r.kind,
        side,
        position,
        tiers,
        removed: from.len(),
        inserted: to.len(),
    };
    Ok((out, log))
}

/// Two exceptional sections through the capped pair become one exceptional bisection.
fn merge_sections(f: &mut Factorization, r: &Relator) {
    let bound: Vec<String> = r.bindings.values().map(|c| c.base.clone()).collect();
    let pair: Vec<String> = (1..=f.atlas.n)
        .filter(|k| bound.contains(&format!("x{k}")) || (*k == 1 && bound.contains(&"x1".to_string())))
        .flat_map(|k| [delta_label(k), delta_prime_label(k)])
        .collect();
    let before = f.sections.len();
    f.sections.retain(|s| !s.boundaries.iter().any(|b| pair.contains(b)));
    if f.sections.len() < before {
        f.sections.push(SectionRecord { multiplicity: 2, self_intersection: -1, boundaries: pair });
    }
}
