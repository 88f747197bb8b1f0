//! Twist letters, curve expressions and factorizations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::surface::{Class, Surface};

/// The curve `w(base)`, with `w` a twist word whose rightmost letter acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveExpr {
    pub base: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conjugator: Vec<TwistLetter>,
}

/// t_c^exp.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistLetter {
    #[serde(flatten)]
    pub curve: CurveExpr,
    pub exp: i32,
}

pub type TwistWord = Vec<TwistLetter>;

impl CurveExpr {
    pub fn named(base: &str) -> Self {
        CurveExpr { base: base.to_string(), conjugator: Vec::new() }
    }

    pub fn image(conjugator: TwistWord, base: &str) -> Self {
        CurveExpr { base: base.to_string(), conjugator }
    }

    pub fn is_plain(&self) -> bool {
        self.conjugator.is_empty()
    }

    /// Integral class, folding transvections over the conjugator.
    pub fn class(&self, atlas: &Atlas) -> Result<Class> {
        let mut v = atlas.require(&self.base)?.z_class.clone();
        for l in self.conjugator.iter().rev() {
            let c = l.curve.class(atlas)?;
            v = atlas.surface.transvect(&c, &v, l.exp as i64);
        }
        Ok(v)
    }

    /// The curve pushed through `w`: w(self).
    pub fn push(&self, w: &[TwistLetter]) -> CurveExpr {
        let mut conj = w.to_vec();
        conj.extend(self.conjugator.iter().cloned());
        CurveExpr { base: self.base.clone(), conjugator: conj }
    }

    /// Named letters of the conjugator and base, recursively.
    pub fn names(&self, out: &mut Vec<String>) {
        out.push(self.base.clone());
        for l in &self.conjugator {
            l.curve.names(out);
        }
    }
}

impl TwistLetter {
    pub fn new(curve: CurveExpr, exp: i32) -> Self {
        TwistLetter { curve, exp }
    }

    pub fn named(base: &str) -> Self {
        TwistLetter::new(CurveExpr::named(base), 1)
    }

    pub fn named_exp(base: &str, exp: i32) -> Self {
        TwistLetter::new(CurveExpr::named(base), exp)
    }

    pub fn inverse(&self) -> Self {
        TwistLetter { curve: self.curve.clone(), exp: -self.exp }
    }

    /// `w t_c^e w⁻¹` as a word of plain named letters.
    pub fn flatten(&self) -> Vec<(String, i32)> {
        let mut out = Vec::new();
        let conj = flatten_word(&self.curve.conjugator);
        out.extend(conj.iter().cloned());
        out.push((self.curve.base.clone(), self.exp));
        out.extend(conj.iter().rev().map(|(n, e)| (n.clone(), -e)));
        out
    }

    pub fn matrix(&self, atlas: &Atlas) -> Result<Matrix<i64>> {
        let c = self.curve.class(atlas)?;
        Ok(atlas.surface.transvection_matrix(&c, self.exp as i64))
    }
}

pub fn flatten_word(w: &[TwistLetter]) -> Vec<(String, i32)> {
    w.iter().flat_map(TwistLetter::flatten).collect()
}

pub fn inverse_word(w: &[TwistLetter]) -> TwistWord {
    w.iter().rev().map(TwistLetter::inverse).collect()
}

/// Product of transvections, rightmost letter acting first.
pub fn word_action(atlas: &Atlas, w: &[TwistLetter]) -> Result<Matrix<i64>> {
    let mut m = Matrix::identity(atlas.surface.rank());
    for l in w {
        m = m.mul(&l.matrix(atlas)?);
    }
    Ok(m)
}

impl fmt::Display for CurveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjugator.is_empty() {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{{{}}}({})", DisplayWord(&self.conjugator), self.base)
        }
    }
}

impl fmt::Display for TwistLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.curve)
        } else {
            write!(f, "{}^{}", self.curve, self.exp)
        }
    }
}

pub struct DisplayWord<'a>(pub &'a [TwistLetter]);

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// What the product of the letters is supposed to equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Product of boundary twists, keyed by boundary label; empty for a closed fibration.
    Boundary(BTreeMap<String, u32>),
    /// An arbitrary word, used for intermediate lifts and relator sides.
    Word(TwistWord),
}

impl Target {
    pub fn pencil(surface: &Surface) -> Target {
        Target::Boundary(surface.boundaries.iter().map(|b| (b.clone(), 1)).collect())
    }

    pub fn identity() -> Target {
        Target::Boundary(BTreeMap::new())
    }

    /// Boundary multi-twists are central; other targets are not assumed to be.
    pub fn is_central(&self) -> bool {
        matches!(self, Target::Boundary(_))
    }

    pub fn word(&self) -> TwistWord {
        match self {
            Target::Boundary(m) => m
                .iter()
                .flat_map(|(b, &e)| std::iter::repeat(TwistLetter::named(b)).take(e as usize))
                .collect(),
            Target::Word(w) => w.clone(),
        }
    }
}

/// A multisection record carried for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionRecord {
    pub multiplicity: u32,
    pub self_intersection: i64,
    pub boundaries: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub atlas: Arc<Atlas>,
    pub letters: TwistWord,
    pub target: Target,
    pub sections: Vec<SectionRecord>,
    /// Surface the alphabet was loaded on, and the boundaries capped since.
    pub origin: Surface,
    pub capped: Vec<String>,
    /// Set when some step was only certified in homology.
    pub homology_tainted: bool,
}

impl Factorization {
    pub fn new(surface: &Surface, letters: TwistWord, target: Target) -> Result<Self> {
        let atlas = Atlas::load(surface)?;
        let f = Factorization {
            atlas: Arc::new(atlas),
            letters,
            target,
            sections: Vec::new(),
            origin: surface.clone(),
            capped: Vec::new(),
            homology_tainted: false,
        };
        f.check_names()?;
        Ok(f)
    }

    /// A pencil on `surface` with one exceptional section per boundary component.
    pub fn pencil(surface: &Surface, letters: TwistWord) -> Result<Self> {
        let mut f = Factorization::new(surface, letters, Target::pencil(surface))?;
        f.sections = surface
            .boundaries
            .iter()
            .map(|b| SectionRecord { multiplicity: 1, self_intersection: -1, boundaries: vec![b.clone()] })
            .collect();
        Ok(f)
    }

    pub fn surface(&self) -> &Surface {
        &self.atlas.surface
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn with_letters(&self, letters: TwistWord) -> Self {
        Factorization { letters, ..self.clone() }
    }

    pub fn check_names(&self) -> Result<()> {
        let mut names = Vec::new();
        for l in self.letters.iter().chain(self.target.word().iter()) {
            l.curve.names(&mut names);
        }
        for n in names {
            self.atlas.require(&n)?;
        }
        Ok(())
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.exp == 1)
    }

    /// Letters whose curve is a boundary component (relative minimality bookkeeping).
    pub fn boundary_parallel_letters(&self) -> Vec<usize> {
        (0..self.letters.len())
            .filter(|&k| {
                let l = &self.letters[k];
                l.curve.is_plain() && self.atlas.is_boundary_parallel(&l.curve.base)
            })
            .collect()
    }

    /// Number of base points: boundary components carrying a twist in the target.
    pub fn base_points(&self) -> usize {
        match &self.target {
            Target::Boundary(m) => m.values().filter(|&&e| e > 0).count(),
            Target::Word(_) => 0,
        }
    }

    pub fn homology_action(&self) -> Result<Matrix<i64>> {
        word_action(&self.atlas, &self.letters)
    }

    pub fn letter_class(&self, k: usize) -> Result<Class> {
        self.letters[k].curve.class(&self.atlas)
    }

    /// Cap boundary components, moving the alphabet to the smaller surface.
    pub fn cap(&self, labels: &[&str]) -> Result<Self> {
        let atlas = self.atlas.cap(labels)?;
        let target = match &self.target {
            Target::Boundary(m) => {
                Target::Boundary(m.iter().filter(|(b, _)| !labels.contains(&b.as_str())).map(|(b, e)| (b.clone(), *e)).collect())
            }
            Target::Word(w) => Target::Word(
                w.iter().filter(|l| !(l.curve.is_plain() && labels.contains(&l.curve.base.as_str()))).cloned().collect(),
            ),
        };
        let mut capped = self.capped.clone();
        capped.extend(labels.iter().map(|s| s.to_string()));
        Ok(Factorization {
            atlas: Arc::new(atlas),
            letters: self.letters.clone(),
            target,
            sections: self.sections.clone(),
            origin: self.origin.clone(),
            capped,
            homology_tainted: self.homology_tainted,
        })
    }

    /// The closed fibration obtained by capping every boundary component.
    pub fn fibration(&self) -> Result<Self> {
        let labels: Vec<String> = self.surface().boundaries.clone();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let mut f = self.cap(&refs)?;
        f.sections.clear();
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "surface": {"g": self.origin.genus, "p": self.origin.boundary_count(), "boundaries": self.origin.boundaries},
            "capped": self.capped,
            "letters": self.letters,
            "target": self.target,
            "sections": self.sections,
            "homology_tainted": self.homology_tainted,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::Parse(e.to_string());
        let s = &v["surface"];
        let genus = s["g"].as_u64().ok_or_else(|| Error::Parse("surface.g missing".into()))? as usize;
        let origin = match s.get("boundaries") {
            Some(b) => Surface { genus, boundaries: serde_json::from_value(b.clone()).map_err(bad)? },
            None => Surface::new(genus, s["p"].as_u64().unwrap_or(0) as usize),
        };
        let letters: TwistWord = serde_json::from_value(v["letters"].clone()).map_err(bad)?;
        let target: Target = match v.get("target") {
            Some(t) => serde_json::from_value(t.clone()).map_err(bad)?,
            None => Target::pencil(&origin),
        };
        let capped: Vec<String> = match v.get("capped") {
            Some(c) => serde_json::from_value(c.clone()).map_err(bad)?,
            None => Vec::new(),
        };
        let mut f = Factorization::new(&origin, Vec::new(), Target::identity())?;
        if !capped.is_empty() {
            let refs: Vec<&str> = capped.iter().map(String::as_str).collect();
            f = f.cap(&refs)?;
        }
        f.letters = letters;
        f.target = target;
        if let Some(sec) = v.get("sections") {
            f.sections = serde_json::from_value(sec.clone()).map_err(bad)?;
        }
        f.homology_tainted = v["homology_tainted"].as_bool().unwrap_or(false);
        f.check_names()?;
        Ok(f)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", DisplayWord(&self.letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(g: usize, power: usize) -> TwistWord {
        let mut w = Vec::new();
        for _ in 0..power {
            for i in 1..=2 * g + 1 {
                w.push(TwistLetter::named(&format!("c{i}")));
            }
        }
        w
    }

    #[test]
    fn chain_power_is_trivial_on_closed_homology() {
        let f = Factorization::new(&Surface::closed(3), chain(3, 8), Target::identity()).unwrap();
        assert_eq!(f.len(), 56);
        assert!(f.homology_action().unwrap().is_identity());
    }

    #[test]
    fn missing_letter_breaks_the_pencil() {
        let mut f = Factorization::pencil(&Surface::paired(3, 1), chain(3, 8)).unwrap();
        assert!(f.homology_action().unwrap().is_identity());
        f.letters.remove(10);
        assert!(!f.homology_action().unwrap().is_identity());
    }

    #[test]
    fn conjugated_class_matches_definition() {
        let atlas = Atlas::load(&Surface::paired(3, 1)).unwrap();
        let conj = vec![TwistLetter::named_exp("c1", -1), TwistLetter::named_exp("c2", -1), TwistLetter::named_exp("c3", -1)];
        let d4 = CurveExpr::image(conj, "c4");
        assert_eq!(d4.class(&atlas).unwrap(), atlas.class("d4").unwrap());
        assert_eq!(d4.to_string(), "{c1^-1 c2^-1 c3^-1}(c4)");
    }

    #[test]
    fn json_round_trip() {
        let mut f = Factorization::pencil(&Surface::paired(3, 1), chain(3, 1)).unwrap();
        f.letters.push(TwistLetter::new(CurveExpr::image(vec![TwistLetter::named("c1")], "c2"), 1));
        let g = Factorization::from_json(&f.to_json()).unwrap();
        assert_eq!(g.letters, f.letters);
        assert_eq!(g.target, f.target);
        assert_eq!(g.surface(), f.surface());
    }
}
