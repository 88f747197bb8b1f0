//! Derivation scripts: JSON data describing a sequence of moves and substitutions,
//! replayed step by step with every precondition checked.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dsl::{parse_curve, parse_word};
use crate::error::{Error, Result};
use crate::hurwitz::{arrange, cyclic_permute, global_conjugate, hurwitz_move, slide_block, Direction, Keep};
use crate::normalize::{Normalizer, Tier};
use crate::relator::{match_subword, named_relator, substitute, RelatorKind, Side};
use crate::surface::Surface;
use crate::template::{eval, eval_usize, expand, range, Env};
use crate::word::{Factorization, Target, TwistLetter, TwistWord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub genus: String,
    /// Number of boundary pairs δ_k, δ'_k; closed when absent or zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Word {
        surface: SurfaceSpec,
        word: String,
        /// `pencil`, `identity` or a word.
        #[serde(default = "pencil")]
        target: String,
    },
    Family {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
    Script {
        script: String,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
}

fn pencil() -> String {
    "pencil".into()
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Slides bringing `[at, at+len(want))` to the word `want`.
    Arrange {
        at: String,
        want: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_tier: Option<Tier>,
    },
    Slide {
        from: String,
        #[serde(default = "one")]
        len: String,
        to: String,
        #[serde(default = "keep_passed")]
        keep: Keep,
    },
    Hurwitz {
        at: String,
        dir: Direction,
    },
    Cyclic {
        by: String,
    },
    Conjugate {
        by: String,
    },
    Substitute {
        relator: String,
        at: String,
        #[serde(default = "forward")]
        dir: Side,
        /// Transport the relator by this word first.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transport: Option<String>,
    },
    /// Multiply word and target on the left.
    Insert {
        word: String,
    },
    /// Remove the first letter from the word and an equal letter from the target.
    Cancel {
        curve: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_tier: Option<Tier>,
    },
    Cap {
        boundaries: String,
    },
    Assert {
        at: String,
        word: String,
    },
    Repeat {
        var: String,
        range: String,
        steps: Vec<Step>,
    },
    When {
        cond: String,
        steps: Vec<Step>,
    },
    Include {
        script: String,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
    Checkpoint {
        name: String,
    },
}

fn keep_passed() -> Keep {
    Keep::Passed
}

fn forward() -> Side {
    Side::Forward
}

impl Step {
    pub fn kind(&self) -> &'static str {
        match self {
            Step::Arrange { .. } => "arrange",
            Step::Slide { .. } => "slide",
            Step::Hurwitz { .. } => "hurwitz",
            Step::Cyclic { .. } => "cyclic",
            Step::Conjugate { .. } => "conjugate",
            Step::Substitute { .. } => "substitute",
            Step::Insert { .. } => "insert",
            Step::Cancel { .. } => "cancel",
            Step::Cap { .. } => "cap",
            Step::Assert { .. } => "assert",
            Step::Repeat { .. } => "repeat",
            Step::When { .. } => "when",
            Step::Include { .. } => "include",
            Step::Checkpoint { .. } => "checkpoint",
        }
    }

    /// Steps that only rearrange letters (no relator other than braid and commutation).
    pub fn is_braid_only(kind: &str) -> bool {
        matches!(kind, "arrange" | "slide" | "hurwitz" | "cyclic" | "conjugate")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub params: BTreeMap<String, i64>,
    /// `[name, expr]` pairs evaluated in order after the parameters.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<[String; 2]>,
    /// `[expr, message]`: the expression must be nonzero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub require: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Source>,
    pub steps: Vec<Step>,
    #[serde(default, rename = "final", skip_serializing_if = "Option::is_none")]
    pub final_expected: Option<Source>,
}

/// Supplies catalog factorizations and other scripts by name.
pub trait Resolver: Sync {
    fn family(&self, name: &str, params: &Env) -> Result<Factorization>;
    fn script(&self, name: &str) -> Result<Script>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLog {
    /// Dotted path, e.g. `3.1.2` for a step inside repeats or includes.
    pub index: String,
    pub op: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_tier: Option<Tier>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relator_kind: Option<RelatorKind>,
    pub letters: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifiedDerivation {
    pub name: String,
    pub params: Env,
    pub pass: bool,
    pub log: Vec<StepLog>,
    /// Tiers of the letter-by-letter comparison with the expected final word.
    pub final_tiers: Vec<Tier>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub homology_tainted: bool,
    #[serde(skip)]
    pub result: Factorization,
    #[serde(skip)]
    pub checkpoints: BTreeMap<String, Factorization>,
}

impl VerifiedDerivation {
    pub fn substitutions(&self, kind: RelatorKind) -> usize {
        self.log.iter().filter(|l| l.relator_kind == Some(kind)).count()
    }

    /// True when some braid-only step was certified only in homology.
    pub fn braid_steps_tainted(&self) -> bool {
        self.log.iter().any(|l| Step::is_braid_only(&l.op) && l.min_tier == Some(Tier::HomologyOnly))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or_default();
        v["final_word"] = self.result.to_json()["letters"].clone();
        v
    }
}

pub fn surface_of(spec: &SurfaceSpec, env: &Env) -> Result<Surface> {
    let g = eval_usize(&spec.genus, env)?;
    let n = match &spec.pairs {
        Some(p) => eval_usize(p, env)?,
        None => 0,
    };
    Ok(if n == 0 { Surface::closed(g) } else { Surface::paired(g, n) })
}

fn eval_params(params: &BTreeMap<String, String>, env: &Env) -> Result<Env> {
    params.iter().map(|(k, v)| Ok((k.clone(), eval(v, env)?))).collect()
}

pub fn word_in(src: &str, env: &Env) -> Result<TwistWord> {
    parse_word(&expand(src, env)?)
}

fn target_of(spec: &str, surface: &Surface, env: &Env) -> Result<Target> {
    Ok(match spec.trim() {
        "pencil" => Target::pencil(surface),
        "identity" => Target::identity(),
        w => Target::Word(word_in(w, env)?),
    })
}

impl Script {
    pub fn from_json(s: &str) -> Result<Script> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("script: {e}")))
    }

    /// Defaults, overridden by `given`, then derived values and requirements.
    pub fn environment(&self, given: &Env) -> Result<Env> {
        let mut env = self.params.clone();
        env.extend(given.iter().map(|(k, v)| (k.clone(), *v)));
        for [k, e] in &self.derived {
            let v = eval(e, &env)?;
            env.insert(k.clone(), v);
        }
        for [cond, msg] in &self.require {
            if eval(cond, &env)? == 0 {
                return Err(Error::Range(format!("{}: {msg}", self.name)));
            }
        }
        Ok(env)
    }

    pub fn replay(&self, given: &Env, resolver: &dyn Resolver) -> Result<VerifiedDerivation> {
        let env = self.environment(given)?;
        let initial = self
            .initial
            .as_ref()
            .ok_or_else(|| Error::Parse(format!("{}: no initial factorization", self.name)))?;
        let f = resolve(initial, &env, resolver)?;
        let mut run = Run { resolver, log: Vec::new(), checkpoints: BTreeMap::new() };
        let f = run.steps(&self.steps, f, &env, "")?;
        let mut out = VerifiedDerivation {
            name: self.name.clone(),
            params: env.clone(),
            pass: true,
            log: run.log,
            final_tiers: Vec::new(),
            failure: None,
            homology_tainted: f.homology_tainted,
            result: f,
            checkpoints: run.checkpoints,
        };
        if let Some(fin) = &self.final_expected {
            let expected = resolve(fin, &env, resolver)?;
            match compare_final(&out.result, &expected) {
                Ok(t) => out.final_tiers = t,
                Err(e) => {
                    out.pass = false;
                    out.failure = Some(e.to_string());
                }
            }
        }
        Ok(out)
    }
}

pub fn resolve(src: &Source, env: &Env, resolver: &dyn Resolver) -> Result<Factorization> {
    match src {
        Source::Word { surface, word, target } => {
            let s = surface_of(surface, env)?;
            let mut t = target_of(target, &s, env)?;
            let letters = word_in(word, env)?;
            if is_all_boundaries(&t, &s) {
                t = Target::pencil(&s);
            }
            if matches!(t, Target::Boundary(ref m) if !m.is_empty()) {
                Factorization::pencil(&s, letters)
            } else {
                Factorization::new(&s, letters, t)
            }
        }
        Source::Family { family, params } => resolver.family(family, &eval_params(params, env)?),
        Source::Script { script, params } => {
            let s = resolver.script(script)?;
            let d = s.replay(&eval_params(params, env)?, resolver)?;
            if !d.pass {
                return Err(Error::Step {
                    step: 0,
                    kind: "script".into(),
                    detail: format!("{script}: {}", d.failure.unwrap_or_default()),
                });
            }
            Ok(d.result)
        }
    }
}

/// A word target naming each boundary component exactly once.
fn is_all_boundaries(t: &Target, s: &Surface) -> bool {
    let Target::Word(w) = t else { return false };
    let Ok(atlas) = crate::atlas::Atlas::load(s) else { return false };
    let mut names: Vec<&str> = w.iter().filter(|l| l.exp == 1 && l.curve.is_plain()).map(|l| atlas.canonical(&l.curve.base)).collect();
    names.sort_unstable();
    let mut b: Vec<&str> = s.boundaries.iter().map(String::as_str).collect();
    b.sort_unstable();
    names.len() == w.len() && names == b
}

/// Letter-by-letter comparison (tier ≥ HomologyOnly), targets as multisets when they commute.
pub fn compare_final(f: &Factorization, expected: &Factorization) -> Result<Vec<Tier>> {
    if f.surface() != expected.surface() {
        return Err(Error::Relator(format!("final surface {} differs from {}", f.surface(), expected.surface())));
    }
    let nz = Normalizer::new(&f.atlas);
    let tiers = match_subword(&nz, &f.letters, &expected.letters, 0).map_err(|e| {
        if f.len() != expected.len() {
            Error::SubwordMismatch { position: 0, detail: format!("{} letters, expected {}", f.len(), expected.len()) }
        } else {
            e
        }
    });
    // match_subword treats an all-commuting pattern as a multiset; words must match in order here
    let tiers = if tiers.is_ok() && !in_order(&nz, &f.letters, &expected.letters) {
        Err(Error::SubwordMismatch { position: 0, detail: "letters agree only up to order".into() })
    } else {
        tiers
    }?;
    let (t1, t2) = (f.target.word(), expected.target.word());
    match_subword(&nz, &t1, &t2, 0)
        .map_err(|e| Error::Relator(format!("targets differ: {e}")))
        .and_then(|_| {
            if in_order(&nz, &t1, &t2) || commuting(f, &t2) {
                Ok(())
            } else {
                Err(Error::Relator("targets differ in order".into()))
            }
        })?;
    Ok(tiers)
}

fn in_order(nz: &Normalizer, a: &[TwistLetter], b: &[TwistLetter]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| nz.letters_equal(x, y).tier.is_equal())
}

fn commuting(f: &Factorization, w: &[TwistLetter]) -> bool {
    w.iter().enumerate().all(|(i, a)| {
        w[i + 1..]
            .iter()
            .all(|b| a.curve.is_plain() && b.curve.is_plain() && f.atlas.disjoint(&a.curve.base, &b.curve.base))
    })
}

struct Run<'a> {
    resolver: &'a dyn Resolver,
    log: Vec<StepLog>,
    checkpoints: BTreeMap<String, Factorization>,
}

impl Run<'_> {
    fn steps(&mut self, steps: &[Step], mut f: Factorization, env: &Env, prefix: &str) -> Result<Factorization> {
        for (i, step) in steps.iter().enumerate() {
            let index = if prefix.is_empty() { i.to_string() } else { format!("{prefix}.{i}") };
            f = self.step(step, f, env, &index).map_err(|e| match e {
                e @ Error::Step { .. } => e,
                e => Error::Step { step: i, kind: format!("{} at {index}", step.kind()), detail: e.to_string() },
            })?;
        }
        Ok(f)
    }

    fn record(&mut self, index: &str, step: &Step, detail: String, min_tier: Option<Tier>, kind: Option<RelatorKind>, f: &Factorization) {
        self.log.push(StepLog {
            index: index.into(),
            op: step.kind().into(),
            detail,
            min_tier,
            relator_kind: kind,
            letters: f.len(),
        });
    }

    fn step(&mut self, step: &Step, f: Factorization, env: &Env, index: &str) -> Result<Factorization> {
        match step {
            Step::Arrange { at, want, min_tier } => {
                let at = eval_usize(at, env)?;
                let want = word_in(want, env)?;
                let (g, log) = arrange(&f, at, &want, min_tier.unwrap_or(Tier::Rewritten))?;
                let t = log.tiers.iter().copied().min();
                self.record(index, step, format!("{} letters at {at}", want.len()), t, None, &g);
                Ok(g)
            }
            Step::Slide { from, len, to, keep } => {
                let (from, len, to) = (eval_usize(from, env)?, eval_usize(len, env)?, eval_usize(to, env)?);
                let g = slide_block(&f, from, len, to, *keep)?;
                self.record(index, step, format!("[{from}, {}) to {to}", from + len), None, None, &g);
                Ok(g)
            }
            Step::Hurwitz { at, dir } => {
                let at = eval_usize(at, env)?;
                let g = hurwitz_move(&f, at, *dir)?;
                self.record(index, step, format!("{dir:?} at {at}"), None, None, &g);
                Ok(g)
            }
            Step::Cyclic { by } => {
                let by = eval(by, env)?;
                let k = by.rem_euclid(f.len().max(1) as i64) as usize;
                let g = cyclic_permute(&f, k)?;
                self.record(index, step, format!("by {by}"), None, None, &g);
                Ok(g)
            }
            Step::Conjugate { by } => {
                let w = word_in(by, env)?;
                let g = global_conjugate(&f, &w);
                self.record(index, step, format!("by {}", crate::word::DisplayWord(&w)), None, None, &g);
                Ok(g)
            }
            Step::Substitute { relator, at, dir, transport } => {
                let name = expand(relator, env)?.trim().to_string();
                let mut r = named_relator(&f.atlas, &name)?;
                if let Some(w) = transport {
                    r = r.transport(&f.atlas, &word_in(w, env)?)?;
                }
                let at = eval_usize(at, env)?;
                let (g, log) = substitute(&f, &r, at, *dir)?;
                self.record(index, step, format!("{name} {dir:?} at {at}"), Some(log.min_tier()), Some(r.kind), &g);
                Ok(g)
            }
            Step::Insert { word } => {
                let w = word_in(word, env)?;
                let mut g = f.clone();
                g.letters.splice(0..0, w.iter().cloned());
                g.target = match &f.target {
                    Target::Boundary(m) if w.iter().all(|l| l.exp > 0 && l.curve.is_plain() && m.contains_key(&l.curve.base)) => {
                        let mut m = m.clone();
                        for l in &w {
                            *m.get_mut(&l.curve.base).unwrap() += l.exp as u32;
                        }
                        Target::Boundary(m)
                    }
                    t => Target::Word(w.iter().cloned().chain(t.word()).collect()),
                };
                self.record(index, step, crate::word::DisplayWord(&w).to_string(), None, None, &g);
                Ok(g)
            }
            Step::Cancel { curve, min_tier } => {
                let c = parse_curve(&expand(curve, env)?)?;
                let g = cancel(&f, &c, min_tier.unwrap_or(Tier::Syntactic))?;
                self.record(index, step, c.base.clone(), None, None, &g);
                Ok(g)
            }
            Step::Cap { boundaries } => {
                let b = expand(boundaries, env)?;
                let labels: Vec<&str> = b.split_whitespace().collect();
                let g = f.cap(&labels)?;
                self.record(index, step, b.trim().to_string(), None, None, &g);
                Ok(g)
            }
            Step::Assert { at, word } => {
                let at = eval_usize(at, env)?;
                let w = word_in(word, env)?;
                if at + w.len() > f.len() {
                    return Err(Error::IndexOutOfRange { index: at + w.len(), len: f.len() });
                }
                let nz = Normalizer::new(&f.atlas);
                let mut tiers = Vec::new();
                for (k, (l, e)) in f.letters[at..at + w.len()].iter().zip(&w).enumerate() {
                    let t = nz.letters_equal(l, e).tier;
                    if !t.is_equal() {
                        return Err(Error::SubwordMismatch { position: at + k, detail: format!("{l} is not {e}") });
                    }
                    tiers.push(t);
                }
                let min = tiers.iter().copied().min();
                self.record(index, step, format!("{} letters at {at}", w.len()), min, None, &f);
                Ok(f)
            }
            Step::Repeat { var, range: spec, steps } => {
                let mut f = f;
                for (n, v) in range(spec, env)?.into_iter().enumerate() {
                    let mut inner = env.clone();
                    inner.insert(var.clone(), v);
                    f = self.steps(steps, f, &inner, &format!("{index}.{n}"))?;
                }
                Ok(f)
            }
            Step::When { cond, steps } => {
                if eval(cond, env)? != 0 {
                    self.steps(steps, f, env, index)
                } else {
                    Ok(f)
                }
            }
            Step::Include { script, params } => {
                let s = self.resolver.script(script)?;
                let inner = s.environment(&eval_params(params, env)?)?;
                self.steps(&s.steps, f, &inner, index)
            }
            Step::Checkpoint { name } => {
                self.checkpoints.insert(name.clone(), f.clone());
                self.record(index, step, name.clone(), None, None, &f);
                Ok(f)
            }
        }
    }
}

/// Drop `c` from the front of the word and from the target, where it must commute
/// with everything before it.
pub fn cancel(f: &Factorization, c: &crate::word::CurveExpr, min: Tier) -> Result<Factorization> {
    let nz = Normalizer::new(&f.atlas);
    let first = f.letters.first().ok_or(Error::IndexOutOfRange { index: 0, len: 0 })?;
    let t = nz.curve_equal(&first.curve, c).tier;
    if first.exp != 1 || t < min {
        return Err(Error::SubwordMismatch { position: 0, detail: format!("first letter {first} is not t_{} at {min:?}", c.base) });
    }
    let mut g = f.clone();
    g.letters.remove(0);
    match &f.target {
        Target::Boundary(m) => {
            let mut m = m.clone();
            match m.get_mut(&c.base) {
                Some(e) if *e > 0 => *e -= 1,
                _ => return Err(Error::Relator(format!("{} is not in the target", c.base))),
            }
            m.retain(|_, e| *e > 0);
            g.target = Target::Boundary(m);
        }
        Target::Word(w) => {
            let pos = w
                .iter()
                .enumerate()
                .find(|(_, l)| l.exp == 1 && nz.curve_equal(&l.curve, c).tier >= min)
                .map(|(k, _)| k)
                .ok_or_else(|| Error::Relator(format!("{} is not in the target", c.base)))?;
            let blocked = w[..pos]
                .iter()
                .any(|l| !(l.curve.is_plain() && c.is_plain() && f.atlas.disjoint(&l.curve.base, &c.base)));
            if blocked {
                return Err(Error::Relator(format!("{} does not commute to the front of the target", c.base)));
            }
            let mut w = w.clone();
            w.remove(pos);
            g.target = Target::Word(w);
        }
    }
    Ok(g)
}
