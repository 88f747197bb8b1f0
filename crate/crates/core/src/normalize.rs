//! Normal forms of curve expressions and the tiered curve-equality oracle.

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::atlas::{Atlas, Kind};
use crate::braid::{conjugate_word, ArtinAut};
use crate::surface::Class;
use crate::word::{CurveExpr, TwistLetter};

/// Strength of an equality certificate, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    Distinct,
    HomologyOnly,
    Rewritten,
    Syntactic,
}

impl Tier {
    pub fn is_equal(self) -> bool {
        self != Tier::Distinct
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equality {
    pub tier: Tier,
    /// The two integral classes when they differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Class, Class)>,
}

pub const DEFAULT_DEPTH: usize = 12;

static DEPTH: AtomicUsize = AtomicUsize::new(DEFAULT_DEPTH);

/// Rewrite bound used by [`Normalizer::new`] from now on, process-wide.
pub fn set_depth(depth: usize) {
    DEPTH.store(depth, Ordering::Relaxed);
}

pub fn depth() -> usize {
    DEPTH.load(Ordering::Relaxed)
}

type Flat = Vec<(String, i32)>;

/// Identities beyond the braid and commutation rules, each a suffix
/// `conj(base) = result` derived from a registered lantern relation.
struct Identity {
    conj: Flat,
    base: String,
    result: String,
}

pub struct Normalizer<'a> {
    pub atlas: &'a Atlas,
    pub depth: usize,
    identities: Vec<Identity>,
}

impl<'a> Normalizer<'a> {
    pub fn new(atlas: &'a Atlas) -> Self {
        Normalizer::with_depth(atlas, depth())
    }

    pub fn with_depth(atlas: &'a Atlas, depth: usize) -> Self {
        let mut identities = Vec::new();
        // t_z^{-1} t_y^{-1}(a) = a from the lantern t_a t_y t_z = t_{c1} t_{c5} t_{c3} t_{c7}
        for (y, z, a) in [("y", "z", "a"), ("y'", "z'", "a'")] {
            if atlas.contains(y) && atlas.contains(z) {
                identities.push(Identity {
                    conj: vec![(z.into(), -1), (y.into(), -1)],
                    base: a.into(),
                    result: a.into(),
                });
            }
        }
        Normalizer { atlas, depth, identities }
    }

    fn canonical(&self, name: &str) -> String {
        self.atlas.canonical(name).to_string()
    }

    /// Plain letters for `t_name^e`, with every defined curve expanded.
    fn expand_letter(&self, name: &str, e: i32, out: &mut Flat) {
        let name = self.canonical(name);
        match self.atlas.get(&name).and_then(|c| c.definition.clone()) {
            Some(def) => {
                let mut conj = Flat::new();
                for (n, f) in &def.conj {
                    self.expand_letter(n, *f, &mut conj);
                }
                let mut base = Flat::new();
                self.expand_letter(&def.base, e, &mut base);
                out.extend(conj.iter().cloned());
                out.extend(base);
                out.extend(conj.iter().rev().map(|(n, f)| (n.clone(), -f)));
            }
            None => out.push((name, e)),
        }
    }

    fn expand_word(&self, w: &[TwistLetter], out: &mut Flat) {
        for l in w {
            let mut inner = Flat::new();
            self.expand_word(&l.curve.conjugator, &mut inner);
            let mut core = Flat::new();
            self.expand_letter(&l.curve.base, l.exp, &mut core);
            out.extend(inner.iter().cloned());
            out.extend(core);
            out.extend(inner.iter().rev().map(|(n, f)| (n.clone(), -f)));
        }
    }

    /// Expand to a flat conjugator and a base curve without a definition.
    fn expand(&self, c: &CurveExpr) -> (Flat, String) {
        let mut conj = Flat::new();
        self.expand_word(&c.conjugator, &mut conj);
        let mut base = self.canonical(&c.base);
        while let Some(def) = self.atlas.get(&base).and_then(|i| i.definition.clone()) {
            let mut more = Flat::new();
            for (n, f) in &def.conj {
                self.expand_letter(n, *f, &mut more);
            }
            conj.extend(more);
            base = self.canonical(&def.base);
        }
        (conj, base)
    }

    fn commute(&self, a: &str, b: &str) -> bool {
        a == b || self.atlas.disjoint(a, b)
    }

    /// Free reduction, also across letters that commute with the cancelling pair.
    fn reduce(&self, w: &mut Flat) -> bool {
        let mut changed = false;
        'outer: loop {
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    if w[j].0 == w[i].0 && w[j].1 == -w[i].1 {
                        w.remove(j);
                        w.remove(i);
                        changed = true;
                        continue 'outer;
                    }
                    if !self.commute(&w[j].0, &w[i].0) {
                        break;
                    }
                }
            }
            return changed;
        }
    }

    /// Drop conjugator letters that fix the base and can be moved next to it.
    fn strip(&self, w: &mut Flat, base: &str) -> bool {
        let mut changed = false;
        let mut i = w.len();
        while i > 0 {
            i -= 1;
            let name = &w[i].0;
            let fixes = name == base || self.atlas.disjoint(name, base);
            if fixes && w[i + 1..].iter().all(|(m, _)| self.commute(m, name)) {
                w.remove(i);
                changed = true;
                i = w.len();
            }
        }
        changed
    }

    /// t_P^ε t_Q^ε (P) = Q when P and Q meet once; plus the registered identities.
    fn rewrite_suffix(&self, w: &mut Flat, base: &mut String) -> bool {
        let n = w.len();
        if n >= 2 {
            let (p, e1) = &w[n - 2];
            let (q, e2) = &w[n - 1];
            if p == base && e1 == e2 && self.atlas.intersection(p, q) == Some(1) {
                *base = q.clone();
                w.truncate(n - 2);
                return true;
            }
        }
        for id in &self.identities {
            let k = id.conj.len();
            if *base == id.base && n >= k && w[n - k..] == id.conj[..] {
                w.truncate(n - k);
                *base = id.result.clone();
                return true;
            }
        }
        false
    }

    fn simplify(&self, w: &mut Flat, base: &mut String) {
        loop {
            let mut changed = self.reduce(w);
            changed |= self.strip(w, base);
            changed |= self.rewrite_suffix(w, base);
            if !changed {
                break;
            }
        }
    }

    fn flat_normal(&self, c: &CurveExpr) -> (Flat, String) {
        let (mut w, mut base) = self.expand(c);
        self.simplify(&mut w, &mut base);
        (w, base)
    }

    /// Normal form; idempotent and homology-preserving.
    pub fn normalize(&self, c: &CurveExpr) -> CurveExpr {
        let (w, base) = self.flat_normal(c);
        to_expr(&w, &base)
    }

    /// A name for the normalized curve when it is a registered defined curve.
    pub fn recognize(&self, c: &CurveExpr) -> CurveExpr {
        let n = self.normalize(c);
        if n.is_plain() {
            return n;
        }
        for info in self.atlas.curves() {
            if info.definition.is_some() && self.normalize(&CurveExpr::named(&info.name)) == n {
                return CurveExpr::named(&info.name);
            }
        }
        n
    }

    fn strands(&self) -> usize {
        2 * self.atlas.surface.genus + 2
    }

    fn chain_index(&self, name: &str) -> Option<usize> {
        match self.atlas.get(name)?.kind {
            Kind::Chain(i) => Some(i),
            _ => None,
        }
    }

    fn chain_form(&self, w: &Flat, base: &str) -> Option<(Vec<(usize, i32)>, usize)> {
        let conj: Option<Vec<(usize, i32)>> = w.iter().map(|(n, e)| self.chain_index(n).map(|i| (i, *e))).collect();
        Some((conj?, self.chain_index(base)?))
    }

    fn same_class(&self, x: &Class, y: &Class) -> bool {
        x == y || x.iter().zip(y).all(|(a, b)| *a == -*b)
    }

    /// Compare two curves, returning the strongest certificate available.
    pub fn curve_equal(&self, c1: &CurveExpr, c2: &CurveExpr) -> Equality {
        let (k1, k2) = match (c1.class(self.atlas), c2.class(self.atlas)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Equality { tier: Tier::Distinct, witness: None },
        };
        if !self.same_class(&k1, &k2) {
            return Equality { tier: Tier::Distinct, witness: Some((k1, k2)) };
        }
        let n1 = self.flat_normal(c1);
        let n2 = self.flat_normal(c2);
        if n1 == n2 {
            return Equality { tier: Tier::Syntactic, witness: None };
        }
        if let (Some(a), Some(b)) = (self.chain_form(&n1.0, &n1.1), self.chain_form(&n2.0, &n2.1)) {
            let s = self.strands();
            if ArtinAut::of_word(s, &conjugate_word(&a.0, a.1)) == ArtinAut::of_word(s, &conjugate_word(&b.0, b.1)) {
                return Equality { tier: Tier::Rewritten, witness: None };
            }
        }
        if self.search(&n1, &n2) || self.search(&n2, &n1) {
            return Equality { tier: Tier::Rewritten, witness: None };
        }
        Equality { tier: Tier::HomologyOnly, witness: None }
    }

    pub fn letters_equal(&self, l1: &TwistLetter, l2: &TwistLetter) -> Equality {
        if l1.exp != l2.exp {
            let k1 = l1.curve.class(self.atlas).unwrap_or_default();
            let k2 = l2.curve.class(self.atlas).unwrap_or_default();
            return Equality { tier: Tier::Distinct, witness: Some((k1, k2)) };
        }
        self.curve_equal(&l1.curve, &l2.curve)
    }

    /// Breadth-limited search over commutation and braid moves in the conjugator.
    fn search(&self, from: &(Flat, String), to: &(Flat, String)) -> bool {
        const MAX_STATES: usize = 20_000;
        let mut seen: HashSet<Flat> = HashSet::new();
        let mut queue: VecDeque<(Flat, usize)> = VecDeque::new();
        seen.insert(from.0.clone());
        queue.push_back((from.0.clone(), 0));
        while let Some((w, d)) = queue.pop_front() {
            if d >= self.depth {
                continue;
            }
            for next in self.neighbours(&w) {
                if seen.contains(&next) {
                    continue;
                }
                let (mut nw, mut nb) = (next.clone(), from.1.clone());
                self.simplify(&mut nw, &mut nb);
                if nw == to.0 && nb == to.1 {
                    return true;
                }
                if seen.len() >= MAX_STATES {
                    return false;
                }
                seen.insert(next.clone());
                queue.push_back((next, d + 1));
            }
        }
        false
    }

    fn neighbours(&self, w: &Flat) -> Vec<Flat> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            let (a, b) = (&w[i], &w[i + 1]);
            if a.0 != b.0 && self.atlas.disjoint(&a.0, &b.0) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                out.push(v);
            }
            if i + 2 < w.len() {
                let c = &w[i + 2];
                if a == c && a.1 == b.1 && self.atlas.intersection(&a.0, &b.0) == Some(1) {
                    let mut v = w.clone();
                    v[i] = b.clone();
                    v[i + 1] = a.clone();
                    v[i + 2] = b.clone();
                    out.push(v);
                }
            }
        }
        out
    }
}

fn to_expr(w: &Flat, base: &str) -> CurveExpr {
    CurveExpr::image(w.iter().map(|(n, e)| TwistLetter::named_exp(n, *e)).collect(), base)
}
