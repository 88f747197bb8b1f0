//! Factorization families, the shipped derivation scripts, and expected values.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::script::{Resolver, Script};
use crate::surface::Surface;
use crate::template::Env;
use crate::word::{Factorization, Target, TwistLetter, TwistWord};

const SCRIPTS: &[(&str, &str)] = &[
    ("lem1-1", include_str!("../catalog/scripts/lem1-1.json")),
    ("lem1-2", include_str!("../catalog/scripts/lem1-2.json")),
    ("lem1-3", include_str!("../catalog/scripts/lem1-3.json")),
    ("prop41", include_str!("../catalog/scripts/prop41.json")),
    ("lem2", include_str!("../catalog/scripts/lem2.json")),
    ("thm3", include_str!("../catalog/scripts/thm3.json")),
    ("sevenLS", include_str!("../catalog/scripts/sevenLS.json")),
    ("exotic", include_str!("../catalog/scripts/exotic.json")),
    ("lemA", include_str!("../catalog/scripts/lemA.json")),
    ("y1", include_str!("../catalog/scripts/y1.json")),
    ("y2", include_str!("../catalog/scripts/y2.json")),
    ("stipsicz", include_str!("../catalog/scripts/stipsicz.json")),
];

pub fn script_names() -> Vec<&'static str> {
    SCRIPTS.iter().map(|(n, _)| *n).collect()
}

pub fn script(name: &str) -> Result<Script> {
    let (_, src) = SCRIPTS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Unknown { what: "script", name: name.into() })?;
    Script::from_json(src)
}

fn t(name: &str) -> TwistLetter {
    TwistLetter::named(name)
}

fn c(j: usize) -> TwistLetter {
    t(&format!("c{j}"))
}

fn power(w: &[TwistLetter], k: usize) -> TwistWord {
    (0..k).flat_map(|_| w.iter().cloned()).collect()
}

/// c_from c_{from+1} … c_to
fn chain(from: usize, to: usize) -> TwistWord {
    (from..=to).map(c).collect()
}

fn check_genus(g: usize) -> Result<()> {
    if g < 3 {
        return Err(Error::Range(format!("genus {g} < 3")));
    }
    Ok(())
}

/// Largest allowed i for genus g.
pub fn max_i(g: usize) -> usize {
    if g % 2 == 1 {
        g
    } else {
        g - 1
    }
}

fn check_i(g: usize, i: usize) -> Result<()> {
    check_genus(g)?;
    if i > max_i(g) {
        return Err(Error::Range(format!("i = {i} exceeds {} for g = {g}", max_i(g))));
    }
    Ok(())
}

/// On Σ_g^2 a pencil; on Σ_g^{2n}, n > 1, the word target t_{z_1} t_{z'_1}.
fn over_pairs(g: usize, n: usize, letters: TwistWord) -> Result<Factorization> {
    let s = Surface::paired(g, n);
    if n == 1 {
        Factorization::pencil(&s, letters)
    } else {
        Factorization::new(&s, letters, Target::Word(vec![t("z1"), t("z'1")]))
    }
}

/// (t_{c_1} ⋯ t_{c_{2g+1}})^{2g+2}; Z'_g when n = 1.
pub fn chain_word(g: usize) -> TwistWord {
    power(&chain(1, 2 * g + 1), 2 * g + 2)
}

pub fn build_chain_pencil(g: usize) -> Result<Factorization> {
    if g == 0 {
        return Err(Error::Range("genus 0".into()));
    }
    over_pairs(g, 1, chain_word(g))
}

/// D_g E_g = t_{d_4} ⋯ t_{d_{2g+1}} t_{e_{2g+1}} ⋯ t_{e_4}
fn d_e(g: usize) -> TwistWord {
    let mut w: TwistWord = (4..=2 * g + 1).map(|j| t(&format!("d{j}"))).collect();
    w.extend((4..=2 * g + 1).rev().map(|j| t(&format!("e{j}"))));
    w
}

/// The c_1 c_2 c_3 part followed by D_g E_g, with `m` triples (g odd) or
/// m − 2 triples and (c_3 c_2 c_1)^2 (g even).
fn core_word(g: usize, m: usize) -> TwistWord {
    let mut w = if g % 2 == 1 {
        power(&chain(1, 3), m)
    } else {
        let mut w = power(&chain(1, 3), m - 2);
        w.extend(power(&[c(3), c(2), c(1)], 2));
        w
    };
    w.extend(d_e(g));
    w
}

pub fn prop41_word(g: usize) -> TwistWord {
    let mut w = core_word(g, 4 * g);
    w.extend(power(&chain(5, 2 * g + 1), 2 * g - 2));
    w
}

pub fn build_prop41(g: usize, n: usize) -> Result<Factorization> {
    check_genus(g)?;
    over_pairs(g, n, prop41_word(g))
}

pub fn lem2_word(g: usize, i: usize) -> TwistWord {
    let mut w = vec![t("b")];
    w.extend(std::iter::repeat_n(t("a"), i));
    w.push(t("b'"));
    w.extend(std::iter::repeat_n(t("a'"), i));
    w.extend(core_word(g, 4 * (g - i)));
    w
}

pub fn build_lem2(g: usize, i: usize, n: usize) -> Result<Factorization> {
    check_i(g, i)?;
    over_pairs(g, n, lem2_word(g, i))
}

/// X'_g(i) on Σ_g^{2(i+1)}.
pub fn build_xprime(g: usize, i: usize) -> Result<Factorization> {
    check_i(g, i)?;
    let n = i + 1;
    let mut w: TwistWord = (1..=n).rev().map(|k| t(&format!("x{k}"))).collect();
    w.extend((1..=n).rev().map(|k| t(&format!("x'{k}"))));
    w.extend(core_word(g, 4 * (g - i)));
    Factorization::pencil(&Surface::paired(g, n), w)
}

pub fn build_kg(g: usize) -> Result<Factorization> {
    build_xprime(g, g - 2)
}

/// The genus-3 fibration X_3(1) written with a, a' for the capped section curves.
pub fn exotic0_word() -> TwistWord {
    let mut w = vec![t("a"), t("a"), t("a'"), t("a'")];
    w.extend(core_word(3, 8));
    w
}

pub fn build_exotic0() -> Result<Factorization> {
    Factorization::new(&Surface::closed(3), exotic0_word(), Target::identity())
}

/// The result of a derivation script, or an error when its replay fails.
pub fn replayed(name: &str, params: &Env) -> Result<Factorization> {
    let d = script(name)?.replay(params, &Catalog)?;
    if !d.pass {
        return Err(Error::Range(format!("{name} derivation failed: {}", d.failure.unwrap_or_default())));
    }
    Ok(d.result)
}

pub fn build_stipsicz(g: usize) -> Result<Factorization> {
    replayed("stipsicz", &env(&[("g", g as i64)]))
}

/// Y^j_g(i), j = 1, 2.
pub fn build_inequivalent(g: usize, i: usize, j: usize) -> Result<Factorization> {
    if !(1..=2).contains(&j) {
        return Err(Error::Range(format!("j = {j} is not 1 or 2")));
    }
    replayed(&format!("y{j}"), &env(&[("g", g as i64), ("i", i as i64)]))
}

static EXOTIC: OnceLock<BTreeMap<String, Factorization>> = OnceLock::new();

/// X_k, k = 0..7: the fibration after k of the seven lantern substitutions.
pub fn build_exotic(k: usize) -> Result<Factorization> {
    if k > 7 {
        return Err(Error::Range(format!("k = {k} exceeds 7")));
    }
    let stages = match EXOTIC.get() {
        Some(s) => s,
        None => {
            let d = script("exotic")?.replay(&Env::new(), &Catalog)?;
            if !d.pass {
                return Err(Error::Range(format!("exotic derivation failed: {}", d.failure.unwrap_or_default())));
            }
            EXOTIC.get_or_init(|| d.checkpoints)
        }
    };
    stages
        .get(&format!("X{k}"))
        .cloned()
        .ok_or_else(|| Error::Unknown { what: "checkpoint", name: format!("X{k}") })
}

fn param(p: &Env, k: &str) -> Result<usize> {
    let v = *p.get(k).ok_or_else(|| Error::Range(format!("missing parameter {k}")))?;
    usize::try_from(v).map_err(|_| Error::Range(format!("{k} = {v} is negative")))
}

fn param_or(p: &Env, k: &str, default: usize) -> Result<usize> {
    if p.contains_key(k) {
        param(p, k)
    } else {
        Ok(default)
    }
}

pub const FAMILIES: &[&str] = &["chain", "prop41", "lem2", "xprime", "kg", "xg", "exotic0", "exotic", "stipsicz", "inequivalent", "lemA"];

/// Build a family member from named parameters.
pub fn build(family: &str, p: &Env) -> Result<Factorization> {
    match family {
        "chain" | "zprime" => {
            let g = param(p, "g")?;
            let n = param_or(p, "n", 1)?;
            over_pairs(g, n, chain_word(g))
        }
        "z" => build_chain_pencil(param(p, "g")?)?.fibration(),
        "prop41" => build_prop41(param(p, "g")?, param_or(p, "n", 1)?),
        "lem2" => build_lem2(param(p, "g")?, param(p, "i")?, param_or(p, "n", 1)?),
        "xprime" => build_xprime(param(p, "g")?, param(p, "i")?),
        "xg" => build_xprime(param(p, "g")?, param(p, "i")?)?.fibration(),
        "kg" => build_kg(param(p, "g")?),
        "exotic0" => build_exotic0(),
        "exotic" => build_exotic(param_or(p, "k", 0)?),
        "stipsicz" => build_stipsicz(param(p, "g")?),
        "inequivalent" => build_inequivalent(param(p, "g")?, param(p, "i")?, param(p, "j")?),
        "lemA" => replayed("lemA", p),
        _ => Err(Error::Unknown { what: "family", name: family.into() }),
    }
}

/// Resolver backed by the embedded catalog.
pub struct Catalog;

impl Resolver for Catalog {
    fn family(&self, name: &str, params: &Env) -> Result<Factorization> {
        build(name, params)
    }

    fn script(&self, name: &str) -> Result<Script> {
        script(name)
    }
}

pub fn env(pairs: &[(&str, i64)]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::verify_boundary_multitwist;

    #[test]
    fn letter_counts() {
        for g in 3..=6 {
            assert_eq!(build_chain_pencil(g).unwrap().len(), (2 * g + 1) * (2 * g + 2));
            assert_eq!(build_prop41(g, 1).unwrap().len(), (2 * g + 1) * (2 * g + 2));
            for i in 0..=max_i(g) {
                assert_eq!(build_xprime(g, i).unwrap().len(), 16 * g - 10 * i - 2);
            }
        }
        assert!(build_xprime(4, 4).is_err());
        assert_eq!(build_xprime(3, 1).unwrap().surface().boundary_count(), 4);
    }

    #[test]
    fn builders_verify() {
        for g in 3..=5 {
            assert!(verify_boundary_multitwist(&build_prop41(g, 1).unwrap()).unwrap().pass);
            for i in 0..=max_i(g) {
                assert!(verify_boundary_multitwist(&build_lem2(g, i, 1).unwrap()).unwrap().pass, "lem2 {g} {i}");
                assert!(verify_boundary_multitwist(&build_xprime(g, i).unwrap()).unwrap().pass, "xprime {g} {i}");
            }
        }
    }

    #[test]
    fn small_replays() {
        for name in ["lem1-3", "lem1-1", "lem1-2"] {
            let d = script(name).unwrap().replay(&env(&[("g", 3)]), &Catalog).unwrap();
            assert!(d.pass, "{name}: {:?}", d.failure);
        }
    }

    #[test]
    fn lift_replays() {
        let mut cases = Vec::new();
        for i in 0..=3 {
            cases.push(("thm3", env(&[("g", 3), ("i", i)])));
        }
        for (name, p) in cases {
            let d = script(name).unwrap().replay(&p, &Catalog);
            let d = d.unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(d.pass, "{name}: {:?}", d.failure);
        }
    }

    #[test]
    fn exotic_stages() {
        for k in 0..=7 {
            let f = build_exotic(k).unwrap();
            assert_eq!(f.len(), 36 - k);
            assert!(f.is_positive());
        }
        assert!(build_exotic(8).is_err());
        let d = script("sevenLS").unwrap().replay(&Env::new(), &Catalog).unwrap();
        assert!(d.pass);
        assert_eq!(d.substitutions(crate::relator::RelatorKind::Lantern), 7);
    }

    #[test]
    fn exotic0_is_capped_xg() {
        let x = build_exotic0().unwrap();
        let y = build("xg", &env(&[("g", 3), ("i", 1)])).unwrap();
        assert_eq!(x.len(), y.len());
        for k in 0..x.len() {
            let (a, b) = (x.letter_class(k).unwrap(), y.letter_class(k).unwrap());
            let neg: Vec<i64> = b.iter().map(|v| -v).collect();
            assert!(a == b || a == neg, "letter {k}");
        }
    }

    #[test]
    fn unchained_families() {
        for g in [3, 4] {
            for i in 0..g {
                for j in [1, 2] {
                    let f = build_inequivalent(g, i, j).unwrap();
                    assert_eq!(f.len(), 16 * g - 10 * i - 3);
                    assert!(verify_boundary_multitwist(&f).unwrap().pass);
                    let sep = f.letters.iter().filter(|l| f.atlas.is_separating(&l.curve.base).unwrap()).count();
                    assert_eq!(sep, 2 - j, "Y^{j}_{g}({i})");
                }
            }
        }
        for g in 4..=6 {
            let f = build_stipsicz(g).unwrap();
            let base = build_xprime(g, g % 2).unwrap();
            assert_eq!(f.len(), base.len() - 1 - g % 2);
            assert_eq!(f.base_points(), 0);
        }
        assert!(build_stipsicz(3).is_err());
        assert!(build_inequivalent(3, 0, 3).is_err());
    }

    #[test]
    fn scripts_parse() {
        for n in script_names() {
            script(n).unwrap();
        }
    }
}
