//! Hurwitz moves, slides, cyclic permutation, global conjugation and the
//! homology-level boundary check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{Equality, Normalizer, Tier};
use crate::word::{inverse_word, word_action, CurveExpr, Factorization, Target, TwistLetter, TwistWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

/// Which letters keep their curves during a slide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keep {
    Block,
    Passed,
}

/// `w(letter)` with the conjugator normalized (and named back when it is a defined curve).
pub fn push_letter(nz: &Normalizer, l: &TwistLetter, w: &[TwistLetter]) -> TwistLetter {
    if w.is_empty() {
        return l.clone();
    }
    TwistLetter::new(nz.recognize(&l.curve.push(w)), l.exp)
}

fn check_pair(f: &Factorization, k: usize) -> Result<()> {
    if k + 1 >= f.len() {
        return Err(Error::IndexOutOfRange { index: k, len: f.len() });
    }
    Ok(())
}

/// Elementary move on the pair at positions (k, k+1).
///
/// Left: (t_a, t_b) ↦ (t_b, t_{t_b^{-1}(a)}); Right is its inverse, (t_a, t_b) ↦ (t_{t_a(b)}, t_a).
pub fn hurwitz_move(f: &Factorization, k: usize, dir: Direction) -> Result<Factorization> {
    check_pair(f, k)?;
    let nz = Normalizer::new(&f.atlas);
    let (a, b) = (&f.letters[k], &f.letters[k + 1]);
    let (x, y) = match dir {
        Direction::Left => (b.clone(), push_letter(&nz, a, &[b.inverse()])),
        Direction::Right => (push_letter(&nz, b, std::slice::from_ref(a)), a.clone()),
    };
    let mut letters = f.letters.clone();
    letters[k] = x;
    letters[k + 1] = y;
    Ok(f.with_letters(letters))
}

/// Rotate the word so that it starts at position `k`.
pub fn cyclic_permute(f: &Factorization, k: usize) -> Result<Factorization> {
    if f.is_empty() {
        return Ok(f.clone());
    }
    let k = k % f.len();
    if !f.target.is_central() {
        // conjugating by the rotated letters must fix the target
        let target = f.target.word();
        let fixes = f.letters[..k].iter().all(|l| {
            l.curve.is_plain()
                && target.iter().all(|t| t.curve.is_plain() && f.atlas.disjoint(&l.curve.base, &t.curve.base))
        });
        if !fixes {
            return Err(Error::NonCentralTarget);
        }
    }
    let mut letters = f.letters.clone();
    letters.rotate_left(k);
    Ok(f.with_letters(letters))
}

/// Replace every letter by its image under `w`; word targets are transported too.
pub fn global_conjugate(f: &Factorization, w: &[TwistLetter]) -> Factorization {
    let nz = Normalizer::new(&f.atlas);
    let mut out = f.with_letters(f.letters.iter().map(|l| push_letter(&nz, l, w)).collect());
    if let Target::Word(t) = &f.target {
        out.target = Target::Word(t.iter().map(|l| push_letter(&nz, l, w)).collect());
    }
    out
}

/// Image of letter `m` after sliding it to position `to`, all other letters fixed.
pub fn slide_image(nz: &Normalizer, letters: &[TwistLetter], m: usize, to: usize) -> TwistLetter {
    if to <= m {
        push_letter(nz, &letters[m], &letters[to..m])
    } else {
        push_letter(nz, &letters[m], &inverse_word(&letters[m + 1..=to]))
    }
}

/// Move the letter at `m` to position `to` (a sequence of elementary moves).
pub fn slide_letter(f: &Factorization, m: usize, to: usize) -> Result<Factorization> {
    slide_block(f, m, 1, to, Keep::Passed)
}

/// Move the block `[start, start+len)` so that it starts at `to`.
///
/// With `Keep::Passed` the passed letters are unchanged and the block letters are
/// conjugated; with `Keep::Block` the block is unchanged and the passed letters are.
pub fn slide_block(f: &Factorization, start: usize, len: usize, to: usize, keep: Keep) -> Result<Factorization> {
    let n = f.len();
    if len == 0 || start + len > n {
        return Err(Error::IndexOutOfRange { index: start + len, len: n });
    }
    if to + len > n {
        return Err(Error::IndexOutOfRange { index: to + len, len: n });
    }
    if to == start {
        return Ok(f.clone());
    }
    let nz = Normalizer::new(&f.atlas);
    let block: TwistWord = f.letters[start..start + len].to_vec();
    let (passed, left_of) = if to < start {
        (f.letters[to..start].to_vec(), true)
    } else {
        (f.letters[start + len..to + len].to_vec(), false)
    };
    // word P·B = B'·P' (moving left) or B·P = P'·B' (moving right)
    let (new_block, new_passed): (TwistWord, TwistWord) = match (keep, left_of) {
        (Keep::Passed, true) => (block.iter().map(|b| push_letter(&nz, b, &passed)).collect(), passed.clone()),
        (Keep::Passed, false) => {
            let inv = inverse_word(&passed);
            (block.iter().map(|b| push_letter(&nz, b, &inv)).collect(), passed.clone())
        }
        (Keep::Block, true) => {
            let inv = inverse_word(&block);
            (block.clone(), passed.iter().map(|p| push_letter(&nz, p, &inv)).collect())
        }
        (Keep::Block, false) => (block.clone(), passed.iter().map(|p| push_letter(&nz, p, &block)).collect()),
    };
    let mut letters = f.letters.clone();
    if left_of {
        let seg: TwistWord = new_block.into_iter().chain(new_passed).collect();
        letters.splice(to..start + len, seg);
    } else {
        let seg: TwistWord = new_passed.into_iter().chain(new_block).collect();
        letters.splice(start..to + len, seg);
    }
    Ok(f.with_letters(letters))
}

/// Outcome of [`arrange`]: the tier certifying each placed letter, in target order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangeLog {
    pub start: usize,
    pub tiers: Vec<Tier>,
}

/// Bring the segment `[start, start+want.len())` into the form `want` by slides.
///
/// Greedy from both ends: the next wanted letter on the left is found as the image
/// of some remaining letter slid to the front of the remaining segment (passed letters
/// unchanged), otherwise the last wanted letter is looked for among images slid to the back.
/// Each placement must be certified at `min` or better.
pub fn arrange(f: &Factorization, start: usize, want: &[TwistLetter], min: Tier) -> Result<(Factorization, ArrangeLog)> {
    let end = start + want.len();
    if end > f.len() {
        return Err(Error::IndexOutOfRange { index: end, len: f.len() });
    }
    let nz = Normalizer::new(&f.atlas);
    let mut rem: TwistWord = f.letters[start..end].to_vec();
    let (mut lo, mut hi) = (0, want.len());
    let mut tiers = vec![Tier::Syntactic; want.len()];
    let found = |rem: &TwistWord, m: usize, to: usize, t: &TwistLetter| {
        let img = slide_image(&nz, rem, m, to);
        let e = nz.letters_equal(&img, t);
        (e.tier >= min).then_some(e.tier)
    };
    while lo < hi {
        let left = (0..rem.len()).find_map(|m| found(&rem, m, 0, &want[lo]).map(|t| (m, t)));
        if let Some((m, t)) = left {
            rem.remove(m);
            tiers[lo] = t;
            lo += 1;
            continue;
        }
        let last = rem.len() - 1;
        let right = (0..rem.len()).rev().find_map(|m| found(&rem, m, last, &want[hi - 1]).map(|t| (m, t)));
        match right {
            Some((m, t)) => {
                rem.remove(m);
                tiers[hi - 1] = t;
                hi -= 1;
            }
            None => {
                return Err(Error::SubwordMismatch {
                    position: start + lo,
                    detail: format!("no slide of the remaining letters gives {} or {}", want[lo], want[hi - 1]),
                })
            }
        }
    }
    let mut letters = f.letters.clone();
    letters.splice(start..end, want.iter().cloned());
    let mut out = f.with_letters(letters);
    if tiers.contains(&Tier::HomologyOnly) {
        out.homology_tainted = true;
    }
    Ok((out, ArrangeLog { start, tiers }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub letters: usize,
    pub positive: bool,
    /// (M − M_target)·e_j for the first basis vector where the actions differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub boundary_parallel: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<(usize, Equality)>,
    pub homology_tainted: bool,
}

/// Check that the word acts on H1 like its target; a necessary condition only.
pub fn verify_boundary_multitwist(f: &Factorization) -> Result<VerificationReport> {
    verify_with(f, &[])
}

/// As [`verify_boundary_multitwist`], also certifying letter `k` against a given curve.
pub fn verify_with(f: &Factorization, compare: &[(usize, CurveExpr)]) -> Result<VerificationReport> {
    let m = f.homology_action()?;
    let t = word_action(&f.atlas, &f.target.word())?;
    let mut witness = None;
    for j in 0..m.cols() {
        let d: Vec<i64> = (0..m.rows()).map(|i| m[(i, j)] - t[(i, j)]).collect();
        if d.iter().any(|&v| v != 0) {
            witness = Some(d);
            break;
        }
    }
    let nz = Normalizer::new(&f.atlas);
    let mut comparisons = Vec::new();
    for (k, c) in compare {
        let l = f.letters.get(*k).ok_or(Error::IndexOutOfRange { index: *k, len: f.len() })?;
        comparisons.push((*k, nz.curve_equal(&l.curve, c)));
    }
    Ok(VerificationReport {
        pass: witness.is_none(),
        letters: f.len(),
        positive: f.is_positive(),
        witness,
        boundary_parallel: f.boundary_parallel_letters(),
        comparisons,
        homology_tainted: f.homology_tainted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Surface;

    fn word(names: &[&str]) -> TwistWord {
        names.iter().map(|n| TwistLetter::named(n)).collect()
    }

    fn chain_pencil(g: usize) -> Factorization {
        let mut w = Vec::new();
        for _ in 0..2 * g + 2 {
            for i in 1..=2 * g + 1 {
                w.push(TwistLetter::named(&format!("c{i}")));
            }
        }
        Factorization::pencil(&Surface::paired(g, 1), w).unwrap()
    }

    #[test]
    fn disjoint_letters_swap() {
        let f = Factorization::pencil(&Surface::paired(3, 1), word(&["c1", "c5"])).unwrap();
        let h = hurwitz_move(&f, 0, Direction::Left).unwrap();
        assert_eq!(h.letters, word(&["c5", "c1"]));
    }

    #[test]
    fn move_then_inverse() {
        let f = chain_pencil(3);
        for k in [0, 5, 20] {
            let h = hurwitz_move(&f, k, Direction::Left).unwrap();
            assert!(h.homology_action().unwrap().is_identity());
            assert_eq!(hurwitz_move(&h, k, Direction::Right).unwrap().letters, f.letters);
        }
    }

    #[test]
    fn four_moves_shift_a_chain_letter() {
        // t_{c_l} · t_{c_{m+3}} t_{c_{m+2}} t_{c_{m+1}} t_{c_m} ~ t_{c_{m+3}} … t_{c_m} · t_{c_{l+1}}
        let m = 2;
        for l in m..=m + 2 {
            let names: Vec<String> = std::iter::once(l).chain((m..=m + 3).rev()).map(|i| format!("c{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let f = Factorization::new(&Surface::paired(3, 1), word(&refs), Target::identity()).unwrap();
            let h = slide_letter(&f, 0, 4).unwrap();
            let nz = Normalizer::new(&h.atlas);
            let eq = nz.curve_equal(&h.letters[4].curve, &CurveExpr::named(&format!("c{}", l + 1)));
            assert!(eq.tier >= Tier::Rewritten, "l = {l}: {:?}", eq);
            assert_eq!(h.homology_action().unwrap(), f.homology_action().unwrap());
        }
    }

    #[test]
    fn cyclic_rotation() {
        let f = chain_pencil(3);
        assert_eq!(cyclic_permute(&f, 0).unwrap().letters, f.letters);
        let r = cyclic_permute(&f, 4).unwrap();
        assert_eq!(r.letters[0], f.letters[4]);
        assert!(r.homology_action().unwrap().is_identity());
        let mut w = f.clone();
        w.target = Target::Word(word(&["c2"]));
        assert!(cyclic_permute(&w, 1).is_err());
    }

    #[test]
    fn block_slides_preserve_action() {
        let f = chain_pencil(3);
        let m = f.homology_action().unwrap();
        for keep in [Keep::Block, Keep::Passed] {
            let r = slide_block(&f, 3, 4, 10, keep).unwrap();
            assert_eq!(r.homology_action().unwrap(), m);
            let l = slide_block(&f, 10, 3, 2, keep).unwrap();
            assert_eq!(l.homology_action().unwrap(), m);
        }
    }

    #[test]
    fn arrange_chain_prefix() {
        // (c1 c2 c3)^4 inside four copies of the full chain, then the shifted letters
        let g = 3;
        let f = Factorization::new(&Surface::paired(g, 1), chain_pencil(g).letters[..4 * 7].to_vec(), Target::identity()).unwrap();
        let mut want: TwistWord = (0..4).flat_map(|_| word(&["c1", "c2", "c3"])).collect();
        for _ in 0..2 * g - 2 {
            want.extend(word(&["c3", "c2", "c1"]));
        }
        want.extend((4..=2 * g + 1).map(|j| TwistLetter::named(&format!("d{j}"))));
        let (h, log) = arrange(&f, 0, &want, Tier::Rewritten).unwrap();
        assert_eq!(h.letters, want);
        assert!(log.tiers.iter().all(|&t| t >= Tier::Rewritten));
        assert_eq!(h.homology_action().unwrap(), f.homology_action().unwrap());
        assert!(arrange(&f, 0, &word(&["c1"; 28]), Tier::Rewritten).is_err());
    }

    #[test]
    fn deleted_letter_fails_with_witness() {
        let mut f = chain_pencil(3);
        assert!(verify_boundary_multitwist(&f).unwrap().pass);
        f.letters.remove(0);
        let r = verify_boundary_multitwist(&f).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
    }
}
