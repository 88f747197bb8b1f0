//! Invariants of the total space: e, σ (Meyer cocycle), H1, b±, spin, Kodaira dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cokernel_invariants, Matrix};
use crate::scalar::Scalar;
use crate::spin::spin_of;
use crate::surface::Surface;
use crate::word::{Factorization, Target};

pub fn euler(f: &Factorization) -> i64 {
    4 - 4 * f.surface().genus as i64 + f.len() as i64 - f.base_points() as i64
}

/// e(X) − e(X') and σ(X) − σ(X') for one C_{2h+1} unchaining, as (Δe, Δσ) = (e' − e, σ' − σ).
pub fn unchain_delta(h: usize) -> (i64, i64) {
    let h = h as i64;
    (-2 * h * (2 * h + 3), 2 * h * (h + 2))
}

fn closed_j<T: Scalar>(g: usize) -> Matrix<T> {
    Surface::closed(g).pairing_matrix().map(|&v| T::from_i64(v))
}

fn is_symplectic(a: &Matrix<i64>, j: &Matrix<i64>) -> bool {
    a.rows() == j.rows() && a.cols() == j.cols() && a.transpose().mul(j).mul(a) == *j
}

/// Meyer's cocycle over any field-like scalar: the signature of
/// ((x, y), (x', y')) ↦ (x + y)ᵀ J (I − B) y' on
/// V = {(x, y) : (A⁻¹ − I)x + (B − I)y = 0}.
pub fn meyer_cocycle_in<T: Scalar>(a_inv: &Matrix<T>, b: &Matrix<T>, j: &Matrix<T>) -> i64 {
    let n = b.rows();
    let id = Matrix::<T>::identity(n);
    let v = a_inv.sub(&id).hstack(&b.sub(&id)).nullspace();
    if v.is_empty() {
        return 0;
    }
    let jb = j.mul(&id.sub(b));
    let sums: Vec<Vec<T>> = v.iter().map(|w| (0..n).map(|k| w[k].clone() + w[n + k].clone()).collect()).collect();
    let images: Vec<Vec<T>> = v.iter().map(|w| jb.mul_vec(&w[n..])).collect();
    let m = v.len();
    let two = T::one() + T::one();
    let mut gram = Matrix::zeros(m, m);
    for r in 0..m {
        for c in r..m {
            let dot = |x: &[T], y: &[T]| x.iter().zip(y).fold(T::zero(), |acc, (p, q)| acc + p.clone() * q.clone());
            let s = (dot(&sums[r], &images[c]) + dot(&sums[c], &images[r])) / two.clone();
            gram[(r, c)] = s.clone();
            gram[(c, r)] = s;
        }
    }
    gram.symmetric_signature()
}

type Big = Ratio<BigInt>;

fn to_big(m: &Matrix<i64>) -> Matrix<BigInt> {
    m.map(|&v| BigInt::from(v))
}

/// A⁻¹ = −J Aᵀ J for symplectic A.
fn symplectic_inverse(a: &Matrix<BigInt>, j: &Matrix<BigInt>) -> Matrix<BigInt> {
    j.mul(&a.transpose()).mul(j).map(|v| -v.clone())
}

fn tau_exact(a: &Matrix<BigInt>, b: &Matrix<BigInt>, j: &Matrix<BigInt>) -> i64 {
    let a_inv = symplectic_inverse(a, j).map(|v| Big::from_integer(v.clone()));
    let b = b.map(|v| Big::from_integer(v.clone()));
    meyer_cocycle_in(&a_inv, &b, &j.map(|v| Big::from_integer(v.clone())))
}

/// τ(A, B) for integral symplectic matrices in the basis a_1, b_1, …, a_g, b_g.
pub fn meyer_cocycle(a: &Matrix<i64>, b: &Matrix<i64>) -> Result<i64> {
    if a.rows() % 2 != 0 {
        return Err(Error::NotSymplectic);
    }
    let j = Surface::closed(a.rows() / 2).pairing_matrix();
    if !is_symplectic(a, &j) || !is_symplectic(b, &j) {
        return Err(Error::NotSymplectic);
    }
    Ok(tau_exact(&to_big(a), &to_big(b), &to_big(&j)))
}

/// Closed-surface matrices of the letters, rightmost acting first.
fn closed_matrices(f: &Factorization) -> Result<Vec<Matrix<i64>>> {
    let s = f.surface();
    let closed = Surface::closed(s.genus);
    (0..f.len())
        .map(|k| {
            let c = s.cap_boundaries(&f.letter_class(k)?);
            Ok(closed.transvection_matrix(&c, f.letters[k].exp as i64))
        })
        .collect()
}

/// Σ_{k=1}^{l−1} τ(W_k, M_{k+1}) with W_k the product of the first k letters.
pub fn meyer_sum(f: &Factorization) -> Result<i64> {
    let g = f.surface().genus;
    let j = to_big(&Surface::closed(g).pairing_matrix());
    let ms: Vec<Matrix<BigInt>> = closed_matrices(f)?.iter().map(to_big).collect();
    let Some(first) = ms.first() else { return Ok(0) };
    let mut w = first.clone();
    let mut total = 0;
    for m in &ms[1..] {
        total += tau_exact(&w, m, &j);
        w = w.mul(m);
    }
    if !w.map(|v| Big::from_integer(v.clone())).is_identity() {
        return Err(Error::Relator("the word is not trivial in the closed surface's homology".into()));
    }
    Ok(total)
}

/// Letters whose curves separate the closed fibre (and are not boundary parallel).
pub fn count_reducible(f: &Factorization) -> Result<usize> {
    let s = f.surface();
    let mut n = 0;
    for k in 0..f.len() {
        let base = &f.letters[k].curve.base;
        if f.atlas.is_boundary_parallel(base) {
            continue;
        }
        if s.cap_boundaries(&f.letter_class(k)?).iter().all(Zero::is_zero) {
            n += 1;
        }
    }
    Ok(n)
}

/// Global sign ε and separating local term s_sep in σ = ε Σ τ + s_sep · #separating.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub epsilon: i64,
    pub s_sep: i64,
    /// (anchor, Meyer sum, separating letters, required σ)
    pub anchors: Vec<(String, i64, usize, i64)>,
}

impl Calibration {
    /// Fix ε from a word without separating letters and s_sep from one with them.
    pub fn fit(plain: (&str, &Factorization, i64), separating: (&str, &Factorization, i64)) -> Result<Calibration> {
        let (n1, f1, s1) = plain;
        let (n2, f2, s2) = separating;
        let (m1, r1) = (meyer_sum(f1)?, count_reducible(f1)?);
        let (m2, r2) = (meyer_sum(f2)?, count_reducible(f2)?);
        if r1 != 0 || r2 == 0 || m1 == 0 {
            return Err(Error::Range("calibration anchors have the wrong shape".into()));
        }
        let epsilon = s1 / m1;
        if epsilon.abs() != 1 || epsilon * m1 != s1 {
            return Err(Error::Range(format!("{n1}: Meyer sum {m1} cannot give σ = {s1} up to sign")));
        }
        let rest = s2 - epsilon * m2;
        if rest % r2 as i64 != 0 {
            return Err(Error::Range(format!("{n2}: remainder {rest} is not a multiple of {r2}")));
        }
        Ok(Calibration {
            epsilon,
            s_sep: rest / r2 as i64,
            anchors: vec![(n1.into(), m1, r1, s1), (n2.into(), m2, r2, s2)],
        })
    }
}

static CALIBRATION: OnceLock<Calibration> = OnceLock::new();

/// Anchored on σ(Z_3) = −32 and σ(X_1) = −19 (one separating letter).
pub fn calibration() -> Result<&'static Calibration> {
    if let Some(c) = CALIBRATION.get() {
        return Ok(c);
    }
    let z3 = crate::catalog::build_chain_pencil(3)?.fibration()?;
    let x1 = crate::catalog::build_exotic(1)?;
    let c = Calibration::fit(("Z_3", &z3, -32), ("X_1", &x1, -19))?;
    Ok(CALIBRATION.get_or_init(|| c))
}

pub fn signature_with(f: &Factorization, cal: &Calibration) -> Result<i64> {
    let sep = count_reducible(f)? as i64;
    Ok(cal.epsilon * meyer_sum(f)? + cal.s_sep * sep + f.base_points() as i64)
}

/// σ of the total space; a pencil's p base points are blown down.
pub fn signature(f: &Factorization) -> Result<i64> {
    signature_with(f, calibration()?)
}

/// Invariant factors of H1(X) = H1(Σ_g) / ⟨vanishing cycles⟩; 0 marks a free summand.
pub fn h1_total_space(f: &Factorization) -> Result<Vec<i64>> {
    let s = f.surface();
    let n = 2 * s.genus;
    let cols: Vec<Vec<i64>> = (0..f.len()).map(|k| Ok(s.cap_boundaries(&f.letter_class(k)?))).collect::<Result<_>>()?;
    if cols.is_empty() {
        return Ok(vec![0; n]);
    }
    Ok(cokernel_invariants(&Matrix::from_columns(&cols, n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kodaira {
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kodaira::NegInf => "-inf",
            Kodaira::Zero => "0",
            Kodaira::One => "1",
            Kodaira::Two => "2",
            Kodaira::Undetermined => "undetermined",
        })
    }
}

/// κ from a lift to Γ_g^n of the boundary multi-twist; only the three decided cases.
pub fn kodaira(g: usize, n: usize, b_plus: i64) -> Result<Kodaira> {
    if g < 2 {
        return Err(Error::Range(format!("genus {g} < 2")));
    }
    Ok(if n > 2 * g - 2 {
        Kodaira::NegInf
    } else if n == 2 * g - 2 && b_plus != 1 {
        Kodaira::Zero
    } else if n + 3 == 2 * g && b_plus > 3 {
        Kodaira::One
    } else {
        Kodaira::Undetermined
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantReport {
    pub euler: i64,
    pub signature: i64,
    pub h1_invariant_factors: Vec<i64>,
    pub b1: i64,
    pub b_plus: i64,
    pub b_minus: i64,
    pub spin: bool,
    pub kodaira: Kodaira,
    pub reducible_count: usize,
    pub letters: usize,
    pub base_points: usize,
    pub taint: Vec<String>,
    pub calibration: BTreeMap<String, i64>,
}

pub fn b_plus_minus(euler: i64, signature: i64, b1: i64) -> Result<(i64, i64)> {
    let b2 = euler - 2 + 2 * b1;
    if (b2 + signature) % 2 != 0 {
        return Err(Error::Range(format!("b2 = {b2} and σ = {signature} have different parity")));
    }
    Ok(((b2 + signature) / 2, (b2 - signature) / 2))
}

pub fn report(f: &Factorization) -> Result<InvariantReport> {
    let cal = calibration()?;
    let e = euler(f);
    let sigma = signature_with(f, cal)?;
    let h1 = h1_total_space(f)?;
    let b1 = h1.iter().filter(|&&d| d == 0).count() as i64;
    let (b_plus, b_minus) = b_plus_minus(e, sigma, b1)?;
    if let Target::Word(_) = f.target {
        return Err(Error::NotPencil("invariants need a boundary multi-twist target".into()));
    }
    let spin = spin_of(f)?.spin;
    let n = f.sections.iter().filter(|s| s.multiplicity == 1 && s.self_intersection == -1).count();
    let g = f.surface().genus;
    let kodaira = if g >= 2 { kodaira(g, n, b_plus)? } else { Kodaira::Undetermined };
    let mut taint = Vec::new();
    if f.homology_tainted {
        taint.push("homology_only".to_string());
    }
    Ok(InvariantReport {
        euler: e,
        signature: sigma,
        h1_invariant_factors: h1,
        b1,
        b_plus,
        b_minus,
        spin,
        kodaira,
        reducible_count: count_reducible(f)?,
        letters: f.len(),
        base_points: f.base_points(),
        taint,
        calibration: [("epsilon".to_string(), cal.epsilon), ("s_sep".to_string(), cal.s_sep)].into(),
    })
}

/// Ratio<BigInt> is the reference scalar; f64 is accepted for quick estimates.
pub fn meyer_cocycle_f64(a: &Matrix<i64>, b: &Matrix<i64>) -> Result<i64> {
    let g = a.rows() / 2;
    let j = Surface::closed(g).pairing_matrix();
    if !is_symplectic(a, &j) || !is_symplectic(b, &j) {
        return Err(Error::NotSymplectic);
    }
    let a_inv = symplectic_inverse(&to_big(a), &to_big(&j)).map(|v| v.to_string().parse::<f64>().unwrap_or(f64::NAN));
    Ok(meyer_cocycle_in(&a_inv, &b.map(|&v| v as f64), &closed_j::<f64>(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_chain_pencil, build_exotic, build_xprime};

    fn t(s: &Surface, c: &[i64]) -> Matrix<i64> {
        s.transvection_matrix(c, 1)
    }

    #[test]
    fn cocycle_normalization() {
        let s = Surface::closed(2);
        let a = t(&s, &s.a(1)).mul(&t(&s, &s.b(2)));
        let b = t(&s, &s.b(1));
        assert_eq!(meyer_cocycle(&Matrix::identity(4), &b).unwrap(), 0);
        let a_inv = symplectic_inverse(&to_big(&a), &to_big(&s.pairing_matrix()));
        let a_inv: Matrix<i64> = a_inv.map(|v| v.to_string().parse().unwrap());
        assert_eq!(meyer_cocycle(&a, &a_inv).unwrap(), 0);
        assert!(meyer_cocycle(&a.add(&Matrix::identity(4)), &b).is_err());
        assert_eq!(meyer_cocycle_f64(&a, &b).unwrap(), meyer_cocycle(&a, &b).unwrap());
    }

    #[test]
    fn calibrated_anchors() {
        let cal = calibration().unwrap();
        assert_eq!(cal.epsilon.abs(), 1);
        assert_eq!(signature(&build_chain_pencil(3).unwrap().fibration().unwrap()).unwrap(), -32);
        assert_eq!(signature(&build_exotic(1).unwrap()).unwrap(), -19);
    }

    #[test]
    fn xprime_values() {
        for (g, i) in [(3, 0), (3, 1), (4, 2), (3, 3)] {
            let f = build_xprime(g, i).unwrap();
            assert_eq!(euler(&f), 12 * (g as i64 - i as i64));
            assert_eq!(signature(&f).unwrap(), -8 * (g as i64 - i as i64), "X'_{g}({i})");
        }
    }

    #[test]
    fn kodaira_cases() {
        assert_eq!(kodaira(5, 10, 1).unwrap(), Kodaira::NegInf);
        assert_eq!(kodaira(5, 8, 3).unwrap(), Kodaira::Zero);
        assert_eq!(kodaira(5, 8, 1).unwrap(), Kodaira::Undetermined);
        assert_eq!(kodaira(5, 7, 5).unwrap(), Kodaira::One);
        assert_eq!(kodaira(5, 6, 5).unwrap(), Kodaira::Undetermined);
        assert!(kodaira(1, 0, 0).is_err());
        assert_eq!(unchain_delta(1), (-10, 6));
    }
}
