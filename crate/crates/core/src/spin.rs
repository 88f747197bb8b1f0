//! Quadratic forms on H1(Σ_g^p; Z/2) and the spin criteria for pencils and fibrations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::surface::{Class, Surface};
use crate::word::{Factorization, Target};

fn mod2(x: &[i64]) -> Vec<u8> {
    x.iter().map(|v| v.rem_euclid(2) as u8).collect()
}

/// ⟨x, y⟩ mod 2 for all basis pairs.
fn pairing_mod2(s: &Surface) -> Vec<Vec<u8>> {
    let j = s.pairing_matrix();
    (0..j.rows()).map(|r| j.row(r).iter().map(|v| v.rem_euclid(2) as u8).collect()).collect()
}

/// Σ_{i<j} x_i x_j ⟨e_i, e_j⟩ mod 2.
fn cross_term(j: &[Vec<u8>], x: &[u8]) -> u8 {
    let mut t = 0;
    for a in 0..x.len() {
        if x[a] == 0 {
            continue;
        }
        for b in a + 1..x.len() {
            t ^= x[b] & j[a][b];
        }
    }
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub surface: Surface,
    /// q(e_i) on the basis a_1, b_1, …, a_g, b_g, δ_1, …, δ_{p-1}.
    pub basis_values: Vec<u8>,
}

impl QuadraticForm {
    pub fn new(surface: &Surface, basis_values: Vec<u8>) -> Result<Self> {
        if basis_values.len() != surface.rank() {
            return Err(Error::SurfaceMismatch { expected: surface.rank(), found: basis_values.len() });
        }
        Ok(QuadraticForm { surface: surface.clone(), basis_values: basis_values.into_iter().map(|b| b & 1).collect() })
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<u8> {
        self.surface.check(x)?;
        let x = mod2(x);
        let linear = x.iter().zip(&self.basis_values).fold(0, |acc, (a, b)| acc ^ (a & b));
        Ok(linear ^ cross_term(&pairing_mod2(&self.surface), &x))
    }

    /// Bit string in the order of [`QuadraticForm::basis_names`].
    pub fn to_bits(&self) -> String {
        self.basis_values.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    pub fn basis_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.surface.genus).flat_map(|k| [format!("a{k}"), format!("b{k}")]).collect();
        let p = self.surface.boundaries.len();
        v.extend(self.surface.boundaries.iter().take(p.saturating_sub(1)).cloned());
        v
    }
}

/// Requirement q(class) = value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub class: Class,
    pub value: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solution {
    Form(QuadraticForm),
    /// Constraints whose affine equations sum to 0 = 1.
    Inconsistent(Vec<usize>),
}

impl Solution {
    pub fn form(&self) -> Option<&QuadraticForm> {
        match self {
            Solution::Form(q) => Some(q),
            Solution::Inconsistent(_) => None,
        }
    }
}

#[derive(Clone)]
struct Row {
    coeffs: Vec<u64>,
    rhs: u8,
    history: Vec<u64>,
}

fn bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn set(v: &mut [u64], i: usize) {
    v[i / 64] |= 1 << (i % 64);
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

impl Row {
    fn add(&mut self, other: &Row) {
        xor_into(&mut self.coeffs, &other.coeffs);
        xor_into(&mut self.history, &other.history);
        self.rhs ^= other.rhs;
    }
}

/// Find q with q(c) = ε for each constraint, by Gaussian elimination on the affine
/// system Σ c_i q(e_i) = ε + Σ_{i<j} c_i c_j ⟨e_i, e_j⟩. Free basis values are set to 0.
pub fn solve_constraints(surface: &Surface, constraints: &[Constraint]) -> Result<Solution> {
    let n = surface.rank();
    let j = pairing_mod2(surface);
    let words = n.div_ceil(64).max(1);
    let hwords = constraints.len().div_ceil(64).max(1);
    let mut rows = Vec::with_capacity(constraints.len());
    for (k, c) in constraints.iter().enumerate() {
        surface.check(&c.class)?;
        let x = mod2(&c.class);
        let mut coeffs = vec![0u64; words];
        for (i, &b) in x.iter().enumerate() {
            if b == 1 {
                set(&mut coeffs, i);
            }
        }
        let mut history = vec![0u64; hwords];
        set(&mut history, k);
        rows.push(Row { coeffs, rhs: (c.value & 1) ^ cross_term(&j, &x), history });
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i].coeffs, col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(&row.coeffs, col) {
                row.add(&pivot);
            }
        }
        pivots.push(col);
        r += 1;
    }
    if let Some(bad) = rows[r..].iter().find(|row| row.rhs == 1) {
        let ids = (0..constraints.len()).filter(|&k| bit(&bad.history, k)).collect();
        return Ok(Solution::Inconsistent(ids));
    }
    let mut values = vec![0u8; n];
    for (row, &col) in rows.iter().zip(&pivots) {
        values[col] = row.rhs;
    }
    Ok(Solution::Form(QuadraticForm::new(surface, values)?))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinDecision {
    pub spin: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuadraticForm>,
    /// Labels of an inconsistent set of constraints.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
}

fn decide(surface: &Surface, constraints: Vec<Constraint>) -> Result<SpinDecision> {
    Ok(match solve_constraints(surface, &constraints)? {
        Solution::Form(q) => SpinDecision { spin: true, witness: Some(q), certificate: None },
        Solution::Inconsistent(ids) => SpinDecision {
            spin: false,
            witness: None,
            certificate: Some(ids.into_iter().map(|k| constraints[k].label.clone()).collect()),
        },
    })
}

fn letter_constraints(f: &Factorization) -> Result<Vec<Constraint>> {
    (0..f.len())
        .map(|k| Ok(Constraint { label: format!("letter {k} ({})", f.letters[k].curve), class: f.letter_class(k)?, value: 1 }))
        .collect()
}

/// Spin criterion for a pencil: q = 1 on every vanishing cycle and every boundary curve.
pub fn decide_spin(f: &Factorization) -> Result<SpinDecision> {
    let exps = match &f.target {
        Target::Boundary(m) if !m.is_empty() && m.values().all(|&e| e == 1) => m.clone(),
        Target::Boundary(m) if m.is_empty() => return Err(Error::NotPencil("closed fibration; use decide_spin_sections".into())),
        _ => return Err(Error::NotPencil("target is not a product of single boundary twists".into())),
    };
    decide_spin_sections(f, &exps)
}

/// Pick the criterion from the target: pencil, closed fibration, or sections of
/// other self-intersections.
pub fn spin_of(f: &Factorization) -> Result<SpinDecision> {
    match &f.target {
        Target::Boundary(m) if m.is_empty() => decide_spin_sections(f, &BTreeMap::new()),
        Target::Boundary(m) if m.values().all(|&v| v == 1) => decide_spin(f),
        Target::Boundary(m) => decide_spin_sections(f, m),
        Target::Word(_) => Err(Error::NotPencil("spin needs a boundary multi-twist target".into())),
    }
}

/// Spin criterion for the complement of sections of self-intersection −a_j:
/// q = 1 on vanishing cycles and q(δ_j) ≡ a_j. With no boundary this is the
/// closed-surface criterion q(c) = 1 on every vanishing cycle.
pub fn decide_spin_sections(f: &Factorization, exponents: &BTreeMap<String, u32>) -> Result<SpinDecision> {
    let s = f.surface();
    let mut cs = letter_constraints(f)?;
    for (label, &a) in exponents {
        let j = s.boundary_index(label).ok_or_else(|| Error::UnknownBoundary(label.clone()))?;
        cs.push(Constraint { label: label.clone(), class: s.boundary_class(j), value: (a % 2) as u8 });
    }
    decide(s, cs)
}

/// The four groups of curves that must take the value 1 in the explicit form on Σ_g^{2n}.
pub fn pencil_spin_constraints(g: usize, n: usize) -> Result<(Surface, Vec<Constraint>)> {
    let s = Surface::paired(g, n);
    let atlas = Atlas::load(&s)?;
    let mut names: Vec<String> = (1..=2 * g + 1).map(|j| format!("c{j}")).collect();
    names.extend((4..=2 * g + 1).flat_map(|j| [format!("d{j}"), format!("e{j}")]));
    names.extend((1..=n).flat_map(|k| [format!("x{k}"), format!("x'{k}")]));
    names.extend(s.boundaries.iter().cloned());
    let cs = names
        .into_iter()
        .map(|name| {
            let class = atlas.class(&name).ok_or_else(|| Error::Unknown { what: "curve", name: name.clone() })?;
            Ok(Constraint { label: name, class, value: 1 })
        })
        .collect::<Result<_>>()?;
    Ok((s, cs))
}

/// The form taking the value 1 on c_1, …, c_{2g}, δ_1, …, δ_n, δ'_2, …, δ'_n
/// (a basis of H1(Σ_g^{2n}; Z/2)).
pub fn generator_form(g: usize, n: usize) -> Result<QuadraticForm> {
    let s = Surface::paired(g, n);
    let atlas = Atlas::load(&s)?;
    let mut names: Vec<String> = (1..=2 * g).map(|j| format!("c{j}")).collect();
    names.extend((1..=n).map(crate::surface::delta_label));
    names.extend((2..=n).map(crate::surface::delta_prime_label));
    let cs: Vec<Constraint> = names
        .into_iter()
        .map(|name| Constraint { class: atlas.class(&name).unwrap_or_else(|| s.zero()), label: name, value: 1 })
        .collect();
    match solve_constraints(&s, &cs)? {
        Solution::Form(q) => Ok(q),
        Solution::Inconsistent(_) => Err(Error::Range("generating set is not independent".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_rules() {
        let s = Surface::closed(2);
        let q = QuadraticForm::new(&s, vec![1, 0, 1, 1]).unwrap();
        assert_eq!(q.evaluate(&s.zero()).unwrap(), 0);
        let ab: Vec<i64> = s.a(1).iter().zip(s.b(1)).map(|(x, y)| x + y).collect();
        assert_eq!(q.evaluate(&ab).unwrap(), q.evaluate(&s.a(1)).unwrap() ^ q.evaluate(&s.b(1)).unwrap() ^ 1);
        assert!(q.evaluate(&[1, 0]).is_err());
    }

    #[test]
    fn pencil_form_parity() {
        for g in 3..=6 {
            for n in 1..=3 {
                let q = generator_form(g, n).unwrap();
                let (s, cs) = pencil_spin_constraints(g, n).unwrap();
                let all = cs.iter().all(|c| q.evaluate(&c.class).unwrap() == 1);
                assert_eq!(all, (g + n) % 2 == 1, "g = {g}, n = {n}");
                let d = Atlas::load(&s).unwrap().class(&format!("d{}", 2 * g + 1)).unwrap();
                assert_eq!(q.evaluate(&d).unwrap() as usize, (g + n) % 2);
                let sol = solve_constraints(&s, &cs).unwrap();
                assert_eq!(sol.form().is_some(), (g + n) % 2 == 1);
            }
        }
    }

    #[test]
    fn catalog_pencils() {
        use crate::catalog::{build_chain_pencil, build_xprime, max_i};
        for g in 3..=5 {
            for i in 0..=max_i(g) {
                let d = decide_spin(&build_xprime(g, i).unwrap()).unwrap();
                assert_eq!(d.spin, (g + i) % 2 == 0, "X'_{g}({i})");
            }
            assert_eq!(decide_spin(&build_chain_pencil(g).unwrap()).unwrap().spin, g % 2 == 0);
        }
        let f = build_xprime(3, 1).unwrap();
        let mut exps: BTreeMap<String, u32> = f.surface().boundaries.iter().map(|b| (b.clone(), 1)).collect();
        exps.insert("delta1".into(), 0);
        assert!(!decide_spin_sections(&f, &exps).unwrap().spin);
        assert!(decide_spin(&f.fibration().unwrap()).is_err());
    }

    #[test]
    fn certificate_is_inconsistent() {
        let (s, cs) = pencil_spin_constraints(4, 2).unwrap();
        let Solution::Inconsistent(ids) = solve_constraints(&s, &cs).unwrap() else { panic!() };
        // the listed constraints alone are already unsolvable
        let sub: Vec<Constraint> = ids.iter().map(|&k| cs[k].clone()).collect();
        assert!(solve_constraints(&s, &sub).unwrap().form().is_none());
    }
}
