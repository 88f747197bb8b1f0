//! Surfaces Σ_g^p, their integral first homology and the intersection pairing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Coefficient vector in the basis `a_1, b_1, …, a_g, b_g, δ_1, …, δ_{p-1}`.
pub type Class = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surface {
    pub genus: usize,
    /// Boundary labels in basis order; the last one is implicit in the basis.
    pub boundaries: Vec<String>,
}

pub fn delta_label(k: usize) -> String {
    format!("delta{k}")
}

pub fn delta_prime_label(k: usize) -> String {
    format!("delta'{k}")
}

impl Surface {
    pub fn closed(genus: usize) -> Self {
        Surface { genus, boundaries: Vec::new() }
    }

    /// Σ_g^p; an even number of boundaries is split into the paired labelling of
    /// [`Surface::paired`], an odd number is labelled `delta1 … deltap`.
    pub fn new(genus: usize, p: usize) -> Self {
        if p % 2 == 0 {
            Surface::paired(genus, p / 2)
        } else {
            Surface { genus, boundaries: (1..=p).map(delta_label).collect() }
        }
    }

    /// Σ_g^{2n} with boundaries `δ_1..δ_n, δ'_1..δ'_n`.
    pub fn paired(genus: usize, n: usize) -> Self {
        let mut boundaries: Vec<String> = (1..=n).map(delta_label).collect();
        boundaries.extend((1..=n).map(delta_prime_label));
        Surface { genus, boundaries }
    }

    pub fn boundary_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn rank(&self) -> usize {
        2 * self.genus + self.boundary_count().saturating_sub(1)
    }

    pub fn zero(&self) -> Class {
        vec![0; self.rank()]
    }

    pub fn a(&self, k: usize) -> Class {
        let mut v = self.zero();
        v[2 * (k - 1)] = 1;
        v
    }

    pub fn b(&self, k: usize) -> Class {
        let mut v = self.zero();
        v[2 * (k - 1) + 1] = 1;
        v
    }

    pub fn boundary_index(&self, label: &str) -> Option<usize> {
        self.boundaries.iter().position(|b| b == label)
    }

    /// Class of the boundary at position `j`; the last boundary is minus the sum of the others.
    pub fn boundary_class(&self, j: usize) -> Class {
        let p = self.boundary_count();
        assert!(j < p, "boundary index out of range");
        let mut v = self.zero();
        if j + 1 < p {
            v[2 * self.genus + j] = 1;
        } else {
            for t in 0..p - 1 {
                v[2 * self.genus + t] = -1;
            }
        }
        v
    }

    /// Class of a labelled boundary, or zero when that boundary has been capped off.
    pub fn boundary_class_or_zero(&self, label: &str) -> Class {
        match self.boundary_index(label) {
            Some(j) => self.boundary_class(j),
            None => self.zero(),
        }
    }

    pub fn check(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::SurfaceMismatch { expected: self.rank(), found: x.len() });
        }
        Ok(())
    }

    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        debug_assert_eq!(x.len(), self.rank());
        debug_assert_eq!(y.len(), self.rank());
        (0..self.genus).map(|k| x[2 * k] * y[2 * k + 1] - x[2 * k + 1] * y[2 * k]).sum()
    }

    pub fn intersection_pairing(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pairing(x, y))
    }

    /// `t_c^e(x) = x + e⟨x,c⟩c`.
    pub fn transvect(&self, c: &[i64], x: &[i64], e: i64) -> Class {
        let f = e * self.pairing(x, c);
        x.iter().zip(c).map(|(xi, ci)| xi + f * ci).collect()
    }

    /// Matrix of `t_c^e` acting on column vectors.
    pub fn transvection_matrix(&self, c: &[i64], e: i64) -> Matrix<i64> {
        let n = self.rank();
        let mut m = Matrix::identity(n);
        for j in 0..n {
            let mut ej = self.zero();
            ej[j] = 1;
            let f = e * self.pairing(&ej, c);
            if f != 0 {
                for i in 0..n {
                    m[(i, j)] += f * c[i];
                }
            }
        }
        m
    }

    /// The pairing matrix `J` with `⟨x,y⟩ = xᵀ J y`.
    pub fn pairing_matrix(&self) -> Matrix<i64> {
        let n = self.rank();
        let mut j = Matrix::zeros(n, n);
        for k in 0..self.genus {
            j[(2 * k, 2 * k + 1)] = 1;
            j[(2 * k + 1, 2 * k)] = -1;
        }
        j
    }

    /// Drop the boundary coordinates, landing in H1 of the closed surface.
    pub fn cap_boundaries(&self, x: &[i64]) -> Class {
        x[..2 * self.genus].to_vec()
    }

    /// Cap the listed boundaries, returning the smaller surface.
    pub fn cap(&self, labels: &[&str]) -> Result<Surface> {
        for l in labels {
            if self.boundary_index(l).is_none() {
                return Err(Error::UnknownBoundary(l.to_string()));
            }
        }
        Ok(Surface {
            genus: self.genus,
            boundaries: self.boundaries.iter().filter(|b| !labels.contains(&b.as_str())).cloned().collect(),
        })
    }

    /// Push a class through the capping map onto `target`, which must keep a subset of our labels.
    pub fn push_class(&self, target: &Surface, x: &[i64]) -> Class {
        let g2 = 2 * self.genus;
        let mut out = target.zero();
        out[..g2].copy_from_slice(&x[..g2]);
        let mut coeff = vec![0i64; self.boundary_count()];
        for (j, c) in coeff.iter_mut().enumerate().take(self.boundary_count().saturating_sub(1)) {
            *c = x[g2 + j];
        }
        // coefficients relative to the full (redundant) boundary list, last one zero
        for (j, label) in self.boundaries.iter().enumerate() {
            if coeff[j] == 0 {
                continue;
            }
            if let Some(t) = target.boundary_index(label) {
                let bc = target.boundary_class(t);
                for (o, b) in out.iter_mut().zip(&bc) {
                    *o += coeff[j] * b;
                }
            }
        }
        out
    }

    pub fn is_boundary_class(&self, x: &[i64]) -> bool {
        x[..2 * self.genus].iter().all(|&v| v == 0)
    }

    pub fn reduce_mod2(x: &[i64]) -> Vec<u8> {
        x.iter().map(|v| v.rem_euclid(2) as u8).collect()
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ_{}^{}", self.genus, self.boundary_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_pairing() {
        let s = Surface::new(2, 3);
        assert_eq!(s.rank(), 6);
        assert_eq!(s.pairing(&s.a(1), &s.b(1)), 1);
        assert_eq!(s.pairing(&s.b(1), &s.a(1)), -1);
        assert_eq!(s.pairing(&s.a(1), &s.b(2)), 0);
        let d = s.boundary_class(2);
        assert_eq!(d, vec![0, 0, 0, 0, -1, -1]);
        assert_eq!(s.pairing(&d, &s.a(2)), 0);
    }

    #[test]
    fn transvection_matches_matrix() {
        let s = Surface::new(2, 2);
        let c: Class = vec![1, 1, 0, -1, 1];
        let x: Class = vec![2, 0, 1, 3, -1];
        let m = s.transvection_matrix(&c, 1);
        assert_eq!(m.mul_vec(&x), s.transvect(&c, &x, 1));
        let back = s.transvect(&c, &s.transvect(&c, &x, 1), -1);
        assert_eq!(back, x);
    }

    #[test]
    fn pushing_through_a_cap_of_the_last_boundary() {
        let s = Surface::paired(1, 2);
        let t = s.cap(&["delta'2"]).unwrap();
        // δ'_2 is implicit in s; pushing δ_1 keeps it as a basis vector of t
        let d1 = s.boundary_class(0);
        assert_eq!(s.push_class(&t, &d1), t.boundary_class(0));
        let last = s.boundary_class(3);
        assert_eq!(s.push_class(&t, &last), t.zero());
    }
}
