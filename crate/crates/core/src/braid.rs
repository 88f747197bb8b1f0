//! Artin action of the braid group on a free group.
//!
//! Chain twists t_{c_i} satisfy the braid relations, so c_i ↦ σ_i gives a
//! homomorphism B_{2g+2} → MCG. Two chain-supported curves w(c_i), w'(c_j)
//! coincide when the braids w σ_i w⁻¹ and w' σ_j w'⁻¹ act identically on the
//! free group; Artin's theorem makes this test faithful on the braid side.

/// Free-group word on x_1..x_n; `-k` is x_k⁻¹.
pub type FreeWord = Vec<i32>;

pub fn free_reduce(w: &mut FreeWord) {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    *w = out;
}

fn inverse(w: &[i32]) -> FreeWord {
    w.iter().rev().map(|x| -x).collect()
}

/// An automorphism of F_n given by the images of its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArtinAut {
    images: Vec<FreeWord>,
}

impl ArtinAut {
    pub fn identity(strands: usize) -> Self {
        ArtinAut { images: (1..=strands as i32).map(|k| vec![k]).collect() }
    }

    pub fn strands(&self) -> usize {
        self.images.len()
    }

    /// self ← self ∘ ρ(σ_i^e), with 1-based `i`.
    pub fn apply(&mut self, i: usize, e: i32) {
        assert!(i >= 1 && i < self.images.len(), "generator σ_{i} out of range");
        let (p, q) = (i - 1, i);
        if e > 0 {
            for _ in 0..e {
                let a = self.images[p].clone();
                let b = self.images[q].clone();
                let mut na = a.clone();
                na.extend_from_slice(&b);
                na.extend(inverse(&a));
                free_reduce(&mut na);
                self.images[p] = na;
                self.images[q] = a;
            }
        } else {
            for _ in 0..(-e) {
                let a = self.images[p].clone();
                let b = self.images[q].clone();
                let mut nb = inverse(&b);
                nb.extend_from_slice(&a);
                nb.extend_from_slice(&b);
                free_reduce(&mut nb);
                self.images[p] = b;
                self.images[q] = nb;
            }
        }
    }

    pub fn of_word(strands: usize, word: &[(usize, i32)]) -> Self {
        let mut a = ArtinAut::identity(strands);
        for &(i, e) in word {
            a.apply(i, e);
        }
        a
    }
}

/// Conjugate of σ_base by a chain word (rightmost acts first).
pub fn conjugate_word(conj: &[(usize, i32)], base: usize) -> Vec<(usize, i32)> {
    let mut w = conj.to_vec();
    w.push((base, 1));
    w.extend(conj.iter().rev().map(|&(i, e)| (i, -e)));
    w
}

/// Decide whether the chain-supported curves `conj1(c_{base1})` and `conj2(c_{base2})` coincide.
pub fn chain_curves_equal(strands: usize, c1: (&[(usize, i32)], usize), c2: (&[(usize, i32)], usize)) -> bool {
    ArtinAut::of_word(strands, &conjugate_word(c1.0, c1.1)) == ArtinAut::of_word(strands, &conjugate_word(c2.0, c2.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn braid_relation_holds() {
        let lhs = ArtinAut::of_word(4, &[(1, 1), (2, 1), (1, 1)]);
        let rhs = ArtinAut::of_word(4, &[(2, 1), (1, 1), (2, 1)]);
        assert_eq!(lhs, rhs);
        let far = ArtinAut::of_word(5, &[(1, 1), (3, 1)]);
        assert_eq!(far, ArtinAut::of_word(5, &[(3, 1), (1, 1)]));
        assert_ne!(ArtinAut::of_word(4, &[(1, 1), (2, 1)]), ArtinAut::of_word(4, &[(2, 1), (1, 1)]));
    }

    #[test]
    fn inverse_cancels() {
        let a = ArtinAut::of_word(4, &[(2, 1), (1, -1), (1, 1), (2, -1)]);
        assert_eq!(a, ArtinAut::identity(4));
    }

    #[test]
    fn twisted_neighbour_equals_conjugate() {
        // t_{c1} t_{c2} (c1) = c2
        assert!(chain_curves_equal(4, (&[(1, 1), (2, 1)], 1), (&[], 2)));
        assert!(!chain_curves_equal(4, (&[(1, 1)], 2), (&[], 1)));
    }

    #[test]
    fn d_curves_shift_down() {
        // (t_{d4} t_{d5} t_{d6} t_{d7})(c_{i+4}) = c_i on the genus-3 chain
        let d = |j: usize| vec![(j - 3, -1), (j - 2, -1), (j - 1, -1)];
        let mut conj = Vec::new();
        for j in 4..=7 {
            conj.extend(conjugate_word(&d(j), j));
        }
        for i in 1..=3 {
            assert!(chain_curves_equal(8, (&conj, i + 4), (&[], i)));
        }
    }
}
