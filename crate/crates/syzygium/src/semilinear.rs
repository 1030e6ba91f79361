//! Semilinear operators `v -> M twist(v)` where the twist is the coefficient
//! Frobenius `c -> c^p`, iterated application, Fitting decompositions and
//! Frobenius-fixed subspaces.
//!
//! Fitting decompositions and kernels of iterates are supported over the
//! constant fields `F_p` and `F_{p^a}`, where the twist is bijective; that is
//! the fragment the cohomology computations need (decompositions over the
//! constant field extend scalar-wise to function fields).

use std::sync::Arc;

use crate::error::{Result, SyzError};
use crate::field::{Elem, Field};
use crate::linalg::{self, Matrix};

/// A `p`-semilinear map: application is `v -> matrix . (v_i^p)`.
/// Over `F_p` the twist is the identity and the map is plain linear.
#[derive(Debug, Clone)]
pub struct SemilinearMap {
    pub matrix: Matrix,
    pub field: Arc<Field>,
}

impl SemilinearMap {
    pub fn new(matrix: Matrix) -> Result<SemilinearMap> {
        if matrix.rows != matrix.cols {
            return Err(SyzError::Invalid("semilinear map must be square".into()));
        }
        let field = matrix.field.clone();
        Ok(SemilinearMap { matrix, field })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        let twisted: Vec<Elem> = v.iter().map(|c| self.field.frobenius(c, 1)).collect();
        self.matrix.mul_vec(&twisted)
    }

    pub fn apply_iter(&self, v: &[Elem], m: u32) -> Vec<Elem> {
        let mut out = v.to_vec();
        for _ in 0..m {
            out = self.apply(&out);
        }
        out
    }

    /// Matrix of the `m`-fold composite: `M_m = M . sigma(M_{m-1})` with the
    /// entrywise Frobenius `sigma`, so `F^m(v) = M_m . sigma^m(v)`.
    pub fn power_matrix(&self, m: u32) -> Matrix {
        let f = &self.field;
        let n = self.dim();
        let mut acc = Matrix::identity(f.clone(), n);
        for _ in 0..m {
            let mut twisted = acc.clone();
            for i in 0..n {
                for j in 0..n {
                    *twisted.at_mut(i, j) = f.frobenius(acc.at(i, j), 1);
                }
            }
            acc = mat_mul(&self.matrix, &twisted);
        }
        acc
    }

    fn require_constant_field(&self) -> Result<()> {
        if !self.field.transcendentals().is_empty() {
            return Err(SyzError::Unsupported(
                "iterated image/kernel of a twisted map over a function field".into(),
            ));
        }
        Ok(())
    }

    /// Bases of `im(F^m)` (the span of the images of the standard basis) and
    /// `ker(F^m)`, both in reduced echelon form.
    pub fn iterate(&self, m: u32) -> Result<(Vec<Vec<Elem>>, Vec<Vec<Elem>>)> {
        self.require_constant_field()?;
        let f = &self.field;
        let mm = self.power_matrix(m);
        let n = self.dim();
        let cols: Vec<Vec<Elem>> = (0..n)
            .map(|j| (0..n).map(|i| mm.at(i, j).clone()).collect())
            .collect();
        let image = linalg::canonical_basis(f, cols, n);
        // ker(F^m) = sigma^{-m}(ker M_m); sigma is bijective on F_{p^a}
        let raw_kernel = linalg::kernel(&mm);
        let kernel = raw_kernel
            .into_iter()
            .map(|v| self.untwist_vec(v, m))
            .collect::<Vec<_>>();
        let kernel = linalg::canonical_basis(f, kernel, n);
        Ok((image, kernel))
    }

    fn untwist_vec(&self, v: Vec<Elem>, m: u32) -> Vec<Elem> {
        let f = &self.field;
        let a = f.extension().map(|e| e.degree() as u32).unwrap_or(1);
        if a == 1 {
            return v; // Frobenius is the identity on F_p
        }
        // sigma^{-1} = sigma^{a-1} on F_{p^a}
        let inv_power = (a - 1) * m;
        v.into_iter().map(|c| f.frobenius(&c, inv_power)).collect()
    }

    /// Fitting decomposition `V = V_s (+) V_n`: `F` bijective on `V_s`
    /// (`V_s = im F^m` for stabilized `m`), nilpotent on `V_n = ker F^m`.
    pub fn fitting(&self) -> Result<FittingDecomposition> {
        self.require_constant_field()?;
        let f = &self.field;
        let n = self.dim();
        let mut m = 0u32;
        let mut prev_rank = n;
        let mut acc = Matrix::identity(f.clone(), n);
        loop {
            // acc_{m+1} = M . sigma(acc_m)
            let mut twisted = acc.clone();
            for i in 0..n {
                for j in 0..n {
                    *twisted.at_mut(i, j) = f.frobenius(acc.at(i, j), 1);
                }
            }
            acc = mat_mul(&self.matrix, &twisted);
            let rank = acc.rank();
            if rank == prev_rank {
                break;
            }
            prev_rank = rank;
            m += 1;
            if m as usize > n {
                break;
            }
        }
        let (semisimple, nilpotent) = self.iterate(m.max(1))?;
        Ok(FittingDecomposition {
            semisimple_basis: semisimple,
            nilpotent_basis: nilpotent,
            stabilization_exponent: m,
            dim: n,
        })
    }

    /// Basis of `ker(F - id)`. Only the untwisted case (prime field, no
    /// transcendentals) is supported; fixed points of twisted maps over
    /// extension fields are outside the supported fragment.
    pub fn fixed_subspace(&self) -> Result<Vec<Vec<Elem>>> {
        if self.field.extension().is_some() || !self.field.transcendentals().is_empty() {
            return Err(SyzError::Unsupported(
                "fixed subspace of a twisted map over a non-prime field".into(),
            ));
        }
        let f = &self.field;
        let n = self.dim();
        let mut m = self.matrix.clone();
        for i in 0..n {
            let v = f.sub(m.at(i, i), &f.one());
            *m.at_mut(i, i) = v;
        }
        Ok(linalg::kernel(&m))
    }
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.rows);
    let f = a.field.clone();
    let mut out = Matrix::zero(f.clone(), a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.at(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let t = f.mul(aik, b.at(k, j));
                *out.at_mut(i, j) = f.add(out.at(i, j), &t);
            }
        }
    }
    out
}

/// The splitting `V = V_s (+) V_n` with `F` bijective on `V_s` and nilpotent
/// on `V_n`.
#[derive(Debug, Clone)]
pub struct FittingDecomposition {
    pub semisimple_basis: Vec<Vec<Elem>>,
    pub nilpotent_basis: Vec<Vec<Elem>>,
    pub stabilization_exponent: u32,
    pub dim: usize,
}

impl FittingDecomposition {
    pub fn semisimple_dim(&self) -> usize {
        self.semisimple_basis.len()
    }

    pub fn nilpotent_dim(&self) -> usize {
        self.nilpotent_basis.len()
    }

    /// Unique decomposition coordinates of `v` as (semisimple, nilpotent)
    /// parts, expressed back in ambient coordinates.
    pub fn project(&self, field: &Arc<Field>, v: &[Elem]) -> Result<(Vec<Elem>, Vec<Elem>)> {
        let n = self.dim;
        if v.len() != n {
            return Err(SyzError::Degree(format!(
                "vector length {} does not match ambient dimension {n}",
                v.len()
            )));
        }
        let k = self.semisimple_dim();
        let cols = k + self.nilpotent_dim();
        if cols != n {
            return Err(SyzError::Invalid("decomposition is not full".into()));
        }
        let mut m = Matrix::zero(field.clone(), n, cols);
        for (j, b) in self
            .semisimple_basis
            .iter()
            .chain(self.nilpotent_basis.iter())
            .enumerate()
        {
            for i in 0..n {
                *m.at_mut(i, j) = b[i].clone();
            }
        }
        let x = linalg::solve(&m, v).ok_or(SyzError::Inconsistent)?;
        let mut s_part = vec![field.zero(); n];
        let mut n_part = vec![field.zero(); n];
        for (j, c) in x.iter().enumerate() {
            let basis = if j < k {
                &self.semisimple_basis[j]
            } else {
                &self.nilpotent_basis[j - k]
            };
            let target = if j < k { &mut s_part } else { &mut n_part };
            for i in 0..n {
                let t = field.mul(c, &basis[i]);
                target[i] = field.add(&target[i], &t);
            }
        }
        Ok((s_part, n_part))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(field: &Arc<Field>, rows: &[&[i64]]) -> Matrix {
        let data: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_int(v)).collect())
            .collect();
        Matrix::from_rows(field.clone(), data)
    }

    #[test]
    fn nilpotent_one_by_one() {
        let f = Field::parse("GF(3)").unwrap();
        let m = SemilinearMap::new(mat(&f, &[&[0]])).unwrap();
        let (im, ker) = m.iterate(1).unwrap();
        assert!(im.is_empty());
        assert_eq!(ker.len(), 1);
        let fit = m.fitting().unwrap();
        assert_eq!(fit.semisimple_dim(), 0);
        assert_eq!(fit.nilpotent_dim(), 1);
    }

    #[test]
    fn identity_map() {
        let f = Field::parse("GF(5)").unwrap();
        let m = SemilinearMap::new(Matrix::identity(f.clone(), 3)).unwrap();
        let (im, ker) = m.iterate(4).unwrap();
        assert_eq!(im.len(), 3);
        assert!(ker.is_empty());
        let fit = m.fitting().unwrap();
        assert_eq!(fit.semisimple_dim(), 3);
        assert_eq!(fit.nilpotent_dim(), 0);
    }

    #[test]
    fn zero_map_fitting() {
        let f = Field::parse("GF(7)").unwrap();
        let m = SemilinearMap::new(Matrix::zero(f.clone(), 3, 3)).unwrap();
        let fit = m.fitting().unwrap();
        assert_eq!(fit.semisimple_dim(), 0);
        assert_eq!(fit.nilpotent_dim(), 3);
    }

    #[test]
    fn fitting_invariants_mixed_map() {
        // block diag(invertible, nilpotent) over F_3
        let f = Field::parse("GF(3)").unwrap();
        let m = SemilinearMap::new(mat(
            &f,
            &[&[2, 0, 0], &[0, 0, 1], &[0, 0, 0]],
        ))
        .unwrap();
        let fit = m.fitting().unwrap();
        assert_eq!(fit.semisimple_dim(), 1);
        assert_eq!(fit.nilpotent_dim(), 2);
        // F of each semisimple basis vector stays in span(V_s)
        for b in &fit.semisimple_basis {
            let fb = m.apply(b);
            let (s, n) = fit.project(&f, &fb).unwrap();
            assert!(n.iter().all(|c| f.is_zero(c)));
            let _ = s;
        }
        // F^dim kills the nilpotent basis
        for b in &fit.nilpotent_basis {
            let fb = m.apply_iter(b, fit.dim as u32);
            assert!(fb.iter().all(|c| f.is_zero(c)));
        }
    }

    #[test]
    fn semilinear_twist_rule() {
        // over GF(4), F(c v) = c^2 F(v)
        let f = Field::parse("GF(4)=GF(2)[a]/(a^2+a+1)").unwrap();
        let a = f.generator().unwrap();
        let m = SemilinearMap::new(mat(&f, &[&[1, 1], &[0, 1]])).unwrap();
        let v = vec![a.clone(), f.one()];
        let cv: Vec<Elem> = v.iter().map(|x| f.mul(&a, x)).collect();
        let lhs = m.apply(&cv);
        let rhs: Vec<Elem> = m
            .apply(&v)
            .iter()
            .map(|x| f.mul(&f.frobenius(&a, 1), x))
            .collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fixed_subspace_examples() {
        let f = Field::parse("GF(3)").unwrap();
        let id = SemilinearMap::new(Matrix::identity(f.clone(), 2)).unwrap();
        assert_eq!(id.fixed_subspace().unwrap().len(), 2);
        // [[0,1],[0,0]]: F - id invertible, no fixed vectors
        let n = SemilinearMap::new(mat(&f, &[&[0, 1], &[0, 0]])).unwrap();
        assert!(n.fixed_subspace().unwrap().is_empty());
        let z = SemilinearMap::new(Matrix::zero(f.clone(), 2, 2)).unwrap();
        assert!(z.fixed_subspace().unwrap().is_empty());
        // rejects extension fields
        let f4 = Field::parse("GF(4)=GF(2)[a]/(a^2+a+1)").unwrap();
        let t = SemilinearMap::new(Matrix::identity(f4, 2)).unwrap();
        assert!(t.fixed_subspace().is_err());
    }
}
