//! Dense exact linear algebra over the coefficient fields.
//!
//! Three elimination routes produce identical canonical answers:
//! plain fraction arithmetic (any field), fraction-free Bareiss elimination
//! in the outermost transcendental (function fields), and a lifting fast
//! path for large systems over `F_p(t)` that reconstructs rational entries
//! from a power-series solve and then verifies the result exactly.
//!
//! Pivoting is deterministic everywhere: leftmost column, first nonzero row.
//! Kernel bases are returned in reduced echelon form, which is the canonical
//! basis of the kernel subspace, so all routes agree bit for bit.

pub mod lift;
pub mod spanning;

use std::sync::Arc;

use crate::field::{as_frac, Elem, Field};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub field: Arc<Field>,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zero(field: Arc<Field>, rows: usize, cols: usize) -> Matrix {
        let z = field.zero();
        Matrix {
            field,
            rows,
            cols,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(field: Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = m.field.one();
        }
        m
    }

    pub fn from_rows(field: Arc<Field>, rows: Vec<Vec<Elem>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !f.is_zero(a) && !f.is_zero(&v[j]) {
                        acc = f.add(&acc, &f.mul(a, &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(self.at(i, c))) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.at(r, c)).expect("pivot nonzero");
            for j in c..self.cols {
                *self.at_mut(r, j) = f.mul(self.at(r, j), &inv);
            }
            for i in 0..self.rows {
                if i != r && !f.is_zero(self.at(i, c)) {
                    let factor = self.at(i, c).clone();
                    for j in c..self.cols {
                        let t = f.mul(&factor, self.at(r, j));
                        *self.at_mut(i, j) = f.sub(self.at(i, j), &t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }
}

/// Canonical reduced-echelon basis of the span of `vectors`.
pub fn canonical_basis(field: &Arc<Field>, vectors: Vec<Vec<Elem>>, len: usize) -> Vec<Vec<Elem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    for v in &vectors {
        assert_eq!(v.len(), len);
    }
    let mut m = Matrix::from_rows(field.clone(), vectors);
    let pivots = m.rref();
    (0..pivots.len()).map(|i| m.row(i).to_vec()).collect()
}

/// Basis of the right kernel in reduced echelon form. Empty iff injective.
pub fn kernel(m: &Matrix) -> Vec<Vec<Elem>> {
    let f = &m.field;
    let lvl = f.transcendentals().len();
    if lvl == 0 || m.rows * m.cols <= NAIVE_LIMIT {
        return kernel_rref(m);
    }
    if lvl == 1 && f.extension().is_none() {
        if let Some(basis) = lift::kernel_lifted(m) {
            return basis;
        }
    }
    kernel_bareiss(m)
}

const NAIVE_LIMIT: usize = 4096;

/// Kernel via plain reduced row echelon form with fraction arithmetic.
pub fn kernel_rref(m: &Matrix) -> Vec<Vec<Elem>> {
    let mut e = m.clone();
    let pivots = e.rref();
    kernel_from_rref(&e, &pivots)
}

fn kernel_from_rref(e: &Matrix, pivots: &[usize]) -> Vec<Vec<Elem>> {
    let f = &e.field;
    let mut is_pivot = vec![false; e.cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for fcol in 0..e.cols {
        if is_pivot[fcol] {
            continue;
        }
        let mut v = vec![f.zero(); e.cols];
        v[fcol] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            if pc < fcol {
                v[pc] = f.neg(e.at(r, fcol));
            }
        }
        basis.push(v);
    }
    canonical_basis(f, basis, e.cols)
}

/// Any one solution of `M x = b` under the deterministic pivot rule
/// (free variables set to zero), or `None` when inconsistent.
pub fn solve(m: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    assert_eq!(b.len(), m.rows);
    let f = &m.field;
    let lvl = f.transcendentals().len();
    if lvl >= 1 && f.extension().is_none() && lvl == 1 && m.rows * m.cols > NAIVE_LIMIT {
        if let Some(sol) = lift::solve_lifted(m, b) {
            return Some(sol);
        }
    }
    solve_rref(m, b)
}

pub fn solve_rref(m: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let f = m.field.clone();
    let mut aug = Matrix::zero(f.clone(), m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, m.cols) = b[i].clone();
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&m.cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![f.zero(); m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.at(r, m.cols).clone();
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// fraction-free elimination in the outermost transcendental
// ---------------------------------------------------------------------------

/// Multiply each row by its common denominator so every entry has a trivial
/// denominator in the outermost transcendental, then divide out the row gcd.
/// Leaves the row space (hence kernel) unchanged.
fn clear_denominators(m: &Matrix) -> Matrix {
    let f = m.field.clone();
    let lvl = f.transcendentals().len();
    assert!(lvl >= 1);
    let mut out = m.clone();
    for i in 0..m.rows {
        // common denominator of the row
        let mut den: Vec<Elem> = vec![f_one_inner(&f)];
        for j in 0..m.cols {
            let fr = as_frac(out.at(i, j));
            if fr.num.is_empty() {
                continue;
            }
            let g = f.poly_gcd_outer(&den, &fr.den);
            let extra = f.poly_divrem_outer(&fr.den, &g).0;
            den = f.poly_mul_outer(&den, &extra);
        }
        if den.len() > 1 {
            let den_elem = Elem::Frac(Box::new(crate::field::Frac {
                num: den,
                den: vec![f_one_inner(&f)],
            }));
            for j in 0..m.cols {
                let v = f.mul(out.at(i, j), &den_elem);
                *out.at_mut(i, j) = v;
            }
        }
        // divide the row by the gcd of its numerators
        let mut g: Vec<Elem> = Vec::new();
        for j in 0..m.cols {
            let fr = as_frac(out.at(i, j));
            if !fr.num.is_empty() {
                g = if g.is_empty() {
                    fr.num.clone()
                } else {
                    f.poly_gcd_outer(&g, &fr.num)
                };
            }
            if g.len() == 1 {
                break;
            }
        }
        if g.len() > 1 {
            for j in 0..m.cols {
                let fr = as_frac(out.at(i, j));
                if fr.num.is_empty() {
                    continue;
                }
                let q = f.poly_divrem_outer(&fr.num, &g).0;
                *out.at_mut(i, j) = Elem::Frac(Box::new(crate::field::Frac {
                    num: q,
                    den: fr.den.clone(),
                }));
            }
        }
    }
    out
}

fn f_one_inner(f: &Arc<Field>) -> Elem {
    // the constant 1 one level below the outermost transcendental
    let one = f.one();
    as_frac(&one).num[0].clone()
}

/// Fraction-free (Bareiss) kernel for fields with at least one
/// transcendental. Intermediate entries are exact minors, so divisions are
/// exact in the polynomial layer and coefficient growth stays polynomial.
pub fn kernel_bareiss(m: &Matrix) -> Vec<Vec<Elem>> {
    let f = m.field.clone();
    assert!(
        !f.transcendentals().is_empty(),
        "bareiss route requires a transcendental"
    );
    let mut e = clear_denominators(m);
    let pivots = bareiss_echelon(&mut e);
    // back substitution in the fraction field
    let mut is_pivot = vec![false; e.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for fcol in 0..e.cols {
        if is_pivot[fcol] {
            continue;
        }
        let mut v = vec![f.zero(); e.cols];
        v[fcol] = f.one();
        for k in (0..pivots.len()).rev() {
            let pc = pivots[k];
            if pc > fcol {
                continue;
            }
            let mut acc = f.zero();
            for j in (pc + 1)..e.cols {
                if !f.is_zero(&v[j]) && !f.is_zero(e.at(k, j)) {
                    acc = f.add(&acc, &f.mul(e.at(k, j), &v[j]));
                }
            }
            let val = f.div(&f.neg(&acc), e.at(k, pc)).expect("pivot nonzero");
            v[pc] = val;
        }
        basis.push(v);
    }
    canonical_basis(&f, basis, e.cols)
}

/// Bareiss two-step fraction-free elimination to row echelon form.
/// Returns pivot columns; the matrix is left upper triangular on pivot rows.
fn bareiss_echelon(e: &mut Matrix) -> Vec<usize> {
    let f = e.field.clone();
    let mut pivots = Vec::new();
    let mut prev: Option<Elem> = None;
    let mut r = 0usize;
    for c in 0..e.cols {
        if r == e.rows {
            break;
        }
        let Some(pr) = (r..e.rows).find(|&i| !f.is_zero(e.at(i, c))) else {
            continue;
        };
        e.swap_rows(r, pr);
        let pivot = e.at(r, c).clone();
        for i in (r + 1)..e.rows {
            let lead = e.at(i, c).clone();
            for j in c..e.cols {
                let t1 = f.mul(&pivot, e.at(i, j));
                let t2 = f.mul(&lead, e.at(r, j));
                let mut num = f.sub(&t1, &t2);
                if let Some(prev) = &prev {
                    num = exact_div_outer(&f, &num, prev);
                }
                *e.at_mut(i, j) = num;
            }
        }
        prev = Some(pivot);
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact division of two denominator-free elements in the outermost
/// transcendental; Bareiss guarantees the remainder vanishes.
fn exact_div_outer(f: &Arc<Field>, a: &Elem, b: &Elem) -> Elem {
    if f.is_zero(a) {
        return f.zero();
    }
    let fa = as_frac(a);
    let fb = as_frac(b);
    debug_assert_eq!(fa.den.len(), 1);
    debug_assert_eq!(fb.den.len(), 1);
    let (q, rem) = f.poly_divrem_outer(&fa.num, &fb.num);
    debug_assert!(rem.is_empty(), "bareiss division must be exact");
    // fa.den and fb.den are constants; fold them into the quotient
    let den_ratio = f
        .div(
            &f.lift_outer(fa.den[0].clone()),
            &f.lift_outer(fb.den[0].clone()),
        )
        .unwrap();
    f.mul(
        &Elem::Frac(Box::new(crate::field::Frac {
            num: q,
            den: vec![f_one_inner(f)],
        })),
        &den_ratio,
    )
}

impl Field {
    // outer-polynomial helpers exposed to the linalg module
    pub(crate) fn poly_gcd_outer(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let lv = self.transcendentals().len() - 1;
        self.poly_gcd(lv, a, b)
    }

    pub(crate) fn poly_mul_outer(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let lv = self.transcendentals().len() - 1;
        self.poly_mul(lv, a, b)
    }

    pub(crate) fn poly_divrem_outer(&self, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let lv = self.transcendentals().len() - 1;
        self.poly_divrem(lv, a, b)
    }

    pub(crate) fn lift_outer(&self, inner: Elem) -> Elem {
        let one = f_one_inner_raw(self);
        if self.is_zero_inner(&inner) {
            Elem::Frac(Box::new(crate::field::Frac {
                num: Vec::new(),
                den: vec![one],
            }))
        } else {
            Elem::Frac(Box::new(crate::field::Frac {
                num: vec![inner],
                den: vec![one],
            }))
        }
    }

    fn is_zero_inner(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(v) => *v == 0,
            Elem::Ext(v) => v.is_empty(),
            Elem::Frac(fr) => fr.num.is_empty(),
        }
    }
}

fn f_one_inner_raw(f: &Field) -> Elem {
    let one = f.one();
    as_frac(&one).num[0].clone()
}

/// Verify `M b = 0` for every basis vector; used by tests and certificates.
pub fn verify_kernel(m: &Matrix, basis: &[Vec<Elem>]) -> bool {
    basis.iter().all(|v| {
        m.mul_vec(v).iter().all(|e| m.field.is_zero(e))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(field: &Arc<Field>, rows: &[&[&str]]) -> Matrix {
        let data: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|s| field.parse_elem(s).unwrap()).collect())
            .collect();
        Matrix::from_rows(field.clone(), data)
    }

    #[test]
    fn kernel_of_ones_over_f2() {
        let f = Field::parse("GF(2)").unwrap();
        let m = mat(&f, &[&["1", "1"]]);
        let k = kernel(&m);
        assert_eq!(k, vec![vec![f.one(), f.one()]]);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let f = Field::parse("GF(5)").unwrap();
        let m = Matrix::identity(f, 3);
        assert!(kernel(&m).is_empty());
    }

    #[test]
    fn kernel_over_function_field() {
        // [[t, 1], [t^2, t]] has kernel spanned by (1, -t)
        let f = Field::parse("GF(3)(t)").unwrap();
        let m = mat(&f, &[&["t", "1"], &["t^2", "t"]]);
        let k = kernel_rref(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], f.one());
        assert_eq!(k[0][1], f.parse_elem("-t").unwrap());
        // the fraction-free route agrees bit for bit
        assert_eq!(kernel_bareiss(&m), k);
        assert!(verify_kernel(&m, &k));
    }

    #[test]
    fn solve_deterministic_tie_break() {
        let f = Field::parse("GF(2)").unwrap();
        let m = mat(&f, &[&["1", "1"]]);
        let b = vec![f.one()];
        // leftmost pivot, free variable zero: (1, 0)
        assert_eq!(solve(&m, &b), Some(vec![f.one(), f.zero()]));
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let f = Field::parse("GF(7)").unwrap();
        let m = Matrix::identity(f.clone(), 2);
        let b = vec![f.one(), f.zero()];
        assert_eq!(solve(&m, &b), Some(b.clone()));
        let m2 = mat(&f, &[&["1", "1"], &["1", "1"]]);
        let b2 = vec![f.one(), f.zero()];
        assert_eq!(solve(&m2, &b2), None);
    }

    #[test]
    fn rank_plus_kernel_dim_is_cols() {
        let f = Field::parse("GF(3)(t)").unwrap();
        let m = mat(
            &f,
            &[
                &["t", "t^2", "1"],
                &["t^2", "t^3", "t"],
                &["1", "t", "0"],
            ],
        );
        let k = kernel_rref(&m);
        assert_eq!(m.rank() + k.len(), m.cols);
        assert!(verify_kernel(&m, &k));
        assert_eq!(kernel_bareiss(&m), k);
    }

    #[test]
    fn cross_oracle_bareiss_vs_naive_random() {
        // deterministic pseudo-random 5x5 instances over F_3(t)
        let f = Field::parse("GF(3)(t)").unwrap();
        let t = f.var("t").unwrap();
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..6 {
            let rows: Vec<Vec<Elem>> = (0..5)
                .map(|_| {
                    (0..5)
                        .map(|_| {
                            let c0 = f.from_int((next() % 3) as i64);
                            let c1 = f.from_int((next() % 3) as i64);
                            // c0 + c1 t, occasionally forced zero for rank drops
                            if next() % 4 == 0 {
                                f.zero()
                            } else {
                                f.add(&c0, &f.mul(&c1, &t))
                            }
                        })
                        .collect()
                })
                .collect();
            let m = Matrix::from_rows(f.clone(), rows);
            let a = kernel_rref(&m);
            let b = kernel_bareiss(&m);
            assert_eq!(a, b);
            assert!(verify_kernel(&m, &a));
        }
    }
}
