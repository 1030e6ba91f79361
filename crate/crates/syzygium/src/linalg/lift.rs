//! Lifting fast path for large linear systems over `F_p(t)`.
//!
//! The matrix is cleared to `F_p[t]` and specialized at a point gamma taken
//! from `F_p` or a small extension `F_{p^j}`. The pivot structure at gamma
//! drives a power-series solve around gamma (Newton/Hensel against the LU
//! factors of the specialized pivot block); Padé reconstruction turns series
//! into rational functions, which are shifted back and verified EXACTLY
//! against the original matrix with plain `F_p[t]` arithmetic. Any failure
//! returns `None` and the caller falls back to a fraction-free route, so
//! this path affects speed only, never correctness.
//!
//! Soundness of the dimension count: `rank M(gamma) <= rank M`, so
//! `#verified independent kernel vectors = cols - rank M(gamma) >= dim ker M`
//! forces equality throughout when every candidate verifies.

use std::sync::Arc;

use crate::field::{as_frac, Elem, Field};
use crate::linalg::{canonical_basis, Matrix};

type Poly = Vec<u64>; // dense in t, trimmed, coefficients in [0, p)

const PRECISIONS: [usize; 4] = [128, 256, 512, 1024];

pub fn kernel_lifted(m: &Matrix) -> Option<Vec<Vec<Elem>>> {
    let field = m.field.clone();
    if !eligible(&field) {
        return None;
    }
    let p = field.characteristic();
    let rows = clear_matrix(m)?;
    let cols = m.cols;
    let (gf, gamma, piv) = best_specialization(p, &rows, cols)?;
    let free: Vec<usize> = (0..cols).filter(|c| !piv.cols.contains(c)).collect();
    if free.is_empty() {
        return Some(Vec::new());
    }
    let r = piv.cols.len();
    // shifted series of the pivot block and of each free column
    let shifted = ShiftedBlock::build(&gf, &gamma, &rows, &piv, r);
    for &prec in &PRECISIONS {
        let mut basis: Vec<Vec<Elem>> = Vec::with_capacity(free.len());
        let mut ok = true;
        for &f in &free {
            let rhs = shifted.free_column_series(&gf, &gamma, &rows, &piv, f, prec);
            let series = shifted.solve_series(&gf, &rhs, prec);
            let Some(vec) = reconstruct_vector(&gf, &gamma, &field, &series, prec) else {
                ok = false;
                break;
            };
            // assemble the full kernel candidate
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (k, &c) in piv.cols.iter().enumerate() {
                v[c] = vec[k].clone();
            }
            if !verify_kernel_vector(p, &rows, &v, &field) {
                ok = false;
                break;
            }
            basis.push(v);
        }
        if ok {
            return Some(canonical_basis(&field, basis, cols));
        }
    }
    None
}

pub fn solve_lifted(m: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let field = m.field.clone();
    if !eligible(&field) {
        return None;
    }
    let p = field.characteristic();
    // clear rows of [M | b] jointly
    let mut aug = Matrix::zero(field.clone(), m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, m.cols) = b[i].clone();
    }
    let rows = clear_matrix(&aug)?;
    let cols = m.cols;
    let (gf, gamma, piv) = best_specialization(p, &rows, cols)?;
    if piv.cols.contains(&cols) {
        return None; // inconsistent at gamma; cannot certify either way
    }
    let r = piv.cols.len();
    let shifted = ShiftedBlock::build(&gf, &gamma, &rows, &piv, r);
    for &prec in &PRECISIONS {
        let rhs = shifted.rhs_column_series(&gf, &gamma, &rows, &piv, cols, prec);
        let series = shifted.solve_series(&gf, &rhs, prec);
        let Some(vec) = reconstruct_vector(&gf, &gamma, &field, &series, prec) else {
            continue;
        };
        let mut x = vec![field.zero(); cols];
        for (k, &c) in piv.cols.iter().enumerate() {
            x[c] = vec[k].clone();
        }
        if verify_solution(p, &rows, &x, &field) {
            return Some(x);
        }
    }
    None
}

fn eligible(field: &Arc<Field>) -> bool {
    field.extension().is_none()
        && field.transcendentals().len() == 1
        && field.characteristic() < (1 << 20)
}

// ---------------------------------------------------------------------------
// clearing denominators
// ---------------------------------------------------------------------------

fn elem_to_pair(e: &Elem) -> (&[Elem], &[Elem]) {
    let fr = as_frac(e);
    (&fr.num, &fr.den)
}

fn inner_to_u64(e: &Elem) -> u64 {
    match e {
        Elem::Int(v) => *v,
        _ => unreachable!("prime base expected"),
    }
}

fn poly_of(coeffs: &[Elem]) -> Poly {
    coeffs.iter().map(inner_to_u64).collect()
}

/// Each row becomes a vector of polynomials with the row denominator and
/// content removed.
fn clear_matrix(m: &Matrix) -> Option<Vec<Vec<Poly>>> {
    let p = m.field.characteristic();
    let mut out = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut den: Poly = vec![1];
        for j in 0..m.cols {
            let (_, d) = elem_to_pair(m.at(i, j));
            let d = poly_of(d);
            let g = poly_gcd(p, &den, &d);
            let (extra, rem) = poly_divrem(p, &d, &g);
            debug_assert!(rem.is_empty());
            den = poly_mul(p, &den, &extra);
        }
        let mut row = Vec::with_capacity(m.cols);
        for j in 0..m.cols {
            let (nu, de) = elem_to_pair(m.at(i, j));
            let (nu, de) = (poly_of(nu), poly_of(de));
            if nu.is_empty() {
                row.push(Vec::new());
                continue;
            }
            let (scale, rem) = poly_divrem(p, &den, &de);
            debug_assert!(rem.is_empty());
            row.push(poly_mul(p, &nu, &scale));
        }
        // remove the content of the row
        let mut g: Poly = Vec::new();
        for e in row.iter().filter(|e| !e.is_empty()) {
            g = if g.is_empty() {
                e.clone()
            } else {
                poly_gcd(p, &g, e)
            };
            if g.len() == 1 {
                break;
            }
        }
        if g.len() > 1 {
            for e in row.iter_mut() {
                if !e.is_empty() {
                    let (q, rem) = poly_divrem(p, e, &g);
                    debug_assert!(rem.is_empty());
                    *e = q;
                }
            }
        }
        out.push(row);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// F_p[t] arithmetic on u64 vectors
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Poly) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(p: u64, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_divrem(p: u64, a: &Poly, b: &Poly) -> (Poly, Poly) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = mod_inv(p, *b.last().unwrap());
    let mut rem = a.clone();
    let mut quot = vec![0u64; a.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let c = (rem.last().unwrap() * inv) % p;
        let shift = rem.len() - b.len();
        if c != 0 {
            quot[shift] = c;
            for (k, &bk) in b.iter().enumerate() {
                let sub = (c * bk) % p;
                rem[shift + k] = (rem[shift + k] + p - sub) % p;
            }
        }
        rem.pop();
        poly_trim(&mut rem);
        if rem.len() < b.len() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_gcd(p: u64, a: &Poly, b: &Poly) -> Poly {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    while !r1.is_empty() {
        let (_, rem) = poly_divrem(p, &r0, &r1);
        r0 = r1;
        r1 = rem;
    }
    if let Some(&lead) = r0.last() {
        if lead != 1 {
            let inv = mod_inv(p, lead);
            for c in r0.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
    }
    r0
}

fn mod_inv(p: u64, a: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    (t.rem_euclid(p as i128)) as u64
}

// ---------------------------------------------------------------------------
// small finite fields F_{p^j} on flat u64 slices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Gf {
    p: u64,
    j: usize,
    /// modulus of the extension, length j + 1, monic; empty for j = 1
    modulus: Poly,
}

impl Gf {
    fn prime(p: u64) -> Gf {
        Gf {
            p,
            j: 1,
            modulus: Vec::new(),
        }
    }

    fn extension(p: u64, j: usize) -> Option<Gf> {
        // first monic irreducible of degree j by counter order; for j in
        // {2, 3} rootlessness is equivalent to irreducibility
        assert!(j == 2 || j == 3);
        let count = p.checked_pow(j as u32)?;
        for mask in 0..count {
            let mut poly = Vec::with_capacity(j + 1);
            let mut m = mask;
            for _ in 0..j {
                poly.push(m % p);
                m /= p;
            }
            poly.push(1);
            let has_root = (0..p).any(|x| {
                let mut acc = 0u64;
                for &c in poly.iter().rev() {
                    acc = (acc * x + c) % p;
                }
                acc == 0
            });
            if !has_root {
                return Some(Gf {
                    p,
                    j,
                    modulus: poly,
                });
            }
        }
        None
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.j]
    }

    fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn from_base(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    fn add_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + y) % self.p;
        }
    }

    fn sub_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + self.p - y) % self.p;
        }
    }

    fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&c| (self.p - c) % self.p).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        if self.j == 1 {
            return vec![(a[0] * b[0]) % p];
        }
        let mut wide = vec![0u64; 2 * self.j - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (k, &bk) in b.iter().enumerate() {
                wide[i + k] = (wide[i + k] + ai * bk) % p;
            }
        }
        // reduce by the monic modulus
        for idx in (self.j..wide.len()).rev() {
            let lead = wide[idx];
            if lead == 0 {
                continue;
            }
            wide[idx] = 0;
            for k in 0..self.j {
                let sub = (lead * self.modulus[k]) % p;
                wide[idx - self.j + k] = (wide[idx - self.j + k] + p - sub) % p;
            }
        }
        wide.truncate(self.j);
        wide
    }

    fn inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        if self.j == 1 {
            return Some(vec![mod_inv(self.p, a[0])]);
        }
        // extended Euclid in F_p[g] against the modulus
        let mut arr: Poly = a.to_vec();
        poly_trim(&mut arr);
        let (mut r0, mut r1) = (self.modulus.clone(), arr);
        let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, rem) = poly_divrem(self.p, &r0, &r1);
            r0 = r1;
            r1 = rem;
            let qt1 = poly_mul(self.p, &q, &t1);
            let mut next = t0.clone();
            // next = t0 - q t1
            let n = next.len().max(qt1.len());
            next.resize(n, 0);
            for (i, &c) in qt1.iter().enumerate() {
                next[i] = (next[i] + self.p - c) % self.p;
            }
            poly_trim(&mut next);
            t0 = t1;
            t1 = next;
        }
        let c_inv = mod_inv(self.p, r0[0]);
        let mut out: Poly = t0.iter().map(|&c| (c * c_inv) % self.p).collect();
        out.resize(self.j, 0);
        Some(out)
    }

    /// Evaluate an `F_p[t]` polynomial at an element of this field.
    fn eval_poly(&self, poly: &Poly, at: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, at);
            acc[0] = (acc[0] + c) % self.p;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// specialization, echelon and pivot structure over F_{p^j}
// ---------------------------------------------------------------------------

struct PivotStructure {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// Echelon over `F_{p^j}` tracking the original pivot rows and columns under
/// the deterministic rule (leftmost column, first nonzero row).
fn echelon_pivots(gf: &Gf, mat: &[Vec<u64>], rows: usize, cols: usize) -> PivotStructure {
    let j = gf.j;
    let mut work: Vec<Vec<u64>> = mat.to_vec();
    let mut order: Vec<usize> = (0..rows).collect();
    let mut piv_rows = Vec::new();
    let mut piv_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let hit = (r..rows).find(|&i| !gf.is_zero(&work[i][c * j..(c + 1) * j]));
        let Some(i) = hit else { continue };
        work.swap(r, i);
        order.swap(r, i);
        let pivot = work[r][c * j..(c + 1) * j].to_vec();
        let inv = gf.inv(&pivot).expect("nonzero pivot");
        for i2 in (r + 1)..rows {
            let lead = work[i2][c * j..(c + 1) * j].to_vec();
            if gf.is_zero(&lead) {
                continue;
            }
            let factor = gf.mul(&lead, &inv);
            for c2 in c..cols {
                let piece = work[r][c2 * j..(c2 + 1) * j].to_vec();
                let sub = gf.mul(&factor, &piece);
                let tgt = &mut work[i2][c2 * j..(c2 + 1) * j];
                for (x, &y) in tgt.iter_mut().zip(&sub) {
                    *x = (*x + gf.p - y) % gf.p;
                }
            }
        }
        piv_rows.push(order[r]);
        piv_cols.push(c);
        r += 1;
    }
    PivotStructure {
        rows: piv_rows,
        cols: piv_cols,
    }
}

fn specialize_rows(gf: &Gf, gamma: &[u64], rows: &[Vec<Poly>]) -> Vec<Vec<u64>> {
    rows.iter()
        .map(|row| {
            let mut flat = Vec::with_capacity(row.len() * gf.j);
            for e in row {
                flat.extend(gf.eval_poly(e, gamma));
            }
            flat
        })
        .collect()
}

/// Try gammas in `F_p`, then in `F_{p^2}` and `F_{p^3}`, keeping the best
/// rank; deterministic order of candidates.
fn best_specialization(
    p: u64,
    rows: &[Vec<Poly>],
    cols: usize,
) -> Option<(Gf, Vec<u64>, PivotStructure)> {
    let nrows = rows.len();
    let max_rank = nrows.min(cols);
    let mut best: Option<(Gf, Vec<u64>, PivotStructure)> = None;
    let consider = |gf: &Gf, gamma: Vec<u64>, best: &mut Option<(Gf, Vec<u64>, PivotStructure)>| -> bool {
        let flat = specialize_rows(gf, &gamma, rows);
        let piv = echelon_pivots(gf, &flat, nrows, cols);
        let rank = piv.cols.len();
        let is_better = best
            .as_ref()
            .map(|(_, _, b)| rank > b.cols.len())
            .unwrap_or(true);
        if is_better {
            *best = Some((gf.clone(), gamma, piv));
        }
        best.as_ref().map(|(_, _, b)| b.cols.len()).unwrap_or(0) == max_rank
    };
    let gf1 = Gf::prime(p);
    for c in 0..p.min(8) {
        if consider(&gf1, vec![c], &mut best) {
            let (gf, gamma, piv) = best.unwrap();
            return Some((gf, gamma, piv));
        }
    }
    for j in [2usize, 3] {
        let Some(gf) = Gf::extension(p, j) else { continue };
        for k in 0..4u64 {
            // gamma = g + k
            let mut gamma = gf.zero();
            gamma[1] = 1;
            gamma[0] = k % p;
            if consider(&gf, gamma, &mut best) {
                let (gf, gamma, piv) = best.unwrap();
                return Some((gf, gamma, piv));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// series solve around gamma
// ---------------------------------------------------------------------------

/// The pivot block `A(tau) = P(gamma + tau)[piv_rows, piv_cols]` as a list of
/// coefficient matrices, plus an LU factorization of `A(0)`.
struct ShiftedBlock {
    r: usize,
    /// `a_coeffs[k]` is the flat r x r matrix of the tau^k coefficient.
    a_coeffs: Vec<Vec<u64>>,
    lu: Lu,
}

impl ShiftedBlock {
    fn build(
        gf: &Gf,
        gamma: &[u64],
        rows: &[Vec<Poly>],
        piv: &PivotStructure,
        r: usize,
    ) -> ShiftedBlock {
        let j = gf.j;
        let mut deg_a = 0usize;
        for &ri in &piv.rows {
            for &ci in &piv.cols {
                deg_a = deg_a.max(rows[ri][ci].len().saturating_sub(1));
            }
        }
        let mut a_coeffs = vec![vec![0u64; r * r * j]; deg_a + 1];
        for (ii, &ri) in piv.rows.iter().enumerate() {
            for (jj, &ci) in piv.cols.iter().enumerate() {
                let shifted = taylor_shift(gf, &rows[ri][ci], gamma);
                for (k, coeff) in shifted.iter().enumerate() {
                    let tgt = &mut a_coeffs[k][(ii * r + jj) * j..(ii * r + jj + 1) * j];
                    tgt.copy_from_slice(coeff);
                }
            }
        }
        let lu = Lu::factor(gf, &a_coeffs[0], r).expect("pivot block invertible at gamma");
        ShiftedBlock {
            r,
            a_coeffs,
            lu,
        }
    }

    /// Series of `-P(gamma + tau)[piv_rows, f]` (for kernel candidates).
    fn free_column_series(
        &self,
        gf: &Gf,
        gamma: &[u64],
        rows: &[Vec<Poly>],
        piv: &PivotStructure,
        f: usize,
        prec: usize,
    ) -> Vec<Vec<u64>> {
        let j = gf.j;
        let mut out = vec![vec![0u64; self.r * j]; prec];
        for (ii, &ri) in piv.rows.iter().enumerate() {
            let shifted = taylor_shift(gf, &rows[ri][f], gamma);
            for (k, coeff) in shifted.iter().enumerate() {
                if k >= prec {
                    break;
                }
                let neg = gf.neg(coeff);
                out[k][ii * j..(ii + 1) * j].copy_from_slice(&neg);
            }
        }
        out
    }

    /// Series of `+P(gamma + tau)[piv_rows, col]` (for inhomogeneous solves).
    fn rhs_column_series(
        &self,
        gf: &Gf,
        gamma: &[u64],
        rows: &[Vec<Poly>],
        piv: &PivotStructure,
        col: usize,
        prec: usize,
    ) -> Vec<Vec<u64>> {
        let j = gf.j;
        let mut out = vec![vec![0u64; self.r * j]; prec];
        for (ii, &ri) in piv.rows.iter().enumerate() {
            let shifted = taylor_shift(gf, &rows[ri][col], gamma);
            for (k, coeff) in shifted.iter().enumerate() {
                if k >= prec {
                    break;
                }
                out[k][ii * j..(ii + 1) * j].copy_from_slice(coeff);
            }
        }
        out
    }

    /// Solve `A(tau) x(tau) = b(tau) mod tau^prec` coefficient by
    /// coefficient: `A_0 x_k = b_k - sum_{i>=1} A_i x_{k-i}`.
    fn solve_series(&self, gf: &Gf, b: &[Vec<u64>], prec: usize) -> Vec<Vec<u64>> {
        let j = gf.j;
        let r = self.r;
        let mut xs: Vec<Vec<u64>> = Vec::with_capacity(prec);
        let mut rhs = vec![0u64; r * j];
        for k in 0..prec {
            rhs.copy_from_slice(&b[k]);
            let top = (self.a_coeffs.len() - 1).min(k);
            for i in 1..=top {
                mat_vec_submul(gf, &self.a_coeffs[i], &xs[k - i], &mut rhs, r);
            }
            xs.push(self.lu.solve(gf, &rhs));
        }
        xs
    }
}

/// `rhs -= A . x` for a flat r x r matrix over the small field.
fn mat_vec_submul(gf: &Gf, a: &[u64], x: &[u64], rhs: &mut [u64], r: usize) {
    let j = gf.j;
    if j == 1 {
        let p = gf.p;
        for i in 0..r {
            let mut acc = 0u64;
            let row = &a[i * r..(i + 1) * r];
            // delayed reduction: products are < p^2 <= 2^40 and r <= 2^20
            for (k, &ak) in row.iter().enumerate() {
                acc += ak * x[k];
                if acc >= 1 << 62 {
                    acc %= p;
                }
            }
            rhs[i] = (rhs[i] + p - acc % p) % p;
        }
        return;
    }
    for i in 0..r {
        let mut acc = gf.zero();
        for k in 0..r {
            let aik = &a[(i * r + k) * j..(i * r + k + 1) * j];
            if gf.is_zero(aik) {
                continue;
            }
            let prod = gf.mul(aik, &x[k * j..(k + 1) * j]);
            gf.add_assign(&mut acc, &prod);
        }
        gf.sub_assign(&mut rhs[i * j..(i + 1) * j], &acc);
    }
}

/// Dense LU with partial pivoting over the small field.
struct Lu {
    r: usize,
    /// combined L (below diagonal) and U (diagonal and above), flat
    data: Vec<u64>,
    perm: Vec<usize>,
    diag_inv: Vec<Vec<u64>>,
}

impl Lu {
    fn factor(gf: &Gf, a: &[u64], r: usize) -> Option<Lu> {
        let j = gf.j;
        let mut data = a.to_vec();
        let mut perm: Vec<usize> = (0..r).collect();
        let mut diag_inv = Vec::with_capacity(r);
        for k in 0..r {
            let hit = (k..r).find(|&i| !gf.is_zero(&data[(i * r + k) * j..(i * r + k + 1) * j]))?;
            if hit != k {
                for c in 0..r {
                    for d in 0..j {
                        data.swap((k * r + c) * j + d, (hit * r + c) * j + d);
                    }
                }
                perm.swap(k, hit);
            }
            let pivot = data[(k * r + k) * j..(k * r + k + 1) * j].to_vec();
            let inv = gf.inv(&pivot)?;
            diag_inv.push(inv.clone());
            for i in (k + 1)..r {
                let lead = data[(i * r + k) * j..(i * r + k + 1) * j].to_vec();
                if gf.is_zero(&lead) {
                    continue;
                }
                let factor = gf.mul(&lead, &inv);
                data[(i * r + k) * j..(i * r + k + 1) * j].copy_from_slice(&factor);
                if gf.j == 1 {
                    let p = gf.p;
                    let fv = factor[0];
                    let (head, tail) = data.split_at_mut(i * r * j);
                    let row_k = &head[(k * r) * j..(k * r + r) * j];
                    let row_i = &mut tail[..r * j];
                    for c in (k + 1)..r {
                        row_i[c] = (row_i[c] + p - (fv * row_k[c]) % p) % p;
                    }
                } else {
                    for c in (k + 1)..r {
                        let piece = data[(k * r + c) * j..(k * r + c + 1) * j].to_vec();
                        let sub = gf.mul(&factor, &piece);
                        let tgt = &mut data[(i * r + c) * j..(i * r + c + 1) * j];
                        for (x, &y) in tgt.iter_mut().zip(&sub) {
                            *x = (*x + gf.p - y) % gf.p;
                        }
                    }
                }
            }
        }
        Some(Lu {
            r,
            data,
            perm,
            diag_inv,
        })
    }

    fn solve(&self, gf: &Gf, b: &[u64]) -> Vec<u64> {
        let j = gf.j;
        let r = self.r;
        // apply permutation
        let mut y = vec![0u64; r * j];
        for i in 0..r {
            y[i * j..(i + 1) * j].copy_from_slice(&b[self.perm[i] * j..(self.perm[i] + 1) * j]);
        }
        // forward substitution (unit lower triangle)
        for i in 0..r {
            let mut acc = gf.zero();
            for k in 0..i {
                let lik = &self.data[(i * r + k) * j..(i * r + k + 1) * j];
                if gf.is_zero(lik) {
                    continue;
                }
                let prod = gf.mul(lik, &y[k * j..(k + 1) * j]);
                gf.add_assign(&mut acc, &prod);
            }
            gf.sub_assign(&mut y[i * j..(i + 1) * j], &acc);
        }
        // back substitution
        let mut x = vec![0u64; r * j];
        for i in (0..r).rev() {
            let mut acc = y[i * j..(i + 1) * j].to_vec();
            for k in (i + 1)..r {
                let uik = &self.data[(i * r + k) * j..(i * r + k + 1) * j];
                if gf.is_zero(uik) {
                    continue;
                }
                let prod = gf.mul(uik, &x[k * j..(k + 1) * j]);
                gf.sub_assign(&mut acc, &prod);
            }
            let xi = gf.mul(&acc, &self.diag_inv[i]);
            x[i * j..(i + 1) * j].copy_from_slice(&xi);
        }
        x
    }
}

/// Coefficients of `poly(gamma + tau)` as a vector of field elements.
fn taylor_shift(gf: &Gf, poly: &Poly, gamma: &[u64]) -> Vec<Vec<u64>> {
    if poly.is_empty() {
        return Vec::new();
    }
    // Horner in (gamma + tau): out = out * (gamma + tau) + c_k
    let mut out: Vec<Vec<u64>> = Vec::new();
    for &c in poly.iter().rev() {
        // multiply by (gamma + tau): new[i] = out[i-1] + gamma*out[i]
        let mut next = vec![gf.zero(); out.len() + 1];
        for (i, coeff) in out.iter().enumerate() {
            let scaled = gf.mul(coeff, gamma);
            gf.add_assign(&mut next[i], &scaled);
            gf.add_assign(&mut next[i + 1], coeff);
        }
        next[0][0] = (next[0][0] + c) % gf.p;
        out = next;
    }
    while out.last().map(|c| gf.is_zero(c)).unwrap_or(false) {
        out.pop();
    }
    out
}

// ---------------------------------------------------------------------------
// Padé reconstruction and descent back to F_p(t)
// ---------------------------------------------------------------------------

/// Rational reconstruction of each coordinate of the series solution, shift
/// back by gamma, and descend coefficients to the prime field.
fn reconstruct_vector(
    gf: &Gf,
    gamma: &[u64],
    field: &Arc<Field>,
    series: &[Vec<u64>],
    prec: usize,
) -> Option<Vec<Elem>> {
    let j = gf.j;
    let r = series.first().map(|v| v.len() / j).unwrap_or(0);
    let mut out = Vec::with_capacity(r);
    for k in 0..r {
        let coeffs: Vec<Vec<u64>> = series.iter().map(|s| s[k * j..(k + 1) * j].to_vec()).collect();
        let (num, den) = pade(gf, &coeffs, prec)?;
        // shift back: substitute tau = t - gamma
        let num_t = unshift(gf, &num, gamma);
        let den_t = unshift(gf, &den, gamma);
        if den_t.is_empty() {
            return None;
        }
        // one common scaling: make the denominator monic, then both sides of
        // a Galois-stable ratio descend to the prime field
        let scale = gf.inv(den_t.last().unwrap())?;
        let num_t: Vec<Vec<u64>> = num_t.iter().map(|c| gf.mul(c, &scale)).collect();
        let den_t: Vec<Vec<u64>> = den_t.iter().map(|c| gf.mul(c, &scale)).collect();
        let num_p = descend(gf, &num_t)?;
        let den_p = descend(gf, &den_t)?;
        if den_p.is_empty() {
            return None;
        }
        let num_e: Vec<Elem> = num_p.into_iter().map(Elem::Int).collect();
        let den_e: Vec<Elem> = den_p.into_iter().map(Elem::Int).collect();
        out.push(field.frac_from_polys(num_e, den_e).ok()?);
    }
    Some(out)
}

/// Extended-Euclid Padé approximation: `num/den = series mod tau^prec` with
/// `deg num, deg den <= (prec - 1) / 2`.
fn pade(gf: &Gf, series: &[Vec<u64>], prec: usize) -> Option<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    let bound = (prec - 1) / 2;
    // r0 = tau^prec, r1 = series
    let mut r0: Vec<Vec<u64>> = vec![gf.zero(); prec + 1];
    r0[prec] = gf.from_base(1);
    let mut r1: Vec<Vec<u64>> = series.to_vec();
    trim_gfpoly(gf, &mut r1);
    let mut t0: Vec<Vec<u64>> = Vec::new();
    let mut t1: Vec<Vec<u64>> = vec![gf.from_base(1)];
    while gfpoly_deg(&r1) > bound as i64 {
        let (q, rem) = gfpoly_divrem(gf, &r0, &r1)?;
        r0 = r1;
        r1 = rem;
        // t_next = t0 - q t1
        let qt = gfpoly_mul(gf, &q, &t1);
        let mut next = t0.clone();
        if next.len() < qt.len() {
            next.resize(qt.len(), gf.zero());
        }
        for (i, c) in qt.iter().enumerate() {
            gf.sub_assign(&mut next[i], c);
        }
        trim_gfpoly(gf, &mut next);
        t0 = t1;
        t1 = next;
    }
    if gfpoly_deg(&t1) > bound as i64 {
        return None;
    }
    if t1.is_empty() || gf.is_zero(&t1[0]) {
        return None; // denominator must be a unit at tau = 0
    }
    Some((r1, t1))
}

fn gfpoly_deg(a: &[Vec<u64>]) -> i64 {
    a.len() as i64 - 1
}

fn trim_gfpoly(gf: &Gf, a: &mut Vec<Vec<u64>>) {
    while a.last().map(|c| gf.is_zero(c)).unwrap_or(false) {
        a.pop();
    }
}

fn gfpoly_mul(gf: &Gf, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![gf.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if gf.is_zero(ai) {
            continue;
        }
        for (k, bk) in b.iter().enumerate() {
            let prod = gf.mul(ai, bk);
            gf.add_assign(&mut out[i + k], &prod);
        }
    }
    let mut out = out;
    trim_gfpoly(gf, &mut out);
    out
}

fn gfpoly_divrem(
    gf: &Gf,
    a: &[Vec<u64>],
    b: &[Vec<u64>],
) -> Option<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    if b.is_empty() {
        return None;
    }
    let mut rem: Vec<Vec<u64>> = a.to_vec();
    trim_gfpoly(gf, &mut rem);
    if rem.len() < b.len() {
        return Some((Vec::new(), rem));
    }
    let lead_inv = gf.inv(b.last().unwrap())?;
    let mut quot = vec![gf.zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let c = gf.mul(rem.last().unwrap(), &lead_inv);
        let shift = rem.len() - b.len();
        if !gf.is_zero(&c) {
            quot[shift] = c.clone();
            for (k, bk) in b.iter().enumerate() {
                let sub = gf.mul(&c, bk);
                gf.sub_assign(&mut rem[shift + k], &sub);
            }
        }
        rem.pop();
        trim_gfpoly(gf, &mut rem);
        if rem.len() < b.len() {
            break;
        }
    }
    trim_gfpoly(gf, &mut quot);
    Some((quot, rem))
}

/// Substitute `tau = t - gamma` into a polynomial with `F_{p^j}` coefficients.
fn unshift(gf: &Gf, poly: &[Vec<u64>], gamma: &[u64]) -> Vec<Vec<u64>> {
    // Horner in (t - gamma)
    let neg_gamma = gf.neg(gamma);
    let mut out: Vec<Vec<u64>> = Vec::new();
    for c in poly.iter().rev() {
        let mut next = vec![gf.zero(); out.len() + 1];
        for (i, coeff) in out.iter().enumerate() {
            let scaled = gf.mul(coeff, &neg_gamma);
            gf.add_assign(&mut next[i], &scaled);
            gf.add_assign(&mut next[i + 1], coeff);
        }
        gf.add_assign(&mut next[0], c);
        out = next;
    }
    trim_gfpoly(gf, &mut out);
    out
}

/// Coefficients must already lie in the prime field; reject otherwise
/// (signals a bad specialization, handled by the caller's fallback).
fn descend(_gf: &Gf, poly: &[Vec<u64>]) -> Option<Poly> {
    let mut out = Vec::with_capacity(poly.len());
    for c in poly {
        if c[1..].iter().any(|&x| x != 0) {
            return None;
        }
        out.push(c[0]);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// exact verification over F_p[t]
// ---------------------------------------------------------------------------

/// Clear the candidate vector to polynomials and check `P w = 0` exactly.
fn verify_kernel_vector(p: u64, rows: &[Vec<Poly>], v: &[Elem], field: &Arc<Field>) -> bool {
    let Some(w) = clear_vector(p, v) else {
        return false;
    };
    let _ = field;
    for row in rows {
        if !dot_is_zero(p, row, &w) {
            return false;
        }
    }
    true
}

/// `rows` are the cleared rows of `[M | b]`; check `M x = b` exactly, i.e.
/// `row[..cols] . x - row[cols] = 0` after clearing `x`.
fn verify_solution(p: u64, rows: &[Vec<Poly>], x: &[Elem], field: &Arc<Field>) -> bool {
    let Some((w, den)) = clear_vector_with_den(p, x) else {
        return false;
    };
    let _ = field;
    let cols = x.len();
    for row in rows {
        // sum row[c] w[c] - den * row[cols] = 0
        let mut acc: Poly = Vec::new();
        for (c, wc) in w.iter().enumerate() {
            if wc.is_empty() || row[c].is_empty() {
                continue;
            }
            acc = poly_add(p, &acc, &poly_mul(p, &row[c], wc));
        }
        let rhs = poly_mul(p, &row[cols], &den);
        if poly_sub(p, &acc, &rhs).iter().any(|&c| c != 0) {
            return false;
        }
    }
    true
}

fn dot_is_zero(p: u64, row: &[Poly], w: &[Poly]) -> bool {
    let mut acc: Poly = Vec::new();
    for (a, b) in row.iter().zip(w) {
        if a.is_empty() || b.is_empty() {
            continue;
        }
        acc = poly_add(p, &acc, &poly_mul(p, a, b));
    }
    acc.iter().all(|&c| c == 0)
}

fn poly_add(p: u64, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        out[i] = (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p;
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(p: u64, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        out[i] =
            (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0) % p) % p;
    }
    poly_trim(&mut out);
    out
}

fn clear_vector(p: u64, v: &[Elem]) -> Option<Vec<Poly>> {
    clear_vector_with_den(p, v).map(|(w, _)| w)
}

fn clear_vector_with_den(p: u64, v: &[Elem]) -> Option<(Vec<Poly>, Poly)> {
    let mut den: Poly = vec![1];
    for e in v {
        let Elem::Frac(fr) = e else { return None };
        let d = poly_of(&fr.den);
        let g = poly_gcd(p, &den, &d);
        let (extra, _) = poly_divrem(p, &d, &g);
        den = poly_mul(p, &den, &extra);
    }
    let mut out = Vec::with_capacity(v.len());
    for e in v {
        let Elem::Frac(fr) = e else { return None };
        if fr.num.is_empty() {
            out.push(Vec::new());
            continue;
        }
        let (scale, _) = poly_divrem(p, &den, &poly_of(&fr.den));
        out.push(poly_mul(p, &poly_of(&fr.num), &scale));
    }
    Some((out, den))
}

// helper used by tests to expose the internal route
#[doc(hidden)]
pub fn kernel_lifted_for_tests(m: &Matrix) -> Option<Vec<Vec<Elem>>> {
    kernel_lifted(m)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kernel_rref, solve_rref, Matrix};

    fn mat(field: &Arc<Field>, rows: &[&[&str]]) -> Matrix {
        let data: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|s| field.parse_elem(s).unwrap()).collect())
            .collect();
        Matrix::from_rows(field.clone(), data)
    }

    #[test]
    fn lifted_kernel_agrees_with_naive() {
        let f = Field::parse("GF(3)(t)").unwrap();
        let m = mat(
            &f,
            &[
                &["t", "1", "t^2+1", "0"],
                &["t^2", "t", "t^3+t", "1"],
                &["0", "0", "1", "t"],
            ],
        );
        let naive = kernel_rref(&m);
        let lifted = kernel_lifted(&m).expect("fast path");
        assert_eq!(naive, lifted);
    }

    #[test]
    fn lifted_kernel_with_rank_drop_at_small_points() {
        // the pivot structure degenerates at t = 0 and t = 1; the search
        // must move on and still agree with the exact route
        let f = Field::parse("GF(2)(t)").unwrap();
        let m = mat(
            &f,
            &[
                &["t^2+t", "1", "t"],
                &["0", "t^2+t", "1"],
            ],
        );
        let naive = kernel_rref(&m);
        let lifted = kernel_lifted(&m).expect("fast path");
        assert_eq!(naive, lifted);
    }

    #[test]
    fn lifted_solve_agrees_with_naive() {
        let f = Field::parse("GF(5)(t)").unwrap();
        let m = mat(
            &f,
            &[
                &["t", "1", "2"],
                &["1", "t", "t^2"],
            ],
        );
        let b = vec![
            f.parse_elem("t^2+1").unwrap(),
            f.parse_elem("3*t").unwrap(),
        ];
        let naive = solve_rref(&m, &b).expect("consistent");
        let lifted = solve_lifted(&m, &b).expect("fast path");
        // both must solve the system (solutions may differ in the free part,
        // but with this pivot structure the deterministic solution is unique)
        assert_eq!(naive, lifted);
    }

    #[test]
    fn lifted_kernel_random_cross_check() {
        let f = Field::parse("GF(3)(t)").unwrap();
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..4 {
            let rows: Vec<Vec<Elem>> = (0..6)
                .map(|_| {
                    (0..8)
                        .map(|_| {
                            let c: Vec<String> = (0..3)
                                .map(|k| format!("{}*t^{k}", next() % 3))
                                .collect();
                            f.parse_elem(&c.join("+")).unwrap()
                        })
                        .collect()
                })
                .collect();
            let m = Matrix::from_rows(f.clone(), rows);
            let naive = kernel_rref(&m);
            let lifted = kernel_lifted(&m).expect("fast path");
            assert_eq!(naive, lifted);
        }
    }
}
