//! Sparse span checks: decide whether a set of sparse columns spans the full
//! coordinate space. Saturation-style certificates (smoothness, zero-freeness
//! of bundle generators, nowhere-vanishing sections) reduce to this with
//! columns that are shifted copies of few-term polynomials, so a sparse
//! elimination keyed by leading row is much faster than dense RREF.

use std::collections::HashMap;

use crate::field::{Elem, Field};

/// A sparse column: strictly increasing row indices with nonzero entries.
pub type SparseCol = Vec<(usize, Elem)>;

/// Returns true iff the columns span the full space of dimension `nrows`.
/// Deterministic: columns are consumed in the given order.
pub fn spans_full_space(field: &Field, columns: &[SparseCol], nrows: usize) -> bool {
    let mut pivots: HashMap<usize, SparseCol> = HashMap::new();
    for col in columns {
        let mut col = col.clone();
        loop {
            // reduce against stored pivots
            let Some(&(lead_row, _)) = col.first() else {
                break;
            };
            match pivots.get(&lead_row) {
                Some(stored) => {
                    let c = col[0].1.clone();
                    col = axpy(field, &col, stored, &field.neg(&c));
                }
                None => {
                    // normalize to leading 1 and store
                    let inv = field.inv(&col[0].1).expect("nonzero lead");
                    for (_, v) in col.iter_mut() {
                        *v = field.mul(v, &inv);
                    }
                    pivots.insert(lead_row, col);
                    break;
                }
            }
        }
        if pivots.len() == nrows {
            return true;
        }
    }
    pivots.len() == nrows
}

/// `a + scale * b` for sparse columns (sorted merge).
fn axpy(field: &Field, a: &SparseCol, b: &SparseCol, scale: &Elem) -> SparseCol {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ra, _)), Some(&(rb, _))) if ra == rb => {
                let v = field.add(&a[i].1, &field.mul(scale, &b[j].1));
                if !field.is_zero(&v) {
                    out.push((ra, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ra, _)), Some(&(rb, _))) if ra < rb => {
                out.push((ra, a[i].1.clone()));
                i += 1;
            }
            (Some(_), Some(_)) => {
                let v = field.mul(scale, &b[j].1);
                if !field.is_zero(&v) {
                    out.push((b[j].0, v));
                }
                j += 1;
            }
            (Some(_), None) => {
                out.push((a[i].0, a[i].1.clone()));
                i += 1;
            }
            (None, Some(_)) => {
                let v = field.mul(scale, &b[j].1);
                if !field.is_zero(&v) {
                    out.push((b[j].0, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_small_space() {
        let f = Field::parse("GF(2)").unwrap();
        let one = f.one();
        // e0 + e1, e1, e2 spans F_2^3
        let cols = vec![
            vec![(0, one.clone()), (1, one.clone())],
            vec![(1, one.clone())],
            vec![(2, one.clone())],
        ];
        assert!(spans_full_space(&f, &cols, 3));
        // missing row 2
        let cols2 = vec![
            vec![(0, one.clone()), (1, one.clone())],
            vec![(1, one.clone())],
        ];
        assert!(!spans_full_space(&f, &cols2, 3));
    }
}
