//! Homogeneous trivariate polynomials in `x, y, z` with exact field
//! coefficients, plus the text grammar used by the CLI and by serialized
//! bundle specs and certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SyzError};
use crate::field::{needs_parens, parse_expr, Elem, Expr, Field};

/// Exponent triple `(i, j, k)` for `x^i y^j z^k`.
pub type Exps = (u32, u32, u32);

/// A homogeneous polynomial. The zero polynomial carries an explicit degree
/// tag; nonzero coefficients only.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoly {
    pub field: Arc<Field>,
    pub degree: u32,
    terms: BTreeMap<Exps, Elem>,
}

impl HomogeneousPoly {
    pub fn zero(field: Arc<Field>, degree: u32) -> Self {
        HomogeneousPoly {
            field,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: Arc<Field>, exps: Exps, coeff: Elem) -> Self {
        let degree = exps.0 + exps.1 + exps.2;
        let mut terms = BTreeMap::new();
        if !field.is_zero(&coeff) {
            terms.insert(exps, coeff);
        }
        HomogeneousPoly {
            field,
            degree,
            terms,
        }
    }

    pub fn from_terms(
        field: Arc<Field>,
        degree: u32,
        it: impl IntoIterator<Item = (Exps, Elem)>,
    ) -> Result<Self> {
        let mut p = HomogeneousPoly::zero(field, degree);
        for (e, c) in it {
            if e.0 + e.1 + e.2 != degree {
                return Err(SyzError::Degree(format!(
                    "term x^{} y^{} z^{} is not of degree {degree}",
                    e.0, e.1, e.2
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exps) -> Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub(crate) fn add_term(&mut self, e: Exps, c: Elem) {
        debug_assert_eq!(e.0 + e.1 + e.2, self.degree);
        let f = self.field.clone();
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !f.is_zero(&c) {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(o.get(), &c);
                if f.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(SyzError::Degree(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut out = HomogeneousPoly {
            field: self.field.clone(),
            degree,
            terms: self.terms.clone(),
        };
        if self.is_zero() {
            out.terms.clear();
            out.degree = degree;
            for (e, c) in &other.terms {
                out.add_term(*e, c.clone());
            }
            return Ok(out);
        }
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        HomogeneousPoly {
            field: self.field.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, f.neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return HomogeneousPoly::zero(self.field.clone(), self.degree);
        }
        HomogeneousPoly {
            field: self.field.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (*e, f.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        let mut out = HomogeneousPoly::zero(self.field.clone(), self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = (ea.0 + eb.0, ea.1 + eb.1, ea.2 + eb.2);
                out.add_term(e, f.mul(ca, cb));
            }
        }
        out
    }

    pub fn mul_monomial(&self, exps: Exps, coeff: &Elem) -> Self {
        let f = &self.field;
        let mut out = HomogeneousPoly::zero(
            self.field.clone(),
            self.degree + exps.0 + exps.1 + exps.2,
        );
        if f.is_zero(coeff) {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms
                .insert((e.0 + exps.0, e.1 + exps.1, e.2 + exps.2), f.mul(c, coeff));
        }
        out
    }

    /// The Frobenius power map: exponents scale by `q = p^e`, coefficients go
    /// to their `q`-th power (so named parameters map as `t -> t^q`).
    pub fn frobenius_power(&self, e: u32) -> Self {
        if e == 0 {
            return self.clone();
        }
        let f = &self.field;
        let q = f.characteristic().checked_pow(e).expect("q overflow") as u32;
        HomogeneousPoly {
            field: self.field.clone(),
            degree: self.degree * q,
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| (((ex.0 * q), (ex.1 * q), (ex.2 * q)), f.frobenius(c, e)))
                .collect(),
        }
    }

    /// Specialize coefficients through a field homomorphism.
    pub fn map_coeffs(
        &self,
        target: &Arc<Field>,
        images: &BTreeMap<String, Elem>,
    ) -> Result<Self> {
        let mut out = HomogeneousPoly::zero(target.clone(), self.degree);
        for (e, c) in &self.terms {
            let c2 = self.field.map_elem(target, images, c)?;
            out.add_term(*e, c2);
        }
        Ok(out)
    }

    /// Exponent of a variable in the single term of a monomial-like use.
    pub fn max_exp(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|e| match var {
                0 => e.0,
                1 => e.1,
                _ => e.2,
            })
            .max()
            .unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

/// Parse a polynomial in `x, y, z` over `field`. Coefficients may use the
/// field's transcendentals and extension generator; `/` is allowed only with
/// a constant divisor. All terms must share one total degree in `x, y, z`.
pub fn parse_poly(text: &str, field: &Arc<Field>) -> Result<HomogeneousPoly> {
    let expr = parse_expr(text)?;
    let multi = eval_multi(&expr, field)?;
    let mut degree: Option<u32> = None;
    for (e, _) in multi.terms.iter() {
        let d = e.0 + e.1 + e.2;
        match degree {
            None => degree = Some(d),
            Some(d0) if d0 != d => {
                return Err(SyzError::Degree(format!(
                    "inhomogeneous polynomial: found terms of degree {d0} and {d}"
                )))
            }
            _ => {}
        }
    }
    let degree = degree.unwrap_or(0);
    HomogeneousPoly::from_terms(field.clone(), degree, multi.terms)
}

/// Lenient variant: split the parsed expression into homogeneous pieces by
/// total degree, ascending. Used by resolvers that need to inspect garbled
/// inputs instead of rejecting them.
pub fn parse_poly_graded(text: &str, field: &Arc<Field>) -> Result<Vec<HomogeneousPoly>> {
    let expr = parse_expr(text)?;
    let multi = eval_multi(&expr, field)?;
    let mut by_degree: BTreeMap<u32, Vec<(Exps, Elem)>> = BTreeMap::new();
    for (e, c) in multi.terms {
        by_degree.entry(e.0 + e.1 + e.2).or_default().push((e, c));
    }
    by_degree
        .into_iter()
        .map(|(d, terms)| HomogeneousPoly::from_terms(field.clone(), d, terms))
        .collect()
}

/// Intermediate multi-degree polynomial used during evaluation.
struct Multi {
    terms: BTreeMap<Exps, Elem>,
}

impl Multi {
    fn constant(field: &Field, c: Elem) -> Multi {
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert((0, 0, 0), c);
        }
        Multi { terms }
    }

    fn var(idx: usize, field: &Field) -> Multi {
        let mut terms = BTreeMap::new();
        let e = match idx {
            0 => (1, 0, 0),
            1 => (0, 1, 0),
            _ => (0, 0, 1),
        };
        terms.insert(e, field.one());
        Multi { terms }
    }

    fn as_constant(&self, field: &Field) -> Option<Elem> {
        if self.terms.is_empty() {
            return Some(field.zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&(0, 0, 0)) {
                return Some(c.clone());
            }
        }
        None
    }
}

fn multi_add(field: &Field, a: Multi, b: &Multi, negate: bool) -> Multi {
    let mut out = a;
    for (e, c) in &b.terms {
        let c = if negate { field.neg(c) } else { c.clone() };
        match out.terms.entry(*e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !field.is_zero(&c) {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(o.get(), &c);
                if field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
    out
}

fn multi_mul(field: &Field, a: &Multi, b: &Multi) -> Multi {
    let mut out = Multi {
        terms: BTreeMap::new(),
    };
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e = (ea.0 + eb.0, ea.1 + eb.1, ea.2 + eb.2);
            let c = field.mul(ca, cb);
            match out.terms.entry(e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    if !field.is_zero(&c) {
                        v.insert(c);
                    }
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = field.add(o.get(), &c);
                    if field.is_zero(&s) {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
    }
    out
}

fn eval_multi(expr: &Expr, field: &Arc<Field>) -> Result<Multi> {
    match expr {
        Expr::Int(n) => Ok(Multi::constant(field, field.from_int(*n))),
        Expr::Sym(name, pos) => match name.as_str() {
            "x" => Ok(Multi::var(0, field)),
            "y" => Ok(Multi::var(1, field)),
            "z" => Ok(Multi::var(2, field)),
            _ => field
                .symbol(name)
                .map(|e| Multi::constant(field, e))
                .map_err(|_| SyzError::Parse {
                    pos: *pos,
                    msg: format!("unknown identifier {name:?}"),
                }),
        },
        Expr::Neg(a) => {
            let m = eval_multi(a, field)?;
            Ok(multi_add(
                field,
                Multi {
                    terms: BTreeMap::new(),
                },
                &m,
                true,
            ))
        }
        Expr::Add(a, b) => {
            let ma = eval_multi(a, field)?;
            let mb = eval_multi(b, field)?;
            Ok(multi_add(field, ma, &mb, false))
        }
        Expr::Sub(a, b) => {
            let ma = eval_multi(a, field)?;
            let mb = eval_multi(b, field)?;
            Ok(multi_add(field, ma, &mb, true))
        }
        Expr::Mul(a, b) => {
            let ma = eval_multi(a, field)?;
            let mb = eval_multi(b, field)?;
            Ok(multi_mul(field, &ma, &mb))
        }
        Expr::Div(a, b, pos) => {
            let ma = eval_multi(a, field)?;
            let mb = eval_multi(b, field)?;
            let c = mb.as_constant(field).ok_or_else(|| SyzError::Parse {
                pos: *pos,
                msg: "division by a non-constant polynomial".into(),
            })?;
            if field.is_zero(&c) {
                return Err(SyzError::Parse {
                    pos: *pos,
                    msg: "division by zero".into(),
                });
            }
            let inv = field.inv(&c)?;
            Ok(multi_mul(field, &ma, &Multi::constant(field, inv)))
        }
        Expr::Pow(a, n) => {
            let ma = eval_multi(a, field)?;
            let mut acc = Multi::constant(field, field.one());
            for _ in 0..*n {
                acc = multi_mul(field, &acc, &ma);
            }
            Ok(acc)
        }
    }
}

// ---------------------------------------------------------------------------
// display
// ---------------------------------------------------------------------------

impl fmt::Display for HomogeneousPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.field;
        let mut first = true;
        // descending x, then y, then z exponent keeps the familiar ordering
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = field.elem_to_string(c);
            let mut parts: Vec<String> = Vec::new();
            if cs != "1" || (e.0 == 0 && e.1 == 0 && e.2 == 0) {
                if needs_parens(&cs) {
                    parts.push(format!("({cs})"));
                } else {
                    parts.push(cs);
                }
            }
            for (name, exp) in [("x", e.0), ("y", e.1), ("z", e.2)] {
                match exp {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    n => parts.push(format!("{name}^{n}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fermat_quintic() {
        let f = Field::parse("GF(2)").unwrap();
        let p = parse_poly("x^5+y^5+z^5", &f).unwrap();
        assert_eq!(p.degree, 5);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn parse_with_transcendental_coeffs() {
        let f = Field::parse("GF(2)(s)(t)").unwrap();
        let p = parse_poly("t*z^2 + s*x*y", &f).unwrap();
        assert_eq!(p.degree, 2);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn inhomogeneous_rejected() {
        let f = Field::parse("GF(2)").unwrap();
        assert!(matches!(
            parse_poly("x^2 + y^3", &f),
            Err(SyzError::Degree(_))
        ));
    }

    #[test]
    fn unknown_identifier_positioned() {
        let f = Field::parse("GF(2)").unwrap();
        match parse_poly("x^2 + w*y", &f) {
            Err(SyzError::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn frobenius_power_rules() {
        let f = Field::parse("GF(2)(s)(t)").unwrap();
        let p = parse_poly("t*z^2+s*x*y", &f).unwrap();
        let q = p.frobenius_power(1);
        let expect = parse_poly("t^2*z^4+s^2*x^2*y^2", &f).unwrap();
        assert_eq!(q, expect);
        assert_eq!(p.frobenius_power(0), p);
        // x^2 -> x^4 at p = 2, e = 1
        let f2 = Field::parse("GF(2)").unwrap();
        let x2 = parse_poly("x^2", &f2).unwrap();
        assert_eq!(x2.frobenius_power(1), parse_poly("x^4", &f2).unwrap());
    }

    #[test]
    fn frobenius_multiplicative() {
        let f = Field::parse("GF(3)(t)").unwrap();
        let a = parse_poly("x^2+t*y*z", &f).unwrap();
        let b = parse_poly("t^2*x+z", &f).unwrap();
        let lhs = a.mul(&b).frobenius_power(1);
        let rhs = a.frobenius_power(1).mul(&b.frobenius_power(1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_round_trip() {
        let f = Field::parse("GF(3)(t)").unwrap();
        for src in ["x^8+y^8+z^8+x^3*z^5", "t*x*y+2*z^2", "(t^2+1)*x^3"] {
            let p = parse_poly(src, &f).unwrap();
            let s = p.to_string();
            assert_eq!(parse_poly(&s, &f).unwrap(), p, "round trip {src} -> {s}");
        }
    }
}
