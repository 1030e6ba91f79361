//! Two-chart Cech `H^1` of twisted structure sheaves on a plane curve, the
//! semilinear Frobenius (Hasse-Witt) action, Fitting projections, connecting
//! classes of rank-2 extensions and coboundary membership tests.
//!
//! With the cover `D_+(u), D_+(v)` and reduction variable `w`, a basis of
//! `H^1(O(j))` is given by the fractional monomials `w^m / (u^a v^b)` with
//! `a, b >= 1`, `m <= d - 1`, `m - a - b = j`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bundle::BundleSpec;
use crate::curve::{PlaneCurve, RingElement};
use crate::error::{Result, SyzError};
use crate::field::{as_frac, Elem, Field};
use crate::linalg::{self, Matrix};
use crate::poly::{Exps, HomogeneousPoly};
use crate::semilinear::{FittingDecomposition, SemilinearMap};

/// Basis label `(a, b, m)` for `w^m / (u^a v^b)`.
pub type H1Label = (u32, u32, u32);

/// A class in the monomial basis of `H^1(O(twist))`; coordinates are unique,
/// classes are equal iff coordinates agree.
#[derive(Debug, Clone, PartialEq)]
pub struct CechClass {
    pub curve: Arc<PlaneCurve>,
    pub twist: i64,
    coords: BTreeMap<(u32, u32), Elem>,
}

impl CechClass {
    pub fn zero(curve: Arc<PlaneCurve>, twist: i64) -> CechClass {
        CechClass {
            curve,
            twist,
            coords: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Elem {
        self.coords
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| self.curve.field().zero())
    }

    pub fn add_coeff(&mut self, a: u32, b: u32, c: Elem) {
        let field = self.curve.field().clone();
        match self.coords.entry((a, b)) {
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

    pub fn add(&self, other: &CechClass) -> Result<CechClass> {
        if self.twist != other.twist {
            return Err(SyzError::Degree("twist mismatch in class addition".into()));
        }
        let mut out = self.clone();
        for ((a, b), c) in &other.coords {
            out.add_coeff(*a, *b, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Elem) -> CechClass {
        let field = self.curve.field();
        let mut out = CechClass::zero(self.curve.clone(), self.twist);
        if field.is_zero(c) {
            return out;
        }
        for ((a, b), v) in &self.coords {
            out.coords.insert((*a, *b), field.mul(v, c));
        }
        out
    }

    /// Coordinates relative to `h1_basis(curve, twist)` order.
    pub fn coord_vector(&self) -> Vec<Elem> {
        let basis = h1_basis(&self.curve, self.twist);
        let field = self.curve.field();
        basis
            .iter()
            .map(|(a, b, _)| self.coeff(*a, *b))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|c| field.add(&c, &field.zero()))
            .collect()
    }

    pub fn from_coord_vector(
        curve: &Arc<PlaneCurve>,
        twist: i64,
        v: &[Elem],
    ) -> CechClass {
        let basis = h1_basis(curve, twist);
        assert_eq!(v.len(), basis.len());
        let mut out = CechClass::zero(curve.clone(), twist);
        for ((a, b, _), c) in basis.iter().zip(v) {
            out.add_coeff(*a, *b, c.clone());
        }
        out
    }

    /// Representative cochain on the overlap chart.
    pub fn representative(&self) -> Cochain {
        let field = self.curve.field().clone();
        let w = self.curve.w;
        let terms = self
            .coords
            .iter()
            .map(|((a, b), c)| {
                let m = (self.twist + *a as i64 + *b as i64) as u32;
                let mut arr = [0u32; 3];
                arr[w.index()] = m;
                let num =
                    HomogeneousPoly::monomial(field.clone(), (arr[0], arr[1], arr[2]), c.clone());
                (num, *a, *b)
            })
            .collect();
        Cochain {
            curve: self.curve.clone(),
            terms,
        }
    }

    /// Equality up to a nonzero scalar, tested by cross-multiplication.
    pub fn projectively_equal(&self, other: &CechClass) -> bool {
        if self.twist != other.twist {
            return false;
        }
        if self.is_zero() || other.is_zero() {
            return self.is_zero() == other.is_zero();
        }
        let field = self.curve.field();
        let va = self.coord_vector();
        let vb = other.coord_vector();
        let i0 = va.iter().position(|c| !field.is_zero(c)).unwrap();
        if field.is_zero(&vb[i0]) {
            return false;
        }
        // va * vb[i0] == vb * va[i0]
        for (a, b) in va.iter().zip(&vb) {
            let lhs = field.mul(a, &vb[i0]);
            let rhs = field.mul(b, &va[i0]);
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// The part of the class whose coefficients have the given degree in the
    /// outermost transcendental; coefficients must be polynomial.
    pub fn transcendental_component(&self, k: usize) -> Result<CechClass> {
        let field = self.curve.field().clone();
        if field.transcendentals().is_empty() {
            return Err(SyzError::Unsupported(
                "no transcendental to take components in".into(),
            ));
        }
        let mut out = CechClass::zero(self.curve.clone(), self.twist);
        for ((a, b), c) in &self.coords {
            let fr = as_frac(c);
            if fr.den.len() != 1 {
                return Err(SyzError::Invalid(
                    "class coefficients must be polynomial in the parameter".into(),
                ));
            }
            if let Some(inner) = fr.num.get(k) {
                let mut num = vec![inner.clone()];
                for _ in 0..k {
                    num.insert(0, zero_like(&fr.den[0]));
                }
                let lifted = field.frac_from_polys(num, fr.den.clone())?;
                out.add_coeff(*a, *b, lifted);
            }
        }
        Ok(out)
    }

    /// Largest transcendental degree appearing in the coefficients.
    pub fn transcendental_degree(&self) -> Result<usize> {
        let mut deg = 0usize;
        for c in self.coords.values() {
            let fr = as_frac(c);
            if fr.den.len() != 1 {
                return Err(SyzError::Invalid(
                    "class coefficients must be polynomial in the parameter".into(),
                ));
            }
            deg = deg.max(fr.num.len().saturating_sub(1));
        }
        Ok(deg)
    }

    pub fn serialize_entries(&self) -> Vec<ClassEntry> {
        let field = self.curve.field();
        self.coords
            .iter()
            .map(|((a, b), c)| ClassEntry {
                a: *a,
                b: *b,
                m: (self.twist + *a as i64 + *b as i64) as u32,
                coefficient: field.elem_to_string(c),
            })
            .collect()
    }

    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let field = self.curve.field();
        let (u, v) = self.curve.cover;
        let w = self.curve.w;
        self.coords
            .iter()
            .map(|((a, b), c)| {
                let m = (self.twist + *a as i64 + *b as i64) as u32;
                let cs = field.elem_to_string(c);
                let coeff = if cs == "1" {
                    String::new()
                } else if crate::field::needs_parens(&cs) {
                    format!("({cs})*")
                } else {
                    format!("{cs}*")
                };
                format!(
                    "{coeff}{}^{m}/({}^{a}*{}^{b})",
                    w.name(),
                    u.name(),
                    v.name()
                )
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn zero_like(e: &Elem) -> Elem {
    match e {
        Elem::Int(_) => Elem::Int(0),
        Elem::Ext(_) => Elem::Ext(Vec::new()),
        Elem::Frac(f) => Elem::Frac(Box::new(crate::field::Frac {
            num: Vec::new(),
            den: f.den.clone(),
        })),
    }
}

/// Serialized class entry `{a, b, m, coefficient}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassEntry {
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub coefficient: String,
}

/// Ordered basis of `H^1(O(j))` for the two-chart cover.
pub fn h1_basis(curve: &Arc<PlaneCurve>, j: i64) -> Vec<H1Label> {
    let d = curve.degree() as i64;
    let mut out = Vec::new();
    for a in 1..=(d - 1 - j).max(0) {
        for b in 1..=(d - 1 - j - a).max(0) {
            let m = j + a + b;
            if m >= 0 && m <= d - 1 {
                out.push((a as u32, b as u32, m as u32));
            }
        }
    }
    out
}

/// A finite sum of fractional terms `numerator / (u^a v^b)` on the overlap
/// chart; every term must have the same homogeneous total degree.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub curve: Arc<PlaneCurve>,
    pub terms: Vec<(HomogeneousPoly, u32, u32)>,
}

impl Cochain {
    pub fn twist(&self) -> Result<i64> {
        let mut tw: Option<i64> = None;
        for (num, a, b) in &self.terms {
            if num.is_zero() {
                continue;
            }
            let t = num.degree as i64 - *a as i64 - *b as i64;
            match tw {
                None => tw = Some(t),
                Some(t0) if t0 != t => {
                    return Err(SyzError::Degree(format!(
                        "inhomogeneous cochain: twists {t0} and {t}"
                    )))
                }
                _ => {}
            }
        }
        Ok(tw.unwrap_or(0))
    }

    /// Reduce to `H^1` coordinates: normal-form each numerator via the curve
    /// equation, split off pure-chart (coboundary) monomials, keep the rest.
    pub fn nf(&self) -> Result<CechClass> {
        let twist = self.twist()?;
        let curve = &self.curve;
        let (u, v) = curve.cover;
        let mut class = CechClass::zero(curve.clone(), twist);
        for (num, a, b) in &self.terms {
            if num.is_zero() {
                continue;
            }
            let reduced = curve.nf(num);
            for (e, c) in reduced.terms() {
                let iu = exp(e, u.index());
                let iv = exp(e, v.index());
                if iu >= *a || iv >= *b {
                    continue; // lives on one chart, a coboundary
                }
                class.add_coeff(a - iu, b - iv, c.clone());
            }
        }
        Ok(class)
    }
}

fn exp(e: &Exps, idx: usize) -> u32 {
    match idx {
        0 => e.0,
        1 => e.1,
        _ => e.2,
    }
}

/// Matrix of the `p`-semilinear Frobenius on `H^1(O)` in the `h1_basis`
/// order: each basis monomial is raised to the `p`-th power and reduced.
pub fn hasse_witt(curve: &Arc<PlaneCurve>) -> Result<SemilinearMap> {
    let field = curve.field().clone();
    let p = field.characteristic() as u32;
    let basis = h1_basis(curve, 0);
    let n = basis.len();
    let mut m = Matrix::zero(field.clone(), n, n);
    let index: BTreeMap<(u32, u32), usize> = basis
        .iter()
        .enumerate()
        .map(|(i, (a, b, _))| ((*a, *b), i))
        .collect();
    for (col, (a, b, mexp)) in basis.iter().enumerate() {
        let mut arr = [0u32; 3];
        arr[curve.w.index()] = mexp * p;
        let num = HomogeneousPoly::monomial(field.clone(), (arr[0], arr[1], arr[2]), field.one());
        let cochain = Cochain {
            curve: curve.clone(),
            terms: vec![(num, a * p, b * p)],
        };
        let class = cochain.nf()?;
        for ((aa, bb), c) in class.coords {
            let row = index[&(aa, bb)];
            *m.at_mut(row, col) = c;
        }
    }
    SemilinearMap::new(m)
}

/// Frobenius image of a twist-0 class by raising a representative cocycle to
/// the `p`-th power `e` times; works with transcendental coefficients.
pub fn frobenius_on_class(class: &CechClass, e: u32) -> Result<CechClass> {
    if class.twist != 0 {
        return Err(SyzError::Unsupported(
            "frobenius on classes of nonzero twist".into(),
        ));
    }
    let curve = class.curve.clone();
    let field = curve.field().clone();
    let p = field.characteristic() as u32;
    let mut current = class.clone();
    for _ in 0..e {
        let terms = current
            .coords
            .iter()
            .map(|((a, b), c)| {
                let m = a + b;
                let mut arr = [0u32; 3];
                arr[curve.w.index()] = m * p;
                let num = HomogeneousPoly::monomial(
                    field.clone(),
                    (arr[0], arr[1], arr[2]),
                    field.frobenius(c, 1),
                );
                (num, a * p, b * p)
            })
            .collect();
        current = Cochain {
            curve: curve.clone(),
            terms,
        }
        .nf()?;
    }
    Ok(current)
}

/// Split a class (with coefficients polynomial in the parameter) along a
/// Fitting decomposition computed over the constant field; each parameter-
/// homogeneous component is decomposed independently and the pieces resum.
pub fn class_fitting_projection(
    class: &CechClass,
    fitting: &FittingDecomposition,
    constant_curve: &Arc<PlaneCurve>,
) -> Result<(CechClass, CechClass)> {
    let field = class.curve.field().clone();
    let constant_field = constant_curve.field().clone();
    if field.transcendentals().is_empty() {
        // already constant: project directly
        let v = class.coord_vector();
        let (s, n) = fitting.project(&field, &v)?;
        return Ok((
            CechClass::from_coord_vector(&class.curve, class.twist, &s),
            CechClass::from_coord_vector(&class.curve, class.twist, &n),
        ));
    }
    if field.transcendentals().len() != 1 {
        return Err(SyzError::Unsupported(
            "fitting projections over towers of transcendentals".into(),
        ));
    }
    let deg = class.transcendental_degree()?;
    let t = field.var(&field.transcendentals()[0])?;
    let mut s_total = CechClass::zero(class.curve.clone(), class.twist);
    let mut n_total = CechClass::zero(class.curve.clone(), class.twist);
    for k in 0..=deg {
        let comp = class.transcendental_component(k)?;
        if comp.is_zero() {
            continue;
        }
        // constant coordinates of the component
        let v = comp.coord_vector();
        let consts: Vec<Elem> = v
            .iter()
            .map(|c| constant_coefficient(&field, &constant_field, c, k))
            .collect::<Result<_>>()?;
        let (s, n) = fitting.project(&constant_field, &consts)?;
        let tk = field.pow(&t, k as u64);
        let lift = |vec: Vec<Elem>| -> Result<CechClass> {
            let lifted: Vec<Elem> = vec
                .iter()
                .map(|c| lift_constant(&constant_field, &field, c))
                .collect::<Result<_>>()?;
            let cls = CechClass::from_coord_vector(&class.curve, class.twist, &lifted);
            Ok(cls.scale(&tk))
        };
        s_total = s_total.add(&lift(s)?)?;
        n_total = n_total.add(&lift(n)?)?;
    }
    Ok((s_total, n_total))
}

/// Extract the constant `c / t^k`-coefficient of an element known to be a
/// monomial `c t^k` with constant `c`.
fn constant_coefficient(
    field: &Arc<Field>,
    constant_field: &Arc<Field>,
    e: &Elem,
    k: usize,
) -> Result<Elem> {
    let fr = as_frac(e);
    if fr.den.len() != 1 {
        return Err(SyzError::Invalid("coefficient not polynomial".into()));
    }
    let inner = fr.num.get(k).cloned().unwrap_or_else(|| {
        fr.num
            .first()
            .map(zero_like)
            .unwrap_or(Elem::Int(0))
    });
    for (i, c) in fr.num.iter().enumerate() {
        if i != k && !field.is_zero(&lift_constant_infallible(field, c)) {
            return Err(SyzError::Invalid(
                "component is not parameter-homogeneous".into(),
            ));
        }
    }
    let _ = constant_field;
    Ok(inner)
}

fn lift_constant_infallible(field: &Arc<Field>, inner: &Elem) -> Elem {
    // lift an inner-layer element to a full element for the zero test only
    match inner {
        Elem::Int(v) => {
            if *v == 0 {
                field.zero()
            } else {
                field.from_int(*v as i64)
            }
        }
        Elem::Ext(v) => {
            if v.is_empty() {
                field.zero()
            } else {
                field.one() // nonzero marker
            }
        }
        Elem::Frac(f) => {
            if f.num.is_empty() {
                field.zero()
            } else {
                field.one()
            }
        }
    }
}

fn lift_constant(constant_field: &Arc<Field>, field: &Arc<Field>, c: &Elem) -> Result<Elem> {
    let text = constant_field.elem_to_string(c);
    field.parse_elem(&text)
}

// ---------------------------------------------------------------------------
// connecting homomorphism
// ---------------------------------------------------------------------------

/// The extension class `delta(1)` in `H^1(O)` attached to a nowhere-vanishing
/// section `s` of a rank-2 trivial-determinant bundle.
///
/// Local sections `sigma_u, sigma_v` with `wedge(s, sigma_u) = u^N` and
/// `wedge(s, sigma_v) = v^N` are found by one linear solve each; then
/// `sigma_u/u^N - sigma_v/v^N = h s` with `h = wedge(sigma_u, sigma_v)/(u^N v^N)`,
/// an identity that is verified exactly before the class is returned.
/// The result is well defined up to a scalar and coboundaries; callers
/// compare classes projectively.
pub fn connecting_class(
    spec: &BundleSpec,
    s: &crate::bundle::Section,
    n_max: Option<u32>,
) -> Result<CechClass> {
    if spec.generators.len() != 3 {
        return Err(SyzError::Invalid(
            "connecting class requires a rank-2 bundle (three generators)".into(),
        ));
    }
    if !spec.det_trivial() {
        return Err(SyzError::Invalid(
            "connecting class requires a trivial determinant".into(),
        ));
    }
    let d = spec.curve.degree();
    let n_max = n_max.unwrap_or(8 * d);
    let mut n = d;
    let mut last_err: Option<SyzError> = None;
    while n <= n_max {
        match connecting_class_at(spec, s, n) {
            Ok(Some(class)) => return Ok(class),
            Ok(None) => {}
            Err(e) => last_err = Some(e),
        }
        n *= 2;
    }
    Err(last_err.unwrap_or(SyzError::BoundExhausted(n_max)))
}

fn connecting_class_at(
    spec: &BundleSpec,
    s: &crate::bundle::Section,
    n: u32,
) -> Result<Option<CechClass>> {
    let curve = &spec.curve;
    let (u, v) = curve.cover;
    let sigma_u = normalized_local_section(spec, s, u, n)?;
    let sigma_v = normalized_local_section(spec, s, v, n)?;
    let (Some(sigma_u), Some(sigma_v)) = (sigma_u, sigma_v) else {
        return Ok(None);
    };
    // h = wedge(sigma_u, sigma_v) / (u^n v^n)
    let lambda = spec.wedge(&sigma_u, &sigma_v)?;
    // exact consistency: lambda s_i = sigma_{u,i} v^n - sigma_{v,i} u^n in R
    let field = spec.field().clone();
    let un = monomial_power(&field, u, n);
    let vn = monomial_power(&field, v, n);
    for i in 0..3 {
        let lhs = curve.nf(&lambda.rep.mul(&s.components[i].rep));
        let rhs = curve.nf(
            &sigma_u.components[i]
                .rep
                .mul(&vn)
                .sub(&sigma_v.components[i].rep.mul(&un))?,
        );
        if lhs != rhs {
            return Err(SyzError::Invalid(
                "local splitting failed the exact cocycle identity".into(),
            ));
        }
    }
    let class = Cochain {
        curve: curve.clone(),
        terms: vec![(lambda.rep.clone(), n, n)],
    }
    .nf()?;
    Ok(Some(class))
}

fn monomial_power(field: &Arc<Field>, var: crate::curve::Var, n: u32) -> HomogeneousPoly {
    let mut arr = [0u32; 3];
    arr[var.index()] = n;
    HomogeneousPoly::monomial(field.clone(), (arr[0], arr[1], arr[2]), field.one())
}

/// Solve for a syzygy `sigma` of total degree `sum d_i - deg s + n` with
/// `wedge(s, sigma) = var^n`: the syzygy rows and the three cross-product
/// normalization rows form one linear system.
fn normalized_local_section(
    spec: &BundleSpec,
    s: &crate::bundle::Section,
    var: crate::curve::Var,
    n: u32,
) -> Result<Option<crate::bundle::Section>> {
    let curve = &spec.curve;
    let field = spec.field().clone();
    let sum_d = spec.sum_degrees();
    let j_s = s.total_degree;
    let deg_sigma = sum_d as i64 - j_s as i64 + n as i64;
    if deg_sigma < 0 {
        return Ok(None);
    }
    let deg_sigma = deg_sigma as u32;
    // unknown blocks: coords of sigma_i in R_{deg_sigma - d_i}
    let mut block_dims = Vec::new();
    for &di in &spec.degrees {
        block_dims.push(if di <= deg_sigma {
            curve.graded_dim(deg_sigma - di)
        } else {
            0
        });
    }
    let total_cols: usize = block_dims.iter().sum();
    if total_cols == 0 {
        return Ok(None);
    }
    // rows: syzygy identity in R_{deg_sigma} + cross-product rows per component
    let syz_rows = curve.graded_dim(deg_sigma);
    let cross_rows: Vec<usize> = spec
        .degrees
        .iter()
        .map(|&di| curve.graded_dim(n + di))
        .collect();
    let rows = syz_rows + cross_rows.iter().sum::<usize>();
    let mut m = Matrix::zero(field.clone(), rows, total_cols);
    let mut rhs = vec![field.zero(); rows];

    // syzygy block
    let mut col_off = 0usize;
    for (i, g) in spec.generators.iter().enumerate() {
        if block_dims[i] == 0 {
            continue;
        }
        let mult = curve.mult_map(g, deg_sigma - spec.degrees[i]);
        for r in 0..mult.rows {
            for c in 0..mult.cols {
                *m.at_mut(r, col_off + c) = mult.at(r, c).clone();
            }
        }
        col_off += block_dims[i];
    }

    // cross-product rows: (s x sigma)_k = var^n f_k, linear in sigma.
    // (s x sigma)_1 = s_2 sigma_3 - s_3 sigma_2, cyclically.
    let mut row_off = syz_rows;
    for k in 0..3usize {
        let (i1, i2) = ((k + 1) % 3, (k + 2) % 3); // (s x sigma)_k = s_{i1} sigma_{i2} - s_{i2} sigma_{i1}
        let deg_out = n + spec.degrees[k];
        // + s_{i1} * sigma_{i2}
        for (sign_neg, s_idx, sigma_idx) in [(false, i1, i2), (true, i2, i1)] {
            if block_dims[sigma_idx] == 0 || s.components[s_idx].is_zero() {
                continue;
            }
            let deg_block = deg_sigma - spec.degrees[sigma_idx];
            let mult = curve.mult_map(&s.components[s_idx], deg_block);
            debug_assert_eq!(
                s.components[s_idx].degree() + deg_block,
                deg_out,
                "cross-product degree bookkeeping"
            );
            let off: usize = block_dims[..sigma_idx].iter().sum();
            for r in 0..mult.rows {
                for c in 0..mult.cols {
                    let val = if sign_neg {
                        field.neg(mult.at(r, c))
                    } else {
                        mult.at(r, c).clone()
                    };
                    let cur = m.at(row_off + r, off + c).clone();
                    *m.at_mut(row_off + r, off + c) = field.add(&cur, &val);
                }
            }
        }
        // rhs: coords of var^n * f_k
        let var_n = monomial_power(&field, var, n);
        let target = curve.nf(&var_n.mul(&spec.generators[k].rep));
        let coords = curve.coords(&target, deg_out);
        for (r, c) in coords.into_iter().enumerate() {
            rhs[row_off + r] = c;
        }
        row_off += cross_rows[k];
    }

    let Some(x) = linalg::solve(&m, &rhs) else {
        return Ok(None);
    };
    let mut components = Vec::with_capacity(3);
    let mut off = 0usize;
    for (i, &dim) in block_dims.iter().enumerate() {
        let deg_i = deg_sigma.saturating_sub(spec.degrees[i]);
        if dim == 0 {
            components.push(RingElement {
                curve: curve.clone(),
                rep: HomogeneousPoly::zero(field.clone(), deg_i),
            });
        } else {
            components.push(RingElement {
                curve: curve.clone(),
                rep: curve.from_coords(&x[off..off + dim], deg_i),
            });
            off += dim;
        }
    }
    Ok(Some(crate::bundle::Section {
        total_degree: deg_sigma,
        components,
    }))
}

// ---------------------------------------------------------------------------
// coboundary membership in the bundle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum CoboundaryResult {
    /// `s . class` is a coboundary by syzygy-valued cochains `g/u^N, h/v^N`.
    Yes(CoboundaryWitness),
    /// No witness with denominator exponents up to the bound; undecided.
    NoWitnessUpTo { n_max: u32 },
}

#[derive(Debug, Clone)]
pub struct CoboundaryWitness {
    pub denominator_exponent: u32,
    pub g: crate::bundle::Section,
    pub h: crate::bundle::Section,
}

impl CoboundaryResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, CoboundaryResult::Yes(_))
    }
}

/// Decide whether `s . class`, viewed in `H^1` of the bundle, is a coboundary
/// of syzygy-valued cochains: solve `s_i class = g_i/u^N - h_i/v^N` with the
/// side conditions `sum g_i f_i = 0` and `sum h_i f_i = 0`.
pub fn is_zero_in_h1_bundle(
    class: &CechClass,
    spec: &BundleSpec,
    s: &crate::bundle::Section,
    n_max: Option<u32>,
) -> Result<CoboundaryResult> {
    if class.twist != 0 {
        return Err(SyzError::Unsupported(
            "membership test requires a twist-0 class".into(),
        ));
    }
    let d = spec.curve.degree();
    let n_max = n_max.unwrap_or(8 * d);
    let mut n = d;
    while n <= n_max {
        if let Some(witness) = coboundary_at(class, spec, s, n)? {
            return Ok(CoboundaryResult::Yes(witness));
        }
        n *= 2;
    }
    Ok(CoboundaryResult::NoWitnessUpTo { n_max })
}

fn coboundary_at(
    class: &CechClass,
    spec: &BundleSpec,
    s: &crate::bundle::Section,
    n: u32,
) -> Result<Option<CoboundaryWitness>> {
    let curve = &spec.curve;
    let field = spec.field().clone();
    let (u, v) = curve.cover;
    let j_s = s.total_degree;
    let rep = class.representative();
    let max_a = rep.terms.iter().map(|(_, a, _)| *a).max().unwrap_or(0);
    let max_b = rep.terms.iter().map(|(_, _, b)| *b).max().unwrap_or(0);
    let big_a = n.max(max_a);
    let big_b = n.max(max_b);

    // unknown blocks: g_i in R_{j_s + n - d_i}, then h_i likewise
    let deg_gh: Vec<i64> = spec
        .degrees
        .iter()
        .map(|&di| j_s as i64 + n as i64 - di as i64)
        .collect();
    let block_dim: Vec<usize> = deg_gh
        .iter()
        .map(|&dg| if dg >= 0 { curve.graded_dim(dg as u32) } else { 0 })
        .collect();
    let g_cols: usize = block_dim.iter().sum();
    let total_cols = 2 * g_cols;
    if total_cols == 0 {
        return Ok(None);
    }

    // rows: per component, the cleared identity in R_{(j_s - d_i) + A + B};
    // then two syzygy conditions in R_{j_s + n}
    let comp_deg: Vec<u32> = spec
        .degrees
        .iter()
        .map(|&di| (j_s as i64 - di as i64 + big_a as i64 + big_b as i64) as u32)
        .collect();
    let comp_rows: Vec<usize> = comp_deg.iter().map(|&cd| curve.graded_dim(cd)).collect();
    let syz_deg = j_s + n;
    let syz_rows = curve.graded_dim(syz_deg);
    let rows: usize = comp_rows.iter().sum::<usize>() + 2 * syz_rows;

    let mut m = Matrix::zero(field.clone(), rows, total_cols);
    let mut rhs = vec![field.zero(); rows];

    let g_mono = {
        // g_i multiplies by u^{A-n} v^{B}
        let mut arr = [0u32; 3];
        arr[u.index()] = big_a - n;
        arr[v.index()] = big_b;
        (arr[0], arr[1], arr[2])
    };
    let h_mono = {
        // h_i multiplies by u^{A} v^{B-n}
        let mut arr = [0u32; 3];
        arr[u.index()] = big_a;
        arr[v.index()] = big_b - n;
        (arr[0], arr[1], arr[2])
    };

    let mut row_off = 0usize;
    for i in 0..spec.generators.len() {
        if block_dim[i] > 0 {
            let deg_block = deg_gh[i] as u32;
            let one = field.one();
            let g_mult = curve.mult_map(
                &curve.element(&HomogeneousPoly::monomial(field.clone(), g_mono, one.clone())),
                deg_block,
            );
            let h_mult = curve.mult_map(
                &curve.element(&HomogeneousPoly::monomial(field.clone(), h_mono, one)),
                deg_block,
            );
            let g_off: usize = block_dim[..i].iter().sum();
            let h_off: usize = g_cols + g_off;
            for r in 0..g_mult.rows {
                for c in 0..g_mult.cols {
                    *m.at_mut(row_off + r, g_off + c) = g_mult.at(r, c).clone();
                    *m.at_mut(row_off + r, h_off + c) = field.neg(h_mult.at(r, c));
                }
            }
        }
        // rhs: cleared s_i . class
        let mut acc = HomogeneousPoly::zero(field.clone(), comp_deg[i]);
        for (num, a, b) in &rep.terms {
            let mut arr = [0u32; 3];
            arr[u.index()] = big_a - a;
            arr[v.index()] = big_b - b;
            let shifted = num.mul_monomial((arr[0], arr[1], arr[2]), &field.one());
            if s.components[i].is_zero() {
                continue;
            }
            acc = acc.add(&shifted.mul(&s.components[i].rep))?;
        }
        let cleared = curve.nf(&acc);
        let coords = curve.coords(&cleared, comp_deg[i]);
        for (r, c) in coords.into_iter().enumerate() {
            rhs[row_off + r] = c;
        }
        row_off += comp_rows[i];
    }

    // syzygy conditions for g and for h
    for half in 0..2usize {
        let base = half * g_cols;
        for (i, gen) in spec.generators.iter().enumerate() {
            if block_dim[i] == 0 {
                continue;
            }
            let mult = curve.mult_map(gen, deg_gh[i] as u32);
            let off: usize = base + block_dim[..i].iter().sum::<usize>();
            for r in 0..mult.rows {
                for c in 0..mult.cols {
                    *m.at_mut(row_off + r, off + c) = mult.at(r, c).clone();
                }
            }
        }
        row_off += syz_rows;
    }

    let Some(x) = linalg::solve(&m, &rhs) else {
        return Ok(None);
    };
    let build = |half: usize| -> crate::bundle::Section {
        let mut components = Vec::with_capacity(3);
        let mut off = half * g_cols;
        for (i, &dim) in block_dim.iter().enumerate() {
            let deg_i = deg_gh[i].max(0) as u32;
            if dim == 0 {
                components.push(RingElement {
                    curve: curve.clone(),
                    rep: HomogeneousPoly::zero(field.clone(), deg_i),
                });
            } else {
                components.push(RingElement {
                    curve: curve.clone(),
                    rep: curve.from_coords(&x[off..off + dim], deg_i),
                });
                off += dim;
            }
        }
        crate::bundle::Section {
            total_degree: j_s + n,
            components,
        }
    };
    Ok(Some(CoboundaryWitness {
        denominator_exponent: n,
        g: build(0),
        h: build(1),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::curve_from_texts;
    use crate::poly::parse_poly;

    #[test]
    fn h1_basis_counts() {
        let quintic = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        assert_eq!(h1_basis(&quintic, 0).len(), 6); // genus (4)(3)/2
        let deg8 = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z")).unwrap();
        let basis = h1_basis(&deg8, 0);
        assert_eq!(basis.len(), 21);
        assert!(basis.contains(&(3, 3, 6)));
        // Serre duality dimensions: |H^1(O(j))| = dim R_{d-3-j}
        for j in 0..=5i64 {
            let lhs = h1_basis(&deg8, j).len();
            let rhs = deg8.graded_dim((5 - j) as u32);
            assert_eq!(lhs, rhs, "j = {j}");
        }
        assert!(h1_basis(&deg8, 6).is_empty());
    }

    #[test]
    fn cech_nf_drops_pure_chart_terms() {
        let quintic = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let f = quintic.field().clone();
        // g / x^a with no z in the denominator is a coboundary
        let cochain = Cochain {
            curve: quintic.clone(),
            terms: vec![(parse_poly("y^2*z", &f).unwrap(), 3, 0)],
        };
        assert!(cochain.nf().unwrap().is_zero());
    }

    #[test]
    fn hasse_witt_fermat_cubic_supersingular_vs_ordinary() {
        // over F_2 the cubic is supersingular: the 1x1 matrix is zero
        let c2 = curve_from_texts("GF(2)", "x^3+y^3+z^3", ("x", "z")).unwrap();
        let hw2 = hasse_witt(&c2).unwrap();
        assert_eq!(hw2.dim(), 1);
        assert!(c2.field().is_zero(hw2.matrix.at(0, 0)));
        let (im, _) = hw2.iterate(2).unwrap();
        assert!(im.is_empty());
        // over F_7 it is ordinary: y^14/(x^7 z^7) reduces to 6 y^2/(x z)
        let c7 = curve_from_texts("GF(7)", "x^3+y^3+z^3", ("x", "z")).unwrap();
        let hw7 = hasse_witt(&c7).unwrap();
        assert_eq!(*hw7.matrix.at(0, 0), c7.field().from_int(6));
        let fit = hw7.fitting().unwrap();
        assert_eq!(fit.semisimple_dim(), 1);
        assert_eq!(fit.nilpotent_dim(), 0);
    }

    #[test]
    fn frobenius_eigenrelation_on_deg8_curve() {
        // F^2(y^6/(x^3 z^3)) = -y^6/(x^3 z^3) over F_3
        let c = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z")).unwrap();
        let f = c.field().clone();
        let mut cls = CechClass::zero(c.clone(), 0);
        cls.add_coeff(3, 3, f.one());
        let img = frobenius_on_class(&cls, 2).unwrap();
        assert!(img.projectively_equal(&cls));
        assert_eq!(img, cls.scale(&f.from_int(-1)));
    }

    #[test]
    fn two_path_frobenius_agreement() {
        let c = curve_from_texts("GF(3)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let f = c.field().clone();
        let hw = hasse_witt(&c).unwrap();
        let basis = h1_basis(&c, 0);
        for (i, (a, b, _)) in basis.iter().enumerate() {
            let mut cls = CechClass::zero(c.clone(), 0);
            cls.add_coeff(*a, *b, f.one());
            let via_class = frobenius_on_class(&cls, 1).unwrap().coord_vector();
            let mut e = vec![f.zero(); basis.len()];
            e[i] = f.one();
            let via_matrix = hw.apply(&e);
            assert_eq!(via_class, via_matrix);
        }
    }

    #[test]
    fn connecting_class_of_split_bundle_is_zero() {
        // (y, 0, x) is part of a frame of Syz(x^2, y^2, xy)(3): split extension
        let c = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let field = c.field().clone();
        let gens = vec![
            c.element(&parse_poly("x^2", &field).unwrap()),
            c.element(&parse_poly("y^2", &field).unwrap()),
            c.element(&parse_poly("x*y", &field).unwrap()),
        ];
        let spec = BundleSpec::new(c.clone(), gens, 3).unwrap();
        let s = spec.section_from_texts(&["y", "0", "x"], Some(3)).unwrap();
        assert!(spec.nowhere_vanishing(&s, None).is_yes());
        let class = connecting_class(&spec, &s, None).unwrap();
        assert!(class.is_zero(), "{}", class.pretty());
    }

    #[test]
    fn coboundary_test_accepts_zero_class() {
        let c = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let field = c.field().clone();
        let gens = vec![
            c.element(&parse_poly("x^2", &field).unwrap()),
            c.element(&parse_poly("y^2", &field).unwrap()),
            c.element(&parse_poly("x*y", &field).unwrap()),
        ];
        let spec = BundleSpec::new(c.clone(), gens, 3).unwrap();
        let s = spec.section_from_texts(&["y", "0", "x"], Some(3)).unwrap();
        let zero = CechClass::zero(c.clone(), 0);
        let r = is_zero_in_h1_bundle(&zero, &spec, &s, None).unwrap();
        assert!(r.is_yes());
    }
}
