//! Syzygy bundles `Syz(f_1,...,f_{n+1})(m)` on plane curves: construction
//! with a zero-freeness certificate, Frobenius pullback, section spaces,
//! the determinant (wedge) pairing, nowhere-vanishing certificates,
//! triviality frames, destabilizer search, and family specialization.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{spans_degree, CurveSpec, PlaneCurve, RingElement, Var};
use crate::error::{Result, SyzError};
use crate::field::{Elem, Field};
use crate::linalg::{self, Matrix};
use crate::poly::{parse_poly, HomogeneousPoly};

/// Evidence that the generators have no common zero on the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ZeroFreeEvidence {
    /// Degree-`exponent` multiples of the generators and the curve equation
    /// span the full degree-`exponent` space (checked at `specialization`
    /// for function fields).
    Saturation {
        exponent: u32,
        specialization: Option<String>,
    },
    /// Inherited along a Frobenius pullback: `V(f_i^q) = V(f_i)`.
    Pullback { base_exponent: u32, exponent_e: u32 },
}

/// The data `(f_1,...,f_{n+1}; m)` presenting `Syz(f_1,...,f_{n+1})(m)`.
#[derive(Debug, Clone)]
pub struct BundleSpec {
    pub curve: Arc<PlaneCurve>,
    pub generators: Vec<RingElement>,
    pub degrees: Vec<u32>,
    pub twist: i64,
    pub zero_free: ZeroFreeEvidence,
}

/// A global section: components `(g_1,...,g_{n+1})` of degrees
/// `total_degree - d_i` with `sum g_i f_i = 0` in the curve ring.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub total_degree: u32,
    pub components: Vec<RingElement>,
}

impl Section {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn component_strings(&self) -> Vec<String> {
        self.components.iter().map(|c| c.to_string()).collect()
    }
}

impl BundleSpec {
    /// Validated construction: rejects zero generators and generator sets
    /// whose common zero locus on the curve cannot be certified empty.
    pub fn new(
        curve: Arc<PlaneCurve>,
        generators: Vec<RingElement>,
        twist: i64,
    ) -> Result<BundleSpec> {
        if generators.len() < 2 {
            return Err(SyzError::Invalid(
                "a syzygy bundle needs at least two generators".into(),
            ));
        }
        for g in &generators {
            if g.is_zero() {
                return Err(SyzError::Invalid("zero generator".into()));
            }
        }
        let degrees: Vec<u32> = generators.iter().map(|g| g.degree()).collect();
        let evidence = certify_zero_free(&curve, &generators)?;
        Ok(BundleSpec {
            curve,
            generators,
            degrees,
            twist,
            zero_free: evidence,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn field(&self) -> &Arc<Field> {
        self.curve.field()
    }

    pub fn sum_degrees(&self) -> u32 {
        self.degrees.iter().sum()
    }

    /// `n m = sum d_i` marks the trivial-determinant case.
    pub fn det_trivial(&self) -> bool {
        (self.rank() as i64) * self.twist == self.sum_degrees() as i64
    }

    /// Frobenius pullback: generators to their `q = p^e` powers, twist scaled
    /// by `q`; the zero-freeness certificate transfers along `V(f^q) = V(f)`.
    pub fn pullback(&self, e: u32) -> BundleSpec {
        if e == 0 {
            return self.clone();
        }
        let q = self
            .field()
            .characteristic()
            .checked_pow(e)
            .expect("q overflow") as i64;
        let generators: Vec<RingElement> = self
            .generators
            .iter()
            .map(|g| g.frobenius_power(e))
            .collect();
        let degrees = generators.iter().map(|g| g.degree()).collect();
        let base = match &self.zero_free {
            ZeroFreeEvidence::Saturation { exponent, .. } => *exponent,
            ZeroFreeEvidence::Pullback { base_exponent, .. } => *base_exponent,
        };
        let e_total = match &self.zero_free {
            ZeroFreeEvidence::Pullback { exponent_e, .. } => exponent_e + e,
            _ => e,
        };
        BundleSpec {
            curve: self.curve.clone(),
            generators,
            degrees,
            twist: self.twist * q,
            zero_free: ZeroFreeEvidence::Pullback {
                base_exponent: base,
                exponent_e: e_total,
            },
        }
    }

    /// Basis of the space of syzygies of total degree `j`, via the kernel of
    /// the stacked multiplication matrices. Deterministic order.
    pub fn sections(&self, j: u32) -> Vec<Section> {
        let curve = &self.curve;
        let field = self.field().clone();
        let rows = curve.graded_dim(j);
        // column blocks per generator of degree <= j
        let mut blocks: Vec<Option<Matrix>> = Vec::new();
        let mut total_cols = 0usize;
        for (g, &d) in self.generators.iter().zip(&self.degrees) {
            if d <= j {
                let m = curve.mult_map(g, j - d);
                total_cols += m.cols;
                blocks.push(Some(m));
            } else {
                blocks.push(None);
            }
        }
        if total_cols == 0 {
            return Vec::new();
        }
        let mut stacked = Matrix::zero(field.clone(), rows, total_cols);
        let mut off = 0usize;
        for b in blocks.iter().flatten() {
            for r in 0..rows {
                for c in 0..b.cols {
                    *stacked.at_mut(r, off + c) = b.at(r, c).clone();
                }
            }
            off += b.cols;
        }
        let kernel = linalg::kernel(&stacked);
        kernel
            .into_iter()
            .map(|v| self.section_from_coords(j, &v, &blocks))
            .collect()
    }

    fn section_from_coords(
        &self,
        j: u32,
        coords: &[Elem],
        blocks: &[Option<Matrix>],
    ) -> Section {
        let curve = &self.curve;
        let mut components = Vec::with_capacity(self.generators.len());
        let mut off = 0usize;
        for (i, b) in blocks.iter().enumerate() {
            let d = self.degrees[i];
            match b {
                Some(m) => {
                    let part = &coords[off..off + m.cols];
                    components.push(RingElement {
                        curve: curve.clone(),
                        rep: curve.from_coords(part, j - d),
                    });
                    off += m.cols;
                }
                None => {
                    components.push(RingElement {
                        curve: curve.clone(),
                        rep: HomogeneousPoly::zero(self.field().clone(), j.saturating_sub(d)),
                    });
                }
            }
        }
        Section {
            total_degree: j,
            components,
        }
    }

    /// Dimension of the degree-`j` section space.
    pub fn sections_dim(&self, j: u32) -> usize {
        self.sections(j).len()
    }

    /// Check a candidate tuple: degrees must match `j - d_i` for a common
    /// `j`, and the syzygy identity must normal-form to zero.
    pub fn verify_syzygy(&self, components: &[RingElement]) -> Result<bool> {
        let j = self.candidate_total_degree(components)?;
        let field = self.field();
        let mut acc = HomogeneousPoly::zero(field.clone(), j);
        for (g, c) in self.generators.iter().zip(components) {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&g.rep.mul(&c.rep))?;
        }
        Ok(self.curve.nf(&acc).is_zero())
    }

    /// The common total degree of a candidate tuple, or a degree error.
    pub fn candidate_total_degree(&self, components: &[RingElement]) -> Result<u32> {
        if components.len() != self.generators.len() {
            return Err(SyzError::Degree(format!(
                "expected {} components, got {}",
                self.generators.len(),
                components.len()
            )));
        }
        let mut j: Option<u32> = None;
        for (c, &d) in components.iter().zip(&self.degrees) {
            if c.is_zero() {
                continue;
            }
            let total = c.degree() + d;
            match j {
                None => j = Some(total),
                Some(j0) if j0 != total => {
                    return Err(SyzError::Degree(format!(
                        "components have inconsistent total degrees {j0} and {total}"
                    )))
                }
                _ => {}
            }
        }
        j.ok_or_else(|| SyzError::Degree("zero candidate tuple".into()))
    }

    pub fn section_from_texts(&self, texts: &[&str], j_hint: Option<u32>) -> Result<Section> {
        let field = self.field();
        let mut components = Vec::with_capacity(texts.len());
        for (i, t) in texts.iter().enumerate() {
            let p = parse_poly(t, field)?;
            let elem = self.curve.element(&p);
            if elem.is_zero() && p.is_zero() {
                // degree of a zero component comes from the hint if present
                let d = j_hint
                    .map(|j| j.saturating_sub(self.degrees[i]))
                    .unwrap_or(0);
                components.push(RingElement {
                    curve: self.curve.clone(),
                    rep: HomogeneousPoly::zero(field.clone(), d),
                });
            } else {
                components.push(elem);
            }
        }
        let j = self.candidate_total_degree(&components)?;
        Ok(Section {
            total_degree: j,
            components,
        })
    }

    /// Frobenius image of a section: a section of `pullback(e)` by the
    /// freshman's dream, `(sum g_i f_i)^q = sum g_i^q f_i^q`.
    pub fn section_frobenius(&self, s: &Section, e: u32) -> Section {
        let q = self.field().characteristic().pow(e) as u32;
        Section {
            total_degree: s.total_degree * q,
            components: s
                .components
                .iter()
                .map(|c| c.frobenius_power(e))
                .collect(),
        }
    }

    // ---- wedge pairing (rank 2) -----------------------------------------

    /// For rank-2 specs: the unique ring element with
    /// `u x v = lambda (f_1, f_2, f_3)`, the determinant trivialization.
    pub fn wedge(&self, u: &Section, v: &Section) -> Result<RingElement> {
        if self.generators.len() != 3 {
            return Err(SyzError::Invalid(
                "wedge pairing requires exactly three generators".into(),
            ));
        }
        let field = self.field().clone();
        let curve = &self.curve;
        let cross: Vec<RingElement> = {
            let (u1, u2, u3) = (&u.components[0], &u.components[1], &u.components[2]);
            let (v1, v2, v3) = (&v.components[0], &v.components[1], &v.components[2]);
            vec![
                sub_ring(&u2.mul(v3), &u3.mul(v2))?,
                sub_ring(&u3.mul(v1), &u1.mul(v3))?,
                sub_ring(&u1.mul(v2), &u2.mul(v1))?,
            ]
        };
        let lambda_deg = u.total_degree as i64 + v.total_degree as i64
            - self.sum_degrees() as i64;
        if lambda_deg < 0 {
            if cross.iter().all(|c| c.is_zero()) {
                return Ok(RingElement {
                    curve: curve.clone(),
                    rep: HomogeneousPoly::zero(field, 0),
                });
            }
            return Err(SyzError::Invalid(
                "wedge has negative degree but nonzero cross product".into(),
            ));
        }
        let ld = lambda_deg as u32;
        let cols = curve.graded_dim(ld);
        let rows: usize = self.degrees.iter().map(|&d| curve.graded_dim(ld + d)).sum();
        let mut m = Matrix::zero(field.clone(), rows, cols);
        let mut b = Vec::with_capacity(rows);
        let mut off = 0usize;
        for (g, c) in self.generators.iter().zip(&cross) {
            let block = curve.mult_map(g, ld);
            for r in 0..block.rows {
                for cc in 0..block.cols {
                    *m.at_mut(off + r, cc) = block.at(r, cc).clone();
                }
            }
            b.extend(curve.coords(&c.rep, ld + g.degree()));
            off += block.rows;
        }
        let x = linalg::solve(&m, &b).ok_or_else(|| {
            SyzError::Invalid("wedge has no solution: candidate is not a section".into())
        })?;
        Ok(RingElement {
            curve: curve.clone(),
            rep: curve.from_coords(&x, ld),
        })
    }

    /// Wedge as a field element; errors unless the wedge has degree 0.
    pub fn wedge_scalar(&self, u: &Section, v: &Section) -> Result<Elem> {
        let w = self.wedge(u, v)?;
        if w.is_zero() {
            return Ok(self.field().zero());
        }
        if w.degree() != 0 {
            return Err(SyzError::Degree(format!(
                "wedge has degree {}, not a scalar",
                w.degree()
            )));
        }
        Ok(w.rep.coeff(&(0, 0, 0)))
    }

    // ---- nowhere vanishing ------------------------------------------------

    /// Certify that a section has no zeros on the curve: the components and
    /// the curve equation must span a full graded piece (the subbundle
    /// condition makes vanishing componentwise).
    pub fn nowhere_vanishing(&self, s: &Section, n_max: Option<u32>) -> NowhereVanishing {
        let mut polys: Vec<HomogeneousPoly> = s
            .components
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.rep.clone())
            .collect();
        if polys.is_empty() {
            return NowhereVanishing::Inconclusive { n_max: 0 };
        }
        let d = self.curve.degree();
        // formal component degrees j - d_i, so zero components count too
        let default_max: u32 = self
            .degrees
            .iter()
            .map(|&di| s.total_degree.saturating_sub(di))
            .sum::<u32>()
            + d
            - 3;
        let n_max = n_max.unwrap_or(default_max);
        polys.push(self.curve.equation.clone());
        let start = polys
            .iter()
            .map(|p| p.degree)
            .filter(|&dg| dg > 0)
            .min()
            .unwrap_or(1);
        for n in start..=n_max {
            if let Some(specialization) = spans_degree(self.field(), &polys, n) {
                return NowhereVanishing::Yes {
                    exponent: n,
                    specialization,
                };
            }
        }
        NowhereVanishing::Inconclusive { n_max }
    }

    // ---- destabilizer search ----------------------------------------------

    /// Search pullback levels `0..=e_max` for a syzygy below the slope bound
    /// `2 j < q sum(d_i)`; returns the first witness in `(e, j)` order.
    pub fn find_destabilizer(&self, e_max: u32) -> Option<Destabilizer> {
        for e in 0..=e_max {
            let pb = self.pullback(e);
            let sum: u32 = pb.degrees.iter().sum();
            let j_min = pb.degrees.iter().copied().min().unwrap();
            let mut j = j_min;
            while 2 * j < sum {
                let secs = pb.sections(j);
                if let Some(first) = secs.into_iter().next() {
                    return Some(Destabilizer {
                        e,
                        total_degree: j,
                        section: first,
                    });
                }
                j += 1;
            }
        }
        None
    }

    /// The three-verdict report of the destabilizer search.
    pub fn semistability_verdict(&self, e_max: u32) -> SemistabilityVerdict {
        match self.find_destabilizer(e_max) {
            Some(w) if w.e == 0 => SemistabilityVerdict::Destabilized { witness: w },
            Some(w) => SemistabilityVerdict::NotStronglySemistable {
                derived_stable_rank2: self.rank() == 2,
                witness: w,
            },
            None => SemistabilityVerdict::NoSyzygyDestabilizerUpTo { e_max },
        }
    }

    // ---- triviality certificates -------------------------------------------

    /// Search a trivializing frame among the degree-`q m` syzygies of the
    /// `e`-th pullback. Rank-2 fast path: a pair with unit wedge is a global
    /// frame. Returns `None` if the section space is too small or no frame is
    /// found among basis pairs.
    pub fn triviality_certificate(&self, e: u32) -> Result<Option<TrivialityCertificate>> {
        let pb = self.pullback(e);
        if !pb.det_trivial() {
            return Err(SyzError::Invalid(
                "triviality requires a trivial determinant after pullback".into(),
            ));
        }
        if pb.twist < 0 {
            return Ok(None);
        }
        let j = pb.twist as u32;
        let secs = pb.sections(j);
        let n = pb.rank();
        if secs.len() < n {
            return Ok(None);
        }
        if n == 2 {
            let pairs = candidate_pairs(&pb, &secs);
            for (a, b) in pairs {
                let w = pb.wedge_scalar(&secs[a], &secs[b])?;
                if !pb.field().is_zero(&w) {
                    return Ok(Some(TrivialityCertificate {
                        bundle: BundleFile::of(self),
                        frobenius_exponent: e,
                        total_degree: j,
                        frame: vec![secs[a].clone(), secs[b].clone()],
                        wedge: Some(pb.field().elem_to_string(&w)),
                        nowhere_vanishing: Vec::new(),
                        section_space_dim: secs.len(),
                    }));
                }
            }
            return Ok(None);
        }
        if n == 1 {
            for s in &secs {
                if let NowhereVanishing::Yes {
                    exponent,
                    specialization,
                } = pb.nowhere_vanishing(s, None)
                {
                    return Ok(Some(TrivialityCertificate {
                        bundle: BundleFile::of(self),
                        frobenius_exponent: e,
                        total_degree: j,
                        frame: vec![s.clone()],
                        wedge: None,
                        nowhere_vanishing: vec![NvWitness {
                            frame_index: 0,
                            exponent,
                            specialization,
                        }],
                        section_space_dim: secs.len(),
                    }));
                }
            }
            return Ok(None);
        }
        // general path: n - 1 nowhere-vanishing sections plus one more
        // independent section (independence holds within a kernel basis)
        let mut nv: Vec<(usize, NvWitness)> = Vec::new();
        for (i, s) in secs.iter().enumerate() {
            if nv.len() == n - 1 {
                break;
            }
            if let NowhereVanishing::Yes {
                exponent,
                specialization,
            } = pb.nowhere_vanishing(s, None)
            {
                nv.push((
                    i,
                    NvWitness {
                        frame_index: nv.len(),
                        exponent,
                        specialization,
                    },
                ));
            }
        }
        if nv.len() < n - 1 {
            return Ok(None);
        }
        let used: Vec<usize> = nv.iter().map(|(i, _)| *i).collect();
        let extra = (0..secs.len()).find(|i| !used.contains(i));
        let Some(extra) = extra else {
            return Ok(None);
        };
        let mut frame: Vec<Section> = used.iter().map(|&i| secs[i].clone()).collect();
        frame.push(secs[extra].clone());
        Ok(Some(TrivialityCertificate {
            bundle: BundleFile::of(self),
            frobenius_exponent: e,
            total_degree: j,
            frame,
            wedge: None,
            nowhere_vanishing: nv.into_iter().map(|(_, w)| w).collect(),
            section_space_dim: secs.len(),
        }))
    }

    // ---- serialization -----------------------------------------------------

    pub fn generator_strings(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.to_string()).collect()
    }
}

fn sub_ring(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    Ok(RingElement {
        curve: a.curve.clone(),
        rep: a.rep.sub(&b.rep)?,
    })
}

/// Pair order for the rank-2 frame search. With a function field and many
/// sections, pairs are screened at deterministic sample points first (cheap
/// constant-field wedges), then verified generically in screening order.
fn candidate_pairs(pb: &BundleSpec, secs: &[Section]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in 0..secs.len() {
        for b in (a + 1)..secs.len() {
            pairs.push((a, b));
        }
    }
    let field = pb.field();
    if field.transcendentals().is_empty() || pairs.len() <= 4 {
        return pairs;
    }
    // screen by specialization at up to 8 deterministic points
    let constant = field.constant_field();
    let mut scored: Vec<(usize, (usize, usize))> = Vec::new();
    'pair: for &(a, b) in &pairs {
        for probe in 0..8usize {
            let samples = constant.sample_points(probe + field.transcendentals().len() + 1);
            let mut images = BTreeMap::new();
            for (i, t) in field.transcendentals().iter().enumerate() {
                images.insert(t.clone(), samples[probe + i].clone());
            }
            let fam = FamilySpec {
                spec: pb.clone(),
                params: field.transcendentals().to_vec(),
            };
            let Ok(sp) = fam.specialize_elems(&images) else {
                continue;
            };
            let (Ok(sa), Ok(sb)) = (
                specialize_section(pb, &sp, &secs[a], &images),
                specialize_section(pb, &sp, &secs[b], &images),
            ) else {
                continue;
            };
            if let Ok(w) = sp.wedge_scalar(&sa, &sb) {
                if !sp.field().is_zero(&w) {
                    scored.push((probe, (a, b)));
                    continue 'pair;
                }
            }
        }
        scored.push((usize::MAX, (a, b)));
    }
    scored.sort_by_key(|(score, pair)| (*score, *pair));
    scored.into_iter().map(|(_, p)| p).collect()
}

fn specialize_section(
    _src: &BundleSpec,
    dst: &BundleSpec,
    s: &Section,
    images: &BTreeMap<String, Elem>,
) -> Result<Section> {
    let target = dst.field();
    let mut components = Vec::with_capacity(s.components.len());
    for c in &s.components {
        let rep = c.rep.map_coeffs(target, images)?;
        components.push(RingElement {
            curve: dst.curve.clone(),
            rep,
        });
    }
    Ok(Section {
        total_degree: s.total_degree,
        components,
    })
}

fn certify_zero_free(
    curve: &Arc<PlaneCurve>,
    generators: &[RingElement],
) -> Result<ZeroFreeEvidence> {
    let d = curve.degree();
    let mut polys: Vec<HomogeneousPoly> = generators.iter().map(|g| g.rep.clone()).collect();
    // Macaulay-style bound for the system including the curve equation
    let n_max = generators.iter().map(|g| g.degree()).sum::<u32>() + d - 2;
    polys.push(curve.equation.clone());
    let start = polys.iter().map(|p| p.degree).min().unwrap_or(1).max(1);
    for n in start..=n_max {
        if let Some(specialization) = spans_degree(curve.field(), &polys, n) {
            return Ok(ZeroFreeEvidence::Saturation {
                exponent: n,
                specialization,
            });
        }
    }
    Err(SyzError::CommonZero(n_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NowhereVanishing {
    Yes {
        exponent: u32,
        specialization: Option<String>,
    },
    Inconclusive {
        n_max: u32,
    },
}

impl NowhereVanishing {
    pub fn is_yes(&self) -> bool {
        matches!(self, NowhereVanishing::Yes { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Destabilizer {
    pub e: u32,
    pub total_degree: u32,
    pub section: Section,
}

#[derive(Debug, Clone)]
pub enum SemistabilityVerdict {
    /// A destabilizing syzygy exists already at `e = 0`.
    Destabilized { witness: Destabilizer },
    /// A destabilizer appears after `e >= 1` pullbacks; for rank 2 the
    /// stability of the original bundle follows from its semistability,
    /// which is recorded as an assumption, not re-proved.
    NotStronglySemistable {
        witness: Destabilizer,
        derived_stable_rank2: bool,
    },
    /// Evidence, not proof: destabilizing sub-line bundles need not be
    /// twists of the structure sheaf.
    NoSyzygyDestabilizerUpTo { e_max: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NvWitness {
    pub frame_index: usize,
    pub exponent: u32,
    pub specialization: Option<String>,
}

/// Machine-checkable triviality frame; checking never recomputes kernels.
#[derive(Debug, Clone)]
pub struct TrivialityCertificate {
    pub bundle: BundleFile,
    pub frobenius_exponent: u32,
    pub total_degree: u32,
    pub frame: Vec<Section>,
    /// Rank-2 case: the recorded unit value of `wedge(frame[0], frame[1])`.
    pub wedge: Option<String>,
    pub nowhere_vanishing: Vec<NvWitness>,
    pub section_space_dim: usize,
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

/// A bundle whose field has transcendentals, some of which are treated as
/// family directions.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub spec: BundleSpec,
    pub params: Vec<String>,
}

impl FamilySpec {
    pub fn new(spec: BundleSpec, params: Vec<String>) -> Result<FamilySpec> {
        for p in &params {
            if !spec.field().transcendentals().iter().any(|t| t == p) {
                return Err(SyzError::Invalid(format!(
                    "family parameter {p:?} is not a transcendental of the field"
                )));
            }
        }
        Ok(FamilySpec { spec, params })
    }

    /// Substitute parameter expressions. Parameters assigned an expression in
    /// the remaining transcendentals are removed from the field; unassigned
    /// parameters stay. Expression text is parsed over the target field.
    pub fn specialize(&self, assignments: &BTreeMap<String, String>) -> Result<BundleSpec> {
        let src = self.spec.field();
        for k in assignments.keys() {
            if !self.params.iter().any(|p| p == k) {
                return Err(SyzError::Invalid(format!(
                    "{k:?} is not a family parameter"
                )));
            }
        }
        // target field: drop assigned transcendentals, keep order
        let constant = src.constant_field();
        let mut target = constant;
        for t in src.transcendentals() {
            if !assignments.contains_key(t) {
                target = target.with_transcendental(t)?;
            }
        }
        let mut images: BTreeMap<String, Elem> = BTreeMap::new();
        for t in src.transcendentals() {
            match assignments.get(t) {
                Some(expr) => {
                    images.insert(t.clone(), target.parse_elem(expr)?);
                }
                None => {
                    images.insert(t.clone(), target.var(t)?);
                }
            }
        }
        self.specialize_via(&target, &images)
    }

    /// Specialize a section of the family along the same assignments used
    /// for `specialize`; `target` must be the specialized bundle.
    pub fn specialize_section(
        &self,
        target: &BundleSpec,
        assignments: &BTreeMap<String, String>,
        s: &Section,
    ) -> Result<Section> {
        let src = self.spec.field();
        let tf = target.field();
        let mut images: BTreeMap<String, Elem> = BTreeMap::new();
        for t in src.transcendentals() {
            match assignments.get(t) {
                Some(expr) => {
                    images.insert(t.clone(), tf.parse_elem(expr)?);
                }
                None => {
                    images.insert(t.clone(), tf.var(t)?);
                }
            }
        }
        specialize_section(&self.spec, target, s, &images)
    }

    fn specialize_elems(&self, images: &BTreeMap<String, Elem>) -> Result<BundleSpec> {
        let target = self.spec.field().constant_field();
        self.specialize_via(&target, images)
    }

    fn specialize_via(
        &self,
        target: &Arc<Field>,
        images: &BTreeMap<String, Elem>,
    ) -> Result<BundleSpec> {
        let spec = &self.spec;
        let curve = spec.curve.map_coeffs(target, images)?;
        let mut generators = Vec::with_capacity(spec.generators.len());
        for g in &spec.generators {
            let rep = g.rep.map_coeffs(target, images)?;
            if rep.is_zero() {
                return Err(SyzError::Invalid(
                    "a generator vanishes at the specialization point".into(),
                ));
            }
            generators.push(curve.element(&rep));
        }
        BundleSpec::new(curve, generators, spec.twist)
    }

    /// Per-fiber minimal `e <= e_max` admitting a triviality certificate,
    /// with the generic fiber as a distinguished first row.
    pub fn scan(
        &self,
        fibers: &[BTreeMap<String, String>],
        e_max: u32,
    ) -> Result<ScanTable> {
        let mut rows = Vec::with_capacity(fibers.len() + 1);
        rows.push(scan_row("generic".to_string(), &self.spec, e_max)?);
        for point in fibers {
            let label = point
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(",");
            match self.specialize(point) {
                Ok(spec) => rows.push(scan_row(label, &spec, e_max)?),
                Err(e) => rows.push(ScanRow {
                    fiber: label,
                    minimal_e: None,
                    error: Some(e.to_string()),
                    section_dims: Vec::new(),
                }),
            }
        }
        Ok(ScanTable { e_max, rows })
    }
}

fn scan_row(fiber: String, spec: &BundleSpec, e_max: u32) -> Result<ScanRow> {
    let mut dims = Vec::new();
    for e in 0..=e_max {
        let cert = spec.triviality_certificate(e)?;
        if let Some(c) = &cert {
            dims.push(c.section_space_dim);
            return Ok(ScanRow {
                fiber,
                minimal_e: Some(e),
                error: None,
                section_dims: dims,
            });
        }
        let pb = spec.pullback(e);
        dims.push(if pb.twist >= 0 {
            pb.sections_dim(pb.twist as u32)
        } else {
            0
        });
    }
    Ok(ScanRow {
        fiber,
        minimal_e: None,
        error: None,
        section_dims: dims,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub fiber: String,
    pub minimal_e: Option<u32>,
    pub error: Option<String>,
    /// Section-space dimensions of the inspected pullbacks, by `e`.
    pub section_dims: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanTable {
    pub e_max: u32,
    pub rows: Vec<ScanRow>,
}

// ---------------------------------------------------------------------------
// serialized form
// ---------------------------------------------------------------------------

/// Bundle spec file: `{field, curve, generators, twist, family_params}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub field: String,
    pub curve: CurveSpec,
    pub generators: Vec<String>,
    pub twist: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub family_params: Vec<String>,
}

impl BundleFile {
    pub fn of(spec: &BundleSpec) -> BundleFile {
        BundleFile {
            field: spec.field().descriptor(),
            curve: CurveSpec::of(&spec.curve),
            generators: spec.generator_strings(),
            twist: spec.twist,
            family_params: Vec::new(),
        }
    }

    pub fn build(&self) -> Result<BundleSpec> {
        let curve = self.curve.build()?;
        let field = curve.field().clone();
        if field.descriptor() != Field::parse(&self.field)?.descriptor() {
            return Err(SyzError::Invalid(
                "field descriptor does not match the curve field".into(),
            ));
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            gens.push(curve.element(&parse_poly(g, &field)?));
        }
        BundleSpec::new(curve, gens, self.twist)
    }

    pub fn build_family(&self) -> Result<FamilySpec> {
        let spec = self.build()?;
        let params = if self.family_params.is_empty() {
            spec.field().transcendentals().to_vec()
        } else {
            self.family_params.clone()
        };
        FamilySpec::new(spec, params)
    }
}

pub fn curve_from_texts(
    field_desc: &str,
    equation: &str,
    cover: (&str, &str),
) -> Result<Arc<PlaneCurve>> {
    let field = Field::parse(field_desc)?;
    let eq = parse_poly(equation, &field)?;
    PlaneCurve::new(eq, (Var::parse(cover.0)?, Var::parse(cover.1)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quintic_f2() -> Arc<PlaneCurve> {
        curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap()
    }

    fn bundle(curve: &Arc<PlaneCurve>, gens: &[&str], twist: i64) -> BundleSpec {
        let field = curve.field().clone();
        let gens: Vec<RingElement> = gens
            .iter()
            .map(|g| curve.element(&parse_poly(g, &field).unwrap()))
            .collect();
        BundleSpec::new(curve.clone(), gens, twist).unwrap()
    }

    #[test]
    fn bundle_make_flags_trivial_determinant() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "z^2"], 3);
        assert_eq!(b.rank(), 2);
        assert!(b.det_trivial());
        let line = bundle(&c, &["x", "y"], 1);
        assert_eq!(line.rank(), 1);
        assert!(!line.det_trivial());
    }

    #[test]
    fn bundle_make_rejects_common_zero() {
        // x^2, x^3 share the zero (0:0:1) on the Fermat quintic... and every
        // point of the curve with x = 0
        let c = quintic_f2();
        let field = c.field().clone();
        let gens = vec![
            c.element(&parse_poly("x^2", &field).unwrap()),
            c.element(&parse_poly("x^3", &field).unwrap()),
        ];
        assert!(matches!(
            BundleSpec::new(c, gens, 5),
            Err(SyzError::CommonZero(_))
        ));
    }

    #[test]
    fn pullback_exponent_rule() {
        let c = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z")).unwrap();
        let b = bundle(&c, &["x^2", "y^2", "z^2"], 3);
        let pb = b.pullback(1);
        assert_eq!(pb.twist, 9);
        assert_eq!(pb.degrees, vec![6, 6, 6]);
        assert_eq!(pb.generator_strings(), vec!["x^6", "y^6", "z^6"]);
        let id = b.pullback(0);
        assert_eq!(id.twist, b.twist);
    }

    #[test]
    fn pullback_raises_coefficients() {
        let c = curve_from_texts("GF(2)(s)(t)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let b = bundle(&c, &["x^2", "y^2", "t*z^2+s*x*y"], 3);
        let pb = b.pullback(1);
        assert_eq!(
            pb.generator_strings(),
            vec!["x^4", "y^4", "s^2*x^2*y^2+t^2*z^4"]
        );
    }

    #[test]
    fn sections_deg1_of_coordinate_syzygy_empty() {
        let c = quintic_f2();
        let b = bundle(&c, &["x", "y", "z"], 1);
        assert!(b.sections(1).is_empty());
    }

    #[test]
    fn sections_contain_known_syzygies() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        let secs = b.sections(3);
        assert_eq!(secs.len(), 2);
        for s in &secs {
            assert!(b.verify_syzygy(&s.components).unwrap());
        }
        // the known sections (y,0,x) and (0,x,y) lie in the space
        let known1 = b.section_from_texts(&["y", "0", "x"], Some(3)).unwrap();
        let known2 = b.section_from_texts(&["0", "x", "y"], Some(3)).unwrap();
        assert!(b.verify_syzygy(&known1.components).unwrap());
        assert!(b.verify_syzygy(&known2.components).unwrap());
    }

    #[test]
    fn verify_rejects_non_syzygy() {
        let c = quintic_f2();
        let b = bundle(&c, &["x", "y", "z"], 1);
        let cand = b.section_from_texts(&["1", "1", "1"], Some(1)).unwrap();
        assert!(!b.verify_syzygy(&cand.components).unwrap());
    }

    #[test]
    fn wedge_antisymmetry_and_value() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        let u = b.section_from_texts(&["y", "0", "x"], Some(3)).unwrap();
        let v = b.section_from_texts(&["0", "x", "y"], Some(3)).unwrap();
        let w_uu = b.wedge_scalar(&u, &u).unwrap();
        assert!(b.field().is_zero(&w_uu));
        // cross product (y,0,x) x (0,x,y) = (-x^2, -y^2, xy) = (x^2, y^2, xy) in char 2
        let w = b.wedge_scalar(&u, &v).unwrap();
        assert_eq!(w, b.field().one());
        let w_vu = b.wedge_scalar(&v, &u).unwrap();
        assert_eq!(w_vu, b.field().neg(&b.field().one()));
    }

    #[test]
    fn nowhere_vanishing_examples() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        let u = b.section_from_texts(&["y", "0", "x"], Some(3)).unwrap();
        assert!(b.nowhere_vanishing(&u, None).is_yes());
        // (zy, xz, xy) on the quintic over F_3
        let c3 = curve_from_texts("GF(3)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let b3 = bundle(&c3, &["x^6", "y^6", "z^6"], 8);
        let s = b3
            .section_from_texts(&["z*y", "x*z", "x*y"], Some(8))
            .unwrap();
        assert!(b3.verify_syzygy(&s.components).unwrap());
        assert!(b3.nowhere_vanishing(&s, None).is_yes());
    }

    #[test]
    fn destabilizer_on_fermat_quintic_f2() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "z^2"], 3);
        let w = b.find_destabilizer(1).expect("witness at e = 1");
        assert_eq!(w.e, 1);
        assert_eq!(w.total_degree, 5);
        // the witness is the classical (x, y, z): F itself is the relation
        let pb = b.pullback(1);
        assert!(pb.verify_syzygy(&w.section.components).unwrap());
    }

    #[test]
    fn trivial_bundle_has_no_destabilizer() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        assert!(b.find_destabilizer(2).is_none());
        match b.semistability_verdict(2) {
            SemistabilityVerdict::NoSyzygyDestabilizerUpTo { e_max } => assert_eq!(e_max, 2),
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn triviality_certificate_for_split_bundle() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        let cert = b.triviality_certificate(0).unwrap().expect("certificate");
        assert_eq!(cert.frobenius_exponent, 0);
        assert_eq!(cert.frame.len(), 2);
        assert!(cert.wedge.is_some());
        // Syz(x^2,y^2,z^2)(3) over F_2 has no degree-3 sections at all
        let b2 = bundle(&c, &["x^2", "y^2", "z^2"], 3);
        assert!(b2.triviality_certificate(0).unwrap().is_none());
    }

    #[test]
    fn frobenius_closure_of_sections() {
        let c = quintic_f2();
        let b = bundle(&c, &["x^2", "y^2", "x*y"], 3);
        for s in b.sections(3) {
            let fs = b.section_frobenius(&s, 1);
            let pb = b.pullback(1);
            assert!(pb.verify_syzygy(&fs.components).unwrap());
        }
    }

    #[test]
    fn specialization_of_theorem_family() {
        let c = curve_from_texts("GF(2)(s)(t)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let b = bundle(&c, &["x^2", "y^2", "t*z^2+s*x*y"], 3);
        let fam = FamilySpec::new(b, vec!["s".into(), "t".into()]).unwrap();
        // (s,t) = (1,0) gives Syz(x^2, y^2, xy)(3)
        let mut a = BTreeMap::new();
        a.insert("s".to_string(), "1".to_string());
        a.insert("t".to_string(), "0".to_string());
        let sp = fam.specialize(&a).unwrap();
        assert_eq!(sp.generator_strings(), vec!["x^2", "y^2", "x*y"]);
        // (s,t) = (0,1) gives Syz(x^2, y^2, z^2)(3)
        let mut a2 = BTreeMap::new();
        a2.insert("s".to_string(), "0".to_string());
        a2.insert("t".to_string(), "1".to_string());
        let sp2 = fam.specialize(&a2).unwrap();
        assert_eq!(sp2.generator_strings(), vec!["x^2", "y^2", "z^2"]);
        // s -> 1 - t keeps t transcendental
        let mut a3 = BTreeMap::new();
        a3.insert("s".to_string(), "1-t".to_string());
        let sp3 = fam.specialize(&a3).unwrap();
        assert_eq!(sp3.field().descriptor(), "GF(2)(t)");
    }

    #[test]
    fn rank1_section_dim_matches_graded_piece() {
        // Syz(f1, f2)(j) has sections h f2, -h f1; dimension = dim R_{j-d1-d2}
        let c = quintic_f2();
        let b = bundle(&c, &["x", "y"], 2);
        for j in 2..7u32 {
            let dim = b.sections(j).len();
            let expect = c.graded_dim(j - 2);
            assert_eq!(dim, expect, "j = {j}");
        }
    }
}
