//! Serialized machine-checkable certificates and their verifier.
//!
//! Checking a certificate never recomputes section-space kernels: it only
//! re-verifies syzygy identities, the recorded wedge unit or
//! nowhere-vanishing saturation data, and independence.

use serde::{Deserialize, Serialize};

use crate::bundle::{BundleFile, BundleSpec, NvWitness, Section, TrivialityCertificate};
use crate::curve::spans_degree;
use crate::error::{Result, SyzError};
use crate::poly::HomogeneousPoly;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Certificate {
    #[serde(rename = "triviality")]
    Triviality(TrivialityFile),
    #[serde(rename = "destabilizer")]
    Destabilizer(DestabilizerFile),
    #[serde(rename = "nowhere-vanishing")]
    NowhereVanishing(NowhereVanishingFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrivialityFile {
    pub bundle: BundleFile,
    pub frobenius_exponent: u32,
    pub total_degree: u32,
    /// Frame sections as component polynomial texts.
    pub frame: Vec<Vec<String>>,
    /// Rank-2 fast path: the recorded unit value of the wedge pairing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wedge: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nowhere_vanishing: Vec<NvWitness>,
    pub section_space_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DestabilizerFile {
    pub bundle: BundleFile,
    pub frobenius_exponent: u32,
    pub total_degree: u32,
    pub section: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NowhereVanishingFile {
    pub bundle: BundleFile,
    pub total_degree: u32,
    pub section: Vec<String>,
    pub exponent: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specialization: Option<String>,
}

impl From<&TrivialityCertificate> for Certificate {
    fn from(c: &TrivialityCertificate) -> Certificate {
        Certificate::Triviality(TrivialityFile {
            bundle: c.bundle.clone(),
            frobenius_exponent: c.frobenius_exponent,
            total_degree: c.total_degree,
            frame: c.frame.iter().map(|s| s.component_strings()).collect(),
            wedge: c.wedge.clone(),
            nowhere_vanishing: c.nowhere_vanishing.clone(),
            section_space_dim: c.section_space_dim,
        })
    }
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Certificate> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serialization")
    }

    /// Re-verify the certificate; returns a human-readable summary on
    /// success and an error describing the first broken condition otherwise.
    pub fn check(&self) -> Result<String> {
        match self {
            Certificate::Triviality(t) => check_triviality(t),
            Certificate::Destabilizer(d) => check_destabilizer(d),
            Certificate::NowhereVanishing(n) => check_nowhere_vanishing(n),
        }
    }
}

fn parse_section(spec: &BundleSpec, texts: &[String], j: u32) -> Result<Section> {
    let refs: Vec<&str> = texts.iter().map(|s| s.as_str()).collect();
    spec.section_from_texts(&refs, Some(j))
}

fn check_triviality(t: &TrivialityFile) -> Result<String> {
    let base = t.bundle.build()?;
    let pb = base.pullback(t.frobenius_exponent);
    if !pb.det_trivial() {
        return Err(SyzError::Invalid(
            "pullback does not have a trivial determinant".into(),
        ));
    }
    if pb.twist != t.total_degree as i64 {
        return Err(SyzError::Invalid("total degree does not match the twist".into()));
    }
    let n = pb.rank();
    if t.frame.len() != n {
        return Err(SyzError::Invalid(format!(
            "frame has {} sections, rank is {n}",
            t.frame.len()
        )));
    }
    let mut frame = Vec::with_capacity(n);
    for texts in &t.frame {
        let s = parse_section(&pb, texts, t.total_degree)?;
        if !pb.verify_syzygy(&s.components)? {
            return Err(SyzError::Invalid("frame member is not a syzygy".into()));
        }
        frame.push(s);
    }
    if n == 2 {
        let recorded = t
            .wedge
            .as_ref()
            .ok_or_else(|| SyzError::Invalid("rank-2 certificate without a wedge value".into()))?;
        let lambda = pb.field().parse_elem(recorded)?;
        if pb.field().is_zero(&lambda) {
            return Err(SyzError::Invalid("recorded wedge is zero, not a unit".into()));
        }
        // verify u x v = lambda (f_1, f_2, f_3) without any solve
        let (u, v) = (&frame[0], &frame[1]);
        let cross = [
            u.components[1]
                .mul(&v.components[2])
                .rep
                .sub(&u.components[2].mul(&v.components[1]).rep)?,
            u.components[2]
                .mul(&v.components[0])
                .rep
                .sub(&u.components[0].mul(&v.components[2]).rep)?,
            u.components[0]
                .mul(&v.components[1])
                .rep
                .sub(&u.components[1].mul(&v.components[0]).rep)?,
        ];
        for (c, g) in cross.iter().zip(&pb.generators) {
            let expect = g.rep.scale(&lambda);
            if !pb.curve.nf(&c.sub(&expect)?).is_zero() {
                return Err(SyzError::Invalid(
                    "wedge identity u x v = lambda f fails".into(),
                ));
            }
        }
        return Ok(format!(
            "triviality frame verified: rank 2, e = {}, unit wedge {recorded}",
            t.frobenius_exponent
        ));
    }
    // general path: re-verify nowhere-vanishing witnesses and independence
    for w in &t.nowhere_vanishing {
        let s = frame
            .get(w.frame_index)
            .ok_or_else(|| SyzError::Invalid("witness index out of range".into()))?;
        let mut polys: Vec<HomogeneousPoly> = s
            .components
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.rep.clone())
            .collect();
        polys.push(pb.curve.equation.clone());
        if spans_degree(pb.field(), &polys, w.exponent).is_none() {
            return Err(SyzError::Invalid(format!(
                "nowhere-vanishing witness fails at N = {}",
                w.exponent
            )));
        }
    }
    // independence: coordinate matrix of the frame has full row rank
    let coords: Vec<Vec<crate::field::Elem>> = frame
        .iter()
        .map(|s| {
            let mut v = Vec::new();
            for (c, &d) in s.components.iter().zip(&pb.degrees) {
                v.extend(pb.curve.coords(&c.rep, t.total_degree - d));
            }
            v
        })
        .collect();
    let m = crate::linalg::Matrix::from_rows(pb.field().clone(), coords);
    if m.rank() != n {
        return Err(SyzError::Invalid("frame sections are not independent".into()));
    }
    Ok(format!(
        "triviality frame verified: rank {n}, e = {}",
        t.frobenius_exponent
    ))
}

fn check_destabilizer(d: &DestabilizerFile) -> Result<String> {
    let base = d.bundle.build()?;
    let pb = base.pullback(d.frobenius_exponent);
    let s = parse_section(&pb, &d.section, d.total_degree)?;
    if s.is_zero() {
        return Err(SyzError::Invalid("destabilizer section is zero".into()));
    }
    if !pb.verify_syzygy(&s.components)? {
        return Err(SyzError::Invalid("destabilizer is not a syzygy".into()));
    }
    let sum: u32 = pb.degrees.iter().sum();
    if 2 * d.total_degree >= sum {
        return Err(SyzError::Invalid(format!(
            "degree {} does not violate the slope bound 2j < {sum}",
            d.total_degree
        )));
    }
    Ok(format!(
        "destabilizer verified: e = {}, degree {} below the slope bound {sum}/2",
        d.frobenius_exponent, d.total_degree
    ))
}

fn check_nowhere_vanishing(nv: &NowhereVanishingFile) -> Result<String> {
    let base = nv.bundle.build()?;
    let s = parse_section(&base, &nv.section, nv.total_degree)?;
    if !base.verify_syzygy(&s.components)? {
        return Err(SyzError::Invalid("section is not a syzygy".into()));
    }
    let mut polys: Vec<HomogeneousPoly> = s
        .components
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.rep.clone())
        .collect();
    polys.push(base.curve.equation.clone());
    if spans_degree(base.field(), &polys, nv.exponent).is_none() {
        return Err(SyzError::Invalid(format!(
            "span check fails at the recorded exponent N = {}",
            nv.exponent
        )));
    }
    Ok(format!(
        "nowhere-vanishing verified at N = {}",
        nv.exponent
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::curve_from_texts;
    use crate::poly::parse_poly;

    fn split_bundle() -> BundleSpec {
        let c = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let f = c.field().clone();
        let gens = vec![
            c.element(&parse_poly("x^2", &f).unwrap()),
            c.element(&parse_poly("y^2", &f).unwrap()),
            c.element(&parse_poly("x*y", &f).unwrap()),
        ];
        BundleSpec::new(c, gens, 3).unwrap()
    }

    #[test]
    fn triviality_certificate_round_trip_and_mutation() {
        let b = split_bundle();
        let cert = b.triviality_certificate(0).unwrap().unwrap();
        let file = Certificate::from(&cert);
        let json = file.to_json().unwrap();
        let parsed = Certificate::from_json(&json).unwrap();
        assert!(parsed.check().is_ok());
        // mutate one frame coefficient: y -> y + x in the first component
        let Certificate::Triviality(mut t) = parsed else {
            unreachable!()
        };
        t.frame[0][0] = format!("({})+x", t.frame[0][0]);
        assert!(Certificate::Triviality(t.clone()).check().is_err());
        // mutate the recorded wedge value to zero
        let Certificate::Triviality(mut t2) = Certificate::from_json(&json).unwrap() else {
            unreachable!()
        };
        t2.wedge = Some("0".into());
        assert!(Certificate::Triviality(t2).check().is_err());
    }

    #[test]
    fn destabilizer_certificate_checks() {
        let c = curve_from_texts("GF(2)", "x^5+y^5+z^5", ("x", "z")).unwrap();
        let f = c.field().clone();
        let gens = vec![
            c.element(&parse_poly("x^2", &f).unwrap()),
            c.element(&parse_poly("y^2", &f).unwrap()),
            c.element(&parse_poly("z^2", &f).unwrap()),
        ];
        let b = BundleSpec::new(c, gens, 3).unwrap();
        let w = b.find_destabilizer(1).unwrap();
        let file = Certificate::Destabilizer(DestabilizerFile {
            bundle: BundleFile::of(&b),
            frobenius_exponent: w.e,
            total_degree: w.total_degree,
            section: w.section.component_strings(),
        });
        assert!(file.check().is_ok());
        // a non-syzygy mutation is rejected
        let Certificate::Destabilizer(mut d) = file else {
            unreachable!()
        };
        d.section[0] = "x".into();
        d.section[1] = "x".into();
        d.section[2] = "x".into();
        assert!(Certificate::Destabilizer(d).check().is_err());
    }
}
