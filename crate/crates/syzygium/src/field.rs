//! Exact coefficient fields: prime fields `F_p`, one extension layer
//! `F_{p^a} = F_p[g]/(gen)`, and towers of rational function fields in named
//! transcendentals, e.g. `GF(2)(s)(t)`.
//!
//! Every element has a unique canonical form: extension elements are reduced
//! mod the generator, rational functions are stored coprime with a monic
//! denominator. Equality is structural.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SyzError};

/// Descriptor for one algebraic extension layer over the prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub name: String,
    /// Monic irreducible generator over `F_p`, low-to-high coefficients,
    /// length `a + 1` for an extension of degree `a >= 2`.
    pub generator: Vec<u64>,
}

impl Extension {
    pub fn degree(&self) -> usize {
        self.generator.len() - 1
    }
}

/// An exact coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u64,
    extension: Option<Extension>,
    /// Transcendental names, innermost first: `GF(2)(s)(t)` stores `["s","t"]`.
    transcendentals: Vec<String>,
}

/// A field element. The nesting depth of `Frac` layers always equals the
/// number of transcendentals of the owning field; the base is `Int` for prime
/// fields and `Ext` for extension fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    /// Element of `F_p`, canonical in `0..p`.
    Int(u64),
    /// Extension element as a polynomial in the generator, trimmed
    /// (no trailing zeros); the empty vector is zero.
    Ext(Vec<u64>),
    Frac(Box<Frac>),
}

/// A reduced fraction of polynomials in the outermost transcendental.
/// `num` and `den` are trimmed coefficient vectors over the next field layer;
/// `den` is monic and nonzero, `gcd(num, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frac {
    pub num: Vec<Elem>,
    pub den: Vec<Elem>,
}

impl Field {
    pub fn prime(p: u64) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(SyzError::Field(format!("{p} is not prime")));
        }
        Ok(Arc::new(Field {
            p,
            extension: None,
            transcendentals: Vec::new(),
        }))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn extension(&self) -> Option<&Extension> {
        self.extension.as_ref()
    }

    pub fn transcendentals(&self) -> &[String] {
        &self.transcendentals
    }

    /// Number of `Frac` layers in an element of this field.
    fn levels(&self) -> usize {
        self.transcendentals.len()
    }

    /// The constant subfield (drop all transcendentals).
    pub fn constant_field(&self) -> Arc<Field> {
        Arc::new(Field {
            p: self.p,
            extension: self.extension.clone(),
            transcendentals: Vec::new(),
        })
    }

    /// Extend this field by one more (outermost) transcendental.
    pub fn with_transcendental(&self, name: &str) -> Result<Arc<Field>> {
        self.check_fresh_name(name)?;
        let mut f = self.clone();
        f.transcendentals.push(name.to_string());
        Ok(Arc::new(f))
    }

    fn check_fresh_name(&self, name: &str) -> Result<()> {
        let reserved = name == "x" || name == "y" || name == "z";
        let clash = self.transcendentals.iter().any(|t| t == name)
            || self.extension.as_ref().map(|e| e.name == name).unwrap_or(false);
        if reserved || clash || name.is_empty() {
            return Err(SyzError::Field(format!("bad transcendental name {name:?}")));
        }
        Ok(())
    }

    // ---- constructors for elements -------------------------------------

    fn base_zero(&self) -> Elem {
        if self.extension.is_some() {
            Elem::Ext(Vec::new())
        } else {
            Elem::Int(0)
        }
    }

    fn base_one(&self) -> Elem {
        if self.extension.is_some() {
            Elem::Ext(vec![1])
        } else {
            Elem::Int(1)
        }
    }

    pub fn zero(&self) -> Elem {
        self.zero_at(self.levels())
    }

    pub fn one(&self) -> Elem {
        self.one_at(self.levels())
    }

    fn zero_at(&self, level: usize) -> Elem {
        if level == 0 {
            self.base_zero()
        } else {
            Elem::Frac(Box::new(Frac {
                num: Vec::new(),
                den: vec![self.one_at(level - 1)],
            }))
        }
    }

    fn one_at(&self, level: usize) -> Elem {
        if level == 0 {
            self.base_one()
        } else {
            Elem::Frac(Box::new(Frac {
                num: vec![self.one_at(level - 1)],
                den: vec![self.one_at(level - 1)],
            }))
        }
    }

    pub fn from_int(&self, n: i64) -> Elem {
        let r = n.rem_euclid(self.p as i64) as u64;
        let base = if self.extension.is_some() {
            if r == 0 {
                Elem::Ext(Vec::new())
            } else {
                Elem::Ext(vec![r])
            }
        } else {
            Elem::Int(r)
        };
        self.lift(base, 0, self.levels())
    }

    /// Wrap an element of level `from` into constant fractions up to `to`.
    fn lift(&self, e: Elem, from: usize, to: usize) -> Elem {
        let mut e = e;
        for lv in from..to {
            let is_zero = self.is_zero_at(lv, &e);
            e = Elem::Frac(Box::new(Frac {
                num: if is_zero { Vec::new() } else { vec![e] },
                den: vec![self.one_at(lv)],
            }));
        }
        e
    }

    /// The named transcendental as a field element.
    pub fn var(&self, name: &str) -> Result<Elem> {
        let idx = self
            .transcendentals
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| SyzError::Field(format!("unknown transcendental {name:?}")))?;
        // level of the variable's own fraction layer is idx + 1
        let inner_one = self.one_at(idx);
        let inner_zero = self.zero_at(idx);
        let v = Elem::Frac(Box::new(Frac {
            num: vec![inner_zero, inner_one.clone()],
            den: vec![inner_one],
        }));
        Ok(self.lift(v, idx + 1, self.levels()))
    }

    /// The extension generator as a field element (errors on prime fields).
    pub fn generator(&self) -> Result<Elem> {
        let _ext = self
            .extension
            .as_ref()
            .ok_or_else(|| SyzError::Field("field has no extension generator".into()))?;
        Ok(self.lift(Elem::Ext(vec![0, 1]), 0, self.levels()))
    }

    /// Resolve a symbol occurring in an expression: transcendental or generator.
    pub fn symbol(&self, name: &str) -> Result<Elem> {
        if self.transcendentals.iter().any(|t| t == name) {
            self.var(name)
        } else if self.extension.as_ref().map(|e| e.name == name).unwrap_or(false) {
            self.generator()
        } else {
            Err(SyzError::Field(format!("unknown symbol {name:?}")))
        }
    }

    // ---- base (level 0) arithmetic --------------------------------------

    fn int_inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(SyzError::Field("division by zero".into()));
        }
        // extended Euclid mod p
        let (mut t, mut new_t): (i128, i128) = (0, 1);
        let (mut r, mut new_r): (i128, i128) = (self.p as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        Ok((t.rem_euclid(self.p as i128)) as u64)
    }

    fn ext_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        self.ext_reduce(prod)
    }

    fn ext_reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let gen = &self.extension.as_ref().unwrap().generator;
        let a = gen.len() - 1;
        let p = self.p;
        while v.len() > a {
            let lead = *v.last().unwrap() % p;
            let deg = v.len() - 1;
            v.pop();
            if lead != 0 {
                // subtract lead * x^(deg-a) * gen, gen monic
                for (k, &g) in gen.iter().take(a).enumerate() {
                    let idx = deg - a + k;
                    let sub = (lead * g) % p;
                    v[idx] = (v[idx] + p * p - sub) % p;
                }
            }
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn ext_inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        if a.is_empty() {
            return Err(SyzError::Field("division by zero".into()));
        }
        // extended Euclid in F_p[x] against the generator
        let gen = self.extension.as_ref().unwrap().generator.clone();
        let (mut r0, mut r1) = (gen, a.to_vec());
        let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, rem) = self.fp_poly_divrem(&r0, &r1);
            r0 = r1;
            r1 = rem;
            let qt1 = self.fp_poly_mul(&q, &t1);
            let next = self.fp_poly_sub(&t0, &qt1);
            t0 = t1;
            t1 = next;
        }
        // r0 is the gcd, necessarily a nonzero constant
        debug_assert_eq!(r0.len(), 1);
        let c = self.int_inv(r0[0])?;
        let res: Vec<u64> = t0.iter().map(|&x| (x * c) % self.p).collect();
        Ok(self.ext_reduce(res))
    }

    // plain F_p[x] helpers for extension bookkeeping
    fn fp_poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p = self.p;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        trim_u64(&mut out);
        out
    }

    fn fp_poly_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            out[i] = (x + p - y % p) % p;
        }
        trim_u64(&mut out);
        out
    }

    fn fp_poly_divrem(&self, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        assert!(!b.is_empty());
        let p = self.p;
        let mut rem = a.to_vec();
        let mut quot = vec![0u64; a.len().saturating_sub(b.len() - 1)];
        let lead_inv = self.int_inv(*b.last().unwrap()).unwrap();
        while rem.len() >= b.len() {
            let lead = *rem.last().unwrap();
            let deg = rem.len() - 1;
            let shift = deg - (b.len() - 1);
            let c = (lead * lead_inv) % p;
            if c != 0 {
                quot[shift] = c;
                for (k, &bk) in b.iter().enumerate() {
                    let sub = (c * bk) % p;
                    rem[shift + k] = (rem[shift + k] + p - sub) % p;
                }
            }
            rem.pop();
            while rem.last() == Some(&0) {
                rem.pop();
            }
            if rem.len() < b.len() {
                break;
            }
        }
        trim_u64(&mut quot);
        (quot, rem)
    }

    // ---- level-generic arithmetic ---------------------------------------

    pub fn is_zero(&self, a: &Elem) -> bool {
        self.is_zero_at(self.levels(), a)
    }

    fn is_zero_at(&self, _level: usize, a: &Elem) -> bool {
        match a {
            Elem::Int(v) => *v == 0,
            Elem::Ext(v) => v.is_empty(),
            Elem::Frac(f) => f.num.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.add_at(self.levels(), a, b)
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.neg_at(self.levels(), a)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul_at(self.levels(), a, b)
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        self.inv_at(self.levels(), a)
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn add_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        if level == 0 {
            return match (a, b) {
                (Elem::Int(x), Elem::Int(y)) => Elem::Int((x + y) % self.p),
                (Elem::Ext(x), Elem::Ext(y)) => {
                    let n = x.len().max(y.len());
                    let mut out = vec![0u64; n];
                    for i in 0..n {
                        out[i] = (x.get(i).copied().unwrap_or(0) + y.get(i).copied().unwrap_or(0))
                            % self.p;
                    }
                    trim_u64(&mut out);
                    Elem::Ext(out)
                }
                _ => panic!("mixed element shapes"),
            };
        }
        let (fa, fb) = (as_frac(a), as_frac(b));
        let lv = level - 1;
        let n1 = self.poly_mul(lv, &fa.num, &fb.den);
        let n2 = self.poly_mul(lv, &fb.num, &fa.den);
        let num = self.poly_add(lv, &n1, &n2);
        let den = self.poly_mul(lv, &fa.den, &fb.den);
        self.make_frac(level, num, den)
    }

    fn neg_at(&self, level: usize, a: &Elem) -> Elem {
        if level == 0 {
            return match a {
                Elem::Int(x) => Elem::Int((self.p - x % self.p) % self.p),
                Elem::Ext(x) => {
                    let mut out: Vec<u64> = x.iter().map(|&c| (self.p - c) % self.p).collect();
                    trim_u64(&mut out);
                    Elem::Ext(out)
                }
                _ => panic!("mixed element shapes"),
            };
        }
        let f = as_frac(a);
        let num = f.num.iter().map(|c| self.neg_at(level - 1, c)).collect();
        Elem::Frac(Box::new(Frac {
            num,
            den: f.den.clone(),
        }))
    }

    fn mul_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        if level == 0 {
            return match (a, b) {
                (Elem::Int(x), Elem::Int(y)) => Elem::Int((x * y) % self.p),
                (Elem::Ext(x), Elem::Ext(y)) => Elem::Ext(self.ext_mul(x, y)),
                _ => panic!("mixed element shapes"),
            };
        }
        let (fa, fb) = (as_frac(a), as_frac(b));
        let lv = level - 1;
        let num = self.poly_mul(lv, &fa.num, &fb.num);
        let den = self.poly_mul(lv, &fa.den, &fb.den);
        self.make_frac(level, num, den)
    }

    fn inv_at(&self, level: usize, a: &Elem) -> Result<Elem> {
        if level == 0 {
            return match a {
                Elem::Int(x) => Ok(Elem::Int(self.int_inv(*x)?)),
                Elem::Ext(x) => Ok(Elem::Ext(self.ext_inv(x)?)),
                _ => panic!("mixed element shapes"),
            };
        }
        let f = as_frac(a);
        if f.num.is_empty() {
            return Err(SyzError::Field("division by zero".into()));
        }
        Ok(self.make_frac(level, f.den.clone(), f.num.clone()))
    }

    pub fn pow(&self, a: &Elem, mut n: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// `a^(p^e)`: the `e`-fold Frobenius. Exploits the freshman's dream on
    /// every fraction layer so transcendental degrees scale by `p^e` directly.
    pub fn frobenius(&self, a: &Elem, e: u32) -> Elem {
        self.frobenius_at(self.levels(), a, e)
    }

    fn frobenius_at(&self, level: usize, a: &Elem, e: u32) -> Elem {
        if e == 0 {
            return a.clone();
        }
        match a {
            Elem::Int(_) => a.clone(), // a^p = a in F_p
            Elem::Ext(_) => {
                let mut x = a.clone();
                for _ in 0..e {
                    x = self.pow_at0(&x, self.p);
                }
                x
            }
            Elem::Frac(f) => {
                let q = self.p.checked_pow(e).expect("q overflow");
                let num = self.poly_frobenius(level - 1, &f.num, e, q);
                let den = self.poly_frobenius(level - 1, &f.den, e, q);
                // powers of coprime polynomials stay coprime, den stays monic
                Elem::Frac(Box::new(Frac { num, den }))
            }
        }
    }

    fn pow_at0(&self, a: &Elem, mut n: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.base_one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_at(0, &acc, &base);
            }
            base = self.mul_at(0, &base, &base);
            n >>= 1;
        }
        acc
    }

    fn poly_frobenius(&self, level: usize, a: &[Elem], e: u32, q: u64) -> Vec<Elem> {
        if a.is_empty() {
            return Vec::new();
        }
        let deg = a.len() - 1;
        let mut out = vec![self.zero_at(level); deg * q as usize + 1];
        for (i, c) in a.iter().enumerate() {
            if !self.is_zero_at(level, c) {
                out[i * q as usize] = self.frobenius_at(level, c, e);
            }
        }
        self.poly_trim(level, &mut out);
        out
    }

    // ---- polynomial layer (coefficients at `level`) ----------------------

    pub(crate) fn poly_trim(&self, level: usize, v: &mut Vec<Elem>) {
        while v.last().map(|c| self.is_zero_at(level, c)).unwrap_or(false) {
            v.pop();
        }
    }

    pub(crate) fn poly_add(&self, level: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let n = a.len().max(b.len());
        let zero = self.zero_at(level);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).unwrap_or(&zero);
            let y = b.get(i).unwrap_or(&zero);
            out.push(self.add_at(level, x, y));
        }
        self.poly_trim(level, &mut out);
        out
    }

    pub(crate) fn poly_mul(&self, level: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero_at(level); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if self.is_zero_at(level, ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let t = self.mul_at(level, ai, bj);
                out[i + j] = self.add_at(level, &out[i + j], &t);
            }
        }
        self.poly_trim(level, &mut out);
        out
    }

    /// Division with remainder; coefficients form a field so this is exact
    /// schoolbook division.
    pub(crate) fn poly_divrem(&self, level: usize, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        assert!(!b.is_empty(), "polynomial division by zero");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let lead_inv = self.inv_at(level, b.last().unwrap()).expect("nonzero lead");
        let mut rem = a.to_vec();
        let mut quot = vec![self.zero_at(level); a.len() - b.len() + 1];
        while rem.len() >= b.len() {
            let c = self.mul_at(level, rem.last().unwrap(), &lead_inv);
            let shift = rem.len() - b.len();
            if !self.is_zero_at(level, &c) {
                quot[shift] = c.clone();
                for (k, bk) in b.iter().enumerate() {
                    let t = self.mul_at(level, &c, bk);
                    rem[shift + k] = self.sub_at(level, &rem[shift + k], &t);
                }
            }
            rem.pop();
            self.poly_trim(level, &mut rem);
            if rem.len() < b.len() {
                break;
            }
        }
        self.poly_trim(level, &mut quot);
        (quot, rem)
    }

    fn sub_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        self.add_at(level, a, &self.neg_at(level, b))
    }

    /// Monic gcd by the Euclidean remainder sequence (the subresultant chain
    /// over a coefficient field, normalized monic at each step).
    pub(crate) fn poly_gcd(&self, level: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut r0 = a.to_vec();
        let mut r1 = b.to_vec();
        while !r1.is_empty() {
            let (_, rem) = self.poly_divrem(level, &r0, &r1);
            r0 = r1;
            r1 = rem;
        }
        self.poly_make_monic(level, &mut r0);
        r0
    }

    fn poly_make_monic(&self, level: usize, a: &mut Vec<Elem>) {
        if let Some(lead) = a.last() {
            if !self.is_one_at(level, lead) {
                let inv = self.inv_at(level, lead).expect("nonzero lead");
                for c in a.iter_mut() {
                    *c = self.mul_at(level, c, &inv);
                }
            }
        }
    }

    fn is_one_at(&self, level: usize, a: &Elem) -> bool {
        *a == self.one_at(level)
    }

    /// Build the canonical fraction `num/den` at `level`, reducing by the gcd
    /// and normalizing the denominator monic.
    pub(crate) fn make_frac(&self, level: usize, num: Vec<Elem>, den: Vec<Elem>) -> Elem {
        assert!(!den.is_empty(), "zero denominator");
        let lv = level - 1;
        if num.is_empty() {
            return self.zero_at(level);
        }
        let (mut num, mut den) = (num, den);
        let g = self.poly_gcd(lv, &num, &den);
        if g.len() > 1 || !self.is_one_at(lv, &g[0]) {
            num = self.poly_divrem(lv, &num, &g).0;
            den = self.poly_divrem(lv, &den, &g).0;
        }
        // monic denominator
        let lead = den.last().unwrap().clone();
        if !self.is_one_at(lv, &lead) {
            let inv = self.inv_at(lv, &lead).expect("nonzero lead");
            for c in num.iter_mut() {
                *c = self.mul_at(lv, c, &inv);
            }
            for c in den.iter_mut() {
                *c = self.mul_at(lv, c, &inv);
            }
        }
        Elem::Frac(Box::new(Frac { num, den }))
    }

    /// Construct an element from an outermost numerator/denominator pair of
    /// coefficient vectors (used by parsers and the lifting code).
    pub fn frac_from_polys(&self, num: Vec<Elem>, den: Vec<Elem>) -> Result<Elem> {
        if self.levels() == 0 {
            return Err(SyzError::Field("field has no transcendental".into()));
        }
        if den.is_empty() {
            return Err(SyzError::Field("zero denominator".into()));
        }
        Ok(self.make_frac(self.levels(), num, den))
    }

    // ---- specialization / homomorphisms ----------------------------------

    /// Evaluate an element under a map of transcendentals to elements of
    /// `target`. Every transcendental of `self` must be assigned. The prime
    /// field and extension layers must agree between the two fields.
    pub fn map_elem(
        &self,
        target: &Field,
        images: &std::collections::BTreeMap<String, Elem>,
        a: &Elem,
    ) -> Result<Elem> {
        if self.p != target.p || self.extension != target.extension {
            return Err(SyzError::Field(
                "specialization must preserve the constant field".into(),
            ));
        }
        for t in &self.transcendentals {
            if !images.contains_key(t) {
                return Err(SyzError::Field(format!("no image for transcendental {t:?}")));
            }
        }
        self.map_elem_at(self.levels(), target, images, a)
    }

    fn map_elem_at(
        &self,
        level: usize,
        target: &Field,
        images: &std::collections::BTreeMap<String, Elem>,
        a: &Elem,
    ) -> Result<Elem> {
        if level == 0 {
            return Ok(target.lift(a.clone(), 0, target.levels()));
        }
        let f = as_frac(a);
        let image = images.get(&self.transcendentals[level - 1]).unwrap();
        let num = self.eval_poly_via(level - 1, target, images, &f.num, image)?;
        let den = self.eval_poly_via(level - 1, target, images, &f.den, image)?;
        if target.is_zero(&den) {
            return Err(SyzError::DenominatorVanishes);
        }
        target.div(&num, &den)
    }

    fn eval_poly_via(
        &self,
        level: usize,
        target: &Field,
        images: &std::collections::BTreeMap<String, Elem>,
        poly: &[Elem],
        at: &Elem,
    ) -> Result<Elem> {
        let mut acc = target.zero();
        for c in poly.iter().rev() {
            let c_t = self.map_elem_at(level, target, images, c)?;
            acc = target.add(&target.mul(&acc, at), &c_t);
        }
        Ok(acc)
    }

    /// Deterministic stream of sample elements, used by searches that need
    /// generic points: 0, 1, 2, ..., then (for function fields) small
    /// polynomials in the outermost transcendental.
    pub fn sample_points(&self, count: usize) -> Vec<Elem> {
        let mut out = Vec::with_capacity(count);
        let mut n: i64 = 0;
        while out.len() < count && (n as u64) < self.p.min(64) {
            out.push(self.from_int(n));
            n += 1;
        }
        if self.levels() > 0 {
            let t = self.var(self.transcendentals.last().unwrap()).unwrap();
            let mut k = 0i64;
            while out.len() < count {
                out.push(self.add(&t, &self.from_int(k)));
                k += 1;
            }
        } else if self.extension.is_some() {
            let g = self.generator().unwrap();
            let mut k = 0i64;
            while out.len() < count {
                out.push(self.add(&g, &self.from_int(k)));
                k += 1;
            }
        }
        out.truncate(count);
        out
    }
}

pub(crate) fn as_frac(e: &Elem) -> &Frac {
    match e {
        Elem::Frac(f) => f,
        _ => panic!("expected fraction layer"),
    }
}

fn trim_u64(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// descriptor parsing: GF(p), GF(p^a)=GF(p)[g]/(poly), trailing (name) layers
// ---------------------------------------------------------------------------

impl Field {
    /// Parse a field descriptor, e.g. `GF(2)`, `GF(3)(t)`,
    /// `GF(4)=GF(2)[a]/(a^2+a+1)`, `GF(2)(s)(t)`.
    pub fn parse(spec: &str) -> Result<Arc<Field>> {
        let s = spec.trim();
        let mut cur = Cursor::new(s);
        cur.expect_str("GF")?;
        cur.expect('(')?;
        let q = cur.number()?;
        let mut exp: Option<u64> = None;
        if cur.peek() == Some('^') {
            cur.bump();
            exp = Some(cur.number()?);
        }
        cur.expect(')')?;

        let mut field: Field;
        if cur.peek() == Some('=') {
            cur.bump();
            cur.expect_str("GF")?;
            cur.expect('(')?;
            let p = cur.number()?;
            cur.expect(')')?;
            cur.expect('[')?;
            let name = cur.ident()?;
            cur.expect(']')?;
            cur.expect('/')?;
            cur.expect('(')?;
            let poly_src = cur.until_matching_paren()?;
            if !is_prime(p) {
                return Err(SyzError::Field(format!("{p} is not prime")));
            }
            let generator = parse_fp_poly(&poly_src, p, &name)?;
            let a = generator.len().checked_sub(1).unwrap_or(0);
            if a < 2 {
                return Err(SyzError::Field(
                    "extension generator must have degree >= 2".into(),
                ));
            }
            let expected = match exp {
                Some(e) => p.checked_pow(e as u32),
                None => Some(q),
            };
            let order = p.checked_pow(a as u32);
            if exp.is_none() && order != Some(q) {
                return Err(SyzError::Field(format!(
                    "GF({q}) does not match an extension of degree {a} over GF({p})"
                )));
            }
            if exp.is_some() && (Some(q) != Some(p) || expected != order) {
                return Err(SyzError::Field("inconsistent GF(p^a) descriptor".into()));
            }
            if *generator.last().unwrap() != 1 {
                return Err(SyzError::Field("generator polynomial must be monic".into()));
            }
            let probe = Field {
                p,
                extension: Some(Extension {
                    name: name.clone(),
                    generator: generator.clone(),
                }),
                transcendentals: Vec::new(),
            };
            if !probe.generator_irreducible() {
                return Err(SyzError::Field(format!(
                    "generator polynomial for {name:?} is reducible over GF({p})"
                )));
            }
            field = probe;
        } else {
            if exp.is_some() {
                return Err(SyzError::Field(
                    "GF(p^a) requires an explicit generator: GF(p^a)=GF(p)[g]/(poly)".into(),
                ));
            }
            if !is_prime(q) {
                return Err(SyzError::Field(format!("{q} is not prime")));
            }
            field = Field {
                p: q,
                extension: None,
                transcendentals: Vec::new(),
            };
        }

        while cur.peek() == Some('(') {
            cur.bump();
            let name = cur.ident()?;
            cur.expect(')')?;
            field.check_fresh_name(&name)?;
            field.transcendentals.push(name);
        }
        cur.end()?;
        Ok(Arc::new(field))
    }

    /// Trial division of the generator by every monic polynomial of degree up
    /// to half its own; adequate at the scales this crate supports.
    fn generator_irreducible(&self) -> bool {
        let gen = &self.extension.as_ref().unwrap().generator;
        let a = gen.len() - 1;
        let p = self.p;
        for d in 1..=(a / 2) {
            // enumerate monic polynomials of degree d over F_p
            let count = p.pow(d as u32);
            for mask in 0..count {
                let mut poly = Vec::with_capacity(d + 1);
                let mut m = mask;
                for _ in 0..d {
                    poly.push(m % p);
                    m /= p;
                }
                poly.push(1);
                let (_, rem) = self.fp_poly_divrem(gen, &poly);
                if rem.is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Canonical descriptor text (re-parses to an equal field).
    pub fn descriptor(&self) -> String {
        let mut s = match &self.extension {
            None => format!("GF({})", self.p),
            Some(ext) => {
                let a = ext.degree();
                let order = self.p.pow(a as u32);
                let poly = fp_poly_to_string(&ext.generator, &ext.name);
                format!("GF({order})=GF({})[{}]/({poly})", self.p, ext.name)
            }
        };
        for t in &self.transcendentals {
            s.push('(');
            s.push_str(t);
            s.push(')');
        }
        s
    }
}

fn parse_fp_poly(src: &str, p: u64, name: &str) -> Result<Vec<u64>> {
    // tiny univariate parser for the generator polynomial
    let f = Field {
        p,
        extension: None,
        transcendentals: vec![name.to_string()],
    };
    let e = f.parse_elem(src)?;
    let fr = as_frac(&e);
    if fr.den.len() != 1 {
        return Err(SyzError::Field("generator must be a polynomial".into()));
    }
    let mut out = Vec::with_capacity(fr.num.len());
    for c in &fr.num {
        match c {
            Elem::Int(v) => out.push(*v),
            _ => return Err(SyzError::Field("generator must have integer coefficients".into())),
        }
    }
    Ok(out)
}

fn fp_poly_to_string(poly: &[u64], name: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in poly.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => name.to_string(),
            (1, c) => format!("{c}*{name}"),
            (i, 1) => format!("{name}^{i}"),
            (i, c) => format!("{c}*{name}^{i}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

// ---------------------------------------------------------------------------
// expression parsing for field elements
// ---------------------------------------------------------------------------

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(SyzError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    pub fn skip_ws(&mut self) {
        while self
            .src[self.pos..]
            .chars()
            .next()
            .map(|c| c.is_whitespace())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => self.err(format!("expected {c:?}, found {got:?}")),
        }
    }

    pub fn expect_str(&mut self, s: &str) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            self.err(format!("expected {s:?}"))
        }
    }

    pub fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, c)| i + c.len_utf8());
        match end {
            Some(n) => {
                let v: u64 = rest[..n]
                    .parse()
                    .map_err(|_| SyzError::Parse {
                        pos: self.pos,
                        msg: "integer too large".into(),
                    })?;
                self.pos += n;
                Ok(v)
            }
            None => self.err("expected a number"),
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if ok {
                end = i + c.len_utf8();
            } else {
                break;
            }
        }
        if end == 0 {
            return self.err("expected an identifier");
        }
        let s = rest[..end].to_string();
        self.pos += end;
        Ok(s)
    }

    fn until_matching_paren(&mut self) -> Result<String> {
        // called with the opening '(' already consumed
        let start = self.pos;
        let mut depth = 1usize;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let out = self.src[start..start + i].to_string();
                        self.pos = start + i + 1;
                        return Ok(out);
                    }
                }
                _ => {}
            }
        }
        self.err("unbalanced parentheses")
    }

    pub fn end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }
}

/// Expression AST shared by the element and polynomial parsers.
#[derive(Debug, Clone)]
pub(crate) enum Expr {
    Int(i64),
    Sym(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u64),
}

pub(crate) fn parse_expr(src: &str) -> Result<Expr> {
    let mut cur = Cursor::new(src);
    let e = expr_sum(&mut cur)?;
    cur.end()?;
    Ok(e)
}

fn expr_sum(cur: &mut Cursor) -> Result<Expr> {
    let mut lhs = expr_product(cur)?;
    loop {
        match cur.peek() {
            Some('+') => {
                cur.bump();
                let rhs = expr_product(cur)?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            }
            Some('-') => {
                cur.bump();
                let rhs = expr_product(cur)?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            }
            _ => return Ok(lhs),
        }
    }
}

fn expr_product(cur: &mut Cursor) -> Result<Expr> {
    let mut lhs = expr_unary(cur)?;
    loop {
        match cur.peek() {
            Some('*') => {
                cur.bump();
                let rhs = expr_unary(cur)?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            }
            Some('/') => {
                let pos = cur.pos();
                cur.bump();
                let rhs = expr_unary(cur)?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs), pos);
            }
            _ => return Ok(lhs),
        }
    }
}

fn expr_unary(cur: &mut Cursor) -> Result<Expr> {
    match cur.peek() {
        Some('-') => {
            cur.bump();
            Ok(Expr::Neg(Box::new(expr_unary(cur)?)))
        }
        Some('+') => {
            cur.bump();
            expr_unary(cur)
        }
        _ => expr_power(cur),
    }
}

fn expr_power(cur: &mut Cursor) -> Result<Expr> {
    let base = expr_atom(cur)?;
    if cur.peek() == Some('^') {
        cur.bump();
        let n = cur.number()?;
        Ok(Expr::Pow(Box::new(base), n))
    } else {
        Ok(base)
    }
}

fn expr_atom(cur: &mut Cursor) -> Result<Expr> {
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let e = expr_sum(cur)?;
            cur.expect(')')?;
            Ok(e)
        }
        Some(c) if c.is_ascii_digit() => {
            let n = cur.number()?;
            if n > i64::MAX as u64 {
                return cur.err("integer literal too large");
            }
            Ok(Expr::Int(n as i64))
        }
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            let pos = cur.pos();
            let id = cur.ident()?;
            Ok(Expr::Sym(id, pos))
        }
        got => cur.err(format!("expected an expression, found {got:?}")),
    }
}

impl Field {
    /// Parse an element expression over the field's symbols (transcendentals
    /// and the extension generator), with `+ - * / ^` and parentheses.
    pub fn parse_elem(&self, src: &str) -> Result<Elem> {
        let expr = parse_expr(src)?;
        self.eval_expr(&expr)
    }

    fn eval_expr(&self, e: &Expr) -> Result<Elem> {
        match e {
            Expr::Int(n) => Ok(self.from_int(*n)),
            Expr::Sym(name, pos) => self.symbol(name).map_err(|_| SyzError::Parse {
                pos: *pos,
                msg: format!("unknown identifier {name:?}"),
            }),
            Expr::Neg(a) => Ok(self.neg(&self.eval_expr(a)?)),
            Expr::Add(a, b) => Ok(self.add(&self.eval_expr(a)?, &self.eval_expr(b)?)),
            Expr::Sub(a, b) => Ok(self.sub(&self.eval_expr(a)?, &self.eval_expr(b)?)),
            Expr::Mul(a, b) => Ok(self.mul(&self.eval_expr(a)?, &self.eval_expr(b)?)),
            Expr::Div(a, b, pos) => {
                let d = self.eval_expr(b)?;
                if self.is_zero(&d) {
                    return Err(SyzError::Parse {
                        pos: *pos,
                        msg: "division by zero".into(),
                    });
                }
                self.div(&self.eval_expr(a)?, &d)
            }
            Expr::Pow(a, n) => Ok(self.pow(&self.eval_expr(a)?, *n)),
        }
    }

    // ---- display ---------------------------------------------------------

    pub fn elem_to_string(&self, a: &Elem) -> String {
        self.elem_string_at(self.levels(), a)
    }

    fn elem_string_at(&self, level: usize, a: &Elem) -> String {
        match a {
            Elem::Int(v) => format!("{v}"),
            Elem::Ext(v) => {
                let name = &self.extension.as_ref().unwrap().name;
                if v.is_empty() {
                    "0".into()
                } else {
                    fp_poly_to_string(v, name)
                }
            }
            Elem::Frac(f) => {
                let lv = level - 1;
                let num = self.poly_string(lv, &f.num);
                if f.den.len() == 1 && self.is_one_at(lv, &f.den[0]) {
                    num
                } else {
                    let den = self.poly_string(lv, &f.den);
                    format!("({num})/({den})")
                }
            }
        }
    }

    fn poly_string(&self, level: usize, poly: &[Elem]) -> String {
        if poly.is_empty() {
            return "0".into();
        }
        let name = &self.transcendentals[level];
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in poly.iter().enumerate().rev() {
            if self.is_zero_at(level, c) {
                continue;
            }
            let cs = self.elem_string_at(level, c);
            let coeff = if cs == "1" && i > 0 {
                String::new()
            } else if needs_parens(&cs) {
                format!("({cs})")
            } else {
                cs
            };
            let part = match i {
                0 => {
                    if coeff.is_empty() {
                        "1".into()
                    } else {
                        coeff
                    }
                }
                1 => {
                    if coeff.is_empty() {
                        name.clone()
                    } else {
                        format!("{coeff}*{name}")
                    }
                }
                _ => {
                    if coeff.is_empty() {
                        format!("{name}^{i}")
                    } else {
                        format!("{coeff}*{name}^{i}")
                    }
                }
            };
            parts.push(part);
        }
        parts.join("+")
    }
}

pub(crate) fn needs_parens(s: &str) -> bool {
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' | '/' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_prime_field() {
        let f = Field::parse("GF(2)").unwrap();
        assert_eq!(f.characteristic(), 2);
        assert!(f.transcendentals().is_empty());
        assert!(Field::parse("GF(4)").is_err());
        assert!(Field::parse("GF(1)").is_err());
    }

    #[test]
    fn parse_function_field() {
        let f = Field::parse("GF(3)(t)").unwrap();
        assert_eq!(f.characteristic(), 3);
        assert_eq!(f.transcendentals(), &["t".to_string()]);
        let two = Field::parse("GF(2)(s)(t)").unwrap();
        assert_eq!(two.transcendentals(), &["s".to_string(), "t".to_string()]);
        assert_eq!(two.descriptor(), "GF(2)(s)(t)");
    }

    #[test]
    fn parse_extension_field() {
        // a^2+a+1 has no root in F_2, hence is irreducible
        let f = Field::parse("GF(4)=GF(2)[a]/(a^2+a+1)").unwrap();
        assert_eq!(f.characteristic(), 2);
        assert_eq!(f.extension().unwrap().degree(), 2);
        // a^2+1 = (a+1)^2 over F_2 is reducible
        assert!(Field::parse("GF(4)=GF(2)[a]/(a^2+1)").is_err());
    }

    #[test]
    fn extension_arithmetic() {
        let f = Field::parse("GF(4)=GF(2)[a]/(a^2+a+1)").unwrap();
        let a = f.generator().unwrap();
        // a^2 = a + 1, a^3 = 1
        let a2 = f.mul(&a, &a);
        assert_eq!(a2, f.parse_elem("a+1").unwrap());
        assert_eq!(f.pow(&a, 3), f.one());
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
    }

    #[test]
    fn fraction_canonical_form() {
        let f = Field::parse("GF(3)(t)").unwrap();
        // (t^2 - 1)/(t - 1) reduces to t + 1
        let e = f.parse_elem("(t^2-1)/(t-1)").unwrap();
        assert_eq!(e, f.parse_elem("t+1").unwrap());
        // monic denominator: 1/(2t) = 2/t ... 2t monic-normalizes to t with num 2
        let e2 = f.parse_elem("1/(2*t)").unwrap();
        assert_eq!(f.elem_to_string(&e2), "(2)/(t)");
        let back = f.parse_elem(&f.elem_to_string(&e2)).unwrap();
        assert_eq!(back, e2);
    }

    #[test]
    fn tower_arithmetic() {
        let f = Field::parse("GF(2)(s)(t)").unwrap();
        let s = f.var("s").unwrap();
        let t = f.var("t").unwrap();
        let sum = f.add(&s, &t);
        let prod = f.mul(&sum, &sum);
        // char 2: (s+t)^2 = s^2 + t^2
        let direct = f.add(&f.mul(&s, &s), &f.mul(&t, &t));
        assert_eq!(prod, direct);
        let q = f.div(&s, &t).unwrap();
        assert_eq!(f.mul(&q, &t), s);
    }

    #[test]
    fn frobenius_on_fractions() {
        let f = Field::parse("GF(3)(t)").unwrap();
        let e = f.parse_elem("(t+1)/(t^2+2)").unwrap();
        let fr = f.frobenius(&e, 1);
        assert_eq!(fr, f.parse_elem("(t^3+1)/(t^6+2)").unwrap());
        assert_eq!(fr, f.pow(&e, 3));
    }

    #[test]
    fn specialization() {
        let f = Field::parse("GF(2)(s)(t)").unwrap();
        let g = Field::parse("GF(2)(t)").unwrap();
        let mut images = std::collections::BTreeMap::new();
        // s -> 1 - t = 1 + t, t -> t
        images.insert("s".to_string(), g.parse_elem("1+t").unwrap());
        images.insert("t".to_string(), g.var("t").unwrap());
        let e = f.parse_elem("s*t+s").unwrap();
        let mapped = f.map_elem(&g, &images, &e).unwrap();
        assert_eq!(mapped, g.parse_elem("(1+t)*t+1+t").unwrap());
        // denominator vanishing: 1/(s+1+t) at s -> 1+t over char 2
        let bad = f.parse_elem("1/(s+1+t)").unwrap();
        assert!(matches!(
            f.map_elem(&g, &images, &bad),
            Err(SyzError::DenominatorVanishes)
        ));
    }

    #[test]
    fn display_round_trip() {
        let f = Field::parse("GF(5)(t)").unwrap();
        for src in ["0", "1", "t", "(t^2+3)/(t+4)", "2*t^3+t+1"] {
            let e = f.parse_elem(src).unwrap();
            let s = f.elem_to_string(&e);
            assert_eq!(f.parse_elem(&s).unwrap(), e, "round trip for {src}");
        }
    }
}
