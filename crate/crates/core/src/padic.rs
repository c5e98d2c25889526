//! Arithmetic in F = Q_p (p odd) and its three quadratic extensions.
//!
//! Elements built from integers or rationals stay exact; anything else is
//! carried as (valuation, unit mod p^r) and reports precision exhaustion
//! instead of returning a wrong digit.

use crate::arith::{self, big_inv_mod, big_pow, big_val};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PAdicField {
    p: u64,
    precision: u32,
}

impl PAdicField {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidField("p = 2 is not supported".into()));
        }
        if !arith::is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > 1 << 20 {
            return Err(Error::InvalidField(format!("{p} is too large")));
        }
        if precision < 4 {
            return Err(Error::InvalidField(format!("precision {precision} < 4")));
        }
        Ok(Self { p, precision })
    }

    pub fn with_default_precision(p: u64) -> Result<Self> {
        Self::new(p, DEFAULT_PRECISION)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Residue field cardinality q.
    pub fn q(&self) -> u64 {
        self.p
    }

    /// Canonical non-square unit: the smallest positive non-residue mod p.
    pub fn u(&self) -> u64 {
        arith::smallest_nonresidue(self.p)
    }

    pub fn int(&self, n: i64) -> PadicNumber {
        PadicNumber::exact(*self, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<PadicNumber> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(PadicNumber::exact(*self, BigRational::new(num.into(), den.into())))
    }

    pub fn from_big_rational(&self, r: BigRational) -> PadicNumber {
        PadicNumber::exact(*self, r)
    }

    /// An inexact element p^val * unit with `rel` known unit digits.
    pub fn approx(&self, val: i64, unit: BigInt, rel: u32) -> Result<PadicNumber> {
        let p = BigInt::from(self.p);
        if rel == 0 {
            return Err(Error::PrecisionExhausted("no known digits".into()));
        }
        let m = big_pow(self.p, rel);
        let unit = unit.mod_floor(&m);
        if (&unit % &p).is_zero() {
            return Err(Error::Precondition("unit part divisible by p".into()));
        }
        Ok(PadicNumber { field: *self, repr: Repr::Approx { val, unit, rel: rel.min(self.precision) } })
    }

    pub fn zero(&self) -> PadicNumber {
        self.int(0)
    }

    pub fn one(&self) -> PadicNumber {
        self.int(1)
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Exact(BigRational),
    Approx { val: i64, unit: BigInt, rel: u32 },
}

/// An element of Q_p: exact rational or (valuation, unit mod p^rel).
#[derive(Clone, Debug)]
pub struct PadicNumber {
    field: PAdicField,
    repr: Repr,
}

impl PadicNumber {
    fn exact(field: PAdicField, r: BigRational) -> Self {
        Self { field, repr: Repr::Exact(r) }
    }

    pub fn field(&self) -> PAdicField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Exact(r) if r.is_zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Exact(r) => Some(r),
            Repr::Approx { .. } => None,
        }
    }

    /// Valuation, or None for zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(big_val(r.numer(), self.p()).0 - big_val(r.denom(), self.p()).0)
                }
            }
            Repr::Approx { val, .. } => Some(*val),
        }
    }

    fn nonzero_val(&self) -> Result<i64> {
        self.valuation().ok_or(Error::ZeroInput)
    }

    /// Number of known unit digits (the field precision for exact values).
    pub fn relative_precision(&self) -> u32 {
        match &self.repr {
            Repr::Exact(_) => u32::MAX,
            Repr::Approx { rel, .. } => *rel,
        }
    }

    fn to_approx_parts(&self) -> Result<(i64, BigInt, u32)> {
        match &self.repr {
            Repr::Approx { val, unit, rel } => Ok((*val, unit.clone(), *rel)),
            Repr::Exact(r) => {
                if r.is_zero() {
                    return Err(Error::ZeroInput);
                }
                let (vn, un) = big_val(r.numer(), self.p());
                let (vd, ud) = big_val(r.denom(), self.p());
                let rel = self.field.precision;
                let m = big_pow(self.p(), rel);
                let inv = big_inv_mod(&ud, &m).expect("unit denominator");
                Ok((vn - vd, (un * inv).mod_floor(&m), rel))
            }
        }
    }

    /// Unit part x / p^v reduced mod p^k.
    pub fn unit_residue(&self, k: u32) -> Result<BigInt> {
        let m = big_pow(self.p(), k);
        match &self.repr {
            Repr::Exact(r) => {
                if r.is_zero() {
                    return Err(Error::ZeroInput);
                }
                let (_, un) = big_val(r.numer(), self.p());
                let (_, ud) = big_val(r.denom(), self.p());
                let inv = big_inv_mod(&ud, &m).expect("unit denominator");
                Ok((un * inv).mod_floor(&m))
            }
            Repr::Approx { unit, rel, .. } => {
                if k > *rel {
                    return Err(Error::PrecisionExhausted(format!(
                        "unit known to {rel} digits, {k} requested"
                    )));
                }
                Ok(unit.mod_floor(&m))
            }
        }
    }

    pub fn unit_residue_u64(&self, k: u32) -> Result<u64> {
        Ok(self.unit_residue(k)?.to_u64().expect("residue fits u64"))
    }

    /// The element reduced mod p^k; requires valuation >= 0.
    pub fn residue(&self, k: u32) -> Result<u64> {
        let m = big_pow(self.p(), k);
        let v = match self.valuation() {
            None => return Ok(0),
            Some(v) => v,
        };
        if v < 0 {
            return Err(Error::Precondition("element is not integral".into()));
        }
        if v >= k as i64 {
            return Ok(0);
        }
        let digits = k - v as u32;
        let u = self.unit_residue(digits)?;
        let r = (u * big_pow(self.p(), v as u32)).mod_floor(&m);
        Ok(r.to_u64().expect("residue fits u64"))
    }

    /// Fractional part {x}_p in [0, 1) with denominator a power of p.
    pub fn frac_part(&self) -> Result<Ratio<i64>> {
        let v = match self.valuation() {
            None => return Ok(Ratio::from_integer(0)),
            Some(v) => v,
        };
        if v >= 0 {
            return Ok(Ratio::from_integer(0));
        }
        let m = (-v) as u32;
        let den = arith::upow(self.p(), m);
        if den > i64::MAX as u64 {
            return Err(Error::Precondition("fractional part denominator overflow".into()));
        }
        let c = self.unit_residue(m)?.to_i64().expect("small residue");
        Ok(Ratio::new(c, den as i64))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field.p != other.field.p {
            return Err(Error::FieldMismatch(format!("Q_{} vs Q_{}", self.p(), other.p())));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Exact(r) => Self::exact(self.field, -r.clone()),
            Repr::Approx { val, unit, rel } => {
                let m = big_pow(self.p(), *rel);
                Self {
                    field: self.field,
                    repr: Repr::Approx { val: *val, unit: (-unit.clone()).mod_floor(&m), rel: *rel },
                }
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if let (Repr::Exact(a), Repr::Exact(b)) = (&self.repr, &other.repr) {
            return Ok(Self::exact(self.field, a * b));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(self.field.zero());
        }
        let (v1, u1, r1) = self.to_approx_parts()?;
        let (v2, u2, r2) = other.to_approx_parts()?;
        let rel = r1.min(r2);
        let m = big_pow(self.p(), rel);
        Ok(Self { field: self.field, repr: Repr::Approx { val: v1 + v2, unit: (u1 * u2).mod_floor(&m), rel } })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if let (Repr::Exact(a), Repr::Exact(b)) = (&self.repr, &other.repr) {
            return Ok(Self::exact(self.field, a + b));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (v1, u1, r1) = self.to_approx_parts()?;
        let (v2, u2, r2) = other.to_approx_parts()?;
        let ((va, ua), (vb, ub)) = if v1 <= v2 { ((v1, u1), (v2, u2)) } else { ((v2, u2), (v1, u1)) };
        let abs = (v1 + r1 as i64).min(v2 + r2 as i64);
        let digits = abs - va;
        if digits <= 0 {
            return Err(Error::PrecisionExhausted("sum has no known digits".into()));
        }
        let m = big_pow(self.p(), digits as u32);
        let shift = big_pow(self.p(), (vb - va) as u32);
        let s = (ua + ub * shift).mod_floor(&m);
        if s.is_zero() {
            return Err(Error::PrecisionExhausted("cancellation consumed all known digits".into()));
        }
        let (w, unit) = big_val(&s, self.p());
        let rel = (digits - w) as u32;
        let m2 = big_pow(self.p(), rel);
        Ok(Self { field: self.field, repr: Repr::Approx { val: va + w, unit: unit.mod_floor(&m2), rel } })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Exact(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Self::exact(self.field, r.recip()))
                }
            }
            Repr::Approx { val, unit, rel } => {
                let m = big_pow(self.p(), *rel);
                let inv = big_inv_mod(unit, &m).expect("unit is invertible");
                Ok(Self { field: self.field, repr: Repr::Approx { val: -val, unit: inv, rel: *rel } })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Square class data: (valuation parity, unit part is a square mod p).
    pub fn square_class(&self) -> Result<(bool, bool)> {
        let v = self.nonzero_val()?;
        let u = self.unit_residue_u64(1)?;
        Ok((v.rem_euclid(2) == 1, arith::legendre(u as i64, self.p()) == 1))
    }

    /// Canonical representative of the square class in {1, u, p, up}.
    pub fn square_class_rep(&self) -> Result<i64> {
        let (odd, sq) = self.square_class()?;
        let u = self.field.u() as i64;
        let p = self.p() as i64;
        Ok(match (odd, sq) {
            (false, true) => 1,
            (false, false) => u,
            (true, true) => p,
            (true, false) => u * p,
        })
    }

    /// Equality up to the known digits of both operands.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.p() != other.p() {
            return false;
        }
        if let (Repr::Exact(a), Repr::Exact(b)) = (&self.repr, &other.repr) {
            return a == b;
        }
        match self.sub(other) {
            Err(Error::PrecisionExhausted(_)) => true,
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Exact(r) => write!(f, "{r}"),
            Repr::Approx { val, unit, rel } => write!(f, "{}^{} * {} (+O({}^{}))", self.p(), val, unit, self.p(), rel),
        }
    }
}

/// The three quadratic extensions of Q_p for odd p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtKind {
    Unramified,
    RamifiedP,
    RamifiedUp,
}

impl ExtKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unramified" => Ok(Self::Unramified),
            "ramified-p" => Ok(Self::RamifiedP),
            "ramified-up" => Ok(Self::RamifiedUp),
            _ => Err(Error::Parse(format!("unknown extension `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Unramified => "unramified",
            Self::RamifiedP => "ramified-p",
            Self::RamifiedUp => "ramified-up",
        }
    }

    pub fn all() -> [ExtKind; 3] {
        [Self::Unramified, Self::RamifiedP, Self::RamifiedUp]
    }
}

/// K = F(sqrt d) with d in {u, p, up}; delta = sqrt d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    field: PAdicField,
    kind: ExtKind,
    d: i64,
}

impl QuadExt {
    pub fn new(field: PAdicField, kind: ExtKind) -> Self {
        let u = field.u() as i64;
        let p = field.p() as i64;
        let d = match kind {
            ExtKind::Unramified => u,
            ExtKind::RamifiedP => p,
            ExtKind::RamifiedUp => u * p,
        };
        Self { field, kind, d }
    }

    pub fn field(&self) -> PAdicField {
        self.field
    }

    pub fn kind(&self) -> ExtKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Unit part of d (1 or u for ramified, u for unramified).
    pub fn d_unit(&self) -> i64 {
        match self.kind {
            ExtKind::Unramified => self.d,
            _ => self.d / self.p() as i64,
        }
    }

    pub fn is_ramified(&self) -> bool {
        self.kind != ExtKind::Unramified
    }

    pub fn e(&self) -> u32 {
        if self.is_ramified() {
            2
        } else {
            1
        }
    }

    pub fn f(&self) -> u32 {
        3 - self.e()
    }

    pub fn residue_cardinality(&self) -> u64 {
        arith::upow(self.p(), self.f())
    }

    pub fn delta(&self) -> ExtElement {
        ExtElement::from_ints(self, 0, 1)
    }

    pub fn uniformizer(&self) -> ExtElement {
        if self.is_ramified() {
            self.delta()
        } else {
            ExtElement::from_ints(self, self.p() as i64, 0)
        }
    }

    pub fn embed(&self, a: &PadicNumber) -> ExtElement {
        ExtElement { a: a.clone(), b: self.field.zero(), d: self.d }
    }

    pub fn element(&self, a: PadicNumber, b: PadicNumber) -> ExtElement {
        ExtElement { a, b, d: self.d }
    }

    /// Canonical non-norm: the first of u, p, up that is not a norm from K.
    pub fn lambda0(&self) -> i64 {
        let u = self.field.u() as i64;
        let p = self.p() as i64;
        for c in [u, p, u * p] {
            if !is_norm(&self.field.int(c), self).expect("nonzero") {
                return c;
            }
        }
        unreachable!("norm index is 2")
    }

    pub fn class_reps(&self) -> [i64; 4] {
        let u = self.field.u() as i64;
        let p = self.p() as i64;
        [1, u, p, u * p]
    }
}

/// a + b sqrt(d).
#[derive(Clone, Debug)]
pub struct ExtElement {
    pub a: PadicNumber,
    pub b: PadicNumber,
    d: i64,
}

impl ExtElement {
    pub fn from_ints(k: &QuadExt, x: i64, y: i64) -> Self {
        let f = k.field();
        Self { a: f.int(x), b: f.int(y), d: k.d() }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    fn dnum(&self) -> PadicNumber {
        self.a.field().int(self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: self.b.neg(), d: self.d }
    }

    pub fn neg(&self) -> Self {
        Self { a: self.a.neg(), b: self.b.neg(), d: self.d }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self { a: self.a.add(&o.a)?, b: self.b.add(&o.b)?, d: self.d })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.d != o.d {
            return Err(Error::FieldMismatch("elements of different extensions".into()));
        }
        let ac = self.a.mul(&o.a)?;
        let bd = self.b.mul(&o.b)?.mul(&self.dnum())?;
        let ad = self.a.mul(&o.b)?;
        let bc = self.b.mul(&o.a)?;
        Ok(Self { a: ac.add(&bd)?, b: ad.add(&bc)?, d: self.d })
    }

    pub fn scale(&self, t: &PadicNumber) -> Result<Self> {
        Ok(Self { a: self.a.mul(t)?, b: self.b.mul(t)?, d: self.d })
    }

    /// N(x) = a^2 - d b^2.
    pub fn norm(&self) -> Result<PadicNumber> {
        let a2 = self.a.mul(&self.a)?;
        let db2 = self.b.mul(&self.b)?.mul(&self.dnum())?;
        a2.sub(&db2)
    }

    /// Tr(x) = 2a.
    pub fn trace(&self) -> Result<PadicNumber> {
        self.a.mul(&self.a.field().int(2))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm()?;
        self.conj().scale(&n.inv()?)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let f = self.a.field();
        let mut acc = Self { a: f.one(), b: f.zero(), d: self.d };
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Valuation for the uniformizer of K: v_F(N x) / f.
    pub fn val_k(&self) -> Result<i64> {
        let n = self.norm()?;
        let v = n.valuation().ok_or(Error::ZeroInput)?;
        let ramified = self.d.rem_euclid(self.a.p() as i64) == 0;
        Ok(if ramified { v } else { v / 2 })
    }

    /// True when b = 0, i.e. the element lies in F.
    pub fn in_base(&self) -> bool {
        self.b.is_zero()
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.a.approx_eq(&o.a) && self.b.approx_eq(&o.b)
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// Hilbert symbol (a, b) over Q_p, p odd, by the closed formula
/// (-1)^{v(a)v(b)(p-1)/2} (u_b/p)^{v(a)} (u_a/p)^{v(b)}.
pub fn hilbert_symbol(a: &PadicNumber, b: &PadicNumber) -> Result<i8> {
    let va = a.nonzero_val()?;
    let vb = b.nonzero_val()?;
    let p = a.p();
    if b.p() != p {
        return Err(Error::FieldMismatch("Hilbert symbol over different fields".into()));
    }
    let ua = a.unit_residue_u64(1)? as i64;
    let ub = b.unit_residue_u64(1)? as i64;
    let eps = ((p - 1) / 2) as i64;
    let mut s: i8 = if (va * vb * eps).rem_euclid(2) == 1 { -1 } else { 1 };
    if vb.rem_euclid(2) == 1 {
        s *= arith::legendre(ua, p);
    }
    if va.rem_euclid(2) == 1 {
        s *= arith::legendre(ub, p);
    }
    Ok(s)
}

/// Membership of t in N_{K/F}(K^x).
pub fn is_norm(t: &PadicNumber, k: &QuadExt) -> Result<bool> {
    Ok(omega_kf(t, k)? == 1)
}

/// The quadratic character attached to K/F.
pub fn omega_kf(t: &PadicNumber, k: &QuadExt) -> Result<i8> {
    hilbert_symbol(t, &k.field().int(k.d()))
}

/// Solvability of z^2 = a x^2 + b y^2 by exhaustive search mod p^3 after
/// reducing a and b to square-class representatives. Independent of the
/// closed formula; used to cross-check it.
pub fn hilbert_oracle(a: &PadicNumber, b: &PadicNumber) -> Result<i8> {
    let p = a.p();
    let ra = a.square_class_rep()?;
    let rb = b.square_class_rep()?;
    let m = arith::upow(p, 3) as i64;
    let mut is_sq = vec![false; m as usize];
    for z in 0..m {
        is_sq[((z * z) % m) as usize] = true;
    }
    for x in 0..m {
        for y in 0..m {
            if x % p as i64 == 0 && y % p as i64 == 0 {
                continue;
            }
            let v = (ra * x % m * x % m + rb * y % m * y % m).rem_euclid(m);
            if is_sq[v as usize] {
                return Ok(1);
            }
        }
    }
    Ok(-1)
}

/// Exact rational helper used by callers that need a BigRational.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_one(r: &BigRational) -> bool {
    r.is_one()
}

pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> PAdicField {
        PAdicField::with_default_precision(p).unwrap()
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(PAdicField::new(2, 32).is_err());
        assert!(PAdicField::new(9, 32).is_err());
        assert!(PAdicField::new(5, 3).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let f = q(5);
        assert_eq!(hilbert_symbol(&f.int(1), &f.int(7)).unwrap(), 1);
        assert_eq!(hilbert_symbol(&f.int(2), &f.int(5)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&f.int(-1), &f.int(-1)).unwrap(), 1);
        assert_eq!(hilbert_oracle(&f.int(2), &f.int(5)).unwrap(), -1);
        assert_eq!(hilbert_oracle(&f.int(-1), &f.int(-1)).unwrap(), 1);
        assert!(hilbert_symbol(&f.zero(), &f.int(2)).is_err());
    }

    #[test]
    fn norm_examples() {
        let f = q(5);
        let k = QuadExt::new(f, ExtKind::Unramified);
        assert_eq!(k.d(), 2);
        assert!(is_norm(&f.int(1), &k).unwrap());
        assert!(!is_norm(&f.int(5), &k).unwrap());
        assert!(is_norm(&f.int(-2), &k).unwrap());
        assert_eq!(omega_kf(&f.int(5), &k).unwrap(), -1);
        assert_eq!(omega_kf(&f.int(49), &k).unwrap(), 1);
    }

    #[test]
    fn extension_arithmetic() {
        let f = q(7);
        for kind in ExtKind::all() {
            let k = QuadExt::new(f, kind);
            let s = k.delta();
            assert!(s.trace().unwrap().is_zero());
            assert!(s.norm().unwrap().approx_eq(&f.int(-k.d())));
            let x = ExtElement::from_ints(&k, 3, 5);
            assert!(x.conj().conj().approx_eq(&x));
            let y = x.mul(&x.inv().unwrap()).unwrap();
            assert!(y.approx_eq(&ExtElement::from_ints(&k, 1, 0)));
            assert!(x.mul(&x.conj()).unwrap().in_base());
        }
        let kr = QuadExt::new(f, ExtKind::RamifiedP);
        assert_eq!(kr.delta().val_k().unwrap(), 1);
        assert_eq!(kr.residue_cardinality(), 7);
        assert_eq!(QuadExt::new(f, ExtKind::Unramified).residue_cardinality(), 49);
    }

    #[test]
    fn lambda0_is_non_norm() {
        for p in [3, 5, 7, 11] {
            for kind in ExtKind::all() {
                let k = QuadExt::new(q(p), kind);
                let l = k.lambda0();
                assert!(!is_norm(&q(p).int(l), &k).unwrap());
            }
        }
        assert_eq!(QuadExt::new(q(5), ExtKind::Unramified).lambda0(), 5);
        assert_eq!(QuadExt::new(q(5), ExtKind::RamifiedP).lambda0(), 2);
    }

    #[test]
    fn approximate_arithmetic_tracks_precision() {
        let f = PAdicField::new(5, 4).unwrap();
        let x = f.approx(0, BigInt::from(3), 4).unwrap();
        let y = f.approx(0, BigInt::from(2), 2).unwrap();
        let s = x.add(&y).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.relative_precision(), 1);
        let z = f.approx(0, BigInt::from(-3 + 625), 4).unwrap();
        assert!(matches!(x.add(&z), Err(Error::PrecisionExhausted(_))));
        assert!(f.approx(0, BigInt::from(7), 3).unwrap().residue(4).is_err());
    }

    #[test]
    fn frac_part_values() {
        let f = q(3);
        let x = f.rational(2, 3).unwrap();
        assert_eq!(x.frac_part().unwrap(), Ratio::new(2, 3));
        let y = f.rational(1, 6).unwrap();
        // 1/6 = (1/2)/3 and 1/2 = 2 mod 3
        assert_eq!(y.frac_part().unwrap(), Ratio::new(2, 3));
        assert_eq!(f.int(4).frac_part().unwrap(), Ratio::from_integer(0));
    }
}
