//! Finite-order characters of F^x and K^x (with a |.|^s slot), characters of
//! the norm-one group K^1, and additive characters.
//!
//! Values are exact: a character value is a turn (a rational in [0, 1),
//! meaning exp(2 pi i t)) times q^e for a rational exponent e.

use crate::arith::{self, upow};
use crate::error::{Error, Result};
use crate::padic::{ExtElement, ExtKind, PAdicField, PadicNumber, QuadExt};
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub type Turn = Ratio<i64>;

pub const MAX_CONDUCTOR: u32 = 3;

/// Reduce a turn to [0, 1).
pub fn frac(t: Turn) -> Turn {
    let f = t.floor();
    t - f
}

pub fn turn_to_complex(t: Turn) -> Complex64 {
    let x = *t.numer() as f64 / *t.denom() as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x)
}

/// Parse "a/b" or "a" into a rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d: i64 = d.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d == 0 {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Ratio::new(n, d))
}

pub fn fmt_ratio(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The field a character lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharField {
    Base(PAdicField),
    Ext(QuadExt),
}

impl CharField {
    pub fn p(&self) -> u64 {
        match self {
            Self::Base(f) => f.p(),
            Self::Ext(k) => k.p(),
        }
    }

    pub fn base(&self) -> PAdicField {
        match self {
            Self::Base(f) => *f,
            Self::Ext(k) => k.field(),
        }
    }

    pub fn ext(&self) -> Option<QuadExt> {
        match self {
            Self::Base(_) => None,
            Self::Ext(k) => Some(*k),
        }
    }

    /// Residue field cardinality.
    pub fn q(&self) -> u64 {
        match self {
            Self::Base(f) => f.p(),
            Self::Ext(k) => k.residue_cardinality(),
        }
    }

    /// d for K, 0 for F.
    fn d(&self) -> i64 {
        match self {
            Self::Base(_) => 0,
            Self::Ext(k) => k.d(),
        }
    }

    fn key(&self) -> (u64, u8) {
        let tag = match self {
            Self::Base(_) => 0,
            Self::Ext(k) => match k.kind() {
                ExtKind::Unramified => 1,
                ExtKind::RamifiedP => 2,
                ExtKind::RamifiedUp => 3,
            },
        };
        (self.p(), tag)
    }

    /// Moduli (mx, my) for O / p^a, elements written x + y sqrt(d).
    pub fn moduli(&self, a: u32) -> (u64, u64) {
        let p = self.p();
        match self {
            Self::Base(_) => (upow(p, a), 1),
            Self::Ext(k) if !k.is_ramified() => (upow(p, a), upow(p, a)),
            Self::Ext(_) => (upow(p, a.div_ceil(2)), upow(p, a / 2)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Base(f) => format!("Q_{}", f.p()),
            Self::Ext(k) => format!("Q_{}(sqrt {})", k.p(), k.d()),
        }
    }
}

/// A residue x + y sqrt(d) of O / p^a.
pub type Residue = (u64, u64);

/// (O / p^a)^x as a direct product of cyclic groups on fixed generators.
#[derive(Debug)]
pub struct UnitGroup {
    d: i64,
    p: u64,
    level: u32,
    mx: u64,
    my: u64,
    gens: Vec<Residue>,
    orders: Vec<u64>,
    strides: Vec<u64>,
    table: Vec<u32>,
}

impl UnitGroup {
    /// Cached group for (field, level).
    pub fn get(field: CharField, level: u32) -> Result<Arc<UnitGroup>> {
        if level > MAX_CONDUCTOR {
            return Err(Error::ConductorTooLarge(level));
        }
        static CACHE: OnceLock<Mutex<HashMap<((u64, u8), u32), Arc<UnitGroup>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (field.key(), level);
        if let Some(g) = cache.lock().expect("cache lock").get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(Self::build(field, level)?);
        cache.lock().expect("cache lock").insert(key, g.clone());
        Ok(g)
    }

    fn build(field: CharField, level: u32) -> Result<Self> {
        let p = field.p();
        let (mx, my) = field.moduli(level);
        let mut g = Self { d: field.d(), p, level, mx, my, gens: vec![], orders: vec![], strides: vec![], table: vec![] };
        let expected = g.expected_order(field);
        if level == 0 {
            g.table = vec![0];
            return Ok(g);
        }
        for c in g.candidate_generators(field) {
            let c = g.reduce(c);
            let n = g.element_order(c);
            if n > 1 {
                g.gens.push(c);
                g.orders.push(n);
            }
        }
        let mut stride = 1u64;
        for &n in &g.orders {
            g.strides.push(stride);
            stride *= n;
        }
        if stride != expected {
            return Err(Error::Internal(format!(
                "generators of {} at level {level} span {stride} elements, expected {expected}",
                field.describe()
            )));
        }
        let size = (mx * my) as usize;
        g.table = vec![u32::MAX; size];
        let mut elems: Vec<Residue> = vec![(1 % mx, 0)];
        let c0 = g.code((1 % mx, 0));
        g.table[c0] = 0;
        for i in 0..g.gens.len() {
            let n = g.orders[i];
            let s = g.strides[i];
            let base_len = elems.len();
            for j in 0..base_len {
                let mut cur = elems[j];
                let c = g.code(cur);
                let idx0 = g.table[c] as u64;
                for k in 1..n {
                    cur = g.mul(cur, g.gens[i]);
                    let code = g.code(cur);
                    if g.table[code] != u32::MAX {
                        return Err(Error::Internal("generators are not independent".into()));
                    }
                    g.table[code] = (idx0 + k * s) as u32;
                    elems.push(cur);
                }
            }
        }
        Ok(g)
    }

    fn expected_order(&self, field: CharField) -> u64 {
        let p = self.p;
        let a = self.level;
        if a == 0 {
            return 1;
        }
        match field {
            CharField::Ext(k) if !k.is_ramified() => (p * p - 1) * upow(p, 2 * (a - 1)),
            _ => (p - 1) * upow(p, a - 1),
        }
    }

    fn candidate_generators(&self, field: CharField) -> Vec<Residue> {
        let p = self.p;
        let a = self.level;
        let g = arith::primitive_root_mod_p2(p);
        match field {
            CharField::Base(_) => vec![(g, 0)],
            CharField::Ext(k) if k.is_ramified() => {
                let teich = self.pow((g % self.mx, 0), upow(p, a));
                vec![teich, (1, 1), (1 + p, 0)]
            }
            CharField::Ext(_) => {
                let q2 = p * p - 1;
                let lvl1 = UnitGroupLite { d: self.d, mx: p, my: p };
                let mut h = (0, 0);
                'search: for y in 1..p {
                    for x in 0..p {
                        if lvl1.order((x, y)) == q2 {
                            h = (x, y);
                            break 'search;
                        }
                    }
                }
                let teich = self.pow(h, upow(p * p, a));
                vec![teich, (1 + p, 0), (1, p)]
            }
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn moduli(&self) -> (u64, u64) {
        (self.mx, self.my)
    }

    pub fn generators(&self) -> &[Residue] {
        &self.gens
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent of the group (lcm of generator orders).
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &n| arith::lcm_u64(acc, n))
    }

    pub fn reduce(&self, r: Residue) -> Residue {
        (r.0 % self.mx, r.1 % self.my)
    }

    pub fn reduce_signed(&self, x: i64, y: i64) -> Residue {
        (x.rem_euclid(self.mx as i64) as u64, y.rem_euclid(self.my as i64) as u64)
    }

    fn code(&self, r: Residue) -> usize {
        (r.0 * self.my + r.1) as usize
    }

    pub fn is_unit(&self, r: Residue) -> bool {
        let r = self.reduce(r);
        self.table[self.code(r)] != u32::MAX
    }

    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        UnitGroupLite { d: self.d, mx: self.mx, my: self.my }.mul(a, b)
    }

    pub fn pow(&self, a: Residue, e: u64) -> Residue {
        UnitGroupLite { d: self.d, mx: self.mx, my: self.my }.pow(a, e)
    }

    fn element_order(&self, a: Residue) -> u64 {
        UnitGroupLite { d: self.d, mx: self.mx, my: self.my }.order(a)
    }

    pub fn conj(&self, a: Residue) -> Residue {
        (a.0, (self.my - a.1 % self.my) % self.my)
    }

    /// Exponent vector of a unit residue on the generators.
    pub fn dlog(&self, r: Residue) -> Result<Vec<u64>> {
        let r = self.reduce(r);
        let idx = self.table[self.code(r)];
        if idx == u32::MAX {
            return Err(Error::Precondition(format!("{r:?} is not a unit residue")));
        }
        let idx = idx as u64;
        Ok(self.orders.iter().zip(&self.strides).map(|(&n, &s)| (idx / s) % n).collect())
    }

    /// All unit residues, in a fixed order.
    pub fn elements(&self) -> Vec<Residue> {
        let mut out = Vec::with_capacity(self.order() as usize);
        for x in 0..self.mx {
            for y in 0..self.my {
                if self.table[self.code((x, y))] != u32::MAX {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Elements of the kernel of reduction to level c (c >= 1).
    pub fn kernel_elements(&self, field: CharField, c: u32) -> Vec<Residue> {
        let (cx, cy) = field.moduli(c);
        let mut out = vec![];
        for i in 0..self.mx / cx {
            for j in 0..self.my / cy {
                out.push(((1 + i * cx) % self.mx, j * cy));
            }
        }
        out
    }
}

/// Residue arithmetic without tables.
#[derive(Clone, Copy)]
struct UnitGroupLite {
    d: i64,
    mx: u64,
    my: u64,
}

impl UnitGroupLite {
    fn mul(&self, a: Residue, b: Residue) -> Residue {
        let mx = self.mx as i128;
        let my = self.my as i128;
        let (x1, y1, x2, y2) = (a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128);
        let x = (x1 * x2 + self.d as i128 * y1 * y2).rem_euclid(mx);
        let y = (x1 * y2 + x2 * y1).rem_euclid(my);
        (x as u64, y as u64)
    }

    fn pow(&self, a: Residue, mut e: u64) -> Residue {
        let mut acc = (1 % self.mx, 0);
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn order(&self, a: Residue) -> u64 {
        let one = (1 % self.mx, 0);
        let mut cur = a;
        let mut n = 1;
        while cur != one {
            cur = self.mul(cur, a);
            n += 1;
            if n > self.mx * self.my {
                return 0;
            }
        }
        n
    }
}

/// A character value: exp(2 pi i turn) * q^abs_exp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharValue {
    pub turn: Turn,
    pub abs_exp: Ratio<i64>,
    pub q: u64,
}

impl CharValue {
    pub fn to_complex(&self) -> Complex64 {
        let e = *self.abs_exp.numer() as f64 / *self.abs_exp.denom() as f64;
        turn_to_complex(self.turn) * (self.q as f64).powf(e)
    }

    pub fn is_one(&self) -> bool {
        self.turn.is_zero() && self.abs_exp.is_zero()
    }
}

/// An element of F or K.
#[derive(Clone, Debug)]
pub enum Elem {
    Base(PadicNumber),
    Ext(ExtElement),
}

/// Split an element into (valuation, unit residue at the given level).
pub fn decompose(field: CharField, x: &Elem, level: u32) -> Result<(i64, Residue)> {
    let (mx, my) = field.moduli(level);
    match (field, x) {
        (CharField::Base(f), Elem::Base(t)) => {
            let v = t.valuation().ok_or(Error::ZeroInput)?;
            let k = level;
            let r = if k == 0 { 0 } else { t.unit_residue_u64(k)? };
            let _ = f;
            Ok((v, (r % mx, 0)))
        }
        (CharField::Ext(k), Elem::Ext(e)) => {
            let v = e.val_k()?;
            let unit = e.div(&k.uniformizer().pow(v)?)?;
            let ex = mx.max(1).trailing_zeros();
            let _ = ex;
            let kx = digits(mx, k.p());
            let ky = digits(my, k.p());
            let x = unit.a.residue(kx)?;
            let y = unit.b.residue(ky)?;
            Ok((v, (x % mx, y % my)))
        }
        _ => Err(Error::FieldMismatch("element and character live on different fields".into())),
    }
}

fn digits(m: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut m = m;
    while m > 1 {
        m /= p;
        k += 1;
    }
    k
}

/// A quasi-character chi = (finite-order character) * |.|^s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultChar {
    field: CharField,
    conductor: u32,
    images: Vec<Turn>,
    z: Turn,
    s: Ratio<i64>,
}

impl MultChar {
    pub fn trivial(field: CharField) -> Self {
        Self { field, conductor: 0, images: vec![], z: Turn::zero(), s: Ratio::zero() }
    }

    /// Unramified character with chi(uniformizer) = e(z) and twist |.|^s.
    pub fn unramified(field: CharField, z: Turn, s: Ratio<i64>) -> Self {
        Self { field, conductor: 0, images: vec![], z: frac(z), s }
    }

    /// Build from images on the generators of (O / p^a)^x. The declared
    /// conductor must be exact.
    pub fn from_images(field: CharField, conductor: u32, images: Vec<Turn>, z: Turn, s: Ratio<i64>) -> Result<Self> {
        let g = UnitGroup::get(field, conductor)?;
        if images.len() != g.generators().len() {
            return Err(Error::InvalidCharacter(format!(
                "expected {} unit images at conductor {conductor}, got {}",
                g.generators().len(),
                images.len()
            )));
        }
        for (t, &n) in images.iter().zip(g.orders()) {
            if !(*t * Ratio::from_integer(n as i64)).is_integer() {
                return Err(Error::InvalidCharacter(format!(
                    "image {} is not an {n}-th root of unity",
                    fmt_ratio(t)
                )));
            }
        }
        let raw = Self { field, conductor, images: images.into_iter().map(frac).collect(), z: frac(z), s };
        let norm = raw.normalized()?;
        if norm.conductor != conductor {
            return Err(Error::InvalidCharacter(format!(
                "declared conductor {conductor} but the character has conductor {}",
                norm.conductor
            )));
        }
        Ok(norm)
    }

    /// Build from a function on unit residues at `level`; the function must
    /// be a homomorphism. The conductor is reduced to the exact value.
    pub fn from_fn(field: CharField, level: u32, f: impl Fn(Residue) -> Result<Turn>, z: Turn, s: Ratio<i64>) -> Result<Self> {
        let g = UnitGroup::get(field, level)?;
        let images = g.generators().iter().map(|&r| f(r).map(frac)).collect::<Result<Vec<_>>>()?;
        Self { field, conductor: level, images, z: frac(z), s }.normalized()
    }

    pub fn field(&self) -> CharField {
        self.field
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn unit_images(&self) -> &[Turn] {
        &self.images
    }

    pub fn uniformizer_value(&self) -> Turn {
        self.z
    }

    pub fn twist(&self) -> Ratio<i64> {
        self.s
    }

    pub fn is_unitary(&self) -> bool {
        self.s.is_zero()
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 0 && self.z.is_zero() && self.s.is_zero()
    }

    pub fn ext(&self) -> Result<QuadExt> {
        self.field.ext().ok_or_else(|| Error::Precondition("character must be defined over K".into()))
    }

    /// Turn of the unit part at a residue of level >= conductor.
    pub fn unit_turn_at(&self, level: u32, r: Residue) -> Result<Turn> {
        if level < self.conductor {
            return Err(Error::Internal("residue level below conductor".into()));
        }
        let g = UnitGroup::get(self.field, self.conductor)?;
        let e = g.dlog(r)?;
        Ok(frac(e.iter().zip(&self.images).fold(Turn::zero(), |acc, (&k, t)| acc + *t * k as i64)))
    }

    /// Turn of the unit part at a unit given by small integers x + y sqrt d.
    pub fn unit_turn_int(&self, x: i64, y: i64) -> Result<Turn> {
        let g = UnitGroup::get(self.field, self.conductor)?;
        self.unit_turn_at(self.conductor, g.reduce_signed(x, y))
    }

    /// Images on the generators of level `level` >= conductor.
    pub fn images_at(&self, level: u32) -> Result<Vec<Turn>> {
        let g = UnitGroup::get(self.field, level)?;
        g.generators().iter().map(|&r| self.unit_turn_at(level, r)).collect()
    }

    pub fn eval(&self, x: &Elem) -> Result<CharValue> {
        let (v, r) = decompose(self.field, x, self.conductor)?;
        let t = self.unit_turn_at(self.conductor, r)?;
        Ok(CharValue {
            turn: frac(t + self.z * v),
            abs_exp: -self.s * v,
            q: self.field.q(),
        })
    }

    pub fn eval_base(&self, x: &PadicNumber) -> Result<CharValue> {
        self.eval(&Elem::Base(x.clone()))
    }

    pub fn eval_ext(&self, x: &ExtElement) -> Result<CharValue> {
        self.eval(&Elem::Ext(x.clone()))
    }

    /// Value at -1.
    pub fn at_minus_one(&self) -> Result<Turn> {
        self.unit_turn_int(-1, 0)
    }

    fn normalized(mut self) -> Result<Self> {
        let a = self.conductor;
        let g = UnitGroup::get(self.field, a)?;
        let mut c = a;
        for cand in 0..a {
            if cand == 0 {
                if self.images.iter().all(|t| t.is_zero()) {
                    c = 0;
                    break;
                }
                continue;
            }
            let trivial = g
                .kernel_elements(self.field, cand)
                .into_iter()
                .map(|r| self.unit_turn_at(a, r))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(|t| t.is_zero());
            if trivial {
                c = cand;
                break;
            }
        }
        if c < a {
            let gc = UnitGroup::get(self.field, c)?;
            let imgs = gc
                .generators()
                .iter()
                .map(|&r| self.unit_turn_at(a, g.reduce(r)))
                .collect::<Result<Vec<_>>>()?;
            self.images = imgs;
            self.conductor = c;
        }
        Ok(self)
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch(format!(
                "characters on {} and {}",
                self.field.describe(),
                o.field.describe()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let a = self.conductor.max(o.conductor);
        let x = self.images_at(a)?;
        let y = o.images_at(a)?;
        Self {
            field: self.field,
            conductor: a,
            images: x.iter().zip(&y).map(|(s, t)| frac(s + t)).collect(),
            z: frac(self.z + o.z),
            s: self.s + o.s,
        }
        .normalized()
    }

    pub fn inv(&self) -> Self {
        Self {
            field: self.field,
            conductor: self.conductor,
            images: self.images.iter().map(|t| frac(-t)).collect(),
            z: frac(-self.z),
            s: -self.s,
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inv())
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        Self {
            field: self.field,
            conductor: self.conductor,
            images: self.images.iter().map(|t| frac(t * k)).collect(),
            z: frac(self.z * k),
            s: self.s * k,
        }
        .normalized()
    }

    /// Multiply by |.|^s.
    pub fn with_twist(&self, s: Ratio<i64>) -> Self {
        let mut c = self.clone();
        c.s += s;
        c
    }

    pub fn unitary_part(&self) -> Self {
        let mut c = self.clone();
        c.s = Ratio::zero();
        c
    }

    /// Multiplicative order of the unitary part (None if infinite).
    pub fn order(&self) -> Option<u64> {
        let mut n: u64 = 1;
        for t in self.images.iter().chain(std::iter::once(&self.z)) {
            let den = *t.denom();
            if den <= 0 {
                return None;
            }
            n = arith::lcm_u64(n, den as u64);
        }
        Some(n)
    }

    /// chi^c(x) = chi(x^c).
    pub fn galois_twist(&self) -> Result<Self> {
        let k = self.ext()?;
        let a = self.conductor;
        let g = UnitGroup::get(self.field, a)?;
        let images = g
            .generators()
            .iter()
            .map(|&r| self.unit_turn_at(a, g.conj(r)))
            .collect::<Result<Vec<_>>>()?;
        let z = if k.is_ramified() { frac(self.z + self.at_minus_one()?) } else { self.z };
        Ok(Self { field: self.field, conductor: a, images, z, s: self.s })
    }

    /// mu o N_{K/F} for a character mu of F^x.
    pub fn compose_norm(&self, k: &QuadExt) -> Result<Self> {
        let f = match self.field {
            CharField::Base(f) => f,
            _ => return Err(Error::Precondition("compose_norm needs a character of F^x".into())),
        };
        if f.p() != k.p() {
            return Err(Error::FieldMismatch("different residue characteristic".into()));
        }
        let kf = CharField::Ext(*k);
        let am = self.conductor;
        let level = if !k.is_ramified() || am == 0 { am } else { 2 * am - 1 };
        if level > MAX_CONDUCTOR {
            return Err(Error::ConductorTooLarge(level));
        }
        let gf = UnitGroup::get(self.field, am)?;
        let d = k.d();
        let z = if k.is_ramified() {
            let t = self.unit_turn_at(am, gf.reduce_signed(-k.d_unit(), 0))?;
            frac(self.z + t)
        } else {
            frac(self.z * 2)
        };
        Self::from_fn(
            kf,
            level,
            |(x, y)| {
                let (x, y) = (x as i128, y as i128);
                let n = x * x - d as i128 * y * y;
                let m = gf.moduli().0 as i128;
                self.unit_turn_at(am, (n.rem_euclid(m) as u64, 0))
            },
            z,
            self.s,
        )
    }

    /// Restriction of a character of K^x to F^x.
    pub fn restrict_to_base(&self) -> Result<Self> {
        let k = self.ext()?;
        let f = k.field();
        let a = self.conductor;
        let af = if k.is_ramified() { a.div_ceil(2) } else { a };
        let z = if k.is_ramified() {
            // p = sqrt(d)^2 / d_unit
            frac(self.z * 2 - self.unit_turn_int(k.d_unit(), 0)?)
        } else {
            self.z
        };
        let gk = UnitGroup::get(self.field, a)?;
        Self::from_fn(
            CharField::Base(f),
            af,
            |(x, _)| self.unit_turn_at(a, gk.reduce((x, 0))),
            z,
            self.s * 2,
        )
    }

    /// chi|_{F^x} = omega_{K/F}.
    pub fn is_conjugate_symplectic(&self) -> Result<bool> {
        let k = self.ext()?;
        if !self.is_unitary() {
            return Err(Error::Precondition("conjugate-symplectic test needs a unitary character".into()));
        }
        Ok(self.restrict_to_base()? == omega_char(&k)?)
    }

    pub fn chi_squared_trivial(&self) -> Result<bool> {
        Ok(self.pow(2)?.is_trivial())
    }

    pub fn is_galois_invariant(&self) -> Result<bool> {
        Ok(self.galois_twist()? == *self)
    }

    /// mu with mu o N = chi; the canonical one of the two solutions.
    pub fn descend_via_norm(&self) -> Result<Self> {
        let k = self.ext()?;
        if !self.is_galois_invariant()? {
            return Err(Error::Precondition("character is not Galois-invariant; it does not factor through the norm".into()));
        }
        let fld = CharField::Base(k.field());
        let level = if k.is_ramified() { ((self.conductor + 2) / 2).max(1) } else { self.conductor };
        if level > MAX_CONDUCTOR {
            return Err(Error::ConductorTooLarge(level));
        }
        let g = UnitGroup::get(fld, level)?;
        let n = g.orders().first().copied().unwrap_or(1) as i64;
        let unit_target = self.unitary_part().with_z(Turn::zero());
        let mut sols = vec![];
        for j in 0..n {
            let imgs = if level == 0 { vec![] } else { vec![Ratio::new(j, n)] };
            let cand = Self { field: fld, conductor: level, images: imgs, z: Turn::zero(), s: Ratio::zero() }.normalized()?;
            let lifted = cand.compose_norm(&k)?;
            if lifted.with_z(Turn::zero()) != unit_target {
                continue;
            }
            let zs = if k.is_ramified() {
                vec![frac(self.z - cand.unit_turn_int(-k.d_unit(), 0)?)]
            } else {
                let h = self.z / 2;
                vec![frac(h), frac(h + Ratio::new(1, 2))]
            };
            for z in zs {
                let mut mu = cand.clone();
                mu.z = z;
                mu.s = self.s;
                if mu.compose_norm(&k)? != *self {
                    return Err(Error::Internal("norm descent failed its round trip".into()));
                }
                sols.push(mu);
            }
        }
        if sols.len() != 2 {
            return Err(Error::Internal(format!("expected two norm descents, found {}", sols.len())));
        }
        let (m0, m1) = (&sols[0], &sols[1]);
        let g_turn = |m: &Self| -> Result<Turn> {
            let g = arith::primitive_root_mod_p2(k.p()) as i64;
            m.unit_turn_int(g, 0)
        };
        let half = Ratio::new(1, 2);
        let (a0, a1) = (g_turn(m0)?, g_turn(m1)?);
        let pick0 = if a0 != a1 { a0 < half } else { m0.z < half };
        Ok(if pick0 { m0.clone() } else { m1.clone() })
    }

    fn with_z(&self, z: Turn) -> Self {
        let mut c = self.clone();
        c.z = frac(z);
        c
    }

    pub fn data(&self) -> CharData {
        CharData {
            field: self.field.describe(),
            conductor: self.conductor,
            unit_images: self.images.iter().map(fmt_ratio).collect(),
            uniformizer_value: fmt_ratio(&self.z),
            twist_s: fmt_ratio(&self.s),
        }
    }
}

impl fmt::Display for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images.iter().map(fmt_ratio).collect();
        write!(
            f,
            "chi[{}; a={}; units=[{}]; z={}; s={}]",
            self.field.describe(),
            self.conductor,
            imgs.join(","),
            fmt_ratio(&self.z),
            fmt_ratio(&self.s)
        )
    }
}

impl Serialize for MultChar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.data().serialize(s)
    }
}

/// Serializable character data (turns as exact fraction strings).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CharData {
    pub field: String,
    pub conductor: u32,
    pub unit_images: Vec<String>,
    pub uniformizer_value: String,
    pub twist_s: String,
}

/// omega_{K/F} as a character of F^x.
pub fn omega_char(k: &QuadExt) -> Result<MultChar> {
    let fld = CharField::Base(k.field());
    if !k.is_ramified() {
        return Ok(MultChar::unramified(fld, Ratio::new(1, 2), Ratio::zero()));
    }
    let wp = arith::legendre(-k.d_unit(), k.p());
    let z = if wp == 1 { Turn::zero() } else { Ratio::new(1, 2) };
    MultChar::from_images(fld, 1, vec![Ratio::new(1, 2)], z, Ratio::zero())
}

/// The quadratic residue character of F^x (conductor 1) with chi(p) = e(z).
pub fn legendre_char(f: PAdicField, z: Turn) -> Result<MultChar> {
    MultChar::from_images(CharField::Base(f), 1, vec![Ratio::new(1, 2)], z, Ratio::zero())
}

/// All unitary characters of a field with conductor <= 1 and given z.
fn level_one_chars(field: CharField, z: Turn) -> Result<Vec<MultChar>> {
    let g = UnitGroup::get(field, 1)?;
    let n = g.orders()[0] as i64;
    (0..n)
        .map(|j| {
            MultChar { field, conductor: 1, images: vec![Ratio::new(j, n)], z, s: Ratio::zero() }.normalized()
        })
        .collect()
}

/// Conjugate-symplectic characters of K^x of conductor <= 1.
pub fn conjugate_symplectic_chars(k: &QuadExt) -> Result<Vec<MultChar>> {
    let field = CharField::Ext(*k);
    let mut out = vec![];
    let zs: Vec<Turn> = if k.is_ramified() {
        let g = UnitGroup::get(field, 1)?;
        let n = g.orders()[0] as i64;
        (0..2 * n).map(|j| Ratio::new(j, 2 * n)).collect()
    } else {
        vec![Ratio::new(1, 2)]
    };
    for z in zs {
        for c in level_one_chars(field, z)? {
            if c.is_conjugate_symplectic()? && !out.contains(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// A character of K^1, stored as its pullback x -> mu(x / x^c) to K^x.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct K1Char {
    tilde: MultChar,
}

impl K1Char {
    pub fn trivial(k: &QuadExt) -> Self {
        Self { tilde: MultChar::trivial(CharField::Ext(*k)) }
    }

    /// Wrap a character of K^x trivial on F^x.
    pub fn from_tilde(tilde: MultChar) -> Result<Self> {
        tilde.ext()?;
        if !tilde.restrict_to_base()?.is_trivial() {
            return Err(Error::InvalidCharacter("pullback of a K^1 character must be trivial on F^x".into()));
        }
        Ok(Self { tilde })
    }

    /// chi restricted to K^1.
    pub fn restriction_of(chi: &MultChar) -> Result<Self> {
        let t = chi.unitary_part().div(&chi.unitary_part().galois_twist()?)?;
        Self::from_tilde(t)
    }

    pub fn tilde(&self) -> &MultChar {
        &self.tilde
    }

    pub fn ext(&self) -> QuadExt {
        self.tilde.ext().expect("defined over K")
    }

    /// mu(x / x^c).
    pub fn eval_pullback(&self, x: &ExtElement) -> Result<CharValue> {
        self.tilde.eval_ext(x)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Self { tilde: self.tilde.mul(&o.tilde)? })
    }

    pub fn inv(&self) -> Self {
        Self { tilde: self.tilde.inv() }
    }

    pub fn is_trivial(&self) -> bool {
        self.tilde.is_trivial()
    }

    pub fn conductor(&self) -> u32 {
        self.tilde.conductor()
    }
}

impl fmt::Display for K1Char {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K1~{}", self.tilde)
    }
}

impl Serialize for K1Char {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wrapped<'a> {
            pullback: &'a MultChar,
        }
        Wrapped { pullback: &self.tilde }.serialize(s)
    }
}

/// Characters of K^1 whose pullback has conductor <= 1.
pub fn k1_chars(k: &QuadExt) -> Result<Vec<K1Char>> {
    let field = CharField::Ext(*k);
    let mut out = vec![];
    for z in [Turn::zero(), Ratio::new(1, 2)] {
        for c in level_one_chars(field, z)? {
            if c.restrict_to_base()?.is_trivial() {
                let kc = K1Char::from_tilde(c)?;
                if !out.contains(&kc) {
                    out.push(kc);
                }
            }
        }
    }
    Ok(out)
}

/// x -> e({Tr(beta x)}_p), on F (Tr = id) or on K.
#[derive(Clone, Debug)]
pub struct AddChar {
    field: CharField,
    beta: Elem,
}

impl AddChar {
    /// psi(x) = e({x / p^n}) on F; trivial on p^n O_F, not on p^{n-1} O_F.
    pub fn standard(f: PAdicField, level: i64) -> Self {
        let beta = f.int(f.p() as i64).pow(-level).expect("nonzero");
        Self { field: CharField::Base(f), beta: Elem::Base(beta) }
    }

    pub fn new(field: CharField, beta: Elem) -> Result<Self> {
        let zero = match &beta {
            Elem::Base(b) => b.is_zero(),
            Elem::Ext(b) => b.is_zero(),
        };
        if zero {
            return Err(Error::ZeroInput);
        }
        match (field, &beta) {
            (CharField::Base(_), Elem::Base(_)) | (CharField::Ext(_), Elem::Ext(_)) => Ok(Self { field, beta }),
            _ => Err(Error::FieldMismatch("additive character scalar on the wrong field".into())),
        }
    }

    pub fn field(&self) -> CharField {
        self.field
    }

    pub fn beta(&self) -> &Elem {
        &self.beta
    }

    /// Largest-ideal level: psi trivial on p^level, not on p^{level-1}.
    pub fn level(&self) -> i64 {
        match (&self.field, &self.beta) {
            (CharField::Base(_), Elem::Base(b)) => -b.valuation().expect("nonzero"),
            (CharField::Ext(k), Elem::Ext(b)) => -b.val_k().expect("nonzero") - (k.e() as i64 - 1),
            _ => unreachable!(),
        }
    }

    /// Value as a turn.
    pub fn eval(&self, x: &Elem) -> Result<Turn> {
        let t = match (&self.beta, x) {
            (Elem::Base(b), Elem::Base(x)) => b.mul(x)?,
            (Elem::Ext(b), Elem::Ext(x)) => b.mul(x)?.trace()?,
            _ => return Err(Error::FieldMismatch("additive character argument on the wrong field".into())),
        };
        t.frac_part()
    }

    /// psi_a(x) = psi(a x).
    pub fn twist(&self, a: &Elem) -> Result<Self> {
        let beta = match (&self.beta, a) {
            (Elem::Base(b), Elem::Base(a)) => Elem::Base(b.mul(a)?),
            (Elem::Ext(b), Elem::Ext(a)) => Elem::Ext(b.mul(a)?),
            _ => return Err(Error::FieldMismatch("twist on the wrong field".into())),
        };
        Self::new(self.field, beta)
    }

    /// The complex conjugate character x -> psi(-x).
    pub fn conj(&self) -> Self {
        let beta = match &self.beta {
            Elem::Base(b) => Elem::Base(b.neg()),
            Elem::Ext(b) => Elem::Ext(b.neg()),
        };
        Self { field: self.field, beta }
    }

    /// x -> psi(Tr_{K/F}(-delta x)).
    pub fn compose_trace(&self, k: &QuadExt, delta: &ExtElement) -> Result<Self> {
        let b = match &self.beta {
            Elem::Base(b) => b,
            Elem::Ext(_) => return Err(Error::Precondition("compose_trace needs a character of F".into())),
        };
        if delta.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !delta.trace()?.is_zero() {
            return Err(Error::Precondition("delta must have trace zero".into()));
        }
        let beta = delta.neg().scale(b)?;
        Self::new(CharField::Ext(*k), Elem::Ext(beta))
    }
}

/// A random nonzero element with valuation in [-2, 2], exact.
pub fn random_elem<R: Rng>(field: CharField, rng: &mut R) -> Elem {
    let p = field.p() as i64;
    let m = p * p * p * p;
    loop {
        let v: i64 = rng.random_range(-2..=2);
        match field {
            CharField::Base(f) => {
                let x: i64 = rng.random_range(1..m);
                if x % p == 0 {
                    continue;
                }
                let sgn = if rng.random_bool(0.5) { 1 } else { -1 };
                let t = f.int(sgn * x).mul(&f.int(p).pow(v).expect("p")).expect("exact");
                return Elem::Base(t);
            }
            CharField::Ext(k) => {
                let x: i64 = rng.random_range(-m..m);
                let y: i64 = rng.random_range(-m..m);
                let e = ExtElement::from_ints(&k, x, y);
                if e.is_zero() {
                    continue;
                }
                return Elem::Ext(e.mul(&k.uniformizer().pow(v).expect("nonzero")).expect("exact"));
            }
        }
    }
}

pub fn elem_mul(a: &Elem, b: &Elem) -> Result<Elem> {
    match (a, b) {
        (Elem::Base(a), Elem::Base(b)) => Ok(Elem::Base(a.mul(b)?)),
        (Elem::Ext(a), Elem::Ext(b)) => Ok(Elem::Ext(a.mul(b)?)),
        _ => Err(Error::FieldMismatch("mixed elements".into())),
    }
}

/// Canonical generators of (O/p^3)^x, printed for reports.
pub fn generator_description(field: CharField, level: u32) -> Result<Vec<String>> {
    let g = UnitGroup::get(field, level)?;
    Ok(g.generators()
        .iter()
        .zip(g.orders())
        .map(|(&(x, y), n)| match field {
            CharField::Base(_) => format!("{x} (order {n})"),
            CharField::Ext(k) => format!("{x}+{y}*sqrt({}) (order {n})", k.d()),
        })
        .collect())
}

pub fn value_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

pub fn turn_f64(t: Turn) -> f64 {
    t.to_f64().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn f(p: u64) -> PAdicField {
        PAdicField::with_default_precision(p).unwrap()
    }

    fn kx(p: u64, kind: ExtKind) -> QuadExt {
        QuadExt::new(f(p), kind)
    }

    #[test]
    fn unit_group_orders() {
        for p in [3, 5, 7] {
            for a in 0..=3 {
                let g = UnitGroup::get(CharField::Base(f(p)), a).unwrap();
                assert_eq!(g.order(), if a == 0 { 1 } else { (p - 1) * upow(p, a - 1) });
                for kind in ExtKind::all() {
                    let k = kx(p, kind);
                    let g = UnitGroup::get(CharField::Ext(k), a).unwrap();
                    let want = match (a, k.is_ramified()) {
                        (0, _) => 1,
                        (_, false) => (p * p - 1) * upow(p, 2 * (a - 1)),
                        (_, true) => (p - 1) * upow(p, a - 1),
                    };
                    assert_eq!(g.order(), want, "p={p} {kind:?} a={a}");
                    assert_eq!(g.elements().len() as u64, want);
                }
            }
        }
    }

    #[test]
    fn omega_matches_hilbert() {
        let k = kx(5, ExtKind::Unramified);
        let w = omega_char(&k).unwrap();
        let v = w.eval_base(&f(5).int(5)).unwrap();
        assert_eq!(v.turn, Ratio::new(1, 2));
        for kind in ExtKind::all() {
            for p in [3, 5, 7] {
                let k = kx(p, kind);
                let w = omega_char(&k).unwrap();
                for t in [2i64, 3, 5, 6, 7, 10, 14, 15, 21, -1, -3, -5] {
                    let x = f(p).int(t);
                    let h = crate::padic::omega_kf(&x, &k).unwrap();
                    let turn = w.eval_base(&x).unwrap().turn;
                    assert_eq!(turn.is_zero(), h == 1, "p={p} {kind:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn legendre_at_two_mod_three() {
        let chi = legendre_char(f(3), Turn::zero()).unwrap();
        assert_eq!(chi.eval_base(&f(3).int(2)).unwrap().turn, Ratio::new(1, 2));
        assert_eq!(chi.conductor(), 1);
    }

    #[test]
    fn conductor_is_exact() {
        let fld = CharField::Base(f(5));
        assert!(MultChar::from_images(fld, 2, vec![Ratio::new(1, 4)], Turn::zero(), Ratio::zero()).is_err());
        let c = MultChar::from_images(fld, 2, vec![Ratio::new(1, 5)], Turn::zero(), Ratio::zero()).unwrap();
        assert_eq!(c.conductor(), 2);
        assert_eq!(c.pow(5).unwrap().conductor(), 0);
    }

    #[test]
    fn frobenius_twist_on_residue_field() {
        let k = kx(5, ExtKind::Unramified);
        let chi = MultChar::from_images(CharField::Ext(k), 1, vec![Ratio::new(1, 24)], Turn::zero(), Ratio::zero()).unwrap();
        let c = chi.galois_twist().unwrap();
        assert_ne!(c, chi);
        assert_eq!(c.unit_images()[0], Ratio::new(5, 24));
        assert_eq!(c.galois_twist().unwrap(), chi);
    }

    #[test]
    fn conjugate_symplectic_examples() {
        let k = kx(5, ExtKind::Unramified);
        let fld = CharField::Ext(k);
        assert!(!MultChar::trivial(fld).is_conjugate_symplectic().unwrap());
        let wn = omega_char(&k).unwrap().compose_norm(&k).unwrap();
        assert!(wn.is_trivial());
        assert!(!wn.is_conjugate_symplectic().unwrap());
        let g = MultChar::from_images(fld, 1, vec![Ratio::new(1, 6)], Ratio::new(1, 2), Ratio::zero()).unwrap();
        assert!(g.is_conjugate_symplectic().unwrap());
        // an order-8 unit part restricts to a character of order 4 on F_5^x
        let o8 = MultChar::from_images(fld, 1, vec![Ratio::new(1, 8)], Ratio::new(1, 2), Ratio::zero()).unwrap();
        assert!(!o8.is_conjugate_symplectic().unwrap());
        assert!(!o8.chi_squared_trivial().unwrap());
        assert!(!o8.is_galois_invariant().unwrap());
    }

    #[test]
    fn conjugate_symplectic_counts() {
        for p in [3u64, 5, 7] {
            let ku = kx(p, ExtKind::Unramified);
            assert_eq!(conjugate_symplectic_chars(&ku).unwrap().len() as u64, p + 1);
            for kind in [ExtKind::RamifiedP, ExtKind::RamifiedUp] {
                let k = kx(p, kind);
                let cs = conjugate_symplectic_chars(&k).unwrap();
                assert_eq!(cs.len(), 2);
                for c in &cs {
                    let cc = c.mul(&c.galois_twist().unwrap()).unwrap();
                    assert!(cc.is_trivial());
                }
            }
        }
    }

    #[test]
    fn k1_counts() {
        for p in [3u64, 5, 7] {
            assert_eq!(k1_chars(&kx(p, ExtKind::Unramified)).unwrap().len() as u64, p + 1);
            assert_eq!(k1_chars(&kx(p, ExtKind::RamifiedP)).unwrap().len(), 2);
        }
    }

    #[test]
    fn restriction_to_k1_identity() {
        for kind in ExtKind::all() {
            let k = kx(5, kind);
            for g in conjugate_symplectic_chars(&k).unwrap() {
                let mu = K1Char::restriction_of(&g.inv()).unwrap();
                let lhs = g.div(mu.tilde()).unwrap();
                assert_eq!(lhs, g.pow(3).unwrap());
                let fx = f(5).int(7);
                assert!(mu.tilde().eval_ext(&k.embed(&fx)).unwrap().is_one());
            }
        }
    }

    #[test]
    fn descent_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for p in [3u64, 5, 7] {
            for kind in ExtKind::all() {
                let k = kx(p, kind);
                let fld = CharField::Base(f(p));
                for j in 0..(p - 1) as i64 {
                    for z in [Turn::zero(), Ratio::new(1, 3)] {
                        let eta = MultChar::from_fn(fld, 1, |r| Ok(Ratio::new(j, (p - 1) as i64) * UnitGroup::get(fld, 1)?.dlog(r)?[0] as i64), z, Ratio::zero()).unwrap();
                        let chi = eta.compose_norm(&k).unwrap();
                        let mu = chi.descend_via_norm().unwrap();
                        assert_eq!(mu.compose_norm(&k).unwrap(), chi);
                        assert!(mu == eta || mu == eta.mul(&omega_char(&k).unwrap()).unwrap());
                        for _ in 0..10 {
                            let x = random_elem(CharField::Ext(k), &mut rng);
                            let Elem::Ext(xe) = &x else { unreachable!() };
                            let a = chi.eval(&x).unwrap();
                            let b = mu.eval_base(&xe.norm().unwrap()).unwrap();
                            assert_eq!(a.turn, b.turn);
                        }
                    }
                }
            }
        }
        let k = kx(5, ExtKind::Unramified);
        assert_eq!(MultChar::trivial(CharField::Ext(k)).descend_via_norm().unwrap(), MultChar::trivial(CharField::Base(f(5))));
    }

    #[test]
    fn multiplicativity_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let k = kx(5, ExtKind::RamifiedUp);
        let fld = CharField::Ext(k);
        let chi = MultChar::from_images(fld, 3, vec![Ratio::new(1, 4), Ratio::new(2, 5), Ratio::new(1, 5)], Ratio::new(1, 7), Ratio::new(1, 2)).unwrap();
        for _ in 0..100 {
            let x = random_elem(fld, &mut rng);
            let y = random_elem(fld, &mut rng);
            let xy = elem_mul(&x, &y).unwrap();
            let (a, b, c) = (chi.eval(&x).unwrap(), chi.eval(&y).unwrap(), chi.eval(&xy).unwrap());
            assert_eq!(frac(a.turn + b.turn), c.turn);
            assert_eq!(a.abs_exp + b.abs_exp, c.abs_exp);
        }
    }

    #[test]
    fn additive_levels() {
        let f5 = f(5);
        let psi = AddChar::standard(f5, 0);
        assert_eq!(psi.level(), 0);
        assert_eq!(AddChar::standard(f5, 2).level(), 2);
        let ku = kx(5, ExtKind::Unramified);
        let pk = psi.compose_trace(&ku, &ku.delta()).unwrap();
        assert_eq!(pk.level(), 0);
        let x = Elem::Ext(ku.embed(&f5.rational(3, 25).unwrap()));
        assert!(pk.eval(&x).unwrap().is_zero());
        let kr = kx(5, ExtKind::RamifiedP);
        let pr = psi.compose_trace(&kr, &kr.delta()).unwrap();
        assert_eq!(pr.level(), -2);
        let a = f5.int(3);
        let tw = psi.twist(&Elem::Base(a.clone())).unwrap();
        let y = f5.rational(1, 5).unwrap();
        assert_eq!(tw.eval(&Elem::Base(y.clone())).unwrap(), psi.eval(&Elem::Base(a.mul(&y).unwrap())).unwrap());
    }
}
