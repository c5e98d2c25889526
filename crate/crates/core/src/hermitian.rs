//! Hermitian and skew-Hermitian K-spaces: discriminants, signs, Witt towers.

use crate::error::{Error, Result};
use crate::padic::{omega_kf, ExtElement, PadicNumber, QuadExt};
use serde::Serialize;

pub type Matrix = Vec<Vec<ExtElement>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Hermitian,
    Skew,
}

/// A (skew-)Hermitian space, either with a Gram matrix or abstract (class only).
#[derive(Clone, Debug)]
pub struct FormSpace {
    kind: FormKind,
    ext: QuadExt,
    dim: usize,
    gram: Option<Matrix>,
    sign: i8,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FormSummary {
    pub kind: FormKind,
    pub dim: usize,
    pub disc_class: i64,
    pub sign: i8,
}

pub fn det(m: &Matrix) -> Result<ExtElement> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Precondition("empty matrix".into()));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc: Option<ExtElement> = None;
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Matrix = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let mut term = m[0][j].mul(&det(&minor)?)?;
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| m[0][0].scale(&m[0][0].a.field().zero()).expect("exact zero")))
}

/// Conjugate transpose.
pub fn dagger(m: &Matrix) -> Matrix {
    let n = m.len();
    let c = if n == 0 { 0 } else { m[0].len() };
    (0..c).map(|j| (0..n).map(|i| m[i][j].conj()).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let k = b.len();
    let c = b[0].len();
    let mut out = Vec::with_capacity(n);
    for row in a.iter().take(n) {
        let mut r = Vec::with_capacity(c);
        for j in 0..c {
            let mut s = row[0].mul(&b[0][j])?;
            for t in 1..k {
                s = s.add(&row[t].mul(&b[t][j])?)?;
            }
            r.push(s);
        }
        out.push(r);
    }
    Ok(out)
}

/// (-1)^{n(n-1)/2}.
fn disc_sign(n: usize) -> i64 {
    if (n * (n.saturating_sub(1)) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl FormSpace {
    pub fn from_gram(kind: FormKind, ext: &QuadExt, gram: Matrix) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("Gram matrix must be square and nonempty".into()));
        }
        let dg = dagger(&gram);
        for i in 0..n {
            for j in 0..n {
                let want = match kind {
                    FormKind::Hermitian => dg[i][j].clone(),
                    FormKind::Skew => dg[i][j].neg(),
                };
                if !gram[i][j].approx_eq(&want) {
                    return Err(Error::Precondition(format!("Gram matrix is not {:?} at ({i},{j})", kind)));
                }
            }
        }
        let mut s = Self { kind, ext: *ext, dim: n, gram: Some(gram), sign: 1 };
        s.sign = s.sign_from_gram()?;
        Ok(s)
    }

    pub fn abstract_space(kind: FormKind, ext: &QuadExt, dim: usize, sign: i8) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Precondition("sign must be +1 or -1".into()));
        }
        Ok(Self { kind, ext: *ext, dim, gram: None, sign })
    }

    /// Diagonal Hermitian form with rational entries in F.
    pub fn hermitian_diag(ext: &QuadExt, entries: &[PadicNumber]) -> Result<Self> {
        let n = entries.len();
        let f = ext.field();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ext.embed(&entries[i]) } else { ext.embed(&f.zero()) }).collect())
            .collect();
        Self::from_gram(FormKind::Hermitian, ext, gram)
    }

    /// The hyperbolic plane of the given kind.
    pub fn hyperbolic(kind: FormKind, ext: &QuadExt) -> Self {
        let z = ExtElement::from_ints(ext, 0, 0);
        let one = ExtElement::from_ints(ext, 1, 0);
        let lower = match kind {
            FormKind::Hermitian => one.clone(),
            FormKind::Skew => one.neg(),
        };
        Self::from_gram(kind, ext, vec![vec![z.clone(), one], vec![lower, z]]).expect("hyperbolic plane")
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> Option<&Matrix> {
        self.gram.as_ref()
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// (-1)^{n(n-1)/2} det(Phi).
    pub fn disc(&self) -> Result<ExtElement> {
        let g = self.gram.as_ref().ok_or_else(|| Error::Precondition("abstract space has no Gram matrix".into()))?;
        let d = det(g)?;
        if d.is_zero() {
            return Err(Error::Precondition("degenerate Gram matrix".into()));
        }
        d.scale(&self.ext.field().int(disc_sign(self.dim)))
    }

    /// The F-element whose norm class is the invariant:
    /// disc for Hermitian, delta^{-m} disc for skew-Hermitian.
    fn normalized_disc(&self) -> Result<PadicNumber> {
        let d = self.disc()?;
        let x = match self.kind {
            FormKind::Hermitian => d,
            FormKind::Skew => d.div(&self.ext.delta().pow(self.dim as i64)?)?,
        };
        if !x.in_base() {
            return Err(Error::Internal("normalized discriminant is not in F".into()));
        }
        Ok(x.a)
    }

    fn sign_from_gram(&self) -> Result<i8> {
        omega_kf(&self.normalized_disc()?, &self.ext)
    }

    /// Canonical representative of the class: 1 (norm) or lambda0.
    pub fn disc_class(&self) -> i64 {
        if self.sign == 1 {
            1
        } else {
            self.ext.lambda0()
        }
    }

    pub fn summary(&self) -> FormSummary {
        FormSummary { kind: self.kind, dim: self.dim, disc_class: self.disc_class(), sign: self.sign }
    }

    /// Orthogonal direct sum.
    pub fn orth_sum(&self, o: &Self) -> Result<Self> {
        if self.kind != o.kind {
            return Err(Error::Precondition("cannot add Hermitian and skew-Hermitian spaces".into()));
        }
        if self.ext != o.ext {
            return Err(Error::FieldMismatch("spaces over different extensions".into()));
        }
        let n = self.dim + o.dim;
        if let (Some(a), Some(b)) = (&self.gram, &o.gram) {
            let z = ExtElement::from_ints(&self.ext, 0, 0);
            let mut g = vec![vec![z; n]; n];
            for i in 0..self.dim {
                for j in 0..self.dim {
                    g[i][j] = a[i][j].clone();
                }
            }
            for i in 0..o.dim {
                for j in 0..o.dim {
                    g[self.dim + i][self.dim + j] = b[i][j].clone();
                }
            }
            return Self::from_gram(self.kind, &self.ext, g);
        }
        let w = omega_kf(&self.ext.field().int(-1), &self.ext)?;
        let cross = if (self.dim * o.dim) % 2 == 1 { w } else { 1 };
        Self::abstract_space(self.kind, &self.ext, n, self.sign * o.sign * cross)
    }

    pub fn add_hyperbolic(&self) -> Result<Self> {
        self.orth_sum(&Self::hyperbolic(self.kind, &self.ext))
    }

    /// The same space with form -<,>.
    pub fn negate_form(&self) -> Result<Self> {
        if let Some(g) = &self.gram {
            let ng = g.iter().map(|r| r.iter().map(|e| e.neg()).collect()).collect();
            return Self::from_gram(self.kind, &self.ext, ng);
        }
        let w = omega_kf(&self.ext.field().int(-1), &self.ext)?;
        let f = if self.dim % 2 == 1 { w } else { 1 };
        Self::abstract_space(self.kind, &self.ext, self.dim, self.sign * f)
    }

    /// Phi -> g Phi g^dagger.
    pub fn change_basis(&self, g: &Matrix) -> Result<Self> {
        let phi = self.gram.as_ref().ok_or_else(|| Error::Precondition("abstract space has no Gram matrix".into()))?;
        let m = matmul(&matmul(g, phi)?, &dagger(g))?;
        Self::from_gram(self.kind, &self.ext, m)
    }

    pub fn is_split(&self) -> Option<bool> {
        if self.dim.is_multiple_of(2) {
            Some(self.sign == 1)
        } else {
            None
        }
    }

    pub fn tower(&self) -> WittTower {
        WittTower { kind: self.kind, odd: self.dim % 2 == 1, sign: self.sign }
    }

    pub fn same_tower(&self, o: &Self) -> Result<bool> {
        if self.kind != o.kind {
            return Err(Error::Precondition("cannot compare Hermitian and skew-Hermitian towers".into()));
        }
        Ok(self.tower() == o.tower())
    }
}

/// anchor + H^k; the anchor is fixed by parity and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WittTower {
    pub kind: FormKind,
    pub odd: bool,
    pub sign: i8,
}

impl WittTower {
    /// Dimension of the anisotropic kernel.
    pub fn anchor_dim(&self) -> usize {
        match (self.odd, self.sign) {
            (true, _) => 1,
            (false, 1) => 0,
            (false, _) => 2,
        }
    }

    /// Label of the tower: W1 contains <1>, W1' contains <lambda0>,
    /// W0' is the split even tower, W0 the one with anisotropic plane.
    pub fn label(&self) -> &'static str {
        match (self.odd, self.sign) {
            (true, 1) => "W1",
            (true, _) => "W1'",
            (false, 1) => "W0'",
            (false, _) => "W0",
        }
    }

    pub fn member(&self, ext: &QuadExt, k: usize) -> Result<FormSpace> {
        let dim = self.anchor_dim() + 2 * k;
        if dim == 0 {
            return Err(Error::Precondition("the zero space has no form".into()));
        }
        FormSpace::abstract_space(self.kind, ext, dim, self.sign)
    }
}

/// <1>, <lambda0>.
pub fn v1(ext: &QuadExt) -> FormSpace {
    FormSpace::hermitian_diag(ext, &[ext.field().one()]).expect("rank one")
}

pub fn v1_prime(ext: &QuadExt) -> FormSpace {
    FormSpace::hermitian_diag(ext, &[ext.field().int(ext.lambda0())]).expect("rank one")
}

fn ints(ext: &QuadExt, rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| ExtElement::from_ints(ext, x, 0)).collect()).collect()
}

/// [[0,-1],[-1,0]], split.
pub fn phi2(ext: &QuadExt) -> FormSpace {
    FormSpace::from_gram(FormKind::Hermitian, ext, ints(ext, &[&[0, -1], &[-1, 0]])).expect("Phi2")
}

/// diag(-1, 1/lambda0), nonsplit.
pub fn phi2_prime(ext: &QuadExt) -> FormSpace {
    let f = ext.field();
    FormSpace::hermitian_diag(ext, &[f.int(-1), f.rational(1, ext.lambda0()).expect("nonzero")]).expect("Phi2'")
}

/// Antidiagonal -1.
pub fn phi3(ext: &QuadExt) -> FormSpace {
    FormSpace::from_gram(FormKind::Hermitian, ext, ints(ext, &[&[0, 0, -1], &[0, -1, 0], &[-1, 0, 0]])).expect("Phi3")
}

/// One-dimensional skew-Hermitian space with form c * delta * x y^c.
pub fn skew_line(ext: &QuadExt, c: i64) -> FormSpace {
    let e = ext.delta().scale(&ext.field().int(c)).expect("exact");
    FormSpace::from_gram(FormKind::Skew, ext, vec![vec![e]]).expect("skew line")
}

/// The 1-dimensional skew-Hermitian space of the requested sign.
pub fn skew_line_with_sign(ext: &QuadExt, sign: i8) -> FormSpace {
    if sign == 1 {
        skew_line(ext, 1)
    } else {
        skew_line(ext, ext.lambda0())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{ExtKind, PAdicField};
    use rand::{Rng, SeedableRng};

    fn k(p: u64, kind: ExtKind) -> QuadExt {
        QuadExt::new(PAdicField::with_default_precision(p).unwrap(), kind)
    }

    #[test]
    fn basic_signs() {
        for kind in ExtKind::all() {
            let e = k(5, kind);
            let h = FormSpace::hyperbolic(FormKind::Hermitian, &e);
            assert_eq!(h.sign(), 1);
            assert!(h.disc().unwrap().approx_eq(&ExtElement::from_ints(&e, 1, 0)));
            assert_eq!(v1(&e).sign(), 1);
            assert_eq!(v1_prime(&e).sign(), -1);
            assert_eq!(skew_line(&e, 1).sign(), 1);
            assert_eq!(skew_line_with_sign(&e, -1).sign(), -1);
            assert_eq!(FormSpace::hyperbolic(FormKind::Skew, &e).sign(), 1);
            assert_eq!(phi2(&e).is_split(), Some(true));
            assert_eq!(phi2_prime(&e).is_split(), Some(false));
            assert!(det(phi3(&e).gram().unwrap()).unwrap().approx_eq(&ExtElement::from_ints(&e, 1, 0)));
        }
    }

    #[test]
    fn negation() {
        let e = k(3, ExtKind::Unramified);
        let w = skew_line(&e, 1);
        assert_eq!(w.negate_form().unwrap().sign(), w.sign());
        let r = k(3, ExtKind::RamifiedP);
        let w = skew_line(&r, 1);
        assert_eq!(w.negate_form().unwrap().sign(), -w.sign());
        let a = FormSpace::abstract_space(FormKind::Skew, &r, 1, 1).unwrap();
        assert_eq!(a.negate_form().unwrap().sign(), -1);
        assert_eq!(a.negate_form().unwrap().negate_form().unwrap().sign(), 1);
    }

    #[test]
    fn towers() {
        let e = k(7, ExtKind::RamifiedUp);
        let h = FormSpace::hyperbolic(FormKind::Hermitian, &e);
        assert!(h.same_tower(&h.add_hyperbolic().unwrap()).unwrap());
        assert!(!v1(&e).same_tower(&v1_prime(&e)).unwrap());
        assert_eq!(phi2_prime(&e).tower().anchor_dim(), 2);
        assert_eq!(phi2_prime(&e).tower().label(), "W0");
        let v3 = v1(&e).add_hyperbolic().unwrap();
        assert_eq!(v3.sign(), 1);
        assert_eq!(v3.dim(), 3);
        let abs = FormSpace::abstract_space(FormKind::Hermitian, &e, 1, -1).unwrap();
        assert_eq!(abs.add_hyperbolic().unwrap().sign(), -1);
        assert!(h.same_tower(&FormSpace::hyperbolic(FormKind::Skew, &e)).is_err());
    }

    #[test]
    fn abstract_sum_matches_gram_sum() {
        for p in [3, 5, 7] {
            for kind in ExtKind::all() {
                let e = k(p, kind);
                for a in [v1(&e), v1_prime(&e), phi2(&e), phi2_prime(&e)] {
                    for b in [v1(&e), v1_prime(&e), phi3(&e)] {
                        let g = a.orth_sum(&b).unwrap();
                        let aa = FormSpace::abstract_space(a.kind(), &e, a.dim(), a.sign()).unwrap();
                        let ab = FormSpace::abstract_space(b.kind(), &e, b.dim(), b.sign()).unwrap();
                        assert_eq!(aa.orth_sum(&ab).unwrap().sign(), g.sign());
                    }
                }
            }
        }
    }

    #[test]
    fn basis_invariance() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for kind in ExtKind::all() {
            let e = k(5, kind);
            for v in [phi2(&e), phi2_prime(&e), phi3(&e)] {
                let n = v.dim();
                for _ in 0..100 {
                    let g: Matrix = (0..n)
                        .map(|_| (0..n).map(|_| ExtElement::from_ints(&e, rng.random_range(-4..5), rng.random_range(-4..5))).collect())
                        .collect();
                    if det(&g).unwrap().is_zero() {
                        continue;
                    }
                    let w = v.change_basis(&g).unwrap();
                    assert_eq!(w.sign(), v.sign());
                }
            }
        }
    }
}
