//! Theta correspondence data for unitary dual pairs: the U1 x U1 dichotomy,
//! the U1 x U3 lift shape, first occurrence and the split-place GL3 lift.

use crate::charlib::{AddChar, K1Char, MultChar};
use crate::epsilon::theta_sign;
use crate::error::{Error, Result};
use crate::hermitian::{FormKind, FormSpace};
use crate::padic::ExtElement;
use num_rational::Ratio;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "shape")]
pub enum ThetaShape {
    Supercuspidal,
    /// Quotient of the principal series induced from (gamma |.|_K^{1/2}, mu').
    QuotientOfPrincipalSeries { inducing: MultChar, k1_part: K1Char },
    /// Langlands quotient of GL3 principal series, exponents descending.
    LanglandsQuotientGL3 { triple: Vec<MultChar> },
    OneDimensional { character: MultChar },
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub nonzero: bool,
    #[serde(flatten)]
    pub shape: ThetaShape,
    pub first_occurrence: BTreeMap<String, u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

/// Data shared by every theta computation at a nonsplit place.
#[derive(Clone, Debug)]
pub struct ThetaData {
    pub gamma: MultChar,
    pub psi: AddChar,
    pub delta: ExtElement,
}

impl ThetaData {
    pub fn new(gamma: MultChar, psi: AddChar, delta: ExtElement) -> Result<Self> {
        gamma.ext()?;
        if !gamma.is_conjugate_symplectic()? {
            return Err(Error::Precondition("gamma must be conjugate-symplectic".into()));
        }
        Ok(Self { gamma, psi, delta })
    }

    /// Standard data: psi of level 0 and delta = sqrt(d).
    pub fn standard(gamma: MultChar) -> Result<Self> {
        let k = gamma.ext()?;
        Self::new(gamma, AddChar::standard(k.field(), 0), k.delta())
    }

    pub fn sign(&self, mu: &K1Char) -> Result<i8> {
        theta_sign(&self.gamma, mu, &self.psi, &self.delta)
    }
}

fn check_line(v: &FormSpace, kind: FormKind, what: &str) -> Result<()> {
    if v.dim() != 1 || v.kind() != kind {
        return Err(Error::Precondition(format!("{what} must be a 1-dimensional {kind:?} space")));
    }
    Ok(())
}

/// eps(V1) eps(W) == eps_K(1/2, gamma mu~^-1, psi(Tr(-delta .))).
pub fn u1_dichotomy(mu: &K1Char, v1: &FormSpace, w: &FormSpace, data: &ThetaData) -> Result<bool> {
    check_line(v1, FormKind::Hermitian, "V1")?;
    check_line(w, FormKind::Skew, "W")?;
    Ok(v1.sign() * w.sign() == data.sign(mu)?)
}

/// First occurrence indices in the two towers of the given parity.
pub fn first_occurrence(mu: &K1Char, parity: Parity, w: &FormSpace, data: &ThetaData) -> Result<BTreeMap<String, u32>> {
    check_line(w, FormKind::Skew, "W")?;
    let k = *w.ext();
    let mut out = BTreeMap::new();
    match parity {
        Parity::Odd => {
            let one = FormSpace::abstract_space(FormKind::Hermitian, &k, 1, 1)?;
            let pass = u1_dichotomy(mu, &one, w, data)?;
            out.insert("W1".to_string(), if pass { 1 } else { 3 });
            out.insert("W1'".to_string(), if pass { 3 } else { 1 });
        }
        Parity::Even => {
            let n = if *mu.tilde() == data.gamma.pow(2)? { 0 } else { 2 };
            out.insert("W0'".to_string(), n);
            out.insert("W0".to_string(), 4 - n);
        }
    }
    Ok(out)
}

/// Theta lift of mu from U(W) to U(V), dim V = 3.
pub fn u3_lift(mu: &K1Char, v: &FormSpace, w: &FormSpace, data: &ThetaData) -> Result<ThetaReport> {
    if v.dim() != 3 || v.kind() != FormKind::Hermitian {
        return Err(Error::Precondition("V must be a 3-dimensional Hermitian space".into()));
    }
    check_line(w, FormKind::Skew, "W")?;
    let k = *v.ext();
    let shifted = mu.mul(&K1Char::restriction_of(&data.gamma.inv())?)?;
    let v1 = FormSpace::abstract_space(FormKind::Hermitian, &k, 1, v.sign())?;
    let pass = u1_dichotomy(&shifted, &v1, w, data)?;
    let shape = if pass {
        ThetaShape::QuotientOfPrincipalSeries {
            inducing: data.gamma.with_twist(Ratio::new(1, 2)),
            k1_part: shifted.clone(),
        }
    } else {
        ThetaShape::Supercuspidal
    };
    Ok(ThetaReport { nonzero: true, shape, first_occurrence: first_occurrence(&shifted, Parity::Odd, w, data)? })
}

/// Split-place lift: the Langlands quotient of (gamma|.|^{1/2}, mu gamma^-2, gamma|.|^{-1/2}).
pub fn gl_split_lift(mu: &MultChar, gamma: &MultChar) -> Result<ThetaReport> {
    if !mu.is_unitary() {
        return Err(Error::Precondition("mu must be unitary".into()));
    }
    if mu.ext().is_ok() || gamma.ext().is_ok() {
        return Err(Error::Precondition("split-place inputs are characters of F^x".into()));
    }
    let mut triple = vec![
        gamma.with_twist(Ratio::new(1, 2)),
        mu.mul(&gamma.pow(-2)?)?,
        gamma.with_twist(Ratio::new(-1, 2)),
    ];
    triple.sort_by(|a, b| b.twist().cmp(&a.twist()));
    Ok(ThetaReport { nonzero: true, shape: ThetaShape::LanglandsQuotientGL3 { triple }, first_occurrence: BTreeMap::new() })
}
