//! Local epsilon factors at s = 1/2 by Gauss sums.
//!
//! Convention (Tate, self-dual measure): for psi trivial on p^l and not on
//! p^(l-1), and chi of conductor a,
//!   eps(1/2, chi, psi) = q^(-a/2) * sum_{x in (O/p^a)^x} chi^-1(x w^(l-a)) psi(x w^(l-a)).
//! The a = 0 term reduces to chi(w)^(-l) up to the |.|^s scale.

use crate::charlib::{frac, fmt_ratio, AddChar, CharData, CharField, Elem, K1Char, MultChar, Turn, UnitGroup};
use crate::error::{Error, Result};
use crate::padic::ExtElement;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

pub const SIGN_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonValue {
    pub value_re: f64,
    pub value_im: f64,
    pub conductor: u32,
    pub level: i64,
    pub chi: CharData,
}

impl EpsilonValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }

    /// +1 or -1 if within tolerance.
    pub fn sign(&self) -> Option<i8> {
        snap(self.value())
    }
}

pub fn snap(z: Complex64) -> Option<i8> {
    if (z - 1.0).norm() <= SIGN_TOL {
        Some(1)
    } else if (z + 1.0).norm() <= SIGN_TOL {
        Some(-1)
    } else {
        None
    }
}

/// Compensated complex summation (Neumaier), in the order given.
#[derive(Default)]
struct KahanC {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, c: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *c += (*sum - t) + x;
    } else {
        *c += (x - t) + *sum;
    }
    *sum = t;
}

impl KahanC {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

fn uniformizer_power(field: CharField, m: i64) -> Result<Elem> {
    Ok(match field {
        CharField::Base(f) => Elem::Base(f.int(f.p() as i64).pow(m)?),
        CharField::Ext(k) => Elem::Ext(k.uniformizer().pow(m)?),
    })
}

fn basis_times(field: CharField, w: &Elem, sqrt_part: bool) -> Result<Elem> {
    match (field, w) {
        (CharField::Base(_), Elem::Base(t)) => Ok(Elem::Base(t.clone())),
        (CharField::Ext(k), Elem::Ext(t)) => {
            let b = if sqrt_part { k.delta() } else { ExtElement::from_ints(&k, 1, 0) };
            Ok(Elem::Ext(t.mul(&b)?))
        }
        _ => Err(Error::FieldMismatch("uniformizer on the wrong field".into())),
    }
}

fn check_pair(chi: &MultChar, psi: &AddChar) -> Result<()> {
    if chi.field() != psi.field() {
        return Err(Error::FieldMismatch(format!(
            "character on {} but additive character on {}",
            chi.field().describe(),
            psi.field().describe()
        )));
    }
    Ok(())
}

/// eps(1/2, chi, psi).
pub fn epsilon_half(chi: &MultChar, psi: &AddChar) -> Result<EpsilonValue> {
    check_pair(chi, psi)?;
    let field = chi.field();
    let a = chi.conductor();
    let l = psi.level();
    let m = l - a as i64;
    let w = uniformizer_power(field, m)?;
    // psi(x0 w^m + y0 w^m sqrt d) = e(x0 A + y0 B): psi is additive.
    let ta = psi.eval(&basis_times(field, &w, false)?)?;
    let tb = match field {
        CharField::Base(_) => Turn::from_integer(0),
        CharField::Ext(_) => psi.eval(&basis_times(field, &w, true)?)?,
    };
    let inv = chi.inv();
    let g = UnitGroup::get(field, a)?;
    let mut acc = KahanC::default();
    for (x, y) in g.elements() {
        let t = inv.unit_turn_at(a, (x, y))? + ta * x as i64 + tb * y as i64;
        acc.add(crate::charlib::turn_to_complex(frac(t)));
    }
    let q = field.q() as f64;
    // chi^-1(w^m) = e(-z m) q^(s m); measure factor q^(-a/2).
    let scale = crate::charlib::turn_to_complex(frac(-chi.uniformizer_value() * m))
        * q.powf(ratio_f64(chi.twist()) * m as f64 - a as f64 / 2.0);
    let v = acc.total() * scale;
    Ok(EpsilonValue { value_re: v.re, value_im: v.im, conductor: a, level: l, chi: chi.data() })
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Direct evaluation of the defining sum through the character and
/// additive-character evaluators on every residue; slow reference path.
pub fn epsilon_direct(chi: &MultChar, psi: &AddChar) -> Result<Complex64> {
    check_pair(chi, psi)?;
    let field = chi.field();
    let a = chi.conductor();
    let m = psi.level() - a as i64;
    let w = uniformizer_power(field, m)?;
    let inv = chi.inv();
    let g = UnitGroup::get(field, a)?;
    let mut acc = KahanC::default();
    for (x, y) in g.elements() {
        let x = if a == 0 { 1 } else { x };
        let xe = match field {
            CharField::Base(f) => Elem::Base(f.int(x as i64)),
            CharField::Ext(k) => Elem::Ext(ExtElement::from_ints(&k, x as i64, y as i64)),
        };
        let pt = crate::charlib::elem_mul(&xe, &w)?;
        let c = inv.eval(&pt)?.to_complex();
        let s = crate::charlib::turn_to_complex(psi.eval(&pt)?);
        acc.add(c * s);
    }
    Ok(acc.total() * (field.q() as f64).powf(-(a as f64) / 2.0))
}

/// The sign eps_K(1/2, gamma * mu~^-1, psi(Tr(-delta .))).
pub fn theta_sign(gamma: &MultChar, mu: &K1Char, psi: &AddChar, delta: &ExtElement) -> Result<i8> {
    let k = gamma.ext()?;
    if !gamma.is_conjugate_symplectic()? {
        return Err(Error::Precondition("theta_sign needs a conjugate-symplectic character".into()));
    }
    let chi = gamma.div(mu.tilde())?;
    let psi_k = psi.compose_trace(&k, delta)?;
    let e = epsilon_half(&chi, &psi_k)?;
    e.sign().ok_or(Error::SignSnap { re: e.value_re, im: e.value_im })
}

/// Short description used in reports.
pub fn describe(e: &EpsilonValue) -> String {
    format!(
        "eps = {:.12}{:+.12}i (a={}, level={}, s={})",
        e.value_re,
        e.value_im,
        e.conductor,
        e.level,
        e.chi.twist_s
    )
}

pub fn turn_string(t: &Turn) -> String {
    fmt_ratio(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charlib::{conjugate_symplectic_chars, k1_chars, legendre_char, random_elem};
    use crate::padic::{ExtKind, PAdicField, QuadExt};
    use proptest::prelude::*;

    fn f(p: u64) -> PAdicField {
        PAdicField::with_default_precision(p).unwrap()
    }

    #[test]
    fn trivial_and_gauss() {
        let f3 = f(3);
        let psi = AddChar::standard(f3, 0);
        let triv = MultChar::trivial(CharField::Base(f3));
        let e = epsilon_half(&triv, &psi).unwrap();
        assert!((e.value() - 1.0).norm() < 1e-12);
        let chi = legendre_char(f3, Turn::from_integer(0)).unwrap();
        let e = epsilon_half(&chi, &psi).unwrap();
        assert!((e.value() - Complex64::i()).norm() < 1e-12);
    }

    #[test]
    fn matches_direct_evaluation() {
        for p in [3u64, 5] {
            for kind in ExtKind::all() {
                let k = QuadExt::new(f(p), kind);
                let psi = AddChar::standard(f(p), 1).compose_trace(&k, &k.delta()).unwrap();
                for c in conjugate_symplectic_chars(&k).unwrap() {
                    let a = epsilon_half(&c, &psi).unwrap().value();
                    let b = epsilon_direct(&c, &psi).unwrap();
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn theta_signs_snap() {
        for p in [3u64, 5, 7] {
            for kind in ExtKind::all() {
                let k = QuadExt::new(f(p), kind);
                let psi = AddChar::standard(f(p), 0);
                for g in conjugate_symplectic_chars(&k).unwrap() {
                    for mu in k1_chars(&k).unwrap() {
                        let s = theta_sign(&g, &mu, &psi, &k.delta()).unwrap();
                        assert!(s == 1 || s == -1);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_twist_multiplies_by_chi() {
        let f5 = f(5);
        let fld = CharField::Base(f5);
        let chi = MultChar::from_images(fld, 2, vec![Ratio::new(3, 20)], Ratio::new(1, 3), Ratio::from_integer(0)).unwrap();
        let psi = AddChar::standard(f5, 0);
        let b = f5.int(3);
        let tw = psi.twist(&Elem::Base(b.clone())).unwrap();
        let lhs = epsilon_half(&chi, &tw).unwrap().value();
        let rhs = chi.eval_base(&b).unwrap().to_complex() * epsilon_half(&chi, &psi).unwrap().value();
        assert!((lhs - rhs).norm() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn modulus_one_and_conjugation(pi in 0usize..3, j in 0i64..100, z in 0i64..12, lvl in -1i64..2, c2 in any::<bool>()) {
            let p = [3u64, 5, 7][pi];
            let fp = f(p);
            let fld = CharField::Base(fp);
            let cond = if c2 { 2 } else { 1 };
            let n = UnitGroup::get(fld, cond).unwrap().orders()[0] as i64;
            let chi = MultChar::from_images(fld, cond, vec![Ratio::new(j % n, n)], Ratio::new(z, 12), Ratio::from_integer(0));
            prop_assume!(chi.is_ok());
            let chi = chi.unwrap();
            let psi = AddChar::standard(fp, lvl);
            let e = epsilon_half(&chi, &psi).unwrap().value();
            prop_assert!((e.norm() - 1.0).abs() < 1e-9);
            let ebar = epsilon_half(&chi, &psi.conj()).unwrap().value();
            let sgn = crate::charlib::turn_to_complex(chi.at_minus_one().unwrap());
            prop_assert!((ebar - sgn * e).norm() < 1e-9);
            let e_inv = epsilon_half(&chi.inv(), &psi).unwrap().value();
            prop_assert!((e_inv - sgn * e.conj()).norm() < 1e-9);
        }

        #[test]
        fn unramified_twist_scales(z in 0i64..8, lvl in -1i64..2) {
            let f5 = f(5);
            let fld = CharField::Base(f5);
            let chi = legendre_char(f5, Turn::from_integer(0)).unwrap();
            let nu = MultChar::unramified(fld, Ratio::new(z, 8), Ratio::from_integer(0));
            let psi = AddChar::standard(f5, lvl);
            let lhs = epsilon_half(&chi.mul(&nu).unwrap(), &psi).unwrap().value();
            let m = chi.conductor() as i64 - lvl;
            let rhs = crate::charlib::turn_to_complex(frac(Ratio::new(z, 8) * m)) * epsilon_half(&chi, &psi).unwrap().value();
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn conjugate_symplectic_is_self_dual_sign() {
        let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(3);
        let k = QuadExt::new(f(3), ExtKind::Unramified);
        let _ = random_elem(CharField::Ext(k), &mut rng);
        let psi = AddChar::standard(f(3), 0);
        let g = &conjugate_symplectic_chars(&k).unwrap()[0];
        let s = theta_sign(g, &K1Char::trivial(&k), &psi, &k.delta()).unwrap();
        assert!(s.abs() == 1);
    }
}
