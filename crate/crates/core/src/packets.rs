//! Per-place packet assembly: component groups, the PU3 members sigma^+-,
//! the G2 members pi^+-, and Satake parameters as eigenvalue multisets.

use crate::charlib::{fmt_ratio, frac, omega_char, turn_to_complex, AddChar, CharField, K1Char, MultChar, Turn};
use crate::epsilon::theta_sign;
use crate::error::{Error, Result};
use crate::g2::{self, CharAlgebra, InducedDescriptor, LeviData, Parabolic, QuotientTag, RewriteStep};
use crate::hermitian::{phi3, skew_line_with_sign};
use crate::padic::{ExtElement, PAdicField, QuadExt};
use crate::theta_u::{gl_split_lift, u3_lift, ThetaData, ThetaReport, ThetaShape};
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Nonsplit(QuadExt),
}

/// Local data at one place. In the split case `chi` is chi_w on F^x.
#[derive(Clone, Debug)]
pub struct PlaceData {
    pub base: PAdicField,
    pub splitting: Splitting,
    pub chi: MultChar,
    pub psi: AddChar,
    pub delta: Option<ExtElement>,
}

impl PlaceData {
    pub fn nonsplit(chi: MultChar, psi: AddChar, delta: ExtElement) -> Result<Self> {
        let k = chi.ext()?;
        if !chi.is_conjugate_symplectic()? {
            return Err(Error::Precondition("chi must be conjugate-symplectic at a nonsplit place".into()));
        }
        // chi chi^c = chi o N = omega o N = 1, so chi^c = chi^-1
        if chi.is_galois_invariant()? != chi.chi_squared_trivial()? {
            return Err(Error::Precondition("inconsistent input: chi = chi^c must force chi^2 = 1".into()));
        }
        Ok(Self { base: k.field(), splitting: Splitting::Nonsplit(k), chi, psi, delta: Some(delta) })
    }

    /// psi of level 0 and delta = sqrt(d).
    pub fn nonsplit_standard(chi: MultChar) -> Result<Self> {
        let k = chi.ext()?;
        Self::nonsplit(chi, AddChar::standard(k.field(), 0), k.delta())
    }

    pub fn split(chi_w: MultChar, psi: AddChar) -> Result<Self> {
        let CharField::Base(f) = chi_w.field() else {
            return Err(Error::Precondition("at a split place chi_w is a character of F^x".into()));
        };
        if !chi_w.is_unitary() {
            return Err(Error::Precondition("chi_w must be unitary".into()));
        }
        Ok(Self { base: f, splitting: Splitting::Split, chi: chi_w, psi, delta: None })
    }

    pub fn split_standard(chi_w: MultChar) -> Result<Self> {
        let CharField::Base(f) = chi_w.field() else {
            return Err(Error::Precondition("at a split place chi_w is a character of F^x".into()));
        };
        Self::split(chi_w, AddChar::standard(f, 0))
    }

    pub fn is_split(&self) -> bool {
        self.splitting == Splitting::Split
    }

    pub fn ext(&self) -> Option<QuadExt> {
        match self.splitting {
            Splitting::Nonsplit(k) => Some(k),
            Splitting::Split => None,
        }
    }

    /// chi_w' = chi_w^-1 at the other place above v.
    pub fn chi_pair(&self) -> Result<(MultChar, MultChar)> {
        if !self.is_split() {
            return Err(Error::Precondition("chi pair only exists at split places".into()));
        }
        Ok((self.chi.clone(), self.chi.inv()))
    }
}

pub fn component_group_pu3(pd: &PlaceData) -> u8 {
    if pd.is_split() {
        1
    } else {
        2
    }
}

pub fn component_group_g2(pd: &PlaceData) -> Result<u8> {
    if pd.is_split() {
        return Ok(1);
    }
    Ok(if pd.chi.is_galois_invariant()? { 1 } else { 2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pu3Member {
    pub label: Label,
    pub w_sign: Option<i8>,
    pub theta: ThetaReport,
}

/// The GL2 representation tau on the Levi of Q1.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum Tau {
    PrincipalSeries { pair: [MultChar; 2] },
    /// Automorphic induction of a character of K^x not fixed by Galois.
    Dihedral { from: MultChar },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum G2Descriptor {
    QuotientOfQ1Induced { tau: Tau, shift: String },
    InducedFromQ2 { mu: MultChar, mu_squared_is_omega: bool, irreducible: bool, rewrite: Vec<RewriteStep> },
    TemperedNonGeneric,
    Zero,
}

impl G2Descriptor {
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct G2Member {
    pub label: Label,
    #[serde(flatten)]
    pub descriptor: G2Descriptor,
}

/// sigma^+ and sigma^- (nonsplit) or the single sigma^+ (split).
pub fn pu3_packet(pd: &PlaceData) -> Result<Vec<Pu3Member>> {
    match pd.splitting {
        Splitting::Split => {
            let triv = MultChar::trivial(pd.chi.field());
            Ok(vec![Pu3Member { label: Label::Plus, w_sign: None, theta: gl_split_lift(&triv, &pd.chi)? }])
        }
        Splitting::Nonsplit(k) => {
            let delta = pd.delta.clone().unwrap_or_else(|| k.delta());
            let data = ThetaData::new(pd.chi.clone(), pd.psi.clone(), delta)?;
            let v = phi3(&k);
            let e = theta_sign(&pd.chi, &K1Char::restriction_of(&pd.chi.inv())?, &pd.psi, &data.delta)?;
            let triv = K1Char::trivial(&k);
            let mut out = vec![];
            for (label, sgn) in [(Label::Plus, e * v.sign()), (Label::Minus, -e * v.sign())] {
                let w = skew_line_with_sign(&k, sgn);
                let r = u3_lift(&triv, &v, &w, &data)?;
                let ok = match (&label, &r.shape) {
                    (Label::Plus, ThetaShape::QuotientOfPrincipalSeries { inducing, .. }) => {
                        *inducing == pd.chi.with_twist(Ratio::new(1, 2))
                    }
                    (Label::Minus, ThetaShape::Supercuspidal) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Internal(format!("sigma{} has unexpected shape", if label == Label::Plus { "+" } else { "-" })));
                }
                out.push(Pu3Member { label, w_sign: Some(sgn), theta: r });
            }
            Ok(out)
        }
    }
}

fn half() -> Ratio<i64> {
    Ratio::new(1, 2)
}

/// Symbolic rewrite of i_Q1(mu|.|^1/2, mu^-1|.|^1/2) with mu^2 = omega.
pub fn chi_squared_trivial_rewrite() -> Result<g2::RewriteResult> {
    let alg = CharAlgebra::new(vec!["mu".into(), "omega".into()], vec![vec![2, -1], vec![0, 2]])?;
    let mu = alg.sym("mu")?;
    let d = InducedDescriptor {
        source: Parabolic::Q1,
        levi: LeviData::Pair(mu.twist(half()), mu.inv().twist(half())),
        tag: QuotientTag::FullInduced,
    };
    g2::langlands_rewrite(&alg, &d)
}

pub fn g2_packet(pd: &PlaceData) -> Result<Vec<G2Member>> {
    let shift = "1/2".to_string();
    match pd.splitting {
        Splitting::Split => {
            let (a, b) = pd.chi_pair()?;
            Ok(vec![G2Member {
                label: Label::Plus,
                descriptor: G2Descriptor::QuotientOfQ1Induced { tau: Tau::PrincipalSeries { pair: [a, b] }, shift },
            }])
        }
        Splitting::Nonsplit(k) => {
            let inv = pd.chi.is_galois_invariant()?;
            let sq = pd.chi.chi_squared_trivial()?;
            if inv != sq {
                return Err(Error::Precondition("inconsistent input: chi = chi^c without chi^2 = 1".into()));
            }
            if !inv {
                return Ok(vec![
                    G2Member {
                        label: Label::Plus,
                        descriptor: G2Descriptor::QuotientOfQ1Induced { tau: Tau::Dihedral { from: pd.chi.clone() }, shift },
                    },
                    G2Member { label: Label::Minus, descriptor: G2Descriptor::TemperedNonGeneric },
                ]);
            }
            let mu = pd.chi.descend_via_norm()?;
            let mu_sq = mu.pow(2)? == omega_char(&k)?;
            let rw = chi_squared_trivial_rewrite()?;
            if !rw.all_verified() || rw.result.source != Parabolic::Q2 {
                return Err(Error::Internal("rewrite to the Q2 form did not verify".into()));
            }
            let irreducible = rw.tags.contains(&QuotientTag::IrreducibleInduced);
            Ok(vec![G2Member {
                label: Label::Plus,
                descriptor: G2Descriptor::InducedFromQ2 { mu, mu_squared_is_omega: mu_sq, irreducible, rewrite: rw.steps },
            }])
        }
    }
}

/// e(turn) * q^(halves/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Eigenvalue {
    pub turn: Turn,
    pub halves: i64,
}

impl Eigenvalue {
    pub fn new(turn: Turn, halves: i64) -> Self {
        Self { turn: frac(turn), halves }
    }

    pub fn inv(self) -> Self {
        Self::new(-self.turn, -self.halves)
    }

    pub fn to_complex(self, q: u64) -> Complex64 {
        turn_to_complex(self.turn) * (q as f64).powf(self.halves as f64 / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeParam {
    pub q: u64,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Frobenius in the non-identity component; eigenvalues are of its square.
    pub squared: bool,
}

impl SatakeParam {
    fn new(q: u64, mut eigenvalues: Vec<Eigenvalue>, squared: bool) -> Self {
        eigenvalues.sort();
        Self { q, eigenvalues, squared }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_inversion_closed(&self) -> bool {
        let mut inv: Vec<Eigenvalue> = self.eigenvalues.iter().map(|e| e.inv()).collect();
        inv.sort();
        inv == self.eigenvalues
    }

    pub fn contains_one(&self) -> bool {
        self.eigenvalues.contains(&Eigenvalue::new(Turn::zero(), 0))
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().map(|e| e.to_complex(self.q)).product()
    }

    pub fn complex(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.to_complex(self.q)).collect()
    }
}

impl Serialize for SatakeParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct E {
            base: u64,
            exponent_halves: i64,
            turn: String,
        }
        #[derive(Serialize)]
        struct P {
            dim: usize,
            component: &'static str,
            eigenvalues: Vec<E>,
        }
        P {
            dim: self.dim(),
            component: if self.squared { "non-identity (squares reported)" } else { "identity" },
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|e| E { base: self.q, exponent_halves: e.halves, turn: fmt_ratio(&e.turn) })
                .collect(),
        }
        .serialize(s)
    }
}

fn require_unramified(pd: &PlaceData) -> Result<()> {
    if pd.chi.conductor() != 0 {
        return Err(Error::Precondition("Satake parameters need an unramified character".into()));
    }
    if pd.ext().is_some_and(|k| k.is_ramified()) {
        return Err(Error::Precondition("Satake parameters need a split or unramified place".into()));
    }
    Ok(())
}

/// On the 3-dim representation: {z^-2, z q^1/2, z q^-1/2} at split places;
/// at unramified nonsplit places the squares {z^-2, z q, z q^-1}, z = chi(p).
pub fn satake_pu3(pd: &PlaceData) -> Result<SatakeParam> {
    require_unramified(pd)?;
    let q = pd.base.q();
    let z = pd.chi.uniformizer_value();
    let m = if pd.is_split() { 1 } else { 2 };
    Ok(SatakeParam::new(
        q,
        vec![Eigenvalue::new(z * -2, 0), Eigenvalue::new(z, m), Eigenvalue::new(z, -m)],
        !pd.is_split(),
    ))
}

/// Frobenius eigenvalue turn a of rho_tau: chi_w(p) split, i when nonsplit.
fn rho_frobenius_turn(pd: &PlaceData) -> Result<Turn> {
    if pd.is_split() {
        return Ok(pd.chi.uniformizer_value());
    }
    // rho = Ind chi, Frobenius squared acts by chi(p) = -1
    if pd.chi.uniformizer_value() != half() {
        return Err(Error::Internal("unramified conjugate-symplectic chi must have chi(p) = -1".into()));
    }
    Ok(Ratio::new(1, 4))
}

/// On the 7-dim representation: (2 x 2) + Sym^2 of the short-root SL2
/// carrying rho_tau, i.e. {a^+-1 q^+-1/2, a^2, 1, a^-2}.
pub fn satake_g2(pd: &PlaceData) -> Result<SatakeParam> {
    require_unramified(pd)?;
    let a = rho_frobenius_turn(pd)?;
    let mut e = vec![];
    for s in [a, -a] {
        for h in [1, -1] {
            e.push(Eigenvalue::new(s, h));
        }
    }
    e.extend([Eigenvalue::new(a * 2, 0), Eigenvalue::new(Turn::zero(), 0), Eigenvalue::new(a * -2, 0)]);
    Ok(SatakeParam::new(pd.base.q(), e, false))
}

/// Independent split-place computation: induce the Q1 pair
/// (chi|.|^1/2, chi^-1|.|^1/2) to the torus and evaluate on the long coroots.
pub fn satake_g2_from_q1_inducing(pd: &PlaceData) -> Result<SatakeParam> {
    require_unramified(pd)?;
    let (chi, chi_inv) = pd.chi_pair()?;
    let (ea, eb) = (chi.with_twist(half()), chi_inv.with_twist(half()));
    // Q1 pair (eta_a at alpha+beta, eta_b at alpha) -> torus (eta_b, eta_a / eta_b)
    let x1 = eb.clone();
    let x2 = ea.div(&eb)?;
    let at = |c: &MultChar| (c.uniformizer_value(), c.twist());
    let ((z1, s1), (z2, s2)) = (at(&x1), at(&x2));
    let eig = g2::dual_seven_dim_cocharacters()
        .into_iter()
        .map(|(c1, c2)| {
            // |p|^s = q^-s
            let s = s1 * c1 + s2 * c2;
            let h = -s * 2;
            if !h.is_integer() {
                return Err(Error::Internal("non-half-integral exponent".into()));
            }
            Ok(Eigenvalue::new(z1 * c1 + z2 * c2, h.to_integer()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SatakeParam::new(pd.base.q(), eig, false))
}

/// PU3 cross-check from sigma^+'s inducing data chi|.|_K^1/2 and K^1 part
/// mu': the squares {chi(p) q_K^-1/2, mu'~(p), chi(p) q_K^1/2}.
pub fn satake_pu3_from_sigma_plus(pd: &PlaceData, sigma_plus: &ThetaReport) -> Result<SatakeParam> {
    require_unramified(pd)?;
    let q = pd.base.q();
    match &sigma_plus.shape {
        ThetaShape::QuotientOfPrincipalSeries { inducing, k1_part } => {
            let z = inducing.uniformizer_value();
            let m = (inducing.twist() * 4).to_integer();
            let k = pd.ext().expect("nonsplit");
            let p = k.embed(&pd.base.int(pd.base.p() as i64));
            let mid = k1_part.eval_pullback(&p)?;
            if mid.abs_exp != Ratio::zero() {
                return Err(Error::Internal("K^1 part is not unitary".into()));
            }
            Ok(SatakeParam::new(q, vec![Eigenvalue::new(z, -m), Eigenvalue::new(mid.turn, 0), Eigenvalue::new(z, m)], true))
        }
        ThetaShape::LanglandsQuotientGL3 { triple } => {
            let e = triple
                .iter()
                .map(|c| Eigenvalue::new(c.uniformizer_value(), (-c.twist() * 2).to_integer()))
                .collect();
            Ok(SatakeParam::new(q, e, false))
        }
        _ => Err(Error::Precondition("sigma^+ has no principal-series data".into())),
    }
}

// ---- 7x7 matrix model ----

pub type Mat = Vec<Vec<Complex64>>;

fn sym2(g: &[[Complex64; 2]; 2]) -> [[Complex64; 3]; 3] {
    // basis x^2, xy, y^2 under x -> a x + c y, y -> b x + d y
    let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
    let two = Complex64::new(2.0, 0.0);
    [
        [a * a, a * b, b * b],
        [two * a * c, a * d + b * c, two * b * d],
        [c * c, c * d, d * d],
    ]
}

/// (g_s (x) g_l) + Sym^2(g_s) as a 7x7 block matrix.
pub fn seven_dim_matrix(gs: &[[Complex64; 2]; 2], gl: &[[Complex64; 2]; 2]) -> Mat {
    let mut m = vec![vec![Complex64::zero(); 7]; 7];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = gs[i][j] * gl[k][l];
                }
            }
        }
    }
    let s = sym2(gs);
    for i in 0..3 {
        for j in 0..3 {
            m[4 + i][4 + j] = s[i][j];
        }
    }
    m
}

/// Characteristic polynomial coefficients c_0..c_n (monic, c_n = 1), Faddeev-LeVerrier.
pub fn char_poly(m: &Mat) -> Vec<Complex64> {
    let n = m.len();
    let mut c = vec![Complex64::zero(); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut mk = vec![vec![Complex64::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Complex64::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::zero();
                for l in 0..n {
                    s += m[i][l] * mk[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += c[n - k + 1];
        }
        mk = next;
        let mut tr = Complex64::zero();
        for i in 0..n {
            for l in 0..n {
                tr += m[i][l] * mk[l][i];
            }
        }
        c[n - k] = -tr / k as f64;
    }
    c
}

/// prod (x - r) as coefficients c_0..c_n.
pub fn poly_from_roots(r: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &x in r {
        let mut n = vec![Complex64::zero(); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            n[i + 1] += a;
            n[i] -= a * x;
        }
        c = n;
    }
    c
}

/// Relative agreement of a multiset with the matrix model's char poly.
pub fn matches_matrix_model(sp: &SatakeParam, m: &Mat, tol: f64) -> bool {
    let a = char_poly(m);
    let b = poly_from_roots(&sp.complex());
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
}

/// The parameter's image in the matrix model: g_s = rho_tau(Frob), g_l = diag(q^-1/2, q^1/2).
pub fn model_matrix_for(pd: &PlaceData) -> Result<Mat> {
    require_unramified(pd)?;
    let q = pd.base.q() as f64;
    let zero = Complex64::zero();
    let gs = if pd.is_split() {
        let a = turn_to_complex(pd.chi.uniformizer_value());
        [[a, zero], [zero, a.inv()]]
    } else {
        // Ind chi: Frobenius swaps the two lines, its square is chi(p)
        let z = turn_to_complex(pd.chi.uniformizer_value());
        [[zero, z], [Complex64::new(1.0, 0.0), zero]]
    };
    let gl = [[Complex64::new(q.powf(-0.5), 0.0), zero], [zero, Complex64::new(q.sqrt(), 0.0)]];
    Ok(seven_dim_matrix(&gs, &gl))
}

#[derive(Clone, Debug, Serialize)]
pub struct SatakeReport {
    pub pu3: SatakeParam,
    pub g2: SatakeParam,
}

#[derive(Clone, Debug, Serialize)]
pub struct PacketReport {
    pub s_group_pu3: u8,
    pub s_group_g2: u8,
    pub pu3_members: Vec<Pu3Member>,
    pub g2_members: Vec<G2Member>,
    pub satake: Option<SatakeReport>,
}

pub fn packet_report(pd: &PlaceData) -> Result<PacketReport> {
    let s_group_g2 = component_group_g2(pd)?;
    let pu3_members = pu3_packet(pd)?;
    let g2_members = g2_packet(pd)?;
    let has_minus = g2_members.iter().any(|m| m.label == Label::Minus && !m.descriptor.is_zero());
    if has_minus != (s_group_g2 == 2) || g2_members.len() != s_group_g2 as usize {
        return Err(Error::Internal("packet size disagrees with the component group".into()));
    }
    let satake = if require_unramified(pd).is_ok() {
        Some(SatakeReport { pu3: satake_pu3(pd)?, g2: satake_g2(pd)? })
    } else {
        None
    };
    Ok(PacketReport { s_group_pu3: component_group_pu3(pd), s_group_g2, pu3_members, g2_members, satake })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charlib::conjugate_symplectic_chars;
    use crate::padic::ExtKind;

    fn f(p: u64) -> PAdicField {
        PAdicField::with_default_precision(p).unwrap()
    }

    fn split(p: u64, z: Turn) -> PlaceData {
        PlaceData::split_standard(MultChar::unramified(CharField::Base(f(p)), z, Ratio::zero())).unwrap()
    }

    #[test]
    fn truth_table() {
        for p in [3, 5, 7] {
            for kind in [ExtKind::Unramified, ExtKind::RamifiedP, ExtKind::RamifiedUp] {
                let k = QuadExt::new(f(p), kind);
                for chi in conjugate_symplectic_chars(&k).unwrap() {
                    let pd = PlaceData::nonsplit_standard(chi.clone()).unwrap();
                    let r = packet_report(&pd).unwrap();
                    assert_eq!(r.s_group_pu3, 2);
                    assert_eq!(r.pu3_members.len(), 2);
                    if chi.chi_squared_trivial().unwrap() {
                        assert_eq!(r.s_group_g2, 1);
                        let G2Descriptor::InducedFromQ2 { mu_squared_is_omega, .. } = &r.g2_members[0].descriptor else {
                            panic!()
                        };
                        assert!(mu_squared_is_omega);
                    } else {
                        assert_eq!(r.s_group_g2, 2);
                        assert!(matches!(r.g2_members[1].descriptor, G2Descriptor::TemperedNonGeneric));
                    }
                }
            }
        }
        let r = packet_report(&split(5, Ratio::new(1, 3))).unwrap();
        assert_eq!((r.s_group_pu3, r.s_group_g2, r.g2_members.len()), (1, 1, 1));
    }

    #[test]
    fn satake_split() {
        let pd = split(5, Turn::zero());
        let s = satake_g2(&pd).unwrap();
        let want = SatakeParam::new(
            5,
            [(0, 1), (0, 1), (0, -1), (0, -1), (0, 0), (0, 0), (0, 0)].iter().map(|&(t, h)| Eigenvalue::new(Ratio::from_integer(t), h)).collect(),
            false,
        );
        assert_eq!(s, want);
        let p = satake_pu3(&pd).unwrap();
        assert_eq!(p.eigenvalues.len(), 3);
        for z in [Ratio::new(1, 3), Ratio::new(1, 5), Ratio::new(3, 7)] {
            let pd = split(7, z);
            let s = satake_g2(&pd).unwrap();
            assert!(s.is_inversion_closed() && s.contains_one());
            assert!((s.product() - 1.0).norm() < 1e-9);
            assert_eq!(s, satake_g2_from_q1_inducing(&pd).unwrap());
            assert!(matches_matrix_model(&s, &model_matrix_for(&pd).unwrap(), 1e-9));
        }
    }

    #[test]
    fn satake_nonsplit() {
        let k = QuadExt::new(f(5), ExtKind::Unramified);
        let chi = MultChar::unramified(CharField::Ext(k), half(), Ratio::zero());
        let pd = PlaceData::nonsplit_standard(chi).unwrap();
        let s = satake_g2(&pd).unwrap();
        assert!(matches_matrix_model(&s, &model_matrix_for(&pd).unwrap(), 1e-9));
        let c = s.complex();
        let i5 = Complex64::new(0.0, 5f64.sqrt());
        for want in [i5, -i5, i5 / 5.0, -i5 / 5.0, Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)] {
            assert!(c.iter().any(|x| (x - want).norm() < 1e-9));
        }
        let p = satake_pu3(&pd).unwrap();
        assert!(p.squared);
        let r = pu3_packet(&pd).unwrap();
        assert_eq!(satake_pu3_from_sigma_plus(&pd, &r[0].theta).unwrap(), p);
    }

    #[test]
    fn char_poly_matches_diagonal() {
        let d: Vec<Complex64> = (1..=4).map(|i| Complex64::new(i as f64, 0.5)).collect();
        let mut m = vec![vec![Complex64::zero(); 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        let a = char_poly(&m);
        let b = poly_from_roots(&d);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-9));
    }

    #[test]
    fn ramified_rejected() {
        let k = QuadExt::new(f(3), ExtKind::RamifiedP);
        let chi = conjugate_symplectic_chars(&k).unwrap().remove(0);
        let pd = PlaceData::nonsplit_standard(chi).unwrap();
        assert!(satake_g2(&pd).is_err());
        assert!(packet_report(&pd).unwrap().satake.is_none());
    }
}
