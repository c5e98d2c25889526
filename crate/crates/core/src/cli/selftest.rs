//! Property suites run by `dg2 selftest` and by the acceptance tests.
//!
//! Each suite returns named checks. `literal` checks record claims in their
//! literal form that are known not to hold; they are reported but do not
//! decide `passed`.

use super::fixtures;
use super::scenario::Scenario;
use crate::charlib::{
    conjugate_symplectic_chars, k1_chars, legendre_char, turn_to_complex, AddChar, CharField, MultChar, Turn, UnitGroup,
};
use crate::cubic::{disc_cubic, has_repeated_factor, etale_class, orbit_label, orbit_representative, BinaryCubic};
use crate::epsilon::epsilon_half;
use crate::error::Result;
use crate::g2::{
    bruhat_double_cosets_q2, langlands_rewrite, parse_rewrite_input, seven_dim_bigrading, seven_dim_weights,
    split_rewrite_check, weyl_group, CharAlgebra, LeviData, Parabolic, QuotientTag, Weight, DEFAULT_REWRITE_INPUT,
};
use crate::hermitian::phi3;
use crate::packets::{
    component_group_g2, matches_matrix_model, model_matrix_for, packet_report, satake_g2, satake_g2_from_q1_inducing,
    seven_dim_matrix, G2Descriptor, PlaceData,
};
use crate::padic::{hilbert_oracle, hilbert_symbol, is_norm, ExtKind, PAdicField, QuadExt};
use crate::theta_u::{first_occurrence, u3_lift, Parity, ThetaData, ThetaShape};
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

pub const TOL: f64 = 1e-9;
pub const SEED: u64 = 20240611;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub literal: Vec<Check>,
}

impl Suite {
    fn new(id: u8, name: &'static str) -> Self {
        Self { id, name, checks: vec![], literal: vec![] }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn literal(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.literal.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn literal_passed(&self) -> bool {
        self.literal.iter().all(|c| c.passed)
    }
}

fn field(p: u64) -> PAdicField {
    PAdicField::with_default_precision(p).expect("odd prime")
}

/// A random unitary character of the given level.
pub fn random_unitary_char<R: Rng>(fld: CharField, level: u32, rng: &mut R) -> Result<MultChar> {
    let g = UnitGroup::get(fld, level)?;
    let ks: Vec<i64> = g.orders().iter().map(|&n| rng.random_range(0..n as i64)).collect();
    let orders: Vec<i64> = g.orders().iter().map(|&n| n as i64).collect();
    let z = Ratio::new(rng.random_range(0..24), 24);
    MultChar::from_fn(
        fld,
        level,
        |r| {
            let d = g.dlog(r)?;
            Ok(d.iter().zip(&ks).zip(&orders).map(|((&e, &k), &n)| Ratio::new(e as i64 * k, n)).sum())
        },
        z,
        Ratio::zero(),
    )
}

pub fn hilbert_suite() -> Result<Suite> {
    let mut s = Suite::new(1, "Hilbert symbol and norm groups");
    let mut rng = StdRng::seed_from_u64(SEED);
    for p in [3u64, 5, 7] {
        let f = field(p);
        let reps = [1, f.u() as i64, p as i64, (f.u() * p) as i64];
        let mut agree = true;
        for &a in &reps {
            for &b in &reps {
                agree &= hilbert_symbol(&f.int(a), &f.int(b))? == hilbert_oracle(&f.int(a), &f.int(b))?;
            }
        }
        s.check(&format!("closed form = solvability oracle, p={p}"), agree, "16 class-representative pairs");
        let mut ok = true;
        for _ in 0..200 {
            let mut r = || {
                let n: i64 = rng.random_range(1..500);
                let v: i64 = rng.random_range(-2..=2);
                let sg = if rng.random_bool(0.5) { 1 } else { -1 };
                f.int(sg * n).mul(&f.int(p as i64).pow(v).expect("p")).expect("exact")
            };
            let (a, b, c) = (r(), r(), r());
            let bc = b.mul(&c)?;
            ok &= hilbert_symbol(&a, &bc)? == hilbert_symbol(&a, &b)? * hilbert_symbol(&a, &c)?;
            ok &= hilbert_symbol(&a, &b)? == hilbert_symbol(&b, &a)?;
        }
        s.check(&format!("bimultiplicative and symmetric, p={p}"), ok, "200 random pairs");
        for kind in ExtKind::all() {
            let k = QuadExt::new(f, kind);
            let norms = reps.iter().filter(|&&r| is_norm(&f.int(r), &k).unwrap_or(false)).count();
            s.check(&format!("norm index 2, p={p}, {}", kind.name()), norms == 2, format!("{norms} of 4 square classes are norms"));
        }
    }
    Ok(s)
}

pub fn epsilon_suite() -> Result<Suite> {
    let mut s = Suite::new(2, "Epsilon factors");
    let mut rng = StdRng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    let mut conj_ok = true;
    let mut literal_ok = true;
    let mut literal_bad = 0;
    for i in 0..50 {
        let p = [3u64, 5, 7][i % 3];
        let f = field(p);
        let fld = if i % 2 == 0 { CharField::Base(f) } else { CharField::Ext(QuadExt::new(f, ExtKind::all()[i % 3])) };
        let level = 1 + (i as u32 % 2);
        let chi = random_unitary_char(fld, level, &mut rng)?;
        let psi = match fld {
            CharField::Base(_) => AddChar::standard(f, 0),
            CharField::Ext(k) => AddChar::standard(f, 0).compose_trace(&k, &k.delta())?,
        };
        let e = epsilon_half(&chi, &psi)?.value();
        worst = worst.max((e.norm() - 1.0).abs());
        let sgn = turn_to_complex(chi.at_minus_one()?);
        let ebar = epsilon_half(&chi, &psi.conj())?.value();
        conj_ok &= (ebar - sgn * e).norm() < TOL;
        let lit = (ebar - sgn * e.conj()).norm() < TOL;
        literal_ok &= lit;
        literal_bad += usize::from(!lit);
    }
    s.check("|eps| = 1 for 50 random unitary characters", worst < TOL, format!("max deviation {worst:.2e}"));
    s.check("eps(chi, psi-bar) = chi(-1) eps(chi, psi)", conj_ok, "50 random characters");
    s.literal(
        "eps(chi, psi-bar) = chi(-1) conj(eps(chi, psi))",
        literal_ok,
        format!("fails for {literal_bad} of 50; equivalent to eps real, false for the mod-3 Gauss sum (eps = i)"),
    );
    let f3 = field(3);
    let leg = legendre_char(f3, Turn::zero())?;
    let e = epsilon_half(&leg, &AddChar::standard(f3, 0))?.value();
    // two-term Gauss sum: q^-1/2 sum_{x=1,2} (x/3)^-1 e(x/3)
    let g = (turn_to_complex(Ratio::new(1, 3)) - turn_to_complex(Ratio::new(2, 3))) / 3f64.sqrt();
    s.check(
        "quadratic character mod 3: eps = i",
        (e - Complex64::i()).norm() < TOL && (e - g).norm() < TOL,
        format!("eps = {:.12}{:+.12}i, Gauss sum oracle {:.12}{:+.12}i", e.re, e.im, g.re, g.im),
    );
    Ok(s)
}

pub fn dichotomy_suite() -> Result<Suite> {
    let mut s = Suite::new(3, "Theta dichotomy and conservation");
    for p in [3u64, 5, 7] {
        for kind in ExtKind::all() {
            let k = QuadExt::new(field(p), kind);
            let mut cons = true;
            let mut pairs = true;
            let mut n_mu = 0;
            let mut shapes = true;
            let v = phi3(&k);
            for chi in conjugate_symplectic_chars(&k)? {
                let data = ThetaData::standard(chi.clone())?;
                let w = crate::hermitian::skew_line_with_sign(&k, 1);
                for mu in k1_chars(&k)? {
                    n_mu += 1;
                    let fo = first_occurrence(&mu, Parity::Odd, &w, &data)?;
                    let mut vals: Vec<u32> = fo.values().copied().collect();
                    vals.sort();
                    pairs &= vals == [1, 3];
                    cons &= vals.iter().sum::<u32>() == 4;
                }
                let pd = PlaceData::nonsplit_standard(chi)?;
                for m in crate::packets::pu3_packet(&pd)? {
                    let sc = m.theta.shape == ThetaShape::Supercuspidal;
                    shapes &= (m.label == crate::packets::Label::Minus) == sc;
                }
                let _ = u3_lift;
            }
            let tag = format!("p={p}, {}", kind.name());
            s.check(&format!("odd first occurrences are {{1,3}}, {tag}"), pairs, format!("{n_mu} (chi, mu) pairs"));
            s.check(&format!("n + n' = 4, {tag}"), cons, "");
            s.check(&format!("sigma+ never supercuspidal, sigma- always, {tag}"), shapes && v.dim() == 3, "");
        }
    }
    Ok(s)
}

fn g2_kind(d: &G2Descriptor) -> &'static str {
    match d {
        G2Descriptor::QuotientOfQ1Induced { .. } => "QuotientOfQ1Induced",
        G2Descriptor::InducedFromQ2 { .. } => "InducedFromQ2",
        G2Descriptor::TemperedNonGeneric => "TemperedNonGeneric",
        G2Descriptor::Zero => "Zero",
    }
}

pub fn packet_suite() -> Result<Suite> {
    let mut s = Suite::new(4, "Packet truth table");
    let cat = fixtures::catalog()?;
    s.check("fixture grid has at least 12 scenarios", cat.len() >= 12, format!("{} scenarios", cat.len()));
    for (name, sc) in cat {
        let r = sc.resolve()?;
        let pd = &r.place;
        let rep = packet_report(pd)?;
        let kinds: Vec<&str> = rep.g2_members.iter().map(|m| g2_kind(&m.descriptor)).collect();
        let mut ok = rep.g2_members.len() == component_group_g2(pd)? as usize;
        let shape_ok = match pd.ext() {
            None => kinds == ["QuotientOfQ1Induced"],
            Some(_) if pd.chi.chi_squared_trivial()? => {
                kinds == ["InducedFromQ2"]
                    && matches!(&rep.g2_members[0].descriptor, G2Descriptor::InducedFromQ2 { mu_squared_is_omega: true, .. })
            }
            Some(_) => kinds == ["QuotientOfQ1Induced", "TemperedNonGeneric"],
        };
        ok &= shape_ok;
        if let Some(e) = &sc.expect {
            ok &= e.s_group_pu3 == rep.s_group_pu3 && e.s_group_g2 == rep.s_group_g2 && e.g2_members == kinds;
        }
        s.check(&name, ok, format!("S = {}, members {:?}", rep.s_group_g2, kinds));
    }
    Ok(s)
}

pub fn rewrite_suite() -> Result<Suite> {
    let mut s = Suite::new(5, "Langlands rewrite");
    let inp = parse_rewrite_input(DEFAULT_REWRITE_INPUT)?;
    let alg = &inp.algebra;
    let r = langlands_rewrite(alg, &inp.descriptor)?;
    s.check("every step machine-verified", r.all_verified(), format!("{} steps", r.steps.len()));
    let mu = alg.sym("mu")?;
    let h = Ratio::new(1, 2);
    // independent expectation of the chain in torus coordinates
    let expect = [
        crate::g2::TorusChar(mu.inv().twist(h), mu.pow(2)),
        crate::g2::TorusChar(mu.pow(2), mu.inv().twist(h)),
        crate::g2::TorusChar(mu.twist(h), mu.twist(-h)),
    ];
    let got: Vec<String> = r.steps.iter().take(3).map(|x| x.after.clone()).collect();
    let want: Vec<String> = expect.iter().map(|t| alg.render_torus(t)).collect();
    s.check("chain passes through the expected torus characters", got == want, format!("{got:?}"));
    let terminal = matches!(&r.result.levi, LeviData::Det(e) if alg.eq(e, &mu)) && r.result.source == Parabolic::Q2;
    s.check("terminates at i_Q2(mu o det)", terminal, r.steps.last().map(|x| x.after.clone()).unwrap_or_default());
    s.check(
        "quotient tagged irreducible (mu unitary, mu^2 = omega nontrivial)",
        r.tags.contains(&QuotientTag::IrreducibleInduced),
        "",
    );
    let free = CharAlgebra::new(vec!["chi".into()], vec![])?;
    s.check("split case: i_Q2(chi^-1|.|^1/2, chi^2) = i_Q1(chi|.|^1/2, chi^-1|.|^1/2) on the torus", split_rewrite_check(&free, &free.sym("chi")?)?, "");
    Ok(s)
}

pub fn g2_suite() -> Result<Suite> {
    let mut s = Suite::new(6, "G2 structure");
    s.check("Weyl group has order 12", weyl_group().len() == 12, "");
    let lens: Vec<usize> = bruhat_double_cosets_q2().iter().map(|w| w.length()).collect();
    s.check("4 double cosets with lengths 0,1,3,5", lens == [0, 1, 3, 5], format!("{lens:?}"));
    // root-sum oracle by hand: 10a+5b and 9a+6b in (e1, e2) coordinates
    s.check("delta_Q1 = |t1|^5", Parabolic::Q1.modulus_exponents() == (5, 0) && Weight::new(10, 5).e_coords() == (5, 0), "");
    s.check("delta_Q2 = |t1 t2|^3", Parabolic::Q2.modulus_exponents() == (3, 3) && Weight::new(9, 6).e_coords() == (3, 3), "");
    let mut w = seven_dim_weights();
    w.sort();
    let mut want: Vec<Weight> = [(0, 0), (1, 0), (-1, 0), (1, 1), (-1, -1), (2, 1), (-2, -1)].iter().map(|&(m, k)| Weight::new(m, k)).collect();
    want.sort();
    s.check("7-dim weights = {0, +-a, +-(a+b), +-(2a+b)}", w == want, "");
    let g = seven_dim_bigrading();
    let four = g.iter().filter(|&&(a, b)| a.abs() == 1 && b.abs() == 1).count();
    let three = g.iter().filter(|&&(_, b)| b == 0).count();
    s.check("branching 4 + 3 = 7", four == 4 && three == 3, format!("{g:?}"));
    Ok(s)
}

pub fn satake_suite() -> Result<Suite> {
    let mut s = Suite::new(7, "Satake parameters");
    let mut ok_inv = true;
    let mut ok_cross = true;
    let mut ok_model = true;
    let mut n = 0;
    for p in [3u64, 5, 7, 11] {
        for j in 0..6 {
            let z = Ratio::new(j, 6);
            let pd = PlaceData::split_standard(MultChar::unramified(CharField::Base(field(p)), z, Ratio::zero()))?;
            let sp = satake_g2(&pd)?;
            ok_inv &= sp.is_inversion_closed() && sp.contains_one() && (sp.product() - 1.0).norm() < TOL;
            ok_cross &= sp == satake_g2_from_q1_inducing(&pd)?;
            ok_model &= matches_matrix_model(&sp, &model_matrix_for(&pd)?, TOL);
            n += 1;
        }
        let k = QuadExt::new(field(p), ExtKind::Unramified);
        let pd = PlaceData::nonsplit_standard(MultChar::unramified(CharField::Ext(k), Ratio::new(1, 2), Ratio::zero()))?;
        let sp = satake_g2(&pd)?;
        ok_inv &= sp.is_inversion_closed() && sp.contains_one() && (sp.product() - 1.0).norm() < TOL;
        ok_model &= matches_matrix_model(&sp, &model_matrix_for(&pd)?, TOL);
        n += 1;
    }
    s.check("inversion-closed, contains 1, product 1", ok_inv, format!("{n} parameters"));
    s.check("split places agree with the Q1-inducing computation", ok_cross, "");
    s.check("all parameters agree with the 7x7 matrix model", ok_model, "");
    let k = QuadExt::new(field(5), ExtKind::Unramified);
    let pd = PlaceData::nonsplit_standard(MultChar::unramified(CharField::Ext(k), Ratio::new(1, 2), Ratio::zero()))?;
    let r5 = 5f64.sqrt();
    let i = Complex64::i();
    let literal: Vec<Complex64> =
        vec![1.0.into(), 5.0.into(), 0.2.into(), i * r5, -i * r5, i / r5, -i / r5];
    let model = model_matrix_for(&pd)?;
    let lit_param = crate::packets::poly_from_roots(&literal);
    let cp = crate::packets::char_poly(&model);
    let lit_ok = cp.iter().zip(&lit_param).all(|(a, b)| (a - b).norm() <= TOL * (1.0 + b.norm()));
    let computed: Vec<String> = satake_g2(&pd)?.complex().iter().map(|c| format!("{:.4}{:+.4}i", c.re, c.im)).collect();
    s.literal(
        "q = 5 nonsplit multiset {1, 5, 1/5, +-i sqrt5, +-i/sqrt5} matches the matrix model",
        lit_ok,
        format!("matrix model gives {computed:?}; rho_tau sits in the short-root SL2, so the 3-dim summand is Sym^2(rho_tau)"),
    );
    // the literal multiset is what Sym^2 of the Arthur SL2 would give
    let zero = Complex64::zero();
    let alt = seven_dim_matrix(
        &[[Complex64::new(5f64.powf(-0.5), 0.0), zero], [zero, Complex64::new(r5, 0.0)]],
        &[[zero, Complex64::new(-1.0, 0.0)], [Complex64::new(1.0, 0.0), zero]],
    );
    let alt_cp = crate::packets::char_poly(&alt);
    let swapped = alt_cp.iter().zip(&lit_param).all(|(a, b)| (a - b).norm() <= TOL * (1.0 + b.norm()));
    s.literal("the literal multiset arises only with the two SL2 factors exchanged", swapped, "diagnostic");
    Ok(s)
}

pub fn cubic_suite() -> Result<Suite> {
    let mut s = Suite::new(8, "Binary cubics and orbits");
    let f5 = field(5);
    let d = disc_cubic(&BinaryCubic::from_ints(f5, [1, 0, -1, 0]));
    s.check("disc(x^3 - x y^2) = 4", d.as_rational().is_some_and(|r| *r == BigRational::from_integer(4.into())), d.to_string());
    let mut rng = StdRng::seed_from_u64(SEED + 8);
    let mut ok = true;
    let mut zeros = 0;
    for _ in 0..100 {
        let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-2..=2));
        let cf = BinaryCubic::from_ints(f5, c);
        let z = disc_cubic(&cf).is_zero();
        zeros += usize::from(z);
        ok &= z == has_repeated_factor(&cf);
    }
    s.check("disc vanishes iff resultant vanishes", ok, format!("100 random forms, {zeros} degenerate"));
    let mut cov = true;
    let mut inv = true;
    let q = |n: i64| BigRational::from_integer(n.into());
    for _ in 0..50 {
        let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-5..=5));
        let cf = BinaryCubic::from_ints(f5, c);
        // random element of GL2(Z_5): unit determinant
        let g: [i64; 4] = loop {
            let g: [i64; 4] = std::array::from_fn(|_| rng.random_range(-4..=4));
            if (g[0] * g[3] - g[1] * g[2]).rem_euclid(5) != 0 {
                break g;
            }
        };
        let m = [[q(g[0]), q(g[1])], [q(g[2]), q(g[3])]];
        let det = q(g[0] * g[3] - g[1] * g[2]);
        let moved = cf.act(&m);
        let lhs = disc_cubic(&moved);
        cov &= lhs.as_rational().cloned() == disc_cubic(&cf).as_rational().map(|r| num_traits::pow(det.clone(), 6) * r);
        if !disc_cubic(&cf).is_zero() {
            inv &= etale_class(&cf)? == etale_class(&moved)?;
        }
    }
    s.check("GL2 covariance disc(g f) = det(g)^6 disc(f)", cov, "50 random pairs");
    s.check("etale class constant on GL2(O_F)-orbits", inv, "50 random pairs");
    for kind in ExtKind::all() {
        let k = QuadExt::new(f5, kind);
        let l0 = k.lambda0();
        let mut labels = std::collections::BTreeSet::new();
        let mut consistent = true;
        for n in 1..40i64 {
            for lam in [q(n), q(n) / q(5)] {
                let o = orbit_label(&lam, &k)?;
                consistent &= (o.label == 0) == is_norm(&f5.from_big_rational(lam.clone()), &k)?;
                labels.insert(o.label);
            }
        }
        // representatives exactly as displayed: f0 = diag(0, -1, 0), f1 with lambda0 entries
        let e = |r: BigRational| k.embed(&f5.from_big_rational(r)).to_string();
        let f0 = orbit_label(&q(1), &k)?.representative;
        let want0: Vec<Vec<String>> = vec![vec![e(q(0)), e(q(0)), e(q(0))], vec![e(q(0)), e(q(-1)), e(q(0))], vec![e(q(0)), e(q(0)), e(q(0))]];
        let f1 = orbit_label(&q(l0), &k)?.representative;
        let h = BigRational::new((-1).into(), 2.into());
        let want1: Vec<Vec<String>> = vec![
            vec![e(q(-l0)), e(q(0)), e(h.clone())],
            vec![e(q(0)), e(q(0)), e(q(0))],
            vec![e(h), e(q(0)), e(BigRational::new((-1).into(), (4 * l0).into()))],
        ];
        let _ = orbit_representative;
        s.check(
            &format!("two orbits with f0/f1 attached, {}", kind.name()),
            labels.len() == 2 && consistent && f0 == want0 && f1 == want1,
            format!("labels {labels:?}, lambda0 = {l0}"),
        );
    }
    Ok(s)
}

pub fn determinism_suite() -> Result<Suite> {
    let mut s = Suite::new(9, "Determinism");
    let mut ok = true;
    for (name, sc) in fixtures::catalog()? {
        let r1 = render_fixture(&sc)?;
        let r2 = render_fixture(&Scenario::from_json(&sc.to_json())?)?;
        ok &= r1 == r2;
        if r1 != r2 {
            s.check(&name, false, "reports differ");
        }
    }
    s.check("byte-identical packet reports across repeated runs", ok, "all fixtures");
    Ok(s)
}

fn render_fixture(sc: &Scenario) -> Result<String> {
    let r = sc.resolve()?;
    let out = super::run(&super::Command::Packet, Some(&r));
    match out.error {
        Some(e) => Err(e),
        None => Ok(out.report.expect("report")),
    }
}

pub fn run_one(id: u8) -> Result<Suite> {
    match id {
        1 => hilbert_suite(),
        2 => epsilon_suite(),
        3 => dichotomy_suite(),
        4 => packet_suite(),
        5 => rewrite_suite(),
        6 => g2_suite(),
        7 => satake_suite(),
        8 => cubic_suite(),
        9 => determinism_suite(),
        _ => Err(crate::error::Error::Precondition(format!("no suite {id}; suites are 1..=9"))),
    }
}

pub fn run(only: Option<u8>) -> Result<Vec<Suite>> {
    match only {
        Some(id) => Ok(vec![run_one(id)?]),
        None => (1..=9).map(run_one).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for s in run(None).unwrap() {
            for c in s.checks.iter().filter(|c| !c.passed) {
                eprintln!("suite {} FAIL {}: {}", s.id, c.name, c.detail);
            }
            assert!(s.passed(), "suite {} failed", s.id);
        }
    }

    #[test]
    fn literal_checks_fail_where_expected() {
        assert!(!run_one(2).unwrap().literal_passed());
        let s7 = run_one(7).unwrap();
        assert!(!s7.literal[0].passed);
    }
}
