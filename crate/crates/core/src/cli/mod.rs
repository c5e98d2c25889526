//! Orchestration behind the `dg2` binary: subcommands, JSON reports and exit codes.

pub mod fixtures;
pub mod scenario;
pub mod selftest;

use crate::charlib::{k1_chars, omega_char};
use crate::cubic::{disc_cubic, etale_class, is_generic, orbit_label, BinaryCubic};
use crate::epsilon::{epsilon_half, theta_sign};
use crate::error::{Error, Result};
use crate::g2::{langlands_rewrite, parse_rewrite_input, split_rewrite_check, DEFAULT_REWRITE_INPUT};
use crate::hermitian::{phi2, phi2_prime, phi3, skew_line_with_sign, v1, v1_prime};
use crate::packets::{
    matches_matrix_model, model_matrix_for, packet_report, satake_g2, satake_g2_from_q1_inducing, satake_pu3,
    satake_pu3_from_sigma_plus, pu3_packet, SatakeParam,
};
use crate::padic::{is_norm, ExtKind, PAdicField, QuadExt};
use crate::theta_u::{first_occurrence, u1_dichotomy, Parity, ThetaData};
use num_rational::BigRational;
use scenario::{Canonical, Resolved, Scenario};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub enum Command {
    Classify,
    Epsilon,
    Dichotomy,
    Packet,
    Satake,
    Rewrite { expr: Option<String> },
    Cubic { p: u64, extension: String, coeffs: [String; 4], lambdas: Vec<String> },
    Selftest { suite: Option<u8> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Epsilon => "epsilon",
            Self::Dichotomy => "dichotomy",
            Self::Packet => "packet",
            Self::Satake => "satake",
            Self::Rewrite { .. } => "rewrite",
            Self::Cubic { .. } => "cubic",
            Self::Selftest { .. } => "selftest",
        }
    }

    pub fn needs_scenario(&self) -> bool {
        matches!(self, Self::Classify | Self::Epsilon | Self::Dichotomy | Self::Packet | Self::Satake)
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<&'a Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<&'a Canonical>,
    pub result: Value,
}

pub struct Outcome {
    pub report: Option<String>,
    pub error: Option<Error>,
    pub exit_code: i32,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn need(sc: Option<&Resolved>) -> Result<&Resolved> {
    sc.ok_or_else(|| Error::Precondition("this command needs a scenario (--scenario, --fixture or inline flags)".into()))
}

fn need_ext(sc: &Resolved) -> Result<QuadExt> {
    sc.ext.ok_or_else(|| Error::Precondition("this command needs a nonsplit place".into()))
}

pub fn classify(sc: &Resolved) -> Result<Value> {
    let f = sc.field;
    let chi = &sc.place.chi;
    let mut out = json!({
        "field": {"p": f.p(), "q": f.q(), "u": f.u(), "precision": f.precision()},
    });
    match sc.ext {
        Some(k) => {
            let reps = k.class_reps();
            let norms: Vec<i64> = reps.iter().copied().filter(|&r| is_norm(&f.int(r), &k).unwrap_or(false)).collect();
            out["extension"] = json!({
                "kind": k.kind().name(),
                "d": k.d(),
                "e": k.e(),
                "f": k.f(),
                "lambda0": k.lambda0(),
                "square_classes": reps,
                "norm_classes": norms,
                "norm_index": reps.len() / norms.len().max(1),
            });
            out["hermitian"] = json!({
                "V1": v1(&k).summary(),
                "V1'": v1_prime(&k).summary(),
                "Phi2": phi2(&k).summary(),
                "Phi2'": phi2_prime(&k).summary(),
                "Phi3": phi3(&k).summary(),
            });
            out["omega"] = to_value(&omega_char(&k)?);
            out["chi"] = json!({
                "character": chi,
                "conjugate_symplectic": chi.is_conjugate_symplectic()?,
                "galois_invariant": chi.is_galois_invariant()?,
                "chi_squared_trivial": chi.chi_squared_trivial()?,
                "order": chi.order(),
                "at_minus_one": crate::charlib::fmt_ratio(&chi.at_minus_one()?),
            });
        }
        None => {
            out["chi_w"] = json!({
                "character": chi,
                "order": chi.order(),
                "at_minus_one": crate::charlib::fmt_ratio(&chi.at_minus_one()?),
            });
        }
    }
    Ok(out)
}

pub fn epsilon(sc: &Resolved) -> Result<Value> {
    let pd = &sc.place;
    match sc.ext {
        Some(k) => {
            let delta = pd.delta.clone().expect("nonsplit");
            let psi_k = pd.psi.compose_trace(&k, &delta)?;
            let e = epsilon_half(&pd.chi, &psi_k)?;
            let signs = k1_chars(&k)?
                .iter()
                .map(|mu| Ok(json!({"mu": mu, "theta_sign": theta_sign(&pd.chi, mu, &pd.psi, &delta)?})))
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({"psi_K": "x -> psi(Tr(-delta x))", "epsilon_chi": e, "theta_signs": signs}))
        }
        None => Ok(json!({"epsilon_chi_w": epsilon_half(&pd.chi, &pd.psi)?})),
    }
}

pub fn dichotomy(sc: &Resolved) -> Result<Value> {
    let k = need_ext(sc)?;
    let pd = &sc.place;
    let data = ThetaData::new(pd.chi.clone(), pd.psi.clone(), pd.delta.clone().expect("nonsplit"))?;
    let w = skew_line_with_sign(&k, 1);
    let rows = k1_chars(&k)?
        .iter()
        .map(|mu| {
            Ok(json!({
                "mu": mu,
                "theta_sign": data.sign(mu)?,
                "lift_to_V1": u1_dichotomy(mu, &v1(&k), &w, &data)?,
                "lift_to_V1'": u1_dichotomy(mu, &v1_prime(&k), &w, &data)?,
                "first_occurrence_odd": first_occurrence(mu, Parity::Odd, &w, &data)?,
                "first_occurrence_even": first_occurrence(mu, Parity::Even, &w, &data)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"W": w.summary(), "characters": rows}))
}

pub fn packet(sc: &Resolved) -> Result<Value> {
    Ok(to_value(&packet_report(&sc.place)?))
}

fn satake_checks(s: &SatakeParam) -> Value {
    json!({
        "inversion_closed": s.is_inversion_closed(),
        "contains_one": s.contains_one(),
        "product_minus_one": (s.product() - 1.0).norm(),
    })
}

pub fn satake(sc: &Resolved) -> Result<Value> {
    let pd = &sc.place;
    let pu3 = satake_pu3(pd)?;
    let g2 = satake_g2(pd)?;
    let model = matches_matrix_model(&g2, &model_matrix_for(pd)?, 1e-9);
    let cross = if pd.is_split() {
        json!({"from_q1_inducing": satake_g2_from_q1_inducing(pd)? == g2})
    } else {
        let sp = pu3_packet(pd)?;
        json!({"pu3_from_sigma_plus": satake_pu3_from_sigma_plus(pd, &sp[0].theta)? == pu3})
    };
    Ok(json!({
        "pu3": pu3,
        "g2": g2,
        "g2_checks": satake_checks(&g2),
        "matrix_model_agrees": model,
        "cross_check": cross,
    }))
}

pub fn rewrite(expr: Option<&str>) -> Result<Value> {
    let text = expr.unwrap_or(DEFAULT_REWRITE_INPUT);
    let inp = parse_rewrite_input(text)?;
    let alg = &inp.algebra;
    let r = langlands_rewrite(alg, &inp.descriptor)?;
    let result = match &r.result.levi {
        crate::g2::LeviData::Det(eta) => format!("i_{:?}({} o det)", r.result.source, alg.render(eta)),
        crate::g2::LeviData::Pair(a, b) => format!("i_{:?}({}, {})", r.result.source, alg.render(a), alg.render(b)),
        crate::g2::LeviData::Torus(t) => format!("i_B{}", alg.render_torus(t)),
    };
    let split = match alg.names().first() {
        Some(n) => Some(split_rewrite_check(alg, &alg.sym(n)?)?),
        None => None,
    };
    Ok(json!({
        "input": text,
        "alphabet": alg.names(),
        "relations": alg.relation_rows(),
        "steps": r.steps,
        "all_verified": r.all_verified(),
        "tags": r.tags,
        "result": result,
        "split_torus_identity": split,
    }))
}

pub fn cubic(p: u64, extension: &str, coeffs: &[String; 4], lambdas: &[String]) -> Result<Value> {
    let f = PAdicField::with_default_precision(p)?;
    let k = QuadExt::new(f, ExtKind::parse(extension)?);
    let rat = |s: &str| -> Result<BigRational> {
        let r = crate::charlib::parse_ratio(s)?;
        Ok(BigRational::new((*r.numer()).into(), (*r.denom()).into()))
    };
    let c = [rat(&coeffs[0])?, rat(&coeffs[1])?, rat(&coeffs[2])?, rat(&coeffs[3])?];
    let form = BinaryCubic::new(f, c);
    let d = disc_cubic(&form);
    let generic = is_generic(&form);
    let class = match &generic {
        Ok(true) => to_value(&etale_class(&form)?),
        Ok(false) => Value::Null,
        Err(e) => json!({"error": e.to_string()}),
    };
    let default_l = ["1".to_string(), k.lambda0().to_string(), p.to_string(), f.u().to_string()];
    let ls = if lambdas.is_empty() { &default_l[..] } else { lambdas };
    let demos = ls
        .iter()
        .map(|l| {
            let o = orbit_label(&rat(l)?, &k)?;
            Ok(json!({"lambda": l, "label": o.label, "stabilizer": o.stabilizer, "representative": o.representative}))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "form": coeffs,
        "disc": d.to_string(),
        "disc_valuation": d.valuation(),
        "generic": generic.as_ref().ok(),
        "class": class,
        "extension": k.kind().name(),
        "orbit_demos": demos,
    }))
}

pub fn execute(cmd: &Command, sc: Option<&Resolved>) -> Result<Value> {
    match cmd {
        Command::Classify => classify(need(sc)?),
        Command::Epsilon => epsilon(need(sc)?),
        Command::Dichotomy => dichotomy(need(sc)?),
        Command::Packet => packet(need(sc)?),
        Command::Satake => satake(need(sc)?),
        Command::Rewrite { expr } => rewrite(expr.as_deref()),
        Command::Cubic { p, extension, coeffs, lambdas } => cubic(*p, extension, coeffs, lambdas),
        Command::Selftest { suite } => {
            let suites = selftest::run(*suite)?;
            let ok = suites.iter().all(|s| s.passed());
            let v = json!({"passed": ok, "suites": suites});
            if ok {
                Ok(v)
            } else {
                Err(Error::Internal(format!("selftest failed: {}", serde_json::to_string(&v).expect("json"))))
            }
        }
    }
}

/// Run a command and render the report; exit code 0, 1 (domain) or 2 (internal).
pub fn run(cmd: &Command, sc: Option<&Resolved>) -> Outcome {
    match execute(cmd, sc) {
        Ok(result) => {
            let rep = Report {
                version: VERSION,
                command: cmd.name(),
                scenario: sc.map(|s| &s.scenario),
                canonical: sc.map(|s| &s.canonical),
                result,
            };
            Outcome { report: Some(serde_json::to_string_pretty(&rep).expect("json")), error: None, exit_code: 0 }
        }
        Err(e) => {
            let code = if e.is_internal() { 2 } else { 1 };
            Outcome { report: None, error: Some(e), exit_code: code }
        }
    }
}

/// Flatten a report into `path: value` lines for terminal output.
pub fn render_text(v: &Value) -> String {
    fn walk(v: &Value, path: &str, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    walk(x, &p, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, &format!("{path}[{i}]"), out);
                }
            }
            _ => out.push(format!("{path}: {v}")),
        }
    }
    let mut out = vec![];
    walk(v, "", &mut out);
    out.join("\n")
}
