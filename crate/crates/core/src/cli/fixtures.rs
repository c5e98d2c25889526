//! Scenario catalog shipped with the crate; `DG2_FIXTURES` points at a
//! replacement directory of `*.json` scenarios.

use super::scenario::Scenario;
use crate::error::{Error, Result};

pub const ENV_VAR: &str = "DG2_FIXTURES";

const BUILTIN: &[(&str, &str)] = &[
    ("01_split_p5_trivial", include_str!("../../fixtures/01_split_p5_trivial.json")),
    ("02_split_p7_unram_third", include_str!("../../fixtures/02_split_p7_unram_third.json")),
    ("03_split_p5_legendre", include_str!("../../fixtures/03_split_p5_legendre.json")),
    ("04_split_p11_unram_quarter", include_str!("../../fixtures/04_split_p11_unram_quarter.json")),
    ("05_nonsplit_unram_p5_unramified_chi", include_str!("../../fixtures/05_nonsplit_unram_p5_unramified_chi.json")),
    ("06_nonsplit_unram_p3_unramified_chi", include_str!("../../fixtures/06_nonsplit_unram_p3_unramified_chi.json")),
    ("07_nonsplit_unram_p5_quadratic_ramified_chi", include_str!("../../fixtures/07_nonsplit_unram_p5_quadratic_ramified_chi.json")),
    ("08_nonsplit_unram_p5_not_galois_invariant", include_str!("../../fixtures/08_nonsplit_unram_p5_not_galois_invariant.json")),
    ("09_nonsplit_unram_p7_not_galois_invariant", include_str!("../../fixtures/09_nonsplit_unram_p7_not_galois_invariant.json")),
    ("10_nonsplit_ramified_p_p5_quadratic", include_str!("../../fixtures/10_nonsplit_ramified_p_p5_quadratic.json")),
    ("11_nonsplit_ramified_up_p5_quadratic", include_str!("../../fixtures/11_nonsplit_ramified_up_p5_quadratic.json")),
    ("12_nonsplit_ramified_p_p3_not_galois_invariant", include_str!("../../fixtures/12_nonsplit_ramified_p_p3_not_galois_invariant.json")),
    ("13_nonsplit_ramified_up_p7_not_galois_invariant", include_str!("../../fixtures/13_nonsplit_ramified_up_p7_not_galois_invariant.json")),
    ("14_nonsplit_unram_p11_unramified_chi", include_str!("../../fixtures/14_nonsplit_unram_p11_unramified_chi.json")),
];

/// (name, scenario) pairs in name order.
pub fn catalog() -> Result<Vec<(String, Scenario)>> {
    if let Ok(dir) = std::env::var(ENV_VAR) {
        return load_dir(std::path::Path::new(&dir));
    }
    BUILTIN.iter().map(|(n, t)| Ok((n.to_string(), parse(n, t)?))).collect()
}

fn parse(name: &str, text: &str) -> Result<Scenario> {
    Scenario::from_json(text).map_err(|e| match e {
        Error::Scenario { field, message } => Error::Scenario { field: format!("{name}: {field}"), message },
        other => other,
    })
}

pub fn load_dir(dir: &std::path::Path) -> Result<Vec<(String, Scenario)>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Precondition(format!("fixture directory {}: {e}", dir.display())))?;
    let mut paths: Vec<_> = rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let name = p.file_stem().expect("file").to_string_lossy().to_string();
            let text = std::fs::read_to_string(p).map_err(|e| Error::Precondition(format!("{}: {e}", p.display())))?;
            Ok((name.clone(), parse(&name, &text)?))
        })
        .collect()
}

pub fn find(name: &str) -> Result<Scenario> {
    catalog()?
        .into_iter()
        .find(|(n, _)| n == name || n.split_once('_').is_some_and(|(_, rest)| rest == name))
        .map(|(_, s)| s)
        .ok_or_else(|| Error::Precondition(format!("no fixture named `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_resolve() {
        let c = catalog().unwrap();
        assert!(c.len() >= 12);
        for (n, s) in c {
            s.resolve().unwrap_or_else(|e| panic!("{n}: {e}"));
            assert_eq!(s.name.as_deref(), Some(n.as_str()));
        }
    }
}
