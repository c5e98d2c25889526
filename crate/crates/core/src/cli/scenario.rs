//! Scenario files: typed parsing with field-level diagnostics, semantic
//! validation, and resolution into place data plus the canonical choices.

use crate::charlib::{conjugate_symplectic_chars, fmt_ratio, generator_description, parse_ratio, AddChar, CharField, MultChar};
use crate::error::{Error, Result};
use crate::packets::PlaceData;
use crate::padic::{is_norm, ExtKind, PAdicField, QuadExt, DEFAULT_PRECISION};
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub const COMPUTATIONS: [&str; 5] = ["classify", "epsilon", "dichotomy", "packet", "satake"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Split,
    Nonsplit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChiSpec {
    Trivial,
    /// Unramified with chi(uniformizer) = e(z).
    Unramified { uniformizer_value: String },
    Explicit {
        conductor: u32,
        #[serde(default)]
        unit_images: Vec<String>,
        uniformizer_value: String,
    },
    /// Entry `index` of the conjugate-symplectic characters of conductor <= 1.
    ConjugateSymplectic { index: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    /// delta = c * sqrt(d).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<i64>,
}

/// Regression expectations shipped with fixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub s_group_pu3: u8,
    pub s_group_g2: u8,
    pub g2_members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u64,
    pub place: PlaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<String>,
    pub chi: ChiSpec,
    #[serde(default)]
    pub psi_level: i64,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub computations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

// Tagged enums buffer their content, which hides the path inside `chi`;
// re-run the failing variant alone to recover it.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct UnramifiedFields {
    kind: String,
    uniformizer_value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct ExplicitFields {
    kind: String,
    conductor: u32,
    #[serde(default)]
    unit_images: Vec<String>,
    uniformizer_value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct ConjugateSymplecticFields {
    kind: String,
    index: usize,
}

fn refine_chi_error(text: &str) -> Option<Error> {
    fn probe<T: for<'de> Deserialize<'de>>(v: &serde_json::Value) -> Option<Error> {
        let s = v.to_string();
        let de = &mut serde_json::Deserializer::from_str(&s);
        serde_path_to_error::deserialize::<_, T>(de).err().map(|e| {
            let inner = e.path().to_string();
            let field = if inner.is_empty() || inner == "." { "chi".to_string() } else { format!("chi.{inner}") };
            let msg = e.into_inner().to_string();
            // positions refer to the re-serialized fragment
            let msg = msg.split(" at line ").next().unwrap_or_default().to_string();
            bad(&field, msg)
        })
    }
    let root: serde_json::Value = serde_json::from_str(text).ok()?;
    let chi = root.get("chi")?;
    match chi.get("kind")?.as_str()? {
        "unramified" => probe::<UnramifiedFields>(chi),
        "explicit" => probe::<ExplicitFields>(chi),
        "conjugate_symplectic" => probe::<ConjugateSymplecticFields>(chi),
        _ => None,
    }
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

fn bad(field: &str, message: impl Into<String>) -> Error {
    Error::Scenario { field: field.into(), message: message.into() }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "chi" {
                if let Some(inner) = refine_chi_error(text) {
                    return inner;
                }
            }
            bad(if path.is_empty() || path == "." { "<root>" } else { &path }, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Semantic checks and resolution.
    pub fn resolve(&self) -> Result<Resolved> {
        let precision = self.overrides.precision.unwrap_or(DEFAULT_PRECISION);
        if !(4..=256).contains(&precision) {
            return Err(bad("overrides.precision", "must lie in 4..=256"));
        }
        let field = PAdicField::new(self.p, precision).map_err(|e| bad("p", e.to_string()))?;
        for c in &self.computations {
            if !COMPUTATIONS.contains(&c.as_str()) {
                return Err(bad("computations", format!("unknown computation `{c}`")));
            }
        }
        if !(-3..=3).contains(&self.psi_level) {
            return Err(bad("psi_level", "must lie in -3..=3"));
        }
        let psi = AddChar::standard(field, self.psi_level);
        let (ext, place) = match self.place {
            PlaceKind::Split => {
                if self.extension.is_some() {
                    return Err(bad("extension", "a split place has no extension"));
                }
                if self.overrides.delta.is_some() || self.overrides.lambda0.is_some() {
                    return Err(bad("overrides", "delta and lambda0 only apply at nonsplit places"));
                }
                let chi = self.chi_for(CharField::Base(field), None)?;
                (None, PlaceData::split(chi, psi).map_err(|e| bad("chi", e.to_string()))?)
            }
            PlaceKind::Nonsplit => {
                let name = self.extension.as_deref().ok_or_else(|| bad("extension", "required at a nonsplit place"))?;
                let kind = ExtKind::parse(name).map_err(|e| bad("extension", e.to_string()))?;
                let k = QuadExt::new(field, kind);
                let chi = self.chi_for(CharField::Ext(k), Some(&k))?;
                let delta = match self.overrides.delta {
                    None => k.delta(),
                    Some(0) => return Err(bad("overrides.delta", "must be nonzero")),
                    Some(c) => k.delta().scale(&field.int(c))?,
                };
                if let Some(l) = self.overrides.lambda0 {
                    if l == 0 || is_norm(&field.int(l), &k)? {
                        return Err(bad("overrides.lambda0", format!("{l} is a norm from K; lambda0 must not be")));
                    }
                }
                (Some(k), PlaceData::nonsplit(chi, psi, delta).map_err(|e| bad("chi", e.to_string()))?)
            }
        };
        let canonical = Canonical::new(&place, ext.as_ref(), self.overrides.lambda0)?;
        Ok(Resolved { scenario: self.clone(), field, ext, place, canonical })
    }

    fn chi_for(&self, fld: CharField, k: Option<&QuadExt>) -> Result<MultChar> {
        let turn = |s: &str, f: &str| parse_ratio(s).map_err(|e| bad(f, e.to_string()));
        match &self.chi {
            ChiSpec::Trivial => Ok(MultChar::trivial(fld)),
            ChiSpec::Unramified { uniformizer_value } => {
                Ok(MultChar::unramified(fld, turn(uniformizer_value, "chi.uniformizer_value")?, Ratio::zero()))
            }
            ChiSpec::Explicit { conductor, unit_images, uniformizer_value } => {
                let imgs = unit_images
                    .iter()
                    .enumerate()
                    .map(|(i, s)| turn(s, &format!("chi.unit_images[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                MultChar::from_images(fld, *conductor, imgs, turn(uniformizer_value, "chi.uniformizer_value")?, Ratio::zero())
                    .map_err(|e| bad("chi", e.to_string()))
            }
            ChiSpec::ConjugateSymplectic { index } => {
                let k = k.ok_or_else(|| bad("chi.kind", "conjugate_symplectic needs a nonsplit place"))?;
                let all = conjugate_symplectic_chars(k)?;
                all.get(*index)
                    .cloned()
                    .ok_or_else(|| bad("chi.index", format!("only {} conjugate-symplectic characters of conductor <= 1", all.len())))
            }
        }
    }

    /// Scenario from command-line flags.
    pub fn inline(p: u64, extension: Option<&str>, chi_index: Option<usize>, chi_z: Option<&str>, psi_level: i64) -> Self {
        let (place, chi) = match extension {
            Some(_) => (PlaceKind::Nonsplit, ChiSpec::ConjugateSymplectic { index: chi_index.unwrap_or(0) }),
            None => (
                PlaceKind::Split,
                match chi_z {
                    Some(z) => ChiSpec::Unramified { uniformizer_value: z.to_string() },
                    None => ChiSpec::Trivial,
                },
            ),
        };
        Self {
            name: None,
            p,
            place,
            extension: extension.map(String::from),
            chi,
            psi_level,
            overrides: Overrides::default(),
            computations: vec![],
            expect: None,
        }
    }
}

/// Every convention fixed by the implementation, echoed in reports.
#[derive(Clone, Debug, Serialize)]
pub struct Canonical {
    pub u: u64,
    pub d: Option<i64>,
    pub delta: Option<String>,
    pub lambda0: Option<i64>,
    pub lambda0_override: Option<i64>,
    pub uniformizer: String,
    pub psi: String,
    pub unit_generators: Vec<String>,
    pub tie_breaks: Vec<&'static str>,
}

impl Canonical {
    fn new(pd: &PlaceData, k: Option<&QuadExt>, lambda0_override: Option<i64>) -> Result<Self> {
        let f = pd.base;
        let level = pd.chi.conductor().max(1);
        Ok(Self {
            u: f.u(),
            d: k.map(|k| k.d()),
            delta: pd.delta.as_ref().map(|d| d.to_string()),
            lambda0: k.map(|k| k.lambda0()),
            lambda0_override,
            uniformizer: match k {
                Some(k) => k.uniformizer().to_string(),
                None => f.p().to_string(),
            },
            psi: format!("x -> e({{x / p^{}}})", pd.psi.level()),
            unit_generators: generator_description(pd.chi.field(), level)?,
            tie_breaks: vec![
                "u = smallest quadratic non-residue mod p",
                "lambda0 = first non-norm among u, p, up",
                "norm descent: candidate with value at the primitive root in [0, 1/2), then smaller uniformizer value",
                "W+ = skew line with eps(V)eps(W) equal to the theta sign for the trivial character",
                "Langlands rewrite: breadth-first, Q2 reading before Q1",
            ],
        })
    }
}

#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub field: PAdicField,
    pub ext: Option<QuadExt>,
    pub place: PlaceData,
    pub canonical: Canonical,
}

impl Resolved {
    pub fn chi_summary(&self) -> String {
        let c = &self.place.chi;
        format!("conductor {}, z = {}", c.conductor(), fmt_ratio(&c.uniformizer_value()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_level_errors() {
        let e = Scenario::from_json(r#"{"p": 5, "place": "nonsplit", "chi": {"kind": "trivial"}, "bogus": 1}"#).unwrap_err();
        assert!(matches!(e, Error::Scenario { .. }), "{e}");
        let e = Scenario::from_json(r#"{"p": "five", "place": "split", "chi": {"kind": "trivial"}}"#).unwrap_err();
        let Error::Scenario { field, .. } = e else { panic!() };
        assert_eq!(field, "p");
        let e = Scenario::from_json(r#"{"p": 5, "place": "split", "chi": {"kind": "explicit", "conductor": 1}}"#).unwrap_err();
        let Error::Scenario { field, .. } = e else { panic!() };
        assert_eq!(field, "chi");
        let s = Scenario::from_json(r#"{"p": 5, "place": "nonsplit", "chi": {"kind": "trivial"}}"#).unwrap();
        let Error::Scenario { field, .. } = s.resolve().unwrap_err() else { panic!() };
        assert_eq!(field, "extension");
        let s = Scenario::from_json(r#"{"p": 9, "place": "split", "chi": {"kind": "trivial"}}"#).unwrap();
        assert!(s.resolve().is_err());
        // trivial chi is not conjugate-symplectic
        let s = Scenario::from_json(r#"{"p": 5, "place": "nonsplit", "extension": "unramified", "chi": {"kind": "trivial"}}"#).unwrap();
        let Error::Scenario { field, .. } = s.resolve().unwrap_err() else { panic!() };
        assert_eq!(field, "chi");
        let s = Scenario::from_json(
            r#"{"p": 5, "place": "nonsplit", "extension": "unramified", "chi": {"kind": "conjugate_symplectic", "index": 0}, "overrides": {"lambda0": 1}}"#,
        )
        .unwrap();
        assert!(s.resolve().is_err());
    }

    #[test]
    fn round_trip() {
        let s = Scenario::inline(7, Some("ramified-up"), Some(1), None, 0);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        let r = back.resolve().unwrap();
        assert_eq!(r.canonical.lambda0, Some(r.ext.unwrap().lambda0()));
    }
}
