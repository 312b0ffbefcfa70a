//! Run configuration: strict-schema JSON (canonical) with TOML accepted as
//! sugar, plus the canonical SHA-256 digest used for report provenance.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    VerifySoliton,
    VerifyBase,
    BuildWarped,
    MuCheck,
    Ode,
    ObstructionChain,
    ObstructionNoMinimum,
    ObstructionTorus,
    ObstructionGeodesic,
    Suite,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::VerifySoliton => "verify-soliton",
            Task::VerifyBase => "verify-base",
            Task::BuildWarped => "build-warped",
            Task::MuCheck => "mu-check",
            Task::Ode => "ode",
            Task::ObstructionChain => "obstruction-chain",
            Task::ObstructionNoMinimum => "obstruction-no-minimum",
            Task::ObstructionTorus => "obstruction-torus",
            Task::ObstructionGeodesic => "obstruction-geodesic",
            Task::Suite => "suite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    Flat,
    Sphere,
    Hyperbolic,
    Torus,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[f64; 2]>>,
    /// Upper-triangle metric component expressions for `custom` charts:
    /// g_11, g_12, ..., g_1n, g_22, ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FieldsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConstantsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl ConstantsSpec {
    /// Named bindings usable inside field expressions.
    pub fn bindings(&self) -> BTreeMap<String, f64> {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        put("lambda", self.lambda);
        put("m", self.m);
        put("mu", self.mu);
        put("c1", self.c1);
        put("c2", self.c2);
        put("b", self.b);
        put("r", self.r);
        put("tau", self.tau);
        put("c", self.c);
        if let Some(a) = &self.a {
            for (i, v) in a.iter().enumerate() {
                map.insert(format!("a{}", i + 1), *v);
            }
        }
        map
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SampleSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_count() -> usize {
    50
}
fn default_margin() -> f64 {
    0.05
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: default_count(),
            seed: 0,
            margin: default_margin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TolerancesSpec {
    #[serde(default = "default_tol")]
    pub tensor: f64,
    #[serde(default = "default_tol")]
    pub constancy: f64,
}

fn default_tol() -> f64 {
    1e-6
}

impl Default for TolerancesSpec {
    fn default() -> Self {
        TolerancesSpec {
            tensor: default_tol(),
            constancy: default_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OdeSpec {
    pub lambda: f64,
    pub m: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    pub f0: f64,
    pub f0_prime: f64,
    pub interval: [f64; 2],
    pub dt: f64,
}

fn default_rho() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TorusSpec {
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GeodesicsSpec {
    pub starts: Vec<Vec<f64>>,
    pub directions: Vec<Vec<f64>>,
    pub total: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesics: Option<GeodesicsSpec>,
}

impl RunConfig {
    pub fn sample(&self) -> SampleSpec {
        self.sample.unwrap_or_default()
    }

    pub fn tolerances(&self) -> TolerancesSpec {
        self.tolerances.unwrap_or_default()
    }

    /// SHA-256 of the canonical (sorted-key) JSON form.
    pub fn digest(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("canonical json");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse a config document. Files ending in `.toml` are read as TOML;
/// everything else as JSON. Unknown keys are rejected either way.
pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig, String> {
    let is_toml = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("toml"))
        .unwrap_or(false);
    if is_toml {
        toml::from_str(text).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        serde_json::from_str(text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_digest_stability() {
        let text = r#"{
            "task": "verify-soliton",
            "chart": {"kind": "flat", "dim": 2},
            "fields": {"psi": "norm2(x)/2"},
            "constants": {"lambda": 1.0},
            "sample": {"count": 10, "seed": 3, "margin": 0.05}
        }"#;
        let cfg = parse_config(text, Path::new("c.json")).unwrap();
        assert_eq!(cfg.task, Task::VerifySoliton);
        let d1 = cfg.digest();
        let d2 = cfg.clone().digest();
        assert_eq!(d1, d2);
        assert_eq!(d1.len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected_and_named() {
        let text = r#"{"task": "mu-check", "chartt": {}}"#;
        let err = parse_config(text, Path::new("c.json")).unwrap_err();
        assert!(err.contains("chartt"), "{err}");

        let nested = r#"{"task": "mu-check", "sample": {"count": 3, "sead": 1}}"#;
        let err = parse_config(nested, Path::new("c.json")).unwrap_err();
        assert!(err.contains("sead"), "{err}");
    }

    #[test]
    fn toml_sugar_parses() {
        let text = r#"
            task = "ode"

            [ode]
            lambda = -4.0
            m = 4.0
            f0 = 2.0
            f0-prime = 0.0
            interval = [0.0, 1.0]
            dt = 0.001
        "#;
        let cfg = parse_config(text, Path::new("c.toml")).unwrap();
        assert_eq!(cfg.task, Task::Ode);
        assert_eq!(cfg.ode.unwrap().rho, 1.0);
    }

    #[test]
    fn constants_bind_vector_components() {
        let c = ConstantsSpec {
            lambda: Some(-2.0),
            a: Some(vec![0.5, -0.25]),
            ..Default::default()
        };
        let b = c.bindings();
        assert_eq!(b["lambda"], -2.0);
        assert_eq!(b["a1"], 0.5);
        assert_eq!(b["a2"], -0.25);
    }
}
