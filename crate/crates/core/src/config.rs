//! Strict config parsing for the command-line front end: TOML with unknown
//! keys rejected, complex parameters accepted as plain floats or [re, im]
//! pairs, documented defaults, and validated ranges.

use crate::dynamics::{PathSegment, Precision, TimePath};
use crate::frobenius::PerturbationCase;
use crate::liepoisson::{ChaplyginE4Coeffs, Dim, KirchhoffModel, PhaseState};
use crate::scalar::{c64, C64};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
}

/// Complex scalar in config files: a bare float or an [re, im] pair.
/// Equality is by value, so a round trip through the pair form is identity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
}

impl CNum {
    pub fn to_c64(self) -> C64 {
        match self {
            CNum::Real(x) => c64(x, 0.0),
            CNum::Pair([re, im]) => c64(re, im),
        }
    }
}

impl PartialEq for CNum {
    fn eq(&self, other: &Self) -> bool {
        self.to_c64() == other.to_c64()
    }
}

impl From<f64> for CNum {
    fn from(x: f64) -> Self {
        CNum::Real(x)
    }
}

fn opt(v: &Option<CNum>) -> C64 {
    v.map(CNum::to_c64).unwrap_or_else(|| c64(0.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Painleve,
    Perturb,
    Monodromy,
    LaxCheck,
    E4Check,
    All,
}

impl Command {
    pub fn label(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Painleve => "painleve",
            Command::Perturb => "perturb",
            Command::Monodromy => "monodromy",
            Command::LaxCheck => "lax-check",
            Command::E4Check => "e4-check",
            Command::All => "all",
        }
    }
}

/// One B_{ijk} coefficient entry for e(4) Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: CNum,
}

/// Model section: a case tag plus the union of the per-case parameters.
/// Unknown keys are rejected; keys that do not belong to the chosen case are
/// rejected during validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a13: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b3: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c3: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1212: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1313: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3434: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1234: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1213: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1214: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1223: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1224: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1334: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1434: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2334: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2434: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c11: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c33: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<BEntry>>,
}

impl ModelConfig {
    fn reject_foreign(&self, case: &str, allowed: &[&str]) -> Result<(), ConfigError> {
        let set = |name: &str, is_set: bool| -> Option<String> {
            if is_set && !allowed.contains(&name) {
                Some(format!("model.{name} is not a parameter of case {case}"))
            } else {
                None
            }
        };
        let checks = [
            set("a1", self.a1.is_some()),
            set("a3", self.a3.is_some()),
            set("a13", self.a13.is_some()),
            set("b1", self.b1.is_some()),
            set("b3", self.b3.is_some()),
            set("c1", self.c1.is_some()),
            set("c3", self.c3.is_some()),
            set("a1212", self.a1212.is_some()),
            set("a1313", self.a1313.is_some()),
            set("a3434", self.a3434.is_some()),
            set("a1234", self.a1234.is_some()),
            set("a1213", self.a1213.is_some()),
            set("a1214", self.a1214.is_some()),
            set("a1223", self.a1223.is_some()),
            set("a1224", self.a1224.is_some()),
            set("a1334", self.a1334.is_some()),
            set("a1434", self.a1434.is_some()),
            set("a2334", self.a2334.is_some()),
            set("a2434", self.a2434.is_some()),
            set("c11", self.c11.is_some()),
            set("c33", self.c33.is_some()),
            set("b", self.b.is_some()),
        ];
        if let Some(msg) = checks.into_iter().flatten().next() {
            return Err(ConfigError::Validation(msg));
        }
        Ok(())
    }

    /// Build and validate the model.
    pub fn build(&self) -> Result<KirchhoffModel, ConfigError> {
        let case = self
            .case
            .as_deref()
            .ok_or_else(|| ConfigError::Validation("model.case required".to_string()))?;
        let model = match case {
            "kirchhoff_e3" => {
                self.reject_foreign(case, &["a1", "a3", "b1", "b3", "c1", "c3"])?;
                KirchhoffModel::kirchhoff_e3(
                    opt(&self.a1),
                    opt(&self.a3),
                    opt(&self.b1),
                    opt(&self.b3),
                    opt(&self.c1),
                    opt(&self.c3),
                )
            }
            "chaplygin_e3" => {
                self.reject_foreign(case, &["a1", "a3", "a13", "b1", "b3", "c1", "c3"])?;
                KirchhoffModel::chaplygin_e3(
                    opt(&self.a1),
                    opt(&self.a3),
                    opt(&self.a13),
                    opt(&self.b1),
                    opt(&self.b3),
                    opt(&self.c1),
                    opt(&self.c3),
                )
            }
            "kirchhoff_e4" => {
                self.reject_foreign(case, &["a1212", "a1313", "a3434", "a1234", "c11", "c33", "b"])?;
                let b: Vec<((usize, usize, usize), C64)> = self
                    .b
                    .as_deref()
                    .unwrap_or(&[])
                    .iter()
                    .map(|e| ((e.i, e.j, e.k), e.value.to_c64()))
                    .collect();
                KirchhoffModel::kirchhoff_e4(
                    opt(&self.a1212),
                    opt(&self.a1313),
                    opt(&self.a3434),
                    opt(&self.a1234),
                    opt(&self.c11),
                    opt(&self.c33),
                    &b,
                )
            }
            "chaplygin_e4" => {
                self.reject_foreign(
                    case,
                    &[
                        "a1212", "a1313", "a3434", "a1234", "a1213", "a1214", "a1223", "a1224",
                        "a1334", "a1434", "a2334", "a2434", "c11", "c33", "b",
                    ],
                )?;
                let mut coeffs = ChaplyginE4Coeffs {
                    a1212: opt(&self.a1212),
                    a1313: opt(&self.a1313),
                    a3434: opt(&self.a3434),
                    a1234: opt(&self.a1234),
                    a1213: opt(&self.a1213),
                    a1214: opt(&self.a1214),
                    a1223: opt(&self.a1223),
                    a1224: opt(&self.a1224),
                    a1334: opt(&self.a1334),
                    a1434: opt(&self.a1434),
                    a2334: opt(&self.a2334),
                    a2434: opt(&self.a2434),
                    c11: opt(&self.c11),
                    c33: opt(&self.c33),
                    ..Default::default()
                };
                for e in self.b.as_deref().unwrap_or(&[]) {
                    let v = e.value.to_c64();
                    match (e.i, e.j, e.k) {
                        (1, 2, 1) => coeffs.b121 = v,
                        (1, 2, 2) => coeffs.b122 = v,
                        (1, 2, 3) => coeffs.b123 = v,
                        (1, 2, 4) => coeffs.b124 = v,
                        (3, 4, 1) => coeffs.b341 = v,
                        (3, 4, 2) => coeffs.b342 = v,
                        (3, 4, 3) => coeffs.b343 = v,
                        (3, 4, 4) => coeffs.b344 = v,
                        other => {
                            return Err(ConfigError::Validation(format!(
                                "chaplygin_e4 B entries are limited to pairs (1,2) and (3,4); got {other:?}"
                            )))
                        }
                    }
                }
                KirchhoffModel::chaplygin_e4(coeffs)
            }
            other => {
                return Err(ConfigError::Validation(format!(
                    "unknown model.case \"{other}\" (expected kirchhoff_e3, chaplygin_e3, kirchhoff_e4 or chaplygin_e4)"
                )))
            }
        };
        model.map_err(|e| ConfigError::Validation(e.to_string()))
    }
}

fn default_tol() -> f64 {
    1e-10
}
fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub precision: Precision,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            tol: default_tol(),
            seed: default_seed(),
            precision: Precision::Double,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Report file path; defaults to <out-dir>/<command>.json.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    /// Directory for CSV trajectories; defaults to the out dir.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PainleveSection {
    #[serde(default = "default_n_starts")]
    pub n_starts: usize,
    #[serde(default = "default_series_order")]
    pub series_order: usize,
}

fn default_n_starts() -> usize {
    500
}
fn default_series_order() -> usize {
    10
}

impl Default for PainleveSection {
    fn default() -> Self {
        PainleveSection {
            n_starts: default_n_starts(),
            series_order: default_series_order(),
        }
    }
}

fn default_alpha() -> CNum {
    CNum::Real(0.6)
}
fn default_beta() -> CNum {
    CNum::Real(0.8)
}
fn default_m31() -> CNum {
    CNum::Real(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    pub which: PerturbationCase,
    #[serde(default = "default_alpha")]
    pub alpha: CNum,
    #[serde(default = "default_beta")]
    pub beta: CNum,
    #[serde(default = "default_m31")]
    pub m3_1: CNum,
}

impl Default for PerturbSection {
    fn default() -> Self {
        PerturbSection {
            which: PerturbationCase::Kirchhoff,
            alpha: default_alpha(),
            beta: default_beta(),
            m3_1: default_m31(),
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromySection {
    #[serde(default)]
    pub which: Option<PerturbationCase>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_alpha")]
    pub alpha: CNum,
    #[serde(default = "default_beta")]
    pub beta: CNum,
    #[serde(default = "default_m31")]
    pub m3_1: CNum,
}

impl Default for MonodromySection {
    fn default() -> Self {
        MonodromySection {
            which: None,
            radius: default_radius(),
            alpha: default_alpha(),
            beta: default_beta(),
            m3_1: default_m31(),
        }
    }
}

/// One path segment in config form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<CNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i8>,
}

impl SegmentConfig {
    pub fn build(&self) -> Result<PathSegment, ConfigError> {
        match self.kind.as_str() {
            "line" => {
                let from = self
                    .from
                    .ok_or_else(|| ConfigError::Validation("line segment needs `from`".into()))?;
                let to = self
                    .to
                    .ok_or_else(|| ConfigError::Validation("line segment needs `to`".into()))?;
                Ok(PathSegment::Line {
                    from: from.to_c64(),
                    to: to.to_c64(),
                })
            }
            "arc" => Ok(PathSegment::Arc {
                center: self.center.map(CNum::to_c64).unwrap_or_else(|| c64(0.0, 0.0)),
                radius: self
                    .radius
                    .ok_or_else(|| ConfigError::Validation("arc segment needs `radius`".into()))?,
                angle_from: self.angle_from.unwrap_or(0.0),
                angle_to: self
                    .angle_to
                    .ok_or_else(|| ConfigError::Validation("arc segment needs `angle_to`".into()))?,
                orientation: self.orientation.unwrap_or(1),
            }),
            other => Err(ConfigError::Validation(format!(
                "unknown segment kind \"{other}\" (expected line or arc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// Initial state, coordinate order per dimension tag.
    pub x0: Vec<CNum>,
    /// Piecewise path; default real interval [0, 1].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<SegmentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_spacing: Option<f64>,
}

impl SimulateSection {
    pub fn initial_state(&self, dim: Dim) -> Result<PhaseState, ConfigError> {
        if self.x0.len() != dim.size() {
            return Err(ConfigError::Validation(format!(
                "simulate.x0 must have {} entries for {}, got {}",
                dim.size(),
                dim,
                self.x0.len()
            )));
        }
        let v = DVector::from_iterator(dim.size(), self.x0.iter().map(|c| c.to_c64()));
        PhaseState::from_vector(dim, v).map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn build_path(&self) -> Result<TimePath, ConfigError> {
        if self.path.is_empty() {
            return TimePath::real_interval(0.0, 1.0)
                .map_err(|e| ConfigError::Validation(e.to_string()));
        }
        let segments: Result<Vec<_>, _> = self.path.iter().map(|s| s.build()).collect();
        TimePath::new(segments?).map_err(|e| ConfigError::Validation(e.to_string()))
    }
}

fn default_lambdas() -> Vec<CNum> {
    vec![CNum::Real(0.7), CNum::Pair([1.0, 1.0]), CNum::Real(-2.0)]
}
fn default_t_final() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaxSection {
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<CNum>,
    /// Start state on the invariant manifold; a deterministic default is used
    /// when omitted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x0: Vec<CNum>,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
}

impl Default for LaxSection {
    fn default() -> Self {
        LaxSection {
            lambdas: default_lambdas(),
            x0: Vec::new(),
            t_final: default_t_final(),
        }
    }
}

fn default_n_points() -> usize {
    1000
}
fn default_n_trajectories() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E4Section {
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_n_trajectories")]
    pub n_trajectories: usize,
    /// B coefficients for the mixed-term witness search; defaults to the four
    /// canonical single-entry tables.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness_b: Vec<BEntry>,
}

impl Default for E4Section {
    fn default() -> Self {
        E4Section {
            n_points: default_n_points(),
            n_trajectories: default_n_trajectories(),
            witness_b: Vec::new(),
        }
    }
}

/// Full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub painleve: Option<PainleveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<MonodromySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lax: Option<LaxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e4: Option<E4Section>,
}

impl RunConfig {
    pub fn model(&self) -> Result<KirchhoffModel, ConfigError> {
        self.model
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("model.case required".to_string()))?
            .build()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1e-14..=1e-3).contains(&self.numeric.tol) {
            return Err(ConfigError::Validation(format!(
                "numeric.tol {:e} outside the documented range [1e-14, 1e-3]",
                self.numeric.tol
            )));
        }
        match self.command {
            Command::All => {}
            Command::Simulate => {
                let model = self.model()?;
                let sim = self.simulate.as_ref().ok_or_else(|| {
                    ConfigError::Validation("simulate section required for command = \"simulate\"".into())
                })?;
                sim.initial_state(model.dim())?;
                sim.build_path()?;
            }
            Command::Perturb => {
                self.model()?;
                if self.perturb.is_none() {
                    return Err(ConfigError::Validation(
                        "perturb section (with `which`) required for command = \"perturb\"".into(),
                    ));
                }
            }
            _ => {
                self.model()?;
            }
        }
        Ok(())
    }
}

/// Parse and fully validate; defaults applied.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("config serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "painleve"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
b3 = 0.1
c1 = 1.0
c3 = 3.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.numeric.tol, 1e-10);
        assert_eq!(cfg.numeric.seed, 42);
        assert_eq!(cfg.numeric.precision, Precision::Double);
        let model = cfg.model().unwrap();
        assert_eq!(model.case().label(), "kirchhoff_e3");
        assert!((model.epsilon() - c64(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn missing_model_case_is_rejected() {
        let bad = r#"
command = "painleve"

[model]
a1 = 1.0
"#;
        let err = parse_config(bad).unwrap_err();
        assert!(err.to_string().contains("model.case required"), "{err}");
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let bad = format!("{MINIMAL}\n[numeric]\ntol = 1e-20\n");
        let err = parse_config(&bad).unwrap_err();
        assert!(err.to_string().contains("1e-14"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\nbogus = 1\n");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Parse(_))));
        let bad2 = MINIMAL.replace("a1 = 1.0", "a1 = 1.0\nwhatever = 2.0");
        assert!(matches!(parse_config(&bad2), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn foreign_case_parameters_are_rejected() {
        let bad = MINIMAL.replace("a1 = 1.0", "a1 = 1.0\na1212 = 1.0");
        let err = parse_config(&bad).unwrap_err();
        assert!(err.to_string().contains("not a parameter"), "{err}");
    }

    #[test]
    fn complex_pairs_accepted() {
        let cfg_text = MINIMAL.replace("b3 = 0.1", "b3 = [0.1, -0.2]");
        let cfg = parse_config(&cfg_text).unwrap();
        let model = cfg.model().unwrap();
        assert!((model.epsilon() - c64(0.1, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn round_trip_identity() {
        let mut cfg = parse_config(MINIMAL).unwrap();
        cfg.perturb = Some(PerturbSection::default());
        cfg.lax = Some(LaxSection::default());
        let text = to_toml(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn kirchhoff_e4_with_b_rejected_by_model_validation() {
        let text = r#"
command = "e4-check"

[model]
case = "kirchhoff_e4"
a1212 = 1.0
a1313 = 1.5
a3434 = 2.0
c11 = 1.0
c33 = 2.0

[[model.b]]
i = 1
j = 2
k = 1
value = 0.5
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("Proposition 1"), "{err}");
    }

    #[test]
    fn simulate_requires_consistent_x0() {
        let text = r#"
command = "simulate"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
c1 = 1.0
c3 = 3.0

[simulate]
x0 = [1.0, 0.0]
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("6 entries"), "{err}");
    }
}
