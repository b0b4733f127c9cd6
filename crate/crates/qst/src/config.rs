//! Scenario configuration: a flat TOML document.
//!
//! ```toml
//! mode = "compare"
//! M = 3
//! N = 45          # or a list for sweep mode: N = [1, 5, 10]
//! lambda = 50.0
//! t_max = 10.0
//! num_points = 1001
//! ```
//!
//! Optional keys and defaults: `omega0 = 1`, `p = 0.5`, `gamma0 = 1`,
//! `lambda = 50`, `N = 1`, `t_max = 10`, `num_points = 1001`, `dt = 1e-4`,
//! `kernel_variant = "eq33"`, `output` (unset: write to stdout).

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use qst_core::KernelVariant;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Closed,
    Open,
    Oracle,
    Compare,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelChoice {
    #[default]
    Eq33,
    Residue,
}

impl From<KernelChoice> for KernelVariant {
    fn from(choice: KernelChoice) -> Self {
        match choice {
            KernelChoice::Eq33 => KernelVariant::Analytic,
            KernelChoice::Residue => KernelVariant::Residue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ChainCount {
    One(i64),
    Many(Vec<i64>),
}

/// Document as written, before range checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Mode,
    #[serde(rename = "M")]
    sites: i64,
    #[serde(default = "one")]
    omega0: f64,
    #[serde(default = "half")]
    p: f64,
    #[serde(default = "one")]
    gamma0: f64,
    #[serde(default = "default_lambda")]
    lambda: f64,
    #[serde(rename = "N", default = "single_chain")]
    chains: ChainCount,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "default_points")]
    num_points: i64,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default)]
    kernel_variant: KernelChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_lambda() -> f64 {
    50.0
}
fn single_chain() -> ChainCount {
    ChainCount::One(1)
}
fn default_t_max() -> f64 {
    10.0
}
fn default_points() -> i64 {
    1001
}
fn default_dt() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub sites: usize,
    pub omega0: f64,
    pub p: f64,
    pub gamma0: f64,
    pub lambda: f64,
    /// One entry except in sweep mode.
    pub chains: Vec<usize>,
    pub t_max: f64,
    pub num_points: usize,
    pub dt: f64,
    pub kernel_variant: KernelChoice,
    pub output: Option<String>,
}

fn positive(field: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(
            field,
            format!("{field} must be > 0, got {value}"),
        ))
    }
}

impl ScenarioConfig {
    fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        if raw.sites < 2 {
            return Err(CliError::validation("M", "M must be ≥ 2"));
        }
        positive("omega0", raw.omega0)?;
        if !(raw.p > 0.0 && raw.p < 1.0) {
            return Err(CliError::validation("p", "p must lie in (0, 1)"));
        }
        positive("gamma0", raw.gamma0)?;
        positive("lambda", raw.lambda)?;
        positive("t_max", raw.t_max)?;
        positive("dt", raw.dt)?;
        if raw.num_points < 2 {
            return Err(CliError::validation("num_points", "num_points must be ≥ 2"));
        }
        let chains = match raw.chains {
            ChainCount::One(n) => vec![n],
            ChainCount::Many(list) => list,
        };
        if chains.is_empty() {
            return Err(CliError::validation("N", "N list is empty"));
        }
        if chains.iter().any(|&n| n < 1) {
            return Err(CliError::validation("N", "N must be ≥ 1"));
        }
        if raw.mode != Mode::Sweep && chains.len() > 1 {
            return Err(CliError::validation(
                "N",
                "a list of N values needs mode = \"sweep\"",
            ));
        }
        Ok(ScenarioConfig {
            mode: raw.mode,
            sites: raw.sites as usize,
            omega0: raw.omega0,
            p: raw.p,
            gamma0: raw.gamma0,
            lambda: raw.lambda,
            chains: chains.into_iter().map(|n| n as usize).collect(),
            t_max: raw.t_max,
            num_points: raw.num_points as usize,
            dt: raw.dt,
            kernel_variant: raw.kernel_variant,
            output: raw.output,
        })
    }

    fn to_raw(&self) -> RawConfig {
        let chains = match self.chains.as_slice() {
            [n] if self.mode != Mode::Sweep => ChainCount::One(*n as i64),
            list => ChainCount::Many(list.iter().map(|&n| n as i64).collect()),
        };
        RawConfig {
            mode: self.mode,
            sites: self.sites as i64,
            omega0: self.omega0,
            p: self.p,
            gamma0: self.gamma0,
            lambda: self.lambda,
            chains,
            t_max: self.t_max,
            num_points: self.num_points as i64,
            dt: self.dt,
            kernel_variant: self.kernel_variant,
            output: self.output.clone(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    parse_config_with(text, None, &[])
}

/// Parse, then apply a mode override and `key=value` overrides before
/// validating. Override values are read as TOML, falling back to a string.
pub fn parse_config_with(
    text: &str,
    mode: Option<Mode>,
    overrides: &[(String, String)],
) -> Result<ScenarioConfig, CliError> {
    let mut table: Table = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if let Some(mode) = mode {
        table.insert(
            "mode".into(),
            Value::try_from(mode).expect("mode serializes"),
        );
    }
    for (key, raw) in overrides {
        let value = toml::from_str::<Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.clone()));
        table.insert(key.clone(), value);
    }
    if !table.contains_key("mode") {
        return Err(CliError::validation("mode", "mode is required"));
    }
    if !table.contains_key("M") {
        return Err(CliError::validation("M", "M is required"));
    }
    let raw: RawConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    ScenarioConfig::from_raw(raw)
}

pub fn serialize_config(config: &ScenarioConfig) -> String {
    toml::to_string(&config.to_raw()).expect("config serializes")
}

/// Split `key=value`.
pub fn parse_override(arg: &str) -> Result<(String, String), CliError> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::validation(
            "--set",
            format!("expected key=value, got `{arg}`"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Validation { field, .. } => field,
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("mode = \"closed\"\nM = 2\nt_max = 3.2\nnum_points = 321\n").unwrap();
        assert_eq!(c.mode, Mode::Closed);
        assert_eq!((c.sites, c.num_points, c.t_max), (2, 321, 3.2));
        assert_eq!((c.p, c.gamma0, c.omega0, c.lambda), (0.5, 1.0, 1.0, 50.0));
        assert_eq!(c.kernel_variant, KernelChoice::Eq33);
        assert_eq!(c.chains, vec![1]);
        assert_eq!(c.dt, 1e-4);
        assert_eq!(c.output, None);
    }

    #[test]
    fn single_site_is_rejected() {
        let err = parse_config("mode = \"closed\"\nM = 1\n").unwrap_err();
        assert_eq!(err.to_string(), "invalid M: M must be ≥ 2");
    }

    #[test]
    fn protection_study_config_is_accepted() {
        let c = parse_config("mode = \"open\"\nM = 2\nN = 50\nlambda = 50\n").unwrap();
        assert_eq!(c.chains, vec![50]);
        assert_eq!(c.lambda, 50.0);
    }

    #[test]
    fn invalid_fields_are_named() {
        let base = "mode = \"open\"\nM = 3\n";
        for (extra, field) in [
            ("N = 0", "N"),
            ("N = [1, 2]", "N"),
            ("lambda = -1.0", "lambda"),
            ("gamma0 = 0.0", "gamma0"),
            ("p = 1.0", "p"),
            ("num_points = 1", "num_points"),
            ("t_max = 0.0", "t_max"),
            ("dt = 0.0", "dt"),
            ("omega0 = -1.0", "omega0"),
        ] {
            let err = parse_config(&format!("{base}{extra}\n")).unwrap_err();
            assert_eq!(field_of(err), field, "{extra}");
        }
        assert_eq!(field_of(parse_config("M = 3\n").unwrap_err()), "mode");
    }

    #[test]
    fn malformed_documents_report_location() {
        let err = parse_config("mode = \"open\"\nM = = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_config("mode = \"open\"\nM = 3\nlambada = 2.0\n").unwrap_err();
        assert!(err.to_string().contains("lambada"), "{err}");
        let err = parse_config("mode = \"fast\"\nM = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
    }

    #[test]
    fn round_trip() {
        for text in [
            "mode = \"closed\"\nM = 2\nt_max = 3.2\nnum_points = 321\n",
            "mode = \"sweep\"\nM = 2\nN = [1, 5, 10, 25, 50]\nlambda = 12.5\n",
            "mode = \"sweep\"\nM = 3\nN = [7]\n",
            "mode = \"compare\"\nM = 4\nN = 40\np = 0.3\ndt = 2.5e-5\nkernel_variant = \"residue\"\noutput = \"out/a.csv\"\nomega0 = 0.1\n",
        ] {
            let c = parse_config(text).unwrap();
            assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
        }
    }

    #[test]
    fn overrides_and_mode() {
        let overrides = vec![
            parse_override("N=[1,2,3]").unwrap(),
            parse_override("lambda = 5").unwrap(),
            parse_override("kernel_variant=residue").unwrap(),
        ];
        let c =
            parse_config_with("mode = \"open\"\nM = 3\n", Some(Mode::Sweep), &overrides).unwrap();
        assert_eq!(c.mode, Mode::Sweep);
        assert_eq!(c.chains, vec![1, 2, 3]);
        assert_eq!(c.lambda, 5.0);
        assert_eq!(c.kernel_variant, KernelChoice::Residue);
        assert!(parse_override("lambda").is_err());
        assert!(parse_override("=3").is_err());
    }
}
