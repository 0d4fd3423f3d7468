//! Job configuration: a JSON file plus command-line overrides.

use std::path::Path;

use atto_core::{BlaschkeProduct, Complex64, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::{from_cx, Cx, ProductDesc};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 200;

/// The subset of [`Tolerances`] exposed in config files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceFile {
    pub residual: Option<f64>,
    #[serde(rename = "match")]
    pub matching: Option<f64>,
    pub decision: Option<f64>,
}

/// On-disk form; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<ProductDesc>,
    pub beta: Option<ProductDesc>,
    pub lambda1: Option<Cx>,
    pub lambda2: Option<Cx>,
    #[serde(default)]
    pub tolerances: ToleranceFile,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub lambda1: Option<Complex64>,
    pub lambda2: Option<Complex64>,
    pub residual: Option<f64>,
    pub matching: Option<f64>,
    pub decision: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub alpha: Option<BlaschkeProduct>,
    pub beta: Option<BlaschkeProduct>,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub trials: usize,
}

impl JobConfig {
    pub fn resolve(file: ConfigFile, over: Overrides) -> Result<Self, CliError> {
        let product = |flag: Option<String>,
                       desc: Option<ProductDesc>|
         -> Result<Option<BlaschkeProduct>, CliError> {
            match (flag, desc) {
                (Some(s), _) => Ok(Some(parse_product_arg(&s)?)),
                (None, Some(d)) => Ok(Some(d.to_product()?)),
                (None, None) => Ok(None),
            }
        };
        let mut tolerances = Tolerances::default();
        if let Some(v) = over.residual.or(file.tolerances.residual) {
            tolerances.residual = v;
        }
        if let Some(v) = over.matching.or(file.tolerances.matching) {
            tolerances.matching = v;
        }
        if let Some(v) = over.decision.or(file.tolerances.decision) {
            tolerances.decision = v;
        }
        if !tolerances.is_valid() {
            return Err(CliError::Usage(
                "tolerances must be positive with decision below reject".into(),
            ));
        }
        let one = Complex64::new(1.0, 0.0);
        let lambda1 = over.lambda1.or(file.lambda1.map(from_cx)).unwrap_or(one);
        let lambda2 = over.lambda2.or(file.lambda2.map(from_cx)).unwrap_or(one);
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if (l.norm() - 1.0).abs() > tolerances.unimodular {
                return Err(CliError::Usage(format!(
                    "{name} must be unimodular, got modulus {}",
                    l.norm()
                )));
            }
        }
        Ok(JobConfig {
            alpha: product(over.alpha, file.alpha)?,
            beta: product(over.beta, file.beta)?,
            lambda1,
            lambda2,
            tolerances,
            seed: over.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            trials: over.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        })
    }

    pub fn alpha(&self) -> Result<&BlaschkeProduct, CliError> {
        self.alpha
            .as_ref()
            .ok_or_else(|| CliError::Usage("alpha is required".into()))
    }

    pub fn beta(&self) -> Result<&BlaschkeProduct, CliError> {
        self.beta
            .as_ref()
            .ok_or_else(|| CliError::Usage("beta is required".into()))
    }
}

/// A shorthand such as `z3`, inline JSON, or a path to a JSON file.
pub fn parse_product_arg(s: &str) -> Result<BlaschkeProduct, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        let d: ProductDesc = serde_json::from_str(t)?;
        return d.to_product();
    }
    if t.starts_with('z') && !Path::new(t).exists() {
        return crate::format::parse_shorthand(t);
    }
    let d: ProductDesc = serde_json::from_str(&std::fs::read_to_string(t)?)?;
    d.to_product()
}

/// Accepts `re,im`, `[re,im]` or the `a+bi` form.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if let Some((re, im)) = t.split_once(',') {
        let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
        return Ok(Complex64::new(re, im));
    }
    t.parse::<Complex64>()
        .map_err(|e| format!("invalid complex number `{s}`: {e}"))
}
