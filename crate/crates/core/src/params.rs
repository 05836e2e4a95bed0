//! Structural parameters: definition, defaults, validation and loading.
//!
//! Every other module consumes a [`StructuralParams`] that has passed
//! [`validate`]. A parameter set is plain data; once validated it is never
//! mutated in place (sweeps clone and re-validate).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute threshold below which a denominator counts as singular.
pub const EPS_SING: f64 = 1e-10;

/// Name → value map as read from a calibration file or the command line.
pub type ParamMap = BTreeMap<String, f64>;

macro_rules! structural_params {
    ($( $(#[$doc:meta])* $name:ident = $default:expr ),* $(,)?) => {
        /// All structural-form coefficients, persistences and shock scales.
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct StructuralParams {
            $( $(#[$doc])* pub $name: f64, )*
        }

        impl StructuralParams {
            /// Field names in declaration order; these are the calibration-file keys.
            pub const FIELDS: &'static [&'static str] = &[$( stringify!($name) ),*];

            /// Conventional New Keynesian values chosen inside every validity
            /// domain. They are a working default, not an estimate.
            pub const fn defaults() -> Self {
                Self { $( $name: $default ),* }
            }

            pub fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $( stringify!($name) => Some(self.$name), )*
                    _ => None,
                }
            }

            pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
                match name {
                    $( stringify!($name) => { self.$name = value; Ok(()) } )*
                    _ => Err(Error::UnknownParameter(name.to_string())),
                }
            }

            pub fn to_map(&self) -> ParamMap {
                let mut map = ParamMap::new();
                $( map.insert(stringify!($name).to_string(), self.$name); )*
                map
            }
        }
    };
}

structural_params! {
    /// Inverse intertemporal elasticity of substitution.
    sigma = 1.0,
    /// Okun coefficient.
    theta = 0.5,
    /// Discount factor.
    beta = 0.99,
    /// Phillips-curve slope.
    k = 0.3,
    alpha_pi = 1.5,
    alpha_y = 0.125,
    c0 = 0.0,
    c1 = 0.6,
    c3 = 0.2,
    c4 = 0.2,
    s0 = 0.0,
    s1 = 0.3,
    s2 = 0.2,
    s3 = 0.1,
    s4 = 0.1,
    gamma1 = 0.5,
    gamma2 = 0.4,
    gamma3 = 0.1,
    gamma4 = 0.1,
    gamma5 = 0.2,
    phi1 = 1.0,
    phi2 = 1.0,
    phi3 = 1.0,
    rho_chi = 0.5,
    rho_ybar = 0.9,
    rho_g = 0.8,
    rho_tax = 0.8,
    rho_eps = 0.7,
    rho_u = 0.9,
    sd_omega = 0.01,
    sd_eta_g = 0.01,
    sd_taxshock = 0.01,
    sd_lambda = 0.01,
    sd_xi = 0.01,
    sd_v = 0.01,
    sd_costpush = 0.01,
    sd_natu = 0.01,
    sd_noise = 0.01,
}

impl Default for StructuralParams {
    fn default() -> Self {
        Self::defaults()
    }
}

pub const PERSISTENCES: &[&str] = &["rho_chi", "rho_ybar", "rho_g", "rho_tax", "rho_eps", "rho_u"];

pub const SCALES: &[&str] = &[
    "sd_omega",
    "sd_eta_g",
    "sd_taxshock",
    "sd_lambda",
    "sd_xi",
    "sd_v",
    "sd_costpush",
    "sd_natu",
    "sd_noise",
];

impl StructuralParams {
    /// Shared denominator of the output, rate, consumption and investment
    /// closed forms: `s1 - sigma * (c1 * (gamma2 + s2) + gamma2 * s1)`.
    pub fn denom(&self) -> f64 {
        self.s1 - self.sigma * self.saving_mix()
    }

    /// `c1 * (gamma2 + s2) + gamma2 * s1`
    pub fn saving_mix(&self) -> f64 {
        self.c1 * (self.gamma2 + self.s2) + self.gamma2 * self.s1
    }

    /// `1 - alpha_pi * beta`, denominator of the expected-inflation block.
    pub fn taylor_denom(&self) -> f64 {
        1.0 - self.alpha_pi * self.beta
    }

    /// Checks every constraint and reports all violations at once.
    pub fn check(&self) -> Result<(), ValidationError> {
        let mut violations = Vec::new();
        for &name in Self::FIELDS {
            let v = self.get(name).expect("declared field");
            if !v.is_finite() {
                violations.push(Violation::OutOfDomain(name));
            }
        }
        if self.sigma.is_finite() && self.sigma <= 0.0 {
            violations.push(Violation::OutOfDomain("sigma"));
        }
        if self.theta.is_finite() && self.theta < 0.0 {
            violations.push(Violation::OutOfDomain("theta"));
        }
        if self.k.is_finite() && self.k < 0.0 {
            violations.push(Violation::OutOfDomain("k"));
        }
        if self.beta.is_finite() && !(self.beta > 0.0 && self.beta < 1.0) {
            violations.push(Violation::OutOfDomain("beta"));
        }
        for &name in PERSISTENCES {
            let rho = self.get(name).unwrap();
            if rho.is_finite() && rho.abs() >= 1.0 {
                violations.push(Violation::NonStationary(name));
            }
        }
        for &name in SCALES {
            let sd = self.get(name).unwrap();
            if sd.is_finite() && sd < 0.0 {
                violations.push(Violation::NegativeScale(name));
            }
        }
        if violations.is_empty() {
            if self.denom().abs() <= EPS_SING {
                violations.push(Violation::SingularDenominator(SingularKind::Output));
            }
            if self.s1.abs() <= EPS_SING {
                violations.push(Violation::SingularDenominator(SingularKind::SavingSlope));
            }
            if self.taylor_denom().abs() <= EPS_SING {
                violations.push(Violation::SingularDenominator(SingularKind::Taylor));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { violations })
        }
    }
}

/// Which denominator vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    /// `s1 - sigma * (c1 * (gamma2 + s2) + gamma2 * s1)`
    Output,
    /// `s1`, which multiplies the output denominator in the consumption block.
    SavingSlope,
    /// `1 - alpha_pi * beta`
    Taylor,
}

impl fmt::Display for SingularKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingularKind::Output => "s1 - sigma*(c1*(gamma2+s2) + gamma2*s1)",
            SingularKind::SavingSlope => "s1",
            SingularKind::Taylor => "1 - alpha_pi*beta",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonStationary(&'static str),
    SingularDenominator(SingularKind),
    NegativeScale(&'static str),
    OutOfDomain(&'static str),
    UnknownKey(String),
}

impl Violation {
    /// The parameter the violation is attributed to, when there is a single one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Violation::NonStationary(n) | Violation::NegativeScale(n) | Violation::OutOfDomain(n) => Some(n),
            Violation::UnknownKey(k) => Some(k),
            Violation::SingularDenominator(_) => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonStationary(n) => write!(f, "NonStationary({n}): |rho| must be < 1"),
            Violation::SingularDenominator(k) => {
                write!(f, "SingularDenominator: |{k}| <= {EPS_SING:e}")
            }
            Violation::NegativeScale(n) => write!(f, "NegativeScale({n}): standard deviation must be >= 0"),
            Violation::OutOfDomain(n) => write!(f, "OutOfDomain({n})"),
            Violation::UnknownKey(k) => write!(f, "UnknownKey({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Builds a parameter set from `raw`, filling absent fields from the
/// defaults, and checks every constraint.
pub fn validate(raw: &ParamMap) -> Result<StructuralParams, ValidationError> {
    let mut params = StructuralParams::defaults();
    let mut unknown = Vec::new();
    for (name, &value) in raw {
        if params.set(name, value).is_err() {
            unknown.push(Violation::UnknownKey(name.clone()));
        }
    }
    let missing: Vec<&str> = StructuralParams::FIELDS
        .iter()
        .copied()
        .filter(|f| !raw.contains_key(*f))
        .collect();
    if !missing.is_empty() && !raw.is_empty() {
        log::info!("using defaults for {}", missing.join(", "));
    }
    match params.check() {
        Ok(()) if unknown.is_empty() => Ok(params),
        Ok(()) => Err(ValidationError { violations: unknown }),
        Err(mut e) => {
            unknown.append(&mut e.violations);
            Err(ValidationError { violations: unknown })
        }
    }
}

/// Reads a flat JSON object of name → number.
pub fn load_calibration(path: &Path) -> Result<ParamMap> {
    let text = std::fs::read_to_string(path)?;
    let map: ParamMap = serde_json::from_str(&text)?;
    Ok(map)
}

/// Parses a `name=value` override.
pub fn parse_override(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("expected NAME=VALUE, got `{s}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("`{value}` is not a number (in `{s}`)")))?;
    Ok((name.trim().to_string(), value))
}

/// Draws a parameter set from a broad box of economically plausible values,
/// rejecting draws whose denominators come within 0.05 of zero so that the
/// coefficients stay of moderate size. Slopes and persistences start at
/// 0.05: a channel scaled by a near-zero draw yields coefficients too small
/// to compare against an absolute floor.
pub fn sample_valid<R: Rng + ?Sized>(rng: &mut R) -> StructuralParams {
    loop {
        let mut p = StructuralParams::defaults();
        p.sigma = rng.random_range(0.5..3.0);
        p.theta = rng.random_range(0.2..1.0);
        p.beta = rng.random_range(0.9..0.999);
        p.k = rng.random_range(0.05..0.5);
        p.alpha_pi = rng.random_range(0.05..2.5);
        p.alpha_y = rng.random_range(0.05..1.0);
        p.c0 = rng.random_range(-1.0..1.0);
        p.c1 = rng.random_range(0.1..0.9);
        p.c3 = rng.random_range(0.05..0.5);
        p.c4 = rng.random_range(0.05..0.5);
        p.s0 = rng.random_range(-1.0..1.0);
        p.s1 = rng.random_range(0.1..0.9);
        p.s2 = rng.random_range(0.05..0.5);
        p.s3 = rng.random_range(0.05..0.5);
        p.s4 = rng.random_range(0.05..0.5);
        p.gamma1 = rng.random_range(0.05..1.0);
        p.gamma2 = rng.random_range(0.05..1.0);
        p.gamma3 = rng.random_range(0.05..0.5);
        p.gamma4 = rng.random_range(0.05..0.5);
        p.gamma5 = rng.random_range(0.05..1.0);
        p.phi1 = rng.random_range(0.5..1.5);
        p.phi2 = rng.random_range(0.05..1.5);
        p.phi3 = rng.random_range(0.5..1.5);
        p.rho_chi = rng.random_range(0.05..0.95);
        p.rho_ybar = rng.random_range(0.05..0.95);
        p.rho_g = rng.random_range(0.05..0.95);
        p.rho_tax = rng.random_range(0.05..0.95);
        p.rho_eps = rng.random_range(0.05..0.95);
        p.rho_u = rng.random_range(0.05..0.95);
        if p.denom().abs() < 0.05 || p.taylor_denom().abs() < 0.05 {
            continue;
        }
        if p.check().is_ok() {
            return p;
        }
    }
}
