//! Seeded innovations and the AR(1) states they drive.
//!
//! Every shock kind draws from its own ChaCha20 stream: the generator is
//! seeded once from the root seed and the stream number is the kind's index
//! in [`ShockKind::ALL`]. Adding a kind therefore never perturbs the others.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};

use crate::basis::{Basis, Regressor};
use crate::error::{Error, Result};
use crate::params::StructuralParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShockKind {
    /// potential output
    Omega,
    /// government spending
    Eta,
    /// tax revenue
    TaxShock,
    /// news shock behind the disclosed state
    Lambda,
    Xi,
    V,
    CostPush,
    /// natural unemployment
    Natu,
    /// communication noise on the signal
    Noise,
}

impl ShockKind {
    pub const ALL: [ShockKind; 9] = [
        ShockKind::Omega,
        ShockKind::Eta,
        ShockKind::TaxShock,
        ShockKind::Lambda,
        ShockKind::Xi,
        ShockKind::V,
        ShockKind::CostPush,
        ShockKind::Natu,
        ShockKind::Noise,
    ];

    /// Column name used in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            ShockKind::Omega => "omega",
            ShockKind::Eta => "eta",
            ShockKind::TaxShock => "L",
            ShockKind::Lambda => "lambda",
            ShockKind::Xi => "xi",
            ShockKind::V => "v",
            ShockKind::CostPush => "sigma_cp",
            ShockKind::Natu => "T_natu",
            ShockKind::Noise => "Xi",
        }
    }

    pub fn stream(self) -> u64 {
        self as u64
    }

    pub fn sd(self, p: &StructuralParams) -> f64 {
        match self {
            ShockKind::Omega => p.sd_omega,
            ShockKind::Eta => p.sd_eta_g,
            ShockKind::TaxShock => p.sd_taxshock,
            ShockKind::Lambda => p.sd_lambda,
            ShockKind::Xi => p.sd_xi,
            ShockKind::V => p.sd_v,
            ShockKind::CostPush => p.sd_costpush,
            ShockKind::Natu => p.sd_natu,
            ShockKind::Noise => p.sd_noise,
        }
    }
}

impl fmt::Display for ShockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "omega" => ShockKind::Omega,
            "eta" | "eta_g" => ShockKind::Eta,
            "L" | "taxshock" => ShockKind::TaxShock,
            "lambda" => ShockKind::Lambda,
            "xi" => ShockKind::Xi,
            "v" => ShockKind::V,
            "sigma_cp" | "costpush" | "varsigma" => ShockKind::CostPush,
            "T_natu" | "natu" => ShockKind::Natu,
            "Xi" | "noise" => ShockKind::Noise,
            _ => return Err(Error::UnknownShockKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Unit-variance innovation law; draws are multiplied by the kind's sd.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Innovation {
    #[default]
    Gaussian,
    Uniform,
    /// Student-t with the given degrees of freedom (> 2), rescaled.
    StudentT(f64),
}

impl Innovation {
    fn fill(self, rng: &mut ChaCha20Rng, out: &mut [f64], sd: f64) {
        if sd == 0.0 {
            out.iter_mut().for_each(|x| *x = 0.0);
            return;
        }
        match self {
            Innovation::Gaussian => {
                for x in out {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = sd * z;
                }
            }
            Innovation::Uniform => {
                let h = 3f64.sqrt();
                let d = Uniform::new(-h, h).expect("finite bounds");
                for x in out {
                    *x = sd * d.sample(rng);
                }
            }
            Innovation::StudentT(nu) => {
                assert!(nu > 2.0, "Student-t needs more than two degrees of freedom");
                let d = StudentT::new(nu).expect("positive dof");
                let scale = ((nu - 2.0) / nu).sqrt();
                for x in out {
                    *x = sd * scale * d.sample(rng);
                }
            }
        }
    }
}

/// Values of the AR states before the first simulated period.
///
/// Potential output one period back is implied by the AR law:
/// `ybar[-1] = rho_ybar * ybar[-2] + omega[-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialLags {
    pub ybar_lag2: f64,
    pub omega_lag1: f64,
    pub chi: f64,
    pub g: f64,
    pub tax: f64,
    pub eps: f64,
    pub ubar: f64,
}

/// Innovation sequences indexed by [`ShockKind`].
#[derive(Debug, Clone, PartialEq)]
pub struct Innovations(pub [Vec<f64>; 9]);

impl Innovations {
    pub fn zeros(t: usize) -> Self {
        Self(std::array::from_fn(|_| vec![0.0; t]))
    }

    pub fn get(&self, k: ShockKind) -> &[f64] {
        &self.0[k as usize]
    }

    pub fn get_mut(&mut self, k: ShockKind) -> &mut Vec<f64> {
        &mut self.0[k as usize]
    }

    pub fn len(&self) -> usize {
        self.0[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockPath {
    pub params: StructuralParams,
    pub initial: InitialLags,
    pub innovations: Innovations,
    pub chi: Vec<f64>,
    pub ybar: Vec<f64>,
    pub g: Vec<f64>,
    pub tax: Vec<f64>,
    pub eps: Vec<f64>,
    pub ubar: Vec<f64>,
}

impl ShockPath {
    /// Accumulates the AR states from given innovations.
    pub fn from_innovations(params: StructuralParams, innovations: Innovations, initial: InitialLags) -> Self {
        let p = &params;
        let t_len = innovations.len();
        let ar = |rho: f64, start: f64, shocks: &[f64]| {
            let mut prev = start;
            shocks
                .iter()
                .map(|&e| {
                    prev = rho * prev + e;
                    prev
                })
                .collect::<Vec<f64>>()
        };
        let ybar_lag1 = p.rho_ybar * initial.ybar_lag2 + initial.omega_lag1;
        let ybar = ar(p.rho_ybar, ybar_lag1, innovations.get(ShockKind::Omega));
        let chi = ar(p.rho_chi, initial.chi, innovations.get(ShockKind::Lambda));
        let g = ar(p.rho_g, initial.g, innovations.get(ShockKind::Eta));
        let tax = ar(p.rho_tax, initial.tax, innovations.get(ShockKind::TaxShock));
        let eps = ar(p.rho_eps, initial.eps, innovations.get(ShockKind::CostPush));
        let ubar = ar(p.rho_u, initial.ubar, innovations.get(ShockKind::Natu));
        debug_assert_eq!(ybar.len(), t_len);
        Self {
            params,
            initial,
            innovations,
            chi,
            ybar,
            g,
            tax,
            eps,
            ubar,
        }
    }

    pub fn horizon(&self) -> usize {
        self.innovations.len()
    }

    pub fn innovation(&self, k: ShockKind) -> &[f64] {
        self.innovations.get(k)
    }

    /// Potential output at `t`, reaching back into the initial lags for
    /// `t = -1, -2`.
    pub fn ybar_at(&self, t: isize) -> f64 {
        match t {
            -2 => self.initial.ybar_lag2,
            -1 => self.params.rho_ybar * self.initial.ybar_lag2 + self.initial.omega_lag1,
            _ => self.ybar[t as usize],
        }
    }

    fn omega_at(&self, t: isize) -> f64 {
        if t < 0 {
            self.initial.omega_lag1
        } else {
            self.innovation(ShockKind::Omega)[t as usize]
        }
    }

    fn lagged(series: &[f64], init: f64, t: usize) -> f64 {
        if t == 0 {
            init
        } else {
            series[t - 1]
        }
    }

    /// Regressor values at date `t`.
    pub fn basis(&self, t: usize) -> Basis {
        let ti = t as isize;
        let inn = |k| self.innovation(k)[t];
        let mut x = [0.0; crate::basis::N];
        x[Regressor::Const.index()] = 1.0;
        x[Regressor::YbarLag2.index()] = self.ybar_at(ti - 2);
        x[Regressor::OmegaLag1.index()] = self.omega_at(ti - 1);
        x[Regressor::GLag1.index()] = Self::lagged(&self.g, self.initial.g, t);
        x[Regressor::Eta.index()] = inn(ShockKind::Eta);
        x[Regressor::TaxLag1.index()] = Self::lagged(&self.tax, self.initial.tax, t);
        x[Regressor::TaxShock.index()] = inn(ShockKind::TaxShock);
        x[Regressor::ChiLag1.index()] = Self::lagged(&self.chi, self.initial.chi, t);
        x[Regressor::Lambda.index()] = inn(ShockKind::Lambda);
        x[Regressor::Xi.index()] = inn(ShockKind::Xi);
        x[Regressor::V.index()] = inn(ShockKind::V);
        x[Regressor::Omega.index()] = inn(ShockKind::Omega);
        x[Regressor::EpsLag1.index()] = Self::lagged(&self.eps, self.initial.eps, t);
        x[Regressor::CostPush.index()] = inn(ShockKind::CostPush);
        x[Regressor::UbarLag1.index()] = Self::lagged(&self.ubar, self.initial.ubar, t);
        x[Regressor::Natu.index()] = inn(ShockKind::Natu);
        x
    }

    /// Drops the first `b` periods, carrying their end state into the
    /// initial lags of the remainder.
    pub fn discard(&self, b: usize) -> ShockPath {
        if b == 0 {
            return self.clone();
        }
        assert!(b < self.horizon(), "burn-in must leave at least one period");
        let bi = b as isize;
        let initial = InitialLags {
            ybar_lag2: self.ybar_at(bi - 2),
            omega_lag1: self.omega_at(bi - 1),
            chi: self.chi[b - 1],
            g: self.g[b - 1],
            tax: self.tax[b - 1],
            eps: self.eps[b - 1],
            ubar: self.ubar[b - 1],
        };
        let innovations = Innovations(std::array::from_fn(|k| self.innovations.0[k][b..].to_vec()));
        ShockPath::from_innovations(self.params, innovations, initial)
    }

    /// Ties taxes to spending: the tax innovations and initial level are
    /// replaced by the spending ones, so `tax == g` in every period.
    pub fn balanced(&self) -> Result<ShockPath> {
        let p = &self.params;
        if p.rho_g != p.rho_tax {
            return Err(Error::BudgetModeConflict {
                rho_g: p.rho_g,
                rho_tax: p.rho_tax,
            });
        }
        let mut innovations = self.innovations.clone();
        *innovations.get_mut(ShockKind::TaxShock) = self.innovation(ShockKind::Eta).to_vec();
        let initial = InitialLags {
            tax: self.initial.g,
            ..self.initial
        };
        Ok(ShockPath::from_innovations(self.params, innovations, initial))
    }
}

/// Draws Gaussian innovations for `t` periods.
pub fn draw(params: &StructuralParams, seed: u64, t: usize, initial: Option<InitialLags>) -> ShockPath {
    draw_with(params, seed, t, initial, Innovation::Gaussian)
}

pub fn draw_with(
    params: &StructuralParams,
    seed: u64,
    t: usize,
    initial: Option<InitialLags>,
    law: Innovation,
) -> ShockPath {
    assert!(t >= 1, "horizon must be at least one period");
    let mut innovations = Innovations::zeros(t);
    for kind in ShockKind::ALL {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(kind.stream());
        law.fill(&mut rng, innovations.get_mut(kind), kind.sd(params));
    }
    ShockPath::from_innovations(*params, innovations, initial.unwrap_or_default())
}

/// Draws `t + burn` periods and discards the first `burn`.
pub fn draw_burned(params: &StructuralParams, seed: u64, t: usize, burn: usize, law: Innovation) -> ShockPath {
    draw_with(params, seed, t + burn, None, law).discard(burn)
}

/// The disclosed signal: the state itself when communication is
/// transparent, the state plus noise otherwise.
pub fn signal(path: &ShockPath, transparent: bool) -> Vec<f64> {
    if transparent {
        return path.chi.clone();
    }
    path.chi
        .iter()
        .zip(path.innovation(ShockKind::Noise))
        .map(|(c, n)| c + n)
        .collect()
}
