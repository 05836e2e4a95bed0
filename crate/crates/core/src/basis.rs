//! The regressor set shared by every reduced-form equation.
//!
//! Each endogenous variable at date `t` is a linear combination of these
//! sixteen quantities. A [`Basis`] vector holds their values at one date.

use std::fmt;

use crate::error::{Error, Result};

pub const N: usize = 16;

/// Values of all regressors at one date, in [`Regressor`] order.
pub type Basis = [f64; N];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regressor {
    Const,
    /// potential output two periods back
    YbarLag2,
    OmegaLag1,
    GLag1,
    /// spending innovation
    Eta,
    TaxLag1,
    /// tax innovation
    TaxShock,
    ChiLag1,
    /// news shock driving the disclosed state
    Lambda,
    Xi,
    V,
    /// potential-output innovation
    Omega,
    /// cost-push state, lagged
    EpsLag1,
    /// cost-push innovation
    CostPush,
    UbarLag1,
    /// natural-unemployment innovation
    Natu,
}

impl Regressor {
    pub const ALL: [Regressor; N] = [
        Regressor::Const,
        Regressor::YbarLag2,
        Regressor::OmegaLag1,
        Regressor::GLag1,
        Regressor::Eta,
        Regressor::TaxLag1,
        Regressor::TaxShock,
        Regressor::ChiLag1,
        Regressor::Lambda,
        Regressor::Xi,
        Regressor::V,
        Regressor::Omega,
        Regressor::EpsLag1,
        Regressor::CostPush,
        Regressor::UbarLag1,
        Regressor::Natu,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Regressor::Const => "1",
            Regressor::YbarLag2 => "ybar[t-2]",
            Regressor::OmegaLag1 => "omega[t-1]",
            Regressor::GLag1 => "g[t-1]",
            Regressor::Eta => "eta[t]",
            Regressor::TaxLag1 => "tax[t-1]",
            Regressor::TaxShock => "L[t]",
            Regressor::ChiLag1 => "chi[t-1]",
            Regressor::Lambda => "lambda[t]",
            Regressor::Xi => "xi[t]",
            Regressor::V => "v[t]",
            Regressor::Omega => "omega[t]",
            Regressor::EpsLag1 => "eps[t-1]",
            Regressor::CostPush => "sigma_cp[t]",
            Regressor::UbarLag1 => "ubar[t-1]",
            Regressor::Natu => "T_natu[t]",
        }
    }
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A possibly incomplete assignment of regressor values at one date.
///
/// Evaluating an equation that references an unassigned regressor fails
/// with [`Error::MissingState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    values: [Option<f64>; N],
}

impl State {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every regressor zero except the constant, which is one.
    pub fn steady() -> Self {
        let mut x = [0.0; N];
        x[0] = 1.0;
        Self::from_basis(&x)
    }

    pub fn from_basis(x: &Basis) -> Self {
        let mut values = [None; N];
        for (v, &b) in values.iter_mut().zip(x) {
            *v = Some(b);
        }
        Self { values }
    }

    pub fn set(&mut self, r: Regressor, value: f64) -> &mut Self {
        self.values[r.index()] = Some(value);
        self
    }

    pub fn with(mut self, r: Regressor, value: f64) -> Self {
        self.set(r, value);
        self
    }

    pub fn get(&self, r: Regressor) -> Option<f64> {
        self.values[r.index()]
    }

    pub fn require(&self, r: Regressor) -> Result<f64> {
        self.get(r)
            .ok_or_else(|| Error::MissingState(r.name().to_string()))
    }
}

/// Unit vector for regressor `i`.
pub fn unit(i: usize) -> Basis {
    let mut e = [0.0; N];
    e[i] = 1.0;
    e
}

pub fn dot(a: &Basis, b: &Basis) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
