//! Closed-form coefficients of the common-knowledge reduced form.
//!
//! [`compute_all`] evaluates the printed coefficient tables exactly as
//! written, including the two entries suspected of being typos. Use
//! [`compute_with`] with a non-default [`Reading`] to evaluate the corrected
//! variants. Derived blocks (output gap, expectations, inflation, policy rate,
//! unemployment) are built *through* their upstream blocks so the chain
//! identities hold to the last bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::basis::{self, Basis, Regressor};
use crate::error::{Error, Result};
use crate::params::StructuralParams;

/// Endogenous variables carrying a coefficient block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    R,
    Y,
    Yhat,
    Eyhat,
    Epi,
    Pi,
    C,
    I,
    /// policy rate
    Ipol,
    U,
    Eu,
}

impl Var {
    pub const ALL: [Var; 11] = [
        Var::R,
        Var::Y,
        Var::Yhat,
        Var::Eyhat,
        Var::Epi,
        Var::Pi,
        Var::C,
        Var::I,
        Var::Ipol,
        Var::U,
        Var::Eu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::R => "r",
            Var::Y => "y",
            Var::Yhat => "yhat",
            Var::Eyhat => "Eyhat",
            Var::Epi => "Epi",
            Var::Pi => "pi",
            Var::C => "c",
            Var::I => "I",
            Var::Ipol => "i",
            Var::U => "u",
            Var::Eu => "Eu",
        }
    }

    /// Number of coefficients in the block.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            Var::R | Var::Y | Var::Yhat | Var::C | Var::I | Var::Eu => 11,
            Var::Eyhat => 9,
            Var::Epi | Var::Pi | Var::Ipol => 14,
            Var::U => 13,
        }
    }

    /// Regressor multiplied by coefficient `idx` of this block.
    pub fn regressor(self, idx: usize) -> Regressor {
        assert!(idx < self.len(), "{}[{idx}] out of range", self.name());
        let j = match (self, idx) {
            (Var::U, 12) => Regressor::UbarLag1.index(),
            (Var::Eu, 9) => Regressor::UbarLag1.index(),
            (Var::Eu, 10) => Regressor::Natu.index(),
            _ => idx,
        };
        Regressor::ALL[j]
    }

    /// Terms with a fixed unit-free coefficient that are not part of the block:
    /// the output gap carries `- omega[t]` and unemployment `+ T_natu[t]`.
    pub fn fixed_terms(self) -> &'static [(Regressor, f64)] {
        match self {
            Var::Yhat => &[(Regressor::Omega, -1.0)],
            Var::U => &[(Regressor::Natu, 1.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Var::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown variable `{s}`")))
    }
}

/// Which reading of the two doubtful table entries to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reading {
    /// Use `k * z4^y` in the inflation block instead of the printed `k * z5^y`.
    pub pi4_uses_y4: bool,
    /// Use `z0^yhat` for the expected-gap intercept instead of the printed
    /// `rho_ybar * z1^yhat`.
    pub eyhat0_uses_yhat0: bool,
}

impl Reading {
    pub const VERBATIM: Reading = Reading {
        pi4_uses_y4: false,
        eyhat0_uses_yhat0: false,
    };
    pub const CORRECTED: Reading = Reading {
        pi4_uses_y4: true,
        eyhat0_uses_yhat0: true,
    };
}

/// A complete set of reduced-form coefficients plus the parameters that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub params: StructuralParams,
    blocks: [Vec<f64>; 11],
    /// Shared denominator of the output, rate, consumption and investment blocks.
    pub denom: f64,
    /// `1 - alpha_pi * beta`
    pub taylor_denom: f64,
}

impl ReducedForm {
    /// Assembles a reduced form from externally computed blocks.
    ///
    /// Panics if a block has the wrong length.
    pub fn from_blocks(params: StructuralParams, blocks: BTreeMap<Var, Vec<f64>>) -> Self {
        let blocks = Var::ALL.map(|v| {
            let b = blocks.get(&v).cloned().unwrap_or_else(|| vec![0.0; v.len()]);
            assert_eq!(b.len(), v.len(), "block {v} has wrong length");
            b
        });
        Self {
            denom: params.denom(),
            taylor_denom: params.taylor_denom(),
            params,
            blocks,
        }
    }

    pub fn block(&self, v: Var) -> &[f64] {
        &self.blocks[v as usize]
    }

    pub fn z(&self, v: Var, idx: usize) -> f64 {
        self.blocks[v as usize][idx]
    }

    /// Overwrites one coefficient. Chain identities are not re-imposed.
    pub fn set(&mut self, v: Var, idx: usize, value: f64) {
        self.blocks[v as usize][idx] = value;
    }

    /// The equation for `v` as a dense row over the regressor basis,
    /// fixed terms included.
    pub fn row(&self, v: Var) -> Basis {
        let mut row = [0.0; basis::N];
        for (i, &z) in self.block(v).iter().enumerate() {
            row[v.regressor(i).index()] += z;
        }
        for &(r, c) in v.fixed_terms() {
            row[r.index()] += c;
        }
        row
    }

    /// Evaluates the equation for `v` at a fully specified basis vector.
    pub fn eval(&self, v: Var, x: &Basis) -> f64 {
        let mut acc = 0.0;
        for (i, &z) in self.block(v).iter().enumerate() {
            acc += z * x[v.regressor(i).index()];
        }
        for &(r, c) in v.fixed_terms() {
            acc += c * x[r.index()];
        }
        acc
    }

    /// Evaluates the equation for `v` at a partial state, failing on the
    /// first referenced regressor that is unassigned.
    pub fn eval_state(&self, v: Var, state: &basis::State) -> Result<f64> {
        let mut acc = 0.0;
        for (i, &z) in self.block(v).iter().enumerate() {
            acc += z * state.require(v.regressor(i))?;
        }
        for &(r, c) in v.fixed_terms() {
            acc += c * state.require(r)?;
        }
        Ok(acc)
    }

    /// `{variable: {index: value}}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::Map::new();
        for v in Var::ALL {
            let inner: serde_json::Map<String, serde_json::Value> = self
                .block(v)
                .iter()
                .enumerate()
                .map(|(i, &z)| (i.to_string(), serde_json::Value::from(z)))
                .collect();
            out.insert(v.name().to_string(), inner.into());
        }
        out.into()
    }

    /// Every `(variable, index, value)` triple in table order.
    pub fn entries(&self) -> impl Iterator<Item = (Var, usize, f64)> + '_ {
        Var::ALL
            .into_iter()
            .flat_map(move |v| self.block(v).iter().enumerate().map(move |(i, &z)| (v, i, z)))
    }
}

/// Evaluates every table verbatim.
pub fn compute_all(p: &StructuralParams) -> ReducedForm {
    compute_with(p, Reading::VERBATIM)
}

pub fn compute_with(p: &StructuralParams, reading: Reading) -> ReducedForm {
    let sigma = p.sigma;
    let (c0, c1, c3, c4) = (p.c0, p.c1, p.c3, p.c4);
    let (s0, s1, s2, s3, s4) = (p.s0, p.s1, p.s2, p.s3, p.s4);
    let (g1, g2, g3, g4, g5) = (p.gamma1, p.gamma2, p.gamma3, p.gamma4, p.gamma5);
    let (f1, f2, f3) = (p.phi1, p.phi2, p.phi3);
    let (ry, rg, rt, rc) = (p.rho_ybar, p.rho_g, p.rho_tax, p.rho_chi);

    let m = p.saving_mix();
    let d = p.denom();
    let sd = s1 * d;
    let one_ry = 1.0 - ry;
    // recurring brackets
    let gov = c1 * (g3 - s3) - c3 * s1 + g3 * s1 - s1;
    let tax = c1 * (g4 - s4) + s1 * c4 + s1 * g4;
    let gov_c = c1 * (g3 - s3) - c3 * s1;
    let tax_c = c1 * (g4 - s4) + s1 * c4;
    let intercept = s0 * c1 - c0 * s1;
    let cs = c1 - s1;
    let news = cs * (g5 - f2);
    let ry2 = ry * ry;
    let ry3 = ry2 * ry;

    let r = vec![
        sigma * intercept / d,
        -sigma * g1 * ry3 * (c1 + s1) / (one_ry * d),
        -sigma * g1 * ry2 * (c1 + s1) / (one_ry * d),
        sigma * rg * gov / d,
        sigma * gov / d,
        sigma * rt * tax / d,
        sigma * tax / d,
        -sigma * rc * news / d,
        -sigma * news / d,
        sigma * f1 * cs / d,
        sigma * f3 * cs / d,
    ];

    let y = vec![
        -intercept / d,
        g1 * ry3 * (c1 + s1) / (one_ry * d),
        g1 * ry2 * (c1 + s1) / (one_ry * d),
        -(rg * c1 * (g3 - s3) - rg * c3 * s1 + rg * g3 * s1 - rg * s1) / d,
        -gov / d,
        -(rt * c1 * (g4 - s4) + rt * s1 * c4 + rt * s1 * g4) / d,
        -tax / d,
        (sigma * rc * news * m + g5 * rc * cs * d - f2 * rc * cs * d) / sd,
        (sigma * news * m + g5 * cs * d - f2 * cs * d) / sd,
        -f1 * cs / d,
        -f3 * cs / d,
    ];

    let c = vec![
        (s0 * s1 * c1 - s0 * c1 * c1 * sigma * s2 - s0 * sigma * g2 * s1 - c0 * s1 * s1
            + c0 * s1 * c1 * sigma * s2
            + c0 * sigma * g2 * s1 * s1)
            / sd,
        (sigma * c1 * g1 * ry3 * (c1 + s1) * (g2 + s2) + g1 * c1 * ry3 * d) / (s1 * one_ry * d),
        (sigma * c1 * g1 * ry2 * (c1 + s1) * (g2 + s2) + g1 * c1 * ry2 * d) / (s1 * one_ry * d),
        (sigma * c1 * rg * (g2 + s2) * gov + rg * gov_c * d) / sd,
        (sigma * c1 * (g2 + s2) * gov + d * gov_c) / sd,
        (sigma * c1 * rt * (g2 + s2) * tax + rt * tax_c * d) / sd,
        (sigma * c1 * (g2 + s2) * tax + tax_c * d) / sd,
        (sigma * rc * c1 * (g2 + s2) * news - rc * (f2 * cs - c1 * g5) * d) / sd,
        (sigma * c1 * (g2 + s2) * news + (c1 * g5 - f2 * cs) * d) / sd,
        (sigma * f1 * c1 * (g2 + s2) * cs + f1 * cs * d) / sd,
        (sigma * f3 * c1 * (g2 + s2) * cs + f3 * cs * d) / sd,
    ];

    let inv = vec![
        sigma * g2 * intercept / d,
        (g1 * ry3 * d + sigma * g1 * g2 * ry3 * (c1 + s1)) / (one_ry * d),
        (g1 * ry2 * d + sigma * g1 * g2 * ry2 * (c1 + s1)) / (one_ry * d),
        (g2 * sigma * rg * gov + g3 * rg * d) / d,
        (sigma * g2 * gov + g3 * d) / d,
        (sigma * g2 * rt * tax + g4 * rt * d) / d,
        (sigma * g2 * tax + g4 * d) / d,
        (sigma * g2 * rc * news + g5 * rc * d) / d,
        (sigma * g2 * news + g5 * d) / d,
        sigma * g2 * f1 * cs / d,
        sigma * g2 * f3 * cs / d,
    ];

    chain(p, reading, r, y, c, inv)
}

/// Builds the derived blocks from the four primitive ones.
fn chain(
    p: &StructuralParams,
    reading: Reading,
    r: Vec<f64>,
    y: Vec<f64>,
    c: Vec<f64>,
    inv: Vec<f64>,
) -> ReducedForm {
    let (ry, rg, rt, rc) = (p.rho_ybar, p.rho_g, p.rho_tax, p.rho_chi);

    let mut yhat = y.clone();
    yhat[1] = y[1] - ry * ry;
    yhat[2] = y[2] - ry;

    let eyhat = vec![
        if reading.eyhat0_uses_yhat0 { yhat[0] } else { ry * yhat[1] },
        ry * yhat[1],
        yhat[1],
        rg * yhat[3],
        yhat[3],
        rt * yhat[5],
        yhat[5],
        rc * yhat[7],
        yhat[7],
    ];

    let td = p.taylor_denom();
    let load = p.alpha_pi * p.k + p.alpha_y + p.sigma;
    let mut epi: Vec<f64> = yhat.iter().map(|&z| z * load / td).collect();
    epi.push(-(p.alpha_pi * p.k + p.alpha_y) / td);
    epi.push(p.rho_eps * p.alpha_pi / td);
    epi.push(p.alpha_pi / td);

    let mut pi: Vec<f64> = (0..11)
        .map(|i| {
            let slope = if i == 4 && !reading.pi4_uses_y4 { y[5] } else { y[i] };
            p.beta * epi[i] + p.k * slope
        })
        .collect();
    pi.push(p.beta * epi[11] - p.k);
    pi.push(p.beta * epi[12]);
    pi.push(p.beta * epi[13]);

    // The gap's own omega[t] coefficient is the fixed -1; the gap has no
    // cost-push terms.
    let gap_ext = |i: usize| match i {
        0..=10 => yhat[i],
        11 => -1.0,
        _ => 0.0,
    };
    let ipol: Vec<f64> = (0..14).map(|i| p.alpha_pi * pi[i] + p.alpha_y * gap_ext(i)).collect();

    let mut u: Vec<f64> = yhat.iter().map(|&z| -p.theta * z).collect();
    u.push(p.theta);
    u.push(p.rho_u);

    let eu = vec![
        u[0],
        ry * u[1],
        u[1],
        rg * u[3],
        u[3],
        rt * u[5],
        u[5],
        rc * u[7],
        u[7],
        p.rho_u * u[12],
        u[12],
    ];

    let mut blocks = BTreeMap::new();
    blocks.insert(Var::R, r);
    blocks.insert(Var::Y, y);
    blocks.insert(Var::Yhat, yhat);
    blocks.insert(Var::Eyhat, eyhat);
    blocks.insert(Var::Epi, epi);
    blocks.insert(Var::Pi, pi);
    blocks.insert(Var::C, c);
    blocks.insert(Var::I, inv);
    blocks.insert(Var::Ipol, ipol);
    blocks.insert(Var::U, u);
    blocks.insert(Var::Eu, eu);
    ReducedForm::from_blocks(*p, blocks)
}

/// Intercepts of the eight level variables.
pub fn steady_state(rf: &ReducedForm) -> BTreeMap<&'static str, f64> {
    [Var::R, Var::Y, Var::Yhat, Var::Pi, Var::C, Var::I, Var::Ipol, Var::U]
        .into_iter()
        .map(|v| (v.name(), rf.z(v, 0)))
        .collect()
}
