//! Equilibrium paths, expectations, impulse responses and the
//! transparency audit.

use std::collections::BTreeMap;

use rand::SeedableRng;
use serde::Serialize;

use crate::basis::{self, Basis, Regressor, State};
use crate::coeffs::{compute_all, ReducedForm, Var};
use crate::error::{Error, Result};
use crate::params::{sample_valid, StructuralParams};
use crate::shocks::{InitialLags, Innovations, ShockKind, ShockPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// Spending and taxes follow their own AR laws.
    #[default]
    Independent,
    /// Taxes are tied to spending period by period.
    Balanced,
}

impl std::str::FromStr for BudgetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(BudgetMode::Independent),
            "balanced" => Ok(BudgetMode::Balanced),
            _ => Err(Error::Usage(format!("unknown budget mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPath {
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub yhat: Vec<f64>,
    pub pi: Vec<f64>,
    pub c: Vec<f64>,
    pub inv: Vec<f64>,
    pub saving: Vec<f64>,
    pub i: Vec<f64>,
    pub u: Vec<f64>,
    /// one-step-ahead expectation of output
    pub ey: Vec<f64>,
    pub eyhat: Vec<f64>,
    pub epi: Vec<f64>,
    pub eu: Vec<f64>,
    /// expected deviation of next-period unemployment from its intercept
    pub ji: Vec<f64>,
    /// `y[t+1] - ey[t]`, one shorter than the path
    pub fe: Vec<f64>,
    pub shocks: ShockPath,
    pub mode: BudgetMode,
}

impl EquilibriumPath {
    pub fn horizon(&self) -> usize {
        self.y.len()
    }

    /// Named columns in CSV order, without the forecast error.
    pub fn columns(&self) -> [(&'static str, &[f64]); 15] {
        [
            ("r", &self.r),
            ("y", &self.y),
            ("yhat", &self.yhat),
            ("pi", &self.pi),
            ("c", &self.c),
            ("I", &self.inv),
            ("S", &self.saving),
            ("i", &self.i),
            ("u", &self.u),
            ("Ey", &self.ey),
            ("Eyhat", &self.eyhat),
            ("Epi", &self.epi),
            ("Eu", &self.eu),
            ("JI", &self.ji),
            ("chi", &self.shocks.chi),
        ]
    }
}

/// The expectation of next-period output printed alongside the output
/// equation: intercept, potential output, spending, taxes and the disclosed
/// state, each at date `t`.
fn expected_output_row(rf: &ReducedForm) -> Basis {
    let p = &rf.params;
    let z = rf.block(Var::Y);
    let mut row = [0.0; basis::N];
    row[Regressor::Const.index()] = z[0];
    // ybar[t-1] = rho * ybar[t-2] + omega[t-1]
    row[Regressor::YbarLag2.index()] = z[1] * p.rho_ybar;
    row[Regressor::OmegaLag1.index()] = z[1];
    row[Regressor::GLag1.index()] = z[3] * p.rho_g;
    row[Regressor::Eta.index()] = z[3];
    row[Regressor::TaxLag1.index()] = z[5] * p.rho_tax;
    row[Regressor::TaxShock.index()] = z[5];
    row[Regressor::ChiLag1.index()] = z[7] * p.rho_chi;
    row[Regressor::Lambda.index()] = z[7];
    row
}

/// Evaluates every equation along `path`. With `intercepts = false` the
/// constant regressor is dropped, which yields deviations from the steady
/// state without subtracting a baseline.
fn evaluate(rf: &ReducedForm, path: &ShockPath, mode: BudgetMode, intercepts: bool) -> EquilibriumPath {
    let t_len = path.horizon();
    let ey_row = expected_output_row(rf);
    let rows: BTreeMap<Var, Basis> = Var::ALL.iter().map(|&v| (v, rf.row(v))).collect();
    let mut cols: BTreeMap<Var, Vec<f64>> = Var::ALL.iter().map(|&v| (v, Vec::with_capacity(t_len))).collect();
    let mut ey = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut x = path.basis(t);
        if !intercepts {
            x[0] = 0.0;
        }
        for (v, row) in &rows {
            cols.get_mut(v).unwrap().push(basis::dot(row, &x));
        }
        ey.push(basis::dot(&ey_row, &x));
    }
    let u0 = if intercepts { rf.z(Var::U, 0) } else { 0.0 };
    let mut take = |v: Var| cols.remove(&v).unwrap();
    let y = take(Var::Y);
    let eu = take(Var::Eu);
    let inv = take(Var::I);
    let fe = (0..t_len.saturating_sub(1)).map(|t| y[t + 1] - ey[t]).collect();
    EquilibriumPath {
        r: take(Var::R),
        yhat: take(Var::Yhat),
        pi: take(Var::Pi),
        c: take(Var::C),
        saving: inv.clone(),
        inv,
        i: take(Var::Ipol),
        u: take(Var::U),
        eyhat: take(Var::Eyhat),
        epi: take(Var::Epi),
        ji: eu.iter().map(|e| e - u0).collect(),
        eu,
        ey,
        fe,
        y,
        shocks: path.clone(),
        mode,
    }
}

/// Evaluates the reduced form along a shock path.
///
/// `rf` and `path` must come from the same parameters. In balanced mode the
/// tax stream is replaced by the spending stream first.
pub fn simulate(rf: &ReducedForm, path: &ShockPath, mode: BudgetMode) -> Result<EquilibriumPath> {
    match mode {
        BudgetMode::Independent => Ok(evaluate(rf, path, mode, true)),
        BudgetMode::Balanced => {
            let tied = path.balanced()?;
            Ok(evaluate(rf, &tied, mode, true))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectations {
    pub y: f64,
    pub yhat: f64,
    pub pi: f64,
    pub u: f64,
}

/// One-step-ahead expectations of output, the gap, inflation and
/// unemployment at a single date.
pub fn expectations(rf: &ReducedForm, state: &State) -> Result<Expectations> {
    let ey_row = expected_output_row(rf);
    let mut y = 0.0;
    for r in Regressor::ALL {
        let c = ey_row[r.index()];
        if c != 0.0 || matches!(r, Regressor::Const) {
            y += c * state.require(r)?;
        }
    }
    Ok(Expectations {
        y,
        yhat: rf.eval_state(Var::Eyhat, state)?,
        pi: rf.eval_state(Var::Epi, state)?,
        u: rf.eval_state(Var::Eu, state)?,
    })
}

/// Expected deviation of next-period unemployment from its intercept,
/// summed term by term without the intercept.
pub fn job_insecurity(rf: &ReducedForm, state: &State) -> Result<f64> {
    let z = rf.block(Var::Eu);
    let mut acc = 0.0;
    for (i, &c) in z.iter().enumerate().skip(1) {
        acc += c * state.require(Var::Eu.regressor(i))?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastErrorSummary {
    pub series: Vec<f64>,
    pub mean: f64,
    pub se: f64,
    pub variance: f64,
    pub lag1_autocorr: f64,
}

pub fn forecast_error(path: &EquilibriumPath) -> Result<ForecastErrorSummary> {
    if path.horizon() < 2 {
        return Err(Error::Horizon {
            min: 2,
            got: path.horizon(),
        });
    }
    let s = &path.fe;
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let variance = if s.len() > 1 {
        s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se = (variance / n).sqrt();
    let lag1_autocorr = if s.len() > 2 && variance > 0.0 {
        let num: f64 = s.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        let den: f64 = s.iter().map(|x| (x - mean) * (x - mean)).sum();
        num / den
    } else {
        0.0
    };
    Ok(ForecastErrorSummary {
        series: s.clone(),
        mean,
        se,
        variance,
        lag1_autocorr,
    })
}

/// Population variance of the output forecast error implied by the
/// coefficients and shock scales.
pub fn forecast_error_variance(rf: &ReducedForm) -> f64 {
    let p = &rf.params;
    let z = rf.block(Var::Y);
    [
        (z[2], p.sd_omega),
        (z[4], p.sd_eta_g),
        (z[6], p.sd_taxshock),
        (z[8], p.sd_lambda),
        (z[9], p.sd_xi),
        (z[10], p.sd_v),
    ]
    .iter()
    .map(|(c, s)| c * c * s * s)
    .sum()
}

/// Responses to a single innovation at `h = 0`, for `h = 0..=H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrfTable {
    pub kind: String,
    pub size: f64,
    pub horizon: usize,
    pub responses: BTreeMap<String, Vec<f64>>,
}

impl IrfTable {
    pub fn get(&self, name: &str) -> &[f64] {
        &self.responses[name]
    }
}

/// Variables reported by [`irf`], endogenous first, then the exogenous
/// states and the noisy signal.
pub const IRF_VARIABLES: [&str; 21] = [
    "r", "y", "yhat", "pi", "c", "I", "S", "i", "u", "Ey", "Eyhat", "Epi", "Eu", "JI", "chi", "ybar", "g",
    "tax", "eps", "ubar", "Psi",
];

/// Path whose only nonzero innovation is `size` of `kind` at date 0.
pub fn impulse_path(params: &StructuralParams, kind: ShockKind, h: usize, size: f64) -> ShockPath {
    let mut inn = Innovations::zeros(h + 1);
    inn.get_mut(kind)[0] = size;
    ShockPath::from_innovations(*params, inn, InitialLags::default())
}

pub fn irf(rf: &ReducedForm, kind: ShockKind, h: usize, size: f64) -> Result<IrfTable> {
    if h < 1 {
        return Err(Error::Horizon { min: 1, got: h });
    }
    let path = impulse_path(&rf.params, kind, h, size);
    let dev = evaluate(rf, &path, BudgetMode::Independent, false);
    let psi = crate::shocks::signal(&path, false);
    let mut responses = BTreeMap::new();
    for (name, col) in dev.columns() {
        responses.insert(name.to_string(), col.to_vec());
    }
    for (name, col) in [
        ("ybar", &path.ybar),
        ("g", &path.g),
        ("tax", &path.tax),
        ("eps", &path.eps),
        ("ubar", &path.ubar),
        ("Psi", &psi),
    ] {
        responses.insert(name.to_string(), col.clone());
    }
    Ok(IrfTable {
        kind: kind.name().to_string(),
        size,
        horizon: h,
        responses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalEntry {
    pub z7: f64,
    pub z8: f64,
    pub sign7: i8,
    pub sign8: i8,
    /// both disclosure coefficients vanish
    pub neutral: bool,
    pub paradox: bool,
}

/// Disclosure coefficients (lagged state and current news shock) for every
/// block, with a paradox flag where disclosure moves a welfare-relevant
/// variable the wrong way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransparencyAudit(pub BTreeMap<String, SignalEntry>);

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn transparency_audit(rf: &ReducedForm) -> TransparencyAudit {
    let mut out = BTreeMap::new();
    for v in Var::ALL {
        let (z7, z8) = (rf.z(v, 7), rf.z(v, 8));
        let paradox = match v {
            Var::U | Var::Eu => z8 > 0.0,
            Var::Y | Var::C => z8 < 0.0,
            _ => false,
        };
        out.insert(
            v.name().to_string(),
            SignalEntry {
                z7,
                z8,
                sign7: sign(z7),
                sign8: sign(z8),
                neutral: z7 == 0.0 && z8 == 0.0,
                paradox,
            },
        );
    }
    TransparencyAudit(out)
}

/// Signs of the impact (`h = 0`) and one-period-later responses to a
/// news-shock bump, obtained by differencing two full simulations.
pub fn perturbation_signs(rf: &ReducedForm, delta: f64) -> Result<BTreeMap<String, (i8, i8)>> {
    let base = ShockPath::from_innovations(rf.params, Innovations::zeros(3), InitialLags::default());
    let bumped = impulse_path(&rf.params, ShockKind::Lambda, 2, delta);
    let a = simulate(rf, &base, BudgetMode::Independent)?;
    let b = simulate(rf, &bumped, BudgetMode::Independent)?;
    let mut out = BTreeMap::new();
    let pairs: [(Var, &[f64], &[f64]); 11] = [
        (Var::R, &a.r, &b.r),
        (Var::Y, &a.y, &b.y),
        (Var::Yhat, &a.yhat, &b.yhat),
        (Var::Eyhat, &a.eyhat, &b.eyhat),
        (Var::Epi, &a.epi, &b.epi),
        (Var::Pi, &a.pi, &b.pi),
        (Var::C, &a.c, &b.c),
        (Var::I, &a.inv, &b.inv),
        (Var::Ipol, &a.i, &b.i),
        (Var::U, &a.u, &b.u),
        (Var::Eu, &a.eu, &b.eu),
    ];
    for (v, x, y) in pairs {
        // impact carries z8, the next period carries z7 times the state
        out.insert(v.name().to_string(), (sign(y[1] - x[1]), sign(y[0] - x[0])));
    }
    Ok(out)
}

/// Scans random valid parameter sets until disclosure raises expected
/// unemployment (`z8` of the expected-unemployment block positive).
pub fn find_paradox(seed: u64, max_draws: usize) -> Option<(StructuralParams, ReducedForm)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..max_draws).find_map(|_| {
        let p = sample_valid(&mut rng);
        let rf = compute_all(&p);
        (rf.z(Var::Eu, 8) > 0.0).then_some((p, rf))
    })
}
