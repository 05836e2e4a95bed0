//! Independent solution of the structural model by undetermined
//! coefficients, residual audits of simulated paths, and the comparison of
//! the printed tables against the independent solution.
//!
//! Every endogenous variable is posited as a linear function of the full
//! regressor basis. Substituting these guesses into the structural equations
//! and matching the coefficient of each regressor gives a square linear
//! system, solved here with partial-pivoting LU. Entries the printed
//! solution does not carry must come out zero; if they do not, the ansatz is
//! reported as inconsistent rather than truncated.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{self, Basis, Regressor};
use crate::coeffs::{compute_all, compute_with, Reading, ReducedForm, Var};
use crate::error::{Error, Result};
use crate::params::{sample_valid, StructuralParams};
use crate::sim::{BudgetMode, EquilibriumPath};

/// Above this condition number the solution is reported with a warning.
pub const CONDITION_WARN: f64 = 1e12;
/// Above this the system is treated as singular.
pub const CONDITION_FAIL: f64 = 1e15;

/// How the demand side pins the real rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// Forward-looking IS curve with rational expectations of the gap.
    #[default]
    RationalExpectations,
    /// IS curve without the expected-gap term: `r = -sigma * y`.
    /// Used only to explain where the printed tables come from.
    Myopic,
}

/// Unknown blocks of the matching system, each a full basis row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Unknown {
    C,
    /// long-run income term in consumption and saving
    L,
    S,
    R,
    I,
    Y,
    Yhat,
    Ipol,
    Epi,
    Pi,
    U,
    Eyhat,
    Eu,
}

const UNKNOWNS: [Unknown; 13] = [
    Unknown::C,
    Unknown::L,
    Unknown::S,
    Unknown::R,
    Unknown::I,
    Unknown::Y,
    Unknown::Yhat,
    Unknown::Ipol,
    Unknown::Epi,
    Unknown::Pi,
    Unknown::U,
    Unknown::Eyhat,
    Unknown::Eu,
];

const N: usize = basis::N;

fn e(r: Regressor) -> Basis {
    basis::unit(r.index())
}

fn add(a: Basis, b: Basis) -> Basis {
    std::array::from_fn(|i| a[i] + b[i])
}

fn scale(s: f64, a: Basis) -> Basis {
    a.map(|x| s * x)
}

/// Maps the coefficient row of `x[t+1]` to that of `E_t x[t+1]` over the
/// date-`t` basis. Current potential-output innovations are not observed,
/// so the expectation of potential output runs through its lag only.
fn projection(p: &StructuralParams) -> [[f64; N]; N] {
    use Regressor::*;
    let mut m = [[0.0; N]; N];
    m[Const.index()] = e(Const);
    m[YbarLag2.index()] = add(scale(p.rho_ybar, e(YbarLag2)), e(OmegaLag1));
    m[GLag1.index()] = add(scale(p.rho_g, e(GLag1)), e(Eta));
    m[TaxLag1.index()] = add(scale(p.rho_tax, e(TaxLag1)), e(TaxShock));
    m[ChiLag1.index()] = add(scale(p.rho_chi, e(ChiLag1)), e(Lambda));
    m[EpsLag1.index()] = add(scale(p.rho_eps, e(EpsLag1)), e(CostPush));
    m[UbarLag1.index()] = add(scale(p.rho_u, e(UbarLag1)), e(Natu));
    m
}

/// Exogenous quantities at date `t` written over the basis.
struct Exogenous {
    g: Basis,
    tax: Basis,
    chi: Basis,
    ybar: Basis,
    /// expected long-run potential-output growth
    long_run: Basis,
    natural_rate: Basis,
    cost_push: Basis,
    natural_u: Basis,
}

fn exogenous(p: &StructuralParams) -> Exogenous {
    use Regressor::*;
    let ry = p.rho_ybar;
    let ybar_lag1 = add(scale(ry, e(YbarLag2)), e(OmegaLag1));
    let ybar = add(scale(ry, ybar_lag1), e(Omega));
    let expected_next = scale(ry * ry, ybar_lag1);
    let natural_rate = scale(p.sigma, add(expected_next, scale(-1.0, ybar)));
    Exogenous {
        g: add(scale(p.rho_g, e(GLag1)), e(Eta)),
        tax: add(scale(p.rho_tax, e(TaxLag1)), e(TaxShock)),
        chi: add(scale(p.rho_chi, e(ChiLag1)), e(Lambda)),
        long_run: scale(1.0 / (1.0 - ry), expected_next),
        ybar,
        natural_rate,
        cost_push: add(scale(p.rho_eps, e(EpsLag1)), e(CostPush)),
        natural_u: add(scale(p.rho_u, e(UbarLag1)), e(Natu)),
    }
}

struct System {
    a: DMatrix<f64>,
    b: DVector<f64>,
    proj: [[f64; N]; N],
    eq: usize,
}

impl System {
    fn new(p: &StructuralParams) -> Self {
        let n = UNKNOWNS.len() * N;
        Self {
            a: DMatrix::zeros(n, n),
            b: DVector::zeros(n),
            proj: projection(p),
            eq: 0,
        }
    }

    fn col(u: Unknown, j: usize) -> usize {
        u as usize * N + j
    }

    /// Adds one structural equation: `sum coef * x (+ projected terms) = rhs`,
    /// matched regressor by regressor.
    fn equation(&mut self, terms: &[(Unknown, f64)], projected: &[(Unknown, f64)], rhs: Basis) {
        let base = self.eq * N;
        for k in 0..N {
            for &(u, c) in terms {
                self.a[(base + k, Self::col(u, k))] += c;
            }
            for &(u, c) in projected {
                for j in 0..N {
                    let pjk = self.proj[j][k];
                    if pjk != 0.0 {
                        self.a[(base + k, Self::col(u, j))] += c * pjk;
                    }
                }
            }
            self.b[base + k] = rhs[k];
        }
        self.eq += 1;
    }
}

/// Full-basis rows of the independent solution.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub rf: ReducedForm,
    pub rows: BTreeMap<&'static str, Basis>,
    pub condition_number: f64,
    pub closure: Closure,
}

impl OracleSolution {
    pub fn warning(&self) -> Option<String> {
        (self.condition_number > CONDITION_WARN).then(|| {
            format!(
                "matching system is ill-conditioned (condition number {:e})",
                self.condition_number
            )
        })
    }
}

fn unknown_name(u: Unknown) -> &'static str {
    match u {
        Unknown::C => "c",
        Unknown::L => "L",
        Unknown::S => "S",
        Unknown::R => "r",
        Unknown::I => "I",
        Unknown::Y => "y",
        Unknown::Yhat => "yhat",
        Unknown::Ipol => "i",
        Unknown::Epi => "Epi",
        Unknown::Pi => "pi",
        Unknown::U => "u",
        Unknown::Eyhat => "Eyhat",
        Unknown::Eu => "Eu",
    }
}

/// Solves the structural system (consumption, saving, investment,
/// saving-investment balance, resource constraint, output-gap definition,
/// IS curve, Fisher relation, Phillips curve, Taylor rule, Okun's law and
/// the two expectation definitions) for the coefficient rows.
pub fn solve_undetermined(p: &StructuralParams) -> Result<OracleSolution> {
    solve_with(p, Closure::RationalExpectations)
}

pub fn solve_with(p: &StructuralParams, closure: Closure) -> Result<OracleSolution> {
    use Unknown::*;
    let x = exogenous(p);
    let one = e(Regressor::Const);
    let zero = [0.0; N];
    let shocks_cs = |c_g: f64, c_tax: f64| {
        let mut rhs = add(scale(c_g, x.g), scale(c_tax, x.tax));
        rhs = add(rhs, scale(p.phi1, e(Regressor::Xi)));
        rhs = add(rhs, scale(p.phi2, x.chi));
        add(rhs, scale(p.phi3, e(Regressor::V)))
    };
    let mut sys = System::new(p);

    // consumption
    sys.equation(&[(C, 1.0), (L, -p.c1)], &[], add(scale(p.c0, one), shocks_cs(p.c3, -p.c4)));
    // saving
    sys.equation(
        &[(S, 1.0), (L, -p.s1), (R, -p.s2)],
        &[],
        add(scale(p.s0, one), shocks_cs(-p.s3, -p.s4)),
    );
    // investment
    let inv_rhs = add(
        add(scale(p.gamma1, x.long_run), scale(-p.gamma3, x.g)),
        add(scale(-p.gamma4, x.tax), scale(p.gamma5, x.chi)),
    );
    sys.equation(&[(I, 1.0), (R, p.gamma2)], &[], inv_rhs);
    sys.equation(&[(S, 1.0), (I, -1.0)], &[], zero);
    // resource constraint
    sys.equation(&[(Y, 1.0), (I, -1.0), (C, -1.0)], &[], x.g);
    // output gap
    sys.equation(&[(Yhat, 1.0), (Y, -1.0)], &[], scale(-1.0, x.ybar));
    match closure {
        Closure::RationalExpectations => sys.equation(
            &[(Yhat, 1.0), (Eyhat, -1.0), (Ipol, 1.0 / p.sigma), (Epi, -1.0 / p.sigma)],
            &[],
            scale(1.0 / p.sigma, x.natural_rate),
        ),
        Closure::Myopic => sys.equation(&[(R, 1.0), (Y, p.sigma)], &[], zero),
    }
    // Fisher relation
    sys.equation(&[(R, 1.0), (Ipol, -1.0), (Epi, 1.0)], &[], zero);
    // Phillips curve
    sys.equation(&[(Pi, 1.0), (Epi, -p.beta), (Yhat, -p.k)], &[], x.cost_push);
    // Taylor rule
    sys.equation(&[(Ipol, 1.0), (Pi, -p.alpha_pi), (Yhat, -p.alpha_y)], &[], zero);
    // Okun's law
    sys.equation(
        &[(U, 1.0), (Y, p.theta)],
        &[],
        add(x.natural_u, scale(p.theta, x.ybar)),
    );
    sys.equation(&[(Eyhat, 1.0)], &[(Yhat, -1.0)], zero);
    sys.equation(&[(Eu, 1.0)], &[(U, -1.0)], zero);
    debug_assert_eq!(sys.eq, UNKNOWNS.len());

    let condition_number = condition(&sys.a);
    if !condition_number.is_finite() || condition_number > CONDITION_FAIL {
        return Err(Error::SingularSystem { condition: condition_number });
    }
    let sol = sys
        .a
        .clone()
        .lu()
        .solve(&sys.b)
        .ok_or(Error::SingularSystem { condition: condition_number })?;

    let rows: BTreeMap<&'static str, Basis> = UNKNOWNS
        .iter()
        .map(|&u| (unknown_name(u), std::array::from_fn(|k| sol[System::col(u, k)])))
        .collect();
    let rf = extract(p, &rows)?;
    if let Some(w) = (condition_number > CONDITION_WARN).then_some(condition_number) {
        log::warn!("matching system condition number {w:e}");
    }
    Ok(OracleSolution {
        rf,
        rows,
        condition_number,
        closure,
    })
}

/// 2-norm condition number from the singular values.
fn condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Reads the proposition-shaped blocks off the full rows, insisting that
/// everything else vanishes.
fn extract(p: &StructuralParams, rows: &BTreeMap<&'static str, Basis>) -> Result<ReducedForm> {
    let mut blocks = BTreeMap::new();
    for v in Var::ALL {
        let row = rows[v.name()];
        let scale = row.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-9 * scale;
        let mut expected = [0.0; N];
        let mut block = Vec::with_capacity(v.len());
        for i in 0..v.len() {
            let j = v.regressor(i).index();
            block.push(row[j]);
            expected[j] = row[j];
        }
        for &(r, c) in v.fixed_terms() {
            expected[r.index()] += c;
        }
        for (k, (&got, &want)) in row.iter().zip(&expected).enumerate() {
            if (got - want).abs() > tol {
                return Err(Error::AnsatzInconsistent {
                    variable: v.name(),
                    column: Regressor::ALL[k].name(),
                    value: got - want,
                });
            }
        }
        blocks.insert(v, block);
    }
    Ok(ReducedForm::from_blocks(*p, blocks))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationResidual {
    pub max_abs: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip)]
    pub series: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport(pub BTreeMap<&'static str, EquationResidual>);

impl ResidualReport {
    pub fn get(&self, eq: &str) -> &EquationResidual {
        &self.0[eq]
    }

    pub fn all_pass(&self) -> bool {
        self.0.values().all(|r| r.pass)
    }
}

/// Residuals of the structural equations recomputed from the emitted
/// series of a simulated path.
pub fn residuals(path: &EquilibriumPath, threshold: f64) -> ResidualReport {
    let sh = &path.shocks;
    let p = &sh.params;
    let t_len = path.horizon();
    let mut out = BTreeMap::new();
    let mut put = |name: &'static str, f: &dyn Fn(usize) -> f64| {
        let series: Vec<f64> = (0..t_len).map(f).collect();
        let max_abs = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        out.insert(
            name,
            EquationResidual {
                max_abs,
                threshold,
                pass: max_abs <= threshold,
                series,
            },
        );
    };
    let ybar = |t: usize| sh.ybar[t];
    let natural_rate = |t: usize| {
        let lag = sh.ybar_at(t as isize - 1);
        p.sigma * (p.rho_ybar * p.rho_ybar * lag - ybar(t))
    };
    put("is_curve", &|t| {
        path.yhat[t] - path.eyhat[t] + (path.i[t] - path.epi[t] - natural_rate(t)) / p.sigma
    });
    put("okun", &|t| path.u[t] - sh.ubar[t] + p.theta * (path.y[t] - ybar(t)));
    put("phillips", &|t| path.pi[t] - p.beta * path.epi[t] - p.k * path.yhat[t] - sh.eps[t]);
    put("taylor", &|t| path.i[t] - p.alpha_pi * path.pi[t] - p.alpha_y * path.yhat[t]);
    put("saving_investment", &|t| path.saving[t] - path.inv[t]);
    put("resource", &|t| path.y[t] - path.inv[t] - path.c[t] - sh.g[t]);
    if path.mode == BudgetMode::Balanced {
        put("budget", &|t| sh.g[t] - sh.tax[t]);
    }
    ResidualReport(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Erratum {
    pub variable: &'static str,
    pub index: usize,
    pub regressor: &'static str,
    pub table: f64,
    pub oracle: f64,
    pub rel_diff: f64,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypoStatus {
    /// the corrected reading satisfies the structural identity, the printed one does not
    Confirmed,
    /// the printed reading satisfies it
    Rejected,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypoVerdict {
    pub variable: &'static str,
    pub index: usize,
    pub printed: f64,
    pub corrected: f64,
    pub oracle: f64,
    /// identity residual of each reading against the table's own upstream blocks
    pub printed_residual: f64,
    pub corrected_residual: f64,
    /// whether substituting the corrected reading closes the gap to the oracle
    pub corrected_matches_oracle: bool,
    /// the same against the solution whose IS curve omits expected output,
    /// which the remaining printed blocks follow
    pub corrected_matches_myopic: Option<bool>,
    pub printed_matches_myopic: Option<bool>,
    pub status: TypoStatus,
    pub identity: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrataReport {
    pub tol: f64,
    pub errata: Vec<Erratum>,
    pub typos: Vec<TypoVerdict>,
    pub condition_number: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ErrataReport {
    pub fn pattern(&self) -> BTreeSet<(&'static str, usize)> {
        self.errata.iter().map(|e| (e.variable, e.index)).collect()
    }
}

/// Absolute floor under the relative comparison.
pub const ABS_FLOOR: f64 = 1e-12;

pub fn differs(table: f64, oracle: f64, tol: f64) -> bool {
    (table - oracle).abs() > (tol * oracle.abs()).max(ABS_FLOOR)
}

fn rel_diff(table: f64, oracle: f64) -> f64 {
    (table - oracle).abs() / oracle.abs().max(ABS_FLOOR)
}

/// Entry-by-entry comparison. Notes and typo verdicts need the parameter
/// set, which both reduced forms carry.
pub fn compare(tables: &ReducedForm, oracle: &ReducedForm, tol: f64) -> ErrataReport {
    let p = tables.params;
    let myopic = solve_with(&p, Closure::Myopic).ok().map(|s| s.rf);
    let errata = tables
        .entries()
        .zip(oracle.entries())
        .filter(|((_, _, t), (_, _, o))| differs(*t, *o, tol))
        .map(|((v, i, t), (_, _, o))| {
            let note = note_for(v, i, t, myopic.as_ref(), tol);
            Erratum {
                variable: v.name(),
                index: i,
                regressor: v.regressor(i).name(),
                table: t,
                oracle: o,
                rel_diff: rel_diff(t, o),
                note,
            }
        })
        .collect();
    ErrataReport {
        tol,
        errata,
        typos: typo_verdicts(tables, oracle, myopic.as_ref(), tol),
        condition_number: f64::NAN,
        warning: None,
    }
}

fn note_for(v: Var, i: usize, table: f64, myopic: Option<&ReducedForm>, tol: f64) -> String {
    let matches_myopic = myopic.is_some_and(|m| !differs(table, m.z(v, i), tol));
    match ((v, i), matches_myopic) {
        ((Var::Pi, 4) | (Var::Eyhat, 0), _) => {
            "printed formula references the wrong upstream coefficient".to_string()
        }
        ((Var::Ipol, 4), _) => "inherits the pi[4] typo through the Taylor rule".to_string(),
        (_, true) => {
            "matches a solution whose IS curve omits expected output (r = -sigma*y)".to_string()
        }
        (_, false) => "diverges from the forward-looking and the myopic solutions".to_string(),
    }
}

fn typo_verdicts(
    tables: &ReducedForm,
    oracle: &ReducedForm,
    myopic: Option<&ReducedForm>,
    tol: f64,
) -> Vec<TypoVerdict> {
    let p = tables.params;
    let corrected = compute_with(&p, Reading::CORRECTED);
    let yhat = tables.block(Var::Yhat);
    let status = |printed_res: f64, corrected_res: f64, scale: f64| {
        let ok = |r: f64| r <= tol * scale.max(1.0);
        match (ok(printed_res), ok(corrected_res)) {
            (false, true) => TypoStatus::Confirmed,
            (true, _) => TypoStatus::Rejected,
            (false, false) => TypoStatus::Undecided,
        }
    };

    // Phillips curve, coefficient on the spending innovation
    let pi_target = p.beta * tables.z(Var::Epi, 4) + p.k * yhat[4];
    let (pi_printed, pi_fixed) = (tables.z(Var::Pi, 4), corrected.z(Var::Pi, 4));
    let pi_res = ((pi_printed - pi_target).abs(), (pi_fixed - pi_target).abs());

    // expected gap intercept: projection of the gap intercept
    let ey_target = yhat[0];
    let (ey_printed, ey_fixed) = (tables.z(Var::Eyhat, 0), corrected.z(Var::Eyhat, 0));
    let ey_res = ((ey_printed - ey_target).abs(), (ey_fixed - ey_target).abs());

    vec![
        TypoVerdict {
            variable: Var::Pi.name(),
            index: 4,
            printed: pi_printed,
            corrected: pi_fixed,
            oracle: oracle.z(Var::Pi, 4),
            printed_residual: pi_res.0,
            corrected_residual: pi_res.1,
            corrected_matches_oracle: !differs(pi_fixed, oracle.z(Var::Pi, 4), tol),
            corrected_matches_myopic: myopic.map(|m| !differs(pi_fixed, m.z(Var::Pi, 4), tol)),
            printed_matches_myopic: myopic.map(|m| !differs(pi_printed, m.z(Var::Pi, 4), tol)),
            status: status(pi_res.0, pi_res.1, pi_target.abs()),
            identity: "pi[4] = beta*Epi[4] + k*yhat[4]",
        },
        TypoVerdict {
            variable: Var::Eyhat.name(),
            index: 0,
            printed: ey_printed,
            corrected: ey_fixed,
            oracle: oracle.z(Var::Eyhat, 0),
            printed_residual: ey_res.0,
            corrected_residual: ey_res.1,
            corrected_matches_oracle: !differs(ey_fixed, oracle.z(Var::Eyhat, 0), tol),
            corrected_matches_myopic: myopic.map(|m| !differs(ey_fixed, m.z(Var::Eyhat, 0), tol)),
            printed_matches_myopic: myopic.map(|m| !differs(ey_printed, m.z(Var::Eyhat, 0), tol)),
            status: status(ey_res.0, ey_res.1, ey_target.abs()),
            identity: "Eyhat[0] = yhat[0]",
        },
    ]
}

/// Tables against the forward-looking solution at one parameter set.
pub fn audit(p: &StructuralParams, tol: f64) -> Result<ErrataReport> {
    let sol = solve_undetermined(p)?;
    let mut report = compare(&compute_all(p), &sol.rf, tol);
    report.condition_number = sol.condition_number;
    report.warning = sol.warning();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub seed: u64,
    pub draws: usize,
    pub tol: f64,
    /// `(variable, index)` pairs flagged on the first draw
    pub pattern: Vec<(&'static str, usize)>,
    /// draws whose flagged set differs from the first
    pub unstable_draws: Vec<usize>,
    pub stable: bool,
    pub typo_status: BTreeMap<String, Vec<TypoStatus>>,
    pub max_condition_number: f64,
}

/// Runs [`audit`] on `draws` random valid parameter sets and checks that the
/// flagged entries are the same every time.
pub fn errata_stability(seed: u64, draws: usize, tol: f64) -> Result<StabilityReport> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<StructuralParams> = (0..draws).map(|_| sample_valid(&mut rng)).collect();
    let reports: Vec<ErrataReport> = params.par_iter().map(|p| audit(p, tol)).collect::<Result<_>>()?;
    let first = reports.first().map(|r| r.pattern()).unwrap_or_default();
    let unstable_draws: Vec<usize> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.pattern() != first)
        .map(|(i, _)| i)
        .collect();
    let mut typo_status: BTreeMap<String, Vec<TypoStatus>> = BTreeMap::new();
    for r in &reports {
        for t in &r.typos {
            typo_status
                .entry(format!("{}[{}]", t.variable, t.index))
                .or_default()
                .push(t.status);
        }
    }
    Ok(StabilityReport {
        seed,
        draws,
        tol,
        pattern: first.into_iter().collect(),
        stable: unstable_draws.is_empty(),
        unstable_draws,
        typo_status,
        max_condition_number: reports.iter().map(|r| r.condition_number).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shocks::draw;
    use crate::sim::simulate;

    fn random(seed: u64) -> StructuralParams {
        sample_valid(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn solves_at_defaults() {
        let sol = solve_undetermined(&StructuralParams::defaults()).unwrap();
        assert!(sol.condition_number < CONDITION_WARN);
        assert!(sol.warning().is_none());
    }

    #[test]
    fn okun_family_holds_in_the_solution() {
        for seed in 0..5 {
            let p = random(seed);
            let rf = solve_undetermined(&p).unwrap().rf;
            for i in 0..=10 {
                let want = -p.theta * rf.z(Var::Yhat, i);
                assert!((rf.z(Var::U, i) - want).abs() <= 1e-10 * want.abs().max(1.0));
            }
            assert!((rf.z(Var::U, 11) - p.theta).abs() <= 1e-12);
            assert!((rf.z(Var::U, 12) - p.rho_u).abs() <= 1e-12);
        }
    }

    #[test]
    fn no_expectation_channel_without_gamma1() {
        let mut p = random(3);
        p.gamma1 = 0.0;
        let rf = solve_undetermined(&p).unwrap().rf;
        assert!(rf.z(Var::Y, 1).abs() <= 1e-14);
        assert!(rf.z(Var::Y, 2).abs() <= 1e-14);
    }

    #[test]
    fn shock_scales_do_not_enter() {
        let p = random(8);
        let mut q = p;
        for name in crate::params::SCALES {
            q.set(name, 2.0 * p.get(name).unwrap()).unwrap();
        }
        let a = solve_undetermined(&p).unwrap().rf;
        let b = solve_undetermined(&q).unwrap().rf;
        for ((_, _, x), (_, _, y)) in a.entries().zip(b.entries()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn self_comparison_is_empty() {
        let rf = solve_undetermined(&StructuralParams::defaults()).unwrap().rf;
        assert!(compare(&rf, &rf, 1e-6).errata.is_empty());
    }

    #[test]
    fn oracle_path_satisfies_structure() {
        let p = StructuralParams::defaults();
        let rf = solve_undetermined(&p).unwrap().rf;
        let sim = simulate(&rf, &draw(&p, 42, 2000, None), BudgetMode::Independent).unwrap();
        let rep = residuals(&sim, 1e-9);
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn resource_residual_flags_a_perturbed_entry() {
        let p = StructuralParams::defaults();
        let mut rf = solve_undetermined(&p).unwrap().rf;
        let z = rf.z(Var::Y, 3);
        rf.set(Var::Y, 3, z + 1e-3);
        let init = crate::shocks::InitialLags {
            g: 0.5,
            ..Default::default()
        };
        let sim = simulate(&rf, &draw(&p, 1, 200, Some(init)), BudgetMode::Independent).unwrap();
        let rep = residuals(&sim, 1e-9);
        assert!(rep.get("resource").max_abs > 1e-4);
        assert!(!rep.get("resource").pass);
    }

    #[test]
    fn budget_residual_in_balanced_mode() {
        let p = StructuralParams::defaults();
        let rf = compute_all(&p);
        let sim = simulate(&rf, &draw(&p, 1, 100, None), BudgetMode::Balanced).unwrap();
        let rep = residuals(&sim, 1e-12);
        assert_eq!(rep.get("budget").max_abs, 0.0);
    }

    #[test]
    fn typo_verdicts_are_resolved() {
        let rep = audit(&random(21), 1e-8).unwrap();
        for t in &rep.typos {
            assert_eq!(t.status, TypoStatus::Confirmed, "{t:?}");
        }
    }

    #[test]
    fn myopic_closure_reproduces_the_printed_rate_and_output_blocks() {
        let p = random(5);
        let tables = compute_all(&p);
        let m = solve_with(&p, Closure::Myopic).unwrap().rf;
        for v in [Var::R, Var::Y, Var::Yhat, Var::U] {
            for i in [0, 1, 2, 3, 4, 5, 6, 9, 10] {
                assert!(!differs(tables.z(v, i), m.z(v, i), 1e-8), "{v}[{i}]");
            }
        }
    }
}
