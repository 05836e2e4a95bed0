//! The order-nine transition matrix of the asymmetric-information system,
//! its spectrum and characteristic polynomial, and Blanchard-Kahn verdicts.
//!
//! Rows are ordered r, y, yhat, pi, c, I, i, u, Psi. Columns carry
//! ybar[t-4], ybar[t-2], ybar[t-3], g[t-4], g[t-2], g[t-3], tax[t-1],
//! chi[t-1], eps[t-1]. The matrix is transcribed as displayed, with the
//! eigenvalue removed from the diagonal; row `i`, column 2 keeps its printed
//! `rho_ybar^2`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Complex, DMatrix, SMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{compute_all, ReducedForm, Var};
use crate::error::{Error, Result};
use crate::params::StructuralParams;

pub const ORDER: usize = 9;
pub type Matrix9 = SMatrix<f64, ORDER, ORDER>;

pub const ROWS: [&str; ORDER] = ["r", "y", "yhat", "pi", "c", "I", "i", "u", "Psi"];
pub const COLUMNS: [&str; ORDER] = [
    "ybar[t-4]", "ybar[t-2]", "ybar[t-3]", "g[t-4]", "g[t-2]", "g[t-3]", "tax[t-1]", "chi[t-1]", "eps[t-1]",
];
pub const SHOCK_COLUMNS: [&str; 8] = [
    "omega[t-3]", "omega[t-1]", "eta[t-3]", "eta[t-1]", "eta[t]", "L[t]", "lambda[t]", "sigma_cp[t]",
];

const ROW_VARS: [Var; 8] = [Var::R, Var::Y, Var::Yhat, Var::Pi, Var::C, Var::I, Var::Ipol, Var::U];

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    pub a: Matrix9,
    /// loadings on [`SHOCK_COLUMNS`]
    pub b: SMatrix<f64, ORDER, 8>,
}

pub fn build(rf: &ReducedForm) -> TransitionSystem {
    let p = &rf.params;
    let (ry, rg, rt, rc, re) = (p.rho_ybar, p.rho_g, p.rho_tax, p.rho_chi, p.rho_eps);
    let mut a = Matrix9::zeros();
    let mut b = SMatrix::<f64, ORDER, 8>::zeros();
    for (row, &v) in ROW_VARS.iter().enumerate() {
        let z = |i: usize| rf.z(v, i);
        let cost_push = matches!(v, Var::Pi | Var::Ipol);
        a[(row, 0)] = z(1) * ry.powi(3);
        a[(row, 1)] = if v == Var::Ipol { z(1) * ry.powi(2) } else { z(1) * ry };
        a[(row, 2)] = -z(1) * ry.powi(2);
        a[(row, 3)] = z(3) * rg.powi(4);
        a[(row, 4)] = z(3) * rg.powi(2);
        a[(row, 5)] = -z(3) * rg.powi(3);
        a[(row, 6)] = rt * z(5);
        a[(row, 7)] = rc * z(7);
        if cost_push {
            a[(row, 8)] = re * z(12);
        }
        b[(row, 0)] = z(1) * ry.powi(2);
        b[(row, 1)] = z(1);
        b[(row, 2)] = z(3) * rg.powi(3);
        b[(row, 3)] = rg * z(3);
        b[(row, 4)] = z(3);
        b[(row, 5)] = z(5);
        b[(row, 6)] = z(7);
        if cost_push {
            b[(row, 7)] = z(12);
        }
    }
    a[(8, 7)] = rc * rc;
    b[(8, 6)] = 1.0;
    TransitionSystem { a, b }
}

/// Eigenvalues by real Schur decomposition, sorted by decreasing modulus
/// (ties broken by real then imaginary part) so output order is stable.
pub fn eigen(a: &Matrix9) -> Result<Vec<Complex<f64>>> {
    if !a.iter().all(|x| x.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let schur = nalgebra::Schur::try_new(*a, f64::EPSILON, 10_000).ok_or(Error::ConvergenceFailure)?;
    let mut eigs: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    if eigs.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    eigs.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
    Ok(eigs)
}

/// A unit eigenvector for `lambda`: the right singular vector of `A - lambda I`
/// belonging to its smallest singular value.
pub fn eigenvector(a: &Matrix9, lambda: Complex<f64>) -> Vec<Complex<f64>> {
    let n = ORDER;
    let mut m = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| Complex::new(a[(i, j)], 0.0));
    for i in 0..n {
        m[(i, i)] -= lambda;
    }
    // right singular vector of the smallest singular value minimises the residual
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let k = svd.singular_values.imin();
    (0..n).map(|j| v_t[(k, j)].conj()).collect()
}

/// `|| A v - lambda v || / (||A|| ||v||)` for a computed pair.
pub fn eigen_residual(a: &Matrix9, lambda: Complex<f64>, v: &[Complex<f64>]) -> f64 {
    let mut num = 0.0;
    for i in 0..ORDER {
        let mut s = Complex::new(0.0, 0.0);
        for j in 0..ORDER {
            s += v[j] * a[(i, j)];
        }
        s -= lambda * v[i];
        num += s.norm_sqr();
    }
    let vn: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    num.sqrt() / (a.norm().max(f64::MIN_POSITIVE) * vn)
}

/// Coefficients `k0..k9` of `det(A - aI) = sum k_i a^i`, by La Budde's
/// recursion on the Hessenberg form of `A`. Shares no iteration with
/// [`eigen`]; the trace-power (Faddeev-LeVerrier) recursion is avoided
/// because it loses the small coefficients once `A` has a large eigenvalue.
pub fn char_poly(a: &Matrix9) -> [f64; ORDER + 1] {
    let n = ORDER;
    let h = a.hessenberg().h();
    // p[i] holds det(aI - H[..i, ..i]), lowest degree first
    let mut p: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    p.push(vec![1.0]);
    for i in 0..n {
        let prev = &p[i];
        let mut next = vec![0.0; i + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= h[(i, i)] * c;
        }
        let mut beta = 1.0;
        for m in 1..=i {
            beta *= h[(i - m + 1, i - m)];
            let w = h[(i - m, i)] * beta;
            if w != 0.0 {
                for (d, &c) in p[i - m].iter().enumerate() {
                    next[d] -= w * c;
                }
            }
        }
        p.push(next);
    }
    // n is odd, so det(A - aI) = -det(aI - A)
    std::array::from_fn(|d| -p[n][d])
}

/// Evaluates `sum k_i a^i` by Horner's rule.
pub fn poly_eval(k: &[f64], a: Complex<f64>) -> Complex<f64> {
    k.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * a + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Determinate,
    Indeterminate,
    NoEquilibrium,
    Borderline,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Determinate => "determinate",
            Verdict::Indeterminate => "indeterminate",
            Verdict::NoEquilibrium => "no_equilibrium",
            Verdict::Borderline => "borderline",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub stable: usize,
    pub unstable: usize,
    pub borderline: usize,
}

pub fn count(eigs: &[Complex<f64>], tau: f64) -> Counts {
    let mut c = Counts {
        stable: 0,
        unstable: 0,
        borderline: 0,
    };
    for e in eigs {
        let m = e.norm();
        if m < 1.0 - tau {
            c.stable += 1;
        } else if m > 1.0 + tau {
            c.unstable += 1;
        } else {
            c.borderline += 1;
        }
    }
    c
}

/// Compares the number of stable roots with the number of predetermined
/// variables.
pub fn classify(eigs: &[Complex<f64>], n_pre: usize, tau: f64) -> (Counts, Verdict) {
    let c = count(eigs, tau);
    (c, stable_count_rule(c, n_pre))
}

pub fn stable_count_rule(c: Counts, n_pre: usize) -> Verdict {
    if c.borderline > 0 {
        Verdict::Borderline
    } else if c.stable == n_pre {
        Verdict::Determinate
    } else if c.stable > n_pre {
        Verdict::Indeterminate
    } else {
        Verdict::NoEquilibrium
    }
}

/// The textbook form: as many explosive roots as non-predetermined variables.
pub fn standard_rule(c: Counts, n_pre: usize) -> Verdict {
    let forward = ORDER - n_pre;
    if c.borderline > 0 {
        Verdict::Borderline
    } else if c.unstable == forward {
        Verdict::Determinate
    } else if c.unstable < forward {
        Verdict::Indeterminate
    } else {
        Verdict::NoEquilibrium
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenEntry {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminacyReport {
    pub eigenvalues: Vec<EigenEntry>,
    pub k: Vec<f64>,
    pub counts: Counts,
    pub tau: f64,
    pub verdicts: BTreeMap<usize, Verdict>,
    pub rule: &'static str,
}

pub fn determinacy(rf: &ReducedForm, tau: f64) -> Result<DeterminacyReport> {
    let sys = build(rf);
    let eigs = eigen(&sys.a)?;
    let counts = count(&eigs, tau);
    Ok(DeterminacyReport {
        eigenvalues: eigs
            .iter()
            .map(|e| EigenEntry {
                re: e.re,
                im: e.im,
                modulus: e.norm(),
            })
            .collect(),
        k: char_poly(&sys.a).to_vec(),
        counts,
        tau,
        verdicts: (0..=ORDER).map(|n| (n, stable_count_rule(counts, n))).collect(),
        rule: "stable-count",
    })
}

/// One sweep axis: `n` evenly spaced values of a parameter from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    /// `NAME:LO:HI:N`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Usage(format!("expected NAME:LO:HI:N, got `{s}`"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let lo = parts[1].parse().map_err(|_| bad())?;
        let hi = parts[2].parse().map_err(|_| bad())?;
        let n: usize = parts[3].parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(Axis {
            name: parts[0].to_string(),
            lo,
            hi,
            n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub axis1: f64,
    pub axis2: f64,
    /// `None` when the grid point fails validation
    pub counts: Option<Counts>,
    pub verdict: Option<Verdict>,
}

/// Determinacy verdicts over a two-parameter grid, rows along `axis1`.
///
/// Cells are independent; `workers` only bounds parallelism and never
/// changes the result or its order.
pub fn sweep(
    base: &StructuralParams,
    axis1: &Axis,
    axis2: &Axis,
    n_pre: usize,
    tau: f64,
    workers: usize,
) -> Result<Vec<SweepCell>> {
    for ax in [axis1, axis2] {
        if base.get(&ax.name).is_none() {
            return Err(Error::UnknownParameter(ax.name.clone()));
        }
    }
    let cells: Vec<(usize, usize)> = (0..axis1.n)
        .flat_map(|i| (0..axis2.n).map(move |j| (i, j)))
        .collect();
    let run = |&(i, j): &(usize, usize)| -> Result<SweepCell> {
        let (v1, v2) = (axis1.value(i), axis2.value(j));
        let mut p = *base;
        p.set(&axis1.name, v1)?;
        p.set(&axis2.name, v2)?;
        let mut cell = SweepCell {
            axis1: v1,
            axis2: v2,
            counts: None,
            verdict: None,
        };
        if p.check().is_ok() {
            let sys = build(&compute_all(&p));
            let (counts, verdict) = classify(&eigen(&sys.a)?, n_pre, tau);
            cell.counts = Some(counts);
            cell.verdict = Some(verdict);
        }
        Ok(cell)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| cells.par_iter().map(run).collect())
}
