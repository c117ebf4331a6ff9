//! Semigroup estimates turned into pass/fail measurements on discrete trajectories.

use serde::Serialize;

use crate::discrete::{
    assemble, assemble_scalar, evolve, laplace_resolvent, lp_norm, resolvent, Grid, GridFunction, Scheme, Stepper,
};
use crate::error::{Error, Result};
use crate::fields::CoefficientField;

/// Safety factor applied to the two-grid estimate of the error constant.
pub const TOLERANCE_SAFETY: f64 = 2.0;
/// Round-off floor added to every C(h² + dt) tolerance.
pub const TOLERANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationOutcome {
    pub check: String,
    pub config: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    /// C in the tolerance model C(h² + dt) + TOLERANCE_FLOOR.
    pub tol_c: f64,
    pub h: f64,
    pub dt: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationOutcome {
    #[allow(clippy::too_many_arguments)]
    pub fn new(check: &str, config: &str, measured: f64, bound: f64, slack: f64, tol_c: f64, h: f64, dt: f64) -> Self {
        let tolerance = tol_c * (h * h + dt) + TOLERANCE_FLOOR;
        VerificationOutcome {
            check: check.into(),
            config: config.into(),
            measured,
            bound,
            slack,
            tol_c,
            h,
            dt,
            tolerance,
            pass: slack >= -tolerance,
        }
    }

    pub fn with_config(mut self, config: &str) -> Self {
        self.config = config.into();
        self
    }

    /// Same measurement with a fixed absolute tolerance instead of the C(h²+dt) model.
    pub fn with_fixed_tolerance(mut self, tolerance: f64) -> Self {
        self.tol_c = 0.0;
        self.tolerance = tolerance;
        self.pass = self.slack >= -tolerance;
        self
    }
}

/// C from the slack at (h, dt) and at (h/2, dt/2), assuming error = C(h² + dt), times the safety factor.
pub fn fit_tolerance_constant(coarse: f64, fine: f64, h: f64, dt: f64) -> f64 {
    let spread = 0.75 * h * h + 0.5 * dt;
    TOLERANCE_SAFETY * (coarse - fine).abs() / spread
}

/// Re-judges the fine-grid outcome with C fitted from the coarse/fine slacks (the fine run must
/// use h/2 and dt/2).
pub fn two_grid(coarse: &VerificationOutcome, fine: VerificationOutcome) -> VerificationOutcome {
    let c = fit_tolerance_constant(coarse.slack, fine.slack, coarse.h, coarse.dt);
    VerificationOutcome::new(&fine.check, &fine.config, fine.measured, fine.bound, fine.slack, c, fine.h, fine.dt)
}

/// ‖T_h(t)f‖ₚ ≤ (1+tol)‖f‖ₚ and ‖T_h(t)f‖_∞ ≤ e^{−c₀t}‖f‖_∞(1+tol) over the recorded times.
/// The slack is the smallest relative margin.
pub fn verify_contraction(traj: &crate::discrete::Trajectory, p: f64, c0_inf: f64, tol_c: f64) -> Result<VerificationOutcome> {
    let j = traj
        .p_list
        .iter()
        .position(|q| *q == p)
        .ok_or_else(|| Error::Config(format!("trajectory has no norms for p = {p}")))?;
    let f_p = traj.norms[0][j];
    let f_sup = traj.sup[0];
    let mut worst = 0.0f64;
    for (k, t) in traj.times.iter().enumerate() {
        if f_p > 0.0 {
            worst = worst.max(traj.norms[k][j] / f_p);
        }
        if f_sup > 0.0 {
            worst = worst.max(traj.sup[k] / (f_sup * (-c0_inf * t).exp()));
        }
    }
    let id = format!("contraction(p={p})");
    Ok(VerificationOutcome::new(&id, "", worst, 1.0, 1.0 - worst, tol_c, traj.h, traj.dt))
}

/// Largest step-to-step increase of ‖T_h(t)f‖ₚ relative to ‖f‖ₚ, as a (negated) slack.
pub fn verify_monotone(traj: &crate::discrete::Trajectory, p: f64, tol_c: f64) -> Result<VerificationOutcome> {
    let j = traj
        .p_list
        .iter()
        .position(|q| *q == p)
        .ok_or_else(|| Error::Config(format!("trajectory has no norms for p = {p}")))?;
    let f_p = traj.norms[0][j];
    let rise = if f_p > 0.0 {
        traj.norms.windows(2).map(|w| (w[1][j] - w[0][j]) / f_p).fold(0.0, f64::max)
    } else {
        0.0
    };
    let id = format!("monotone(p={p})");
    Ok(VerificationOutcome::new(&id, "", rise, 0.0, -rise, tol_c, traj.h, traj.dt))
}

/// |f|ᵖ pointwise as scalar data.
fn modulus_power(f: &GridFunction, p: f64) -> GridFunction {
    GridFunction { grid: f.grid, m: 1, data: f.modulus().iter().map(|r| r.powf(p)).collect() }
}

/// min over steps and nodes of S_h(t)|f|ᵖ − |T_h(t)f|ᵖ, normalized by ‖f‖_∞ᵖ.
pub fn domination_slack(field: &dyn CoefficientField, f: &GridFunction, p: f64, t_end: f64, dt: f64, scheme: Scheme) -> Result<f64> {
    let grid = f.grid;
    let op = assemble(field, &grid)?;
    let sop = assemble_scalar(field, &grid)?;
    let (steps, dt) = crate::discrete::step_count(t_end, dt)?;
    let st = Stepper::new(&op, scheme, dt)?;
    let ss = Stepper::new(&sop, scheme, dt)?;
    let scale = crate::discrete::sup_norm(f).powf(p);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut u = f.data.clone();
    let mut s = modulus_power(f, p).data;
    let mut worst = f64::INFINITY;
    for k in 0..=steps {
        if k > 0 {
            u = st.step(&u)?;
            s = ss.step(&s)?;
        }
        let m = f.m;
        for (i, sv) in s.iter().enumerate() {
            let r2: f64 = u[i * m..(i + 1) * m].iter().map(|t| t * t).sum();
            worst = worst.min((sv - r2.powf(p / 2.0)) / scale);
        }
    }
    Ok(worst)
}

/// Two-grid domination check: C is fitted from the slacks at (h, dt) and (h/2, dt/2) and the fine
/// run is judged against C(h²/4 + dt/2).
#[allow(clippy::too_many_arguments)]
pub fn verify_domination<F: Fn(&Grid) -> GridFunction>(
    field: &dyn CoefficientField,
    f_on: F,
    p: f64,
    t_end: f64,
    dt: f64,
    grid: &Grid,
    scheme: Scheme,
) -> Result<VerificationOutcome> {
    let fine_grid = Grid::new(grid.d, grid.half_width, 2 * grid.n - 1)?;
    let coarse = domination_slack(field, &f_on(grid), p, t_end, dt, scheme)?;
    let fine = domination_slack(field, &f_on(&fine_grid), p, t_end, dt / 2.0, scheme)?;
    let id = format!("domination(p={p})");
    let label = field.label();
    Ok(two_grid(
        &VerificationOutcome::new(&id, &label, -coarse, 0.0, coarse, 0.0, grid.h(), dt),
        VerificationOutcome::new(&id, &label, -fine, 0.0, fine, 0.0, fine_grid.h(), dt / 2.0),
    ))
}

/// Gaussian exp(−|x|²/(2σ²)) in the first component.
pub fn gaussian_probe(grid: &Grid, m: usize, variance: f64) -> GridFunction {
    GridFunction::from_fn(*grid, m, |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        let mut v = vec![0.0; m];
        v[0] = (-r2 / (2.0 * variance)).exp();
        v
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub times: Vec<f64>,
    /// log(e^{c₀t}‖T_h(t)fₜ‖_q / ‖fₜ‖ₚ)
    pub log_ratios: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
    pub pass: bool,
}

/// Least-squares slope of log(e^{c₀t}‖T_h(t)fₜ‖_q/‖fₜ‖ₚ) against log t over `samples` log-spaced
/// times, where the probe fₜ may depend on t. Passes within 15% of −(d/2)(1/p − 1/q), or within
/// ±0.05 when that is 0.
#[allow(clippy::too_many_arguments)]
pub fn fit_hypercontractive_exponent<F: Fn(f64) -> GridFunction>(
    field: &dyn CoefficientField,
    grid: &Grid,
    probe: F,
    p: f64,
    q: f64,
    t_window: (f64, f64),
    samples: usize,
    steps_per_sample: usize,
    c0: f64,
) -> Result<ExponentFit> {
    let (t0, t1) = t_window;
    if samples < 8 || !(t0 > 0.0) || !(t1 > t0) {
        return Err(Error::Config(format!(
            "exponent fit needs >= 8 samples in a window 0 < t0 < t1 (got {samples} in ({t0}, {t1}))"
        )));
    }
    let op = assemble(field, grid)?;
    let mut times = Vec::with_capacity(samples);
    let mut log_ratios = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = t0 * (t1 / t0).powf(k as f64 / (samples - 1) as f64);
        let f = probe(t);
        let traj = evolve(&op, &f, t, t / steps_per_sample as f64, Scheme::CrankNicolson, &[], &[])?;
        let ratio = lp_norm(&traj.last, q) / lp_norm(&f, p);
        times.push(t);
        log_ratios.push(ratio.ln() + c0 * t);
    }
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let n = samples as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = log_ratios.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&log_ratios).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let inv = |r: f64| if r.is_infinite() { 0.0 } else { 1.0 / r };
    let expected = -(grid.d as f64 / 2.0) * (inv(p) - inv(q));
    let pass = if expected == 0.0 {
        slope.abs() <= 0.05
    } else {
        (slope - expected).abs() <= 0.15 * expected.abs()
    };
    Ok(ExponentFit { times, log_ratios, slope, expected, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeOrder {
    pub scheme: Scheme,
    /// ‖u_dt − u_{dt/2}‖₂ for consecutive dt in the list.
    pub differences: Vec<f64>,
    /// log₂ of consecutive difference ratios.
    pub orders: Vec<f64>,
    pub observed: f64,
    pub required: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeConsistency {
    pub schemes: Vec<SchemeOrder>,
    /// (scheme a, scheme b, ‖u_a − u_b‖₂/‖f‖₂) at the smallest dt.
    pub gaps: Vec<(Scheme, Scheme, f64)>,
    pub gap_threshold: f64,
    pub pass: bool,
}

/// Step-halving order estimates for every scheme plus pairwise gaps at the smallest dt.
pub fn verify_scheme_consistency(
    op: &crate::discrete::DiscreteOperator,
    f: &GridFunction,
    t_end: f64,
    dt_list: &[f64],
    gap_threshold: f64,
) -> Result<SchemeConsistency> {
    if dt_list.len() < 3 || dt_list.windows(2).any(|w| (w[1] * 2.0 - w[0]).abs() > 1e-12 * w[0]) {
        return Err(Error::Config("scheme consistency needs at least 3 halving time steps".into()));
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let fnorm = dist(&f.data, &vec![0.0; f.data.len()]).max(f64::MIN_POSITIVE);
    let mut schemes = Vec::new();
    let mut finest = Vec::new();
    for s in Scheme::ALL {
        let finals: Vec<Vec<f64>> = dt_list
            .iter()
            .map(|&dt| evolve(op, f, t_end, dt, s, &[], &[]).map(|t| t.last.data))
            .collect::<Result<_>>()?;
        let differences: Vec<f64> = finals.windows(2).map(|w| dist(&w[0], &w[1])).collect();
        let orders: Vec<f64> = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let observed = *orders.last().unwrap();
        let required = if s == Scheme::CrankNicolson { 1.8 } else { 0.9 };
        schemes.push(SchemeOrder { scheme: s, differences, orders, observed, required, pass: observed >= required });
        finest.push((s, finals.last().unwrap().clone()));
    }
    let mut gaps = Vec::new();
    for i in 0..finest.len() {
        for j in i + 1..finest.len() {
            gaps.push((finest[i].0, finest[j].0, dist(&finest[i].1, &finest[j].1) / fnorm));
        }
    }
    let pass = schemes.iter().all(|s| s.pass) && gaps.iter().all(|g| g.2 <= gap_threshold);
    Ok(SchemeConsistency { schemes, gaps, gap_threshold, pass })
}

/// Relative L² difference between the direct resolvent and the Laplace quadrature of the
/// semigroup; T is doubled once if the tail bound e^{−λT}‖T_h(T)f‖ < 10⁻⁸‖f‖ is unmet.
pub fn verify_resolvent_laplace(
    op: &crate::discrete::DiscreteOperator,
    lambda: f64,
    f: &GridFunction,
    t_end: f64,
    dt: f64,
    rel_tol: f64,
) -> Result<VerificationOutcome> {
    let direct = resolvent(op, lambda, f)?;
    let (mut lap, mut tail) = laplace_resolvent(op, lambda, f, t_end, dt)?;
    if tail >= 1e-8 {
        (lap, tail) = laplace_resolvent(op, lambda, f, 2.0 * t_end, dt)?;
    }
    let diff = lp_norm(&lap.with_data(lap.data.iter().zip(&direct.data).map(|(a, b)| a - b).collect()), 2.0);
    let dn = lp_norm(&direct, 2.0);
    let rel = if dn > 0.0 { diff / dn } else { diff };
    let measured = if tail >= 1e-8 { f64::INFINITY } else { rel };
    let id = format!("resolvent_laplace(lambda={lambda})");
    Ok(VerificationOutcome::new(&id, &op.label, measured, rel_tol, rel_tol - measured, 0.0, op.grid.h(), dt))
}

/// ‖f‖₂^{2+4/d} / (‖∇f‖₂² ‖f‖₁^{4/d}) with forward-difference gradients (Dirichlet zeros outside).
pub fn nash_quotient(f: &GridFunction) -> Result<f64> {
    let g = f.grid;
    let d = g.d as f64;
    let l2 = lp_norm(f, 2.0);
    if l2 == 0.0 {
        return Err(Error::InvalidParameters("Nash quotient of the zero function".into()));
    }
    let l1 = lp_norm(f, 1.0);
    let h = g.h();
    let mut grad2 = 0.0;
    for idx in 0..g.len() {
        for k in 0..g.d {
            let mut delta = [0i64; 2];
            delta[k] = 1;
            let nb = g.shifted(idx, delta);
            for c in 0..f.m {
                let a = f.at(idx)[c];
                let b = nb.map(|j| f.at(j)[c]).unwrap_or(0.0);
                grad2 += ((b - a) / h).powi(2);
            }
        }
        // the backward edge into the boundary on the low side
        for k in 0..g.d {
            let mut delta = [0i64; 2];
            delta[k] = -1;
            if g.shifted(idx, delta).is_none() {
                for c in 0..f.m {
                    grad2 += (f.at(idx)[c] / h).powi(2);
                }
            }
        }
    }
    grad2 *= g.cell();
    Ok(l2.powf(2.0 + 4.0 / d) / (grad2 * l1.powf(4.0 / d)))
}

/// Supremum of the Nash quotient over an ensemble.
pub fn nash_ratio(functions: &[GridFunction]) -> Result<f64> {
    functions.iter().map(nash_quotient).try_fold(0.0f64, |acc, q| q.map(|q| acc.max(q)))
}
