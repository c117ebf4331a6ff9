//! Time steppers, trajectories and resolvent solves.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::gmres::{gmres, SOLVER_TOL};
use super::grid::{lp_norm, sup_norm, GridFunction};
use super::operator::DiscreteOperator;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
    Trotter,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::ImplicitEuler, Scheme::CrankNicolson, Scheme::Trotter];

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::ImplicitEuler => "implicit_euler",
            Scheme::CrankNicolson => "crank_nicolson",
            Scheme::Trotter => "trotter",
        }
    }
}

/// A scheme with its step matrices built for a fixed dt.
pub struct Stepper<'a> {
    pub op: &'a DiscreteOperator,
    pub scheme: Scheme,
    pub dt: f64,
    lhs: CsrMatrix,
    rhs: Option<CsrMatrix>,
    /// exp(−dt·V(x)) per node for the Trotter potential substep.
    pot_exp: Vec<DMatrix<f64>>,
}

impl<'a> Stepper<'a> {
    pub fn new(op: &'a DiscreteOperator, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameters(format!("time step dt = {dt} must be positive")));
        }
        let id = CsrMatrix::identity(op.dim());
        let (lhs, rhs, pot_exp) = match scheme {
            Scheme::ImplicitEuler => (CsrMatrix::linear_combination(&[(1.0, &id), (-dt, &op.full)]), None, Vec::new()),
            Scheme::CrankNicolson => (
                CsrMatrix::linear_combination(&[(1.0, &id), (-0.5 * dt, &op.full)]),
                Some(CsrMatrix::linear_combination(&[(1.0, &id), (0.5 * dt, &op.full)])),
                Vec::new(),
            ),
            Scheme::Trotter => {
                let tr = op.transport();
                let pot = op.v_blocks.iter().map(|v| linalg::expm(&(v * -dt))).collect();
                (
                    CsrMatrix::linear_combination(&[(1.0, &id), (-0.5 * dt, &tr)]),
                    Some(CsrMatrix::linear_combination(&[(1.0, &id), (0.5 * dt, &tr)])),
                    pot,
                )
            }
        };
        Ok(Stepper { op, scheme, dt, lhs, rhs, pot_exp })
    }

    pub fn step(&self, u: &[f64]) -> Result<Vec<f64>> {
        let m = self.op.m;
        let mut b = match self.scheme {
            Scheme::Trotter => {
                let mut out = vec![0.0; u.len()];
                for (i, e) in self.pot_exp.iter().enumerate() {
                    let y = e * DVector::from_column_slice(&u[i * m..(i + 1) * m]);
                    out[i * m..(i + 1) * m].copy_from_slice(y.as_slice());
                }
                out
            }
            _ => u.to_vec(),
        };
        if let Some(r) = &self.rhs {
            b = r.apply(&b);
        }
        let mut x = b.clone();
        gmres(&self.lhs, &b, &mut x, SOLVER_TOL)?;
        Ok(x)
    }
}

pub fn step_implicit_euler(op: &DiscreteOperator, u: &GridFunction, dt: f64) -> Result<GridFunction> {
    Ok(u.with_data(Stepper::new(op, Scheme::ImplicitEuler, dt)?.step(&u.data)?))
}

pub fn step_crank_nicolson(op: &DiscreteOperator, u: &GridFunction, dt: f64) -> Result<GridFunction> {
    Ok(u.with_data(Stepper::new(op, Scheme::CrankNicolson, dt)?.step(&u.data)?))
}

pub fn step_trotter(op: &DiscreteOperator, u: &GridFunction, dt: f64) -> Result<GridFunction> {
    Ok(u.with_data(Stepper::new(op, Scheme::Trotter, dt)?.step(&u.data)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub dt: f64,
    pub h: f64,
    pub times: Vec<f64>,
    pub p_list: Vec<f64>,
    /// norms[k][j] = ‖u(times[k])‖ for p_list[j]
    pub norms: Vec<Vec<f64>>,
    pub sup: Vec<f64>,
    pub snapshots: Vec<(f64, GridFunction)>,
    pub last: GridFunction,
}

impl Trajectory {
    /// Rows (t, p, norm, scheme, dt, h); the sup norm is written with p = inf.
    pub fn csv_rows(&self) -> Vec<(f64, String, f64, &'static str, f64, f64)> {
        let mut rows = Vec::new();
        for (k, t) in self.times.iter().enumerate() {
            for (j, p) in self.p_list.iter().enumerate() {
                rows.push((*t, format_p(*p), self.norms[k][j], self.scheme.id(), self.dt, self.h));
            }
            rows.push((*t, "inf".to_string(), self.sup[k], self.scheme.id(), self.dt, self.h));
        }
        rows
    }
}

pub fn format_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// Number of steps and the effective step so that steps·dt = T exactly.
pub fn step_count(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end > 0.0) || !(dt > 0.0) || dt > t_end * (1.0 + 1e-12) {
        return Err(Error::InvalidParameters(format!("need T > 0 and 0 < dt <= T (T = {t_end}, dt = {dt})")));
    }
    let n = (t_end / dt).round().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

/// Evolves f to time T, recording norms after every step and snapshots at the steps nearest
/// the requested times.
pub fn evolve(
    op: &DiscreteOperator,
    f: &GridFunction,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    p_list: &[f64],
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    evolve_with(op, f, t_end, dt, scheme, p_list, snapshot_times, |_, _| {})
}

/// As `evolve`, calling `visit(t, u)` at t = 0 and after each step.
#[allow(clippy::too_many_arguments)]
pub fn evolve_with<V: FnMut(f64, &GridFunction)>(
    op: &DiscreteOperator,
    f: &GridFunction,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    p_list: &[f64],
    snapshot_times: &[f64],
    mut visit: V,
) -> Result<Trajectory> {
    if f.data.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: f.data.len() });
    }
    let (steps, dt) = step_count(t_end, dt)?;
    let stepper = Stepper::new(op, scheme, dt)?;
    let snap_steps: Vec<usize> = snapshot_times.iter().map(|t| (t / dt).round() as usize).collect();
    let mut traj = Trajectory {
        scheme,
        dt,
        h: op.grid.h(),
        times: Vec::with_capacity(steps + 1),
        p_list: p_list.to_vec(),
        norms: Vec::with_capacity(steps + 1),
        sup: Vec::with_capacity(steps + 1),
        snapshots: Vec::new(),
        last: f.clone(),
    };
    let mut u = f.clone();
    for k in 0..=steps {
        if k > 0 {
            u = u.with_data(stepper.step(&u.data)?);
        }
        let t = k as f64 * dt;
        traj.times.push(t);
        traj.norms.push(p_list.iter().map(|&p| lp_norm(&u, p)).collect());
        traj.sup.push(sup_norm(&u));
        if snap_steps.contains(&k) {
            traj.snapshots.push((t, u.clone()));
        }
        visit(t, &u);
    }
    traj.last = u;
    Ok(traj)
}

/// Solves (λI − A_h)u = f.
pub fn resolvent(op: &DiscreteOperator, lambda: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameters(format!("resolvent needs lambda > 0 (got {lambda})")));
    }
    let id = CsrMatrix::identity(op.dim());
    let a = CsrMatrix::linear_combination(&[(lambda, &id), (-1.0, &op.full)]);
    let mut x = f.data.clone();
    gmres(&a, &f.data, &mut x, SOLVER_TOL)?;
    Ok(f.with_data(x))
}

/// Trapezoid quadrature of ∫₀ᵀ e^{−λt} T_h(t)f dt along a Crank–Nicolson trajectory, together with
/// the tail indicator e^{−λT}‖T_h(T)f‖₂/‖f‖₂.
pub fn laplace_resolvent(op: &DiscreteOperator, lambda: f64, f: &GridFunction, t_end: f64, dt: f64) -> Result<(GridFunction, f64)> {
    let (steps, dt) = step_count(t_end, dt)?;
    let stepper = Stepper::new(op, Scheme::CrankNicolson, dt)?;
    let mut acc: Vec<f64> = f.data.iter().map(|v| 0.5 * dt * v).collect();
    let mut u = f.data.clone();
    for k in 1..=steps {
        u = stepper.step(&u)?;
        let w = (-lambda * k as f64 * dt).exp() * dt * if k == steps { 0.5 } else { 1.0 };
        for (a, v) in acc.iter_mut().zip(&u) {
            *a += w * v;
        }
    }
    let fnorm = lp_norm(f, 2.0);
    let tail = if fnorm > 0.0 { (-lambda * t_end).exp() * lp_norm(&f.with_data(u), 2.0) / fnorm } else { 0.0 };
    Ok((f.with_data(acc), tail))
}
