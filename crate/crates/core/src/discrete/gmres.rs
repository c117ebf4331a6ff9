//! Restarted GMRES with right Jacobi preconditioning.

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

pub const SOLVER_TOL: f64 = 1e-10;
const RESTART: usize = 60;
const MAX_CYCLES: usize = 200;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves A x = b to ‖b − Ax‖ ≤ tol·‖b‖ starting from `x`; returns the iteration count.
pub fn gmres(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64) -> Result<usize> {
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|t| *t = 0.0);
        return Ok(0);
    }
    let target = tol * bnorm;
    let dinv: Vec<f64> = a.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut history = Vec::new();
    let mut iters = 0;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    for _ in 0..MAX_CYCLES {
        a.mul_vec(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let beta = norm(&r);
        history.push(beta);
        if beta <= target {
            return Ok(iters);
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|t| t / beta).collect()];
        let mut hcols: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut k = 0;
        while k < RESTART {
            for i in 0..n {
                z[i] = dinv[i] * basis[k][i];
            }
            a.mul_vec(&z, &mut w);
            let mut h = vec![0.0; k + 2];
            for (j, v) in basis.iter().enumerate() {
                let hj = dot(&w, v);
                h[j] = hj;
                for i in 0..n {
                    w[i] -= hj * v[i];
                }
            }
            let hn = norm(&w);
            h[k + 1] = hn;
            for j in 0..k {
                let t = cs[j] * h[j] + sn[j] * h[j + 1];
                h[j + 1] = -sn[j] * h[j] + cs[j] * h[j + 1];
                h[j] = t;
            }
            let den = h[k].hypot(h[k + 1]);
            let (c, s) = if den == 0.0 { (1.0, 0.0) } else { (h[k] / den, h[k + 1] / den) };
            h[k] = den;
            h[k + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[k]);
            g[k] *= c;
            hcols.push(h);
            iters += 1;
            k += 1;
            if g[k].abs() <= target || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|t| t / hn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= hcols[j][i] * y[j];
            }
            y[i] = acc / hcols[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for i in 0..n {
                x[i] += dinv[i] * yj * basis[j][i];
            }
        }
    }
    Err(Error::Solver { iterations: iters, last_residual: *history.last().unwrap_or(&f64::NAN), history })
}
