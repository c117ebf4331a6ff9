//! Finite-difference assembly of 𝒜 and of the scalar operator div(Q∇) − v.

use nalgebra::DMatrix;

use super::grid::{Grid, GridFunction};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::fields::CoefficientField;
use crate::linalg;

/// A_h = A0_h + B_h − V_h on the interior unknowns (point-major, m per node).
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: Grid,
    pub m: usize,
    pub label: String,
    /// Diffusion, acting componentwise.
    pub a0: CsrMatrix,
    pub drift: CsrMatrix,
    /// Potential multiplication (entered with a plus sign; the operator subtracts it).
    pub potential: CsrMatrix,
    /// m×m potential block at each interior node.
    pub v_blocks: Vec<DMatrix<f64>>,
    pub full: CsrMatrix,
}

impl DiscreteOperator {
    pub fn from_parts(
        grid: Grid,
        m: usize,
        label: String,
        a0: CsrMatrix,
        drift: CsrMatrix,
        v_blocks: Vec<DMatrix<f64>>,
    ) -> Self {
        let mut trip = Vec::new();
        for (i, b) in v_blocks.iter().enumerate() {
            for r in 0..m {
                for c in 0..m {
                    if b[(r, c)] != 0.0 {
                        trip.push((i * m + r, i * m + c, b[(r, c)]));
                    }
                }
            }
        }
        let potential = CsrMatrix::from_triplets(grid.len() * m, trip);
        let full = CsrMatrix::linear_combination(&[(1.0, &a0), (1.0, &drift), (-1.0, &potential)]);
        DiscreteOperator { grid, m, label, a0, drift, potential, v_blocks, full }
    }

    /// Pure decay A_h = −I.
    pub fn negative_identity(grid: Grid, m: usize) -> Self {
        let n = grid.len() * m;
        Self::from_parts(
            grid,
            m,
            "negative_identity".into(),
            CsrMatrix::zeros(n),
            CsrMatrix::zeros(n),
            vec![DMatrix::identity(m, m); grid.len()],
        )
    }

    pub fn dim(&self) -> usize {
        self.grid.len() * self.m
    }

    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        u.with_data(self.full.apply(&u.data))
    }

    /// A0_h + B_h, the part the Trotter diffusion substep integrates.
    pub fn transport(&self) -> CsrMatrix {
        CsrMatrix::linear_combination(&[(1.0, &self.a0), (1.0, &self.drift)])
    }
}

fn finite_or_err(what: &str, x: &[f64], vals: impl IntoIterator<Item = f64>) -> Result<()> {
    if vals.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} is not finite at x = {x:?}")))
    }
}

/// Flux-form scalar diffusion stencil for div(Q∇·) on the interior nodes.
fn diffusion_stencil(field: &dyn CoefficientField, grid: &Grid) -> Result<Vec<(usize, usize, f64)>> {
    let h = grid.h();
    let d = grid.d;
    let mut trip = Vec::new();
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        let mut diag = 0.0;
        for k in 0..d {
            for sgn in [-1.0, 1.0] {
                let mut xm = x.clone();
                xm[k] += sgn * 0.5 * h;
                let q = field.q(&xm);
                finite_or_err("Q", &xm, q.iter().copied())?;
                let c = q[(k, k)] / (h * h);
                diag -= c;
                let mut delta = [0i64; 2];
                delta[k] = sgn as i64;
                if let Some(nb) = grid.shifted(idx, delta) {
                    trip.push((idx, nb, c));
                }
            }
            for l in 0..d {
                if l == k {
                    continue;
                }
                // ∂ₖ(q_kl ∂ₗu) by centred differences of centred differences
                for sk in [-1i64, 1] {
                    let mut xk = x.clone();
                    xk[k] += sk as f64 * h;
                    let q = field.q(&xk);
                    finite_or_err("Q", &xk, q.iter().copied())?;
                    let c = q[(k, l)] / (4.0 * h * h) * sk as f64;
                    for sl in [-1i64, 1] {
                        let mut delta = [0i64; 2];
                        delta[k] = sk;
                        delta[l] = sl;
                        if let Some(nb) = grid.shifted(idx, delta) {
                            trip.push((idx, nb, c * sl as f64));
                        }
                    }
                }
            }
        }
        trip.push((idx, idx, diag));
    }
    Ok(trip)
}

fn expand_components(trip: &[(usize, usize, f64)], m: usize, n: usize) -> CsrMatrix {
    let mut out = Vec::with_capacity(trip.len() * m);
    for &(r, c, v) in trip {
        for j in 0..m {
            out.push((r * m + j, c * m + j, v));
        }
    }
    CsrMatrix::from_triplets(n * m, out)
}

/// Largest cell Péclet number h·maxᵢ|Bⁱ|/μ over the interior nodes.
pub fn peclet_number(field: &dyn CoefficientField, grid: &Grid) -> f64 {
    let h = grid.h();
    (0..grid.len())
        .map(|idx| {
            let x = grid.point(idx);
            let mu = linalg::min_sym_eig(&field.q(&x));
            let b = field.b(&x).iter().map(linalg::op_norm).fold(0.0, f64::max);
            h * b / mu
        })
        .fold(0.0, f64::max)
}

/// Diffusion by conservative flux differences with Q at cell midpoints, drift by centred
/// differences, potential pointwise; Dirichlet boundary values are eliminated.
pub fn assemble(field: &dyn CoefficientField, grid: &Grid) -> Result<DiscreteOperator> {
    if field.dim() != grid.d {
        return Err(Error::DimensionMismatch { expected: field.dim(), got: grid.d });
    }
    let pe = peclet_number(field, grid);
    if !(pe < 2.0) {
        return Err(Error::InvalidParameters(format!(
            "cell Peclet number {pe:.3} >= 2; refine the grid (h = {})",
            grid.h()
        )));
    }
    let m = field.components();
    let n = grid.len();
    let h = grid.h();
    let a0 = expand_components(&diffusion_stencil(field, grid)?, m, n);

    let mut drift = Vec::new();
    let mut v_blocks = Vec::with_capacity(n);
    for idx in 0..n {
        let x = grid.point(idx);
        let bs = field.b(&x);
        for (i, bi) in bs.iter().enumerate() {
            finite_or_err("drift", &x, bi.iter().copied())?;
            for sgn in [-1i64, 1] {
                let mut delta = [0i64; 2];
                delta[i] = sgn;
                if let Some(nb) = grid.shifted(idx, delta) {
                    for r in 0..m {
                        for c in 0..m {
                            let v = bi[(r, c)] * sgn as f64 / (2.0 * h);
                            if v != 0.0 {
                                drift.push((idx * m + r, nb * m + c, v));
                            }
                        }
                    }
                }
            }
        }
        let v = field.vpot(&x);
        finite_or_err("potential", &x, v.iter().copied())?;
        v_blocks.push(v);
    }
    let drift = CsrMatrix::from_triplets(n * m, drift);
    Ok(DiscreteOperator::from_parts(*grid, m, field.label(), a0, drift, v_blocks))
}

/// div(Q∇·) − v on scalar functions.
pub fn assemble_scalar(field: &dyn CoefficientField, grid: &Grid) -> Result<DiscreteOperator> {
    if field.dim() != grid.d {
        return Err(Error::DimensionMismatch { expected: field.dim(), got: grid.d });
    }
    let n = grid.len();
    let a0 = expand_components(&diffusion_stencil(field, grid)?, 1, n);
    let mut v_blocks = Vec::with_capacity(n);
    for idx in 0..n {
        let x = grid.point(idx);
        let v = field.vscal(&x);
        finite_or_err("v", &x, [v])?;
        v_blocks.push(DMatrix::from_element(1, 1, v));
    }
    Ok(DiscreteOperator::from_parts(
        *grid,
        1,
        format!("scalar[{}]", field.label()),
        a0,
        CsrMatrix::zeros(n),
        v_blocks,
    ))
}
