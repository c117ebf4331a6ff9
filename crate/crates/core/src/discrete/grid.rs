//! Dirichlet grids on [−L, L]ᵈ and functions on their interior nodes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub d: usize,
    pub half_width: f64,
    /// Points per axis, boundary included.
    pub n: usize,
}

impl Grid {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidParameters(format!("grid dimension d = {d} must be 1 or 2")));
        }
        if n < 16 {
            return Err(Error::InvalidParameters(format!("grid needs n >= 16 points per axis (got {n})")));
        }
        if !(half_width > 0.0) {
            return Err(Error::InvalidParameters(format!("grid half-width {half_width} must be positive")));
        }
        Ok(Grid { d, half_width, n })
    }

    /// Grid with spacing at most `h` on the box of half-width `half_width`.
    pub fn with_spacing(d: usize, half_width: f64, h: f64) -> Result<Self> {
        let n = (2.0 * half_width / h - 1e-9).ceil() as usize + 1;
        Self::new(d, half_width, n)
    }

    /// 3× the data support plus the diffusion length √(2·T·max|Q|).
    pub fn default_half_width(support: f64, t: f64, q_max: f64) -> f64 {
        3.0 * support + (2.0 * t * q_max).sqrt()
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    /// Interior points per axis.
    pub fn ni(&self) -> usize {
        self.n - 2
    }

    pub fn len(&self) -> usize {
        self.ni().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis indices (1-based in the full grid) of interior point `idx`.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        let ni = self.ni();
        if self.d == 1 {
            [idx + 1, 0]
        } else {
            [idx % ni + 1, idx / ni + 1]
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mi = self.multi_index(idx);
        let h = self.h();
        (0..self.d).map(|k| -self.half_width + mi[k] as f64 * h).collect()
    }

    /// Interior index of the neighbour of `idx` shifted by `delta` along each axis, or None on the boundary.
    pub fn shifted(&self, idx: usize, delta: [i64; 2]) -> Option<usize> {
        let mi = self.multi_index(idx);
        let ni = self.ni() as i64;
        let mut out = 0usize;
        let mut stride = 1usize;
        for k in 0..self.d {
            let j = mi[k] as i64 + delta[k] - 1;
            if j < 0 || j >= ni {
                return None;
            }
            out += j as usize * stride;
            stride *= ni as usize;
        }
        Some(out)
    }

    /// Volume element hᵈ.
    pub fn cell(&self) -> f64 {
        self.h().powi(self.d as i32)
    }
}

/// m-component values on the interior nodes, point-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub m: usize,
    pub data: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid, m: usize) -> Self {
        GridFunction { grid, m, data: vec![0.0; grid.len() * m] }
    }

    pub fn from_fn<F: Fn(&[f64]) -> Vec<f64>>(grid: Grid, m: usize, f: F) -> Self {
        let mut data = Vec::with_capacity(grid.len() * m);
        for idx in 0..grid.len() {
            let v = f(&grid.point(idx));
            data.extend_from_slice(&v[..m]);
        }
        GridFunction { grid, m, data }
    }

    pub fn from_test_function(grid: Grid, u: &TestFunction) -> Self {
        Self::from_fn(grid, u.m, |x| u.eval(x))
    }

    pub fn at(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.m..(idx + 1) * self.m]
    }

    /// Euclidean modulus |u(x)| at each node.
    pub fn modulus(&self) -> Vec<f64> {
        self.data.chunks(self.m).map(|c| c.iter().map(|t| t * t).sum::<f64>().sqrt()).collect()
    }

    pub fn with_data(&self, data: Vec<f64>) -> Self {
        GridFunction { grid: self.grid, m: self.m, data }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.with_data(self.data.iter().map(|t| c * t).collect())
    }

    /// Snapshot text: one header line `d m n L` (plus the time), then one line per grid node
    /// (boundary included) with coordinates followed by the m components.
    pub fn to_text(&self, t: f64) -> String {
        let g = &self.grid;
        let mut s = format!("# d={} m={} n={} L={} t={}\n", g.d, self.m, g.n, g.half_width, t);
        let h = g.h();
        let total = g.n.pow(g.d as u32);
        for full in 0..total {
            let (i0, i1) = (full % g.n, full / g.n);
            let ids = [i0, i1];
            let coords: Vec<String> =
                (0..g.d).map(|k| format!("{:.10e}", -g.half_width + ids[k] as f64 * h)).collect();
            let inside = (0..g.d).all(|k| ids[k] >= 1 && ids[k] <= g.ni());
            let vals: Vec<String> = if inside {
                let idx = if g.d == 1 { i0 - 1 } else { (i1 - 1) * g.ni() + (i0 - 1) };
                self.at(idx).iter().map(|v| format!("{v:.15e}")).collect()
            } else {
                vec!["0".to_string(); self.m]
            };
            s.push_str(&coords.join(" "));
            s.push(' ');
            s.push_str(&vals.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Composite trapezoid Lᵖ norm of |u| (boundary values are zero, so the rule is hᵈ·Σ over the
/// interior); p = ∞ gives the sup norm.
pub fn lp_norm(u: &GridFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return sup_norm(u);
    }
    let s: f64 = u.modulus().iter().map(|r| r.powf(p)).sum();
    (s * u.grid.cell()).powf(1.0 / p)
}

pub fn sup_norm(u: &GridFunction) -> f64 {
    u.modulus().into_iter().fold(0.0, f64::max)
}
