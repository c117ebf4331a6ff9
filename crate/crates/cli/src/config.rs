//! Run configuration: a JSON document with a pinned schema version.

use std::path::{Path, PathBuf};

use lpgen_core::admissibility::SampleSpec;
use lpgen_core::discrete::Scheme;
use lpgen_core::fields::{make_power_exp_field, CoefficientField, ConstantField, Coupling, PowerExpParams};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::UsageError;

pub const SCHEMA_VERSION: u32 = 1;

fn one() -> f64 {
    1.0
}

fn default_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub field: FieldConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub exponents: ExponentConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    /// Condition ids that decide the exit status of `check`; empty means all of them.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub optimize: OptimizeConfig,
    #[serde(default)]
    pub identities: IdentitiesConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Output directory; `--out` takes precedence. Not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    PowerExp {
        d: usize,
        m: usize,
        alpha: f64,
        beta: f64,
        #[serde(default)]
        gamma_drift: f64,
        /// d symmetric m×m matrices, row-major.
        a_matrices: Vec<Vec<Vec<f64>>>,
        /// Scale of the tanh coupling; 0 turns it off.
        #[serde(default = "one")]
        coupling_scale: f64,
    },
    Constant {
        q: Vec<Vec<f64>>,
        b: Vec<Vec<Vec<f64>>>,
        v: Vec<Vec<f64>>,
    },
    /// Q = I, B = 0, V = decay·I.
    Heat {
        d: usize,
        m: usize,
        #[serde(default = "one")]
        decay: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub half_width: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { half_width: 2.5, n: 101 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    Bump { radius: f64, richness: usize },
    Gaussian { variance: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub horizon: f64,
    pub dt: f64,
    pub schemes: Vec<Scheme>,
    pub snapshots: Vec<f64>,
    pub initial: InitialConfig,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            horizon: 1.0,
            dt: 0.01,
            schemes: vec![Scheme::CrankNicolson],
            snapshots: vec![],
            initial: InitialConfig::Bump { radius: 1.0, richness: 3 },
        }
    }
}

/// Exponent lists; "inf" is accepted wherever a number is.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentConfig {
    #[serde(with = "exponents")]
    pub p_list: Vec<f64>,
    #[serde(with = "exponents")]
    pub q_list: Vec<f64>,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig { p_list: vec![2.0], q_list: vec![f64::INFINITY] }
    }
}

mod exponents {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Name(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Exp> = v
            .iter()
            .map(|&p| if p.is_infinite() { Exp::Name("inf".into()) } else { Exp::Num(p) })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Exp>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Exp::Num(p) => Ok(p),
                Exp::Name(s) if s == "inf" => Ok(f64::INFINITY),
                Exp::Name(s) => Err(serde::de::Error::custom(format!("exponent must be a number or \"inf\", got {s:?}"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub points: usize,
    pub radius: f64,
    pub seed: u64,
    pub directions: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let s = SampleSpec::default();
        SamplingConfig { points: s.points, radius: s.radius, seed: s.seed, directions: s.directions }
    }
}

impl SamplingConfig {
    pub fn spec(&self) -> SampleSpec {
        SampleSpec { points: self.points, radius: self.radius, seed: self.seed, directions: self.directions }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleConfig {
    pub p: f64,
    pub theta: f64,
    pub kappa: f64,
    pub m: usize,
    #[serde(default)]
    pub gamma_cre: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeConfig {
    pub tuples: Vec<TupleConfig>,
    /// Extra random tuples per regime, kept when the closed form is at least `min_condition`.
    pub random_tuples: usize,
    pub min_condition: f64,
    pub resolution: usize,
    pub oracle_tolerance: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        let t = |p, theta, kappa, m, gamma_cre| TupleConfig { p, theta, kappa, m, gamma_cre };
        OptimizeConfig {
            tuples: vec![t(1.5, 0.0, 0.2, 2, 0.1), t(3.0, 0.4, 1.0, 2, 0.0), t(3.0, 0.0, 1.0, 2, 0.0), t(1.5, 0.0, 0.2, 2, 0.0)],
            random_tuples: 5,
            min_condition: -10.0,
            resolution: 400,
            oracle_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesConfig {
    pub ensemble: usize,
    /// Quadrature nodes per axis.
    pub nodes: usize,
    pub radius: f64,
    pub richness: usize,
    pub eps_list: Vec<f64>,
    pub form_bi_tolerance: f64,
    pub form_q_tolerance: f64,
    /// γ used in the ε selection for the sector constant.
    pub gamma_cre: f64,
    /// Overrides the sector constant from the ε selection.
    pub sector_constant: Option<f64>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            ensemble: 25,
            nodes: 401,
            radius: 1.0,
            richness: 3,
            eps_list: vec![1e-1, 1e-2, 1e-4],
            form_bi_tolerance: 1e-5,
            form_q_tolerance: 1e-6,
            gamma_cre: 0.01,
            sector_constant: None,
        }
    }
}

pub const VERIFY_CHECKS: [&str; 7] =
    ["contraction", "monotone", "domination", "hypercontractive", "scheme_order", "resolvent_laplace", "nash"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub checks: Vec<String>,
    /// inf v; estimated on the grid nodes when absent.
    pub c0_inf: Option<f64>,
    pub dt_list: Vec<f64>,
    pub gap_threshold: f64,
    pub lambda: f64,
    pub laplace_horizon: f64,
    pub laplace_dt: f64,
    pub laplace_tolerance: f64,
    pub hyper_window: (f64, f64),
    pub hyper_samples: usize,
    pub hyper_steps: usize,
    pub nash_ensemble: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            checks: VERIFY_CHECKS.iter().map(|s| s.to_string()).collect(),
            c0_inf: None,
            dt_list: vec![0.01, 0.005, 0.0025],
            gap_threshold: 0.05,
            lambda: 1.0,
            laplace_horizon: 20.0,
            laplace_dt: 1e-3,
            laplace_tolerance: 1e-2,
            hyper_window: (0.01, 1.0),
            hyper_samples: 8,
            hyper_steps: 100,
            nash_ensemble: 40,
        }
    }
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, UsageError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(UsageError(format!("{what} must be a non-empty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let bad = |s: String| Err(UsageError(s));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        let field = self.build_field()?;
        if self.grid.half_width <= 0.0 || self.grid.n < 16 {
            return bad("grid needs half_width > 0 and n >= 16".into());
        }
        if !(self.time.horizon > 0.0 && self.time.dt > 0.0 && self.time.dt <= self.time.horizon) {
            return bad("time needs horizon > 0 and 0 < dt <= horizon".into());
        }
        if self.time.schemes.is_empty() {
            return bad("time.schemes is empty".into());
        }
        if self.exponents.p_list.is_empty() || self.exponents.p_list.iter().any(|p| !(*p > 1.0) || p.is_infinite()) {
            return bad("exponents.p_list needs finite entries > 1".into());
        }
        if self.exponents.q_list.iter().any(|q| !(*q >= 1.0)) {
            return bad("exponents.q_list entries must be >= 1".into());
        }
        if self.sampling.points == 0 || !(self.sampling.radius > 0.0) {
            return bad("sampling needs points > 0 and radius > 0".into());
        }
        if self.identities.nodes < 3 || self.identities.ensemble == 0 {
            return bad("identities needs nodes >= 3 and ensemble >= 1".into());
        }
        if let Some(id) = self.checks.iter().find(|c| !crate::report::CHECK_IDS.contains(&c.as_str())) {
            return bad(format!("unknown condition id {id:?} in checks"));
        }
        if let Some(id) = self.verify.checks.iter().find(|c| !VERIFY_CHECKS.contains(&c.as_str())) {
            return bad(format!("unknown verify check {id:?}"));
        }
        if field.dim() > 3 {
            return bad(format!("d = {} is above the supported maximum 3", field.dim()));
        }
        Ok(())
    }

    pub fn build_field(&self) -> Result<Box<dyn CoefficientField>, UsageError> {
        let err = |e: lpgen_core::Error| UsageError(e.to_string());
        match &self.field {
            FieldConfig::PowerExp { .. } => {
                let params = self.power_exp_params()?.expect("power_exp family");
                Ok(Box::new(make_power_exp_field(params).map_err(err)?))
            }
            FieldConfig::Constant { q, b, v } => {
                let b = b.iter().map(|rows| matrix(rows, "b entry")).collect::<Result<Vec<_>, _>>()?;
                Ok(Box::new(ConstantField::new(matrix(q, "q")?, b, matrix(v, "v")?).map_err(err)?))
            }
            FieldConfig::Heat { d, m, decay } => Ok(Box::new(ConstantField::heat(*d, *m, *decay).map_err(err)?)),
        }
    }

    pub fn power_exp_params(&self) -> Result<Option<PowerExpParams>, UsageError> {
        let FieldConfig::PowerExp { d, m, alpha, beta, gamma_drift, a_matrices, coupling_scale } = &self.field else {
            return Ok(None);
        };
        let a = a_matrices
            .iter()
            .map(|rows| matrix(rows, "a_matrices entry"))
            .collect::<Result<Vec<_>, _>>()?;
        let coupling = if *coupling_scale == 0.0 { Coupling::None } else { Coupling::Tanh { scale: *coupling_scale } };
        Ok(Some(PowerExpParams {
            d: *d,
            m: *m,
            alpha: *alpha,
            beta: *beta,
            gamma_drift: *gamma_drift,
            a_matrices: a,
            coupling,
        }))
    }

    /// Comparability constant c₁ with |Vξ| ≤ c₁ v |ξ|.
    pub fn c1(&self) -> f64 {
        match &self.field {
            FieldConfig::PowerExp { m, coupling_scale, .. } if *m >= 2 => (1.0 + coupling_scale * coupling_scale).sqrt(),
            FieldConfig::Constant { v, .. } => {
                let v = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i][j]);
                lpgen_core::linalg::op_norm(&v) / lpgen_core::linalg::min_sym_eig(&v)
            }
            _ => 1.0,
        }
    }

    /// SHA-256 of the canonical JSON of the effective config, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
