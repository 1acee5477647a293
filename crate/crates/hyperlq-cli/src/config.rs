//! JSON system descriptions.
//!
//! Two input shapes are accepted:
//!
//! - boundary form: `K`, `L`, `K_y`, `L_y`, `lambda0`, optional `M` and
//!   `z0`, with `n`/`inputs`/`outputs` counts;
//! - pre-reduced form: `A_d`, `B_d`, `C_d`, `D_d` and the delay `p1`
//!   (exactly the shape `hyperlq reduce` prints, so reports round-trip).
//!
//! Matrices are row-major: either flat arrays (requires the counts) or
//! nested row arrays.

use hyperlq_core::{
    BoundarySystem, Complex64, DenseMatrix, DiscreteQuadruple, SpatialProfile, StateFunction,
};
use serde::Deserialize;

use crate::error::CmdError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: Option<usize>,
    pub inputs: Option<usize>,
    pub outputs: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<MatrixInput>,
    #[serde(rename = "L")]
    pub l: Option<MatrixInput>,
    #[serde(rename = "K_y")]
    pub k_y: Option<MatrixInput>,
    #[serde(rename = "L_y")]
    pub l_y: Option<MatrixInput>,
    pub lambda0: Option<Lambda0Config>,
    #[serde(rename = "M")]
    pub m: Option<ZeroOrderInput>,
    pub z0: Option<InitialStateConfig>,
    pub grid_points: Option<usize>,

    #[serde(rename = "A_d")]
    pub a_d: Option<MatrixInput>,
    #[serde(rename = "B_d")]
    pub b_d: Option<MatrixInput>,
    #[serde(rename = "C_d")]
    pub c_d: Option<MatrixInput>,
    #[serde(rename = "D_d")]
    pub d_d: Option<MatrixInput>,
    pub p1: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixInput {
    /// Build with given dimensions; nested input must agree with them.
    pub fn to_matrix(&self, rows: usize, cols: usize, name: &str) -> Result<DenseMatrix, CmdError> {
        match self {
            MatrixInput::Flat(v) => {
                if v.len() != rows * cols {
                    return Err(CmdError::validation(format!(
                        "{name}: expected {rows}x{cols} = {} entries, got {}",
                        rows * cols,
                        v.len()
                    )));
                }
                Ok(DenseMatrix::from_real(rows, cols, v))
            }
            MatrixInput::Nested(rows_vec) => {
                if rows_vec.len() != rows || rows_vec.iter().any(|r| r.len() != cols) {
                    return Err(CmdError::validation(format!(
                        "{name}: expected {rows}x{cols} nested rows"
                    )));
                }
                let flat: Vec<f64> = rows_vec.iter().flatten().copied().collect();
                Ok(DenseMatrix::from_real(rows, cols, &flat))
            }
        }
    }

    /// Dimensions of nested input, if available.
    pub fn nested_dims(&self) -> Option<(usize, usize)> {
        match self {
            MatrixInput::Nested(rows) if !rows.is_empty() => Some((rows.len(), rows[0].len())),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Lambda0Config {
    Constant { value: f64 },
    /// `λ0(ζ) = a + b ζ`.
    Affine { a: f64, b: f64 },
    Samples { grid: Vec<f64>, values: Vec<f64> },
}

/// Zero-order term: one flat `n×n` block (constant in space) or one block
/// per grid point.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ZeroOrderInput {
    Constant(Vec<f64>),
    PerPoint(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialStateConfig {
    Constant { value: ScalarOrVector },
    Samples { values: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVector {
    Scalar(f64),
    Vector(Vec<f64>),
}

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Everything the commands need, after validation and reduction.
pub struct Loaded {
    /// Boundary system; synthesized (with a constant-speed profile of the
    /// requested delay) when the config supplies a pre-reduced quadruple.
    pub system: BoundarySystem,
    pub quad: DiscreteQuadruple,
    pub p1: f64,
    pub z0: StateFunction,
}

fn real_vec(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

impl SystemConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CmdError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CmdError::validation(format!("invalid config: {e}")))
    }

    fn is_quadruple_form(&self) -> bool {
        self.a_d.is_some() || self.b_d.is_some() || self.c_d.is_some() || self.d_d.is_some()
    }

    fn quadruple_dims(&self) -> Result<(usize, usize, usize), CmdError> {
        let n = self
            .n
            .or_else(|| self.a_d.as_ref().and_then(|m| m.nested_dims()).map(|d| d.0))
            .ok_or_else(|| CmdError::validation("state dimension n is required".into()))?;
        let inputs = self
            .inputs
            .or_else(|| self.b_d.as_ref().and_then(|m| m.nested_dims()).map(|d| d.1))
            .ok_or_else(|| CmdError::validation("input count is required".into()))?;
        let outputs = self
            .outputs
            .or_else(|| self.c_d.as_ref().and_then(|m| m.nested_dims()).map(|d| d.0))
            .ok_or_else(|| CmdError::validation("output count is required".into()))?;
        Ok((n, inputs, outputs))
    }

    fn build_profile(&self) -> Result<SpatialProfile, CmdError> {
        let points = self.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        let profile = match &self.lambda0 {
            Some(Lambda0Config::Constant { value }) => SpatialProfile::constant(*value, points),
            Some(Lambda0Config::Affine { a, b }) => SpatialProfile::affine(*a, *b, points),
            Some(Lambda0Config::Samples { grid, values }) => {
                SpatialProfile::from_samples(grid.clone(), values.clone())
            }
            None => {
                return Err(CmdError::validation(
                    "lambda0 is required for a boundary-form config".into(),
                ))
            }
        };
        profile.map_err(CmdError::from)
    }

    fn build_z0(&self, profile: &SpatialProfile, n: usize) -> Result<StateFunction, CmdError> {
        match &self.z0 {
            None => Ok(StateFunction::constant(
                profile,
                vec![Complex64::new(1.0, 0.0); n],
            )),
            Some(InitialStateConfig::Constant { value }) => {
                let v = match value {
                    ScalarOrVector::Scalar(x) => vec![*x; n],
                    ScalarOrVector::Vector(v) => v.clone(),
                };
                if v.len() != n {
                    return Err(CmdError::validation(format!(
                        "z0 constant must have {n} components"
                    )));
                }
                Ok(StateFunction::constant(profile, real_vec(&v)))
            }
            Some(InitialStateConfig::Samples { values }) => {
                if values.len() != profile.len() || values.iter().any(|row| row.len() != n) {
                    return Err(CmdError::validation(format!(
                        "z0 samples must be {} rows of {n} components",
                        profile.len()
                    )));
                }
                StateFunction::new(
                    profile.grid().to_vec(),
                    values.iter().map(|row| real_vec(row)).collect(),
                )
                .map_err(CmdError::from)
            }
        }
    }

    /// Validate, eliminate the zero-order term, and reduce.
    pub fn load(&self) -> Result<Loaded, CmdError> {
        for (count, name) in [(self.n, "n"), (self.inputs, "inputs"), (self.outputs, "outputs")]
        {
            if count == Some(0) {
                return Err(CmdError::validation(format!("{name} must be at least 1")));
            }
        }
        if self.is_quadruple_form() {
            let (n, inputs, outputs) = self.quadruple_dims()?;
            let get = |m: &Option<MatrixInput>, rows, cols, name: &str| -> Result<_, CmdError> {
                m.as_ref()
                    .ok_or_else(|| CmdError::validation(format!("{name} is required")))?
                    .to_matrix(rows, cols, name)
            };
            let quad = DiscreteQuadruple::new(
                get(&self.a_d, n, n, "A_d")?,
                get(&self.b_d, n, inputs, "B_d")?,
                get(&self.c_d, outputs, n, "C_d")?,
                get(&self.d_d, outputs, inputs, "D_d")?,
            )?;
            let p1 = self.p1.ok_or_else(|| {
                CmdError::validation("p1 is required with a pre-reduced quadruple".into())
            })?;
            if p1.is_nan() || p1 <= 0.0 {
                return Err(CmdError::validation("p1 must be positive".into()));
            }
            // Constant-speed stand-in profile with the same delay; only the
            // travel-time map and dimensions matter downstream, dynamics
            // always come from the quadruple.
            let points = self.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
            let profile = SpatialProfile::constant(1.0 / p1, points)?;
            let system = BoundarySystem::new(
                DenseMatrix::identity(n).scale(-1.0),
                quad.a_d.clone(),
                DenseMatrix::zeros(outputs, n),
                quad.c_d.scale(-1.0),
                inputs.min(n).max(1),
                profile.clone(),
            )?;
            let z0 = self.build_z0(&profile, n)?;
            Ok(Loaded {
                system,
                quad,
                p1,
                z0,
            })
        } else {
            let n = self
                .n
                .or_else(|| self.k.as_ref().and_then(|m| m.nested_dims()).map(|d| d.0))
                .ok_or_else(|| CmdError::validation("state dimension n is required".into()))?;
            let inputs = self.inputs.unwrap_or(n);
            let outputs = self
                .outputs
                .or_else(|| self.k_y.as_ref().and_then(|m| m.nested_dims()).map(|d| d.0))
                .ok_or_else(|| CmdError::validation("output count is required".into()))?;
            let get = |m: &Option<MatrixInput>, rows, cols, name: &str| -> Result<_, CmdError> {
                m.as_ref()
                    .ok_or_else(|| CmdError::validation(format!("{name} is required")))?
                    .to_matrix(rows, cols, name)
            };
            let profile = self.build_profile()?;
            let mut system = BoundarySystem::new(
                get(&self.k, n, n, "K")?,
                get(&self.l, n, n, "L")?,
                get(&self.k_y, outputs, n, "K_y")?,
                get(&self.l_y, outputs, n, "L_y")?,
                inputs,
                profile,
            )?;
            if let Some(m) = &self.m {
                let blocks: Vec<DenseMatrix> = match m {
                    ZeroOrderInput::Constant(flat) => {
                        if flat.len() != n * n {
                            return Err(CmdError::validation(format!(
                                "M: expected {n}x{n} = {} entries",
                                n * n
                            )));
                        }
                        let block = DenseMatrix::from_real(n, n, flat);
                        (0..system.profile().len()).map(|_| block.clone()).collect()
                    }
                    ZeroOrderInput::PerPoint(per_point) => {
                        if per_point.len() != system.profile().len()
                            || per_point.iter().any(|b| b.len() != n * n)
                        {
                            return Err(CmdError::validation(format!(
                                "M: expected {} blocks of {n}x{n} entries",
                                system.profile().len()
                            )));
                        }
                        per_point
                            .iter()
                            .map(|b| DenseMatrix::from_real(n, n, b))
                            .collect()
                    }
                };
                system = system.with_zero_order(blocks)?;
            }
            system.validate()?;
            let (reduced, _q1) = system.q_transform()?;
            let quad = reduced.reduce()?;
            let p1 = reduced.profile().total_travel_time();
            let z0 = self.build_z0(reduced.profile(), n)?;
            Ok(Loaded {
                system: reduced,
                quad,
                p1,
                z0,
            })
        }
    }
}
