//! Scalar diffusion coefficients `A(x)` on the unit square.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Real;

/// Period parameter of the default oscillatory coefficient.
pub const DEFAULT_EPSILON: f64 = 1.0 / 32.0;

/// Piecewise-constant field on a `rows × cols` grid; row 0 is the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<T>,
}

impl<T: Real> Raster<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::config("raster must have at least one row and one column"));
        }
        if values.len() != rows * cols {
            return Err(Error::config(format!(
                "raster declares {rows}x{cols} = {} cells but has {} values",
                rows * cols,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > T::zero()) || !v.is_finite()) {
            return Err(Error::config(format!("raster value {v} is not a positive finite number")));
        }
        Ok(Self { rows, cols, values })
    }

    fn cell(&self, x: Point2<T>) -> T {
        let idx = |c: T, n: usize| -> usize {
            let k = (c * T::from_usize_lossy(n)).floor().to_usize().unwrap_or(0);
            k.min(n - 1)
        };
        self.values[idx(x.y, self.rows) * self.cols + idx(x.x, self.cols)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind<T> {
    Constant(T),
    /// `1 + (sin(π x₁/ε) + sin(π x₂/ε)) / 4`.
    Oscillatory { epsilon: T },
    Raster(Raster<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<T> {
    kind: CoefficientKind<T>,
    bounds: (T, T),
}

impl<T: Real> CoefficientField<T> {
    pub fn constant(value: T) -> Result<Self> {
        if !(value > T::zero()) || !value.is_finite() {
            return Err(Error::config(format!("constant coefficient {value} must be positive")));
        }
        Ok(Self {
            kind: CoefficientKind::Constant(value),
            bounds: (value, value),
        })
    }

    pub fn oscillatory(epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::config(format!("oscillation period {epsilon} must be positive")));
        }
        Ok(Self {
            kind: CoefficientKind::Oscillatory { epsilon },
            bounds: (T::lit(0.5), T::lit(1.5)),
        })
    }

    pub fn raster(raster: Raster<T>) -> Self {
        let lo = raster.values.iter().copied().fold(T::infinity(), T::min);
        let hi = raster.values.iter().copied().fold(T::neg_infinity(), T::max);
        Self {
            kind: CoefficientKind::Raster(raster),
            bounds: (lo, hi),
        }
    }

    pub fn kind(&self) -> &CoefficientKind<T> {
        &self.kind
    }

    /// Ellipticity bounds `(γ₁, γ₂)`.
    pub fn bounds(&self) -> (T, T) {
        self.bounds
    }

    pub fn evaluate(&self, x: Point2<T>) -> T {
        match &self.kind {
            CoefficientKind::Constant(v) => *v,
            CoefficientKind::Oscillatory { epsilon } => {
                let w = T::PI() / *epsilon;
                T::one() + T::lit(0.25) * ((w * x.x).sin() + (w * x.y).sin())
            }
            CoefficientKind::Raster(r) => r.cell(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, CoefficientKind::Constant(_))
    }
}

/// `z ↦ 1 + ln(1 + z)`.
pub fn log_rescale<T: Real>(z: T) -> T {
    T::one() + z.ln_1p()
}

/// Parses the raster text format: a header line `rows cols` followed by
/// `rows * cols` whitespace-separated values in row-major order.
pub fn parse_raster<T: Real>(text: &str, rescale: bool) -> std::result::Result<Raster<T>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let header = lines.next().ok_or("empty raster file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| format!("bad header token {t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(format!("header must be \"rows cols\", got {header:?}"));
    };
    let mut values = Vec::with_capacity(rows * cols);
    for line in lines {
        for tok in line.split_whitespace() {
            let z: f64 = tok.parse().map_err(|e| format!("bad value {tok:?}: {e}"))?;
            if rescale && z <= -1.0 {
                return Err(format!("raw value {z} cannot be log-rescaled"));
            }
            let z = if rescale { log_rescale(z) } else { z };
            values.push(T::lit(z));
        }
    }
    Raster::new(rows, cols, values).map_err(|e| e.to_string())
}

pub fn load_raster<T: Real>(path: &Path, rescale: bool) -> Result<CoefficientField<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raster = parse_raster(&text, rescale).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        message,
    })?;
    Ok(CoefficientField::raster(raster))
}
