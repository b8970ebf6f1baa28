//! Two-feature herding on a grid: `f(x) = sin x`, `g(x) = cos x`, with `x`
//! uniform on a unit-step grid starting at `−π`.

use std::f64::consts::PI;

use crate::error::{HerdError, Result};
use crate::herding::{ChainConfig, Herder, JointSearch, Variant};
use crate::model::EnumeratedModel;
use crate::tipi::tipi_value;

/// Grid `−π, −π + step, …` up to and including the last point `≤ π`.
/// With `step = 1` this is seven points ending at `≈ 2.86`.
pub fn sin_cos_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(HerdError::InvalidParameter(format!("grid step must be positive, got {step}")));
    }
    let count = ((2.0 * PI) / step).floor() as usize + 1;
    Ok((0..count).map(|k| -PI + k as f64 * step).collect())
}

#[derive(Debug, Clone)]
pub struct SinCosSystem {
    grid: Vec<f64>,
    model: EnumeratedModel,
    data: Vec<usize>,
}

impl SinCosSystem {
    pub fn new(step: f64) -> Result<Self> {
        let grid = sin_cos_grid(step)?;
        let rows: Vec<Vec<f64>> = grid.iter().map(|x| vec![x.sin(), x.cos()]).collect();
        let model = EnumeratedModel::fully_observed(&rows)?;
        let data = (0..grid.len()).collect();
        Ok(Self { grid, model, data })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn model(&self) -> &EnumeratedModel {
        &self.model
    }

    /// Every grid point once, i.e. the uniform distribution.
    pub fn data(&self) -> &[usize] {
        &self.data
    }

    pub fn herder(&self) -> Result<Herder<'_, EnumeratedModel>> {
        Herder::new(
            &self.model,
            &self.data,
            ChainConfig::new(Variant::FullyObserved(JointSearch::Exhaustive)),
        )
    }

    /// `ℓ0` on an `n × n` grid over `[−extent, extent]²`, row-major in `w1`.
    pub fn tipi_surface(&self, extent: f64, n: usize) -> Result<Vec<[f64; 3]>> {
        if n < 3 {
            return Err(HerdError::InvalidParameter(format!(
                "surface grid needs at least 3 points per axis, got {n}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(HerdError::InvalidParameter("surface extent must be positive".into()));
        }
        let axis: Vec<f64> = (0..n)
            .map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64)
            .collect();
        let mut out = Vec::with_capacity(n * n);
        for &w1 in &axis {
            for &w2 in &axis {
                out.push([w1, w2, tipi_value(&self.model, &[w1, w2], &self.data)?]);
            }
        }
        Ok(out)
    }
}
