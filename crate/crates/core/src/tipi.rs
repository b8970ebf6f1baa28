//! The zero-temperature objective ("Tipi function")
//!
//! `ℓ0(w) = (1/N) Σ_n max_z w·g(x_n, z) − max_s w·g(s)`
//!
//! together with its canonical subgradient, the finite-temperature
//! log-likelihood it is the limit of, and the gradient-norm bound that
//! keeps idealized herding inside a ball.
//!
//! Everything here evaluates both maxima exactly, so it is only meant for
//! models whose joint search fits under the exhaustive cap.

use crate::error::{check_len, HerdError, Result};
use crate::maximize::{check_exhaustive, DEFAULT_JOINT_CAP};
use crate::model::{norm_l2, EnumeratedModel, FeatureModel, StateOf};

/// The states selecting the active linear face of `ℓ0` at some `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct TipiMaximizers<M: FeatureModel> {
    pub hidden: Vec<M::Hidden>,
    pub joint: StateOf<M>,
}

pub fn tipi_maximizers<M: FeatureModel>(
    model: &M,
    w: &[f64],
    data: &[M::Visible],
) -> Result<TipiMaximizers<M>> {
    check_len("weight vector", model.n_features(), w.len())?;
    if data.is_empty() {
        return Err(HerdError::EmptyDataset);
    }
    for x in data {
        model.check_visible(x)?;
    }
    check_exhaustive(model, DEFAULT_JOINT_CAP)?;
    Ok(TipiMaximizers {
        hidden: data.iter().map(|x| model.argmax_hidden(w, x)).collect(),
        joint: model.argmax_joint_unchecked(w),
    })
}

pub fn tipi_value<M: FeatureModel>(model: &M, w: &[f64], data: &[M::Visible]) -> Result<f64> {
    let m = tipi_maximizers(model, w, data)?;
    let data_term = data
        .iter()
        .zip(&m.hidden)
        .map(|(x, z)| model.score(w, x, z))
        .sum::<f64>()
        / data.len() as f64;
    Ok(data_term - model.score(w, &m.joint.visible, &m.joint.hidden))
}

/// `(1/N) Σ_n g(x_n, z*_n) − g(s*)` for the tie-broken maximizers.
pub fn tipi_gradient<M: FeatureModel>(model: &M, w: &[f64], data: &[M::Visible]) -> Result<Vec<f64>> {
    let m = tipi_maximizers(model, w, data)?;
    let mut grad = vec![0.0; model.n_features()];
    for (x, z) in data.iter().zip(&m.hidden) {
        model.accumulate_features(x, z, 1.0, &mut grad);
    }
    let inv_n = 1.0 / data.len() as f64;
    for g in &mut grad {
        *g *= inv_n;
    }
    model.accumulate_features(&m.joint.visible, &m.joint.hidden, -1.0, &mut grad);
    Ok(grad)
}

/// Finite-temperature log-likelihood `ℓ_T(w) = T·ℓ(w/T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureLoglik {
    pub value: f64,
    /// `log Z(w/T)`, the log normalizer of the Gibbs distribution.
    pub log_partition: f64,
}

pub fn temperature_loglik(model: &EnumeratedModel, w: &[f64], data: &[usize], temperature: f64) -> Result<TemperatureLoglik> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(HerdError::InvalidParameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    check_len("weight vector", model.n_features(), w.len())?;
    if data.is_empty() {
        return Err(HerdError::EmptyDataset);
    }
    for x in data {
        model.check_visible(x)?;
    }
    let h_count = model.n_hidden_states();
    let mut clamped = 0.0;
    for x in data {
        clamped += log_sum_exp((0..h_count).map(|h| model.score(w, x, &h) / temperature));
    }
    clamped /= data.len() as f64;
    let log_partition = log_sum_exp(
        (0..model.n_visible_states())
            .flat_map(|v| (0..h_count).map(move |h| (v, h)))
            .map(|(v, h)| model.score(w, &v, &h) / temperature),
    );
    Ok(TemperatureLoglik {
        value: temperature * (clamped - log_partition),
        log_partition,
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `B = sqrt(Σ_α (max_s g_α − min_s g_α)²)`, an upper bound on `‖∇ℓ0‖₂`
/// valid for every `w` and every dataset.
pub fn gradient_norm_bound<M: FeatureModel>(model: &M) -> f64 {
    model
        .feature_ranges()
        .iter()
        .map(|(lo, hi)| (hi - lo) * (hi - lo))
        .sum::<f64>()
        .sqrt()
}

/// Radius diagnostics: the gradient bound `B`, the empirical recurrence
/// radius `R` (largest weight norm seen) and the safe radius `R' = R + ηB`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundDiagnostics {
    pub grad_bound: f64,
    pub recurrence_radius: f64,
    pub safe_radius: f64,
}

impl BoundDiagnostics {
    pub fn new(grad_bound: f64, recurrence_radius: f64, eta: f64) -> Self {
        Self {
            grad_bound,
            recurrence_radius,
            safe_radius: recurrence_radius + eta * grad_bound,
        }
    }

    /// Uses the largest `‖w_t‖₂` along a weight trajectory as `R`.
    pub fn from_weights<'a, M: FeatureModel>(
        model: &M,
        weights: impl IntoIterator<Item = &'a [f64]>,
        eta: f64,
    ) -> Self {
        let r = weights.into_iter().map(norm_l2).fold(0.0, f64::max);
        Self::new(gradient_norm_bound(model), r, eta)
    }
}
