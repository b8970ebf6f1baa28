use super::{HerdStateOf, Herder};
use crate::error::Result;
use crate::model::FeatureModel;

/// Learned driving rates `r_α` for data-free herding.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    values: Vec<f64>,
    count: u64,
}

impl RateVector {
    pub fn new(values: Vec<f64>, count: u64) -> Self {
        Self { values, count }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of steps averaged into the rates.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Which per-step quantity the rates average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateSource {
    /// The data-side driving term `ḡ_t`.
    #[default]
    Driving,
    /// The pseudo-sample features `g(s*_t)`; asymptotically equal to the
    /// driving average whenever the weights stay bounded.
    PseudoSamples,
}

/// Online average `r_t = ((t−1)/t) r_{t−1} + (1/t) ḡ_t`, `r_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateLearner {
    rates: Vec<f64>,
    count: u64,
    source: RateSource,
}

impl RateLearner {
    pub fn new(n_features: usize, source: RateSource) -> Self {
        Self {
            rates: vec![0.0; n_features],
            count: 0,
            source,
        }
    }

    pub fn push(&mut self, value: &[f64]) {
        self.count += 1;
        let t = self.count as f64;
        // same recurrence, written so that a constant input is reproduced exactly
        for (r, g) in self.rates.iter_mut().zip(value) {
            *r += (g - *r) / t;
        }
    }

    pub fn observe<V, H>(&mut self, state: &super::HerdState<V, H>) {
        match self.source {
            RateSource::Driving => self.push(state.driving()),
            RateSource::PseudoSamples => self.push(state.sample_features()),
        }
    }

    pub fn rates(&self) -> RateVector {
        RateVector::new(self.rates.clone(), self.count)
    }
}

/// Runs a data-driven chain for `steps` steps and averages its rates.
pub fn learn_rates<M: FeatureModel>(
    herder: &Herder<'_, M>,
    state: &mut HerdStateOf<M>,
    steps: u64,
    source: RateSource,
) -> Result<RateVector> {
    let mut learner = RateLearner::new(herder.model().n_features(), source);
    herder.run_with(state, steps, |s| learner.observe(s));
    Ok(learner.rates())
}
