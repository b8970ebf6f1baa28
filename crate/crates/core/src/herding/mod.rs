//! The herding dynamical system.
//!
//! One step, with effective coefficients `c = γ(w + a)`:
//!
//! 1. impute `z*_n = argmax_z c·g(x_n, z)` for every data case,
//! 2. pick a pseudo-sample `s*` maximizing `c·g(s)` (exactly, or by
//!    coordinate ascent from a variant-specific start),
//! 3. move `w_α += η (ḡ_α − g_α(s*))` for every non-frozen feature, where
//!    `ḡ` is the data-side average, a fixed data moment, or learned rates.
//!
//! Imputations run through [`crate::exec`]; the data-side sum is always
//! accumulated in ascending case order so trajectories are bit-identical for
//! any worker count.

mod rates;

pub use rates::{learn_rates, RateLearner, RateSource, RateVector};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, HerdError, Result};
use crate::exec::{map_slice, Execution};
use crate::maximize::{check_exhaustive, lowest_energy_index, AscentConfig, DEFAULT_JOINT_CAP};
use crate::model::{norm_l2, norm_linf, FeatureModel, JointState, WeightVector};

/// Seed of the default initial weights.
pub const DEFAULT_WEIGHT_SEED: u64 = 0x4845_5244;
/// Half-width of the default initial weight box.
pub const DEFAULT_WEIGHT_SCALE: f64 = 0.01;

/// Small deterministic weights, uniform in `[-0.01, 0.01]`.
pub fn default_initial_weights(n_features: usize, seed: u64) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_features)
        .map(|_| rng.gen_range(-DEFAULT_WEIGHT_SCALE..=DEFAULT_WEIGHT_SCALE))
        .collect::<Vec<_>>()
        .into()
}

/// How the pseudo-sample `s*` is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointSearch {
    /// Exact joint maximization.
    Exhaustive,
    /// Coordinate ascent from the previous pseudo-sample.
    WarmStart,
    /// Coordinate ascent from the imputed lowest-energy data case.
    LowestEnergyCase,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// Exact maximizations throughout.
    Idealized,
    /// Warm-started local search (`H`).
    Local,
    /// Local search from the lowest-energy data case (`SH`).
    Safe,
    /// No hidden variables; the driving term is the fixed data moment.
    FullyObserved(JointSearch),
    /// Data-free herding driven by learned rates.
    Decoupled { rates: RateVector, search: JointSearch },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Idealized => "idealized",
            Variant::Local => "local",
            Variant::Safe => "safe",
            Variant::FullyObserved(_) => "fully-observed",
            Variant::Decoupled { .. } => "decoupled",
        }
    }

    pub fn search(&self) -> JointSearch {
        match self {
            Variant::Idealized => JointSearch::Exhaustive,
            Variant::Local => JointSearch::WarmStart,
            Variant::Safe => JointSearch::LowestEnergyCase,
            Variant::FullyObserved(s) => *s,
            Variant::Decoupled { search, .. } => *search,
        }
    }

    fn imputes_hidden(&self) -> bool {
        matches!(self, Variant::Idealized | Variant::Local | Variant::Safe)
    }
}

/// Step size `η`, energy scale `γ` and weight offset `a`. Any member of this
/// family produces the same state sequence as the canonical chain started
/// from [`apply_transform_equivalence`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransformParams {
    pub eta: f64,
    pub gamma: f64,
    /// Per-feature offset; empty means zero.
    pub offset: Vec<f64>,
}

impl Default for TransformParams {
    fn default() -> Self {
        Self {
            eta: 1.0,
            gamma: 1.0,
            offset: Vec::new(),
        }
    }
}

impl TransformParams {
    pub fn new(eta: f64, gamma: f64, offset: Vec<f64>) -> Result<Self> {
        let t = Self { eta, gamma, offset };
        t.validate(None)?;
        Ok(t)
    }

    pub fn is_canonical(&self) -> bool {
        self.eta == 1.0 && self.gamma == 1.0 && self.offset.iter().all(|&a| a == 0.0)
    }

    fn validate(&self, n_features: Option<usize>) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(HerdError::InvalidParameter(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(HerdError::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.offset.iter().any(|a| !a.is_finite()) {
            return Err(HerdError::InvalidParameter("offset must be finite".into()));
        }
        if let Some(f) = n_features {
            if !self.offset.is_empty() {
                check_len("transform offset", f, self.offset.len())?;
            }
        }
        Ok(())
    }

    /// `γ (w + a)` into `out`.
    pub fn effective_into(&self, w: &[f64], out: &mut Vec<f64>) {
        out.clear();
        if self.offset.is_empty() {
            out.extend(w.iter().map(|v| self.gamma * v));
        } else {
            out.extend(w.iter().zip(&self.offset).map(|(v, a)| self.gamma * (v + a)));
        }
    }

    pub fn effective(&self, w: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(w.len());
        self.effective_into(w, &mut out);
        out
    }
}

/// `v0 = (w0 + a) / η`: the canonical-chain start reproducing the state
/// sequence of the chain with `transform` started at `w0`.
pub fn apply_transform_equivalence(w0: &[f64], transform: &TransformParams) -> Result<WeightVector> {
    transform.validate(Some(w0.len()))?;
    let v: Vec<f64> = if transform.offset.is_empty() {
        w0.iter().map(|w| w / transform.eta).collect()
    } else {
        w0.iter()
            .zip(&transform.offset)
            .map(|(w, a)| (w + a) / transform.eta)
            .collect()
    };
    Ok(v.into())
}

/// Everything that stays fixed over a chain's lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub variant: Variant,
    pub transform: TransformParams,
    /// Features whose weights never move.
    pub frozen: Vec<usize>,
    pub ascent: AscentConfig,
    pub joint_cap: u128,
    pub execution: Execution,
}

impl ChainConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            transform: TransformParams::default(),
            frozen: Vec::new(),
            ascent: AscentConfig::default(),
            joint_cap: DEFAULT_JOINT_CAP,
            execution: Execution::default(),
        }
    }

    pub fn with_transform(mut self, transform: TransformParams) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_frozen(mut self, frozen: impl IntoIterator<Item = usize>) -> Self {
        self.frozen = frozen.into_iter().collect();
        self
    }

    pub fn with_ascent(mut self, ascent: AscentConfig) -> Self {
        self.ascent = ascent;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Running sums behind the moment and norm diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTracker {
    pub initial_weights: Vec<f64>,
    pub driving_sum: Vec<f64>,
    pub sample_sum: Vec<f64>,
    pub max_norm_l2: f64,
    pub max_norm_linf: f64,
    pub max_step_l2: f64,
}

impl MomentTracker {
    fn new(w0: &[f64]) -> Self {
        let f = w0.len();
        Self {
            initial_weights: w0.to_vec(),
            driving_sum: vec![0.0; f],
            sample_sum: vec![0.0; f],
            max_norm_l2: norm_l2(w0),
            max_norm_linf: norm_linf(w0),
            max_step_l2: 0.0,
        }
    }
}

/// The mutable state of one herding chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HerdState<V, H> {
    t: u64,
    weights: WeightVector,
    hidden: Vec<H>,
    sample: JointState<V, H>,
    driving: Vec<f64>,
    sample_features: Vec<f64>,
    trackers: MomentTracker,
}

pub type HerdStateOf<M> = HerdState<<M as FeatureModel>::Visible, <M as FeatureModel>::Hidden>;

impl<V, H> HerdState<V, H> {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Per-case imputations `z*_nt` of the last step (empty when the
    /// variant does not impute).
    pub fn hidden(&self) -> &[H] {
        &self.hidden
    }

    /// The last pseudo-sample `s*_t`; before the first step, the warm start.
    pub fn sample(&self) -> &JointState<V, H> {
        &self.sample
    }

    /// The driving term `ḡ_t` of the last step.
    pub fn driving(&self) -> &[f64] {
        &self.driving
    }

    /// `g(s*_t)` of the last step.
    pub fn sample_features(&self) -> &[f64] {
        &self.sample_features
    }

    pub fn trackers(&self) -> &MomentTracker {
        &self.trackers
    }

    pub fn mean_driving(&self) -> Vec<f64> {
        let t = self.t as f64;
        self.trackers.driving_sum.iter().map(|s| s / t).collect()
    }

    pub fn mean_sample_features(&self) -> Vec<f64> {
        let t = self.t as f64;
        self.trackers.sample_sum.iter().map(|s| s / t).collect()
    }
}

/// `running-mean(ḡ) − running-mean(g(s*))`.
pub fn moment_gap<V, H>(state: &HerdState<V, H>) -> Result<Vec<f64>> {
    if state.t == 0 {
        return Err(HerdError::InvalidParameter(
            "moment gap is undefined before the first step".into(),
        ));
    }
    let t = state.t as f64;
    Ok(state
        .trackers
        .driving_sum
        .iter()
        .zip(&state.trackers.sample_sum)
        .map(|(d, s)| d / t - s / t)
        .collect())
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: u64,
    pub norm_l2: f64,
    pub norm_linf: f64,
    pub gap: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<V, H> {
    pub records: Vec<TrajectoryRecord>,
    /// Pseudo-samples at the recorded steps.
    pub samples: Vec<JointState<V, H>>,
}

/// A model, its data and a chain configuration, ready to step states.
#[derive(Debug)]
pub struct Herder<'a, M: FeatureModel> {
    model: &'a M,
    data: &'a [M::Visible],
    config: ChainConfig,
    frozen_mask: Vec<bool>,
}

impl<'a, M: FeatureModel> Herder<'a, M> {
    pub fn new(model: &'a M, data: &'a [M::Visible], config: ChainConfig) -> Result<Self> {
        let f = model.n_features();
        let variant = config.variant.name();
        config.transform.validate(Some(f))?;
        for x in data {
            model.check_visible(x)?;
        }
        match &config.variant {
            Variant::Decoupled { rates, .. } => check_len("rate vector", f, rates.values().len())?,
            _ if data.is_empty() => return Err(HerdError::EmptyDataset),
            _ => {}
        }
        if let Variant::FullyObserved(_) = config.variant {
            if model.has_hidden() {
                return Err(HerdError::IncompatibleVariant {
                    variant,
                    reason: "the model has hidden variables".into(),
                });
            }
        }
        match config.variant.search() {
            JointSearch::Exhaustive => check_exhaustive(model, config.joint_cap)?,
            JointSearch::LowestEnergyCase if data.is_empty() => {
                return Err(HerdError::IncompatibleVariant {
                    variant,
                    reason: "lowest-energy initialization needs data".into(),
                })
            }
            _ => {}
        }
        let mut frozen_mask = vec![false; f];
        for &a in &config.frozen {
            if a >= f {
                return Err(HerdError::DimensionMismatch {
                    what: "frozen feature index",
                    expected: f,
                    found: a,
                });
            }
            frozen_mask[a] = true;
        }
        Ok(Self {
            model,
            data,
            config,
            frozen_mask,
        })
    }

    pub fn model(&self) -> &M {
        self.model
    }

    pub fn data(&self) -> &[M::Visible] {
        self.data
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn is_frozen(&self, feature: usize) -> bool {
        self.frozen_mask[feature]
    }

    /// Starts a chain at `w0`, or at [`default_initial_weights`].
    pub fn init(&self, w0: Option<WeightVector>) -> Result<HerdStateOf<M>> {
        let f = self.model.n_features();
        let w0 = match w0 {
            Some(w) => {
                check_len("initial weights", f, w.len())?;
                WeightVector::new(w.into_inner())?
            }
            None => default_initial_weights(f, DEFAULT_WEIGHT_SEED),
        };
        let eff = self.config.transform.effective(&w0);
        let hidden = if self.config.variant.imputes_hidden() {
            map_slice(self.config.execution, self.data, |x| self.model.argmax_hidden(&eff, x))
        } else {
            Vec::new()
        };
        let sample = match self.data.first() {
            Some(x0) => {
                let z0 = hidden
                    .first()
                    .cloned()
                    .unwrap_or_else(|| self.model.argmax_hidden(&eff, x0));
                JointState::new(x0.clone(), z0)
            }
            None => self.model.first_state(),
        };
        let driving = match &self.config.variant {
            Variant::FullyObserved(_) => self.data_moment(&eff),
            Variant::Decoupled { rates, .. } => rates.values().to_vec(),
            _ => self.data_average(&hidden),
        };
        Ok(HerdState {
            t: 0,
            trackers: MomentTracker::new(&w0),
            weights: w0,
            hidden,
            sample,
            driving,
            sample_features: vec![0.0; f],
        })
    }

    fn data_moment(&self, eff: &[f64]) -> Vec<f64> {
        let hidden: Vec<M::Hidden> = self.data.iter().map(|x| self.model.argmax_hidden(eff, x)).collect();
        self.data_average(&hidden)
    }

    /// `(1/N) Σ_n g(x_n, z_n)`, summed in ascending `n`.
    fn data_average(&self, hidden: &[M::Hidden]) -> Vec<f64> {
        let mut acc = vec![0.0; self.model.n_features()];
        if hidden.is_empty() {
            return acc;
        }
        for (x, z) in self.data.iter().zip(hidden) {
            self.model.accumulate_features(x, z, 1.0, &mut acc);
        }
        let n = hidden.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
        acc
    }

    /// Advances `state` by one herding step.
    pub fn step(&self, state: &mut HerdStateOf<M>) {
        let model = self.model;
        let eff = self.config.transform.effective(&state.weights);

        if self.config.variant.imputes_hidden() {
            state.hidden = map_slice(self.config.execution, self.data, |x| model.argmax_hidden(&eff, x));
            state.driving = self.data_average(&state.hidden);
        }

        let next = match self.config.variant.search() {
            JointSearch::Exhaustive => model.argmax_joint_unchecked(&eff),
            JointSearch::WarmStart => model.ascend_joint(&eff, state.sample.clone(), &self.config.ascent),
            JointSearch::LowestEnergyCase => {
                let start = if state.hidden.len() == self.data.len() {
                    let n = lowest_energy_index(model, &eff, self.data, &state.hidden);
                    JointState::new(self.data[n].clone(), state.hidden[n].clone())
                } else {
                    let hidden: Vec<M::Hidden> = self.data.iter().map(|x| model.argmax_hidden(&eff, x)).collect();
                    let n = lowest_energy_index(model, &eff, self.data, &hidden);
                    JointState::new(self.data[n].clone(), hidden[n].clone())
                };
                model.ascend_joint(&eff, start, &self.config.ascent)
            }
        };

        state.sample_features.iter_mut().for_each(|g| *g = 0.0);
        model.accumulate_features(&next.visible, &next.hidden, 1.0, &mut state.sample_features);
        state.sample = next;

        let eta = self.config.transform.eta;
        let mut step_sq = 0.0;
        for (a, w) in state.weights.iter_mut().enumerate() {
            if self.frozen_mask[a] {
                continue;
            }
            let delta = eta * (state.driving[a] - state.sample_features[a]);
            *w += delta;
            step_sq += delta * delta;
        }

        let tr = &mut state.trackers;
        for (s, d) in tr.driving_sum.iter_mut().zip(&state.driving) {
            *s += d;
        }
        for (s, g) in tr.sample_sum.iter_mut().zip(&state.sample_features) {
            *s += g;
        }
        tr.max_norm_l2 = tr.max_norm_l2.max(state.weights.norm_l2());
        tr.max_norm_linf = tr.max_norm_linf.max(state.weights.norm_linf());
        tr.max_step_l2 = tr.max_step_l2.max(step_sq.sqrt());
        state.t += 1;
    }

    /// Runs `steps` steps, calling `observe` after each.
    pub fn run_with<F>(&self, state: &mut HerdStateOf<M>, steps: u64, mut observe: F)
    where
        F: FnMut(&HerdStateOf<M>),
    {
        for _ in 0..steps {
            self.step(state);
            observe(state);
        }
    }

    /// Runs `steps` steps, recording every `record_every`-th one.
    pub fn run(
        &self,
        state: &mut HerdStateOf<M>,
        steps: u64,
        record_every: u64,
    ) -> Result<Trajectory<M::Visible, M::Hidden>> {
        if steps == 0 {
            return Err(HerdError::InvalidParameter("steps must be at least 1".into()));
        }
        if record_every == 0 {
            return Err(HerdError::InvalidParameter("record_every must be at least 1".into()));
        }
        let mut records = Vec::new();
        let mut samples = Vec::new();
        self.run_with(state, steps, |s| {
            if s.t % record_every == 0 {
                records.push(TrajectoryRecord {
                    t: s.t,
                    norm_l2: s.weights.norm_l2(),
                    norm_linf: s.weights.norm_linf(),
                    gap: moment_gap(s).expect("t >= 1 after a step"),
                });
                samples.push(s.sample.clone());
            }
        });
        Ok(Trajectory { records, samples })
    }

    /// Largest violation over non-frozen features of
    /// `gap_α = (w_t − w_0)_α / (η t)`.
    pub fn telescoping_residual(&self, state: &HerdStateOf<M>) -> Result<f64> {
        let gap = moment_gap(state)?;
        let scale = self.config.transform.eta * state.t as f64;
        Ok(gap
            .iter()
            .enumerate()
            .filter(|(a, _)| !self.frozen_mask[*a])
            .map(|(a, g)| (g - (state.weights[a] - state.trackers.initial_weights[a]) / scale).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EnumeratedModel, RbmModel};
    use approx::assert_abs_diff_eq;

    fn one_spin() -> EnumeratedModel {
        EnumeratedModel::fully_observed(&[vec![1.0], vec![-1.0]]).unwrap()
    }

    fn degenerate_xz() -> EnumeratedModel {
        EnumeratedModel::from_fn(2, 2, 1, |v, h, row| {
            row[0] = if v == h { 1.0 } else { -1.0 };
        })
        .unwrap()
    }

    #[test]
    fn period_two_orbit() {
        let m = one_spin();
        let data = [0usize, 1];
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::FullyObserved(JointSearch::Exhaustive))).unwrap();
        let mut s = herder.init(Some(vec![0.3].into())).unwrap();
        assert_eq!(s.driving(), &[0.0]);
        herder.step(&mut s);
        assert_eq!(s.sample().visible, 0);
        assert_abs_diff_eq!(s.weights()[0], -0.7, epsilon = 1e-15);
        herder.step(&mut s);
        assert_eq!(s.sample().visible, 1);
        assert_abs_diff_eq!(s.weights()[0], 0.3, epsilon = 1e-15);
        assert_eq!(s.mean_sample_features(), vec![0.0]);
        assert_eq!(s.mean_driving(), vec![0.0]);
        assert_abs_diff_eq!(moment_gap(&s).unwrap()[0], 0.0, epsilon = 1e-15);
        assert!(herder.telescoping_residual(&s).unwrap() < 1e-15);
    }

    #[test]
    fn degenerate_face_is_a_fixed_point() {
        let m = degenerate_xz();
        let data = [0usize];
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::Idealized)).unwrap();
        let mut s = herder.init(Some(vec![0.8].into())).unwrap();
        for _ in 0..5 {
            herder.step(&mut s);
            assert_eq!(s.driving(), &[1.0]);
            assert_eq!(s.sample_features(), &[1.0]);
            assert_eq!(s.weights()[0], 0.8);
        }
    }

    #[test]
    fn explicit_and_default_init() {
        let m = RbmModel::new(3, 2).unwrap();
        let data = vec![vec![1, -1, 1], vec![-1, -1, 1]];
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::Local)).unwrap();
        let w0: Vec<f64> = (0..m.n_features()).map(|a| a as f64 * 0.1 - 0.5).collect();
        let s = herder.init(Some(w0.clone().into())).unwrap();
        assert_eq!(&s.weights()[..], &w0[..]);
        assert_eq!(s.t(), 0);
        assert_eq!(s.hidden().len(), 2);
        assert_eq!(s.sample().visible, data[0]);
        assert_eq!(herder.init(None).unwrap(), herder.init(None).unwrap());
        let d = herder.init(None).unwrap();
        assert!(d.weights().iter().all(|w| w.abs() <= DEFAULT_WEIGHT_SCALE));
        assert!(herder.init(Some(vec![0.0; 3].into())).is_err());
    }

    #[test]
    fn fully_observed_has_no_imputations() {
        let m = one_spin();
        let data = [0usize, 0, 1];
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::FullyObserved(JointSearch::Exhaustive))).unwrap();
        let mut s = herder.init(None).unwrap();
        assert!(s.hidden().is_empty());
        assert_abs_diff_eq!(s.driving()[0], 1.0 / 3.0, epsilon = 1e-15);
        let d0 = s.driving().to_vec();
        herder.run_with(&mut s, 10, |_| {});
        assert_eq!(s.driving(), &d0[..]);
    }

    #[test]
    fn decoupled_from_data_moment_matches_fully_observed() {
        let m = one_spin();
        let data = [0usize, 0, 1];
        let fo = Herder::new(&m, &data, ChainConfig::new(Variant::FullyObserved(JointSearch::Exhaustive))).unwrap();
        let mut a = fo.init(None).unwrap();
        let rates = RateVector::new(a.driving().to_vec(), 0);
        let dec = Herder::new(
            &m,
            &[],
            ChainConfig::new(Variant::Decoupled {
                rates,
                search: JointSearch::Exhaustive,
            }),
        )
        .unwrap();
        let mut b = dec.init(None).unwrap();
        for _ in 0..200 {
            fo.step(&mut a);
            dec.step(&mut b);
            assert_eq!(a.sample(), b.sample());
            assert_eq!(a.weights(), b.weights());
        }
    }

    #[test]
    fn configuration_errors() {
        let m = one_spin();
        assert!(matches!(
            Herder::new(&m, &[], ChainConfig::new(Variant::Local)),
            Err(HerdError::EmptyDataset)
        ));
        let rbm = RbmModel::new(2, 2).unwrap();
        let data = vec![vec![1, 1]];
        assert!(matches!(
            Herder::new(&rbm, &data, ChainConfig::new(Variant::FullyObserved(JointSearch::WarmStart))),
            Err(HerdError::IncompatibleVariant { .. })
        ));
        let big = RbmModel::new(30, 30).unwrap();
        let bigdata = vec![vec![1; 30]];
        assert!(matches!(
            Herder::new(&big, &bigdata, ChainConfig::new(Variant::Idealized)),
            Err(HerdError::CapExceeded { .. })
        ));
        assert!(Herder::new(&rbm, &data, ChainConfig::new(Variant::Local).with_frozen([99])).is_err());
        assert!(TransformParams::new(0.0, 1.0, vec![]).is_err());
        assert!(TransformParams::new(1.0, -1.0, vec![]).is_err());
        let bad = ChainConfig::new(Variant::Local).with_transform(TransformParams {
            eta: 1.0,
            gamma: 1.0,
            offset: vec![0.0; 3],
        });
        assert!(Herder::new(&rbm, &data, bad).is_err());
    }

    #[test]
    fn transform_equivalence_arithmetic() {
        let t = TransformParams::new(2.0, 1.0, vec![0.5]).unwrap();
        assert_eq!(&apply_transform_equivalence(&[1.0], &t).unwrap()[..], &[0.75]);
        let id = TransformParams::default();
        assert_eq!(&apply_transform_equivalence(&[1.25, -3.0], &id).unwrap()[..], &[1.25, -3.0]);
        assert!(id.is_canonical());
    }

    #[test]
    fn frozen_weights_never_move() {
        let m = RbmModel::new(4, 3).unwrap();
        let data = vec![vec![1, -1, 1, 1], vec![-1, -1, 1, -1], vec![1, 1, -1, -1]];
        let cfg = ChainConfig::new(Variant::Safe).with_frozen(m.hidden_bias_range());
        let herder = Herder::new(&m, &data, cfg).unwrap();
        let mut s = herder.init(None).unwrap();
        let w0 = s.weights().clone();
        herder.run_with(&mut s, 300, |st| {
            for a in m.hidden_bias_range() {
                assert_eq!(st.weights()[a], w0[a]);
            }
        });
        assert!(herder.telescoping_residual(&s).unwrap() < 1e-10 * 300.0);
    }

    #[test]
    fn run_composes_and_records() {
        let m = RbmModel::new(4, 3).unwrap();
        let data = vec![vec![1, -1, 1, 1], vec![-1, -1, 1, -1]];
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::Local)).unwrap();
        let mut a = herder.init(None).unwrap();
        let mut b = a.clone();
        let tr = herder.run(&mut a, 50, 5).unwrap();
        herder.run(&mut a, 50, 5).unwrap();
        herder.run(&mut b, 100, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(tr.records.len(), 10);
        assert_eq!(tr.samples.len(), 10);
        assert_eq!(tr.records[0].t, 5);
        assert!(herder.run(&mut a, 0, 1).is_err());
        assert!(herder.run(&mut a, 1, 0).is_err());
    }

    #[test]
    fn one_step_gap_is_the_weight_change() {
        let m = RbmModel::new(3, 2).unwrap();
        let data = vec![vec![1, -1, 1], vec![-1, 1, 1]];
        let t = TransformParams::new(2.5, 1.0, vec![]).unwrap();
        let herder = Herder::new(&m, &data, ChainConfig::new(Variant::Idealized).with_transform(t)).unwrap();
        let mut s = herder.init(None).unwrap();
        let w0 = s.weights().clone();
        herder.step(&mut s);
        let gap = moment_gap(&s).unwrap();
        for a in 0..m.n_features() {
            assert_abs_diff_eq!(gap[a], (s.weights()[a] - w0[a]) / 2.5, epsilon = 1e-15);
        }
        let fresh = herder.init(None).unwrap();
        assert!(moment_gap(&fresh).is_err());
    }
}
