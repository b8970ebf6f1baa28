//! Model families, states, weights and energy evaluation.
//!
//! Every state is a spin configuration in `{-1, +1}`; `{0, 1}` data is
//! converted at the I/O boundary. Joint states of enumerable models are
//! indexed visible-major, `j = v * H + h`, and every tie-break in the crate
//! refers to that canonical order.

mod enumerated;
mod rbm;

use std::fmt;
use std::ops::{Deref, DerefMut};

pub use enumerated::EnumeratedModel;
pub use rbm::RbmModel;

use crate::error::{check_len, HerdError, Result};
use crate::maximize::AscentConfig;

/// A single binary unit, always `-1` or `+1`.
pub type Spin = i8;

/// A pseudo-sample or data imputation `s = (x, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointState<V, H> {
    pub visible: V,
    pub hidden: H,
}

impl<V, H> JointState<V, H> {
    pub fn new(visible: V, hidden: H) -> Self {
        Self { visible, hidden }
    }
}

/// Joint state type of a model.
pub type StateOf<M> = JointState<<M as FeatureModel>::Visible, <M as FeatureModel>::Hidden>;

/// The dynamic energy coefficients `w_α`, one per feature.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Rejects non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HerdError::InvalidParameter(format!(
                "weight {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_l2(&self) -> f64 {
        norm_l2(&self.0)
    }

    pub fn norm_linf(&self) -> f64 {
        norm_linf(&self.0)
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for WeightVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

pub(crate) fn norm_l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// A collection of visible spin configurations `{x_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    dim: usize,
    cases: Vec<Vec<Spin>>,
}

impl Dataset {
    /// Requires at least one case, equal widths, and entries in `{-1, +1}`.
    pub fn new(cases: Vec<Vec<Spin>>) -> Result<Self> {
        let first = cases.first().ok_or(HerdError::EmptyDataset)?;
        let dim = first.len();
        for (n, case) in cases.iter().enumerate() {
            check_len("dataset case width", dim, case.len())?;
            if let Some(&bad) = case.iter().find(|&&s| s != 1 && s != -1) {
                return Err(HerdError::InvalidParameter(format!(
                    "case {n} contains {bad}, expected -1 or +1"
                )));
            }
        }
        Ok(Self { dim, cases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn cases(&self) -> &[Vec<Spin>] {
        &self.cases
    }

    pub fn into_cases(self) -> Vec<Vec<Spin>> {
        self.cases
    }
}

/// A family of features `g_α(x, z)` over a binary state space.
///
/// Methods other than the `check_*` ones assume their arguments already
/// match the model's dimensions; the free functions in this module and in
/// [`crate::maximize`] validate first.
pub trait FeatureModel: Send + Sync {
    type Visible: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Hidden: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn n_features(&self) -> usize;

    fn check_visible(&self, x: &Self::Visible) -> Result<()>;

    fn check_hidden(&self, z: &Self::Hidden) -> Result<()>;

    /// `out += scale * g(x, z)`.
    fn accumulate_features(&self, x: &Self::Visible, z: &Self::Hidden, scale: f64, out: &mut [f64]);

    /// `Σ_α w_α g_α(x, z)`, summed in ascending feature order.
    fn score(&self, w: &[f64], x: &Self::Visible, z: &Self::Hidden) -> f64;

    /// Exact conditional maximizer of the score over hidden configurations.
    fn argmax_hidden(&self, w: &[f64], x: &Self::Visible) -> Self::Hidden;

    /// Number of configurations an exhaustive joint search has to visit.
    fn exhaustive_search_size(&self) -> u128;

    /// Exact joint maximizer, lowest canonical joint index on ties.
    /// Callers are responsible for checking [`Self::exhaustive_search_size`].
    fn argmax_joint_unchecked(&self, w: &[f64]) -> StateOf<Self>;

    /// Single-coordinate ascent from `start`; strict improvements only.
    fn ascend_joint(&self, w: &[f64], start: StateOf<Self>, cfg: &AscentConfig) -> StateOf<Self>;

    /// `(min_s g_α(s), max_s g_α(s))` for every feature.
    fn feature_ranges(&self) -> Vec<(f64, f64)>;

    /// False when the hidden space is a single dummy configuration.
    fn has_hidden(&self) -> bool;

    /// The joint state with canonical index 0.
    fn first_state(&self) -> StateOf<Self>;

    fn feature_vector(&self, x: &Self::Visible, z: &Self::Hidden) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features()];
        self.accumulate_features(x, z, 1.0, &mut out);
        out
    }
}

/// `(g_α(s_α))_α` for a validated state.
pub fn feature_vector<M: FeatureModel>(model: &M, s: &StateOf<M>) -> Result<Vec<f64>> {
    model.check_visible(&s.visible)?;
    model.check_hidden(&s.hidden)?;
    Ok(model.feature_vector(&s.visible, &s.hidden))
}

/// `Σ_α w_α g_α(s_α)`. The energy of `s` is the negated score.
pub fn score<M: FeatureModel>(model: &M, w: &[f64], s: &StateOf<M>) -> Result<f64> {
    check_len("weight vector", model.n_features(), w.len())?;
    model.check_visible(&s.visible)?;
    model.check_hidden(&s.hidden)?;
    Ok(model.score(w, &s.visible, &s.hidden))
}

/// Pixel binarization: `+1` iff `pixel / maxval - threshold > 0`, else `-1`.
pub fn binarize_grayscale(pixels: &[u32], maxval: u32, threshold: f64) -> Result<Vec<Spin>> {
    if maxval == 0 {
        return Err(HerdError::InvalidParameter(
            "grayscale maxval must be positive".into(),
        ));
    }
    let m = f64::from(maxval);
    Ok(pixels
        .iter()
        .map(|&p| if f64::from(p) / m - threshold > 0.0 { 1 } else { -1 })
        .collect())
}

/// Default binarization divisor and threshold for 8-bit digit images.
pub const DEFAULT_GRAY_MAXVAL: u32 = 256;
pub const DEFAULT_GRAY_THRESHOLD: f64 = 0.2;

/// Spin vector of a canonical index: bit `j` clear means spin `j` is `+1`.
pub fn spins_from_index(index: usize, bits: usize) -> Vec<Spin> {
    (0..bits)
        .map(|j| if (index >> j) & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// Inverse of [`spins_from_index`].
pub fn index_from_spins(spins: &[Spin]) -> usize {
    spins
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &s)| if s < 0 { acc | (1 << j) } else { acc })
}

/// Number of bits needed to address `n` states.
pub(crate) fn index_bits(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binarize_boundaries() {
        let out = binarize_grayscale(&[52, 51], 256, 0.2).unwrap();
        assert_eq!(out, vec![1, -1]);
        // 0.2 * 5 = 1 exactly in binary floating point terms: 1/5 - 0.2 == 0
        let out = binarize_grayscale(&[1], 5, 0.2).unwrap();
        assert_eq!(1.0_f64 / 5.0 - 0.2, 0.0);
        assert_eq!(out, vec![-1]);
        assert!(binarize_grayscale(&[1], 0, 0.2).is_err());
    }

    #[test]
    fn spin_index_round_trip() {
        assert_eq!(spins_from_index(0, 3), vec![1, 1, 1]);
        assert_eq!(spins_from_index(5, 3), vec![-1, 1, -1]);
        for i in 0..64 {
            assert_eq!(index_from_spins(&spins_from_index(i, 6)), i);
        }
        assert_eq!(index_bits(1), 0);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(7), 3);
        assert_eq!(index_bits(8), 3);
        assert_eq!(index_bits(9), 4);
    }

    #[test]
    fn dataset_validation() {
        assert!(matches!(Dataset::new(vec![]), Err(HerdError::EmptyDataset)));
        assert!(Dataset::new(vec![vec![1, -1], vec![1]]).is_err());
        assert!(Dataset::new(vec![vec![1, 0]]).is_err());
        let d = Dataset::new(vec![vec![1, -1], vec![-1, -1]]).unwrap();
        assert_eq!((d.len(), d.dim()), (2, 2));
    }

    #[test]
    fn weight_vector_rejects_nan() {
        assert!(WeightVector::new(vec![0.0, f64::NAN]).is_err());
        let w = WeightVector::new(vec![3.0, -4.0]).unwrap();
        assert_eq!(w.norm_l2(), 5.0);
        assert_eq!(w.norm_linf(), 4.0);
    }
}
