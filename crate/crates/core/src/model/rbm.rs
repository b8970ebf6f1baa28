use super::{index_from_spins, spins_from_index, EnumeratedModel, FeatureModel, JointState, Spin, StateOf};
use crate::error::{check_len, HerdError, Result};
use crate::maximize::AscentConfig;

/// Restricted Boltzmann machine feature family over `{-1,+1}^D × {-1,+1}^K`.
///
/// Feature layout: `[x_0..x_{D-1} | z_0..z_{K-1} | z_i x_j]`, with the
/// pairwise block stored hidden-major so that unit `i` owns the contiguous
/// slice `D + K + i*D .. D + K + (i+1)*D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RbmModel {
    n_visible: usize,
    n_hidden: usize,
}

impl RbmModel {
    pub fn new(n_visible: usize, n_hidden: usize) -> Result<Self> {
        if n_visible == 0 {
            return Err(HerdError::InvalidParameter(
                "an RBM needs at least one visible unit".into(),
            ));
        }
        Ok(Self { n_visible, n_hidden })
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn visible_bias_range(&self) -> std::ops::Range<usize> {
        0..self.n_visible
    }

    pub fn hidden_bias_range(&self) -> std::ops::Range<usize> {
        self.n_visible..self.n_visible + self.n_hidden
    }

    /// Feature indices of the pairwise terms `z_i x_j`, `j = 0..D`.
    pub fn pairwise_row_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.n_visible + self.n_hidden + i * self.n_visible;
        start..start + self.n_visible
    }

    pub fn pairwise_index(&self, i: usize, j: usize) -> usize {
        self.n_visible + self.n_hidden + i * self.n_visible + j
    }

    /// `b_i + Σ_j W_ij x_j`.
    fn hidden_field(&self, w: &[f64], x: &[Spin], i: usize) -> f64 {
        let row = &w[self.pairwise_row_range(i)];
        let mut acc = w[self.n_visible + i];
        for (wij, &xj) in row.iter().zip(x) {
            acc += wij * f64::from(xj);
        }
        acc
    }

    /// `a_j + Σ_i W_ij z_i`.
    fn visible_field(&self, w: &[f64], z: &[Spin], j: usize) -> f64 {
        let mut acc = w[j];
        for (i, &zi) in z.iter().enumerate() {
            acc += w[self.pairwise_index(i, j)] * f64::from(zi);
        }
        acc
    }

    fn argmax_visible(&self, w: &[f64], z: &[Spin]) -> Vec<Spin> {
        (0..self.n_visible)
            .map(|j| if self.visible_field(w, z, j) >= 0.0 { 1 } else { -1 })
            .collect()
    }

    /// Expands the model into its full feature table. Requires `D + K <= 20`.
    pub fn to_enumerated(&self) -> Result<EnumeratedModel> {
        let bits = self.n_visible + self.n_hidden;
        if bits > 20 {
            return Err(HerdError::CapExceeded {
                states: 1u128 << bits,
                cap: 1 << 20,
            });
        }
        let v_count = 1usize << self.n_visible;
        let h_count = 1usize << self.n_hidden;
        EnumeratedModel::from_fn(v_count, h_count, self.n_features(), |v, h, row| {
            let x = spins_from_index(v, self.n_visible);
            let z = spins_from_index(h, self.n_hidden);
            self.accumulate_features(&x, &z, 1.0, row);
        })
    }
}

impl FeatureModel for RbmModel {
    type Visible = Vec<Spin>;
    type Hidden = Vec<Spin>;

    fn n_features(&self) -> usize {
        self.n_visible + self.n_hidden + self.n_visible * self.n_hidden
    }

    fn check_visible(&self, x: &Vec<Spin>) -> Result<()> {
        check_len("visible configuration", self.n_visible, x.len())
    }

    fn check_hidden(&self, z: &Vec<Spin>) -> Result<()> {
        check_len("hidden configuration", self.n_hidden, z.len())
    }

    fn accumulate_features(&self, x: &Vec<Spin>, z: &Vec<Spin>, scale: f64, out: &mut [f64]) {
        let d = self.n_visible;
        for (o, &xj) in out[..d].iter_mut().zip(x) {
            *o += scale * f64::from(xj);
        }
        for (o, &zi) in out[d..d + self.n_hidden].iter_mut().zip(z) {
            *o += scale * f64::from(zi);
        }
        for (i, &zi) in z.iter().enumerate() {
            let row = &mut out[self.pairwise_row_range(i)];
            for (o, &xj) in row.iter_mut().zip(x) {
                *o += scale * f64::from(zi * xj);
            }
        }
    }

    fn score(&self, w: &[f64], x: &Vec<Spin>, z: &Vec<Spin>) -> f64 {
        let d = self.n_visible;
        let mut acc = 0.0;
        for (wj, &xj) in w[..d].iter().zip(x) {
            acc += wj * f64::from(xj);
        }
        for (wi, &zi) in w[d..d + self.n_hidden].iter().zip(z) {
            acc += wi * f64::from(zi);
        }
        for (i, &zi) in z.iter().enumerate() {
            for (wij, &xj) in w[self.pairwise_row_range(i)].iter().zip(x) {
                acc += wij * f64::from(zi * xj);
            }
        }
        acc
    }

    /// Hidden units are conditionally independent given `x`, so the per-unit
    /// sign of the pre-activation is the exact maximizer; zero maps to `+1`.
    fn argmax_hidden(&self, w: &[f64], x: &Vec<Spin>) -> Vec<Spin> {
        (0..self.n_hidden)
            .map(|i| if self.hidden_field(w, x, i) >= 0.0 { 1 } else { -1 })
            .collect()
    }

    fn exhaustive_search_size(&self) -> u128 {
        let side = self.n_visible.min(self.n_hidden);
        if side >= 127 {
            u128::MAX
        } else {
            1u128 << side
        }
    }

    /// Enumerates the smaller layer and maximizes the other in closed form.
    /// Ties resolve to the lowest visible-major joint index.
    fn argmax_joint_unchecked(&self, w: &[f64]) -> StateOf<Self> {
        let mut best: Option<(f64, usize, usize, StateOf<Self>)> = None;
        let mut consider = |x: Vec<Spin>, z: Vec<Spin>| {
            let s = self.score(w, &x, &z);
            let (vi, hi) = (index_from_spins(&x), index_from_spins(&z));
            let better = match &best {
                None => true,
                Some((bs, bv, bh, _)) => s > *bs || (s == *bs && (vi, hi) < (*bv, *bh)),
            };
            if better {
                best = Some((s, vi, hi, JointState::new(x, z)));
            }
        };
        if self.n_hidden <= self.n_visible {
            for h in 0..1usize << self.n_hidden {
                let z = spins_from_index(h, self.n_hidden);
                let x = self.argmax_visible(w, &z);
                consider(x, z);
            }
        } else {
            for v in 0..1usize << self.n_visible {
                let x = spins_from_index(v, self.n_visible);
                let z = self.argmax_hidden(w, &x);
                consider(x, z);
            }
        }
        best.expect("at least one configuration").3
    }

    fn ascend_joint(&self, w: &[f64], start: StateOf<Self>, cfg: &AscentConfig) -> StateOf<Self> {
        let JointState {
            visible: mut x,
            hidden: mut z,
        } = start;
        for _ in 0..cfg.max_sweeps {
            let mut changed = false;
            for j in 0..self.n_visible {
                if f64::from(x[j]) * self.visible_field(w, &z, j) < 0.0 {
                    x[j] = -x[j];
                    changed = true;
                }
            }
            for i in 0..self.n_hidden {
                if f64::from(z[i]) * self.hidden_field(w, &x, i) < 0.0 {
                    z[i] = -z[i];
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        JointState::new(x, z)
    }

    fn feature_ranges(&self) -> Vec<(f64, f64)> {
        vec![(-1.0, 1.0); self.n_features()]
    }

    fn has_hidden(&self) -> bool {
        self.n_hidden > 0
    }

    fn first_state(&self) -> StateOf<Self> {
        JointState::new(vec![1; self.n_visible], vec![1; self.n_hidden])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{feature_vector, score};

    #[test]
    fn feature_layout_small() {
        let m = RbmModel::new(1, 1).unwrap();
        let s = JointState::new(vec![1], vec![1]);
        assert_eq!(feature_vector(&m, &s).unwrap(), vec![1.0, 1.0, 1.0]);

        let m = RbmModel::new(2, 1).unwrap();
        let s = JointState::new(vec![1, -1], vec![1]);
        assert_eq!(
            feature_vector(&m, &s).unwrap(),
            vec![1.0, -1.0, 1.0, 1.0, -1.0]
        );
    }

    #[test]
    fn score_examples() {
        let m = RbmModel::new(1, 1).unwrap();
        let s = JointState::new(vec![1], vec![1]);
        assert_eq!(score(&m, &[0.0, 0.0, 0.5], &s).unwrap(), 0.5);
        assert_eq!(score(&m, &[0.0; 3], &s).unwrap(), 0.0);
        assert!(score(&m, &[0.0; 2], &s).is_err());
        let bad = JointState::new(vec![1, 1], vec![1]);
        assert!(feature_vector(&m, &bad).is_err());
    }

    #[test]
    fn argmax_hidden_closed_form_example() {
        // D=2, K=2, biases zero, W = ((1,-2),(0.5,0.5)).
        let m = RbmModel::new(2, 2).unwrap();
        let mut w = vec![0.0; m.n_features()];
        w[m.pairwise_index(0, 0)] = 1.0;
        w[m.pairwise_index(0, 1)] = -2.0;
        w[m.pairwise_index(1, 0)] = 0.5;
        w[m.pairwise_index(1, 1)] = 0.5;
        assert_eq!(m.argmax_hidden(&w, &vec![1, -1]), vec![1, 1]);
        assert_eq!(m.argmax_hidden(&[0.0; 8], &vec![-1, -1]), vec![1, 1]);
    }

    #[test]
    fn ascent_hand_trace() {
        let m = RbmModel::new(1, 1).unwrap();
        let w = [0.0, 0.0, 1.0];
        let out = m.ascend_joint(&w, JointState::new(vec![1], vec![-1]), &AscentConfig::default());
        assert_eq!(out, JointState::new(vec![-1], vec![-1]));
        assert_eq!(m.score(&w, &out.visible, &out.hidden), 1.0);
    }

    #[test]
    fn layout_ranges() {
        let m = RbmModel::new(3, 2).unwrap();
        assert_eq!(m.n_features(), 3 + 2 + 6);
        assert_eq!(m.hidden_bias_range(), 3..5);
        assert_eq!(m.pairwise_row_range(1), 8..11);
        assert_eq!(m.pairwise_index(1, 2), 10);
        assert_eq!(m.exhaustive_search_size(), 4);
    }
}
