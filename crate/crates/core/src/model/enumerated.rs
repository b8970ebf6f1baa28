use super::{index_bits, FeatureModel, JointState, StateOf};
use crate::error::{HerdError, Result};
use crate::maximize::AscentConfig;

/// A model given by its full feature table.
///
/// Row `j = v * H + h` holds `g(v, h)`. Visible and hidden configurations
/// are identified with their indices; single-coordinate moves flip one bit
/// of either index (moves leaving the index range are skipped), which for
/// tables built by [`super::RbmModel::to_enumerated`] is exactly a spin flip.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedModel {
    n_visible_states: usize,
    n_hidden_states: usize,
    n_features: usize,
    table: Vec<f64>,
}

impl EnumeratedModel {
    /// `table` is row-major with `V * H` rows of `F` finite values.
    pub fn new(
        n_visible_states: usize,
        n_hidden_states: usize,
        n_features: usize,
        table: Vec<f64>,
    ) -> Result<Self> {
        if n_visible_states == 0 || n_hidden_states == 0 || n_features == 0 {
            return Err(HerdError::InvalidParameter(
                "enumerated model needs at least one visible state, hidden state and feature".into(),
            ));
        }
        let rows = n_visible_states
            .checked_mul(n_hidden_states)
            .ok_or_else(|| HerdError::InvalidParameter("state space overflows".into()))?;
        if table.len() != rows * n_features {
            return Err(HerdError::DimensionMismatch {
                what: "feature table",
                expected: rows * n_features,
                found: table.len(),
            });
        }
        if let Some(i) = table.iter().position(|v| !v.is_finite()) {
            return Err(HerdError::InvalidParameter(format!(
                "feature table entry {i} is not finite"
            )));
        }
        Ok(Self {
            n_visible_states,
            n_hidden_states,
            n_features,
            table,
        })
    }

    /// Fills each row through `fill(v, h, row)`, rows starting at zero.
    pub fn from_fn<F>(n_visible_states: usize, n_hidden_states: usize, n_features: usize, mut fill: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &mut [f64]),
    {
        let mut table = vec![0.0; n_visible_states * n_hidden_states * n_features];
        if n_features > 0 {
            for (j, row) in table.chunks_mut(n_features).enumerate() {
                fill(j / n_hidden_states, j % n_hidden_states, row);
            }
        }
        Self::new(n_visible_states, n_hidden_states, n_features, table)
    }

    /// A model without hidden variables, one feature row per visible state.
    pub fn fully_observed(rows: &[Vec<f64>]) -> Result<Self> {
        let f = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != f) {
            return Err(HerdError::InvalidParameter("ragged feature rows".into()));
        }
        Self::new(rows.len(), 1, f, rows.concat())
    }

    pub fn n_visible_states(&self) -> usize {
        self.n_visible_states
    }

    pub fn n_hidden_states(&self) -> usize {
        self.n_hidden_states
    }

    pub fn n_joint_states(&self) -> usize {
        self.n_visible_states * self.n_hidden_states
    }

    pub fn joint_index(&self, v: usize, h: usize) -> usize {
        v * self.n_hidden_states + h
    }

    pub fn row(&self, v: usize, h: usize) -> &[f64] {
        let j = self.joint_index(v, h);
        &self.table[j * self.n_features..(j + 1) * self.n_features]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn row_score(&self, w: &[f64], j: usize) -> f64 {
        let row = &self.table[j * self.n_features..(j + 1) * self.n_features];
        let mut acc = 0.0;
        for (wa, ga) in w.iter().zip(row) {
            acc += wa * ga;
        }
        acc
    }
}

impl FeatureModel for EnumeratedModel {
    type Visible = usize;
    type Hidden = usize;

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn check_visible(&self, x: &usize) -> Result<()> {
        if *x < self.n_visible_states {
            Ok(())
        } else {
            Err(HerdError::DimensionMismatch {
                what: "visible state index",
                expected: self.n_visible_states,
                found: *x,
            })
        }
    }

    fn check_hidden(&self, z: &usize) -> Result<()> {
        if *z < self.n_hidden_states {
            Ok(())
        } else {
            Err(HerdError::DimensionMismatch {
                what: "hidden state index",
                expected: self.n_hidden_states,
                found: *z,
            })
        }
    }

    fn accumulate_features(&self, x: &usize, z: &usize, scale: f64, out: &mut [f64]) {
        for (o, g) in out.iter_mut().zip(self.row(*x, *z)) {
            *o += scale * g;
        }
    }

    fn score(&self, w: &[f64], x: &usize, z: &usize) -> f64 {
        self.row_score(w, self.joint_index(*x, *z))
    }

    fn argmax_hidden(&self, w: &[f64], x: &usize) -> usize {
        let base = self.joint_index(*x, 0);
        let mut best = (0, self.row_score(w, base));
        for h in 1..self.n_hidden_states {
            let s = self.row_score(w, base + h);
            if s > best.1 {
                best = (h, s);
            }
        }
        best.0
    }

    fn exhaustive_search_size(&self) -> u128 {
        self.n_joint_states() as u128
    }

    fn argmax_joint_unchecked(&self, w: &[f64]) -> StateOf<Self> {
        let mut best = (0, self.row_score(w, 0));
        for j in 1..self.n_joint_states() {
            let s = self.row_score(w, j);
            if s > best.1 {
                best = (j, s);
            }
        }
        JointState::new(best.0 / self.n_hidden_states, best.0 % self.n_hidden_states)
    }

    fn ascend_joint(&self, w: &[f64], start: StateOf<Self>, cfg: &AscentConfig) -> StateOf<Self> {
        let (mut v, mut h) = (start.visible, start.hidden);
        let mut current = self.score(w, &v, &h);
        let vbits = index_bits(self.n_visible_states);
        let hbits = index_bits(self.n_hidden_states);
        for _ in 0..cfg.max_sweeps {
            let mut changed = false;
            for b in 0..vbits {
                let cand = v ^ (1 << b);
                if cand < self.n_visible_states {
                    let s = self.score(w, &cand, &h);
                    if s > current {
                        v = cand;
                        current = s;
                        changed = true;
                    }
                }
            }
            for b in 0..hbits {
                let cand = h ^ (1 << b);
                if cand < self.n_hidden_states {
                    let s = self.score(w, &v, &cand);
                    if s > current {
                        h = cand;
                        current = s;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        JointState::new(v, h)
    }

    fn feature_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.n_features];
        for row in self.table.chunks(self.n_features) {
            for ((lo, hi), &g) in ranges.iter_mut().zip(row) {
                *lo = lo.min(g);
                *hi = hi.max(g);
            }
        }
        ranges
    }

    fn has_hidden(&self) -> bool {
        self.n_hidden_states > 1
    }

    fn first_state(&self) -> StateOf<Self> {
        JointState::new(0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{feature_vector, score};

    #[test]
    fn table_lookup() {
        let m = EnumeratedModel::fully_observed(&[vec![0.3, -0.2], vec![1.0, 2.0]]).unwrap();
        let s = JointState::new(0, 0);
        assert_eq!(feature_vector(&m, &s).unwrap(), vec![0.3, -0.2]);
        assert_eq!(score(&m, &[0.5, -1.0], &JointState::new(1, 0)).unwrap(), 0.5 - 2.0);
        assert!(feature_vector(&m, &JointState::new(2, 0)).is_err());
    }

    #[test]
    fn constructor_errors() {
        assert!(EnumeratedModel::new(2, 1, 1, vec![1.0]).is_err());
        assert!(EnumeratedModel::new(2, 1, 1, vec![1.0, f64::INFINITY]).is_err());
        assert!(EnumeratedModel::new(0, 1, 1, vec![]).is_err());
    }

    #[test]
    fn hidden_tie_takes_lowest_index() {
        // hidden 1 and 2 score equally and best
        let m = EnumeratedModel::new(1, 3, 1, vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.argmax_hidden(&[2.0], &0), 1);
    }

    #[test]
    fn joint_argmax_one_spin() {
        let m = EnumeratedModel::fully_observed(&[vec![1.0], vec![-1.0]]).unwrap();
        assert_eq!(m.argmax_joint_unchecked(&[0.3]).visible, 0);
        assert_eq!(m.argmax_joint_unchecked(&[-0.7]).visible, 1);
        assert_eq!(m.argmax_joint_unchecked(&[0.0]), JointState::new(0, 0));
    }

    #[test]
    fn feature_ranges_scan_columns() {
        let m = EnumeratedModel::fully_observed(&[vec![0.0, 1.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(m.feature_ranges(), vec![(0.0, 3.0), (1.0, 1.0)]);
    }
}
