use crate::error::{check_len, HerdError, Result};

/// Full-batch gradient descent settings for softmax regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlrConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    /// L2 penalty `reg/2 ‖W‖²` on the non-bias weights.
    pub reg: f64,
    /// Z-score each input column with training statistics before fitting.
    pub standardize: bool,
}

impl Default for MlrConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
            reg: 1e-4,
            standardize: true,
        }
    }
}

/// Multinomial logistic regression, weights `C × (F + 1)` with the bias in
/// the last column.
#[derive(Debug, Clone, PartialEq)]
pub struct MlrModel {
    n_classes: usize,
    n_inputs: usize,
    weights: Vec<f64>,
    shift: Vec<f64>,
    scale: Vec<f64>,
}

impl MlrModel {
    fn zeros(n_classes: usize, n_inputs: usize) -> Self {
        Self {
            n_classes,
            n_inputs,
            weights: vec![0.0; n_classes * (n_inputs + 1)],
            shift: vec![0.0; n_inputs],
            scale: vec![1.0; n_inputs],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Row-major `C × (F + 1)` weights acting on standardized inputs.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn prepare(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.shift.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    fn logits(&self, xs: &[f64], out: &mut [f64]) {
        let stride = self.n_inputs + 1;
        for (c, o) in out.iter_mut().enumerate() {
            let row = &self.weights[c * stride..(c + 1) * stride];
            let mut acc = row[self.n_inputs];
            for (w, v) in row.iter().zip(xs) {
                acc += w * v;
            }
            *o = acc;
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let xs = self.prepare(x);
        let mut p = vec![0.0; self.n_classes];
        self.logits(&xs, &mut p);
        softmax_in_place(&mut p);
        p
    }

    /// Most probable class, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let p = self.predict_proba(x);
        let mut best = 0;
        for c in 1..p.len() {
            if p[c] > p[best] {
                best = c;
            }
        }
        best
    }

    /// Regularized mean cross-entropy and its gradient w.r.t. the weights,
    /// on inputs that are already standardized.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], labels: &[usize], reg: f64) -> (f64, Vec<f64>) {
        let stride = self.n_inputs + 1;
        let mut grad = vec![0.0; self.weights.len()];
        let mut loss = 0.0;
        let mut p = vec![0.0; self.n_classes];
        for (x, &y) in xs.iter().zip(labels) {
            self.logits(x, &mut p);
            let max = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + p.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
            loss += lse - p[y];
            for (c, pc) in p.iter_mut().enumerate() {
                let resid = (*pc - lse).exp() - if c == y { 1.0 } else { 0.0 };
                let g = &mut grad[c * stride..(c + 1) * stride];
                for (gi, v) in g.iter_mut().zip(x) {
                    *gi += resid * v;
                }
                g[self.n_inputs] += resid;
            }
        }
        let n = xs.len() as f64;
        loss /= n;
        for g in &mut grad {
            *g /= n;
        }
        for c in 0..self.n_classes {
            for f in 0..self.n_inputs {
                let w = self.weights[c * stride + f];
                loss += 0.5 * reg * w * w;
                grad[c * stride + f] += reg * w;
            }
        }
        (loss, grad)
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

/// Fits softmax regression from zero weights. The class count is
/// `max(label) + 1`; at least two distinct labels are required.
pub fn mlr_train(features: &[Vec<f64>], labels: &[usize], cfg: &MlrConfig) -> Result<MlrModel> {
    check_len("labels", features.len(), labels.len())?;
    let first = features.first().ok_or(HerdError::EmptyDataset)?;
    let f = first.len();
    for x in features {
        check_len("feature row", f, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(HerdError::InvalidParameter("non-finite MLR feature".into()));
        }
    }
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(HerdError::DegenerateLabels(distinct.len()));
    }
    let n_classes = distinct[distinct.len() - 1] + 1;
    let mut model = MlrModel::zeros(n_classes, f);
    if cfg.standardize {
        let n = features.len() as f64;
        for j in 0..f {
            let mean = features.iter().map(|x| x[j]).sum::<f64>() / n;
            let var = features.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>() / n;
            model.shift[j] = mean;
            model.scale[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
    }
    let xs: Vec<Vec<f64>> = features.iter().map(|x| model.prepare(x)).collect();
    for _ in 0..cfg.iterations {
        let (_, grad) = model.loss_and_gradient(&xs, labels, cfg.reg);
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separable_one_dimensional() {
        let xs: Vec<Vec<f64>> = [-3.0, -2.0, -1.5, -0.5, 0.5, 1.0, 2.0, 4.0].iter().map(|&v| vec![v]).collect();
        let ys = [0, 0, 0, 0, 1, 1, 1, 1];
        let m = mlr_train(&xs, &ys, &MlrConfig::default()).unwrap();
        let correct = xs.iter().zip(&ys).filter(|(x, &y)| m.predict(x) == y).count();
        assert_eq!(correct, xs.len());
    }

    #[test]
    fn zero_iterations_are_uniform() {
        let xs = vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.0, 0.0]];
        let cfg = MlrConfig {
            iterations: 0,
            ..MlrConfig::default()
        };
        let m = mlr_train(&xs, &[0, 1, 2], &cfg).unwrap();
        for p in m.predict_proba(&[3.0, -1.0]) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn label_permutation_permutes_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<Vec<f64>> = (0..30).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let perm = [2, 0, 1];
        let ys_p: Vec<usize> = ys.iter().map(|&y| perm[y]).collect();
        let cfg = MlrConfig {
            iterations: 50,
            ..MlrConfig::default()
        };
        let a = mlr_train(&xs, &ys, &cfg).unwrap();
        let b = mlr_train(&xs, &ys_p, &cfg).unwrap();
        for x in &xs {
            let pa = a.predict_proba(x);
            let pb = b.predict_proba(x);
            for c in 0..3 {
                assert!((pa[c] - pb[perm[c]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let xs: Vec<Vec<f64>> = (0..12).map(|_| (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let ys: Vec<usize> = (0..12).map(|_| rng.gen_range(0..3)).collect();
            let mut m = MlrModel::zeros(3, 4);
            for w in &mut m.weights {
                *w = rng.gen_range(-1.0..1.0);
            }
            let reg = 0.05;
            let (_, grad) = m.loss_and_gradient(&xs, &ys, reg);
            let h = 1e-5;
            for k in 0..m.weights.len() {
                let mut plus = m.clone();
                plus.weights[k] += h;
                let mut minus = m.clone();
                minus.weights[k] -= h;
                let fd = (plus.loss_and_gradient(&xs, &ys, reg).0 - minus.loss_and_gradient(&xs, &ys, reg).0) / (2.0 * h);
                let rel = (fd - grad[k]).abs() / grad[k].abs().max(1e-3);
                assert!(rel <= 1e-6, "k={k} fd={fd} analytic={}", grad[k]);
            }
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert!(matches!(mlr_train(&xs, &[1, 1], &MlrConfig::default()), Err(HerdError::DegenerateLabels(1))));
    }
}
