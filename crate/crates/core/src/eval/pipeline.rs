use std::fmt;
use std::str::FromStr;

use super::{knn1_manhattan, mlr_train, run_class_pipeline, MlrConfig, PipelineSchedule};
use crate::error::{HerdError, Result};
use crate::exec::{map_range, Execution};
use crate::herding::{ChainConfig, Variant};
use crate::maximize::AscentConfig;
use crate::model::{Dataset, RbmModel, Spin};

/// Train, validation and test cases of one class.
#[derive(Debug, Clone)]
pub struct ClassSplit {
    pub train: Dataset,
    pub valid: Dataset,
    pub test: Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    PixelMlr,
    Knn1,
    HerdingLocal,
    HerdingSafe,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::PixelMlr, Method::Knn1, Method::HerdingLocal, Method::HerdingSafe];

    pub fn name(self) -> &'static str {
        match self {
            Method::PixelMlr => "pixel-mlr",
            Method::Knn1 => "1nn",
            Method::HerdingLocal => "herding-h",
            Method::HerdingSafe => "herding-sh",
        }
    }

    fn variant(self) -> Option<Variant> {
        match self {
            Method::HerdingLocal => Some(Variant::Local),
            Method::HerdingSafe => Some(Variant::Safe),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HerdError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| HerdError::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub n_hidden: usize,
    pub schedule: PipelineSchedule,
    pub methods: Vec<Method>,
    pub mlr: MlrConfig,
    /// Leave hidden-bias weights at their initial values.
    pub freeze_hidden_bias: bool,
    pub ascent: AscentConfig,
    pub execution: Execution,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            n_hidden: 50,
            schedule: PipelineSchedule::default(),
            methods: Method::ALL.to_vec(),
            mlr: MlrConfig::default(),
            freeze_hidden_bias: true,
            ascent: AscentConfig::default(),
            execution: Execution::default(),
        }
    }
}

/// Per-case averaged standardized energies, one column per class chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFeatureTable {
    pub labels: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    /// Iterations averaged, per class column.
    pub iterations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerdingFeatures {
    pub method: Method,
    pub valid: EnergyFeatureTable,
    pub test: EnergyFeatureTable,
    pub max_train_z_mean: f64,
    pub max_train_z_var_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyReport {
    /// Test accuracy per configured method, in configuration order.
    pub accuracies: Vec<(Method, f64)>,
    pub herding: Vec<HerdingFeatures>,
}

pub fn accuracy(predicted: &[usize], labels: &[usize]) -> f64 {
    let hits = predicted.iter().zip(labels).filter(|(p, l)| p == l).count();
    hits as f64 / labels.len().max(1) as f64
}

fn to_f64(x: &[Spin]) -> Vec<f64> {
    x.iter().map(|&s| f64::from(s)).collect()
}

fn gather(classes: &[ClassSplit], pick: impl Fn(&ClassSplit) -> &Dataset) -> (Vec<Vec<Spin>>, Vec<usize>) {
    let mut cases = Vec::new();
    let mut labels = Vec::new();
    for (c, split) in classes.iter().enumerate() {
        for x in pick(split).cases() {
            cases.push(x.clone());
            labels.push(c);
        }
    }
    (cases, labels)
}

/// Runs every configured method on the class splits and reports test
/// accuracies. Pixel baselines train on the training sets; herding features
/// are fit on the validation set.
pub fn classify(classes: &[ClassSplit], cfg: &ClassifyConfig) -> Result<ClassifyReport> {
    if classes.len() < 2 {
        return Err(HerdError::DegenerateLabels(classes.len()));
    }
    let dim = classes[0].train.dim();
    for split in classes {
        for d in [&split.train, &split.valid, &split.test] {
            if d.dim() != dim {
                return Err(HerdError::DimensionMismatch {
                    what: "class dataset width",
                    expected: dim,
                    found: d.dim(),
                });
            }
        }
    }
    let (train, train_labels) = gather(classes, |s| &s.train);
    let (valid, valid_labels) = gather(classes, |s| &s.valid);
    let (test, test_labels) = gather(classes, |s| &s.test);

    let mut accuracies = Vec::new();
    let mut herding = Vec::new();
    for &method in &cfg.methods {
        let acc = match method {
            Method::PixelMlr => {
                let xs: Vec<Vec<f64>> = train.iter().map(|x| to_f64(x)).collect();
                let model = mlr_train(&xs, &train_labels, &cfg.mlr)?;
                let pred: Vec<usize> = test.iter().map(|x| model.predict(&to_f64(x))).collect();
                accuracy(&pred, &test_labels)
            }
            Method::Knn1 => {
                let pred = test
                    .iter()
                    .map(|q| knn1_manhattan(&train, &train_labels, q))
                    .collect::<Result<Vec<_>>>()?;
                accuracy(&pred, &test_labels)
            }
            Method::HerdingLocal | Method::HerdingSafe => {
                let feats = herding_features(classes, method, &valid, &valid_labels, &test, &test_labels, cfg)?;
                let model = mlr_train(&feats.valid.rows, &valid_labels, &cfg.mlr)?;
                let pred: Vec<usize> = feats.test.rows.iter().map(|x| model.predict(x)).collect();
                herding.push(feats);
                accuracy(&pred, &test_labels)
            }
        };
        accuracies.push((method, acc));
    }
    Ok(ClassifyReport { accuracies, herding })
}

fn herding_features(
    classes: &[ClassSplit],
    method: Method,
    valid: &[Vec<Spin>],
    valid_labels: &[usize],
    test: &[Vec<Spin>],
    test_labels: &[usize],
    cfg: &ClassifyConfig,
) -> Result<HerdingFeatures> {
    let dim = classes[0].train.dim();
    let model = RbmModel::new(dim, cfg.n_hidden)?;
    let variant = method.variant().expect("herding method");
    let mut chain = ChainConfig::new(variant)
        .with_ascent(cfg.ascent)
        .with_execution(cfg.execution);
    if cfg.freeze_hidden_bias {
        chain = chain.with_frozen(model.hidden_bias_range());
    }
    let eval: Vec<Vec<Spin>> = valid.iter().chain(test).cloned().collect();
    let columns = map_range(cfg.execution, classes.len(), |c| {
        run_class_pipeline(&model, classes[c].train.cases(), &eval, chain.clone(), cfg.schedule)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let table = |range: std::ops::Range<usize>, labels: &[usize]| EnergyFeatureTable {
        labels: labels.to_vec(),
        rows: range
            .map(|i| columns.iter().map(|col| col.eval_means[i]).collect())
            .collect(),
        iterations: columns.iter().map(|col| col.iterations).collect(),
    };
    Ok(HerdingFeatures {
        method,
        valid: table(0..valid.len(), valid_labels),
        test: table(valid.len()..eval.len(), test_labels),
        max_train_z_mean: columns.iter().map(|c| c.max_train_z_mean).fold(0.0, f64::max),
        max_train_z_var_dev: columns.iter().map(|c| c.max_train_z_var_dev).fold(0.0, f64::max),
    })
}
