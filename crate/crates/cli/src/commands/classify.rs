use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use herding::eval::{classify, ClassSplit, ClassifyConfig, Method, MlrConfig, PipelineSchedule};
use herding::io::{read_dataset_file, write_feature_table_csv};
use herding::maximize::AscentConfig;
use serde::{Deserialize, Serialize};

use super::create;
use crate::config::{dataset_options, load, merge_with_file, prepare_out_dir, write_effective_config, ClassFiles};
use crate::error::{CliError, CliResult};

/// Largest tolerated deviation of the training Z-scores from mean 0 and
/// variance 1.
const Z_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_one: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gray_threshold: Option<f64>,
    /// Hidden units per class model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    /// Herding iterations per class chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<u64>,
    /// Number of final iterations averaged into the features.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    /// Comma-separated subset of pixel-mlr, 1nn, herding-h, herding-sh.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freeze_hidden_bias: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlr_iters: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reg: Option<f64>,
    /// `TRAIN,VALID,TEST` dataset files of one class; repeat per class.
    #[arg(long = "class")]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassFiles>,
}

fn parse_methods(s: &str) -> CliResult<Vec<Method>> {
    let methods = s
        .split(',')
        .map(|m| m.trim().parse::<Method>().map_err(CliError::from))
        .collect::<CliResult<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(CliError::config("no methods configured"));
    }
    Ok(methods)
}

pub fn execute(cli: ClassifyArgs) -> CliResult<()> {
    let mut args = merge_with_file(&cli, cli.config.as_deref())?;
    let defaults = ClassifyConfig::default();
    let iters = *args.iters.get_or_insert(defaults.schedule.total_iters);
    let window = *args.window.get_or_insert(defaults.schedule.window_len());
    let methods = parse_methods(args.methods.get_or_insert_with(|| {
        Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")
    }))?;
    let mlr = MlrConfig {
        learning_rate: *args.learning_rate.get_or_insert(defaults.mlr.learning_rate),
        iterations: *args.mlr_iters.get_or_insert(defaults.mlr.iterations),
        reg: *args.reg.get_or_insert(defaults.mlr.reg),
        ..defaults.mlr
    };
    let cfg = ClassifyConfig {
        n_hidden: *args.hidden.get_or_insert(defaults.n_hidden),
        schedule: PipelineSchedule::new(iters, window)?,
        methods,
        mlr,
        freeze_hidden_bias: *args.freeze_hidden_bias.get_or_insert(defaults.freeze_hidden_bias),
        ascent: AscentConfig::new(*args.max_sweeps.get_or_insert(defaults.ascent.max_sweeps))?,
        execution: defaults.execution,
    };
    let opts = dataset_options(Some(*args.zero_one.get_or_insert(false)), args.gray_threshold);
    args.gray_threshold = Some(opts.gray_threshold);
    let out = args.out.get_or_insert_with(|| PathBuf::from("herd-out")).clone();
    if args.classes.len() < 2 {
        return Err(CliError::config(format!(
            "classification needs at least two classes, got {}",
            args.classes.len()
        )));
    }

    let mut splits = Vec::with_capacity(args.classes.len());
    for c in &args.classes {
        let read = |p: &PathBuf| load(p, |p| read_dataset_file(p, &opts));
        splits.push(ClassSplit {
            train: read(&c.train)?,
            valid: read(&c.valid)?,
            test: read(&c.test)?,
        });
    }
    prepare_out_dir(&out)?;
    write_effective_config(&out, &args)?;

    let report = classify(&splits, &cfg)?;
    for h in &report.herding {
        if !(h.max_train_z_mean <= Z_TOLERANCE && h.max_train_z_var_dev <= Z_TOLERANCE) {
            return Err(CliError::Invariant(format!(
                "{}: training Z-scores drift from mean 0 / variance 1 (|mean| {:e}, |var-1| {:e})",
                h.method, h.max_train_z_mean, h.max_train_z_var_dev
            )));
        }
        for (split, table) in [("valid", &h.valid), ("test", &h.test)] {
            let mut f = create(&out.join(format!("features_{}_{split}.csv", h.method)))?;
            write_feature_table_csv(&mut f, table)?;
            f.flush()?;
        }
    }
    let mut f = create(&out.join("report.txt"))?;
    for (m, acc) in &report.accuracies {
        writeln!(f, "{m} {acc}")?;
    }
    f.flush()?;
    Ok(())
}
