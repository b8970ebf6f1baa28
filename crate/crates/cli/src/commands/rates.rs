use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use herding::herding::learn_rates;
use herding::io::{export_rate_filters, write_weights};
use herding::model::StateOf;
use herding::{FeatureModel, Herder, RateVector, Variant};
use serde::{Deserialize, Serialize};

use super::run::frozen_features;
use super::{chain_config, create, initial_weights, run_chain, variant, ChainOutputs, SampleText};
use crate::config::{
    load_model, merge_with_file, parse_dims, parse_rate_source, parse_search, prepare_out_dir, write_effective_config,
    ChainArgs, Loaded,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RatesArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Average the driving term (`driving`) or the pseudo-sample features (`samples`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_source: Option<String>,
    /// Run a data-free chain from the learned rates for this many steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoupled_steps: Option<u64>,
    /// Joint search of the data-free chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoupled_search: Option<String>,
    /// Write one PGM image of pairwise rates per hidden unit.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub export_filters: Option<bool>,
    /// Filter image size `HxW`; required with --export-filters.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
}

pub fn execute(cli: RatesArgs) -> CliResult<()> {
    let mut args = merge_with_file(&cli, cli.config.as_deref())?;
    args.chain.resolve();
    args.rate_source.get_or_insert_with(|| "driving".into());
    args.export_filters.get_or_insert(false);
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("herd-out"));
    args.out = Some(out.clone());

    let steps = args.chain.steps()?;
    let record_every = args.chain.record_every()?;
    let source = parse_rate_source(args.rate_source.as_deref().unwrap_or("driving"))?;
    let decoupled_search = match &args.decoupled_search {
        Some(s) => Some(parse_search(s)?),
        None => None,
    };
    if args.decoupled_steps == Some(0) {
        return Err(CliError::config("decoupled_steps must be at least 1"));
    }
    let filter_dims = if args.export_filters == Some(true) {
        let dims = args
            .dims
            .as_deref()
            .ok_or_else(|| CliError::config("--export-filters needs --dims HxW"))?;
        Some(parse_dims(dims)?)
    } else {
        None
    };
    args.chain.check_files()?;
    let spec = args.chain.model_spec()?;
    prepare_out_dir(&out)?;
    write_effective_config(&out, &args)?;

    let loaded = load_model(&spec, args.chain.data.as_deref(), &args.chain.dataset_options())?;
    if filter_dims.is_some() && !matches!(loaded, Loaded::Rbm(..)) {
        return Err(CliError::config("rate filters need an RBM model"));
    }
    if let (Some((h, w)), Loaded::Rbm(m, _)) = (filter_dims, &loaded) {
        if h * w != m.n_visible() {
            return Err(CliError::config(format!(
                "dims {h}x{w} do not cover {} visible units",
                m.n_visible()
            )));
        }
    }
    let frozen = frozen_features(&args.chain, &loaded)?;
    let job = Job {
        args: &args.chain,
        frozen,
        steps,
        record_every,
        source,
        decoupled: args.decoupled_steps.map(|n| (n, decoupled_search)),
        dir: &out,
    };
    let rates = match &loaded {
        Loaded::Rbm(m, d) => job.go(m, d)?,
        Loaded::Table(m, d) => job.go(m, d)?,
    };
    if let (Some((h, w)), Loaded::Rbm(m, _)) = (filter_dims, &loaded) {
        let dir = out.join("filters");
        prepare_out_dir(&dir)?;
        export_rate_filters(&dir, m, rates.values(), h, w)?;
    }
    Ok(())
}

struct Job<'a> {
    args: &'a ChainArgs,
    frozen: Vec<usize>,
    steps: u64,
    record_every: u64,
    source: herding::herding::RateSource,
    decoupled: Option<(u64, Option<herding::JointSearch>)>,
    dir: &'a std::path::Path,
}

impl Job<'_> {
    fn go<M>(&self, model: &M, data: &[M::Visible]) -> CliResult<RateVector>
    where
        M: FeatureModel,
        StateOf<M>: SampleText,
    {
        let v = variant(self.args)?;
        if matches!(v, Variant::Decoupled { .. }) || data.is_empty() {
            return Err(CliError::config("rate learning needs a data-driven variant and --data"));
        }
        let herder = Herder::new(model, data, chain_config(self.args, v.clone(), self.frozen.clone())?)?;
        let w0 = initial_weights(self.args, model.n_features())?;
        let mut state = herder.init(Some(w0.clone()))?;
        let rates = learn_rates(&herder, &mut state, self.steps, self.source)?;
        let mut f = create(&self.dir.join("rates.txt"))?;
        write_weights(&mut f, rates.values())?;
        f.flush()?;

        if let Some((n, search)) = self.decoupled {
            let search = search.unwrap_or(v.search());
            let variant = Variant::Decoupled {
                rates: rates.clone(),
                search,
            };
            let needs_data = search == herding::JointSearch::LowestEnergyCase;
            let d: &[M::Visible] = if needs_data { data } else { &[] };
            let herder = Herder::new(model, d, chain_config(self.args, variant, self.frozen.clone())?)?;
            let state = herder.init(Some(w0))?;
            let out = ChainOutputs {
                dir: self.dir,
                prefix: "decoupled_",
            };
            run_chain(&herder, state, n, self.record_every, &out)?;
        }
        Ok(rates)
    }
}
