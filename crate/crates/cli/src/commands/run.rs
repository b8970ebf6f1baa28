use std::path::PathBuf;

use clap::Args;
use herding::model::StateOf;
use herding::{FeatureModel, Herder};
use serde::{Deserialize, Serialize};

use super::{chain_config, initial_weights, run_chain, variant, ChainOutputs, SampleText};
use crate::config::{load_model, merge_with_file, prepare_out_dir, write_effective_config, ChainArgs, Loaded};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RunArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
}

/// Frozen feature indices requested by the hidden-bias flag.
pub fn frozen_features(args: &ChainArgs, loaded: &Loaded) -> CliResult<Vec<usize>> {
    if !args.freeze_hidden_bias.unwrap_or(false) {
        return Ok(Vec::new());
    }
    match loaded {
        Loaded::Rbm(m, _) => Ok(m.hidden_bias_range().collect()),
        Loaded::Table(..) => Err(CliError::config("freeze_hidden_bias needs an RBM model")),
    }
}

pub fn execute(cli: RunArgs) -> CliResult<()> {
    let args = merge_with_file(&cli, cli.config.as_deref())?;
    execute_merged(args)
}

/// Runs with flags and config file already merged.
pub fn execute_merged(mut args: RunArgs) -> CliResult<()> {
    args.chain.resolve();
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("herd-out"));
    args.out = Some(out.clone());
    let steps = args.chain.steps()?;
    let record_every = args.chain.record_every()?;
    args.chain.check_files()?;
    let spec = args.chain.model_spec()?;
    prepare_out_dir(&out)?;
    write_effective_config(&out, &args)?;

    let loaded = load_model(&spec, args.chain.data.as_deref(), &args.chain.dataset_options())?;
    let frozen = frozen_features(&args.chain, &loaded)?;
    let outputs = ChainOutputs { dir: &out, prefix: "" };
    match &loaded {
        Loaded::Rbm(m, d) => go(m, d, &args.chain, frozen, steps, record_every, &outputs),
        Loaded::Table(m, d) => go(m, d, &args.chain, frozen, steps, record_every, &outputs),
    }
}

fn go<M>(
    model: &M,
    data: &[M::Visible],
    args: &ChainArgs,
    frozen: Vec<usize>,
    steps: u64,
    record_every: u64,
    out: &ChainOutputs<'_>,
) -> CliResult<()>
where
    M: FeatureModel,
    StateOf<M>: SampleText,
{
    let v = variant(args)?;
    if data.is_empty() && !matches!(v, herding::Variant::Decoupled { .. }) {
        return Err(CliError::config(format!("the {} variant needs --data", v.name())));
    }
    let herder = Herder::new(model, data, chain_config(args, v, frozen)?)?;
    let state = herder.init(Some(initial_weights(args, model.n_features())?))?;
    run_chain(&herder, state, steps, record_every, out)?;
    Ok(())
}
