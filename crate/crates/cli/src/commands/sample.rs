use clap::Args;
use serde::{Deserialize, Serialize};

use super::run::{self, RunArgs};
use crate::config::merge_with_file;
use crate::error::{CliError, CliResult};

/// Re-emits pseudo-samples from a weight snapshot driven by a rate file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

pub fn execute(cli: SampleArgs) -> CliResult<()> {
    let mut args = merge_with_file(&cli, cli.run.config.as_deref())?.run;
    let chain = &mut args.chain;
    match chain.variant.as_deref() {
        None | Some("decoupled") => chain.variant = Some("decoupled".into()),
        Some(other) => {
            return Err(CliError::config(format!(
                "sample always runs a decoupled chain, not `{other}`"
            )))
        }
    }
    for (name, present) in [("--weights", chain.weights.is_some()), ("--rates", chain.rates.is_some())] {
        if !present {
            return Err(CliError::config(format!("sample needs {name}")));
        }
    }
    run::execute_merged(args)
}
