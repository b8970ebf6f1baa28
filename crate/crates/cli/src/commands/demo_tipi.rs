use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use herding::fig1::SinCosSystem;
use serde::{Deserialize, Serialize};

use super::create;
use crate::config::{merge_with_file, prepare_out_dir, write_effective_config};
use crate::error::{CliError, CliResult};

/// The two-feature sin/cos system: objective surface and weight orbit.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DemoArgs {
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Surface points per axis (at least 3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Surface half-width in weight space.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Orbit length.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    /// Spacing of the input grid on `[−π, π]`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_step: Option<f64>,
}

pub fn execute(cli: DemoArgs) -> CliResult<()> {
    let mut args = merge_with_file(&cli, cli.config.as_deref())?;
    let grid = *args.grid.get_or_insert(41);
    let extent = *args.extent.get_or_insert(5.0);
    let steps = *args.steps.get_or_insert(10_000);
    let x_step = *args.x_step.get_or_insert(1.0);
    let out = args.out.get_or_insert_with(|| PathBuf::from("herd-out")).clone();
    if grid < 3 {
        return Err(CliError::config(format!("grid must have at least 3 points, got {grid}")));
    }
    if steps == 0 {
        return Err(CliError::config("steps must be at least 1"));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(CliError::config(format!("extent must be positive, got {extent}")));
    }
    let sys = SinCosSystem::new(x_step)?;
    prepare_out_dir(&out)?;
    write_effective_config(&out, &args)?;

    let mut f = create(&out.join("tipi_surface.csv"))?;
    writeln!(f, "w_sin,w_cos,tipi")?;
    for [a, b, l] in sys.tipi_surface(extent, grid)? {
        writeln!(f, "{a},{b},{l}")?;
    }
    f.flush()?;

    let herder = sys.herder()?;
    let mut state = herder.init(None)?;
    let mut f = create(&out.join("orbit.csv"))?;
    writeln!(f, "t,w_sin,w_cos,x")?;
    let mut io_err = None;
    herder.run_with(&mut state, steps, |s| {
        let w = s.weights();
        let x = sys.grid()[s.sample().visible];
        if let Err(e) = writeln!(f, "{},{},{},{x}", s.t(), w[0], w[1]) {
            io_err.get_or_insert(e);
        }
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    f.flush()?;
    Ok(())
}
