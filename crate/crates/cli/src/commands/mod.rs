pub mod classify;
pub mod demo_tipi;
pub mod rates;
pub mod run;
pub mod sample;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use herding::herding::{default_initial_weights, moment_gap, HerdStateOf, TrajectoryRecord};
use herding::io::{read_weights_file, write_trajectory_csv, write_weights};
use herding::maximize::AscentConfig;
use herding::model::StateOf;
use herding::{ChainConfig, FeatureModel, Herder, JointState, RateVector, Spin, TransformParams, Variant, WeightVector};

use crate::config::{load, parse_search, ChainArgs};
use crate::error::{CliError, CliResult};

/// One line of the pseudo-sample stream.
pub trait SampleText {
    fn write_line(&self, w: &mut impl Write) -> std::io::Result<()>;
}

/// Visible spins, then hidden spins.
impl SampleText for JointState<Vec<Spin>, Vec<Spin>> {
    fn write_line(&self, w: &mut impl Write) -> std::io::Result<()> {
        let spins: Vec<String> = self.visible.iter().chain(&self.hidden).map(|s: &Spin| s.to_string()).collect();
        writeln!(w, "{}", spins.join(" "))
    }
}

/// Visible-state index and hidden-state index.
impl SampleText for JointState<usize, usize> {
    fn write_line(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.visible, self.hidden)
    }
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::from(e).at(path))
}

pub fn read_vector(path: &Path) -> CliResult<Vec<f64>> {
    load(path, |p| read_weights_file(p))
}

pub fn read_rates(path: &Path) -> CliResult<RateVector> {
    Ok(RateVector::new(read_vector(path)?, 0))
}

/// Builds the variant named in `args`; `rates` feeds decoupled chains.
pub fn variant(args: &ChainArgs) -> CliResult<Variant> {
    let search = parse_search(args.search.as_deref().unwrap_or("exhaustive"))?;
    Ok(match args.variant.as_deref().unwrap_or("idealized") {
        "idealized" => Variant::Idealized,
        "local" => Variant::Local,
        "safe" => Variant::Safe,
        "fully-observed" => Variant::FullyObserved(search),
        "decoupled" => {
            let path = args
                .rates
                .as_deref()
                .ok_or_else(|| CliError::config("the decoupled variant needs --rates"))?;
            Variant::Decoupled {
                rates: read_rates(path)?,
                search,
            }
        }
        other => {
            return Err(CliError::config(format!(
                "variant `{other}` is not idealized, local, safe, fully-observed or decoupled"
            )))
        }
    })
}

pub fn chain_config(args: &ChainArgs, variant: Variant, frozen: Vec<usize>) -> CliResult<ChainConfig> {
    let offset = match &args.offset {
        Some(p) => read_vector(p)?,
        None => Vec::new(),
    };
    let transform = TransformParams::new(args.eta.unwrap_or(1.0), args.gamma.unwrap_or(1.0), offset)?;
    let mut cfg = ChainConfig::new(variant)
        .with_transform(transform)
        .with_frozen(frozen)
        .with_ascent(AscentConfig::new(args.max_sweeps.unwrap_or(10))?);
    if let Some(cap) = args.joint_cap {
        cfg.joint_cap = u128::from(cap);
    }
    Ok(cfg)
}

pub fn initial_weights(args: &ChainArgs, n_features: usize) -> CliResult<WeightVector> {
    match &args.weights {
        Some(p) => Ok(WeightVector::new(read_vector(p)?)?),
        None => Ok(default_initial_weights(n_features, args.seed.unwrap_or(herding::herding::DEFAULT_WEIGHT_SEED))),
    }
}

/// Output files of one chain.
pub struct ChainOutputs<'a> {
    pub dir: &'a Path,
    pub prefix: &'a str,
}

impl ChainOutputs<'_> {
    fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.join(format!("{}{name}", self.prefix))
    }
}

/// Runs `steps` steps, streaming pseudo-samples and writing the trajectory
/// and final weights. Fails with an invariant error if the telescoping
/// identity does not hold at the end.
pub fn run_chain<M>(
    herder: &Herder<'_, M>,
    mut state: HerdStateOf<M>,
    steps: u64,
    record_every: u64,
    out: &ChainOutputs<'_>,
) -> CliResult<HerdStateOf<M>>
where
    M: FeatureModel,
    StateOf<M>: SampleText,
{
    let mut samples = create(&out.path("samples.txt"))?;
    let mut records = Vec::new();
    let mut io_err = None;
    herder.run_with(&mut state, steps, |s| {
        if io_err.is_none() {
            if let Err(e) = s.sample().write_line(&mut samples) {
                io_err = Some(e);
            }
        }
        if s.t() % record_every == 0 {
            records.push(TrajectoryRecord {
                t: s.t(),
                norm_l2: s.weights().norm_l2(),
                norm_linf: s.weights().norm_linf(),
                gap: moment_gap(s).expect("t >= 1 after a step"),
            });
        }
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    samples.flush()?;

    let residual = herder.telescoping_residual(&state)?;
    let tol = 1e-10 * state.t() as f64;
    if !(residual <= tol) {
        return Err(CliError::Invariant(format!(
            "telescoping residual {residual:e} exceeds {tol:e} at t = {}",
            state.t()
        )));
    }

    let mut traj = create(&out.path("trajectory.csv"))?;
    write_trajectory_csv(&mut traj, &records, herder.model().n_features())?;
    traj.flush()?;
    let mut w = create(&out.path("weights.txt"))?;
    write_weights(&mut w, state.weights())?;
    w.flush()?;
    Ok(state)
}
