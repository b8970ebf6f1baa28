//! Plain-text file formats and exporters.
//!
//! * dataset: header `N D`, then `N` rows of `D` spins (`-1`/`+1`, or `0`/`1`
//!   when converting); header `N D maxval` marks integer grayscale rows that
//!   are binarized on load.
//! * weights / rates: `F`, then `F` values, one per line.
//! * enumerated model: `V H F`, then `V·H` rows of `F` values (`j = v·H + h`).
//! * enumerated data: `N`, then `N` visible-state indices.
//! * pseudo-samples: one space-separated spin row per sample.
//! * CSV trajectories and feature tables, binary `P5` PGM images.
//!
//! Floats are written with Rust's shortest round-trip formatting, so files
//! re-read to bit-identical values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{HerdError, Result};
use crate::eval::EnergyFeatureTable;
use crate::herding::TrajectoryRecord;
use crate::model::{binarize_grayscale, Dataset, EnumeratedModel, RbmModel, Spin, DEFAULT_GRAY_THRESHOLD};

/// How raw dataset tokens become spins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetOptions {
    /// Tokens are `0`/`1` and map to `-1`/`+1`.
    pub zero_one: bool,
    /// Binarization threshold for grayscale files.
    pub gray_threshold: f64,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            zero_one: false,
            gray_threshold: DEFAULT_GRAY_THRESHOLD,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> HerdError {
    HerdError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(reader: impl BufRead) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn parse_tokens<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| parse_err(line_no, format!("cannot parse `{tok}`"))))
        .collect()
}

pub fn read_dataset(reader: impl BufRead, opts: &DatasetOptions) -> Result<Dataset> {
    let lines = content_lines(reader)?;
    let (hline, header) = lines.first().ok_or_else(|| parse_err(1, "missing header"))?;
    let head: Vec<usize> = parse_tokens(*hline, header)?;
    let (n, d, maxval) = match head[..] {
        [n, d] => (n, d, None),
        [n, d, m] => (n, d, Some(m)),
        _ => return Err(parse_err(*hline, "header must be `N D` or `N D maxval`")),
    };
    if lines.len() - 1 != n {
        return Err(parse_err(*hline, format!("header declares {n} cases, found {}", lines.len() - 1)));
    }
    let mut cases = Vec::with_capacity(n);
    for (line_no, line) in &lines[1..] {
        let row: Vec<i64> = parse_tokens(*line_no, line)?;
        if row.len() != d {
            return Err(parse_err(*line_no, format!("expected {d} values, found {}", row.len())));
        }
        let spins = match maxval {
            Some(m) => {
                let m = u32::try_from(m).map_err(|_| parse_err(*hline, "maxval too large"))?;
                let pixels = row
                    .iter()
                    .map(|&p| u32::try_from(p).map_err(|_| parse_err(*line_no, format!("negative pixel {p}"))))
                    .collect::<Result<Vec<_>>>()?;
                binarize_grayscale(&pixels, m, opts.gray_threshold)?
            }
            None => row
                .iter()
                .map(|&v| match (opts.zero_one, v) {
                    (false, 1) | (true, 1) => Ok(1),
                    (false, -1) | (true, 0) => Ok(-1),
                    _ => Err(parse_err(*line_no, format!("invalid spin value {v}"))),
                })
                .collect::<Result<Vec<Spin>>>()?,
        };
        cases.push(spins);
    }
    Dataset::new(cases)
}

pub fn read_dataset_file(path: impl AsRef<Path>, opts: &DatasetOptions) -> Result<Dataset> {
    read_dataset(BufReader::new(File::open(path)?), opts)
}

fn write_spin_row(w: &mut impl Write, row: &[Spin]) -> Result<()> {
    let mut first = true;
    for s in row {
        if !first {
            w.write_all(b" ")?;
        }
        first = false;
        write!(w, "{s}")?;
    }
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_dataset(mut w: impl Write, data: &Dataset) -> Result<()> {
    writeln!(w, "{} {}", data.len(), data.dim())?;
    for case in data.cases() {
        write_spin_row(&mut w, case)?;
    }
    Ok(())
}

pub fn read_weights(reader: impl BufRead) -> Result<Vec<f64>> {
    let lines = content_lines(reader)?;
    let mut tokens = lines
        .iter()
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (*n, t)));
    let (hline, head) = tokens.next().ok_or_else(|| parse_err(1, "missing length header"))?;
    let f: usize = head.parse().map_err(|_| parse_err(hline, format!("bad length `{head}`")))?;
    let values = tokens
        .map(|(n, t)| t.parse::<f64>().map_err(|_| parse_err(n, format!("cannot parse `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != f {
        return Err(parse_err(hline, format!("header declares {f} values, found {}", values.len())));
    }
    Ok(values)
}

pub fn read_weights_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_weights(BufReader::new(File::open(path)?))
}

pub fn write_weights(mut w: impl Write, values: &[f64]) -> Result<()> {
    writeln!(w, "{}", values.len())?;
    for v in values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn read_enumerated_model(reader: impl BufRead) -> Result<EnumeratedModel> {
    let lines = content_lines(reader)?;
    let (hline, header) = lines.first().ok_or_else(|| parse_err(1, "missing header"))?;
    let head: Vec<usize> = parse_tokens(*hline, header)?;
    let [v, h, f] = head[..] else {
        return Err(parse_err(*hline, "header must be `V H F`"));
    };
    if lines.len() - 1 != v * h {
        return Err(parse_err(*hline, format!("expected {} feature rows, found {}", v * h, lines.len() - 1)));
    }
    let mut table = Vec::with_capacity(v * h * f);
    for (line_no, line) in &lines[1..] {
        let row: Vec<f64> = parse_tokens(*line_no, line)?;
        if row.len() != f {
            return Err(parse_err(*line_no, format!("expected {f} features, found {}", row.len())));
        }
        table.extend(row);
    }
    EnumeratedModel::new(v, h, f, table)
}

pub fn read_enumerated_model_file(path: impl AsRef<Path>) -> Result<EnumeratedModel> {
    read_enumerated_model(BufReader::new(File::open(path)?))
}

pub fn write_enumerated_model(mut w: impl Write, model: &EnumeratedModel) -> Result<()> {
    let f = model.table().len() / model.n_joint_states();
    writeln!(w, "{} {} {}", model.n_visible_states(), model.n_hidden_states(), f)?;
    for row in model.table().chunks(f) {
        let text: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", text.join(" "))?;
    }
    Ok(())
}

pub fn read_state_indices(reader: impl BufRead) -> Result<Vec<usize>> {
    let lines = content_lines(reader)?;
    let (hline, header) = lines.first().ok_or_else(|| parse_err(1, "missing header"))?;
    let n = match parse_tokens::<usize>(*hline, header)?[..] {
        [n] => n,
        _ => return Err(parse_err(*hline, "header must be `N`")),
    };
    let mut out = Vec::with_capacity(n);
    for (line_no, line) in &lines[1..] {
        out.extend(parse_tokens::<usize>(*line_no, line)?);
    }
    if out.len() != n {
        return Err(parse_err(*hline, format!("header declares {n} indices, found {}", out.len())));
    }
    if n == 0 {
        return Err(HerdError::EmptyDataset);
    }
    Ok(out)
}

pub fn read_state_indices_file(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    read_state_indices(BufReader::new(File::open(path)?))
}

pub fn write_state_indices(mut w: impl Write, indices: &[usize]) -> Result<()> {
    writeln!(w, "{}", indices.len())?;
    for i in indices {
        writeln!(w, "{i}")?;
    }
    Ok(())
}

pub fn write_samples<'a>(mut w: impl Write, samples: impl IntoIterator<Item = &'a [Spin]>) -> Result<()> {
    for s in samples {
        write_spin_row(&mut w, s)?;
    }
    Ok(())
}

pub fn write_trajectory_csv(mut w: impl Write, records: &[TrajectoryRecord], n_features: usize) -> Result<()> {
    write!(w, "t,norm_l2,norm_linf")?;
    for a in 0..n_features {
        write!(w, ",gap_{a}")?;
    }
    writeln!(w)?;
    for r in records {
        write!(w, "{},{},{}", r.t, r.norm_l2, r.norm_linf)?;
        for g in &r.gap {
            write!(w, ",{g}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_feature_table_csv(mut w: impl Write, table: &EnergyFeatureTable) -> Result<()> {
    let n_classes = table.iterations.len();
    write!(w, "case_id,label")?;
    for c in 0..n_classes {
        write!(w, ",class_{c}")?;
    }
    writeln!(w)?;
    for (i, (row, label)) in table.rows.iter().zip(&table.labels).enumerate() {
        write!(w, "{i},{label}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Linear min-max scaling to `0..=255`; a constant image is mid-gray.
pub fn scale_to_gray(values: &[f64]) -> Vec<u8> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![128; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - lo) / (hi - lo) * 255.0).round() as u8)
        .collect()
}

/// 8-bit binary PGM (`P5`).
pub fn write_pgm(mut w: impl Write, width: usize, height: usize, values: &[f64]) -> Result<()> {
    if width * height != values.len() {
        return Err(HerdError::DimensionMismatch {
            what: "image pixels",
            expected: width * height,
            found: values.len(),
        });
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(&scale_to_gray(values))?;
    Ok(())
}

/// The pairwise rate block `{r_(z_i x_j)}_j` of every hidden unit `i`.
pub fn rate_filters(model: &RbmModel, rates: &[f64]) -> Result<Vec<Vec<f64>>> {
    crate::error::check_len("rate vector", crate::model::FeatureModel::n_features(model), rates.len())?;
    Ok((0..model.n_hidden())
        .map(|i| rates[model.pairwise_row_range(i)].to_vec())
        .collect())
}

/// Writes `filter_{i}.pgm` for every hidden unit into `dir`.
pub fn export_rate_filters(dir: impl AsRef<Path>, model: &RbmModel, rates: &[f64], height: usize, width: usize) -> Result<Vec<std::path::PathBuf>> {
    if height * width != model.n_visible() {
        return Err(HerdError::InvalidParameter(format!(
            "filter dims {height}x{width} do not cover {} visible units",
            model.n_visible()
        )));
    }
    let mut paths = Vec::new();
    for (i, filter) in rate_filters(model, rates)?.iter().enumerate() {
        let path = dir.as_ref().join(format!("filter_{i}.pgm"));
        let mut f = BufWriter::new(File::create(&path)?);
        write_pgm(&mut f, width, height, filter)?;
        f.flush()?;
        paths.push(path);
    }
    Ok(paths)
}
