//! Command-line surface. The binary only parses arguments and maps the
//! result of [`run`] to an exit status.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asp::{asp_solutions, LinkParams};
use crate::channel::{build_channel, ChannelJson, Wavelength};
use crate::design::{capacity_profile, distance_grid, rank_candidates, DesignSpec, Objective};
use crate::error::Error;
use crate::geometry::{LinkGeometry, PathModel};
use crate::report::{
    asp_rows, separation_rows, write_asp_csv, write_json, write_profile_csv, write_separations_csv,
    write_spectrum_csv, LengthCaps,
};
use crate::spectrum::{condition_number, eigen_spectrum, waterfill_capacity, EigenSpectrum};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
    #[error("{0} of {1} checks failed")]
    ChecksFailed(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Computation(_) | CliError::ChecksFailed(..) => EXIT_COMPUTATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Computation(e.to_string())
        }
    }
}

/// Inclusive distance range written `min:max:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl RangeArg {
    pub fn grid(&self) -> Vec<f64> {
        distance_grid(self.min, self.max, self.step)
    }
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, step] = parts.as_slice() else {
            return Err(format!("expected min:max:step, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let r = RangeArg {
            min: num(min)?,
            max: num(max)?,
            step: num(step)?,
        };
        if !(r.min > 0.0 && r.max.is_finite() && r.min <= r.max) {
            return Err(format!("range needs 0 < min <= max, got '{s}'"));
        }
        if !(r.step > 0.0 && r.step.is_finite()) {
            return Err(format!("step must be positive, got '{s}'"));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Exact,
    Approx,
}

impl From<ModelArg> for PathModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Exact => PathModel::Exact,
            ModelArg::Approx => PathModel::Approximate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    MaxMin,
    MaxMean,
    MaxOptimalCount,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MaxMin => Objective::MaxMinCapacity,
            ObjectiveArg::MaxMean => Objective::MaxMeanCapacity,
            ObjectiveArg::MaxOptimalCount => Objective::MaxOptimalCount,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LinkArgs {
    /// Carrier frequency in GHz (default 28 when no wavelength is given).
    #[arg(long, conflicts_with = "wavelength_m")]
    pub freq_ghz: Option<f64>,
    #[arg(long)]
    pub wavelength_m: Option<f64>,
    /// Receive antennas.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Transmit antennas.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
}

impl LinkArgs {
    pub fn wavelength(&self) -> Result<Wavelength, CliError> {
        let wl = match (self.freq_ghz, self.wavelength_m) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "give either --freq-ghz or --wavelength-m, not both".into(),
                ))
            }
            (None, Some(w)) => Wavelength::from_meters(w),
            (Some(f), None) => Wavelength::from_frequency_hz(f * 1e9),
            (None, None) => Wavelength::from_frequency_hz(28e9),
        };
        Ok(wl?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    #[arg(long, default_value_t = 0.0)]
    pub theta_tx_deg: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta_rx_deg: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi_rx_deg: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Common antenna separation in meters.
    #[arg(long)]
    pub sep: f64,
    /// Override the transmit separation.
    #[arg(long)]
    pub sep_tx: Option<f64>,
    /// Override the receive separation.
    #[arg(long)]
    pub sep_rx: Option<f64>,
    #[arg(long, default_value = "10:100:0.5", conflicts_with = "distance")]
    pub range: RangeArg,
    /// Evaluate a single distance instead of a range.
    #[arg(long)]
    pub distance: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub model: ModelArg,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "losmimo", version, about = "LOS MIMO antenna separation design")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal separation products at one distance.
    Asp {
        #[command(flatten)]
        link: LinkArgs,
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long)]
        distance: f64,
        #[arg(long, default_value_t = 64)]
        p_max: usize,
        /// Maximum array length in meters (both arrays).
        #[arg(long, default_value_t = 1.8)]
        length_max: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal common separation versus distance for each admissible p.
    Separations {
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long, default_value = "10:100:0.5")]
        range: RangeArg,
        #[arg(long, default_value_t = 64)]
        p_max: usize,
        #[arg(long, default_value_t = 1.8)]
        length_max: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Eigenvalues of H H^H versus distance.
    Eigs {
        #[command(flatten)]
        link: LinkArgs,
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Water-filling capacity versus distance.
    Capacity {
        #[command(flatten)]
        link: LinkArgs,
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 13.0)]
        snr_db: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rank candidate separations over a distance range.
    Design {
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long, default_value = "10:100:0.5")]
        range: RangeArg,
        #[arg(long, default_value_t = 13.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 1.8)]
        length_max: f64,
        #[arg(long, value_enum, default_value = "max-min")]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "exact")]
        model: ModelArg,
        /// Comma-separated anchor distances for candidate generation.
        #[arg(long, value_delimiter = ',')]
        anchors: Option<Vec<f64>>,
        /// Also write one profile CSV per candidate into this directory.
        #[arg(long)]
        profiles_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in regression checks.
    Verify {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn open_output<'a>(
    path: Option<&PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn finish(mut w: Box<dyn Write + '_>) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Computation(format!("write failed: {e}")))
}

fn caps(length_max: f64) -> Result<LengthCaps, CliError> {
    if !(length_max.is_finite() && length_max > 0.0) {
        return Err(CliError::Validation(format!(
            "--length-max must be positive, got {length_max}"
        )));
    }
    Ok(LengthCaps {
        tx: length_max,
        rx: length_max,
    })
}

fn sweep_geometry(
    link: &LinkArgs,
    angles: &AngleArgs,
    sweep: &SweepArgs,
    distance: f64,
) -> Result<LinkGeometry, CliError> {
    Ok(LinkGeometry::new(
        link.n,
        link.m,
        sweep.sep_tx.unwrap_or(sweep.sep),
        sweep.sep_rx.unwrap_or(sweep.sep),
        distance,
        angles.theta_tx_deg.to_radians(),
        angles.theta_rx_deg.to_radians(),
        angles.phi_rx_deg.to_radians(),
    )?)
}

fn sweep_distances(sweep: &SweepArgs) -> Vec<f64> {
    match sweep.distance {
        Some(d) => vec![d],
        None => sweep.range.grid(),
    }
}

#[derive(Serialize)]
struct SpectrumPoint<'a> {
    distance_m: f64,
    spectrum: &'a EigenSpectrum,
    condition_number: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity_bps_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel: Option<ChannelJson>,
}

/// Executes one subcommand, writing results to `stdout` unless `--out`
/// redirects them.
pub fn run(config: &CliConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Asp {
            link,
            angles,
            distance,
            p_max,
            length_max,
            output,
        } => {
            let params = LinkParams {
                wavelength: link.wavelength()?,
                range_r: *distance,
                theta_tx: angles.theta_tx_deg.to_radians(),
                theta_rx: angles.theta_rx_deg.to_radians(),
            };
            let set = asp_solutions(params, link.m, link.n, *p_max)?;
            let rows = asp_rows(&set, caps(*length_max)?);
            let mut w = open_output(output.out.as_ref(), stdout)?;
            match output.format {
                Format::Csv => write_asp_csv(&rows, &mut w)?,
                Format::Json => write_json(&rows, &mut w)?,
            }
            finish(w)
        }
        Command::Separations {
            link,
            range,
            p_max,
            length_max,
            output,
        } => {
            let rows = separation_rows(
                link.wavelength()?,
                link.m,
                link.n,
                *p_max,
                &range.grid(),
                caps(*length_max)?,
            )?;
            let mut w = open_output(output.out.as_ref(), stdout)?;
            match output.format {
                Format::Csv => write_separations_csv(&rows, &mut w)?,
                Format::Json => write_json(&rows, &mut w)?,
            }
            finish(w)
        }
        Command::Eigs {
            link,
            angles,
            sweep,
            output,
        } => {
            let wl = link.wavelength()?;
            let distances = sweep_distances(sweep);
            let mut channels = Vec::with_capacity(distances.len());
            let mut spectra = Vec::with_capacity(distances.len());
            for &d in &distances {
                let h = build_channel(&sweep_geometry(link, angles, sweep, d)?, wl, sweep.model.into())?;
                spectra.push(eigen_spectrum(&h)?);
                channels.push(h);
            }
            let mut w = open_output(output.out.as_ref(), stdout)?;
            match output.format {
                Format::Csv => write_spectrum_csv(&distances, &spectra, &mut w)?,
                Format::Json => {
                    let single = sweep.distance.is_some();
                    let points: Vec<SpectrumPoint<'_>> = distances
                        .iter()
                        .zip(&spectra)
                        .zip(&channels)
                        .map(|((&d, s), h)| SpectrumPoint {
                            distance_m: d,
                            spectrum: s,
                            condition_number: condition_number(s),
                            capacity_bps_hz: None,
                            channel: single.then(|| h.to_json()),
                        })
                        .collect();
                    write_json(&points, &mut w)?;
                }
            }
            finish(w)
        }
        Command::Capacity {
            link,
            angles,
            sweep,
            snr_db,
            output,
        } => {
            let wl = link.wavelength()?;
            let distances = sweep_distances(sweep);
            let mut capacities = Vec::with_capacity(distances.len());
            let mut spectra = Vec::with_capacity(distances.len());
            for &d in &distances {
                let h = build_channel(&sweep_geometry(link, angles, sweep, d)?, wl, sweep.model.into())?;
                let s = eigen_spectrum(&h)?;
                capacities.push(waterfill_capacity(&s, *snr_db)?.bits_per_s_per_hz);
                spectra.push(s);
            }
            let profile = crate::design::CapacityProfile {
                separation_m: sweep.sep,
                distances,
                capacities,
                spectra,
            };
            let mut w = open_output(output.out.as_ref(), stdout)?;
            match output.format {
                Format::Csv => write_profile_csv(&profile, &mut w)?,
                Format::Json => {
                    let points: Vec<SpectrumPoint<'_>> = profile
                        .distances
                        .iter()
                        .zip(&profile.spectra)
                        .zip(&profile.capacities)
                        .map(|((&d, s), &c)| SpectrumPoint {
                            distance_m: d,
                            spectrum: s,
                            condition_number: condition_number(s),
                            capacity_bps_hz: Some(c),
                            channel: None,
                        })
                        .collect();
                    write_json(&points, &mut w)?;
                }
            }
            finish(w)
        }
        Command::Design {
            link,
            range,
            snr_db,
            length_max,
            objective,
            model,
            anchors,
            profiles_dir,
            out,
        } => {
            let caps = caps(*length_max)?;
            let spec = DesignSpec {
                d_min: range.min,
                d_max: range.max,
                m_rx: link.m,
                n_tx: link.n,
                wavelength: link.wavelength()?,
                snr_db: *snr_db,
                length_max_tx: caps.tx,
                length_max_rx: caps.rx,
                grid_step: range.step,
                anchor_distances: anchors.clone(),
                objective: (*objective).into(),
                profile_model: (*model).into(),
            };
            let report = rank_candidates(&spec)?;
            if let Some(dir) = profiles_dir {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", dir.display())))?;
                for (i, c) in report.candidates.iter().enumerate() {
                    let profile = capacity_profile(c.separation_m, &spec)?;
                    let path = dir.join(format!("candidate_{i:04}.csv"));
                    let f = File::create(&path)
                        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", path.display())))?;
                    write_profile_csv(&profile, BufWriter::new(f))?;
                }
            }
            let mut w = open_output(out.as_ref(), stdout)?;
            write_json(&report, &mut w)?;
            finish(w)
        }
        Command::Verify { format } => {
            let outcomes = verify::run_all();
            match format {
                Format::Json => write_json(&outcomes, &mut *stdout)?,
                Format::Csv => {
                    for o in &outcomes {
                        writeln!(stdout, "{o}")
                            .map_err(|e| CliError::Computation(format!("write failed: {e}")))?;
                    }
                }
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed, outcomes.len()));
            }
            Ok(())
        }
    }
}
