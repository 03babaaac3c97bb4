//! `wpt` — command-line front end for the WPT signal-design simulator.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on runtime errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use wpt_sim::channel::{sample_channel_seeded, ChannelFreqResponse, ChannelJson, ChannelKind, ChannelSpec};
use wpt_sim::harness::{
    records_to_csv, records_to_json, run_experiment, run_mobility, ExperimentSpec, FrameConfig,
    RunRecord,
};
use wpt_sim::modulation::ModulationScheme;
use wpt_sim::presets::{preset, preset_description, PRESET_NAMES};
use wpt_sim::rectenna::{zdc_coefficient_terms, RectennaParams};
use wpt_sim::scaling::{
    scaling_modulation, scaling_td, scaling_waveform, ChannelRegime, ScalingCase, ScalingStrategy,
    TdScalingKind,
};
use wpt_sim::waveform::{design_waveform, DesignMethod, WaveformJson};

mod signal_io;
use signal_io::TonesJson;

#[derive(Parser)]
#[command(name = "wpt", version, about = "Wireless power transfer signal design and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct RectennaArgs {
    /// Second-order diode coefficient
    #[arg(long, default_value_t = RectennaParams::DEFAULT_K2)]
    k2: f64,
    /// Fourth-order diode coefficient
    #[arg(long, default_value_t = RectennaParams::DEFAULT_K4)]
    k4: f64,
    /// Antenna resistance (ohm)
    #[arg(long, default_value_t = RectennaParams::DEFAULT_R_ANT)]
    r_ant: f64,
}

impl RectennaArgs {
    fn params(&self) -> Result<RectennaParams> {
        Ok(RectennaParams::new(self.k2, self.k4, self.r_ant)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute transmit weights for a waveform design and print them as JSON
    Design {
        /// up | ass | upmf | mf | maxpapr | smf | miso-upmf | miso-smf
        #[arg(long)]
        method: String,
        /// SMF exponent (smf / miso-smf only)
        #[arg(long)]
        beta: Option<f64>,
        /// Number of tones
        #[arg(long)]
        n: usize,
        /// Number of transmit antennas
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Total transmit power (W)
        #[arg(long)]
        p: f64,
        /// Channel realization JSON file (required for adaptive methods
        /// unless --channel-kind draws one)
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Draw the channel instead: flat | selective | identity
        #[arg(long, conflicts_with = "channel")]
        channel_kind: Option<ChannelKind>,
        /// Taps for a drawn selective channel
        #[arg(long, default_value_t = 8)]
        taps: usize,
        /// RNG seed (required when drawing a flat/selective channel)
        #[arg(long)]
        seed: Option<u64>,
        /// Also print the drawn channel to this file
        #[arg(long)]
        emit_channel: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate z_dc of a serialized signal
    Zdc {
        /// Received-tones JSON file: `{f0_hz, spacing_hz, tones: [[re, im], ..]}`
        #[arg(long, required_unless_present = "weights", conflicts_with = "weights")]
        tones: Option<PathBuf>,
        /// Waveform JSON file (as emitted by `design`)
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Channel JSON the waveform propagates through (identity if absent)
        #[arg(long, requires = "weights")]
        channel: Option<PathBuf>,
        #[command(flatten)]
        rectenna: RectennaArgs,
    },
    /// Print closed-form scaling-law values (tables ii, iii, iv)
    Scaling {
        /// ii | iii | iv
        #[arg(long)]
        table: String,
        /// Table ii: ff | fs
        #[arg(long)]
        channel: Option<String>,
        /// Table ii: up | upmf
        #[arg(long)]
        strategy: Option<String>,
        /// Table iii / iv modulation: cw | bpsk | qpsk | psk | qam16 | cscg | rg | flash
        #[arg(long)]
        scheme: Option<String>,
        /// Table iv row: cw | td-cw | td-mod | td-multisine
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Time-correlation coefficient (table ii)
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Flash amplitude parameter
        #[arg(long)]
        l: Option<f64>,
        /// PSK order
        #[arg(long)]
        psk_order: Option<u32>,
        /// Transmit power (W)
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        rectenna: RectennaArgs,
    },
    /// Run Monte Carlo experiments from a preset or a config file
    Montecarlo {
        /// Built-in preset name (see `wpt presets`)
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        preset: Option<String>,
        /// Experiment config JSON file
        #[arg(long)]
        config: Option<PathBuf>,
        /// RNG seed (stochastic runs never seed from the clock)
        #[arg(long)]
        seed: u64,
        /// Override the trial count of every experiment
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delayed-CSIT frame loop under mobility (time series)
    Mobility {
        /// Waveform design method
        #[arg(long)]
        method: String,
        #[arg(long)]
        beta: Option<f64>,
        /// Terminal velocity (m/s)
        #[arg(long)]
        velocity: f64,
        /// Carrier frequency (Hz)
        #[arg(long, default_value_t = 2.45e9)]
        carrier: f64,
        /// Frame length (s)
        #[arg(long, default_value_t = 1.0)]
        frame_s: f64,
        /// Channel estimation noise variance
        #[arg(long, default_value_t = 0.0)]
        est_noise_var: f64,
        /// flat | selective | identity
        #[arg(long, default_value = "selective")]
        channel_kind: ChannelKind,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        taps: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Number of frames to simulate
        #[arg(long, default_value_t = 500)]
        frames: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        rectenna: RectennaArgs,
    },
    /// Run a sweep experiment from a config file (sweep axis required)
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in experiment presets
    Presets,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_method(name: &str, beta: Option<f64>) -> Result<DesignMethod> {
    let method = match name {
        "up" => DesignMethod::Up,
        "ass" => DesignMethod::Ass,
        "upmf" => DesignMethod::Upmf,
        "mf" => DesignMethod::Mf,
        "maxpapr" => DesignMethod::MaxPapr,
        "smf" => DesignMethod::Smf { beta: beta.ok_or_else(|| anyhow!("smf needs --beta"))? },
        "miso-upmf" => DesignMethod::MisoUpmf,
        "miso-smf" => DesignMethod::MisoSmf { beta: beta.ok_or_else(|| anyhow!("miso-smf needs --beta"))? },
        other => bail!("unknown design method `{other}`"),
    };
    Ok(method)
}

fn parse_scheme(name: &str, l: Option<f64>, psk_order: Option<u32>) -> Result<ModulationScheme> {
    let scheme = match name {
        "cw" => ModulationScheme::Cw,
        "bpsk" => ModulationScheme::Bpsk,
        "qpsk" => ModulationScheme::Qpsk,
        "psk" => ModulationScheme::Psk { k: psk_order.ok_or_else(|| anyhow!("psk needs --psk-order"))? },
        "qam16" => ModulationScheme::Qam16,
        "cscg" => ModulationScheme::Cscg,
        "rg" | "real-gaussian" => ModulationScheme::RealGaussian,
        "flash" => ModulationScheme::Flash { l: l.ok_or_else(|| anyhow!("flash needs --l"))? },
        other => bail!("unknown modulation scheme `{other}`"),
    };
    Ok(scheme)
}

fn load_channel(path: &PathBuf) -> Result<ChannelFreqResponse> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: ChannelJson =
        serde_json::from_str(&text).with_context(|| format!("parsing channel file {}", path.display()))?;
    Ok(ChannelFreqResponse::try_from(json)?)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Design {
            method,
            beta,
            n,
            m,
            p,
            channel,
            channel_kind,
            taps,
            seed,
            emit_channel,
            out,
        } => {
            let method = parse_method(&method, beta)?;
            let drawn;
            let loaded;
            let chan: Option<&ChannelFreqResponse> = if let Some(path) = &channel {
                loaded = load_channel(path)?;
                Some(&loaded)
            } else if let Some(kind) = channel_kind {
                let mut spec = ChannelSpec::new(kind, n, m);
                spec.taps = taps;
                drawn = if kind == ChannelKind::Identity {
                    ChannelFreqResponse::identity(n, m, spec.f0_hz, spec.spacing_hz)
                } else {
                    let seed = seed.ok_or_else(|| anyhow!("--channel-kind {} needs --seed", kind.as_str()))?;
                    sample_channel_seeded(&spec, seed)?
                };
                Some(&drawn)
            } else {
                None
            };
            if let (Some(path), Some(ch)) = (&emit_channel, chan) {
                fs::write(path, serde_json::to_string_pretty(&ChannelJson::from(ch))?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let weights = design_waveform(method, chan, n, m, p)?;
            let mut text = serde_json::to_string_pretty(&WaveformJson::from(&weights))?;
            text.push('\n');
            emit(&text, out.as_ref())?;
        }

        Command::Zdc { tones, weights, channel, rectenna } => {
            let params = rectenna.params()?;
            let coeffs = if let Some(path) = &tones {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let parsed: TonesJson = serde_json::from_str(&text)
                    .with_context(|| format!("parsing tones file {}", path.display()))?;
                parsed.to_tone_vector()?.coefficients
            } else {
                let path = weights.as_ref().expect("clap enforces tones|weights");
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let wf: WaveformJson = serde_json::from_str(&text)
                    .with_context(|| format!("parsing waveform file {}", path.display()))?;
                let ch = match &channel {
                    Some(chan_path) => load_channel(chan_path)?,
                    None => ChannelFreqResponse::identity(wf.n, wf.m, 2.45e9, 78_125.0),
                };
                signal_io::propagate(&wf, &ch)?
            };
            let terms = zdc_coefficient_terms(&coeffs, &params)?;
            println!(
                "{}",
                serde_json::json!({
                    "zdc": terms.total(),
                    "second_order": terms.second,
                    "fourth_order": terms.fourth,
                })
            );
        }

        Command::Scaling {
            table,
            channel,
            strategy,
            scheme,
            kind,
            n,
            m,
            epsilon,
            l,
            psk_order,
            p,
            rectenna,
        } => {
            let params = rectenna.params()?;
            let value = match table.to_lowercase().as_str() {
                "ii" | "2" => {
                    let regime = match channel.as_deref() {
                        Some("ff") => ChannelRegime::Ff,
                        Some("fs") => ChannelRegime::Fs,
                        other => bail!("table ii needs --channel ff|fs (got {other:?})"),
                    };
                    let strat = match strategy.as_deref() {
                        Some("up") => ScalingStrategy::Up,
                        Some("upmf") => ScalingStrategy::Upmf,
                        other => bail!("table ii needs --strategy up|upmf (got {other:?})"),
                    };
                    scaling_waveform(&ScalingCase {
                        channel: regime,
                        strategy: strat,
                        n_tones: n,
                        n_antennas: m,
                        epsilon,
                        power_w: p,
                        params,
                    })?
                }
                "iii" | "3" => {
                    let name = scheme.as_deref().ok_or_else(|| anyhow!("table iii needs --scheme"))?;
                    scaling_modulation(parse_scheme(name, l, psk_order)?, p, &params)?
                }
                "iv" | "4" => {
                    let kind = match kind.as_deref() {
                        Some("cw") => TdScalingKind::Cw,
                        Some("td-cw") => TdScalingKind::TdCw,
                        Some("td-mod") => {
                            let name =
                                scheme.as_deref().ok_or_else(|| anyhow!("td-mod needs --scheme"))?;
                            TdScalingKind::TdModulated(parse_scheme(name, l, psk_order)?)
                        }
                        Some("td-multisine") => TdScalingKind::TdMultisine(n),
                        other => bail!("table iv needs --kind cw|td-cw|td-mod|td-multisine (got {other:?})"),
                    };
                    scaling_td(kind, m, p, &params)?
                }
                other => bail!("unknown table `{other}` (expected ii, iii or iv)"),
            };
            println!("{value}");
        }

        Command::Montecarlo { preset: preset_name, config, seed, trials, format, out } => {
            let specs = match (&preset_name, &config) {
                (Some(name), _) => {
                    preset(name).ok_or_else(|| anyhow!("unknown preset `{name}` (see `wpt presets`)"))?
                }
                (None, Some(path)) => vec![load_config(path)?],
                _ => unreachable!("clap enforces preset|config"),
            };
            let records = run_specs(specs, seed, trials)?;
            write_records(&records, format, out.as_ref())?;
        }

        Command::Mobility {
            method,
            beta,
            velocity,
            carrier,
            frame_s,
            est_noise_var,
            channel_kind,
            n,
            m,
            taps,
            p,
            frames,
            seed,
            format,
            out,
            rectenna,
        } => {
            let method = parse_method(&method, beta)?;
            let mut chan_spec = ChannelSpec::new(channel_kind, n, m);
            chan_spec.taps = taps;
            let mut spec = ExperimentSpec::new(
                "mobility",
                wpt_sim::harness::Strategy::waveform(method),
                chan_spec,
                frames,
            );
            spec.power_w = p;
            spec.params = Some(rectenna.params()?);
            spec.frame = Some(FrameConfig { t_frame_s: frame_s, est_noise_var, ..FrameConfig::default() });
            spec.mobility = Some(wpt_sim::channel::MobilityProfile::new(velocity, carrier, frame_s)?);
            let run = run_mobility(&spec, seed)?;
            match format {
                OutputFormat::Json => {
                    let mut text = serde_json::to_string_pretty(&run)?;
                    text.push('\n');
                    emit(&text, out.as_ref())?;
                }
                OutputFormat::Csv => {
                    let record = RunRecord {
                        experiment: "mobility".to_string(),
                        strategy: method.name().to_string(),
                        channel: channel_kind.as_str().to_string(),
                        n,
                        m,
                        beta: method.beta(),
                        l: None,
                        epsilon: Some(run.epsilon),
                        velocity_mps: Some(velocity),
                        zdc_mean: run.report.mean,
                        zdc_ci95: run.report.ci95_half_width,
                        zdc_second: run.report.mean_second,
                        zdc_fourth: run.report.mean_fourth,
                        trials: run.report.trials,
                        seed,
                        redraws: run.report.redraws,
                    };
                    emit(&records_to_csv(&[record]), out.as_ref())?;
                }
            }
        }

        Command::Sweep { config, seed, trials, format, out } => {
            let spec = load_config(&config)?;
            if spec.sweep.is_none() {
                bail!("config {} has no `sweep` axis; use `wpt montecarlo` for single points", config.display());
            }
            let records = run_specs(vec![spec], seed, trials)?;
            write_records(&records, format, out.as_ref())?;
        }

        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name:8} {}", preset_description(name).unwrap_or_default());
            }
        }
    }
    Ok(())
}

fn load_config(path: &PathBuf) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: ExperimentSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    Ok(spec)
}

fn run_specs(mut specs: Vec<ExperimentSpec>, seed: u64, trials: Option<usize>) -> Result<Vec<RunRecord>> {
    if let Some(t) = trials {
        for spec in &mut specs {
            spec.trials = t;
        }
    }
    let mut records = Vec::new();
    for spec in &specs {
        records.extend(run_experiment(spec, seed)?);
    }
    Ok(records)
}

fn write_records(records: &[RunRecord], format: OutputFormat, out: Option<&PathBuf>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => records_to_csv(records),
        OutputFormat::Json => {
            let mut t = records_to_json(records);
            t.push('\n');
            t
        }
    };
    emit(&text, out)
}
