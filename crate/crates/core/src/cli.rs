//! Command-line front end. Every subcommand writes a CSV or JSON artifact
//! carrying its seed and parameters; the same arguments always produce the
//! same bytes.
//!
//! Flags may also come from a flat `key=value` file given with `--config`;
//! keys are the long flag names and explicit flags win.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dwf::{build_mubs, build_striations, canonical_states, census_spectra, PhasePoint, StateLabel};
use crate::error::{Error, Result};
use crate::metrics::{
    chsh_smax, concurrence, fidelity_pure, mc_teleport_stats, qfi_cmatrix, teleportation_fidelity, Metric,
};
use crate::noise::{evolve_two_qubit, AdParams, ChannelParams, RtnParams};
use crate::protocols::{caption_params, protected_evolution, teleport_trials, CaptionSet, WmQmrParams};
use crate::qmath::Rng;
use crate::sim::{run_circuit, sweep_depolarizing, DensityMat, StateVec, SWEEP_CSV_HEADER};
use crate::synth::{kak_decompose, prepare_state, schmidt_coefficients, schmidt_rank, unitary_from_state, SCHMIDT_TOL};
use crate::tomo::{tomography_pipeline, DEFAULT_SHOTS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "negstates", version, about = "Negative-Wigner two-qubit states: experiments and figure data")]
#[command(args_override_self = true)]
pub struct Cli {
    /// flat key=value file; explicit flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reference states with Schmidt data and source nets
    States(CommonArgs),
    /// Spectrum histogram of the phase-point operator over all quantum nets
    Census(CensusArgs),
    /// Gate synthesis of a state-preparation unitary over {H, RX, RZ, CZ}
    Synth(SynthArgs),
    /// Simulated state tomography with optional readout errors and mitigation
    Tomo(TomoArgs),
    /// Time sweep of figures of merit under a noisy channel
    NoiseSweep(SweepArgs),
    /// Maximal mean QFI and its ratio to the reference Bell state
    Qfi(SweepArgs),
    /// Optimal CHSH value and its ratio to the reference Bell state
    Chsh(SweepArgs),
    /// Teleportation through a maximally entangled resource
    Teleport(TeleportArgs),
    /// Weak measurement + reversal protected sweep
    Wmqmr(SweepArgs),
    /// Shor-code protection against depolarizing errors
    Shor(ShorArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CensusArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub state: String,
    /// also write the gate list to this file
    #[arg(long)]
    pub circuit_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TomoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: usize,
    #[arg(long, default_value_t = 0.0)]
    pub readout_flip: f64,
    #[arg(long)]
    pub mitigate: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TeleportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "NS3pp")]
    pub resource: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ShorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "NS1,NS2,NS3,bell_phip")]
    pub states: String,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p_start: f64,
    #[arg(long, default_value_t = 0.05)]
    pub p_stop: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Rtn,
    Ad,
    Depolarizing,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = ChannelKind::Ad)]
    pub channel: ChannelKind,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// depolarizing probability (depolarizing channel only)
    #[arg(long)]
    pub prob: Option<f64>,
    /// comma-separated state labels; subcommand default when absent
    #[arg(long)]
    pub states: Option<String>,
    /// comma-separated metrics; subcommand default when absent
    #[arg(long)]
    pub metrics: Option<String>,
    /// Bell state used as denominator of ratio metrics
    #[arg(long, default_value = "bell_phip")]
    pub reference: String,
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long)]
    pub t_stop: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// apply weak measurement and reversal with the per-state caption strengths
    #[arg(long)]
    pub protect: bool,
    /// common weak-measurement strength, overriding the per-state values
    #[arg(long = "wm-p")]
    pub wm_p: Option<f64>,
    /// common reversal strength, overriding the per-state values
    #[arg(long = "wm-q")]
    pub wm_q: Option<f64>,
    /// Haar inputs per point for fid_dev
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
}

/// Exit status: 0 success, 1 numerical failure, 2 configuration error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Invalid(_)
        | Error::OutOfRange { .. }
        | Error::MissingSetting(_)
        | Error::NotMaximallyEntangled(_) => 2,
        _ => 1,
    }
}

/// Parse a flat `key=value` file into long-flag arguments. Blank lines and
/// `#` comments are ignored; `key=true` becomes a bare flag, `key=false` is dropped.
pub fn config_to_args(text: &str) -> Result<(Option<String>, Vec<String>)> {
    let mut sub = None;
    let mut args = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", n + 1)))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        if k.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", n + 1)));
        }
        match (k.as_str(), v) {
            ("subcommand", _) => sub = Some(v.to_string()),
            (_, "true") => args.push(format!("--{k}")),
            (_, "false") => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.to_string());
            }
        }
    }
    Ok((sub, args))
}

/// Splice config-file arguments ahead of the explicit ones so that flags win.
pub fn expand_args(argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or_else(|| Error::Parse("--config needs a path".into()))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::Parse(format!("config {path}: {e}")))?;
    let (sub, extra) = config_to_args(&text)?;
    let mut rest: Vec<String> = argv[1..].to_vec();
    let consumed = if argv[pos].contains('=') { 1 } else { 2 };
    rest.drain(pos - 1..pos - 1 + consumed);
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let sub_idx = rest.iter().position(|a| names.contains(a));
    let mut out = vec![argv[0].clone()];
    match (sub_idx, sub) {
        (Some(i), _) => {
            out.extend(rest[..=i].iter().cloned());
            out.extend(extra);
            out.extend(rest[i + 1..].iter().cloned());
        }
        (None, Some(s)) => {
            out.push(s);
            out.extend(extra);
            out.extend(rest);
        }
        (None, None) => return Err(Error::Parse("no subcommand given".into())),
    }
    Ok(out)
}

/// Write `contents` via a sibling temporary file and rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| Error::Invalid(format!("bad output path {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Key/value metadata recorded in every artifact.
#[derive(Clone, Debug, Default)]
pub struct Metadata(Vec<(String, String)>);

impl Metadata {
    fn new(command: &str, seed: u64) -> Self {
        let mut m = Metadata::default();
        m.push("version", VERSION);
        m.push("command", command);
        m.push("seed", seed);
        m
    }

    fn push(&mut self, k: &str, v: impl ToString) {
        self.0.push((k.to_string(), v.to_string()));
    }

    pub fn csv_header(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    pub fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
    }
}

fn json_with_meta<T: Serialize>(meta: &Metadata, body: &T) -> Result<String> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::Invalid(e.to_string()))?;
    match &mut v {
        Value::Object(m) => {
            m.insert("metadata".into(), meta.json());
        }
        other => v = json!({ "metadata": meta.json(), "result": other.clone() }),
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_states(list: &str) -> Result<Vec<StateLabel>> {
    let v: Vec<StateLabel> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::Invalid("empty state list".into()));
    }
    Ok(v)
}

pub fn parse_metrics(list: &str) -> Result<Vec<Metric>> {
    let v: Vec<Metric> = list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::Invalid("empty metric list".into()));
    }
    Ok(v)
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::Invalid(format!("bad grid [{start}, {stop}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { stop } else { start + h * i as f64 }).collect())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::States(a) => cmd_states(&a),
        Command::Census(a) => cmd_census(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Tomo(a) => cmd_tomo(&a),
        Command::NoiseSweep(a) => cmd_sweep(SweepKind::Noise, &a),
        Command::Qfi(a) => cmd_sweep(SweepKind::Qfi, &a),
        Command::Chsh(a) => cmd_sweep(SweepKind::Chsh, &a),
        Command::Teleport(a) => cmd_teleport(&a),
        Command::Wmqmr(a) => cmd_sweep(SweepKind::Wmqmr, &a),
        Command::Shor(a) => cmd_shor(&a),
    }
}

/// Entry point for the binary: parses, runs and maps errors to exit codes.
pub fn main_with_args(argv: Vec<String>) -> i32 {
    let argv = match expand_args(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn cmd_states(a: &CommonArgs) -> Result<()> {
    let meta = Metadata::new("states", a.seed);
    let rows: Vec<Value> = canonical_states()
        .into_iter()
        .map(|s| {
            let rho = DensityMat::from_pure(&s.vector)?;
            Ok(json!({
                "label": s.label.as_str(),
                "amplitudes": s.vector.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "schmidt_coefficients": schmidt_coefficients(&s.vector),
                "schmidt_rank": schmidt_rank(&s.vector, SCHMIDT_TOL),
                "concurrence": concurrence(&rho)?,
                "eigenvalue": s.eigenvalue,
                "source_net": s.source_net,
            }))
        })
        .collect::<Result<_>>()?;
    emit(&a.out, &json_with_meta(&meta, &json!({ "states": rows }))?)
}

pub fn census_csv(q: usize, p: usize, meta: &Metadata) -> Result<String> {
    let mubs = build_mubs(4)?;
    let striations = build_striations(4)?;
    let alpha = PhasePoint::new(4, q, p).map_err(|e| Error::Invalid(e.to_string()))?;
    let counts = census_spectra(&mubs, &striations, alpha)?;
    let mut s = meta.csv_header();
    s.push_str("lambda1,lambda2,lambda3,lambda4,count\n");
    for (key, n) in &counts {
        let v: Vec<String> = key.values().iter().map(|x| format!("{x:.4}")).collect();
        let _ = writeln!(s, "{},{n}", v.join(","));
    }
    Ok(s)
}

pub fn cmd_census(a: &CensusArgs) -> Result<()> {
    let mut meta = Metadata::new("census", a.common.seed);
    meta.push("q", a.q);
    meta.push("p", a.p);
    emit(&a.common.out, &census_csv(a.q, a.p, &meta)?)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let label: StateLabel = a.state.parse()?;
    let mut meta = Metadata::new("synth", a.common.seed);
    meta.push("state", label);
    let v = label.vector();
    let u = unitary_from_state(&v)?;
    let rep = kak_decompose(&u)?;
    let prepared = run_circuit(&rep.circuit, &StateVec::zero(2))?;
    let prep_fid = fidelity_pure(&v, &prepared.density()?);
    // shortest known preparation of the state alone, without completing a unitary
    let prep = prepare_state(&v)?;
    let body = json!({
        "state": label.as_str(),
        "delta": rep.delta,
        "depth": rep.depth,
        "cz_count": rep.cz_count,
        "prepared_fidelity": prep_fid,
        "schmidt_rank": schmidt_rank(prepared.amplitudes(), SCHMIDT_TOL),
        "circuit": rep.circuit.to_text(),
        "preparation": {
            "depth": prep.depth,
            "cz_count": prep.circuit.cz_count(),
            "fidelity": prep.fidelity,
            "circuit": prep.circuit.to_text(),
        },
    });
    if let Some(p) = &a.circuit_out {
        let text = format!("{}{}", meta.csv_header(), rep.circuit.to_text());
        write_atomic(p, &text)?;
    }
    emit(&a.common.out, &json_with_meta(&meta, &body)?)
}

pub fn cmd_tomo(a: &TomoArgs) -> Result<()> {
    let label: StateLabel = a.state.parse()?;
    let mut meta = Metadata::new("tomo", a.common.seed);
    meta.push("state", label);
    meta.push("shots", a.shots);
    meta.push("readout_flip", a.readout_flip);
    meta.push("mitigate", a.mitigate);
    if a.shots == 0 {
        return Err(Error::Invalid("shots must be at least 1".into()));
    }
    let rep = tomography_pipeline(label.as_str(), &label.vector(), a.shots, a.readout_flip, a.mitigate, a.common.seed)?;
    emit(&a.common.out, &json_with_meta(&meta, &rep)?)
}

pub fn cmd_teleport(a: &TeleportArgs) -> Result<()> {
    let label: StateLabel = a.resource.parse()?;
    let mut meta = Metadata::new("teleport", a.common.seed);
    meta.push("resource", label);
    meta.push("trials", a.trials);
    let rep = teleport_trials(&label.vector(), a.trials, &mut Rng::new(a.common.seed))?;
    emit(&a.common.out, &json_with_meta(&meta, &rep)?)
}

pub fn cmd_shor(a: &ShorArgs) -> Result<()> {
    let labels = parse_states(&a.states)?;
    let ps = linspace(a.p_start, a.p_stop, a.points)?;
    let mut meta = Metadata::new("shor", a.common.seed);
    meta.push("states", &a.states);
    meta.push("trials", a.trials);
    meta.push("p_grid", format!("{}:{}:{}", a.p_start, a.p_stop, a.points));
    let states: Vec<(String, Vec<_>)> = labels.iter().map(|l| (l.as_str().to_string(), l.vector())).collect();
    let rows = sweep_depolarizing(&states, &ps, a.trials, a.common.seed)?;
    let mut s = meta.csv_header();
    s.push_str(SWEEP_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    emit(&a.common.out, &s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Noise,
    Qfi,
    Chsh,
    Wmqmr,
}

impl SweepKind {
    fn name(&self) -> &'static str {
        match self {
            SweepKind::Noise => "noise-sweep",
            SweepKind::Qfi => "qfi",
            SweepKind::Chsh => "chsh",
            SweepKind::Wmqmr => "wmqmr",
        }
    }

    fn default_states(&self) -> &'static str {
        match self {
            SweepKind::Noise => "NS1,NS2,NS3,bell_phip",
            SweepKind::Qfi => "NS1,NS2",
            SweepKind::Chsh => "NS2",
            SweepKind::Wmqmr => "NS1,NS2,NS3,NS3p,bell_phip,bell_phim,bell_psip,bell_psim",
        }
    }

    fn default_metrics(&self) -> &'static str {
        match self {
            SweepKind::Noise => "fidelity",
            SweepKind::Qfi => "zeta",
            SweepKind::Chsh => "eta",
            SweepKind::Wmqmr => "concurrence",
        }
    }
}

/// How the weak-measurement strengths are chosen, if at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Protection {
    None,
    Caption,
    Fixed(WmQmrParams),
}

/// Fully resolved sweep request.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub channel: ChannelParams,
    pub states: Vec<StateLabel>,
    pub metrics: Vec<Metric>,
    pub reference: StateLabel,
    pub times: Vec<f64>,
    pub protection: Protection,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub state: StateLabel,
    pub metric: String,
    pub value: f64,
}

pub const SWEEP_HEADER: &str = "t,state,metric,value";

/// Default end of the time grid for each channel.
pub fn default_t_stop(channel: &ChannelParams) -> f64 {
    match channel {
        ChannelParams::Rtn(_) => 200.0,
        ChannelParams::Ad(_) => 100.0,
        ChannelParams::Depolarizing { .. } => 1.0,
    }
}

pub fn channel_from_args(a: &SweepArgs) -> Result<ChannelParams> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Invalid(format!("--{name} is required for this channel")));
    Ok(match a.channel {
        ChannelKind::Rtn => ChannelParams::Rtn(RtnParams::new(a.b.unwrap_or(0.05), a.gamma.unwrap_or(0.001))?),
        ChannelKind::Ad => ChannelParams::Ad(AdParams::new(a.g.unwrap_or(0.01), a.gamma.unwrap_or(5.0))?),
        ChannelKind::Depolarizing => ChannelParams::Depolarizing { p: need(a.prob, "prob")? },
    })
}

pub fn plan_from_args(kind: SweepKind, a: &SweepArgs) -> Result<SweepPlan> {
    let channel = channel_from_args(a)?;
    let protection = match (a.wm_p, a.wm_q) {
        (Some(p), Some(q)) => Protection::Fixed(WmQmrParams::from_pq(p, q)?),
        (None, None) if kind == SweepKind::Wmqmr || a.protect => Protection::Caption,
        (None, None) => Protection::None,
        _ => return Err(Error::Invalid("--wm-p and --wm-q must be given together".into())),
    };
    let reference: StateLabel = a.reference.parse()?;
    if !reference.is_bell() {
        return Err(Error::Invalid(format!("reference {reference} is not a Bell state")));
    }
    Ok(SweepPlan {
        states: parse_states(a.states.as_deref().unwrap_or(kind.default_states()))?,
        metrics: parse_metrics(a.metrics.as_deref().unwrap_or(kind.default_metrics()))?,
        reference,
        times: linspace(a.t_start, a.t_stop.unwrap_or_else(|| default_t_stop(&channel)), a.points)?,
        channel,
        protection,
        trials: a.trials,
        seed: a.common.seed,
    })
}

fn caption_set_for(m: Metric) -> CaptionSet {
    match m {
        Metric::Smax | Metric::Eta => CaptionSet::Chsh,
        Metric::TeleFid | Metric::FidDev => CaptionSet::Teleportation,
        _ => CaptionSet::Concurrence,
    }
}

fn params_for(plan: &SweepPlan, label: StateLabel, m: Metric) -> Result<Option<WmQmrParams>> {
    match plan.protection {
        Protection::None => Ok(None),
        Protection::Fixed(p) => Ok(Some(p)),
        Protection::Caption => caption_params(caption_set_for(m), label)
            .map(Some)
            .ok_or_else(|| Error::Invalid(format!("no weak-measurement strengths are tabulated for {label}"))),
    }
}

fn state_at(label: StateLabel, plan: &SweepPlan, t: f64, params: Option<WmQmrParams>) -> Result<(DensityMat, Option<f64>)> {
    let rho0 = DensityMat::from_pure(&label.vector())?;
    let k = plan.channel.kraus(t)?;
    match params {
        None => Ok((evolve_two_qubit(&rho0, &k)?, None)),
        Some(p) => {
            let ps = protected_evolution(&rho0, &k, &p)?;
            Ok((ps.rho_f, Some(ps.p_succ)))
        }
    }
}

fn metric_value(m: Metric, label: StateLabel, rho: &DensityMat, reference: &DensityMat, rng: &mut Rng, trials: usize) -> Result<f64> {
    Ok(match m {
        Metric::Fidelity => fidelity_pure(&label.vector(), rho),
        Metric::Concurrence => concurrence(rho)?,
        Metric::Smax => chsh_smax(rho)?,
        Metric::FbarMax => qfi_cmatrix(rho)?.fbar_max,
        Metric::TeleFid => teleportation_fidelity(rho)?,
        Metric::FidDev => mc_teleport_stats(rho, trials, rng)?.deviation,
        Metric::Zeta => crate::metrics::ratio_zeta(rho, reference)?,
        Metric::Eta => crate::metrics::ratio_eta(rho, reference)?,
    })
}

/// Evaluate every (t, state, metric) of the plan. Protected sweeps also emit
/// a `p_succ` row per state and caption set.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    let root = Rng::new(plan.seed);
    let mut rows = Vec::new();
    for (ti, &t) in plan.times.iter().enumerate() {
        for (si, &label) in plan.states.iter().enumerate() {
            let mut seen_psucc: Vec<Option<WmQmrParams>> = Vec::new();
            for (mi, &m) in plan.metrics.iter().enumerate() {
                let is_ratio = matches!(m, Metric::Zeta | Metric::Eta);
                if is_ratio && label == plan.reference {
                    continue;
                }
                let params = params_for(plan, label, m)?;
                let (rho, p_succ) = state_at(label, plan, t, params)?;
                let reference = if is_ratio {
                    state_at(plan.reference, plan, t, params_for(plan, plan.reference, m)?)?.0
                } else {
                    rho.clone()
                };
                let key = ((ti as u64) << 32) | ((si as u64) << 16) | mi as u64;
                let value = metric_value(m, label, &rho, &reference, &mut root.substream(key), plan.trials)?;
                rows.push(SweepRow { t, state: label, metric: m.as_str().to_string(), value });
                if let Some(ps) = p_succ {
                    if !seen_psucc.contains(&params) {
                        seen_psucc.push(params);
                        rows.push(SweepRow { t, state: label, metric: "p_succ".into(), value: ps });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow], meta: &Metadata) -> String {
    let mut s = meta.csv_header();
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.t, r.state, r.metric, r.value);
    }
    s
}

fn sweep_metadata(kind: SweepKind, plan: &SweepPlan) -> Metadata {
    let mut meta = Metadata::new(kind.name(), plan.seed);
    let ch = serde_json::to_string(&plan.channel).unwrap_or_default();
    meta.push("channel", ch);
    meta.push("markovian", plan.channel.is_markovian());
    meta.push("states", plan.states.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","));
    meta.push("metrics", plan.metrics.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(","));
    meta.push("reference", plan.reference);
    let (a, b) = (plan.times[0], plan.times[plan.times.len() - 1]);
    meta.push("time_grid", format!("{a}:{b}:{}", plan.times.len()));
    meta.push(
        "protection",
        match plan.protection {
            Protection::None => "none".to_string(),
            Protection::Caption => "caption".to_string(),
            Protection::Fixed(p) => format!("p={} q={}", p.w1, p.wr1),
        },
    );
    if plan.metrics.contains(&Metric::FidDev) {
        meta.push("trials", plan.trials);
    }
    meta
}

pub fn cmd_sweep(kind: SweepKind, a: &SweepArgs) -> Result<()> {
    let plan = plan_from_args(kind, a)?;
    let rows = run_sweep(&plan)?;
    emit(&a.common.out, &sweep_csv(&rows, &sweep_metadata(kind, &plan)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_args(extra: &[&str]) -> SweepArgs {
        let mut argv = vec!["negstates", "noise-sweep"];
        argv.extend(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::NoiseSweep(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1).unwrap(), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_err());
        assert!(linspace(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn config_parsing() {
        let (sub, args) = config_to_args("# preset\nsubcommand=qfi\nchannel = ad\nt_stop=50\nprotect=true\nmitigate=false\n").unwrap();
        assert_eq!(sub.as_deref(), Some("qfi"));
        assert_eq!(args, vec!["--channel", "ad", "--t-stop", "50", "--protect"]);
        assert!(config_to_args("oops").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        fs::write(&p, "points=7\nseed=3\n").unwrap();
        let argv: Vec<String> =
            ["negstates", "noise-sweep", "--config", p.to_str().unwrap(), "--points", "9"].iter().map(|s| s.to_string()).collect();
        let cli = Cli::try_parse_from(expand_args(argv).unwrap()).unwrap();
        match cli.command {
            Command::NoiseSweep(a) => {
                assert_eq!(a.points, 9);
                assert_eq!(a.common.seed, 3);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn config_supplies_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        fs::write(&p, "subcommand=census\nq=2\n").unwrap();
        let argv: Vec<String> = ["negstates", "--config", p.to_str().unwrap()].iter().map(|s| s.to_string()).collect();
        match Cli::try_parse_from(expand_args(argv).unwrap()).unwrap().command {
            Command::Census(a) => assert_eq!(a.q, 2),
            _ => panic!(),
        }
    }

    #[test]
    fn census_buckets() {
        let csv = census_csv(1, 1, &Metadata::new("census", 0)).unwrap();
        let mut counts: Vec<usize> =
            csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("lambda")).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        counts.sort();
        assert_eq!(counts, vec![320, 320, 384]);
        assert!(csv.starts_with("# version="));
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::OutOfRange { name: "p", value: 2.0 }), 2);
        assert_eq!(exit_code(&Error::NoConvergence(3)), 1);
        assert_eq!(exit_code(&Error::SingularConfusion(1e9)), 1);
    }

    #[test]
    fn unknown_state_is_a_config_error() {
        let a = sweep_args(&["--states", "NS9"]);
        let e = plan_from_args(SweepKind::Noise, &a).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }

    #[test]
    fn sweep_rows_and_ratios() {
        let a = sweep_args(&["--states", "NS2,bell_phip", "--metrics", "fidelity,eta", "--points", "3"]);
        let plan = plan_from_args(SweepKind::Noise, &a).unwrap();
        let rows = run_sweep(&plan).unwrap();
        // fidelity for both, eta only for NS2
        assert_eq!(rows.len(), 3 * 3);
        let f0: Vec<_> = rows.iter().filter(|r| r.t == 0.0 && r.metric == "fidelity").collect();
        assert!(f0.iter().all(|r| (r.value - 1.0).abs() < 1e-9));
        let eta0 = rows.iter().find(|r| r.t == 0.0 && r.metric == "eta").unwrap();
        let ns2 = DensityMat::from_pure(&StateLabel::Ns2.vector()).unwrap();
        assert!((eta0.value - chsh_smax(&ns2).unwrap() / (2.0 * 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn protected_sweep_emits_success_probability() {
        let a = sweep_args(&["--states", "NS2", "--metrics", "concurrence", "--points", "2", "--protect"]);
        let rows = run_sweep(&plan_from_args(SweepKind::Noise, &a).unwrap()).unwrap();
        assert_eq!(rows.iter().filter(|r| r.metric == "p_succ").count(), 2);
        let a = sweep_args(&["--states", "NS3pp", "--protect", "--points", "2"]);
        assert!(run_sweep(&plan_from_args(SweepKind::Noise, &a).unwrap()).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = sweep_args(&["--states", "NS1", "--metrics", "fid_dev", "--points", "2", "--trials", "50", "--seed", "5"]);
        let plan = plan_from_args(SweepKind::Noise, &a).unwrap();
        let m = sweep_metadata(SweepKind::Noise, &plan);
        assert_eq!(sweep_csv(&run_sweep(&plan).unwrap(), &m), sweep_csv(&run_sweep(&plan).unwrap(), &m));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.csv");
        write_atomic(&p, "a").unwrap();
        write_atomic(&p, "b").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
