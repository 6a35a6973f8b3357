//! The `entpower` command line.
//!
//! Every command is a deterministic function of its flags: random draws come
//! from keyed streams under `--seed` (default [`DEFAULT_SEED`]), and
//! `--workers` only sizes the thread pool.
//!
//! Exit codes: 0 on success, 1 when an invariant or the certificate fails,
//! 2 on a usage error (bad flags, malformed gate spec, unwritable output).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::capacity::{
    delta_entanglement, disentangling_power, entangling_power, entangling_power_product_ansatz, maximally_entangled,
    CapacityEstimate, OptimizerConfig,
};
use crate::certify::{certify, Certificate, FORCED_TOL, RESIDUAL_FLOOR};
use crate::entropy::entanglement;
use crate::error::Error;
use crate::gates::{build_u2x3, canonical_two_qubit, swap_gate, two_ebit_input, BipartiteGate, GateData, TwoQubitCanonical};
use crate::haar::{
    expected_entanglement_bound, haar_gate, mean_purity_experiment, scatter_experiment, MomentReport, ScatterRecord,
    ScatterSummary,
};
use crate::rng::{stream, Purpose, DEFAULT_SEED};
use crate::tensor::{Dims, PureState};

const LOWER_BOUND_NOTE: &str = "values are lower bounds on E_up/E_down for the stated ancilla dimensions: \
the search may miss the global maximum and larger ancillas may do better";

/// Output format.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// A pair written `AxB`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DimPair(pub usize, pub usize);

impl FromStr for DimPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got '{s}'"))?;
        Ok(Self(positive(a)?, positive(b)?))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got '{s}'")),
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

/// Which gate to analyse.
#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec {
    U2x3,
    U2x3Dagger,
    /// `swap:d`
    Swap(usize),
    /// `canonical:α,β,γ`
    Canonical(TwoQubitCanonical),
    /// `haar:AxB`, drawn from the stream `(seed, HaarGate, 0)`.
    Haar(DimPair),
    /// `json:PATH`, a serialized gate checked for unitarity on load.
    Json(PathBuf),
}

impl FromStr for GateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("u2x3", None) => Ok(Self::U2x3),
            ("u2x3_dagger", None) => Ok(Self::U2x3Dagger),
            ("swap", Some(d)) => Ok(Self::Swap(positive(d)?)),
            ("canonical", Some(angles)) => {
                let v: Vec<f64> = angles
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad angle '{x}'")))
                    .collect::<Result<_, _>>()?;
                match v.as_slice() {
                    &[alpha, beta, gamma] if v.iter().all(|x| x.is_finite()) => {
                        Ok(Self::Canonical(TwoQubitCanonical { alpha, beta, gamma }))
                    }
                    _ => Err(format!("canonical needs three finite angles, got '{angles}'")),
                }
            }
            ("haar", Some(dims)) => Ok(Self::Haar(dims.parse()?)),
            ("json", Some(path)) if !path.is_empty() => Ok(Self::Json(PathBuf::from(path))),
            _ => Err(format!(
                "unknown gate '{s}'; expected u2x3, u2x3_dagger, swap:d, canonical:a,b,g, haar:AxB or json:PATH"
            )),
        }
    }
}

impl GateSpec {
    pub fn build(&self, seed: u64) -> Result<BipartiteGate, CliError> {
        Ok(match self {
            Self::U2x3 => build_u2x3(),
            Self::U2x3Dagger => build_u2x3().adjoint(),
            Self::Swap(d) => swap_gate(*d),
            Self::Canonical(p) => canonical_two_qubit(*p),
            Self::Haar(DimPair(a, b)) => haar_gate(*a, *b, &mut stream(seed, Purpose::HaarGate, 0)),
            Self::Json(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let data: GateData = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("malformed gate file {}: {e}", path.display())))?;
                BipartiteGate::try_from(data).map_err(CliError::from)?
            }
        })
    }
}

#[derive(Parser, Debug)]
#[command(name = "entpower", version, about = "Entangling and disentangling power of bipartite gates")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; never changes the results.
    #[arg(long, global = true, value_parser = positive)]
    pub workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format (default: csv for scatter, text otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct OptimizerArgs {
    /// Independent ascent restarts.
    #[arg(long, value_parser = positive)]
    pub restarts: Option<usize>,
    /// Iteration cap per restart.
    #[arg(long, value_parser = positive)]
    pub max_iters: Option<usize>,
    /// Stop once the tangent gradient norm drops below this.
    #[arg(long, value_parser = positive_real)]
    pub grad_tol: Option<f64>,
}

impl OptimizerArgs {
    fn config(&self, base: OptimizerConfig, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts.unwrap_or(base.restarts),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            grad_tol: self.grad_tol.unwrap_or(base.grad_tol),
            seed,
            ..base
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate E_up and E_down of one gate.
    Capacity {
        #[arg(long, default_value = "u2x3")]
        gate: GateSpec,
        /// Ancilla dimensions; defaults to the gate's own (A, B).
        #[arg(long)]
        anc: Option<DimPair>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// E_up and E_down for a batch of Haar-random gates (CSV).
    Scatter {
        #[arg(long, default_value = "2x3")]
        dims: DimPair,
        /// Number of gates.
        #[arg(long, default_value_t = 1000, value_parser = positive)]
        samples: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Mean output purity of Haar gates against its exact value.
    Purity {
        #[arg(long, default_value = "2x3")]
        dims: DimPair,
        #[arg(long, default_value_t = 100_000, value_parser = positive)]
        samples: usize,
    },
    /// Certificate that U2x3 cannot disentangle two ebits.
    Certify {
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Reproduce the reference values; nonzero exit on any failure.
    Selftest {
        /// Smaller sample sizes and restart counts.
        #[arg(long)]
        quick: bool,
    },
}

/// How a command failed.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Failure(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidSubsystems(_) | Error::DimensionMismatch(_) | Error::OutOfRange(_) => {
                Self::Usage(e.to_string())
            }
            _ => Self::Failure(e.to_string()),
        }
    }
}

/// A number with 9 significant digits in plain decimal notation.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `index,e_up,e_down` rows with LF endings.
pub fn scatter_csv(records: &[ScatterRecord]) -> String {
    let mut s = String::from("index,e_up,e_down\n");
    for r in records {
        let _ = writeln!(s, "{},{},{}", r.index, format_sig9(r.e_up.0), format_sig9(r.e_down.0));
    }
    s
}

/// Where the report goes. The file is created before any work starts so an
/// unwritable path fails fast.
enum Sink {
    Stdout,
    File(File),
}

impl Sink {
    fn open(path: &Option<PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::Stdout),
            Some(p) => File::create(p)
                .map(Self::File)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        }
    }

    fn write(&mut self, text: &str) -> Result<(), CliError> {
        let res = match self {
            Self::Stdout => io::stdout().write_all(text.as_bytes()),
            Self::File(f) => f.write_all(text.as_bytes()),
        };
        res.map_err(|e| CliError::Usage(format!("write failed: {e}")))
    }

    fn is_stdout(&self) -> bool {
        matches!(self, Self::Stdout)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Failure(m) => eprintln!("FAIL: {m}"),
            }
            e.exit_code()
        }
    }
}

/// Runs a parsed configuration, inside a dedicated pool when `--workers` is set.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.workers {
        None => dispatch(cfg),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| dispatch(cfg))
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.command {
        Command::Capacity { gate, anc, opt } => cmd_capacity(cfg, gate, *anc, opt),
        Command::Scatter { dims, samples, opt } => cmd_scatter(cfg, *dims, *samples, opt),
        Command::Purity { dims, samples } => cmd_purity(cfg, *dims, *samples),
        Command::Certify { opt } => cmd_certify(cfg, opt),
        Command::Selftest { quick } => cmd_selftest(cfg, *quick),
    }
}

/// JSON form of the capacity report.
#[derive(Serialize)]
pub struct CapacityReport {
    pub gate: String,
    pub anc: (usize, usize),
    pub e_up: CapacityEstimate,
    pub e_down: CapacityEstimate,
    pub note: &'static str,
}

fn quantiles(values: &[f64]) -> (f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    (v[0], v[v.len() / 2], v[v.len() - 1])
}

fn describe_estimate(name: &str, e: &CapacityEstimate) -> String {
    let (lo, med, hi) = quantiles(&e.per_restart_values);
    format!(
        "{name:<6} >= {:.9} ebits  (best restart {}, converged {}, iterations {}, |grad| {:.2e})\n\
         {:<6}    restarts {}: min {:.9}, median {:.9}, max {:.9}; {} met the gradient tolerance\n",
        e.value.0,
        e.best_restart,
        if e.converged { "yes" } else { "no" },
        e.iterations_used,
        e.grad_norm,
        "",
        e.per_restart_values.len(),
        lo,
        med,
        hi,
        e.converged_restarts(),
    )
}

fn cmd_capacity(cfg: &RunConfig, spec: &GateSpec, anc: Option<DimPair>, opt: &OptimizerArgs) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Text);
    let mut sink = Sink::open(&cfg.out)?;
    let gate = spec.build(cfg.seed)?;
    let anc = anc.map(|DimPair(a, b)| (a, b)).unwrap_or((gate.dim_a(), gate.dim_b()));
    let opt_cfg = opt.config(OptimizerConfig::default(), cfg.seed);
    let up = entangling_power(&gate, anc, &opt_cfg)?;
    let down = disentangling_power(&gate, anc, &opt_cfg)?;

    let cap = gate.max_entanglement_change() + 1e-6;
    for (name, e) in [("E_up", &up), ("E_down", &down)] {
        if e.value.0 > cap {
            return Err(CliError::Failure(format!("{name} = {} exceeds 2 log2 min(A, B) = {cap}", e.value.0)));
        }
    }

    let label = gate_label(spec);
    let report = match format {
        Format::Text => {
            let mut s = format!(
                "gate {label} on {}x{}, ancillas ({}, {}), seed {}\n",
                gate.dim_a(),
                gate.dim_b(),
                anc.0,
                anc.1,
                cfg.seed
            );
            s += &describe_estimate("E_up", &up);
            s += &describe_estimate("E_down", &down);
            s += &format!("note: {LOWER_BOUND_NOTE}\n");
            s
        }
        Format::Json => to_json(&CapacityReport { gate: label, anc, e_up: up, e_down: down, note: LOWER_BOUND_NOTE }),
        Format::Csv => {
            let mut s = String::from("restart,e_up,e_down,converged_up,converged_down\n");
            for i in 0..up.per_restart_values.len() {
                let _ = writeln!(
                    s,
                    "{i},{},{},{},{}",
                    format_sig9(up.per_restart_values[i]),
                    format_sig9(down.per_restart_values[i]),
                    up.per_restart_converged[i],
                    down.per_restart_converged[i]
                );
            }
            if !sink.is_stdout() {
                println!("E_up >= {:.9}, E_down >= {:.9}; note: {LOWER_BOUND_NOTE}", up.value.0, down.value.0);
            }
            s
        }
    };
    sink.write(&report)
}

fn gate_label(spec: &GateSpec) -> String {
    match spec {
        GateSpec::U2x3 => "u2x3".into(),
        GateSpec::U2x3Dagger => "u2x3_dagger".into(),
        GateSpec::Swap(d) => format!("swap:{d}"),
        GateSpec::Canonical(p) => format!("canonical:{},{},{}", p.alpha, p.beta, p.gamma),
        GateSpec::Haar(DimPair(a, b)) => format!("haar:{a}x{b}"),
        GateSpec::Json(p) => format!("json:{}", p.display()),
    }
}

/// JSON form of the scatter output.
#[derive(Serialize)]
pub struct ScatterReport {
    pub records: Vec<ScatterRecord>,
    pub summary: ScatterSummary,
}

fn summary_line(s: &ScatterSummary) -> String {
    format!(
        "gates {}, max gap (e_up - e_down) {:.6}, max |gap| {:.6}, mean e_up {:.6} +/- {:.6}, mean e_down {:.6} +/- {:.6}",
        s.gates, s.max_gap, s.max_abs_gap, s.mean_up, s.std_error_up, s.mean_down, s.std_error_down
    )
}

fn cmd_scatter(cfg: &RunConfig, dims: DimPair, samples: usize, opt: &OptimizerArgs) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Csv);
    let mut sink = Sink::open(&cfg.out)?;
    let opt_cfg = opt.config(OptimizerConfig::scatter(), cfg.seed);
    let records = scatter_experiment(dims.0, dims.1, samples, &opt_cfg, cfg.seed)?;
    let summary = ScatterSummary::from_records(&records);

    let cap = 2.0 * (dims.0.min(dims.1) as f64).log2() + 1e-6;
    if let Some(r) = records.iter().find(|r| r.e_up.0 > cap || r.e_down.0 > cap) {
        return Err(CliError::Failure(format!("gate {} exceeds 2 log2 min(A, B): {:?}", r.index, r)));
    }

    let line = summary_line(&summary);
    let report = match format {
        Format::Csv => scatter_csv(&records),
        Format::Json => to_json(&ScatterReport { records, summary }),
        Format::Text => format!("{line}\n"),
    };
    sink.write(&report)?;
    if format != Format::Text {
        if sink.is_stdout() {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    Ok(())
}

fn cmd_purity(cfg: &RunConfig, dims: DimPair, samples: usize) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Text);
    let mut sink = Sink::open(&cfg.out)?;
    let rep = mean_purity_experiment(dims.0, dims.1, samples, cfg.seed)?;
    let z = rep.z_score();
    let report = match format {
        Format::Text => format!(
            "dims {}x{}, samples {}\nmean purity {:.9} +/- {:.3e}\nprediction  {:.9}  ((A^2+B^2-2)/(A^2B^2-1))\nz-score {:.3}\n",
            rep.dims.0, rep.dims.1, rep.samples, rep.mean_purity, rep.std_error, rep.predicted_purity, z
        ),
        Format::Json => to_json(&rep),
        Format::Csv => format!(
            "dim_a,dim_b,samples,mean_purity,predicted_purity,std_error,z_score\n{},{},{},{},{},{},{}\n",
            rep.dims.0,
            rep.dims.1,
            rep.samples,
            format_sig9(rep.mean_purity),
            format_sig9(rep.predicted_purity),
            format_sig9(rep.std_error),
            format_sig9(z)
        ),
    };
    sink.write(&report)?;
    check_purity(&rep)
}

fn check_purity(rep: &MomentReport) -> Result<(), CliError> {
    let z = rep.z_score();
    if z.abs() > 4.0 {
        return Err(CliError::Failure(format!("mean purity is {z:.2} standard errors from the prediction")));
    }
    Ok(())
}

fn certificate_text(c: &Certificate) -> String {
    let mut s = String::from("forced constraints on the witness triple:\n");
    for r in &c.forced.rows {
        let _ = writeln!(
            s,
            "  {:<16} expected {:>+.9}{:+.9}i  found {:>+.9}{:+.9}i  deviation {:.2e}",
            r.name, r.expected.re, r.expected.im, r.found.re, r.found.im, r.deviation
        );
    }
    let p = c.forced.phi00_phi11;
    let _ = writeln!(s, "<Phi00|Phi11> = {:.6}{:+.6}i (nonzero, so the four states cannot be orthonormal)", p.re, p.im);
    let _ = writeln!(s, "minimum Gram residual ||G - I||_F = {:.9} (threshold {RESIDUAL_FLOOR})", c.minimum.residual);
    let _ = writeln!(s, "achieved at tau:");
    for (k, t) in c.minimum.tau.taus().iter().enumerate() {
        let parts: Vec<String> = t.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
        let _ = writeln!(s, "  tau{k} = ({})", parts.join(", "));
    }
    let _ = writeln!(s, "{}", if c.passed { "PASS" } else { "FAIL" });
    s
}

fn cmd_certify(cfg: &RunConfig, opt: &OptimizerArgs) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Text);
    if format == Format::Csv {
        return Err(CliError::Usage("certify reports are text or json".into()));
    }
    let mut sink = Sink::open(&cfg.out)?;
    let cert = certify(&opt.config(OptimizerConfig::default(), cfg.seed))?;
    let report = match format {
        Format::Json => to_json(&cert),
        _ => certificate_text(&cert),
    };
    sink.write(&report)?;
    if !cert.passed {
        return Err(CliError::Failure(format!(
            "certificate failed: <Phi00|Phi11> = {}, minimum residual {}",
            cert.forced.phi00_phi11, cert.minimum.residual
        )));
    }
    Ok(())
}

/// One reference check run by `selftest`.
#[derive(Clone, Debug, Serialize)]
pub struct SelfTestCase {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn case(name: &str, passed: bool, detail: String) -> SelfTestCase {
    SelfTestCase { name: name.to_string(), passed, detail }
}

/// The reference values, at full or reduced size.
pub fn selftest_cases(seed: u64, quick: bool) -> Result<Vec<SelfTestCase>, CliError> {
    let mut out = Vec::new();
    let restarts = if quick { 16 } else { 64 };
    let cap_cfg = OptimizerConfig::default().with_seed(seed).with_restarts(restarts);
    let u = build_u2x3();

    let input = two_ebit_input();
    let e_in = entanglement(&input)?.0;
    let e_out = entanglement(&input.apply_gate(&u)?)?.0;
    out.push(case(
        "two-ebit witness",
        e_in.abs() < 1e-9 && (e_out - 2.0).abs() < 1e-9,
        format!("E(in) = {e_in:.3e}, E(U in) = {e_out:.12}"),
    ));
    let d = delta_entanglement(&u, &input)?;
    out.push(case("delta E of U2x3 on the witness", (d - 2.0).abs() < 1e-9, format!("{d:.12}")));

    let swap = swap_gate(2);
    let product = PureState::product(Dims::new(1, 2, 2, 1)?, &[1.0.into(), 0.0.into()], &[0.6.into(), 0.8.into()])?;
    let d0 = delta_entanglement(&swap, &product)?;
    out.push(case("SWAP without ancillas on a product state", d0.abs() < 1e-9, format!("{d0:.3e}")));
    let bells = PureState::product(Dims::new(2, 2, 2, 2)?, &maximally_entangled(2), &maximally_entangled(2))?;
    let d2 = delta_entanglement(&swap, &bells)?;
    out.push(case("SWAP on two local Bell pairs", (d2 - 2.0).abs() < 1e-9, format!("{d2:.12}")));

    let up = entangling_power(&u, (2, 3), &cap_cfg)?.value.0;
    out.push(case("E_up(U2x3) >= 2 - 1e-6", up >= 2.0 - 1e-6, format!("{up:.9}")));
    let down = disentangling_power(&u, (2, 3), &cap_cfg)?.value.0;
    out.push(case("E_down(U2x3) in [1.92, 1.96]", (1.92..=1.96).contains(&down), format!("{down:.9}")));
    let s_up = entangling_power(&swap, (2, 2), &cap_cfg)?.value.0;
    let s_down = disentangling_power(&swap, (2, 2), &cap_cfg)?.value.0;
    out.push(case(
        "E_up(SWAP) = E_down(SWAP) >= 2 - 1e-6",
        s_up >= 2.0 - 1e-6 && s_down >= 2.0 - 1e-6,
        format!("{s_up:.9}, {s_down:.9}"),
    ));
    let p_up = entangling_power_product_ansatz(&u, &cap_cfg)?.value.0;
    out.push(case("product ansatz on U2x3 >= 2 - 1e-6", p_up >= 2.0 - 1e-6, format!("{p_up:.9}")));
    let p_down = entangling_power_product_ansatz(&u.adjoint(), &cap_cfg)?.value.0;
    out.push(case("product ansatz on U2x3^dagger < 2 - 0.03", p_down < 2.0 - 0.03, format!("{p_down:.9}")));

    let n_canonical = if quick { 2 } else { 5 };
    let mut worst: f64 = 0.0;
    let mut rng = stream(seed, Purpose::TestData, 1);
    for _ in 0..n_canonical {
        use rand::Rng;
        let p = TwoQubitCanonical {
            alpha: rng.random_range(-1.6..1.6),
            beta: rng.random_range(-1.6..1.6),
            gamma: rng.random_range(-1.6..1.6),
        };
        let g = canonical_two_qubit(p);
        let a = entangling_power(&g, (2, 2), &cap_cfg)?.value.0;
        let b = disentangling_power(&g, (2, 2), &cap_cfg)?.value.0;
        worst = worst.max((a - b).abs());
    }
    out.push(case("two-qubit |E_up - E_down| <= 2e-3", worst <= 2e-3, format!("worst {worst:.3e} over {n_canonical} gates")));

    let samples = if quick { 10_000 } else { 100_000 };
    for (a, b) in [(2, 3), (2, 2), (3, 3)] {
        let rep = mean_purity_experiment(a, b, samples, seed)?;
        let z = rep.z_score();
        out.push(case(
            &format!("mean purity at {a}x{b}"),
            z.abs() <= 4.0,
            format!("{:.6} vs {:.6}, z = {z:.2}", rep.mean_purity, rep.predicted_purity),
        ));
    }

    let b23 = expected_entanglement_bound(2, 3)?.0;
    let b2100 = expected_entanglement_bound(2, 100)?.0;
    out.push(case(
        "entanglement bound values",
        (b23 - 1.3587).abs() < 2e-4 && (b2100 - 1.99942).abs() < 1e-5,
        format!("(2,3): {b23:.6}, (2,100): {b2100:.6}"),
    ));

    let n23 = if quick { 50 } else { 1000 };
    let recs = scatter_experiment(2, 3, n23, &OptimizerConfig::scatter(), seed)?;
    let s = ScatterSummary::from_records(&recs);
    let all_capped = recs.iter().all(|r| r.e_up.0 <= 2.0 + 1e-6 && r.e_down.0 <= 2.0 + 1e-6);
    out.push(case("scatter 2x3 max gap <= 0.14", s.max_gap <= 0.14, format!("{:.6} over {n23} gates", s.max_gap)));
    out.push(case("scatter 2x3 values <= 2", all_capped, String::new()));
    out.push(case(
        "scatter 2x3 mean e_up above the entanglement bound",
        s.mean_up > b23 - 4.0 * s.std_error_up,
        format!("{:.6} vs {b23:.6}", s.mean_up),
    ));
    let n22 = if quick { 20 } else { 200 };
    let recs22 = scatter_experiment(2, 2, n22, &OptimizerConfig::scatter(), seed)?;
    let worst22 = ScatterSummary::from_records(&recs22).max_abs_gap;
    out.push(case("scatter 2x2 |gap| <= 5e-3", worst22 <= 5e-3, format!("{worst22:.3e} over {n22} gates")));

    let cert = certify(&OptimizerConfig::default().with_seed(seed))?;
    let p = cert.forced.phi00_phi11;
    out.push(case(
        "forced constraints and <Phi00|Phi11> = 2/3",
        cert.forced.rows.iter().all(|r| r.holds()) && (p - crate::C64::new(2.0 / 3.0, 0.0)).norm() <= FORCED_TOL,
        format!("{:.9}{:+.9}i", p.re, p.im),
    ));
    out.push(case(
        "minimum Gram residual > 0.05",
        cert.minimum.residual > RESIDUAL_FLOOR,
        format!("{:.9}", cert.minimum.residual),
    ));
    Ok(out)
}

fn cmd_selftest(cfg: &RunConfig, quick: bool) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Text);
    if format == Format::Csv {
        return Err(CliError::Usage("selftest reports are text or json".into()));
    }
    let mut sink = Sink::open(&cfg.out)?;
    let cases = selftest_cases(cfg.seed, quick)?;
    let report = match format {
        Format::Json => to_json(&cases),
        _ => {
            let mut s = String::new();
            for c in &cases {
                let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            s
        }
    };
    sink.write(&report)?;
    let failed = cases.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} of {} reference checks failed", cases.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_specs_parse() {
        assert_eq!("u2x3".parse::<GateSpec>(), Ok(GateSpec::U2x3));
        assert_eq!("swap:3".parse::<GateSpec>(), Ok(GateSpec::Swap(3)));
        assert_eq!("haar:2x3".parse::<GateSpec>(), Ok(GateSpec::Haar(DimPair(2, 3))));
        assert!(matches!("canonical:0,0.5,1".parse::<GateSpec>(), Ok(GateSpec::Canonical(_))));
        for bad in ["swap:0", "swap", "canonical:1,2", "haar:2", "cnot", "json:"] {
            assert!(bad.parse::<GateSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(1.939363611557), "1.93936361");
        assert_eq!(format_sig9(2.0), "2.00000000");
        assert_eq!(format_sig9(0.0), "0.00000000");
        assert_eq!(format_sig9(-0.0), "0.00000000");
        assert_eq!(format_sig9(0.0123456789012), "0.0123456789");
        assert_eq!(format_sig9(9.9999999996), "10.0000000");
        assert_eq!(format_sig9(123456789.4), "123456789");
    }

    #[test]
    fn csv_layout() {
        use crate::entropy::Ebits;
        let csv = scatter_csv(&[ScatterRecord { index: 0, e_up: Ebits(1.5), e_down: Ebits(1.25) }]);
        assert_eq!(csv, "index,e_up,e_down\n0,1.50000000,1.25000000\n");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_from_args(["entpower", "capacity", "--gate", "bogus"]), 2);
        assert_eq!(run_from_args(["entpower", "frobnicate"]), 2);
        assert_eq!(run_from_args(["entpower", "purity", "--samples", "0"]), 2);
        assert_eq!(run_from_args(["entpower", "purity", "--samples", "50"]), 2);
    }
}
