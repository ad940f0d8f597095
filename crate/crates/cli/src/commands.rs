use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use greedylab_core::constructions::{
    build_admissible, build_h, build_h0, discontinuity_witness, leibniz_check, ConstructionError, H0Output, H0Params,
    LeibnizData, DEFAULT_TAIL_END,
};
use greedylab_core::envelope::{envelope_interval, CombinedSpace, EnvelopeConfig, EnvelopeError, Generator};
use greedylab_core::greedy::{all_greedy_sets, greedy_sets_of_size, GreedyError};
use greedylab_core::norms::{democracy_profile, DemocracyError, DemocracySpace, NormSpec, NormSpecError};
use greedylab_core::verify::{alternating_indicator, run_suite, CorpusSpec, SuiteReport, VerifyError, SUITE_IDS};
use greedylab_core::{FinSeq, Gauge, IndexSet, IntInterval, NormValue, Scalar, SpaceSpec};
use serde_json::json;

use crate::seqfile::{self, Encoding};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Flags(String),
    #[error("{0}")]
    Cap(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("{0}")]
    Construction(String),
    /// Carries the reports so they still reach stdout.
    #[error("{failed} of {total} suites failed")]
    VerifyFailed { failed: usize, total: usize, payload: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Flags(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Infeasible => 5,
            CliError::Construction(_) => 6,
        }
    }
}

impl From<NormSpecError> for CliError {
    fn from(e: NormSpecError) -> Self {
        CliError::Flags(e.to_string())
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        CliError::Construction(e.to_string())
    }
}

impl From<EnvelopeError> for CliError {
    fn from(e: EnvelopeError) -> Self {
        match e {
            EnvelopeError::Infeasible => CliError::Infeasible,
            EnvelopeError::IterationCap { .. } => CliError::Cap(e.to_string()),
            other => CliError::Flags(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "greedylab", version, about = "Exact greedy-algorithm norms, envelopes and constructions")]
pub struct Cli {
    /// Worker threads for the parallel parts.
    #[arg(long, global = true, env = "GREEDYLAB_THREADS")]
    pub threads: Option<usize>,
    /// Append decimal approximations (not authoritative).
    #[arg(long, global = true)]
    pub float: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a norm of a sequence file.
    Norm(NormArgs),
    /// List greedy sets of a sequence.
    Greedy(GreedyArgs),
    /// Certified bounds for the convexified norm.
    Envelope(EnvelopeArgs),
    /// Write one of the standard constructions.
    Construct(ConstructArgs),
    /// Run property suites.
    Verify(VerifyArgs),
    /// Democracy profile as CSV.
    Democracy(DemocracyArgs),
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Sequence file, or `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// l1, linf, lorentz:Q, lorentz:inf, B, A, B-comb or A-comb.
    #[arg(long)]
    pub which: String,
    /// Ambient space for the combined norms.
    #[arg(long)]
    pub space: Option<SpaceSpec>,
    /// Also evaluate by brute-force enumeration.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct GreedyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Only sets of this size.
    #[arg(long)]
    pub size: Option<usize>,
    /// Refuse to list more than this many sets.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DictChoice {
    #[value(name = "cyclic:harmonic")]
    CyclicHarmonic,
    Coords,
    Auto,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// A sequence file, `indicator:M` or `alt-indicator:M`.
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value = "lorentz:inf")]
    pub space: SpaceSpec,
    #[arg(long, default_value = "B")]
    pub which: String,
    #[arg(long, value_enum, default_value_t = DictChoice::Auto)]
    pub dict: DictChoice,
    /// Write the certificates here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    H0,
    H,
    #[value(name = "G")]
    G,
    Leibniz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetChoice {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, value_enum, default_value_t = PresetChoice::A)]
    pub preset: PresetChoice,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Parameter of `G`, or the block target for `leibniz`.
    #[arg(long)]
    pub t: Option<Scalar>,
    /// Tail end for `G`; support length of the harmonic input for `leibniz`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sequence output; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metadata output, overriding the default location.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Encoding::Lines)]
    pub format: Encoding,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite id, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One JSON report per line; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemocracyArgs {
    /// B, A, B-comb or A-comb; the bare space when absent.
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long)]
    pub space: Option<SpaceSpec>,
    #[arg(long)]
    pub m_max: usize,
    /// Index window; defaults to `m_max`.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Exact text of a norm value: `p/q`, or `p/q ^(1/q)` for a root.
pub fn format_value(v: &NormValue) -> String {
    match v {
        NormValue::Exact(x) => x.to_string(),
        NormValue::QthPower { power, q } => format!("{power} ^(1/{q})"),
        NormValue::Shifted { power, q, offset } => format!("{power} ^(1/{q}) + {offset}"),
    }
}

fn with_float(text: String, approx: f64, float: bool) -> String {
    if float {
        format!("{text} (~{approx:.6})")
    } else {
        text
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_seq(path: &Path) -> Result<FinSeq, CliError> {
    seqfile::parse(&read_text(path)?).map_err(|e| CliError::Parse(e.to_string()))
}

fn gauge_of(which: &str) -> Result<Gauge, CliError> {
    match which {
        "B" => Ok(Gauge::B),
        "A" => Ok(Gauge::A),
        other => Err(CliError::Flags(format!("unknown gauge {other:?} (expected B or A)"))),
    }
}

/// Runs one command, returning the stdout payload.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Norm(args) => norm(args, cli.float),
        Command::Greedy(args) => greedy(args),
        Command::Envelope(args) => envelope(args, cli.float),
        Command::Construct(args) => construct(args),
        Command::Verify(args) => verify(args),
        Command::Democracy(args) => democracy(args),
    }
}

fn norm(args: &NormArgs, float: bool) -> Result<String, CliError> {
    let spec = NormSpec::parse(&args.which, args.space)?;
    let f = read_seq(&args.input)?;
    let value = spec.eval(&f);
    let mut out = with_float(format_value(&value), value.to_f64(), float) + "\n";
    if args.oracle {
        let oracle = spec
            .eval_oracle(&f)
            .map_err(|e| CliError::Cap(e.to_string()))?
            .ok_or_else(|| CliError::Flags(format!("no oracle for {}", args.which)))?;
        let verdict = if oracle == value { "AGREE" } else { "DISAGREE" };
        out += &format!("oracle {} {verdict}\n", format_value(&oracle));
    }
    Ok(out)
}

fn greedy(args: &GreedyArgs) -> Result<String, CliError> {
    let f = read_seq(&args.input)?;
    let sets: Vec<IndexSet> = match args.size {
        Some(m) => greedy_sets_of_size(&f, m).and_then(|s| s.materialize(args.cap)).map_err(|e| match e {
            GreedyError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Flags(other.to_string()),
        })?,
        None => {
            let sets: Vec<IndexSet> = all_greedy_sets(&f).take(args.cap + 1).collect();
            if sets.len() > args.cap {
                return Err(CliError::Cap(format!("more than {} greedy sets", args.cap)));
            }
            sets
        }
    };
    Ok(sets.iter().map(|s| serde_json::to_string(s).expect("sets serialize") + "\n").collect())
}

fn envelope_target(target: &str) -> Result<FinSeq, CliError> {
    let size = |rest: &str| -> Result<usize, CliError> {
        match rest.parse::<usize>() {
            Ok(m) if m >= 1 => Ok(m),
            _ => Err(CliError::Flags(format!("bad size in target {target:?}"))),
        }
    };
    if let Some(rest) = target.strip_prefix("indicator:") {
        Ok(FinSeq::indicator(&IndexSet::range(1, size(rest)?)))
    } else if let Some(rest) = target.strip_prefix("alt-indicator:") {
        Ok(alternating_indicator(size(rest)?))
    } else {
        read_seq(Path::new(target))
    }
}

fn envelope(args: &EnvelopeArgs, float: bool) -> Result<String, CliError> {
    let f = envelope_target(&args.target)?;
    let space = CombinedSpace::new(gauge_of(&args.which)?, args.space);
    let cyclic = Generator::Cyclic { m: None, seed: None };
    let generators = match args.dict {
        DictChoice::CyclicHarmonic => vec![cyclic],
        DictChoice::Coords => vec![Generator::Coordinates],
        DictChoice::Auto => vec![Generator::Coordinates, Generator::IntervalPieces, cyclic],
    };
    let bound = envelope_interval(&f, space, &EnvelopeConfig::with_generators(generators))?;
    let line = format!("{} {}", bound.lower, format_value(&bound.upper));
    let approx = format!("{:.6} {:.6}", bound.lower.to_f64(), bound.upper.to_f64());
    let mut out = if float { format!("{line} (~{approx})\n") } else { line + "\n" };
    let report = serde_json::to_string_pretty(&bound).expect("bounds serialize") + "\n";
    match &args.report {
        Some(path) => write_file(path, &report)?,
        None => out += &report,
    }
    Ok(out)
}

fn h0_params(args: &ConstructArgs) -> H0Params {
    match args.preset {
        PresetChoice::A => H0Params::preset_a(args.depth),
        PresetChoice::B => H0Params::preset_b(args.depth),
    }
}

fn h0_metadata(out: &H0Output, args: &ConstructArgs) -> serde_json::Value {
    let params = &out.params;
    let blocks: Vec<serde_json::Value> = (1..=params.depth())
        .map(|k| {
            json!({
                "span": out.layout.blocks[k - 1].span,
                "oscillation": out.oscillation(k),
                "extremal_sum": out.block_extremal_sum(k),
                "extremal_bound": &params.levels[k - 1] * Scalar::from(2 * params.sizes[k - 1]),
            })
        })
        .collect();
    let mut meta = json!({
        "preset": format!("{:?}", args.preset),
        "depth": params.depth(),
        "n": out.layout.n[1..],
        "support": out.h0.support_len(),
        "gap_mass": params.gap_mass(),
        "blocks": blocks,
    });
    if args.preset == PresetChoice::A {
        meta["norm_lower_bound"] = json!(Scalar::ratio(3, 2).pow(params.depth() as u32));
    }
    meta
}

fn leibniz_metadata(data: &LeibnizData) -> serde_json::Value {
    json!({
        "g": data.g,
        "blocks": data.blocks,
        "block_sums": data.block_sums(),
        "alpha": data.alpha,
        "omega_trunc": data.omega_trunc,
        "predicted_norm": data.alpha,
    })
}

fn construct(args: &ConstructArgs) -> Result<String, CliError> {
    let (seq, mut meta) = match args.which {
        Which::H0 => {
            let out = build_h0(&h0_params(args))?;
            let meta = h0_metadata(&out, args);
            (out.h0, meta)
        }
        Which::H => {
            let out = build_h(&h0_params(args))?;
            let mut meta = h0_metadata(&out.base, args);
            meta["doubled"] = json!(out.base.layout.doubled);
            meta["sigma_g"] = json!(greedylab_core::norms::sigma_g(&out.h));
            (out.h, meta)
        }
        Which::G => {
            let t = args.t.clone().ok_or_else(|| CliError::Flags("--which G needs --t".into()))?;
            let w = discontinuity_witness(args.n.unwrap_or(DEFAULT_TAIL_END), &t)?;
            let meta = json!({
                "t": w.t,
                "tail_end": w.tail_end,
                "tail_mass": w.tail_mass,
                "predicted_norm": w.predicted,
                "combined_norm": format_value(&w.combined_norm()),
            });
            (w.seq, meta)
        }
        Which::Leibniz => {
            let data = match &args.t {
                None => {
                    let blocks: Vec<IntInterval> = (1..=4).map(|n| IntInterval::new(n, n).expect("n ≥ 1")).collect();
                    leibniz_check(&FinSeq::from_ints(&[4, 3, 2, 1]), &blocks)?
                }
                Some(t) => {
                    let len = args.n.unwrap_or(5000);
                    let g = FinSeq::from_pairs((1..=len).map(|n| (n, Scalar::ratio(1, n as i64)))).expect("ordered");
                    build_admissible(&g, t, args.depth)?
                }
            };
            let f = greedylab_core::constructions::alternating_from_leibniz(&data);
            (f, leibniz_metadata(&data))
        }
    };
    meta["which"] = json!(args.which.to_possible_value().expect("no skipped variants").get_name());
    let text = seqfile::write(&seq, args.format);
    let meta_text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    let meta_path = args.meta.clone().or_else(|| {
        args.out.as_ref().map(|p| {
            let mut name = p.clone().into_os_string();
            name.push(".meta.json");
            PathBuf::from(name)
        })
    });
    if let Some(path) = &meta_path {
        write_file(path, &meta_text)?;
    }
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn verify(args: &VerifyArgs) -> Result<String, CliError> {
    let ids: Vec<&str> = if args.suite == "all" {
        SUITE_IDS.to_vec()
    } else if SUITE_IDS.contains(&args.suite.as_str()) {
        vec![args.suite.as_str()]
    } else {
        return Err(CliError::Flags(VerifyError::UnknownSuite(args.suite.clone()).to_string()));
    };
    let corpus = CorpusSpec { seed: args.seed, trials: args.trials, ..CorpusSpec::default() };
    let reports: Vec<SuiteReport> = ids.iter().map(|id| run_suite(id, &corpus).expect("registered id")).collect();
    let mut lines = String::new();
    for report in &reports {
        eprintln!(
            "{} {} ({} trials, {} failures)",
            report.suite,
            if report.passed { "pass" } else { "FAIL" },
            report.trials,
            report.failure_count
        );
        lines += &(serde_json::to_string(report).expect("reports serialize") + "\n");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let payload = match &args.report {
        Some(path) => {
            write_file(path, &lines)?;
            String::new()
        }
        None => lines,
    };
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed, total: reports.len(), payload });
    }
    Ok(payload)
}

fn democracy(args: &DemocracyArgs) -> Result<String, CliError> {
    let space = match (&args.which, args.space) {
        (None, Some(space)) => DemocracySpace::Space(space),
        (None, None) => return Err(CliError::Flags("democracy needs --which or --space".into())),
        (Some(which), space) => match NormSpec::parse(which, space)? {
            NormSpec::Gauge(g) => DemocracySpace::Gauge(g),
            NormSpec::Combined(g, s) => DemocracySpace::Combined(g, s),
            NormSpec::Space(s) => DemocracySpace::Space(s),
            NormSpec::L1 => DemocracySpace::Space(SpaceSpec::Lorentz(1)),
            NormSpec::Linf => return Err(CliError::Flags("linf is not supported by democracy".into())),
        },
    };
    let window = args.window.unwrap_or(args.m_max);
    let profile = democracy_profile(space, args.m_max, window).map_err(|e| match e {
        DemocracyError::WindowTooSmall { .. } => CliError::Flags(e.to_string()),
        DemocracyError::Oracle(e) => CliError::Cap(e.to_string()),
    })?;
    let mut csv = String::from("m,phi_l,phi_u\n");
    for m in 1..=args.m_max {
        csv += &format!("{m},{},{}\n", format_value(&profile.lower[m - 1]), format_value(&profile.upper[m - 1]));
    }
    match &args.csv {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}
