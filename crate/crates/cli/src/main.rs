use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dsa_preamble::baselines::{zc_baseline, BitMapping, MSequenceParams};
use dsa_preamble::correlation::default_tolerance;
use dsa_preamble::dsa::{
    apply_mask, dsa_report_certified, dsa_report_with, DsaPmeprReport, RbMask,
};
use dsa_preamble::envelope::{imepr_trace, Sampling, DEFAULT_OVERSAMPLING, MIN_OVERSAMPLING};
use dsa_preamble::families::{
    build_family, enumerate_families, verify_family, FamilyInstance, FamilyMember,
};
use dsa_preamble::io::{complex_csv, parse_sequence_csv, phase_csv, trace_csv};
use dsa_preamble::seqcore::{ComplexSequence, FamilyDescriptor, FamilyKind};
use dsa_preamble::tables::{diff_against_published, reproduce_table, BaselineConfig, TableId};

const OUT_DIR_ENV: &str = "DSA_PREAMBLE_OUT_DIR";

/// Exit status for a clause that does not hold.
const EXIT_FAILED: u8 = 1;
/// Exit status for bad input or any other error.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dsa-preamble",
    version,
    about = "Low-PMEPR preamble sequences for DSA OFDMA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family instance or a baseline sequence.
    Generate(GenerateArgs),
    /// Check every theorem clause for one or more descriptors.
    Verify(VerifyArgs),
    /// PMEPR of a sequence under all 15 masks.
    Analyze(AnalyzeArgs),
    /// Regenerate one of the comparison tables.
    ReproduceTable(TableArgs),
    /// Instantaneous-to-mean envelope power over one symbol.
    Trace(TraceArgs),
    /// List family descriptors, exhaustively or by seeded sampling.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    X,
    Y,
    Gdj,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::X => FamilyKind::FamilyX,
            Family::Y => FamilyKind::FamilyY,
            Family::Gdj => FamilyKind::PlainGdj,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grid {
    /// `t = n/L`, the L-point inverse DFT.
    Critical,
    /// Oversampled grid with local refinement.
    Continuous,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Zc,
    Mseq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Member {
    A,
    B,
    D,
    E,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mapping {
    /// 0 → −1, 1 → +1.
    ZeroToMinusOne,
    /// 0 → +1, 1 → −1.
    ZeroToPlusOne,
}

#[derive(Args)]
struct DescriptorArgs {
    #[arg(long, value_enum, default_value = "x")]
    family: Family,
    /// Number of variables; the sequence length is 2^m.
    #[arg(long)]
    m: Option<usize>,
    /// Phase alphabet size (even).
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Permutation as a 1-based comma list.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<usize>>,
    /// Linear coefficients c_1..c_m as a comma list.
    #[arg(long, value_delimiter = ',')]
    ck: Option<Vec<u32>>,
    /// Constant term.
    #[arg(long, default_value_t = 0)]
    c: u32,
    /// Descriptor JSON: one object, an array, or one object per line. `-` reads stdin.
    #[arg(long, conflicts_with_all = ["m", "pi", "ck"])]
    descriptor: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    /// ZC root index.
    #[arg(long, default_value_t = 25)]
    zc_root: u64,
    /// ZC base length before the −1 extension; defaults to 2^m − 1.
    #[arg(long)]
    zc_length: Option<u64>,
    /// LFSR taps as a comma list, e.g. `5,2` for s[k] = s[k−5] ⊕ s[k−2].
    #[arg(long, value_delimiter = ',')]
    mseq_poly: Option<Vec<usize>>,
    /// LFSR initial state as a comma list of bits; defaults to all ones.
    #[arg(long, value_delimiter = ',')]
    mseq_init: Option<Vec<u8>>,
    #[arg(long, value_enum, default_value = "zero-to-minus-one")]
    mseq_mapping: Mapping,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; relative paths resolve against $DSA_PREAMBLE_OUT_DIR when set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, value_enum, default_value = "critical")]
    grid: Grid,
    /// Grid points per subcarrier on the continuous grid.
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
}

impl SamplingArgs {
    fn sampling(&self) -> Result<Sampling> {
        if self.oversampling < MIN_OVERSAMPLING {
            bail!("--oversampling must be at least {MIN_OVERSAMPLING}");
        }
        Ok(match self.grid {
            Grid::Critical => Sampling::Critical,
            Grid::Continuous => Sampling::Oversampled {
                factor: self.oversampling,
                refine: true,
            },
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    descriptor: DescriptorArgs,
    /// Emit a baseline sequence instead of a family instance.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    #[command(flatten)]
    baselines: BaselineArgs,
    /// Member written in csv format.
    #[arg(long, value_enum, default_value = "a")]
    member: Member,
    /// Write phases (`index,phase,q`) instead of complex values in csv format.
    #[arg(long)]
    phases: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    descriptor: DescriptorArgs,
    /// Replace member `a` by the sequence in this CSV file.
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Absolute tolerance; defaults to 1e-9·L.
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SourceArgs {
    /// Sequence CSV (`index,re,im` or `index,phase,q`). `-` reads stdin.
    #[arg(long, conflicts_with = "baseline")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    #[command(flatten)]
    descriptor: DescriptorArgs,
    #[command(flatten)]
    baselines: BaselineArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Also evaluate at twice the oversampling and report the difference.
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value = "sequence")]
    label: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    /// I..VIII or 1..8.
    #[arg(long)]
    table: String,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    baselines: BaselineArgs,
    /// Emit the per-cell comparison with the published values instead of the table.
    #[arg(long)]
    diff: bool,
    #[arg(long, default_value_t = 2e-3)]
    diff_tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Mask index 1..15.
    #[arg(long, default_value_t = 15)]
    mask: u8,
    /// Number of time samples; defaults to oversampling·L.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_enum, default_value = "x")]
    family: Family,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// At most this many descriptors; larger spaces are sampled.
    #[arg(long, default_value_t = 500)]
    limit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

/// A failed clause, as opposed to an error.
struct Failed;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Failed)) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cmd: Command) -> Result<Option<Failed>> {
    match cmd {
        Command::Generate(a) => generate(a).map(|_| None),
        Command::Verify(a) => verify(a),
        Command::Analyze(a) => analyze(a).map(|_| None),
        Command::ReproduceTable(a) => table(a).map(|_| None),
        Command::Trace(a) => trace(a).map(|_| None),
        Command::Enumerate(a) => enumerate(a).map(|_| None),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn emit(output: &OutputArgs, default_name: &str, text: &str) -> Result<()> {
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let target = match (&output.out, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(default_name)),
        (None, None) => None,
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Pretty => "txt",
    }
}

fn parse_descriptors(text: &str) -> Result<Vec<FamilyDescriptor>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).context("parsing descriptor array");
    }
    let whole: std::result::Result<FamilyDescriptor, _> = serde_json::from_str(trimmed);
    if let Ok(d) = whole {
        return Ok(vec![d]);
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let d = serde_json::from_str(line)
            .with_context(|| format!("parsing descriptor on line {}", i + 1))?;
        out.push(d);
    }
    if out.is_empty() {
        bail!("no descriptors found");
    }
    Ok(out)
}

impl DescriptorArgs {
    fn resolve(&self) -> Result<Vec<FamilyDescriptor>> {
        if let Some(path) = &self.descriptor {
            return parse_descriptors(&read_input(path)?);
        }
        let kind = FamilyKind::from(self.family);
        let m = match (&self.pi, self.m) {
            (Some(pi), Some(m)) if pi.len() != m => {
                bail!("--pi has {} entries but --m is {m}", pi.len())
            }
            (Some(pi), _) => pi.len(),
            (None, Some(m)) => m,
            (None, None) => bail!("give --m, --pi or --descriptor"),
        };
        let standard = FamilyDescriptor::standard(kind, m, self.q)?;
        let pi = self.pi.clone().unwrap_or_else(|| standard.pi().to_vec());
        let ck = self.ck.clone().unwrap_or_else(|| vec![0; m]);
        Ok(vec![FamilyDescriptor::new(kind, self.q, pi, ck, self.c)?])
    }

    fn resolve_one(&self) -> Result<FamilyDescriptor> {
        let mut all = self.resolve()?;
        if all.len() != 1 {
            bail!("expected one descriptor, got {}", all.len());
        }
        Ok(all.remove(0))
    }
}

impl BaselineArgs {
    fn mseq(&self, degree: Option<usize>) -> Result<MSequenceParams> {
        let mapping = match self.mseq_mapping {
            Mapping::ZeroToMinusOne => BitMapping::ZeroToMinusOne,
            Mapping::ZeroToPlusOne => BitMapping::ZeroToPlusOne,
        };
        match (&self.mseq_poly, degree) {
            (Some(taps), _) => {
                let d = taps.iter().copied().max().unwrap_or(0);
                Ok(MSequenceParams {
                    taps: taps.clone(),
                    init: self.mseq_init.clone().unwrap_or_else(|| vec![1; d]),
                    mapping,
                })
            }
            (None, Some(d)) => {
                let mut p = MSequenceParams::table_default(d).with_context(|| {
                    format!("no default m-sequence register of degree {d}; give --mseq-poly")
                })?;
                if let Some(init) = &self.mseq_init {
                    p.init = init.clone();
                }
                p.mapping = mapping;
                Ok(p)
            }
            (None, None) => bail!("give --mseq-poly or --m for the m-sequence"),
        }
    }

    fn sequence(&self, which: Baseline, m: Option<usize>) -> Result<ComplexSequence> {
        Ok(match which {
            Baseline::Zc => {
                let base = match (self.zc_length, m) {
                    (Some(n), _) => n,
                    (None, Some(m)) => (1u64 << m) - 1,
                    (None, None) => bail!("give --zc-length or --m for the ZC sequence"),
                };
                zc_baseline(base as usize + 1, self.zc_root)?
            }
            Baseline::Mseq => self.mseq(m)?.baseline()?,
        })
    }

    fn config(&self, len: usize) -> Result<BaselineConfig> {
        Ok(BaselineConfig {
            zc_root: Some(self.zc_root),
            zc_length: self.zc_length,
            mseq: Some(self.mseq(Some(len.trailing_zeros() as usize))?),
        })
    }
}

impl SourceArgs {
    fn load(&self) -> Result<ComplexSequence> {
        if let Some(path) = &self.input {
            return Ok(parse_sequence_csv(&read_input(path)?)?);
        }
        if let Some(which) = self.baseline {
            return self.baselines.sequence(which, self.descriptor.m);
        }
        let desc = self.descriptor.resolve_one()?;
        Ok(build_family(&desc)?.a.sequence)
    }
}

fn member(inst: &FamilyInstance, which: Member) -> &FamilyMember {
    match which {
        Member::A => &inst.a,
        Member::B => &inst.b,
        Member::D => &inst.d,
        Member::E => &inst.e,
    }
}

fn pretty_sequence(a: &ComplexSequence) -> String {
    let mut out = String::new();
    for (i, v) in a.values().iter().enumerate() {
        let _ = writeln!(out, "{i:>5}  {:>8.4} {:>+8.4}i", v.re, v.im);
    }
    out
}

fn generate(args: GenerateArgs) -> Result<()> {
    let format = args.output.format.unwrap_or(Format::Json);
    if let Some(which) = args.baseline {
        let seq = args.baselines.sequence(which, args.descriptor.m)?;
        let text = match format {
            Format::Csv => complex_csv(&seq),
            Format::Json => serde_json::to_string(&seq)? + "\n",
            Format::Pretty => pretty_sequence(&seq),
        };
        return emit(
            &args.output,
            &format!("baseline.{}", extension(format)),
            &text,
        );
    }

    let desc = args.descriptor.resolve_one()?;
    let inst = build_family(&desc)?;
    let members = [
        ("a", &inst.a),
        ("b", &inst.b),
        ("d", &inst.d),
        ("e", &inst.e),
    ];
    let text = match format {
        Format::Csv => {
            let m = member(&inst, args.member);
            if args.phases {
                phase_csv(&m.phases)
            } else {
                complex_csv(&m.sequence)
            }
        }
        Format::Json => {
            let members: Vec<_> = members
                .iter()
                .map(|(name, m)| {
                    json!({
                        "name": name,
                        "function": m.function.to_string(),
                        "phases": m.phases.values(),
                        "sequence": m.sequence,
                    })
                })
                .collect();
            let v = json!({
                "descriptor": inst.descriptor,
                "length": inst.len(),
                "h": inst.h,
                "members": members,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Pretty => {
            let mut out = format!(
                "{} m={} q={} L={} H={}\n",
                desc.theorem(),
                desc.m(),
                desc.q(),
                inst.len(),
                inst.h
            );
            for (name, m) in members {
                let phases: Vec<String> = m.phases.values().iter().map(u32::to_string).collect();
                let _ = writeln!(out, "{name}(x) = {}", m.function);
                let _ = writeln!(out, "  phases: {}", phases.join(" "));
            }
            out
        }
    };
    emit(
        &args.output,
        &format!("family.{}", extension(format)),
        &text,
    )
}

fn verify(args: VerifyArgs) -> Result<Option<Failed>> {
    let format = args.output.format.unwrap_or(Format::Json);
    let descriptors = args.descriptor.resolve()?;
    let replacement = match &args.sequence {
        Some(path) => Some(parse_sequence_csv(&read_input(path)?)?),
        None => None,
    };
    if let Some(t) = args.tolerance {
        if t.is_nan() || t <= 0.0 {
            bail!("--tolerance must be positive");
        }
    }

    let mut out = String::new();
    if format == Format::Csv {
        out.push_str(
            "descriptor,theorem,clause,mask,relation,holds,mu,defect_re,defect_im,residual\n",
        );
    }
    let mut all_hold = true;
    for (n, desc) in descriptors.iter().enumerate() {
        let mut inst = build_family(desc)?;
        if let Some(seq) = &replacement {
            if seq.len() != inst.len() {
                bail!(
                    "sequence file has {} entries, descriptor length is {}",
                    seq.len(),
                    inst.len()
                );
            }
            inst.a.sequence = seq.clone();
        }
        let tol = args
            .tolerance
            .unwrap_or_else(|| default_tolerance(inst.len()));
        for v in verify_family(&inst, tol)? {
            all_hold &= v.holds;
            match format {
                Format::Json => {
                    out.push_str(&serde_json::to_string(&v)?);
                    out.push('\n');
                }
                Format::Csv => {
                    let d = v.observed_defect;
                    let opt = |x: Option<String>| x.unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{n},{},{},{},{},{},{},{},{},{}",
                        v.theorem,
                        v.clause,
                        v.mask.index(),
                        serde_json::to_value(v.relation)?
                            .as_str()
                            .unwrap_or_default(),
                        v.holds,
                        opt(d.map(|d| d.mu.to_string())),
                        opt(d.map(|d| d.value.re.to_string())),
                        opt(d.map(|d| d.value.im.to_string())),
                        v.residual
                    );
                }
                Format::Pretty => {
                    let _ = writeln!(
                        out,
                        "#{n} theorem {} clause {} {:<5} {:<4} {:<5} residual {:.3e}",
                        v.theorem,
                        v.clause,
                        v.mask.to_string(),
                        serde_json::to_value(v.relation)?
                            .as_str()
                            .unwrap_or_default(),
                        if v.holds { "holds" } else { "FAILS" },
                        v.residual
                    );
                }
            }
        }
    }
    emit(
        &args.output,
        &format!("verdicts.{}", extension(format)),
        &out,
    )?;
    Ok((!all_hold).then_some(Failed))
}

fn pretty_report(label: &str, r: &DsaPmeprReport) -> String {
    let mut out = format!("{label}\n");
    for e in &r.per_mask {
        let class = match e.class {
            dsa_preamble::dsa::MaskClass::Contiguous => "C",
            dsa_preamble::dsa::MaskClass::NonContiguous => "NC",
        };
        let _ = write!(
            out,
            "{:<5} {:<2} {:.4}",
            e.mask.to_string(),
            class,
            e.result.pmepr
        );
        if let Some(delta) = e.result.convergence_delta {
            let _ = write!(out, "  (delta {delta:.1e})");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "PMEPR_C  {:.4}", r.pmepr_c);
    let _ = writeln!(out, "PMEPR_NC {:.4}", r.pmepr_nc);
    let _ = writeln!(out, "PMEPR_A  {:.4}", r.pmepr_a);
    out
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let format = args.output.format.unwrap_or(Format::Pretty);
    let seq = args.source.load()?;
    let sampling = args.sampling.sampling()?;
    let report = if args.certify {
        if args.sampling.grid == Grid::Critical {
            bail!("--certify needs --grid continuous");
        }
        dsa_report_certified(&seq, args.sampling.oversampling)?
    } else {
        dsa_report_with(&seq, sampling)?
    };
    let text = match format {
        Format::Csv => format!(
            "{}\n{}\n",
            DsaPmeprReport::csv_header(),
            report.to_csv_row(&args.label)
        ),
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Pretty => pretty_report(&args.label, &report),
    };
    emit(
        &args.output,
        &format!("analysis.{}", extension(format)),
        &text,
    )
}

fn table(args: TableArgs) -> Result<()> {
    let format = args.output.format.unwrap_or(Format::Pretty);
    let id: TableId = args.table.parse()?;
    let baselines = match id {
        TableId::VII => args.baselines.config(32)?,
        TableId::VIII => args.baselines.config(64)?,
        _ => BaselineConfig::default(),
    };
    let artifact = reproduce_table(id, args.sampling.sampling()?, &baselines)?;
    let diff = diff_against_published(&artifact, args.diff_tolerance);
    let max_delta = diff.iter().map(|d| d.delta.abs()).fold(0.0, f64::max);
    let outside = diff.iter().filter(|d| !d.within_tolerance).count();

    let text = match (format, args.diff) {
        (Format::Csv, false) => artifact.to_csv(),
        (Format::Csv, true) => {
            let mut out = String::from("row,column,computed,published,delta,within_tolerance\n");
            for d in &diff {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    d.row, d.column, d.computed, d.published, d.delta, d.within_tolerance
                );
            }
            out
        }
        (Format::Json, false) => {
            serde_json::to_string_pretty(&json!({ "table": artifact, "diff": diff }))? + "\n"
        }
        (Format::Json, true) => serde_json::to_string_pretty(&diff)? + "\n",
        (Format::Pretty, show_cells) => {
            let mut out = if show_cells {
                String::new()
            } else {
                artifact.to_pretty()
            };
            for d in diff.iter().filter(|d| show_cells || !d.within_tolerance) {
                let _ = writeln!(
                    out,
                    "{:<10} {:<8} computed {:.4} published {:.4} delta {:+.4}{}",
                    d.row,
                    d.column,
                    d.computed,
                    d.published,
                    d.delta,
                    if d.within_tolerance { "" } else { "  OUTSIDE" }
                );
            }
            let _ = writeln!(
                out,
                "published comparison: {} cells, max |delta| {max_delta:.4}, {outside} outside ±{}",
                diff.len(),
                args.diff_tolerance
            );
            out
        }
    };
    emit(
        &args.output,
        &format!("table_{}.{}", id.roman(), extension(format)),
        &text,
    )
}

fn trace(args: TraceArgs) -> Result<()> {
    let format = args.output.format.unwrap_or(Format::Csv);
    let seq = args.source.load()?;
    let masked = if seq.len() % 4 == 0 {
        apply_mask(&seq, RbMask::new(args.mask)?)?
    } else if args.mask == 15 {
        seq
    } else {
        bail!("masking needs a length divisible by 4, got {}", seq.len());
    };
    let points = args.points.unwrap_or(args.oversampling * masked.len());
    let trace = imepr_trace(&masked, points)?;
    let text = match format {
        Format::Csv => trace_csv(&trace),
        Format::Json => {
            let rows: Vec<_> = trace
                .iter()
                .enumerate()
                .map(|(i, v)| json!({ "t_frac": i as f64 / points as f64, "imepr": v }))
                .collect();
            serde_json::to_string(&rows)? + "\n"
        }
        Format::Pretty => {
            let mut out = String::new();
            for (i, v) in trace.iter().enumerate() {
                let _ = writeln!(out, "{:.6}  {v:.4}", i as f64 / points as f64);
            }
            out
        }
    };
    emit(&args.output, &format!("trace.{}", extension(format)), &text)
}

fn enumerate(args: EnumerateArgs) -> Result<()> {
    let format = args.output.format.unwrap_or(Format::Json);
    let list = enumerate_families(args.family.into(), args.m, args.q, args.limit, args.seed)?;
    let join = |v: Vec<String>| v.join(";");
    let text = match format {
        Format::Json | Format::Pretty => {
            let mut out = String::new();
            for d in &list {
                out.push_str(&serde_json::to_string(d)?);
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("theorem,m,q,pi,c_k,c\n");
            for d in &list {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    d.theorem().name(),
                    d.m(),
                    d.q(),
                    join(d.pi().iter().map(usize::to_string).collect()),
                    join(d.c_k().iter().map(u32::to_string).collect()),
                    d.c()
                );
            }
            out
        }
    };
    emit(
        &args.output,
        &format!("descriptors.{}", extension(format)),
        &text,
    )
}
