use std::collections::BTreeMap;
use std::path::PathBuf;

use apollonian::census::{
    self, allowed_classes, count_quadruples, growth_exponent, missing_values, orbit_partition,
    residue_cover_witness, CheckpointPlan, OrbitFilter,
};
use apollonian::group::{
    extremal_growth, joint_spectral_radius, median_growth_experiment, word_spectral_search,
    ExtremeMode, SpectralReport, SpectralSearch,
};
use apollonian::roots::{count_roots, enumerate_reduced_forms, enumerate_roots};
use apollonian::{
    descartes_defect, is_primitive, is_root, metrics, reduce, BigQuad, Census, CensusOptions,
    Error, Mode, Quad, RenderOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::output::{choose, csv, emit, json, Format};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
    Unsupported(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_unsupported() {
            Failure::Unsupported(e.to_string())
        } else if matches!(e, Error::InvalidArgument(_)) {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "apollonian", version, about = "Integral Apollonian circle packings")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// Four curvatures; put `--` before them when any is negative.
#[derive(Args, Debug)]
struct QuadArg {
    #[arg(num_args = 4, required = true, value_name = "CURVATURE")]
    entries: Vec<i64>,
}

impl QuadArg {
    fn quad(&self) -> Quad {
        let e = &self.entries;
        Quad::new(e[0], e[1], e[2], e[3])
    }

    /// The quadruple, rejected unless it satisfies the Descartes equation.
    fn descartes(&self) -> Result<Quad, Failure> {
        let q = self.quad();
        q.require_descartes()?;
        Ok(q)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a quadruple and print its invariants.
    Check(QuadArg),
    /// Reduce a quadruple to the root of its packing.
    Reduce(QuadArg),
    /// Root quadruples with smallest entry −n.
    Roots(RootsArgs),
    /// Curvature census of a packing given by its root.
    Census(CensusArgs),
    /// Orbits of residue patterns mod m under the four generators.
    Orbits(OrbitsArgs),
    /// Smallest curvature found in each residue class mod m.
    Witness(WitnessArgs),
    /// Count Descartes quadruples of bounded Euclidean height.
    Heights(HeightsArgs),
    /// Spectral data of the generator products.
    Jsr(JsrArgs),
    /// Extremal and typical growth of ‖W v‖∞ over words of a given length.
    Growth(GrowthArgs),
    /// Draw a bounded packing as SVG.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct RootsArgs {
    /// Smallest entry is −n.
    #[arg(short = 'n', long = "n")]
    n: Option<u64>,
    /// List the quadruples.
    #[arg(long, conflicts_with_all = ["verify", "table"])]
    list: bool,
    /// Check enumeration, class-number formula and reduced forms agree.
    #[arg(long, conflicts_with = "table")]
    verify: bool,
    /// Counts for n = 1..=N.
    #[arg(long, value_name = "N")]
    table: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Values,
    Multiplicity,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Curvature bound T.
    #[arg(short = 'T', long = "bound", required_unless_present = "resume")]
    bound: Option<u64>,
    #[arg(long, value_enum, default_value = "values")]
    mode: ModeArg,
    /// Tally residues modulo m.
    #[arg(long = "mod", value_name = "M")]
    modulus: Option<u64>,
    /// Report missing integers in the allowed classes (needs --mod).
    #[arg(long, requires = "modulus")]
    missing: bool,
    /// Only this class of the missing report.
    #[arg(long, requires = "missing")]
    class: Option<u64>,
    /// Fit the growth exponent (multiplicity mode).
    #[arg(long)]
    exponent: bool,
    /// Write a resumable checkpoint here (values mode).
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
    /// Subtrees between checkpoint writes.
    #[arg(long, default_value_t = 256)]
    every: usize,
    /// Continue from a checkpoint instead of starting at the root.
    #[arg(long, value_name = "FILE", conflicts_with = "checkpoint")]
    resume: Option<PathBuf>,
    #[command(flatten)]
    root: OptQuad,
}

/// Root curvatures, optional when resuming.
#[derive(Args, Debug)]
struct OptQuad {
    #[arg(num_args = 4, value_name = "CURVATURE")]
    entries: Vec<i64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    Primitive,
    All,
    Congruence,
}

#[derive(Args, Debug)]
struct OrbitsArgs {
    #[arg(long = "mod", value_name = "M")]
    modulus: u64,
    #[arg(long, value_enum, default_value = "primitive")]
    filter: FilterArg,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long = "mod", value_name = "M")]
    modulus: u64,
    /// Largest curvature searched.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
    #[command(flatten)]
    root: QuadArg,
}

#[derive(Args, Debug)]
struct HeightsArgs {
    /// Height bound T.
    #[arg(short = 'T', long = "bound")]
    bound: f64,
    #[arg(long)]
    primitive: bool,
}

#[derive(Args, Debug)]
struct JsrArgs {
    /// Also search every reduced word up to this length.
    #[arg(long, value_name = "LEN")]
    search: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GrowthKind {
    Max,
    Min,
    Median,
}

#[derive(Args, Debug)]
struct GrowthArgs {
    #[arg(value_enum)]
    kind: GrowthKind,
    #[arg(short = 'l', long)]
    length: usize,
    /// Random words sampled (median).
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    /// Random seed (median).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    root: QuadArg,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(short = 'T', long = "bound")]
    bound: i64,
    /// Image width and height in pixels.
    #[arg(long, default_value_t = 800.0)]
    size: f64,
    #[arg(long, default_value_t = 0.5)]
    stroke: f64,
    #[arg(long, default_value_t = 0.25)]
    min_radius: f64,
    /// Print curvatures inside large circles.
    #[arg(long)]
    labels: bool,
    #[arg(long, default_value_t = 12.0)]
    font: f64,
    #[command(flatten)]
    root: QuadArg,
}

pub fn run(cli: Cli) -> Outcome {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    let fmt = cli.format;
    let bytes = match &cli.command {
        Command::Check(q) => check(q, fmt)?,
        Command::Reduce(q) => reduce_cmd(q, fmt)?,
        Command::Roots(a) => roots(a, fmt)?,
        Command::Census(a) => census_cmd(a, fmt)?,
        Command::Orbits(a) => orbits(a, fmt)?,
        Command::Witness(a) => witness(a, fmt)?,
        Command::Heights(a) => heights(a, fmt)?,
        Command::Jsr(a) => jsr(a, fmt)?,
        Command::Growth(a) => growth(a, fmt)?,
        Command::Render(a) => render(a, fmt)?,
    };
    emit(&bytes, out)?;
    Ok(())
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CheckReport {
    pub quadruple: Quad,
    pub defect: i64,
    pub descartes: bool,
    pub primitive: Option<bool>,
    pub root: Option<bool>,
    pub height_sq: i64,
    pub lsum: i64,
    pub supnorm: i64,
}

fn check(q: &QuadArg, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Json])?;
    let quad = q.quad();
    let defect = descartes_defect(&quad)?;
    let m = metrics(&quad)?;
    let descartes = defect == 0;
    let report = CheckReport {
        quadruple: quad.clone(),
        defect,
        descartes,
        primitive: (descartes && !quad.is_zero()).then(|| is_primitive(&quad)).transpose()?,
        root: if descartes { is_root(&quad).ok() } else { None },
        height_sq: m.height_sq,
        lsum: m.lsum,
        supnorm: m.supnorm,
    };
    let bytes = json(&report)?;
    if !descartes {
        emit(&bytes, None)?;
        return Err(Failure::Domain(format!("{quad} is not a Descartes quadruple (defect {defect})")));
    }
    Ok(bytes)
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ReduceReport {
    pub input: Vec<String>,
    pub root: Vec<String>,
    /// The root in the input's slot order.
    pub reduced: Vec<String>,
    /// Applying this word to `reduced` gives the (possibly negated) input.
    pub word: String,
    pub steps: usize,
    pub negated: bool,
}

fn reduce_cmd(q: &QuadArg, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    let fmt = choose(fmt, &[Format::Text, Format::Json])?;
    let quad = q.descartes()?;
    let big: BigQuad = quad.map(|&e| BigInt::from(e));
    let r = reduce(&big)?;
    let report = ReduceReport {
        input: quad.entries.iter().map(|e| e.to_string()).collect(),
        root: r.root.entries.iter().map(|e| e.to_string()).collect(),
        reduced: r.reduced.entries.iter().map(|e| e.to_string()).collect(),
        word: r.word.to_string(),
        steps: r.steps,
        negated: r.negated,
    };
    match fmt {
        Format::Json => json(&report),
        _ => Ok(format!(
            "root {}\nword {}\nsteps {}{}\n",
            r.root,
            report.word,
            r.steps,
            if r.negated { "\nnegated" } else { "" }
        )
        .into_bytes()),
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CountRow {
    pub n: u64,
    pub count: u64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct VerifyReport {
    pub n: u64,
    pub enumerated: usize,
    pub formula: u64,
    pub reduced_forms: usize,
    pub agree: bool,
}

fn roots(a: &RootsArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    if let Some(top) = a.table {
        let fmt = choose(fmt, &[Format::Csv, Format::Json])?;
        let rows: Vec<CountRow> = (1..=top).map(|n| CountRow { n, count: count_roots(n) }).collect();
        return match fmt {
            Format::Json => json(&rows),
            _ => csv(rows),
        };
    }
    let n = a
        .n
        .ok_or_else(|| Failure::Usage("give -n or --table".into()))?;
    if a.list {
        let fmt = choose(fmt, &[Format::Json, Format::Text])?;
        let recs = enumerate_roots(n);
        return match fmt {
            Format::Json => json(&recs),
            _ => Ok(recs.iter().map(|r| format!("{}\n", r.root)).collect::<String>().into_bytes()),
        };
    }
    if a.verify {
        choose(fmt, &[Format::Json])?;
        let enumerated = enumerate_roots(n).len();
        let formula = count_roots(n);
        let reduced_forms = if n == 0 { 1 } else { enumerate_reduced_forms(n)?.len() };
        let agree = enumerated as u64 == formula && reduced_forms as u64 == formula;
        let bytes = json(&VerifyReport {
            n,
            enumerated,
            formula,
            reduced_forms,
            agree,
        })?;
        if !agree {
            emit(&bytes, None)?;
            return Err(Failure::Domain(format!("root counts disagree at n={n}")));
        }
        return Ok(bytes);
    }
    let fmt = choose(fmt, &[Format::Json, Format::Csv])?;
    let row = CountRow { n, count: count_roots(n) };
    match fmt {
        Format::Json => json(&row),
        _ => csv([row]),
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ResidueCounts {
    pub modulus: u64,
    pub allowed_classes: Vec<u64>,
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CensusSummary {
    pub root: Quad,
    pub bound: u64,
    pub mode: Mode,
    pub circles_counted: u64,
    pub values_present: u64,
    pub nonpositive: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_circles: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residues: Option<ResidueCounts>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exponent: Option<f64>,
}

#[derive(Serialize)]
struct MissingCsvRow {
    modulus: u64,
    class: u64,
    value: u64,
}

#[derive(Serialize)]
struct ResidueCsvRow {
    class: u64,
    count: u64,
}

fn census_cmd(a: &CensusArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    let fmt = choose(fmt, &[Format::Json, Format::Csv])?;
    let c: Census = match &a.resume {
        Some(path) => {
            let plan = CheckpointPlan {
                path: path.clone(),
                every: a.every,
            };
            census::resume(&plan)?
        }
        None => {
            if a.root.entries.len() != 4 {
                return Err(Failure::Usage("census needs four root curvatures".into()));
            }
            let e = &a.root.entries;
            let root = Quad::new(e[0], e[1], e[2], e[3]);
            root.require_descartes()?;
            let mode = match a.mode {
                ModeArg::Values => Mode::Values,
                ModeArg::Multiplicity => Mode::Multiplicity,
            };
            let mut opts = CensusOptions::new(mode);
            opts.checkpoint = a.checkpoint.as_ref().map(|path| CheckpointPlan {
                path: path.clone(),
                every: a.every,
            });
            apollonian::census_with(&root, a.bound.expect("clap enforces -T"), &opts)?
        }
    };

    if a.missing {
        let m = a.modulus.expect("clap enforces --mod");
        let report = missing_values(&c, m)?;
        let rows = report.rows();
        if let Some(class) = a.class {
            let row = rows
                .into_iter()
                .find(|r| r.class == class)
                .ok_or_else(|| Failure::Usage(format!("class {class} is not allowed mod {m}")))?;
            return match fmt {
                Format::Json => json(&row),
                _ => csv(row.missing.iter().map(|&value| MissingCsvRow { modulus: m, class, value })),
            };
        }
        return match fmt {
            Format::Json => json(&rows),
            _ => csv(rows.iter().flat_map(|r| {
                r.missing.iter().map(move |&value| MissingCsvRow {
                    modulus: m,
                    class: r.class,
                    value,
                })
            })),
        };
    }

    let residues = match a.modulus {
        Some(m) => Some(ResidueCounts {
            modulus: m,
            allowed_classes: allowed_classes(&c.root, m)?.into_iter().collect(),
            counts: c.residue_histogram(m)?,
        }),
        None => None,
    };
    if fmt == Format::Csv {
        let r = residues.ok_or_else(|| Failure::Usage("CSV census output needs --mod".into()))?;
        return csv(r.counts.iter().map(|(&class, &count)| ResidueCsvRow { class, count }));
    }
    let exponent = if a.exponent {
        Some(growth_exponent(&c)?.exponent)
    } else {
        None
    };
    json(&CensusSummary {
        root: c.root.clone(),
        bound: c.bound,
        mode: c.mode,
        circles_counted: c.circles_counted,
        values_present: c.count_present(),
        nonpositive: c.nonpositive.clone(),
        total_circles: c.total_circles().ok(),
        residues,
        exponent,
    })
}

fn orbits(a: &OrbitsArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    let fmt = choose(fmt, &[Format::Json, Format::Text])?;
    let filter = match a.filter {
        FilterArg::Primitive => OrbitFilter::Primitive,
        FilterArg::All => OrbitFilter::All,
        FilterArg::Congruence => OrbitFilter::Congruence,
    };
    let table = orbit_partition(a.modulus, filter)?;
    match fmt {
        Format::Json => json(&table),
        _ => {
            let mut s = String::new();
            for (i, o) in table.orbits.iter().enumerate() {
                let pats: Vec<String> = o
                    .patterns
                    .iter()
                    .map(|p| format!("({},{},{},{})", p[0], p[1], p[2], p[3]))
                    .collect();
                let res: Vec<String> = o.residues.iter().map(u64::to_string).collect();
                s.push_str(&format!("{}: {} | residues {}\n", i + 1, pats.join(" "), res.join(",")));
            }
            Ok(s.into_bytes())
        }
    }
}

fn witness(a: &WitnessArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Json])?;
    let root = a.root.descartes()?;
    json(&residue_cover_witness(&root, a.modulus, a.cap)?)
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct HeightReport {
    pub bound: f64,
    pub primitive: bool,
    pub count: u64,
    /// `count / T²`.
    pub ratio: f64,
}

fn heights(a: &HeightsArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Json])?;
    if !(a.bound >= 0.0) {
        return Err(Failure::Usage("height bound must be nonnegative".into()));
    }
    let count = count_quadruples(a.bound, a.primitive);
    json(&HeightReport {
        bound: a.bound,
        primitive: a.primitive,
        count,
        ratio: if a.bound > 0.0 { count as f64 / (a.bound * a.bound) } else { f64::NAN },
    })
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct JsrReport {
    #[serde(flatten)]
    pub spectral: SpectralReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SpectralSearch>,
}

fn jsr(a: &JsrArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Json])?;
    json(&JsrReport {
        spectral: joint_spectral_radius(),
        search: a.search.map(word_spectral_search),
    })
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ExtremeReport {
    pub mode: ExtremeMode,
    pub length: usize,
    /// `‖W v‖∞` in decimal.
    pub value: String,
    pub word: String,
    pub exhaustive: bool,
}

fn growth(a: &GrowthArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Json])?;
    let root = a.root.descartes()?;
    let big: BigQuad = root.map(|&e| BigInt::from(e));
    let mode = match a.kind {
        GrowthKind::Median => {
            return json(&median_growth_experiment(&big, a.length, a.samples, a.seed)?);
        }
        GrowthKind::Max => ExtremeMode::Max,
        GrowthKind::Min => ExtremeMode::Min,
    };
    let r = extremal_growth(&big, a.length, mode)?;
    json(&ExtremeReport {
        mode,
        length: a.length,
        value: r.value.to_string(),
        word: r.word.to_string(),
        exhaustive: r.exhaustive,
    })
}

fn render(a: &RenderArgs, fmt: Option<Format>) -> Result<Vec<u8>, Failure> {
    choose(fmt, &[Format::Svg])?;
    let root = a.root.descartes()?;
    let opts = RenderOptions {
        size_px: a.size,
        stroke_px: a.stroke,
        min_radius_px: a.min_radius,
        labels: a.labels,
        font_px: a.font,
        ..RenderOptions::default()
    };
    let r = apollonian::render_svg(&root, a.bound, &opts)?;
    log::info!("{} circles drawn, {} below the minimum radius", r.drawn, r.skipped);
    Ok(r.svg.into_bytes())
}
