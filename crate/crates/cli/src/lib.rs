//! The `triq` command line: mining, indexing, querying, benchmarking and
//! validation over triadic contexts.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use triq::baseline::BaselineEngine;
use triq::bench::{self, BenchConfig};
use triq::format::{
    read_compact_table, read_concept_store, read_triples, sorted_labels, write_concept_store, write_triples,
};
use triq::query::{parse_query, LabelStyle};
use triq::synth::{self, BasketShape, PrototypeShape};
use triq::validate::{validate, ValidateConfig};
use triq::{
    mine_concepts, search, ConceptId, ConceptSet, Dim, ElemId, InvertedIndex, MatchMode, ToleranceScope, TriadicContext,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(triq::Error),
    Validation(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => f.write_str(m),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl From<triq::Error> for CliError {
    fn from(e: triq::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(io::Error::other(e).into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "triq", version, about = "Mine, index and query triadic concepts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mine every triadic concept of a context into a concept store.
    Mine {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        /// Concept store to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the concepts as a JSON array with their ids.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build the inverted index of a concept store.
    Index {
        store: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Answer one query.
    Query {
        #[command(flatten)]
        artifacts: Artifacts,
        #[command(flatten)]
        settings: SettingArgs,
        /// `(F1, F2, F3)` with `-` for an unspecified field.
        query: String,
    },
    /// Read queries and `:` directives from standard input.
    Repl {
        #[command(flatten)]
        artifacts: Artifacts,
        #[command(flatten)]
        settings: SettingArgs,
    },
    /// Time structure creation and the seven query shapes on both engines.
    Bench {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
        reps: u32,
        /// Queries sampled per shape.
        #[arg(long, default_value_t = 20)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check the miner, an optional store, the index and the scores against oracles.
    Validate {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        /// Concept store to check against the context.
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest |K1|·|K2|·|K3| the brute-force oracle accepts.
        #[arg(long, env = "TRIQ_BRUTE_FORCE_CAP", default_value_t = triq::miner::DEFAULT_BRUTE_FORCE_CAP)]
        cap: u64,
    },
    /// Write a seeded synthetic context in the triple format.
    Generate {
        #[arg(value_enum)]
        shape: Shape,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of objects (customers for `groceries`).
        #[arg(long)]
        objects: Option<usize>,
        /// `N1xN2xN3`, for `uniform` only.
        #[arg(long, default_value = "5x5x4")]
        sizes: String,
        /// Cell density for `uniform` and `mushroom`.
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        prototypes: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Triples when the first data line has commas, a grid otherwise.
    Auto,
    Triples,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Mushroom,
    Groceries,
    Uniform,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    #[default]
    Ours,
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Labels {
    Auto,
    Chars,
    Spaced,
}

#[derive(Args, Debug)]
pub struct Artifacts {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    /// Context the store was mined from; required by the baseline engine.
    #[arg(long)]
    pub context: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
}

#[derive(Args, Debug)]
pub struct SettingArgs {
    /// Tolerated number of missing query elements.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub theta: i64,
    /// Keep only the k best hits.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "contains")]
    pub mode: MatchMode,
    #[arg(long, default_value = "total")]
    pub tolerance: ToleranceScope,
    #[arg(long, value_enum, default_value_t = EngineKind::Ours)]
    pub engine: EngineKind,
    #[arg(long, value_enum, default_value_t = Labels::Auto)]
    pub labels: Labels,
}

/// Query settings shared by one-shot and interactive use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub theta: i64,
    pub k: Option<usize>,
    pub mode: MatchMode,
    pub scope: ToleranceScope,
    pub engine: EngineKind,
    pub labels: Labels,
}

impl From<&SettingArgs> for Settings {
    fn from(a: &SettingArgs) -> Self {
        Settings {
            theta: a.theta,
            k: a.k,
            mode: a.mode,
            scope: a.tolerance,
            engine: a.engine,
            labels: a.labels,
        }
    }
}

#[derive(Serialize)]
struct HitLine<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    id: ConceptId,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
    extent: Vec<&'a str>,
    intent: Vec<&'a str>,
    modus: Vec<&'a str>,
}

fn labels_of(concepts: &ConceptSet, id: ConceptId) -> [Vec<&str>; 3] {
    let c = concepts.get(id).expect("id from this store");
    Dim::ALL.map(|d| sorted_labels(concepts.dictionary(d), c.component(d)))
}

/// Loaded artifacts able to answer queries with either engine.
pub struct Engines {
    pub concepts: ConceptSet,
    pub index: InvertedIndex,
    pub baseline: Option<BaselineEngine>,
}

impl Engines {
    pub fn load(artifacts: &Artifacts) -> CliResult<Engines> {
        let concepts = read_concept_store(BufReader::new(File::open(&artifacts.store)?))?;
        let index = InvertedIndex::load(&artifacts.index)?;
        index.check_against(&concepts)?;
        let baseline = match &artifacts.context {
            Some(path) => {
                let ctx = align(&read_context(path, artifacts.format)?, &concepts)?;
                Some(BaselineEngine::build(&ctx, concepts.clone()))
            }
            None => None,
        };
        Ok(Engines {
            concepts,
            index,
            baseline,
        })
    }

    /// Result lines for one query, exactly as printed.
    pub fn answer(&self, text: &str, s: &Settings) -> CliResult<Vec<String>> {
        let dicts = self.concepts.dictionaries();
        let style = match s.labels {
            Labels::Auto => LabelStyle::detect(dicts),
            Labels::Chars => LabelStyle::Chars,
            Labels::Spaced => LabelStyle::Spaced,
        };
        let q = parse_query(text, dicts, style)?
            .with_theta(s.theta)?
            .with_mode(s.mode)
            .with_scope(s.scope)
            .with_k(s.k);
        let mut lines = Vec::new();
        match s.engine {
            EngineKind::Ours => {
                for (rank, hit) in search(&self.index, &self.concepts, &q).iter().enumerate() {
                    let [extent, intent, modus] = labels_of(&self.concepts, hit.id);
                    lines.push(serde_json::to_string(&HitLine {
                        rank: Some(rank + 1),
                        id: hit.id,
                        score: Some((hit.score * 100.0).round() / 100.0),
                        extent,
                        intent,
                        modus,
                    })?);
                }
            }
            EngineKind::Baseline => {
                let engine = self
                    .baseline
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("the baseline engine needs --context".into()))?;
                let mut ids = engine.answer(&q)?;
                if let Some(k) = s.k {
                    ids.truncate(k);
                }
                for id in ids {
                    let [extent, intent, modus] = labels_of(&self.concepts, id);
                    lines.push(serde_json::to_string(&HitLine {
                        rank: None,
                        id,
                        score: None,
                        extent,
                        intent,
                        modus,
                    })?);
                }
            }
        }
        Ok(lines)
    }
}

/// Re-expresses `ctx` over the store's dictionaries so concept ids agree.
fn align(ctx: &TriadicContext, concepts: &ConceptSet) -> CliResult<TriadicContext> {
    let maps: Vec<Vec<ElemId>> = Dim::ALL
        .iter()
        .map(|&d| {
            ctx.dictionary(d)
                .labels()
                .iter()
                .map(|l| concepts.dictionary(d).resolve(l))
                .collect::<triq::Result<Vec<_>>>()
        })
        .collect::<triq::Result<_>>()?;
    if Dim::ALL.iter().any(|&d| ctx.size(d) != concepts.dictionary(d).len()) {
        return Err(CliError::Usage("the context does not match the concept store".into()));
    }
    let triples = ctx
        .triples()
        .iter()
        .map(|t| [maps[0][t[0] as usize], maps[1][t[1] as usize], maps[2][t[2] as usize]])
        .collect();
    Ok(TriadicContext::from_parts(concepts.dictionaries().clone(), triples)?)
}

pub fn read_context(path: &Path, format: InputFormat) -> CliResult<TriadicContext> {
    let text = std::fs::read_to_string(path)?;
    let format = match format {
        InputFormat::Auto => {
            let first = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'));
            match first {
                Some(line) if !line.contains(',') => InputFormat::Table,
                _ => InputFormat::Triples,
            }
        }
        f => f,
    };
    Ok(match format {
        InputFormat::Table => read_compact_table(text.as_bytes())?,
        _ => read_triples(text.as_bytes())?,
    })
}

/// Applies a `:` directive to `s`. `Ok(false)` means quit.
pub fn directive<'a>(line: &'a str, s: &mut Settings) -> Result<bool, String> {
    let mut parts = line.split_whitespace();
    let name = parts.next().unwrap_or("");
    let arg = parts.next();
    let need = |arg: Option<&'a str>| arg.ok_or_else(|| format!("{name} needs an argument"));
    match name {
        ":quit" | ":q" => return Ok(false),
        ":theta" => {
            let theta: i64 = need(arg)?.parse().map_err(|_| "theta must be an integer".to_string())?;
            if theta < 0 {
                return Err("theta must be non-negative".into());
            }
            s.theta = theta;
        }
        ":k" => {
            s.k = match need(arg)? {
                "none" | "all" => None,
                v => Some(v.parse().map_err(|_| "k must be a number or `none`".to_string())?),
            }
        }
        ":mode" => s.mode = need(arg)?.parse()?,
        ":tolerance" => s.scope = need(arg)?.parse()?,
        ":engine" => s.engine = EngineKind::from_str(need(arg)?, true)?,
        ":labels" => s.labels = Labels::from_str(need(arg)?, true)?,
        other => return Err(format!("unknown directive `{other}`")),
    }
    Ok(true)
}

/// Interactive loop: queries print like `triq query`, directives change the
/// settings of later queries, errors are reported and the session goes on.
pub fn repl(
    engines: &Engines,
    mut settings: Settings,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<()> {
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text.starts_with(':') {
            match directive(text, &mut settings) {
                Ok(true) => {}
                Ok(false) => return Ok(()),
                Err(m) => writeln!(err, "warning: {m}")?,
            }
            continue;
        }
        match engines.answer(text, &settings) {
            Ok(lines) => {
                for l in lines {
                    writeln!(out, "{l}")?;
                }
                out.flush()?;
            }
            Err(e) => writeln!(err, "error: {e}")?,
        }
    }
}

#[derive(Serialize)]
struct ExportedConcept<'a> {
    id: ConceptId,
    extent: Vec<&'a str>,
    intent: Vec<&'a str>,
    modus: Vec<&'a str>,
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> CliResult) -> CliResult {
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

fn check_settings(a: &Artifacts, s: &Settings) -> CliResult {
    if s.engine == EngineKind::Baseline {
        if a.context.is_none() {
            return Err(CliError::Usage("--engine baseline needs --context".into()));
        }
        if s.theta != 0 || s.mode != MatchMode::Contains || s.scope != ToleranceScope::Total {
            return Err(CliError::Usage(
                "--theta, --mode and --tolerance do not apply to the baseline engine".into(),
            ));
        }
    }
    if s.theta < 0 {
        return Err(CliError::Usage("--theta must be non-negative".into()));
    }
    Ok(())
}

pub fn execute(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Mine {
            input: path,
            format,
            output,
            json,
        } => {
            let ctx = read_context(&path, format)?;
            let concepts = mine_concepts(&ctx);
            write_file(&output, |w| Ok(write_concept_store(&concepts, w)?))?;
            if let Some(json) = json {
                let exported: Vec<ExportedConcept> = concepts
                    .iter()
                    .map(|c| {
                        let [extent, intent, modus] = labels_of(&concepts, c.id);
                        ExportedConcept {
                            id: c.id,
                            extent,
                            intent,
                            modus,
                        }
                    })
                    .collect();
                write_file(&json, |w| Ok(serde_json::to_writer_pretty(w, &exported)?))?;
            }
            writeln!(out, "{} concepts", concepts.len())?;
        }
        Command::Index { store, output } => {
            let concepts = read_concept_store(BufReader::new(File::open(&store)?))?;
            let index = InvertedIndex::build(&concepts);
            index.save(&output)?;
            writeln!(
                out,
                "{} postings over {} concepts",
                index.total_postings(),
                index.concept_count()
            )?;
        }
        Command::Query {
            artifacts,
            settings,
            query,
        } => {
            let s = Settings::from(&settings);
            check_settings(&artifacts, &s)?;
            let engines = Engines::load(&artifacts)?;
            for line in engines.answer(&query, &s)? {
                writeln!(out, "{line}")?;
            }
        }
        Command::Repl { artifacts, settings } => {
            let s = Settings::from(&settings);
            check_settings(&artifacts, &s)?;
            let engines = Engines::load(&artifacts)?;
            repl(&engines, s, input, out, err)?;
        }
        Command::Bench {
            input: path,
            format,
            reps,
            queries,
            seed,
            json,
        } => {
            let ctx = read_context(&path, format)?;
            let concepts = mine_concepts(&ctx);
            let report = bench::run(
                &ctx,
                &concepts,
                BenchConfig {
                    repetitions: reps as usize,
                    queries,
                    seed,
                },
            )?;
            write!(out, "{report}")?;
            if let Some(json) = json {
                write_file(&json, |w| Ok(serde_json::to_writer_pretty(w, &report)?))?;
            }
        }
        Command::Validate {
            input: path,
            format,
            store,
            queries,
            seed,
            cap,
        } => {
            let ctx = read_context(&path, format)?;
            let store = match store {
                Some(p) => Some(read_concept_store(BufReader::new(File::open(p)?))?),
                None => None,
            };
            let config = ValidateConfig {
                queries,
                seed,
                brute_force_cap: cap,
            };
            let report = validate(&ctx, store.as_ref(), config)?;
            write!(out, "{report}")?;
            if !report.passed() {
                let names: Vec<&str> = report.failures().map(|c| c.name).collect();
                return Err(CliError::Validation(format!("failed: {}", names.join(", "))));
            }
        }
        Command::Generate {
            shape,
            output,
            seed,
            objects,
            sizes,
            density,
            prototypes,
        } => {
            let ctx = match shape {
                Shape::Mushroom => {
                    let base = PrototypeShape::mushroom();
                    PrototypeShape {
                        objects: objects.unwrap_or(base.objects),
                        prototypes: prototypes.unwrap_or(base.prototypes),
                        density: density.unwrap_or(base.density),
                        seed: seed.unwrap_or(base.seed),
                        ..base
                    }
                    .generate()
                }
                Shape::Groceries => {
                    let base = BasketShape::groceries();
                    BasketShape {
                        customers: objects.unwrap_or(base.customers),
                        seed: seed.unwrap_or(base.seed),
                        ..base
                    }
                    .generate()
                }
                Shape::Uniform => {
                    let dims: Vec<usize> = sizes
                        .split('x')
                        .map(|n| n.trim().parse())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Usage(format!("bad --sizes `{sizes}`")))?;
                    let mut dims: [usize; 3] = dims
                        .try_into()
                        .map_err(|_| CliError::Usage(format!("--sizes needs three numbers, got `{sizes}`")))?;
                    if let Some(n) = objects {
                        dims[0] = n;
                    }
                    let density = density.unwrap_or(0.5);
                    if !(0.0..=1.0).contains(&density) {
                        return Err(CliError::Usage("--density must lie in [0, 1]".into()));
                    }
                    synth::uniform(dims, density, seed.unwrap_or(1))
                }
            };
            write_file(&output, |w| Ok(write_triples(&ctx, w)?))?;
            let [a, b, c] = ctx.sizes();
            writeln!(out, "{a}x{b}x{c} context with {} triples", ctx.incidence_len())?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, input, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}
