//! Command-line front end. `main.rs` only calls [`main_with_args`].
//!
//! Exit codes: 0 when every check passes or is explicitly skipped, 1 when a
//! defect witness is found, 2 on unusable input.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::complex::StratifiedComplex;
use crate::corpus::{self, CorpusSpace, Kind};
use crate::diagrams::{self, DiagramReport, PerversityChoice, SuiteConfig};
use crate::field::Field;
use crate::ichains::IChainComplex;
use crate::linalg::SparseMatrix;
use crate::perversity::GmName;
use crate::products::{Certificate, DualitySetup};
use crate::signcalc;
use crate::spacefile::{SpaceFile, SpaceFileError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_DEFECT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ihdual", version, about = "Exact intersection homology and duality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Coefficient field: `q` or `p:PRIME`.
    #[arg(long, default_value = "q")]
    pub field: String,
    /// `grid`, a GM name (zero, lower-middle, upper-middle, top), or an
    /// inline table such as `0:1,1:0` (stratum id: value).
    #[arg(long)]
    pub perversity: Option<String>,
    /// Degrees to report, e.g. `1`, `0,2` or `1..3`.
    #[arg(long)]
    pub degrees: Option<String>,
    /// Subdivisions tried when a chain-level certificate fails.
    #[arg(long, default_value_t = 2)]
    pub subdiv_limit: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Intersection homology dimensions.
    Ih {
        /// A space file, or `corpus:ID` for a built-in space.
        space: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Duality diagrams; without spaces, the whole built-in corpus.
    DualCheck {
        spaces: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The pairing matrices between complementary perversities.
    Pairing {
        space: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Cone formula; without links, the built-in links.
    ConeCheck {
        links: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sign laws for transferring products across degree-n isomorphisms.
    SigncalcTest {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Barycentric subdivision, emitted as a space file.
    Subdivide {
        space: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Validation report for a space file.
    Validate {
        space: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct InputError {
    pub message: String,
    pub simplex: Option<String>,
}

impl InputError {
    fn new(message: impl Into<String>) -> Self {
        InputError { message: message.into(), simplex: None }
    }
}

impl From<SpaceFileError> for InputError {
    fn from(e: SpaceFileError) -> Self {
        InputError { simplex: e.offending_simplex(), message: e.to_string() }
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error: {}", self.message)?;
        if let Some(s) = &self.simplex {
            write!(f, "\n  offending simplex: {s}")?;
        }
        Ok(())
    }
}

/// Rendered output and exit code of one command.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn parse_field(s: &str) -> Result<Field, InputError> {
    s.parse().map_err(|e: crate::field::FieldError| InputError::new(e.to_string()))
}

pub fn parse_perversity(s: &str) -> Result<PerversityChoice, InputError> {
    let s = s.trim();
    if s == "grid" {
        return Ok(PerversityChoice::Grid);
    }
    if let Ok(g) = s.parse::<GmName>() {
        return Ok(PerversityChoice::Gm(g));
    }
    let mut table = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| InputError::new(format!("bad perversity {s:?}: expected grid, a GM name, or id:value pairs")))?;
        let k: usize = k.trim().parse().map_err(|_| InputError::new(format!("bad stratum id {k:?}")))?;
        let v: i64 = v.trim().parse().map_err(|_| InputError::new(format!("bad perversity value {v:?}")))?;
        table.insert(k, v);
    }
    Ok(PerversityChoice::Table(table))
}

/// `1`, `0,2`, `1..3` (inclusive).
pub fn parse_degrees(s: &str) -> Result<BTreeSet<usize>, InputError> {
    let bad = || InputError::new(format!("bad degree list {s:?}"));
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            out.extend(a..=b);
        } else {
            out.insert(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

/// Loads a space file, or `corpus:ID`.
pub fn load_space(input: &str) -> Result<(SpaceFile, StratifiedComplex), InputError> {
    if let Some(id) = input.strip_prefix("corpus:") {
        let s = corpus::space(id)
            .or_else(|| corpus::cone_links().into_iter().find(|(l, _)| *l == id).map(|(l, x)| CorpusSpace {
                id: l.to_string(),
                complex: Arc::new(x),
                fields: vec![Field::Rational],
                kind: Kind::Manifold,
            }))
            .ok_or_else(|| InputError::new(format!("no built-in space {id:?}")))?;
        let x = (*s.complex).clone();
        return Ok((SpaceFile::from_complex(&x), x));
    }
    let file = SpaceFile::load(input)?;
    let x = file.to_complex()?;
    Ok((file, x))
}

fn kind_of(x: &StratifiedComplex) -> Kind {
    if x.singular_strata().next().is_none() {
        Kind::Manifold
    } else if x.regular_components() > 1 {
        Kind::NonNormal
    } else {
        Kind::Pseudomanifold
    }
}

fn as_corpus_space(input: &str, field: Field) -> Result<CorpusSpace, InputError> {
    if let Some(id) = input.strip_prefix("corpus:") {
        if let Some(s) = corpus::space(id) {
            return Ok(s);
        }
    }
    let (file, x) = load_space(input)?;
    file.check_orientation_hint(&x, field)?;
    let kind = kind_of(&x);
    Ok(CorpusSpace { id: file.name.clone(), complex: Arc::new(x), fields: vec![field], kind })
}

fn render<T: Serialize>(format: Format, json: &T, tsv: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json).expect("serializable output");
            s.push('\n');
            s
        }
        Format::Tsv => tsv(),
    }
}

fn report_outcome(reports: &[DiagramReport], format: Format) -> Outcome {
    let output = match format {
        Format::Json => diagrams::render_json(reports),
        Format::Tsv => diagrams::render_tsv(reports),
    };
    let code = if reports.iter().any(DiagramReport::is_failure) { EXIT_DEFECT } else { EXIT_PASS };
    Outcome { output, code }
}

fn select_degrees(run: &RunArgs, n: usize) -> Result<Vec<usize>, InputError> {
    Ok(match &run.degrees {
        None => (0..=n).collect(),
        Some(s) => parse_degrees(s)?.into_iter().filter(|&d| d <= n).collect(),
    })
}

#[derive(Serialize)]
struct IhRow {
    perversity: String,
    field: String,
    dims: BTreeMap<usize, usize>,
}

fn cmd_ih(space: &str, run: &RunArgs) -> Result<Outcome, InputError> {
    let field = parse_field(&run.field)?;
    let (_, x) = load_space(space)?;
    let x = Arc::new(x);
    let choice = parse_perversity(run.perversity.as_deref().unwrap_or("zero"))?;
    let ps = choice.resolve(&x, run.seed).map_err(InputError::new)?;
    let degrees = select_degrees(run, x.dim())?;
    let rows: Vec<IhRow> = ps
        .iter()
        .map(|p| {
            let ic = IChainComplex::build(&x, p, field);
            let h = ic.homology().dims();
            IhRow {
                perversity: p.to_string(),
                field: field.to_string(),
                dims: degrees.iter().map(|&d| (d, h[d])).collect(),
            }
        })
        .collect();
    let warnings: BTreeSet<String> = ps
        .iter()
        .flat_map(|p| IChainComplex::build(&x, p, field).warnings().to_vec())
        .collect();
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let output = render(run.format, &rows, || {
        let mut s = String::from("perversity");
        for d in &degrees {
            s.push_str(&format!("\tH_{d}"));
        }
        s.push('\n');
        for r in &rows {
            s.push_str(&r.perversity);
            for v in r.dims.values() {
                s.push_str(&format!("\t{v}"));
            }
            s.push('\n');
        }
        s
    });
    Ok(Outcome { output, code: EXIT_PASS })
}

fn suite_config(run: &RunArgs, field: Option<Field>) -> Result<SuiteConfig, InputError> {
    Ok(SuiteConfig {
        field,
        perversity: parse_perversity(run.perversity.as_deref().unwrap_or("grid"))?,
        seed: run.seed,
        subdiv_limit: run.subdiv_limit,
        ..SuiteConfig::default()
    })
}

fn cmd_dual_check(spaces: &[String], run: &RunArgs) -> Result<Outcome, InputError> {
    let explicit_field = run.field != "q";
    let field = parse_field(&run.field)?;
    let list = if spaces.is_empty() {
        corpus::corpus()
    } else {
        spaces.iter().map(|s| as_corpus_space(s, field)).collect::<Result<Vec<_>, _>>()?
    };
    // the corpus carries its own fields unless one is requested
    let restrict = if spaces.is_empty() && !explicit_field { None } else { Some(field) };
    let cfg = suite_config(run, restrict)?;
    let mut reports = diagrams::run_suite(&list, &cfg).map_err(InputError::new)?;
    if let Some(degrees) = &run.degrees {
        let keep = parse_degrees(degrees)?;
        for r in &mut reports {
            r.entries.retain(|e| {
                e.degree
                    .split(|c: char| !c.is_ascii_digit())
                    .find(|t| !t.is_empty())
                    .and_then(|t| t.parse::<usize>().ok())
                    .is_none_or(|d| keep.contains(&d))
            });
        }
    }
    Ok(report_outcome(&reports, run.format))
}

#[derive(Serialize)]
struct PairingRow {
    degree: usize,
    perversities: [String; 2],
    status: String,
    determinant: Option<String>,
    matrix: Vec<Vec<String>>,
}

fn cmd_pairing(space: &str, run: &RunArgs) -> Result<Outcome, InputError> {
    let field = parse_field(&run.field)?;
    let (file, x) = load_space(space)?;
    file.check_orientation_hint(&x, field)?;
    let x = Arc::new(x);
    let choice = parse_perversity(run.perversity.as_deref().unwrap_or("zero"))?;
    let ps = choice.resolve(&x, run.seed).map_err(InputError::new)?;
    let degrees = select_degrees(run, x.dim())?;
    let mut rows = Vec::new();
    let mut code = EXIT_PASS;
    for p in &ps {
        let s = DualitySetup::new(&x, p, field).map_err(|e| InputError::new(e.to_string()))?;
        for &i in &degrees {
            let nu = s.nu(i);
            let m = &nu.matrix;
            let rows_n = m.len();
            let cols_n = m.first().map_or(s.dual.cochains.cohomology_dim(x.dim() - i), Vec::len);
            let (status, determinant) = match &nu.certificate {
                Certificate::Failed(why) => (format!("skipped: {why}"), None),
                Certificate::Certified if rows_n != cols_n => ("defect-witness: not square".to_string(), None),
                Certificate::Certified => {
                    let triplets = m
                        .iter()
                        .enumerate()
                        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, v)| (a, b, v.clone())));
                    let det = SparseMatrix::from_triplets(field, rows_n, cols_n, triplets).determinant();
                    let status = if det.is_zero() && rows_n > 0 { "defect-witness: singular" } else { "certified" };
                    (status.to_string(), Some(det.to_string()))
                }
            };
            if status.starts_with("defect") {
                code = EXIT_DEFECT;
            }
            rows.push(PairingRow {
                degree: i,
                perversities: [p.to_string(), p.dual().to_string()],
                status,
                determinant,
                matrix: m.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            });
        }
    }
    let output = render(run.format, &rows, || {
        let mut s = String::from("degree\tperversities\tstatus\tdeterminant\tmatrix\n");
        for r in &rows {
            let matrix: Vec<String> = r.matrix.iter().map(|row| format!("[{}]", row.join(","))).collect();
            s.push_str(&format!(
                "{}\t{} {}\t{}\t{}\t[{}]\n",
                r.degree,
                r.perversities[0],
                r.perversities[1],
                r.status,
                r.determinant.as_deref().unwrap_or("-"),
                matrix.join(",")
            ));
        }
        s
    });
    Ok(Outcome { output, code })
}

fn cmd_cone_check(links: &[String], run: &RunArgs) -> Result<Outcome, InputError> {
    let field = parse_field(&run.field)?;
    let reports = if links.is_empty() && run.perversity.is_none() {
        diagrams::run_cone_suite(&corpus::cone_links(), field)
    } else {
        let list: Vec<(String, StratifiedComplex)> = if links.is_empty() {
            corpus::cone_links().into_iter().map(|(id, x)| (id.to_string(), x)).collect()
        } else {
            links
                .iter()
                .map(|l| load_space(l).map(|(f, x)| (f.name, x)))
                .collect::<Result<_, _>>()?
        };
        match &run.perversity {
            None => {
                let borrowed: Vec<(&str, StratifiedComplex)> =
                    list.iter().map(|(id, x)| (id.as_str(), x.clone())).collect();
                diagrams::run_cone_suite(&borrowed, field)
            }
            Some(text) => {
                let choice = parse_perversity(text)?;
                let mut out = Vec::new();
                for (id, x) in &list {
                    for p in choice.resolve(x, run.seed).map_err(InputError::new)? {
                        out.push(diagrams::check_cone_formula(id, x, &p, field));
                    }
                }
                diagrams::sort_reports(&mut out);
                out
            }
        }
    };
    Ok(report_outcome(&reports, run.format))
}

fn cmd_signcalc_test(trials: usize, run: &RunArgs) -> Result<Outcome, InputError> {
    let field = parse_field(&run.field)?;
    let ns: Vec<i64> = match &run.degrees {
        None => (0..=3).collect(),
        Some(s) => parse_degrees(s)?.into_iter().map(|d| d as i64).collect(),
    };
    let outcomes = signcalc::run_trials(field, &ns, trials, run.seed);
    let code = if outcomes.iter().all(|o| o.passed()) { EXIT_PASS } else { EXIT_DEFECT };
    let output = render(run.format, &outcomes, || {
        let mut s = String::from("identity\tn\ttrials\tfailures\tstatus\tfirst_failure\n");
        for o in &outcomes {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                o.identity.name(),
                o.n,
                o.trials,
                o.failures,
                if o.passed() { "pass" } else { "fail" },
                o.first_failure.as_deref().unwrap_or("")
            ));
        }
        s
    });
    Ok(Outcome { output, code })
}

fn cmd_subdivide(space: &str, times: usize) -> Result<Outcome, InputError> {
    let (_, mut x) = load_space(space)?;
    for _ in 0..times {
        x = x.barycentric_subdivide();
    }
    Ok(Outcome { output: SpaceFile::from_complex(&x).to_json(), code: EXIT_PASS })
}

#[derive(Serialize)]
struct ValidateOutput {
    name: String,
    valid: bool,
    flag_like: bool,
    strata: usize,
    f_vector: Vec<usize>,
    violations: Vec<String>,
    non_flag_like: Vec<String>,
}

fn cmd_validate(space: &str, run: &RunArgs) -> Result<Outcome, InputError> {
    let (name, x) = if space.starts_with("corpus:") {
        let (f, x) = load_space(space)?;
        (f.name, x)
    } else {
        let f = SpaceFile::load(space)?;
        (f.name.clone(), f.build()?)
    };
    let r = x.validate();
    let out = ValidateOutput {
        name,
        valid: r.is_valid(),
        flag_like: r.is_flag_like(),
        strata: r.strata,
        f_vector: x.f_vector(),
        violations: r.violations.iter().map(|v| v.to_string()).collect(),
        non_flag_like: r.non_flag_like.iter().map(|s| s.to_string()).collect(),
    };
    let output = render(run.format, &out, || {
        let mut s = format!(
            "name\t{}\nvalid\t{}\nflag_like\t{}\nstrata\t{}\nf_vector\t{}\n",
            out.name,
            out.valid,
            out.flag_like,
            out.strata,
            out.f_vector.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
        );
        for v in &out.violations {
            s.push_str(&format!("violation\t{v}\n"));
        }
        for t in &out.non_flag_like {
            s.push_str(&format!("non_flag_like\t{t}\n"));
        }
        s
    });
    if !r.is_valid() {
        let first = r.violations[0].simplex.to_string();
        eprintln!("error: invalid space\n  offending simplex: {first}");
        return Ok(Outcome { output, code: EXIT_INPUT });
    }
    Ok(Outcome { output, code: EXIT_PASS })
}

fn run_args(c: &Command) -> &RunArgs {
    match c {
        Command::Ih { run, .. }
        | Command::DualCheck { run, .. }
        | Command::Pairing { run, .. }
        | Command::ConeCheck { run, .. }
        | Command::SigncalcTest { run, .. }
        | Command::Subdivide { run, .. }
        | Command::Validate { run, .. } => run,
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, InputError> {
    let run = run_args(&cli.command);
    match &cli.command {
        Command::Ih { space, .. } => cmd_ih(space, run),
        Command::DualCheck { spaces, .. } => cmd_dual_check(spaces, run),
        Command::Pairing { space, .. } => cmd_pairing(space, run),
        Command::ConeCheck { links, .. } => cmd_cone_check(links, run),
        Command::SigncalcTest { trials, .. } => cmd_signcalc_test(*trials, run),
        Command::Subdivide { space, times, .. } => cmd_subdivide(space, *times),
        Command::Validate { space, .. } => cmd_validate(space, run),
    }
}

/// Parses arguments, runs, writes output, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let run = run_args(&cli.command);
            match &run.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.output) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None => {
                    let _ = std::io::stdout().write_all(outcome.output.as_bytes());
                }
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_lists() {
        assert_eq!(parse_degrees("1..3").unwrap().into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(parse_degrees("0, 2").unwrap().len(), 2);
        assert!(parse_degrees("x").is_err());
    }

    #[test]
    fn perversity_specs() {
        assert_eq!(parse_perversity("grid").unwrap(), PerversityChoice::Grid);
        assert_eq!(parse_perversity("m").unwrap(), PerversityChoice::Gm(GmName::LowerMiddle));
        let PerversityChoice::Table(t) = parse_perversity("0:1, 1:-1").unwrap() else { panic!() };
        assert_eq!(t[&1], -1);
        assert!(parse_perversity("0=1").is_err());
    }

    #[test]
    fn exit_codes() {
        let missing = main_with_args(["ihdual", "ih", "/nonexistent/space.json"]);
        assert_eq!(missing, EXIT_INPUT);
        let bad_field = main_with_args(["ihdual", "ih", "corpus:S2", "--field", "p:4", "--out", "/dev/null"]);
        assert_eq!(bad_field, EXIT_INPUT);
        let ok = main_with_args(["ihdual", "ih", "corpus:S2", "--out", "/dev/null"]);
        assert_eq!(ok, EXIT_PASS);
    }
}
