use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kldihedral::algebra::{kl_multiply, structure_constants};
use kldihedral::cells::{cell_module, compute_cells, Side};
use kldihedral::classify::{classify_with, ClassifyConfig, KnowledgeTable, DEFAULT_ENTRY_BOUND, DEFAULT_MAX_STATES};
use kldihedral::dihedral::DihedralGroup;
use kldihedral::nimrep::{FilterConfig, FilterId, MatrixPair, NimrepContext};
use kldihedral::poly::IntPoly;
use kldihedral::reps::decompose;
use kldihedral::verify::{run_check, check_ids, Suite, VerifyOptions};
use kldihedral::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE_GUARD: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Parser)]
#[command(name = "kldihedral", version, about = "KL cells, cell modules and NIM-rep classification for dihedral groups")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Left, right and two-sided cells of D_n.
    Cells {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Matrices and decomposition of a left cell module.
    Cellrep {
        #[arg(long)]
        n: u32,
        /// One of Le, Ls, Lt, Lw0.
        #[arg(long)]
        cell: String,
        /// Print A_w for every w, not only the generators.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Bounded search for admissible matrix pairs.
    Classify {
        #[arg(long)]
        n: u32,
        /// Comma-separated ranks, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        ranks: Vec<usize>,
        #[arg(long = "entry-bound", short = 'E', default_value_t = DEFAULT_ENTRY_BOUND)]
        entry_bound: i64,
        /// Switch a filter off (F1, F3, F4, F6, F7 or ANN); repeatable.
        #[arg(long = "no-filter", value_name = "ID")]
        no_filter: Vec<String>,
        #[arg(long, env = "KLDIHEDRAL_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long = "max-states", default_value_t = DEFAULT_MAX_STATES)]
        max_states: u64,
        /// Knowledge table to use instead of the bundled one.
        #[arg(long)]
        knowledge: Option<PathBuf>,
        /// Report wall time on standard error.
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        /// Run only these checks, e.g. A6; repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// Coefficients, lowest degree first, that A6 expects.
        #[arg(long = "expect-annihilator", hide = true, value_delimiter = ',', allow_hyphen_values = true)]
        expect_annihilator: Option<Vec<i64>>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decompose the module given by a matrix pair JSON file ("-" for stdin).
    Decompose {
        #[arg(long)]
        n: Option<u32>,
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Product of two KL basis elements.
    Klmult {
        #[arg(long)]
        n: u32,
        u: String,
        w: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidOrder(_)
            | Error::InvalidElement(_)
            | Error::Parse { .. }
            | Error::Shape(_)
            | Error::InvalidParameters(_)
            | Error::RankTooLarge(_)
            | Error::UnknownCell(_)
            | Error::Knowledge(_)
            | Error::Json(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Rendered output plus the exit code to finish with.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn no_dot(format: Format) -> Result<(), Failure> {
    if format == Format::Dot {
        return Err(usage("--format dot is only available for the cells command"));
    }
    Ok(())
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serialises");
    s.push('\n');
    s
}

fn matrix_text(name: &str, m: &kldihedral::matrix::IntMatrix) -> String {
    let mut out = format!("{name} =\n");
    for line in m.to_string().lines() {
        let _ = writeln!(out, "  {line}");
    }
    out
}

fn cmd_cells(n: u32, format: Format) -> Result<Output, Failure> {
    let table = structure_constants(n)?;
    let cells = compute_cells(&table);
    let g = table.group();
    Ok(Output::ok(match format {
        Format::Json => pretty(&cells.to_json()),
        Format::Dot => cells.to_dot(),
        Format::Text => {
            let mut out = format!("D_{n}: {} elements\n", g.order());
            for (title, side) in [("left cells", Side::Left), ("right cells", Side::Right)] {
                let _ = writeln!(out, "{title}:");
                for i in 0..cells.cells(side).len() {
                    let members: Vec<String> = cells.cells(side)[i].iter().map(|w| g.render(w)).collect();
                    let _ = writeln!(out, "  {:<4} {{{}}}", cells.cell_name(side, i), members.join(", "));
                }
            }
            let _ = writeln!(out, "two-sided cells:");
            for j in cells.two_sided_chain() {
                let members: Vec<String> = cells.two_sided_cells()[j].iter().map(|w| g.render(w)).collect();
                let regular = if cells.is_strongly_regular(j).regular { "strongly regular" } else { "not strongly regular" };
                let _ = writeln!(out, "  {:<4} {{{}}}  {regular}", cells.cell_name(Side::TwoSided, j), members.join(", "));
            }
            let chain: Vec<String> = cells.two_sided_chain().iter().map(|&j| cells.cell_name(Side::TwoSided, j)).collect();
            let _ = writeln!(out, "two-sided order: {}", chain.join(" < "));
            out
        }
    }))
}

fn cmd_cellrep(n: u32, cell: &str, all: bool, format: Format) -> Result<Output, Failure> {
    no_dot(format)?;
    let table = structure_constants(n)?;
    let cells = compute_cells(&table);
    let g = table.group();
    let index = cells.find_cell(Side::Left, cell).ok_or_else(|| Error::UnknownCell(cell.to_string()))?;
    let module = cell_module(&table, &cells, index)?;
    let (a_s, a_t) = module.generator_pair(g);
    let d = decompose(n, &a_s, &a_t)?;
    Ok(Output::ok(match format {
        Format::Json => {
            let mut v = module.to_json(g, all);
            v["decomposition"] = serde_json::to_value(&d).map_err(Error::from)?;
            pretty(&v)
        }
        _ => {
            let basis: Vec<String> = module.basis.iter().map(|w| g.render(w)).collect();
            let mut out = format!("cell module {} of D_{n}, basis ({})\n", module.name, basis.join(", "));
            for (w, m) in &module.matrices {
                if all || w.length() == 1 {
                    out.push_str(&matrix_text(&format!("A_{}", g.render(w)), m));
                }
            }
            let _ = writeln!(out, "decomposition: {d}");
            out
        }
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_classify(
    n: u32,
    ranks: Vec<usize>,
    entry_bound: i64,
    no_filter: &[String],
    jobs: usize,
    max_states: u64,
    knowledge: Option<PathBuf>,
    timing: bool,
    format: Format,
) -> Result<Output, Failure> {
    no_dot(format)?;
    let mut filters = FilterConfig::default();
    for f in no_filter {
        let id: FilterId = f.parse()?;
        if id.is_mandatory() {
            return Err(usage(format!("{id} is part of the extension and cannot be switched off")));
        }
        filters = filters.without(id);
    }
    let knowledge = match knowledge {
        Some(path) => KnowledgeTable::from_path(&path)?,
        None => KnowledgeTable::builtin(),
    };
    let config = ClassifyConfig { n, ranks, entry_bound, filters, jobs, max_states };
    let ctx = NimrepContext::new(n)?;
    let report = classify_with(&ctx, &config, &knowledge)?;
    if timing {
        eprintln!("classified in {:.3}s", report.elapsed.as_secs_f64());
    }
    let text = match format {
        Format::Json => pretty(&report.to_json()),
        _ => report.to_text(),
    };
    if report.guard_tripped {
        eprintln!("resource guard tripped after {max_states} states; the report is partial");
        return Ok(Output { text, code: EXIT_RESOURCE_GUARD });
    }
    Ok(Output::ok(text))
}

fn cmd_verify(suite: &str, only: &[String], expect: Option<Vec<i64>>, format: Format) -> Result<Output, Failure> {
    no_dot(format)?;
    let mut opts = VerifyOptions::new(suite.parse::<Suite>()?);
    if let Some(coeffs) = expect {
        opts.expected_annihilator = IntPoly::from_i64(&coeffs);
    }
    let ids: Vec<String> = if only.is_empty() { check_ids().map(String::from).collect() } else { only.to_vec() };
    let mut results = Vec::new();
    for id in &ids {
        results.push(run_check(id, &opts).ok_or_else(|| usage(format!("unknown check {id:?}; expected A1..A12")))?);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let text = match format {
        Format::Json => pretty(&json!({
            "suite": opts.suite,
            "passed": failed.is_empty(),
            "checks": results,
        })),
        _ => {
            let mut out = String::new();
            for r in &results {
                let _ = writeln!(out, "{r}");
            }
            if failed.is_empty() {
                let _ = writeln!(out, "all {} checks passed", results.len());
            } else {
                let _ = writeln!(out, "FAILED: {}", failed.join(", "));
            }
            out
        }
    };
    Ok(Output { text, code: if failed.is_empty() { 0 } else { EXIT_CHECK_FAILED } })
}

fn cmd_decompose(n: Option<u32>, file: &PathBuf, format: Format) -> Result<Output, Failure> {
    no_dot(format)?;
    let text = if file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?
    };
    let pair = MatrixPair::from_json_str(&text)?;
    if let Some(n) = n {
        if n != pair.n() {
            return Err(Error::MismatchedOrder(n, pair.n()).into());
        }
    }
    let d = decompose(pair.n(), pair.theta_s(), pair.theta_t())?;
    Ok(Output::ok(match format {
        Format::Json => pretty(&serde_json::to_value(&d).map_err(Error::from)?),
        _ => format!("{d}\n"),
    }))
}

fn cmd_klmult(n: u32, u: &str, w: &str, format: Format) -> Result<Output, Failure> {
    no_dot(format)?;
    let g = DihedralGroup::new(n)?;
    let (u, w) = (g.parse(u)?, g.parse(w)?);
    let product = kl_multiply(&g, &u, &w)?;
    Ok(Output::ok(match format {
        Format::Json => pretty(&product.to_json(&g)),
        _ => format!("{}\n", product.render(&g)),
    }))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Cells { n, format } => cmd_cells(n, format),
        Command::Cellrep { n, cell, all, format } => cmd_cellrep(n, &cell, all, format),
        Command::Classify { n, ranks, entry_bound, no_filter, jobs, max_states, knowledge, timing, format } => {
            cmd_classify(n, ranks, entry_bound, &no_filter, jobs, max_states, knowledge, timing, format)
        }
        Command::Verify { suite, only, expect_annihilator, format } => cmd_verify(&suite, &only, expect_annihilator, format),
        Command::Decompose { n, file, format } => cmd_decompose(n, &file, format),
        Command::Klmult { n, u, w, format } => cmd_klmult(n, &u, &w, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output_path = cli.output.clone();
    match run(cli) {
        Ok(out) => {
            let written = match &output_path {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
