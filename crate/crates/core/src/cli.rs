//! The `toeplitz` command line.
//!
//! Exit codes: 0 success, 1 a `--check` comparison failed, 2 bad usage or
//! input, 3 a budget or generator horizon was exhausted.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::boshernitzan::{bosh_verdict, estimate_eta, min_eta_prefix};
use crate::coding::{Coding, DEFAULT_GENERATOR_HORIZON};
use crate::complexity::{complexity, growth, ComplexityProfile};
use crate::debruijn::{build_graph, check_landmarks, palindrome_profile, palindromes};
use crate::error::Error;
use crate::grammar::{parse_coding_with, parse_u64_list};
use crate::language::{covering_prefix_len, language, LanguageSet};
use crate::presets::{preset_with, PRESETS};
use crate::repetitivity::{alpha_verdict, parse_alpha, repetitivity_profile, Decision};
use crate::spectral::{finite_section_spectrum, lyapunov_grid, CoefficientMap};
use crate::words::{Subshift, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(
    name = "toeplitz",
    version,
    about = "Simple Toeplitz subshifts: formulas and oracles"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Coding spec, e.g. "a:2 | x:2 y:2 z:2" or "| @liuqu(2)".
    #[arg(long, global = true, conflicts_with = "preset")]
    pub coding: Option<String>,
    /// Named coding, e.g. grigorchuk or l-grigorchuk(1,2,3).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Period list for presets that take one (comma separated).
    #[arg(long, global = true)]
    pub periods: Option<String>,
    /// Number of generator entries materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_GENERATOR_HORIZON)]
    pub gen_horizon: usize,
    /// Maximal number of symbols held in memory.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Emit JSON instead of text or CSV; to stdout, or to PATH when given.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub json: Option<PathBuf>,
    /// Write the per-L table to this CSV file.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Compare formulas against oracles and fail on mismatch.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a prefix of the one-sided word.
    Gen {
        #[arg(long)]
        length: usize,
    },
    /// List the factors of one length.
    Language {
        #[arg(short = 'L', long = "len")]
        len: usize,
    },
    /// Complexity and growth by formula (and oracle with --check).
    Complexity {
        #[arg(long)]
        max_len: u64,
    },
    /// Palindrome counts by formula (and oracle with --check).
    Palindrome {
        #[arg(long)]
        max_len: u64,
    },
    /// The de Bruijn graph of one length.
    Debruijn {
        #[arg(short = 'L', long = "len")]
        len: usize,
        /// Write Graphviz output to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Repetitivity by formula, stitched with the oracle below its range.
    Repetitivity {
        #[arg(long)]
        max_len: u64,
        /// Also decide alpha-repetitivity, e.g. 1, 3/2 or 1.5.
        #[arg(long)]
        alpha: Option<String>,
        /// Samples of the m-sequence for the alpha verdict.
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// Boshernitzan condition.
    Bosh {
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Estimate the minimal factor frequency at this length.
        #[arg(long)]
        eta: Option<usize>,
        /// Prefix length for --eta.
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Finite-section spectrum and Lyapunov estimates.
    Spectrum {
        /// Diagonal per letter, e.g. "a=0,x=1,y=2,z=3".
        #[arg(long)]
        q: String,
        /// Off-diagonal per letter.
        #[arg(long, default_value = "const=1")]
        p: String,
        /// Finite-section size N.
        #[arg(long)]
        size: usize,
        /// Half-width of the intervals placed around each eigenvalue.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Energy grid lo:hi:steps for Lyapunov estimates.
        #[arg(long, allow_hyphen_values = true)]
        energies: Option<String>,
        /// Cocycle length for Lyapunov estimates.
        #[arg(long, default_value_t = 4096)]
        lyapunov: usize,
    },
    /// List the named codings.
    Presets,
}

#[derive(Debug)]
pub struct CliError {
    pub flag: String,
    pub message: String,
    pub code: i32,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.flag, self.message)
    }
}

impl CliError {
    fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError {
            flag: flag.into(),
            message: message.into(),
            code: 2,
        }
    }
}

/// Attaches the flag responsible for an error.
trait Flag<T> {
    fn flag(self, flag: &str) -> Result<T, CliError>;
}

impl<T> Flag<T> for crate::error::Result<T> {
    fn flag(self, flag: &str) -> Result<T, CliError> {
        self.map_err(|e| {
            let (flag, code) = match &e {
                Error::BudgetExceeded { .. } => ("--budget", 3),
                Error::HorizonExceeded { .. } => ("--gen-horizon", 3),
                Error::Overflow(_) => (flag, 3),
                _ => (flag, 2),
            };
            CliError {
                flag: flag.into(),
                message: e.to_string(),
                code,
            }
        })
    }
}

impl<T> Flag<T> for std::io::Result<T> {
    fn flag(self, flag: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::usage(flag, e.to_string()))
    }
}

/// What a successful run reports: whether every `--check` comparison held.
pub struct Outcome {
    pub check_failures: Vec<String>,
}

fn load_coding(g: &Global) -> Result<Coding, CliError> {
    let periods = match &g.periods {
        Some(p) => Some(parse_u64_list(p).flag("--periods")?),
        None => None,
    };
    match (&g.coding, &g.preset) {
        (Some(spec), None) => {
            if periods.is_some() {
                return Err(CliError::usage("--periods", "only applies to --preset"));
            }
            let raw = parse_coding_with(spec, g.gen_horizon).flag("--coding")?;
            raw.normalize().flag("--coding")
        }
        (None, Some(name)) => preset_with(name, periods.as_deref(), g.gen_horizon).flag("--preset"),
        _ => Err(CliError::usage(
            "--coding",
            "give exactly one of --coding or --preset",
        )),
    }
}

fn write_csv<T: Serialize>(rows: &[T], mut sink: impl Write, flag: &str) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(&mut sink);
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::usage(flag, e.to_string()))?;
    }
    w.flush().flag(flag)
}

fn write_file(path: &Path, contents: &[u8], flag: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::usage(flag, format!("{}: {e}", path.display())))
}

fn to_csv_bytes<T: Serialize>(rows: &[T], flag: &str) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf, flag)?;
    Ok(buf)
}

fn json_line(g: &Global, value: &impl Serialize, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match &g.json {
        Some(path) if path.as_os_str() != "-" => {
            write_file(path, format!("{text}\n").as_bytes(), "--json")
        }
        _ => writeln!(out, "{text}").flag("--json"),
    }
}

/// Emits a per-L table: JSON to stdout, CSV to `--csv`, or CSV to stdout.
fn emit_table<T: Serialize>(g: &Global, rows: &[T], out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &g.csv {
        write_file(path, &to_csv_bytes(rows, "--csv")?, "--csv")?;
    }
    if g.json.is_some() {
        json_line(g, &rows, out)
    } else if g.csv.is_none() {
        out.write_all(&to_csv_bytes(rows, "--csv")?).flag("--csv")
    } else {
        Ok(())
    }
}

fn io(r: std::io::Result<()>) -> Result<(), CliError> {
    r.flag("stdout")
}

/// Runs a parsed command, writing reports to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if g.budget == 0 {
        return Err(CliError::usage("--budget", "must be positive"));
    }
    let mut failures = Vec::new();
    if let Command::Presets = cli.command {
        if g.json.is_some() {
            let list: Vec<_> = PRESETS
                .iter()
                .map(|p| serde_json::json!({"name": p.name, "usage": p.usage, "description": p.description}))
                .collect();
            json_line(g, &list, out)?;
        } else {
            for p in PRESETS {
                io(writeln!(out, "{:<24} {}", p.usage, p.description))?;
            }
        }
        return Ok(Outcome {
            check_failures: failures,
        });
    }
    let coding = load_coding(g)?;
    let sub = Subshift::with_budget(coding, g.budget);
    let c = sub.coding();

    match &cli.command {
        Command::Presets => unreachable!(),
        Command::Gen { length } => {
            let word = sub.render(&sub.word_prefix(*length).flag("--length")?);
            if g.json.is_some() {
                json_line(
                    g,
                    &serde_json::json!({"coding": c.to_string(), "length": length, "word": word}),
                    out,
                )?;
            } else {
                io(writeln!(out, "{word}"))?;
            }
        }
        Command::Language { len } => {
            let set = language(&sub, *len).flag("-L")?;
            if g.check {
                let m = covering_prefix_len(&sub, *len).flag("-L")?;
                let prefix = sub.word_prefix(m).flag("-L")?;
                if LanguageSet::factors_of(&prefix, *len) != set {
                    failures.push(format!(
                        "language({len}) differs from the factors of a prefix of length {m}"
                    ));
                }
            }
            let words: Vec<String> = set.iter().map(|w| sub.render(w)).collect();
            if let Some(path) = &g.csv {
                let rows: Vec<_> = words.iter().map(|w| [w]).collect();
                let mut buf = b"word\n".to_vec();
                write_csv(&rows, &mut buf, "--csv")?;
                write_file(path, &buf, "--csv")?;
            }
            if g.json.is_some() {
                json_line(g, &words, out)?;
            } else if g.csv.is_none() {
                for w in &words {
                    io(writeln!(out, "{w}"))?;
                }
            }
        }
        Command::Complexity { max_len } => {
            let profile = ComplexityProfile::build(&sub, *max_len, g.check).flag("--max-len")?;
            for l in profile.mismatches() {
                failures.push(format!("complexity formula differs from oracle at L={l}"));
            }
            emit_table(g, &profile.records, out)?;
        }
        Command::Palindrome { max_len } => {
            let rows = palindrome_profile(&sub, *max_len, g.check).flag("--max-len")?;
            for r in &rows {
                if let Some(o) = r.oracle {
                    if o.to_string() != r.formula {
                        failures.push(format!(
                            "palindrome formula differs from oracle at L={}",
                            r.len
                        ));
                    }
                }
            }
            emit_table(g, &rows, out)?;
        }
        Command::Debruijn { len, dot } => {
            let graph = build_graph(&sub, *len).flag("-L")?;
            if let Some(path) = dot {
                write_file(path, graph.to_dot(&sub).as_bytes(), "--dot")?;
            }
            let landmark = if *len >= 1 {
                Some(check_landmarks(&sub, &graph).flag("-L")?)
            } else {
                None
            };
            if g.check {
                let l = *len as u64;
                let expect = |what: &str, got: String, want: String, failures: &mut Vec<String>| {
                    if got != want {
                        failures.push(format!("{what}: graph has {got}, formula gives {want}"));
                    }
                };
                expect(
                    "vertices",
                    graph.vertex_count().to_string(),
                    complexity(c, l).flag("-L")?.to_string(),
                    &mut failures,
                );
                expect(
                    "edges",
                    graph.edge_count().to_string(),
                    complexity(c, l + 1).flag("-L")?.to_string(),
                    &mut failures,
                );
                expect(
                    "branching excess",
                    graph.branching_excess().to_string(),
                    growth(c, l).flag("-L")?.to_string(),
                    &mut failures,
                );
                if l >= 1 {
                    expect(
                        "palindromic vertices",
                        graph.palindromic_vertices().len().to_string(),
                        palindromes(c, l).flag("-L")?.to_string(),
                        &mut failures,
                    );
                }
                if !graph.is_strongly_connected() {
                    failures.push("graph is not strongly connected".into());
                }
                if !graph.reflection_check() {
                    failures.push("reflection is not an anti-automorphism".into());
                }
                if let Some(check) = &landmark {
                    if !check.passes() {
                        failures.push(format!("landmark out-degrees differ: {check:?}"));
                    }
                }
            }
            if g.json.is_some() {
                let mut value = graph.to_json(&sub);
                value["landmark_check"] = serde_json::to_value(&landmark).expect("serializable");
                json_line(g, &value, out)?;
            } else {
                io(writeln!(
                    out,
                    "L={} vertices={} edges={}",
                    len,
                    graph.vertex_count(),
                    graph.edge_count()
                ))?;
                for r in graph.right_special_report() {
                    io(writeln!(
                        out,
                        "right-special {} out-degree {}",
                        sub.render(&graph.vertices.words[r.vertex]),
                        r.out_degree
                    ))?;
                }
                io(writeln!(
                    out,
                    "strongly-connected={} reflection-symmetric={} palindromes={}",
                    graph.is_strongly_connected(),
                    graph.reflection_check(),
                    graph.palindromic_vertices().len()
                ))?;
            }
        }
        Command::Repetitivity {
            max_len,
            alpha,
            horizon,
        } => {
            let rows = repetitivity_profile(&sub, *max_len, g.check).flag("--max-len")?;
            for r in &rows {
                if let (Some(f), Some(o)) = (&r.formula, r.oracle) {
                    if f != &o.to_string() {
                        failures.push(format!(
                            "repetitivity formula differs from oracle at L={}",
                            r.len
                        ));
                    }
                }
            }
            let verdict = match alpha {
                Some(a) => {
                    let a = parse_alpha(a).flag("--alpha")?;
                    Some(alpha_verdict(c, &a, *horizon).flag("--horizon")?)
                }
                None => None,
            };
            if let Some(path) = &g.csv {
                write_file(path, &to_csv_bytes(&rows, "--csv")?, "--csv")?;
            }
            if g.json.is_some() {
                json_line(
                    g,
                    &serde_json::json!({"records": rows, "alpha": verdict}),
                    out,
                )?;
            } else {
                if g.csv.is_none() {
                    out.write_all(&to_csv_bytes(&rows, "--csv")?)
                        .flag("stdout")?;
                }
                if let Some(v) = &verdict {
                    json_line(g, v, out)?;
                }
            }
        }
        Command::Bosh {
            horizon,
            eta,
            prefix,
        } => {
            let verdict = bosh_verdict(c, *horizon).flag("--horizon")?;
            if g.check {
                if c.is_periodic() && verdict.verdict != Decision::Satisfied {
                    failures.push("eventually periodic coding not reported as satisfying the Boshernitzan condition".into());
                }
                if let Some(lim) = &verdict.liminf_check {
                    if lim.verdict != verdict.verdict {
                        failures.push(
                            "three-letter criterion disagrees with the product criterion".into(),
                        );
                    }
                }
            }
            let eta = match eta {
                Some(len) => {
                    let m = match prefix {
                        Some(m) => *m,
                        None => min_eta_prefix(&sub, *len).flag("--eta")?.max(1 << 16),
                    };
                    Some(estimate_eta(&sub, *len, m).flag("--prefix")?)
                }
                None => None,
            };
            if let Some(path) = &g.csv {
                write_file(path, &to_csv_bytes(&verdict.products, "--csv")?, "--csv")?;
            }
            if g.json.is_some() {
                json_line(g, &serde_json::json!({"bosh": verdict, "eta": eta}), out)?;
            } else {
                io(writeln!(
                    out,
                    "verdict={} kind={}",
                    verdict.verdict, verdict.kind
                ))?;
                let products: Vec<String> = verdict
                    .products
                    .iter()
                    .map(|w| w.product.to_string())
                    .collect();
                io(writeln!(out, "products={}", products.join(",")))?;
                io(writeln!(out, "trend={}", verdict.trend))?;
                if let Some(p) = verdict.period {
                    io(writeln!(
                        out,
                        "period start={} length={}",
                        p.start, p.period
                    ))?;
                }
                if let Some(lim) = &verdict.liminf_check {
                    io(writeln!(
                        out,
                        "three-letter liminf check={} values={}",
                        lim.verdict,
                        lim.values.join(",")
                    ))?;
                }
                if let Some(win) = &verdict.window_check {
                    io(writeln!(
                        out,
                        "power-of-two window check={} values={}",
                        win.verdict,
                        win.values.join(",")
                    ))?;
                }
                if let Some(e) = &eta {
                    io(writeln!(
                        out,
                        "eta L={} M={} min_count={} windows={} frequency={} argmin={}",
                        e.len,
                        e.prefix,
                        e.min_count,
                        e.windows,
                        e.frequency(),
                        e.argmin
                    ))?;
                }
            }
        }
        Command::Spectrum {
            q,
            p,
            size,
            delta,
            energies,
            lyapunov,
        } => {
            // Parse p on its own first so its errors name the right flag.
            let coeff = CoefficientMap::parse(c.alphabet(), p, "const=0")
                .flag("--p")
                .and_then(|_| CoefficientMap::parse(c.alphabet(), p, q).flag("--q"))?;
            if let Some(w) = coeff.degeneracy_warning(&sub) {
                eprintln!("{w}");
            }
            let spectrum = finite_section_spectrum(&sub, &coeff, *size, *delta).flag("--size")?;
            if g.check {
                let (pmax, qmin, qmax) = coeff.bounds();
                let (lo, hi) = (qmin - 2.0 * pmax - 1e-9, qmax + 2.0 * pmax + 1e-9);
                if spectrum.eigenvalues.iter().any(|&e| e < lo || e > hi) {
                    failures.push("eigenvalue outside the coefficient bounds".into());
                }
            }
            let grid = match energies {
                Some(spec) => {
                    let parts: Vec<&str> = spec.split(':').collect();
                    let bad = || {
                        CliError::usage("--energies", format!("expected lo:hi:steps, got `{spec}`"))
                    };
                    if parts.len() != 3 {
                        return Err(bad());
                    }
                    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
                    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
                    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
                    if steps == 0 {
                        return Err(bad());
                    }
                    Some(lyapunov_grid(&sub, &coeff, lo, hi, steps, *lyapunov).flag("--lyapunov")?)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct Eigen {
                j: usize,
                eigenvalue: f64,
            }
            let rows: Vec<Eigen> = spectrum
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(j, &e)| Eigen {
                    j: j + 1,
                    eigenvalue: e,
                })
                .collect();
            if let Some(path) = &g.csv {
                write_file(path, &to_csv_bytes(&rows, "--csv")?, "--csv")?;
            }
            if g.json.is_some() {
                json_line(
                    g,
                    &serde_json::json!({"spectrum": spectrum, "lyapunov": grid}),
                    out,
                )?;
            } else {
                io(writeln!(
                    out,
                    "size={} delta={} intervals={} cover_length={}",
                    spectrum.size,
                    spectrum.delta,
                    spectrum.cover.len(),
                    spectrum.cover_length
                ))?;
                if g.csv.is_none() {
                    out.write_all(&to_csv_bytes(&rows, "--csv")?)
                        .flag("stdout")?;
                }
                if let Some(grid) = &grid {
                    io(writeln!(out, "E,n,lyapunov,quarter,half"))?;
                    for est in grid {
                        io(writeln!(
                            out,
                            "{},{},{},{},{}",
                            est.energy, est.n, est.value, est.samples[0].1, est.samples[1].1
                        ))?;
                    }
                }
            }
        }
    }
    Ok(Outcome {
        check_failures: failures,
    })
}

/// Parses `args`, runs on a pool of `--jobs` workers and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            let _ = writeln!(err, "{}", CliError::usage("--jobs", "must be positive"));
            return 2;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{}", CliError::usage("--jobs", e.to_string()));
            return 2;
        }
    };
    let (result, buffer) = pool.install(|| {
        let mut buffer = Vec::new();
        (execute(&cli, &mut buffer), buffer)
    });
    let _ = out.write_all(&buffer);
    match result {
        Ok(outcome) if outcome.check_failures.is_empty() => 0,
        Ok(outcome) => {
            for f in &outcome.check_failures {
                let _ = writeln!(err, "check failed: {f}");
            }
            1
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.code
        }
    }
}
