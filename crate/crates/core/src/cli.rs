//! Batch command-line front end: every subcommand is a pure function from
//! flags and input files to a deterministic JSON or text payload.
//!
//! Exit codes: 0 on success, 1 for domain/capacity errors (with a
//! machine-readable error envelope on standard error), 2 for usage errors.

use crate::coeffalg::{FreeGroupModel, Matrix, MatrixTensorModel, PSpaceModel};
use crate::compat::{
    generator_word_corpus, is_compatible, sampled_corpus, verify_compatible_subalgebra_theorem,
};
use crate::cumulant::multilinear::{BRing, MatrixBRing};
use crate::cumulant::{
    cumulants_from_moments, cumulants_from_moments_central, moments_from_cumulants,
    moments_from_cumulants_central, property_star_check, CumulantTable, MomentTable,
};
use crate::distributions::{b_semicircular_moments, semicircular_cumulants};
use crate::freeness::{
    boxed_convolution_central, boxed_convolution_scalar, r_concatenate,
};
use crate::json::{rat_to_json, table_from_str, table_to_json, TablePayload};
use crate::ncpart::{
    enumerate_nc, enumerate_nc_even, enumerate_nc_pair, mobius, NoncrossingPartition,
};
use crate::scalar::{parse_rat, Rat, Scalar};
use crate::series::{solve_moment_from_r, FormalSeries, Word};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;
use std::sync::Arc;

/// Environment variable holding the default truncation order.
pub const ORDER_ENV: &str = "FREEPROB_ORDER";

const DEFAULT_ORDER: usize = 8;

#[derive(Parser)]
#[command(
    name = "freeprob",
    version,
    about = "Combinatorial free-probability calculus over noncrossing partitions"
)]
struct Cli {
    /// Payload form: canonical JSON or an aligned text table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModelKind {
    Matrix,
    Freegroup,
}

#[derive(Subcommand)]
enum Command {
    /// Noncrossing-partition lattice operations.
    Nc {
        #[command(subcommand)]
        sub: NcCommand,
    },
    /// Möbius-invert a moment table into cumulants.
    Cumulants {
        /// Table envelope file ("-" for standard input).
        #[arg(long = "from-moments")]
        from_moments: PathBuf,
    },
    /// Sum a cumulant table back into moments.
    Moments {
        /// Table envelope file ("-" for standard input).
        #[arg(long = "from-cumulants")]
        from_cumulants: PathBuf,
    },
    /// R-transform arithmetic on cumulant-table files.
    Rcalc {
        #[command(subcommand)]
        sub: RcalcCommand,
    },
    /// Solve the one-variable functional equation m(z) = r(z(1 + m(z))).
    #[command(name = "solve-m")]
    SolveM {
        /// One-variable scalar R-transform envelope file.
        #[arg(long)]
        r: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Check phi(a) = phi(E(a)) on a corpus of generator words.
    #[command(name = "check-compat")]
    CheckCompat {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Matrix model: size of B = M_N.
        #[arg(long = "N", default_value_t = 3)]
        n_dim: usize,
        /// Matrix model: size of the tensor factor.
        #[arg(long = "K", default_value_t = 2)]
        k_dim: usize,
        /// Corpus length bound.
        #[arg(long = "max-len", default_value_t = 4)]
        max_len: usize,
        /// Sample this many random words (with B-insertions) instead of
        /// enumerating all generator words.
        #[arg(long)]
        sampled: Option<usize>,
        /// Seed for the sampled corpus.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Check the identity k_n(w) = phi(K_n^t(w)) word by word.
    #[command(name = "property-star")]
    PropertyStar {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long = "N", default_value_t = 3)]
        n_dim: usize,
        #[arg(long = "K", default_value_t = 2)]
        k_dim: usize,
    },
    /// Verify the B-central compatible-subalgebra construction.
    #[command(name = "subalgebra-theorem")]
    SubalgebraTheorem {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// K-factor matrix of x0 = 1_N (x) m, as JSON rows of "p/q" strings.
        #[arg(long)]
        x0: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long = "N", default_value_t = 2)]
        n_dim: usize,
        #[arg(long = "K", default_value_t = 2)]
        k_dim: usize,
    },
    /// Semicircular moment and cumulant tables.
    Semicircular {
        /// Variance as a rational literal "p/q".
        #[arg(long)]
        t: String,
        #[arg(long)]
        order: Option<usize>,
        /// Emit the operator-valued tables (B-central case).
        #[arg(long = "b-valued")]
        b_valued: bool,
        /// Dimension of B for the operator-valued tables.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Reproduce worked numbers from the built-in models.
    Examples {
        #[command(subcommand)]
        sub: ExamplesCommand,
    },
}

#[derive(Subcommand)]
enum NcCommand {
    /// List noncrossing partitions of {1..n}.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Restrict to partitions with all blocks of even size.
        #[arg(long, conflicts_with = "pair")]
        even: bool,
        /// Restrict to pair partitions.
        #[arg(long)]
        pair: bool,
    },
    /// Möbius function mu(theta, pi); defaults to mu(0_n, 1_n).
    Mobius {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        pi: Option<String>,
    },
    /// Kreweras complement of a partition like "{(1,2),(3)}".
    Kreweras {
        #[arg(long)]
        partition: String,
    },
}

#[derive(Subcommand)]
enum RcalcCommand {
    /// Coefficient-wise sum (free additive convolution of R-transforms).
    Add {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
    /// Disjoint-alphabet concatenation.
    Concat {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
    /// Boxed convolution (free multiplicative convolution).
    Boxed {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// Acknowledge that the right table is trivial (b0 = 1_B); required
        /// in operator-valued mode.
        #[arg(long = "trivial-rhs")]
        trivial_rhs: bool,
    },
}

#[derive(Subcommand)]
enum ExamplesCommand {
    /// The shift-matrix counterexample numbers at a given N.
    Shift {
        #[arg(long = "N")]
        n_dim: usize,
    },
}

/// Outcome of one CLI invocation.
#[derive(Clone, Debug)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse and run; never panics on bad input.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            // clap uses stdout for --help/--version, stderr otherwise
            return if e.use_stderr() {
                CommandResult {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                CommandResult {
                    exit_code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(payload) => CommandResult {
            exit_code: 0,
            stdout: payload,
            stderr: String::new(),
        },
        Err(e) => {
            let envelope = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            CommandResult {
                exit_code: 1,
                stdout: String::new(),
                stderr: format!("{envelope}\n"),
            }
        }
    }
}

/// Payload with both renderings; `format` picks one.
struct Output {
    json: Value,
    table: String,
}

fn dispatch(cli: &Cli) -> Result<String> {
    let out = match &cli.command {
        Command::Nc { sub } => nc_command(sub)?,
        Command::Cumulants { from_moments } => {
            let table = read_table(from_moments)?;
            let result = match table {
                TablePayload::Scalar(f) => {
                    TablePayload::Scalar(cumulants_from_moments(&MomentTable(f))?.0)
                }
                TablePayload::BValued(f) => {
                    let ring = matrix_ring(&f)?;
                    TablePayload::BValued(
                        cumulants_from_moments_central(&MomentTable(f), ring)?.0,
                    )
                }
            };
            table_output(&result)?
        }
        Command::Moments { from_cumulants } => {
            let table = read_table(from_cumulants)?;
            let result = match table {
                TablePayload::Scalar(f) => {
                    TablePayload::Scalar(moments_from_cumulants(&CumulantTable(f))?.0)
                }
                TablePayload::BValued(f) => {
                    let ring = matrix_ring(&f)?;
                    TablePayload::BValued(
                        moments_from_cumulants_central(&CumulantTable(f), ring)?.0,
                    )
                }
            };
            table_output(&result)?
        }
        Command::Rcalc { sub } => rcalc_command(sub)?,
        Command::SolveM { r, order } => {
            let order = resolve_order(*order);
            let table = read_table(r)?;
            let TablePayload::Scalar(f) = table else {
                return Err(Error::Domain(
                    "solve-m expects a scalar one-variable table".into(),
                ));
            };
            let m = solve_moment_from_r(&f, order)?;
            table_output(&TablePayload::Scalar(m))?
        }
        Command::CheckCompat {
            model,
            n_dim,
            k_dim,
            max_len,
            sampled,
            seed,
        } => check_compat_command(*model, *n_dim, *k_dim, *max_len, *sampled, *seed)?,
        Command::PropertyStar {
            model,
            order,
            n_dim,
            k_dim,
        } => property_star_command(*model, order.unwrap_or(3), *n_dim, *k_dim)?,
        Command::SubalgebraTheorem {
            model,
            x0,
            order,
            n_dim,
            k_dim,
        } => {
            if *model != ModelKind::Matrix {
                return Err(Error::Domain(
                    "subalgebra-theorem runs on the matrix model".into(),
                ));
            }
            subalgebra_theorem_command(x0, order.unwrap_or(6), *n_dim, *k_dim)?
        }
        Command::Semicircular {
            t,
            order,
            b_valued,
            dim,
        } => semicircular_command(t, resolve_order(*order), *b_valued, *dim)?,
        Command::Examples {
            sub: ExamplesCommand::Shift { n_dim },
        } => shift_example_command(*n_dim)?,
    };
    Ok(match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string(&out.json)?),
        Format::Table => out.table,
    })
}

fn resolve_order(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(ORDER_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_ORDER)
}

fn read_table(path: &PathBuf) -> Result<TablePayload> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(path)?
    };
    table_from_str(&text)
}

fn matrix_ring(f: &FormalSeries<Matrix<Rat>>) -> Result<Arc<dyn BRing<Matrix<Rat>>>> {
    let dim = f
        .entries()
        .next()
        .map(|(_, m)| m.dim())
        .ok_or_else(|| Error::Domain("operator-valued table has no entries".into()))?;
    Ok(Arc::new(MatrixBRing { dim }))
}

fn table_output(t: &TablePayload) -> Result<Output> {
    let json = table_to_json(t)?;
    let mut table = String::new();
    table.push_str(&format!("s={} order={}\n", t.s(), t.order()));
    match t {
        TablePayload::Scalar(f) => {
            for (w, c) in f.entries() {
                table.push_str(&format!("{:<16} {}\n", w.to_string(), c));
            }
        }
        TablePayload::BValued(f) => {
            for (w, c) in f.entries() {
                let m = crate::json::matrix_to_json(c)?;
                table.push_str(&format!("{:<16} {}\n", w.to_string(), m));
            }
        }
    }
    Ok(Output { json, table })
}

fn nc_command(sub: &NcCommand) -> Result<Output> {
    match sub {
        NcCommand::Enumerate { n, even, pair } => {
            let parts: Vec<NoncrossingPartition> = if *even {
                enumerate_nc_even(*n)?
            } else if *pair {
                enumerate_nc_pair(*n)?
            } else {
                enumerate_nc(*n)?.as_ref().clone()
            };
            let strings: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
            let json = json!({"count": strings.len(), "n": n, "partitions": strings});
            let mut table = String::new();
            for s in &strings {
                table.push_str(s);
                table.push('\n');
            }
            table.push_str(&format!("total: {}\n", strings.len()));
            Ok(Output { json, table })
        }
        NcCommand::Mobius { n, theta, pi } => {
            let theta = match theta {
                Some(t) => t.parse::<NoncrossingPartition>()?,
                None => NoncrossingPartition::minimum(*n),
            };
            let pi = match pi {
                Some(p) => p.parse::<NoncrossingPartition>()?,
                None => NoncrossingPartition::maximum(*n),
            };
            if theta.n() != *n || pi.n() != *n {
                return Err(Error::Domain(
                    "partitions do not live on the requested ground set".into(),
                ));
            }
            let value = mobius(&theta, &pi)?;
            let json = json!({
                "mu": value,
                "n": n,
                "pi": pi.to_string(),
                "theta": theta.to_string(),
            });
            let table = format!("mu({theta}, {pi}) = {value}\n");
            Ok(Output { json, table })
        }
        NcCommand::Kreweras { partition } => {
            let pi: NoncrossingPartition = partition.parse()?;
            let kr = pi.kreweras();
            let json = json!({"kreweras": kr.to_string(), "partition": pi.to_string()});
            let table = format!("{kr}\n");
            Ok(Output { json, table })
        }
    }
}

fn rcalc_command(sub: &RcalcCommand) -> Result<Output> {
    match sub {
        RcalcCommand::Add { lhs, rhs } => {
            let result = match (read_table(lhs)?, read_table(rhs)?) {
                (TablePayload::Scalar(f), TablePayload::Scalar(g)) => {
                    TablePayload::Scalar(f.add(&g)?)
                }
                (TablePayload::BValued(f), TablePayload::BValued(g)) => TablePayload::BValued(
                    f.add_with(&g, |a, b| a.add(b), |m| *m == Matrix::zero(m.dim()))?,
                ),
                _ => return Err(Error::Domain("rcalc add needs matching flavors".into())),
            };
            table_output(&result)
        }
        RcalcCommand::Concat { lhs, rhs } => {
            let result = match (read_table(lhs)?, read_table(rhs)?) {
                (TablePayload::Scalar(f), TablePayload::Scalar(g)) => {
                    TablePayload::Scalar(r_concatenate(&f, &g)?)
                }
                (TablePayload::BValued(f), TablePayload::BValued(g)) => {
                    TablePayload::BValued(r_concatenate(&f, &g)?)
                }
                _ => return Err(Error::Domain("rcalc concat needs matching flavors".into())),
            };
            table_output(&result)
        }
        RcalcCommand::Boxed {
            lhs,
            rhs,
            trivial_rhs,
        } => {
            let result = match (read_table(lhs)?, read_table(rhs)?) {
                (TablePayload::Scalar(f), TablePayload::Scalar(g)) => TablePayload::Scalar(
                    boxed_convolution_scalar(&CumulantTable(f), &CumulantTable(g))?.0,
                ),
                (TablePayload::BValued(f), TablePayload::BValued(g)) => {
                    if !trivial_rhs {
                        return Err(Error::Domain(
                            "operator-valued boxed convolution needs --trivial-rhs \
                             (the right factor must be a trivial R-transform)"
                                .into(),
                        ));
                    }
                    let ring = matrix_ring(&f)?;
                    TablePayload::BValued(
                        boxed_convolution_central(&CumulantTable(f), &CumulantTable(g), ring)?.0,
                    )
                }
                _ => return Err(Error::Domain("rcalc boxed needs matching flavors".into())),
            };
            table_output(&result)
        }
    }
}

fn compat_report_output(report: &crate::compat::CompatReport) -> Output {
    let json = json!({
        "checked": report.checked,
        "max_deviation": report.max_deviation,
        "ok": report.ok,
        "witness": report.witness.as_ref().map(|(i, d)| json!({"description": d, "index": i})),
    });
    let mut table = format!(
        "checked {} words: {}\nmax deviation {}\n",
        report.checked,
        if report.ok { "compatible" } else { "INCOMPATIBLE" },
        report.max_deviation
    );
    if let Some((i, d)) = &report.witness {
        table.push_str(&format!("witness #{i}: {d}\n"));
    }
    Output { json, table }
}

fn check_compat_command(
    model: ModelKind,
    n_dim: usize,
    k_dim: usize,
    max_len: usize,
    sampled: Option<usize>,
    seed: u64,
) -> Result<Output> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let report = match model {
        ModelKind::Matrix => {
            let m = MatrixTensorModel::<Rat>::shift_example(n_dim, k_dim)?;
            let corpus = match sampled {
                Some(count) => sampled_corpus(&m, count, max_len, &mut rng)?,
                None => generator_word_corpus(&m, max_len)?,
            };
            is_compatible(&m, &corpus)?
        }
        ModelKind::Freegroup => {
            let m = FreeGroupModel::with_generators(&["a", "b", "A", "B"])?;
            let corpus = match sampled {
                Some(count) => sampled_corpus(&m, count, max_len, &mut rng)?,
                None => generator_word_corpus(&m, max_len)?,
            };
            is_compatible(&m, &corpus)?
        }
    };
    Ok(compat_report_output(&report))
}

fn property_star_command(
    model: ModelKind,
    order: usize,
    n_dim: usize,
    k_dim: usize,
) -> Result<Output> {
    let report = match model {
        ModelKind::Matrix => {
            let m = Arc::new(MatrixTensorModel::<Rat>::shift_example(n_dim, k_dim)?);
            property_star_check(&m, order)?
        }
        ModelKind::Freegroup => {
            let m = Arc::new(FreeGroupModel::with_generators(&["a", "b", "A", "B"])?);
            property_star_check(&m, order)?
        }
    };
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|(w, gap)| {
            Ok(json!({
                "gap": rat_to_json(gap)?,
                "word": w.letters().iter().map(|&l| l as u64).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_>>()?;
    let json = json!({"failures": failures, "holds": report.holds});
    let mut table = format!(
        "property (*) {}\n",
        if report.holds { "holds" } else { "fails" }
    );
    for (w, gap) in &report.failures {
        table.push_str(&format!("  word {w}: gap {gap}\n"));
    }
    Ok(Output { json, table })
}

fn subalgebra_theorem_command(
    x0_spec: &str,
    order: usize,
    n_dim: usize,
    k_dim: usize,
) -> Result<Output> {
    // parse the K-factor as JSON rows of rational literals
    let raw: Value = serde_json::from_str(x0_spec)
        .map_err(|e| Error::Parse(format!("x0 must be JSON rows of rationals: {e}")))?;
    let rows = raw
        .as_array()
        .ok_or_else(|| Error::Parse("x0 must be an array of rows".into()))?;
    let mut cells = Vec::new();
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse("x0 rows must be arrays".into()))?;
        let mut out_row = Vec::new();
        for cell in row {
            let r = match cell {
                Value::String(s) => parse_rat(s)?,
                Value::Number(n) => {
                    let i = n
                        .as_i64()
                        .ok_or_else(|| Error::Parse(format!("bad entry {n}")))?;
                    Rat::from_int(i)
                }
                other => return Err(Error::Parse(format!("bad entry {other}"))),
            };
            out_row.push(r);
        }
        cells.push(out_row);
    }
    let m = Matrix::from_rows(cells)?;
    if m.dim() != k_dim {
        return Err(Error::Domain(format!(
            "x0 factor must be {k_dim}x{k_dim} to match --K"
        )));
    }
    let model = MatrixTensorModel::<Rat>::new(n_dim, k_dim, vec![])?;
    let x0 = model.central_element(&m)?;
    let report = verify_compatible_subalgebra_theorem(&model, &x0, order)?;
    let json = json!({
        "b_central": report.b_central,
        "conclusion_holds": report.conclusion_holds,
        "corpus_checked": report.corpus_checked,
        "max_deviation": report.max_deviation,
        "powers_compatible": report.powers_compatible,
        "scalar_valued": report.scalar_valued,
    });
    let table = format!(
        "hypotheses: B-central={} scalar-valued={} powers-compatible={}\n\
         corpus: {} words, max deviation {}\nconclusion: {}\n",
        report.b_central,
        report.scalar_valued,
        report.powers_compatible,
        report.corpus_checked,
        report.max_deviation,
        match report.conclusion_holds {
            Some(true) => "holds",
            Some(false) => "FAILS",
            None => "not asserted (hypothesis failure)",
        }
    );
    Ok(Output { json, table })
}

fn semicircular_command(t: &str, order: usize, b_valued: bool, dim: usize) -> Result<Output> {
    let t = parse_rat(t)?;
    let cumulants = semicircular_cumulants(&t, order.max(2))?;
    let moments = moments_from_cumulants(&cumulants)?;
    if b_valued {
        let ring = MatrixBRing { dim };
        let k_table = crate::distributions::make_b_semicircular_from_scalar(
            &cumulants,
            |_| Rat::one(),
            &ring,
        )?;
        let e_moments = b_semicircular_moments(&t, order.max(2), true, &ring)?;
        let mut m_series = FormalSeries::zero(1, order.max(2));
        for (n, b) in e_moments.iter().enumerate() {
            if !ring.is_zero(b) {
                m_series.set(Word::new(vec![1; n + 1], 1)?, b.clone())?;
            }
        }
        let c_json = table_to_json(&TablePayload::BValued(k_table.series().clone()))?;
        let m_json = table_to_json(&TablePayload::BValued(m_series.clone()))?;
        let json = json!({"cumulants": c_json, "moments": m_json});
        let mut table = String::from("n  E-moment (operator-valued)\n");
        for (n, b) in e_moments.iter().enumerate() {
            table.push_str(&format!("{:<2} {}\n", n + 1, crate::json::matrix_to_json(b)?));
        }
        return Ok(Output { json, table });
    }
    let c_json = table_to_json(&TablePayload::Scalar(cumulants.series().clone()))?;
    let m_json = table_to_json(&TablePayload::Scalar(moments.series().clone()))?;
    let json = json!({"cumulants": c_json, "moments": m_json});
    let mut table = String::from("n  moment      cumulant\n");
    for n in 1..=order.max(2) {
        let w = Word::new(vec![1; n], 1)?;
        let m = moments.series().coef(&w)?;
        let k = cumulants.series().coef(&w)?;
        table.push_str(&format!("{n:<2} {:<11} {}\n", m.to_string(), k));
    }
    Ok(Output { json, table })
}

fn shift_example_command(n_dim: usize) -> Result<Output> {
    let model = MatrixTensorModel::<Rat>::shift_example(n_dim, 2)?;
    let x = model.generator(0)?;
    let y = model.generator(1)?;
    let ex = model.apply_e(&x)?;
    let ey = model.apply_e(&y)?;
    let phi_exey = model.phi_b(&model.mul_b(&ex, &ey))?;
    let phi_ex_phi_ey = model.phi_b(&ex)?.mul(&model.phi_b(&ey)?);
    // phi(K_2^t(x,y)) - k_2(x,y) = phi(E(x))phi(E(y)) - phi(E(x)E(y))
    let exy = model.apply_e(&model.mul_a(&x, &y)?)?;
    let k2t = model.add_b(&exy, &model.scale_b(&Rat::from_int(-1), &model.mul_b(&ex, &ey)));
    let phi_k2t = model.phi_b(&k2t)?;
    let k2 = {
        let phi_xy = model.apply_phi(&model.mul_a(&x, &y)?)?;
        let phi_x = model.apply_phi(&x)?;
        let phi_y = model.apply_phi(&y)?;
        phi_xy.sub(&phi_x.mul(&phi_y))
    };
    let gap = phi_k2t.sub(&k2);
    let json = json!({
        "k2": rat_to_json(&k2)?,
        "k2_gap": rat_to_json(&gap)?,
        "n": n_dim,
        "phi_e_x_e_y": rat_to_json(&phi_exey)?,
        "phi_e_x_phi_e_y": rat_to_json(&phi_ex_phi_ey)?,
        "phi_k2_trivial": rat_to_json(&phi_k2t)?,
    });
    let table = format!(
        "N = {n_dim}\nphi(E(x)E(y))       = {phi_exey}\nphi(E(x))phi(E(y))  = {phi_ex_phi_ey}\n\
         k_2(x,y)            = {k2}\nphi(K_2^t(x,y))     = {phi_k2t}\n\
         phi(K_2^t) - k_2    = {gap}\n"
    );
    Ok(Output { json, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let r = run(std::iter::once("freeprob").chain(args.iter().copied()));
        assert_eq!(r.exit_code, 0, "stderr: {}", r.stderr);
        r.stdout
    }

    #[test]
    fn nc_enumerate_counts() {
        let out = run_ok(&["nc", "enumerate", "--n", "4"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 14);
        let out = run_ok(&["nc", "enumerate", "--n", "4", "--pair"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 2);
    }

    #[test]
    fn nc_mobius_and_kreweras() {
        let out = run_ok(&["nc", "mobius", "--n", "4"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["mu"], -5);
        let out = run_ok(&["nc", "kreweras", "--partition", "{(1,2),(3)}"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["kreweras"], "{(1),(2,3)}");
    }

    #[test]
    fn usage_errors_exit_2() {
        let r = run(["freeprob", "nc", "enumerate"]);
        assert_eq!(r.exit_code, 2);
        assert!(!r.stderr.is_empty());
        let r = run(["freeprob", "nonsense"]);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn domain_errors_exit_1_with_envelope() {
        let r = run(["freeprob", "nc", "enumerate", "--n", "0"]);
        assert_eq!(r.exit_code, 1);
        let v: Value = serde_json::from_str(r.stderr.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "domain");
    }

    #[test]
    fn shift_example_values() {
        let out = run_ok(&["examples", "shift", "--N", "3"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["phi_e_x_e_y"], json!([2, 3]));
        assert_eq!(v["phi_e_x_phi_e_y"], json!([0, 1]));
        assert_eq!(v["k2_gap"], json!([-2, 3]));
    }

    #[test]
    fn semicircular_values() {
        let out = run_ok(&["semicircular", "--t", "1", "--order", "8"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        let moments = &v["moments"]["entries"];
        // entries in graded order: lengths 2, 4, 6, 8 with Catalan values
        let values: Vec<i64> = moments
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["value"][0].as_i64().unwrap())
            .collect();
        assert_eq!(values, vec![1, 2, 5, 14]);
    }

    #[test]
    fn property_star_reports_shift_failure() {
        let out = run_ok(&[
            "property-star",
            "--model",
            "matrix",
            "--order",
            "2",
            "--N",
            "3",
        ]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["holds"], false);
        let failures = v["failures"].as_array().unwrap();
        assert!(failures
            .iter()
            .any(|f| f["word"] == json!([1, 2]) && f["gap"] == json!([2, 3])));
    }

    #[test]
    fn check_compat_both_models() {
        for model in ["matrix", "freegroup"] {
            let out = run_ok(&["check-compat", "--model", model, "--max-len", "3"]);
            let v: Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["ok"], true, "{model}");
            assert_eq!(v["max_deviation"], 0.0);
        }
    }

    #[test]
    fn table_format_output() {
        let out = run_ok(&["--format", "table", "nc", "enumerate", "--n", "3"]);
        assert!(out.contains("{(1,2,3)}"));
        assert!(out.trim_end().ends_with("total: 5"));
    }
}
