use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use morseflow::betti::{verify_grassmann_split, verify_group_decomposition, verify_symmetric_space_decompositions, IdentityReport};
use morseflow::config::{Format, RunConfig};
use morseflow::group_flow::{closed_flow, closed_flow_general, numeric_flow, polar_via_flow_with, Family};
use morseflow::json::{fmt_num, matrix_to_json, parse_matrix_arg};
use morseflow::morse::{group_of, group_sweep, morse_smale_matrix};
use morseflow::random::{haar, rng};
use morseflow::schubert::{classify_with, enumerate_cells, shared_decomposition_check};
use morseflow::sphere::{critical_dimension, integrate_sphere_flow, sphere_dim, SpherePoint};
use morseflow::{Error, Field, Mat, Tolerances};

const SEED_VAR: &str = "MORSEFLOW_SEED";

#[derive(Parser)]
#[command(name = "morseflow", version, about = "Height-function gradient flows on classical groups and their verification suites")]
struct Cli {
    /// JSON run configuration (seed, tolerances, output, format).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed; defaults to the config file, then $MORSEFLOW_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Rk4,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "verbatim")]
enum FieldArg {
    R,
    C,
    H,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::R => Field::R,
            FieldArg::C => Field::C,
            FieldArg::H => Field::H,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "verbatim")]
enum GroupArg {
    O,
    U,
    Sp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Group,
    Symspace,
    Split,
}

#[derive(Subcommand)]
enum Command {
    /// Flow X0 for time t under the height function of A.
    Flow {
        /// Height matrix: JSON, `diag:a,b,…` or `@path`.
        #[arg(long = "A")]
        a: String,
        #[arg(long = "X0")]
        x0: String,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Polar decomposition A = J Q read off the flow from X0 = 0.
    Polar {
        #[arg(long = "A")]
        a: String,
    },
    /// Hessian signatures and index formula at every diagonal critical point.
    Morse {
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        /// Height matrix; the Morse–Smale matrix when omitted.
        #[arg(long = "A")]
        a: Option<String>,
    },
    /// Cell decomposition of the group for a diagonal height function.
    Cells {
        #[arg(long, value_enum, default_value = "C")]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        /// Classify this group element.
        #[arg(long = "X")]
        x: Option<String>,
        /// Height matrix; diag(1, …, n) when omitted.
        #[arg(long = "A")]
        a: Option<String>,
        /// Classify this many seeded random elements.
        #[arg(long)]
        samples: Option<usize>,
        /// Compare the decompositions of A and this second commuting height.
        #[arg(long = "compare")]
        compare: Option<String>,
    },
    /// Exact Poincaré-polynomial identities.
    Homology {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, value_enum, default_value = "C")]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Gradient flow of Tr X³ on the sphere of traceless unit Hermitian matrices.
    Sphere {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "R")]
        field: FieldArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        steps: Option<usize>,
        /// Start point; a seeded random point when omitted.
        #[arg(long = "X0")]
        x0: Option<String>,
        /// Write the trajectory CSV here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// Why the run stopped, mapped to the exit-code contract.
enum Failure {
    Verification(String),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        e if e.is_numerical() => 4,
        _ => 3,
    }
}

struct Ctx {
    seed: u64,
    tol: Tolerances,
    format: Format,
}

/// Renders JSON with every float in 17-significant-digit exponent form.
fn render(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_num(n.as_f64().unwrap()),
        Value::Array(items) => format!("[{}]", items.iter().map(render).collect::<Vec<_>>().join(",")),
        Value::Object(map) => {
            let parts: Vec<String> = map.iter().map(|(k, v)| format!("{}:{}", Value::String(k.clone()), render(v))).collect();
            format!("{{{}}}", parts.join(","))
        }
        other => other.to_string(),
    }
}

fn matrix_value(m: &Mat) -> Value {
    serde_json::from_str(&matrix_to_json(m)).expect("matrix JSON is valid")
}

fn read_matrix(arg: &str) -> Result<Mat, Error> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            parse_matrix_arg(&text)
        }
        None => parse_matrix_arg(arg),
    }
}

fn identity_value(r: &IdentityReport) -> Value {
    let diffs: Vec<Value> = r
        .differences()
        .into_iter()
        .map(|(deg, l, rr)| json!({"degree": deg, "lhs": l.to_string(), "rhs": rr.to_string()}))
        .collect();
    json!({
        "identity": r.identity,
        "lhs": r.lhs.to_value(),
        "rhs": r.rhs.to_value(),
        "passed": r.passed,
        "differences": diffs,
    })
}

fn run(cmd: Command, ctx: &Ctx) -> Result<(String, Option<String>), Failure> {
    match cmd {
        Command::Flow { a, x0, t, method, steps } => {
            let a = read_matrix(&a)?;
            let x0 = read_matrix(&x0)?;
            let field = a.field().join(x0.field());
            let (a, x0) = (a.promote(field), x0.promote(field));
            if x0.is_square() && x0.unitarity_defect() > ctx.tol.membership {
                return Err(Error::Precondition(format!("X0 is not in the group: defect {:e}", x0.unitarity_defect())).into());
            }
            let x = match method {
                Method::Closed if a.is_hermitian(ctx.tol.hermitian) => closed_flow(&a, &x0, t)?,
                Method::Closed => closed_flow_general(&a, &x0, t)?,
                Method::Rk4 => numeric_flow(&a, &x0, t, steps)?,
            };
            Ok((matrix_to_json(&x), None))
        }
        Command::Polar { a } => {
            let a = read_matrix(&a)?;
            let p = polar_via_flow_with(&a, &ctx.tol)?;
            let out = json!({
                "J": matrix_value(&p.j),
                "Q": matrix_value(&p.q),
                "time": p.time,
                "residual": p.residual,
            });
            Ok((render(&out), None))
        }
        Command::Morse { group, n, a } => {
            let family = match group {
                GroupArg::O => Family::O,
                GroupArg::U => Family::U,
                GroupArg::Sp => Family::Sp,
            };
            let field = family.field();
            let a = match a {
                Some(s) => read_matrix(&s)?,
                None => morse_smale_matrix(n, field)?,
            };
            let mut records = group_sweep(group_of(field, n), &a)?;
            records.sort_by(|x, y| x.eps.signs().cmp(y.eps.signs()));
            let bad = records.iter().filter(|r| r.signature.n_zero != 0 || r.signature.n_minus != r.index_formula).count();
            let rows: Vec<Value> = records
                .iter()
                .map(|r| {
                    json!({
                        "eps": r.eps.signs(),
                        "index_formula": r.index_formula,
                        "n_plus": r.signature.n_plus,
                        "n_minus": r.signature.n_minus,
                        "n_zero": r.signature.n_zero,
                        "height": r.height_value,
                    })
                })
                .collect();
            let out = render(&json!({ "group": format!("{}", group_of(field, n)), "records": rows, "mismatches": bad }));
            if bad > 0 {
                return Err(Failure::Verification(format!("{bad} critical points disagree with the index formula\n{out}")));
            }
            Ok((out, None))
        }
        Command::Cells { field, n, x, a, samples, compare } => {
            let field: Field = field.into();
            if n == 0 || n > 20 {
                return Err(Error::OutOfRange(format!("n = {n} not in 1..=20")).into());
            }
            let a = match a {
                Some(s) => read_matrix(&s)?,
                None => Mat::diag_real(field, &(1..=n).map(|k| k as f64).collect::<Vec<_>>()),
            };
            let a = a.promote(a.field().join(field));
            if let Some(other) = compare {
                let a2 = read_matrix(&other)?;
                let report = shared_decomposition_check(&a, &a2, field, samples.unwrap_or(100), ctx.seed)?;
                let out = render(&serde_json::to_value(&report).expect("report serializes"));
                if !report.passed {
                    return Err(Failure::Verification(out));
                }
                return Ok((out, None));
            }
            if let Some(x) = x {
                let x = read_matrix(&x)?;
                let cell = classify_with(&x.promote(x.field().join(field)), &a, &ctx.tol)?;
                let out = json!({"m": cell.m, "jumps": cell.symbol.jumps, "dim": cell.group_cell_dim(field)});
                return Ok((render(&out), None));
            }
            if let Some(count) = samples {
                let mut g = rng(ctx.seed);
                let mut tally = std::collections::BTreeMap::new();
                let mut ambiguous = 0;
                for _ in 0..count {
                    match classify_with(&haar(&mut g, field, n), &a, &ctx.tol) {
                        Ok(cell) => *tally.entry(cell.to_json()).or_insert(0usize) += 1,
                        Err(Error::Ambiguous(_)) => ambiguous += 1,
                        Err(e) => return Err(e.into()),
                    }
                }
                let cells: Vec<Value> =
                    tally.iter().map(|(k, v)| json!({"cell": serde_json::from_str::<Value>(k).unwrap(), "count": v})).collect();
                return Ok((render(&json!({"samples": count, "ambiguous": ambiguous, "cells": cells})), None));
            }
            let cells: Vec<Value> = enumerate_cells(n)
                .iter()
                .map(|c| json!({"m": c.m, "jumps": c.symbol.jumps, "dim": c.group_cell_dim(field)}))
                .collect();
            Ok((render(&json!({ "cells": cells })), None))
        }
        Command::Homology { check, field, n, n1, k } => {
            let field: Field = field.into();
            let reports = match check {
                Check::Group => vec![verify_group_decomposition(n, field)?],
                Check::Symspace => verify_symmetric_space_decompositions(n)?,
                Check::Split => {
                    let n1 = n1.ok_or_else(|| Error::Parse("--n1 is required for --check split".into()))?;
                    let k = k.ok_or_else(|| Error::Parse("--k is required for --check split".into()))?;
                    if n1 > n {
                        return Err(Error::OutOfRange(format!("n1 = {n1} exceeds n = {n}")).into());
                    }
                    vec![verify_grassmann_split(n, n1, n - n1, k, field)?]
                }
            };
            let all = reports.iter().all(|r| r.passed);
            let out = render(&json!({ "passed": all, "reports": reports.iter().map(identity_value).collect::<Vec<_>>() }));
            if !all {
                return Err(Failure::Verification(out));
            }
            Ok((out, None))
        }
        Command::Sphere { n, field, t, steps, x0, emit } => {
            let field: Field = field.into();
            if n < 2 {
                return Err(Error::OutOfRange("sphere needs n >= 2".into()).into());
            }
            let x0 = match x0 {
                Some(s) => SpherePoint::new(read_matrix(&s)?)?,
                None => SpherePoint::random(&mut rng(ctx.seed), field, n),
            };
            let steps = steps.unwrap_or_else(|| ((t.abs() * 100.0).ceil() as usize).max(1));
            let traj = integrate_sphere_flow(&x0, t, steps)?;
            let csv = traj.to_csv()?;
            let monotone = traj.f.windows(2).all(|w| w[1] >= w[0] - 1e-14);
            let last = traj.eigenvalues.last().expect("trajectory is nonempty");
            let summary = json!({
                "n": n,
                "field": field.name(),
                "sphere_dim": sphere_dim(field, n),
                "steps": steps,
                "t": t,
                "f_start": traj.f[0],
                "f_end": traj.f.last(),
                "f_monotone": monotone,
                "final_eigenvalues": last,
                "critical_m": critical_dimension(last, 1e-6),
            });
            let main = match ctx.format {
                Format::Csv => csv.clone(),
                Format::Json => render(&summary),
            };
            if !monotone {
                return Err(Failure::Verification(format!("f decreased along the trajectory\n{main}")));
            }
            Ok((main, emit.map(|p| p.to_string_lossy().into_owned()).map(|p| format!("{p}\u{0}{csv}"))))
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Error> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            RunConfig::from_json(&text)
        }
    }
}

fn seed_from_env() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Parse(format!("{SEED_VAR}={v} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn write_out(path: Option<&str>, text: &str) -> Result<(), Error> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Error::Precondition(format!("cannot write {p}: {e}"))),
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Precondition(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<(), Failure> {
        let cfg = load_config(&cli.config)?;
        let seed = match cli.seed.or(cfg.seed) {
            Some(s) => s,
            None => seed_from_env()?.unwrap_or(0),
        };
        let format = match cli.format {
            Some(FormatArg::Json) => Format::Json,
            Some(FormatArg::Csv) => Format::Csv,
            None => cfg.format.unwrap_or_default(),
        };
        let ctx = Ctx { seed, tol: cfg.resolved_tolerances()?, format };
        let output = cli.output.as_ref().map(|p| p.to_string_lossy().into_owned()).or(cfg.output.clone());
        let outcome = run(cli.command, &ctx);
        let (main, side) = match outcome {
            Ok(v) => v,
            Err(Failure::Verification(report)) => {
                write_out(output.as_deref(), &report)?;
                return Err(Failure::Verification(String::new()));
            }
            Err(e) => return Err(e),
        };
        if let Some(side) = side {
            let (path, csv) = side.split_once('\u{0}').expect("side output carries a path");
            fs::write(path, csv).map_err(|e| Error::Precondition(format!("cannot write {path}: {e}")))?;
        }
        write_out(output.as_deref(), &main)?;
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(_)) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
