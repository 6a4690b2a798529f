//! Batch command-line interface for the deformation cohomology engine.
//!
//! Exit codes: 0 success, 1 mathematical/validation failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use catcoh::bicomplex::BiComplex;
use catcoh::category::{gen_function_bitensor, gen_grouplike_bitensor, gen_pointed};
use catcoh::complex::TensorComplex;
use catcoh::deform::{extend_to_order, pentagon_residual};
use catcoh::error::Error;
use catcoh::io;
use catcoh::oracle::BarComplex;
use catcoh::report::{hash_file, report, Report};
use catcoh::scalar::FieldSpec;

#[derive(Parser)]
#[command(
    name = "catcoh",
    version,
    about = "exact deformation cohomology for skeletal tensor categories"
)]
struct Cli {
    /// Override the ground field of the input file: rational, prime:p, cyclotomic:n
    #[arg(long, global = true)]
    field: Option<String>,

    /// Worker threads (default: all cores); results are independent of this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Human-readable table output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include debug dumps of assembled matrices in the payload
    #[arg(long, global = true)]
    dump: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a category file (pentagon and coproduct coherence)
    Validate { path: PathBuf },
    /// Cohomology of the deformation complex
    Cohomology {
        path: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Directory to write representative cocycle files into
        #[arg(long)]
        emit_representatives: Option<PathBuf>,
    },
    /// Deform along a 3-cocycle and extend order by order
    Deform {
        path: PathBuf,
        /// Cochain file with the first-order cocycle
        #[arg(long)]
        cocycle: Option<PathBuf>,
        /// Use the n-th computed degree-3 class representative instead
        #[arg(long)]
        class: Option<usize>,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Write the deformed category file here
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Double-complex computations for a bitensor category
    Bicomplex {
        path: PathBuf,
        /// Maximum bidegree, as two values: --max I J
        #[arg(long, num_args = 2, default_values_t = vec![3usize, 3usize])]
        max: Vec<usize>,
        /// Solve a boundary equation: d1 or d2
        #[arg(long)]
        solve: Option<String>,
        /// Compute total-complex cohomology through degree 3
        #[arg(long)]
        total: bool,
    },
    /// Brute-force group cohomology via the bar resolution
    Oracle {
        group: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Generate a category file from a group table
    Gen {
        /// pointed, grouplike, or function
        kind: String,
        group: PathBuf,
        output: PathBuf,
        /// Multiplicative 3-cocycle table for pointed categories
        #[arg(long)]
        omega: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let started = Instant::now();
    match run(&cli, started) {
        Ok(rep) => {
            emit(&cli, &rep);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = match &e {
                Error::Parse(_) | Error::Io(_) => 2u8,
                _ => 1u8,
            };
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn emit(cli: &Cli, rep: &Report) {
    let text = if cli.pretty {
        pretty(rep)
    } else {
        serde_json::to_string_pretty(rep).unwrap()
    };
    match &cli.out {
        Some(p) => std::fs::write(p, format!("{text}\n")).expect("write report"),
        None => println!("{text}"),
    }
}

fn pretty(rep: &Report) -> String {
    let mut out = format!("command: {}\n", rep.command);
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    match v {
                        Value::Object(_) | Value::Array(_) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(v, indent + 1, out);
                        }
                        _ => out.push_str(&format!("{pad}{k}: {v}\n")),
                    }
                }
            }
            Value::Array(a) => {
                for v in a {
                    match v {
                        Value::Object(_) | Value::Array(_) => walk(v, indent, out),
                        _ => out.push_str(&format!("{pad}- {v}\n")),
                    }
                }
            }
            _ => out.push_str(&format!("{pad}{v}\n")),
        }
    }
    walk(&rep.payload, 0, &mut out);
    out
}

fn field_override(cli: &Cli) -> Result<Option<FieldSpec>, Error> {
    cli.field.as_deref().map(io::parse_field_text).transpose()
}

fn run(cli: &Cli, started: Instant) -> Result<Report, Error> {
    let fo = field_override(cli)?;
    match &cli.cmd {
        Cmd::Validate { path } => {
            let inputs = vec![hash_file(path)?];
            let loaded = io::load_category(path, fo.as_ref())?;
            let kind = match &loaded {
                io::CategoryFile::Tensor(_) => "tensor",
                io::CategoryFile::Bitensor(_) => "bitensor",
            };
            let d = loaded.base();
            let pentagon_instances = d.rank().pow(4);
            let payload = json!({
                "valid": true,
                "kind": kind,
                "simples": d.simples,
                "pentagon_instances_checked": pentagon_instances,
            });
            Ok(report(
                "validate",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
        Cmd::Cohomology {
            path,
            max_degree,
            emit_representatives,
        } => {
            let inputs = vec![hash_file(path)?];
            let loaded = io::load_category(path, fo.as_ref())?;
            let datum = loaded.base().clone();
            let mut cx = TensorComplex::with_max_degree(&datum, (*max_degree).max(5));
            let want_reps = emit_representatives.is_some();
            let rep = cx.cohomology(*max_degree, true)?;
            // matrix identity check through the requested range
            let mut d_squared_zero = true;
            for n in 1..*max_degree {
                let d1 = cx.coboundary_matrix(n)?.clone();
                let d2 = cx.coboundary_matrix(n + 1)?.clone();
                if !d2.mul(&d1).is_zero() {
                    d_squared_zero = false;
                }
            }
            let degrees: Vec<Value> = rep
                .degrees
                .iter()
                .map(|d| {
                    json!({
                        "degree": d.degree,
                        "dim": d.dim,
                        "rank": d.rank,
                        "kernel_dim": d.kernel_dim,
                        "h_dim": d.h_dim,
                    })
                })
                .collect();
            let mut written = Vec::new();
            if let Some(dir) = emit_representatives {
                std::fs::create_dir_all(dir)?;
                for (n, reps) in &rep.representatives {
                    for (k, c) in reps.iter().enumerate() {
                        let file = dir.join(format!("h{n}_rep{k}.json"));
                        io::write_json(&file, &io::cochain_to_json(&datum, c))?;
                        written.push(file.display().to_string());
                    }
                }
            }
            let _ = want_reps;
            let mut payload = json!({
                "degrees": degrees,
                "d_squared_zero": d_squared_zero,
                "representatives_written": written,
            });
            if cli.dump {
                let mut dumps = Vec::new();
                for n in 1..=*max_degree {
                    let m = cx.coboundary_matrix(n)?;
                    let entries: Vec<Value> = m
                        .iter()
                        .map(|(r, c, v)| json!([r, c, v.to_string()]))
                        .collect();
                    dumps.push(json!({"degree": n, "rows": m.rows(), "cols": m.cols(), "entries": entries}));
                }
                payload["coboundary_matrices"] = Value::Array(dumps);
            }
            Ok(report(
                "cohomology",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
        Cmd::Deform {
            path,
            cocycle,
            class,
            order,
            emit,
        } => {
            let mut inputs = vec![hash_file(path)?];
            let loaded = io::load_category(path, fo.as_ref())?;
            let datum = loaded.base().clone();
            let a1 = match (cocycle, class) {
                (Some(cpath), None) => {
                    inputs.push(hash_file(cpath)?);
                    io::load_cochain(&datum, cpath)?
                }
                (None, Some(idx)) => {
                    let mut cx = TensorComplex::new(&datum);
                    let rep = cx.cohomology(3, true)?;
                    let reps = rep.representatives.get(&3).cloned().unwrap_or_default();
                    reps.get(*idx)
                        .cloned()
                        .ok_or_else(|| Error::Degree(format!("class index {idx} out of range")))?
                }
                _ => {
                    return Err(Error::Parse(
                        "exactly one of --cocycle or --class is required".into(),
                    ))
                }
            };
            let outcome = extend_to_order(&datum, a1, *order)?;
            let residual = pentagon_residual(&datum, &outcome.candidate)?;
            let residuals: Vec<Value> = residual
                .per_order
                .iter()
                .map(|o| json!({"order": o.order, "zero": o.zero, "witness": o.witness}))
                .collect();
            let obstructions: Vec<Value> = outcome
                .reports
                .iter()
                .map(|r| {
                    json!({
                        "order": r.order,
                        "closed": r.closed,
                        "exact": r.exact,
                        "obstruction_components": r.obstruction.components.len(),
                    })
                })
                .collect();
            let mut emitted = None;
            if let Some(epath) = emit {
                io::write_json(epath, &io::deformed_to_json(&datum, &outcome.candidate))?;
                emitted = Some(epath.display().to_string());
            }
            let payload = json!({
                "achieved_order": outcome.candidate.order(),
                "stuck_at": outcome.stuck_at,
                "residuals": residuals,
                "obstructions": obstructions,
                "emitted": emitted,
            });
            Ok(report(
                "deform",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
        Cmd::Bicomplex {
            path,
            max,
            solve,
            total,
        } => {
            let inputs = vec![hash_file(path)?];
            let loaded = io::load_category(path, fo.as_ref())?;
            let io::CategoryFile::Bitensor(datum) = loaded else {
                return Err(Error::Validation(
                    "bicomplex requires a bitensor file".into(),
                ));
            };
            let (max_i, max_j) = (max[0], max[1]);
            let mut bx = BiComplex::new(&datum);
            let lo = usize::from(!datum.is_biunital());
            let mut dims = Vec::new();
            for i in lo..=max_i {
                for j in lo..=max_j {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    dims.push(json!({"i": i, "j": j, "dim": bx.dim(i, j)?}));
                }
            }
            let idents = bx.verify_bicomplex(max_i, max_j)?;
            let all_ok = idents.iter().all(|r| r.ok());
            let violations: Vec<Value> = idents
                .iter()
                .filter(|r| !r.ok())
                .map(|r| {
                    json!({
                        "i": r.bidegree.0, "j": r.bidegree.1,
                        "tensor_squared_zero": r.tensor_squared_zero,
                        "coprod_squared_zero": r.coprod_squared_zero,
                        "anticommute": r.anticommute,
                    })
                })
                .collect();
            let mut payload = json!({
                "dims": dims,
                "identities_hold": all_ok,
                "identity_violations": violations,
            });
            if *total {
                let rep = bx.total_cohomology(3)?;
                let degrees: Vec<Value> = rep
                    .degrees
                    .iter()
                    .map(|(n, dim, h)| json!({"degree": n, "dim": dim, "h_dim": h}))
                    .collect();
                let mut verdicts = Vec::new();
                for t in &rep.degree3_triples {
                    verdicts.push(json!(bx.verify_triple(t)?.ok()));
                }
                payload["total"] = json!({"degrees": degrees, "degree3_triple_verdicts": verdicts});
            }
            if let Some(which) = solve {
                let rep = match which.as_str() {
                    "d1" => bx.solve_d1()?,
                    "d2" => bx.solve_d2()?,
                    other => return Err(Error::Parse(format!("unknown equation {other:?}"))),
                };
                let pushbacks: Vec<Value> = rep
                    .pushbacks
                    .iter()
                    .map(|(_, v)| json!({"verified": v.ok()}))
                    .collect();
                let solutions: Vec<Value> = rep
                    .solutions
                    .iter()
                    .map(|s| io::bicochain_to_json(&datum, s).unwrap_or(Value::Null))
                    .collect();
                payload["boundary_equation"] = json!({
                    "which": rep.which,
                    "solution_dim": rep.dim,
                    "solutions": solutions,
                    "pushbacks": pushbacks,
                });
            }
            Ok(report(
                "bicomplex",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
        Cmd::Oracle { group, max_degree } => {
            let inputs = vec![hash_file(group)?];
            let g = io::load_group(group)?;
            let field = fo.unwrap_or(FieldSpec::Rational);
            let bar = BarComplex::new(&g, field.clone());
            let dims = bar.cohomology_dims(*max_degree)?;
            let payload = json!({
                "group_order": g.order(),
                "field": field.to_string(),
                "h_dims": dims,
            });
            Ok(report(
                "oracle",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
        Cmd::Gen {
            kind,
            group,
            output,
            omega,
        } => {
            let mut inputs = vec![hash_file(group)?];
            let g = io::load_group(group)?;
            let field = fo.unwrap_or(FieldSpec::Rational);
            let value = match kind.as_str() {
                "pointed" => {
                    let datum = match omega {
                        None => gen_pointed(&g, &field, None)?,
                        Some(opath) => {
                            inputs.push(hash_file(opath)?);
                            let table = io::load_omega(opath, &g, &field)?;
                            let n = g.order();
                            let w = move |a: usize, b: usize, c: usize| {
                                table[a * n * n + b * n + c].clone()
                            };
                            gen_pointed(&g, &field, Some(&w))?
                        }
                    };
                    catcoh::tree::validate_fusion(&datum)?;
                    io::fusion_to_json(&datum)
                }
                "grouplike" => {
                    let datum = gen_grouplike_bitensor(&g, &field)?;
                    catcoh::bicomplex::validate_bitensor(&datum)?;
                    io::bitensor_to_json(&datum)
                }
                "function" => {
                    let datum = gen_function_bitensor(&g, &field)?;
                    catcoh::bicomplex::validate_bitensor(&datum)?;
                    io::bitensor_to_json(&datum)
                }
                other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
            };
            io::write_category(output, &value)?;
            let payload = json!({
                "kind": kind,
                "group_order": g.order(),
                "field": field.to_string(),
                "written": output.display().to_string(),
            });
            Ok(report(
                "gen",
                inputs,
                payload,
                started.elapsed().as_millis(),
            ))
        }
    }
}
