//! Implementations of the CLI subcommands.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use qsd_core::catalog::{named_problems, problem, NamedProblem};
use qsd_core::helstrom::check_helstrom_conditions;
use qsd_core::locc::{builtin_protocol, builtin_protocols, evaluate_exact, sample, LoccProtocol};
use qsd_core::model::{Ensemble, Povm};
use qsd_core::optimizer::{iterate_min_error, random_povm};

use crate::reproduce::{build_report, print_table};
use crate::{CliError, OutputFormat};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} file {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Input(format!(
            "malformed {what} in {} at field `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}

/// A named catalog problem, or a JSON ensemble from disk (objective scale 1).
fn load_problem(source: &str) -> Result<NamedProblem, CliError> {
    if let Some(p) = problem(source) {
        return Ok(p);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "unknown ensemble {source:?}: not a catalog name and no such file \
             (try `qsd catalog` for the named problems)"
        )));
    }
    let ensemble: Ensemble = read_json(path, "ensemble")?;
    Ok(NamedProblem {
        name: "custom",
        description: "user-supplied ensemble",
        ensemble,
        objective_scale: 1.0,
    })
}

pub fn reproduce(tol: Option<f64>, output: OutputFormat) -> Result<ExitCode, CliError> {
    let report = build_report(tol).map_err(|e| CliError::Failure(e.to_string()))?;
    match output {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        OutputFormat::Table => print_table(&report),
    }
    Ok(if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn optimize(
    ensemble: &str,
    tol: f64,
    max_iter: usize,
    seed: Option<u64>,
    output: OutputFormat,
    out_dir: &Path,
) -> Result<ExitCode, CliError> {
    let problem = load_problem(ensemble)?;
    let init = match seed {
        Some(s) => Some(
            random_povm(problem.ensemble.dim(), problem.ensemble.len(), s)
                .map_err(|e| CliError::Failure(format!("random start failed: {e}")))?,
        ),
        None => None,
    };
    let (povm, trace) = iterate_min_error(&problem.ensemble, init.as_ref(), tol, max_iter)
        .map_err(|e| CliError::Input(format!("optimization setup failed: {e}")))?;
    let report = check_helstrom_conditions(&problem.ensemble, &povm, tol)
        .map_err(|e| CliError::Failure(format!("certification failed: {e}")))?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    let povm_path = out_dir.join("povm.json");
    let report_path = out_dir.join("helstrom_report.json");
    fs::write(&povm_path, serde_json::to_string_pretty(&povm).expect("povm serializes"))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", povm_path.display())))?;
    fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", report_path.display())))?;

    let success = *trace.success_sequence.last().expect("non-empty sequence");
    let scaled = success * problem.objective_scale;
    match output {
        OutputFormat::Json => {
            let summary = serde_json::json!({
                "problem": problem.name,
                "iterations": trace.iterations,
                "converged": trace.converged,
                "final_residual": trace.final_residual,
                "success_probability": success,
                "objective_scale": problem.objective_scale,
                "scaled_success": scaled,
                "helstrom_pass": report.pass,
                "povm_file": povm_path,
                "report_file": report_path,
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        OutputFormat::Table => {
            println!("problem:           {}", problem.name);
            println!("iterations:        {}", trace.iterations);
            println!("converged:         {}", trace.converged);
            println!("final residual:    {:.3e}", trace.final_residual);
            println!("success:           {success:.12}");
            if (problem.objective_scale - 1.0).abs() > 1e-15 {
                println!(
                    "scaled objective:  {scaled:.12}  (x {:.6})",
                    problem.objective_scale
                );
            }
            println!("helstrom pass:     {}", report.pass);
            println!("wrote {} and {}", povm_path.display(), report_path.display());
        }
    }

    if !trace.converged {
        return Err(CliError::Failure(format!(
            "did not converge in {max_iter} iterations (residual {:.3e})",
            trace.final_residual
        )));
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn verify(
    ensemble: &str,
    povm_path: &Path,
    tol: f64,
    output: OutputFormat,
) -> Result<ExitCode, CliError> {
    let problem = load_problem(ensemble)?;
    let povm: Povm = read_json(povm_path, "POVM")?;
    let report = check_helstrom_conditions(&problem.ensemble, &povm, tol)
        .map_err(|e| CliError::Input(format!("incompatible inputs: {e}")))?;
    match output {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        OutputFormat::Table => {
            println!("ensemble:                 {}", problem.name);
            println!("tolerance:                {tol:e}");
            println!(
                "min eigenvalue (worst):   {:.6e}",
                report
                    .min_eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            );
            println!("max lagrange residual:    {:.6e}", report.max_lagrange_residual);
            println!("max pairwise residual:    {:.6e}", report.max_pairwise_residual);
            println!(
                "gamma anti-hermitian:     {:.6e}",
                report.gamma_anti_hermitian_residual
            );
            println!("pass:                     {}", report.pass);
        }
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn simulate(
    protocol: &str,
    ensemble: Option<&str>,
    shots: u64,
    seed: u64,
    output: OutputFormat,
) -> Result<ExitCode, CliError> {
    let (proto, ensemble): (LoccProtocol, Ensemble) = match builtin_protocol(protocol)
        .map_err(|e| CliError::Failure(e.to_string()))?
    {
        Some(b) => {
            let ens = match ensemble {
                Some(source) => load_problem(source)?.ensemble,
                None => problem(b.ensemble_name).expect("built-in ensemble").ensemble,
            };
            (b.protocol, ens)
        }
        None => {
            let path = Path::new(protocol);
            if !path.exists() {
                return Err(CliError::Input(format!(
                    "unknown protocol {protocol:?}: not a built-in and no such file \
                     (try `qsd catalog` for the built-ins)"
                )));
            }
            let proto: LoccProtocol = read_json(path, "protocol")?;
            let source = ensemble.ok_or_else(|| {
                CliError::Input("--ensemble is required for protocols loaded from a file".into())
            })?;
            (proto, load_problem(source)?.ensemble)
        }
    };

    let exact = evaluate_exact(&proto, &ensemble)
        .map_err(|e| CliError::Input(format!("evaluation failed: {e}")))?;
    let report = sample(&proto, &ensemble, shots, seed)
        .map_err(|e| CliError::Input(format!("sampling failed: {e}")))?;
    match output {
        OutputFormat::Json => {
            let summary = serde_json::json!({
                "protocol": protocol,
                "exact": exact,
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        OutputFormat::Table => {
            println!("protocol:        {protocol}");
            println!("exact:           {exact:.12}");
            println!(
                "sampled:         {:.12}  ({} shots, seed {})",
                report.aggregate_frequency, report.shots, report.seed
            );
            println!("standard error:  {:.3e}", report.standard_error);
            for s in &report.per_state {
                println!(
                    "  {:<10} draws {:>8}  successes {:>8}  frequency {:.6}",
                    s.label, s.draws, s.successes, s.frequency
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn catalog(output: OutputFormat) -> Result<ExitCode, CliError> {
    let problems = named_problems();
    let protocols = builtin_protocols().map_err(|e| CliError::Failure(e.to_string()))?;
    match output {
        OutputFormat::Json => {
            let summary = serde_json::json!({
                "ensembles": problems
                    .iter()
                    .map(|p| serde_json::json!({
                        "name": p.name,
                        "description": p.description,
                        "states": p.ensemble.len(),
                        "dims": p.ensemble.dims(),
                        "objective_scale": p.objective_scale,
                    }))
                    .collect::<Vec<_>>(),
                "protocols": protocols
                    .iter()
                    .map(|b| serde_json::json!({
                        "name": b.name,
                        "description": b.description,
                        "ensemble": b.ensemble_name,
                    }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        OutputFormat::Table => {
            println!("ensembles / problems:");
            for p in &problems {
                println!(
                    "  {:<20} {:<2} states on {:?}  {}",
                    p.name,
                    p.ensemble.len(),
                    p.ensemble.dims(),
                    p.description
                );
            }
            println!("\nprotocols:");
            for b in &protocols {
                println!("  {:<24} ({})  {}", b.name, b.ensemble_name, b.description);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
