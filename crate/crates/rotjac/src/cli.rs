//! Argument grammar and command dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rotjac_core::fd::{default_step, fd_point_jacobian, fd_rotation_jacobian};
use rotjac_core::jacobian::{dpoint_classical, dpoint_compact, drot_classical, drot_compact};
use rotjac_core::sampling::{trial_rng, unit_vector};
use rotjac_core::so3::{exp_rodrigues, log};
use rotjac_core::solver::{solve, synthesize, Method, SolveOptions};
use rotjac_core::{Matrix3, Rotation, RotationVector, Vector3};
use serde::Serialize;

use crate::bench::{self, Band};
use crate::check::run_check;
use crate::error::CliError;
use crate::output::{csv_real, csv_row, text_matrix, text_real, text_vector, to_json, Format};
use crate::schema::{CorrespondenceFile, FitOutput};

#[derive(Debug, Parser)]
#[command(name = "rotjac", version, about = "Rotations in exponential coordinates and their derivatives")]
pub struct Cli {
    /// Root seed for every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for `check` and `bench`.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotation matrix of a rotation vector.
    Exp {
        #[arg(num_args = 3, required = true, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        v: Vec<f64>,
    },
    /// Rotation vector of a rotation matrix given as 9 row-major entries.
    Log {
        #[arg(num_args = 9, required = true, allow_negative_numbers = true, value_name = "RIJ")]
        entries: Vec<f64>,
    },
    /// Derivative of R(v), or of R(v)u with --point.
    Jac {
        #[arg(num_args = 3, required = true, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        v: Vec<f64>,
        #[arg(long, value_enum, default_value_t = JacFormula::Compact)]
        formula: JacFormula,
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        point: Option<Vec<f64>>,
        /// Finite-difference step (default 1e-5·max(1, ‖v‖)).
        #[arg(long)]
        step: Option<f64>,
    },
    /// Randomized property suite; exits 1 if any property fails.
    Check {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Timing and accuracy of each Jacobian formula per angle band.
    Bench {
        /// Comma-separated `lo:hi` angle bands inside (0, π).
        #[arg(long, value_delimiter = ',', default_value = "0.1:3.0")]
        bands: Vec<Band>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Fit a rotation to point correspondences.
    Fit {
        /// Correspondence file: {"sources": [[x,y,z],...], "targets": [[x,y,z],...]}.
        #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
        input: Option<PathBuf>,
        /// Synthetic problem: point count, rotation angle, noise sigma, seed.
        #[arg(long, num_args = 4, value_names = ["N", "THETA", "SIGMA", "SEED"])]
        synth: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = MethodArg::Gn)]
        method: MethodArg,
        /// Initial rotation vector.
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        v0: Option<Vec<f64>>,
        #[arg(long, default_value_t = SolveOptions::default().max_iter)]
        max_iter: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacFormula {
    Compact,
    Classical,
    Fd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(alias = "gauss-newton")]
    Gn,
    #[value(alias = "gradient-descent")]
    Gd,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gn => Method::GaussNewton,
            MethodArg::Gd => Method::GradientDescent,
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let jobs = cli.jobs as usize;
    match &cli.command {
        Command::Exp { v } => cmd_exp(vector(v)?, cli.format, out),
        Command::Log { entries } => cmd_log(entries, cli.format, out),
        Command::Jac { v, formula, point, step } => {
            let point = point.as_deref().map(vector).transpose()?;
            cmd_jac(vector(v)?, *formula, point, *step, cli.format, out)
        }
        Command::Check { trials } => cmd_check(*trials, cli.seed, jobs, cli.format, out),
        Command::Bench { bands, trials } => {
            let records = bench::run_bench(bands, *trials as usize, cli.seed, jobs);
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => out.write_all(bench::to_csv(&records).as_bytes())?,
                Format::Json => writeln!(out, "{}", to_json(&records))?,
                Format::Text => out.write_all(bench::to_text(&records).as_bytes())?,
            }
            Ok(())
        }
        Command::Fit { input, synth, method, v0, max_iter } => {
            let v0 = match v0 {
                Some(v) => RotationVector::try_new(vector(v)?)?,
                None => RotationVector::ZERO,
            };
            let opts = SolveOptions { max_iter: *max_iter, ..SolveOptions::default() };
            cmd_fit(input.as_ref(), synth.as_deref(), (*method).into(), &v0, &opts, cli.format, out)
        }
    }
}

fn vector(values: &[f64]) -> Result<Vector3, CliError> {
    let [x, y, z] = values else {
        return Err(CliError::Usage(format!("expected 3 reals, got {}", values.len())));
    };
    Ok(Vector3::try_new(*x, *y, *z)?)
}

fn cmd_exp(v: Vector3, format: Option<Format>, out: &mut dyn Write) -> Result<(), CliError> {
    let r = exp_rodrigues(&v);
    #[derive(Serialize)]
    struct ExpOutput {
        v: Vector3,
        rotation: Matrix3,
    }
    let json = || to_json(&ExpOutput { v, rotation: *r.matrix() });
    match format {
        None => writeln!(out, "{}\n{}", json(), text_matrix(r.matrix()))?,
        Some(Format::Json) => writeln!(out, "{}", json())?,
        Some(Format::Text) => writeln!(out, "{}", text_matrix(r.matrix()))?,
        Some(Format::Csv) => out.write_all(matrix_csv(None, r.matrix()).as_bytes())?,
    }
    Ok(())
}

fn cmd_log(entries: &[f64], format: Option<Format>, out: &mut dyn Write) -> Result<(), CliError> {
    let m = Matrix3::from_row_major(
        entries.try_into().map_err(|_| CliError::Usage(format!("expected 9 reals, got {}", entries.len())))?,
    );
    let v = log(&Rotation::try_from_matrix(m)?);
    let axis_angle = v.to_axis_angle();
    #[derive(Serialize)]
    struct LogOutput {
        v: RotationVector,
        axis: Vector3,
        angle: f64,
    }
    let json = || to_json(&LogOutput { v, axis: axis_angle.axis(), angle: axis_angle.angle() });
    let text = || {
        format!(
            "v    {}\naxis {}\nangle{}",
            text_vector(&v.vector()),
            text_vector(&axis_angle.axis()),
            text_real(axis_angle.angle())
        )
    };
    match format {
        None => writeln!(out, "{}\n{}", json(), text())?,
        Some(Format::Json) => writeln!(out, "{}", json())?,
        Some(Format::Text) => writeln!(out, "{}", text())?,
        Some(Format::Csv) => {
            let (a, b) = (v.vector(), axis_angle.axis());
            out.write_all(csv_row(["x", "y", "z", "axis_x", "axis_y", "axis_z", "angle"]).as_bytes())?;
            let values = [a.x, a.y, a.z, b.x, b.y, b.z, axis_angle.angle()];
            out.write_all(csv_row(values.iter().map(|x| csv_real(*x))).as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_jac(
    v: Vector3,
    formula: JacFormula,
    point: Option<Vector3>,
    step: Option<f64>,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let v = RotationVector::try_new(v)?.vector();
    let h = step.unwrap_or_else(|| default_step(&v));
    if !(h > 0.0 && h.is_finite()) {
        return Err(rotjac_core::Error::InvalidStep { step: h }.into());
    }
    // labelled blocks: ∂R/∂vᵢ for i = 1..3, or the single ∂(Ru)/∂v
    let blocks: Vec<(String, Matrix3)> = match point {
        None => {
            let jac = match formula {
                JacFormula::Compact => drot_compact(&v),
                JacFormula::Classical => drot_classical(&v),
                JacFormula::Fd => fd_rotation_jacobian(&v, h),
            };
            jac.blocks().iter().enumerate().map(|(i, b)| (format!("{}", i + 1), *b)).collect()
        }
        Some(u) => {
            let m = match formula {
                JacFormula::Compact => *dpoint_compact(&v, &u).matrix(),
                JacFormula::Classical => *dpoint_classical(&v, &u).matrix(),
                JacFormula::Fd => fd_point_jacobian(&v, &u, h).0,
            };
            vec![("point".to_owned(), m)]
        }
    };
    #[derive(Serialize)]
    struct JacOutput {
        v: Vector3,
        formula: JacFormula,
        #[serde(skip_serializing_if = "Option::is_none")]
        point: Option<Vector3>,
        #[serde(skip_serializing_if = "Option::is_none")]
        blocks: Option<Vec<Matrix3>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        jacobian: Option<Matrix3>,
    }
    let json = || {
        let matrices = blocks.iter().map(|(_, m)| *m).collect::<Vec<_>>();
        to_json(&JacOutput {
            v,
            formula,
            point,
            jacobian: point.map(|_| matrices[0]),
            blocks: point.is_none().then_some(matrices),
        })
    };
    let text = || {
        blocks
            .iter()
            .map(|(label, m)| match point {
                None => format!("dR/dv{label}\n{}", text_matrix(m)),
                Some(_) => format!("d(Ru)/dv\n{}", text_matrix(m)),
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    match format {
        None => writeln!(out, "{}\n{}", json(), text())?,
        Some(Format::Json) => writeln!(out, "{}", json())?,
        Some(Format::Text) => writeln!(out, "{}", text())?,
        Some(Format::Csv) => {
            let mut csv = csv_row(["block", "row", "c0", "c1", "c2"]);
            for (label, m) in &blocks {
                csv += &matrix_rows_csv(label, m);
            }
            out.write_all(csv.as_bytes())?;
        }
    }
    Ok(())
}

fn matrix_csv(label: Option<&str>, m: &Matrix3) -> String {
    match label {
        Some(label) => csv_row(["block", "row", "c0", "c1", "c2"]) + &matrix_rows_csv(label, m),
        None => {
            let mut csv = csv_row(["row", "c0", "c1", "c2"]);
            for (i, row) in m.rows().iter().enumerate() {
                csv += &csv_row(std::iter::once(i.to_string()).chain(row.iter().map(|x| csv_real(*x))));
            }
            csv
        }
    }
}

fn matrix_rows_csv(label: &str, m: &Matrix3) -> String {
    m.rows()
        .iter()
        .enumerate()
        .map(|(i, row)| csv_row([label.to_owned(), i.to_string()].into_iter().chain(row.iter().map(|x| csv_real(*x)))))
        .collect()
}

fn cmd_check(trials: u64, seed: u64, jobs: usize, format: Option<Format>, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_check(trials, seed, jobs);
    match format.unwrap_or(Format::Csv) {
        Format::Csv => out.write_all(report.to_csv().as_bytes())?,
        Format::Json => writeln!(out, "{}", to_json(&report))?,
        Format::Text => out.write_all(report.to_text().as_bytes())?,
    }
    let failures = report.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::PropertyFailure(failures.into_iter().map(str::to_owned).collect()))
    }
}

fn cmd_fit(
    input: Option<&PathBuf>,
    synth: Option<&[String]>,
    method: Method,
    v0: &RotationVector,
    opts: &SolveOptions,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (set, v_true) = match (input, synth) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
            (CorrespondenceFile::parse(&text)?.into_set()?, None)
        }
        (None, Some(fields)) => {
            let synth = SynthArgs::parse(fields)?;
            let axis = unit_vector(&mut trial_rng(synth.seed, 1));
            let v_true = RotationVector::try_new(axis.scale(synth.theta))?;
            (synthesize(synth.n, &v_true, synth.sigma, synth.seed)?, Some(v_true))
        }
        (None, None) => return Err(CliError::Usage("one of --input or --synth is required".to_owned())),
    };
    let fit = FitOutput::new(solve(&set, v0, method, opts)?, v_true);
    match format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", to_json(&fit))?,
        Format::Csv => {
            let r = &fit.report;
            out.write_all(csv_row(["iteration", "cost", "gradient_norm"]).as_bytes())?;
            for (k, (c, g)) in r.residual_history.iter().zip(&r.gradient_norm_history).enumerate() {
                out.write_all(csv_row([k.to_string(), csv_real(*c), csv_real(*g)]).as_bytes())?;
            }
        }
        Format::Text => {
            let r = &fit.report;
            writeln!(out, "{:<11}{}", "v_hat", text_vector(&r.v_hat.vector()))?;
            writeln!(out, "{:<11}{:>13}", "iterations", r.iterations)?;
            writeln!(out, "{:<11}{:>13}", "converged", r.converged)?;
            let final_cost = *r.residual_history.last().expect("history starts non-empty");
            writeln!(out, "{:<11}{}", "cost", text_real(final_cost))?;
            if let Some(err) = fit.angle_error {
                writeln!(out, "{:<11}{}", "angle_err", text_real(err))?;
            }
        }
    }
    Ok(())
}

struct SynthArgs {
    n: usize,
    theta: f64,
    sigma: f64,
    seed: u64,
}

impl SynthArgs {
    fn parse(fields: &[String]) -> Result<Self, CliError> {
        let [n, theta, sigma, seed] = fields else {
            return Err(CliError::Usage("--synth takes N THETA SIGMA SEED".to_owned()));
        };
        let bad = |what: &str, value: &str| CliError::Usage(format!("--synth: invalid {what} {value:?}"));
        Ok(Self {
            n: n.parse().map_err(|_| bad("N", n))?,
            theta: theta.parse().map_err(|_| bad("THETA", theta))?,
            sigma: sigma.parse().map_err(|_| bad("SIGMA", sigma))?,
            seed: seed.parse().map_err(|_| bad("SEED", seed))?,
        })
    }
}
