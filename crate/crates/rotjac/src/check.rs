//! Randomized property suite behind `rotjac check`.
//!
//! Every property draws its inputs from its own stream of the root seed,
//! indexed by trial, so the maxima do not depend on how trials are split
//! across jobs.

use std::f64::consts::PI;

use rotjac_core::fd::{fd_jacobian, fd_point_jacobian, fd_rotation_jacobian};
use rotjac_core::identities::{identity_catalog_check, unit_axis_square_residual, Identity, IDENTITY_COUNT};
use rotjac_core::jacobian::{
    dpoint_classical, dpoint_compact, drot_classical, drot_compact, generators, AGREEMENT_TOL, FD_AGREEMENT_TOL,
    IDENTITY_LIMIT_SLOPE, PARALLEL_IDENTITY_TOL, TANGENCY_TOL,
};
use rotjac_core::sampling::{ball_vector, cube_matrix, cube_vector, rotation_vector_in_band, trial_rng, unit_vector};
use rotjac_core::so3::{
    exp_rodrigues, exp_rodrigues_outer, exp_series, hat, log, vee, DETERMINANT_TOL, ORTHOGONALITY_TOL,
};
use rotjac_core::solver::{cost, residual_and_jacobian, synthesize};
use rotjac_core::{Matrix3, RotationVector, Vector3};
use serde::Serialize;

use crate::output::{csv_real, csv_row};
use crate::parallel::map_chunks;

const FD_STEP: f64 = 1e-5;
const SERIES_TERMS: u32 = 30;

/// Largest residual observed for one property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub property: &'static str,
    pub trials: u64,
    pub skipped: u64,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub trials: u64,
    pub properties: Vec<PropertyOutcome>,
}

impl CheckReport {
    pub fn failures(&self) -> Vec<&'static str> {
        self.properties.iter().filter(|p| !p.passed()).map(|p| p.property).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_row(["property", "trials", "skipped", "max_residual", "tolerance", "status"]);
        for p in &self.properties {
            out += &csv_row([
                p.property.to_owned(),
                p.trials.to_string(),
                p.skipped.to_string(),
                csv_real(p.max_residual),
                csv_real(p.tolerance),
                if p.passed() { "pass" } else { "fail" }.to_owned(),
            ]);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let width = self.properties.iter().map(|p| p.property.len()).max().unwrap_or(0);
        self.properties
            .iter()
            .map(|p| {
                format!(
                    "{:<width$}  {:>12.5e}  <= {:>9.1e}  {}{}\n",
                    p.property,
                    p.max_residual,
                    p.tolerance,
                    if p.passed() { "pass" } else { "FAIL" },
                    if p.skipped > 0 { format!(" ({} skipped)", p.skipped) } else { String::new() },
                )
            })
            .collect()
    }
}

/// A group of properties sharing one input draw per trial.
struct Probe {
    names: &'static [&'static str],
    tolerances: &'static [f64],
    /// One residual per name; `None` marks a skipped sample.
    run: fn(seed: u64, stream: u64) -> Vec<Option<f64>>,
}

const IDENTITY_NAMES: [&str; IDENTITY_COUNT] = [
    "identity_hat_kernel",
    "identity_flip_arguments",
    "identity_product_of_hats",
    "identity_triple_product",
    "identity_hat_of_cross",
    "identity_hat_of_cross_commutator",
    "identity_hat_of_transformed_cross",
    "identity_transformed_cross",
    "identity_trace_identity",
    "identity_hat_of_transformed",
];

const PROBES: &[Probe] = &[
    Probe { names: &["hat_vee_round_trip"], tolerances: &[0.0], run: hat_vee },
    Probe { names: &IDENTITY_NAMES, tolerances: &[1e-12; IDENTITY_COUNT], run: identities },
    Probe { names: &["unit_axis_square"], tolerances: &[1e-14], run: unit_axis },
    Probe {
        names: &["exp_orthogonality", "exp_determinant", "exp_closed_forms_agree", "exp_matches_series"],
        tolerances: &[ORTHOGONALITY_TOL, DETERMINANT_TOL, 1e-12, 1e-12],
        run: exp_forms,
    },
    Probe { names: &["log_round_trip", "log_in_chart"], tolerances: &[1e-10, 0.0], run: log_round_trip },
    Probe { names: &["wrap_preserves_rotation"], tolerances: &[1e-12], run: wrap },
    Probe {
        names: &["drot_compact_vs_classical", "dpoint_compact_vs_classical"],
        tolerances: &[AGREEMENT_TOL, AGREEMENT_TOL],
        run: agreement,
    },
    Probe {
        names: &["fd_oracle_compact", "fd_oracle_classical", "fd_second_order"],
        tolerances: &[FD_AGREEMENT_TOL, FD_AGREEMENT_TOL, 1.0],
        run: fd_oracle,
    },
    Probe { names: &["identity_limit"], tolerances: &[IDENTITY_LIMIT_SLOPE], run: identity_limit },
    Probe { names: &["tangency"], tolerances: &[TANGENCY_TOL], run: tangency },
    Probe { names: &["parallel_perturbation"], tolerances: &[PARALLEL_IDENTITY_TOL], run: parallel },
    Probe { names: &["operator_consistency"], tolerances: &[1e-12], run: operator_consistency },
    Probe { names: &["solver_gradient_fd"], tolerances: &[1e-6], run: solver_gradient },
];

/// Names of every property in report order.
pub fn property_names() -> Vec<&'static str> {
    PROBES.iter().flat_map(|p| p.names.iter().copied()).collect()
}

#[derive(Clone, Copy)]
struct Slot {
    max: f64,
    skipped: u64,
}

impl Slot {
    fn record(&mut self, residual: Option<f64>) {
        match residual {
            // NaN sticks
            Some(r) if r.is_nan() || r > self.max => self.max = r,
            Some(_) => {}
            None => self.skipped += 1,
        }
    }

    fn merge(&mut self, other: Slot) {
        self.record(Some(other.max));
        self.skipped += other.skipped;
    }
}

pub fn run_check(trials: u64, seed: u64, jobs: usize) -> CheckReport {
    let slots = property_names().len();
    let empty = vec![Slot { max: 0.0, skipped: 0 }; slots];
    let partials = map_chunks(trials, jobs, |range| {
        let mut acc = empty.clone();
        for k in range {
            let mut offset = 0;
            for (group, probe) in PROBES.iter().enumerate() {
                let residuals = (probe.run)(seed, ((group as u64) << 40) | k);
                debug_assert_eq!(residuals.len(), probe.names.len());
                for (slot, r) in acc[offset..].iter_mut().zip(residuals) {
                    slot.record(r);
                }
                offset += probe.names.len();
            }
        }
        acc
    });
    let mut total = empty;
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    let tolerances = PROBES.iter().flat_map(|p| p.tolerances.iter().copied());
    let properties = property_names()
        .into_iter()
        .zip(tolerances)
        .zip(total)
        .map(|((property, tolerance), slot)| PropertyOutcome {
            property,
            trials,
            skipped: slot.skipped,
            max_residual: slot.max,
            tolerance,
        })
        .collect();
    CheckReport { seed, trials, properties }
}

fn hat_vee(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let a = cube_vector(&mut rng, 1e3);
    let b = cube_vector(&mut rng, 1e3);
    let back = vee(&hat(&a)).map_or(f64::INFINITY, |v| (v - a).max_abs());
    let action = (hat(&a) * b - a.cross(&b)).max_abs();
    vec![Some(back.max(action))]
}

fn identities(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let (a, b, c) = (cube_vector(&mut rng, 10.0), cube_vector(&mut rng, 10.0), cube_vector(&mut rng, 10.0));
    let g = cube_matrix(&mut rng, 10.0);
    let results = identity_catalog_check(&a, &b, &c, &g);
    debug_assert!(results.iter().zip(Identity::ALL).all(|(r, i)| r.identity == i));
    results.iter().map(|r| r.residual.map(|res| res.relative)).collect()
}

fn unit_axis(seed: u64, stream: u64) -> Vec<Option<f64>> {
    vec![Some(unit_axis_square_residual(&unit_vector(&mut trial_rng(seed, stream))))]
}

fn exp_forms(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let v = ball_vector(&mut trial_rng(seed, stream), PI);
    let r = exp_rodrigues(&v);
    let m = r.matrix();
    vec![
        Some((m.transpose() * *m).distance(&Matrix3::IDENTITY)),
        Some((m.determinant() - 1.0).abs()),
        Some(m.distance(exp_rodrigues_outer(&v).matrix())),
        Some(m.distance(&exp_series(&v, SERIES_TERMS))),
    ]
}

fn log_round_trip(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    // a quarter of the draws each sit near the identity and near the boundary
    let v = match stream % 4 {
        0 => rotation_vector_in_band(&mut rng, 0.0, 1e-4),
        1 => rotation_vector_in_band(&mut rng, PI - 1e-3, PI - 1e-6),
        _ => ball_vector(&mut rng, PI - 1e-6),
    };
    let back = log(&exp_rodrigues(&v));
    vec![Some((back.vector() - v).norm() / v.norm().max(1.0)), Some((back.angle() - PI).max(0.0))]
}

fn wrap(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let v = rotation_vector_in_band(&mut trial_rng(seed, stream), PI, 2.0 * PI - 1e-3);
    let wrapped = RotationVector::wrap(v).map(|w| w.exp().matrix().distance(exp_rodrigues(&v).matrix()));
    vec![Some(wrapped.unwrap_or(f64::INFINITY))]
}

fn agreement(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let v = rotation_vector_in_band(&mut rng, 1e-3, PI - 1e-3);
    let u = unit_vector(&mut rng);
    let point = (*dpoint_compact(&v, &u).matrix() - *dpoint_classical(&v, &u).matrix()).max_abs();
    vec![Some(drot_compact(&v).max_abs_diff(&drot_classical(&v))), Some(point)]
}

fn fd_oracle(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let v = ball_vector(&mut rng, PI);
    let u = cube_vector(&mut rng, 1.0);
    let fd_rot = fd_rotation_jacobian(&v, FD_STEP);
    let fd_point = fd_point_jacobian(&v, &u, FD_STEP);
    let compact = fd_rot.max_abs_diff(&drot_compact(&v)).max(fd_point.max_abs_diff(&dpoint_compact(&v, &u)));
    let classical = fd_rot.max_abs_diff(&drot_classical(&v)).max(fd_point.max_abs_diff(&dpoint_classical(&v, &u)));
    let exact = dpoint_compact(&v, &u);
    let ratio =
        fd_point_jacobian(&v, &u, 1e-2).max_abs_diff(&exact) / fd_point_jacobian(&v, &u, 5e-3).max_abs_diff(&exact);
    vec![Some(compact), Some(classical), Some((ratio - 4.0).abs())]
}

fn identity_limit(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let axis = unit_vector(&mut trial_rng(seed, stream));
    let g = generators();
    let slope = [1e-3, 1e-5]
        .iter()
        .flat_map(|t| {
            let jac = drot_compact(&axis.scale(*t));
            (0..3).map(move |i| jac.block(i).distance(&g[i]) / t).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    vec![Some(slope)]
}

fn tangency(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let v = ball_vector(&mut trial_rng(seed, stream), PI);
    let r = *exp_rodrigues(&v).matrix();
    let worst = [drot_compact(&v), drot_classical(&v)]
        .iter()
        .flat_map(|jac| jac.blocks().iter().map(|d| (d.transpose() * r + r.transpose() * *d).frobenius_norm()))
        .fold(0.0, f64::max);
    vec![Some(worst)]
}

fn parallel(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let v = rotation_vector_in_band(&mut rng, 1e-3, PI);
    let u = cube_vector(&mut rng, 10.0);
    let axis = v.scale(1.0 / v.norm());
    let residual = dpoint_compact(&v, &u).apply(&axis) + exp_rodrigues(&v) * u.cross(&axis);
    vec![Some(residual.norm() / u.norm())]
}

fn operator_consistency(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let v = ball_vector(&mut rng, PI);
    let u = cube_vector(&mut rng, 1.0);
    let drot = drot_compact(&v);
    let dpoint = dpoint_compact(&v, &u);
    let worst = (0..3).map(|i| (*drot.block(i) * u - dpoint.column(i)).norm()).fold(0.0, f64::max);
    vec![Some(worst)]
}

fn solver_gradient(seed: u64, stream: u64) -> Vec<Option<f64>> {
    let mut rng = trial_rng(seed, stream);
    let truth = RotationVector::try_new(ball_vector(&mut rng, PI)).expect("inside the chart");
    let v = ball_vector(&mut rng, PI - 1e-2);
    let Ok(c) = synthesize(10, &truth, 0.02, seed ^ stream) else {
        return vec![None];
    };
    let g = residual_and_jacobian(&c, &v).gradient();
    let fd = fd_jacobian(|x: &Vector3| Ok::<_, std::convert::Infallible>(vec![cost(&c, x)]), &v, FD_STEP)
        .unwrap_or_else(|never| match never {});
    let fd = Vector3::from_array(fd.rows[0]);
    vec![Some((fd - g).norm() / g.norm().max(f64::MIN_POSITIVE))]
}
