//! Rotation fitting by first-order optimization in exponential coordinates.
//!
//! Minimizes `½ Σᵢ ‖R(v)uᵢ − yᵢ‖²` over `v` with either damped Gauss–Newton or
//! gradient descent with Armijo backtracking. Iterates stay in the canonical
//! chart `‖v‖ ≤ π` through the antipodal wrap of [`RotationVector::wrap`].

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Error;
use crate::jacobian::Linearization;
use crate::linalg::{Matrix3, Vector3};
use crate::sampling::{cube_vector, trial_rng};
use crate::so3::RotationVector;

/// Attempts [`synthesize`] makes before giving up on non-collinear sources.
pub const SYNTH_ATTEMPTS: usize = 100;

/// Relative bound on the second invariant of the source scatter matrix below
/// which the sources are treated as collinear.
const COLLINEARITY_TOL: f64 = 1e-10;

/// Rejected steps tolerated in one Gauss–Newton iteration before the solver
/// declares a stall.
const MAX_REJECTIONS: usize = 40;

/// Backtracking halvings tolerated in one gradient-descent iteration.
const MAX_BACKTRACKS: usize = 60;

/// Paired source and target points.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceSet {
    sources: Vec<Vector3>,
    targets: Vec<Vector3>,
    noise_sigma: f64,
}

impl CorrespondenceSet {
    /// Validates lengths, `N ≥ 3`, and that the sources are not collinear.
    pub fn try_new(sources: Vec<Vector3>, targets: Vec<Vector3>, noise_sigma: f64) -> Result<Self, Error> {
        if sources.len() != targets.len() {
            return Err(Error::LengthMismatch { sources: sources.len(), targets: targets.len() });
        }
        if sources.len() < 3 {
            return Err(Error::TooFewPoints { count: sources.len() });
        }
        if !(noise_sigma >= 0.0) {
            return Err(Error::NegativeNoise { sigma: noise_sigma });
        }
        if !sources.iter().chain(&targets).all(Vector3::is_finite) {
            return Err(Error::NonFinite);
        }
        if collinear(&sources) {
            return Err(Error::DegenerateGeometry);
        }
        Ok(Self { sources, targets, noise_sigma })
    }

    pub fn sources(&self) -> &[Vector3] {
        &self.sources
    }

    pub fn targets(&self) -> &[Vector3] {
        &self.targets
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

/// True when the centered sources span at most a line, i.e. the second
/// invariant `λ₁λ₂ + λ₁λ₃ + λ₂λ₃` of their scatter matrix vanishes.
fn collinear(points: &[Vector3]) -> bool {
    let n = points.len() as f64;
    let centroid = points.iter().fold(Vector3::ZERO, |acc, p| acc + *p).scale(1.0 / n);
    let scatter = points.iter().fold(Matrix3::ZERO, |acc, p| {
        let d = *p - centroid;
        acc + d.outer(&d)
    });
    let trace = scatter.trace();
    let second_invariant = 0.5 * (trace * trace - (scatter * scatter).trace());
    !(second_invariant > COLLINEARITY_TOL * trace * trace)
}

/// `n` sources uniform in `[-1, 1]³`, targets `R(v_true)uᵢ` plus Gaussian
/// noise of standard deviation `noise_sigma` on each component.
pub fn synthesize(n: usize, v_true: &RotationVector, noise_sigma: f64, seed: u64) -> Result<CorrespondenceSet, Error> {
    if n < 3 {
        return Err(Error::TooFewPoints { count: n });
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::NegativeNoise { sigma: noise_sigma });
    }
    let rotation = v_true.exp();
    let noise = Normal::new(0.0, noise_sigma).map_err(|_| Error::NegativeNoise { sigma: noise_sigma })?;
    let mut rng = trial_rng(seed, 0);
    for _ in 0..SYNTH_ATTEMPTS {
        let sources: Vec<Vector3> = (0..n).map(|_| cube_vector(&mut rng, 1.0)).collect();
        if collinear(&sources) {
            continue;
        }
        let targets = sources
            .iter()
            .map(|u| {
                let clean = rotation * *u;
                if noise_sigma == 0.0 {
                    clean
                } else {
                    clean + Vector3::new(sample(&noise, &mut rng), sample(&noise, &mut rng), sample(&noise, &mut rng))
                }
            })
            .collect();
        return Ok(CorrespondenceSet { sources, targets, noise_sigma });
    }
    Err(Error::DegenerateGeometry)
}

fn sample<R: Rng + ?Sized>(noise: &Normal<f64>, rng: &mut R) -> f64 {
    noise.sample(rng)
}

/// Stacked residual `r = (R(v)uᵢ − yᵢ)ᵢ` of length `3N` and its `3N×3` Jacobian.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualJacobian {
    pub residual: Vec<f64>,
    pub jacobian: Vec<[f64; 3]>,
}

impl ResidualJacobian {
    /// `½‖r‖²`
    pub fn cost(&self) -> f64 {
        0.5 * self.residual.iter().map(|r| r * r).sum::<f64>()
    }

    /// `Jᵀr`
    pub fn gradient(&self) -> Vector3 {
        self.jacobian
            .iter()
            .zip(&self.residual)
            .fold(Vector3::ZERO, |acc, (row, r)| acc + Vector3::from_array(*row).scale(*r))
    }

    /// `JᵀJ`
    pub fn gram(&self) -> Matrix3 {
        self.jacobian.iter().fold(Matrix3::ZERO, |acc, row| {
            let row = Vector3::from_array(*row);
            acc + row.outer(&row)
        })
    }
}

/// Residuals and Jacobian rows at `v`. `R(v)` is computed once and shared by
/// all points.
pub fn residual_and_jacobian(c: &CorrespondenceSet, v: &Vector3) -> ResidualJacobian {
    let lin = Linearization::new(v);
    let rotation = lin.rotation();
    let mut residual = Vec::with_capacity(3 * c.len());
    let mut jacobian = Vec::with_capacity(3 * c.len());
    for (u, y) in c.sources.iter().zip(&c.targets) {
        let r = rotation * *u - *y;
        let j = lin.dpoint_compact(u);
        residual.extend_from_slice(&r.to_array());
        jacobian.extend(j.matrix().rows());
    }
    ResidualJacobian { residual, jacobian }
}

/// `½ Σᵢ ‖R(v)uᵢ − yᵢ‖²`
pub fn cost(c: &CorrespondenceSet, v: &Vector3) -> f64 {
    let rotation = crate::so3::exp_rodrigues(v);
    0.5 * c.sources.iter().zip(&c.targets).map(|(u, y)| (rotation * *u - *y).norm_squared()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    GradientDescent,
    GaussNewton,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop once `‖Jᵀr‖ ≤ g_tol`.
    pub g_tol: f64,
    /// Step shrink factor for gradient-descent backtracking.
    pub backtrack: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c1: f64,
    /// Initial Levenberg damping.
    pub lambda0: f64,
    /// Damping multiplier after an accepted step.
    pub lambda_decrease: f64,
    /// Damping multiplier after a rejected or singular step.
    pub lambda_increase: f64,
    /// Consecutive singular damped systems tolerated before giving up.
    pub max_singular_increases: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            g_tol: 1e-10,
            backtrack: 0.5,
            armijo_c1: 1e-4,
            lambda0: 1e-3,
            lambda_decrease: 0.3,
            lambda_increase: 3.0,
            max_singular_increases: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveReport {
    pub v_hat: RotationVector,
    /// Accepted steps taken.
    pub iterations: usize,
    /// `½‖r‖²` at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    /// `‖Jᵀr‖` at the start and after every accepted step.
    pub gradient_norm_history: Vec<f64>,
    pub converged: bool,
    pub method: Method,
}

/// Solves `(A) x = b` for symmetric `A`; `None` if `A` is numerically singular.
fn solve_3x3(a: &Matrix3, b: &Vector3) -> Option<Vector3> {
    let scale = a.max_abs();
    if !(scale > 0.0) || !a.is_finite() {
        return None;
    }
    let det = a.determinant();
    if !(det.abs() > 1e-14 * scale * scale * scale) {
        return None;
    }
    Some(a.adjugate().scale(1.0 / det) * *b)
}

pub fn solve(
    c: &CorrespondenceSet,
    v0: &RotationVector,
    method: Method,
    opts: &SolveOptions,
) -> Result<SolveReport, Error> {
    let mut v = *v0;
    let mut state = residual_and_jacobian(c, &v.vector());
    let mut current_cost = state.cost();
    let mut gradient = state.gradient();
    let mut report = SolveReport {
        v_hat: v,
        iterations: 0,
        residual_history: alloc::vec![current_cost],
        gradient_norm_history: alloc::vec![gradient.norm()],
        converged: false,
        method,
    };
    let mut lambda = opts.lambda0;
    let mut step_size = 1.0;

    while report.iterations < opts.max_iter {
        if gradient.norm() <= opts.g_tol {
            break;
        }
        let next = match method {
            Method::GaussNewton => gauss_newton_step(c, &v, &state, current_cost, &mut lambda, opts)?,
            Method::GradientDescent => gradient_step(c, &v, &gradient, current_cost, &mut step_size, opts)?,
        };
        let Some((v_next, cost_next)) = next else {
            break;
        };
        v = v_next;
        current_cost = cost_next;
        state = residual_and_jacobian(c, &v.vector());
        gradient = state.gradient();
        report.iterations += 1;
        report.residual_history.push(current_cost);
        report.gradient_norm_history.push(gradient.norm());
    }

    report.v_hat = v;
    report.converged = gradient.norm() <= opts.g_tol;
    Ok(report)
}

/// One accepted Levenberg–Marquardt step, or `None` if no decrease was found.
fn gauss_newton_step(
    c: &CorrespondenceSet,
    v: &RotationVector,
    state: &ResidualJacobian,
    current_cost: f64,
    lambda: &mut f64,
    opts: &SolveOptions,
) -> Result<Option<(RotationVector, f64)>, Error> {
    let gram = state.gram();
    let rhs = -state.gradient();
    let mut singular = 0;
    let mut rejected = 0;
    loop {
        let damped = gram + Matrix3::IDENTITY.scale(*lambda);
        let Some(delta) = solve_3x3(&damped, &rhs) else {
            singular += 1;
            if singular > opts.max_singular_increases {
                return Err(Error::SingularNormalEquations);
            }
            *lambda *= opts.lambda_increase;
            continue;
        };
        singular = 0;
        let candidate = RotationVector::wrap(v.vector() + delta)?;
        let candidate_cost = cost(c, &candidate.vector());
        if candidate_cost < current_cost {
            *lambda *= opts.lambda_decrease;
            return Ok(Some((candidate, candidate_cost)));
        }
        rejected += 1;
        if rejected > MAX_REJECTIONS {
            return Ok(None);
        }
        *lambda *= opts.lambda_increase;
    }
}

/// One Armijo-accepted gradient step, or `None` if backtracking failed.
fn gradient_step(
    c: &CorrespondenceSet,
    v: &RotationVector,
    gradient: &Vector3,
    current_cost: f64,
    step_size: &mut f64,
    opts: &SolveOptions,
) -> Result<Option<(RotationVector, f64)>, Error> {
    let g2 = gradient.norm_squared();
    // allow the step to grow again after a run of short ones
    let mut alpha = (*step_size / opts.backtrack).min(1.0);
    for _ in 0..MAX_BACKTRACKS {
        let candidate = RotationVector::wrap(v.vector() - gradient.scale(alpha))?;
        let candidate_cost = cost(c, &candidate.vector());
        if candidate_cost <= current_cost - opts.armijo_c1 * alpha * g2 {
            *step_size = alpha;
            return Ok(Some((candidate, candidate_cost)));
        }
        alpha *= opts.backtrack;
    }
    Ok(None)
}
