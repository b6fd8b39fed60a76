//! Numerical maximization of the eavesdropper's readout information and
//! general curve-intersection utilities.
//!
//! [`maximize_iae`] searches over probe-state amplitudes for the attack
//! that maximizes the mutual information between the sender's bit and a
//! computational-basis readout of the probe, subject to the symmetric
//! intercept constraints ([`ConstraintMode::SixState`] demands equal
//! disturbance in all three mutually unbiased bases,
//! [`ConstraintMode::Bb84`] only in Z and X).  The search is a
//! multi-start pipeline: graduated quadratic penalties with a
//! quasi-Newton inner loop, a Gauss–Newton projection onto the
//! constraint manifold, and a projected-gradient polish on the manifold
//! itself.  Results are deterministic for a fixed seed.
//!
//! [`optimize_eve_measurement`] solves the complementary problem: with
//! the probe states fixed, it maximizes the readout information over all
//! orthonormal projective measurements of the probe.
//!
//! [`find_intersection`] locates the crossing of two scalar curves and
//! backs the critical-disturbance computations.

use crate::attack::ProbeSpec;
use crate::error::{Error, Result};
use crate::info::tau;
use crate::numeric::{
    bfgs_max, bisect, gauss_newton_project, golden_section_min, projected_ascent,
};
use crate::quantum::{Basis, PureState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Number of random restarts used by [`maximize_iae`].
pub const MULTI_START_COUNT: usize = 32;

/// Default feasibility tolerance enforced on returned probe states.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Penalty weights for the graduated unconstrained stages.
const PENALTY_WEIGHTS: [f64; 4] = [1.0, 10.0, 1e3, 1e5];
/// Quasi-Newton iteration cap per penalty stage.
const PENALTY_ITERS: usize = 250;
/// Iteration cap for the on-manifold polish.
const POLISH_ITERS: usize = 200;
/// Constraint-manifold projection accuracy (tighter than any user tolerance).
const PROJECTION_TOL: f64 = 1e-13;
/// Real parameters per probe state: four magnitudes plus three relative phases.
const PARAMS_PER_STATE: usize = 7;

/// Which family of symmetric-intercept constraints the probe states must
/// satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Equal disturbance in all three mutually unbiased bases (Z, X, Y).
    /// The flipped-branch states are pinned to a fixed orthonormal pair,
    /// which costs no generality.
    SixState,
    /// Equal disturbance in Z and X only, as in the four-state (BB84)
    /// protocol.  All four probe states are free.
    Bb84,
}

/// Constraint family together with the feasibility tolerance the final
/// answer must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    mode: ConstraintMode,
    tolerance: f64,
}

impl ConstraintSet {
    /// Builds a constraint set with an explicit tolerance.
    ///
    /// # Errors
    /// Rejects tolerances that are not finite and positive.
    pub fn new(mode: ConstraintMode, tolerance: f64) -> Result<Self> {
        if !tolerance.is_finite() || tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "constraint tolerance must be finite and positive, got {tolerance}"
            )));
        }
        Ok(Self { mode, tolerance })
    }

    /// Six-state constraints at the default tolerance.
    pub fn six_state() -> Self {
        Self {
            mode: ConstraintMode::SixState,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Four-state (BB84) constraints at the default tolerance.
    pub fn bb84() -> Self {
        Self {
            mode: ConstraintMode::Bb84,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// The constraint family.
    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    /// The feasibility tolerance enforced on results.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Outcome of a probe-state search.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Largest readout information found (bits, clamped to [0, 1]).
    pub best_value: f64,
    /// Probe states attaining `best_value`.
    pub parameters: ProbeSpec,
    /// Absolute constraint residuals at the returned point.
    pub residuals: Vec<f64>,
    /// Total inner-loop iterations across every restart and stage.
    pub iterations: usize,
    /// How many restarts finished within 1e-6 of `best_value`.
    pub starts_near_best: usize,
    /// Total number of restarts attempted.
    pub total_starts: usize,
}

/// Orthonormal projective measurement of the probe, one outcome state
/// per measurement result.
#[derive(Debug, Clone)]
pub struct ProbeMeasurement {
    outcomes: Vec<PureState>,
}

impl ProbeMeasurement {
    /// The measurement's outcome states, in readout order.
    pub fn outcomes(&self) -> &[PureState] {
        &self.outcomes
    }
}

/// Normalized complex amplitudes of one probe state from its parameter
/// block: four signed magnitudes and three relative phases (the first
/// component's phase is fixed to zero to remove the global phase).
fn state_block(x: &DVector<f64>, offset: usize) -> Option<[Complex64; 4]> {
    let m = [x[offset], x[offset + 1], x[offset + 2], x[offset + 3]];
    let phase = [0.0, x[offset + 4], x[offset + 5], x[offset + 6]];
    let norm_sq: f64 = m.iter().map(|v| v * v).sum();
    if norm_sq < 1e-12 {
        return None;
    }
    let inv = norm_sq.sqrt().recip();
    Some(std::array::from_fn(|i| {
        Complex64::from_polar(m[i] * inv, phase[i])
    }))
}

/// ⟨x|y⟩ on raw four-component amplitude arrays.
fn inner4(x: &[Complex64; 4], y: &[Complex64; 4]) -> Complex64 {
    (0..4).map(|i| x[i].conj() * y[i]).sum()
}

/// Mutual information between a uniform input bit and the readout
/// outcome, from the two conditional outcome distributions.
fn readout_information(p0: &[f64], p1: &[f64]) -> f64 {
    let mut total = 1.0;
    for (a, b) in p0.iter().zip(p1) {
        total += 0.5 * tau(*a, *b);
    }
    total
}

/// Shared multi-start driver: penalty stages, projection, then
/// on-manifold polish, repeated from `starts` random initial points.
/// Returns the feasible candidates' best (value, point), the cumulative
/// iteration count, and how many candidates came within 1e-6 of the best.
fn multi_start_maximize(
    n_params: usize,
    objective: &dyn Fn(&DVector<f64>) -> f64,
    residual: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    seed: u64,
    starts: usize,
) -> (Option<(f64, DVector<f64>)>, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iterations = 0usize;
    let mut candidates: Vec<(f64, DVector<f64>)> = Vec::new();

    for _ in 0..starts {
        let mut x = DVector::zeros(n_params);
        for block in 0..(n_params / PARAMS_PER_STATE) {
            let off = block * PARAMS_PER_STATE;
            for j in 0..4 {
                x[off + j] = rng.gen_range(-1.0..1.0);
            }
            for j in 4..PARAMS_PER_STATE {
                x[off + j] = rng.gen_range(-PI..PI);
            }
        }

        for &mu in &PENALTY_WEIGHTS {
            let stage = bfgs_max(
                |p: &DVector<f64>| objective(p) - mu * residual(p).norm_squared(),
                &x,
                PENALTY_ITERS,
                1e-8,
            );
            iterations += stage.iterations;
            x = stage.x;
        }

        let Some(feasible) =
            gauss_newton_project(&mut |p: &DVector<f64>| residual(p), &x, PROJECTION_TOL, 80)
        else {
            continue;
        };
        let Some(polished) = projected_ascent(
            |p: &DVector<f64>| objective(p),
            &mut |p: &DVector<f64>| residual(p),
            &feasible,
            PROJECTION_TOL,
            POLISH_ITERS,
        ) else {
            continue;
        };
        iterations += polished.iterations;
        candidates.push((polished.value, polished.x));
    }

    let best = candidates
        .iter()
        .fold(None::<(f64, &DVector<f64>)>, |acc, (v, x)| match acc {
            Some((bv, _)) if bv >= *v => acc,
            _ => Some((*v, x)),
        })
        .map(|(v, x)| (v, x.clone()));
    let near_best = match &best {
        Some((bv, _)) => candidates.iter().filter(|(v, _)| *v >= bv - 1e-6).count(),
        None => 0,
    };
    (best, iterations, near_best)
}

/// Maximizes the eavesdropper's computational-readout information at
/// disturbance `d` over all probe states satisfying `constraints`.
///
/// The disturbance must lie in (0, 0.5].  The search runs
/// [`MULTI_START_COUNT`] independent restarts seeded from `seed` and is
/// fully deterministic.
///
/// # Errors
/// - [`Error::OutOfRange`] if `d` is outside (0, 0.5].
/// - [`Error::NonConvergence`] if no restart produced a point meeting
///   the constraint tolerance.
pub fn maximize_iae(d: f64, constraints: &ConstraintSet, seed: u64) -> Result<OptimizationResult> {
    if !d.is_finite() || d <= 0.0 || d > 0.5 {
        return Err(Error::OutOfRange {
            name: "disturbance",
            value: d,
            min: 0.0,
            max: 0.5,
        });
    }
    let fidelity = 1.0 - d;

    let (n_params, objective, residual): (
        usize,
        Box<dyn Fn(&DVector<f64>) -> f64>,
        Box<dyn Fn(&DVector<f64>) -> DVector<f64>>,
    ) = match constraints.mode {
        ConstraintMode::SixState => {
            let obj = move |x: &DVector<f64>| -> f64 {
                let (Some(a), Some(c)) = (state_block(x, 0), state_block(x, 7)) else {
                    return -1e3;
                };
                let mut p0 = [0.0; 4];
                let mut p1 = [0.0; 4];
                for o in 0..4 {
                    p0[o] = fidelity * a[o].norm_sqr();
                    p1[o] = fidelity * c[o].norm_sqr();
                }
                p0[0] += d;
                p1[3] += d;
                readout_information(&p0, &p1)
            };
            let res = move |x: &DVector<f64>| -> DVector<f64> {
                match (state_block(x, 0), state_block(x, 7)) {
                    (Some(a), Some(c)) => {
                        let ca = inner4(&c, &a);
                        let top = a[0].conj() + c[3];
                        let bottom = a[3].conj() + c[0];
                        DVector::from_vec(vec![
                            ca.re - (2.0 - 1.0 / fidelity),
                            top.re,
                            top.im,
                            bottom.re,
                            bottom.im,
                        ])
                    }
                    _ => DVector::from_element(5, 1e3),
                }
            };
            (2 * PARAMS_PER_STATE, Box::new(obj), Box::new(res))
        }
        ConstraintMode::Bb84 => {
            let obj = move |x: &DVector<f64>| -> f64 {
                let blocks = [
                    state_block(x, 0),
                    state_block(x, 7),
                    state_block(x, 14),
                    state_block(x, 21),
                ];
                let [Some(a), Some(b), Some(c), Some(dd)] = blocks else {
                    return -1e3;
                };
                let mut p0 = [0.0; 4];
                let mut p1 = [0.0; 4];
                for o in 0..4 {
                    p0[o] = fidelity * a[o].norm_sqr() + d * b[o].norm_sqr();
                    p1[o] = fidelity * c[o].norm_sqr() + d * dd[o].norm_sqr();
                }
                readout_information(&p0, &p1)
            };
            let res = move |x: &DVector<f64>| -> DVector<f64> {
                let blocks = [
                    state_block(x, 0),
                    state_block(x, 7),
                    state_block(x, 14),
                    state_block(x, 21),
                ];
                let [Some(a), Some(b), Some(c), Some(dd)] = blocks else {
                    return DVector::from_element(4, 1e3);
                };
                let ca = inner4(&c, &a);
                let bd = inner4(&b, &dd);
                let ab = inner4(&a, &b);
                let dc = inner4(&dd, &c);
                let ad = inner4(&a, &dd);
                let bc = inner4(&b, &c);
                DVector::from_vec(vec![
                    fidelity * ca.re + d * bd.re - (2.0 * fidelity - 1.0),
                    (ab + dc).re,
                    (ad + bc).re,
                    (ad + bc).im,
                ])
            };
            (4 * PARAMS_PER_STATE, Box::new(obj), Box::new(res))
        }
    };

    let (best, iterations, starts_near_best) = multi_start_maximize(
        n_params,
        objective.as_ref(),
        residual.as_ref(),
        seed,
        MULTI_START_COUNT,
    );
    let Some((best_value, best_x)) = best else {
        return Err(Error::NonConvergence(format!(
            "no feasible probe found in {MULTI_START_COUNT} restarts at disturbance {d}"
        )));
    };

    let residuals: Vec<f64> = residual(&best_x).iter().map(|r| r.abs()).collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst >= constraints.tolerance {
        return Err(Error::NonConvergence(format!(
            "best candidate violates constraints: residual {worst:.3e} exceeds \
             tolerance {:.3e} after {MULTI_START_COUNT} restarts",
            constraints.tolerance
        )));
    }

    let to_state = |offset: usize| -> Result<PureState> {
        let amps = state_block(&best_x, offset).ok_or(Error::ZeroNorm(0.0))?;
        PureState::new(amps.to_vec())
    };
    let parameters = match constraints.mode {
        ConstraintMode::SixState => {
            let a = to_state(0)?;
            let c = to_state(7)?;
            let b = PureState::basis_state(4, 0)?;
            let flipped_one = PureState::basis_state(4, 3)?;
            ProbeSpec::new(d, a, b, c, flipped_one)?
        }
        ConstraintMode::Bb84 => {
            let a = to_state(0)?;
            let b = to_state(7)?;
            let c = to_state(14)?;
            let dd = to_state(21)?;
            ProbeSpec::new(d, a, b, c, dd)?
        }
    };

    Ok(OptimizationResult {
        best_value: best_value.clamp(0.0, 1.0),
        parameters,
        residuals,
        iterations,
        starts_near_best,
        total_starts: MULTI_START_COUNT,
    })
}

/// Maximizes the eavesdropper's information over all orthonormal
/// projective measurements of the probe, with the probe states fixed.
///
/// The probe's two conditional states (given the sender's bit, averaged
/// over the receiver's outcome) are computed for transmissions in
/// `basis`; the measurement is parameterized as a unitary image of the
/// computational basis and optimized by a seeded multi-start
/// quasi-Newton ascent.  Returns the best measurement and its
/// information in bits.
pub fn optimize_eve_measurement(
    p: &ProbeSpec,
    basis: Basis,
    seed: u64,
) -> Result<(ProbeMeasurement, f64)> {
    let sigmas = crate::attack::eve_marginal_states(p, basis)?;
    let pd = p.probe_dim();
    let n_params = pd * pd;
    let s0 = sigmas[0].matrix().clone();
    let s1 = sigmas[1].matrix().clone();

    // A Hermitian generator H (pd real diagonal entries, then the real
    // and imaginary parts of each upper off-diagonal entry) yields the
    // measurement unitary U = exp(iH); measurement vectors are U's columns.
    let unitary_from = |x: &DVector<f64>| -> DMatrix<Complex64> {
        let mut h = DMatrix::from_element(pd, pd, Complex64::new(0.0, 0.0));
        let mut k = 0;
        for i in 0..pd {
            h[(i, i)] = Complex64::new(x[k], 0.0);
            k += 1;
        }
        for i in 0..pd {
            for j in (i + 1)..pd {
                let z = Complex64::new(x[k], x[k + 1]);
                k += 2;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let eig = h.symmetric_eigen();
        let q = eig.eigenvectors;
        let mut scaled = q.clone();
        for j in 0..pd {
            let phase = Complex64::from_polar(1.0, eig.eigenvalues[j]);
            for i in 0..pd {
                scaled[(i, j)] *= phase;
            }
        }
        &scaled * q.adjoint()
    };

    let information = |x: &DVector<f64>| -> f64 {
        let u = unitary_from(x);
        let mut total = 1.0;
        for o in 0..pd {
            let col = u.column(o);
            let p0 = col.dotc(&(&s0 * &col)).re.max(0.0);
            let p1 = col.dotc(&(&s1 * &col)).re.max(0.0);
            total += 0.5 * tau(p0, p1);
        }
        total
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for _ in 0..8 {
        let x0 = DVector::from_fn(n_params, |_, _| rng.gen_range(-1.5..1.5));
        let run = bfgs_max(information, &x0, 300, 1e-9);
        match &best {
            Some((bv, _)) if *bv >= run.value => {}
            _ => best = Some((run.value, run.x)),
        }
    }
    let (value, x) = best.expect("at least one restart ran");

    let u = unitary_from(&x);
    let mut outcomes = Vec::with_capacity(pd);
    for o in 0..pd {
        outcomes.push(PureState::from_vector(u.column(o).into_owned())?);
    }
    Ok((ProbeMeasurement { outcomes }, value.clamp(0.0, 1.0)))
}

/// Locates a point in [lo, hi] where two scalar curves meet.
///
/// A 65-point scan looks for a sign change of the gap `curve_a − curve_b`;
/// a strict sign change is refined by bisection, and otherwise the point
/// of smallest |gap| is refined by a golden-section search, which also
/// resolves tangential (touching) roots.  The returned point `x` always
/// satisfies |curve_a(x) − curve_b(x)| < 1e-10.  When several crossings
/// exist, the leftmost detected one is returned.
///
/// # Errors
/// - [`Error::InvalidConfig`] if the interval is empty or not finite.
/// - [`Error::NoCrossing`] if the curves coincide over the whole interval
///   (no isolated crossing) or never come within tolerance of each other.
/// - Any error either curve returns on [lo, hi] is propagated.
pub fn find_intersection(
    curve_a: impl Fn(f64) -> Result<f64>,
    curve_b: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidConfig(format!(
            "intersection interval [{lo}, {hi}] is empty or not finite"
        )));
    }
    const GRID: usize = 65;
    let gap = |x: f64| -> Result<f64> { Ok(curve_a(x)? - curve_b(x)?) };

    let xs: Vec<f64> = (0..GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID - 1) as f64)
        .collect();
    let mut gaps = Vec::with_capacity(GRID);
    for &x in &xs {
        gaps.push(gap(x)?);
    }

    if gaps.iter().all(|g| g.abs() <= 1e-12) {
        return Err(Error::NoCrossing { lo, hi });
    }

    for i in 0..GRID - 1 {
        if gaps[i] * gaps[i + 1] < 0.0 {
            let root = bisect(
                |x| gap(x).unwrap_or(f64::NAN),
                xs[i],
                xs[i + 1],
                gaps[i],
                1e-12,
            );
            return Ok(root);
        }
    }

    let k = gaps
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    let bracket_lo = xs[k.saturating_sub(1)];
    let bracket_hi = xs[(k + 1).min(GRID - 1)];
    let (x_star, g_star) = golden_section_min(
        |x| gap(x).unwrap_or(f64::INFINITY).abs(),
        bracket_lo,
        bracket_hi,
        1e-9,
    );
    if g_star < 1e-10 {
        Ok(x_star)
    } else {
        Err(Error::NoCrossing { lo, hi })
    }
}
