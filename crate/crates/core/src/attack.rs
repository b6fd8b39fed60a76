//! The optimal entangling probe attacks and the isometry they induce.
//!
//! The eavesdropper couples each transmitted qubit to a private probe with
//! a unitary, keeps the probe, and forwards the qubit.  Parametrized by the
//! disturbance D (the error rate she is willing to cause), the interaction
//! sends the computational basis to
//!
//! ```text
//! |0⟩ ↦ √F |0⟩⊗a + √(1−F) |1⟩⊗b,
//! |1⟩ ↦ √F |1⟩⊗c + √(1−F) |0⟩⊗d,        F = 1 − D,
//! ```
//!
//! where `a, b, c, d` are normalized probe states.  Three constraints force
//! every signal state of the three conjugate bases to be disturbed by the
//! same amount D (so the attack is invisible in the error-rate pattern),
//! and a fourth makes the map a legal isometry:
//!
//! 1. ⟨b|d⟩ = 0 — the two error-branch states are orthogonal;
//! 2. Re⟨c|a⟩ = 2 − 1/F — the faithful-branch states overlap just enough
//!    to reproduce disturbance D in the superposition bases;
//! 3. ⟨a|b⟩ + ⟨d|c⟩ = 0 — no interference bias between the branches;
//! 4. ⟨a|d⟩ + ⟨b|c⟩ = 0 — the two isometry columns are orthogonal.
//!
//! [`build_optimal_probe`] constructs the information-maximizing solution
//! on a four-dimensional probe; [`build_one_bit_probe`] the best solution
//! on a single probe qubit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{Basis, DensityMatrix, PureState};

/// Tolerance below which constraint residuals count as satisfied.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// A probe attack specification: the disturbance and the four probe states
/// attached to the faithful and flipped branches of the interaction.
///
/// The constructor enforces shape only (equal dimensions of 2 or 4, and a
/// disturbance in [0, 1/2]); whether the states satisfy the attack
/// constraints is a separate question answered by [`check_constraints`].
#[derive(Debug, Clone)]
pub struct ProbeSpec {
    disturbance: f64,
    a: PureState,
    b: PureState,
    c: PureState,
    d: PureState,
}

impl ProbeSpec {
    /// Builds a probe specification from the disturbance and the four
    /// probe states (faithful-|0⟩, flipped-|0⟩, faithful-|1⟩, flipped-|1⟩).
    pub fn new(
        disturbance: f64,
        a: PureState,
        b: PureState,
        c: PureState,
        d: PureState,
    ) -> Result<Self> {
        if !disturbance.is_finite() || !(0.0..=0.5).contains(&disturbance) {
            return Err(Error::OutOfRange {
                name: "disturbance",
                value: disturbance,
                min: 0.0,
                max: 0.5,
            });
        }
        let dim = a.dim();
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        for s in [&b, &c, &d] {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
        }
        Ok(Self {
            disturbance,
            a,
            b,
            c,
            d,
        })
    }

    /// The disturbance D the attack causes.
    pub fn disturbance(&self) -> f64 {
        self.disturbance
    }

    /// The fidelity F = 1 − D of the forwarded qubit.
    pub fn fidelity(&self) -> f64 {
        1.0 - self.disturbance
    }

    /// Dimension of the probe Hilbert space (2 or 4).
    pub fn probe_dim(&self) -> usize {
        self.a.dim()
    }

    /// Probe state attached to the faithful branch of input |0⟩.
    pub fn faithful_zero(&self) -> &PureState {
        &self.a
    }

    /// Probe state attached to the flipped branch of input |0⟩.
    pub fn flipped_zero(&self) -> &PureState {
        &self.b
    }

    /// Probe state attached to the faithful branch of input |1⟩.
    pub fn faithful_one(&self) -> &PureState {
        &self.c
    }

    /// Probe state attached to the flipped branch of input |1⟩.
    pub fn flipped_one(&self) -> &PureState {
        &self.d
    }
}

/// The four constraint residuals of a probe specification, all nonnegative
/// and all zero (within tolerance) for a valid attack.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintResiduals {
    /// |⟨b|d⟩| — orthogonality of the two flipped-branch states.
    pub flipped_overlap: f64,
    /// |Re⟨c|a⟩ − (2 − 1/F)| — alignment of the faithful-branch states.
    pub faithful_alignment: f64,
    /// |⟨a|b⟩ + ⟨d|c⟩| — balance of the cross terms between branches.
    pub cross_balance: f64,
    /// |⟨a|d⟩ + ⟨b|c⟩| — orthogonality of the two isometry columns.
    pub column_orthogonality: f64,
}

impl ConstraintResiduals {
    /// The largest of the four residuals.
    pub fn max(&self) -> f64 {
        self.flipped_overlap
            .max(self.faithful_alignment)
            .max(self.cross_balance)
            .max(self.column_orthogonality)
    }

    /// Whether all residuals are below the given tolerance.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

/// Evaluates the four attack constraints on a probe specification.
pub fn check_constraints(p: &ProbeSpec) -> ConstraintResiduals {
    let inner = |x: &PureState, y: &PureState| x.inner(y).expect("equal dims by construction");
    let f = p.fidelity();
    ConstraintResiduals {
        flipped_overlap: inner(&p.b, &p.d).norm(),
        faithful_alignment: (inner(&p.c, &p.a).re - (2.0 - 1.0 / f)).abs(),
        cross_balance: (inner(&p.a, &p.b) + inner(&p.d, &p.c)).norm(),
        column_orthogonality: (inner(&p.a, &p.d) + inner(&p.b, &p.c)).norm(),
    }
}

/// Mixing angle θ = ½·arcsin[(1−2d)/(1−d)] of the optimal constructions,
/// taken on the principal branch θ ∈ [0, π/4].
fn mixing_angle(d: f64) -> f64 {
    0.5 * ((1.0 - 2.0 * d) / (1.0 - d)).asin()
}

fn check_disturbance(d: f64) -> Result<()> {
    if !d.is_finite() || !(0.0..=0.5).contains(&d) {
        return Err(Error::OutOfRange {
            name: "d",
            value: d,
            min: 0.0,
            max: 0.5,
        });
    }
    Ok(())
}

/// Builds the information-maximizing probe attack at disturbance `d` on a
/// four-dimensional (two-qubit) probe.
///
/// The flipped-branch states are the computational states |00⟩ and |11⟩;
/// the faithful-branch states mix |10⟩ and |01⟩ with angle θ:
///
/// ```text
/// a = cosθ|10⟩ + sinθ|01⟩,   c = sinθ|10⟩ + cosθ|01⟩.
/// ```
///
/// All four constraints hold exactly, and reading the probe out in its
/// computational basis attains the two-bit information curve.
pub fn build_optimal_probe(d: f64) -> Result<ProbeSpec> {
    check_disturbance(d)?;
    let theta = mixing_angle(d);
    let c0 = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let a = PureState::new(vec![c0, re(theta.sin()), re(theta.cos()), c0])?;
    let c = PureState::new(vec![c0, re(theta.cos()), re(theta.sin()), c0])?;
    let b = PureState::basis_state(4, 0)?;
    let dd = PureState::basis_state(4, 3)?;
    ProbeSpec::new(d, a, b, c, dd)
}

/// Builds the best probe attack at disturbance `d` restricted to a single
/// probe qubit:
///
/// ```text
/// a = cosθ|0⟩ − sinθ|1⟩,   c = sinθ|0⟩ − cosθ|1⟩,   b = |0⟩,   d = |1⟩.
/// ```
///
/// Of the two real solution branches of the constraints, this is the one
/// with the larger readout information (the other has θ ↦ π/2 − θ and is
/// strictly worse except at d = 1/2 where they coincide).  Reading the
/// probe qubit out in its computational basis is the best binary
/// measurement and attains the one-bit information curve.
pub fn build_one_bit_probe(d: f64) -> Result<ProbeSpec> {
    check_disturbance(d)?;
    let theta = mixing_angle(d);
    let re = |x: f64| Complex64::new(x, 0.0);
    let a = PureState::new(vec![re(theta.cos()), re(-theta.sin())])?;
    let c = PureState::new(vec![re(theta.sin()), re(-theta.cos())])?;
    let b = PureState::basis_state(2, 0)?;
    let dd = PureState::basis_state(2, 1)?;
    ProbeSpec::new(d, a, b, c, dd)
}

/// The isometry a valid probe attack applies to the transmitted qubit,
/// mapping its 2-dimensional space into (qubit ⊗ probe), qubit-major.
#[derive(Debug, Clone)]
pub struct AttackIsometry {
    v: DMatrix<Complex64>,
    probe_dim: usize,
}

impl AttackIsometry {
    /// The (2·probe_dim) × 2 matrix of the isometry.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.v
    }

    /// Dimension of the probe factor.
    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    /// Dimension of the output space, 2·probe_dim.
    pub fn output_dim(&self) -> usize {
        2 * self.probe_dim
    }

    /// Applies the isometry to a qubit state, returning the joint
    /// (qubit ⊗ probe) state.  Preserves the norm exactly.
    pub fn apply(&self, input: &PureState) -> Result<PureState> {
        if input.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: input.dim(),
                right: 2,
            });
        }
        let out = &self.v * input.amplitudes();
        PureState::from_vector(out)
    }
}

/// Converts a probe specification into the isometry it defines.
///
/// Fails with [`Error::ConstraintViolation`] unless all four constraint
/// residuals are below [`CONSTRAINT_TOL`]: an invalid specification does
/// not describe a disturbance-D unitary interaction.
pub fn to_isometry(p: &ProbeSpec) -> Result<AttackIsometry> {
    let residuals = check_constraints(p);
    if !residuals.is_valid(CONSTRAINT_TOL) {
        return Err(Error::ConstraintViolation(residuals.max()));
    }
    let pd = p.probe_dim();
    let sqrt_f = p.fidelity().sqrt();
    let sqrt_df = p.disturbance().sqrt();
    let mut v = DMatrix::from_element(2 * pd, 2, Complex64::new(0.0, 0.0));
    for e in 0..pd {
        // Qubit-major rows: rows [0, pd) carry qubit |0⟩, rows [pd, 2·pd)
        // carry qubit |1⟩.
        v[(e, 0)] = sqrt_f * p.a.amplitude(e);
        v[(pd + e, 0)] = sqrt_df * p.b.amplitude(e);
        v[(pd + e, 1)] = sqrt_f * p.c.amplitude(e);
        v[(e, 1)] = sqrt_df * p.d.amplitude(e);
    }
    Ok(AttackIsometry { v, probe_dim: pd })
}

/// One branch of the attacked transmission: the probability of a given
/// receiver outcome and the eavesdropper's collapsed probe state.
///
/// `eve_state` is `None` when the branch has probability (numerically)
/// zero, in which case there is no conditional state to speak of.
#[derive(Debug, Clone)]
pub struct ConditionalBranch {
    /// Probability of this receiver outcome given the sender's bit.
    pub probability: f64,
    /// The eavesdropper's normalized probe state on this branch.
    pub eve_state: Option<PureState>,
}

/// The eavesdropper's conditional probe states when the sender transmits
/// in `basis` and the receiver measures in the same basis.
///
/// Returns `branches[bit][outcome]`: for the sender's key bit `bit`, the
/// probability that the receiver sees `outcome` and the probe state left
/// behind in that case.  For a valid attack the outcome matching `bit`
/// has probability F and the flipped outcome probability 1 − F, in every
/// basis.
pub fn eve_conditional_states(
    p: &ProbeSpec,
    basis: Basis,
) -> Result<[[ConditionalBranch; 2]; 2]> {
    let iso = to_isometry(p)?;
    let pd = p.probe_dim();
    let states = basis.states();

    let mut rows: Vec<[ConditionalBranch; 2]> = Vec::with_capacity(2);
    for input in &states {
        let joint = iso.matrix() * input.amplitudes();
        let mut branches: Vec<ConditionalBranch> = Vec::with_capacity(2);
        for outcome_state in &states {
            let mut w = DVector::from_element(pd, Complex64::new(0.0, 0.0));
            for qb in 0..2 {
                let coeff = outcome_state.amplitude(qb).conj();
                for e in 0..pd {
                    w[e] += coeff * joint[qb * pd + e];
                }
            }
            let probability = w.norm_squared();
            let eve_state = if probability < 1e-14 {
                None
            } else {
                Some(PureState::from_vector(w)?)
            };
            branches.push(ConditionalBranch {
                probability,
                eve_state,
            });
        }
        let pair: [ConditionalBranch; 2] = branches
            .try_into()
            .expect("exactly two receiver outcomes");
        rows.push(pair);
    }
    Ok(rows.try_into().expect("exactly two sender bits"))
}

/// The eavesdropper's probe states conditioned on the sender's bit alone
/// (mixed over the receiver's outcome), for transmissions in `basis`.
pub fn eve_marginal_states(p: &ProbeSpec, basis: Basis) -> Result<[DensityMatrix; 2]> {
    let branches = eve_conditional_states(p, basis)?;
    let pd = p.probe_dim();
    let mut out: Vec<DensityMatrix> = Vec::with_capacity(2);
    for row in &branches {
        let mut sigma = DMatrix::from_element(pd, pd, Complex64::new(0.0, 0.0));
        for branch in row {
            if let Some(state) = &branch.eve_state {
                let v = state.amplitudes();
                for i in 0..pd {
                    for j in 0..pd {
                        sigma[(i, j)] += Complex64::new(branch.probability, 0.0)
                            * v[i]
                            * v[j].conj();
                    }
                }
            }
        }
        out.push(DensityMatrix::from_trusted(sigma));
    }
    Ok(out.try_into().expect("exactly two sender bits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{i_ae_one_bit, i_ae_two_bit, mutual_information, JointDistribution};
    use crate::quantum::{fidelity_pure, partial_trace, BlochVector};
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol,
            "expected {a} ≈ {b} (tol {tol}, diff {})",
            (a - b).abs()
        );
    }

    const D_GRID: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.35, 0.5];

    #[test]
    fn optimal_probe_satisfies_all_constraints() {
        for d in D_GRID {
            let p = build_optimal_probe(d).unwrap();
            let r = check_constraints(&p);
            assert!(
                r.max() < 1e-12,
                "residual {} at d = {d}",
                r.max()
            );
        }
    }

    #[test]
    fn one_bit_probe_satisfies_all_constraints() {
        for d in D_GRID {
            let p = build_one_bit_probe(d).unwrap();
            let r = check_constraints(&p);
            assert!(r.max() < 1e-12, "residual {} at d = {d}", r.max());
        }
    }

    #[test]
    fn probe_builders_reject_out_of_range_disturbance() {
        assert!(build_optimal_probe(-0.01).is_err());
        assert!(build_optimal_probe(0.51).is_err());
        assert!(build_one_bit_probe(f64::NAN).is_err());
    }

    #[test]
    fn degenerate_probe_has_unit_flipped_overlap() {
        // Putting both flipped-branch states on |00⟩ maximally violates
        // their orthogonality: the first residual is exactly 1.
        let e0 = PureState::basis_state(4, 0).unwrap();
        let e1 = PureState::basis_state(4, 1).unwrap();
        let e2 = PureState::basis_state(4, 2).unwrap();
        let p = ProbeSpec::new(0.1, e2.clone(), e0.clone(), e1, e0).unwrap();
        let r = check_constraints(&p);
        assert_close(r.flipped_overlap, 1.0, 1e-12);
        assert!(matches!(
            to_isometry(&p),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn probe_spec_validates_shapes() {
        let q = PureState::basis_state(2, 0).unwrap();
        let f = PureState::basis_state(4, 0).unwrap();
        assert!(ProbeSpec::new(0.1, q.clone(), q.clone(), q.clone(), f.clone()).is_err());
        assert!(ProbeSpec::new(0.6, q.clone(), q.clone(), q.clone(), q.clone()).is_err());
        let e = PureState::basis_state(8, 0).unwrap();
        assert!(ProbeSpec::new(0.1, e.clone(), e.clone(), e.clone(), e).is_err());
    }

    #[test]
    fn isometry_columns_are_orthonormal() {
        for d in [0.05, 0.15, 0.3, 0.45] {
            for p in [build_optimal_probe(d).unwrap(), build_one_bit_probe(d).unwrap()] {
                let v = to_isometry(&p).unwrap().v;
                let gram = v.adjoint() * &v;
                for i in 0..2 {
                    for j in 0..2 {
                        let target = if i == j { 1.0 } else { 0.0 };
                        assert_close(gram[(i, j)].re, target, 1e-12);
                        assert_close(gram[(i, j)].im, 0.0, 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn all_six_states_are_equally_disturbed() {
        // The constraints exist precisely to make the disturbance the
        // same in all three bases; check the forwarded fidelity is F for
        // every signal state.
        for d in [0.05, 0.1, 0.25, 0.4] {
            for p in [build_optimal_probe(d).unwrap(), build_one_bit_probe(d).unwrap()] {
                let iso = to_isometry(&p).unwrap();
                for (_, _, psi) in crate::quantum::six_states() {
                    let joint = iso.apply(&psi).unwrap();
                    let bob = partial_trace(&joint.density(), 0, (2, p.probe_dim())).unwrap();
                    assert_close(fidelity_pure(&psi, &bob).unwrap(), 1.0 - d, 1e-12);
                }
            }
        }
    }

    #[test]
    fn conditional_probabilities_follow_the_disturbance_in_every_basis() {
        for d in [0.05, 0.2, 0.4] {
            for p in [build_optimal_probe(d).unwrap(), build_one_bit_probe(d).unwrap()] {
                for basis in Basis::ALL {
                    let branches = eve_conditional_states(&p, basis).unwrap();
                    for bit in 0..2 {
                        assert_close(branches[bit][bit].probability, 1.0 - d, 1e-12);
                        assert_close(branches[bit][1 - bit].probability, d, 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn computational_branches_reproduce_the_probe_states() {
        // In the computational basis the conditional probe states are the
        // defining states a, b, c, d themselves (up to global phase).
        let d = 0.15;
        let p = build_optimal_probe(d).unwrap();
        let branches = eve_conditional_states(&p, Basis::Z).unwrap();
        let expect = [
            [p.faithful_zero(), p.flipped_zero()],
            [p.flipped_one(), p.faithful_one()],
        ];
        for bit in 0..2 {
            for outcome in 0..2 {
                let got = branches[bit][outcome].eve_state.as_ref().unwrap();
                let overlap = got.inner(expect[bit][outcome]).unwrap().norm_sqr();
                assert_close(overlap, 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn zero_probability_branches_carry_no_state() {
        let p = build_optimal_probe(0.0).unwrap();
        let branches = eve_conditional_states(&p, Basis::Z).unwrap();
        for bit in 0..2 {
            assert_close(branches[bit][1 - bit].probability, 0.0, 1e-14);
            assert!(branches[bit][1 - bit].eve_state.is_none());
        }
    }

    #[test]
    fn computational_readout_attains_the_two_bit_curve() {
        // Cross-check against the closed-form curve: reading the
        // four-dimensional probe in its computational basis yields exactly
        // the two-bit information, for a uniform key bit.
        for d in [0.01, 0.05, 0.1, 0.156, 0.25, 0.4, 0.49] {
            let p = build_optimal_probe(d).unwrap();
            let sigmas = eve_marginal_states(&p, Basis::Z).unwrap();
            let rows: Vec<Vec<f64>> = sigmas
                .iter()
                .map(|s| (0..4).map(|e| s.entry(e, e).re / 2.0).collect())
                .collect();
            let j = JointDistribution::new(rows).unwrap();
            assert_close(mutual_information(&j), i_ae_two_bit(d).unwrap(), 1e-12);
        }
    }

    #[test]
    fn computational_readout_attains_the_one_bit_curve() {
        for d in [0.01, 0.05, 0.1, 0.156, 0.25, 0.4, 0.49] {
            let p = build_one_bit_probe(d).unwrap();
            let sigmas = eve_marginal_states(&p, Basis::Z).unwrap();
            let rows: Vec<Vec<f64>> = sigmas
                .iter()
                .map(|s| (0..2).map(|e| s.entry(e, e).re / 2.0).collect())
                .collect();
            let j = JointDistribution::new(rows).unwrap();
            assert_close(mutual_information(&j), i_ae_one_bit(d).unwrap(), 1e-12);
        }
    }

    #[test]
    fn one_bit_branch_choice_beats_the_alternative() {
        // The constraints admit a second real solution with θ ↦ π/2 − θ;
        // the constructor must pick the more informative branch.
        for d in [0.05, 0.15, 0.3] {
            let best = build_one_bit_probe(d).unwrap();
            let theta = mixing_angle(d);
            let alt_theta = std::f64::consts::FRAC_PI_2 - theta;
            let re = |x: f64| Complex64::new(x, 0.0);
            let alt = ProbeSpec::new(
                d,
                PureState::new(vec![re(alt_theta.cos()), re(-alt_theta.sin())]).unwrap(),
                PureState::basis_state(2, 0).unwrap(),
                PureState::new(vec![re(alt_theta.sin()), re(-alt_theta.cos())]).unwrap(),
                PureState::basis_state(2, 1).unwrap(),
            )
            .unwrap();
            assert!(check_constraints(&alt).max() < 1e-12);

            let info_of = |p: &ProbeSpec| {
                let sigmas = eve_marginal_states(p, Basis::Z).unwrap();
                let rows: Vec<Vec<f64>> = sigmas
                    .iter()
                    .map(|s| (0..2).map(|e| s.entry(e, e).re / 2.0).collect())
                    .collect();
                mutual_information(&JointDistribution::new(rows).unwrap())
            };
            assert!(info_of(&best) > info_of(&alt) + 1e-6);
        }
    }

    #[test]
    fn one_bit_probe_is_anisotropic_off_the_signal_axes() {
        // The single-qubit probe equalizes the disturbance on the six
        // signal states but not on arbitrary Bloch directions: its
        // induced qubit channel has a shear component coupling x to z.
        // A direction halfway between x̂ and ẑ is disturbed strictly
        // less than the signal states are.
        let d = 0.1;
        let p = build_one_bit_probe(d).unwrap();
        let iso = to_isometry(&p).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = BlochVector::new(s, 0.0, s).state().unwrap();
        let joint = iso.apply(&psi).unwrap();
        let bob = partial_trace(&joint.density(), 0, (2, 2)).unwrap();
        let f = fidelity_pure(&psi, &bob).unwrap();
        assert!(
            (f - (1.0 - d)).abs() > 0.02,
            "expected anisotropy at tilted direction, got fidelity {f}"
        );
    }

    fn arb_direction() -> impl Strategy<Value = BlochVector> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_filter_map(
            "direction too short",
            |(x, y, z)| {
                let n = (x * x + y * y + z * z).sqrt();
                if n > 0.3 {
                    Some(BlochVector::new(x / n, y / n, z / n))
                } else {
                    None
                }
            },
        )
    }

    proptest! {
        #[test]
        fn prop_two_bit_disturbance_is_universal_over_the_bloch_sphere(
            dir in arb_direction(),
            d in 0.001f64..0.499,
        ) {
            // The four-dimensional optimal probe shrinks every Bloch
            // vector uniformly, so the forwarded fidelity is F for
            // arbitrary input directions, not just the six signal states.
            // (The one-bit probe does not share this isotropy; see
            // `one_bit_probe_is_anisotropic_off_the_signal_axes`.)
            let p = build_optimal_probe(d).unwrap();
            let iso = to_isometry(&p).unwrap();
            let psi = dir.state().unwrap();
            let joint = iso.apply(&psi).unwrap();
            let bob = partial_trace(&joint.density(), 0, (2, p.probe_dim())).unwrap();
            let f = fidelity_pure(&psi, &bob).unwrap();
            prop_assert!((f - (1.0 - d)).abs() < 1e-10);
        }

        #[test]
        fn prop_isometry_preserves_norm(
            dir in arb_direction(),
            d in 0.001f64..0.499,
        ) {
            let p = build_optimal_probe(d).unwrap();
            let iso = to_isometry(&p).unwrap();
            let psi = dir.state().unwrap();
            let raw = iso.matrix() * psi.amplitudes();
            prop_assert!((raw.norm() - 1.0).abs() < 1e-12);
        }
    }
}
