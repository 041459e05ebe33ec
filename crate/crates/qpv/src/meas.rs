//! Verification of quantum measurements against a projective target.
//!
//! The figure of merit is the average diagonal overlap
//! `F = (1/d) sum_i <i|M_i|i>` between a measured POVM and the rank-one
//! projective measurement it should implement. The protocol prepares each
//! basis state uniformly at random and passes a round exactly when the
//! declared outcome occurs, so the worst per-round pass probability over all
//! models at fidelity `1 - eps` is `1 - eps` — achieved by the uniform
//! damping model constructed here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::QuantumProcess;
use crate::error::{Error, Result};
use crate::simulate::RunResult;
use crate::strategy::plan_samples;
use crate::tensor::{self, Matrix, Operator, PureState, C64};

const TOL_POVM: f64 = 1e-10;
const TOL_ORTHO: f64 = 1e-12;

/// A `d`-outcome measurement: positive effects summing to the identity.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    effects: Vec<Operator>,
}

impl MeasurementModel {
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::invalid("measurement model", "no effects"));
        }
        let dims = effects[0].dims().to_vec();
        let d: usize = dims.iter().product();
        if effects.len() != d {
            return Err(Error::invalid(
                "measurement model",
                format!("{} effects for dimension {d}; outcome count must match the dimension", effects.len()),
            ));
        }
        let mut sum = Matrix::zeros(d, d);
        for e in &effects {
            if e.dims() != dims.as_slice() {
                return Err(Error::mismatch("effects live on different spaces"));
            }
            let spec = tensor::eig_hermitian(e, false)?;
            if spec.eigenvalues.iter().any(|&l| l < -TOL_POVM) {
                return Err(Error::invalid("measurement model", "effect is not positive semidefinite"));
            }
            sum += e.matrix();
        }
        let defect = (&sum - Matrix::identity(d, d)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if defect > TOL_POVM {
            return Err(Error::invalid(
                "measurement model",
                format!("effects sum to identity only within {defect:.2e}"),
            ));
        }
        Ok(MeasurementModel { effects })
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn d(&self) -> usize {
        self.effects.len()
    }

    /// The rank-one projective measurement onto `target`'s basis.
    pub fn projective(target: &ProjectiveTarget) -> Result<Self> {
        MeasurementModel::new(target.basis().iter().map(|s| s.projector()).collect())
    }

    /// Measurement outcome `i` viewed as a trace-decreasing process with the
    /// single Kraus operator `sqrt(M_i)`; verifying it goes through the
    /// postselected prepare-and-measure machinery.
    pub fn outcome_process(&self, outcome: usize) -> Result<QuantumProcess> {
        let effect = self
            .effects
            .get(outcome)
            .ok_or_else(|| Error::invalid("measurement model", format!("outcome {outcome} out of range")))?;
        let root = sqrt_psd(effect)?;
        QuantumProcess::kraus(vec![root], effect.dims().to_vec(), effect.dims().to_vec())
    }
}

fn sqrt_psd(op: &Operator) -> Result<Matrix> {
    let spec = tensor::eig_hermitian(op, true)?;
    let d = op.dim();
    let vs = spec.eigenvectors.as_ref().unwrap();
    let mut m = Matrix::zeros(d, d);
    for k in 0..d {
        let l = spec.eigenvalues[k].max(0.0);
        let col = vs.column(k);
        m += (col * col.adjoint()) * C64::new(l.sqrt(), 0.0);
    }
    Ok(m)
}

/// The orthonormal basis defining the ideal projective measurement.
#[derive(Debug, Clone)]
pub struct ProjectiveTarget {
    basis: Vec<PureState>,
}

impl ProjectiveTarget {
    pub fn new(basis: Vec<PureState>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::invalid("projective target", "empty basis"));
        }
        let dims = basis[0].dims().to_vec();
        let d: usize = dims.iter().product();
        if basis.len() != d {
            return Err(Error::invalid(
                "projective target",
                format!("{} basis states in dimension {d}", basis.len()),
            ));
        }
        for (i, a) in basis.iter().enumerate() {
            if a.dims() != dims.as_slice() {
                return Err(Error::mismatch("basis states live on different spaces"));
            }
            for b in basis.iter().skip(i + 1) {
                if a.inner(b).norm() > TOL_ORTHO {
                    return Err(Error::invalid("projective target", "basis states are not orthogonal"));
                }
            }
        }
        Ok(ProjectiveTarget { basis })
    }

    /// The computational basis on the given subsystem layout.
    pub fn computational(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        crate::cap::check_dim(d)?;
        let basis = (0..d)
            .map(|i| {
                let mut v = crate::tensor::Vector::zeros(d);
                v[i] = C64::new(1.0, 0.0);
                PureState::new(v, dims.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        ProjectiveTarget::new(basis)
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.len()
    }
}

/// Average probability that measuring the `i`-th basis state yields outcome
/// `i`.
pub fn measurement_fidelity(m: &MeasurementModel, p: &ProjectiveTarget) -> Result<f64> {
    if m.d() != p.d() {
        return Err(Error::mismatch(format!(
            "measurement has {} outcomes but the target has {}",
            m.d(),
            p.d()
        )));
    }
    let mut sum = 0.0;
    for (effect, state) in m.effects().iter().zip(p.basis()) {
        let v = state.amplitudes();
        sum += (v.adjoint() * effect.matrix() * v)[(0, 0)].re;
    }
    Ok((sum / m.d() as f64).clamp(0.0, 1.0))
}

/// Runs the verification protocol: each round prepares a uniformly random
/// basis state and passes exactly when the measurement reports its index.
pub fn verify_measurement(m: &MeasurementModel, p: &ProjectiveTarget, rounds: u64, rng_seed: u64) -> Result<RunResult> {
    if m.d() != p.d() {
        return Err(Error::mismatch("measurement and target dimensions differ"));
    }
    if rounds < 1 {
        return Err(Error::invalid("measurement verification", "at least one round is required"));
    }
    let pass_probs: Vec<f64> = m
        .effects()
        .iter()
        .zip(p.basis())
        .map(|(effect, state)| {
            let v = state.amplitudes();
            (v.adjoint() * effect.matrix() * v)[(0, 0)].re.clamp(0.0, 1.0)
        })
        .collect();
    let d = m.d() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (mut passes, mut fails) = (0u64, 0u64);
    for round in 0..rounds {
        rng.set_stream(round);
        rng.set_word_pos(0);
        let i = (rand::Rng::gen_range(&mut rng, 0..d)) as usize;
        let q = pass_probs[i];
        let pass = if q >= 1.0 - 1e-12 {
            true
        } else if q <= 1e-12 {
            false
        } else {
            rand::Rng::gen::<f64>(&mut rng) < q
        };
        if pass {
            passes += 1;
        } else {
            fails += 1;
        }
    }
    Ok(RunResult::from_counts(passes, fails, None))
}

/// Trusted-entangled-inputs variant: identical protocol, with the basis
/// states allowed to be entangled across subsystems.
pub fn verify_entangled_measurement(
    m: &MeasurementModel,
    p: &ProjectiveTarget,
    rounds: u64,
    rng_seed: u64,
) -> Result<RunResult> {
    verify_measurement(m, p, rounds, rng_seed)
}

/// Rounds needed so a measurement at fidelity `1 - eps` passes them all with
/// probability at most `delta`.
pub fn plan_measurement_samples(epsilon: f64, delta: f64) -> Result<u64> {
    Ok(plan_samples(epsilon, delta, 1.0)?.n)
}

/// The uniform damping model at infidelity `q`: outcome `i` keeps weight
/// `1 - q` on `|i><i|` and spreads `q` evenly over the other basis states.
/// Every diagonal overlap equals `1 - q` exactly, making it the worst case
/// at its fidelity.
pub fn damping_model(target: &ProjectiveTarget, q: f64) -> Result<MeasurementModel> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("damping model", format!("damping weight {q} outside [0, 1]")));
    }
    let d = target.d();
    if d < 2 {
        return Err(Error::invalid("damping model", "need at least two outcomes"));
    }
    let projectors: Vec<Operator> = target.basis().iter().map(|s| s.projector()).collect();
    let mut effects = Vec::with_capacity(d);
    for i in 0..d {
        let mut m = projectors[i].matrix() * C64::new(1.0 - q, 0.0);
        for (j, other) in projectors.iter().enumerate() {
            if j != i {
                m += other.matrix() * C64::new(q / (d - 1) as f64, 0.0);
            }
        }
        effects.push(Operator::new(m, projectors[i].dims().to_vec())?);
    }
    MeasurementModel::new(effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Vector;

    fn flip_model(q: f64) -> MeasurementModel {
        let z0 = Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        let z1 = Matrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        MeasurementModel::new(vec![
            Operator::new(&z0 * C64::new(1.0 - q, 0.0) + &z1 * C64::new(q, 0.0), vec![2]).unwrap(),
            Operator::new(&z0 * C64::new(q, 0.0) + &z1 * C64::new(1.0 - q, 0.0), vec![2]).unwrap(),
        ])
        .unwrap()
    }

    fn bell_basis() -> Vec<PureState> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mk = |a: [f64; 4]| {
            PureState::new(
                Vector::from_row_slice(&[
                    C64::new(a[0] * h, 0.0),
                    C64::new(a[1] * h, 0.0),
                    C64::new(a[2] * h, 0.0),
                    C64::new(a[3] * h, 0.0),
                ]),
                vec![2, 2],
            )
            .unwrap()
        };
        vec![mk([1.0, 0.0, 0.0, 1.0]), mk([1.0, 0.0, 0.0, -1.0]), mk([0.0, 1.0, 1.0, 0.0]), mk([0.0, 1.0, -1.0, 0.0])]
    }

    #[test]
    fn perfect_measurement_has_unit_fidelity_and_always_passes() {
        let target = ProjectiveTarget::computational(vec![2, 2]).unwrap();
        let m = MeasurementModel::projective(&target).unwrap();
        assert!((measurement_fidelity(&m, &target).unwrap() - 1.0).abs() < 1e-15);
        let r = verify_measurement(&m, &target, 2000, 4).unwrap();
        assert_eq!(r.passes, 2000);
        assert!(r.verdict);
    }

    #[test]
    fn flip_model_fidelity_and_empirical_rate() {
        let target = ProjectiveTarget::computational(vec![2]).unwrap();
        let m = flip_model(0.05);
        let f = measurement_fidelity(&m, &target).unwrap();
        assert!((f - 0.95).abs() < 1e-12);
        let n = 20_000;
        let r = verify_measurement(&m, &target, n, 8).unwrap();
        let sigma = (0.95f64 * 0.05 / n as f64).sqrt();
        assert!((r.empirical_pass_rate - 0.95).abs() < 4.0 * sigma);
    }

    #[test]
    fn uniformly_random_outcomes_have_fidelity_one_over_d() {
        let target = ProjectiveTarget::computational(vec![2, 2]).unwrap();
        let uniform = Operator::identity(vec![2, 2]).unwrap().scale(C64::new(0.25, 0.0));
        let m = MeasurementModel::new(vec![uniform.clone(), uniform.clone(), uniform.clone(), uniform]).unwrap();
        assert!((measurement_fidelity(&m, &target).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn damping_model_attains_the_worst_case_exactly() {
        let target = ProjectiveTarget::computational(vec![3]).unwrap();
        let eps = 0.2;
        let m = damping_model(&target, eps).unwrap();
        // Exact equality, not a bound: every per-round pass probability is 1 - eps.
        for (effect, state) in m.effects().iter().zip(target.basis()) {
            let v = state.amplitudes();
            let diag = (v.adjoint() * effect.matrix() * v)[(0, 0)].re;
            assert!((diag - (1.0 - eps)).abs() < 1e-12);
        }
        assert!((measurement_fidelity(&m, &target).unwrap() - (1.0 - eps)).abs() < 1e-12);
        let n = 20_000;
        let r = verify_measurement(&m, &target, n, 15).unwrap();
        let sigma = ((1.0 - eps) * eps / n as f64).sqrt();
        assert!((r.empirical_pass_rate - (1.0 - eps)).abs() < 4.0 * sigma);
    }

    #[test]
    fn fidelity_is_affine_in_the_effects() {
        let target = ProjectiveTarget::computational(vec![2]).unwrap();
        let a = flip_model(0.02);
        let b = flip_model(0.3);
        let mixed = MeasurementModel::new(
            a.effects()
                .iter()
                .zip(b.effects())
                .map(|(ea, eb)| {
                    Operator::new(ea.matrix() * C64::new(0.5, 0.0) + eb.matrix() * C64::new(0.5, 0.0), vec![2]).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let fa = measurement_fidelity(&a, &target).unwrap();
        let fb = measurement_fidelity(&b, &target).unwrap();
        let fm = measurement_fidelity(&mixed, &target).unwrap();
        assert!((fm - 0.5 * (fa + fb)).abs() < 1e-12);
    }

    #[test]
    fn sample_plans() {
        assert_eq!(plan_measurement_samples(0.01, 0.01).unwrap(), 459);
        assert_eq!(plan_measurement_samples(0.05, 0.001).unwrap(), 135);
        assert_eq!(plan_measurement_samples(0.99, 0.5).unwrap(), 1);
        assert!(plan_measurement_samples(0.0, 0.01).is_err());
    }

    #[test]
    fn validation_rejects_malformed_models() {
        let z0 = Operator::new(
            Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]),
            vec![2],
        )
        .unwrap();
        // Effects that do not close to the identity.
        assert!(MeasurementModel::new(vec![z0.clone(), z0.clone()]).is_err());
        // Wrong outcome count.
        assert!(MeasurementModel::new(vec![Operator::identity(vec![2]).unwrap()]).is_err());
        // Non-orthogonal target basis.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = PureState::new(Vector::from_row_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]), vec![2]).unwrap();
        let plus = PureState::new(Vector::from_row_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)]), vec![2]).unwrap();
        assert!(ProjectiveTarget::new(vec![zero, plus]).is_err());
    }

    #[test]
    fn entangled_basis_verification() {
        let target = ProjectiveTarget::new(bell_basis()).unwrap();
        let ideal = MeasurementModel::projective(&target).unwrap();
        let r = verify_entangled_measurement(&ideal, &target, 1500, 2).unwrap();
        assert_eq!(r.passes, 1500);
        // Mix each effect with the maximally mixed effect.
        let lambda = 0.12;
        let noisy = MeasurementModel::new(
            ideal
                .effects()
                .iter()
                .map(|e| {
                    Operator::new(
                        e.matrix() * C64::new(1.0 - lambda, 0.0)
                            + Matrix::identity(4, 4) * C64::new(lambda / 4.0, 0.0),
                        vec![2, 2],
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let f = measurement_fidelity(&noisy, &target).unwrap();
        assert!((f - (1.0 - lambda + lambda / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn outcome_processes_route_through_postselection() {
        let target = ProjectiveTarget::computational(vec![2]).unwrap();
        let m = MeasurementModel::projective(&target).unwrap();
        let p0 = m.outcome_process(0).unwrap();
        assert!(!p0.is_trace_preserving());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(Vector::from_row_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)]), vec![2]).unwrap();
        let (post, prob) = p0.apply_postselected(&plus.projector()).unwrap();
        assert!((prob - 0.5).abs() < 1e-12);
        assert!((post.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(m.outcome_process(5).is_err());
    }
}
