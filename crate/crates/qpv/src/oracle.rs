//! Independent worst-case checks for the verification bounds.
//!
//! For a strategy with gap `nu`, the largest per-round pass probability of
//! any state at fidelity `1 - eps` to the target is `1 - eps*nu`. This module
//! computes that figure three independent ways — the closed form, an exact
//! eigensolve over the orthogonal complement of the target, and seeded random
//! search (optionally restricted to trace-preserving processes) — so the
//! analytic claims in the test suite never rest on a single code path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::strategy::AapvStrategy;
use crate::tensor::{self, Matrix, Operator, PureState, Vector, C64};

/// Worst-case figures for one strategy at one infidelity, from every
/// evaluation route that ran.
#[derive(Debug, Clone)]
pub struct WorstCaseReport {
    pub epsilon: f64,
    /// Closed form `1 - eps * gap`.
    pub analytic: f64,
    /// Exact maximum via the complement eigensolve.
    pub subspace_max: f64,
    /// Best value found by unconstrained random search, when run.
    pub random_search_max: Option<f64>,
    /// Best value found among trace-preserving processes, when run.
    pub tp_search_max: Option<f64>,
    /// A state attaining `subspace_max` at fidelity exactly `1 - eps`.
    pub maximizer: Operator,
    /// True when the pass-probability-1 eigenspace is not one-dimensional,
    /// in which case the maximizer is one valid choice among many.
    pub degenerate_target: bool,
}

impl WorstCaseReport {
    /// The ordering every route must respect: sampled values never exceed the
    /// exact subspace maximum, which never exceeds the closed form.
    pub fn validate(&self) -> Result<()> {
        let slack = 1e-9;
        if self.subspace_max > self.analytic + slack {
            return Err(Error::invalid(
                "worst-case report",
                format!("subspace maximum {} exceeds the closed form {}", self.subspace_max, self.analytic),
            ));
        }
        for (name, v) in [("random search", self.random_search_max), ("constrained search", self.tp_search_max)] {
            if let Some(v) = v {
                if v > self.subspace_max + slack {
                    return Err(Error::invalid(
                        "worst-case report",
                        format!("{name} value {v} exceeds the subspace maximum {}", self.subspace_max),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid("worst case", format!("infidelity {epsilon} outside [0, 1)")));
    }
    Ok(())
}

/// Closed form `1 - eps * gap`.
pub fn analytic_worst_case(s: &AapvStrategy, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(1.0 - epsilon * s.spectral_gap()?)
}

/// Exact maximum of the pass probability over states at fidelity `1 - eps`:
/// the optimum has the form `(1-eps)|phi><phi| + eps|w><w|` with `w` the top
/// eigenvector of the strategy operator compressed to the complement of the
/// target.
pub fn subspace_worst_case(s: &AapvStrategy, epsilon: f64) -> Result<WorstCaseReport> {
    check_epsilon(epsilon)?;
    let omega = s.strategy_matrix()?;
    let spectrum = tensor::eig_hermitian(omega, false)?;
    let degenerate_target = spectrum.eigenvalues.len() > 1 && spectrum.eigenvalues[1] > 1.0 - 1e-10;

    let phi = s.target().amplitudes();
    let d = phi.len();
    let p_phi = phi * phi.adjoint();
    let q = Matrix::identity(d, d) - &p_phi;
    let compressed = Operator::new(&q * omega.matrix() * &q, s.target().dims().to_vec())?;
    let comp_spec = tensor::eig_hermitian(&compressed, true)?;
    let lambda = comp_spec.largest();
    // Re-project the eigenvector so the maximizer sits at fidelity 1 - eps
    // exactly even after rounding. If the eigenvector happens to lie along
    // the target (possible when the compression is the zero matrix), fall
    // back to the best-projecting basis vector.
    let mut w_raw = &q * comp_spec.eigenvector(0).unwrap();
    if w_raw.norm() < 1e-6 {
        w_raw = (0..d)
            .map(|i| {
                let mut e = Vector::zeros(d);
                e[i] = C64::new(1.0, 0.0);
                &q * e
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
    }
    let w = &w_raw / C64::new(w_raw.norm(), 0.0);
    let rho = &p_phi * C64::new(1.0 - epsilon, 0.0) + (&w * w.adjoint()) * C64::new(epsilon, 0.0);
    let maximizer = Operator::new(rho, s.target().dims().to_vec())?;

    Ok(WorstCaseReport {
        epsilon,
        analytic: analytic_worst_case(s, epsilon)?,
        subspace_max: (1.0 - epsilon) + epsilon * lambda,
        random_search_max: None,
        tp_search_max: None,
        maximizer,
        degenerate_target,
    })
}

/// Draws a Haar-random unit vector in the orthogonal complement of the
/// target.
fn random_complement_vector(q: &Matrix, d: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let mut g = Vector::zeros(d);
        for i in 0..d {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            g[i] = C64::new(re, im);
        }
        let projected = q * g;
        let norm = projected.norm();
        if norm > 1e-8 {
            return projected / C64::new(norm, 0.0);
        }
    }
}

/// Stochastic lower bound on the subspace maximum; `start` lets a caller
/// seed the search with a known candidate direction in the complement.
pub fn random_search_with_start(
    s: &AapvStrategy,
    epsilon: f64,
    trials: u64,
    rng_seed: u64,
    start: Option<&PureState>,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    if trials < 1 {
        return Err(Error::invalid("random search", "at least one trial is required"));
    }
    let omega = s.strategy_matrix()?;
    let phi = s.target().amplitudes();
    let d = phi.len();
    let q = Matrix::identity(d, d) - phi * phi.adjoint();
    // Complement-compressed strategy operator. Samples are polished with a
    // few power iterations of this PSD matrix: matvec-only work, so the route
    // stays independent of the dense eigensolver it cross-checks. The
    // Rayleigh quotient of a PSD matrix never decreases under power
    // iteration, so polishing can only tighten the lower bound.
    let compressed = &q * omega.matrix() * &q;
    let value_of = |w: &Vector| -> f64 {
        let quad = (w.adjoint() * omega.matrix() * w)[(0, 0)].re;
        (1.0 - epsilon) + epsilon * quad
    };
    let polish = |mut w: Vector| -> Vector {
        for _ in 0..40 {
            let next = &compressed * &w;
            let norm = next.norm();
            if norm < 1e-14 {
                break;
            }
            w = next / C64::new(norm, 0.0);
        }
        w
    };
    let mut best = f64::NEG_INFINITY;
    if let Some(state) = start {
        if state.amplitudes().len() != d {
            return Err(Error::mismatch("start vector dimension does not match the strategy"));
        }
        let projected = &q * state.amplitudes();
        let norm = projected.norm();
        if norm > 1e-8 {
            best = value_of(&polish(projected / C64::new(norm, 0.0)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for trial in 0..trials {
        rng.set_stream(trial);
        let w = polish(random_complement_vector(&q, d, &mut rng));
        best = best.max(value_of(&w));
    }
    Ok(best)
}

/// Stochastic lower bound on the subspace maximum from Haar samples alone.
pub fn random_search_worst_case(s: &AapvStrategy, epsilon: f64, trials: u64, rng_seed: u64) -> Result<f64> {
    random_search_with_start(s, epsilon, trials, rng_seed, None)
}

/// Inverse square root of a strictly positive Hermitian matrix.
fn inv_sqrt_psd(op: &Operator) -> Result<Option<Matrix>> {
    let spec = tensor::eig_hermitian(op, true)?;
    let d = op.dim();
    if spec.eigenvalues.iter().any(|&l| l < 1e-8) {
        return Ok(None);
    }
    let vs = spec.eigenvectors.as_ref().unwrap();
    let mut m = Matrix::zeros(d, d);
    for k in 0..d {
        let col = vs.column(k);
        m += (col * col.adjoint()) * C64::new(1.0 / spec.eigenvalues[k].sqrt(), 0.0);
    }
    Ok(Some(m))
}

/// Random search restricted to Choi states of trace-preserving processes:
/// random Kraus sets are mixed with the exact target until the mixture sits
/// at fidelity `1 - eps`. The uniform (fully depolarized) direction is always
/// included as a deterministic candidate.
pub fn tp_constrained_search(s: &AapvStrategy, epsilon: f64, trials: u64, rng_seed: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if trials < 1 {
        return Err(Error::invalid("constrained search", "at least one trial is required"));
    }
    let omega = s.strategy_matrix()?;
    let phi = s.target().amplitudes();
    let d2 = phi.len();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::invalid("constrained search", "target is not a doubled-space state"));
    }
    let overlap = |rho: &Matrix| (phi.adjoint() * rho * phi)[(0, 0)].re;
    let value = |rho: &Matrix| (0..d2).map(|i| (omega.matrix().row(i) * rho.column(i))[(0, 0)].re).sum::<f64>();

    // value at fidelity 1 - eps along the segment from the target to rho_r
    let mut best = f64::NEG_INFINITY;
    let mut consider = |rho_r: &Matrix| {
        let f_r = overlap(rho_r);
        if f_r >= 1.0 - epsilon - 1e-15 {
            return;
        }
        let t = epsilon / (1.0 - f_r);
        best = best.max((1.0 - t) + t * value(rho_r));
    };

    let uniform = Matrix::identity(d2, d2) * C64::new(1.0 / d2 as f64, 0.0);
    consider(&uniform);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for trial in 0..trials {
        rng.set_stream(trial);
        let mut kraus = Vec::with_capacity(4);
        let mut gram = Matrix::zeros(d, d);
        for _ in 0..4 {
            let mut k = Matrix::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    k[(r, c)] = C64::new(re, im);
                }
            }
            gram += k.adjoint() * &k;
            kraus.push(k);
        }
        let gram_op = Operator::new(gram, vec![d])?;
        let Some(fix) = inv_sqrt_psd(&gram_op)? else { continue };
        let normalized: Vec<Matrix> = kraus.into_iter().map(|k| k * &fix).collect();
        let process = crate::channel::QuantumProcess::kraus(normalized, vec![d], vec![d])?;
        let rho_r = process.choi_state()?;
        consider(rho_r.matrix());
    }
    Ok(best)
}

/// Runs every route and assembles one report.
pub fn full_report(s: &AapvStrategy, epsilon: f64, trials: u64, rng_seed: u64) -> Result<WorstCaseReport> {
    let mut report = subspace_worst_case(s, epsilon)?;
    report.random_search_max = Some(random_search_worst_case(s, epsilon, trials, rng_seed)?);
    report.tp_search_max = Some(tp_constrained_search(s, epsilon, trials, rng_seed.wrapping_add(1))?);
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::protocols::canned;
    use crate::strategy::Test;

    const EPS_GRID: [f64; 4] = [0.01, 0.05, 0.1, 0.2];

    #[test]
    fn analytic_values() {
        let s = canned("cnot").unwrap();
        assert!((analytic_worst_case(&s, 0.1).unwrap() - 0.975).abs() < 1e-12);
        assert!((analytic_worst_case(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(analytic_worst_case(&s, 1.0).is_err());
        assert!(analytic_worst_case(&s, -0.1).is_err());
    }

    #[test]
    fn rank_one_strategy_has_unit_gap() {
        let z = Test::pauli(PauliString::parse("Z").unwrap()).unwrap();
        let target = PureState::new(Vector::from_row_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]), vec![2]).unwrap();
        let s = AapvStrategy::new(vec![(1.0, z)], target, 1, 0).unwrap();
        assert!((s.spectral_gap().unwrap() - 1.0).abs() < 1e-12);
        assert!((analytic_worst_case(&s, 0.2).unwrap() - 0.8).abs() < 1e-12);
        let report = subspace_worst_case(&s, 0.2).unwrap();
        assert!((report.subspace_max - 0.8).abs() < 1e-12);
        assert!(!report.degenerate_target);
    }

    #[test]
    fn subspace_equals_analytic_for_builtins() {
        for name in ["cnot", "identity3", "hadamard", "dj_balanced_x2"] {
            let s = canned(name).unwrap();
            for eps in EPS_GRID {
                let report = subspace_worst_case(&s, eps).unwrap();
                assert!(
                    (report.subspace_max - report.analytic).abs() < 1e-9,
                    "{name} at eps {eps}: {} vs {}",
                    report.subspace_max,
                    report.analytic
                );
                report.validate().unwrap();
            }
        }
    }

    #[test]
    fn maximizer_is_a_density_matrix_at_exact_fidelity() {
        let s = canned("cnot").unwrap();
        let report = subspace_worst_case(&s, 0.1).unwrap();
        tensor::check_density(&report.maximizer).unwrap();
        let fidelity = tensor::state_fidelity(&report.maximizer, s.target()).unwrap();
        assert!((fidelity - 0.9).abs() < 1e-10);
        let attained = s.pass_probability(&report.maximizer).unwrap();
        assert!((attained - report.subspace_max).abs() < 1e-10);
    }

    #[test]
    fn random_search_stays_below_and_approaches_the_maximum() {
        let s = canned("identity2").unwrap();
        let exact = subspace_worst_case(&s, 0.1).unwrap().subspace_max;
        let sampled = random_search_worst_case(&s, 0.1, 2000, 11).unwrap();
        assert!(sampled <= exact + 1e-9);
        assert!(exact - sampled < 5e-3, "sampled {sampled} too far below {exact}");
    }

    #[test]
    fn warm_started_search_hits_the_maximum_in_one_trial() {
        let s = canned("cnot").unwrap();
        let report = subspace_worst_case(&s, 0.1).unwrap();
        // Feed the exact maximizer's off-target component back in.
        let spec = tensor::eig_hermitian(&report.maximizer, true).unwrap();
        let idx = spec
            .eigenvalues
            .iter()
            .position(|&l| (l - 0.1).abs() < 1e-9)
            .expect("eps-weight eigenvector present");
        let w = PureState::normalized(spec.eigenvector(idx).unwrap(), vec![2; 4]).unwrap();
        let hit = random_search_with_start(&s, 0.1, 1, 5, Some(&w)).unwrap();
        assert!((hit - report.subspace_max).abs() < 1e-10);
    }

    #[test]
    fn epsilon_zero_gives_one_on_every_route() {
        let s = canned("hadamard").unwrap();
        assert!((analytic_worst_case(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((subspace_worst_case(&s, 0.0).unwrap().subspace_max - 1.0).abs() < 1e-15);
        assert!((random_search_worst_case(&s, 0.0, 3, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constrained_search_respects_the_bound() {
        let s = canned("cnot").unwrap();
        for eps in EPS_GRID {
            let constrained = tp_constrained_search(&s, eps, 60, 3).unwrap();
            let analytic = analytic_worst_case(&s, eps).unwrap();
            assert!(constrained <= analytic + 1e-9, "eps {eps}: {constrained} > {analytic}");
            // The deterministic depolarized candidate keeps the bound
            // nontrivial: the search always returns a real pass probability.
            assert!(constrained > 1.0 - eps - 1e-12);
        }
    }

    #[test]
    fn constrained_max_never_exceeds_unconstrained() {
        let s = canned("identity2").unwrap();
        let unconstrained = subspace_worst_case(&s, 0.1).unwrap().subspace_max;
        let constrained = tp_constrained_search(&s, 0.1, 100, 9).unwrap();
        assert!(constrained <= unconstrained + 1e-9);
    }

    #[test]
    fn useless_test_reports_degenerate_target() {
        let ii = Test::pauli(PauliString::parse("II").unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(
            Vector::from_row_slice(&[C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)]),
            vec![2, 2],
        )
        .unwrap();
        let s = AapvStrategy::new(vec![(1.0, ii)], bell, 1, 1).unwrap();
        let report = subspace_worst_case(&s, 0.3).unwrap();
        assert!(report.degenerate_target);
        assert!((report.subspace_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_report_orders_all_routes() {
        let s = canned("identity2").unwrap();
        let report = full_report(&s, 0.1, 300, 17).unwrap();
        report.validate().unwrap();
        assert!(report.random_search_max.unwrap() <= report.subspace_max + 1e-9);
        assert!(report.tp_search_max.unwrap() <= report.subspace_max + 1e-9);
        assert!((report.subspace_max - report.analytic).abs() < 1e-9);
    }

    #[test]
    fn trial_count_must_be_positive() {
        let s = canned("identity2").unwrap();
        assert!(random_search_worst_case(&s, 0.1, 0, 1).is_err());
        assert!(tp_constrained_search(&s, 0.1, 0, 1).is_err());
    }
}
