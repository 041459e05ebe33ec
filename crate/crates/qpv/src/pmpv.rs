//! Conversion of ancilla-assisted strategies to prepare-and-measure form.
//!
//! Every built-in test measures the ancilla qubits in fixed local bases, so a
//! strategy can be rewritten one ancilla outcome at a time: outcome `b` of
//! test `i` contributes a weighted ancilla effect `M = p_i |b><b|` paired with
//! the system effect that accepts exactly the system outcomes passing with
//! `b`. Transposing the (rank-one) ancilla effects turns the ensemble into
//! input states: prepare `M^T / Tr M` with probability `Tr M / d`, apply the
//! process, and measure the paired effect. The resulting strategy operator is
//! `Xi = sum_i p_i rho_i^T (x) N_i`, exactly `Omega / d`.

use crate::error::{Error, Result};
use crate::strategy::AapvStrategy;
use crate::tensor::{self, Matrix, Operator, C64};

const TOL_MERGE: f64 = 1e-12;
const TOL_POVM: f64 = 1e-10;

/// A strategy rewritten as "measure the ancilla first": weighted ancilla
/// effects `M_i` (summing to the identity) each paired with the system effect
/// applied when that ancilla outcome occurs.
#[derive(Debug, Clone)]
pub struct OneWayForm {
    pairs: Vec<(Operator, Operator)>,
    dims_ancilla: Vec<usize>,
    dims_system: Vec<usize>,
}

impl OneWayForm {
    /// Validates the POVM closure of the `M_i` and `0 <= N_i <= 1`.
    pub fn new(pairs: Vec<(Operator, Operator)>, dims_ancilla: Vec<usize>, dims_system: Vec<usize>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("one-way form", "no pairs"));
        }
        let d_anc: usize = dims_ancilla.iter().product();
        let mut povm_sum = Matrix::zeros(d_anc, d_anc);
        for (m, n) in &pairs {
            if m.dims() != dims_ancilla.as_slice() || n.dims() != dims_system.as_slice() {
                return Err(Error::mismatch("one-way pair dimensions disagree with the declared cut"));
            }
            effect_bounds(n, "system effect")?;
            let eigs = tensor::eig_hermitian(m, false)?;
            if eigs.eigenvalues.iter().any(|&e| e < -TOL_POVM) {
                return Err(Error::invalid("one-way form", "ancilla effect is not positive semidefinite"));
            }
            povm_sum += m.matrix();
        }
        let identity = Matrix::identity(d_anc, d_anc);
        let closure_defect = (&povm_sum - identity).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if closure_defect > TOL_POVM {
            return Err(Error::invalid(
                "one-way form",
                format!("ancilla effects sum to identity only within {closure_defect:.2e}"),
            ));
        }
        Ok(OneWayForm { pairs, dims_ancilla, dims_system })
    }

    pub fn pairs(&self) -> &[(Operator, Operator)] {
        &self.pairs
    }

    pub fn dims_ancilla(&self) -> &[usize] {
        &self.dims_ancilla
    }

    pub fn dims_system(&self) -> &[usize] {
        &self.dims_system
    }

    /// Rebuilds `sum_i M_i (x) N_i`; equals the strategy operator it came from.
    pub fn reconstruct(&self) -> Result<Operator> {
        let mut sum: Option<Operator> = None;
        for (m, n) in &self.pairs {
            let term = m.kron(n)?;
            sum = Some(match sum {
                None => term,
                Some(s) => s.add(&term)?,
            });
        }
        Ok(sum.unwrap())
    }
}

fn effect_bounds(op: &Operator, what: &'static str) -> Result<()> {
    let eigs = tensor::eig_hermitian(op, false)?;
    let min = eigs.eigenvalues.last().copied().unwrap_or(0.0);
    let max = eigs.largest();
    if min < -TOL_POVM || max > 1.0 + TOL_POVM {
        return Err(Error::invalid(what, format!("eigenvalues [{min:.3e}, {max:.3e}] leave [0, 1]")));
    }
    Ok(())
}

/// One prepared input with its pass effect.
#[derive(Debug, Clone)]
pub struct PmpvEntry {
    pub p: f64,
    pub input: Operator,
    pub effect: Operator,
}

/// Prepare-and-measure strategy: with probability `p_i` feed `input_i` to the
/// process and apply the two-outcome measurement `{effect_i, 1 - effect_i}`
/// to the output.
#[derive(Debug, Clone)]
pub struct PmpvStrategy {
    entries: Vec<PmpvEntry>,
    dims: Vec<usize>,
    d: usize,
}

impl PmpvStrategy {
    pub fn new(entries: Vec<PmpvEntry>, dims: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("prepare-and-measure strategy", "no entries"));
        }
        let d: usize = dims.iter().product();
        let mut total = 0.0;
        for e in &entries {
            if e.p.is_nan() || e.p <= 0.0 {
                return Err(Error::invalid("prepare-and-measure strategy", format!("weight {} is not positive", e.p)));
            }
            total += e.p;
            if e.input.dims() != dims.as_slice() || e.effect.dims() != dims.as_slice() {
                return Err(Error::mismatch("entry dimensions disagree with the strategy"));
            }
            tensor::check_density(&e.input)?;
            effect_bounds(&e.effect, "pass effect")?;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("prepare-and-measure strategy", format!("weights sum to {total}, not 1")));
        }
        Ok(PmpvStrategy { entries, dims, d })
    }

    pub fn entries(&self) -> &[PmpvEntry] {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The strategy operator `sum_i p_i input_i^T (x) effect_i` on the
    /// doubled space.
    pub fn xi_matrix(&self) -> Result<Operator> {
        crate::cap::check_dim(self.d * self.d)?;
        let mut sum: Option<Operator> = None;
        for e in &self.entries {
            let term = e.input.transpose().kron(&e.effect)?.scale(C64::new(e.p, 0.0));
            sum = Some(match sum {
                None => term,
                Some(s) => s.add(&term)?,
            });
        }
        Ok(sum.unwrap())
    }

    /// The average prepared input `sum_i p_i input_i`; maximally mixed for
    /// every converted strategy.
    pub fn mean_input(&self) -> Result<Operator> {
        let mut sum: Option<Operator> = None;
        for e in &self.entries {
            let term = e.input.scale(C64::new(e.p, 0.0));
            sum = Some(match sum {
                None => term,
                Some(s) => s.add(&term)?,
            });
        }
        Ok(sum.unwrap())
    }
}

/// Rewrites a strategy in measure-ancilla-first form by enumerating the
/// ancilla outcomes of each test's local settings. Outcomes with identical
/// projector and system effect are merged with summed weights.
pub fn one_way_decompose(s: &AapvStrategy) -> Result<OneWayForm> {
    let na = s.n_ancilla();
    let ns = s.n_system();
    let mut merged: Vec<(f64, Operator, Operator)> = Vec::new();
    for (p, test) in s.tests() {
        let settings = test.local_settings()?;
        if settings.len() != na + ns {
            return Err(Error::invalid("one-way decomposition", "test is not separable across the ancilla/system cut"));
        }
        let (anc_bases, sys_bases) = (&settings[..na], &settings[na..]);
        for anc_bits in 0..1u64 << na {
            // Leftmost qubit is the most significant outcome bit.
            let bit_of = |q: usize| ((anc_bits >> (na - 1 - q)) & 1) as u8;
            let mut anc_proj: Option<Operator> = None;
            for (q, basis) in anc_bases.iter().enumerate() {
                let col = basis.vectors().column(bit_of(q) as usize).into_owned();
                let proj = Operator::new(&col * col.adjoint(), vec![2])?;
                anc_proj = Some(match anc_proj {
                    None => proj,
                    Some(a) => a.kron(&proj)?,
                });
            }
            let anc_proj = anc_proj.ok_or_else(|| Error::invalid("one-way decomposition", "no ancilla qubits"))?;

            let mut sys_effect: Option<Operator> = None;
            let mut bits = vec![0u8; na + ns];
            for (q, b) in bits.iter_mut().enumerate().take(na) {
                *b = bit_of(q);
            }
            for sys_bits in 0..1u64 << ns {
                for q in 0..ns {
                    bits[na + q] = ((sys_bits >> (ns - 1 - q)) & 1) as u8;
                }
                if !test.passes(&bits)? {
                    continue;
                }
                let mut proj: Option<Operator> = None;
                for (q, basis) in sys_bases.iter().enumerate() {
                    let col = basis.vectors().column(bits[na + q] as usize).into_owned();
                    let term = Operator::new(&col * col.adjoint(), vec![2])?;
                    proj = Some(match proj {
                        None => term,
                        Some(a) => a.kron(&term)?,
                    });
                }
                let proj = proj.ok_or_else(|| Error::invalid("one-way decomposition", "no system qubits"))?;
                sys_effect = Some(match sys_effect {
                    None => proj,
                    Some(a) => a.add(&proj)?,
                });
            }
            let sys_effect = match sys_effect {
                Some(e) => e,
                // This ancilla outcome always fails: pair with the zero effect.
                None => Operator::new(Matrix::zeros(1 << ns, 1 << ns), vec![2; ns])?,
            };

            let mut found = false;
            for (w, m, n) in merged.iter_mut() {
                if m.max_diff(&anc_proj) <= TOL_MERGE && n.max_diff(&sys_effect) <= TOL_MERGE {
                    *w += p;
                    found = true;
                    break;
                }
            }
            if !found {
                merged.push((*p, anc_proj, sys_effect));
            }
        }
    }
    let pairs = merged
        .into_iter()
        .map(|(w, m, n)| (m.scale(C64::new(w, 0.0)), n))
        .collect();
    OneWayForm::new(pairs, vec![2; na], vec![2; ns])
}

/// Turns a one-way form into a prepare-and-measure ensemble: weight
/// `Tr M / d`, input `M^T / Tr M`, same pass effect. Zero-weight ancilla
/// effects are dropped.
pub fn to_pmpv(f: &OneWayForm, d: usize) -> Result<PmpvStrategy> {
    let d_anc: usize = f.dims_ancilla().iter().product();
    if d_anc != d {
        return Err(Error::mismatch(format!(
            "ancilla dimension {d_anc} does not match the requested input dimension {d}"
        )));
    }
    let mut entries = Vec::new();
    for (m, n) in f.pairs() {
        let tr = m.trace().re;
        if tr <= 1e-12 {
            continue;
        }
        entries.push(PmpvEntry {
            p: tr / d as f64,
            input: m.transpose().scale(C64::new(1.0 / tr, 0.0)),
            effect: n.clone(),
        });
    }
    PmpvStrategy::new(entries, f.dims_ancilla().to_vec())
}

/// Full conversion pipeline; checks the defining identity `Xi = Omega / d`.
pub fn convert(s: &AapvStrategy) -> Result<PmpvStrategy> {
    let form = one_way_decompose(s)?;
    let d = 1usize << s.n_ancilla();
    let x = to_pmpv(&form, d)?;
    let omega = s.strategy_matrix()?;
    let scaled = omega.scale(C64::new(1.0 / d as f64, 0.0));
    let xi = x.xi_matrix()?;
    let defect = xi.max_diff(&scaled);
    if defect > 1e-12 {
        return Err(Error::invalid(
            "conversion",
            format!("strategy operator mismatches the ancilla form by {defect:.2e}"),
        ));
    }
    Ok(x)
}

/// Per-run pass probability of a trace-preserving process, evaluated both as
/// the ensemble average `sum_i p_i Tr[E(rho_i) N_i]` and as the contraction
/// with the process's (unnormalized) Choi matrix; the two must agree.
pub fn failure_probability(x: &PmpvStrategy, e: &crate::channel::QuantumProcess) -> Result<f64> {
    if !e.is_trace_preserving() {
        return Err(Error::invalid(
            "pass probability",
            "process does not preserve trace; use the postselected variant",
        ));
    }
    let (ensemble, choi) = both_routes(x, e)?;
    if (ensemble - choi).abs() > 1e-10 {
        return Err(Error::invalid(
            "pass probability",
            format!("evaluation routes disagree: ensemble {ensemble} vs Choi {choi}"),
        ));
    }
    Ok(ensemble)
}

fn both_routes(x: &PmpvStrategy, e: &crate::channel::QuantumProcess) -> Result<(f64, f64)> {
    if e.d_in() != x.d() {
        return Err(Error::mismatch(format!(
            "process input dimension {} does not match strategy dimension {}",
            e.d_in(),
            x.d()
        )));
    }
    let mut ensemble = 0.0;
    for entry in x.entries() {
        let out = e.apply(&entry.input)?;
        ensemble += entry.p * (out.matrix() * entry.effect.matrix()).trace().re;
    }
    let choi = e.choi_matrix()?;
    let xi = x.xi_matrix()?;
    let contraction = (xi.matrix() * choi.matrix()).trace().re;
    Ok((ensemble, contraction))
}

/// Conditional pass probability of a trace-decreasing process: the pass rate
/// among rounds that produce an output at all.
pub fn postselected_failure_probability(x: &PmpvStrategy, e: &crate::channel::QuantumProcess) -> Result<f64> {
    let (ensemble, choi) = both_routes(x, e)?;
    if (ensemble - choi).abs() > 1e-10 {
        return Err(Error::invalid(
            "postselected pass probability",
            format!("evaluation routes disagree: ensemble {ensemble} vs Choi {choi}"),
        ));
    }
    let mean = x.mean_input()?;
    let output_prob = e.apply(&mean)?.trace().re;
    if output_prob <= 1e-12 {
        return Err(Error::ZeroSuccess("the process annihilates the average input".into()));
    }
    Ok(ensemble / output_prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{noise_process, NoiseSpec, QuantumProcess};
    use crate::pauli::{CliffordCircuit, Gate, PauliString};
    use crate::protocols::canned;
    use crate::strategy::Test;
    use crate::tensor::PureState;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(amps: &[C64]) -> Operator {
        PureState::new(crate::tensor::Vector::from_row_slice(amps), vec![2]).unwrap().projector()
    }

    fn plus() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[C64::new(h, 0.0), C64::new(h, 0.0)])
    }

    fn minus() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[C64::new(h, 0.0), C64::new(-h, 0.0)])
    }

    fn zero() -> Operator {
        ket(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    fn one() -> Operator {
        ket(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    fn top() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[C64::new(h, 0.0), C64::new(0.0, h)])
    }

    fn bot() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[C64::new(h, 0.0), C64::new(0.0, -h)])
    }

    #[test]
    fn single_correlation_test_decomposes_into_two_pairs() {
        let zz = Test::pauli(PauliString::parse("ZZ").unwrap()).unwrap();
        let target = PureState::new(
            crate::tensor::Vector::from_row_slice(&[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ]),
            vec![2, 2],
        )
        .unwrap();
        let s = AapvStrategy::new(vec![(1.0, zz)], target, 1, 1).unwrap();
        let form = one_way_decompose(&s).unwrap();
        assert_eq!(form.pairs().len(), 2);
        let omega = s.strategy_matrix().unwrap();
        assert!(form.reconstruct().unwrap().max_diff(omega) < 1e-12);
        for (m, n) in form.pairs() {
            // Ancilla and system effects match: outcome 0 pairs with |0><0|.
            assert!(m.max_diff(n) < 1e-12);
        }
    }

    #[test]
    fn reconstruction_matches_strategy_matrix_for_all_builtins() {
        for name in ["cnot", "identity2", "identity3", "xgate", "hadamard", "phase", "dj_const1", "dj_balanced_x2"] {
            let s = canned(name).unwrap();
            let form = one_way_decompose(&s).unwrap();
            let omega = s.strategy_matrix().unwrap();
            assert!(form.reconstruct().unwrap().max_diff(omega) < 1e-12, "reconstruction failed for {name}");
        }
    }

    #[test]
    fn conversion_identity_for_all_builtins() {
        for name in ["cnot", "identity2", "identity3", "xgate", "hadamard", "phase", "dj_const1", "dj_balanced_x2"] {
            let s = canned(name).unwrap();
            let x = convert(&s).unwrap();
            let d = x.d() as f64;
            let omega = s.strategy_matrix().unwrap();
            assert!(x.xi_matrix().unwrap().max_diff(&omega.scale(C64::new(1.0 / d, 0.0))) < 1e-12, "{name}");
            let mean = x.mean_input().unwrap();
            let mixed = Operator::identity(x.dims().to_vec()).unwrap().scale(C64::new(1.0 / d, 0.0));
            assert!(mean.max_diff(&mixed) < 1e-12, "mean input not maximally mixed for {name}");
        }
    }

    #[test]
    fn identity_ensemble_is_the_four_state_one() {
        let x = convert(&canned("identity2").unwrap()).unwrap();
        assert_eq!(x.entries().len(), 4);
        let expected = [plus(), minus(), zero(), one()];
        for want in &expected {
            let hits: Vec<_> = x
                .entries()
                .iter()
                .filter(|e| e.input.max_diff(want) < 1e-12)
                .collect();
            assert_eq!(hits.len(), 1);
            let e = hits[0];
            assert!((e.p - 0.25).abs() < 1e-12);
            // The identity passes exactly when the output matches the input.
            assert!(e.effect.max_diff(&e.input) < 1e-12);
        }
    }

    #[test]
    fn three_setting_identity_inputs_equal_effects() {
        let x = convert(&canned("identity3").unwrap()).unwrap();
        assert_eq!(x.entries().len(), 6);
        for e in x.entries() {
            assert!((e.p - 1.0 / 6.0).abs() < 1e-12);
            // Transposing the ancilla projector flips Y eigenstates, which is
            // exactly what makes input and pass effect coincide.
            assert!(e.effect.max_diff(&e.input) < 1e-12);
        }
        let has_top = x.entries().iter().any(|e| e.input.max_diff(&top()) < 1e-12);
        let has_bot = x.entries().iter().any(|e| e.input.max_diff(&bot()) < 1e-12);
        assert!(has_top && has_bot);
    }

    #[test]
    fn hadamard_ensemble_swaps_conjugate_bases() {
        let x = convert(&canned("hadamard").unwrap()).unwrap();
        assert_eq!(x.entries().len(), 4);
        let cases = [(plus(), zero()), (minus(), one()), (zero(), plus()), (one(), minus())];
        for (input, effect) in &cases {
            let hit = x
                .entries()
                .iter()
                .find(|e| e.input.max_diff(input) < 1e-12)
                .expect("expected input state missing");
            assert!((hit.p - 0.25).abs() < 1e-12);
            assert!(hit.effect.max_diff(effect) < 1e-12);
        }
    }

    #[test]
    fn phase_ensemble_contains_circular_effects() {
        let x = convert(&canned("phase").unwrap()).unwrap();
        assert_eq!(x.entries().len(), 4);
        let cases = [(plus(), top()), (minus(), bot()), (zero(), zero()), (one(), one())];
        for (input, effect) in &cases {
            let hit = x
                .entries()
                .iter()
                .find(|e| e.input.max_diff(input) < 1e-12)
                .expect("expected input state missing");
            assert!(hit.effect.max_diff(effect) < 1e-12);
        }
    }

    #[test]
    fn converted_inputs_are_products_of_pure_qubit_states() {
        for name in ["cnot", "dj_const1"] {
            let x = convert(&canned(name).unwrap()).unwrap();
            for e in x.entries() {
                let n = x.dims().len();
                // Purity of every single-qubit marginal certifies a pure
                // product state.
                for q in 0..n {
                    let marginal = e.input.partial_trace(&[q]).unwrap();
                    let purity = (marginal.matrix() * marginal.matrix()).trace().re;
                    assert!((purity - 1.0).abs() < 1e-10, "{name}: qubit {q} marginal impure");
                }
            }
        }
    }

    #[test]
    fn pass_probability_routes_agree() {
        let s = canned("cnot").unwrap();
        let x = convert(&s).unwrap();
        let circuit = CliffordCircuit::new(2, vec![Gate::Cnot(0, 1)]).unwrap();
        let exact = QuantumProcess::unitary(circuit.unitary().unwrap()).unwrap();
        assert!((failure_probability(&x, &exact).unwrap() - 1.0).abs() < 1e-10);

        let noisy = crate::channel::make_noise(&exact, &NoiseSpec::Depolarizing { p: 0.04 }).unwrap();
        let value = failure_probability(&x, &noisy).unwrap();
        // Choi route and the ancilla-assisted pass probability agree for
        // trace-preserving processes.
        let rho_e = noisy.choi_state().unwrap();
        let aapv = s.pass_probability(&rho_e).unwrap();
        assert!((value - aapv).abs() < 1e-10);
        assert!((value - 0.98).abs() < 1e-10);
        let f_e = noisy.entanglement_fidelity(&exact).unwrap();
        let bound = 1.0 - (1.0 - f_e) * s.spectral_gap().unwrap();
        assert!(value <= bound + 1e-9);
    }

    #[test]
    fn non_trace_preserving_is_rejected_by_the_plain_route() {
        let x = convert(&canned("identity2").unwrap()).unwrap();
        let k = Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        let filter = noise_process(&NoiseSpec::LossyFilter { k }, &[2]).unwrap();
        assert!(failure_probability(&x, &filter).is_err());
    }

    #[test]
    fn postselected_filter_target_passes_perfectly() {
        // Strategy with the filter's normalized Choi state in the +1 space of
        // its single correlation test.
        let k = Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        let filter = noise_process(&NoiseSpec::LossyFilter { k }, &[2]).unwrap();
        let target = filter.choi_pure_state().unwrap();
        let zz = Test::pauli(PauliString::parse("ZZ").unwrap()).unwrap();
        let s = AapvStrategy::new(vec![(1.0, zz)], target, 1, 1).unwrap();
        let x = to_pmpv(&one_way_decompose(&s).unwrap(), 2).unwrap();
        let rate = postselected_failure_probability(&x, &filter).unwrap();
        assert!((rate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn postselected_ratio_equals_choi_overlap_under_mixed_mean_input() {
        let s = canned("identity2").unwrap();
        let x = convert(&s).unwrap();
        let k = Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        let filter = noise_process(&NoiseSpec::LossyFilter { k }, &[2]).unwrap();
        let noisy = crate::channel::make_noise(&filter, &NoiseSpec::Depolarizing { p: 0.1 }).unwrap();
        let ratio = postselected_failure_probability(&x, &noisy).unwrap();
        let rho_e = noisy.choi_state().unwrap();
        let overlap = s.pass_probability(&rho_e).unwrap();
        assert!((ratio - overlap).abs() < 1e-10);
    }

    #[test]
    fn postselected_reduces_to_plain_for_trace_preserving() {
        let s = canned("hadamard").unwrap();
        let x = convert(&s).unwrap();
        let gate = CliffordCircuit::new(1, vec![Gate::H(0)]).unwrap();
        let exact = QuantumProcess::unitary(gate.unitary().unwrap()).unwrap();
        let noisy = crate::channel::make_noise(&exact, &NoiseSpec::Depolarizing { p: 0.2 }).unwrap();
        let a = failure_probability(&x, &noisy).unwrap();
        let b = postselected_failure_probability(&x, &noisy).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn annihilating_process_reports_zero_success() {
        let x = convert(&canned("identity2").unwrap()).unwrap();
        let k = Matrix::zeros(2, 2);
        // The all-zero filter is not a valid process (zero Kraus sum is fine:
        // trace-decreasing), so build it directly.
        let dead = QuantumProcess::kraus(vec![k], vec![2], vec![2]).unwrap();
        assert!(matches!(postselected_failure_probability(&x, &dead), Err(Error::ZeroSuccess(_))));
    }

    #[test]
    fn efficiency_matches_on_random_processes() {
        let s = canned("hadamard").unwrap();
        let x = convert(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut ks = Vec::new();
            for _ in 0..3 {
                let mut k = Matrix::zeros(2, 2);
                for r in 0..2 {
                    for c in 0..2 {
                        k[(r, c)] = C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
                    }
                }
                ks.push(k);
            }
            let e = match QuantumProcess::kraus(ks, vec![2], vec![2]) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let upsilon = e.choi_matrix().unwrap();
            let total = upsilon.trace().re;
            if total <= 1e-6 {
                continue;
            }
            let rho_e = e.choi_state().unwrap();
            let omega_overlap = s.pass_probability(&rho_e).unwrap();
            let xi = x.xi_matrix().unwrap();
            let numerator = (xi.matrix() * upsilon.matrix()).trace().re;
            // Tr(Xi Y) = Tr(Omega rho) * (Tr Y / d)
            assert!((numerator - omega_overlap * total / 2.0).abs() < 1e-10);
            let ratio = postselected_failure_probability(&x, &e).unwrap();
            assert!((ratio - omega_overlap).abs() < 1e-10);
        }
    }

    #[test]
    fn hypergraph_strategies_also_convert() {
        let s = crate::protocols::hypergraph_cz_protocol(2).unwrap();
        let x = convert(&s).unwrap();
        let omega = s.strategy_matrix().unwrap();
        assert!(x.xi_matrix().unwrap().max_diff(&omega.scale(C64::new(0.25, 0.0))) < 1e-12);
        let mean = x.mean_input().unwrap();
        let mixed = Operator::identity(vec![2, 2]).unwrap().scale(C64::new(0.25, 0.0));
        assert!(mean.max_diff(&mixed) < 1e-12);
    }

    #[test]
    fn correlated_tests_also_convert() {
        let u = {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            Operator::new(
                Matrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, h)]),
                vec![2],
            )
            .unwrap()
        };
        let s = crate::protocols::single_qubit_gate_protocol(&u, 2).unwrap();
        let x = convert(&s).unwrap();
        assert!((failure_probability(&x, &QuantumProcess::unitary(u).unwrap()).unwrap() - 1.0).abs() < 1e-10);
    }
}
