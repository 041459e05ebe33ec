//! Verification strategies for the ancilla-assisted scheme: pass-or-fail
//! tests, the averaged strategy operator, spectral-gap analysis, and sample
//! planning.
//!
//! Tests are kept symbolic (Pauli string, correlated observable pair, or
//! hypergraph color class) and lowered to dense projectors on demand; state
//! expectations run in O(d) without ever forming the matrix, which keeps
//! build-time validation cheap at the dimension cap.

use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::pauli::{stabilizer_projector, Hypergraph, PauliString};
use crate::tensor::{self, Flags, Matrix, Operator, PureState, Tri, Vector, C64};

/// Single-qubit measurement basis.
#[derive(Clone, Debug)]
pub enum Basis {
    Z,
    X,
    Y,
    /// Columns are the outcome-0 and outcome-1 states.
    Custom(Matrix),
}

impl Basis {
    /// 2x2 unitary whose columns are the outcome states.
    pub fn vectors(&self) -> Matrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Basis::Z => Matrix::identity(2, 2),
            Basis::X => Matrix::from_row_slice(2, 2, &[
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(-h, 0.0),
            ]),
            Basis::Y => Matrix::from_row_slice(2, 2, &[
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(0.0, h),
                C64::new(0.0, -h),
            ]),
            Basis::Custom(v) => v.clone(),
        }
    }
}

/// What a test measures and when it passes.
#[derive(Clone, Debug)]
pub enum TestKind {
    /// Measure each letter's basis; pass when the outcome parity over the
    /// support matches the string's sign.
    Pauli(PauliString),
    /// Measure a Pauli string on the ancilla block and a fixed one-qubit
    /// involution on the system qubit; pass when the product of outcomes
    /// is +1.
    Correlated { ancilla: PauliString, system: Operator },
    /// Measure X on the class vertices and Z elsewhere; pass when every
    /// class vertex's stabilizer parity reads +1.
    HypergraphClass { graph: Hypergraph, class: Vec<usize> },
}

/// One pass-or-fail local test.
#[derive(Clone, Debug)]
pub struct Test {
    kind: TestKind,
    projector: OnceCell<Operator>,
}

impl Test {
    pub fn pauli(s: PauliString) -> Result<Test> {
        if !s.is_hermitian() {
            return Err(Error::invalid("test", format!("{s} is not Hermitian")));
        }
        Ok(Test { kind: TestKind::Pauli(s), projector: OnceCell::new() })
    }

    /// Correlation test between an ancilla string and a one-qubit observable
    /// with eigenvalues exactly +1 and -1.
    pub fn correlated(ancilla: PauliString, system: Operator) -> Result<Test> {
        if !ancilla.is_hermitian() {
            return Err(Error::invalid("test", format!("ancilla part {ancilla} is not Hermitian")));
        }
        if system.dim() != 2 || !system.is_hermitian() {
            return Err(Error::invalid("test", "system observable must be a Hermitian qubit operator"));
        }
        let sq = system.matrix() * system.matrix();
        let ident = Matrix::identity(2, 2);
        if sq.iter().zip(ident.iter()).any(|(a, b)| (a - b).norm() > tensor::TOL_EIGEN) {
            return Err(Error::invalid("test", "system observable must square to the identity"));
        }
        Ok(Test { kind: TestKind::Correlated { ancilla, system }, projector: OnceCell::new() })
    }

    pub fn hypergraph_class(graph: Hypergraph, class: Vec<usize>) -> Result<Test> {
        if class.is_empty() {
            return Err(Error::invalid("test", "empty vertex class"));
        }
        if class.iter().any(|&v| v >= graph.n_vertices()) {
            return Err(Error::invalid("test", "class vertex out of range"));
        }
        for (i, &u) in class.iter().enumerate() {
            for &v in &class[i + 1..] {
                if graph.adjacent(u, v) {
                    return Err(Error::invalid("test", format!("class vertices {u} and {v} share an edge")));
                }
            }
        }
        Ok(Test { kind: TestKind::HypergraphClass { graph, class }, projector: OnceCell::new() })
    }

    pub fn kind(&self) -> &TestKind {
        &self.kind
    }

    pub fn n_qubits(&self) -> usize {
        match &self.kind {
            TestKind::Pauli(s) => s.n(),
            TestKind::Correlated { ancilla, .. } => ancilla.n() + 1,
            TestKind::HypergraphClass { graph, .. } => graph.n_vertices(),
        }
    }

    /// Dense projector, lowered once and cached.
    pub fn projector(&self) -> Result<&Operator> {
        self.projector.get_or_try_init(|| match &self.kind {
            TestKind::Pauli(s) => stabilizer_projector(s.n(), &[*s]),
            TestKind::Correlated { ancilla, system } => {
                let a = ancilla.to_matrix()?;
                let obs = a.kron(system)?;
                let n = ancilla.n() + 1;
                let half = Operator::identity(vec![2; n])?.add(&obs)?.scale(C64::new(0.5, 0.0));
                Ok(half.with_flags(Flags { hermitian: Tri::Yes, unitary: Tri::Unknown, projector: Tri::Yes }))
            }
            TestKind::HypergraphClass { graph, class } => {
                let n = graph.n_vertices();
                let d = 1usize << n;
                crate::cap::check_dim(d)?;
                let mut m = Matrix::identity(d, d);
                for &v in class {
                    for col in 0..d {
                        let column = m.column(col).into_owned();
                        let kv = graph.stabilizer_apply(v, &column)?;
                        for r in 0..d {
                            m[(r, col)] = (column[r] + kv[r]) * C64::new(0.5, 0.0);
                        }
                    }
                }
                let op = Operator::new(m, vec![2; n])?;
                Ok(op.with_flags(Flags { hermitian: Tri::Yes, unitary: Tri::Unknown, projector: Tri::Yes }))
            }
        })
    }

    /// `<v|P|v>` evaluated without the dense projector.
    pub fn expectation(&self, state: &Vector) -> Result<f64> {
        if state.len() != 1usize << self.n_qubits() {
            return Err(Error::mismatch(format!("state dim {} vs test on {} qubits", state.len(), self.n_qubits())));
        }
        match &self.kind {
            TestKind::Pauli(s) => Ok((1.0 + s.expectation(state).re) / 2.0),
            TestKind::Correlated { .. } => {
                let p = self.projector()?;
                let pv = p.matrix() * state;
                Ok(state.dotc(&pv).re)
            }
            TestKind::HypergraphClass { graph, class } => {
                let mut v = state.clone();
                for &vertex in class {
                    let kv = graph.stabilizer_apply(vertex, &v)?;
                    v = (v + kv) * C64::new(0.5, 0.0);
                }
                Ok(state.dotc(&v).re)
            }
        }
    }

    /// One measurement basis per qubit.
    pub fn local_settings(&self) -> Result<Vec<Basis>> {
        match &self.kind {
            TestKind::Pauli(s) => Ok((0..s.n())
                .map(|q| match s.letter(q) {
                    'X' => Basis::X,
                    'Y' => Basis::Y,
                    _ => Basis::Z,
                })
                .collect()),
            TestKind::Correlated { ancilla, system } => {
                let mut bases: Vec<Basis> = (0..ancilla.n())
                    .map(|q| match ancilla.letter(q) {
                        'X' => Basis::X,
                        'Y' => Basis::Y,
                        _ => Basis::Z,
                    })
                    .collect();
                let spec = tensor::eig_hermitian(system, true)?;
                if (spec.eigenvalues[0] - 1.0).abs() > tensor::TOL_EIGEN || (spec.eigenvalues[1] + 1.0).abs() > tensor::TOL_EIGEN {
                    return Err(Error::invalid("test", "system observable eigenvalues are not +1, -1"));
                }
                bases.push(Basis::Custom(spec.eigenvectors.unwrap()));
                Ok(bases)
            }
            TestKind::HypergraphClass { graph, class } => Ok((0..graph.n_vertices())
                .map(|v| if class.contains(&v) { Basis::X } else { Basis::Z })
                .collect()),
        }
    }

    /// Pass rule on per-qubit outcome bits (0 is the +1 outcome).
    pub fn passes(&self, bits: &[u8]) -> Result<bool> {
        if bits.len() != self.n_qubits() {
            return Err(Error::mismatch(format!("{} outcomes for a test on {} qubits", bits.len(), self.n_qubits())));
        }
        match &self.kind {
            TestKind::Pauli(s) => {
                let mut parity = 0u8;
                for (q, b) in bits.iter().enumerate().take(s.n()) {
                    if s.letter(q) != 'I' {
                        parity ^= b & 1;
                    }
                }
                let want = if s.phase_exponent() == 2 { 1 } else { 0 };
                Ok(parity == want)
            }
            TestKind::Correlated { ancilla, .. } => {
                let mut parity = bits[ancilla.n()] & 1;
                for (q, b) in bits.iter().enumerate().take(ancilla.n()) {
                    if ancilla.letter(q) != 'I' {
                        parity ^= b & 1;
                    }
                }
                let want = if ancilla.phase_exponent() == 2 { 1 } else { 0 };
                Ok(parity == want)
            }
            TestKind::HypergraphClass { graph, class } => {
                for &v in class {
                    let mut parity = bits[v] & 1;
                    for e in graph.edges().iter().filter(|e| e.contains(&v)) {
                        if e.iter().filter(|&&w| w != v).all(|&w| bits[w] & 1 == 1) {
                            parity ^= 1;
                        }
                    }
                    if parity != 0 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Rebuilds the projector from the local settings and the pass rule by
    /// enumerating outcomes; cross-check used in tests.
    pub fn lowered_from_settings(&self) -> Result<Operator> {
        let n = self.n_qubits();
        let d = 1usize << n;
        crate::cap::check_dim(d)?;
        let bases: Vec<Matrix> = self.local_settings()?.iter().map(|b| b.vectors()).collect();
        let mut m = Matrix::zeros(d, d);
        let mut bits = vec![0u8; n];
        for outcome in 0..d {
            for (q, b) in bits.iter_mut().enumerate() {
                *b = (outcome >> (n - 1 - q) & 1) as u8;
            }
            if !self.passes(&bits)? {
                continue;
            }
            // Tensor product of the chosen basis columns.
            let mut v = Vector::from_element(1, C64::new(1.0, 0.0));
            for q in 0..n {
                let col = bases[q].column(bits[q] as usize).into_owned();
                let mut next = Vector::zeros(v.len() * 2);
                for (i, a) in v.iter().enumerate() {
                    next[2 * i] = a * col[0];
                    next[2 * i + 1] = a * col[1];
                }
                v = next;
            }
            m += &v * v.adjoint();
        }
        Operator::new(m, vec![2; n])
    }
}

/// Ancilla-assisted verification strategy: a probability-weighted family of
/// tests certifying one Choi state.
#[derive(Clone, Debug)]
pub struct AapvStrategy {
    tests: Vec<(f64, Test)>,
    target: PureState,
    n_ancilla: usize,
    n_system: usize,
    matrix: OnceCell<Operator>,
}

impl AapvStrategy {
    pub fn new(tests: Vec<(f64, Test)>, target: PureState, n_ancilla: usize, n_system: usize) -> Result<Self> {
        if tests.is_empty() {
            return Err(Error::MalformedStrategy("no tests".into()));
        }
        let n = n_ancilla + n_system;
        if target.dim() != 1usize << n {
            return Err(Error::MalformedStrategy(format!(
                "target dim {} does not match {n_ancilla}+{n_system} qubits",
                target.dim()
            )));
        }
        let mut total = 0.0;
        for (p, t) in &tests {
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::MalformedStrategy(format!("test probability {p} is not positive")));
            }
            if t.n_qubits() != n {
                return Err(Error::MalformedStrategy(format!("test on {} qubits in a {n}-qubit strategy", t.n_qubits())));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::MalformedStrategy(format!("test probabilities sum to {total}")));
        }
        let mut pass = 0.0;
        for (p, t) in &tests {
            pass += p * t.expectation(target.amplitudes())?;
        }
        if (pass - 1.0).abs() > 1e-10 {
            return Err(Error::MalformedStrategy(format!("target passes with probability {pass}, expected 1")));
        }
        Ok(AapvStrategy { tests, target, n_ancilla, n_system, matrix: OnceCell::new() })
    }

    pub fn tests(&self) -> &[(f64, Test)] {
        &self.tests
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_qubits(&self) -> usize {
        self.n_ancilla + self.n_system
    }

    /// The averaged test operator, lowered once and cached.
    pub fn strategy_matrix(&self) -> Result<&Operator> {
        self.matrix.get_or_try_init(|| {
            let n = self.n_qubits();
            let d = 1usize << n;
            crate::cap::check_dim(d)?;
            let mut m = Matrix::zeros(d, d);
            for (p, t) in &self.tests {
                m += t.projector()?.matrix() * C64::new(*p, 0.0);
            }
            Operator::new(m, vec![2; n])
        })
    }

    /// One minus the second-largest eigenvalue; the largest must be 1.
    pub fn spectral_gap(&self) -> Result<f64> {
        let omega = self.strategy_matrix()?;
        let spec = tensor::eig_hermitian(omega, false)?;
        if (spec.largest() - 1.0).abs() > 1e-10 {
            return Err(Error::MalformedStrategy(format!("largest eigenvalue is {}, expected 1", spec.largest())));
        }
        Ok((1.0 - spec.second_largest()).clamp(0.0, 1.0))
    }

    /// Pass probability of an arbitrary Choi-state density matrix.
    pub fn pass_probability(&self, rho: &Operator) -> Result<f64> {
        let omega = self.strategy_matrix()?;
        if rho.dim() != omega.dim() {
            return Err(Error::mismatch(format!("state dim {} vs strategy dim {}", rho.dim(), omega.dim())));
        }
        Ok((omega.matrix() * rho.matrix()).diagonal().sum().re)
    }
}

/// Sample budget for a target infidelity and failure ceiling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub delta: f64,
    pub nu: f64,
    /// Exact ceiling count.
    pub n: u64,
    /// First-order approximation `ln(1/delta) / (nu*epsilon)`.
    pub n_approx: f64,
}

/// Smallest N with `(1 - nu*epsilon)^N <= delta`.
pub fn plan_samples(epsilon: f64, delta: f64, nu: f64) -> Result<SamplePlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("plan", format!("epsilon {epsilon} outside (0,1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("plan", format!("delta {delta} outside (0,1)")));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::invalid("plan", format!("nu {nu} outside (0,1]")));
    }
    let rate = nu * epsilon;
    let ln_inv_delta = -delta.ln();
    // ln(1/(1-rate)) computed stably; +inf when rate is exactly 1.
    let per_round = -(-rate).ln_1p();
    let exact = (ln_inv_delta / per_round).ceil();
    let n = if exact.is_finite() { (exact as u64).max(1) } else { 1 };
    Ok(SamplePlan { epsilon, delta, nu, n, n_approx: ln_inv_delta / rate })
}

/// Confidence bound `(1 - epsilon*nu)^N` after N passed rounds.
pub fn confidence(epsilon: f64, nu: f64, n: u64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("confidence", format!("epsilon {epsilon} outside (0,1)")));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::invalid("confidence", format!("nu {nu} outside (0,1]")));
    }
    Ok((1.0 - epsilon * nu).powi(n.min(i32::MAX as u64) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = Vector::zeros(4);
        v[0] = C64::new(h, 0.0);
        v[3] = C64::new(h, 0.0);
        PureState::new(v, vec![2, 2]).unwrap()
    }

    fn bell_strategy() -> AapvStrategy {
        let tests = vec![(0.5, Test::pauli(ps("XX")).unwrap()), (0.5, Test::pauli(ps("ZZ")).unwrap())];
        AapvStrategy::new(tests, bell(), 1, 1).unwrap()
    }

    #[test]
    fn bell_strategy_matrix_and_gap() {
        let s = bell_strategy();
        let omega = s.strategy_matrix().unwrap();
        let xx = stabilizer_projector(2, &[ps("XX")]).unwrap();
        let zz = stabilizer_projector(2, &[ps("ZZ")]).unwrap();
        let want = xx.add(&zz).unwrap().scale(C64::new(0.5, 0.0));
        assert!(omega.max_diff(&want) < 1e-15);
        assert!((s.spectral_gap().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_test_strategy_is_projector() {
        let t = Test::pauli(ps("ZZ")).unwrap();
        let s = AapvStrategy::new(vec![(1.0, t)], bell(), 1, 1).unwrap();
        let omega = s.strategy_matrix().unwrap();
        let zz = stabilizer_projector(2, &[ps("ZZ")]).unwrap();
        assert!(omega.max_diff(&zz) < 1e-15);
    }

    #[test]
    fn build_rejects_bad_probabilities_and_targets() {
        let t = || Test::pauli(ps("XX")).unwrap();
        assert!(matches!(
            AapvStrategy::new(vec![(0.7, t()), (0.2, t())], bell(), 1, 1),
            Err(Error::MalformedStrategy(_))
        ));
        // -XX does not stabilize the Bell state.
        let bad = vec![(0.5, Test::pauli(ps("-XX")).unwrap()), (0.5, Test::pauli(ps("ZZ")).unwrap())];
        assert!(matches!(AapvStrategy::new(bad, bell(), 1, 1), Err(Error::MalformedStrategy(_))));
    }

    #[test]
    fn pauli_pass_rule() {
        let t = Test::pauli(ps("ZZ")).unwrap();
        assert!(t.passes(&[0, 0]).unwrap());
        assert!(t.passes(&[1, 1]).unwrap());
        assert!(!t.passes(&[0, 1]).unwrap());
        let m = Test::pauli(ps("-ZZ")).unwrap();
        assert!(!m.passes(&[0, 0]).unwrap());
        assert!(m.passes(&[1, 0]).unwrap());
        let with_identity = Test::pauli(ps("ZIZ")).unwrap();
        assert!(with_identity.passes(&[1, 0, 1]).unwrap());
        assert!(with_identity.passes(&[1, 1, 1]).unwrap());
        assert!(!with_identity.passes(&[1, 1, 0]).unwrap());
    }

    #[test]
    fn settings_lowering_matches_projector() {
        for s in ["XX", "-ZZ", "ZIZ", "YXY"] {
            let t = Test::pauli(ps(s)).unwrap();
            let from_settings = t.lowered_from_settings().unwrap();
            assert!(from_settings.max_diff(t.projector().unwrap()) < 1e-12, "mismatch for {s}");
        }
    }

    #[test]
    fn correlated_test_matches_pauli_when_system_is_pauli() {
        let y = ps("Y").to_matrix().unwrap();
        let t = Test::correlated(ps("X"), y).unwrap();
        let p = Test::pauli(ps("XY")).unwrap();
        assert!(t.projector().unwrap().max_diff(p.projector().unwrap()) < 1e-15);
        assert!(t.lowered_from_settings().unwrap().max_diff(p.projector().unwrap()) < 1e-12);
        assert!(t.passes(&[0, 0]).unwrap());
        assert!(!t.passes(&[0, 1]).unwrap());
    }

    #[test]
    fn correlated_test_with_non_pauli_observable() {
        // (X + Y)/sqrt(2) is a valid involution off the Pauli axes.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = ps("X").to_matrix().unwrap();
        let y = ps("Y").to_matrix().unwrap();
        let w = x.scale(C64::new(h, 0.0)).add(&y.scale(C64::new(h, 0.0))).unwrap();
        let t = Test::correlated(ps("X"), w).unwrap();
        let direct = t.projector().unwrap().clone();
        let from_settings = t.lowered_from_settings().unwrap();
        assert!(from_settings.max_diff(&direct) < 1e-12);
        let mut proj = direct.clone();
        assert!(proj.verify_projector());
    }

    #[test]
    fn hypergraph_class_test_passes_target() {
        let g = Hypergraph::for_multi_cz(2).unwrap();
        let target = g.state().unwrap();
        let classes = g.greedy_coloring();
        for class in &classes {
            let t = Test::hypergraph_class(g.clone(), class.clone()).unwrap();
            assert!((t.expectation(target.amplitudes()).unwrap() - 1.0).abs() < 1e-12);
        }
        // Adjacent vertices cannot share a class.
        assert!(Test::hypergraph_class(g, vec![2, 3]).is_err());
    }

    #[test]
    fn hypergraph_class_settings_match_projector() {
        let g = Hypergraph::for_multi_cz(2).unwrap();
        for class in g.greedy_coloring() {
            let t = Test::hypergraph_class(g.clone(), class).unwrap();
            let lowered = t.lowered_from_settings().unwrap();
            assert!(lowered.max_diff(t.projector().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn plan_sample_counts() {
        assert_eq!(plan_samples(0.01, 0.01, 1.0).unwrap().n, 459);
        assert_eq!(plan_samples(0.01, 0.01, 0.25).unwrap().n, 1840);
        assert_eq!(plan_samples(0.05, 0.001, 1.0).unwrap().n, 135);
        let p = plan_samples(0.2, 0.01, 1.0).unwrap();
        assert!((p.n_approx - 0.01f64.ln().abs() / 0.2).abs() < 1e-12);
        assert!(plan_samples(0.0, 0.01, 1.0).is_err());
        assert!(plan_samples(0.01, 1.0, 1.0).is_err());
        assert!(plan_samples(0.01, 0.01, 0.0).is_err());
    }

    #[test]
    fn plan_monotone_in_gap() {
        let mut last = u64::MAX;
        for nu in [0.1, 0.25, 0.5, 1.0] {
            let n = plan_samples(0.01, 0.01, nu).unwrap().n;
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn confidence_values() {
        assert_eq!(confidence(0.01, 1.0, 0).unwrap(), 1.0);
        assert!(confidence(0.01, 1.0, 459).unwrap() <= 0.01);
        assert_eq!(confidence(0.5, 1.0, 3).unwrap(), 0.125);
        let one_round = confidence(1.0 - 1e-12, 1.0, 1);
        assert!(one_round.is_err() || one_round.unwrap() < 1e-11);
    }

    #[test]
    fn pass_probability_of_states() {
        let s = bell_strategy();
        assert!((s.pass_probability(&bell().projector()).unwrap() - 1.0).abs() < 1e-12);
        let mixed = Operator::identity(vec![2, 2]).unwrap().scale(C64::new(0.25, 0.0));
        assert!((s.pass_probability(&mixed).unwrap() - 0.5).abs() < 1e-12);
    }
}
