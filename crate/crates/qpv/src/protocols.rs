//! Named protocol builders behind a runtime registry.
//!
//! Every construction (stabilizer-generator, full-group, single-qubit
//! substitution, hypergraph coloring, and the canned textbook protocols) is
//! exposed twice: as a plain function and as a [`ProtocolBuilder`] trait
//! object registered under a stable name like `cnot` or `hypergraph_cz:3`,
//! so front ends can select protocols at runtime.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use crate::channel::QuantumProcess;
use crate::error::{Error, Result};
use crate::pauli::{choi_stabilizers, CliffordCircuit, Gate, Hypergraph, PauliString, StabilizerGroup};
use crate::strategy::{AapvStrategy, Test};
use crate::tensor::{self, Matrix, Operator, PureState, C64};

/// Builds one named strategy family; `param` is the text after `:` in
/// requests like `hypergraph_cz:3`.
pub trait ProtocolBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn build(&self, param: Option<&str>) -> Result<AapvStrategy>;
}

/// Runtime name-to-builder map.
pub struct ProtocolRegistry {
    builders: BTreeMap<&'static str, Box<dyn ProtocolBuilder>>,
}

impl ProtocolRegistry {
    pub fn empty() -> Self {
        ProtocolRegistry { builders: BTreeMap::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = ProtocolRegistry::empty();
        for name in CANNED_NAMES {
            r.register(Box::new(CannedBuilder { name }));
        }
        r.register(Box::new(FullGroupBuilder));
        r.register(Box::new(SingleQubitBuilder { settings: 2, name: "single_qubit2" }));
        r.register(Box::new(SingleQubitBuilder { settings: 3, name: "single_qubit3" }));
        r.register(Box::new(HypergraphBuilder));
        r
    }

    pub fn register(&mut self, builder: Box<dyn ProtocolBuilder>) {
        self.builders.insert(builder.name(), builder);
    }

    /// Resolves `name` or `name:param` and builds the strategy.
    pub fn build(&self, spec: &str) -> Result<AapvStrategy> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let builder = self.builders.get(name).ok_or_else(|| {
            Error::UnknownProtocol(format!("{name} (available: {})", self.names().join(", ")))
        })?;
        builder.build(param)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn summaries(&self) -> Vec<(&'static str, &'static str)> {
        self.builders.values().map(|b| (b.name(), b.summary())).collect()
    }
}

static DEFAULT_REGISTRY: Lazy<ProtocolRegistry> = Lazy::new(ProtocolRegistry::with_defaults);

pub fn default_registry() -> &'static ProtocolRegistry {
    &DEFAULT_REGISTRY
}

/// The unique pure state stabilized by a maximal generator set.
pub fn stabilized_state(group: &StabilizerGroup) -> Result<PureState> {
    let n = group.n();
    if group.len() != n {
        return Err(Error::invalid(
            "stabilizer target",
            format!("{} generators on {n} qubits do not determine a unique state", group.len()),
        ));
    }
    let proj = crate::pauli::stabilizer_projector(n, group.generators())?;
    if proj.trace().re < 0.5 {
        return Err(Error::invalid("stabilizer target", "no common +1 eigenvector"));
    }
    let spec = tensor::eig_hermitian(&proj, true)?;
    if (spec.largest() - 1.0).abs() > 1e-10 || spec.eigenvalues[1].abs() > 1e-10 {
        return Err(Error::invalid("stabilizer target", "stabilized subspace is not one-dimensional"));
    }
    PureState::normalized(spec.eigenvector(0).unwrap(), vec![2; n]).map(|s| s.phase_canonical())
}

/// Uniform mixture over the generator tests of a maximal stabilizer group.
pub fn generator_protocol(group: &StabilizerGroup, n_ancilla: usize) -> Result<AapvStrategy> {
    let target = stabilized_state(group)?;
    let k = group.len();
    let tests = group
        .generators()
        .iter()
        .map(|g| Ok((1.0 / k as f64, Test::pauli(*g)?)))
        .collect::<Result<Vec<_>>>()?;
    AapvStrategy::new(tests, target, n_ancilla, group.n() - n_ancilla)
}

/// Uniform mixture over every nontrivial element of the stabilizer group.
pub fn full_group_protocol(group: &StabilizerGroup, n_ancilla: usize) -> Result<AapvStrategy> {
    let target = stabilized_state(group)?;
    let elements = group.elements()?;
    let k = elements.len() - 1;
    let tests = elements
        .into_iter()
        .filter(|e| !e.is_identity_body())
        .map(|e| Ok((1.0 / k as f64, Test::pauli(e)?)))
        .collect::<Result<Vec<_>>>()?;
    AapvStrategy::new(tests, target, n_ancilla, group.n() - n_ancilla)
}

/// Verification of a one-qubit gate with 2 or 3 measurement settings. Each
/// setting pairs an ancilla Pauli `sigma` with the conjugated observable
/// `u sigma^T u^dag` on the system qubit; non-Pauli conjugates become
/// custom-basis correlation tests.
pub fn single_qubit_gate_protocol(u: &Operator, settings: usize) -> Result<AapvStrategy> {
    if u.dims() != [2] {
        return Err(Error::invalid("protocol", "single-qubit protocol needs a 2x2 unitary"));
    }
    let mut u_check = u.clone();
    if !u_check.verify_unitary() {
        return Err(Error::invalid("protocol", "gate matrix is not unitary"));
    }
    if !matches!(settings, 2 | 3) {
        return Err(Error::invalid("protocol", format!("{settings} settings unsupported; choose 2 or 3")));
    }
    let target = QuantumProcess::unitary(u.clone())?.choi_pure_state()?;
    let sigmas: &[char] = if settings == 2 { &['X', 'Z'] } else { &['X', 'Y', 'Z'] };
    let p = 1.0 / settings as f64;
    let mut tests = Vec::with_capacity(settings);
    for &letter in sigmas {
        let sigma = PauliString::single(1, 0, letter)?;
        let conjugated = Operator::new(
            u.matrix() * sigma.to_matrix()?.transpose().matrix() * u.matrix().adjoint(),
            vec![2],
        )?;
        let test = match as_signed_pauli(&conjugated)? {
            Some(system) => Test::pauli(sigma.tensor(&system)?)?,
            None => Test::correlated(sigma, conjugated)?,
        };
        tests.push((p, test));
    }
    AapvStrategy::new(tests, target, 1, 1)
}

/// Recognizes a 2x2 operator as a signed Pauli letter within 1e-12.
fn as_signed_pauli(op: &Operator) -> Result<Option<PauliString>> {
    for letter in ['X', 'Y', 'Z'] {
        let p = PauliString::single(1, 0, letter)?;
        let dense = p.to_matrix()?;
        if op.max_diff(&dense) <= 1e-12 {
            return Ok(Some(p));
        }
        if op.max_diff(&dense.scale(C64::new(-1.0, 0.0))) <= 1e-12 {
            return Ok(Some(p.negated()));
        }
    }
    Ok(None)
}

/// Coloring protocol for the (n-1)-controlled-Z gate: one test per color
/// class of the Choi hypergraph.
pub fn hypergraph_cz_protocol(n: usize) -> Result<AapvStrategy> {
    let graph = Hypergraph::for_multi_cz(n)?;
    crate::cap::check_dim(1usize << graph.n_vertices())?;
    let target = graph.state()?;
    let classes = graph.greedy_coloring();
    let p = 1.0 / classes.len() as f64;
    let tests = classes
        .into_iter()
        .map(|class| Ok((p, Test::hypergraph_class(graph.clone(), class)?)))
        .collect::<Result<Vec<_>>>()?;
    AapvStrategy::new(tests, target, n, n)
}

const CANNED_NAMES: [&str; 8] =
    ["cnot", "identity2", "identity3", "xgate", "hadamard", "phase", "dj_const1", "dj_balanced_x2"];

fn canned_spec(name: &str) -> Option<(&'static [&'static str], usize, Vec<Gate>, &'static str)> {
    match name {
        "cnot" => Some((
            &["+ZXZX", "+IZZZ", "+ZZIZ", "+XXXI"],
            2,
            vec![Gate::Cnot(0, 1)],
            "controlled-NOT gate, four stabilizer-generator tests",
        )),
        "identity2" => Some((&["+XX", "+ZZ"], 1, vec![], "one-qubit identity, two settings")),
        "identity3" => Some((&["+XX", "-YY", "+ZZ"], 1, vec![], "one-qubit identity, three settings")),
        "xgate" => Some((
            &["+XX", "-ZZ"],
            1,
            vec![Gate::H(0), Gate::S(0), Gate::S(0), Gate::H(0)],
            "bit-flip gate, two settings",
        )),
        "hadamard" => Some((&["+XZ", "+ZX"], 1, vec![Gate::H(0)], "Hadamard gate, two settings")),
        "phase" => Some((&["+XY", "+ZZ"], 1, vec![Gate::S(0)], "phase gate, two settings")),
        "dj_const1" => Some((
            &["+ZZZZZZ", "+ZZYZZY", "-ZZXZZX", "-ZYZZYZ", "+ZXZZXZ", "-YZZYZZ"],
            3,
            vec![Gate::S(2), Gate::S(2)],
            "constant-function oracle on two query bits, six generator tests",
        )),
        "dj_balanced_x2" => Some((
            &["+ZZZZIZ", "-ZZYZIY", "+ZZXZZX", "-ZYZZXY", "-ZXZZYY", "-YZZYIZ"],
            3,
            vec![Gate::Cnot(1, 2)],
            "balanced-function oracle on two query bits, six generator tests",
        )),
        _ => None,
    }
}

/// One of the eight built-in textbook protocols.
pub fn canned(name: &str) -> Result<AapvStrategy> {
    let (strings, n, gates, _) = canned_spec(name)
        .ok_or_else(|| Error::UnknownProtocol(format!("{name} (canned: {})", CANNED_NAMES.join(", "))))?;
    let circuit = CliffordCircuit::new(n, gates)?;
    let target = QuantumProcess::unitary(circuit.unitary()?)?.choi_pure_state()?;
    let k = strings.len();
    let tests = strings
        .iter()
        .map(|s| Ok((1.0 / k as f64, Test::pauli(PauliString::parse(s)?)?)))
        .collect::<Result<Vec<_>>>()?;
    AapvStrategy::new(tests, target, n, n)
}

struct CannedBuilder {
    name: &'static str,
}

impl ProtocolBuilder for CannedBuilder {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        canned_spec(self.name).map(|(_, _, _, s)| s).unwrap_or("")
    }

    fn build(&self, param: Option<&str>) -> Result<AapvStrategy> {
        if param.is_some() {
            return Err(Error::invalid("protocol", format!("{} takes no parameter", self.name)));
        }
        canned(self.name)
    }
}

struct FullGroupBuilder;

impl FullGroupBuilder {
    fn circuit(param: &str) -> Result<CliffordCircuit> {
        match param {
            "identity" => CliffordCircuit::new(1, vec![]),
            "cnot" => CliffordCircuit::new(2, vec![Gate::Cnot(0, 1)]),
            "clifford3" => CliffordCircuit::new(
                3,
                vec![Gate::H(0), Gate::Cnot(0, 1), Gate::Cnot(1, 2), Gate::S(2), Gate::H(2), Gate::Cnot(0, 2)],
            ),
            other => Err(Error::invalid("protocol", format!("unknown circuit {other}; choose identity, cnot, or clifford3"))),
        }
    }
}

impl ProtocolBuilder for FullGroupBuilder {
    fn name(&self) -> &'static str {
        "full_group"
    }

    fn summary(&self) -> &'static str {
        "all nontrivial stabilizer tests of a Clifford circuit (identity, cnot, or clifford3)"
    }

    fn build(&self, param: Option<&str>) -> Result<AapvStrategy> {
        let circuit = Self::circuit(param.unwrap_or("identity"))?;
        let group = StabilizerGroup::new(2 * circuit.n(), choi_stabilizers(&circuit)?)?;
        full_group_protocol(&group, circuit.n())
    }
}

fn named_qubit_gate(name: &str) -> Result<Operator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = C64::new;
    let m = match name {
        "identity" => Matrix::identity(2, 2),
        "x" => Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        "y" => Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        "z" => Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        "h" => Matrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        "s" => Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
        "t" => Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, h)]),
        other => {
            return Err(Error::invalid(
                "protocol",
                format!("unknown gate {other}; choose identity, x, y, z, h, s, or t"),
            ))
        }
    };
    Operator::new(m, vec![2])
}

struct SingleQubitBuilder {
    settings: usize,
    name: &'static str,
}

impl ProtocolBuilder for SingleQubitBuilder {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        if self.settings == 2 {
            "one-qubit gate with two measurement settings (gate name after the colon)"
        } else {
            "one-qubit gate with three measurement settings (gate name after the colon)"
        }
    }

    fn build(&self, param: Option<&str>) -> Result<AapvStrategy> {
        let gate = named_qubit_gate(param.unwrap_or("identity"))?;
        single_qubit_gate_protocol(&gate, self.settings)
    }
}

struct HypergraphBuilder;

impl ProtocolBuilder for HypergraphBuilder {
    fn name(&self) -> &'static str {
        "hypergraph_cz"
    }

    fn summary(&self) -> &'static str {
        "multi-controlled-Z gate via hypergraph coloring (qubit count after the colon)"
    }

    fn build(&self, param: Option<&str>) -> Result<AapvStrategy> {
        let n: usize = param
            .unwrap_or("2")
            .parse()
            .map_err(|_| Error::invalid("protocol", format!("qubit count {:?} is not an integer", param.unwrap_or(""))))?;
        hypergraph_cz_protocol(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canned_gaps_match_known_values() {
        for (name, gap) in [
            ("cnot", 0.25),
            ("identity2", 0.5),
            ("identity3", 2.0 / 3.0),
            ("xgate", 0.5),
            ("hadamard", 0.5),
            ("phase", 0.5),
            ("dj_const1", 1.0 / 6.0),
            ("dj_balanced_x2", 1.0 / 6.0),
        ] {
            let s = canned(name).unwrap();
            assert!((s.spectral_gap().unwrap() - gap).abs() < 1e-9, "gap mismatch for {name}");
        }
        assert!(matches!(canned("nope"), Err(Error::UnknownProtocol(_))));
    }

    #[test]
    fn full_group_gaps() {
        for (param, gap) in [("identity", 2.0 / 3.0), ("cnot", 8.0 / 15.0), ("clifford3", 32.0 / 63.0)] {
            let s = default_registry().build(&format!("full_group:{param}")).unwrap();
            assert!((s.spectral_gap().unwrap() - gap).abs() < 1e-9, "gap mismatch for {param}");
            let n = s.n_qubits() / 2;
            assert_eq!(s.tests().len(), (1 << (2 * n)) - 1);
        }
    }

    #[test]
    fn hypergraph_gaps() {
        for (n, gap) in [(2usize, 1.0 / 3.0), (3, 0.25)] {
            let s = hypergraph_cz_protocol(n).unwrap();
            assert!((s.spectral_gap().unwrap() - gap).abs() < 1e-9, "gap mismatch for n={n}");
            assert_eq!(s.tests().len(), n + 1);
        }
    }

    #[test]
    fn generator_protocol_from_tableau_matches_canned() {
        let circuit = CliffordCircuit::new(2, vec![Gate::Cnot(0, 1)]).unwrap();
        let gens = StabilizerGroup::new(4, choi_stabilizers(&circuit).unwrap()).unwrap();
        let listed: Vec<PauliString> =
            ["+ZXZX", "+IZZZ", "+ZZIZ", "+XXXI"].iter().map(|s| PauliString::parse(s).unwrap()).collect();
        let listed_group = StabilizerGroup::new(4, listed).unwrap();
        assert!(gens.equivalent(&listed_group));
        let s = generator_protocol(&gens, 2).unwrap();
        // Any independent generating set of the same size has the same
        // strategy spectrum, so the gap must agree with the canned protocol.
        assert!((s.spectral_gap().unwrap() - 0.25).abs() < 1e-9);
        assert!((canned("cnot").unwrap().spectral_gap().unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn single_qubit_protocols() {
        let h_gate = named_qubit_gate("h").unwrap();
        let s2 = single_qubit_gate_protocol(&h_gate, 2).unwrap();
        let canned_h = canned("hadamard").unwrap();
        assert!(s2.strategy_matrix().unwrap().max_diff(canned_h.strategy_matrix().unwrap()) < 1e-12);
        for gate in ["identity", "x", "h", "s", "t"] {
            let u = named_qubit_gate(gate).unwrap();
            let two = single_qubit_gate_protocol(&u, 2).unwrap();
            assert!((two.spectral_gap().unwrap() - 0.5).abs() < 1e-9, "2-setting gap for {gate}");
            let three = single_qubit_gate_protocol(&u, 3).unwrap();
            assert!((three.spectral_gap().unwrap() - 2.0 / 3.0).abs() < 1e-9, "3-setting gap for {gate}");
        }
    }

    #[test]
    fn substitution_recovers_identity_signs() {
        // The identity's 3-setting tests carry the minus sign on the Y pair.
        let u = named_qubit_gate("identity").unwrap();
        let s = single_qubit_gate_protocol(&u, 3).unwrap();
        let canned_i3 = canned("identity3").unwrap();
        assert!(s.strategy_matrix().unwrap().max_diff(canned_i3.strategy_matrix().unwrap()) < 1e-12);
    }

    #[test]
    fn t_gate_uses_a_correlated_test() {
        let u = named_qubit_gate("t").unwrap();
        let s = single_qubit_gate_protocol(&u, 2).unwrap();
        let kinds: Vec<_> = s.tests().iter().map(|(_, t)| matches!(t.kind(), crate::strategy::TestKind::Correlated { .. })).collect();
        assert_eq!(kinds.iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn registry_lookup() {
        let reg = default_registry();
        assert!(reg.names().contains(&"cnot"));
        assert!(reg.build("cnot").is_ok());
        assert!(reg.build("hypergraph_cz:3").is_ok());
        assert!(reg.build("single_qubit3:t").is_ok());
        assert!(matches!(reg.build("bogus"), Err(Error::UnknownProtocol(_))));
        assert!(reg.build("hypergraph_cz:zzz").is_err());
        assert!(reg.build("cnot:extra").is_err());
    }

    #[test]
    fn stabilized_state_guards() {
        let gens = StabilizerGroup::new(
            2,
            vec![PauliString::parse("XX").unwrap(), PauliString::parse("ZZ").unwrap()],
        )
        .unwrap();
        let state = stabilized_state(&gens).unwrap();
        assert!((state.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        let partial = StabilizerGroup::new(2, vec![PauliString::parse("XX").unwrap()]).unwrap();
        assert!(stabilized_state(&partial).is_err());
    }
}
