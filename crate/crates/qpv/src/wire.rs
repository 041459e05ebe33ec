//! Canonical JSON encoding of every artifact type.
//!
//! Output is deterministic across platforms: object keys are emitted in
//! sorted order and every float is written with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` bit-exactly. Complex matrices are
//! nested arrays of `[re, im]` pairs, and common pure states can be written
//! by name (`"0"`, `"1"`, `"+"`, `"-"`, `"top"`, `"bot"`, with U+2212
//! accepted for the minus sign).

use serde_json::{json, Value};

use crate::channel::{ProcessKind, QuantumProcess};
use crate::error::{Error, Result};
use crate::meas::{MeasurementModel, ProjectiveTarget};
use crate::oracle::WorstCaseReport;
use crate::pauli::{CliffordCircuit, Gate, Hypergraph, PauliString};
use crate::pmpv::{PmpvEntry, PmpvStrategy};
use crate::simulate::RunResult;
use crate::strategy::{AapvStrategy, Test, TestKind};
use crate::tensor::{Matrix, Operator, PureState, Vector, C64};

// ---------------------------------------------------------------------------
// canonical writer

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                let f = n.as_f64().expect("JSON number");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string encodes"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// Serializes with sorted keys and fixed float formatting.
pub fn canonical_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(v, &mut s);
    s
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

// ---------------------------------------------------------------------------
// accessors with field-naming errors

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| Error::Parse(format!("expected an object with field `{key}`")))?
        .get(key)
        .ok_or_else(|| Error::Parse(format!("field `{key}` is missing")))
}

fn field_f64(obj: &Value, key: &str) -> Result<f64> {
    field(obj, key)?
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be a number")))
}

fn field_usize(obj: &Value, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be a nonnegative integer")))
}

fn field_array<'a>(obj: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(obj, key)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be an array")))
}

fn dims_from(obj: &Value, key: &str) -> Result<Vec<usize>> {
    field_array(obj, key)?
        .iter()
        .map(|v| v.as_u64().map(|u| u as usize).ok_or_else(|| Error::Parse(format!("field `{key}` must list integers"))))
        .collect()
}

// ---------------------------------------------------------------------------
// matrices and states

fn complex_to_json(c: C64) -> Value {
    json!([c.re, c.im])
}

fn complex_from_json(v: &Value, what: &str) -> Result<C64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("{what}: complex entries are [re, im] pairs")))?;
    let re = pair[0].as_f64().ok_or_else(|| Error::Parse(format!("{what}: real part must be a number")))?;
    let im = pair[1].as_f64().ok_or_else(|| Error::Parse(format!("{what}: imaginary part must be a number")))?;
    Ok(C64::new(re, im))
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| complex_to_json(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("field `matrix` must be an array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Parse("field `matrix` has no rows".into()));
    }
    let ncols = rows[0]
        .as_array()
        .ok_or_else(|| Error::Parse("field `matrix` rows must be arrays".into()))?
        .len();
    let mut m = Matrix::zeros(rows.len(), ncols);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse("field `matrix` rows must be arrays".into()))?;
        if row.len() != ncols {
            return Err(Error::Parse("field `matrix` rows have unequal lengths".into()));
        }
        for (c, entry) in row.iter().enumerate() {
            m[(r, c)] = complex_from_json(entry, "field `matrix`")?;
        }
    }
    Ok(m)
}

pub fn operator_to_json(op: &Operator) -> Value {
    json!({
        "dims": op.dims(),
        "matrix": matrix_to_json(op.matrix()),
    })
}

pub fn operator_from_json(v: &Value) -> Result<Operator> {
    let dims = dims_from(v, "dims")?;
    let m = matrix_from_json(field(v, "matrix")?)?;
    Operator::new(m, dims)
}

fn named_ket(name: &str) -> Option<Vector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match name {
        "0" => vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        "1" => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        "+" => vec![C64::new(h, 0.0), C64::new(h, 0.0)],
        "-" | "\u{2212}" => vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
        "top" => vec![C64::new(h, 0.0), C64::new(0.0, h)],
        "bot" => vec![C64::new(h, 0.0), C64::new(0.0, -h)],
        _ => return None,
    };
    Some(Vector::from_vec(v))
}

const KET_NAMES: [&str; 6] = ["0", "1", "+", "-", "top", "bot"];

/// Recognizes an operator as a product of named single-qubit kets.
fn ket_names_of(op: &Operator) -> Option<Vec<&'static str>> {
    if op.dims().iter().any(|&d| d != 2) {
        return None;
    }
    let n = op.dims().len();
    let mut names = Vec::with_capacity(n);
    let mut product: Option<Operator> = None;
    for q in 0..n {
        let marginal = op.partial_trace(&[q]).ok()?;
        let mut hit = None;
        for name in KET_NAMES {
            let ket = named_ket(name).unwrap();
            let proj = Operator::new(&ket * ket.adjoint(), vec![2]).ok()?;
            if marginal.max_diff(&proj) < 1e-10 {
                hit = Some((name, proj));
                break;
            }
        }
        let (name, proj) = hit?;
        names.push(name);
        product = Some(match product {
            None => proj,
            Some(p) => p.kron(&proj).ok()?,
        });
    }
    if product?.max_diff(op) < 1e-10 {
        Some(names)
    } else {
        None
    }
}

/// Compact encoding for a density operator: a ket name (or list of names)
/// when it is a product of named states, otherwise amplitudes for pure
/// states, otherwise the full matrix.
pub fn state_spec_to_json(op: &Operator) -> Value {
    if let Some(names) = ket_names_of(op) {
        if names.len() == 1 {
            return Value::String(names[0].to_string());
        }
        return Value::Array(names.into_iter().map(|n| Value::String(n.to_string())).collect());
    }
    if let Ok(spec) = crate::tensor::eig_hermitian(op, true) {
        if (op.trace().re - 1.0).abs() < 1e-10 && (spec.largest() - 1.0).abs() < 1e-10 {
            let v = spec.eigenvector(0).unwrap();
            return json!({
                "amplitudes": v.iter().map(|&c| complex_to_json(c)).collect::<Vec<_>>(),
                "dims": op.dims(),
            });
        }
    }
    operator_to_json(op)
}

pub fn state_spec_from_json(v: &Value) -> Result<Operator> {
    match v {
        Value::String(name) => {
            let ket = named_ket(name)
                .ok_or_else(|| Error::Parse(format!("unknown state name {name:?}; choose 0, 1, +, -, top, or bot")))?;
            Operator::new(&ket * ket.adjoint(), vec![2])
        }
        Value::Array(parts) => {
            let mut product: Option<Operator> = None;
            for part in parts {
                let name = part
                    .as_str()
                    .ok_or_else(|| Error::Parse("state lists must contain ket names".into()))?;
                let ket = named_ket(name)
                    .ok_or_else(|| Error::Parse(format!("unknown state name {name:?}; choose 0, 1, +, -, top, or bot")))?;
                let proj = Operator::new(&ket * ket.adjoint(), vec![2])?;
                product = Some(match product {
                    None => proj,
                    Some(p) => p.kron(&proj)?,
                });
            }
            product.ok_or_else(|| Error::Parse("state list is empty".into()))
        }
        Value::Object(map) => {
            if map.contains_key("amplitudes") {
                let amps = field_array(v, "amplitudes")?;
                let dims = if map.contains_key("dims") { dims_from(v, "dims")? } else { vec![2; amps.len().trailing_zeros() as usize] };
                let mut vec = Vector::zeros(amps.len());
                for (i, a) in amps.iter().enumerate() {
                    vec[i] = complex_from_json(a, "field `amplitudes`")?;
                }
                Ok(PureState::new(vec, dims)?.projector())
            } else {
                operator_from_json(v)
            }
        }
        _ => Err(Error::Parse("a state is a ket name, a list of ket names, or an object".into())),
    }
}

// ---------------------------------------------------------------------------
// circuits and processes

fn gate_to_json(g: &Gate) -> Value {
    match g {
        Gate::H(q) => json!(["h", q]),
        Gate::S(q) => json!(["s", q]),
        Gate::Cnot(c, t) => json!(["cnot", c, t]),
    }
}

fn gate_from_json(v: &Value) -> Result<Gate> {
    let parts = v.as_array().ok_or_else(|| Error::Parse("field `gates` must list [name, qubits...] arrays".into()))?;
    let name = parts
        .first()
        .and_then(|p| p.as_str())
        .ok_or_else(|| Error::Parse("field `gates`: each gate starts with its name".into()))?;
    let qubit = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .and_then(|p| p.as_u64())
            .map(|u| u as usize)
            .ok_or_else(|| Error::Parse(format!("field `gates`: gate {name:?} needs qubit indices")))
    };
    match (name, parts.len()) {
        ("h", 2) => Ok(Gate::H(qubit(1)?)),
        ("s", 2) => Ok(Gate::S(qubit(1)?)),
        ("cnot", 3) => Ok(Gate::Cnot(qubit(1)?, qubit(2)?)),
        _ => Err(Error::Parse(format!("field `gates`: unknown gate {name:?} with {} arguments", parts.len() - 1))),
    }
}

pub fn circuit_to_json(c: &CliffordCircuit) -> Value {
    json!({
        "gates": c.gates().iter().map(gate_to_json).collect::<Vec<_>>(),
        "n": c.n(),
    })
}

pub fn circuit_from_json(v: &Value) -> Result<CliffordCircuit> {
    let n = field_usize(v, "n")?;
    let gates = field_array(v, "gates")?.iter().map(gate_from_json).collect::<Result<Vec<_>>>()?;
    CliffordCircuit::new(n, gates)
}

pub fn process_to_json(p: &QuantumProcess) -> Value {
    match p.kind() {
        ProcessKind::Unitary(u) => json!({
            "dims": p.dims_in(),
            "kind": "unitary",
            "matrix": matrix_to_json(u.matrix()),
        }),
        ProcessKind::Kraus(ks) => json!({
            "dims_in": p.dims_in(),
            "dims_out": p.dims_out(),
            "kind": "kraus",
            "kraus": ks.iter().map(matrix_to_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn process_from_json(v: &Value) -> Result<QuantumProcess> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Parse("field `kind` must be \"unitary\" or \"kraus\"".into()))?;
    match kind {
        "unitary" => {
            let dims = dims_from(v, "dims")?;
            let m = matrix_from_json(field(v, "matrix")?)?;
            QuantumProcess::unitary(Operator::new(m, dims)?)
        }
        "kraus" => {
            let obj = v.as_object().unwrap();
            let (dims_in, dims_out) = if obj.contains_key("dims") {
                let d = dims_from(v, "dims")?;
                (d.clone(), d)
            } else {
                (dims_from(v, "dims_in")?, dims_from(v, "dims_out")?)
            };
            let ks = field_array(v, "kraus")?.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
            QuantumProcess::kraus(ks, dims_in, dims_out)
        }
        other => Err(Error::Parse(format!("field `kind`: unknown process kind {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// strategies

fn test_to_json(p: f64, test: &Test) -> Value {
    match test.kind() {
        TestKind::Pauli(s) => json!({"p": p, "pauli": s.to_string()}),
        TestKind::Correlated { ancilla, system } => json!({
            "correlated": {
                "ancilla": ancilla.to_string(),
                "system": matrix_to_json(system.matrix()),
            },
            "p": p,
        }),
        TestKind::HypergraphClass { graph, class } => json!({
            "hypergraph": {
                "class": class,
                "edges": graph.edges(),
                "n_vertices": graph.n_vertices(),
            },
            "p": p,
        }),
    }
}

fn test_from_json(v: &Value) -> Result<(f64, Test)> {
    let p = field_f64(v, "p")?;
    let obj = v.as_object().ok_or_else(|| Error::Parse("each test must be an object".into()))?;
    let test = if let Some(s) = obj.get("pauli") {
        let text = s.as_str().ok_or_else(|| Error::Parse("field `pauli` must be a string".into()))?;
        Test::pauli(PauliString::parse(text)?)?
    } else if let Some(c) = obj.get("correlated") {
        let anc = field(c, "ancilla")?
            .as_str()
            .ok_or_else(|| Error::Parse("field `ancilla` must be a string".into()))?;
        let system = matrix_from_json(field(c, "system")?)?;
        Test::correlated(PauliString::parse(anc)?, Operator::new(system, vec![2])?)?
    } else if let Some(hg) = obj.get("hypergraph") {
        let n_vertices = field_usize(hg, "n_vertices")?;
        let edges = field_array(hg, "edges")?
            .iter()
            .map(|e| {
                e.as_array()
                    .ok_or_else(|| Error::Parse("field `edges` must list vertex arrays".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|u| u as usize)
                            .ok_or_else(|| Error::Parse("field `edges` must list integers".into()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let class = field_array(hg, "class")?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::Parse("field `class` must list integers".into()))
            })
            .collect::<Result<Vec<usize>>>()?;
        Test::hypergraph_class(Hypergraph::new(n_vertices, edges)?, class)?
    } else {
        return Err(Error::Parse("each test needs a `pauli`, `correlated`, or `hypergraph` field".into()));
    };
    Ok((p, test))
}

pub fn strategy_to_json(s: &AapvStrategy) -> Value {
    let target = s.target();
    json!({
        "n_ancilla": s.n_ancilla(),
        "n_system": s.n_system(),
        "target": {
            "state": {
                "amplitudes": target.amplitudes().iter().map(|&c| complex_to_json(c)).collect::<Vec<_>>(),
                "dims": target.dims(),
            }
        },
        "tests": s.tests().iter().map(|(p, t)| test_to_json(*p, t)).collect::<Vec<_>>(),
    })
}

pub fn strategy_from_json(v: &Value) -> Result<AapvStrategy> {
    let n_ancilla = field_usize(v, "n_ancilla")?;
    let n_system = field_usize(v, "n_system")?;
    let target_ref = field(v, "target")?;
    let target = if let Ok(state) = field(target_ref, "state") {
        let amps = field_array(state, "amplitudes")?;
        let dims = dims_from(state, "dims")?;
        let mut vec = Vector::zeros(amps.len());
        for (i, a) in amps.iter().enumerate() {
            vec[i] = complex_from_json(a, "field `amplitudes`")?;
        }
        PureState::new(vec, dims)?
    } else if let Ok(circuit) = field(target_ref, "circuit") {
        let c = circuit_from_json(circuit)?;
        QuantumProcess::unitary(c.unitary()?)?.choi_pure_state()?
    } else {
        return Err(Error::Parse("field `target` needs a `state` or `circuit` field".into()));
    };
    let tests = field_array(v, "tests")?.iter().map(test_from_json).collect::<Result<Vec<_>>>()?;
    AapvStrategy::new(tests, target, n_ancilla, n_system)
}

// ---------------------------------------------------------------------------
// prepare-and-measure strategies

pub fn pmpv_to_json(x: &PmpvStrategy) -> Value {
    json!({
        "d": x.d(),
        "entries": x
            .entries()
            .iter()
            .map(|e| {
                json!({
                    "input": state_spec_to_json(&e.input),
                    "p": e.p,
                    "pass_effect": state_spec_to_json(&e.effect),
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn pmpv_from_json(v: &Value) -> Result<PmpvStrategy> {
    let d = field_usize(v, "d")?;
    let entries = field_array(v, "entries")?
        .iter()
        .map(|ev| {
            let p = field_f64(ev, "p")?;
            let input = state_spec_from_json(field(ev, "input")?)?;
            let effect = state_spec_from_json(field(ev, "pass_effect")?)?;
            Ok(PmpvEntry { p, input, effect })
        })
        .collect::<Result<Vec<_>>>()?;
    let dims = entries
        .first()
        .map(|e: &PmpvEntry| e.input.dims().to_vec())
        .ok_or_else(|| Error::Parse("field `entries` is empty".into()))?;
    let declared: usize = dims.iter().product();
    if declared != d {
        return Err(Error::Parse(format!("field `d` is {d} but the entries live in dimension {declared}")));
    }
    PmpvStrategy::new(entries, dims)
}

// ---------------------------------------------------------------------------
// measurements

pub fn povm_to_json(m: &MeasurementModel) -> Value {
    json!({
        "dims": m.effects()[0].dims(),
        "effects": m.effects().iter().map(|e| matrix_to_json(e.matrix())).collect::<Vec<_>>(),
    })
}

pub fn povm_from_json(v: &Value) -> Result<MeasurementModel> {
    let dims = dims_from(v, "dims")?;
    let effects = field_array(v, "effects")?
        .iter()
        .map(|m| Operator::new(matrix_from_json(m)?, dims.clone()))
        .collect::<Result<Vec<_>>>()?;
    MeasurementModel::new(effects)
}

pub fn projective_target_to_json(t: &ProjectiveTarget) -> Value {
    json!({
        "basis": t
            .basis()
            .iter()
            .map(|s| state_spec_to_json(&s.projector()))
            .collect::<Vec<_>>(),
        "dims": t.basis()[0].dims(),
    })
}

pub fn projective_target_from_json(v: &Value) -> Result<ProjectiveTarget> {
    let dims = dims_from(v, "dims")?;
    let basis_field = field(v, "basis")?;
    if let Some(name) = basis_field.as_str() {
        if name == "computational" {
            return ProjectiveTarget::computational(dims);
        }
        return Err(Error::Parse(format!("field `basis`: unknown named basis {name:?}")));
    }
    let basis = basis_field
        .as_array()
        .ok_or_else(|| Error::Parse("field `basis` must be \"computational\" or a state list".into()))?
        .iter()
        .map(|s| {
            let op = state_spec_from_json(s)?;
            let spec = crate::tensor::eig_hermitian(&op, true)?;
            if (spec.largest() - 1.0).abs() > 1e-10 || (op.trace().re - 1.0).abs() > 1e-10 {
                return Err(Error::Parse("field `basis`: states must be pure".into()));
            }
            PureState::normalized(spec.eigenvector(0).unwrap(), dims.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectiveTarget::new(basis)
}

// ---------------------------------------------------------------------------
// results and reports

pub fn run_result_to_json(r: &RunResult) -> Value {
    json!({
        "empirical_pass_rate": r.empirical_pass_rate,
        "fails": r.fails,
        "passes": r.passes,
        "postselected_rounds": r.postselected_rounds,
        "rounds_executed": r.rounds_executed,
        "verdict": if r.verdict { "accept" } else { "reject" },
    })
}

pub fn run_result_from_json(v: &Value) -> Result<RunResult> {
    let passes = field(v, "passes")?
        .as_u64()
        .ok_or_else(|| Error::Parse("field `passes` must be a count".into()))?;
    let fails = field(v, "fails")?
        .as_u64()
        .ok_or_else(|| Error::Parse("field `fails` must be a count".into()))?;
    let postselected = match field(v, "postselected_rounds") {
        Ok(Value::Null) | Err(_) => None,
        Ok(x) => Some(
            x.as_u64()
                .ok_or_else(|| Error::Parse("field `postselected_rounds` must be a count or null".into()))?,
        ),
    };
    Ok(RunResult::from_counts(passes, fails, postselected))
}

pub fn report_to_json(r: &WorstCaseReport) -> Value {
    json!({
        "analytic": r.analytic,
        "degenerate_target": r.degenerate_target,
        "epsilon": r.epsilon,
        "maximizer": operator_to_json(&r.maximizer),
        "random_search_max": r.random_search_max,
        "subspace_max": r.subspace_max,
        "tp_search_max": r.tp_search_max,
    })
}
