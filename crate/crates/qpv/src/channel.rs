//! Quantum processes: unitary and Kraus representations, Choi matrices in
//! both directions, fidelity measures, and a small noise-model zoo.
//!
//! The Choi matrix is kept unnormalized, `Y = sum_{k,l} |k><l| (x) E(|k><l|)`,
//! so `Tr Y = d` flags trace preservation directly; normalization happens
//! only in [`QuantumProcess::choi_state`].

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::tensor::{self, Matrix, Operator, PureState, Vector, C64, TOL_EIGEN};

/// Representation of a quantum process.
#[derive(Clone, Debug)]
pub enum ProcessKind {
    Unitary(Operator),
    Kraus(Vec<Matrix>),
}

/// A completely positive map, trace-preserving or trace-nonincreasing.
#[derive(Clone, Debug)]
pub struct QuantumProcess {
    kind: ProcessKind,
    dims_in: Vec<usize>,
    dims_out: Vec<usize>,
    trace_preserving: bool,
}

impl QuantumProcess {
    pub fn unitary(u: Operator) -> Result<Self> {
        let mut u = u;
        if !u.verify_unitary() {
            return Err(Error::invalid("process", "matrix is not unitary"));
        }
        let dims = u.dims().to_vec();
        Ok(QuantumProcess { kind: ProcessKind::Unitary(u), dims_in: dims.clone(), dims_out: dims, trace_preserving: true })
    }

    /// Builds from Kraus operators mapping `dims_in` to `dims_out`; the sum
    /// `sum K^dag K` may fall below the identity (losses) but never exceed it.
    pub fn kraus(ops: Vec<Matrix>, dims_in: Vec<usize>, dims_out: Vec<usize>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::invalid("process", "empty Kraus list"));
        }
        let d_in: usize = dims_in.iter().product();
        let d_out: usize = dims_out.iter().product();
        crate::cap::check_dim(d_in.max(d_out))?;
        for k in &ops {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(Error::mismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    d_out,
                    d_in
                )));
            }
        }
        let mut total = Matrix::zeros(d_in, d_in);
        for k in &ops {
            total += k.adjoint() * k;
        }
        let total_op = Operator::new(total, dims_in.clone())?;
        let spec = tensor::eig_hermitian(&total_op, false)?;
        if spec.largest() > 1.0 + TOL_EIGEN {
            return Err(Error::invalid("process", format!("trace-increasing: sum K^dag K has eigenvalue {}", spec.largest())));
        }
        if *spec.eigenvalues.last().unwrap() < -TOL_EIGEN {
            return Err(Error::invalid("process", "sum K^dag K is not positive semidefinite"));
        }
        let ident = Matrix::identity(d_in, d_in);
        let tp = total_op.matrix().iter().zip(ident.iter()).all(|(a, b)| (a - b).norm() <= TOL_EIGEN);
        Ok(QuantumProcess { kind: ProcessKind::Kraus(ops), dims_in, dims_out, trace_preserving: tp })
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn dims_in(&self) -> &[usize] {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &[usize] {
        &self.dims_out
    }

    pub fn d_in(&self) -> usize {
        self.dims_in.iter().product()
    }

    pub fn d_out(&self) -> usize {
        self.dims_out.iter().product()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// The Kraus operators (a unitary is its own single element).
    pub fn kraus_operators(&self) -> Vec<Matrix> {
        match &self.kind {
            ProcessKind::Unitary(u) => vec![u.matrix().clone()],
            ProcessKind::Kraus(ks) => ks.clone(),
        }
    }

    /// Unnormalized Choi matrix on reference (x) output.
    pub fn choi_matrix(&self) -> Result<Operator> {
        let d_in = self.d_in();
        let d_out = self.d_out();
        let d = d_in
            .checked_mul(d_out)
            .ok_or_else(|| Error::invalid("choi matrix", "dimension overflow"))?;
        crate::cap::check_dim(d)?;
        let mut m = Matrix::zeros(d, d);
        for k in self.kraus_operators() {
            let mut v = Vector::zeros(d);
            for col in 0..d_in {
                for row in 0..d_out {
                    v[col * d_out + row] = k[(row, col)];
                }
            }
            m += &v * v.adjoint();
        }
        let mut dims = self.dims_in.clone();
        dims.extend_from_slice(&self.dims_out);
        Operator::new(m, dims)
    }

    /// Normalized Choi state; for trace-decreasing processes this is the
    /// postselected output.
    pub fn choi_state(&self) -> Result<Operator> {
        let y = self.choi_matrix()?;
        let tr = y.trace();
        if tr.re <= 1e-12 {
            return Err(Error::NullProcess);
        }
        Ok(y.scale(C64::new(1.0 / tr.re, 0.0)))
    }

    /// Pure Choi state of a unitary or single-Kraus process.
    pub fn choi_pure_state(&self) -> Result<PureState> {
        let ks = self.kraus_operators();
        if ks.len() != 1 {
            return Err(Error::invalid("choi state", "not pure: more than one Kraus operator"));
        }
        let k = &ks[0];
        let d_in = self.d_in();
        let d_out = self.d_out();
        let mut v = Vector::zeros(d_in * d_out);
        for col in 0..d_in {
            for row in 0..d_out {
                v[col * d_out + row] = k[(row, col)];
            }
        }
        let mut dims = self.dims_in.clone();
        dims.extend_from_slice(&self.dims_out);
        PureState::normalized(v, dims)
    }

    /// `sum_j K_j rho K_j^dag`, unnormalized for trace-decreasing processes.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.d_in() {
            return Err(Error::mismatch(format!("state dim {} vs process input dim {}", rho.dim(), self.d_in())));
        }
        let mut m = Matrix::zeros(self.d_out(), self.d_out());
        for k in self.kraus_operators() {
            m += &k * rho.matrix() * k.adjoint();
        }
        Operator::new(m, self.dims_out.clone())
    }

    /// Normalized output together with the success probability.
    pub fn apply_postselected(&self, rho: &Operator) -> Result<(Operator, f64)> {
        let out = self.apply(rho)?;
        let p = out.trace().re;
        if p <= 1e-12 {
            return Err(Error::ZeroSuccess(format!("output trace {p} after postselection")));
        }
        Ok((out.scale(C64::new(1.0 / p, 0.0)), p))
    }

    /// The same map evaluated through the Choi matrix,
    /// `Tr_A[(rho^T (x) 1) Y]`; used as an independent cross-check.
    pub fn apply_via_choi(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.d_in() {
            return Err(Error::mismatch(format!("state dim {} vs process input dim {}", rho.dim(), self.d_in())));
        }
        let y = self.choi_matrix()?;
        let ident = Operator::identity(self.dims_out.clone())?;
        let lhs = rho.transpose().kron(&ident)?;
        let n_in = self.dims_in.len();
        let n_all = n_in + self.dims_out.len();
        let prod = Operator::new(lhs.matrix() * y.matrix(), y.dims().to_vec())?;
        prod.partial_trace(&(n_in..n_all).collect::<Vec<_>>())
    }

    /// Sequential composition: `self` runs after `earlier`.
    pub fn compose_after(&self, earlier: &QuantumProcess) -> Result<QuantumProcess> {
        if earlier.d_out() != self.d_in() {
            return Err(Error::mismatch(format!(
                "composing output dim {} into input dim {}",
                earlier.d_out(),
                self.d_in()
            )));
        }
        let mut ops = Vec::new();
        for a in self.kraus_operators() {
            for b in earlier.kraus_operators() {
                ops.push(&a * &b);
            }
        }
        QuantumProcess::kraus(ops, earlier.dims_in.clone(), self.dims_out.clone())
    }

    /// Overlap of this process's (normalized) Choi state with the pure Choi
    /// state of `target`.
    pub fn entanglement_fidelity(&self, target: &QuantumProcess) -> Result<f64> {
        if self.d_in() != target.d_in() || self.d_out() != target.d_out() {
            return Err(Error::mismatch("entanglement fidelity needs matching dimensions"));
        }
        let sigma = target.choi_state()?;
        let purity = (sigma.matrix() * sigma.matrix()).diagonal().sum().re;
        if (purity - 1.0).abs() > 1e-8 {
            return Err(Error::invalid("entanglement fidelity", format!("target Choi state is not pure (purity {purity})")));
        }
        let rho = self.choi_state()?;
        Ok((rho.matrix() * sigma.matrix()).diagonal().sum().re)
    }
}

/// Affine conversion from entanglement fidelity to average gate fidelity.
pub fn average_gate_fidelity(f_e: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&f_e) {
        return Err(Error::invalid("average gate fidelity", format!("entanglement fidelity {f_e} outside [0,1]")));
    }
    if d < 2 {
        return Err(Error::invalid("average gate fidelity", format!("dimension {d} below 2")));
    }
    Ok((d as f64 * f_e + 1.0) / (d as f64 + 1.0))
}

/// Parameterized noise models attachable to a target process.
#[derive(Clone, Debug)]
pub enum NoiseSpec {
    /// Global depolarizing on the full output space.
    Depolarizing { p: f64 },
    /// Extra rotation `exp(-i angle/2 * axis)` after the target.
    Overrotation { axis: PauliString, angle: f64 },
    /// Qubit amplitude damping toward `|0>`.
    AmplitudeDamping { gamma: f64 },
    /// A trace-decreasing filter applied after the target.
    LossyFilter { k: Matrix },
}

/// Pure noise process on the given subsystem layout.
pub fn noise_process(spec: &NoiseSpec, dims: &[usize]) -> Result<QuantumProcess> {
    let d: usize = dims.iter().product();
    match spec {
        NoiseSpec::Depolarizing { p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::invalid("noise", format!("depolarizing probability {p} outside [0,1]")));
            }
            let mut ops = Vec::with_capacity(1 + d * d);
            ops.push(Matrix::identity(d, d) * C64::new((1.0 - p).sqrt(), 0.0));
            let amp = C64::new((p / d as f64).sqrt(), 0.0);
            for i in 0..d {
                for j in 0..d {
                    let mut k = Matrix::zeros(d, d);
                    k[(i, j)] = amp;
                    ops.push(k);
                }
            }
            QuantumProcess::kraus(ops, dims.to_vec(), dims.to_vec())
        }
        NoiseSpec::Overrotation { axis, angle } => {
            if 1usize << axis.n() != d {
                return Err(Error::mismatch(format!("rotation axis on {} qubits vs dimension {d}", axis.n())));
            }
            if !axis.is_hermitian() {
                return Err(Error::invalid("noise", "rotation axis must be Hermitian"));
            }
            let p = axis.to_matrix()?;
            let half = angle / 2.0;
            let r = Matrix::identity(d, d) * C64::new(half.cos(), 0.0) + p.matrix() * C64::new(0.0, -half.sin());
            QuantumProcess::unitary(Operator::new(r, dims.to_vec())?)
        }
        NoiseSpec::AmplitudeDamping { gamma } => {
            if !(0.0..=1.0).contains(gamma) {
                return Err(Error::invalid("noise", format!("damping rate {gamma} outside [0,1]")));
            }
            if d != 2 {
                return Err(Error::invalid("noise", "amplitude damping is defined on one qubit"));
            }
            let mut k0 = Matrix::identity(2, 2);
            k0[(1, 1)] = C64::new((1.0 - gamma).sqrt(), 0.0);
            let mut k1 = Matrix::zeros(2, 2);
            k1[(0, 1)] = C64::new(gamma.sqrt(), 0.0);
            QuantumProcess::kraus(vec![k0, k1], dims.to_vec(), dims.to_vec())
        }
        NoiseSpec::LossyFilter { k } => {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::mismatch(format!("filter is {}x{}, expected {d}x{d}", k.nrows(), k.ncols())));
            }
            QuantumProcess::kraus(vec![k.clone()], dims.to_vec(), dims.to_vec())
        }
    }
}

/// Composes the noise after the target: `noise o target`.
pub fn make_noise(target: &QuantumProcess, spec: &NoiseSpec) -> Result<QuantumProcess> {
    let noise = noise_process(spec, target.dims_out())?;
    noise.compose_after(target)
}
