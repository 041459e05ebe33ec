//! Dense complex tensor algebra over explicitly factorized subsystems.
//!
//! Operators and pure states carry an ordered list of subsystem dimensions
//! alongside their dense entries, so Kronecker products, partial traces, and
//! partial transposes always know which factor they touch. All values are
//! immutable after construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cap;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Tolerance for structural checks (Hermiticity, norms, trace preservation).
pub const TOL_STRUCT: f64 = 1e-12;
/// Tolerance for spectral checks (projector idempotence, eigen residuals).
pub const TOL_EIGEN: f64 = 1e-10;

/// Tri-state structural flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Tri {
    Yes,
    No,
    #[default]
    Unknown,
}

/// Structural flags carried by an [`Operator`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Flags {
    pub hermitian: Tri,
    pub unitary: Tri,
    pub projector: Tri,
}

/// Dense complex square matrix with a declared tensor factorization.
#[derive(Clone, Debug)]
pub struct Operator {
    entries: Matrix,
    dims: Vec<usize>,
    flags: Flags,
}

fn dims_product(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::invalid("dims", "subsystem dimensions must be nonzero and nonempty"));
    }
    let mut p: usize = 1;
    for &d in dims {
        p = p
            .checked_mul(d)
            .ok_or_else(|| Error::invalid("dims", "dimension product overflows"))?;
    }
    Ok(p)
}

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl Operator {
    /// Wraps a square matrix with subsystem dimensions; Hermiticity is
    /// detected eagerly, unitarity and idempotence stay unknown.
    pub fn new(entries: Matrix, dims: Vec<usize>) -> Result<Self> {
        let d = dims_product(&dims)?;
        cap::check_dim(d)?;
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::mismatch(format!(
                "matrix is {}x{} but dims {:?} give {}",
                entries.nrows(),
                entries.ncols(),
                dims,
                d
            )));
        }
        let hermitian = if max_abs_diff(&entries, &entries.adjoint()) <= TOL_STRUCT {
            Tri::Yes
        } else {
            Tri::No
        };
        Ok(Operator { entries, dims, flags: Flags { hermitian, ..Flags::default() } })
    }

    /// Identity operator on the given factorization.
    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let d = dims_product(&dims)?;
        cap::check_dim(d)?;
        let mut op = Operator::new(Matrix::identity(d, d), dims)?;
        op.flags = Flags { hermitian: Tri::Yes, unitary: Tri::Yes, projector: Tri::Yes };
        Ok(op)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// Asserts flags the caller has established by construction.
    pub(crate) fn with_flags(mut self, flags: Flags) -> Operator {
        self.flags = flags;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.flags.hermitian == Tri::Yes
    }

    /// Checks idempotence and Hermiticity, recording the result in the flags.
    pub fn verify_projector(&mut self) -> bool {
        let p2 = &self.entries * &self.entries;
        let ok = self.is_hermitian() && max_abs_diff(&p2, &self.entries) <= TOL_EIGEN;
        self.flags.projector = if ok { Tri::Yes } else { Tri::No };
        ok
    }

    /// Checks `U^dag U = 1`, recording the result in the flags.
    pub fn verify_unitary(&mut self) -> bool {
        let g = self.entries.adjoint() * &self.entries;
        let ok = max_abs_diff(&g, &Matrix::identity(self.dim(), self.dim())) <= TOL_EIGEN;
        self.flags.unitary = if ok { Tri::Yes } else { Tri::No };
        ok
    }

    pub fn trace(&self) -> C64 {
        self.entries.diagonal().sum()
    }

    pub fn adjoint(&self) -> Operator {
        Operator { entries: self.entries.adjoint(), dims: self.dims.clone(), flags: self.flags }
    }

    /// Full transpose; subsystem structure is unchanged.
    pub fn transpose(&self) -> Operator {
        Operator {
            entries: self.entries.transpose(),
            dims: self.dims.clone(),
            flags: Flags { hermitian: self.flags.hermitian, ..Flags::default() },
        }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let hermitian = if self.flags.hermitian == Tri::Yes && s.im.abs() <= TOL_STRUCT { Tri::Yes } else { Tri::Unknown };
        Operator {
            entries: &self.entries * s,
            dims: self.dims.clone(),
            flags: Flags { hermitian, ..Flags::default() },
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.dims != other.dims {
            return Err(Error::mismatch(format!("adding dims {:?} to {:?}", other.dims, self.dims)));
        }
        Operator::new(&self.entries + &other.entries, self.dims.clone())
    }

    /// Kronecker product; the result's factorization is the concatenation.
    pub fn kron(&self, other: &Operator) -> Result<Operator> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let d = dims_product(&dims)?;
        cap::check_dim(d)?;
        let entries = self.entries.kronecker(&other.entries);
        let and = |a: Tri, b: Tri| if a == Tri::Yes && b == Tri::Yes { Tri::Yes } else { Tri::Unknown };
        let flags = Flags {
            hermitian: and(self.flags.hermitian, other.flags.hermitian),
            unitary: and(self.flags.unitary, other.flags.unitary),
            projector: and(self.flags.projector, other.flags.projector),
        };
        Ok(Operator { entries, dims, flags })
    }

    fn check_subsystems(&self, subsystems: &[usize]) -> Result<Vec<usize>> {
        let mut s: Vec<usize> = subsystems.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != subsystems.len() {
            return Err(Error::invalid("subsystems", "repeated subsystem index"));
        }
        if s.iter().any(|&i| i >= self.dims.len()) {
            return Err(Error::invalid("subsystems", format!("index out of range for {} factors", self.dims.len())));
        }
        Ok(s)
    }

    /// Traces out every subsystem not listed in `keep`; kept factors retain
    /// their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let keep = self.check_subsystems(keep)?;
        let n = self.dims.len();
        let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        let strides = {
            let mut s = vec![1usize; n];
            for i in (0..n.saturating_sub(1)).rev() {
                s[i] = s[i + 1] * self.dims[i + 1];
            }
            s
        };
        let dk: usize = keep.iter().map(|&i| self.dims[i]).product();
        let dt: usize = traced.iter().map(|&i| self.dims[i]).product();
        let unpack = |mut lin: usize, subs: &[usize]| -> usize {
            // Maps a linear index over `subs` to a full-space offset.
            let mut off = 0;
            for &s in subs.iter().rev() {
                off += (lin % self.dims[s]) * strides[s];
                lin /= self.dims[s];
            }
            off
        };
        let mut out = Matrix::zeros(dk.max(1), dk.max(1));
        for i in 0..dk.max(1) {
            let ri = unpack(i, &keep);
            for j in 0..dk.max(1) {
                let cj = unpack(j, &keep);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..dt.max(1) {
                    let ot = unpack(t, &traced);
                    acc += self.entries[(ri + ot, cj + ot)];
                }
                out[(i, j)] = acc;
            }
        }
        let dims_out: Vec<usize> =
            if keep.is_empty() { vec![1] } else { keep.iter().map(|&i| self.dims[i]).collect() };
        Operator::new(out, dims_out)
    }

    /// Transposes the listed subsystems in place of the others.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<Operator> {
        let subs = self.check_subsystems(subsystems)?;
        let n = self.dims.len();
        let strides = {
            let mut s = vec![1usize; n];
            for i in (0..n.saturating_sub(1)).rev() {
                s[i] = s[i + 1] * self.dims[i + 1];
            }
            s
        };
        let d = self.dim();
        let mut out = Matrix::zeros(d, d);
        let decode = |lin: usize| -> Vec<usize> {
            let mut idx = vec![0usize; n];
            for k in 0..n {
                idx[k] = (lin / strides[k]) % self.dims[k];
            }
            idx
        };
        for r in 0..d {
            let ri = decode(r);
            for c in 0..d {
                let ci = decode(c);
                let mut sr = 0usize;
                let mut sc = 0usize;
                for k in 0..n {
                    let (a, b) = if subs.contains(&k) { (ci[k], ri[k]) } else { (ri[k], ci[k]) };
                    sr += a * strides[k];
                    sc += b * strides[k];
                }
                out[(sr, sc)] = self.entries[(r, c)];
            }
        }
        Operator::new(out, self.dims.clone())
    }

    /// Largest entrywise distance to another operator.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }
}

/// Unit-norm complex vector with a declared tensor factorization.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: Vector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vector, dims: Vec<usize>) -> Result<Self> {
        let d = dims_product(&dims)?;
        cap::check_dim(d)?;
        if amplitudes.len() != d {
            return Err(Error::mismatch(format!("vector has {} entries but dims {:?} give {}", amplitudes.len(), dims, d)));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_STRUCT {
            return Err(Error::invalid("state", format!("norm is {norm}, expected 1")));
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amplitudes: Vector, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= TOL_STRUCT {
            return Err(Error::invalid("state", "cannot normalize the zero vector"));
        }
        PureState::new(amplitudes / C64::new(norm, 0.0), dims)
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Rank-one projector onto this state.
    pub fn projector(&self) -> Operator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Operator {
            entries: m,
            dims: self.dims.clone(),
            flags: Flags { hermitian: Tri::Yes, unitary: Tri::Unknown, projector: Tri::Yes },
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Fixes the global phase so the largest-magnitude amplitude is real
    /// positive; deterministic canonical form for comparisons.
    pub fn phase_canonical(&self) -> PureState {
        let mut best = 0usize;
        let mut mag = -1.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > mag + TOL_STRUCT {
                mag = a.norm();
                best = i;
            }
        }
        let a = self.amplitudes[best];
        if a.norm() <= TOL_STRUCT {
            return self.clone();
        }
        let rot = a.conj() / a.norm();
        PureState { amplitudes: &self.amplitudes * rot, dims: self.dims.clone() }
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Matrix>,
}

impl Spectrum {
    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn second_largest(&self) -> f64 {
        self.eigenvalues[1]
    }

    /// Column of the eigenvector matrix as a state-sized vector.
    pub fn eigenvector(&self, k: usize) -> Option<Vector> {
        self.eigenvectors.as_ref().map(|m| m.column(k).into_owned())
    }
}

/// Dense self-adjoint eigendecomposition with descending eigenvalues and a
/// deterministic phase convention on eigenvectors.
pub fn eig_hermitian(op: &Operator, want_vectors: bool) -> Result<Spectrum> {
    if !op.is_hermitian() {
        return Err(Error::invalid("operator", "eig_hermitian requires a Hermitian input"));
    }
    // Symmetrize to remove rounding-level asymmetry before factorizing.
    let sym = (op.matrix() + op.matrix().adjoint()).scale(0.5);
    let d = sym.nrows();
    let se = sym.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap().then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let eigenvectors = if want_vectors {
        let mut m = Matrix::zeros(d, d);
        for (k, &i) in order.iter().enumerate() {
            let col = se.eigenvectors.column(i);
            // Phase convention: largest-magnitude entry real positive.
            let mut best = 0usize;
            let mut mag = -1.0;
            for (r, a) in col.iter().enumerate() {
                if a.norm() > mag + TOL_STRUCT {
                    mag = a.norm();
                    best = r;
                }
            }
            let a = col[best];
            let rot = if a.norm() > TOL_STRUCT { a.conj() / a.norm() } else { C64::new(1.0, 0.0) };
            for r in 0..d {
                m[(r, k)] = col[r] * rot;
            }
        }
        for (k, &lambda) in eigenvalues.iter().enumerate().take(d) {
            let v = m.column(k).into_owned();
            let mv = &sym * &v;
            let lv = &v * C64::new(lambda, 0.0);
            let resid = (mv - lv).norm();
            if resid > TOL_EIGEN * (1.0 + sym.norm()) {
                return Err(Error::invalid("eigendecomposition", format!("residual {resid} for eigenvalue {lambda}")));
            }
        }
        Some(m)
    } else {
        None
    };
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Validates that `rho` is a density matrix: Hermitian, unit trace, PSD.
pub fn check_density(rho: &Operator) -> Result<()> {
    if !rho.is_hermitian() {
        return Err(Error::invalid("density matrix", "not Hermitian"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TOL_EIGEN || tr.im.abs() > TOL_EIGEN {
        return Err(Error::invalid("density matrix", format!("trace is {tr}, expected 1")));
    }
    let spec = eig_hermitian(rho, false)?;
    if *spec.eigenvalues.last().unwrap() < -TOL_EIGEN {
        return Err(Error::invalid("density matrix", format!("negative eigenvalue {}", spec.eigenvalues.last().unwrap())));
    }
    Ok(())
}

/// Overlap of a density matrix with a pure state.
pub fn state_fidelity(rho: &Operator, phi: &PureState) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::mismatch(format!("operator dim {} vs state dim {}", rho.dim(), phi.dim())));
    }
    check_density(rho)?;
    Ok(overlap(rho, phi))
}

/// Unchecked overlap `<phi|rho|phi>`; the caller vouches for `rho`.
pub fn overlap(rho: &Operator, phi: &PureState) -> f64 {
    let v = phi.amplitudes();
    let rv = rho.matrix() * v;
    v.dotc(&rv).re
}
