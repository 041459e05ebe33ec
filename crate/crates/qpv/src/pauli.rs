//! Symbolic Pauli strings, Clifford circuits, stabilizer groups, and
//! hypergraph states.
//!
//! A Pauli string is stored as a pair of bit masks (X part, Z part) plus a
//! power of `i`, so products, commutators, and Clifford conjugation run in
//! O(1) word operations. Qubit `q` occupies mask bit `q`; in dense matrices
//! and state vectors qubit 0 is the most significant index bit, matching the
//! leftmost letter of the text form.

use num_complex::Complex64;

use crate::cap;
use crate::error::{Error, Result};
use crate::tensor::{Matrix, Operator, PureState, Vector, C64};

const PHASES: [C64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn pc(v: u64) -> u32 {
    v.count_ones()
}

/// Reverses the low `n` bits, converting qubit-indexed masks to
/// state-index-bit masks and back.
fn rev_bits(m: u64, n: usize) -> u64 {
    let mut r = 0u64;
    for q in 0..n {
        if m >> q & 1 == 1 {
            r |= 1 << (n - 1 - q);
        }
    }
    r
}

/// Signed multi-qubit Pauli operator `i^k * prod_q sigma(x_q, z_q)` where
/// `sigma(1,1)` is Y (the factor of `i` is folded in per qubit).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    k: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::invalid("pauli string", format!("{n} qubits unsupported")));
        }
        Ok(PauliString { n, x: 0, z: 0, k: 0 })
    }

    /// Builds from raw masks; bit `q` of each mask addresses qubit `q`.
    pub fn from_parts(n: usize, x: u64, z: u64, k: u8) -> Result<Self> {
        let mut p = PauliString::identity(n)?;
        let full = (1u64 << n) - 1;
        if x & !full != 0 || z & !full != 0 {
            return Err(Error::invalid("pauli string", "mask bit beyond qubit count"));
        }
        p.x = x;
        p.z = z;
        p.k = k % 4;
        Ok(p)
    }

    /// Single-letter operator at one qubit.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        let mut p = PauliString::identity(n)?;
        p.set_letter(q, letter)?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Phase exponent: the operator equals `i^k` times the unsigned body.
    pub fn phase_exponent(&self) -> u8 {
        self.k
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x >> q & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z >> q & 1 == 1
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn set_letter(&mut self, q: usize, letter: char) -> Result<()> {
        if q >= self.n {
            return Err(Error::invalid("pauli string", format!("qubit {q} out of range for {} qubits", self.n)));
        }
        let b = 1u64 << q;
        let (xb, zb) = match letter {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => return Err(Error::invalid("pauli string", format!("letter {letter:?} is not one of I X Y Z"))),
        };
        self.x = if xb { self.x | b } else { self.x & !b };
        self.z = if zb { self.z | b } else { self.z & !b };
        Ok(())
    }

    /// Parses text like `+ZXZX`, `-ZZYZZY`, or `+iXY`; the sign is optional
    /// and a Unicode minus is accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut chars: Vec<char> = text.trim().chars().collect();
        let mut k = 0u8;
        let mut pos = 0usize;
        if pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-' || chars[pos] == '\u{2212}') {
            if chars[pos] != '+' {
                k = 2;
            }
            pos += 1;
        }
        if pos < chars.len() && chars[pos] == 'i' {
            k = (k + 1) % 4;
            pos += 1;
        }
        chars.drain(..pos);
        if chars.is_empty() {
            return Err(Error::Parse(format!("pauli string {text:?} has no letters")));
        }
        let mut p = PauliString::identity(chars.len())?;
        p.k = k;
        for (q, &ch) in chars.iter().enumerate() {
            p.set_letter(q, ch).map_err(|e| Error::Parse(format!("pauli string {text:?}: {e}")))?;
        }
        Ok(p)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        pc(self.x | self.z) as usize
    }

    /// Mask of qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity_body(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Hermitian exactly when the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.k % 2 == 0
    }

    pub fn negated(&self) -> Self {
        PauliString { k: (self.k + 2) % 4, ..*self }
    }

    /// Group product; operands must act on the same qubit count.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::mismatch(format!("pauli product on {} vs {} qubits", self.n, other.n)));
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.k as u32 + other.k as u32 + pc(self.x & self.z) + pc(other.x & other.z) + 2 * pc(self.z & other.x)
            + 4 - pc(x & z) % 4)
            % 4;
        Ok(PauliString { n: self.n, x, z, k: k as u8 })
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        (pc(self.x & other.z) + pc(self.z & other.x)) % 2 == 0
    }

    /// Tensor product; `self` keeps qubits `0..n`, `other` is shifted above.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString> {
        let n = self.n + other.n;
        PauliString::from_parts(n, self.x | other.x << self.n, self.z | other.z << self.n, (self.k + other.k) % 4)
    }

    pub fn to_matrix(&self) -> Result<Operator> {
        let d = 1usize << self.n;
        cap::check_dim(d)?;
        let xi = rev_bits(self.x, self.n);
        let zi = rev_bits(self.z, self.n);
        let base = (self.k as u32 + pc(self.x & self.z)) % 4;
        let mut m = Matrix::zeros(d, d);
        for col in 0..d {
            let e = (base + 2 * pc(zi & col as u64)) % 4;
            m[(col ^ xi as usize, col)] = PHASES[e as usize];
        }
        Operator::new(m, vec![2; self.n])
    }

    /// Applies the operator to a state vector in O(d).
    pub fn apply(&self, v: &Vector) -> Vector {
        let d = v.len();
        let xi = rev_bits(self.x, self.n) as usize;
        let zi = rev_bits(self.z, self.n);
        let base = (self.k as u32 + pc(self.x & self.z)) % 4;
        let mut w = Vector::zeros(d);
        for col in 0..d {
            let e = (base + 2 * pc(zi & col as u64)) % 4;
            w[col ^ xi] = PHASES[e as usize] * v[col];
        }
        w
    }

    /// `<v|P|v>` without forming the matrix.
    pub fn expectation(&self, v: &Vector) -> C64 {
        let xi = rev_bits(self.x, self.n) as usize;
        let zi = rev_bits(self.z, self.n);
        let base = (self.k as u32 + pc(self.x & self.z)) % 4;
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..v.len() {
            let e = (base + 2 * pc(zi & col as u64)) % 4;
            acc += v[col ^ xi].conj() * PHASES[e as usize] * v[col];
        }
        acc
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefix = match self.k {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliString::parse(s)
    }
}

/// One elementary Clifford gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
}

/// Sequence of H, S, and CNOT gates on `n` qubits; the first listed gate acts
/// first.
#[derive(Clone, Debug)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::invalid("circuit", format!("{n} qubits unsupported")));
        }
        for g in &gates {
            let ok = match *g {
                Gate::H(q) | Gate::S(q) => q < n,
                Gate::Cnot(c, t) => c < n && t < n && c != t,
            };
            if !ok {
                return Err(Error::invalid("circuit", format!("gate {g:?} is out of range on {n} qubits")));
            }
        }
        Ok(CliffordCircuit { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Heisenberg conjugation `U P U^dag` by symplectic tableau update.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.n() != self.n {
            return Err(Error::mismatch(format!("conjugating a {}-qubit string through a {}-qubit circuit", p.n(), self.n)));
        }
        let mut x = p.x;
        let mut z = p.z;
        let mut k = p.k as u32;
        for g in &self.gates {
            match *g {
                Gate::H(q) => {
                    let b = 1u64 << q;
                    if x & b != 0 && z & b != 0 {
                        k += 2;
                    }
                    let xb = x & b;
                    let zb = z & b;
                    x = (x & !b) | zb;
                    z = (z & !b) | xb;
                }
                Gate::S(q) => {
                    let b = 1u64 << q;
                    if x & b != 0 {
                        if z & b != 0 {
                            k += 2;
                        }
                        z ^= b;
                    }
                }
                Gate::Cnot(c, t) => {
                    let bc = 1u64 << c;
                    let bt = 1u64 << t;
                    let xc = x & bc != 0;
                    let zc = z & bc != 0;
                    let xt = x & bt != 0;
                    let zt = z & bt != 0;
                    if xc && zt && xt == zc {
                        k += 2;
                    }
                    if xc {
                        x ^= bt;
                    }
                    if zt {
                        z ^= bc;
                    }
                }
            }
        }
        Ok(PauliString { n: self.n, x, z, k: (k % 4) as u8 })
    }

    /// Dense unitary of the whole circuit.
    pub fn unitary(&self) -> Result<Operator> {
        let d = 1usize << self.n;
        cap::check_dim(d)?;
        let mut m = Matrix::identity(d, d);
        let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for g in &self.gates {
            match *g {
                Gate::H(q) => {
                    let mask = 1usize << (self.n - 1 - q);
                    for col in 0..d {
                        for r in 0..d {
                            if r & mask == 0 {
                                let a = m[(r, col)];
                                let b = m[(r | mask, col)];
                                m[(r, col)] = (a + b) * inv_sqrt2;
                                m[(r | mask, col)] = (a - b) * inv_sqrt2;
                            }
                        }
                    }
                }
                Gate::S(q) => {
                    let mask = 1usize << (self.n - 1 - q);
                    for col in 0..d {
                        for r in 0..d {
                            if r & mask != 0 {
                                m[(r, col)] *= C64::new(0.0, 1.0);
                            }
                        }
                    }
                }
                Gate::Cnot(c, t) => {
                    let cm = 1usize << (self.n - 1 - c);
                    let tm = 1usize << (self.n - 1 - t);
                    for col in 0..d {
                        for r in 0..d {
                            if r & cm != 0 && r & tm == 0 {
                                let a = m[(r, col)];
                                m[(r, col)] = m[(r | tm, col)];
                                m[(r | tm, col)] = a;
                            }
                        }
                    }
                }
            }
        }
        let mut op = Operator::new(m, vec![2; self.n])?;
        op.verify_unitary();
        Ok(op)
    }
}

/// Independent, pairwise-commuting set of Hermitian Pauli generators.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<PauliString>,
}

fn body_pack(p: &PauliString) -> u128 {
    p.x as u128 | (p.z as u128) << 64
}

impl StabilizerGroup {
    pub fn new(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        for g in &gens {
            if g.n() != n {
                return Err(Error::mismatch(format!("generator {g} acts on {} qubits, group on {n}", g.n())));
            }
            if !g.is_hermitian() {
                return Err(Error::invalid("stabilizer group", format!("generator {g} is not Hermitian")));
            }
            if g.is_identity_body() {
                return Err(Error::invalid("stabilizer group", format!("generator {g} has identity body")));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !gens[i].commutes(&gens[j]) {
                    return Err(Error::invalid("stabilizer group", format!("generators {} and {} anticommute", gens[i], gens[j])));
                }
            }
        }
        // F2 independence of the (x, z) bodies.
        let mut pivots: Vec<u128> = Vec::new();
        for g in &gens {
            let mut r = body_pack(g);
            for &p in &pivots {
                let lead = 1u128 << (127 - p.leading_zeros());
                if r & lead != 0 {
                    r ^= p;
                }
            }
            if r == 0 {
                return Err(Error::invalid("stabilizer group", format!("generator {g} is a product of earlier generators")));
            }
            pivots.push(r);
            pivots.sort_by(|a, b| b.cmp(a));
        }
        Ok(StabilizerGroup { n, gens })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Exact membership, sign included.
    pub fn contains(&self, p: &PauliString) -> bool {
        if p.n() != self.n || !p.is_hermitian() {
            return false;
        }
        // Reduce the body over F2 while tracking which generators were used.
        let mut rows: Vec<(u128, u64)> = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let mut r = (body_pack(g), 1u64 << i);
            for &(pb, ps) in &rows {
                let lead = 1u128 << (127 - pb.leading_zeros());
                if r.0 & lead != 0 {
                    r.0 ^= pb;
                    r.1 ^= ps;
                }
            }
            if r.0 != 0 {
                rows.push(r);
                rows.sort_by_key(|row| std::cmp::Reverse(row.0));
            }
        }
        let mut t = (body_pack(p), 0u64);
        for &(pb, ps) in &rows {
            let lead = 1u128 << (127 - pb.leading_zeros());
            if t.0 & lead != 0 {
                t.0 ^= pb;
                t.1 ^= ps;
            }
        }
        if t.0 != 0 {
            return false;
        }
        let mut prod = PauliString::identity(self.n).unwrap();
        for (i, g) in self.gens.iter().enumerate() {
            if t.1 >> i & 1 == 1 {
                prod = prod.mul(g).unwrap();
            }
        }
        prod == *p
    }

    /// Same group as `other`, compared at the group level rather than by
    /// generator lists.
    pub fn equivalent(&self, other: &StabilizerGroup) -> bool {
        self.n == other.n
            && self.gens.len() == other.gens.len()
            && other.gens.iter().all(|g| self.contains(g))
    }

    /// Every element, as subset products of the generators.
    pub fn elements(&self) -> Result<Vec<PauliString>> {
        let m = self.gens.len();
        if m > 20 {
            return Err(Error::invalid("stabilizer group", format!("enumerating 2^{m} elements is unsupported")));
        }
        let mut out = Vec::with_capacity(1 << m);
        for mask in 0u64..(1 << m) {
            let mut prod = PauliString::identity(self.n)?;
            for (i, g) in self.gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prod = prod.mul(g)?;
                }
            }
            out.push(prod);
        }
        Ok(out)
    }
}

/// Dense projector `(1 + sign*P)/2` onto one eigenspace of a Hermitian
/// string.
pub fn eigenspace_projector(p: &PauliString, sign: i8) -> Result<Operator> {
    if !p.is_hermitian() {
        return Err(Error::invalid("eigenspace projector", format!("{p} is not Hermitian")));
    }
    if !matches!(sign, 1 | -1) {
        return Err(Error::invalid("eigenspace projector", "sign must be +1 or -1"));
    }
    let signed = if sign == 1 { *p } else { p.negated() };
    let op = stabilizer_projector(p.n(), &[signed])?;
    let flags = crate::tensor::Flags {
        hermitian: crate::tensor::Tri::Yes,
        unitary: crate::tensor::Tri::Unknown,
        projector: crate::tensor::Tri::Yes,
    };
    Ok(op.with_flags(flags))
}

/// Dense projector onto the joint +1 eigenspace of commuting Hermitian
/// strings.
pub fn stabilizer_projector(n: usize, gens: &[PauliString]) -> Result<Operator> {
    let d = 1usize << n;
    cap::check_dim(d)?;
    let mut m = Matrix::identity(d, d);
    let half = C64::new(0.5, 0.0);
    for g in gens {
        if g.n() != n {
            return Err(Error::mismatch(format!("projector on {n} qubits from a {}-qubit string", g.n())));
        }
        if !g.is_hermitian() {
            return Err(Error::invalid("projector", format!("{g} is not Hermitian")));
        }
        let gm = g.to_matrix()?;
        m = (&m + gm.matrix() * &m) * half;
    }
    Operator::new(m, vec![2; n])
}

/// Stabilizer generators of the (normalized) Choi state of a Clifford
/// circuit on `n` qubits: for each qubit `i`, the pair
/// `X_i (x) U X_i U^dag` and `Z_i (x) U Z_i U^dag` with the reference half
/// on qubits `0..n` and the output half on qubits `n..2n`.
pub fn choi_stabilizers(circuit: &CliffordCircuit) -> Result<Vec<PauliString>> {
    let n = circuit.n();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for letter in ['X', 'Z'] {
            let base = PauliString::single(n, i, letter)?;
            let sys = circuit.conjugate(&base)?;
            out.push(base.tensor(&sys)?);
        }
    }
    Ok(out)
}

/// Hypergraph on `n` vertices; each edge couples two or more vertices.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::invalid("hypergraph", format!("{n} vertices unsupported")));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut clean = Vec::with_capacity(edges.len());
        for e in edges {
            let mut e: Vec<usize> = e;
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                return Err(Error::invalid("hypergraph", "edges need at least two distinct vertices"));
            }
            if e.iter().any(|&v| v >= n) {
                return Err(Error::invalid("hypergraph", format!("edge {e:?} leaves the vertex range 0..{n}")));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::invalid("hypergraph", format!("duplicate edge {e:?}")));
            }
            clean.push(e);
        }
        Ok(Hypergraph { n, edges: clean })
    }

    /// Verification graph for the (n-1)-controlled-Z gate on `n_sys` qubits:
    /// vertices `0..n_sys` are the reference half, `n_sys..2n_sys` the output
    /// half, with pair edges `{i, n_sys+i}` and one edge over the whole
    /// output half.
    pub fn for_multi_cz(n_sys: usize) -> Result<Self> {
        if n_sys < 2 {
            return Err(Error::invalid("hypergraph", "the multi-controlled-Z graph needs at least two qubits"));
        }
        let mut edges: Vec<Vec<usize>> = (0..n_sys).map(|i| vec![i, n_sys + i]).collect();
        let top: Vec<usize> = (n_sys..2 * n_sys).collect();
        if !edges.contains(&top) {
            edges.push(top);
        }
        Hypergraph::new(2 * n_sys, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.iter().any(|e| e.contains(&u) && e.contains(&v))
    }

    /// The hypergraph state: uniform amplitudes with a sign flip for every
    /// fully-set edge.
    pub fn state(&self) -> Result<PureState> {
        let d = 1usize << self.n;
        cap::check_dim(d)?;
        let edge_masks: Vec<usize> = self.edges.iter().map(|e| e.iter().map(|&v| 1usize << (self.n - 1 - v)).sum()).collect();
        let amp = 1.0 / (d as f64).sqrt();
        let mut v = Vector::zeros(d);
        for idx in 0..d {
            let flips = edge_masks.iter().filter(|&&m| idx & m == m).count();
            v[idx] = C64::new(if flips % 2 == 0 { amp } else { -amp }, 0.0);
        }
        PureState::new(v, vec![2; self.n])
    }

    /// Applies the vertex stabilizer `K_v = X_v * prod_{e: v in e} CZ_{e - v}`
    /// to a state vector in O(d).
    pub fn stabilizer_apply(&self, v: usize, state: &Vector) -> Result<Vector> {
        if v >= self.n {
            return Err(Error::invalid("hypergraph", format!("vertex {v} out of range")));
        }
        let d = state.len();
        let bit = 1usize << (self.n - 1 - v);
        let rest_masks: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.contains(&v))
            .map(|e| e.iter().filter(|&&w| w != v).map(|&w| 1usize << (self.n - 1 - w)).sum())
            .collect();
        let mut out = Vector::zeros(d);
        for idx in 0..d {
            let flips = rest_masks.iter().filter(|&&m| idx & m == m).count();
            let s = if flips % 2 == 0 { 1.0 } else { -1.0 };
            out[idx ^ bit] += C64::new(s, 0.0) * state[idx];
        }
        Ok(out)
    }

    pub fn stabilizer_expectation(&self, v: usize, state: &Vector) -> Result<C64> {
        let kv = self.stabilizer_apply(v, state)?;
        Ok(state.dotc(&kv))
    }

    /// Greedy proper coloring by vertex index; vertices sharing an edge get
    /// different colors. Returns the color classes in color order.
    pub fn greedy_coloring(&self) -> Vec<Vec<usize>> {
        let mut color = vec![usize::MAX; self.n];
        let mut n_colors = 0;
        for v in 0..self.n {
            let used: std::collections::BTreeSet<usize> =
                (0..v).filter(|&u| self.adjacent(u, v)).map(|u| color[u]).collect();
            let c = (0..).find(|c| !used.contains(c)).unwrap();
            color[v] = c;
            n_colors = n_colors.max(c + 1);
        }
        let mut classes = vec![Vec::new(); n_colors];
        for v in 0..self.n {
            classes[color[v]].push(v);
        }
        classes
    }
}
