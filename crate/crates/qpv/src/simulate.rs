//! Seeded Monte Carlo execution of verification runs.
//!
//! Rounds draw from a counter-keyed ChaCha stream (root seed fixes the key,
//! the round index selects the stream), so results are bit-for-bit
//! reproducible regardless of how rounds might be scheduled. Outcome
//! probabilities are computed exactly from the dense operators; probabilities
//! within 1e-12 of 0 or 1 are snapped so ideal targets pass every round with
//! no statistical slack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::QuantumProcess;
use crate::error::{Error, Result};
use crate::pmpv::PmpvStrategy;
use crate::strategy::{confidence, AapvStrategy, Test};
use crate::tensor::{Matrix, Operator, Vector, C64};

const SNAP: f64 = 1e-12;

/// How each round's pass/fail is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Bernoulli draw on the exact test-projector expectation.
    Projector,
    /// Sample every single-qubit measurement outcome, then apply the
    /// classical pass rule.
    LocalSequential,
}

/// Round count, RNG key, and sampling mode for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub rounds: u64,
    pub rng_seed: u64,
    pub mode: SamplingMode,
}

impl RunConfig {
    pub fn new(rounds: u64, rng_seed: u64, mode: SamplingMode) -> Result<Self> {
        if rounds < 1 {
            return Err(Error::invalid("run configuration", "at least one round is required"));
        }
        Ok(RunConfig { rounds, rng_seed, mode })
    }
}

/// Counts and verdict of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rounds_executed: u64,
    pub passes: u64,
    pub fails: u64,
    /// Attempted preparations for trace-decreasing processes (every attempt
    /// that produced no output still consumed a preparation); absent for
    /// trace-preserving runs.
    pub postselected_rounds: Option<u64>,
    /// Accepted exactly when no round failed.
    pub verdict: bool,
    pub empirical_pass_rate: f64,
}

impl RunResult {
    pub(crate) fn from_counts(passes: u64, fails: u64, postselected_rounds: Option<u64>) -> RunResult {
        let rounds = passes + fails;
        RunResult {
            rounds_executed: rounds,
            passes,
            fails,
            postselected_rounds,
            verdict: fails == 0,
            empirical_pass_rate: if rounds == 0 { 0.0 } else { passes as f64 / rounds as f64 },
        }
    }

    /// Confidence bound claimable after an accepting run: the chance that a
    /// process with infidelity at least `epsilon` passes all rounds.
    pub fn delta_bound_at(&self, epsilon: f64, nu: f64) -> Result<f64> {
        if !self.verdict {
            return Ok(1.0);
        }
        confidence(epsilon, nu, self.rounds_executed)
    }
}

/// The confidence figure of a finished run: `(1 - eps*nu)^N` when accepted,
/// 1 (no claim) otherwise.
pub fn verdict_and_confidence(r: &RunResult, epsilon: f64, nu: f64) -> Result<f64> {
    r.delta_bound_at(epsilon, nu)
}

fn bernoulli(rng: &mut ChaCha8Rng, q: f64) -> bool {
    if q >= 1.0 - SNAP {
        true
    } else if q <= SNAP {
        false
    } else {
        rng.gen::<f64>() < q
    }
}

fn sample_weighted(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let total = *cumulative.last().unwrap();
    let x = u * total;
    cumulative.iter().position(|&c| x < c).unwrap_or(cumulative.len() - 1)
}

fn cumulative_weights<T>(items: &[T], weight: impl Fn(&T) -> f64) -> Vec<f64> {
    let mut acc = 0.0;
    items
        .iter()
        .map(|it| {
            acc += weight(it);
            acc
        })
        .collect()
}

/// Exact joint distribution of a test's local outcomes on `rho`: entry `b`
/// is the probability of the outcome bitstring `b` (leftmost qubit = most
/// significant bit). Entries below 1e-12 are zeroed and the rest
/// renormalized.
fn outcome_table(test: &Test, rho: &Operator) -> Result<Vec<f64>> {
    let settings = test.local_settings()?;
    let n = settings.len();
    let d = 1usize << n;
    if rho.dim() != d {
        return Err(Error::mismatch("state dimension does not match the test"));
    }
    let bases: Vec<Matrix> = settings.iter().map(|b| b.vectors()).collect();
    let mut table = Vec::with_capacity(d);
    let mut total = 0.0;
    for b in 0..d {
        let mut v = Vector::from_element(1, C64::new(1.0, 0.0));
        for (q, basis) in bases.iter().enumerate() {
            let bit = (b >> (n - 1 - q)) & 1;
            let col = basis.column(bit);
            let mut next = Vector::zeros(v.len() * 2);
            for (i, amp) in v.iter().enumerate() {
                next[2 * i] = amp * col[0];
                next[2 * i + 1] = amp * col[1];
            }
            v = next;
        }
        let p = (v.adjoint() * rho.matrix() * &v)[(0, 0)].re;
        let p = if p < SNAP { 0.0 } else { p };
        total += p;
        table.push(p);
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("outcome table", format!("probabilities sum to {total}")));
    }
    for p in &mut table {
        *p /= total;
    }
    Ok(table)
}

fn trace_product(a: &Operator, b: &Operator) -> f64 {
    let (am, bm) = (a.matrix(), b.matrix());
    let d = am.nrows();
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            sum += am[(i, j)] * bm[(j, i)];
        }
    }
    sum.re
}

/// One local-measurement round: samples each qubit's outcome in its setting
/// basis from the exact conditional distribution given the earlier outcomes,
/// then applies the test's classical pass rule.
pub fn local_round(test: &Test, rho_out: &Operator, rng: &mut ChaCha8Rng) -> Result<(bool, Vec<u8>)> {
    let settings = test.local_settings()?;
    let n = settings.len();
    if rho_out.dim() != 1usize << n {
        return Err(Error::mismatch("state dimension does not match the test"));
    }
    let mut rho = rho_out.matrix().clone();
    let mut bits = Vec::with_capacity(n);
    for (q, basis) in settings.iter().enumerate() {
        let vectors = basis.vectors();
        // Projector on outcome 0 of qubit q, identity elsewhere.
        let col = vectors.column(0);
        let qubit_proj = Operator::new(col * col.adjoint(), vec![2])?;
        let mut proj: Option<Operator> = None;
        for k in 0..n {
            let factor = if k == q { qubit_proj.clone() } else { Operator::identity(vec![2])? };
            proj = Some(match proj {
                None => factor,
                Some(p) => p.kron(&factor)?,
            });
        }
        let proj = proj.unwrap().into_matrix();
        let p0 = (&proj * &rho).trace().re.clamp(0.0, 1.0);
        let outcome = if bernoulli(rng, p0) { 0u8 } else { 1u8 };
        bits.push(outcome);
        let effective = if outcome == 0 {
            proj
        } else {
            Matrix::identity(1 << n, 1 << n) - proj
        };
        let weight = if outcome == 0 { p0 } else { 1.0 - p0 };
        if weight <= SNAP {
            // Conditioning on a zero-probability branch cannot happen with
            // snapped sampling; keep the state unchanged defensively.
            continue;
        }
        rho = (&effective * rho * &effective) / C64::new(weight, 0.0);
    }
    Ok((test.passes(&bits)?, bits))
}

/// Runs the ancilla-assisted protocol: each round draws a test, measures it
/// on the (fixed) output Choi state of the process, and records pass/fail.
pub fn simulate_aapv(s: &AapvStrategy, e: &QuantumProcess, cfg: &RunConfig) -> Result<RunResult> {
    if !e.is_trace_preserving() {
        return Err(Error::invalid(
            "ancilla-assisted run",
            "process does not preserve trace; verify it through the prepare-and-measure route",
        ));
    }
    if e.d_in() != 1usize << s.n_ancilla() || e.d_out() != 1usize << s.n_system() {
        return Err(Error::mismatch(format!(
            "process dimensions {}x{} do not match the strategy's {} ancilla + {} system qubits",
            e.d_in(),
            e.d_out(),
            s.n_ancilla(),
            s.n_system()
        )));
    }
    let rho_out = e.choi_state()?;
    let tests = s.tests();
    let cumulative = cumulative_weights(tests, |(p, _)| *p);

    enum Sampler {
        PassProb(Vec<f64>),
        Tables(Vec<Vec<f64>>),
    }
    let sampler = match cfg.mode {
        SamplingMode::Projector => Sampler::PassProb(
            tests
                .iter()
                .map(|(_, t)| Ok(trace_product(t.projector()?, &rho_out)))
                .collect::<Result<Vec<f64>>>()?,
        ),
        SamplingMode::LocalSequential => Sampler::Tables(
            tests.iter().map(|(_, t)| outcome_table(t, &rho_out)).collect::<Result<Vec<_>>>()?,
        ),
    };

    let n_bits = s.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let (mut passes, mut fails) = (0u64, 0u64);
    let mut bits = vec![0u8; n_bits];
    for round in 0..cfg.rounds {
        rng.set_stream(round);
        rng.set_word_pos(0);
        let i = sample_weighted(&mut rng, &cumulative);
        let pass = match &sampler {
            Sampler::PassProb(q) => bernoulli(&mut rng, q[i]),
            Sampler::Tables(tables) => {
                let table = &tables[i];
                let cum: Vec<f64> = {
                    // Tables are small; rebuild the cumulative sum on the fly
                    // to keep the cache layout simple.
                    let mut acc = 0.0;
                    table
                        .iter()
                        .map(|p| {
                            acc += p;
                            acc
                        })
                        .collect()
                };
                let outcome = sample_weighted(&mut rng, &cum);
                for (q, b) in bits.iter_mut().enumerate().take(n_bits) {
                    *b = ((outcome >> (n_bits - 1 - q)) & 1) as u8;
                }
                tests[i].1.passes(&bits)?
            }
        };
        if pass {
            passes += 1;
        } else {
            fails += 1;
        }
    }
    Ok(RunResult::from_counts(passes, fails, None))
}

/// Runs the prepare-and-measure protocol. For trace-decreasing processes,
/// attempts that produce no output are discarded (counted separately) and
/// sampling continues until `cfg.rounds` output rounds were measured.
pub fn simulate_pmpv(x: &PmpvStrategy, e: &QuantumProcess, cfg: &RunConfig) -> Result<RunResult> {
    if e.d_in() != x.d() {
        return Err(Error::mismatch(format!(
            "process input dimension {} does not match strategy dimension {}",
            e.d_in(),
            x.d()
        )));
    }
    let entries = x.entries();
    let cumulative = cumulative_weights(entries, |en| en.p);
    // Per entry: probability of any output, and pass probability given output.
    let mut output_probs = Vec::with_capacity(entries.len());
    let mut pass_probs = Vec::with_capacity(entries.len());
    for entry in entries {
        let out = e.apply(&entry.input)?;
        let o = out.trace().re.clamp(0.0, 1.0);
        let q = if o <= SNAP { 0.0 } else { trace_product(&out, &entry.effect) / o };
        output_probs.push(o);
        pass_probs.push(q.clamp(0.0, 1.0));
    }
    let trace_preserving = e.is_trace_preserving();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let (mut passes, mut fails) = (0u64, 0u64);
    let mut attempts = 0u64;
    let attempt_cap = cfg.rounds.saturating_mul(10_000);
    while passes + fails < cfg.rounds {
        if attempts >= attempt_cap {
            return Err(Error::ZeroSuccess(format!(
                "no output in {attempts} attempted preparations; cannot reach {} rounds",
                cfg.rounds
            )));
        }
        rng.set_stream(attempts);
        rng.set_word_pos(0);
        attempts += 1;
        let i = sample_weighted(&mut rng, &cumulative);
        if !trace_preserving && !bernoulli(&mut rng, output_probs[i]) {
            continue;
        }
        if bernoulli(&mut rng, pass_probs[i]) {
            passes += 1;
        } else {
            fails += 1;
        }
    }
    let postselected = if trace_preserving { None } else { Some(attempts) };
    Ok(RunResult::from_counts(passes, fails, postselected))
}
