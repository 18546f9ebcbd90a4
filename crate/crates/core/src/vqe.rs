//! Variational quantum eigensolver on an exact statevector.
//!
//! The trial state is the hardware-efficient Ry form: a layer of Ry rotations
//! on `|0...0>`, followed by `depth` repetitions of an all-pairs CX entangler
//! and another Ry layer. Angles are optimized by a quasi-Newton (BFGS) method
//! with central finite-difference gradients, restarted from seeded random
//! points; the lowest energy found is the variational estimate.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelHamiltonian;
use crate::oscillator::HermitianOperator;
use crate::pauli::PauliSum;

pub const DEFAULT_DEPTH: usize = 3;
pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_MAX_ITERATIONS: usize = 600;
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    /// CX between every ordered pair `i < j`.
    Full,
    /// CX between neighbours `(i, i+1)`.
    Linear,
}

impl std::str::FromStr for Entanglement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Entanglement::Full),
            "linear" => Ok(Entanglement::Linear),
            other => Err(Error::Parse(format!("unknown entanglement '{other}'"))),
        }
    }
}

impl std::fmt::Display for Entanglement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Entanglement::Full => "full",
            Entanglement::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: u32,
    pub depth: usize,
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(n_qubits: u32, depth: usize, entanglement: Entanglement) -> Self {
        Self {
            n_qubits,
            depth,
            entanglement,
        }
    }

    /// Depth-3 fully entangled form.
    pub fn full(n_qubits: u32) -> Self {
        Self::new(n_qubits, DEFAULT_DEPTH, Entanglement::Full)
    }

    pub fn num_parameters(&self) -> usize {
        self.n_qubits as usize * (self.depth + 1)
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// (control, target) pairs of one entangler block, in application order.
    pub fn entangler_pairs(&self) -> Vec<(u32, u32)> {
        let n = self.n_qubits;
        match self.entanglement {
            Entanglement::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }
}

/// Rotation angles, layer-major: `angles[layer * n_qubits + qubit]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self(vec![0.0; spec.num_parameters()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

// Qubit q acts on amplitude-index bit (n - 1 - q), matching the Pauli text order.
fn bit_of(n_qubits: u32, q: u32) -> usize {
    1usize << (n_qubits - 1 - q)
}

fn ry_real(state: &mut [f64], bit: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    for i in 0..state.len() {
        if i & bit == 0 {
            let (a0, a1) = (state[i], state[i | bit]);
            state[i] = c * a0 - s * a1;
            state[i | bit] = s * a0 + c * a1;
        }
    }
}

fn cx_real(state: &mut [f64], control: usize, target: usize) {
    for i in 0..state.len() {
        if i & control != 0 && i & target == 0 {
            state.swap(i, i | target);
        }
    }
}

fn check_params(spec: &AnsatzSpec, params: &[f64]) -> Result<()> {
    if params.len() != spec.num_parameters() {
        return Err(Error::DimensionMismatch {
            expected: spec.num_parameters(),
            actual: params.len(),
        });
    }
    Ok(())
}

// Ry and CX are real, so the whole circuit stays in real amplitudes.
fn simulate_into(spec: &AnsatzSpec, params: &[f64], state: &mut [f64]) {
    let n = spec.n_qubits;
    state.iter_mut().for_each(|a| *a = 0.0);
    state[0] = 1.0;
    let pairs = spec.entangler_pairs();
    let mut angles = params.chunks_exact(n as usize);
    for (q, &theta) in angles.next().expect("first layer").iter().enumerate() {
        ry_real(state, bit_of(n, q as u32), theta);
    }
    for layer in angles {
        for &(c, t) in &pairs {
            cx_real(state, bit_of(n, c), bit_of(n, t));
        }
        for (q, &theta) in layer.iter().enumerate() {
            ry_real(state, bit_of(n, q as u32), theta);
        }
    }
}

/// Statevector of the ansatz circuit applied to `|0...0>`.
pub fn apply_ansatz(spec: &AnsatzSpec, params: &ParameterVector) -> Result<Vec<Complex64>> {
    check_params(spec, params.as_slice())?;
    let mut state = vec![0.0; spec.dim()];
    simulate_into(spec, params.as_slice(), &mut state);
    Ok(state.into_iter().map(|a| Complex64::new(a, 0.0)).collect())
}

/// Anything with a well-defined expectation value on a normalized state.
pub trait Observable {
    fn dim(&self) -> usize;
    fn expectation(&self, state: &[Complex64]) -> Result<f64>;
}

impl Observable for PauliSum {
    fn dim(&self) -> usize {
        PauliSum::dim(self)
    }
    fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        PauliSum::expectation(self, state)
    }
}

impl Observable for HermitianOperator {
    fn dim(&self) -> usize {
        HermitianOperator::dim(self)
    }
    fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        self.quadratic_form(state)
    }
}

impl Observable for ModelHamiltonian {
    fn dim(&self) -> usize {
        self.operator.dim()
    }
    fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        self.operator.quadratic_form(state)
    }
}

/// Energy of the ansatz state.
pub fn energy<O: Observable + ?Sized>(
    spec: &AnsatzSpec,
    params: &ParameterVector,
    h: &O,
) -> Result<f64> {
    if h.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: h.dim(),
        });
    }
    let state = apply_ansatz(spec, params)?;
    h.expectation(&state)
}

/// Real-symmetric copy of a Hamiltonian for the optimizer's inner loop.
#[derive(Debug, Clone)]
struct RealEnergy {
    spec: AnsatzSpec,
    matrix: Vec<f64>,
}

impl RealEnergy {
    fn new(spec: AnsatzSpec, h: &HermitianOperator) -> Result<Self> {
        if h.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                actual: h.dim(),
            });
        }
        // imaginary parts cannot contribute for real amplitudes
        Ok(Self {
            spec,
            matrix: h.real_entries(),
        })
    }

    fn eval(&self, params: &[f64], state: &mut [f64]) -> f64 {
        simulate_into(&self.spec, params, state);
        let d = state.len();
        let mut acc = 0.0;
        for (j, row) in self.matrix.chunks_exact(d).enumerate() {
            let hv: f64 = row.iter().zip(state.iter()).map(|(h, a)| h * a).sum();
            acc += state[j] * hv;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Gradient-norm convergence threshold.
    pub tolerance: f64,
    pub fd_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: 1e-6,
            fd_step: FD_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    Stagnation,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub value: f64,
    pub point: Vec<f64>,
    /// Every objective evaluation in order, gradient probes included.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

struct Counted<F> {
    f: F,
    trace: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.f)(x);
        self.trace.push(v);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                evaluation: self.trace.len(),
            });
        }
        Ok(v)
    }

    fn gradient(&mut self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut probe = x.to_vec();
        let mut g = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            probe[i] = x[i] + h;
            let up = self.call(&probe)?;
            probe[i] = x[i] - h;
            let down = self.call(&probe)?;
            probe[i] = x[i];
            g.push((up - down) / (2.0 * h));
        }
        Ok(g)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Quasi-Newton descent with BFGS inverse-Hessian updates, Armijo
/// backtracking and central finite-difference gradients.
pub fn minimize<F>(objective: F, initial: &[f64], opts: &MinimizeOptions) -> Result<MinimizeResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if opts.max_iterations == 0 {
        return Err(Error::InvalidParameter(
            "max_iterations must be >= 1".into(),
        ));
    }
    let n = initial.len();
    let mut f = Counted {
        f: objective,
        trace: Vec::new(),
    };
    let mut x = initial.to_vec();
    let mut fx = f.call(&x)?;
    let mut g = f.gradient(&x, opts.fd_step)?;
    let mut hinv = identity(n);
    let mut stop = StopReason::IterationLimit;
    let mut iterations = 0;
    let mut flat_steps = 0;

    while iterations < opts.max_iterations {
        if dot(&g, &g).sqrt() < opts.tolerance {
            stop = StopReason::GradientTolerance;
            break;
        }
        iterations += 1;

        let mut dir: Vec<f64> = (0..n)
            .map(|i| -dot(&hinv[i * n..(i + 1) * n], &g))
            .collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            hinv = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut accepted = None;
        for attempt in 0..2 {
            let mut alpha = 1.0;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
                let ft = f.call(&trial)?;
                if ft <= fx + 1e-4 * alpha * slope {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= 0.5;
            }
            if accepted.is_some() || attempt == 1 {
                break;
            }
            // curvature model went bad; retry along steepest descent
            hinv = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let Some((x_new, f_new)) = accepted else {
            stop = StopReason::Stagnation;
            break;
        };

        let g_new = f.gradient(&x_new, opts.fd_step)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }

        let decrease = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if decrease <= 1e-15 * fx.abs().max(1.0) {
            flat_steps += 1;
            if flat_steps >= 3 {
                stop = StopReason::Stagnation;
                break;
            }
        } else {
            flat_steps = 0;
        }
    }
    if stop == StopReason::IterationLimit && dot(&g, &g).sqrt() < opts.tolerance {
        stop = StopReason::GradientTolerance;
    }

    Ok(MinimizeResult {
        value: fx,
        point: x,
        trace: f.trace,
        iterations,
        stop,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub minimize: MinimizeOptions,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            minimize: MinimizeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub energy: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub best_energy: f64,
    pub best_angles: ParameterVector,
    /// Evaluation trace of the restart that produced `best_energy`.
    pub trace: Vec<f64>,
    /// Traces of all restarts, in restart order.
    pub traces: Vec<Vec<f64>>,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    /// Iterations of the best restart.
    pub iterations_used: usize,
    pub exact_reference: Option<f64>,
}

impl VqeResult {
    /// Smallest energy across every recorded evaluation of every restart.
    pub fn min_recorded(&self) -> f64 {
        self.traces
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `evaluation,energy` CSV of the best restart's trace.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "evaluation,energy")?;
        for (i, e) in self.trace.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, e)?;
        }
        Ok(())
    }
}

/// Seeded starting points, uniform in `[-pi, pi]`.
pub fn initial_points(spec: &AnsatzSpec, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-PI, PI);
    (0..restarts)
        .map(|_| {
            (0..spec.num_parameters())
                .map(|_| dist.sample(&mut rng))
                .collect()
        })
        .collect()
}

/// Multi-start VQE; restarts run in parallel and are merged by
/// `(energy, restart index)`, so the result depends only on the seed.
pub fn run_vqe(
    h: &ModelHamiltonian,
    ansatz: &AnsatzSpec,
    opts: &VqeOptions,
    exact_reference: Option<f64>,
) -> Result<VqeResult> {
    if h.n_qubits != ansatz.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits as usize,
            actual: ansatz.n_qubits as usize,
        });
    }
    run_vqe_on(&h.operator, ansatz, opts, exact_reference)
}

/// [`run_vqe`] for a bare operator.
pub fn run_vqe_on(
    op: &HermitianOperator,
    ansatz: &AnsatzSpec,
    opts: &VqeOptions,
    exact_reference: Option<f64>,
) -> Result<VqeResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be >= 1".into()));
    }
    let evaluator = RealEnergy::new(*ansatz, op)?;
    let starts = initial_points(ansatz, opts.restarts, opts.seed);
    let runs: Vec<MinimizeResult> = starts
        .par_iter()
        .map(|x0| {
            let mut buf = vec![0.0; ansatz.dim()];
            minimize(|p| evaluator.eval(p, &mut buf), x0, &opts.minimize)
        })
        .collect::<Result<_>>()?;

    let best_restart = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let restarts = runs
        .iter()
        .enumerate()
        .map(|(index, r)| RestartSummary {
            index,
            energy: r.value,
            iterations: r.iterations,
            evaluations: r.trace.len(),
            stop: r.stop,
        })
        .collect();
    let best = &runs[best_restart];
    Ok(VqeResult {
        best_energy: best.value,
        best_angles: ParameterVector(best.point.clone()),
        trace: best.trace.clone(),
        best_restart,
        iterations_used: best.iterations,
        restarts,
        traces: runs.into_iter().map(|r| r.trace).collect(),
        exact_reference,
    })
}
