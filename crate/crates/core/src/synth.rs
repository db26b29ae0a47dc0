//! End-to-end synthesis of an `n`-qubit unitary `U`.
//!
//! The output circuit simulates `U` through the flag wire: on
//! `|1⟩_flag ⊗ |b⟩` it produces `|0⟩_flag ⊗ U|b⟩`, with the clean ancilla
//! returned to `|0⟩`. Wire layout: flag `q[0]`, data `q[1..=n]`, clean
//! ancilla `q[n+1]`, then the split wire (approximate mode with `n = 1`)
//! and the spare borrowed wire (reflections on four or more qubits).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{simulate_columns, Circuit, Gate, GateStats, Role, DEFAULT_WIDTH_CAP};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, reflection_distance_bound, FloatMatrix, RingMatrix, RingVector};
use crate::multicontrol::Wires;
use crate::reflections::{
    embedded_unitary, householder_decompose, householder_decompose_float, synthesize_reflection_on,
};
use crate::rounding::{choose_precision, round_unit_vector, split_reflection, zero_slots, RoundingPlan};
use crate::ring::RingScalar;

pub const FLAG_CONVENTION: &str =
    "flag q[0] enters |1> and leaves |0>; data q[1..=n] receives U; ancillas start and end in their registered state";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReflectionReport {
    /// 1-based column of `U`.
    pub index: usize,
    /// `Some(h)` for the half `|h⟩|ψ⟩` of a reflection split over the extra wire.
    pub half: Option<u8>,
    pub m: Option<u32>,
    pub sde: u32,
    /// Contribution to the triangle-inequality bound (approximate mode).
    pub bound: Option<f64>,
    pub stats: GateStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisReport {
    pub mode: Mode,
    pub qubits: usize,
    pub dim: usize,
    pub reflection_count: usize,
    pub reflections: Vec<ReflectionReport>,
    pub stats: GateStats,
    pub width: usize,
    pub roles: Vec<Role>,
    /// Wires other than data and flag.
    pub ancilla_count: usize,
    pub exact_equality: Option<bool>,
    pub verified: bool,
    /// Certified Frobenius distance; zero in exact mode.
    pub distance: Option<f64>,
    pub eps: Option<f64>,
    /// Largest rounding precision used.
    pub m: Option<u32>,
    pub bound_sum: Option<f64>,
    /// `total / (4^n · n · (log₂(1/ε) + n))`.
    pub implied_constant: Option<f64>,
    pub seed: Option<u64>,
    pub flag_convention: String,
}

impl SynthesisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SynthOptions {
    /// Re-simulate the output before returning it.
    pub verify: bool,
    pub width_cap: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            verify: true,
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }
}

struct Layout {
    n: usize,
    split: Option<usize>,
    spare: Option<usize>,
    width: usize,
}

impl Layout {
    fn new(n: usize, split: bool, largest_reflection: usize) -> Self {
        let mut next = n + 2;
        let split = split.then(|| {
            next += 1;
            next - 1
        });
        let spare = Wires::needs_spare(largest_reflection).then(|| {
            next += 1;
            next - 1
        });
        Self {
            n,
            split,
            spare,
            width: next,
        }
    }

    fn ancilla(&self) -> usize {
        self.n + 1
    }

    fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Data; self.width];
        roles[0] = Role::Flag;
        roles[self.ancilla()] = Role::AncillaClean;
        for w in self.split.into_iter().chain(self.spare) {
            roles[w] = Role::AncillaBorrowed;
        }
        roles
    }

    fn wires(&self, split_half: bool) -> Wires {
        let mut data: Vec<usize> = (0..=self.n).collect();
        if split_half {
            data.insert(0, self.split.expect("split wire allocated"));
        }
        Wires {
            data,
            ancilla: self.ancilla(),
            spare: self.spare,
        }
    }

    /// Basis index with flag+data register `x`, ancilla `|0⟩`, split wire
    /// `s` and spare `sp`.
    fn index(&self, x: usize, s: usize, sp: usize) -> usize {
        let shift = |w: usize| self.width - 1 - w;
        let mut i = x << shift(self.n);
        if let Some(w) = self.split {
            i |= s << shift(w);
        }
        if let Some(w) = self.spare {
            i |= sp << shift(w);
        }
        i
    }
}

fn qubits_of(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(2),
            found: dim,
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

fn assemble(roles: &[Role], parts: Vec<Vec<Gate>>) -> Result<(Circuit, Vec<GateStats>)> {
    let mut circuit = Circuit::with_roles(roles.to_vec());
    let mut stats = Vec::with_capacity(parts.len());
    for gates in parts {
        let part = Circuit::from_gates(roles.to_vec(), gates)?;
        stats.push(part.stats());
        circuit.extend(part.gates().iter().copied())?;
    }
    Ok((circuit, stats))
}

pub fn exact_synthesize(u: &RingMatrix) -> Result<(Circuit, SynthesisReport)> {
    exact_synthesize_with(u, &SynthOptions::default())
}

/// Exact synthesis of `U' = |0⟩⟨1| ⊗ U + |1⟩⟨0| ⊗ U†` as a product of
/// `2^n` synthesized reflections.
pub fn exact_synthesize_with(u: &RingMatrix, opts: &SynthOptions) -> Result<(Circuit, SynthesisReport)> {
    let n = qubits_of(u.dim())?;
    let dec = householder_decompose(u)?;
    let layout = Layout::new(n, false, n + 1);
    let roles = layout.roles();
    let wires = layout.wires(false);
    let parts = dec
        .reflections
        .par_iter()
        .map(|r| synthesize_reflection_on(&r.vector, &wires))
        .collect::<Result<Vec<_>>>()?;
    let (circuit, stats) = assemble(&roles, parts)?;

    let exact_equality = if opts.verify {
        verify_exact(&circuit, &layout, &embedded_unitary(u), opts.width_cap)?;
        Some(true)
    } else {
        None
    };
    let reflections = dec
        .reflections
        .iter()
        .zip(stats)
        .map(|(r, stats)| ReflectionReport {
            index: r.column + 1,
            half: None,
            m: None,
            sde: r.vector.sde(),
            bound: None,
            stats,
        })
        .collect();
    let report = SynthesisReport {
        mode: Mode::Exact,
        qubits: n,
        dim: u.dim(),
        reflection_count: dec.reflections.len(),
        reflections,
        stats: circuit.stats(),
        width: circuit.width(),
        ancilla_count: circuit.ancilla_count(),
        roles,
        exact_equality,
        verified: opts.verify,
        distance: opts.verify.then_some(0.0),
        eps: None,
        m: None,
        bound_sum: None,
        implied_constant: None,
        seed: None,
        flag_convention: FLAG_CONVENTION.into(),
    };
    Ok((circuit, report))
}

/// Columns with ancilla `|0⟩` and the spare in both states must match `U'`.
fn verify_exact(c: &Circuit, layout: &Layout, target: &RingMatrix, cap: usize) -> Result<()> {
    let spare_states: &[usize] = if layout.spare.is_some() { &[0, 1] } else { &[0] };
    let dim = target.dim();
    for &sp in spare_states {
        let inputs: Vec<usize> = (0..dim).map(|x| layout.index(x, 0, sp)).collect();
        let cols = simulate_columns(c, &inputs, cap)?;
        for (x, col) in cols.iter().enumerate() {
            let mut expected = vec![RingScalar::zero(); col.dim()];
            for r in 0..dim {
                expected[layout.index(r, 0, sp)] = target.get(r, x).clone();
            }
            if col != &RingVector(expected) {
                return Err(Error::Verification(format!(
                    "column {x} (spare {sp}) differs from U'"
                )));
            }
        }
    }
    Ok(())
}

struct Job {
    column: usize,
    half: Option<u8>,
    vector: Vec<Complex64>,
    eps: f64,
    /// Factor converting the reflection bound into the accounting over
    /// the split wire as well.
    weight: f64,
}

pub fn approx_synthesize(u: &FloatMatrix, eps: f64, seed: u64) -> Result<(Circuit, SynthesisReport)> {
    approx_synthesize_with(u, eps, seed, &SynthOptions::default())
}

/// Approximate synthesis: each reflection vector is rounded to the ring at
/// precision `2^{−n}·ε` and synthesized exactly. Vectors with fewer than two
/// zero coordinates are split over an extra wire into two halves that each
/// get `2^{−n}·ε/2`.
pub fn approx_synthesize_with(
    u: &FloatMatrix,
    eps: f64,
    seed: u64,
    opts: &SynthOptions,
) -> Result<(Circuit, SynthesisReport)> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let n = qubits_of(u.dim())?;
    let dec = householder_decompose_float(u)?;
    let eps_j = eps / (1u64 << n) as f64;
    let needs_split = dec.reflections.iter().any(|r| zero_slots(&r.vector).is_none());

    let mut jobs = Vec::new();
    for r in &dec.reflections {
        if zero_slots(&r.vector).is_some() {
            let weight = if needs_split { std::f64::consts::SQRT_2 } else { 1.0 };
            jobs.push(Job {
                column: r.column,
                half: None,
                vector: r.vector.clone(),
                eps: eps_j / weight,
                weight,
            });
        } else {
            let (lo, hi) = split_reflection(&r.vector);
            for (half, vector) in [(1u8, hi), (0u8, lo)] {
                jobs.push(Job {
                    column: r.column,
                    half: Some(half),
                    vector,
                    eps: eps_j / 2.0,
                    weight: 1.0,
                });
            }
        }
    }
    let largest = if needs_split { n + 2 } else { n + 1 };
    let layout = Layout::new(n, needs_split, largest);
    let roles = layout.roles();

    let rounded = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let qubits = job.vector.len().trailing_zeros() as usize;
            let mut plan = RoundingPlan::for_vector(&job.vector, job.eps)?;
            plan.m = choose_precision(qubits, job.eps)?;
            let phi = round_unit_vector(&job.vector, &plan, derive_seed(seed, i))?;
            let bound = job.weight * reflection_distance_bound(&job.vector, &phi)?;
            let gates = synthesize_reflection_on(&phi, &layout.wires(job.half.is_some()))?;
            Ok((plan.m, phi.sde(), bound, gates))
        })
        .collect::<Result<Vec<_>>>()?;

    let (circuit, stats) = assemble(&roles, rounded.iter().map(|r| r.3.clone()).collect())?;
    let reflections: Vec<ReflectionReport> = jobs
        .iter()
        .zip(&rounded)
        .zip(stats)
        .map(|((job, r), stats)| ReflectionReport {
            index: job.column + 1,
            half: job.half,
            m: Some(r.0),
            sde: r.1,
            bound: Some(r.2),
            stats,
        })
        .collect();
    let bound_sum: f64 = reflections.iter().filter_map(|r| r.bound).sum();
    let m = reflections.iter().filter_map(|r| r.m).max();

    let distance = if opts.verify {
        let d = certify(&circuit, &layout, u, opts.width_cap)?;
        if d > eps {
            return Err(Error::Certification { distance: d, eps });
        }
        Some(d)
    } else {
        None
    };
    let total = circuit.len() as f64;
    let scale = 4f64.powi(n as i32) * n as f64 * ((1.0 / eps).log2() + n as f64);
    let report = SynthesisReport {
        mode: Mode::Approx,
        qubits: n,
        dim: u.dim(),
        reflection_count: dec.reflections.len(),
        reflections,
        stats: circuit.stats(),
        width: circuit.width(),
        ancilla_count: circuit.ancilla_count(),
        roles,
        exact_equality: None,
        verified: opts.verify,
        distance,
        eps: Some(eps),
        m,
        bound_sum: Some(bound_sum),
        implied_constant: Some(total / scale),
        seed: Some(seed),
        flag_convention: FLAG_CONVENTION.into(),
    };
    Ok((circuit, report))
}

fn derive_seed(seed: u64, job: usize) -> u64 {
    seed ^ (job as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// The `flag 1 → 0`, ancilla `0 → 0` block for a given split-wire state.
pub fn extract_block(c: &Circuit, n: usize, split_state: usize, cap: usize) -> Result<RingMatrix> {
    let layout = layout_of(c, n)?;
    block(c, &layout, split_state, cap)
}

fn layout_of(c: &Circuit, n: usize) -> Result<Layout> {
    let roles = c.roles();
    if roles.len() < n + 2 || roles[0] != Role::Flag || roles[n + 1] != Role::AncillaClean {
        return Err(Error::CircuitMismatch("not a synthesized circuit layout".into()));
    }
    let borrowed: Vec<usize> = (n + 2..roles.len()).collect();
    let (split, spare) = match borrowed.len() {
        0 => (None, None),
        // for n ≥ 2 every reflection vector has spare zeros, so no split wire
        1 if n == 1 => (Some(borrowed[0]), None),
        1 => (None, Some(borrowed[0])),
        _ => (Some(borrowed[0]), Some(borrowed[1])),
    };
    Ok(Layout {
        n,
        split,
        spare,
        width: roles.len(),
    })
}

fn block(c: &Circuit, layout: &Layout, s: usize, cap: usize) -> Result<RingMatrix> {
    let dim = 1usize << layout.n;
    let inputs: Vec<usize> = (0..dim).map(|b| layout.index(dim + b, s, 0)).collect();
    let cols = simulate_columns(c, &inputs, cap)?;
    RingMatrix::from_columns(
        cols.into_iter()
            .map(|col| RingVector((0..dim).map(|r| col.0[layout.index(r, s, 0)].clone()).collect()))
            .collect(),
    )
}

fn certify(c: &Circuit, layout: &Layout, u: &FloatMatrix, cap: usize) -> Result<f64> {
    let states: &[usize] = if layout.split.is_some() { &[0, 1] } else { &[0] };
    let mut worst: f64 = 0.0;
    for &s in states {
        let b = block(c, layout, s, cap)?;
        worst = worst.max(frobenius_distance(u, &b)?);
    }
    Ok(worst)
}

/// Certified distance between `U` and the block a synthesized circuit
/// implements, maximized over the split-wire state when there is one.
pub fn certified_distance(c: &Circuit, u: &FloatMatrix, cap: usize) -> Result<f64> {
    let n = qubits_of(u.dim())?;
    let layout = layout_of(c, n)?;
    certify(c, &layout, u, cap)
}
