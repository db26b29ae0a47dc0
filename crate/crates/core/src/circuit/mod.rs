//! Clifford+T circuits: the primitive gate alphabet, a per-wire role
//! registry, gate statistics, exact simulation and OpenQASM 2.0 I/O.
//!
//! Qubit 0 is the most significant bit of a basis index, so on a width-`w`
//! circuit qubit `q` carries the bit `1 << (w − 1 − q)`.

mod qasm;
mod simulate;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RingMatrix;
use crate::ring::RingScalar;

pub use qasm::{export_qasm, export_qasm_with_notes, parse_qasm};
pub use simulate::{
    apply_to_state, exact_simulate, simulate_columns, simulate_with_cap, DEFAULT_WIDTH_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    T(usize),
    Tdg(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    /// OpenQASM mnemonic.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::X(_) => "x",
            Gate::Z(_) => "z",
            Gate::Cnot { .. } => "cx",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::X(q)
            | Gate::Z(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::T(q) => Gate::Tdg(q),
            Gate::Tdg(q) => Gate::T(q),
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    pub fn is_t_type(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    /// Exact matrix on the gate's own qubits (control before target for CNOT).
    pub fn matrix(&self) -> RingMatrix {
        let one = RingScalar::one;
        let zero = RingScalar::zero;
        let diag = |l: i64| RingMatrix::diagonal(vec![one(), RingScalar::omega_pow(l)]);
        match self {
            Gate::H(_) => {
                let h = RingScalar::inv_sqrt2();
                RingMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), -h]])
                    .expect("square")
            }
            Gate::T(_) => diag(1),
            Gate::Tdg(_) => diag(7),
            Gate::S(_) => diag(2),
            Gate::Sdg(_) => diag(6),
            Gate::Z(_) => diag(4),
            Gate::X(_) => RingMatrix::from_rows(vec![vec![zero(), one()], vec![one(), zero()]])
                .expect("square"),
            Gate::Cnot { .. } => RingMatrix::from_rows(vec![
                vec![one(), zero(), zero(), zero()],
                vec![zero(), one(), zero(), zero()],
                vec![zero(), zero(), zero(), one()],
                vec![zero(), zero(), one(), zero()],
            ])
            .expect("square"),
        }
    }

    fn check(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(q) = qs.iter().find(|&&q| q >= width) {
            return Err(Error::InvalidQubits(format!(
                "{self} uses qubit {q} on a width-{width} circuit"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidQubits(format!(
                "cx control and target coincide on qubit {}",
                qs[0]
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Cnot { control, target } => write!(f, "cx q[{control}],q[{target}]"),
            g => write!(f, "{} q[{}]", g.name(), g.qubits()[0]),
        }
    }
}

/// What a wire is used for.
///
/// `Flag` enters in `|1⟩` and leaves in `|0⟩` when the circuit simulates a
/// unitary through its block embedding; `AncillaClean` starts and ends in
/// `|0⟩`; `AncillaBorrowed` may hold any state and is restored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Data,
    Flag,
    AncillaClean,
    AncillaBorrowed,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Data => "data",
            Role::Flag => "flag",
            Role::AncillaClean => "ancilla-clean",
            Role::AncillaBorrowed => "ancilla-borrowed",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "data" => Some(Role::Data),
            "flag" => Some(Role::Flag),
            "ancilla-clean" => Some(Role::AncillaClean),
            "ancilla-borrowed" => Some(Role::AncillaBorrowed),
            _ => None,
        }
    }

    pub fn is_ancilla(&self) -> bool {
        matches!(self, Role::AncillaClean | Role::AncillaBorrowed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    roles: Vec<Role>,
}

impl Circuit {
    /// Empty circuit whose wires are all data.
    pub fn new(width: usize) -> Self {
        Self::with_roles(vec![Role::Data; width])
    }

    pub fn with_roles(roles: Vec<Role>) -> Self {
        Self {
            width: roles.len(),
            gates: Vec::new(),
            roles,
        }
    }

    pub fn from_gates(roles: Vec<Role>, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::with_roles(roles);
        c.extend(gates)?;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn set_role(&mut self, qubit: usize, role: Role) {
        self.roles[qubit] = role;
    }

    pub fn wires_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.width).filter(|&q| self.roles[q] == role).collect()
    }

    pub fn ancilla_count(&self) -> usize {
        self.roles.iter().filter(|r| r.is_ancilla()).count()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// `self` followed by `other`; simulates to `sim(other)·sim(self)`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(Error::CircuitMismatch(format!(
                "widths {} and {}",
                self.width, other.width
            )));
        }
        if self.roles != other.roles {
            return Err(Error::CircuitMismatch("role registries differ".into()));
        }
        let mut out = self.clone();
        out.gates.extend_from_slice(&other.gates);
        Ok(out)
    }

    /// Reversed gate order with `T ↔ Tdg` and `S ↔ Sdg`.
    pub fn invert(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            roles: self.roles.clone(),
        }
    }

    pub fn stats(&self) -> GateStats {
        GateStats::of(self)
    }
}

/// Gate tallies. `S`, `Sdg` and `Z` are primitive Clifford gates and do not
/// contribute to the T-count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateStats {
    pub total: usize,
    pub t_count: usize,
    pub width: usize,
    pub histogram: BTreeMap<String, usize>,
    #[serde(default)]
    pub t_count_metric: String,
}

pub const T_COUNT_METRIC: &str = "t and tdg only; s, sdg and z are counted as Clifford";

impl GateStats {
    pub fn of(c: &Circuit) -> Self {
        let mut histogram = BTreeMap::new();
        let mut t_count = 0;
        for g in c.gates() {
            *histogram.entry(g.name().to_string()).or_insert(0) += 1;
            if g.is_t_type() {
                t_count += 1;
            }
        }
        Self {
            total: c.len(),
            t_count,
            width: c.width(),
            histogram,
            t_count_metric: T_COUNT_METRIC.into(),
        }
    }

    /// Sum of gate tallies; widths are combined with `max`.
    pub fn merge(&mut self, other: &GateStats) {
        self.total += other.total;
        self.t_count += other.t_count;
        self.width = self.width.max(other.width);
        if self.t_count_metric.is_empty() {
            self.t_count_metric = other.t_count_metric.clone();
        }
        for (k, v) in &other.histogram {
            *self.histogram.entry(k.clone()).or_insert(0) += v;
        }
    }
}

/// Uniformly random Clifford+T circuit; `cx` is drawn only when `width ≥ 2`.
pub fn random_circuit<R: Rng + ?Sized>(width: usize, len: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(width);
    let kinds = if width >= 2 { 8 } else { 7 };
    for _ in 0..len {
        let q = rng.gen_range(0..width);
        let g = match rng.gen_range(0..kinds) {
            0 => Gate::H(q),
            1 => Gate::T(q),
            2 => Gate::Tdg(q),
            3 => Gate::S(q),
            4 => Gate::Sdg(q),
            5 => Gate::X(q),
            6 => Gate::Z(q),
            _ => {
                let mut t = rng.gen_range(0..width - 1);
                if t >= q {
                    t += 1;
                }
                Gate::cnot(q, t)
            }
        };
        c.gates.push(g);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_gate_matrix_is_unitary() {
        for g in [
            Gate::H(0),
            Gate::T(0),
            Gate::Tdg(0),
            Gate::S(0),
            Gate::Sdg(0),
            Gate::X(0),
            Gate::Z(0),
            Gate::cnot(0, 1),
        ] {
            assert!(g.matrix().is_unitary_exact(), "{g}");
            let prod = g.matrix().mul(&g.inverse().matrix()).unwrap();
            assert_eq!(prod, RingMatrix::identity(prod.dim()));
        }
    }

    #[test]
    fn push_validates_qubits() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::cnot(1, 1)).is_err());
        assert!(c.push(Gate::cnot(1, 0)).is_ok());
    }

    #[test]
    fn invert_swaps_phase_gates() {
        let c = Circuit::from_gates(vec![Role::Data], vec![Gate::T(0)]).unwrap();
        assert_eq!(c.invert().gates(), &[Gate::Tdg(0)]);
        let c = Circuit::from_gates(vec![Role::Data], vec![Gate::S(0), Gate::H(0), Gate::Tdg(0)])
            .unwrap();
        assert_eq!(c.invert().gates(), &[Gate::T(0), Gate::H(0), Gate::Sdg(0)]);
    }

    #[test]
    fn compose_checks_width_and_roles() {
        let a = Circuit::new(2);
        assert!(a.compose(&Circuit::new(3)).is_err());
        let mut b = Circuit::new(2);
        b.set_role(1, Role::AncillaClean);
        assert!(a.compose(&b).is_err());
        assert!(a.compose(&Circuit::new(2)).is_ok());
    }

    #[test]
    fn stats_examples() {
        let empty = Circuit::new(1).stats();
        assert_eq!((empty.total, empty.t_count), (0, 0));
        assert!(empty.histogram.is_empty());

        let c = Circuit::from_gates(vec![Role::Data], vec![Gate::T(0), Gate::Tdg(0), Gate::H(0)])
            .unwrap();
        let s = c.stats();
        assert_eq!((s.total, s.t_count, s.width), (3, 2, 1));
        assert_eq!(s.histogram["h"], 1);
        assert_eq!(s.histogram.values().sum::<usize>(), s.total);
    }

    #[test]
    fn random_circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_circuit(3, 200, &mut rng);
        for g in c.gates() {
            g.check(3).unwrap();
        }
        let single = random_circuit(1, 50, &mut rng);
        assert!(single.gates().iter().all(|g| g.qubits().len() == 1));
    }
}
