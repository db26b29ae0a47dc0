//! Lowering of multiply-controlled gates and two-level operators to the
//! primitive gate set.
//!
//! Everything here returns plain gate lists on caller-chosen wires; wrap them
//! in a [`Circuit`](crate::circuit::Circuit) to simulate or export.

use std::collections::HashSet;

use crate::circuit::{Gate, Role};
use crate::error::{Error, Result};
use crate::linalg::{RingMatrix, RingVector};
use crate::ring::RingScalar;

fn distinct(qubits: &[usize]) -> Result<()> {
    let mut seen = HashSet::new();
    for &q in qubits {
        if !seen.insert(q) {
            return Err(Error::InvalidQubits(format!("qubit {q} used twice")));
        }
    }
    Ok(())
}

/// `ω^l` on the `|1⟩` component of `q` with the fewest T gates.
pub fn phase_gates(q: usize, l: i64) -> Vec<Gate> {
    match l.rem_euclid(8) {
        0 => vec![],
        1 => vec![Gate::T(q)],
        2 => vec![Gate::S(q)],
        3 => vec![Gate::S(q), Gate::T(q)],
        4 => vec![Gate::Z(q)],
        5 => vec![Gate::Z(q), Gate::T(q)],
        6 => vec![Gate::Sdg(q)],
        _ => vec![Gate::Tdg(q)],
    }
}

/// Exact Toffoli with seven T gates.
pub fn toffoli(a: usize, b: usize, t: usize) -> Vec<Gate> {
    use Gate::*;
    vec![
        H(t),
        Gate::cnot(b, t),
        Tdg(t),
        Gate::cnot(a, t),
        T(t),
        Gate::cnot(b, t),
        Tdg(t),
        Gate::cnot(a, t),
        T(b),
        T(t),
        H(t),
        Gate::cnot(a, b),
        T(a),
        Tdg(b),
        Gate::cnot(a, b),
    ]
}

/// Three-control X up to a diagonal phase (the qelib1 `rc3x`). Only ever
/// used in compute/uncompute pairs, where the phase cancels.
pub fn rc3x(a: usize, b: usize, c: usize, t: usize) -> Vec<Gate> {
    use Gate::*;
    vec![
        H(t),
        T(t),
        Gate::cnot(c, t),
        Tdg(t),
        H(t),
        Gate::cnot(a, t),
        T(t),
        Gate::cnot(b, t),
        Tdg(t),
        Gate::cnot(a, t),
        T(t),
        Gate::cnot(b, t),
        Tdg(t),
        H(t),
        T(t),
        Gate::cnot(c, t),
        Tdg(t),
        H(t),
    ]
}

fn inverse(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// `C^k X` with `k − 2` dirty wires, which end in their initial state.
fn mcx_dirty(controls: &[usize], target: usize, dirty: &[usize]) -> Vec<Gate> {
    let k = controls.len();
    match k {
        0 => return vec![Gate::X(target)],
        1 => return vec![Gate::cnot(controls[0], target)],
        2 => return toffoli(controls[0], controls[1], target),
        _ => {}
    }
    let a = &dirty[..k - 2];
    let mut middle = Vec::new();
    for i in (1..k - 2).rev() {
        middle.extend(toffoli(controls[i + 1], a[i - 1], a[i]));
    }
    middle.extend(toffoli(controls[0], controls[1], a[0]));
    for i in 1..k - 2 {
        middle.extend(toffoli(controls[i + 1], a[i - 1], a[i]));
    }
    let top = toffoli(controls[k - 1], a[k - 3], target);
    let mut out = top.clone();
    out.extend(middle.iter().copied());
    out.extend(top);
    out.extend(middle);
    out
}

/// Multiply-controlled X. Three or more controls need one `borrowed` wire,
/// which may hold any state and is restored.
pub fn mcx(controls: &[usize], target: usize, borrowed: Option<usize>) -> Result<Vec<Gate>> {
    let mut all = controls.to_vec();
    all.push(target);
    all.extend(borrowed);
    distinct(&all)?;
    let m = controls.len();
    if m <= 2 {
        return Ok(mcx_dirty(controls, target, &[]));
    }
    let b = borrowed.ok_or_else(|| {
        Error::AncillaContract(format!("{m}-control X needs a borrowed wire"))
    })?;
    let m1 = m.div_ceil(2);
    let (c1, c2) = controls.split_at(m1);
    let mut dirty_a: Vec<usize> = c2.to_vec();
    dirty_a.push(target);
    let part_a = mcx_dirty(c1, b, &dirty_a);
    let mut c2b = c2.to_vec();
    c2b.push(b);
    let part_b = mcx_dirty(&c2b, target, c1);
    let mut out = part_a.clone();
    out.extend(part_b.iter().copied());
    out.extend(part_a);
    out.extend(part_b);
    Ok(out)
}

/// `I − 2|0…0⟩⟨0…0|` on `data`, as `X^⊗n · C^{n−1}Z · X^⊗n`.
pub fn reflection_about_zero(data: &[usize], borrowed: Option<usize>) -> Result<Vec<Gate>> {
    let Some((&last, rest)) = data.split_last() else {
        return Err(Error::InvalidQubits("reflection on zero qubits".into()));
    };
    let mut out: Vec<Gate> = data.iter().map(|&q| Gate::X(q)).collect();
    if rest.is_empty() {
        out.push(Gate::Z(last));
    } else {
        out.push(Gate::H(last));
        out.extend(mcx(rest, last, borrowed)?);
        out.push(Gate::H(last));
    }
    out.extend(data.iter().map(|&q| Gate::X(q)));
    Ok(out)
}

/// Wire assignment for lowered two-level operators: data wires (most
/// significant first), a clean ancilla, and a spare borrowed wire that only
/// phase operators on four or more data wires need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wires {
    pub data: Vec<usize>,
    pub ancilla: usize,
    pub spare: Option<usize>,
}

impl Wires {
    pub fn needs_spare(data_width: usize) -> bool {
        data_width >= 4
    }

    /// Data on `0..n`, then the clean ancilla, then the spare if needed.
    pub fn contiguous(n: usize) -> Self {
        Self {
            data: (0..n).collect(),
            ancilla: n,
            spare: Self::needs_spare(n).then_some(n + 1),
        }
    }

    pub fn width(&self) -> usize {
        self.all().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn all(&self) -> Vec<usize> {
        let mut v = self.data.clone();
        v.push(self.ancilla);
        v.extend(self.spare);
        v
    }

    pub fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Data; self.width()];
        roles[self.ancilla] = Role::AncillaClean;
        if let Some(s) = self.spare {
            roles[s] = Role::AncillaBorrowed;
        }
        roles
    }

    fn check(&self) -> Result<()> {
        distinct(&self.all())?;
        if self.spare.is_none() && Self::needs_spare(self.data.len()) {
            return Err(Error::AncillaContract(format!(
                "{} data wires need a spare borrowed wire",
                self.data.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwoLevelKind {
    X,
    H,
    /// `diag(1, ω^m)` on `(|s⟩, |t⟩)`.
    Tpow(u8),
    /// `ω^l` on `|s⟩`; `t` is ignored.
    PhaseOmega(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoLevelOp {
    pub kind: TwoLevelKind,
    pub s: usize,
    pub t: usize,
    pub width: usize,
}

impl TwoLevelOp {
    pub fn new(kind: TwoLevelKind, s: usize, t: usize, width: usize) -> Result<Self> {
        let op = Self { kind, s, t, width };
        op.validate()?;
        Ok(op)
    }

    pub fn phase(l: i64, s: usize, width: usize) -> Result<Self> {
        Self::new(TwoLevelKind::PhaseOmega(l.rem_euclid(8) as u8), s, s, width)
    }

    fn is_single(&self) -> bool {
        matches!(self.kind, TwoLevelKind::PhaseOmega(_))
    }

    fn validate(&self) -> Result<()> {
        let dim = 1usize << self.width;
        if self.s >= dim || self.t >= dim {
            return Err(Error::InvalidQubits(format!(
                "index ({}, {}) out of range for width {}",
                self.s, self.t, self.width
            )));
        }
        match self.kind {
            TwoLevelKind::Tpow(m) | TwoLevelKind::PhaseOmega(m) if m >= 8 => {
                Err(Error::Precondition(format!("exponent {m} outside 0..8")))
            }
            _ if !self.is_single() && self.s >= self.t => Err(Error::Precondition(format!(
                "two-level indices must satisfy s < t, got ({}, {})",
                self.s, self.t
            ))),
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            TwoLevelKind::Tpow(m) => TwoLevelKind::Tpow((8 - m) % 8),
            TwoLevelKind::PhaseOmega(l) => TwoLevelKind::PhaseOmega((8 - l) % 8),
            k => k,
        };
        Self { kind, ..*self }
    }

    /// Apply to an exact vector.
    pub fn apply(&self, v: &mut RingVector) {
        let (s, t) = (self.s, self.t);
        match self.kind {
            TwoLevelKind::X => v.0.swap(s, t),
            TwoLevelKind::H => {
                let h = RingScalar::inv_sqrt2();
                let a = &(&v.0[s] + &v.0[t]) * &h;
                let b = &(&v.0[s] - &v.0[t]) * &h;
                v.0[s] = a;
                v.0[t] = b;
            }
            TwoLevelKind::Tpow(m) => v.0[t] = v.0[t].mul_omega_pow(m as i64),
            TwoLevelKind::PhaseOmega(l) => v.0[s] = v.0[s].mul_omega_pow(l as i64),
        }
    }

    /// The full `2^width × 2^width` matrix.
    pub fn matrix(&self) -> RingMatrix {
        let dim = 1usize << self.width;
        let cols = (0..dim)
            .map(|j| {
                let mut e = RingVector::basis(dim, j);
                self.apply(&mut e);
                e
            })
            .collect();
        RingMatrix::from_columns(cols).expect("square")
    }
}

/// `ω^l` on the basis state where every wire in `data` is 1.
fn phase_all_ones(l: i64, data: &[usize], wires: &Wires) -> Result<Vec<Gate>> {
    if l.rem_euclid(8) == 0 {
        return Ok(vec![]);
    }
    let a = wires.ancilla;
    let compute = match data.len() {
        0 => unreachable!("width ≥ 1"),
        1 => return Ok(phase_gates(data[0], l)),
        2 => toffoli(data[0], data[1], a),
        3 => rc3x(data[0], data[1], data[2], a),
        _ => mcx(data, a, wires.spare)?,
    };
    let mut out = compute.clone();
    out.extend(phase_gates(a, l));
    out.extend(inverse(&compute));
    Ok(out)
}

/// Lower a two-level operator onto `wires`, where `op.s`, `op.t` index basis
/// states of `wires.data` (first wire most significant).
///
/// `s` and `t` are brought to neighbours differing in the pivot (their most
/// significant differing bit) by CNOTs from the pivot, the remaining wires
/// are flipped to 1 where `s` has 0, and the core acts on the pivot under
/// control of all other data wires.
pub fn lower_two_level(op: &TwoLevelOp, wires: &Wires) -> Result<Vec<Gate>> {
    op.validate()?;
    wires.check()?;
    let n = wires.data.len();
    if op.width != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: op.width,
        });
    }
    let data = &wires.data;
    let bit = |x: usize, i: usize| (x >> (n - 1 - i)) & 1;

    if let TwoLevelKind::PhaseOmega(l) = op.kind {
        let flips: Vec<Gate> = (0..n)
            .filter(|&i| bit(op.s, i) == 0)
            .map(|i| Gate::X(data[i]))
            .collect();
        let mut out = flips.clone();
        out.extend(phase_all_ones(l as i64, data, wires)?);
        out.extend(flips);
        return Ok(out);
    }
    if op.kind == TwoLevelKind::Tpow(0) {
        return Ok(vec![]);
    }

    let diff = op.s ^ op.t;
    let pivot = (0..n).find(|&i| bit(diff, i) == 1).expect("s ≠ t");
    let p = data[pivot];
    let mut conj: Vec<Gate> = (pivot + 1..n)
        .filter(|&i| bit(diff, i) == 1)
        .map(|i| Gate::cnot(p, data[i]))
        .collect();
    conj.extend(
        (0..n)
            .filter(|&i| i != pivot && bit(op.s, i) == 0)
            .map(|i| Gate::X(data[i])),
    );
    let others: Vec<usize> = (0..n).filter(|&i| i != pivot).map(|i| data[i]).collect();

    let core = match op.kind {
        TwoLevelKind::X => mcx(&others, p, Some(wires.ancilla))?,
        TwoLevelKind::H => {
            // H = A·X·A† with A = S·H·T
            let mut g = vec![Gate::Sdg(p), Gate::H(p), Gate::Tdg(p)];
            g.extend(mcx(&others, p, Some(wires.ancilla))?);
            g.extend([Gate::T(p), Gate::H(p), Gate::S(p)]);
            g
        }
        TwoLevelKind::Tpow(m) => phase_all_ones(m as i64, data, wires)?,
        TwoLevelKind::PhaseOmega(_) => unreachable!(),
    };
    let mut out = conj.clone();
    out.extend(core);
    out.extend(inverse(&conj));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{exact_simulate, simulate_columns, Circuit, DEFAULT_WIDTH_CAP};
    use proptest::prelude::*;

    fn circuit(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(vec![Role::Data; width], gates).unwrap()
    }

    /// Oracle: the basis permutation of `C^k X`.
    fn mcx_permutation(width: usize, controls: &[usize], target: usize) -> Vec<usize> {
        let bit = |q: usize| 1usize << (width - 1 - q);
        (0..1usize << width)
            .map(|i| {
                if controls.iter().all(|&c| i & bit(c) != 0) {
                    i ^ bit(target)
                } else {
                    i
                }
            })
            .collect()
    }

    fn is_permutation(m: &RingMatrix, perm: &[usize]) -> bool {
        (0..m.dim()).all(|c| {
            (0..m.dim()).all(|r| {
                let x = m.get(r, c);
                if r == perm[c] {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
        })
    }

    #[test]
    fn zero_and_one_controls() {
        assert_eq!(mcx(&[], 0, None).unwrap(), vec![Gate::X(0)]);
        assert_eq!(mcx(&[1], 0, None).unwrap(), vec![Gate::cnot(1, 0)]);
    }

    #[test]
    fn toffoli_is_exact() {
        let c = circuit(3, toffoli(0, 1, 2));
        assert_eq!(c.stats().t_count, 7);
        let m = exact_simulate(&c).unwrap();
        assert!(is_permutation(&m, &mcx_permutation(3, &[0, 1], 2)));
    }

    #[test]
    fn three_controls_with_borrowed_wire() {
        // wires: controls 0,1,2, target 3, borrowed 4; every borrowed state
        let c = circuit(5, mcx(&[0, 1, 2], 3, Some(4)).unwrap());
        let m = exact_simulate(&c).unwrap();
        assert!(is_permutation(&m, &mcx_permutation(5, &[0, 1, 2], 3)));
    }

    #[test]
    fn mcx_up_to_six_controls() {
        for k in 3..=6 {
            let controls: Vec<usize> = (0..k).collect();
            let c = circuit(k + 2, mcx(&controls, k, Some(k + 1)).unwrap());
            let m = exact_simulate(&c).unwrap();
            assert!(is_permutation(&m, &mcx_permutation(k + 2, &controls, k)), "k = {k}");
        }
    }

    #[test]
    fn mcx_errors() {
        assert!(matches!(mcx(&[0, 1], 1, None), Err(Error::InvalidQubits(_))));
        assert!(matches!(mcx(&[0, 1, 2], 3, None), Err(Error::AncillaContract(_))));
        assert!(mcx(&[0, 1, 2], 3, Some(2)).is_err());
    }

    #[test]
    fn mcx_cost_is_linear() {
        let counts: Vec<usize> = (1..=8)
            .map(|k| {
                let controls: Vec<usize> = (0..k).collect();
                mcx(&controls, k, Some(k + 1)).unwrap().len()
            })
            .collect();
        for k in 3..8 {
            assert!(counts[k] - counts[k - 1] <= 8 * 15, "{counts:?}");
        }
        for (i, &n) in counts.iter().enumerate() {
            assert!(n <= 80 * (i + 1), "{counts:?}");
        }
    }

    #[test]
    fn rc3x_phase_cancels_in_compute_uncompute() {
        let compute = rc3x(0, 1, 2, 3);
        let mut gates = compute.clone();
        gates.extend(inverse(&compute));
        assert_eq!(exact_simulate(&circuit(4, gates)).unwrap(), RingMatrix::identity(16));
        // on target |0⟩ it writes the AND up to a phase
        let cols = simulate_columns(&circuit(4, compute), &[0, 2, 14], DEFAULT_WIDTH_CAP).unwrap();
        for (col, expect) in cols.iter().zip([0usize, 2, 15]) {
            let nz: Vec<usize> = (0..16).filter(|&i| !col.0[i].is_zero()).collect();
            assert_eq!(nz, vec![expect]);
        }
    }

    #[test]
    fn reflection_about_zero_examples() {
        for n in 1..=4 {
            let data: Vec<usize> = (0..n).collect();
            let gates = reflection_about_zero(&data, Some(n)).unwrap();
            let m = exact_simulate(&circuit(n + 1, gates)).unwrap();
            let dim = 1 << (n + 1);
            let mut diag = vec![RingScalar::one(); dim];
            // borrowed wire is least significant: indices 0 and 1 have data 0…0
            diag[0] = RingScalar::from_int(-1);
            diag[1] = RingScalar::from_int(-1);
            assert_eq!(m, RingMatrix::diagonal(diag), "n = {n}");
        }
        assert!(reflection_about_zero(&[], None).is_err());
    }

    #[test]
    fn two_level_examples() {
        let w1 = Wires::contiguous(1);
        let h = TwoLevelOp::new(TwoLevelKind::H, 0, 1, 1).unwrap();
        let c = Circuit::from_gates(w1.roles(), lower_two_level(&h, &w1).unwrap()).unwrap();
        let m = exact_simulate(&c).unwrap();
        assert_eq!(m.get(0, 0), &RingScalar::inv_sqrt2());
        assert_eq!(m.get(3, 3), &(-RingScalar::inv_sqrt2()));

        let w2 = Wires::contiguous(2);
        let x = TwoLevelOp::new(TwoLevelKind::X, 0, 3, 2).unwrap();
        let c = Circuit::from_gates(w2.roles(), lower_two_level(&x, &w2).unwrap()).unwrap();
        let m = exact_simulate(&c).unwrap();
        // ancilla is the least significant wire; |00⟩|0⟩ ↔ |11⟩|0⟩
        assert!(m.get(6, 0).is_one() && m.get(0, 6).is_one() && m.get(2, 2).is_one());

        let p = TwoLevelOp::phase(3, 1, 1).unwrap();
        let gates = lower_two_level(&p, &w1).unwrap();
        assert!(gates.iter().all(|g| g.qubits() == vec![0]));
        let m = exact_simulate(&circuit(1, gates)).unwrap();
        assert_eq!(m, RingMatrix::diagonal(vec![RingScalar::one(), RingScalar::omega_pow(3)]));
    }

    #[test]
    fn two_level_errors() {
        assert!(TwoLevelOp::new(TwoLevelKind::X, 1, 1, 1).is_err());
        assert!(TwoLevelOp::new(TwoLevelKind::H, 0, 4, 2).is_err());
        let op = TwoLevelOp::new(TwoLevelKind::X, 0, 1, 1).unwrap();
        let bad = Wires { data: vec![0], ancilla: 0, spare: None };
        assert!(lower_two_level(&op, &bad).is_err());
    }

    /// Data block of the lowered circuit with ancilla and spare in |0⟩ and
    /// the spare also in |1⟩.
    fn check_lowering(op: &TwoLevelOp) {
        let wires = Wires::contiguous(op.width);
        let c = Circuit::from_gates(wires.roles(), lower_two_level(op, &wires).unwrap()).unwrap();
        let extra = c.width() - op.width;
        let target = op.matrix();
        let spare_states: Vec<usize> = if wires.spare.is_some() { vec![0, 1] } else { vec![0] };
        for sp in spare_states {
            let inputs: Vec<usize> = (0..1usize << op.width).map(|j| (j << extra) | sp).collect();
            let cols = simulate_columns(&c, &inputs, DEFAULT_WIDTH_CAP).unwrap();
            for (j, col) in cols.iter().enumerate() {
                for r in 0..col.dim() {
                    let expect = if r & ((1 << extra) - 1) == sp {
                        target.get(r >> extra, j).clone()
                    } else {
                        RingScalar::zero()
                    };
                    assert_eq!(col.0[r], expect, "{op:?} column {j} row {r}");
                }
            }
        }
    }

    fn kind_strategy() -> impl Strategy<Value = TwoLevelKind> {
        prop_oneof![
            Just(TwoLevelKind::X),
            Just(TwoLevelKind::H),
            (0u8..8).prop_map(TwoLevelKind::Tpow),
            (0u8..8).prop_map(TwoLevelKind::PhaseOmega),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn lowered_two_level_ops_are_exact(
            width in 1usize..=4,
            kind in kind_strategy(),
            a in 0usize..16,
            b in 0usize..16,
        ) {
            let dim = 1 << width;
            let (a, b) = (a % dim, b % dim);
            let op = match kind {
                TwoLevelKind::PhaseOmega(_) => TwoLevelOp::new(kind, a, a, width).unwrap(),
                _ => {
                    prop_assume!(a != b);
                    TwoLevelOp::new(kind, a.min(b), a.max(b), width).unwrap()
                }
            };
            check_lowering(&op);
        }
    }

    #[test]
    fn inverse_two_level_op() {
        let op = TwoLevelOp::new(TwoLevelKind::Tpow(3), 1, 2, 2).unwrap();
        let prod = op.matrix().mul(&op.inverse().matrix()).unwrap();
        assert_eq!(prod, RingMatrix::identity(4));
    }
}
