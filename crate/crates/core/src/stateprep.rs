//! Exact state preparation over ℤ[1/√2, i] by denominator reduction.
//!
//! Each round works on the numerators `u_i` of the vector at its common
//! exponent `k`. Entries whose numerator is not divisible by √2 come in
//! pairs; a `Tpow` aligns the pair modulo 2 and an `H` leaves both
//! numerators divisible by 2, so after the round the vector has exponent at
//! most `k − 1`.
//!
//! Residues modulo 2 split the non-divisible numerators into three orbits
//! under multiplication by ω (a cyclic shift of the coefficient parities):
//! weight one, weight three, and two adjacent ones. Pairs within an orbit
//! align directly. A weight-one entry left over against a weight-three entry
//! is first combined so that both become the adjacent kind.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::RingVector;
use crate::multicontrol::{lower_two_level, TwoLevelKind, TwoLevelOp, Wires};
use crate::ring::{OmegaInt, RingScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub ops: Vec<TwoLevelOp>,
    pub sde_before: u32,
    pub sde_after: u32,
}

/// Full reduction of a unit vector to `|0…0⟩`: the rounds, then the
/// remaining `ω^phase |basis⟩` which is cleared by a phase and X gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub steps: Vec<ReductionStep>,
    pub basis: usize,
    pub phase: u8,
}

fn rotate(p: u8) -> u8 {
    (p >> 1) | ((p & 1) << 3)
}

/// `m` with `a ≡ ω^m b (mod 2)`.
fn align(a: u8, b: u8) -> Option<u8> {
    let mut r = b;
    for m in 0..4 {
        if r == a {
            return Some(m);
        }
        r = rotate(r);
    }
    None
}

/// `m` with `a + ω^m b ≡ 1 + ω + ω² + ω³ (mod 2)`.
fn complement(a: u8, b: u8) -> Option<u8> {
    align(0b1111 ^ a, b)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    Single,
    Triple,
    Adjacent,
}

fn class_of(p: u8) -> Option<Class> {
    let divisible = (p >> 3 ^ p >> 1) & 1 == 0 && (p >> 2 ^ p) & 1 == 0;
    if divisible {
        return None;
    }
    Some(match p.count_ones() {
        1 => Class::Single,
        3 => Class::Triple,
        _ => Class::Adjacent,
    })
}

struct Numerators {
    u: Vec<OmegaInt>,
    k: u32,
    width: usize,
}

impl Numerators {
    fn new(v: &RingVector) -> Self {
        let k = v.sde();
        Self {
            u: v.entries().iter().map(|x| x.numerator_at(k)).collect(),
            k,
            width: v.dim().trailing_zeros() as usize,
        }
    }

    fn to_vector(&self) -> RingVector {
        RingVector(self.u.iter().map(|u| RingScalar::new(u.clone(), self.k)).collect())
    }

    /// `Tpow(m)` then `H` on `(s, t)`, keeping the exponent; both results
    /// must be divisible by √2 at `k + 1`.
    fn combine(&mut self, s: usize, t: usize, m: u8, ops: &mut Vec<TwoLevelOp>) -> Result<()> {
        if m != 0 {
            ops.push(TwoLevelOp::new(TwoLevelKind::Tpow(m), s, t, self.width)?);
            self.u[t].mul_omega_pow(m as i64);
        }
        ops.push(TwoLevelOp::new(TwoLevelKind::H, s, t, self.width)?);
        let sum = &self.u[s] + &self.u[t];
        let diff = &self.u[s] - &self.u[t];
        self.u[s] = sum.div_sqrt2().ok_or_else(|| self.pair_error(s, t))?;
        self.u[t] = diff.div_sqrt2().ok_or_else(|| self.pair_error(s, t))?;
        Ok(())
    }

    fn pair_error(&self, s: usize, t: usize) -> Error {
        Error::Pairing {
            first: s,
            second: t,
            k: self.k,
        }
    }

    fn residue(&self, i: usize) -> u8 {
        self.u[i].residue_mod2()
    }

    fn align_pair(&mut self, s: usize, t: usize, ops: &mut Vec<TwoLevelOp>) -> Result<()> {
        let m = align(self.residue(s), self.residue(t)).ok_or_else(|| self.pair_error(s, t))?;
        self.combine(s, t, m, ops)
    }

    fn round(&mut self) -> Result<Vec<TwoLevelOp>> {
        let mut ops = Vec::new();
        let mut pending: [Option<usize>; 3] = [None; 3];
        for i in 0..self.u.len() {
            let Some(class) = class_of(self.residue(i)) else {
                continue;
            };
            let slot = &mut pending[class as usize];
            match slot.take() {
                Some(s) => self.align_pair(s, i, &mut ops)?,
                None => *slot = Some(i),
            }
        }
        match pending {
            [None, None, None] => {}
            [Some(a), Some(b), None] => {
                let (s, t) = (a.min(b), a.max(b));
                let m = complement(self.residue(s), self.residue(t))
                    .ok_or_else(|| self.pair_error(s, t))?;
                self.combine(s, t, m, &mut ops)?;
                self.align_pair(s, t, &mut ops)?;
            }
            _ => {
                let left: Vec<usize> = pending.iter().flatten().copied().collect();
                let second = left.get(1).copied().unwrap_or(left[0]);
                return Err(self.pair_error(left[0], second));
            }
        }
        for u in &mut self.u {
            u.div_sqrt2_in_place();
        }
        self.k -= 1;
        Ok(ops)
    }
}

fn check_unit(v: &RingVector) -> Result<()> {
    if !v.dim().is_power_of_two() || v.dim() < 2 {
        return Err(Error::DimensionMismatch {
            expected: v.dim().next_power_of_two().max(2),
            found: v.dim(),
        });
    }
    if !v.is_unit() {
        return Err(Error::NotNormalized(format!(
            "⟨v|v⟩ = {} is not exactly 1",
            v.norm_sq()
        )));
    }
    Ok(())
}

/// One reduction pass: the returned operators, applied in order to `v`,
/// give a vector of strictly smaller sde.
pub fn reduce_round(v: &RingVector) -> Result<(RingVector, Vec<TwoLevelOp>)> {
    check_unit(v)?;
    if v.sde() == 0 {
        return Err(Error::Precondition("vector already has sde 0".into()));
    }
    let mut n = Numerators::new(v);
    let ops = n.round()?;
    Ok((n.to_vector(), ops))
}

pub fn reduce(v: &RingVector) -> Result<Reduction> {
    check_unit(v)?;
    let mut steps = Vec::new();
    let mut cur = v.clone();
    while cur.sde() > 0 {
        let before = cur.sde();
        let (next, ops) = reduce_round(&cur)?;
        steps.push(ReductionStep {
            ops,
            sde_before: before,
            sde_after: next.sde(),
        });
        cur = next;
    }
    let mut nonzero = cur.entries().iter().enumerate().filter(|(_, x)| !x.is_zero());
    let (basis, x) = nonzero.next().expect("unit vector");
    let phase = (0..8)
        .find(|&l| *x == RingScalar::omega_pow(l))
        .ok_or_else(|| Error::NotNormalized(format!("sde-0 entry {x} is not a unit")))?;
    debug_assert!(nonzero.next().is_none());
    Ok(Reduction {
        steps,
        basis,
        phase: phase as u8,
    })
}

/// Gates mapping `|0…0⟩` to `phi` on the given wires; the clean ancilla
/// returns to `|0⟩` and the spare is restored.
pub fn prepare_state_on(phi: &RingVector, wires: &Wires) -> Result<Vec<Gate>> {
    let red = reduce(phi)?;
    let n = wires.data.len();
    if phi.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: phi.dim(),
        });
    }
    let mut prep: Vec<Gate> = (0..n)
        .filter(|&i| (red.basis >> (n - 1 - i)) & 1 == 1)
        .map(|i| Gate::X(wires.data[i]))
        .collect();
    let phase = TwoLevelOp::phase(red.phase as i64, red.basis, n)?;
    prep.extend(lower_two_level(&phase, wires)?);
    for step in red.steps.iter().rev() {
        for op in step.ops.iter().rev() {
            prep.extend(lower_two_level(&op.inverse(), wires)?);
        }
    }
    Ok(prep)
}

/// [`prepare_state_on`] with data on `0..N`, the clean ancilla next and a
/// spare borrowed wire after it when `N ≥ 4`.
pub fn prepare_state(phi: &RingVector) -> Result<Circuit> {
    let n = phi.dim().trailing_zeros() as usize;
    let wires = Wires::contiguous(n);
    let gates = prepare_state_on(phi, &wires)?;
    Circuit::from_gates(wires.roles(), gates)
}
