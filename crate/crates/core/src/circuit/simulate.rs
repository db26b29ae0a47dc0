//! Exact state-vector simulation over ℤ[1/√2, i].
//!
//! Each column is evolved as integer numerators over a shared power of √2;
//! `H` raises the exponent once for the whole vector and it is lowered again
//! as soon as every numerator is divisible by √2.

use rayon::prelude::*;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{RingMatrix, RingVector};
use crate::ring::{OmegaInt, RingScalar};

pub const DEFAULT_WIDTH_CAP: usize = 8;

struct State {
    nums: Vec<OmegaInt>,
    k: u32,
    width: usize,
}

impl State {
    fn basis(width: usize, index: usize) -> Self {
        let mut nums = vec![OmegaInt::zero(); 1 << width];
        nums[index] = OmegaInt::one();
        Self { nums, k: 0, width }
    }

    fn from_vector(width: usize, v: &RingVector) -> Self {
        let k = v.entries().iter().map(RingScalar::exponent).max().unwrap_or(0);
        let nums = v.entries().iter().map(|x| x.numerator_at(k)).collect();
        let mut s = Self { nums, k, width };
        s.reduce();
        s
    }

    fn into_vector(self) -> RingVector {
        let k = self.k;
        RingVector(self.nums.into_iter().map(|u| RingScalar::new(u, k)).collect())
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.width - 1 - q)
    }

    fn phase(&mut self, q: usize, l: i64) {
        let b = self.bit(q);
        for (i, u) in self.nums.iter_mut().enumerate() {
            if i & b != 0 && !u.is_zero() {
                u.mul_omega_pow(l);
            }
        }
    }

    fn apply(&mut self, g: &Gate) {
        match *g {
            Gate::X(q) => {
                let b = self.bit(q);
                for i in 0..self.nums.len() {
                    if i & b == 0 {
                        self.nums.swap(i, i | b);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (bc, bt) = (self.bit(control), self.bit(target));
                for i in 0..self.nums.len() {
                    if i & bc != 0 && i & bt == 0 {
                        self.nums.swap(i, i | bt);
                    }
                }
            }
            Gate::Z(q) => self.phase(q, 4),
            Gate::S(q) => self.phase(q, 2),
            Gate::Sdg(q) => self.phase(q, 6),
            Gate::T(q) => self.phase(q, 1),
            Gate::Tdg(q) => self.phase(q, 7),
            Gate::H(q) => {
                let b = self.bit(q);
                for i in 0..self.nums.len() {
                    if i & b != 0 {
                        continue;
                    }
                    let j = i | b;
                    if self.nums[i].is_zero() && self.nums[j].is_zero() {
                        continue;
                    }
                    let sum = &self.nums[i] + &self.nums[j];
                    let diff = &self.nums[i] - &self.nums[j];
                    self.nums[i] = sum;
                    self.nums[j] = diff;
                }
                self.k += 1;
                self.reduce();
            }
        }
    }

    fn reduce(&mut self) {
        while self.k > 0 && self.nums.iter().all(OmegaInt::is_sqrt2_divisible) {
            for u in &mut self.nums {
                u.div_sqrt2_in_place();
            }
            self.k -= 1;
        }
    }
}

fn check_cap(c: &Circuit, cap: usize) -> Result<()> {
    if c.width() > cap {
        return Err(Error::WidthCapExceeded {
            width: c.width(),
            cap,
        });
    }
    Ok(())
}

/// Full `2^w × 2^w` matrix, refusing circuits wider than [`DEFAULT_WIDTH_CAP`].
pub fn exact_simulate(c: &Circuit) -> Result<RingMatrix> {
    simulate_with_cap(c, DEFAULT_WIDTH_CAP)
}

pub fn simulate_with_cap(c: &Circuit, cap: usize) -> Result<RingMatrix> {
    let inputs: Vec<usize> = (0..1usize << c.width()).collect();
    RingMatrix::from_columns(simulate_columns(c, &inputs, cap)?)
}

/// Images of the listed computational basis states, computed in parallel.
pub fn simulate_columns(c: &Circuit, inputs: &[usize], cap: usize) -> Result<Vec<RingVector>> {
    check_cap(c, cap)?;
    let dim = 1usize << c.width();
    if let Some(&bad) = inputs.iter().find(|&&i| i >= dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad,
        });
    }
    Ok(inputs
        .par_iter()
        .map(|&i| {
            let mut s = State::basis(c.width(), i);
            for g in c.gates() {
                s.apply(g);
            }
            s.into_vector()
        })
        .collect())
}

/// Image of an arbitrary exact state.
pub fn apply_to_state(c: &Circuit, v: &RingVector) -> Result<RingVector> {
    let dim = 1usize << c.width();
    if v.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.dim(),
        });
    }
    let mut s = State::from_vector(c.width(), v);
    for g in c.gates() {
        s.apply(g);
    }
    Ok(s.into_vector())
}
