//! Rounding of a floating-point unit vector to an exact unit vector with
//! entries `(a + bi)/2^m`.
//!
//! Every coordinate is truncated toward zero at precision `2^{−m}`, which
//! keeps the squared norm at most one. The deficit `D = 4^m − Σ(a² + b²)`
//! is written as a sum of four squares and placed into two coordinates that
//! were exactly zero.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{FromPrimitive, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm, RingVector, NORM_TOLERANCE};
use crate::numtheory::four_square;
use crate::ring::RingScalar;

#[derive(Clone, Debug, PartialEq)]
pub struct RoundingPlan {
    pub m: u32,
    /// Zero coordinates that receive the correction terms, `j < l`.
    pub slots: (usize, usize),
    pub epsilon_target: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(())
}

/// `m = ⌈N/2 + 2·log₂(1/ε)⌉ + 5`.
pub fn choose_precision(qubits: usize, eps: f64) -> Result<u32> {
    check_eps(eps)?;
    let x = qubits as f64 / 2.0 + 2.0 * (1.0 / eps).log2();
    Ok(x.ceil() as u32 + 5)
}

/// Bound on `‖ψ − φ‖²` for a rounded vector on `qubits` qubits at precision `m`.
pub fn distance_sq_bound(qubits: usize, m: u32) -> f64 {
    let n = qubits as f64;
    let m = m as f64;
    2.0 * (n - 2.0 * m).exp2() + 2.0 * std::f64::consts::SQRT_2 * (n / 2.0 - m).exp2()
}

/// The two lowest-index coordinates that are exactly zero.
pub fn zero_slots(psi: &[Complex64]) -> Option<(usize, usize)> {
    let mut zeros = psi.iter().enumerate().filter(|(_, x)| **x == Complex64::new(0.0, 0.0));
    let j = zeros.next()?.0;
    let l = zeros.next()?.0;
    Some((j, l))
}

impl RoundingPlan {
    /// Precision from [`choose_precision`] and the lowest two zero slots.
    pub fn for_vector(psi: &[Complex64], eps: f64) -> Result<Self> {
        let qubits = psi.len().trailing_zeros() as usize;
        let m = choose_precision(qubits, eps)?;
        let slots = zero_slots(psi).ok_or_else(|| {
            Error::Precondition("fewer than two exactly zero coordinates".into())
        })?;
        Ok(Self {
            m,
            slots,
            epsilon_target: eps,
        })
    }
}

fn truncate(x: f64, scale: f64) -> BigInt {
    BigInt::from_f64((x * scale).trunc()).expect("finite")
}

/// Round `psi` according to `plan`; the result is checked to have norm
/// exactly one.
pub fn round_unit_vector(psi: &[Complex64], plan: &RoundingPlan, seed: u64) -> Result<RingVector> {
    let len = norm(psi);
    if (len - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(format!("‖ψ‖ = {len}")));
    }
    let (j, l) = plan.slots;
    if j == l || j.max(l) >= psi.len() {
        return Err(Error::Precondition(format!("invalid slots ({j}, {l})")));
    }
    if !psi[j].is_zero() || !psi[l].is_zero() {
        return Err(Error::Precondition(format!("slots ({j}, {l}) are not exactly zero")));
    }
    let m = plan.m;
    let scale = (m as f64).exp2();
    let full = BigInt::from(1) << (2 * m as usize);
    // Inputs within tolerance of the unit sphere may overshoot it slightly;
    // shrink until the deficit is non-negative.
    let mut shrink = 1.0 / len.max(1.0);
    let (parts, deficit) = loop {
        let parts: Vec<(BigInt, BigInt)> = psi
            .iter()
            .map(|x| (truncate(x.re * shrink, scale), truncate(x.im * shrink, scale)))
            .collect();
        let sum: BigInt = parts.iter().map(|(a, b)| a * a + b * b).sum();
        let deficit = &full - sum;
        if !deficit.is_negative() {
            break (parts, deficit);
        }
        if shrink < 1.0 - 1e-6 {
            return Err(Error::Rounding("norm deficit stayed negative".into()));
        }
        shrink *= 1.0 - f64::EPSILON * 4.0;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = four_square(&BigUint::try_from(deficit).expect("non-negative"), &mut rng);
    let big = |x: &BigUint| BigInt::from(x.clone());
    let mut entries: Vec<RingScalar> = parts
        .into_iter()
        .map(|(a, b)| RingScalar::dyadic_complex(a, b, m))
        .collect();
    entries[j] = RingScalar::dyadic_complex(big(&fs.a), big(&fs.b), m);
    entries[l] = RingScalar::dyadic_complex(big(&fs.c), big(&fs.d), m);
    let phi = RingVector(entries);
    if !phi.is_unit() {
        return Err(Error::Rounding("rounded vector is not exactly unit".into()));
    }
    Ok(phi)
}

/// `(|0⟩|ψ⟩, |1⟩|ψ⟩)` with the new qubit most significant; each has at
/// least `2^N` zero coordinates and `R_{0ψ}·R_{1ψ} = I ⊗ R_ψ`.
pub fn split_reflection(psi: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let zero = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut lo = psi.to_vec();
    lo.extend_from_slice(&zero);
    let mut hi = zero;
    hi.extend_from_slice(psi);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_float, reflection_float, vector_distance, FloatMatrix};
    use num_complex::Complex64 as C;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn precision_examples() {
        assert_eq!(choose_precision(2, 1.0).unwrap(), 6);
        assert_eq!(choose_precision(2, 0.005).unwrap(), 22);
        assert_eq!(choose_precision(6, 0.01).unwrap(), 22);
        for bad in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(choose_precision(2, bad), Err(Error::EpsilonOutOfRange(_))));
        }
    }

    #[test]
    fn dyadic_input_is_a_fixed_point() {
        let m = 3;
        let psi = vec![
            c(0.375, 0.5),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, -0.625),
            c(0.375, 0.0),
            c(0.25, 0.0),
            c(0.0, 0.125),
            c(0.0, 0.0),
        ];
        let sq: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
        assert_eq!(sq, 1.0);
        let plan = RoundingPlan { m, slots: (1, 2), epsilon_target: 1.0 };
        let phi = round_unit_vector(&psi, &plan, 0).unwrap();
        for (x, y) in psi.iter().zip(phi.entries()) {
            assert_eq!(*x, y.to_c64());
        }
    }

    #[test]
    fn basis_vector_is_kept() {
        let mut psi = vec![c(0.0, 0.0); 4];
        psi[3] = c(1.0, 0.0);
        let plan = RoundingPlan { m: 5, slots: (0, 1), epsilon_target: 1.0 };
        assert_eq!(round_unit_vector(&psi, &plan, 1).unwrap(), RingVector::basis(4, 3));
    }

    #[test]
    fn rotation_example_meets_bound() {
        let psi = vec![c(0.3f64.cos(), 0.0), c(0.3f64.sin(), 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let plan = RoundingPlan { m: 22, slots: (2, 3), epsilon_target: 0.0 };
        let phi = round_unit_vector(&psi, &plan, 4).unwrap();
        assert!(phi.is_unit());
        // the bound 2·2^{2−44} + 2√2·2^{1−22} limits the squared distance
        let bound = distance_sq_bound(2, 22);
        assert!(bound < 2.7e-6, "{bound}");
        assert!(vector_distance(&psi, &phi).unwrap().powi(2) <= bound);
    }

    #[test]
    fn slot_and_norm_errors() {
        let psi = vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let plan = RoundingPlan { m: 10, slots: (0, 2), epsilon_target: 1.0 };
        assert!(matches!(round_unit_vector(&psi, &plan, 0), Err(Error::Precondition(_))));
        let long = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let plan = RoundingPlan { m: 10, slots: (2, 3), epsilon_target: 1.0 };
        assert!(matches!(round_unit_vector(&long, &plan, 0), Err(Error::NotNormalized(_))));
        assert!(RoundingPlan::for_vector(&psi[..2], 0.1).is_err());
    }

    #[test]
    fn negative_coordinates_round_feasibly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut psi: Vec<C> = (0..8).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            psi[2] = c(0.0, 0.0);
            psi[5] = c(0.0, 0.0);
            let n = norm(&psi);
            psi.iter_mut().for_each(|x| *x /= n);
            let m = rng.gen_range(4..20);
            let plan = RoundingPlan { m, slots: (2, 5), epsilon_target: 1.0 };
            let phi = round_unit_vector(&psi, &plan, 9).unwrap();
            assert!(vector_distance(&psi, &phi).unwrap().powi(2) <= distance_sq_bound(3, m));
        }
    }

    #[test]
    fn split_examples() {
        let (lo, hi) = split_reflection(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(lo, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(hi, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let (lo, hi) = split_reflection(&[c(0.6, 0.0), c(0.8, 0.0)]);
        assert_eq!(lo, vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(hi, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0), c(0.8, 0.0)]);
    }

    #[test]
    fn split_product_is_identity_tensor_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let mut psi: Vec<C> = (0..2).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let n = norm(&psi);
            psi.iter_mut().for_each(|x| *x /= n);
            let (lo, hi) = split_reflection(&psi);
            let prod = reflection_float(&lo).mul(&reflection_float(&hi));
            let r = reflection_float(&psi);
            let mut expected = FloatMatrix::identity(4);
            for a in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        expected.set(2 * a + i, 2 * a + j, r.get(i, j));
                    }
                }
            }
            assert!(frobenius_float(&prod, &expected) < 1e-10);
        }
    }
}
