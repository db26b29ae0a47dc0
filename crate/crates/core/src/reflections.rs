//! Householder-style factorization of the embedded unitary
//! `U' = |0⟩⟨1| ⊗ U + |1⟩⟨0| ⊗ U†` into `2^n` commuting reflections, and
//! exact synthesis of a single reflection.
//!
//! The extra (flag) qubit is the most significant one. For column `u_j` of
//! `U` the reflection vector is `w_j = (|1⟩|j⟩ − |0⟩|u_j⟩)/√2`, and
//! `U' = ∏_j (I − 2|w_j⟩⟨w_j|)`.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{reflection_float, FloatMatrix, FloatVector, RingMatrix, RingVector};
use crate::multicontrol::{reflection_about_zero, Wires};
use crate::ring::RingScalar;
use crate::stateprep::prepare_state_on;

/// Reflection `I − 2|v⟩⟨v|`, tagged with the (0-based) column of `U` it
/// comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionSpec<V> {
    pub column: usize,
    pub vector: V,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderDecomposition<V> {
    /// Qubits of the reflections, `n + 1`.
    pub width: usize,
    pub reflections: Vec<ReflectionSpec<V>>,
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

/// Exact decomposition; fails unless `U` is exactly unitary.
pub fn householder_decompose(u: &RingMatrix) -> Result<HouseholderDecomposition<RingVector>> {
    let n = qubits_of(u.dim())?;
    if !u.is_unitary_exact() {
        return Err(Error::NotUnitary("U·U† ≠ I in exact arithmetic".into()));
    }
    let dim = u.dim();
    let h = RingScalar::inv_sqrt2();
    let reflections = (0..dim)
        .map(|j| {
            let mut w = vec![RingScalar::zero(); 2 * dim];
            for (r, x) in u.column(j).entries().iter().enumerate() {
                w[r] = -(x * &h);
            }
            w[dim + j] = h.clone();
            ReflectionSpec {
                column: j,
                vector: RingVector(w),
            }
        })
        .collect();
    Ok(HouseholderDecomposition {
        width: n + 1,
        reflections,
    })
}

/// Floating-point decomposition; `U` must be unitary within
/// [`UNITARY_TOLERANCE`](crate::linalg::UNITARY_TOLERANCE).
pub fn householder_decompose_float(u: &FloatMatrix) -> Result<HouseholderDecomposition<FloatVector>> {
    let n = qubits_of(u.dim())?;
    if !u.is_unitary() {
        return Err(Error::NotUnitary(format!(
            "unitarity defect {:e}",
            u.unitarity_defect()
        )));
    }
    let dim = u.dim();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let reflections = (0..dim)
        .map(|j| {
            let mut w = vec![Complex64::new(0.0, 0.0); 2 * dim];
            for (r, x) in u.column(j).iter().enumerate() {
                w[r] = -x * h;
            }
            w[dim + j] = Complex64::new(h, 0.0);
            ReflectionSpec {
                column: j,
                vector: w,
            }
        })
        .collect();
    Ok(HouseholderDecomposition {
        width: n + 1,
        reflections,
    })
}

impl HouseholderDecomposition<RingVector> {
    /// Product of the reflections in ascending column order.
    pub fn product(&self) -> RingMatrix {
        let dim = 1 << self.width;
        self.reflections
            .iter()
            .fold(RingMatrix::identity(dim), |acc, r| {
                RingMatrix::reflection(&r.vector).mul(&acc).expect("same size")
            })
    }
}

impl HouseholderDecomposition<FloatVector> {
    pub fn product(&self) -> FloatMatrix {
        let dim = 1 << self.width;
        self.reflections
            .iter()
            .fold(FloatMatrix::identity(dim), |acc, r| {
                reflection_float(&r.vector).mul(&acc)
            })
    }
}

/// `|0⟩⟨1| ⊗ U + |1⟩⟨0| ⊗ U†`.
pub fn embedded_unitary(u: &RingMatrix) -> RingMatrix {
    let dim = u.dim();
    let adj = u.adjoint();
    let rows = (0..2 * dim)
        .map(|r| {
            (0..2 * dim)
                .map(|c| match (r < dim, c < dim) {
                    (true, false) => u.get(r, c - dim).clone(),
                    (false, true) => adj.get(r - dim, c).clone(),
                    _ => RingScalar::zero(),
                })
                .collect()
        })
        .collect();
    RingMatrix::from_rows(rows).expect("square")
}

pub fn embedded_unitary_float(u: &FloatMatrix) -> FloatMatrix {
    let dim = u.dim();
    let adj = u.adjoint();
    let mut m = FloatMatrix::from_row_major(2 * dim, vec![Complex64::new(0.0, 0.0); 4 * dim * dim])
        .expect("square");
    for r in 0..dim {
        for c in 0..dim {
            m.set(r, dim + c, u.get(r, c));
            m.set(dim + r, c, adj.get(r, c));
        }
    }
    m
}

/// Gates implementing `I − 2|φ⟩⟨φ|` on `wires.data`, as `P · R_0 · P†`
/// with `P|0…0⟩ = |φ⟩`. The clean ancilla doubles as the borrowed wire of
/// the multiply-controlled Z.
pub fn synthesize_reflection_on(phi: &RingVector, wires: &Wires) -> Result<Vec<Gate>> {
    let prep = prepare_state_on(phi, wires)?;
    let mut out: Vec<Gate> = prep.iter().rev().map(Gate::inverse).collect();
    out.extend(reflection_about_zero(&wires.data, Some(wires.ancilla))?);
    out.extend(prep);
    Ok(out)
}

/// [`synthesize_reflection_on`] with the contiguous wire layout.
pub fn synthesize_reflection(phi: &RingVector) -> Result<Circuit> {
    let n = qubits_of(phi.dim())?;
    let wires = Wires::contiguous(n);
    Circuit::from_gates(wires.roles(), synthesize_reflection_on(phi, &wires)?)
}
