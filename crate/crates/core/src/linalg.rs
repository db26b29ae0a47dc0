//! Dense exact vectors and matrices over [`RingScalar`], double-precision
//! matrices for approximate targets, and the certified distance layer.
//!
//! Distances are Frobenius distances, `‖X‖²_Fr = Tr(X X†)`; they are sensitive
//! to global phase.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ring::{QuadForm, RingScalar};

/// Tolerance on `‖U†U − I‖_Fr` for floating-point inputs.
pub const UNITARY_TOLERANCE: f64 = 1e-8;

/// Tolerance on `|‖ψ‖ − 1|` for floating-point unit vectors.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Relative inflation applied to accumulated double-precision sums so the
/// returned distances stay upper bounds.
const ROUNDOFF_INFLATION: f64 = 1.0 + 1e-11;

pub type FloatVector = Vec<Complex64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingVector(pub Vec<RingScalar>);

impl RingVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![RingScalar::zero(); dim])
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = RingScalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[RingScalar] {
        &self.0
    }

    /// `Σ conj(vᵢ)·wᵢ`.
    pub fn inner_product(&self, other: &RingVector) -> Result<RingScalar> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(RingScalar::zero(), |acc, (a, b)| &acc + &(&a.conj() * b)))
    }

    pub fn norm_sq(&self) -> RingScalar {
        self.0
            .iter()
            .filter(|x| !x.is_zero())
            .fold(RingScalar::zero(), |acc, x| &acc + &x.norm_sq())
    }

    pub fn is_unit(&self) -> bool {
        self.norm_sq().is_one()
    }

    /// Largest smallest-denominator-exponent over the entries.
    pub fn sde(&self) -> u32 {
        self.0.iter().map(RingScalar::sde).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &RingScalar) -> RingVector {
        RingVector(self.0.iter().map(|x| s * x).collect())
    }

    pub fn sub(&self, other: &RingVector) -> RingVector {
        RingVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Nearest doubles; diagnostics only.
    pub fn to_float(&self) -> FloatVector {
        self.0.iter().map(RingScalar::to_c64).collect()
    }
}

/// Square matrix over the ring, stored column-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    cols: Vec<RingVector>,
}

impl RingMatrix {
    pub fn from_columns(cols: Vec<RingVector>) -> Result<Self> {
        let dim = cols.len();
        for c in &cols {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        Ok(Self { cols })
    }

    pub fn from_rows(rows: Vec<Vec<RingScalar>>) -> Result<Self> {
        let dim = rows.len();
        let mut cols = vec![Vec::with_capacity(dim); dim];
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (c, x) in row.into_iter().enumerate() {
                cols[c].push(x);
            }
        }
        Self::from_columns(cols.into_iter().map(RingVector).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            cols: (0..dim).map(|j| RingVector::basis(dim, j)).collect(),
        }
    }

    pub fn diagonal(entries: Vec<RingScalar>) -> Self {
        let dim = entries.len();
        Self {
            cols: entries
                .into_iter()
                .enumerate()
                .map(|(j, x)| {
                    let mut v = RingVector::zeros(dim);
                    v.0[j] = x;
                    v
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &RingScalar {
        &self.cols[col].0[row]
    }

    pub fn column(&self, j: usize) -> &RingVector {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[RingVector] {
        &self.cols
    }

    pub fn rows(&self) -> Vec<Vec<RingScalar>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.get(r, c).clone()).collect())
            .collect()
    }

    pub fn adjoint(&self) -> RingMatrix {
        let n = self.dim();
        let cols = (0..n)
            .map(|c| RingVector((0..n).map(|r| self.get(c, r).conj()).collect()))
            .collect();
        RingMatrix { cols }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect::<Result<_>>()?;
        Ok(RingMatrix { cols })
    }

    pub fn apply(&self, v: &RingVector) -> Result<RingVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        let mut out = RingVector::zeros(self.dim());
        for (x, col) in v.0.iter().zip(&self.cols) {
            if x.is_zero() {
                continue;
            }
            for (o, m) in out.0.iter_mut().zip(&col.0) {
                if !m.is_zero() {
                    *o = &*o + &(m * x);
                }
            }
        }
        Ok(out)
    }

    /// `M†M = I` with exact scalar equality.
    pub fn is_unitary_exact(&self) -> bool {
        let n = self.dim();
        if n == 0 || !n.is_power_of_two() {
            return false;
        }
        for i in 0..n {
            for j in i..n {
                let ip = match self.cols[i].inner_product(&self.cols[j]) {
                    Ok(x) => x,
                    Err(_) => return false,
                };
                let ok = if i == j { ip.is_one() } else { ip.is_zero() };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// `I − 2|φ⟩⟨φ|`.
    pub fn reflection(phi: &RingVector) -> RingMatrix {
        let n = phi.dim();
        let two = RingScalar::from_int(2);
        let cols = (0..n)
            .map(|c| {
                let f = &two * &phi.0[c].conj();
                RingVector(
                    (0..n)
                        .map(|r| {
                            let p = &phi.0[r] * &f;
                            if r == c {
                                &RingScalar::one() - &p
                            } else {
                                -p
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        RingMatrix { cols }
    }

    pub fn sde(&self) -> u32 {
        self.cols.iter().map(RingVector::sde).max().unwrap_or(0)
    }

    pub fn to_quad_rows(&self) -> Vec<Vec<QuadForm>> {
        self.rows()
            .iter()
            .map(|r| r.iter().map(RingScalar::to_quad).collect())
            .collect()
    }

    /// Nearest doubles; diagnostics only.
    pub fn to_float(&self) -> FloatMatrix {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(self.get(r, c).to_c64());
            }
        }
        FloatMatrix { dim: n, data }
    }
}

/// Square complex matrix in double precision, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl FloatMatrix {
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, col: usize) -> FloatVector {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> FloatMatrix {
        let n = self.dim;
        let mut out = FloatMatrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &FloatMatrix) -> FloatMatrix {
        let n = self.dim;
        assert_eq!(n, other.dim, "dimension mismatch");
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * other.get(k, c);
                }
            }
        }
        FloatMatrix { dim: n, data }
    }

    /// `‖U†U − I‖_Fr`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        frobenius_float(&p, &FloatMatrix::identity(self.dim))
    }

    pub fn is_unitary(&self) -> bool {
        self.dim.is_power_of_two() && self.unitarity_defect() <= UNITARY_TOLERANCE
    }
}

/// Plain Frobenius distance between two double matrices.
pub fn frobenius_float(a: &FloatMatrix, b: &FloatMatrix) -> f64 {
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `I − 2|ψ⟩⟨ψ|` in double precision.
pub fn reflection_float(psi: &[Complex64]) -> FloatMatrix {
    let n = psi.len();
    let mut m = FloatMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            let v = m.get(r, c) - 2.0 * psi[r] * psi[c].conj();
            m.set(r, c, v);
        }
    }
    m
}

/// Certified upper bound on `‖A − B‖_Fr`, with `B` evaluated through
/// complex enclosures of its exact entries.
pub fn frobenius_distance(a: &FloatMatrix, b: &RingMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = 0.0;
    for c in 0..n {
        for r in 0..n {
            acc += entry_gap(a.get(r, c), b.get(r, c)).powi(2);
        }
    }
    Ok(inflate(acc.sqrt()))
}

/// `|x − y|` upper bound for a double `x` and exact `y`.
fn entry_gap(x: Complex64, y: &RingScalar) -> f64 {
    if y.is_zero() {
        return x.norm();
    }
    let (center, radius) = y.to_complex(64).to_f64_disk();
    (x - center).norm() + radius
}

fn inflate(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ROUNDOFF_INFLATION
    }
}

/// Certified upper bound on `‖ψ − φ‖`.
pub fn vector_distance(psi: &[Complex64], phi: &RingVector) -> Result<f64> {
    if psi.len() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: phi.dim(),
        });
    }
    let acc: f64 = psi
        .iter()
        .zip(phi.entries())
        .map(|(x, y)| entry_gap(*x, y).powi(2))
        .sum();
    Ok(inflate(acc.sqrt()))
}

/// `2√2·‖ψ − φ‖`, an upper bound on `‖R_ψ − R_φ‖_Fr`.
pub fn reflection_distance_bound(psi: &[Complex64], phi: &RingVector) -> Result<f64> {
    let n = norm(psi);
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(format!("‖ψ‖ = {n}")));
    }
    if !phi.is_unit() {
        return Err(Error::NotNormalized("φ is not an exact unit vector".into()));
    }
    Ok(inflate(2.0 * std::f64::consts::SQRT_2 * vector_distance(psi, phi)?))
}
