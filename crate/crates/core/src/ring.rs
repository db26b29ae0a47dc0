//! Exact arithmetic in ℤ[ω] (ω = e^{iπ/4}) and in ℤ[i, 1/√2].
//!
//! An [`OmegaInt`] is `c0 + c1·ω + c2·ω² + c3·ω³` with arbitrary-precision
//! integer coefficients; `ω⁴ = −1` is the only reduction rule, so products are
//! negacyclic convolutions. A [`RingScalar`] is `u / √2^k` with `u` an
//! [`OmegaInt`], kept in the canonical form where `k = 0` or `u` is not
//! divisible by `√2 = ω − ω³`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Element `c0 + c1·ω + c2·ω² + c3·ω³` of ℤ[ω].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OmegaInt {
    c: [BigInt; 4],
}

impl OmegaInt {
    pub fn new(c0: BigInt, c1: BigInt, c2: BigInt, c3: BigInt) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }

    pub fn from_i64s(c: [i64; 4]) -> Self {
        Self {
            c: c.map(BigInt::from),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_i64s([1, 0, 0, 0])
    }

    pub fn from_int(n: BigInt) -> Self {
        Self::new(n, BigInt::zero(), BigInt::zero(), BigInt::zero())
    }

    /// `ω^l` for any integer `l` (taken mod 8).
    pub fn omega_pow(l: i64) -> Self {
        let mut x = Self::one();
        x.mul_omega_pow(l);
        x
    }

    /// `√2 = ω − ω³`.
    pub fn sqrt2() -> Self {
        Self::from_i64s([0, 1, 0, -1])
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.c
    }

    pub fn into_coeffs(self) -> [BigInt; 4] {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Multiply in place by `ω^l`; a signed cyclic shift of the coefficients.
    pub fn mul_omega_pow(&mut self, l: i64) {
        let l = l.rem_euclid(8);
        if l >= 4 {
            self.negate();
        }
        for _ in 0..(l % 4) {
            self.c.rotate_right(1);
            let x = &mut self.c[0];
            *x = -std::mem::take(x);
        }
    }

    pub fn negate(&mut self) {
        for x in self.c.iter_mut() {
            *x = -std::mem::take(x);
        }
    }

    /// Complex conjugation, `ω ↦ ω⁻¹ = −ω³`.
    pub fn conj(&self) -> Self {
        let [c0, c1, c2, c3] = &self.c;
        Self::new(c0.clone(), -c3, -c2, -c1)
    }

    /// `u` is divisible by `√2` iff `c0 + c2` and `c1 + c3` are both even.
    pub fn is_sqrt2_divisible(&self) -> bool {
        let [c0, c1, c2, c3] = &self.c;
        c0.is_even() == c2.is_even() && c1.is_even() == c3.is_even()
    }

    /// `u·√2`.
    pub fn mul_sqrt2(&self) -> Self {
        let [c0, c1, c2, c3] = &self.c;
        Self::new(c1 - c3, c0 + c2, c1 + c3, c2 - c0)
    }

    /// `u/√2`, or `None` when `u` is not divisible by `√2`.
    pub fn div_sqrt2(&self) -> Option<Self> {
        if !self.is_sqrt2_divisible() {
            return None;
        }
        let [c0, c1, c2, c3] = &self.c;
        Some(Self::new(
            (c1 - c3) >> 1,
            (c0 + c2) >> 1,
            (c1 + c3) >> 1,
            (c2 - c0) >> 1,
        ))
    }

    /// In-place `u ← u/√2`; the caller guarantees divisibility.
    pub(crate) fn div_sqrt2_in_place(&mut self) {
        debug_assert!(self.is_sqrt2_divisible());
        let [c0, c1, c2, c3] = std::mem::take(&mut self.c);
        self.c = [
            (&c1 - &c3) >> 1,
            (&c0 + &c2) >> 1,
            (c1 + c3) >> 1,
            (c2 - c0) >> 1,
        ];
    }

    /// Multiply by `√2^e`.
    pub fn mul_sqrt2_pow(&self, e: u32) -> Self {
        let mut out = self.clone();
        let half = (e / 2) as usize;
        if half > 0 {
            for x in out.c.iter_mut() {
                *x <<= half;
            }
        }
        if e % 2 == 1 {
            out = out.mul_sqrt2();
        }
        out
    }

    /// Coefficients mod 2 packed as a 4-bit pattern `c0 c1 c2 c3` (c0 is the
    /// most significant bit).
    pub fn residue_mod2(&self) -> u8 {
        self.c.iter().fold(0u8, |acc, x| (acc << 1) | u8::from(x.is_odd()))
    }

    /// `u·ū`, a real element (ω and ω³ coefficients satisfy c1 = −c3, c2 = 0).
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Number of trailing zero bits shared by all coefficients (`None` for zero).
    fn common_trailing_zeros(&self) -> Option<u64> {
        self.c.iter().filter_map(|x| x.trailing_zeros()).min()
    }

    fn shr_all(&mut self, bits: u64) {
        for x in self.c.iter_mut() {
            *x >>= bits as usize;
        }
    }
}

impl fmt::Display for OmegaInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c0, c1, c2, c3] = &self.c;
        write!(f, "({c0}, {c1}, {c2}, {c3})")
    }
}

impl Add<&OmegaInt> for &OmegaInt {
    type Output = OmegaInt;
    fn add(self, rhs: &OmegaInt) -> OmegaInt {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&OmegaInt> for OmegaInt {
    fn add_assign(&mut self, rhs: &OmegaInt) {
        for (x, y) in self.c.iter_mut().zip(rhs.c.iter()) {
            *x += y;
        }
    }
}

impl Sub<&OmegaInt> for &OmegaInt {
    type Output = OmegaInt;
    fn sub(self, rhs: &OmegaInt) -> OmegaInt {
        let mut out = self.clone();
        for (x, y) in out.c.iter_mut().zip(rhs.c.iter()) {
            *x -= y;
        }
        out
    }
}

impl Neg for OmegaInt {
    type Output = OmegaInt;
    fn neg(mut self) -> OmegaInt {
        self.negate();
        self
    }
}

impl Mul<&OmegaInt> for &OmegaInt {
    type Output = OmegaInt;
    fn mul(self, rhs: &OmegaInt) -> OmegaInt {
        let mut out: [BigInt; 4] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                if i + j < 4 {
                    out[i + j] += p;
                } else {
                    out[i + j - 4] -= p;
                }
            }
        }
        OmegaInt { c: out }
    }
}

/// Element `u / √2^k` of ℤ[i, 1/√2].
///
/// Values produced by arithmetic are always canonical: `k = 0` or `u` is not
/// divisible by `√2`, and zero has `k = 0`. Equality compares values, so a
/// non-canonical scalar built with [`RingScalar::from_raw`] still compares
/// equal to its canonical form.
#[derive(Clone, Debug, Default)]
pub struct RingScalar {
    u: OmegaInt,
    k: u32,
}

impl RingScalar {
    /// Canonicalizing constructor.
    pub fn new(u: OmegaInt, k: u32) -> Self {
        Self { u, k }.canonicalize()
    }

    /// Build `u / √2^k` without normalizing.
    pub fn from_raw(u: OmegaInt, k: u32) -> Self {
        Self { u, k }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(OmegaInt::from_int(BigInt::from(n)), 0)
    }

    pub fn omega_pow(l: i64) -> Self {
        Self::from_raw(OmegaInt::omega_pow(l), 0)
    }

    /// `1/√2`.
    pub fn inv_sqrt2() -> Self {
        Self::from_raw(OmegaInt::one(), 1)
    }

    /// `(re + i·im) / 2^m`.
    pub fn dyadic_complex(re: BigInt, im: BigInt, m: u32) -> Self {
        Self::new(OmegaInt::new(re, BigInt::zero(), im, BigInt::zero()), 2 * m)
    }

    pub fn numerator(&self) -> &OmegaInt {
        &self.u
    }

    /// Denominator exponent `k` of the stored representation. For canonical
    /// values this is the smallest denominator exponent.
    pub fn exponent(&self) -> u32 {
        self.k
    }

    /// Smallest denominator exponent.
    pub fn sde(&self) -> u32 {
        self.clone().canonicalize().k
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero()
    }

    pub fn is_one(&self) -> bool {
        let c = self.clone().canonicalize();
        c.k == 0 && c.u == OmegaInt::one()
    }

    pub fn canonicalize(mut self) -> Self {
        if self.u.is_zero() {
            self.k = 0;
            return self;
        }
        if self.k >= 2 {
            let tz = self.u.common_trailing_zeros().unwrap_or(0);
            let h = tz.min(u64::from(self.k / 2));
            if h > 0 {
                self.u.shr_all(h);
                self.k -= 2 * h as u32;
            }
        }
        while self.k > 0 && self.u.is_sqrt2_divisible() {
            self.u.div_sqrt2_in_place();
            self.k -= 1;
        }
        self
    }

    /// Numerator of this value expressed over `√2^k` (requires `k ≥` sde).
    pub fn numerator_at(&self, k: u32) -> OmegaInt {
        if k >= self.k {
            self.u.mul_sqrt2_pow(k - self.k)
        } else {
            let c = self.clone().canonicalize();
            assert!(k >= c.k, "exponent {k} below sde {}", c.k);
            c.u.mul_sqrt2_pow(k - c.k)
        }
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.u.conj(), self.k)
    }

    pub fn div_sqrt2(&self) -> Self {
        Self::new(self.u.clone(), self.k + 1)
    }

    pub fn mul_omega_pow(&self, l: i64) -> Self {
        let mut u = self.u.clone();
        u.mul_omega_pow(l);
        Self::from_raw(u, self.k)
    }

    /// `|x|²` as a ring scalar (real-valued).
    pub fn norm_sq(&self) -> Self {
        Self::new(self.u.norm_sq(), 2 * self.k)
    }

    pub fn to_quad(&self) -> QuadForm {
        QuadForm::from_scalar(self)
    }

    pub fn from_quad(q: &QuadForm) -> Self {
        q.to_scalar()
    }

    /// Certified complex enclosure of the value with radius at most
    /// `2^{-precision_bits}`.
    pub fn to_complex(&self, precision_bits: u32) -> ComplexInterval {
        ComplexInterval::enclose(self, precision_bits.max(32))
    }

    /// Nearest double, for display and diagnostics only.
    pub fn to_c64(&self) -> Complex64 {
        self.to_complex(64).center()
    }
}

impl PartialEq for RingScalar {
    fn eq(&self, other: &Self) -> bool {
        use std::cmp::Ordering::*;
        match self.k.cmp(&other.k) {
            Equal => self.u == other.u,
            Less => self.u.mul_sqrt2_pow(other.k - self.k) == other.u,
            Greater => self.u == other.u.mul_sqrt2_pow(self.k - other.k),
        }
    }
}

impl Eq for RingScalar {}

impl fmt::Display for RingScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/√2^{}", self.u, self.k)
    }
}

fn add_scalars(x: &RingScalar, y: &RingScalar, negate_y: bool) -> RingScalar {
    let k = x.k.max(y.k);
    let mut u = x.u.mul_sqrt2_pow(k - x.k);
    let v = y.u.mul_sqrt2_pow(k - y.k);
    if negate_y {
        u = &u - &v;
    } else {
        u += &v;
    }
    RingScalar::new(u, k)
}

impl Add<&RingScalar> for &RingScalar {
    type Output = RingScalar;
    fn add(self, rhs: &RingScalar) -> RingScalar {
        add_scalars(self, rhs, false)
    }
}

impl Add for RingScalar {
    type Output = RingScalar;
    fn add(self, rhs: RingScalar) -> RingScalar {
        add_scalars(&self, &rhs, false)
    }
}

impl Sub<&RingScalar> for &RingScalar {
    type Output = RingScalar;
    fn sub(self, rhs: &RingScalar) -> RingScalar {
        add_scalars(self, rhs, true)
    }
}

impl Sub for RingScalar {
    type Output = RingScalar;
    fn sub(self, rhs: RingScalar) -> RingScalar {
        add_scalars(&self, &rhs, true)
    }
}

impl Mul<&RingScalar> for &RingScalar {
    type Output = RingScalar;
    fn mul(self, rhs: &RingScalar) -> RingScalar {
        RingScalar::new(&self.u * &rhs.u, self.k + rhs.k)
    }
}

impl Mul for RingScalar {
    type Output = RingScalar;
    fn mul(self, rhs: RingScalar) -> RingScalar {
        &self * &rhs
    }
}

impl Neg for RingScalar {
    type Output = RingScalar;
    fn neg(self) -> RingScalar {
        RingScalar::from_raw(-self.u, self.k)
    }
}

impl Neg for &RingScalar {
    type Output = RingScalar;
    fn neg(self) -> RingScalar {
        -self.clone()
    }
}

/// Surface syntax `((a + b√2) + i(c + d√2)) / √2^kappa`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub kappa: u32,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64, kappa: u32) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            kappa,
        }
    }

    /// `a + b√2 + i(c + d√2)` maps to the ℤ[ω] quadruple `(a, b+d, c, d−b)`.
    pub fn to_scalar(&self) -> RingScalar {
        let u = OmegaInt::new(
            self.a.clone(),
            &self.b + &self.d,
            self.c.clone(),
            &self.d - &self.b,
        );
        RingScalar::new(u, self.kappa)
    }

    /// Inverse of [`QuadForm::to_scalar`] on canonical values; when the ω and
    /// ω³ coefficients have different parity the numerator is multiplied by
    /// `√2` and `kappa` is one larger than the sde.
    pub fn from_scalar(x: &RingScalar) -> Self {
        let x = x.clone().canonicalize();
        let (u, k) = if x.u.c[1].is_even() == x.u.c[3].is_even() {
            (x.u, x.k)
        } else {
            (x.u.mul_sqrt2(), x.k + 1)
        };
        let [u0, u1, u2, u3] = u.c;
        Self {
            a: u0,
            b: (&u1 - &u3) >> 1,
            c: u2,
            d: (u1 + u3) >> 1,
            kappa: k,
        }
    }
}

fn bigint_to_json(x: &BigInt) -> serde_json::Number {
    match x.to_i64() {
        Some(v) => v.into(),
        None => x
            .to_string()
            .parse()
            .expect("integer literal is a valid JSON number"),
    }
}

fn bigint_from_json<E: serde::de::Error>(n: &serde_json::Number) -> std::result::Result<BigInt, E> {
    if let Some(v) = n.as_i64() {
        return Ok(v.into());
    }
    n.to_string()
        .parse::<BigInt>()
        .map_err(|_| E::custom(format!("expected an integer, found {n}")))
}

#[derive(Serialize, Deserialize)]
struct QuadFormJson {
    a: serde_json::Number,
    b: serde_json::Number,
    c: serde_json::Number,
    d: serde_json::Number,
    kappa: u32,
}

impl Serialize for QuadForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadFormJson {
            a: bigint_to_json(&self.a),
            b: bigint_to_json(&self.b),
            c: bigint_to_json(&self.c),
            d: bigint_to_json(&self.d),
            kappa: self.kappa,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QuadFormJson::deserialize(d)?;
        Ok(QuadForm {
            a: bigint_from_json(&raw.a)?,
            b: bigint_from_json(&raw.b)?,
            c: bigint_from_json(&raw.c)?,
            d: bigint_from_json(&raw.d)?,
            kappa: raw.kappa,
        })
    }
}

/// Disk in the complex plane with dyadic center `(re + i·im) / 2^scale` and
/// radius `radius / 2^scale`; the enclosed ring value lies inside the disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: BigInt,
    pub im: BigInt,
    pub radius: BigUint,
    pub scale: u64,
}

impl ComplexInterval {
    fn enclose(x: &RingScalar, bits: u32) -> Self {
        // Re u = (2c0 + (c1 − c3)√2)/2 and Im u = (2c2 + (c1 + c3)√2)/2.
        // Each part is carried as (P + Q√2) / 2^e.
        let [c0, c1, c2, c3] = &x.u.c;
        let mut re = (c0 << 1usize, c1 - c3);
        let mut im = (c2 << 1usize, c1 + c3);
        let mut e = 1u64 + u64::from(x.k / 2);
        if x.k % 2 == 1 {
            // (P + Q√2)/√2 = (2Q + P√2)/2
            re = (&re.1 << 1usize, re.0);
            im = (&im.1 << 1usize, im.0);
            e += 1;
        }
        if re.1.is_zero() && im.1.is_zero() {
            return Self {
                re: re.0,
                im: im.0,
                radius: BigUint::zero(),
                scale: e,
            };
        }
        let q_bits = re.1.bits().max(im.1.bits());
        let p = u64::from(bits) + q_bits.saturating_sub(e) + 2;
        // floor(√2 · 2^p) via an integer square root of 2^{2p+1}.
        let s = (BigUint::one() << (2 * p + 1) as usize).sqrt();
        let s = BigInt::from_biguint(Sign::Plus, s);
        let center = |(pp, qq): (BigInt, BigInt)| (pp << p as usize) + qq * &s;
        let radius = re.1.magnitude() + im.1.magnitude();
        Self {
            re: center(re),
            im: center(im),
            radius,
            scale: p + e,
        }
    }

    /// Center rounded to double precision.
    pub fn center(&self) -> Complex64 {
        Complex64::new(
            dyadic_to_f64(&self.re, self.scale).0,
            dyadic_to_f64(&self.im, self.scale).0,
        )
    }

    /// Radius as a double, an upper bound on the exact radius.
    pub fn radius_f64(&self) -> f64 {
        if self.radius.is_zero() {
            return 0.0;
        }
        let r = BigInt::from_biguint(Sign::Plus, self.radius.clone());
        let (v, err) = dyadic_to_f64(&r, self.scale);
        (v + err) * (1.0 + f64::EPSILON)
    }

    /// Double-precision center together with a radius that bounds the
    /// distance from that center to the exact value.
    pub fn to_f64_disk(&self) -> (Complex64, f64) {
        let (re, re_err) = dyadic_to_f64(&self.re, self.scale);
        let (im, im_err) = dyadic_to_f64(&self.im, self.scale);
        let r = self.radius_f64() + re_err + im_err;
        (Complex64::new(re, im), r * (1.0 + f64::EPSILON))
    }
}

/// `n / 2^scale` as a double with an absolute error bound (zero when exact).
fn dyadic_to_f64(n: &BigInt, scale: u64) -> (f64, f64) {
    if n.is_zero() {
        return (0.0, 0.0);
    }
    let bits = n.bits();
    let tz = n.trailing_zeros().unwrap_or(0);
    let (mantissa, shift) = if bits <= 62 {
        (n.to_i64().expect("fits in 62 bits") as f64, 0i64)
    } else {
        let sh = bits - 62;
        ((n >> sh as usize).to_i64().expect("fits") as f64, sh as i64)
    };
    let exp = shift - scale as i64;
    let v = mantissa * pow2(exp);
    let exact = bits - tz <= 53 && v.is_normal();
    let err = if exact {
        0.0
    } else {
        // truncation below 62 bits plus f64 rounding, relative ≤ 2^-52
        v.abs() * 2f64.powi(-51) + pow2(exp).abs()
    };
    (v, err)
}

fn pow2(e: i64) -> f64 {
    let e = e.clamp(-1074, 1023) as i32;
    if e >= -1022 {
        2f64.powi(e)
    } else {
        2f64.powi(-1022) * 2f64.powi(e + 1022)
    }
}

impl RingScalar {
    /// True when the imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        let c = self.u.coeffs();
        c[2].is_zero() && (&c[1] + &c[3]).is_zero()
    }
}
