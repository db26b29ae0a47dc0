//! Integer subroutines for the norm correction in rounding: sums of four
//! squares, sums of two squares for primes `p ≡ 1 (mod 4)`, and a
//! Miller–Rabin primality test.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Inputs at or below this bound are solved by exhaustive search.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Default number of Miller–Rabin rounds; also the minimum accepted.
pub const MIN_ROUNDS: u32 = 20;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// `(a, b, c, d)` with `a² + b² + c² + d²` equal to the queried integer,
/// ordered `a ≥ b ≥ c ≥ d ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourSquare {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
    pub d: BigUint,
}

impl FourSquare {
    fn sorted(mut v: [BigUint; 4]) -> Self {
        v.sort_by(|x, y| y.cmp(x));
        let [a, b, c, d] = v;
        Self { a, b, c, d }
    }

    pub fn sum_of_squares(&self) -> BigUint {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .map(|x| x * x)
            .sum()
    }

    pub fn parts(&self) -> [&BigUint; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

/// Four-square decomposition of `n` using the given random source.
///
/// Factors of 4 are stripped first; small residues are searched exhaustively,
/// large ones by sampling `x, y` until `n − x² − y²` is a prime `≡ 1 (mod 4)`
/// and splitting that prime into two squares. The identity is checked before
/// returning.
pub fn four_square<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> FourSquare {
    if n.is_zero() {
        return FourSquare::sorted(Default::default());
    }
    let mut m = n.clone();
    let mut shift = 0usize;
    let four = BigUint::from(4u32);
    while (&m % &four).is_zero() {
        m >>= 2;
        shift += 1;
    }
    let parts = match m.to_u64() {
        Some(small) if small <= EXHAUSTIVE_LIMIT => {
            search_four_square(small).map(BigUint::from)
        }
        _ => random_four_square(&m, rng),
    };
    let result = FourSquare::sorted(parts.map(|x| x << shift));
    assert_eq!(&result.sum_of_squares(), n, "four-square identity failed");
    result
}

/// [`four_square`] with a ChaCha stream derived from `seed`.
pub fn four_square_seeded(n: &BigUint, seed: u64) -> FourSquare {
    four_square(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Exhaustive search, largest first component first.
pub fn search_four_square(n: u64) -> [u64; 4] {
    let mut a = n.sqrt();
    loop {
        let r1 = n - a * a;
        if r1 > 3 * a * a {
            break;
        }
        let mut b = a.min(r1.sqrt());
        loop {
            let r2 = r1 - b * b;
            if r2 > 2 * b * b {
                break;
            }
            let mut c = b.min(r2.sqrt());
            loop {
                let r3 = r2 - c * c;
                if r3 > c * c {
                    break;
                }
                let d = r3.sqrt();
                if d * d == r3 {
                    return [a, b, c, d];
                }
                if c == 0 {
                    break;
                }
                c -= 1;
            }
            if b == 0 {
                break;
            }
            b -= 1;
        }
        if a == 0 {
            break;
        }
        a -= 1;
    }
    unreachable!("every non-negative integer is a sum of four squares")
}

fn random_four_square<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> [BigUint; 4] {
    // x² + y² must be ≡ n − 1 (mod 4) so that p = n − x² − y² ≡ 1 (mod 4).
    let (x_par, y_par) = match (n % 4u32).to_u32().expect("small") {
        1 => (0u32, 0u32),
        2 => (1, 0),
        3 => (1, 1),
        _ => unreachable!("factors of 4 were stripped"),
    };
    let root = n.sqrt();
    let half = &root >> 1;
    loop {
        let x = (rng.gen_biguint_below(&(&half + 1u32)) << 1) + x_par;
        let x2 = &x * &x;
        if &x2 >= n {
            continue;
        }
        let rest: BigUint = n - &x2;
        let half_y = rest.sqrt() >> 1;
        let y = (rng.gen_biguint_below(&(&half_y + 1u32)) << 1) + y_par;
        let y2 = &y * &y;
        if y2 >= rest {
            continue;
        }
        let p: BigUint = rest - y2;
        if p.is_one() {
            return [x, y, BigUint::one(), BigUint::zero()];
        }
        if is_probable_prime_with(&p, MIN_ROUNDS, rng) {
            if let Ok((s, t)) = two_square_prime(&p, rng) {
                return [x, y, s, t];
            }
        }
    }
}

/// `(x, y)` with `x² + y² = p` and `x ≥ y`, for a prime `p ≡ 1 (mod 4)`.
pub fn two_square_prime<R: Rng + ?Sized>(p: &BigUint, rng: &mut R) -> Result<(BigUint, BigUint)> {
    if (p % 4u32) != BigUint::one() || !is_probable_prime_with(p, MIN_ROUNDS, rng) {
        return Err(Error::Precondition(format!(
            "{p} is not a prime congruent to 1 mod 4"
        )));
    }
    if p == &BigUint::from(5u32) {
        return Ok((2u32.into(), 1u32.into()));
    }
    let minus_one = p - 1u32;
    let exp = &minus_one >> 2;
    let s = loop {
        let c = rng.gen_biguint_range(&BigUint::from(2u32), &minus_one);
        let s = c.modpow(&exp, p);
        if (&s * &s) % p == minus_one {
            break s;
        }
    };
    // Euclid on (p, s) down to the first remainder below √p.
    let (mut a, mut b) = (p.clone(), s);
    while &b * &b > *p {
        let r = &a % &b;
        a = b;
        b = r;
    }
    let rest = p - &b * &b;
    let y = rest.sqrt();
    if &y * &y != rest {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    Ok(if b >= y { (b, y) } else { (y, b) })
}

/// Miller–Rabin with `rounds` (at least [`MIN_ROUNDS`]) bases drawn from a
/// fixed-seed stream, so the verdict is a deterministic function of `n`.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_b1_9e);
    is_probable_prime_with(n, rounds, &mut rng)
}

pub fn is_probable_prime_with<R: Rng + ?Sized>(n: &BigUint, rounds: u32, rng: &mut R) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == &BigUint::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().expect("n > 1");
    let d = &n_minus_one >> s as usize;
    let two = BigUint::from(2u32);
    'witness: for _ in 0..rounds.max(MIN_ROUNDS) {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}

/// Trial division, for tests and tiny inputs.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
