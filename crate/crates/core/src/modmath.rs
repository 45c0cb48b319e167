//! Foundational modular arithmetic.
//!
//! Everything downstream reduces to the primitives here: exponentiation,
//! single and batch inversion, Jacobi symbols, and powers of 2×2 / 3×3
//! matrices. Moduli up to `p²` for `p` well beyond the largest published
//! zero are supported; [`mul_mod`] widens through 32-bit limbs once the
//! modulus no longer fits in a `u64`.

use crate::error::{Error, Result};

/// Exclusive upper bound on primes accepted by [`PrimeContext`].
///
/// `p² < 2⁹⁴` keeps every intermediate of [`mul_mod`] inside `u128`.
pub const MAX_SUPPORTED_PRIME: u64 = 1 << 47;

/// Default block length for prefix-product batch inversion.
pub const DEFAULT_BATCH_BLOCK: usize = 4096;

/// A verified prime with its square cached.
///
/// Construction runs the deterministic Miller–Rabin test, so holding a
/// `PrimeContext` is proof that `p` is prime and that `p²` fits the
/// supported width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    p_squared: u128,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_SUPPORTED_PRIME {
            return Err(Error::ResourceLimit("prime above supported width"));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeContext {
            p,
            p_squared: u128::from(p) * u128::from(p),
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn p_squared(&self) -> u128 {
        self.p_squared
    }
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

/// Montgomery (REDC) multiplication for an odd modulus below 2⁶³.
///
/// `mul(a, b)` returns `a·b·R⁻¹ mod m` with `R = 2⁶⁴`. The reciprocal-sum
/// inner loops feed raw values through chained `mul`s; the `R⁻¹` drift
/// cancels between the forward prefix-product pass and the backward
/// inverse pass, so no conversion into Montgomery form is ever needed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Montgomery {
    m: u64,
    neg_inv: u64, // −m⁻¹ mod 2⁶⁴
}

impl Montgomery {
    pub(crate) fn new(m: u64) -> Self {
        debug_assert!(m % 2 == 1 && m >> 63 == 0);
        // Newton iteration: x ← x(2 − mx) doubles the valid bits; odd m
        // starts with 3 correct bits (m·m ≡ 1 mod 8)
        let mut inv = m;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        Montgomery {
            m,
            neg_inv: inv.wrapping_neg(),
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.m && b < self.m);
        let t = u128::from(a) * u128::from(b);
        let correction = (t as u64).wrapping_mul(self.neg_inv);
        let reduced = ((t + u128::from(correction) * u128::from(self.m)) >> 64) as u64;
        if reduced >= self.m {
            reduced - self.m
        } else {
            reduced
        }
    }
}

#[inline]
pub(crate) fn add_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(a < m && b < m);
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(a < m && b < m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `a·b mod m` for moduli up to 2⁹⁶.
///
/// The fast path multiplies directly in `u128`. Above 64 bits the product
/// is accumulated Horner-style over the 32-bit limbs of `b`; with
/// `m < 2⁹⁶` every intermediate stays below `2¹²⁸`.
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(m >= 1 && m >> 96 == 0);
    let a = a % m;
    let b = b % m;
    if m <= u128::from(u64::MAX) {
        return a * b % m;
    }
    let mut acc = 0u128;
    for shift in [64u32, 32, 0] {
        acc = (acc << 32) % m;
        acc = (acc + a * ((b >> shift) & 0xffff_ffff)) % m;
    }
    acc
}

#[inline]
pub(crate) fn add_mod_wide(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod_wide(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

// Square-and-multiply in the Montgomery domain; requires odd m < 2⁶³.
pub(crate) fn odd_mod_pow_u64(base: u64, exponent: u128, m: u64) -> u64 {
    debug_assert!(m % 2 == 1 && m >> 63 == 0 && m >= 3);
    let mont = Montgomery::new(m);
    let r = ((1u128 << 64) % u128::from(m)) as u64;
    let r2 = (u128::from(r) * u128::from(r) % u128::from(m)) as u64;
    let mut base = mont.mul(base % m, r2);
    let mut acc = r;
    let mut exp = exponent;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mont.mul(acc, base);
        }
        base = mont.mul(base, base);
        exp >>= 1;
    }
    mont.mul(acc, 1)
}

/// `base^exponent mod modulus` by square-and-multiply.
pub fn mod_pow(base: u128, exponent: u128, modulus: u128) -> Result<u128> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    if modulus >> 96 != 0 {
        return Err(Error::ResourceLimit("modulus above supported width"));
    }
    if modulus % 2 == 1 && modulus >> 63 == 0 && modulus >= 3 {
        return Ok(u128::from(odd_mod_pow_u64(
            (base % modulus) as u64,
            exponent,
            modulus as u64,
        )));
    }
    let mut base = base % modulus;
    let mut exp = exponent;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    Ok(acc)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128) {
    // returns (gcd, x) with a·x ≡ gcd (mod b)
    let (mut old_r, mut r) = (a, b);
    let (mut old_x, mut x) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
    }
    (old_r, old_x)
}

/// Inverse of `a` modulo `modulus` (extended Euclid).
pub fn mod_inv(a: u64, modulus: u64) -> Result<u64> {
    Ok(mod_inv_wide(u128::from(a), u128::from(modulus))? as u64)
}

/// Inverse for wide moduli such as `p²`.
pub fn mod_inv_wide(a: u128, modulus: u128) -> Result<u128> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    if modulus >> 96 != 0 {
        return Err(Error::ResourceLimit("modulus above supported width"));
    }
    let reduced = a % modulus;
    let (g, x) = ext_gcd(reduced as i128, modulus as i128);
    if g != 1 {
        return Err(Error::NonInvertible { value: a, modulus });
    }
    Ok(x.rem_euclid(modulus as i128) as u128)
}

/// Elementwise inverses of `values` mod `p` via prefix-product batching.
///
/// One true inversion plus `3(n−1)` multiplications per block.
pub fn batch_inv(values: &[u64], p: u64) -> Result<Vec<u64>> {
    batch_inv_with_block(values, p, DEFAULT_BATCH_BLOCK)
}

pub fn batch_inv_with_block(values: &[u64], p: u64, block: usize) -> Result<Vec<u64>> {
    if p < 2 {
        return Err(Error::InvalidModulus(u128::from(p)));
    }
    let block = block.max(1);
    let mut out = vec![0u64; values.len()];
    let mut prefix: Vec<u64> = Vec::with_capacity(block.min(values.len()));
    for (chunk_no, chunk) in values.chunks(block).enumerate() {
        let base = chunk_no * block;
        prefix.clear();
        let mut acc = 1u64;
        for (i, &v) in chunk.iter().enumerate() {
            let v = v % p;
            if v == 0 {
                return Err(Error::BatchNonInvertible {
                    index: base + i,
                    modulus: p,
                });
            }
            acc = mul_mod_u64(acc, v, p);
            prefix.push(acc);
        }
        let mut inv = mod_inv(acc, p)?;
        for i in (0..chunk.len()).rev() {
            out[base + i] = if i == 0 {
                inv
            } else {
                mul_mod_u64(inv, prefix[i - 1], p)
            };
            inv = mul_mod_u64(inv, chunk[i] % p, p);
        }
    }
    Ok(out)
}

/// Jacobi symbol `(a/n)` for odd positive `n`, by the binary algorithm.
pub fn jacobi(a: i128, n: u64) -> Result<i32> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument("jacobi requires odd positive n"));
    }
    let mut a = a.rem_euclid(i128::from(n)) as u64;
    let mut n = n;
    let mut sign = 1i32;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 {
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        Ok(sign)
    } else {
        Ok(0)
    }
}

// First 13 primes: deterministic below 3.317×10²⁴ (Sorenson–Webster),
// hence for the whole u64 range.
const MILLER_RABIN_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic Miller–Rabin primality test for `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MILLER_RABIN_BASES {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let fast = n >> 63 == 0;
    'bases: for &a in &MILLER_RABIN_BASES {
        let mut x = if fast {
            odd_mod_pow_u64(a, u128::from(d), n)
        } else {
            let mut x = 1u64;
            let mut base = a % n;
            let mut e = d;
            while e > 0 {
                if e & 1 == 1 {
                    x = mul_mod_u64(x, base, n);
                }
                base = mul_mod_u64(base, base, n);
                e >>= 1;
            }
            x
        };
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Row-major 2×2 or 3×3 matrix with entries reduced mod a fixed modulus.
///
/// Negative entries are canonicalized into `[0, m)` at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallMatrix {
    dim: usize,
    modulus: u128,
    entries: [u128; 9],
}

impl SmallMatrix {
    pub fn new(dim: usize, entries: &[i128], modulus: u128) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument("matrix dimension must be 2 or 3"));
        }
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        if modulus >> 96 != 0 {
            return Err(Error::ResourceLimit("modulus above supported width"));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument("entry count must equal dim²"));
        }
        let mut reduced = [0u128; 9];
        for (slot, &e) in reduced.iter_mut().zip(entries) {
            *slot = e.rem_euclid(modulus as i128) as u128;
        }
        Ok(SmallMatrix {
            dim,
            modulus,
            entries: reduced,
        })
    }

    pub fn identity(dim: usize, modulus: u128) -> Result<Self> {
        let mut m = SmallMatrix::new(dim, &vec![0; dim * dim], modulus)?;
        for i in 0..dim {
            m.entries[i * dim + i] = 1 % modulus;
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> u128 {
        assert!(row < self.dim && col < self.dim);
        self.entries[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.modulus, rhs.modulus);
        let d = self.dim;
        let m = self.modulus;
        let mut out = [0u128; 9];
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0u128;
                for k in 0..d {
                    acc = add_mod_wide(
                        acc,
                        mul_mod(self.entries[r * d + k], rhs.entries[k * d + c], m),
                        m,
                    );
                }
                out[r * d + c] = acc;
            }
        }
        SmallMatrix {
            dim: d,
            modulus: m,
            entries: out,
        }
    }

    /// `self^n` by repeated squaring; `n = 0` yields the identity.
    pub fn pow(&self, mut n: u128) -> SmallMatrix {
        let mut result = SmallMatrix::identity(self.dim, self.modulus)
            .expect("dimension and modulus already validated");
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }
}
