//! Fermat and Lucas-sequence quotients, all reduced mod `p`.
//!
//! Each quotient is computed mod `p²` followed by one exact integer
//! division by `p`. The exactness check stays enabled permanently: an
//! inexact division means a wrong index or a wrong Jacobi sign, and we
//! want that to surface as an error, not a silently wrong residue.

use crate::error::{Error, Result};
use crate::modmath::{self, PrimeContext, SmallMatrix};

/// Coefficients `(P, Q)` of a Lucas sequence `U_n(P, Q)` with
/// `U₀ = 0`, `U₁ = 1`, `U_n = P·U_{n−1} − Q·U_{n−2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LucasParams {
    pub p: i64,
    pub q: i64,
}

impl LucasParams {
    /// Fibonacci numbers, discriminant 5.
    pub const FIBONACCI: LucasParams = LucasParams { p: 1, q: -1 };
    /// Pell numbers (OEIS A000129), discriminant 8.
    pub const PELL: LucasParams = LucasParams { p: 2, q: -1 };
    /// The sequence 1, 4, 15, 56, 209, … (OEIS A001353), discriminant 12.
    pub const A001353: LucasParams = LucasParams { p: 4, q: 1 };
    /// The sequence 1, 10, 99, 980, 9701, … (OEIS A004189), discriminant 96.
    pub const A004189: LucasParams = LucasParams { p: 10, q: 1 };

    /// `D = P² − 4Q`.
    pub fn discriminant(&self) -> i128 {
        i128::from(self.p) * i128::from(self.p) - 4 * i128::from(self.q)
    }

    fn companion(&self, modulus: u128) -> Result<SmallMatrix> {
        SmallMatrix::new(2, &[i128::from(self.p), -i128::from(self.q), 1, 0], modulus)
    }
}

/// `q_p(b) = (b^(p−1) − 1)/p mod p`.
pub fn fermat_quotient(base: u64, ctx: PrimeContext) -> Result<u64> {
    let p = ctx.p();
    if p < 3 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "Fermat quotient requires p ≥ 3",
        });
    }
    if base.is_multiple_of(p) {
        return Err(Error::NonCoprime { base, p });
    }
    let r = modmath::mod_pow(u128::from(base), u128::from(p - 1), ctx.p_squared())?;
    exact_quotient(r - 1, p, "Fermat quotient")
}

/// `U_n(P, Q) mod modulus` via the 2×2 companion-matrix power.
pub fn lucas_u_mod(params: LucasParams, n: u128, modulus: u128) -> Result<u128> {
    Ok(params.companion(modulus)?.pow(n).entry(1, 0))
}

/// The Lucas quotient `U_{p−(D/p)}(P, Q)/p mod p`.
///
/// Requires `p ∤ 2QD`, which guarantees `p | U_{p−(D/p)}`.
pub fn lucas_quotient(params: LucasParams, ctx: PrimeContext) -> Result<u64> {
    let p = ctx.p();
    let d = params.discriminant();
    let guard = 2 * i128::from(params.q) * d;
    if guard % i128::from(p) == 0 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "p divides 2QD",
        });
    }
    let symbol = modmath::jacobi(d, p)?;
    let index = if symbol > 0 { p - 1 } else { p + 1 };
    let u = lucas_u_mod(params, u128::from(index), ctx.p_squared())?;
    exact_quotient(u, p, "Lucas quotient")
}

// The 3×3 matrix whose n-th power has f(n) in its top-left entry.
const SUN_MATRIX: [i128; 9] = [0, 3, -1, 1, -1, 1, 1, 0, 1];

/// `f(n) mod modulus` for the recurrence
/// `f(0)=1, f(1)=0, f(2)=2, f(n)=3f(n−2)−f(n−3)`.
pub fn sun_f(n: u128, modulus: u128) -> Result<u128> {
    Ok(SmallMatrix::new(3, &SUN_MATRIX, modulus)?
        .pow(n)
        .entry(0, 0))
}

/// Sun's composition `Z(p)`, selected by `p mod 9`.
///
/// Satisfies `Z(p) ≡ s(1,18) − 2q_p(2) (mod p)` where `s(1,18)` is the
/// reciprocal sum over `(⌊p/18⌋, ⌊p/9⌋]`.
pub fn sun_z(ctx: PrimeContext) -> Result<u64> {
    let p = ctx.p();
    if p <= 3 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "Z(p) requires p > 3",
        });
    }
    let m2 = ctx.p_squared();
    let mat = SmallMatrix::new(3, &SUN_MATRIX, m2)?;
    let pow = mat.pow(u128::from(p - 1));
    let f_prev = pow.entry(0, 0); // f(p−1)
    let pow = pow.mul(&mat);
    let f_mid = pow.entry(0, 0); // f(p)
    let pow = pow.mul(&mat);
    let f_next = pow.entry(0, 0); // f(p+1)

    let sub = |a, b| modmath::sub_mod_wide(a, b, m2);
    let combo = match p % 9 {
        1 | 8 => sub(f_next, 2 % m2),
        2 | 7 => sub(sub(f_mid, f_prev), 2 % m2),
        4 | 5 => sub(sub(sub(f_prev, f_next), f_mid), 2 % m2),
        _ => unreachable!("p > 3 is prime, so p mod 9 ∈ {{1,2,4,5,7,8}}"),
    };
    let q = exact_quotient(combo, p, "Z(p)")?;
    Ok(modmath::mul_mod_u64(3 % p, q, p))
}

// One exact division by p of a value already reduced mod p², then
// reduction mod p. Inexactness signals an arithmetic bug upstream.
fn exact_quotient(value: u128, p: u64, what: &str) -> Result<u64> {
    let p128 = u128::from(p);
    if !value.is_multiple_of(p128) {
        return Err(Error::InternalConsistency(format!(
            "{what} division by {p} is inexact (value {value})"
        )));
    }
    Ok(((value / p128) % p128) as u64)
}
