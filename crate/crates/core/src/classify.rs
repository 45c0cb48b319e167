//! Divisibility machinery for Harmonic numerators.
//!
//! Three rules force divisors of `H_n` algebraically (from `p | H_{p−1}`,
//! `p | H_{p(p−1)}`, `p | H_{p²−1}` for primes `p > 3`, plus Wolstenholme's
//! sharpening `p² | H_{p−1}`). Beyond those, a prime dividing some `H_n`
//! with `n < p − 1` must divide one with `n ≤ (p−3)/2` by the symmetry
//! `H_{p−1−n} ≡ H_n (mod p)`, which is what [`harmonic_scan`] exploits.
//! [`linear_form_scan`] works on exact reduced numerators instead, so it
//! can see composite divisors such as `121 | H₁₀`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic;
use crate::modmath::{self, PrimeContext};

/// Hard ceiling on [`linear_form_scan`] indices; exact numerators beyond
/// this are out of desk scale.
pub const LINEAR_SCAN_CEILING: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcedRule {
    /// `(n+1)² | H_n` when `n + 1` is a prime > 3.
    SquareOfNextPrime,
    /// `(1 + √(4n+1))/2 | H_n` when that value is a prime > 3.
    RootForm,
    /// `√(n+1) | H_n` when that value is a prime > 3.
    SqrtForm,
}

impl std::fmt::Display for ForcedRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ForcedRule::SquareOfNextPrime => "square_of_next_prime",
            ForcedRule::RootForm => "root_form",
            ForcedRule::SqrtForm => "sqrt_form",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForcedDivisor {
    pub n: u64,
    pub divisor: u64,
    pub rule: ForcedRule,
}

/// All divisors of `H_n` guaranteed by the three forced rules.
pub fn forced_divisors(n: u64) -> Vec<ForcedDivisor> {
    let mut out = Vec::new();
    let next = n + 1;
    if next > 3 && modmath::is_prime(next) {
        let square = u128::from(next) * u128::from(next);
        out.push(ForcedDivisor {
            n,
            divisor: u64::try_from(square).expect("forced divisor exceeds u64"),
            rule: ForcedRule::SquareOfNextPrime,
        });
    }
    let disc = 4 * u128::from(n) + 1;
    let root = disc.isqrt();
    if root * root == disc {
        // disc is odd, so root is odd and (1 + root)/2 is integral
        let candidate = root.div_ceil(2);
        if candidate > 3 && modmath::is_prime(candidate as u64) {
            out.push(ForcedDivisor {
                n,
                divisor: candidate as u64,
                rule: ForcedRule::RootForm,
            });
        }
    }
    let root = u128::from(next).isqrt() as u64;
    if u128::from(root) * u128::from(root) == u128::from(next)
        && root > 3
        && modmath::is_prime(root)
    {
        out.push(ForcedDivisor {
            n,
            divisor: root,
            rule: ForcedRule::SqrtForm,
        });
    }
    out
}

/// `H_{p−1} mod p²`, which Wolstenholme's theorem says is 0 for `p > 3`.
pub fn wolstenholme_check(ctx: PrimeContext) -> Result<u128> {
    let p = ctx.p();
    if p <= 3 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "Wolstenholme's theorem requires p > 3",
        });
    }
    let m2 = ctx.p_squared();
    let block = modmath::DEFAULT_BATCH_BLOCK as u64;
    let mut prefix: Vec<u128> = Vec::with_capacity(block as usize);
    let mut sum = 0u128;
    let mut a = 1u64;
    while a < p {
        let b = (p - 1).min(a + block - 1);
        prefix.clear();
        let mut acc = 1u128;
        for j in a..=b {
            acc = modmath::mul_mod(acc, u128::from(j), m2);
            prefix.push(acc);
        }
        let mut inv = modmath::mod_inv_wide(acc, m2)?;
        for i in (0..prefix.len()).rev() {
            let j = a + i as u64;
            let inv_j = if i == 0 {
                inv
            } else {
                modmath::mul_mod(inv, prefix[i - 1], m2)
            };
            sum = modmath::add_mod_wide(sum, inv_j, m2);
            inv = modmath::mul_mod(inv, u128::from(j), m2);
        }
        a = b + 1;
    }
    Ok(sum)
}

/// Indices `n ≤ bound` with `p | H_n`, by an exhaustive running sum.
///
/// The default bound `(p−3)/2` suffices to recognize Harmonic irregular
/// primes; pass an explicit bound (at most `p − 2`) for a wider scan.
pub fn harmonic_scan(ctx: PrimeContext, bound: Option<u64>) -> Vec<u64> {
    let p = ctx.p();
    let limit = bound
        .unwrap_or(p.saturating_sub(3) / 2)
        .min(p.saturating_sub(2));
    let mut hits = Vec::new();
    let mut buf: Vec<u64> = Vec::new();
    let block = modmath::DEFAULT_BATCH_BLOCK as u64;
    let mut sum = 0u64;
    let mut a = 1u64;
    while a <= limit {
        let b = limit.min(a + block - 1);
        harmonic::block_inverses(p, a, (b - a + 1) as usize, &mut buf)
            .expect("1 ≤ j ≤ p−2 is invertible mod p");
        for (off, &inv) in buf.iter().enumerate() {
            sum = modmath::add_mod_u64(sum, inv, p);
            if sum == 0 {
                hits.push(a + off as u64);
            }
        }
        a = b + 1;
    }
    hits
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearFormHit {
    pub k: u64,
    pub r: u64,
    pub n: u64,
    pub divisor: u64,
    pub divisor_is_prime: bool,
}

/// Divisors of the form `k·n + r` of the reduced numerator of `H_n`.
///
/// Maintains `H_n` as an exact fraction in lowest terms, so composite
/// divisors are detected correctly; `primes_only` keeps only prime ones.
pub fn linear_form_scan(
    k: u64,
    r: u64,
    n_max: u64,
    primes_only: bool,
) -> Result<Vec<LinearFormHit>> {
    if k < 2 {
        return Err(Error::InvalidArgument("linear form requires k ≥ 2"));
    }
    if r >= k {
        return Err(Error::InvalidArgument("residue class must satisfy r < k"));
    }
    if n_max > LINEAR_SCAN_CEILING {
        return Err(Error::ResourceLimit(
            "linear-form scan is capped at n ≤ 20000",
        ));
    }
    let mut numerator = BigUint::zero();
    let mut denominator = BigUint::one();
    let mut hits = Vec::new();
    for n in 1..=n_max {
        numerator = numerator * n + &denominator;
        denominator *= n;
        let g = numerator.gcd(&denominator);
        if !g.is_one() {
            numerator /= &g;
            denominator /= &g;
        }
        let divisor = match k.checked_mul(n).and_then(|v| v.checked_add(r)) {
            Some(d) => d,
            None => return Err(Error::ResourceLimit("k·n + r overflows u64")),
        };
        if (&numerator % divisor).is_zero() {
            let divisor_is_prime = modmath::is_prime(divisor);
            if !primes_only || divisor_is_prime {
                hits.push(LinearFormHit {
                    k,
                    r,
                    n,
                    divisor,
                    divisor_is_prime,
                });
            }
        }
    }
    Ok(hits)
}
