//! Residues `H_{floor(p/N)} mod p`, by four routes.
//!
//! - [`h_oracle`]: the definition, a straight sum of modular inverses.
//!   Ground truth for everything else, and the re-verification path for
//!   search hits.
//! - [`h_direct`]: the same sum rearranged so roughly a quarter of the
//!   terms drop out; an independent medium-speed cross-check.
//! - [`h_formula`]: closed-form congruences in Fermat and Lucas
//!   quotients for N ∈ {2, 3, 4, 5, 6, 8, 10, 12, 24}.
//! - [`h_pipeline`]: formula values extended to every other N by
//!   interval sums of reciprocals, with N = 9 derived from N = 18 at no
//!   extra inversion cost.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::modmath::{self, PrimeContext};
use crate::quotients::{self, LucasParams};

/// Values of N evaluable by closed-form congruence.
pub const FORMULA_NS: [u32; 9] = [2, 3, 4, 5, 6, 8, 10, 12, 24];

/// Smallest and largest N covered by the pipeline.
pub const MIN_N: u32 = 2;
pub const MAX_N: u32 = 46;

/// Smallest prime the pipeline accepts (`p > 46`).
pub const PIPELINE_FLOOR: u64 = 47;

/// How a Harmonic residue was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Formula,
    Extension,
    Direct,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Formula => "formula",
            Method::Extension => "extension",
            Method::Direct => "direct",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

/// `H_m mod p` with `m = floor(p/N)`; `n = 1` marks a raw-index result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarmonicResidue {
    pub p: u64,
    pub n: u32,
    pub m: u64,
    pub residue: u64,
    pub method: Method,
}

// Inverses of start, start+1, ..., start+len−1 mod p via one inversion
// plus 3(len−1) multiplications; `out` is reused across blocks.
//
// The multiplications run in the Montgomery domain on raw inputs: the
// forward prefix pass accumulates one R⁻¹ factor per step and the
// backward pass removes exactly one per step, so plain inverses come out
// with no conversions. Four independent prefix chains that meet only at
// the single true inversion keep the multiplier pipeline full; the
// R-power drift per chain is its element count minus one, and the meet
// and un-meet multiplications cancel it exactly.
pub(crate) fn block_inverses(p: u64, start: u64, len: usize, out: &mut Vec<u64>) -> Result<()> {
    const WIDTH: usize = 4;
    out.clear();
    if len == 0 {
        return Ok(());
    }
    debug_assert!(start >= 1 && start + (len as u64 - 1) < p);
    if p < 3 || len < 2 * WIDTH {
        return block_inverses_narrow(p, start, len, out);
    }
    let mont = modmath::Montgomery::new(p);
    let mut chain = [start, start + 1, start + 2, start + 3];
    out.extend_from_slice(&chain);
    for i in WIDTH..len {
        let c = i % WIDTH;
        chain[c] = mont.mul(chain[c], start + i as u64);
        out.push(chain[c]);
    }
    let t01 = mont.mul(chain[0], chain[1]);
    let t23 = mont.mul(chain[2], chain[3]);
    let inv_all = modmath::mod_inv(mont.mul(t01, t23), p)?;
    let inv01 = mont.mul(inv_all, t23);
    let inv23 = mont.mul(inv_all, t01);
    let mut w = [
        mont.mul(inv01, chain[1]),
        mont.mul(inv01, chain[0]),
        mont.mul(inv23, chain[3]),
        mont.mul(inv23, chain[2]),
    ];
    for i in (WIDTH..len).rev() {
        let c = i % WIDTH;
        let inv_i = mont.mul(w[c], out[i - WIDTH]);
        w[c] = mont.mul(w[c], start + i as u64);
        out[i] = inv_i;
    }
    out[..WIDTH].copy_from_slice(&w);
    Ok(())
}

fn block_inverses_narrow(p: u64, start: u64, len: usize, out: &mut Vec<u64>) -> Result<()> {
    if p < 3 {
        for i in 0..len {
            out.push(modmath::mod_inv(start + i as u64, p)?);
        }
        return Ok(());
    }
    let mont = modmath::Montgomery::new(p);
    let mut acc = start;
    out.push(acc);
    for i in 1..len {
        acc = mont.mul(acc, start + i as u64);
        out.push(acc);
    }
    // acc = Π j · R^{−(len−1)}, so its inverse carries R^{+(len−1)}
    let mut inv = modmath::mod_inv(acc, p)?;
    for i in (0..len).rev() {
        out[i] = if i == 0 { inv } else { mont.mul(inv, out[i - 1]) };
        inv = mont.mul(inv, start + i as u64);
    }
    Ok(())
}

// Σ 1/j over lo ≤ j ≤ hi, mod p. Callers guarantee 1 ≤ lo and hi < p.
fn sum_inverse_range(p: u64, lo: u64, hi: u64) -> Result<u64> {
    if lo > hi {
        return Ok(0);
    }
    let block = modmath::DEFAULT_BATCH_BLOCK as u64;
    let mut buf: Vec<u64> = Vec::new();
    let mut lanes = [0u64; 4];
    let mut a = lo;
    while a <= hi {
        let b = hi.min(a + block - 1);
        block_inverses(p, a, (b - a + 1) as usize, &mut buf)?;
        for (i, &inv) in buf.iter().enumerate() {
            let lane = &mut lanes[i % 4];
            *lane = modmath::add_mod_u64(*lane, inv, p);
        }
        a = b + 1;
    }
    let mut sum = 0u64;
    for lane in lanes {
        sum = modmath::add_mod_u64(sum, lane, p);
    }
    Ok(sum)
}

/// `H_n mod p` straight from the definition. The ground-truth oracle.
pub fn h_oracle(n: u64, ctx: PrimeContext) -> Result<u64> {
    let p = ctx.p();
    if n >= p {
        return Err(Error::IndexOutOfRange { index: n, p });
    }
    sum_inverse_range(p, 1, n)
}

/// Oracle residues at several indices in a single pass of inverses.
pub fn h_oracle_many(ctx: PrimeContext, indices: &[u64]) -> Result<Vec<u64>> {
    let p = ctx.p();
    for &n in indices {
        if n >= p {
            return Err(Error::IndexOutOfRange { index: n, p });
        }
    }
    let mut results = vec![0u64; indices.len()];
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by_key(|&i| indices[i]);
    let mut next = 0;
    while next < order.len() && indices[order[next]] == 0 {
        next += 1;
    }
    let max = indices.iter().copied().max().unwrap_or(0);
    let block = modmath::DEFAULT_BATCH_BLOCK as u64;
    let mut buf: Vec<u64> = Vec::new();
    let mut sum = 0u64;
    let mut a = 1u64;
    while a <= max {
        let b = max.min(a + block - 1);
        block_inverses(p, a, (b - a + 1) as usize, &mut buf)?;
        for (off, &inv) in buf.iter().enumerate() {
            sum = modmath::add_mod_u64(sum, inv, p);
            let j = a + off as u64;
            while next < order.len() && indices[order[next]] == j {
                results[order[next]] = sum;
                next += 1;
            }
        }
        a = b + 1;
    }
    Ok(results)
}

/// Interval sum `Σ_{j=a..b} 1/j mod p`; empty when `a > b`.
pub fn partial_sum(ctx: PrimeContext, a: u64, b: u64) -> Result<u64> {
    let p = ctx.p();
    if a > b {
        return Ok(0);
    }
    if b >= p {
        return Err(Error::IndexOutOfRange { index: b, p });
    }
    if a == 0 {
        return Err(Error::IndexOutOfRange { index: 0, p });
    }
    sum_inverse_range(p, a, b)
}

/// `H_n mod p` with the even terms up to `n/2` folded away:
/// `H_n = H_{n/4} + (3/2)·Σ_{n/4 < j ≤ n/2} 1/j + Σ_{odd k, n/2 < k ≤ n} 1/k`.
pub fn h_direct(n: u64, ctx: PrimeContext) -> Result<u64> {
    let p = ctx.p();
    if n >= p {
        return Err(Error::IndexOutOfRange { index: n, p });
    }
    if p <= 3 {
        return h_oracle(n, ctx);
    }
    let quarter = n / 4;
    let half = n / 2;
    let head = sum_inverse_range(p, 1, quarter)?;
    let mid = sum_inverse_range(p, quarter + 1, half)?;
    let three_halves = modmath::mul_mod_u64(3 % p, modmath::mod_inv(2, p)?, p);
    let mut total = modmath::add_mod_u64(head, modmath::mul_mod_u64(three_halves, mid, p), p);

    // odd k in (half, n], batched
    let mut k = half + 1;
    if k.is_multiple_of(2) {
        k += 1;
    }
    let mut values: Vec<u64> = Vec::with_capacity(modmath::DEFAULT_BATCH_BLOCK);
    while k <= n {
        values.clear();
        while k <= n && values.len() < modmath::DEFAULT_BATCH_BLOCK {
            values.push(k);
            k += 2;
        }
        for inv in modmath::batch_inv(&values, p)? {
            total = modmath::add_mod_u64(total, inv, p);
        }
    }
    Ok(total)
}

// Memoized quotient values for one prime. One pipeline evaluation reuses
// q_p(2), q_p(3), and the Lucas quotients across every formula that
// mentions them.
#[derive(Default)]
struct QuotientCache {
    fermat2: Option<u64>,
    fermat3: Option<u64>,
    fermat5: Option<u64>,
    fibonacci: Option<u64>,
    pell: Option<u64>,
    a001353: Option<u64>,
    a004189: Option<u64>,
}

impl QuotientCache {
    fn memo(slot: &mut Option<u64>, compute: impl FnOnce() -> Result<u64>) -> Result<u64> {
        match *slot {
            Some(v) => Ok(v),
            None => {
                let v = compute()?;
                *slot = Some(v);
                Ok(v)
            }
        }
    }

    fn fermat(&mut self, base: u64, ctx: PrimeContext) -> Result<u64> {
        let slot = match base {
            2 => &mut self.fermat2,
            3 => &mut self.fermat3,
            5 => &mut self.fermat5,
            _ => return quotients::fermat_quotient(base, ctx),
        };
        Self::memo(slot, || quotients::fermat_quotient(base, ctx))
    }

    fn lucas(&mut self, params: LucasParams, ctx: PrimeContext) -> Result<u64> {
        let slot = if params == LucasParams::FIBONACCI {
            &mut self.fibonacci
        } else if params == LucasParams::PELL {
            &mut self.pell
        } else if params == LucasParams::A001353 {
            &mut self.a001353
        } else if params == LucasParams::A004189 {
            &mut self.a004189
        } else {
            return quotients::lucas_quotient(params, ctx);
        };
        Self::memo(slot, || quotients::lucas_quotient(params, ctx))
    }
}

/// Closed-form congruence for `H_{floor(p/N)} mod p`.
///
/// Supported N: 2, 3, 4, 5, 6, 8, 10, 12, 24. Requires `p > N`; primes
/// dividing a needed Fermat base or Lucas constant are rejected by the
/// quotient layer.
pub fn h_formula(n: u32, ctx: PrimeContext) -> Result<HarmonicResidue> {
    h_formula_cached(n, ctx, &mut QuotientCache::default())
}

fn h_formula_cached(
    n: u32,
    ctx: PrimeContext,
    cache: &mut QuotientCache,
) -> Result<HarmonicResidue> {
    if !FORMULA_NS.contains(&n) {
        return Err(Error::UnsupportedFormula { n });
    }
    let p = ctx.p();
    if u64::from(n) >= p {
        return Err(Error::InapplicablePrime {
            p,
            reason: "closed form requires p > N",
        });
    }
    if p == 2 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "closed forms require odd p",
        });
    }
    let pi = i128::from(p);
    let inv2 = i128::from(modmath::mod_inv(2, p)?);
    let symbol = |a: i128| -> Result<i128> { Ok(i128::from(modmath::jacobi(a, p)?)) };

    let mut terms: Vec<i128> = Vec::with_capacity(5);
    match n {
        2 => terms.push(-2 * i128::from(cache.fermat(2, ctx)?)),
        3 => terms.push(-(3 * inv2 % pi) * i128::from(cache.fermat(3, ctx)?)),
        4 => terms.push(-3 * i128::from(cache.fermat(2, ctx)?)),
        5 => {
            let inv4 = i128::from(modmath::mod_inv(4, p)?);
            let coeff = 5 * inv4 % pi;
            terms.push(-coeff * i128::from(cache.fermat(5, ctx)?));
            terms.push(-coeff * i128::from(cache.lucas(LucasParams::FIBONACCI, ctx)?));
        }
        6 => {
            terms.push(-2 * i128::from(cache.fermat(2, ctx)?));
            terms.push(-(3 * inv2 % pi) * i128::from(cache.fermat(3, ctx)?));
        }
        8 => {
            terms.push(-4 * i128::from(cache.fermat(2, ctx)?));
            terms.push(-2 * i128::from(cache.lucas(LucasParams::PELL, ctx)?));
        }
        10 => {
            let inv4 = i128::from(modmath::mod_inv(4, p)?);
            terms.push(-2 * i128::from(cache.fermat(2, ctx)?));
            terms.push(-(5 * inv4 % pi) * i128::from(cache.fermat(5, ctx)?));
            terms.push(
                -(15 * inv4 % pi) * i128::from(cache.lucas(LucasParams::FIBONACCI, ctx)?),
            );
        }
        12 => {
            terms.push(-3 * i128::from(cache.fermat(2, ctx)?));
            terms.push(-(3 * inv2 % pi) * i128::from(cache.fermat(3, ctx)?));
            terms
                .push(-3 * symbol(3)? * i128::from(cache.lucas(LucasParams::A001353, ctx)?));
        }
        24 => {
            terms.push(-4 * i128::from(cache.fermat(2, ctx)?));
            terms.push(-(3 * inv2 % pi) * i128::from(cache.fermat(3, ctx)?));
            terms.push(-4 * i128::from(cache.lucas(LucasParams::PELL, ctx)?));
            terms
                .push(-3 * symbol(3)? * i128::from(cache.lucas(LucasParams::A001353, ctx)?));
            terms
                .push(-6 * symbol(6)? * i128::from(cache.lucas(LucasParams::A004189, ctx)?));
        }
        _ => unreachable!(),
    }
    let residue = terms
        .into_iter()
        .fold(0i128, |acc, t| (acc + t % pi) % pi)
        .rem_euclid(pi) as u64;
    Ok(HarmonicResidue {
        p,
        n,
        m: p / u64::from(n),
        residue,
        method: Method::Formula,
    })
}

/// `H_{floor(p/9)} ≡ H_{floor(p/18)} + Z(p) + 2·q_p(2) (mod p)`.
pub fn h9_from_h18(ctx: PrimeContext, h18: &HarmonicResidue) -> Result<HarmonicResidue> {
    let p = ctx.p();
    if h18.p != p || h18.n != 18 {
        return Err(Error::InvalidArgument(
            "h9_from_h18 needs the N = 18 residue for the same prime",
        ));
    }
    if p <= 18 {
        return Err(Error::InapplicablePrime {
            p,
            reason: "N = 9 derivation requires p > 18",
        });
    }
    h9_from_h18_cached(ctx, h18, &mut QuotientCache::default())
}

fn h9_from_h18_cached(
    ctx: PrimeContext,
    h18: &HarmonicResidue,
    cache: &mut QuotientCache,
) -> Result<HarmonicResidue> {
    let p = ctx.p();
    let z = quotients::sun_z(ctx)?;
    let q2 = cache.fermat(2, ctx)?;
    let mut residue = modmath::add_mod_u64(h18.residue, z, p);
    residue = modmath::add_mod_u64(residue, modmath::mul_mod_u64(2 % p, q2, p), p);
    Ok(HarmonicResidue {
        p,
        n: 9,
        m: p / 9,
        residue,
        method: Method::Extension,
    })
}

/// Outcome of one pipeline evaluation, with the number of reciprocals
/// `1/j` that were actually requested.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub residues: BTreeMap<u32, HarmonicResidue>,
    pub inverses_requested: u64,
}

/// Residues for every requested N, computing each reciprocal at most once.
///
/// Closed forms cover N ∈ {2,3,4,5,6,8,10,12,24}; N = 23..13 extend
/// upward from N = 24 by added interval sums and N = 25..46 downward by
/// subtracted ones; N = 7 extends from 8, N = 11 from 12, and N = 9 is
/// derived from N = 18. Only the intervals a requested N actually needs
/// are walked, so a formula-only `n_set` costs O(log p).
pub fn h_pipeline(ctx: PrimeContext, n_set: &BTreeSet<u32>) -> Result<PipelineRun> {
    let p = ctx.p();
    if n_set.is_empty() {
        return Err(Error::InvalidArgument("n_set must be non-empty"));
    }
    if n_set.iter().any(|&k| !(MIN_N..=MAX_N).contains(&k)) {
        return Err(Error::InvalidArgument("every N must lie in [2, 46]"));
    }
    if p < PIPELINE_FLOOR {
        return Err(Error::InapplicablePrime {
            p,
            reason: "pipeline requires p > 46",
        });
    }

    let m_of = |k: u32| p / u64::from(k);
    let extension = |k: u32, residue: u64| HarmonicResidue {
        p,
        n: k,
        m: m_of(k),
        residue,
        method: Method::Extension,
    };

    let mut out: BTreeMap<u32, HarmonicResidue> = BTreeMap::new();
    let mut inverses = 0u64;
    let mut cache = QuotientCache::default();

    for &k in n_set {
        if FORMULA_NS.contains(&k) {
            out.insert(k, h_formula_cached(k, ctx, &mut cache)?);
        }
    }

    let needs_nine = n_set.contains(&9);
    let mut chain_floor = 24u32; // smallest N the upward chain must reach
    if let Some(&k) = n_set.range(13..=23).next() {
        chain_floor = chain_floor.min(k);
    }
    if needs_nine {
        chain_floor = chain_floor.min(18);
    }
    let chain_ceiling = n_set.range(25..=46).next_back().copied();

    let base24 = if chain_floor < 24 || chain_ceiling.is_some() {
        Some(match out.get(&24) {
            Some(r) => r.residue,
            None => h_formula_cached(24, ctx, &mut cache)?.residue,
        })
    } else {
        None
    };

    let mut h18 = None;
    if chain_floor < 24 {
        let mut acc = base24.expect("base residue computed for the chain");
        let mut cur = m_of(24);
        for k in (chain_floor..=23).rev() {
            let target = m_of(k);
            inverses += target - cur;
            acc = modmath::add_mod_u64(acc, sum_inverse_range(p, cur + 1, target)?, p);
            cur = target;
            if n_set.contains(&k) {
                out.insert(k, extension(k, acc));
            }
            if k == 18 {
                h18 = Some(extension(18, acc));
            }
        }
    }
    if let Some(top) = chain_ceiling {
        let mut acc = base24.expect("base residue computed for the chain");
        let mut cur = m_of(24);
        for k in 25..=top {
            let target = m_of(k);
            inverses += cur - target;
            acc = modmath::sub_mod_u64(acc, sum_inverse_range(p, target + 1, cur)?, p);
            cur = target;
            if n_set.contains(&k) {
                out.insert(k, extension(k, acc));
            }
        }
    }
    if n_set.contains(&7) {
        let base = match out.get(&8) {
            Some(r) => r.residue,
            None => h_formula_cached(8, ctx, &mut cache)?.residue,
        };
        inverses += m_of(7) - m_of(8);
        let sum = sum_inverse_range(p, m_of(8) + 1, m_of(7))?;
        out.insert(7, extension(7, modmath::add_mod_u64(base, sum, p)));
    }
    if n_set.contains(&11) {
        let base = match out.get(&12) {
            Some(r) => r.residue,
            None => h_formula_cached(12, ctx, &mut cache)?.residue,
        };
        inverses += m_of(11) - m_of(12);
        let sum = sum_inverse_range(p, m_of(12) + 1, m_of(11))?;
        out.insert(11, extension(11, modmath::add_mod_u64(base, sum, p)));
    }
    if needs_nine {
        let h18 = h18.expect("upward chain reached N = 18");
        out.insert(9, h9_from_h18_cached(ctx, &h18, &mut cache)?);
    }

    Ok(PipelineRun {
        residues: out,
        inverses_requested: inverses,
    })
}

/// Every `H_{floor(p/N)} mod p` for N = 2..46.
pub fn h_all(ctx: PrimeContext) -> Result<BTreeMap<u32, HarmonicResidue>> {
    let all: BTreeSet<u32> = (MIN_N..=MAX_N).collect();
    Ok(h_pipeline(ctx, &all)?.residues)
}
