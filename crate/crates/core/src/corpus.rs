//! The published divisors `p` of `H_{floor(p/N)}` for N = 2..46,
//! embedded verbatim as the verification ground truth, together with the
//! machinery to re-check every entry.
//!
//! N = 2 and N = 4 intentionally duplicate the Wieferich primes: each N
//! row stands on its own.

use crate::error::Result;
use crate::harmonic::{self, FORMULA_NS, PIPELINE_FLOOR};
use crate::modmath::PrimeContext;
use crate::search::Hit;
use std::collections::BTreeSet;

const KNOWN_DIVISORS: &[(u32, &[u64])] = &[
    (2, &[1093, 3511]),
    (3, &[11, 1006003]),
    (4, &[1093, 3511]),
    (5, &[]),
    (6, &[61, 1680023, 7308036881]),
    (7, &[652913]),
    (8, &[269, 8573, 1300709, 11740973, 241078561]),
    (9, &[677, 6691]),
    (10, &[227, 17539, 4750159]),
    (11, &[246277, 1156457]),
    (12, &[]),
    (13, &[43214711]),
    (14, &[2267, 6898819]),
    (15, &[134227]),
    (16, &[38723, 38993, 4292543]),
    (17, &[]),
    (18, &[]),
    (19, &[521, 911]),
    (20, &[]),
    (21, &[1423, 5693, 5782639, 212084723]),
    (22, &[2843]),
    (23, &[137, 264391]),
    (
        24,
        &[137, 577, 247421, 307639, 366019, 5262591617, 31251349243],
    ),
    (25, &[137]),
    (26, &[137, 67939]),
    (27, &[137, 23669]),
    (28, &[20101]),
    (29, &[]),
    (30, &[27089407]),
    (31, &[]),
    (32, &[761]),
    (33, &[761]),
    (34, &[1553]),
    (35, &[4139, 4481, 4598569]),
    (36, &[1297]),
    (37, &[1439, 26833]),
    (38, &[2473, 3527, 4047089]),
    (39, &[407893]),
    (40, &[509, 177553]),
    (41, &[509, 151883]),
    (42, &[509, 190657]),
    (43, &[]),
    (44, &[6967, 27361]),
    (45, &[609221]),
    (46, &[11731]),
];

/// N values with no known divisor at the published search limits.
pub const EMPTY_NS: [u32; 8] = [5, 12, 17, 18, 20, 29, 31, 43];

pub const WIEFERICH_PRIMES: [u64; 2] = [1093, 3511];

/// How a corpus entry is re-verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMethod {
    /// Closed-form congruence, O(log p).
    Formula,
    /// Extension pipeline (partial sums from the nearest closed form).
    Pipeline,
    /// Definitional oracle; used below the pipeline floor.
    Oracle,
}

impl std::fmt::Display for VerifyMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VerifyMethod::Formula => "formula",
            VerifyMethod::Pipeline => "pipeline",
            VerifyMethod::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownHit {
    pub n: u32,
    pub p: u64,
    pub method: VerifyMethod,
}

impl KnownHit {
    pub fn index(&self) -> u64 {
        self.p / u64::from(self.n)
    }
}

/// Every published (N, p) pair, in (N, p) order.
pub fn known_hits() -> Vec<KnownHit> {
    let mut out = Vec::new();
    for &(n, ps) in KNOWN_DIVISORS {
        for &p in ps {
            let method = if p < PIPELINE_FLOOR {
                VerifyMethod::Oracle
            } else if FORMULA_NS.contains(&n) {
                VerifyMethod::Formula
            } else {
                VerifyMethod::Pipeline
            };
            out.push(KnownHit { n, p, method });
        }
    }
    out
}

/// Corpus entries with `lo ≤ p < hi` as search hits, ordered by (p, N).
pub fn known_hits_in_range(lo: u64, hi: u64) -> Vec<Hit> {
    let mut hits: Vec<Hit> = known_hits()
        .into_iter()
        .filter(|h| (lo..hi).contains(&h.p))
        .map(|h| Hit {
            p: h.p,
            n: h.n,
            m: h.index(),
        })
        .collect();
    hits.sort();
    hits
}

/// Residue of a corpus entry via its designated method; 0 means verified.
pub fn verify_residue(hit: &KnownHit) -> Result<u64> {
    let ctx = PrimeContext::new(hit.p)?;
    match hit.method {
        VerifyMethod::Formula => Ok(harmonic::h_formula(hit.n, ctx)?.residue),
        VerifyMethod::Pipeline => {
            let set: BTreeSet<u32> = [hit.n].into_iter().collect();
            let run = harmonic::h_pipeline(ctx, &set)?;
            Ok(run.residues[&hit.n].residue)
        }
        VerifyMethod::Oracle => harmonic::h_oracle(hit.index(), ctx),
    }
}

/// Residue by the definitional oracle, independent of the designated path.
pub fn oracle_residue(hit: &KnownHit) -> Result<u64> {
    harmonic::h_oracle(hit.index(), PrimeContext::new(hit.p)?)
}

/// Residue by the accelerated direct sum; the deep cross-check for
/// brute-force-class entries.
pub fn direct_residue(hit: &KnownHit) -> Result<u64> {
    harmonic::h_direct(hit.index(), PrimeContext::new(hit.p)?)
}
