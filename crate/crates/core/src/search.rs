//! Segmented, checkpointed search for primes with a vanishing
//! `H_{floor(p/N)}` residue.
//!
//! The range is cut into fixed-span chunks. A pool of workers sieves and
//! evaluates chunks independently; a single collector re-orders finished
//! chunks, appends hits to the log, and advances the checkpoint only over
//! contiguously completed work, so an interrupted run resumed later is
//! indistinguishable from an uninterrupted one. Every hit is re-verified
//! against the definitional oracle before it is emitted.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harmonic::{self, MAX_N, MIN_N, PIPELINE_FLOOR};
use crate::modmath::{self, PrimeContext};

/// Default sieve span per work unit.
pub const DEFAULT_CHUNK_SPAN: u64 = 10_000;

/// Exclusive upper bound on search ranges.
pub const MAX_SEARCH_BOUND: u64 = modmath::MAX_SUPPORTED_PRIME;

pub const HIT_CSV_HEADER: &str = "p,N,m";
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// A prime `p` dividing `H_m` with `m = floor(p/N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hit {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub m: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config_digest: String,
    /// All primes below this value have been fully processed.
    pub completed_through: u64,
    pub wall_time_accumulated: f64,
    pub hits: Vec<Hit>,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n_set: BTreeSet<u32>,
    pub lo: u64,
    pub hi: u64,
    pub chunk_size: u64,
    pub worker_count: usize,
    pub checkpoint_path: PathBuf,
    pub output_path: PathBuf,
}

impl SearchConfig {
    pub fn new(
        n_set: BTreeSet<u32>,
        lo: u64,
        hi: u64,
        checkpoint_path: impl Into<PathBuf>,
        output_path: impl Into<PathBuf>,
    ) -> Self {
        SearchConfig {
            n_set,
            lo,
            hi,
            chunk_size: DEFAULT_CHUNK_SPAN,
            worker_count: 1,
            checkpoint_path: checkpoint_path.into(),
            output_path: output_path.into(),
        }
    }

    /// Content digest of the search-defining fields (N set and range).
    /// Tuning knobs and paths deliberately do not participate, so a run
    /// may be resumed with a different thread count.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"harmonic-search-v1");
        for n in &self.n_set {
            hasher.update(n.to_le_bytes());
        }
        hasher.update(self.lo.to_le_bytes());
        hasher.update(self.hi.to_le_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_set.is_empty() {
            return Err(Error::InvalidArgument("n_set must be non-empty"));
        }
        if self.n_set.iter().any(|&n| !(MIN_N..=MAX_N).contains(&n)) {
            return Err(Error::InvalidArgument("every N must lie in [2, 46]"));
        }
        if self.lo < PIPELINE_FLOOR {
            return Err(Error::InvalidArgument(
                "search floor is p = 47; smaller primes are covered by the known corpus",
            ));
        }
        if self.hi < self.lo {
            return Err(Error::InvalidArgument("inverted range"));
        }
        if self.hi > MAX_SEARCH_BOUND {
            return Err(Error::ResourceLimit("search bound above supported width"));
        }
        Ok(())
    }
}

/// Primes of one sieved segment.
#[derive(Clone, Debug)]
pub struct PrimeChunk {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

pub struct PrimeChunks {
    base: Vec<u64>,
    cursor: u64,
    hi: u64,
    chunk: u64,
}

impl Iterator for PrimeChunks {
    type Item = PrimeChunk;

    fn next(&mut self) -> Option<PrimeChunk> {
        if self.cursor >= self.hi {
            return None;
        }
        let lo = self.cursor;
        let hi = self.hi.min(lo.saturating_add(self.chunk));
        self.cursor = hi;
        Some(PrimeChunk {
            lo,
            hi,
            primes: sieve_segment(&self.base, lo, hi),
        })
    }
}

/// Stream of prime chunks over `[lo, hi)`, each prime exactly once, in order.
pub fn iterate_primes(lo: u64, hi: u64, chunk_size: u64) -> Result<PrimeChunks> {
    if hi > MAX_SEARCH_BOUND {
        return Err(Error::ResourceLimit("search bound above supported width"));
    }
    Ok(PrimeChunks {
        base: base_primes(hi),
        cursor: lo,
        hi,
        chunk: chunk_size.max(1),
    })
}

// Odd-only sieve of Eratosthenes up to isqrt(hi−1), enough to sieve any
// segment below hi.
fn base_primes(hi: u64) -> Vec<u64> {
    let limit = hi.saturating_sub(1).isqrt();
    if limit < 2 {
        return Vec::new();
    }
    let size = (limit as usize) + 1;
    let mut composite = vec![false; size];
    let mut primes = vec![2u64];
    let mut q = 3u64;
    while q <= limit {
        if !composite[q as usize] {
            primes.push(q);
            let mut multiple = q * q;
            while multiple <= limit {
                composite[multiple as usize] = true;
                multiple += 2 * q;
            }
        }
        q += 2;
    }
    primes
}

pub(crate) fn sieve_segment(base: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &q in base {
        if q * q >= hi {
            break;
        }
        let first = (q * q).max(lo.div_ceil(q) * q);
        let mut multiple = first;
        while multiple < hi {
            composite[(multiple - lo) as usize] = true;
            multiple += q;
        }
    }
    let mut primes = Vec::new();
    for (i, &c) in composite.iter().enumerate() {
        let value = lo + i as u64;
        if value >= 2 && !c {
            primes.push(value);
        }
    }
    primes
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub hits: Vec<Hit>,
    pub checkpoint: Checkpoint,
}

/// Snapshot handed to the progress callback after each completed chunk.
#[derive(Clone, Copy, Debug)]
pub struct SearchProgress {
    pub completed_through: u64,
    pub primes_processed: u64,
    pub hits_found: usize,
    pub elapsed_seconds: f64,
}

struct ChunkResult {
    prime_count: u64,
    hits: Vec<Hit>,
}

fn process_chunk(base: &[u64], lo: u64, hi: u64, n_set: &BTreeSet<u32>) -> Result<ChunkResult> {
    let primes = sieve_segment(base, lo, hi);
    let mut hits = Vec::new();
    for &p in &primes {
        let ctx = PrimeContext::new(p)?;
        let run = harmonic::h_pipeline(ctx, n_set)?;
        for (&n, residue) in &run.residues {
            if residue.residue == 0 {
                // independent confirmation before the hit is emitted
                let oracle = harmonic::h_oracle(residue.m, ctx)?;
                if oracle != 0 {
                    return Err(Error::InternalConsistency(format!(
                        "hit re-verification failed for p = {p}, N = {n}: \
                         pipeline residue 0, oracle residue {oracle}"
                    )));
                }
                hits.push(Hit { p, n, m: residue.m });
            }
        }
    }
    Ok(ChunkResult {
        prime_count: primes.len() as u64,
        hits,
    })
}

fn load_checkpoint(path: &Path) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let checkpoint: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::FileParse {
        path: path.display().to_string(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    Ok(Some(checkpoint))
}

fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    let body = serde_json::to_string_pretty(checkpoint)
        .map_err(|e| Error::InternalConsistency(format!("checkpoint serialization: {e}")))?;
    fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_hit_line(out: &mut impl Write, path: &Path, hit: &Hit) -> Result<()> {
    writeln!(out, "{},{},{}", hit.p, hit.n, hit.m).map_err(|e| Error::io(path, e))
}

/// Run (or resume) a search to completion. See [`run_search_controlled`].
pub fn run_search(config: &SearchConfig) -> Result<SearchOutcome> {
    run_search_controlled(config, None, &mut |_| {})
}

/// Resume from an existing checkpoint; refuses to start fresh.
pub fn resume(config: &SearchConfig) -> Result<SearchOutcome> {
    if !config.checkpoint_path.exists() {
        return Err(Error::InvalidArgument("no checkpoint to resume from"));
    }
    run_search(config)
}

/// Search driver with an optional chunk budget (for controlled
/// interruption) and a per-chunk progress callback.
pub fn run_search_controlled(
    config: &SearchConfig,
    chunk_limit: Option<u64>,
    progress: &mut dyn FnMut(&SearchProgress),
) -> Result<SearchOutcome> {
    config.validate()?;
    let digest = config.digest();
    let session_start = Instant::now();

    let (mut hits, start, wall_base) = match load_checkpoint(&config.checkpoint_path)? {
        Some(cp) => {
            if cp.config_digest != digest {
                return Err(Error::RefuseResume {
                    expected: digest,
                    found: cp.config_digest,
                });
            }
            if cp.format_version != CHECKPOINT_FORMAT_VERSION {
                return Err(Error::InvalidArgument("unsupported checkpoint version"));
            }
            let start = cp.completed_through.clamp(config.lo, config.hi);
            (cp.hits, start, cp.wall_time_accumulated)
        }
        None => (Vec::new(), config.lo, 0.0),
    };

    // Rewrite the hit log so it exactly matches checkpointed state; any
    // torn tail from a crash mid-append is discarded here.
    let out_path = &config.output_path;
    let file = fs::File::create(out_path).map_err(|e| Error::io(out_path, e))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{HIT_CSV_HEADER}").map_err(|e| Error::io(out_path, e))?;
    for hit in &hits {
        write_hit_line(&mut out, out_path, hit)?;
    }
    out.flush().map_err(|e| Error::io(out_path, e))?;

    let chunk = config.chunk_size.max(1);
    let total_chunks = (config.hi - start).div_ceil(chunk);
    let jobs = chunk_limit.map_or(total_chunks, |limit| limit.min(total_chunks));

    let mut last_checkpoint: Option<Checkpoint> = None;
    if jobs > 0 {
        let base = base_primes(config.hi);
        let workers = config
            .worker_count
            .max(1)
            .min(usize::try_from(jobs).unwrap_or(usize::MAX));
        let next_job = AtomicU64::new(0);
        let abort = AtomicBool::new(false);
        let n_set = &config.n_set;
        let hi = config.hi;

        let mut first_error: Option<Error> = None;
        let mut primes_processed = 0u64;

        std::thread::scope(|scope| -> Result<()> {
            let (tx, rx) = mpsc::channel::<(u64, Result<ChunkResult>)>();
            for _ in 0..workers {
                let tx = tx.clone();
                let base = &base;
                let next_job = &next_job;
                let abort = &abort;
                scope.spawn(move || loop {
                    if abort.load(Ordering::Relaxed) {
                        break;
                    }
                    let idx = next_job.fetch_add(1, Ordering::Relaxed);
                    if idx >= jobs {
                        break;
                    }
                    let lo = start + idx * chunk;
                    let result = process_chunk(base, lo, hi.min(lo + chunk), n_set);
                    let failed = result.is_err();
                    if tx.send((idx, result)).is_err() || failed {
                        break;
                    }
                });
            }
            drop(tx);

            let mut pending: BTreeMap<u64, ChunkResult> = BTreeMap::new();
            let mut next_emit = 0u64;
            for (idx, result) in rx {
                match result {
                    Err(e) => {
                        abort.store(true, Ordering::Relaxed);
                        if first_error.is_none() {
                            first_error = Some(e);
                        }
                    }
                    Ok(r) => {
                        pending.insert(idx, r);
                    }
                }
                while let Some(done) = pending.remove(&next_emit) {
                    for hit in &done.hits {
                        write_hit_line(&mut out, out_path, hit)?;
                    }
                    out.flush().map_err(|e| Error::io(out_path, e))?;
                    primes_processed += done.prime_count;
                    hits.extend(done.hits);
                    next_emit += 1;
                    let completed_through = if next_emit == total_chunks {
                        hi
                    } else {
                        hi.min(start + next_emit * chunk)
                    };
                    let checkpoint = Checkpoint {
                        format_version: CHECKPOINT_FORMAT_VERSION,
                        config_digest: digest.clone(),
                        completed_through,
                        wall_time_accumulated: wall_base + session_start.elapsed().as_secs_f64(),
                        hits: hits.clone(),
                    };
                    write_checkpoint(&config.checkpoint_path, &checkpoint)?;
                    progress(&SearchProgress {
                        completed_through,
                        primes_processed,
                        hits_found: hits.len(),
                        elapsed_seconds: session_start.elapsed().as_secs_f64(),
                    });
                    last_checkpoint = Some(checkpoint);
                }
            }
            Ok(())
        })?;

        if let Some(e) = first_error {
            return Err(e);
        }
    }

    let checkpoint = match last_checkpoint {
        Some(cp) => cp,
        None => {
            // no chunk was processed: either the range was already
            // complete, or the chunk budget was zero
            let checkpoint = Checkpoint {
                format_version: CHECKPOINT_FORMAT_VERSION,
                config_digest: digest,
                completed_through: if total_chunks == 0 { config.hi } else { start },
                wall_time_accumulated: wall_base + session_start.elapsed().as_secs_f64(),
                hits: hits.clone(),
            };
            write_checkpoint(&config.checkpoint_path, &checkpoint)?;
            checkpoint
        }
    };

    Ok(SearchOutcome { hits, checkpoint })
}
