//! Sieving, Chebyshev theta and weighted prime ranges.
//!
//! The table is built once and shared immutably by every other module; theta
//! queries are answered in O(log n) from a compensated prefix-sum array so the
//! Selberg-integral quadrature can afford millions of point lookups.

use crate::error::{Error, Result};
use crate::util::Neumaier;
use std::io::{Read, Write};
use std::path::Path;

const MAX_LIMIT: u64 = 1_000_000_000;
const SEGMENT_THRESHOLD: u64 = 10_000_000;
const SEGMENT_LEN: usize = 1 << 20;

/// Primes up to `limit` with their natural-log weights and a prefix-sum
/// array for Chebyshev theta.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    logs: Vec<f64>,
    theta_prefix: Vec<f64>,
}

/// A contiguous run of table primes in `[lo, hi]` with their log weights.
#[derive(Debug, Clone, Copy)]
pub struct WeightedRange<'a> {
    pub lo: f64,
    pub hi: f64,
    pub members: &'a [u64],
    pub weights: &'a [f64],
}

impl WeightedRange<'_> {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Sum of log p over the range, in table order, compensated.
    pub fn sum_log(&self) -> f64 {
        let mut acc = Neumaier::new();
        for &w in self.weights {
            acc.add(w);
        }
        acc.total()
    }

    /// Sum of (log p)^2 over the range, in table order, compensated.
    ///
    /// This is the Parseval anchor: every test that needs the k=1 mean value
    /// reads it through this one function so the value is bit-identical
    /// everywhere.
    pub fn sum_log_sq(&self) -> f64 {
        let mut acc = Neumaier::new();
        for &w in self.weights {
            acc.add(w * w);
        }
        acc.total()
    }
}

impl PrimeTable {
    /// Sieve of Eratosthenes up to `limit`; switches to the segmented sieve
    /// above 10^7.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::SieveLimit(limit));
        }
        if limit > MAX_LIMIT {
            return Err(Error::SieveLimit(limit));
        }
        let primes = if limit <= SEGMENT_THRESHOLD {
            sieve_simple(limit)
        } else {
            sieve_segmented(limit)
        };
        Ok(Self::from_primes(limit, primes))
    }

    fn from_primes(limit: u64, primes: Vec<u64>) -> Self {
        let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let mut theta_prefix = Vec::with_capacity(primes.len() + 1);
        theta_prefix.push(0.0);
        let mut acc = Neumaier::new();
        for &w in &logs {
            acc.add(w);
            theta_prefix.push(acc.total());
        }
        Self {
            limit,
            primes,
            logs,
            theta_prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Chebyshev theta(x) = sum of log p over primes p <= x.
    pub fn theta(&self, x: f64) -> Result<f64> {
        if x > self.limit as f64 {
            return Err(Error::OutOfTable {
                x,
                limit: self.limit,
            });
        }
        let idx = self.primes.partition_point(|&p| (p as f64) <= x);
        Ok(self.theta_prefix[idx])
    }

    /// Exact prime membership of `[lo, hi]` as a borrowed slice of the table.
    pub fn range(&self, lo: f64, hi: f64) -> Result<WeightedRange<'_>> {
        if lo > hi {
            return Err(Error::Precondition(format!(
                "prime range has lo = {lo} > hi = {hi}"
            )));
        }
        if hi > self.limit as f64 {
            return Err(Error::OutOfTable {
                x: hi,
                limit: self.limit,
            });
        }
        let start = self.primes.partition_point(|&p| (p as f64) < lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        Ok(WeightedRange {
            lo,
            hi,
            members: &self.primes[start..end],
            weights: &self.logs[start..end],
        })
    }

    /// Writes the sieve as a bitset cache: magic "DLPT", version u32 LE,
    /// limit u64 LE, then one bit per integer in [0, limit], LSB first.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let n_bytes = (self.limit as usize + 1).div_ceil(8);
        let mut bits = vec![0u8; n_bytes];
        for &p in &self.primes {
            bits[(p / 8) as usize] |= 1 << (p % 8);
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(b"DLPT")?;
        f.write_all(&1u32.to_le_bytes())?;
        f.write_all(&self.limit.to_le_bytes())?;
        f.write_all(&bits)?;
        Ok(())
    }

    /// Reads a bitset cache written by [`PrimeTable::write_cache`].
    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        if &magic != b"DLPT" {
            return Err(Error::Cache(format!("bad magic {magic:?}")));
        }
        let mut v = [0u8; 4];
        f.read_exact(&mut v)
            .map_err(|_| Error::Cache("truncated version".into()))?;
        let version = u32::from_le_bytes(v);
        if version != 1 {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let mut l = [0u8; 8];
        f.read_exact(&mut l)
            .map_err(|_| Error::Cache("truncated limit".into()))?;
        let limit = u64::from_le_bytes(l);
        if !(2..=MAX_LIMIT).contains(&limit) {
            return Err(Error::Cache(format!("limit {limit} out of range")));
        }
        let n_bytes = (limit as usize + 1).div_ceil(8);
        let mut bits = vec![0u8; n_bytes];
        f.read_exact(&mut bits)
            .map_err(|_| Error::Cache("truncated bitset".into()))?;
        let mut primes = Vec::new();
        for n in 2..=limit {
            if bits[(n / 8) as usize] >> (n % 8) & 1 == 1 {
                primes.push(n);
            }
        }
        if primes.first() != Some(&2) {
            return Err(Error::Cache("bitset does not mark 2 as prime".into()));
        }
        Ok(Self::from_primes(limit, primes))
    }
}

/// Plain sieve of Eratosthenes. Exposed for the segmented/unsegmented
/// agreement check.
pub fn sieve_simple(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !is_composite[i] {
            let mut j = i * i;
            while j <= n {
                is_composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| !is_composite[i]).map(|i| i as u64).collect()
}

/// Segmented sieve: base primes up to sqrt(limit), then fixed-size segments
/// marked independently and concatenated in order.
pub fn sieve_segmented(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = sieve_simple(root.max(2));
    let mut primes = Vec::new();
    let mut seg = vec![false; SEGMENT_LEN];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
            }
            let mut j = start;
            while j <= hi {
                seg[(j - lo) as usize] = true;
                j += p;
            }
        }
        for (off, &c) in seg[..len].iter().enumerate() {
            if !c {
                let n = lo + off as u64;
                if n >= 2 {
                    primes.push(n);
                }
            }
        }
        lo = hi + 1;
    }
    primes
}
