//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator. Order-dependent but exactly reproducible
/// for a fixed summation order, which is what the deterministic reductions
/// throughout this crate rely on.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Splits `n` items into chunks of at most `chunk` and maps each chunk index
/// in parallel, then folds the partial results in chunk order. The chunk
/// layout is independent of the worker count, so results are deterministic.
pub fn par_chunked<T, F, G>(n: usize, chunk: usize, map: F, mut fold: G)
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
    G: FnMut(T),
{
    use rayon::prelude::*;
    assert!(chunk > 0);
    let n_chunks = n.div_ceil(chunk);
    let partials: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(n);
            map(lo..hi)
        })
        .collect();
    for p in partials {
        fold(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut acc = Neumaier::new();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.total(), 1.0);
    }

    #[test]
    fn par_chunked_is_order_preserving() {
        let mut seen = Vec::new();
        par_chunked(10, 3, |r| r.start, |s| seen.push(s));
        assert_eq!(seen, vec![0, 3, 6, 9]);
    }
}
