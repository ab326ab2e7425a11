//! Order-stable parallel sums.
//!
//! Terms are grouped into fixed chunks of [`CHUNK`] consecutive indices, each
//! chunk is summed left to right, and the chunk partials are combined by a
//! pairwise tree. The grouping never depends on the thread count, so results
//! are bit-identical however many workers rayon provides.

use rayon::prelude::*;

pub const CHUNK: usize = 256;

fn tree<T: Clone>(mut parts: Vec<T>, add: impl Fn(&T, &T) -> T) -> Option<T> {
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => add(a, b),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    parts.pop()
}

/// `Σ_{i<len} term(i)`.
pub fn sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunk_sum = |c: usize| {
        let end = ((c + 1) * CHUNK).min(len);
        (c * CHUNK..end).fold(0.0, |acc, i| acc + term(i))
    };
    let chunks = len.div_ceil(CHUNK);
    let parts: Vec<f64> = if chunks <= 1 {
        (0..chunks).map(chunk_sum).collect()
    } else {
        (0..chunks).into_par_iter().map(chunk_sum).collect()
    };
    tree(parts, |a, b| a + b).unwrap_or(0.0)
}

/// Componentwise `Σ_{i<len} term(i)` for vectors of length `width`.
pub fn sum_vec<F>(len: usize, width: usize, term: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let chunk_sum = |c: usize| {
        let end = ((c + 1) * CHUNK).min(len);
        let mut acc = vec![0.0; width];
        for i in c * CHUNK..end {
            term(i, &mut acc);
        }
        acc
    };
    let chunks = len.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = if chunks <= 1 {
        (0..chunks).map(chunk_sum).collect()
    } else {
        (0..chunks).into_par_iter().map(chunk_sum).collect()
    };
    tree(parts, |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect()).unwrap_or_else(|| vec![0.0; width])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_sums() {
        assert_eq!(sum(0, |_| 1.0), 0.0);
        assert_eq!(sum(10_000, |i| i as f64), 49_995_000.0);
        let v = sum_vec(1000, 2, |i, acc| {
            acc[0] += 1.0;
            acc[1] += i as f64;
        });
        assert_eq!(v, vec![1000.0, 499_500.0]);
    }

    #[test]
    fn independent_of_thread_count() {
        let term = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (1.0 + i as f64);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sum(100_003, term));
        let b = four.install(|| sum(100_003, term));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
