//! Deterministic parallel summation: fixed-size chunks summed sequentially,
//! chunk results combined by pairwise tree reduction in index order.

use std::ops::Add;

use rayon::prelude::*;

pub const CHUNK: u64 = 2048;

fn tree<T: Copy + Add<Output = T>>(mut v: Vec<T>, zero: T) -> T {
    if v.is_empty() {
        return zero;
    }
    while v.len() > 1 {
        v = v.chunks(2).map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] }).collect();
    }
    v[0]
}

/// `sum_{i < n} f(i)`, independent of the thread count.
pub fn det_sum<T, F>(n: u64, zero: T, f: F) -> T
where
    T: Copy + Add<Output = T> + Send + Sync,
    F: Fn(u64) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = zero;
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc = acc + f(i);
            }
            acc
        })
        .collect();
    tree(partial, zero)
}

/// Chunked fold into an accumulator of type `A`, merged in index order.
pub fn det_fold<A, I, F, M>(n: u64, chunk: u64, init: I, f: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, u64) + Sync,
    M: Fn(A, A) -> A,
{
    let chunks = n.div_ceil(chunk.max(1));
    let partial: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for i in c * chunk..((c + 1) * chunk).min(n) {
                f(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut v = partial;
    if v.is_empty() {
        return init();
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_are_thread_independent() {
        let f = |i: u64| 1.0 / (1.0 + i as f64);
        let a = det_sum(100_000, 0.0, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| det_sum(100_000, 0.0, f));
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(det_sum(0, 0.0, f), 0.0);
        let v = det_fold(10_000, 7, || 0u64, |a, i| *a += i, |a, b| a + b);
        assert_eq!(v, 10_000 * 9_999 / 2);
    }
}
