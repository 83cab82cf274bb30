//! Small numeric and runtime helpers shared across modules.

/// Neumaier-compensated sum. Weight vectors get renormalized repeatedly in
/// the pipeline, so plain summation drift is not acceptable there.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Worker count for parallel sections: `WASS_THREADS` if set and nonzero,
/// otherwise rayon's default. Outputs never depend on this, only wall time.
pub fn worker_count() -> usize {
    std::env::var("WASS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0)
}

/// Build a rayon pool honoring [`worker_count`]. A count of zero lets rayon
/// pick the number of cores.
pub fn thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("thread pool construction cannot fail with these settings")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_handles_cancellation() {
        let vals = vec![1.0e16, 1.0, -1.0e16];
        assert_eq!(compensated_sum(vals), 1.0);
    }

    #[test]
    fn compensated_sum_empty_is_zero() {
        assert_eq!(compensated_sum(std::iter::empty()), 0.0);
    }
}
