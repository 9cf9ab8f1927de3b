use std::ops::Range;
use std::thread;

/// Splits `0..n` into at most `jobs` contiguous chunks and maps each on its own
/// thread. Results come back in chunk order.
pub(crate) fn map_chunks<T, F>(n: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let jobs = (jobs.max(1) as u64).min(n.max(1));
    let chunk = n.div_ceil(jobs);
    let ranges: Vec<Range<u64>> = (0..jobs).map(|j| (j * chunk).min(n)..((j + 1) * chunk).min(n)).collect();
    if ranges.len() == 1 {
        return vec![f(ranges[0].clone())];
    }
    thread::scope(|scope| {
        let handles: Vec<_> = ranges.into_iter().map(|r| scope.spawn(|| f(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_the_range_once() {
        for jobs in 1..6 {
            let parts = map_chunks(10, jobs, |r| r.collect::<Vec<_>>());
            assert_eq!(parts.concat(), (0..10).collect::<Vec<_>>());
        }
        assert_eq!(map_chunks(0, 4, |r| r.count()), vec![0]);
    }
}
