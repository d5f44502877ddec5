//! Partitioning repositories into evaluation buckets.
//!
//! Cross-validation must hold out whole repositories (usages from a project
//! must never be scanned with rules mined from the same project's history),
//! so the unit of partitioning is the repository, weighted by how many
//! corpus entries it contributes. The assignment keeps buckets near-equal:
//!
//! 1. Repositories are ordered by descending entry count (ties
//!    alphabetically) and buckets are capped at `ceil(total / k)` entries.
//! 2. Walking the ordered repositories, each one goes into the next bucket
//!    (cyclically) that still has room under the cap; the cursor then moves
//!    past the chosen bucket.
//! 3. A repository that fits nowhere goes into the bucket with the most
//!    remaining room (lowest index on ties).

/// Distributes `(repository, entry count)` pairs over `k` buckets; returns
/// the repository names per bucket. `k` must be at least 1.
pub fn assign_buckets(sizes: &[(String, usize)], k: usize) -> Vec<Vec<String>> {
    assert!(k >= 1, "bucket count must be at least 1");
    let mut buckets: Vec<Vec<String>> = vec![Vec::new(); k];
    let mut loads: Vec<usize> = vec![0; k];
    if sizes.is_empty() {
        return buckets;
    }

    let mut ordered: Vec<&(String, usize)> = sizes.iter().collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let total: usize = sizes.iter().map(|(_, size)| size).sum();
    let cap = total.div_ceil(k);

    let mut cursor = 0;
    for (name, size) in ordered {
        let fitting = (0..k).map(|step| (cursor + step) % k).find(|&b| loads[b] + size <= cap);
        let chosen = fitting.unwrap_or_else(|| {
            (0..k)
                .max_by_key(|&b| (cap.saturating_sub(loads[b]), usize::MAX - b))
                .expect("k >= 1")
        });
        buckets[chosen].push(name.clone());
        loads[chosen] += size;
        cursor = (chosen + 1) % k;
    }
    buckets
}
