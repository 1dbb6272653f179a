//! Permutation-enumeration oracle shared by the integration tests.

/// `counts[mask]` = number of permutations of `[n]` whose descent set is `mask`.
pub fn descent_counts_by_enumeration(n: u32) -> Vec<u64> {
    let n = n as usize;
    let mut counts = vec![0u64; 1 << (n - 1)];
    let mut p: Vec<u32> = (1..=n as u32).collect();
    loop {
        let mask = (0..n - 1).filter(|&i| p[i] > p[i + 1]).fold(0usize, |m, i| m | 1 << i);
        counts[mask] += 1;
        // next lexicographic permutation
        let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    counts
}
