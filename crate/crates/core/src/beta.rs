//! Descent set statistics `β_n(S)` for every `S ⊆ [n-1]`.
//!
//! Tables are built from the flag f-vector (a multinomial per mask) by the
//! alternating subset transform `β(S) = Σ_{T ⊆ S} (-1)^{|S-T|} f(T)`.
//! The exact table runs the transform in wrapping 64-bit arithmetic: the
//! intermediate flag values overflow for `n >= 21`, but the identity holds
//! over `Z/2^64` and every final value is below `E_24 < 2^64`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::combinat::{binomial, full_mask, multinomial, pascal_table, BitIter, DescentSet};
use crate::error::{Error, Result};
use crate::report::VerifyReport;

/// Largest `n` with an exact 64-bit table.
pub const EXACT_MAX_N: u32 = 24;
/// Largest `n` for residue tables (one `u32` per subset).
pub const RESIDUE_MAX_N: u32 = 28;
/// Largest `n` for the bit-packed parity table.
pub const PARITY_MAX_N: u32 = 32;

const CHUNK_BITS: u32 = 14;

/// Exact `β_n(S)` for all masks, in binary mask order.
#[derive(Debug)]
pub struct BetaTable {
    n: u32,
    values: Vec<u64>,
    distinct: OnceLock<Vec<(u64, u64)>>,
}

impl Clone for BetaTable {
    fn clone(&self) -> Self {
        BetaTable { n: self.n, values: self.values.clone(), distinct: OnceLock::new() }
    }
}

impl PartialEq for BetaTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.values == other.values
    }
}

impl Eq for BetaTable {}

impl BetaTable {
    pub(crate) fn from_values(n: u32, values: Vec<u64>) -> Result<Self> {
        check_exact_n(n)?;
        if values.len() as u64 != 1u64 << (n - 1) {
            return Err(Error::invalid(format!(
                "a table for n = {n} needs {} values, got {}",
                1u64 << (n - 1),
                values.len()
            )));
        }
        Ok(BetaTable { n, values, distinct: OnceLock::new() })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, mask: u64) -> u64 {
        self.values[mask as usize]
    }

    pub fn get(&self, s: &DescentSet) -> Result<u64> {
        if s.n() != self.n {
            return Err(Error::invalid(format!("set lives in [{}] but the table is for n = {}", s.n() - 1, self.n)));
        }
        Ok(self.value(s.mask()))
    }

    pub fn max_value(&self) -> u64 {
        self.values.par_iter().copied().max().unwrap_or(0)
    }

    /// Sum of all entries, which is `n!`.
    pub fn total(&self) -> u128 {
        self.values.par_iter().map(|&v| v as u128).sum()
    }

    /// Distinct values with multiplicities, ascending by value. Cached.
    pub fn distinct_values(&self) -> &[(u64, u64)] {
        self.distinct.get_or_init(|| {
            let mut sorted = self.values.clone();
            sorted.par_sort_unstable();
            let mut out: Vec<(u64, u64)> = Vec::new();
            for v in sorted {
                match out.last_mut() {
                    Some((last, count)) if *last == v => *count += 1,
                    _ => out.push((v, 1)),
                }
            }
            out
        })
    }

    pub fn residue_table(&self, m: u64) -> Result<ResidueTable> {
        check_modulus(m)?;
        let values = self.values.par_iter().map(|&v| (v % m) as u32).collect();
        Ok(ResidueTable { n: self.n, m, values })
    }
}

fn check_exact_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > EXACT_MAX_N {
        return Err(Error::ExactModeRange { n, max: EXACT_MAX_N });
    }
    Ok(())
}

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 || m > u32::MAX as u64 {
        return Err(Error::invalid(format!("modulus must lie in 1..=2^32-1, got {m}")));
    }
    Ok(())
}

/// `β_n(S) mod m` for all masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTable {
    n: u32,
    m: u64,
    values: Vec<u32>,
}

impl ResidueTable {
    pub(crate) fn from_values(n: u32, m: u64, values: Vec<u32>) -> Result<Self> {
        if n == 0 || n > RESIDUE_MAX_N {
            return Err(Error::ResourceLimit { what: "residue tables", n, max: RESIDUE_MAX_N });
        }
        check_modulus(m)?;
        if values.len() as u64 != 1u64 << (n - 1) {
            return Err(Error::invalid("residue table length does not match n"));
        }
        if values.iter().any(|&v| v as u64 >= m) {
            return Err(Error::invalid("residue table entry is not reduced"));
        }
        Ok(ResidueTable { n, m, values })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, mask: u64) -> u32 {
        self.values[mask as usize]
    }

    pub fn histogram(&self) -> ResidueHistogram {
        let m = self.m as usize;
        let counts = self
            .values
            .par_chunks(1 << 16)
            .fold(
                || vec![0u64; m],
                |mut acc, chunk| {
                    for &v in chunk {
                        acc[v as usize] += 1;
                    }
                    acc
                },
            )
            .reduce(|| vec![0u64; m], add_vecs);
        ResidueHistogram { n: self.n, m: self.m, counts }
    }
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `a_{m,j}`: number of subsets `S` with `β_n(S) ≡ j (mod m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueHistogram {
    pub n: u32,
    pub m: u64,
    pub counts: Vec<u64>,
}

impl ResidueHistogram {
    pub fn count(&self, j: i64) -> u64 {
        self.counts[j.rem_euclid(self.m as i64) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `b_{m,j} = Σ { β_n(S) : β_n(S) ≡ j (mod m) }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHistogram {
    pub n: u32,
    pub m: u64,
    pub sums: Vec<BigUint>,
}

impl WeightedHistogram {
    pub fn total(&self) -> BigUint {
        self.sums.iter().sum()
    }
}

pub fn residue_histogram(table: &BetaTable, m: u64) -> Result<ResidueHistogram> {
    check_modulus(m)?;
    let mut counts = vec![0u64; m as usize];
    for &(v, c) in table.distinct_values() {
        counts[(v % m) as usize] += c;
    }
    Ok(ResidueHistogram { n: table.n, m, counts })
}

/// Weighted sums as `u128`; exact because they are bounded by `24! < 2^80`.
pub(crate) fn weighted_sums(table: &BetaTable, m: u64) -> Vec<u128> {
    let mut sums = vec![0u128; m as usize];
    for &(v, c) in table.distinct_values() {
        sums[(v % m) as usize] += v as u128 * c as u128;
    }
    sums
}

pub fn weighted_histogram(table: &BetaTable, m: u64) -> Result<WeightedHistogram> {
    check_modulus(m)?;
    let sums = weighted_sums(table, m).into_iter().map(BigUint::from).collect();
    Ok(WeightedHistogram { n: table.n, m, sums })
}

/// `f_S`, the number of chains in the Boolean algebra with rank set `S`.
pub fn flag_f(s: &DescentSet) -> BigUint {
    multinomial(&s.composition())
}

/// `β_n(S)` for one set, by inclusion-exclusion over `T ⊆ S`.
///
/// The alternating sum is evaluated by grouping the terms on the largest
/// element of `T`, which keeps the cost quadratic in `|S|`.
pub fn beta_single(s: &DescentSet) -> BigUint {
    let n = s.n() as u64;
    let mut points: Vec<u64> = vec![0];
    points.extend(s.elements().map(u64::from));
    points.push(n);
    // d[i] = Σ over chains T ending at points[i] of sign · multinomial prefix
    let mut d: Vec<BigInt> = Vec::with_capacity(points.len());
    d.push(BigInt::one());
    for i in 1..points.len() {
        let mut acc = BigInt::zero();
        for j in 0..i {
            let skipped = i - j - 1;
            let term = &d[j] * BigInt::from(binomial(points[i], (points[i] - points[j]) as i64));
            if skipped % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        d.push(acc);
    }
    let out = d.pop().expect("at least two points");
    debug_assert!(!out.is_negative());
    out.magnitude().clone()
}

/// Applies `a[hi] = op(a[hi], a[lo])` across every bit, where `lo` is `hi`
/// with that bit cleared. Results do not depend on the rayon pool size.
fn subset_transform<T, F>(a: &mut [T], op: F)
where
    T: Copy + Send + Sync,
    F: Fn(T, T) -> T + Sync,
{
    let bits = a.len().trailing_zeros();
    debug_assert!(a.len().is_power_of_two());
    let inner = bits.min(CHUNK_BITS);
    a.par_chunks_mut(1 << inner).for_each(|chunk| {
        for b in 0..inner {
            let h = 1usize << b;
            for block in chunk.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (x, &y) in hi.iter_mut().zip(lo.iter()) {
                    *x = op(*x, y);
                }
            }
        }
    });
    for b in inner..bits {
        let h = 1usize << b;
        a.par_chunks_mut(2 * h).for_each(|block| {
            let (lo, hi) = block.split_at_mut(h);
            hi.par_chunks_mut(1 << CHUNK_BITS).zip(lo.par_chunks(1 << CHUNK_BITS)).for_each(|(x, y)| {
                for (x, &y) in x.iter_mut().zip(y.iter()) {
                    *x = op(*x, y);
                }
            });
        });
    }
}

/// Flag f-vector per mask: `Π C(s_i, c_i)` over the partial sums, reduced by `mul`.
fn flag_table<T, M>(n: u32, pascal: &[Vec<u64>], one: T, lift: impl Fn(u64) -> T + Sync, mul: M) -> Vec<T>
where
    T: Copy + Send + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let size = 1usize << (n - 1);
    let mut table = vec![one; size];
    table.par_iter_mut().enumerate().for_each(|(mask, slot)| {
        let mut acc = one;
        let mut prev = 0u32;
        for b in BitIter(mask as u64) {
            let s = b + 1;
            acc = mul(acc, lift(pascal[s as usize][(s - prev) as usize]));
            prev = s;
        }
        acc = mul(acc, lift(pascal[n as usize][(n - prev) as usize]));
        *slot = acc;
    });
    table
}

/// Exact table for `1 <= n <= 24`.
pub fn build_beta_table(n: u32) -> Result<BetaTable> {
    check_exact_n(n)?;
    let pascal = pascal_table(n, |v| v);
    let mut values = flag_table(n, &pascal, 1u64, |v| v, u64::wrapping_mul);
    subset_transform(&mut values, u64::wrapping_sub);
    Ok(BetaTable { n, values, distinct: OnceLock::new() })
}

/// `β_n(S) mod m` for every mask, computed directly in `Z/m`.
pub fn build_residue_table(n: u32, m: u64) -> Result<ResidueTable> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > RESIDUE_MAX_N {
        return Err(Error::ResourceLimit { what: "residue tables", n, max: RESIDUE_MAX_N });
    }
    check_modulus(m)?;
    let pascal = pascal_table(n, |v| v % m);
    let values = flag_table(n, &pascal, (1 % m) as u32, |v| v as u32, |a, b| (a as u64 * b as u64 % m) as u32);
    let mut values = values;
    subset_transform(&mut values, |hi, lo| {
        let (hi, lo) = (hi as u64, lo as u64);
        ((hi + m - lo) % m) as u32
    });
    Ok(ResidueTable { n, m, values })
}

/// `β_n(S) mod 2`, one bit per mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityTable {
    n: u32,
    words: Vec<u64>,
}

impl ParityTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_odd(&self, mask: u64) -> bool {
        self.words[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }

    pub fn count_odd(&self) -> u64 {
        let valid = 1u64 << (self.n - 1);
        if valid < 64 {
            return (self.words[0] & ((1u64 << valid) - 1)).count_ones() as u64;
        }
        self.words.par_iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Builds the parity table for `1 <= n <= 32`.
///
/// A multinomial is odd exactly when its parts add without binary carries,
/// i.e. when the partial sums form a chain of binary submasks of `n`. Those
/// masks are enumerated directly, then the subset transform runs over GF(2).
pub fn build_parity_table(n: u32) -> Result<ParityTable> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > PARITY_MAX_N {
        return Err(Error::ResourceLimit { what: "parity tables", n, max: PARITY_MAX_N });
    }
    let bits = n - 1;
    let word_count = (1usize << bits).div_ceil(64);
    let mut words = vec![0u64; word_count];
    for mask in odd_flag_masks(n) {
        words[(mask >> 6) as usize] |= 1 << (mask & 63);
    }
    // in-word passes for bits 0..6
    const LOW: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    let inword = bits.min(6);
    words.par_iter_mut().for_each(|w| {
        for (b, low) in LOW.iter().enumerate().take(inword as usize) {
            *w ^= (*w & low) << (1 << b);
        }
    });
    if bits > 6 {
        subset_transform(&mut words, |hi, lo| hi ^ lo);
    }
    Ok(ParityTable { n, words })
}

/// Masks whose flag f-vector entry is odd.
pub(crate) fn odd_flag_masks(n: u32) -> Vec<u64> {
    let mut out = Vec::new();
    chains(n as u64, 0, 0, &mut out);
    out
}

fn chains(n: u64, last: u64, mask: u64, out: &mut Vec<u64>) {
    out.push(mask);
    // next partial sum: a proper superset of `last` inside `n`, below `n`
    let free = n & !last;
    let mut sub = free;
    while sub != 0 {
        let next = last | sub;
        if next != n {
            chains(n, next, mask | 1 << (next - 1), out);
        }
        sub = (sub - 1) & free;
    }
}

/// `ρ(n)`: the proportion of subsets with odd `β_n(S)`, for `1 <= n <= 32`.
pub fn rho(n: u32) -> Result<Ratio<u64>> {
    let table = build_parity_table(n)?;
    Ok(Ratio::new(table.count_odd(), 1u64 << (n - 1)))
}

/// Checks `β_n(S) + β_n(S △ {k}) = C(n,k) β_k(S ∩ [k-1]) β_{n-k}((S ∩ [k+1,n-1]) - k)`
/// for every `S` and `k`, in arbitrary precision.
pub fn verify_macmahon(n: u32) -> Result<VerifyReport> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > 14 {
        return Err(Error::ResourceLimit { what: "the multiplication identity sweep", n, max: 14 });
    }
    let tables: Vec<BetaTable> = (1..=n).map(build_beta_table).collect::<Result<_>>()?;
    let big = &tables[n as usize - 1];
    let mut report = VerifyReport::new(format!("macmahon n={n}"));
    let checked = std::sync::atomic::AtomicU64::new(0);
    let first_bad = (1..n)
        .into_par_iter()
        .flat_map_iter(|k| (0..big.len() as u64).map(move |mask| (k, mask)))
        .find_first(|&(k, mask)| {
            checked.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            let lhs = BigUint::from(big.value(mask)) + big.value(mask ^ (1 << (k - 1)));
            let left = mask & full_mask(k);
            let right = (mask >> k) & full_mask(n - k);
            let rhs = binomial(n as u64, k as i64)
                * tables[k as usize - 1].value(left)
                * tables[(n - k) as usize - 1].value(right);
            lhs != rhs
        });
    match first_bad {
        None => report.push(
            format!("multiplication identity for n={n}"),
            true,
            format!("{} (S, k) pairs", (n as u64 - 1) << (n - 1)),
        ),
        Some((k, mask)) => {
            let s = DescentSet::new(n, mask)?;
            report.push(format!("multiplication identity for n={n}"), false, format!("fails at S={s}, k={k}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Permutation enumeration, the reference for small tables.

    pub fn next_permutation(p: &mut [u32]) -> bool {
        let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
            return false;
        };
        let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a larger element");
        p.swap(i, j);
        p[i + 1..].reverse();
        true
    }

    pub fn brute_force_table(n: u32) -> Vec<u64> {
        let mut counts = vec![0u64; 1 << (n - 1)];
        let mut p: Vec<u32> = (1..=n).collect();
        loop {
            let mut mask = 0usize;
            for i in 0..(n as usize - 1) {
                if p[i] > p[i + 1] {
                    mask |= 1 << i;
                }
            }
            counts[mask] += 1;
            if !next_permutation(&mut p) {
                break;
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::brute_force_table;
    use super::*;
    use crate::combinat::euler_zigzag;

    #[test]
    fn n4_table() {
        let t = build_beta_table(4).unwrap();
        assert_eq!(t.values(), &[1, 3, 5, 3, 3, 5, 3, 1]);
        assert_eq!(build_beta_table(6).unwrap().max_value(), 61);
        assert_eq!(build_beta_table(1).unwrap().values(), &[1]);
    }

    #[test]
    fn matches_permutation_oracle() {
        for n in 1..=8 {
            assert_eq!(build_beta_table(n).unwrap().values(), brute_force_table(n).as_slice(), "n = {n}");
        }
    }

    #[test]
    fn exact_range_enforced() {
        assert!(matches!(build_beta_table(25), Err(Error::ExactModeRange { n: 25, max: 24 })));
        assert!(build_beta_table(0).is_err());
        assert!(build_residue_table(29, 2).unwrap_err().is_resource_limit());
        assert!(build_parity_table(33).unwrap_err().is_resource_limit());
    }

    #[test]
    fn single_values() {
        let s = |n, e: &[u32]| DescentSet::from_elements(n, e).unwrap();
        assert_eq!(beta_single(&s(3, &[1])), BigUint::from(2u32));
        assert_eq!(beta_single(&s(4, &[2])), BigUint::from(5u32));
        assert_eq!(beta_single(&s(9, &[])), BigUint::one());
        assert_eq!(flag_f(&s(4, &[2])), BigUint::from(6u32));
        assert_eq!(flag_f(&s(11, &[1])), BigUint::from(11u32));
        let t = build_beta_table(11).unwrap();
        for mask in (0..t.len() as u64).step_by(7) {
            assert_eq!(beta_single(&DescentSet::new(11, mask).unwrap()), BigUint::from(t.value(mask)));
        }
        // alternating set in [40]: the Euler number
        let alt: Vec<u32> = (1..40).filter(|i| i % 2 == 1).collect();
        assert_eq!(beta_single(&s(40, &alt)), euler_zigzag(40));
    }

    #[test]
    fn totals_and_max() {
        let mut fact: u128 = 1;
        for n in 1..=16u32 {
            fact *= n as u128;
            let t = build_beta_table(n).unwrap();
            assert_eq!(t.total(), fact);
            assert_eq!(BigUint::from(t.max_value()), euler_zigzag(n));
            assert_eq!(t.value(0), 1);
        }
    }

    #[test]
    fn residue_matches_exact() {
        let t = build_beta_table(12).unwrap();
        for m in [1u64, 2, 3, 7, 10, 64, 97, 1000] {
            assert_eq!(build_residue_table(12, m).unwrap(), t.residue_table(m).unwrap(), "m = {m}");
        }
        assert_eq!(build_residue_table(4, 2).unwrap().values(), &[1; 8]);
        assert_eq!(build_residue_table(3, 2).unwrap().values(), &[1, 0, 0, 1]);
    }

    #[test]
    fn parity_matches_residue() {
        for n in 1..=18 {
            let p = build_parity_table(n).unwrap();
            let r = build_residue_table(n, 2).unwrap();
            for mask in 0..(1u64 << (n - 1)) {
                assert_eq!(p.is_odd(mask), r.value(mask) == 1, "n = {n}, mask = {mask}");
            }
        }
    }

    #[test]
    fn rho_small() {
        assert_eq!(rho(1).unwrap(), Ratio::new(1, 1));
        assert_eq!(rho(4).unwrap(), Ratio::new(1, 1));
        assert_eq!(rho(7).unwrap(), Ratio::new(1, 2));
        assert_eq!(rho(15).unwrap(), Ratio::new(29, 64));
    }

    #[test]
    fn histograms() {
        let t = build_beta_table(4).unwrap();
        let h = residue_histogram(&t, 2).unwrap();
        assert_eq!(h.counts, vec![0, 8]);
        let w = weighted_histogram(&t, 2).unwrap();
        assert_eq!(w.sums, vec![BigUint::zero(), BigUint::from(24u32)]);
        let h3 = residue_histogram(&build_beta_table(3).unwrap(), 2).unwrap();
        assert_eq!(h3.counts, vec![2, 2]);
        let t6 = build_beta_table(6).unwrap();
        assert_eq!(weighted_histogram(&t6, 6).unwrap().total(), BigUint::from(720u32));
        for m in 1..40 {
            let h = residue_histogram(&t6, m).unwrap();
            assert_eq!(h.total(), 32);
            assert_eq!(h, t6.residue_table(m).unwrap().histogram());
        }
    }

    #[test]
    fn macmahon_small() {
        for n in 1..=9 {
            assert!(verify_macmahon(n).unwrap().passed(), "n = {n}");
        }
        assert!(verify_macmahon(15).is_err());
    }
}
