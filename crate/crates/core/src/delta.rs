//! The complex `Δ_n`: subsets of `[n-1]` whose composition adds up to `n`
//! without binary carries. Its vertices are the base-2 essential elements of
//! `n`, and the parity of its induced subcomplexes recovers `β_n(S) mod 2`.

use crate::beta::{build_parity_table, build_residue_table, PARITY_MAX_N};
use crate::combinat::{composition_parts, digitwise_le, full_mask, DescentSet};
use crate::error::{Error, Result};
use crate::report::VerifyReport;

/// Largest number of binary ones accepted by [`complex_census`].
pub const CENSUS_MAX_ONES: u32 = 5;
/// Exhaustive parity checks run up to this `n`; beyond it they are sampled.
pub const PARITY_EXHAUSTIVE_MAX_N: u32 = 20;
const PARITY_SAMPLES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaComplex {
    n: u32,
    ones: u32,
    vertices: Vec<u32>,
}

impl DeltaComplex {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::invalid(format!("n must lie in 1..=64, got {n}")));
        }
        let vertices = (1..n).filter(|&k| digitwise_le(k as u64, n as u64, 2)).collect();
        Ok(DeltaComplex { n, ones: n.count_ones(), vertices })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of ones in the binary expansion of `n`.
    pub fn binary_ones(&self) -> u32 {
        self.ones
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn vertex_mask(&self) -> u64 {
        self.vertices.iter().fold(0, |acc, &v| acc | 1 << (v - 1))
    }

    /// Every face as a mask, the empty face first.
    pub fn faces(&self) -> Vec<u64> {
        let mut out = Vec::new();
        faces_within(self.n as u64, full_mask(self.n), 0, 0, &mut |m| out.push(m));
        out
    }
}

/// Whether the parts of `co(S)` have pairwise disjoint binary supports.
pub fn is_face(s: &DescentSet) -> bool {
    let mut seen = 0u64;
    for part in composition_parts(s.n(), s.mask()) {
        let part = part as u64;
        if seen & part != 0 {
            return false;
        }
        seen |= part;
    }
    true
}

// Faces inside `allowed`: chains 0 ⊂ s_1 ⊂ ... of binary submasks of `n`,
// each s_i an allowed element below n.
fn faces_within(n: u64, allowed: u64, last: u64, mask: u64, visit: &mut impl FnMut(u64)) {
    visit(mask);
    let free = n & !last;
    let mut sub = free;
    while sub != 0 {
        let next = last | sub;
        if next != n && allowed >> (next - 1) & 1 == 1 {
            faces_within(n, allowed, next, mask | 1 << (next - 1), visit);
        }
        sub = (sub - 1) & free;
    }
}

/// `χ̃(Δ_n|_S) mod 2`: the parity of the number of faces inside `S`,
/// counting the empty face.
pub fn reduced_euler_char_mod2(s: &DescentSet) -> u8 {
    let mut count = 0u64;
    faces_within(s.n() as u64, s.mask(), 0, 0, &mut |_| count += 1);
    (count & 1) as u8
}

/// Face counts by number of vertices: entry `i` counts faces with `i` vertices.
pub fn complex_census(n: u32) -> Result<Vec<u64>> {
    let delta = DeltaComplex::new(n)?;
    if delta.ones > CENSUS_MAX_ONES {
        return Err(Error::invalid(format!(
            "census supports at most {CENSUS_MAX_ONES} binary ones, n = {n} has {}",
            delta.ones
        )));
    }
    let mut counts = vec![0u64; delta.ones.max(1) as usize];
    for face in delta.faces() {
        counts[face.count_ones() as usize] += 1;
    }
    Ok(counts)
}

/// Checks `β_n(S) ≡ χ̃(Δ_n|_S) (mod 2)`: every subset for
/// `n <= 20`, a fixed spread of subsets against the bit-packed table up to `n = 32`.
pub fn verify_parity_theorem(n: u32) -> Result<VerifyReport> {
    if n == 0 || n > PARITY_MAX_N {
        return Err(Error::ResourceLimit { what: "parity verification", n, max: PARITY_MAX_N });
    }
    let mut report = VerifyReport::new(format!("parity n={n}"));
    let size = 1u64 << (n - 1);
    let bad = if n <= PARITY_EXHAUSTIVE_MAX_N {
        let table = build_residue_table(n, 2)?;
        first_mismatch(0..size, n, |m| table.value(m) as u8)
    } else {
        let table = build_parity_table(n)?;
        // Weyl sequence: deterministic and spread over the whole mask range
        let step = 0x9e37_79b9_7f4a_7c15u64;
        let masks = (0..PARITY_SAMPLES).map(move |i| i.wrapping_mul(step) & (size - 1));
        first_mismatch(masks, n, |m| table.is_odd(m) as u8)
    };
    let scope = if n <= PARITY_EXHAUSTIVE_MAX_N {
        format!("all {size} subsets")
    } else {
        format!("{PARITY_SAMPLES} sampled subsets")
    };
    match bad {
        None => report.push(format!("parity of induced subcomplexes, n={n}"), true, scope),
        Some(mask) => report.push(
            format!("parity of induced subcomplexes, n={n}"),
            false,
            format!("mismatch at S={}", DescentSet::new(n, mask)?),
        ),
    }
    Ok(report)
}

fn first_mismatch(masks: impl Iterator<Item = u64> + Send, n: u32, parity: impl Fn(u64) -> u8 + Sync) -> Option<u64> {
    use rayon::prelude::*;
    masks.par_bridge().find_any(|&mask| {
        let s = DescentSet::new(n, mask).expect("mask in range");
        reduced_euler_char_mod2(&s) != parity(mask)
    })
}
