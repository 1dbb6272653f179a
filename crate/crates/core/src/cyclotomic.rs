//! Cyclotomic factors of `Q_n(t) = Σ_S t^{β_n(S)}`.
//!
//! `Φ_m | Q_n` exactly when `Q_n(ω) = Σ_j a_{m,j} ω^j` vanishes at a
//! primitive `m`-th root `ω`, and `Φ_m^2 | Q_n` when additionally
//! `ω Q_n'(ω) = Σ_j b_{m,j} ω^j` vanishes. Both sums are decided exactly,
//! either by reduction modulo `Φ_m(t)` or by a recursive criterion on the
//! coefficient vector (see [`vanishes_at_primitive_root`]).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::beta::{
    build_beta_table, build_residue_table, residue_histogram, weighted_sums, BetaTable, ResidueHistogram,
};
use crate::combinat::smallest_prime_factor;
use crate::error::{Error, Result};
use crate::poly::{cyclotomic_polynomial, totient, IntPolynomial};
use crate::report::VerifyReport;

/// Default bound on the factor index `m` in scans.
pub const DEFAULT_M_MAX: u64 = 10_000;

/// An element of `Z[t]/Φ_m(t)` in canonical form: `φ(m)` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    m: u64,
    coeffs: Vec<i128>,
}

impl CyclotomicInt {
    pub fn zero(m: u64) -> Self {
        assert!(m >= 1, "cyclotomic index must be positive");
        CyclotomicInt { m, coeffs: vec![0; totient(m) as usize] }
    }

    /// Reduces `Σ_j c_j t^j` (any length) modulo `Φ_m`.
    pub fn from_coefficients(m: u64, c: &[i128]) -> Self {
        reduce_mod_cyclotomic(&IntPolynomial::new(c.to_vec()), m)
    }

    pub fn index(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_sub(b))
    }

    pub fn neg(&self) -> Self {
        CyclotomicInt { m: self.m, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }

    fn zip(&self, other: &Self, op: impl Fn(i128, i128) -> Option<i128>) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::ModulusMismatch(self.m, other.m));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| op(a, b).expect("cyclotomic coefficient overflow"))
            .collect();
        Ok(CyclotomicInt { m: self.m, coeffs })
    }

    /// Image under complex conjugation `t -> t^{m-1}`.
    pub fn conjugate(&self) -> Self {
        let m = self.m as usize;
        let mut c = vec![0i128; m.max(1)];
        for (j, &v) in self.coeffs.iter().enumerate() {
            c[(m - j % m) % m] += v;
        }
        Self::from_coefficients(self.m, &c)
    }

    /// Fixed by conjugation, i.e. a real number.
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Negated by conjugation, i.e. purely imaginary.
    pub fn is_imaginary(&self) -> bool {
        self.conjugate() == self.neg()
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = IntPolynomial::new(self.coeffs.clone());
        write!(f, "{}", poly.to_string().replace('t', "ω"))
    }
}

/// Exact remainder of `pol` modulo `Φ_m(t)`.
pub fn reduce_mod_cyclotomic(pol: &IntPolynomial, m: u64) -> CyclotomicInt {
    assert!(m >= 1, "cyclotomic index must be positive");
    // t^m ≡ 1 modulo Φ_m, so fold exponents first
    let mut folded = vec![0i128; m as usize];
    for (j, &c) in pol.coeffs().iter().enumerate() {
        let slot = &mut folded[j % m as usize];
        *slot = slot.checked_add(c).expect("cyclotomic coefficient overflow");
    }
    let phi = cyclotomic_polynomial(m);
    let (_, rem) = IntPolynomial::new(folded).div_rem_monic(&phi);
    let mut coeffs = rem.coeffs().to_vec();
    coeffs.resize(totient(m) as usize, 0);
    CyclotomicInt { m, coeffs }
}

/// Whether `Σ_{j<m} c_j ω^j = 0` for a primitive `m`-th root `ω`.
///
/// Let `p` be the smallest prime factor of `m`. If `p^2 | m`, the powers
/// `1, ω, ..., ω^{p-1}` are a basis over `Q(ω^p)` and the sum splits into
/// `p` independent sums at the primitive `(m/p)`-th root `ω^p`. Otherwise
/// `m = pM` with `gcd(p, M) = 1`, the sum equals `Σ_r ζ_p^r C_r(ζ_M)` where
/// `C_r` gathers the exponents `≡ r (mod p)`, and since the only relation
/// among the `ζ_p^r` over `Q(ζ_M)` is their sum, it vanishes exactly when
/// every `C_r - C_{p-1}` vanishes at `ζ_M`.
pub fn vanishes_at_primitive_root(c: &[i128], m: u64) -> bool {
    assert_eq!(c.len() as u64, m, "need one coefficient per residue class");
    if m == 1 {
        return c[0] == 0;
    }
    let p = smallest_prime_factor(m);
    let sub = m / p;
    let (p_us, sub_us) = (p as usize, sub as usize);
    if sub % p == 0 {
        let mut part = vec![0i128; sub_us];
        (0..p_us).all(|r| {
            for (i, slot) in part.iter_mut().enumerate() {
                *slot = c[p_us * i + r];
            }
            vanishes_at_primitive_root(&part, sub)
        })
    } else {
        let mut classes = vec![vec![0i128; sub_us]; p_us];
        for (j, &v) in c.iter().enumerate() {
            classes[j % p_us][j % sub_us] += v;
        }
        let last = classes.pop().expect("p >= 2");
        classes.iter_mut().all(|cl| {
            for (x, &y) in cl.iter_mut().zip(&last) {
                *x -= y;
            }
            vanishes_at_primitive_root(cl, sub)
        })
    }
}

fn counts_vector(h: &ResidueHistogram) -> Vec<i128> {
    h.counts.iter().map(|&c| c as i128).collect()
}

/// `Q_n(ω)` from a residue histogram.
pub fn q_at_root_from_histogram(h: &ResidueHistogram) -> CyclotomicInt {
    CyclotomicInt::from_coefficients(h.m, &counts_vector(h))
}

/// `Q_n(ω)` for a primitive `m`-th root `ω`, as an element of `Z[ω]`.
pub fn q_at_root(table: &BetaTable, m: u64) -> Result<CyclotomicInt> {
    Ok(q_at_root_from_histogram(&residue_histogram(table, m)?))
}

/// `ω Q_n'(ω) = Σ_S β_n(S) ω^{β_n(S)}`.
pub fn derivative_at_root(table: &BetaTable, m: u64) -> Result<CyclotomicInt> {
    let sums: Vec<i128> = weighted_sums(table, check_m(m)?).into_iter().map(|v| v as i128).collect();
    Ok(CyclotomicInt::from_coefficients(m, &sums))
}

fn check_m(m: u64) -> Result<u64> {
    if m == 0 || m > u32::MAX as u64 {
        return Err(Error::invalid(format!("factor index must lie in 1..2^32, got {m}")));
    }
    Ok(m)
}

/// `Φ_m | Q_n`.
pub fn divides(table: &BetaTable, m: u64) -> Result<bool> {
    let h = residue_histogram(table, check_m(m)?)?;
    Ok(vanishes_at_primitive_root(&counts_vector(&h), m))
}

/// `Φ_m^2 | Q_n`: both `Q_n(ω)` and `Q_n'(ω)` vanish.
pub fn multiplicity_at_least_2(table: &BetaTable, m: u64) -> Result<bool> {
    if !divides(table, m)? {
        return Ok(false);
    }
    let sums: Vec<i128> = weighted_sums(table, m).into_iter().map(|v| v as i128).collect();
    Ok(vanishes_at_primitive_root(&sums, m))
}

/// The sufficient condition `a_j = a_{-j}` and `a_j = a_{m/2 - j}` for all `j`.
pub fn lemma41_conditions_hold(h: &ResidueHistogram) -> Result<bool> {
    if h.m % 2 != 0 {
        return Err(Error::invalid(format!("the reflection conditions need an even modulus, got {}", h.m)));
    }
    let m = h.m as i64;
    Ok((0..m).all(|j| h.count(j) == h.count(-j) && h.count(j) == h.count(m / 2 - j)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    One,
    TwoOrMore,
    /// Divisibility known, order not tested (residue mode).
    Unknown,
}

impl Multiplicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Multiplicity::One => "1",
            Multiplicity::TwoOrMore => "2+",
            Multiplicity::Unknown => "1+",
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorEntry {
    pub m: u64,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub n: u32,
    pub m_max: u64,
    pub even_only: bool,
    pub factors: Vec<FactorEntry>,
}

impl FactorReport {
    pub fn indices(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.m).collect()
    }

    pub fn get(&self, m: u64) -> Option<Multiplicity> {
        self.factors.iter().find(|f| f.m == m).map(|f| f.multiplicity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,multiplicity\n");
        for f in &self.factors {
            out.push_str(&format!("{},{},{}\n", self.n, f.m, f.multiplicity));
        }
        out
    }

    /// `Φ_2^2 · Φ_10` style product; `-` when empty.
    pub fn product_string(&self) -> String {
        if self.factors.is_empty() {
            return "-".into();
        }
        self.factors
            .iter()
            .map(|f| match f.multiplicity {
                Multiplicity::One => format!("Φ_{}", f.m),
                Multiplicity::TwoOrMore => format!("Φ_{}^2", f.m),
                Multiplicity::Unknown => format!("Φ_{}^?", f.m),
            })
            .collect::<Vec<_>>()
            .join(" · ")
    }
}

fn candidates(m_max: u64, include_odd: bool) -> Vec<u64> {
    (1..=m_max).filter(|&m| include_odd || m == 1 || m % 2 == 0).collect()
}

/// Every `m <= m_max` with `Φ_m | Q_n`, tagged with multiplicity `1` or `2+`.
/// Without `include_odd`, only `m = 1` and even `m` are tried.
pub fn scan_factors(table: &BetaTable, m_max: u64, include_odd: bool) -> Result<FactorReport> {
    check_m(m_max)?;
    let distinct = table.distinct_values();
    let factors = candidates(m_max, include_odd)
        .into_par_iter()
        .filter_map(|m| {
            let mu = m as usize;
            let mut counts = vec![0i128; mu];
            for &(v, c) in distinct {
                counts[(v % m) as usize] += c as i128;
            }
            if !vanishes_at_primitive_root(&counts, m) {
                return None;
            }
            let mut sums = vec![0i128; mu];
            for &(v, c) in distinct {
                sums[(v % m) as usize] += v as i128 * c as i128;
            }
            let multiplicity =
                if vanishes_at_primitive_root(&sums, m) { Multiplicity::TwoOrMore } else { Multiplicity::One };
            Some(FactorEntry { m, multiplicity })
        })
        .collect();
    Ok(FactorReport { n: table.n(), m_max, even_only: !include_odd, factors })
}

/// Scan from residue tables built directly mod `m`; works past the exact
/// range but cannot tell the multiplicity.
pub fn scan_factors_residue_mode(n: u32, m_max: u64, include_odd: bool) -> Result<FactorReport> {
    check_m(m_max)?;
    let mut factors = Vec::new();
    for m in candidates(m_max, include_odd) {
        let h = build_residue_table(n, m)?.histogram();
        if vanishes_at_primitive_root(&counts_vector(&h), m) {
            factors.push(FactorEntry { m, multiplicity: Multiplicity::Unknown });
        }
    }
    Ok(FactorReport { n, m_max, even_only: !include_odd, factors })
}

/// Source of exact tables for the multi-`n` verifiers.
pub type TableProvider<'a> = dyn Fn(u32) -> Result<Arc<BetaTable>> + Sync + 'a;

/// Differences between a scan and an expected factor list, ignoring
/// expected factors above the scan's `m_max`.
pub fn factor_row_problems(found: &FactorReport, expected: &[(u64, Multiplicity)]) -> Vec<String> {
    let expected: Vec<(u64, Multiplicity)> = expected.iter().copied().filter(|&(m, _)| m <= found.m_max).collect();
    let mut problems = Vec::new();
    for &(m, mult) in &expected {
        match found.get(m) {
            None => problems.push(format!("missing Φ_{m}")),
            Some(got) if got != mult => problems.push(format!("Φ_{m} multiplicity {got}, expected {mult}")),
            _ => {}
        }
    }
    for f in &found.factors {
        if !expected.iter().any(|&(m, _)| m == f.m) {
            problems.push(format!("extra Φ_{}", f.m));
        }
    }
    problems
}

/// Compares scans for `n_lo..=n_hi` against the embedded expected rows.
pub fn verify_table6(n_lo: u32, n_hi: u32, m_max: u64) -> Result<VerifyReport> {
    verify_table6_with(n_lo, n_hi, m_max, &|n| build_beta_table(n).map(Arc::new))
}

pub fn verify_table6_with(n_lo: u32, n_hi: u32, m_max: u64, tables: &TableProvider<'_>) -> Result<VerifyReport> {
    use crate::data::{expected_factors, unexplained_factors};
    if n_lo < 1 || n_hi < n_lo {
        return Err(Error::invalid(format!("bad range {n_lo}..={n_hi}")));
    }
    let mut report = VerifyReport::new(format!("table6 n={n_lo}..{n_hi} m_max={m_max}"));
    for n in n_lo..=n_hi {
        let Some(expected) = expected_factors(n) else {
            report.skip(format!("n={n}"), "no expected row");
            continue;
        };
        let table = tables(n)?;
        let found = scan_factors(&table, m_max, false)?;
        let problems = factor_row_problems(&found, expected);
        if problems.is_empty() {
            report.push(format!("n={n}"), true, found.product_string());
        } else {
            report.push(format!("n={n}"), false, problems.join("; "));
        }
        let unexplained = unexplained_factors(n);
        if !unexplained.is_empty() {
            let listed: Vec<String> = unexplained.iter().map(|m| format!("Φ_{m}")).collect();
            report.note(format!("n={n}: {} confirmed but not explained by any theorem", listed.join(", ")));
        }
    }
    Ok(report)
}
