//! Witnesses `(s, k)` for the binomial factor theorems.
//!
//! For `n` with one, two or three binary ones, an odd `s` dividing the
//! binomials `C(n, 2^x)` together with a base-2 non-essential `k` with
//! `s | C(n, k)` forces `Φ_{4s}` (one digit) or `Φ_{2s}` (two or three
//! digits) to divide `Q_n`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::beta::BetaTable;
use crate::combinat::{
    binomial_factorization, carry_count, digitwise_le, divisors, factorize, is_prime, multiplicative_order, pow_mod,
};
use crate::cyclotomic::divides;
use crate::error::{Error, Result};
use crate::report::VerifyReport;

/// Largest `n` the divisor searches accept.
pub const SEARCH_MAX_N: u64 = 4096;
const DIVISOR_CAP: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessTag {
    OneDigit,
    TwoDigit,
    ThreeDigit,
}

impl WitnessTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessTag::OneDigit => "one-digit",
            WitnessTag::TwoDigit => "two-digit",
            WitnessTag::ThreeDigit => "three-digit",
        }
    }

    fn for_ones(ones: u32) -> Option<Self> {
        match ones {
            1 => Some(WitnessTag::OneDigit),
            2 => Some(WitnessTag::TwoDigit),
            3 => Some(WitnessTag::ThreeDigit),
            _ => None,
        }
    }

    /// `Φ_{4s}` for one digit, `Φ_{2s}` otherwise.
    pub fn factor_index(&self, s: u64) -> u64 {
        match self {
            WitnessTag::OneDigit => 4 * s,
            _ => 2 * s,
        }
    }
}

impl fmt::Display for WitnessTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FactorWitness {
    pub n: u64,
    pub s: u64,
    pub k: u64,
    pub tag: WitnessTag,
    pub factor_index: u64,
}

impl FactorWitness {
    /// Re-checks every divisibility and essentiality condition with exact arithmetic.
    pub fn is_valid(&self) -> bool {
        self.factor_index == self.tag.factor_index(self.s) && is_valid_witness(self.n, self.s, self.k, self.tag)
    }
}

/// `s | C(n, k)` by Kummer: each `p^e ∥ s` needs at least `e` carries in `k + (n-k)`.
pub fn divides_binomial(s: u64, n: u64, k: u64) -> bool {
    if k > n || s == 0 {
        return false;
    }
    factorize(s).into_iter().all(|(p, e)| carry_count(k, n - k, p) >= e)
}

fn binary_powers(n: u64) -> Vec<u64> {
    (0..64).map(|i| 1u64 << i).filter(|&b| n & b != 0).collect()
}

fn check_tag(n: u64, tag: WitnessTag) -> Result<()> {
    if WitnessTag::for_ones(n.count_ones()) != Some(tag) {
        return Err(Error::invalid(format!("n = {n} has {} binary ones, not a {tag} case", n.count_ones())));
    }
    if tag == WitnessTag::OneDigit && n < 4 {
        return Err(Error::invalid(format!("one-digit case needs n = 2^a with a >= 2, got {n}")));
    }
    Ok(())
}

// Binomials every witness `s` has to divide.
fn anchor_ks(n: u64, tag: WitnessTag) -> Vec<u64> {
    match tag {
        WitnessTag::OneDigit => vec![n / 2],
        _ => binary_powers(n),
    }
}

fn k_allowed(n: u64, k: u64, tag: WitnessTag) -> bool {
    if k == 0 || k >= n {
        return false;
    }
    match tag {
        WitnessTag::OneDigit => k != n / 2,
        _ => !digitwise_le(k, n, 2),
    }
}

/// Conditions of the tagged theorem for `(n, s, k)`.
pub fn is_valid_witness(n: u64, s: u64, k: u64, tag: WitnessTag) -> bool {
    if s % 2 == 0 || check_tag(n, tag).is_err() {
        return false;
    }
    k_allowed(n, k, tag)
        && divides_binomial(s, n, k)
        && anchor_ks(n, tag).into_iter().all(|a| divides_binomial(s, n, a))
}

/// Every `k` that completes a witness for `(n, s)`, ascending.
pub fn valid_witness_ks(n: u64, s: u64, tag: WitnessTag) -> Result<Vec<u64>> {
    check_tag(n, tag)?;
    if s % 2 == 0 || !anchor_ks(n, tag).into_iter().all(|a| divides_binomial(s, n, a)) {
        return Ok(Vec::new());
    }
    Ok((1..n).filter(|&k| k_allowed(n, k, tag) && divides_binomial(s, n, k)).collect())
}

fn find_witnesses_tagged(n: u64, tag: WitnessTag) -> Result<Vec<FactorWitness>> {
    check_tag(n, tag)?;
    if n > SEARCH_MAX_N {
        return Err(Error::ResourceLimit { what: "witness search", n: n as u32, max: SEARCH_MAX_N as u32 });
    }
    // odd part of the gcd of the anchor binomials
    let mut common: Option<Vec<(u64, u32)>> = None;
    for a in anchor_ks(n, tag) {
        let f: Vec<(u64, u32)> = binomial_factorization(n, a).into_iter().filter(|&(p, _)| p != 2).collect();
        common = Some(match common {
            None => f,
            Some(c) => c
                .into_iter()
                .filter_map(|(p, e)| f.iter().find(|&&(q, _)| q == p).map(|&(_, g)| (p, e.min(g))))
                .collect(),
        });
    }
    let common = common.unwrap_or_default();
    let ks: Vec<u64> = (1..n).filter(|&k| k_allowed(n, k, tag)).collect();
    // carries[i][j]: exponent of the i-th prime in C(n, ks[j])
    let carries: Vec<Vec<u32>> =
        common.iter().map(|&(p, _)| ks.iter().map(|&k| carry_count(k, n - k, p)).collect()).collect();
    let count: u128 = common.iter().map(|&(_, e)| e as u128 + 1).product();
    let fits = common.iter().try_fold(1u64, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?)).is_some();
    if count > DIVISOR_CAP as u128 || !fits {
        return Err(Error::SearchTooLarge { n, candidates: count, cap: DIVISOR_CAP });
    }
    let candidates = divisors(&common, DIVISOR_CAP)?;
    Ok(candidates
        .into_par_iter()
        .filter_map(|s| {
            let s = s as u64;
            let needed: Vec<(usize, u32)> = common
                .iter()
                .enumerate()
                .map(|(i, &(p, _))| {
                    let mut e = 0;
                    let mut v = s;
                    while v % p == 0 {
                        v /= p;
                        e += 1;
                    }
                    (i, e)
                })
                .collect();
            let j = (0..ks.len()).find(|&j| needed.iter().all(|&(i, e)| carries[i][j] >= e))?;
            Some(FactorWitness { n, s, k: ks[j], tag, factor_index: tag.factor_index(s) })
        })
        .collect())
}

/// Witnesses for `n = 2^a`, each with its smallest `k`, ordered by `s`.
pub fn find_one_digit_witnesses(a: u32) -> Result<Vec<FactorWitness>> {
    if !(2..=12).contains(&a) {
        return Err(Error::invalid(format!("exponent must lie in 2..=12, got {a}")));
    }
    find_witnesses_tagged(1 << a, WitnessTag::OneDigit)
}

pub fn find_two_digit_witnesses(n: u64) -> Result<Vec<FactorWitness>> {
    find_witnesses_tagged(n, WitnessTag::TwoDigit)
}

pub fn find_three_digit_witnesses(n: u64) -> Result<Vec<FactorWitness>> {
    find_witnesses_tagged(n, WitnessTag::ThreeDigit)
}

/// Dispatch on the number of binary ones; empty beyond three.
pub fn find_witnesses(n: u64) -> Result<Vec<FactorWitness>> {
    match WitnessTag::for_ones(n.count_ones()) {
        Some(WitnessTag::OneDigit) if n < 4 => Ok(Vec::new()),
        Some(tag) => find_witnesses_tagged(n, tag),
        None => Ok(Vec::new()),
    }
}

/// Pairs `{a, b}` (with `a <= b`) of exponents mod `g = ord_p(2)` for which
/// `2^a` is non-essential for `2^a + 2^b` in base `p` by the last digit.
pub fn exponent_classes_two_digit(p: u64) -> Result<Vec<(u64, u64)>> {
    Ok(exponent_classes(p, 1, 2)?.into_iter().map(|c| (c[0], c[1])).collect())
}

/// Multisets of `count` exponents mod `G = ord_{p^l}(2)` for which every
/// power `2^x` is non-essential for their sum, judged on the last `l`
/// base-`p` digits. With `l = 1`, `count = 2` these are the two-digit classes.
pub fn exponent_classes(p: u64, l: u32, count: usize) -> Result<Vec<Vec<u64>>> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("expected an odd prime, got {p}")));
    }
    if l == 0 || count == 0 {
        return Err(Error::invalid("digit count and class size must be positive"));
    }
    let modulus = p.checked_pow(l).filter(|&q| q <= 1 << 32).ok_or_else(|| Error::invalid("p^l too large"))?;
    let g = multiplicative_order(2, modulus)?;
    let res: Vec<u64> = (0..g).map(|x| pow_mod(2, x, modulus)).collect();
    let mut out = Vec::new();
    let mut class = vec![0u64; count];
    loop {
        let sum = class.iter().map(|&x| res[x as usize]).sum::<u64>() % modulus;
        if class.iter().all(|&x| !digitwise_le(res[x as usize], sum, p)) {
            out.push(class.clone());
        }
        // next non-decreasing tuple
        let Some(i) = (0..count).rev().find(|&i| class[i] + 1 < g) else { break };
        let v = class[i] + 1;
        for c in &mut class[i..] {
            *c = v;
        }
    }
    Ok(out)
}

/// The named congruence rules, each for a specific odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `{a, b} ≡ {0, g/2}`, `k = 7` (`k = 5` for `n = 6`, `p = 3`).
    HalfOrderPair(u64),
    /// `a ≡ b ≡ g/2`, `k = 2p - 1`.
    BothHalfOrder(u64),
    /// `a ≡ b ≡ g - 1`, `k = 3`.
    OrderMinusOne(u64),
    /// `{a, b, c} ≡ {1, g/2, g/2}`, `k = 7`.
    OneHalfHalf(u64),
    /// `{a, b, c} ≡ {g-2, g-2, g-1}`, `k = 3`.
    MinusTwoMinusOne(u64),
    /// `p = 2^e + 2^d + 1` and `{a, b, c} ≡ {0, d, e}`, `k = 7` (`13` when `p = 7`).
    SparsePrime(u64),
}

impl Rule {
    pub fn prime(&self) -> u64 {
        match *self {
            Rule::HalfOrderPair(p)
            | Rule::BothHalfOrder(p)
            | Rule::OrderMinusOne(p)
            | Rule::OneHalfHalf(p)
            | Rule::MinusTwoMinusOne(p)
            | Rule::SparsePrime(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::HalfOrderPair(_) => "{0,g/2} rule",
            Rule::BothHalfOrder(_) => "{g/2,g/2} rule",
            Rule::OrderMinusOne(_) => "{g-1,g-1} rule",
            Rule::OneHalfHalf(_) => "{1,g/2,g/2} rule",
            Rule::MinusTwoMinusOne(_) => "{g-2,g-2,g-1} rule",
            Rule::SparsePrime(_) => "p = 2^e + 2^d + 1 rule",
        }
    }

    pub fn all(p: u64) -> [Rule; 6] {
        [
            Rule::HalfOrderPair(p),
            Rule::BothHalfOrder(p),
            Rule::OrderMinusOne(p),
            Rule::OneHalfHalf(p),
            Rule::MinusTwoMinusOne(p),
            Rule::SparsePrime(p),
        ]
    }
}

// Per-(n, p) replacements of the canonical k.
const K_OVERRIDES: &[(Rule, u64, u64)] = &[(Rule::HalfOrderPair(3), 6, 5)];

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v
}

// `p = 2^e + 2^d + 1` with `e > d >= 1`.
fn sparse_prime_exponents(p: u64) -> Option<(u64, u64)> {
    let r = p.checked_sub(1)?;
    if r.count_ones() != 2 || r & 1 != 0 {
        return None;
    }
    Some((63 - r.leading_zeros() as u64, r.trailing_zeros() as u64))
}

/// The rule's canonical `k` when its congruence hypotheses hold for `n`.
/// A `k` that then fails the exact base-2 / base-`p` checks is an error.
pub fn theorem_rule_witness(n: u64, rule: Rule) -> Result<Option<FactorWitness>> {
    let p = rule.prime();
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("rules need an odd prime, got {p}")));
    }
    let g = multiplicative_order(2, p)?;
    let exps: Vec<u64> = binary_powers(n).into_iter().map(|b| b.trailing_zeros() as u64 % g).collect();
    let exps = sorted(exps);
    let half = (g % 2 == 0).then_some(g / 2);
    let k = match rule {
        Rule::HalfOrderPair(_) => {
            let over = K_OVERRIDES.iter().find(|(r, m, _)| *r == rule && *m == n).map(|&(_, _, k)| k);
            let hyp = exps.len() == 2 && half.is_some_and(|h| exps == sorted(vec![0, h]));
            match (hyp, over) {
                (true, Some(k)) => Some(k),
                (true, None) if n >= 9 => Some(7),
                _ => None,
            }
        }
        Rule::BothHalfOrder(_) => {
            let hyp = exps.len() == 2 && half.is_some_and(|h| exps == [h, h]) && n > 2 * p - 1;
            hyp.then_some(2 * p - 1)
        }
        Rule::OrderMinusOne(_) => (exps.len() == 2 && p > 3 && n >= 5 && exps == [g - 1, g - 1]).then_some(3),
        Rule::OneHalfHalf(_) => {
            let hyp = exps.len() == 3 && n >= 11 && half.is_some_and(|h| exps == sorted(vec![1 % g, h, h]));
            hyp.then_some(7)
        }
        Rule::MinusTwoMinusOne(_) => {
            let hyp = exps.len() == 3 && p >= 5 && g >= 2 && exps == sorted(vec![g - 2, g - 2, g - 1]);
            hyp.then_some(3)
        }
        Rule::SparsePrime(_) => sparse_prime_exponents(p).and_then(|(e, d)| {
            let hyp = exps.len() == 3 && n > 7 && exps == sorted(vec![0, d % g, e % g]);
            hyp.then_some(if p == 7 { 13 } else { 7 })
        }),
    };
    let Some(k) = k else { return Ok(None) };
    let tag = WitnessTag::for_ones(n.count_ones()).expect("rules only match two or three ones");
    let powers_ok = binary_powers(n).into_iter().all(|b| !digitwise_le(b, n, p));
    if k >= n || digitwise_le(k, n, 2) || digitwise_le(k, n, p) || !powers_ok {
        return Err(Error::invalid(format!("rule {rule:?} matches n = {n} but k = {k} fails the exact checks")));
    }
    Ok(Some(FactorWitness { n, s: p, k, tag, factor_index: 2 * p }))
}

/// Confirms every witness prediction with index `<= m_max` against the root test.
pub fn cross_check_witnesses(table: &BetaTable, m_max: u64) -> Result<VerifyReport> {
    let n = table.n() as u64;
    let mut report = VerifyReport::new(format!("witness cross-check n={n}"));
    let witnesses = find_witnesses(n)?;
    if witnesses.is_empty() {
        report.skip(format!("n={n}"), "no witness predictions");
        return Ok(report);
    }
    let indices: BTreeSet<u64> = witnesses.iter().map(|w| w.factor_index).filter(|&m| m <= m_max).collect();
    let beyond = witnesses.iter().filter(|w| w.factor_index > m_max).count();
    for m in indices {
        let ok = divides(table, m)?;
        let w = witnesses.iter().find(|w| w.factor_index == m).expect("index from a witness");
        report.push(format!("Φ_{m} | Q_{n}"), ok, format!("{} witness s={}, k={}", w.tag, w.s, w.k));
    }
    if beyond > 0 {
        report.note(format!("{beyond} predictions above m_max = {m_max} not checked"));
    }
    Ok(report)
}
