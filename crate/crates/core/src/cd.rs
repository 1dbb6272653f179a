//! The ab-index `Ψ(B_n) = Σ_S β_n(S) u_S` of the Boolean algebra, its
//! rewriting in `c = a + b`, `d = ab + ba`, and linear functionals on it.
//!
//! Monomials are masks over the `d` letters: letter `i` (1-based) is `b`
//! exactly when bit `i - 1` is set, so `u_S` has mask `S`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::beta::{rho, BetaTable};
use crate::combinat::odd_prime_power;
use crate::cyclotomic::{divides, multiplicity_at_least_2, vanishes_at_primitive_root, CyclotomicInt};
use crate::error::{Error, Result};
use crate::report::VerifyReport;

pub const MAX_AB_DEGREE: u32 = 63;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbPolynomial {
    degree: u32,
    terms: BTreeMap<u64, BigInt>,
}

impl AbPolynomial {
    pub fn new(degree: u32) -> Result<Self> {
        if degree > MAX_AB_DEGREE {
            return Err(Error::invalid(format!("ab-degree must be at most {MAX_AB_DEGREE}, got {degree}")));
        }
        Ok(AbPolynomial { degree, terms: BTreeMap::new() })
    }

    /// Parses `"a"`, `"2ab - ba + 3bb"` and the like. All words must share one length.
    pub fn parse(text: &str) -> Result<Self> {
        let mut degree = None;
        let mut terms = Vec::new();
        for (sign, body) in signed_terms(text)? {
            let split = body.find(['a', 'b']).ok_or_else(|| Error::invalid(format!("no ab-word in term {body:?}")))?;
            let (num, word) = body.split_at(split);
            let num = num.trim_end_matches('*').trim_end_matches('·').trim();
            let coeff: BigInt = if num.is_empty() {
                BigInt::one()
            } else {
                num.parse().map_err(|_| Error::invalid(format!("bad coefficient {num:?}")))?
            };
            if !word.chars().all(|ch| ch == 'a' || ch == 'b') {
                return Err(Error::invalid(format!("bad ab-word {word:?}")));
            }
            let len = word.len() as u32;
            if *degree.get_or_insert(len) != len {
                return Err(Error::invalid("ab-words of different lengths"));
            }
            let mask = word.bytes().enumerate().filter(|&(_, ch)| ch == b'b').fold(0u64, |m, (i, _)| m | 1 << i);
            terms.push((mask, sign * coeff));
        }
        let mut p = AbPolynomial::new(degree.unwrap_or(0))?;
        for (mask, c) in terms {
            p.add_term(mask, &c);
        }
        Ok(p)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Nonzero terms in mask order.
    pub fn terms(&self) -> &BTreeMap<u64, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, mask: u64) -> BigInt {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: u64, c: &BigInt) {
        assert!(self.degree == 64 || mask >> self.degree == 0, "mask outside the degree");
        let slot = self.terms.entry(mask).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }
}

fn ab_word(degree: u32, mask: u64) -> String {
    (0..degree).map(|i| if mask >> i & 1 == 1 { 'b' } else { 'a' }).collect()
}

impl fmt::Display for AbPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut words: Vec<(String, &BigInt)> = self.terms.iter().map(|(&m, c)| (ab_word(self.degree, m), c)).collect();
        words.sort();
        write_terms(f, words.iter().map(|(w, c)| (w.as_str(), *c)))
    }
}

fn write_terms<'a>(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (&'a str, &'a BigInt)>) -> fmt::Result {
    let mut first = true;
    for (word, c) in terms {
        let word = if word.is_empty() { "1" } else { word };
        let sign = if c.is_negative() { "-" } else { "+" };
        match (first, sign) {
            (true, "-") => f.write_str("-")?,
            (true, _) => {}
            (false, s) => write!(f, " {s} ")?,
        }
        let mag = c.abs();
        if mag.is_one() {
            f.write_str(word)?;
        } else if word == "1" {
            write!(f, "{mag}")?;
        } else {
            write!(f, "{mag}{word}")?;
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

// Splits "2ab - ba + bb" into signed terms.
fn signed_terms(text: &str) -> Result<Vec<(BigInt, String)>> {
    let mut out = Vec::new();
    let mut sign = BigInt::one();
    let mut cur = String::new();
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        if ch == '+' || ch == '-' {
            if !cur.is_empty() {
                out.push((sign.clone(), std::mem::take(&mut cur)));
            }
            sign = if ch == '-' { -BigInt::one() } else { BigInt::one() };
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((sign, cur));
    }
    if out.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CdLetter {
    C,
    D,
}

impl CdLetter {
    pub fn weight(self) -> u32 {
        match self {
            CdLetter::C => 1,
            CdLetter::D => 2,
        }
    }
}

/// A word in `c` and `d`. Words order by weight, then number of `d`s, then
/// lexicographically with `c < d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CdWord(Vec<CdLetter>);

impl CdWord {
    pub fn new(letters: Vec<CdLetter>) -> Self {
        CdWord(letters)
    }

    pub fn letters(&self) -> &[CdLetter] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|l| l.weight()).sum()
    }

    pub fn d_count(&self) -> u32 {
        self.0.iter().filter(|&&l| l == CdLetter::D).count() as u32
    }

    /// The monomial with `c -> a`, `d -> ab`.
    pub fn signature_mask(&self) -> u64 {
        let mut pos = 0;
        let mut mask = 0u64;
        for l in &self.0 {
            if *l == CdLetter::D {
                mask |= 1 << (pos + 1);
            }
            pos += l.weight();
        }
        mask
    }

    /// Every monomial of the expansion; each appears once.
    pub fn expansion_masks(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        let mut pos = 0u32;
        for l in &self.0 {
            let (x, y) = match l {
                CdLetter::C => (0, 1u64 << pos),
                CdLetter::D => (1u64 << (pos + 1), 1u64 << pos),
            };
            out = out.into_iter().flat_map(|m| [m | x, m | y]).collect();
            pos += l.weight();
        }
        out
    }
}

impl Ord for CdWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.weight(), self.d_count(), &self.0).cmp(&(other.weight(), other.d_count(), &other.0))
    }
}

impl PartialOrd for CdWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CdWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let run = self.0[i..].iter().take_while(|&&x| x == l).count();
            f.write_str(if l == CdLetter::C { "c" } else { "d" })?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for CdWord {
    type Err = Error;

    /// Accepts `"cdc"` and run-length forms like `"c^2d"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut chars = s.trim().chars().peekable();
        if s.trim() == "1" {
            return Ok(CdWord(letters));
        }
        while let Some(ch) = chars.next() {
            let l = match ch {
                'c' => CdLetter::C,
                'd' => CdLetter::D,
                _ => return Err(Error::invalid(format!("bad cd-word {s:?}"))),
            };
            let mut run = 1usize;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                run = digits.parse().map_err(|_| Error::invalid(format!("bad exponent in {s:?}")))?;
            }
            letters.extend(std::iter::repeat_n(l, run));
        }
        Ok(CdWord(letters))
    }
}

/// All cd-words of a given weight in conversion order.
pub fn cd_words(weight: u32) -> Vec<CdWord> {
    fn rec(left: u32, cur: &mut Vec<CdLetter>, out: &mut Vec<CdWord>) {
        if left == 0 {
            out.push(CdWord(cur.clone()));
            return;
        }
        for l in [CdLetter::C, CdLetter::D] {
            if l.weight() <= left {
                cur.push(l);
                rec(left - l.weight(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(weight, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdPolynomial {
    degree: u32,
    terms: BTreeMap<CdWord, BigInt>,
}

impl CdPolynomial {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<CdWord, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, w: &CdWord) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Substitutes `c = a + b`, `d = ab + ba`.
    pub fn expand(&self) -> AbPolynomial {
        let mut out = AbPolynomial::new(self.degree).expect("degree checked on construction");
        for (w, c) in &self.terms {
            for mask in w.expansion_masks() {
                out.add_term(mask, c);
            }
        }
        out
    }
}

impl fmt::Display for CdPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<(String, &BigInt)> = self.terms.iter().map(|(w, c)| (w.to_string(), c)).collect();
        write_terms(f, words.iter().map(|(w, c)| (w.as_str(), *c)))
    }
}

/// `Ψ(B_n)`: coefficient `β_n(S)` on `u_S`, degree `n - 1`.
pub fn ab_index(table: &BetaTable) -> AbPolynomial {
    let mut p = AbPolynomial::new(table.n() - 1).expect("exact tables have n <= 24");
    for (mask, &v) in table.values().iter().enumerate() {
        p.add_term(mask as u64, &BigInt::from(v));
    }
    p
}

pub fn expand_cd_to_ab(w: &CdWord) -> AbPolynomial {
    let mut p = AbPolynomial::new(w.weight()).expect("cd-word weight within range");
    let one = BigInt::one();
    for mask in w.expansion_masks() {
        p.add_term(mask, &one);
    }
    p
}

/// Rewrites `p` in `c` and `d` by greedy elimination over [`cd_words`]; the
/// coefficient of each word is read at its signature monomial.
pub fn ab_to_cd(p: &AbPolynomial) -> Result<CdPolynomial> {
    let mut residual: HashMap<u64, BigInt> = p.terms.iter().map(|(&m, c)| (m, c.clone())).collect();
    let mut signatures = HashSet::new();
    let mut terms = BTreeMap::new();
    for w in cd_words(p.degree) {
        let sig = w.signature_mask();
        assert!(signatures.insert(sig), "two cd-words share the signature {sig:#b}");
        let Some(c) = residual.get(&sig).cloned() else { continue };
        for mask in w.expansion_masks() {
            let slot = residual.entry(mask).or_default();
            *slot -= &c;
            if slot.is_zero() {
                residual.remove(&mask);
            }
        }
        terms.insert(w, c);
    }
    if let Some((&mask, c)) = residual.iter().min_by_key(|(&m, _)| m) {
        return Err(Error::NotCdPolynomial(format!(
            "{} monomials left after elimination, e.g. {c}·{}",
            residual.len(),
            ab_word(p.degree, mask)
        )));
    }
    Ok(CdPolynomial { degree: p.degree, terms })
}

// Residue histograms of partially expanded words. `Root` holds the residue
// of each monomial; `Hist(h)` holds `m` counts per remaining monomial. Letters
// are consumed from the first position, which is the lowest mask bit.
enum Level<'a> {
    Root(&'a [u32]),
    Hist(Vec<u32>),
}

impl Level<'_> {
    fn entries(&self, m: usize) -> usize {
        match self {
            Level::Root(r) => r.len(),
            Level::Hist(h) => h.len() / m,
        }
    }

    fn fold(&self, m: usize, letter: CdLetter) -> Level<'static> {
        let out_entries = self.entries(m) >> letter.weight();
        let mut out = vec![0u32; out_entries * m];
        out.par_chunks_mut(m).with_min_len(256).enumerate().for_each(|(x, slot)| {
            let srcs = match letter {
                CdLetter::C => [2 * x, 2 * x + 1],
                CdLetter::D => [4 * x + 2, 4 * x + 1],
            };
            for s in srcs {
                match self {
                    Level::Root(r) => slot[r[s] as usize] += 1,
                    Level::Hist(h) => {
                        for (a, b) in slot.iter_mut().zip(&h[s * m..(s + 1) * m]) {
                            *a += b;
                        }
                    }
                }
            }
        });
        Level::Hist(out)
    }

    fn into_counts(self, m: usize) -> Vec<i128> {
        match self {
            Level::Root(r) => {
                let mut c = vec![0i128; m];
                c[r[0] as usize] += 1;
                c
            }
            Level::Hist(h) => h.into_iter().map(i128::from).collect(),
        }
    }
}

fn residues(table: &BetaTable, m: u64) -> Result<Vec<u32>> {
    if m < 2 || m > u32::MAX as u64 {
        return Err(Error::invalid(format!("root order must lie in 2..2^32, got {m}")));
    }
    Ok(table.residue_table(m)?.values().to_vec())
}

fn check_weight(table: &BetaTable, w: &CdWord) -> Result<()> {
    if w.weight() != table.n() - 1 {
        return Err(Error::invalid(format!("cd-word {w} has weight {}, table needs {}", w.weight(), table.n() - 1)));
    }
    Ok(())
}

// Counts of `β(u) mod m` over the monomials `u` of `w`.
fn word_counts(res: &[u32], m: usize, w: &CdWord) -> Vec<i128> {
    let mut level = Level::Root(res);
    for &l in w.letters() {
        level = level.fold(m, l);
    }
    level.into_counts(m)
}

/// `Σ_u ω^{β(u)}` over the expansion of `w`, `ω` a primitive `m`-th root.
pub fn functional_root_word(table: &BetaTable, w: &CdWord, m: u64) -> Result<CyclotomicInt> {
    check_weight(table, w)?;
    let res = residues(table, m)?;
    Ok(CyclotomicInt::from_coefficients(m, &word_counts(&res, m as usize, w)))
}

/// `Σ_u coeff(u) ω^{β(u)}` for an ab-polynomial of matching degree.
pub fn functional_root(table: &BetaTable, p: &AbPolynomial, m: u64) -> Result<CyclotomicInt> {
    if p.degree() != table.n() - 1 {
        return Err(Error::invalid(format!("degree {} does not match table n = {}", p.degree(), table.n())));
    }
    let res = residues(table, m)?;
    let mut c = vec![0i128; m as usize];
    for (&mask, coeff) in p.terms() {
        let coeff = coeff.to_i128().ok_or_else(|| Error::invalid("coefficient does not fit in 128 bits"))?;
        let slot = &mut c[res[mask as usize] as usize];
        *slot = slot.checked_add(coeff).ok_or_else(|| Error::invalid("coefficient overflow"))?;
    }
    Ok(CyclotomicInt::from_coefficients(m, &c))
}

/// Residue counts for every cd-word of weight `n - 1`, in [`cd_words`] order.
pub fn root_counts_all_words(table: &BetaTable, m: u64) -> Result<Vec<(CdWord, Vec<i128>)>> {
    let res = residues(table, m)?;
    let m = m as usize;
    // Branch in parallel only once the partial tables are small.
    const JOIN_BELOW: usize = 1 << 22;
    fn rec(level: Level<'_>, bits: u32, m: usize, prefix: &mut Vec<CdLetter>, out: &mut Vec<(CdWord, Vec<i128>)>) {
        if bits == 0 {
            out.push((CdWord(prefix.clone()), level.into_counts(m)));
            return;
        }
        let size = level.entries(m) * m;
        if bits >= 2 && size <= JOIN_BELOW {
            let mut pc = prefix.clone();
            pc.push(CdLetter::C);
            let mut pd = prefix.clone();
            pd.push(CdLetter::D);
            let (mut a, mut b) = (Vec::new(), Vec::new());
            rayon::join(
                || rec(level.fold(m, CdLetter::C), bits - 1, m, &mut pc, &mut a),
                || rec(level.fold(m, CdLetter::D), bits - 2, m, &mut pd, &mut b),
            );
            out.append(&mut a);
            out.append(&mut b);
            return;
        }
        for l in [CdLetter::C, CdLetter::D] {
            if l.weight() <= bits {
                let next = level.fold(m, l);
                prefix.push(l);
                rec(next, bits - l.weight(), m, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(Level::Root(&res), table.n() - 1, m, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// `𝓛(w) = Σ_u (-1)^{β(u)}` over the expansion of `w`.
pub fn functional_l(table: &BetaTable, w: &CdWord) -> Result<BigInt> {
    if w.weight() % 2 == 0 {
        return Err(Error::invalid(format!("cd-word {w} has even weight; 𝓛 needs weight 2n - 1")));
    }
    check_weight(table, w)?;
    let res = residues(table, 2)?;
    let c = word_counts(&res, 2, w);
    Ok(BigInt::from(c[0] - c[1]))
}

/// Closed form `2^{2n-j-1} (1 - 2ρ(n))` for `𝓛` on a word with `j` letters `d`.
pub fn prop71_value(n: u32, j: u32) -> Result<BigInt> {
    if n == 0 || 2 * j > 2 * n - 1 {
        return Err(Error::invalid(format!("no cd-word of weight {} has {j} letters d", 2 * n - 1)));
    }
    // ρ(n) = odd / 2^{n-1}, reduced to numer / 2^e
    let r = rho(n)?;
    let odd = BigInt::from(*r.numer()) << (n - 1 - r.denom().trailing_zeros()) as usize;
    Ok((BigInt::one() << (2 * n - j - 1) as usize) - (odd << (n - j + 1) as usize))
}

fn half() -> Ratio<u64> {
    Ratio::new(1, 2)
}

/// `Φ_2^2 | Q_{2n}` whenever `Φ_2 | Q_{2n}`; with `ρ(n) = 1/2` also `𝓛 = 0`
/// on every cd-word of weight `2n - 1`.
pub fn verify_theorem_7_2(table: &BetaTable) -> Result<VerifyReport> {
    let n2 = table.n();
    if n2 % 2 != 0 {
        return Err(Error::invalid(format!("needs an even n, got {n2}")));
    }
    let n = n2 / 2;
    let mut report = VerifyReport::new(format!("thm72 n={n2}"));
    if !divides(table, 2)? {
        report.skip(format!("Φ_2^2 | Q_{n2}"), format!("vacuous: Q_{n2}(-1) != 0"));
    } else {
        report.push(format!("Φ_2^2 | Q_{n2}"), multiplicity_at_least_2(table, 2)?, "weighted sums at -1");
    }
    let r = rho(n)?;
    if r == half() {
        let all = root_counts_all_words(table, 2)?;
        let bad = all.iter().find(|(_, c)| c[0] != c[1]);
        let detail = match bad {
            None => format!("all {} cd-words of weight {}", all.len(), n2 - 1),
            Some((w, c)) => format!("𝓛({w}) = {}", c[0] - c[1]),
        };
        report.push(format!("𝓛 vanishes, weight {}", n2 - 1), bad.is_none(), detail);
    } else {
        report.skip(format!("𝓛 vanishes, weight {}", n2 - 1), format!("ρ({n}) = {r}, not 1/2"));
    }
    Ok(report)
}

/// `𝓛(w)` against the closed form for every cd-word of weight `2n - 1`.
pub fn verify_prop71(table: &BetaTable) -> Result<VerifyReport> {
    let n2 = table.n();
    if n2 % 2 != 0 {
        return Err(Error::invalid(format!("needs an even n, got {n2}")));
    }
    let n = n2 / 2;
    let mut report = VerifyReport::new(format!("prop71 n={n}"));
    let all = root_counts_all_words(table, 2)?;
    let mut bad = None;
    for (w, c) in &all {
        let expected = prop71_value(n, w.d_count())?;
        if BigInt::from(c[0] - c[1]) != expected {
            bad = Some(format!("𝓛({w}) = {}, expected {expected}", c[0] - c[1]));
            break;
        }
    }
    let ok = bad.is_none();
    report.push(
        format!("𝓛 closed form, n={n}"),
        ok,
        bad.unwrap_or_else(|| format!("all {} cd-words of weight {}", all.len(), n2 - 1)),
    );
    Ok(report)
}

// Shared layer: `Σ ω^β` vanishes on every cd-word, and is real.
fn push_word_layer(report: &mut VerifyReport, table: &BetaTable, m: u64) -> Result<()> {
    let all = root_counts_all_words(table, m)?;
    let weight = table.n() - 1;
    let bad = all.par_iter().find_first(|(_, c)| !vanishes_at_primitive_root(c, m));
    report.push(
        format!("𝓒 + i𝓢 vanishes at ω_{m}, weight {weight}"),
        bad.is_none(),
        match bad {
            None => format!("all {} cd-words", all.len()),
            Some((w, c)) => format!("nonzero on {w}: {}", CyclotomicInt::from_coefficients(m, c)),
        },
    );
    let not_real = all.par_iter().find_first(|(_, c)| !CyclotomicInt::from_coefficients(m, c).is_real());
    report.push(
        format!("𝓢 vanishes at ω_{m}, weight {weight}"),
        not_real.is_none(),
        match not_real {
            None => "conjugation-invariant on every word".to_string(),
            Some((w, _)) => format!("not real on {w}"),
        },
    );
    Ok(())
}

fn prime_of(q: u64) -> Result<u64> {
    odd_prime_power(q).map(|(p, _)| p).ok_or(Error::NotOddPrimePower(q))
}

/// `Φ_{2p}^2 | Q_{2q}` for `q = p^r` with `ρ(q) = 1/2`. `table` is for `n = 2q`.
pub fn verify_theorem_8_2(q: u64, table: &BetaTable) -> Result<VerifyReport> {
    let p = prime_of(q)?;
    if table.n() as u64 != 2 * q {
        return Err(Error::invalid(format!("needs the table for n = {}, got n = {}", 2 * q, table.n())));
    }
    let m = 2 * p;
    let n = table.n();
    let mut report = VerifyReport::new(format!("thm82 q={q}"));
    let r = rho(q as u32)?;
    if r != half() {
        report.skip(format!("Φ_{m}^2 | Q_{n}"), format!("hypothesis fails: ρ({q}) = {r}"));
        return Ok(report);
    }
    report.push(format!("Φ_{m} | Q_{n}"), divides(table, m)?, "root test");
    report.push(format!("Φ_{m}^2 | Q_{n}"), multiplicity_at_least_2(table, m)?, "weighted sums");
    let whole = functional_root(table, &ab_index(table), m)?;
    report.push(format!("𝓒 + i𝓢 of Ψ(B_{n}) vanishes"), whole.is_zero(), whole.to_string());
    push_word_layer(&mut report, table, m)?;
    Ok(report)
}

/// `Φ_{2p} | Q_{q+1}`, doubled when `q ≡ 3 (mod 4)`. The hypothesis is read
/// as `ρ(q + 1) = 1/2`; `table` is for `n = q + 1`.
pub fn verify_theorem_9_1(q: u64, table: &BetaTable) -> Result<VerifyReport> {
    let p = prime_of(q)?;
    if table.n() as u64 != q + 1 {
        return Err(Error::invalid(format!("needs the table for n = {}, got n = {}", q + 1, table.n())));
    }
    let m = 2 * p;
    let n = table.n();
    let mut report = VerifyReport::new(format!("thm91 q={q}"));
    let r_next = rho(n)?;
    let r_q = rho(q as u32)?;
    let divisible = divides(table, m)?;
    report.note(format!(
        "hypothesis read as ρ(q+1) = 1/2: ρ({n}) = {r_next}; the literal ρ(q) = 1/2 gives ρ({q}) = {r_q}"
    ));
    if r_next != half() {
        if r_q == half() && !divisible {
            report.note(format!("the literal reading would predict Φ_{m} | Q_{n}, which is false"));
        }
        report.skip(format!("Φ_{m} | Q_{n}"), format!("hypothesis fails: ρ({n}) = {r_next}"));
        return Ok(report);
    }
    report.push(format!("Φ_{m} | Q_{n}"), divisible, "root test");
    let double = multiplicity_at_least_2(table, m)?;
    if q % 4 == 3 {
        report.push(format!("Φ_{m}^2 | Q_{n}"), double, "weighted sums");
        push_word_layer(&mut report, table, m)?;
    } else {
        report.note(format!("q ≡ 1 mod 4: observed multiplicity {}", if double { "2+" } else { "1" }));
    }
    Ok(report)
}
