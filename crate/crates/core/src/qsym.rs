//! Quasi-symmetric functions over `Z/p` in the monomial basis.
//!
//! The flag f-vector of the Boolean algebra `B_n` is encoded as
//! `F(B_n) = Σ_S f_S M_{co(S)}`, and modulo a prime `p` it factors as
//! `Π M_{(p^j)}^{d_j}` over the base-`p` digits `d_j` of `n`, which makes it
//! very sparse.

use std::collections::BTreeMap;
use std::fmt;

use crate::combinat::{is_prime, odd_prime_power, BasePDigits, Composition, DescentSet};
use crate::error::{Error, Result};

/// Default ceiling on stored terms in any product.
pub const DEFAULT_TERM_CAP: usize = 10_000_000;

/// A homogeneous element of QSym over `Z/p`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QsymModP {
    p: u64,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl QsymModP {
    pub fn zero(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(QsymModP { p, terms: BTreeMap::new() })
    }

    /// The unit `M_()`.
    pub fn one(p: u64) -> Result<Self> {
        Self::monomial(p, &[], 1)
    }

    /// `c · M_parts`.
    pub fn monomial(p: u64, parts: &[u32], c: u64) -> Result<Self> {
        let mut out = Self::zero(p)?;
        if parts.contains(&0) {
            return Err(Error::invalid("composition parts must be positive"));
        }
        if c % p != 0 {
            out.terms.insert(parts.to_vec(), c % p);
        }
        Ok(out)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `M_parts`, zero when absent.
    pub fn coefficient(&self, parts: &[u32]) -> u64 {
        self.terms.get(parts).copied().unwrap_or(0)
    }

    /// Terms in lexicographic order of the part sequences.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        let mut out = self.clone();
        for (k, &v) in &other.terms {
            out.add_term(k.clone(), v);
        }
        Ok(out)
    }

    fn add_term(&mut self, parts: Vec<u32>, c: u64) {
        let p = self.p;
        let entry = self.terms.entry(parts);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = (*e.get() + c) % p;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                if c % p != 0 {
                    e.insert(c % p);
                }
            }
        }
    }

    /// Product with the overlapping-shuffle rule, failing once more than
    /// `cap` terms would be stored.
    pub fn quasi_shuffle_product(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        let mut out = QsymModP { p: self.p, terms: BTreeMap::new() };
        let mut word = Vec::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let c = ca * cb % self.p;
                let mut failed = false;
                quasi_shuffles(a, b, &mut word, &mut |w| {
                    out.add_term(w.to_vec(), c);
                    if out.terms.len() > cap {
                        failed = true;
                    }
                    !failed
                });
                if failed {
                    return Err(Error::TermCap { cap });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, d: u32, cap: usize) -> Result<Self> {
        let mut acc = Self::one(self.p)?;
        for _ in 0..d {
            acc = acc.quasi_shuffle_product(self, cap)?;
        }
        Ok(acc)
    }
}

// Visits every overlapping shuffle of `a` and `b`; stops when `visit` returns false.
fn quasi_shuffles(a: &[u32], b: &[u32], word: &mut Vec<u32>, visit: &mut impl FnMut(&[u32]) -> bool) -> bool {
    if a.is_empty() || b.is_empty() {
        let len = word.len();
        word.extend_from_slice(a);
        word.extend_from_slice(b);
        let keep = visit(word);
        word.truncate(len);
        return keep;
    }
    for (x, ra, rb) in [(a[0], &a[1..], b), (b[0], a, &b[1..]), (a[0] + b[0], &a[1..], &b[1..])] {
        word.push(x);
        let keep = quasi_shuffles(ra, rb, word, visit);
        word.pop();
        if !keep {
            return false;
        }
    }
    true
}

impl fmt::Display for QsymModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (parts, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c != 1 {
                write!(f, "{c}·")?;
            }
            write!(f, "M(")?;
            for (j, x) in parts.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// `F(B_n) mod p` as `Π M_{(p^j)}^{d_j}`.
pub fn boolean_qsym_mod_p(n: u32, p: u64) -> Result<QsymModP> {
    boolean_qsym_mod_p_capped(n, p, DEFAULT_TERM_CAP)
}

pub fn boolean_qsym_mod_p_capped(n: u32, p: u64, cap: usize) -> Result<QsymModP> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let mut acc = QsymModP::one(p)?;
    let digits = BasePDigits::new(n as u64, p)?;
    let mut power = 1u32;
    for &d in digits.digits() {
        if d > 0 {
            let m = QsymModP::monomial(p, &[power], 1)?;
            acc = acc.quasi_shuffle_product(&m.pow(d as u32, cap)?, cap)?;
        }
        power = power.saturating_mul(p as u32);
    }
    Ok(acc)
}

/// Nonzero flag f-vector residues `f_S mod p`, keyed by mask.
pub fn flag_f_mod_p(n: u32, p: u64) -> Result<BTreeMap<u64, u64>> {
    let f = boolean_qsym_mod_p(n, p)?;
    let mut out = BTreeMap::new();
    for (parts, c) in f.terms() {
        let s = Composition::new(parts.to_vec())?.to_descent_set()?;
        out.insert(s.mask(), c);
    }
    Ok(out)
}

/// `β_n(S) mod p` from the sparse flag f-vector, for repeated queries.
#[derive(Clone, Debug)]
pub struct SparseBetaModP {
    n: u32,
    p: u64,
    support: Vec<(u64, u64)>,
}

impl SparseBetaModP {
    pub fn new(n: u32, p: u64) -> Result<Self> {
        let support = flag_f_mod_p(n, p)?.into_iter().collect();
        Ok(SparseBetaModP { n, p, support })
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// `Σ_{T ⊆ S, f_T ≠ 0} (-1)^{|S - T|} f_T mod p`.
    pub fn beta(&self, mask: u64) -> u64 {
        let size = mask.count_ones();
        let mut acc = 0u64;
        for &(t, f) in &self.support {
            if t & !mask == 0 {
                if (size - t.count_ones()) % 2 == 0 {
                    acc += f;
                } else {
                    acc += self.p - f;
                }
            }
        }
        acc % self.p
    }

    pub fn get(&self, s: &DescentSet) -> Result<u64> {
        if s.n() != self.n {
            return Err(Error::invalid("set does not match n"));
        }
        Ok(self.beta(s.mask()))
    }
}

pub fn beta_mod_p_via_qsym(p: u64, s: &DescentSet) -> Result<u64> {
    SparseBetaModP::new(s.n(), p)?.get(s)
}

fn signed_unit(negative: bool, p: u64) -> u64 {
    if negative {
        p - 1
    } else {
        1
    }
}

/// `β_{2q}(S) ≡ (-1)^{|S - {q}|} (mod p)` for `q = p^r`.
pub fn beta_2q_mod_p(q: u64, s: &DescentSet) -> Result<u64> {
    let (p, _) = odd_prime_power(q).ok_or(Error::NotOddPrimePower(q))?;
    if s.n() as u64 != 2 * q {
        return Err(Error::invalid(format!("set must lie in [{}]", 2 * q - 1)));
    }
    let size = s.len() - u32::from(s.contains(q as u32));
    Ok(signed_unit(size % 2 == 1, p))
}

/// `β_{q+1}(S) mod p` for `q = p^r`: `(-1)^{|S|}`, `0` or `-(-1)^{|S|}`
/// according to `|S ∩ {1, q}|`.
pub fn beta_q_plus_1_mod_p(q: u64, s: &DescentSet) -> Result<u64> {
    let (p, _) = odd_prime_power(q).ok_or(Error::NotOddPrimePower(q))?;
    if s.n() as u64 != q + 1 {
        return Err(Error::invalid(format!("set must lie in [{q}]")));
    }
    let ends = u32::from(s.contains(1)) + u32::from(s.contains(q as u32));
    let odd = s.len() % 2 == 1;
    Ok(match ends {
        0 => signed_unit(odd, p),
        1 => 0,
        _ => signed_unit(!odd, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::build_beta_table;
    use crate::combinat::multinomial;

    fn m(p: u64, parts: &[u32], c: u64) -> QsymModP {
        QsymModP::monomial(p, parts, c).unwrap()
    }

    #[test]
    fn square_of_m1() {
        let x = m(5, &[1], 1);
        let sq = x.quasi_shuffle_product(&x, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(sq, m(5, &[2], 1).add(&m(5, &[1, 1], 2)).unwrap());
        assert_eq!(sq.to_string(), "2·M(1,1) + M(2)");
        let zero = QsymModP::zero(5).unwrap();
        assert!(x.quasi_shuffle_product(&zero, 10).unwrap().is_empty());
        assert!(matches!(x.quasi_shuffle_product(&m(3, &[1], 1), 10), Err(Error::ModulusMismatch(5, 3))));
        assert!(QsymModP::zero(9).is_err());
    }

    #[test]
    fn n11_mod3() {
        let f = boolean_qsym_mod_p(11, 3).unwrap();
        let expect: &[(&[u32], u64)] = &[
            (&[11], 1),
            (&[9, 2], 1),
            (&[2, 9], 1),
            (&[9, 1, 1], 2),
            (&[10, 1], 2),
            (&[1, 9, 1], 2),
            (&[1, 10], 2),
            (&[1, 1, 9], 2),
        ];
        assert_eq!(f.len(), 8);
        for (parts, c) in expect {
            assert_eq!(f.coefficient(parts), *c, "{parts:?}");
        }
        let flags = flag_f_mod_p(11, 3).unwrap();
        let mask = |e: &[u32]| DescentSet::from_elements(11, e).unwrap().mask();
        assert_eq!(flags[&mask(&[])], 1);
        assert_eq!(flags[&mask(&[9])], 1);
        assert_eq!(flags[&mask(&[2])], 1);
        for e in [&[9, 10][..], &[10], &[1, 10], &[1], &[1, 2]] {
            assert_eq!(flags[&mask(e)], 2);
        }
    }

    #[test]
    fn prime_power_closed_forms() {
        for (q, p) in [(3u64, 3u64), (5, 5), (9, 3), (25, 5)] {
            let f = boolean_qsym_mod_p(2 * q as u32, p).unwrap();
            assert_eq!(f, m(p, &[2 * q as u32], 1).add(&m(p, &[q as u32, q as u32], 2)).unwrap());
            let g = boolean_qsym_mod_p(q as u32 + 1, p).unwrap();
            let expect =
                m(p, &[q as u32 + 1], 1).add(&m(p, &[q as u32, 1], 1)).unwrap().add(&m(p, &[1, q as u32], 1)).unwrap();
            assert_eq!(g, expect);
        }
    }

    #[test]
    fn flag_residues_match_multinomials() {
        for n in 1..=10u32 {
            for p in [3u64, 5, 7] {
                let flags = flag_f_mod_p(n, p).unwrap();
                for mask in 0..(1u64 << (n - 1)) {
                    let s = DescentSet::new(n, mask).unwrap();
                    let exact = multinomial(&s.composition()) % p;
                    let got = flags.get(&mask).copied().unwrap_or(0);
                    assert_eq!(num_bigint::BigUint::from(got), exact, "n={n} p={p} S={s}");
                }
            }
        }
    }

    #[test]
    fn sparse_beta_matches_table() {
        let t = build_beta_table(11).unwrap();
        let sparse = SparseBetaModP::new(11, 3).unwrap();
        for mask in 0..t.len() as u64 {
            assert_eq!(sparse.beta(mask), t.value(mask) % 3);
        }
        assert_eq!(beta_mod_p_via_qsym(3, &DescentSet::empty(11).unwrap()).unwrap(), 1);
    }

    #[test]
    fn closed_forms() {
        let s = |n: u32, e: &[u32]| DescentSet::from_elements(n, e).unwrap();
        assert_eq!(beta_2q_mod_p(9, &s(18, &[])).unwrap(), 1);
        assert_eq!(beta_2q_mod_p(9, &s(18, &[9])).unwrap(), 1);
        assert_eq!(beta_2q_mod_p(9, &s(18, &[1])).unwrap(), 2);
        assert_eq!(beta_q_plus_1_mod_p(9, &s(10, &[])).unwrap(), 1);
        assert_eq!(beta_q_plus_1_mod_p(9, &s(10, &[1])).unwrap(), 0);
        assert_eq!(beta_q_plus_1_mod_p(9, &s(10, &[1, 9])).unwrap(), 2);
        assert!(matches!(beta_2q_mod_p(15, &s(30, &[])), Err(Error::NotOddPrimePower(15))));
        assert!(beta_q_plus_1_mod_p(8, &s(9, &[])).is_err());
        assert!(beta_2q_mod_p(9, &s(10, &[])).is_err());
    }

    #[test]
    fn term_cap() {
        let err = boolean_qsym_mod_p_capped(2 * 3 * 3 + 2 * 3 + 2, 3, 50).unwrap_err();
        assert!(matches!(err, Error::TermCap { cap: 50 }));
        assert!(err.is_resource_limit());
    }
}
