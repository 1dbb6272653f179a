//! Integer combinatorics shared by every other module: descent sets and
//! compositions, binomial and multinomial coefficients, base-`p` digit
//! arithmetic (Lucas, Kummer), multiplicative orders, Euler zigzag numbers
//! and small-prime factorization.
//!
//! Bit convention: element `i` of `[n-1]` lives in bit `i - 1` of a mask.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest ambient size a [`DescentSet`] mask can represent.
pub const MAX_SET_N: u32 = 64;

/// A subset `S` of `[n-1]` stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescentSet {
    n: u32,
    mask: u64,
}

impl DescentSet {
    pub fn new(n: u32, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_SET_N {
            return Err(Error::invalid(format!("n must lie in 1..={MAX_SET_N}, got {n}")));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::invalid(format!("mask {mask:#x} has bits outside [1, {}]", n - 1)));
        }
        Ok(DescentSet { n, mask })
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn from_elements(n: u32, elements: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e >= n {
                return Err(Error::invalid(format!("element {e} is outside [1, {}]", n.saturating_sub(1))));
            }
            mask |= 1 << (e - 1);
        }
        Self::new(n, mask)
    }

    /// Parses `"1,3,9"` (whitespace tolerated, empty string is the empty set).
    pub fn parse(n: u32, spec: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for piece in spec.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let e: u32 = piece.parse().map_err(|_| Error::invalid(format!("'{piece}' is not a positive integer")))?;
            elements.push(e);
        }
        Self::from_elements(n, &elements)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element < self.n && self.mask >> (element - 1) & 1 == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        BitIter(self.mask).map(|b| b + 1)
    }

    pub fn composition(&self) -> Composition {
        Composition { parts: composition_parts(self.n, self.mask) }
    }

    /// `S -> {n - s : s in S}`.
    pub fn reverse(&self) -> Self {
        DescentSet { n: self.n, mask: reverse_mask(self.n, self.mask) }
    }

    pub fn complement(&self) -> Self {
        DescentSet { n: self.n, mask: full_mask(self.n) & !self.mask }
    }

    /// `S △ {k}`.
    pub fn toggle(&self, k: u32) -> Result<Self> {
        if k == 0 || k >= self.n {
            return Err(Error::invalid(format!("{k} is outside [1, {}]", self.n - 1)));
        }
        Ok(DescentSet { n: self.n, mask: self.mask ^ (1 << (k - 1)) })
    }

    pub fn is_subset_of(&self, other: &DescentSet) -> bool {
        self.mask & !other.mask == 0
    }
}

impl fmt::Display for DescentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// All bits of `[n-1]`.
pub fn full_mask(n: u32) -> u64 {
    if n <= 1 {
        0
    } else if n > 64 {
        u64::MAX
    } else {
        (1u64 << (n - 1)) - 1
    }
}

pub(crate) fn reverse_mask(n: u32, mask: u64) -> u64 {
    let mut out = 0;
    for b in BitIter(mask) {
        // element b+1 maps to n-(b+1), stored at bit n-b-2
        out |= 1 << (n - b - 2);
    }
    out
}

pub(crate) fn composition_parts(n: u32, mask: u64) -> Vec<u32> {
    let mut parts = Vec::with_capacity(mask.count_ones() as usize + 1);
    let mut prev = 0;
    for b in BitIter(mask) {
        parts.push(b + 1 - prev);
        prev = b + 1;
    }
    parts.push(n - prev);
    parts
}

/// Iterator over set bit positions, lowest first.
#[derive(Clone, Copy)]
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// An ordered sequence of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("composition parts must be positive"));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Partial sums `s_1 < s_2 < ... < s_k` (the last part is dropped).
    pub fn to_descent_set(&self) -> Result<DescentSet> {
        let n = self.total();
        let mut mask = 0u64;
        let mut acc = 0;
        for &p in &self.parts[..self.parts.len().saturating_sub(1)] {
            acc += p;
            mask |= 1 << (acc - 1);
        }
        DescentSet::new(n, mask)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Little-endian base-`b` digits of a non-negative integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePDigits {
    base: u64,
    digits: Vec<u64>,
}

impl BasePDigits {
    pub fn new(value: u64, base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid(format!("base must be at least 2, got {base}")));
        }
        let mut digits = Vec::new();
        let mut v = value;
        while v > 0 {
            digits.push(v % base);
            v /= base;
        }
        Ok(BasePDigits { base, digits })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Digit `i`, zero past the top.
    pub fn digit(&self, i: usize) -> u64 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * self.base + d)
    }
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` when it fits in 128 bits.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        let g = acc.gcd(&(i + 1));
        acc = (acc / g).checked_mul((n as u128 - i) / ((i + 1) / g))?;
    }
    Some(acc)
}

/// Pascal's triangle rows `0..=max_n` reduced by `reduce`; entries must fit in `u64`.
pub(crate) fn pascal_table(max_n: u32, reduce: impl Fn(u64) -> u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_n as usize + 1);
    let mut exact: Vec<u64> = vec![1];
    for r in 0..=max_n {
        if r > 0 {
            let mut next = vec![1u64; r as usize + 1];
            for k in 1..r as usize {
                next[k] = exact[k - 1].wrapping_add(exact[k]);
            }
            exact = next;
        }
        rows.push(exact.iter().map(|&v| reduce(v)).collect());
    }
    rows
}

/// `n! / (c_1! c_2! ... c_k!)`.
pub fn multinomial(c: &Composition) -> BigUint {
    let mut acc = BigUint::one();
    let mut partial = 0u64;
    for &p in c.parts() {
        partial += p as u64;
        acc *= binomial(partial, p as i64);
    }
    acc
}

/// Whether `k` is essential for `n` in base `p`: every base-`p` digit of `k`
/// is at most the matching digit of `n`.
pub fn is_essential(k: u64, n: u64, p: u64) -> Result<bool> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k = {k} is outside [1, {}]", n.saturating_sub(1))));
    }
    if p < 2 {
        return Err(Error::invalid(format!("base must be at least 2, got {p}")));
    }
    Ok(digitwise_le(k, n, p))
}

pub(crate) fn digitwise_le(mut k: u64, mut n: u64, p: u64) -> bool {
    while k > 0 {
        if k % p > n % p {
            return false;
        }
        k /= p;
        n /= p;
    }
    true
}

/// Number of carries when adding `k` and `l` in base `p`.
pub fn carry_count(mut k: u64, mut l: u64, p: u64) -> u32 {
    assert!(p >= 2, "base must be at least 2");
    let mut carry = 0;
    let mut count = 0;
    while k > 0 || l > 0 || carry > 0 {
        let s = k % p + l % p + carry;
        carry = u64::from(s >= p);
        count += carry as u32;
        k /= p;
        l /= p;
    }
    count
}

/// `C(n, k) mod p` through Lucas' theorem.
pub fn binomial_mod_p_lucas(n: u64, k: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k > n {
        return Ok(0);
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return Ok(0);
        }
        acc = acc * small_binomial_mod(ni, ki, p) % p;
        n /= p;
        k /= p;
    }
    Ok(acc)
}

// C(a, b) mod p for a < p, via a product and a modular inverse
fn small_binomial_mod(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let (mut num, mut den) = (1u128, 1u128);
    let p128 = p as u128;
    for i in 0..b as u128 {
        num = num * (a as u128 - i) % p128;
        den = den * (i + 1) % p128;
    }
    (num * pow_mod(den as u64, p - 2, p) as u128 % p128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Least `g >= 1` with `a^g = 1 (mod modulus)`.
pub fn multiplicative_order(a: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::invalid(format!("modulus must be at least 2, got {modulus}")));
    }
    if a.gcd(&modulus) != 1 {
        return Err(Error::NotCoprime { a, b: modulus });
    }
    let a = a % modulus;
    let mut x = a;
    let mut g = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % modulus as u128) as u64;
        g += 1;
    }
    Ok(g)
}

/// Deterministic trial division; fine for the magnitudes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `Some((p, r))` when `q = p^r` with `p` an odd prime and `r >= 1`.
pub fn odd_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 3 || q % 2 == 0 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut r = 0;
    let mut v = q;
    while v % p == 0 {
        v /= p;
        r += 1;
    }
    (v == 1).then_some((p, r))
}

pub(crate) fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// Prime factorization by trial division, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            let mut j = i * i;
            while j <= n as usize {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64).collect()
}

/// Factorization of `C(n, k)`: the exponent of each prime `p <= n` is the
/// number of carries in `k + (n - k)` in base `p`.
pub fn binomial_factorization(n: u64, k: u64) -> Vec<(u64, u32)> {
    if k > n {
        return Vec::new();
    }
    primes_up_to(n)
        .into_iter()
        .filter_map(|p| {
            let e = carry_count(k, n - k, p);
            (e > 0).then_some((p, e))
        })
        .collect()
}

/// All divisors of `prod p^e`, ascending. Fails when there would be more than `cap`.
pub fn divisors(factors: &[(u64, u32)], cap: usize) -> Result<Vec<u128>> {
    let count: u128 = factors.iter().map(|&(_, e)| e as u128 + 1).product();
    if count > cap as u128 {
        return Err(Error::invalid(format!("{count} divisors exceed the cap of {cap}")));
    }
    let mut out = vec![1u128];
    for &(p, e) in factors {
        let len = out.len();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p as u128;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Euler zigzag number `E_n` from the Seidel–Entringer triangle.
pub fn euler_zigzag(n: u32) -> BigUint {
    let mut row = vec![BigUint::one()];
    for r in 1..=n as usize {
        let mut next = Vec::with_capacity(r + 1);
        next.push(BigUint::zero());
        for k in 1..=r {
            let v = &next[k - 1] + &row[r - k];
            next.push(v);
        }
        row = next;
    }
    row.pop().unwrap_or_else(BigUint::one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(18, 2), BigUint::from(153u32));
        assert_eq!(binomial(20, 4), BigUint::from(4845u32));
        assert_eq!(binomial(7, 0), BigUint::one());
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(32, 16).to_string(), "601080390");
    }

    #[test]
    fn binomial_u128_matches_big() {
        for n in 0..=120u64 {
            for k in 0..=n {
                let small = binomial_u128(n, k).expect("fits");
                assert_eq!(BigUint::from(small), binomial(n, k as i64), "C({n},{k})");
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        let c = |v: Vec<u32>| Composition::new(v).unwrap();
        assert_eq!(multinomial(&c(vec![1, 1, 1])), BigUint::from(6u32));
        assert_eq!(multinomial(&c(vec![2, 2])), BigUint::from(24u32 / 4));
        assert_eq!(multinomial(&c(vec![9])), BigUint::one());
    }

    #[test]
    fn essential_examples() {
        assert!(is_essential(2, 6, 2).unwrap());
        assert!(!is_essential(7, 9, 3).unwrap());
        assert!(is_essential(0, 6, 2).is_err());
        assert!(is_essential(6, 6, 2).is_err());
        for n in 2..40 {
            for k in 1..n {
                for p in [2, 3, 5, 7] {
                    assert_eq!(is_essential(k, n, p).unwrap(), is_essential(n - k, n, p).unwrap());
                }
            }
        }
    }

    #[test]
    fn carries() {
        for a in 2..8 {
            let n = 1u64 << a;
            assert_eq!(carry_count(n / 2, n / 2, 2), 1);
        }
        assert_eq!(carry_count(2, 4, 2), 0);
        assert_eq!(carry_count(0, 0, 3), 0);
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(binomial_mod_p_lucas(11, 2, 3).unwrap(), 1);
        assert_eq!(binomial_mod_p_lucas(10, 5, 2).unwrap(), 0);
        assert_eq!(binomial_mod_p_lucas(17, 0, 5).unwrap(), 1);
        assert!(matches!(binomial_mod_p_lucas(10, 3, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(2, 11).unwrap(), 10);
        assert_eq!(multiplicative_order(2, 17).unwrap(), 8);
        assert!(multiplicative_order(2, 8).is_err());
        assert!(multiplicative_order(3, 1).is_err());
    }

    #[test]
    fn zigzag() {
        assert_eq!(euler_zigzag(6), BigUint::from(61u32));
        assert_eq!(euler_zigzag(10), BigUint::from(50521u32));
        assert_eq!(euler_zigzag(1), BigUint::one());
        assert_eq!(euler_zigzag(0), BigUint::one());
        let first: Vec<u64> = (0..=13).map(|n| euler_zigzag(n).try_into().unwrap()).collect();
        assert_eq!(first, [1, 1, 1, 2, 5, 16, 61, 272, 1385, 7936, 50521, 353792, 2702765, 22368256]);
    }

    #[test]
    fn descent_set_basics() {
        let s = DescentSet::from_elements(6, &[1, 4]).unwrap();
        assert_eq!(s.composition().parts(), &[1, 3, 2]);
        assert_eq!(s.reverse().elements().collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(s.complement().elements().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert_eq!(s.composition().to_descent_set().unwrap(), s);
        assert!(DescentSet::from_elements(4, &[4]).is_err());
        assert!(DescentSet::new(3, 0b100).is_err());
        assert_eq!(DescentSet::parse(11, " 1, 9").unwrap().to_string(), "{1,9}");
        assert!(DescentSet::parse(11, "1,x").is_err());
        assert!(DescentSet::parse(5, "").unwrap().is_empty());
        let big = DescentSet::new(64, u64::MAX >> 1).unwrap();
        assert_eq!(big.len(), 63);
        assert_eq!(big.reverse(), big);
    }

    #[test]
    fn digits() {
        let d = BasePDigits::new(11, 3).unwrap();
        assert_eq!(d.digits(), &[2, 0, 1]);
        assert_eq!(d.value(), 11);
        assert_eq!(d.digit(7), 0);
        assert!(BasePDigits::new(0, 5).unwrap().digits().is_empty());
        assert!(BasePDigits::new(3, 1).is_err());
    }

    #[test]
    fn factorization_of_binomials() {
        // 2 * 3^2 * 5 * 17 * 19 * 23 * 29 * 31
        assert_eq!(
            binomial_factorization(32, 16),
            vec![(2, 1), (3, 2), (5, 1), (17, 1), (19, 1), (23, 1), (29, 1), (31, 1)]
        );
        assert_eq!(factorize(4845), vec![(3, 1), (5, 1), (17, 1), (19, 1)]);
        let divs = divisors(&factorize(153), 100).unwrap();
        assert_eq!(divs, vec![1, 3, 9, 17, 51, 153]);
        assert!(divisors(&[(2, 40), (3, 40)], 100).is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(odd_prime_power(9), Some((3, 2)));
        assert_eq!(odd_prime_power(13), Some((13, 1)));
        assert_eq!(odd_prime_power(15), None);
        assert_eq!(odd_prime_power(8), None);
        assert_eq!(odd_prime_power(1), None);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
