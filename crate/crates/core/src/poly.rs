//! Dense integer polynomials and cyclotomic polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::combinat::factorize;

/// A polynomial with `i128` coefficients, little-endian. Arithmetic is
/// checked: overflow is a bug at the magnitudes this crate handles, so it
/// panics instead of wrapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![1] }
    }

    /// `c * t^k`.
    pub fn monomial(c: i128, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> i128 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = checked_add(out[i + j], checked_mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let out = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                a.checked_sub(b).expect("polynomial coefficient overflow")
            })
            .collect();
        Self::new(out)
    }

    /// Quotient and remainder on division by a monic polynomial.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        assert_eq!(divisor.leading(), 1, "divisor must be monic");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![0i128; rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            quot[i - d] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i - d + j] =
                    rem[i - d + j].checked_sub(checked_mul(c, b)).expect("polynomial coefficient overflow");
            }
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Value at `x` modulo the prime-or-not modulus `modulus`.
    pub fn eval_mod(&self, x: u64, modulus: u64) -> u64 {
        let m = modulus as i128;
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x as i128 % m + c.rem_euclid(m)) % m;
        }
        acc as u64
    }
}

fn checked_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("polynomial coefficient overflow")
}

fn checked_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("polynomial coefficient overflow")
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{k}")?,
                _ => write!(f, "{a}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<IntPolynomial>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IntPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Φ_m(t)`, memoized process-wide.
pub fn cyclotomic_polynomial(m: u64) -> Arc<IntPolynomial> {
    assert!(m >= 1, "cyclotomic index must be positive");
    if let Some(p) = cache().read().expect("cyclotomic cache poisoned").get(&m) {
        return Arc::clone(p);
    }
    let poly = Arc::new(build_cyclotomic(m));
    let mut guard = cache().write().expect("cyclotomic cache poisoned");
    Arc::clone(guard.entry(m).or_insert(poly))
}

// Φ_m = Π_{d | m} (t^d - 1)^{μ(m/d)}: multiply in the positive factors,
// then divide out the negative ones exactly.
fn build_cyclotomic(m: u64) -> IntPolynomial {
    let divs = small_divisors(m);
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for &d in &divs {
        match mobius(m / d) {
            1 => up.push(d as usize),
            -1 => down.push(d as usize),
            _ => {}
        }
    }
    let top: usize = up.iter().sum();
    let mut c = vec![0i128; top + 1];
    c[0] = 1;
    let mut deg = 0usize;
    for d in up {
        // times (t^d - 1)
        for i in (0..=deg + d).rev() {
            let shifted = if i >= d { c[i - d] } else { 0 };
            c[i] = shifted - c[i];
        }
        deg += d;
    }
    for d in down {
        // divided by (t^d - 1): q_i = q_{i-d} - p_i
        let new_deg = deg - d;
        let mut q = vec![0i128; new_deg + 1];
        for i in 0..=new_deg {
            let prev = if i >= d { q[i - d] } else { 0 };
            q[i] = prev - c[i];
        }
        c[..=new_deg].copy_from_slice(&q);
        for v in &mut c[new_deg + 1..] {
            *v = 0;
        }
        deg = new_deg;
    }
    c.truncate(deg + 1);
    IntPolynomial::new(c)
}

pub(crate) fn small_divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d != m / d {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i128]) -> IntPolynomial {
        IntPolynomial::new(c.to_vec())
    }

    // Independent route: t^m - 1 divided by every Φ_d, d a proper divisor.
    fn cyclotomic_by_division(m: u64, known: &mut HashMap<u64, IntPolynomial>) -> IntPolynomial {
        let mut acc = IntPolynomial::monomial(1, m as usize).sub(&IntPolynomial::one());
        for d in small_divisors(m) {
            if d == m {
                continue;
            }
            let phi = match known.get(&d) {
                Some(f) => f.clone(),
                None => {
                    let f = cyclotomic_by_division(d, known);
                    known.insert(d, f.clone());
                    f
                }
            };
            let (q, r) = acc.div_rem_monic(&phi);
            assert!(r.is_zero());
            acc = q;
        }
        acc
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(*cyclotomic_polynomial(1), p(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), p(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(6), p(&[1, -1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6).to_string(), "t^2 - t + 1");
        // first coefficient of absolute value 2 occurs in Φ_105
        assert!(cyclotomic_polynomial(105).coeffs().contains(&-2));
    }

    #[test]
    fn matches_division_route() {
        let mut known = HashMap::new();
        for m in 1..=400u64 {
            let direct = cyclotomic_polynomial(m);
            let divided = cyclotomic_by_division(m, &mut known);
            assert_eq!(*direct, divided, "m = {m}");
            assert_eq!(direct.degree(), Some(totient(m) as usize));
        }
    }

    #[test]
    fn divisor_product_is_t_m_minus_1() {
        for m in 1..=300u64 {
            let mut acc = IntPolynomial::one();
            for d in small_divisors(m) {
                acc = acc.mul(&cyclotomic_polynomial(d));
            }
            assert_eq!(acc, IntPolynomial::monomial(1, m as usize).sub(&IntPolynomial::one()));
        }
    }

    #[test]
    fn division() {
        let a = p(&[1, 0, 0, 0, 1]); // t^4 + 1
        let (q, r) = a.div_rem_monic(&p(&[1, 0, 1]));
        assert_eq!(q, p(&[-1, 0, 1]));
        assert_eq!(r, p(&[2]));
        let (q, r) = p(&[3]).div_rem_monic(&p(&[1, 1]));
        assert!(q.is_zero());
        assert_eq!(r, p(&[3]));
    }

    #[test]
    fn arithmetic_helpers() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(9690), 2304);
        assert_eq!(p(&[1, 2, 3]).eval_mod(10, 1000), 321);
        assert_eq!(p(&[-1, 1]).eval_mod(0, 7), 6);
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!(p(&[-3, 0, -2, 1]).to_string(), "t^3 - 2t^2 - 3");
    }
}
