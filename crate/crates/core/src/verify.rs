//! Verifiers for the modular closed forms and the `n = 11` special case.

use crate::beta::{residue_histogram, BetaTable};
use crate::combinat::{digitwise_le, odd_prime_power, DescentSet};
use crate::cyclotomic::{divides, lemma41_conditions_hold, q_at_root};
use crate::error::{Error, Result};
use crate::qsym::{beta_2q_mod_p, beta_q_plus_1_mod_p, SparseBetaModP};
use crate::report::VerifyReport;

fn mask_of(elements: &[u32]) -> u64 {
    elements.iter().fold(0, |m, &e| m | 1 << (e - 1))
}

fn check_n(table: &BetaTable, n: u64) -> Result<()> {
    if table.n() as u64 != n {
        return Err(Error::invalid(format!("needs the table for n = {n}, got n = {}", table.n())));
    }
    Ok(())
}

/// The four families `β_11(R ∪ E) mod 3` for `R ⊆ [3, 8]`, read from both the
/// exact table and the sparse flag f-vector.
pub fn verify_lemma65(table: &BetaTable) -> Result<VerifyReport> {
    check_n(table, 11)?;
    let sparse = SparseBetaModP::new(11, 3)?;
    let mut report = VerifyReport::new("lemma65");
    report.note(format!("flag f-vector of B_11 has {} nonzero entries mod 3", sparse.support_len()));
    let families: [(&[u32], bool); 4] = [(&[1, 9], false), (&[2, 10], false), (&[1, 10], true), (&[2, 9], true)];
    for (extra, negated) in families {
        let mut bad = None;
        for r in 0u64..64 {
            let mask = (r << 2) | mask_of(extra);
            let odd = (r.count_ones() % 2 == 1) != negated;
            let expected = if odd { 2 } else { 1 };
            let exact = table.value(mask) % 3;
            let via_qsym = sparse.beta(mask);
            if exact != expected || via_qsym != expected {
                bad = Some(format!(
                    "S = {}: table {exact}, quasi-symmetric {via_qsym}, expected {expected}",
                    DescentSet::new(11, mask)?
                ));
                break;
            }
        }
        let sign = if negated { "-(-1)^|R|" } else { "(-1)^|R|" };
        let name = format!("β_11(R ∪ {{{},{}}}) ≡ {sign} mod 3", extra[0], extra[1]);
        let ok = bad.is_none();
        report.push(name, ok, bad.unwrap_or_else(|| "all 64 sets R ⊆ [3,8]".into()));
    }
    Ok(report)
}

/// `Φ_6 | Q_11`, decided by the recursive root test and by reduction mod `Φ_6`.
pub fn verify_prop66(table: &BetaTable) -> Result<VerifyReport> {
    check_n(table, 11)?;
    let mut report = VerifyReport::new("prop66");
    report.push(
        "3 is essential for 11 in base 2, non-essential in base 3",
        digitwise_le(3, 11, 2) && !digitwise_le(3, 11, 3),
        "11 = 1011_2 = 102_3",
    );
    let h = residue_histogram(table, 6)?;
    report.push("a_j = a_{-j} and a_j = a_{3-j}", lemma41_conditions_hold(&h)?, format!("a = {:?}", h.counts));
    report.push("Φ_6 | Q_11 (root test)", divides(table, 6)?, "");
    let value = q_at_root(table, 6)?;
    report.push("Φ_6 | Q_11 (reduction)", value.is_zero(), format!("Q_11(ω_6) = {value}"));
    Ok(report)
}

fn closed_form_sweep(
    target: String,
    table: &BetaTable,
    p: u64,
    closed: impl Fn(&DescentSet) -> Result<u64>,
) -> Result<VerifyReport> {
    let n = table.n();
    let mut report = VerifyReport::new(target);
    let mut bad = None;
    for (mask, &v) in table.values().iter().enumerate() {
        let s = DescentSet::new(n, mask as u64)?;
        let expected = closed(&s)?;
        if v % p != expected {
            bad = Some(format!("S = {s}: β = {v} ≡ {} mod {p}, closed form {expected}", v % p));
            break;
        }
    }
    let ok = bad.is_none();
    report.push(
        format!("closed form mod {p}, n={n}"),
        ok,
        bad.unwrap_or_else(|| format!("all {} subsets", table.len())),
    );
    Ok(report)
}

/// `β_{2q}(S) ≡ (-1)^{|S - {q}|} (mod p)` for every `S`; `table` is for `n = 2q`.
pub fn verify_lemma83(q: u64, table: &BetaTable) -> Result<VerifyReport> {
    let (p, _) = odd_prime_power(q).ok_or(Error::NotOddPrimePower(q))?;
    check_n(table, 2 * q)?;
    closed_form_sweep(format!("lemma83 q={q}"), table, p, |s| beta_2q_mod_p(q, s))
}

/// The three-case formula for `β_{q+1}(S) mod p`; `table` is for `n = q + 1`.
pub fn verify_eq8(q: u64, table: &BetaTable) -> Result<VerifyReport> {
    let (p, _) = odd_prime_power(q).ok_or(Error::NotOddPrimePower(q))?;
    check_n(table, q + 1)?;
    closed_form_sweep(format!("eq8 q={q}"), table, p, |s| beta_q_plus_1_mod_p(q, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::build_beta_table;

    #[test]
    fn eleven() {
        let t = build_beta_table(11).unwrap();
        assert!(verify_lemma65(&t).unwrap().passed());
        let r = verify_prop66(&t).unwrap();
        assert!(r.passed(), "{r}");
        assert!(verify_lemma65(&build_beta_table(10).unwrap()).is_err());
    }

    #[test]
    fn closed_forms() {
        for q in [3u64, 5, 7, 9] {
            assert!(verify_lemma83(q, &build_beta_table(2 * q as u32).unwrap()).unwrap().passed(), "q = {q}");
            assert!(verify_eq8(q, &build_beta_table(q as u32 + 1).unwrap()).unwrap().passed(), "q = {q}");
        }
        let t = build_beta_table(6).unwrap();
        let wrong = closed_form_sweep("x".into(), &t, 3, |_| Ok(1)).unwrap();
        assert!(!wrong.passed());
        assert!(verify_lemma83(15, &build_beta_table(6).unwrap()).is_err());
    }
}
