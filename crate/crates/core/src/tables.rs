//! Reconstruction of the published tables from first principles, each row
//! compared against the embedded reference data.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::beta::{build_beta_table, rho, BetaTable};
use crate::combinat::{digitwise_le, euler_zigzag, multiplicative_order, pow_mod};
use crate::cyclotomic::{divides, factor_row_problems, scan_factors, TableProvider};
use crate::data::{self, Explanation, WitnessRow};
use crate::error::{Error, Result};
use crate::report::VerifyReport;
use crate::witness::{
    exponent_classes, exponent_classes_two_digit, find_witnesses, theorem_rule_witness, valid_witness_ks, WitnessTag,
};

/// Witness searches run for printed rows with `n` up to this bound.
const TABLE_SEARCH_MAX_N: u64 = 128;

#[derive(Clone, Debug, Serialize)]
pub struct TableOutput {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub report: VerifyReport,
}

impl TableOutput {
    fn new(title: &str, columns: &[&str]) -> Self {
        TableOutput {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            report: VerifyReport::new(title),
        }
    }

    /// Aligned columns; long comma-separated lists are shortened to their head and a count.
    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| abbreviate(c)).collect()).collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.columns));
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let esc = |c: &String| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        let mut out = self.columns.iter().map(esc).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(esc).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

fn status(ok: bool) -> String {
    if ok { "ok" } else { "MISMATCH" }.into()
}

/// `a / 2^e` rendered as `a/2^e`.
const TEXT_CELL_MAX: usize = 48;

fn abbreviate(cell: &str) -> String {
    if cell.len() <= TEXT_CELL_MAX || !cell.bytes().all(|b| b.is_ascii_digit() || b == b',') {
        return cell.to_string();
    }
    let items: Vec<&str> = cell.split(',').collect();
    let mut head = String::new();
    for (shown, item) in items.iter().enumerate() {
        if head.len() + item.len() + 1 > TEXT_CELL_MAX - 16 {
            break;
        }
        if shown > 0 {
            head.push(',');
        }
        head.push_str(item);
    }
    format!("{head},... ({} values)", items.len())
}

pub fn format_dyadic(r: Ratio<u64>) -> String {
    let d = *r.denom();
    match d {
        1 => r.numer().to_string(),
        2 => format!("{}/2", r.numer()),
        _ if d.is_power_of_two() => format!("{}/2^{}", r.numer(), d.trailing_zeros()),
        _ => r.to_string(),
    }
}

/// `ρ(n)` for the listed `n <= n_max`.
pub fn table1(n_max: u32) -> Result<TableOutput> {
    let mut t = TableOutput::new("Table 1: proportion of odd β_n(S)", &["n", "rho", "expected", "status"]);
    for &(n, num, e) in data::RHO_VALUES.iter().filter(|r| r.0 <= n_max) {
        let got = rho(n)?;
        let expected = Ratio::new(num, 1u64 << e);
        let ok = got == expected;
        t.rows.push(vec![n.to_string(), format_dyadic(got), format_dyadic(expected), status(ok)]);
        t.report.push(format!("ρ({n})"), ok, format!("{} vs {}", format_dyadic(got), format_dyadic(expected)));
    }
    Ok(t)
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

// Search results grouped into rows sharing one `k`, greedily taking the `k`
// that covers the most remaining `s` (smallest `k` on ties).
fn group_by_common_k(n: u64, tag: WitnessTag, s_values: &BTreeSet<u64>) -> Result<Vec<(u64, Vec<u64>)>> {
    let mut valid: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for &s in s_values {
        valid.insert(s, valid_witness_ks(n, s, tag)?.into_iter().collect());
    }
    let mut left: BTreeSet<u64> = s_values.clone();
    let mut rows = Vec::new();
    while !left.is_empty() {
        let mut best: Option<(usize, u64)> = None;
        for k in 1..n {
            let c = left.iter().filter(|s| valid[s].contains(&k)).count();
            if c > 0 && best.is_none_or(|(bc, _)| c > bc) {
                best = Some((c, k));
            }
        }
        let (_, k) = best.ok_or_else(|| Error::invalid("witness without a valid k"))?;
        let covered: Vec<u64> = left.iter().copied().filter(|s| valid[s].contains(&k)).collect();
        for s in &covered {
            left.remove(s);
        }
        rows.push((k, covered));
    }
    Ok(rows)
}

fn witness_set(n: u64) -> Result<BTreeSet<u64>> {
    Ok(find_witnesses(n)?.into_iter().map(|w| w.s).collect())
}

/// Factors `Φ_{4s}` for `n = 2^a`, `a <= 5`.
pub fn table2() -> Result<TableOutput> {
    let mut t = TableOutput::new("Table 2: factors Φ_{4s} of Q_{2^a}", &["n", "s", "k", "source", "status"]);
    let mut printed: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for row in data::ONE_DIGIT_ROWS {
        let found = witness_set(row.n)?;
        let mut problems = Vec::new();
        let mut notes = Vec::new();
        let mut misprinted = Vec::new();
        for &s in row.s_values {
            printed.entry(row.n).or_default().insert(s);
            if !found.contains(&s) {
                problems.push(format!("s={s} not found by search"));
                continue;
            }
            let ks = valid_witness_ks(row.n, s, WitnessTag::OneDigit)?;
            if ks.contains(&row.k) {
                continue;
            }
            match data::ONE_DIGIT_ERRATA.iter().find(|e| e.0 == row.n && e.1 == s && e.2 == row.k) {
                Some(&(_, _, _, fix)) if ks.contains(&fix) => {
                    misprinted.push(format!("s={s} needs k={fix}"));
                    notes.push(format!("s={s}: no witness at k={}, k={fix} works", row.k))
                }
                _ => problems.push(format!("s={s} has no witness at k={}", row.k)),
            }
        }
        let ok = problems.is_empty();
        let label = format!("n={} s={} k={}", row.n, join(row.s_values), row.k);
        let detail = if ok { notes.join("; ") } else { problems.join("; ") };
        t.report.push(label, ok, detail.clone());
        let st = if !ok {
            status(false)
        } else if notes.is_empty() {
            status(true)
        } else {
            format!("ok ({})", misprinted.join(", "))
        };
        t.rows.push(vec![row.n.to_string(), join(row.s_values), row.k.to_string(), "printed".into(), st]);
    }

    let w32 = find_witnesses(32)?;
    let all_divide = w32.iter().all(|w| data::N32_DIVISOR_BASE % w.s == 0);
    let k_works =
        w32.iter().all(|w| valid_witness_ks(32, w.s, WitnessTag::OneDigit).is_ok_and(|ks| ks.contains(&data::N32_K)));
    let ok = w32.len() == data::N32_DIVISOR_COUNT && all_divide && k_works;
    t.report.push(
        format!("n=32: divisors of {} at k={}", data::N32_DIVISOR_BASE, data::N32_K),
        ok,
        format!("{} witnesses found", w32.len()),
    );
    t.rows.push(vec![
        "32".into(),
        format!("{} divisors of {}", w32.len(), data::N32_DIVISOR_BASE),
        data::N32_K.to_string(),
        "printed".into(),
        status(ok),
    ]);

    for a in 2..=4u32 {
        let n = 1u64 << a;
        let extra: BTreeSet<u64> =
            witness_set(n)?.difference(printed.get(&n).unwrap_or(&BTreeSet::new())).copied().collect();
        for (k, s) in group_by_common_k(n, WitnessTag::OneDigit, &extra)? {
            t.rows.push(vec![n.to_string(), join(&s), k.to_string(), "search only".into(), String::new()]);
        }
    }
    Ok(t)
}

/// Two-digit exponent classes for `p ∈ {3, 5, 11, 17}`.
pub fn table3() -> Result<TableOutput> {
    let mut t = TableOutput::new("Table 3: exponent classes {a,b} mod g", &["p", "g", "classes", "status"]);
    for &(p, g, expected) in data::EXPONENT_CLASSES {
        let got = exponent_classes_two_digit(p)?;
        let got_g = multiplicative_order(2, p)?;
        let want: BTreeSet<(u64, u64)> = expected.iter().copied().collect();
        let have: BTreeSet<(u64, u64)> = got.iter().copied().collect();
        let ok = want == have && got_g == g;
        let classes = got.iter().map(|(a, b)| format!("{{{a},{b}}}")).collect::<Vec<_>>().join(" ");
        t.rows.push(vec![p.to_string(), got_g.to_string(), classes, status(ok)]);
        let detail = format!("{} classes, expected {}", have.len(), want.len());
        t.report.push(format!("p={p}"), ok, detail);
    }
    Ok(t)
}

/// `{a,b,...}` exponent class of `n` mod `G = ord_{p^l}(2)`, with ` mod G` when `l > 1`.
pub fn class_label(n: u64, p: u64, l: u32) -> Result<String> {
    let modulus = p.pow(l);
    let g = multiplicative_order(2, modulus)?;
    let mut exps: Vec<u64> = (0..64).filter(|i| n >> i & 1 == 1).map(|i| i % g).collect();
    exps.sort_unstable();
    let body = format!("{{{}}}", join(&exps));
    Ok(if l > 1 { format!("{body} mod {g}") } else { body })
}

fn explanation_label(e: &Explanation, s: u64) -> String {
    match e {
        Explanation::Theorem => "divisor theorem".into(),
        Explanation::Rule(r) => r(s).name().into(),
        Explanation::ExponentClass { l: 1 } => "exponent class".into(),
        Explanation::ExponentClass { l } => format!("exponent class, {l} digits"),
        Explanation::Special => "n = 11 special case".into(),
    }
}

fn check_row(
    row: &WitnessRow,
    tag: WitnessTag,
    found: Option<&BTreeSet<u64>>,
    q11: &dyn Fn() -> Result<Arc<BetaTable>>,
) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let n = row.n;
    if let Explanation::Special = row.explanation {
        for &s in row.s_values {
            if digitwise_le(row.k, n, s) {
                problems.push(format!("k={} is essential for {n} in base {s}", row.k));
            }
        }
        for &s in row.s_values {
            if !divides(q11()?.as_ref(), 2 * s)? {
                problems.push(format!("Φ_{} does not divide Q_{n}", 2 * s));
            }
        }
        return Ok(problems);
    }
    for &s in row.s_values {
        if let Some(found) = found {
            if !found.contains(&s) {
                problems.push(format!("s={s} not found by search"));
            }
        }
        if !valid_witness_ks(n, s, tag)?.contains(&row.k) {
            problems.push(format!("k={} is not a witness for s={s}", row.k));
        }
    }
    if !row.classes.is_empty() {
        let p = row.s_values[0];
        let l = match row.explanation {
            Explanation::ExponentClass { l } => l,
            _ => 1,
        };
        let label = class_label(n, p, l)?;
        if label != row.classes {
            problems.push(format!("class of n is {label}, printed {}", row.classes));
        }
        if let Explanation::ExponentClass { l } = row.explanation {
            let g = multiplicative_order(2, p.pow(l))?;
            let mut exps: Vec<u64> = (0..64).filter(|i| n >> i & 1 == 1).map(|i| i % g).collect();
            exps.sort_unstable();
            if !exponent_classes(p, l, exps.len())?.contains(&exps) {
                problems.push(format!("{label} is not a non-essential class for p={p}"));
            }
        }
        // class residues really make every binary power non-essential
        let modulus = p.pow(l);
        let sum = (0..64).filter(|i| n >> i & 1 == 1).map(|i| pow_mod(2, i, modulus)).sum::<u64>() % modulus;
        if sum != n % modulus {
            problems.push("class residues do not reproduce n".into());
        }
    }
    if let Explanation::Rule(rule) = row.explanation {
        let s = row.s_values[0];
        match theorem_rule_witness(n, rule(s))? {
            Some(w) if w.k == row.k => {}
            Some(w) => problems.push(format!("rule gives k={}, printed {}", w.k, row.k)),
            None => problems.push(format!("{} does not apply", rule(s).name())),
        }
    }
    Ok(problems)
}

fn witness_table(title: &str, rows: &[WitnessRow], tag: WitnessTag) -> Result<TableOutput> {
    let mut t = TableOutput::new(title, &["n", "s", "class", "k", "explained by", "source", "status"]);
    let q11 = std::sync::OnceLock::new();
    let get11 = || -> Result<Arc<BetaTable>> {
        if let Some(t) = q11.get() {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(build_beta_table(11)?);
        Ok(Arc::clone(q11.get_or_init(|| t)))
    };
    let mut searched: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut printed: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for row in rows {
        if row.n <= TABLE_SEARCH_MAX_N && !searched.contains_key(&row.n) {
            searched.insert(row.n, witness_set(row.n)?);
        }
        printed.entry(row.n).or_default().extend(row.s_values.iter().copied());
        let problems = check_row(row, tag, searched.get(&row.n), &get11)?;
        let ok = problems.is_empty();
        let label = format!("n={} s={} k={}", row.n, join(row.s_values), row.k);
        t.report.push(label, ok, problems.join("; "));
        let class = if row.classes.is_empty() { "---".to_string() } else { row.classes.to_string() };
        t.rows.push(vec![
            row.n.to_string(),
            join(row.s_values),
            class,
            row.k.to_string(),
            explanation_label(&row.explanation, row.s_values[0]),
            "printed".into(),
            status(ok),
        ]);
    }
    for (&n, found) in &searched {
        let extra: BTreeSet<u64> = found.difference(&printed[&n]).copied().filter(|&s| s > 1).collect();
        for (k, s) in group_by_common_k(n, tag, &extra)? {
            t.rows.push(vec![
                n.to_string(),
                join(&s),
                "---".into(),
                k.to_string(),
                "divisor theorem".into(),
                "search only".into(),
                String::new(),
            ]);
        }
    }
    Ok(t)
}

/// Factors `Φ_{2s}` for two binary ones.
pub fn table4() -> Result<TableOutput> {
    witness_table("Table 4: factors Φ_{2s}, two binary ones", data::TWO_DIGIT_ROWS, WitnessTag::TwoDigit)
}

/// Factors `Φ_{2s}` for three binary ones.
pub fn table5() -> Result<TableOutput> {
    witness_table("Table 5: factors Φ_{2s}, three binary ones", data::THREE_DIGIT_ROWS, WitnessTag::ThreeDigit)
}

fn degree_check(n: u32, table: &BetaTable) -> (bool, String) {
    let max = table.max_value();
    let zigzag = euler_zigzag(n);
    if zigzag != max.into() {
        return (false, format!("max β = {max}, E_{n} = {zigzag}"));
    }
    if let Some(&(_, d)) = data::EXACT_DEGREES.iter().find(|r| r.0 == n) {
        return (d == max, format!("{max}, printed {d}"));
    }
    if let Some(&(_, mantissa, exp)) = data::APPROX_DEGREES.iter().find(|r| r.0 == n) {
        // printed to three decimals; allow one unit in the last place
        let printed: f64 = mantissa.parse().expect("embedded mantissa");
        let got = max as f64 / 10f64.powi(exp as i32);
        return ((got - printed).abs() <= 1.0e-3 + 1e-9, format!("{max}, printed {mantissa}e{exp}"));
    }
    (true, max.to_string())
}

/// Cyclotomic factors of `Q_n` for `n_lo..=n_hi`, scanning `m <= m_max`.
pub fn table6(n_lo: u32, n_hi: u32, m_max: u64, tables: &TableProvider<'_>) -> Result<TableOutput> {
    let mut t = TableOutput::new(
        &format!("Table 6: cyclotomic factors of Q_n, m <= {m_max}"),
        &["n", "degree", "factors", "status"],
    );
    for n in n_lo.max(3)..=n_hi {
        let table = tables(n)?;
        let found = scan_factors(&table, m_max, false)?;
        let (deg_ok, deg) = degree_check(n, &table);
        t.report.push(format!("n={n} degree"), deg_ok, deg);
        let mut product = found.product_string();
        let unexplained = data::unexplained_factors(n);
        if !unexplained.is_empty() {
            let listed: Vec<String> = unexplained.iter().map(|m| format!("Φ_{m}")).collect();
            product.push_str(&format!("  (unexplained: {})", listed.join(", ")));
        }
        let ok = match data::expected_factors(n) {
            Some(expected) => {
                let problems = factor_row_problems(&found, expected);
                let ok = problems.is_empty();
                t.report.push(
                    format!("n={n} factors"),
                    ok,
                    if ok { found.product_string() } else { problems.join("; ") },
                );
                ok
            }
            None => {
                t.report.skip(format!("n={n} factors"), "no reference row");
                true
            }
        };
        t.rows.push(vec![n.to_string(), table.max_value().to_string(), product, status(ok && deg_ok)]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_format() {
        assert_eq!(format_dyadic(Ratio::new(29, 64)), "29/2^6");
        assert_eq!(format_dyadic(Ratio::new(1, 2)), "1/2");
        assert_eq!(format_dyadic(Ratio::new(1, 1)), "1");
    }

    #[test]
    fn small_tables() {
        let t1 = table1(15).unwrap();
        assert!(t1.report.passed(), "{}", t1.report);
        assert_eq!(t1.rows.len(), 4);
        let t3 = table3().unwrap();
        assert!(t3.report.passed(), "{}", t3.report);
        let t2 = table2().unwrap();
        assert!(t2.report.passed(), "{}", t2.report);
        assert!(t2.to_text().contains("s=15 needs k=2"));
    }

    #[test]
    fn witness_tables() {
        let t4 = table4().unwrap();
        assert!(t4.report.passed(), "{}", t4.report);
        let t5 = table5().unwrap();
        assert!(t5.report.passed(), "{}", t5.report);
        assert_eq!(class_label(20, 3, 2).unwrap(), "{2,4} mod 6");
        assert_eq!(class_label(32802, 11, 1).unwrap(), "{1,5,5}");
    }

    #[test]
    fn factor_table() {
        let t = table6(3, 12, 300, &|n| build_beta_table(n).map(Arc::new)).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        assert!(t.to_csv().starts_with("n,degree,factors,status\n3,2,Φ_2,ok\n"));
    }
}
