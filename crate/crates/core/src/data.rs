//! Published reference values used by the table verifiers: proportions of
//! odd statistics, factor witnesses, exponent classes, and the list of known
//! cyclotomic factors of `Q_n(t)` for `3 <= n <= 23`.

use crate::cyclotomic::Multiplicity;
use crate::witness::Rule;

/// `(n, numerator, log2 of denominator)` for `ρ(n)`.
pub const RHO_VALUES: &[(u32, u64, u32)] = &[(1, 1, 0), (3, 1, 1), (7, 1, 1), (15, 29, 6), (31, 3991, 13)];

/// Exact degrees `E_n` for `n = 3..=13`.
pub const EXACT_DEGREES: &[(u32, u64)] = &[
    (3, 2),
    (4, 5),
    (5, 16),
    (6, 61),
    (7, 272),
    (8, 1385),
    (9, 7936),
    (10, 50521),
    (11, 353792),
    (12, 2702765),
    (13, 22368256),
];

/// Degrees for `n = 14..=23` as printed: mantissa with three decimals and exponent.
pub const APPROX_DEGREES: &[(u32, &str, u32)] = &[
    (14, "1.993", 8),
    (15, "1.904", 9),
    (16, "1.939", 10),
    (17, "2.099", 11),
    (18, "2.405", 12),
    (19, "2.909", 13),
    (20, "3.704", 14),
    (21, "4.951", 15),
    (22, "6.935", 16),
    (23, "1.015", 18),
];

use Multiplicity::{One as S, TwoOrMore as D};

/// Known cyclotomic factors `(m, multiplicity)` of `Q_n(t)`.
const FACTORS: &[(u32, &[(u64, Multiplicity)])] = &[
    (3, &[(2, S)]),
    (4, &[(4, D)]),
    (5, &[(2, D), (10, S)]),
    (6, &[(2, D), (6, D), (10, S)]),
    (7, &[(2, S)]),
    (8, &[(4, D), (28, S)]),
    (9, &[(2, D), (6, S), (18, S)]),
    (10, &[(2, D), (6, S), (10, D), (18, S), (30, S)]),
    (11, &[(2, S), (6, S), (22, S)]),
    (12, &[(2, D), (6, S), (10, S), (18, S), (22, D), (66, S), (110, S), (198, S)]),
    (13, &[(2, S), (26, S)]),
    (14, &[(2, D), (4, S), (14, D), (26, S), (28, S), (182, S)]),
    (15, &[]),
    (16, &[(4, D), (12, S), (20, S), (44, S), (52, S), (60, S), (156, S), (220, S), (260, S), (572, S), (2860, S)]),
    (17, &[(2, D), (34, S)]),
    (18, &[(2, D), (6, D), (18, S), (34, S), (102, S), (306, S)]),
    (19, &[(2, S), (38, S)]),
    (
        20,
        &[
            (2, D),
            (6, S),
            (10, S),
            (30, S),
            (34, S),
            (38, D),
            (102, S),
            (114, S),
            (170, S),
            (190, S),
            (510, S),
            (570, S),
            (646, S),
            (1938, S),
            (3230, S),
            (9690, S),
        ],
    ),
    (21, &[(2, S), (6, S), (14, S), (42, S)]),
    (22, &[(2, D), (14, S), (22, D), (154, S)]),
    (23, &[]),
];

pub fn expected_factors(n: u32) -> Option<&'static [(u64, Multiplicity)]> {
    FACTORS.iter().find(|(k, _)| *k == n).map(|(_, f)| *f)
}

/// Factors that are known but have no explanation.
pub fn unexplained_factors(n: u32) -> &'static [u64] {
    if n == 14 {
        &[4, 28]
    } else {
        &[]
    }
}

pub fn expected_range() -> (u32, u32) {
    (3, 23)
}

/// Why a printed witness row holds.
#[derive(Clone, Copy, Debug)]
pub enum Explanation {
    /// The general divisor theorem for the number of binary ones.
    Theorem,
    /// A named congruence rule at `p = s`.
    Rule(fn(u64) -> Rule),
    /// An exponent class, judged on the last `l` base-`p` digits.
    ExponentClass { l: u32 },
    /// `Φ_6 | Q_11`, which no witness explains.
    Special,
}

/// One printed witness row: every `s` in `s_values` divides `C(n, k)`.
#[derive(Clone, Copy, Debug)]
pub struct WitnessRow {
    pub n: u64,
    pub s_values: &'static [u64],
    pub classes: &'static str,
    pub k: u64,
    pub explanation: Explanation,
}

const fn row(n: u64, s_values: &'static [u64], classes: &'static str, k: u64, explanation: Explanation) -> WitnessRow {
    WitnessRow { n, s_values, classes, k, explanation }
}

use Explanation::{ExponentClass, Special, Theorem};
const CLASS: Explanation = ExponentClass { l: 1 };
const CLASS_SQ: Explanation = ExponentClass { l: 2 };
const HALF: Explanation = Explanation::Rule(Rule::HalfOrderPair);
const BOTH_HALF: Explanation = Explanation::Rule(Rule::BothHalfOrder);
const MINUS_ONE: Explanation = Explanation::Rule(Rule::OrderMinusOne);
const ONE_HALF_HALF: Explanation = Explanation::Rule(Rule::OneHalfHalf);
const MINUS_TWO: Explanation = Explanation::Rule(Rule::MinusTwoMinusOne);
const SPARSE: Explanation = Explanation::Rule(Rule::SparsePrime);

/// Factors `Φ_{4s}` for `n = 2^a`. The `n = 32` row covers every divisor of 17678835.
pub const ONE_DIGIT_ROWS: &[WitnessRow] = &[
    row(4, &[1], "", 1, Theorem),
    row(8, &[1], "", 1, Theorem),
    row(8, &[7], "", 2, Theorem),
    row(16, &[1], "", 1, Theorem),
    row(16, &[5, 11, 13, 55, 65, 143, 715], "", 7, Theorem),
    row(16, &[3, 15], "", 5, Theorem),
    row(16, &[39], "", 2, Theorem),
];

/// Odd part of `C(32, 16)` without 17; each divisor gives `Φ_{4s} | Q_32` with `k = 15`.
pub const N32_DIVISOR_BASE: u64 = 17_678_835;
pub const N32_K: u64 = 15;
pub const N32_DIVISOR_COUNT: usize = 96;

/// Printed `(n, s, k)` where `s ∤ C(n, k)`, with the `k` that works: `(n, s, printed k, working k)`.
pub const ONE_DIGIT_ERRATA: &[(u64, u64, u64, u64)] = &[(16, 15, 5, 2), (16, 39, 2, 5)];

/// Factors `Φ_{2s}` for `n` with two binary ones.
pub const TWO_DIGIT_ROWS: &[WitnessRow] = &[
    row(6, &[3], "{0,1}", 5, HALF),
    row(6, &[5], "{1,2}", 3, CLASS),
    row(9, &[3], "{0,1}", 7, HALF),
    row(9, &[9], "", 2, Theorem),
    row(10, &[3], "{1,1}", 5, BOTH_HALF),
    row(10, &[5], "{1,3}", 1, CLASS),
    row(10, &[9], "", 5, Theorem),
    row(10, &[15], "", 3, Theorem),
    row(12, &[3], "{0,1}", 7, HALF),
    row(12, &[5], "{2,3}", 3, CLASS),
    row(12, &[11], "{2,3}", 2, CLASS),
    row(12, &[55], "", 3, Theorem),
    row(12, &[9, 33, 99], "", 5, Theorem),
    row(17, &[17], "{0,4}", 7, HALF),
    row(18, &[17], "{1,4}", 3, CLASS),
    row(18, &[9, 51, 153], "", 4, Theorem),
    row(20, &[3], "{2,4} mod 6", 3, CLASS_SQ),
    row(20, &[5], "{0,2}", 7, HALF),
    row(20, &[17], "{2,4}", 5, CLASS),
    row(20, &[15, 19, 51, 57, 85, 95, 255, 285, 323, 969, 1615, 4845], "", 6, Theorem),
    row(72, &[3], "{0,1}", 7, HALF),
    row(528, &[31], "{4,4}", 3, MINUS_ONE),
    row(1088, &[5], "{2,2}", 9, BOTH_HALF),
];

/// Factors `Φ_{2s}` for `n` with three binary ones.
pub const THREE_DIGIT_ROWS: &[WitnessRow] = &[
    row(11, &[3], "", 3, Special),
    row(11, &[11], "{0,1,3}", 7, SPARSE),
    row(13, &[13], "{0,2,3}", 7, SPARSE),
    row(14, &[7], "{0,1,2}", 13, SPARSE),
    row(14, &[13], "{1,2,3}", 3, CLASS),
    row(14, &[91], "", 3, Theorem),
    row(19, &[19], "{0,1,4}", 7, SPARSE),
    row(21, &[3], "{0,0,0}", 2, CLASS),
    row(21, &[7], "{0,1,2}", 13, SPARSE),
    row(21, &[21], "", 2, Theorem),
    row(22, &[7], "{1,1,2}", 3, MINUS_TWO),
    row(22, &[11], "{1,2,4}", 7, CLASS),
    row(22, &[77], "", 3, Theorem),
    row(56, &[3], "{3,4,5} mod 6", 3, CLASS_SQ),
    row(4108, &[13], "{0,2,3}", 7, SPARSE),
    row(16576, &[17], "{6,6,7}", 3, MINUS_TWO),
    row(32802, &[11], "{1,5,5}", 7, ONE_HALF_HALF),
];

/// `(p, g, classes)`.
pub type ClassRow = (u64, u64, &'static [(u64, u64)]);

/// Exponent classes `{a, b} mod g` for which `2^a` is non-essential for
/// `2^a + 2^b` in base `p`, by the last digit.
pub const EXPONENT_CLASSES: &[ClassRow] = &[
    (3, 2, &[(0, 1), (1, 1)]),
    (5, 4, &[(0, 2), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]),
    (
        11,
        10,
        &[
            (0, 5),
            (1, 5),
            (1, 6),
            (2, 3),
            (2, 5),
            (2, 6),
            (2, 7),
            (3, 4),
            (3, 3),
            (3, 5),
            (3, 6),
            (3, 7),
            (3, 8),
            (3, 9),
            (4, 5),
            (4, 6),
            (4, 7),
            (4, 9),
            (5, 5),
            (5, 6),
            (5, 7),
            (5, 8),
            (5, 9),
            (6, 6),
            (6, 7),
            (6, 8),
            (6, 9),
            (7, 7),
            (7, 9),
            (9, 9),
        ],
    ),
    (
        17,
        8,
        &[
            (0, 4),
            (1, 4),
            (1, 5),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 4),
            (3, 5),
            (3, 6),
            (3, 7),
            (4, 4),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 5),
            (5, 6),
            (5, 7),
            (6, 6),
            (6, 7),
            (7, 7),
        ],
    ),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        assert_eq!(expected_factors(20).unwrap().len(), 16);
        assert_eq!(expected_factors(20).unwrap().last().unwrap().0, 9690);
        assert!(expected_factors(15).unwrap().is_empty());
        assert!(expected_factors(24).is_none());
        for (_, _, pairs) in EXPONENT_CLASSES {
            for &(a, b) in *pairs {
                assert!(a <= b);
            }
        }
    }
}
