//! Exact integer values of the mode-count bounds for `k` Gaussians in `R^d`.
//!
//! * lower: `C(k, d) + k` from the hyperplane-arrangement construction;
//! * conjecture: `C(d + k − 1, d)`;
//! * upper: `2^(d + C(k, 2)) · (5 + 3d)^k`, the fewnomial count of
//!   non-degenerate critical points specialised to degree-2 systems.
//!
//! Everything is computed with arbitrary precision integers.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Exact binomial coefficient; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(k, d) + k`.
pub fn lower(d: u64, k: u64) -> BigUint {
    binomial(k, d) + k
}

/// `C(d + k − 1, d)`.
pub fn conjecture(d: u64, k: u64) -> BigUint {
    binomial(d + k - 1, d)
}

/// `2^(d + C(k,2)) · (5 + 3d)^k`.
pub fn upper(d: u64, k: u64) -> BigUint {
    let exp2 = d + k * k.saturating_sub(1) / 2;
    (BigUint::one() << exp2) * BigUint::from(5 + 3 * d).pow(k as u32)
}

/// `d_1 ⋯ d_n · (5 + n + Σ d_i)^k · 2^(k(k−1)/2)`: bound on non-degenerate
/// solutions of `n` polynomial equations of degrees `d_i` in `n` variables
/// and `k` exponentials of quadratic forms.
pub fn fewnomial(degrees: &[u64], k: u64) -> BigUint {
    assert!(!degrees.is_empty(), "fewnomial bound needs at least one equation");
    let n = degrees.len() as u64;
    let product = degrees
        .iter()
        .fold(BigUint::one(), |acc, &di| acc * BigUint::from(di));
    let total: u64 = degrees.iter().sum();
    product * BigUint::from(5 + n + total).pow(k as u32) * (BigUint::one() << (k * k.saturating_sub(1) / 2))
}

/// Mode-count bound triple for one `(d, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSet {
    pub d: u64,
    pub k: u64,
    #[serde(with = "biguint_string")]
    pub lower: BigUint,
    #[serde(with = "biguint_string")]
    pub conjecture: BigUint,
    #[serde(with = "biguint_string")]
    pub upper: BigUint,
    /// The lower-bound formula exceeds the conjectured value.
    pub lower_exceeds_conjecture: bool,
    /// `d = 1`, where `m(1, k) = k` is known and the lower formula overshoots it.
    pub univariate_anomaly: bool,
}

impl BoundSet {
    pub fn new(d: u64, k: u64) -> Self {
        assert!(d >= 1 && k >= 1, "d and k must be positive");
        let lower = lower(d, k);
        let conjecture = conjecture(d, k);
        let upper = upper(d, k);
        Self {
            d,
            k,
            lower_exceeds_conjecture: lower > conjecture,
            univariate_anomaly: d == 1 && k >= 1,
            lower,
            conjecture,
            upper,
        }
    }

    /// Known exact value when one exists (`k = 1`, or `d = 1`).
    pub fn known_exact(&self) -> Option<u64> {
        if self.k == 1 {
            Some(1)
        } else if self.d == 1 {
            Some(self.k)
        } else {
            None
        }
    }
}

/// Row-major table of bound triples for `1 ≤ d ≤ d_max`, `1 ≤ k ≤ k_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub rows: Vec<Vec<BoundSet>>,
}

pub fn bound_table(d_max: u64, k_max: u64) -> BoundTable {
    assert!(d_max >= 1 && k_max >= 1, "table limits must be positive");
    BoundTable {
        rows: (1..=d_max)
            .map(|d| (1..=k_max).map(|k| BoundSet::new(d, k)).collect())
            .collect(),
    }
}

impl BoundTable {
    pub fn cells(&self) -> impl Iterator<Item = &BoundSet> {
        self.rows.iter().flatten()
    }

    pub fn flagged(&self) -> Vec<&BoundSet> {
        self.cells().filter(|c| c.lower_exceeds_conjecture).collect()
    }

    /// CSV with header `d,k,lower,conjecture,upper`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["d", "k", "lower", "conjecture", "upper"])?;
        for c in self.cells() {
            w.write_record([
                c.d.to_string(),
                c.k.to_string(),
                c.lower.to_string(),
                c.conjecture.to_string(),
                c.upper.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("ascii digits"))
    }

    /// Right-aligned columns; a `*` marks cells whose lower formula exceeds
    /// the conjecture, a `†` marks the `d = 1` rows where `m(1,k) = k`.
    pub fn to_text(&self) -> String {
        let header = ["d", "k", "lower", "conjecture", "upper"];
        let body: Vec<[String; 5]> = self
            .cells()
            .map(|c| {
                let mut lower = c.lower.to_string();
                if c.lower_exceeds_conjecture {
                    lower.push('*');
                }
                if c.univariate_anomaly {
                    lower.push('†');
                }
                [
                    c.d.to_string(),
                    c.k.to_string(),
                    lower,
                    c.conjecture.to_string(),
                    c.upper.to_string(),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..5)
            .map(|i| {
                body.iter()
                    .map(|r| r[i].chars().count())
                    .chain(std::iter::once(header[i].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, cols: &[&str]| {
            let cells: Vec<String> = cols
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            let _ = writeln!(out, "{}", cells.join("  "));
        };
        line(&mut out, &header);
        for r in &body {
            let cols: Vec<&str> = r.iter().map(String::as_str).collect();
            line(&mut out, &cols);
        }
        if body.iter().any(|r| r[2].contains('*') || r[2].contains('†')) {
            out.push_str("* lower formula exceeds conjecture; † d = 1, where m(1,k) = k is known\n");
        }
        out
    }
}

pub(crate) mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn lower_values() {
        assert_eq!(lower(2, 2), big(3));
        assert_eq!(lower(2, 4), big(10));
        assert_eq!(lower(5, 3), big(3));
        assert_eq!(lower(3, 3), big(4));
    }

    #[test]
    fn conjecture_values() {
        assert_eq!(conjecture(2, 3), big(6));
        for d in 1..20 {
            assert_eq!(conjecture(d, 1), big(1));
        }
        for k in 1..20 {
            assert_eq!(conjecture(1, k), big(k));
        }
    }

    #[test]
    fn upper_values() {
        assert_eq!(upper(1, 1), big(16));
        assert_eq!(upper(2, 2), big(968));
        assert_eq!(upper(1, 2), big(256));
        assert_eq!(upper(2, 3), big(42592));
    }

    #[test]
    fn upper_is_big() {
        let v = upper(10, 10);
        assert!(v.to_string().len() == 32);
        let expected = (BigUint::one() << 55u32) * BigUint::from(35u32).pow(10);
        assert_eq!(v, expected);
    }

    #[test]
    fn fewnomial_values() {
        assert_eq!(fewnomial(&[2, 2], 0), big(4));
        assert_eq!(fewnomial(&[1], 1), big(7));
        assert_eq!(fewnomial(&[2, 2, 2], 4), upper(3, 4));
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(0, 0), big(1));
        assert_eq!(binomial(5, 0), big(1));
        assert_eq!(binomial(5, 5), big(1));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(64, 32), big(1832624140942590534));
    }

    #[test]
    fn table_second_row_matches_conjecture() {
        let t = bound_table(2, 10);
        for c in &t.rows[1] {
            assert_eq!(c.lower, c.conjecture);
        }
        let c12 = &t.rows[0][1];
        assert_eq!(c12.lower, big(4));
        assert_eq!(c12.known_exact(), Some(2));
        assert!(c12.lower_exceeds_conjecture);
        assert!(c12.univariate_anomaly);
    }

    #[test]
    fn table_exports() {
        let t = bound_table(2, 2);
        let csv = t.to_csv().unwrap();
        assert_eq!(
            csv,
            "d,k,lower,conjecture,upper\n1,1,2,1,16\n1,2,4,2,256\n2,1,1,1,44\n2,2,3,3,968\n"
        );
        let text = t.to_text();
        assert!(text.lines().next().unwrap().trim_start().starts_with('d'));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn json_uses_decimal_strings() {
        let b = BoundSet::new(10, 10);
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains(&format!("\"upper\":\"{}\"", b.upper)));
        let back: BoundSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }
}
