use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::MultiPoly;
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// One term of the polynomial text format:
/// `{"exps":[i,j,k],"re":"num/den","im":"num/den"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exps: [u32; 3],
    pub re: String,
    #[serde(default = "zero_str")]
    pub im: String,
}

fn zero_str() -> String {
    "0".to_string()
}

/// Parse `"a/b"`, `"a"` or a finite decimal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) || fp.len() > 15 {
            return Err(bad());
        }
        let neg = ip.trim_start().starts_with('-');
        let ip_val: i64 = if ip.is_empty() || ip == "-" || ip == "+" {
            0
        } else {
            ip.parse().map_err(|_| bad())?
        };
        let den = 10i64.checked_pow(fp.len() as u32).ok_or_else(bad)?;
        let frac: i64 = fp.parse().map_err(|_| bad())?;
        let num = ip_val
            .abs()
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        return Ok(Ratio::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad())
}

fn fmt_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Homogeneous polynomial with exact Gaussian-rational coefficients, as ingested
/// from configuration files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoly {
    degree: u32,
    terms: BTreeMap<[u32; 3], (Rational, Rational)>,
}

impl ExactPoly {
    pub fn new(
        degree: u32,
        terms: impl IntoIterator<Item = ([u32; 3], (Rational, Rational))>,
    ) -> Result<Self> {
        let mut map: BTreeMap<[u32; 3], (Rational, Rational)> = BTreeMap::new();
        for (e, (re, im)) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidSpec(format!(
                    "exponent {e:?} does not sum to degree {degree}"
                )));
            }
            let slot = map.entry(e).or_insert((Rational::zero(), Rational::zero()));
            slot.0 += re;
            slot.1 += im;
        }
        map.retain(|_, (re, im)| !re.is_zero() || !im.is_zero());
        Ok(Self { degree, terms: map })
    }

    /// Parse the term-record format; the degree is inferred from the first
    /// record and validated against all others.
    pub fn from_records(records: &[TermRecord]) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::InvalidSpec("empty polynomial".into()))?;
        let degree = first.exps.iter().sum();
        let terms = records
            .iter()
            .map(|t| Ok((t.exps, (parse_rational(&t.re)?, parse_rational(&t.im)?))))
            .collect::<Result<Vec<_>>>()?;
        let p = Self::new(degree, terms)?;
        if p.terms.is_empty() {
            return Err(Error::InvalidSpec("polynomial is identically zero".into()));
        }
        Ok(p)
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, (re, im))| TermRecord {
                exps: *e,
                re: fmt_rational(re),
                im: fmt_rational(im),
            })
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &(Rational, Rational))> {
        self.terms.iter()
    }

    pub fn to_multipoly(&self) -> MultiPoly {
        MultiPoly::new(
            self.degree,
            self.terms.iter().map(|(e, (re, im))| {
                (
                    *e,
                    Complex64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN)),
                )
            }),
        )
        .expect("validated at construction")
    }

    pub fn partial(&self, var: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, (re, im))| {
            let mut f = *e;
            f[var] -= 1;
            let k = Rational::from_integer(e[var] as i64);
            (f, (re * k, im * k))
        });
        Self::new(self.degree.saturating_sub(1), terms).expect("derivative preserves homogeneity")
    }
}

impl fmt::Display for ExactPoly {
    /// Canonical text used for content hashing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg{}", self.degree)?;
        for (e, (re, im)) in &self.terms {
            write!(f, ";{},{},{}:{}:{}", e[0], e[1], e[2], fmt_rational(re), fmt_rational(im))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), Ratio::from_integer(-7));
        assert_eq!(parse_rational("-0.125").unwrap(), Ratio::new(-1, 8));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn degree_is_validated() {
        let recs = vec![
            TermRecord { exps: [1, 0, 0], re: "1".into(), im: "0".into() },
            TermRecord { exps: [1, 1, 0], re: "1".into(), im: "0".into() },
        ];
        assert!(ExactPoly::from_records(&recs).is_err());
    }

    #[test]
    fn records_round_trip() {
        let recs = vec![
            TermRecord { exps: [2, 0, 0], re: "1/3".into(), im: "-2".into() },
            TermRecord { exps: [0, 1, 1], re: "5".into(), im: "0".into() },
        ];
        let p = ExactPoly::from_records(&recs).unwrap();
        let q = ExactPoly::from_records(&p.to_records()).unwrap();
        assert_eq!(p, q);
    }
}
