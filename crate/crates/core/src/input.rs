//! Text formats for populations and score matrices.
//!
//! A population file holds one value per line; `#` starts a comment and
//! blank lines are ignored. Values are integers, decimals (optionally with an
//! exponent, e.g. `2.5e-3`) or rationals `p/q`. Every value is read exactly,
//! so `0.1` is the rational `1/10`.
//!
//! A matrix file holds one row per line, entries separated by whitespace or
//! commas, with the same comment rules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::bounds::ScoreMatrix;
use crate::error::{Error, Result};
use crate::types::Population;

/// Decimal exponents beyond this magnitude are rejected rather than expanded.
const MAX_EXPONENT: u32 = 4000;

/// Parse one exact number: an integer, a decimal with optional exponent, or `p/q`.
pub fn parse_number(token: &str) -> Result<BigRational> {
    let t = token.trim();
    let bad = || Error::Parse(format!("not a number: `{t}`"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{t}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    if exponent.unsigned_abs() > MAX_EXPONENT {
        return Err(Error::Parse(format!("exponent out of range in `{t}`")));
    }
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u32);
    } else {
        value /= Pow::pow(&ten, scale.unsigned_abs());
    }
    Ok(if negative { -value } else { value })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("line {line}: {msg}")),
        other => other,
    }
}

/// Parse a population file into an exact population.
pub fn parse_population(text: &str) -> Result<Population> {
    let values = content_lines(text)
        .map(|(line, body)| parse_number(body).map_err(|e| at_line(line, e)))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Parse("population file contains no values".into()));
    }
    Population::from_rationals(values)
}

/// Parse a square score matrix.
pub fn parse_matrix(text: &str) -> Result<ScoreMatrix> {
    let rows = content_lines(text)
        .map(|(line, body)| {
            body.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|tok| parse_number(tok).map(|r| crate::types::rational_to_f64(&r)).map_err(|e| at_line(line, e)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Parse("matrix file contains no rows".into()));
    }
    ScoreMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn numbers_parse_exactly() {
        assert_eq!(parse_number("3").unwrap(), q(3, 1));
        assert_eq!(parse_number("-0.1").unwrap(), q(-1, 10));
        assert_eq!(parse_number("+.5").unwrap(), q(1, 2));
        assert_eq!(parse_number("2.5e-3").unwrap(), q(1, 400));
        assert_eq!(parse_number("1E2").unwrap(), q(100, 1));
        assert_eq!(parse_number(" 3/6 ").unwrap(), q(1, 2));
        assert_eq!(parse_number("-7/14").unwrap(), q(-1, 2));
        for bad in ["", ".", "1/0", "abc", "1.2.3", "1e", "--1", "1/x", "nan", "inf", "1e99999"] {
            assert!(matches!(parse_number(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn population_files() {
        let text = "# grid\n0\n1/2   # half\n\n  1\n";
        let pop = parse_population(text).unwrap();
        assert_eq!(pop.len(), 3);
        assert_eq!(pop.exact().unwrap()[1], q(1, 2));
        let err = parse_population("0\nzero\n").unwrap_err();
        assert_eq!(err, Error::Parse("line 2: not a number: `zero`".into()));
        assert!(matches!(parse_population("# nothing\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn matrix_files() {
        let m = parse_matrix("1, 0\n0 1 # identity\n").unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.get(1, 1), 1.0);
        assert!(matches!(parse_matrix("1 2\n3\n"), Err(Error::Usage(_))));
    }
}
