use rug::{ops::Pow, Integer, Rational};

use super::QComplex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: &'static str,
}

fn err(input: &str, reason: &'static str) -> ParseError {
    ParseError {
        input: input.to_string(),
        reason,
    }
}

/// Parses a real number exactly: integers, fractions `p/q`, and decimals with
/// an optional exponent (`-2.25`, `1e-3`, `6.02E23`).
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(err(s, "empty number"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d == 0 {
            return Err(err(s, "zero denominator"));
        }
        return Ok(n / d);
    }
    let (neg, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = body[pos + 1..]
                .parse()
                .map_err(|_| err(s, "bad exponent"))?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err(s, "no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err(s, "invalid digit"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num = Integer::from_str_radix(&digits, 10).map_err(|_| err(s, "invalid digits"))?;
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut r = Rational::from(num);
    if scale >= 0 {
        r *= Integer::from((&ten).pow(scale as u32));
    } else {
        r /= Integer::from((&ten).pow((-scale) as u32));
    }
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Parses a complex number such as `3`, `-1.5`, `2i`, `-i`, `1/2-3/4i` or
/// `1e3+2.5i`.
pub fn parse_complex(s: &str) -> Result<QComplex, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err(s, "empty number"));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(QComplex::real(parse_rational(&t)?));
    };
    // Split at the last sign that is not the leading one and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_rational(&body[..k])?, imag_coeff(s, &body[k..])?),
        None => (Rational::new(), imag_coeff(s, body)?),
    };
    Ok(QComplex::new(re, im))
}

fn imag_coeff(orig: &str, t: &str) -> Result<Rational, ParseError> {
    match t {
        "" | "+" => Ok(Rational::from(1)),
        "-" => Ok(Rational::from(-1)),
        _ => parse_rational(t).map_err(|e| err(orig, e.reason)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::from((1, 10)));
        assert_eq!(parse_rational("-2.25").unwrap(), Rational::from((-9, 4)));
        assert_eq!(parse_rational("1e-3").unwrap(), Rational::from((1, 1000)));
        assert_eq!(parse_rational("1.5E2").unwrap(), Rational::from(150));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from((1, 2)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn complex_forms() {
        let q = |re: (i64, i64), im: (i64, i64)| QComplex::new(Rational::from(re), Rational::from(im));
        assert_eq!(parse_complex("3").unwrap(), q((3, 1), (0, 1)));
        assert_eq!(parse_complex("-i").unwrap(), q((0, 1), (-1, 1)));
        assert_eq!(parse_complex("2i").unwrap(), q((0, 1), (2, 1)));
        assert_eq!(parse_complex("1.5-0.5i").unwrap(), q((3, 2), (-1, 2)));
        assert_eq!(parse_complex("1e-1+1e+1i").unwrap(), q((1, 10), (10, 1)));
        assert_eq!(parse_complex("-1 + i").unwrap(), q((-1, 1), (1, 1)));
        assert!(parse_complex("1+2k").is_err());
    }
}
