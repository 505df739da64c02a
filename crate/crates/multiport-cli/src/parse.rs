//! Parsers for the numeric literals the CLI accepts: plain floats, small
//! rationals like `1/9`, and complex literals like `0.5-0.866i`.

use num_complex::Complex64;

pub fn parse_number(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in '{raw}'"))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in '{raw}'"))?;
        if den == 0.0 {
            return Err(format!("zero denominator in '{raw}'"));
        }
        return Ok(num / den);
    }
    s.parse().map_err(|_| format!("bad number '{raw}'"))
}

pub fn parse_number_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',').map(parse_number).collect()
}

pub fn parse_occupations(raw: &str) -> Result<Vec<usize>, String> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad occupation count '{s}'"))
        })
        .collect()
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, with `i` and `-i` as shorthands and
/// exponent notation allowed in both parts.
pub fn parse_complex(raw: &str) -> Result<Complex64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if !s.ends_with('i') && !s.ends_with('I') {
        return Ok(Complex64::new(
            s.parse().map_err(|_| format!("bad complex literal '{raw}'"))?,
            0.0,
        ));
    }
    let body = &s[..s.len() - 1];
    // Find the split between real and imaginary parts: the last sign that
    // is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let b = bytes[idx];
        if (b == b'+' || b == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let re: f64 = if re_part.is_empty() {
        0.0
    } else {
        re_part
            .parse()
            .map_err(|_| format!("bad real part in '{raw}'"))?
    };
    let im: f64 = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse()
            .map_err(|_| format!("bad imaginary part in '{raw}'"))?,
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_complex_list(raw: &str) -> Result<Vec<Complex64>, String> {
    raw.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_rationals() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number(" 2 / 9 ").unwrap(), 2.0 / 9.0);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("0.5-0.866i").unwrap(),
            Complex64::new(0.5, -0.866)
        );
        assert_eq!(
            parse_complex("1e-3+2e-4i").unwrap(),
            Complex64::new(1e-3, 2e-4)
        );
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn occupation_lists() {
        assert_eq!(parse_occupations("2,0,0").unwrap(), vec![2, 0, 0]);
        assert!(parse_occupations("2,-1").is_err());
    }
}
