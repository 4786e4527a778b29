//! Parser for the textual Laurent polynomial format the toolkit prints:
//! signed monomial terms like `z^-1*w^-1 - z^-1 - 6 - w + 2*z*w`.

use num::BigInt;
use tilingforge_core::LaurentPoly2;

pub fn parse_poly(input: &str) -> Result<LaurentPoly2, String> {
    let mut poly = LaurentPoly2::zero();
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        match ch {
            '+' | '-' if i > 0 && !cur.ends_with('^') && !cur.is_empty() => {
                terms.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if cur.is_empty() => sign = -sign,
            '+' if cur.is_empty() => {}
            _ => cur.push(ch),
        }
    }
    if cur.is_empty() {
        return Err("dangling sign".into());
    }
    terms.push((sign, cur));

    for (sign, term) in terms {
        let mut coeff: i64 = 1;
        let mut a: i64 = 0;
        let mut b: i64 = 0;
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(format!("empty factor in `{}`", term));
            }
            if let Some(rest) = factor.strip_prefix('z') {
                a += parse_exponent(rest)?;
            } else if let Some(rest) = factor.strip_prefix('w') {
                b += parse_exponent(rest)?;
            } else {
                coeff = coeff
                    .checked_mul(
                        factor
                            .parse::<i64>()
                            .map_err(|_| format!("bad factor `{}`", factor))?,
                    )
                    .ok_or("coefficient overflow")?;
            }
        }
        poly.add_term((a, b), BigInt::from(sign * coeff));
    }
    Ok(poly)
}

fn parse_exponent(rest: &str) -> Result<i64, String> {
    if rest.is_empty() {
        return Ok(1);
    }
    let Some(exp) = rest.strip_prefix('^') else {
        return Err(format!("expected `^` in exponent `{}`", rest));
    };
    exp.parse::<i64>()
        .map_err(|_| format!("bad exponent `{}`", exp))
}

#[cfg(test)]
mod tests {
    use super::parse_poly;

    #[test]
    fn roundtrips_printed_polynomials() {
        for text in [
            "1 + w + z",
            "z^-1*w^-1 - z^-1 - w^-1 - 6 - w - z + z*w",
            "-3 + 2*z^2*w^-3",
        ] {
            let p = parse_poly(text).unwrap();
            assert_eq!(p.to_string(), text);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("q^2").is_err());
        assert!(parse_poly("z^").is_err());
        assert!(parse_poly("1 +").is_err());
    }
}
