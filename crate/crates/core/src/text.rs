//! Text forms for scalars and polynomials.
//!
//! Complex literal: `<rat>`, `<rat>+<rat>i`, `<rat>-<rat>i` or `<rat>i`, where `<rat>` is an
//! optionally signed `p` or `p/q` in lowest terms with `q > 0`.
//!
//! Polynomial: `+`-separated terms, each a `*`-product of factors; a factor is `xK`, a bare
//! rational, or a parenthesized complex literal. Printing lists terms in ascending word order,
//! so `parse_poly(format_poly(p)) == p`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ncalgebra::{NCPoly, Word};
use crate::scalar::Scalar;

fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("malformed rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let digits = num.strip_prefix(['+', '-']).unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let p: BigInt = num.parse().map_err(|_| err())?;
    let Some(q) = den else {
        return Ok(BigRational::from_integer(p));
    };
    if q.is_empty() || !q.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    if !p.gcd(&q).is_one() && !(p.is_zero() && q.is_one()) {
        return Err(Error::Parse(format!("rational `{s}` is not in lowest terms")));
    }
    Ok(BigRational::new_raw(p, q))
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Scalar::real(parse_rational(s)?));
    };
    // The real/imaginary split is the last sign not in leading position.
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(k, _)| k)
        .last();
    match split {
        Some(k) => {
            let re = parse_rational(&body[..k])?;
            let im_txt = &body[k..];
            if im_txt.len() < 2 || im_txt[1..].starts_with(['+', '-']) {
                return Err(Error::Parse(format!("malformed complex literal `{s}`")));
            }
            Ok(Scalar::new(re, parse_rational(im_txt)?))
        }
        None => Ok(Scalar::new(BigRational::zero(), parse_rational(body)?)),
    }
}

fn split_top_level(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{s}`")));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..k]);
                start = k + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

/// Parse a polynomial over generators `x0..x{n-1}`. The result is not reduced.
pub fn parse_poly(s: &str, n: usize) -> Result<NCPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = NCPoly::zero();
    if compact == "0" {
        return Ok(out);
    }
    for term in split_top_level(&compact, '+')? {
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in `{s}`")));
        }
        let mut coeff = Scalar::one();
        let mut letters = Vec::new();
        for factor in split_top_level(term, '*')? {
            if let Some(idx) = factor.strip_prefix('x') {
                let k: usize = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad generator `{factor}`")))?;
                if k >= n {
                    return Err(Error::Parse(format!("generator `{factor}` out of range for N={n}")));
                }
                letters.push(k);
            } else if let Some(inner) = factor.strip_prefix('(').and_then(|f| f.strip_suffix(')')) {
                coeff = &coeff * &parse_scalar(inner)?;
            } else if let Some(rest) = factor.strip_prefix('-').filter(|r| r.starts_with('x')) {
                coeff = -&coeff;
                let k: usize = rest[1..]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad generator `{factor}`")))?;
                if k >= n {
                    return Err(Error::Parse(format!("generator `{rest}` out of range for N={n}")));
                }
                letters.push(k);
            } else {
                coeff = &coeff * &Scalar::real(parse_rational(factor)?);
            }
        }
        out.add_term(Word::from_indices(&letters), &coeff);
    }
    Ok(out)
}

pub fn format_poly(p: &NCPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (w, c)) in p.terms().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        let letters: Vec<String> = w.letters().map(|l| format!("x{l}")).collect();
        if w.is_empty() {
            out.push_str(&format!("({c})"));
        } else if c.is_one() {
            out.push_str(&letters.join("*"));
        } else {
            out.push_str(&format!("({c})*{}", letters.join("*")));
        }
    }
    out
}

/// Whether a rational is in the canonical form produced by the parser.
pub fn is_canonical(r: &BigRational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_literals() {
        assert_eq!(parse_scalar("1/3+2/5i").unwrap(), Scalar::from_parts((1, 3), (2, 5)));
        assert_eq!(parse_scalar("-7").unwrap(), Scalar::from_int(-7));
        assert_eq!(parse_scalar("0-1/2i").unwrap(), Scalar::from_parts((0, 1), (-1, 2)));
        assert_eq!(parse_scalar("-3/4i").unwrap(), Scalar::from_parts((0, 1), (-3, 4)));
        assert_eq!(parse_scalar("-1-1i").unwrap(), Scalar::from_parts((-1, 1), (-1, 1)));
        for bad in ["", "2/4", "1/0", "1/-2", "abc", "1+i", "1++2i", "i", "1/2/3", "--1"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn poly_syntax() {
        let p = parse_poly("(3/2+1/2i)*x0*x2*x1 + x1 + (-1)", 3).unwrap();
        assert_eq!(p.coeff(&Word::from_indices(&[0, 2, 1])), Scalar::from_parts((3, 2), (1, 2)));
        assert_eq!(p.coeff(&Word::from_indices(&[1])), Scalar::one());
        assert_eq!(p.coeff(&Word::empty()), Scalar::from_int(-1));
        assert_eq!(format_poly(&p), "(-1) + x1 + (3/2+1/2i)*x0*x2*x1");
        assert_eq!(parse_poly("2*x0*x0", 1).unwrap().coeff(&Word::from_indices(&[0, 0])), Scalar::from_int(2));
        assert_eq!(parse_poly("-x0", 1).unwrap().coeff(&Word::letter(0)), Scalar::from_int(-1));
        assert!(parse_poly("x3", 2).is_err());
        assert!(parse_poly("x0 +", 2).is_err());
        assert!(parse_poly("(1", 2).is_err());
        assert!(parse_poly("0", 2).unwrap().is_zero());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| Scalar::from_parts((a, b), (c, d)))
    }

    proptest! {
        #[test]
        fn scalar_round_trip(s in arb_scalar()) {
            prop_assert_eq!(parse_scalar(&s.to_literal()).unwrap(), s.clone());
            prop_assert!(is_canonical(&s.re) && is_canonical(&s.im));
        }

        #[test]
        fn poly_round_trip(terms in proptest::collection::vec((proptest::collection::vec(0usize..3, 0..4), arb_scalar()), 0..6)) {
            let mut p = NCPoly::zero();
            for (w, c) in terms {
                p.add_term(Word::from_indices(&w), &c);
            }
            prop_assert_eq!(parse_poly(&format_poly(&p), 3).unwrap(), p);
        }
    }
}
