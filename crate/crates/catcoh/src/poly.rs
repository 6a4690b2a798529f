//! Truncated polynomial (jet) arithmetic: elements of K[e]/<e^N>, used to
//! verify deformations order by order.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::RingElem;
use crate::scalar::{parse_scalar, FieldSpec, Scalar};

/// A polynomial in the deformation parameter, truncated at order `N` (so it
/// carries exactly `N` coefficients c_0 .. c_{N-1} and e^N = 0).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPoly {
    pub coeffs: Vec<Scalar>,
}

impl TruncatedPoly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedPoly { coeffs }
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        let zero = c.field().zero();
        let mut coeffs = vec![zero; order];
        coeffs[0] = c;
        TruncatedPoly { coeffs }
    }

    pub fn zero(field: &FieldSpec, order: usize) -> Self {
        TruncatedPoly {
            coeffs: vec![field.zero(); order],
        }
    }

    /// The monomial c * e^k, truncated at `order`.
    pub fn monomial(c: Scalar, k: usize, order: usize) -> Self {
        let mut out = Self::zero(&c.field(), order);
        if k < order {
            out.coeffs[k] = c;
        }
        out
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.coeffs[0].field()
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.order(), o.order(), "truncation order mismatch");
        assert_eq!(self.field(), o.field(), "field mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        TruncatedPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        TruncatedPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedPoly {
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let n = self.order();
        let zero = self.coeffs[0].field().zero();
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TruncatedPoly { coeffs: out }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.order();
        let c0_inv = self.coeffs[0].inv()?;
        let zero = self.field().zero();
        let mut out = vec![zero; n];
        out[0] = c0_inv.clone();
        // out[k] = -c0^{-1} * sum_{i=1..k} coeffs[i] * out[k-i]
        for k in 1..n {
            let mut acc = self.field().zero();
            for i in 1..=k {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out[k] = acc.neg().mul(&c0_inv);
        }
        Ok(TruncatedPoly { coeffs: out })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl RingElem for TruncatedPoly {
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_neg(&self) -> Self {
        self.neg()
    }
    fn is_zero(&self) -> bool {
        TruncatedPoly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        TruncatedPoly::zero(&self.field(), self.order())
    }
    fn one_like(&self) -> Self {
        TruncatedPoly::constant(self.field().one(), self.order())
    }
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*e")?,
                _ => write!(f, "{c}*e^{k}")?,
            }
        }
        Ok(())
    }
}

/// Parses `c0 + c1*e + c2*e^2 + ...`; missing powers are zero.
pub fn parse_poly(s: &str, field: &FieldSpec, order: usize) -> Result<TruncatedPoly> {
    let mut out = TruncatedPoly::zero(field, order);
    // split on '+' at bracket depth 0
    let mut terms: Vec<String> = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' if depth == 0 => {
                terms.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push(cur.trim().to_string());
    }
    for t in terms {
        let (coeff_str, power) = if let Some((c, e)) = t.split_once('*') {
            let e = e.trim();
            let power = if e == "e" {
                1
            } else if let Some(p) = e.strip_prefix("e^") {
                p.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad power in {t:?}")))?
            } else {
                return Err(Error::Parse(format!("bad term {t:?}")));
            };
            (c.trim(), power)
        } else {
            (t.as_str(), 0)
        };
        if power >= order {
            return Err(Error::Parse(format!(
                "term {t:?} exceeds truncation order {order}"
            )));
        }
        let c = parse_scalar(coeff_str, field)?;
        out.coeffs[power] = out.coeffs[power].add(&c);
    }
    Ok(out)
}

/// Checked binary operation on truncated polynomials.
pub fn poly_arith(a: &TruncatedPoly, b: &TruncatedPoly, op: PolyOp) -> Result<TruncatedPoly> {
    if a.order() != b.order() {
        return Err(Error::Dimension("truncation order mismatch".into()));
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(
            a.field().to_string(),
            b.field().to_string(),
        ));
    }
    match op {
        PolyOp::Add => Ok(a.add(b)),
        PolyOp::Mul => Ok(a.mul(b)),
    }
}

#[derive(Clone, Copy, Debug)]
pub enum PolyOp {
    Add,
    Mul,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_squared_vanishes() {
        let f = FieldSpec::Rational;
        // order 2: (1 + e)(1 - e) = 1
        let a = parse_poly("1 + 1*e", &f, 2).unwrap();
        let b = parse_poly("1 + -1*e", &f, 2).unwrap();
        assert_eq!(a.mul(&b), TruncatedPoly::constant(f.one(), 2));
        // e * e = 0 at order 2
        let e = TruncatedPoly::monomial(f.one(), 1, 2);
        assert!(e.mul(&e).is_zero());
    }

    #[test]
    fn geometric_inverse() {
        let f = FieldSpec::Rational;
        let a = parse_poly("1 + 1*e", &f, 3).unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(inv, parse_poly("1 + -1*e + 1*e^2", &f, 3).unwrap());
        assert_eq!(a.mul(&inv), TruncatedPoly::constant(f.one(), 3));
    }

    #[test]
    fn non_invertible() {
        let f = FieldSpec::Rational;
        let e = TruncatedPoly::monomial(f.one(), 1, 2);
        assert!(e.invert().is_err());
    }

    #[test]
    fn display_round_trip() {
        let f = FieldSpec::Cyclotomic(4);
        let a = TruncatedPoly::new(vec![f.one(), f.zeta().unwrap(), f.from_i64(-2)]);
        let s = a.to_string();
        let b = parse_poly(&s, &f, 3).unwrap();
        assert_eq!(a, b);
    }
}
