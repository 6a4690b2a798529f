//! Exact scalars over the supported ground fields: the rationals, prime
//! fields F_p, and cyclotomic fields Q(zeta_n).
//!
//! Cyclotomic elements are stored as coefficient vectors of length phi(n),
//! reduced modulo the n-th cyclotomic polynomial. Rationals are always kept
//! in lowest terms with a positive denominator (num-rational guarantees
//! this), and prime-field elements as canonical residues in [0, p).

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::matrix::{FieldElem, RingElem};

/// Ground field descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rational,
    Prime(u64),
    Cyclotomic(u32),
}

impl FieldSpec {
    /// Checks the invariants: `p` prime (deterministic Miller-Rabin) and
    /// cyclotomic `n >= 1`.
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Rational => Ok(()),
            FieldSpec::Prime(p) => {
                if is_prime_u64(*p) {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("{p} is not prime")))
                }
            }
            FieldSpec::Cyclotomic(n) => {
                if *n >= 1 {
                    Ok(())
                } else {
                    Err(Error::Validation("cyclotomic index must be >= 1".into()))
                }
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::zero()),
            FieldSpec::Prime(p) => Scalar::Prime { p: *p, val: 0 },
            FieldSpec::Cyclotomic(n) => Scalar::Cyclotomic {
                n: *n,
                coeffs: vec![BigRational::zero(); phi(*n)],
            },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::from(BigInt::from(v))),
            FieldSpec::Prime(p) => {
                let m = v.rem_euclid(*p as i64) as u64;
                Scalar::Prime { p: *p, val: m }
            }
            FieldSpec::Cyclotomic(n) => {
                let mut coeffs = vec![BigRational::zero(); phi(*n)];
                if !coeffs.is_empty() {
                    coeffs[0] = BigRational::from(BigInt::from(v));
                } else {
                    // phi(n) is never 0 for n >= 1
                    unreachable!()
                }
                Scalar::Cyclotomic { n: *n, coeffs }
            }
        }
    }

    /// Primitive n-th root of unity as an element of Q(zeta_n).
    pub fn zeta(&self) -> Result<Scalar> {
        match self {
            FieldSpec::Cyclotomic(n) => Ok(cyclotomic_reduce(
                &[BigRational::zero(), BigRational::one()],
                *n,
            )),
            _ => Err(Error::Other("zeta only exists in cyclotomic fields".into())),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p,
            _ => 0,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "rational"),
            FieldSpec::Prime(p) => write!(f, "prime:{p}"),
            FieldSpec::Cyclotomic(n) => write!(f, "cyclotomic:{n}"),
        }
    }
}

/// An exact field element. The field is carried alongside the value so that
/// mixed-field operations can be rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Prime { p: u64, val: u64 },
    Cyclotomic { n: u32, coeffs: Vec<BigRational> },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rational,
            Scalar::Prime { p, .. } => FieldSpec::Prime(*p),
            Scalar::Cyclotomic { n, .. } => FieldSpec::Cyclotomic(*n),
        }
    }

    fn check_same(&self, other: &Scalar) {
        assert!(
            self.field() == other.field(),
            "field mismatch: {} vs {}",
            self.field(),
            other.field()
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { p, val: a }, Scalar::Prime { val: b, .. }) => Scalar::Prime {
                p: *p,
                val: addmod(*a, *b, *p),
            },
            (Scalar::Cyclotomic { n, coeffs: a }, Scalar::Cyclotomic { coeffs: b, .. }) => {
                Scalar::Cyclotomic {
                    n: *n,
                    coeffs: a.iter().zip(b).map(|(x, y)| x + y).collect(),
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { p, val } => Scalar::Prime {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
            Scalar::Cyclotomic { n, coeffs } => Scalar::Cyclotomic {
                n: *n,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_same(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { p, val: a }, Scalar::Prime { val: b, .. }) => Scalar::Prime {
                p: *p,
                val: mulmod(*a, *b, *p),
            },
            (Scalar::Cyclotomic { n, coeffs: a }, Scalar::Cyclotomic { coeffs: b, .. }) => {
                let mut prod = vec![BigRational::zero(); a.len() + b.len()];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        prod[i + j] += x * y;
                    }
                }
                cyclotomic_reduce(&prod, *n)
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rational(a) => Ok(Scalar::Rational(a.recip())),
            Scalar::Prime { p, val } => Ok(Scalar::Prime {
                p: *p,
                val: invmod(*val, *p)?,
            }),
            Scalar::Cyclotomic { n, coeffs } => {
                let phi_n = coeffs.len();
                let modulus: Vec<BigRational> = cyclotomic_poly(*n)
                    .iter()
                    .map(|c| BigRational::from(c.clone()))
                    .collect();
                let inv = poly_inverse_mod(coeffs, &modulus)?;
                let mut out = inv;
                out.resize(phi_n, BigRational::zero());
                Ok(Scalar::Cyclotomic { n: *n, coeffs: out })
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(a) => a.is_zero(),
            Scalar::Prime { val, .. } => *val == 0,
            Scalar::Cyclotomic { coeffs, .. } => coeffs.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    /// Rational content as a `BigRational`, when the value lies in the prime
    /// field of characteristic zero.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(a) => Some(a),
            _ => None,
        }
    }
}

/// Checked binary field operation; rejects mixed fields and zero divisors.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(
            a.field().to_string(),
            b.field().to_string(),
        ));
    }
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RingElem for Scalar {
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
        Scalar::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
}

impl FieldElem for Scalar {
    fn f_inv(&self) -> Result<Self> {
        self.inv()
    }
}

// ---------------------------------------------------------------------------
// text encoding
// ---------------------------------------------------------------------------

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(a) => write!(f, "{a}"),
            Scalar::Prime { val, .. } => write!(f, "{val}"),
            Scalar::Cyclotomic { coeffs, .. } => {
                write!(f, "[")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Parses the text encoding of a scalar in the given field: `p/q` or `n` for
/// rationals, a decimal residue for prime fields, `[c0,c1,...]` for
/// cyclotomic coefficient vectors. Integer literals are accepted in every
/// field and mapped via the canonical ring map.
pub fn parse_scalar(s: &str, field: &FieldSpec) -> Result<Scalar> {
    let s = s.trim();
    match field {
        FieldSpec::Rational => {
            let r = parse_rational(s)?;
            Ok(Scalar::Rational(r))
        }
        FieldSpec::Prime(p) => {
            let v: i64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime-field residue {s:?}")))?;
            Ok(Scalar::Prime {
                p: *p,
                val: v.rem_euclid(*p as i64) as u64,
            })
        }
        FieldSpec::Cyclotomic(n) => {
            if let Some(body) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                let coeffs: Result<Vec<BigRational>> = if body.trim().is_empty() {
                    Ok(vec![])
                } else {
                    body.split(',').map(|t| parse_rational(t.trim())).collect()
                };
                let coeffs = coeffs?;
                if coeffs.len() > phi(*n) {
                    return Ok(cyclotomic_reduce(&coeffs, *n));
                }
                let mut out = coeffs;
                out.resize(phi(*n), BigRational::zero());
                Ok(Scalar::Cyclotomic { n: *n, coeffs: out })
            } else {
                // plain integer / rational literal embeds along the unit
                let r = parse_rational(s)?;
                let mut coeffs = vec![BigRational::zero(); phi(*n)];
                coeffs[0] = r;
                Ok(Scalar::Cyclotomic { n: *n, coeffs })
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

// ---------------------------------------------------------------------------
// cyclotomic polynomials
// ---------------------------------------------------------------------------

static CYCLO_CACHE: Lazy<Mutex<HashMap<u32, Vec<BigInt>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients of the n-th cyclotomic polynomial, ascending degree, monic.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    if let Some(p) = CYCLO_CACHE.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_div_exact_int(&num, &phi_d);
        }
    }
    CYCLO_CACHE.lock().unwrap().insert(n, num.clone());
    num
}

/// Euler phi via the degree of the cyclotomic polynomial.
pub fn phi(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// Reduces an integer/rational polynomial modulo Phi_n; output is a scalar
/// with exactly phi(n) coefficients.
pub fn cyclotomic_reduce(coeffs: &[BigRational], n: u32) -> Scalar {
    let modulus: Vec<BigRational> = cyclotomic_poly(n)
        .iter()
        .map(|c| BigRational::from(c.clone()))
        .collect();
    let mut rem: Vec<BigRational> = coeffs.to_vec();
    trim_poly(&mut rem);
    let d = modulus.len() - 1;
    while rem.len() > d {
        let k = rem.len() - 1 - d;
        let lead = rem.last().unwrap().clone();
        if !lead.is_zero() {
            for (i, m) in modulus.iter().enumerate() {
                let t = &lead * m;
                rem[k + i] -= t;
            }
        }
        rem.pop();
        trim_poly(&mut rem);
        if rem.len() <= d {
            break;
        }
    }
    rem.resize(phi(n), BigRational::zero());
    Scalar::Cyclotomic { n, coeffs: rem }
}

fn trim_poly(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

/// Exact division of integer polynomials (ascending coefficients); panics if
/// the division is not exact. Only used with cyclotomic factors, where
/// exactness is guaranteed.
fn poly_div_exact_int(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let dn = rem.len() - 1;
    assert!(dn >= dd);
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..quot.len()).rev() {
        let lead = rem[k + dd].clone();
        // cyclotomic polynomials are monic
        quot[k] = lead.clone();
        if !lead.is_zero() {
            for (i, d) in den.iter().enumerate() {
                let t = &lead * d;
                rem[k + i] -= t;
            }
        }
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "non-exact polynomial division"
    );
    quot
}

/// Inverse of `a` modulo the monic polynomial `m` over Q, via the extended
/// Euclidean algorithm.
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Result<Vec<BigRational>> {
    // invariant: r0 = s0 * a (mod m), r1 = s1 * a (mod m)
    let mut r0: Vec<BigRational> = m.to_vec();
    let mut r1: Vec<BigRational> = a.to_vec();
    trim_poly(&mut r1);
    let mut s0: Vec<BigRational> = vec![BigRational::zero()];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 = gcd; must be a nonzero constant since the modulus is irreducible
    if r0.len() != 1 || r0[0].is_zero() {
        return Err(Error::NotInvertible);
    }
    let c = r0[0].recip();
    Ok(s0.iter().map(|x| x * &c).collect())
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    trim_poly(&mut rem);
    let mut d = den.to_vec();
    trim_poly(&mut d);
    let dd = d.len() - 1;
    if rem.len() - 1 < dd || (rem.len() == 1 && rem[0].is_zero()) {
        return (vec![BigRational::zero()], rem);
    }
    let lead_inv = d.last().unwrap().recip();
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dd] * &lead_inv;
        quot[k] = c.clone();
        if !c.is_zero() {
            for (i, di) in d.iter().enumerate() {
                let t = &c * di;
                rem[k + i] -= t;
            }
        }
    }
    trim_poly(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_poly(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim_poly(&mut out);
    out
}

// ---------------------------------------------------------------------------
// modular arithmetic
// ---------------------------------------------------------------------------

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(powmod(a, p - 2, p))
}

/// Deterministic Miller-Rabin for u64 (the standard 12-base witness set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        parse_scalar(s, &FieldSpec::Rational).unwrap()
    }

    #[test]
    fn rational_add() {
        assert_eq!(q("1/2").add(&q("1/3")), q("5/6"));
    }

    #[test]
    fn char_two() {
        let f = FieldSpec::Prime(2);
        let one = f.one();
        assert!(one.add(&one).is_zero());
    }

    #[test]
    fn zeta4_squares_to_minus_one() {
        let f = FieldSpec::Cyclotomic(4);
        let z = f.zeta().unwrap();
        assert_eq!(z.mul(&z), f.from_i64(-1));
        // coefficient vector is (-1, 0)
        assert_eq!(z.mul(&z).to_string(), "[-1,0]");
    }

    #[test]
    fn zeta5_fourth_power() {
        // zeta^4 = -1 - z - z^2 - z^3 under Phi_5
        let s = cyclotomic_reduce(
            &[
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::one(),
            ],
            5,
        );
        assert_eq!(s.to_string(), "[-1,-1,-1,-1]");
    }

    #[test]
    fn cyclotomic_n1_evaluates_at_one() {
        // n = 1: phi(1) = 1 and zeta = 1; any polynomial collapses to its value at 1
        let s = cyclotomic_reduce(
            &[
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(3)),
                BigRational::from(BigInt::from(4)),
            ],
            1,
        );
        assert_eq!(s, FieldSpec::Cyclotomic(1).from_i64(9));
    }

    #[test]
    fn zeta_n_to_the_n_is_one() {
        for n in 1..=12u32 {
            let f = FieldSpec::Cyclotomic(n);
            let z = f.zeta().unwrap();
            let mut acc = f.one();
            for _ in 0..n {
                acc = acc.mul(&z);
            }
            assert_eq!(acc, f.one(), "zeta_{n}^{n} != 1");
        }
    }

    #[test]
    fn cyclotomic_inverse() {
        let f = FieldSpec::Cyclotomic(5);
        let z = f.zeta().unwrap();
        let a = z.add(&f.from_i64(2));
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), f.one());
    }

    #[test]
    fn field_mismatch_rejected() {
        let a = FieldSpec::Rational.one();
        let b = FieldSpec::Prime(2).one();
        assert!(scalar_arith(&a, &b, ArithOp::Add).is_err());
    }

    #[test]
    fn division_by_zero_rejected() {
        let f = FieldSpec::Prime(5);
        assert!(matches!(
            scalar_arith(&f.one(), &f.zero(), ArithOp::Div),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(91));
    }

    #[test]
    fn scalar_text_round_trip() {
        for (s, f) in [
            ("5/6", FieldSpec::Rational),
            ("-3", FieldSpec::Rational),
            ("4", FieldSpec::Prime(7)),
            ("[1/2,-1,0,3]", FieldSpec::Cyclotomic(5)),
        ] {
            let v = parse_scalar(s, &f).unwrap();
            let v2 = parse_scalar(&v.to_string(), &f).unwrap();
            assert_eq!(v, v2);
        }
    }
}
