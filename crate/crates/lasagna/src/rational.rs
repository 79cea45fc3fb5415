use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qzero() -> Q {
    Q::zero()
}

pub fn qone() -> Q {
    Q::one()
}

/// Prints a doubled integer `x2` as `x2/2`: plain integer when even, `p/2` otherwise.
pub fn half(x2: i64) -> String {
    if x2 % 2 == 0 {
        format!("{}", x2 / 2)
    } else {
        format!("{}/2", x2)
    }
}

/// Inverse of [`half`]; accepts integers, `p/2` fractions and `.5` decimals.
pub fn parse_half(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Some((p, d)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        return match d {
            1 => Some(2 * p),
            2 => Some(p),
            _ => None,
        };
    }
    if let Some(stripped) = s.strip_suffix(".5") {
        let neg = stripped.starts_with('-');
        let n: i64 = stripped.parse().ok()?;
        return Some(if neg { 2 * n - 1 } else { 2 * n + 1 });
    }
    let n: i64 = s.parse().ok()?;
    Some(2 * n)
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_unit_sign(x: &Q) -> bool {
    x.is_integer() && x.abs().is_one()
}


/// Exact nonnegative square root, if x is the square of a rational.
pub fn sqrt_exact(x: &Q) -> Option<Q> {
    use num_traits::Signed;
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}
