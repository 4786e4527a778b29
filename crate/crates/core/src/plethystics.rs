//! Truncated power series with exact rational coefficients, and the
//! plethystic exponential / logarithm pair.
//!
//! PE[f] = exp(Σ_{n≥1} (f(tⁿ) − f(0))/n) with the Euler-product form
//! Π (1−tⁿ)^{−aₙ} as an independent route; PE⁻¹[g] = Σ μ(k)/k · log g(tᵏ).
//! Applied to a Hilbert series, positive coefficients of PE⁻¹ count
//! generators and negative ones relations.

use num::{BigRational, One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("denominator has zero constant term")]
    DivisionByZeroConstant,
    #[error("series must have constant term 1, found {0}")]
    UnitConstant(String),
}

/// Power series truncated at a fixed order, exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    pub fn from_coeffs(order: usize, coeffs: &[BigRational]) -> Self {
        let mut s = Self::zero(order);
        for (i, c) in coeffs.iter().take(order + 1).enumerate() {
            s.coeffs[i] = c.clone();
        }
        s
    }

    /// c·t^k.
    pub fn monomial(order: usize, c: BigRational, k: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if self.coeff(i).is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                let prod = self.coeff(i) * other.coeff(j);
                coeffs[i + j] += prod;
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Series division; the divisor needs a unit constant term.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        if other.coeff(0).is_zero() {
            return Err(SeriesError::DivisionByZeroConstant);
        }
        let n = self.order().min(other.order());
        let inv0 = BigRational::one() / other.coeff(0);
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for k in 0..=n {
            let mut acc = self.coeff(k);
            for (j, prior) in coeffs.iter().enumerate().take(k) {
                let sub = prior * other.coeff(k - j);
                acc -= sub;
            }
            coeffs[k] = acc * &inv0;
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Substitute t -> tᵏ.
    pub fn compose_power(&self, k: usize) -> Self {
        let mut s = Self::zero(self.order());
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(slot) = i.checked_mul(k).filter(|&d| d <= self.order()) {
                s.coeffs[slot] = c.clone();
            }
        }
        s
    }

    /// exp of a series with zero constant term.
    pub fn exp(&self) -> Self {
        assert!(self.coeff(0).is_zero(), "exp needs zero constant term");
        let n = self.order();
        let mut acc = Self::one(n);
        let mut power = Self::one(n);
        let mut factorial = BigRational::one();
        for k in 1..=n {
            power = power.mul(self);
            factorial *= BigRational::from_integer(k.into());
            acc = acc.add(&power.scale(&(BigRational::one() / &factorial)));
            if power.is_zero() {
                break;
            }
        }
        acc
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.coeff(0) != BigRational::one() {
            return Err(SeriesError::UnitConstant(self.coeff(0).to_string()));
        }
        let n = self.order();
        let x = self.sub(&Self::one(n)); // zero constant term
        let mut acc = Self::zero(n);
        let mut power = Self::one(n);
        for k in 1..=n {
            power = power.mul(&x);
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            acc = acc.add(&power.scale(&(sign / BigRational::from_integer(k.into()))));
        }
        Ok(acc)
    }

    /// (1 - tᵏ)^exponent for a rational exponent, via the binomial series.
    pub fn one_minus_power(order: usize, k: usize, exponent: &BigRational) -> Self {
        // (1 - x)^e = Σ_j (-1)^j C(e, j) x^j with x = t^k.
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        if k == 0 {
            return s;
        }
        let mut binom = BigRational::one();
        let mut j = 0usize;
        loop {
            j += 1;
            let Some(slot) = j.checked_mul(k).filter(|&d| d <= order) else {
                break;
            };
            // C(e, j) = C(e, j-1) * (e - j + 1) / j
            let step = (exponent - BigRational::from_integer((j as i64 - 1).into()))
                / BigRational::from_integer((j as i64).into());
            binom *= step;
            let signed = if j % 2 == 1 {
                -binom.clone()
            } else {
                binom.clone()
            };
            s.coeffs[slot] = signed;
        }
        s
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                if c.is_negative() {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            wrote = true;
            let mag = c.abs();
            match k {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", mag)?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{}", k)?;
                    }
                }
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

/// Power-series expansion of numer(t)/denom(t) to order `n`.
pub fn series_from_rational(
    numer: &[BigRational],
    denom: &[BigRational],
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let num = TruncatedSeries::from_coeffs(n, numer);
    let den = TruncatedSeries::from_coeffs(n, denom);
    if den.coeff(0).is_zero() {
        return Err(SeriesError::DivisionByZeroConstant);
    }
    num.div(&den)
}

/// Möbius function: 0 on repeated prime factors, (−1)^#primes otherwise.
pub fn mobius(k: u64) -> i64 {
    assert!(k >= 1);
    let mut k = k;
    let mut primes = 0;
    let mut p = 2;
    while p * p <= k {
        if k.is_multiple_of(p) {
            k /= p;
            if k.is_multiple_of(p) {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if k > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Plethystic exponential: exp(Σ_{n≥1} (f(tⁿ) − f(0))/n). The constant
/// term of `f` is discarded, so PE[f](0) = 1.
pub fn pe(f: &TruncatedSeries) -> TruncatedSeries {
    let n = f.order();
    let mut f0 = f.clone();
    f0 = f0.sub(&TruncatedSeries::monomial(n, f.coeff(0), 0));
    let mut arg = TruncatedSeries::zero(n);
    for k in 1..=n {
        let scaled = f0
            .compose_power(k)
            .scale(&(BigRational::one() / BigRational::from_integer((k as i64).into())));
        arg = arg.add(&scaled);
    }
    arg.exp()
}

/// PE by the Euler product Π (1−tⁿ)^{−aₙ}; an independent route used to
/// cross-check [`pe`].
pub fn pe_euler_product(f: &TruncatedSeries) -> TruncatedSeries {
    let n = f.order();
    let mut acc = TruncatedSeries::one(n);
    for k in 1..=n {
        let a = f.coeff(k);
        if a.is_zero() {
            continue;
        }
        acc = acc.mul(&TruncatedSeries::one_minus_power(n, k, &(-a)));
    }
    acc
}

/// Plethystic logarithm: Σ_{k≥1} μ(k)/k · log g(tᵏ). Requires g(0) = 1.
pub fn pl(g: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if g.coeff(0) != BigRational::one() {
        return Err(SeriesError::UnitConstant(g.coeff(0).to_string()));
    }
    let n = g.order();
    let log_g = g.log()?;
    let mut acc = TruncatedSeries::zero(n);
    for k in 1..=n {
        let mu = mobius(k as u64);
        if mu == 0 {
            continue;
        }
        let weight =
            BigRational::from_integer(mu.into()) / BigRational::from_integer((k as i64).into());
        acc = acc.add(&log_g.compose_power(k).scale(&weight));
    }
    Ok(acc)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| integer(x)).collect()
    }

    #[test]
    fn conifold_hilbert_series() {
        // (1 - t^2) / (1 - t)^4 = sum (n+1)^2 t^n
        let s = series_from_rational(&ints(&[1, 0, -1]), &ints(&[1, -4, 6, -4, 1]), 6).unwrap();
        let expected: Vec<BigRational> = (0..=6).map(|n: i64| integer((n + 1) * (n + 1))).collect();
        assert_eq!(s.coeffs(), &expected[..]);
    }

    #[test]
    fn geometric_series() {
        let s = series_from_rational(&ints(&[1]), &ints(&[1, -1]), 8).unwrap();
        assert!(s.coeffs().iter().all(|c| c.is_one()));
        assert_eq!(
            series_from_rational(&ints(&[1]), &ints(&[0, 1]), 4),
            Err(SeriesError::DivisionByZeroConstant)
        );
    }

    #[test]
    fn pe_of_t_is_geometric() {
        let f = TruncatedSeries::monomial(8, integer(1), 1);
        let g = pe(&f);
        assert!(g.coeffs().iter().all(|c| c.is_one()));
    }

    #[test]
    fn pe_of_three_t() {
        // Three free generators: 1/(1-t)^3.
        let f = TruncatedSeries::monomial(4, integer(3), 1);
        let g = pe(&f);
        assert_eq!(g.coeffs(), &ints(&[1, 3, 6, 10, 15])[..]);
    }

    #[test]
    fn pe_of_zero_is_one() {
        let z = TruncatedSeries::zero(5);
        assert_eq!(pe(&z), TruncatedSeries::one(5));
    }

    #[test]
    fn pe_routes_agree() {
        let f = TruncatedSeries::from_coeffs(
            10,
            &[
                integer(0),
                rational(3, 2),
                integer(-1),
                rational(5, 7),
                integer(2),
            ],
        );
        assert_eq!(pe(&f), pe_euler_product(&f));
    }

    #[test]
    fn conifold_plog_terminates() {
        let h = series_from_rational(&ints(&[1, 0, -1]), &ints(&[1, -4, 6, -4, 1]), 30).unwrap();
        let p = pl(&h).unwrap();
        assert_eq!(p.coeff(1), integer(4));
        assert_eq!(p.coeff(2), integer(-1));
        for k in 3..=30 {
            assert!(p.coeff(k).is_zero(), "degree {} should vanish", k);
        }
    }

    #[test]
    fn plog_of_free_c3() {
        let h = series_from_rational(&ints(&[1]), &ints(&[1, -3, 3, -1]), 12).unwrap();
        let p = pl(&h).unwrap();
        assert_eq!(p.coeff(1), integer(3));
        for k in 2..=12 {
            assert!(p.coeff(k).is_zero());
        }
    }

    #[test]
    fn pl_of_one_is_zero() {
        assert!(pl(&TruncatedSeries::one(10)).unwrap().is_zero());
        assert!(matches!(
            pl(&TruncatedSeries::monomial(4, integer(2), 0)),
            Err(SeriesError::UnitConstant(_))
        ));
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(4), 0);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(7), -1);
    }

    #[test]
    fn roundtrips() {
        let f = TruncatedSeries::from_coeffs(
            12,
            &[
                integer(0),
                integer(2),
                rational(-1, 3),
                integer(5),
                rational(7, 2),
            ],
        );
        assert_eq!(pl(&pe(&f)).unwrap(), f);
        let g = pe(&f);
        assert_eq!(pe(&pl(&g).unwrap()), g);
    }
}
