//! Euler characteristic criteria for choosing the defining extension non-split.
//!
//! For a pullback bundle `pi^*E` twisted by `D = x sigma + pi^*alpha`, set
//! `m = n + 1` and `y = m x`. The relevant Euler characteristics on the base
//! are those of `E_1 = R^1 pi_* O(-y sigma) (x) E (x) O(-m alpha)` (for
//! `x > 0`), `E_2 = pi_* O(-y sigma) (x) O(-m alpha) (x) E` (for `x < 0`) and
//! `E (x) O(-m alpha)` (for `x = 0`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, DivisorClass};
use crate::scalar::{serde_exact, Scalar};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ChiCoefficients<T> {
    pub y: i64,
    #[serde(rename = "A1", with = "serde_exact")]
    pub a1: T,
    #[serde(rename = "A2", with = "serde_exact")]
    pub a2: T,
    #[serde(rename = "A3", with = "serde_exact")]
    pub a3: T,
    #[serde(rename = "A4", with = "serde_exact")]
    pub a4: T,
}

impl<T: Scalar> ChiCoefficients<T> {
    pub fn new(y: i64) -> Self {
        ChiCoefficients {
            y,
            a1: T::from_frac(-2 + y * (y - 1), 2),
            a2: T::from_frac(6 + y * (y - 1) * (2 * y - 1), 6),
            a3: T::from_frac(y * (y * y - 1), 3),
            a4: T::from_frac(-2 + y * y, 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiCase {
    Xpos,
    Xneg,
    Xzero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ChiValue<T> {
    pub case: ChiCase,
    #[serde(with = "serde_exact")]
    pub chi: T,
    pub integral: bool,
}

/// `y (n - c2(E) + n m^2/2 alpha^2) + A3 n/2 c1^2 - A4 n m alpha.c1`, the `x > 0` expression.
fn chi_e1_body<T: Scalar>(s: &BaseSurface, n: i64, y: i64, alpha: &DivisorClass<T>, c2e: &T) -> Result<T> {
    let m = n + 1;
    let coeffs = ChiCoefficients::<T>::new(y);
    let nt = T::from_i64(n);
    let a_sq = s.square(alpha)?;
    let a_c1 = s.intersect(alpha, &s.c1::<T>())?;
    let bracket = nt.clone() - c2e.clone() + T::from_frac(n * m * m, 2) * a_sq;
    Ok(T::from_i64(y) * bracket + coeffs.a3 * T::from_frac(n, 2) * T::from_i64(s.c1_squared())
        - coeffs.a4 * T::from_i64(n * m) * a_c1)
}

pub fn chi_nonsplit<T: Scalar>(s: &BaseSurface, n: u32, x: i64, alpha: &DivisorClass<T>, c2e: &T) -> Result<ChiValue<T>> {
    let n = n as i64;
    let m = n + 1;
    let y = m * x;
    let (case, chi) = match x.signum() {
        1 => (ChiCase::Xpos, chi_e1_body(s, n, y, alpha, c2e)?),
        -1 => (ChiCase::Xneg, -chi_e1_body(s, n, y, alpha, c2e)?),
        _ => {
            let shifted = alpha.scale(&T::from_i64(m)).sub(&s.c1::<T>())?;
            let chi = T::from_i64(n) - c2e.clone() + T::from_frac(n * m, 2) * s.intersect(alpha, &shifted)?;
            (ChiCase::Xzero, chi)
        }
    };
    let integral = chi.is_integer();
    Ok(ChiValue { case, chi, integral })
}

/// `(2H - z c1).alpha`, whose non-positivity kills `H^2(B, E_1)`.
pub fn vanishing_pairing<T: Scalar>(s: &BaseSurface, alpha: &DivisorClass<T>, h: &DivisorClass<T>, z: &T) -> Result<T> {
    let probe = h.scale(&T::from_i64(2)).sub(&s.c1::<T>().scale(z))?;
    s.intersect(&probe, alpha)
}

pub fn nonsplit_feasible<T: Scalar>(
    s: &BaseSurface,
    n: u32,
    x: i64,
    alpha: &DivisorClass<T>,
    c2e: &T,
    h: &DivisorClass<T>,
    z: &T,
) -> Result<Verdict<T>> {
    let chi = chi_nonsplit(s, n, x, alpha, c2e)?.chi;
    Ok(match x.signum() {
        1 => {
            let pairing = vanishing_pairing(s, alpha, h, z)?;
            if pairing.is_positive() {
                Verdict::new(false, "(2H-zc1)alpha<=0", pairing)
            } else {
                Verdict::new(chi.is_positive(), "chi_E1>0", chi)
            }
        }
        -1 => Verdict::new(chi.is_negative(), "chi_E2<0", chi),
        _ => Verdict::new(chi.is_negative(), "chi<0", chi),
    })
}

/// `(y - 1)(2H - z c1).c1 - m (2H - z c1).alpha`, which must be positive for `x > 0`.
pub fn necessary_mu_value<T: Scalar>(
    s: &BaseSurface,
    m: u32,
    x: i64,
    alpha: &DivisorClass<T>,
    h: &DivisorClass<T>,
    z: &T,
) -> Result<T> {
    if x <= 0 {
        return Err(Error::InvalidInput("the slope condition applies to x > 0".into()));
    }
    let y = m as i64 * x;
    let probe = h.scale(&T::from_i64(2)).sub(&s.c1::<T>().scale(z))?;
    Ok(T::from_i64(y - 1) * s.intersect(&probe, &s.c1::<T>())? - T::from_i64(m as i64) * s.intersect(&probe, alpha)?)
}

pub fn necessary_mu_condition<T: Scalar>(
    s: &BaseSurface,
    m: u32,
    x: i64,
    alpha: &DivisorClass<T>,
    h: &DivisorClass<T>,
    z: &T,
) -> Result<bool> {
    Ok(necessary_mu_value(s, m, x, alpha, h, z)?.is_positive())
}

/// `3/2 (eta - n c1)^2 - m alpha.(eta - n c1)` for an extension of a spectral cover bundle.
pub fn spectral_nonsplit<T: Scalar>(
    s: &BaseSurface,
    n: u32,
    m: u32,
    eta: &DivisorClass<T>,
    alpha: &DivisorClass<T>,
) -> Result<Verdict<T>> {
    let residual = eta.sub(&s.c1::<T>().scale(&T::from_i64(n as i64)))?;
    if !residual.is_zero() && !s.cone_position(&residual)?.effective {
        return Err(Error::SpectralDataInvalid("eta - n c1 must be effective".into()));
    }
    let value = T::from_frac(3, 2) * s.square(&residual)? - T::from_i64(m as i64) * s.intersect(alpha, &residual)?;
    Ok(Verdict::new(value.is_positive(), "3/2(eta-nc1)^2-m*alpha(eta-nc1)>0", value))
}

/// The two closed inequalities for `x > 0` after the `[W] = 0` substitutions
/// with `H = h c1`: `x^2 <= 24/(nm)` and
/// `2n + ((3m^3 + m^2) n x^2/12 + 144/(mx) - 37n/3 - 20) c1^2 > 24`.
pub fn w0_nonsplit_delpezzo<T: Scalar>(n: u32, x: i64, c1sq: i64) -> Result<Verdict<T>> {
    if x <= 0 || n == 0 {
        return Err(Error::InvalidInput("needs x > 0 and n > 0".into()));
    }
    let n = n as i64;
    let m = n + 1;
    let x_sq = T::from_i64(x * x);
    let cap = T::from_frac(24, n * m);
    if x_sq > cap {
        return Ok(Verdict::new(false, "x^2<=24/(nm)", x_sq).with_threshold(cap));
    }
    let bracket = T::from_frac((3 * m * m * m + m * m) * n * x * x, 12) + T::from_frac(144, m * x)
        - T::from_frac(37 * n, 3)
        - T::from_i64(20);
    let value = T::from_i64(2 * n) + bracket * T::from_i64(c1sq);
    let threshold = T::from_i64(24);
    Ok(Verdict::new(value > threshold, "2n+(...)c1^2>24", value).with_threshold(threshold))
}
