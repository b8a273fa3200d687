//! The anomaly class `[W] = c2(X) - c2(V) = sigma pi^*w_B + a_f F`.

use serde::Serialize;

use crate::bundle::BundleSpec;
use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, DivisorClass};
use crate::ring::{c2_tangent, DivisorX};
use crate::scalar::{serde_exact, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AnomalyOutcome<T> {
    #[serde(rename = "wB")]
    pub w_b: DivisorClass<T>,
    #[serde(with = "serde_exact")]
    pub af: T,
    #[serde(rename = "W_zero")]
    pub w_zero: bool,
    #[serde(rename = "W_effective")]
    pub w_effective: bool,
}

pub fn anomaly_class<T: Scalar>(s: &BaseSurface, bundle: &BundleSpec<T>) -> Result<AnomalyOutcome<T>> {
    anomaly_class_bounded(s, bundle, crate::lattice::DEFAULT_BOUND)
}

pub fn anomaly_class_bounded<T: Scalar>(s: &BaseSurface, bundle: &BundleSpec<T>, bound: i64) -> Result<AnomalyOutcome<T>> {
    bundle.validate(s)?;
    let w = c2_tangent::<T>(s).sub(&bundle.c2_total(s)?)?;
    let w_zero = w.beta.is_zero() && w.fiber.is_zero();
    let base_effective = w.beta.is_zero() || s.cone_position_bounded(&w.beta, bound)?.effective;
    Ok(AnomalyOutcome {
        w_zero,
        w_effective: base_effective && !w.fiber.is_negative(),
        w_b: w.beta,
        af: w.fiber,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AlphaSolution<T> {
    pub alpha: DivisorClass<T>,
    /// `alpha` as a multiple of `c1`.
    #[serde(with = "serde_exact")]
    pub multiple: T,
    pub integral: bool,
}

/// `alpha = (x^2/2 - 12/(n(n+1))) c1 / x`, the twist with `w_B = 0`.
pub fn solve_alpha_zero<T: Scalar>(s: &BaseSurface, n: u32, x: i64) -> Result<AlphaSolution<T>> {
    if s.is_enriques() {
        return Err(Error::UnsupportedSurface("w_B = 0 with x != 0 needs a non-torsion c1".into()));
    }
    if x == 0 || n == 0 {
        return Err(Error::InvalidInput("needs x != 0 and n > 0".into()));
    }
    let n = n as i64;
    let multiple = (T::from_frac(x * x, 2) - T::from_frac(12, n * (n + 1))) / T::from_i64(x);
    let alpha = s.c1::<T>().scale(&multiple);
    Ok(AlphaSolution { integral: alpha.is_integral(), alpha, multiple })
}

/// `c2(E) = c2 + 11 c1^2 + n(n+1)/2 alpha^2`, the value with `a_f = 0`.
pub fn solve_c2e_zero<T: Scalar>(s: &BaseSurface, n: u32, alpha: &DivisorClass<T>) -> Result<i64> {
    let n = n as i64;
    let v = T::from_i64(s.c2 + 11 * s.c1_squared()) + T::from_frac(n * (n + 1), 2) * s.square(alpha)?;
    v.to_i64_exact().ok_or_else(|| Error::NonIntegral(format!("c2(E) = {v}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SpectralAf<T> {
    #[serde(with = "serde_exact")]
    pub af_direct: T,
    #[serde(with = "serde_exact::option")]
    pub af_displayed: Option<T>,
    pub agree: bool,
}

/// The closed expression
/// `c2 + c1^2 (11 + (n^3-n)/24 - 1/2 (lambda^2 - 1/4)(12-n) n) + n(n+1)/2 alpha^2`,
/// only meaningful for `eta = 12 c1`.
pub fn spectral_af_displayed<T: Scalar>(
    s: &BaseSurface,
    n: u32,
    lambda: &T,
    alpha: &DivisorClass<T>,
    eta: &DivisorClass<T>,
) -> Result<T> {
    if *eta != s.c1::<T>().scale(&T::from_i64(12)) {
        return Err(Error::DisplayAssumesEta);
    }
    let n = n as i64;
    let twist = T::from_frac(1, 2) * (lambda.clone() * lambda.clone() - T::from_frac(1, 4)) * T::from_i64((12 - n) * n);
    let bracket = T::from_i64(11) + T::from_frac(n * n * n - n, 24) - twist;
    Ok(T::from_i64(s.c2) + T::from_i64(s.c1_squared()) * bracket + T::from_frac(n * (n + 1), 2) * s.square(alpha)?)
}

/// `a_f` of an extension of `O(n pi^*alpha)` by a spectral bundle, computed
/// through the ring, alongside the closed expression when `eta = 12 c1`.
pub fn spectral_af<T: Scalar>(
    s: &BaseSurface,
    n: u32,
    lambda: &T,
    alpha: &DivisorClass<T>,
    eta: &DivisorClass<T>,
) -> Result<SpectralAf<T>> {
    let spec = BundleSpec::spectral(n, eta.clone(), lambda.clone(), DivisorX::pullback(alpha.clone()));
    spec.validate(s)?;
    let af_direct = c2_tangent::<T>(s).fiber - spec.c2_total(s)?.fiber;
    let af_displayed = match spectral_af_displayed(s, n, lambda, alpha, eta) {
        Ok(v) => Some(v),
        Err(Error::DisplayAssumesEta) => None,
        Err(e) => return Err(e),
    };
    let agree = af_displayed.as_ref() == Some(&af_direct);
    Ok(SpectralAf { af_direct, af_displayed, agree })
}
