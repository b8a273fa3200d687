//! Chern classes of the extension bundles.
//!
//! All bundles here are extensions
//!
//! ```text
//! 0 -> U (x) O(-qD) -> V -> W (x) O(pD) -> 0
//! ```
//!
//! with `c1(U) = c1(W) = 0`. The two specialisations used for model building
//! take `W = O_X` and `U` either a pullback `pi^*E` or a spectral cover bundle
//! `V_n`, so `(p, q) = (n, 1)` and `V` has rank `n + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, DivisorClass};
use crate::ring::{divisor_square, pair_four_two, triple_product, DivisorX, FourClass};
use crate::scalar::{serde_exact, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "T: Scalar")]
pub enum BundleVariant<T> {
    /// `pi^*E` for a rank `n` bundle `E` on the base with `c1(E) = 0`.
    Pullback {
        n: u32,
        #[serde(rename = "c2E", serialize_with = "serde_exact::serialize_compact", deserialize_with = "serde_exact::deserialize")]
        c2e: T,
    },
    /// Spectral cover bundle of rank `n` on `|n sigma + pi^*eta|` with twist `lambda`.
    Spectral {
        n: u32,
        eta: DivisorClass<T>,
        #[serde(with = "serde_exact")]
        lambda: T,
    },
    GenericPair {
        p: u32,
        q: u32,
        #[serde(rename = "c2U")]
        c2u: FourClass<T>,
        #[serde(rename = "c2W")]
        c2w: FourClass<T>,
        #[serde(rename = "c3U", with = "serde_exact")]
        c3u: T,
        #[serde(rename = "c3W", with = "serde_exact")]
        c3w: T,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BundleSpec<T> {
    #[serde(flatten)]
    pub variant: BundleVariant<T>,
    /// The divisor `D` of the defining extension.
    pub twist: DivisorX<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ExtensionChern<T> {
    pub c2: FourClass<T>,
    #[serde(with = "serde_exact")]
    pub c3: T,
    pub integral: bool,
}

/// `c2(V)` and `c3(V)` of an extension of `W (x) O(pD)` by `U (x) O(-qD)`.
#[allow(clippy::too_many_arguments)]
pub fn chern_extension<T: Scalar>(
    s: &BaseSurface,
    p: u32,
    q: u32,
    d: &DivisorX<T>,
    c2u: &FourClass<T>,
    c2w: &FourClass<T>,
    c3u: &T,
    c3w: &T,
) -> Result<ExtensionChern<T>> {
    if p + q < 2 {
        return Err(Error::InvalidInput(format!("extension ranks ({p},{q}) must sum to at least 2")));
    }
    let (pt, qt) = (T::from_i64(p as i64), T::from_i64(q as i64));
    let half = T::from_frac(1, 2);
    let third = T::from_frac(1, 3);

    let d_sq = divisor_square(s, d)?;
    let coeff2 = -(half * pt.clone() * qt.clone() * (pt.clone() + qt.clone()));
    let c2 = d_sq.scale(&coeff2).add(c2u)?.add(c2w)?;

    let d_cube = triple_product(s, d, d, d)?;
    let mixed = c2u.scale(&qt).sub(&c2w.scale(&pt))?;
    let c3 = third * pt.clone() * qt.clone() * (pt.clone() * pt - qt.clone() * qt) * d_cube
        + T::from_i64(2) * pair_four_two(s, &mixed, d)?
        + c3u.clone()
        + c3w.clone();

    let integral = c2.is_integral() && c3.is_integer();
    Ok(ExtensionChern { c2, c3, integral })
}

/// Parity constraints on spectral data as used throughout this crate:
/// `n` even needs `lambda` in `1/2 + Z`; `n` odd needs `lambda` integral and
/// `eta = c1 (mod 2)` coefficientwise.
pub fn check_spectral_parity<T: Scalar>(s: &BaseSurface, n: u32, eta: &DivisorClass<T>, lambda: &T) -> Result<()> {
    if eta.rank() != s.rank {
        return Err(Error::RankMismatch { expected: s.rank, got: eta.rank() });
    }
    if n < 2 {
        return Err(Error::SpectralDataInvalid(format!("rank n={n} must be at least 2")));
    }
    let eta_ints = eta
        .to_ints()
        .ok_or_else(|| Error::SpectralDataInvalid("eta must be integral".into()))?;
    if n.is_multiple_of(2) {
        let shifted = lambda.clone() - T::from_frac(1, 2);
        if !shifted.is_integer() {
            return Err(Error::SpectralDataInvalid(format!("n={n} even requires lambda in 1/2+Z, got {lambda}")));
        }
    } else {
        if !lambda.is_integer() {
            return Err(Error::SpectralDataInvalid(format!("n={n} odd requires integral lambda, got {lambda}")));
        }
        let c1 = s.c1::<T>().to_ints().expect("c1 is integral");
        if eta_ints.iter().zip(&c1).any(|(e, c)| (e - c).rem_euclid(2) != 0) {
            return Err(Error::SpectralDataInvalid("n odd requires eta = c1 (mod 2)".into()));
        }
    }
    Ok(())
}

/// `c2(V_n) = sigma pi^*eta - (n^3-n)/24 c1^2 F + 1/2 (lambda^2 - 1/4) n eta.(eta - n c1) F`.
pub fn c2_spectral<T: Scalar>(s: &BaseSurface, n: u32, eta: &DivisorClass<T>, lambda: &T) -> Result<FourClass<T>> {
    check_spectral_parity(s, n, eta, lambda)?;
    let nt = T::from_i64(n as i64);
    let c1 = s.c1::<T>();
    let cubic = T::from_frac(n as i64 * n as i64 * n as i64 - n as i64, 24) * T::from_i64(s.c1_squared());
    let residual = eta.sub(&c1.scale(&nt))?;
    let twist = T::from_frac(1, 2) * (lambda.clone() * lambda.clone() - T::from_frac(1, 4)) * nt;
    let fiber = twist * s.intersect(eta, &residual)? - cubic;
    if !fiber.is_integer() {
        return Err(Error::NonIntegral(format!("c2(V_n) fiber coefficient {fiber}")));
    }
    let mut beta = eta.clone();
    beta.torsion = false;
    Ok(FourClass::new(beta, fiber))
}

impl<T: Scalar> BundleSpec<T> {
    pub fn pullback(n: u32, c2e: T, twist: DivisorX<T>) -> Self {
        BundleSpec { variant: BundleVariant::Pullback { n, c2e }, twist }
    }

    pub fn spectral(n: u32, eta: DivisorClass<T>, lambda: T, twist: DivisorX<T>) -> Self {
        BundleSpec { variant: BundleVariant::Spectral { n, eta, lambda }, twist }
    }

    /// Ranks `(p, q)` of the two blocks.
    pub fn blocks(&self) -> (u32, u32) {
        match &self.variant {
            BundleVariant::Pullback { n, .. } | BundleVariant::Spectral { n, .. } => (*n, 1),
            BundleVariant::GenericPair { p, q, .. } => (*p, *q),
        }
    }

    pub fn rank(&self) -> u32 {
        let (p, q) = self.blocks();
        p + q
    }

    /// Structural checks that do not need any Chern class arithmetic beyond
    /// the spectral parity rules.
    pub fn validate(&self, s: &BaseSurface) -> Result<()> {
        if self.twist.alpha.rank() != s.rank {
            return Err(Error::RankMismatch { expected: s.rank, got: self.twist.alpha.rank() });
        }
        if !self.twist.x.is_integer() {
            return Err(Error::InvalidInput(format!("twist coefficient x={} must be an integer", self.twist.x)));
        }
        let doubled = self.twist.alpha.scale(&T::from_i64(2));
        if !doubled.is_integral() {
            return Err(Error::InvalidInput("twist alpha must lie in the half-integral lattice".into()));
        }
        match &self.variant {
            BundleVariant::Pullback { n, c2e } => {
                if *n < 2 {
                    return Err(Error::InvalidInput(format!("rank n={n} must be at least 2")));
                }
                if !c2e.is_integer() {
                    return Err(Error::NonIntegral(format!("c2(E)={c2e}")));
                }
            }
            BundleVariant::Spectral { n, eta, lambda } => {
                check_spectral_parity(s, *n, eta, lambda)?;
                let residual = eta.sub(&s.c1::<T>().scale(&T::from_i64(*n as i64)))?;
                if !residual.is_zero() && !s.cone_position(&residual)?.effective {
                    return Err(Error::SpectralDataInvalid("eta - n c1 must be effective".into()));
                }
            }
            BundleVariant::GenericPair { p, q, c2u, c2w, .. } => {
                if p + q < 2 {
                    return Err(Error::InvalidInput(format!("extension ranks ({p},{q}) must sum to at least 2")));
                }
                if c2u.beta.rank() != s.rank || c2w.beta.rank() != s.rank {
                    return Err(Error::SurfaceMismatch);
                }
            }
        }
        Ok(())
    }

    /// `c2` of the twisted sub-bundle block `U`.
    pub fn c2_sub(&self, s: &BaseSurface) -> Result<FourClass<T>> {
        match &self.variant {
            BundleVariant::Pullback { c2e, .. } => Ok(FourClass::fiber_multiple(s.rank, c2e.clone())),
            BundleVariant::Spectral { n, eta, lambda } => c2_spectral(s, *n, eta, lambda),
            BundleVariant::GenericPair { c2u, .. } => Ok(c2u.clone()),
        }
    }

    /// `c2(V)` of the full extension; errors if it is not integral.
    pub fn c2_total(&self, s: &BaseSurface) -> Result<FourClass<T>> {
        let (p, q) = self.blocks();
        let c2u = self.c2_sub(s)?;
        let c2w = match &self.variant {
            BundleVariant::GenericPair { c2w, .. } => c2w.clone(),
            _ => FourClass::zero(s.rank),
        };
        let zero = T::zero();
        let ext = chern_extension(s, p, q, &self.twist, &c2u, &c2w, &zero, &zero)?;
        if !ext.c2.is_integral() {
            return Err(Error::NonIntegral(format!("c2(V) fiber coefficient {}", ext.c2.fiber)));
        }
        Ok(ext.c2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SurfaceKind;
    use crate::ring::c2_tangent;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn f0() -> BaseSurface {
        BaseSurface::new(SurfaceKind::Hirzebruch(0)).unwrap()
    }

    #[test]
    fn zero_twist_adds_blocks() {
        let s = f0();
        let c2u = FourClass::new(DivisorClass::from_ints(&[1, 2]), r(5));
        let c2w = FourClass::new(DivisorClass::from_ints(&[0, 3]), r(-2));
        let ext = chern_extension(&s, 2, 3, &DivisorX::zero(2), &c2u, &c2w, &r(4), &r(-1)).unwrap();
        assert_eq!(ext.c2, c2u.add(&c2w).unwrap());
        assert_eq!(ext.c3, r(3));
        assert!(ext.integral);
    }

    #[test]
    fn so10_extension_matches_tangent() {
        let s = f0();
        let d = DivisorX::from_ints(1, &[-1, -1]);
        let c2u = FourClass::fiber_multiple(2, r(104));
        let ext = chern_extension(&s, 3, 1, &d, &c2u, &FourClass::zero(2), &r(0), &r(0)).unwrap();
        assert_eq!(ext.c2, FourClass::new(DivisorClass::from_ints(&[24, 24]), r(92)));
        assert_eq!(ext.c2, c2_tangent(&s));
    }

    #[test]
    fn equal_blocks_kill_cubic_term() {
        let s = f0();
        // sigma^3 = 8 on F0
        let d = DivisorX::<Rational>::section(2);
        let z = FourClass::zero(2);
        let ext = chern_extension(&s, 1, 1, &d, &z, &z, &r(0), &r(0)).unwrap();
        assert_eq!(ext.c3, r(0));
    }

    #[test]
    fn spectral_f0_example() {
        let s = f0();
        let eta = DivisorClass::from_ints(&[24, 24]);
        let c = c2_spectral(&s, 2, &eta, &Rational::new(3, 2)).unwrap();
        assert_eq!(c.beta, eta);
        assert_eq!(c.fiber, r(1918));
    }

    #[test]
    fn spectral_residual_vanishing() {
        // eta = n c1 removes the lambda term; only -(n^3-n)/24 c1^2 = -9 remains
        let s = BaseSurface::new(SurfaceKind::DelPezzo(0)).unwrap();
        let c = c2_spectral(&s, 3, &DivisorClass::from_ints(&[9]), &r(1)).unwrap();
        assert_eq!(c.fiber, r(-9));
    }

    #[test]
    fn spectral_parity_rejections() {
        let s = f0();
        let eta = DivisorClass::from_ints(&[24, 24]);
        assert!(matches!(c2_spectral(&s, 2, &eta, &r(1)), Err(Error::SpectralDataInvalid(_))));
        assert!(matches!(c2_spectral(&s, 3, &eta, &Rational::new(1, 2)), Err(Error::SpectralDataInvalid(_))));
        let odd_eta = DivisorClass::from_ints(&[23, 24]);
        assert!(matches!(c2_spectral(&s, 3, &odd_eta, &r(1)), Err(Error::SpectralDataInvalid(_))));
    }

    #[test]
    fn spectral_non_integral_fiber() {
        // (n^3-n)c1^2/24 = 9/4 on P^2 for n = 2
        let s = BaseSurface::new(SurfaceKind::DelPezzo(0)).unwrap();
        let err = c2_spectral(&s, 2, &DivisorClass::from_ints(&[6]), &Rational::new(1, 2)).unwrap_err();
        assert!(matches!(err, Error::NonIntegral(_)));
    }

    #[test]
    fn validation() {
        let s = f0();
        let twist = DivisorX::<Rational>::from_ints(0, &[1, -11]);
        let ok = BundleSpec::spectral(2, DivisorClass::from_ints(&[24, 24]), Rational::new(3, 2), twist.clone());
        assert!(ok.validate(&s).is_ok());
        let reducible = BundleSpec::spectral(2, DivisorClass::from_ints(&[2, 8]), Rational::new(3, 2), twist.clone());
        assert!(matches!(reducible.validate(&s), Err(Error::SpectralDataInvalid(_))));
        let rank_one = BundleSpec::pullback(1, r(3), twist.clone());
        assert!(rank_one.validate(&s).is_err());
        let quarter = BundleSpec::pullback(2, r(3), DivisorX::new(r(1), DivisorClass::new(vec![Rational::new(1, 4), r(0)])));
        assert!(quarter.validate(&s).is_err());
    }

    #[test]
    fn half_integral_twist_rejected_when_non_integral() {
        // alpha = -c1/2 on dP2 has alpha^2 = 7/4, so c2(V) picks up a fraction
        let s = BaseSurface::new(SurfaceKind::DelPezzo(2)).unwrap();
        let alpha = s.c1::<Rational>().scale(&Rational::new(-1, 2));
        let spec = BundleSpec::pullback(3, r(100), DivisorX::new(r(1), alpha));
        assert!(spec.validate(&s).is_ok());
        assert!(matches!(spec.c2_total(&s), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn json_shapes() {
        let spec: BundleSpec<Rational> = serde_json::from_str(
            r#"{"type":"pullback","n":3,"c2E":104,"twist":{"x":1,"alpha":{"coeffs":[-1,-1],"torsion":0}}}"#,
        )
        .unwrap();
        assert_eq!(spec, BundleSpec::pullback(3, r(104), DivisorX::from_ints(1, &[-1, -1])));
        let spec: BundleSpec<Rational> = serde_json::from_str(
            r#"{"type":"spectral","n":2,"eta":{"coeffs":[24,24]},"lambda":"3/2","twist":{"x":0,"alpha":{"coeffs":[1,-11]}}}"#,
        )
        .unwrap();
        assert_eq!(spec.rank(), 3);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains(r#""lambda":"3/2""#), "{text}");
        assert!(text.starts_with(r#"{"type":"spectral""#), "{text}");
    }
}
