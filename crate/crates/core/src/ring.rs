//! Even cohomology of an elliptic threefold `X -> B` with section `sigma`.
//!
//! Divisors are `x sigma + pi^*alpha`, four-classes are `sigma pi^*beta + f F`
//! with `F` the fiber class, and top-degree classes are identified with their
//! degree. Products follow from
//!
//! ```text
//! sigma^2 = -sigma pi^*c1,   sigma . F = pt,   pi^*a . pi^*b = (a.b) F
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, DivisorClass};
use crate::scalar::{serde_exact, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DivisorX<T> {
    #[serde(serialize_with = "serde_exact::serialize_compact", deserialize_with = "serde_exact::deserialize")]
    pub x: T,
    pub alpha: DivisorClass<T>,
}

impl<T: Scalar> DivisorX<T> {
    pub fn new(x: T, alpha: DivisorClass<T>) -> Self {
        DivisorX { x, alpha }
    }

    pub fn from_ints(x: i64, alpha: &[i64]) -> Self {
        DivisorX::new(T::from_i64(x), DivisorClass::from_ints(alpha))
    }

    pub fn section(rank: usize) -> Self {
        DivisorX::new(T::one(), DivisorClass::zero(rank))
    }

    pub fn pullback(alpha: DivisorClass<T>) -> Self {
        DivisorX::new(T::zero(), alpha)
    }

    pub fn zero(rank: usize) -> Self {
        DivisorX::new(T::zero(), DivisorClass::zero(rank))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(DivisorX::new(self.x.clone() + other.x.clone(), self.alpha.add(&other.alpha)?))
    }

    pub fn neg(&self) -> Self {
        DivisorX::new(-self.x.clone(), self.alpha.neg())
    }

    pub fn scale(&self, k: &T) -> Self {
        DivisorX::new(self.x.clone() * k.clone(), self.alpha.scale(k))
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.alpha.is_integral()
    }
}

/// `sigma pi^*beta + fiber F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FourClass<T> {
    pub beta: DivisorClass<T>,
    #[serde(with = "serde_exact")]
    pub fiber: T,
}

impl<T: Scalar> FourClass<T> {
    pub fn new(beta: DivisorClass<T>, fiber: T) -> Self {
        FourClass { beta, fiber }
    }

    pub fn zero(rank: usize) -> Self {
        FourClass::new(DivisorClass::zero(rank), T::zero())
    }

    /// `f F`
    pub fn fiber_multiple(rank: usize, f: T) -> Self {
        FourClass::new(DivisorClass::zero(rank), f)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(FourClass::new(self.beta.add(&other.beta)?, self.fiber.clone() + other.fiber.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FourClass::new(self.beta.neg(), -self.fiber.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        FourClass::new(self.beta.scale(k), self.fiber.clone() * k.clone())
    }

    pub fn is_integral(&self) -> bool {
        self.fiber.is_integer() && self.beta.is_integral()
    }
}

fn check_surface<T: Scalar>(s: &BaseSurface, classes: &[&DivisorClass<T>]) -> Result<()> {
    if classes.iter().all(|c| c.rank() == s.rank) {
        Ok(())
    } else {
        Err(Error::SurfaceMismatch)
    }
}

/// `D1 . D2 . D3` as a number.
pub fn triple_product<T: Scalar>(s: &BaseSurface, d1: &DivisorX<T>, d2: &DivisorX<T>, d3: &DivisorX<T>) -> Result<T> {
    check_surface(s, &[&d1.alpha, &d2.alpha, &d3.alpha])?;
    let c1 = s.c1::<T>();
    let c1sq = T::from_i64(s.c1_squared());
    let (x1, x2, x3) = (&d1.x, &d2.x, &d3.x);
    let dot = |a: &DivisorClass<T>, b: &DivisorClass<T>| s.intersect(a, b);

    let cubic = x1.clone() * x2.clone() * x3.clone() * c1sq;
    let quadratic = x1.clone() * x2.clone() * dot(&c1, &d3.alpha)?
        + x1.clone() * x3.clone() * dot(&c1, &d2.alpha)?
        + x2.clone() * x3.clone() * dot(&c1, &d1.alpha)?;
    let linear = x1.clone() * dot(&d2.alpha, &d3.alpha)?
        + x2.clone() * dot(&d1.alpha, &d3.alpha)?
        + x3.clone() * dot(&d1.alpha, &d2.alpha)?;
    Ok(cubic - quadratic + linear)
}

/// `D^2 = sigma pi^*(2x alpha - x^2 c1) + (alpha^2) F`.
pub fn divisor_square<T: Scalar>(s: &BaseSurface, d: &DivisorX<T>) -> Result<FourClass<T>> {
    check_surface(s, &[&d.alpha])?;
    let two_x = d.x.clone() + d.x.clone();
    let x_sq = d.x.clone() * d.x.clone();
    let beta = d.alpha.scale(&two_x).sub(&s.c1::<T>().scale(&x_sq))?;
    Ok(FourClass::new(beta, s.square(&d.alpha)?))
}

/// Degree of `W . D` for a four-class `W` and divisor `D`.
pub fn pair_four_two<T: Scalar>(s: &BaseSurface, w: &FourClass<T>, d: &DivisorX<T>) -> Result<T> {
    check_surface(s, &[&w.beta, &d.alpha])?;
    let c1 = s.c1::<T>();
    Ok(-(d.x.clone() * s.intersect(&c1, &w.beta)?) + s.intersect(&d.alpha, &w.beta)? + d.x.clone() * w.fiber.clone())
}

/// `c2(X) = pi^*c2 + 11 pi^*c1^2 + 12 sigma pi^*c1`.
pub fn c2_tangent<T: Scalar>(s: &BaseSurface) -> FourClass<T> {
    let beta = s.c1::<T>().scale(&T::from_i64(12));
    FourClass::new(beta, T::from_i64(s.c2 + 11 * s.c1_squared()))
}
