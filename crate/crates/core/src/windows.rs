//! Kähler cone membership and stability windows for the polarization
//! `J = z sigma + pi^*H`.
//!
//! Windows are solved directly from the slope inequalities, each of which is
//! linear in a single variable: `z` on the Enriques surface, and
//! `u = z(2h - z) = h^2 - (h - z)^2` when `H = h c1` with `c1` ample.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, Decision, DivisorClass};
use crate::ring::DivisorX;
use crate::scalar::{serde_exact, Scalar};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowVariable {
    Z,
    U,
}

/// Open interval `(lower, upper)` of admissible polarizations.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct StabilityWindow<T> {
    pub variable: WindowVariable,
    #[serde(with = "serde_exact")]
    pub lower: T,
    /// `None` when unbounded above.
    #[serde(with = "serde_exact::option")]
    pub upper: Option<T>,
    pub nonempty: bool,
    pub binding: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_interval_approx: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_agrees: Option<bool>,
}

impl<T: Scalar> StabilityWindow<T> {
    pub fn contains(&self, v: &T) -> bool {
        *v > self.lower && self.upper.as_ref().is_none_or(|u| v < u)
    }

    /// A point strictly inside a nonempty window.
    pub fn interior_point(&self) -> Option<T> {
        if !self.nonempty {
            return None;
        }
        Some(match &self.upper {
            Some(u) => (self.lower.clone() + u.clone()) / T::from_i64(2),
            None => self.lower.clone() + T::one(),
        })
    }
}

/// `slope * v + offset < 0`.
#[derive(Clone, Debug)]
pub struct LinearConstraint<T> {
    pub id: &'static str,
    pub slope: T,
    pub offset: T,
}

impl<T: Scalar> LinearConstraint<T> {
    fn less(id: &'static str, slope: T, offset: T) -> Self {
        LinearConstraint { id, slope, offset }
    }

    fn greater(id: &'static str, slope: T, offset: T) -> Self {
        LinearConstraint { id, slope: -slope, offset: -offset }
    }

    pub fn holds(&self, v: &T) -> bool {
        (self.slope.clone() * v.clone() + self.offset.clone()).is_negative()
    }
}

fn push_unique(ids: &mut Vec<String>, id: &str) {
    if !ids.iter().any(|s| s == id) {
        ids.push(id.to_string());
    }
}

/// Intersect strict linear constraints with the open domain `(lo, hi)`.
pub fn solve_interval<T: Scalar>(
    variable: WindowVariable,
    lo: (T, &'static str),
    hi: Option<(T, &'static str)>,
    constraints: &[LinearConstraint<T>],
) -> StabilityWindow<T> {
    let (mut lower, mut lower_ids) = (lo.0, vec![lo.1]);
    let (mut upper, mut upper_ids) = match hi {
        Some((v, id)) => (Some(v), vec![id]),
        None => (None, Vec::new()),
    };
    let mut blocking = Vec::new();
    for c in constraints {
        if c.slope.is_zero() {
            if !c.offset.is_negative() {
                blocking.push(c.id);
            }
            continue;
        }
        let root = -c.offset.clone() / c.slope.clone();
        if c.slope.is_positive() {
            match &upper {
                Some(u) if root > *u => {}
                Some(u) if root == *u => upper_ids.push(c.id),
                _ => {
                    upper = Some(root);
                    upper_ids = vec![c.id];
                }
            }
        } else if root > lower {
            lower = root;
            lower_ids = vec![c.id];
        } else if root == lower {
            lower_ids.push(c.id);
        }
    }
    let nonempty = blocking.is_empty() && upper.as_ref().is_none_or(|u| lower < *u);
    let mut binding = Vec::new();
    for id in if blocking.is_empty() { lower_ids.into_iter().chain(upper_ids).collect() } else { blocking } {
        push_unique(&mut binding, id);
    }
    StabilityWindow { variable, lower, upper, nonempty, binding, z_interval_approx: None, closed_form_agrees: None }
}

/// `z > 0` and `H - z c1` ample.
pub fn kahler_check<T: Scalar>(s: &BaseSurface, j: &DivisorX<T>) -> Result<Decision> {
    kahler_check_bounded(s, j, crate::lattice::DEFAULT_BOUND)
}

pub fn kahler_check_bounded<T: Scalar>(s: &BaseSurface, j: &DivisorX<T>, bound: i64) -> Result<Decision> {
    if !j.alpha.is_integral() {
        return Err(Error::InvalidInput("polarization H must be integral".into()));
    }
    if !j.x.is_positive() {
        return Ok(Decision::No);
    }
    let shifted = j.alpha.sub(&s.c1::<T>().scale(&j.x))?;
    Ok(s.cone_position_bounded(&shifted, bound)?.ample)
}

/// The sign condition `x (alpha H) < 0` that an Enriques non-split extension needs.
pub fn sign_necessity(x: i64, a_h: i64) -> bool {
    x.signum() * a_h.signum() < 0
}

pub fn enriques_constraints<T: Scalar>(n: u32, x: i64, a: i64, hsq: i64) -> Vec<LinearConstraint<T>> {
    let (n, x, a, hsq) = (T::from_i64(n as i64), T::from_i64(x), T::from_i64(a), T::from_i64(hsq));
    let two = T::from_i64(2);
    let na = n.clone() * a.clone();
    let nx = n * x.clone();
    vec![
        LinearConstraint::less("ineq1", two.clone() * na.clone() - two.clone(), nx.clone() * hsq.clone()),
        LinearConstraint::less("ineq2", two.clone() * na, (nx - T::one()) * hsq.clone()),
        LinearConstraint::greater("ineq3", two * a, x * hsq),
    ]
}

/// Closed-form Enriques window for `x a < 0`, in `z`.
pub fn enriques_closed_form<T: Scalar>(n: u32, x: i64, a: i64, hsq: i64) -> Option<(T, T)> {
    let (n, x, a) = (n as i64, x, a);
    let half_h = T::from_frac(hsq, 2);
    let frac = |num: i64, den: i64| (den != 0).then(|| T::from_frac(num, den) * half_h.clone());
    if x > 0 && a < 0 {
        Some((frac(n * x, 1 - n * a)?, frac(n * x, -n * a)?))
    } else if x < 0 && a > 0 {
        Some((frac(-n * x, n * a)?, frac(-n * x, n * a - 1)?))
    } else {
        None
    }
}

/// Window in `z` on the Enriques surface; `a = alpha.H`, `hsq = H^2`.
pub fn window_enriques<T: Scalar>(n: u32, x: i64, a: i64, hsq: i64) -> StabilityWindow<T> {
    let mut w = solve_interval(WindowVariable::Z, (T::zero(), "z>0"), None, &enriques_constraints(n, x, a, hsq));
    if x == 0 && a >= 1 {
        w.nonempty = false;
        w.binding = vec!["na≥1 obstruction".into()];
    }
    if x != 0 && x.abs() < a.abs() {
        w.closed_form_agrees = enriques_closed_form::<T>(n, x, a, hsq)
            .map(|(lo, hi)| w.nonempty && w.lower == lo && w.upper.as_ref() == Some(&hi));
    }
    w
}

pub fn delpezzo_constraints<T: Scalar>(n: u32, x: i64, a: i64, c1sq: i64, h: &T) -> Vec<LinearConstraint<T>> {
    let n = n as i64;
    let hh = h.clone() * h.clone() * T::from_i64(c1sq);
    let t = T::from_i64;
    vec![
        LinearConstraint::less("ineq1", t(n * a - 1 - n * x * c1sq), t(n * x) * hh.clone()),
        LinearConstraint::less("ineq2", t(n * a + c1sq - n * x * c1sq), t(n * x - 1) * hh.clone()),
        LinearConstraint::greater("ineq3", t(a - x * c1sq), t(x) * hh),
    ]
}

/// Closed-form window for `H = h c1` and `x a < 0`, in `u`.
pub fn delpezzo_closed_form<T: Scalar>(n: u32, x: i64, a: i64, c1sq: i64, h: &T) -> Option<(T, T)> {
    let n = n as i64;
    let hsq = h.clone() * h.clone() * T::from_i64(c1sq);
    let base = n * (x * c1sq - a);
    let frac = |den: i64| (den != 0).then(|| T::from_frac(n * x, den) * hsq.clone());
    if x > 0 && a < 0 {
        Some((frac(base + 1)?, frac(base)?))
    } else if x < 0 && a > 0 {
        Some((frac(base)?, frac(base + 1)?))
    } else {
        None
    }
}

/// `z = h - sqrt(h^2 - u)`, the branch with `0 < z < h`.
pub fn u_to_z_approx(u: f64, h: f64) -> f64 {
    h - (h * h - u).max(0.0).sqrt()
}

/// Window in `u = z(2h - z)` for `H = h c1`; `a = alpha.c1`.
pub fn window_delpezzo<T: Scalar>(n: u32, x: i64, a: i64, c1sq: i64, h: &T) -> Result<StabilityWindow<T>> {
    if !h.is_positive() || c1sq <= 0 {
        return Err(Error::InvalidInput("window needs h > 0 and c1^2 > 0".into()));
    }
    let hh = h.clone() * h.clone();
    let mut w = solve_interval(
        WindowVariable::U,
        (T::zero(), "u>0"),
        Some((hh, "u<h^2")),
        &delpezzo_constraints(n, x, a, c1sq, h),
    );
    if x == 0 {
        w.nonempty = false;
        w.binding = vec!["(na−1)(h²−ζ²)<0 impossible".into()];
    }
    if w.nonempty {
        let hf = h.to_f64();
        let upper = w.upper.as_ref().map_or(hf * hf, |u| u.to_f64());
        w.z_interval_approx = Some([u_to_z_approx(w.lower.to_f64(), hf), u_to_z_approx(upper, hf)]);
    }
    if x != 0 && x.abs() < a.abs() {
        w.closed_form_agrees = delpezzo_closed_form::<T>(n, x, a, c1sq, h)
            .map(|(lo, hi)| w.nonempty && w.lower == lo && w.upper.as_ref() == Some(&hi));
    }
    Ok(w)
}

/// Exact test of `z` against a `u`-window: compares `z(2h - z)` with the endpoints.
pub fn z_in_u_window<T: Scalar>(w: &StabilityWindow<T>, h: &T, z: &T) -> bool {
    z.is_positive() && z < h && w.contains(&(z.clone() * (h.clone() + h.clone() - z.clone())))
}

/// Stability of extensions of a spectral cover bundle twisted by `pi^*alpha`
/// for `J = eps sigma + pi^*H`, with `eps` a formal infinitesimal.
///
/// Degrees are taken against `Hbar = 2H - eps c1`. Leading order compares
/// `n alpha.H` with `(Lambda.H)_min`; a tie is broken by the `eps` coefficient.
pub fn spectral_stability_check<T: Scalar>(
    s: &BaseSurface,
    n: u32,
    alpha: &DivisorClass<T>,
    h: &DivisorClass<T>,
    bound: i64,
) -> Result<Verdict<T>> {
    let nt = T::from_i64(n as i64);
    let a_h = s.intersect(alpha, h)?;
    let lhs = nt.clone() * a_h.clone();
    if !a_h.is_positive() {
        return Ok(Verdict::new(false, "0<n*alphaH", lhs));
    }
    let min = s.min_positive_degree(h, bound)?;
    let threshold = T::from_i64(min.value);
    let pass = if lhs < threshold {
        true
    } else if lhs > threshold || s.is_enriques() {
        false
    } else {
        let hi = h.to_ints().ok_or(Error::NotAmple)?;
        let h_ints = DivisorClass::<T>::from_ints(&hi);
        let c1 = s.c1::<T>();
        let mut worst: Option<T> = None;
        for g in &s.cone_generators {
            let g = DivisorClass::<T>::from_ints(g);
            if s.intersect(&g, &h_ints)? == threshold {
                let d = s.intersect(&g, &c1)?;
                if worst.as_ref().is_none_or(|w| d > *w) {
                    worst = Some(d);
                }
            }
        }
        let own = nt * s.intersect(alpha, &c1)?;
        worst.is_some_and(|w| own > w)
    };
    let mut v = Verdict::new(pass, "n*alphaH<(LambdaH)_min", lhs).with_threshold(threshold);
    v.bound_limited = min.bound_limited;
    Ok(v)
}
