//! Exhaustive scans over integer parameter boxes.
//!
//! Every candidate runs through the same pipeline: validity, anomaly,
//! non-split, stability. Records come out in lexicographic order of the
//! parameter tuple, and the parallel driver preserves that order.

use std::io::Write;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::anomaly::{anomaly_class_bounded, AnomalyOutcome};
use crate::bundle::{BundleSpec, BundleVariant};
use crate::error::{Error, Result};
use crate::lattice::{BaseSurface, Decision, DivisorClass, SurfaceKind, DEFAULT_BOUND};
use crate::nonsplit::{necessary_mu_value, nonsplit_feasible, spectral_nonsplit};
use crate::ring::DivisorX;
use crate::scalar::{serde_exact, Scalar};
use crate::verdict::Verdict;
use crate::windows::{
    kahler_check_bounded, sign_necessity, spectral_stability_check, window_delpezzo, window_enriques, StabilityWindow,
};
use crate::Rational;

type Q = Rational;

const CHUNK: usize = 512;

pub fn serialize_kind<S: Serializer>(k: &SurfaceKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(k)
}

pub fn deserialize_kind<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SurfaceKind, D::Error> {
    let raw = String::deserialize(d)?;
    let kind: SurfaceKind = raw.parse().map_err(de::Error::custom)?;
    BaseSurface::new(kind).map_err(de::Error::custom)?;
    Ok(kind)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Require {
    #[serde(rename = "W_zero")]
    WZero,
    #[serde(rename = "W_effective")]
    WEffective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pullback,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Passing,
    All,
}

/// `J = z sigma + pi^*H` with either `H = h c1` or an explicit `H`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polarization {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_exact::option")]
    pub h: Option<Q>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub big_h: Option<DivisorClass<Q>>,
}

impl Polarization {
    pub fn multiple(h: Q) -> Self {
        Polarization { h: Some(h), big_h: None }
    }

    pub fn explicit(h: DivisorClass<Q>) -> Self {
        Polarization { h: None, big_h: Some(h) }
    }

    /// The class `H`.
    pub fn class(&self, s: &BaseSurface) -> Result<DivisorClass<Q>> {
        match (&self.h, &self.big_h) {
            (_, Some(h)) => pad(s, h),
            (Some(h), None) if !s.is_enriques() => Ok(s.c1::<Q>().scale(h)),
            (Some(_), None) => Err(Error::InvalidInput("H = h c1 is not a polarization on the Enriques surface".into())),
            (None, None) => Err(Error::InvalidInput("polarization needs h or H".into())),
        }
    }

    /// `h` with `H = h c1`, when `H` is proportional to `c1`.
    pub fn c1_multiple(&self, s: &BaseSurface) -> Result<Q> {
        if let Some(h) = &self.h {
            if self.big_h.is_none() {
                return Ok(*h);
            }
        }
        let h = self.class(s)?;
        let c1 = s.c1::<Q>();
        let i = c1
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::InvalidInput("c1 is numerically zero".into()))?;
        let k = h.coeffs[i] / c1.coeffs[i];
        if c1.scale(&k) == h {
            Ok(k)
        } else {
            Err(Error::InvalidInput("the window needs H = h c1".into()))
        }
    }
}

/// Zero-pad a short coefficient vector to the rank of `s`.
pub fn pad<T: Scalar>(s: &BaseSurface, c: &DivisorClass<T>) -> Result<DivisorClass<T>> {
    if c.rank() > s.rank {
        return Err(Error::RankMismatch { expected: s.rank, got: c.rank() });
    }
    let mut out = c.clone();
    out.coeffs.resize(s.rank, T::zero());
    Ok(out)
}

fn pad_bundle(s: &BaseSurface, b: &BundleSpec<Q>) -> Result<BundleSpec<Q>> {
    let mut b = b.clone();
    b.twist.alpha = pad(s, &b.twist.alpha)?;
    if let BundleVariant::Spectral { eta, .. } = &mut b.variant {
        *eta = pad(s, eta)?;
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub require: Option<Require>,
    pub bound: i64,
    pub short_circuit: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { require: None, bound: DEFAULT_BOUND, short_circuit: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Overall {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    #[serde(serialize_with = "serialize_kind")]
    pub base: SurfaceKind,
    pub bundle: BundleSpec<Q>,
    pub polarization: Polarization,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anomaly: Option<AnomalyOutcome<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonsplit: Option<Vec<Verdict<Q>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<StabilityWindow<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Verdict<Q>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<StageError>,
    pub overall: Overall,
}

impl ModelRecord {
    pub fn passed(&self) -> bool {
        self.overall.pass
    }

    fn fail(&mut self, stage: &'static str) {
        if self.overall.failed_stage.is_none() {
            self.overall.failed_stage = Some(stage);
        }
        self.overall.pass = false;
    }

    fn error(&mut self, stage: &'static str, e: Error) {
        self.errors.push(StageError { stage, message: e.to_string() });
        self.fail(stage);
    }
}

/// Run the full pipeline on one model. Stage errors end up in the record.
pub fn check_model(s: &BaseSurface, bundle: &BundleSpec<Q>, pol: &Polarization, opts: &CheckOptions) -> ModelRecord {
    let mut rec = ModelRecord {
        index: None,
        base: s.kind,
        bundle: bundle.clone(),
        polarization: pol.clone(),
        valid: false,
        anomaly: None,
        nonsplit: None,
        window: None,
        stability: None,
        errors: Vec::new(),
        overall: Overall { pass: true, failed_stage: None },
    };
    let bundle = match pad_bundle(s, bundle) {
        Ok(b) => b,
        Err(e) => {
            rec.error("validity", e);
            return rec;
        }
    };
    rec.bundle = bundle.clone();

    match anomaly_class_bounded(s, &bundle, opts.bound) {
        Ok(out) => {
            rec.valid = true;
            let ok = match opts.require {
                Some(Require::WZero) => out.w_zero,
                Some(Require::WEffective) => out.w_effective,
                None => true,
            };
            rec.anomaly = Some(out);
            if !ok {
                rec.fail("anomaly");
                if opts.short_circuit {
                    return rec;
                }
            }
        }
        Err(e) => {
            rec.error("validity", e);
            return rec;
        }
    }

    match nonsplit_stage(s, &bundle, pol) {
        Ok(vs) => {
            let ok = vs.iter().all(|v| v.pass);
            rec.nonsplit = Some(vs);
            if !ok {
                rec.fail("nonsplit");
                if opts.short_circuit {
                    return rec;
                }
            }
        }
        Err(e) => {
            rec.error("nonsplit", e);
            if opts.short_circuit {
                return rec;
            }
        }
    }

    match &bundle.variant {
        BundleVariant::Spectral { n, .. } => {
            let verdict = if bundle.twist.x.is_zero() {
                pol.class(s).and_then(|h| spectral_stability_check(s, *n, &bundle.twist.alpha, &h, opts.bound))
            } else {
                Ok(Verdict::new(false, "x=0", bundle.twist.x))
            };
            match verdict {
                Ok(v) => {
                    let ok = v.pass;
                    rec.stability = Some(v);
                    if !ok {
                        rec.fail("stability");
                    }
                }
                Err(e) => rec.error("stability", e),
            }
        }
        _ => match pullback_window(s, &bundle, pol, opts.bound) {
            Ok(w) => {
                let ok = w.nonempty;
                rec.window = Some(w);
                if !ok {
                    rec.fail("stability");
                }
            }
            Err(e) => rec.error("stability", e),
        },
    }
    rec
}

fn int_of(v: &Q, what: &str) -> Result<i64> {
    v.to_i64_exact().ok_or_else(|| Error::NonIntegral(format!("{what} = {v}")))
}

fn nonsplit_stage(s: &BaseSurface, bundle: &BundleSpec<Q>, pol: &Polarization) -> Result<Vec<Verdict<Q>>> {
    let alpha = &bundle.twist.alpha;
    match &bundle.variant {
        BundleVariant::Spectral { n, eta, .. } => {
            if !bundle.twist.x.is_zero() {
                return Ok(vec![Verdict::new(false, "x=0", bundle.twist.x)]);
            }
            Ok(vec![spectral_nonsplit(s, *n, n + 1, eta, alpha)?])
        }
        BundleVariant::Pullback { n, c2e } => {
            let x = int_of(&bundle.twist.x, "x")?;
            let h = pol.class(s)?;
            // linear in z, so the ends of the Kähler range suffice
            let zs = if s.is_enriques() { vec![Q::zero()] } else { vec![Q::zero(), pol.c1_multiple(s)?] };
            let mut out = Vec::new();
            for z in &zs {
                out.push(nonsplit_feasible(s, *n, x, alpha, c2e, &h, z)?);
                if x > 0 {
                    let v = necessary_mu_value(s, n + 1, x, alpha, &h, z)?;
                    out.push(Verdict::new(v.is_positive(), "(y-1)(2H-zc1)c1-m(2H-zc1)alpha>0", v));
                }
            }
            if s.is_enriques() && x != 0 {
                let a_h = int_of(&s.intersect(alpha, &h)?, "alpha.H")?;
                out.push(Verdict::new(sign_necessity(x, a_h), "x*alphaH<0", Q::from_integer((x * a_h).into())));
            }
            Ok(out)
        }
        BundleVariant::GenericPair { .. } => Err(Error::InvalidInput("the pipeline handles pullback and spectral bundles".into())),
    }
}

fn pullback_window(s: &BaseSurface, bundle: &BundleSpec<Q>, pol: &Polarization, bound: i64) -> Result<StabilityWindow<Q>> {
    let BundleVariant::Pullback { n, .. } = &bundle.variant else {
        return Err(Error::InvalidInput("the pipeline handles pullback and spectral bundles".into()));
    };
    let x = int_of(&bundle.twist.x, "x")?;
    let alpha = &bundle.twist.alpha;
    if s.is_enriques() {
        let h = pol.class(s)?;
        // c1 is torsion, so the Kähler condition is ampleness of H for every z > 0
        match kahler_check_bounded(s, &DivisorX::new(Q::one(), h.clone()), bound)? {
            Decision::Yes => {}
            Decision::No => return Err(Error::NotAmple),
            Decision::Undecidable => return Err(Error::Undecidable("ampleness of the polarization".into())),
        }
        let a = int_of(&s.intersect(alpha, &h)?, "alpha.H")?;
        let hsq = int_of(&s.square(&h)?, "H^2")?;
        Ok(window_enriques(*n, x, a, hsq))
    } else {
        let h = pol.c1_multiple(s)?;
        let a = int_of(&s.intersect(alpha, &s.c1::<Q>())?, "alpha.c1")?;
        window_delpezzo(*n, x, a, s.c1_squared(), &h)
    }
}

/// A single model to check, as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckInput {
    #[serde(serialize_with = "serialize_kind", deserialize_with = "deserialize_kind")]
    pub base: SurfaceKind,
    pub bundle: BundleSpec<Q>,
    pub polarization: Polarization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require: Option<Require>,
    #[serde(default = "default_bound")]
    pub bound: i64,
    #[serde(default = "default_true")]
    pub short_circuit: bool,
}

impl CheckInput {
    pub fn run(&self) -> Result<ModelRecord> {
        let s = BaseSurface::new(self.base)?;
        if self.bound < 1 {
            return Err(Error::InvalidInput("bound must be positive".into()));
        }
        let opts = CheckOptions { require: self.require, bound: self.bound, short_circuit: self.short_circuit };
        Ok(check_model(&s, &self.bundle, &self.polarization, &opts))
    }
}

/// Inclusive integer range: `3`, `[lo, hi]`, or a union `[[lo, hi], ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRange {
    Single(i64),
    Span([i64; 2]),
    Union(Vec<[i64; 2]>),
}

impl IntRange {
    pub fn values(&self) -> Vec<i64> {
        let mut v: Vec<i64> = match self {
            IntRange::Single(a) => vec![*a],
            IntRange::Span([a, b]) => (*a..=*b).collect(),
            IntRange::Union(spans) => spans.iter().flat_map(|[a, b]| *a..=*b).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exact(#[serde(serialize_with = "serde_exact::serialize", deserialize_with = "serde_exact::deserialize")] pub Q);

/// A single value, an inclusive `[lo, hi]` span in half-integer steps, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HalfRange {
    Single(Exact),
    Span([Exact; 2]),
}

impl HalfRange {
    pub fn values(&self) -> Vec<Q> {
        match self {
            HalfRange::Single(v) => vec![v.0],
            HalfRange::Span([lo, hi]) => {
                let half = Q::new(1, 2);
                let mut v = (lo.0 / half).ceil() * half;
                let mut out = Vec::new();
                while v <= hi.0 {
                    out.push(v);
                    v += half;
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarList {
    One(Exact),
    Many(Vec<Exact>),
}

impl ScalarList {
    fn values(&self) -> Vec<Q> {
        match self {
            ScalarList::One(v) => vec![v.0],
            ScalarList::Many(v) => v.iter().map(|e| e.0).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(serialize_with = "serialize_kind", deserialize_with = "deserialize_kind")]
    pub base: SurfaceKind,
    pub mode: Mode,
    pub n_range: IntRange,
    #[serde(default = "zero_range")]
    pub x_range: IntRange,
    /// Per-coordinate bounds, zero-padded to the lattice rank.
    #[serde(default)]
    pub alpha_box: Vec<IntRange>,
    /// Pullback only; when absent `c2(E)` is set to the value with `a_f = 0`.
    #[serde(rename = "c2E_range", default, skip_serializing_if = "Option::is_none")]
    pub c2e_range: Option<IntRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_box: Option<Vec<IntRange>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_range: Option<HalfRange>,
    #[serde(rename = "H_box", default, skip_serializing_if = "Option::is_none")]
    pub h_box: Option<Vec<IntRange>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_range: Option<ScalarList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require: Option<Require>,
    #[serde(default = "default_bound")]
    pub bound: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    /// Defaults to `passing` when `require` is set and `all` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<Emit>,
    #[serde(default = "default_true")]
    pub short_circuit: bool,
}

fn zero_range() -> IntRange {
    IntRange::Single(0)
}

fn default_bound() -> i64 {
    DEFAULT_BOUND
}

fn default_true() -> bool {
    true
}

enum PolarizationAxes {
    Multiples(Vec<Q>),
    Box(Vec<Vec<i64>>),
}

/// The parameter box, laid out as independent axes.
pub struct Plan {
    pub surface: BaseSurface,
    mode: Mode,
    ns: Vec<i64>,
    xs: Vec<i64>,
    alpha: Vec<Vec<i64>>,
    c2e: Option<Vec<i64>>,
    eta: Vec<Vec<i64>>,
    lambdas: Vec<Q>,
    pol: PolarizationAxes,
    pub options: CheckOptions,
    pub emit: Emit,
    pub limit: Option<u64>,
}

fn box_axes(s: &BaseSurface, name: &str, b: &[IntRange]) -> Result<Vec<Vec<i64>>> {
    if b.len() > s.rank {
        return Err(Error::InvalidInput(format!("{name} has {} coordinates but the base has rank {}", b.len(), s.rank)));
    }
    let mut axes: Vec<Vec<i64>> = b.iter().map(IntRange::values).collect();
    axes.resize(s.rank, vec![0]);
    Ok(axes)
}

impl SearchConfig {
    pub fn plan(&self) -> Result<Plan> {
        let s = BaseSurface::new(self.base)?;
        if self.bound < 1 {
            return Err(Error::InvalidInput("bound must be positive".into()));
        }
        let ns = self.n_range.values();
        if ns.iter().any(|&n| !(1..=64).contains(&n)) {
            return Err(Error::InvalidInput("n_range must lie in 1..=64".into()));
        }
        let alpha = box_axes(&s, "alpha_box", &self.alpha_box)?;
        let (c2e, eta, lambdas) = match self.mode {
            Mode::Pullback => {
                if self.eta_box.is_some() || self.lambda_range.is_some() {
                    return Err(Error::InvalidInput("eta_box and lambda_range need mode spectral".into()));
                }
                (self.c2e_range.as_ref().map(IntRange::values), Vec::new(), Vec::new())
            }
            Mode::Spectral => {
                if self.c2e_range.is_some() {
                    return Err(Error::InvalidInput("c2E_range needs mode pullback".into()));
                }
                let eta = self.eta_box.as_ref().ok_or_else(|| Error::InvalidInput("spectral mode needs eta_box".into()))?;
                let lambdas = self
                    .lambda_range
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("spectral mode needs lambda_range".into()))?;
                (None, box_axes(&s, "eta_box", eta)?, lambdas.values())
            }
        };
        let pol = match (&self.h_box, &self.h_range) {
            (Some(_), Some(_)) => return Err(Error::InvalidInput("give either H_box or h_range".into())),
            (Some(b), None) => PolarizationAxes::Box(box_axes(&s, "H_box", b)?),
            (None, Some(h)) => PolarizationAxes::Multiples(h.values()),
            (None, None) if !s.is_enriques() && self.mode == Mode::Pullback => PolarizationAxes::Multiples(vec![Q::one()]),
            (None, None) => return Err(Error::InvalidInput("this search needs H_box".into())),
        };
        let emit = self.emit.unwrap_or(if self.require.is_some() { Emit::Passing } else { Emit::All });
        Ok(Plan {
            surface: s,
            mode: self.mode,
            ns,
            xs: self.x_range.values(),
            alpha,
            c2e,
            eta,
            lambdas,
            pol,
            options: CheckOptions { require: self.require, bound: self.bound, short_circuit: self.short_circuit },
            emit,
            limit: self.limit,
        })
    }
}

impl Plan {
    fn axis_lengths(&self) -> Vec<usize> {
        let mut lens = vec![self.ns.len(), self.xs.len()];
        lens.extend(self.alpha.iter().map(Vec::len));
        match self.mode {
            Mode::Pullback => lens.push(self.c2e.as_ref().map_or(1, Vec::len)),
            Mode::Spectral => {
                lens.extend(self.eta.iter().map(Vec::len));
                lens.push(self.lambdas.len());
            }
        }
        match &self.pol {
            PolarizationAxes::Multiples(h) => lens.push(h.len()),
            PolarizationAxes::Box(b) => lens.extend(b.iter().map(Vec::len)),
        }
        lens
    }

    /// Number of candidates in the box.
    pub fn volume(&self) -> u64 {
        self.axis_lengths().iter().map(|&l| l as u64).product()
    }

    fn candidate(&self, idx: u64) -> (BundleSpec<Q>, Polarization) {
        let lens = self.axis_lengths();
        let mut digits = vec![0usize; lens.len()];
        let mut rest = idx;
        for (d, &l) in digits.iter_mut().zip(&lens).rev() {
            *d = (rest % l as u64) as usize;
            rest /= l as u64;
        }
        let mut it = digits.into_iter();
        let mut next = || it.next().expect("axis count");
        let s = &self.surface;
        let n = self.ns[next()] as u32;
        let x = self.xs[next()];
        let alpha: Vec<i64> = self.alpha.iter().map(|ax| ax[next()]).collect();
        let alpha = DivisorClass::<Q>::from_ints(&alpha);
        let twist = DivisorX::new(Q::from_integer(x.into()), alpha.clone());
        let bundle = match self.mode {
            Mode::Pullback => {
                let d = next();
                let c2e = match &self.c2e {
                    Some(v) => Q::from_integer(v[d].into()),
                    None => {
                        let nn = n as i64;
                        Q::from_integer((s.c2 + 11 * s.c1_squared()).into())
                            + Q::new((nn * (nn + 1)).into(), 2) * s.square(&alpha).expect("rank checked")
                    }
                };
                BundleSpec::pullback(n, c2e, twist)
            }
            Mode::Spectral => {
                let eta: Vec<i64> = self.eta.iter().map(|ax| ax[next()]).collect();
                let lambda = self.lambdas[next()];
                BundleSpec::spectral(n, DivisorClass::from_ints(&eta), lambda, twist)
            }
        };
        let pol = match &self.pol {
            PolarizationAxes::Multiples(h) => Polarization::multiple(h[next()]),
            PolarizationAxes::Box(b) => {
                let h: Vec<i64> = b.iter().map(|ax| ax[next()]).collect();
                Polarization::explicit(DivisorClass::from_ints(&h))
            }
        };
        (bundle, pol)
    }

    pub fn check(&self, idx: u64) -> ModelRecord {
        let (bundle, pol) = self.candidate(idx);
        let mut rec = check_model(&self.surface, &bundle, &pol, &self.options);
        rec.index = Some(idx);
        rec
    }

    fn emits(&self, rec: &ModelRecord) -> bool {
        self.emit == Emit::All || rec.passed()
    }
}

/// Lazily checks every candidate in lexicographic order and yields the
/// records selected by `emit`, up to `limit`.
pub fn enumerate_models(config: &SearchConfig) -> Result<impl Iterator<Item = ModelRecord>> {
    let plan = config.plan()?;
    let limit = plan.limit.map_or(usize::MAX, |l| l.min(usize::MAX as u64) as usize);
    let emit_all = plan.emit == Emit::All;
    let volume = plan.volume();
    Ok((0..volume)
        .map(move |i| plan.check(i))
        .filter(move |r| emit_all || r.passed())
        .take(limit))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub validity: u64,
    pub anomaly: u64,
    pub nonsplit: u64,
    pub stability: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub scanned: u64,
    pub passed: u64,
    pub emitted: u64,
    pub failures: StageCounts,
}

impl SearchSummary {
    fn count(&mut self, rec: &ModelRecord) {
        self.scanned += 1;
        match rec.overall.failed_stage {
            None => self.passed += 1,
            Some("validity") => self.failures.validity += 1,
            Some("anomaly") => self.failures.anomaly += 1,
            Some("nonsplit") => self.failures.nonsplit += 1,
            Some(_) => self.failures.stability += 1,
        }
    }
}

/// Scan the whole box on `jobs` worker threads and write one JSON record per
/// line, followed by a `#`-prefixed summary line. Output does not depend on `jobs`.
pub fn run_search<W: Write>(config: &SearchConfig, jobs: usize, limit: Option<u64>, out: &mut W) -> Result<SearchSummary> {
    let mut plan = config.plan()?;
    if limit.is_some() {
        plan.limit = limit;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
    let volume = plan.volume();
    let cap = plan.limit.unwrap_or(u64::MAX);
    let mut summary = SearchSummary::default();
    let mut start = 0u64;
    while start < volume {
        let end = (start + CHUNK as u64).min(volume);
        let records: Vec<ModelRecord> = pool.install(|| (start..end).into_par_iter().map(|i| plan.check(i)).collect());
        for rec in &records {
            summary.count(rec);
            if summary.emitted < cap && plan.emits(rec) {
                let line = serde_json::to_string(rec).map_err(|e| Error::InvalidInput(e.to_string()))?;
                writeln!(out, "{line}").map_err(io)?;
                summary.emitted += 1;
            }
        }
        start = end;
    }
    let line = serde_json::to_string(&summary).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(out, "# {line}").map_err(io)?;
    out.flush().map_err(io)?;
    Ok(summary)
}
