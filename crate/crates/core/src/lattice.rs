//! Base surfaces of the elliptic fibration as integral lattices.
//!
//! Supported bases are the Hirzebruch surface `F0` (with `F1` folded into the
//! del Pezzo family as `dP1`), the del Pezzo surfaces `dP0..dP8` in the basis
//! `(l, e1, .., ek)`, and a generic (unnodal) Enriques surface whose free part
//! is `U + E8(-1)` and whose canonical class is the 2-torsion element.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default coefficient bound for cone enumerations.
pub const DEFAULT_BOUND: i64 = 50;

/// Selector for the positive component of `{C^2 >= 0}` on the Enriques lattice.
pub const ENRIQUES_POSITIVE_SELECTOR: [i64; 2] = [1, 1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    Hirzebruch(u8),
    DelPezzo(u8),
    Enriques,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Hirzebruch(r) => write!(f, "F{r}"),
            SurfaceKind::DelPezzo(k) => write!(f, "dP{k}"),
            SurfaceKind::Enriques => f.write_str("enriques"),
        }
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedSurface(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        if lower == "enriques" {
            return Ok(SurfaceKind::Enriques);
        }
        if let Some(k) = lower.strip_prefix("dp") {
            return k.parse().map(SurfaceKind::DelPezzo).map_err(|_| bad());
        }
        if let Some(r) = lower.strip_prefix('f') {
            return r.parse().map(SurfaceKind::Hirzebruch).map_err(|_| bad());
        }
        Err(bad())
    }
}

/// Integral or rational class in `H^2(B)`, plus a 2-torsion bit that is only
/// ever set on the Enriques surface.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorClass<T> {
    pub coeffs: Vec<T>,
    pub torsion: bool,
}

impl<T: Scalar> DivisorClass<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        DivisorClass { coeffs, torsion: false }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        DivisorClass::new(coeffs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass::new(vec![T::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// True when the free part vanishes (torsion may still be set).
    pub fn is_numerically_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        !self.torsion && self.is_numerically_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64_exact()).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank(), other.rank())?;
        Ok(DivisorClass {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
            torsion: self.torsion ^ other.torsion,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            torsion: self.torsion,
        }
    }

    /// Multiply by `k`. The torsion bit survives only odd integer multiples.
    pub fn scale(&self, k: &T) -> Self {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect(),
            torsion: self.torsion && k.is_odd_integer(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DivisorClass<U> {
        DivisorClass {
            coeffs: self.coeffs.iter().map(f).collect(),
            torsion: self.torsion,
        }
    }
}

impl<T: Scalar> Serialize for DivisorClass<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a, T>(&'a [T]);
        impl<T: Scalar> Serialize for Coeffs<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for c in self.0 {
                    match c.to_i64_exact() {
                        Some(i) => seq.serialize_element(&i)?,
                        None => seq.serialize_element(&c.to_string())?,
                    }
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("DivisorClass", 2)?;
        st.serialize_field("coeffs", &Coeffs(&self.coeffs))?;
        st.serialize_field("torsion", &u8::from(self.torsion))?;
        st.end()
    }
}

impl<'de, T: Scalar> Deserialize<'de> for DivisorClass<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct CoeffList<T>(Vec<T>);
        impl<'de, T: Scalar> Deserialize<'de> for CoeffList<T> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                struct V<T>(std::marker::PhantomData<T>);
                impl<'de, T: Scalar> Visitor<'de> for V<T> {
                    type Value = CoeffList<T>;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str("a list of coefficients")
                    }
                    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                        let mut out = Vec::new();
                        while let Some(c) = seq.next_element::<Coeff<T>>()? {
                            out.push(c.0);
                        }
                        Ok(CoeffList(out))
                    }
                }
                d.deserialize_seq(V(std::marker::PhantomData))
            }
        }
        struct Coeff<T>(T);
        impl<'de, T: Scalar> Deserialize<'de> for Coeff<T> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                crate::scalar::serde_exact::deserialize(d).map(Coeff)
            }
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        #[serde(bound = "T: Scalar")]
        struct Raw<T> {
            coeffs: CoeffList<T>,
            #[serde(default)]
            torsion: u8,
        }
        struct Either<T>(std::marker::PhantomData<T>);
        impl<'de, T: Scalar> Visitor<'de> for Either<T> {
            type Value = Raw<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of coefficients or {\"coeffs\": [...], \"torsion\": 0|1}")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(c) = seq.next_element::<Coeff<T>>()? {
                    out.push(c.0);
                }
                Ok(Raw { coeffs: CoeffList(out), torsion: 0 })
            }
            fn visit_map<A: de::MapAccess<'de>>(self, map: A) -> std::result::Result<Self::Value, A::Error> {
                Raw::deserialize(de::value::MapAccessDeserializer::new(map))
            }
        }
        let raw = d.deserialize_any(Either::<T>(std::marker::PhantomData))?;
        if raw.torsion > 1 {
            return Err(de::Error::custom("torsion must be 0 or 1"));
        }
        Ok(DivisorClass { coeffs: raw.coeffs.0, torsion: raw.torsion == 1 })
    }
}

fn check_rank(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::RankMismatch { expected, got })
    }
}

/// Three-valued answer for cone queries that may be out of reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Undecidable,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConePosition {
    pub effective: bool,
    pub nef: Decision,
    pub ample: Decision,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinDegree {
    pub value: i64,
    pub witness: DivisorClass<crate::Rational>,
    pub bound_limited: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSurface {
    pub kind: SurfaceKind,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    c1: Vec<i64>,
    c1_torsion: bool,
    pub c2: i64,
    /// Effective-cone generators; empty on the Enriques surface.
    pub cone_generators: Vec<Vec<i64>>,
}

impl BaseSurface {
    pub fn new(kind: SurfaceKind) -> Result<Self> {
        match kind {
            SurfaceKind::Hirzebruch(0) => Ok(BaseSurface {
                kind,
                rank: 2,
                gram: vec![vec![0, 1], vec![1, 0]],
                c1: vec![2, 2],
                c1_torsion: false,
                c2: 4,
                cone_generators: vec![vec![1, 0], vec![0, 1]],
            }),
            SurfaceKind::Hirzebruch(1) => BaseSurface::new(SurfaceKind::DelPezzo(1)),
            SurfaceKind::DelPezzo(k) if k <= 8 => {
                let k = k as usize;
                let rank = k + 1;
                let mut gram = vec![vec![0; rank]; rank];
                gram[0][0] = 1;
                for (i, row) in gram.iter_mut().enumerate().skip(1) {
                    row[i] = -1;
                }
                let mut c1 = vec![-1; rank];
                c1[0] = 3;
                Ok(BaseSurface {
                    kind: SurfaceKind::DelPezzo(k as u8),
                    rank,
                    gram,
                    c1,
                    c1_torsion: false,
                    c2: 3 + k as i64,
                    cone_generators: del_pezzo_generators(k).to_vec(),
                })
            }
            SurfaceKind::Enriques => {
                let mut gram = vec![vec![0; 10]; 10];
                gram[0][1] = 1;
                gram[1][0] = 1;
                let e8 = e8_negative();
                for i in 0..8 {
                    for j in 0..8 {
                        gram[i + 2][j + 2] = e8[i][j];
                    }
                }
                Ok(BaseSurface {
                    kind,
                    rank: 10,
                    gram,
                    c1: vec![0; 10],
                    c1_torsion: true,
                    c2: 12,
                    cone_generators: Vec::new(),
                })
            }
            other => Err(Error::UnsupportedSurface(other.to_string())),
        }
    }

    pub fn is_enriques(&self) -> bool {
        self.kind == SurfaceKind::Enriques
    }

    pub fn c1<T: Scalar>(&self) -> DivisorClass<T> {
        DivisorClass {
            coeffs: self.c1.iter().map(|&c| T::from_i64(c)).collect(),
            torsion: self.c1_torsion,
        }
    }

    pub fn c1_squared(&self) -> i64 {
        pair_int(&self.gram, &self.c1, &self.c1)
    }

    pub fn class<T: Scalar>(&self, coeffs: &[i64]) -> Result<DivisorClass<T>> {
        check_rank(self.rank, coeffs.len())?;
        Ok(DivisorClass::from_ints(coeffs))
    }

    /// Pad a short coefficient list with zeros (e.g. a `U` vector on Enriques).
    pub fn padded<T: Scalar>(&self, coeffs: &[i64]) -> Result<DivisorClass<T>> {
        if coeffs.len() > self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: coeffs.len() });
        }
        let mut v = coeffs.to_vec();
        v.resize(self.rank, 0);
        Ok(DivisorClass::from_ints(&v))
    }

    /// `a^T G b`; torsion never contributes.
    pub fn intersect<T: Scalar>(&self, a: &DivisorClass<T>, b: &DivisorClass<T>) -> Result<T> {
        check_rank(self.rank, a.rank())?;
        check_rank(self.rank, b.rank())?;
        let mut acc = T::zero();
        for (i, row) in self.gram.iter().enumerate() {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for (j, &g) in row.iter().enumerate() {
                if g != 0 {
                    acc = acc + a.coeffs[i].clone() * T::from_i64(g) * b.coeffs[j].clone();
                }
            }
        }
        Ok(acc)
    }

    pub fn square<T: Scalar>(&self, a: &DivisorClass<T>) -> Result<T> {
        self.intersect(a, a)
    }

    pub fn cone_position<T: Scalar>(&self, c: &DivisorClass<T>) -> Result<ConePosition> {
        self.cone_position_bounded(c, DEFAULT_BOUND)
    }

    pub fn cone_position_bounded<T: Scalar>(&self, c: &DivisorClass<T>, bound: i64) -> Result<ConePosition> {
        check_rank(self.rank, c.rank())?;
        if self.is_enriques() {
            return self.enriques_cone_position(c, bound);
        }
        let effective = match c.to_ints() {
            Some(v) => self.in_generator_monoid(&v),
            None => false,
        };
        let mut nef = true;
        let mut strictly = true;
        for g in &self.cone_generators {
            let d = self.intersect(c, &DivisorClass::from_ints(g))?;
            if d.is_negative() {
                nef = false;
            }
            if !d.is_positive() {
                strictly = false;
            }
        }
        let ample = strictly && self.square(c)?.is_positive();
        Ok(ConePosition { effective, nef: Decision::from_bool(nef), ample: Decision::from_bool(ample) })
    }

    fn enriques_cone_position<T: Scalar>(&self, c: &DivisorClass<T>, bound: i64) -> Result<ConePosition> {
        let effective = c.is_integral() && self.enriques_effective(c)?;
        let in_u = c.coeffs[2..].iter().all(|v| v.is_zero());
        if !in_u {
            return Ok(ConePosition { effective, nef: Decision::Undecidable, ample: Decision::Undecidable });
        }
        let (x, y) = (&c.coeffs[0], &c.coeffs[1]);
        let nef = !x.is_negative() && !y.is_negative();
        let ample = nef && {
            let mut positive = true;
            'outer: for a in 0..=bound {
                for b in 0..=bound {
                    // effective classes of U: a*b >= 0 and a + b > 0
                    if a + b == 0 {
                        continue;
                    }
                    let deg = x.clone() * T::from_i64(b) + y.clone() * T::from_i64(a);
                    if !deg.is_positive() {
                        positive = false;
                        break 'outer;
                    }
                }
            }
            positive
        } && self.square(c)? >= T::from_i64(6);
        Ok(ConePosition { effective, nef: Decision::from_bool(nef), ample: Decision::from_bool(ample) })
    }

    fn enriques_effective<T: Scalar>(&self, c: &DivisorClass<T>) -> Result<bool> {
        if c.is_numerically_zero() {
            return Ok(false);
        }
        let selector = self.padded::<T>(&ENRIQUES_POSITIVE_SELECTOR)?;
        Ok(!self.square(c)?.is_negative() && self.intersect(c, &selector)?.is_positive())
    }

    /// Effectiveness of an integral class. A negative curve met negatively is a
    /// fixed component and is removed; what remains is effective iff it is nef,
    /// since integral nef classes on these bases are effective.
    fn in_generator_monoid(&self, target: &[i64]) -> bool {
        let mut rest = target.to_vec();
        loop {
            if rest.iter().all(|&v| v == 0) {
                return true;
            }
            // c1 is ample, so every effective class has positive degree
            if pair_int(&self.gram, &rest, &self.c1) <= 0 {
                return false;
            }
            let fixed = self
                .cone_generators
                .iter()
                .find(|g| pair_int(&self.gram, g, g) < 0 && pair_int(&self.gram, &rest, g) < 0);
            match fixed {
                Some(g) => rest.iter_mut().zip(g).for_each(|(r, g)| *r -= g),
                None => return self.cone_generators.iter().all(|g| pair_int(&self.gram, &rest, g) >= 0),
            }
        }
    }

    /// Minimal positive `H`-degree over effective classes, with a witness.
    pub fn min_positive_degree<T: Scalar>(&self, h: &DivisorClass<T>, bound: i64) -> Result<MinDegree> {
        if bound < 1 {
            return Err(Error::InvalidInput("bound must be positive".into()));
        }
        let pos = self.cone_position_bounded(h, bound)?;
        match pos.ample {
            Decision::Yes => {}
            Decision::No => return Err(Error::NotAmple),
            Decision::Undecidable => {
                return Err(Error::Undecidable("ampleness of the polarization".into()))
            }
        }
        let h = h.to_ints().ok_or(Error::NotAmple)?;
        if self.is_enriques() {
            // H lies in U, so only the U-part of an effective class has degree
            let (hx, hy) = (h[0], h[1]);
            let mut best: Option<(i64, [i64; 2])> = None;
            for a in 0..=bound {
                for b in 0..=bound {
                    if a + b == 0 {
                        continue;
                    }
                    let deg = a * hy + b * hx;
                    if deg > 0 && best.is_none_or(|(v, _)| deg < v) {
                        best = Some((deg, [a, b]));
                    }
                }
            }
            let (value, w) = best.ok_or(Error::NotAmple)?;
            let floor = (bound + 1) * hx.min(hy);
            return Ok(MinDegree {
                value,
                witness: self.padded(&w)?,
                bound_limited: floor < value,
            });
        }
        let mut best: Option<(i64, &Vec<i64>)> = None;
        for g in &self.cone_generators {
            let deg = pair_int(&self.gram, g, &h);
            if deg > 0 && best.is_none_or(|(v, _)| deg < v) {
                best = Some((deg, g));
            }
        }
        let (value, w) = best.ok_or(Error::NotAmple)?;
        Ok(MinDegree { value, witness: DivisorClass::from_ints(w), bound_limited: false })
    }
}

impl Serialize for BaseSurface {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BaseSurface", 2)?;
        st.serialize_field("kind", &self.kind.to_string())?;
        st.serialize_field("basis", "standard")?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for BaseSurface {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: String,
            #[serde(default)]
            basis: Option<String>,
        }
        let raw = Raw::deserialize(d)?;
        if let Some(b) = raw.basis.as_deref() {
            if b != "standard" {
                return Err(de::Error::custom(format!("unsupported basis {b:?}")));
            }
        }
        let kind: SurfaceKind = raw.kind.parse().map_err(de::Error::custom)?;
        BaseSurface::new(kind).map_err(de::Error::custom)
    }
}

pub(crate) fn pair_int(gram: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, row) in gram.iter().enumerate() {
        if a[i] == 0 {
            continue;
        }
        for (j, &g) in row.iter().enumerate() {
            acc += a[i] * g * b[j];
        }
    }
    acc
}

/// `E8(-1)`: the negated Cartan matrix, Bourbaki labelling.
fn e8_negative() -> [[i64; 8]; 8] {
    let mut m = [[0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = -2;
    }
    for (a, b) in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
        m[a][b] = 1;
        m[b][a] = 1;
    }
    m
}

/// Classes `E` on `dP_k` with `E^2 = -1` and `E.c1 = 1`, written
/// `E = d l - sum m_i e_i`, for `0 <= d <= bound`.
pub fn exceptional_classes(k: usize, bound: i64) -> Vec<Vec<i64>> {
    fn fill(slots: &mut Vec<i64>, left: usize, sq: i64, sum: i64, bound: i64, out: &mut Vec<Vec<i64>>, d: i64) {
        if left == 0 {
            if sq == 0 && sum == 0 {
                let mut class = Vec::with_capacity(slots.len() + 1);
                class.push(d);
                class.extend(slots.iter().map(|m| -m));
                out.push(class);
            }
            return;
        }
        // Cauchy-Schwarz, and m^2 = m (mod 2)
        if sum * sum > left as i64 * sq || (sq - sum).rem_euclid(2) != 0 {
            return;
        }
        let r = (sq as f64).sqrt() as i64 + 1;
        for m in (-r.min(bound))..=r.min(bound) {
            if m * m > sq {
                continue;
            }
            slots.push(m);
            fill(slots, left - 1, sq - m * m, sum - m, bound, out, d);
            slots.pop();
        }
    }

    let mut out = Vec::new();
    for d in 0..=bound {
        let mut slots = Vec::with_capacity(k);
        fill(&mut slots, k, d * d + 1, 3 * d - 1, bound, &mut out, d);
    }
    out
}

fn del_pezzo_generators(k: usize) -> &'static [Vec<i64>] {
    static CACHE: [OnceLock<Vec<Vec<i64>>>; 9] = [const { OnceLock::new() }; 9];
    CACHE[k].get_or_init(|| {
        let rank = k + 1;
        let mut gens = exceptional_classes(k, 20);
        match k {
            0 => gens.push(vec![1]),
            1 => gens.push(vec![1, -1]),
            // the anticanonical class is effective but not a sum of (-1)-curves
            8 => {
                let mut c1 = vec![-1; rank];
                c1[0] = 3;
                gens.push(c1);
            }
            _ => {}
        }
        gens
    })
}
