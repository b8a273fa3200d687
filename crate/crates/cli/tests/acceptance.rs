//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; all
//! comparisons are exact rational equality (tolerance zero).

use std::process::Command;

use cybundle::anomaly::{anomaly_class, solve_alpha_zero, solve_c2e_zero, spectral_af};
use cybundle::bundle::BundleSpec;
use cybundle::lattice::{exceptional_classes, BaseSurface, DivisorClass, SurfaceKind};
use cybundle::nonsplit::{spectral_nonsplit, w0_nonsplit_delpezzo};
use cybundle::ring::{c2_tangent, divisor_square, pair_four_two, triple_product, DivisorX};
use cybundle::search::{enumerate_models, SearchConfig};
use cybundle::windows::{
    delpezzo_closed_form, enriques_closed_form, spectral_stability_check, window_delpezzo, window_enriques,
};
use cybundle::Rational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const TOLERANCE: &str = "exact (0)";

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn report(id: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {id} [{name}]: PASS ({detail}; tolerance {TOLERANCE})"),
        Err(why) => {
            println!("criterion {id} [{name}]: FAIL ({why}; tolerance {TOLERANCE})");
            panic!("criterion {id} failed: {why}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f0() -> BaseSurface {
    BaseSurface::new(SurfaceKind::Hirzebruch(0)).unwrap()
}

#[test]
fn criterion_1_so10_zero_anomaly() {
    let run = || -> Result<String, String> {
        let s = f0();
        let sol = solve_alpha_zero::<Rational>(&s, 3, 1).map_err(|e| e.to_string())?;
        ensure(sol.alpha == DivisorClass::from_ints(&[-1, -1]), || format!("alpha = {:?}", sol.alpha.coeffs))?;
        ensure(sol.multiple == Rational::new(-1, 2), || format!("alpha = {} c1", sol.multiple))?;
        let c2e = solve_c2e_zero(&s, 3, &sol.alpha).map_err(|e| e.to_string())?;
        ensure(c2e == 104, || format!("c2(E) = {c2e}"))?;
        let spec = BundleSpec::pullback(3, q(c2e), DivisorX::new(q(1), sol.alpha));
        let out = anomaly_class(&s, &spec).map_err(|e| e.to_string())?;
        ensure(out.w_b.is_zero() && out.af == q(0), || format!("wB = {:?}, af = {}", out.w_b.coeffs, out.af))?;
        Ok("alpha = (-1,-1), c2(E) = 104, wB = 0, af = 0".into())
    };
    report(1, "SO(10) model on F0", run());
}

#[test]
fn criterion_2_e6_and_w0_nonsplit() {
    let run = || -> Result<String, String> {
        let s = f0();
        let sol = solve_alpha_zero::<Rational>(&s, 2, 2).map_err(|e| e.to_string())?;
        ensure(sol.alpha.is_zero(), || format!("alpha = {:?}", sol.alpha.coeffs))?;
        let c2e = solve_c2e_zero(&s, 2, &sol.alpha).map_err(|e| e.to_string())?;
        ensure(c2e == 92, || format!("c2(E) = {c2e}"))?;
        let mut values = Vec::new();
        for (n, x) in [(3u32, 1i64), (2, 2)] {
            let v = w0_nonsplit_delpezzo::<Rational>(n, x, 8).map_err(|e| e.to_string())?;
            ensure(v.pass, || format!("(n,x)=({n},{x}) fails {}: {}", v.clause, v.value))?;
            values.push(format!("({n},{},{x}): {} > 24", n + 1, v.value));
        }
        Ok(format!("alpha = 0, c2(E) = 92, {}", values.join(", ")))
    };
    report(2, "E6 model and [W]=0 non-split inequalities", run());
}

#[test]
fn criterion_3_spectral_f0() {
    let run = || -> Result<String, String> {
        let s = f0();
        let h = DivisorClass::<Rational>::from_ints(&[3, 34]);
        let alpha = DivisorClass::<Rational>::from_ints(&[1, -11]);
        let eta = DivisorClass::<Rational>::from_ints(&[24, 24]);
        let a_h = s.intersect(&alpha, &h).map_err(|e| e.to_string())?;
        ensure(a_h == q(1), || format!("alpha.H = {a_h}"))?;
        let min = s.min_positive_degree(&h, 50).map_err(|e| e.to_string())?;
        ensure(min.value == 3, || format!("min degree = {}", min.value))?;
        let v = spectral_stability_check(&s, 2, &alpha, &h, 50).map_err(|e| e.to_string())?;
        ensure(v.pass && v.value == q(2) && v.threshold == Some(q(3)), || format!("{v:?}"))?;
        let ns = spectral_nonsplit(&s, 2, 3, &eta, &alpha).map_err(|e| e.to_string())?;
        ensure(ns.pass && ns.value == q(1800), || format!("non-split value {}", ns.value))?;
        let af = spectral_af(&s, 2, &Rational::new(3, 2), &alpha, &eta).map_err(|e| e.to_string())?;
        let displayed = af.af_displayed.ok_or("displayed value missing")?;
        ensure(!af.agree && af.af_direct != displayed, || "discrepancy not flagged".to_string())?;
        Ok(format!(
            "alpha.H = 1, min degree 3, 0 < 2 < 3, non-split 1800 > 0, af direct {} vs displayed {} flagged",
            af.af_direct, displayed
        ))
    };
    report(3, "spectral extension on F0", run());
}

#[test]
fn criterion_4_enriques_spectral_range() {
    let run = || -> Result<String, String> {
        let s = BaseSurface::new(SurfaceKind::Enriques).unwrap();
        let h = s.padded::<Rational>(&[5, 6]).unwrap();
        let alpha = s.padded::<Rational>(&[1, -1]).unwrap();
        let mut passing = Vec::new();
        for n in 1..=12u32 {
            let v = spectral_stability_check(&s, n, &alpha, &h, 50).map_err(|e| e.to_string())?;
            if v.pass {
                passing.push(n);
            }
        }
        ensure(passing == vec![1, 2, 3, 4], || format!("passing n = {passing:?}"))?;
        Ok("passes for n in {1,2,3,4}, fails for 5..=12".into())
    };
    report(4, "Enriques spectral stability range", run());
}

#[test]
fn criterion_5_window_closed_forms() {
    let run = || -> Result<String, String> {
        let mut compared = 0;
        for n in 1..=6u32 {
            for x in -5i64..=5 {
                for a in -8i64..=8 {
                    if x * a >= 0 || x.abs() >= a.abs() {
                        continue;
                    }
                    for hsq in (2..=12).step_by(2) {
                        let w = window_enriques::<Rational>(n, x, a, hsq);
                        let (lo, hi) = enriques_closed_form::<Rational>(n, x, a, hsq).ok_or("closed form undefined")?;
                        ensure(w.nonempty && w.lower == lo && w.upper == Some(hi), || {
                            format!("z-window ({n},{x},{a},{hsq}): {:?} vs ({lo},{hi})", (w.lower, w.upper))
                        })?;
                        compared += 1;
                    }
                    for c1sq in [1, 8, 9] {
                        let w = window_delpezzo::<Rational>(n, x, a, c1sq, &q(1)).map_err(|e| e.to_string())?;
                        let (lo, hi) = delpezzo_closed_form::<Rational>(n, x, a, c1sq, &q(1)).ok_or("closed form undefined")?;
                        ensure(w.lower == lo && w.upper == Some(hi), || {
                            format!("u-window ({n},{x},{a},{c1sq}): {:?} vs ({lo},{hi})", (w.lower, w.upper))
                        })?;
                        compared += 1;
                    }
                }
            }
        }
        Ok(format!("{compared} intervals equal"))
    };
    report(5, "raw solver equals closed-form windows", run());
}

#[test]
fn criterion_6_enriques_x_nonzero_scan() {
    let run = || -> Result<String, String> {
        let config: SearchConfig = serde_json::from_str(
            r#"{"base":"enriques","mode":"pullback","n_range":[2,4],"x_range":[[-3,-1],[1,3]],
                "alpha_box":[[-10,10],[-10,10]],"H_box":[[2,3],[3,4]],"emit":"all","short_circuit":false}"#,
        )
        .map_err(|e| e.to_string())?;
        let mut scanned = 0u64;
        let mut effective = 0u64;
        let mut hits = Vec::new();
        for rec in enumerate_models(&config).map_err(|e| e.to_string())? {
            scanned += 1;
            let eff = rec.anomaly.as_ref().is_some_and(|a| a.w_effective);
            if eff {
                effective += 1;
            }
            let signs = rec.nonsplit.as_ref().is_some_and(|v| v.iter().all(|c| c.pass));
            if eff && signs {
                hits.push(serde_json::to_string(&rec.bundle).unwrap());
            }
        }
        ensure(hits.is_empty(), || format!("{} passing records, first {}", hits.len(), hits[0]))?;
        ensure(effective > 0, || "no record had effective wB; scan is vacuous".to_string())?;
        Ok(format!("{scanned} models scanned, {effective} with effective W, 0 passing the sign conditions"))
    };
    report(6, "Enriques pullback with x != 0 excluded", run());
}

fn frac() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

#[test]
fn criterion_7_ring_properties() {
    let run = || -> Result<String, String> {
        let kinds = [SurfaceKind::Hirzebruch(0), SurfaceKind::DelPezzo(2), SurfaceKind::DelPezzo(6), SurfaceKind::Enriques];
        let strategy = (0..kinds.len(), prop::collection::vec(frac(), 4), prop::collection::vec(prop::collection::vec(frac(), 10), 4));
        let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
        runner
            .run(&strategy, |(k, xs, alphas)| {
                let s = BaseSurface::new(kinds[k]).unwrap();
                let d: Vec<DivisorX<Rational>> =
                    xs.iter().zip(&alphas).map(|(x, a)| DivisorX::new(*x, DivisorClass::new(a[..s.rank].to_vec()))).collect();
                let t = |a: &DivisorX<Rational>, b: &DivisorX<Rational>, c: &DivisorX<Rational>| triple_product(&s, a, b, c).unwrap();
                let base = t(&d[0], &d[1], &d[2]);
                for (a, b, c) in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
                    prop_assert_eq!(t(&d[a], &d[b], &d[c]), base);
                }
                let k = xs[3];
                let mixed = d[0].scale(&k).add(&d[3]).unwrap();
                prop_assert_eq!(t(&mixed, &d[1], &d[2]), k * base + t(&d[3], &d[1], &d[2]));
                let (x, a) = (d[0].x, &d[0].alpha);
                let c1a = s.intersect(&s.c1(), a).unwrap();
                let cube = x * x * x * q(s.c1_squared()) - q(3) * x * x * c1a + q(3) * x * s.square(a).unwrap();
                prop_assert_eq!(t(&d[0], &d[0], &d[0]), cube);
                let sq = divisor_square(&s, &d[0]).unwrap();
                prop_assert_eq!(pair_four_two(&s, &sq, &d[0]).unwrap(), t(&d[0], &d[0], &d[0]));
                Ok(())
            })
            .map_err(|e| e.to_string())?;
        let e = BaseSurface::new(SurfaceKind::Enriques).unwrap();
        let c2 = c2_tangent::<Rational>(&e);
        ensure(c2.beta.is_numerically_zero() && c2.fiber == q(12), || format!("c2(X) on Enriques = {:?}", c2))?;
        Ok("symmetry, linearity, cubic identity, square/pair consistency on 1000 inputs; c2(X) = 12 F on Enriques".into())
    };
    report(7, "ring properties", run());
}

#[test]
fn criterion_8_exceptional_counts() {
    let run = || -> Result<String, String> {
        let known = [1usize, 3, 6, 10, 16, 27, 56, 240];
        let counts: Vec<usize> = (1..=8).map(|k| exceptional_classes(k, 20).len()).collect();
        ensure(counts == known, || format!("counts {counts:?}"))?;
        Ok(format!("counts {counts:?}"))
    };
    report(8, "(-1)-class counts on dP_k", run());
}

#[test]
fn criterion_9_search_determinism() {
    let run = || -> Result<String, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config = dir.path().join("box.json");
        std::fs::write(
            &config,
            r#"{"base":"dP3","mode":"pullback","n_range":[2,3],"x_range":[[-2,-1],[1,2]],
                "alpha_box":[[-2,2],[-2,2],[-2,2],[-1,1]],"c2E_range":[10,14]}"#,
        )
        .map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            let out = dir.path().join(format!("jobs{jobs}.jsonl"));
            let status = Command::new(env!("CARGO_BIN_EXE_cybundle"))
                .args(["search", config.to_str().unwrap(), "--jobs", jobs, "--out", out.to_str().unwrap()])
                .env_remove("CYBUNDLE_BOUND")
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.success(), || format!("search --jobs {jobs} exited with {status}"))?;
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        ensure(outputs[0] == outputs[1], || "outputs differ between --jobs 1 and --jobs 8".to_string())?;
        let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
        ensure(lines > 1000, || format!("only {lines} lines"))?;
        Ok(format!("{lines} lines, {} bytes, identical", outputs[0].len()))
    };
    report(9, "search output independent of --jobs", run());
}
