use cybundle::lattice::{BaseSurface, DivisorClass, SurfaceKind};
use cybundle::ring::{c2_tangent, divisor_square, pair_four_two, triple_product, DivisorX};
use cybundle::Rational;
use proptest::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn surfaces() -> Vec<BaseSurface> {
    [SurfaceKind::Hirzebruch(0), SurfaceKind::DelPezzo(0), SurfaceKind::DelPezzo(3), SurfaceKind::DelPezzo(8), SurfaceKind::Enriques]
        .into_iter()
        .map(|k| BaseSurface::new(k).unwrap())
        .collect()
}

fn frac() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn divisor(rank: usize) -> impl Strategy<Value = DivisorX<Rational>> {
    (frac(), prop::collection::vec(frac(), rank)).prop_map(|(x, a)| DivisorX::new(x, DivisorClass::new(a)))
}

fn surface_and(count: usize) -> impl Strategy<Value = (BaseSurface, Vec<DivisorX<Rational>>)> {
    (0..5usize).prop_flat_map(move |i| {
        let s = surfaces().swap_remove(i);
        let rank = s.rank;
        (Just(s), prop::collection::vec(divisor(rank), count))
    })
}

/// Expand `D1 D2 D3` monomial by monomial using only
/// `sigma^3 = c1^2`, `sigma^2 a = -c1.a`, `sigma a b = a.b`, `a b c = 0`.
fn oracle_triple(s: &BaseSurface, d: [&DivisorX<Rational>; 3]) -> Rational {
    let c1 = s.c1::<Rational>();
    let dot = |a: &DivisorClass<Rational>, b: &DivisorClass<Rational>| s.intersect(a, b).unwrap();
    let mut total = q(0);
    for mask in 0..8u8 {
        let sigmas: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let bases: Vec<usize> = (0..3).filter(|i| mask & (1 << i) == 0).collect();
        let coeff: Rational = sigmas.iter().map(|&i| d[i].x).product();
        let value = match sigmas.len() {
            3 => q(s.c1_squared()),
            2 => -dot(&c1, &d[bases[0]].alpha),
            1 => dot(&d[bases[0]].alpha, &d[bases[1]].alpha),
            _ => q(0),
        };
        total += coeff * value;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triple_product_symmetric((s, d) in surface_and(3)) {
        let base = triple_product(&s, &d[0], &d[1], &d[2]).unwrap();
        for p in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            prop_assert_eq!(triple_product(&s, &d[p[0]], &d[p[1]], &d[p[2]]).unwrap(), base);
        }
    }

    #[test]
    fn triple_product_linear((s, d) in surface_and(4), k in frac()) {
        let combo = d[0].scale(&k).add(&d[3]).unwrap();
        let lhs = triple_product(&s, &combo, &d[1], &d[2]).unwrap();
        let rhs = k * triple_product(&s, &d[0], &d[1], &d[2]).unwrap() + triple_product(&s, &d[3], &d[1], &d[2]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn triple_product_matches_monomial_expansion((s, d) in surface_and(3)) {
        prop_assert_eq!(triple_product(&s, &d[0], &d[1], &d[2]).unwrap(), oracle_triple(&s, [&d[0], &d[1], &d[2]]));
    }

    #[test]
    fn cube_polynomial((s, d) in surface_and(1)) {
        let d = &d[0];
        let c1a = s.intersect(&s.c1(), &d.alpha).unwrap();
        let a2 = s.square(&d.alpha).unwrap();
        let x = d.x;
        let expected = x * x * x * q(s.c1_squared()) - q(3) * x * x * c1a + q(3) * x * a2;
        prop_assert_eq!(triple_product(&s, d, d, d).unwrap(), expected);
    }

    #[test]
    fn square_then_pair((s, d) in surface_and(2)) {
        let sq = divisor_square(&s, &d[0]).unwrap();
        prop_assert_eq!(pair_four_two(&s, &sq, &d[0]).unwrap(), triple_product(&s, &d[0], &d[0], &d[0]).unwrap());
        prop_assert_eq!(pair_four_two(&s, &sq, &d[1]).unwrap(), triple_product(&s, &d[0], &d[0], &d[1]).unwrap());
    }

    #[test]
    fn polarization_cube((s, d) in surface_and(1), z in frac(), h in prop::collection::vec(frac(), 10)) {
        let d = &d[0];
        let h = DivisorClass::new(h[..s.rank].to_vec());
        let j = DivisorX::new(z, h.clone());
        let c1 = s.c1::<Rational>();
        let shifted = h.sub(&c1.scale(&z)).unwrap();
        let doubled = h.scale(&q(2)).sub(&c1.scale(&z)).unwrap();
        let expected = d.x * s.square(&shifted).unwrap() + z * s.intersect(&doubled, &d.alpha).unwrap();
        prop_assert_eq!(triple_product(&s, d, &j, &j).unwrap(), expected);
    }

    #[test]
    fn enriques_ignores_torsion(d in prop::collection::vec(divisor(10), 3), bits in prop::collection::vec(any::<bool>(), 3)) {
        let s = BaseSurface::new(SurfaceKind::Enriques).unwrap();
        let mut marked = d.clone();
        for (m, b) in marked.iter_mut().zip(&bits) {
            m.alpha.torsion = *b;
        }
        prop_assert_eq!(
            triple_product(&s, &marked[0], &marked[1], &marked[2]).unwrap(),
            triple_product(&s, &d[0], &d[1], &d[2]).unwrap()
        );
        let sq = divisor_square(&s, &marked[0]).unwrap();
        prop_assert_eq!(pair_four_two(&s, &sq, &marked[1]).unwrap(), pair_four_two(&s, &divisor_square(&s, &d[0]).unwrap(), &d[1]).unwrap());
    }
}

#[test]
fn enriques_tangent_class() {
    let s = BaseSurface::new(SurfaceKind::Enriques).unwrap();
    let c2 = c2_tangent::<Rational>(&s);
    assert!(c2.beta.is_numerically_zero());
    assert_eq!(c2.fiber, q(12));
}

#[test]
fn tangent_class_f0() {
    let s = BaseSurface::new(SurfaceKind::Hirzebruch(0)).unwrap();
    let c2 = c2_tangent::<Rational>(&s);
    assert_eq!(c2.beta, DivisorClass::from_ints(&[24, 24]));
    assert_eq!(c2.fiber, q(92));
}
