use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;

fn h(n: u8) -> Algebra {
    Algebra::heisenberg(Metric::euclidean(n).unwrap()).unwrap()
}

fn hm(n: u8) -> Algebra {
    Algebra::heisenberg(Metric::minkowski(n).unwrap()).unwrap()
}

fn ext(n: u8) -> Algebra {
    Algebra::extended(Metric::minkowski(n).unwrap()).unwrap()
}

fn parse(alg: Algebra, s: &str) -> NCPoly {
    NCPoly::parse(alg, s).unwrap()
}

fn commutator(a: &NCPoly, b: &NCPoly) -> NCPoly {
    a.checked_commutator(b).unwrap()
}

// ---------------------------------------------------------------------------
// Reference implementation: normal ordering by exhaustive adjacent swaps.
// ---------------------------------------------------------------------------

/// Rewrites one word `g₁ g₂ … g_k` into normal order by repeatedly applying
/// `d·c = c·d + s` to the leftmost derivative-before-coordinate pair. This is
/// exponentially slower than the production closed form but independently
/// correct, which is the point.
fn normal_order_word(
    algebra: Algebra,
    word: &[Generator],
    coeff: &GaussianRational,
    out: &mut Vec<(Monomial, GaussianRational)>,
) {
    for i in 0..word.len().saturating_sub(1) {
        let (d, c) = (word[i], word[i + 1]);
        if d.is_derivative() && c.is_coordinate() {
            let mut swapped = word.to_vec();
            swapped.swap(i, i + 1);
            normal_order_word(algebra, &swapped, coeff, out);
            if let Some(sign) = algebra.pairing(d, c) {
                let mut dropped = word.to_vec();
                dropped.drain(i..=i + 1);
                let scaled = coeff * &GaussianRational::from_integer(sign as i64);
                normal_order_word(algebra, &dropped, &scaled, out);
            }
            return;
        }
    }
    out.push((Monomial::from_factors(word.iter().map(|&g| (g, 1))), coeff.clone()));
}

fn mul_naive(a: &NCPoly, b: &NCPoly) -> NCPoly {
    let mut pieces = Vec::new();
    for (m1, c1) in a.terms() {
        for (m2, c2) in b.terms() {
            let word: Vec<Generator> = m1
                .factors()
                .iter()
                .chain(m2.factors())
                .flat_map(|&(g, e)| std::iter::repeat_n(g, e as usize))
                .collect();
            normal_order_word(a.algebra(), &word, &(c1 * c2), &mut pieces);
        }
    }
    NCPoly::from_terms(a.algebra(), pieces).unwrap()
}

// ---------------------------------------------------------------------------
// Construction and validation.
// ---------------------------------------------------------------------------

#[test]
fn metric_signs() {
    let e = Metric::euclidean(3).unwrap();
    let m = Metric::minkowski(4).unwrap();
    assert_eq!((1..=3).map(|k| e.sign(k)).collect::<Vec<_>>(), vec![1, 1, 1]);
    assert_eq!((1..=4).map(|k| m.sign(k)).collect::<Vec<_>>(), vec![-1, 1, 1, 1]);
    assert_eq!(m.g(1, 2), 0);
    assert_eq!(m.pair_weight(PairIndex::new(1, 3).unwrap()), -1);
    assert_eq!(m.pair_weight(PairIndex::new(2, 3).unwrap()), 1);
}

#[test]
fn pair_index_enumeration_and_rank() {
    let pairs = PairIndex::canonical_list(4);
    let expect = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    assert_eq!(pairs.len(), 6);
    for (i, p) in pairs.iter().enumerate() {
        assert_eq!((p.lo(), p.hi()), expect[i]);
        assert_eq!(p.rank(4), i);
    }
    assert!(PairIndex::new(2, 2).is_err());
    assert!(PairIndex::new(3, 2).is_err());
    assert_eq!(PairIndex::normalize(3, 2).unwrap(), (PairIndex::new(2, 3).unwrap(), true));
}

#[test]
fn generator_order_puts_coordinates_first() {
    let p = PairIndex::new(1, 2).unwrap();
    let coords = [Generator::XPair(p), Generator::PVec(1), Generator::XVec(1)];
    let derivs = [Generator::DPair(p), Generator::DVec(1), Generator::DAVec(1)];
    for c in coords {
        assert!(c.is_coordinate());
        for d in derivs {
            assert!(d.is_derivative());
            assert!(c < d, "{c} must sort before {d}");
        }
    }
}

#[test]
fn mode_mixing_is_a_construction_error() {
    let weyl = Algebra::weyl(3).unwrap();
    assert!(NCPoly::x_pair(weyl, 1, 2).is_err());
    assert!(NCPoly::p_vec(h(3), 1).is_err());
    assert!(NCPoly::x_vec(ext(3), 1).is_err());
    assert!(NCPoly::x_pair(h(3), 1, 4).is_err(), "index beyond the dimension");
    assert!(NCPoly::parse(weyl, "x[1,2]").is_err());
    // Same mode but different metrics are still distinct algebras.
    assert!(parse(h(2), "x[1,2]").checked_add(&parse(hm(2), "x[1,2]")).is_err());
}

#[test]
fn antisymmetric_construction_normalizes() {
    let alg = h(3);
    assert_eq!(NCPoly::x_pair(alg, 2, 1).unwrap(), -&NCPoly::x_pair(alg, 1, 2).unwrap());
    assert!(NCPoly::x_pair(alg, 2, 2).unwrap().is_zero());
    assert_eq!(parse(alg, "x[2,1]"), parse(alg, "-x[1,2]"));
    assert!(parse(alg, "x[1,1]").is_zero());
    assert_eq!(parse(alg, "d[2,1]^2"), parse(alg, "d[1,2]^2"));
}

#[test]
fn dimension_bounds() {
    assert!(Algebra::heisenberg(Metric::euclidean(1).unwrap()).is_err());
    assert!(Metric::euclidean(0).is_err());
    assert!(Algebra::weyl(1).is_ok());
}

// ---------------------------------------------------------------------------
// Products and commutators.
// ---------------------------------------------------------------------------

#[test]
fn single_swap_euclidean() {
    let alg = h(3);
    let product = parse(alg, "d[1,2]") * &parse(alg, "x[1,2]");
    assert_eq!(product, parse(alg, "x[1,2]*d[1,2] + 1"));
}

#[test]
fn pair_commutator_carries_the_metric_weight() {
    // [d[μν], x[μν]] = g(μ,μ)·g(ν,ν): -1 when one index is the time direction.
    let alg = hm(3);
    let c = commutator(&parse(alg, "d[1,2]"), &parse(alg, "x[1,2]"));
    assert_eq!(c, parse(alg, "-1"));
    let c = commutator(&parse(alg, "d[2,3]"), &parse(alg, "x[2,3]"));
    assert_eq!(c, parse(alg, "1"));
    assert!(commutator(&parse(alg, "d[1,2]"), &parse(alg, "x[1,3]")).is_zero());
}

#[test]
fn extended_mode_pairings() {
    let alg = ext(3);
    assert_eq!(commutator(&parse(alg, "dv[1]"), &parse(alg, "p[1]")), parse(alg, "-1"));
    assert_eq!(commutator(&parse(alg, "dv[2]"), &parse(alg, "p[2]")), parse(alg, "1"));
    assert!(commutator(&parse(alg, "dv[1]"), &parse(alg, "p[2]")).is_zero());
    // All cross-commutators between the pair family and the vector family vanish.
    for (a, b) in [("d[1,2]", "p[1]"), ("dv[1]", "x[1,2]"), ("d[1,2]", "dv[1]"), ("x[1,2]", "p[1]")]
    {
        assert!(commutator(&parse(alg, a), &parse(alg, b)).is_zero(), "[{a},{b}] must vanish");
    }
}

#[test]
fn vector_mode_pairing_is_kronecker() {
    let alg = Algebra::weyl(2).unwrap();
    assert_eq!(commutator(&parse(alg, "da[1]"), &parse(alg, "xa[1]")), parse(alg, "1"));
    assert!(commutator(&parse(alg, "da[1]"), &parse(alg, "xa[2]")).is_zero());
}

#[test]
fn multi_contraction_weights() {
    // d² x² = x²d² + 4s·x d + 2s² with s the pairing sign.
    let e = h(2);
    let product = parse(e, "d[1,2]^2") * &parse(e, "x[1,2]^2");
    assert_eq!(product, parse(e, "x[1,2]^2*d[1,2]^2 + 4*x[1,2]*d[1,2] + 2"));

    let m = hm(2);
    let product = parse(m, "d[1,2]^2") * &parse(m, "x[1,2]^2");
    assert_eq!(product, parse(m, "x[1,2]^2*d[1,2]^2 - 4*x[1,2]*d[1,2] + 2"));
}

#[test]
fn same_class_generators_commute() {
    let alg = ext(3);
    for (a, b) in [("d[1,2]", "d[1,3]"), ("d[1,2]*d[2,3]", "dv[3]"), ("x[1,2]*p[1]", "x[2,3]")] {
        assert!(commutator(&parse(alg, a), &parse(alg, b)).is_zero());
    }
}

#[test]
fn bounded_product_drops_unreachable_pairs() {
    let alg = h(3);
    let a = parse(alg, "x[1,2]*d[1,2]^2 + d[1,3]");
    let b = parse(alg, "x[1,3]*d[2,3]^3 + x[1,2]^2");
    for dmax in 0..=6 {
        assert_eq!(
            a.mul_bounded(&b, Some(dmax)).unwrap(),
            (&a * &b).truncate(dmax),
            "bound {dmax}"
        );
    }
}

// ---------------------------------------------------------------------------
// Action on coordinate polynomials.
// ---------------------------------------------------------------------------

#[test]
fn action_differentiates_with_the_pairing_sign() {
    let alg = h(3);
    let state = PolyState::new(parse(alg, "x[1,2]^2")).unwrap();
    let hit = parse(alg, "d[1,2]").act(&state).unwrap();
    assert_eq!(hit.poly(), &parse(alg, "2*x[1,2]"));

    let alg = hm(3);
    let state = PolyState::new(parse(alg, "x[1,2]")).unwrap();
    let hit = parse(alg, "d[1,2]").act(&state).unwrap();
    assert_eq!(hit.poly(), &parse(alg, "-1"));
}

#[test]
fn action_of_a_normal_ordered_operator() {
    let alg = h(3);
    let op = parse(alg, "x[1,2]*d[1,2]");
    let state = PolyState::new(parse(alg, "x[1,2] + x[1,3]")).unwrap();
    assert_eq!(op.act(&state).unwrap().poly(), &parse(alg, "x[1,2]"));
}

#[test]
fn action_on_the_unit_keeps_degree_zero_terms() {
    let alg = h(3);
    let op = parse(alg, "x[1,2] + x[1,3]*d[2,3] + 3");
    let unit = PolyState::unit(alg);
    assert_eq!(op.act(&unit).unwrap().poly(), &parse(alg, "x[1,2] + 3"));
}

#[test]
fn states_reject_derivative_terms() {
    let alg = h(3);
    assert!(PolyState::new(parse(alg, "x[1,2]*d[1,2]")).is_err());
}

// ---------------------------------------------------------------------------
// Truncation, degrees, promotion.
// ---------------------------------------------------------------------------

#[test]
fn truncation_and_degree_parts() {
    let alg = h(3);
    let poly = parse(alg, "1 + d[1,2] + x[1,2]*d[1,3]^2 + d[1,2]*d[1,3]*d[2,3]");
    assert_eq!(poly.max_d_degree(), 3);
    assert_eq!(poly.max_x_degree(), 1);
    assert_eq!(poly.truncate(1), parse(alg, "1 + d[1,2]"));
    assert_eq!(poly.d_degree_part(2), parse(alg, "x[1,2]*d[1,3]^2"));
    assert_eq!(
        poly.truncate(2),
        &poly - &poly.d_degree_part(3),
        "dropping the top degree equals truncating below it"
    );
}

#[test]
fn promotion_between_compatible_modes() {
    let pair = hm(4);
    let extended = ext(4);
    let poly = parse(pair, "x[1,2]*d[3,4] - 2");
    let promoted = poly.promote(extended).unwrap();
    assert_eq!(promoted, parse(extended, "x[1,2]*d[3,4] - 2"));
    assert!(poly.promote(Algebra::weyl(4).unwrap()).is_err());
    assert!(parse(extended, "p[1]").promote(pair).is_err());
}

// ---------------------------------------------------------------------------
// Text round trips.
// ---------------------------------------------------------------------------

#[test]
fn display_is_canonical_and_reparses() {
    let alg = ext(4);
    let poly = parse(alg, "3 - 1/2*x[1,2]*d[1,3]^2 + i*p[1] + (1/2-3/4*i)*dv[2] - x[2,4]");
    let text = poly.to_string();
    assert_eq!(NCPoly::parse(alg, &text).unwrap(), poly);
    // Terms appear in ascending graded order with the unit monomial first.
    assert!(text.starts_with('3'));
}

#[test]
fn parse_reorders_products_honestly() {
    let alg = h(3);
    assert_eq!(parse(alg, "d[1,2]*x[1,2]"), parse(alg, "x[1,2]*d[1,2] + 1"));
    assert_eq!(parse(alg, "d[1,3]*d[1,2]").to_string(), "d[1,2]*d[1,3]");
}

#[test]
fn parse_rejects_malformed_input() {
    let alg = h(3);
    for bad in ["", "x[1,2", "x[1]", "p[1]", "x[1,2]**2", "x[0,1]", "y[1,2]", "1 + + 2", "x[1,2] x[1,3]"] {
        assert!(NCPoly::parse(alg, bad).is_err(), "{bad:?} must not parse");
    }
}

#[test]
fn zero_displays_as_zero() {
    assert_eq!(NCPoly::zero(h(2)).to_string(), "0");
    assert_eq!(parse(h(2), "x[1,2] - x[1,2]").to_string(), "0");
}

// ---------------------------------------------------------------------------
// Property-based checks.
// ---------------------------------------------------------------------------

fn arb_algebra() -> impl Strategy<Value = Algebra> {
    prop_oneof![
        (2u8..=4, any::<bool>()).prop_map(|(n, mink)| {
            let metric =
                if mink { Metric::minkowski(n).unwrap() } else { Metric::euclidean(n).unwrap() };
            Algebra::heisenberg(metric).unwrap()
        }),
        (2u8..=3, any::<bool>()).prop_map(|(n, mink)| {
            let metric =
                if mink { Metric::minkowski(n).unwrap() } else { Metric::euclidean(n).unwrap() };
            Algebra::extended(metric).unwrap()
        }),
        (1u8..=4).prop_map(|m| Algebra::weyl(m).unwrap()),
    ]
}

prop_compose! {
    fn arb_coeff()(re_n in -6i64..=6, re_d in 1i64..=4, im_n in -2i64..=2) -> GaussianRational {
        GaussianRational::new(Rational::new(re_n, re_d), Rational::from_integer(im_n))
    }
}

fn arb_poly_with(
    algebra: Algebra,
    generators: Vec<Generator>,
    max_terms: usize,
    max_factors: usize,
) -> impl Strategy<Value = NCPoly> {
    let factor = (0..generators.len(), 1u32..=2).prop_map(move |(i, e)| (generators[i], e));
    let mono = proptest::collection::vec(factor, 0..=max_factors).prop_map(Monomial::from_factors);
    proptest::collection::vec((mono, arb_coeff()), 0..=max_terms)
        .prop_map(move |terms| NCPoly::from_terms(algebra, terms).unwrap())
}

fn arb_poly(algebra: Algebra, max_terms: usize, max_factors: usize) -> impl Strategy<Value = NCPoly> {
    let gens: Vec<Generator> = algebra
        .coordinate_generators()
        .into_iter()
        .chain(algebra.derivative_generators())
        .collect();
    arb_poly_with(algebra, gens, max_terms, max_factors)
}

fn arb_state_poly(algebra: Algebra, max_terms: usize) -> impl Strategy<Value = NCPoly> {
    arb_poly_with(algebra, algebra.coordinate_generators(), max_terms, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_is_associative(
        (a, b, c) in arb_algebra().prop_flat_map(|alg| {
            (arb_poly(alg, 3, 3), arb_poly(alg, 3, 3), arb_poly(alg, 3, 3))
        })
    ) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }
}

proptest! {
    #[test]
    fn product_matches_swap_by_swap_reference(
        (a, b) in arb_algebra().prop_flat_map(|alg| {
            (arb_poly(alg, 3, 2), arb_poly(alg, 3, 2))
        })
    ) {
        prop_assert_eq!(&a * &b, mul_naive(&a, &b));
    }

    #[test]
    fn commutators_satisfy_jacobi(
        (a, b, c) in arb_algebra().prop_flat_map(|alg| {
            (arb_poly(alg, 2, 2), arb_poly(alg, 2, 2), arb_poly(alg, 2, 2))
        })
    ) {
        let mut acc = commutator(&a, &commutator(&b, &c));
        acc += &commutator(&b, &commutator(&c, &a));
        acc += &commutator(&c, &commutator(&a, &b));
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn bounded_product_equals_truncated_product(
        (a, b, dmax) in arb_algebra().prop_flat_map(|alg| {
            (arb_poly(alg, 3, 3), arb_poly(alg, 3, 3), 0u32..=5)
        })
    ) {
        prop_assert_eq!(a.mul_bounded(&b, Some(dmax)).unwrap(), (&a * &b).truncate(dmax));
    }

    #[test]
    fn action_is_compatible_with_multiplication(
        (a, b, v) in arb_algebra().prop_flat_map(|alg| {
            (arb_poly(alg, 2, 2), arb_poly(alg, 2, 2), arb_state_poly(alg, 2))
        })
    ) {
        let state = PolyState::new(v).unwrap();
        let composed = (&a * &b).act(&state).unwrap();
        let staged = a.act(&b.act(&state).unwrap()).unwrap();
        prop_assert_eq!(composed, staged);
    }

    #[test]
    fn display_round_trips(
        poly in arb_algebra().prop_flat_map(|alg| arb_poly(alg, 4, 3))
    ) {
        let text = poly.to_string();
        prop_assert_eq!(NCPoly::parse(poly.algebra(), &text).unwrap(), poly);
    }
}

#[test]
fn monomial_order_is_graded() {
    let p12 = Generator::XPair(PairIndex::new(1, 2).unwrap());
    let p13 = Generator::XPair(PairIndex::new(1, 3).unwrap());
    let d12 = Generator::DPair(PairIndex::new(1, 2).unwrap());
    let unit = Monomial::unit();
    let x = Monomial::generator(p12);
    let x2 = Monomial::from_factors([(p12, 2)]);
    let xy = Monomial::from_factors([(p12, 1), (p13, 1)]);
    let xd = Monomial::from_factors([(p12, 1), (d12, 1)]);
    assert!(unit < x);
    assert!(x < x2);
    assert!(x2 > xy, "higher exponent on the earlier generator sorts later");
    assert!(xy > xd, "x[1,3] is earlier than d[1,2]");
    let mut sorted = vec![x2.clone(), unit.clone(), xy.clone(), x.clone()];
    sorted.sort();
    assert_eq!(sorted, vec![unit, x, xy, x2]);
}

#[test]
fn from_terms_accumulates_and_cancels() {
    let alg = h(2);
    let m = Monomial::generator(Generator::XPair(PairIndex::new(1, 2).unwrap()));
    let poly = NCPoly::from_terms(
        alg,
        [
            (m.clone(), GaussianRational::from_integer(2)),
            (m.clone(), GaussianRational::from_integer(-2)),
            (Monomial::unit(), GaussianRational::from_integer(1)),
        ],
    )
    .unwrap();
    assert_eq!(poly, NCPoly::one(alg));
    let mut map = BTreeMap::new();
    map.insert(Monomial::unit(), GaussianRational::one());
    assert_eq!(poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect::<BTreeMap<_, _>>(), map);
}
