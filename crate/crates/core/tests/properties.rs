use almansi::almansi::{crf_component_map, reduced_ordered_reconstruct, stem_reconstruct};
use almansi::calculus::{
    biharmonic_residual, component_map, crf_apply, laplacian, laplacian_sum_residual,
    spherical_crf_residual,
};
use almansi::corpus::{
    random_point, random_polynomial, random_unit_imaginary, restrict_to_vars_from, rng_for,
};
use almansi::integral::{mean_value_check, MeanValueFormula};
use almansi::poly::{to_real_poly_map, zonal_map, zonal_tilde, Term};
use almansi::quat::{join, ordered_product, split};
use almansi::slice::{circularity_residual, sliceness_check, SupportShape};
use almansi::stem::{make_builtin_stem, parity_residual, stem_tensor, BuiltinKind};
use almansi::verify::ordered_component_regularity;
use almansi::{
    almansi_component, almansi_decompose, ClosedForm, ComplexPoint, IndexSet, QPoint, QPolynomial,
    Quaternion, ReconstructMode, SliceFunction, StemFunction,
};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn quat(s: f64) -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-s..s).prop_map(Quaternion::from_array)
}

fn rel(diff: f64, reference: f64) -> f64 {
    diff / (1.0 + reference)
}

/// A seeded polynomial in `n` variables of degree at most 4, plus the generator for points.
fn poly_and_rng(seed: u64, n: usize) -> (QPolynomial, ChaCha8Rng) {
    let mut rng = rng_for(seed, 7);
    let p = random_polynomial(&mut rng, n, 4, false);
    (p, rng)
}

fn complex_point(rng: &mut ChaCha8Rng, n: usize) -> ComplexPoint {
    let z = random_point(rng, n, 0.1, 2.0).complex_point();
    // flip the sign of one beta so the odd half-planes are exercised too
    let h = 1 + (rand::Rng::random_range(rng, 0..n));
    if rand::Rng::random_bool(rng, 0.5) {
        z.conj_at(h)
    } else {
        z
    }
}

/// Builtin stems for `n` variables chosen by `pick`.
fn builtin(n: usize, pick: u8, j: usize, c: Quaternion) -> StemFunction {
    let kind = match pick % 4 {
        0 => BuiltinKind::Monomial(j),
        1 => BuiltinKind::ConjMonomial(j),
        2 => BuiltinKind::Constant(c),
        _ => BuiltinKind::Exp(j),
    };
    make_builtin_stem(n, kind).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn split_join_round_trip(q in quat(10.0)) {
        let s = split(q);
        prop_assert!(s.beta >= 0.0);
        prop_assert!((join(s.alpha, s.beta, s.j) - q).norm() <= 1e-14 * (1.0 + q.norm()));
    }

    #[test]
    fn split_of_real_uses_i(w in -5.0f64..5.0) {
        let s = split(Quaternion::real(w));
        prop_assert_eq!(s.j, Quaternion::I);
        prop_assert_eq!(s.beta, 0.0);
    }

    #[test]
    fn ordered_product_appends_on_the_right(qs in prop::collection::vec(quat(2.0), 1..=6), bits in 0u32..64) {
        let n = qs.len();
        let k = IndexSet::from_bits(bits & ((1 << (n - 1)) - 1));
        let m = n;
        let lhs = ordered_product(&qs, k.with(m)).unwrap();
        let rhs = ordered_product(&qs, k).unwrap() * qs[m - 1];
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn conj_reverses_products(a in quat(5.0), b in quat(5.0)) {
        let lhs = (a * b).conj();
        let rhs = b.conj() * a.conj();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
    }

    #[test]
    fn index_set_algebra(a in 0u32..64, b in 0u32..64) {
        let (a, b) = (IndexSet::from_bits(a), IndexSet::from_bits(b));
        prop_assert_eq!(a.sym_diff(b), a.union(b).difference(a.intersection(b)));
        prop_assert_eq!(a.complement(6).complement(6), a);
        prop_assert_eq!(a.len() + b.len(), a.union(b).len() + a.intersection(b).len());
        prop_assert_eq!(a.subsets().count(), 1usize << a.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_of_builtin_and_product_stems(
        seed in any::<u64>(), n in 1usize..=3, picks in prop::array::uniform2(0u8..4),
        js in prop::array::uniform2(1usize..=3), c in quat(1.0),
    ) {
        let mut rng = rng_for(seed, 0);
        let f = builtin(n, picks[0], 1 + (js[0] - 1) % n, c);
        let g = builtin(n, picks[1], 1 + (js[1] - 1) % n, c);
        let fg = stem_tensor(&f, &g).unwrap();
        for _ in 0..4 {
            let z = complex_point(&mut rng, n);
            prop_assert!(parity_residual(&f, &z).unwrap() <= 1e-12);
            let scale = 1.0 + fg.eval(&z).unwrap().max_norm();
            prop_assert!(parity_residual(&fg, &z).unwrap() <= 1e-12 * scale);
        }
    }

    #[test]
    fn tensor_is_associative_with_identity(
        seed in any::<u64>(), n in 1usize..=3, picks in prop::array::uniform3(0u8..4),
        js in prop::array::uniform3(1usize..=3), c in quat(1.0),
    ) {
        let mut rng = rng_for(seed, 1);
        let [f, g, h] = [0, 1, 2].map(|i| builtin(n, picks[i], 1 + (js[i] - 1) % n, c));
        let one = StemFunction::constant(n, Quaternion::ONE).unwrap();
        let z = complex_point(&mut rng, n);
        let left = stem_tensor(&stem_tensor(&f, &g).unwrap(), &h).unwrap().eval(&z).unwrap();
        let right = stem_tensor(&f, &stem_tensor(&g, &h).unwrap()).unwrap().eval(&z).unwrap();
        prop_assert!(left.max_diff(&right) <= 1e-12 * (1.0 + left.max_norm()));
        let fz = f.eval(&z).unwrap();
        prop_assert!(stem_tensor(&one, &f).unwrap().eval(&z).unwrap().max_diff(&fz) <= 1e-12 * (1.0 + fz.max_norm()));
        prop_assert!(stem_tensor(&f, &one).unwrap().eval(&z).unwrap().max_diff(&fz) <= 1e-12 * (1.0 + fz.max_norm()));
    }

    #[test]
    fn joint_spherical_derivative_is_iterated(seed in any::<u64>(), n in 2usize..=3) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let f = StemFunction::polynomial(&p);
        let (h, k) = (1, n);
        let joint = f.spherical_derivative(IndexSet::from_vars(&[h, k])).unwrap();
        let hk = f.spherical_derivative(IndexSet::singleton(h)).unwrap().spherical_derivative(IndexSet::singleton(k)).unwrap();
        let kh = f.spherical_derivative(IndexSet::singleton(k)).unwrap().spherical_derivative(IndexSet::singleton(h)).unwrap();
        let z = complex_point(&mut rng, n);
        let a = joint.eval(&z).unwrap();
        prop_assert!(a.max_diff(&hk.eval(&z).unwrap()) <= 1e-11 * (1.0 + a.max_norm()));
        prop_assert!(a.max_diff(&kh.eval(&z).unwrap()) <= 1e-11 * (1.0 + a.max_norm()));
    }

    #[test]
    fn stem_representation_identity(seed in any::<u64>(), n in 1usize..=3, pick in 0u8..4, c in quat(1.0)) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let h = 1 + (seed as usize) % n;
        let e = IndexSet::singleton(h);
        let g = builtin(n, pick, h, c);
        for f in [StemFunction::polynomial(&p), g] {
            let z = complex_point(&mut rng, n);
            let im = StemFunction::im_var(n, h).unwrap();
            let rhs = f.spherical_value(e).unwrap().eval(&z).unwrap()
                .add(&stem_tensor(&im, &f.spherical_derivative(e).unwrap()).unwrap().eval(&z).unwrap());
            let lhs = f.eval(&z).unwrap();
            prop_assert!(lhs.max_diff(&rhs) <= 1e-11 * (1.0 + lhs.max_norm()));
        }
    }

    #[test]
    fn leibniz_rule(
        seed in any::<u64>(), n in 1usize..=3, picks in prop::array::uniform2(0u8..4),
        js in prop::array::uniform2(1usize..=3), c in quat(1.0),
    ) {
        let mut rng = rng_for(seed, 2);
        let f = builtin(n, picks[0], 1 + (js[0] - 1) % n, c);
        let g = builtin(n, picks[1], 1 + (js[1] - 1) % n, c);
        let h = IndexSet::singleton(1 + (seed as usize) % n);
        let z = complex_point(&mut rng, n);
        let lhs = stem_tensor(&f, &g).unwrap().spherical_derivative(h).unwrap().eval(&z).unwrap();
        let ev = |s: StemFunction| s.eval(&z).unwrap();
        let rhs = ev(f.spherical_derivative(h).unwrap()).tensor(&ev(g.spherical_value(h).unwrap()))
            .add(&ev(f.spherical_value(h).unwrap()).tensor(&ev(g.spherical_derivative(h).unwrap())));
        prop_assert!(lhs.max_diff(&rhs) <= 1e-10 * (1.0 + lhs.max_norm()));
    }

    #[test]
    fn slice_representation_formula(seed in any::<u64>(), n in 1usize..=3) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let f = SliceFunction::from_poly(&p);
        for h in 1..=n {
            let e = IndexSet::singleton(h);
            let im = SliceFunction::new(StemFunction::im_var(n, h).unwrap());
            let rest = im.slice_product(&f.spherical_derivative(e).unwrap()).unwrap();
            let sv = f.spherical_value(e).unwrap();
            for _ in 0..4 {
                let x = random_point(&mut rng, n, 0.1, 2.0);
                let lhs = f.eval(&x).unwrap();
                let rhs = sv.eval(&x).unwrap() + rest.eval(&x).unwrap();
                prop_assert!(rel((lhs - rhs).norm(), lhs.norm()) <= 1e-10);
            }
        }
    }

    #[test]
    fn slice_product_of_ordered_operands_is_pointwise(seed in any::<u64>(), n in 2usize..=3, a in 0u32..4, b in 0u32..4) {
        let mut rng = rng_for(seed, 3);
        // x_1^a x_2^b, coefficient 1, followed by anything in x_2..x_n
        let mut alpha = vec![0; n];
        alpha[0] = a;
        alpha[1] = b;
        let left = QPolynomial::monomial(alpha, Quaternion::ONE).unwrap();
        let right = restrict_to_vars_from(&random_polynomial(&mut rng, n, 4, false), 2);
        let prod = SliceFunction::from_poly(&left).slice_product(&SliceFunction::from_poly(&right)).unwrap();
        for _ in 0..4 {
            let x = random_point(&mut rng, n, 0.1, 2.0);
            let direct = left.eval(x.coords()).unwrap() * right.eval(x.coords()).unwrap();
            prop_assert!(rel((prod.eval(&x).unwrap() - direct).norm(), direct.norm()) <= 1e-11);
        }
    }

    #[test]
    fn spherical_derivatives_are_circular(seed in any::<u64>(), n in 1usize..=3, bits in 1u32..8) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let h = IndexSet::from_bits(bits & ((1 << n) - 1));
        prop_assume!(!h.is_empty());
        let d = SliceFunction::from_poly(&p).spherical_derivative(h).unwrap();
        let x = random_point(&mut rng, n, 0.1, 2.0);
        for v in h.iter() {
            let j = random_unit_imaginary(&mut rng);
            prop_assert!(circularity_residual(&d, v, &x, j).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn reconstruction_on_random_polynomials(seed in any::<u64>(), n in 1usize..=3, bits in 0u32..8) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let h = IndexSet::from_bits(bits & ((1 << n) - 1));
        let dec = almansi_decompose(&SliceFunction::from_poly(&p), h).unwrap();
        for _ in 0..5 {
            let x = random_point(&mut rng, n, 0.1, 2.0);
            let exact = p.eval(x.coords()).unwrap();
            let rec = dec.reconstruct(&x, ReconstructMode::Slice).unwrap();
            prop_assert!(rel((rec - exact).norm(), exact.norm()) <= 1e-9);
        }
    }

    #[test]
    fn stem_level_reconstruction(seed in any::<u64>(), n in 1usize..=3, bits in 0u32..8) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let h = IndexSet::from_bits(bits & ((1 << n) - 1));
        let f = StemFunction::polynomial(&p);
        let z = complex_point(&mut rng, n);
        let back = stem_reconstruct(&f, h, &z).unwrap();
        let fz = f.eval(&z).unwrap();
        prop_assert!(back.max_diff(&fz) <= 1e-10 * (1.0 + fz.max_norm()));
    }

    #[test]
    fn components_of_real_polynomials_are_real(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = rng_for(seed, 4);
        let p = random_polynomial(&mut rng, n, 4, true);
        let f = SliceFunction::from_poly(&p);
        let h = IndexSet::full(n);
        let x = random_point(&mut rng, n, 0.1, 2.0);
        for k in h.subsets() {
            prop_assert!(almansi_component(&f, h, k).unwrap().eval(&x).unwrap().im_norm() <= 1e-12);
        }
    }

    #[test]
    fn j_coefficient_shows_up_in_components(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = rng_for(seed, 5);
        let real = random_polynomial(&mut rng, n, 4, true);
        let mut terms = real.terms().to_vec();
        let mut alpha = vec![0u32; n];
        alpha[rand::Rng::random_range(&mut rng, 0..n)] = rand::Rng::random_range(&mut rng, 0..=3);
        terms.push(Term { alpha, coeff: Quaternion::J });
        let p = QPolynomial::new(n, terms).unwrap();
        let f = SliceFunction::from_poly(&p);
        let h = IndexSet::full(n);
        let x = QPoint::new(vec![Quaternion::new(0.5, 0.3, 0.2, 0.4); n]).unwrap();
        let best = h.subsets()
            .map(|k| almansi_component(&f, h, k).unwrap().eval(&x).unwrap().im_norm())
            .fold(0.0, f64::max);
        prop_assert!(best > 0.1, "largest imaginary part {}", best);
    }

    #[test]
    fn reduced_ordered_form_matches(seed in any::<u64>(), n in 2usize..=3, top in 1usize..=3) {
        let top = top.min(n);
        let (p, mut rng) = poly_and_rng(seed, n);
        let p = restrict_to_vars_from(&p, top);
        let dec = almansi_decompose(&SliceFunction::from_poly(&p), IndexSet::interval(top)).unwrap();
        let x = random_point(&mut rng, n, 0.1, 2.0);
        let full = dec.reconstruct(&x, ReconstructMode::OrderedPointwise).unwrap();
        let reduced = reduced_ordered_reconstruct(&dec, &x).unwrap();
        prop_assert!(rel((full - reduced).norm(), full.norm()) <= 1e-10);
    }

    #[test]
    fn closed_form_matches_iterated(seed in any::<u64>(), n in 1usize..=3, bits in 0u32..8) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let h = IndexSet::from_bits(bits & ((1 << n) - 1));
        let f = SliceFunction::from_poly(&p);
        let x = random_point(&mut rng, n, 0.1, 2.0);
        for k in h.subsets() {
            let a = ClosedForm::component(&p, h, k).unwrap().eval(x.coords()).unwrap();
            let b = almansi_component(&f, h, k).unwrap().eval(&x).unwrap();
            prop_assert!(rel((a - b).norm(), b.norm()) <= 1e-9);
        }
    }

    #[test]
    fn zonal_is_real_and_j_independent(k in 0i32..=8, a in -2.0f64..2.0, b in 0.0f64..2.0, seed in any::<u64>()) {
        let mut rng = rng_for(seed, 6);
        let q1 = Quaternion::real(a) + random_unit_imaginary(&mut rng).scale(b);
        let q2 = Quaternion::real(a) + random_unit_imaginary(&mut rng).scale(b);
        let (z1, z2) = (zonal_tilde(k, q1), zonal_tilde(k, q2));
        prop_assert!((z1 - z2).abs() <= 1e-13 * (1.0 + z1.abs()));
    }

    #[test]
    fn real_map_eval_matches_direct(seed in any::<u64>(), n in 1usize..=3) {
        let (p, mut rng) = poly_and_rng(seed, n);
        let map = to_real_poly_map(&p).unwrap();
        for _ in 0..8 {
            let x = random_point(&mut rng, n, 0.0, 2.0);
            let direct = p.eval(x.coords()).unwrap();
            prop_assert!(rel((map.eval(x.coords()) - direct).norm(), direct.norm()) <= 1e-12);
        }
    }

    #[test]
    fn exact_operator_identities(seed in any::<u64>(), n in 1usize..=3) {
        let (p, _) = poly_and_rng(seed, n);
        let map = to_real_poly_map(&p).unwrap();
        for h in 1..=n {
            let factored = crf_apply(&crf_apply(&map, h, true), h, false).scale(4.0);
            prop_assert!((&laplacian(&map, h) - &factored).max_abs_coeff() <= 1e-11);
            prop_assert!(biharmonic_residual(&p, h).unwrap() <= 1e-11);
            prop_assert!(laplacian_sum_residual(&p, h).unwrap() <= 1e-11);
        }
        prop_assert!(spherical_crf_residual(&p, 1).unwrap() <= 1e-11);
        for h in 2..=n {
            if sliceness_check(&StemFunction::polynomial(&p), IndexSet::singleton(h), SupportShape::Slice).unwrap() {
                prop_assert!(spherical_crf_residual(&p, h).unwrap() <= 1e-11);
            } else {
                prop_assert!(spherical_crf_residual(&p, h).is_err());
            }
        }
    }

    #[test]
    fn components_are_harmonic(seed in any::<u64>(), n in 1usize..=3, bits in 1u32..8) {
        let (p, _) = poly_and_rng(seed, n);
        let h = IndexSet::from_bits(bits & ((1 << n) - 1));
        prop_assume!(!h.is_empty());
        for k in h.subsets() {
            let map = component_map(&p, h, k).unwrap();
            for v in h.iter() {
                prop_assert!(laplacian(&map, v).max_abs_coeff() <= 1e-11);
            }
        }
    }

    #[test]
    fn ordered_components_are_axially_monogenic(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let m = m.min(n);
        let (p, _) = poly_and_rng(seed, n);
        for k in IndexSet::interval(m).subsets() {
            let map = component_map(&p, IndexSet::interval(m), k).unwrap();
            let box_m = crf_apply(&crf_apply(&map, m, false), m, true);
            prop_assert!(box_m.max_abs_coeff() <= 1e-11);
            if m < n {
                let next = crf_apply(&laplacian(&map, m + 1), m + 1, true);
                prop_assert!(next.max_abs_coeff() <= 1e-11, "∂̄Δ in x_{} = {}", m + 1, next.max_abs_coeff());
            }
        }
    }

    #[test]
    fn crf_iterated_components_match(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let m = m.min(n);
        let (p, _) = poly_and_rng(seed, n);
        for k in IndexSet::interval(m).subsets() {
            let crf = crf_component_map(&p, m, k).unwrap();
            let closed = component_map(&p, IndexSet::interval(m), k).unwrap();
            prop_assert!((&crf - &closed).max_abs_coeff() <= 1e-11);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ordered_components_are_regular_in_the_next_variable(seed in any::<u64>(), n in 2usize..=3, m in 1usize..=2) {
        let m = m.min(n - 1);
        let (p, mut rng) = poly_and_rng(seed, n);
        let z = random_point(&mut rng, n, 0.3, 1.5).complex_point();
        prop_assert!(ordered_component_regularity(&p, m, &z).unwrap() <= 1e-8);
    }

    #[test]
    fn monte_carlo_replay_is_bit_identical(seed in any::<u64>()) {
        let p = QPolynomial::monomial(vec![1, 1], Quaternion::ONE).unwrap();
        let a = QPoint::new(vec![Quaternion::new(0.1, 0.2, 0.0, 0.0), Quaternion::new(0.0, 0.0, 0.3, 0.1)]).unwrap();
        let r = [0.5, 0.5];
        let one = mean_value_check(&p, &a, &r, 2, MeanValueFormula::First, 5000, seed).unwrap();
        let two = mean_value_check(&p, &a, &r, 2, MeanValueFormula::First, 5000, seed).unwrap();
        prop_assert_eq!(one, two);
    }
}

#[test]
fn zonal_maps_are_harmonic() {
    for k in 0..=8 {
        assert!(
            laplacian(&zonal_map(1, 1, k), 1).max_abs_coeff() <= 1e-12,
            "k = {k}"
        );
    }
}
