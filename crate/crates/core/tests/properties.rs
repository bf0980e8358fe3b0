use std::collections::BTreeSet;

use bilinear_bogolyubov::bohr::{containment_check, enumerate_structured, BohrVariety, StructuredSet};
use bilinear_bogolyubov::fourier::{convolve, dft, idft, DenseFn, GridFn};
use bilinear_bogolyubov::generators::{product, random_subspace};
use bilinear_bogolyubov::linalg::{AffineEndo, Ambient, GVector, Matrix, Subspace};
use bilinear_bogolyubov::pipeline::{
    additive_quadruples, bogolyubov_line, fourier_linearity, ransac_affine, run_pipeline, FiniteMap,
    LinearityConfig, PipelineConfig,
};
use bilinear_bogolyubov::product_set::ProductSet;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ambient() -> impl Strategy<Value = Ambient> {
    prop_oneof![
        (1usize..=5).prop_map(|n| Ambient::new(2, n).unwrap()),
        (1usize..=3).prop_map(|n| Ambient::new(3, n).unwrap()),
        (1usize..=2).prop_map(|n| Ambient::new(5, n).unwrap()),
    ]
}

fn vectors(g: Ambient, max: usize) -> impl Strategy<Value = Vec<GVector>> {
    prop::collection::vec(0..g.size(), 0..=max).prop_map(move |v| v.into_iter().map(|i| g.decode(i)).collect())
}

fn matrix(g: Ambient) -> impl Strategy<Value = Matrix> {
    let (p, n) = (g.p() as u32, g.n());
    prop::collection::vec(prop::collection::vec(0..p, n), n).prop_map(move |rows| Matrix::from_rows(p as u8, &rows))
}

fn affine(g: Ambient) -> impl Strategy<Value = AffineEndo> {
    (matrix(g), 0..g.size()).prop_map(move |(m, t)| AffineEndo::new(m, g.decode(t)).unwrap())
}

fn rng_fn(g: Ambient, seed: u64) -> DenseFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseFn::new(
        g,
        (0..g.size())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
}

fn members(s: &Subspace) -> BTreeSet<usize> {
    s.element_indices().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_transform_round_trips(g in ambient(), seed in any::<u64>()) {
        let f = rng_fn(g, seed);
        prop_assert!(idft(&dft(&f)).max_abs_diff(&f) < 1e-9);
    }

    #[test]
    fn convolution_transform_is_product_with_conjugate(g in ambient(), seed in any::<u64>()) {
        let (f, h) = (rng_fn(g, seed), rng_fn(g, seed ^ 0x5555));
        let lhs = dft(&convolve(&f, &h).unwrap());
        let (fh, hh) = (dft(&f), dft(&h));
        for i in 0..g.size() {
            prop_assert!((lhs.values()[i] - fh.values()[i] * hh.values()[i].conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn complement_dimensions_and_involution((g, vs) in ambient().prop_flat_map(|g| (Just(g), vectors(g, 4)))) {
        let w = Subspace::span(g, &vs).unwrap();
        let perp = w.orthogonal_complement();
        prop_assert_eq!(w.dim() + perp.dim(), g.n());
        prop_assert_eq!(perp.orthogonal_complement(), w.clone());
        for x in w.elements() {
            for y in perp.elements() {
                prop_assert_eq!(x.dot(&y), 0);
            }
        }
    }

    #[test]
    fn intersection_and_sum_match_elements(
        (g, a, b) in ambient().prop_flat_map(|g| (Just(g), vectors(g, 3), vectors(g, 3)))
    ) {
        let (u, v) = (Subspace::span(g, &a).unwrap(), Subspace::span(g, &b).unwrap());
        let both: BTreeSet<usize> = members(&u).intersection(&members(&v)).copied().collect();
        prop_assert_eq!(members(&u.intersect(&v).unwrap()), both);
        let sum = u.sum(&v).unwrap();
        prop_assert_eq!(sum.dim() + u.intersect(&v).unwrap().dim(), u.dim() + v.dim());
    }

    #[test]
    fn preimage_matches_elements(
        (g, vs, m) in ambient().prop_flat_map(|g| (Just(g), vectors(g, 3), matrix(g)))
    ) {
        let s = Subspace::span(g, &vs).unwrap();
        let expected: BTreeSet<usize> = g.vectors().filter(|x| s.contains(&m.mul_vec(x))).map(|x| g.encode(&x)).collect();
        prop_assert_eq!(members(&s.preimage(&m)), expected);
    }

    #[test]
    fn quadruples_match_triple_loop(
        (g, pairs) in prop_oneof![Just(Ambient::new(2, 4).unwrap()), Just(Ambient::new(3, 2).unwrap())]
            .prop_flat_map(|g| (Just(g), prop::collection::btree_map(0..g.size(), 0..g.size(), 1..=g.size())))
    ) {
        let phi = FiniteMap::new(g, pairs.clone().into_iter().collect()).unwrap();
        let dom: Vec<(usize, usize)> = pairs.into_iter().collect();
        let mut brute = 0u64;
        for &(a, fa) in &dom {
            for &(b, fb) in &dom {
                for &(c, fc) in &dom {
                    let d = g.sub_index(g.add_index(a, b), c);
                    let fd = g.sub_index(g.add_index(fa, fb), fc);
                    brute += (phi.get(d) == Some(fd)) as u64;
                }
            }
        }
        prop_assert_eq!(additive_quadruples(&phi), brute);
    }

    #[test]
    fn bogolyubov_guarantees_hold(g in ambient(), seed in any::<u64>(), keep in 0.05f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..g.size()).map(|_| if rng.gen_bool(keep) { rng.gen_range(0.0..=1.0) } else { 0.0 }).collect();
        let line = bogolyubov_line(&DenseFn::from_real(g, &values).unwrap());
        if line.degenerate {
            prop_assert!(values.iter().all(|&v| v == 0.0));
        } else {
            prop_assert!(line.annihilator_contained());
            prop_assert!(line.spectrum_bounded());
        }
    }

    #[test]
    fn exact_affine_maps_are_recovered(
        (g, alpha, dom) in (2usize..=4).prop_flat_map(|n| {
            let g = Ambient::new(2, n).unwrap();
            (Just(g), affine(g), prop::collection::btree_set(0..g.size(), n + 2..=g.size()))
        }),
        seed in any::<u64>(),
    ) {
        let phi = FiniteMap::new(g, dom.iter().map(|&x| (x, g.encode(&alpha.eval(&g.decode(x))))).collect()).unwrap();
        let fit = ransac_affine(&phi, 2000, seed).unwrap();
        prop_assert_eq!(fit.agreement, dom.len());
        for &x in &dom {
            prop_assert_eq!(fit.map.eval(&g.decode(x)), alpha.eval(&g.decode(x)));
        }
    }

    #[test]
    fn linearity_coverage_is_sound(
        (g, family) in (2usize..=4).prop_flat_map(|n| {
            let g = Ambient::new(2, n).unwrap();
            (Just(g), prop::collection::vec(affine(g), 1..=2))
        }),
        xi in 0.1f64..0.6,
    ) {
        let variety = BohrVariety::from_affine_family(g, &family).unwrap();
        let f = GridFn::from_fn(g, |x, y| {
            Complex64::new(variety.member(&g.decode(x), &g.decode(y)) as u8 as f64, 0.0)
        });
        let b: Vec<GVector> = g.vectors().collect();
        let out = fourier_linearity(&f, &b, xi, &LinearityConfig::default()).unwrap();
        for y in &out.cleared {
            let hat = dft(&f.column(g.encode(y)));
            let images: Vec<GVector> = out.family.iter().map(|a| a.eval(y)).collect();
            for r in g.vectors() {
                if hat.at(&r).norm() >= xi {
                    prop_assert!(images.contains(&r));
                }
            }
        }
        if out.certified {
            prop_assert!(out.cleared.len() as f64 >= (1.0 - xi) * b.len() as f64);
        }
    }

    #[test]
    fn containment_check_matches_enumeration(
        (g, a, b, fam, set) in (1usize..=3).prop_flat_map(|n| {
            let g = Ambient::new(2, n).unwrap();
            (Just(g), vectors(g, 2), vectors(g, 2), prop::collection::vec(affine(g), 0..=2),
             prop::collection::btree_set((0..g.size(), 0..g.size()), 0..=g.size() * g.size()))
        })
    ) {
        let s = StructuredSet::new(
            Subspace::span(g, &a).unwrap(),
            Subspace::span(g, &b).unwrap(),
            BohrVariety::from_affine_family(g, &fam).unwrap(),
        ).unwrap();
        let mut target = ProductSet::empty(g).unwrap();
        for &(x, y) in &set {
            target.insert_index(x, y);
        }
        let listed: Vec<(GVector, GVector)> = enumerate_structured(&s).unwrap().collect();
        let report = containment_check(&s, &target).unwrap();
        prop_assert_eq!(report.structured_count, listed.len() as u64);
        prop_assert_eq!(report.contained, listed.iter().all(|(x, y)| target.contains(x, y)));
        let brute: usize = g.vectors().flat_map(|x| g.vectors().map(move |y| (x.clone(), y)))
            .filter(|(x, y)| s.contains(x, y)).count();
        prop_assert_eq!(brute, listed.len());
    }

    #[test]
    fn set_formats_round_trip(g in ambient().prop_filter("small", |g| g.size() <= 32), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = ProductSet::empty(g).unwrap();
        for x in 0..g.size() {
            for y in 0..g.size() {
                if rng.gen_bool(0.3) {
                    a.insert_index(x, y);
                }
            }
        }
        prop_assert_eq!(ProductSet::from_bytes(&a.to_bytes()).unwrap(), a.clone());
        prop_assert_eq!(ProductSet::from_text(&a.to_text(), None).unwrap(), a);
    }

    #[test]
    fn variety_text_round_trips((g, fam) in ambient().prop_flat_map(|g| (Just(g), prop::collection::vec(affine(g), 0..=3)))) {
        let b = BohrVariety::from_affine_family(g, &fam).unwrap();
        prop_assert_eq!(BohrVariety::from_text(&b.to_text()).unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Enlarging a product instance within its family keeps it passing.
    #[test]
    fn product_passes_are_monotone(n in 3usize..=5, seed in any::<u64>()) {
        let g = Ambient::new(2, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subspace(g, 2, &mut rng).unwrap();
        let v = random_subspace(g, 2, &mut rng).unwrap();
        let extra_u = g.decode(rng.gen_range(0..g.size()));
        let extra_v = g.decode(rng.gen_range(0..g.size()));
        let big_u = u.sum(&Subspace::span(g, &[extra_u]).unwrap()).unwrap();
        let big_v = v.sum(&Subspace::span(g, &[extra_v]).unwrap()).unwrap();
        let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
        let small = run_pipeline(&product(&u, &v).unwrap(), &cfg).unwrap().certificate;
        let large = run_pipeline(&product(&big_u, &big_v).unwrap(), &cfg).unwrap().certificate;
        prop_assert!(!small.pass || large.pass);
    }
}
