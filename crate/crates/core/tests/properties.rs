use nalgebra::{Matrix2, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigchange::atlas::{canonicalize, mat_apply, ManifoldSpec, Topology};
use sigchange::causal::{killing_character, null_slopes, sample_causal_direction, CausalKind};
use sigchange::locus::zero_set;
use sigchange::prescription::{radical_at, transform_metric};
use sigchange::{
    complete_orthonormal_frame, inner, ChartPoint, MetricSpec, ScalarField, TangentVector, VectorField, Window,
};

const TOL: f64 = 1e-9;

fn constant_metric(a: f64, b: f64, c: f64) -> MetricSpec {
    MetricSpec::Custom {
        g_tt: ScalarField::constant(a),
        g_tx: ScalarField::constant(b),
        g_xx: ScalarField::constant(c),
    }
}

fn origin() -> ChartPoint {
    ChartPoint::new(0.0, 0.0)
}

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(Topology::Plane),
        Just(Topology::InfiniteMobius),
        Just(Topology::CompactMobius),
        Just(Topology::RP2Square),
    ]
}

proptest! {
    #[test]
    fn determinant_lemma(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64,
                         vt in -2.0..2.0f64, vx in -2.0..2.0f64, f in -2.0..2.0f64) {
        let g = constant_metric(a, b, c);
        let v = VectorField::new(ScalarField::constant(vt), ScalarField::constant(vx));
        let gt = transform_metric(g, v, ScalarField::constant(f));
        let m = Matrix2::new(a, b, b, c);
        let w = m * nalgebra::Vector2::new(vt, vx);
        let oracle = (m + f * w * w.transpose()).determinant();
        let got = gt.det(origin()).unwrap();
        prop_assert!((got - oracle).abs() <= 1e-10 * (1.0 + oracle.abs()), "{got} vs {oracle}");
        let gvv = vt * w[0] + vx * w[1];
        prop_assert!((got - m.determinant() * (1.0 + f * gvv)).abs() <= 1e-10 * (1.0 + oracle.abs()));
    }

    #[test]
    fn canonicalize_is_idempotent(topo in topology(), t in -4.0..4.0f64, x in -4.0..4.0f64) {
        let man = ManifoldSpec::new(topo);
        let t = if topo == Topology::CompactMobius { t.rem_euclid(1.0) } else { t };
        let once = canonicalize(&man, ChartPoint::new(t, x)).unwrap();
        prop_assert!(man.in_domain(once.point));
        let twice = canonicalize(&man, once.point).unwrap();
        prop_assert_eq!(twice.point, once.point);
        prop_assert!(twice.crossings.is_empty());
        // deck maps are isometries of the coordinate lattice: |det J| = 1
        let j = once.jacobian;
        prop_assert!(((j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn null_slopes_are_null(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
        prop_assume!(a * c - b * b < -1e-3);
        let m = constant_metric(a, b, c);
        let (s1, s2) = null_slopes(&m, origin(), TOL).unwrap();
        let g = m.sym(origin()).unwrap();
        for s in [s1, s2] {
            let d = s.direction();
            prop_assert!(g.quad(d, d).abs() <= 1e-12 * (a.abs() + b.abs() + c.abs()));
        }
        prop_assert!((s1.angle() - s2.angle()).abs() > 1e-9);
    }

    #[test]
    fn radical_is_annihilated(a in prop_oneof![-3.0..-0.1f64, 0.1..3.0f64], b in -3.0..3.0f64) {
        let c = b * b / a;
        let m = constant_metric(a, b, c);
        let r = radical_at(&m, origin(), 1e-8).unwrap().components();
        let g = m.sym(origin()).unwrap().apply(r);
        prop_assert!(g[0].hypot(g[1]) <= 1e-12 * (1.0 + a.abs() + c.abs()));
        let eig = SymmetricEigen::new(Matrix2::new(a, b, b, c));
        let k = if eig.eigenvalues[0].abs() < eig.eigenvalues[1].abs() { 0 } else { 1 };
        let e = eig.eigenvectors.column(k);
        let cross = (r[0] * e[1] - r[1] * e[0]) / r[0].hypot(r[1]);
        prop_assert!(cross.abs() < 1e-9);
    }

    #[test]
    fn killing_character_has_period_one(x in -10.0..10.0f64, k in -5i32..5) {
        prop_assume!((x.rem_euclid(0.5) - 0.25).abs() > 1e-6);
        let (a, va) = killing_character(x);
        let (b, vb) = killing_character(x + k as f64);
        prop_assert_eq!(a, b);
        prop_assert!((va - vb).abs() < 1e-9);
    }

    #[test]
    fn frame_is_orthonormal(t in -5.0..5.0f64, x in -5.0..5.0f64) {
        let m = MetricSpec::rotating_default();
        let v = VectorField::rotating_unit_timelike();
        let p = ChartPoint::new(t, x);
        let e = complete_orthonormal_frame(&m, &v, p, TOL).unwrap();
        let vp = v.at(p).unwrap();
        prop_assert!((inner(&m, &e, &e).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(inner(&m, &e, &vp).unwrap().abs() < 1e-12);
    }

    #[test]
    fn timelike_samples_are_future_directed(t in -3.0..3.0f64, x in -3.0..3.0f64, seed in any::<u64>()) {
        let m = MetricSpec::rotating_default();
        let v = VectorField::rotating_unit_timelike();
        let p = ChartPoint::new(t, x);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = sample_causal_direction(&m, p, &mut rng, CausalKind::Timelike, &v).unwrap();
        prop_assert!((d.euclidean_norm() - 1.0).abs() < 1e-12);
        prop_assert!(inner(&m, &d, &d).unwrap() < 0.0);
        prop_assert!(inner(&m, &d, &v.at(p).unwrap()).unwrap() < 0.0);
        let s = sample_causal_direction(&m, p, &mut rng, CausalKind::Spacelike, &v).unwrap();
        prop_assert!(inner(&m, &s, &s).unwrap() > 0.0);
    }

    #[test]
    fn transported_vectors_keep_their_norm_at_mobius_seams(t in -2.0..2.0f64, k in -4i32..4,
                                                           vt in -1.0..1.0f64, vx in -1.0..1.0f64) {
        // the flip t -> -t changes the sign of g_tx, which vanishes only on x ∈ ℤ
        let man = ManifoldSpec::new(Topology::InfiniteMobius);
        let m = MetricSpec::rotating_default();
        let raw = TangentVector::new(ChartPoint::new(t, k as f64), vt, vx);
        let c = canonicalize(&man, raw.base).unwrap();
        let [wt, wx] = mat_apply(&c.jacobian, raw.components());
        let moved = TangentVector::new(c.point, wt, wx);
        let before = inner(&m, &raw, &raw).unwrap();
        let after = inner(&m, &moved, &moved).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extracted_locus_points_lie_on_the_zero_set(a in 0.5..1.5f64, b in 0.5..1.5f64, cx in -0.3..0.3f64) {
        let f = |p: ChartPoint| Ok((p.t / a).powi(2) + ((p.x - cx) / b).powi(2) - 1.0);
        let lines = zero_set(f, &Window::square(2.0), 64).unwrap();
        prop_assert_eq!(lines.len(), 1);
        prop_assert!(lines[0].closed);
        for p in &lines[0].points {
            prop_assert!(f(*p).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn crosscap_locus_vertices_are_degenerate(n in 16usize..96) {
        let m = MetricSpec::CrosscapQuadratic;
        let lines = zero_set(|p| m.det(p), &Window::square(1.4), n).unwrap();
        prop_assert!(!lines.is_empty());
        for p in lines.iter().flat_map(|l| &l.points) {
            prop_assert!(m.det(*p).unwrap().abs() <= 1e-8);
        }
    }
}
