use proptest::prelude::*;

use hslab::funcspace::{graded_mesh, Bubble, ExplicitRadial, Multiple};
use hslab::functionals::{potential, rayleigh_quotient, weighted_norm, whole_space_quotient};
use hslab::limits::c_of_m;
use hslab::params::{OuterRadius, ProblemParams};
use hslab::quadrature::QuadratureSpec;
use hslab::transforms::TransformMap;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn quotient_is_homogeneous_of_degree_zero(c in 0.1f64..10.0, a in 0.0f64..1.0, s in 0.0f64..2.0) {
        let params = ProblemParams::new(3, 2.0, s, 1.0, a).unwrap();
        let spec = QuadratureSpec::default();
        let base = rayleigh_quotient(&ExplicitRadial::quartic(1.0), &params, &spec).unwrap().quotient;
        let scaled = Multiple { c, inner: ExplicitRadial::quartic(1.0) };
        let q = rayleigh_quotient(&scaled, &params, &spec).unwrap().quotient;
        prop_assert!((q - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn potential_dominates_the_pure_power(r in 1e-6f64..0.999, a in 0.0f64..=1.0, s in 0.0f64..2.0) {
        let params = ProblemParams::new(3, 2.0, s, 1.0, a).unwrap();
        let v = potential(r, &params).unwrap();
        prop_assert!(v >= r.powf(-s) * (1.0 - 1e-14));
    }

    #[test]
    fn weighted_norm_increases_with_a(a in 0.0f64..0.9, da in 0.01f64..0.1) {
        let u = ExplicitRadial::annulus_bump(0.3, 0.8);
        let spec = QuadratureSpec::default();
        let lo = ProblemParams::new(3, 2.0, 1.0, 1.0, a).unwrap();
        let hi = ProblemParams::new(3, 2.0, 1.0, 1.0, a + da).unwrap();
        let n_lo = weighted_norm(&u, &lo, &spec).unwrap().value;
        let n_hi = weighted_norm(&u, &hi, &spec).unwrap().value;
        prop_assert!(n_hi > n_lo);
    }

    #[test]
    fn ball_map_round_trips(r in 1e-3f64..0.999, outer in 1.0f64..5.0, n in 3u32..6) {
        let map = TransformMap::ioku(n, 2.0, 1.0, OuterRadius::Finite(outer)).unwrap();
        let t = map.forward(r).unwrap();
        prop_assert!(t > 0.0 && t < outer);
        let back = map.inverse(t).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn whole_space_quotient_is_scale_invariant(lambda in 0.05f64..20.0) {
        let params = ProblemParams::new(3, 2.0, 1.0, 1.0, 0.0)
            .unwrap()
            .with_outer(OuterRadius::Infinite)
            .unwrap();
        let spec = QuadratureSpec::default();
        let q = whole_space_quotient(&Bubble::new(&params, lambda).unwrap(), &params, &spec)
            .unwrap()
            .quotient;
        prop_assert!((q - 2.894_405_018_233_070_6).abs() <= 1e-8);
    }

    #[test]
    fn transported_constant_stays_above_its_limit(m in 3.5f64..1e6) {
        let c = c_of_m(m, 3, 2.0).unwrap();
        prop_assert!(c.is_finite() && c > 0.25);
    }

    #[test]
    fn graded_mesh_is_increasing(n in 2usize..400, glo in 1.0f64..6.0, ghi in 1.0f64..6.0) {
        let mesh = graded_mesh(0.0, 1.0, n, glo, ghi);
        prop_assert_eq!(mesh.len(), n + 1);
        prop_assert_eq!(mesh[0], 0.0);
        prop_assert_eq!(mesh[n], 1.0);
        prop_assert!(mesh.windows(2).all(|w| w[1] > w[0]));
    }
}
