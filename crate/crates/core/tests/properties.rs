use approx::assert_relative_eq;
use proptest::prelude::*;
use somogsa::baseline::nelder_mead;
use somogsa::engine::run_somogsa;
use somogsa::harness::performance_gap;
use somogsa::moization::{angle_deg, dominates, fritz_john_residual, make_biobjective, mo_gradient_from};
use somogsa::trace::best_of_trace;
use somogsa::{point, Bounds, NelderMeadConfig, ObjectivePair, Point, ScalarProblem, ScalarProblem32, SomogsaConfig};

fn pair() -> impl Strategy<Value = ObjectivePair> {
    // small integer grid so ties occur often
    (0i32..6, 0i32..6).prop_map(|(a, b)| ObjectivePair::new(a as f64, b as f64))
}

fn coord() -> impl Strategy<Value = f64> {
    -4.9f64..4.9
}

fn box5() -> Bounds {
    Bounds::cube(2, -5.0, 5.0).unwrap()
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in pair(), b in pair(), c in pair()) {
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
    }

    #[test]
    fn mo_gradient_norm_follows_angle(g in prop::array::uniform4(-10.0f64..10.0)) {
        let (g1, g2) = (Point::from(vec![g[0], g[1]]), Point::from(vec![g[2], g[3]]));
        prop_assume!(g1.norm() > 1e-3 && g2.norm() > 1e-3);
        let m = mo_gradient_from(&g1, &g2, 1e-8).unwrap();
        let angle = angle_deg(g1.coords(), g2.coords()).unwrap();
        prop_assert!((0.0..=180.0).contains(&angle));
        assert_relative_eq!(m.norm(), 2.0 * (angle.to_radians() / 2.0).cos(), epsilon = 1e-9);
    }

    #[test]
    fn bi_sphere_segment_satisfies_fritz_john(t in 0.0f64..=1.0, sx in coord(), sy in coord()) {
        let p = make_biobjective(ScalarProblem::sphere(Point::zeros(2), box5()).unwrap(), Point::from(vec![sx, sy])).unwrap();
        let x = [t * sx, t * sy];
        let r = fritz_john_residual(p.grad_f1(&x).coords(), p.grad_f2(&x).coords(), (1.0 - t, t)).unwrap();
        prop_assert!(r <= 1e-9, "residual {r}");
    }

    #[test]
    fn gap_is_a_fraction(opt in -10.0f64..10.0, d1 in 0.0f64..50.0, d2 in 0.0f64..50.0) {
        let (best, start) = (opt + d1.min(d2), opt + d1.max(d2));
        let g = performance_gap(best, start, opt).unwrap();
        prop_assert!((0.0..=1.0).contains(&g.value));
        prop_assert!(performance_gap(start + 1.0, start, opt).is_err());
    }

    #[test]
    fn runs_never_report_worse_than_start(x in coord(), y in coord()) {
        let f = ScalarProblem::rastrigin(box5());
        let p = make_biobjective(f.clone(), Point::from(vec![-3.5, -2.5])).unwrap();
        let start = Point::from(vec![x, y]);
        let so = run_somogsa(&p, &start, &SomogsaConfig::default()).unwrap();
        let nm = nelder_mead(&f, &start, &NelderMeadConfig::default()).unwrap();
        for t in [&so, &nm] {
            let (best, v) = best_of_trace(t);
            prop_assert!(v <= t.first().f1);
            prop_assert!(box5().contains(best.coords()));
            prop_assert!(t.entries().iter().all(|e| box5().contains(e.point.coords())));
        }
    }

    #[test]
    fn single_precision_tracks_double(x in coord(), y in coord()) {
        let f64p = ScalarProblem::rastrigin(box5());
        let b32 = point::Bounds::<f32>::cube(2, -5.0, 5.0).unwrap();
        let f32p = ScalarProblem32::rastrigin(b32);
        let v = f32p.eval(&[x as f32, y as f32]) as f64;
        assert_relative_eq!(v, f64p.eval(&[x, y]), epsilon = 1e-3, max_relative = 1e-4);
    }
}
