//! Property-based invariants over random points of every type.

use proptest::prelude::*;

use toda_duality::duality::toda_to_goldfish;
use toda_duality::poissonlab::{poisson_bracket, ObservableHandle};
use toda_duality::toda::toda_momentum_residuals;
use toda_duality::{
    a_from_p, build_lax, goldfish_hamiltonians, lax_spectrum, moser_momentum_residual, p_from_a,
    Family, GoldfishPoint, ObservableFamily, PhasePoint, RootDatum, TodaPoint,
};

fn algebra() -> impl Strategy<Value = RootDatum> {
    (0usize..4, 1usize..=5).prop_filter_map("rank too small", |(f, n)| {
        let family = Family::ALL[f];
        (n >= family.min_rank()).then(|| RootDatum::new(family, n).unwrap())
    })
}

fn toda_point(n: usize) -> impl Strategy<Value = TodaPoint> {
    (
        prop::collection::vec(-1.5f64..1.5, n),
        prop::collection::vec(-1.5f64..1.5, n),
    )
        .prop_map(|(q, p)| TodaPoint::new(q, p).unwrap())
}

/// Chamber point built from positive gaps; A is shifted to straddle zero.
fn goldfish_point(d: &RootDatum) -> impl Strategy<Value = GoldfishPoint> {
    let n = d.rank();
    let family = d.family();
    (
        0.1f64..1.0,
        prop::collection::vec(0.1f64..1.0, n - 1),
        prop::collection::vec(-1.0f64..1.0, n),
    )
        .prop_map(move |(last, gaps, p)| {
            let mut q = vec![last; n];
            for i in (0..n - 1).rev() {
                q[i] = q[i + 1] + gaps[i];
            }
            if family == Family::A {
                let mid = 0.5 * (q[0] + q[n - 1]);
                q.iter_mut().for_each(|v| *v -= mid);
            }
            GoldfishPoint::new(q, p).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lax_pair_satisfies_momentum_equations((d, pt) in algebra().prop_flat_map(|d| {
        let n = d.rank();
        (Just(d), toda_point(n))
    })) {
        let (a, b) = toda_momentum_residuals(&d, &pt).unwrap();
        prop_assert!(a < 1e-9 && b < 1e-9);
        let lax = build_lax(&d, &pt).unwrap();
        prop_assert!(d.algebra_residual(&lax.x).unwrap() < 1e-12);
    }

    #[test]
    fn compact_projection_is_idempotent((d, pt) in algebra().prop_flat_map(|d| {
        let n = d.rank();
        (Just(d), toda_point(n))
    })) {
        // Perturb X off the symmetric locus so the projection is non-trivial.
        let x = build_lax(&d, &pt).unwrap().x;
        let y = &x + &d.momentum_value().scale_real(0.7);
        let once = d.project_compact(&y).unwrap();
        let twice = d.project_compact(&once).unwrap();
        prop_assert!(once.distance(&twice) < 1e-14);
    }

    #[test]
    fn moser_gauge_satisfies_momentum_equation((d, gp) in algebra().prop_flat_map(|d| {
        let s = goldfish_point(&d);
        (Just(d), s)
    })) {
        let mp = a_from_p(&d, &gp).unwrap();
        prop_assert!(moser_momentum_residual(&d, &mp).unwrap() < 1e-9);
    }

    #[test]
    fn goldfish_hamiltonians_are_positive((d, gp) in algebra().prop_flat_map(|d| {
        let s = goldfish_point(&d);
        (Just(d), s)
    })) {
        let h = goldfish_hamiltonians(&d, &gp, d.rank()).unwrap();
        prop_assert!(h.iter().all(|v| *v > 0.0), "{h:?}");
    }

    #[test]
    fn momentum_change_of_variables_inverts((d, gp) in algebra().prop_flat_map(|d| {
        let s = goldfish_point(&d);
        (Just(d), s)
    })) {
        let back = p_from_a(&d, &a_from_p(&d, &gp).unwrap()).unwrap();
        for (a, b) in gp.phat.iter().zip(&back.phat) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_image_lies_in_the_chamber((d, pt) in algebra().prop_flat_map(|d| {
        let n = d.rank();
        (Just(d), toda_point(n))
    })) {
        // Non-generic samples are allowed to fail; generic ones must land
        // strictly inside the chamber with qhat the top of the Lax spectrum.
        if let Ok(gp) = toda_to_goldfish(&d, &pt) {
            prop_assert!(d.chamber_margin(&gp.qhat) > 0.0);
            let spectrum = lax_spectrum(&d, &pt).unwrap();
            for (a, b) in gp.qhat.iter().zip(&spectrum) {
                if d.family() == Family::D {
                    prop_assert!((a.abs() - b.abs()).abs() < 1e-9);
                } else {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn brackets_are_antisymmetric((d, pt) in algebra()
        .prop_filter("needs two Hamiltonians", |d| d.rank() >= 2)
        .prop_flat_map(|d| {
            let n = d.rank();
            (Just(d), toda_point(n))
        })) {
        let a = d.algebra();
        let f = ObservableHandle::new(ObservableFamily::Toda, 1, a).unwrap();
        let g = ObservableHandle::new(ObservableFamily::Toda, 2, a).unwrap();
        let point = PhasePoint::Toda(pt);
        let fg = poisson_bracket(&d, &f, &g, &point, 1e-3).unwrap();
        let gf = poisson_bracket(&d, &g, &f, &point, 1e-3).unwrap();
        prop_assert!((fg + gf).abs() <= 1e-12 * fg.abs().max(1.0));
    }
}
