use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use wulffcap::capillary::{admissible_range, contact_angle, positivity_margin, CapillaryCap};
use wulffcap::flows::{jacobian_outward, max_inward_time, point_in_polygon};
use wulffcap::sphere::slerp;
use wulffcap::surface::{discretize, elementary_symmetric, p_n, p_n_derivative, perturb_capillary, CurvatureSpectrum, PerturbationMode, Resolution};
use wulffcap::Anisotropy;

fn family(index: usize) -> Anisotropy<3> {
    match index {
        0 => Anisotropy::isotropic(),
        1 => Anisotropy::quadratic_gauge(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap(),
        2 => Anisotropy::linear_perturbation(Vector3::new(2.0, 1.0, 2.0) / 3.0, 0.1).unwrap(),
        _ => Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap(),
    }
}

prop_compose! {
    fn unit()(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64)
        -> Vector3<f64> {
        let v = Vector3::new(x, y, z);
        if v.norm() < 1e-3 { Vector3::z() } else { v.normalize() }
    }
}

fn spectrum(kappa: Vec<f64>) -> CurvatureSpectrum<3> {
    CurvatureSpectrum::from_kappa(kappa, vec![Vector3::x(), Vector3::y()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_identity_and_wulff_membership(index in 0..4usize, z in unit(), t in 0.1..10.0f64) {
        let f = family(index);
        let phi = f.gradient(&z);
        prop_assert!((phi.dot(&z) - f.value(&z)).abs() < 1e-12);
        prop_assert!((f.value(&(z * t)) - t * f.value(&z)).abs() < 1e-12 * t);
        prop_assert!((f.dual(&phi) - 1.0).abs() < 1e-10);
        prop_assert!((f.dual(&(phi * t)) - t).abs() < 1e-10 * t);
    }

    #[test]
    fn cauchy_schwarz(index in 0..4usize, x in unit(), z in unit(), s in 0.1..5.0f64) {
        let f = family(index);
        let x = x * s;
        prop_assert!(x.dot(&z) <= f.dual(&x) * f.value(&z) + 1e-12 * s);
    }

    #[test]
    fn angle_comparison_is_monotone_along_geodesics(index in 0..4usize, x in unit(), z in unit(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        prop_assume!(x.dot(&z) > -1.0 + 1e-3);
        let f = family(index);
        let (s0, s1) = if a < b { (a, b) } else { (b, a) };
        let y0 = slerp(&x, &z, s0);
        let y1 = slerp(&x, &z, s1);
        prop_assert!(f.gradient(&y0).dot(&z) <= f.gradient(&y1).dot(&z) + 1e-12);
    }

    #[test]
    fn elementary_symmetric_generates_the_product(kappa in prop::collection::vec(-3.0..3.0f64, 1..6), t in -0.5..0.5f64) {
        let e = elementary_symmetric(&kappa);
        let series: f64 = e.iter().enumerate().map(|(r, c)| c * t.powi(r as i32)).sum();
        prop_assert!((p_n(&kappa, t) - series).abs() < 1e-10);
        let derivative: f64 = e.iter().enumerate().skip(1).map(|(r, c)| r as f64 * c * t.powi(r as i32 - 1)).sum();
        prop_assert!((p_n_derivative(&kappa, t) - derivative).abs() < 1e-9);
    }

    #[test]
    fn transported_mean_curvature_is_log_derivative(k1 in 0.1..3.0f64, k2 in 0.1..3.0f64, t in 0.0..2.0f64) {
        let s = spectrum(vec![k1.min(k2), k1.max(k2)]);
        let expected = p_n_derivative(&s.kappa, t) / p_n(&s.kappa, t);
        prop_assert!((s.transported_mean_curvature(t) - expected).abs() < 1e-12 * expected.abs().max(1.0));
        prop_assert!((jacobian_outward(&s, t).unwrap() - (1.0 + t * k1) * (1.0 + t * k2)).abs() < 1e-12 * (1.0 + t * 3.0).powi(2));
    }

    #[test]
    fn maclaurin_chain_for_positive_curvatures(k1 in 0.01..5.0f64, k2 in 0.01..5.0f64) {
        let s = spectrum(vec![k1.min(k2), k1.max(k2)]);
        prop_assert!(s.mean[1] >= s.mean[2].sqrt() - 1e-14);
        prop_assert!(s.mean[1] * s.mean[1] >= s.mean[2] - 1e-14);
        prop_assert!((max_inward_time(&s).unwrap() - 1.0 / k1.max(k2)).abs() < 1e-14 / k1.max(k2));
    }

    #[test]
    fn positivity_margin_is_positive_inside_the_range(index in 0..4usize, s in 0.05..0.95f64) {
        let f = family(index);
        let range = admissible_range(&f);
        let omega0 = range.lower + s * (range.upper - range.lower);
        prop_assert!(positivity_margin(&f, omega0, 16).unwrap() > 0.0);
    }

    #[test]
    fn isotropic_contact_angle_is_supplementary_arccos(value in -0.99..0.99f64) {
        let f = Anisotropy::<3>::isotropic();
        prop_assert!((contact_angle(&f, value).unwrap() - (-value).acos()).abs() < 1e-12);
    }

    #[test]
    fn point_in_convex_polygon(cx in -1.0..1.0f64, cy in -1.0..1.0f64, sides in 3..12usize, px in -2.0..2.0f64, py in -2.0..2.0f64) {
        let poly: Vec<[f64; 2]> = (0..sides)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
                [cx + a.cos(), cy + a.sin()]
            })
            .collect();
        // Signed distance to each edge line, positive inside.
        let margin = (0..sides)
            .map(|k| {
                let (a, b) = (poly[k], poly[(k + 1) % sides]);
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                let len = ex.hypot(ey);
                (ex * (py - a[1]) - ey * (px - a[0])) / len
            })
            .fold(f64::INFINITY, f64::min);
        prop_assume!(margin.abs() > 1e-9);
        prop_assert_eq!(point_in_polygon(&poly, [px, py]), margin > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn perturbation_fixes_the_boundary(index in 0..4usize, omega_index in 0..3usize, amplitude in -0.05..0.05f64, frequency in 0..4u32, cutoff in 2..5u32) {
        let f = family(index);
        let omega0 = [-0.4, 0.0, 0.4][omega_index];
        let cap = CapillaryCap::new(&f, omega0, 1.0, Vector3::zeros()).unwrap();
        let base = discretize(&cap, Resolution::square(16)).unwrap();
        let mode = PerturbationMode { frequency, cutoff_power: cutoff };
        let chart = perturb_capillary(cap, amplitude, mode).unwrap();
        let mesh = discretize(&chart, Resolution::square(16)).unwrap();
        for (a, b) in base.boundary.iter().zip(&mesh.boundary) {
            prop_assert!((a.node.x - b.node.x).norm() < 1e-14);
            prop_assert!((a.node.nu - b.node.nu).norm() < 1e-9);
            prop_assert!((a.mu - b.mu).norm() < 1e-9);
        }
    }
}
