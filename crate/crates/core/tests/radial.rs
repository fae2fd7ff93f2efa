use std::f64::consts::PI;
use std::sync::Arc;

use choquard_core::radial::io::{read_field, write_field};
use choquard_core::radial::Norm;
use choquard_core::special::sphere_area;
use choquard_core::{Field, Grid};
use proptest::prelude::*;

fn field(grid: &Arc<Grid>, bumps: &[(f64, f64)]) -> Field {
    Field::from_fn(Arc::clone(grid), |r| bumps.iter().map(|&(c, w)| c * (-(r / w).powi(2)).exp()).sum()).unwrap()
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, 0.4f64..3.0), 1..4)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn exponential_integral_against_closed_form() {
    let g = Arc::new(Grid::new(3, 30.0, 2000, 2.0).unwrap());
    let f = Field::from_fn(g, |r| (-r).exp()).unwrap();
    assert!(rel(f.integral(), 8.0 * PI) <= 1e-6);
}

#[test]
fn gradient_norm_of_a_gaussian() {
    // ‖∇e^{−r²/2}‖₂² = ∫ r² e^{−r²} dx = (N/2) π^{N/2}
    for n in 3..=6 {
        let g = Arc::new(Grid::new(n, 30.0, 2000, 2.0).unwrap());
        let f = Field::from_fn(g, |r| (-0.5 * r * r).exp()).unwrap();
        let exact = 0.5 * n as f64 * PI.powf(0.5 * n as f64);
        assert!(rel(f.grad_squared(), exact) <= 1e-6, "N = {n}");
        assert!(rel(f.l2_squared(), PI.powf(0.5 * n as f64)) <= 1e-8, "N = {n}");
    }
}

#[test]
fn zero_field_has_zero_norms() {
    let g = Arc::new(Grid::new(4, 5.0, 100, 2.0).unwrap());
    let z = Field::zeros(g);
    for kind in [Norm::L2, Norm::Ls(3.0), Norm::GradL2, Norm::H1(2.0)] {
        assert_eq!(z.norm(kind).unwrap(), 0.0);
    }
    assert!(z.norm(Norm::Ls(0.5)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_invariants(n in 3usize..8, radius in 0.5f64..100.0, m in 16usize..3000, gamma in 1.0f64..3.5) {
        let g = Grid::new(n, radius, m, gamma).unwrap();
        prop_assert!(g.nodes().windows(2).all(|w| w[1] > w[0]) && g.nodes()[0] > 0.0);
        prop_assert!(g.weights().iter().all(|&w| w > 0.0));
        prop_assert!(g.nodes()[0] <= 2.0 * radius * (1.0 / m as f64).powf(gamma));
        prop_assert!((g.nodes()[m - 1] - radius).abs() <= 1e-14 * radius);
    }

    #[test]
    fn quadrature_is_exact_on_low_monomials(n in 3usize..7, radius in 0.5f64..50.0, m in 1000usize..3000, gamma in 1.0f64..3.0, k in 0i32..3) {
        let g = Grid::new(n, radius, m, gamma).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|r| r.powi(k)).collect();
        let exact = sphere_area(n) * radius.powi(n as i32 + k) / (n as i32 + k) as f64;
        prop_assert!(rel(g.integrate(&vals), exact) <= 1e-8);
    }

    #[test]
    fn dilation_identities_are_exact(n in 3usize..7, b in bumps(), t in 0.05f64..20.0) {
        let g = Arc::new(Grid::new(n, 20.0, 500, 2.0).unwrap());
        let u = field(&g, &b);
        let ut = u.dilate(t).unwrap();
        let nf = n as f64;
        prop_assert!(rel(ut.l2_squared(), t.powf(nf) * u.l2_squared()) <= 1e-12);
        prop_assert!(rel(ut.grad_squared(), t.powf(nf - 2.0) * u.grad_squared()) <= 1e-12);
        prop_assert!(rel(ut.power_integral(3.3), t.powf(nf) * u.power_integral(3.3)) <= 1e-12);
        let same = u.dilate(1.0).unwrap();
        prop_assert_eq!(same.values(), u.values());
    }

    #[test]
    fn power_rescale_identities_are_exact(n in 3usize..7, b in bumps(), a in 0.01f64..100.0, s in 0.05f64..20.0, q in 2.1f64..4.0) {
        let g = Arc::new(Grid::new(n, 20.0, 500, 2.0).unwrap());
        let u = field(&g, &b);
        let w = u.power_rescale(a, s).unwrap();
        let nf = n as f64;
        prop_assert!(rel(w.l2_squared(), a * a * s.powf(-nf) * u.l2_squared()) <= 1e-12);
        prop_assert!(rel(w.grad_squared(), a * a * s.powf(2.0 - nf) * u.grad_squared()) <= 1e-12);
        prop_assert!(rel(w.power_integral(q), a.powf(q) * s.powf(-nf) * u.power_integral(q)) <= 1e-12);
    }

    #[test]
    fn lebesgue_norms_are_homogeneous(b in bumps(), c in -50.0f64..50.0, s in 1.0f64..6.0) {
        let g = Arc::new(Grid::new(3, 20.0, 300, 2.0).unwrap());
        let u = field(&g, &b);
        let base = u.norm(Norm::Ls(s)).unwrap();
        let scaled = u.scale(c).norm(Norm::Ls(s)).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-13 * scaled.max(1e-300));
    }

    #[test]
    fn quadrature_converges_at_second_order(n in 3usize..6, w in 0.5f64..3.0, gamma in 1.0f64..3.0) {
        let f = |m: usize| {
            let g = Arc::new(Grid::new(n, 12.0 * w, m, gamma).unwrap());
            Field::from_fn(g, |r| (-(r / w).powi(2)).exp() * (1.0 + r)).unwrap().integral()
        };
        let (a, b, c) = (f(200), f(400), f(800));
        // doubling M halves the node spacing, so successive changes shrink
        // at least by the square of that ratio (with a little slack)
        let floor = 1e-12 * c.abs();
        prop_assert!((c - b).abs() <= 1.5 * 0.25 * (b - a).abs() + floor, "{a} {b} {c}");
    }

    #[test]
    fn field_csv_round_trip_is_bit_exact(n in 3usize..7, radius in 1.0f64..100.0, vals in prop::collection::vec(-1e6f64..1e6, 16..64)) {
        let g = Arc::new(Grid::new(n, radius, vals.len(), 2.0).unwrap());
        let u = Field::new(g, vals).unwrap();
        let mut buf = Vec::new();
        write_field(&u, &mut buf).unwrap();
        let back: Field = read_field(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values(), u.values());
        prop_assert_eq!(back.grid().nodes(), u.grid().nodes());
    }
}
