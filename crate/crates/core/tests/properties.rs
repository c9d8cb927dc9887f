use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use dlab_core::dyadic::{cell_index, partition_defect};
use dlab_core::fuzzer::{resonance_defect, resonance_estimate_margin};
use dlab_core::lattice::{make_grid, parseval_defect, to_physical, to_spectral, Grid, GridSpec};
use dlab_core::norms::{besov_norm, w_norm, xsb_norm, y_norm, z_norm, ZConfig};
use dlab_core::num_complex::Complex64;
use dlab_core::{Field, NormMethod, Representation};

fn grid() -> Arc<Grid> {
    make_grid(GridSpec::new(PI / 2.0, 16, PI / 2.0, 32)).unwrap()
}

fn field(vals: &[(f64, f64)]) -> Field {
    let g = grid();
    let values = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    Field::from_values(&g, Representation::Spectral, values).unwrap()
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16 * 32)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_absolutely_homogeneous(v in values(), lambda in -4.0..4.0f64) {
        let f = field(&v);
        let g = f.scaled(Complex64::new(lambda, 0.0));
        let l = lambda.abs();
        prop_assert!(close(xsb_norm(&g, -0.5, 0.5), l * xsb_norm(&f, -0.5, 0.5)));
        prop_assert!(close(besov_norm(&g), l * besov_norm(&f)));
        prop_assert!(close(y_norm(&g), l * y_norm(&f)));
        let z = |x: &Field| z_norm(x, NormMethod::PasteHeuristic).value;
        prop_assert!(close(z(&g), l * z(&f)));
    }

    #[test]
    fn triangle_inequality(a in values(), b in values()) {
        let (f, g) = (field(&a), field(&b));
        let mut s = f.clone();
        s.add_assign(&g).unwrap();
        let slack = 1e-12;
        prop_assert!(xsb_norm(&s, -1.0, 0.5) <= xsb_norm(&f, -1.0, 0.5) + xsb_norm(&g, -1.0, 0.5) + slack);
        prop_assert!(besov_norm(&s) <= besov_norm(&f) + besov_norm(&g) + slack);
        prop_assert!(y_norm(&s) <= y_norm(&f) + y_norm(&g) + slack);
    }

    #[test]
    fn w_dominates_z(v in values()) {
        let f = field(&v);
        let cfg = ZConfig::default();
        prop_assert!(w_norm(&f, &cfg).value >= z_norm(&f, cfg.method).value * (1.0 - 1e-12));
    }

    #[test]
    fn transforms_are_unitary(v in values()) {
        let f = field(&v);
        prop_assert!(parseval_defect(&f).unwrap() <= 1e-12);
        let back = to_spectral(&to_physical(&f).unwrap()).unwrap();
        let err = f.values().iter().zip(back.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn cells_partition_the_lattice(v in values()) {
        prop_assert!(partition_defect(&field(&v), 8, 16) <= 1e-14);
    }

    #[test]
    fn resonance_identity(t1 in -1e3..1e3f64, x1 in -30.0..30.0f64, t2 in -1e3..1e3f64, x2 in -30.0..30.0f64) {
        let scale = 1.0 + t1.abs() + t2.abs() + (x1 + x2).powi(2) + x1 * x1 + x2 * x2;
        prop_assert!(resonance_defect(t1, x1, t2, x2) <= 1e-14 * scale);
        prop_assert!(resonance_estimate_margin(t1, x1, t2, x2) >= 0.0);
    }

    #[test]
    fn cell_index_is_monotone_in_distance(xi in -50.0..50.0f64, sigma in 0.0..200.0f64, extra in 0.0..100.0f64) {
        let near = cell_index(xi * xi + sigma, xi);
        let far = cell_index(xi * xi + sigma + extra, xi);
        prop_assert!(far.d >= near.d);
        prop_assert_eq!(far.j, near.j);
    }
}
