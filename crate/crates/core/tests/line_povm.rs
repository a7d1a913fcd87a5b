use povm_core::line_povm::{
    first_moment_line, nonuniqueness_witness, position_spectral, variance_additivity_check,
    DensityKind, DensityProfile, LineGrid, SmearedPositionPovm,
};
use povm_core::quadrature::integrate;
use povm_core::RealSet;
use proptest::prelude::*;

fn povm(kind: DensityKind) -> SmearedPositionPovm {
    let grid = LineGrid::symmetric(6.0, 0.02).unwrap();
    SmearedPositionPovm::new(DensityProfile::new(grid, kind).unwrap())
}

#[test]
fn gaussian_values_match_integrated_density() {
    let e = povm(DensityKind::Gaussian {
        sigma: 0.4,
        center: 0.1,
    });
    let set = RealSet::normalize(&[(-0.7, 0.2), (1.0, 1.6)]).unwrap();
    let v = e.value(&set).operator;
    for j in [0, 150, 300, 450, 600] {
        let q = e.grid().point(j);
        let oracle: f64 = set
            .intervals()
            .iter()
            .map(|&(a, b)| integrate(|y| e.density().pdf(q - y), a, b, 1e-14))
            .sum();
        assert!((v.entries()[j] - oracle).abs() < 1e-12, "j={j}");
    }
}

#[test]
fn mean_zero_first_moment_is_position() {
    for kind in [
        DensityKind::Uniform {
            half_width: 0.8,
            center: 0.0,
        },
        DensityKind::Gaussian {
            sigma: 0.3,
            center: 0.0,
        },
        DensityKind::Delta { center: 0.0 },
    ] {
        let e = povm(kind);
        let m = first_moment_line(&e);
        let q = e.grid().points();
        for j in e.interior_points() {
            assert!((m.entries()[j] - q[j]).abs() <= 1e-8);
        }
    }
}

#[test]
fn additivity_residual_shrinks_quadratically() {
    let kind = DensityKind::Gaussian {
        sigma: 0.5,
        center: 0.0,
    };
    let residual = |h: f64| {
        let grid = LineGrid::symmetric(7.0, h).unwrap();
        let e = SmearedPositionPovm::new(DensityProfile::new(grid, kind.clone()).unwrap());
        let phi = grid.gaussian_state(0.3, 0.6).unwrap();
        let r = variance_additivity_check(&e, &phi).unwrap();
        assert!(r.holds());
        r.residual
    };
    let (coarse, fine) = (residual(0.04), residual(0.02));
    let order = (coarse / fine).log2();
    assert!((1.8..=2.2).contains(&order), "{order}");
}

#[test]
fn witness_separates_measures_with_equal_moments() {
    let w = nonuniqueness_witness(&LineGrid::symmetric(5.0, 0.01).unwrap()).unwrap();
    assert!(w.moment_gap <= 1e-8);
    assert!(w.measure_gap > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn translation_covariance(steps in -50i64..50, a in -2.0f64..2.0, len in 0.01f64..2.0) {
        // shifting the set by whole grid steps shifts the diagonal
        let e = povm(DensityKind::Gaussian { sigma: 0.25, center: 0.0 });
        let h = e.grid().spacing;
        let s = steps as f64 * h;
        let set = RealSet::interval(a, a + len).unwrap();
        let base = e.value(&set).operator;
        let moved = e.value(&set.shift(s)).operator;
        let n = e.grid().n_points as i64;
        for j in 0..n {
            let k = j + steps;
            if (0..n).contains(&k) {
                prop_assert!((moved.entries()[k as usize] - base.entries()[j as usize]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn values_are_monotone(a in -3.0f64..3.0, len in 0.0f64..2.0, extra in 0.0f64..1.0) {
        let e = povm(DensityKind::Uniform { half_width: 0.5, center: 0.0 });
        let small = e.value(&RealSet::interval(a, a + len + 1e-9).unwrap()).operator;
        let large = e.value(&RealSet::interval(a - extra, a + len + extra + 1e-9).unwrap()).operator;
        for (s, l) in small.entries().iter().zip(large.entries()) {
            prop_assert!(*s <= *l + 1e-15);
        }
    }

    #[test]
    fn sharp_position_is_multiplicative(a in -1.0f64..1.0, b in -1.0f64..1.0, len in 0.1f64..1.5) {
        let grid = LineGrid::new(41, 0.05).unwrap();
        let x = RealSet::interval(a, a + len).unwrap();
        let y = RealSet::interval(b, b + len).unwrap();
        let lhs = position_spectral(&grid, &x).product(&position_spectral(&grid, &y));
        prop_assert_eq!(lhs, position_spectral(&grid, &x.intersection(&y)));
    }
}
