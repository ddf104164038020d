//! Property tests for the structural invariants that hold across parameter
//! ranges, not just the worked examples.

use proptest::prelude::*;
use std::sync::Arc;

use plurisolve_core::envelope::{psh_envelope, EnvelopeConfig};
use plurisolve_core::geometry::{
    build_grid, classify_point, veronese_dimension, DomainSpec, NodeClass, PointClass, Region,
};
use plurisolve_core::expr::parse_trace_expr;
use plurisolve_core::BoundaryTrace;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn veronese_equals_monomial_enumeration(n in 1u64..6, d in 1u64..5) {
        // Count degree-d exponent multi-indices in n+1 variables, minus one.
        fn count(vars: usize, d: u64) -> u64 {
            if vars == 1 {
                1
            } else {
                (0..=d).map(|k| count(vars - 1, d - k)).sum()
            }
        }
        prop_assert_eq!(veronese_dimension(n, d).unwrap(), count(n as usize + 1, d) - 1);
    }

    #[test]
    fn mask_partition_and_classification_agree(
        radius in 0.4f64..1.1,
        cx in -0.3f64..0.3,
        cy in -0.3f64..0.3,
    ) {
        let region = Region::from_spec(DomainSpec::ball(1, &[cx, cy], radius).unwrap());
        let grid = build_grid(&region, &[[-1.6, 1.6], [-1.6, 1.6]], 0.1).unwrap();
        let mut counts = [0usize; 3];
        for f in 0..grid.len() {
            counts[grid.class(f) as usize] += 1;
        }
        prop_assert_eq!(counts.iter().sum::<usize>(), grid.len());
        prop_assert_eq!(counts[0], grid.interior().len());
        prop_assert_eq!(counts[1], grid.boundary().len());
        // Interior nodes classify pointwise as interior; boundary snaps lie
        // in the wall band.
        for &f in grid.interior().iter().step_by(17) {
            let c = classify_point(&region, &grid.lattice_pos(f as usize), 0.1).unwrap();
            prop_assert_eq!(c, PointClass::Interior);
        }
        for ord in (0..grid.boundary().len()).step_by(7) {
            prop_assert!(region.rho(&grid.snap_of(ord)).abs() <= 0.5 * 0.1 + 1e-9);
        }
        // Every interior node keeps its axis neighbors inside the mask.
        let strides = grid.strides();
        for &f in grid.interior().iter().step_by(13) {
            for k in 0..grid.rd() {
                prop_assert!(grid.class(f as usize + strides[k]) != NodeClass::Exterior);
                prop_assert!(grid.class(f as usize - strides[k]) != NodeClass::Exterior);
            }
        }
    }

    #[test]
    fn expression_evaluator_matches_reference(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
    ) {
        let src = format!("max({a} * x1 + {b}, abs(y1) - exp(x1 / 4)) + min({b}, 0) * y1^2");
        let e = parse_trace_expr(&src, 1).unwrap();
        let reference = f64::max(a * x + b, y.abs() - (x / 4.0).exp()) + f64::min(b, 0.0) * y * y;
        let got = e.eval(&[x, y, 0.0, 0.0]);
        prop_assert!((got - reference).abs() <= 1e-12 * (1.0 + reference.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn envelope_is_monotone_in_the_data_and_shift_equivariant(
        amp in 0.0f64..0.8,
        bump in 0.0f64..0.7,
        c in 0.1f64..2.0,
    ) {
        let region = Region::from_spec(DomainSpec::ball(1, &[0.0, 0.0], 1.0).unwrap());
        let grid = build_grid(&region, &[[-1.1, 1.1], [-1.1, 1.1]], 0.1).unwrap();
        let cfg = EnvelopeConfig::for_dim(1);
        let h1 = BoundaryTrace::from_fn(Arc::clone(&grid), move |p| 1.0 + amp * p[0]).unwrap();
        let h2 = BoundaryTrace::from_fn(Arc::clone(&grid), move |p| {
            1.0 + amp * p[0] + bump * p[1] * p[1]
        })
        .unwrap();
        let u1 = psh_envelope(&grid, &h1, &cfg).unwrap().field;
        let u2 = psh_envelope(&grid, &h2, &cfg).unwrap().field;
        let tol = 2e-8 * (2.0 + amp + bump);
        for f in 0..grid.len() {
            if grid.in_domain(f) {
                prop_assert!(u1.get(f) <= u2.get(f) + tol);
            }
        }
        let u1c = psh_envelope(&grid, &h1.shift(c), &cfg).unwrap().field;
        for f in 0..grid.len() {
            if grid.in_domain(f) {
                prop_assert!((u1c.get(f) - u1.get(f) - c).abs() <= 2.0 * tol);
            }
        }
    }
}
