use std::sync::Arc;

use super::*;
use crate::envelope::harmonic::harmonic_solution;
use crate::geometry::{build_grid, DomainSpec, Region};

fn disc_grid(h: f64) -> Arc<Grid> {
    let region = Region::from_spec(DomainSpec::ball(1, &[0.0, 0.0], 1.0).unwrap());
    build_grid(&region, &[[-1.1, 1.1], [-1.1, 1.1]], h).unwrap()
}

fn ball_grid(h: f64) -> Arc<Grid> {
    let region = Region::from_spec(DomainSpec::ball(2, &[0.0; 4], 1.0).unwrap());
    build_grid(
        &region,
        &[[-1.1, 1.1], [-1.1, 1.1], [-1.1, 1.1], [-1.1, 1.1]],
        h,
    )
    .unwrap()
}

#[test]
fn circle_mean_of_constant_is_the_constant() {
    let grid = disc_grid(0.1);
    let field = ScalarField::constant(grid.clone(), 4.25);
    let node = grid.flat_of_global([0, 0, 0, 0]).unwrap();
    let m = circle_mean(&field, node, &[1.0, 0.0, 0.0, 0.0], 0.2, 16).unwrap();
    assert!((m - 4.25).abs() < 1e-14);
}

#[test]
fn circle_mean_of_harmonic_re_z_reproduces_the_value() {
    let grid = disc_grid(0.05);
    let field = ScalarField::from_fn_lattice(grid.clone(), |p| p[0]);
    let node = grid.flat_of_global([4, -2, 0, 0]).unwrap();
    let m = circle_mean(&field, node, &[0.6, 0.8, 0.0, 0.0], 0.1, 16).unwrap();
    // Interpolation of an affine field is exact; quadrature of a harmonic
    // function reproduces the center value.
    assert!((m - grid.lattice_pos(node)[0]).abs() < 1e-12, "mean {m}");
}

#[test]
fn circle_mean_of_z1_square_gains_delta_square() {
    let grid = ball_grid(0.1);
    let field = ScalarField::from_fn_lattice(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]);
    let node = grid.flat_of_global([0, 0, 0, 0]).unwrap();
    let delta = 0.2;
    let m = circle_mean(&field, node, &[1.0, 0.0, 0.0, 0.0], delta, 16).unwrap();
    // Exact circle integral of |w + delta e^{i theta}|^2 is |w|^2 + delta^2;
    // multilinear interpolation of a convex quadratic only overshoots, by at
    // most h^2 / 2.
    assert!(m >= delta * delta - 1e-12);
    assert!(m <= delta * delta + 0.1 * 0.1 / 2.0 + 1e-12, "mean {m}");
    // Along the orthogonal complex axis the field is constant on the circle.
    let m2 = circle_mean(&field, node, &[0.0, 0.0, 1.0, 0.0], delta, 16).unwrap();
    assert!((m2 - 0.0).abs() < 1e-12);
}

#[test]
fn constant_trace_envelope_is_constant_and_immediate() {
    let grid = disc_grid(0.1);
    let trace = BoundaryTrace::from_fn(grid.clone(), |_| 5.0).unwrap();
    let run = psh_envelope(&grid, &trace, &EnvelopeConfig::for_dim(1)).unwrap();
    for f in 0..grid.len() {
        if grid.in_domain(f) {
            assert_eq!(run.field.get(f), 5.0);
        }
    }
    assert!(run.sweeps <= 2);
}

#[test]
fn disc_envelope_matches_harmonic_oracle() {
    // In C^1 the maximal subharmonic extension of continuous data is the
    // harmonic solution; the independent oracle is the finite-difference
    // Dirichlet solve.
    let grid = disc_grid(0.05);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::signed_from_fn(grid.clone(), |p| p[0]).unwrap();
    let env = psh_envelope(&grid, &trace, &cfg).unwrap();
    let oracle = harmonic_solution(&grid, &trace, &cfg).unwrap();
    let err = env.field.sup_diff(&oracle.field);
    assert!(err <= 1e-4, "envelope vs harmonic oracle: {err}");
}

#[test]
fn ball_envelope_recovers_z1_square_and_candidate_is_sweep_invariant() {
    let grid = ball_grid(0.2);
    let cfg = EnvelopeConfig::for_dim(2);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]).unwrap();

    // The exact candidate is invariant under one sweep up to the measured
    // quadrature + interpolation bound.
    let plan = SweepPlan::build(grid.clone(), &trace, &cfg).unwrap();
    let frames = frames_for(2, 0, plan.dirs.len()).unwrap();
    let candidate = ScalarField::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]);
    let (_, residual) = plan.sweep_field(&candidate, &frames);
    assert!(residual <= 1e-3, "candidate sweep residual {residual}");

    let run = psh_envelope(&grid, &trace, &cfg).unwrap();
    let err = run.field.sup_diff(&candidate);
    assert!(err <= 1e-3, "coarse envelope error {err}");
}

#[test]
fn envelope_iterates_decrease_and_idempotence_holds() {
    let grid = disc_grid(0.1);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] + 1.0).unwrap();
    let plan = SweepPlan::build(grid.clone(), &trace, &cfg).unwrap();
    let frames = frames_for(1, 0, plan.dirs.len()).unwrap();

    let mut field = plan.initial_field();
    for _ in 0..40 {
        let (next, _) = plan.sweep_field(&field, &frames);
        for &f in grid.interior() {
            let f = f as usize;
            assert!(next.get(f) <= field.get(f) + 1e-15, "iterates must decrease");
            assert!(next.get(f) >= trace.min() - 1e-12, "bounded below by min h");
        }
        field = next;
    }

    let run = plan.solve(&frames).unwrap();
    let (_, change) = plan.sweep_field(&run.field, &frames);
    assert!(change <= run.tol_iter, "idempotence: {change}");
    // Converged field passes the discrete psh certificate.
    let (surplus, _) = plan.surplus_min(&run.field, &frames);
    assert!(surplus >= -run.tol_iter, "psh certificate: {surplus}");
}

#[test]
fn envelope_dominates_scripted_competitors() {
    let grid = disc_grid(0.1);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] + 1.5).unwrap();
    let run = psh_envelope(&grid, &trace, &cfg).unwrap();
    // Competitors: discrete-psh fields staying below the trace on the wall.
    let competitors = [
        ScalarField::from_fn(grid.clone(), |p| p[0] + 0.5),
        ScalarField::constant(grid.clone(), 0.5),
        ScalarField::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1] - 1.0),
    ];
    for w in &competitors {
        for f in 0..grid.len() {
            if grid.in_domain(f) {
                assert!(
                    run.field.get(f) >= w.get(f) - 1e-6,
                    "domination fails at {f}"
                );
            }
        }
    }
}

#[test]
fn plurisuperharmonic_envelope_mirrors_the_psh_one() {
    let grid = disc_grid(0.05);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::signed_from_fn(grid.clone(), |p| p[0]).unwrap();
    let chi = plurisuperharmonic_envelope(&grid, &trace, &cfg).unwrap();
    let exact = ScalarField::from_fn(grid.clone(), |p| p[0]);
    assert!(chi.field.sup_diff(&exact) <= 1e-4);

    let c5 = BoundaryTrace::from_fn(grid.clone(), |_| 5.0).unwrap();
    let chi5 = plurisuperharmonic_envelope(&grid, &c5, &cfg).unwrap();
    for f in 0..grid.len() {
        if grid.in_domain(f) {
            assert_eq!(chi5.field.get(f), 5.0);
        }
    }
}

#[test]
fn ball_plurisuperharmonic_envelope_of_z1sq_is_one_minus_z2sq() {
    let grid = ball_grid(0.2);
    let cfg = EnvelopeConfig::for_dim(2);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]).unwrap();
    let chi = plurisuperharmonic_envelope(&grid, &trace, &cfg).unwrap();
    // On the sphere |z1|^2 = 1 - |z2|^2, and 1 - |z2|^2 is plurisuperharmonic
    // and sweep-invariant. Compared on interior nodes: wall-band nodes are
    // pinned to the trace by classification.
    let exact = ScalarField::from_fn(grid.clone(), |p| 1.0 - p[2] * p[2] - p[3] * p[3]);
    let err = chi.field.sup_diff_interior(&exact);
    assert!(err <= 1e-3, "plurisuperharmonic envelope error {err}");
}

#[test]
fn q_zero_envelope_coincides_with_psh_envelope() {
    let grid = ball_grid(0.25);
    let cfg = EnvelopeConfig::for_dim(2);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]).unwrap();
    let a = psh_envelope(&grid, &trace, &cfg).unwrap();
    let b = q_psh_envelope(&grid, &trace, 0, &cfg).unwrap();
    assert_eq!(a.field.sup_diff(&b.field), 0.0, "identical by definition");
}

#[test]
fn q_envelopes_are_monotone_in_q_and_constants_are_fixed_points() {
    let grid = ball_grid(0.25);
    let cfg = EnvelopeConfig::for_dim(2);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]).unwrap();
    let u0 = q_psh_envelope(&grid, &trace, 0, &cfg).unwrap();
    let u1 = q_psh_envelope(&grid, &trace, 1, &cfg).unwrap();
    for f in 0..grid.len() {
        if grid.in_domain(f) {
            assert!(
                u0.field.get(f) <= u1.field.get(f) + 1e-9,
                "q-monotonicity fails at node {f}"
            );
        }
    }
    let c = BoundaryTrace::from_fn(grid.clone(), |_| 2.0).unwrap();
    for q in 0..2 {
        let u = q_psh_envelope(&grid, &c, q, &cfg).unwrap();
        for f in 0..grid.len() {
            if grid.in_domain(f) {
                assert_eq!(u.field.get(f), 2.0);
            }
        }
    }
}

#[test]
fn invalid_q_is_rejected() {
    let grid = disc_grid(0.1);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::from_fn(grid.clone(), |_| 1.0).unwrap();
    assert!(matches!(
        q_psh_envelope(&grid, &trace, 1, &cfg),
        Err(Error::InvalidQ { q: 1, n: 1 })
    ));
}

#[test]
fn negative_trace_without_escape_hatch_is_rejected() {
    let grid = disc_grid(0.1);
    let values = vec![-1.0; grid.boundary().len()];
    assert!(matches!(
        BoundaryTrace::from_values(grid.clone(), values),
        Err(Error::NegativeTrace { .. })
    ));
}

#[test]
fn sequential_and_parallel_sweeps_are_bit_identical() {
    let grid = disc_grid(0.1);
    let cfg = EnvelopeConfig::for_dim(1);
    let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[0] + 1.0).unwrap();
    let plan = SweepPlan::build(grid.clone(), &trace, &cfg).unwrap();
    let frames = frames_for(1, 0, plan.dirs.len()).unwrap();
    let mut a = plan.work_from(&plan.initial_field());
    let mut b = a.clone();
    for _ in 0..25 {
        let ca = plan.sweep_once(&mut a, &frames);
        let cb = plan.sweep_once_seq(&mut b, &frames);
        assert_eq!(ca.to_bits(), cb.to_bits());
    }
    for f in 0..grid.len() {
        if grid.in_domain(f) {
            assert_eq!(a[f].to_bits(), b[f].to_bits());
        }
    }
}
