//! Command implementations: resolve the manifest, run the solvers, write
//! artifacts, and report a one-line summary per stage.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use plurisolve_core::analysis::{pluriharmonic_sandwich, q_bremermann_check};
use plurisolve_core::envelope::harmonic::harmonic_solution;
use plurisolve_core::envelope::properties::pb_properties_suite;
use plurisolve_core::envelope::{psh_envelope, q_psh_envelope, EnvelopeConfig};
use plurisolve_core::expr::parse_trace_expr;
use plurisolve_core::field::{BoundaryTrace, TraceFn};
use plurisolve_core::geometry::{
    build_exhaustion, build_grid, lupacciolu_check, recession_direction, Grid, Region,
};
use plurisolve_core::io::{field_to_csv, mask_to_csv, write_json};
use plurisolve_core::unbounded::{
    continuity_certificate, continuous_solution, maximal_solution, synthetic_profile,
};
use plurisolve_core::{defaults, point, Error, Point, Result};

use crate::manifest::{Command, RunManifest};

/// Exit status of a run: certificate rejection is distinguished from
/// failure so batch drivers can tell "mathematically valid but rejected"
/// from "broken input".
pub enum Outcome {
    Success,
    CertificateRejected,
}

fn shape_bbox(region: &Region, spacing: f64) -> Result<Vec<[f64; 2]>> {
    use plurisolve_core::geometry::Shape;
    let rd = region.rd();
    let pad = 2.0 * spacing;
    if let Some(b) = match &region.spec.shape {
        Shape::Ball { center, radius } => Some(
            (0..rd)
                .map(|k| [center[k] - radius - pad, center[k] + radius + pad])
                .collect::<Vec<_>>(),
        ),
        Shape::Ellipsoid { center, semi_axes } => Some(
            (0..rd)
                .map(|k| [center[k] - semi_axes[k] - pad, center[k] + semi_axes[k] + pad])
                .collect::<Vec<_>>(),
        ),
        _ => None,
    } {
        return Ok(b);
    }
    if let Some((c, r)) = region.ball_cuts.first() {
        return Ok((0..rd).map(|k| [c[k] - r - pad, c[k] + r + pad]).collect());
    }
    Err(Error::InvalidParams(
        "unbounded domain needs an explicit grid box or a truncation radius".into(),
    ))
}

struct Resolved {
    region: Region,
    grid: Arc<Grid>,
    cfg: EnvelopeConfig,
    spacing: f64,
}

fn resolve_grid(m: &RunManifest) -> Result<Resolved> {
    let spacing = m
        .grid
        .as_ref()
        .map(|g| g.spacing)
        .ok_or_else(|| Error::InvalidParams("grid.spacing is required".into()))?;
    let mut region = Region::from_spec(m.domain.clone());
    if let Some(r) = m.truncate_radius {
        let mut center = point::ZERO;
        if let Some(c) = &m.truncate_center {
            for (k, v) in c.iter().enumerate().take(4) {
                center[k] = *v;
            }
        }
        region = region.with_ball_cut(center, r);
    }
    let b = match m.grid.as_ref().and_then(|g| g.r#box.clone()) {
        Some(b) => b,
        None => shape_bbox(&region, spacing)?,
    };
    let grid = build_grid(&region, &b, spacing)?;
    let cfg = m.cfg.clone().unwrap_or_else(|| EnvelopeConfig::for_dim(m.domain.n));
    Ok(Resolved {
        region,
        grid,
        cfg,
        spacing,
    })
}

fn trace_fn(m: &RunManifest) -> Result<TraceFn> {
    let src = m
        .trace_expr
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("trace_expr is required".into()))?;
    Ok(parse_trace_expr(src, m.domain.n)?.to_trace_fn())
}

fn trace_on(grid: &Arc<Grid>, f: &TraceFn, require_nonneg: bool) -> Result<BoundaryTrace> {
    let g = f.clone();
    if require_nonneg {
        BoundaryTrace::from_fn(grid.clone(), move |p: &Point| g(p))
    } else {
        BoundaryTrace::signed_from_fn(grid.clone(), move |p: &Point| g(p))
    }
}

fn echo_manifest(m: &RunManifest, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("manifest.json"), m.to_json())?;
    Ok(())
}

#[derive(Serialize)]
struct SolveReport<'a> {
    command: &'a str,
    spacing: f64,
    interior_nodes: usize,
    boundary_nodes: usize,
    sweeps: usize,
    final_change: f64,
    tol_iter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    harmonic_oracle_sup_diff: Option<f64>,
    cfg: &'a EnvelopeConfig,
}

pub fn run(m: &RunManifest) -> Result<Outcome> {
    let out = m.output_dir.clone();
    echo_manifest(m, &out)?;
    match m.command {
        Command::SolveBounded => {
            let r = resolve_grid(m)?;
            let f = trace_fn(m)?;
            let trace = trace_on(&r.grid, &f, !r.grid.bounded_region)?;
            let run = psh_envelope(&r.grid, &trace, &r.cfg)?;
            println!(
                "solve-bounded: {} sweeps, final change {:.3e}",
                run.sweeps, run.final_change
            );
            std::fs::write(out.join("field.csv"), field_to_csv(&run.field))?;
            std::fs::write(out.join("mask.csv"), mask_to_csv(&r.grid))?;
            let oracle = if m.domain.n == 1 {
                let orc = harmonic_solution(&r.grid, &trace, &r.cfg)?;
                let d = run.field.sup_diff(&orc.field);
                println!("solve-bounded: harmonic oracle sup diff {d:.3e}");
                std::fs::write(out.join("harmonic.csv"), field_to_csv(&orc.field))?;
                Some(d)
            } else {
                None
            };
            write_json(
                &SolveReport {
                    command: "solve-bounded",
                    spacing: r.spacing,
                    interior_nodes: r.grid.interior().len(),
                    boundary_nodes: r.grid.boundary().len(),
                    sweeps: run.sweeps,
                    final_change: run.final_change,
                    tol_iter: run.tol_iter,
                    harmonic_oracle_sup_diff: oracle,
                    cfg: &r.cfg,
                },
                &out.join("report.json"),
            )?;
            Ok(Outcome::Success)
        }
        Command::SolveUnbounded => {
            let plan_spec = m
                .plan
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("plan is required".into()))?;
            let spacing = m
                .grid
                .as_ref()
                .map(|g| g.spacing)
                .ok_or_else(|| Error::InvalidParams("grid.spacing is required".into()))?;
            let cfg = m.cfg.clone().unwrap_or_else(|| EnvelopeConfig::for_dim(m.domain.n));
            let f = trace_fn(m)?;
            let v = match &plan_spec.recession {
                Some(v) => {
                    let mut p = point::ZERO;
                    for (k, c) in v.iter().enumerate().take(4) {
                        p[k] = *c;
                    }
                    p
                }
                None => recession_direction(&m.domain, defaults::PROBE_RADIUS, 64)?,
            };
            let plan = build_exhaustion(
                &m.domain,
                &v,
                plan_spec.nu_max,
                plan_spec.slab_step,
                spacing,
            )?;
            println!(
                "solve-unbounded: plan with {} levels, cuts {:?}",
                plan.nu_max, plan.c_prime
            );
            let sol = maximal_solution(&m.domain, &f, &plan, spacing, &cfg)?;
            for level in &sol.levels {
                std::fs::write(
                    out.join(format!("phi_star_{}.csv", level.nu + 1)),
                    field_to_csv(&level.field),
                )?;
            }
            std::fs::write(out.join("phi.csv"), field_to_csv(&sol.field))?;
            write_json(&sol.report, &out.join("convergence_report.json"))?;
            println!(
                "solve-unbounded: truncation residual {:.3e}, boundary agreement {:.3e}",
                sol.report.truncation_residual, sol.report.boundary_agreement
            );
            Ok(Outcome::Success)
        }
        Command::ContinuousSolution => {
            let r = resolve_grid(m)?;
            let f = trace_fn(m)?;
            let radius = m
                .patch_radius
                .unwrap_or(defaults::PATCH_RADIUS_CELLS * r.spacing);
            let (field, report) = continuous_solution(&r.grid, &f, radius, &r.cfg, None)?;
            println!(
                "continuous-solution: {} patches, boundary residual {:.3e}",
                report.centers, report.boundary_residual
            );
            std::fs::write(out.join("field.csv"), field_to_csv(&field))?;
            write_json(&report, &out.join("patch_report.json"))?;
            Ok(Outcome::Success)
        }
        Command::CertifyContinuity => {
            let spec = m
                .barrier
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("barrier is required".into()))?;
            let xs: Vec<f64> = match (&spec.profile.xs, spec.profile.x_max) {
                (Some(xs), _) => xs.clone(),
                (None, Some(hi)) => {
                    let count = spec.profile.count.max(8);
                    (0..count)
                        .map(|k| 0.5 + hi * k as f64 / count as f64)
                        .collect()
                }
                (None, None) => {
                    return Err(Error::InvalidParams(
                        "profile needs xs or x_max".into(),
                    ))
                }
            };
            let g_expr = parse_trace_expr(&spec.profile.g_expr, 1)?;
            let profile =
                synthetic_profile(&xs, |x| g_expr.eval(&[x, 0.0, 0.0, 0.0]))?;
            let samples: Vec<(f64, f64)> =
                spec.region_samples.iter().map(|s| (s[0], s[1])).collect();
            let cert = continuity_certificate(
                spec.kind,
                &profile,
                spec.eps,
                (spec.z0[0], spec.z0[1]),
                spec.params.clone(),
                &samples,
            )?;
            write_json(&cert, &out.join("certificate.json"))?;
            println!(
                "certify-continuity: granted={} (psh={}, anchor={}, region={}, growth={})",
                cert.granted,
                cert.checks.psh_ok,
                cert.checks.value_at_z0_ok,
                cert.checks.region_bound_ok,
                cert.checks.growth_domination_ok
            );
            if cert.granted {
                Ok(Outcome::Success)
            } else {
                Ok(Outcome::CertificateRejected)
            }
        }
        Command::CheckLupacciolu => {
            let poly = m
                .poly
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("poly is required".into()))?;
            let r = resolve_grid(m)?;
            let rep = lupacciolu_check(
                poly,
                &r.region,
                &r.grid,
                m.sample_points.unwrap_or(1000),
            )?;
            write_json(&rep, &out.join("report.json"))?;
            println!(
                "check-lupacciolu: holds={} worst margin {:.3e}",
                rep.holds, rep.worst_margin
            );
            Ok(Outcome::Success)
        }
        Command::Sandwich => {
            let r = resolve_grid(m)?;
            let f = trace_fn(m)?;
            let trace = trace_on(&r.grid, &f, false)?;
            let run = pluriharmonic_sandwich(&r.grid, &trace, &r.cfg, None)?;
            std::fs::write(out.join("phi.csv"), field_to_csv(&run.phi))?;
            std::fs::write(out.join("eta.csv"), field_to_csv(&run.eta))?;
            std::fs::write(out.join("chi.csv"), field_to_csv(&run.chi))?;
            write_json(&run.report, &out.join("sandwich_report.json"))?;
            println!(
                "sandwich: max gap {:.3e}, pluriharmonic={}",
                run.report.max_gap, run.report.pluriharmonic
            );
            Ok(Outcome::Success)
        }
        Command::Properties => {
            let spec = m
                .properties
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("properties is required".into()))?;
            let r = resolve_grid(m)?;
            let h1e = parse_trace_expr(&spec.h1_expr, m.domain.n)?;
            let h2e = parse_trace_expr(&spec.h2_expr, m.domain.n)?;
            let h1 = BoundaryTrace::signed_from_fn(r.grid.clone(), move |p: &Point| h1e.eval(p))?;
            let h2 = BoundaryTrace::signed_from_fn(r.grid.clone(), move |p: &Point| h2e.eval(p))?;
            let rep =
                pb_properties_suite(&r.grid, &h1, &h2, spec.c, &r.cfg, spec.norm_tol)?;
            write_json(&rep, &out.join("properties_report.json"))?;
            println!("properties: all pass = {}", rep.all_pass());
            Ok(Outcome::Success)
        }
        Command::Qsolve => {
            let r = resolve_grid(m)?;
            let q = m.q.unwrap_or(0);
            let f = trace_fn(m)?;
            let trace = trace_on(&r.grid, &f, !r.grid.bounded_region)?;
            let run = q_psh_envelope(&r.grid, &trace, q, &r.cfg)?;
            std::fs::write(out.join("field.csv"), field_to_csv(&run.field))?;
            let check = q_bremermann_check(&run.field, &trace, q, &r.cfg, 1e-5)?;
            write_json(&check, &out.join("qbremermann_report.json"))?;
            println!(
                "qsolve: q={q}, {} sweeps, q-Bremermann pass={}",
                run.sweeps, check.pass
            );
            Ok(Outcome::Success)
        }
    }
}
