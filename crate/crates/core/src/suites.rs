//! Named check suites over randomly sampled points.
//!
//! Each check measures one residual against a pinned threshold and lands in
//! a [`crate::report::SuiteResult`]. Sampling is seeded, and worst-case
//! residuals are independent of how the point set is chunked across
//! threads, so a fixed seed gives a byte-identical report.
//!
//! Gating rule: a check that presupposes another property is reported as
//! `skipped` (not `fail`) when that property's own check fails or when the
//! configuration is outside the check's domain. A deliberately broken
//! coupling pairing therefore shows up as exactly one failing check.

use crate::config::{Gauge, MetricSpec, ProfileVariant};
use crate::geodesic::{geodesic_integrate, parallel_frame_curvature, GeodesicState, Trajectory, TrajectoryFlag};
use crate::geometry::{jacobi_operator, Geometry};
use crate::holonomy::{holonomy_report, su11_normal_form, HolonomyReport, Su11Report};
use crate::kahler::{
    ambrose_singer_residuals, d_kahler_form_residual, lemma_identities, linear_class_residuals,
    nabla_j_residual, parallel_theta_residual, standard_j, walker_residual,
};
use crate::lie_model::{
    build_algebra, export_structure_constants, jacobi_check, k_geodesic, matrix_rep_check,
    structure_diagnostics, KFlag, KGeodesicReport,
};
use crate::linalg::sym_eigenvalues;
use crate::metric::{coeff_jets, metric_components, EngineError, Point, W1, W2, Z2};
use crate::quaternionic::{flatness_report, flatness_report_with_constraints, FlatnessReport, QkError};
use crate::report::{CheckResult, SuiteResult};
use crate::waves::{
    heisenberg_table, killing_residual, oscillator_killing_fields, ssi_structure_check,
    wave_curvature_and_symmetry, PlaneWaveSpec, WaveError,
};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_METRIC_INVERSE: f64 = 1e-12;
const TOL_CHRISTOFFEL_FD: f64 = 1e-6;
const TOL_RIEMANN_SYM: f64 = 1e-11;
const TOL_BIANCHI_SECOND: f64 = 1e-9;
const TOL_RICCI_FLAT: f64 = 1e-9;
const TOL_CURVATURE_FORMULA: f64 = 1e-10;
const TOL_PARALLEL_CURVATURE: f64 = 1e-10;
const TOL_VSI: f64 = 1e-9;
const TOL_HERMITIAN: f64 = 1e-12;
const TOL_KAHLER_CLOSED: f64 = 1e-10;
const TOL_CAUCHY_RIEMANN: f64 = 1e-12;
const TOL_PARALLEL_J: f64 = 1e-10;
const TOL_CANONICAL_CONNECTION: f64 = 1e-9;
const TOL_THETA_RECURRENCE: f64 = 1e-9;
const TOL_LINEAR_MODEL: f64 = 1e-9;
const TOL_PARALLEL_THETA: f64 = 1e-10;
const TOL_OSSERMAN_NILPOTENT: f64 = 1e-10;
const TOL_JACOBI_PIN: f64 = 1e-10;
const TOL_WALKER: f64 = 1e-11;
const TOL_WALL_TIME: f64 = 1e-6 + 1e-9; // wall at rho = RHO_MIN plus event location slack
const TOL_FRAME_CURVATURE: f64 = 1e-6;
const TOL_HOLONOMY_IDENTITIES: f64 = 1e-12;
const TOL_SU11: f64 = 1e-10;
const TOL_REP_LINEARITY: f64 = 1e-12;
const TOL_K_GEODESIC: f64 = 1e-6;
const TOL_WAVE_KILLING: f64 = 1e-8;
const TOL_WAVE_HEISENBERG: f64 = 1e-9;
const TOL_WAVE_CURVATURE: f64 = 1e-10;
const TOL_WAVE_VSI: f64 = 1e-9;
const TOL_WAVE_SSI: f64 = 1e-9;

pub const VERIFY_SUITES: [&str; 6] =
    ["metric", "curvature", "kahler", "ambrose_singer", "osserman", "walker"];

fn threads_from_env() -> usize {
    std::env::var("PWLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|t| t.clamp(1, 64))
        .unwrap_or(1)
}

/// Componentwise worst case of `f` over `items`, fanned out over
/// `PWLAB_THREADS` workers. max() commutes, so the result is identical for
/// every thread count; on multiple failures the error of the earliest chunk
/// wins.
fn fold_max<T, E, F>(items: &[T], width: usize, f: F) -> Result<Vec<f64>, E>
where
    T: Sync,
    E: Send,
    F: Fn(&T) -> Result<Vec<f64>, E> + Sync,
{
    fn merge(acc: &mut [f64], v: &[f64]) {
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = if x.is_nan() { f64::INFINITY } else { a.max(x) };
        }
    }
    let threads = threads_from_env().min(items.len().max(1));
    if threads <= 1 {
        let mut acc = vec![0.0; width];
        for it in items {
            merge(&mut acc, &f(it)?);
        }
        return Ok(acc);
    }
    let chunk = items.len().div_ceil(threads);
    let partials: Vec<Result<Vec<f64>, E>> = std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|ch| {
                s.spawn(move || {
                    let mut acc = vec![0.0; width];
                    for it in ch {
                        merge(&mut acc, &f(it)?);
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite worker panicked")).collect()
    });
    let mut acc = vec![0.0; width];
    for pr in partials {
        merge(&mut acc, &pr?);
    }
    Ok(acc)
}

/// Seeded sample of evaluation points with rho in [1/2, 3] and the
/// remaining coordinates in [-2, 2].
pub fn sample_points(dim: usize, samples: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let rho = rng.gen_range(0.5..3.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut c = vec![0.0; dim];
            c[W1] = rho * phi.cos();
            c[W2] = rho * phi.sin();
            for slot in c.iter_mut().skip(2) {
                *slot = rng.gen_range(-2.0..2.0);
            }
            Point(c)
        })
        .collect()
}

/// Worst-case coefficientwise defect of s = "i times r" across all
/// couplings; zero exactly when every coupling is a holomorphic pair.
pub fn coupling_pairing_residual(spec: &MetricSpec) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for c in &spec.couplings {
        for k in 0..c.r_coeffs.len().max(c.s_coeffs.len()) {
            let p = c.r_coeffs.get(k).copied().unwrap_or_default();
            let q = c.s_coeffs.get(k).copied().unwrap_or_default();
            worst = worst.max((q - i * p).norm());
        }
    }
    worst
}

fn compensated(spec: &MetricSpec) -> MetricSpec {
    let mut s = spec.clone();
    s.gauge = Gauge::Compensated;
    s
}

/// Run the verification suites (all of them, or the one named by `suite`)
/// on `samples` seeded points.
pub fn run_verify(
    spec: &MetricSpec,
    suite: Option<&str>,
    samples: usize,
    seed: u64,
) -> Result<Vec<SuiteResult>, EngineError> {
    let pts = sample_points(spec.dim(), samples, seed);
    let cr = coupling_pairing_residual(spec);
    let cr_ok = cr <= TOL_CAUCHY_RIEMANN;
    let want = |name: &str| suite.is_none() || suite == Some(name);
    let mut out = Vec::new();
    if want("metric") {
        out.push(metric_suite(spec, &pts)?);
    }
    if want("curvature") {
        out.push(curvature_suite(spec, &pts, cr_ok)?);
    }
    if want("kahler") {
        out.push(kahler_suite(spec, &pts, cr, cr_ok)?);
    }
    if want("ambrose_singer") {
        out.push(ambrose_singer_suite(spec, &pts, cr_ok)?);
    }
    if want("osserman") {
        out.push(osserman_suite(spec, &pts, seed, cr_ok)?);
    }
    if want("walker") {
        out.push(walker_suite(spec, &pts)?);
    }
    Ok(out)
}

fn metric_suite(spec: &MetricSpec, pts: &[Point]) -> Result<SuiteResult, EngineError> {
    let dim = spec.dim();
    let (sig_neg, sig_pos) = spec.signature();
    let r = fold_max(pts, 5, |p| {
        let geo = Geometry::new(spec, p)?;
        let gm = geo.metric().to_matrix();
        let gi = geo.metric_inverse().to_matrix();
        let mut inv = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += gm[a][k] * gi[k][b];
                }
                inv = inv.max((acc - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }

        let eig = sym_eigenvalues(&gm);
        let scale = eig.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let pos = eig.iter().filter(|&&l| l > 1e-9 * scale).count();
        let neg = eig.iter().filter(|&&l| l < -1e-9 * scale).count();
        let mismatch = (pos != sig_pos || neg != sig_neg || pos + neg != dim) as usize as f64;

        let gamma = geo.christoffel();
        let h = 1e-5;
        let mut dg = vec![vec![vec![0.0; dim]; dim]; dim];
        for (k, dgk) in dg.iter_mut().enumerate() {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp.0[k] += h;
            pm.0[k] -= h;
            let gp = metric_components(spec, &pp)?.to_matrix();
            let gm2 = metric_components(spec, &pm)?.to_matrix();
            for a in 0..dim {
                for b in 0..dim {
                    dgk[a][b] = (gp[a][b] - gm2[a][b]) / (2.0 * h);
                }
            }
        }
        let mut chfd = 0.0f64;
        for l in 0..dim {
            for m in 0..dim {
                for n in 0..dim {
                    let mut acc = 0.0;
                    for s in 0..dim {
                        acc += gi[l][s] * (dg[m][s][n] + dg[n][s][m] - dg[s][m][n]);
                    }
                    chfd = chfd.max((0.5 * acc - gamma.get(&[l, m, n])).abs());
                }
            }
        }

        let r4 = geo.riemann();
        let mut rsym = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let v = r4.get(&[a, b, c, d]);
                        rsym = rsym.max((v + r4.get(&[b, a, c, d])).abs());
                        rsym = rsym.max((v + r4.get(&[a, b, d, c])).abs());
                        rsym = rsym.max((v - r4.get(&[c, d, a, b])).abs());
                        let cyc = v + r4.get(&[a, c, d, b]) + r4.get(&[a, d, b, c]);
                        rsym = rsym.max(cyc.abs());
                    }
                }
            }
        }

        let nr = geo.nabla_riemann();
        let mut b2 = 0.0f64;
        for e in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        for d in 0..dim {
                            let cyc = nr.get(&[e, a, b, c, d])
                                + nr.get(&[a, b, e, c, d])
                                + nr.get(&[b, e, a, c, d]);
                            b2 = b2.max(cyc.abs());
                        }
                    }
                }
            }
        }

        Ok(vec![inv, mismatch, chfd, rsym, b2])
    })?;
    Ok(SuiteResult {
        name: "metric".into(),
        checks: vec![
            CheckResult::measured("metric_inverse", r[0], TOL_METRIC_INVERSE),
            CheckResult::measured("metric_signature", r[1], 0.5),
            CheckResult::measured("christoffel_vs_fd", r[2], TOL_CHRISTOFFEL_FD),
            CheckResult::measured("riemann_symmetries", r[3], TOL_RIEMANN_SYM),
            CheckResult::measured("bianchi_second", r[4], TOL_BIANCHI_SECOND),
        ],
    })
}

fn curvature_suite(spec: &MetricSpec, pts: &[Point], cr_ok: bool) -> Result<SuiteResult, EngineError> {
    let is_cw = spec.profile.variant == ProfileVariant::CahenWallachAnalog;
    // Parallel curvature is a statement about the homogeneous representative,
    // so it is measured in the gauge that keeps g(dw,dw) equal to the profile
    // coefficient.
    let cw_spec = compensated(spec);
    let r = fold_max(pts, 4, |p| {
        let geo = Geometry::new(spec, p)?;
        let ricci = geo.ricci().max_abs();
        let cf = if cr_ok {
            let lap = coeff_jets(spec, p)?.b_eff().laplacian();
            (geo.riemann().get(&[W1, W2, W1, W2]) - 0.5 * lap).abs()
        } else {
            0.0
        };
        let cw = if is_cw { Geometry::new(&cw_spec, p)?.nabla_riemann().max_abs() } else { 0.0 };
        let inv = geo
            .scalar_invariants(spec, p, 2)
            .into_iter()
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        Ok(vec![ricci, cf, cw, inv])
    })?;
    let cf_check = if cr_ok {
        CheckResult::measured("curvature_formula", r[1], TOL_CURVATURE_FORMULA)
    } else {
        CheckResult::skipped("curvature_formula", TOL_CURVATURE_FORMULA)
    };
    let cw_check = if is_cw {
        CheckResult::measured("parallel_curvature", r[2], TOL_PARALLEL_CURVATURE)
    } else {
        CheckResult::skipped("parallel_curvature", TOL_PARALLEL_CURVATURE)
    };
    Ok(SuiteResult {
        name: "curvature".into(),
        checks: vec![
            CheckResult::measured("ricci_flat", r[0], TOL_RICCI_FLAT),
            cf_check,
            cw_check,
            CheckResult::measured("vsi_invariants", r[3], TOL_VSI),
        ],
    })
}

fn kahler_suite(
    spec: &MetricSpec,
    pts: &[Point],
    cr: f64,
    cr_ok: bool,
) -> Result<SuiteResult, EngineError> {
    let dim = spec.dim();
    let jm = standard_j(spec.n).matrix;
    let mut j2 = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = 0.0;
            for k in 0..dim {
                acc += jm[a][k] * jm[k][b];
            }
            j2 = j2.max((acc + if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    let r = fold_max(pts, 3, |p| {
        let gm = metric_components(spec, p)?.to_matrix();
        let mut herm = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = 0.0;
                for x in 0..dim {
                    for y in 0..dim {
                        acc += jm[x][a] * gm[x][y] * jm[y][b];
                    }
                }
                herm = herm.max((acc - gm[a][b]).abs());
            }
        }
        if cr_ok {
            Ok(vec![herm, d_kahler_form_residual(spec, p)?, nabla_j_residual(spec, p)?])
        } else {
            Ok(vec![herm, 0.0, 0.0])
        }
    })?;
    let (closed, pj) = if cr_ok {
        (
            CheckResult::measured("kahler_closed", r[1], TOL_KAHLER_CLOSED),
            CheckResult::measured("parallel_j", r[2], TOL_PARALLEL_J),
        )
    } else {
        (
            CheckResult::skipped("kahler_closed", TOL_KAHLER_CLOSED),
            CheckResult::skipped("parallel_j", TOL_PARALLEL_J),
        )
    };
    Ok(SuiteResult {
        name: "kahler".into(),
        checks: vec![
            CheckResult::measured("hermitian_metric", r[0], TOL_HERMITIAN),
            CheckResult::measured("j_squared", j2, 0.0),
            CheckResult::measured("cauchy_riemann", cr, TOL_CAUCHY_RIEMANN),
            closed,
            pj,
        ],
    })
}

fn ambrose_singer_suite(
    spec: &MetricSpec,
    pts: &[Point],
    cr_ok: bool,
) -> Result<SuiteResult, EngineError> {
    let names: [(&str, f64); 4] = [
        ("canonical_connection", TOL_CANONICAL_CONNECTION),
        ("theta_recurrence", TOL_THETA_RECURRENCE),
        ("linear_model_match", TOL_LINEAR_MODEL),
        ("parallel_theta", TOL_PARALLEL_THETA),
    ];
    // The canonical-connection identities are statements about the
    // scale-invariant homogeneous representative; outside that domain (or
    // with the pairing already broken) they are reported as skipped.
    if !spec.is_singular() || !cr_ok {
        return Ok(SuiteResult {
            name: "ambrose_singer".into(),
            checks: names.iter().map(|(n, t)| CheckResult::skipped(n, *t)).collect(),
        });
    }
    let sc = compensated(spec);
    let r = fold_max(pts, 4, |p| {
        let c = ambrose_singer_residuals(&sc, p)?;
        let cmax = c.metric.max(c.curvature).max(c.structure).max(c.complex_structure);
        let l = lemma_identities(&sc, p)?;
        let lmax = l.gradient.max(l.wedge).max(l.wedge_j).max(l.recurrence).max(l.d_theta);
        let lc = linear_class_residuals(&sc, p)?;
        let lcmax = lc.ansatz.max(lc.theta_match);
        Ok(vec![cmax, lmax, lcmax, parallel_theta_residual(&sc, p)?])
    })?;
    Ok(SuiteResult {
        name: "ambrose_singer".into(),
        checks: names
            .iter()
            .zip(&r)
            .map(|((n, t), &v)| CheckResult::measured(n, v, *t))
            .collect(),
    })
}

fn osserman_suite(
    spec: &MetricSpec,
    pts: &[Point],
    seed: u64,
    cr_ok: bool,
) -> Result<SuiteResult, EngineError> {
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f7373_6d);
    // nilpotency of the Jacobi operator is a consequence of the paired
    // couplings, so it is only a meaningful check when the pairing holds
    let nil = if cr_ok {
        let items: Vec<(Point, Vec<f64>)> = pts
            .iter()
            .map(|p| (p.clone(), (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let nil = fold_max(&items, 1, |(p, x)| {
            let j = jacobi_operator(spec, p, x)?.to_matrix();
            let mut sq = 0.0f64;
            for a in 0..dim {
                for b in 0..dim {
                    let mut acc = 0.0;
                    for k in 0..dim {
                        acc += j[a][k] * j[k][b];
                    }
                    sq = sq.max(acc.abs());
                }
            }
            Ok(vec![sq])
        })?;
        CheckResult::measured("osserman_nilpotent", nil[0], TOL_OSSERMAN_NILPOTENT)
    } else {
        CheckResult::skipped("osserman_nilpotent", TOL_OSSERMAN_NILPOTENT)
    };

    let pin = if spec.is_singular() && cr_ok {
        let sc = compensated(spec);
        let b0 = spec.profile.b0;
        let mut e1 = vec![0.0; dim];
        e1[W1] = 1.0;
        let r = fold_max(pts, 1, |p| {
            let j = jacobi_operator(&sc, p, &e1)?.to_matrix();
            let rho2 = p.rho2();
            let expected = -b0 / (2.0 * rho2 * rho2);
            let mut res = 0.0f64;
            for a in 0..dim {
                for b in 0..dim {
                    let want = if (a, b) == (Z2, W2) { expected } else { 0.0 };
                    res = res.max((j[a][b] - want).abs());
                }
            }
            Ok(vec![res])
        })?;
        CheckResult::measured("jacobi_w1_pin", r[0], TOL_JACOBI_PIN)
    } else {
        CheckResult::skipped("jacobi_w1_pin", TOL_JACOBI_PIN)
    };

    Ok(SuiteResult { name: "osserman".into(), checks: vec![nil, pin] })
}

fn walker_suite(spec: &MetricSpec, pts: &[Point]) -> Result<SuiteResult, EngineError> {
    let r = fold_max(pts, 1, |p| Ok(vec![walker_residual(spec, p)?]))?;
    Ok(SuiteResult {
        name: "walker".into(),
        checks: vec![CheckResult::measured("walker_distribution", r[0], TOL_WALKER)],
    })
}

pub struct GeodesicArtifacts {
    pub suite: SuiteResult,
    pub trajectory: Trajectory,
}

/// Integrate the canonical inward geodesic (start at w = (1,0), velocity
/// -d/dw1) and check the behaviour the profile dictates: a wall hit at
/// t = 1 for the scale-invariant profile, completeness out to |t| = 100
/// otherwise.
pub fn geodesic_suite(spec: &MetricSpec, tol: f64) -> Result<GeodesicArtifacts, EngineError> {
    let dim = spec.dim();
    let p0 = Point::at_w(1.0, 0.0, dim);
    let mut vel = vec![0.0; dim];
    vel[W1] = -1.0;
    let init = GeodesicState { position: p0, velocity: vel.clone(), t: 0.0 };

    if spec.is_singular() {
        let traj = geodesic_integrate(spec, &init, 1.0, tol)?;
        let wall = matches!(traj.flag, TrajectoryFlag::SingularityReached(ts)
            if (ts - 1.0).abs() <= TOL_WALL_TIME);
        let frame = if spec.profile.b0 != 0.0 {
            let rows = frame_curvature_rows(spec, tol)?;
            let rel = rows
                .iter()
                .fold(0.0f64, |m, &(_, v, pred)| m.max(((v - pred) / pred).abs()));
            CheckResult::measured("frame_curvature", rel, TOL_FRAME_CURVATURE)
        } else {
            CheckResult::skipped("frame_curvature", TOL_FRAME_CURVATURE)
        };
        Ok(GeodesicArtifacts {
            suite: SuiteResult {
                name: "geodesic".into(),
                checks: vec![
                    CheckResult::flag("singular_wall", wall),
                    frame,
                    CheckResult::skipped("completeness", 0.5),
                ],
            },
            trajectory: traj,
        })
    } else {
        let fwd = geodesic_integrate(spec, &init, 100.0, tol)?;
        let mut rvel = vel;
        rvel[W1] = 1.0;
        let rinit = GeodesicState {
            position: Point::at_w(1.0, 0.0, dim),
            velocity: rvel,
            t: 0.0,
        };
        // reversing the initial velocity traces the t -> -t branch
        let bwd = geodesic_integrate(spec, &rinit, 100.0, tol)?;
        let complete = |t: &Trajectory| {
            t.flag == TrajectoryFlag::Completed && (t.t_final() - 100.0).abs() < 1e-9
        };
        let ok = complete(&fwd) && complete(&bwd);
        Ok(GeodesicArtifacts {
            suite: SuiteResult {
                name: "geodesic".into(),
                checks: vec![
                    CheckResult::skipped("singular_wall", 0.5),
                    CheckResult::skipped("frame_curvature", TOL_FRAME_CURVATURE),
                    CheckResult::flag("completeness", ok),
                ],
            },
            trajectory: fwd,
        })
    }
}

/// (t, measured, predicted) rows of the parallel-frame curvature component
/// along the canonical inward geodesic, against the closed-form blow-up
/// b0 / (2 b(0)^2 (1-t)^4). Empty outside the scale-invariant profile.
pub fn frame_curvature_rows(spec: &MetricSpec, tol: f64) -> Result<Vec<(f64, f64, f64)>, EngineError> {
    if !spec.is_singular() || spec.profile.b0 == 0.0 {
        return Ok(Vec::new());
    }
    // the curvature law quantifies the distinguished inward geodesic of the
    // untwisted representative; couplings only re-coordinate that metric and
    // would bend this particular start condition, so strip them first
    let mut rep = spec.clone();
    for c in &mut rep.couplings {
        c.r_coeffs.clear();
        c.s_coeffs.clear();
    }
    let spec = &rep;
    let ts: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
    let vals = parallel_frame_curvature(spec, &ts, tol)?;
    let p0 = Point::at_w(1.0, 0.0, spec.dim());
    let b0 = spec.profile.b0;
    let beff0 = coeff_jets(spec, &p0)?.b_eff().value();
    Ok(vals
        .into_iter()
        .map(|(t, v)| {
            let u = 1.0 - t;
            (t, v, b0 / (2.0 * beff0 * beff0 * u * u * u * u))
        })
        .collect())
}

/// Holonomy normal form and generator identities at the base point w = (1,0).
pub fn holonomy_suite(
    spec: &MetricSpec,
) -> Result<(SuiteResult, HolonomyReport, Option<Su11Report>), EngineError> {
    let dim = spec.dim();
    let p0 = Point::at_w(1.0, 0.0, dim);
    let expected = if Geometry::new(spec, &p0)?.riemann().max_abs() > 1e-12 { 1 } else { 0 };
    let rep = holonomy_report(spec, &p0, 2)?;
    let ident = rep.checks.skew.max(rep.checks.commutes_j).max(rep.checks.nilpotent);
    let (su_check, su) = match su11_normal_form(spec, &p0) {
        Ok(s) => {
            let res = s.frame_residual.max(s.trace_abs).max(s.square_max).max(s.membership);
            (CheckResult::measured("su11_normal_form", res, TOL_SU11), Some(s))
        }
        // g(dw,dw) = 0 at the base point: no unitary frame, nothing to normalize
        Err(EngineError::DegenerateBasis) => {
            (CheckResult::skipped("su11_normal_form", TOL_SU11), None)
        }
        Err(e) => return Err(e),
    };
    let suite = SuiteResult {
        name: "holonomy".into(),
        checks: vec![
            CheckResult::flag("holonomy_dimension", rep.dim_m0 == expected && rep.stabilized),
            CheckResult::measured("holonomy_identities", ident, TOL_HOLONOMY_IDENTITIES),
            su_check,
        ],
    };
    Ok((suite, rep, su))
}

pub struct LieAlgArtifacts {
    pub suite: SuiteResult,
    pub algebra_json: String,
    pub k_fit: KGeodesicReport,
    pub k_blowup: KGeodesicReport,
}

/// Structure checks for the homogeneous model algebra, plus the fixed
/// k-geodesic demonstration (closed-form fit on one branch, finite-time
/// escape on the other).
pub fn liealg_suite(n: usize, b_p: f64, b0: f64, flip: bool) -> LieAlgArtifacts {
    let mut alg = build_algebra(n, b_p, b0);
    if flip {
        alg.flip_bracket_sign();
    }
    let jac = jacobi_check(&alg);
    let jacf = jac.to_f64().map(f64::abs).unwrap_or(f64::INFINITY);
    let jac_ok = jacf == 0.0;
    let mut checks = vec![CheckResult::measured("jacobi_identity", jacf, 0.0)];
    if jac_ok {
        let st = structure_diagnostics(&alg);
        let derived = if n == 0 { 2 } else { 3 };
        checks.push(CheckResult::flag(
            "solvable_structure",
            st.solvable && st.derived_length == derived,
        ));
        checks.push(CheckResult::flag(
            "nilradical_structure",
            st.nilradical_is_ideal
                && st.nilradical_two_step
                && st.nilradical_maximality_probes.0 == st.nilradical_maximality_probes.1,
        ));
        checks.push(CheckResult::flag("heisenberg_relations", st.heisenberg_ok));
        let rep = matrix_rep_check(&alg);
        checks.push(CheckResult::measured(
            "matrix_rep_linearity",
            rep.linearity_residual,
            TOL_REP_LINEARITY,
        ));
        checks.push(CheckResult::flag(
            "matrix_rep_pairs",
            rep.isotropy_single_entry && rep.n_match >= 2 && rep.n_mismatch >= 1,
        ));
    } else {
        // structure diagnostics presuppose a Lie algebra
        for name in [
            "solvable_structure",
            "nilradical_structure",
            "heisenberg_relations",
            "matrix_rep_linearity",
            "matrix_rep_pairs",
        ] {
            checks.push(CheckResult::skipped(name, 0.5));
        }
    }
    let k_fit = k_geodesic(0.75, (0.7, 0.2), 1.0, 1e-9);
    checks.push(CheckResult::measured(
        "k_geodesic_fit",
        k_fit.x_rel_err.max(k_fit.y_rel_err),
        TOL_K_GEODESIC,
    ));
    let k_blowup = k_geodesic(0.75, (-0.7, 0.2), 3.0, 1e-9);
    let blow_ok = matches!(k_blowup.flag, KFlag::BlowUp(t) if (t - k_blowup.c).abs() <= 1e-2);
    checks.push(CheckResult::flag("k_geodesic_blowup", blow_ok));
    LieAlgArtifacts {
        suite: SuiteResult { name: "liealg".into(), checks },
        algebra_json: export_structure_constants(&alg),
        k_fit,
        k_blowup,
    }
}

fn sample_wave_points(spec: &PlaneWaveSpec, u0: f64, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.dim();
    (0..samples)
        .map(|_| {
            let mut c = vec![0.0; dim];
            c[0] = if spec.is_scale_invariant() {
                u0 * rng.gen_range(0.6..1.6)
            } else {
                u0 + rng.gen_range(-2.0..2.0)
            };
            for slot in c.iter_mut().skip(1) {
                *slot = rng.gen_range(-2.0..2.0);
            }
            c
        })
        .collect()
}

/// Isometry, Wronskian/bracket, curvature-vs-profile and structure checks
/// for a Lorentzian wave configuration around base parameter `u0`.
pub fn wave_suite(
    spec: &PlaneWaveSpec,
    u0: f64,
    samples: usize,
    seed: u64,
) -> Result<SuiteResult, WaveError> {
    let pts = sample_wave_points(spec, u0, samples, seed);
    let range = if spec.is_scale_invariant() {
        let (a, b) = (0.5 * u0, 2.0 * u0);
        (a.min(b), a.max(b))
    } else {
        (u0 - 2.5, u0 + 2.5)
    };
    let fields = oscillator_killing_fields(spec, u0, range)?;
    let mut kill = 0.0f64;
    for f in &fields {
        kill = kill.max(killing_residual(spec, f, &pts)?);
    }

    let h = heisenberg_table(spec, u0)?;
    let mut heis = h.wronskian_drift.max(h.pp_max).max(h.qq_max).max(h.central_max);
    for a in 0..spec.n {
        for b in 0..spec.n {
            let want = if a == b { spec.epsilons[a] } else { 0.0 };
            heis = heis.max((h.wronskian0[a][b] - want).abs());
        }
    }

    let r = fold_max(&pts, 2, |pt| {
        let rep = wave_curvature_and_symmetry(spec, pt)?;
        let vsi = rep
            .off_pattern_max
            .max(rep.kretschmann.abs())
            .max(rep.ricci_square.abs())
            .max(rep.ricci_trace_residual)
            .max(rep.ricci_off_max);
        Ok(vec![rep.profile_residual, vsi])
    })?;

    let ssi = if spec.is_scale_invariant() {
        let s = ssi_structure_check(spec, &pts)?;
        let res = s
            .xi_norm_max
            .max(s.metric_residual)
            .max(s.curvature_residual)
            .max(s.structure_residual);
        CheckResult::measured("wave_ssi_structure", res, TOL_WAVE_SSI)
    } else {
        CheckResult::skipped("wave_ssi_structure", TOL_WAVE_SSI)
    };

    Ok(SuiteResult {
        name: "wave".into(),
        checks: vec![
            CheckResult::measured("wave_killing", kill, TOL_WAVE_KILLING),
            CheckResult::measured("wave_heisenberg", heis, TOL_WAVE_HEISENBERG),
            CheckResult::measured("wave_curvature_profile", r[0], TOL_WAVE_CURVATURE),
            CheckResult::measured("wave_vsi", r[1], TOL_WAVE_VSI),
            ssi,
        ],
    })
}

/// Wedge-system kernel dimensions and the flatness verdict for the
/// quaternionic model of signature (4p, 4q), with the exactly-one-kernel
/// partial-constraint control at dimension 8.
pub fn quaternion_suite(p: usize, q: usize) -> Result<(SuiteResult, FlatnessReport), QkError> {
    let dim = 4 * (p + q);
    let mut xi = vec![0.0; dim];
    xi[0] = 1.0;
    if p >= 1 && q >= 1 {
        xi[4 * p] = 1.0; // one positive plus one negative slot: isotropic
    }
    let rep = flatness_report(p, q, &xi)?;
    let theta_only = if dim == 8 {
        CheckResult::flag("wedge_kernel_theta_only", rep.kernel_dims.theta_only == 7)
    } else {
        CheckResult::skipped("wedge_kernel_theta_only", 0.5)
    };
    let control = if dim == 8 {
        let ctrl = flatness_report_with_constraints(p, q, &xi, 1)?;
        CheckResult::flag(
            "partial_constraints_control",
            ctrl.kernel_dims.full == 1 && !ctrl.forces_flat,
        )
    } else {
        CheckResult::skipped("partial_constraints_control", 0.5)
    };
    let suite = SuiteResult {
        name: "quaternion".into(),
        checks: vec![
            CheckResult::flag("wedge_kernel_full", rep.kernel_dims.full == 0),
            theta_only,
            CheckResult::flag(
                "flatness_forced",
                rep.nu_forced_zero && rep.forces_flat && rep.hyper_kahler_forces_flat,
            ),
            control,
        ],
    };
    Ok((suite, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Coupling, ProfileKind};
    use crate::report::CheckStatus;
    use crate::waves::WaveProfile;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec_with(
        variant: ProfileVariant,
        n: usize,
        b0: f64,
        eps: &[f64],
        coups: Vec<Vec<Complex64>>,
        gauge: Gauge,
    ) -> MetricSpec {
        MetricSpec {
            n,
            epsilons: eps.to_vec(),
            profile: ProfileKind { variant, b0, harmonic_extra: vec![] },
            couplings: coups.into_iter().map(Coupling::holomorphic).collect(),
            gauge,
        }
    }

    fn statuses(suites: &[SuiteResult]) -> Vec<(&str, CheckStatus)> {
        suites
            .iter()
            .flat_map(|s| s.checks.iter().map(|ch| (ch.name.as_str(), ch.status)))
            .collect()
    }

    #[test]
    fn standard_specs_pass_every_suite() {
        let singular0 = spec_with(ProfileVariant::SingularScaleInvariant, 0, 4.0, &[], vec![], Gauge::Literal);
        let coupled = spec_with(
            ProfileVariant::SingularScaleInvariant,
            1,
            1.0,
            &[1.0],
            vec![vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]],
            Gauge::Compensated,
        );
        let coupled_literal = spec_with(
            ProfileVariant::SingularScaleInvariant,
            1,
            -2.0,
            &[-1.0],
            vec![vec![c(0.5, -0.25), c(0.0, 1.0)]],
            Gauge::Literal,
        );
        let cw = spec_with(
            ProfileVariant::CahenWallachAnalog,
            1,
            -2.0,
            &[1.0],
            vec![vec![c(0.0, 0.0), c(1.0, 0.0)]],
            Gauge::Compensated,
        );
        for (spec, label) in [
            (&singular0, "singular0"),
            (&coupled, "coupled"),
            (&coupled_literal, "coupled_literal"),
            (&cw, "cw"),
        ] {
            let suites = run_verify(spec, None, 6, 11).unwrap();
            assert_eq!(suites.len(), 6);
            for s in &suites {
                assert!(s.pass(), "{label}/{}: {:?}", s.name, s.checks);
            }
            let st = statuses(&suites);
            let get = |name: &str| st.iter().find(|(n, _)| *n == name).unwrap().1;
            if spec.is_singular() {
                assert_eq!(get("canonical_connection"), CheckStatus::Pass, "{label}");
                assert_eq!(get("parallel_curvature"), CheckStatus::Skipped, "{label}");
                assert_eq!(get("jacobi_w1_pin"), CheckStatus::Pass, "{label}");
            } else {
                assert_eq!(get("canonical_connection"), CheckStatus::Skipped, "{label}");
                assert_eq!(get("parallel_curvature"), CheckStatus::Pass, "{label}");
            }
            assert_eq!(get("j_squared"), CheckStatus::Pass);
        }
    }

    #[test]
    fn broken_pairing_fails_exactly_one_check() {
        // quadratic coupling: with the pairing broken this also destroys
        // Jacobi nilpotency, so the gate below is load-bearing
        let mut mutant = spec_with(
            ProfileVariant::SingularScaleInvariant,
            1,
            4.0,
            &[1.0],
            vec![vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]],
            Gauge::Compensated,
        );
        mutant.couplings[0].break_cauchy_riemann();
        let suites = run_verify(&mutant, None, 6, 23).unwrap();
        let failing: Vec<&str> = suites
            .iter()
            .flat_map(|s| s.checks.iter().filter(|ch| ch.failed()).map(|ch| ch.name.as_str()))
            .collect();
        assert_eq!(failing, vec!["cauchy_riemann"]);
        let st = statuses(&suites);
        for gated in [
            "curvature_formula",
            "kahler_closed",
            "parallel_j",
            "canonical_connection",
            "theta_recurrence",
            "linear_model_match",
            "parallel_theta",
            "jacobi_w1_pin",
            "osserman_nilpotent",
        ] {
            let got = st.iter().find(|(n, _)| *n == gated).unwrap().1;
            assert_eq!(got, CheckStatus::Skipped, "{gated}");
        }
        // the pairing residual itself: |i*1 - replaced-by-1| = |1 - i|
        let cr = suites
            .iter()
            .flat_map(|s| s.checks.iter())
            .find(|ch| ch.name == "cauchy_riemann")
            .unwrap();
        assert!((cr.max_residual - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn suite_filter_and_unknown_names() {
        let spec = spec_with(ProfileVariant::SingularScaleInvariant, 0, 4.0, &[], vec![], Gauge::Literal);
        let one = run_verify(&spec, Some("walker"), 4, 5).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].name, "walker");
        assert!(run_verify(&spec, Some("nonsense"), 4, 5).unwrap().is_empty());
    }

    #[test]
    fn geodesic_wall_frame_prediction_and_completeness() {
        let spec = spec_with(ProfileVariant::SingularScaleInvariant, 0, 4.0, &[], vec![], Gauge::Literal);
        let art = geodesic_suite(&spec, 1e-9).unwrap();
        assert!(art.suite.pass(), "{:?}", art.suite.checks);
        assert!(matches!(art.trajectory.flag, TrajectoryFlag::SingularityReached(_)));
        assert_eq!(art.suite.check("completeness").unwrap().status, CheckStatus::Skipped);

        let rows = frame_curvature_rows(&spec, 1e-9).unwrap();
        // b0 = 4, b(0) = 1: predicted curvature 2 (1-t)^-4, so 32 at t = 1/2
        let (t, v, pred) = rows[5];
        assert_eq!(t, 0.5);
        assert!((pred - 32.0).abs() < 1e-12);
        assert!((v - 32.0).abs() < 32.0 * 2e-6, "frame value {v}");

        let cw = spec_with(ProfileVariant::CahenWallachAnalog, 0, 1.0, &[], vec![], Gauge::Literal);
        let art = geodesic_suite(&cw, 1e-9).unwrap();
        assert!(art.suite.pass(), "{:?}", art.suite.checks);
        assert_eq!(art.suite.check("completeness").unwrap().status, CheckStatus::Pass);
        assert_eq!(art.suite.check("singular_wall").unwrap().status, CheckStatus::Skipped);
        assert!(frame_curvature_rows(&cw, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn holonomy_suite_dimension_and_normal_form() {
        let spec = spec_with(
            ProfileVariant::SingularScaleInvariant,
            1,
            1.0,
            &[1.0],
            vec![vec![c(0.0, 0.0), c(1.0, 0.0)]],
            Gauge::Compensated,
        );
        let (suite, rep, su) = holonomy_suite(&spec).unwrap();
        assert!(suite.pass(), "{:?}", suite.checks);
        assert_eq!(rep.dim_m0, 1);
        assert!(su.is_some());

        let flat = spec_with(ProfileVariant::Flat, 0, 0.0, &[], vec![], Gauge::Literal);
        let (suite, rep, su) = holonomy_suite(&flat).unwrap();
        assert_eq!(rep.dim_m0, 0);
        assert!(su.is_none());
        assert_eq!(suite.check("su11_normal_form").unwrap().status, CheckStatus::Skipped);
        assert!(suite.pass());
    }

    #[test]
    fn liealg_suite_passes_and_flip_breaks_only_jacobi() {
        for n in [0usize, 1, 2] {
            let art = liealg_suite(n, 0.75, 4.0, false);
            assert!(art.suite.pass(), "n = {n}: {:?}", art.suite.checks);
            assert_eq!(art.suite.checks.len(), 8);
            let entries: serde_json::Value = serde_json::from_str(&art.algebra_json).unwrap();
            assert!(!entries.as_array().unwrap().is_empty());
        }
        let art = liealg_suite(1, 0.75, 4.0, true);
        let failing: Vec<&str> =
            art.suite.checks.iter().filter(|c| c.failed()).map(|c| c.name.as_str()).collect();
        assert_eq!(failing, vec!["jacobi_identity"]);
        for name in ["solvable_structure", "nilradical_structure", "heisenberg_relations"] {
            assert_eq!(art.suite.check(name).unwrap().status, CheckStatus::Skipped);
        }
        assert_eq!(art.suite.check("k_geodesic_fit").unwrap().status, CheckStatus::Pass);
        assert!(matches!(art.k_blowup.flag, KFlag::BlowUp(_)));
    }

    #[test]
    fn wave_suite_constant_and_scale_invariant() {
        let cwave = PlaneWaveSpec::new(
            WaveProfile::Constant(vec![vec![-1.0, 0.5], vec![0.5, 2.0]]),
            None,
        )
        .unwrap();
        let suite = wave_suite(&cwave, 1.0, 6, 3).unwrap();
        assert!(suite.pass(), "{:?}", suite.checks);
        assert_eq!(suite.check("wave_ssi_structure").unwrap().status, CheckStatus::Skipped);

        let ssi = PlaneWaveSpec::new(WaveProfile::ScaleInvariant(vec![vec![1.0]]), None).unwrap();
        let suite = wave_suite(&ssi, 1.0, 6, 3).unwrap();
        assert!(suite.pass(), "{:?}", suite.checks);
        assert_eq!(suite.check("wave_ssi_structure").unwrap().status, CheckStatus::Pass);
    }

    #[test]
    fn quaternion_suite_dim8_pins_and_dim12_skips() {
        let (suite, rep) = quaternion_suite(1, 1).unwrap();
        assert!(suite.pass(), "{:?}", suite.checks);
        assert_eq!(rep.kernel_dims.theta_only, 7);
        assert_eq!(suite.check("wedge_kernel_theta_only").unwrap().status, CheckStatus::Pass);

        let (suite, rep) = quaternion_suite(2, 1).unwrap();
        assert!(suite.pass(), "{:?}", suite.checks);
        assert_eq!(rep.kernel_dims.full, 0);
        assert_eq!(suite.check("wedge_kernel_theta_only").unwrap().status, CheckStatus::Skipped);
        assert_eq!(
            suite.check("partial_constraints_control").unwrap().status,
            CheckStatus::Skipped
        );
    }

    #[test]
    fn reports_are_stable_across_thread_counts() {
        // PWLAB_THREADS only changes chunking; the folded maxima are
        // identical, so serialized documents match bytewise.
        let spec = spec_with(
            ProfileVariant::SingularScaleInvariant,
            2,
            1.0,
            &[1.0, -1.0],
            vec![vec![c(0.0, 0.0), c(0.3, 0.1)], vec![c(0.1, 0.0)]],
            Gauge::Compensated,
        );
        let run = || {
            let suites = run_verify(&spec, None, 8, 41).unwrap();
            serde_json::to_string(&suites).unwrap()
        };
        let base = run();
        std::env::set_var("PWLAB_THREADS", "3");
        let threaded = run();
        std::env::remove_var("PWLAB_THREADS");
        assert_eq!(base, threaded);
        assert_eq!(base, run());
    }
}
