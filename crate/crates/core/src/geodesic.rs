//! Geodesic integration, parallel transport, and the curvature profile seen
//! by a parallel frame carried into the singular set.

use crate::config::MetricSpec;
use crate::geometry::{Geometry, JetCore};
use crate::metric::{EngineError, Point, W1, W2};
use crate::ode::{self, OdeStatus, Options, Solution};

/// Distance-to-singularity guard: integration halts (with a flag) when
/// rho = |w| drops below this, rather than feeding the blowup to the stepper.
pub const RHO_MIN: f64 = 1e-6;

/// Per-step tolerance handed to the stepper. The advertised bound is a
/// *global* drift ≤ 10·tol, and local error accumulates over the run (worst
/// along the stiffening tail near the singular set), so the stepper runs
/// tighter than the requested tol by a fixed safety margin.
pub(crate) fn solver_tol(tol: f64) -> f64 {
    (tol * 0.02).max(1e-13)
}

#[derive(Clone, Debug)]
pub struct GeodesicState {
    pub position: Point,
    pub velocity: Vec<f64>,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrajectoryFlag {
    Completed,
    /// hit the singular set {w1 = w2 = 0} (time where rho crossed RHO_MIN)
    SingularityReached(f64),
    /// integrator could not hold the tolerance past the contained time
    StepUnderflow(f64),
}

#[derive(Debug)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    /// |g(v,v)(t) - g(v,v)(t0)| at each state
    pub norm_drift: Vec<f64>,
    pub flag: TrajectoryFlag,
    pub dim: usize,
    solution: Solution,
    t0: f64,
}

impl Trajectory {
    pub fn sample(&self, t: f64) -> GeodesicState {
        let y = if t <= self.t0 {
            self.solution.steps.first().map(|s| s.eval(self.t0)).unwrap_or_else(|| {
                let mut v = self.states[0].position.0.clone();
                v.extend_from_slice(&self.states[0].velocity);
                v
            })
        } else {
            self.solution.sample(t.min(self.solution.t_final))
        };
        let (pos, vel) = y.split_at(self.dim);
        GeodesicState {
            position: Point(pos.to_vec()),
            velocity: vel.to_vec(),
            t: t.min(self.solution.t_final),
        }
    }

    pub fn t_final(&self) -> f64 {
        self.solution.t_final
    }

    /// CSV export: `t,w1,w2,z1,z2,x1,y1,...,norm_drift,flag`, one row per
    /// accepted step. flag: 0 = ok, 1 = singularity halt, 2 = step underflow.
    pub fn to_csv(&self) -> String {
        let n = (self.dim - 4) / 2;
        let mut header = String::from("t,w1,w2,z1,z2");
        for a in 1..=n {
            header.push_str(&format!(",x{a},y{a}"));
        }
        header.push_str(",norm_drift,flag");
        let mut out = header;
        out.push('\n');
        for (i, st) in self.states.iter().enumerate() {
            let last = i + 1 == self.states.len();
            let flag = match self.flag {
                TrajectoryFlag::SingularityReached(_) if last => 1,
                TrajectoryFlag::StepUnderflow(_) if last => 2,
                _ => 0,
            };
            let mut row = format!("{}", st.t);
            for c in &st.position.0 {
                row.push_str(&format!(",{c}"));
            }
            row.push_str(&format!(",{},{flag}", self.norm_drift[i]));
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

fn velocity_norm(spec: &MetricSpec, pos: &Point, vel: &[f64]) -> Result<f64, EngineError> {
    let core = JetCore::new(spec, pos)?;
    let g = core.metric_values();
    let mut s = 0.0;
    for (i, gi) in g.iter().enumerate() {
        for (j, &gij) in gi.iter().enumerate() {
            s += gij * vel[i] * vel[j];
        }
    }
    Ok(s)
}

/// Integrate the geodesic equation to t_end with per-step tolerance tol.
pub fn geodesic_integrate(
    spec: &MetricSpec,
    init: &GeodesicState,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory, EngineError> {
    let dim = spec.dim();
    let norm0 = velocity_norm(spec, &init.position, &init.velocity)?;
    let mut y0 = init.position.0.clone();
    y0.extend_from_slice(&init.velocity);

    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (pos, vel) = y.split_at(dim);
        dy[..dim].copy_from_slice(vel);
        // past the guard the event has already fired; clamp to keep jets finite
        let acc = match JetCore::new(spec, &Point(pos.to_vec())) {
            Ok(core) => core.geodesic_acceleration(vel),
            Err(_) => vec![0.0; dim],
        };
        dy[dim..].copy_from_slice(&acc);
    };
    let event = if spec.is_singular() {
        Some(move |_t: f64, y: &[f64]| y[W1] * y[W1] + y[W2] * y[W2] - RHO_MIN * RHO_MIN)
    } else {
        None
    };

    let st = solver_tol(tol);
    let opts = Options { rtol: st, atol: st, ..Default::default() };
    let sol = ode::solve(rhs, init.t, &y0, t_end, &opts, event);

    let flag = match sol.status {
        OdeStatus::ReachedEnd => TrajectoryFlag::Completed,
        OdeStatus::Event(t) => TrajectoryFlag::SingularityReached(t),
        OdeStatus::StepUnderflow(t) => TrajectoryFlag::StepUnderflow(t),
    };

    let mut states = vec![GeodesicState {
        position: init.position.clone(),
        velocity: init.velocity.to_vec(),
        t: init.t,
    }];
    for step in &sol.steps {
        let y = step.eval(step.t1());
        let (pos, vel) = y.split_at(dim);
        states.push(GeodesicState {
            position: Point(pos.to_vec()),
            velocity: vel.to_vec(),
            t: step.t1(),
        });
    }
    if let OdeStatus::Event(t) = sol.status {
        let y = &sol.y_final;
        let (pos, vel) = y.split_at(dim);
        states.push(GeodesicState { position: Point(pos.to_vec()), velocity: vel.to_vec(), t });
    }
    let mut norm_drift = Vec::with_capacity(states.len());
    for st in &states {
        let n = velocity_norm(spec, &st.position, &st.velocity).unwrap_or(f64::NAN);
        norm_drift.push((n - norm0).abs());
    }
    Ok(Trajectory { states, norm_drift, flag, dim, solution: sol, t0: init.t })
}

/// A family of tangent vectors parallel-transported along a geodesic.
#[derive(Debug)]
pub struct FrameField {
    pub ts: Vec<f64>,
    pub positions: Vec<Point>,
    /// frames[k][i] = i-th vector at time ts[k]
    pub frames: Vec<Vec<Vec<f64>>>,
    pub gram0: Vec<Vec<f64>>,
}

impl FrameField {
    /// max |Gram(t) - Gram(0)| over the sampled times
    pub fn gram_drift(&self, spec: &MetricSpec) -> f64 {
        let mut worst = 0.0f64;
        for (k, pos) in self.positions.iter().enumerate() {
            let g = match JetCore::new(spec, pos) {
                Ok(core) => core.metric_values(),
                Err(_) => continue,
            };
            for (i, ei) in self.frames[k].iter().enumerate() {
                for (j, ej) in self.frames[k].iter().enumerate() {
                    let mut v = 0.0;
                    for a in 0..ei.len() {
                        for b in 0..ej.len() {
                            v += g[a][b] * ei[a] * ej[b];
                        }
                    }
                    worst = worst.max((v - self.gram0[i][j]).abs());
                }
            }
        }
        worst
    }
}

/// Parallel-transport the given vectors along the trajectory's geodesic,
/// sampling at `ts`. The transport equations are integrated jointly with the
/// geodesic (same initial data as `traj`) so frame and base point share one
/// error budget instead of stacking interpolation error.
pub fn parallel_transport(
    spec: &MetricSpec,
    traj: &Trajectory,
    frame0: &[Vec<f64>],
    ts: &[f64],
    tol: f64,
) -> Result<FrameField, EngineError> {
    let dim = spec.dim();
    let k = frame0.len();
    let init = &traj.states[0];
    let mut y0 = Vec::with_capacity((k + 2) * dim);
    y0.extend_from_slice(&init.position.0);
    y0.extend_from_slice(&init.velocity);
    for e in frame0 {
        y0.extend_from_slice(e);
    }
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (pos, rest) = y.split_at(dim);
        let vel = &rest[..dim];
        dy[..dim].copy_from_slice(vel);
        match JetCore::new(spec, &Point(pos.to_vec())) {
            Ok(core) => {
                dy[dim..2 * dim].copy_from_slice(&core.geodesic_acceleration(vel));
                for i in 0..k {
                    let e = &y[(i + 2) * dim..(i + 3) * dim];
                    let de = core.transport_derivative(vel, e);
                    dy[(i + 2) * dim..(i + 3) * dim].copy_from_slice(&de);
                }
            }
            Err(_) => dy.fill(0.0),
        }
    };
    let t_last = ts.iter().fold(traj.t0, |m, &t| m.max(t));
    let st = solver_tol(tol);
    let opts = Options { rtol: st, atol: st, ..Default::default() };
    let sol = ode::solve(
        rhs,
        traj.t0,
        &y0,
        t_last.max(traj.t0 + 1e-12),
        &opts,
        None::<fn(f64, &[f64]) -> f64>,
    );

    let g0 = JetCore::new(spec, &init.position)?.metric_values();
    let mut gram0 = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut v = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    v += g0[a][b] * frame0[i][a] * frame0[j][b];
                }
            }
            gram0[i][j] = v;
        }
    }
    let mut frames = Vec::with_capacity(ts.len());
    let mut positions = Vec::with_capacity(ts.len());
    for &t in ts {
        let y = if t <= traj.t0 { y0.clone() } else { sol.sample(t) };
        positions.push(Point(y[..dim].to_vec()));
        frames.push((0..k).map(|i| y[(i + 2) * dim..(i + 3) * dim].to_vec()).collect());
    }
    Ok(FrameField { ts: ts.to_vec(), positions, frames, gram0 })
}

/// The curvature component R(E1, E2, E1, E2) along the distinguished
/// singularity-bound geodesic from (1, 0), unit-normalized frame at t = 0.
/// For the scale-invariant profile this grows like b0/(2 b(0)^2) (1-t)^{-4}.
pub fn parallel_frame_curvature(
    spec: &MetricSpec,
    ts: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>, EngineError> {
    let dim = spec.dim();
    let p0 = Point::at_w(1.0, 0.0, dim);
    let b0v = crate::metric::coeff_jets(spec, &p0)?.gww.value();
    let scale = 1.0 / b0v.abs().sqrt();
    let mut vel = vec![0.0; dim];
    vel[W1] = -1.0;
    let init = GeodesicState { position: p0, velocity: vel, t: 0.0 };
    let t_last = ts.iter().fold(0.0f64, |m, &t| m.max(t));
    let traj = geodesic_integrate(spec, &init, (t_last + 0.05).min(0.999), tol)?;

    let mut e1 = vec![0.0; dim];
    e1[W1] = scale;
    let mut e2 = vec![0.0; dim];
    e2[W2] = scale;
    let frame = parallel_transport(spec, &traj, &[e1, e2], ts, tol)?;

    let mut out = Vec::with_capacity(ts.len());
    for (k, &t) in ts.iter().enumerate() {
        let geo = Geometry::new(spec, &frame.positions[k])?;
        let r4 = geo.riemann();
        let (f1, f2) = (&frame.frames[k][0], &frame.frames[k][1]);
        let mut val = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let r = r4.get(&[a, b, c, d]);
                        if r != 0.0 {
                            val += r * f1[a] * f2[b] * f1[c] * f2[d];
                        }
                    }
                }
            }
        }
        out.push((t, val));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::metric::{Z1, Z2};

    fn singular(n: usize, couplings: &[&str]) -> MetricSpec {
        let eps = vec!["+1"; n].join(",");
        let mut cfg = format!(
            "n = {n}\nepsilons = {eps}\nprofile.kind = singular_scale_invariant\nprofile.b0 = 4\n"
        );
        for (i, c) in couplings.iter().enumerate() {
            cfg.push_str(&format!("coupling.{} = {}\n", i + 1, c));
        }
        parse_config(&cfg).unwrap()
    }

    #[test]
    fn w_components_stay_affine_and_singularity_flagged() {
        let spec = singular(0, &[]);
        let mut vel = vec![0.0; 4];
        vel[W1] = -1.0;
        let init = GeodesicState { position: Point::at_w(1.0, 0.0, 4), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 2.0, 1e-8).unwrap();
        match traj.flag {
            TrajectoryFlag::SingularityReached(t) => {
                assert!((t - (1.0 - RHO_MIN)).abs() < 1e-4, "t* = {t}")
            }
            f => panic!("expected singularity flag, got {f:?}"),
        }
        for st in &traj.states {
            assert!((st.position.w1() - (1.0 - st.t)).abs() < 1e-8);
            assert!(st.position.w2().abs() < 1e-12);
        }
    }

    #[test]
    fn second_family_hits_singularity() {
        let spec = singular(0, &[]);
        let mut vel = vec![0.0; 4];
        vel[W2] = -1.0;
        let init = GeodesicState { position: Point::at_w(0.0, 1.0, 4), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 2.0, 1e-8).unwrap();
        assert!(matches!(traj.flag, TrajectoryFlag::SingularityReached(t) if (t - 1.0).abs() < 1e-3));
    }

    #[test]
    fn zero_w_velocity_runs_affine_to_end() {
        let spec = singular(1, &["(0,0) (1,0)"]);
        let mut vel = vec![0.0; 6];
        vel[Z1] = 0.7;
        vel[crate::metric::xa(0)] = -0.3;
        let init = GeodesicState { position: Point::at_w(1.0, 0.5, 6), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 3.0, 1e-10).unwrap();
        assert_eq!(traj.flag, TrajectoryFlag::Completed);
        let last = traj.states.last().unwrap();
        // affine in every coordinate: x(t) = x0 + t v
        assert!((last.position.0[Z1] - 3.0 * 0.7).abs() < 1e-9);
        assert!((last.position.0[crate::metric::xa(0)] - -0.9).abs() < 1e-9);
        assert!((last.position.w1() - 1.0).abs() < 1e-12);
        for d in &traj.norm_drift {
            assert!(*d <= 1e-9);
        }
    }

    #[test]
    fn norm_conservation_away_from_singularity() {
        let tol = 1e-9;
        let spec = singular(1, &["(0,0) (0.5,1)"]);
        let mut vel = vec![0.0; 6];
        vel[W1] = -1.0;
        vel[W2] = 0.3;
        vel[Z2] = 0.2;
        vel[crate::metric::ya(0)] = 0.4;
        let init = GeodesicState { position: Point::at_w(1.0, -0.2, 6), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 0.9, tol).unwrap();
        assert_eq!(traj.flag, TrajectoryFlag::Completed);
        for d in &traj.norm_drift {
            assert!(*d <= 10.0 * tol, "drift {d}");
        }
    }

    #[test]
    fn transport_preserves_structure() {
        let tol = 1e-9;
        let spec = singular(0, &[]);
        let mut vel = vec![0.0; 4];
        vel[W1] = -1.0;
        let init = GeodesicState { position: Point::at_w(1.0, 0.0, 4), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 0.92, tol).unwrap();
        let ts: Vec<f64> = (0..=9).map(|k| 0.1 * k as f64).collect();
        // transport dw1 (w-components must stay constant), dz1 (fixed by the
        // connection), and a mixed vector (Gram constancy)
        let mut e_w = vec![0.0; 4];
        e_w[W1] = 1.0;
        let mut e_z = vec![0.0; 4];
        e_z[Z1] = 1.0;
        let e_mix = vec![0.25, -0.5, 1.0, 0.75];
        let ff = parallel_transport(&spec, &traj, &[e_w, e_z, e_mix], &ts, tol).unwrap();
        for fr in &ff.frames {
            // W components of any parallel vector are constant
            assert!((fr[0][W1] - 1.0).abs() < 1e-8);
            assert!(fr[0][W2].abs() < 1e-8);
            assert!((fr[2][W1] - 0.25).abs() < 1e-8);
            assert!((fr[2][W2] - -0.5).abs() < 1e-8);
            // dz1 is parallel along any curve
            for (i, &v) in fr[1].iter().enumerate() {
                let want = if i == Z1 { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8);
            }
        }
        let drift = ff.gram_drift(&spec);
        assert!(drift <= 10.0 * tol, "gram drift {drift}");
    }

    #[test]
    fn frame_curvature_matches_blowup_law() {
        // b0 = 4, b(0) = 1: R(E1,E2,E1,E2) = 2 (1-t)^{-4}: 2, 32, 2e4
        let spec = singular(0, &[]);
        let ts: Vec<f64> = (0..=18).map(|k| 0.05 * k as f64).collect();
        let samples = parallel_frame_curvature(&spec, &ts, 1e-10).unwrap();
        for &(t, v) in &samples {
            let want = 2.0 / (1.0 - t).powi(4);
            assert!(
                (v - want).abs() <= 1e-6 * want.abs(),
                "t = {t}: {v} vs {want}"
            );
        }
        assert!((samples[0].1 - 2.0).abs() < 1e-9);
        let mid = samples.iter().find(|(t, _)| (t - 0.5).abs() < 1e-12).unwrap();
        assert!((mid.1 - 32.0).abs() < 1e-4);
        let end = samples.iter().find(|(t, _)| (t - 0.9).abs() < 1e-12).unwrap();
        assert!((end.1 - 2e4).abs() < 2e-2);
    }

    #[test]
    fn csv_schema() {
        let spec = singular(1, &["(0,0) (1,0)"]);
        let mut vel = vec![0.0; 6];
        vel[Z1] = 1.0;
        let init = GeodesicState { position: Point::at_w(1.0, 0.0, 6), velocity: vel, t: 0.0 };
        let traj = geodesic_integrate(&spec, &init, 1.0, 1e-8).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,w1,w2,z1,z2,x1,y1,norm_drift,flag");
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(fields[0], "0");
        assert_eq!(fields[8], "0");
        // every row parses back to floats
        for line in csv.lines().skip(1) {
            for f in line.split(',') {
                f.parse::<f64>().unwrap();
            }
        }
    }
}
