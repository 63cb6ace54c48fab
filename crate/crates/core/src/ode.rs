//! Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with 4th-order dense
//! output and event localization by bisection on the dense interpolant.

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// difference between 5th-order and embedded 4th-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 - -92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its dense interpolant.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    cont: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let n = self.cont[0].len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let (c0, c1, c2, c3, c4) = (
                self.cont[0][i],
                self.cont[1][i],
                self.cont[2][i],
                self.cont[3][i],
                self.cont[4][i],
            );
            y[i] = c0 + th * (c1 + (1.0 - th) * (c2 + th * (c3 + (1.0 - th) * c4)));
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OdeStatus {
    ReachedEnd,
    /// event function crossed zero at the contained time
    Event(f64),
    /// tolerance unreachable: step size underflowed at the contained time
    StepUnderflow(f64),
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub steps: Vec<DenseStep>,
    pub t_final: f64,
    pub y_final: Vec<f64>,
    pub status: OdeStatus,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl Solution {
    /// Dense sample anywhere in [t0, t_final].
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let s = self
            .steps
            .iter()
            .find(|s| t <= s.t1() + 1e-300 || (t - s.t1()).abs() < 1e-12 * t.abs().max(1.0))
            .or_else(|| self.steps.last())
            .expect("empty solution");
        s.eval(t)
    }
}

pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_initial: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options { rtol: 1e-9, atol: 1e-9, max_steps: 1_000_000, h_initial: None }
    }
}

/// Integrate y' = f(t, y) from t0 to t_end (t_end > t0). If `event` is given,
/// integration stops where the event value first crosses from positive to
/// <= 0, localized on the dense interpolant to ~1e-12 relative in t.
pub fn solve<F, G>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &Options,
    mut event: Option<G>,
) -> Solution
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: FnMut(f64, &[f64]) -> f64,
{
    assert!(t_end > t0);
    let n = y0.len();
    let span = t_end - t0;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t, &y, &mut k[0]);
    let mut h = opts.h_initial.unwrap_or_else(|| {
        let scale = k[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (span * 1e-3).min(if scale > 0.0 { 0.1 / scale } else { span * 1e-3 })
    });
    let mut steps = Vec::new();
    let (mut n_accepted, mut n_rejected) = (0usize, 0usize);
    let mut ev_prev = event.as_mut().map(|g| g(t, &y));

    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Solution {
                steps,
                t_final: t,
                y_final: y,
                status: OdeStatus::ReachedEnd,
                n_accepted,
                n_rejected,
            };
        }
        h = h.min(t_end - t);
        let h_floor = 1e-14 * t.abs().max(1.0);
        if h < h_floor {
            return Solution {
                steps,
                t_final: t,
                y_final: y,
                status: OdeStatus::StepUnderflow(t),
                n_accepted,
                n_rejected,
            };
        }

        let mut ytmp = vec![0.0; n];
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            // stage 7 is the derivative at the 5th-order solution (FSAL)
            let ts = t + C[s] * h;
            f(ts, &ytmp, &mut k[s + 1]);
        }
        let y1 = ytmp; // A[5] row is the 5th-order weight vector b
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / n as f64).sqrt();

        if err <= 1.0 {
            // dense coefficients for this step
            let dy: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
            let cont2 = dy.clone();
            let cont3: Vec<f64> = (0..n).map(|i| h * k[0][i] - dy[i]).collect();
            let cont4: Vec<f64> = (0..n).map(|i| dy[i] - h * k[6][i] - cont3[i]).collect();
            let cont5: Vec<f64> = (0..n)
                .map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>())
                .collect();
            let step = DenseStep { t0: t, h, cont: [y.clone(), cont2, cont3, cont4, cont5] };

            if let (Some(g), Some(prev)) = (event.as_mut(), ev_prev) {
                let ev_new = g(t + h, &y1);
                if prev > 0.0 && ev_new <= 0.0 {
                    // bisect on the dense interpolant
                    let (mut lo, mut hi) = (t, t + h);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if g(mid, &step.eval(mid)) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo < 1e-12 * hi.abs().max(1.0) {
                            break;
                        }
                    }
                    let y_ev = step.eval(hi);
                    steps.push(step);
                    return Solution {
                        steps,
                        t_final: hi,
                        y_final: y_ev,
                        status: OdeStatus::Event(hi),
                        n_accepted: n_accepted + 1,
                        n_rejected,
                    };
                }
                ev_prev = Some(ev_new);
            }

            steps.push(step);
            t += h;
            y = y1;
            k.swap(0, 6); // FSAL
            n_accepted += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        } else {
            n_rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Solution {
        steps,
        t_final: t,
        y_final: y,
        status: OdeStatus::StepUnderflow(t),
        n_accepted,
        n_rejected,
    }
}
