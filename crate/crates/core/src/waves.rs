//! Plane-fronted waves in coordinates (u, v, x^1..x^n): g_{uv} = 1,
//! g_{uu} = A_ab(u) x^a x^b, g_{x^a x^a} = eps_a, with a symmetric
//! u-dependent profile A. Oscillator-generated Killing fields and their
//! Heisenberg bracket table, the curvature-equals-profile law, the parallel
//! linear-type structure of the scale-invariant wave, and geodesics.
//!
//! The u-v cross term carries coefficient 1, the same normalization as the
//! w-z pairing of the main family.
//!
//! Components depend on u through the profile and at most quadratically on x,
//! so jets here pair an order-3 jet in u with the x-expansion to order 2;
//! every x-derivative the curvature assembly consumes is exact, and the
//! u-order budget (metric 3, connection 2, curvature 1, its derivative 0)
//! matches the main engine.

use std::sync::Arc;

use crate::geodesic::{solver_tol, TrajectoryFlag};
use crate::jets::Jet2;
use crate::ode::{self, OdeStatus, Options, Solution};
use crate::tensor::{TensorValue, Variance};

pub const U: usize = 0;
pub const V: usize = 1;

/// Coordinate index of x^a (zero-based a).
pub fn wx(a: usize) -> usize {
    2 + a
}

/// Halt guard for scale-invariant waves: integration stops (with a flag) when
/// |u| drops below this, rather than feeding the 1/u^2 blowup to the stepper.
pub const U_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WaveError {
    #[error("profile matrices must be symmetric n x n")]
    BadProfile,
    #[error("signature entries must be +1 or -1, one per x coordinate")]
    BadSignature,
    #[error("scale-invariant profile evaluated at u = 0")]
    ProfilePole,
    #[error("point has {0} coordinates, this wave lives in dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("u = {0} outside the integrated range [{1}, {2}]")]
    OutsideRange(f64, f64, f64),
    #[error("oscillator integration underflowed at u = {0}")]
    StepUnderflow(f64),
    #[error("structure check needs the scale-invariant profile")]
    NotScaleInvariant,
}

#[derive(Debug, Clone)]
pub enum WaveProfile {
    /// A(u) = A0
    Constant(Vec<Vec<f64>>),
    /// A(u) = B / u^2
    ScaleInvariant(Vec<Vec<f64>>),
    /// A(u) = sum_k C_k u^k
    Polynomial(Vec<Vec<Vec<f64>>>),
}

#[derive(Debug, Clone)]
pub struct PlaneWaveSpec {
    pub n: usize,
    pub profile: WaveProfile,
    pub epsilons: Vec<f64>,
}

fn check_symmetric(m: &[Vec<f64>], n: usize) -> Result<(), WaveError> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(WaveError::BadProfile);
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(WaveError::BadProfile);
            }
        }
    }
    Ok(())
}

impl PlaneWaveSpec {
    /// `epsilons = None` means the Lorentzian case, all +1.
    pub fn new(
        profile: WaveProfile,
        epsilons: Option<Vec<f64>>,
    ) -> Result<PlaneWaveSpec, WaveError> {
        let n = match &profile {
            WaveProfile::Constant(m) | WaveProfile::ScaleInvariant(m) => m.len(),
            WaveProfile::Polynomial(cs) => cs.first().map(|c| c.len()).unwrap_or(0),
        };
        match &profile {
            WaveProfile::Constant(m) | WaveProfile::ScaleInvariant(m) => check_symmetric(m, n)?,
            WaveProfile::Polynomial(cs) => {
                if cs.is_empty() {
                    return Err(WaveError::BadProfile);
                }
                for c in cs {
                    check_symmetric(c, n)?;
                }
            }
        }
        let epsilons = epsilons.unwrap_or_else(|| vec![1.0; n]);
        if epsilons.len() != n || epsilons.iter().any(|&e| e != 1.0 && e != -1.0) {
            return Err(WaveError::BadSignature);
        }
        Ok(PlaneWaveSpec { n, profile, epsilons })
    }

    pub fn dim(&self) -> usize {
        self.n + 2
    }

    pub fn is_scale_invariant(&self) -> bool {
        matches!(self.profile, WaveProfile::ScaleInvariant(_))
    }

    /// Order-3 jets in u of the profile entries, row major.
    pub fn profile_jet(&self, u: f64) -> Result<Vec<Jet2>, WaveError> {
        let n = self.n;
        let mut out = vec![Jet2::ZERO; n * n];
        match &self.profile {
            WaveProfile::Constant(m) => {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = Jet2::constant(m[i][j]);
                    }
                }
            }
            WaveProfile::ScaleInvariant(b) => {
                if u == 0.0 {
                    return Err(WaveError::ProfilePole);
                }
                let uj = Jet2::lift(u, 0);
                let inv2 = (uj * uj).recip();
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = inv2.scale(b[i][j]);
                    }
                }
            }
            WaveProfile::Polynomial(cs) => {
                let uj = Jet2::lift(u, 0);
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = Jet2::ZERO;
                        for c in cs.iter().rev() {
                            acc = acc * uj + Jet2::constant(c[i][j]);
                        }
                        out[i * n + j] = acc;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn profile_values(&self, u: f64) -> Result<Vec<Vec<f64>>, WaveError> {
        let j = self.profile_jet(u)?;
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|k| j[i * self.n + k].value()).collect())
            .collect())
    }
}

/// Jet of a metric component in (u, x): an order-3 u-jet for the value and
/// for each raw x-derivative up to second order. Nothing here has x-degree
/// above 2, so the stored x-slots are exact (no truncation error in x).
#[derive(Clone, Debug)]
struct XJet {
    c: Jet2,
    /// d/dx_a, length n
    g: Vec<Jet2>,
    /// d^2/dx_a dx_b, n x n row major, symmetric
    h: Vec<Jet2>,
}

impl XJet {
    fn zero(n: usize) -> XJet {
        XJet { c: Jet2::ZERO, g: vec![Jet2::ZERO; n], h: vec![Jet2::ZERO; n * n] }
    }

    fn constant(v: f64, n: usize) -> XJet {
        let mut j = XJet::zero(n);
        j.c = Jet2::constant(v);
        j
    }

    fn nx(&self) -> usize {
        self.g.len()
    }

    fn value(&self) -> f64 {
        self.c.value()
    }

    fn max_abs(&self) -> f64 {
        let mut m = self.c.max_abs();
        for j in self.g.iter().chain(&self.h) {
            m = m.max(j.max_abs());
        }
        m
    }

    fn add(&self, o: &XJet) -> XJet {
        XJet {
            c: self.c + o.c,
            g: self.g.iter().zip(&o.g).map(|(a, b)| *a + *b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| *a + *b).collect(),
        }
    }

    fn sub(&self, o: &XJet) -> XJet {
        XJet {
            c: self.c - o.c,
            g: self.g.iter().zip(&o.g).map(|(a, b)| *a - *b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| *a - *b).collect(),
        }
    }

    fn scale(&self, f: f64) -> XJet {
        XJet {
            c: self.c.scale(f),
            g: self.g.iter().map(|j| j.scale(f)).collect(),
            h: self.h.iter().map(|j| j.scale(f)).collect(),
        }
    }

    fn neg(&self) -> XJet {
        self.scale(-1.0)
    }

    fn mul(&self, o: &XJet) -> XJet {
        let n = self.nx();
        let mut out = XJet::zero(n);
        out.c = self.c * o.c;
        for a in 0..n {
            out.g[a] = self.c * o.g[a] + self.g[a] * o.c;
        }
        for a in 0..n {
            for b in 0..n {
                out.h[a * n + b] = self.c * o.h[a * n + b]
                    + self.g[a] * o.g[b]
                    + self.g[b] * o.g[a]
                    + self.h[a * n + b] * o.c;
            }
        }
        out
    }

    /// jet of d/du; the u-truncation drops the top order, like Jet2::d
    fn du(&self) -> XJet {
        XJet {
            c: self.c.d(0),
            g: self.g.iter().map(|j| j.d(0)).collect(),
            h: self.h.iter().map(|j| j.d(0)).collect(),
        }
    }

    /// jet of d/dx_a; the vacated second-order slots are genuinely zero
    fn dx(&self, a: usize) -> XJet {
        let n = self.nx();
        let mut out = XJet::zero(n);
        out.c = self.g[a];
        for b in 0..n {
            out.g[b] = self.h[a * n + b];
        }
        out
    }
}

fn dpart_wave(j: &XJet, dir: usize) -> XJet {
    match dir {
        0 => j.du(),
        1 => XJet::zero(j.nx()),
        d => j.dx(d - 2),
    }
}

/// g, g^{-1}, and Christoffel jets at a point: enough for connection-level
/// work (geodesics, Killing residuals) without curvature assembly.
pub struct WaveCore {
    pub dim: usize,
    n: usize,
    g: Vec<XJet>,
    ginv: Vec<XJet>,
    gamma: Vec<XJet>,
}

impl WaveCore {
    pub fn new(spec: &PlaneWaveSpec, point: &[f64]) -> Result<WaveCore, WaveError> {
        let dim = spec.dim();
        if point.len() != dim {
            return Err(WaveError::DimensionMismatch(point.len(), dim));
        }
        let n = spec.n;
        let aj = spec.profile_jet(point[U])?;
        let x0 = &point[2..];
        let i2 = |a: usize, b: usize| a * dim + b;

        let mut g = vec![XJet::zero(n); dim * dim];
        g[i2(U, V)] = XJet::constant(1.0, n);
        g[i2(V, U)] = XJet::constant(1.0, n);
        // g_uu = A_ab(u) x^a x^b expanded at x0: value, gradient, Hessian
        let mut guu = XJet::zero(n);
        for a in 0..n {
            for b in 0..n {
                let ab = aj[a * n + b];
                guu.c = guu.c + ab.scale(x0[a] * x0[b]);
                guu.g[a] = guu.g[a] + ab.scale(2.0 * x0[b]);
                guu.h[a * n + b] = guu.h[a * n + b] + ab.scale(2.0);
            }
        }
        g[i2(U, U)] = guu;
        for a in 0..n {
            g[i2(wx(a), wx(a))] = XJet::constant(spec.epsilons[a], n);
        }

        // closed-form inverse: the null pair swaps, g^{vv} = -g_uu, unit x block
        let mut ginv = vec![XJet::zero(n); dim * dim];
        ginv[i2(U, V)] = XJet::constant(1.0, n);
        ginv[i2(V, U)] = XJet::constant(1.0, n);
        ginv[i2(V, V)] = g[i2(U, U)].neg();
        for a in 0..n {
            ginv[i2(wx(a), wx(a))] = XJet::constant(1.0 / spec.epsilons[a], n);
        }

        let i3 = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
        let mut gamma = vec![XJet::zero(n); dim * dim * dim];
        for mu in 0..dim {
            for nu in mu..dim {
                // dg[sigma] = d_mu g_{sigma nu} + d_nu g_{sigma mu} - d_sigma g_{mu nu}
                let mut dg = vec![XJet::zero(n); dim];
                for (sigma, slot) in dg.iter_mut().enumerate() {
                    *slot = dpart_wave(&g[i2(sigma, nu)], mu)
                        .add(&dpart_wave(&g[i2(sigma, mu)], nu))
                        .sub(&dpart_wave(&g[i2(mu, nu)], sigma));
                }
                for lam in 0..dim {
                    let mut acc = XJet::zero(n);
                    for (sigma, dgs) in dg.iter().enumerate() {
                        let gi = &ginv[i2(lam, sigma)];
                        if gi.max_abs() != 0.0 && dgs.max_abs() != 0.0 {
                            acc = acc.add(&gi.mul(dgs));
                        }
                    }
                    let v = acc.scale(0.5);
                    gamma[i3(lam, mu, nu)] = v.clone();
                    gamma[i3(lam, nu, mu)] = v;
                }
            }
        }
        Ok(WaveCore { dim, n, g, ginv, gamma })
    }

    /// acceleration^l = -Gamma^l_{mn} v^m v^n
    pub fn geodesic_acceleration(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut acc = vec![0.0; d];
        for (l, slot) in acc.iter_mut().enumerate() {
            let mut s = 0.0;
            for m in 0..d {
                if v[m] == 0.0 {
                    continue;
                }
                for n in 0..d {
                    s += self.gamma[(l * d + m) * d + n].value() * v[m] * v[n];
                }
            }
            *slot = -s;
        }
        acc
    }

    pub fn metric_values(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut m = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = self.g[i * d + j].value();
            }
        }
        m
    }
}

pub fn plane_wave_metric(spec: &PlaneWaveSpec, point: &[f64]) -> Result<TensorValue, WaveError> {
    let core = WaveCore::new(spec, point)?;
    let mut t = TensorValue::zeros(core.dim, vec![Variance::Lower, Variance::Lower]);
    for (slot, j) in t.data.iter_mut().zip(&core.g) {
        *slot = j.value();
    }
    Ok(t)
}

/// All jet-level tensors of a wave at one point.
pub struct WaveGeometry {
    pub dim: usize,
    g: Vec<XJet>,
    ginv: Vec<XJet>,
    gamma: Vec<XJet>,
    r4: Vec<XJet>,
}

impl WaveGeometry {
    pub fn new(spec: &PlaneWaveSpec, point: &[f64]) -> Result<WaveGeometry, WaveError> {
        let WaveCore { dim, n, g, ginv, gamma } = WaveCore::new(spec, point)?;
        let i2 = |a: usize, b: usize| a * dim + b;
        let i3 = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
        let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * dim + b) * dim + c) * dim + d;

        let mut r13 = vec![XJet::zero(n); dim * dim * dim * dim];
        for mu in 0..dim {
            for nu in mu + 1..dim {
                for rho in 0..dim {
                    for sigma in 0..dim {
                        let mut tot = dpart_wave(&gamma[i3(rho, nu, sigma)], mu)
                            .sub(&dpart_wave(&gamma[i3(rho, mu, sigma)], nu));
                        for lam in 0..dim {
                            let a = &gamma[i3(rho, mu, lam)];
                            let b = &gamma[i3(lam, nu, sigma)];
                            if a.max_abs() != 0.0 && b.max_abs() != 0.0 {
                                tot = tot.add(&a.mul(b));
                            }
                            let a = &gamma[i3(rho, nu, lam)];
                            let b = &gamma[i3(lam, mu, sigma)];
                            if a.max_abs() != 0.0 && b.max_abs() != 0.0 {
                                tot = tot.sub(&a.mul(b));
                            }
                        }
                        r13[i4(rho, sigma, nu, mu)] = tot.neg();
                        r13[i4(rho, sigma, mu, nu)] = tot;
                    }
                }
            }
        }

        let mut r4 = vec![XJet::zero(n); dim * dim * dim * dim];
        for mu in 0..dim {
            for nu in mu + 1..dim {
                for sigma in 0..dim {
                    for tau in 0..dim {
                        let mut acc = XJet::zero(n);
                        for rho in 0..dim {
                            let gt = &g[i2(tau, rho)];
                            let rr = &r13[i4(rho, sigma, mu, nu)];
                            if gt.max_abs() != 0.0 && rr.max_abs() != 0.0 {
                                acc = acc.add(&gt.mul(rr));
                            }
                        }
                        r4[i4(nu, mu, sigma, tau)] = acc.neg();
                        r4[i4(mu, nu, sigma, tau)] = acc;
                    }
                }
            }
        }

        Ok(WaveGeometry { dim, g, ginv, gamma, r4 })
    }

    #[inline]
    fn i2(&self, a: usize, b: usize) -> usize {
        a * self.dim + b
    }
    #[inline]
    fn i3(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }
    #[inline]
    fn i4(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    fn values(&self, src: &[XJet], variance: Vec<Variance>) -> TensorValue {
        let mut t = TensorValue::zeros(self.dim, variance);
        for (slot, j) in t.data.iter_mut().zip(src) {
            *slot = j.value();
        }
        t
    }

    pub fn metric(&self) -> TensorValue {
        self.values(&self.g, vec![Variance::Lower; 2])
    }
    pub fn metric_inverse(&self) -> TensorValue {
        self.values(&self.ginv, vec![Variance::Upper; 2])
    }
    pub fn christoffel(&self) -> TensorValue {
        self.values(&self.gamma, vec![Variance::Upper, Variance::Lower, Variance::Lower])
    }
    pub fn riemann(&self) -> TensorValue {
        self.values(&self.r4, vec![Variance::Lower; 4])
    }

    pub fn ricci(&self) -> TensorValue {
        let d = self.dim;
        let mut t = TensorValue::zeros(d, vec![Variance::Lower, Variance::Lower]);
        for mu in 0..d {
            for nu in 0..d {
                let mut acc = 0.0;
                for alpha in 0..d {
                    for beta in 0..d {
                        let gi = self.ginv[self.i2(alpha, beta)].value();
                        if gi != 0.0 {
                            acc += gi * self.r4[self.i4(alpha, mu, nu, beta)].value();
                        }
                    }
                }
                t.set(&[mu, nu], acc);
            }
        }
        t
    }

    /// (nabla_a R)_{xyzw} as values, derivative slot first.
    pub fn nabla_riemann(&self) -> TensorValue {
        let d = self.dim;
        let mut t = TensorValue::zeros(d, vec![Variance::Lower; 5]);
        for al in 0..d {
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        for w in 0..d {
                            let r = &self.r4[self.i4(x, y, z, w)];
                            let mut v = match al {
                                0 => r.c.deriv(1, 0),
                                1 => 0.0,
                                a => r.g[a - 2].value(),
                            };
                            for k in 0..d {
                                v -= self.gamma[self.i3(k, al, x)].value()
                                    * self.r4[self.i4(k, y, z, w)].value()
                                    + self.gamma[self.i3(k, al, y)].value()
                                        * self.r4[self.i4(x, k, z, w)].value()
                                    + self.gamma[self.i3(k, al, z)].value()
                                        * self.r4[self.i4(x, y, k, w)].value()
                                    + self.gamma[self.i3(k, al, w)].value()
                                        * self.r4[self.i4(x, y, z, k)].value();
                            }
                            t.set(&[al, x, y, z, w], v);
                        }
                    }
                }
            }
        }
        t
    }

    pub fn kretschmann(&self) -> f64 {
        let gi = self.metric_inverse();
        let r4 = self.riemann();
        let mut up = r4.clone();
        for k in 0..4 {
            up = up.contract_slot(k, &gi);
        }
        r4.data.iter().zip(&up.data).map(|(a, b)| a * b).sum()
    }

    pub fn ricci_square(&self) -> f64 {
        let gi = self.metric_inverse();
        let ric = self.ricci();
        let up = ric.contract_slot(0, &gi).contract_slot(1, &gi);
        ric.data.iter().zip(&up.data).map(|(a, b)| a * b).sum()
    }
}

/// Fundamental oscillator solutions of f'' = E A(u) f (E = diag(1/eps_a)):
/// the P family starts at the identity with zero slope at u0, the Q family at
/// zero with unit slope. Integrated once over the requested range with dense
/// output, so Killing fields can be evaluated anywhere in it.
#[derive(Debug)]
pub struct OscillatorSystem {
    pub n: usize,
    pub u0: f64,
    pub u_lo: f64,
    pub u_hi: f64,
    y0: Vec<f64>,
    forward: Option<Solution>,
    backward: Option<Solution>,
}

/// n x n blocks, row major; columns are solutions.
pub struct OscSample {
    pub p: Vec<f64>,
    pub pdot: Vec<f64>,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

fn osc_rhs(spec: &PlaneWaveSpec, u: f64, y: &[f64], dy: &mut [f64]) {
    let n = spec.n;
    let nn = n * n;
    // the range is validated to exclude the profile pole, so this only
    // fires if the stepper probes the excluded boundary itself
    let a = spec
        .profile_values(u)
        .unwrap_or_else(|_| vec![vec![0.0; n]; n]);
    dy[..nn].copy_from_slice(&y[nn..2 * nn]);
    dy[2 * nn..3 * nn].copy_from_slice(&y[3 * nn..]);
    for c in 0..n {
        for col in 0..n {
            let mut fp = 0.0;
            let mut fq = 0.0;
            for b in 0..n {
                fp += a[c][b] * y[b * n + col];
                fq += a[c][b] * y[2 * nn + b * n + col];
            }
            dy[nn + c * n + col] = fp / spec.epsilons[c];
            dy[3 * nn + c * n + col] = fq / spec.epsilons[c];
        }
    }
}

impl OscillatorSystem {
    pub fn new(
        spec: &PlaneWaveSpec,
        u0: f64,
        u_lo: f64,
        u_hi: f64,
    ) -> Result<OscillatorSystem, WaveError> {
        if !(u_lo <= u0 && u0 <= u_hi) {
            return Err(WaveError::OutsideRange(u0, u_lo, u_hi));
        }
        if spec.is_scale_invariant() && u_lo <= 0.0 && u_hi >= 0.0 {
            return Err(WaveError::ProfilePole);
        }
        let n = spec.n;
        let nn = n * n;
        let mut y0 = vec![0.0; 4 * nn];
        for c in 0..n {
            y0[c * n + c] = 1.0; // P = I
            y0[3 * nn + c * n + c] = 1.0; // Q' = I
        }
        let opts = Options { rtol: 1e-12, atol: 1e-12, ..Default::default() };
        let no_event = None::<fn(f64, &[f64]) -> f64>;

        let forward = if u_hi > u0 {
            let sol = ode::solve(
                |u, y, dy: &mut [f64]| osc_rhs(spec, u, y, dy),
                u0,
                &y0,
                u_hi,
                &opts,
                no_event,
            );
            if let OdeStatus::StepUnderflow(t) = sol.status {
                return Err(WaveError::StepUnderflow(t));
            }
            Some(sol)
        } else {
            None
        };
        let backward = if u_lo < u0 {
            // mirrored clock tau = u0 - u
            let sol = ode::solve(
                |tau, y, dy: &mut [f64]| {
                    osc_rhs(spec, u0 - tau, y, dy);
                    for d in dy.iter_mut() {
                        *d = -*d;
                    }
                },
                0.0,
                &y0,
                u0 - u_lo,
                &opts,
                no_event,
            );
            if let OdeStatus::StepUnderflow(t) = sol.status {
                return Err(WaveError::StepUnderflow(u0 - t));
            }
            Some(sol)
        } else {
            None
        };

        Ok(OscillatorSystem { n: spec.n, u0, u_lo, u_hi, y0, forward, backward })
    }

    pub fn sample(&self, u: f64) -> Result<OscSample, WaveError> {
        if u < self.u_lo - 1e-12 || u > self.u_hi + 1e-12 {
            return Err(WaveError::OutsideRange(u, self.u_lo, self.u_hi));
        }
        let y = if u >= self.u0 {
            match &self.forward {
                Some(s) => s.sample(u.min(s.t_final)),
                None => self.y0.clone(),
            }
        } else {
            match &self.backward {
                Some(s) => s.sample((self.u0 - u).min(s.t_final)),
                None => self.y0.clone(),
            }
        };
        let nn = self.n * self.n;
        Ok(OscSample {
            p: y[..nn].to_vec(),
            pdot: y[nn..2 * nn].to_vec(),
            q: y[2 * nn..3 * nn].to_vec(),
            qdot: y[3 * nn..].to_vec(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OscFamily {
    P,
    Q,
}

#[derive(Clone, Debug)]
pub enum KillingField {
    /// dv: Killing for every profile (nothing depends on v)
    Dv,
    /// du: Killing exactly when the profile is constant in u
    ExtraCw,
    /// u du - v dv: Killing for the scale-invariant profile
    ExtraSsi,
    /// X_f = f_a dx^a - (sum_a eps_a f'_a x^a) dv for an oscillator solution f
    Oscillator {
        system: Arc<OscillatorSystem>,
        family: OscFamily,
        column: usize,
    },
    /// plain dx^a: generically *not* Killing; kept as a negative control
    Dx(usize),
}

impl KillingField {
    /// Components X^lambda and raw derivatives d[mu][lambda] = d_mu X^lambda.
    pub fn eval(
        &self,
        spec: &PlaneWaveSpec,
        point: &[f64],
    ) -> Result<(Vec<f64>, Vec<Vec<f64>>), WaveError> {
        let dim = spec.dim();
        if point.len() != dim {
            return Err(WaveError::DimensionMismatch(point.len(), dim));
        }
        let n = spec.n;
        let mut x = vec![0.0; dim];
        let mut d = vec![vec![0.0; dim]; dim];
        match self {
            KillingField::Dv => x[V] = 1.0,
            KillingField::ExtraCw => x[U] = 1.0,
            KillingField::ExtraSsi => {
                x[U] = point[U];
                x[V] = -point[V];
                d[U][U] = 1.0;
                d[V][V] = -1.0;
            }
            KillingField::Dx(a) => x[wx(*a)] = 1.0,
            KillingField::Oscillator { system, family, column } => {
                let s = system.sample(point[U])?;
                let (f, fd) = match family {
                    OscFamily::P => (&s.p, &s.pdot),
                    OscFamily::Q => (&s.q, &s.qdot),
                };
                let a = spec.profile_values(point[U])?;
                for c in 0..n {
                    let fc = f[c * n + column];
                    let fdc = fd[c * n + column];
                    // f'' read off the oscillator equation itself
                    let fddc = (0..n).map(|b| a[c][b] * f[b * n + column]).sum::<f64>()
                        / spec.epsilons[c];
                    x[wx(c)] = fc;
                    x[V] -= spec.epsilons[c] * fdc * point[wx(c)];
                    d[U][wx(c)] = fdc;
                    d[U][V] -= spec.epsilons[c] * fddc * point[wx(c)];
                    d[wx(c)][V] = -spec.epsilons[c] * fdc;
                }
            }
        }
        Ok((x, d))
    }
}

/// The wave's Killing algebra generators: dv, the 2n oscillator fields, and
/// the profile's extra field (du for constant, u du - v dv for scale invariant).
pub fn oscillator_killing_fields(
    spec: &PlaneWaveSpec,
    u0: f64,
    u_range: (f64, f64),
) -> Result<Vec<KillingField>, WaveError> {
    let system = Arc::new(OscillatorSystem::new(spec, u0, u_range.0, u_range.1)?);
    let mut out = vec![KillingField::Dv];
    for column in 0..spec.n {
        out.push(KillingField::Oscillator {
            system: Arc::clone(&system),
            family: OscFamily::P,
            column,
        });
    }
    for column in 0..spec.n {
        out.push(KillingField::Oscillator {
            system: Arc::clone(&system),
            family: OscFamily::Q,
            column,
        });
    }
    match spec.profile {
        WaveProfile::Constant(_) => out.push(KillingField::ExtraCw),
        WaveProfile::ScaleInvariant(_) => out.push(KillingField::ExtraSsi),
        WaveProfile::Polynomial(_) => {}
    }
    Ok(out)
}

/// max |(L_X g)_{mu nu}| over the sample points.
pub fn killing_residual(
    spec: &PlaneWaveSpec,
    field: &KillingField,
    points: &[Vec<f64>],
) -> Result<f64, WaveError> {
    let dim = spec.dim();
    let mut worst = 0.0f64;
    for p in points {
        let core = WaveCore::new(spec, p)?;
        let (x, dx) = field.eval(spec, p)?;
        for mu in 0..dim {
            for nu in mu..dim {
                let mut l = 0.0;
                for lam in 0..dim {
                    let gmn = &core.g[mu * dim + nu];
                    if x[lam] != 0.0 {
                        l += x[lam] * dpart_wave(gmn, lam).value();
                    }
                    l += core.g[lam * dim + nu].value() * dx[mu][lam];
                    l += core.g[mu * dim + lam].value() * dx[nu][lam];
                }
                worst = worst.max(l.abs());
            }
        }
    }
    Ok(worst)
}

/// Bracket table of the oscillator fields and dv.
pub struct HeisenbergReport {
    pub n: usize,
    /// the conserved pairing W = P^T E Q' - P'^T E Q at u0
    pub wronskian0: Vec<Vec<f64>>,
    /// max |W(u) - W(u0)| over the sampled range
    pub wronskian_drift: f64,
    /// v-coefficients of [X_{p_a}, X_{q_b}] at u0; the pairing enters the
    /// bracket with a minus sign: [X_{p_a}, X_{q_b}] = -W_ab dv
    pub pq_coeff: Vec<Vec<f64>>,
    /// max |[X_{p_a}, X_{p_b}]| / |[X_{q_a}, X_{q_b}]| coefficient over the range
    pub pp_max: f64,
    pub qq_max: f64,
    /// max |d X^lambda / dv| over dv and the oscillator fields: dv is central
    pub central_max: f64,
}

/// v-coefficient of [X_f, X_g] = (f'^T E g - f^T E g') dv.
fn bracket_v(eps: &[f64], f: &[f64], fd: &[f64], g: &[f64], gd: &[f64], n: usize, a: usize, b: usize) -> f64 {
    (0..n)
        .map(|c| eps[c] * (fd[c * n + a] * g[c * n + b] - f[c * n + a] * gd[c * n + b]))
        .sum()
}

pub fn heisenberg_table(spec: &PlaneWaveSpec, u0: f64) -> Result<HeisenbergReport, WaveError> {
    let (mut lo, mut hi) = (u0 - 2.5, u0 + 2.5);
    if spec.is_scale_invariant() {
        if u0 == 0.0 {
            return Err(WaveError::ProfilePole);
        }
        // stay on u0's side of the pole
        if u0 > 0.0 {
            lo = lo.max(0.02 * u0);
        } else {
            hi = hi.min(0.02 * u0);
        }
    }
    let n = spec.n;
    let eps = &spec.epsilons;
    let system = Arc::new(OscillatorSystem::new(spec, u0, lo, hi)?);

    let w_at = |s: &OscSample| -> Vec<Vec<f64>> {
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|c| {
                                eps[c]
                                    * (s.p[c * n + a] * s.qdot[c * n + b]
                                        - s.pdot[c * n + a] * s.q[c * n + b])
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    };

    let s0 = system.sample(u0)?;
    let w0 = w_at(&s0);
    let mut pq_coeff = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            pq_coeff[a][b] = bracket_v(eps, &s0.p, &s0.pdot, &s0.q, &s0.qdot, n, a, b);
        }
    }

    let samples = 40;
    let mut wronskian_drift = 0.0f64;
    let mut pp_max = 0.0f64;
    let mut qq_max = 0.0f64;
    for k in 0..=samples {
        let u = lo + (hi - lo) * k as f64 / samples as f64;
        let s = system.sample(u)?;
        let w = w_at(&s);
        for a in 0..n {
            for b in 0..n {
                wronskian_drift = wronskian_drift.max((w[a][b] - w0[a][b]).abs());
                pp_max = pp_max.max(bracket_v(eps, &s.p, &s.pdot, &s.p, &s.pdot, n, a, b).abs());
                qq_max = qq_max.max(bracket_v(eps, &s.q, &s.qdot, &s.q, &s.qdot, n, a, b).abs());
            }
        }
    }

    // centrality of dv: every algebra member has v-independent components
    let mut probe = vec![0.0; spec.dim()];
    probe[U] = u0;
    probe[V] = 0.37;
    for c in 0..n {
        probe[wx(c)] = 0.81 - 0.13 * c as f64;
    }
    let mut fields = vec![KillingField::Dv];
    for column in 0..n {
        fields.push(KillingField::Oscillator {
            system: Arc::clone(&system),
            family: OscFamily::P,
            column,
        });
        fields.push(KillingField::Oscillator {
            system: Arc::clone(&system),
            family: OscFamily::Q,
            column,
        });
    }
    let mut central_max = 0.0f64;
    for f in &fields {
        let (_, d) = f.eval(spec, &probe)?;
        for lam in 0..spec.dim() {
            central_max = central_max.max(d[V][lam].abs());
        }
    }

    Ok(HeisenbergReport {
        n,
        wronskian0: w0,
        wronskian_drift,
        pq_coeff,
        pp_max,
        qq_max,
        central_max,
    })
}

pub struct WaveCurvatureReport {
    /// R4[u][x^a][x^b][u] values
    pub r_uaub: Vec<Vec<f64>>,
    /// max |R4[u][x^a][x^b][u] + A_ab|
    pub profile_residual: f64,
    /// max |R4| over components not carried by the (u, x)-pair pattern
    pub off_pattern_max: f64,
    pub nabla_r_max: f64,
    pub ricci_uu: f64,
    /// |Ric_uu + tr(E A)|
    pub ricci_trace_residual: f64,
    pub ricci_off_max: f64,
    pub kretschmann: f64,
    pub ricci_square: f64,
}

pub fn wave_curvature_and_symmetry(
    spec: &PlaneWaveSpec,
    point: &[f64],
) -> Result<WaveCurvatureReport, WaveError> {
    let geo = WaveGeometry::new(spec, point)?;
    let r4 = geo.riemann();
    let a = spec.profile_values(point[U])?;
    let n = spec.n;
    let dim = spec.dim();

    let mut r_uaub = vec![vec![0.0; n]; n];
    let mut profile_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            r_uaub[i][j] = r4.get(&[U, wx(i), wx(j), U]);
            profile_residual = profile_residual.max((r_uaub[i][j] + a[i][j]).abs());
        }
    }

    let pair_ok = |i: usize, j: usize| (i == U && j >= 2) || (j == U && i >= 2);
    let mut off_pattern_max = 0.0f64;
    for m in 0..dim {
        for nu in 0..dim {
            for s in 0..dim {
                for t in 0..dim {
                    if !(pair_ok(m, nu) && pair_ok(s, t)) {
                        off_pattern_max = off_pattern_max.max(r4.get(&[m, nu, s, t]).abs());
                    }
                }
            }
        }
    }

    let ric = geo.ricci();
    let ricci_uu = ric.get(&[U, U]);
    let trace_ea: f64 = (0..n).map(|c| a[c][c] / spec.epsilons[c]).sum();
    let mut ricci_off_max = 0.0f64;
    for m in 0..dim {
        for nu in 0..dim {
            if (m, nu) != (U, U) {
                ricci_off_max = ricci_off_max.max(ric.get(&[m, nu]).abs());
            }
        }
    }

    Ok(WaveCurvatureReport {
        r_uaub,
        profile_residual,
        off_pattern_max,
        nabla_r_max: geo.nabla_riemann().max_abs(),
        ricci_uu,
        ricci_trace_residual: (ricci_uu + trace_ea).abs(),
        ricci_off_max,
        kretschmann: geo.kretschmann(),
        ricci_square: geo.ricci_square(),
    })
}

/// Residuals of the linear-type structure S_X Y = g(X,Y) xi - g(xi,Y) X with
/// xi = -(1/u) dv on the scale-invariant wave: the connection nabla - S must
/// make g, R, and S itself parallel, and xi must be null.
pub struct SsiStructureReport {
    pub xi_norm_max: f64,
    pub metric_residual: f64,
    pub curvature_residual: f64,
    pub structure_residual: f64,
}

pub fn ssi_structure_check(
    spec: &PlaneWaveSpec,
    points: &[Vec<f64>],
) -> Result<SsiStructureReport, WaveError> {
    if !spec.is_scale_invariant() {
        return Err(WaveError::NotScaleInvariant);
    }
    let dim = spec.dim();
    let mut xi_norm_max = 0.0f64;
    let mut metric_residual = 0.0f64;
    let mut curvature_residual = 0.0f64;
    let mut structure_residual = 0.0f64;

    for p in points {
        let geo = WaveGeometry::new(spec, p)?;
        let gval = geo.metric();
        let gam = geo.christoffel();
        let r4 = geo.riemann();
        let nr = geo.nabla_riemann();
        let u = p[U];

        // xi = -(1/u) dv; its lowered form hits the u slot through g_uv = 1
        let mut xi = vec![0.0; dim];
        xi[V] = -1.0 / u;
        let mut xib = vec![0.0; dim];
        for nu in 0..dim {
            xib[nu] = (0..dim).map(|l| gval.get(&[nu, l]) * xi[l]).sum();
        }
        xi_norm_max = xi_norm_max
            .max((0..dim).map(|l| xib[l] * xi[l]).sum::<f64>().abs());
        // the only coordinate direction xi varies in is u
        let mut dxi = vec![vec![0.0; dim]; dim];
        dxi[U][V] = 1.0 / (u * u);
        let mut dxib = vec![vec![0.0; dim]; dim];
        dxib[U][U] = 1.0 / (u * u);

        // S^l_{mn} = g_{mn} xi^l - xib_n delta^l_m
        let mut s = vec![0.0; dim * dim * dim];
        let i3 = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
        for l in 0..dim {
            for m in 0..dim {
                for nu in 0..dim {
                    s[i3(l, m, nu)] =
                        gval.get(&[m, nu]) * xi[l] - if l == m { xib[nu] } else { 0.0 };
                }
            }
        }

        // (nabla - S) applied to g: g(S_a e_m, e_n) + g(e_m, S_a e_n)
        for al in 0..dim {
            for m in 0..dim {
                for nu in 0..dim {
                    let mut v = 0.0;
                    for l in 0..dim {
                        v += gval.get(&[l, nu]) * s[i3(l, al, m)]
                            + gval.get(&[m, l]) * s[i3(l, al, nu)];
                    }
                    metric_residual = metric_residual.max(v.abs());
                }
            }
        }

        // (nabla - S) applied to R
        for al in 0..dim {
            for m in 0..dim {
                for nu in 0..dim {
                    for si in 0..dim {
                        for ta in 0..dim {
                            let mut v = nr.get(&[al, m, nu, si, ta]);
                            for l in 0..dim {
                                v += s[i3(l, al, m)] * r4.get(&[l, nu, si, ta])
                                    + s[i3(l, al, nu)] * r4.get(&[m, l, si, ta])
                                    + s[i3(l, al, si)] * r4.get(&[m, nu, l, ta])
                                    + s[i3(l, al, ta)] * r4.get(&[m, nu, si, l]);
                            }
                            curvature_residual = curvature_residual.max(v.abs());
                        }
                    }
                }
            }
        }

        // coordinate partials of S, then nabla S, then the S-corrections
        let dgv = |al: usize, m: usize, nu: usize| -> f64 {
            dpart_wave(&geo.g[m * dim + nu], al).value()
        };
        for al in 0..dim {
            for l in 0..dim {
                for m in 0..dim {
                    for nu in 0..dim {
                        let ds = dgv(al, m, nu) * xi[l] + gval.get(&[m, nu]) * dxi[al][l]
                            - if l == m { dxib[al][nu] } else { 0.0 };
                        let mut nabla_s = ds;
                        for r in 0..dim {
                            nabla_s += gam.get(&[l, al, r]) * s[i3(r, m, nu)]
                                - gam.get(&[r, al, m]) * s[i3(l, r, nu)]
                                - gam.get(&[r, al, nu]) * s[i3(l, m, r)];
                        }
                        let mut v = nabla_s;
                        for r in 0..dim {
                            v += -s[i3(l, al, r)] * s[i3(r, m, nu)]
                                + s[i3(l, r, nu)] * s[i3(r, al, m)]
                                + s[i3(l, m, r)] * s[i3(r, al, nu)];
                        }
                        structure_residual = structure_residual.max(v.abs());
                    }
                }
            }
        }
    }

    Ok(SsiStructureReport {
        xi_norm_max,
        metric_residual,
        curvature_residual,
        structure_residual,
    })
}

#[derive(Clone, Debug)]
pub struct WaveState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub t: f64,
}

#[derive(Debug)]
pub struct WaveTrajectory {
    pub states: Vec<WaveState>,
    /// |g(v,v)(t) - g(v,v)(t0)| at each state
    pub norm_drift: Vec<f64>,
    pub flag: TrajectoryFlag,
    pub dim: usize,
}

impl WaveTrajectory {
    /// CSV export `t,u,v,x1..xn,norm_drift,flag`, one row per accepted step;
    /// same schema and flag codes as the main engine's trajectories
    /// (0 = ok, 1 = singularity halt, 2 = step underflow).
    pub fn to_csv(&self) -> String {
        let n = self.dim - 2;
        let mut out = String::from("t,u,v");
        for a in 1..=n {
            out.push_str(&format!(",x{a}"));
        }
        out.push_str(",norm_drift,flag\n");
        for (i, st) in self.states.iter().enumerate() {
            let last = i + 1 == self.states.len();
            let flag = match self.flag {
                TrajectoryFlag::SingularityReached(_) if last => 1,
                TrajectoryFlag::StepUnderflow(_) if last => 2,
                _ => 0,
            };
            let mut row = format!("{}", st.t);
            for c in &st.position {
                row.push_str(&format!(",{c}"));
            }
            row.push_str(&format!(",{},{flag}\n", self.norm_drift[i]));
            out.push_str(&row);
        }
        out
    }
}

fn wave_velocity_norm(spec: &PlaneWaveSpec, pos: &[f64], vel: &[f64]) -> Result<f64, WaveError> {
    let g = WaveCore::new(spec, pos)?.metric_values();
    let mut s = 0.0;
    for (i, gi) in g.iter().enumerate() {
        for (j, &gij) in gi.iter().enumerate() {
            s += gij * vel[i] * vel[j];
        }
    }
    Ok(s)
}

/// Integrate the wave geodesic equation forward to t_end (> init.t). The
/// equation is quadratic in the velocity, so the backward branch is the
/// forward branch with negated initial velocity.
pub fn wave_geodesic(
    spec: &PlaneWaveSpec,
    init: &WaveState,
    t_end: f64,
    tol: f64,
) -> Result<WaveTrajectory, WaveError> {
    let dim = spec.dim();
    if init.position.len() != dim {
        return Err(WaveError::DimensionMismatch(init.position.len(), dim));
    }
    if init.velocity.len() != dim {
        return Err(WaveError::DimensionMismatch(init.velocity.len(), dim));
    }
    let norm0 = wave_velocity_norm(spec, &init.position, &init.velocity)?;
    let mut y0 = init.position.clone();
    y0.extend_from_slice(&init.velocity);

    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (pos, vel) = y.split_at(dim);
        dy[..dim].copy_from_slice(vel);
        // past the guard the event has already fired; freeze to keep jets finite
        let acc = match WaveCore::new(spec, pos) {
            Ok(core) => core.geodesic_acceleration(vel),
            Err(_) => vec![0.0; dim],
        };
        dy[dim..].copy_from_slice(&acc);
    };
    let event = if spec.is_scale_invariant() {
        let side = init.position[U].signum();
        Some(move |_t: f64, y: &[f64]| side * y[U] - U_MIN)
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

    let mut states = vec![WaveState {
        position: init.position.clone(),
        velocity: init.velocity.clone(),
        t: init.t,
    }];
    for step in &sol.steps {
        let y = step.eval(step.t1());
        let (pos, vel) = y.split_at(dim);
        states.push(WaveState { position: pos.to_vec(), velocity: vel.to_vec(), t: step.t1() });
    }
    if let OdeStatus::Event(t) = sol.status {
        let (pos, vel) = sol.y_final.split_at(dim);
        states.push(WaveState { position: pos.to_vec(), velocity: vel.to_vec(), t });
    }
    let mut norm_drift = Vec::with_capacity(states.len());
    for s in &states {
        let nv = wave_velocity_norm(spec, &s.position, &s.velocity).unwrap_or(f64::NAN);
        norm_drift.push((nv - norm0).abs());
    }
    Ok(WaveTrajectory { states, norm_drift, flag, dim })
}
