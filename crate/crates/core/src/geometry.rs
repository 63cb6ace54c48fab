//! Pointwise tensor calculus for the metric family: Christoffel symbols,
//! curvature, covariant derivatives, scalar invariants, Jacobi operators.
//!
//! Everything is computed generically from jets of the component matrix via
//! the Levi-Civita formula; the structural closed forms (which symbols can be
//! nonzero, the single-component curvature) are asserted in tests, never
//! assumed by the computation.
//!
//! Conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z;
//! R4(X,Y,Z,W) = g(R(X,Y)Z, W), stored [X][Y][Z][W];
//! Ricci(Y,Z) = trace of X -> R(X,Y)Z;
//! (nabla R)[a][x][y][z][w] = (nabla_a R4)(x,y,z,w).

use crate::config::MetricSpec;
use crate::jets::Jet2;
use crate::metric::{coeff_jets, CoeffJets, EngineError, Point, W1, W2, Z1, Z2};
use crate::tensor::{TensorValue, Variance};

fn dpart(j: Jet2, dir: usize) -> Jet2 {
    // coefficients depend on (w1, w2) only; all other derivatives vanish
    if dir < 2 {
        j.d(dir)
    } else {
        Jet2::ZERO
    }
}

/// Jets of g, g^{-1}, and the Christoffel symbols: enough for connection-level
/// work (geodesics, transport) without paying for curvature assembly.
pub struct JetCore {
    pub dim: usize,
    pub coeffs: CoeffJets,
    pub g: Vec<Jet2>,
    pub ginv: Vec<Jet2>,
    pub gamma: Vec<Jet2>,
}

/// All jet-level tensors of one metric family member at one point.
pub struct Geometry {
    pub dim: usize,
    pub coeffs: CoeffJets,
    g: Vec<Jet2>,
    ginv: Vec<Jet2>,
    gamma: Vec<Jet2>,
    r13: Vec<Jet2>,
    r4: Vec<Jet2>,
}

impl JetCore {
    pub fn new(spec: &MetricSpec, p: &Point) -> Result<JetCore, EngineError> {
        let c = coeff_jets(spec, p)?;
        let dim = spec.dim();
        let i2 = |a: usize, b: usize| a * dim + b;

        let mut g = vec![Jet2::ZERO; dim * dim];
        let one = Jet2::constant(1.0);
        g[i2(W1, W1)] = c.gww;
        g[i2(W2, W2)] = c.gww;
        g[i2(W1, Z1)] = one;
        g[i2(Z1, W1)] = one;
        g[i2(W2, Z2)] = one;
        g[i2(Z2, W2)] = one;
        for a in 0..spec.n {
            let (x, y) = (crate::metric::xa(a), crate::metric::ya(a));
            let e = Jet2::constant(spec.epsilons[a]);
            g[i2(x, W1)] = c.r[a];
            g[i2(W1, x)] = c.r[a];
            g[i2(y, W2)] = c.r[a];
            g[i2(W2, y)] = c.r[a];
            g[i2(x, W2)] = c.s[a];
            g[i2(W2, x)] = c.s[a];
            g[i2(y, W1)] = -c.s[a];
            g[i2(W1, y)] = -c.s[a];
            g[i2(x, x)] = e;
            g[i2(y, y)] = e;
        }

        // closed-form inverse, as jets
        let mut ginv = vec![Jet2::ZERO; dim * dim];
        let mut bb = -c.gww;
        for a in 0..spec.n {
            bb = bb + (c.r[a] * c.r[a] + c.s[a] * c.s[a]).scale(spec.epsilons[a]);
        }
        ginv[i2(W1, Z1)] = one;
        ginv[i2(Z1, W1)] = one;
        ginv[i2(W2, Z2)] = one;
        ginv[i2(Z2, W2)] = one;
        ginv[i2(Z1, Z1)] = bb;
        ginv[i2(Z2, Z2)] = bb;
        for a in 0..spec.n {
            let (x, y) = (crate::metric::xa(a), crate::metric::ya(a));
            let e = spec.epsilons[a];
            let (rr, ss) = (c.r[a].scale(-e), c.s[a].scale(e));
            ginv[i2(Z1, x)] = rr;
            ginv[i2(x, Z1)] = rr;
            ginv[i2(Z1, y)] = ss;
            ginv[i2(y, Z1)] = ss;
            ginv[i2(Z2, x)] = -ss;
            ginv[i2(x, Z2)] = -ss;
            ginv[i2(Z2, y)] = rr;
            ginv[i2(y, Z2)] = rr;
            ginv[i2(x, x)] = Jet2::constant(1.0 / e);
            ginv[i2(y, y)] = Jet2::constant(1.0 / e);
        }

        let i3 = |a: usize, b: usize, cc: usize| (a * dim + b) * dim + cc;
        let mut gamma = vec![Jet2::ZERO; dim * dim * dim];
        for mu in 0..dim {
            for nu in mu..dim {
                // dg[sigma] = d_mu g_{sigma nu} + d_nu g_{sigma mu} - d_sigma g_{mu nu}
                let mut dg = vec![Jet2::ZERO; dim];
                for (sigma, slot) in dg.iter_mut().enumerate() {
                    *slot = dpart(g[i2(sigma, nu)], mu) + dpart(g[i2(sigma, mu)], nu)
                        - dpart(g[i2(mu, nu)], sigma);
                }
                for lam in 0..dim {
                    let mut acc = Jet2::ZERO;
                    for (sigma, &dgs) in dg.iter().enumerate() {
                        let gi = ginv[i2(lam, sigma)];
                        if gi.max_abs() != 0.0 && dgs.max_abs() != 0.0 {
                            acc = acc + gi * dgs;
                        }
                    }
                    let v = acc.scale(0.5);
                    gamma[i3(lam, mu, nu)] = v;
                    gamma[i3(lam, nu, mu)] = v;
                }
            }
        }
        Ok(JetCore { dim, coeffs: c, g, ginv, gamma })
    }

    /// Christoffel values only: acceleration^l = -Gamma^l_{mn} v^m v^n.
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
                    let ga = self.gamma[(l * d + m) * d + n];
                    s += ga.value() * v[m] * v[n];
                }
            }
            *slot = -s;
        }
        acc
    }

    /// d/dt of a transported vector e along velocity v: -Gamma(v, e).
    pub fn transport_derivative(&self, v: &[f64], e: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (l, slot) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for m in 0..d {
                if v[m] == 0.0 {
                    continue;
                }
                for n in 0..d {
                    s += self.gamma[(l * d + m) * d + n].value() * v[m] * e[n];
                }
            }
            *slot = -s;
        }
        out
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

impl Geometry {
    pub fn new(spec: &MetricSpec, p: &Point) -> Result<Geometry, EngineError> {
        let JetCore { dim, coeffs: c, g, ginv, gamma } = JetCore::new(spec, p)?;
        let i2 = |a: usize, b: usize| a * dim + b;
        let i3 = |a: usize, b: usize, cc: usize| (a * dim + b) * dim + cc;
        let i4 = |a: usize, b: usize, cc: usize, d: usize| ((a * dim + b) * dim + cc) * dim + d;
        let mut r13 = vec![Jet2::ZERO; dim * dim * dim * dim];
        for mu in 0..dim {
            for nu in mu + 1..dim {
                for rho in 0..dim {
                    for sigma in 0..dim {
                        let mut tot = dpart(gamma[i3(rho, nu, sigma)], mu)
                            - dpart(gamma[i3(rho, mu, sigma)], nu);
                        for lam in 0..dim {
                            let a = gamma[i3(rho, mu, lam)];
                            let b = gamma[i3(lam, nu, sigma)];
                            if a.max_abs() != 0.0 && b.max_abs() != 0.0 {
                                tot = tot + a * b;
                            }
                            let a = gamma[i3(rho, nu, lam)];
                            let b = gamma[i3(lam, mu, sigma)];
                            if a.max_abs() != 0.0 && b.max_abs() != 0.0 {
                                tot = tot - a * b;
                            }
                        }
                        r13[i4(rho, sigma, mu, nu)] = tot;
                        r13[i4(rho, sigma, nu, mu)] = -tot;
                    }
                }
            }
        }

        let mut r4 = vec![Jet2::ZERO; dim * dim * dim * dim];
        for mu in 0..dim {
            for nu in mu + 1..dim {
                for sigma in 0..dim {
                    for tau in 0..dim {
                        let mut acc = Jet2::ZERO;
                        for rho in 0..dim {
                            let gt = g[i2(tau, rho)];
                            let rr = r13[i4(rho, sigma, mu, nu)];
                            if gt.max_abs() != 0.0 && rr.max_abs() != 0.0 {
                                acc = acc + gt * rr;
                            }
                        }
                        r4[i4(mu, nu, sigma, tau)] = acc;
                        r4[i4(nu, mu, sigma, tau)] = -acc;
                    }
                }
            }
        }

        Ok(Geometry { dim, coeffs: c, g, ginv, gamma, r13, r4 })
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

    pub fn g_jet(&self, a: usize, b: usize) -> Jet2 {
        self.g[self.i2(a, b)]
    }
    pub fn ginv_jet(&self, a: usize, b: usize) -> Jet2 {
        self.ginv[self.i2(a, b)]
    }
    pub fn gamma_jet(&self, l: usize, m: usize, n: usize) -> Jet2 {
        self.gamma[self.i3(l, m, n)]
    }
    pub fn r13_jet(&self, r: usize, s: usize, m: usize, n: usize) -> Jet2 {
        self.r13[self.i4(r, s, m, n)]
    }
    pub fn r4_jet(&self, x: usize, y: usize, z: usize, w: usize) -> Jet2 {
        self.r4[self.i4(x, y, z, w)]
    }

    pub fn metric(&self) -> TensorValue {
        self.rank2_values(&self.g, Variance::Lower)
    }
    pub fn metric_inverse(&self) -> TensorValue {
        self.rank2_values(&self.ginv, Variance::Upper)
    }

    fn rank2_values(&self, src: &[Jet2], v: Variance) -> TensorValue {
        let mut t = TensorValue::zeros(self.dim, vec![v, v]);
        for (i, j) in src.iter().enumerate() {
            t.data[i] = j.value();
        }
        t
    }

    pub fn christoffel(&self) -> TensorValue {
        let mut t = TensorValue::zeros(
            self.dim,
            vec![Variance::Upper, Variance::Lower, Variance::Lower],
        );
        for (i, j) in self.gamma.iter().enumerate() {
            t.data[i] = j.value();
        }
        t
    }

    pub fn riemann(&self) -> TensorValue {
        let mut t = TensorValue::zeros(self.dim, vec![Variance::Lower; 4]);
        for (i, j) in self.r4.iter().enumerate() {
            t.data[i] = j.value();
        }
        t
    }

    pub fn riemann13(&self) -> TensorValue {
        let mut t = TensorValue::zeros(
            self.dim,
            vec![Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower],
        );
        for (i, j) in self.r13.iter().enumerate() {
            t.data[i] = j.value();
        }
        t
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
                            let mut v = if al < 2 {
                                self.r4[self.i4(x, y, z, w)].deriv(1 - al, al)
                            } else {
                                0.0
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

    /// Covariant derivative of an all-lower tensor field given as a closure
    /// over points, by central differences in (w1, w2) plus connection terms.
    pub fn covariant_derivative_fd<F>(&self, p: &Point, field: F, h: f64) -> TensorValue
    where
        F: Fn(&Point) -> TensorValue,
    {
        let t0 = field(p);
        assert!(t0.variance.iter().all(|&v| v == Variance::Lower));
        let d = self.dim;
        let rank = t0.rank();
        let mut out = TensorValue::zeros(d, vec![Variance::Lower; rank + 1]);
        let mut partials: Vec<TensorValue> = Vec::with_capacity(2);
        for al in 0..2 {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp.0[al] += h;
            pm.0[al] -= h;
            let (fp, fm) = (field(&pp), field(&pm));
            let mut dt = TensorValue::zeros(d, vec![Variance::Lower; rank]);
            for i in 0..dt.data.len() {
                dt.data[i] = (fp.data[i] - fm.data[i]) / (2.0 * h);
            }
            partials.push(dt);
        }
        let mut idx = vec![0usize; rank + 1];
        loop {
            let al = idx[0];
            let mut v = if al < 2 { partials[al].get(&idx[1..]) } else { 0.0 };
            for slot in 0..rank {
                let mut inner = idx[1..].to_vec();
                for k in 0..d {
                    inner[slot] = k;
                    v -= self.gamma[self.i3(k, al, idx[1 + slot])].value() * t0.get(&inner);
                }
            }
            out.set(&idx, v);
            // odometer
            let mut carry = rank;
            loop {
                idx[carry] += 1;
                if idx[carry] < d {
                    break;
                }
                idx[carry] = 0;
                if carry == 0 {
                    return out;
                }
                carry -= 1;
            }
        }
    }

    /// Jacobi operator J(X): Y -> R(Y, X)X, as a (1,1) matrix.
    pub fn jacobi_operator(&self, x: &[f64]) -> TensorValue {
        let d = self.dim;
        let mut t = TensorValue::zeros(d, vec![Variance::Upper, Variance::Lower]);
        for rho in 0..d {
            for mu in 0..d {
                let mut acc = 0.0;
                for nu in 0..d {
                    if x[nu] == 0.0 {
                        continue;
                    }
                    for sigma in 0..d {
                        if x[sigma] == 0.0 {
                            continue;
                        }
                        acc += self.r13[self.i4(rho, sigma, mu, nu)].value() * x[nu] * x[sigma];
                    }
                }
                t.set(&[rho, mu], acc);
            }
        }
        t
    }

    /// Fixed catalog of polynomial curvature invariants up to the requested
    /// derivative order (0, 1, or 2). All vanish on this family.
    pub fn scalar_invariants(
        &self,
        spec: &MetricSpec,
        p: &Point,
        order: u8,
    ) -> Vec<(&'static str, f64)> {
        let gi = self.metric_inverse();
        let r4 = self.riemann();
        let mut up = r4.clone();
        for k in 0..4 {
            up = up.contract_slot(k, &gi);
        }
        let kretschmann: f64 = r4.data.iter().zip(&up.data).map(|(a, b)| a * b).sum();

        let ric = self.ricci();
        let ric_up = ric.contract_slot(0, &gi).contract_slot(1, &gi);
        let ricci_square: f64 = ric.data.iter().zip(&ric_up.data).map(|(a, b)| a * b).sum();
        let mut scalar_curv = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                scalar_curv += gi.get(&[a, b]) * ric.get(&[a, b]);
            }
        }

        let mut out = vec![
            ("kretschmann", kretschmann),
            ("ricci_square", ricci_square),
            ("scalar_curvature", scalar_curv),
        ];
        if order >= 1 {
            let nr = self.nabla_riemann();
            let mut nr_up = nr.clone();
            for k in 0..5 {
                nr_up = nr_up.contract_slot(k, &gi);
            }
            let sq: f64 = nr.data.iter().zip(&nr_up.data).map(|(a, b)| a * b).sum();
            out.push(("nabla_riemann_square", sq));
        }
        if order >= 2 {
            let spec = spec.clone();
            let nr2 = self.covariant_derivative_fd(
                p,
                |q| Geometry::new(&spec, q).expect("interior point").nabla_riemann(),
                1e-4,
            );
            // contract (nabla^2 R)_{ab cdef} with R^{cdef} and trace g^{ab}
            let mut val = 0.0;
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let gab = gi.get(&[a, b]);
                    if gab == 0.0 {
                        continue;
                    }
                    for c in 0..self.dim {
                        for d in 0..self.dim {
                            for e in 0..self.dim {
                                for f in 0..self.dim {
                                    val += gab
                                        * nr2.get(&[a, b, c, d, e, f])
                                        * up.get(&[c, d, e, f]);
                                }
                            }
                        }
                    }
                }
            }
            out.push(("nabla2_riemann_dot_riemann", val));
        }
        out
    }
}

// spec-facing free functions

pub fn christoffel(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    let core = JetCore::new(spec, p)?;
    let mut t = TensorValue::zeros(
        core.dim,
        vec![Variance::Upper, Variance::Lower, Variance::Lower],
    );
    for (i, j) in core.gamma.iter().enumerate() {
        t.data[i] = j.value();
    }
    Ok(t)
}

pub fn riemann(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    Ok(Geometry::new(spec, p)?.riemann())
}

pub fn ricci(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    Ok(Geometry::new(spec, p)?.ricci())
}

pub fn nabla_riemann(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    Ok(Geometry::new(spec, p)?.nabla_riemann())
}

pub fn scalar_invariants(
    spec: &MetricSpec,
    p: &Point,
    order: u8,
) -> Result<Vec<(&'static str, f64)>, EngineError> {
    Ok(Geometry::new(spec, p)?.scalar_invariants(spec, p, order))
}

pub fn jacobi_operator(
    spec: &MetricSpec,
    p: &Point,
    x: &[f64],
) -> Result<TensorValue, EngineError> {
    Ok(Geometry::new(spec, p)?.jacobi_operator(x))
}

/// The recurrence one-form of the scale-invariant profile:
/// theta = -(w1 dw1 + w2 dw2)/rho^2.
pub fn theta_covector(p: &Point, dim: usize) -> Vec<f64> {
    let mut th = vec![0.0; dim];
    let r2 = p.rho2();
    th[W1] = -p.w1() / r2;
    th[W2] = -p.w2() / r2;
    th
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, MetricSpec};
    use crate::linalg::lu_inverse;
    use crate::metric::{metric_components, xa, ya};
    use rand::{Rng, SeedableRng};

    fn sing(n: usize, b0: f64, eps: &str, couplings: &[&str], gauge: &str) -> MetricSpec {
        let mut cfg = format!(
            "n = {n}\nepsilons = {eps}\nprofile.kind = singular_scale_invariant\nprofile.b0 = {b0}\ngauge = {gauge}\n"
        );
        for (i, c) in couplings.iter().enumerate() {
            cfg.push_str(&format!("coupling.{} = {}\n", i + 1, c));
        }
        parse_config(&cfg).unwrap()
    }

    fn rand_point(rng: &mut impl Rng, dim: usize) -> Point {
        Point::at_w(
            rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            dim,
        )
    }

    fn spec_zoo() -> Vec<MetricSpec> {
        vec![
            sing(0, 4.0, "", &[], "literal"),
            sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal"),
            sing(1, -2.0, "-1", &["(1,-1) (2,0.5) (0,1)"], "literal"),
            sing(2, 3.0, "-1,+1", &["(0,0) (2,-1)", "(0,0) (0,0) (0,1.5)"], "compensated"),
            parse_config(
                "n = 1\nepsilons = -1\nprofile.kind = cahen_wallach_analog\nprofile.b0 = 2\ncoupling.1 = (0,0) (1,1)\n",
            )
            .unwrap(),
            parse_config("n = 1\nepsilons = +1\nprofile.kind = flat\ncoupling.1 = (0,0) (1,0)\n")
                .unwrap(),
        ]
    }

    #[test]
    fn christoffel_pinned_values() {
        // n=1, h(w)=w, eps=+1, Singular(4) at (1,0):
        // r = w1, s = -w2, b = 1/rho^2
        let spec = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let ga = christoffel(&spec, &Point::at_w(1.0, 0.0, 6)).unwrap();
        let (x, y) = (xa(0), ya(0));
        assert!((ga.get(&[x, W1, W1]) - 1.0).abs() < 1e-14);
        assert!(ga.get(&[y, W1, W1]).abs() < 1e-14);
        assert!((ga.get(&[x, W2, W2]) - -1.0).abs() < 1e-14);
        assert!(ga.get(&[y, W2, W2]).abs() < 1e-14);
        assert!(ga.get(&[x, W1, W2]).abs() < 1e-14);
        assert!((ga.get(&[y, W1, W2]) - 1.0).abs() < 1e-14);
        // z-symbols with the coupling back-reaction included
        assert!((ga.get(&[Z1, W1, W1]) - -2.0).abs() < 1e-13);
        assert!(ga.get(&[Z2, W1, W1]).abs() < 1e-13);
        assert!((ga.get(&[Z1, W2, W2]) - 2.0).abs() < 1e-13);
        assert!(ga.get(&[Z2, W2, W2]).abs() < 1e-13);
        assert!(ga.get(&[Z1, W1, W2]).abs() < 1e-13);
        assert!((ga.get(&[Z2, W1, W2]) - -2.0).abs() < 1e-13);
    }

    #[test]
    fn christoffel_closed_form_everywhere() {
        // generic Levi-Civita output must equal the closed forms:
        //   Gamma^{x a}_{11} = eps d1 r,  Gamma^{y a}_{11} = -eps d1 s,
        //   Gamma^{x a}_{22} = eps d2 s,  Gamma^{y a}_{22} = eps d2 r,
        //   Gamma^{x a}_{12} = eps (d2 r + d1 s)/2, Gamma^{y a}_{12} = eps (d1 r - d2 s)/2,
        //   Gamma^{z1}_{11} = d1 b/2 - sum eps (r d1 r + s d1 s)
        //   Gamma^{z2}_{11} = -d2 b/2 + sum eps (r d1 s - s d1 r)
        //   Gamma^{z1}_{22} = -d1 b/2 + sum eps (r d1 r + s d1 s)
        //   Gamma^{z2}_{22} = d2 b/2 - sum eps (r d1 s - s d1 r)
        //   Gamma^{z1}_{12} = d2 b/2 - sum eps (r d1 s - s d1 r)
        //   Gamma^{z2}_{12} = d1 b/2 - sum eps (r d1 r + s d1 s)
        // (b here is the literal g_ww entry; valid under Cauchy-Riemann)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        for spec in spec_zoo() {
            for _ in 0..10 {
                let p = rand_point(&mut rng, spec.dim());
                let geo = Geometry::new(&spec, &p).unwrap();
                let c = &geo.coeffs;
                let ga = geo.christoffel();
                let b = c.gww;
                let (db1, db2) = (b.deriv(1, 0), b.deriv(0, 1));
                let mut rr1 = 0.0; // sum eps (r d1 r + s d1 s)
                let mut rs1 = 0.0; // sum eps (r d1 s - s d1 r)
                for a in 0..spec.n {
                    let e = spec.epsilons[a];
                    let (r, s) = (c.r[a], c.s[a]);
                    rr1 += e * (r.value() * r.deriv(1, 0) + s.value() * s.deriv(1, 0));
                    rs1 += e * (r.value() * s.deriv(1, 0) - s.value() * r.deriv(1, 0));
                    let x = xa(a);
                    let y = ya(a);
                    let tol = 1e-12;
                    assert!((ga.get(&[x, W1, W1]) - e * r.deriv(1, 0)).abs() < tol);
                    assert!((ga.get(&[y, W1, W1]) - -e * s.deriv(1, 0)).abs() < tol);
                    assert!((ga.get(&[x, W2, W2]) - e * s.deriv(0, 1)).abs() < tol);
                    assert!((ga.get(&[y, W2, W2]) - e * r.deriv(0, 1)).abs() < tol);
                    assert!(
                        (ga.get(&[x, W1, W2]) - e * 0.5 * (r.deriv(0, 1) + s.deriv(1, 0))).abs()
                            < tol
                    );
                    assert!(
                        (ga.get(&[y, W1, W2]) - e * 0.5 * (r.deriv(1, 0) - s.deriv(0, 1))).abs()
                            < tol
                    );
                }
                let tol = 1e-11;
                assert!((ga.get(&[Z1, W1, W1]) - (0.5 * db1 - rr1)).abs() < tol);
                assert!((ga.get(&[Z2, W1, W1]) - (-0.5 * db2 + rs1)).abs() < tol);
                assert!((ga.get(&[Z1, W2, W2]) - (-0.5 * db1 + rr1)).abs() < tol);
                assert!((ga.get(&[Z2, W2, W2]) - (0.5 * db2 - rs1)).abs() < tol);
                assert!((ga.get(&[Z1, W1, W2]) - (0.5 * db2 - rs1)).abs() < tol);
                assert!((ga.get(&[Z2, W1, W2]) - (0.5 * db1 - rr1)).abs() < tol);
                // no w-output symbols, no symbols with a non-w lower index
                for m in 0..spec.dim() {
                    for nn in 0..spec.dim() {
                        assert!(ga.get(&[W1, m, nn]).abs() < 1e-12);
                        assert!(ga.get(&[W2, m, nn]).abs() < 1e-12);
                        if m >= 2 {
                            for l in 0..spec.dim() {
                                assert!(ga.get(&[l, m, nn]).abs() < 1e-11, "Gamma^{l}_({m},{nn})");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn broken_cauchy_riemann_creates_mixed_symbols() {
        let mut spec = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        spec.couplings[0].break_cauchy_riemann();
        let ga = christoffel(&spec, &Point::at_w(0.8, 0.45, 6)).unwrap();
        let mut worst = 0.0f64;
        for m in 2..6 {
            for nn in 0..6 {
                for l in 0..6 {
                    worst = worst.max(ga.get(&[l, m, nn]).abs());
                }
            }
        }
        assert!(worst > 0.1, "mixed symbols stayed zero ({worst})");
    }

    #[test]
    fn christoffel_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(103);
        let h = 1e-5;
        for spec in spec_zoo() {
            let p = rand_point(&mut rng, spec.dim());
            let ga = christoffel(&spec, &p).unwrap();
            let d = spec.dim();
            let g0 = metric_components(&spec, &p).unwrap().to_matrix();
            let gi = lu_inverse(&g0);
            // dg[k][i][j] by central differences in every coordinate direction
            let mut dg = vec![vec![vec![0.0; d]; d]; d];
            for (k, dgk) in dg.iter_mut().enumerate() {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp.0[k] += h;
                pm.0[k] -= h;
                let gp = metric_components(&spec, &pp).unwrap().to_matrix();
                let gm = metric_components(&spec, &pm).unwrap().to_matrix();
                for i in 0..d {
                    for j in 0..d {
                        dgk[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                    }
                }
            }
            for lam in 0..d {
                for m in 0..d {
                    for nn in 0..d {
                        let mut acc = 0.0;
                        for s in 0..d {
                            acc += gi[lam][s] * (dg[m][s][nn] + dg[nn][s][m] - dg[s][m][nn]);
                        }
                        assert!(
                            (0.5 * acc - ga.get(&[lam, m, nn])).abs() < 1e-6,
                            "Gamma^{lam}_({m},{nn})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_pinned_values() {
        let free = sing(0, 4.0, "", &[], "literal");
        let r = riemann(&free, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert!((r.get(&[W1, W2, W1, W2]) - 2.0).abs() < 1e-12);
        let r = riemann(&free, &Point::at_w(2.0, 0.0, 4)).unwrap();
        assert!((r.get(&[W1, W2, W1, W2]) - 0.125).abs() < 1e-12);

        // literal gauge with coupling h = w, eps = +1: the curvature profile is
        // b_eff = b - |h|^2, so at (1,0) with b0 = 4 the component cancels to 0
        let lit = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let r = riemann(&lit, &Point::at_w(1.0, 0.0, 6)).unwrap();
        assert!(r.get(&[W1, W2, W1, W2]).abs() < 1e-12);
        // compensated gauge restores the declared profile's curvature
        let comp = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "compensated");
        let r = riemann(&comp, &Point::at_w(1.0, 0.0, 6)).unwrap();
        assert!((r.get(&[W1, W2, W1, W2]) - 2.0).abs() < 1e-12);

        let flat = parse_config("n = 0\nepsilons =\nprofile.kind = flat\n").unwrap();
        let r = riemann(&flat, &Point::at_w(0.3, -0.7, 4)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn riemann_equals_half_laplacian_of_effective_profile() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
        for spec in spec_zoo() {
            for _ in 0..10 {
                let p = rand_point(&mut rng, spec.dim());
                let geo = Geometry::new(&spec, &p).unwrap();
                let want = 0.5 * geo.coeffs.b_eff().laplacian();
                let got = geo.r4_jet(W1, W2, W1, W2).value();
                assert!((got - want).abs() < 1e-10, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn riemann_single_component_structure() {
        // every nonzero slot is a symmetry image of (w1 w2 w1 w2)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(109);
        for spec in spec_zoo() {
            let p = rand_point(&mut rng, spec.dim());
            let geo = Geometry::new(&spec, &p).unwrap();
            let r = geo.riemann();
            let d = spec.dim();
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        for w in 0..d {
                            let ww = [x, y, z, w].iter().all(|&i| i < 2);
                            if !ww {
                                assert!(
                                    r.get(&[x, y, z, w]).abs() < 1e-10,
                                    "R[{x}{y}{z}{w}] = {}",
                                    r.get(&[x, y, z, w])
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_symmetries_and_first_bianchi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(113);
        for spec in spec_zoo() {
            for _ in 0..5 {
                let p = rand_point(&mut rng, spec.dim());
                let r = riemann(&spec, &p).unwrap();
                let d = spec.dim();
                let tol = 1e-11;
                for x in 0..d {
                    for y in 0..d {
                        for z in 0..d {
                            for w in 0..d {
                                let v = r.get(&[x, y, z, w]);
                                assert!((v + r.get(&[y, x, z, w])).abs() < tol);
                                assert!((v + r.get(&[x, y, w, z])).abs() < tol);
                                assert!((v - r.get(&[z, w, x, y])).abs() < tol);
                                let cyc =
                                    v + r.get(&[y, z, x, w]) + r.get(&[z, x, y, w]);
                                assert!(cyc.abs() < tol);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ricci_vanishes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(127);
        for spec in spec_zoo() {
            for _ in 0..5 {
                let p = rand_point(&mut rng, spec.dim());
                assert!(ricci(&spec, &p).unwrap().max_abs() < 1e-10);
            }
        }
        // pinned spec instances
        let a = sing(0, 1.0, "", &[], "literal");
        assert!(ricci(&a, &Point::at_w(1.0, 0.0, 4)).unwrap().max_abs() < 1e-10);
        // Ricci-flatness is robust even against a broken Cauchy-Riemann pairing
        let mut m = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        m.couplings[0].break_cauchy_riemann();
        assert!(ricci(&m, &Point::at_w(0.8, 0.45, 6)).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn nabla_riemann_recurrence_and_symmetric_cases() {
        // singular profile without couplings (any gauge) and with couplings in
        // the compensated gauge: nabla R = 4 theta (x) R
        let cases = [
            sing(0, 4.0, "", &[], "literal"),
            sing(1, -2.0, "-1", &["(1,-1) (2,0.5)"], "compensated"),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(131);
        for spec in &cases {
            for _ in 0..5 {
                let p = rand_point(&mut rng, spec.dim());
                let geo = Geometry::new(spec, &p).unwrap();
                let nr = geo.nabla_riemann();
                let r = geo.riemann();
                let th = theta_covector(&p, spec.dim());
                let mut worst = 0.0f64;
                for (i, v) in nr.data.iter().enumerate() {
                    let al = i / r.data.len();
                    let rest = i % r.data.len();
                    worst = worst.max((v - 4.0 * th[al] * r.data[rest]).abs());
                }
                assert!(worst <= 1e-9, "recurrence residual {worst}");
            }
        }
        // pinned: (nabla_{w1} R)_{w1 w2 w1 w2} = -8 at (1,0), b0 = 4
        let spec = sing(0, 4.0, "", &[], "literal");
        let nr = nabla_riemann(&spec, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert!((nr.get(&[W1, W1, W2, W1, W2]) - -8.0).abs() < 1e-11);

        // CW analog is locally symmetric, flat is trivially so
        let cw = parse_config(
            "n = 1\nepsilons = -1\nprofile.kind = cahen_wallach_analog\nprofile.b0 = 2\ncoupling.1 = (0,0) (1,1)\ngauge = compensated\n",
        )
        .unwrap();
        let p = Point::at_w(0.6, -1.1, 6);
        assert!(nabla_riemann(&cw, &p).unwrap().max_abs() < 1e-10);

        // literal gauge with couplings shifts the curvature profile, so the
        // declared-profile recurrence must NOT hold: documented negative control
        let lit = sing(1, -2.0, "-1", &["(1,-1) (2,0.5)"], "literal");
        let p = Point::at_w(0.9, 0.4, 6);
        let geo = Geometry::new(&lit, &p).unwrap();
        let nr = geo.nabla_riemann();
        let r = geo.riemann();
        let th = theta_covector(&p, 6);
        let mut worst = 0.0f64;
        for (i, v) in nr.data.iter().enumerate() {
            let al = i / r.data.len();
            worst = worst.max((v - 4.0 * th[al] * r.data[i % r.data.len()]).abs());
        }
        assert!(worst > 1e-2, "literal-gauge coupling should break the declared recurrence");
    }

    #[test]
    fn second_bianchi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(137);
        for spec in spec_zoo() {
            let p = rand_point(&mut rng, spec.dim());
            let nr = nabla_riemann(&spec, &p).unwrap();
            let d = spec.dim();
            let mut worst = 0.0f64;
            for al in 0..d {
                for x in 0..d {
                    for y in 0..d {
                        for z in 0..d {
                            for w in 0..d {
                                let cyc = nr.get(&[al, x, y, z, w])
                                    + nr.get(&[x, y, al, z, w])
                                    + nr.get(&[y, al, x, z, w]);
                                worst = worst.max(cyc.abs());
                            }
                        }
                    }
                }
            }
            assert!(worst <= 1e-9, "second Bianchi residual {worst}");
        }
    }

    #[test]
    fn invariants_all_vanish() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(139);
        for spec in spec_zoo() {
            let p = rand_point(&mut rng, spec.dim());
            for (name, v) in scalar_invariants(&spec, &p, 2).unwrap() {
                assert!(v.abs() <= 1e-9, "{name} = {v}");
            }
        }
        // spec-pinned points
        let spec = sing(0, 4.0, "", &[], "literal");
        for (_, v) in scalar_invariants(&spec, &Point::at_w(1.0, 0.0, 4), 1).unwrap() {
            assert!(v.abs() <= 1e-9);
        }
        for (_, v) in scalar_invariants(&spec, &Point::at_w(0.6, 0.8, 4), 1).unwrap() {
            assert!(v.abs() <= 1e-9);
        }
    }

    #[test]
    fn jacobi_operator_matrices() {
        let spec = sing(0, 4.0, "", &[], "literal");
        let p = Point::at_w(1.0, 0.0, 4);
        let geo = Geometry::new(&spec, &p).unwrap();
        let mut z1 = vec![0.0; 4];
        z1[Z1] = 1.0;
        assert_eq!(geo.jacobi_operator(&z1).max_abs(), 0.0);
        let mut w1 = vec![0.0; 4];
        w1[W1] = 1.0;
        let j = geo.jacobi_operator(&w1);
        // J(dw1) maps dw2 -> -(b0 / 2 rho^4) dz2 = -2 dz2, everything else -> 0
        assert!((j.get(&[Z2, W2]) - -2.0).abs() < 1e-12);
        let mut rest = 0.0f64;
        for r in 0..4 {
            for m in 0..4 {
                if (r, m) != (Z2, W2) {
                    rest = rest.max(j.get(&[r, m]).abs());
                }
            }
        }
        assert!(rest < 1e-12);

        // J(dx a) = 0
        let coupled = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let geo = Geometry::new(&coupled, &Point::at_w(1.0, 0.0, 6)).unwrap();
        let mut ex = vec![0.0; 6];
        ex[xa(0)] = 1.0;
        assert!(geo.jacobi_operator(&ex).max_abs() < 1e-12);
    }

    #[test]
    fn jacobi_operators_two_step_nilpotent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(149);
        for spec in spec_zoo() {
            let p = rand_point(&mut rng, spec.dim());
            let geo = Geometry::new(&spec, &p).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..spec.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let j = geo.jacobi_operator(&x).to_matrix();
                let j2 = crate::linalg::mat_mul(&j, &j);
                let worst = j2.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(worst < 1e-9, "J(X)^2 residual {worst}");
            }
        }
    }
}
