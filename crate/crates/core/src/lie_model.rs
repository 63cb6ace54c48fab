//! The transvection-style Lie algebra attached to the family, its algebraic
//! diagnostics, the canonical-connection curvature split, a diagnostic
//! comparison against an upper-triangular matrix realization, and the
//! geodesic system of the totally geodesic w-leaf.
//!
//! Basis order: [A, w1, w2, z1, z2, x1, y1, ..., xn, yn], dim = 2n + 5,
//! where A is the holonomy generator and the rest are the coordinate
//! directions at the reference point p = (1, 0, ...). Structure constants
//! are exact rationals; every f64 input converts losslessly.

use crate::config::MetricSpec;
use crate::geometry::Geometry;
use crate::holonomy::canonical_a;
use crate::kahler::{build_s, kahler_form};
use crate::metric::{EngineError, Point, W1, W2};
use crate::ode::{self, OdeStatus, Options};
use crate::rational::{rat_from_f64, rat_i, row_basis, Rat};
use crate::tensor::{TensorValue, Variance};
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

/// index of the holonomy generator in the algebra basis
pub const ALG_A: usize = 0;

/// coordinate index -> algebra index
pub fn alg_of_coord(mu: usize) -> usize {
    mu + 1
}

#[derive(Clone, Debug)]
pub struct LieAlgebraG {
    pub n: usize,
    pub b_p: Rat,
    pub b0: Rat,
    pub dim: usize,
    pub labels: Vec<String>,
    /// c[(i*dim + j)*dim + k] = coefficient of e_k in [e_i, e_j]
    c: Vec<Rat>,
}

impl LieAlgebraG {
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    fn set(&mut self, i: usize, j: usize, terms: &[(usize, Rat)]) {
        for (k, v) in terms {
            self.c[(i * self.dim + j) * self.dim + k] = v.clone();
            self.c[(j * self.dim + i) * self.dim + k] = -v.clone();
        }
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Rat> {
        (0..self.dim).map(|k| self.c(i, j, k).clone()).collect()
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                for k in 0..self.dim {
                    let cv = self.c(i, j, k);
                    if !cv.is_zero() {
                        out[k] = &out[k] + &(cv * &x[i] * &y[j]);
                    }
                }
            }
        }
        out
    }

    /// Negative control: flip the sign of [w1, z1] (both orientations, so
    /// antisymmetry survives but the Jacobi identity does not).
    pub fn flip_bracket_sign(&mut self) {
        let (w1, z1) = (1, 3);
        for k in 0..self.dim {
            let idx = (w1 * self.dim + z1) * self.dim + k;
            self.c[idx] = -self.c[idx].clone();
            let idx = (z1 * self.dim + w1) * self.dim + k;
            self.c[idx] = -self.c[idx].clone();
        }
    }
}

/// Structure constants of the algebra over exact rationals. The brackets
/// pair the coordinate directions through the structure tensor at the
/// reference point and feed the curvature back through the generator A.
pub fn build_algebra(n: usize, b_p: f64, b0: f64) -> LieAlgebraG {
    let dim = 2 * n + 5;
    let b_p = rat_from_f64(b_p);
    let b0 = rat_from_f64(b0);
    let mut labels = vec!["A".into(), "w1".into(), "w2".into(), "z1".into(), "z2".into()];
    for a in 1..=n {
        labels.push(format!("x{a}"));
        labels.push(format!("y{a}"));
    }
    let mut alg = LieAlgebraG {
        n,
        b_p: b_p.clone(),
        b0: b0.clone(),
        dim,
        labels,
        c: vec![Rat::zero(); dim * dim * dim],
    };
    let (a, w1, w2, z1, z2) = (0usize, 1usize, 2usize, 3usize, 4usize);
    let two = rat_i(2);
    // A acts as the curvature generator on the coordinate block
    alg.set(a, w1, &[(z2, rat_i(1))]);
    alg.set(a, w2, &[(z1, rat_i(-1))]);
    // w-plane bracket carries the profile data
    let m2bp = -(&two * &b_p);
    let q = &two * &b_p - &b0 / &two;
    alg.set(w1, w2, &[(z2, m2bp), (a, q)]);
    // w-z block
    alg.set(w1, z1, &[(z1, rat_i(-1))]);
    alg.set(w2, z1, &[(z2, rat_i(1)), (a, rat_i(-2))]);
    alg.set(w1, z2, &[(z2, rat_i(-3)), (a, rat_i(2))]);
    alg.set(w2, z2, &[(z1, rat_i(1))]);
    // transverse block
    for aa in 0..n {
        let x = 5 + 2 * aa;
        let y = 6 + 2 * aa;
        alg.set(w1, x, &[(x, rat_i(-1))]);
        alg.set(w1, y, &[(y, rat_i(-1))]);
        alg.set(w2, x, &[(y, rat_i(-1))]);
        alg.set(w2, y, &[(x, rat_i(1))]);
        alg.set(x, y, &[(z2, rat_i(-2)), (a, rat_i(2))]);
    }
    alg
}

/// Max |Jacobi cyclic sum| over all basis triples, exact.
pub fn jacobi_check(alg: &LieAlgebraG) -> Rat {
    let mut worst = Rat::zero();
    let basis: Vec<Vec<Rat>> = (0..alg.dim)
        .map(|i| {
            let mut e = vec![Rat::zero(); alg.dim];
            e[i] = rat_i(1);
            e
        })
        .collect();
    for i in 0..alg.dim {
        for j in i + 1..alg.dim {
            for k in j + 1..alg.dim {
                let t1 = alg.bracket(&alg.bracket_basis(i, j), &basis[k]);
                let t2 = alg.bracket(&alg.bracket_basis(j, k), &basis[i]);
                let t3 = alg.bracket(&alg.bracket_basis(k, i), &basis[j]);
                for l in 0..alg.dim {
                    let r = (&t1[l] + &t2[l] + &t3[l]).abs();
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
    }
    worst
}

fn unit(dim: usize, i: usize) -> Vec<Rat> {
    let mut e = vec![Rat::zero(); dim];
    e[i] = rat_i(1);
    e
}

fn span_bracket(alg: &LieAlgebraG, a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut rows = Vec::new();
    for x in a {
        for y in b {
            let v = alg.bracket(x, y);
            if v.iter().any(|c| !c.is_zero()) {
                rows.push(v);
            }
        }
    }
    row_basis(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub solvable: bool,
    pub derived_length: usize,
    pub nilpotent: bool,
    pub lower_central_stable_dim: usize,
    pub nilradical_is_ideal: bool,
    pub nilradical_two_step: bool,
    /// probe directions with non-nilpotent adjoint action, out of the probes
    /// tried; all must pass for the nilradical to be maximal
    pub nilradical_maximality_probes: (usize, usize),
    pub heisenberg_ok: bool,
}

pub fn structure_diagnostics(alg: &LieAlgebraG) -> StructureReport {
    let dim = alg.dim;
    let full: Vec<Vec<Rat>> = (0..dim).map(|i| unit(dim, i)).collect();

    // derived series
    let mut derived = full.clone();
    let mut derived_length = 0usize;
    for step in 1..=dim + 1 {
        derived = span_bracket(alg, &derived, &derived);
        if derived.is_empty() {
            derived_length = step;
            break;
        }
    }
    let solvable = derived.is_empty();

    // lower central series
    let mut lcs = span_bracket(alg, &full, &full);
    let mut prev_dim = usize::MAX;
    while lcs.len() != prev_dim {
        prev_dim = lcs.len();
        lcs = span_bracket(alg, &full, &lcs);
    }
    let lower_central_stable_dim = lcs.len();
    let nilpotent = lower_central_stable_dim == 0;

    // candidate nilradical: everything without a w-component
    let nil_idx: Vec<usize> =
        std::iter::once(0).chain(3..dim).collect();
    let nil: Vec<Vec<Rat>> = nil_idx.iter().map(|&i| unit(dim, i)).collect();
    let mut nilradical_is_ideal = true;
    for i in 0..dim {
        for &j in &nil_idx {
            let v = alg.bracket_basis(i, j);
            if !v[1].is_zero() || !v[2].is_zero() {
                nilradical_is_ideal = false;
            }
        }
    }
    let n1 = span_bracket(alg, &nil, &nil);
    let nilradical_two_step = !n1.is_empty() || alg.n == 0;
    let n2 = span_bracket(alg, &nil, &n1);
    let nilradical_two_step = nilradical_two_step && n2.is_empty();

    // any direction with a w-part acts non-nilpotently on span{z1, z2, A},
    // so no nilpotent ideal can exceed the candidate; probe a spanning set
    let probes: [(i64, i64); 5] = [(1, 0), (0, 1), (1, 1), (1, -1), (2, -3)];
    let mut passed = 0usize;
    for (al, be) in probes {
        let mut v = vec![Rat::zero(); dim];
        v[1] = rat_i(al);
        v[2] = rat_i(be);
        // adjoint matrix, then its dim-th power
        let ad: Vec<Vec<Rat>> = (0..dim)
            .map(|j| alg.bracket(&v, &unit(dim, j)))
            .collect();
        // ad is stored column-major: ad[j] = [v, e_j]
        let mut power: Vec<Vec<Rat>> = ad.clone();
        for _ in 1..dim {
            let mut next = vec![vec![Rat::zero(); dim]; dim];
            for (j, col) in power.iter().enumerate() {
                for (k, ck) in col.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    for l in 0..dim {
                        next[j][l] = &next[j][l] + &(&ad[k][l] * ck);
                    }
                }
            }
            power = next;
        }
        if power.iter().flatten().any(|c| !c.is_zero()) {
            passed += 1;
        }
    }

    // Heisenberg block around B = z2 - A
    let mut b_vec = vec![Rat::zero(); dim];
    b_vec[4] = rat_i(1);
    b_vec[0] = rat_i(-1);
    let mut heisenberg_ok = alg.bracket(&b_vec, &b_vec).iter().all(Rat::is_zero);
    for aa in 0..alg.n {
        let x = unit(dim, 5 + 2 * aa);
        let y = unit(dim, 6 + 2 * aa);
        heisenberg_ok &= alg.bracket(&b_vec, &x).iter().all(Rat::is_zero);
        heisenberg_ok &= alg.bracket(&b_vec, &y).iter().all(Rat::is_zero);
        for bb in 0..alg.n {
            let xb = unit(dim, 5 + 2 * bb);
            let yb = unit(dim, 6 + 2 * bb);
            let want = if aa == bb {
                b_vec.iter().map(|c| c * rat_i(-2)).collect::<Vec<_>>()
            } else {
                vec![Rat::zero(); dim]
            };
            heisenberg_ok &= alg.bracket(&x, &yb) == want;
            heisenberg_ok &= alg.bracket(&x, &xb).iter().all(Rat::is_zero);
            heisenberg_ok &= alg.bracket(&y, &yb).iter().all(Rat::is_zero);
        }
    }

    StructureReport {
        solvable,
        derived_length,
        nilpotent,
        lower_central_stable_dim,
        nilradical_is_ideal,
        nilradical_two_step,
        nilradical_maximality_probes: (passed, probes.len()),
        heisenberg_ok,
    }
}

/// Curvature of the canonical connection, split off from the structure
/// tensor: R^S(X,Y) = [S_X, S_Y] - S_{S_X Y - S_Y X}, and the remainder
/// R~ = R - R^S, which collapses onto the generator A with coefficient
/// (b0/2) dw1^dw2 + 2 omega.
pub struct CanonicalCurvature {
    /// remainder endomorphisms, layout [rho][sigma][mu][nu]
    pub r_tilde: TensorValue,
    /// R^S against -2 g(., J.) x A
    pub rs_formula_residual: f64,
    /// remainder against its two-form expression
    pub decomposition_residual: f64,
}

pub fn canonical_curvature(
    spec: &MetricSpec,
    p: &Point,
) -> Result<CanonicalCurvature, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let s = build_s(spec, p)?;
    let omega = kahler_form(spec, p)?;
    let a_can = canonical_a(dim);
    let b0 = spec.profile.b0;

    // endomorphism of S along each basis direction
    let smat: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|mu| {
            (0..dim)
                .map(|l| (0..dim).map(|nu| s.get(&[l, mu, nu])).collect())
                .collect()
        })
        .collect();

    let mut r_tilde = TensorValue::zeros(
        dim,
        vec![Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower],
    );
    let mut rs_res = 0.0f64;
    let mut dec_res = 0.0f64;
    for mu in 0..dim {
        for nu in 0..dim {
            let (a, b) = (&smat[mu], &smat[nu]);
            // torsion-style argument of the S-subtraction
            let varg: Vec<f64> = (0..dim)
                .map(|k| s.get(&[k, mu, nu]) - s.get(&[k, nu, mu]))
                .collect();
            let w_pair = if (mu, nu) == (W1, W2) {
                1.0
            } else if (mu, nu) == (W2, W1) {
                -1.0
            } else {
                0.0
            };
            let coeff = 0.5 * b0 * w_pair + 2.0 * omega.get(&[mu, nu]);
            for rho in 0..dim {
                for sg in 0..dim {
                    let mut rs = 0.0;
                    for k in 0..dim {
                        rs += a[rho][k] * b[k][sg] - b[rho][k] * a[k][sg];
                        rs -= varg[k] * smat[k][rho][sg];
                    }
                    let formula = -2.0 * omega.get(&[mu, nu]) * a_can[rho][sg];
                    rs_res = rs_res.max((rs - formula).abs());
                    let rt = geo.r13_jet(rho, sg, mu, nu).value() - rs;
                    r_tilde.set(&[rho, sg, mu, nu], rt);
                    dec_res = dec_res.max((rt - coeff * a_can[rho][sg]).abs());
                }
            }
        }
    }
    Ok(CanonicalCurvature {
        r_tilde,
        rs_formula_residual: rs_res,
        decomposition_residual: dec_res,
    })
}

// ---------------------------------------------------------------------------
// matrix realization diagnostic

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub matches: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixRepReport {
    pub size: usize,
    pub linearity_residual: f64,
    pub isotropy_single_entry: bool,
    pub pairs: Vec<PairCheck>,
    pub n_match: usize,
    pub n_mismatch: usize,
}

/// The printed upper-triangular realization, as a linear rule in the
/// parameters (t, w1, w2, z1, z2, x_a, y_a); the one bare constant in the
/// source's last column cannot belong to a linear rule and is dropped.
pub fn rep_matrix(alg: &LieAlgebraG, params: &[f64]) -> Vec<Vec<Complex64>> {
    assert_eq!(params.len(), alg.dim);
    let n = alg.n;
    let m = 2 * n + 5;
    let lam = 2.0 * alg.b_p.to_f64().unwrap();
    let mu = 0.5 * alg.b0.to_f64().unwrap();
    let (t, w1, w2, z1, z2) = (params[0], params[1], params[2], params[3], params[4]);
    let cx = |re: f64, im: f64| Complex64::new(re, im);
    let mut mat = vec![vec![cx(0.0, 0.0); m]; m];
    mat[0][0] = cx(-2.0 * w1, 0.0);
    mat[0][1] = cx(2.0 * w2, 2.0 * w1);
    mat[0][2] = cx(2.0 * w2, 2.0 * w1);
    for a in 0..n {
        let (x, y) = (params[5 + 2 * a], params[6 + 2 * a]);
        mat[0][3 + 2 * a] = cx(0.0, -4.0 * y);
        mat[0][4 + 2 * a] = cx(0.0, -4.0 * x);
        let xr = 3 + 2 * a;
        let yr = 4 + 2 * a;
        mat[xr][xr] = cx(-w1, w2);
        mat[xr][m - 2] = cx(x, 0.0);
        mat[xr][m - 1] = cx(0.0, -x);
        mat[yr][yr] = cx(-w1, w2);
        mat[yr][m - 2] = cx(y, 0.0);
        mat[yr][m - 1] = cx(0.0, y);
    }
    mat[0][m - 2] = cx(2.0 * t + (lam - mu) * w2, 2.0 * (z1 - z2));
    mat[0][m - 1] = cx((mu - lam) * w1, 0.0);
    mat[1][1] = cx(-w1, w2);
    mat[1][m - 2] = cx(z1, -0.5 * mu * w2);
    mat[1][m - 1] = cx(0.0, 0.5 * mu * w1);
    mat[2][2] = cx(-w1, -w2);
    mat[2][m - 2] = cx(z2, -0.5 * mu * w2);
    mat[2][m - 1] = cx(z1, z2 - 0.5 * mu * w1);
    mat
}

fn cmat_max(m: &[Vec<Complex64>]) -> f64 {
    m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn matrix_rep_check(alg: &LieAlgebraG) -> MatrixRepReport {
    let dim = alg.dim;
    let m = 2 * alg.n + 5;
    let images: Vec<Vec<Vec<Complex64>>> = (0..dim)
        .map(|i| {
            let mut params = vec![0.0; dim];
            params[i] = 1.0;
            rep_matrix(alg, &params)
        })
        .collect();

    // linearity of the rule
    let mut lin = 0.0f64;
    for i in 0..dim {
        let mut params = vec![0.0; dim];
        params[i] = 2.0;
        let double = rep_matrix(alg, &params);
        for r in 0..m {
            for c in 0..m {
                lin = lin.max((double[r][c] - 2.0 * images[i][r][c]).norm());
            }
        }
    }

    // generator image: single entry 2 in the first row, last-but-one column
    let ia = &images[ALG_A];
    let mut isotropy = (ia[0][m - 2] - Complex64::new(2.0, 0.0)).norm() < 1e-12;
    for r in 0..m {
        for c in 0..m {
            if (r, c) != (0, m - 2) {
                isotropy &= ia[r][c].norm() < 1e-12;
            }
        }
    }

    let mut pairs = Vec::new();
    let (mut n_match, mut n_mismatch) = (0usize, 0usize);
    for i in 0..dim {
        for j in i + 1..dim {
            let mut lhs = vec![vec![Complex64::new(0.0, 0.0); m]; m];
            for r in 0..m {
                for c in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..m {
                        acc += images[i][r][k] * images[j][k][c]
                            - images[j][r][k] * images[i][k][c];
                    }
                    lhs[r][c] = acc;
                }
            }
            let mut rhs = vec![vec![Complex64::new(0.0, 0.0); m]; m];
            for k in 0..dim {
                let cf = alg.c(i, j, k).to_f64().unwrap();
                if cf == 0.0 {
                    continue;
                }
                for r in 0..m {
                    for c in 0..m {
                        rhs[r][c] += cf * images[k][r][c];
                    }
                }
            }
            let mut residual = 0.0f64;
            for r in 0..m {
                for c in 0..m {
                    residual = residual.max((lhs[r][c] - rhs[r][c]).norm());
                }
            }
            let scale = cmat_max(&lhs).max(cmat_max(&rhs)).max(1.0);
            let matches = residual <= 1e-9 * scale;
            if matches {
                n_match += 1;
            } else {
                n_mismatch += 1;
            }
            pairs.push(PairCheck { i, j, matches, residual });
        }
    }
    MatrixRepReport {
        size: m,
        linearity_residual: lin,
        isotropy_single_entry: isotropy,
        pairs,
        n_match,
        n_mismatch,
    }
}

// ---------------------------------------------------------------------------
// geodesics of the w-leaf

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum KFlag {
    Completed,
    /// trajectory escapes in finite time near the contained parameter
    BlowUp(f64),
    StepUnderflow(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct KGeodesicReport {
    pub k: f64,
    /// pole of the closed form x = k/(t - c); infinite when x starts at 0
    pub c: f64,
    pub ts: Vec<f64>,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub x_rel_err: f64,
    pub y_rel_err: f64,
    pub flag: KFlag,
}

impl KGeodesicReport {
    pub fn x_closed_form(&self, t: f64) -> f64 {
        if self.c.is_finite() {
            self.k / (t - self.c)
        } else {
            0.0
        }
    }
}

/// Integrates the reduced geodesic system
///   u' = -(uv + v^2)/k,  v' = -(uv + u^2)/k,  k = sqrt(|b_p|),
/// and checks the combined variable x = u + v against k/(t - c). A pole at
/// positive c reachable from the integration direction is the finite-time
/// escape that makes the singular metrics geodesically incomplete.
pub fn k_geodesic(b_p: f64, init: (f64, f64), t_end: f64, tol: f64) -> KGeodesicReport {
    assert!(b_p != 0.0, "the w-leaf system needs b(p) != 0");
    assert!(t_end != 0.0);
    let k = b_p.abs().sqrt();
    let (u0, v0) = init;
    let x0 = u0 + v0;
    let y0 = u0 - v0;
    let c = if x0 == 0.0 { f64::INFINITY } else { -k / x0 };

    let backward = t_end < 0.0;
    let sgn = if backward { -1.0 } else { 1.0 };
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (u, v) = (y[0], y[1]);
        dy[0] = -sgn * (u * v + v * v) / k;
        dy[1] = -sgn * (u * v + u * u) / k;
    };
    let opts = Options { rtol: tol, atol: tol, ..Default::default() };
    let sol = ode::solve(
        rhs,
        0.0,
        &[u0, v0],
        t_end.abs(),
        &opts,
        None::<fn(f64, &[f64]) -> f64>,
    );

    let tau_final = sol.t_final;
    let flag = match sol.status {
        OdeStatus::ReachedEnd => KFlag::Completed,
        OdeStatus::Event(tau) => KFlag::StepUnderflow(sgn * tau),
        OdeStatus::StepUnderflow(tau) => {
            let y = sol.sample(tau);
            if (y[0] + y[1]).abs() > 1e6 {
                KFlag::BlowUp(sgn * tau)
            } else {
                KFlag::StepUnderflow(sgn * tau)
            }
        }
    };

    let nsamp = 201usize;
    let mut ts = Vec::with_capacity(nsamp);
    let mut us = Vec::with_capacity(nsamp);
    let mut vs = Vec::with_capacity(nsamp);
    for i in 0..nsamp {
        let tau = tau_final * i as f64 / (nsamp - 1) as f64;
        let y = sol.sample(tau);
        ts.push(sgn * tau);
        us.push(y[0]);
        vs.push(y[1]);
    }

    // closed-form comparison on the first 90% of the covered interval
    let mut x_rel_err = 0.0f64;
    let mut y_rel_err = 0.0f64;
    for i in 0..nsamp {
        if (i as f64) > 0.9 * (nsamp - 1) as f64 {
            break;
        }
        let t = ts[i];
        let (x_num, y_num) = (us[i] + vs[i], us[i] - vs[i]);
        let (x_cf, y_cf) = if c.is_finite() {
            (k / (t - c), y0 * (t - c) / (-c))
        } else {
            (0.0, y0)
        };
        x_rel_err = x_rel_err.max((x_num - x_cf).abs() / x_cf.abs().max(1e-9));
        y_rel_err = y_rel_err.max((y_num - y_cf).abs() / y_cf.abs().max(1e-9));
    }

    KGeodesicReport { k, c, ts, us, vs, x_rel_err, y_rel_err, flag }
}

// ---------------------------------------------------------------------------
// export

#[derive(Serialize)]
struct ConstantEntry {
    i: usize,
    j: usize,
    k: usize,
    c: String,
}

/// JSON array of the nonzero structure constants, exact rational strings.
pub fn export_structure_constants(alg: &LieAlgebraG) -> String {
    let mut entries = Vec::new();
    for i in 0..alg.dim {
        for j in i + 1..alg.dim {
            for k in 0..alg.dim {
                let c = alg.c(i, j, k);
                if !c.is_zero() {
                    entries.push(ConstantEntry { i, j, k, c: c.to_string() });
                }
            }
        }
    }
    serde_json::to_string(&entries).expect("plain data serializes")
}
