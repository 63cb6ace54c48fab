//! Flat pseudo-hyper-Hermitian models on R^{4n} = H^n: the standard
//! anticommuting triple (J1, J2, J3) with J1 J2 = J3 on a +/- block metric of
//! signature (4p, 4q), the linear-type structure tensor built from a null
//! vector, and the wedge-constraint argument that forces flatness — the rank
//! computations done in exact rational arithmetic, since kernel dimension is
//! an integer claim.

use num_traits::Zero;
use serde::Serialize;

use crate::rational::{rank, rat_from_f64, Rat};

/// Left multiplication by i, j, k on one quaternion block (a,b,c,d).
const L1: [[f64; 4]; 4] = [
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
];
const L2: [[f64; 4]; 4] = [
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];
const L3: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QkError {
    #[error("xi must be nonzero and null, got g(xi,xi) = {0}")]
    NonIsotropicXi(f64),
}

#[derive(Debug, Clone)]
pub struct QuaternionTriple {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    /// J1, J2, J3 as dense matrices
    pub j: [Vec<Vec<f64>>; 3],
    /// diagonal of the flat metric: +1 on the first 4p slots, -1 on the rest
    pub metric: Vec<f64>,
}

pub fn build_flat_model(p: usize, q: usize) -> QuaternionTriple {
    assert!(p + q >= 2, "need dim 4(p+q) >= 8");
    let n = p + q;
    let dim = 4 * n;
    let block = |l: &[[f64; 4]; 4]| -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; dim]; dim];
        for blk in 0..n {
            for i in 0..4 {
                for k in 0..4 {
                    m[4 * blk + i][4 * blk + k] = l[i][k];
                }
            }
        }
        m
    };
    let mut metric = vec![1.0; dim];
    for slot in metric.iter_mut().skip(4 * p) {
        *slot = -1.0;
    }
    QuaternionTriple { p, q, dim, j: [block(&L1), block(&L2), block(&L3)], metric }
}

impl QuaternionTriple {
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.dim).map(|i| self.metric[i] * x[i] * y[i]).sum()
    }

    pub fn apply_j(&self, a: usize, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self.j[a][i][k] * x[k]).sum())
            .collect()
    }

    /// omega_a(e_m, e_n) = g(e_m, J_a e_n)
    pub fn omega(&self, a: usize) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|m| (0..self.dim).map(|nu| self.metric[m] * self.j[a][m][nu]).collect())
            .collect()
    }

    /// entry of the 4-form sum_a omega_a ^ omega_a, with
    /// (al^al)(X,Y,Z,W) = 2[al(X,Y)al(Z,W) - al(X,Z)al(Y,W) + al(X,W)al(Y,Z)]
    pub fn four_form_entry(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let mut v = 0.0;
        for a in 0..3 {
            let o = self.omega(a);
            v += 2.0 * (o[i][j] * o[k][l] - o[i][k] * o[j][l] + o[i][l] * o[j][k]);
        }
        v
    }

    /// replace (J1,J2,J3) by the SO(3)-rotated triple sum_b R_ab J_b
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> QuaternionTriple {
        let mut out = self.clone();
        for a in 0..3 {
            for i in 0..self.dim {
                for k in 0..self.dim {
                    out.j[a][i][k] =
                        (0..3).map(|b| r[a][b] * self.j[b][i][k]).sum();
                }
            }
        }
        out
    }
}

/// Linear-type structure tensor of a null xi with the quaternionic terms:
/// S_X Y = g(X,Y) xi - g(Y,xi) X + sum_a (g(J_a Y, xi) J_a X - g(X, J_a Y) J_a xi).
pub struct QkStructure {
    pub dim: usize,
    pub xi: Vec<f64>,
    jxi: [Vec<f64>; 3],
}

pub fn qk_structure_s(triple: &QuaternionTriple, xi: &[f64]) -> Result<QkStructure, QkError> {
    let norm = triple.inner(xi, xi);
    let nonzero = xi.iter().any(|&c| c != 0.0);
    if norm.abs() > 1e-12 || !nonzero {
        return Err(QkError::NonIsotropicXi(norm));
    }
    Ok(QkStructure {
        dim: triple.dim,
        xi: xi.to_vec(),
        jxi: [triple.apply_j(0, xi), triple.apply_j(1, xi), triple.apply_j(2, xi)],
    })
}

impl QkStructure {
    pub fn apply(&self, triple: &QuaternionTriple, x: &[f64], y: &[f64]) -> Vec<f64> {
        let gxy = triple.inner(x, y);
        let gyxi = triple.inner(y, &self.xi);
        let mut out: Vec<f64> =
            (0..self.dim).map(|i| gxy * self.xi[i] - gyxi * x[i]).collect();
        for a in 0..3 {
            let jy = triple.apply_j(a, y);
            let jx = triple.apply_j(a, x);
            let gjy_xi = triple.inner(&jy, &self.xi);
            let gx_jy = triple.inner(x, &jy);
            for i in 0..self.dim {
                out[i] += gjy_xi * jx[i] - gx_jy * self.jxi[a][i];
            }
        }
        out
    }

    /// the displayed derivative rule: nabla_X xi = g(X,xi) xi - sum_a g(X, J_a xi) J_a xi
    pub fn nabla_xi(&self, triple: &QuaternionTriple, x: &[f64]) -> Vec<f64> {
        let gx_xi = triple.inner(x, &self.xi);
        let mut out: Vec<f64> = (0..self.dim).map(|i| gx_xi * self.xi[i]).collect();
        for a in 0..3 {
            let gx_jxi = triple.inner(x, &self.jxi[a]);
            for i in 0..self.dim {
                out[i] -= gx_jxi * self.jxi[a][i];
            }
        }
        out
    }
}

/// Directional derivative of the rule v |-> nabla xi at v in the direction w:
/// the polarization of the quadratic expression above.
fn nabla_rule(triple: &QuaternionTriple, v: &[f64], x: &[f64]) -> Vec<f64> {
    let gxv = triple.inner(x, v);
    let mut out: Vec<f64> = (0..triple.dim).map(|i| gxv * v[i]).collect();
    for a in 0..3 {
        let jv = triple.apply_j(a, v);
        let gx_jv = triple.inner(x, &jv);
        for i in 0..triple.dim {
            out[i] -= gx_jv * jv[i];
        }
    }
    out
}

fn nabla_rule_polarized(
    triple: &QuaternionTriple,
    v: &[f64],
    w: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let gxv = triple.inner(x, v);
    let gxw = triple.inner(x, w);
    let mut out: Vec<f64> = (0..triple.dim).map(|i| gxw * v[i] + gxv * w[i]).collect();
    for a in 0..3 {
        let jv = triple.apply_j(a, v);
        let jw = triple.apply_j(a, w);
        let gx_jv = triple.inner(x, &jv);
        let gx_jw = triple.inner(x, &jw);
        for i in 0..triple.dim {
            out[i] -= gx_jw * jv[i] + gx_jv * jw[i];
        }
    }
    out
}

/// Commutator curvature of the derivative rule on the flat model,
/// R(X,Y) xi = D_X(nabla_Y xi) - D_Y(nabla_X xi) along a field realizing the
/// rule to first order; zero is the integrability statement.
pub fn rule_commutator(triple: &QuaternionTriple, xi: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
    let qx = nabla_rule(triple, xi, x);
    let qy = nabla_rule(triple, xi, y);
    let t1 = nabla_rule_polarized(triple, xi, &qx, y);
    let t2 = nabla_rule_polarized(triple, xi, &qy, x);
    t1.iter().zip(&t2).map(|(a, b)| a - b).collect()
}

/// The constraint system {F in Lambda^2 : c ^ F = 0 for each covector c},
/// with covectors theta and theta o J_a for the first j_count structures.
pub struct WedgeSystem {
    pub dim: usize,
    pub theta: Vec<f64>,
    pub constraints: Vec<Vec<Rat>>,
}

impl WedgeSystem {
    pub fn new(triple: &QuaternionTriple, theta: &[f64], j_count: usize) -> WedgeSystem {
        assert!(j_count <= 3);
        let dim = triple.dim;
        let mut constraints = vec![theta.iter().map(|&t| rat_from_f64(t)).collect::<Vec<Rat>>()];
        for a in 0..j_count {
            constraints.push(
                (0..dim)
                    .map(|nu| {
                        (0..dim)
                            .map(|m| rat_from_f64(theta[m]) * rat_from_f64(triple.j[a][m][nu]))
                            .sum()
                    })
                    .collect(),
            );
        }
        WedgeSystem { dim, theta: theta.to_vec(), constraints }
    }

    /// covectors are independent iff their exact rank equals their count
    pub fn constraint_rank(&self) -> usize {
        rank(&self.constraints)
    }
}

fn pair_index(dim: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![usize::MAX; dim]; dim];
    let mut c = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            idx[i][j] = c;
            c += 1;
        }
    }
    idx
}

/// Exact kernel dimension over Lambda^2: each covector c contributes the rows
/// (c ^ F)_{ijk} = c_i F_{jk} - c_j F_{ik} + c_k F_{ij} for i < j < k.
pub fn wedge_kernel_dimension(system: &WedgeSystem) -> usize {
    let dim = system.dim;
    let pairs = dim * (dim - 1) / 2;
    let pidx = pair_index(dim);
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for c in &system.constraints {
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    let mut row = vec![Rat::zero(); pairs];
                    row[pidx[j][k]] += c[i].clone();
                    row[pidx[i][k]] -= c[j].clone();
                    row[pidx[i][j]] += c[k].clone();
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    pairs - rank(&rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelDims {
    pub full: usize,
    pub theta_only: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    /// (4p, 4q)
    pub signature: [usize; 2],
    pub kernel_dims: KernelDims,
    /// the scalar nu multiplying g(., xi) is forced to zero by nondegeneracy
    pub nu_forced_zero: bool,
    pub forces_flat: bool,
    /// same kernel argument with nu = 0 known a priori
    pub hyper_kahler_forces_flat: bool,
}

/// Chain the flatness argument: (i) nu * g(X, xi) = 0 for all X with xi
/// nonzero null and g nondegenerate forces nu = 0 (a rank-one linear solve);
/// (ii) the four wedge constraints leave only the zero 2-form. `j_count < 3`
/// runs the same chain with a truncated constraint set as a control.
pub fn flatness_report_with_constraints(
    p: usize,
    q: usize,
    xi: &[f64],
    j_count: usize,
) -> Result<FlatnessReport, QkError> {
    let triple = build_flat_model(p, q);
    let norm = triple.inner(xi, xi);
    if norm.abs() > 1e-12 || xi.iter().all(|&c| c == 0.0) {
        return Err(QkError::NonIsotropicXi(norm));
    }
    let theta: Vec<f64> = (0..triple.dim).map(|i| triple.metric[i] * xi[i]).collect();

    // (i) the linear system nu * theta_mu = 0 over the rationals
    let nu_system: Vec<Vec<Rat>> = theta.iter().map(|&t| vec![rat_from_f64(t)]).collect();
    let nu_forced_zero = rank(&nu_system) == 1;

    // (ii) the wedge kernel with and without the J-constraints
    let full = wedge_kernel_dimension(&WedgeSystem::new(&triple, &theta, j_count));
    let theta_only = wedge_kernel_dimension(&WedgeSystem::new(&triple, &theta, 0));

    Ok(FlatnessReport {
        signature: [4 * p, 4 * q],
        kernel_dims: KernelDims { full, theta_only },
        nu_forced_zero,
        forces_flat: nu_forced_zero && full == 0,
        hyper_kahler_forces_flat: full == 0,
    })
}

pub fn flatness_report(p: usize, q: usize, xi: &[f64]) -> Result<FlatnessReport, QkError> {
    flatness_report_with_constraints(p, q, xi, 3)
}
