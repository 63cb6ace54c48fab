//! Curvature endomorphisms, the infinitesimal holonomy span, and its
//! su(1,1) normal form.
//!
//! Every member of the family has a curvature operator supported on a single
//! line of endomorphisms, generated by the nilpotent map
//!
//!   A: dw1 |-> dz2,  dw2 |-> -dz1,  everything else |-> 0,
//!
//! scaled by half the Laplacian of the curvature profile. Higher covariant
//! derivatives of R are proportional to R (recurrence), so the infinitesimal
//! holonomy algebra never grows past that line. Restricted to the degenerate
//! plane field E = span{dw, dz} and written in a unitary frame, the generator
//! becomes a fixed nilpotent element of su(1,1).

use crate::geometry::{theta_covector, Geometry};
use crate::kahler::standard_j;
use crate::linalg::{mat_mul, max_abs_diff};
use crate::config::MetricSpec;
use crate::metric::{coeff_jets, xa, ya, EngineError, Point, W1, W2, Z1, Z2};
use num_complex::Complex64;
use serde::Serialize;

/// Relative singular-value threshold for span dimension decisions.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Entries below this are treated as cancellation residue when harvesting
/// candidate generators; keeps exact-flat spans at dimension zero even when
/// the zero arrives through floating cancellations.
const NOISE_FLOOR: f64 = 1e-12;

/// The canonical holonomy generator on the coordinate frame.
pub fn canonical_a(dim: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; dim]; dim];
    m[Z2][W1] = 1.0;
    m[Z1][W2] = -1.0;
    m
}

/// A span of endomorphisms: raw generators plus a rank-filtered basis.
#[derive(Clone, Debug)]
pub struct EndoSpan {
    pub generators: Vec<Vec<Vec<f64>>>,
    pub basis: Vec<Vec<Vec<f64>>>,
    /// true when brackets (and, where requested, curvature derivatives)
    /// added no new direction
    pub stabilized: bool,
}

impl EndoSpan {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn flatten(m: &[Vec<f64>]) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

fn mat_max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Greedy independence filter: keep a candidate iff it raises the numeric
/// rank of the flattened row set.
fn rank_filter(cands: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    // Gram-Schmidt with the residual measured against the candidate's own
    // norm; candidates arrive at wildly different scales, so a global
    // eigenvalue threshold would count an exact multiple as new rank.
    let frob = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut kept: Vec<Vec<Vec<f64>>> = Vec::new();
    for c in cands {
        let mut v = flatten(c);
        let norm0 = frob(&v);
        if norm0 <= NOISE_FLOOR {
            continue;
        }
        for _ in 0..2 {
            for b in &ortho {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let res = frob(&v);
        if res > RANK_REL_TOL * norm0 {
            for x in v.iter_mut() {
                *x /= res;
            }
            ortho.push(v);
            kept.push(c.clone());
        }
    }
    kept
}

fn brackets_of(basis: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for y in basis.iter().skip(i + 1) {
            let xy = mat_mul(x, y);
            let yx = mat_mul(y, x);
            let comm: Vec<Vec<f64>> = xy
                .iter()
                .zip(&yx)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p - q).collect())
                .collect();
            out.push(comm);
        }
    }
    out
}

/// Span of the curvature endomorphisms R(e_mu, e_nu) over all frame pairs.
pub fn curvature_endomorphisms(spec: &MetricSpec, p: &Point) -> Result<EndoSpan, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let mut generators = Vec::new();
    for mu in 0..dim {
        for nu in mu + 1..dim {
            let mut m = vec![vec![0.0; dim]; dim];
            for r in 0..dim {
                for s in 0..dim {
                    m[r][s] = geo.r13_jet(r, s, mu, nu).value();
                }
            }
            if mat_max_abs(&m) > NOISE_FLOOR {
                generators.push(m);
            }
        }
    }
    let basis = rank_filter(&generators);
    let with_brackets: Vec<_> = basis.iter().cloned().chain(brackets_of(&basis)).collect();
    let stabilized = rank_filter(&with_brackets).len() == basis.len();
    Ok(EndoSpan { generators, basis, stabilized })
}

/// Infinitesimal holonomy span at `p`, fed with curvature endomorphisms plus
/// derivative endomorphisms up to `max_order` (0, 1 via the first covariant
/// derivative, 2 via the second-derivative recurrence), closed under
/// brackets. `stabilized` records that nothing grew past order 0.
pub fn infinitesimal_holonomy(
    spec: &MetricSpec,
    p: &Point,
    max_order: usize,
) -> Result<EndoSpan, EngineError> {
    assert!(max_order <= 2, "curvature derivatives available to order 2 only");
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let m0 = curvature_endomorphisms(spec, p)?;
    let mut cands: Vec<Vec<Vec<f64>>> = m0.basis.clone();

    if max_order >= 1 {
        let nr = geo.nabla_riemann();
        let ginv = geo.metric_inverse().to_matrix();
        for al in 0..dim {
            for mu in 0..dim {
                for nu in mu + 1..dim {
                    let mut m = vec![vec![0.0; dim]; dim];
                    for sg in 0..dim {
                        for rho in 0..dim {
                            let mut acc = 0.0;
                            for tau in 0..dim {
                                acc += ginv[rho][tau] * nr.get(&[al, mu, nu, sg, tau]);
                            }
                            m[rho][sg] = acc;
                        }
                    }
                    if mat_max_abs(&m) > NOISE_FLOOR {
                        cands.push(m);
                    }
                }
            }
        }
    }
    if max_order >= 2 {
        // second derivatives obey nabla^2 R = (20 theta x theta
        // - 4 thetaJ x thetaJ) x R, so they only rescale the order-0 span
        let th = theta_covector(p, dim);
        let j = standard_j(spec.n);
        let mut thj = vec![0.0; dim];
        for nu in 0..dim {
            for al in 0..dim {
                thj[nu] += th[al] * j.matrix[al][nu];
            }
        }
        for al in [W1, W2] {
            for be in [W1, W2] {
                let c = 20.0 * th[al] * th[be] - 4.0 * thj[al] * thj[be];
                for m in &m0.basis {
                    let scaled: Vec<Vec<f64>> =
                        m.iter().map(|row| row.iter().map(|v| c * v).collect()).collect();
                    if mat_max_abs(&scaled) > NOISE_FLOOR {
                        cands.push(scaled);
                    }
                }
            }
        }
    }

    let mut basis = rank_filter(&cands);
    loop {
        let with_brackets: Vec<_> = basis.iter().cloned().chain(brackets_of(&basis)).collect();
        let closed = rank_filter(&with_brackets);
        if closed.len() == basis.len() {
            break;
        }
        basis = closed;
    }
    let stabilized = basis.len() == m0.basis.len();
    Ok(EndoSpan { generators: cands, basis, stabilized })
}

/// How the generator sits relative to E = span{dw, dz} and its metric
/// orthogonal complement.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceReport {
    pub e_dim: usize,
    pub e_perp_dim: usize,
    /// residual of A(E) outside span{dz1, dz2}
    pub a_e_in_z_span: f64,
    /// max |A v| over the orthogonal complement basis
    pub a_kills_e_perp: f64,
    /// max |g(v, e)| over complement basis v and e in E
    pub e_perp_is_orthogonal: f64,
}

pub fn invariant_subspaces(spec: &MetricSpec, p: &Point) -> Result<SubspaceReport, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let g = geo.metric().to_matrix();
    let span = curvature_endomorphisms(spec, p)?;
    let a = span.basis.first().cloned().unwrap_or_else(|| canonical_a(dim));

    let mut a_e_in_z = 0.0f64;
    for col in [W1, W2, Z1, Z2] {
        for (row, arow) in a.iter().enumerate() {
            if row != Z1 && row != Z2 {
                a_e_in_z = a_e_in_z.max(arow[col].abs());
            }
        }
    }

    // complement from the metric: the x/y directions need a z-shift by the
    // coupling values to clear their g(., dw) pairings
    let co = coeff_jets(spec, p)?;
    let mut eperp: Vec<Vec<f64>> = Vec::new();
    for aa in 0..spec.n {
        let r = co.r[aa].value();
        let s = co.s[aa].value();
        let mut vx = vec![0.0; dim];
        vx[xa(aa)] = 1.0;
        vx[Z1] = -r;
        vx[Z2] = -s;
        let mut vy = vec![0.0; dim];
        vy[ya(aa)] = 1.0;
        vy[Z1] = s;
        vy[Z2] = -r;
        eperp.push(vx);
        eperp.push(vy);
    }

    let mut ortho = 0.0f64;
    let mut kills = 0.0f64;
    for v in &eperp {
        for e in [W1, W2, Z1, Z2] {
            let pairing: f64 = v.iter().enumerate().map(|(i, vi)| vi * g[i][e]).sum();
            ortho = ortho.max(pairing.abs());
        }
        for arow in &a {
            let image: f64 = v.iter().zip(arow).map(|(vc, ac)| vc * ac).sum();
            kills = kills.max(image.abs());
        }
    }

    Ok(SubspaceReport {
        e_dim: 4,
        e_perp_dim: eperp.len(),
        a_e_in_z_span: a_e_in_z,
        a_kills_e_perp: kills,
        e_perp_is_orthogonal: ortho,
    })
}

/// The generator written in the unitary frame on E, before and after
/// clearing the 1/|b| scale.
#[derive(Clone, Debug)]
pub struct Su11Report {
    pub b: f64,
    pub sign: f64,
    pub raw: [[Complex64; 2]; 2],
    pub normal_form: [[Complex64; 2]; 2],
    /// consistency of the two coefficient solves (image components not used
    /// for the solve must be reproduced)
    pub frame_residual: f64,
    pub trace_abs: f64,
    pub square_max: f64,
    /// max entry of N^dagger H + H N for the indefinite form H
    pub membership: f64,
}

fn solve_in_frame(
    image: &[Complex64],
    sign: f64,
    k: f64,
) -> (Complex64, Complex64, f64) {
    // frame: W has components (1/k, -i/k) on (dw1, dw2);
    // Z = W - sign*k*(dz1 - i dz2). alpha W + beta Z reproduces the image.
    let beta = image[Z1] * (-sign / k);
    let alpha = image[W1] * k - beta;
    let mut res = (image[W2] - (alpha + beta) * Complex64::new(0.0, -1.0 / k)).norm();
    res = res.max((image[Z2] - beta * Complex64::new(0.0, sign * k)).norm());
    for (idx, c) in image.iter().enumerate() {
        if ![W1, W2, Z1, Z2].contains(&idx) {
            res = res.max(c.norm());
        }
    }
    (alpha, beta, res)
}

pub fn su11_normal_form(spec: &MetricSpec, p: &Point) -> Result<Su11Report, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let b = geo.g_jet(W1, W1).value();
    if b == 0.0 {
        return Err(EngineError::DegenerateBasis);
    }
    let sign = if b > 0.0 { 1.0 } else { -1.0 };
    let k = b.abs().sqrt();

    let a = canonical_a(dim);
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|r| (0..dim).map(|c| a[r][c] * v[c]).sum())
            .collect()
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut wv = vec![zero; dim];
    wv[W1] = Complex64::new(1.0 / k, 0.0);
    wv[W2] = Complex64::new(0.0, -1.0 / k);
    let mut zv = wv.clone();
    zv[Z1] = Complex64::new(-sign * k, 0.0);
    zv[Z2] = Complex64::new(0.0, sign * k);

    let (a_w, b_w, res_w) = solve_in_frame(&apply(&wv), sign, k);
    let (a_z, b_z, res_z) = solve_in_frame(&apply(&zv), sign, k);
    let raw = [[a_w, a_z], [b_w, b_z]];

    // verify the frame really is unitary for h(X, Y) = g(X, conj Y):
    // h(W,W) = 2 sign, h(W,Z) = 0, h(Z,Z) = -2 sign
    let g = geo.metric().to_matrix();
    let h = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        let mut acc = zero;
        for mu in 0..dim {
            for nu in 0..dim {
                acc += g[mu][nu] * x[mu] * y[nu].conj();
            }
        }
        acc
    };
    let mut frame_residual = res_w.max(res_z);
    frame_residual = frame_residual
        .max((h(&wv, &wv) - 2.0 * sign).norm())
        .max(h(&wv, &zv).norm())
        .max((h(&zv, &zv) + 2.0 * sign).norm());

    let babs = b.abs();
    let normal_form = [
        [raw[0][0] * babs, raw[0][1] * babs],
        [raw[1][0] * babs, raw[1][1] * babs],
    ];
    let trace_abs = (normal_form[0][0] + normal_form[1][1]).norm();
    let mut square_max = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let e = normal_form[r][0] * normal_form[0][c] + normal_form[r][1] * normal_form[1][c];
            square_max = square_max.max(e.norm());
        }
    }
    // membership in su(1,1): N^dagger H + H N = 0 for H = 2 sign diag(1,-1)
    let hform = [
        [Complex64::new(2.0 * sign, 0.0), zero],
        [zero, Complex64::new(-2.0 * sign, 0.0)],
    ];
    let mut membership = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let mut e = zero;
            for t in 0..2 {
                e += normal_form[t][r].conj() * hform[t][c] + hform[r][t] * normal_form[t][c];
            }
            membership = membership.max(e.norm());
        }
    }

    Ok(Su11Report {
        b,
        sign,
        raw,
        normal_form,
        frame_residual,
        trace_abs,
        square_max,
        membership,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyChecks {
    pub skew: f64,
    #[serde(rename = "commutes_J")]
    pub commutes_j: f64,
    pub nilpotent: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyReport {
    pub dim_m0: usize,
    pub stabilized: bool,
    /// entries as [re, im] rows; absent when g(dw1, dw1) = 0 at the point
    pub normal_form: Option<Vec<Vec<[f64; 2]>>>,
    pub checks: HolonomyChecks,
}

pub fn holonomy_report(
    spec: &MetricSpec,
    p: &Point,
    max_order: usize,
) -> Result<HolonomyReport, EngineError> {
    let hol = infinitesimal_holonomy(spec, p, max_order)?;
    let m0 = curvature_endomorphisms(spec, p)?;
    let geo = Geometry::new(spec, p)?;
    let dim = geo.dim;
    let g = geo.metric().to_matrix();
    let j = standard_j(spec.n);

    let gen = hol
        .basis
        .first()
        .cloned()
        .unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
    let mut skew = 0.0f64;
    for mu in 0..dim {
        for nu in 0..dim {
            let mut acc = 0.0;
            for r in 0..dim {
                acc += gen[r][mu] * g[r][nu] + g[mu][r] * gen[r][nu];
            }
            skew = skew.max(acc.abs());
        }
    }
    let commutes_j = max_abs_diff(&mat_mul(&gen, &j.matrix), &mat_mul(&j.matrix, &gen));
    let nilpotent = mat_max_abs(&mat_mul(&gen, &gen));

    let normal_form = match su11_normal_form(spec, p) {
        Ok(rep) => Some(
            rep.normal_form
                .iter()
                .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        ),
        Err(EngineError::DegenerateBasis) => None,
        Err(e) => return Err(e),
    };

    Ok(HolonomyReport {
        dim_m0: m0.dim(),
        stabilized: hol.stabilized,
        normal_form,
        checks: HolonomyChecks { skew, commutes_j, nilpotent },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use rand::{Rng, SeedableRng};

    fn sing(n: usize, b0: f64, eps: &str, hs: &[&str], gauge: &str) -> MetricSpec {
        let mut cfg = format!(
            "n = {n}\nepsilons = {eps}\nprofile.kind = singular_scale_invariant\nprofile.b0 = {b0}\ngauge = {gauge}\n"
        );
        for (i, h) in hs.iter().enumerate() {
            cfg.push_str(&format!("coupling.{} = {}\n", i + 1, h));
        }
        parse_config(&cfg).unwrap()
    }

    fn cw(n: usize, b0: f64, eps: &str, hs: &[&str], gauge: &str) -> MetricSpec {
        let mut cfg = format!(
            "n = {n}\nepsilons = {eps}\nprofile.kind = cahen_wallach_analog\nprofile.b0 = {b0}\ngauge = {gauge}\n"
        );
        for (i, h) in hs.iter().enumerate() {
            cfg.push_str(&format!("coupling.{} = {}\n", i + 1, h));
        }
        parse_config(&cfg).unwrap()
    }

    fn rand_point(rng: &mut impl Rng, dim: usize) -> Point {
        let mut c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = rng.gen_range(0.5..2.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        c[W1] = r * phi.cos();
        c[W2] = r * phi.sin();
        Point(c)
    }

    #[test]
    fn curvature_span_is_one_line_with_pinned_generator() {
        // profile b0/(4 rho^2): half the profile Laplacian at (1,0) is b0/2
        let spec = sing(0, 4.0, "", &[], "literal");
        let p = Point::at_w(1.0, 0.0, 4);
        let span = curvature_endomorphisms(&spec, &p).unwrap();
        assert_eq!(span.generators.len(), 1); // only the (w1, w2) pair survives
        assert_eq!(span.dim(), 1);
        assert!(span.stabilized);
        let gen = &span.basis[0];
        let mut expected = canonical_a(4);
        for row in expected.iter_mut() {
            for v in row.iter_mut() {
                *v *= 2.0;
            }
        }
        assert!(max_abs_diff(gen, &expected) <= 1e-12);
        // image inside kernel: the generator squares to zero on the nose
        assert_eq!(mat_max_abs(&mat_mul(gen, gen)), 0.0);
    }

    #[test]
    fn flat_span_is_zero_dimensional() {
        let flat = parse_config("n = 0\nepsilons =\nprofile.kind = flat\n").unwrap();
        let p = Point::at_w(0.3, -1.2, 4);
        let span = curvature_endomorphisms(&flat, &p).unwrap();
        assert_eq!(span.dim(), 0);
        let hol = infinitesimal_holonomy(&flat, &p, 2).unwrap();
        assert_eq!(hol.dim(), 0);
        assert!(hol.stabilized);
        // flat profile with a coupling in the compensated gauge: curvature
        // cancels only through floats, the noise floor must still report 0
        let flatc = parse_config(
            "n = 1\nepsilons = +1\nprofile.kind = flat\ncoupling.1 = (0,0) (1,0)\ngauge = compensated\n",
        )
        .unwrap();
        let q = Point(vec![0.7, -0.4, 0.2, 1.0, -0.3, 0.9]);
        assert_eq!(curvature_endomorphisms(&flatc, &q).unwrap().dim(), 0);
    }

    #[test]
    fn derivative_endomorphisms_never_enlarge_the_span() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let a = sing(0, 4.0, "", &[], "literal");
        let b = sing(1, -2.0, "+1", &[], "literal");
        for order in [1usize, 2] {
            let p = Point::at_w(1.0, 0.0, 4);
            let hol = infinitesimal_holonomy(&a, &p, order).unwrap();
            assert_eq!(hol.dim(), 1);
            assert!(hol.stabilized);
        }
        for _ in 0..10 {
            let p = rand_point(&mut rng, 6);
            let hol = infinitesimal_holonomy(&b, &p, 2).unwrap();
            assert_eq!(hol.dim(), 1);
            assert!(hol.stabilized);
        }
    }

    #[test]
    fn holonomy_line_across_the_family() {
        let specs = [
            sing(0, 4.0, "", &[], "literal"),
            sing(1, -2.0, "+1", &["(0,0) (1,0)"], "compensated"),
            cw(1, 2.0, "-1", &["(0,0) (1,1)"], "compensated"),
            cw(0, -3.0, "", &[], "literal"),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(72);
        let j4 = standard_j(0);
        // canonical generator commutes with J on the nose
        assert_eq!(
            max_abs_diff(
                &mat_mul(&canonical_a(4), &j4.matrix),
                &mat_mul(&j4.matrix, &canonical_a(4))
            ),
            0.0
        );
        for k in 0..50 {
            let spec = &specs[k % specs.len()];
            let p = rand_point(&mut rng, spec.dim());
            let span = curvature_endomorphisms(spec, &p).unwrap();
            assert_eq!(span.dim(), 1, "dim at sample {k}");
            let rep = holonomy_report(spec, &p, 1).unwrap();
            assert_eq!(rep.dim_m0, 1);
            assert!(rep.stabilized);
            assert!(rep.checks.skew <= 1e-12, "skew {}", rep.checks.skew);
            let f = span.basis[0][Z2][W1].abs();
            assert!(rep.checks.commutes_j <= 1e-13 * f.max(1.0));
            assert_eq!(rep.checks.nilpotent, 0.0);
        }
    }

    #[test]
    fn orthogonal_complement_is_killed_by_the_generator() {
        // coupling h = w: the complement needs genuine z-shifts
        let spec = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let p = Point::at_w(1.0, 0.0, 6);
        let rep = invariant_subspaces(&spec, &p).unwrap();
        assert_eq!(rep.e_dim, 4);
        assert_eq!(rep.e_perp_dim, 2);
        assert_eq!(rep.a_e_in_z_span, 0.0);
        assert_eq!(rep.a_kills_e_perp, 0.0);
        assert_eq!(rep.e_perp_is_orthogonal, 0.0);

        let small = sing(0, 4.0, "", &[], "literal");
        let rep0 = invariant_subspaces(&small, &Point::at_w(0.5, 0.5, 4)).unwrap();
        assert_eq!(rep0.e_perp_dim, 0);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        let coupled = sing(2, -2.0, "+1,-1", &["(0,0) (1,0)", "(0,0) (0,1) (2,0)"], "compensated");
        for _ in 0..20 {
            let q = rand_point(&mut rng, 8);
            let r = invariant_subspaces(&coupled, &q).unwrap();
            assert_eq!(r.e_perp_dim, 4);
            assert!(r.a_e_in_z_span <= 1e-12);
            assert!(r.a_kills_e_perp <= 1e-12);
            assert!(r.e_perp_is_orthogonal <= 1e-12);
        }
    }

    #[test]
    fn su11_normal_form_is_the_fixed_nilpotent() {
        // b = 4/(4 * 0.5) = 2 at (0.5, 0.5): raw carries 1/|b|, normal does not
        let spec = sing(0, 4.0, "", &[], "literal");
        let rep = su11_normal_form(&spec, &Point::at_w(0.5, 0.5, 4)).unwrap();
        assert!((rep.b - 2.0).abs() <= 1e-12);
        assert_eq!(rep.sign, 1.0);
        for (r, row) in [[1.0, 1.0], [-1.0, -1.0]].iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!((rep.normal_form[r][c] - Complex64::new(0.0, *want)).norm() <= 1e-10);
                assert!((rep.raw[r][c] - Complex64::new(0.0, want / 2.0)).norm() <= 1e-10);
            }
        }
        assert!(rep.frame_residual <= 1e-10);
        assert!(rep.trace_abs <= 1e-10);
        assert!(rep.square_max <= 1e-10);
        assert!(rep.membership <= 1e-10);

        // negative profile: sign flips the whole matrix
        let neg = sing(0, -4.0, "", &[], "literal");
        let rep = su11_normal_form(&neg, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert_eq!(rep.sign, -1.0);
        for (r, row) in [[1.0, 1.0], [-1.0, -1.0]].iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!((rep.normal_form[r][c] - Complex64::new(0.0, -want)).norm() <= 1e-10);
            }
        }
        assert!(rep.membership <= 1e-10);

        // quadratic profile at (2,0): b = 1
        let rep = su11_normal_form(&cw(0, 1.0, "", &[], "literal"), &Point::at_w(2.0, 0.0, 4)).unwrap();
        assert!((rep.b - 1.0).abs() <= 1e-12);
        assert!((rep.normal_form[0][0] - Complex64::new(0.0, 1.0)).norm() <= 1e-10);

        let flat = parse_config("n = 0\nepsilons =\nprofile.kind = flat\n").unwrap();
        assert_eq!(
            su11_normal_form(&flat, &Point::at_w(1.0, 0.0, 4)).unwrap_err(),
            EngineError::DegenerateBasis
        );
    }

    #[test]
    fn report_serializes_with_stable_keys() {
        let spec = sing(0, 4.0, "", &[], "literal");
        let rep = holonomy_report(&spec, &Point::at_w(1.0, 0.0, 4), 1).unwrap();
        let js = serde_json::to_string(&rep).unwrap();
        assert!(js.contains("\"dim_m0\":1"));
        assert!(js.contains("\"commutes_J\""));
        assert!(js.contains("\"normal_form\":[["));
        let back: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(back["checks"]["nilpotent"], 0.0);
        assert_eq!(back["normal_form"][0][0][1], 1.0);
    }
}
