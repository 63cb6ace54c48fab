//! The constant complex structure J, the Kähler form, the degenerate
//! homogeneous structure tensor S with its isotropic field ξ and closed
//! 1-form θ, and the identity battery for the canonical connection ∇ − S.

use crate::config::MetricSpec;
use crate::geometry::Geometry;
use crate::jets::Jet2;
use crate::metric::{EngineError, Point, W1, W2, Z1, Z2};
use crate::tensor::{TensorValue, Variance};

/// Constant complex structure pairing consecutive coordinates:
/// J∂w¹=∂w², J∂z¹=∂z², J∂xᵃ=∂yᵃ (and minus back).
#[derive(Clone, Debug)]
pub struct ComplexStructure {
    pub matrix: Vec<Vec<f64>>,
}

impl ComplexStructure {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }
}

pub fn standard_j(n: usize) -> ComplexStructure {
    let dim = 2 * n + 4;
    let mut m = vec![vec![0.0; dim]; dim];
    for p in 0..dim / 2 {
        m[2 * p + 1][2 * p] = 1.0;
        m[2 * p][2 * p + 1] = -1.0;
    }
    ComplexStructure { matrix: m }
}

/// ω = g(·, J·)
pub fn kahler_form(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let mut om = TensorValue::zeros(dim, vec![Variance::Lower; 2]);
    for mu in 0..dim {
        for nu in 0..dim {
            let mut v = 0.0;
            for al in 0..dim {
                if j[al][nu] != 0.0 {
                    v += geo.g_jet(mu, al).value() * j[al][nu];
                }
            }
            om.set(&[mu, nu], v);
        }
    }
    Ok(om)
}

/// max |dω| over all index triples; zero is the closedness half of the
/// Kähler condition (the other half being ∇J = 0).
pub fn d_kahler_form_residual(spec: &MetricSpec, p: &Point) -> Result<f64, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let mut om = vec![vec![Jet2::ZERO; dim]; dim];
    for mu in 0..dim {
        for nu in 0..dim {
            for al in 0..dim {
                if j[al][nu] != 0.0 {
                    om[mu][nu] = om[mu][nu] + geo.g_jet(mu, al).scale(j[al][nu]);
                }
            }
        }
    }
    let dpart = |f: Jet2, a: usize| if a < 2 { f.d(a).value() } else { 0.0 };
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let r = dpart(om[b][c], a) - dpart(om[a][c], b) + dpart(om[a][b], c);
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// max |∇J| (parallel complex structure is the defining pseudo-Kähler
/// property; breaks when the coupling pair is not a Cauchy-Riemann pair)
pub fn nabla_j_residual(spec: &MetricSpec, p: &Point) -> Result<f64, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let ga = geo.christoffel();
    let mut worst = 0.0f64;
    for al in 0..dim {
        for l in 0..dim {
            for nu in 0..dim {
                let mut v = 0.0;
                for k in 0..dim {
                    v += ga.get(&[l, al, k]) * j[k][nu] - ga.get(&[k, al, nu]) * j[l][k];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// θ and ξ as jets; the only nonzero components are θ_{w¹}, θ_{w²} and
/// ξ^{z¹}, ξ^{z²}, all equal to −wⁱ/ρ².
fn theta_xi_jets(p: &Point, dim: usize) -> Result<(Vec<Jet2>, Vec<Jet2>), EngineError> {
    let w1 = Jet2::lift(p.w1(), 0);
    let w2 = Jet2::lift(p.w2(), 1);
    let inv = (w1 * w1 + w2 * w2).try_recip().ok_or(EngineError::SingularPoint)?;
    let f1 = -(w1 * inv);
    let f2 = -(w2 * inv);
    let mut theta = vec![Jet2::ZERO; dim];
    let mut xi = vec![Jet2::ZERO; dim];
    theta[W1] = f1;
    theta[W2] = f2;
    xi[Z1] = f1;
    xi[Z2] = f2;
    Ok((theta, xi))
}

pub fn xi_and_theta(spec: &MetricSpec, p: &Point) -> Result<(Vec<f64>, Vec<f64>), EngineError> {
    let dim = spec.dim();
    if p.0.len() != dim {
        return Err(EngineError::DimensionMismatch(p.0.len(), dim));
    }
    let (theta, xi) = theta_xi_jets(p, dim)?;
    Ok((xi.iter().map(|j| j.value()).collect(), theta.iter().map(|j| j.value()).collect()))
}

/// S^λ_{μν} as jets:
///   S_X Y = g(X,Y)ξ − θ(Y)X − g(X,JY)Jξ + θ(JY)JX
fn structure_jets(geo: &Geometry, p: &Point) -> Result<Vec<Jet2>, EngineError> {
    let dim = geo.dim;
    let (theta, xi) = theta_xi_jets(p, dim)?;
    let j = standard_j((dim - 4) / 2).matrix;
    // Jξ and θ∘J
    let mut jxi = vec![Jet2::ZERO; dim];
    let mut thj = vec![Jet2::ZERO; dim];
    for a in 0..dim {
        for k in 0..dim {
            if j[a][k] != 0.0 {
                jxi[a] = jxi[a] + xi[k].scale(j[a][k]);
            }
            if j[k][a] != 0.0 {
                thj[a] = thj[a] + theta[k].scale(j[k][a]);
            }
        }
    }
    let mut gj = vec![vec![Jet2::ZERO; dim]; dim];
    for mu in 0..dim {
        for nu in 0..dim {
            for al in 0..dim {
                if j[al][nu] != 0.0 {
                    gj[mu][nu] = gj[mu][nu] + geo.g_jet(mu, al).scale(j[al][nu]);
                }
            }
        }
    }
    let mut s = vec![Jet2::ZERO; dim * dim * dim];
    for l in 0..dim {
        for mu in 0..dim {
            for nu in 0..dim {
                let mut v = geo.g_jet(mu, nu) * xi[l] - gj[mu][nu] * jxi[l];
                if l == mu {
                    v = v - theta[nu];
                }
                if j[l][mu] != 0.0 {
                    v = v + thj[nu].scale(j[l][mu]);
                }
                s[(l * dim + mu) * dim + nu] = v;
            }
        }
    }
    Ok(s)
}

/// S evaluated at the point, slots [λ][μ][ν] for component λ of S_{∂μ}∂ν.
pub fn build_s(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let s = structure_jets(&geo, p)?;
    let mut t =
        TensorValue::zeros(dim, vec![Variance::Upper, Variance::Lower, Variance::Lower]);
    for l in 0..dim {
        for mu in 0..dim {
            for nu in 0..dim {
                t.set(&[l, mu, nu], s[(l * dim + mu) * dim + nu].value());
            }
        }
    }
    Ok(t)
}

/// Residuals of the canonical connection ∇̃ = ∇ − S applied to g, R, S, J.
/// All four vanish exactly when (g, S) is a homogeneous pseudo-Kähler
/// structure; with couplings present this requires the compensated gauge.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalResiduals {
    pub metric: f64,
    pub curvature: f64,
    pub structure: f64,
    pub complex_structure: f64,
}

pub fn ambrose_singer_residuals(
    spec: &MetricSpec,
    p: &Point,
) -> Result<CanonicalResiduals, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let sj = structure_jets(&geo, p)?;
    let sv = |l: usize, m: usize, n: usize| sj[(l * dim + m) * dim + n].value();
    let ga = geo.christoffel();
    let r4 = geo.riemann();
    let nr = geo.nabla_riemann();

    // (∇̃g)(Y,Z) = g(S_X Y, Z) + g(Y, S_X Z): symmetric part of lowered S
    let mut metric = 0.0f64;
    for a in 0..dim {
        for m in 0..dim {
            for n in 0..dim {
                let mut t_mn = 0.0;
                let mut t_nm = 0.0;
                for l in 0..dim {
                    t_mn += sv(l, a, m) * geo.g_jet(l, n).value();
                    t_nm += sv(l, a, n) * geo.g_jet(l, m).value();
                }
                metric = metric.max((t_mn + t_nm).abs());
            }
        }
    }

    // (∇̃J) = ∇J − [S_α, J]
    let mut complex_structure = 0.0f64;
    for al in 0..dim {
        for l in 0..dim {
            for nu in 0..dim {
                let mut v = 0.0;
                for k in 0..dim {
                    v += ga.get(&[l, al, k]) * j[k][nu] - ga.get(&[k, al, nu]) * j[l][k];
                    v -= sv(l, al, k) * j[k][nu] - j[l][k] * sv(k, al, nu);
                }
                complex_structure = complex_structure.max(v.abs());
            }
        }
    }

    // (∇̃R) on the fully lowered curvature: ∇R plus an S-correction per slot
    let mut curvature = 0.0f64;
    for al in 0..dim {
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    for w in 0..dim {
                        let mut v = nr.get(&[al, x, y, z, w]);
                        for k in 0..dim {
                            v += sv(k, al, x) * r4.get(&[k, y, z, w])
                                + sv(k, al, y) * r4.get(&[x, k, z, w])
                                + sv(k, al, z) * r4.get(&[x, y, k, w])
                                + sv(k, al, w) * r4.get(&[x, y, z, k]);
                        }
                        curvature = curvature.max(v.abs());
                    }
                }
            }
        }
    }

    // (∇̃S)^λ_{μν} = (∇S) − S·S slot action
    let mut structure = 0.0f64;
    for al in 0..dim {
        for l in 0..dim {
            for mu in 0..dim {
                for nu in 0..dim {
                    let sjet = sj[(l * dim + mu) * dim + nu];
                    let mut v = if al < 2 { sjet.d(al).value() } else { 0.0 };
                    for k in 0..dim {
                        v += ga.get(&[l, al, k]) * sv(k, mu, nu)
                            - ga.get(&[k, al, mu]) * sv(l, k, nu)
                            - ga.get(&[k, al, nu]) * sv(l, mu, k);
                        v -= sv(l, al, k) * sv(k, mu, nu)
                            - sv(k, al, mu) * sv(l, k, nu)
                            - sv(k, al, nu) * sv(l, mu, k);
                    }
                    structure = structure.max(v.abs());
                }
            }
        }
    }

    Ok(CanonicalResiduals { metric, curvature, structure, complex_structure })
}

/// Residuals of the θ identity battery:
///   ∇θ = θ⊗θ − (θ∘J)⊗(θ∘J);  θ∧R = 0 and (θ∘J)∧R = 0 (wedge over the
///   2-form slots);  ∇R = 4θ⊗R;  dθ = 0.
#[derive(Clone, Copy, Debug)]
pub struct LemmaResiduals {
    pub gradient: f64,
    pub wedge: f64,
    pub wedge_j: f64,
    pub recurrence: f64,
    pub d_theta: f64,
}

pub fn lemma_identities(spec: &MetricSpec, p: &Point) -> Result<LemmaResiduals, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let (theta, _) = theta_xi_jets(p, dim)?;
    let ga = geo.christoffel();
    let r4 = geo.riemann();
    let nr = geo.nabla_riemann();
    let th: Vec<f64> = theta.iter().map(|t| t.value()).collect();
    let mut thj = vec![0.0; dim];
    for a in 0..dim {
        for k in 0..dim {
            thj[a] += th[k] * j[k][a];
        }
    }

    let dpart = |f: Jet2, a: usize| if a < 2 { f.d(a).value() } else { 0.0 };
    let mut gradient = 0.0f64;
    let mut d_theta = 0.0f64;
    for al in 0..dim {
        for nu in 0..dim {
            let mut grad = dpart(theta[nu], al);
            for k in 0..dim {
                grad -= ga.get(&[k, al, nu]) * th[k];
            }
            let want = th[al] * th[nu] - thj[al] * thj[nu];
            gradient = gradient.max((grad - want).abs());
            d_theta = d_theta.max((dpart(theta[nu], al) - dpart(theta[al], nu)).abs());
        }
    }

    let mut wedge = 0.0f64;
    let mut wedge_j = 0.0f64;
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                for w in 0..dim {
                    for u in 0..dim {
                        let cyc = |t: &[f64]| {
                            t[x] * r4.get(&[y, z, w, u])
                                + t[y] * r4.get(&[z, x, w, u])
                                + t[z] * r4.get(&[x, y, w, u])
                        };
                        wedge = wedge.max(cyc(&th).abs());
                        wedge_j = wedge_j.max(cyc(&thj).abs());
                    }
                }
            }
        }
    }

    let mut recurrence = 0.0f64;
    for al in 0..dim {
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    for w in 0..dim {
                        let v = nr.get(&[al, x, y, z, w]) - 4.0 * th[al] * r4.get(&[x, y, z, w]);
                        recurrence = recurrence.max(v.abs());
                    }
                }
            }
        }
    }

    Ok(LemmaResiduals { gradient, wedge, wedge_j, recurrence, d_theta })
}

/// Membership of the lowered S in the linear-type ansatz
///   S_{XYZ} = g(X,Y)θ₁(Z) − g(X,Z)θ₁(Y) + g(X,JY)θ₁(JZ) − g(X,JZ)θ₁(JY)
/// with θ₁ recovered by metric contraction (θ₁ = trace(S)/dim) rather than
/// assumed; `theta_match` compares the recovered θ₁ to the closed formula.
#[derive(Clone, Copy, Debug)]
pub struct ClassResiduals {
    pub ansatz: f64,
    pub theta_match: f64,
}

pub fn linear_class_residuals(
    spec: &MetricSpec,
    p: &Point,
) -> Result<ClassResiduals, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let j = standard_j(spec.n).matrix;
    let sj = structure_jets(&geo, p)?;
    let g = geo.metric();
    let ginv = geo.metric_inverse();

    // lower: S_{xyz} = g(S_x y, z)
    let mut slow = vec![0.0; dim * dim * dim];
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let mut v = 0.0;
                for l in 0..dim {
                    v += sj[(l * dim + x) * dim + y].value() * g.get(&[l, z]);
                }
                slow[(x * dim + y) * dim + z] = v;
            }
        }
    }
    // θ₁(Z) = g^{μν} S_{μνZ} / dim
    let mut th1 = vec![0.0; dim];
    for z in 0..dim {
        let mut v = 0.0;
        for m in 0..dim {
            for n in 0..dim {
                v += ginv.get(&[m, n]) * slow[(m * dim + n) * dim + z];
            }
        }
        th1[z] = v / dim as f64;
    }
    let (ftheta, _) = theta_xi_jets(p, dim)?;
    let mut theta_match = 0.0f64;
    for z in 0..dim {
        theta_match = theta_match.max((th1[z] - ftheta[z].value()).abs());
    }

    let mut th1j = vec![0.0; dim];
    for a in 0..dim {
        for k in 0..dim {
            th1j[a] += th1[k] * j[k][a];
        }
    }
    let mut gj = vec![vec![0.0; dim]; dim];
    for mu in 0..dim {
        for nu in 0..dim {
            for al in 0..dim {
                gj[mu][nu] += g.get(&[mu, al]) * j[al][nu];
            }
        }
    }
    let mut ansatz = 0.0f64;
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let want = g.get(&[x, y]) * th1[z] - g.get(&[x, z]) * th1[y]
                    + gj[x][y] * th1j[z]
                    - gj[x][z] * th1j[y];
                ansatz = ansatz.max((slow[(x * dim + y) * dim + z] - want).abs());
            }
        }
    }
    Ok(ClassResiduals { ansatz, theta_match })
}

/// θ is parallel for the canonical connection: (∇̃θ)(Y) = (∇θ)(Y) + θ(S_X Y)
pub fn parallel_theta_residual(spec: &MetricSpec, p: &Point) -> Result<f64, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let (theta, _) = theta_xi_jets(p, dim)?;
    let sj = structure_jets(&geo, p)?;
    let ga = geo.christoffel();
    let th: Vec<f64> = theta.iter().map(|t| t.value()).collect();
    let mut worst = 0.0f64;
    for al in 0..dim {
        for nu in 0..dim {
            let mut v = if al < 2 { theta[nu].d(al).value() } else { 0.0 };
            for k in 0..dim {
                v -= ga.get(&[k, al, nu]) * th[k];
                v += th[k] * sj[(k * dim + al) * dim + nu].value();
            }
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Null parallel distribution span{∂z¹, ∂z²}: the z-block of g vanishes and
/// covariant derivatives of z-directions never leave the span.
pub fn walker_residual(spec: &MetricSpec, p: &Point) -> Result<f64, EngineError> {
    let geo = Geometry::new(spec, p)?;
    let dim = spec.dim();
    let ga = geo.christoffel();
    let mut worst = 0.0f64;
    for zi in [Z1, Z2] {
        for zj in [Z1, Z2] {
            worst = worst.max(geo.g_jet(zi, zj).value().abs());
        }
        for mu in 0..dim {
            for l in 0..dim {
                if l != Z1 && l != Z2 {
                    worst = worst.max(ga.get(&[l, mu, zi]).abs());
                }
            }
        }
    }
    Ok(worst)
}

pub fn walker_check(spec: &MetricSpec, points: &[Point]) -> Result<bool, EngineError> {
    for p in points {
        if walker_residual(spec, p)? > 1e-11 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::metric::{coeff_jets, metric_components, xa, ya};
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

    fn rand_point(rng: &mut impl Rng, dim: usize) -> Point {
        let mut c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = rng.gen_range(0.5..2.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        c[W1] = r * phi.cos();
        c[W2] = r * phi.sin();
        Point(c)
    }

    #[test]
    fn j_squares_to_minus_identity() {
        for n in [0usize, 1, 3] {
            let j = standard_j(n);
            let dim = j.dim();
            assert_eq!(dim, 2 * n + 4);
            for col in 0..dim {
                let mut e = vec![0.0; dim];
                e[col] = 1.0;
                let jje = j.apply(&j.apply(&e));
                for (row, v) in jje.iter().enumerate() {
                    let want = if row == col { -1.0 } else { 0.0 };
                    assert_eq!(*v, want);
                }
            }
        }
    }

    #[test]
    fn hermitian_and_kahler_form() {
        let spec = sing(1, 4.0, "-1", &["(0.5,0) (1,-1) (0,0.25)"], "literal");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(301);
        let j = standard_j(1);
        for _ in 0..20 {
            let p = rand_point(&mut rng, 6);
            let g = metric_components(&spec, &p).unwrap();
            // g(JX, JY) = g(X, Y) entrywise, spot-checked on (x1, w1): both r1
            let co = coeff_jets(&spec, &p).unwrap();
            let jx = j.apply(&{
                let mut e = vec![0.0; 6];
                e[xa(0)] = 1.0;
                e
            });
            let jw = j.apply(&{
                let mut e = vec![0.0; 6];
                e[W1] = 1.0;
                e
            });
            let mut lhs = 0.0;
            for a in 0..6 {
                for b in 0..6 {
                    lhs += g.get(&[a, b]) * jx[a] * jw[b];
                }
            }
            let rhs = g.get(&[xa(0), W1]);
            assert!((lhs - rhs).abs() < 1e-12);
            assert!((rhs - co.r[0].value()).abs() < 1e-14);

            let om = kahler_form(&spec, &p).unwrap();
            assert!((om.get(&[xa(0), ya(0)]) - -(-1.0)).abs() < 1e-14); // -eps_1
            for a in 0..6 {
                for b in 0..6 {
                    assert!((om.get(&[a, b]) + om.get(&[b, a])).abs() < 1e-12);
                }
            }
            assert!(d_kahler_form_residual(&spec, &p).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn complex_structure_is_parallel() {
        let spec = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let comp = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "compensated");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(303);
        for _ in 0..50 {
            let p = rand_point(&mut rng, 6);
            assert!(nabla_j_residual(&spec, &p).unwrap() <= 1e-10);
            assert!(nabla_j_residual(&comp, &p).unwrap() <= 1e-10);
        }
        // breaking the Cauchy-Riemann pairing destroys parallelism
        let mut broken = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        broken.couplings[0].break_cauchy_riemann();
        let p = Point::at_w(1.0, 0.5, 6);
        assert!(nabla_j_residual(&broken, &p).unwrap() > 0.1);
    }

    #[test]
    fn xi_theta_pinned_values() {
        let spec = sing(0, 4.0, "", &[], "literal");
        let (xi, th) = xi_and_theta(&spec, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert_eq!(xi, vec![0.0, 0.0, -1.0, 0.0]);
        assert_eq!(th, vec![-1.0, 0.0, 0.0, 0.0]);
        let (xi, th) = xi_and_theta(&spec, &Point::at_w(0.0, 2.0, 4)).unwrap();
        assert_eq!(xi, vec![0.0, 0.0, 0.0, -0.5]);
        assert_eq!(th, vec![0.0, -0.5, 0.0, 0.0]);
        assert!(matches!(
            xi_and_theta(&spec, &Point::at_w(0.0, 0.0, 4)),
            Err(EngineError::SingularPoint)
        ));
    }

    #[test]
    fn theta_is_metrically_dual_to_xi_and_isotropic() {
        let spec = sing(2, -2.0, "-1,+1", &["(0,0) (2,-1)", "(0,0) (0,0) (0,1.5)"], "literal");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(305);
        for _ in 0..25 {
            let p = rand_point(&mut rng, 8);
            let (xi, th) = xi_and_theta(&spec, &p).unwrap();
            let g = metric_components(&spec, &p).unwrap();
            let mut gxx = 0.0;
            let mut thxi = 0.0;
            for a in 0..8 {
                thxi += th[a] * xi[a];
                let mut gxi_a = 0.0;
                for b in 0..8 {
                    gxi_a += g.get(&[a, b]) * xi[b];
                    gxx += g.get(&[a, b]) * xi[a] * xi[b];
                }
                assert!((gxi_a - th[a]).abs() < 1e-13, "theta = g(., xi) fails at {a}");
            }
            // xi isotropic, theta(xi) = 0: exact, the z-block of g is empty
            assert_eq!(gxx, 0.0);
            assert_eq!(thxi, 0.0);
        }
    }

    #[test]
    fn structure_tensor_values_and_antisymmetry() {
        // b0 = 4 puts b = 1 at (1,0): S_{w1} w1 = -dz1 + dw1
        let spec = sing(0, 4.0, "", &[], "literal");
        let s = build_s(&spec, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert!((s.get(&[Z1, W1, W1]) - -1.0).abs() < 1e-14);
        assert!((s.get(&[W1, W1, W1]) - 1.0).abs() < 1e-14);
        // S_{z1} z1 = 0
        for l in 0..4 {
            assert_eq!(s.get(&[l, Z1, Z1]), 0.0);
        }

        let coupled = sing(1, -3.0, "-1", &["(1,0) (0,2)"], "compensated");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(307);
        for _ in 0..100 {
            let p = rand_point(&mut rng, 6);
            let s = build_s(&coupled, &p).unwrap();
            let g = metric_components(&coupled, &p).unwrap();
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // g(S_X Y, Z) + g(Y, S_X Z) = 0
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for l in 0..6 {
                let mut sxy_l = 0.0;
                let mut sxz_l = 0.0;
                for m in 0..6 {
                    for n in 0..6 {
                        sxy_l += s.get(&[l, m, n]) * x[m] * y[n];
                        sxz_l += s.get(&[l, m, n]) * x[m] * z[n];
                    }
                }
                for c in 0..6 {
                    lhs += g.get(&[l, c]) * sxy_l * z[c];
                    rhs += g.get(&[c, l]) * y[c] * sxz_l;
                }
            }
            assert!((lhs + rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_connection_annihilates_everything() {
        // coupling-free: any gauge; coupled: compensated gauge
        let free = sing(0, 4.0, "", &[], "literal");
        let res = ambrose_singer_residuals(&free, &Point::at_w(1.0, 0.0, 4)).unwrap();
        assert!(res.metric <= 1e-9, "{res:?}");
        assert!(res.curvature <= 1e-9, "{res:?}");
        assert!(res.structure <= 1e-9, "{res:?}");
        assert!(res.complex_structure <= 1e-9, "{res:?}");

        let spec = sing(2, -2.0, "-1,+1", &["(0,0) (1,0)", "(0,0) (0,0) (1,0)"], "compensated");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(309);
        for _ in 0..10 {
            let p = rand_point(&mut rng, 8);
            let res = ambrose_singer_residuals(&spec, &p).unwrap();
            assert!(res.metric <= 1e-9, "{res:?}");
            assert!(res.curvature <= 1e-9, "{res:?}");
            assert!(res.structure <= 1e-9, "{res:?}");
            assert!(res.complex_structure <= 1e-9, "{res:?}");
        }
    }

    #[test]
    fn flat_profile_canonical_curvature_residual_is_zero() {
        let flat = parse_config("n = 0\nepsilons =\nprofile.kind = flat\n").unwrap();
        let res = ambrose_singer_residuals(&flat, &Point::at_w(0.7, -0.4, 4)).unwrap();
        assert_eq!(res.curvature, 0.0);
    }

    #[test]
    fn literal_gauge_with_couplings_is_not_homogeneous() {
        // the curvature profile picks up -sum eps |h|^2, which is not scale
        // invariant, so the canonical connection no longer annihilates R
        let spec = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        let res = ambrose_singer_residuals(&spec, &Point::at_w(1.0, 0.5, 6)).unwrap();
        assert!(res.curvature > 1e-3, "{res:?}");
        // metric and complex-structure residuals are formula identities and
        // survive any gauge
        assert!(res.metric <= 1e-12);
        assert!(res.complex_structure <= 1e-10);
    }

    #[test]
    fn theta_identity_battery() {
        let free = sing(0, 4.0, "", &[], "literal");
        let p0 = Point::at_w(1.0, 0.0, 4);
        let res = lemma_identities(&free, &p0).unwrap();
        assert!(res.gradient <= 1e-10, "{res:?}");
        assert!(res.wedge <= 1e-10);
        assert!(res.wedge_j <= 1e-10);
        assert!(res.recurrence <= 1e-9);
        assert!(res.d_theta <= 1e-10);

        // pinned: (grad theta)(w1, w1) = theta(w1)^2 - (theta J)(w1)^2 = 1
        let geo = Geometry::new(&free, &p0).unwrap();
        let (theta, _) = theta_xi_jets(&p0, 4).unwrap();
        let mut grad = theta[W1].d(0).value();
        let ga = geo.christoffel();
        for k in 0..4 {
            grad -= ga.get(&[k, W1, W1]) * theta[k].value();
        }
        assert!((grad - 1.0).abs() < 1e-14);

        // recurrence component reproduces the curvature-derivative example:
        // (nabla R)_{w1; w1 w2 w1 w2} = 4 theta_{w1} R_{1212} = -8 at (1,0)
        let nr = geo.nabla_riemann();
        assert!((nr.get(&[W1, W1, W2, W1, W2]) - -8.0).abs() < 1e-11);

        let coupled =
            sing(2, 3.0, "-1,+1", &["(0,0) (2,-1)", "(0,0) (0,0) (0,1.5)"], "compensated");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(311);
        for _ in 0..10 {
            let p = rand_point(&mut rng, 8);
            let res = lemma_identities(&coupled, &p).unwrap();
            assert!(res.gradient <= 1e-10, "{res:?}");
            assert!(res.wedge <= 1e-10);
            assert!(res.wedge_j <= 1e-10);
            assert!(res.recurrence <= 1e-9, "{res:?}");
            assert!(res.d_theta <= 1e-10);
        }

        let flat = parse_config("n = 0\nepsilons =\nprofile.kind = flat\n").unwrap();
        let res = lemma_identities(&flat, &Point::at_w(0.3, 0.4, 4)).unwrap();
        assert_eq!(res.wedge, 0.0);
        assert_eq!(res.recurrence, 0.0);
    }

    #[test]
    fn lowered_s_is_of_linear_type() {
        let specs = [
            sing(0, 4.0, "", &[], "literal"),
            sing(1, -2.0, "-1", &["(1,-1) (2,0.5) (0,1)"], "literal"),
            sing(2, 3.0, "-1,+1", &["(0,0) (2,-1)", "(0,0) (0,0) (0,1.5)"], "compensated"),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(313);
        for spec in &specs {
            for _ in 0..10 {
                let p = rand_point(&mut rng, spec.dim());
                let res = linear_class_residuals(spec, &p).unwrap();
                assert!(res.ansatz <= 1e-10, "{res:?}");
                assert!(res.theta_match <= 1e-12, "{res:?}");
            }
        }
    }

    #[test]
    fn theta_is_parallel_for_the_canonical_connection() {
        let specs = [
            sing(0, 4.0, "", &[], "literal"),
            sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal"),
            sing(2, -2.0, "-1,+1", &["(0,0) (1,0)", "(0,0) (0,0) (1,0)"], "compensated"),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(315);
        for spec in &specs {
            for _ in 0..10 {
                let p = rand_point(&mut rng, spec.dim());
                assert!(parallel_theta_residual(spec, &p).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn z_distribution_is_null_and_parallel() {
        let mut specs = vec![
            sing(0, 4.0, "", &[], "literal"),
            sing(1, -2.0, "-1", &["(1,-1) (2,0.5) (0,1)"], "literal"),
            sing(2, 3.0, "-1,+1", &["(0,0) (2,-1)", "(0,0) (0,0) (0,1.5)"], "compensated"),
        ];
        // the Walker structure survives even a broken Cauchy-Riemann pairing
        let mut broken = sing(1, 4.0, "+1", &["(0,0) (1,0)"], "literal");
        broken.couplings[0].break_cauchy_riemann();
        specs.push(broken);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(317);
        for spec in &specs {
            let pts: Vec<Point> = (0..10).map(|_| rand_point(&mut rng, spec.dim())).collect();
            for p in &pts {
                assert!(walker_residual(spec, p).unwrap() <= 1e-11);
            }
            assert!(walker_check(spec, &pts).unwrap());
        }
    }
}
