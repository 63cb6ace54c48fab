//! Evaluation of the metric family: profile function b, coupling functions
//! (r_a, s_a), the component matrix, and its closed-form inverse.
//!
//! Coordinate order: (w1, w2, z1, z2, x1, y1, ..., xn, yn), dim 2n+4.

use crate::config::{Gauge, MetricSpec, ProfileVariant};
use crate::jets::{complex_poly_eval, Jet2};
use crate::tensor::{TensorValue, Variance};
use thiserror::Error;

pub const W1: usize = 0;
pub const W2: usize = 1;
pub const Z1: usize = 2;
pub const Z2: usize = 3;

pub fn xa(a: usize) -> usize {
    4 + 2 * a
}

pub fn ya(a: usize) -> usize {
    5 + 2 * a
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn w1(&self) -> f64 {
        self.0[W1]
    }
    pub fn w2(&self) -> f64 {
        self.0[W2]
    }
    pub fn rho2(&self) -> f64 {
        self.w1() * self.w1() + self.w2() * self.w2()
    }
    /// Point on the w-plane padded with zeros to the family's dimension.
    pub fn at_w(w1: f64, w2: f64, dim: usize) -> Point {
        let mut c = vec![0.0; dim];
        c[W1] = w1;
        c[W2] = w2;
        Point(c)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("evaluation on the singular set w1 = w2 = 0")]
    SingularPoint,
    #[error("point has {0} coordinates, metric family needs {1}")]
    DimensionMismatch(usize, usize),
    #[error("g(dw,dw) vanishes at the point; the unitary frame on E is undefined")]
    DegenerateBasis,
}

/// All scalar coefficient functions of the metric as order-3 jets in (w1, w2).
#[derive(Clone, Debug)]
pub struct CoeffJets {
    /// the actual g(dw^i, dw^i) entry after applying the gauge
    pub gww: Jet2,
    /// the declared profile (canonical particular solution + harmonic extra)
    pub profile_b: Jet2,
    /// sum_a eps_a (r_a^2 + s_a^2)
    pub gauge_term: Jet2,
    pub r: Vec<Jet2>,
    pub s: Vec<Jet2>,
}

impl CoeffJets {
    /// gww - sum_a eps_a (r_a^2 + s_a^2): the curvature profile. In the
    /// compensated gauge this equals profile_b identically.
    pub fn b_eff(&self) -> Jet2 {
        self.gww - self.gauge_term
    }
}

fn check_point(spec: &MetricSpec, p: &Point) -> Result<(), EngineError> {
    if p.0.len() != spec.dim() {
        return Err(EngineError::DimensionMismatch(p.0.len(), spec.dim()));
    }
    if spec.is_singular() && p.rho2() == 0.0 {
        return Err(EngineError::SingularPoint);
    }
    Ok(())
}

pub fn coeff_jets(spec: &MetricSpec, p: &Point) -> Result<CoeffJets, EngineError> {
    check_point(spec, p)?;
    let w1 = Jet2::lift(p.w1(), 0);
    let w2 = Jet2::lift(p.w2(), 1);
    let rho2 = w1 * w1 + w2 * w2;
    let mut profile_b = match spec.profile.variant {
        ProfileVariant::SingularScaleInvariant => rho2.recip().scale(spec.profile.b0 / 4.0),
        ProfileVariant::CahenWallachAnalog => rho2.scale(spec.profile.b0 / 4.0),
        ProfileVariant::Flat => Jet2::ZERO,
    };
    if !spec.profile.harmonic_extra.is_empty() {
        profile_b = profile_b + complex_poly_eval(&spec.profile.harmonic_extra, p.w1(), p.w2()).0;
    }
    let mut r = Vec::with_capacity(spec.n);
    let mut s = Vec::with_capacity(spec.n);
    let mut gauge_term = Jet2::ZERO;
    for (a, c) in spec.couplings.iter().enumerate() {
        let ra = complex_poly_eval(&c.r_coeffs, p.w1(), p.w2()).0;
        let sa = complex_poly_eval(&c.s_coeffs, p.w1(), p.w2()).0;
        gauge_term = gauge_term + (ra * ra + sa * sa).scale(spec.epsilons[a]);
        r.push(ra);
        s.push(sa);
    }
    let gww = match spec.gauge {
        Gauge::Literal => profile_b,
        Gauge::Compensated => profile_b + gauge_term,
    };
    Ok(CoeffJets { gww, profile_b, gauge_term, r, s })
}

/// Jet of the profile function b (declared profile plus harmonic extra);
/// the gauge does not enter here.
pub fn eval_profile_b(spec: &MetricSpec, p: &Point) -> Result<Jet2, EngineError> {
    Ok(coeff_jets(spec, p)?.profile_b)
}

/// Which matrix entry a symmetric product like dw1 dz1 contributes.
/// `EntryOne` reads it as the full symmetric product (entry 1); `EntryHalf`
/// as the tensor half (entry 1/2). The product test against the closed-form
/// inverse selects `EntryOne`; `EntryHalf` is kept as the rejected arm of
/// that arbitration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricConvention {
    EntryOne,
    EntryHalf,
}

pub fn metric_components_with_convention(
    spec: &MetricSpec,
    p: &Point,
    conv: MetricConvention,
) -> Result<TensorValue, EngineError> {
    let c = coeff_jets(spec, p)?;
    let half = if conv == MetricConvention::EntryHalf { 0.5 } else { 1.0 };
    let dim = spec.dim();
    let mut g = TensorValue::zeros(dim, vec![Variance::Lower, Variance::Lower]);
    let b = c.gww.value();
    g.set(&[W1, W1], b);
    g.set(&[W2, W2], b);
    sym_set(&mut g, W1, Z1, half);
    sym_set(&mut g, W2, Z2, half);
    for a in 0..spec.n {
        let (ra, sa) = (c.r[a].value(), c.s[a].value());
        sym_set(&mut g, xa(a), W1, ra * half);
        sym_set(&mut g, ya(a), W2, ra * half);
        sym_set(&mut g, xa(a), W2, sa * half);
        sym_set(&mut g, ya(a), W1, -sa * half);
        g.set(&[xa(a), xa(a)], spec.epsilons[a]);
        g.set(&[ya(a), ya(a)], spec.epsilons[a]);
    }
    Ok(g)
}

fn sym_set(t: &mut TensorValue, i: usize, j: usize, v: f64) {
    t.set(&[i, j], v);
    t.set(&[j, i], v);
}

pub fn metric_components(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    metric_components_with_convention(spec, p, MetricConvention::EntryOne)
}

/// Closed-form inverse: cross entries g^{w1 z1} = g^{w2 z2} = 1,
/// g^{z i z i} = B = -b + sum eps (r^2 + s^2), z-x/y couplings, 1/eps blocks.
pub fn inverse_metric(spec: &MetricSpec, p: &Point) -> Result<TensorValue, EngineError> {
    let c = coeff_jets(spec, p)?;
    let dim = spec.dim();
    let mut gi = TensorValue::zeros(dim, vec![Variance::Upper, Variance::Upper]);
    let mut bb = -c.gww.value();
    for a in 0..spec.n {
        let (ra, sa) = (c.r[a].value(), c.s[a].value());
        bb += spec.epsilons[a] * (ra * ra + sa * sa);
    }
    sym_set(&mut gi, W1, Z1, 1.0);
    sym_set(&mut gi, W2, Z2, 1.0);
    gi.set(&[Z1, Z1], bb);
    gi.set(&[Z2, Z2], bb);
    for a in 0..spec.n {
        let (ra, sa) = (c.r[a].value(), c.s[a].value());
        let e = spec.epsilons[a];
        sym_set(&mut gi, Z1, xa(a), -e * ra);
        sym_set(&mut gi, Z1, ya(a), e * sa);
        sym_set(&mut gi, Z2, xa(a), -e * sa);
        sym_set(&mut gi, Z2, ya(a), -e * ra);
        gi.set(&[xa(a), xa(a)], 1.0 / e);
        gi.set(&[ya(a), ya(a)], 1.0 / e);
    }
    Ok(gi)
}
