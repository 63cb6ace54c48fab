//! Metric family description and its plain-text config format.
//!
//! Format: `key = value` lines, `#` comments. Keys: `n`, `epsilons`,
//! `profile.kind`, `profile.b0`, `profile.harmonic`, `coupling.<a>`, `gauge`.
//! Complex coefficients are `(re,im)` pairs separated by spaces, ascending
//! degree. Floats serialize via the shortest round-tripping representation,
//! so parse -> serialize -> parse is bit-exact.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("line {0}: unknown key `{1}`")]
    UnknownKey(usize, String),
    #[error("line {0}: duplicate key `{1}`")]
    DuplicateKey(usize, String),
    #[error("line {0}: bad value for `{1}`: {2}")]
    BadValue(usize, String, String),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileVariant {
    SingularScaleInvariant,
    CahenWallachAnalog,
    Flat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileKind {
    pub variant: ProfileVariant,
    pub b0: f64,
    /// complex polynomial whose real part is added to b (zero Laplacian)
    pub harmonic_extra: Vec<Complex64>,
}

/// Wave-front coupling: r = Re p(w), s = Re q(w). A holomorphic coupling h
/// stores p = h, q = i*h (so s = -Im h and the Cauchy-Riemann relations hold
/// bit-exactly in jets); breaking the pairing is only possible in memory,
/// never through a config file.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub r_coeffs: Vec<Complex64>,
    pub s_coeffs: Vec<Complex64>,
}

impl Coupling {
    pub fn holomorphic(h: Vec<Complex64>) -> Coupling {
        let s_coeffs = h.iter().map(|c| Complex64::new(-c.im, c.re)).collect();
        Coupling { r_coeffs: h, s_coeffs }
    }

    /// Replace s's source with r's, destroying the Cauchy-Riemann pairing
    /// (unless h is constant). Used as a negative control.
    pub fn break_cauchy_riemann(&mut self) {
        self.s_coeffs = self.r_coeffs.clone();
    }

    pub fn is_zero(&self) -> bool {
        self.r_coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
            && self.s_coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

/// How the declared profile enters g(dw^i, dw^i).
///
/// `Literal`: g_ww = b exactly; couplings then shift the curvature profile to
/// b_eff = b - sum_a eps_a |h_a|^2. `Compensated`: g_ww = b + sum_a eps_a |h_a|^2,
/// so the declared profile IS the curvature profile and the scale-invariance
/// identities hold with couplings present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Gauge {
    #[default]
    Literal,
    Compensated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub profile: ProfileKind,
    pub couplings: Vec<Coupling>,
    pub gauge: Gauge,
}

impl MetricSpec {
    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }

    pub fn is_singular(&self) -> bool {
        self.profile.variant == ProfileVariant::SingularScaleInvariant
    }

    /// (negative, positive) inertia counts: (2 + 2#{eps=-1}, 2 + 2#{eps=+1}).
    pub fn signature(&self) -> (usize, usize) {
        let neg = self.epsilons.iter().filter(|&&e| e < 0.0).count();
        (2 + 2 * neg, 2 + 2 * (self.n - neg))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.epsilons.len() != self.n || self.couplings.len() != self.n {
            return Err(ConfigError::Invalid(format!(
                "n = {} but {} epsilons and {} couplings",
                self.n,
                self.epsilons.len(),
                self.couplings.len()
            )));
        }
        if self.epsilons.iter().any(|&e| e != 1.0 && e != -1.0) {
            return Err(ConfigError::Invalid("epsilons must be +1 or -1".into()));
        }
        match self.profile.variant {
            ProfileVariant::Flat => {
                if self.profile.b0 != 0.0 {
                    return Err(ConfigError::Invalid("flat profile forces b0 = 0".into()));
                }
            }
            _ => {
                if self.profile.b0 == 0.0 {
                    return Err(ConfigError::Invalid(
                        "singular_scale_invariant and cahen_wallach_analog require b0 != 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn parse_pairs(line_no: usize, key: &str, v: &str) -> Result<Vec<Complex64>, ConfigError> {
    let mut out = Vec::new();
    for tok in v.split_whitespace() {
        let inner = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| {
                ConfigError::BadValue(line_no, key.into(), format!("expected (re,im), got `{tok}`"))
            })?;
        let (re, im) = inner.split_once(',').ok_or_else(|| {
            ConfigError::BadValue(line_no, key.into(), format!("expected (re,im), got `{tok}`"))
        })?;
        let re: f64 = re.trim().parse().map_err(|_| {
            ConfigError::BadValue(line_no, key.into(), format!("bad float `{re}`"))
        })?;
        let im: f64 = im.trim().parse().map_err(|_| {
            ConfigError::BadValue(line_no, key.into(), format!("bad float `{im}`"))
        })?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn fmt_pairs(cs: &[Complex64]) -> String {
    cs.iter()
        .map(|c| format!("({},{})", c.re, c.im))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_config(text: &str) -> Result<MetricSpec, ConfigError> {
    let mut n: Option<usize> = None;
    let mut epsilons: Option<Vec<f64>> = None;
    let mut kind: Option<ProfileVariant> = None;
    let mut b0: Option<f64> = None;
    let mut harmonic: Vec<Complex64> = Vec::new();
    let mut couplings: Vec<(usize, Vec<Complex64>)> = Vec::new();
    let mut gauge = Gauge::Literal;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line.split_once('=').ok_or(ConfigError::Syntax(line_no))?;
        let key = key.trim();
        let val = val.trim();
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::DuplicateKey(line_no, key.into()));
        }
        seen.push(key.into());
        match key {
            "n" => {
                n = Some(val.parse().map_err(|_| {
                    ConfigError::BadValue(line_no, key.into(), format!("bad integer `{val}`"))
                })?);
            }
            "epsilons" => {
                let mut eps = Vec::new();
                if !val.is_empty() {
                    for tok in val.split(',') {
                        match tok.trim() {
                            "+1" | "1" => eps.push(1.0),
                            "-1" => eps.push(-1.0),
                            other => {
                                return Err(ConfigError::BadValue(
                                    line_no,
                                    key.into(),
                                    format!("epsilon must be +1 or -1, got `{other}`"),
                                ))
                            }
                        }
                    }
                }
                epsilons = Some(eps);
            }
            "profile.kind" => {
                kind = Some(match val {
                    "singular_scale_invariant" => ProfileVariant::SingularScaleInvariant,
                    "cahen_wallach_analog" => ProfileVariant::CahenWallachAnalog,
                    "flat" => ProfileVariant::Flat,
                    other => {
                        return Err(ConfigError::BadValue(
                            line_no,
                            key.into(),
                            format!("unknown profile kind `{other}`"),
                        ))
                    }
                });
            }
            "profile.b0" => {
                b0 = Some(val.parse().map_err(|_| {
                    ConfigError::BadValue(line_no, key.into(), format!("bad float `{val}`"))
                })?);
            }
            "profile.harmonic" => {
                harmonic = parse_pairs(line_no, key, val)?;
            }
            "gauge" => {
                gauge = match val {
                    "literal" => Gauge::Literal,
                    "compensated" => Gauge::Compensated,
                    other => {
                        return Err(ConfigError::BadValue(
                            line_no,
                            key.into(),
                            format!("gauge must be literal or compensated, got `{other}`"),
                        ))
                    }
                };
            }
            _ => {
                if let Some(a) = key.strip_prefix("coupling.") {
                    let a: usize = a.parse().map_err(|_| {
                        ConfigError::BadValue(line_no, key.into(), "bad coupling index".into())
                    })?;
                    if a == 0 {
                        return Err(ConfigError::BadValue(
                            line_no,
                            key.into(),
                            "coupling indices are 1-based".into(),
                        ));
                    }
                    couplings.push((a, parse_pairs(line_no, key, val)?));
                } else {
                    return Err(ConfigError::UnknownKey(line_no, key.into()));
                }
            }
        }
    }

    let n = n.ok_or_else(|| ConfigError::MissingKey("n".into()))?;
    let kind = kind.ok_or_else(|| ConfigError::MissingKey("profile.kind".into()))?;
    let epsilons = match epsilons {
        Some(e) => e,
        None if n == 0 => Vec::new(),
        None => return Err(ConfigError::MissingKey("epsilons".into())),
    };
    let b0 = match (kind, b0) {
        (ProfileVariant::Flat, None) => 0.0,
        (_, Some(v)) => v,
        (_, None) => return Err(ConfigError::MissingKey("profile.b0".into())),
    };
    let mut by_index = vec![None; n];
    for (a, coeffs) in couplings {
        if a > n {
            return Err(ConfigError::Invalid(format!(
                "coupling.{a} out of range for n = {n}"
            )));
        }
        by_index[a - 1] = Some(coeffs);
    }
    let couplings: Vec<Coupling> = by_index
        .into_iter()
        .map(|c| Coupling::holomorphic(c.unwrap_or_default()))
        .collect();

    let spec = MetricSpec {
        n,
        epsilons,
        profile: ProfileKind { variant: kind, b0, harmonic_extra: harmonic },
        couplings,
        gauge,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn serialize_config(spec: &MetricSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("n = {}\n", spec.n));
    let eps = spec
        .epsilons
        .iter()
        .map(|&e| if e > 0.0 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(&format!("epsilons = {eps}\n"));
    let kind = match spec.profile.variant {
        ProfileVariant::SingularScaleInvariant => "singular_scale_invariant",
        ProfileVariant::CahenWallachAnalog => "cahen_wallach_analog",
        ProfileVariant::Flat => "flat",
    };
    out.push_str(&format!("profile.kind = {kind}\n"));
    out.push_str(&format!("profile.b0 = {}\n", spec.profile.b0));
    if !spec.profile.harmonic_extra.is_empty() {
        out.push_str(&format!(
            "profile.harmonic = {}\n",
            fmt_pairs(&spec.profile.harmonic_extra)
        ));
    }
    for (a, c) in spec.couplings.iter().enumerate() {
        out.push_str(&format!("coupling.{} = {}\n", a + 1, fmt_pairs(&c.r_coeffs)));
    }
    let gauge = match spec.gauge {
        Gauge::Literal => "literal",
        Gauge::Compensated => "compensated",
    };
    out.push_str(&format!("gauge = {gauge}\n"));
    out
}
