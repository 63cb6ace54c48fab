//! Truncated Taylor values of order <= 3 in the two base variables (w1, w2).
//!
//! Every coefficient of the metric family depends on (w1, w2) alone, so two jet
//! variables suffice; derivatives in the remaining coordinates are identically
//! zero and never stored. Coefficients are raw derivative values (not divided
//! by factorials) so they read off directly into Christoffel formulas.

use num_complex::Complex64;

/// Slot order: (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) (2,1) (1,2) (0,3).
const IDX: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

fn slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 0) => 1,
        (0, 1) => 2,
        (2, 0) => 3,
        (1, 1) => 4,
        (0, 2) => 5,
        (3, 0) => 6,
        (2, 1) => 7,
        (1, 2) => 8,
        (0, 3) => 9,
        _ => unreachable!("jet slot out of range"),
    }
}

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2(pub [f64; 10]);

impl Jet2 {
    pub const ZERO: Jet2 = Jet2([0.0; 10]);

    pub fn constant(c: f64) -> Jet2 {
        let mut a = [0.0; 10];
        a[0] = c;
        Jet2(a)
    }

    /// Seed jet for coordinate `var` (0 = w1, 1 = w2) at value `x`.
    pub fn lift(x: f64, var: usize) -> Jet2 {
        let mut a = [0.0; 10];
        a[0] = x;
        a[if var == 0 { 1 } else { 2 }] = 1.0;
        Jet2(a)
    }

    pub fn value(self) -> f64 {
        self.0[0]
    }

    /// Raw derivative d^{i+j} f / d w1^i d w2^j.
    pub fn deriv(self, i: usize, j: usize) -> f64 {
        self.0[slot(i, j)]
    }

    /// The jet of df/dw1 (or /dw2), one order lower; lost top-order slots are zero.
    pub fn d(self, var: usize) -> Jet2 {
        let mut a = [0.0; 10];
        for (k, &(i, j)) in IDX.iter().enumerate() {
            if i + j <= 2 {
                a[k] = if var == 0 {
                    self.0[slot(i + 1, j)]
                } else {
                    self.0[slot(i, j + 1)]
                };
            }
        }
        Jet2(a)
    }

    pub fn laplacian(self) -> f64 {
        self.0[slot(2, 0)] + self.0[slot(0, 2)]
    }

    pub fn scale(self, c: f64) -> Jet2 {
        let mut a = self.0;
        for x in &mut a {
            *x *= c;
        }
        Jet2(a)
    }

    pub fn mul(self, o: Jet2) -> Jet2 {
        let mut a = [0.0; 10];
        for (k, &(i, j)) in IDX.iter().enumerate() {
            let mut acc = 0.0;
            for p in 0..=i {
                for q in 0..=j {
                    acc += BINOM[i][p]
                        * BINOM[j][q]
                        * self.0[slot(p, q)]
                        * o.0[slot(i - p, j - q)];
                }
            }
            a[k] = acc;
        }
        Jet2(a)
    }

    /// 1/self; None when the order-0 coefficient vanishes (invalid point).
    pub fn try_recip(self) -> Option<Jet2> {
        if self.0[0] == 0.0 {
            return None;
        }
        let inv0 = 1.0 / self.0[0];
        let mut u = [0.0; 10];
        u[0] = inv0;
        // graded recurrence from (self * u = 1): IDX is already graded by total order
        for (k, &(i, j)) in IDX.iter().enumerate().skip(1) {
            let mut acc = 0.0;
            for p in 0..=i {
                for q in 0..=j {
                    if p == 0 && q == 0 {
                        continue;
                    }
                    acc += BINOM[i][p] * BINOM[j][q] * self.0[slot(p, q)] * u[slot(i - p, j - q)];
                }
            }
            u[k] = -inv0 * acc;
        }
        Some(Jet2(u))
    }

    pub fn recip(self) -> Jet2 {
        self.try_recip().expect("jet reciprocal at a zero value: invalid point")
    }

    pub fn div(self, o: Jet2) -> Jet2 {
        self.mul(o.recip())
    }

    pub fn try_sqrt(self) -> Option<Jet2> {
        if self.0[0] <= 0.0 {
            return None;
        }
        let mut s = [0.0; 10];
        s[0] = self.0[0].sqrt();
        let half = 0.5 / s[0];
        for (k, &(i, j)) in IDX.iter().enumerate().skip(1) {
            let mut acc = 0.0;
            for p in 0..=i {
                for q in 0..=j {
                    if (p == 0 && q == 0) || (p == i && q == j) {
                        continue;
                    }
                    acc += BINOM[i][p] * BINOM[j][q] * s[slot(p, q)] * s[slot(i - p, j - q)];
                }
            }
            s[k] = (self.0[k] - acc) * half;
        }
        Some(Jet2(s))
    }

    pub fn powi(self, mut e: u32) -> Jet2 {
        let mut base = self;
        let mut acc = Jet2::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet2(a)
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x -= y;
        }
        Jet2(a)
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::mul(self, o)
    }
}

/// Jets of (r, s) = (Re h, -Im h) for a complex polynomial h at w = w1 + i w2.
///
/// Built from the complex derivatives h, h', h'', h''' via d1^i d2^j h = i^j h^(i+j),
/// so the Cauchy-Riemann relations between the two returned jets hold bit-exactly:
/// both sides of each relation are the same stored double.
pub fn complex_poly_eval(coeffs: &[Complex64], w1: f64, w2: f64) -> (Jet2, Jet2) {
    let w = Complex64::new(w1, w2);
    // h^(k)(w) for k = 0..3 by Horner on successively differentiated coefficients
    let mut derivs = [Complex64::new(0.0, 0.0); 4];
    let mut c: Vec<Complex64> = coeffs.to_vec();
    for (k, slot) in derivs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            acc = acc * w + ck;
        }
        *slot = acc;
        // differentiate coefficient list in place: c_m -> (m) c_m shifted down
        if k < 3 {
            for (m, cm) in c.iter_mut().enumerate() {
                *cm *= m as f64;
            }
            if !c.is_empty() {
                c.remove(0);
            }
        }
    }
    let mut r = [0.0; 10];
    let mut s = [0.0; 10];
    for (k, &(i, j)) in IDX.iter().enumerate() {
        // i^j twist: Re(i^j z), Im(i^j z) cycle through (re, im, -re, -im)
        let z = derivs[i + j];
        let (re, im) = match j % 4 {
            0 => (z.re, z.im),
            1 => (-z.im, z.re),
            2 => (-z.re, -z.im),
            _ => (z.im, -z.re),
        };
        r[k] = re;
        s[k] = -im;
    }
    (Jet2(r), Jet2(s))
}
