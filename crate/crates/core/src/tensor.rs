//! Dense tensor values at a point, with explicit index variance so
//! raise/lower operations are type-checked at runtime.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue {
    pub dim: usize,
    pub variance: Vec<Variance>,
    pub data: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> TensorValue {
        let data = vec![0.0; dim.pow(variance.len() as u32)];
        TensorValue { dim, variance, data }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut o = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            o = o * self.dim + i;
        }
        o
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn add_assign_at(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn from_matrix(m: &[Vec<f64>], variance: [Variance; 2]) -> TensorValue {
        let dim = m.len();
        let mut t = TensorValue::zeros(dim, variance.to_vec());
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.set(&[i, j], v);
            }
        }
        t
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        assert_eq!(self.rank(), 2);
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[i][j] = self.get(&[i, j]);
            }
        }
        m
    }

    /// Contract slot `k` with a rank-2 metric-like tensor (g or g^{-1}),
    /// flipping that slot's variance: T'_{..a..} = sum_b m_{ab} T_{..b..}.
    pub fn contract_slot(&self, k: usize, m: &TensorValue) -> TensorValue {
        assert_eq!(m.rank(), 2);
        assert!(m.variance[0] == m.variance[1]);
        assert!(self.variance[k] != m.variance[0], "slot already in target variance");
        let mut variance = self.variance.clone();
        variance[k] = m.variance[0];
        let mut out = TensorValue::zeros(self.dim, variance);
        let rank = self.rank();
        let stride = self.dim.pow((rank - 1 - k) as u32);
        let block = stride * self.dim;
        for outer in 0..self.data.len() / block {
            for inner in 0..stride {
                let base = outer * block + inner;
                for a in 0..self.dim {
                    let mut acc = 0.0;
                    for b in 0..self.dim {
                        acc += m.get(&[a, b]) * self.data[base + b * stride];
                    }
                    out.data[base + a * stride] = acc;
                }
            }
        }
        out
    }
}
