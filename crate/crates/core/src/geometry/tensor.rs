//! Dense containers for jet-valued matrices and small real tensors.

use crate::jet::Jet;

use super::GeomError;

/// Square matrix of jets (metric components and friends).
#[derive(Clone, Debug)]
pub struct JetMatrix {
    n: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet) -> JetMatrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        JetMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.data[0].order()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.data[i * self.n + j] = v;
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMatrix {
        JetMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> JetMatrix {
        self.map(|j| j.truncate(order))
    }

    pub fn values(&self) -> Rank2 {
        Rank2::from_fn(self.n, |i, j| self.get(i, j).value())
    }

    /// Largest |entry value|; used to scale residual tolerances.
    pub fn max_abs_value(&self) -> f64 {
        self.data
            .iter()
            .map(|j| j.value().abs())
            .fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse in jet arithmetic, pivoting on value magnitude.
    pub fn inverse(&self) -> Result<JetMatrix, GeomError> {
        let n = self.n;
        let dim = self.data[0].dim();
        let order = self.data[0].order();
        let mut a = self.clone();
        let mut inv = JetMatrix::from_fn(n, |i, j| {
            Jet::constant(if i == j { 1.0 } else { 0.0 }, dim, order)
        });
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| {
                    a.get(r, col)
                        .value()
                        .abs()
                        .total_cmp(&a.get(s, col).value().abs())
                })
                .unwrap();
            if a.get(pivot_row, col).value().abs() == 0.0 {
                return Err(GeomError::DegenerateMetric {
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let piv_inv = a.get(col, col).recip().map_err(|_| {
                GeomError::DegenerateMetric {
                    condition: f64::INFINITY,
                }
            })?;
            for j in 0..n {
                a.data[col * n + j] = &a.data[col * n + j] * &piv_inv;
                inv.data[col * n + j] = &inv.data[col * n + j] * &piv_inv;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col).clone();
                if factor.coeffs().iter().all(|&c| c == 0.0) {
                    continue;
                }
                for j in 0..n {
                    let t = &factor * &a.data[col * n + j];
                    a.data[row * n + j] -= &t;
                    let t = &factor * &inv.data[col * n + j];
                    inv.data[row * n + j] -= &t;
                }
            }
        }
        Ok(inv)
    }
}

/// Real rank-2 tensor at a point.
#[derive(Clone, Debug)]
pub struct Rank2 {
    n: usize,
    d: Vec<f64>,
}

impl Rank2 {
    pub fn zeros(n: usize) -> Rank2 {
        Rank2 {
            n,
            d: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Rank2 {
        let mut d = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                d.push(f(i, j));
            }
        }
        Rank2 { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.d[i * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }
}

#[derive(Clone, Debug)]
pub struct Rank3 {
    n: usize,
    d: Vec<f64>,
}

impl Rank3 {
    pub fn zeros(n: usize) -> Rank3 {
        Rank3 {
            n,
            d: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.d[(i * self.n + j) * self.n + k] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }
}

#[derive(Clone, Debug)]
pub struct Rank4 {
    n: usize,
    d: Vec<f64>,
}

impl Rank4 {
    pub fn zeros(n: usize) -> Rank4 {
        Rank4 {
            n,
            d: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.d[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.d[((i * self.n + j) * self.n + k) * self.n + l] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn jet_matrix_inverse_roundtrip() {
        // 2x2 with coordinate-dependent entries at (0.4, 1.3).
        let x = Jet::variable(0.4, 0, 2, 3);
        let y = Jet::variable(1.3, 1, 2, 3);
        let g = JetMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => &x * &x + Jet::constant(2.0, 2, 3),
            (1, 1) => y.cosh(),
            _ => &x * &y * 0.1,
        });
        let ginv = g.inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Jet::constant(0.0, 2, 3);
                for k in 0..2 {
                    acc += &(g.get(i, k) * ginv.get(k, j));
                }
                let want = if i == j { 1.0 } else { 0.0 };
                for (s, &c) in acc.coeffs().iter().enumerate() {
                    let target = if s == 0 { want } else { 0.0 };
                    assert!((c - target).abs() < 1e-13, "slot {s}: {c}");
                }
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let g = JetMatrix::from_fn(2, |_, _| Jet::constant(1.0, 2, 2));
        assert!(g.inverse().is_err());
    }
}
