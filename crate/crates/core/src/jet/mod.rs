//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function at a point,
//! truncated at a total degree `order` (1..=4): the slot for multi-index beta
//! stores `partial^beta f / beta!`. Arithmetic (ring operations plus
//! composition with elementary univariate functions) propagates all
//! derivatives exactly; there is no step-size error anywhere downstream.
//!
//! Raw partial derivatives are recovered only at the API boundary via
//! [`Jet::partial`], which multiplies the stored coefficient by beta!.

pub(crate) mod table;

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use thiserror::Error;

use table::{IndexTable, NONE};
pub use table::{n_coeffs, MAX_DIM, MAX_ORDER};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum JetError {
    #[error("jet shape (dim {dim}, order {order}) outside supported range")]
    UnsupportedShape { dim: usize, order: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("operands have mismatched shapes: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("{func} undefined at value {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("multi-index {0:?} does not fit jet shape")]
    BadMultiIndex(Vec<usize>),
    #[error("cannot take derivative of an order-0 jet")]
    ZeroOrderDerivative,
    #[error("antiderivative would exceed the maximum supported order")]
    OrderOverflow,
}

/// Truncated Taylor expansion of a scalar quantity.
#[derive(Clone)]
pub struct Jet {
    coeffs: Vec<f64>,
    table: Arc<IndexTable>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.order() == other.order()
            && self.coeffs == other.coeffs
    }
}

fn check_shape(dim: usize, order: usize) -> Result<(), JetError> {
    if dim == 0 || dim > MAX_DIM || order == 0 || order > MAX_ORDER {
        return Err(JetError::UnsupportedShape { dim, order });
    }
    Ok(())
}

impl Jet {
    /// Constant function: value with all derivatives zero.
    pub fn constant(value: f64, dim: usize, order: usize) -> Jet {
        check_shape(dim, order).expect("jet shape");
        let table = table::table(dim, order);
        let mut coeffs = vec![0.0; table.len()];
        coeffs[0] = value;
        Jet { coeffs, table }
    }

    /// Coordinate function x_axis seeded at `value`: unit first derivative
    /// along `axis`, all higher coefficients zero.
    pub fn variable(value: f64, axis: usize, dim: usize, order: usize) -> Jet {
        check_shape(dim, order).expect("jet shape");
        assert!(axis < dim, "axis {axis} out of range for dim {dim}");
        let mut jet = Jet::constant(value, dim, order);
        // Degree-1 entries sit right after the constant, axis 0 first.
        jet.coeffs[1 + axis] = 1.0;
        jet
    }

    /// Seeds every coordinate of a point as a jet variable.
    pub fn seed_point(coords: &[f64], order: usize) -> Vec<Jet> {
        let dim = coords.len();
        coords
            .iter()
            .enumerate()
            .map(|(axis, &x)| Jet::variable(x, axis, dim, order))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Taylor coefficients in graded lexicographic slot order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Multi-index of a coefficient slot.
    pub fn multi_index(&self, slot: usize) -> &[u8] {
        &self.table.indices[slot]
    }

    /// Value of the underlying function at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// First partial along `axis`.
    pub fn d1(&self, axis: usize) -> f64 {
        assert!(axis < self.dim());
        self.coeffs[1 + axis]
    }

    /// Second partial d_i d_j; requires order >= 2.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        assert!(self.order() >= 2 && i < self.dim() && j < self.dim());
        let n = self.len() as usize;
        let a = (1 + i) as usize;
        let b = (1 + j) as u32;
        let slot = self.table.prod[a * n + b as usize] as usize;
        let fact = if i == j { 2.0 } else { 1.0 };
        self.coeffs[slot] * fact
    }

    /// Raw partial derivative for a multi-index: stored coefficient times
    /// the multinomial factor beta!.
    pub fn partial(&self, beta: &[usize]) -> Result<f64, JetError> {
        if beta.len() != self.dim() || beta.iter().sum::<usize>() > self.order() {
            return Err(JetError::BadMultiIndex(beta.to_vec()));
        }
        let key: Vec<u8> = beta.iter().map(|&b| b as u8).collect();
        let slot = *self
            .table
            .position
            .get(&key)
            .ok_or_else(|| JetError::BadMultiIndex(beta.to_vec()))?;
        let mut fact = 1.0;
        for &b in beta {
            for k in 2..=b {
                fact *= k as f64;
            }
        }
        Ok(self.coeffs[slot as usize] * fact)
    }

    fn same_shape(&self, other: &Jet) -> bool {
        Arc::ptr_eq(&self.table, &other.table)
            || (self.dim() == other.dim() && self.order() == other.order())
    }

    fn assert_shape(&self, other: &Jet) {
        assert!(
            self.same_shape(other),
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.dim(),
            self.order(),
            other.dim(),
            other.order()
        );
    }

    /// Shape-checked addition; the operator form panics instead.
    pub fn checked_add(&self, other: &Jet) -> Result<Jet, JetError> {
        if !self.same_shape(other) {
            return Err(JetError::ShapeMismatch(
                self.dim(),
                self.order(),
                other.dim(),
                other.order(),
            ));
        }
        Ok(self + other)
    }

    /// Shape-checked product; the operator form panics instead.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        if !self.same_shape(other) {
            return Err(JetError::ShapeMismatch(
                self.dim(),
                self.order(),
                other.dim(),
                other.order(),
            ));
        }
        Ok(self * other)
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    /// self += s * other, in place.
    pub fn add_scaled(&mut self, s: f64, other: &Jet) {
        self.assert_shape(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Truncated Cauchy product. Summation order is fixed (row-major over
    /// coefficient slots), so results are reproducible bit for bit.
    fn mul_impl(&self, other: &Jet) -> Jet {
        self.assert_shape(other);
        let n = self.len();
        let table = self.table.clone();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            let row = &table.prod[i * n..(i + 1) * n];
            for j in 0..n {
                let p = row[j];
                if p != NONE {
                    out[p as usize] += a * other.coeffs[j];
                }
            }
        }
        Jet { coeffs: out, table }
    }

    /// Drops coefficients above `new_order`. Panics if asked to widen.
    pub fn truncate(&self, new_order: usize) -> Jet {
        assert!(
            new_order >= 1 && new_order <= self.order(),
            "truncate: target order {new_order} not within 1..={}",
            self.order()
        );
        if new_order == self.order() {
            return self.clone();
        }
        let table = table::table(self.dim(), new_order);
        let coeffs = self.coeffs[..table.len()].to_vec();
        Jet { coeffs, table }
    }

    /// Partial derivative as a jet of one lower order.
    pub fn derivative(&self, axis: usize) -> Result<Jet, JetError> {
        if axis >= self.dim() {
            return Err(JetError::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        if self.order() == 1 {
            return Err(JetError::ZeroOrderDerivative);
        }
        let lo = table::table(self.dim(), self.order() - 1);
        let n_lo = lo.len();
        let n = self.len();
        let mut coeffs = vec![0.0; n_lo];
        // Lower-order slots are a prefix of this table's slots, so succ can
        // be read directly from the higher table.
        let succ = &self.table.succ[axis * n..(axis + 1) * n];
        for k in 0..n_lo {
            let up = succ[k] as usize;
            let mult = (self.table.indices[up][axis]) as f64;
            coeffs[k] = self.coeffs[up] * mult;
        }
        Ok(Jet { coeffs, table: lo })
    }

    /// Antiderivative along `axis` with zero constant, one order higher.
    pub fn antiderivative(&self, axis: usize) -> Result<Jet, JetError> {
        if axis >= self.dim() {
            return Err(JetError::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        if self.order() + 1 > MAX_ORDER {
            return Err(JetError::OrderOverflow);
        }
        let hi = table::table(self.dim(), self.order() + 1);
        let n_hi = hi.len();
        let mut coeffs = vec![0.0; n_hi];
        let succ = &hi.succ[axis * n_hi..(axis + 1) * n_hi];
        for k in 0..self.len() {
            let up = succ[k] as usize;
            let mult = hi.indices[up][axis] as f64;
            coeffs[up] = self.coeffs[k] / mult;
        }
        Ok(Jet { coeffs, table: hi })
    }

    /// Reinterprets a univariate jet as a jet in `dim` variables that
    /// depends only on coordinate `axis`. Coefficient k moves to k*e_axis.
    pub fn embed_axis(&self, dim: usize, axis: usize) -> Result<Jet, JetError> {
        if self.dim() != 1 {
            return Err(JetError::ShapeMismatch(self.dim(), self.order(), 1, self.order()));
        }
        if axis >= dim {
            return Err(JetError::AxisOutOfRange { axis, dim });
        }
        check_shape(dim, self.order())?;
        let table = table::table(dim, self.order());
        let mut coeffs = vec![0.0; table.len()];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let mut beta = vec![0u8; dim];
            beta[axis] = k as u8;
            coeffs[table.position[&beta] as usize] = c;
        }
        Ok(Jet { coeffs, table })
    }

    /// Composes with a univariate function given by the Taylor coefficients
    /// of f at the jet's value: series[k] = f^(k)(a0)/k!. Horner evaluation
    /// in the zero-constant part keeps the truncation exact.
    pub fn compose_series(&self, series: &[f64]) -> Jet {
        assert_eq!(series.len(), self.order() + 1);
        let mut tilde = self.clone();
        tilde.coeffs[0] = 0.0;
        let mut acc = Jet::constant(series[self.order()], self.dim(), self.order());
        for k in (0..self.order()).rev() {
            acc = acc.mul_impl(&tilde);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut series = vec![0.0; self.order() + 1];
        let mut fact = 1.0;
        for (k, s) in series.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *s = e / fact;
        }
        self.compose_series(&series)
    }

    pub fn sinh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        self.compose_series(&hyperbolic_series(sh, ch, self.order()))
    }

    pub fn cosh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        self.compose_series(&hyperbolic_series(ch, sh, self.order()))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose_series(&trig_series(s, c, self.order()))
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        // cos' = -sin, cos'' = -cos: same cycle with shifted phase.
        self.compose_series(&trig_series(c, -s, self.order()))
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a <= 0.0 {
            return Err(JetError::Domain {
                func: "log",
                value: a,
            });
        }
        let mut series = vec![0.0; self.order() + 1];
        series[0] = a.ln();
        let mut pw = 1.0;
        for (k, s) in series.iter_mut().enumerate().skip(1) {
            pw *= a;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *s = sign / (k as f64 * pw);
        }
        Ok(self.compose_series(&series))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a <= 0.0 {
            return Err(JetError::Domain {
                func: "sqrt",
                value: a,
            });
        }
        Ok(self.compose_series(&pow_series(a, 0.5, self.order())))
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a == 0.0 {
            return Err(JetError::Domain {
                func: "reciprocal",
                value: a,
            });
        }
        Ok(self.compose_series(&pow_series(a, -1.0, self.order())))
    }

    /// Real power. Non-negative integer exponents are evaluated by repeated
    /// multiplication (valid at value 0); other exponents use the derivative
    /// series and need a strictly positive (or, for negative integers,
    /// nonzero) value.
    pub fn powf(&self, p: f64) -> Result<Jet, JetError> {
        let a = self.value();
        if p.fract() == 0.0 && p >= 0.0 && p <= 32.0 {
            return Ok(self.powi(p as u32));
        }
        let integer = p.fract() == 0.0;
        if (integer && a == 0.0) || (!integer && a <= 0.0) {
            return Err(JetError::Domain {
                func: "power",
                value: a,
            });
        }
        Ok(self.compose_series(&pow_series(a, p, self.order())))
    }

    fn powi(&self, mut e: u32) -> Jet {
        let mut base = self.clone();
        let mut acc = Jet::constant(1.0, self.dim(), self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }
}

fn hyperbolic_series(even: f64, odd: f64, order: usize) -> Vec<f64> {
    // Derivatives alternate between the two hyperbolic values.
    let mut series = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, s) in series.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *s = if k % 2 == 0 { even } else { odd } / fact;
    }
    series
}

fn trig_series(f0: f64, f1: f64, order: usize) -> Vec<f64> {
    // f'' = -f: the derivative cycle is (f0, f1, -f0, -f1).
    let cycle = [f0, f1, -f0, -f1];
    let mut series = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, s) in series.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *s = cycle[k % 4] / fact;
    }
    series
}

fn pow_series(a: f64, p: f64, order: usize) -> Vec<f64> {
    // c_k = binom(p, k) a^(p-k) via the ratio recurrence
    // c_k = c_{k-1} * (p - k + 1) / (k a).
    let mut series = vec![0.0; order + 1];
    series[0] = if p == -1.0 {
        1.0 / a
    } else if p == 0.5 {
        a.sqrt()
    } else {
        a.powf(p)
    };
    for k in 1..=order {
        series[k] = series[k - 1] * (p - (k as f64 - 1.0)) / (k as f64 * a);
    }
    series
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.assert_shape(rhs);
                let mut out = self.clone();
                for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
                    *a = *a $op *b;
                }
                out
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_impl(rhs)
    }
}
impl Mul<Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_impl(&rhs)
    }
}
impl Mul<&Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_impl(rhs)
    }
}
impl Mul<Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_impl(&rhs)
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.mul_impl(&rhs.recip().expect("division by a jet with zero value"))
    }
}
impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        (&self).div(&rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}
impl Mul <f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.assert_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += *b;
        }
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.assert_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= *b;
        }
    }
}
