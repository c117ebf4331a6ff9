//! Second-order forward jets: value, gradient and Hessian carried together.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet {
    pub fn constant(d: usize, c: f64) -> Self {
        Jet { value: c, grad: DVector::zeros(d), hess: DMatrix::zeros(d, d) }
    }

    pub fn zero(d: usize) -> Self {
        Self::constant(d, 0.0)
    }

    /// (xᵢ − c)/r as a function of x.
    pub fn coordinate(x: &[f64], i: usize, center: f64, scale: f64) -> Self {
        let d = x.len();
        let mut grad = DVector::zeros(d);
        grad[i] = 1.0 / scale;
        Jet { value: (x[i] - center) / scale, grad, hess: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn add_assign(&mut self, o: &Jet) {
        self.value += o.value;
        self.grad += &o.grad;
        self.hess += &o.hess;
    }

    pub fn add_scaled(&mut self, o: &Jet, c: f64) {
        self.value += c * o.value;
        self.grad.axpy(c, &o.grad, 1.0);
        self.hess += &o.hess * c;
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet { value: self.value * c, grad: &self.grad * c, hess: &self.hess * c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let (a, b) = (self.value, o.value);
        let cross = &self.grad * o.grad.transpose();
        Jet {
            value: a * b,
            grad: &o.grad * a + &self.grad * b,
            hess: &o.hess * a + &self.hess * b + &cross + cross.transpose(),
        }
    }

    /// f∘self given f, f′, f″ at self.value.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        Jet {
            value: f0,
            grad: &self.grad * f1,
            hess: &self.grad * self.grad.transpose() * f2 + &self.hess * f1,
        }
    }
}
