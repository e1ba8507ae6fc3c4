//! Second-order forward-mode automatic differentiation in three variables
//! `(t, x1, x2)`: value, gradient and Hessian.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; DIM],
    pub h: [[f64; DIM]; DIM],
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            g: [0.0; DIM],
            h: [[0.0; DIM]; DIM],
        }
    }

    /// The independent variable with index `i` at value `v`.
    pub fn var(i: usize, v: f64) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// `(t, x1, x2)` seeded as independent variables.
    pub fn vars(t: f64, x1: f64, x2: f64) -> [Self; 3] {
        [Self::var(0, t), Self::var(1, x1), Self::var(2, x2)]
    }

    /// Chain rule for a scalar function with derivatives `f0, f1, f2` at `self.v`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..DIM {
            out.g[i] = f1 * self.g[i];
            for k in 0..DIM {
                out.h[i][k] = f1 * self.h[i][k] + f2 * self.g[i] * self.g[k];
            }
        }
        out
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powf(self, p: f64) -> Self {
        let a = self.v.powf(p - 2.0);
        self.chain(a * self.v * self.v, p * a * self.v, p * (p - 1.0) * a)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn scale(self, c: f64) -> Self {
        self.chain(c * self.v, c, 0.0)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for i in 0..DIM {
            self.g[i] += o.g[i];
            for k in 0..DIM {
                self.h[i][k] += o.h[i][k];
            }
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.v * o.v);
        for i in 0..DIM {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for k in 0..DIM {
                out.h[i][k] = self.h[i][k] * o.v
                    + self.g[i] * o.g[k]
                    + self.g[k] * o.g[i]
                    + self.v * o.h[i][k];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.v += c;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.scale(c)
    }
}
