//! Scalars that can flow through metric and expression evaluation.
//!
//! [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the chart coordinates `(t, x)`. Evaluating a metric on jets
//! gives exact first and second partial derivatives, which the geodesic
//! integrator and the curvature cross-check rely on.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate expression trees and metric presets.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn pow(&self, exponent: &Self) -> Self;

    fn scale(&self, c: f64) -> Self {
        self.clone() * Self::constant(c)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn pow(&self, exponent: &Self) -> Self {
        self.powf(*exponent)
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

/// Second-order jet in two variables.
///
/// `grad = [∂t, ∂x]`, `hess = [∂tt, ∂tx, ∂xx]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

impl Jet {
    pub const fn constant(c: f64) -> Self {
        Jet {
            val: c,
            grad: [0.0; 2],
            hess: [0.0; 3],
        }
    }

    /// The coordinate function `t` seeded at `t0`.
    pub const fn var_t(t0: f64) -> Self {
        Jet {
            val: t0,
            grad: [1.0, 0.0],
            hess: [0.0; 3],
        }
    }

    /// The coordinate function `x` seeded at `x0`.
    pub const fn var_x(x0: f64) -> Self {
        Jet {
            val: x0,
            grad: [0.0, 1.0],
            hess: [0.0; 3],
        }
    }

    fn is_constant(&self) -> bool {
        self.grad == [0.0; 2] && self.hess == [0.0; 3]
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.val`.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet {
        let [gt, gx] = self.grad;
        let [htt, htx, hxx] = self.hess;
        Jet {
            val: f,
            grad: [df * gt, df * gx],
            hess: [
                d2f * gt * gt + df * htt,
                d2f * gt * gx + df * htx,
                d2f * gx * gx + df * hxx,
            ],
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            val: self.val + o.val,
            grad: [self.grad[0] + o.grad[0], self.grad[1] + o.grad[1]],
            hess: [
                self.hess[0] + o.hess[0],
                self.hess[1] + o.hess[1],
                self.hess[2] + o.hess[2],
            ],
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            val: -self.val,
            grad: [-self.grad[0], -self.grad[1]],
            hess: [-self.hess[0], -self.hess[1], -self.hess[2]],
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self, o);
        Jet {
            val: a.val * b.val,
            grad: [
                a.grad[0] * b.val + a.val * b.grad[0],
                a.grad[1] * b.val + a.val * b.grad[1],
            ],
            hess: [
                a.hess[0] * b.val + 2.0 * a.grad[0] * b.grad[0] + a.val * b.hess[0],
                a.hess[1] * b.val
                    + a.grad[0] * b.grad[1]
                    + a.grad[1] * b.grad[0]
                    + a.val * b.hess[1],
                a.hess[2] * b.val + 2.0 * a.grad[1] * b.grad[1] + a.val * b.hess[2],
            ],
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let v = o.val;
        let recip = o.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
        self * recip
    }
}

impl Scalar for Jet {
    fn constant(c: f64) -> Self {
        Jet::constant(c)
    }
    fn value(&self) -> f64 {
        self.val
    }
    fn sin(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(&self) -> Self {
        let t = self.val.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }
    fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }
    fn ln(&self) -> Self {
        let v = self.val;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }
    fn abs(&self) -> Self {
        let s = if self.val < 0.0 { -1.0 } else { 1.0 };
        self.chain(self.val.abs(), s, 0.0)
    }
    fn sqrt(&self) -> Self {
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * r * r))
    }
    fn pow(&self, exponent: &Self) -> Self {
        if exponent.is_constant() {
            // u^c with constant c stays valid for negative bases when c is integral.
            let c = exponent.val;
            let u = self.val;
            let d1 = if c == 0.0 { 0.0 } else { c * u.powf(c - 1.0) };
            let d2 = if c == 0.0 || c == 1.0 {
                0.0
            } else {
                c * (c - 1.0) * u.powf(c - 2.0)
            };
            self.chain(u.powf(c), d1, d2)
        } else {
            (*exponent * self.ln()).exp()
        }
    }
    fn scale(&self, c: f64) -> Self {
        Jet {
            val: self.val * c,
            grad: [self.grad[0] * c, self.grad[1] * c],
            hess: [self.hess[0] * c, self.hess[1] * c, self.hess[2] * c],
        }
    }
}
