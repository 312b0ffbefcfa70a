//! Order-2 forward-mode jets: value, gradient and Hessian propagated
//! exactly through arithmetic.
//!
//! A [`Jet2`] carries the truncated second-order Taylor data of a scalar
//! at a point. Seeding the coordinates with [`Jet2::variable`] and running
//! an ordinary arithmetic expression yields the exact gradient and Hessian
//! of the composite, no finite differences involved.
//!
//! Domain violations (division by zero, `log` of a non-positive value, a
//! non-finite intermediate) do not poison downstream values silently: the
//! offending primitive is recorded in a fault slot that propagates through
//! every subsequent operation and surfaces as an error at the evaluation
//! boundary.

use crate::error::{GeomError, Result};

/// Maximum chart dimension supported by the fixed-size jet storage.
pub const MAX_DIM: usize = 8;

/// Length of the packed upper triangle of a MAX_DIM x MAX_DIM Hessian.
const TRI: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Index into the packed upper triangle for dimension `d`, any (i, j).
#[inline]
fn tri(i: usize, j: usize, d: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * (2 * d - a + 1) / 2 + (b - a)
}

/// Primitive operation that raised a fault, for error attribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primitive {
    Div,
    Recip,
    Log,
    Sqrt,
    Pow,
    Exp,
    Arith,
    MixedDim,
}

impl Primitive {
    pub fn name(self) -> &'static str {
        match self {
            Primitive::Div => "div",
            Primitive::Recip => "recip",
            Primitive::Log => "log",
            Primitive::Sqrt => "sqrt",
            Primitive::Pow => "pow",
            Primitive::Exp => "exp",
            Primitive::Arith => "arithmetic (non-finite)",
            Primitive::MixedDim => "mixed jet dimensions",
        }
    }
}

/// A pending domain fault: which primitive failed and on what argument.
#[derive(Clone, Copy, Debug)]
pub struct JetFault {
    pub primitive: Primitive,
    pub arg: f64,
}

/// Truncated second-order Taylor value: f, grad f, Hess f at a point.
///
/// The Hessian is stored as a packed upper triangle, so it is exactly
/// symmetric by construction. The dimension is fixed at seeding time;
/// combining jets of different dimensions faults the result.
#[derive(Clone, Copy, Debug)]
pub struct Jet2 {
    dim: u8,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [f64; TRI],
    fault: Option<JetFault>,
}

impl Jet2 {
    /// Constant jet: value `c`, zero derivatives.
    pub fn constant(c: f64, dim: usize) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM);
        let mut j = Self::zeroed(dim);
        j.value = c;
        if !c.is_finite() {
            j.fault = Some(JetFault {
                primitive: Primitive::Arith,
                arg: c,
            });
        }
        j
    }

    /// Coordinate seed: value `x[i]`, gradient `e_i`, zero Hessian.
    pub fn variable(i: usize, x: &[f64]) -> Result<Self> {
        let dim = x.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(GeomError::DimensionMismatch {
                expected: MAX_DIM,
                got: dim,
            });
        }
        if i >= dim {
            return Err(GeomError::IndexOutOfRange { index: i, dim });
        }
        if !x[i].is_finite() {
            return Err(GeomError::NonFinite { point: x.to_vec() });
        }
        let mut j = Self::zeroed(dim);
        j.value = x[i];
        j.grad[i] = 1.0;
        Ok(j)
    }

    /// Seed every coordinate of `x` at once.
    pub fn seed_point(x: &[f64]) -> Result<Vec<Self>> {
        (0..x.len()).map(|i| Self::variable(i, x)).collect()
    }

    fn zeroed(dim: usize) -> Self {
        Jet2 {
            dim: dim as u8,
            value: 0.0,
            grad: [0.0; MAX_DIM],
            hess: [0.0; TRI],
            fault: None,
        }
    }

    fn faulted(dim: usize, primitive: Primitive, arg: f64) -> Self {
        let mut j = Self::zeroed(dim);
        j.value = f64::NAN;
        j.fault = Some(JetFault { primitive, arg });
        j
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn grad_slice(&self) -> &[f64] {
        &self.grad[..self.dim()]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j, self.dim())]
    }

    pub fn fault(&self) -> Option<JetFault> {
        self.fault
    }

    /// Convert a pending fault into an error, attributing `point`.
    pub fn into_result(self, point: &[f64]) -> Result<Self> {
        match self.fault {
            Some(f) => Err(GeomError::JetDomain {
                primitive: f.primitive.name(),
                arg: f.arg,
                point: point.to_vec(),
            }),
            None => Ok(self),
        }
    }

    #[inline]
    fn scan_finite(mut self) -> Self {
        if self.fault.is_some() {
            return self;
        }
        let d = self.dim();
        let t = d * (d + 1) / 2;
        let ok = self.value.is_finite()
            && self.grad[..d].iter().all(|g| g.is_finite())
            && self.hess[..t].iter().all(|h| h.is_finite());
        if !ok {
            self.fault = Some(JetFault {
                primitive: Primitive::Arith,
                arg: self.value,
            });
            self.value = f64::NAN;
        }
        self
    }

    #[inline]
    fn pair_fault(&self, rhs: &Self) -> Option<JetFault> {
        if let Some(f) = self.fault {
            return Some(f);
        }
        if let Some(f) = rhs.fault {
            return Some(f);
        }
        if self.dim != rhs.dim {
            return Some(JetFault {
                primitive: Primitive::MixedDim,
                arg: rhs.dim as f64,
            });
        }
        None
    }

    /// Unary chain rule: given outer f(u) with value `v`, f'(u) = `d1`,
    /// f''(u) = `d2`, returns the jet of the composite.
    fn chain(&self, v: f64, d1: f64, d2: f64) -> Self {
        if let Some(f) = self.fault {
            return Self::faulted(self.dim(), f.primitive, f.arg);
        }
        let d = self.dim();
        let mut out = Self::zeroed(d);
        out.value = v;
        for i in 0..d {
            out.grad[i] = d1 * self.grad[i];
        }
        for i in 0..d {
            for j in i..d {
                out.hess[tri(i, j, d)] =
                    d1 * self.hess[tri(i, j, d)] + d2 * self.grad[i] * self.grad[j];
            }
        }
        out.scan_finite()
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn log(&self) -> Self {
        if self.fault.is_none() && self.value <= 0.0 {
            return Self::faulted(self.dim(), Primitive::Log, self.value);
        }
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(&self) -> Self {
        self.chain(self.value.sinh(), self.value.cosh(), self.value.sinh())
    }

    pub fn cosh(&self) -> Self {
        self.chain(self.value.cosh(), self.value.sinh(), self.value.cosh())
    }

    pub fn sqrt(&self) -> Self {
        if self.fault.is_none() && self.value <= 0.0 {
            return Self::faulted(self.dim(), Primitive::Sqrt, self.value);
        }
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    /// Square of the jet; exact product rule, no domain restriction.
    pub fn abs2(&self) -> Self {
        *self * *self
    }

    pub fn recip(&self) -> Self {
        if self.fault.is_none() && self.value == 0.0 {
            return Self::faulted(self.dim(), Primitive::Recip, 0.0);
        }
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::constant(1.0, self.dim()),
            1 => *self,
            _ => {
                if self.fault.is_none() && k < 0 && self.value == 0.0 {
                    return Self::faulted(self.dim(), Primitive::Pow, 0.0);
                }
                let v = self.value;
                let kf = f64::from(k);
                let d1 = kf * v.powi(k - 1);
                let c2 = kf * (kf - 1.0);
                let d2 = if c2 == 0.0 { 0.0 } else { c2 * v.powi(k - 2) };
                self.chain(v.powi(k), d1, d2)
            }
        }
    }

    /// Real power; non-integer exponents require a positive base.
    pub fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() < 2147483647.0 {
            return self.powi(p as i32);
        }
        if self.fault.is_none() && self.value <= 0.0 {
            return Self::faulted(self.dim(), Primitive::Pow, self.value);
        }
        let v = self.value;
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.chain(-self.value, -1.0, 0.0)
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        if let Some(f) = self.pair_fault(&rhs) {
            return Jet2::faulted(self.dim(), f.primitive, f.arg);
        }
        let d = self.dim();
        let mut out = Jet2::zeroed(d);
        out.value = self.value + rhs.value;
        for i in 0..d {
            out.grad[i] = self.grad[i] + rhs.grad[i];
        }
        let t = d * (d + 1) / 2;
        for k in 0..t {
            out.hess[k] = self.hess[k] + rhs.hess[k];
        }
        out.scan_finite()
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        if let Some(f) = self.pair_fault(&rhs) {
            return Jet2::faulted(self.dim(), f.primitive, f.arg);
        }
        let d = self.dim();
        let mut out = Jet2::zeroed(d);
        out.value = self.value - rhs.value;
        for i in 0..d {
            out.grad[i] = self.grad[i] - rhs.grad[i];
        }
        let t = d * (d + 1) / 2;
        for k in 0..t {
            out.hess[k] = self.hess[k] - rhs.hess[k];
        }
        out.scan_finite()
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        if let Some(f) = self.pair_fault(&rhs) {
            return Jet2::faulted(self.dim(), f.primitive, f.arg);
        }
        let d = self.dim();
        let mut out = Jet2::zeroed(d);
        out.value = self.value * rhs.value;
        for i in 0..d {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        for i in 0..d {
            for j in i..d {
                let k = tri(i, j, d);
                out.hess[k] = self.hess[k] * rhs.value
                    + self.value * rhs.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out.scan_finite()
    }
}

impl std::ops::Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        if let Some(f) = self.pair_fault(&rhs) {
            return Jet2::faulted(self.dim(), f.primitive, f.arg);
        }
        if rhs.value == 0.0 {
            return Jet2::faulted(self.dim(), Primitive::Div, 0.0);
        }
        // From q * b = a: q_i = (a_i - q b_i)/b and
        // q_ij = (a_ij - q b_ij - q_i b_j - q_j b_i)/b.
        let d = self.dim();
        let b = rhs.value;
        let mut out = Jet2::zeroed(d);
        out.value = self.value / b;
        for i in 0..d {
            out.grad[i] = (self.grad[i] - out.value * rhs.grad[i]) / b;
        }
        for i in 0..d {
            for j in i..d {
                let k = tri(i, j, d);
                out.hess[k] = (self.hess[k]
                    - out.value * rhs.hess[k]
                    - out.grad[i] * rhs.grad[j]
                    - out.grad[j] * rhs.grad[i])
                    / b;
            }
        }
        out.scan_finite()
    }
}

macro_rules! scalar_ops {
    ($($t:ty),*) => {$(
        impl std::ops::Add<$t> for Jet2 {
            type Output = Jet2;
            fn add(self, rhs: $t) -> Jet2 {
                self + Jet2::constant(rhs as f64, self.dim())
            }
        }
        impl std::ops::Add<Jet2> for $t {
            type Output = Jet2;
            fn add(self, rhs: Jet2) -> Jet2 {
                Jet2::constant(self as f64, rhs.dim()) + rhs
            }
        }
        impl std::ops::Sub<$t> for Jet2 {
            type Output = Jet2;
            fn sub(self, rhs: $t) -> Jet2 {
                self - Jet2::constant(rhs as f64, self.dim())
            }
        }
        impl std::ops::Sub<Jet2> for $t {
            type Output = Jet2;
            fn sub(self, rhs: Jet2) -> Jet2 {
                Jet2::constant(self as f64, rhs.dim()) - rhs
            }
        }
        impl std::ops::Mul<$t> for Jet2 {
            type Output = Jet2;
            fn mul(self, rhs: $t) -> Jet2 {
                self.chain(self.value() * rhs as f64, rhs as f64, 0.0)
            }
        }
        impl std::ops::Mul<Jet2> for $t {
            type Output = Jet2;
            fn mul(self, rhs: Jet2) -> Jet2 {
                rhs * self
            }
        }
        impl std::ops::Div<$t> for Jet2 {
            type Output = Jet2;
            fn div(self, rhs: $t) -> Jet2 {
                self / Jet2::constant(rhs as f64, self.dim())
            }
        }
        impl std::ops::Div<Jet2> for $t {
            type Output = Jet2;
            fn div(self, rhs: Jet2) -> Jet2 {
                Jet2::constant(self as f64, rhs.dim()) / rhs
            }
        }
    )*};
}

scalar_ops!(f64);
