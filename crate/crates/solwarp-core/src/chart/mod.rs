//! Metric geometry on a single coordinate chart.
//!
//! A [`MetricChart`] is a dimension, an axis-aligned domain box and one
//! jet-evaluable function per metric component. Everything downstream
//! (curvature, covariant derivatives, geodesics) is computed pointwise
//! from second-order jets of the components, so no symbolic machinery is
//! involved and any C^2 metric expressible as a closure works.

mod curvature;
mod geodesic;

pub use curvature::{
    christoffel, conformal_ricci, contracted_bianchi_residual, drift_laplacian, gradient,
    gradient_inner, gradient_norm_sq, hessian, laplacian, ricci, ricci_with_asymmetry,
    scalar_curvature,
};
pub use geodesic::{geodesic, metric_norm, GeodesicPath};

/// Shared low-level evaluation machinery for sibling modules.
pub(crate) mod curvature_internals {
    pub(crate) use super::curvature::{
        connection, covariant_hessian, grad_inner_mj, max_abs, ricci_from, MetricJets,
    };
    use super::MetricChart;
    use crate::error::Result;
    use nalgebra::DMatrix;

    /// Metric component values at a point (with the SPD check).
    pub(crate) fn metric_values(chart: &MetricChart, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(MetricJets::eval(chart, x)?.g)
    }
}

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::jets::Jet2;

/// A scalar function on a chart, evaluable as an order-2 jet.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    f: Arc<dyn Fn(&[Jet2]) -> Jet2 + Send + Sync>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static,
    {
        ScalarField {
            dim,
            f: Arc::new(f),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        ScalarField::new(dim, move |x| Jet2::constant(c, x[0].dim()))
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Run the underlying closure on already-seeded jets.
    ///
    /// The jets may live in a higher-dimensional context (e.g. a product
    /// chart); only their count must match this field's dimension.
    pub fn apply(&self, jets: &[Jet2]) -> Jet2 {
        debug_assert_eq!(jets.len(), self.dim);
        (self.f)(jets)
    }

    /// Evaluate the full jet at a point, converting faults to errors.
    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet2> {
        if x.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let seeds = Jet2::seed_point(x)?;
        self.apply(&seeds).into_result(x)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_jet(x)?.value())
    }

    /// View this field as a function of a coordinate slice of a larger
    /// chart: coordinates `offset..offset+dim` of the outer chart.
    pub fn embed(&self, outer_dim: usize, offset: usize) -> ScalarField {
        assert!(offset + self.dim <= outer_dim);
        let inner = self.clone();
        let lo = offset;
        let hi = offset + self.dim;
        ScalarField::new(outer_dim, move |jets| inner.apply(&jets[lo..hi]))
    }
}

/// Deterministic sampling plan for a chart domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    /// Fraction of each box edge excluded near the boundary.
    pub margin: f64,
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        SamplePlan {
            count,
            seed,
            margin: 0.05,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(GeomError::InvalidParameter(
                "sample count must be at least 1".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(GeomError::InvalidParameter(format!(
                "sample margin must lie in [0, 0.5), got {}",
                self.margin
            )));
        }
        Ok(())
    }
}

/// A coordinate chart with jet-evaluable metric components.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    dim: usize,
    domain: Vec<(f64, f64)>,
    /// Upper-triangle components g_ij, i <= j, row-major.
    comps: Vec<ScalarField>,
    /// Marks charts whose box edges identify opposite faces (flat torus).
    periodic: bool,
}

impl std::fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

fn tri_index(i: usize, j: usize, n: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * (2 * n - a + 1) / 2 + (b - a)
}

impl MetricChart {
    /// Build a chart from upper-triangle metric components
    /// ((0,0), (0,1), ..., (0,n-1), (1,1), ...).
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        domain: Vec<(f64, f64)>,
        comps: Vec<ScalarField>,
    ) -> Result<Self> {
        if dim < 1 || dim > crate::jets::MAX_DIM {
            return Err(GeomError::InvalidParameter(format!(
                "chart dimension must be in 1..={}, got {dim}",
                crate::jets::MAX_DIM
            )));
        }
        if domain.len() != dim {
            return Err(GeomError::InvalidParameter(format!(
                "domain box has {} edges for dimension {dim}",
                domain.len()
            )));
        }
        if comps.len() != dim * (dim + 1) / 2 {
            return Err(GeomError::InvalidParameter(format!(
                "expected {} metric components, got {}",
                dim * (dim + 1) / 2,
                comps.len()
            )));
        }
        for (lo, hi) in &domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeomError::InvalidParameter(format!(
                    "invalid domain edge [{lo}, {hi}]"
                )));
            }
        }
        Ok(MetricChart {
            name: name.into(),
            dim,
            domain,
            comps,
            periodic: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[tri_index(i, j, self.dim)]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(&self.domain)
                .all(|(v, (lo, hi))| *v >= lo - 1e-12 && *v <= hi + 1e-12)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.contains(x) {
            return Err(GeomError::OutsideDomain {
                chart: self.name.clone(),
                point: x.to_vec(),
            });
        }
        Ok(())
    }

    /// Flat Euclidean chart on [-1, 1]^n.
    pub fn euclidean(n: usize) -> Self {
        Self::euclidean_box(n, vec![(-1.0, 1.0); n])
    }

    pub fn euclidean_box(n: usize, domain: Vec<(f64, f64)>) -> Self {
        let mut comps = Vec::new();
        for i in 0..n {
            for j in i..n {
                let c = if i == j { 1.0 } else { 0.0 };
                comps.push(ScalarField::constant(n, c));
            }
        }
        Self::new(format!("flat-R{n}"), n, domain, comps).expect("valid flat chart")
    }

    /// Flat torus chart [0, 2pi]^n; fields on it are expected periodic.
    pub fn flat_torus(n: usize) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut chart = Self::euclidean_box(n, vec![(0.0, two_pi); n]);
        chart.name = format!("flat-T{n}");
        chart.periodic = true;
        chart
    }

    /// Round sphere of radius `r` in the stereographic chart from the
    /// north pole: g = 4 r^4 (r^2 + |x|^2)^{-2} delta on a box around 0.
    pub fn sphere_stereographic(n: usize, r: f64) -> Self {
        let mut comps = Vec::new();
        for i in 0..n {
            for j in i..n {
                if i == j {
                    comps.push(ScalarField::new(n, move |x| {
                        let d = x[0].dim();
                        let mut norm2 = Jet2::constant(0.0, d);
                        for xi in x {
                            norm2 = norm2 + xi.abs2();
                        }
                        let denom = (norm2 + r * r).abs2();
                        Jet2::constant(4.0 * r.powi(4), d) / denom
                    }));
                } else {
                    comps.push(ScalarField::zero(n));
                }
            }
        }
        Self::new(
            format!("sphere-S{n}(r={r})"),
            n,
            vec![(-0.9 * r, 0.9 * r); n],
            comps,
        )
        .expect("valid sphere chart")
    }

    /// Hyperbolic space of radius `r` in the upper half-space chart:
    /// g = (r / x_n)^2 delta on a box with x_n bounded away from 0.
    pub fn hyperbolic_half_space(n: usize, r: f64) -> Self {
        let mut comps = Vec::new();
        let last = n - 1;
        for i in 0..n {
            for j in i..n {
                if i == j {
                    comps.push(ScalarField::new(n, move |x| {
                        (Jet2::constant(r, x[0].dim()) / x[last]).abs2()
                    }));
                } else {
                    comps.push(ScalarField::zero(n));
                }
            }
        }
        let mut domain = vec![(-1.0, 1.0); n];
        domain[last] = (0.5 * r, 2.0 * r);
        Self::new(format!("hyperbolic-H{n}(r={r})"), n, domain, comps)
            .expect("valid hyperbolic chart")
    }

    /// Conformally flat chart g = rho^{-2} delta for a positive field rho.
    pub fn conformal(
        name: impl Into<String>,
        rho: &ScalarField,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let n = rho.dim();
        let mut comps = Vec::new();
        for i in 0..n {
            for j in i..n {
                if i == j {
                    let rho = rho.clone();
                    comps.push(ScalarField::new(n, move |x| rho.apply(x).abs2().recip()));
                } else {
                    comps.push(ScalarField::zero(n));
                }
            }
        }
        Self::new(name, n, domain, comps)
    }

    /// Height function h_v on the stereographic sphere chart, v = north
    /// pole: h_v(x) = r (|x|^2 - r^2) / (|x|^2 + r^2). Satisfies
    /// hess h_v = -(1/r^2) h_v g.
    pub fn sphere_height_field(n: usize, r: f64) -> ScalarField {
        ScalarField::new(n, move |x| {
            let d = x[0].dim();
            let mut norm2 = Jet2::constant(0.0, d);
            for xi in x {
                norm2 = norm2 + xi.abs2();
            }
            r * (norm2 - r * r) / (norm2 + r * r)
        })
    }

    /// Hyperbolic analogue of the height function in the upper half-space
    /// chart: h(x) = (|x'|^2 + x_n^2 + r^2) / (2 x_n), the Minkowski height
    /// over the basepoint (0, r). Satisfies hess h = (1/r^2) h g.
    pub fn hyperbolic_height_field(n: usize, r: f64) -> ScalarField {
        ScalarField::new(n, move |x| {
            let d = x[0].dim();
            let mut norm2 = Jet2::constant(0.0, d);
            for xi in x {
                norm2 = norm2 + xi.abs2();
            }
            (norm2 + r * r) / (2.0 * x[n - 1])
        })
    }
}

const HALTON_PRIMES: [u64; crate::jets::MAX_DIM] = [2, 3, 5, 7, 11, 13, 17, 19];

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Deterministic low-discrepancy points inside the margin-shrunk domain
/// box: a Halton sequence whose starting index is derived from the seed.
pub fn sample_points(chart: &MetricChart, plan: &SamplePlan) -> Result<Vec<Vec<f64>>> {
    plan.validate()?;
    let start = 1 + (plan.seed % 100_000) * 10_007;
    let mut points = Vec::with_capacity(plan.count);
    for k in 0..plan.count as u64 {
        let idx = start + k;
        let mut p = Vec::with_capacity(chart.dim());
        for (d, (lo, hi)) in chart.domain().iter().enumerate() {
            let pad = plan.margin * (hi - lo);
            let u = halton(idx, HALTON_PRIMES[d]);
            p.push(lo + pad + u * (hi - lo - 2.0 * pad));
        }
        points.push(p);
    }
    Ok(points)
}
