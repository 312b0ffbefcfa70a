//! Warped product assembly and the Bishop-O'Neill blockwise Ricci tensor.
//!
//! The product metric g = g_B + f^2 g_F is assembled as an ordinary
//! [`MetricChart`] whose components are closures over the factor charts,
//! so every chart operation applies to it unchanged. Independently,
//! [`oneill_ricci`] computes the same Ricci tensor blockwise from base and
//! fiber data alone. Agreement of the two routes is the central
//! cross-validation of the whole artifact.

use nalgebra::DMatrix;

use crate::chart::{laplacian, ricci, sample_points, MetricChart, SamplePlan, ScalarField};
use crate::error::{GeomError, Result};
use crate::jets::MAX_DIM;

/// The three Einstein model fibers. `mu` is the Einstein constant of the
/// fiber chart: Ric_F = mu g_F.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberKind {
    Flat,
    Sphere,
    Hyperbolic,
}

/// An Einstein model fiber with a chart realizing Ric = mu g.
#[derive(Clone, Debug)]
pub struct FiberModel {
    pub kind: FiberKind,
    pub dim: usize,
    pub mu: f64,
    pub chart: MetricChart,
}

impl FiberModel {
    /// Model fiber with prescribed Einstein constant: flat for mu = 0,
    /// round sphere of radius sqrt((m-1)/mu) for mu > 0, hyperbolic space
    /// of radius sqrt((m-1)/(-mu)) for mu < 0.
    pub fn for_mu(mu: f64, m: usize) -> Result<FiberModel> {
        if m < 2 {
            return Err(GeomError::InvalidParameter(format!(
                "fiber dimension must be at least 2, got {m}"
            )));
        }
        let (kind, chart) = if mu == 0.0 {
            (FiberKind::Flat, MetricChart::euclidean(m))
        } else if mu > 0.0 {
            let r = ((m as f64 - 1.0) / mu).sqrt();
            (FiberKind::Sphere, MetricChart::sphere_stereographic(m, r))
        } else {
            let r = ((m as f64 - 1.0) / (-mu)).sqrt();
            (
                FiberKind::Hyperbolic,
                MetricChart::hyperbolic_half_space(m, r),
            )
        };
        Ok(FiberModel {
            kind,
            dim: m,
            mu,
            chart,
        })
    }
}

/// Base data of a warped product soliton candidate: base chart, warping
/// function f > 0, potential phi, Einstein fiber and soliton constant.
#[derive(Clone, Debug)]
pub struct WarpedSpec {
    pub base: MetricChart,
    pub f: ScalarField,
    pub phi: ScalarField,
    pub fiber: FiberModel,
    pub lambda: f64,
}

impl WarpedSpec {
    /// Validates dimensions, m >= 2 and positivity of f on an
    /// assembly-time sample sweep of the base.
    pub fn new(
        base: MetricChart,
        f: ScalarField,
        phi: ScalarField,
        fiber: FiberModel,
        lambda: f64,
    ) -> Result<WarpedSpec> {
        if f.dim() != base.dim() || phi.dim() != base.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: base.dim(),
                got: if f.dim() != base.dim() {
                    f.dim()
                } else {
                    phi.dim()
                },
            });
        }
        if fiber.dim < 2 {
            return Err(GeomError::InvalidParameter(
                "warped product fiber dimension must be at least 2".into(),
            ));
        }
        if base.dim() + fiber.dim > MAX_DIM {
            return Err(GeomError::InvalidParameter(format!(
                "product dimension {} exceeds supported maximum {MAX_DIM}",
                base.dim() + fiber.dim
            )));
        }
        let spec = WarpedSpec {
            base,
            f,
            phi,
            fiber,
            lambda,
        };
        spec.check_warping_positive(&SamplePlan::new(32, 0))?;
        Ok(spec)
    }

    pub fn check_warping_positive(&self, plan: &SamplePlan) -> Result<()> {
        for x in sample_points(&self.base, plan)? {
            let value = self.f.value(&x)?;
            if value <= 0.0 {
                return Err(GeomError::NonpositiveWarping { point: x, value });
            }
        }
        Ok(())
    }
}

/// The assembled product chart, block-diagonal by construction.
#[derive(Clone)]
pub struct ProductChart {
    pub chart: MetricChart,
    pub base_dim: usize,
    pub fiber_dim: usize,
}

impl ProductChart {
    /// Lift a base scalar field to the product coordinates.
    pub fn lift_base_field(&self, h: &ScalarField) -> ScalarField {
        h.embed(self.chart.dim(), 0)
    }

    pub fn split<'a>(&self, xy: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        xy.split_at(self.base_dim)
    }
}

/// Assemble the warped product metric g = g_B + f^2 g_F on the combined
/// chart. Every `chart` operation applies to the result.
pub fn assemble_product(spec: &WarpedSpec) -> Result<ProductChart> {
    let n = spec.base.dim();
    let m = spec.fiber.dim;
    let total = n + m;

    let mut comps = Vec::with_capacity(total * (total + 1) / 2);
    for i in 0..total {
        for j in i..total {
            if j < n {
                comps.push(spec.base.component(i, j).embed(total, 0));
            } else if i < n {
                comps.push(ScalarField::zero(total));
            } else {
                let f = spec.f.clone();
                let comp = spec.fiber.chart.component(i - n, j - n).clone();
                comps.push(ScalarField::new(total, move |jets| {
                    f.apply(&jets[..n]).abs2() * comp.apply(&jets[n..])
                }));
            }
        }
    }

    let mut domain = spec.base.domain().to_vec();
    domain.extend_from_slice(spec.fiber.chart.domain());

    let chart = MetricChart::new(
        format!("{} x_f {}", spec.base.name(), spec.fiber.chart.name()),
        total,
        domain,
        comps,
    )?;
    Ok(ProductChart {
        chart,
        base_dim: n,
        fiber_dim: m,
    })
}

/// Blockwise Ricci tensor of the warped product from base and fiber data
/// alone (no product-chart evaluation):
///
/// - horizontal: Ric_B - (m/f) hess f
/// - mixed: 0
/// - vertical: Ric_F - (f lap f + (m-1) |grad f|^2) g_F
///
/// expressed in product coordinates, directly comparable with
/// [`ricci`] applied to [`assemble_product`].
pub fn oneill_ricci(spec: &WarpedSpec, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    use crate::chart::curvature_internals as ci;

    let n = spec.base.dim();
    let m = spec.fiber.dim;

    let conn = ci::connection(&spec.base, x, true)?;
    let (ric_b, _) = ci::ricci_from(&conn);
    let f_jet = spec.f.eval_jet(x)?;
    let fv = f_jet.value();
    if fv <= 0.0 {
        return Err(GeomError::NonpositiveWarping {
            point: x.to_vec(),
            value: fv,
        });
    }
    let hess_f = ci::covariant_hessian(&conn, &f_jet);
    let lap_f = (&conn.mj.inv * &hess_f).trace();
    let grad_f_sq = ci::grad_inner_mj(&conn.mj, &f_jet, &f_jet);

    let ric_f = ricci(&spec.fiber.chart, y)?;
    let g_f = ci::metric_values(&spec.fiber.chart, y)?;

    let total = n + m;
    let mut out = DMatrix::zeros(total, total);
    let mf = m as f64;
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = ric_b[(i, j)] - (mf / fv) * hess_f[(i, j)];
        }
    }
    let vertical_scale = fv * lap_f + (mf - 1.0) * grad_f_sq;
    for a in 0..m {
        for b in 0..m {
            out[(n + a, n + b)] = ric_f[(a, b)] - vertical_scale * g_f[(a, b)];
        }
    }
    Ok(out)
}

/// Laplacian of a lifted base function on the product:
/// lap~ h = lap h + (m/f) g(grad h, grad f), evaluated on the base, and
/// cross-checked against the direct product-chart Laplacian at (x, y)
/// within 1e-8.
pub fn lifted_laplacian(spec: &WarpedSpec, h: &ScalarField, x: &[f64], y: &[f64]) -> Result<f64> {
    use crate::chart::{gradient_inner, laplacian as chart_laplacian};

    let fv = spec.f.value(x)?;
    if fv <= 0.0 {
        return Err(GeomError::NonpositiveWarping {
            point: x.to_vec(),
            value: fv,
        });
    }
    let base_value = chart_laplacian(&spec.base, h, x)?
        + (spec.fiber.dim as f64 / fv) * gradient_inner(&spec.base, h, &spec.f, x)?;

    let product = assemble_product(spec)?;
    let lifted = product.lift_base_field(h);
    let mut xy = x.to_vec();
    xy.extend_from_slice(y);
    let product_value = laplacian(&product.chart, &lifted, &xy)?;

    if (base_value - product_value).abs() > 1e-8 {
        return Err(GeomError::CrossCheck(format!(
            "lifted Laplacian mismatch at ({x:?}, {y:?}): base {base_value}, product {product_value}"
        )));
    }
    Ok(base_value)
}

/// Sample (x, y) pairs of the product chart with a single seed.
pub fn sample_product_points(product: &ProductChart, plan: &SamplePlan) -> Result<Vec<Vec<f64>>> {
    sample_points(&product.chart, plan)
}
