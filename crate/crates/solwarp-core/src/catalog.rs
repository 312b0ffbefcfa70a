//! The standing test catalog: warped-product specs covering all base and
//! fiber model kinds, and the chart list for the Bianchi sweep. Shared by
//! the test suites and the CLI runner.

use crate::chart::{MetricChart, ScalarField};
use crate::error::Result;
use crate::warped::{FiberModel, WarpedSpec};

/// Six warped-product specs: flat, spherical and hyperbolic bases crossed
/// with all three fiber kinds, base dimensions 1..3, fiber dimensions 2..3.
pub fn oneill_catalog() -> Result<Vec<WarpedSpec>> {
    let mut out = Vec::new();

    // flat R^1 base, flat fiber
    out.push(WarpedSpec::new(
        MetricChart::euclidean(1),
        ScalarField::new(1, |x| x[0].exp()),
        ScalarField::zero(1),
        FiberModel::for_mu(0.0, 2)?,
        0.0,
    )?);

    // flat R^2 base, spherical fiber
    out.push(WarpedSpec::new(
        MetricChart::euclidean(2),
        ScalarField::new(2, |x| (x[0] * 0.5).exp() * 0.2 + 1.0),
        ScalarField::zero(2),
        FiberModel::for_mu(1.0, 2)?,
        0.0,
    )?);

    // spherical base, hyperbolic fiber
    out.push(WarpedSpec::new(
        MetricChart::sphere_stereographic(2, 1.0),
        ScalarField::new(2, |x| (x[0] * 0.2).exp()),
        ScalarField::zero(2),
        FiberModel::for_mu(-1.0, 2)?,
        0.0,
    )?);

    // hyperbolic base, flat fiber
    out.push(WarpedSpec::new(
        MetricChart::hyperbolic_half_space(2, 1.0),
        ScalarField::new(2, |x| (x[0] * 0.3).exp()),
        ScalarField::zero(2),
        FiberModel::for_mu(0.0, 3)?,
        0.0,
    )?);

    // spherical 3-dim base, spherical fiber
    out.push(WarpedSpec::new(
        MetricChart::sphere_stereographic(3, 1.0),
        ScalarField::new(3, |x| x[0].sin() * 0.25 + 1.5),
        ScalarField::zero(3),
        FiberModel::for_mu(2.0, 2)?,
        0.0,
    )?);

    // hyperbolic 3-dim base, hyperbolic fiber
    out.push(WarpedSpec::new(
        MetricChart::hyperbolic_half_space(3, 1.0),
        ScalarField::new(3, |x| x[2].sqrt()),
        ScalarField::zero(3),
        FiberModel::for_mu(-2.0, 3)?,
        0.0,
    )?);

    Ok(out)
}

/// Charts for the contracted-Bianchi sweep: the model spaces at two radii
/// and dimensions, plus a polynomially perturbed flat metric.
pub fn bianchi_charts() -> Vec<MetricChart> {
    let perturbed = MetricChart::new(
        "perturbed-flat",
        2,
        vec![(-0.5, 0.5); 2],
        vec![
            ScalarField::constant(2, 1.0),
            ScalarField::new(2, |x| x[0] * x[1] * 0.1),
            ScalarField::constant(2, 1.0),
        ],
    )
    .expect("valid perturbed chart");

    vec![
        MetricChart::euclidean(2),
        MetricChart::sphere_stereographic(2, 1.0),
        MetricChart::hyperbolic_half_space(2, 1.0),
        MetricChart::sphere_stereographic(3, 1.3),
        MetricChart::hyperbolic_half_space(3, 0.8),
        perturbed,
    ]
}
