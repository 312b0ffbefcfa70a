//! Residual evaluators for the soliton identities: the fundamental
//! equation, Hamilton's constant, the Ricci-Hessian system on the base,
//! its first integral mu, the quasi-Einstein conversion identities, and
//! the end-to-end warped-product verification.

use nalgebra::DMatrix;

use crate::chart::curvature_internals as ci;
use crate::chart::{sample_points, MetricChart, SamplePlan, ScalarField};
use crate::error::{GeomError, Result};
use crate::jets::Jet2;
use crate::report::{ResidualAccum, ResidualReport};
use crate::warped::{assemble_product, WarpedSpec};

pub const DEFAULT_TENSOR_TOL: f64 = 1e-6;
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-6;

/// Per-run tolerances for tensor identities and scalar constancy checks.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub tensor: f64,
    pub constancy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tensor: DEFAULT_TENSOR_TOL,
            constancy: DEFAULT_CONSTANCY_TOL,
        }
    }
}

/// Soliton constant, or a smooth function of the base point. The variable
/// form is accepted only by the base-level Ricci-Hessian residual; the
/// soliton-level checks require a constant.
#[derive(Clone)]
pub enum Lambda {
    Const(f64),
    Field(ScalarField),
}

impl Lambda {
    fn value(&self, x: &[f64]) -> Result<f64> {
        match self {
            Lambda::Const(c) => Ok(*c),
            Lambda::Field(f) => f.value(x),
        }
    }
}

impl From<f64> for Lambda {
    fn from(c: f64) -> Self {
        Lambda::Const(c)
    }
}

fn coordinate_outer(a: &Jet2, b: &Jet2, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| a.grad(i) * b.grad(j))
}

/// Max-norm residual of the fundamental equation Ric + hess(psi) = lambda g
/// over the sample plan.
pub fn soliton_residual(
    chart: &MetricChart,
    psi: &ScalarField,
    lambda: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport> {
    let mut acc = ResidualAccum::tensor("soliton-fundamental");
    for x in sample_points(chart, plan)? {
        let conn = ci::connection(chart, &x, true)?;
        let (ric, _) = ci::ricci_from(&conn);
        let psi_jet = psi.eval_jet(&x)?;
        let hess = ci::covariant_hessian(&conn, &psi_jet);
        let residual = ric + hess - &conn.mj.g * lambda;
        acc.add_residual(ci::max_abs(&residual), &x);
    }
    Ok(acc.finish(tol))
}

/// Hamilton's constant 2 lambda psi - |grad psi|^2 + lap psi, reported as a
/// constancy check (mean value plus spread).
pub fn hamilton_constant(
    chart: &MetricChart,
    psi: &ScalarField,
    lambda: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport> {
    let mut acc = ResidualAccum::scalar("hamilton-constant");
    for x in sample_points(chart, plan)? {
        let conn = ci::connection(chart, &x, false)?;
        let psi_jet = psi.eval_jet(&x)?;
        let hess = ci::covariant_hessian(&conn, &psi_jet);
        let lap = (&conn.mj.inv * hess).trace();
        let grad_sq = ci::grad_inner_mj(&conn.mj, &psi_jet, &psi_jet);
        acc.add_value(2.0 * lambda * psi_jet.value() - grad_sq + lap, &x);
    }
    Ok(acc.finish(tol))
}

fn check_m_nonzero(m: f64) -> Result<()> {
    if m == 0.0 {
        return Err(GeomError::InvalidParameter(
            "fiber-dimension parameter m must be nonzero".into(),
        ));
    }
    Ok(())
}

fn positive_warping(f: &Jet2, x: &[f64]) -> Result<f64> {
    let v = f.value();
    if v <= 0.0 {
        return Err(GeomError::NonpositiveWarping {
            point: x.to_vec(),
            value: v,
        });
    }
    Ok(v)
}

/// Max-norm residual of the Ricci-Hessian system
/// Ric + hess(phi) = lambda g + (m/f) hess(f) on the base. `lambda` may be
/// a field to cover the variable-lambda model-space family.
pub fn ricci_hessian_residual(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: &Lambda,
    m: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport> {
    check_m_nonzero(m)?;
    let mut acc = ResidualAccum::tensor("ricci-hessian");
    for x in sample_points(base, plan)? {
        let conn = ci::connection(base, &x, true)?;
        let (ric, _) = ci::ricci_from(&conn);
        let f_jet = f.eval_jet(&x)?;
        let fv = positive_warping(&f_jet, &x)?;
        let phi_jet = phi.eval_jet(&x)?;
        let hess_f = ci::covariant_hessian(&conn, &f_jet);
        let hess_phi = ci::covariant_hessian(&conn, &phi_jet);
        let lv = lambda.value(&x)?;
        let residual = ric + hess_phi - &conn.mj.g * lv - hess_f * (m / fv);
        acc.add_residual(ci::max_abs(&residual), &x);
    }
    Ok(acc.finish(tol))
}

/// Base necessary condition
/// 2 lambda phi - |grad phi|^2 + lap phi + (m/f) g(grad phi, grad f),
/// reported as a constancy check; the mean is the constant c.
pub fn base_condition_residual(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport> {
    check_m_nonzero(m)?;
    let mut acc = ResidualAccum::scalar("base-condition");
    for x in sample_points(base, plan)? {
        let conn = ci::connection(base, &x, false)?;
        let f_jet = f.eval_jet(&x)?;
        let fv = positive_warping(&f_jet, &x)?;
        let phi_jet = phi.eval_jet(&x)?;
        let hess_phi = ci::covariant_hessian(&conn, &phi_jet);
        let lap_phi = (&conn.mj.inv * hess_phi).trace();
        let grad_phi_sq = ci::grad_inner_mj(&conn.mj, &phi_jet, &phi_jet);
        let coupling = ci::grad_inner_mj(&conn.mj, &phi_jet, &f_jet);
        acc.add_value(
            2.0 * lambda * phi_jet.value() - grad_phi_sq + lap_phi + (m / fv) * coupling,
            &x,
        );
    }
    Ok(acc.finish(tol))
}

/// Pointwise first integral
/// mu(x) = lambda f^2 + f lap f + (m-1) |grad f|^2 - f g(grad phi, grad f).
pub fn mu_field(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    x: &[f64],
) -> Result<f64> {
    check_m_nonzero(m)?;
    let conn = ci::connection(base, x, false)?;
    let f_jet = f.eval_jet(x)?;
    let fv = positive_warping(&f_jet, x)?;
    let phi_jet = phi.eval_jet(x)?;
    let hess_f = ci::covariant_hessian(&conn, &f_jet);
    let lap_f = (&conn.mj.inv * hess_f).trace();
    let grad_f_sq = ci::grad_inner_mj(&conn.mj, &f_jet, &f_jet);
    let coupling = ci::grad_inner_mj(&conn.mj, &phi_jet, &f_jet);
    Ok(lambda * fv * fv + fv * lap_f + (m - 1.0) * grad_f_sq - fv * coupling)
}

/// Constancy sweep of the first integral. The mean is the fiber constant;
/// constancy is only guaranteed when the Ricci-Hessian system and the base
/// condition already hold.
pub fn mu_constancy(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport> {
    let mut acc = ResidualAccum::scalar("first-integral-mu");
    for x in sample_points(base, plan)? {
        acc.add_value(mu_field(base, f, phi, lambda, m, &x)?, &x);
    }
    Ok(acc.finish(tol))
}

/// Result of embedding a quasi-Einstein potential into the Ricci-Hessian
/// class: phi = h/2, f = e^{-phi/r}, plus the exact pointwise identity
/// (r/f) hess f = -hess phi + (1/r) dphi (x) dphi checked over the plan.
pub struct QuasiEinsteinEmbedding {
    pub phi: ScalarField,
    pub f: ScalarField,
    pub identity: ResidualReport,
}

pub fn quasi_einstein_to_ricci_hessian(
    chart: &MetricChart,
    h: &ScalarField,
    r: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<QuasiEinsteinEmbedding> {
    if r <= 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "quasi-Einstein parameter r must be positive, got {r}"
        )));
    }
    let h_in = h.clone();
    let phi = ScalarField::new(chart.dim(), move |x| h_in.apply(x) / 2.0);
    let h_in = h.clone();
    let f = ScalarField::new(chart.dim(), move |x| (h_in.apply(x) / (-2.0 * r)).exp());

    let mut acc = ResidualAccum::tensor("quasi-einstein-embed");
    let n = chart.dim();
    for x in sample_points(chart, plan)? {
        let conn = ci::connection(chart, &x, false)?;
        let f_jet = f.eval_jet(&x)?;
        let fv = positive_warping(&f_jet, &x)?;
        let phi_jet = phi.eval_jet(&x)?;
        let lhs = ci::covariant_hessian(&conn, &f_jet) * (r / fv);
        let rhs =
            -ci::covariant_hessian(&conn, &phi_jet) + coordinate_outer(&phi_jet, &phi_jet, n) / r;
        acc.add_residual(ci::max_abs(&(lhs - rhs)), &x);
    }
    Ok(QuasiEinsteinEmbedding {
        phi,
        f,
        identity: acc.finish(tol),
    })
}

/// Result of the inverse conversion: xi = -r ln f together with the
/// identity-chain check
///
///   Ric + hess(phi) - (r/f) hess(f)
///     = Ric + hess(xi) - (1/r) dxi (x) dxi + hess(phi)
///
/// evaluated pointwise. The lambda g term present on both sides of the
/// chain cancels identically and is omitted.
pub struct QuasiEinsteinInverse {
    pub xi: ScalarField,
    pub identity: ResidualReport,
}

pub fn ricci_hessian_to_quasi_einstein(
    chart: &MetricChart,
    phi: &ScalarField,
    f: &ScalarField,
    r: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<QuasiEinsteinInverse> {
    if r <= 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "quasi-Einstein parameter r must be positive, got {r}"
        )));
    }
    let f_in = f.clone();
    let xi = ScalarField::new(chart.dim(), move |x| f_in.apply(x).log() * (-r));

    let mut acc = ResidualAccum::tensor("quasi-einstein-inverse");
    let n = chart.dim();
    for x in sample_points(chart, plan)? {
        let conn = ci::connection(chart, &x, true)?;
        let (ric, _) = ci::ricci_from(&conn);
        let f_jet = f.eval_jet(&x)?;
        let fv = positive_warping(&f_jet, &x)?;
        let phi_jet = phi.eval_jet(&x)?;
        let xi_jet = xi.eval_jet(&x)?;
        let hess_phi = ci::covariant_hessian(&conn, &phi_jet);
        let side1 = &ric + &hess_phi - ci::covariant_hessian(&conn, &f_jet) * (r / fv);
        let side2 = &ric + ci::covariant_hessian(&conn, &xi_jet)
            - coordinate_outer(&xi_jet, &xi_jet, n) / r
            + &hess_phi;
        acc.add_residual(ci::max_abs(&(side1 - side2)), &x);
    }
    Ok(QuasiEinsteinInverse {
        xi,
        identity: acc.finish(tol),
    })
}

/// Full verification bundle for the warped-product construction: base
/// hypotheses first, then the soliton equation on the assembled product
/// with the lifted potential.
pub struct ConstructionBundle {
    pub ricci_hessian: ResidualReport,
    pub base_condition: ResidualReport,
    pub first_integral: ResidualReport,
    pub mu_mean: f64,
    pub fiber_mu: f64,
    /// None when a base hypothesis already failed.
    pub product_soliton: Option<ResidualReport>,
    pub pass: bool,
}

impl ConstructionBundle {
    pub fn reports(&self) -> Vec<&ResidualReport> {
        let mut out = vec![
            &self.ricci_hessian,
            &self.base_condition,
            &self.first_integral,
        ];
        if let Some(p) = &self.product_soliton {
            out.push(p);
        }
        out
    }
}

pub fn verify_construction(
    spec: &WarpedSpec,
    plan: &SamplePlan,
    tols: Tolerances,
) -> Result<ConstructionBundle> {
    let m = spec.fiber.dim as f64;
    let ricci_hessian = ricci_hessian_residual(
        &spec.base,
        &spec.f,
        &spec.phi,
        &Lambda::Const(spec.lambda),
        m,
        plan,
        tols.tensor,
    )?;
    let base_condition = base_condition_residual(
        &spec.base,
        &spec.f,
        &spec.phi,
        spec.lambda,
        m,
        plan,
        tols.constancy,
    )?;
    let first_integral = mu_constancy(
        &spec.base,
        &spec.f,
        &spec.phi,
        spec.lambda,
        m,
        plan,
        tols.constancy,
    )?;
    let mu_mean = first_integral.mean.unwrap_or(f64::NAN);

    let hypotheses_ok = ricci_hessian.pass && base_condition.pass && first_integral.pass;
    if !hypotheses_ok {
        return Ok(ConstructionBundle {
            ricci_hessian,
            base_condition,
            first_integral,
            mu_mean,
            fiber_mu: spec.fiber.mu,
            product_soliton: None,
            pass: false,
        });
    }

    let product = assemble_product(spec)?;
    let lifted_potential = product.lift_base_field(&spec.phi);
    let mut product_report = soliton_residual(
        &product.chart,
        &lifted_potential,
        spec.lambda,
        plan,
        tols.tensor,
    )?;
    product_report.identity = "product-soliton".into();
    let pass = product_report.pass;

    Ok(ConstructionBundle {
        ricci_hessian,
        base_condition,
        first_integral,
        mu_mean,
        fiber_mu: spec.fiber.mu,
        product_soliton: Some(product_report),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, lambda: f64) -> (MetricChart, ScalarField) {
        let chart = MetricChart::euclidean(n);
        let psi = ScalarField::new(n, move |x| {
            let d = x[0].dim();
            let mut s = Jet2::constant(0.0, d);
            for xi in x {
                s = s + xi.abs2();
            }
            s * (lambda / 2.0)
        });
        (chart, psi)
    }

    #[test]
    fn gaussian_soliton_residual_is_exact() {
        for (n, lambda) in [(1, 0.8), (2, -1.0), (3, 1.5)] {
            let (chart, psi) = gaussian(n, lambda);
            let r = soliton_residual(&chart, &psi, lambda, &SamplePlan::new(20, 1), 1e-12).unwrap();
            assert!(r.pass, "n={n} lambda={lambda}: max {}", r.max_abs);
        }
    }

    #[test]
    fn einstein_sphere_is_a_trivial_soliton() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let psi = ScalarField::zero(2);
        let r = soliton_residual(&chart, &psi, 1.0, &SamplePlan::new(25, 2), 1e-7).unwrap();
        assert!(r.pass, "max {}", r.max_abs);
    }

    #[test]
    fn flat_nonsoliton_has_unit_residual() {
        let chart = MetricChart::euclidean(2);
        let psi = ScalarField::zero(2);
        let r = soliton_residual(&chart, &psi, 1.0, &SamplePlan::new(10, 0), 1e-6).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_abs, 1.0);
    }

    #[test]
    fn hamilton_constant_examples() {
        // Gaussian, lambda = -1, n = 2: c = n lambda = -2
        let (chart, psi) = gaussian(2, -1.0);
        let r = hamilton_constant(&chart, &psi, -1.0, &SamplePlan::new(30, 3), 1e-10).unwrap();
        assert!(r.pass, "spread {}", r.spread());
        assert!((r.mean.unwrap() + 2.0).abs() < 1e-12);

        // psi = 0: c == 0 with zero spread
        let zero = ScalarField::zero(2);
        let r = hamilton_constant(&chart, &zero, 0.7, &SamplePlan::new(10, 0), 1e-15).unwrap();
        assert_eq!(r.mean, Some(0.0));
        assert_eq!(r.constancy_spread, Some(0.0));

        // psi = x1, lambda = 0 on flat R^2: value -1 everywhere
        let linear = ScalarField::new(2, |x| x[0]);
        let r = hamilton_constant(&chart, &linear, 0.0, &SamplePlan::new(15, 4), 1e-12).unwrap();
        assert!(r.pass);
        assert!((r.mean.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifting_psi_by_a_constant() {
        let (chart, psi) = gaussian(2, -1.0);
        let shifted = {
            let psi = psi.clone();
            ScalarField::new(2, move |x| psi.apply(x) + 5.0)
        };
        let plan = SamplePlan::new(20, 9);
        let r1 = soliton_residual(&chart, &psi, -1.0, &plan, 1e-12).unwrap();
        let r2 = soliton_residual(&chart, &shifted, -1.0, &plan, 1e-12).unwrap();
        assert_eq!(r1.max_abs, r2.max_abs);

        let c1 = hamilton_constant(&chart, &psi, -1.0, &plan, 1e-10).unwrap();
        let c2 = hamilton_constant(&chart, &shifted, -1.0, &plan, 1e-10).unwrap();
        let shift = c2.mean.unwrap() - c1.mean.unwrap();
        assert!((shift - 2.0 * (-1.0) * 5.0).abs() < 1e-10, "shift {shift}");
    }

    #[test]
    fn constant_warping_reduces_to_soliton_residual() {
        let (chart, psi) = gaussian(2, -0.5);
        let f = ScalarField::constant(2, 3.0);
        let plan = SamplePlan::new(12, 6);
        let rh = ricci_hessian_residual(&chart, &f, &psi, &Lambda::Const(-0.5), 2.0, &plan, 1e-12)
            .unwrap();
        let sr = soliton_residual(&chart, &psi, -0.5, &plan, 1e-12).unwrap();
        assert!((rh.max_abs - sr.max_abs).abs() < 1e-15);
    }

    #[test]
    fn m_zero_is_rejected() {
        let (chart, psi) = gaussian(2, -0.5);
        let f = ScalarField::constant(2, 1.0);
        assert!(ricci_hessian_residual(
            &chart,
            &f,
            &psi,
            &Lambda::Const(0.0),
            0.0,
            &SamplePlan::new(4, 0),
            1e-6
        )
        .is_err());
    }

    #[test]
    fn base_condition_constant_potential() {
        let chart = MetricChart::euclidean(2);
        let f = ScalarField::new(2, |x| x[0].exp());
        let phi = ScalarField::constant(2, 2.0);
        let r = base_condition_residual(&chart, &f, &phi, 0.7, 3.0, &SamplePlan::new(10, 1), 1e-15)
            .unwrap();
        assert_eq!(r.constancy_spread, Some(0.0));
        assert!((r.mean.unwrap() - 2.0 * 0.7 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn base_condition_gaussian_with_trivial_warping() {
        let (chart, psi) = gaussian(2, -1.0);
        let f = ScalarField::constant(2, 1.0);
        let r =
            base_condition_residual(&chart, &f, &psi, -1.0, 2.0, &SamplePlan::new(20, 2), 1e-10)
                .unwrap();
        assert!(r.pass);
        assert!((r.mean.unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn mu_for_constant_data_is_lambda_k_squared() {
        let chart = MetricChart::euclidean(2);
        let f = ScalarField::constant(2, 2.0);
        let phi = ScalarField::constant(2, 1.0);
        let r = mu_constancy(&chart, &f, &phi, -0.75, 2.0, &SamplePlan::new(8, 0), 1e-15).unwrap();
        assert_eq!(r.constancy_spread, Some(0.0));
        assert!((r.mean.unwrap() - (-0.75) * 4.0).abs() < 1e-15);
    }

    #[test]
    fn quasi_einstein_embed_on_the_line() {
        // h = 2x, r = 1: phi = x, f = e^{-x}; both identity sides equal 1.
        let chart = MetricChart::euclidean(1);
        let h = ScalarField::new(1, |x| x[0] * 2.0);
        let out = quasi_einstein_to_ricci_hessian(&chart, &h, 1.0, &SamplePlan::new(10, 0), 1e-12)
            .unwrap();
        assert!(out.identity.pass, "max {}", out.identity.max_abs);
        let x = [0.4];
        assert!((out.phi.value(&x).unwrap() - 0.4).abs() < 1e-15);
        assert!((out.f.value(&x).unwrap() - (-0.4f64).exp()).abs() < 1e-15);
        // (r/f) f'' = 1 on flat R^1
        let hess = crate::chart::hessian(&chart, &out.f, &x).unwrap();
        let fv = out.f.value(&x).unwrap();
        assert!((hess[(0, 0)] / fv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quasi_einstein_embed_trivial_and_curved() {
        let chart = MetricChart::euclidean(2);
        let constant = ScalarField::constant(2, 3.0);
        let out =
            quasi_einstein_to_ricci_hessian(&chart, &constant, 2.0, &SamplePlan::new(6, 0), 1e-15)
                .unwrap();
        assert_eq!(out.identity.max_abs, 0.0);

        let sphere = MetricChart::sphere_stereographic(2, 1.0);
        let h = MetricChart::sphere_height_field(2, 1.0);
        let out = quasi_einstein_to_ricci_hessian(&sphere, &h, 1.0, &SamplePlan::new(20, 5), 1e-9)
            .unwrap();
        assert!(out.identity.pass, "max {}", out.identity.max_abs);
    }

    #[test]
    fn quasi_einstein_inverse_trivial_warping() {
        let chart = MetricChart::euclidean(2);
        let phi = ScalarField::new(2, |x| x[0].sin() + x[1].abs2());
        let f = ScalarField::constant(2, 1.0);
        let out =
            ricci_hessian_to_quasi_einstein(&chart, &phi, &f, 1.0, &SamplePlan::new(8, 0), 1e-15)
                .unwrap();
        assert_eq!(out.identity.max_abs, 0.0);
        assert_eq!(out.xi.value(&[0.3, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn quasi_einstein_inverse_matches_embed_example() {
        let chart = MetricChart::euclidean(1);
        let f = ScalarField::new(1, |x| (-x[0]).exp());
        let phi = ScalarField::new(1, |x| x[0]);
        let out =
            ricci_hessian_to_quasi_einstein(&chart, &phi, &f, 1.0, &SamplePlan::new(10, 3), 1e-12)
                .unwrap();
        assert!(out.identity.pass);
        // xi = -ln f = x
        let x = [0.6];
        assert!((out.xi.value(&x).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn lambda_field_constant_matches_const_lambda() {
        let (chart, psi) = gaussian(2, -1.0);
        let f = ScalarField::constant(2, 1.0);
        let plan = SamplePlan::new(10, 8);
        let a = ricci_hessian_residual(&chart, &f, &psi, &Lambda::Const(-1.0), 2.0, &plan, 1e-10)
            .unwrap();
        let b = ricci_hessian_residual(
            &chart,
            &f,
            &psi,
            &Lambda::Field(ScalarField::constant(2, -1.0)),
            2.0,
            &plan,
            1e-10,
        )
        .unwrap();
        assert_eq!(a.max_abs, b.max_abs);
    }
}
