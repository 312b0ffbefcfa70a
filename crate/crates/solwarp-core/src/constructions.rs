//! Explicit solution families and the reduced profile ODE: the expanding
//! conformally-flat family, the variable-lambda model-space family, the
//! Gaussian soliton, and the second-order linear profile equation with its
//! closed form.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::curvature_internals as ci;
use crate::chart::{sample_points, MetricChart, SamplePlan, ScalarField};
use crate::error::{GeomError, Result};
use crate::jets::Jet2;
use crate::report::{ResidualAccum, ResidualReport};
use crate::warped::{FiberModel, WarpedSpec};

/// Parameters of the expanding family on flat R^n scaled by rho^{-2}:
/// warping profile c1 e^{k x_n} + c2 e^{-k x_n} with k = (1/rho) sqrt(-lambda/m),
/// potential (lambda/(2 rho^2)) |y|^2 + a . y + b on y = (x_1, ..., x_{n-1}).
#[derive(Clone, Debug)]
pub struct ExpandingParams {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: Vec<f64>,
    pub b: f64,
    pub rho: f64,
}

impl ExpandingParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(GeomError::InvalidParameter(
                "base dimension must be at least 2".into(),
            ));
        }
        if self.m < 2 {
            return Err(GeomError::InvalidParameter(
                "fiber dimension must be at least 2".into(),
            ));
        }
        if self.lambda >= 0.0 {
            return Err(GeomError::InvalidParameter(format!(
                "the family is expanding only: lambda must be negative, got {}",
                self.lambda
            )));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 || self.c1 + self.c2 == 0.0 {
            return Err(GeomError::InvalidParameter(
                "profile coefficients must be non-negative and not both zero".into(),
            ));
        }
        if self.a.len() != self.n - 1 {
            return Err(GeomError::InvalidParameter(format!(
                "linear coefficient vector must have length n-1 = {}, got {}",
                self.n - 1,
                self.a.len()
            )));
        }
        if self.rho <= 0.0 {
            return Err(GeomError::InvalidParameter(
                "conformal factor rho must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Seeded parameter draws for the n = m = 2 sweep: lambda in
    /// [-4, -0.25], c1, c2 in [0, 2] bounded away from the degenerate
    /// c1 = c2 = 0 corner, a and b in [-1, 1], rho = 1.
    pub fn sample(seed: u64, count: usize) -> Vec<ExpandingParams> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let lambda = rng.random_range(-4.0..-0.25);
            let c1: f64 = rng.random_range(0.0..2.0);
            let c2: f64 = rng.random_range(0.0..2.0);
            if c1 + c2 < 1e-3 {
                continue;
            }
            let p = ExpandingParams {
                n: 2,
                m: 2,
                lambda,
                c1,
                c2,
                a: vec![rng.random_range(-1.0..1.0)],
                b: rng.random_range(-1.0..1.0),
                rho: 1.0,
            };
            out.push(p);
        }
        out
    }
}

/// Instantiated family member: base data plus the predicted constants.
#[derive(Clone)]
pub struct ExpandingFamily {
    pub base: MetricChart,
    pub f: ScalarField,
    pub phi: ScalarField,
    pub lambda: f64,
    pub m: usize,
    /// First integral 4 lambda c1 c2 (m-1)/m.
    pub mu: f64,
    /// Base-condition constant 2 lambda b - rho^2 |a|^2 + lambda (n-1).
    pub hamilton_c: f64,
}

impl ExpandingFamily {
    /// Pair the base data with the matching Einstein model fiber.
    pub fn to_warped_spec(&self) -> Result<WarpedSpec> {
        WarpedSpec::new(
            self.base.clone(),
            self.f.clone(),
            self.phi.clone(),
            FiberModel::for_mu(self.mu, self.m)?,
            self.lambda,
        )
    }
}

pub fn expanding_family(p: &ExpandingParams) -> Result<ExpandingFamily> {
    p.validate()?;
    let n = p.n;
    let mf = p.m as f64;
    let k = (1.0 / p.rho) * (-p.lambda / mf).sqrt();

    let inv_rho_sq = 1.0 / (p.rho * p.rho);
    let mut comps = Vec::new();
    for i in 0..n {
        for j in i..n {
            let c = if i == j { inv_rho_sq } else { 0.0 };
            comps.push(ScalarField::constant(n, c));
        }
    }
    let base = MetricChart::new(
        format!("flat-R{n}(rho={})", p.rho),
        n,
        vec![(-1.0, 1.0); n],
        comps,
    )?;

    let (c1, c2) = (p.c1, p.c2);
    let f = ScalarField::new(n, move |x| {
        let profile = x[n - 1] * k;
        profile.exp() * c1 + (-profile).exp() * c2
    });

    let coeff = p.lambda / (2.0 * p.rho * p.rho);
    let a = p.a.clone();
    let b = p.b;
    let phi = ScalarField::new(n, move |x| {
        let d = x[0].dim();
        let mut s = Jet2::constant(b, d);
        for (i, ai) in a.iter().enumerate() {
            s = s + x[i].abs2() * coeff + x[i] * *ai;
        }
        s
    });

    let a_norm_sq: f64 = p.a.iter().map(|v| v * v).sum();
    Ok(ExpandingFamily {
        base,
        f,
        phi,
        lambda: p.lambda,
        m: p.m,
        mu: 4.0 * p.lambda * p.c1 * p.c2 * (mf - 1.0) / mf,
        hamilton_c: 2.0 * p.lambda * p.b - p.rho * p.rho * a_norm_sq + p.lambda * (n as f64 - 1.0),
    })
}

/// Variable-lambda data on a model space of curvature tau/r^2: the height
/// function h drives f = e^{-(tau/m) h}, phi = h^2/(2m) and the lambda
/// field kappa (n-1) - (kappa/m) h^2 - kappa tau h, kappa = tau/r^2.
pub struct ModelSpaceFamily {
    pub chart: MetricChart,
    pub lambda: ScalarField,
    pub f: ScalarField,
    pub phi: ScalarField,
    pub height: ScalarField,
}

pub fn model_space_family(tau: f64, n: usize, m: f64, r: f64) -> Result<ModelSpaceFamily> {
    if tau != 1.0 && tau != -1.0 {
        return Err(GeomError::InvalidParameter(format!(
            "tau must be +1 or -1, got {tau}"
        )));
    }
    if m == 0.0 {
        return Err(GeomError::InvalidParameter("m must be nonzero".into()));
    }
    if r <= 0.0 {
        return Err(GeomError::InvalidParameter(
            "radius must be positive".into(),
        ));
    }
    let (chart, height) = if tau > 0.0 {
        (
            MetricChart::sphere_stereographic(n, r),
            MetricChart::sphere_height_field(n, r),
        )
    } else {
        (
            MetricChart::hyperbolic_half_space(n, r),
            MetricChart::hyperbolic_height_field(n, r),
        )
    };
    let kappa = tau / (r * r);

    let h = height.clone();
    let f = ScalarField::new(n, move |x| (h.apply(x) * (-tau / m)).exp());
    let h = height.clone();
    let phi = ScalarField::new(n, move |x| h.apply(x).abs2() / (2.0 * m));
    let h = height.clone();
    let nf = n as f64;
    let lambda = ScalarField::new(n, move |x| {
        let hv = h.apply(x);
        let d = hv.dim();
        Jet2::constant(kappa * (nf - 1.0), d) - hv.abs2() * (kappa / m) - hv * (kappa * tau)
    });

    Ok(ModelSpaceFamily {
        chart,
        lambda,
        f,
        phi,
        height,
    })
}

/// The Gaussian soliton: flat R^n with psi = (lambda/2) |x|^2.
pub fn gaussian_soliton(n: usize, lambda: f64) -> Result<(MetricChart, ScalarField)> {
    if n < 1 {
        return Err(GeomError::InvalidParameter("dimension must be >= 1".into()));
    }
    let chart = MetricChart::euclidean(n);
    let psi = ScalarField::new(n, move |x| {
        let d = x[0].dim();
        let mut s = Jet2::constant(0.0, d);
        for xi in x {
            s = s + xi.abs2();
        }
        s * (lambda / 2.0)
    });
    Ok((chart, psi))
}

/// Numeric profile solution of f'' + (lambda/(m rho^2)) f = 0 with, for
/// lambda < 0, the exponential closed form and the max deviation from it.
#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub deriv_values: Vec<f64>,
    pub closed_form: Option<Vec<f64>>,
    pub max_error: Option<f64>,
    /// False when the numeric profile dipped to f <= 0 somewhere.
    pub stayed_positive: bool,
}

/// Classical RK4 on the linear profile equation. The solver integrates any
/// sign of lambda; the closed-form comparison applies to lambda < 0 only.
pub fn solve_profile_ode(
    lambda: f64,
    m: f64,
    rho: f64,
    f0: f64,
    f0_prime: f64,
    interval: (f64, f64),
    dt: f64,
) -> Result<OdeSolution> {
    if m <= 0.0 || rho <= 0.0 {
        return Err(GeomError::InvalidParameter(
            "profile ODE needs m > 0 and rho > 0".into(),
        ));
    }
    if !(dt > 0.0) || interval.1 <= interval.0 {
        return Err(GeomError::InvalidParameter(
            "profile ODE needs dt > 0 and a nonempty interval".into(),
        ));
    }
    let omega = -lambda / (m * rho * rho); // f'' = omega f

    let mut x = interval.0;
    let mut u = f0;
    let mut v = f0_prime;
    let mut grid = vec![x];
    let mut values = vec![u];
    let mut derivs = vec![v];

    while x < interval.1 - 1e-12 {
        let h = dt.min(interval.1 - x);
        // RK4 for (u, v)' = (v, omega u)
        let (k1u, k1v) = (v, omega * u);
        let (k2u, k2v) = (v + 0.5 * h * k1v, omega * (u + 0.5 * h * k1u));
        let (k3u, k3v) = (v + 0.5 * h * k2v, omega * (u + 0.5 * h * k2u));
        let (k4u, k4v) = (v + h * k3v, omega * (u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += h;
        grid.push(x);
        values.push(u);
        derivs.push(v);
    }

    let stayed_positive = values.iter().all(|f| *f > 0.0);

    let (closed_form, max_error) = if lambda < 0.0 {
        let k = omega.sqrt();
        let c1 = 0.5 * (f0 + f0_prime / k);
        let c2 = 0.5 * (f0 - f0_prime / k);
        let cf: Vec<f64> = grid
            .iter()
            .map(|x| {
                let s = k * (x - interval.0);
                c1 * s.exp() + c2 * (-s).exp()
            })
            .collect();
        let err = values
            .iter()
            .zip(&cf)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        (Some(cf), Some(err))
    } else {
        (None, None)
    };

    Ok(OdeSolution {
        grid,
        values,
        deriv_values: derivs,
        closed_form,
        max_error,
        stayed_positive,
    })
}

/// Per-block residuals of the Ricci-Hessian system on a conformally flat
/// chart under the separable ansatz rho = rho(x_n), f = f(x_n),
/// phi = phi(y): cross-terms within y, the mixed (y, x_n) entries, the
/// y-diagonal, and the profile entry (x_n, x_n).
pub struct ConformalBlocks {
    pub off_diag: ResidualReport,
    pub mixed: ResidualReport,
    pub diag: ResidualReport,
    pub profile: ResidualReport,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn conformal_reduction_check(
    rho: &ScalarField,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    domain: Vec<(f64, f64)>,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ConformalBlocks> {
    if m == 0.0 {
        return Err(GeomError::InvalidParameter("m must be nonzero".into()));
    }
    let n = rho.dim();
    if n < 2 {
        return Err(GeomError::InvalidParameter(
            "conformal reduction needs n >= 2".into(),
        ));
    }
    let chart = MetricChart::conformal("conformal-ansatz", rho, domain)?;

    let mut off_diag = ResidualAccum::tensor("conformal-off-diagonal");
    let mut mixed = ResidualAccum::tensor("conformal-mixed");
    let mut diag = ResidualAccum::tensor("conformal-diagonal");
    let mut profile = ResidualAccum::tensor("conformal-profile");

    let last = n - 1;
    for x in sample_points(&chart, plan)? {
        let conn = ci::connection(&chart, &x, true)?;
        let (ric, _) = ci::ricci_from(&conn);
        let f_jet = f.eval_jet(&x)?;
        let fv = f_jet.value();
        if fv <= 0.0 {
            return Err(GeomError::NonpositiveWarping {
                point: x.clone(),
                value: fv,
            });
        }
        let phi_jet = phi.eval_jet(&x)?;
        let t = ric + ci::covariant_hessian(&conn, &phi_jet)
            - &conn.mj.g * lambda
            - ci::covariant_hessian(&conn, &f_jet) * (m / fv);

        let mut worst_off = 0.0_f64;
        let mut worst_mixed = 0.0_f64;
        let mut worst_diag = 0.0_f64;
        for i in 0..last {
            for j in 0..last {
                if i != j {
                    worst_off = worst_off.max(t[(i, j)].abs());
                }
            }
            worst_mixed = worst_mixed.max(t[(i, last)].abs());
            worst_diag = worst_diag.max(t[(i, i)].abs());
        }
        off_diag.add_residual(worst_off, &x);
        mixed.add_residual(worst_mixed, &x);
        diag.add_residual(worst_diag, &x);
        profile.add_residual(t[(last, last)].abs(), &x);
    }

    let off_diag = off_diag.finish(tol);
    let mixed = mixed.finish(tol);
    let diag = diag.finish(tol);
    let profile = profile.finish(tol);
    let pass = off_diag.pass && mixed.pass && diag.pass && profile.pass;
    Ok(ConformalBlocks {
        off_diag,
        mixed,
        diag,
        profile,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::{
        base_condition_residual, hamilton_constant, mu_constancy, ricci_hessian_residual,
        soliton_residual, Lambda,
    };

    #[test]
    fn expanding_family_reference_case() {
        let p = ExpandingParams {
            n: 2,
            m: 2,
            lambda: -2.0,
            c1: 1.0,
            c2: 1.0,
            a: vec![0.0],
            b: 0.0,
            rho: 1.0,
        };
        let fam = expanding_family(&p).unwrap();
        assert!((fam.mu + 4.0).abs() < 1e-15);
        // f = 2 cosh(x_n)
        assert!((fam.f.value(&[0.3, 0.0]).unwrap() - 2.0).abs() < 1e-15);

        let plan = SamplePlan::new(40, 17);
        let rh = ricci_hessian_residual(
            &fam.base,
            &fam.f,
            &fam.phi,
            &Lambda::Const(fam.lambda),
            fam.m as f64,
            &plan,
            1e-8,
        )
        .unwrap();
        assert!(rh.pass, "ricci-hessian max {}", rh.max_abs);

        let bc = base_condition_residual(
            &fam.base,
            &fam.f,
            &fam.phi,
            fam.lambda,
            fam.m as f64,
            &plan,
            1e-9,
        )
        .unwrap();
        assert!(bc.pass, "base-condition spread {}", bc.spread());
        assert!((bc.mean.unwrap() - fam.hamilton_c).abs() < 1e-10);

        let mu = mu_constancy(
            &fam.base,
            &fam.f,
            &fam.phi,
            fam.lambda,
            fam.m as f64,
            &plan,
            1e-9,
        )
        .unwrap();
        assert!(mu.pass, "mu spread {}", mu.spread());
        assert!((mu.mean.unwrap() - fam.mu).abs() < 1e-10);
    }

    #[test]
    fn single_exponential_profile_has_zero_mu() {
        let p = ExpandingParams {
            n: 2,
            m: 2,
            lambda: -1.0,
            c1: 1.5,
            c2: 0.0,
            a: vec![0.3],
            b: -0.2,
            rho: 1.0,
        };
        let fam = expanding_family(&p).unwrap();
        assert_eq!(fam.mu, 0.0);
        let mu = mu_constancy(
            &fam.base,
            &fam.f,
            &fam.phi,
            fam.lambda,
            2.0,
            &SamplePlan::new(30, 4),
            1e-9,
        )
        .unwrap();
        assert!(mu.pass);
        assert!(mu.mean.unwrap().abs() < 1e-10);
    }

    #[test]
    fn expanding_family_rejects_shrinking_lambda() {
        let p = ExpandingParams {
            n: 2,
            m: 2,
            lambda: 1.0,
            c1: 1.0,
            c2: 1.0,
            a: vec![0.0],
            b: 0.0,
            rho: 1.0,
        };
        assert!(expanding_family(&p).is_err());
    }

    #[test]
    fn nonunit_rho_profile_still_solves() {
        let p = ExpandingParams {
            n: 3,
            m: 2,
            lambda: -1.5,
            c1: 0.7,
            c2: 0.4,
            a: vec![0.2, -0.1],
            b: 0.5,
            rho: 2.0,
        };
        let fam = expanding_family(&p).unwrap();
        let plan = SamplePlan::new(30, 21);
        let rh = ricci_hessian_residual(
            &fam.base,
            &fam.f,
            &fam.phi,
            &Lambda::Const(fam.lambda),
            2.0,
            &plan,
            1e-9,
        )
        .unwrap();
        assert!(rh.pass, "max {}", rh.max_abs);
        let mu = mu_constancy(&fam.base, &fam.f, &fam.phi, fam.lambda, 2.0, &plan, 1e-9).unwrap();
        assert!(mu.pass, "spread {}", mu.spread());
        assert!((mu.mean.unwrap() - fam.mu).abs() < 1e-9);
        let bc = base_condition_residual(&fam.base, &fam.f, &fam.phi, fam.lambda, 2.0, &plan, 1e-9)
            .unwrap();
        assert!((bc.mean.unwrap() - fam.hamilton_c).abs() < 1e-9);
    }

    #[test]
    fn model_space_family_solves_with_variable_lambda() {
        for tau in [1.0, -1.0] {
            let fam = model_space_family(tau, 2, 2.0, 1.0).unwrap();
            let r = ricci_hessian_residual(
                &fam.chart,
                &fam.f,
                &fam.phi,
                &Lambda::Field(fam.lambda.clone()),
                2.0,
                &SamplePlan::new(30, 5),
                1e-7,
            )
            .unwrap();
            assert!(r.pass, "tau={tau}: max {}", r.max_abs);
        }
    }

    #[test]
    fn model_space_family_allows_negative_m() {
        let fam = model_space_family(1.0, 2, -1.0, 1.0).unwrap();
        let r = ricci_hessian_residual(
            &fam.chart,
            &fam.f,
            &fam.phi,
            &Lambda::Field(fam.lambda.clone()),
            -1.0,
            &SamplePlan::new(25, 6),
            1e-7,
        )
        .unwrap();
        assert!(r.pass, "max {}", r.max_abs);
        assert!(model_space_family(1.0, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn model_space_lambda_is_genuinely_variable() {
        let fam = model_space_family(1.0, 2, 2.0, 1.0).unwrap();
        let pts = sample_points(&fam.chart, &SamplePlan::new(30, 8)).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in &pts {
            let v = fam.lambda.value(x).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(hi - lo > 0.1, "lambda spread {}", hi - lo);
    }

    #[test]
    fn gaussian_soliton_cases() {
        let (chart, psi) = gaussian_soliton(2, 1.0).unwrap();
        let r = soliton_residual(&chart, &psi, 1.0, &SamplePlan::new(20, 0), 1e-12).unwrap();
        assert!(r.pass);

        let (chart, psi) = gaussian_soliton(3, -1.0).unwrap();
        let h = hamilton_constant(&chart, &psi, -1.0, &SamplePlan::new(20, 1), 1e-10).unwrap();
        assert!((h.mean.unwrap() + 3.0).abs() < 1e-12);

        let (chart, psi) = gaussian_soliton(1, 0.0).unwrap();
        assert_eq!(psi.value(&[0.5]).unwrap(), 0.0);
        let r = soliton_residual(&chart, &psi, 0.0, &SamplePlan::new(5, 0), 1e-15).unwrap();
        assert_eq!(r.max_abs, 0.0);
    }

    #[test]
    fn profile_ode_matches_cosh() {
        let sol = solve_profile_ode(-4.0, 4.0, 1.0, 2.0, 0.0, (0.0, 1.0), 1e-3).unwrap();
        let last = *sol.values.last().unwrap();
        assert!((last - 2.0 * 1.0_f64.cosh()).abs() < 1e-8, "f(1) = {last}");
        assert!(sol.max_error.unwrap() < 1e-8);
        assert!(sol.stayed_positive);
    }

    #[test]
    fn profile_ode_pure_growing_exponential() {
        // f0' = k picks out c2 = 0
        let (lambda, m, rho) = (-4.0_f64, 4.0_f64, 1.0_f64);
        let k = (-lambda / m).sqrt() / rho;
        let sol = solve_profile_ode(lambda, m, rho, 1.0, k, (0.0, 1.0), 1e-3).unwrap();
        assert!(sol.max_error.unwrap() < 1e-9);
        let last = *sol.values.last().unwrap();
        assert!((last - k.exp()).abs() < 1e-9);
    }

    #[test]
    fn profile_ode_is_fourth_order() {
        let coarse = solve_profile_ode(-4.0, 4.0, 1.0, 2.0, 0.0, (0.0, 1.0), 0.02).unwrap();
        let fine = solve_profile_ode(-4.0, 4.0, 1.0, 2.0, 0.0, (0.0, 1.0), 0.01).unwrap();
        let ratio = coarse.max_error.unwrap() / fine.max_error.unwrap();
        assert!(ratio > 12.0 && ratio < 20.0, "convergence ratio {ratio}");
    }

    #[test]
    fn profile_ode_flags_sign_change() {
        // lambda > 0 gives oscillatory solutions that cross zero
        let sol = solve_profile_ode(4.0, 1.0, 1.0, 1.0, 0.0, (0.0, 4.0), 1e-2).unwrap();
        assert!(!sol.stayed_positive);
        assert!(sol.closed_form.is_none());
    }

    #[test]
    fn conformal_reduction_accepts_family_data() {
        let p = ExpandingParams {
            n: 3,
            m: 2,
            lambda: -2.0,
            c1: 1.0,
            c2: 0.5,
            a: vec![0.1, -0.4],
            b: 0.2,
            rho: 1.0,
        };
        let fam = expanding_family(&p).unwrap();
        let rho = ScalarField::constant(3, 1.0);
        let blocks = conformal_reduction_check(
            &rho,
            &fam.f,
            &fam.phi,
            fam.lambda,
            2.0,
            vec![(-1.0, 1.0); 3],
            &SamplePlan::new(20, 13),
            1e-8,
        )
        .unwrap();
        assert!(blocks.pass);
    }

    #[test]
    fn conformal_reduction_flags_cross_term() {
        let p = ExpandingParams {
            n: 3,
            m: 2,
            lambda: -2.0,
            c1: 1.0,
            c2: 0.5,
            a: vec![0.0, 0.0],
            b: 0.0,
            rho: 1.0,
        };
        let fam = expanding_family(&p).unwrap();
        let rho = ScalarField::constant(3, 1.0);
        let phi = {
            let base = fam.phi.clone();
            ScalarField::new(3, move |x| base.apply(x) + x[0] * x[1] * 0.1)
        };
        let blocks = conformal_reduction_check(
            &rho,
            &fam.f,
            &phi,
            fam.lambda,
            2.0,
            vec![(-1.0, 1.0); 3],
            &SamplePlan::new(20, 13),
            1e-8,
        )
        .unwrap();
        assert!(!blocks.off_diag.pass);
        assert!((blocks.off_diag.max_abs - 0.1).abs() < 1e-12);
    }

    #[test]
    fn conformal_reduction_reports_rho_phi_incompatibility() {
        // nonconstant rho with phi depending on y: the mixed block picks up
        // the rho_{x_n} phi_{x_j} obstruction.
        let rho = ScalarField::new(2, |x| 1.0 + x[1] * 0.2);
        let f = ScalarField::constant(2, 1.0);
        let phi = ScalarField::new(2, |x| x[0]);
        let blocks = conformal_reduction_check(
            &rho,
            &f,
            &phi,
            0.0,
            2.0,
            vec![(-1.0, 1.0); 2],
            &SamplePlan::new(20, 2),
            1e-8,
        )
        .unwrap();
        assert!(!blocks.mixed.pass);
        assert!(blocks.mixed.max_abs > 1e-2);
    }
}
