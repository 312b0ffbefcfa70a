//! Numerical embodiments of the rigidity and obstruction arguments: the
//! extremum chain for expanding/steady products, the no-minimum sign
//! check, the compact-base integral identity on the flat torus, and the
//! geodesic Ricci-integral probe for the compactness criterion.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chart::curvature_internals as ci;
use crate::chart::{geodesic, sample_points, MetricChart, SamplePlan, ScalarField};
use crate::error::{GeomError, Result};
use crate::jets::Jet2;

/// Verdict of the extremum-chain evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainVerdict {
    /// Chain holds and the sampled extrema agree: consistent with a
    /// constant warping function (Riemannian product).
    ConsistentConstant,
    /// Some inequality of the chain fails beyond tolerance.
    ViolatesChain,
    /// Chain holds on sampled data but constancy cannot be concluded.
    Inconclusive,
}

/// The four values of the chain
/// 0 >= f(p) lap f(p) = mu - lambda f(p)^2 >= mu - lambda f(q)^2
///   = f(q) lap f(q) >= 0 at the sampled max p and min q.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainValues {
    pub fp_lap: f64,
    pub mu_minus_lambda_fp_sq: f64,
    pub mu_minus_lambda_fq_sq: f64,
    pub fq_lap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub f_max: f64,
    pub max_location: Vec<f64>,
    pub f_min: f64,
    pub min_location: Vec<f64>,
    pub chain: ChainValues,
    /// Labels of chain inequalities that failed beyond tolerance.
    pub violated: Vec<String>,
    pub verdict: ChainVerdict,
    pub samples: usize,
}

fn euclid_newton_refine(
    chart: &MetricChart,
    f: &ScalarField,
    start: &[f64],
    maximize: bool,
) -> Vec<f64> {
    let n = chart.dim();
    let mut x = start.to_vec();
    let mut best = x.clone();
    let mut best_val = match f.value(&x) {
        Ok(v) => v,
        Err(_) => return best,
    };
    for _ in 0..12 {
        let jet = match f.eval_jet(&x) {
            Ok(j) => j,
            Err(_) => break,
        };
        let grad = DVector::from_iterator(n, jet.grad_slice().iter().copied());
        if grad.norm() < 1e-10 {
            break;
        }
        // pseudo-inverse Newton step: directions with negligible curvature
        // (the gradient is zero along them anyway) are left untouched
        let hess = DMatrix::from_fn(n, n, |i, j| jet.hess(i, j));
        let eig = SymmetricEigen::new(hess);
        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.abs()))
            .max(1e-12);
        let mut step = DVector::zeros(n);
        for k in 0..n {
            let ev = eig.eigenvalues[k];
            if ev.abs() > 1e-9 * scale {
                let q = eig.eigenvectors.column(k);
                step += q * (q.dot(&grad) / ev);
            }
        }
        if step.norm() == 0.0 {
            break;
        }
        let mut next = x.clone();
        for i in 0..n {
            next[i] -= step[i];
        }
        if !chart.contains(&next) {
            break;
        }
        let val = match f.value(&next) {
            Ok(v) => v,
            Err(_) => break,
        };
        let improved = if maximize {
            val >= best_val
        } else {
            val <= best_val
        };
        if improved {
            best_val = val;
            best = next.clone();
        }
        let moved: f64 = step.norm();
        x = next;
        if moved < 1e-9 {
            break;
        }
    }
    best
}

fn is_interior(chart: &MetricChart, x: &[f64], margin: f64) -> bool {
    if chart.is_periodic() {
        return true;
    }
    x.iter().zip(chart.domain()).all(|(v, (lo, hi))| {
        let pad = (margin + 0.01) * (hi - lo);
        *v > lo + pad && *v < hi - pad
    })
}

/// Evaluate the expanding/steady extremum chain at the sampled extrema of
/// f. Locations are the sampled argmax/argmin, sharpened by a local
/// Newton refinement; a sampled chart cannot certify global extrema, so
/// the verdict speaks about sampled data only.
#[allow(clippy::too_many_arguments)]
pub fn extremum_chain_check(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    mu: f64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ExtremumReport> {
    if lambda > 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "extremum chain applies to expanding or steady data (lambda <= 0), got {lambda}"
        )));
    }
    if m == 0.0 {
        return Err(GeomError::InvalidParameter("m must be nonzero".into()));
    }
    let points = sample_points(base, plan)?;
    let mut max_at = points[0].clone();
    let mut min_at = points[0].clone();
    let mut f_max = f64::NEG_INFINITY;
    let mut f_min = f64::INFINITY;
    let mut drift_formula_min = f64::INFINITY;
    for x in &points {
        let v = f.value(x)?;
        if v <= 0.0 {
            return Err(GeomError::NonpositiveWarping {
                point: x.clone(),
                value: v,
            });
        }
        if v > f_max {
            f_max = v;
            max_at = x.clone();
        }
        if v < f_min {
            f_min = v;
            min_at = x.clone();
        }
        if lambda == 0.0 {
            let jet = f.eval_jet(x)?;
            let mj = ci::MetricJets::eval(base, x)?;
            let grad_sq = ci::grad_inner_mj(&mj, &jet, &jet);
            drift_formula_min = drift_formula_min.min((1.0 - m) * grad_sq / v);
        }
    }

    let max_at = euclid_newton_refine(base, f, &max_at, true);
    let min_at = euclid_newton_refine(base, f, &min_at, false);
    let f_max = f.value(&max_at)?;
    let f_min = f.value(&min_at)?;

    let lap_at = |x: &[f64]| -> Result<f64> {
        let jet = f.eval_jet(x)?;
        let conn = ci::connection(base, x, false)?;
        let hess = ci::covariant_hessian(&conn, &jet);
        Ok((&conn.mj.inv * hess).trace())
    };
    let chain = ChainValues {
        fp_lap: f_max * lap_at(&max_at)?,
        mu_minus_lambda_fp_sq: mu - lambda * f_max * f_max,
        mu_minus_lambda_fq_sq: mu - lambda * f_min * f_min,
        fq_lap: f_min * lap_at(&min_at)?,
    };

    let mut violated = Vec::new();
    if chain.fp_lap > tol {
        violated.push("upper-sign: 0 >= f(p) lap f(p)".to_string());
    }
    if (chain.fp_lap - chain.mu_minus_lambda_fp_sq).abs() > tol {
        violated.push("max-equality: f(p) lap f(p) = mu - lambda f(p)^2".to_string());
    }
    if chain.mu_minus_lambda_fp_sq < chain.mu_minus_lambda_fq_sq - tol {
        violated.push("monotonicity: mu - lambda f(p)^2 >= mu - lambda f(q)^2".to_string());
    }
    if (chain.mu_minus_lambda_fq_sq - chain.fq_lap).abs() > tol {
        violated.push("min-equality: mu - lambda f(q)^2 = f(q) lap f(q)".to_string());
    }
    if chain.fq_lap < -tol {
        violated.push("lower-sign: f(q) lap f(q) >= 0".to_string());
    }
    if lambda == 0.0 && drift_formula_min < -tol && is_interior(base, &min_at, plan.margin) {
        // corroborate with the direct drift Laplacian at the sampled minimum,
        // which the minimum property forces to be >= 0
        let f_jet = f.eval_jet(&min_at)?;
        let phi_jet = phi.eval_jet(&min_at)?;
        let conn = ci::connection(base, &min_at, false)?;
        let lf_direct = (&conn.mj.inv * ci::covariant_hessian(&conn, &f_jet)).trace()
            - ci::grad_inner_mj(&conn.mj, &phi_jet, &f_jet);
        violated.push(format!(
            "drift-sign-at-interior-min: (1-m)|grad f|^2/f reaches {drift_formula_min:.3e} \
             yet the sampled interior minimum has L f = {lf_direct:.3e}"
        ));
    }

    let f_scale = f_max.abs().max(1.0);
    let verdict = if !violated.is_empty() {
        ChainVerdict::ViolatesChain
    } else if (f_max - f_min).abs() <= 100.0 * tol * f_scale {
        ChainVerdict::ConsistentConstant
    } else {
        ChainVerdict::Inconclusive
    };

    Ok(ExtremumReport {
        f_max,
        max_location: max_at,
        f_min,
        min_location: min_at,
        chain,
        violated,
        verdict,
        samples: points.len(),
    })
}

/// Sign sweep for the no-minimum remark: with lambda > 0 and mu <= 0 the
/// first integral forces L f = (mu - lambda f^2 - (m-1)|grad f|^2)/f < 0.
/// The report carries the worst (largest) formula value over the sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoMinimumReport {
    pub samples: usize,
    pub max_formula_value: f64,
    pub worst_point: Vec<f64>,
    /// Direct drift Laplacian lap f - g(grad phi, grad f) at the same
    /// sweep, as a diagnostic; equals the formula on genuine solutions.
    pub max_drift_value: f64,
    pub margin: f64,
    pub pass: bool,
}

pub fn no_minimum_check(
    base: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    mu: f64,
    m: f64,
    plan: &SamplePlan,
) -> Result<NoMinimumReport> {
    if lambda <= 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "the no-minimum check needs lambda > 0, got {lambda}"
        )));
    }
    if mu > 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "the no-minimum check needs mu <= 0, got {mu}"
        )));
    }
    let points = sample_points(base, plan)?;
    let mut max_formula = f64::NEG_INFINITY;
    let mut worst = points[0].clone();
    let mut max_drift = f64::NEG_INFINITY;
    for x in &points {
        let f_jet = f.eval_jet(x)?;
        let fv = f_jet.value();
        if fv <= 0.0 {
            return Err(GeomError::NonpositiveWarping {
                point: x.clone(),
                value: fv,
            });
        }
        let conn = ci::connection(base, x, false)?;
        let grad_f_sq = ci::grad_inner_mj(&conn.mj, &f_jet, &f_jet);
        let formula = (mu - lambda * fv * fv - (m - 1.0) * grad_f_sq) / fv;
        if formula > max_formula {
            max_formula = formula;
            worst = x.clone();
        }
        let phi_jet = phi.eval_jet(x)?;
        let hess_f = ci::covariant_hessian(&conn, &f_jet);
        let drift = (&conn.mj.inv * hess_f).trace() - ci::grad_inner_mj(&conn.mj, &phi_jet, &f_jet);
        max_drift = max_drift.max(drift);
    }
    Ok(NoMinimumReport {
        samples: points.len(),
        max_formula_value: max_formula,
        worst_point: worst,
        max_drift_value: max_drift,
        margin: -max_formula,
        pass: max_formula < 0.0,
    })
}

/// Quadrature results of the compact-base identity on the flat torus:
/// the drift integration-by-parts residual (zero for any periodic data)
/// and the displayed identity
/// mu vol_phi = lambda int f^2 e^{-phi} + (m-2) int |grad f|^2 e^{-phi}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusIdentityReport {
    pub grid: usize,
    pub samples: usize,
    /// |int (f L f + |grad f|^2) e^{-phi}| relative to vol_phi.
    pub ibp_residual: f64,
    /// Identity residual relative to vol_phi, with mu taken as the grid
    /// mean of the pointwise first integral.
    pub identity_residual: f64,
    pub mu_mean: f64,
    pub mu_spread: f64,
    pub vol_phi: f64,
    pub int_f_sq: f64,
    pub int_grad_f_sq: f64,
}

fn check_periodic(name: &str, field: &ScalarField, n: usize) -> Result<()> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let anchors = [0.7, 1.9, 3.3, 4.6, 5.5, 2.4, 0.3, 1.1];
    for axis in 0..n {
        for probe in 0..3 {
            let mut lo = vec![0.0; n];
            for (d, v) in lo.iter_mut().enumerate() {
                *v = anchors[(d + probe * 3) % anchors.len()];
            }
            let mut hi = lo.clone();
            lo[axis] = 0.0;
            hi[axis] = two_pi;
            let gap = (field.value(&lo)? - field.value(&hi)?).abs();
            if gap > 1e-9 {
                return Err(GeomError::InvalidParameter(format!(
                    "field `{name}` is not 2pi-periodic along axis {axis}: boundary mismatch {gap:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Trapezoid (= rectangle, by periodicity) quadrature of the compact-base
/// identity on the flat torus [0, 2pi)^n with `grid` nodes per axis.
pub fn torus_integral_identity(
    torus: &MetricChart,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: f64,
    m: f64,
    grid: usize,
) -> Result<TorusIdentityReport> {
    if !torus.is_periodic() {
        return Err(GeomError::InvalidParameter(
            "the integral identity harness needs the flat torus chart".into(),
        ));
    }
    if grid < 2 {
        return Err(GeomError::InvalidParameter(
            "grid must be at least 2".into(),
        ));
    }
    let n = torus.dim();
    check_periodic("f", f, n)?;
    check_periodic("phi", phi, n)?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let h = two_pi / grid as f64;
    let weight = h.powi(n as i32);

    let total = grid.pow(n as u32);
    let mut ibp = 0.0;
    let mut vol = 0.0;
    let mut int_f_sq = 0.0;
    let mut int_grad_sq = 0.0;
    let mut mu_sum = 0.0;
    let mut mu_min = f64::INFINITY;
    let mut mu_max = f64::NEG_INFINITY;

    let mut x = vec![0.0; n];
    for flat_idx in 0..total {
        let mut rem = flat_idx;
        for d in 0..n {
            x[d] = (rem % grid) as f64 * h;
            rem /= grid;
        }
        let f_jet = f.eval_jet(&x)?;
        let phi_jet = phi.eval_jet(&x)?;
        let fv = f_jet.value();

        // flat metric: plain Euclidean derivatives
        let lap_f: f64 = (0..n).map(|i| f_jet.hess(i, i)).sum();
        let grad_f_sq: f64 = f_jet.grad_slice().iter().map(|g| g * g).sum();
        let coupling: f64 = (0..n).map(|i| f_jet.grad(i) * phi_jet.grad(i)).sum();
        let drift_lap = lap_f - coupling;
        let density = (-phi_jet.value()).exp() * weight;

        ibp += (fv * drift_lap + grad_f_sq) * density;
        vol += density;
        int_f_sq += fv * fv * density;
        int_grad_sq += grad_f_sq * density;

        let mu = lambda * fv * fv + fv * drift_lap + (m - 1.0) * grad_f_sq;
        mu_sum += mu;
        mu_min = mu_min.min(mu);
        mu_max = mu_max.max(mu);
    }

    let mu_mean = mu_sum / total as f64;
    let identity = mu_mean * vol - lambda * int_f_sq - (m - 2.0) * int_grad_sq;

    Ok(TorusIdentityReport {
        grid,
        samples: total,
        ibp_residual: ibp.abs() / vol,
        identity_residual: identity.abs() / vol,
        mu_mean,
        mu_spread: mu_max - mu_min,
        vol_phi: vol,
        int_f_sq,
        int_grad_f_sq: int_grad_sq,
    })
}

/// One geodesic of the compactness probe: Ric(gamma', gamma') samples, the
/// running integral and the slack of the proof's linear lower bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicProbeTrace {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
    pub arc: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub ric_vv: Vec<f64>,
    pub running_integral: Vec<f64>,
    /// Constant part of the lower bound: initial terms plus gradient sups.
    pub bound_const: f64,
    pub min_slack: f64,
    pub exited: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub hypothesis_min_eigenvalue: f64,
    pub hypothesis_pass: bool,
    pub sup_grad_phi: f64,
    pub sup_grad_log_f: f64,
    pub traces: Vec<GeodesicProbeTrace>,
    pub pass: bool,
}

fn lowered_min_eigenvalue(q: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<f64> {
    let chol = Cholesky::new(g.clone())
        .ok_or_else(|| GeomError::NotPositiveDefinite { point: Vec::new() })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::InvalidParameter("singular Cholesky factor".into()))?;
    let b = &l_inv * q * l_inv.transpose();
    let sym = 0.5 * (&b + b.transpose());
    let eig = SymmetricEigen::new(sym);
    Ok(eig.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(*v)))
}

fn covector_on(jet: &Jet2, v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(i, vi)| jet.grad(i) * vi).sum()
}

/// Verify the lower-bound hypothesis Ric + hess(phi) - (m/f) hess(f) >= c g
/// on a sample sweep, then integrate Ric(gamma', gamma') along unit-speed
/// geodesics and check the proof's bound
/// int_0^t Ric >= c t - (initial terms + gradient sups) for all recorded t.
/// The probe refuses to run geodesics when the hypothesis fails.
#[allow(clippy::too_many_arguments)]
pub fn ricci_integral_probe(
    base: &MetricChart,
    phi: &ScalarField,
    f: &ScalarField,
    m: f64,
    c: f64,
    starts: &[(Vec<f64>, Vec<f64>)],
    total: f64,
    dt: f64,
    plan: &SamplePlan,
) -> Result<ProbeReport> {
    if m <= 0.0 || c <= 0.0 {
        return Err(GeomError::InvalidParameter(
            "the probe needs m > 0 and c > 0".into(),
        ));
    }
    const EIG_TOL: f64 = 1e-9;

    let mut min_eig = f64::INFINITY;
    let mut sup_grad_phi = 0.0_f64;
    let mut sup_grad_log_f = 0.0_f64;
    for x in sample_points(base, plan)? {
        let conn = ci::connection(base, &x, true)?;
        let (ric, _) = ci::ricci_from(&conn);
        let f_jet = f.eval_jet(&x)?;
        let fv = f_jet.value();
        if fv <= 0.0 {
            return Err(GeomError::NonpositiveWarping {
                point: x,
                value: fv,
            });
        }
        let phi_jet = phi.eval_jet(&x)?;
        let q = &ric + ci::covariant_hessian(&conn, &phi_jet)
            - ci::covariant_hessian(&conn, &f_jet) * (m / fv)
            - &conn.mj.g * c;
        min_eig = min_eig.min(lowered_min_eigenvalue(&q, &conn.mj.g)?);
        sup_grad_phi = sup_grad_phi.max(ci::grad_inner_mj(&conn.mj, &phi_jet, &phi_jet).sqrt());
        sup_grad_log_f =
            sup_grad_log_f.max(ci::grad_inner_mj(&conn.mj, &f_jet, &f_jet).sqrt() / fv);
    }
    let hypothesis_pass = min_eig >= -EIG_TOL;
    if !hypothesis_pass {
        return Ok(ProbeReport {
            hypothesis_min_eigenvalue: min_eig,
            hypothesis_pass,
            sup_grad_phi,
            sup_grad_log_f,
            traces: Vec::new(),
            pass: false,
        });
    }

    let mut traces = Vec::new();
    let mut all_pass = true;
    for (start, direction) in starts {
        let path = geodesic(base, start, direction, total, dt)?;
        let v0 = &path.velocities[0];
        let phi0 = phi.eval_jet(start)?;
        let f0 = f.eval_jet(start)?;
        let bound_const = covector_on(&phi0, v0).abs()
            + m * (covector_on(&f0, v0).abs() / f0.value())
            + sup_grad_phi
            + m * sup_grad_log_f;

        let mut ric_vv = Vec::with_capacity(path.points.len());
        for (x, v) in path.points.iter().zip(&path.velocities) {
            let ric = crate::chart::ricci(base, x)?;
            let n = base.dim();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += ric[(i, j)] * v[i] * v[j];
                }
            }
            ric_vv.push(s);
        }
        let mut running = Vec::with_capacity(ric_vv.len());
        let mut acc = 0.0;
        running.push(0.0);
        for k in 1..ric_vv.len() {
            let ds = path.arc[k] - path.arc[k - 1];
            acc += 0.5 * (ric_vv[k - 1] + ric_vv[k]) * ds;
            running.push(acc);
        }
        let mut min_slack = f64::INFINITY;
        for (s, integral) in path.arc.iter().zip(&running) {
            min_slack = min_slack.min(integral - (c * s - bound_const));
        }
        let pass = min_slack >= -1e-9;
        all_pass &= pass;
        traces.push(GeodesicProbeTrace {
            start: start.clone(),
            direction: direction.clone(),
            arc: path.arc,
            points: path.points,
            ric_vv,
            running_integral: running,
            bound_const,
            min_slack,
            exited: path.exited,
            pass,
        });
    }

    Ok(ProbeReport {
        hypothesis_min_eigenvalue: min_eig,
        hypothesis_pass,
        sup_grad_phi,
        sup_grad_log_f,
        traces,
        pass: all_pass,
    })
}
