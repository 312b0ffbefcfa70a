//! Christoffel symbols, Ricci curvature, covariant derivatives of scalars
//! and the contracted Bianchi check, all evaluated pointwise from jets of
//! the metric components.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{MetricChart, ScalarField};
use crate::error::{GeomError, Result};
use crate::jets::Jet2;

/// Metric value and its first/second coordinate derivatives at a point.
pub(crate) struct MetricJets {
    pub n: usize,
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    /// dg[k][(i, j)] = d_k g_ij
    pub dg: Vec<DMatrix<f64>>,
    /// d2g[k][l][(i, j)] = d^2_kl g_ij
    pub d2g: Vec<Vec<DMatrix<f64>>>,
}

impl MetricJets {
    pub fn eval(chart: &MetricChart, x: &[f64]) -> Result<Self> {
        chart.check_point(x)?;
        let n = chart.dim();
        let seeds = Jet2::seed_point(x)?;
        let mut g = DMatrix::zeros(n, n);
        let mut dg = vec![DMatrix::zeros(n, n); n];
        let mut d2g = vec![vec![DMatrix::zeros(n, n); n]; n];
        for i in 0..n {
            for j in i..n {
                let jet = chart.component(i, j).apply(&seeds).into_result(x)?;
                g[(i, j)] = jet.value();
                g[(j, i)] = jet.value();
                for k in 0..n {
                    dg[k][(i, j)] = jet.grad(k);
                    dg[k][(j, i)] = jet.grad(k);
                    for l in 0..n {
                        d2g[k][l][(i, j)] = jet.hess(k, l);
                        d2g[k][l][(j, i)] = jet.hess(k, l);
                    }
                }
            }
        }
        let chol = Cholesky::new(g.clone())
            .ok_or_else(|| GeomError::NotPositiveDefinite { point: x.to_vec() })?;
        let inv = chol.inverse();
        Ok(MetricJets { n, g, inv, dg, d2g })
    }

    /// d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    fn inv_deriv(&self, m: usize) -> DMatrix<f64> {
        -&self.inv * &self.dg[m] * &self.inv
    }
}

/// Connection data at a point: Christoffel symbols and (optionally) their
/// first coordinate derivatives.
pub(crate) struct Connection {
    pub mj: MetricJets,
    /// gamma[k][(i, j)] = Gamma^k_ij
    pub gamma: Vec<DMatrix<f64>>,
    /// dgamma[m][k][(i, j)] = d_m Gamma^k_ij (empty unless requested)
    pub dgamma: Vec<Vec<DMatrix<f64>>>,
}

pub(crate) fn connection(chart: &MetricChart, x: &[f64], derivs: bool) -> Result<Connection> {
    let mj = MetricJets::eval(chart, x)?;
    let n = mj.n;

    // first-kind symbols: [l](i,j) = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    let mut first = vec![DMatrix::zeros(n, n); n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                first[l][(i, j)] = 0.5 * (mj.dg[i][(j, l)] + mj.dg[j][(i, l)] - mj.dg[l][(i, j)]);
            }
        }
    }
    let mut gamma = vec![DMatrix::zeros(n, n); n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += mj.inv[(k, l)] * first[l][(i, j)];
                }
                gamma[k][(i, j)] = s;
            }
        }
    }

    let mut dgamma = Vec::new();
    if derivs {
        for m in 0..n {
            let dinv = mj.inv_deriv(m);
            let mut dg_m = vec![DMatrix::zeros(n, n); n];
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let dfirst = 0.5
                                * (mj.d2g[m][i][(j, l)] + mj.d2g[m][j][(i, l)]
                                    - mj.d2g[m][l][(i, j)]);
                            s += dinv[(k, l)] * first[l][(i, j)] + mj.inv[(k, l)] * dfirst;
                        }
                        dg_m[k][(i, j)] = s;
                    }
                }
            }
            dgamma.push(dg_m);
        }
    }

    Ok(Connection { mj, gamma, dgamma })
}

pub(crate) fn ricci_from(conn: &Connection) -> (DMatrix<f64>, f64) {
    let n = conn.mj.n;
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += conn.dgamma[k][k][(i, j)] - conn.dgamma[i][k][(k, j)];
                for l in 0..n {
                    s += conn.gamma[k][(k, l)] * conn.gamma[l][(i, j)]
                        - conn.gamma[k][(i, l)] * conn.gamma[l][(k, j)];
                }
            }
            ric[(i, j)] = s;
        }
    }
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((ric[(i, j)] - ric[(j, i)]).abs());
        }
    }
    let sym = 0.5 * (&ric + ric.transpose());
    (sym, asym)
}

/// Christoffel symbols Gamma^k_ij at `x`; result\[k\][(i, j)].
pub fn christoffel(chart: &MetricChart, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    Ok(connection(chart, x, false)?.gamma)
}

/// Ricci tensor at `x`, symmetrized.
pub fn ricci(chart: &MetricChart, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(ricci_with_asymmetry(chart, x)?.0)
}

/// Ricci tensor plus the max absolute asymmetry of the raw (unsymmetrized)
/// coordinate expression, which should sit at round-off level.
pub fn ricci_with_asymmetry(chart: &MetricChart, x: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let conn = connection(chart, x, true)?;
    Ok(ricci_from(&conn))
}

/// Scalar curvature S = g^{ij} Ric_ij.
pub fn scalar_curvature(chart: &MetricChart, x: &[f64]) -> Result<f64> {
    let conn = connection(chart, x, true)?;
    let (ric, _) = ricci_from(&conn);
    Ok((&conn.mj.inv * ric).trace())
}

fn field_jet(chart: &MetricChart, h: &ScalarField, x: &[f64]) -> Result<Jet2> {
    if h.dim() != chart.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: chart.dim(),
            got: h.dim(),
        });
    }
    h.eval_jet(x)
}

pub(crate) fn covariant_hessian(conn: &Connection, h: &Jet2) -> DMatrix<f64> {
    let n = conn.mj.n;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = h.hess(i, j);
            for k in 0..n {
                s -= conn.gamma[k][(i, j)] * h.grad(k);
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub(crate) fn grad_inner_mj(mj: &MetricJets, a: &Jet2, b: &Jet2) -> f64 {
    let n = mj.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += mj.inv[(i, j)] * a.grad(i) * b.grad(j);
        }
    }
    s
}

/// Contravariant gradient (grad h)^i = g^{ij} d_j h.
pub fn gradient(chart: &MetricChart, h: &ScalarField, x: &[f64]) -> Result<DVector<f64>> {
    chart.check_point(x)?;
    let jet = field_jet(chart, h, x)?;
    let mj = MetricJets::eval(chart, x)?;
    let dh = DVector::from_iterator(mj.n, jet.grad_slice().iter().copied());
    Ok(&mj.inv * dh)
}

/// Metric inner product of two scalar gradients, g(grad a, grad b).
pub fn gradient_inner(
    chart: &MetricChart,
    a: &ScalarField,
    b: &ScalarField,
    x: &[f64],
) -> Result<f64> {
    chart.check_point(x)?;
    let ja = field_jet(chart, a, x)?;
    let jb = field_jet(chart, b, x)?;
    let mj = MetricJets::eval(chart, x)?;
    Ok(grad_inner_mj(&mj, &ja, &jb))
}

/// |grad h|^2 in the chart metric.
pub fn gradient_norm_sq(chart: &MetricChart, h: &ScalarField, x: &[f64]) -> Result<f64> {
    gradient_inner(chart, h, h, x)
}

/// Covariant Hessian (hess h)_ij = d^2_ij h - Gamma^k_ij d_k h.
pub fn hessian(chart: &MetricChart, h: &ScalarField, x: &[f64]) -> Result<DMatrix<f64>> {
    let jet = field_jet(chart, h, x)?;
    let conn = connection(chart, x, false)?;
    Ok(covariant_hessian(&conn, &jet))
}

/// Laplace-Beltrami operator: trace of the covariant Hessian.
pub fn laplacian(chart: &MetricChart, h: &ScalarField, x: &[f64]) -> Result<f64> {
    let jet = field_jet(chart, h, x)?;
    let conn = connection(chart, x, false)?;
    let hess = covariant_hessian(&conn, &jet);
    Ok((&conn.mj.inv * hess).trace())
}

/// Drift Laplacian L h = Delta h - g(grad phi, grad h).
pub fn drift_laplacian(
    chart: &MetricChart,
    h: &ScalarField,
    phi: &ScalarField,
    x: &[f64],
) -> Result<f64> {
    let jh = field_jet(chart, h, x)?;
    let jphi = field_jet(chart, phi, x)?;
    let conn = connection(chart, x, false)?;
    let hess = covariant_hessian(&conn, &jh);
    Ok((&conn.mj.inv * hess).trace() - grad_inner_mj(&conn.mj, &jphi, &jh))
}

/// Ricci tensor of the conformally flat metric rho^{-2} delta, computed
/// from Euclidean derivatives of rho alone:
///
///   Ric = rho^{-2} { (n-2) rho D^2 rho + (rho Lap rho - (n-1) |D rho|^2) delta }
///
/// Must agree with [`ricci`] on the chart with components rho^{-2} delta.
pub fn conformal_ricci(rho: &ScalarField, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = rho.dim();
    let jet = rho.eval_jet(x)?;
    let r = jet.value();
    if r <= 0.0 {
        return Err(GeomError::InvalidParameter(format!(
            "conformal factor must be positive, rho({x:?}) = {r}"
        )));
    }
    let mut euclid_hess = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            euclid_hess[(i, j)] = jet.hess(i, j);
        }
    }
    let lap: f64 = (0..n).map(|i| jet.hess(i, i)).sum();
    let grad_sq: f64 = jet.grad_slice().iter().map(|v| v * v).sum();
    let scalar_part = r * lap - (n as f64 - 1.0) * grad_sq;
    let mut out = euclid_hess * ((n as f64 - 2.0) * r);
    for i in 0..n {
        out[(i, i)] += scalar_part;
    }
    Ok(out / (r * r))
}

fn ricci_and_scalar(chart: &MetricChart, x: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let conn = connection(chart, x, true)?;
    let (ric, _) = ricci_from(&conn);
    let s = (&conn.mj.inv * &ric).trace();
    Ok((ric, s))
}

/// Max component of div Ric - dS/2 at `x`. The identity holds for every
/// metric, so the result is a direct measure of numerical consistency.
/// Third derivatives of the metric are taken by central finite differences
/// of the jet-computed Ricci tensor and scalar curvature.
pub fn contracted_bianchi_residual(chart: &MetricChart, x: &[f64]) -> Result<f64> {
    const STEP: f64 = 1e-4;
    chart.check_point(x)?;
    let n = chart.dim();
    for (d, (lo, hi)) in chart.domain().iter().enumerate() {
        if x[d] - STEP < *lo || x[d] + STEP > *hi {
            return Err(GeomError::StencilOutsideDomain { point: x.to_vec() });
        }
    }

    let conn = connection(chart, x, true)?;
    let (ric0, _) = ricci_from(&conn);

    let mut dric = Vec::with_capacity(n);
    let mut ds = vec![0.0; n];
    for d in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[d] += STEP;
        xm[d] -= STEP;
        let (ric_p, s_p) = ricci_and_scalar(chart, &xp)?;
        let (ric_m, s_m) = ricci_and_scalar(chart, &xm)?;
        dric.push((ric_p - ric_m) / (2.0 * STEP));
        ds[d] = (s_p - s_m) / (2.0 * STEP);
    }

    let mut worst = 0.0_f64;
    for j in 0..n {
        // (div Ric)_j = g^{ik} (d_i Ric_kj - Gamma^l_ik Ric_lj - Gamma^l_ij Ric_kl)
        let mut div = 0.0;
        for i in 0..n {
            for k in 0..n {
                let mut cov = dric[i][(k, j)];
                for l in 0..n {
                    cov -= conn.gamma[l][(i, k)] * ric0[(l, j)];
                    cov -= conn.gamma[l][(i, j)] * ric0[(k, l)];
                }
                div += conn.mj.inv[(i, k)] * cov;
            }
        }
        worst = worst.max((div - 0.5 * ds[j]).abs());
    }
    Ok(worst)
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{sample_points, SamplePlan};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "expected {a} ~ {b} within {tol}");
    }

    #[test]
    fn flat_christoffel_vanishes() {
        let chart = MetricChart::euclidean(2);
        let gamma = christoffel(&chart, &[0.3, -0.4]).unwrap();
        for g in &gamma {
            assert_eq!(max_abs(g), 0.0);
        }
    }

    #[test]
    fn half_plane_christoffel_hand_values() {
        let chart = MetricChart::hyperbolic_half_space(2, 1.0);
        let gamma = christoffel(&chart, &[0.0, 1.0]).unwrap();
        // g = x2^{-2} delta at (0,1)
        assert_close(gamma[1][(0, 0)], 1.0, 1e-12); // Gamma^2_11
        assert_close(gamma[1][(1, 1)], -1.0, 1e-12); // Gamma^2_22
        assert_close(gamma[0][(0, 1)], -1.0, 1e-12); // Gamma^1_12
        assert_close(gamma[0][(1, 0)], -1.0, 1e-12);
        assert_close(gamma[0][(0, 0)], 0.0, 1e-12);
        assert_close(gamma[0][(1, 1)], 0.0, 1e-12);
        assert_close(gamma[1][(0, 1)], 0.0, 1e-12);
    }

    #[test]
    fn sphere_christoffel_vanishes_at_origin() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let gamma = christoffel(&chart, &[0.0, 0.0]).unwrap();
        for g in &gamma {
            assert!(max_abs(g) < 1e-14);
        }
    }

    #[test]
    fn flat_ricci_vanishes() {
        let chart = MetricChart::euclidean(3);
        let ric = ricci(&chart, &[0.2, 0.1, -0.5]).unwrap();
        assert_eq!(max_abs(&ric), 0.0);
    }

    #[test]
    fn unit_sphere_ricci_at_origin() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let ric = ricci(&chart, &[0.0, 0.0]).unwrap();
        // Ric = (n-1) g and g(0) = 4 delta
        assert_close(ric[(0, 0)], 4.0, 1e-9);
        assert_close(ric[(1, 1)], 4.0, 1e-9);
        assert_close(ric[(0, 1)], 0.0, 1e-9);
    }

    #[test]
    fn half_plane_ricci_is_minus_g() {
        let chart = MetricChart::hyperbolic_half_space(2, 1.0);
        let ric = ricci(&chart, &[0.0, 1.0]).unwrap();
        assert_close(ric[(0, 0)], -1.0, 1e-9);
        assert_close(ric[(1, 1)], -1.0, 1e-9);
        assert_close(ric[(0, 1)], 0.0, 1e-9);
    }

    #[test]
    fn scalar_curvature_model_values() {
        assert_close(
            scalar_curvature(&MetricChart::euclidean(2), &[0.1, 0.2]).unwrap(),
            0.0,
            1e-12,
        );
        assert_close(
            scalar_curvature(&MetricChart::sphere_stereographic(2, 1.0), &[0.2, -0.1]).unwrap(),
            2.0,
            1e-8,
        );
        assert_close(
            scalar_curvature(&MetricChart::hyperbolic_half_space(2, 1.0), &[0.3, 1.2]).unwrap(),
            -2.0,
            1e-8,
        );
    }

    #[test]
    fn flat_hessian_of_half_norm() {
        let chart = MetricChart::euclidean(2);
        let h = ScalarField::new(2, |x| (x[0].abs2() + x[1].abs2()) / 2.0);
        let hess = hessian(&chart, &h, &[0.4, -0.7]).unwrap();
        assert_close(hess[(0, 0)], 1.0, 1e-12);
        assert_close(hess[(1, 1)], 1.0, 1e-12);
        assert_close(hess[(0, 1)], 0.0, 1e-12);
        assert_close(laplacian(&chart, &h, &[0.4, -0.7]).unwrap(), 2.0, 1e-12);
    }

    #[test]
    fn sphere_height_satisfies_hessian_law() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let h = MetricChart::sphere_height_field(2, 1.0);
        for x in sample_points(&chart, &SamplePlan::new(20, 7)).unwrap() {
            let hess = hessian(&chart, &h, &x).unwrap();
            let hv = h.value(&x).unwrap();
            let mj = MetricJets::eval(&chart, &x).unwrap();
            let expected = &mj.g * (-hv);
            assert!(max_abs(&(hess - expected)) < 1e-9, "at {x:?}");
        }
    }

    #[test]
    fn hyperbolic_height_satisfies_hessian_law() {
        let chart = MetricChart::hyperbolic_half_space(2, 1.0);
        let h = MetricChart::hyperbolic_height_field(2, 1.0);
        for x in sample_points(&chart, &SamplePlan::new(20, 3)).unwrap() {
            let hess = hessian(&chart, &h, &x).unwrap();
            let hv = h.value(&x).unwrap();
            let mj = MetricJets::eval(&chart, &x).unwrap();
            let expected = &mj.g * hv;
            assert!(max_abs(&(hess - expected)) < 1e-9, "at {x:?}");
        }
    }

    #[test]
    fn half_plane_log_height_hessian() {
        let chart = MetricChart::hyperbolic_half_space(2, 1.0);
        let h = ScalarField::new(2, |x| x[1].log());
        let hess = hessian(&chart, &h, &[0.0, 1.0]).unwrap();
        assert_close(hess[(0, 0)], -1.0, 1e-12);
        assert_close(hess[(1, 1)], 0.0, 1e-12);
        assert_close(hess[(0, 1)], 0.0, 1e-12);
    }

    #[test]
    fn drift_laplacian_cases() {
        let flat1 = MetricChart::euclidean(1);
        let h = ScalarField::new(1, |x| x[0]);
        let phi = ScalarField::new(1, |x| x[0]);
        assert_close(
            drift_laplacian(&flat1, &h, &phi, &[0.2]).unwrap(),
            -1.0,
            1e-12,
        );

        let flat2 = MetricChart::euclidean(2);
        let q = ScalarField::new(2, |x| (x[0].abs2() + x[1].abs2()) / 2.0);
        // phi constant reduces to the plain Laplacian
        let c = ScalarField::constant(2, 3.0);
        assert_close(
            drift_laplacian(&flat2, &q, &c, &[0.3, 0.1]).unwrap(),
            2.0,
            1e-12,
        );
        // h = phi = |x|^2/2 at (1,1): 2 - 2 = 0
        assert_close(
            drift_laplacian(&flat2, &q, &q, &[1.0, 1.0]).unwrap(),
            0.0,
            1e-12,
        );
        let x = [0.9, 0.9];
        let expect = 2.0 - (x[0] * x[0] + x[1] * x[1]);
        assert_close(drift_laplacian(&flat2, &q, &q, &x).unwrap(), expect, 1e-12);
    }

    #[test]
    fn conformal_ricci_constant_factor_is_flat() {
        let rho = ScalarField::constant(2, 2.5);
        let ric = conformal_ricci(&rho, &[0.1, 0.2]).unwrap();
        assert!(max_abs(&ric) < 1e-14);
    }

    #[test]
    fn conformal_ricci_recovers_hyperbolic_plane() {
        // rho = x2 gives the upper half-plane metric; Ric = -g
        let rho = ScalarField::new(2, |x| x[1]);
        let x = [0.3, 0.8];
        let ric = conformal_ricci(&rho, &x).unwrap();
        let scale = 1.0 / (x[1] * x[1]);
        assert_close(ric[(0, 0)], -scale, 1e-10);
        assert_close(ric[(1, 1)], -scale, 1e-10);
        assert_close(ric[(0, 1)], 0.0, 1e-10);
    }

    #[test]
    fn conformal_ricci_cross_validates_against_chart_ricci() {
        // n = 3, rho = exp(x1): compare the closed form against the direct
        // jet Ricci of the chart with components rho^{-2} delta.
        let rho = ScalarField::new(3, |x| x[0].exp());
        let chart = MetricChart::conformal("exp-conformal", &rho, vec![(-1.0, 1.0); 3]).unwrap();
        for x in [[0.0, 0.0, 0.0], [0.2, -0.3, 0.4], [-0.5, 0.1, 0.6]] {
            let closed = conformal_ricci(&rho, &x).unwrap();
            let direct = ricci(&chart, &x).unwrap();
            assert!(max_abs(&(closed - direct)) < 1e-8, "at {x:?}");
        }
    }

    #[test]
    fn conformal_ricci_rejects_nonpositive_factor() {
        let rho = ScalarField::new(2, |x| x[1]);
        assert!(conformal_ricci(&rho, &[0.0, -1.0]).is_err());
    }

    #[test]
    fn bianchi_flat_is_exact() {
        let chart = MetricChart::euclidean(2);
        assert_eq!(
            contracted_bianchi_residual(&chart, &[0.1, 0.2]).unwrap(),
            0.0
        );
    }

    #[test]
    fn bianchi_sphere_beats_fd_tolerance() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let res = contracted_bianchi_residual(&chart, &[0.25, -0.35]).unwrap();
        assert!(res < 1e-4, "residual {res}");
    }

    #[test]
    fn bianchi_perturbed_flat_metric() {
        // delta + 0.1 x1 x2 (e1 (x) e2 + e2 (x) e1)
        let comps = vec![
            ScalarField::constant(2, 1.0),
            ScalarField::new(2, |x| 0.1 * (x[0] * x[1])),
            ScalarField::constant(2, 1.0),
        ];
        let chart = MetricChart::new("perturbed-flat", 2, vec![(-0.5, 0.5); 2], comps).unwrap();
        let res = contracted_bianchi_residual(&chart, &[0.2, 0.3]).unwrap();
        assert!(res < 1e-4, "residual {res}");
    }

    #[test]
    fn bianchi_stencil_guard() {
        let chart = MetricChart::euclidean(2);
        assert!(matches!(
            contracted_bianchi_residual(&chart, &[1.0, 0.0]),
            Err(GeomError::StencilOutsideDomain { .. })
        ));
    }

    #[test]
    fn ricci_presymmetrization_asymmetry_is_tiny() {
        let charts = [
            MetricChart::sphere_stereographic(2, 1.0),
            MetricChart::hyperbolic_half_space(3, 1.0),
        ];
        for chart in &charts {
            for x in sample_points(chart, &SamplePlan::new(10, 11)).unwrap() {
                let (_, asym) = ricci_with_asymmetry(chart, &x).unwrap();
                assert!(asym < 1e-9, "asymmetry {asym} on {} at {x:?}", chart.name());
            }
        }
    }

    #[test]
    fn degenerate_metric_is_hard_error() {
        let comps = vec![
            ScalarField::new(2, |x| x[0]), // g_00 = x1, nonpositive for x1 <= 0
            ScalarField::zero(2),
            ScalarField::constant(2, 1.0),
        ];
        let chart = MetricChart::new("degenerate", 2, vec![(-1.0, 1.0); 2], comps).unwrap();
        match ricci(&chart, &[-0.5, 0.0]) {
            Err(GeomError::NotPositiveDefinite { point }) => {
                assert_eq!(point, vec![-0.5, 0.0]);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }
}
