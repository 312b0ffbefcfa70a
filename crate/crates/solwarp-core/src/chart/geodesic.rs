//! Fixed-step RK4 geodesic integration on a chart.

use super::curvature::connection;
use super::MetricChart;
use crate::error::{GeomError, Result};

/// A sampled geodesic: arc-length parameters, points, velocities.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub arc: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// True when the path left the domain box and was truncated.
    pub exited: bool,
}

/// Metric norm |v|_g at x.
pub fn metric_norm(chart: &MetricChart, x: &[f64], v: &[f64]) -> Result<f64> {
    let conn = connection(chart, x, false)?;
    let n = chart.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += conn.mj.g[(i, j)] * v[i] * v[j];
        }
    }
    Ok(s.sqrt())
}

/// Geodesic acceleration: a^k = -Gamma^k_ij v^i v^j.
fn acceleration(chart: &MetricChart, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let conn = connection(chart, x, false)?;
    let n = chart.dim();
    let mut a = vec![0.0; n];
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += conn.gamma[k][(i, j)] * v[i] * v[j];
            }
        }
        a[k] = -s;
    }
    Ok(a)
}

struct State {
    x: Vec<f64>,
    v: Vec<f64>,
}

fn rhs(chart: &MetricChart, s: &State) -> Result<State> {
    Ok(State {
        x: s.v.clone(),
        v: acceleration(chart, &s.x, &s.v)?,
    })
}

fn advanced(s: &State, k: &State, h: f64) -> State {
    State {
        x: s.x.iter().zip(&k.x).map(|(a, b)| a + h * b).collect(),
        v: s.v.iter().zip(&k.v).map(|(a, b)| a + h * b).collect(),
    }
}

/// One classical RK4 step; `None` when a stage leaves the domain.
fn rk4_step(chart: &MetricChart, s: &State, dt: f64) -> Result<Option<State>> {
    let stage = |st: &State| -> Result<Option<State>> {
        if !chart.contains(&st.x) {
            return Ok(None);
        }
        rhs(chart, st).map(Some)
    };
    let k1 = match stage(s)? {
        Some(k) => k,
        None => return Ok(None),
    };
    let k2 = match stage(&advanced(s, &k1, dt / 2.0))? {
        Some(k) => k,
        None => return Ok(None),
    };
    let k3 = match stage(&advanced(s, &k2, dt / 2.0))? {
        Some(k) => k,
        None => return Ok(None),
    };
    let k4 = match stage(&advanced(s, &k3, dt))? {
        Some(k) => k,
        None => return Ok(None),
    };
    let n = s.x.len();
    let mut out = State {
        x: vec![0.0; n],
        v: vec![0.0; n],
    };
    for i in 0..n {
        out.x[i] = s.x[i] + dt / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
        out.v[i] = s.v[i] + dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }
    if !chart.contains(&out.x) {
        return Ok(None);
    }
    Ok(Some(out))
}

/// Integrate the geodesic from `x0` in direction `v0` (normalized to unit
/// metric speed internally) for arc length `total` with step `dt`. The
/// path is truncated with `exited = true` if it reaches the domain box.
pub fn geodesic(
    chart: &MetricChart,
    x0: &[f64],
    v0: &[f64],
    total: f64,
    dt: f64,
) -> Result<GeodesicPath> {
    chart.check_point(x0)?;
    if !(dt > 0.0 && total > 0.0) {
        return Err(GeomError::InvalidParameter(
            "geodesic needs total > 0 and dt > 0".into(),
        ));
    }
    let norm = metric_norm(chart, x0, v0)?;
    if norm <= 0.0 || !norm.is_finite() {
        return Err(GeomError::InvalidParameter(
            "initial velocity must have positive metric norm".into(),
        ));
    }
    let mut state = State {
        x: x0.to_vec(),
        v: v0.iter().map(|c| c / norm).collect(),
    };

    let mut path = GeodesicPath {
        arc: vec![0.0],
        points: vec![state.x.clone()],
        velocities: vec![state.v.clone()],
        exited: false,
    };

    let mut s = 0.0;
    while s < total - 1e-12 {
        let step = dt.min(total - s);
        match rk4_step(chart, &state, step)? {
            Some(next) => {
                state = next;
                s += step;
                path.arc.push(s);
                path.points.push(state.x.clone());
                path.velocities.push(state.v.clone());
            }
            None => {
                path.exited = true;
                break;
            }
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_geodesic_is_a_straight_line() {
        let chart = MetricChart::euclidean_box(2, vec![(-2.0, 2.0); 2]);
        let path = geodesic(&chart, &[0.0, 0.0], &[1.0, 0.0], 1.0, 1e-3).unwrap();
        assert!(!path.exited);
        let end = path.points.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-12);
        assert!(end[1].abs() < 1e-12);
    }

    #[test]
    fn sphere_geodesic_conserves_speed() {
        let chart = MetricChart::sphere_stereographic(2, 1.0);
        let path = geodesic(&chart, &[0.0, 0.0], &[0.3, 0.4], 1.0, 1e-3).unwrap();
        assert!(!path.exited);
        for (x, v) in path.points.iter().zip(&path.velocities).step_by(100) {
            let speed = metric_norm(&chart, x, v).unwrap();
            assert!((speed - 1.0).abs() < 1e-8, "speed {speed}");
        }
    }

    #[test]
    fn half_plane_geodesic_conserves_speed() {
        let chart = MetricChart::hyperbolic_half_space(2, 1.0);
        let path = geodesic(&chart, &[0.0, 1.0], &[1.0, 0.0], 1.0, 1e-3).unwrap();
        for (x, v) in path.points.iter().zip(&path.velocities).step_by(50) {
            let speed = metric_norm(&chart, x, v).unwrap();
            assert!((speed - 1.0).abs() < 1e-8);
        }
        // Geodesics from (0,1) with horizontal velocity trace a semicircle:
        // x^2 + y^2 = 1 stays constant.
        for x in path.points.iter().step_by(100) {
            let r2 = x[0] * x[0] + x[1] * x[1];
            assert!((r2 - 1.0).abs() < 1e-6, "radius^2 {r2}");
        }
    }

    #[test]
    fn exit_is_flagged_and_truncated() {
        let chart = MetricChart::euclidean(2); // box [-1,1]^2
        let path = geodesic(&chart, &[0.5, 0.0], &[1.0, 0.0], 2.0, 1e-2).unwrap();
        assert!(path.exited);
        let last = path.arc.last().unwrap();
        assert!(*last < 2.0);
        for p in &path.points {
            assert!(chart.contains(p));
        }
    }

    #[test]
    fn zero_velocity_is_rejected() {
        let chart = MetricChart::euclidean(2);
        assert!(geodesic(&chart, &[0.0, 0.0], &[0.0, 0.0], 1.0, 1e-2).is_err());
    }
}
