//! Christoffel symbols, scalar curvature and geodesics away from the
//! degeneracy locus.

use serde::{Deserialize, Serialize};

use crate::atlas::{canonicalize, mat_apply, ManifoldSpec};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, MetricSpec, Sym2, TangentVector, Window};
use crate::ode::rk4_step;

/// Central-difference step for numeric derivatives of the metric.
pub const FD_STEP: f64 = 1e-5;
/// Default geodesic step.
pub const DEFAULT_DLAMBDA: f64 = 1e-3;

/// The six independent Christoffel symbols `Γ^a_bc` (symmetric in `b, c`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChristoffelSample {
    pub point: ChartPoint,
    pub t_tt: f64,
    pub t_tx: f64,
    pub t_xx: f64,
    pub x_tt: f64,
    pub x_tx: f64,
    pub x_xx: f64,
}

impl ChristoffelSample {
    pub fn as_array(&self) -> [f64; 6] {
        [self.t_tt, self.t_tx, self.t_xx, self.x_tt, self.x_tx, self.x_xx]
    }

    pub fn max_abs_diff(&self, o: &ChristoffelSample) -> f64 {
        self.as_array()
            .iter()
            .zip(o.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Γ^a_bc u^b u^c` for `a = t, x`.
    pub fn contract(&self, u: [f64; 2]) -> [f64; 2] {
        let q = |tt: f64, tx: f64, xx: f64| tt * u[0] * u[0] + 2.0 * tx * u[0] * u[1] + xx * u[1] * u[1];
        [q(self.t_tt, self.t_tx, self.t_xx), q(self.x_tt, self.x_tx, self.x_xx)]
    }
}

/// Levi-Civita connection from the metric and its first partials
/// `dg[k] = ∂_k (g_tt, g_tx, g_xx)`.
fn christoffel_from(p: ChartPoint, g: Sym2, dg: [[f64; 3]; 2]) -> Result<ChristoffelSample> {
    let inv = g.inverse().ok_or(Error::Degenerate {
        t: p.t,
        x: p.x,
        det: g.det(),
    })?;
    let ginv = [[inv.tt, inv.tx], [inv.tx, inv.xx]];
    // ∂_k g_ij
    let d = |k: usize, i: usize, j: usize| dg[k][i + j];
    let gamma = |a: usize, b: usize, c: usize| {
        0.5 * (0..2)
            .map(|e| ginv[a][e] * (d(b, e, c) + d(c, b, e) - d(e, b, c)))
            .sum::<f64>()
    };
    Ok(ChristoffelSample {
        point: p,
        t_tt: gamma(0, 0, 0),
        t_tx: gamma(0, 0, 1),
        t_xx: gamma(0, 1, 1),
        x_tt: gamma(1, 0, 0),
        x_tx: gamma(1, 0, 1),
        x_xx: gamma(1, 1, 1),
    })
}

fn check_nondegenerate(m: &MetricSpec, p: ChartPoint, tol_deg: f64) -> Result<Sym2> {
    let g = m.sym(p)?;
    let det = g.det();
    if det.abs() <= tol_deg {
        return Err(Error::Degenerate { t: p.t, x: p.x, det });
    }
    Ok(g)
}

/// Christoffel symbols with metric partials from central differences of step `h`.
pub fn christoffel_numeric(m: &MetricSpec, p: ChartPoint, h: f64, tol_deg: f64) -> Result<ChristoffelSample> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let g = check_nondegenerate(m, p, tol_deg)?;
    let diff = |dt: f64, dx: f64| -> Result<[f64; 3]> {
        let a = m.sym(ChartPoint::new(p.t + dt, p.x + dx))?;
        let b = m.sym(ChartPoint::new(p.t - dt, p.x - dx))?;
        let k = 0.5 / h;
        Ok([(a.tt - b.tt) * k, (a.tx - b.tx) * k, (a.xx - b.xx) * k])
    };
    christoffel_from(p, g, [diff(h, 0.0)?, diff(0.0, h)?])
}

/// Christoffel symbols from exact derivatives of the component expressions.
pub fn christoffel_exact(m: &MetricSpec, p: ChartPoint) -> Result<ChristoffelSample> {
    let [tt, tx, xx] = m.jets(p)?;
    let g = Sym2::new(tt.val, tx.val, xx.val);
    let dg = [
        [tt.grad[0], tx.grad[0], xx.grad[0]],
        [tt.grad[1], tx.grad[1], xx.grad[1]],
    ];
    christoffel_from(p, g, dg)
}

/// Closed forms for the rotating metric with `φ = a·x`.
pub fn christoffel_closed_rotating(angle_rate: f64, p: ChartPoint) -> ChristoffelSample {
    let a = angle_rate;
    let phi = a * p.x;
    let s2 = (2.0 * phi).sin();
    let sin4 = (4.0 * phi).sin();
    let cos4 = (4.0 * phi).cos();
    ChristoffelSample {
        point: p,
        t_tt: -a * s2 * s2,
        t_tx: -0.5 * a * sin4,
        t_xx: -0.5 * a * (3.0 + cos4),
        x_tt: -0.5 * a * sin4,
        x_tx: a * s2 * s2,
        x_xx: 0.5 * a * sin4,
    }
}

/// Gaussian curvature by the Brioschi formula from values and partials of
/// `E = g_tt`, `F = g_tx`, `G = g_xx`, with `u = t`, `v = x`.
///
/// `d1[k]` are first partials, `d2 = [∂tt, ∂tx, ∂xx]` second partials, each
/// as `[E, F, G]`.
fn brioschi(g: Sym2, d1: [[f64; 3]; 2], d2: [[f64; 3]; 3]) -> f64 {
    let (e, f, gg) = (g.tt, g.tx, g.xx);
    let [eu, fu, gu] = d1[0];
    let [ev, fv, gv] = d1[1];
    let e_vv = d2[2][0];
    let f_uv = d2[1][1];
    let g_uu = d2[0][2];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, gg],
    ];
    let b = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, gg]];
    let w = e * gg - f * f;
    (det3(a) - det3(b)) / (w * w)
}

/// Scalar curvature `R = 2K` with metric partials from central differences of step `h`.
pub fn scalar_curvature(m: &MetricSpec, p: ChartPoint, h: f64, tol_deg: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let g = check_nondegenerate(m, p, tol_deg)?;
    let at = |dt: f64, dx: f64| -> Result<[f64; 3]> {
        let s = m.sym(ChartPoint::new(p.t + dt * h, p.x + dx * h))?;
        Ok([s.tt, s.tx, s.xx])
    };
    let c = [g.tt, g.tx, g.xx];
    let (tp, tm, xp, xm) = (at(1.0, 0.0)?, at(-1.0, 0.0)?, at(0.0, 1.0)?, at(0.0, -1.0)?);
    let (pp, pm, mp, mm) = (at(1.0, 1.0)?, at(1.0, -1.0)?, at(-1.0, 1.0)?, at(-1.0, -1.0)?);
    let comp = |f: &dyn Fn(usize) -> f64| [f(0), f(1), f(2)];
    let d1 = [
        comp(&|i| (tp[i] - tm[i]) / (2.0 * h)),
        comp(&|i| (xp[i] - xm[i]) / (2.0 * h)),
    ];
    let d2 = [
        comp(&|i| (tp[i] - 2.0 * c[i] + tm[i]) / (h * h)),
        comp(&|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h)),
        comp(&|i| (xp[i] - 2.0 * c[i] + xm[i]) / (h * h)),
    ];
    Ok(2.0 * brioschi(g, d1, d2))
}

/// Scalar curvature from exact second derivatives of the components.
pub fn scalar_curvature_exact(m: &MetricSpec, p: ChartPoint, tol_deg: f64) -> Result<f64> {
    let g = check_nondegenerate(m, p, tol_deg)?;
    let j = m.jets(p)?;
    let d1 = [
        [j[0].grad[0], j[1].grad[0], j[2].grad[0]],
        [j[0].grad[1], j[1].grad[1], j[2].grad[1]],
    ];
    let d2 = [
        [j[0].hess[0], j[1].hess[0], j[2].hess[0]],
        [j[0].hess[1], j[1].hess[1], j[2].hess[1]],
        [j[0].hess[2], j[1].hess[2], j[2].hess[2]],
    ];
    Ok(2.0 * brioschi(g, d1, d2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeodesicStatus {
    Completed,
    HitDegeneracy,
    LeftWindow,
    StepFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub lambda: f64,
    pub point: ChartPoint,
    pub velocity: [f64; 2],
    /// `g(∂t, γ̇)`
    pub energy: f64,
    /// `g(γ̇, γ̇)`
    pub norm2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamEvent {
    pub lambda: f64,
    pub seam: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub samples: Vec<GeodesicSample>,
    pub seam_events: Vec<SeamEvent>,
    pub status: GeodesicStatus,
}

impl GeodesicTrace {
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }

    pub fn norm2_drift(&self) -> f64 {
        let n0 = self.samples.first().map_or(0.0, |s| s.norm2);
        self.samples.iter().map(|s| (s.norm2 - n0).abs()).fold(0.0, f64::max)
    }
}

fn sample(m: &MetricSpec, lambda: f64, p: ChartPoint, v: [f64; 2]) -> Result<GeodesicSample> {
    let g = m.sym(p)?;
    Ok(GeodesicSample {
        lambda,
        point: p,
        velocity: v,
        energy: g.quad([1.0, 0.0], v),
        norm2: g.quad(v, v),
    })
}

/// Options for [`integrate_geodesic_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicConfig {
    pub lambda_max: f64,
    pub dlambda: f64,
    pub window: Window,
    pub tol_deg: f64,
    /// Stop with `StepFailure` once `norm2` moves this far from its value at
    /// the start or, after a seam crossing, from its value just past the seam.
    pub norm_guard: Option<f64>,
}

/// Fixed-step RK4 on `ẍ^a = −Γ^a_bc ẋ^b ẋ^c`, canonicalizing through the
/// atlas after every step.
///
/// Stops with `HitDegeneracy` once `|det| < 10·tol_deg` or the sign of
/// `det` differs from its initial sign.
pub fn integrate_geodesic(
    m: &MetricSpec,
    man: &ManifoldSpec,
    init: &TangentVector,
    lambda_max: f64,
    dlambda: f64,
    window: &Window,
    tol_deg: f64,
) -> Result<GeodesicTrace> {
    let cfg = GeodesicConfig {
        lambda_max,
        dlambda,
        window: *window,
        tol_deg,
        norm_guard: None,
    };
    integrate_geodesic_with(m, man, init, &cfg)
}

pub fn integrate_geodesic_with(
    m: &MetricSpec,
    man: &ManifoldSpec,
    init: &TangentVector,
    cfg: &GeodesicConfig,
) -> Result<GeodesicTrace> {
    let GeodesicConfig {
        lambda_max,
        dlambda,
        window,
        tol_deg,
        norm_guard,
    } = *cfg;
    let window = &window;
    if !(dlambda > 0.0) || !(lambda_max >= 0.0) {
        return Err(Error::InvalidArgument("need dλ > 0 and λ_max ≥ 0".into()));
    }
    let start = canonicalize(man, init.base)?;
    let p0 = start.point;
    let v0 = mat_apply(&start.jacobian, init.components());
    let det0 = m.det(p0)?;
    if det0.abs() < 10.0 * tol_deg {
        return Err(Error::Degenerate { t: p0.t, x: p0.x, det: det0 });
    }
    let rhs = |_: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let c = christoffel_exact(m, ChartPoint::new(y[0], y[1]))?;
        let acc = c.contract([y[2], y[3]]);
        Ok([y[2], y[3], -acc[0], -acc[1]])
    };
    let mut trace = GeodesicTrace {
        samples: vec![sample(m, 0.0, p0, v0)?],
        seam_events: Vec::new(),
        status: GeodesicStatus::Completed,
    };
    if !window.contains(p0) {
        trace.status = GeodesicStatus::LeftWindow;
        return Ok(trace);
    }
    let n_steps = (lambda_max / dlambda).round() as u64;
    let mut y = [p0.t, p0.x, v0[0], v0[1]];
    let mut norm_ref = trace.samples[0].norm2;
    for k in 0..n_steps {
        let lambda = (k + 1) as f64 * dlambda;
        let next = match rk4_step(&rhs, k as f64 * dlambda, &y, dlambda) {
            Ok(n) => n,
            Err(Error::Degenerate { .. }) => {
                trace.status = GeodesicStatus::HitDegeneracy;
                break;
            }
            Err(_) => {
                trace.status = GeodesicStatus::StepFailure;
                break;
            }
        };
        if next.iter().any(|c| !c.is_finite()) {
            trace.status = GeodesicStatus::StepFailure;
            break;
        }
        let canon = match canonicalize(man, ChartPoint::new(next[0], next[1])) {
            Ok(c) => c,
            Err(Error::OutsideDomain { .. }) => {
                trace.status = GeodesicStatus::LeftWindow;
                break;
            }
            Err(_) => {
                trace.status = GeodesicStatus::StepFailure;
                break;
            }
        };
        if canon.crossings.len() > 1 {
            trace.status = GeodesicStatus::StepFailure;
            break;
        }
        let p = canon.point;
        let v = mat_apply(&canon.jacobian, [next[2], next[3]]);
        let det = match m.det(p) {
            Ok(d) => d,
            Err(_) => {
                trace.status = GeodesicStatus::StepFailure;
                break;
            }
        };
        if det.abs() < 10.0 * tol_deg || det.signum() != det0.signum() {
            trace.status = GeodesicStatus::HitDegeneracy;
            break;
        }
        if !window.contains(p) {
            trace.status = GeodesicStatus::LeftWindow;
            break;
        }
        let crossed = !canon.crossings.is_empty();
        for seam in canon.crossings {
            trace.seam_events.push(SeamEvent {
                lambda,
                seam: seam.to_string(),
            });
        }
        let smp = sample(m, lambda, p, v)?;
        if crossed {
            norm_ref = smp.norm2;
        } else if norm_guard.is_some_and(|g| (smp.norm2 - norm_ref).abs() > g) {
            trace.status = GeodesicStatus::StepFailure;
            break;
        }
        trace.samples.push(smp);
        y = [p.t, p.x, v[0], v[1]];
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Topology;
    use crate::geometry::{ScalarField, VectorField, DEFAULT_TOL_DEG};
    use crate::prescription::transform_metric;
    use std::f64::consts::PI;

    const TOL: f64 = DEFAULT_TOL_DEG;

    fn p(t: f64, x: f64) -> ChartPoint {
        ChartPoint::new(t, x)
    }

    #[test]
    fn rotating_christoffels() {
        let m = MetricSpec::rotating_default();
        let c = christoffel_numeric(&m, p(0.0, 0.0), FD_STEP, TOL).unwrap();
        assert!(c.t_tt.abs() < 1e-9);
        assert!((c.t_xx + 2.0 * PI).abs() < 1e-6);
        let c = christoffel_numeric(&m, p(0.0, 0.125), FD_STEP, TOL).unwrap();
        assert!((c.t_tt + PI / 2.0).abs() < 1e-6);
        let closed = christoffel_closed_rotating(PI, p(0.0, 0.0)).as_array();
        let expect = [0.0, 0.0, -2.0 * PI, 0.0, 0.0, 0.0];
        for (a, b) in closed.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        for i in 0..50 {
            let q = p(0.3, i as f64 / 49.0);
            let closed = christoffel_closed_rotating(PI, q);
            let shifted = christoffel_closed_rotating(PI, p(q.t, q.x + 0.5));
            assert!(closed.max_abs_diff(&shifted) < 1e-12);
            assert!(christoffel_numeric(&m, q, FD_STEP, TOL).unwrap().max_abs_diff(&closed) <= 1e-4);
            assert!(christoffel_exact(&m, q).unwrap().max_abs_diff(&closed) <= 1e-12);
        }
    }

    #[test]
    fn flat_is_flat() {
        let m = MetricSpec::FlatMinkowski;
        let c = christoffel_numeric(&m, p(0.4, -1.2), FD_STEP, TOL).unwrap();
        assert!(c.as_array().iter().all(|v| *v == 0.0));
        assert_eq!(scalar_curvature(&m, p(0.4, -1.2), FD_STEP, TOL).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_points_rejected() {
        let m = MetricSpec::CrosscapQuadratic;
        assert!(matches!(christoffel_numeric(&m, p(1.0, 0.0), FD_STEP, TOL), Err(Error::Degenerate { .. })));
        assert!(matches!(scalar_curvature(&m, p(0.6, 0.8), FD_STEP, TOL), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn rotating_curvature() {
        let m = MetricSpec::rotating_default();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let exact = scalar_curvature_exact(&m, p(0.0, x), TOL).unwrap();
            let fd = scalar_curvature(&m, p(0.0, x), FD_STEP, TOL).unwrap();
            assert!((exact - 4.0 * PI * PI * (2.0 * PI * x).cos()).abs() < 1e-9);
            assert!((fd - exact).abs() < 1e-3, "{x}: {fd} vs {exact}");
        }
        assert!((scalar_curvature(&m, p(0.0, 0.0), FD_STEP, TOL).unwrap() - 4.0 * PI * PI).abs() < 1e-3);
        assert!(scalar_curvature(&m, p(0.0, 0.25), FD_STEP, TOL).unwrap().abs() < 1e-3);
    }

    #[test]
    fn curvature_of_round_sphere_chart() {
        // dθ² + sin²θ dφ² has K = 1
        let m = MetricSpec::Custom {
            g_tt: ScalarField::constant(1.0),
            g_tx: ScalarField::constant(0.0),
            g_xx: ScalarField::parse("sin(t)^2").unwrap(),
        };
        assert!((scalar_curvature_exact(&m, p(1.0, 0.3), TOL).unwrap() - 2.0).abs() < 1e-12);
        assert!((scalar_curvature(&m, p(1.0, 0.3), FD_STEP, TOL).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn flat_geodesic() {
        let m = MetricSpec::FlatMinkowski;
        let man = ManifoldSpec::new(Topology::Plane);
        let init = TangentVector::new(p(0.0, 0.0), 1.0, 0.0);
        let tr = integrate_geodesic(&m, &man, &init, 2.0, 1e-2, &Window::square(10.0), TOL).unwrap();
        assert_eq!(tr.status, GeodesicStatus::Completed);
        assert_eq!(tr.samples.len(), 201);
        for s in &tr.samples {
            assert!((s.point.t - s.lambda).abs() < 1e-12 && s.point.x == 0.0);
            assert_eq!((s.energy, s.norm2), (-1.0, -1.0));
        }
    }

    #[test]
    fn rotating_geodesic_conserves_energy_and_norm() {
        // x = 0 is an unstable orbit; a start this close stays in the stripe for λ ≤ 10
        let m = MetricSpec::rotating_default();
        let man = ManifoldSpec::new(Topology::Plane);
        for x0 in [1e-20, -1e-20] {
            let init = TangentVector::new(p(0.0, x0), 1.0, 0.0);
            let tr = integrate_geodesic(&m, &man, &init, 10.0, DEFAULT_DLAMBDA, &Window::square(100.0), TOL).unwrap();
            assert_eq!(tr.status, GeodesicStatus::Completed);
            assert!(tr.samples.iter().all(|s| s.point.x.abs() < 0.25));
            assert!(tr.energy_drift() <= 1e-8, "{}", tr.energy_drift());
            assert!(tr.norm2_drift() <= 1e-8, "{}", tr.norm2_drift());
            for w in tr.samples.windows(2) {
                assert!(w[1].lambda > w[0].lambda);
            }
        }
    }

    #[test]
    fn stripe_geodesics_run_into_the_horizon() {
        // ẋ² = E² − cos2φ: an outgoing future geodesic reaches x = 1/4 at finite λ with ṫ unbounded
        let m = MetricSpec::rotating_default();
        let man = ManifoldSpec::new(Topology::Plane);
        let init = TangentVector::new(p(0.0, 0.05), 1.0, 0.1);
        let tr = integrate_geodesic(&m, &man, &init, 10.0, DEFAULT_DLAMBDA, &Window::square(100.0), TOL).unwrap();
        assert_ne!(tr.status, GeodesicStatus::Completed);
        let early: Vec<_> = tr.samples.iter().take_while(|s| s.lambda <= 0.2).collect();
        let e0 = early[0].energy;
        assert!(early.iter().all(|s| (s.energy - e0).abs() < 1e-8));
        assert!(tr.samples.last().unwrap().velocity[0] > 100.0);
    }

    #[test]
    fn geodesic_stops_at_degeneracy_and_window() {
        let f = ScalarField::SumOfSquares;
        let m = transform_metric(MetricSpec::FlatMinkowski, VectorField::coordinate_time(), f);
        let man = ManifoldSpec::new(Topology::Plane);
        let init = TangentVector::new(p(0.0, 0.0), 1.0, 0.0);
        let tr = integrate_geodesic(&m, &man, &init, 5.0, 1e-3, &Window::square(10.0), TOL).unwrap();
        assert_eq!(tr.status, GeodesicStatus::HitDegeneracy);
        assert!(tr.samples.last().unwrap().point.t < 1.0);

        let tr = integrate_geodesic(
            &MetricSpec::FlatMinkowski,
            &man,
            &TangentVector::new(p(0.0, 0.0), 0.0, 1.0),
            5.0,
            1e-2,
            &Window::square(1.0),
            TOL,
        )
        .unwrap();
        assert_eq!(tr.status, GeodesicStatus::LeftWindow);
        assert!(integrate_geodesic(&m, &man, &TangentVector::new(p(1.0, 0.0), 1.0, 0.0), 1.0, 1e-3, &Window::square(2.0), TOL).is_err());
    }

    #[test]
    fn mobius_seam_events() {
        let m = MetricSpec::rotating_default();
        let man = ManifoldSpec::new(Topology::InfiniteMobius);
        // spacelike geodesic along x through the seam
        let init = TangentVector::new(p(0.0, 0.9), 0.0, 1.0);
        let w = Window::new(-2.0, 2.0, 0.0, 1.0).unwrap();
        let tr = integrate_geodesic(&m, &man, &init, 0.3, 1e-3, &w, TOL).unwrap();
        assert!(!tr.seam_events.is_empty(), "{:?}", tr.status);
        assert!(tr.samples.iter().all(|s| (0.0..1.0).contains(&s.point.x)));
        // the metric is only C⁰ across the seam, so norm2 is conserved on each side separately
        let cut = tr.seam_events[0].lambda;
        let (before, after): (Vec<&GeodesicSample>, Vec<&GeodesicSample>) = tr.samples.iter().partition(|s| s.lambda < cut);
        for side in [before, after] {
            let n0 = side[0].norm2;
            assert!(side.iter().all(|s| (s.norm2 - n0).abs() < 1e-8));
        }
    }
}
