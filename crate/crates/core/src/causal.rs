//! Light cones, null curves, stationary stripes and causal trapping for the
//! rotating metric.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::{ManifoldSpec, Topology};
use crate::dynamics::{integrate_geodesic_with, GeodesicConfig, DEFAULT_DLAMBDA};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, MetricSpec, TangentVector, VectorField, Window, DEFAULT_TOL_DEG};
use crate::ode::rk4_step;

/// Null slope `dt/dx`; `Vertical` where the cone contains `∂t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Slope {
    Finite(f64),
    Vertical,
}

impl Slope {
    /// Angle of the null line `(dt, dx) ∝ (s, 1)` in `(−π/2, π/2]`, measured from the x-axis.
    pub fn angle(self) -> f64 {
        match self {
            Slope::Finite(s) => s.atan(),
            Slope::Vertical => PI / 2.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Slope::Finite(s) => Some(s),
            Slope::Vertical => None,
        }
    }

    /// A direction `(vt, vx)` along this null line, Euclidean unit length.
    pub fn direction(self) -> [f64; 2] {
        match self {
            Slope::Finite(s) => {
                let n = s.hypot(1.0);
                [s / n, 1.0 / n]
            }
            Slope::Vertical => [1.0, 0.0],
        }
    }
}

/// Below this `|g_tt|` one null line is taken as vertical.
pub const VERTICAL_TOL: f64 = 1e-12;

/// The two roots of `g_tt s² + 2 g_tx s + g_xx = 0` in `s = dt/dx`.
///
/// Branch 1 is `(−g_tx + √(−det)) / g_tt`, branch 2 `(−g_tx − √(−det)) / g_tt`,
/// each evaluated in the cancellation-free form.
pub fn null_slopes(m: &MetricSpec, p: ChartPoint, tol_deg: f64) -> Result<(Slope, Slope)> {
    let g = m.sym(p)?;
    let det = g.det();
    if !(det < -tol_deg) {
        return Err(Error::NotLorentzian { t: p.t, x: p.x, det });
    }
    let (a, b, c) = (g.tt, g.tx, g.xx);
    let d = (-det).sqrt();
    let over_a = |num: f64| {
        if a.abs() <= VERTICAL_TOL {
            Slope::Vertical
        } else {
            Slope::Finite(num / a)
        }
    };
    Ok(if b >= 0.0 {
        (Slope::Finite(c / (-b - d)), over_a(-b - d))
    } else {
        (over_a(-b + d), Slope::Finite(c / (-b + d)))
    })
}

/// Closed-form null curves of the rotating metric:
/// branch 1 `t = −(1/π) ln|sin πx + cos πx| + c`, branch 2 `t = −(1/π) ln|cos πx − sin πx| + c`.
pub fn null_curve_closed_form(branch: u8, x: f64, c: f64) -> Result<f64> {
    let (s, co) = ((PI * x).sin(), (PI * x).cos());
    let arg = match branch {
        1 => s + co,
        2 => co - s,
        _ => return Err(Error::InvalidArgument(format!("branch must be 1 or 2, got {branch}"))),
    };
    if !(arg.abs() > 1e-14) {
        return Err(Error::Singular {
            x,
            reason: "null line is vertical",
        });
    }
    Ok(-arg.abs().ln() / PI + c)
}

/// RK4 integration of `dt/dx = slope_branch(x)` from `start` to `x_end` in `n` steps.
pub fn integrate_null_curve(
    m: &MetricSpec,
    branch: u8,
    start: ChartPoint,
    x_end: f64,
    n: usize,
) -> Result<Vec<ChartPoint>> {
    if !(branch == 1 || branch == 2) || n == 0 {
        return Err(Error::InvalidArgument("branch must be 1 or 2 and n ≥ 1".into()));
    }
    let rhs = |x: f64, y: &[f64; 1]| -> Result<[f64; 1]> {
        let (s1, s2) = null_slopes(m, ChartPoint::new(y[0], x), DEFAULT_TOL_DEG)?;
        let s = if branch == 1 { s1 } else { s2 };
        s.finite().map(|v| [v]).ok_or(Error::Singular {
            x,
            reason: "null line is vertical",
        })
    };
    let h = (x_end - start.x) / n as f64;
    let mut y = [start.t];
    let mut out = vec![start];
    for i in 0..n {
        let x = start.x + h * i as f64;
        y = rk4_step(&rhs, x, &y, h)?;
        out.push(ChartPoint::new(y[0], start.x + h * (i + 1) as f64));
    }
    Ok(out)
}

/// Max deviation of the RK4 null curve of the rotating metric from its
/// closed form on `[0, x_end]`.
pub fn null_curve_ode_deviation(branch: u8, x_end: f64, n: usize) -> Result<f64> {
    let m = MetricSpec::rotating_default();
    let path = integrate_null_curve(&m, branch, ChartPoint::new(0.0, 0.0), x_end, n)?;
    path.iter()
        .map(|p| Ok((p.t - null_curve_closed_form(branch, p.x, 0.0)?).abs()))
        .try_fold(0.0f64, |acc, d: Result<f64>| Ok(acc.max(d?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KillingCharacter {
    Timelike,
    Null,
    Spacelike,
}

pub const KILLING_TOL: f64 = 1e-12;

/// Causal character of `∂t` for the rotating metric, with `g(∂t, ∂t) = −cos 2πx`.
pub fn killing_character(x: f64) -> (KillingCharacter, f64) {
    let value = -(2.0 * PI * x.rem_euclid(1.0)).cos();
    let ch = if value < -KILLING_TOL {
        KillingCharacter::Timelike
    } else if value.abs() <= KILLING_TOL {
        KillingCharacter::Null
    } else {
        KillingCharacter::Spacelike
    };
    (ch, value)
}

/// Stationary stripe `M_k = {(4k−1)/4 < x < (4k+1)/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripeId {
    pub k: i64,
}

impl StripeId {
    pub fn bounds(self) -> (f64, f64) {
        let k = self.k as f64;
        ((4.0 * k - 1.0) / 4.0, (4.0 * k + 1.0) / 4.0)
    }

    pub fn centre(self) -> f64 {
        self.k as f64
    }
}

pub fn stripe_of(x: f64) -> Option<StripeId> {
    if !x.is_finite() {
        return None;
    }
    let k = x.round();
    let id = StripeId { k: k as i64 };
    let (lo, hi) = id.bounds();
    (lo < x && x < hi).then_some(id)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalKind {
    Timelike,
    Null,
    /// Control: directions outside the cone, no time orientation.
    Spacelike,
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Future-pointing null directions at `p`, Euclidean unit length.
fn future_null_rays(m: &MetricSpec, p: ChartPoint, orientation: &VectorField) -> Result<[[f64; 2]; 2]> {
    let (s1, s2) = null_slopes(m, p, DEFAULT_TOL_DEG)?;
    let g = m.sym(p)?;
    let o = orientation.at(p)?.components();
    let future = |d: [f64; 2]| {
        if g.quad(o, d) < 0.0 {
            d
        } else {
            [-d[0], -d[1]]
        }
    };
    Ok([future(s1.direction()), future(s2.direction())])
}

/// Random direction of the requested causal kind at `p`, Euclidean unit length.
///
/// Timelike and null samples are future-directed with respect to
/// `orientation`; timelike angles are uniform between the two future null
/// rays. Spacelike samples are uniform over the spacelike double sector.
pub fn sample_causal_direction<R: Rng>(
    m: &MetricSpec,
    p: ChartPoint,
    rng: &mut R,
    kind: CausalKind,
    orientation: &VectorField,
) -> Result<TangentVector> {
    let [n1, n2] = future_null_rays(m, p, orientation)?;
    let a1 = n1[1].atan2(n1[0]);
    let a2 = n2[1].atan2(n2[0]);
    let span = wrap_angle(a2 - a1);
    let theta = match kind {
        CausalKind::Null => {
            if rng.gen_bool(0.5) {
                a1
            } else {
                a2
            }
        }
        CausalKind::Timelike => {
            let u = loop {
                let u: f64 = rng.gen();
                if u > 0.0 {
                    break u;
                }
            };
            a1 + u * span
        }
        CausalKind::Spacelike => {
            // sector from n2 round to −n1 has width π − |span|
            let rest = PI - span.abs();
            let u = loop {
                let u: f64 = rng.gen();
                if u > 0.0 {
                    break u;
                }
            };
            let base = a2 + span.signum() * u * rest;
            if rng.gen_bool(0.5) {
                base
            } else {
                base + PI
            }
        }
    };
    Ok(TangentVector::new(p, theta.cos(), theta.sin()))
}

/// How the curves of a trapping experiment are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveMix {
    Geodesics,
    Polylines,
    /// First half geodesics, second half polylines.
    Both,
}

/// Straight-segment length for random causal polylines.
pub const POLYLINE_STEP: f64 = 0.05;
/// Curves whose excursion reaches `¼ − ESCAPE_MARGIN` count as escaped.
pub const ESCAPE_MARGIN: f64 = 1e-6;
/// Norm drift at which a trapping geodesic is stopped as no longer resolved.
pub const TRAP_NORM_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrappingReport {
    pub k: i64,
    pub n_curves: usize,
    pub n_escaped: usize,
    pub max_excursion: f64,
    #[serde(rename = "min_E")]
    pub min_e: f64,
    #[serde(rename = "max_E")]
    pub max_e: f64,
    pub seed: u64,
    /// Samples at which `∂t` was not timelike.
    #[serde(skip)]
    pub killing_violations: usize,
    #[serde(skip)]
    pub excursions: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrappingSetup {
    pub k: i64,
    pub n_curves: usize,
    pub lambda_max: f64,
    pub mix: CurveMix,
    pub kind: CausalKind,
    pub seed: u64,
}

struct CurveOutcome {
    excursion: f64,
    min_e: f64,
    max_e: f64,
    killing_violations: usize,
}

/// Launches curves from random points of stripe `M_k` of the rotating metric
/// on the plane and records how far they get from the stripe centre.
pub fn trapping_experiment(setup: &TrappingSetup) -> Result<TrappingReport> {
    if setup.n_curves == 0 {
        return Err(Error::InvalidArgument("n_curves must be at least 1".into()));
    }
    let outcomes: Vec<CurveOutcome> = (0..setup.n_curves)
        .into_par_iter()
        .map(|i| run_curve(setup, i))
        .collect::<Result<_>>()?;
    let mut report = TrappingReport {
        k: setup.k,
        n_curves: setup.n_curves,
        n_escaped: 0,
        max_excursion: 0.0,
        min_e: f64::INFINITY,
        max_e: f64::NEG_INFINITY,
        seed: setup.seed,
        killing_violations: 0,
        excursions: Vec::with_capacity(outcomes.len()),
    };
    for o in outcomes {
        if o.excursion >= 0.25 - ESCAPE_MARGIN {
            report.n_escaped += 1;
        }
        report.max_excursion = report.max_excursion.max(o.excursion);
        report.min_e = report.min_e.min(o.min_e);
        report.max_e = report.max_e.max(o.max_e);
        report.killing_violations += o.killing_violations;
        report.excursions.push(o.excursion);
    }
    Ok(report)
}

fn run_curve(setup: &TrappingSetup, index: usize) -> Result<CurveOutcome> {
    let m = MetricSpec::rotating_default();
    let orient = VectorField::rotating_unit_timelike();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    rng.set_stream(index as u64);
    let centre = setup.k as f64;
    let start = ChartPoint::new(rng.gen_range(-1.0..1.0), centre + rng.gen_range(-0.249..0.249));
    let geodesic = match setup.mix {
        CurveMix::Geodesics => true,
        CurveMix::Polylines => false,
        CurveMix::Both => index < setup.n_curves / 2,
    };
    let mut out = CurveOutcome {
        excursion: 0.0,
        min_e: f64::INFINITY,
        max_e: f64::NEG_INFINITY,
        killing_violations: 0,
    };
    let mut record = |p: ChartPoint, v: [f64; 2]| -> Result<()> {
        let g = m.sym(p)?;
        let e = g.quad([1.0, 0.0], v);
        out.excursion = out.excursion.max((p.x - centre).abs());
        out.min_e = out.min_e.min(e);
        out.max_e = out.max_e.max(e);
        if g.tt >= 0.0 {
            out.killing_violations += 1;
        }
        Ok(())
    };
    if geodesic {
        let v = sample_causal_direction(&m, start, &mut rng, setup.kind, &orient)?;
        let cfg = GeodesicConfig {
            lambda_max: setup.lambda_max,
            dlambda: DEFAULT_DLAMBDA,
            window: Window::new(start.t - 1e3, start.t + 1e3, centre - 3.0, centre + 3.0)?,
            tol_deg: DEFAULT_TOL_DEG,
            norm_guard: Some(TRAP_NORM_GUARD),
        };
        let trace = integrate_geodesic_with(&m, &ManifoldSpec::new(Topology::Plane), &v, &cfg)?;
        for s in &trace.samples {
            record(s.point, s.velocity)?;
        }
    } else {
        let n_steps = (setup.lambda_max / POLYLINE_STEP).round() as usize;
        let mut p = start;
        for _ in 0..n_steps {
            let v = sample_causal_direction(&m, p, &mut rng, setup.kind, &orient)?;
            record(p, v.components())?;
            p = ChartPoint::new(p.t + POLYLINE_STEP * v.vt, p.x + POLYLINE_STEP * v.vx);
        }
        let v = sample_causal_direction(&m, p, &mut rng, setup.kind, &orient)?;
        record(p, v.components())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalarField;

    fn p(t: f64, x: f64) -> ChartPoint {
        ChartPoint::new(t, x)
    }

    #[test]
    fn slopes() {
        let rot = MetricSpec::rotating_default();
        let (a, b) = null_slopes(&rot, p(0.0, 0.0), DEFAULT_TOL_DEG).unwrap();
        assert_eq!((a, b), (Slope::Finite(-1.0), Slope::Finite(1.0)));
        let (a, b) = null_slopes(&rot, p(0.0, 0.25), DEFAULT_TOL_DEG).unwrap();
        assert!(matches!(a, Slope::Finite(s) if s.abs() < 1e-12));
        assert_eq!(b, Slope::Vertical);
        for x in [-3.0, 0.4, 7.1] {
            let (a, b) = null_slopes(&MetricSpec::FlatMinkowski, p(1.0, x), DEFAULT_TOL_DEG).unwrap();
            assert_eq!((a, b), (Slope::Finite(-1.0), Slope::Finite(1.0)));
        }
        assert!(matches!(
            null_slopes(&MetricSpec::CrosscapQuadratic, p(0.0, 0.0), DEFAULT_TOL_DEG),
            Err(Error::NotLorentzian { .. })
        ));
        // textbook root formula for branch 1
        for i in 0..20 {
            let x = 0.01 + i as f64 * 0.011;
            let phi = PI * x;
            let (a, _) = null_slopes(&rot, p(0.0, x), DEFAULT_TOL_DEG).unwrap();
            let expect = (-1.0 + (2.0 * phi).sin()) / (2.0 * phi).cos();
            assert!((a.finite().unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn slopes_are_roots() {
        let m = MetricSpec::Custom {
            g_tt: ScalarField::parse("-1 + 0.5*sin(x)").unwrap(),
            g_tx: ScalarField::parse("0.3*cos(t)").unwrap(),
            g_xx: ScalarField::parse("1 + x^2").unwrap(),
        };
        for q in Window::square(1.0).grid(7) {
            let g = m.sym(q).unwrap();
            let (a, b) = null_slopes(&m, q, DEFAULT_TOL_DEG).unwrap();
            for s in [a, b] {
                let d = s.direction();
                assert!(g.quad(d, d).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cone_continuity() {
        let rot = MetricSpec::rotating_default();
        let angles = |x: f64| {
            let (a, b) = null_slopes(&rot, p(0.0, x), DEFAULT_TOL_DEG).unwrap();
            [a.angle(), b.angle()]
        };
        // null lines are unoriented, so compare angles modulo π
        let jump = |u: f64, v: f64| {
            let d = (u - v).rem_euclid(PI);
            d.min(PI - d)
        };
        let mut prev = angles(0.0);
        for i in 1..=1000 {
            let cur = angles(i as f64 / 1000.0);
            let same = jump(cur[0], prev[0]).max(jump(cur[1], prev[1]));
            let swapped = jump(cur[0], prev[1]).max(jump(cur[1], prev[0]));
            assert!(same.min(swapped) < 0.01, "x = {}", i as f64 / 1000.0);
            prev = cur;
        }
    }

    #[test]
    fn closed_form_null_curves() {
        assert_eq!(null_curve_closed_form(1, 0.0, 0.0).unwrap(), 0.0);
        assert!((null_curve_closed_form(1, 0.25, 0.0).unwrap() + 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!(null_curve_closed_form(2, 0.25, 0.0).is_err());
        assert!(null_curve_closed_form(3, 0.1, 0.0).is_err());
        for branch in [1, 2] {
            let dev = null_curve_ode_deviation(branch, 0.2, 2000).unwrap();
            assert!(dev <= 1e-6, "branch {branch}: {dev}");
        }
    }

    #[test]
    fn closed_forms_solve_the_slope_equation() {
        let rot = MetricSpec::rotating_default();
        let h = 1e-6;
        for i in 0..1000 {
            let x = 0.001 + 0.2 * i as f64 / 1000.0;
            let (a, b) = null_slopes(&rot, p(0.0, x), DEFAULT_TOL_DEG).unwrap();
            for (branch, s) in [(1, a), (2, b)] {
                let d = (null_curve_closed_form(branch, x + h, 0.0).unwrap()
                    - null_curve_closed_form(branch, x - h, 0.0).unwrap())
                    / (2.0 * h);
                assert!((d - s.finite().unwrap()).abs() <= 1e-8, "{branch} {x}");
            }
        }
    }

    #[test]
    fn killing() {
        assert_eq!(killing_character(0.0), (KillingCharacter::Timelike, -1.0));
        assert_eq!(killing_character(0.25).0, KillingCharacter::Null);
        assert_eq!(killing_character(0.5), (KillingCharacter::Spacelike, 1.0));
        for i in 0..1000 {
            let x = -3.0 + 6.0 * i as f64 / 1000.0;
            let (a, va) = killing_character(x);
            let (b, vb) = killing_character(x + 1.0);
            assert_eq!(a, b);
            assert!((va - vb).abs() < 1e-12);
        }
    }

    #[test]
    fn stripes() {
        assert_eq!(stripe_of(0.0), Some(StripeId { k: 0 }));
        assert_eq!(stripe_of(0.25), None);
        assert_eq!(stripe_of(0.75), None);
        assert_eq!(stripe_of(1.1), Some(StripeId { k: 1 }));
        assert_eq!(stripe_of(-1.2), Some(StripeId { k: -1 }));
        let (lo, hi) = StripeId { k: 3 }.bounds();
        assert_eq!(hi - lo, 0.5);
    }

    #[test]
    fn causal_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let flat = MetricSpec::FlatMinkowski;
        let dt = VectorField::coordinate_time();
        for _ in 0..1000 {
            let v = sample_causal_direction(&flat, p(0.0, 0.0), &mut rng, CausalKind::Timelike, &dt).unwrap();
            assert!(v.vt > v.vx.abs());
        }
        let rot = MetricSpec::rotating_default();
        let orient = VectorField::rotating_unit_timelike();
        for _ in 0..1000 {
            let x = rng.gen_range(-0.24..0.24);
            let q = p(0.0, x);
            let g = rot.sym(q).unwrap();
            let o = orient.at(q).unwrap().components();
            let v = sample_causal_direction(&rot, q, &mut rng, CausalKind::Timelike, &orient).unwrap();
            assert!(g.quad(v.components(), v.components()) < 0.0);
            assert!(g.quad(o, v.components()) < 0.0);
            assert!(g.quad([1.0, 0.0], v.components()) < 0.0);
            let n = sample_causal_direction(&rot, q, &mut rng, CausalKind::Null, &orient).unwrap();
            assert!(g.quad(n.components(), n.components()).abs() <= 1e-12);
            assert!(g.quad(o, n.components()) < 0.0);
            let s = sample_causal_direction(&rot, q, &mut rng, CausalKind::Spacelike, &orient).unwrap();
            assert!(g.quad(s.components(), s.components()) > 0.0);
        }
    }

    #[test]
    fn trapping_and_control() {
        let setup = TrappingSetup {
            k: 0,
            n_curves: 40,
            lambda_max: 10.0,
            mix: CurveMix::Both,
            kind: CausalKind::Timelike,
            seed: 3,
        };
        let rep = trapping_experiment(&setup).unwrap();
        assert_eq!(rep.n_escaped, 0, "{rep:?}");
        assert!(rep.max_e < 0.0);
        assert_eq!(rep.killing_violations, 0);
        assert_eq!(rep, trapping_experiment(&setup).unwrap());

        let control = trapping_experiment(&TrappingSetup {
            kind: CausalKind::Spacelike,
            ..setup.clone()
        })
        .unwrap();
        assert!(control.n_escaped > 0);

        let shifted = trapping_experiment(&TrappingSetup { k: 2, ..setup }).unwrap();
        assert_eq!(shifted.n_escaped, 0);
    }
}
