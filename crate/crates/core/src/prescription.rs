//! Transformed metrics `g̃ = g + f · V♭ ⊗ V♭`, their degeneracy locus and
//! the character of the radical along it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, MetricSpec, ScalarField, Sym2, TangentVector, VectorField, Window, DEFAULT_TOL_DEG};
use crate::jet::Jet;
use crate::locus::{zero_set, Polyline};
use crate::ode::rk4_step;

/// Threshold on `|cross|` of unit radical and unit H-tangent.
pub const TOL_TANGENT: f64 = 1e-6;
/// Threshold below which a gradient or directional derivative counts as zero.
pub const TOL_GRAD: f64 = 1e-8;
/// Default marching-squares resolution for loci.
pub const DEFAULT_GRID_N: usize = 512;

const REFINE_TOL: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-7;

/// Builds `g + f · V♭ ⊗ V♭`.
pub fn transform_metric(g: MetricSpec, v: VectorField, f: ScalarField) -> MetricSpec {
    MetricSpec::Transformed {
        base: Box::new(g),
        f,
        v,
    }
}

/// Max of `|det g̃ − det g · (1 + f · g(V,V))|` over `n` seeded random points.
pub fn det_identity_check(
    g: &MetricSpec,
    v: &VectorField,
    f: &ScalarField,
    n: usize,
    window: &Window,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let gt = transform_metric(g.clone(), v.clone(), f.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let p = ChartPoint::new(
            rng.gen_range(window.t_min..=window.t_max),
            rng.gen_range(window.x_min..=window.x_max),
        );
        let base = g.sym(p)?;
        let vv = v.at(p)?.components();
        let expected = base.det() * (1.0 + f.eval(p)? * base.quad(vv, vv));
        worst = worst.max((gt.det(p)? - expected).abs());
    }
    Ok(worst)
}

/// Marching-squares extraction of `{det = 0}`.
pub fn degeneracy_locus(m: &MetricSpec, window: &Window, grid_n: usize) -> Result<Vec<Polyline>> {
    if grid_n < 8 {
        return Err(Error::InvalidArgument(format!("grid_n must be at least 8, got {grid_n}")));
    }
    zero_set(|p| m.det(p), window, grid_n)
}

/// Unit null direction of the component matrix at a degenerate point.
///
/// Sign convention: the first component with magnitude above `1e−14` is
/// positive.
pub fn radical_at(m: &MetricSpec, p: ChartPoint, tol_deg: f64) -> Result<TangentVector> {
    let g = m.sym(p)?;
    let det = g.det();
    if det.abs() > tol_deg {
        return Err(Error::NotDegenerate { t: p.t, x: p.x, det });
    }
    let [rt, rx] = null_direction(&g).ok_or(Error::ZeroMatrix { t: p.t, x: p.x })?;
    Ok(TangentVector::new(p, rt, rx))
}

/// Eigenvector of the eigenvalue of smallest magnitude, unit length,
/// canonical sign.
fn null_direction(g: &Sym2) -> Option<[f64; 2]> {
    let scale = g.tt.abs().max(g.tx.abs()).max(g.xx.abs());
    if !(scale > 1e-14) {
        return None;
    }
    let (a, b, c) = (g.tt / scale, g.tx / scale, g.xx / scale);
    let mean = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    let lam = if mean >= 0.0 { mean - r } else { mean + r };
    // two candidate eigenvectors; keep the better conditioned one
    let u = [b, lam - a];
    let w = [lam - c, b];
    let (nu, nw) = (u[0].hypot(u[1]), w[0].hypot(w[1]));
    let v = if nu >= nw { u } else { w };
    let n = nu.max(nw);
    if !(n > 0.0) {
        // diagonal matrix: pick the axis of the smaller diagonal entry
        return Some(if a.abs() <= c.abs() { [1.0, 0.0] } else { [0.0, 1.0] });
    }
    Some(canonical_sign([v[0] / n, v[1] / n]))
}

fn canonical_sign(v: [f64; 2]) -> [f64; 2] {
    let lead = if v[0].abs() > 1e-14 { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadicalClass {
    Transverse,
    Tangent,
}

impl RadicalClass {
    pub fn name(self) -> &'static str {
        match self {
            RadicalClass::Transverse => "transverse",
            RadicalClass::Tangent => "tangent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadicalReport {
    /// Arclength along the polyline the point belongs to.
    pub s: f64,
    pub point: ChartPoint,
    pub radical_dir: TangentVector,
    pub h_tangent_dir: TangentVector,
    pub classification: RadicalClass,
    pub alignment: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadicalScan {
    pub reports: Vec<RadicalReport>,
    /// Refined points where the radical is tangent to the locus.
    pub tangency_points: Vec<ChartPoint>,
    /// Locus vertices skipped because the defining function has no gradient there.
    pub skipped: Vec<ChartPoint>,
}

/// Defining function of the locus: `h` given explicitly, or the metric's own.
fn h_jet(m: &MetricSpec, h: Option<&ScalarField>, p: ChartPoint) -> Result<Jet> {
    match h {
        Some(h) => h.jet(p),
        None => m.defining_function(p),
    }
}

/// Newton projection onto `{h = 0}` along `∇h`.
fn project<H: Fn(ChartPoint) -> Result<Jet>>(h: &H, mut p: ChartPoint) -> Result<ChartPoint> {
    for _ in 0..8 {
        let j = h(p)?;
        let g2 = j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1];
        if !(g2 > 0.0) || j.val == 0.0 {
            break;
        }
        let k = j.val / g2;
        let next = ChartPoint::new(p.t - k * j.grad[0], p.x - k * j.grad[1]);
        if next.dist(&p) < 1e-16 {
            p = next;
            break;
        }
        p = next;
    }
    Ok(p)
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn lerp(a: ChartPoint, b: ChartPoint, u: f64) -> ChartPoint {
    ChartPoint::new(a.t + (b.t - a.t) * u, a.x + (b.x - a.x) * u)
}

/// Radical and unit H-tangent at `p`, or `None` where `∇h` vanishes.
fn frame_at(m: &MetricSpec, h: Option<&ScalarField>, p: ChartPoint) -> Result<Option<([f64; 2], [f64; 2])>> {
    let j = h_jet(m, h, p)?;
    let gn = j.grad[0].hypot(j.grad[1]);
    if !(gn > TOL_GRAD) {
        return Ok(None);
    }
    let tangent = [-j.grad[1] / gn, j.grad[0] / gn];
    let g = m.sym(p)?;
    let rad = null_direction(&g).ok_or(Error::ZeroMatrix { t: p.t, x: p.x })?;
    Ok(Some((rad, tangent)))
}

fn push_unique(points: &mut Vec<ChartPoint>, p: ChartPoint) {
    if !points.iter().any(|q| q.dist(&p) < DEDUP_TOL) {
        points.push(p);
    }
}

/// Classifies the radical at every vertex of `locus` against the tangent of
/// `{h = 0}`, and refines the points where the two become parallel.
///
/// `h` defaults to the metric's defining function.
pub fn radical_classification(
    m: &MetricSpec,
    locus: &[Polyline],
    h: Option<&ScalarField>,
    tol_deg: f64,
    tol_tangent: f64,
) -> Result<RadicalScan> {
    let mut scan = RadicalScan::default();
    let hf = |p: ChartPoint| h_jet(m, h, p);
    for line in locus {
        let arc = line.arclength();
        for (p, s) in line.points.iter().zip(arc) {
            let det = m.det(*p)?;
            if det.abs() > tol_deg.max(1e-8) {
                return Err(Error::NotDegenerate { t: p.t, x: p.x, det });
            }
            match frame_at(m, h, *p)? {
                None => scan.skipped.push(*p),
                Some((rad, tan)) => {
                    let alignment = cross(rad, tan).abs();
                    scan.reports.push(RadicalReport {
                        s,
                        point: *p,
                        radical_dir: TangentVector::new(*p, rad[0], rad[1]),
                        h_tangent_dir: TangentVector::new(*p, tan[0], tan[1]),
                        classification: if alignment <= tol_tangent {
                            RadicalClass::Tangent
                        } else {
                            RadicalClass::Transverse
                        },
                        alignment,
                    });
                }
            }
        }
        for (a, b) in line.segments() {
            let (Some((ra, ta)), Some((rb, tb))) = (frame_at(m, h, a)?, frame_at(m, h, b)?) else {
                continue;
            };
            let oriented = |r: [f64; 2]| if dot(r, ra) < 0.0 { [-r[0], -r[1]] } else { r };
            let ca = cross(ra, ta);
            let cb = cross(oriented(rb), tb);
            if ca == 0.0 {
                push_unique(&mut scan.tangency_points, a);
                continue;
            }
            if ca.signum() == cb.signum() || cb == 0.0 {
                continue;
            }
            let signed = |u: f64| -> Result<(ChartPoint, f64)> {
                let q = project(&hf, lerp(a, b, u))?;
                Ok(match frame_at(m, h, q)? {
                    Some((r, t)) => (q, cross(oriented(r), t)),
                    None => (q, 0.0),
                })
            };
            let len = a.dist(&b);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut best = signed(0.5)?.0;
            while (hi - lo) * len > REFINE_TOL {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let (q, c) = signed(mid)?;
                best = q;
                if c == 0.0 {
                    break;
                }
                if c.signum() == ca.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            push_unique(&mut scan.tangency_points, best);
        }
    }
    Ok(scan)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `df ≠ 0` along the locus.
    pub condition1_holds: bool,
    /// `V(f) ≠ 0` along the locus.
    pub condition2_holds: bool,
    /// Points violating either condition, refined onto `{f = 1}`.
    pub violation_points: Vec<ChartPoint>,
    pub n_checked: usize,
    pub min_grad_f: f64,
    pub min_abs_vf: f64,
}

/// Checks that `f` has non-vanishing differential on the locus and that `V`
/// is nowhere tangent to it.
pub fn condition_checks(
    gt: &MetricSpec,
    f: &ScalarField,
    v: &VectorField,
    locus: &[Polyline],
    tol_grad: f64,
) -> Result<ConditionReport> {
    let vf = |p: ChartPoint| -> Result<f64> {
        let g = f.gradient(p)?;
        let vv = v.at(p)?;
        Ok(g[0] * vv.vt + g[1] * vv.vx)
    };
    let h = |p: ChartPoint| -> Result<Jet> { Ok(f.jet(p)? - Jet::constant(1.0)) };
    let mut report = ConditionReport {
        condition1_holds: true,
        condition2_holds: true,
        violation_points: Vec::new(),
        n_checked: 0,
        min_grad_f: f64::INFINITY,
        min_abs_vf: f64::INFINITY,
    };
    for line in locus {
        for p in &line.points {
            let det = gt.det(*p)?;
            if det.abs() > 1e-8 {
                return Err(Error::NotDegenerate { t: p.t, x: p.x, det });
            }
            let g = f.gradient(*p)?;
            let gn = g[0].hypot(g[1]);
            let d = vf(*p)?;
            report.n_checked += 1;
            report.min_grad_f = report.min_grad_f.min(gn);
            report.min_abs_vf = report.min_abs_vf.min(d.abs());
            if gn <= tol_grad {
                report.condition1_holds = false;
                push_unique(&mut report.violation_points, *p);
            }
            if d.abs() <= tol_grad {
                report.condition2_holds = false;
                push_unique(&mut report.violation_points, *p);
            }
        }
        for (a, b) in line.segments() {
            let (da, db) = (vf(a)?, vf(b)?);
            if da == 0.0 || db == 0.0 || da.signum() == db.signum() {
                continue;
            }
            let len = a.dist(&b);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut best = project(&h, lerp(a, b, 0.5))?;
            while (hi - lo) * len > REFINE_TOL {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let q = project(&h, lerp(a, b, mid))?;
                best = q;
                let d = vf(q)?;
                if d == 0.0 {
                    break;
                }
                if d.signum() == da.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            report.condition2_holds = false;
            report.min_abs_vf = report.min_abs_vf.min(vf(best)?.abs());
            push_unique(&mut report.violation_points, best);
        }
    }
    if report.n_checked == 0 {
        report.min_grad_f = 0.0;
        report.min_abs_vf = 0.0;
    }
    Ok(report)
}

/// `t = −(1/π) ln|sin πx| + c`.
pub fn tangency_curve_t(x: f64, c: f64) -> Result<f64> {
    let s = (PI * x).sin().abs();
    if x.fract() == 0.0 || !(s > 0.0) {
        return Err(Error::Singular {
            x,
            reason: "ln|sin(pi x)| diverges at integer x",
        });
    }
    Ok(-s.ln() / PI + c)
}

/// Samples the closed-form curve at `n` evenly spaced `x` in `[x_lo, x_hi]`.
pub fn tangency_locus_curve(x_lo: f64, x_hi: f64, n: usize, c: f64) -> Result<Polyline> {
    if !(x_lo < x_hi) || n < 2 {
        return Err(Error::InvalidArgument("need x_lo < x_hi and n ≥ 2".into()));
    }
    if x_lo.ceil() <= x_hi || x_lo.fract() == 0.0 {
        return Err(Error::Singular {
            x: x_lo.ceil(),
            reason: "range touches an integer",
        });
    }
    let points = (0..n)
        .map(|i| {
            let x = x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64;
            Ok(ChartPoint::new(tangency_curve_t(x, c)?, x))
        })
        .collect::<Result<_>>()?;
    Ok(Polyline { points, closed: false })
}

/// RK4 integral curve of `dx/dt = −tan(πx)` through `start`, followed in
/// both directions until `t` reaches `t_end` or leaves the strip.
///
/// The curve is traced with the direction field `(cos πx, −sin πx)`, which
/// has the same orbits and stays regular where `tan` blows up.
pub fn integrate_tangency_curve(start: ChartPoint, t_end: f64, ds: f64) -> Result<Vec<ChartPoint>> {
    if !(ds > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let field = move |_: f64, y: &[f64; 2]| Ok([sign * (PI * y[1]).cos(), -sign * (PI * y[1]).sin()]);
        let mut y = [start.t, start.x];
        let mut branch = Vec::new();
        for k in 0..10_000_000u64 {
            if (y[0] - start.t).abs() >= (t_end - start.t).abs() {
                break;
            }
            y = rk4_step(&field, k as f64 * ds, &y, ds)?;
            if !(y[0].is_finite() && y[1].is_finite()) {
                return Err(Error::NonFinite("tangency curve integration"));
            }
            branch.push(ChartPoint::new(y[0], y[1]));
        }
        if sign > 0.0 {
            branch.reverse();
            out.extend(branch);
            out.push(start);
        } else {
            out.extend(branch);
        }
    }
    Ok(out)
}

/// Max `|t − closed_form(x)|` along the RK4 curve from `(0, 1/2)` over `t ∈ [0, t_end]`.
pub fn tangency_ode_deviation(t_end: f64, ds: f64) -> Result<f64> {
    let path = integrate_tangency_curve(ChartPoint::new(0.0, 0.5), t_end, ds)?;
    path.iter()
        .map(|p| Ok((p.t - tangency_curve_t(p.x, 0.0)?).abs()))
        .try_fold(0.0f64, |acc, d: Result<f64>| Ok(acc.max(d?)))
}

/// Rotating metric transformed by `f` along the rotating unit timelike field.
pub fn transformed_rotating(f: ScalarField) -> MetricSpec {
    transform_metric(MetricSpec::rotating_default(), VectorField::rotating_unit_timelike(), f)
}

/// Classification with default tolerances and the metric's defining function.
pub fn classify_default(m: &MetricSpec, locus: &[Polyline]) -> Result<RadicalScan> {
    radical_classification(m, locus, None, DEFAULT_TOL_DEG, TOL_TANGENT)
}
