//! Points, tangent objects and metric fields on a two-dimensional chart.
//!
//! A metric is a symmetric (0,2) tensor field given by three component
//! functions `g_tt`, `g_tx`, `g_xx` of the chart coordinates `(t, x)`.
//! Every metric can be evaluated on plain `f64` coordinates or on [`Jet`]s,
//! the latter giving exact first and second partial derivatives.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet, Scalar};

/// Degeneracy tolerance on `|det|` used when none is given.
pub const DEFAULT_TOL_DEG: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub t: f64,
    pub x: f64,
}

impl ChartPoint {
    pub const fn new(t: f64, x: f64) -> Self {
        ChartPoint { t, x }
    }

    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn checked(t: f64, x: f64) -> Result<Self> {
        if t.is_finite() && x.is_finite() {
            Ok(ChartPoint { t, x })
        } else {
            Err(Error::NonFinite("chart point"))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }

    pub fn dist(&self, other: &ChartPoint) -> f64 {
        (self.t - other.t).hypot(self.x - other.x)
    }
}

/// Tangent vector in the coordinate basis `∂t, ∂x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: ChartPoint,
    pub vt: f64,
    pub vx: f64,
}

impl TangentVector {
    pub const fn new(base: ChartPoint, vt: f64, vx: f64) -> Self {
        TangentVector { base, vt, vx }
    }

    pub fn components(&self) -> [f64; 2] {
        [self.vt, self.vx]
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.vt.hypot(self.vx)
    }
}

/// Covector in the basis `dt, dx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub base: ChartPoint,
    pub wt: f64,
    pub wx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignatureClass {
    Lorentzian,
    Riemannian,
    NegativeDefinite,
    Degenerate,
}

impl SignatureClass {
    /// Classifies a symmetric 2×2 matrix from its determinant and `g_tt`.
    pub fn from_components(g_tt: f64, det: f64, tol_deg: f64) -> Self {
        if det < -tol_deg {
            SignatureClass::Lorentzian
        } else if det <= tol_deg {
            SignatureClass::Degenerate
        } else if g_tt > 0.0 {
            SignatureClass::Riemannian
        } else {
            SignatureClass::NegativeDefinite
        }
    }

    /// One-letter code used in field CSV output.
    pub fn code(self) -> char {
        match self {
            SignatureClass::Lorentzian => 'L',
            SignatureClass::Riemannian => 'R',
            SignatureClass::NegativeDefinite => 'N',
            SignatureClass::Degenerate => 'D',
        }
    }
}

/// Symmetric 2×2 matrix of metric components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2 {
    pub tt: f64,
    pub tx: f64,
    pub xx: f64,
}

impl Sym2 {
    pub const fn new(tt: f64, tx: f64, xx: f64) -> Self {
        Sym2 { tt, tx, xx }
    }

    pub fn det(&self) -> f64 {
        self.tt * self.xx - self.tx * self.tx
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.tt * v[0] + self.tx * v[1],
            self.tx * v[0] + self.xx * v[1],
        ]
    }

    pub fn quad(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let gv = self.apply(v);
        u[0] * gv[0] + u[1] * gv[1]
    }

    pub fn inverse(&self) -> Option<Sym2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Sym2::new(self.xx / d, -self.tx / d, self.tt / d))
    }

    /// `Jᵀ G J` for a general 2×2 matrix `J` (row-major).
    pub fn pullback(&self, j: &[[f64; 2]; 2]) -> Sym2 {
        let col = |k: usize| [j[0][k], j[1][k]];
        Sym2::new(
            self.quad(col(0), col(0)),
            self.quad(col(0), col(1)),
            self.quad(col(1), col(1)),
        )
    }

    pub fn max_abs_diff(&self, o: &Sym2) -> f64 {
        (self.tt - o.tt)
            .abs()
            .max((self.tx - o.tx).abs())
            .max((self.xx - o.xx).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample {
    pub g_tt: f64,
    pub g_tx: f64,
    pub g_xx: f64,
    pub det: f64,
    pub class: SignatureClass,
}

impl MetricSample {
    pub fn from_sym(g: Sym2, tol_deg: f64) -> Self {
        let det = g.det();
        MetricSample {
            g_tt: g.tt,
            g_tx: g.tx,
            g_xx: g.xx,
            det,
            class: SignatureClass::from_components(g.tt, det, tol_deg),
        }
    }

    pub fn sym(&self) -> Sym2 {
        Sym2::new(self.g_tt, self.g_tx, self.g_xx)
    }
}

/// A scalar field: an expression in `t, x` or a named preset.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarField {
    Expr(Expr),
    /// `f = t² + x²`
    SumOfSquares,
}

impl ScalarField {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(ScalarField::Expr(Expr::parse(src)?))
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::Expr(Expr::Num(c))
    }

    pub fn eval_with<S: Scalar>(&self, t: &S, x: &S) -> Result<S> {
        match self {
            ScalarField::Expr(e) => e.eval_with(t, x).map_err(|source| Error::Eval {
                t: t.value(),
                x: x.value(),
                source,
            }),
            ScalarField::SumOfSquares => Ok(t.clone() * t.clone() + x.clone() * x.clone()),
        }
    }

    pub fn eval(&self, p: ChartPoint) -> Result<f64> {
        self.eval_with(&p.t, &p.x)
    }

    pub fn jet(&self, p: ChartPoint) -> Result<Jet> {
        self.eval_with(&Jet::var_t(p.t), &Jet::var_x(p.x))
    }

    /// Exact gradient `(∂t f, ∂x f)`.
    pub fn gradient(&self, p: ChartPoint) -> Result<[f64; 2]> {
        Ok(self.jet(p)?.grad)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Expr(e) => write!(f, "{e}"),
            ScalarField::SumOfSquares => write!(f, "t^2 + x^2"),
        }
    }
}

/// Parses a scalar field expression.
pub fn parse_field_expr(src: &str) -> Result<ScalarField> {
    ScalarField::parse(src)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub vt: ScalarField,
    pub vx: ScalarField,
}

impl VectorField {
    pub fn new(vt: ScalarField, vx: ScalarField) -> Self {
        VectorField { vt, vx }
    }

    /// Parses `"EXPR,EXPR"`.
    pub fn parse(src: &str) -> Result<Self> {
        let (a, b) = src
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument(format!("expected `vt,vx`, got `{src}`")))?;
        Ok(VectorField::new(ScalarField::parse(a)?, ScalarField::parse(b)?))
    }

    /// `V = cos(πx) ∂t − sin(πx) ∂x`, unit timelike for the rotating metric.
    pub fn rotating_unit_timelike() -> Self {
        VectorField::new(
            ScalarField::parse("cos(pi*x)").unwrap(),
            ScalarField::parse("-sin(pi*x)").unwrap(),
        )
    }

    /// `V = ∂t`.
    pub fn coordinate_time() -> Self {
        VectorField::new(ScalarField::constant(1.0), ScalarField::constant(0.0))
    }

    pub fn eval_with<S: Scalar>(&self, t: &S, x: &S) -> Result<[S; 2]> {
        Ok([self.vt.eval_with(t, x)?, self.vx.eval_with(t, x)?])
    }

    pub fn at(&self, p: ChartPoint) -> Result<TangentVector> {
        let [vt, vx] = self.eval_with(&p.t, &p.x)?;
        Ok(TangentVector::new(p, vt, vx))
    }

    /// Samples the field on a `resolution × resolution` grid over `window`
    /// and returns the first point where it vanishes (Euclidean norm below `tol`).
    pub fn find_zero(&self, window: &Window, resolution: usize, tol: f64) -> Result<Option<ChartPoint>> {
        for p in window.grid(resolution) {
            let v = self.at(p)?;
            if v.euclidean_norm() <= tol {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.vt, self.vx)
    }
}

/// Axis-aligned rectangle `[t_min, t_max] × [x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Window {
    pub fn new(t_min: f64, t_max: f64, x_min: f64, x_max: f64) -> Result<Self> {
        let w = Window {
            t_min,
            t_max,
            x_min,
            x_max,
        };
        if !(t_min.is_finite() && t_max.is_finite() && x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite("window bounds"));
        }
        if t_min >= t_max || x_min >= x_max {
            return Err(Error::InvalidArgument(format!("degenerate window {w:?}")));
        }
        Ok(w)
    }

    pub fn square(half: f64) -> Self {
        Window {
            t_min: -half,
            t_max: half,
            x_min: -half,
            x_max: half,
        }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        p.t >= self.t_min && p.t <= self.t_max && p.x >= self.x_min && p.x <= self.x_max
    }

    /// Grid nodes, `n` per axis, row-major in `t` then `x`.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = ChartPoint> + '_ {
        let step = move |lo: f64, hi: f64, i: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                ChartPoint::new(
                    step(self.t_min, self.t_max, i),
                    step(self.x_min, self.x_max, j),
                )
            })
        })
    }
}

/// Metric fields on a 2D chart.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpec {
    /// `−dt² + dx²`
    FlatMinkowski,
    /// `−cos2φ dt² + 2 sin2φ dt dx + cos2φ dx²` with `φ = angle_rate · x`.
    RotatingMinkowski { angle_rate: f64 },
    /// `(1−t²) dt² + 2tx dt dx + (1−x²) dx²`
    CrosscapQuadratic,
    /// `g + f · V♭ ⊗ V♭`
    Transformed {
        base: Box<MetricSpec>,
        f: ScalarField,
        v: VectorField,
    },
    Custom {
        g_tt: ScalarField,
        g_tx: ScalarField,
        g_xx: ScalarField,
    },
}

/// Rotating Minkowski metric with `φ = angle_rate · x`.
pub fn rotating_metric(angle_rate: f64) -> MetricSpec {
    MetricSpec::RotatingMinkowski { angle_rate }
}

impl MetricSpec {
    pub fn rotating_default() -> Self {
        rotating_metric(PI)
    }

    /// Components `[g_tt, g_tx, g_xx]` over an arbitrary scalar type.
    pub fn components_with<S: Scalar>(&self, t: &S, x: &S) -> Result<[S; 3]> {
        match self {
            MetricSpec::FlatMinkowski => Ok([S::constant(-1.0), S::constant(0.0), S::constant(1.0)]),
            MetricSpec::RotatingMinkowski { angle_rate } => {
                let two_phi = x.scale(2.0 * angle_rate);
                let (c, s) = (two_phi.cos(), two_phi.sin());
                Ok([-c.clone(), s, c])
            }
            MetricSpec::CrosscapQuadratic => {
                let one = S::constant(1.0);
                Ok([
                    one.clone() - t.clone() * t.clone(),
                    t.clone() * x.clone(),
                    one - x.clone() * x.clone(),
                ])
            }
            MetricSpec::Transformed { base, f, v } => {
                let [gtt, gtx, gxx] = base.components_with(t, x)?;
                let [vt, vx] = v.eval_with(t, x)?;
                let fv = f.eval_with(t, x)?;
                let wt = gtt.clone() * vt.clone() + gtx.clone() * vx.clone();
                let wx = gtx.clone() * vt + gxx.clone() * vx;
                Ok([
                    gtt + fv.clone() * wt.clone() * wt.clone(),
                    gtx + fv.clone() * wt * wx.clone(),
                    gxx + fv * wx.clone() * wx,
                ])
            }
            MetricSpec::Custom { g_tt, g_tx, g_xx } => Ok([
                g_tt.eval_with(t, x)?,
                g_tx.eval_with(t, x)?,
                g_xx.eval_with(t, x)?,
            ]),
        }
    }

    pub fn sym(&self, p: ChartPoint) -> Result<Sym2> {
        let [tt, tx, xx] = self.components_with(&p.t, &p.x)?;
        Ok(Sym2::new(tt, tx, xx))
    }

    /// Components with exact first and second derivatives.
    pub fn jets(&self, p: ChartPoint) -> Result<[Jet; 3]> {
        self.components_with(&Jet::var_t(p.t), &Jet::var_x(p.x))
    }

    pub fn eval(&self, p: ChartPoint, tol_deg: f64) -> Result<MetricSample> {
        Ok(MetricSample::from_sym(self.sym(p)?, tol_deg))
    }

    pub fn det(&self, p: ChartPoint) -> Result<f64> {
        Ok(self.sym(p)?.det())
    }

    /// A function whose zero set is the degeneracy locus, as a jet.
    ///
    /// For transformed metrics this is `−(1 + f · g(V,V))`, which is `f − 1`
    /// whenever `V` is unit timelike for the base metric; otherwise `det`.
    pub fn defining_function(&self, p: ChartPoint) -> Result<Jet> {
        let (t, x) = (Jet::var_t(p.t), Jet::var_x(p.x));
        match self {
            MetricSpec::Transformed { base, f, v } => {
                let [gtt, gtx, gxx] = base.components_with(&t, &x)?;
                let [vt, vx] = v.eval_with(&t, &x)?;
                let fv = f.eval_with(&t, &x)?;
                let norm2 = gtt * vt * vt + (gtx * vt * vx).scale(2.0) + gxx * vx * vx;
                Ok(-(Jet::constant(1.0) + fv * norm2))
            }
            _ => {
                let [gtt, gtx, gxx] = self.components_with(&t, &x)?;
                Ok(gtt * gxx - gtx * gtx)
            }
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            MetricSpec::FlatMinkowski => "flat".into(),
            MetricSpec::RotatingMinkowski { angle_rate } => format!("rotating(angle_rate={angle_rate})"),
            MetricSpec::CrosscapQuadratic => "crosscap".into(),
            MetricSpec::Transformed { base, f, v } => {
                format!("transformed(base={}, f={f}, V={v})", base.describe())
            }
            MetricSpec::Custom { g_tt, g_tx, g_xx } => format!("custom({g_tt}; {g_tx}; {g_xx})"),
        }
    }
}

/// Evaluates the metric at `p`, classifying its signature with `tol_deg`.
pub fn eval_metric(m: &MetricSpec, p: ChartPoint, tol_deg: f64) -> Result<MetricSample> {
    m.eval(p, tol_deg)
}

/// `g(u, v)` at the common base point.
pub fn inner(m: &MetricSpec, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    if u.base != v.base {
        return Err(Error::MismatchedBase);
    }
    Ok(m.sym(u.base)?.quad(u.components(), v.components()))
}

/// `V♭ = g(V, ·)` at `p`.
pub fn lower_index(m: &MetricSpec, v: &VectorField, p: ChartPoint) -> Result<Covector> {
    let g = m.sym(p)?;
    let vv = v.at(p)?;
    let [wt, wx] = g.apply(vv.components());
    Ok(Covector { base: p, wt, wx })
}

/// Completes a unit timelike `V` to an orthonormal frame `{V, E1}` at `p`.
///
/// `E1` is the unit spacelike vector orthogonal to `V` with positive
/// x-component (positive t-component if the x-component vanishes).
pub fn complete_orthonormal_frame(
    m: &MetricSpec,
    v: &VectorField,
    p: ChartPoint,
    tol_deg: f64,
) -> Result<TangentVector> {
    let sample = m.eval(p, tol_deg)?;
    if sample.class != SignatureClass::Lorentzian {
        return Err(Error::NotLorentzian {
            t: p.t,
            x: p.x,
            det: sample.det,
        });
    }
    let g = sample.sym();
    let vv = v.at(p)?.components();
    let norm2 = g.quad(vv, vv);
    if !(norm2 < 0.0) {
        return Err(Error::NotTimelike { t: p.t, x: p.x, norm2 });
    }
    // kernel of V♭ is spanned by the Euclidean perpendicular of its components
    let [wt, wx] = g.apply(vv);
    let mut e = [-wx, wt];
    let len2 = g.quad(e, e);
    let scale = 1.0 / len2.sqrt();
    e = [e[0] * scale, e[1] * scale];
    let flip = if e[1] != 0.0 { e[1] < 0.0 } else { e[0] < 0.0 };
    if flip {
        e = [-e[0], -e[1]];
    }
    Ok(TangentVector::new(p, e[0], e[1]))
}
