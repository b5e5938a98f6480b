//! Fundamental domains and seam identifications for quotient topologies.
//!
//! Every seam is an affine deck germ `q ↦ A q + b` that carries a one-sided
//! neighbourhood of the near edge onto the far edge. Its Jacobian `A` has
//! determinant ±1; tangent components transform by `A` and metric
//! components pull back by `Aᵀ G A`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{complete_orthonormal_frame, ChartPoint, MetricSpec, Sym2, TangentVector, VectorField};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_apply(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat_det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat_inverse(a: &Mat2) -> Mat2 {
    let d = mat_det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    Plane,
    InfiniteMobius,
    CompactMobius,
    RP2Square,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Plane => "plane",
            Topology::InfiniteMobius => "mobius-inf",
            Topology::CompactMobius => "mobius-compact",
            Topology::RP2Square => "rp2",
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(Topology::Plane),
            "mobius-inf" => Ok(Topology::InfiniteMobius),
            "mobius-compact" => Ok(Topology::CompactMobius),
            "rp2" => Ok(Topology::RP2Square),
            other => Err(Error::InvalidArgument(format!("unknown topology `{other}`"))),
        }
    }
}

/// `q ↦ A q + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub a: Mat2,
    pub b: [f64; 2],
}

impl AffineMap {
    pub fn apply(&self, p: ChartPoint) -> ChartPoint {
        let [t, x] = mat_apply(&self.a, [p.t, p.x]);
        ChartPoint::new(t + self.b[0], x + self.b[1])
    }

    pub fn inverse(&self) -> AffineMap {
        let a = mat_inverse(&self.a);
        let [bt, bx] = mat_apply(&a, self.b);
        AffineMap { a, b: [-bt, -bx] }
    }

    pub fn jacobian(&self) -> Mat2 {
        self.a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    T,
    X,
}

/// One seam: the near edge `{axis = edge}` parametrized by the other
/// coordinate over `param_range`, glued to the far edge by `deck`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seam {
    pub id: &'static str,
    pub axis: Axis,
    pub edge: f64,
    pub param_range: (f64, f64),
    pub deck: AffineMap,
}

impl Seam {
    pub fn point(&self, s: f64) -> ChartPoint {
        match self.axis {
            Axis::X => ChartPoint::new(s, self.edge),
            Axis::T => ChartPoint::new(self.edge, s),
        }
    }

    fn params(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = self.param_range;
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    fn normal_offset(&self, p: ChartPoint, h: f64) -> ChartPoint {
        match self.axis {
            Axis::X => ChartPoint::new(p.t, p.x + h),
            Axis::T => ChartPoint::new(p.t + h, p.x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    pub topology: Topology,
    pub seams: Vec<Seam>,
}

const DIAG_FLIP_T: Mat2 = [[-1.0, 0.0], [0.0, 1.0]];
const DIAG_FLIP_X: Mat2 = [[1.0, 0.0], [0.0, -1.0]];
const RP2_HALF: f64 = SQRT_2;

impl ManifoldSpec {
    pub fn new(topology: Topology) -> Self {
        let seams = match topology {
            Topology::Plane => vec![],
            Topology::InfiniteMobius => vec![Seam {
                id: "x=0",
                axis: Axis::X,
                edge: 0.0,
                param_range: (-2.0, 2.0),
                deck: AffineMap {
                    a: DIAG_FLIP_T,
                    b: [0.0, 1.0],
                },
            }],
            Topology::CompactMobius => vec![Seam {
                id: "x=0",
                axis: Axis::X,
                edge: 0.0,
                param_range: (0.0, 1.0),
                deck: AffineMap {
                    a: DIAG_FLIP_T,
                    b: [1.0, 1.0],
                },
            }],
            Topology::RP2Square => vec![
                Seam {
                    id: "x=-sqrt2",
                    axis: Axis::X,
                    edge: -RP2_HALF,
                    param_range: (-RP2_HALF, RP2_HALF),
                    deck: AffineMap {
                        a: DIAG_FLIP_T,
                        b: [0.0, 2.0 * RP2_HALF],
                    },
                },
                Seam {
                    id: "t=-sqrt2",
                    axis: Axis::T,
                    edge: -RP2_HALF,
                    param_range: (-RP2_HALF, RP2_HALF),
                    deck: AffineMap {
                        a: DIAG_FLIP_X,
                        b: [2.0 * RP2_HALF, 0.0],
                    },
                },
            ],
        };
        ManifoldSpec { topology, seams }
    }

    pub fn in_domain(&self, p: ChartPoint) -> bool {
        match self.topology {
            Topology::Plane => p.is_finite(),
            Topology::InfiniteMobius => p.t.is_finite() && (0.0..1.0).contains(&p.x),
            Topology::CompactMobius => (0.0..=1.0).contains(&p.t) && (0.0..1.0).contains(&p.x),
            Topology::RP2Square => {
                (-RP2_HALF..=RP2_HALF).contains(&p.t) && (-RP2_HALF..=RP2_HALF).contains(&p.x)
            }
        }
    }
}

/// Result of bringing a raw chart point into the fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Canonical {
    pub point: ChartPoint,
    /// Maps tangent components at the raw point to components at `point`.
    pub jacobian: Mat2,
    /// Seams crossed, in application order.
    pub crossings: Vec<&'static str>,
}

/// Maps `raw` into the fundamental domain of `man`.
///
/// The projective square applies at most one germ per edge pair, so raw
/// points farther than one square width outside are rejected.
pub fn canonicalize(man: &ManifoldSpec, raw: ChartPoint) -> Result<Canonical> {
    if !raw.is_finite() {
        return Err(Error::NonFinite("raw point"));
    }
    let outside = |reason| Error::OutsideDomain {
        t: raw.t,
        x: raw.x,
        reason,
    };
    match man.topology {
        Topology::Plane => Ok(Canonical {
            point: raw,
            jacobian: IDENTITY,
            crossings: vec![],
        }),
        Topology::InfiniteMobius | Topology::CompactMobius => {
            let mut k = raw.x.floor();
            let mut x = raw.x - k;
            if x >= 1.0 {
                x -= 1.0;
                k += 1.0;
            }
            let odd = k.rem_euclid(2.0) == 1.0;
            let t = match (man.topology, odd) {
                (_, false) => raw.t,
                (Topology::InfiniteMobius, true) => -raw.t,
                (_, true) => 1.0 - raw.t,
            };
            let point = ChartPoint::new(t, x);
            if !man.in_domain(point) {
                return Err(outside("t outside the strip"));
            }
            let seam = man.seams[0].id;
            Ok(Canonical {
                point,
                jacobian: if odd { DIAG_FLIP_T } else { IDENTITY },
                crossings: vec![seam; k.abs() as usize],
            })
        }
        Topology::RP2Square => {
            let x_seam = &man.seams[0];
            let t_seam = &man.seams[1];
            let mut p = raw;
            let mut jac = IDENTITY;
            let mut crossings = Vec::new();
            let mut step = |p: &mut ChartPoint, germ: AffineMap, id| {
                *p = germ.apply(*p);
                jac = mat_mul(&germ.jacobian(), &jac);
                crossings.push(id);
            };
            if p.t < -RP2_HALF {
                step(&mut p, t_seam.deck, t_seam.id);
            } else if p.t > RP2_HALF {
                step(&mut p, t_seam.deck.inverse(), t_seam.id);
            }
            if p.x < -RP2_HALF {
                step(&mut p, x_seam.deck, x_seam.id);
            } else if p.x > RP2_HALF {
                step(&mut p, x_seam.deck.inverse(), x_seam.id);
            }
            if !man.in_domain(p) {
                return Err(outside("more than one germ per edge would be needed"));
            }
            Ok(Canonical {
                point: p,
                jacobian: jac,
                crossings,
            })
        }
    }
}

/// Pushes `v` forward to the canonical representative of its base point.
pub fn transport_vector(man: &ManifoldSpec, v: &TangentVector) -> Result<TangentVector> {
    let c = canonicalize(man, v.base)?;
    let [vt, vx] = mat_apply(&c.jacobian, v.components());
    Ok(TangentVector::new(c.point, vt, vx))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamSample {
    pub s: f64,
    pub dgtt: f64,
    pub dgtx: f64,
    pub dgxx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamReport {
    pub seam: String,
    pub order: u8,
    pub samples: Vec<SeamSample>,
    pub max_abs_mismatch: f64,
}

/// Largest mismatch over a set of seam reports (zero when there are no seams).
pub fn max_mismatch(reports: &[SeamReport]) -> f64 {
    reports.iter().map(|r| r.max_abs_mismatch).fold(0.0, f64::max)
}

/// Step for the one-sided normal derivatives in order-1 seam checks.
pub const SEAM_FD_STEP: f64 = 1e-5;

/// Compares the metric on the near side of each seam with the pullback of
/// the metric on the far side.
///
/// Order 0 compares components; order 1 compares derivatives normal to
/// the seam, each side differentiated by central differences of its own
/// analytic expression.
pub fn seam_compatibility(man: &ManifoldSpec, m: &MetricSpec, order: u8, n_samples: usize) -> Result<Vec<SeamReport>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("n_samples must be at least 2".into()));
    }
    if order > 1 {
        return Err(Error::InvalidArgument(format!("unsupported seam order {order}")));
    }
    let h = SEAM_FD_STEP;
    man.seams
        .iter()
        .map(|seam| {
            let jac = seam.deck.jacobian();
            let far = |q: ChartPoint| -> Result<Sym2> { Ok(m.sym(seam.deck.apply(q))?.pullback(&jac)) };
            let near = |q: ChartPoint| m.sym(q);
            let mut samples = Vec::with_capacity(n_samples);
            for s in seam.params(n_samples) {
                let p = seam.point(s);
                let (a, b) = if order == 0 {
                    (near(p)?, far(p)?)
                } else {
                    let (lo, hi) = (seam.normal_offset(p, -h), seam.normal_offset(p, h));
                    (
                        central(near(hi)?, near(lo)?, h),
                        central(far(hi)?, far(lo)?, h),
                    )
                };
                samples.push(SeamSample {
                    s,
                    dgtt: a.tt - b.tt,
                    dgtx: a.tx - b.tx,
                    dgxx: a.xx - b.xx,
                });
            }
            let max_abs_mismatch = samples
                .iter()
                .map(|d| d.dgtt.abs().max(d.dgtx.abs()).max(d.dgxx.abs()))
                .fold(0.0, f64::max);
            Ok(SeamReport {
                seam: seam.id.to_string(),
                order,
                samples,
                max_abs_mismatch,
            })
        })
        .collect()
}

fn central(hi: Sym2, lo: Sym2, h: f64) -> Sym2 {
    Sym2::new(
        (hi.tt - lo.tt) / (2.0 * h),
        (hi.tx - lo.tx) / (2.0 * h),
        (hi.xx - lo.xx) / (2.0 * h),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSeamSample {
    pub s: f64,
    pub dvt: f64,
    pub dvx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSeamReport {
    pub seam: String,
    pub samples: Vec<VectorSeamSample>,
    pub max_abs_mismatch: f64,
}

/// Checks whether a tangent field given pointwise descends to the quotient:
/// the far-side value pulled back through the deck germ minus the near-side value.
pub fn field_seam_check<F>(man: &ManifoldSpec, n_samples: usize, field: F) -> Result<Vec<VectorSeamReport>>
where
    F: Fn(ChartPoint) -> Result<[f64; 2]>,
{
    if n_samples < 2 {
        return Err(Error::InvalidArgument("n_samples must be at least 2".into()));
    }
    man.seams
        .iter()
        .map(|seam| {
            let back = mat_inverse(&seam.deck.jacobian());
            let mut samples = Vec::with_capacity(n_samples);
            for s in seam.params(n_samples) {
                let p = seam.point(s);
                let here = field(p)?;
                let there = mat_apply(&back, field(seam.deck.apply(p))?);
                samples.push(VectorSeamSample {
                    s,
                    dvt: there[0] - here[0],
                    dvx: there[1] - here[1],
                });
            }
            let max_abs_mismatch = samples
                .iter()
                .map(|d| d.dvt.abs().max(d.dvx.abs()))
                .fold(0.0, f64::max);
            Ok(VectorSeamReport {
                seam: seam.id.to_string(),
                samples,
                max_abs_mismatch,
            })
        })
        .collect()
}

pub fn vector_field_seam_check(man: &ManifoldSpec, v: &VectorField, n_samples: usize) -> Result<Vec<VectorSeamReport>> {
    field_seam_check(man, n_samples, |p| Ok(v.at(p)?.components()))
}

/// Seam check for the spacelike frame vector completing `V` to an orthonormal frame.
pub fn frame_seam_check(
    man: &ManifoldSpec,
    m: &MetricSpec,
    v: &VectorField,
    n_samples: usize,
    tol_deg: f64,
) -> Result<Vec<VectorSeamReport>> {
    field_seam_check(man, n_samples, |p| {
        Ok(complete_orthonormal_frame(m, v, p, tol_deg)?.components())
    })
}

/// Attaching map from the boundary circle of the disk to the boundary of
/// the compact Möbius strip.
pub fn attach_psi(theta: f64) -> Result<ChartPoint> {
    use std::f64::consts::PI;
    if !(0.0..2.0 * PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 2π)")));
    }
    Ok(if theta <= PI {
        ChartPoint::new(1.0, theta / PI)
    } else {
        ChartPoint::new(0.0, theta / PI - 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{inner, rotating_metric, DEFAULT_TOL_DEG};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn p(t: f64, x: f64) -> ChartPoint {
        ChartPoint::new(t, x)
    }

    fn close(a: ChartPoint, b: ChartPoint) -> bool {
        a.dist(&b) <= 1e-12
    }

    #[test]
    fn infinite_mobius_canonicalization() {
        let man = ManifoldSpec::new(Topology::InfiniteMobius);
        let c = canonicalize(&man, p(0.3, 1.7)).unwrap();
        assert!(close(c.point, p(-0.3, 0.7)));
        assert_eq!(c.jacobian, DIAG_FLIP_T);
        assert_eq!(c.crossings, vec!["x=0"]);
        let c = canonicalize(&man, p(0.3, 0.7)).unwrap();
        assert_eq!(c.point, p(0.3, 0.7));
        assert_eq!(c.jacobian, IDENTITY);
        let c = canonicalize(&man, p(0.3, -1e-17)).unwrap();
        assert!(man.in_domain(c.point));
    }

    #[test]
    fn compact_mobius_canonicalization() {
        let man = ManifoldSpec::new(Topology::CompactMobius);
        let c = canonicalize(&man, p(0.3, 1.2)).unwrap();
        assert!(close(c.point, p(0.7, 0.2)), "{:?}", c.point);
        assert_eq!(c.jacobian, DIAG_FLIP_T);
        assert!(matches!(canonicalize(&man, p(1.5, 0.2)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn rp2_canonicalization() {
        let man = ManifoldSpec::new(Topology::RP2Square);
        let delta = 0.1;
        let v = TangentVector::new(p(0.4, -SQRT_2 - delta), 1.0, 0.0);
        let out = transport_vector(&man, &v).unwrap();
        assert!(close(out.base, p(-0.4, SQRT_2 - delta)));
        assert_eq!((out.vt, out.vx), (-1.0, 0.0));
        // finite-difference Jacobian of the germ
        let germ = man.seams[0].deck;
        let h = 1e-6;
        let q = v.base;
        let dt = germ.apply(p(q.t + h, q.x));
        let dm = germ.apply(p(q.t - h, q.x));
        assert!(((dt.t - dm.t) / (2.0 * h) + 1.0).abs() < 1e-8);
        assert!(((dt.x - dm.x) / (2.0 * h)).abs() < 1e-8);
        // corner: one germ per edge pair
        let c = canonicalize(&man, p(1.6, 1.5)).unwrap();
        assert!(man.in_domain(c.point));
        assert_eq!(c.crossings.len(), 2);
        assert!((mat_det(&c.jacobian) - 1.0).abs() < 1e-15);
        assert!(matches!(canonicalize(&man, p(0.0, 5.0)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn germs_invert() {
        for topo in [Topology::InfiniteMobius, Topology::CompactMobius, Topology::RP2Square] {
            let man = ManifoldSpec::new(topo);
            for seam in &man.seams {
                assert_eq!(mat_det(&seam.deck.jacobian()).abs(), 1.0);
                for s in seam.params(11) {
                    let q = seam.point(s);
                    let back = seam.deck.inverse().apply(seam.deck.apply(q));
                    assert!(close(back, q));
                }
            }
        }
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for topo in [Topology::Plane, Topology::InfiniteMobius, Topology::CompactMobius, Topology::RP2Square] {
            let man = ManifoldSpec::new(topo);
            for _ in 0..10_000 {
                let raw = match topo {
                    Topology::CompactMobius => p(rng.gen_range(0.0..=1.0), rng.gen_range(-5.0..5.0)),
                    Topology::RP2Square => p(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
                    _ => p(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                };
                let c1 = canonicalize(&man, raw).unwrap();
                assert!(man.in_domain(c1.point), "{topo:?} {raw:?} -> {:?}", c1.point);
                assert_eq!(mat_det(&c1.jacobian).abs(), 1.0);
                let c2 = canonicalize(&man, c1.point).unwrap();
                assert_eq!(c2.point, c1.point);
                assert_eq!(c2.jacobian, IDENTITY);
                assert!(c2.crossings.is_empty());
            }
        }
    }

    #[test]
    fn plane_has_no_seam_mismatch() {
        let man = ManifoldSpec::new(Topology::Plane);
        let reports = seam_compatibility(&man, &MetricSpec::CrosscapQuadratic, 0, 11).unwrap();
        assert_eq!(max_mismatch(&reports), 0.0);
        let v = vector_field_seam_check(&man, &VectorField::coordinate_time(), 11).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn rotating_mobius_seams() {
        let man = ManifoldSpec::new(Topology::InfiniteMobius);
        let m = rotating_metric(PI);
        let r0 = seam_compatibility(&man, &m, 0, 101).unwrap();
        assert!(max_mismatch(&r0) <= 1e-9);
        let r1 = seam_compatibility(&man, &m, 1, 101).unwrap();
        // ∂x g_tx = 2π on the near side, −2π after pulling back the far side
        assert!((max_mismatch(&r1) - 4.0 * PI).abs() < 1e-4);
        assert!(r1[0].samples.iter().all(|s| (s.dgtx - 4.0 * PI).abs() < 1e-4));
        let compact = ManifoldSpec::new(Topology::CompactMobius);
        assert!(max_mismatch(&seam_compatibility(&compact, &m, 0, 21).unwrap()) <= 1e-9);
    }

    #[test]
    fn crosscap_square_offdiagonal_jump() {
        let man = ManifoldSpec::new(Topology::RP2Square);
        let r = seam_compatibility(&man, &MetricSpec::CrosscapQuadratic, 0, 41).unwrap();
        for s in &r[0].samples {
            assert!((s.dgtx.abs() - 2.0 * SQRT_2 * s.s.abs()).abs() < 1e-12);
            assert!(s.dgtt.abs() < 1e-12 && s.dgxx.abs() < 1e-12);
        }
        assert_eq!(r[0].samples.len(), 41);
        assert!(r[0].samples.windows(2).all(|w| w[0].s < w[1].s));
    }

    #[test]
    fn vector_fields_across_mobius_seam() {
        let man = ManifoldSpec::new(Topology::InfiniteMobius);
        let ok = vector_field_seam_check(&man, &VectorField::rotating_unit_timelike(), 101).unwrap();
        assert!(ok[0].max_abs_mismatch <= 1e-12);
        let bad = vector_field_seam_check(&man, &VectorField::coordinate_time(), 101).unwrap();
        assert_eq!(bad[0].max_abs_mismatch, 2.0);
        let frame = frame_seam_check(
            &man,
            &rotating_metric(PI),
            &VectorField::rotating_unit_timelike(),
            101,
            DEFAULT_TOL_DEG,
        )
        .unwrap();
        assert!(frame[0].max_abs_mismatch <= 1e-12);
    }

    #[test]
    fn transport_respects_inner_products_up_to_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cases = [
            (Topology::InfiniteMobius, rotating_metric(PI)),
            (Topology::RP2Square, MetricSpec::CrosscapQuadratic),
        ];
        for (topo, m) in cases {
            let man = ManifoldSpec::new(topo);
            let reports = seam_compatibility(&man, &m, 0, 101).unwrap();
            for (seam, report) in man.seams.iter().zip(&reports) {
                for _ in 0..500 {
                    let (lo, hi) = seam.param_range;
                    let q = seam.point(rng.gen_range(lo..hi));
                    let u = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    let w = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    let near = inner(&m, &TangentVector::new(q, u[0], u[1]), &TangentVector::new(q, w[0], w[1])).unwrap();
                    let far_q = seam.deck.apply(q);
                    let j = seam.deck.jacobian();
                    let (ju, jw) = (mat_apply(&j, u), mat_apply(&j, w));
                    let far = inner(
                        &m,
                        &TangentVector::new(far_q, ju[0], ju[1]),
                        &TangentVector::new(far_q, jw[0], jw[1]),
                    )
                    .unwrap();
                    let bound = report.max_abs_mismatch * u[0].hypot(u[1]) * w[0].hypot(w[1]);
                    assert!((near - far).abs() <= bound + 1e-12, "{topo:?}: {} > {bound}", (near - far).abs());
                }
            }
        }
    }

    #[test]
    fn psi_branches() {
        assert_eq!(attach_psi(0.0).unwrap(), p(1.0, 0.0));
        let at_pi = attach_psi(PI).unwrap();
        assert_eq!(at_pi, p(1.0, 1.0));
        let man = ManifoldSpec::new(Topology::CompactMobius);
        assert_eq!(canonicalize(&man, at_pi).unwrap().point, p(0.0, 0.0));
        let q = attach_psi(1.5 * PI).unwrap();
        assert!(close(q, p(0.0, 0.5)));
        assert!(attach_psi(2.0 * PI).is_err());
        assert!(attach_psi(-0.1).is_err());
    }
}
