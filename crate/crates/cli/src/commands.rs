//! Subcommand bodies. Each returns its artifacts as text; nothing touches
//! the filesystem until [`Artifacts::write`] at the end of a run.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use sigchange::atlas::seam_compatibility;
use sigchange::causal::{null_slopes, trapping_experiment, Slope, TrappingSetup};
use sigchange::dynamics::{integrate_geodesic_with, GeodesicConfig, GeodesicStatus, GeodesicTrace, SeamEvent};
use sigchange::locus::{zero_set, Polyline};
use sigchange::prescription::{degeneracy_locus, radical_classification, DEFAULT_GRID_N};
use sigchange::{ChartPoint, MetricSpec, SignatureClass, Window};

use crate::config::{Model, RunConfig};
use crate::output::{emit, json, num, Csv};
use crate::svg::Plot;
use crate::verify::{failure_summary, run_suite, VerifyReport};

/// Output files of one run, written together once every computation succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    /// `None` path means stdout.
    pub files: Vec<(Option<PathBuf>, String)>,
    /// Short human-readable status for stderr.
    pub notes: Vec<String>,
    pub exit_code: i32,
}

impl Artifacts {
    pub fn write(&self) -> Result<()> {
        for (path, text) in &self.files {
            emit(path.as_deref(), text)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSampleRow {
    pub point: ChartPoint,
    pub g_tt: f64,
    pub g_tx: f64,
    pub g_xx: f64,
    pub det: f64,
    pub class: SignatureClass,
    /// Present exactly when the sample is Lorentzian.
    pub slopes: Option<(Slope, Slope)>,
}

pub const FIELD_HEADER: [&str; 9] = ["t", "x", "g_tt", "g_tx", "g_xx", "det", "class_code", "slope1", "slope2"];

fn slope_cell(s: Option<Slope>) -> String {
    match s {
        None => String::new(),
        Some(Slope::Finite(v)) => num(v),
        Some(Slope::Vertical) => "vertical".into(),
    }
}

/// Samples the metric on an `n × n` grid, rows in `t` then `x` order.
pub fn field_rows(m: &MetricSpec, window: &Window, n: usize, tol_deg: f64) -> Result<Vec<FieldSampleRow>> {
    let pts: Vec<ChartPoint> = window.grid(n).collect();
    let rows = pts
        .par_iter()
        .map(|&p| {
            let s = m.eval(p, tol_deg)?;
            let slopes = if s.class == SignatureClass::Lorentzian {
                Some(null_slopes(m, p, tol_deg)?)
            } else {
                None
            };
            Ok(FieldSampleRow {
                point: p,
                g_tt: s.g_tt,
                g_tx: s.g_tx,
                g_xx: s.g_xx,
                det: s.det,
                class: s.class,
                slopes,
            })
        })
        .collect::<sigchange::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn field_csv(rows: &[FieldSampleRow]) -> String {
    let mut csv = Csv::new(&FIELD_HEADER);
    for r in rows {
        csv.row(&[
            num(r.point.t),
            num(r.point.x),
            num(r.g_tt),
            num(r.g_tx),
            num(r.g_xx),
            num(r.det),
            r.class.code().to_string(),
            slope_cell(r.slopes.map(|s| s.0)),
            slope_cell(r.slopes.map(|s| s.1)),
        ]);
    }
    csv.into_string()
}

const LOCUS_GRID_MIN: usize = 128;
const SHADE: &str = "#dde8f6";

/// Shading of `g_tt < 0`, dashed `det = 0` and `g_tt = 0` loci, and cone crosses.
pub fn draw_field(plot: &mut Plot, m: &MetricSpec, window: &Window, rows: &[FieldSampleRow], n: usize) -> Result<()> {
    let cells = n - 1;
    let dt = (window.t_max - window.t_min) / cells as f64;
    let dx = (window.x_max - window.x_min) / cells as f64;
    for i in 0..cells {
        let t0 = window.t_min + i as f64 * dt;
        let mut run: Option<usize> = None;
        for j in 0..=cells {
            let inside = j < cells && {
                let c = ChartPoint::new(t0 + 0.5 * dt, window.x_min + (j as f64 + 0.5) * dx);
                m.sym(c)?.tt < 0.0
            };
            match (inside, run) {
                (true, None) => run = Some(j),
                (false, Some(j0)) => {
                    plot.shade(t0, t0 + dt, window.x_min + j0 as f64 * dx, window.x_min + j as f64 * dx, SHADE);
                    run = None;
                }
                _ => {}
            }
        }
    }
    let glyph = 0.4 * plot.cell_size_px(n);
    for r in rows {
        if let Some((a, b)) = r.slopes {
            plot.glyph(r.point, a.direction(), glyph, "#333333");
            plot.glyph(r.point, b.direction(), glyph, "#333333");
        }
    }
    let locus_n = n.max(LOCUS_GRID_MIN);
    let killing: Vec<Polyline> = zero_set(|p| Ok(m.sym(p)?.tt), window, locus_n)?;
    plot.locus(&killing, "#1f5fbf");
    let det = degeneracy_locus(m, window, locus_n)?;
    plot.locus(&det, "#c0392b");
    Ok(())
}

pub fn cmd_field(cfg: &RunConfig) -> Result<Artifacts> {
    let m = cfg.metric()?;
    let window = cfg.window_or(Window::square(1.0));
    let n = cfg.grid_or(41);
    let rows = field_rows(&m, &window, n, cfg.tol_deg)?;
    let mut art = Artifacts::default();
    art.files.push((cfg.out.clone(), field_csv(&rows)));
    if let Some(svg) = &cfg.svg {
        let mut plot = Plot::new(window);
        draw_field(&mut plot, &m, &window, &rows, n)?;
        art.files.push((Some(svg.clone()), plot.finish(&m.describe())));
    }
    art.notes.push(format!("{} samples of {}", rows.len(), m.describe()));
    Ok(art)
}

pub const GEODESIC_HEADER: [&str; 7] = ["lambda", "t", "x", "vt", "vx", "E", "norm2"];

pub fn geodesic_csv(trace: &GeodesicTrace) -> String {
    let mut csv = Csv::new(&GEODESIC_HEADER);
    for s in &trace.samples {
        csv.row(&[
            num(s.lambda),
            num(s.point.t),
            num(s.point.x),
            num(s.velocity[0]),
            num(s.velocity[1]),
            num(s.energy),
            num(s.norm2),
        ]);
    }
    csv.into_string()
}

#[derive(Serialize)]
struct GeodesicSideFile<'a> {
    status: GeodesicStatus,
    n_samples: usize,
    energy_drift: f64,
    norm2_drift: f64,
    seam_events: &'a [SeamEvent],
}

/// Plot window around a trace, padded and never thinner than one unit.
fn trace_window(trace: &GeodesicTrace) -> Result<Window> {
    let (mut t0, mut t1, mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in &trace.samples {
        t0 = t0.min(s.point.t);
        t1 = t1.max(s.point.t);
        x0 = x0.min(s.point.x);
        x1 = x1.max(s.point.x);
    }
    let widen = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        let half = (0.55 * (hi - lo)).max(0.5);
        (mid - half, mid + half)
    };
    let (t0, t1) = widen(t0, t1);
    let (x0, x1) = widen(x0, x1);
    Ok(Window::new(t0, t1, x0, x1)?)
}

/// The crosscap only makes sense on its square; other models get a tall strip.
fn default_geodesic_window(cfg: &RunConfig) -> Window {
    match cfg.model {
        Model::Crosscap => Window::square(std::f64::consts::SQRT_2),
        _ => Window {
            t_min: -20.0,
            t_max: 20.0,
            x_min: -3.0,
            x_max: 3.0,
        },
    }
}

pub fn cmd_geodesic(cfg: &RunConfig) -> Result<Artifacts> {
    let m = cfg.metric()?;
    let man = cfg.manifold();
    let init = cfg.init_vector();
    if init.vt == 0.0 && init.vx == 0.0 {
        bail!("initial velocity must be nonzero");
    }
    let window = cfg.window.unwrap_or_else(|| default_geodesic_window(cfg));
    let gcfg = GeodesicConfig {
        lambda_max: cfg.lambda_max,
        dlambda: cfg.dlambda,
        window,
        tol_deg: cfg.tol_deg,
        norm_guard: cfg.norm_guard,
    };
    let trace = integrate_geodesic_with(&m, &man, &init, &gcfg).context("integrating geodesic")?;
    let mut art = Artifacts::default();
    art.files.push((cfg.out.clone(), geodesic_csv(&trace)));
    let side = GeodesicSideFile {
        status: trace.status,
        n_samples: trace.samples.len(),
        energy_drift: trace.energy_drift(),
        norm2_drift: trace.norm2_drift(),
        seam_events: &trace.seam_events,
    };
    let seams_path = cfg
        .seams_out
        .clone()
        .or_else(|| cfg.out.as_ref().map(|p| p.with_extension("seams.json")));
    if let Some(p) = seams_path {
        art.files.push((Some(p), json(&side)?));
    }
    if let Some(svg) = &cfg.svg {
        let pw = match cfg.window {
            Some(w) => w,
            None => trace_window(&trace)?,
        };
        let n = 21;
        let mut plot = Plot::new(pw);
        let rows = field_rows(&m, &pw, n, cfg.tol_deg)?;
        draw_field(&mut plot, &m, &pw, &rows, n)?;
        let pts: Vec<ChartPoint> = trace.samples.iter().map(|s| s.point).collect();
        // split at seam jumps so the path does not cut across the chart
        let mut start = 0;
        for i in 1..pts.len() {
            if pts[i].dist(&pts[i - 1]) > 0.25 {
                plot.polyline(&pts[start..i], false, "#111111", 2.0, false);
                start = i;
            }
        }
        plot.polyline(&pts[start..], false, "#111111", 2.0, false);
        plot.dot(init.base, 3.0, "#111111");
        art.files.push((Some(svg.clone()), plot.finish(&format!("geodesic in {}", m.describe()))));
    }
    art.notes.push(format!(
        "status {:?} after {} samples, energy drift {:e}, norm drift {:e}, {} seam events",
        trace.status,
        trace.samples.len(),
        side.energy_drift,
        side.norm2_drift,
        trace.seam_events.len()
    ));
    Ok(art)
}

pub const RADICAL_HEADER: [&str; 9] = ["s", "t", "x", "rad_t", "rad_x", "tan_t", "tan_x", "alignment", "class"];

pub fn cmd_radical(cfg: &RunConfig) -> Result<Artifacts> {
    let m = cfg.metric()?;
    let window = cfg.window_or(Window::square(1.5));
    let locus = degeneracy_locus(&m, &window, cfg.grid_or(DEFAULT_GRID_N))?;
    let scan = radical_classification(&m, &locus, None, cfg.tol_deg, cfg.tol_tangent)?;
    let mut csv = Csv::new(&RADICAL_HEADER);
    for r in &scan.reports {
        csv.row(&[
            num(r.s),
            num(r.point.t),
            num(r.point.x),
            num(r.radical_dir.vt),
            num(r.radical_dir.vx),
            num(r.h_tangent_dir.vt),
            num(r.h_tangent_dir.vx),
            num(r.alignment),
            r.classification.name().to_string(),
        ]);
    }
    let mut art = Artifacts::default();
    art.files.push((cfg.out.clone(), csv.into_string()));
    if let Some(svg) = &cfg.svg {
        let n = 21;
        let mut plot = Plot::new(window);
        let rows = field_rows(&m, &window, n, cfg.tol_deg)?;
        draw_field(&mut plot, &m, &window, &rows, n)?;
        let step = (scan.reports.len() / 120).max(1);
        for r in scan.reports.iter().step_by(step) {
            plot.glyph(r.point, r.radical_dir.components(), 14.0, "#8e44ad");
        }
        for p in &scan.tangency_points {
            plot.dot(*p, 4.0, "#c0392b");
        }
        art.files.push((Some(svg.clone()), plot.finish(&format!("radical of {}", m.describe()))));
    }
    let pts: Vec<String> = scan.tangency_points.iter().map(|p| format!("({:.6}, {:.6})", p.t, p.x)).collect();
    art.notes.push(format!(
        "{} locus points, {} tangency points {}",
        scan.reports.len(),
        scan.tangency_points.len(),
        pts.join(" ")
    ));
    Ok(art)
}

pub fn cmd_trap(cfg: &RunConfig) -> Result<Artifacts> {
    if cfg.model != Model::Rotating || cfg.angle_rate != std::f64::consts::PI {
        bail!("trap runs on the default rotating model");
    }
    let rep = trapping_experiment(&TrappingSetup {
        k: cfg.stripe,
        n_curves: cfg.curves,
        lambda_max: cfg.lambda_max,
        mix: cfg.mix,
        kind: cfg.kind,
        seed: cfg.seed,
    })?;
    let mut art = Artifacts::default();
    art.notes.push(format!("{} of {} curves escaped stripe {}", rep.n_escaped, rep.n_curves, rep.k));
    art.files.push((cfg.out.clone(), json(&rep)?));
    Ok(art)
}

pub fn cmd_seam(cfg: &RunConfig) -> Result<Artifacts> {
    let m = cfg.metric()?;
    let man = cfg.manifold();
    let orders: Vec<u8> = match cfg.order {
        Some(o) => vec![o],
        None => vec![0, 1],
    };
    let mut reports = Vec::new();
    for o in orders {
        reports.extend(seam_compatibility(&man, &m, o, cfg.samples)?);
    }
    let mut art = Artifacts::default();
    for r in &reports {
        art.notes.push(format!("{} order {}: max mismatch {:e}", r.seam, r.order, r.max_abs_mismatch));
    }
    art.files.push((cfg.out.clone(), json(&reports)?));
    Ok(art)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(Artifacts, VerifyReport)> {
    let rep = run_suite(cfg);
    let mut art = Artifacts::default();
    art.files.push((cfg.out.clone(), json(&rep)?));
    art.notes.push(format!(
        "{} checks, {} required failures, {} report-only findings",
        rep.checks.len(),
        rep.required_failures,
        rep.report_only_failures
    ));
    if let Some(e) = failure_summary(&rep) {
        art.notes.push(e.to_string());
        art.exit_code = 1;
    }
    Ok((art, rep))
}
