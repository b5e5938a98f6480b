//! Marching-squares extraction of the zero set of a scalar function.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<ChartPoint>,
    /// The last point connects back to the first.
    pub closed: bool,
}

impl Polyline {
    /// Consecutive vertex pairs, including the closing pair for closed polylines.
    pub fn segments(&self) -> impl Iterator<Item = (ChartPoint, ChartPoint)> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Cumulative arclength at each vertex.
    pub fn arclength(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                acc += p.dist(&self.points[i - 1]);
            }
            out.push(acc);
        }
        out
    }
}

/// Bisection width, in the edge's own coordinate, for crossing refinement.
pub const EDGE_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    // varying x between nodes (i, j) and (i, j + 1)
    H(usize, usize),
    // varying t between nodes (i, j) and (i + 1, j)
    V(usize, usize),
}

/// Extracts `{f = 0}` on a `grid_n × grid_n` node grid over `window`.
///
/// Crossings are refined by bisection along grid edges; saddle cells are
/// resolved with the cell-centre average. Polylines are returned in order of
/// their first grid edge, open chains before closed loops.
pub fn zero_set<F>(f: F, window: &Window, grid_n: usize) -> Result<Vec<Polyline>>
where
    F: Fn(ChartPoint) -> Result<f64> + Sync,
{
    if grid_n < 2 {
        return Err(Error::InvalidArgument("grid_n must be at least 2".into()));
    }
    let n = grid_n;
    let node = |i: usize, j: usize| {
        let a = i as f64 / (n - 1) as f64;
        let b = j as f64 / (n - 1) as f64;
        ChartPoint::new(
            window.t_min + (window.t_max - window.t_min) * a,
            window.x_min + (window.x_max - window.x_min) * b,
        )
    };
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| f(node(k / n, k % n)))
        .collect::<Result<_>>()?;
    let val = |i: usize, j: usize| values[i * n + j];
    let pos = |v: f64| v >= 0.0;

    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n && pos(val(i, j)) != pos(val(i, j + 1)) {
                edges.push(Edge::H(i, j));
            }
            if i + 1 < n && pos(val(i, j)) != pos(val(i + 1, j)) {
                edges.push(Edge::V(i, j));
            }
        }
    }
    let roots: Vec<ChartPoint> = edges
        .par_iter()
        .map(|e| {
            let (a, b) = match *e {
                Edge::H(i, j) => ((i, j), (i, j + 1)),
                Edge::V(i, j) => ((i, j), (i + 1, j)),
            };
            refine(&f, node(a.0, a.1), val(a.0, a.1), node(b.0, b.1))
        })
        .collect::<Result<_>>()?;
    let index: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    let mut link = |a: Edge, b: Edge| {
        let (ia, ib) = (index[&a], index[&b]);
        adj[ia].push(ib);
        adj[ib].push(ia);
    };
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let s00 = pos(val(i, j));
            let s01 = pos(val(i, j + 1));
            let s10 = pos(val(i + 1, j));
            let s11 = pos(val(i + 1, j + 1));
            let bottom = Edge::H(i, j);
            let top = Edge::H(i + 1, j);
            let left = Edge::V(i, j);
            let right = Edge::V(i, j + 1);
            let crossed: Vec<Edge> = [(bottom, s00 != s01), (right, s01 != s11), (top, s10 != s11), (left, s00 != s10)]
                .into_iter()
                .filter_map(|(e, c)| c.then_some(e))
                .collect();
            match crossed.len() {
                0 => {}
                2 => link(crossed[0], crossed[1]),
                4 => {
                    let centre = 0.25 * (val(i, j) + val(i, j + 1) + val(i + 1, j) + val(i + 1, j + 1));
                    if pos(centre) == s00 {
                        // corners 00 and 11 are joined through the centre
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(bottom, left);
                        link(top, right);
                    }
                }
                _ => unreachable!("a cell has an even number of sign changes"),
            }
        }
    }

    let mut visited = vec![false; edges.len()];
    let mut out = Vec::new();
    let walk = |start: usize, visited: &mut Vec<bool>| {
        let mut chain = vec![start];
        visited[start] = true;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&k| !visited[k]) {
            visited[next] = true;
            chain.push(next);
            cur = next;
        }
        let closed = chain.len() > 2 && adj[cur].contains(&start);
        (chain, closed)
    };
    for pass in 0..2 {
        for k in 0..edges.len() {
            if visited[k] {
                continue;
            }
            // open chains start at their endpoints; whatever is left is a loop
            if pass == 0 && adj[k].len() != 1 && !adj[k].is_empty() {
                continue;
            }
            let (chain, closed) = walk(k, &mut visited);
            let mut points: Vec<ChartPoint> = Vec::with_capacity(chain.len());
            for idx in chain {
                let p = roots[idx];
                if points.last() != Some(&p) {
                    points.push(p);
                }
            }
            if closed && points.len() > 1 && points.first() == points.last() {
                points.pop();
            }
            out.push(Polyline { points, closed });
        }
    }
    Ok(out)
}

fn refine<F>(f: &F, a: ChartPoint, fa: f64, b: ChartPoint) -> Result<ChartPoint>
where
    F: Fn(ChartPoint) -> Result<f64>,
{
    let lerp = |u: f64| ChartPoint::new(a.t + (b.t - a.t) * u, a.x + (b.x - a.x) * u);
    let len = a.dist(&b);
    let side_a = fa >= 0.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while (hi - lo) * len > EDGE_ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(lerp(mid))? >= 0.0) == side_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lerp(0.5 * (lo + hi)))
}
