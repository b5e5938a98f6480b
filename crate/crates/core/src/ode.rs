//! Classical fixed-step fourth-order Runge–Kutta.

use crate::error::Result;

/// One RK4 step of `y' = f(s, y)` with step `h`.
pub fn rk4_step<const N: usize, F>(f: &F, s: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let shift = |y: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(s, y)?;
    let k2 = f(s + 0.5 * h, &shift(y, &k1, 0.5 * h))?;
    let k3 = f(s + 0.5 * h, &shift(y, &k2, 0.5 * h))?;
    let k4 = f(s + h, &shift(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrates from `s0` to `s1` in `n` equal steps and returns every state,
/// including the initial one.
pub fn rk4_path<const N: usize, F>(f: &F, s0: f64, s1: f64, y0: [f64; N], n: usize) -> Result<Vec<(f64, [f64; N])>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let h = (s1 - s0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push((s0, y));
    for i in 0..n {
        let s = s0 + h * i as f64;
        y = rk4_step(f, s, &y, h)?;
        out.push((s0 + h * (i + 1) as f64, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let path = rk4_path(&|_, y: &[f64; 1]| Ok([y[0]]), 0.0, 1.0, [1.0], 100).unwrap();
        let (s, y) = path.last().unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_fourth_order() {
        let f = |_: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let err = |n| {
            let path = rk4_path(&f, 0.0, 1.0, [0.0, 1.0], n).unwrap();
            (path[n].1[0] - 1f64.sin()).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }
}
