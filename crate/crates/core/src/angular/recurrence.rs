//! Two-sided evaluation of the null vector of a symmetric three-term
//! recurrence.
//!
//! Solves `off[i] x[i+1] + off[i-1] x[i-1] = diag[i] x[i]` with the boundary
//! terms absent. The forward sweep runs from the bottom until the first local
//! maximum of `|x|`; the backward sweep runs from the top down to that index.
//! Both sweeps only ever travel from a classically forbidden region towards the
//! allowed one, which is the stable direction.

/// Which end of the vector fixes the overall sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Anchor {
    /// `x[n-1]` carries the given sign.
    Top(f64),
    /// `x[0]` carries the given sign.
    Bottom(f64),
}

const RESCALE_AT: f64 = 1e200;

fn rescale(values: &mut [f64]) {
    for v in values.iter_mut() {
        *v /= RESCALE_AT;
    }
}

/// Returns the unit-norm solution. `off.len()` must be `diag.len() - 1` and
/// every `off[i]` must be non-zero.
pub(crate) fn null_vector(off: &[f64], diag: &[f64], anchor: Anchor) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n);
    if n == 1 {
        let s = match anchor {
            Anchor::Top(s) | Anchor::Bottom(s) => s.signum(),
        };
        return vec![s];
    }

    // forward sweep, f[0] = 1
    let mut f = Vec::with_capacity(n);
    f.push(1.0f64);
    let mut k = n - 1;
    for i in 0..n - 1 {
        let prev = if i == 0 { 0.0 } else { off[i - 1] * f[i - 1] };
        let next = (diag[i] * f[i] - prev) / off[i];
        if next.abs() <= f[i].abs() {
            k = i;
            break;
        }
        f.push(next);
        if next.abs() > RESCALE_AT {
            rescale(&mut f);
        }
    }

    // backward sweep, g[n-1] = 1, stored reversed
    let mut g_rev = Vec::with_capacity(n - k);
    g_rev.push(1.0f64);
    let mut i = n - 1;
    while i > k {
        let cur = g_rev[g_rev.len() - 1];
        let above = if i == n - 1 { 0.0 } else { off[i] * g_rev[g_rev.len() - 2] };
        let next = (diag[i] * cur - above) / off[i - 1];
        g_rev.push(next);
        if next.abs() > RESCALE_AT {
            rescale(&mut g_rev);
        }
        i -= 1;
    }
    let mut g: Vec<f64> = g_rev.into_iter().rev().collect();
    // g[0] corresponds to index k

    let mut x = vec![0.0; n];
    match anchor {
        Anchor::Top(_) => {
            let scale = g[0] / f[k];
            for (xi, fi) in x.iter_mut().zip(&f[..k]) {
                *xi = fi * scale;
            }
            x[k..].copy_from_slice(&g);
        }
        Anchor::Bottom(_) => {
            let scale = f[k] / g[0];
            for gi in g.iter_mut() {
                *gi *= scale;
            }
            x[..k].copy_from_slice(&f[..k]);
            x[k..].copy_from_slice(&g);
        }
    }

    let peak = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norm = peak * x.iter().map(|v| (v / peak).powi(2)).sum::<f64>().sqrt();
    let sign = match anchor {
        Anchor::Top(s) | Anchor::Bottom(s) => s.signum(),
    };
    for v in x.iter_mut() {
        *v *= sign / norm;
    }
    x
}
