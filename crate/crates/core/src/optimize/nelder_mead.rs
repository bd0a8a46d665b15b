//! Bound-clamped Nelder–Mead with dimension-adaptive coefficients.

use alloc::{vec, vec::Vec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    /// Initial simplex edge, as a fraction of each coordinate's bound width.
    pub initial_step: f64,
    /// Converged when the simplex objective spread drops below this.
    pub f_tol: f64,
    /// Converged when every simplex edge is below this fraction of the bound
    /// width.
    pub x_tol: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            f_tol: 1e-12,
            x_tol: 1e-9,
        }
    }
}

/// Best point seen, with evaluation bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// (evaluation index, best value) at every strict improvement.
    pub improvements: Vec<(usize, f64)>,
    pub reached_target: bool,
}

struct Tracker<'a, F> {
    f: F,
    bounds: &'a [(f64, f64)],
    used: usize,
    budget: usize,
    target: f64,
    best: Minimum,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<'_, F> {
    fn done(&self) -> bool {
        self.used >= self.budget || self.best.reached_target
    }

    fn eval(&mut self, x: &mut [f64]) -> f64 {
        if self.done() {
            return f64::INFINITY;
        }
        for (v, &(lo, hi)) in x.iter_mut().zip(self.bounds) {
            *v = v.clamp(lo, hi);
        }
        let raw = (self.f)(x);
        let value = if raw.is_nan() { f64::INFINITY } else { raw };
        self.used += 1;
        if value < self.best.value {
            self.best.value = value;
            self.best.x.clear();
            self.best.x.extend_from_slice(x);
            self.best.improvements.push((self.used, value));
            if value <= self.target {
                self.best.reached_target = true;
            }
        }
        value
    }
}

/// Minimize `f` from `x0` within `bounds`, spending at most `budget`
/// evaluations. Whenever the simplex collapses it is rebuilt around the best
/// point, so the whole budget is used unless `target` is reached first.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    budget: usize,
    target: f64,
    cfg: &NelderMeadConfig,
) -> Minimum {
    assert_eq!(x0.len(), bounds.len());
    let n = x0.len();
    let mut tr = Tracker {
        f,
        bounds,
        used: 0,
        budget,
        target,
        best: Minimum {
            x: x0.to_vec(),
            value: f64::INFINITY,
            evaluations: 0,
            improvements: Vec::new(),
            reached_target: false,
        },
    };
    let widths: Vec<f64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();

    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut start = x0.to_vec();
    let mut step = cfg.initial_step;
    while !tr.done() {
        // Build the simplex; edges point inward when a vertex sits on a bound.
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        let mut p = start.clone();
        vals.push(tr.eval(&mut p));
        pts.push(p);
        for i in 0..n {
            if tr.done() {
                break;
            }
            let mut p = pts[0].clone();
            let h = step * widths[i];
            p[i] = if p[i] + h <= bounds[i].1 {
                p[i] + h
            } else {
                p[i] - h
            };
            vals.push(tr.eval(&mut p));
            pts.push(p);
        }
        if tr.done() {
            break;
        }

        let mut order: Vec<usize> = (0..=n).collect();
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];
        loop {
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
            let (ib, iw, is) = (order[0], order[n], order[n - 1]);
            let spread = vals[iw] - vals[ib];
            let small = (0..n).all(|d| {
                pts.iter()
                    .all(|p| (p[d] - pts[ib][d]).abs() <= cfg.x_tol * widths[d].max(1e-300))
            });
            if tr.done() || (spread.is_finite() && spread <= cfg.f_tol) || small {
                break;
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &k in &order[..n] {
                for (c, v) in centroid.iter_mut().zip(&pts[k]) {
                    *c += v / nf;
                }
            }
            let along = |coef: f64, out: &mut [f64]| {
                for d in 0..n {
                    out[d] = centroid[d] + coef * (pts[iw][d] - centroid[d]);
                }
            };

            along(-alpha, &mut trial);
            let fr = tr.eval(&mut trial);
            if fr < vals[ib] {
                along(-alpha * beta, &mut trial2);
                let fe = tr.eval(&mut trial2);
                if fe < fr {
                    pts[iw].copy_from_slice(&trial2);
                    vals[iw] = fe;
                } else {
                    pts[iw].copy_from_slice(&trial);
                    vals[iw] = fr;
                }
                continue;
            }
            if fr < vals[is] {
                pts[iw].copy_from_slice(&trial);
                vals[iw] = fr;
                continue;
            }
            let (coef, bar) = if fr < vals[iw] {
                (-alpha * gamma, fr)
            } else {
                (gamma, vals[iw])
            };
            along(coef, &mut trial2);
            let fc = tr.eval(&mut trial2);
            if fc <= bar {
                pts[iw].copy_from_slice(&trial2);
                vals[iw] = fc;
                continue;
            }
            for &k in &order[1..] {
                if tr.done() {
                    break;
                }
                for d in 0..n {
                    pts[k][d] = pts[ib][d] + delta * (pts[k][d] - pts[ib][d]);
                }
                let mut p = core::mem::take(&mut pts[k]);
                vals[k] = tr.eval(&mut p);
                pts[k] = p;
            }
        }
        start.clone_from(&tr.best.x);
        step = (step * 0.5).max(cfg.initial_step * 1e-3);
    }
    tr.best.evaluations = tr.used;
    tr.best
}
