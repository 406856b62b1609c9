//! Classical optimizers driving the variational loops.
//!
//! One "iteration" everywhere means one full cost+gradient evaluation
//! cycle, including line-search trials, so iteration counts are comparable
//! across algorithms and variants.

/// Shared stopping thresholds: absolute cost change and gradient norm.
pub const FTOL_ABS: f64 = 1e-9;
pub const GTOL: f64 = 1e-7;

/// Result of an optimization run.
#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    /// Total cost+gradient evaluation cycles.
    pub evaluations: usize,
    pub converged: bool,
    /// `(evaluation index, cost)` for every evaluation, in order.
    pub trace: Vec<(usize, f64)>,
}

pub struct LbfgsOptions {
    pub max_iters: usize,
    pub memory: usize,
    /// Box bounds applied to every coordinate, or unbounded when `None`.
    pub bounds: Option<(f64, f64)>,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            memory: 10,
            bounds: None,
        }
    }
}

/// Limited-memory quasi-Newton minimizer with a strong-Wolfe line search.
/// With box bounds the line search falls back to projected backtracking.
pub fn lbfgs<F>(mut eval: F, x0: Vec<f64>, opts: &LbfgsOptions) -> OptimOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut trace = Vec::new();
    let mut call = |x: &[f64], g: &mut [f64], evals: &mut usize, trace: &mut Vec<(usize, f64)>| {
        let f = eval(x, g);
        *evals += 1;
        trace.push((*evals, f));
        f
    };
    let clamp = |x: &mut Vec<f64>| {
        if let Some((lo, hi)) = opts.bounds {
            for v in x.iter_mut() {
                *v = v.clamp(lo, hi);
            }
        }
    };

    let mut x = x0;
    clamp(&mut x);
    let mut g = vec![0.0; n];
    let mut f = call(&x, &mut g, &mut evaluations, &mut trace);
    if !f.is_finite() {
        return OptimOutcome { x, cost: f, evaluations, converged: false, trace };
    }

    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut converged = false;

    for _iter in 0..opts.max_iters {
        if norm(&g) < GTOL {
            converged = true;
            break;
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let k = s_hist.len();
        let mut alphas = vec![0.0; k];
        for i in (0..k).rev() {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            let a = rho * dot(&s_hist[i], &d);
            alphas[i] = a;
            axpy(-a, &y_hist[i], &mut d);
        }
        if k > 0 {
            let gamma = dot(&s_hist[k - 1], &y_hist[k - 1]) / dot(&y_hist[k - 1], &y_hist[k - 1]);
            for v in d.iter_mut() {
                *v *= gamma;
            }
        }
        for i in 0..k {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            let b = rho * dot(&y_hist[i], &d);
            axpy(alphas[i] - b, &s_hist[i], &mut d);
        }
        let mut dg = dot(&d, &g);
        if !dg.is_finite() || dg >= 0.0 {
            // not a descent direction; restart from steepest descent
            d = g.iter().map(|v| -v).collect();
            dg = -dot(&g, &g);
            s_hist.clear();
            y_hist.clear();
        }

        let step = if opts.bounds.is_some() {
            projected_backtracking(
                &mut call, &x, f, &g, &d, dg, opts.bounds,
                &mut evaluations, &mut trace,
            )
        } else {
            strong_wolfe(&mut call, &x, f, &g, &d, dg, &mut evaluations, &mut trace)
        };

        match step {
            Some((x_new, f_new, g_new)) => {
                let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                if dot(&s, &y) > 1e-12 * norm(&s) * norm(&y) {
                    s_hist.push(s);
                    y_hist.push(y);
                    if s_hist.len() > opts.memory {
                        s_hist.remove(0);
                        y_hist.remove(0);
                    }
                }
                let delta = (f - f_new).abs();
                x = x_new;
                f = f_new;
                g = g_new;
                if !f.is_finite() {
                    break;
                }
                if delta < FTOL_ABS {
                    converged = true;
                    break;
                }
            }
            None => {
                // no further progress possible along any tried step
                converged = norm(&g) < 1e-4;
                break;
            }
        }
    }
    if norm(&g) < GTOL {
        converged = true;
    }
    OptimOutcome { x, cost: f, evaluations, converged, trace }
}

type StepResult = Option<(Vec<f64>, f64, Vec<f64>)>;

/// Strong Wolfe line search (bracket then zoom).
#[allow(clippy::too_many_arguments)]
fn strong_wolfe<F>(
    call: &mut F,
    x: &[f64],
    f0: f64,
    _g0: &[f64],
    d: &[f64],
    dg0: f64,
    evaluations: &mut usize,
    trace: &mut Vec<(usize, f64)>,
) -> StepResult
where
    F: FnMut(&[f64], &mut [f64], &mut usize, &mut Vec<(usize, f64)>) -> f64,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let n = x.len();
    let mut probe = |alpha: f64, evals: &mut usize, tr: &mut Vec<(usize, f64)>| {
        let xa: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let mut ga = vec![0.0; n];
        let fa = call(&xa, &mut ga, evals, tr);
        let dga = dot(&ga, d);
        (xa, fa, ga, dga)
    };

    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut dg_prev = dg0;
    let mut alpha = 1.0;
    let mut best: StepResult = None;

    for i in 0..20 {
        let (xa, fa, ga, dga) = probe(alpha, evaluations, trace);
        if fa.is_finite() && fa < f0 {
            if best.as_ref().map_or(true, |(_, bf, _)| fa < *bf) {
                best = Some((xa.clone(), fa, ga.clone()));
            }
        }
        if fa > f0 + C1 * alpha * dg0 || (i > 0 && fa >= f_prev) {
            return zoom(
                &mut probe, f0, dg0, alpha_prev, f_prev, dg_prev, alpha, evaluations, trace,
            )
            .or(best);
        }
        if dga.abs() <= -C2 * dg0 {
            return Some((xa, fa, ga));
        }
        if dga >= 0.0 {
            return zoom(
                &mut probe, f0, dg0, alpha, fa, dga, alpha_prev, evaluations, trace,
            )
            .or(best);
        }
        alpha_prev = alpha;
        f_prev = fa;
        dg_prev = dga;
        alpha *= 2.0;
    }
    best
}

/// Zoom phase of the strong Wolfe search; `lo` always satisfies the
/// sufficient-decrease condition.
#[allow(clippy::too_many_arguments)]
fn zoom<P>(
    probe: &mut P,
    f0: f64,
    dg0: f64,
    mut alpha_lo: f64,
    mut f_lo: f64,
    mut dg_lo: f64,
    mut alpha_hi: f64,
    evaluations: &mut usize,
    trace: &mut Vec<(usize, f64)>,
) -> StepResult
where
    P: FnMut(f64, &mut usize, &mut Vec<(usize, f64)>) -> (Vec<f64>, f64, Vec<f64>, f64),
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut best: StepResult = None;
    for _ in 0..30 {
        if (alpha_hi - alpha_lo).abs() < 1e-14 * alpha_lo.abs().max(1.0) {
            break;
        }
        // quadratic interpolation with bisection fallback
        let mut alpha = alpha_lo - 0.5 * dg_lo * (alpha_hi - alpha_lo).powi(2)
            / ((f_lo - f0 - dg_lo * (alpha_hi - alpha_lo)).max(1e-300));
        let (lo, hi) = if alpha_lo < alpha_hi {
            (alpha_lo, alpha_hi)
        } else {
            (alpha_hi, alpha_lo)
        };
        if !alpha.is_finite() || alpha <= lo || alpha >= hi {
            alpha = 0.5 * (alpha_lo + alpha_hi);
        }
        let (xa, fa, ga, dga) = probe(alpha, evaluations, trace);
        if fa.is_finite() && fa < f0 && best.as_ref().map_or(true, |(_, bf, _)| fa < *bf) {
            best = Some((xa.clone(), fa, ga.clone()));
        }
        if fa > f0 + C1 * alpha * dg0 || fa >= f_lo {
            alpha_hi = alpha;
        } else {
            if dga.abs() <= -C2 * dg0 {
                return Some((xa, fa, ga));
            }
            if dga * (alpha_hi - alpha_lo) >= 0.0 {
                alpha_hi = alpha_lo;
            }
            alpha_lo = alpha;
            f_lo = fa;
            dg_lo = dga;
        }
    }
    best
}

/// Armijo backtracking along the projection of `x + alpha d` into the box.
#[allow(clippy::too_many_arguments)]
fn projected_backtracking<F>(
    call: &mut F,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    d: &[f64],
    _dg0: f64,
    bounds: Option<(f64, f64)>,
    evaluations: &mut usize,
    trace: &mut Vec<(usize, f64)>,
) -> StepResult
where
    F: FnMut(&[f64], &mut [f64], &mut usize, &mut Vec<(usize, f64)>) -> f64,
{
    let n = x.len();
    let (lo, hi) = bounds.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut alpha = 1.0;
    for _ in 0..30 {
        let xa: Vec<f64> = x
            .iter()
            .zip(d)
            .map(|(xi, di)| (xi + alpha * di).clamp(lo, hi))
            .collect();
        let decrease: f64 = xa.iter().zip(x).zip(g0).map(|((a, b), g)| (a - b) * g).sum();
        let mut ga = vec![0.0; n];
        let fa = call(&xa, &mut ga, evaluations, trace);
        if fa.is_finite() && fa <= f0 + 1e-4 * decrease && fa < f0 {
            return Some((xa, fa, ga));
        }
        alpha *= 0.5;
    }
    None
}

pub struct AdamOptions {
    pub learning_rate: f64,
    pub iterations: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamOptions {
    fn default() -> Self {
        Self {
            learning_rate: 0.02,
            iterations: 200,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam with a fixed iteration budget; returns the best iterate seen.
pub fn adam<F>(mut eval: F, x0: Vec<f64>, opts: &AdamOptions) -> OptimOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut best_x = x.clone();
    let mut best_f = f64::INFINITY;
    let mut prev_f = f64::INFINITY;
    let mut trace = Vec::with_capacity(opts.iterations);
    let mut converged = false;
    for step in 1..=opts.iterations {
        let f = eval(&x, &mut g);
        trace.push((step, f));
        if f.is_finite() && f < best_f {
            best_f = f;
            best_x = x.clone();
        }
        if (prev_f - f).abs() < FTOL_ABS {
            converged = true;
            break;
        }
        prev_f = f;
        let b1t = 1.0 - opts.beta1.powi(step as i32);
        let b2t = 1.0 - opts.beta2.powi(step as i32);
        for i in 0..n {
            m[i] = opts.beta1 * m[i] + (1.0 - opts.beta1) * g[i];
            v[i] = opts.beta2 * v[i] + (1.0 - opts.beta2) * g[i] * g[i];
            let mhat = m[i] / b1t;
            let vhat = v[i] / b2t;
            x[i] -= opts.learning_rate * mhat / (vhat.sqrt() + opts.epsilon);
        }
    }
    let evaluations = trace.len();
    OptimOutcome {
        x: best_x,
        cost: best_f,
        evaluations,
        converged,
        trace,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(center: Vec<f64>) -> impl FnMut(&[f64], &mut [f64]) -> f64 {
        move |x, g| {
            let mut f = 0.0;
            for i in 0..x.len() {
                let d = x[i] - center[i];
                f += (i + 1) as f64 * d * d;
                g[i] = 2.0 * (i + 1) as f64 * d;
            }
            f
        }
    }

    #[test]
    fn lbfgs_minimizes_quadratic() {
        let out = lbfgs(
            quadratic(vec![1.0, -2.0, 3.0]),
            vec![0.0; 3],
            &LbfgsOptions::default(),
        );
        assert!(out.converged);
        assert!(out.cost < 1e-12, "cost {}", out.cost);
        assert!((out.x[0] - 1.0).abs() < 1e-6);
        assert!((out.x[2] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn lbfgs_minimizes_rosenbrock() {
        let rosen = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (1.0, 100.0);
            let f = (a - x[0]).powi(2) + b * (x[1] - x[0] * x[0]).powi(2);
            g[0] = -2.0 * (a - x[0]) - 4.0 * b * x[0] * (x[1] - x[0] * x[0]);
            g[1] = 2.0 * b * (x[1] - x[0] * x[0]);
            f
        };
        let out = lbfgs(rosen, vec![-1.2, 1.0], &LbfgsOptions { max_iters: 500, ..Default::default() });
        assert!(out.cost < 1e-10, "cost {}", out.cost);
        assert!((out.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn lbfgs_respects_bounds() {
        let out = lbfgs(
            quadratic(vec![5.0]),
            vec![0.0],
            &LbfgsOptions {
                bounds: Some((-1.0, 1.0)),
                ..Default::default()
            },
        );
        assert!(out.x[0] <= 1.0 + 1e-12);
        assert!((out.x[0] - 1.0).abs() < 1e-9, "x {}", out.x[0]);
    }

    #[test]
    fn adam_reaches_quadratic_minimum() {
        let out = adam(
            quadratic(vec![0.3, -0.7]),
            vec![0.0; 2],
            &AdamOptions {
                learning_rate: 0.05,
                iterations: 2000,
                ..Default::default()
            },
        );
        assert!(out.cost < 1e-6, "cost {}", out.cost);
    }

    #[test]
    fn evaluation_counts_and_trace_align() {
        let out = lbfgs(quadratic(vec![2.0]), vec![0.0], &LbfgsOptions::default());
        assert_eq!(out.evaluations, out.trace.len());
        // running best is non-increasing
        let mut best = f64::INFINITY;
        for &(_, f) in &out.trace {
            let rb = best.min(f);
            assert!(rb <= best);
            best = rb;
        }
    }
}
