//! Unconstrained minimization: BFGS with a backtracking line search, and a
//! Nelder–Mead fallback for when the quasi-Newton iteration stalls.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Stop when `max|∇f| ≤ gtol · (1 + |f|)`.
    pub gtol: f64,
    /// Nelder–Mead stops when the simplex diameter falls below this.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { gtol: 1e-9, xtol: 1e-10, max_iter: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Central-difference gradient.
pub fn numeric_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 6e-6 * x[i].abs().max(1.0);
            xp[i] = x[i] + h;
            let up = f(&xp);
            xp[i] = x[i] - h;
            let down = f(&xp);
            xp[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimize `f`, using `grad` when supplied and central differences otherwise.
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    grad: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    x0: &[f64],
    opts: Options,
) -> Result<Minimum> {
    let g = |x: &[f64]| match grad {
        Some(g) => g(x),
        None => numeric_gradient(f, x),
    };
    // Numeric gradients carry O(h²) truncation noise; accept a looser floor for them.
    let floor = if grad.is_some() { opts.gtol } else { opts.gtol.max(1e-7) };
    let mut best = bfgs(f, &g, x0, opts)?;
    if best.grad_norm <= floor * (1.0 + best.f.abs()) {
        return Ok(best);
    }
    let nm = nelder_mead(f, &best.x, opts);
    if nm.f <= best.f {
        let refined = bfgs(f, &g, &nm.x, opts)?;
        best = if refined.f <= nm.f { refined } else { Minimum { grad_norm: max_abs(&g(&nm.x)), ..nm } };
    }
    if best.grad_norm <= 1e3 * floor * (1.0 + best.f.abs()) {
        Ok(best)
    } else {
        Err(Error::NoConvergence { iterations: best.iterations, last: best.x })
    }
}

fn bfgs(
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    opts: Options,
) -> Result<Minimum> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::InvalidParameter("objective is not finite at the starting point".into()));
    }
    let mut gx = g(&x);
    let mut h = identity(n);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if max_abs(&gx) <= opts.gtol * (1.0 + fx.abs()) {
            break;
        }
        iterations += 1;
        let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * gx[j]).sum::<f64>()).collect();
        let mut slope: f64 = d.iter().zip(&gx).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            h = identity(n);
            d = gx.iter().map(|v| -v).collect();
            slope = -gx.iter().map(|v| v * v).sum::<f64>();
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let fnew = f(&xn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gn = g(&xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 * norm(&s) * norm(&y) {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let progress = (fx - fnew).abs();
        x = xn;
        fx = fnew;
        gx = gn;
        if progress == 0.0 && max_abs(&s) == 0.0 {
            break;
        }
    }
    Ok(Minimum { grad_norm: max_abs(&gx), x, f: fx, iterations })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Nelder–Mead with dimension-adaptive coefficients.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: Options) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), eval(x0))];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += if x[i] == 0.0 { 0.05 } else { 0.05 * x[i].abs() };
        let fx = eval(&x);
        simplex.push((x, fx));
    }
    let mut iterations = 0;
    while iterations < 50 * opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| max_abs(&x.iter().zip(&simplex[0].0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        if diameter <= opts.xtol * (1.0 + max_abs(&simplex[0].0)) {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (worst.0[j] - centroid[j])).collect() };
        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = (0..n).map(|j| best[j] + sigma * (v.0[j] - best[j])).collect();
            let fx = eval(&x);
            *v = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Minimum { x, f: fx, iterations, grad_norm: f64::NAN }
}
