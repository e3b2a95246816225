//! BFGS minimization with central-difference gradients.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions {
    pub max_iterations: usize,
    /// Stop when the max-norm of the gradient falls below this.
    pub gradient_tolerance: f64,
    /// Stop when an accepted step changes f by less than this, relative.
    pub relative_tolerance: f64,
    /// Finite difference step, relative to max(1, |x_i|).
    pub difference_step: f64,
    /// Largest move allowed in any coordinate per iteration.
    pub max_step: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            relative_tolerance: 1e-10,
            difference_step: 1e-6,
            max_step: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel_step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            let g = (up - down) / (2.0 * h);
            if g.is_finite() {
                g
            } else {
                0.0
            }
        })
        .collect()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { scale } else { 0.0 }).collect())
        .collect()
}

/// Minimizes `f`. Non-finite values of `f` are treated as +inf by the line
/// search. A failed line search from a fresh Hessian ends the run as
/// converged, since no descent is available at working precision.
pub fn minimize_bfgs(f: impl Fn(&[f64]) -> f64, x0: &[f64], options: &OptimOptions) -> OptimResult {
    let f = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if n == 0 {
        return OptimResult {
            x,
            value: fx,
            gradient_norm: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut g = gradient(&f, &x, options.difference_step);
    let mut h = identity(n, 1.0);
    let mut fresh = true;

    for iteration in 0..options.max_iterations {
        let gnorm = max_norm(&g);
        if gnorm < options.gradient_tolerance {
            return OptimResult {
                x,
                value: fx,
                gradient_norm: gnorm,
                iterations: iteration,
                converged: true,
            };
        }
        let mut d: Vec<f64> = h.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            h = identity(n, 1.0);
            fresh = true;
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let longest = max_norm(&d);
        let mut alpha = if longest > options.max_step { options.max_step / longest } else { 1.0 };

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let ft = f(&trial);
            if ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if fresh {
                return OptimResult {
                    x,
                    value: fx,
                    gradient_norm: gnorm,
                    iterations: iteration,
                    converged: true,
                };
            }
            h = identity(n, 1.0);
            fresh = true;
            continue;
        };

        let g_new = gradient(&f, &x_new, options.difference_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let change = (fx - f_new).abs();
        let scale = fx.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        if change <= options.relative_tolerance * scale {
            return OptimResult {
                x,
                value: fx,
                gradient_norm: max_norm(&g),
                iterations: iteration + 1,
                converged: true,
            };
        }

        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if fresh {
                h = identity(n, sy / dot(&y, &y));
            }
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            let rho = 1.0 / sy;
            let hy: Vec<f64> = h.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
    }
    OptimResult {
        gradient_norm: max_norm(&g),
        x,
        value: fx,
        iterations: options.max_iterations,
        converged: false,
    }
}
