use crate::error::MlError;

pub const LAMBDA_RANGE: (f64, f64) = (-5.0, 5.0);

/// Yeo-Johnson power transform. Written with `ln_1p`/`exp_m1` so it stays
/// accurate (and continuous) as `lambda` approaches 0 or 2.
pub fn yeo_johnson(x: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        let l = x.ln_1p();
        if lambda == 0.0 {
            l
        } else {
            (lambda * l).exp_m1() / lambda
        }
    } else {
        let l = (-x).ln_1p();
        let m = 2.0 - lambda;
        if m == 0.0 {
            -l
        } else {
            -(m * l).exp_m1() / m
        }
    }
}

/// Inverse of [`yeo_johnson`] for values inside the transform's range.
/// Returns NaN when `y` cannot be produced by the given `lambda`.
pub fn yeo_johnson_inverse(y: f64, lambda: f64) -> f64 {
    if y >= 0.0 {
        if lambda == 0.0 {
            y.exp_m1()
        } else {
            ((lambda * y).ln_1p() / lambda).exp_m1()
        }
    } else {
        let m = 2.0 - lambda;
        if m == 0.0 {
            -(-y).exp_m1()
        } else {
            -((-m * y).ln_1p() / m).exp_m1()
        }
    }
}

/// Profile log-likelihood of `lambda` (additive constants dropped).
/// `jacobian` is `sum(sign(x) * ln(|x| + 1))`.
fn log_likelihood(values: &[f64], jacobian: f64, lambda: f64) -> f64 {
    let n = values.len() as f64;
    let t: Vec<f64> = values.iter().map(|&x| yeo_johnson(x, lambda)).collect();
    let mean = t.iter().sum::<f64>() / n;
    let var = t.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 || !var.is_finite() {
        return f64::NEG_INFINITY;
    }
    -0.5 * n * var.ln() + (lambda - 1.0) * jacobian
}

fn distinct_count(values: &[f64], limit: usize) -> usize {
    let mut seen: Vec<f64> = Vec::with_capacity(limit);
    for &v in values {
        if !seen.contains(&v) {
            seen.push(v);
            if seen.len() >= limit {
                break;
            }
        }
    }
    seen.len()
}

/// Maximum-likelihood `lambda` on [-5, 5]: a 0.1-step grid followed by
/// Brent refinement around the best grid point.
pub fn fit_lambda(values: &[f64]) -> Result<f64, MlError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MlError::DegenerateInput("non-finite value".into()));
    }
    if distinct_count(values, 3) < 3 {
        return Err(MlError::DegenerateInput("fewer than 3 distinct values".into()));
    }
    // summation in sorted order keeps the fit independent of row order
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let jacobian: f64 = sorted.iter().map(|&x| x.signum() * x.abs().ln_1p()).sum();
    let f = |lambda: f64| -log_likelihood(&sorted, jacobian, lambda);

    let (lo, hi) = LAMBDA_RANGE;
    let steps = ((hi - lo) / 0.1).round() as usize;
    let grid = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64);
    let (best, best_f) = grid
        .map(|l| (l, f(l)))
        .fold((0.0, f64::INFINITY), |acc, (l, v)| if v < acc.1 { (l, v) } else { acc });
    if !best_f.is_finite() {
        return Err(MlError::DegenerateInput(
            "likelihood is not finite for any lambda".into(),
        ));
    }
    let (l, v) = brent_minimize(&f, (best - 0.1).max(lo), (best + 0.1).min(hi), 1e-10, 200);
    Ok(if v <= best_f { l } else { best })
}

/// Brent's derivative-free minimizer on `[a, b]`.
fn brent_minimize(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}
