//! Internal numerical building blocks: derivative-free-friendly ascent,
//! constraint projection, and one-dimensional searches.
//!
//! Everything here works on plain real vectors; gradients and Jacobians
//! are taken by central finite differences, which is accurate enough for
//! the smooth, low-dimensional objectives this crate optimizes (at most a
//! few dozen parameters).

use nalgebra::{DMatrix, DVector};

/// Step used for finite-difference gradients.
const GRAD_STEP: f64 = 1e-6;
/// Step used for finite-difference Jacobians of constraint residuals.
const JAC_STEP: f64 = 1e-7;
/// Armijo sufficient-increase coefficient.
const ARMIJO_C1: f64 = 1e-4;

/// Outcome of an ascent run: the best point found, its objective value,
/// and the number of iterations spent.
#[derive(Debug, Clone)]
pub(crate) struct AscentResult {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Central-difference gradient of `f` at `x`.
pub(crate) fn num_grad<F>(f: &mut F, x: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let n = x.len();
    let mut g = DVector::zeros(n);
    let mut probe = x.clone();
    for i in 0..n {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = f(&probe);
        probe[i] = xi - h;
        let fm = f(&probe);
        probe[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Jacobian of a residual map at `x` (rows = residual
/// components, columns = parameters).
pub(crate) fn num_jac<R>(res: &mut R, x: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    R: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let mut probe = x.clone();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x[i];
        probe[i] = xi + h;
        let rp = res(&probe);
        probe[i] = xi - h;
        let rm = res(&probe);
        probe[i] = xi;
        cols.push((rp - rm) / (2.0 * h));
    }
    let m = cols[0].len();
    DMatrix::from_fn(m, n, |r, c| cols[c][r])
}

/// Quasi-Newton maximization of `f` from `x0`: BFGS on the negated
/// objective with an Armijo backtracking line search and finite-difference
/// gradients.  Stops when the gradient norm drops below `gtol`, the line
/// search stalls, or `max_iter` is reached.
pub(crate) fn bfgs_max<F>(
    mut f: F,
    x0: &DVector<f64>,
    max_iter: usize,
    gtol: f64,
) -> AscentResult
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let n = x0.len();
    let mut x = x0.clone();
    let mut fx = f(&x);
    let mut g = num_grad(&mut f, &x, GRAD_STEP);
    let mut h_inv = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;

    for _ in 0..max_iter {
        if g.norm() < gtol {
            break;
        }
        iterations += 1;

        let mut dir = &h_inv * &g;
        let mut slope = g.dot(&dir);
        if !slope.is_finite() || slope <= 0.0 {
            // The approximate inverse Hessian lost positive definiteness
            // (finite-difference noise); restart from steepest ascent.
            h_inv = DMatrix::identity(n, n);
            dir = g.clone();
            slope = g.dot(&g);
            if slope <= 0.0 {
                break;
            }
        }

        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..40 {
            let xn = &x + &dir * t;
            let fxn = f(&xn);
            if fxn.is_finite() && fxn >= fx + ARMIJO_C1 * t * slope {
                let gn = num_grad(&mut f, &xn, GRAD_STEP);
                let s = &xn - &x;
                let y = &gn - &g;
                // Curvature condition for the maximization form: the
                // update uses (s, −y) and requires −yᵀs > 0.
                let ys = -y.dot(&s);
                if ys > 1e-12 {
                    let rho = 1.0 / ys;
                    let yphi = -y;
                    let eye = DMatrix::<f64>::identity(n, n);
                    let left = &eye - (&s * yphi.transpose()) * rho;
                    let right = &eye - (&yphi * s.transpose()) * rho;
                    h_inv = &left * &h_inv * right + (&s * s.transpose()) * rho;
                } else {
                    h_inv = DMatrix::identity(n, n);
                }
                x = xn;
                fx = fxn;
                g = gn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    AscentResult {
        x,
        value: fx,
        iterations,
    }
}

/// Gauss–Newton projection of `x0` onto the zero set of a residual map.
///
/// Iterates x ← x − J⁺r using a least-squares solve until the residual
/// infinity norm drops below `tol`.  Returns `None` if that fails within
/// `max_iter` sweeps.
pub(crate) fn gauss_newton_project<R>(
    res: &mut R,
    x0: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Option<DVector<f64>>
where
    R: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0.clone();
    for _ in 0..max_iter {
        let r = res(&x);
        if r.amax() < tol {
            return Some(x);
        }
        if !r.iter().all(|v| v.is_finite()) {
            return None;
        }
        let j = num_jac(res, &x, JAC_STEP);
        let delta = j.svd(true, true).solve(&r, 1e-14).ok()?;
        x -= delta;
    }
    if res(&x).amax() < tol {
        Some(x)
    } else {
        None
    }
}

/// Gradient ascent restricted to the constraint manifold {r(x) = 0}.
///
/// Each step projects the objective gradient onto the tangent space of
/// the manifold (removing the component spanned by the residual
/// Jacobian), takes a trial step, and retracts back onto the manifold
/// with [`gauss_newton_project`].  The step size adapts: it halves on
/// failure and doubles (capped at 1) on success.  Stops when the tangent
/// gradient norm falls below `1e-9` or no improving step exists.
pub(crate) fn projected_ascent<F, R>(
    mut obj: F,
    res: &mut R,
    x0: &DVector<f64>,
    proj_tol: f64,
    max_iter: usize,
) -> Option<AscentResult>
where
    F: FnMut(&DVector<f64>) -> f64,
    R: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let mut x = gauss_newton_project(res, x0, proj_tol, 60)?;
    let mut fx = obj(&x);
    let mut t = 0.25;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let g = num_grad(&mut obj, &x, GRAD_STEP);
        let j = num_jac(res, &x, JAC_STEP);
        let m = j.nrows();

        // Tangent projection: remove the normal component Jᵀλ with
        // λ solving (JJᵀ + εI)λ = Jg.
        let jjt = &j * j.transpose() + DMatrix::<f64>::identity(m, m) * 1e-14;
        let lambda = match jjt.lu().solve(&(&j * &g)) {
            Some(l) => l,
            None => break,
        };
        let gt = &g - j.transpose() * lambda;
        if gt.norm() < 1e-9 {
            break;
        }

        let mut improved = false;
        for _ in 0..30 {
            let trial = &x + &gt * t;
            if let Some(projected) = gauss_newton_project(res, &trial, proj_tol, 40) {
                let fp = obj(&projected);
                if fp > fx + 1e-14 {
                    x = projected;
                    fx = fp;
                    improved = true;
                    t = (t * 2.0).min(1.0);
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }

    Some(AscentResult {
        x,
        value: fx,
        iterations,
    })
}

/// Golden-section minimization of a unimodal function on [lo, hi].
/// Returns the located minimizer and its value once the bracket narrows
/// below `xtol`.
pub(crate) fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > xtol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    (x, fx)
}

/// Bisection on a bracketing interval: `f(lo)` and `f(hi)` must have
/// opposite (nonzero) signs.  Narrows until the interval width falls
/// below `xtol` and returns the midpoint.
pub(crate) fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, flo: f64, xtol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut sign_lo = flo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == sign_lo {
            lo = mid;
            sign_lo = fm > 0.0;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
