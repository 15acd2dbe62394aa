//! Quadrature: Gauss–Legendre rules and adaptive Gauss–Kronrod integration
//! for scalar and operator-valued integrands.

use crate::error::{Error, Result};
use crate::superop::{max_abs, CMatrix};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        dp = d;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
        if x.abs() > 1e-14 || n % 2 == 0 {
            rule.push((-x, w));
        }
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: usize = 48;

/// Adaptive integral of a scalar function to absolute tolerance `abs_tol`.
pub fn adaptive_quad<F>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    adaptive_panel_scalar(f, a, b, abs_tol, 0)
}

fn adaptive_panel_scalar<F>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (value, err) = gk15_scalar(f, a, b)?;
    if err <= tol || (b - a).abs() < 1e3 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical(format!(
            "adaptive quadrature failed to reach tolerance {tol:e} on [{a}, {b}] (error estimate {err:e})"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_panel_scalar(f, a, mid, 0.5 * tol, depth + 1)?;
    let right = adaptive_panel_scalar(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok(left + right)
}

fn gk15_scalar<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (k, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let v = f(center)?;
            kronrod += wk * v;
            gauss += WG[3] * v;
        } else {
            let v1 = f(center - half * x)?;
            let v2 = f(center + half * x)?;
            kronrod += wk * (v1 + v2);
            // odd Kronrod indices coincide with the embedded Gauss nodes
            if k % 2 == 1 {
                gauss += WG[k / 2] * (v1 + v2);
            }
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Adaptive integral of a matrix-valued function; the error is measured in
/// the max-absolute-entry norm.
pub fn adaptive_quad_matrix<F>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let probe = f(0.5 * (a + b))?;
    if a == b {
        return Ok(CMatrix::zeros(probe.nrows(), probe.ncols()));
    }
    adaptive_panel_matrix(f, a, b, abs_tol, 0)
}

fn adaptive_panel_matrix<F>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let (value, err) = gk15_matrix(f, a, b)?;
    if err <= tol || (b - a).abs() < 1e3 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical(format!(
            "adaptive quadrature failed to reach tolerance {tol:e} on [{a}, {b}] (error estimate {err:e})"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_panel_matrix(f, a, mid, 0.5 * tol, depth + 1)?;
    let right = adaptive_panel_matrix(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok(left + right)
}

fn gk15_matrix<F>(f: &F, a: f64, b: f64) -> Result<(CMatrix, f64)>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    use crate::superop::re;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let first = f(center)?;
    let mut kronrod = first.map(|z| z * re(WGK[7]));
    let mut gauss = first.map(|z| z * re(WG[3]));
    for (k, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let v1 = f(center - half * x)?;
        let v2 = f(center + half * x)?;
        let sum = v1 + v2;
        kronrod += sum.map(|z| z * re(wk));
        if k % 2 == 1 {
            gauss += sum.map(|z| z * re(WG[k / 2]));
        }
    }
    let value = kronrod.map(|z| z * re(half));
    let err = max_abs(&(&kronrod - &gauss)) * half.abs();
    Ok((value, err))
}
