//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands,
//! on intervals, straight segments and circular arcs.

#![allow(clippy::excessive_precision)]

use crate::{LabError, Result, C64};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
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

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol: abs_tol, ..Default::default() }
    }
}

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// `int_a^b f(x) dx` for complex-valued `f`.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    if a > b {
        return Ok(-integrate(f, b, a, opts)?);
    }
    let mut parts: Vec<(f64, f64, C64, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(&f, a, b);
    parts.push((a, b, v, e));
    loop {
        let total: C64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(LabError::NonFinite("quadrature integrand"));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            return Ok(total);
        }
        if parts.len() >= opts.max_intervals {
            // accept when the remaining error is at rounding level of the result
            if err <= 1e-11 * total.norm().max(1.0) {
                return Ok(total);
            }
            return Err(LabError::Quadrature(format!(
                "error estimate {err:e} above tolerance after {} intervals",
                parts.len()
            )));
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.3 > be { (i, p.3) } else { (bi, be) });
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(LabError::Quadrature("interval collapsed".into()));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Integral of `f(z) dz` along the straight segment from `za` to `zb`.
pub fn segment<F: Fn(C64) -> C64>(f: F, za: C64, zb: C64, opts: QuadOptions) -> Result<C64> {
    let d = zb - za;
    integrate(|u| f(za + d * u) * d, 0.0, 1.0, opts)
}

/// Integral of `f(z) dz` along `z = c + r e^{i phi}`, `phi` from `pa` to `pb`.
pub fn arc<F: Fn(C64) -> C64>(f: F, c: C64, r: f64, pa: f64, pb: f64, opts: QuadOptions) -> Result<C64> {
    integrate(
        |phi| {
            let e = C64::from_polar(r, phi);
            f(c + e) * C64::new(0.0, 1.0) * e
        },
        pa,
        pb,
        opts,
    )
}

/// Integral along a polyline through `pts`.
pub fn polyline<F: Fn(C64) -> C64>(f: F, pts: &[C64], opts: QuadOptions) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        s += segment(&f, w[0], w[1], opts)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory() {
        let v = integrate(|x| C64::new(x * x, 0.0), 0.0, 3.0, QuadOptions::default()).unwrap();
        assert!((v.re - 9.0).abs() < 1e-13);
        let w = integrate(|x| C64::from_polar(1.0, 40.0 * x), 0.0, 1.0, QuadOptions::default()).unwrap();
        let exact = (C64::new(0.0, 40.0).exp() - 1.0) / C64::new(0.0, 40.0);
        assert!((w - exact).norm() < 1e-13);
        let r = integrate(|x| C64::new(x * x, 0.0), 3.0, 0.0, QuadOptions::default()).unwrap();
        assert!((r.re + 9.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_square_root_singularity() {
        let v = integrate(|x| C64::new(1.0 / x.sqrt(), 0.0), 0.0, 1.0, QuadOptions::tol(1e-10)).unwrap();
        assert!((v.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn contour_residue() {
        let f = |z: C64| z.inv();
        let v = arc(f, C64::new(0.0, 0.0), 0.5, 0.0, 2.0 * std::f64::consts::PI, QuadOptions::default()).unwrap();
        assert!((v - C64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
        let sq = polyline(
            f,
            &[C64::new(1.0, -1.0), C64::new(1.0, 1.0), C64::new(-1.0, 1.0), C64::new(-1.0, -1.0), C64::new(1.0, -1.0)],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((sq - C64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    }
}
