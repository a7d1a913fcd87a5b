//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! This is the independent oracle against which the closed-form coefficient
//! tables are checked. It never calls into the closed forms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Estimate of the error floor set by rounding in the panel's own sum.
    roundoff: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

fn kronrod(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = fc;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        fv[j] = lo;
        fv[14 - j] = hi;
        kron += (lo + hi) * WGK[j];
        resabs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    let (resabs, resasc) = (resabs * half.abs(), resasc * half.abs());
    let mut error = ((kron - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * resabs;
    Panel {
        a,
        b,
        value: kron * half,
        error: error.max(roundoff),
        roundoff,
    }
}

/// Neumaier-compensated sum of complex values.
fn compensated_sum(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for v in values {
        for (s, c, x) in [
            (&mut sum.re, &mut comp.re, v.re),
            (&mut sum.im, &mut comp.im, v.im),
        ] {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }
    sum + comp
}

/// Integrates a complex integrand over `[a, b]` to absolute tolerance `tol`,
/// starting from `initial_panels` equal pieces.
///
/// Panels whose error estimate has reached their rounding floor are not
/// split further, so `tol` below that floor is met as closely as double
/// precision allows.
pub fn integrate_complex_panels(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
) -> Complex64 {
    let n = initial_panels.max(1);
    let width = (b - a) / n as f64;
    let mut heap: BinaryHeap<Panel> = (0..n)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n {
                b
            } else {
                a + width * (i + 1) as f64
            };
            kronrod(&f, lo, hi)
        })
        .collect();
    let mut done = Vec::new();
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    while total_err > tol && heap.len() + done.len() < MAX_PANELS {
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if p.error <= p.roundoff || mid <= p.a || mid >= p.b {
            done.push(p);
            continue;
        }
        let (l, r) = (kronrod(&f, p.a, mid), kronrod(&f, mid, p.b));
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(done);
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    compensated_sum(panels.iter().map(|p| p.value))
}

pub fn integrate_complex(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    integrate_complex_panels(f, a, b, tol, 1)
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// `(1/2pi) * integral_0^{2pi} x^k e^{i d x} dx` by quadrature alone.
///
/// For `d != 0` the range is cut into the `|d|` periods of the exponential
/// and each period is integrated in the local variable `u = x - x_j`, where
/// `e^{idx} = e^{idu}`; the phase argument then stays in `[0, 2pi]`.
pub fn moment_coefficient_by_quadrature(k: u32, d: i64) -> Complex64 {
    use std::f64::consts::TAU;
    let k = k as i32;
    if d == 0 {
        return integrate_complex_panels(|x| Complex64::new(x.powi(k), 0.0), 0.0, TAU, 1e-13, 8)
            / TAU;
    }
    let periods = d.unsigned_abs() as usize;
    let width = TAU / periods as f64;
    let df = d as f64;
    let tol = 1e-13 / periods as f64;
    let pieces = (0..periods).map(|j| {
        let start = width * j as f64;
        integrate_complex_panels(
            |u| Complex64::from_polar((start + u).powi(k), df * u),
            0.0,
            width,
            tol,
            4,
        )
    });
    compensated_sum(pieces) / TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x, -1.0, 2.0, 1e-14);
        let exact = (64.0 - 1.0) / 6.0 - 1.5 * (4.0 - 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate(|x| (40.0 * x).cos() * x, 0.0, PI, 1e-13);
        // int_0^pi x cos(40x) dx = [x sin(40x)/40 + cos(40x)/1600]_0^pi = 0
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let v = integrate(|x| (-x * x / 2.0).exp(), -12.0, 12.0, 1e-14);
        assert!((v - (2.0 * PI).sqrt()).abs() < 1e-13);
    }
}
