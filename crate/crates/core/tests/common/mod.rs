//! Test-only oracles. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

pub const LAMBDA: f64 = 0.04;
pub const L: f64 = 2.0;
pub const N0: f64 = 2.0;

/// Green's function written out from the closed form in polar style.
pub fn green(x: f64, d: f64, lambda: f64) -> Complex64 {
    let r = x.hypot(d);
    let k = 2.0 * PI / lambda;
    let kr = k * r;
    let a = (d * d - 2.0 * x * x) / (r * r);
    let bracket = Complex64::new((d / r).powi(2) - a / (kr * kr), a / kr);
    let phase = Complex64::from_polar(120.0 * PI / (2.0 * lambda * r), kr + PI / 2.0);
    phase * bracket
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule: `panels` panels of `order` nodes on [a, b].
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

/// Adaptive Simpson quadrature of a complex integrand.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &Dense) -> Complex64 {
    let n = m.n;
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a.at(x, c).norm().total_cmp(&a.at(y, c).norm()))
            .unwrap();
        if a.at(p, c).norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            for j in 0..n {
                let t = a.at(c, j);
                a.set(c, j, a.at(p, j));
                a.set(p, j, t);
            }
            det = -det;
        }
        let piv = a.at(c, c);
        det *= piv;
        for r in c + 1..n {
            let f = a.at(r, c) / piv;
            for j in c..n {
                let v = a.at(r, j) - f * a.at(c, j);
                a.set(r, j, v);
            }
        }
    }
    det
}

/// `ln det(I + s·A)` through [`determinant`].
pub fn logdet_identity_plus(a: &Dense, s: f64) -> f64 {
    let mut m = a.clone();
    for i in 0..m.n {
        for j in 0..m.n {
            let v = m.at(i, j) * s + if i == j { 1.0 } else { 0.0 };
            m.set(i, j, v);
        }
    }
    determinant(&m).norm().ln()
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// sorted descending.
pub fn jacobi_eigenvalues(m: &Dense) -> Vec<f64> {
    let n = m.n;
    let mut a = m.clone();
    let mut converged = false;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.at(i, j).norm_sqr())
            .sum();
        let scale: f64 = a.a.iter().map(|v| v.norm_sqr()).sum();
        if off <= 1e-30 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.at(p, q);
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                // remove the phase, then a real symmetric rotation
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let sp = phase * s;
                // columns: A ← A J with J = [[c, sp],[−sp*, c]]
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, akp * c - akq * sp.conj());
                    a.set(k, q, akp * sp + akq * c);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, apk * c - aqk * sp);
                    a.set(q, k, apk * sp.conj() + aqk * c);
                }
            }
        }
    }
    assert!(converged, "Jacobi oracle did not converge");
    let mut ev: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

pub fn midpoints(l: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| (i as f64 + 0.5) * l / m as f64).collect()
}

/// Kernel matrix with the same inner midpoint rule, assembled naively.
pub fn kernel_matrix(points: &[f64], d: f64, lambda: f64, l: f64, power: f64, inner: usize) -> Dense {
    let src = midpoints(l, inner);
    let w = l / inner as f64;
    let n = points.len();
    let mut k = Dense::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &s in &src {
                acc += green(points[i] - s, d, lambda) * green(points[j] - s, d, lambda).conj();
            }
            k.set(i, j, acc * (power * w));
        }
    }
    k
}

/// `∫₀ˡ∫₀ˡ |G(r − s)|² dr ds` by a composite Gauss rule on the offset form.
pub fn double_power_integral(d: f64, lambda: f64, l: f64) -> f64 {
    composite_gl(0.0, l, 400, 16)
        .into_iter()
        .map(|(x, w)| 2.0 * w * (l - x) * green(x, d, lambda).norm_sqr())
        .sum()
}
