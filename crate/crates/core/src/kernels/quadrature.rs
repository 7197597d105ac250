//! Gauss–Legendre rules and cell averages of weakly singular kernels.

use std::f64::consts::PI;

/// `m`-point Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton
/// iteration on the three-term recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_m(x), P_m'(x))`.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor Gauss–Legendre rule over the box `[lo, hi]`.
fn box_rule(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let n = lo.len();
    let m = gl.0.len();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..n {
            let half = 0.5 * (hi[k] - lo[k]);
            x[k] = lo[k] + half * (1.0 + gl.0[idx[k]]);
            w *= half * gl.1[idx[k]];
        }
        sum += w * f(&x);
        let mut k = 0;
        loop {
            if k == n {
                return sum;
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The `2ⁿ` halves of `[lo, hi]`.
fn children(lo: &[f64], hi: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = lo.len();
    (0..1usize << n)
        .map(|mask| {
            let mut a = lo.to_vec();
            let mut b = hi.to_vec();
            for k in 0..n {
                let mid = 0.5 * (lo[k] + hi[k]);
                if mask >> k & 1 == 0 {
                    b[k] = mid;
                } else {
                    a[k] = mid;
                }
            }
            (a, b)
        })
        .collect()
}

struct Cubature<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    gl: (Vec<f64>, Vec<f64>),
    tol: f64,
}

impl Cubature<'_> {
    fn adaptive(&self, lo: &[f64], hi: &[f64], coarse: f64, depth: usize) -> f64 {
        let parts: Vec<_> = children(lo, hi);
        let vals: Vec<f64> = parts.iter().map(|(a, b)| box_rule(self.f, a, b, &self.gl)).collect();
        let fine: f64 = vals.iter().sum();
        if (fine - coarse).abs() <= self.tol || depth >= 12 {
            return fine;
        }
        parts.iter().zip(vals).map(|((a, b), v)| self.adaptive(a, b, v, depth + 1)).sum()
    }

    /// Integral over a box with the singularity at the corner `lo`.
    fn corner(&self, lo: &[f64], hi: &[f64], size: f64) -> f64 {
        let mut total = 0.0;
        let (mut a, mut b) = (lo.to_vec(), hi.to_vec());
        loop {
            let width = a.iter().zip(&b).map(|(x, y)| (y - x).abs()).fold(0.0, f64::max);
            if width <= 1e-7 * size {
                return total + box_rule(self.f, &a, &b, &self.gl);
            }
            let mut next = None;
            for (ca, cb) in children(&a, &b) {
                if ca == a {
                    next = Some((ca, cb));
                } else {
                    let coarse = box_rule(self.f, &ca, &cb, &self.gl);
                    total += self.adaptive(&ca, &cb, coarse, 0);
                }
            }
            (a, b) = next.expect("corner child");
        }
    }
}

/// Average of `f` over the box `∏[−h_k/2, h_k/2]`, where `f` may have an
/// integrable singularity at the origin. `tol` is the absolute tolerance
/// per subdivision test, relative to `max |f|` on the box boundary.
pub fn cell_average(f: &dyn Fn(&[f64]) -> f64, spacing: &[f64], tol: f64) -> f64 {
    let n = spacing.len();
    let scale = f(&spacing.iter().map(|h| 0.5 * h).collect::<Vec<_>>()).abs().max(1e-300);
    let volume: f64 = spacing.iter().product();
    let cub = Cubature { f, gl: gauss_legendre(6), tol: tol * scale * volume };
    let size = spacing.iter().copied().fold(0.0, f64::max);
    let mut total = 0.0;
    for mask in 0..1usize << n {
        let hi: Vec<f64> =
            (0..n).map(|k| if mask >> k & 1 == 0 { 0.5 * spacing[k] } else { -0.5 * spacing[k] }).collect();
        let lo = vec![0.0; n];
        // orient every orthant as [0, |hi|] by reflecting f
        let sign: Vec<f64> = hi.iter().map(|v| v.signum()).collect();
        let g = |x: &[f64]| {
            let y: Vec<f64> = x.iter().zip(&sign).map(|(a, s)| a * s).collect();
            f(&y)
        };
        let inner = Cubature { f: &g, gl: cub.gl.clone(), tol: cub.tol };
        let abs_hi: Vec<f64> = hi.iter().map(|v| v.abs()).collect();
        total += inner.corner(&lo, &abs_hi, size);
    }
    total / volume
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::radial::{KernelKind, KernelSpec};

    #[test]
    fn gauss_legendre_is_exact_to_degree_2m_minus_1() {
        for m in 1..=12 {
            let (x, w) = gauss_legendre(m);
            for p in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "m={m} p={p}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn smooth_average() {
        let f = |x: &[f64]| 1.0 + x[0] * x[0] + 3.0 * x[1];
        let a = cell_average(&f, &[0.2, 0.4], 1e-12);
        assert!((a - (1.0 + 0.01 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn log_average_on_unit_square() {
        // ∫∫_{[-1/2,1/2]²} ln|x| dx, closed form via polar integration
        let f = |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]).ln();
        let exact = 0.5 * (0.5f64).ln() - 1.5 + PI / 4.0;
        let a = cell_average(&f, &[1.0, 1.0], 1e-12);
        assert!((a - exact).abs() < 1e-10, "{a} vs {exact}");
    }

    #[test]
    fn inverse_distance_average_on_unit_cube() {
        let g = KernelSpec::new(3, KernelKind::NewtonianG).unwrap();
        let f = |x: &[f64]| g.value(x).unwrap_or(0.0);
        let a1 = cell_average(&f, &[1.0, 1.0, 1.0], 1e-12);
        let a2 = cell_average(&f, &[0.5, 0.5, 0.5], 1e-12);
        // g is homogeneous of degree −1
        assert!((a2 - 2.0 * a1).abs() < 1e-10 * a1.abs());
        // ∫_{[-1/2,1/2]³} dx/|x| = 3 ln((√3+1)/(√3−1)) − π/2
        let s3 = 3f64.sqrt();
        let exact = 3.0 * ((s3 + 1.0) / (s3 - 1.0)).ln() - PI / 2.0;
        assert!((a1 + exact / (4.0 * PI)).abs() < 1e-10, "{a1} vs {}", -exact / (4.0 * PI));
    }
}
