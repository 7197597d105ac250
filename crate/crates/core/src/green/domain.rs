use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gauss_legendre, sigma};

/// Shape of a bounded domain `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// A boundary quadrature node with its outward unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryNode {
    pub y: Vec<f64>,
    pub normal: Vec<f64>,
    pub weight: f64,
}

/// Domain with a boundary quadrature rule. Balls use Gauss–Legendre in
/// `cos θ` times the trapezoid rule in azimuth (the trapezoid rule alone in
/// 2D); boxes use tensor Gauss–Legendre on each face.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    shape: Shape,
    nodes_per_axis: usize,
    nodes: Vec<BoundaryNode>,
}

fn trapezoid_circle(m: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..m).map(move |k| {
        let t = 2.0 * PI * (k as f64 + 0.5) / m as f64;
        (t.cos(), t.sin())
    })
}

impl DomainSpec {
    /// Ball in `n ∈ {2, 3}`: `m` azimuthal nodes in 2D; `m` polar times
    /// `2m` azimuthal nodes in 3D.
    pub fn ball(center: Vec<f64>, radius: f64, m: usize) -> Result<Self> {
        let n = center.len();
        if !(radius > 0.0) || m == 0 {
            return Err(Error::Parameter(format!("ball needs radius > 0 and nodes > 0, got {radius}, {m}")));
        }
        let mut nodes = Vec::new();
        match n {
            2 => {
                let w = 2.0 * PI * radius / m as f64;
                for (c, s) in trapezoid_circle(m) {
                    let normal = vec![c, s];
                    let y = vec![center[0] + radius * c, center[1] + radius * s];
                    nodes.push(BoundaryNode { y, normal, weight: w });
                }
            }
            3 => {
                let (t, wt) = gauss_legendre(m);
                let ma = 2 * m;
                let wa = 2.0 * PI / ma as f64;
                for (ct, w) in t.iter().zip(&wt) {
                    let st = (1.0 - ct * ct).sqrt();
                    for (c, s) in trapezoid_circle(ma) {
                        let normal = vec![st * c, st * s, *ct];
                        let y = (0..3).map(|i| center[i] + radius * normal[i]).collect();
                        nodes.push(BoundaryNode { y, normal, weight: w * wa * radius * radius });
                    }
                }
            }
            _ => return Err(Error::Unsupported(format!("ball quadrature in dimension {n}"))),
        }
        Ok(Self { shape: Shape::Ball { center, radius }, nodes_per_axis: m, nodes })
    }

    /// Box `∏ [lo_i, hi_i]` with an `m^{n−1}` Gauss–Legendre rule per face.
    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>, m: usize) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || n < 2 || m == 0 || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(Error::Parameter("box needs n ≥ 2 matching bounds with lo < hi and nodes > 0".into()));
        }
        let (t, wt) = gauss_legendre(m);
        let mut nodes = Vec::new();
        for axis in 0..n {
            for side in [-1.0, 1.0] {
                let others: Vec<usize> = (0..n).filter(|&k| k != axis).collect();
                let total = m.pow(others.len() as u32);
                for flat in 0..total {
                    let mut y = vec![0.0; n];
                    let mut w = 1.0;
                    let mut rest = flat;
                    for &k in &others {
                        let j = rest % m;
                        rest /= m;
                        let half = 0.5 * (hi[k] - lo[k]);
                        y[k] = lo[k] + half * (t[j] + 1.0);
                        w *= half * wt[j];
                    }
                    y[axis] = if side < 0.0 { lo[axis] } else { hi[axis] };
                    let mut normal = vec![0.0; n];
                    normal[axis] = side;
                    nodes.push(BoundaryNode { y, normal, weight: w });
                }
            }
        }
        Ok(Self { shape: Shape::Box { lo, hi }, nodes_per_axis: m, nodes })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        match &self.shape {
            Shape::Ball { center, .. } => center.len(),
            Shape::Box { lo, .. } => lo.len(),
        }
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    /// Same domain with another node count.
    pub fn with_nodes(&self, m: usize) -> Result<Self> {
        match &self.shape {
            Shape::Ball { center, radius } => Self::ball(center.clone(), *radius, m),
            Shape::Box { lo, hi } => Self::cuboid(lo.clone(), hi.clone(), m),
        }
    }

    /// Exact boundary measure.
    pub fn surface_area(&self) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => sigma(center.len()) * radius.powi(center.len() as i32 - 1),
            Shape::Box { lo, hi } => {
                let sides: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                let vol: f64 = sides.iter().product();
                2.0 * sides.iter().map(|s| vol / s).sum::<f64>()
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Negative inside, positive outside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt() - radius
            }
            Shape::Box { lo, hi } => {
                let q: Vec<f64> = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(xi, (a, b))| (a - xi).max(xi - b))
                    .collect();
                let outside = q.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
                let inside = q.iter().copied().fold(f64::NEG_INFINITY, f64::max).min(0.0);
                outside + inside
            }
        }
    }

    /// Largest distance from a boundary node to its nearest neighbour.
    pub fn max_node_spacing(&self) -> f64 {
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                self.nodes
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| dist(&a.y, &b.y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Width of the collar around `∂D` where reconstruction is degraded.
    pub fn boundary_collar(&self) -> f64 {
        4.0 * self.max_node_spacing()
    }

    /// Volume quadrature `(x, w)` with `m` Gauss–Legendre nodes per
    /// direction (radial times the sphere rule for balls).
    pub fn volume_rule(&self, m: usize) -> Vec<(Vec<f64>, f64)> {
        let (t, wt) = gauss_legendre(m);
        match &self.shape {
            Shape::Ball { center, radius } => {
                let n = center.len();
                let sphere = Self::ball(vec![0.0; n], 1.0, m).expect("n checked at construction");
                let mut out = Vec::new();
                for (tr, wr) in t.iter().zip(&wt) {
                    let r = 0.5 * radius * (tr + 1.0);
                    let w_r = 0.5 * radius * wr * r.powi(n as i32 - 1);
                    for node in sphere.nodes() {
                        let x = (0..n).map(|i| center[i] + r * node.y[i]).collect();
                        out.push((x, w_r * node.weight));
                    }
                }
                out
            }
            Shape::Box { lo, hi } => {
                let n = lo.len();
                let mut out = Vec::new();
                for flat in 0..m.pow(n as u32) {
                    let mut x = vec![0.0; n];
                    let mut w = 1.0;
                    let mut rest = flat;
                    for k in 0..n {
                        let j = rest % m;
                        rest /= m;
                        let half = 0.5 * (hi[k] - lo[k]);
                        x[k] = lo[k] + half * (t[j] + 1.0);
                        w *= half * wt[j];
                    }
                    out.push((x, w));
                }
                out
            }
        }
    }
}
