use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::quadrature::cell_average;
use super::radial::KernelSpec;
use crate::error::{Error, Result};
use crate::exterior::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMethod {
    DirectQuadrature,
    FftZeroPadded,
}

impl std::str::FromStr for ConvMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(ConvMethod::DirectQuadrature),
            "fft" => Ok(ConvMethod::FftZeroPadded),
            _ => Err(Error::Config(format!("unknown kernel method `{s}` (expected direct or fft)"))),
        }
    }
}

/// Discrete free-space convolution `(K ∗ f)(x_i) = Σ_j K(x_i − x_j) f_j hⁿ`
/// on a fixed grid. The node at zero offset uses the cell average of `K`.
pub struct ConvolutionPlan {
    grid: GridSpec,
    kernel: KernelSpec,
    method: ConvMethod,
    /// Kernel samples on offsets `−(N_k−1)..=(N_k−1)`, row-major.
    stencil: Vec<f64>,
    stencil_dims: Vec<usize>,
    padded_dims: Vec<usize>,
    spectrum: Vec<Complex<f64>>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for ConvolutionPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvolutionPlan")
            .field("kernel", &self.kernel)
            .field("method", &self.method)
            .field("dims", &self.grid.dims())
            .field("padded_dims", &self.padded_dims)
            .finish()
    }
}

fn row_major(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i)
}

fn unflatten(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx
}

/// In-place n-dimensional FFT, one axis at a time.
fn fft_nd(data: &mut [Complex<f64>], dims: &[usize], ffts: &[Arc<dyn Fft<f64>>]) {
    let n = dims.len();
    for axis in 0..n {
        let len = dims[axis];
        let stride: usize = dims[axis + 1..].iter().product();
        let outer = data.len() / (len * stride);
        let mut line = vec![Complex::new(0.0, 0.0); len];
        let mut scratch = vec![Complex::new(0.0, 0.0); ffts[axis].get_inplace_scratch_len()];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * len * stride + s;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                ffts[axis].process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

impl ConvolutionPlan {
    /// `pad_factor ≥ 2` keeps the FFT convolution linear rather than circular;
    /// `singular_tol` is the tolerance of the zero-offset cell average.
    pub fn new(grid: &GridSpec, kernel: KernelSpec, method: ConvMethod, pad_factor: usize, singular_tol: f64) -> Result<Self> {
        if grid.n() != kernel.n {
            return Err(Error::DimensionMismatch { expected: kernel.n, found: grid.n() });
        }
        if pad_factor < 2 {
            return Err(Error::Parameter(format!("pad factor {pad_factor} < 2 would alias the convolution")));
        }
        if !(singular_tol > 0.0) {
            return Err(Error::Parameter("singular-cell tolerance must be positive".into()));
        }
        let h = grid.spacing().to_vec();
        let stencil_dims: Vec<usize> = grid.dims().iter().map(|d| 2 * d - 1).collect();
        let total: usize = stencil_dims.iter().product();
        let center = cell_average(&|x: &[f64]| kernel.value(x).unwrap_or(0.0), &h, singular_tol);
        let stencil: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let idx = unflatten(&stencil_dims, flat);
                let x: Vec<f64> =
                    idx.iter().zip(grid.dims()).zip(&h).map(|((&i, &d), h)| (i as f64 - (d - 1) as f64) * h).collect();
                kernel.value(&x).unwrap_or(center)
            })
            .collect();
        let padded_dims: Vec<usize> = grid.dims().iter().map(|d| pad_factor * d).collect();
        let mut planner = FftPlanner::new();
        let forward: Vec<_> = padded_dims.iter().map(|&p| planner.plan_fft_forward(p)).collect();
        let inverse: Vec<_> = padded_dims.iter().map(|&p| planner.plan_fft_inverse(p)).collect();
        let mut plan = Self {
            grid: grid.clone(),
            kernel,
            method,
            stencil,
            stencil_dims,
            padded_dims,
            spectrum: Vec::new(),
            forward,
            inverse,
        };
        if method == ConvMethod::FftZeroPadded {
            plan.spectrum = plan.kernel_spectrum();
        }
        Ok(plan)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn method(&self) -> ConvMethod {
        self.method
    }

    pub fn padded_dims(&self) -> &[usize] {
        &self.padded_dims
    }

    /// Kernel value used at grid offset `o` (in nodes).
    pub fn stencil_at(&self, offset: &[isize]) -> f64 {
        let idx: Vec<usize> =
            offset.iter().zip(self.grid.dims()).map(|(&o, &d)| (o + d as isize - 1) as usize).collect();
        self.stencil[row_major(&self.stencil_dims, &idx)]
    }

    fn kernel_spectrum(&self) -> Vec<Complex<f64>> {
        let total: usize = self.padded_dims.iter().product();
        let mut buf = vec![Complex::new(0.0, 0.0); total];
        let dims = self.grid.dims();
        for (flat, &v) in self.stencil.iter().enumerate() {
            let idx = unflatten(&self.stencil_dims, flat);
            let wrapped: Vec<usize> = idx
                .iter()
                .zip(dims)
                .zip(&self.padded_dims)
                .map(|((&i, &d), &p)| (i as isize - (d as isize - 1)).rem_euclid(p as isize) as usize)
                .collect();
            buf[row_major(&self.padded_dims, &wrapped)] = Complex::new(v, 0.0);
        }
        fft_nd(&mut buf, &self.padded_dims, &self.forward);
        buf
    }

    /// `(K ∗ f)` at every node.
    pub fn convolve(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", f.len(), self.grid.len())));
        }
        match self.method {
            ConvMethod::DirectQuadrature => Ok(self.convolve_direct(f)),
            ConvMethod::FftZeroPadded => Ok(self.convolve_fft(f)),
        }
    }

    fn convolve_direct(&self, f: &[f64]) -> Vec<f64> {
        let vol = self.grid.cell_volume();
        let dims = self.grid.dims();
        let support: Vec<(Vec<usize>, f64)> =
            f.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (unflatten(dims, j), v)).collect();
        (0..f.len())
            .into_par_iter()
            .map(|i| {
                let xi = unflatten(dims, i);
                let mut acc = 0.0;
                let mut idx = vec![0; dims.len()];
                for (yj, v) in &support {
                    for k in 0..dims.len() {
                        idx[k] = xi[k] + dims[k] - 1 - yj[k];
                    }
                    acc += self.stencil[row_major(&self.stencil_dims, &idx)] * v;
                }
                acc * vol
            })
            .collect()
    }

    fn convolve_fft(&self, f: &[f64]) -> Vec<f64> {
        let total: usize = self.padded_dims.iter().product();
        let dims = self.grid.dims();
        let mut buf = vec![Complex::new(0.0, 0.0); total];
        for (j, &v) in f.iter().enumerate() {
            if v != 0.0 {
                buf[row_major(&self.padded_dims, &unflatten(dims, j))] = Complex::new(v, 0.0);
            }
        }
        fft_nd(&mut buf, &self.padded_dims, &self.forward);
        for (b, k) in buf.iter_mut().zip(&self.spectrum) {
            *b *= k;
        }
        fft_nd(&mut buf, &self.padded_dims, &self.inverse);
        let scale = self.grid.cell_volume() / total as f64;
        (0..f.len()).map(|i| buf[row_major(&self.padded_dims, &unflatten(dims, i))].re * scale).collect()
    }
}
