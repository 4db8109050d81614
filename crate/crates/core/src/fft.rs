//! Radix-2 complex FFT over power-of-two grids, applied axis by axis.
//!
//! The forward transform carries the `1/N` factor so that the output is the
//! list of Fourier coefficients `f̂(k)` with `f(x) = Σ_k f̂(k) e^{ik·x}`.
//! The inverse transform is unnormalized. Loop order is fixed, so results
//! are bit-reproducible for a given build.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Radix2 {
    n: usize,
    log2: u32,
    // e^{-2πik/n}, k < n/2
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    pub(crate) fn new(n: usize) -> Self {
        assert!(
            n.is_power_of_two() && n >= 2,
            "radix-2 length must be a power of two >= 2"
        );
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        Self {
            n,
            log2: n.trailing_zeros(),
            twiddles,
        }
    }

    fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        let shift = usize::BITS - self.log2;
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Separable d-dimensional transform on a row-major `n^d` array
/// (axis 0 slowest).
#[derive(Debug, Clone)]
pub(crate) struct FftNd {
    dim: usize,
    n: usize,
    line: Radix2,
}

impl FftNd {
    pub(crate) fn new(dim: usize, n: usize) -> Self {
        Self {
            dim,
            n,
            line: Radix2::new(n),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let total = n.pow(self.dim as u32);
        assert_eq!(data.len(), total, "buffer length does not match grid");
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    self.line.process(chunk, inverse);
                }
                continue;
            }
            let outer = total / (stride * n);
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * stride * n + i;
                    for (m, slot) in scratch.iter_mut().enumerate() {
                        *slot = data[base + m * stride];
                    }
                    self.line.process(&mut scratch, inverse);
                    for (m, value) in scratch.iter().enumerate() {
                        data[base + m * stride] = *value;
                    }
                }
            }
        }
    }

    /// Physical values to Fourier coefficients (normalized by `1/N`).
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
        let scale = 1.0 / data.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// Fourier coefficients to physical values.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    pub(crate) fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    pub(crate) fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (j, x)| {
                        let angle = -2.0 * PI * (j * k) as f64 / n as f64;
                        acc + x * Complex64::new(libm::cos(angle), libm::sin(angle))
                    })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let input: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(libm::sin(i as f64 * 0.7), libm::cos(i as f64 * 1.3)))
            .collect();
        let mut fast = input.clone();
        Radix2::new(16).process(&mut fast, false);
        for (a, b) in fast.iter().zip(naive_dft(&input)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nd_round_trip() {
        let plan = FftNd::new(3, 8);
        let values: Vec<f64> = (0..512)
            .map(|i| libm::sin(i as f64 * 0.37) + 0.1 * i as f64)
            .collect();
        let coeffs = plan.forward_real(&values);
        let back = plan.inverse_real(&coeffs);
        for (a, b) in values.iter().zip(back) {
            assert!((a - b).abs() < 1e-12 * 60.0);
        }
    }
}
