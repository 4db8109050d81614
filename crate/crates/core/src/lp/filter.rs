use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::LpError;
use crate::field::SpectralField;
use crate::grid::TorusGrid;

/// `χ ≡ 1` inside this radius.
pub const INNER_RADIUS: f64 = 3.0 / 4.0;
/// `χ ≡ 0` outside this radius.
pub const OUTER_RADIUS: f64 = 4.0 / 3.0;

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / t)
    }
}

/// Smooth step from 0 (t ≤ 0) to 1 (t ≥ 1) built from `exp(−1/t)`.
pub fn smooth_step(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    let a = psi(t);
    let b = psi(1.0 - t);
    a / (a + b)
}

/// Radial low-pass profile: 1 for `r ≤ 3/4`, 0 for `r ≥ 4/3`, smooth and
/// non-increasing in between.
pub fn chi(r: f64) -> f64 {
    smooth_step((OUTER_RADIUS - r) / (OUTER_RADIUS - INNER_RADIUS))
}

/// Annulus profile `φ(r) = χ(r/2) − χ(r)`, supported in `3/4 ≤ r ≤ 8/3`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// `φ(2^{-j} r)` / `χ(2^{-j} r)` use exact binary scaling.
fn scaled(r: f64, j: i32) -> f64 {
    libm::ldexp(r, -j)
}

/// Sampled `χ` and `φ(2^{-j}·)` multipliers on a grid's wavenumber lattice,
/// for blocks `j = −1 … j_max`.
///
/// `j_max` is the smallest index whose low-pass `S_{j_max+1}` equals one on
/// every dealiased mode, so the blocks reconstruct any dealiased field.
#[derive(Debug, Clone)]
pub struct LPFilterBank {
    grid: Arc<TorusGrid>,
    magnitudes: Vec<f64>,
    chi: Vec<f64>,
    phi: Vec<Vec<f64>>,
    j_max: i32,
}

/// Same as [`LPFilterBank::new`].
pub fn build_filter_bank(grid: &Arc<TorusGrid>) -> Result<LPFilterBank, LpError> {
    LPFilterBank::new(grid)
}

impl LPFilterBank {
    pub fn new(grid: &Arc<TorusGrid>) -> Result<Self, LpError> {
        if grid.n() < 8 {
            return Err(LpError::GridTooSmall(grid.n()));
        }
        let magnitudes: Vec<f64> = grid.k_squared().iter().map(|k2| libm::sqrt(*k2)).collect();
        let reach = grid.max_kept_magnitude();
        let mut j_max = 0;
        while INNER_RADIUS * libm::ldexp(1.0, j_max + 1) < reach {
            j_max += 1;
        }
        let chi_samples = magnitudes.iter().map(|&r| chi(r)).collect();
        let phi_samples = (0..=j_max)
            .map(|j| magnitudes.iter().map(|&r| phi(scaled(r, j))).collect())
            .collect();
        Ok(Self {
            grid: grid.clone(),
            magnitudes,
            chi: chi_samples,
            phi: phi_samples,
            j_max,
        })
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// Top nonhomogeneous block index.
    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Lowest homogeneous block that meets the nonzero lattice (`|k| ≥ 1`).
    pub fn j_min_homogeneous(&self) -> i32 {
        let mut j = 0;
        while 8.0 / 3.0 * libm::ldexp(1.0, j - 1) >= 1.0 {
            j -= 1;
        }
        j
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// `φ(2^{-j}·)` on the lattice for `0 ≤ j ≤ j_max`.
    pub fn phi(&self, j: i32) -> Option<&[f64]> {
        if j < 0 {
            return None;
        }
        self.phi.get(j as usize).map(Vec::as_slice)
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Symbol of the nonhomogeneous block `Δ_j` (`None` when `j > j_max`).
    /// Blocks with `j ≤ −2` have the zero symbol.
    pub fn block_symbol(&self, j: i32) -> Option<Vec<f64>> {
        match j {
            j if j <= -2 => Some(vec![0.0; self.grid.len()]),
            -1 => Some(self.chi.clone()),
            j => self.phi(j).map(<[f64]>::to_vec),
        }
    }

    fn block_symbol_ref(&self, j: i32) -> Option<&[f64]> {
        match j {
            -1 => Some(&self.chi),
            j => self.phi(j),
        }
    }

    /// Symbol of `Δ̇_j`, `φ(2^{-j}ξ)`, for any integer `j`.
    pub fn homogeneous_symbol(&self, j: i32) -> Vec<f64> {
        self.magnitudes.iter().map(|&r| phi(scaled(r, j))).collect()
    }

    /// Symbol of `S_j`, `χ(2^{-j}ξ)` for `j ≥ 0` and zero below.
    pub fn low_pass_symbol(&self, j: i32) -> Vec<f64> {
        if j < 0 {
            return vec![0.0; self.grid.len()];
        }
        self.magnitudes.iter().map(|&r| chi(scaled(r, j))).collect()
    }

    /// Largest `|χ + Σ_j φ_j − 1|` over lattice points with `|ξ| ≤ radius`.
    pub fn partition_residual(&self, radius: f64) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.magnitudes[i] <= radius)
            .map(|i| {
                let total = self.chi[i] + self.phi.iter().map(|p| p[i]).sum::<f64>();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Nonhomogeneous block `Δ_j f`: zero for `j ≤ −2`, `χ` for `j = −1`,
    /// `φ(2^{-j}·)` up to `j_max`.
    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField, LpError> {
        if j > self.j_max {
            return Err(LpError::BlockOutOfRange {
                j,
                j_max: self.j_max,
            });
        }
        if j <= -2 {
            return Ok(SpectralField::zeros(f.grid()));
        }
        Ok(f.apply_symbol(self.block_symbol_ref(j).expect("index checked")))
    }

    /// Homogeneous block `Δ̇_j f` for any integer `j`.
    pub fn homogeneous_block(&self, f: &SpectralField, j: i32) -> SpectralField {
        f.apply_symbol(&self.homogeneous_symbol(j))
    }

    /// Low-frequency cut-off `S_j f`.
    pub fn low_pass(&self, f: &SpectralField, j: i32) -> SpectralField {
        if j < 0 {
            return SpectralField::zeros(f.grid());
        }
        f.apply_symbol(&self.low_pass_symbol(j))
    }

    /// Block range used by norms: `(−1, j_max)` or the homogeneous range.
    pub fn block_range(&self, homogeneous: bool) -> (i32, i32) {
        if homogeneous {
            (self.j_min_homogeneous(), self.j_max)
        } else {
            (-1, self.j_max)
        }
    }

    /// Symbol for block `j` in either mode.
    pub(crate) fn symbol_for(&self, j: i32, homogeneous: bool) -> Vec<f64> {
        if homogeneous {
            self.homogeneous_symbol(j)
        } else {
            self.block_symbol(j)
                .unwrap_or_else(|| vec![0.0; self.grid.len()])
        }
    }

    pub fn decompose(&self, f: &SpectralField, homogeneous: bool) -> LPDecomposition {
        let (lo, hi) = self.block_range(homogeneous);
        let blocks = (lo..=hi)
            .map(|j| f.apply_symbol(&self.symbol_for(j, homogeneous)))
            .collect();
        LPDecomposition {
            first: lo,
            blocks,
            homogeneous,
        }
    }
}

/// `Δ_j f` through [`LPFilterBank::block`].
pub fn dyadic_block(
    f: &SpectralField,
    j: i32,
    bank: &LPFilterBank,
) -> Result<SpectralField, LpError> {
    bank.block(f, j)
}

/// `S_j f` through [`LPFilterBank::low_pass`].
pub fn low_pass(f: &SpectralField, j: i32, bank: &LPFilterBank) -> SpectralField {
    bank.low_pass(f, j)
}

/// Dyadic blocks of one field, starting at index `first`.
#[derive(Debug, Clone)]
pub struct LPDecomposition {
    pub first: i32,
    pub blocks: Vec<SpectralField>,
    pub homogeneous: bool,
}

impl LPDecomposition {
    pub fn block(&self, j: i32) -> Option<&SpectralField> {
        if j < self.first {
            return None;
        }
        self.blocks.get((j - self.first) as usize)
    }

    /// `Σ_j Δ_j f`.
    pub fn reconstruct(&self) -> SpectralField {
        let mut acc = SpectralField::zeros(self.blocks[0].grid());
        for b in &self.blocks {
            acc = acc.axpy(1.0, b).expect("blocks share a grid");
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    // Independent closed form of the ramp at one point: with t = (4/3 − r)/(7/12),
    // g(t) = 1 / (1 + exp(1/t − 1/(1 − t))).
    fn ramp_closed_form(r: f64) -> f64 {
        let t = (4.0 / 3.0 - r) / (7.0 / 12.0);
        1.0 / (1.0 + libm::exp(1.0 / t - 1.0 / (1.0 - t)))
    }

    #[test]
    fn chi_profile_edges() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(chi(2.0), 0.0);
        for r in [0.8, 0.9, 1.0, 1.1, 1.25, 1.3] {
            assert!((chi(r) - ramp_closed_form(r)).abs() < 1e-15);
        }
        let mut prev = 1.0;
        for i in 0..200 {
            let v = chi(i as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn phi_at_twice_the_scale() {
        // φ(2) = χ(1) − χ(2) = χ(1); closed form 1/(1 + e^{-7/12})
        let expected = 1.0 / (1.0 + libm::exp(-7.0 / 12.0));
        assert!((expected - 0.641_834_045_088_731_1).abs() < 1e-12);
        let g = make_grid(2, 64).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        for j in 0..=2 {
            let k = 2 * (1 << j);
            let idx = g.index_of(&[k, 0]).unwrap();
            let v = bank.phi(j).unwrap()[idx];
            assert!(v > 0.0 && v <= 1.0);
            assert!((v - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn partition_support_and_adjacency() {
        let g = make_grid(2, 64).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        assert!(bank.partition_residual(21.0) < 1e-12);
        assert!(bank.partition_residual(g.max_kept_magnitude()) < 1e-12);
        assert_eq!(bank.chi()[0], 1.0);
        let mags = bank.magnitudes();
        for j in 0..=bank.j_max() {
            let phi_j = bank.phi(j).unwrap();
            let lo = 0.75 * libm::ldexp(1.0, j);
            let hi = 8.0 / 3.0 * libm::ldexp(1.0, j);
            for (i, &v) in phi_j.iter().enumerate() {
                if mags[i] < lo || mags[i] > hi {
                    assert_eq!(v, 0.0);
                }
            }
            for jp in (j + 2)..=bank.j_max() {
                let other = bank.phi(jp).unwrap();
                assert!(phi_j.iter().zip(other).all(|(a, b)| a * b == 0.0));
            }
        }
    }

    #[test]
    fn j_max_covers_dealiased_lattice() {
        for (d, n, expected) in [(2, 8, 1), (2, 32, 4), (2, 64, 5), (3, 8, 2), (3, 16, 3)] {
            let g = make_grid(d, n).unwrap();
            assert_eq!(
                LPFilterBank::new(&g).unwrap().j_max(),
                expected,
                "d={d} n={n}"
            );
        }
        let g = make_grid(2, 64).unwrap();
        assert_eq!(LPFilterBank::new(&g).unwrap().j_min_homogeneous(), -1);
    }

    #[test]
    fn block_examples() {
        let g = make_grid(2, 64).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        // |k| = 6 = 1.5·2^2 sits where φ(2^{-2}·) ≡ 1
        let f = SpectralField::from_fn(&g, |x| libm::cos(6.0 * x[0]));
        let own = bank.block(&f, 2).unwrap();
        assert!((&own - &f).max_abs() < 1e-13);
        for j in [-1, 0, 4, 5] {
            assert!(bank.block(&f, j).unwrap().max_abs() < 1e-13);
        }
        assert_eq!(bank.block(&f, -2).unwrap().max_abs(), 0.0);
        assert!(matches!(
            bank.block(&f, 6),
            Err(LpError::BlockOutOfRange { j: 6, j_max: 5 })
        ));

        let c = SpectralField::constant(&g, 2.0);
        assert!((bank.block(&c, -1).unwrap().mean() - 2.0).abs() < 1e-15);
        for j in 0..=bank.j_max() {
            assert_eq!(bank.block(&c, j).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn low_pass_examples() {
        let g = make_grid(2, 64).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        let c = SpectralField::constant(&g, -1.5);
        assert!((&bank.low_pass(&c, 2) - &c).max_abs() < 1e-15);
        let j = 1;
        let f = SpectralField::from_fn(&g, |x| libm::cos(16.0 * x[1]));
        assert!(bank.low_pass(&f, j).max_abs() < 1e-13);
        assert_eq!(bank.low_pass(&f, -1).max_abs(), 0.0);
    }
}
