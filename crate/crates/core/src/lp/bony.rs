use alloc::vec;
use alloc::vec::Vec;

use super::filter::LPFilterBank;
use crate::error::{LpError, SpectralError};
use crate::field::{SpectralField, VectorField};
use crate::spectral::{advect, forward_dealiased};

fn check_grids(a: &SpectralField, b: &SpectralField, bank: &LPFilterBank) -> Result<(), LpError> {
    if !a.same_grid(b) || !a.same_grid_as(bank) {
        return Err(SpectralError::GridMismatch.into());
    }
    Ok(())
}

fn block_values(f: &SpectralField, bank: &LPFilterBank) -> Vec<Vec<f64>> {
    (-1..=bank.j_max())
        .map(|j| {
            bank.block(f, j)
                .expect("index in range")
                .values()
                .into_owned()
        })
        .collect()
}

fn accumulate(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o += x * y;
    }
}

fn finish(f: &SpectralField, values: &[f64]) -> SpectralField {
    SpectralField::from_coeffs_unchecked(f.grid(), forward_dealiased(f.grid(), values))
}

/// `T_u v = Σ_j S_{j−1}u · Δ_j v`, dealiased.
///
/// The inputs are read through their dealiased modes, so together with
/// [`remainder`] this splits the dealiased product exactly.
pub fn paraproduct(
    u: &SpectralField,
    v: &SpectralField,
    bank: &LPFilterBank,
) -> Result<SpectralField, LpError> {
    check_grids(u, v, bank)?;
    let u = u.dealiased();
    let v = v.dealiased();
    let mut acc = vec![0.0; u.grid().len()];
    for j in 1..=bank.j_max() {
        let low = bank.low_pass(&u, j - 1);
        let high = bank.block(&v, j)?;
        accumulate(&mut acc, &low.values(), &high.values());
    }
    Ok(finish(&u, &acc))
}

/// One paraproduct term `S_{j−1}u · Δ_j v`, dealiased.
pub fn paraproduct_term(
    u: &SpectralField,
    v: &SpectralField,
    j: i32,
    bank: &LPFilterBank,
) -> Result<SpectralField, LpError> {
    check_grids(u, v, bank)?;
    let high = bank.block(&v.dealiased(), j)?;
    let low = bank.low_pass(&u.dealiased(), j - 1);
    let values: Vec<f64> = low
        .values()
        .iter()
        .zip(high.values().iter())
        .map(|(a, b)| a * b)
        .collect();
    Ok(finish(u, &values))
}

/// `R(u, v) = Σ_{|j−j'|≤1} Δ_j u · Δ_{j'} v`, dealiased.
pub fn remainder(
    u: &SpectralField,
    v: &SpectralField,
    bank: &LPFilterBank,
) -> Result<SpectralField, LpError> {
    check_grids(u, v, bank)?;
    let ub = block_values(&u.dealiased(), bank);
    let vb = block_values(&v.dealiased(), bank);
    let last = ub.len();
    let mut acc = vec![0.0; u.grid().len()];
    let mut near = vec![0.0; u.grid().len()];
    for i in 0..last {
        near.iter_mut().for_each(|x| *x = 0.0);
        for k in i.saturating_sub(1)..(i + 2).min(last) {
            for (n, x) in near.iter_mut().zip(&vb[k]) {
                *n += x;
            }
        }
        accumulate(&mut acc, &ub[i], &near);
    }
    Ok(finish(u, &acc))
}

/// `[v·∇, Δ_j] f = v·∇(Δ_j f) − Δ_j(v·∇f)`, both products dealiased.
pub fn commutator_block(
    v: &VectorField,
    f: &SpectralField,
    j: i32,
    bank: &LPFilterBank,
) -> Result<SpectralField, LpError> {
    if !v.component(0).same_grid(f) || !f.same_grid_as(bank) {
        return Err(SpectralError::GridMismatch.into());
    }
    if j > bank.j_max() {
        return Err(LpError::BlockOutOfRange {
            j,
            j_max: bank.j_max(),
        });
    }
    if j <= -2 {
        return Ok(SpectralField::zeros(f.grid()));
    }
    let first = advect(v, &bank.block(f, j)?)?;
    let second = bank.block(&advect(v, f)?, j)?;
    Ok(&first - &second)
}
