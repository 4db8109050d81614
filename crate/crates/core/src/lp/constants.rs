//! Empirical constants of the paraproduct, product, transport, pressure and
//! commutator estimates: sample fields, evaluate `LHS / RHS`, and compare
//! the worst ratio across two resolutions.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::besov::{besov_norm, sequence_norm, BesovIndex};
use super::bony::{commutator_block, paraproduct, remainder};
use super::filter::LPFilterBank;
use crate::error::LpError;
use crate::exec::Executor;
use crate::field::{SpectralField, VectorField};
use crate::grid::{make_grid, TorusGrid};
use crate::spectral::{
    advect, gradient, gradient_sup, lp_norm_values, norm_of, pressure_gradient, product,
};

/// Which estimate a trial evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    /// `‖T_u v‖_{B^s} ≤ C ‖u‖_∞ ‖v‖_{B^s}`.
    Paraproduct,
    /// `‖R(u,v)‖_{B^s} ≤ C ‖u‖_∞ ‖v‖_{B^s}`, `s > 0`.
    Remainder,
    /// `‖uv‖_{B^s} ≤ C (‖u‖_∞ ‖v‖_{B^s} + ‖v‖_∞ ‖u‖_{B^s})`, `s > 0`.
    Product,
    /// `‖u·∇f‖_{B^{σ−1}} ≤ C ‖u‖_{B^{σ−1}} ‖f‖_{B^σ}` for divergence-free `u`.
    Advection,
    /// `‖∇(−Δ)^{-1}div(u·∇v)‖_{B^σ} ≤ C (‖u‖_{C^{0,1}} ‖v‖_{B^σ} + ‖v‖_{C^{0,1}} ‖u‖_{B^σ})`.
    PressureLipschitz,
    /// `‖∇(−Δ)^{-1}div(u·∇v)‖_{B^{σ−1}} ≤ C min(‖u‖_{B^{σ−1}} ‖v‖_{B^σ}, ‖v‖_{B^{σ−1}} ‖u‖_{B^σ})`.
    PressureLow,
    /// `‖(2^{jσ} ‖[v·∇, Δ_j] f‖_{L^p})_j‖_{ℓ^r}` against the three-branch bound.
    Commutator,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::Paraproduct,
        InequalityId::Remainder,
        InequalityId::Product,
        InequalityId::Advection,
        InequalityId::PressureLipschitz,
        InequalityId::PressureLow,
        InequalityId::Commutator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Paraproduct => "paraproduct",
            InequalityId::Remainder => "remainder",
            InequalityId::Product => "product",
            InequalityId::Advection => "advection",
            InequalityId::PressureLipschitz => "pressure-lipschitz",
            InequalityId::PressureLow => "pressure-low",
            InequalityId::Commutator => "commutator",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = LpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or(LpError::InvalidIndex("unknown inequality id"))
    }
}

/// An estimate together with the Besov index it is measured in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub id: InequalityId,
    pub index: BesovIndex,
}

impl Inequality {
    /// Indices used by default: `(1.5, 2, 2)` for the product family, the
    /// admissible `(d/2 + 1.5, 2, 2)` for transport and pressure, and the
    /// endpoint `(1 + d/2, 2, 1)` for the commutator.
    pub fn default_for(id: InequalityId, dim: usize) -> Self {
        let half = dim as f64 / 2.0;
        let index = match id {
            InequalityId::Paraproduct | InequalityId::Remainder | InequalityId::Product => {
                BesovIndex::sobolev(1.5)
            }
            InequalityId::Advection
            | InequalityId::PressureLipschitz
            | InequalityId::PressureLow => BesovIndex::sobolev(half + 1.5),
            InequalityId::Commutator => BesovIndex {
                s: 1.0 + half,
                p: 2.0,
                r: 1.0,
            },
        };
        Self { id, index }
    }

    /// Hypotheses on the index that the estimate needs.
    pub fn check(&self, dim: usize) -> Result<(), LpError> {
        let idx = &self.index;
        match self.id {
            InequalityId::Paraproduct => Ok(()),
            InequalityId::Remainder | InequalityId::Product if idx.s > 0.0 => Ok(()),
            InequalityId::Remainder | InequalityId::Product => {
                Err(LpError::InvalidIndex("estimate needs s > 0"))
            }
            InequalityId::Advection
            | InequalityId::PressureLipschitz
            | InequalityId::PressureLow => {
                if idx.admissible(dim) {
                    Ok(())
                } else {
                    Err(LpError::InvalidIndex("estimate needs an admissible index"))
                }
            }
            InequalityId::Commutator => {
                let q = 1.0 / idx.p;
                if idx.s > -(dim as f64) * (1.0 - q).min(q) {
                    Ok(())
                } else {
                    Err(LpError::InvalidIndex(
                        "commutator needs s > -d min(1 - 1/p, 1/p)",
                    ))
                }
            }
        }
    }
}

/// Source of random trial fields. `slot` distinguishes the independent
/// fields a single trial needs.
pub trait FieldSampler: Sync {
    fn scalar(&self, grid: &Arc<TorusGrid>, trial: usize, slot: usize) -> SpectralField;
    fn solenoidal(&self, grid: &Arc<TorusGrid>, trial: usize, slot: usize) -> VectorField;
}

/// One trial outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub inequality_id: InequalityId,
    pub trial: usize,
    pub n: usize,
    pub ratio: f64,
}

/// Per-trial ratios at two resolutions plus trials skipped for a zero
/// right-hand side, as `(n, trial)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantReport {
    pub rows: Vec<ConstantRow>,
    pub skipped: Vec<(usize, usize)>,
}

impl ConstantReport {
    pub fn resolutions(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn max_ratio(&self, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.ratio)
            .fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r))))
    }

    /// Largest over smallest per-resolution max ratio (1 when stable).
    pub fn resolution_change(&self) -> f64 {
        let maxima: Vec<f64> = self
            .resolutions()
            .into_iter()
            .filter_map(|n| self.max_ratio(n))
            .collect();
        let hi = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
        if maxima.is_empty() || lo <= 0.0 {
            return f64::INFINITY;
        }
        hi / lo
    }
}

fn nonhomogeneous(
    f: &(impl crate::field::Components + ?Sized),
    idx: &BesovIndex,
    bank: &LPFilterBank,
) -> f64 {
    besov_norm(f, idx, bank, false).expect("trial fields share the bank grid")
}

fn sup(f: &(impl crate::field::Components + ?Sized)) -> f64 {
    norm_of(f, f64::INFINITY).expect("p = ∞ is valid")
}

/// `‖(2^{jσ} ‖[v·∇, Δ_j] f‖_{L^p})_{j ≥ −1}‖_{ℓ^r}`.
pub fn commutator_norm(
    v: &VectorField,
    f: &SpectralField,
    idx: &BesovIndex,
    bank: &LPFilterBank,
) -> Result<f64, LpError> {
    let grid = f.grid();
    let mut terms = Vec::new();
    for j in -1..=bank.j_max() {
        let block = commutator_block(v, f, j, bank)?;
        terms.push(
            libm::exp2(j as f64 * idx.s)
                * lp_norm_values(&block.values(), grid.cell_volume(), idx.p),
        );
    }
    Ok(sequence_norm(&terms, idx.r))
}

/// Right-hand side factor of the commutator estimate, chosen by the branch
/// the index falls in (without the common `‖f‖_{B^σ}` factor).
pub fn commutator_velocity_factor(v: &VectorField, idx: &BesovIndex, bank: &LPFilterBank) -> f64 {
    let dim = v.dim();
    let grad: Vec<SpectralField> = v
        .components()
        .iter()
        .flat_map(|c| gradient(c).into_components())
        .collect();
    let dp = idx.scaling(dim);
    let critical = 1.0 + dp;
    if idx.s < critical - 1e-12 {
        let b = BesovIndex {
            s: dp,
            p: idx.p,
            r: f64::INFINITY,
        };
        nonhomogeneous(&grad, &b, bank) + gradient_sup(v)
    } else if (idx.s - critical).abs() <= 1e-12 && idx.r > 1.0 {
        let b = BesovIndex {
            s: dp + 1.0,
            p: idx.p,
            r: f64::INFINITY,
        };
        nonhomogeneous(&grad, &b, bank)
    } else {
        nonhomogeneous(&grad, &idx.with_s(idx.s - 1.0), bank)
    }
}

/// `(LHS, RHS)` of one estimate on one trial.
pub fn evaluate(
    ineq: &Inequality,
    sampler: &dyn FieldSampler,
    grid: &Arc<TorusGrid>,
    bank: &LPFilterBank,
    trial: usize,
) -> Result<(f64, f64), LpError> {
    let idx = &ineq.index;
    let low = idx.with_s(idx.s - 1.0);
    Ok(match ineq.id {
        InequalityId::Paraproduct | InequalityId::Remainder => {
            let u = sampler.scalar(grid, trial, 0);
            let v = sampler.scalar(grid, trial, 1);
            let lhs = if ineq.id == InequalityId::Paraproduct {
                paraproduct(&u, &v, bank)?
            } else {
                remainder(&u, &v, bank)?
            };
            (
                nonhomogeneous(&lhs, idx, bank),
                sup(&u) * nonhomogeneous(&v, idx, bank),
            )
        }
        InequalityId::Product => {
            let u = sampler.scalar(grid, trial, 0);
            let v = sampler.scalar(grid, trial, 1);
            let uv = product(&u, &v)?;
            let rhs =
                sup(&u) * nonhomogeneous(&v, idx, bank) + sup(&v) * nonhomogeneous(&u, idx, bank);
            (nonhomogeneous(&uv, idx, bank), rhs)
        }
        InequalityId::Advection => {
            let u = sampler.solenoidal(grid, trial, 0);
            let f = sampler.scalar(grid, trial, 1);
            let lhs = advect(&u, &f)?;
            (
                nonhomogeneous(&lhs, &low, bank),
                nonhomogeneous(&u, &low, bank) * nonhomogeneous(&f, idx, bank),
            )
        }
        InequalityId::PressureLipschitz => {
            let u = sampler.solenoidal(grid, trial, 0);
            let v = sampler.solenoidal(grid, trial, 1);
            let p = pressure_gradient(&u, &v)?;
            let lip = |w: &VectorField| sup(w) + gradient_sup(w);
            let rhs =
                lip(&u) * nonhomogeneous(&v, idx, bank) + lip(&v) * nonhomogeneous(&u, idx, bank);
            (nonhomogeneous(&p, idx, bank), rhs)
        }
        InequalityId::PressureLow => {
            let u = sampler.solenoidal(grid, trial, 0);
            let v = sampler.solenoidal(grid, trial, 1);
            let p = pressure_gradient(&u, &v)?;
            let a = nonhomogeneous(&u, &low, bank) * nonhomogeneous(&v, idx, bank);
            let b = nonhomogeneous(&v, &low, bank) * nonhomogeneous(&u, idx, bank);
            (nonhomogeneous(&p, &low, bank), a.min(b))
        }
        InequalityId::Commutator => {
            let v = sampler.solenoidal(grid, trial, 0);
            let f = sampler.scalar(grid, trial, 1);
            let lhs = commutator_norm(&v, &f, idx, bank)?;
            (
                lhs,
                commutator_velocity_factor(&v, idx, bank) * nonhomogeneous(&f, idx, bank),
            )
        }
    })
}

/// Runs `trials` trials at `base_n` and `2·base_n` in dimension `dim`.
pub fn empirical_constant<E: Executor>(
    exec: &E,
    ineq: &Inequality,
    sampler: &dyn FieldSampler,
    trials: usize,
    dim: usize,
    base_n: usize,
) -> Result<ConstantReport, LpError> {
    ineq.check(dim)?;
    let mut report = ConstantReport::default();
    for n in [base_n, 2 * base_n] {
        let grid = make_grid(dim, n)?;
        let bank = LPFilterBank::new(&grid)?;
        let results = exec.map((0..trials).collect(), |trial| {
            evaluate(ineq, sampler, &grid, &bank, trial).map(|pair| (trial, pair))
        });
        for result in results {
            let (trial, (lhs, rhs)) = result?;
            if rhs > 0.0 && rhs.is_finite() {
                report.rows.push(ConstantRow {
                    inequality_id: ineq.id,
                    trial,
                    n,
                    ratio: lhs / rhs,
                });
            } else {
                report.skipped.push((n, trial));
            }
        }
    }
    Ok(report)
}
