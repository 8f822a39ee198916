use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::family::{solve_family, PerturbationFamily};
use super::unique::{strain_lower_bound_check, StrainLowerBound};
use super::{EstimateCheck, Verdict};
use crate::error::{Error, Result};
use crate::fields::{BoundaryTrace, LamePair, ScalarField};
use crate::fit::{power_fit, PowerFit};
use crate::norms::{boundary_sobolev_norm, linf_on_mask};
use crate::Point;

/// Per-scale outcome of the stability experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub scale: f64,
    /// `max_{∂Ω} |μ₁ − μ₂|`.
    pub eta: f64,
    /// `‖u − v‖_{L²(Ω)}`.
    pub l2_mismatch: f64,
    /// `C (η + ‖u − v‖^{1/4})` with the fitted integral-estimate constant.
    pub epsilon_sq: f64,
    /// `‖μ₁ − μ₂‖_{L∞(Ω_d)}`.
    pub linf_gap: f64,
    pub d: f64,
    pub fitted_delta: f64,
    pub fitted_n1: f64,
    pub fitted_n2: f64,
    /// `λ̄ = (N₁ ε² / 2Md)^{1/(N₂+1)}`.
    pub lambda_bar: f64,
    /// `λ̄ ≤ 1`: the bound `2 (N₁ε²)^δ (2Md)^{1−δ}` applies; otherwise `2M`.
    pub small_branch: bool,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct HolderOptions {
    /// Radii of the strain lower-bound fit, as fractions of `d`.
    pub radius_fractions: Vec<f64>,
}

impl Default for HolderOptions {
    fn default() -> Self {
        HolderOptions {
            radius_fractions: alloc::vec![0.125, 0.25, 0.375, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct HolderExperiment {
    pub family: PerturbationFamily,
    pub reports: Vec<StabilityReport>,
    /// `δ = 1/(N₂ + 1)`.
    pub fitted_delta: f64,
    pub n1: f64,
    pub n2: f64,
    /// Integral-estimate constant, the largest `LHS/RHS` over the family.
    pub c_lemma: f64,
    /// Where `|shape|` peaks on `Ω_d`.
    pub x0: Point,
    pub strain_bound: StrainLowerBound,
    /// `‖μ₁ − μ₂‖_{L∞(Ω_d)} ≈ A (ε²)^p` over the nonzero scales.
    pub observed: PowerFit,
}

impl HolderExperiment {
    /// Every scale within its bound and the observed rate at least `δ`.
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
            && self.fitted_delta > 0.0
            && self.fitted_delta <= 1.0
            && self.observed.exponent >= self.fitted_delta
    }

    pub fn checks(&self) -> Vec<EstimateCheck> {
        self.reports
            .iter()
            .map(|r| {
                let mut c = EstimateCheck::new("holder_stability", r.scale, r.linf_gap, r.bound);
                c.fitted_constant = 1.0;
                c.exponent = Some(r.fitted_delta);
                c.verdict = if r.epsilon_sq > 0.0 {
                    Verdict::from_bool(r.pass)
                } else {
                    Verdict::Skipped
                };
                c
            })
            .collect()
    }
}

/// `gap ≈ A x^p` in log-log coordinates.
pub fn fit_holder_rate(epsilon_sq: &[f64], gaps: &[f64]) -> Result<PowerFit> {
    power_fit(epsilon_sq, gaps)
}

/// Runs the stability experiment for `μ₂ = μ₁ + t · shape` over `scales`.
///
/// `N₂` is the exponent `K` of the strain lower bound fitted at the peak of
/// `|shape|`, and `N₁` the smallest value making `∫_{B_r} |∇̂u|² ≥ (r/d)^{N₂} / N₁`
/// hold on every fitted radius.
pub fn holder_stability_experiment(
    base: &LamePair,
    shape: &ScalarField,
    scales: &[f64],
    d: f64,
    g: &BoundaryTrace,
    options: &HolderOptions,
) -> Result<HolderExperiment> {
    let positive: Vec<f64> = scales.iter().copied().filter(|t| *t != 0.0).collect();
    let lo = positive
        .iter()
        .map(|t| t.abs())
        .fold(f64::INFINITY, f64::min);
    let hi = positive.iter().map(|t| t.abs()).fold(0.0, f64::max);
    if positive.len() < 2 || (hi / lo).log10() < 2.0 - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "stability experiment needs nonzero scales over 2 decades, got {scales:?}"
        )));
    }
    let family = solve_family(base, shape, g, scales, d)?;
    let (_, x0) = linf_on_mask(shape, &family.mask)?;
    let radii: Vec<f64> = options.radius_fractions.iter().map(|f| f * d).collect();
    let strain_bound =
        strain_lower_bound_check(&family.u, boundary_sobolev_norm(g, 0.5), x0, d, &radii)?;
    if strain_bound.k.is_nan() {
        return Err(Error::InvalidInput(
            "strain vanishes near the peak of the perturbation".into(),
        ));
    }
    let n2 = strain_bound.k;
    let n1 = strain_bound
        .energies
        .iter()
        .map(|&(r, e)| (r / d).powf(n2) / e)
        .fold(0.0, f64::max);
    let delta = 1.0 / (n2 + 1.0);
    let c_lemma = family
        .samples
        .iter()
        .filter(|s| s.lemma_rhs > 0.0)
        .map(|s| s.lemma_lhs / s.lemma_rhs)
        .fold(0.0, f64::max);
    let m = base.m_bound;
    let reports: Vec<StabilityReport> = family
        .samples
        .iter()
        .map(|s| {
            let eps2 = c_lemma * s.lemma_rhs;
            let lambda_bar = (n1 * eps2 / (2.0 * m * d)).powf(delta);
            let small_branch = lambda_bar <= 1.0;
            let bound = if small_branch {
                2.0 * (n1 * eps2).powf(delta) * (2.0 * m * d).powf(1.0 - delta)
            } else {
                2.0 * m
            };
            StabilityReport {
                scale: s.scale,
                eta: s.eta,
                l2_mismatch: s.l2_mismatch,
                epsilon_sq: eps2,
                linf_gap: s.linf_gap,
                d,
                fitted_delta: delta,
                fitted_n1: n1,
                fitted_n2: n2,
                lambda_bar,
                small_branch,
                bound,
                pass: s.linf_gap <= bound,
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = reports
        .iter()
        .filter(|r| r.epsilon_sq > 0.0 && r.linf_gap > 0.0)
        .map(|r| (r.epsilon_sq, r.linf_gap))
        .unzip();
    let observed = fit_holder_rate(&xs, &ys)?;
    Ok(HolderExperiment {
        family,
        reports,
        fitted_delta: delta,
        n1,
        n2,
        c_lemma,
        x0,
        strain_bound,
        observed,
    })
}
