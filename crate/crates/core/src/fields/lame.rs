use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ScalarField;
use crate::error::{Error, Result};
use crate::Point;

/// Lamé coefficients together with their a-priori bounds
/// `μ ≥ α₀`, `2μ + 2λ ≥ β₀` and `‖μ‖_{C^{0,1}} + ‖λ‖_{C^{0,1}} ≤ M`.
#[derive(Debug, Clone)]
pub struct LamePair {
    pub lambda: ScalarField,
    pub mu: ScalarField,
    pub alpha0: f64,
    pub beta0: f64,
    pub m_bound: f64,
}

impl LamePair {
    pub fn new(
        lambda: ScalarField,
        mu: ScalarField,
        alpha0: f64,
        beta0: f64,
        m_bound: f64,
    ) -> Result<Self> {
        if !Arc::ptr_eq(lambda.mesh(), mu.mesh()) {
            return Err(Error::MeshMismatch);
        }
        Ok(LamePair {
            lambda,
            mu,
            alpha0,
            beta0,
            m_bound,
        })
    }

    /// Same `λ` and bounds, different `μ`.
    pub fn with_mu(&self, mu: ScalarField) -> Result<Self> {
        Self::new(
            self.lambda.clone(),
            mu,
            self.alpha0,
            self.beta0,
            self.m_bound,
        )
    }
}

/// One inequality of [`validate_lame`].
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub pass: bool,
    /// The smallest slack-side value (for the lower bounds) or the total
    /// norm (for the `M` bound).
    pub worst_value: f64,
    pub threshold: f64,
    pub worst_dof: Option<usize>,
    pub worst_point: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LameReport {
    pub checks: Vec<InequalityCheck>,
    pub sup_sum: f64,
    pub lipschitz_sum: f64,
}

impl LameReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Space dimension entering `2μ + nλ`.
const N: f64 = 2.0;

/// Checks the ellipticity and regularity bounds at every degree of freedom.
pub fn validate_lame(pair: &LamePair) -> LameReport {
    let (lambda, mu) = if pair.lambda.degree() == pair.mu.degree() {
        (pair.lambda.clone(), pair.mu.clone())
    } else {
        (pair.lambda.to_degree2(), pair.mu.to_degree2())
    };
    let argmin = |f: &dyn Fn(usize) -> f64| {
        (0..mu.dof_count())
            .map(|i| (i, f(i)))
            .fold((0usize, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    };
    let (i_mu, mu_min) = argmin(&|i| mu.values()[i]);
    let (i_cv, conv_min) = argmin(&|i| 2.0 * mu.values()[i] + N * lambda.values()[i]);
    let sup_sum = mu.sup_norm() + lambda.sup_norm();
    let lipschitz_sum = mu.lipschitz_bound() + lambda.lipschitz_bound();
    let checks = alloc::vec![
        InequalityCheck {
            name: "mu_lower_bound",
            pass: pair.alpha0 > 0.0 && mu_min >= pair.alpha0,
            worst_value: mu_min,
            threshold: pair.alpha0,
            worst_dof: Some(i_mu),
            worst_point: Some(mu.dof_point(i_mu)),
        },
        InequalityCheck {
            name: "strong_convexity",
            pass: pair.beta0 > 0.0 && conv_min >= pair.beta0,
            worst_value: conv_min,
            threshold: pair.beta0,
            worst_dof: Some(i_cv),
            worst_point: Some(mu.dof_point(i_cv)),
        },
        InequalityCheck {
            name: "lipschitz_norm",
            pass: sup_sum + lipschitz_sum <= pair.m_bound,
            worst_value: sup_sum + lipschitz_sum,
            threshold: pair.m_bound,
            worst_dof: None,
            worst_point: None,
        },
    ];
    LameReport {
        checks,
        sup_sum,
        lipschitz_sum,
    }
}
