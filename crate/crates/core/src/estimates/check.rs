use alloc::string::String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    /// A precondition did not hold (for example zero energy on the inner
    /// ball); nothing was asserted.
    Skipped,
    /// Used to fit the constant, so not judged.
    Calibration,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
            Verdict::Calibration => "calibration",
        }
    }
}

/// One evaluated inequality `lhs ≤ fitted_constant · rhs_unscaled`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateCheck {
    pub name: String,
    pub experiment_id: String,
    /// The swept parameter (scale, radius, center index, ...).
    pub param: f64,
    pub lhs: f64,
    pub rhs_unscaled: f64,
    pub fitted_constant: f64,
    pub exponent: Option<f64>,
    pub verdict: Verdict,
}

impl EstimateCheck {
    pub fn new(name: &str, param: f64, lhs: f64, rhs_unscaled: f64) -> Self {
        EstimateCheck {
            name: name.into(),
            experiment_id: String::new(),
            param,
            lhs,
            rhs_unscaled,
            fitted_constant: f64::NAN,
            exponent: None,
            verdict: Verdict::Skipped,
        }
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.experiment_id = id.into();
        self
    }

    /// `lhs / rhs_unscaled`; zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs_unscaled
        }
    }

    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Sets the verdict from `lhs ≤ factor · fitted_constant · rhs_unscaled`.
    pub(crate) fn judge(mut self, constant: f64, factor: f64) -> Self {
        self.fitted_constant = constant;
        self.verdict = Verdict::from_bool(self.lhs <= factor * constant * self.rhs_unscaled);
        self
    }
}
