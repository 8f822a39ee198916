use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::Point;

/// A disk where the phantom departs from its background by `contrast`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inclusion {
    pub center: Point,
    pub radius: f64,
    pub contrast: f64,
}

/// Smooth piecewise-constant coefficient: a background plus disk inclusions
/// whose edges are blended over `mollification_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub background: f64,
    pub inclusions: Vec<Inclusion>,
    pub mollification_width: f64,
    /// Values are clamped from below at this level when set.
    pub floor: Option<f64>,
}

impl PhantomSpec {
    pub fn constant(background: f64) -> Self {
        PhantomSpec {
            background,
            inclusions: Vec::new(),
            mollification_width: 1.0,
            floor: None,
        }
    }

    /// Analytic value at `p`, before any clamping.
    pub fn value(&self, p: Point) -> f64 {
        let w = self.mollification_width;
        self.background
            + self
                .inclusions
                .iter()
                .map(|inc| {
                    let rho = (p[0] - inc.center[0]).hypot(p[1] - inc.center[1]);
                    inc.contrast * (1.0 - ramp((rho - inc.radius) / w))
                })
                .sum::<f64>()
    }

    /// Upper bound on the Lipschitz constant of [`PhantomSpec::value`] near `p`.
    fn slope_bound_at(&self, p: Point) -> f64 {
        let w = self.mollification_width;
        self.inclusions
            .iter()
            .filter(|inc| {
                let rho = (p[0] - inc.center[0]).hypot(p[1] - inc.center[1]);
                rho >= inc.radius - w && rho <= inc.radius + 2.0 * w
            })
            .map(|inc| inc.contrast.abs())
            .sum::<f64>()
            * RAMP_MAX_SLOPE
            / w
    }
}

/// Fraction of the ramp spent accelerating (and decelerating).
pub const RAMP_EASE: f64 = 0.05;

/// Largest derivative of [`ramp`].
pub const RAMP_MAX_SLOPE: f64 = 1.0 / (1.0 - RAMP_EASE);

/// `C²` ramp from 0 (for `s ≤ 0`) to 1 (for `s ≥ 1`). Its derivative is
/// flat at `1/(1 − a)` except on the ends of width `a = RAMP_EASE`, where it
/// follows a cubic smoothstep.
pub fn ramp(s: f64) -> f64 {
    let a = RAMP_EASE;
    let k = RAMP_MAX_SLOPE;
    let head = |s: f64| {
        let x = s / a;
        k * a * (x * x * x - 0.5 * x * x * x * x)
    };
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else if s < a {
        head(s)
    } else if s <= 1.0 - a {
        k * (0.5 * a + (s - a))
    } else {
        1.0 - head(1.0 - s)
    }
}

/// A sampled phantom and the warnings raised while building it.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub field: ScalarField,
    pub warnings: Vec<String>,
}

/// Samples `spec` at the P1 nodes of `mesh`.
pub fn make_phantom(mesh: Arc<TriMesh>, spec: &PhantomSpec) -> Result<Phantom> {
    make_phantom_with_degree(mesh, spec, 1)
}

/// Samples `spec` at the degree-`degree` nodes of `mesh`.
pub fn make_phantom_with_degree(
    mesh: Arc<TriMesh>,
    spec: &PhantomSpec,
    degree: u8,
) -> Result<Phantom> {
    let w = spec.mollification_width;
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "mollification width must be positive, got {w}"
        )));
    }
    let mut warnings = Vec::new();
    for (i, inc) in spec.inclusions.iter().enumerate() {
        if !(inc.radius >= 0.0) || !inc.contrast.is_finite() {
            return Err(Error::InvalidInput(alloc::format!(
                "inclusion {i} is malformed"
            )));
        }
        if mesh.domain().distance_to_boundary(inc.center) <= inc.radius {
            return Err(Error::InvalidInput(alloc::format!(
                "inclusion {i} is not inside the domain"
            )));
        }
    }
    if !spec.inclusions.is_empty() && w < 2.0 * mesh.h_max() {
        warnings.push(alloc::format!(
            "mollification width {w} is below twice the mesh size {}",
            mesh.h_max()
        ));
    }
    for (i, a) in spec.inclusions.iter().enumerate() {
        for (j, b) in spec.inclusions.iter().enumerate().skip(i + 1) {
            let gap = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
            if a.contrast * b.contrast < 0.0 && gap < a.radius + b.radius + 2.0 * w {
                warnings.push(alloc::format!(
                    "inclusions {i} and {j} overlap with opposite contrasts"
                ));
            }
        }
    }
    let n = if degree == 2 {
        mesh.node_count()
    } else {
        mesh.vertex_count()
    };
    let mut clamped = 0usize;
    let mut slope = 0.0f64;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let p = mesh.node_point(i);
            slope = slope.max(spec.slope_bound_at(p));
            let v = spec.value(p);
            match spec.floor {
                Some(f) if v < f => {
                    clamped += 1;
                    f
                }
                _ => v,
            }
        })
        .collect();
    if clamped > 0 {
        warnings.push(alloc::format!("{clamped} values clamped to the floor"));
    }
    let field = ScalarField::from_values(mesh, degree, values)?.with_lipschitz_bound(slope);
    Ok(Phantom { field, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, DomainSpec};

    #[test]
    fn ramp_is_monotone_with_bounded_slope() {
        let n = 100_000;
        let mut prev = ramp(0.0);
        let mut max_slope = 0.0f64;
        for i in 1..=n {
            let s = i as f64 / n as f64;
            let v = ramp(s);
            assert!(v >= prev);
            max_slope = max_slope.max((v - prev) * n as f64);
            prev = v;
        }
        assert!((prev - 1.0).abs() < 1e-15);
        assert!(max_slope <= RAMP_MAX_SLOPE + 1e-9);
        assert!(max_slope > RAMP_MAX_SLOPE - 1e-3);
        // continuity of the pieces
        for s in [RAMP_EASE, 1.0 - RAMP_EASE] {
            assert!((ramp(s - 1e-12) - ramp(s + 1e-12)).abs() < 1e-10);
        }
    }

    #[test]
    fn no_inclusions_is_constant() {
        let mesh = Arc::new(build_mesh(DomainSpec::unit_disk(), 0.2).unwrap());
        let p = make_phantom(mesh, &PhantomSpec::constant(1.0)).unwrap();
        assert_eq!(p.field.value_bounds(), (1.0, 1.0));
        assert_eq!(p.field.lipschitz_bound(), 0.0);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn inclusion_outside_domain_is_rejected() {
        let mesh = Arc::new(build_mesh(DomainSpec::unit_disk(), 0.2).unwrap());
        let spec = PhantomSpec {
            background: 1.0,
            inclusions: alloc::vec![Inclusion {
                center: [0.9, 0.0],
                radius: 0.2,
                contrast: 1.0
            }],
            mollification_width: 0.1,
            floor: None,
        };
        assert!(make_phantom(mesh, &spec).is_err());
    }
}
