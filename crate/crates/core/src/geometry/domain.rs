use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::GAUSS_LEGENDRE_8;
use crate::Point;

/// Shape of a smooth convex domain centred at the origin. Shape parameters
/// are dimensionless multiples of [`DomainSpec::scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// Disk of radius `scale`.
    UnitDisk,
    /// Ellipse with semi-axes `a * scale` (along x) and `b * scale`.
    Ellipse { a: f64, b: f64 },
    /// Square of half-width `scale` whose corners are replaced by quarter
    /// circles of radius `corner_radius * scale`, `0 < corner_radius <= 1`.
    SmoothedSquare { corner_radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub scale: f64,
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec {
            kind: DomainKind::UnitDisk,
            scale: 1.0,
        }
    }
}

const ELLIPSE_PANELS: usize = 512;

#[derive(Debug, Clone)]
enum Curve {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        // cumulative arclength at the panel ends of the parametric angle
        cumulative: Vec<f64>,
    },
    RoundedSquare {
        half_width: f64,
        radius: f64,
    },
}

/// A validated domain with a `C^{1,1}` boundary and an arclength
/// parametrization `s ↦ γ(s)` of its boundary, counter-clockwise from the
/// point on the positive x axis.
#[derive(Debug, Clone)]
pub struct Domain {
    spec: DomainSpec,
    curve: Curve,
    perimeter: f64,
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        if !(spec.scale.is_finite() && spec.scale > 0.0) {
            return Err(Error::InvalidInput(alloc::format!(
                "domain scale must be positive, got {}",
                spec.scale
            )));
        }
        let curve = match spec.kind {
            DomainKind::UnitDisk => Curve::Circle { radius: spec.scale },
            DomainKind::Ellipse { a, b } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidInput(alloc::format!(
                        "ellipse semi-axes must be positive, got ({a}, {b})"
                    )));
                }
                let (a, b) = (a * spec.scale, b * spec.scale);
                Curve::Ellipse {
                    a,
                    b,
                    cumulative: ellipse_table(a, b),
                }
            }
            DomainKind::SmoothedSquare { corner_radius } => {
                if corner_radius.is_nan() || corner_radius <= 0.0 {
                    return Err(Error::NonSmoothBoundary(alloc::format!(
                        "smoothed square needs a positive corner radius, got {corner_radius}"
                    )));
                }
                if corner_radius > 1.0 {
                    return Err(Error::InvalidInput(alloc::format!(
                        "corner radius {corner_radius} exceeds the half-width"
                    )));
                }
                Curve::RoundedSquare {
                    half_width: spec.scale,
                    radius: corner_radius * spec.scale,
                }
            }
        };
        let perimeter = match &curve {
            Curve::Circle { radius } => TAU * radius,
            Curve::Ellipse { cumulative, .. } => *cumulative.last().unwrap(),
            Curve::RoundedSquare { half_width, radius } => {
                8.0 * (half_width - radius) + TAU * radius
            }
        };
        Ok(Domain {
            spec,
            curve,
            perimeter,
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn scale(&self) -> f64 {
        self.spec.scale
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Exact area `|Ω|`.
    pub fn area(&self) -> f64 {
        match &self.curve {
            Curve::Circle { radius } => PI * radius * radius,
            Curve::Ellipse { a, b, .. } => PI * a * b,
            Curve::RoundedSquare { half_width, radius } => {
                4.0 * half_width * half_width - (4.0 - PI) * radius * radius
            }
        }
    }

    /// Largest distance from the origin to the boundary.
    pub fn max_extent(&self) -> f64 {
        match &self.curve {
            Curve::Circle { radius } => *radius,
            Curve::Ellipse { a, b, .. } => a.max(*b),
            Curve::RoundedSquare { half_width, radius } => {
                let e = half_width - radius;
                e * core::f64::consts::SQRT_2 + radius
            }
        }
    }

    /// Radius of the largest inscribed disk.
    pub fn inradius(&self) -> f64 {
        match &self.curve {
            Curve::Circle { radius } => *radius,
            Curve::Ellipse { a, b, .. } => a.min(*b),
            Curve::RoundedSquare { half_width, .. } => *half_width,
        }
    }

    /// Bound `M₀` on the boundary curvature.
    pub fn curvature_bound(&self) -> f64 {
        match &self.curve {
            Curve::Circle { radius } => 1.0 / radius,
            Curve::Ellipse { a, b, .. } => (a / (b * b)).max(b / (a * a)),
            Curve::RoundedSquare { radius, .. } => 1.0 / radius,
        }
    }

    /// Boundary point at arclength `s` (taken modulo the perimeter).
    pub fn point_at(&self, s: f64) -> Point {
        let s = crate::wrap(s, self.perimeter);
        match &self.curve {
            Curve::Circle { radius } => {
                let t = s / radius;
                [radius * t.cos(), radius * t.sin()]
            }
            Curve::Ellipse { a, b, cumulative } => {
                let t = ellipse_angle_of_arclength(*a, *b, cumulative, s);
                [a * t.cos(), b * t.sin()]
            }
            Curve::RoundedSquare { half_width, radius } => {
                rounded_square_point(*half_width, *radius, s)
            }
        }
    }

    /// Arclength parameter of the boundary point closest to `p`.
    pub fn arclength_of(&self, p: Point) -> f64 {
        let s = match &self.curve {
            Curve::Circle { radius } => radius * crate::wrap(p[1].atan2(p[0]), TAU),
            Curve::Ellipse { a, b, cumulative } => {
                let q = ellipse_closest_point(*a, *b, p);
                let t = crate::wrap((q[1] / b).atan2(q[0] / a), TAU);
                ellipse_arclength(*a, *b, cumulative, t)
            }
            Curve::RoundedSquare { half_width, radius } => {
                rounded_square_arclength(*half_width, *radius, p)
            }
        };
        crate::wrap(s, self.perimeter)
    }

    /// Signed distance to `∂Ω`, positive inside. Evaluated from the analytic
    /// boundary, never from a mesh.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        match &self.curve {
            Curve::Circle { radius } => radius - p[0].hypot(p[1]),
            Curve::Ellipse { a, b, .. } => {
                let q = ellipse_closest_point(*a, *b, p);
                let dist = (p[0] - q[0]).hypot(p[1] - q[1]);
                let inside = (p[0] / a).powi(2) + (p[1] / b).powi(2) <= 1.0;
                if inside {
                    dist
                } else {
                    -dist
                }
            }
            Curve::RoundedSquare { half_width, radius } => {
                let e = half_width - radius;
                let qx = p[0].abs() - e;
                let qy = p[1].abs() - e;
                let outside = qx.max(0.0).hypot(qy.max(0.0));
                let inside = qx.max(qy).min(0.0);
                -(outside + inside - radius)
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.distance_to_boundary(p) >= 0.0
    }
}

fn ellipse_speed(a: f64, b: f64, t: f64) -> f64 {
    (a * t.sin()).hypot(b * t.cos())
}

fn ellipse_segment(a: f64, b: f64, t0: f64, t1: f64) -> f64 {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t1 + t0);
    GAUSS_LEGENDRE_8
        .iter()
        .map(|(x, w)| w * ellipse_speed(a, b, mid + half * x))
        .sum::<f64>()
        * half
}

fn ellipse_table(a: f64, b: f64) -> Vec<f64> {
    let dt = TAU / ELLIPSE_PANELS as f64;
    let mut cumulative = Vec::with_capacity(ELLIPSE_PANELS + 1);
    let mut acc = 0.0;
    cumulative.push(0.0);
    for k in 0..ELLIPSE_PANELS {
        acc += ellipse_segment(a, b, k as f64 * dt, (k + 1) as f64 * dt);
        cumulative.push(acc);
    }
    cumulative
}

fn ellipse_arclength(a: f64, b: f64, cumulative: &[f64], t: f64) -> f64 {
    let dt = TAU / ELLIPSE_PANELS as f64;
    let k = ((t / dt) as usize).min(ELLIPSE_PANELS - 1);
    cumulative[k] + ellipse_segment(a, b, k as f64 * dt, t)
}

fn ellipse_angle_of_arclength(a: f64, b: f64, cumulative: &[f64], s: f64) -> f64 {
    let dt = TAU / ELLIPSE_PANELS as f64;
    let k = cumulative
        .partition_point(|&c| c <= s)
        .clamp(1, ELLIPSE_PANELS)
        - 1;
    let frac = (s - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
    let mut t = (k as f64 + frac) * dt;
    for _ in 0..20 {
        let step = (ellipse_arclength(a, b, cumulative, t) - s) / ellipse_speed(a, b, t);
        t -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    t
}

// Closest point on an ellipse by the bisection scheme of D. Eberly,
// "Distance from a point to an ellipse, an ellipsoid, or a hyperellipsoid".
fn ellipse_closest_point(a: f64, b: f64, p: Point) -> Point {
    let swap = b > a;
    let (e0, e1) = if swap { (b, a) } else { (a, b) };
    let (y0, y1) = if swap {
        (p[1].abs(), p[0].abs())
    } else {
        (p[0].abs(), p[1].abs())
    };
    let (x0, x1) = closest_first_quadrant(e0, e1, y0, y1);
    let (qx, qy) = if swap { (x1, x0) } else { (x0, x1) };
    [qx.copysign(p[0]), qy.copysign(p[1])]
}

fn closest_first_quadrant(e0: f64, e1: f64, y0: f64, y1: f64) -> (f64, f64) {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1) * (e0 / e1);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            (e0 * xde0, e1 * (1.0 - xde0 * xde0).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, mut g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

// Nine pieces starting at (h, 0): half right side, then alternating corner
// arcs and full sides, ending with the lower half of the right side.
fn rounded_square_point(h: f64, r: f64, s: f64) -> Point {
    let e = h - r;
    let arc = FRAC_PI_2 * r;
    let lengths = [e, arc, 2.0 * e, arc, 2.0 * e, arc, 2.0 * e, arc, e];
    let mut rest = s;
    for (piece, &len) in lengths.iter().enumerate() {
        if rest <= len || piece == lengths.len() - 1 {
            let t = rest.min(len);
            return match piece {
                0 => [h, t],
                1 => corner_point(e, e, r, t / r),
                2 => [e - t, h],
                3 => corner_point(-e, e, r, FRAC_PI_2 + t / r),
                4 => [-h, e - t],
                5 => corner_point(-e, -e, r, PI + t / r),
                6 => [-e + t, -h],
                7 => corner_point(e, -e, r, 1.5 * PI + t / r),
                _ => [h, -e + t],
            };
        }
        rest -= len;
    }
    unreachable!()
}

fn corner_point(cx: f64, cy: f64, r: f64, phi: f64) -> Point {
    [cx + r * phi.cos(), cy + r * phi.sin()]
}

fn rounded_square_arclength(h: f64, r: f64, p: Point) -> f64 {
    let e = h - r;
    let arc = FRAC_PI_2 * r;
    let (x, y) = (p[0], p[1]);
    // corner regions
    if x.abs() > e && y.abs() > e {
        let cx = e.copysign(x);
        let cy = e.copysign(y);
        let phi = crate::wrap((y - cy).atan2(x - cx), TAU);
        return match (x > 0.0, y > 0.0) {
            (true, true) => e + r * phi,
            (false, true) => 3.0 * e + arc + r * (phi - FRAC_PI_2),
            (false, false) => 5.0 * e + 2.0 * arc + r * (phi - PI),
            (true, false) => 7.0 * e + 3.0 * arc + r * (phi - 1.5 * PI),
        };
    }
    // side regions: the closest side is the one the point is nearest to
    let right = h - x;
    let top = h - y;
    let left = h + x;
    let bottom = h + y;
    let m = right.min(top).min(left).min(bottom);
    if m == right {
        if y >= 0.0 {
            y.min(e)
        } else {
            8.0 * e + 4.0 * arc + y.max(-e)
        }
    } else if m == top {
        e + arc + (e - x.clamp(-e, e))
    } else if m == left {
        3.0 * e + 2.0 * arc + (e - y.clamp(-e, e))
    } else {
        5.0 * e + 3.0 * arc + (x.clamp(-e, e) + e)
    }
}
