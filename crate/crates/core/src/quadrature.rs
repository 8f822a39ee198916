//! Symmetric quadrature rules on the reference triangle and on `[-1, 1]`.
//!
//! Triangle rules are written in barycentric coordinates with weights
//! normalized to sum to one, so an element integral is `area * Σ w f(x_q)`.

/// A quadrature rule on a triangle in barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct TriangleRule {
    /// Highest total polynomial degree integrated exactly.
    pub degree: u32,
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

const CENTROID: TriangleRule = TriangleRule {
    degree: 1,
    points: &[[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
    weights: &[1.0],
};

const STRANG_FIX_3: TriangleRule = TriangleRule {
    degree: 2,
    points: &[
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ],
    weights: &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
};

const DA4: f64 = 0.445_948_490_915_965;
const DB4: f64 = 0.091_576_213_509_771;
const DWA4: f64 = 0.223_381_589_678_011;
const DWB4: f64 = 0.109_951_743_655_322;

const DUNAVANT_6: TriangleRule = TriangleRule {
    degree: 4,
    points: &[
        [DA4, DA4, 1.0 - 2.0 * DA4],
        [DA4, 1.0 - 2.0 * DA4, DA4],
        [1.0 - 2.0 * DA4, DA4, DA4],
        [DB4, DB4, 1.0 - 2.0 * DB4],
        [DB4, 1.0 - 2.0 * DB4, DB4],
        [1.0 - 2.0 * DB4, DB4, DB4],
    ],
    weights: &[DWA4, DWA4, DWA4, DWB4, DWB4, DWB4],
};

// Radon's seven point rule: a = (6 - √15)/21, b = (6 + √15)/21.
const RA5: f64 = 0.101_286_507_323_456_33;
const RB5: f64 = 0.470_142_064_105_115_1;
const RWA5: f64 = 0.125_939_180_544_827_15;
const RWB5: f64 = 0.132_394_152_788_506_18;

const RADON_7: TriangleRule = TriangleRule {
    degree: 5,
    points: &[
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [RA5, RA5, 1.0 - 2.0 * RA5],
        [RA5, 1.0 - 2.0 * RA5, RA5],
        [1.0 - 2.0 * RA5, RA5, RA5],
        [RB5, RB5, 1.0 - 2.0 * RB5],
        [RB5, 1.0 - 2.0 * RB5, RB5],
        [1.0 - 2.0 * RB5, RB5, RB5],
    ],
    weights: &[0.225, RWA5, RWA5, RWA5, RWB5, RWB5, RWB5],
};

/// The cheapest rule in the table that integrates total degree `degree`
/// exactly. Degrees above five fall back to the degree-5 rule.
pub fn triangle_rule(degree: u32) -> &'static TriangleRule {
    match degree {
        0 | 1 => &CENTROID,
        2 => &STRANG_FIX_3,
        3 | 4 => &DUNAVANT_6,
        _ => &RADON_7,
    }
}

/// Eight point Gauss–Legendre rule on `[-1, 1]`.
pub const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];
