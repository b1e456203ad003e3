//! Gauss-Legendre rules on [−1, 1].

use crate::error::{DgError, Result};

const GL1: [(f64, f64); 1] = [(0.0, 2.0)];

const GL2: [(f64, f64); 2] = [
    (-0.577_350_269_189_625_764_509_148_780_501_957_455_6, 1.0),
    (0.577_350_269_189_625_764_509_148_780_501_957_455_6, 1.0),
];

const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_377_035_853_079_956_479_922_2, 0.555_555_555_555_555_555_555_555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_888_888_888_888_888_888_888_9),
    (0.774_596_669_241_483_377_035_853_079_956_479_922_2, 0.555_555_555_555_555_555_555_555_555_555_555_555_6),
];

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_575_223_946_488_892_809_505_1, 0.347_854_845_137_453_857_373_063_949_221_999_407_2),
    (-0.339_981_043_584_856_264_802_665_759_103_244_687_2, 0.652_145_154_862_546_142_626_936_050_778_000_592_8),
    (0.339_981_043_584_856_264_802_665_759_103_244_687_2, 0.652_145_154_862_546_142_626_936_050_778_000_592_8),
    (0.861_136_311_594_052_575_223_946_488_892_809_505_1, 0.347_854_845_137_453_857_373_063_949_221_999_407_2),
];

const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_663_992_797_626_878_299_392_965_1, 0.236_926_885_056_189_087_514_264_040_719_917_362_6),
    (-0.538_469_310_105_683_091_036_314_420_700_208_804_9, 0.478_628_670_499_366_468_041_291_514_835_638_192_9),
    (0.0, 0.568_888_888_888_888_888_888_888_888_888_888_888_9),
    (0.538_469_310_105_683_091_036_314_420_700_208_804_9, 0.478_628_670_499_366_468_041_291_514_835_638_192_9),
    (0.906_179_845_938_663_992_797_626_878_299_392_965_1, 0.236_926_885_056_189_087_514_264_040_719_917_362_6),
];

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        let table: &[(f64, f64)] = match n {
            1 => &GL1,
            2 => &GL2,
            3 => &GL3,
            4 => &GL4,
            5 => &GL5,
            _ => return Err(DgError::Unsupported(n)),
        };
        Ok(QuadRule {
            nodes: table.iter().map(|t| t.0).collect(),
            weights: table.iter().map(|t| t.1).collect(),
        })
    }

    /// The (q+1)-point rule used with degree-q elements.
    pub fn for_degree(q: usize) -> Result<Self> {
        if !(1..=3).contains(&q) {
            return Err(DgError::Unsupported(q));
        }
        Self::gauss_legendre(q + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Nodes and weights mapped to the interval [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| (c + h * x, h * w)).collect()
    }
}
