//! Analytic limit states with known failure probabilities.
//!
//! These run the statistical suite at zero circuit-evaluation cost and are
//! exposed as first-class `--oracle` backends on the command line. Failure
//! probabilities below are exact standard-normal tail values.

use crate::estimator::LimitState;

/// Half-space failure `x0 > 3`; `P_f = Φ(-3) ≈ 1.3499e-3`.
#[derive(Debug, Clone, Copy)]
pub struct Linear3 {
    pub dimension: usize,
}

impl Default for Linear3 {
    fn default() -> Self {
        Linear3 { dimension: 18 }
    }
}

impl LimitState for Linear3 {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn margin(&self, x: &[f64]) -> f64 {
        3.0 - x[0]
    }
}

/// Two-tail failure `|x0| > 3.5`; `P_f = 2Φ(-3.5) ≈ 4.653e-4`.
#[derive(Debug, Clone, Copy)]
pub struct TwoTail35 {
    pub dimension: usize,
}

impl Default for TwoTail35 {
    fn default() -> Self {
        TwoTail35 { dimension: 18 }
    }
}

impl LimitState for TwoTail35 {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn margin(&self, x: &[f64]) -> f64 {
        3.5 - x[0].abs()
    }
}

/// Planted 2-sparse half-space `x0 + x1 > 4` in a high-dimensional space;
/// boundary distance `4/√2 ≈ 2.828`, `P_f = Φ(-2.828) ≈ 2.339e-3`.
#[derive(Debug, Clone, Copy)]
pub struct Planted2Sparse {
    pub dimension: usize,
}

impl Default for Planted2Sparse {
    fn default() -> Self {
        Planted2Sparse { dimension: 108 }
    }
}

impl LimitState for Planted2Sparse {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn margin(&self, x: &[f64]) -> f64 {
        4.0 - (x[0] + x[1])
    }
}

/// Dense boundary with equal weight on every coordinate:
/// `sum(x)/sqrt(dim) > 3`; `P_f = Φ(-3)`. Stress case for sparse recovery.
#[derive(Debug, Clone, Copy)]
pub struct DenseEqual {
    pub dimension: usize,
}

impl Default for DenseEqual {
    fn default() -> Self {
        DenseEqual { dimension: 18 }
    }
}

impl LimitState for DenseEqual {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn margin(&self, x: &[f64]) -> f64 {
        3.0 - x.iter().sum::<f64>() / (self.dimension as f64).sqrt()
    }
}

/// Planted 1-sparse half-space `x0 > 3.5` in a very high dimension;
/// `P_f = Φ(-3.5)`. Scalability smoke case.
#[derive(Debug, Clone, Copy)]
pub struct Planted1Sparse {
    pub dimension: usize,
}

impl Default for Planted1Sparse {
    fn default() -> Self {
        Planted1Sparse { dimension: 1152 }
    }
}

impl LimitState for Planted1Sparse {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn margin(&self, x: &[f64]) -> f64 {
        3.5 - x[0]
    }
}

/// Named oracle lookup for the command line.
pub fn by_name(name: &str) -> Option<Box<dyn LimitState + Send + Sync>> {
    match name {
        "linear3" => Some(Box::new(Linear3::default())),
        "twotail35" => Some(Box::new(TwoTail35::default())),
        "planted2sparse" => Some(Box::new(Planted2Sparse::default())),
        "dense18" => Some(Box::new(DenseEqual::default())),
        "planted1sparse" => Some(Box::new(Planted1Sparse::default())),
        _ => None,
    }
}

/// Oracle names accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["linear3", "twotail35", "planted2sparse", "dense18", "planted1sparse"];

/// Exact failure probabilities (standard-normal tails, frozen from an
/// independent high-precision evaluation).
pub mod truth {
    /// Φ(-3)
    pub const LINEAR3: f64 = 1.3498980316300933e-3;
    /// 2Φ(-3.5)
    pub const TWOTAIL35: f64 = 4.6525815807105003e-4;
    /// Φ(-4/√2) = Φ(-2.8284271…)
    pub const PLANTED2SPARSE: f64 = 2.338867490523633e-3;
    /// Φ(-3)
    pub const DENSE_EQUAL: f64 = 1.3498980316300933e-3;
    /// Φ(-3.5)
    pub const PLANTED1SPARSE: f64 = 2.3262907903552504e-4;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_flag_the_documented_regions() {
        let lin = Linear3::default();
        let mut x = vec![0.0; lin.dimension()];
        assert!(!lin.is_failure(&x));
        x[0] = 3.1;
        assert!(lin.is_failure(&x));

        let two = TwoTail35::default();
        let mut x = vec![0.0; two.dimension()];
        x[0] = -3.6;
        assert!(two.is_failure(&x));
        x[0] = 3.6;
        assert!(two.is_failure(&x));
        x[0] = 3.4;
        assert!(!two.is_failure(&x));

        let planted = Planted2Sparse::default();
        let mut x = vec![0.0; planted.dimension()];
        x[0] = 2.5;
        x[1] = 2.5;
        assert!(planted.is_failure(&x));
        // Mass on any other coordinate is irrelevant.
        x[0] = 0.0;
        x[1] = 0.0;
        x[50] = 10.0;
        assert!(!planted.is_failure(&x));
    }

    #[test]
    fn name_lookup_covers_all_oracles() {
        for name in NAMES {
            assert!(by_name(name).is_some(), "{name}");
        }
        assert!(by_name("rose-opt").is_none());
    }
}
