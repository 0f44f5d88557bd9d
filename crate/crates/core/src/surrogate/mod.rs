//! Self-contained analytic evaluator mapping `(config, sample)` to the full
//! metrics record — noise margins from butterfly curves, RC-limited access
//! delays with inter-cell leakage and peripheral offsets, power and area —
//! with no external simulator. Pure functions throughout; batches may be
//! evaluated in parallel with elementwise-identical results.

pub mod cell;
pub mod delay;
pub mod device;
pub mod vtc;

use serde::{Deserialize, Serialize};

use crate::circuit::{SramArrayConfig, VariationSample};
use crate::error::Result;
use crate::estimator::LimitState;
use cell::CellDevices;
use vtc::{inverter_vtc, snm_grid, AccessMode, ButterflyCurve};

pub use vtc::{snm, SNM_GRID_STEP};

/// All metrics of one evaluated sample or design. SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// Hold static noise margin (V); negative when bistability is lost.
    pub hsnm: f64,
    /// Read static noise margin (V).
    pub rsnm: f64,
    /// Write static noise margin (V); negative when the cell is unwritable.
    pub wsnm: f64,
    /// Read delay (s); +∞ encodes functional failure.
    pub t_read: f64,
    /// Write delay (s); +∞ encodes write failure.
    pub t_write: f64,
    /// Average read power (W).
    pub p_read: f64,
    /// Average write power (W).
    pub p_write: f64,
    /// Cell area (m²).
    pub area: f64,
}

impl MetricsRecord {
    pub fn min_snm(&self) -> f64 {
        self.hsnm.min(self.rsnm).min(self.wsnm)
    }

    pub fn max_power(&self) -> f64 {
        self.p_read.max(self.p_write)
    }
}

/// Pass/fail floors for the static noise margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassFailFloors {
    pub hsnm_floor: f64,
    pub rsnm_floor: f64,
    pub wsnm_floor: f64,
}

impl Default for PassFailFloors {
    fn default() -> Self {
        PassFailFloors {
            hsnm_floor: 100e-3,
            rsnm_floor: 50e-3,
            wsnm_floor: 50e-3,
        }
    }
}

/// Butterfly measurement modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnmMode {
    Hold,
    Read,
    Write,
}

/// Butterfly curve of the target cell in the given mode.
pub fn butterfly(
    config: &SramArrayConfig,
    sample: &VariationSample,
    mode: SnmMode,
) -> Result<ButterflyCurve> {
    let cell = devices_checked(config, sample)?;
    Ok(butterfly_of(&cell, config.vdd, mode))
}

fn devices_checked(config: &SramArrayConfig, sample: &VariationSample) -> Result<CellDevices> {
    let expected = config.variation_dimension();
    if sample.dimension() != expected {
        return Err(crate::Error::DimensionMismatch {
            expected,
            got: sample.dimension(),
        });
    }
    Ok(CellDevices::target(config, sample))
}

fn butterfly_of(cell: &CellDevices, vdd: f64, mode: SnmMode) -> ButterflyCurve {
    let grid = snm_grid(vdd);
    let (access_l, access_r) = match mode {
        SnmMode::Hold => (AccessMode::None, AccessMode::None),
        // Both bitlines precharged high: both pass gates pull up.
        SnmMode::Read => (AccessMode::PullUp(cell.pg_l), AccessMode::PullUp(cell.pg_r)),
        // BL driven low on the written side, BLB held high on the other.
        SnmMode::Write => (AccessMode::PullDown(cell.pg_l), AccessMode::PullUp(cell.pg_r)),
    };
    let lobe1 = inverter_vtc(&cell.pd_l, &cell.pu_l, access_l, vdd, &grid);
    let lobe2 = inverter_vtc(&cell.pd_r, &cell.pu_r, access_r, vdd, &grid);
    ButterflyCurve { grid, lobe1, lobe2 }
}

/// Static noise margins of the target cell: hold, read, write.
///
/// The write margin is the negated bistability measure of the write-mode
/// butterfly: positive when the write-side lobe has collapsed (the cell
/// flips), negative when bistability survives the write attempt.
pub fn noise_margins(
    config: &SramArrayConfig,
    sample: &VariationSample,
) -> Result<(f64, f64, f64)> {
    let cell = devices_checked(config, sample)?;
    let vdd = config.vdd;
    let grid = snm_grid(vdd);

    let hold_1 = inverter_vtc(&cell.pd_l, &cell.pu_l, AccessMode::None, vdd, &grid);
    let hold_2 = inverter_vtc(&cell.pd_r, &cell.pu_r, AccessMode::None, vdd, &grid);
    let read_1 = inverter_vtc(&cell.pd_l, &cell.pu_l, AccessMode::PullUp(cell.pg_l), vdd, &grid);
    // The right inverter sees its bitline precharged high in both the read
    // and the write measurement; its curve is shared.
    let read_2 = inverter_vtc(&cell.pd_r, &cell.pu_r, AccessMode::PullUp(cell.pg_r), vdd, &grid);
    let write_1 = inverter_vtc(&cell.pd_l, &cell.pu_l, AccessMode::PullDown(cell.pg_l), vdd, &grid);

    let hsnm = snm(&ButterflyCurve {
        grid: grid.clone(),
        lobe1: hold_1,
        lobe2: hold_2,
    });
    let rsnm = snm(&ButterflyCurve {
        grid: grid.clone(),
        lobe1: read_1,
        lobe2: read_2.clone(),
    });
    let wsnm = -snm(&ButterflyCurve {
        grid,
        lobe1: write_1,
        lobe2: read_2,
    });
    Ok((hsnm, rsnm, wsnm))
}

pub use delay::{cell_area, read_delay, read_power, write_delay, write_power};

/// Evaluate every metric for one sample. Deterministic and pure.
pub fn evaluate(config: &SramArrayConfig, sample: &VariationSample) -> Result<MetricsRecord> {
    let (hsnm, rsnm, wsnm) = noise_margins(config, sample)?;
    Ok(MetricsRecord {
        hsnm,
        rsnm,
        wsnm,
        t_read: read_delay(config, sample)?,
        t_write: write_delay(config, sample)?,
        p_read: read_power(config, sample)?,
        p_write: write_power(config, sample)?,
        area: cell_area(config),
    })
}

/// Pass iff both delays meet the timing spec (inclusive) and all three noise
/// margins sit at or above their floors.
pub fn pass_fail(metrics: &MetricsRecord, config: &SramArrayConfig) -> bool {
    pass_fail_with(metrics, config, &PassFailFloors::default())
}

pub fn pass_fail_with(
    metrics: &MetricsRecord,
    config: &SramArrayConfig,
    floors: &PassFailFloors,
) -> bool {
    margin_with(metrics, config, floors) >= 0.0
}

/// Continuous failure margin: the minimum of the normalized slacks across
/// all pass/fail terms. Non-negative iff the sample passes.
pub fn margin_with(
    metrics: &MetricsRecord,
    config: &SramArrayConfig,
    floors: &PassFailFloors,
) -> f64 {
    let t = &config.timing_spec;
    let read_slack = (t.t_read_max - metrics.t_read) / t.t_read_max;
    let write_slack = (t.t_write_max - metrics.t_write) / t.t_write_max;
    let hsnm_slack = (metrics.hsnm - floors.hsnm_floor) / config.vdd;
    let rsnm_slack = (metrics.rsnm - floors.rsnm_floor) / config.vdd;
    let wsnm_slack = (metrics.wsnm - floors.wsnm_floor) / config.vdd;
    read_slack
        .min(write_slack)
        .min(hsnm_slack)
        .min(rsnm_slack)
        .min(wsnm_slack)
}

/// Which metric the limit state checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMetric {
    /// Full pass/fail classification (all terms).
    All,
    /// Write delay against its spec only.
    WriteDelay,
    /// Read delay against its spec only.
    ReadDelay,
}

/// Limit state over the analytic evaluator in standardized variation space.
#[derive(Debug, Clone)]
pub struct SurrogateLimit {
    pub config: SramArrayConfig,
    pub metric: LimitMetric,
    pub floors: PassFailFloors,
}

impl SurrogateLimit {
    pub fn new(config: SramArrayConfig, metric: LimitMetric) -> Self {
        SurrogateLimit {
            config,
            metric,
            floors: PassFailFloors::default(),
        }
    }
}

impl LimitState for SurrogateLimit {
    fn dimension(&self) -> usize {
        self.config.variation_dimension()
    }

    fn margin(&self, x: &[f64]) -> f64 {
        let sample = VariationSample {
            values: x.to_vec(),
            sample_index: 0,
        };
        let t = &self.config.timing_spec;
        match self.metric {
            LimitMetric::WriteDelay => match write_delay(&self.config, &sample) {
                Ok(tw) => (t.t_write_max - tw) / t.t_write_max,
                Err(_) => f64::NEG_INFINITY,
            },
            LimitMetric::ReadDelay => match read_delay(&self.config, &sample) {
                Ok(tr) => (t.t_read_max - tr) / t.t_read_max,
                Err(_) => f64::NEG_INFINITY,
            },
            LimitMetric::All => match evaluate(&self.config, &sample) {
                Ok(m) => margin_with(&m, &self.config, &self.floors),
                Err(_) => f64::NEG_INFINITY,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{default_config, sample_variation, IdlePattern};

    fn nominal(config: &SramArrayConfig) -> VariationSample {
        VariationSample::nominal(config)
    }

    #[test]
    fn read_margin_is_smaller_than_hold_margin() {
        let config = default_config(4, 1);
        let (hsnm, rsnm, _) = noise_margins(&config, &nominal(&config)).unwrap();
        assert!(hsnm > 0.0, "hsnm {hsnm}");
        assert!(rsnm > 0.0, "rsnm {rsnm}");
        assert!(rsnm < hsnm, "rsnm {rsnm} >= hsnm {hsnm}");
    }

    #[test]
    fn nominal_cell_is_writable_with_margin() {
        let config = default_config(4, 1);
        let (_, _, wsnm) = noise_margins(&config, &nominal(&config)).unwrap();
        assert!(wsnm > 50e-3, "wsnm {wsnm}");
    }

    #[test]
    fn weak_pass_gate_destroys_writability() {
        let mut config = default_config(4, 1);
        // Tiny pass gate against an enormous pull-up cannot flip the cell.
        config.cell.w_pg = 0.02e-6;
        config.cell.w_pu = 1.0e-6;
        let (_, _, wsnm) = noise_margins(&config, &nominal(&config)).unwrap();
        assert!(wsnm < 50e-3, "wsnm {wsnm}");
        let tw = write_delay(&config, &nominal(&config)).unwrap();
        assert!(tw.is_infinite(), "t_write {tw}");
    }

    #[test]
    fn stronger_pass_gate_never_slows_writes() {
        let mut prev = f64::INFINITY;
        for k in 0..5 {
            let mut config = default_config(4, 1);
            config.cell.w_pg = (0.08 + 0.03 * k as f64) * 1e-6;
            let tw = write_delay(&config, &nominal(&config)).unwrap();
            assert!(tw <= prev, "w_pg step {k}: {tw} > {prev}");
            prev = tw;
        }
    }

    #[test]
    fn evaluate_is_deterministic() {
        let config = default_config(4, 2);
        let sample = sample_variation(&config, 9, 4);
        let a = evaluate(&config, &sample).unwrap();
        let b = evaluate(&config, &sample).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn doubling_rows_slows_and_burns_reads_but_not_writes() {
        let base = default_config(32, 4);
        let doubled = default_config(64, 4);
        let m1 = evaluate(&base, &nominal(&base)).unwrap();
        let m2 = evaluate(&doubled, &nominal(&doubled)).unwrap();
        assert!(m2.t_read > m1.t_read);
        assert!(m2.p_read > m1.p_read);
        let rel = (m2.t_write - m1.t_write).abs() / m1.t_write;
        assert!(rel < 0.05, "t_write moved by {rel}");
    }

    #[test]
    fn parasitics_always_slow_reads() {
        for rows in [8u32, 64, 256] {
            let mut on = default_config(rows, 4);
            on.parasitics.enabled = true;
            let mut off = on.clone();
            off.parasitics.enabled = false;
            for idx in 0..3u64 {
                let sample = sample_variation(&on, 7, idx);
                let t_on = read_delay(&on, &sample).unwrap();
                let t_off = read_delay(&off, &sample).unwrap();
                assert!(t_on > t_off, "rows {rows} sample {idx}");
            }
        }
    }

    #[test]
    fn idle_zero_cells_oppose_the_read() {
        let mut config = default_config(64, 4);
        config.vdd = 0.45;
        config.sense_differential = 0.2;
        config.leakage.idle_pattern = IdlePattern::AllZero;
        let t_zero = read_delay(&config, &nominal(&config)).unwrap();
        config.leakage.idle_pattern = IdlePattern::AllOne;
        let t_one = read_delay(&config, &nominal(&config)).unwrap();
        assert!(
            t_zero.is_finite() && t_zero > t_one,
            "all-zero {t_zero} vs all-one {t_one}"
        );
    }

    #[test]
    fn leakage_gap_shrinks_with_supply() {
        let gap = |vdd: f64| {
            let mut config = default_config(64, 4);
            config.vdd = vdd;
            config.sense_differential = 0.2;
            config.leakage.idle_pattern = IdlePattern::AllZero;
            let t_zero = read_delay(&config, &nominal(&config)).unwrap();
            config.leakage.idle_pattern = IdlePattern::AllOne;
            let t_one = read_delay(&config, &nominal(&config)).unwrap();
            t_zero - t_one
        };
        let g_low = gap(0.45);
        let g_high = gap(1.0);
        assert!(g_low > 0.0);
        assert!(g_high >= 0.0);
        assert!(g_high < 0.1 * g_low, "gap {g_high} vs low-vdd {g_low}");
    }

    #[test]
    fn read_delay_decreases_with_supply() {
        let mut prev = f64::INFINITY;
        for k in 0..=11 {
            let mut config = default_config(64, 4);
            config.vdd = 0.45 + 0.05 * k as f64;
            config.sense_differential = 0.2;
            let t = read_delay(&config, &nominal(&config)).unwrap();
            assert!(t <= prev, "vdd {} delay {t} > {prev}", config.vdd);
            prev = t;
        }
    }

    #[test]
    fn pass_fail_is_inclusive_at_the_boundary() {
        let config = default_config(2, 1);
        let metrics = MetricsRecord {
            hsnm: 100e-3,
            rsnm: 50e-3,
            wsnm: 50e-3,
            t_read: config.timing_spec.t_read_max,
            t_write: config.timing_spec.t_write_max,
            p_read: 1e-5,
            p_write: 1e-6,
            area: 0.61e-12,
        };
        assert!(pass_fail(&metrics, &config));

        let mut slow = metrics;
        slow.t_read = f64::INFINITY;
        assert!(!pass_fail(&slow, &config));

        let mut weak = metrics;
        weak.rsnm = 40e-3;
        assert!(!pass_fail(&weak, &config));
    }

    #[test]
    fn margin_sign_matches_pass_fail_on_random_samples() {
        let config = default_config(3, 1);
        let floors = PassFailFloors::default();
        for i in 0..20u64 {
            let sample = sample_variation(&config, 33, i);
            let metrics = evaluate(&config, &sample).unwrap();
            let margin = margin_with(&metrics, &config, &floors);
            assert_eq!(margin >= 0.0, pass_fail(&metrics, &config), "sample {i}");
        }
    }
}
