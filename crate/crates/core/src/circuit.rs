//! Array configuration types and deterministic process-variation sampling.
//!
//! [`SramArrayConfig`] is the single source of truth consumed by netlist
//! emission, the analytic evaluator, the yield estimators and the optimizer.
//! Variation samples are stored standardized (unit-normal per coordinate);
//! physical deviations are obtained by multiplying by each parameter's sigma
//! at the point of use, which keeps importance-sampling shift algebra in
//! standardized space.
//!
//! Canonical deviation order (see `docs/config-schema.md`): cells row-major
//! (row 0 col 0, row 0 col 1, ...), within a cell devices M0..M5, within a
//! device `[vth0, u0, voff]`; when peripherals are enabled, four peripheral
//! deviations `[sa_offset, wl_driver_skew, precharge_level,
//! write_driver_delay]` are appended after all core-cell deviations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Deviation parameters per transistor: vth0, u0, voff.
pub const PARAMS_PER_DEVICE: usize = 3;
/// Transistors per 6T cell.
pub const DEVICES_PER_CELL: usize = 6;
/// Deviation coordinates contributed by one cell.
pub const PARAMS_PER_CELL: usize = PARAMS_PER_DEVICE * DEVICES_PER_CELL;
/// Peripheral deviation coordinates when peripherals are enabled.
pub const PERIPHERAL_PARAMS: usize = 4;

/// 1 mV·µm expressed in SI (V·m), for Pelgrom coefficients.
pub const MILLIVOLT_MICROMETER: f64 = 1e-9;

/// Threshold-voltage device class (low / general / high VT).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VtClass {
    Vtl,
    Vtg,
    Vth,
}

impl VtClass {
    pub const ALL: [VtClass; 3] = [VtClass::Vtl, VtClass::Vtg, VtClass::Vth];

    /// Model-card name for this class and device polarity, e.g. `NMOS_VTG`.
    pub fn model_name(self, nmos: bool) -> &'static str {
        match (nmos, self) {
            (true, VtClass::Vtl) => "NMOS_VTL",
            (true, VtClass::Vtg) => "NMOS_VTG",
            (true, VtClass::Vth) => "NMOS_VTH",
            (false, VtClass::Vtl) => "PMOS_VTL",
            (false, VtClass::Vtg) => "PMOS_VTG",
            (false, VtClass::Vth) => "PMOS_VTH",
        }
    }

    pub fn index(self) -> usize {
        match self {
            VtClass::Vtl => 0,
            VtClass::Vtg => 1,
            VtClass::Vth => 2,
        }
    }

    pub fn from_index(i: usize) -> VtClass {
        Self::ALL[i.min(2)]
    }
}

impl std::fmt::Display for VtClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VtClass::Vtl => write!(f, "vtl"),
            VtClass::Vtg => write!(f, "vtg"),
            VtClass::Vth => write!(f, "vth"),
        }
    }
}

/// 6T-cell transistor sizing. All dimensions in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub vt_class_nmos: VtClass,
    pub vt_class_pmos: VtClass,
    /// Pull-down NMOS width (M0/M4).
    pub w_pd: f64,
    /// Pull-up PMOS width (M1/M5).
    pub w_pu: f64,
    /// Pass-gate NMOS width (M2/M3).
    pub w_pg: f64,
    /// Shared gate length.
    pub l: f64,
}

impl CellGeometry {
    /// Nominal geometry: W_PD 0.205 µm, W_PU 0.090 µm, W_PG 0.135 µm, L 50 nm,
    /// general-VT devices.
    pub fn nominal() -> Self {
        CellGeometry {
            vt_class_nmos: VtClass::Vtg,
            vt_class_pmos: VtClass::Vtg,
            w_pd: 0.205e-6,
            w_pu: 0.090e-6,
            w_pg: 0.135e-6,
            l: 50e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_pd", self.w_pd),
            ("w_pu", self.w_pu),
            ("w_pg", self.w_pg),
            ("l", self.l),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "cell.{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Relative sigmas of the per-transistor variation parameters, plus the
/// optional Pelgrom coefficient (SI, V·m) that overrides the fixed vth0 sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationSpec {
    /// Relative sigma of vth0 (fraction of the class nominal).
    pub sigma_vth0: f64,
    /// Relative sigma of the low-field mobility factor.
    pub sigma_u0: f64,
    /// Relative sigma of the subthreshold offset voltage.
    pub sigma_voff: f64,
    /// Pelgrom coefficient in V·m; when set, the vth0 sigma becomes
    /// `a_vt / sqrt(W·L)` per device and `sigma_vth0` is ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_vt: Option<f64>,
}

impl Default for VariationSpec {
    fn default() -> Self {
        VariationSpec {
            sigma_vth0: 0.05,
            sigma_u0: 0.05,
            sigma_voff: 0.05,
            a_vt: None,
        }
    }
}

impl VariationSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_vth0", self.sigma_vth0),
            ("sigma_u0", self.sigma_u0),
            ("sigma_voff", self.sigma_voff),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "variation.{name} must be >= 0, got {v}"
                )));
            }
        }
        if let Some(a) = self.a_vt {
            if !(0.0..=10.0 * MILLIVOLT_MICROMETER).contains(&a) {
                return Err(Error::InvalidConfig(format!(
                    "variation.a_vt must lie in [0, 10 mV·µm] = [0, 1e-8 V·m], got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Distributed-interconnect π-segment values, per cell pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParasiticSpec {
    /// Bitline resistance per cell pitch (Ω).
    pub r_bl_seg: f64,
    /// Bitline capacitance per cell pitch (F).
    pub c_bl_seg: f64,
    /// Wordline resistance per cell pitch (Ω).
    pub r_wl_seg: f64,
    /// Wordline capacitance per cell pitch (F).
    pub c_wl_seg: f64,
    pub enabled: bool,
}

impl Default for ParasiticSpec {
    /// Defaults sized so a 256-row bitline totals >1 kΩ and >200 fF
    /// (256·5 Ω = 1.28 kΩ, 256·1 fF = 256 fF).
    fn default() -> Self {
        ParasiticSpec {
            r_bl_seg: 5.0,
            c_bl_seg: 1e-15,
            r_wl_seg: 8.0,
            c_wl_seg: 0.4e-15,
            enabled: true,
        }
    }
}

impl ParasiticSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_bl_seg", self.r_bl_seg),
            ("c_bl_seg", self.c_bl_seg),
            ("r_wl_seg", self.r_wl_seg),
            ("c_wl_seg", self.c_wl_seg),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "parasitics.{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Peripheral-circuit variation sigmas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeripheralSpec {
    /// Sense-amplifier input-referred offset sigma (V).
    pub sa_offset_sigma: f64,
    /// Wordline-driver skew sigma (s).
    pub wl_driver_skew_sigma: f64,
    /// Precharge-level sigma (V).
    pub precharge_level_sigma: f64,
    /// Write-driver delay sigma (s).
    pub write_driver_delay_sigma: f64,
}

impl Default for PeripheralSpec {
    fn default() -> Self {
        PeripheralSpec {
            sa_offset_sigma: 20e-3,
            wl_driver_skew_sigma: 5e-12,
            precharge_level_sigma: 5e-3,
            write_driver_delay_sigma: 5e-12,
        }
    }
}

impl PeripheralSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sa_offset_sigma", self.sa_offset_sigma),
            ("wl_driver_skew_sigma", self.wl_driver_skew_sigma),
            ("precharge_level_sigma", self.precharge_level_sigma),
            ("write_driver_delay_sigma", self.write_driver_delay_sigma),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "peripherals.{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Data pattern held by the idle cells that share the accessed column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdlePattern {
    AllZero,
    AllOne,
    /// Explicit per-idle-cell pattern; length must be `rows - 1` for a
    /// single-column analysis.
    Explicit(Vec<bool>),
}

/// Inter-cell leakage coupling policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakagePolicy {
    pub idle_pattern: IdlePattern,
    /// Idle-cell bitline leakage at nominal vdd (A).
    pub i_leak_per_cell: f64,
    /// Supply-sensitivity exponent: leakage scales as `(vdd/vdd_nom)^k`.
    pub vdd_exponent: f64,
}

impl Default for LeakagePolicy {
    fn default() -> Self {
        LeakagePolicy {
            idle_pattern: IdlePattern::AllZero,
            i_leak_per_cell: 30e-9,
            vdd_exponent: 2.0,
        }
    }
}

impl LeakagePolicy {
    pub fn validate(&self, rows: u32) -> Result<()> {
        if self.i_leak_per_cell < 0.0 || !self.i_leak_per_cell.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "leakage.i_leak_per_cell must be >= 0, got {}",
                self.i_leak_per_cell
            )));
        }
        if let IdlePattern::Explicit(bits) = &self.idle_pattern {
            let expected = rows.saturating_sub(1) as usize;
            if bits.len() != expected {
                return Err(Error::InvalidConfig(format!(
                    "explicit idle pattern length {} != rows - 1 = {expected}",
                    bits.len()
                )));
            }
        }
        Ok(())
    }
}

/// Timing constraints checked by pass/fail classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingSpec {
    /// Maximum read delay (s).
    pub t_read_max: f64,
    /// Maximum write delay (s).
    pub t_write_max: f64,
}

/// Complete array description: the single source of truth for generation and
/// evaluation. Immutable after construction; share freely across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SramArrayConfig {
    pub rows: u32,
    pub cols: u32,
    /// Supply voltage (V).
    pub vdd: f64,
    pub cell: CellGeometry,
    /// Columns per sense amplifier.
    pub mux_ratio: u32,
    #[serde(default)]
    pub parasitics: ParasiticSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peripherals: Option<PeripheralSpec>,
    #[serde(default)]
    pub leakage: LeakagePolicy,
    #[serde(default)]
    pub variation: VariationSpec,
    pub timing_spec: TimingSpec,
    /// Bitline differential required for reliable sensing (V).
    pub sense_differential: f64,
    /// Fraction of vdd the written node must cross to count as flipped.
    pub write_flip_fraction: f64,
}

impl SramArrayConfig {
    pub fn n_cells(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    /// Length of a [`VariationSample`] for this configuration:
    /// `18 · n_cells`, plus 4 when peripherals are enabled.
    pub fn variation_dimension(&self) -> usize {
        let core = PARAMS_PER_CELL * self.n_cells();
        if self.peripherals.is_some() {
            core + PERIPHERAL_PARAMS
        } else {
            core
        }
    }

    /// Per-device vth0 deviation sigma in volts for a device of the given
    /// nominal threshold and gate area. Pelgrom's `a_vt/sqrt(W·L)` takes
    /// precedence over the fixed relative sigma when configured.
    pub fn vth0_sigma(&self, vth0_nominal: f64, w: f64, l: f64) -> f64 {
        match self.variation.a_vt {
            Some(a_vt) => pelgrom_sigma(a_vt, w, l).unwrap_or(0.0),
            None => self.variation.sigma_vth0 * vth0_nominal.abs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 1 || self.cols < 1 {
            return Err(Error::InvalidConfig(format!(
                "rows and cols must be >= 1, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.mux_ratio < 1 || self.cols % self.mux_ratio != 0 {
            return Err(Error::InvalidConfig(format!(
                "cols ({}) must be divisible by mux_ratio ({})",
                self.cols, self.mux_ratio
            )));
        }
        if !(self.vdd > 0.0) || !self.vdd.is_finite() {
            return Err(Error::InvalidConfig(format!("vdd must be > 0, got {}", self.vdd)));
        }
        if !(self.sense_differential < self.vdd) || self.sense_differential <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sense_differential must lie in (0, vdd), got {}",
                self.sense_differential
            )));
        }
        if !(self.write_flip_fraction > 0.0 && self.write_flip_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "write_flip_fraction must lie in (0, 1), got {}",
                self.write_flip_fraction
            )));
        }
        if !(self.timing_spec.t_read_max > 0.0 && self.timing_spec.t_write_max > 0.0) {
            return Err(Error::InvalidConfig(
                "timing_spec bounds must be positive".into(),
            ));
        }
        self.cell.validate()?;
        self.variation.validate()?;
        self.parasitics.validate()?;
        if let Some(p) = &self.peripherals {
            p.validate()?;
        }
        self.leakage.validate(self.rows)?;
        Ok(())
    }

    /// Parse a config from TOML text (key names match the field names; SI
    /// units throughout — see `docs/config-schema.md`).
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SramArrayConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical TOML encoding, recorded in output headers.
    pub fn content_hash(&self) -> u64 {
        let text = self.to_toml();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// Default configuration for a `rows × cols` array: vdd 1.0 V, nominal cell
/// geometry, 5% relative sigmas, 250 mV sense differential, 90% flip
/// fraction, 0.5 ns read and write specs. Peripherals are disabled; attach a
/// [`PeripheralSpec`] to enable them.
pub fn default_config(rows: u32, cols: u32) -> SramArrayConfig {
    SramArrayConfig {
        rows,
        cols,
        vdd: 1.0,
        cell: CellGeometry::nominal(),
        mux_ratio: 1,
        parasitics: ParasiticSpec::default(),
        peripherals: None,
        leakage: LeakagePolicy::default(),
        variation: VariationSpec::default(),
        timing_spec: TimingSpec {
            t_read_max: 0.5e-9,
            t_write_max: 0.5e-9,
        },
        sense_differential: 250e-3,
        write_flip_fraction: 0.9,
    }
}

/// Threshold-mismatch sigma from Pelgrom's law: `a_vt / sqrt(w·l)`.
///
/// `a_vt` is in SI (V·m; 1 mV·µm = 1e-9 V·m), `w` and `l` in meters; the
/// result is in volts.
pub fn pelgrom_sigma(a_vt: f64, w: f64, l: f64) -> Result<f64> {
    if !(w > 0.0) || !(l > 0.0) {
        return Err(Error::Domain(format!(
            "pelgrom_sigma requires positive dimensions, got w={w}, l={l}"
        )));
    }
    Ok(a_vt / (w * l).sqrt())
}

/// One Monte Carlo trial: standardized (unit-normal) deviations in the
/// canonical order documented at the module level.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationSample {
    pub values: Vec<f64>,
    pub sample_index: u64,
}

impl VariationSample {
    /// The all-zero (nominal) sample for a configuration.
    pub fn nominal(config: &SramArrayConfig) -> Self {
        VariationSample {
            values: vec![0.0; config.variation_dimension()],
            sample_index: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Standardized deviation for device `device` (0..6) of the cell at
    /// `(row, col)`, parameter `param` (0 = vth0, 1 = u0, 2 = voff).
    pub fn device_deviation(
        &self,
        config: &SramArrayConfig,
        row: u32,
        col: u32,
        device: usize,
        param: usize,
    ) -> f64 {
        let cell = row as usize * config.cols as usize + col as usize;
        self.values[cell * PARAMS_PER_CELL + device * PARAMS_PER_DEVICE + param]
    }

    /// Peripheral deviations `[sa_offset, wl_skew, precharge, write_driver]`,
    /// or zeros when peripherals are disabled.
    pub fn peripheral_deviations(&self, config: &SramArrayConfig) -> [f64; PERIPHERAL_PARAMS] {
        if config.peripherals.is_some() {
            let base = PARAMS_PER_CELL * config.n_cells();
            [
                self.values[base],
                self.values[base + 1],
                self.values[base + 2],
                self.values[base + 3],
            ]
        } else {
            [0.0; PERIPHERAL_PARAMS]
        }
    }
}

/// Stream label for variation sampling.
const VARIATION_STREAM: &str = "variation";

/// Draw sample `index` for a configuration. Pure in `(seed, index)`.
pub fn sample_variation(config: &SramArrayConfig, seed: u64, index: u64) -> VariationSample {
    VariationSample {
        values: rng::standard_normal_vec(seed, VARIATION_STREAM, index, config.variation_dimension()),
        sample_index: index,
    }
}

/// Draw samples `0..n`. Equivalent to calling [`sample_variation`] for each
/// index; batching has no effect on the values.
pub fn sample_variations(config: &SramArrayConfig, seed: u64, n: usize) -> Vec<VariationSample> {
    (0..n as u64).map(|i| sample_variation(config, seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_timing_spec_is_half_nanosecond() {
        let config = default_config(32, 1);
        assert_eq!(config.timing_spec.t_read_max, 0.5e-9);
        assert_eq!(config.timing_spec.t_write_max, 0.5e-9);
        config.validate().unwrap();
    }

    #[test]
    fn variation_dimensions_match_array_sizes() {
        // 18 parameters per cell: 1x1 -> 18, 3x2 -> 108, 32x2 -> 1152.
        assert_eq!(default_config(1, 1).variation_dimension(), 18);
        assert_eq!(default_config(3, 2).variation_dimension(), 108);
        assert_eq!(default_config(32, 2).variation_dimension(), 1152);

        let mut with_peri = default_config(32, 2);
        with_peri.peripherals = Some(PeripheralSpec::default());
        assert_eq!(with_peri.variation_dimension(), 1152 + 4);
    }

    #[test]
    fn dimension_formula_holds_across_shapes() {
        for rows in [1u32, 2, 5, 16, 64] {
            for cols in [1u32, 2, 4] {
                for peri in [false, true] {
                    let mut config = default_config(rows, cols);
                    if peri {
                        config.peripherals = Some(PeripheralSpec::default());
                    }
                    let expected = 18 * (rows * cols) as usize + if peri { 4 } else { 0 };
                    assert_eq!(config.variation_dimension(), expected);
                }
            }
        }
    }

    #[test]
    fn pelgrom_reference_points() {
        // 2 mV·µm over a 1 µm × 1 µm gate is 2 mV; 4 mV·µm doubles it;
        // quadrupling the width halves it.
        let mvum = MILLIVOLT_MICROMETER;
        assert!((pelgrom_sigma(2.0 * mvum, 1e-6, 1e-6).unwrap() - 2e-3).abs() < 1e-15);
        assert!((pelgrom_sigma(4.0 * mvum, 1e-6, 1e-6).unwrap() - 4e-3).abs() < 1e-15);
        assert!((pelgrom_sigma(2.0 * mvum, 4e-6, 1e-6).unwrap() - 1e-3).abs() < 1e-15);
        assert!(pelgrom_sigma(2.0 * mvum, 0.0, 1e-6).is_err());
    }

    #[test]
    fn pelgrom_is_homogeneous() {
        let mvum = MILLIVOLT_MICROMETER;
        let base = pelgrom_sigma(3.0 * mvum, 0.2e-6, 50e-9).unwrap();
        let scaled = pelgrom_sigma(3.0 * mvum, 0.4e-6, 100e-9).unwrap();
        assert!((scaled - base / 2.0).abs() / base < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_batch_invariant() {
        let config = default_config(1, 1);
        let a = sample_variations(&config, 7, 2);
        let b = sample_variations(&config, 7, 2);
        assert_eq!(a, b);

        // Sample i does not depend on how [0, n) was partitioned.
        let big = sample_variations(&config, 7, 10);
        assert_eq!(big[3], sample_variation(&config, 7, 3));
        assert_eq!(big[9], sample_variation(&config, 7, 9));
    }

    #[test]
    fn sample_vector_length_matches_dimension() {
        let config = default_config(3, 2);
        assert_eq!(sample_variation(&config, 42, 0).dimension(), 108);
    }

    #[test]
    fn sample_mean_is_near_zero() {
        // Law of large numbers: per-coordinate mean within 4/sqrt(n) of 0.
        let config = default_config(1, 1);
        let n = 100_000usize;
        let dim = config.variation_dimension();
        let mut sums = vec![0.0f64; dim];
        for i in 0..n as u64 {
            let s = sample_variation(&config, 123, i);
            for (acc, v) in sums.iter_mut().zip(&s.values) {
                *acc += v;
            }
        }
        let bound = 4.0 / (n as f64).sqrt();
        for (k, acc) in sums.iter().enumerate() {
            let mean = acc / n as f64;
            assert!(
                mean.abs() < bound,
                "coordinate {k} mean {mean} exceeds {bound}"
            );
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let mut config = default_config(8, 4);
        config.mux_ratio = 4;
        config.peripherals = Some(PeripheralSpec::default());
        config.leakage.idle_pattern = IdlePattern::Explicit(vec![true; 7]);
        let text = config.to_toml();
        let back = SramArrayConfig::from_toml(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = default_config(4, 4);
        config.mux_ratio = 3;
        assert!(config.validate().is_err());

        let mut config = default_config(4, 1);
        config.sense_differential = 1.5;
        assert!(config.validate().is_err());

        let mut config = default_config(4, 1);
        config.cell.w_pd = 0.0;
        assert!(config.validate().is_err());

        let mut config = default_config(4, 1);
        config.leakage.idle_pattern = IdlePattern::Explicit(vec![false; 2]);
        assert!(config.validate().is_err());
    }

    #[test]
    fn pelgrom_overrides_fixed_sigma_when_set() {
        let mut config = default_config(1, 1);
        let fixed = config.vth0_sigma(0.45, 0.205e-6, 50e-9);
        assert!((fixed - 0.05 * 0.45).abs() < 1e-12);

        config.variation.a_vt = Some(2.0 * MILLIVOLT_MICROMETER);
        let pelgrom = config.vth0_sigma(0.45, 1e-6, 1e-6);
        assert!((pelgrom - 2e-3).abs() < 1e-15);
    }
}
