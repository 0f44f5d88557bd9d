//! First-order access-delay and power models.
//!
//! Read delay follows `t = C_eff·ΔV_eff / I_net + τ_elmore + t_wl` for the
//! worst-position (farthest) cell: `C_eff` is the total bitline load,
//! `ΔV_eff` the required differential inflated by sense-amplifier offset and
//! precharge-level deviations, `I_net` the series pass-gate/pull-down cell
//! current reduced (or aided) by the aggregate idle-cell leakage of the
//! shared column, and `τ_elmore = rows²·r·c/2` the distributed π-chain delay
//! with the half-capacitance endpoint convention. Write delay models the
//! two-phase flip: pass-gate versus pull-up contention down to the trip
//! point, then regenerative pull-up of the complementary node. Formulas and
//! constants are documented in `docs/surrogate-model.md`.

use super::cell::{peripheral_values, CellDevices};
use super::device::{idle_cell_leakage, leakage_class_factor};
use crate::circuit::{IdlePattern, SramArrayConfig, VariationSample};
use crate::error::{Error, Result};

/// Bitline junction capacitance per cell at nominal pass-gate width (F).
pub const C_BL_DEVICE: f64 = 0.05e-15;
/// Nominal pass-gate width the junction capacitance is referenced to (m).
const W_PG_REF: f64 = 0.135e-6;
/// Storage-node capacitance (F).
pub const C_STORAGE_NODE: f64 = 0.6e-15;
/// Nominal wordline-driver delay when peripherals are modeled (s).
const T_WL_DRIVER: f64 = 20e-12;
/// Nominal write-driver delay when peripherals are modeled (s).
const T_WRITE_DRIVER: f64 = 15e-12;
/// Sense-amplifier input capacitance per sense amplifier (F).
const C_SENSE_AMP: f64 = 5e-15;
/// Write-driver output capacitance (F).
const C_WRITE_DRIVER: f64 = 2e-15;
/// Floor on the required differential after offset subtraction (V).
const MIN_DIFFERENTIAL: f64 = 1e-3;

fn check_dimension(config: &SramArrayConfig, sample: &VariationSample) -> Result<()> {
    let expected = config.variation_dimension();
    if sample.dimension() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: sample.dimension(),
        });
    }
    Ok(())
}

/// Total bitline capacitance per column seen by the read path (F).
fn bitline_capacitance(config: &SramArrayConfig, w_pg: f64) -> f64 {
    let c_dev = C_BL_DEVICE * w_pg / W_PG_REF;
    let c_wire = if config.parasitics.enabled {
        config.parasitics.c_bl_seg
    } else {
        0.0
    };
    config.rows as f64 * (c_dev + c_wire)
}

/// Elmore delay of the bitline π-chain from the far cell to the near end:
/// `Σ_{i=1..n} r·(c·(n-i) + c/2) = n²·r·c/2`.
fn bitline_elmore(config: &SramArrayConfig) -> f64 {
    if !config.parasitics.enabled {
        return 0.0;
    }
    let n = config.rows as f64;
    0.5 * n * n * config.parasitics.r_bl_seg * config.parasitics.c_bl_seg
}

/// Elmore delay of the wordline chain to the farthest column.
fn wordline_elmore(config: &SramArrayConfig) -> f64 {
    if !config.parasitics.enabled {
        return 0.0;
    }
    let n = config.cols as f64;
    0.5 * n * n * config.parasitics.r_wl_seg * config.parasitics.c_wl_seg
}

/// Signed aggregate idle-cell leakage on the analyzed column (A).
///
/// Idle cells storing '0' oppose the read discharge (positive sign), cells
/// storing '1' aid it; each contribution is modulated by that cell's
/// access-device threshold and subthreshold-offset deviations.
fn idle_leakage_current(config: &SramArrayConfig, sample: &VariationSample) -> f64 {
    let rows = config.rows;
    let col = config.cols - 1;
    let class_factor = leakage_class_factor(config.cell.vt_class_nmos);
    let mut total = 0.0;
    for row in 0..rows.saturating_sub(1) {
        let stored_one = match &config.leakage.idle_pattern {
            IdlePattern::AllZero => false,
            IdlePattern::AllOne => true,
            IdlePattern::Explicit(bits) => bits[row as usize],
        };
        let sign = if stored_one { -1.0 } else { 1.0 };
        let (dvth, dvoff) = super::cell::access_leakage_deviations(config, sample, row, col);
        total += sign
            * idle_cell_leakage(
                config.leakage.i_leak_per_cell,
                config.vdd,
                config.leakage.vdd_exponent,
                class_factor,
                dvth,
                dvoff,
            );
    }
    total
}

/// Wordline arrival time at the target cell, including driver skew.
fn wordline_arrival(config: &SramArrayConfig, peri: &[f64; 4]) -> f64 {
    let mut t = wordline_elmore(config);
    if let Some(p) = &config.peripherals {
        t += T_WL_DRIVER + peri[1] * p.wl_driver_skew_sigma;
    }
    t.max(0.0)
}

/// Read delay for the worst-position cell; +∞ encodes a functional failure
/// (net discharge current at or below zero).
pub fn read_delay(config: &SramArrayConfig, sample: &VariationSample) -> Result<f64> {
    check_dimension(config, sample)?;
    let cell = CellDevices::target(config, sample);
    let peri = peripheral_values(config, sample);

    let i_cell = cell.read_current(config.vdd);
    let i_net = i_cell - idle_leakage_current(config, sample);
    if i_net <= 0.0 {
        return Ok(f64::INFINITY);
    }

    let mut delta_v = config.sense_differential;
    if let Some(p) = &config.peripherals {
        delta_v += peri[0] * p.sa_offset_sigma + peri[2] * p.precharge_level_sigma;
    }
    let delta_v = delta_v.max(MIN_DIFFERENTIAL);

    let c_bl = bitline_capacitance(config, cell.w_pg());
    Ok(wordline_arrival(config, &peri) + c_bl * delta_v / i_net + bitline_elmore(config))
}

/// Write delay: wordline/driver arrival, pass-gate vs pull-up contention to
/// the trip point, then regenerative rise of the complementary node to
/// `write_flip_fraction·vdd`. +∞ when the pass gate cannot overpower the
/// pull-up.
pub fn write_delay(config: &SramArrayConfig, sample: &VariationSample) -> Result<f64> {
    check_dimension(config, sample)?;
    let cell = CellDevices::target(config, sample);
    let peri = peripheral_values(config, sample);
    let vdd = config.vdd;

    // Phase 1: the BL-side pass gate discharges the stored-high node against
    // its pull-up. Currents are taken at the mid-swing operating point.
    let i_pg = cell.pg_l.current(vdd, 0.5 * vdd);
    let i_pu = cell.pu_l.current(vdd, 0.5 * vdd);
    let contention = i_pg - i_pu;
    if contention <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let v_trip = 0.5 * vdd;
    let t_fall = C_STORAGE_NODE * (vdd - v_trip) / contention;

    // Phase 2: the complementary pull-up charges its node to the flip level.
    let i_rise = cell.pu_r.current(vdd, 0.5 * vdd);
    if i_rise <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let t_rise = C_STORAGE_NODE * config.write_flip_fraction * vdd / i_rise;

    let mut t = wordline_arrival(config, &peri) + t_fall + t_rise;
    if let Some(p) = &config.peripherals {
        t += T_WRITE_DRIVER + peri[3] * p.write_driver_delay_sigma;
    }
    Ok(t.max(0.0))
}

/// Average read power: precharge-restore and wordline dynamic energy over the
/// specified cycle period, plus array static leakage.
pub fn read_power(config: &SramArrayConfig, sample: &VariationSample) -> Result<f64> {
    check_dimension(config, sample)?;
    let cell = CellDevices::target(config, sample);
    let vdd = config.vdd;
    let period = config.timing_spec.t_read_max + config.timing_spec.t_write_max;

    // Every column discharges its bitline when the wordline fires; the swing
    // restored by the precharge is capped at twice the sense differential.
    let swing = (2.0 * config.sense_differential).min(vdd);
    let mut energy = config.cols as f64 * bitline_capacitance(config, cell.w_pg()) * vdd * swing;
    if config.parasitics.enabled {
        energy += config.cols as f64 * config.parasitics.c_wl_seg * vdd * vdd;
    }
    if config.peripherals.is_some() {
        let n_sa = (config.cols / config.mux_ratio) as f64;
        energy += n_sa * C_SENSE_AMP * vdd * vdd;
    }
    Ok(energy / period + static_power(config))
}

/// Average write power: storage-node and write-driver dynamic energy plus
/// array static leakage. Bitline drive energy is attributed to the IO rail
/// outside the measurement window (bitlines are driven before wordline
/// assertion) and is not included.
pub fn write_power(config: &SramArrayConfig, sample: &VariationSample) -> Result<f64> {
    check_dimension(config, sample)?;
    let vdd = config.vdd;
    let period = config.timing_spec.t_read_max + config.timing_spec.t_write_max;
    let mut energy = 2.0 * C_STORAGE_NODE * vdd * vdd;
    if config.peripherals.is_some() {
        let n_drivers = (config.cols / config.mux_ratio) as f64;
        energy += n_drivers * C_WRITE_DRIVER * vdd * vdd;
    }
    Ok(energy / period + static_power(config))
}

/// Total array leakage power at the configured supply.
fn static_power(config: &SramArrayConfig) -> f64 {
    let per_cell = idle_cell_leakage(
        config.leakage.i_leak_per_cell,
        config.vdd,
        config.leakage.vdd_exponent,
        leakage_class_factor(config.cell.vt_class_nmos),
        0.0,
        0.0,
    );
    config.n_cells() as f64 * per_cell * config.vdd
}

/// Cell area from the calibrated analytic model
/// `area = K_A · 2(w_pd + w_pu + w_pg) · (l + L_OV)`.
pub fn cell_area(config: &SramArrayConfig) -> f64 {
    // K_A is pinned so the nominal geometry maps to exactly 0.61 µm².
    const L_OV: f64 = 100e-9;
    const K_A: f64 = 0.61e-12 / (2.0 * (0.205e-6 + 0.090e-6 + 0.135e-6) * (50e-9 + L_OV));
    let c = &config.cell;
    K_A * 2.0 * (c.w_pd + c.w_pu + c.w_pg) * (c.l + L_OV)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::default_config;
    use crate::circuit::VariationSample;

    #[test]
    fn linear_discharge_reference_point() {
        // C = 10 fF lumped, I = 50 µA, ΔV = 250 mV gives exactly 50 ps.
        let t: f64 = 10e-15 * 250e-3 / 50e-6;
        assert!((t - 50e-12).abs() < 1e-18);
    }

    #[test]
    fn area_calibration_hits_the_nominal_point() {
        let config = default_config(1, 1);
        let area = cell_area(&config);
        assert!((area - 0.61e-12).abs() < 1e-18, "area {area}");
    }

    #[test]
    fn default_array_meets_its_timing_spec() {
        let config = default_config(32, 1);
        let nominal = VariationSample::nominal(&config);
        let tr = read_delay(&config, &nominal).unwrap();
        let tw = write_delay(&config, &nominal).unwrap();
        assert!(tr < config.timing_spec.t_read_max, "t_read {tr}");
        assert!(tw < config.timing_spec.t_write_max, "t_write {tw}");
        assert!(tw < tr, "write {tw} should be faster than read {tr}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let config = default_config(2, 2);
        let wrong = VariationSample {
            values: vec![0.0; 18],
            sample_index: 0,
        };
        assert!(read_delay(&config, &wrong).is_err());
    }
}
