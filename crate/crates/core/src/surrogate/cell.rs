//! Per-cell device construction from a configuration and a variation sample.
//!
//! Device roles in the canonical M0..M5 order: M0/M1 are the left inverter
//! (pull-down, pull-up), M2/M3 the bitline- and bitline-bar-side pass gates,
//! M4/M5 the right inverter. The analyzed (target) cell is the worst
//! position: farthest row on the bitline, farthest column on the wordline.

use super::device::{vth_nominal, Device, VOFF_NOMINAL};
use crate::circuit::{SramArrayConfig, VariationSample};

/// Device indices in the canonical order.
pub const PD_L: usize = 0;
pub const PU_L: usize = 1;
pub const PG_L: usize = 2;
pub const PG_R: usize = 3;
pub const PD_R: usize = 4;
pub const PU_R: usize = 5;

/// Six devices of one cell with variations applied.
#[derive(Debug, Clone, Copy)]
pub struct CellDevices {
    pub pd_l: Device,
    pub pu_l: Device,
    pub pg_l: Device,
    pub pg_r: Device,
    pub pd_r: Device,
    pub pu_r: Device,
    w_pg: f64,
}

impl CellDevices {
    /// Devices of the cell at `(row, col)` under the given sample.
    pub fn at(config: &SramArrayConfig, sample: &VariationSample, row: u32, col: u32) -> Self {
        let cell = &config.cell;
        let sigma_u0 = config.variation.sigma_u0;

        let dev = |index: usize, nmos: bool, w: f64| -> Device {
            let class = if nmos { cell.vt_class_nmos } else { cell.vt_class_pmos };
            let z_vth = sample.device_deviation(config, row, col, index, 0);
            let z_u0 = sample.device_deviation(config, row, col, index, 1);
            let dvth = z_vth * config.vth0_sigma(vth_nominal(class), w, cell.l);
            let u0_factor = 1.0 + z_u0 * sigma_u0;
            if nmos {
                Device::nmos(w, cell.l, class, dvth, u0_factor)
            } else {
                Device::pmos(w, cell.l, class, dvth, u0_factor)
            }
        };

        CellDevices {
            pd_l: dev(PD_L, true, cell.w_pd),
            pu_l: dev(PU_L, false, cell.w_pu),
            pg_l: dev(PG_L, true, cell.w_pg),
            pg_r: dev(PG_R, true, cell.w_pg),
            pd_r: dev(PD_R, true, cell.w_pd),
            pu_r: dev(PU_R, false, cell.w_pu),
            w_pg: cell.w_pg,
        }
    }

    /// Devices of the worst-position (target) cell.
    pub fn target(config: &SramArrayConfig, sample: &VariationSample) -> Self {
        Self::at(config, sample, config.rows - 1, config.cols - 1)
    }

    pub fn w_pg(&self) -> f64 {
        self.w_pg
    }

    /// Read discharge current: pass gate in series with the pull-down,
    /// combined as the harmonic limit of the weaker device.
    pub fn read_current(&self, vdd: f64) -> f64 {
        let i_pg = self.pg_l.current(vdd, 0.5 * vdd);
        let i_pd = self.pd_l.current(vdd, 0.5 * vdd);
        if i_pg <= 0.0 || i_pd <= 0.0 {
            return 0.0;
        }
        i_pg * i_pd / (i_pg + i_pd)
    }
}

/// Threshold and subthreshold-offset deviations (V) of the bitline-side
/// access device of the cell at `(row, col)`, which modulate that idle
/// cell's leakage contribution.
pub fn access_leakage_deviations(
    config: &SramArrayConfig,
    sample: &VariationSample,
    row: u32,
    col: u32,
) -> (f64, f64) {
    let cell = &config.cell;
    let z_vth = sample.device_deviation(config, row, col, PG_L, 0);
    let z_voff = sample.device_deviation(config, row, col, PG_L, 2);
    let dvth = z_vth * config.vth0_sigma(vth_nominal(cell.vt_class_nmos), cell.w_pg, cell.l);
    let dvoff = z_voff * config.variation.sigma_voff * VOFF_NOMINAL;
    (dvth, dvoff)
}

/// Standardized peripheral deviations
/// `[sa_offset, wl_skew, precharge_level, write_driver_delay]`.
pub fn peripheral_values(config: &SramArrayConfig, sample: &VariationSample) -> [f64; 4] {
    sample.peripheral_deviations(config)
}
