//! Closed-form long-channel drain-current model with variation knobs.
//!
//! A square-law / velocity-saturation hybrid built on the smooth EKV-style
//! interpolation `I = 2nβ'vT²·[sp²(u_f) - sp²(u_r)]` with
//! `sp(u) = ln(1 + e^u)`, which covers subthreshold conduction, the linear
//! region and saturation in one expression, monotone in both terminal
//! voltages. Velocity saturation degrades the gain factor with overdrive:
//! `β' = β / (1 + max(0, vgs - vt)/(E_c·L))`.
//!
//! Variation enters through three knobs per device: an additive threshold
//! shift (vth0), a multiplicative mobility factor (u0), and an additive
//! subthreshold offset (voff) that modulates the off-state leakage term only.
//! Formulas are documented in `docs/surrogate-model.md`.

use crate::circuit::VtClass;

/// Thermal voltage at 300 K (V).
pub const THERMAL_VOLTAGE: f64 = 0.0259;
/// Subthreshold slope factor.
pub const SLOPE_FACTOR: f64 = 1.4;
/// Process transconductance µ₀·Cox for NMOS (A/V²).
pub const KP_NMOS: f64 = 450e-6;
/// Process transconductance for PMOS (A/V²).
pub const KP_PMOS: f64 = 200e-6;
/// Lateral critical field for velocity saturation (V/m).
pub const E_CRIT: f64 = 4.0e6;
/// Magnitude of the nominal subthreshold offset voltage (V).
pub const VOFF_NOMINAL: f64 = 0.11;

/// Nominal threshold magnitude per device class (V).
pub fn vth_nominal(class: VtClass) -> f64 {
    match class {
        VtClass::Vtl => 0.35,
        VtClass::Vtg => 0.45,
        VtClass::Vth => 0.55,
    }
}

/// Idle-cell leakage multiplier per device class, one half-decade per step.
pub fn leakage_class_factor(class: VtClass) -> f64 {
    match class {
        VtClass::Vtl => 10.0_f64.sqrt(),
        VtClass::Vtg => 1.0,
        VtClass::Vth => 1.0 / 10.0_f64.sqrt(),
    }
}

/// One transistor with its geometry and applied variations.
#[derive(Debug, Clone, Copy)]
pub struct Device {
    /// Gain factor `kp · W / L` before velocity saturation (A/V²).
    pub beta: f64,
    /// Effective threshold `vth_nominal + δvth` (V, magnitude convention).
    pub vth: f64,
    /// Velocity-saturation knee `E_c · L` (V).
    pub vsat_knee: f64,
}

impl Device {
    /// NMOS device from geometry, class and standardized deviations.
    pub fn nmos(w: f64, l: f64, class: VtClass, dvth: f64, u0_factor: f64) -> Device {
        Device {
            beta: KP_NMOS * u0_factor.max(0.05) * w / l,
            vth: vth_nominal(class) + dvth,
            vsat_knee: E_CRIT * l,
        }
    }

    /// PMOS device; voltages are handled in source-referenced magnitudes.
    pub fn pmos(w: f64, l: f64, class: VtClass, dvth: f64, u0_factor: f64) -> Device {
        Device {
            beta: KP_PMOS * u0_factor.max(0.05) * w / l,
            vth: vth_nominal(class) + dvth,
            vsat_knee: E_CRIT * l,
        }
    }

    /// Drain current for gate-source and drain-source magnitudes (A).
    ///
    /// Monotone non-decreasing in both arguments; valid for `vds >= 0`.
    pub fn current(&self, vgs: f64, vds: f64) -> f64 {
        let nvt = SLOPE_FACTOR * THERMAL_VOLTAGE;
        let vov = vgs - self.vth;
        let beta_eff = self.beta / (1.0 + vov.max(0.0) / self.vsat_knee);
        let uf = vov / (2.0 * nvt);
        let ur = (vov - SLOPE_FACTOR * vds) / (2.0 * nvt);
        let f = softplus(uf);
        let r = softplus(ur);
        2.0 * SLOPE_FACTOR * beta_eff * THERMAL_VOLTAGE * THERMAL_VOLTAGE * (f * f - r * r)
    }

    /// Saturation current at the given gate drive (A).
    pub fn saturation_current(&self, vgs: f64) -> f64 {
        self.current(vgs, vgs.max(1.0))
    }
}

/// Numerically stable `ln(1 + e^u)`.
fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else if u < -30.0 {
        u.exp()
    } else {
        u.exp().ln_1p()
    }
}

/// Subthreshold leakage scale for an idle cell's bitline path: the policy's
/// per-cell leakage modulated by the access-device threshold and offset
/// deviations and by the supply-sensitivity exponent.
pub fn idle_cell_leakage(
    i_leak_nominal: f64,
    vdd: f64,
    vdd_exponent: f64,
    class_factor: f64,
    dvth: f64,
    dvoff: f64,
) -> f64 {
    let nvt = SLOPE_FACTOR * THERMAL_VOLTAGE;
    i_leak_nominal * class_factor * vdd.powf(vdd_exponent) * (-(dvth + dvoff) / nvt).exp()
}
