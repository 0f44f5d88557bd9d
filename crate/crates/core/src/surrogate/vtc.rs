//! Inverter transfer curves, butterfly construction, and static noise margin
//! extraction by the 45°-rotation method.

use super::device::Device;

/// Access-transistor loading of an inverter output node during a butterfly
/// measurement.
#[derive(Debug, Clone, Copy)]
pub enum AccessMode {
    /// Bitlines floating / wordline off (hold measurement).
    None,
    /// Pass gate to a bitline held at vdd (read measurement): the access
    /// device pulls the output node up, source-follower connected.
    PullUp(Device),
    /// Pass gate to a bitline driven to 0 (write measurement): the access
    /// device fights the pull-up.
    PullDown(Device),
}

/// Net current into ground at the output node; strictly increasing in vout,
/// so the balance point is unique.
fn node_balance(pd: &Device, pu: &Device, access: &AccessMode, vdd: f64, vin: f64, vout: f64) -> f64 {
    let i_pd = pd.current(vin, vout);
    let i_pu = pu.current(vdd - vin, vdd - vout);
    let i_access = match access {
        AccessMode::None => 0.0,
        // Gate at vdd, source at the node, drain at the precharged bitline.
        AccessMode::PullUp(pg) => -pg.current(vdd - vout, vdd - vout),
        // Gate at vdd, source at the grounded bitline, drain at the node.
        AccessMode::PullDown(pg) => pg.current(vdd, vout),
    };
    i_pd - i_pu + i_access
}

/// Monotone non-increasing inverter transfer curve sampled on `grid`.
///
/// Each output point solves the closed-form current balance by bisection;
/// the bracket is warm-started from the previous grid point, which is valid
/// because the curve is non-increasing in vin.
pub fn inverter_vtc(
    pd: &Device,
    pu: &Device,
    access: AccessMode,
    vdd: f64,
    grid: &[f64],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut prev = vdd;
    for &vin in grid {
        let mut lo = 0.0f64;
        let mut hi = (prev + 2e-3).min(vdd);
        // The warm bracket can miss when the curve is locally flat near the
        // rail; verify and widen once.
        if node_balance(pd, pu, &access, vdd, vin, hi) < 0.0 {
            hi = vdd;
        }
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if node_balance(pd, pu, &access, vdd, vin, mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let v = 0.5 * (lo + hi);
        out.push(v);
        prev = v;
    }
    out
}

/// Superposed transfer curves of the two storage inverters.
///
/// `lobe1[i]` is inverter 1's output at input `grid[i]`; `lobe2` is inverter
/// 2's curve with axes exchanged when plotted, i.e. the butterfly is the
/// point set `{(g, lobe1(g))} ∪ {(lobe2(g), g)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyCurve {
    pub grid: Vec<f64>,
    pub lobe1: Vec<f64>,
    pub lobe2: Vec<f64>,
}

impl ButterflyCurve {
    pub fn vdd(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }
}

/// Sweep step for butterfly grids (V).
pub const SNM_GRID_STEP: f64 = 1e-3;

/// Uniform grid over `[0, vdd]` at the documented 1 mV resolution.
pub fn snm_grid(vdd: f64) -> Vec<f64> {
    let n = (vdd / SNM_GRID_STEP).round() as usize;
    (0..=n).map(|i| vdd * i as f64 / n as f64).collect()
}

/// Gap magnitudes below this are corner-contact noise, not lobes (V).
const HUMP_TOLERANCE: f64 = 1e-4;

/// Static noise margin: the side of the largest square inscribed in each
/// butterfly lobe, taken over the smaller lobe; negative when the curves do
/// not enclose two lobes (bistability lost), with magnitude equal to the
/// widest opening between the curves.
///
/// Implemented by the 45°-rotation method: lines `v = u + c` are swept; each
/// intersects curve 1 (where `lobe1(t) - t` is strictly decreasing) and
/// curve 2 (where `s - lobe2(s)` is strictly increasing) exactly once, and
/// the signed abscissa separation of the two intersection points equals the
/// vertical gap between the rotated curves divided by √2 — the side of the
/// inscribed square touching both curves on that diagonal. Sign runs of the
/// gap that never exceed a corner-contact tolerance are discarded; the two
/// lobes of a bistable butterfly are the surviving positive and negative
/// runs.
pub fn snm(curve: &ButterflyCurve) -> f64 {
    let ButterflyCurve { grid, lobe1, lobe2 } = curve;
    let n = grid.len();
    debug_assert!(n >= 2);

    // g[i] = lobe1[i] - grid[i], strictly decreasing in i.
    // h[i] = grid[i] - lobe2[i], strictly increasing in i.
    let g: Vec<f64> = (0..n).map(|i| lobe1[i] - grid[i]).collect();
    let h: Vec<f64> = (0..n).map(|i| grid[i] - lobe2[i]).collect();

    let c_lo = g[n - 1].max(h[0]);
    let c_hi = g[0].min(h[n - 1]);
    if c_lo >= c_hi {
        return -curve.vdd();
    }

    let steps = 2 * n;
    // c sweeps ascending. g is decreasing in i, so curve 1's bracketing
    // index only moves backward; h is increasing, so curve 2's only moves
    // forward. Both pointers do O(n) total work.
    let mut ia = n - 1;
    let mut ib = 0usize;
    let mut gaps = Vec::with_capacity(steps + 1);

    for k in 0..=steps {
        let c = c_lo + (c_hi - c_lo) * k as f64 / steps as f64;

        // Largest index with g[ia] >= c; segment [ia, ia+1] brackets c.
        while ia > 0 && g[ia] < c {
            ia -= 1;
        }
        let seg_a = ia.min(n - 2);
        let xi_a = if g[seg_a] == g[seg_a + 1] {
            grid[seg_a]
        } else {
            let f = ((g[seg_a] - c) / (g[seg_a] - g[seg_a + 1])).clamp(0.0, 1.0);
            grid[seg_a] + f * (grid[seg_a + 1] - grid[seg_a])
        };

        // Smallest index with h[ib+1] >= c; segment [ib, ib+1] brackets c.
        while ib + 1 < n && h[ib + 1] < c {
            ib += 1;
        }
        let seg_b = ib.min(n - 2);
        let s = if h[seg_b] == h[seg_b + 1] {
            grid[seg_b]
        } else {
            let f = ((c - h[seg_b]) / (h[seg_b + 1] - h[seg_b])).clamp(0.0, 1.0);
            grid[seg_b] + f * (grid[seg_b + 1] - grid[seg_b])
        };
        let xi_b = s - c;

        gaps.push(xi_a - xi_b);
    }

    // Peak gap of each significant sign run.
    let mut pos_peak = 0.0f64;
    let mut neg_peak = 0.0f64;
    for &gap in &gaps {
        if gap > HUMP_TOLERANCE {
            pos_peak = pos_peak.max(gap);
        } else if gap < -HUMP_TOLERANCE {
            neg_peak = neg_peak.max(-gap);
        }
    }

    if pos_peak > 0.0 && neg_peak > 0.0 {
        // Bistable: two lobes; the margin is the smaller one.
        pos_peak.min(neg_peak)
    } else {
        // Monostable: no enclosed area; report the widest opening negated.
        -pos_peak.max(neg_peak)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::VtClass;

    fn step_butterfly(vdd: f64) -> ButterflyCurve {
        // Ideal inverters switching at vdd/2.
        let grid = snm_grid(vdd);
        let steep = |t: f64| {
            let x = (t - vdd / 2.0) / 1e-6;
            vdd / (1.0 + x.exp())
        };
        let lobe1: Vec<f64> = grid.iter().map(|&t| steep(t)).collect();
        let lobe2 = lobe1.clone();
        ButterflyCurve { grid, lobe1, lobe2 }
    }

    #[test]
    fn ideal_step_inverters_give_half_vdd() {
        let snm_val = snm(&step_butterfly(1.0));
        assert!((snm_val - 0.5).abs() < 5e-3, "snm {snm_val}");
    }

    #[test]
    fn degenerate_identical_diagonal_curves_are_monostable() {
        // Both "inverters" are wires (vout = vdd - vin): the lobes collapse.
        let grid = snm_grid(1.0);
        let lobe1: Vec<f64> = grid.iter().map(|&t| 1.0 - t).collect();
        let lobe2 = lobe1.clone();
        let val = snm(&ButterflyCurve { grid, lobe1, lobe2 });
        assert!(val <= 0.0, "snm {val}");
    }

    #[test]
    fn snm_is_invariant_under_lobe_swap() {
        let pd = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, 0.03, 1.0);
        let pu = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, -0.02, 0.95);
        let pd2 = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, -0.01, 1.05);
        let pu2 = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, 0.04, 1.0);
        let grid = snm_grid(1.0);
        let f1 = inverter_vtc(&pd, &pu, AccessMode::None, 1.0, &grid);
        let f2 = inverter_vtc(&pd2, &pu2, AccessMode::None, 1.0, &grid);
        let a = snm(&ButterflyCurve {
            grid: grid.clone(),
            lobe1: f1.clone(),
            lobe2: f2.clone(),
        });
        let b = snm(&ButterflyCurve {
            grid,
            lobe1: f2,
            lobe2: f1,
        });
        assert!((a - b).abs() < 1e-6, "swap changed snm: {a} vs {b}");
    }

    #[test]
    fn vtc_is_monotone_and_rail_to_rail() {
        let pd = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, 0.0, 1.0);
        let pu = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, 0.0, 1.0);
        let grid = snm_grid(1.0);
        let vtc = inverter_vtc(&pd, &pu, AccessMode::None, 1.0, &grid);
        for pair in vtc.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "vtc not monotone");
        }
        assert!(vtc[0] > 1.0 - 2e-3, "vin=0 output {}", vtc[0]);
        assert!(*vtc.last().unwrap() < 5e-3, "vin=vdd output {}", vtc.last().unwrap());
    }

    #[test]
    fn symmetric_strengths_put_trip_point_at_midrail() {
        // Matched pull strengths and thresholds switch at vdd/2.
        let pd = Device {
            beta: 1e-3,
            vth: 0.45,
            vsat_knee: 1e9, // long-channel limit
        };
        let pu = Device {
            beta: 1e-3,
            vth: 0.45,
            vsat_knee: 1e9,
        };
        let grid = snm_grid(1.0);
        let vtc = inverter_vtc(&pd, &pu, AccessMode::None, 1.0, &grid);
        let mid = grid.len() / 2;
        assert!(
            (vtc[mid] - 0.5).abs() < 2e-3,
            "vtc(vdd/2) = {} expected 0.5",
            vtc[mid]
        );
    }

    #[test]
    fn nmos_threshold_shift_raises_trip_point() {
        let pu = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, 0.0, 1.0);
        let grid = snm_grid(1.0);
        let trip = |dvth: f64| {
            let pd = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, dvth, 1.0);
            let vtc = inverter_vtc(&pd, &pu, AccessMode::None, 1.0, &grid);
            // Input where the output crosses mid-rail.
            let idx = vtc.iter().position(|&v| v < 0.5).unwrap();
            grid[idx]
        };
        assert!(trip(0.05) > trip(0.0));
        assert!(trip(0.0) > trip(-0.05));
    }

    #[test]
    fn rotation_method_matches_brute_force_inscribed_square() {
        // Independent oracle: largest axis-aligned square fitting inside each
        // lobe, found by direct constraint checking on a coarse grid.
        let pd = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, 0.02, 1.0);
        let pu = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, -0.03, 1.1);
        let pd2 = Device::nmos(0.205e-6, 50e-9, VtClass::Vtg, -0.04, 0.9);
        let pu2 = Device::pmos(0.090e-6, 50e-9, VtClass::Vtg, 0.01, 1.0);
        let grid = snm_grid(1.0);
        let f1 = inverter_vtc(&pd, &pu, AccessMode::None, 1.0, &grid);
        let f2 = inverter_vtc(&pd2, &pu2, AccessMode::None, 1.0, &grid);

        let fast = snm(&ButterflyCurve {
            grid: grid.clone(),
            lobe1: f1.clone(),
            lobe2: f2.clone(),
        });
        let brute = brute_force_snm(&grid, &f1, &f2);
        assert!(
            (fast - brute).abs() < 4e-3,
            "rotation {fast} vs brute force {brute}"
        );
    }

    /// O(n²·log) largest-inscribed-square search, used only as a test oracle.
    fn brute_force_snm(grid: &[f64], f1: &[f64], f2: &[f64]) -> f64 {
        let eval = |x: f64, curve: &[f64]| -> f64 {
            let n = grid.len();
            let step = grid[1] - grid[0];
            let idx = ((x / step) as usize).min(n - 2);
            let f = (x - grid[idx]) / step;
            curve[idx] * (1.0 - f) + curve[idx + 1] * f
        };
        let fits_upper = |x: f64, y: f64, s: f64| -> bool {
            // Below curve 1, right of curve 2 (axes-exchanged).
            y + s <= eval(x + s, f1) && x >= eval(y, f2)
        };
        let fits_lower = |x: f64, y: f64, s: f64| -> bool {
            y >= eval(x, f1) && x + s <= eval(y + s, f2)
        };
        let coarse: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let mut best_upper = 0.0f64;
        let mut best_lower = 0.0f64;
        for &x in &coarse {
            for &y in &coarse {
                for (best, fits) in [
                    (&mut best_upper, &fits_upper as &dyn Fn(f64, f64, f64) -> bool),
                    (&mut best_lower, &fits_lower),
                ] {
                    let mut lo = *best;
                    let mut hi = 1.0 - x.max(y);
                    if hi <= lo || !fits(x, y, lo + 1e-9) && lo > 0.0 {
                        continue;
                    }
                    if !fits(x, y, lo) {
                        continue;
                    }
                    for _ in 0..30 {
                        let mid = 0.5 * (lo + hi);
                        if fits(x, y, mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    *best = lo;
                }
            }
        }
        best_upper.min(best_lower)
    }
}
