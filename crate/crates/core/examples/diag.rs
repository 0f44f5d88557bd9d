use cellbench::circuit::{default_config, VariationSample};
use cellbench::surrogate;

fn main() {
    let config = default_config(32, 1);
    let nominal = VariationSample::nominal(&config);
    let t0 = std::time::Instant::now();
    let m = surrogate::evaluate(&config, &nominal).unwrap();
    let dt = t0.elapsed();
    println!("metrics 32x1 default: {m:#?}");
    println!("eval time: {dt:?}");
    let fom = (m.min_snm() / (m.max_power() * m.area.sqrt())).log10();
    println!("FoM = {fom:.3}");
    for rows in [8u32, 16, 32, 64, 128, 256] {
        let c = default_config(rows, 4);
        let n = VariationSample::nominal(&c);
        let tr = surrogate::read_delay(&c, &n).unwrap();
        let tw = surrogate::write_delay(&c, &n).unwrap();
        let pr = surrogate::read_power(&c, &n).unwrap();
        let mut coff = c.clone(); coff.parasitics.enabled = false;
        let troff = surrogate::read_delay(&coff, &n).unwrap();
        println!("rows {rows:3}: t_read {:.4} ns  t_write {:.4} ns  p_read {:.2} uW  ratio {:.1}",
            tr*1e9, tw*1e9, pr*1e6, tr/troff);
    }
    // per-eval timing over 20 random samples
    let c = default_config(3, 2);
    let t0 = std::time::Instant::now();
    for i in 0..20 { let s = cellbench::circuit::sample_variation(&c, 1, i); let _ = surrogate::evaluate(&c, &s).unwrap(); }
    println!("20 evals: {:?}", t0.elapsed());
}
