//! Filtered run next to the same run with the forcing and density filters switched
//! off; prints the tangent-angle tail amplitude of both over time.

use capsule_bim::harness::{self, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/filtering.cfg");
    let mut cfg = RunConfig::from_file(path.as_ref())?;
    if let Some(n) = std::env::args().nth(1) {
        cfg.n = n.parse()?;
    }
    let report = harness::diagnose(&cfg, &harness::output_root())?;
    println!("disabled in variant: {}", report.disabled.join(", "));
    println!("time      filtered    variant");
    for (k, t) in report.filtered.times.iter().enumerate() {
        let v = report.variant.high_mode_max.get(k).map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        println!("{t:<8.3}  {:.3e}   {v}", report.filtered.high_mode_max[k]);
    }
    for s in [&report.filtered, &report.variant] {
        println!("{}: growth {:.3e}, blow-up {:?}", s.label, s.growth(), s.blow_up_time());
    }
    Ok(())
}
