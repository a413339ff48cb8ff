use stokes_core::levelset::{trace_level_curve, BranchId, TraceConfig};
use stokes_core::periods::Sign;

fn main() {
    let theta = 0.1f64;
    let cfg = TraceConfig::default();
    for sign in [Sign::Plus, Sign::Minus] {
        for ray in 0..4 {
            match trace_level_curve(theta, BranchId::ZeroRay { which: sign, ray }, &cfg) {
                Ok(c) => println!(
                    "{sign:?} ray {ray}: n={} end={:?} events={:?}",
                    c.points.len(),
                    c.end,
                    c.events.iter().map(|e| (e.at.re, e.at.im)).collect::<Vec<_>>()
                ),
                Err(e) => println!("{sign:?} ray {ray}: ERR {e}"),
            }
        }
    }
    match trace_level_curve(theta, BranchId::SigmaTheta, &cfg) {
        Ok(c) => println!("SigmaTheta: n={} end={:?} events={:?}", c.points.len(), c.end,
            c.events.iter().map(|e| (e.at.re, e.at.im)).collect::<Vec<_>>()),
        Err(e) => println!("SigmaTheta: ERR {e}"),
    }
}
