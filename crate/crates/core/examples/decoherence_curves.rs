//! Loop correction at `tau_D / T_H = 0.3` for several decoherence times,
//! printed as a coarse table with the peak of each curve.

use chaodecay::formulas::{correction_peak, figure3_curves, Regime, SemiclassicalParams};

fn main() -> chaodecay::Result<()> {
    let ratios = [0.05, 0.1, 0.3, 1.0];
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let table = figure3_curves(0.3, &ratios, &times)?;

    print!("{:>6}", "t/T_H");
    for c in &table.columns {
        print!(" {:>9}", format!("td={}", c.taud_over_th));
    }
    println!(" {:>9}", "td=inf");
    for (i, t) in times.iter().enumerate() {
        print!("{t:6.2}");
        for c in &table.columns {
            print!(" {:9.5}", c.values[i]);
        }
        println!(" {:9.5}", table.reference[i]);
    }
    for r in ratios.iter().copied().chain([f64::INFINITY]) {
        let peak = correction_peak(&SemiclassicalParams::from_times(0.3, 1.0, r), Regime::Plain)?;
        println!("tau_d/T_H = {r:<5} peak at t/T_H = {:.4}, height {:.5}", peak.t_star, peak.value);
    }
    Ok(())
}
