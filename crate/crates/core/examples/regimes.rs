//! The plain, short-time and Ehrenfest-gated forms of the correction for
//! one set of semiclassical constants.

use chaodecay::formulas::{correction_curve, Regime, SemiclassicalParams};

fn main() -> chaodecay::Result<()> {
    let mut p = SemiclassicalParams::from_times(1.0, 2.0, 0.8);
    p.lambda = 30.0;
    p.c2 = 20.0;
    p.cavity_size = 2.0;
    p.opening_length = 0.2;
    println!("t_E = {:.4}, t_lL = {:.4}", p.t_ehrenfest()?, p.t_loop_min()?);
    let times: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    let curves = [Regime::Plain, Regime::ShortTime, Regime::Ehrenfest]
        .map(|r| correction_curve(&p, r, &times))
        .into_iter()
        .collect::<chaodecay::Result<Vec<_>>>()?;
    println!("{:>6} {:>10} {:>10} {:>10}", "t", "plain", "short", "ehrenfest");
    for (i, t) in times.iter().enumerate() {
        println!("{t:6.2} {:10.5} {:10.5} {:10.5}", curves[0].bracket[i], curves[1].bracket[i], curves[2].bracket[i]);
    }
    Ok(())
}
