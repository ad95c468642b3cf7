//! Encounter-integral quadrature against the closed form along increasing
//! `lambda tau_D`, at fixed `t_E / tau_D = 0.05` and `alpha tau_D sigma^2 = 0.1`.

use chaodecay::formulas::SemiclassicalParams;
use chaodecay::quadrature::{convergence_study, QuadratureSpec};

fn main() -> chaodecay::Result<()> {
    let sequence: Vec<SemiclassicalParams> = [10.0, 20.0, 40.0, 80.0]
        .into_iter()
        .map(|x: f64| {
            let mut p = SemiclassicalParams::from_times(1.0, 1.0, f64::INFINITY);
            p.lambda = x;
            p.c2 = (0.05 * x).exp();
            p.alpha = 0.1;
            p
        })
        .collect();
    let times = [1.0, 2.0, 3.0, 4.0, 5.0];
    let table = convergence_study(&sequence, &times, &QuadratureSpec::default())?;
    print!("{:>10}", "lambda tD");
    for t in times {
        print!(" {:>9}", format!("t={t}"));
    }
    println!();
    for i in 0..table.n_params {
        print!("{:10}", table.row(i, 0).lambda_tau_d);
        for j in 0..table.n_times {
            print!(" {:+9.4}", table.row(i, j).rel_dev);
        }
        println!();
    }
    println!("decreasing fraction {:.2}", table.fraction_decreasing());
    Ok(())
}
