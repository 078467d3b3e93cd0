use anyhow::Result;
use clap::Args;

use fourier_greeks::diagnostics::{check_conditions, estimate_decay};
use fourier_greeks::fourier::{Method, Order, Payoff};

use crate::args::ModelArgs;
use crate::output::table;

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Imaginary offset of the contour on which |phi| is measured.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
}

pub fn run(args: &DiagnoseArgs) -> Result<()> {
    let model = args.model.spec()?;
    let est = estimate_decay(&model, args.shift)?;
    println!(
        "{}: decay exponent p = {:.4} (fit on [{:e}, {:e}], rms residual {:.2e})",
        model.name(),
        est.exponent,
        est.fit_range.0,
        est.fit_range.1,
        est.residual
    );
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for payoff in [Payoff::Call, Payoff::DigitalPut] {
        let report = check_conditions(&model, payoff, &est);
        for method in Method::FOURIER {
            let mut row = vec![method.name().to_string(), payoff.name().to_string()];
            for order in Order::ALL {
                row.push(report.status(method, order).map(|s| s.name()).unwrap_or("-").to_string());
            }
            rows.push(row);
        }
        notes.push(format!("{payoff}: {}", report.rationale));
    }
    print!("{}", table(&["engine", "payoff", "price", "delta", "gamma"], &rows));
    for n in notes {
        println!("{n}");
    }
    Ok(())
}
