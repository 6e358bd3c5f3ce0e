//! Split, screen and aggregate on one simulated data set.
//!
//! ```text
//! cargo run --release --example fit_pipeline -- [indep|ar1|ar2] [seed]
//! ```

use logagg::aggregate::{la_fit, LaConfig};
use logagg::bench::fp_fn;
use logagg::simgen::{simulate, true_theta, CovarianceModel, ScenarioSpec};

fn main() -> logagg::Result<()> {
    let mut args = std::env::args().skip(1);
    let model: CovarianceModel = args.next().as_deref().unwrap_or("indep").parse()?;
    let seed: u64 = args.next().map_or(3, |s| s.parse().expect("seed"));

    let spec = ScenarioSpec::new(model, 300, 1000, seed);
    let truth = true_theta(spec.p)?;
    let data = simulate(&spec, &truth)?;

    let fit = la_fit(&data, &LaConfig { seed, ..LaConfig::default() })?;
    let est = &fit.estimate;
    println!("candidates ({}): {:?}", fit.candidates.len(), fit.candidates.features());
    println!("acceptance rate {:.3}, {} models fitted", est.acceptance_rate, est.models_fitted);

    let sizes = est.trace_sizes();
    for t in (0..sizes.len()).step_by(200) {
        println!("  iter {:>5}  size {:>2}  score {:>9.3}", t + 1, sizes[t], est.trace[t].score);
    }
    for j in est.support() {
        println!("  theta[{j:>4}] = {:+.4}", est.theta[j]);
    }
    let (fp, fn_count) = fp_fn(&est.theta, &truth, data.n());
    println!("FP {fp}  FN {fn_count}");
    Ok(())
}
