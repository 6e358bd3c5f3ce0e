//! Single-locus Wald tests, Bonferroni selection and p-value screening.

use logagg::glm::{bonferroni_select, retain_by_pvalue, single_locus_pvalues};
use logagg::simgen::{simulate, true_theta, CovarianceModel, ScenarioSpec};

fn main() -> logagg::Result<()> {
    let data = simulate(&ScenarioSpec::new(CovarianceModel::Independent, 300, 2000, 11), &true_theta(2000)?)?;
    let results = single_locus_pvalues(&data);

    let mut ranked = results.clone();
    ranked.sort_by(|a, b| a.p_value.total_cmp(&b.p_value));
    println!("{:>7} {:>9} {:>9} {:>11}", "feature", "coef", "se", "p");
    for r in ranked.iter().take(8) {
        println!("{:>7} {:>9.3} {:>9.3} {:>11.3e}", r.feature, r.coefficient, r.std_error, r.p_value);
    }

    let hits = bonferroni_select(&results, 0.05);
    println!("Bonferroni at 0.05 over {} tests: {hits:?}", results.len());
    for threshold in [0.001, 0.01, 0.05] {
        println!("p <= {threshold}: {} features kept", retain_by_pvalue(&results, threshold).len());
    }
    Ok(())
}
