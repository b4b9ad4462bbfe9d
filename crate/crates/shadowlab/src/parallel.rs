//! Row-parallel scaling runs. Each ε row is independent and rows are
//! collected in list order, so the result does not depend on the thread count.

use rayon::prelude::*;
use shadowlab_core::scaling::{estimate_max_d, ScalingConfig, ScalingResult};

pub fn run_scaling(config: &ScalingConfig, threads: Option<usize>) -> anyhow::Result<ScalingResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let rows = pool.install(|| {
        config.eps_list.par_iter().map(|&eps| estimate_max_d(config, eps)).collect::<Result<Vec<_>, _>>()
    })?;
    Ok(ScalingResult::from_rows(rows)?)
}
