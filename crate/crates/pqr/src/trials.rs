//! Selection trials spread over a thread pool.

use pqr_core::scene::{run_selection_trials, SceneError, TrialConfig, TrialScene, TrialStats};
use rayon::prelude::*;

/// Same statistics as [`run_selection_trials`], with trials evaluated in
/// parallel and folded in trial order.
pub fn run_parallel(config: &TrialConfig) -> Result<TrialStats, SceneError> {
    if config.trials == 0 {
        return run_selection_trials(config);
    }
    let ts = TrialScene::build(config)?;
    let hits: Vec<Option<usize>> = (0..config.trials).into_par_iter().map(|i| ts.run_one(i)).collect();
    let mut stats = TrialStats::empty(config.n_codes);
    for hit in hits {
        stats.record(config.target, hit);
    }
    Ok(stats)
}
