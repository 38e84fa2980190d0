use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::DenseTensor3;
use crate::{Error, Result};

/// Entries kept when pruning `total` entries to `target` density:
/// `target * total` rounded half up.
pub fn kept_count(total: usize, target: f64) -> usize {
    ((target * total as f64) + 0.5).floor() as usize
}

fn check_target(target: f64) -> Result<()> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::invalid(format!(
            "target density {target} outside (0, 1]"
        )));
    }
    Ok(())
}

/// Zeroes all but a uniformly random subset of the nonzero values across
/// `values`, keeping `kept_count(len, target)` of them (or every nonzero
/// value if there are fewer).
fn prune_slices(values: &mut [&mut [f32]], target: f64, seed: u64) {
    let total: usize = values.iter().map(|v| v.len()).sum();
    let mut candidates = Vec::new();
    for (t, vals) in values.iter().enumerate() {
        for (i, v) in vals.iter().enumerate() {
            if *v != 0.0 {
                candidates.push((t, i));
            }
        }
    }
    let keep = kept_count(total, target).min(candidates.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask: Vec<Vec<bool>> = values.iter().map(|v| vec![false; v.len()]).collect();
    for k in sample(&mut rng, candidates.len(), keep) {
        let (t, i) = candidates[k];
        mask[t][i] = true;
    }
    for (vals, m) in values.iter_mut().zip(mask) {
        for (v, keep) in vals.iter_mut().zip(m) {
            if !keep {
                *v = 0.0;
            }
        }
    }
}

/// Random unstructured pruning of one tensor. Deterministic for a fixed seed.
pub fn prune_random(t: &DenseTensor3, target: f64, seed: u64) -> Result<DenseTensor3> {
    check_target(target)?;
    let mut out = t.clone();
    prune_slices(&mut [out.data_mut()], target, seed);
    Ok(out)
}

/// Prunes a filter bank jointly: the kept count is computed over all
/// filters together, so individual filters may end up denser or sparser.
pub fn prune_filters(filters: &[DenseTensor3], target: f64, seed: u64) -> Result<Vec<DenseTensor3>> {
    check_target(target)?;
    let mut out = filters.to_vec();
    let mut slices: Vec<&mut [f32]> = out.iter_mut().map(|f| f.data_mut()).collect();
    prune_slices(&mut slices, target, seed);
    Ok(out)
}
