use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use crate::data::ResponseDataset;
use crate::error::{Error, Result};

fn check_fraction(train_fraction: f64) -> Result<()> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    Ok(())
}

/// Partitions whole blocks into train and test sides; every record follows
/// its block. Test items are therefore unseen during training.
pub fn split_by_block(
    dataset: &ResponseDataset,
    train_fraction: f64,
    rng: &mut ChaCha20Rng,
) -> Result<(ResponseDataset, ResponseDataset)> {
    check_fraction(train_fraction)?;
    let num_blocks = dataset.num_blocks();
    if num_blocks < 2 {
        return Err(Error::Config(format!(
            "need at least 2 blocks to split, got {num_blocks}"
        )));
    }
    let mut block_ids: Vec<usize> = (0..num_blocks).collect();
    block_ids.shuffle(rng);
    let n_train = ((num_blocks as f64 * train_fraction).round() as usize)
        .clamp(1, num_blocks - 1);
    let train_set: std::collections::HashSet<usize> =
        block_ids[..n_train].iter().copied().collect();

    let (train, test): (Vec<_>, Vec<_>) = dataset
        .records
        .iter()
        .cloned()
        .partition(|r| train_set.contains(&r.block));
    Ok((dataset.with_records(train), dataset.with_records(test)))
}

/// Splits individual block-response records into train and test sides. Each
/// block can appear on both sides for different participants, which matches
/// how performance prediction is evaluated.
pub fn split_records(
    dataset: &ResponseDataset,
    train_fraction: f64,
    rng: &mut ChaCha20Rng,
) -> Result<(ResponseDataset, ResponseDataset)> {
    check_fraction(train_fraction)?;
    let n = dataset.records.len();
    if n < 2 {
        return Err(Error::Config(format!(
            "need at least 2 records to split, got {n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let mut train_flag = vec![false; n];
    for &i in &idx[..n_train] {
        train_flag[i] = true;
    }
    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);
    for (i, rec) in dataset.records.iter().enumerate() {
        if train_flag[i] {
            train.push(rec.clone());
        } else {
            test.push(rec.clone());
        }
    }
    Ok((dataset.with_records(train), dataset.with_records(test)))
}
