//! Ranking accuracy and interpretability metrics.

use serde::{Deserialize, Serialize};

use crate::data::{RankVector, ResponseDataset};
use crate::error::{Error, Result};
use crate::model::rank_scores;

/// Per-block accuracy summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDiagnostic {
    pub block: usize,
    pub records: usize,
    /// Mean fraction of correctly ordered pairs.
    pub pair_accuracy: f64,
    /// Fraction of records whose full predicted ranking matches.
    pub exact_match: f64,
}

/// Evaluation results. `doa` is absent for models without a
/// dimension-interpretable ability profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub pra: f64,
    pub lra: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doa: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_block: Vec<BlockDiagnostic>,
}

/// Pairwise rank accuracy: per record, the fraction of distinct-rank item
/// pairs whose predicted score order agrees with the observed rank order;
/// averaged over records. Tied observed ranks are excluded from both counts.
pub fn pair_rank_accuracy<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a [f64], &'a RankVector)>,
{
    let mut total = 0.0;
    let mut count = 0usize;
    for (scores, ranks) in records {
        total += record_pair_accuracy(scores, ranks)?;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Data("no records to evaluate".into()));
    }
    Ok(total / count as f64)
}

fn record_pair_accuracy(scores: &[f64], ranks: &RankVector) -> Result<f64> {
    if scores.len() != ranks.len() {
        return Err(Error::shape(
            "pair_rank_accuracy",
            format!("{} scores vs {} ranks", scores.len(), ranks.len()),
        ));
    }
    let t = scores.len();
    let mut correct = 0usize;
    let mut valid = 0usize;
    for i in 0..t {
        for j in i + 1..t {
            let gap = ranks.values[i] as i64 - ranks.values[j] as i64;
            if gap == 0 {
                continue;
            }
            valid += 1;
            let diff = scores[i] - scores[j];
            if (gap > 0 && diff > 0.0) || (gap < 0 && diff < 0.0) {
                correct += 1;
            }
        }
    }
    if valid == 0 {
        return Err(Error::Data("record has no comparable pairs".into()));
    }
    Ok(correct as f64 / valid as f64)
}

/// Listwise rank accuracy: fraction of records whose predicted rank vector
/// equals the observed one. MOLE responses compare at the 1/2/3 level.
pub fn list_rank_accuracy<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a [f64], &'a RankVector)>,
{
    let mut hits = 0usize;
    let mut count = 0usize;
    for (scores, ranks) in records {
        let predicted = rank_scores(scores, ranks.block_type)?;
        if predicted.values == ranks.values {
            hits += 1;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::Data("no records to evaluate".into()));
    }
    Ok(hits as f64 / count as f64)
}

/// Degree of agreement between per-dimension abilities and observed rank
/// sums.
///
/// For each participant, S_k sums the participant's rank values over all
/// items of dimension k across their records. Over dimension pairs strictly
/// ordered on both sides, the agreement rate is the fraction where the
/// ability order matches the rank-sum order; ties on either side are
/// excluded from numerator and denominator. The result averages over
/// participants that have at least one comparable pair.
pub fn degree_of_agreement(abilities: &[Vec<f64>], dataset: &ResponseDataset) -> Result<f64> {
    let k = dataset.num_dimensions;
    let n = dataset.num_participants;
    if abilities.len() < n {
        return Err(Error::Data(format!(
            "abilities cover {} participants, dataset has {n}",
            abilities.len()
        )));
    }
    let mut rank_sums = vec![vec![0f64; k]; n];
    let mut answered = vec![false; n];
    for rec in &dataset.records {
        answered[rec.participant] = true;
        let block = &dataset.blocks[rec.block];
        for (pos, &item) in block.items.iter().enumerate() {
            rank_sums[rec.participant][dataset.q.dim_of(item)] +=
                rec.ranks.values[pos] as f64;
        }
    }

    let mut total = 0.0;
    let mut participants = 0usize;
    for p in 0..n {
        if !answered[p] {
            continue;
        }
        let f = &abilities[p];
        if f.len() != k {
            return Err(Error::shape(
                "degree_of_agreement",
                format!("ability vector has {} entries, expected {k}", f.len()),
            ));
        }
        let s = &rank_sums[p];
        let mut agree = 0usize;
        let mut valid = 0usize;
        for a in 0..k {
            for b in a + 1..k {
                let df = f[a] - f[b];
                let ds = s[a] - s[b];
                if df == 0.0 || ds == 0.0 {
                    continue;
                }
                valid += 1;
                if df.signum() == ds.signum() {
                    agree += 1;
                }
            }
        }
        if valid > 0 {
            total += agree as f64 / valid as f64;
            participants += 1;
        }
    }
    if participants == 0 {
        return Err(Error::Data(
            "no participant with responses and comparable dimension pairs".into(),
        ));
    }
    Ok(total / participants as f64)
}

/// Per-block pair accuracy and exact-match diagnostics.
pub fn per_block_diagnostics<'a, I>(records: I) -> Result<Vec<BlockDiagnostic>>
where
    I: IntoIterator<Item = (usize, &'a [f64], &'a RankVector)>,
{
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<usize, (usize, f64, usize)> = BTreeMap::new();
    for (block, scores, ranks) in records {
        let pa = record_pair_accuracy(scores, ranks)?;
        let predicted = rank_scores(scores, ranks.block_type)?;
        let entry = acc.entry(block).or_insert((0, 0.0, 0));
        entry.0 += 1;
        entry.1 += pa;
        if predicted.values == ranks.values {
            entry.2 += 1;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(block, (n, pa_sum, hits))| BlockDiagnostic {
            block,
            records: n,
            pair_accuracy: pa_sum / n as f64,
            exact_match: hits as f64 / n as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{BlockType, ItemBlock, QMatrix, ResponseRecord};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn rank(values: Vec<u32>) -> RankVector {
        RankVector::new(BlockType::Rank, values).unwrap()
    }

    #[test]
    fn pra_hand_example() {
        // true [3,2,1], scores [0.9, 0.1, 0.5]: pairs (0,1) and (0,2)
        // correct, (1,2) wrong
        let truth = rank(vec![3, 2, 1]);
        let scores = [0.9, 0.1, 0.5];
        let got = pair_rank_accuracy([(&scores[..], &truth)]).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions_reach_one() {
        let truth = rank(vec![2, 3, 1]);
        let scores = [0.4, 0.9, 0.1];
        assert_eq!(pair_rank_accuracy([(&scores[..], &truth)]).unwrap(), 1.0);
        assert_eq!(list_rank_accuracy([(&scores[..], &truth)]).unwrap(), 1.0);
    }

    #[test]
    fn random_scores_hit_half_pra_on_rank3() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let truth = rank(vec![3, 1, 2]);
        let mut scored = Vec::new();
        for _ in 0..20_000 {
            scored.push([rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let got =
            pair_rank_accuracy(scored.iter().map(|s| (&s[..], &truth))).unwrap();
        assert!((got - 0.5).abs() < 0.005, "{got}");
    }

    #[test]
    fn random_scores_hit_uniform_lra() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        // RANK-3: 6 orderings
        let truth = rank(vec![3, 1, 2]);
        let mut scored = Vec::new();
        for _ in 0..60_000 {
            scored.push([rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let got = list_rank_accuracy(scored.iter().map(|s| (&s[..], &truth))).unwrap();
        assert!((got - 1.0 / 6.0).abs() < 0.01, "{got}");

        // MOLE-4: 12 (most, least) patterns
        let truth = RankVector::new(BlockType::Mole, vec![3, 2, 2, 1]).unwrap();
        let mut scored = Vec::new();
        for _ in 0..60_000 {
            scored.push([
                rng.gen::<f64>(),
                rng.gen::<f64>(),
                rng.gen::<f64>(),
                rng.gen::<f64>(),
            ]);
        }
        let got = list_rank_accuracy(scored.iter().map(|s| (&s[..], &truth))).unwrap();
        assert!((got - 1.0 / 12.0).abs() < 0.01, "{got}");
    }

    #[test]
    fn mole_ties_are_excluded_from_pra() {
        // only pairs involving rank 3 or rank 1 are comparable: 5 of 6
        let truth = RankVector::new(BlockType::Mole, vec![3, 2, 2, 1]).unwrap();
        // middle pair order is irrelevant
        let scores = [0.9, 0.2, 0.8, 0.1];
        let got = pair_rank_accuracy([(&scores[..], &truth)]).unwrap();
        assert_eq!(got, 1.0);
    }

    fn doa_dataset() -> ResponseDataset {
        // 1 participant, 2 dims, 2 RANK-2 blocks
        let q = QMatrix::new(2, vec![0, 1, 0, 1]).unwrap();
        ResponseDataset {
            num_participants: 1,
            num_items: 4,
            num_dimensions: 2,
            block_type: BlockType::Rank,
            q,
            blocks: vec![
                ItemBlock { id: 0, items: vec![0, 1] },
                ItemBlock { id: 1, items: vec![2, 3] },
            ],
            records: vec![
                ResponseRecord {
                    participant: 0,
                    block: 0,
                    ranks: rank(vec![2, 1]),
                },
                ResponseRecord {
                    participant: 0,
                    block: 1,
                    ranks: rank(vec![2, 1]),
                },
            ],
        }
    }

    #[test]
    fn doa_single_pair_agreement() {
        // S = (4, 2); abilities (0.8, 0.2) agree on the only pair
        let ds = doa_dataset();
        let got = degree_of_agreement(&[vec![0.8, 0.2]], &ds).unwrap();
        assert_eq!(got, 1.0);
        // reversed abilities disagree
        let got = degree_of_agreement(&[vec![0.2, 0.8]], &ds).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn doa_of_rank_sums_is_one() {
        // abilities proportional to the rank sums themselves
        let ds = doa_dataset();
        let got = degree_of_agreement(&[vec![4.0 / 6.0, 2.0 / 6.0]], &ds).unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn random_abilities_hover_at_half() {
        // many dims and blocks so each participant has many comparable pairs
        let k = 12;
        let items: Vec<usize> = (0..48).map(|m| m % k).collect();
        let q = QMatrix::new(k, items).unwrap();
        let blocks: Vec<ItemBlock> = (0..16)
            .map(|l| ItemBlock { id: l, items: (l * 3..l * 3 + 3).collect() })
            .collect();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let n = 400;
        let mut records = Vec::new();
        for p in 0..n {
            for b in &blocks {
                // random full ranking
                let mut order = vec![0usize, 1, 2];
                for i in (1..3).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                let mut values = vec![0u32; 3];
                for (pos, &it) in order.iter().enumerate() {
                    values[it] = (3 - pos) as u32;
                }
                records.push(ResponseRecord {
                    participant: p,
                    block: b.id,
                    ranks: rank(values),
                });
            }
        }
        let ds = ResponseDataset {
            num_participants: n,
            num_items: 48,
            num_dimensions: k,
            block_type: BlockType::Rank,
            q,
            blocks,
            records,
        };
        let abilities: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let got = degree_of_agreement(&abilities, &ds).unwrap();
        assert!((got - 0.5).abs() < 0.02, "{got}");
    }

    #[test]
    fn doa_rejects_missing_data() {
        let ds = doa_dataset();
        assert!(degree_of_agreement(&[], &ds).is_err());
        let empty = ds.with_records(vec![]);
        assert!(degree_of_agreement(&[vec![0.5, 0.5]], &empty).is_err());
    }
}
