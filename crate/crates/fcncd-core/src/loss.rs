//! Rank-weighted pairwise losses and their aggregation over item blocks.
//!
//! Each loss exists twice: as a plain closed-form function over scores, and
//! as a [`DiffGraph`] segment appended after a score node for training. The
//! closed forms double as oracles for the graph route in tests.

use serde::{Deserialize, Serialize};

use crate::data::{BlockType, RankVector};
use crate::error::{Error, Result};
use crate::numerics::{softplus, Array, DiffGraph, NodeId};

/// Which pairwise objective to aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// Pair loss weighted by the inverse rank gap: -ln s(l/(r_i - r_j) (y_i - y_j)).
    WeightedBpr,
    /// Sign-only pair loss: -ln s(sgn(r_i - r_j) (y_i - y_j)).
    OriginalBpr,
    /// Listwise log-likelihood of the full ordering.
    List,
}

/// Pair loss selection plus its weighting coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairLossSpec {
    pub kind: LossKind,
    pub lambda: f64,
}

impl PairLossSpec {
    pub fn new(kind: LossKind, lambda: f64) -> Result<Self> {
        if matches!(kind, LossKind::WeightedBpr) && lambda <= 0.0 {
            return Err(Error::Config(format!(
                "weighted pair loss needs lambda > 0, got {lambda}"
            )));
        }
        Ok(PairLossSpec { kind, lambda })
    }
}

/// -ln s(l/(r_i - r_j) * (y_i - y_j)), computed as softplus of the negated
/// argument; the naive form overflows for large magnitudes.
pub fn weighted_bpr_pair(y_i: f64, y_j: f64, r_i: u32, r_j: u32, lambda: f64) -> Result<f64> {
    if r_i == r_j {
        return Err(Error::Data(format!("pair loss undefined for tied ranks {r_i}")));
    }
    let gap = r_i as f64 - r_j as f64;
    Ok(softplus(-(lambda / gap) * (y_i - y_j)))
}

/// -ln s(sgn(r_i - r_j) * (y_i - y_j)).
pub fn original_bpr_pair(y_i: f64, y_j: f64, r_i: u32, r_j: u32) -> Result<f64> {
    if r_i == r_j {
        return Err(Error::Data(format!("pair loss undefined for tied ranks {r_i}")));
    }
    let sign = if r_i > r_j { 1.0 } else { -1.0 };
    Ok(softplus(-sign * (y_i - y_j)))
}

/// Unordered index pairs (i, j) with i < j.
fn index_pairs(t: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..t).flat_map(move |i| (i + 1..t).map(move |j| (i, j)))
}

/// Mean weighted pair loss over all C(t,2) pairs of a full ranking.
pub fn block_loss_rank(scores: &[f64], ranks: &RankVector, lambda: f64) -> Result<f64> {
    if ranks.block_type != BlockType::Rank || ranks.check().is_some() {
        return Err(Error::Data("block_loss_rank needs a full RANK permutation".into()));
    }
    expect_len(scores, ranks)?;
    let t = scores.len();
    let mut total = 0.0;
    for (i, j) in index_pairs(t) {
        total += weighted_bpr_pair(scores[i], scores[j], ranks.values[i], ranks.values[j], lambda)?;
    }
    Ok(total / pair_count(t) as f64)
}

/// Weighted pair loss over distinct-rank pairs of a MOLE (or PICK) response,
/// normalized by C(t,2) - C(t-2,2): the number of pairs that involve the
/// most- or least-conforming item.
pub fn block_loss_mole(scores: &[f64], ranks: &RankVector, lambda: f64) -> Result<f64> {
    if ranks.block_type == BlockType::Rank || ranks.check().is_some() {
        return Err(Error::Data(
            "block_loss_mole needs a valid MOLE or PICK response".into(),
        ));
    }
    expect_len(scores, ranks)?;
    let t = scores.len();
    let mut total = 0.0;
    for (i, j) in index_pairs(t) {
        if ranks.values[i] != ranks.values[j] {
            total +=
                weighted_bpr_pair(scores[i], scores[j], ranks.values[i], ranks.values[j], lambda)?;
        }
    }
    Ok(total / mole_pair_count(t) as f64)
}

/// Listwise loss: items sorted by descending true rank (ties broken by item
/// index), then -(1/T) sum_i (y_(i) - ln sum_{j>=i} e^{y_(j)}).
pub fn block_loss_list(scores: &[f64], ranks: &RankVector) -> Result<f64> {
    if ranks.check().is_some() {
        return Err(Error::Data("block_loss_list needs a valid response".into()));
    }
    expect_len(scores, ranks)?;
    let order = list_order(ranks);
    let t = scores.len();
    let ordered: Vec<f64> = order.iter().map(|&i| scores[i]).collect();
    // suffix log-sum-exp, stabilized by the running maximum
    let mut total = 0.0;
    for i in 0..t {
        let tail = &ordered[i..];
        let m = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + tail.iter().map(|y| (y - m).exp()).sum::<f64>().ln();
        total += ordered[i] - lse;
    }
    Ok(-total / t as f64)
}

/// Dispatches on the spec's kind; `List` ignores lambda.
pub fn block_loss(scores: &[f64], ranks: &RankVector, spec: PairLossSpec) -> Result<f64> {
    match spec.kind {
        LossKind::WeightedBpr => match ranks.block_type {
            BlockType::Rank => block_loss_rank(scores, ranks, spec.lambda),
            _ => block_loss_mole(scores, ranks, spec.lambda),
        },
        LossKind::OriginalBpr => {
            // sign-only weighting is lambda = |r_i - r_j| pointwise; reuse the
            // pair iteration with per-pair sign handling
            expect_len(scores, ranks)?;
            if ranks.check().is_some() {
                return Err(Error::Data("block_loss needs a valid response".into()));
            }
            let t = scores.len();
            let mut total = 0.0;
            let mut pairs = 0usize;
            for (i, j) in index_pairs(t) {
                if ranks.values[i] != ranks.values[j] {
                    total += original_bpr_pair(scores[i], scores[j], ranks.values[i], ranks.values[j])?;
                    pairs += 1;
                }
            }
            let denom = match ranks.block_type {
                BlockType::Rank => pair_count(t),
                _ => mole_pair_count(t),
            };
            debug_assert_eq!(pairs, denom);
            Ok(total / denom as f64)
        }
        LossKind::List => block_loss_list(scores, ranks),
    }
}

/// C(t,2).
pub fn pair_count(t: usize) -> usize {
    t * (t - 1) / 2
}

/// C(t,2) - C(t-2,2): pairs with distinct ranks in a MOLE response.
pub fn mole_pair_count(t: usize) -> usize {
    pair_count(t) - if t >= 4 { pair_count(t - 2) } else { 0 }
}

/// Items ordered by descending true rank, ties broken by lower index first.
fn list_order(ranks: &RankVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by(|&a, &b| {
        ranks.values[b]
            .cmp(&ranks.values[a])
            .then(a.cmp(&b))
    });
    order
}

fn expect_len(scores: &[f64], ranks: &RankVector) -> Result<()> {
    if scores.len() != ranks.len() {
        return Err(Error::shape(
            "block loss",
            format!("{} scores vs {} ranks", scores.len(), ranks.len()),
        ));
    }
    if scores.is_empty() {
        return Err(Error::Data("empty block".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Graph builders.
//
// `scores` is a (rows x 1) node holding one score per item, laid out
// record-major; `ranks_per_record[r]` aligns with rows
// offsets[r]..offsets[r]+t. Each builder returns a scalar node with the mean
// block loss over the batch.
// ---------------------------------------------------------------------------

/// Appends the mean pairwise block loss for a batch of responses.
pub fn append_pair_loss(
    graph: &mut DiffGraph,
    scores: NodeId,
    ranks_per_record: &[&RankVector],
    spec: PairLossSpec,
) -> Result<NodeId> {
    if matches!(spec.kind, LossKind::List) {
        return append_list_loss(graph, scores, ranks_per_record);
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut coeff = Vec::new();
    let mut weight = Vec::new();
    let records = ranks_per_record.len() as f64;
    let mut offset = 0usize;
    for ranks in ranks_per_record {
        if let Some(msg) = ranks.check() {
            return Err(Error::Data(msg));
        }
        let t = ranks.len();
        let denom = match ranks.block_type {
            BlockType::Rank => pair_count(t),
            _ => mole_pair_count(t),
        } as f64;
        for (i, j) in index_pairs(t) {
            let (ri, rj) = (ranks.values[i], ranks.values[j]);
            if ri == rj {
                continue;
            }
            let gap = ri as f64 - rj as f64;
            let c = match spec.kind {
                LossKind::WeightedBpr => spec.lambda / gap,
                LossKind::OriginalBpr => gap.signum(),
                LossKind::List => unreachable!(),
            };
            left.push(offset + i);
            right.push(offset + j);
            coeff.push(c);
            weight.push(1.0 / (denom * records));
        }
        offset += t;
    }

    let yi = graph.gather_rows(scores, left);
    let yj = graph.gather_rows(scores, right);
    let diff = graph.sub(yi, yj);
    let coeff_node = graph.constant(Array::column(coeff)?);
    let scaled = graph.mul(diff, coeff_node);
    let neg = graph.negate(scaled);
    let losses = graph.softplus(neg);
    let weight_node = graph.constant(Array::column(weight)?);
    let weighted = graph.mul(losses, weight_node);
    Ok(graph.sum(weighted))
}

/// Appends the mean listwise loss for a batch of responses. All records must
/// share one block size so the per-term average folds into a single mean.
pub fn append_list_loss(
    graph: &mut DiffGraph,
    scores: NodeId,
    ranks_per_record: &[&RankVector],
) -> Result<NodeId> {
    let mut order = Vec::new();
    let mut offset = 0usize;
    let t0 = ranks_per_record
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::Data("empty batch".into()))?;
    for ranks in ranks_per_record {
        if let Some(msg) = ranks.check() {
            return Err(Error::Data(msg));
        }
        if ranks.len() != t0 {
            return Err(Error::Data("list loss needs equal block sizes".into()));
        }
        for i in list_order(ranks) {
            order.push(offset + i);
        }
        offset += ranks.len();
    }
    let total_rows = order.len();

    // block-diagonal suffix-sum matrix: row i sums e^{y_(j)} for j >= i
    // within the same record
    let mut mask = vec![0.0; total_rows * total_rows];
    for rec in 0..ranks_per_record.len() {
        let base = rec * t0;
        for i in 0..t0 {
            for j in i..t0 {
                mask[(base + i) * total_rows + (base + j)] = 1.0;
            }
        }
    }

    let ordered = graph.gather_rows(scores, order);
    let exp = graph.exp(ordered);
    let mask_node = graph.constant(Array::new(vec![total_rows, total_rows], mask)?);
    let suffix = graph.matmul(mask_node, exp);
    let log_suffix = graph.log(suffix);
    let terms = graph.sub(ordered, log_suffix);
    let neg = graph.negate(terms);
    Ok(graph.mean(neg))
}

/// Converts a block response into ordered (winner, loser) item index pairs,
/// one per pair of items with distinct ranks. A RANK-t response yields
/// C(t,2) pairs; a MOLE-t response yields C(t,2) - C(t-2,2).
pub fn comparable_pairs(ranks: &RankVector) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, j) in index_pairs(ranks.len()) {
        let (ri, rj) = (ranks.values[i], ranks.values[j]);
        if ri == rj {
            continue;
        }
        out.push(if ri > rj { (i, j) } else { (j, i) });
    }
    out
}

/// Appends the mean logistic pair loss P(i beats j) = s(y_i - y_j) with
/// cross-entropy against the observed order; pairs with tied ranks are
/// skipped. Used by the pairwise-trained baselines.
pub fn append_logistic_pair_loss(
    graph: &mut DiffGraph,
    scores: NodeId,
    ranks_per_record: &[&RankVector],
) -> Result<NodeId> {
    let mut winner = Vec::new();
    let mut loser = Vec::new();
    let mut offset = 0usize;
    for ranks in ranks_per_record {
        for (w, l) in comparable_pairs(ranks) {
            winner.push(offset + w);
            loser.push(offset + l);
        }
        offset += ranks.len();
    }
    if winner.is_empty() {
        return Err(Error::Data("no comparable pairs in batch".into()));
    }
    let yw = graph.gather_rows(scores, winner);
    let yl = graph.gather_rows(scores, loser);
    let diff = graph.sub(yw, yl);
    let neg = graph.negate(diff);
    let losses = graph.softplus(neg);
    Ok(graph.mean(losses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{finite_difference_gradients, ParamSet};

    fn rank(values: Vec<u32>) -> RankVector {
        RankVector::new(BlockType::Rank, values).unwrap()
    }

    fn mole(values: Vec<u32>) -> RankVector {
        RankVector::new(BlockType::Mole, values).unwrap()
    }

    const TOL: f64 = 1e-10;

    #[test]
    fn weighted_pair_closed_forms() {
        // equal scores: -ln s(0) = ln 2
        let ln2 = std::f64::consts::LN_2;
        assert!((weighted_bpr_pair(0.4, 0.4, 2, 1, 3.0).unwrap() - ln2).abs() < TOL);

        // lambda 1, rank gap 1, score gap 1: -ln s(1) = ln(1 + e^-1)
        let expect = (1.0 + (-1.0f64).exp()).ln();
        assert!((weighted_bpr_pair(1.0, 0.0, 2, 1, 1.0).unwrap() - expect).abs() < TOL);

        // swapping both the scores and the ranks leaves the argument intact
        let a = weighted_bpr_pair(0.9, 0.2, 3, 1, 5.0).unwrap();
        let b = weighted_bpr_pair(0.2, 0.9, 1, 3, 5.0).unwrap();
        assert!((a - b).abs() < TOL);

        assert!(weighted_bpr_pair(0.1, 0.2, 2, 2, 1.0).is_err());
    }

    #[test]
    fn original_pair_closed_forms() {
        // r_i > r_j with score gap 2: -ln s(2)
        let expect = (1.0 + (-2.0f64).exp()).ln();
        assert!((original_bpr_pair(2.0, 0.0, 3, 1).unwrap() - expect).abs() < TOL);

        let ln2 = std::f64::consts::LN_2;
        assert!((original_bpr_pair(0.7, 0.7, 1, 2).unwrap() - ln2).abs() < TOL);

        // adjacent ranks with lambda 1 coincide with the weighted form
        let w = weighted_bpr_pair(0.8, 0.3, 2, 1, 1.0).unwrap();
        let o = original_bpr_pair(0.8, 0.3, 2, 1).unwrap();
        assert!((w - o).abs() < TOL);

        assert!(original_bpr_pair(0.1, 0.2, 2, 2).is_err());
    }

    #[test]
    fn rank_block_loss_values() {
        // single pair: -ln s(1 * (0.7 - 0.3)) = -ln s(0.4)
        let expect = (1.0 + (-0.4f64).exp()).ln();
        let got = block_loss_rank(&[0.7, 0.3], &rank(vec![2, 1]), 1.0).unwrap();
        assert!((got - expect).abs() < TOL);

        // uniform scores: every pair contributes ln 2
        let ln2 = std::f64::consts::LN_2;
        let got = block_loss_rank(&[0.5, 0.5, 0.5], &rank(vec![3, 1, 2]), 7.0).unwrap();
        assert!((got - ln2).abs() < TOL);

        // consistent relabeling of block items leaves the loss unchanged
        let base = block_loss_rank(&[0.9, 0.1, 0.5], &rank(vec![3, 1, 2]), 2.0).unwrap();
        let permuted = block_loss_rank(&[0.1, 0.5, 0.9], &rank(vec![1, 2, 3]), 2.0).unwrap();
        assert!((base - permuted).abs() < TOL);

        assert!(block_loss_rank(&[0.1, 0.2], &RankVector::from_raw(BlockType::Rank, vec![1, 1]), 1.0).is_err());
    }

    #[test]
    fn mole_denominators_are_exact() {
        assert_eq!(mole_pair_count(4), 5);
        assert_eq!(mole_pair_count(3), 3);

        // uniform scores again give ln 2 regardless of the denominators
        let ln2 = std::f64::consts::LN_2;
        let got = block_loss_mole(&[0.4; 4], &mole(vec![3, 2, 2, 1]), 2.0).unwrap();
        assert!((got - ln2).abs() < TOL);

        // hand-built t=4 check: exactly 5 contributing pairs
        let scores = [0.9, 0.6, 0.4, 0.2];
        let ranks = mole(vec![3, 2, 2, 1]);
        let lambda = 2.0;
        let mut expect = 0.0;
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
            expect +=
                weighted_bpr_pair(scores[i], scores[j], ranks.values[i], ranks.values[j], lambda)
                    .unwrap();
        }
        expect /= 5.0;
        let got = block_loss_mole(&scores, &ranks, lambda).unwrap();
        assert!((got - expect).abs() < TOL);
    }

    #[test]
    fn list_loss_values() {
        // equal scores, T=3: (ln 3 + ln 2)/3
        let expect = (3.0f64.ln() + 2.0f64.ln()) / 3.0;
        let got = block_loss_list(&[0.4; 3], &rank(vec![1, 2, 3])).unwrap();
        assert!((got - expect).abs() < TOL);

        // single item: y - ln e^y = 0
        let got =
            block_loss_list(&[0.9], &RankVector::from_raw(BlockType::Rank, vec![1])).unwrap();
        assert!(got.abs() < TOL);

        // shift invariance
        let scores = [0.2, 0.8, 0.5];
        let shifted: Vec<f64> = scores.iter().map(|s| s + 11.5).collect();
        let r = rank(vec![2, 3, 1]);
        let a = block_loss_list(&scores, &r).unwrap();
        let b = block_loss_list(&shifted, &r).unwrap();
        assert!((a - b).abs() < TOL);
    }

    #[test]
    fn pair_losses_decrease_in_score_gap() {
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let gap = -1.0 + 0.15 * k as f64;
            let l = weighted_bpr_pair(gap, 0.0, 3, 1, 2.0).unwrap();
            assert!(l > 0.0);
            assert!(l < last);
            last = l;
        }
    }

    /// The graph route must agree with the closed forms and with finite
    /// differences.
    #[test]
    fn graph_losses_match_closed_forms_and_fd() {
        let cases: Vec<(Vec<f64>, RankVector)> = vec![
            (vec![0.7, 0.3], rank(vec![2, 1])),
            (vec![0.9, 0.1, 0.5], rank(vec![3, 1, 2])),
            (vec![0.9, 0.6, 0.4, 0.2], mole(vec![3, 2, 2, 1])),
            (vec![0.2, 0.8, 0.5, 0.1], mole(vec![2, 3, 2, 1])),
        ];
        for spec in [
            PairLossSpec::new(LossKind::WeightedBpr, 2.5).unwrap(),
            PairLossSpec::new(LossKind::OriginalBpr, 1.0).unwrap(),
            PairLossSpec::new(LossKind::List, 1.0).unwrap(),
        ] {
            for (scores, ranks) in &cases {
                let mut params = ParamSet::new();
                params
                    .insert("y", Array::column(scores.clone()).unwrap())
                    .unwrap();
                let mut g = DiffGraph::new();
                let y = g.leaf("y");
                let loss = append_pair_loss(&mut g, y, &[ranks], spec).unwrap();
                g.set_output(loss);

                let (value, grads) = g.forward_backward(&params).unwrap();
                let direct = block_loss(scores, ranks, spec).unwrap();
                assert!(
                    (value - direct).abs() < TOL,
                    "{spec:?} {scores:?}: graph {value} vs direct {direct}"
                );

                let max_rel = finite_difference_gradients(&g, &params, 1e-5)
                    .max_relative_error(&params, &grads);
                assert!(max_rel < 1e-4, "{spec:?}: rel err {max_rel}");
            }
        }
    }

    #[test]
    fn logistic_pair_loss_matches_fd() {
        let ranks = mole(vec![3, 2, 2, 1]);
        let mut params = ParamSet::new();
        params
            .insert("y", Array::column(vec![0.3, -0.2, 0.9, 0.4]).unwrap())
            .unwrap();
        let mut g = DiffGraph::new();
        let y = g.leaf("y");
        let loss = append_logistic_pair_loss(&mut g, y, &[&ranks]).unwrap();
        g.set_output(loss);
        let (value, grads) = g.forward_backward(&params).unwrap();
        // 5 comparable pairs; equal-score pair contributes ln 2
        assert!(value > 0.0);
        let max_rel =
            finite_difference_gradients(&g, &params, 1e-5).max_relative_error(&params, &grads);
        assert!(max_rel < 1e-4, "rel err {max_rel}");
    }

    #[test]
    fn batch_loss_is_mean_over_records() {
        let r1 = rank(vec![2, 1]);
        let r2 = rank(vec![1, 2]);
        let spec = PairLossSpec::new(LossKind::WeightedBpr, 2.0).unwrap();

        let mut params = ParamSet::new();
        params
            .insert("y", Array::column(vec![0.7, 0.3, 0.1, 0.6]).unwrap())
            .unwrap();
        let mut g = DiffGraph::new();
        let y = g.leaf("y");
        let loss = append_pair_loss(&mut g, y, &[&r1, &r2], spec).unwrap();
        g.set_output(loss);
        let (value, _) = g.forward_backward(&params).unwrap();

        let d1 = block_loss(&[0.7, 0.3], &r1, spec).unwrap();
        let d2 = block_loss(&[0.1, 0.6], &r2, spec).unwrap();
        assert!((value - (d1 + d2) / 2.0).abs() < TOL);
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn weighted_pair_is_positive_and_swap_invariant(
                yi in -3.0f64..3.0,
                yj in -3.0f64..3.0,
                lambda in 0.1f64..10.0,
            ) {
                let l = weighted_bpr_pair(yi, yj, 3, 1, lambda).unwrap();
                prop_assert!(l > 0.0);
                let swapped = weighted_bpr_pair(yj, yi, 1, 3, lambda).unwrap();
                prop_assert!((l - swapped).abs() < 1e-12);
            }

            #[test]
            fn list_loss_is_shift_invariant(
                scores in proptest::collection::vec(-2.0f64..2.0, 4),
                shift in -5.0f64..5.0,
            ) {
                let r = mole(vec![3, 2, 2, 1]);
                let a = block_loss_list(&scores, &r).unwrap();
                let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
                let b = block_loss_list(&shifted, &r).unwrap();
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
