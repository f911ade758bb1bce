//! Synthetic forced-choice datasets with known ground truth.
//!
//! Items get 2PL-style discrimination and difficulty parameters, participants
//! get correlated multivariate-normal latent traits, and block responses are
//! drawn from a Luce choice model over per-item endorsement probabilities.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::{
    encode_response, BlockType, ItemBlock, QMatrix, RankVector, RawChoice, ResponseDataset,
    ResponseRecord,
};
use crate::error::{Error, Result};
use crate::numerics::{fast_exp, sigmoid, Array};

/// How item utilities u = a (theta - b) become Luce choice strengths.
///
/// `Odds` is the classical Luce form, strength e^u (equivalently the odds
/// p/(1-p) of the endorsement probability); it matches sampling the item
/// with the largest Gumbel-noised utility. `Endorsement` uses the bounded
/// probability p = s(u) itself, which yields much noisier choices because
/// strengths can never exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceStrength {
    #[default]
    Odds,
    Endorsement,
}

/// Generation settings. `num_items` must equal `num_blocks * items_per_block`;
/// items cycle over dimensions so each block mixes distinct dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_participants: usize,
    pub num_dimensions: usize,
    pub num_items: usize,
    pub num_blocks: usize,
    pub items_per_block: usize,
    /// Bounds of the uniform discrimination distribution.
    pub discrimination_range: (f64, f64),
    pub difficulty_mean: f64,
    pub difficulty_sd: f64,
    /// Common off-diagonal covariance between trait dimensions (diagonal is 1).
    pub trait_covariance: f64,
    pub block_type: BlockType,
    #[serde(default)]
    pub strength: ChoiceStrength,
    pub seed: u64,
}

impl SimConfig {
    /// The standard MOLE-4 benchmark layout: 1000 participants, 24
    /// dimensions, 480 items in 120 four-item blocks.
    pub fn sim_mole(seed: u64) -> Self {
        SimConfig {
            num_participants: 1000,
            num_dimensions: 24,
            num_items: 480,
            num_blocks: 120,
            items_per_block: 4,
            discrimination_range: (0.75, 2.25),
            difficulty_mean: 0.0,
            difficulty_sd: 0.5,
            trait_covariance: 0.5,
            block_type: BlockType::Mole,
            strength: ChoiceStrength::Odds,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.discrimination_range;
        if self.num_participants == 0 || self.num_dimensions == 0 {
            return Err(Error::Config("counts must be positive".into()));
        }
        if self.num_items != self.num_blocks * self.items_per_block {
            return Err(Error::Config(format!(
                "num_items {} must equal num_blocks {} * items_per_block {}",
                self.num_items, self.num_blocks, self.items_per_block
            )));
        }
        if self.items_per_block > self.num_dimensions {
            return Err(Error::Config(format!(
                "blocks of {} items cannot draw distinct dimensions from K = {}",
                self.items_per_block, self.num_dimensions
            )));
        }
        match self.block_type {
            BlockType::Mole if self.items_per_block < 3 => {
                return Err(Error::Config("MOLE blocks need at least 3 items".into()))
            }
            BlockType::Rank if self.items_per_block < 2 => {
                return Err(Error::Config("RANK blocks need at least 2 items".into()))
            }
            BlockType::Pick => {
                return Err(Error::Config(
                    "PICK response simulation is not supported".into(),
                ))
            }
            _ => {}
        }
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::Config(format!(
                "discrimination range ({lo}, {hi}) must satisfy 0 < low < high"
            )));
        }
        if self.difficulty_sd <= 0.0 {
            return Err(Error::Config("difficulty sd must be positive".into()));
        }
        if self.trait_covariance.abs() >= 1.0 {
            return Err(Error::Config(
                "trait covariance magnitude must be below 1".into(),
            ));
        }
        Ok(())
    }
}

/// Ground truth kept alongside generated responses.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTruth {
    /// Latent traits, one row of `num_dimensions` per participant.
    pub theta: Array,
    pub discrimination: Vec<f64>,
    pub difficulty: Vec<f64>,
}

impl SimTruth {
    pub fn theta_row(&self, participant: usize) -> &[f64] {
        self.theta.row(participant)
    }
}

/// Draws per-item discrimination (uniform) and difficulty (normal) values.
pub fn sample_item_params(config: &SimConfig, rng: &mut ChaCha20Rng) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = config.discrimination_range;
    let unif = Uniform::new(lo, hi);
    let norm = Normal::new(config.difficulty_mean, config.difficulty_sd)
        .expect("difficulty sd validated positive");
    let a = (0..config.num_items).map(|_| unif.sample(rng)).collect();
    let b = (0..config.num_items).map(|_| norm.sample(rng)).collect();
    (a, b)
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
fn cholesky(k: usize, matrix: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = matrix[i * k + j];
            for p in 0..j {
                sum -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Config(
                        "trait covariance matrix is not positive definite".into(),
                    ));
                }
                l[i * k + j] = sum.sqrt();
            } else {
                l[i * k + j] = sum / l[j * k + j];
            }
        }
    }
    Ok(l)
}

/// Draws participant traits from MVN(0, S) with unit diagonal and constant
/// off-diagonal covariance, via the Cholesky factor of S.
pub fn sample_traits(config: &SimConfig, rng: &mut ChaCha20Rng) -> Result<Array> {
    let k = config.num_dimensions;
    let rho = config.trait_covariance;
    let mut cov = vec![rho; k * k];
    for i in 0..k {
        cov[i * k + i] = 1.0;
    }
    let l = cholesky(k, &cov)?;

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut theta = Vec::with_capacity(config.num_participants * k);
    let mut z = vec![0.0; k];
    for _ in 0..config.num_participants {
        for zi in z.iter_mut() {
            *zi = normal.sample(rng);
        }
        for i in 0..k {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += l[i * k + j] * z[j];
            }
            theta.push(acc);
        }
    }
    Array::new(vec![config.num_participants, k], theta)
}

/// 2PL utilities a_i (theta_{q_i} - b_i) for every item of a block.
pub fn block_utilities(
    theta_row: &[f64],
    block: &ItemBlock,
    q: &QMatrix,
    a: &[f64],
    b: &[f64],
) -> Vec<f64> {
    block
        .items
        .iter()
        .map(|&item| a[item] * (theta_row[q.dim_of(item)] - b[item]))
        .collect()
}

/// Endorsement probabilities s(u) for every item of a block.
pub fn block_endorsements(
    theta_row: &[f64],
    block: &ItemBlock,
    q: &QMatrix,
    a: &[f64],
    b: &[f64],
) -> Vec<f64> {
    block_utilities(theta_row, block, q, a, b)
        .into_iter()
        .map(sigmoid)
        .collect()
}

/// Luce strengths for the most-conforming draw and for the least-conforming
/// draw: (f(u), f(-u)) with f = exp for `Odds` and f = s for `Endorsement`.
pub fn choice_weights(utilities: &[f64], strength: ChoiceStrength) -> (Vec<f64>, Vec<f64>) {
    match strength {
        ChoiceStrength::Odds => (
            utilities.iter().map(|&u| fast_exp(u)).collect(),
            utilities.iter().map(|&u| fast_exp(-u)).collect(),
        ),
        ChoiceStrength::Endorsement => (
            utilities.iter().map(|&u| sigmoid(u)).collect(),
            utilities.iter().map(|&u| sigmoid(-u)).collect(),
        ),
    }
}

/// Closed-form law of the MOLE draw: marginal probabilities that each item
/// is chosen most conforming and least conforming, given the Luce strengths
/// of both stages.
///
///   P(most = i)  = w_i / sum(w)
///   P(least = j) = sum_{i != j} P(most = i) * v_j / sum_{k != i} v_k
pub fn mole_choice_probabilities(most_w: &[f64], least_w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let t = most_w.len();
    let total: f64 = most_w.iter().sum();
    let most: Vec<f64> = most_w.iter().map(|&w| w / total).collect();
    let least_total: f64 = least_w.iter().sum();
    let mut least = vec![0.0; t];
    for (i, &pm) in most.iter().enumerate() {
        let denom = least_total - least_w[i];
        for (j, lj) in least.iter_mut().enumerate() {
            if j != i {
                *lj += pm * least_w[j] / denom;
            }
        }
    }
    (most, least)
}

/// Luce draw: index sampled with probability weight[i] / sum(weights).
fn luce_draw(weights: &[f64], rng: &mut ChaCha20Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen_range(0.0..total);
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Samples a MOLE response: most conforming by Luce over the most-stage
/// strengths, least conforming by Luce over the least-stage strengths of the
/// remaining items.
pub fn simulate_mole_response(
    theta_row: &[f64],
    block: &ItemBlock,
    q: &QMatrix,
    a: &[f64],
    b: &[f64],
    strength: ChoiceStrength,
    rng: &mut ChaCha20Rng,
) -> Result<RankVector> {
    let t = block.size();
    if t < 3 {
        return Err(Error::Config(format!("MOLE needs t >= 3, block has {t}")));
    }
    let utilities = block_utilities(theta_row, block, q, a, b);
    let (most_w, mut least_w) = choice_weights(&utilities, strength);
    let most = luce_draw(&most_w, rng);
    least_w[most] = 0.0;
    let least = luce_draw(&least_w, rng);
    encode_response(BlockType::Mole, t, &RawChoice::Mole { most, least })
}

/// Samples a RANK response by sequential Luce sampling without replacement,
/// best first.
pub fn simulate_rank_response(
    theta_row: &[f64],
    block: &ItemBlock,
    q: &QMatrix,
    a: &[f64],
    b: &[f64],
    strength: ChoiceStrength,
    rng: &mut ChaCha20Rng,
) -> Result<RankVector> {
    let t = block.size();
    if t < 2 {
        return Err(Error::Config(format!("RANK needs t >= 2, block has {t}")));
    }
    let utilities = block_utilities(theta_row, block, q, a, b);
    let (mut most_w, _) = choice_weights(&utilities, strength);
    let mut order = Vec::with_capacity(t);
    for _ in 0..t {
        let pick = luce_draw(&most_w, rng);
        order.push(pick);
        most_w[pick] = 0.0;
    }
    encode_response(BlockType::Rank, t, &RawChoice::Rank(order))
}

/// Builds the full dataset plus its ground truth. Blocks take consecutive
/// items; item `m` targets dimension `m mod K`, so every block spans distinct
/// dimensions. Records are emitted participant-major.
pub fn generate(config: &SimConfig) -> Result<(ResponseDataset, SimTruth)> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);

    let item_dims: Vec<usize> = (0..config.num_items)
        .map(|m| m % config.num_dimensions)
        .collect();
    let q = QMatrix::new(config.num_dimensions, item_dims)?;
    let blocks: Vec<ItemBlock> = (0..config.num_blocks)
        .map(|l| ItemBlock {
            id: l,
            items: (l * config.items_per_block..(l + 1) * config.items_per_block).collect(),
        })
        .collect();

    let (a, b) = sample_item_params(config, &mut rng);
    let theta = sample_traits(config, &mut rng)?;

    let mut records = Vec::with_capacity(config.num_participants * config.num_blocks);
    for participant in 0..config.num_participants {
        let row = theta.row(participant);
        for block in &blocks {
            let ranks = match config.block_type {
                BlockType::Mole => {
                    simulate_mole_response(row, block, &q, &a, &b, config.strength, &mut rng)?
                }
                BlockType::Rank => {
                    simulate_rank_response(row, block, &q, &a, &b, config.strength, &mut rng)?
                }
                BlockType::Pick => unreachable!("rejected by validate"),
            };
            records.push(ResponseRecord {
                participant,
                block: block.id,
                ranks,
            });
        }
    }

    let dataset = ResponseDataset {
        num_participants: config.num_participants,
        num_items: config.num_items,
        num_dimensions: config.num_dimensions,
        block_type: config.block_type,
        q,
        blocks,
        records,
    };
    let truth = SimTruth {
        theta,
        discrimination: a,
        difficulty: b,
    };
    Ok((dataset, truth))
}

/// Writes `truth_theta.csv` and `truth_items.csv` into `dir`.
pub fn save_truth(truth: &SimTruth, dir: &Path) -> Result<()> {
    let k = truth.theta.cols();
    let mut theta = String::from("participant_id");
    for i in 1..=k {
        theta.push_str(&format!(",theta_{i}"));
    }
    theta.push('\n');
    for p in 0..truth.theta.rows() {
        theta.push_str(&p.to_string());
        for v in truth.theta.row(p) {
            theta.push_str(&format!(",{v}"));
        }
        theta.push('\n');
    }
    crate::data::io_write(&dir.join("truth_theta.csv"), &theta)?;

    let mut items = String::from("item_id,discrimination,difficulty\n");
    for (i, (a, b)) in truth
        .discrimination
        .iter()
        .zip(&truth.difficulty)
        .enumerate()
    {
        items.push_str(&format!("{i},{a},{b}\n"));
    }
    crate::data::io_write(&dir.join("truth_items.csv"), &items)
}

/// Reads ground truth written by [`save_truth`].
pub fn load_truth(theta_path: &Path, items_path: &Path) -> Result<SimTruth> {
    let read = |path: &Path| -> Result<Vec<String>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(text.lines().map(str::to_string).collect())
    };

    let lines = read(theta_path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let mut row = Vec::with_capacity(fields.len() - 1);
        for f in &fields[1..] {
            row.push(f.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: theta_path.display().to_string(),
                line: i + 1,
                message: format!("bad trait value {f:?}"),
            })?);
        }
        rows.push(row);
    }
    let k = rows.first().map(Vec::len).unwrap_or(0);
    let n = rows.len();
    let theta = Array::new(vec![n, k], rows.into_iter().flatten().collect())?;

    let lines = read(items_path)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: items_path.display().to_string(),
                line: i + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                path: items_path.display().to_string(),
                line: i + 1,
                message: format!("bad value {s:?}"),
            })
        };
        a.push(parse(fields[1])?);
        b.push(parse(fields[2])?);
    }
    Ok(SimTruth {
        theta,
        discrimination: a,
        difficulty: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::validate;

    fn small_config() -> SimConfig {
        SimConfig {
            num_participants: 20,
            num_dimensions: 6,
            num_items: 24,
            num_blocks: 6,
            items_per_block: 4,
            discrimination_range: (0.75, 2.25),
            difficulty_mean: 0.0,
            difficulty_sd: 0.5,
            trait_covariance: 0.5,
            block_type: BlockType::Mole,
            strength: ChoiceStrength::Odds,
            seed: 7,
        }
    }

    #[test]
    fn item_params_follow_their_laws() {
        let mut cfg = small_config();
        cfg.num_items = 100_000;
        cfg.num_blocks = 25_000;
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (a, b) = sample_item_params(&cfg, &mut rng);

        assert!(a.iter().all(|&v| (0.75..2.25).contains(&v)));
        let mean_a = a.iter().sum::<f64>() / a.len() as f64;
        assert!((mean_a - 1.5).abs() < 0.01, "mean {mean_a}");

        let mean_b = b.iter().sum::<f64>() / b.len() as f64;
        let sd_b =
            (b.iter().map(|v| (v - mean_b).powi(2)).sum::<f64>() / b.len() as f64).sqrt();
        assert!((sd_b - 0.5).abs() < 0.01, "sd {sd_b}");

        let mut rng2 = ChaCha20Rng::seed_from_u64(1);
        let (a2, _) = sample_item_params(&cfg, &mut rng2);
        assert_eq!(a, a2);
    }

    #[test]
    fn traits_have_unit_variance_and_target_correlation() {
        let mut cfg = small_config();
        cfg.num_participants = 100_000;
        cfg.num_dimensions = 2;
        cfg.items_per_block = 2;
        cfg.block_type = BlockType::Rank;
        cfg.num_items = 12;
        cfg.num_blocks = 6;
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let theta = sample_traits(&cfg, &mut rng).unwrap();

        let n = cfg.num_participants as f64;
        let col = |j: usize| -> Vec<f64> {
            (0..cfg.num_participants)
                .map(|i| theta.row(i)[j])
                .collect()
        };
        let x = col(0);
        let y = col(1);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let (mx, my) = (mean(&x), mean(&y));
        let var = |v: &[f64], m: f64| v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n;
        let (vx, vy) = (var(&x, mx), var(&y, my));
        let cov = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / n;
        let corr = cov / (vx * vy).sqrt();

        assert!((vx - 1.0).abs() < 0.02, "var x {vx}");
        assert!((vy - 1.0).abs() < 0.02, "var y {vy}");
        assert!((corr - 0.5).abs() < 0.02, "corr {corr}");

        // zero covariance gives independent unit normals
        cfg.trait_covariance = 0.0;
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let theta0 = sample_traits(&cfg, &mut rng).unwrap();
        let x0: Vec<f64> = (0..cfg.num_participants).map(|i| theta0.row(i)[0]).collect();
        let y0: Vec<f64> = (0..cfg.num_participants).map(|i| theta0.row(i)[1]).collect();
        let (mx0, my0) = (mean(&x0), mean(&y0));
        let cov0 = x0
            .iter()
            .zip(&y0)
            .map(|(a, b)| (a - mx0) * (b - my0))
            .sum::<f64>()
            / n;
        assert!(cov0.abs() < 0.02, "cov {cov0}");
    }

    #[test]
    fn mole_most_matches_luce_probability() {
        // endorsement strengths p = (0.9, 0.5, 0.1):
        // P(most = 0) = 0.9 / 1.5 = 0.6 exactly
        let p = [0.9, 0.5, 0.1];
        let complements: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
        let (most, least) = mole_choice_probabilities(&p, &complements);
        assert!((most[0] - 0.6).abs() < 1e-12);
        assert!((most.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((least.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        // Monte Carlo agreement with the closed form under both laws
        let q = QMatrix::new(3, vec![0, 1, 2]).unwrap();
        let block = ItemBlock { id: 0, items: vec![0, 1, 2] };
        // traits that give p = (0.9, 0.5, 0.1) with a = 1, b = 0
        let theta: Vec<f64> = p.iter().map(|v| (v / (1.0 - v)).ln()).collect();
        let a = vec![1.0; 3];
        let b = vec![0.0; 3];
        for strength in [ChoiceStrength::Endorsement, ChoiceStrength::Odds] {
            let utilities = block_utilities(&theta, &block, &q, &a, &b);
            let (most_w, least_w) = choice_weights(&utilities, strength);
            let (most, least) = mole_choice_probabilities(&most_w, &least_w);
            if strength == ChoiceStrength::Endorsement {
                assert!((most[0] - 0.6).abs() < 1e-12);
            }
            let mut rng = ChaCha20Rng::seed_from_u64(33);
            let draws = 100_000;
            let mut most_counts = [0usize; 3];
            let mut least_counts = [0usize; 3];
            for _ in 0..draws {
                let rv =
                    simulate_mole_response(&theta, &block, &q, &a, &b, strength, &mut rng)
                        .unwrap();
                most_counts[rv.values.iter().position(|&v| v == 3).unwrap()] += 1;
                least_counts[rv.values.iter().position(|&v| v == 1).unwrap()] += 1;
            }
            for i in 0..3 {
                let f_most = most_counts[i] as f64 / draws as f64;
                let f_least = least_counts[i] as f64 / draws as f64;
                assert!(
                    (f_most - most[i]).abs() < 0.01,
                    "{strength:?} most[{i}] {f_most} vs {}",
                    most[i]
                );
                assert!(
                    (f_least - least[i]).abs() < 0.01,
                    "{strength:?} least[{i}] {f_least} vs {}",
                    least[i]
                );
            }
        }
    }

    #[test]
    fn equal_endorsements_make_most_uniform() {
        let q = QMatrix::new(4, vec![0, 1, 2, 3]).unwrap();
        let block = ItemBlock { id: 0, items: vec![0, 1, 2, 3] };
        let theta = vec![0.0; 4];
        let a = vec![1.0; 4];
        let b = vec![0.0; 4];
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let rv = simulate_mole_response(&theta, &block, &q, &a, &b, ChoiceStrength::Odds, &mut rng)
                .unwrap();
            counts[rv.values.iter().position(|&v| v == 3).unwrap()] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let f = c as f64 / draws as f64;
            assert!((f - 0.25).abs() < 0.01, "item {i}: {f}");
        }
    }

    #[test]
    fn extreme_trait_dominates_most_choice() {
        // Luce normalizes over endorsements, so the pick probability tends
        // to 1 only when the competing endorsements vanish as well.
        let q = QMatrix::new(3, vec![0, 1, 2]).unwrap();
        let block = ItemBlock { id: 0, items: vec![0, 1, 2] };
        let theta = vec![40.0, -40.0, -40.0];
        let a = vec![1.5; 3];
        let b = vec![0.0; 3];
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let rv = simulate_mole_response(&theta, &block, &q, &a, &b, ChoiceStrength::Odds, &mut rng)
                .unwrap();
            assert_eq!(rv.values[0], 3);
        }
        // raising item0's trait strictly raises its most-choice probability
        let weights = |theta: &[f64]| {
            let u = block_utilities(theta, &block, &q, &a, &b);
            choice_weights(&u, ChoiceStrength::Odds)
        };
        let (w_low, v_low) = weights(&[0.0, 0.0, 0.0]);
        let (w_high, v_high) = weights(&[3.0, 0.0, 0.0]);
        let (low, _) = mole_choice_probabilities(&w_low, &v_low);
        let (high, _) = mole_choice_probabilities(&w_high, &v_high);
        assert!(high[0] > low[0]);
    }

    #[test]
    fn rank_first_pick_matches_luce() {
        let q = QMatrix::new(2, vec![0, 1]).unwrap();
        let block = ItemBlock { id: 0, items: vec![0, 1] };
        // p = (0.8, 0.2) -> P(item0 first) = 0.8
        let theta: Vec<f64> = [0.8f64, 0.2].iter().map(|p| (p / (1.0 - p)).ln()).collect();
        let a = vec![1.0; 2];
        let b = vec![0.0; 2];
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let draws = 100_000;
        let mut first0 = 0usize;
        for _ in 0..draws {
            let rv = simulate_rank_response(
                &theta,
                &block,
                &q,
                &a,
                &b,
                ChoiceStrength::Endorsement,
                &mut rng,
            )
            .unwrap();
            if rv.values[0] == 2 {
                first0 += 1;
            }
        }
        let f = first0 as f64 / draws as f64;
        assert!((f - 0.8).abs() < 0.01, "{f}");
    }

    #[test]
    fn equal_endorsements_make_rank_orderings_uniform() {
        let q = QMatrix::new(3, vec![0, 1, 2]).unwrap();
        let block = ItemBlock { id: 0, items: vec![0, 1, 2] };
        let theta = vec![0.0; 3];
        let a = vec![1.0; 3];
        let b = vec![0.0; 3];
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let draws = 60_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            let rv = simulate_rank_response(&theta, &block, &q, &a, &b, ChoiceStrength::Odds, &mut rng)
                .unwrap();
            *counts.entry(rv.values.clone()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (perm, c) in counts {
            let f = c as f64 / draws as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "{perm:?}: {f}");
        }
    }

    #[test]
    fn rank_sampling_is_deterministic() {
        let cfg = SimConfig {
            block_type: BlockType::Rank,
            ..small_config()
        };
        let (d1, t1) = generate(&cfg).unwrap();
        let (d2, t2) = generate(&cfg).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn generated_dataset_is_valid_and_sized() {
        let cfg = small_config();
        let (dataset, truth) = generate(&cfg).unwrap();
        assert!(validate(&dataset).is_empty());
        assert_eq!(dataset.records.len(), cfg.num_participants * cfg.num_blocks);
        assert!(truth
            .discrimination
            .iter()
            .all(|&a| (0.75..2.25).contains(&a)));

        // one participant leaves exactly one record per block
        let mut one = cfg.clone();
        one.num_participants = 1;
        let (d1, _) = generate(&one).unwrap();
        assert_eq!(d1.records.len(), one.num_blocks);
    }

    #[test]
    fn chosen_most_tracks_endorsement_strength() {
        // Items with larger a*(mean theta - b) should be picked most more
        // often; check the rank correlation over items is positive.
        let cfg = small_config();
        let (dataset, truth) = generate(&cfg).unwrap();
        let q = &dataset.q;
        let mut chosen = vec![0f64; cfg.num_items];
        for rec in &dataset.records {
            let block = &dataset.blocks[rec.block];
            for (pos, &item) in block.items.iter().enumerate() {
                if rec.ranks.values[pos] == 3 {
                    chosen[item] += 1.0;
                }
            }
        }
        // average endorsement per item over participants
        let mut strength = vec![0f64; cfg.num_items];
        for p in 0..cfg.num_participants {
            let row = truth.theta_row(p);
            for item in 0..cfg.num_items {
                strength[item] += sigmoid(
                    truth.discrimination[item] * (row[q.dim_of(item)] - truth.difficulty[item]),
                );
            }
        }
        let n = cfg.num_items as f64;
        let (mc, ms) = (
            chosen.iter().sum::<f64>() / n,
            strength.iter().sum::<f64>() / n,
        );
        let cov: f64 = chosen
            .iter()
            .zip(&strength)
            .map(|(c, s)| (c - mc) * (s - ms))
            .sum();
        assert!(cov > 0.0, "covariance {cov}");
    }

    #[test]
    fn truth_round_trip() {
        let cfg = small_config();
        let (_, truth) = generate(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_truth(&truth, dir.path()).unwrap();
        let loaded = load_truth(
            &dir.path().join("truth_theta.csv"),
            &dir.path().join("truth_items.csv"),
        )
        .unwrap();
        assert_eq!(loaded, truth);
    }

    #[test]
    fn inconsistent_config_is_rejected() {
        let mut cfg = small_config();
        cfg.num_items = 23;
        assert!(generate(&cfg).is_err());

        let mut cfg = small_config();
        cfg.items_per_block = 8;
        cfg.num_blocks = 3;
        assert!(cfg.validate().is_err()); // t > K

        let mut cfg = small_config();
        cfg.discrimination_range = (2.0, 1.0);
        assert!(cfg.validate().is_err());
    }
}
