//! Canonical representation of participants, items, dimensions, item blocks,
//! the Q-matrix, and response logs, with the three block-type encodings.

mod io;
mod split;

pub use io::{load_dataset, save_dataset, DatasetManifest};
pub(crate) use io::write_file as io_write;
pub use split::{split_by_block, split_records};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a block is answered: pick the best item, rank all items, or mark the
/// most and least conforming items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BlockType {
    Pick,
    Rank,
    Mole,
}

impl std::fmt::Display for BlockType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockType::Pick => write!(f, "PICK"),
            BlockType::Rank => write!(f, "RANK"),
            BlockType::Mole => write!(f, "MOLE"),
        }
    }
}

impl std::str::FromStr for BlockType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PICK" => Ok(BlockType::Pick),
            "RANK" => Ok(BlockType::Rank),
            "MOLE" => Ok(BlockType::Mole),
            other => Err(Error::Config(format!("unknown block type {other:?}"))),
        }
    }
}

/// Item-by-dimension incidence. Forced-choice items are unidimensional, so
/// each row is one-hot and the matrix is stored as one dimension id per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    num_dimensions: usize,
    item_dims: Vec<usize>,
}

impl QMatrix {
    pub fn new(num_dimensions: usize, item_dims: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = item_dims.iter().find(|&&d| d >= num_dimensions) {
            return Err(Error::Data(format!(
                "item dimension {bad} out of range (K = {num_dimensions})"
            )));
        }
        Ok(QMatrix {
            num_dimensions,
            item_dims,
        })
    }

    pub fn num_items(&self) -> usize {
        self.item_dims.len()
    }

    pub fn num_dimensions(&self) -> usize {
        self.num_dimensions
    }

    /// Dimension targeted by an item.
    pub fn dim_of(&self, item: usize) -> usize {
        self.item_dims[item]
    }

    /// The one-hot row for an item.
    pub fn row(&self, item: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.num_dimensions];
        row[self.item_dims[item]] = 1.0;
        row
    }
}

/// A fixed group of items presented together; the unit of response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemBlock {
    pub id: usize,
    pub items: Vec<usize>,
}

impl ItemBlock {
    pub fn size(&self) -> usize {
        self.items.len()
    }
}

/// Encoded ranking result for one block. Value conventions:
/// RANK holds a permutation of 1..=t; PICK holds t for the chosen item and
/// 1 elsewhere; MOLE holds 3 for most conforming, 1 for least, 2 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    pub block_type: BlockType,
    pub values: Vec<u32>,
}

impl RankVector {
    /// Builds and validates against the block-type invariant.
    pub fn new(block_type: BlockType, values: Vec<u32>) -> Result<Self> {
        let rv = RankVector { block_type, values };
        match rv.check() {
            None => Ok(rv),
            Some(msg) => Err(Error::Data(msg)),
        }
    }

    /// Builds without validation; `check` or dataset validation reports
    /// violations later.
    pub fn from_raw(block_type: BlockType, values: Vec<u32>) -> Self {
        RankVector { block_type, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// None when the invariant holds, otherwise a description of the breach.
    pub fn check(&self) -> Option<String> {
        let t = self.values.len();
        match self.block_type {
            BlockType::Rank => {
                let mut seen = vec![false; t];
                for &v in &self.values {
                    if v < 1 || v as usize > t || seen[v as usize - 1] {
                        return Some(format!(
                            "RANK vector {:?} is not a permutation of 1..={t}",
                            self.values
                        ));
                    }
                    seen[v as usize - 1] = true;
                }
                None
            }
            BlockType::Pick => {
                let top = self.values.iter().filter(|&&v| v == t as u32).count();
                let ones = self.values.iter().filter(|&&v| v == 1).count();
                // t = 1 would make the chosen value collide with the rest
                if t < 2 || top != 1 || ones != t - 1 {
                    return Some(format!(
                        "PICK vector {:?} must have one {t} and {} ones",
                        self.values,
                        t - 1
                    ));
                }
                None
            }
            BlockType::Mole => {
                if t < 3 {
                    return Some(format!("MOLE block needs at least 3 items, got {t}"));
                }
                let threes = self.values.iter().filter(|&&v| v == 3).count();
                let ones = self.values.iter().filter(|&&v| v == 1).count();
                let twos = self.values.iter().filter(|&&v| v == 2).count();
                if threes != 1 {
                    return Some(format!(
                        "MOLE vector {:?}: duplicate or missing most-conforming",
                        self.values
                    ));
                }
                if ones != 1 || twos != t - 2 {
                    return Some(format!(
                        "MOLE vector {:?} must be one 3, one 1, rest 2",
                        self.values
                    ));
                }
                None
            }
        }
    }
}

/// One participant's answer to one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseRecord {
    pub participant: usize,
    pub block: usize,
    pub ranks: RankVector,
}

/// A complete response log: counts, Q-matrix, blocks, and records.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseDataset {
    pub num_participants: usize,
    pub num_items: usize,
    pub num_dimensions: usize,
    pub block_type: BlockType,
    pub q: QMatrix,
    pub blocks: Vec<ItemBlock>,
    pub records: Vec<ResponseRecord>,
}

impl ResponseDataset {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Items per block; blocks are required to share one size.
    pub fn items_per_block(&self) -> usize {
        self.blocks.first().map(ItemBlock::size).unwrap_or(0)
    }

    /// Same counts, Q and blocks, but only the given records.
    pub fn with_records(&self, records: Vec<ResponseRecord>) -> ResponseDataset {
        ResponseDataset {
            records,
            q: self.q.clone(),
            blocks: self.blocks.clone(),
            ..*self
        }
    }
}

/// Raw answer before encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawChoice {
    /// Index of the single chosen item.
    Pick(usize),
    /// Full preference order, most conforming first.
    Rank(Vec<usize>),
    /// Indices of the most and least conforming items.
    Mole { most: usize, least: usize },
}

/// Encodes a raw answer into the block-type value convention.
pub fn encode_response(block_type: BlockType, t: usize, raw: &RawChoice) -> Result<RankVector> {
    match (block_type, raw) {
        (BlockType::Pick, RawChoice::Pick(chosen)) => {
            if *chosen >= t {
                return Err(Error::Data(format!("pick index {chosen} out of range {t}")));
            }
            let mut values = vec![1u32; t];
            values[*chosen] = t as u32;
            RankVector::new(BlockType::Pick, values)
        }
        (BlockType::Rank, RawChoice::Rank(order)) => {
            if order.len() != t {
                return Err(Error::Data(format!(
                    "preference order has {} entries, block has {t}",
                    order.len()
                )));
            }
            let mut values = vec![0u32; t];
            // most conforming scores t, next t-1, ..., least scores 1
            for (pos, &item) in order.iter().enumerate() {
                if item >= t {
                    return Err(Error::Data(format!("rank index {item} out of range {t}")));
                }
                if values[item] != 0 {
                    return Err(Error::Data(format!(
                        "preference order {order:?} repeats position {item}"
                    )));
                }
                values[item] = (t - pos) as u32;
            }
            RankVector::new(BlockType::Rank, values)
        }
        (BlockType::Mole, RawChoice::Mole { most, least }) => {
            if *most >= t || *least >= t {
                return Err(Error::Data(format!(
                    "MOLE indices ({most}, {least}) out of range {t}"
                )));
            }
            if most == least {
                return Err(Error::Data(
                    "most and least conforming items must differ".into(),
                ));
            }
            let mut values = vec![2u32; t];
            values[*most] = 3;
            values[*least] = 1;
            RankVector::new(BlockType::Mole, values)
        }
        (bt, raw) => Err(Error::Data(format!(
            "raw choice {raw:?} does not match block type {bt}"
        ))),
    }
}

/// A single invariant breach found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Where the problem sits, e.g. `item 3` or `record 17`.
    pub location: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.rule)
    }
}

/// Checks every dataset invariant and reports violations as data rather than
/// failing. An empty list means the dataset is well formed.
pub fn validate(dataset: &ResponseDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<Violation>, location: String, rule: String| {
        out.push(Violation { location, rule });
    };

    if dataset.q.num_items() != dataset.num_items {
        push(
            &mut out,
            "q-matrix".into(),
            format!(
                "has {} rows, dataset declares {} items",
                dataset.q.num_items(),
                dataset.num_items
            ),
        );
    }
    // stored one-hot; a row violating "sums to 1" can only arrive via counts
    if dataset.q.num_dimensions() != dataset.num_dimensions {
        push(
            &mut out,
            "q-matrix".into(),
            format!(
                "has {} dimensions, dataset declares {}",
                dataset.q.num_dimensions(),
                dataset.num_dimensions
            ),
        );
    }

    let t = dataset.items_per_block();
    for (i, block) in dataset.blocks.iter().enumerate() {
        let loc = format!("block {i}");
        if block.id != i {
            push(&mut out, loc.clone(), format!("id {} out of order", block.id));
        }
        if block.size() < 2 {
            push(&mut out, loc.clone(), "fewer than 2 items".into());
        }
        if block.size() != t {
            push(
                &mut out,
                loc.clone(),
                format!("has {} items, expected {t}", block.size()),
            );
        }
        let mut seen_items = std::collections::HashSet::new();
        let mut seen_dims = std::collections::HashSet::new();
        for &item in &block.items {
            if item >= dataset.num_items {
                push(&mut out, loc.clone(), format!("item {item} out of range"));
                continue;
            }
            if !seen_items.insert(item) {
                push(&mut out, loc.clone(), format!("item {item} repeated"));
            }
            if !seen_dims.insert(dataset.q.dim_of(item)) {
                push(
                    &mut out,
                    loc.clone(),
                    "two items share a dimension".into(),
                );
            }
        }
    }

    let mut seen_pairs = std::collections::HashSet::new();
    for (i, rec) in dataset.records.iter().enumerate() {
        let loc = format!("record {i}");
        if rec.participant >= dataset.num_participants {
            push(
                &mut out,
                loc.clone(),
                format!("participant {} out of range", rec.participant),
            );
        }
        if rec.block >= dataset.num_blocks() {
            push(&mut out, loc.clone(), format!("block {} out of range", rec.block));
            continue;
        }
        if !seen_pairs.insert((rec.participant, rec.block)) {
            push(
                &mut out,
                loc.clone(),
                format!(
                    "duplicate response for participant {} on block {}",
                    rec.participant, rec.block
                ),
            );
        }
        if rec.ranks.len() != dataset.blocks[rec.block].size() {
            push(
                &mut out,
                loc.clone(),
                format!(
                    "rank vector has {} values, block has {}",
                    rec.ranks.len(),
                    dataset.blocks[rec.block].size()
                ),
            );
        }
        if rec.ranks.block_type != dataset.block_type {
            push(&mut out, loc.clone(), "block type mismatch".into());
        }
        if let Some(msg) = rec.ranks.check() {
            push(&mut out, loc, msg);
        }
    }
    out
}
