//! Dataset files.
//!
//! A dataset is a JSON manifest plus three CSV files:
//!   items file:     `item_id,dimension_id`
//!   blocks file:    `block_id,item_id_1,...,item_id_t`, preceded by a
//!                   `# block_type: X` line naming the block type
//!   responses file: `participant_id,block_id,v_1,...,v_t`
//! All paths in the manifest are relative to the manifest's directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    validate, BlockType, ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord,
};
use crate::error::{Error, Result};

/// Counts, file names and block type for one dataset on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub block_type: BlockType,
    pub num_participants: usize,
    pub num_items: usize,
    pub num_dimensions: usize,
    pub num_blocks: usize,
    pub items_per_block: usize,
    pub items_file: String,
    pub blocks_file: String,
    pub responses_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_theta_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_items_file: Option<String>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Resolves a file name relative to the manifest location.
    pub fn resolve(&self, manifest_path: &Path, file: &str) -> PathBuf {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(file)
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    field: &str,
    value: &str,
) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse {field} from {value:?}")))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Loads and validates a dataset from its manifest. Any invariant violation
/// is promoted to an error naming the first offending row.
pub fn load_dataset(manifest_path: &Path) -> Result<ResponseDataset> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let dataset = load_from_manifest(manifest_path, &manifest)?;
    let violations = validate(&dataset);
    if let Some(first) = violations.first() {
        return Err(Error::Data(format!(
            "{} violation(s), first: {first}",
            violations.len()
        )));
    }
    Ok(dataset)
}

fn load_from_manifest(manifest_path: &Path, manifest: &DatasetManifest) -> Result<ResponseDataset> {
    // items: item_id,dimension_id
    let items_path = manifest.resolve(manifest_path, &manifest.items_file);
    let lines = read_lines(&items_path)?;
    let mut item_dims = vec![usize::MAX; manifest.num_items];
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 2 {
            return Err(parse_err(
                &items_path,
                i + 1,
                format!("expected 2 fields, got {}", parts.len()),
            ));
        }
        let item: usize = parse_field(&items_path, i + 1, "item_id", parts[0])?;
        let dim: usize = parse_field(&items_path, i + 1, "dimension_id", parts[1])?;
        if item >= manifest.num_items {
            return Err(parse_err(&items_path, i + 1, format!("item {item} out of range")));
        }
        if dim >= manifest.num_dimensions {
            return Err(parse_err(
                &items_path,
                i + 1,
                format!(
                    "dimension {dim} out of range (manifest declares {} dimensions)",
                    manifest.num_dimensions
                ),
            ));
        }
        item_dims[item] = dim;
    }
    if let Some(missing) = item_dims.iter().position(|&d| d == usize::MAX) {
        return Err(Error::Data(format!("item {missing} has no dimension entry")));
    }
    let q = QMatrix::new(manifest.num_dimensions, item_dims)?;

    // blocks: "# block_type: X" then block_id,item_id_1,...
    let blocks_path = manifest.resolve(manifest_path, &manifest.blocks_file);
    let lines = read_lines(&blocks_path)?;
    let mut blocks: Vec<ItemBlock> = Vec::with_capacity(manifest.num_blocks);
    let mut declared_type: Option<BlockType> = None;
    for (i, line) in lines.iter().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(value) = rest.trim().strip_prefix("block_type:") {
                declared_type = Some(value.trim().parse()?);
            }
            continue;
        }
        if trimmed.starts_with("block_id") {
            continue; // header
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != manifest.items_per_block + 1 {
            return Err(parse_err(
                &blocks_path,
                i + 1,
                format!(
                    "expected {} fields, got {}",
                    manifest.items_per_block + 1,
                    parts.len()
                ),
            ));
        }
        let id: usize = parse_field(&blocks_path, i + 1, "block_id", parts[0])?;
        if id != blocks.len() {
            return Err(parse_err(&blocks_path, i + 1, format!("block id {id} out of order")));
        }
        let mut items = Vec::with_capacity(manifest.items_per_block);
        for p in &parts[1..] {
            items.push(parse_field(&blocks_path, i + 1, "item_id", p)?);
        }
        blocks.push(ItemBlock { id, items });
    }
    if blocks.len() != manifest.num_blocks {
        return Err(Error::Data(format!(
            "blocks file holds {} blocks, manifest declares {}",
            blocks.len(),
            manifest.num_blocks
        )));
    }
    if let Some(bt) = declared_type {
        if bt != manifest.block_type {
            return Err(Error::Data(format!(
                "blocks file declares {bt}, manifest says {}",
                manifest.block_type
            )));
        }
    }

    // responses: participant_id,block_id,v_1,...,v_t
    let responses_path = manifest.resolve(manifest_path, &manifest.responses_file);
    let lines = read_lines(&responses_path)?;
    let mut records = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != manifest.items_per_block + 2 {
            return Err(parse_err(
                &responses_path,
                i + 1,
                format!(
                    "expected {} fields, got {}",
                    manifest.items_per_block + 2,
                    parts.len()
                ),
            ));
        }
        let participant: usize = parse_field(&responses_path, i + 1, "participant_id", parts[0])?;
        let block: usize = parse_field(&responses_path, i + 1, "block_id", parts[1])?;
        if block >= blocks.len() {
            return Err(parse_err(
                &responses_path,
                i + 1,
                format!("record references unknown block {block}"),
            ));
        }
        let mut values = Vec::with_capacity(manifest.items_per_block);
        for p in &parts[2..] {
            values.push(parse_field(&responses_path, i + 1, "rank value", p)?);
        }
        records.push(ResponseRecord {
            participant,
            block,
            ranks: RankVector::from_raw(manifest.block_type, values),
        });
    }

    Ok(ResponseDataset {
        num_participants: manifest.num_participants,
        num_items: manifest.num_items,
        num_dimensions: manifest.num_dimensions,
        block_type: manifest.block_type,
        q,
        blocks,
        records,
    })
}

/// Writes the dataset and its manifest into `dir`, returning the manifest
/// path. Output is byte-stable for a given dataset.
pub fn save_dataset(dataset: &ResponseDataset, dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let manifest = DatasetManifest {
        name: name.to_string(),
        block_type: dataset.block_type,
        num_participants: dataset.num_participants,
        num_items: dataset.num_items,
        num_dimensions: dataset.num_dimensions,
        num_blocks: dataset.num_blocks(),
        items_per_block: dataset.items_per_block(),
        items_file: "items.csv".into(),
        blocks_file: "blocks.csv".into(),
        responses_file: "responses.csv".into(),
        truth_theta_file: None,
        truth_items_file: None,
    };

    let mut items = String::from("item_id,dimension_id\n");
    for item in 0..dataset.num_items {
        items.push_str(&format!("{},{}\n", item, dataset.q.dim_of(item)));
    }
    write_file(&dir.join(&manifest.items_file), &items)?;

    let mut blocks = format!("# block_type: {}\n", dataset.block_type);
    blocks.push_str("block_id");
    for i in 1..=dataset.items_per_block() {
        blocks.push_str(&format!(",item_id_{i}"));
    }
    blocks.push('\n');
    for block in &dataset.blocks {
        blocks.push_str(&block.id.to_string());
        for item in &block.items {
            blocks.push_str(&format!(",{item}"));
        }
        blocks.push('\n');
    }
    write_file(&dir.join(&manifest.blocks_file), &blocks)?;

    let mut responses = String::from("participant_id,block_id");
    for i in 1..=dataset.items_per_block() {
        responses.push_str(&format!(",v_{i}"));
    }
    responses.push('\n');
    for rec in &dataset.records {
        responses.push_str(&format!("{},{}", rec.participant, rec.block));
        for v in &rec.ranks.values {
            responses.push_str(&format!(",{v}"));
        }
        responses.push('\n');
    }
    write_file(&dir.join(&manifest.responses_file), &responses)?;

    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&manifest_path, &format!("{json}\n"))?;
    Ok(manifest_path)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f =
        fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}
