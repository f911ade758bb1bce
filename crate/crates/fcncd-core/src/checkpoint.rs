//! Model checkpoints: a JSON header (kind, config, counts, parameter
//! manifest) followed by the raw parameter payload, row-major little-endian
//! f64 in manifest order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{Mf, MfConfig, Mupp2pl, NcdmConfig, NcdmR, RankNet};
use crate::error::{Error, Result};
use crate::model::{Fcncd, FcncdConfig};
use crate::registry::{AnyModel, ModelKind};
use crate::train::BlockScoringModel;

const MAGIC: &[u8; 8] = b"FCCHKPT1";

#[derive(Debug, Serialize, Deserialize)]
struct ParamEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    kind: ModelKind,
    num_participants: usize,
    num_items: usize,
    num_dimensions: usize,
    config: serde_json::Value,
    params: Vec<ParamEntry>,
}

/// Writes the model to a single checkpoint file.
pub fn save_model(model: &AnyModel, path: &Path) -> Result<()> {
    let config = match model {
        AnyModel::Fcncd(m) => serde_json::to_value(m.config),
        AnyModel::Mf(m) => serde_json::to_value(m.config),
        AnyModel::RankNet(m) => serde_json::to_value(m.config),
        AnyModel::NcdmR(m) => serde_json::to_value(m.config),
        AnyModel::Mupp2pl(_) => Ok(serde_json::Value::Null),
    }
    .expect("model configs serialize");
    let (n, m_items, k) = model.counts();
    let header = Header {
        kind: model.kind(),
        num_participants: n,
        num_items: m_items,
        num_dimensions: k,
        config,
        params: model
            .params()
            .iter()
            .map(|(name, v)| ParamEntry {
                name: name.to_string(),
                shape: v.shape().to_vec(),
            })
            .collect(),
    };
    let header_bytes = serde_json::to_vec(&header).expect("header serializes");

    let io = |e| Error::io(path.display().to_string(), e);
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(MAGIC).map_err(io)?;
    f.write_all(&(header_bytes.len() as u64).to_le_bytes()).map_err(io)?;
    f.write_all(&header_bytes).map_err(io)?;
    for (_, v) in model.params().iter() {
        let mut buf = Vec::with_capacity(v.len() * 8);
        for value in v.data() {
            buf.extend_from_slice(&value.to_le_bytes());
        }
        f.write_all(&buf).map_err(io)?;
    }
    Ok(())
}

/// Reads a checkpoint back into a model.
pub fn load_model(path: &Path) -> Result<AnyModel> {
    let io = |e| Error::io(path.display().to_string(), e);
    let mut f = fs::File::open(path).map_err(io)?;
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Data(format!(
            "{} is not a model checkpoint",
            path.display()
        )));
    }
    let mut len = [0u8; 8];
    f.read_exact(&mut len).map_err(io)?;
    let mut header_bytes = vec![0u8; u64::from_le_bytes(len) as usize];
    f.read_exact(&mut header_bytes).map_err(io)?;
    let header: Header = serde_json::from_slice(&header_bytes).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;

    let bad_config = |e: serde_json::Error| Error::Data(format!("bad checkpoint config: {e}"));
    // seed value is irrelevant: every parameter is overwritten below
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let (n, m_items, k) = (
        header.num_participants,
        header.num_items,
        header.num_dimensions,
    );
    let mut model = match header.kind {
        ModelKind::Fcncd => {
            let config: FcncdConfig =
                serde_json::from_value(header.config.clone()).map_err(bad_config)?;
            AnyModel::Fcncd(Fcncd::new(config, n, m_items, k, &mut rng)?)
        }
        ModelKind::Mf => {
            let config: MfConfig =
                serde_json::from_value(header.config.clone()).map_err(bad_config)?;
            AnyModel::Mf(Mf::new(config, n, m_items, &mut rng)?)
        }
        ModelKind::RankNet => {
            let config: MfConfig =
                serde_json::from_value(header.config.clone()).map_err(bad_config)?;
            AnyModel::RankNet(RankNet::new(config, n, m_items, &mut rng)?)
        }
        ModelKind::NcdmR => {
            let config: NcdmConfig =
                serde_json::from_value(header.config.clone()).map_err(bad_config)?;
            AnyModel::NcdmR(NcdmR::new(config, n, m_items, k, &mut rng)?)
        }
        ModelKind::Mupp2pl => AnyModel::Mupp2pl(Mupp2pl::new(n, m_items, k, &mut rng)?),
    };

    let params = model.params_mut();
    if params.len() != header.params.len() {
        return Err(Error::Data(format!(
            "checkpoint lists {} parameters, model has {}",
            header.params.len(),
            params.len()
        )));
    }
    for (idx, entry) in header.params.iter().enumerate() {
        if params.name(idx) != entry.name || params.value(idx).shape() != entry.shape {
            return Err(Error::Data(format!(
                "checkpoint parameter {} ({:?}) does not match model slot {} ({:?})",
                entry.name,
                entry.shape,
                params.name(idx),
                params.value(idx).shape()
            )));
        }
        let len = entry.shape.iter().product::<usize>() * 8;
        let mut buf = vec![0u8; len];
        f.read_exact(&mut buf).map_err(io)?;
        let data = params.value_mut(idx).data_mut();
        for (i, chunk) in buf.chunks_exact(8).enumerate() {
            data[i] = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        params.value(idx).check_finite("checkpoint load")?;
    }
    Ok(model)
}
