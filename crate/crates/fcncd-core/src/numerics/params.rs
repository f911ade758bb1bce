use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::Array;

/// Ordered collection of named parameter arrays.
///
/// Insertion order is the canonical order: gradients and optimizer state are
/// aligned to it, which keeps every reduction deterministic.
#[derive(Debug, Clone, Default)]
pub struct ParamSet {
    names: Vec<String>,
    values: Vec<Array>,
    index: HashMap<String, usize>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Array) -> Result<()> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Config(format!("duplicate parameter {name:?}")));
        }
        self.index.insert(name.clone(), self.values.len());
        self.names.push(name);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn get(&self, name: &str) -> Option<&Array> {
        self.index_of(name).map(|i| &self.values[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Array> {
        let idx = self.index_of(name)?;
        Some(&mut self.values[idx])
    }

    pub fn value(&self, idx: usize) -> &Array {
        &self.values[idx]
    }

    pub fn value_mut(&mut self, idx: usize) -> &mut Array {
        &mut self.values[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array)> {
        self.names.iter().map(|n| n.as_str()).zip(self.values.iter())
    }

    /// Total number of scalar entries across all parameters.
    pub fn num_entries(&self) -> usize {
        self.values.iter().map(Array::len).sum()
    }
}

/// Gradients aligned index-for-index with a `ParamSet`.
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Array>,
}

impl Gradients {
    /// Zero gradients matching the shapes of `params`.
    pub fn zeros_like(params: &ParamSet) -> Self {
        Gradients {
            grads: params
                .iter()
                .map(|(_, v)| Array::zeros(v.shape().to_vec()))
                .collect(),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_parts(grads: Vec<Array>) -> Self {
        Gradients { grads }
    }

    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }

    pub fn by_index(&self, idx: usize) -> &Array {
        &self.grads[idx]
    }

    pub(crate) fn by_index_mut(&mut self, idx: usize) -> &mut Array {
        &mut self.grads[idx]
    }

    /// Resets every entry to zero, keeping the allocations.
    pub fn zero_all(&mut self) {
        for g in &mut self.grads {
            g.data_mut().iter_mut().for_each(|v| *v = 0.0);
        }
    }

    /// True when this gradient set matches `params` slot for slot.
    pub fn is_aligned_with(&self, params: &ParamSet) -> bool {
        self.grads.len() == params.len()
            && self
                .grads
                .iter()
                .enumerate()
                .all(|(i, g)| g.shape() == params.value(i).shape())
    }

    pub fn get<'a>(&'a self, params: &ParamSet, name: &str) -> Option<&'a Array> {
        params.index_of(name).map(|i| &self.grads[i])
    }

    /// Accumulate another gradient set (same alignment) into this one.
    pub fn add_assign(&mut self, other: &Gradients) -> Result<()> {
        if self.grads.len() != other.grads.len() {
            return Err(Error::shape("Gradients::add_assign", "mismatched sets"));
        }
        for (a, b) in self.grads.iter_mut().zip(other.grads.iter()) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    /// Multiply every gradient entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for g in &mut self.grads {
            for v in g.data_mut() {
                *v *= factor;
            }
        }
    }
}
