//! Recorded computation graphs with exact reverse-mode differentiation.
//!
//! A [`DiffGraph`] is a topologically ordered tape of primitive operations
//! over named leaf parameters and embedded constants. Evaluation is pure:
//! leaves are bound to a [`ParamSet`] at call time and never mutated. The
//! backward pass visits each node exactly once in reverse order and returns
//! one gradient array per leaf.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::array::{fast_exp, sigmoid, softplus};
use crate::numerics::{Array, Gradients, ParamSet};

pub type NodeId = usize;

#[derive(Debug, Clone)]
enum NodeKind {
    /// Named parameter bound at evaluation time.
    Leaf(String),
    /// Inline constant; receives no gradient.
    Constant(Array),
    /// a (m x k) times b (k x n).
    MatMul(NodeId, NodeId),
    /// Adds a length-c bias vector to every row of an (r x c) matrix.
    AddRowBias(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    /// Elementwise product of same-shape arrays.
    Mul(NodeId, NodeId),
    Negate(NodeId),
    Sigmoid(NodeId),
    /// ln(1 + e^x), evaluated stably.
    Softplus(NodeId),
    Exp(NodeId),
    Log(NodeId),
    Relu(NodeId),
    /// Scales row r of an (r x c) matrix by entry r of an (r x 1) column.
    ScaleRows(NodeId, NodeId),
    /// Selects rows of a matrix; backward scatter-adds into the source.
    GatherRows(NodeId, Vec<usize>),
    /// Stacks matrices with equal column counts.
    ConcatRows(Vec<NodeId>),
    Sum(NodeId),
    Mean(NodeId),
    /// Multiplies every entry by a fixed scalar.
    Scale(NodeId, f64),
}

/// A recorded computation over named leaf parameters.
#[derive(Debug, Clone, Default)]
pub struct DiffGraph {
    nodes: Vec<NodeKind>,
    leaf_ids: HashMap<String, NodeId>,
    output: Option<NodeId>,
}

impl DiffGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, kind: NodeKind) -> NodeId {
        // Inputs must precede the node they feed; `push` can only ever
        // append, so checking here keeps the tape topologically ordered.
        let id = self.nodes.len();
        let check = |input: NodeId| debug_assert!(input < id, "graph input out of order");
        match &kind {
            NodeKind::Leaf(_) | NodeKind::Constant(_) => {}
            NodeKind::MatMul(a, b)
            | NodeKind::AddRowBias(a, b)
            | NodeKind::Add(a, b)
            | NodeKind::Sub(a, b)
            | NodeKind::Mul(a, b)
            | NodeKind::ScaleRows(a, b) => {
                check(*a);
                check(*b);
            }
            NodeKind::Negate(a)
            | NodeKind::Sigmoid(a)
            | NodeKind::Softplus(a)
            | NodeKind::Exp(a)
            | NodeKind::Log(a)
            | NodeKind::Relu(a)
            | NodeKind::GatherRows(a, _)
            | NodeKind::Sum(a)
            | NodeKind::Mean(a)
            | NodeKind::Scale(a, _) => check(*a),
            NodeKind::ConcatRows(parts) => parts.iter().for_each(|p| check(*p)),
        }
        self.nodes.push(kind);
        id
    }

    /// Registers (or returns the existing id of) a named leaf parameter.
    pub fn leaf(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.leaf_ids.get(name) {
            return id;
        }
        let id = self.push(NodeKind::Leaf(name.to_string()));
        self.leaf_ids.insert(name.to_string(), id);
        id
    }

    pub fn constant(&mut self, value: Array) -> NodeId {
        self.push(NodeKind::Constant(value))
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeKind::MatMul(a, b))
    }

    pub fn add_row_bias(&mut self, m: NodeId, bias: NodeId) -> NodeId {
        self.push(NodeKind::AddRowBias(m, bias))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeKind::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeKind::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeKind::Mul(a, b))
    }

    pub fn negate(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Negate(a))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Sigmoid(a))
    }

    pub fn softplus(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Softplus(a))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Exp(a))
    }

    pub fn log(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Log(a))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Relu(a))
    }

    pub fn scale_rows(&mut self, a: NodeId, per_row: NodeId) -> NodeId {
        self.push(NodeKind::ScaleRows(a, per_row))
    }

    pub fn gather_rows(&mut self, src: NodeId, rows: Vec<usize>) -> NodeId {
        self.push(NodeKind::GatherRows(src, rows))
    }

    pub fn concat_rows(&mut self, parts: Vec<NodeId>) -> NodeId {
        self.push(NodeKind::ConcatRows(parts))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Sum(a))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        self.push(NodeKind::Mean(a))
    }

    pub fn scale(&mut self, a: NodeId, factor: f64) -> NodeId {
        self.push(NodeKind::Scale(a, factor))
    }

    pub fn set_output(&mut self, id: NodeId) {
        assert!(id < self.nodes.len(), "output id out of range");
        self.output = Some(id);
    }

    pub fn output(&self) -> Option<NodeId> {
        self.output
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Evaluates the graph and returns the output node's value.
    pub fn forward(&self, params: &ParamSet) -> Result<Array> {
        let output = self
            .output
            .ok_or_else(|| Error::Graph("no output node set".into()))?;
        let values = self.eval_values(params)?;
        Ok(resolve(self, params, &values, output).clone())
    }

    /// Evaluates the graph and backpropagates from its scalar output.
    ///
    /// Returns the output value and one gradient per leaf parameter in
    /// `params` (zero-filled for leaves the output does not depend on).
    /// Evaluation is pure; `params` is never mutated.
    pub fn forward_backward(&self, params: &ParamSet) -> Result<(f64, Gradients)> {
        let mut grads = Gradients::zeros_like(params);
        let value = self.forward_backward_into(params, &mut grads)?;
        Ok((value, grads))
    }

    /// Like [`DiffGraph::forward_backward`], but accumulates into
    /// caller-owned gradient buffers (zeroed first) so hot loops avoid
    /// reallocating large arrays every step.
    pub fn forward_backward_into(&self, params: &ParamSet, grads: &mut Gradients) -> Result<f64> {
        if !grads.is_aligned_with(params) {
            return Err(Error::Graph("gradient buffers do not match parameters".into()));
        }
        grads.zero_all();
        let output = self
            .output
            .ok_or_else(|| Error::Graph("no output node set".into()))?;
        let values = self.eval_values(params)?;
        let out_value = resolve(self, params, &values, output);
        if out_value.len() != 1 {
            return Err(Error::Graph(format!(
                "backward requires a scalar output, got shape {:?}",
                out_value.shape()
            )));
        }
        let out_scalar = out_value.data()[0];

        let mut adjoints: Vec<Option<Array>> = vec![None; self.nodes.len()];
        adjoints[output] = Some(Array::new(out_value.shape().to_vec(), vec![1.0])?);

        for id in (0..self.nodes.len()).rev() {
            let adj = match adjoints[id].take() {
                Some(a) => a,
                None => continue,
            };
            match &self.nodes[id] {
                NodeKind::Leaf(name) => {
                    let idx = params.index_of(name).ok_or_else(|| {
                        Error::Graph(format!("leaf {name:?} not bound"))
                    })?;
                    grads.by_index_mut(idx).add_assign(&adj)?;
                }
                NodeKind::Constant(_) => {}
                NodeKind::MatMul(a, b) => {
                    let va = resolve(self, params, &values, *a);
                    let vb = resolve(self, params, &values, *b);
                    // dA = dC . B^T, dB = A^T . dC
                    let da = matmul_a_bt(&adj, vb)?;
                    let db = matmul_at_b(va, &adj)?;
                    accumulate(&mut adjoints, *a, da)?;
                    accumulate(&mut adjoints, *b, db)?;
                }
                NodeKind::AddRowBias(m, bias) => {
                    let vb = resolve(self, params, &values, *bias);
                    let cols = vb.len();
                    let mut db = vec![0.0; cols];
                    for row in adj.data().chunks_exact(cols) {
                        for (d, v) in db.iter_mut().zip(row) {
                            *d += v;
                        }
                    }
                    accumulate(&mut adjoints, *bias, Array::new(vb.shape().to_vec(), db)?)?;
                    accumulate(&mut adjoints, *m, adj)?;
                }
                NodeKind::Add(a, b) => {
                    accumulate(&mut adjoints, *a, adj.clone())?;
                    accumulate(&mut adjoints, *b, adj)?;
                }
                NodeKind::Sub(a, b) => {
                    let neg = map_unary(&adj, |v| -v);
                    accumulate(&mut adjoints, *a, adj)?;
                    accumulate(&mut adjoints, *b, neg)?;
                }
                NodeKind::Mul(a, b) => {
                    let va = resolve(self, params, &values, *a);
                    let vb = resolve(self, params, &values, *b);
                    accumulate(&mut adjoints, *a, map_binary(&adj, vb, |d, v| d * v))?;
                    accumulate(&mut adjoints, *b, map_binary(&adj, va, |d, v| d * v))?;
                }
                NodeKind::Negate(a) => {
                    accumulate(&mut adjoints, *a, map_unary(&adj, |v| -v))?;
                }
                NodeKind::Sigmoid(a) => {
                    let y = values[id].as_ref().expect("sigmoid value");
                    accumulate(&mut adjoints, *a, map_binary(&adj, y, |d, y| d * y * (1.0 - y)))?;
                }
                NodeKind::Softplus(a) => {
                    let x = resolve(self, params, &values, *a);
                    accumulate(&mut adjoints, *a, map_binary(&adj, x, |d, x| d * sigmoid(x)))?;
                }
                NodeKind::Exp(a) => {
                    let y = values[id].as_ref().expect("exp value");
                    accumulate(&mut adjoints, *a, map_binary(&adj, y, |d, y| d * y))?;
                }
                NodeKind::Log(a) => {
                    let x = resolve(self, params, &values, *a);
                    accumulate(&mut adjoints, *a, map_binary(&adj, x, |d, x| d / x))?;
                }
                NodeKind::Relu(a) => {
                    let x = resolve(self, params, &values, *a);
                    accumulate(
                        &mut adjoints,
                        *a,
                        map_binary(&adj, x, |d, x| if x > 0.0 { d } else { 0.0 }),
                    )?;
                }
                NodeKind::ScaleRows(a, s) => {
                    let va = resolve(self, params, &values, *a);
                    let vs = resolve(self, params, &values, *s);
                    let cols = va.cols();
                    let mut da = vec![0.0; va.len()];
                    let mut ds = vec![0.0; vs.len()];
                    for (r, (dout, arow)) in adj
                        .data()
                        .chunks_exact(cols)
                        .zip(va.data().chunks_exact(cols))
                        .enumerate()
                    {
                        let sr = vs.data()[r];
                        let dst = &mut da[r * cols..(r + 1) * cols];
                        let mut acc = 0.0;
                        for ((d, &o), &av) in dst.iter_mut().zip(dout).zip(arow) {
                            *d = o * sr;
                            acc += o * av;
                        }
                        ds[r] = acc;
                    }
                    accumulate(&mut adjoints, *a, Array::new(va.shape().to_vec(), da)?)?;
                    accumulate(&mut adjoints, *s, Array::new(vs.shape().to_vec(), ds)?)?;
                }
                NodeKind::GatherRows(src, rows) => {
                    // gathers usually read a parameter table directly;
                    // scatter into its gradient buffer without building a
                    // dense table-sized adjoint
                    if let NodeKind::Leaf(name) = &self.nodes[*src] {
                        let idx = params.index_of(name).ok_or_else(|| {
                            Error::Graph(format!("leaf {name:?} not bound"))
                        })?;
                        let target = grads.by_index_mut(idx);
                        let cols = target.cols();
                        let data = target.data_mut();
                        for (i, &r) in rows.iter().enumerate() {
                            let out_row = &adj.data()[i * cols..(i + 1) * cols];
                            let dst = &mut data[r * cols..(r + 1) * cols];
                            for (d, v) in dst.iter_mut().zip(out_row) {
                                *d += v;
                            }
                        }
                    } else {
                        let vsrc = resolve(self, params, &values, *src);
                        let cols = vsrc.cols();
                        let mut dsrc = Array::zeros(vsrc.shape().to_vec());
                        {
                            let data = dsrc.data_mut();
                            for (i, &r) in rows.iter().enumerate() {
                                let out_row = &adj.data()[i * cols..(i + 1) * cols];
                                let dst = &mut data[r * cols..(r + 1) * cols];
                                for (d, v) in dst.iter_mut().zip(out_row) {
                                    *d += v;
                                }
                            }
                        }
                        accumulate(&mut adjoints, *src, dsrc)?;
                    }
                }
                NodeKind::ConcatRows(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let vp = resolve(self, params, &values, p);
                        let len = vp.len();
                        let slice = adj.data()[offset..offset + len].to_vec();
                        accumulate(&mut adjoints, p, Array::new(vp.shape().to_vec(), slice)?)?;
                        offset += len;
                    }
                }
                NodeKind::Sum(a) => {
                    let va = resolve(self, params, &values, *a);
                    let d = adj.data()[0];
                    accumulate(&mut adjoints, *a, map_unary_shaped(va, |_| d))?;
                }
                NodeKind::Mean(a) => {
                    let va = resolve(self, params, &values, *a);
                    let d = adj.data()[0] / va.len() as f64;
                    accumulate(&mut adjoints, *a, map_unary_shaped(va, |_| d))?;
                }
                NodeKind::Scale(a, factor) => {
                    let f = *factor;
                    accumulate(&mut adjoints, *a, map_unary(&adj, |v| v * f))?;
                }
            }
        }

        for idx in 0..params.len() {
            grads
                .by_index(idx)
                .check_finite(&format!("gradient of {}", params.name(idx)))?;
        }
        Ok(out_scalar)
    }

    /// Computes values for all op nodes; leaves and constants stay borrowed.
    fn eval_values(&self, params: &ParamSet) -> Result<Vec<Option<Array>>> {
        let mut values: Vec<Option<Array>> = vec![None; self.nodes.len()];
        for id in 0..self.nodes.len() {
            let value = match &self.nodes[id] {
                NodeKind::Leaf(name) => {
                    if params.get(name).is_none() {
                        return Err(Error::Graph(format!("leaf {name:?} not bound")));
                    }
                    continue;
                }
                NodeKind::Constant(_) => continue,
                NodeKind::MatMul(a, b) => {
                    let va = resolve(self, params, &values, *a);
                    let vb = resolve(self, params, &values, *b);
                    matmul_plain(va, vb)?
                }
                NodeKind::AddRowBias(m, bias) => {
                    let vm = resolve(self, params, &values, *m);
                    let vb = resolve(self, params, &values, *bias);
                    let cols = vm.cols();
                    if vb.len() != cols {
                        return Err(Error::shape(
                            "add_row_bias",
                            format!("matrix cols {} vs bias len {}", cols, vb.len()),
                        ));
                    }
                    let mut out = vm.data().to_vec();
                    for row in out.chunks_exact_mut(cols) {
                        for (o, b) in row.iter_mut().zip(vb.data()) {
                            *o += b;
                        }
                    }
                    Array::new(vm.shape().to_vec(), out)?
                }
                NodeKind::Add(a, b) => {
                    elementwise(self, params, &values, *a, *b, "add", |x, y| x + y)?
                }
                NodeKind::Sub(a, b) => {
                    elementwise(self, params, &values, *a, *b, "sub", |x, y| x - y)?
                }
                NodeKind::Mul(a, b) => {
                    elementwise(self, params, &values, *a, *b, "mul", |x, y| x * y)?
                }
                NodeKind::Negate(a) => {
                    map_unary(resolve(self, params, &values, *a), |v| -v)
                }
                NodeKind::Sigmoid(a) => {
                    map_unary(resolve(self, params, &values, *a), sigmoid)
                }
                NodeKind::Softplus(a) => {
                    map_unary(resolve(self, params, &values, *a), softplus)
                }
                NodeKind::Exp(a) => map_unary(resolve(self, params, &values, *a), fast_exp),
                NodeKind::Log(a) => map_unary(resolve(self, params, &values, *a), f64::ln),
                NodeKind::Relu(a) => {
                    map_unary(resolve(self, params, &values, *a), |v| v.max(0.0))
                }
                NodeKind::ScaleRows(a, s) => {
                    let va = resolve(self, params, &values, *a);
                    let vs = resolve(self, params, &values, *s);
                    if vs.len() != va.rows() {
                        return Err(Error::shape(
                            "scale_rows",
                            format!("{} rows vs {} scales", va.rows(), vs.len()),
                        ));
                    }
                    let cols = va.cols();
                    let mut out = va.data().to_vec();
                    for (r, row) in out.chunks_exact_mut(cols).enumerate() {
                        let sr = vs.data()[r];
                        row.iter_mut().for_each(|v| *v *= sr);
                    }
                    Array::new(va.shape().to_vec(), out)?
                }
                NodeKind::GatherRows(src, rows) => {
                    let vsrc = resolve(self, params, &values, *src);
                    let cols = vsrc.cols();
                    let nrows = vsrc.rows();
                    let mut out = Vec::with_capacity(rows.len() * cols);
                    for &r in rows {
                        if r >= nrows {
                            return Err(Error::shape(
                                "gather_rows",
                                format!("row {r} out of {nrows}"),
                            ));
                        }
                        out.extend_from_slice(vsrc.row(r));
                    }
                    Array::new(vec![rows.len(), cols], out)?
                }
                NodeKind::ConcatRows(parts) => {
                    let mut cols = None;
                    let mut total_rows = 0;
                    let mut out = Vec::new();
                    for &p in parts {
                        let vp = resolve(self, params, &values, p);
                        let c = vp.cols();
                        if *cols.get_or_insert(c) != c {
                            return Err(Error::shape("concat_rows", "column mismatch"));
                        }
                        total_rows += vp.rows();
                        out.extend_from_slice(vp.data());
                    }
                    Array::new(vec![total_rows, cols.unwrap_or(0)], out)?
                }
                NodeKind::Sum(a) => {
                    let va = resolve(self, params, &values, *a);
                    Array::new(vec![1], vec![va.data().iter().sum()])?
                }
                NodeKind::Mean(a) => {
                    let va = resolve(self, params, &values, *a);
                    if va.is_empty() {
                        return Err(Error::shape("mean", "empty input"));
                    }
                    Array::new(vec![1], vec![va.data().iter().sum::<f64>() / va.len() as f64])?
                }
                NodeKind::Scale(a, factor) => {
                    let f = *factor;
                    map_unary(resolve(self, params, &values, *a), |v| v * f)
                }
            };
            value.check_finite(op_name(&self.nodes[id]))?;
            values[id] = Some(value);
        }
        Ok(values)
    }
}

fn op_name(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Leaf(_) => "leaf",
        NodeKind::Constant(_) => "constant",
        NodeKind::MatMul(..) => "matmul",
        NodeKind::AddRowBias(..) => "add_row_bias",
        NodeKind::Add(..) => "add",
        NodeKind::Sub(..) => "sub",
        NodeKind::Mul(..) => "mul",
        NodeKind::Negate(_) => "negate",
        NodeKind::Sigmoid(_) => "sigmoid",
        NodeKind::Softplus(_) => "softplus",
        NodeKind::Exp(_) => "exp",
        NodeKind::Log(_) => "log",
        NodeKind::Relu(_) => "relu",
        NodeKind::ScaleRows(..) => "scale_rows",
        NodeKind::GatherRows(..) => "gather_rows",
        NodeKind::ConcatRows(_) => "concat_rows",
        NodeKind::Sum(_) => "sum",
        NodeKind::Mean(_) => "mean",
        NodeKind::Scale(..) => "scale",
    }
}

fn resolve<'a>(
    graph: &'a DiffGraph,
    params: &'a ParamSet,
    values: &'a [Option<Array>],
    id: NodeId,
) -> &'a Array {
    match &graph.nodes[id] {
        NodeKind::Leaf(name) => params.get(name).expect("leaf bound checked in eval"),
        NodeKind::Constant(v) => v,
        _ => values[id].as_ref().expect("value computed in order"),
    }
}

fn accumulate(adjoints: &mut [Option<Array>], id: NodeId, delta: Array) -> Result<()> {
    match &mut adjoints[id] {
        Some(a) => a.add_assign(&delta),
        slot => {
            *slot = Some(delta);
            Ok(())
        }
    }
}

fn elementwise(
    graph: &DiffGraph,
    params: &ParamSet,
    values: &[Option<Array>],
    a: NodeId,
    b: NodeId,
    name: &str,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Array> {
    let va = resolve(graph, params, values, a);
    let vb = resolve(graph, params, values, b);
    if va.shape() != vb.shape() {
        return Err(Error::shape(
            name,
            format!("{:?} vs {:?}", va.shape(), vb.shape()),
        ));
    }
    let data = va
        .data()
        .iter()
        .zip(vb.data())
        .map(|(&x, &y)| f(x, y))
        .collect();
    Array::new(va.shape().to_vec(), data)
}

fn map_unary(a: &Array, f: impl Fn(f64) -> f64) -> Array {
    Array::new(a.shape().to_vec(), a.data().iter().map(|&v| f(v)).collect())
        .expect("shape preserved")
}

/// Combines an adjoint with a same-shape companion array entry by entry.
fn map_binary(adj: &Array, other: &Array, f: impl Fn(f64, f64) -> f64) -> Array {
    debug_assert_eq!(adj.shape(), other.shape());
    let data = adj
        .data()
        .iter()
        .zip(other.data())
        .map(|(&d, &v)| f(d, v))
        .collect();
    Array::new(adj.shape().to_vec(), data).expect("shape preserved")
}

fn map_unary_shaped(like: &Array, f: impl Fn(f64) -> f64) -> Array {
    map_unary(like, f)
}

fn matmul_plain(a: &Array, b: &Array) -> Result<Array> {
    let (m, k) = (a.rows(), a.cols());
    let (kb, n) = (b.rows(), b.cols());
    if k != kb {
        return Err(Error::shape("matmul", format!("{m}x{k} . {kb}x{n}")));
    }
    let mut out = vec![0.0; m * n];
    dgemm(&mut out, m, k, n, a.data(), k as isize, 1, b.data(), n as isize, 1);
    Array::new(vec![m, n], out)
}

/// a (m x k) times b^T where b is (n x k) row-major.
fn matmul_a_bt(a: &Array, b: &Array) -> Result<Array> {
    let (m, k) = (a.rows(), a.cols());
    let (n, kb) = (b.rows(), b.cols());
    if k != kb {
        return Err(Error::shape("matmul_a_bt", format!("{m}x{k} . ({n}x{kb})^T")));
    }
    let mut out = vec![0.0; m * n];
    dgemm(&mut out, m, k, n, a.data(), k as isize, 1, b.data(), 1, k as isize);
    Array::new(vec![m, n], out)
}

/// a^T times b where a is (k x m) row-major.
fn matmul_at_b(a: &Array, b: &Array) -> Result<Array> {
    let (k, m) = (a.rows(), a.cols());
    let (kb, n) = (b.rows(), b.cols());
    if k != kb {
        return Err(Error::shape("matmul_at_b", format!("({k}x{m})^T . {kb}x{n}")));
    }
    let mut out = vec![0.0; m * n];
    dgemm(&mut out, m, k, n, a.data(), 1, m as isize, b.data(), n as isize, 1);
    Array::new(vec![m, n], out)
}

#[allow(clippy::too_many_arguments)]
fn dgemm(
    out: &mut [f64],
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    rsa: isize,
    csa: isize,
    b: &[f64],
    rsb: isize,
    csb: isize,
) {
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            0.0,
            out.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}
