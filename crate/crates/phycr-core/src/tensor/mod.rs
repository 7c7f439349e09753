//! Dense f64 tensors with reverse-mode automatic differentiation.
//!
//! All differentiable computation is recorded on a [`Tape`]: an arena of
//! tensor nodes in execution order. [`Tape::backward`] replays the recorded
//! operations in exact reverse order and accumulates gradients into every
//! reachable node that has `requires_grad` set. Everything is double
//! precision and single-threaded, so two identical forward+backward passes
//! produce bit-identical gradients.

mod adam;
mod backward;
mod conv;
mod ops;

pub use adam::{adam_step, AdamState};
pub use conv::Padding;

use crate::error::{Error, Result};

/// Handle to a tensor node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorId(pub(crate) usize);

impl TensorId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Recorded primitive operations. Each variant stores the input handles (and
/// the little metadata backward needs); bulky intermediates are recomputed
/// during the reverse sweep instead of being saved.
#[derive(Debug, Clone)]
pub(crate) enum Op {
    Leaf,
    Add(TensorId, TensorId),
    Sub(TensorId, TensorId),
    Mul(TensorId, TensorId),
    Tanh(TensorId),
    Sigmoid(TensorId),
    Relu(TensorId),
    Scale(TensorId, f64),
    Powi(TensorId, i32),
    Sum(TensorId),
    Concat0(Vec<TensorId>),
    Narrow0 { input: TensorId, start: usize, len: usize },
    PixelShuffle { input: TensorId, factor: usize },
    WeightNorm { direction: TensorId, gain: TensorId },
    Conv2d { input: TensorId, kernel: TensorId, bias: Option<TensorId>, stride: usize, padding: Padding },
}

/// One tensor node: shape, row-major data (last axis fastest), an optional
/// gradient buffer of identical shape, and the operation that produced it.
///
/// Data is immutable once created; only `grad` is ever written after the
/// fact. A node with `requires_grad == false` never accumulates gradient.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
    pub grad: Option<Vec<f64>>,
    pub requires_grad: bool,
    pub(crate) op: Op,
}

impl Tensor {
    pub fn numel(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Ordered record of executed operations.
pub struct Tape {
    pub(crate) nodes: Vec<Tensor>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn check_shape(shape: &[usize]) -> Result<()> {
        if shape.is_empty() || shape.len() > 4 {
            return Err(Error::Contract(format!("tensor rank must be 1-4, got shape {shape:?}")));
        }
        if shape.iter().any(|&e| e == 0) {
            return Err(Error::Dimension(format!("zero extent in shape {shape:?}")));
        }
        Ok(())
    }

    pub(crate) fn push(&mut self, shape: Vec<usize>, data: Vec<f64>, requires_grad: bool, op: Op) -> TensorId {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        self.nodes.push(Tensor { shape, data, grad: None, requires_grad, op });
        TensorId(self.nodes.len() - 1)
    }

    /// Insert a leaf node. Leaves with `requires_grad` receive gradients from
    /// [`Tape::backward`].
    pub fn leaf(&mut self, shape: &[usize], data: Vec<f64>, requires_grad: bool) -> Result<TensorId> {
        Self::check_shape(shape)?;
        if shape.iter().product::<usize>() != data.len() {
            return Err(Error::Dimension(format!(
                "shape {shape:?} implies {} values, got {}",
                shape.iter().product::<usize>(),
                data.len()
            )));
        }
        Ok(self.push(shape.to_vec(), data, requires_grad, Op::Leaf))
    }

    /// Insert a non-differentiable constant (stencil kernels, inputs).
    pub fn constant(&mut self, shape: &[usize], data: Vec<f64>) -> Result<TensorId> {
        self.leaf(shape, data, false)
    }

    pub fn scalar(&mut self, value: f64) -> TensorId {
        self.push(vec![1], vec![value], false, Op::Leaf)
    }

    pub fn shape(&self, id: TensorId) -> &[usize] {
        &self.nodes[id.0].shape
    }

    pub fn value(&self, id: TensorId) -> &[f64] {
        &self.nodes[id.0].data
    }

    pub fn grad(&self, id: TensorId) -> Option<&[f64]> {
        self.nodes[id.0].grad.as_deref()
    }

    pub fn requires_grad(&self, id: TensorId) -> bool {
        self.nodes[id.0].requires_grad
    }

    /// Clear all gradient buffers, keeping values.
    pub fn zero_grad(&mut self) {
        for n in &mut self.nodes {
            n.grad = None;
        }
    }

    /// Drop every node at index `mark` or later. Handles issued after `mark`
    /// become invalid; used to bound memory in long no-grad rollouts.
    pub fn truncate_to(&mut self, mark: usize) {
        self.nodes.truncate(mark);
    }

    pub(crate) fn binary_shape_check(&self, a: TensorId, b: TensorId) -> Result<()> {
        let (sa, sb) = (&self.nodes[a.0].shape, &self.nodes[b.0].shape);
        if sa != sb {
            return Err(Error::Dimension(format!("operand shapes differ: {sa:?} vs {sb:?}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
