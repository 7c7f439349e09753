//! Forward operation builders. Each method computes the result eagerly and
//! records the op so [`Tape::backward`](super::Tape::backward) can replay it.

use super::conv::{conv2d_forward, ConvDims, Padding};
use super::{Op, Tape, TensorId};
use crate::error::{Error, Result};

#[inline]
pub(crate) fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    fn requires(&self, ids: &[TensorId]) -> bool {
        ids.iter().any(|id| self.nodes[id.0].requires_grad)
    }

    pub fn add(&mut self, a: TensorId, b: TensorId) -> Result<TensorId> {
        self.binary_shape_check(a, b)?;
        let data: Vec<f64> = self.nodes[a.0]
            .data
            .iter()
            .zip(&self.nodes[b.0].data)
            .map(|(x, y)| x + y)
            .collect();
        let shape = self.nodes[a.0].shape.clone();
        let rg = self.requires(&[a, b]);
        Ok(self.push(shape, data, rg, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: TensorId, b: TensorId) -> Result<TensorId> {
        self.binary_shape_check(a, b)?;
        let data: Vec<f64> = self.nodes[a.0]
            .data
            .iter()
            .zip(&self.nodes[b.0].data)
            .map(|(x, y)| x - y)
            .collect();
        let shape = self.nodes[a.0].shape.clone();
        let rg = self.requires(&[a, b]);
        Ok(self.push(shape, data, rg, Op::Sub(a, b)))
    }

    /// Hadamard product.
    pub fn mul(&mut self, a: TensorId, b: TensorId) -> Result<TensorId> {
        self.binary_shape_check(a, b)?;
        let data: Vec<f64> = self.nodes[a.0]
            .data
            .iter()
            .zip(&self.nodes[b.0].data)
            .map(|(x, y)| x * y)
            .collect();
        let shape = self.nodes[a.0].shape.clone();
        let rg = self.requires(&[a, b]);
        Ok(self.push(shape, data, rg, Op::Mul(a, b)))
    }

    pub fn tanh(&mut self, x: TensorId) -> TensorId {
        let data: Vec<f64> = self.nodes[x.0].data.iter().map(|v| v.tanh()).collect();
        let shape = self.nodes[x.0].shape.clone();
        let rg = self.requires(&[x]);
        self.push(shape, data, rg, Op::Tanh(x))
    }

    pub fn sigmoid(&mut self, x: TensorId) -> TensorId {
        let data: Vec<f64> = self.nodes[x.0].data.iter().map(|v| sigmoid_scalar(*v)).collect();
        let shape = self.nodes[x.0].shape.clone();
        let rg = self.requires(&[x]);
        self.push(shape, data, rg, Op::Sigmoid(x))
    }

    /// Rectified linear unit; the subgradient at 0 is 0.
    pub fn relu(&mut self, x: TensorId) -> TensorId {
        let data: Vec<f64> = self.nodes[x.0].data.iter().map(|v| v.max(0.0)).collect();
        let shape = self.nodes[x.0].shape.clone();
        let rg = self.requires(&[x]);
        self.push(shape, data, rg, Op::Relu(x))
    }

    /// Multiply by a compile-time-known constant.
    pub fn scale(&mut self, x: TensorId, c: f64) -> TensorId {
        let data: Vec<f64> = self.nodes[x.0].data.iter().map(|v| v * c).collect();
        let shape = self.nodes[x.0].shape.clone();
        let rg = self.requires(&[x]);
        self.push(shape, data, rg, Op::Scale(x, c))
    }

    /// Integer elementwise power.
    pub fn powi(&mut self, x: TensorId, n: i32) -> TensorId {
        let data: Vec<f64> = self.nodes[x.0].data.iter().map(|v| v.powi(n)).collect();
        let shape = self.nodes[x.0].shape.clone();
        let rg = self.requires(&[x]);
        self.push(shape, data, rg, Op::Powi(x, n))
    }

    /// Sum of all entries, as a shape-`[1]` scalar.
    pub fn sum(&mut self, x: TensorId) -> TensorId {
        let total: f64 = self.nodes[x.0].data.iter().sum();
        let rg = self.requires(&[x]);
        self.push(vec![1], vec![total], rg, Op::Sum(x))
    }

    /// Concatenate along axis 0. All parts must agree on the trailing axes.
    pub fn concat0(&mut self, parts: &[TensorId]) -> Result<TensorId> {
        if parts.is_empty() {
            return Err(Error::Contract("concat0 needs at least one operand".into()));
        }
        let tail = self.nodes[parts[0].0].shape[1..].to_vec();
        let mut axis0 = 0usize;
        for &p in parts {
            let s = &self.nodes[p.0].shape;
            if s[1..] != tail[..] {
                return Err(Error::Dimension(format!(
                    "concat0 trailing axes differ: {:?} vs {:?}",
                    &s[1..],
                    tail
                )));
            }
            axis0 += s[0];
        }
        let mut shape = Vec::with_capacity(tail.len() + 1);
        shape.push(axis0);
        shape.extend_from_slice(&tail);
        let mut data = Vec::with_capacity(shape.iter().product());
        for &p in parts {
            data.extend_from_slice(&self.nodes[p.0].data);
        }
        let rg = self.requires(parts);
        Ok(self.push(shape, data, rg, Op::Concat0(parts.to_vec())))
    }

    /// Slice `len` entries of axis 0 starting at `start`.
    pub fn narrow0(&mut self, x: TensorId, start: usize, len: usize) -> Result<TensorId> {
        let s = &self.nodes[x.0].shape;
        if start + len > s[0] {
            return Err(Error::Dimension(format!(
                "narrow0 range {start}..{} exceeds axis 0 extent {}",
                start + len,
                s[0]
            )));
        }
        let block: usize = s[1..].iter().product();
        let mut shape = s.clone();
        shape[0] = len;
        let data = self.nodes[x.0].data[start * block..(start + len) * block].to_vec();
        let rg = self.requires(&[x]);
        Ok(self.push(shape, data, rg, Op::Narrow0 { input: x, start, len }))
    }

    /// Rearrange `[C*r^2, h, w]` into `[C, h*r, w*r]`:
    /// `out[c, i*r+a, j*r+b] = in[c*r^2 + a*r + b, i, j]`.
    pub fn pixel_shuffle(&mut self, x: TensorId, factor: usize) -> Result<TensorId> {
        let s = self.nodes[x.0].shape.clone();
        if s.len() != 3 {
            return Err(Error::Dimension(format!("pixel_shuffle input must be rank 3, got {s:?}")));
        }
        let r = factor;
        if r == 0 || s[0] % (r * r) != 0 {
            return Err(Error::Dimension(format!(
                "channel count {} not divisible by r^2 = {}",
                s[0],
                r * r
            )));
        }
        let (c_out, h, w) = (s[0] / (r * r), s[1], s[2]);
        let src = &self.nodes[x.0].data;
        let mut data = vec![0.0; c_out * h * r * w * r];
        for c in 0..c_out {
            for a in 0..r {
                for b in 0..r {
                    let cin = c * r * r + a * r + b;
                    for i in 0..h {
                        let srow = &src[(cin * h + i) * w..(cin * h + i + 1) * w];
                        let drow_base = (c * h * r + i * r + a) * w * r + b;
                        for j in 0..w {
                            data[drow_base + j * r] = srow[j];
                        }
                    }
                }
            }
        }
        let rg = self.requires(&[x]);
        Ok(self.push(vec![c_out, h * r, w * r], data, rg, Op::PixelShuffle { input: x, factor: r }))
    }

    /// Weight-normalized kernel: per output channel `o`,
    /// `W[o] = gain[o] * V[o] / ||V[o]||`.
    pub fn weight_norm(&mut self, direction: TensorId, gain: TensorId) -> Result<TensorId> {
        let vs = self.nodes[direction.0].shape.clone();
        let gs = &self.nodes[gain.0].shape;
        if gs.len() != 1 || gs[0] != vs[0] {
            return Err(Error::Dimension(format!(
                "gain shape {gs:?} must be [{}] (one per output channel)",
                vs[0]
            )));
        }
        let block: usize = vs[1..].iter().product();
        let v = &self.nodes[direction.0].data;
        let g = &self.nodes[gain.0].data;
        let mut data = vec![0.0; v.len()];
        for o in 0..vs[0] {
            let slice = &v[o * block..(o + 1) * block];
            let norm = slice.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Numeric(format!("weight_norm direction slice {o} has zero norm")));
            }
            let s = g[o] / norm;
            for (dst, x) in data[o * block..(o + 1) * block].iter_mut().zip(slice) {
                *dst = s * x;
            }
        }
        let rg = self.requires(&[direction, gain]);
        Ok(self.push(vs, data, rg, Op::WeightNorm { direction, gain }))
    }

    /// 2D cross-correlation (no kernel flip) with optional per-channel bias.
    pub fn conv2d(
        &mut self,
        input: TensorId,
        kernel: TensorId,
        bias: Option<TensorId>,
        stride: usize,
        padding: Padding,
    ) -> Result<TensorId> {
        let dims = ConvDims::resolve(
            &self.nodes[input.0].shape,
            &self.nodes[kernel.0].shape,
            stride,
            padding,
        )?;
        if let Some(b) = bias {
            let bs = &self.nodes[b.0].shape;
            if bs.len() != 1 || bs[0] != dims.c_out {
                return Err(Error::Dimension(format!(
                    "bias shape {bs:?} must be [{}] (one per output channel)",
                    dims.c_out
                )));
            }
        }
        let data = conv2d_forward(
            &self.nodes[input.0].data,
            &self.nodes[kernel.0].data,
            bias.map(|b| self.nodes[b.0].data.as_slice()),
            &dims,
        );
        let shape = vec![dims.c_out, dims.h_out, dims.w_out];
        let mut watched = vec![input, kernel];
        if let Some(b) = bias {
            watched.push(b);
        }
        let rg = self.requires(&watched);
        Ok(self.push(shape, data, rg, Op::Conv2d { input, kernel, bias, stride, padding }))
    }
}
