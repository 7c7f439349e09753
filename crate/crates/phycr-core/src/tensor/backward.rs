//! Reverse sweep over the tape.

use super::conv::{conv2d_backward, ConvDims};
use super::ops::sigmoid_scalar;
use super::{Op, Tape, TensorId};
use crate::error::{Error, Result};

impl Tape {
    /// Backpropagate from a scalar loss node. Visits recorded operations in
    /// exact reverse execution order and accumulates into the `grad` buffer
    /// of every reachable node with `requires_grad`. Repeated calls without
    /// [`Tape::zero_grad`] accumulate.
    pub fn backward(&mut self, loss: TensorId) -> Result<()> {
        if self.nodes[loss.0].numel() != 1 {
            return Err(Error::Contract(format!(
                "backward requires a scalar loss, got shape {:?}",
                self.nodes[loss.0].shape
            )));
        }

        // Sweep-local adjoints; merged into persistent grads at the end so a
        // second backward() starts clean for intermediates but accumulates on
        // requires_grad nodes.
        let mut adj: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        adj[loss.0] = Some(vec![1.0]);

        for idx in (0..=loss.0).rev() {
            if adj[idx].is_none() || !self.nodes[idx].requires_grad {
                continue;
            }
            let g = adj[idx].take().expect("adjoint present");
            let op = self.nodes[idx].op.clone();
            match op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    accumulate(&mut adj, &self.nodes, a, |dst| add_assign(dst, &g));
                    accumulate(&mut adj, &self.nodes, b, |dst| add_assign(dst, &g));
                }
                Op::Sub(a, b) => {
                    accumulate(&mut adj, &self.nodes, a, |dst| add_assign(dst, &g));
                    accumulate(&mut adj, &self.nodes, b, |dst| sub_assign(dst, &g));
                }
                Op::Mul(a, b) => {
                    let (bd, ad) = (self.nodes[b.0].data.clone(), self.nodes[a.0].data.clone());
                    accumulate(&mut adj, &self.nodes, a, |dst| {
                        for ((d, gi), bi) in dst.iter_mut().zip(&g).zip(&bd) {
                            *d += gi * bi;
                        }
                    });
                    accumulate(&mut adj, &self.nodes, b, |dst| {
                        for ((d, gi), ai) in dst.iter_mut().zip(&g).zip(&ad) {
                            *d += gi * ai;
                        }
                    });
                }
                Op::Tanh(x) => {
                    let y = self.nodes[idx].data.clone();
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for ((d, gi), yi) in dst.iter_mut().zip(&g).zip(&y) {
                            *d += gi * (1.0 - yi * yi);
                        }
                    });
                }
                Op::Sigmoid(x) => {
                    let y = self.nodes[idx].data.clone();
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for ((d, gi), yi) in dst.iter_mut().zip(&g).zip(&y) {
                            *d += gi * yi * (1.0 - yi);
                        }
                    });
                }
                Op::Relu(x) => {
                    let xd = self.nodes[x.0].data.clone();
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for ((d, gi), xi) in dst.iter_mut().zip(&g).zip(&xd) {
                            if *xi > 0.0 {
                                *d += gi;
                            }
                        }
                    });
                }
                Op::Scale(x, c) => {
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for (d, gi) in dst.iter_mut().zip(&g) {
                            *d += gi * c;
                        }
                    });
                }
                Op::Powi(x, n) => {
                    let xd = self.nodes[x.0].data.clone();
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for ((d, gi), xi) in dst.iter_mut().zip(&g).zip(&xd) {
                            *d += gi * n as f64 * xi.powi(n - 1);
                        }
                    });
                }
                Op::Sum(x) => {
                    let gv = g[0];
                    accumulate(&mut adj, &self.nodes, x, |dst| {
                        for d in dst.iter_mut() {
                            *d += gv;
                        }
                    });
                }
                Op::Concat0(parts) => {
                    let mut offset = 0usize;
                    for &p in &parts {
                        let len = self.nodes[p.0].numel();
                        let gslice = &g[offset..offset + len];
                        accumulate(&mut adj, &self.nodes, p, |dst| add_assign(dst, gslice));
                        offset += len;
                    }
                }
                Op::Narrow0 { input, start, len: _ } => {
                    let block: usize = self.nodes[input.0].shape[1..].iter().product();
                    let off = start * block;
                    accumulate(&mut adj, &self.nodes, input, |dst| {
                        add_assign(&mut dst[off..off + g.len()], &g);
                    });
                }
                Op::PixelShuffle { input, factor: r } => {
                    let s = self.nodes[input.0].shape.clone();
                    let (c_out, h, w) = (s[0] / (r * r), s[1], s[2]);
                    accumulate(&mut adj, &self.nodes, input, |dst| {
                        for c in 0..c_out {
                            for a in 0..r {
                                for b in 0..r {
                                    let cin = c * r * r + a * r + b;
                                    for i in 0..h {
                                        let drow = &mut dst[(cin * h + i) * w..(cin * h + i + 1) * w];
                                        let grow_base = (c * h * r + i * r + a) * w * r + b;
                                        for j in 0..w {
                                            drow[j] += g[grow_base + j * r];
                                        }
                                    }
                                }
                            }
                        }
                    });
                }
                Op::WeightNorm { direction, gain } => {
                    let vs = self.nodes[direction.0].shape.clone();
                    let block: usize = vs[1..].iter().product();
                    let v = self.nodes[direction.0].data.clone();
                    let gg = self.nodes[gain.0].data.clone();
                    let mut dv = vec![0.0; v.len()];
                    let mut dg = vec![0.0; gg.len()];
                    for o in 0..vs[0] {
                        let vo = &v[o * block..(o + 1) * block];
                        let go = &g[o * block..(o + 1) * block];
                        let norm = vo.iter().map(|x| x * x).sum::<f64>().sqrt();
                        let dot: f64 = go.iter().zip(vo).map(|(a, b)| a * b).sum();
                        dg[o] = dot / norm;
                        let s1 = gg[o] / norm;
                        let s2 = gg[o] * dot / (norm * norm * norm);
                        for ((d, gi), vi) in dv[o * block..(o + 1) * block].iter_mut().zip(go).zip(vo) {
                            *d = s1 * gi - s2 * vi;
                        }
                    }
                    accumulate(&mut adj, &self.nodes, direction, |dst| add_assign(dst, &dv));
                    accumulate(&mut adj, &self.nodes, gain, |dst| add_assign(dst, &dg));
                }
                Op::Conv2d { input, kernel, bias, stride, padding } => {
                    let dims = ConvDims::resolve(
                        &self.nodes[input.0].shape,
                        &self.nodes[kernel.0].shape,
                        stride,
                        padding,
                    )
                    .expect("conv dims validated at record time");
                    let grads = conv2d_backward(
                        &self.nodes[input.0].data,
                        &self.nodes[kernel.0].data,
                        bias.is_some(),
                        &dims,
                        &g,
                    );
                    accumulate(&mut adj, &self.nodes, input, |dst| add_assign(dst, &grads.d_input));
                    accumulate(&mut adj, &self.nodes, kernel, |dst| add_assign(dst, &grads.d_kernel));
                    if let (Some(b), Some(db)) = (bias, grads.d_bias.as_ref()) {
                        accumulate(&mut adj, &self.nodes, b, |dst| add_assign(dst, db));
                    }
                }
            }
            // Keep the adjoint: every reachable requires_grad node reports
            // its gradient, not just the leaves.
            adj[idx] = Some(g);
        }

        // Merge sweep adjoints into persistent gradient buffers.
        for (idx, a) in adj.into_iter().enumerate() {
            if let Some(a) = a {
                let node = &mut self.nodes[idx];
                if node.requires_grad {
                    match &mut node.grad {
                        Some(buf) => add_assign(buf, &a),
                        None => node.grad = Some(a),
                    }
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn add_assign(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

#[inline]
fn sub_assign(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= s;
    }
}

/// Apply `f` to the adjoint buffer of `target`, allocating it zeroed on
/// first touch; skipped entirely when the target does not require grad.
fn accumulate<F>(adj: &mut [Option<Vec<f64>>], nodes: &[super::Tensor], target: TensorId, f: F)
where
    F: FnOnce(&mut Vec<f64>),
{
    if !nodes[target.0].requires_grad {
        return;
    }
    let slot = &mut adj[target.0];
    if slot.is_none() {
        *slot = Some(vec![0.0; nodes[target.0].numel()]);
    }
    f(slot.as_mut().expect("just initialized"));
}

// Referenced by unit tests for the sigmoid derivative identity.
#[allow(dead_code)]
pub(crate) fn sigmoid_grad(x: f64) -> f64 {
    let s = sigmoid_scalar(x);
    s * (1.0 - s)
}
