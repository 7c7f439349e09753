//! Circular-padding 2D cross-correlation, forward and backward, via
//! im2col + GEMM. The im2col buffer is recomputed in the reverse sweep
//! rather than kept alive on the tape.

use crate::error::{Error, Result};

/// Spatial padding applied before a convolution. `Circular` wraps the field
/// periodically; amounts are per side (symmetric).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    None,
    Circular { rows: usize, cols: usize },
}

impl Padding {
    pub(crate) fn amounts(self) -> (usize, usize) {
        match self {
            Padding::None => (0, 0),
            Padding::Circular { rows, cols } => (rows, cols),
        }
    }
}

pub(crate) struct ConvDims {
    pub c_in: usize,
    pub h: usize,
    pub w: usize,
    pub c_out: usize,
    pub kh: usize,
    pub kw: usize,
    pub h_out: usize,
    pub w_out: usize,
    pub ph: usize,
    pub pw: usize,
    pub stride: usize,
}

impl ConvDims {
    pub fn resolve(
        input_shape: &[usize],
        kernel_shape: &[usize],
        stride: usize,
        padding: Padding,
    ) -> Result<ConvDims> {
        if input_shape.len() != 3 {
            return Err(Error::Dimension(format!(
                "conv2d input must be rank 3 [C,H,W], got {input_shape:?}"
            )));
        }
        if kernel_shape.len() != 4 {
            return Err(Error::Dimension(format!(
                "conv2d kernel must be rank 4 [Cout,Cin,kH,kW], got {kernel_shape:?}"
            )));
        }
        if stride == 0 {
            return Err(Error::Config("conv2d stride must be positive".into()));
        }
        let (c_in, h, w) = (input_shape[0], input_shape[1], input_shape[2]);
        let (c_out, kc, kh, kw) = (kernel_shape[0], kernel_shape[1], kernel_shape[2], kernel_shape[3]);
        if kc != c_in {
            return Err(Error::Dimension(format!(
                "kernel expects {kc} input channels, input has {c_in} (axes: kernel[1] vs input[0])"
            )));
        }
        let (ph, pw) = padding.amounts();
        let (hp, wp) = (h + 2 * ph, w + 2 * pw);
        if kh > hp || kw > wp {
            return Err(Error::Dimension(format!(
                "kernel {kh}x{kw} exceeds padded input {hp}x{wp} (axes: kernel[2,3])"
            )));
        }
        let h_out = (hp - kh) / stride + 1;
        let w_out = (wp - kw) / stride + 1;
        Ok(ConvDims { c_in, h, w, c_out, kh, kw, h_out, w_out, ph, pw, stride })
    }
}

/// Materialize the circularly padded input, channel by channel.
fn pad_circular(input: &[f64], d: &ConvDims) -> Vec<f64> {
    let (h, w, ph, pw) = (d.h, d.w, d.ph, d.pw);
    let (hp, wp) = (h + 2 * ph, w + 2 * pw);
    let mut out = vec![0.0; d.c_in * hp * wp];
    for c in 0..d.c_in {
        let src = &input[c * h * w..(c + 1) * h * w];
        let dst = &mut out[c * hp * wp..(c + 1) * hp * wp];
        for ip in 0..hp {
            let i = (ip as isize - ph as isize).rem_euclid(h as isize) as usize;
            for jp in 0..wp {
                let j = (jp as isize - pw as isize).rem_euclid(w as isize) as usize;
                dst[ip * wp + jp] = src[i * w + j];
            }
        }
    }
    out
}

/// col[(c*kh*kw + p*kw + q), (oi*w_out + oj)] = padded[c][oi*s + p][oj*s + q]
fn im2col(padded: &[f64], d: &ConvDims) -> Vec<f64> {
    let (hp, wp) = (d.h + 2 * d.ph, d.w + 2 * d.pw);
    let n = d.h_out * d.w_out;
    let mut col = vec![0.0; d.c_in * d.kh * d.kw * n];
    for c in 0..d.c_in {
        let plane = &padded[c * hp * wp..(c + 1) * hp * wp];
        for p in 0..d.kh {
            for q in 0..d.kw {
                let row = &mut col[((c * d.kh + p) * d.kw + q) * n..((c * d.kh + p) * d.kw + q + 1) * n];
                for oi in 0..d.h_out {
                    let base = (oi * d.stride + p) * wp + q;
                    for oj in 0..d.w_out {
                        row[oi * d.w_out + oj] = plane[base + oj * d.stride];
                    }
                }
            }
        }
    }
    col
}

pub(crate) fn conv2d_forward(input: &[f64], kernel: &[f64], bias: Option<&[f64]>, d: &ConvDims) -> Vec<f64> {
    let padded = pad_circular(input, d);
    let col = im2col(&padded, d);
    let k = d.c_in * d.kh * d.kw;
    let n = d.h_out * d.w_out;
    let mut out = vec![0.0; d.c_out * n];
    unsafe {
        matrixmultiply::dgemm(
            d.c_out, k, n,
            1.0,
            kernel.as_ptr(), k as isize, 1,
            col.as_ptr(), n as isize, 1,
            0.0,
            out.as_mut_ptr(), n as isize, 1,
        );
    }
    if let Some(b) = bias {
        for o in 0..d.c_out {
            let bo = b[o];
            for v in &mut out[o * n..(o + 1) * n] {
                *v += bo;
            }
        }
    }
    out
}

pub(crate) struct ConvGrads {
    pub d_input: Vec<f64>,
    pub d_kernel: Vec<f64>,
    pub d_bias: Option<Vec<f64>>,
}

pub(crate) fn conv2d_backward(
    input: &[f64],
    kernel: &[f64],
    has_bias: bool,
    d: &ConvDims,
    d_out: &[f64],
) -> ConvGrads {
    let k = d.c_in * d.kh * d.kw;
    let n = d.h_out * d.w_out;
    let padded = pad_circular(input, d);
    let col = im2col(&padded, d);

    // dK = dOut [Cout,N] x col^T [N,K]
    let mut d_kernel = vec![0.0; d.c_out * k];
    unsafe {
        matrixmultiply::dgemm(
            d.c_out, n, k,
            1.0,
            d_out.as_ptr(), n as isize, 1,
            col.as_ptr(), 1, n as isize,
            0.0,
            d_kernel.as_mut_ptr(), k as isize, 1,
        );
    }

    // dCol = K^T [K,Cout] x dOut [Cout,N]
    let mut d_col = vec![0.0; k * n];
    unsafe {
        matrixmultiply::dgemm(
            k, d.c_out, n,
            1.0,
            kernel.as_ptr(), 1, k as isize,
            d_out.as_ptr(), n as isize, 1,
            0.0,
            d_col.as_mut_ptr(), n as isize, 1,
        );
    }

    // col2im scatter into the padded grid, then fold the pad ring back
    // through the circular wrap. Sequential, fixed order.
    let (hp, wp) = (d.h + 2 * d.ph, d.w + 2 * d.pw);
    let mut d_padded = vec![0.0; d.c_in * hp * wp];
    for c in 0..d.c_in {
        let plane = &mut d_padded[c * hp * wp..(c + 1) * hp * wp];
        for p in 0..d.kh {
            for q in 0..d.kw {
                let row = &d_col[((c * d.kh + p) * d.kw + q) * n..((c * d.kh + p) * d.kw + q + 1) * n];
                for oi in 0..d.h_out {
                    let base = (oi * d.stride + p) * wp + q;
                    for oj in 0..d.w_out {
                        plane[base + oj * d.stride] += row[oi * d.w_out + oj];
                    }
                }
            }
        }
    }

    let mut d_input = vec![0.0; d.c_in * d.h * d.w];
    for c in 0..d.c_in {
        let plane = &d_padded[c * hp * wp..(c + 1) * hp * wp];
        let dst = &mut d_input[c * d.h * d.w..(c + 1) * d.h * d.w];
        for ip in 0..hp {
            let i = (ip as isize - d.ph as isize).rem_euclid(d.h as isize) as usize;
            for jp in 0..wp {
                let j = (jp as isize - d.pw as isize).rem_euclid(d.w as isize) as usize;
                dst[i * d.w + j] += plane[ip * wp + jp];
            }
        }
    }

    let d_bias = if has_bias {
        let mut db = vec![0.0; d.c_out];
        for o in 0..d.c_out {
            db[o] = d_out[o * n..(o + 1) * n].iter().sum();
        }
        Some(db)
    } else {
        None
    };

    ConvGrads { d_input, d_kernel, d_bias }
}
