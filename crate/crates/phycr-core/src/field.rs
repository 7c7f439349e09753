//! Plain (non-differentiable) solution snapshots and time series.

use crate::error::{Error, Result};

/// One spatial snapshot: `channels` scalar fields on an `height x width` grid.
///
/// Storage is row-major, channel-major: `data[c*h*w + i*w + j]` holds channel
/// `c` at row `i`, column `j`. Rows run along y, columns along x.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Field { channels, height, width, data: vec![0.0; channels * height * width] }
    }

    pub fn from_data(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::Dimension(format!(
                "field payload has {} values, expected {}x{}x{} = {}",
                data.len(),
                channels,
                height,
                width,
                channels * height * width
            )));
        }
        Ok(Field { channels, height, width, data })
    }

    #[inline]
    pub fn at(&self, c: usize, i: usize, j: usize) -> f64 {
        self.data[(c * self.height + i) * self.width + j]
    }

    #[inline]
    pub fn at_mut(&mut self, c: usize, i: usize, j: usize) -> &mut f64 {
        &mut self.data[(c * self.height + i) * self.width + j]
    }

    /// Borrow one channel as a flat `height x width` slice.
    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.height * self.width;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn same_shape(&self, other: &Field) -> bool {
        self.channels == other.channels && self.height == other.height && self.width == other.width
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Circularly shift the field by (`si`, `sj`) grid cells.
    pub fn shifted(&self, si: isize, sj: isize) -> Field {
        let (h, w) = (self.height as isize, self.width as isize);
        let mut out = Field::zeros(self.channels, self.height, self.width);
        for c in 0..self.channels {
            for i in 0..self.height {
                for j in 0..self.width {
                    let ti = (i as isize + si).rem_euclid(h) as usize;
                    let tj = (j as isize + sj).rem_euclid(w) as usize;
                    *out.at_mut(c, ti, tj) = self.at(c, i, j);
                }
            }
        }
        out
    }
}

/// Time-ordered sequence of snapshots with a uniform step `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub fields: Vec<Field>,
}

impl Trajectory {
    pub fn new(dt: f64, fields: Vec<Field>) -> Result<Self> {
        if let Some(first) = fields.first() {
            for (k, f) in fields.iter().enumerate() {
                if !f.same_shape(first) {
                    return Err(Error::Dimension(format!(
                        "snapshot {k} shape {}x{}x{} differs from first snapshot {}x{}x{}",
                        f.channels, f.height, f.width, first.channels, first.height, first.width
                    )));
                }
            }
        }
        Ok(Trajectory { dt, fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Keep every `stride`-th snapshot starting from the first.
    pub fn thinned(&self, stride: usize) -> Result<Trajectory> {
        if stride == 0 {
            return Err(Error::Config("thinning stride must be positive".into()));
        }
        Ok(Trajectory {
            dt: self.dt * stride as f64,
            fields: self.fields.iter().step_by(stride).cloned().collect(),
        })
    }
}
