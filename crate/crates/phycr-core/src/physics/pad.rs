//! Hard boundary encoding via ghost-node padding.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::physics::BcKind;

/// Pad one axis by `width` ghost rings on both sides.
///
/// Periodic wraps; Dirichlet writes the constant into the ring; Neumann sets
/// ring `d` to the interior mirror shifted by `2 d dx q`, so the centered
/// difference across the boundary node reproduces the flux `q` (taken as the
/// derivative along the axis: low-side ghosts subtract, high-side ghosts add).
pub(crate) fn pad_axis(field: &Field, bc: BcKind, width: usize, dx: f64, axis: usize) -> Result<Field> {
    let extent = if axis == 0 { field.height } else { field.width };
    if width == 0 {
        return Err(Error::Config("pad width must be at least 1".into()));
    }
    if width >= extent {
        return Err(Error::Config(format!(
            "pad width {width} must be smaller than the grid extent {extent}"
        )));
    }
    let (h, w) = (field.height, field.width);
    let (oh, ow) = if axis == 0 { (h + 2 * width, w) } else { (h, w + 2 * width) };
    let mut out = Field::zeros(field.channels, oh, ow);
    for c in 0..field.channels {
        for oi in 0..oh {
            for oj in 0..ow {
                let (p, q) = if axis == 0 { (oi, oj) } else { (oj, oi) };
                // p indexes the padded axis, q the untouched one
                let signed = p as isize - width as isize;
                let v = if signed >= 0 && (signed as usize) < extent {
                    get(field, c, axis, signed as usize, q)
                } else {
                    match bc {
                        BcKind::Periodic => {
                            let wrapped = signed.rem_euclid(extent as isize) as usize;
                            get(field, c, axis, wrapped, q)
                        }
                        BcKind::Dirichlet(g) => g,
                        BcKind::Neumann(flux) => {
                            if signed < 0 {
                                let d = (-signed) as usize; // ghost distance below the low edge
                                get(field, c, axis, d, q) - 2.0 * d as f64 * dx * flux
                            } else {
                                let d = signed as usize - (extent - 1); // above the high edge
                                get(field, c, axis, extent - 1 - d, q) + 2.0 * d as f64 * dx * flux
                            }
                        }
                    }
                };
                *out.at_mut(c, oi, oj) = v;
            }
        }
    }
    Ok(out)
}

#[inline]
fn get(field: &Field, c: usize, axis: usize, p: usize, q: usize) -> f64 {
    if axis == 0 {
        field.at(c, p, q)
    } else {
        field.at(c, q, p)
    }
}

/// Pad both axes by `width` ghost rings. Corner ghosts come from padding the
/// axes sequentially (rows first), which the plus-shaped stencils never read.
pub fn pad_bc(field: &Field, bc: BcKind, width: usize, dx: f64) -> Result<Field> {
    let rows = pad_axis(field, bc, width, dx, 0)?;
    pad_axis(&rows, bc, width, dx, 1)
}
