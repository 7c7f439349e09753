//! Plain-array finite-difference derivative operators. These feed the
//! classical reference solvers and double as the scalar-path counterparts of
//! the taped stencil convolutions used by the loss.

use crate::error::{Error, Result};
use crate::field::{Field, Trajectory};
use crate::physics::pad::pad_axis;
use crate::physics::BcKind;

/// Temporal derivative of a trajectory with the central [-1,0,1]/(2 dt)
/// kernel on interior snapshots and second-order one-sided differences at the
/// two endpoints. Output has the same length as the input.
pub fn ddt(traj: &Trajectory) -> Result<Trajectory> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::Contract(format!("ddt needs at least 3 snapshots, got {n}")));
    }
    let dt = traj.dt;
    let len = traj.fields[0].data.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut d = vec![0.0; len];
        if k == 0 {
            let (a, b, c) = (&traj.fields[0].data, &traj.fields[1].data, &traj.fields[2].data);
            for i in 0..len {
                d[i] = (-3.0 * a[i] + 4.0 * b[i] - c[i]) / (2.0 * dt);
            }
        } else if k == n - 1 {
            let (a, b, c) = (&traj.fields[n - 1].data, &traj.fields[n - 2].data, &traj.fields[n - 3].data);
            for i in 0..len {
                d[i] = (3.0 * a[i] - 4.0 * b[i] + c[i]) / (2.0 * dt);
            }
        } else {
            let (p, q) = (&traj.fields[k + 1].data, &traj.fields[k - 1].data);
            for i in 0..len {
                d[i] = (p[i] - q[i]) / (2.0 * dt);
            }
        }
        let f = &traj.fields[k];
        out.push(Field { channels: f.channels, height: f.height, width: f.width, data: d });
    }
    Trajectory::new(dt, out)
}

/// Fourth-order 5x5 Laplacian with a width-2 ghost ring.
pub fn laplacian(field: &Field, dx: f64, bc: BcKind) -> Result<Field> {
    let rows = pad_axis(field, bc, 2, dx, 0)?;
    let cols = pad_axis(field, bc, 2, dx, 1)?;
    let scale = 1.0 / (12.0 * dx * dx);
    let (h, w) = (field.height, field.width);
    let mut out = Field::zeros(field.channels, h, w);
    for c in 0..field.channels {
        for i in 0..h {
            for j in 0..w {
                let vert = -rows.at(c, i, j) + 16.0 * rows.at(c, i + 1, j) + 16.0 * rows.at(c, i + 3, j)
                    - rows.at(c, i + 4, j);
                let horiz = -cols.at(c, i, j) + 16.0 * cols.at(c, i, j + 1) + 16.0 * cols.at(c, i, j + 3)
                    - cols.at(c, i, j + 4);
                *out.at_mut(c, i, j) = scale * (vert + horiz - 60.0 * field.at(c, i, j));
            }
        }
    }
    Ok(out)
}

/// Fourth-order first derivatives along x (columns) and y (rows).
pub fn grad_xy(field: &Field, dx: f64, bc: BcKind) -> Result<(Field, Field)> {
    let rows = pad_axis(field, bc, 2, dx, 0)?;
    let cols = pad_axis(field, bc, 2, dx, 1)?;
    let scale = 1.0 / (12.0 * dx);
    let (h, w) = (field.height, field.width);
    let mut ddx = Field::zeros(field.channels, h, w);
    let mut ddy = Field::zeros(field.channels, h, w);
    for c in 0..field.channels {
        for i in 0..h {
            for j in 0..w {
                *ddx.at_mut(c, i, j) = scale
                    * (cols.at(c, i, j) - 8.0 * cols.at(c, i, j + 1) + 8.0 * cols.at(c, i, j + 3)
                        - cols.at(c, i, j + 4));
                *ddy.at_mut(c, i, j) = scale
                    * (rows.at(c, i, j) - 8.0 * rows.at(c, i + 1, j) + 8.0 * rows.at(c, i + 3, j)
                        - rows.at(c, i + 4, j));
            }
        }
    }
    Ok((ddx, ddy))
}
