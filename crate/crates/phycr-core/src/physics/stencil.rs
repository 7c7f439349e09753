//! Finite-difference filter coefficients.

/// The fixed derivative filters: a second-order central kernel in time and
/// fourth-order central kernels in space. All coefficient rows sum to zero,
/// so every filter annihilates constant fields exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSet {
    pub dt: f64,
    pub dx: f64,
    /// [-1, 0, 1] / (2 dt)
    pub kt: [f64; 3],
    /// 5x5 fourth-order Laplacian scaled by 1/(12 dx^2); plus-shaped, center -60/(12 dx^2).
    pub ks: [[f64; 5]; 5],
    /// [1, -8, 0, 8, -1] / (12 dx): fourth-order first derivative along one axis.
    pub d1: [f64; 5],
}

impl StencilSet {
    pub fn new(dt: f64, dx: f64) -> Self {
        let st = 1.0 / (2.0 * dt);
        let s2 = 1.0 / (12.0 * dx * dx);
        let s1 = 1.0 / (12.0 * dx);
        let mut ks = [[0.0; 5]; 5];
        let arm = [-1.0, 16.0, -60.0, 16.0, -1.0];
        for (k, &a) in arm.iter().enumerate() {
            ks[2][k] += a * s2; // horizontal arm
            ks[k][2] += a * s2; // vertical arm
        }
        // both arms contribute -60 at the center; the combined kernel keeps a single -60
        ks[2][2] = -60.0 * s2;
        StencilSet {
            dt,
            dx,
            kt: [-st, 0.0, st],
            ks,
            d1: [s1, -8.0 * s1, 0.0, 8.0 * s1, -s1],
        }
    }

    /// Flattened 5x5 Laplacian, row-major, for use as a convolution kernel.
    pub fn laplacian_flat(&self) -> Vec<f64> {
        self.ks.iter().flatten().copied().collect()
    }
}
