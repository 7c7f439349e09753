use crate::error::{Error, Result};

/// Which benchmark PDE is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeKind {
    /// u_t + u.grad(u) - nu*lap(u) = 0
    Burgers,
    /// u_t = d*lap(u) + lambda(r)u - omega(r)v (and the coupled v equation)
    LambdaOmega,
    /// u_t = gu*lap(u) + u - u^3 - v + alpha, v_t = gv*lap(v) + beta(u - v)
    FitzHughNagumo,
}

impl PdeKind {
    pub fn name(self) -> &'static str {
        match self {
            PdeKind::Burgers => "burgers",
            PdeKind::LambdaOmega => "lambda-omega",
            PdeKind::FitzHughNagumo => "fn",
        }
    }
}

/// Boundary treatment per edge; all benchmarks are periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcKind {
    Periodic,
    /// Constant boundary value padded into the ghost ring.
    Dirichlet(f64),
    /// Prescribed flux along the axis; ghost nodes mirror the interior
    /// shifted so a centered difference across the boundary yields the flux.
    Neumann(f64),
}

/// Form of the lambda-omega nonlinearity. `Literal` keeps lambda = 1 - r^2,
/// omega = -r^2 with r = u^2 + v^2; `Linear` uses lambda = 1 - r, omega = -r,
/// the convention of the usual reference datasets for this system. The two
/// disagree; `Literal` is the default and the discrepancy is intentional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoExponent {
    Literal,
    Linear,
}

impl LoExponent {
    /// Power applied to r = u^2 + v^2 inside lambda and omega.
    pub fn power(self) -> i32 {
        match self {
            LoExponent::Literal => 2,
            LoExponent::Linear => 1,
        }
    }
}

/// One benchmark system: the PDE, its coefficients, domain and grids.
///
/// All solution fields carry two channels (u, v). The spatial grid is
/// `height x width` with uniform spacing `dx` on both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSystem {
    pub kind: PdeKind,
    /// Burgers viscosity.
    pub nu: f64,
    /// lambda-omega diffusion coefficient.
    pub lo_diffusion: f64,
    pub lo_exponent: LoExponent,
    /// FitzHugh-Nagumo coefficients.
    pub fn_gamma_u: f64,
    pub fn_gamma_v: f64,
    pub fn_alpha: f64,
    pub fn_beta: f64,
    /// Physical edge length of the square domain.
    pub domain_len: f64,
    /// Coordinate of the low domain corner (same on both axes).
    pub domain_origin: f64,
    pub height: usize,
    pub width: usize,
    pub dx: f64,
    /// Coarse (network) time step.
    pub dt: f64,
    pub bc: BcKind,
}

pub const CHANNELS: usize = 2;

impl PdeSystem {
    /// 2D Burgers on [0,1]^2 with nu = 0.005 and periodic boundaries.
    pub fn burgers(grid: usize, dt: f64) -> Self {
        PdeSystem {
            kind: PdeKind::Burgers,
            nu: 0.005,
            lo_diffusion: 0.1,
            lo_exponent: LoExponent::Literal,
            fn_gamma_u: 1.0,
            fn_gamma_v: 100.0,
            fn_alpha: 0.01,
            fn_beta: 0.25,
            domain_len: 1.0,
            domain_origin: 0.0,
            height: grid,
            width: grid,
            dx: 1.0 / grid as f64,
            dt,
            bc: BcKind::Periodic,
        }
    }

    /// lambda-omega reaction-diffusion on [-10,10]^2, diffusion 0.1.
    pub fn lambda_omega(grid: usize, dt: f64) -> Self {
        PdeSystem {
            kind: PdeKind::LambdaOmega,
            domain_len: 20.0,
            domain_origin: -10.0,
            height: grid,
            width: grid,
            dx: 20.0 / grid as f64,
            dt,
            ..PdeSystem::burgers(grid, dt)
        }
    }

    /// FitzHugh-Nagumo on [0,grid]^2 so dx = 1, gamma = (1, 100),
    /// alpha = 0.01, beta = 0.25.
    pub fn fitzhugh_nagumo(grid: usize, dt: f64) -> Self {
        PdeSystem {
            kind: PdeKind::FitzHughNagumo,
            domain_len: grid as f64,
            domain_origin: 0.0,
            height: grid,
            width: grid,
            dx: 1.0,
            dt,
            ..PdeSystem::burgers(grid, dt)
        }
    }

    pub fn by_name(name: &str, grid: usize, dt: f64) -> Result<Self> {
        match name {
            "burgers" => Ok(Self::burgers(grid, dt)),
            "lambda-omega" | "lambda_omega" | "lo" => Ok(Self::lambda_omega(grid, dt)),
            "fn" | "fitzhugh-nagumo" => Ok(Self::fitzhugh_nagumo(grid, dt)),
            other => Err(Error::Config(format!(
                "unknown system '{other}' (expected burgers | lambda-omega | fn)"
            ))),
        }
    }

    /// Check the uniform-spacing invariant dx = domain_len / extent.
    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 {
            return Err(Error::Config("grid extents must be positive".into()));
        }
        let expect = self.domain_len / self.width as f64;
        let expect_h = self.domain_len / self.height as f64;
        if (self.dx - expect).abs() > 1e-12 * expect.abs().max(1.0)
            || (self.dx - expect_h).abs() > 1e-12 * expect_h.abs().max(1.0)
        {
            return Err(Error::Config(format!(
                "dx = {} does not match domain_len/grid = {}",
                self.dx, expect
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::Config("dt must be positive".into()));
        }
        Ok(())
    }
}
