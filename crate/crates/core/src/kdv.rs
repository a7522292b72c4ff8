//! Elliptic traveling waves of KdV and the monodromy of the genus-one
//! Baker–Akhiezer factor.
//!
//! The equation is taken in the form `u_t = ¼(6u·u_x + u_xxx)`. Substituting
//! `u = −2℘(x + ct + x₀) + λ` and using `℘‴ = 12℘℘′` leaves the residual
//! `(3λ − 2c)℘′`, so the wave travels with speed `c = 3λ/2`. The other common
//! form `u_t + ¼(6u·u_x − u_xxx) = 0` is the same equation after `u ↦ −u`,
//! `t ↦ −t`.
//!
//! Derivatives are taken numerically with central Fornberg stencils, so the
//! residual is an independent check on the engine's `℘`.

use num_complex::Complex64;

use crate::elliptic::{EllipticError, Lattice};

/// `u(x, t) = −2℘(x + ct + x₀) + λ`.
#[derive(Debug, Clone)]
pub struct TravelingWave {
    pub lattice: Lattice,
    pub level: Complex64,
    pub shift: Complex64,
    pub speed: Complex64,
}

impl TravelingWave {
    /// Wave at level `λ` with the KdV speed `3λ/2` and no shift.
    pub fn new(lattice: Lattice, level: Complex64) -> Self {
        TravelingWave {
            lattice,
            level,
            shift: Complex64::new(0.0, 0.0),
            speed: 1.5 * level,
        }
    }

    /// The stationary solution `u = −2℘(x)`.
    pub fn stationary(lattice: Lattice) -> Self {
        Self::new(lattice, Complex64::new(0.0, 0.0))
    }

    pub fn with_shift(mut self, shift: Complex64) -> Self {
        self.shift = shift;
        self
    }

    /// Overrides the speed; used for negative controls and speed sweeps.
    pub fn with_speed(mut self, speed: Complex64) -> Self {
        self.speed = speed;
        self
    }

    pub fn argument(&self, x: Complex64, t: f64) -> Complex64 {
        x + self.speed * t + self.shift
    }

    pub fn u(&self, x: Complex64, t: f64) -> Result<Complex64, EllipticError> {
        Ok(-2.0 * self.lattice.wp(self.argument(x, t))? + self.level)
    }

    /// `u_t` from the chain rule, `−2c℘′`.
    pub fn u_t_exact(&self, x: Complex64, t: f64) -> Result<Complex64, EllipticError> {
        Ok(-2.0 * self.speed * self.lattice.wp_prime(self.argument(x, t))?)
    }
}

/// Sample points and stencil parameters.
///
/// Samples are `x_start + i·x_step` for `i < nx` and `t_start + j·t_step`
/// for `j < nt`; `x` may be complex. Derivatives use central stencils of
/// accuracy `order` with spacing `h` in `x` and `h_t` in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_start: Complex64,
    pub x_step: Complex64,
    pub nx: usize,
    pub t_start: f64,
    pub t_step: f64,
    pub nt: usize,
    pub h: f64,
    pub h_t: f64,
    pub order: usize,
}

pub const DEFAULT_ORDER: usize = 10;
pub const DEFAULT_NX: usize = 200;
pub const DEFAULT_NT: usize = 20;

impl Grid {
    /// One full period along the line through the reduced half-period `ω₂′`
    /// parallel to `2ω₁′`, which stays as far as possible from the poles,
    /// with `nt` times spanning a shift of 5% of that period.
    pub fn for_wave(w: &TravelingWave, nx: usize, nt: usize) -> Self {
        let (w1, w2) = w.lattice.reduced_basis();
        let period = 2.0 * w1;
        let speed = w.speed.norm().max(1.0);
        let h = 0.01 * w.lattice.min_period();
        Grid {
            x_start: w2 - w.shift,
            x_step: period / nx.max(1) as f64,
            nx,
            t_start: 0.0,
            t_step: 0.05 * period.norm() / (speed * nt.max(1) as f64),
            nt,
            h,
            h_t: h / speed,
            order: DEFAULT_ORDER,
        }
    }

    pub fn default_for(w: &TravelingWave) -> Self {
        Self::for_wave(w, DEFAULT_NX, DEFAULT_NT)
    }

    /// Same grid with stencil spacing `h` (and `h_t` scaled alike).
    pub fn with_spacing(mut self, h: f64) -> Self {
        self.h_t *= h / self.h;
        self.h = h;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn points(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        (0..self.nt).flat_map(move |j| {
            let t = self.t_start + j as f64 * self.t_step;
            (0..self.nx).map(move |i| (self.x_start + self.x_step * i as f64, t))
        })
    }
}

/// Fornberg's weights for the derivatives `0..=max_deriv` at `x0` from
/// values at `nodes`. Row `k` holds the weights of the `k`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

/// Central stencil on the integer offsets `−r..=r` for the `deriv`-th
/// derivative at accuracy `order` (rounded up to even).
#[derive(Debug, Clone)]
pub struct Stencil {
    pub radius: usize,
    pub weights: Vec<f64>,
}

impl Stencil {
    pub fn central(deriv: usize, order: usize) -> Self {
        let order = order.max(2).div_ceil(2) * 2;
        let radius = deriv.div_ceil(2) + order / 2 - 1;
        let nodes: Vec<f64> = (-(radius as i64)..=radius as i64)
            .map(|k| k as f64)
            .collect();
        let weights = fornberg_weights(0.0, &nodes, deriv)
            .pop()
            .unwrap_or_default();
        Stencil { radius, weights }
    }

    fn apply<F>(&self, h: f64, mut f: F) -> Result<Complex64, EllipticError>
    where
        F: FnMut(f64) -> Result<Complex64, EllipticError>,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in self.weights.iter().enumerate() {
            if *w != 0.0 {
                acc += *w * f((k as f64 - self.radius as f64) * h)?;
            }
        }
        Ok(acc)
    }
}

/// How `u_t` is obtained in [`kdv_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDerivative {
    FiniteDifference,
    ChainRule,
}

/// Largest `|u_t − ¼(6u·u_x + u_xxx)|` over the grid.
pub fn kdv_residual(
    w: &TravelingWave,
    grid: &Grid,
    time: TimeDerivative,
) -> Result<f64, EllipticError> {
    let d1 = Stencil::central(1, grid.order);
    let d3 = Stencil::central(3, grid.order);
    let reach_x = d1.radius.max(d3.radius) as f64 * grid.h;
    let reach_t = match time {
        TimeDerivative::FiniteDifference => d1.radius as f64 * grid.h_t * w.speed.norm(),
        TimeDerivative::ChainRule => 0.0,
    };
    let clearance = w.lattice.pole_radius() + reach_x.max(reach_t);
    let (h, ht) = (grid.h, grid.h_t);
    let mut worst: f64 = 0.0;
    for (x, t) in grid.points() {
        let z = w.argument(x, t);
        let distance = w.lattice.distance_to_lattice(z);
        if distance <= clearance {
            return Err(EllipticError::PoleProximity {
                z,
                distance,
                radius: clearance,
            });
        }
        let u = w.u(x, t)?;
        let u_x = d1.apply(h, |s| w.u(x + s, t))? / h;
        let u_xxx = d3.apply(h, |s| w.u(x + s, t))? / (h * h * h);
        let u_t = match time {
            TimeDerivative::FiniteDifference => d1.apply(ht, |s| w.u(x, t + s))? / ht,
            TimeDerivative::ChainRule => w.u_t_exact(x, t)?,
        };
        let r = (u_t - 0.25 * (6.0 * u * u_x + u_xxx)).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Largest `|u(x + s, t) − u(x, t)|` over the grid.
pub fn shift_defect(
    w: &TravelingWave,
    grid: &Grid,
    shift: Complex64,
) -> Result<f64, EllipticError> {
    let mut worst: f64 = 0.0;
    for (x, t) in grid.points() {
        worst = worst.max((w.u(x + shift, t)? - w.u(x, t)?).norm());
    }
    Ok(worst)
}

/// Largest change of `u` under the periods `2ω₁`, `2ω₂` and `2ω₁ + 2ω₂`,
/// sampled on the default grid.
pub fn periodicity_check(w: &TravelingWave) -> Result<f64, EllipticError> {
    let grid = Grid::default_for(w);
    let (p1, p2) = (2.0 * w.lattice.omega1(), 2.0 * w.lattice.omega2());
    let mut worst: f64 = 0.0;
    for shift in [p1, p2, p1 + p2] {
        worst = worst.max(shift_defect(w, &grid, shift)?);
    }
    Ok(worst)
}

/// Exponent `2ω_j ζ(z) − η_j z` of the monodromy factor, `j ∈ {1, 2}`.
pub fn monodromy_exponent(
    lattice: &Lattice,
    j: usize,
    z: Complex64,
) -> Result<Complex64, EllipticError> {
    let eta = lattice.quasi_periods()?;
    let (omega, eta) = match j {
        1 => (lattice.omega1(), eta.eta1),
        2 => (lattice.omega2(), eta.eta2),
        _ => panic!("monodromy index must be 1 or 2, got {j}"),
    };
    Ok(2.0 * omega * lattice.zeta(z)? - eta * z)
}

/// `φ_j(z) = exp(2ω_j ζ(z) − η_j z)`.
pub fn monodromy_factor(
    lattice: &Lattice,
    j: usize,
    z: Complex64,
) -> Result<Complex64, EllipticError> {
    Ok(monodromy_exponent(lattice, j, z)?.exp())
}

/// `|φ_j(z + 2ω_k)/φ_j(z) − 1|`, computed from the exponents so that large
/// factors do not overflow.
pub fn monodromy_defect(
    lattice: &Lattice,
    j: usize,
    k: usize,
    z: Complex64,
) -> Result<f64, EllipticError> {
    let period = match k {
        1 => 2.0 * lattice.omega1(),
        2 => 2.0 * lattice.omega2(),
        _ => panic!("period index must be 1 or 2, got {k}"),
    };
    let jump = monodromy_exponent(lattice, j, z + period)? - monodromy_exponent(lattice, j, z)?;
    Ok((jump.exp() - 1.0).norm())
}
