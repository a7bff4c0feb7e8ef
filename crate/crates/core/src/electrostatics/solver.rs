use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::units::{debye_kappa, vacuum_bjerrum_length};
use super::{ChargedAtom, ChargedAtomSet, ElectrostaticsError, PotentialGrid};
use crate::geom::Vec3;

/// Clearance between any atom centre and the grid boundary, Å.
pub const GRID_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Nodes per axis; odd so that a node sits on the grid centre.
    pub grid_dim: usize,
    /// Å
    pub spacing: f64,
    pub solute_dielectric: f64,
    pub solvent_dielectric: f64,
    /// mol/L
    pub ionic_strength: f64,
    /// K
    pub temperature: f64,
    /// Stop when the residual norm falls to this fraction of its initial value.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub sor_omega: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_dim: 65,
            spacing: 1.0,
            solute_dielectric: 2.0,
            solvent_dielectric: 80.0,
            ionic_strength: 0.145,
            temperature: 298.15,
            tolerance: 1e-6,
            max_iterations: 20_000,
            sor_omega: 1.9,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ElectrostaticsError> {
        let fail = |m: String| Err(ElectrostaticsError::InvalidConfig(m));
        if self.grid_dim < 17 || self.grid_dim % 2 == 0 {
            return fail(format!("grid_dim must be odd and >= 17, got {}", self.grid_dim));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return fail(format!("spacing must be positive, got {}", self.spacing));
        }
        if !(self.tolerance > 0.0) {
            return fail(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return fail(format!("sor_omega must lie in (0, 2), got {}", self.sor_omega));
        }
        if !(self.solute_dielectric > 0.0 && self.solvent_dielectric > 0.0) {
            return fail("dielectric constants must be positive".into());
        }
        if !(self.ionic_strength >= 0.0) {
            return fail("ionic strength must be non-negative".into());
        }
        if !(self.temperature > 0.0) {
            return fail("temperature must be positive".into());
        }
        Ok(())
    }

    /// Inverse Debye length of the solvent, 1/Å.
    pub fn kappa(&self) -> f64 {
        debye_kappa(self.ionic_strength, self.temperature, self.solvent_dielectric)
    }

    /// Smallest spacing at which the atoms fit with the required margin.
    pub fn min_spacing_for(&self, set: &ChargedAtomSet) -> f64 {
        let center = Vec3::centroid(set.atoms.iter().map(|a| a.position)).unwrap_or(Vec3::ZERO);
        let reach = set
            .atoms
            .iter()
            .flat_map(|a| (a.position - center).to_array())
            .fold(0.0f64, |m, d| m.max(d.abs()));
        (reach + GRID_MARGIN) / ((self.grid_dim - 1) as f64 / 2.0)
    }
}

/// Σ qᵢ e^{−κ rᵢ} ℓ / (ε rᵢ) in kT/e, ℓ the vacuum Bjerrum length at
/// `temperature`.
pub fn analytic_screened_coulomb(
    atoms: &[ChargedAtom],
    point: Vec3,
    kappa: f64,
    dielectric: f64,
    temperature: f64,
) -> Result<f64, ElectrostaticsError> {
    let scale = vacuum_bjerrum_length(temperature) / dielectric;
    let mut sum = 0.0;
    for atom in atoms {
        let r = atom.position.distance(point);
        if r <= 1e-6 {
            return Err(ElectrostaticsError::SingularPoint);
        }
        sum += atom.charge * (-kappa * r).exp() / r;
    }
    Ok(sum * scale)
}

/// Trilinear interpolation at each point.
pub fn potential_at_points(grid: &PotentialGrid, points: &[Vec3]) -> Result<Vec<f64>, ElectrostaticsError> {
    points
        .iter()
        .enumerate()
        .map(|(index, p)| {
            grid.interpolate(*p)
                .ok_or(ElectrostaticsError::OutOfGrid { index })
        })
        .collect()
}

/// Solves the linearized Poisson-Boltzmann equation by successive
/// over-relaxation on a cubic grid centred on the atom centroid.
///
/// Boundary nodes carry the analytic Debye-Hückel potential of the
/// charges in pure solvent. Nodes inside any atom's van der Waals sphere
/// take the solute dielectric; edge dielectrics are the mean of their two
/// nodes. Sweeps run in fixed lexicographic order, so the result is
/// deterministic and exactly antisymmetric under charge negation.
pub fn solve_potential(set: &ChargedAtomSet, config: &SolverConfig) -> Result<PotentialGrid, ElectrostaticsError> {
    config.validate()?;
    let n = config.grid_dim;
    let h = config.spacing;
    let center = Vec3::centroid(set.atoms.iter().map(|a| a.position)).unwrap_or(Vec3::ZERO);
    let half = (n - 1) as f64 / 2.0 * h;
    let too_small = || ElectrostaticsError::GridTooSmall {
        dim: n,
        spacing: h,
        margin: GRID_MARGIN,
    };
    for a in &set.atoms {
        if !a.position.is_finite() || !a.charge.is_finite() {
            return Err(ElectrostaticsError::InvalidConfig("non-finite atom".into()));
        }
        let d = a.position - center;
        if d.to_array().iter().any(|c| c.abs() + GRID_MARGIN > half) {
            return Err(too_small());
        }
    }
    let origin = center - Vec3::new(half, half, half);
    let mut grid = PotentialGrid {
        dims: [n, n, n],
        spacing: h,
        origin,
        values: vec![0.0; n * n * n],
        converged: false,
        iterations: 0,
        final_residual: 0.0,
    };
    let idx = |i: usize, j: usize, k: usize| i + n * (j + n * k);
    let sy = n;
    let sz = n * n;

    // dielectric per node
    let eps_in = config.solute_dielectric;
    let eps_out = config.solvent_dielectric;
    let mut inside = vec![false; n * n * n];
    for a in &set.atoms {
        let rel = (a.position - origin) * (1.0 / h);
        let reach = a.radius / h;
        let lo = |c: f64| ((c - reach).ceil().max(0.0)) as usize;
        let hi = |c: f64| ((c + reach).floor().min((n - 1) as f64)) as usize;
        let r2 = a.radius * a.radius;
        for k in lo(rel.z)..=hi(rel.z) {
            for j in lo(rel.y)..=hi(rel.y) {
                for i in lo(rel.x)..=hi(rel.x) {
                    if grid.node_position(i, j, k).distance_sq(a.position) <= r2 {
                        inside[idx(i, j, k)] = true;
                    }
                }
            }
        }
    }
    let eps: Vec<f64> = inside.iter().map(|&s| if s { eps_in } else { eps_out }).collect();
    let edge = |a: usize, b: usize| 0.5 * (eps[a] + eps[b]);
    let mut ex = vec![0.0; n * n * n];
    let mut ey = vec![0.0; n * n * n];
    let mut ez = vec![0.0; n * n * n];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let p = idx(i, j, k);
                if i + 1 < n {
                    ex[p] = edge(p, p + 1);
                }
                if j + 1 < n {
                    ey[p] = edge(p, p + sy);
                }
                if k + 1 < n {
                    ez[p] = edge(p, p + sz);
                }
            }
        }
    }

    // source term: 4π ℓ q / h at each node after trilinear spreading
    let kappa = config.kappa();
    let bjerrum = vacuum_bjerrum_length(config.temperature);
    let mut rhs = vec![0.0; n * n * n];
    for a in &set.atoms {
        let rel = ((a.position - origin) * (1.0 / h)).to_array();
        let base: [usize; 3] = rel.map(|c| c.floor() as usize);
        if base.iter().any(|&b| b < 1 || b + 1 > n - 2) {
            return Err(too_small());
        }
        let frac = [0, 1, 2].map(|ax| rel[ax] - base[ax] as f64);
        for dk in 0..2 {
            for dj in 0..2 {
                for di in 0..2 {
                    let w = [di, dj, dk]
                        .iter()
                        .enumerate()
                        .map(|(ax, &d)| if d == 0 { 1.0 - frac[ax] } else { frac[ax] })
                        .product::<f64>();
                    rhs[idx(base[0] + di, base[1] + dj, base[2] + dk)] += 4.0 * PI * bjerrum * a.charge * w / h;
                }
            }
        }
    }

    // Debye-Hückel boundary
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let on_face = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
                if on_face {
                    grid.values[idx(i, j, k)] = analytic_screened_coulomb(
                        &set.atoms,
                        grid.node_position(i, j, k),
                        kappa,
                        eps_out,
                        config.temperature,
                    )?;
                }
            }
        }
    }

    let screen = eps_out * kappa * kappa * h * h;
    let mut diag = vec![1.0; n * n * n];
    for k in 1..n - 1 {
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let p = idx(i, j, k);
                let ionic = if inside[p] { 0.0 } else { screen };
                diag[p] = ionic + ex[p - 1] + ex[p] + ey[p - sy] + ey[p] + ez[p - sz] + ez[p];
            }
        }
    }

    let phi = &mut grid.values;
    let residual_at = |phi: &[f64], p: usize| -> f64 {
        ex[p - 1] * phi[p - 1]
            + ex[p] * phi[p + 1]
            + ey[p - sy] * phi[p - sy]
            + ey[p] * phi[p + sy]
            + ez[p - sz] * phi[p - sz]
            + ez[p] * phi[p + sz]
            + rhs[p]
            - diag[p] * phi[p]
    };
    let mut initial = 0.0;
    for k in 1..n - 1 {
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let r = residual_at(phi, idx(i, j, k));
                initial += r * r;
            }
        }
    }
    let initial = initial.sqrt();
    if initial == 0.0 {
        grid.converged = true;
        return Ok(grid);
    }

    let omega = config.sor_omega;
    let mut relative = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < config.max_iterations {
        let mut sum_sq = 0.0;
        for k in 1..n - 1 {
            for j in 1..n - 1 {
                let row = idx(0, j, k);
                for p in row + 1..row + n - 1 {
                    let r = residual_at(phi, p);
                    sum_sq += r * r;
                    phi[p] += omega * r / diag[p];
                }
            }
        }
        sweeps += 1;
        relative = sum_sq.sqrt() / initial;
        if !relative.is_finite() {
            return Err(ElectrostaticsError::NonFiniteDivergence { iterations: sweeps });
        }
        if relative <= config.tolerance {
            grid.converged = true;
            break;
        }
    }
    grid.iterations = sweeps;
    grid.final_residual = relative;
    if grid.values.iter().any(|v| !v.is_finite()) {
        return Err(ElectrostaticsError::NonFiniteDivergence { iterations: sweeps });
    }
    Ok(grid)
}
