use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ElectrostaticsError;
use crate::geom::Vec3;

/// Potential sampled on a regular grid, x-fastest storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid {
    pub dims: [usize; 3],
    pub spacing: f64,
    pub origin: Vec3,
    /// kT/e
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
}

impl PotentialGrid {
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.spacing
    }

    /// Upper corner of the grid box.
    pub fn extent_max(&self) -> Vec3 {
        self.node_position(self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1)
    }

    /// Trilinear interpolation; `None` outside the closed grid box.
    pub fn interpolate(&self, point: Vec3) -> Option<f64> {
        let rel = (point - self.origin) * (1.0 / self.spacing);
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for (axis, coord) in rel.to_array().into_iter().enumerate() {
            let top = (self.dims[axis] - 1) as f64;
            if !(0.0..=top).contains(&coord) {
                return None;
            }
            let cell = (coord.floor() as usize).min(self.dims[axis] - 2);
            base[axis] = cell;
            frac[axis] = coord - cell as f64;
        }
        let [i, j, k] = base;
        let [fx, fy, fz] = frac;
        let mut acc = 0.0;
        for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
                    acc += wx * wy * wz * self.value(i + di, j + dj, k + dk);
                }
            }
        }
        Some(acc)
    }
}

/// Text dump: a header (dims, spacing, origin, units, solver status)
/// followed by node values in x-fastest order, one per line.
pub fn write_grid_dump(grid: &PotentialGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# potential grid");
    let _ = writeln!(out, "dims {} {} {}", grid.dims[0], grid.dims[1], grid.dims[2]);
    let _ = writeln!(out, "spacing {}", grid.spacing);
    let _ = writeln!(out, "origin {} {} {}", grid.origin.x, grid.origin.y, grid.origin.z);
    let _ = writeln!(out, "units kT/e");
    let _ = writeln!(out, "converged {}", grid.converged);
    let _ = writeln!(out, "iterations {}", grid.iterations);
    let _ = writeln!(out, "final_residual {}", grid.final_residual);
    let _ = writeln!(out, "values");
    for v in &grid.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn read_grid_dump(text: &str) -> Result<PotentialGrid, ElectrostaticsError> {
    let bad = |m: &str| ElectrostaticsError::GridDump(m.to_string());
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let mut field = |key: &str| -> Result<Vec<String>, ElectrostaticsError> {
        let line = lines.next().ok_or_else(|| bad("truncated header"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(&format!("expected `{key}`")));
        }
        Ok(parts.map(str::to_string).collect())
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
    let dims_f = field("dims")?;
    if dims_f.len() != 3 {
        return Err(bad("dims needs 3 values"));
    }
    let mut dims = [0usize; 3];
    for (d, s) in dims.iter_mut().zip(&dims_f) {
        *d = s.parse().map_err(|_| bad("bad dims"))?;
    }
    let spacing = num(&field("spacing")?.join(""))?;
    let o = field("origin")?;
    if o.len() != 3 {
        return Err(bad("origin needs 3 values"));
    }
    let origin = Vec3::new(num(&o[0])?, num(&o[1])?, num(&o[2])?);
    if field("units")?.join(" ") != "kT/e" {
        return Err(bad("unsupported units"));
    }
    let converged = field("converged")?.join("") == "true";
    let iterations = field("iterations")?
        .join("")
        .parse()
        .map_err(|_| bad("bad iterations"))?;
    let final_residual = num(&field("final_residual")?.join(""))?;
    field("values")?;
    let values = lines.map(|l| num(l.trim())).collect::<Result<Vec<_>, _>>()?;
    if values.len() != dims.iter().product::<usize>() {
        return Err(bad("value count does not match dims"));
    }
    Ok(PotentialGrid {
        dims,
        spacing,
        origin,
        values,
        converged,
        iterations,
        final_residual,
    })
}
