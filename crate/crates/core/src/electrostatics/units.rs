//! Physical constants and the two derived lengths the solver needs.

use std::f64::consts::PI;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// e²/(4π ε₀ k T) in Å: the distance at which two unit charges in vacuum
/// interact with energy kT. Multiplying q/(ε r) by this gives kT/e.
pub fn vacuum_bjerrum_length(temperature: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
        / (4.0 * PI * VACUUM_PERMITTIVITY * BOLTZMANN * temperature)
        * 1e10
}

/// Inverse Debye length κ (1/Å) of a 1:1 electrolyte.
pub fn debye_kappa(ionic_strength: f64, temperature: f64, dielectric: f64) -> f64 {
    // number density of each ion species, per Å³
    let density = ionic_strength * AVOGADRO * 1e-27;
    (8.0 * PI * vacuum_bjerrum_length(temperature) / dielectric * density).sqrt()
}
