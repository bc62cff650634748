pub mod evolve;
pub mod moments;
pub mod oracle;
pub mod verify;

use cbop_core::moments::ModelParams;

/// Lattice-type suites need `k₁ = k₂ = 1` and a time flow.
pub fn lattice_applicable(p: &ModelParams) -> Result<(), String> {
    if p.k1 != 1 || p.k2 != 1 {
        return Err(format!("needs k1 = k2 = 1, model has ({}, {})", p.k1, p.k2));
    }
    if !p.has_time_flow() {
        return Err("needs a weight with a time flow".into());
    }
    Ok(())
}
