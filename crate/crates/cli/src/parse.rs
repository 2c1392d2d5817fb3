//! Parsing of direction, state, and preset tokens shared by command-line
//! flags and config files.

use bellmeas::pauli::{DensityMatrix, Direction};

/// Accepts a named axis (x, y, z, optionally with a leading minus) or a
/// comma-separated coordinate triple like "0.6,0,0.8"; surrounding
/// parentheses and whitespace are ignored.
pub fn parse_direction(token: &str) -> Result<Direction, String> {
    let t = token.trim();
    match t {
        "x" => return Ok(Direction::X),
        "y" => return Ok(Direction::Y),
        "z" => return Ok(Direction::Z),
        "-x" => return Ok(Direction::X.opposite()),
        "-y" => return Ok(Direction::Y.opposite()),
        "-z" => return Ok(Direction::Z.opposite()),
        _ => {}
    }
    let stripped = t.trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = stripped.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!(
            "direction '{token}' is neither a named axis nor a coordinate triple"
        ));
    }
    let mut c = [0.0f64; 3];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|_| format!("direction '{token}': '{part}' is not a number"))?;
    }
    Direction::new(c[0], c[1], c[2]).map_err(|e| format!("direction '{token}': {e}"))
}

/// singlet, ghz, or random:SEED. The named state must live on exactly
/// `n_qubits` qubits.
pub fn parse_state(spec: &str, n_qubits: usize) -> Result<DensityMatrix, String> {
    let s = spec.trim();
    match s {
        "singlet" => {
            if n_qubits != 2 {
                return Err(format!(
                    "state 'singlet' has two qubits but the scenario needs {n_qubits}"
                ));
            }
            Ok(DensityMatrix::singlet())
        }
        "ghz" => {
            if n_qubits != 3 {
                return Err(format!(
                    "state 'ghz' has three qubits but the scenario needs {n_qubits}"
                ));
            }
            Ok(DensityMatrix::ghz())
        }
        _ => {
            if let Some(seed) = s.strip_prefix("random:") {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| format!("state '{spec}': seed is not an unsigned integer"))?;
                return DensityMatrix::random_pure(n_qubits, seed).map_err(|e| e.to_string());
            }
            Err(format!(
                "unknown state '{spec}' (expected singlet, ghz, or random:SEED)"
            ))
        }
    }
}

/// The named measurement geometries a scenario can refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionPreset {
    /// Two-party optimal pair: x/y against the reversed diagonals.
    Xy,
    /// x and y settings for all three parties.
    GhzXy,
    /// Coplanar three-setting geometry at 0, 60 and 120 degrees.
    GisinCoplanar,
    /// Orthogonal axes against their four antiparallel sign combinations.
    XyzOctahedral,
}

pub fn parse_preset(name: &str) -> Result<DirectionPreset, String> {
    Ok(match name {
        "xy" => DirectionPreset::Xy,
        "ghz-xy" => DirectionPreset::GhzXy,
        "gisin-coplanar" => DirectionPreset::GisinCoplanar,
        "xyz-octahedral" => DirectionPreset::XyzOctahedral,
        _ => {
            return Err(format!(
                "unknown preset '{name}' (expected xy, ghz-xy, gisin-coplanar, or xyz-octahedral)"
            ))
        }
    })
}
