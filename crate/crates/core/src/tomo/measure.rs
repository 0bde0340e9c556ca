use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::noise::{normal, rotate_bloch, NoiseChannel};
use super::{check_sample_size, BlochState};
use crate::error::Result;
use crate::qsim::{binomial, DensityMatrix};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    fn index(self) -> usize {
        self as usize
    }

    /// Probability of the `+` eigenvalue (`|0⟩` for Z): `(1 + r_b)/2`.
    pub fn plus_probability(self, rho: &DensityMatrix) -> f64 {
        plus_from_bloch(rho.bloch_vector(), self)
    }
}

fn plus_from_bloch(r: [f64; 3], basis: Basis) -> f64 {
    ((1.0 + r[basis.index()]) / 2.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisCounts {
    pub plus: u64,
    pub minus: u64,
}

impl BasisCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomogramRecord {
    pub x: BasisCounts,
    pub y: BasisCounts,
    pub z: BasisCounts,
    pub sample_size: u64,
}

impl TomogramRecord {
    pub fn counts(&self, basis: Basis) -> BasisCounts {
        match basis {
            Basis::X => self.x,
            Basis::Y => self.y,
            Basis::Z => self.z,
        }
    }

    /// `+` frequency per basis in X, Y, Z order.
    pub fn frequencies(&self) -> [f64; 3] {
        Basis::ALL.map(|b| {
            let c = self.counts(b);
            if c.total() == 0 {
                0.5
            } else {
                c.plus as f64 / c.total() as f64
            }
        })
    }

    /// Builds a record from `+` probabilities with `shots` per basis,
    /// rounding counts to the nearest integer.
    pub fn from_probabilities(p_plus: [f64; 3], shots: u64) -> Self {
        let c = p_plus.map(|p| {
            let plus = (p.clamp(0.0, 1.0) * shots as f64).round() as u64;
            BasisCounts { plus, minus: shots - plus }
        });
        TomogramRecord { x: c[0], y: c[1], z: c[2], sample_size: 3 * shots }
    }
}

/// Shots per basis; a remainder of `sample_size mod 3` goes one shot each
/// to X, then Y.
pub fn basis_allocation(sample_size: u64) -> [u64; 3] {
    let (q, r) = (sample_size / 3, sample_size % 3);
    [q + u64::from(r > 0), q + u64::from(r > 1), q]
}

/// Prepares `state`, applies `noise` and measures each Pauli basis.
pub fn simulate_measurements(
    state: &BlochState,
    noise: &NoiseChannel,
    sample_size: u64,
    seed: u64,
) -> Result<TomogramRecord> {
    check_sample_size(sample_size)?;
    noise.validate()?;
    let mut rng = rng_from_seed(seed);
    let alloc = basis_allocation(sample_size);
    let mut counts = [BasisCounts::default(); 3];
    match noise {
        NoiseChannel::RandomUnitary { axis, angle_std } => {
            let dist = normal(*angle_std)?;
            let r = state.vector();
            for (b, (&shots, c)) in Basis::ALL.iter().zip(alloc.iter().zip(&mut counts)) {
                for _ in 0..shots {
                    let rr = rotate_bloch(r, *axis, dist.sample(&mut rng));
                    c.plus += u64::from(rng.random::<f64>() < plus_from_bloch(rr, *b));
                }
                c.minus = shots - c.plus;
            }
        }
        _ => {
            let rho = noise.apply_deterministic(&state.density())?;
            for (b, (&shots, c)) in Basis::ALL.iter().zip(alloc.iter().zip(&mut counts)) {
                c.plus = binomial(shots, b.plus_probability(&rho), &mut rng)?;
                c.minus = shots - c.plus;
            }
        }
    }
    Ok(TomogramRecord { x: counts[0], y: counts[1], z: counts[2], sample_size })
}
