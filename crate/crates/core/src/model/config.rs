use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest bath for which a configuration index fits in a `u64`.
pub const MAX_ENUMERABLE_MODES: usize = 63;

/// One Ising assignment `s ∈ {-1, +1}^N` of the bath `σ_z` eigenvalues.
///
/// Bit `k` of the index is 1 exactly when `s_k = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BathConfiguration {
    index: u64,
    spins: Vec<i8>,
}

impl BathConfiguration {
    pub fn from_index(index: u64, modes: usize) -> Self {
        assert!(modes <= MAX_ENUMERABLE_MODES, "too many modes to index");
        assert!(index >> modes == 0, "index out of range");
        let spins = (0..modes)
            .map(|k| if (index >> k) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { index, spins }
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        if spins.len() > MAX_ENUMERABLE_MODES {
            return Err(Error::invalid("spins", "too many modes to index"));
        }
        let mut index = 0u64;
        for (k, &s) in spins.iter().enumerate() {
            match s {
                1 => index |= 1 << k,
                -1 => {}
                other => {
                    return Err(Error::invalid(
                        format!("spins[{k}]"),
                        format!("must be +1 or -1, got {other}"),
                    ))
                }
            }
        }
        Ok(Self {
            index,
            spins: spins.to_vec(),
        })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Global spin flip `s -> -s`.
    pub fn flipped(&self) -> Self {
        let mask = (1u64 << self.len()) - 1;
        Self::from_index(!self.index & mask, self.len())
    }

    /// All `2^N` configurations in index order.
    pub fn enumerate(modes: usize) -> impl Iterator<Item = BathConfiguration> {
        assert!(modes <= MAX_ENUMERABLE_MODES, "too many modes to enumerate");
        (0..1u64 << modes).map(move |i| Self::from_index(i, modes))
    }
}

/// `γ = sqrt(Δ² + Ω²)`.
pub fn gamma_of<T: Real>(delta: T, omega: T) -> T {
    delta.hypot(omega)
}
