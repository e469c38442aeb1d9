//! Fixed benchmark instances so every run measures the same terrains.

use terrain_guard::{generate, Profile, Rational, Terrain};

/// Generator seed shared by all benchmark instances.
pub const SEED: u64 = 0xbe7c;

pub fn instance(n: usize, profile: Profile) -> Terrain<Rational> {
    generate(n, SEED, profile, 1000).expect("n >= 2 and a valid amplitude")
}

/// A fixed altitude above the terrain, where several guards are still needed.
pub fn working_height(t: &Terrain<Rational>) -> Rational {
    t.y_max() + Rational::from_integer(50.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        assert_eq!(instance(100, Profile::Peaks), instance(100, Profile::Peaks));
        assert!(working_height(&instance(10, Profile::Random)) > *instance(10, Profile::Random).y_max());
    }
}
