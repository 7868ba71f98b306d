//! Seed derivation for nested deterministic RNG streams.

/// Derives an independent seed from a base seed and a salt (splitmix64 mix).
///
/// Every randomized stage seeds its own generator through this, so a run is
/// reproducible from one top-level seed and no stage perturbs another's
/// stream.
pub(crate) fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(salt.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
