//! Fixtures shared by the criterion benches.

use mnmdtw::synth::{generate_cohort, generate_squat, SquatParams};
use mnmdtw::{MultiSeries, PoseSequence};

/// Deterministic random-walk series of the given shape.
pub fn random_walk(len: usize, dims: usize, seed: u64) -> MultiSeries {
    // xorshift keeps the benches free of extra dependencies
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut values = vec![0.0; len * dims];
    for t in 1..len {
        for k in 0..dims {
            values[t * dims + k] = values[(t - 1) * dims + k] + next();
        }
    }
    MultiSeries::new(values, len, dims).expect("finite walk")
}

/// Gold clip, five controls and one wide-stance test clip.
pub fn squat_fixture() -> (PoseSequence, Vec<PoseSequence>, PoseSequence) {
    let gold = generate_squat(&SquatParams::correct()).expect("valid preset");
    let controls = generate_cohort(
        &SquatParams {
            seed: 100,
            ..SquatParams::correct()
        },
        5,
        1,
    )
    .expect("valid preset");
    let test = generate_squat(&SquatParams {
        seed: 999,
        ..SquatParams::mistake1()
    })
    .expect("valid preset");
    (gold, controls, test)
}
