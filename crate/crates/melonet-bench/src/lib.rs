//! Seeded synthetic scores for benchmarks and load tests. The generator
//! walks a diatonic scale so the resulting networks have the reuse and
//! locality of real melodies rather than uniform-random structure.

use melonet_core::{Duration, MelodyEvent, Pitch, PitchClass};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Major-scale semitone offsets within one octave.
const SCALE: [i32; 7] = [0, 2, 4, 5, 7, 9, 11];

/// Scale degrees span octaves 2 through 5.
const DEGREES: i32 = 4 * 7;

const DURATIONS: [(u32, u32); 7] = [
    (1, 8),
    (1, 8),
    (1, 8),
    (1, 4),
    (1, 4),
    (1, 2),
    (1, 16),
];

/// A length-event melody from a seeded random walk: steps of up to a
/// third, a rest roughly every twelfth event. Deterministic per seed.
pub fn synthetic_melody(length: usize, seed: u64) -> Vec<MelodyEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree: i32 = DEGREES / 2;
    let mut events = Vec::with_capacity(length);
    for position in 0..length {
        let (num, den) = DURATIONS[rng.random_range(0..DURATIONS.len())];
        let duration = Duration::new(num, den).expect("table holds valid durations");
        if rng.random_range(0..12u32) == 0 {
            events.push(MelodyEvent::rest(duration, position));
            continue;
        }
        degree = (degree + rng.random_range(-2..=2)).clamp(0, DEGREES - 1);
        let semitones = SCALE[(degree % 7) as usize] + 12 * (degree / 7);
        let class = PitchClass::from_index((semitones % 12) as u8).expect("in range");
        let octave = 2 + (semitones / 12) as u8;
        let pitch = Pitch::new(class, octave).expect("walk stays under octave 9");
        events.push(MelodyEvent::note(pitch, duration, position));
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use melonet_core::build_network;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(synthetic_melody(500, 9), synthetic_melody(500, 9));
        assert_ne!(synthetic_melody(500, 9), synthetic_melody(500, 10));
    }

    #[test]
    fn generates_buildable_melodies() {
        let events = synthetic_melody(2_000, 1);
        assert_eq!(events.len(), 2_000);
        let net = build_network(&events, "synthetic").unwrap();
        assert!(net.node_count() > 20, "walk visits many labels");
        assert_eq!(net.total_weight() as usize, events.len() - 1);
    }
}
