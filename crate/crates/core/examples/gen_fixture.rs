//! Regenerates `fixtures/synthetic7.csv`: 700 s of 4 Hz samples over seven
//! 100 s segments (rest, city, highway, city, highway, city, rest).
//!
//! Each attribute mixes two latent factors: a stress level that is 1 in the
//! city segments and 0 elsewhere, and a 50 s wave that averages to zero over
//! every segment. The mixing angle differs per attribute so no two point the
//! same way in the first two principal components, yet every attribute rises
//! under stress. The marker spikes at each segment change.
//!
//! cargo run -p pcadca --example gen_fixture > crates/core/fixtures/synthetic7.csv

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SECONDS: usize = 700;
const SAMPLES_PER_SECOND: usize = 4;
const SEGMENT: usize = 100;
const CITY: [usize; 3] = [1, 3, 5];
const WAVE_PERIOD_S: f64 = 50.0;

// (name, base, scale, mixing angle in degrees, noise half-width)
const ATTRIBUTES: [(&str, f64, f64, f64, f64); 5] = [
    ("emg", 0.5, 8.0, 0.0, 0.8),
    ("gsr", 4.0, 6.0, 35.0, 1.2),
    ("hr", 70.0, 30.0, -35.0, 9.0),
    ("ecg", -1.0, 4.0, 65.0, 1.6),
    ("resp", 30.0, 20.0, -65.0, 8.0),
];

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d0ca);
    print!("time");
    for (name, ..) in ATTRIBUTES {
        print!(",{name}");
    }
    println!(",marker");

    for s in 0..SECONDS {
        let stress = if CITY.contains(&(s / SEGMENT)) { 1.0 } else { 0.0 };
        let boundary = s > 0 && s % SEGMENT == 0;
        for j in 0..SAMPLES_PER_SECOND {
            let ms = s * 1000 + j * (1000 / SAMPLES_PER_SECOND);
            let wave = (2.0 * PI * ms as f64 / 1000.0 / WAVE_PERIOD_S).sin();
            print!("{ms}");
            for (_, base, scale, angle, noise) in ATTRIBUTES {
                let a = angle.to_radians();
                let v = base
                    + scale * (a.cos() * stress + a.sin() * wave)
                    + rng.gen_range(-noise..=noise);
                print!(",{v:.4}");
            }
            let marker = if boundary { 5.0 } else { 0.0 } + rng.gen_range(0.0..0.1);
            println!(",{marker:.4}");
        }
    }
}
