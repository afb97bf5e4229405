//! Fit the quadratic comparability constants of the relative entropy on a
//! box of states, then validate them on fresh samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isotrack::state::{fit_entropy_constants, rel_entropy, StateBox};

fn main() {
    let bx = StateBox { tau_min: 0.2, tau_max: 5.0, v_max: 3.0 };
    let fit = fit_entropy_constants(&bx, 10_000, &mut ChaCha8Rng::seed_from_u64(1));
    println!("sampled ratio range [{:.4e}, {:.4e}]", fit.sampled_min, fit.sampled_max);
    println!("c* = {:.4e}, c** = {:.4e}, C = {:.4e}", fit.c_star, fit.c_star_star, fit.flux_c);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let violations = (0..100_000)
        .filter(|_| {
            let (a, b) = (bx.sample(&mut rng), bx.sample(&mut rng));
            let d2 = (a.tau - b.tau).powi(2) + (a.v - b.v).powi(2);
            let e = rel_entropy(a, b);
            e < fit.c_star * d2 || e > fit.c_star_star * d2
        })
        .count();
    println!("violations on 1e5 fresh pairs: {violations}");
}
