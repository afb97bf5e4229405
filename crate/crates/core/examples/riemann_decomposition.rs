//! Solve a Riemann problem and print its waves, speeds and the fan partition.
//!
//! cargo run --example riemann_decomposition -- 1.0 0.3 0.5 -0.2

use isotrack::riemann::{fan_partition, rh_speed, solve_intermediate, Family};
use isotrack::State;

fn main() -> isotrack::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let [tl, vl, tr, vr] = match args.as_slice() {
        [a, b, c, d] => [*a, *b, *c, *d],
        _ => [1.0, 0.3, 0.5, -0.2],
    };
    let ul = State::new(tl, vl)?.to_log()?;
    let ur = State::new(tr, vr)?.to_log()?;
    let d = solve_intermediate(ul, ur)?;
    let um = d.middle();
    println!("left   (tau, v) = ({tl}, {vl})   w = {:.6}", ul.w);
    println!("middle (tau, v) = ({:.6}, {:.6})   w = {:.6}", um.tau(), um.v, um.w);
    println!("right  (tau, v) = ({tr}, {vr})   w = {:.6}", ur.w);
    for (family, sigma, a, b) in [(Family::One, d.sigma1, ul, um), (Family::Two, d.sigma2, um, ur)] {
        let i = family.index();
        if sigma > 0.0 {
            println!("{i}-shock, sigma = {sigma:.6}, speed {:.6}", rh_speed(family, a, b));
        } else if sigma < 0.0 {
            let pieces = fan_partition(family, sigma, a, 0.05)?;
            let (first, last) = (pieces[0].speed, pieces[pieces.len() - 1].speed);
            println!(
                "{i}-rarefaction, sigma = {sigma:.6}, {} pieces with speeds {first:.4} .. {last:.4}",
                pieces.len()
            );
        } else {
            println!("no {i}-wave");
        }
    }
    println!("D(ul, ur) = {:.6}", d.total_strength());
    Ok(())
}
