//! Prints probe values for one (alpha, lambda) pair across grid sizes.
//!
//! `cargo run --release --example table_probe -- 0.5 -3 256 512 1024`

use std::time::Instant;

use fracsl::{solve, ProblemSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let lambda: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(-3.0);
    let sizes: Vec<usize> = args.iter().skip(2).filter_map(|s| s.parse().ok()).collect();
    let sizes = if sizes.is_empty() { vec![256, 512, 1024] } else { sizes };
    let spec = ProblemSpec::oscillator(alpha, lambda).expect("valid parameters");
    for n in sizes {
        let start = Instant::now();
        let sol = solve(&spec, n).expect("solve");
        println!(
            "n={n:5}  f(1/4)={:.8}  f(1/2)={:.8}  f(3/4)={:.8}  [{:.2?}]",
            sol.at(n / 4),
            sol.at(n / 2),
            sol.at(3 * n / 4),
            start.elapsed()
        );
    }
}
