//! Monte Carlo check of the construction's failure envelope.
//!
//! Each draw of the random message block `G` can fail to blind some
//! wiretap set or fail to be decodable; the union bound puts the chance
//! of any failure at `|𝒜| · k_f · (x+y) / q`.  This sweep samples raw
//! (un-retried) draws at growing field sizes on a network that actually
//! needs a source key, so the frequency is visibly nonzero and shrinks
//! like 1/q.

use revcut::bound::cut_bound;
use revcut::code::empirical_failure_rate;
use revcut::network::{parse_network, restrict_wiretap_sets};
use revcut::seed::SeedStream;

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    std::fs::read_to_string(path).expect("bundled fixture")
}

fn main() {
    let (net, model) = parse_network(&fixture("relay_feedback.json")).unwrap();
    let cut = net.cut_from_members(&["S".to_string()]).unwrap();
    let sets = restrict_wiretap_sets(&model, &net, &cut);
    let trials = 20_000;

    println!("{} wiretap sets, {} trials per field", sets.len(), trials);
    println!("{:>6} {:>12} {:>12} {:>10}", "q", "failure freq", "envelope", "freq * q");
    for (i, q) in [11u64, 101, 1009].into_iter().enumerate() {
        let report = cut_bound(&net, &cut, &sets, q, SeedStream::new(1).child(i as u64)).unwrap();
        let stats = empirical_failure_rate(&report, trials, SeedStream::new(77)).unwrap();
        println!(
            "{:>6} {:>12.5} {:>12.5} {:>10.3}",
            q,
            stats.frequency,
            stats.bound.as_f64(),
            stats.frequency * q as f64
        );
    }
    println!("\nfreq * q is roughly constant: the failure rate decays like 1/q");
}
