//! Computes the secrecy bound for the two bundled three-node networks.
//!
//! Both networks move one unit of flow from `S` to `D` past a wiretapper
//! who may read any single edge.  They differ only in where the feedback
//! edge lands: in the first it reaches `S` itself, so the sink can hand
//! the source a one-time pad and the bound is 1; in the second it reaches
//! the intermediate node, no pad can protect the first hop, and the bound
//! collapses to 0.
//!
//! ```bash
//! cargo run --example bound_basics
//! ```

use revcut::bound::best_bound;
use revcut::network::parse_network;
use revcut::seed::SeedStream;

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    std::fs::read_to_string(path).expect("bundled fixture")
}

fn main() {
    for name in ["backedge_useful.json", "backedge_useless.json"] {
        let (net, model) = parse_network(&fixture(name)).unwrap();
        let best = best_bound(&net, &model, 11, SeedStream::new(1), 20).unwrap();

        println!("{name}: secrecy bound {}", best.value);
        for (i, report) in best.reports.iter().enumerate() {
            let marker = if i == best.best_cut { "  <-- argmin" } else { "" };
            println!(
                "  cut {{{}}}: forward {:?}, backward {:?}, value {}{}",
                report.cut.v.join(", "),
                report.cut.forward,
                report.cut.backward,
                report.value,
                marker
            );
            for set in &report.sets {
                println!(
                    "    wiretap {:?}: rank {}, slack {}",
                    set.edges, set.rank, set.slack
                );
            }
        }
        println!();
    }
}
