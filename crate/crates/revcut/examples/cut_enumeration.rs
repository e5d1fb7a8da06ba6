//! Walks every cut of a network and prints its crossing edges and the
//! backward-to-forward connectivity matrix.
//!
//! A cut is a set of nodes `V` containing the source but not the sink.
//! Edges leaving `V` are forward, edges entering it are backward, and
//! entry `(i, j)` of the connectivity matrix is 1 exactly when a directed
//! path inside `V` links the head of backward edge `j` to the tail of
//! forward edge `i` — the route a sink-generated key would take to reach
//! a forward transmission.

use revcut::network::parse_network;

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    std::fs::read_to_string(path).expect("bundled fixture")
}

fn main() {
    let (net, _) = parse_network(&fixture("relay_feedback.json")).unwrap();

    println!(
        "network: {} nodes, {} edges, source {}, sink {}",
        net.nodes().len(),
        net.edges().len(),
        net.node_id(net.source()),
        net.node_id(net.sink())
    );
    println!();

    for cut in net.enumerate_cuts(20).unwrap() {
        let members: Vec<&str> = cut.members().iter().map(|&n| net.node_id(n)).collect();
        let forward: Vec<&str> = cut.forward().iter().map(|&e| net.edge_id(e)).collect();
        let backward: Vec<&str> = cut.backward().iter().map(|&e| net.edge_id(e)).collect();
        println!("cut V = {{{}}}", members.join(", "));
        println!("  forward  (x={}): {:?}", cut.x(), forward);
        println!("  backward (y={}): {:?}", cut.y(), backward);

        let c = cut.connectivity();
        if c.cols() == 0 {
            println!("  connectivity: none (no backward edges)");
        } else {
            for i in 0..c.rows() {
                let row: Vec<u8> = (0..c.cols()).map(|j| u8::from(c.bit(i, j))).collect();
                println!("  connectivity[{}] = {:?}  ({})", i, row, forward[i]);
            }
        }
        println!();
    }
}
