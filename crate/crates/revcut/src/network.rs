//! Network ingestion, cut enumeration, and the upper-bounding transform.
//!
//! Networks are directed multigraphs with unit-capacity edges, one source,
//! one sink, and a wiretap model describing which edge sets an adversary may
//! read.  A *cut* is a node set `V` containing the source but not the sink;
//! its forward edges leave `V`, its backward edges enter `V`.  The key
//! derived object is the backward-to-forward connectivity pattern: entry
//! `(i, j)` is 1 when a directed path inside `V` (zero length allowed) leads
//! from the head of backward edge `j` to the tail of forward edge `i` - i.e.
//! when a key injected on backward edge `j` can reach forward edge `i`
//! without leaving `V`.
//!
//! Unbounded-capacity edges only arise in generated upper-bounding networks;
//! they are treated as perfectly secure and can never be wiretapped.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::rankmax::PatternMatrix;
use crate::{Error, Result};

/// Default ceiling on node count for cut enumeration (2^(n-2) cuts).
pub const DEFAULT_NODE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub can_generate_randomness: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capacity {
    Unit,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity,
}

/// Which edge sets the adversary may read: every set of at most `z` edges,
/// or an explicit list of sets (stored as edge indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WiretapModel {
    Uniform { z: usize },
    Explicit { sets: Vec<Vec<usize>> },
}

/// A directed multigraph with designated source and sink.  Parallel edges
/// and cycles are permitted; node and edge order is declaration order and
/// is preserved through every derived object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    source: usize,
    sink: usize,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: String,
    tail: String,
    head: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    capacity: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    unbounded: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawWiretap {
    Uniform { z: usize },
    Explicit { sets: Vec<Vec<String>> },
}

#[derive(Serialize, Deserialize)]
struct RawNetworkDoc {
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
    source: String,
    sink: String,
    wiretap: RawWiretap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    randomness: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derived: Option<Value>,
}

/// Parses and validates a network document.
///
/// Schema: `nodes` (ids), `edges` (`{id, tail, head}`, capacity defaults to
/// one unit; `"unbounded": true` is only expected in generated dumps),
/// `source`, `sink`, `wiretap` (`{"z": n}` or `{"sets": [[edge-id, ...],
/// ...]}`), and optional `randomness` (ids of nodes that may generate local
/// randomness; absent means all of them may).  A `derived` block, if
/// present, is ignored on input.
pub fn parse_network(text: &str) -> Result<(Network, WiretapModel)> {
    let raw: RawNetworkDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut node_index = HashMap::new();
    for (i, id) in raw.nodes.iter().enumerate() {
        if node_index.insert(id.clone(), i).is_some() {
            return Err(Error::Validation(format!("duplicate node id {id:?}")));
        }
    }
    let lookup_node = |id: &str| {
        node_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Validation(format!("unknown node id {id:?}")))
    };
    let source = lookup_node(&raw.source)?;
    let sink = lookup_node(&raw.sink)?;
    if source == sink {
        return Err(Error::Validation("source and sink must differ".into()));
    }

    let randomness: Vec<bool> = match &raw.randomness {
        None => vec![true; raw.nodes.len()],
        Some(list) => {
            let mut flags = vec![false; raw.nodes.len()];
            for id in list {
                flags[lookup_node(id)?] = true;
            }
            flags
        }
    };
    let nodes = raw
        .nodes
        .iter()
        .zip(randomness)
        .map(|(id, can_generate_randomness)| Node {
            id: id.clone(),
            can_generate_randomness,
        })
        .collect();

    let mut edge_index = HashMap::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, e) in raw.edges.iter().enumerate() {
        if edge_index.insert(e.id.clone(), i).is_some() {
            return Err(Error::Validation(format!("duplicate edge id {:?}", e.id)));
        }
        let capacity = if e.unbounded {
            if e.capacity.is_some() {
                return Err(Error::Validation(format!(
                    "edge {:?} declares both a capacity and unbounded",
                    e.id
                )));
            }
            Capacity::Unbounded
        } else {
            match e.capacity {
                None | Some(1) => Capacity::Unit,
                Some(c) => {
                    return Err(Error::Validation(format!(
                        "edge {:?} has capacity {c}; only unit capacity is supported \
                         (model larger capacities as parallel edges)",
                        e.id
                    )))
                }
            }
        };
        edges.push(Edge {
            id: e.id.clone(),
            tail: lookup_node(&e.tail)?,
            head: lookup_node(&e.head)?,
            capacity,
        });
    }

    let model = match &raw.wiretap {
        RawWiretap::Uniform { z } => WiretapModel::Uniform { z: *z },
        RawWiretap::Explicit { sets } => {
            let mut resolved = Vec::with_capacity(sets.len());
            for set in sets {
                let mut rows = Vec::with_capacity(set.len());
                for id in set {
                    let idx = *edge_index
                        .get(id)
                        .ok_or_else(|| Error::Validation(format!("unknown edge id {id:?} in wiretap set")))?;
                    if edges[idx].capacity == Capacity::Unbounded {
                        return Err(Error::Validation(format!(
                            "edge {id:?} is unbounded and cannot appear in a wiretap set"
                        )));
                    }
                    rows.push(idx);
                }
                rows.sort_unstable();
                rows.dedup();
                resolved.push(rows);
            }
            WiretapModel::Explicit { sets: resolved }
        }
    };

    Ok((
        Network {
            nodes,
            edges,
            source,
            sink,
        },
        model,
    ))
}

impl Network {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.nodes[i].id
    }

    pub fn edge_id(&self, i: usize) -> &str {
        &self.edges[i].id
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// All cuts `(V, complement)` with the source in `V` and the sink
    /// outside, ordered by ascending membership bitmask (bit i = node i).
    pub fn enumerate_cuts(&self, node_cap: usize) -> Result<Vec<Cut>> {
        let n = self.nodes.len();
        if n > node_cap {
            return Err(Error::TooManyNodes {
                nodes: n,
                cap: node_cap,
            });
        }
        let free: Vec<usize> = (0..n).filter(|&i| i != self.source && i != self.sink).collect();
        let mut cuts = Vec::with_capacity(1 << free.len());
        for free_mask in 0u64..(1 << free.len()) {
            let mut mask: u128 = 1u128 << self.source;
            for (bit, &node) in free.iter().enumerate() {
                if free_mask & (1 << bit) != 0 {
                    mask |= 1u128 << node;
                }
            }
            cuts.push(self.cut_from_mask(mask)?);
        }
        Ok(cuts)
    }

    /// Cut for an explicit node set given by ids.
    pub fn cut_from_members(&self, member_ids: &[String]) -> Result<Cut> {
        let mut mask: u128 = 0;
        for id in member_ids {
            let idx = self
                .node_index(id)
                .ok_or_else(|| Error::Validation(format!("unknown node id {id:?} in cut")))?;
            mask |= 1u128 << idx;
        }
        self.cut_from_mask(mask)
    }

    /// Cut for a node-membership bitmask (bit i = node i in `V`).
    pub fn cut_from_mask(&self, mask: u128) -> Result<Cut> {
        if mask & (1u128 << self.source) == 0 {
            return Err(Error::Validation("cut must contain the source".into()));
        }
        if mask & (1u128 << self.sink) != 0 {
            return Err(Error::Validation("cut must not contain the sink".into()));
        }
        let in_v = |node: usize| mask & (1u128 << node) != 0;
        let members: Vec<usize> = (0..self.nodes.len()).filter(|&i| in_v(i)).collect();
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            match (in_v(e.tail), in_v(e.head)) {
                (true, false) => forward.push(i),
                (false, true) => backward.push(i),
                _ => {}
            }
        }
        let connectivity = self.connectivity_matrix(mask, &forward, &backward);
        Ok(Cut {
            bitmask: mask,
            members,
            forward,
            backward,
            connectivity,
        })
    }

    /// Backward-to-forward connectivity: entry `(i, j)` is 1 iff a directed
    /// path from `head(backward[j])` to `tail(forward[i])` exists using only
    /// nodes of `V` (zero-length paths count, so a shared node is enough).
    pub fn connectivity_matrix(
        &self,
        mask: u128,
        forward: &[usize],
        backward: &[usize],
    ) -> PatternMatrix {
        let in_v = |node: usize| mask & (1u128 << node) != 0;
        // adjacency restricted to V-internal edges
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &self.edges {
            if in_v(e.tail) && in_v(e.head) {
                adj.entry(e.tail).or_default().push(e.head);
            }
        }
        let mut pattern = PatternMatrix::new(forward.len(), backward.len());
        pattern.set_row_labels(forward.iter().map(|&i| self.edges[i].id.clone()).collect());
        for (j, &b) in backward.iter().enumerate() {
            let start = self.edges[b].head;
            debug_assert!(in_v(start), "backward edge head must lie in V");
            let mut reached = HashSet::from([start]);
            let mut frontier = vec![start];
            while let Some(u) = frontier.pop() {
                for &v in adj.get(&u).into_iter().flatten() {
                    if reached.insert(v) {
                        frontier.push(v);
                    }
                }
            }
            for (i, &f) in forward.iter().enumerate() {
                if reached.contains(&self.edges[f].tail) {
                    pattern.set_bit(i, j, true);
                }
            }
        }
        pattern
    }

    fn fresh_node_id(&self, base: &str, used: &HashSet<String>) -> String {
        let mut id = format!("{base}'");
        while used.contains(&id) {
            id.push('\'');
        }
        id
    }

    /// Serializes the network (with its wiretap model) back to the document
    /// schema, optionally attaching a `derived` block.
    pub fn to_document(&self, model: &WiretapModel, derived: Option<Value>) -> Value {
        let randomness = if self.nodes.iter().all(|n| n.can_generate_randomness) {
            None
        } else {
            Some(
                self.nodes
                    .iter()
                    .filter(|n| n.can_generate_randomness)
                    .map(|n| n.id.clone())
                    .collect(),
            )
        };
        let doc = RawNetworkDoc {
            nodes: self.nodes.iter().map(|n| n.id.clone()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    tail: self.nodes[e.tail].id.clone(),
                    head: self.nodes[e.head].id.clone(),
                    capacity: None,
                    unbounded: e.capacity == Capacity::Unbounded,
                })
                .collect(),
            source: self.nodes[self.source].id.clone(),
            sink: self.nodes[self.sink].id.clone(),
            wiretap: match model {
                WiretapModel::Uniform { z } => RawWiretap::Uniform { z: *z },
                WiretapModel::Explicit { sets } => RawWiretap::Explicit {
                    sets: sets
                        .iter()
                        .map(|s| s.iter().map(|&i| self.edges[i].id.clone()).collect())
                        .collect(),
                },
            },
            randomness,
            derived,
        };
        serde_json::to_value(doc).expect("network document serialization cannot fail")
    }
}

/// A cut: the node set `V`, the edges crossing it in each direction (in
/// declaration order), and the backward-to-forward connectivity pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    bitmask: u128,
    members: Vec<usize>,
    forward: Vec<usize>,
    backward: Vec<usize>,
    connectivity: PatternMatrix,
}

impl Cut {
    pub fn bitmask(&self) -> u128 {
        self.bitmask
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn backward(&self) -> &[usize] {
        &self.backward
    }

    pub fn x(&self) -> usize {
        self.forward.len()
    }

    pub fn y(&self) -> usize {
        self.backward.len()
    }

    pub fn connectivity(&self) -> &PatternMatrix {
        &self.connectivity
    }

    /// Edge index for a row of the stacked cut matrix (forward rows first,
    /// then backward rows).
    pub fn row_edge(&self, row: usize) -> usize {
        if row < self.forward.len() {
            self.forward[row]
        } else {
            self.backward[row - self.forward.len()]
        }
    }

    /// Row of the stacked cut matrix carrying this edge, if it crosses.
    pub fn edge_row(&self, edge: usize) -> Option<usize> {
        if let Some(i) = self.forward.iter().position(|&e| e == edge) {
            return Some(i);
        }
        self.backward
            .iter()
            .position(|&e| e == edge)
            .map(|j| self.forward.len() + j)
    }

    /// Human/JSON-facing view with ids instead of indices.
    pub fn summary(&self, net: &Network) -> CutSummary {
        CutSummary {
            v: self.members.iter().map(|&i| net.node_id(i).to_string()).collect(),
            bitmask: self.bitmask.to_string(),
            forward: self.forward.iter().map(|&i| net.edge_id(i).to_string()).collect(),
            backward: self.backward.iter().map(|&i| net.edge_id(i).to_string()).collect(),
            connectivity: (0..self.connectivity.rows())
                .map(|r| {
                    (0..self.connectivity.cols())
                        .map(|c| self.connectivity.bit(r, c) as u8)
                        .collect()
                })
                .collect(),
        }
    }
}

/// Serializable cut description used inside reports and dumps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSummary {
    pub v: Vec<String>,
    pub bitmask: String,
    pub forward: Vec<String>,
    pub backward: Vec<String>,
    pub connectivity: Vec<Vec<u8>>,
}

/// One adversary choice, restricted to a cut: `rows` are positions in the
/// cut's forward-then-backward row order, `edges` the corresponding edge
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiretapSet {
    pub rows: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Projects the wiretap model onto one cut.
///
/// Uniform strength `z` yields every nonempty subset of the cut's
/// unit-capacity crossing edges with at most `z` members (sizes ascending,
/// lexicographic within a size).  Explicit sets are intersected with the
/// cut's crossing edges; empty intersections are dropped and duplicates
/// keep their first occurrence.  Unbounded edges never participate.
pub fn restrict_wiretap_sets(
    model: &WiretapModel,
    net: &Network,
    cut: &Cut,
) -> Vec<WiretapSet> {
    let unit_rows: Vec<usize> = (0..cut.x() + cut.y())
        .filter(|&r| net.edges()[cut.row_edge(r)].capacity == Capacity::Unit)
        .collect();
    let mut out: Vec<WiretapSet> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    match model {
        WiretapModel::Uniform { z } => {
            for size in 1..=(*z).min(unit_rows.len()) {
                for rows in unit_rows.iter().copied().combinations(size) {
                    let edges = rows.iter().map(|&r| cut.row_edge(r)).collect();
                    out.push(WiretapSet { rows, edges });
                }
            }
        }
        WiretapModel::Explicit { sets } => {
            for set in sets {
                let mut rows: Vec<usize> = set
                    .iter()
                    .filter_map(|&e| cut.edge_row(e))
                    .filter(|r| unit_rows.contains(r))
                    .collect();
                rows.sort_unstable();
                rows.dedup();
                if rows.is_empty() || !seen.insert(rows.clone()) {
                    continue;
                }
                let edges = rows.iter().map(|&r| cut.row_edge(r)).collect();
                out.push(WiretapSet { rows, edges });
            }
        }
    }
    out
}

/// Builds the single-cut upper-bounding network for `(net, cut)`.
///
/// Every node beyond the cut collapses into the sink.  Each distinct
/// forward-edge tail becomes a relay node fed by an unbounded, unwiretappable
/// edge from the source; each backward edge keeps its head node, which gets
/// an unbounded edge to exactly the relays its keys could reach in the
/// original network (one per 1 in the connectivity pattern).  Cut edges keep
/// their ids and unit capacities; only the source and sink may generate
/// randomness.  The wiretap model is restricted to the surviving cut edges.
pub fn build_upper_bounding_network(
    net: &Network,
    model: &WiretapModel,
    cut: &Cut,
) -> (Network, WiretapModel) {
    let source_id = net.node_id(net.source()).to_string();
    let sink_id = net.node_id(net.sink()).to_string();

    let mut used: HashSet<String> = [source_id.clone(), sink_id.clone()].into();
    let mut node_ids: Vec<String> = vec![source_id.clone()];
    let mut randomness = vec![true];

    // backward heads keep their identity (the source may be one of them)
    let mut head_node: Vec<usize> = Vec::new(); // per backward edge: node index in the new graph
    for &b in cut.backward() {
        let head = net.edges()[b].head;
        let id = if head == net.source() {
            source_id.clone()
        } else {
            net.node_id(head).to_string()
        };
        let idx = match node_ids.iter().position(|n| *n == id) {
            Some(i) => i,
            None => {
                used.insert(id.clone());
                node_ids.push(id);
                randomness.push(false);
                node_ids.len() - 1
            }
        };
        head_node.push(idx);
    }

    // one relay per distinct forward tail, in first-appearance order
    let mut relay_of_tail: HashMap<usize, usize> = HashMap::new();
    let mut relay_node: Vec<usize> = Vec::new(); // per forward edge
    for &f in cut.forward() {
        let tail = net.edges()[f].tail;
        let idx = *relay_of_tail.entry(tail).or_insert_with(|| {
            let id = net.fresh_node_id(net.node_id(tail), &used);
            used.insert(id.clone());
            node_ids.push(id);
            randomness.push(false);
            node_ids.len() - 1
        });
        relay_node.push(idx);
    }

    let sink_idx = node_ids.len();
    node_ids.push(sink_id);
    randomness.push(true);

    let mut edges = Vec::new();
    for (i, &f) in cut.forward().iter().enumerate() {
        edges.push(Edge {
            id: net.edge_id(f).to_string(),
            tail: relay_node[i],
            head: sink_idx,
            capacity: Capacity::Unit,
        });
    }
    for (j, &b) in cut.backward().iter().enumerate() {
        edges.push(Edge {
            id: net.edge_id(b).to_string(),
            tail: sink_idx,
            head: head_node[j],
            capacity: Capacity::Unit,
        });
    }
    let mut next_u = 0usize;
    let mut unbounded_edge = |tail: usize, head: usize, edges: &mut Vec<Edge>| {
        edges.push(Edge {
            id: format!("u{next_u}"),
            tail,
            head,
            capacity: Capacity::Unbounded,
        });
        next_u += 1;
    };
    // source feeds every relay
    let mut fed: HashSet<usize> = HashSet::new();
    for &relay in &relay_node {
        if fed.insert(relay) {
            unbounded_edge(0, relay, &mut edges);
        }
    }
    // key fan-out along the connectivity pattern
    let mut linked: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..cut.y() {
        for i in 0..cut.x() {
            if cut.connectivity().bit(i, j) && linked.insert((head_node[j], relay_node[i])) {
                unbounded_edge(head_node[j], relay_node[i], &mut edges);
            }
        }
    }

    let gbar = Network {
        nodes: node_ids
            .into_iter()
            .zip(randomness)
            .map(|(id, can_generate_randomness)| Node {
                id,
                can_generate_randomness,
            })
            .collect(),
        edges,
        source: 0,
        sink: sink_idx,
    };

    let gbar_model = match model {
        WiretapModel::Uniform { z } => WiretapModel::Uniform { z: *z },
        WiretapModel::Explicit { .. } => {
            let sets = restrict_wiretap_sets(model, net, cut)
                .into_iter()
                .map(|ws| {
                    ws.edges
                        .iter()
                        .map(|&e| gbar.edge_index(net.edge_id(e)).expect("cut edge ids survive"))
                        .collect()
                })
                .collect();
            WiretapModel::Explicit { sets }
        }
    };
    (gbar, gbar_model)
}

/// The canonical cut of an upper-bounding network: every node except the
/// sink.  Crossing edges and connectivity reproduce the originating cut.
pub fn canonical_cut(gbar: &Network) -> Result<Cut> {
    let mut mask: u128 = 0;
    for i in 0..gbar.nodes().len() {
        if i != gbar.sink() {
            mask |= 1u128 << i;
        }
    }
    gbar.cut_from_mask(mask)
}
