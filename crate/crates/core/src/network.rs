//! Skyway network: rooftop nodes with recharging pads joined by line-of-sight
//! segments.
//!
//! A [`SkywayNetwork`] is always connected and uses dense node ids
//! `0..node_count`. Raw inputs (edge lists with arbitrary ids, possibly
//! disconnected) go through [`SkywayNetwork::from_raw`], which keeps the
//! largest connected component and remaps ids in ascending raw-id order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index within a [`SkywayNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Number of recharging pads on the rooftop, at least one.
    pub pad_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    /// Segment length in meters.
    pub distance: f64,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid network: {0}")]
    Validation(String),
    #[error("node {0} is not part of the network")]
    UnknownNode(NodeId),
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: NodeId, to: NodeId },
}

/// Relative slack used when comparing accumulated path lengths.
const DIST_EPS: f64 = 1e-9;

fn dist_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= DIST_EPS * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRepr", into = "NetworkRepr")]
pub struct SkywayNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

/// Serialized form shared with scenario files: `nodes[{id,pads}]`,
/// `edges[[u,v,dist]]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkRepr {
    pub nodes: Vec<NodeRepr>,
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NodeRepr {
    pub id: usize,
    pub pads: u32,
}

impl TryFrom<NetworkRepr> for SkywayNetwork {
    type Error = NetworkError;

    fn try_from(repr: NetworkRepr) -> Result<Self, Self::Error> {
        let mut pads = vec![None; repr.nodes.len()];
        for n in &repr.nodes {
            let slot = pads.get_mut(n.id).ok_or_else(|| {
                NetworkError::Validation(format!(
                    "node id {} outside dense range 0..{}",
                    n.id,
                    repr.nodes.len()
                ))
            })?;
            if slot.replace(n.pads).is_some() {
                return Err(NetworkError::Validation(format!("duplicate node id {}", n.id)));
            }
        }
        // every slot is filled: ids are unique and all below len
        let pads = pads.into_iter().map(|p| p.unwrap_or(0)).collect();
        SkywayNetwork::new(pads, repr.edges)
    }
}

impl From<SkywayNetwork> for NetworkRepr {
    fn from(net: SkywayNetwork) -> Self {
        NetworkRepr {
            nodes: net
                .nodes
                .iter()
                .map(|n| NodeRepr { id: n.id.0, pads: n.pad_count })
                .collect(),
            edges: net.edges.iter().map(|e| (e.a.0, e.b.0, e.distance)).collect(),
        }
    }
}

/// Parsed but unvalidated edge-list or pads file content, keyed by raw ids.
#[derive(Debug, Clone, Default)]
pub struct RawGraph {
    pub edges: Vec<(u64, u64, f64)>,
    pub pads: BTreeMap<u64, u32>,
}

impl SkywayNetwork {
    /// Builds a network from dense pad counts and edges. The result must
    /// already be connected; use [`SkywayNetwork::from_raw`] for raw data.
    pub fn new(pads: Vec<u32>, edges: Vec<(usize, usize, f64)>) -> Result<Self, NetworkError> {
        let n = pads.len();
        if n == 0 {
            return Err(NetworkError::Validation("network has no nodes".into()));
        }
        let mut nodes = Vec::with_capacity(n);
        for (i, &p) in pads.iter().enumerate() {
            if p < 1 {
                return Err(NetworkError::Validation(format!(
                    "node {i} has pad_count {p}, expected at least 1"
                )));
            }
            nodes.push(Node { id: NodeId(i), pad_count: p });
        }

        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, d) in edges {
            if u >= n || v >= n {
                return Err(NetworkError::Validation(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(NetworkError::Validation(format!("self-loop on node {u}")));
            }
            if !(d.is_finite() && d > 0.0) {
                return Err(NetworkError::Validation(format!(
                    "edge ({u}, {v}) has non-positive distance {d}"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(NetworkError::Validation(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push((NodeId(v), d));
            adjacency[v].push((NodeId(u), d));
            out.push(Edge { a: NodeId(u), b: NodeId(v), distance: d });
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(id, _)| id);
        }

        let net = SkywayNetwork { nodes, edges: out, adjacency };
        let reach = net.component_of(NodeId(0));
        if reach.len() != n {
            return Err(NetworkError::Validation(format!(
                "network is disconnected: {} of {n} nodes reachable from node 0",
                reach.len()
            )));
        }
        Ok(net)
    }

    /// Validates raw ids, keeps the largest connected component (ties go to
    /// the component holding the smallest raw id) and remaps it densely.
    ///
    /// Nodes listed in `pads` but absent from every edge are isolated
    /// components of size one.
    pub fn from_raw(raw: &RawGraph) -> Result<Self, NetworkError> {
        let mut ids: BTreeSet<u64> = raw.pads.keys().copied().collect();
        for &(u, v, d) in &raw.edges {
            if u == v {
                return Err(NetworkError::Validation(format!("self-loop on node {u}")));
            }
            if !(d.is_finite() && d > 0.0) {
                return Err(NetworkError::Validation(format!(
                    "edge ({u}, {v}) has non-positive distance {d}"
                )));
            }
            ids.insert(u);
            ids.insert(v);
        }
        for (&id, &p) in &raw.pads {
            if p < 1 {
                return Err(NetworkError::Validation(format!(
                    "node {id} has pad_count {p}, expected at least 1"
                )));
            }
        }
        if ids.is_empty() {
            return Err(NetworkError::Validation("network has no nodes".into()));
        }
        let ids: Vec<u64> = ids.into_iter().collect();
        let index = |raw_id: u64| ids.binary_search(&raw_id).expect("collected above");

        // union-find over raw ids for component extraction
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v, _) in &raw.edges {
            let (ru, rv) = (find(&mut parent, index(u)), find(&mut parent, index(v)));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..ids.len() {
            *sizes.entry(find(&mut parent, i)).or_default() += 1;
        }
        // roots are the smallest index of their component, so iterating the
        // BTreeMap in order and keeping the first max breaks ties by raw id
        let mut keep = 0;
        let mut best = 0;
        for (&root, &size) in &sizes {
            if size > best {
                best = size;
                keep = root;
            }
        }

        let mut dense = vec![usize::MAX; ids.len()];
        let mut pads = Vec::with_capacity(best);
        for (i, &raw_id) in ids.iter().enumerate() {
            if find(&mut parent, i) == keep {
                dense[i] = pads.len();
                let p = raw.pads.get(&raw_id).copied().ok_or_else(|| {
                    NetworkError::Validation(format!("no pad count given for node {raw_id}"))
                })?;
                pads.push(p);
            }
        }
        let edges = raw
            .edges
            .iter()
            .filter(|&&(u, _, _)| dense[index(u)] != usize::MAX)
            .map(|&(u, v, d)| (dense[index(u)], dense[index(v)], d))
            .collect();
        SkywayNetwork::new(pads, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, NetworkError> {
        self.nodes.get(id.0).ok_or(NetworkError::UnknownNode(id))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 < self.nodes.len()
    }

    /// Adjacent nodes with segment distances, sorted by node id.
    pub fn neighbors(&self, n: NodeId) -> Result<&[(NodeId, f64)], NetworkError> {
        self.adjacency
            .get(n.0)
            .map(Vec::as_slice)
            .ok_or(NetworkError::UnknownNode(n))
    }

    /// Length of the segment joining `a` and `b`, if any.
    pub fn edge_distance(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let list = self.adjacency.get(a.0)?;
        list.binary_search_by_key(&b, |&(id, _)| id)
            .ok()
            .map(|i| list[i].1)
    }

    fn component_of(&self, start: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start.0] = true;
        while let Some(u) = stack.pop() {
            out.push(u);
            for &(v, _) in &self.adjacency[u.0] {
                if !seen[v.0] {
                    seen[v.0] = true;
                    stack.push(v);
                }
            }
        }
        out
    }

    /// Single-target Dijkstra: shortest distance from every node to `target`.
    /// Unreachable nodes get `f64::INFINITY`.
    pub fn distances_to(&self, target: NodeId) -> Result<Vec<f64>, NetworkError> {
        self.node(target)?;
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[target.0] = 0.0;
        heap.push(HeapEntry { dist: 0.0, node: target });
        while let Some(HeapEntry { dist: d, node }) = heap.pop() {
            if d > dist[node.0] {
                continue;
            }
            for &(next, w) in &self.adjacency[node.0] {
                let nd = d + w;
                if nd < dist[next.0] {
                    dist[next.0] = nd;
                    heap.push(HeapEntry { dist: nd, node: next });
                }
            }
        }
        Ok(dist)
    }

    /// Shortest path from `from` to `to`. Among equally short paths the
    /// lexicographically smallest node sequence is returned.
    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Result<(f64, Vec<NodeId>), NetworkError> {
        self.node(from)?;
        let dist = self.distances_to(to)?;
        self.path_along(&dist, from, to)
    }

    /// Walks from `from` to `to` over a distance field produced by
    /// [`SkywayNetwork::distances_to`]`(to)`, taking the smallest-id
    /// neighbor that stays on a shortest path at every step.
    pub fn path_along(
        &self,
        dist_to_target: &[f64],
        from: NodeId,
        to: NodeId,
    ) -> Result<(f64, Vec<NodeId>), NetworkError> {
        let total = dist_to_target[from.0];
        if !total.is_finite() {
            return Err(NetworkError::Unreachable { from, to });
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let here = dist_to_target[cur.0];
            let next = self.adjacency[cur.0]
                .iter()
                .find(|&&(v, w)| dist_to_target[v.0] < here && dist_eq(w + dist_to_target[v.0], here))
                .map(|&(v, _)| v)
                .ok_or(NetworkError::Unreachable { from, to })?;
            path.push(next);
            cur = next;
        }
        Ok((total, path))
    }

    /// Sum of segment lengths along `path`; `None` if a hop is not an edge.
    pub fn path_length(&self, path: &[NodeId]) -> Option<f64> {
        path.windows(2)
            .try_fold(0.0, |acc, w| Some(acc + self.edge_distance(w[0], w[1])?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses `u v dist_meters` lines; `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Vec<(u64, u64, f64)>, NetworkError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| NetworkError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected `u v dist`, got {} fields", fields.len())));
        }
        let u = fields[0]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("bad node id {:?}: {e}", fields[0])))?;
        let v = fields[1]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("bad node id {:?}: {e}", fields[1])))?;
        let d = fields[2]
            .parse::<f64>()
            .map_err(|e| parse_err(format!("bad distance {:?}: {e}", fields[2])))?;
        if !(d.is_finite() && d > 0.0) {
            return Err(parse_err(format!("distance must be positive, got {d}")));
        }
        out.push((u, v, d));
    }
    Ok(out)
}

/// Parses `node_id pad_count` lines; `#` starts a comment.
pub fn parse_pads(text: &str) -> Result<BTreeMap<u64, u32>, NetworkError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| NetworkError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected `node pads`, got {} fields", fields.len())));
        }
        let id = fields[0]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("bad node id {:?}: {e}", fields[0])))?;
        let pads = fields[1]
            .parse::<u32>()
            .map_err(|e| parse_err(format!("bad pad count {:?}: {e}", fields[1])))?;
        if pads < 1 {
            return Err(parse_err(format!("pad count must be at least 1, got {pads}")));
        }
        if out.insert(id, pads).is_some() {
            return Err(parse_err(format!("duplicate pad entry for node {id}")));
        }
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, NetworkError> {
    fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads an edge-list file and a pads file (both keyed by raw node ids).
pub fn load_network(edge_list_path: &Path, pads_path: &Path) -> Result<SkywayNetwork, NetworkError> {
    let raw = RawGraph {
        edges: parse_edge_list(&read(edge_list_path)?)?,
        pads: parse_pads(&read(pads_path)?)?,
    };
    SkywayNetwork::from_raw(&raw)
}

/// Loads an edge-list file and assigns every node a pad count drawn
/// uniformly from `pad_range` with a seeded ChaCha8 stream, in ascending
/// raw-id order.
pub fn load_network_with_random_pads(
    edge_list_path: &Path,
    seed: u64,
    pad_range: (u32, u32),
) -> Result<SkywayNetwork, NetworkError> {
    let edges = parse_edge_list(&read(edge_list_path)?)?;
    let ids: BTreeSet<u64> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    let pads = random_pads(ids.len(), seed, pad_range)?;
    let raw = RawGraph { pads: ids.into_iter().zip(pads).collect(), edges };
    SkywayNetwork::from_raw(&raw)
}

pub(crate) fn random_pads(count: usize, seed: u64, (lo, hi): (u32, u32)) -> Result<Vec<u32>, NetworkError> {
    if lo < 1 || hi < lo {
        return Err(NetworkError::Validation(format!(
            "pad range [{lo}, {hi}] must satisfy 1 <= min <= max"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// Loads a JSON document of the form `{"nodes":[{"id":0,"pads":2},..],
/// "edges":[[0,1,100.0],..]}` with dense ids.
pub fn load_network_json(path: &Path) -> Result<SkywayNetwork, NetworkError> {
    let text = read(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let repr: NetworkRepr = serde_path_to_error::deserialize(de).map_err(|e| NetworkError::Parse {
        line: e.inner().line(),
        message: format!("{}: {}", e.path(), e.inner()),
    })?;
    SkywayNetwork::try_from(repr)
}
