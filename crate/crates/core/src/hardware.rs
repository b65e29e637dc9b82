//! Hardware architecture model: a duration-weighted, labeled multigraph whose
//! nodes are physical qubits and whose edges are the 2-qubit gates available
//! between them. Each qubit additionally carries a 1-qubit mixing gate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Swap,
    Ps,
    Mix,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Swap | GateKind::Ps => 2,
            GateKind::Mix => 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::Swap => "SWAP",
            GateKind::Ps => "PS",
            GateKind::Mix => "MIX",
        })
    }
}

/// Index of a qubit in the canonical qubit order of its [`HardwareGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit(pub usize);

/// A 2-qubit gate placed on an unordered qubit pair; `a < b` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeGate {
    pub a: Qubit,
    pub b: Qubit,
    pub kind: GateKind,
    pub duration: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum HardwareError {
    #[error("malformed hardware file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown qubit `{0}`")]
    UnknownQubit(String),
    #[error("duplicate qubit `{0}`")]
    DuplicateQubit(String),
    #[error("duplicate {kind} gate on edge {a}-{b}")]
    DuplicateGate { a: String, b: String, kind: GateKind },
    #[error("self-loop gate on qubit `{0}`")]
    SelfLoop(String),
    #[error("non-positive duration {duration} for {what}")]
    NonPositiveDuration { what: String, duration: i64 },
    #[error("gate kind `{0}` cannot label an edge")]
    InvalidEdgeKind(String),
    #[error("missing mix duration for qubit `{0}`")]
    MissingMixDuration(String),
    #[error("the SWAP subgraph is disconnected: `{0}` is unreachable from `{1}`")]
    Disconnected(String, String),
    #[error("hardware has no qubits")]
    Empty,
    #[error("unknown preset `{0}` (expected N8, N21 or N40)")]
    UnknownPreset(String),
    #[error("neighbors are only defined for SWAP and PS gates")]
    MixNeighbors,
}

/// Mix-gate durations, either uniform or per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixDurations {
    Uniform(u32),
    PerQubit(BTreeMap<String, u32>),
}

#[derive(Debug, Clone)]
pub struct HardwareGraph {
    qubits: Vec<String>,
    index: HashMap<String, Qubit>,
    edges: Vec<EdgeGate>,
    mix: Vec<u32>,
    gates: HashMap<(Qubit, Qubit, GateKind), u32>,
    swap_adj: Vec<Vec<Qubit>>,
    ps_adj: Vec<Vec<Qubit>>,
    hops: Vec<Vec<u32>>,
}

impl PartialEq for HardwareGraph {
    fn eq(&self, other: &Self) -> bool {
        self.qubits == other.qubits && self.edges == other.edges && self.mix == other.mix
    }
}

impl Eq for HardwareGraph {}

/// Orders names by non-numeric prefix, then numeric suffix, so that `n2 < n10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let digits = s.len() - s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = s.split_at(s.len() - digits);
        (head, tail.parse().ok())
    }
    let (ha, na) = split(a);
    let (hb, nb) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(a.cmp(b))
}

impl HardwareGraph {
    /// Builds and validates a graph. Edge endpoints are given by name; the
    /// qubit list is re-sorted into canonical (natural) order.
    pub fn new(
        qubits: Vec<String>,
        edges: Vec<(String, String, GateKind, i64)>,
        mix: MixDurations,
    ) -> Result<Self, HardwareError> {
        if qubits.is_empty() {
            return Err(HardwareError::Empty);
        }
        let mut names = qubits;
        names.sort_by(|a, b| natural_cmp(a, b));
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(HardwareError::DuplicateQubit(w[0].clone()));
            }
        }
        let index: HashMap<String, Qubit> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Qubit(i)))
            .collect();
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| HardwareError::UnknownQubit(n.to_string()))
        };

        let mut gates = HashMap::new();
        let mut edge_list = Vec::with_capacity(edges.len());
        for (a, b, kind, duration) in edges {
            if kind == GateKind::Mix {
                return Err(HardwareError::InvalidEdgeKind("mix".into()));
            }
            let (qa, qb) = (lookup(&a)?, lookup(&b)?);
            if qa == qb {
                return Err(HardwareError::SelfLoop(a));
            }
            if duration <= 0 || duration > u32::MAX as i64 {
                return Err(HardwareError::NonPositiveDuration {
                    what: format!("{kind} gate {a}-{b}"),
                    duration,
                });
            }
            let (qa, qb) = if qa < qb { (qa, qb) } else { (qb, qa) };
            if gates.insert((qa, qb, kind), duration as u32).is_some() {
                return Err(HardwareError::DuplicateGate {
                    a: names[qa.0].clone(),
                    b: names[qb.0].clone(),
                    kind,
                });
            }
            edge_list.push(EdgeGate { a: qa, b: qb, kind, duration: duration as u32 });
        }
        edge_list.sort();

        let mix = match mix {
            MixDurations::Uniform(d) => {
                if d == 0 {
                    return Err(HardwareError::NonPositiveDuration {
                        what: "mix gate".into(),
                        duration: 0,
                    });
                }
                vec![d; names.len()]
            }
            MixDurations::PerQubit(map) => {
                for k in map.keys() {
                    lookup(k)?;
                }
                names
                    .iter()
                    .map(|n| match map.get(n) {
                        Some(0) => Err(HardwareError::NonPositiveDuration {
                            what: format!("mix gate on {n}"),
                            duration: 0,
                        }),
                        Some(&d) => Ok(d),
                        None => Err(HardwareError::MissingMixDuration(n.clone())),
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };

        let n = names.len();
        let mut swap_adj = vec![Vec::new(); n];
        let mut ps_adj = vec![Vec::new(); n];
        for e in &edge_list {
            let adj = match e.kind {
                GateKind::Swap => &mut swap_adj,
                _ => &mut ps_adj,
            };
            adj[e.a.0].push(e.b);
            adj[e.b.0].push(e.a);
        }
        for list in swap_adj.iter_mut().chain(ps_adj.iter_mut()) {
            list.sort();
        }

        let hops: Vec<Vec<u32>> = (0..n).map(|s| bfs_hops(&swap_adj, Qubit(s))).collect();
        if let Some(far) = hops[0].iter().position(|&h| h == u32::MAX) {
            return Err(HardwareError::Disconnected(names[far].clone(), names[0].clone()));
        }

        Ok(HardwareGraph { qubits: names, index, edges: edge_list, mix, gates, swap_adj, ps_adj, hops })
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubits(&self) -> impl ExactSizeIterator<Item = Qubit> + '_ {
        (0..self.qubits.len()).map(Qubit)
    }

    pub fn qubit_names(&self) -> &[String] {
        &self.qubits
    }

    pub fn qubit(&self, name: &str) -> Option<Qubit> {
        self.index.get(name).copied()
    }

    pub fn name(&self, q: Qubit) -> &str {
        &self.qubits[q.0]
    }

    /// Location label used in PDDL names: the 1-based canonical position.
    pub fn label(&self, q: Qubit) -> usize {
        q.0 + 1
    }

    pub fn from_label(&self, label: usize) -> Option<Qubit> {
        (label >= 1 && label <= self.qubits.len()).then(|| Qubit(label - 1))
    }

    pub fn edges(&self) -> &[EdgeGate] {
        &self.edges
    }

    pub fn edges_of(&self, kind: GateKind) -> impl Iterator<Item = &EdgeGate> + '_ {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn gate_duration(&self, a: Qubit, b: Qubit, kind: GateKind) -> Option<u32> {
        let key = if a < b { (a, b, kind) } else { (b, a, kind) };
        self.gates.get(&key).copied()
    }

    pub fn mix_duration(&self, q: Qubit) -> u32 {
        self.mix[q.0]
    }

    pub fn mix_durations(&self) -> MixDurations {
        if self.mix.windows(2).all(|w| w[0] == w[1]) {
            MixDurations::Uniform(self.mix[0])
        } else {
            MixDurations::PerQubit(
                self.qubits.iter().cloned().zip(self.mix.iter().copied()).collect(),
            )
        }
    }

    pub fn adjacent(&self, q: Qubit, kind: GateKind) -> &[Qubit] {
        match kind {
            GateKind::Swap => &self.swap_adj[q.0],
            GateKind::Ps => &self.ps_adj[q.0],
            GateKind::Mix => &[],
        }
    }

    /// Qubits sharing a gate of `kind` with `q`.
    pub fn neighbors(&self, q: Qubit, kind: GateKind) -> Result<BTreeSet<Qubit>, HardwareError> {
        if q.0 >= self.len() {
            return Err(HardwareError::UnknownQubit(format!("#{}", q.0)));
        }
        if kind == GateKind::Mix {
            return Err(HardwareError::MixNeighbors);
        }
        Ok(self.adjacent(q, kind).iter().copied().collect())
    }

    /// SWAP-hop distance between two qubits.
    pub fn hops(&self, from: Qubit, to: Qubit) -> u32 {
        self.hops[from.0][to.0]
    }

    /// Shortest SWAP path; ties go to the lexicographically smallest sequence
    /// of canonical qubit indices.
    pub fn swap_distance(&self, from: Qubit, to: Qubit) -> (u32, Vec<Qubit>) {
        let dist = &self.hops[to.0];
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            // swap_adj is sorted, so the first closer neighbor is the smallest.
            cur = *self.swap_adj[cur.0]
                .iter()
                .find(|n| dist[n.0] + 1 == dist[cur.0])
                .expect("SWAP subgraph is connected");
            path.push(cur);
        }
        (dist[from.0], path)
    }

    pub fn max_swap_duration(&self) -> u32 {
        self.edges_of(GateKind::Swap).map(|e| e.duration).max().unwrap_or(0)
    }

    pub fn min_swap_duration(&self) -> u32 {
        self.edges_of(GateKind::Swap).map(|e| e.duration).min().unwrap_or(0)
    }

    /// Parses the JSON hardware file format.
    pub fn from_json(text: &str) -> Result<Self, HardwareError> {
        let file: HardwareFile = serde_json::from_str(text)?;
        let mut edges = Vec::new();
        for e in file.edges {
            for g in e.gates {
                let kind = match g.kind.as_str() {
                    "swap" => GateKind::Swap,
                    "ps" => GateKind::Ps,
                    other => return Err(HardwareError::InvalidEdgeKind(other.to_string())),
                };
                edges.push((e.a.clone(), e.b.clone(), kind, g.duration));
            }
        }
        let mix = match file.mix_duration {
            MixFile::Uniform(d) => MixDurations::Uniform(checked_mix(d, "mix gate")?),
            MixFile::PerQubit(map) => MixDurations::PerQubit(
                map.into_iter()
                    .map(|(k, d)| checked_mix(d, &format!("mix gate on {k}")).map(|d| (k, d)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        HardwareGraph::new(file.qubits, edges, mix)
    }

    /// Canonical serialization: qubits in natural order, edges sorted by
    /// endpoint indices, SWAP before PS within an edge.
    pub fn to_json(&self) -> String {
        let mut grouped: BTreeMap<(Qubit, Qubit), Vec<GateFile>> = BTreeMap::new();
        for e in &self.edges {
            grouped.entry((e.a, e.b)).or_default().push(GateFile {
                kind: match e.kind {
                    GateKind::Swap => "swap".into(),
                    _ => "ps".into(),
                },
                duration: e.duration as i64,
            });
        }
        let file = HardwareFile {
            qubits: self.qubits.clone(),
            edges: grouped
                .into_iter()
                .map(|((a, b), gates)| EdgeFile {
                    a: self.qubits[a.0].clone(),
                    b: self.qubits[b.0].clone(),
                    gates,
                })
                .collect(),
            mix_duration: match self.mix_durations() {
                MixDurations::Uniform(d) => MixFile::Uniform(d as i64),
                MixDurations::PerQubit(m) => {
                    MixFile::PerQubit(m.into_iter().map(|(k, v)| (k, v as i64)).collect())
                }
            },
        };
        let mut s = serde_json::to_string_pretty(&file).expect("hardware serializes");
        s.push('\n');
        s
    }
}

fn checked_mix(d: i64, what: &str) -> Result<u32, HardwareError> {
    if d <= 0 || d > u32::MAX as i64 {
        Err(HardwareError::NonPositiveDuration { what: what.to_string(), duration: d })
    } else {
        Ok(d as u32)
    }
}

fn bfs_hops(adj: &[Vec<Qubit>], src: Qubit) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[src.0] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(q) = queue.pop_front() {
        for &n in &adj[q.0] {
            if dist[n.0] == u32::MAX {
                dist[n.0] = dist[q.0] + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Parses a hardware file.
pub fn load_hardware(text: &str) -> Result<HardwareGraph, HardwareError> {
    HardwareGraph::from_json(text)
}

#[derive(Debug, Serialize, Deserialize)]
struct HardwareFile {
    qubits: Vec<String>,
    edges: Vec<EdgeFile>,
    mix_duration: MixFile,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeFile {
    a: String,
    b: String,
    gates: Vec<GateFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GateFile {
    kind: String,
    duration: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MixFile {
    Uniform(i64),
    PerQubit(BTreeMap<String, i64>),
}

pub mod presets {
    //! Built-in chip layouts.
    //!
    //! The chips are lattices of 8-qubit rings. Rings adjacent horizontally or
    //! vertically share one edge. The 8-qubit chip is a single ring; the 21-
    //! and 40-qubit chips are prefixes of a 3x3 ring lattice grown ring by
    //! ring from the top-left corner, so that `N8 ⊂ N21 ⊂ N40`.
    //!
    //! The shipped JSON files are the source of truth for [`preset`]; the
    //! generator here reproduces them and is checked against them in tests.

    use super::*;

    pub const N8_JSON: &str = include_str!("../presets/N8.json");
    pub const N21_JSON: &str = include_str!("../presets/N21.json");
    pub const N40_JSON: &str = include_str!("../presets/N40.json");

    pub const SWAP_DURATION: i64 = 2;
    pub const MIX_DURATION: u32 = 1;

    /// Ring positions on a 4x4 cell (corners removed), clockwise from the
    /// top-left of the top side. Row grows downward.
    const RING: [(usize, usize); 8] =
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 2), (3, 1), (2, 0), (1, 0)];

    /// PS duration of ring edge `RING[i]`-`RING[i+1]`. Shared edges (index 2
    /// with 6, index 4 with 0) agree, so the coloring is consistent across
    /// the lattice.
    pub const PS_PATTERN: [i64; 8] = [3, 4, 4, 3, 3, 4, 4, 3];

    /// Names of the top-left ring nodes, in `RING` order. Going clockwise the
    /// ring reads n1, n4, n5, n6, n7, n8, n3, n2.
    const FIRST_RING: [&str; 8] = ["n1", "n4", "n5", "n6", "n7", "n8", "n3", "n2"];

    /// Ring lattice growth order: by shell `max(r, c)`, then row, then column.
    fn ring_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
        let mut cells: Vec<_> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
        cells.sort_by_key(|&(r, c)| (r.max(c), r, c));
        cells
    }

    /// Generates the first `n_qubits` qubits of a `rows` x `cols` ring lattice.
    pub fn ring_lattice(rows: usize, cols: usize, n_qubits: usize) -> HardwareGraph {
        let mut names: HashMap<(usize, usize), String> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        // PS duration per undirected coordinate edge; first ring to claim wins.
        let mut edges: BTreeMap<((usize, usize), (usize, usize)), i64> = BTreeMap::new();

        for (ring_idx, (r, c)) in ring_order(rows, cols).into_iter().enumerate() {
            let pos: Vec<(usize, usize)> = RING.iter().map(|&(y, x)| (3 * r + y, 3 * c + x)).collect();
            for i in 0..8 {
                let (u, v) = (pos[i], pos[(i + 1) % 8]);
                let key = if u < v { (u, v) } else { (v, u) };
                edges.entry(key).or_insert(PS_PATTERN[i]);
            }
            if ring_idx == 0 {
                for (p, n) in pos.iter().zip(FIRST_RING) {
                    names.insert(*p, n.to_string());
                    order.push(*p);
                }
                continue;
            }
            // New nodes in clockwise order, starting just after a known node.
            let start = (0..8)
                .find(|&i| names.contains_key(&pos[(i + 7) % 8]) && !names.contains_key(&pos[i]))
                .unwrap_or(0);
            for k in 0..8 {
                let p = pos[(start + k) % 8];
                if !names.contains_key(&p) {
                    names.insert(p, format!("n{}", names.len() + 1));
                    order.push(p);
                }
            }
        }

        let kept: HashMap<(usize, usize), &String> =
            order.iter().take(n_qubits).map(|p| (*p, &names[p])).collect();
        let mut gate_list = Vec::new();
        for ((u, v), ps) in edges {
            if let (Some(a), Some(b)) = (kept.get(&u), kept.get(&v)) {
                gate_list.push(((*a).clone(), (*b).clone(), GateKind::Swap, SWAP_DURATION));
                gate_list.push(((*a).clone(), (*b).clone(), GateKind::Ps, ps));
            }
        }
        HardwareGraph::new(
            kept.values().map(|s| (*s).clone()).collect(),
            gate_list,
            MixDurations::Uniform(MIX_DURATION),
        )
        .expect("lattice prefix is a valid chip")
    }

    pub fn generate(name: &str) -> Result<HardwareGraph, HardwareError> {
        match name {
            "N8" => Ok(ring_lattice(1, 1, 8)),
            "N21" => Ok(ring_lattice(3, 3, 21)),
            "N40" => Ok(ring_lattice(3, 3, 40)),
            other => Err(HardwareError::UnknownPreset(other.to_string())),
        }
    }

    pub fn preset_json(name: &str) -> Result<&'static str, HardwareError> {
        match name {
            "N8" => Ok(N8_JSON),
            "N21" => Ok(N21_JSON),
            "N40" => Ok(N40_JSON),
            other => Err(HardwareError::UnknownPreset(other.to_string())),
        }
    }

    /// One of the built-in chips: `N8`, `N21` or `N40`.
    pub fn preset(name: &str) -> Result<HardwareGraph, HardwareError> {
        HardwareGraph::from_json(preset_json(name)?)
    }

    pub const NAMES: [&str; 3] = ["N8", "N21", "N40"];
}

pub use presets::preset;

#[cfg(test)]
mod tests {
    use super::*;

    fn q(g: &HardwareGraph, n: &str) -> Qubit {
        g.qubit(n).unwrap()
    }

    #[test]
    fn minimal_graph_loads() {
        let g = load_hardware(
            r#"{"qubits":["n1","n2"],"edges":[{"a":"n1","b":"n2","gates":[
                {"kind":"swap","duration":2},{"kind":"ps","duration":3}]}],"mix_duration":1}"#,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.gate_duration(Qubit(1), Qubit(0), GateKind::Ps), Some(3));
    }

    #[test]
    fn rejects_invalid_files() {
        let unknown = r#"{"qubits":["n1","n2"],"edges":[{"a":"n1","b":"n2","gates":[{"kind":"swap","duration":2}]},
            {"a":"n1","b":"n9","gates":[{"kind":"ps","duration":3}]}],"mix_duration":1}"#;
        let err = load_hardware(unknown).unwrap_err();
        assert!(err.to_string().contains("unknown qubit"), "{err}");

        let dup = r#"{"qubits":["n1","n2"],"edges":[{"a":"n1","b":"n2","gates":[{"kind":"swap","duration":2}]},
            {"a":"n2","b":"n1","gates":[{"kind":"swap","duration":2}]}],"mix_duration":1}"#;
        assert!(matches!(load_hardware(dup), Err(HardwareError::DuplicateGate { .. })));

        let disc = r#"{"qubits":["n1","n2","n3"],"edges":[{"a":"n1","b":"n2","gates":[{"kind":"swap","duration":2}]},
            {"a":"n2","b":"n3","gates":[{"kind":"ps","duration":3}]}],"mix_duration":1}"#;
        assert!(matches!(load_hardware(disc), Err(HardwareError::Disconnected(..))));

        let zero = r#"{"qubits":["n1","n2"],"edges":[{"a":"n1","b":"n2","gates":[{"kind":"swap","duration":0}]}],"mix_duration":1}"#;
        assert!(matches!(load_hardware(zero), Err(HardwareError::NonPositiveDuration { .. })));

        assert!(matches!(load_hardware("{not json"), Err(HardwareError::Parse(_))));
        assert!(matches!(preset("N9"), Err(HardwareError::UnknownPreset(_))));
    }

    #[test]
    fn natural_order_of_names() {
        let mut v = vec!["n10", "n2", "n1", "m3"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["m3", "n1", "n2", "n10"]);
    }

    #[test]
    fn n8_ring_matches_examples() {
        let g = preset("N8").unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.edges_of(GateKind::Swap).count(), 8);
        assert!(g.edges_of(GateKind::Swap).all(|e| e.duration == 2));
        assert_eq!(g.gate_duration(q(&g, "n2"), q(&g, "n3"), GateKind::Ps), Some(4));
        assert_eq!(g.gate_duration(q(&g, "n1"), q(&g, "n2"), GateKind::Ps), Some(3));
        assert_eq!(g.gate_duration(q(&g, "n1"), q(&g, "n4"), GateKind::Ps), Some(3));
        assert_eq!(g.gate_duration(q(&g, "n6"), q(&g, "n7"), GateKind::Ps), Some(3));
        // clockwise order n1 n4 n5 n6 n7 n8 n3 n2
        let ring = ["n1", "n4", "n5", "n6", "n7", "n8", "n3", "n2"];
        for i in 0..8 {
            let (a, b) = (q(&g, ring[i]), q(&g, ring[(i + 1) % 8]));
            assert!(g.gate_duration(a, b, GateKind::Swap).is_some());
        }
        let expect: BTreeSet<_> = [q(&g, "n2"), q(&g, "n4")].into();
        assert_eq!(g.neighbors(q(&g, "n1"), GateKind::Swap).unwrap(), expect);
        assert_eq!(g.neighbors(q(&g, "n1"), GateKind::Ps).unwrap(), expect);
    }

    #[test]
    fn single_qubit_has_no_neighbors() {
        let g = HardwareGraph::new(vec!["a".into()], vec![], MixDurations::Uniform(1)).unwrap();
        assert!(g.neighbors(Qubit(0), GateKind::Swap).unwrap().is_empty());
        assert!(g.neighbors(Qubit(3), GateKind::Swap).is_err());
    }

    #[test]
    fn swap_distance_on_ring() {
        let g = preset("N8").unwrap();
        let (n1, n2, n3, n4) = (q(&g, "n1"), q(&g, "n2"), q(&g, "n3"), q(&g, "n4"));
        assert_eq!(g.swap_distance(n4, n4), (0, vec![n4]));
        assert_eq!(g.swap_distance(n1, n2).0, 1);
        // n4 -> n1 -> n2 -> n3 is shorter than the five-swap clockwise route.
        assert_eq!(g.swap_distance(n4, n3), (3, vec![n4, n1, n2, n3]));
        let n6 = q(&g, "n6");
        // Opposite nodes on the ring: two shortest paths, lexicographic wins.
        let (h, path) = g.swap_distance(n1, n6);
        assert_eq!(h, 3);
        assert_eq!(path, vec![n1, n4, q(&g, "n5"), n6]);
    }

    #[test]
    fn larger_presets_are_connected_and_nested() {
        let n8 = preset("N8").unwrap();
        let n21 = preset("N21").unwrap();
        let n40 = preset("N40").unwrap();
        assert_eq!(n21.len(), 21);
        assert_eq!(n40.len(), 40);
        for g in [&n21, &n40] {
            assert!(g.edges_of(GateKind::Swap).all(|e| e.duration == 2));
            assert!(g.edges_of(GateKind::Ps).all(|e| e.duration == 3 || e.duration == 4));
            for a in g.qubits() {
                assert_eq!(g.mix_duration(a), 1);
                assert!(g.qubits().all(|b| g.hops(a, b) != u32::MAX));
            }
        }
        // Every N8 edge appears with identical gates in the larger chips.
        for big in [&n21, &n40] {
            for e in n8.edges() {
                let (a, b) = (big.qubit(n8.name(e.a)).unwrap(), big.qubit(n8.name(e.b)).unwrap());
                assert_eq!(big.gate_duration(a, b, e.kind), Some(e.duration));
            }
        }
    }

    #[test]
    fn shipped_files_match_generator() {
        for name in presets::NAMES {
            let shipped = preset(name).unwrap();
            let generated = presets::generate(name).unwrap();
            assert_eq!(shipped, generated, "{name}");
            assert_eq!(presets::preset_json(name).unwrap(), generated.to_json(), "{name}");
        }
    }

    #[test]
    #[ignore = "writes presets/*.json; run with --ignored to regenerate"]
    fn regenerate_preset_files() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/presets");
        for name in presets::NAMES {
            let g = presets::generate(name).unwrap();
            std::fs::write(format!("{dir}/{name}.json"), g.to_json()).unwrap();
        }
    }
}
