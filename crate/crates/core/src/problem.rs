//! MaxCut instances and the QAOA compilation problems built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hardware::{self, GateKind, HardwareError, HardwareGraph, Qubit};

/// A logical quantum state. Displayed 1-based (`q1`, `q2`, ...) to match the
/// PDDL constants and plan files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QState(pub usize);

impl fmt::Display for QState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0 + 1)
    }
}

impl QState {
    /// Parses `q<k>` (1-based).
    pub fn parse(s: &str) -> Option<QState> {
        let n: usize = s.strip_prefix(['q', 'Q'])?.parse().ok()?;
        (n >= 1).then(|| QState(n - 1))
    }
}

/// Unordered qstate pair, stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPair(QState, QState);

impl QPair {
    pub fn new(a: QState, b: QState) -> Self {
        if a <= b {
            QPair(a, b)
        } else {
            QPair(b, a)
        }
    }

    pub fn lo(&self) -> QState {
        self.0
    }

    pub fn hi(&self) -> QState {
        self.1
    }

    pub fn contains(&self, q: QState) -> bool {
        self.0 == q || self.1 == q
    }

    pub fn other(&self, q: QState) -> QState {
        if self.0 == q {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for QPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PsGoal {
    pub level: u32,
    pub pair: QPair,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("{0}")]
    Hardware(#[from] HardwareError),
    #[error("malformed problem file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot choose {edges} edges among {pairs} qstate pairs")]
    Infeasible { edges: usize, pairs: usize },
    #[error("utilization must lie in (0, 1], got {0}")]
    BadUtilization(f64),
    #[error("instance has {states} qstates but the hardware only {qubits} qubits")]
    TooLarge { states: usize, qubits: usize },
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("level count p must be at least 1")]
    BadLevelCount,
    #[error("level {level} outside 1..={p}")]
    LevelOutOfRange { level: u32, p: u32 },
    #[error("initial assignment: {0}")]
    BadAssignment(String),
    #[error("unknown assignment mode `{0}` (expected identity or random)")]
    UnknownAssignment(String),
    #[error("gate pin on {pair}: {reason}")]
    BadPin { pair: String, reason: String },
    #[error("cannot read hardware file {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// A MaxCut graph over `n_states` qstates.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutInstance {
    pub n_states: usize,
    pub edges: BTreeSet<QPair>,
    pub seed: u64,
    pub utilization: f64,
}

impl MaxCutInstance {
    pub fn new(n_states: usize, edges: &[(usize, usize)]) -> Result<Self, ProblemError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b || a >= n_states || b >= n_states {
                return Err(ProblemError::BadEdge(a, b));
            }
            if !set.insert(QPair::new(QState(a), QState(b))) {
                return Err(ProblemError::BadEdge(a, b));
            }
        }
        Ok(MaxCutInstance { n_states, edges: set, seed: 0, utilization: 1.0 })
    }
}

/// Number of qstates used for a chip of `n_qubits` at utilization `u`.
pub fn states_for(n_qubits: usize, utilization: f64) -> usize {
    ((n_qubits as f64) * utilization + 1e-9).floor() as usize
}

/// Seeded generator shared by instance generation and random assignment:
/// ChaCha with 8 rounds, seeded from a `u64` via `SeedableRng::seed_from_u64`.
/// Each consumer uses a distinct stream so they stay independent.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const INSTANCE_STREAM: u64 = 0;
const ASSIGNMENT_STREAM: u64 = 1;

/// Random benchmark instance: exactly `n_qubits` edges drawn uniformly
/// without replacement among all pairs of `floor(n_qubits * u)` qstates.
pub fn generate_instance(
    n_qubits: usize,
    utilization: f64,
    seed: u64,
) -> Result<MaxCutInstance, ProblemError> {
    if !(utilization > 0.0 && utilization <= 1.0) {
        return Err(ProblemError::BadUtilization(utilization));
    }
    let n_states = states_for(n_qubits, utilization);
    let pairs: Vec<(usize, usize)> =
        (0..n_states).flat_map(|i| (i + 1..n_states).map(move |j| (i, j))).collect();
    if n_qubits > pairs.len() {
        return Err(ProblemError::Infeasible { edges: n_qubits, pairs: pairs.len() });
    }
    let mut rng = seeded_rng(seed, INSTANCE_STREAM);
    let mut chosen: Vec<(usize, usize)> = rand::seq::index::sample(&mut rng, pairs.len(), n_qubits)
        .into_iter()
        .map(|i| pairs[i])
        .collect();
    chosen.sort();
    let mut inst = MaxCutInstance::new(n_states, &chosen)?;
    inst.seed = seed;
    inst.utilization = utilization;
    Ok(inst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Identity,
    Random,
}

impl std::str::FromStr for Assignment {
    type Err = ProblemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Assignment::Identity),
            "random" => Ok(Assignment::Random),
            other => Err(ProblemError::UnknownAssignment(other.to_string())),
        }
    }
}

/// A QAOA compilation problem.
///
/// Every qubit always holds exactly one qstate: the instance qstates
/// `0..n_states` sit where `initial` puts them, and the remaining qubits are
/// filled, in canonical order, by padding qstates `n_states..N` that carry
/// no goals. Swaps are therefore always permutations.
#[derive(Debug, Clone)]
pub struct CompilationProblem {
    pub hardware: Arc<HardwareGraph>,
    pub instance: MaxCutInstance,
    pub p: u32,
    initial: Vec<Qubit>,
    /// Goal pairs that must be carried out by a PS gate of a given duration.
    pins: BTreeMap<QPair, u32>,
    layout: Vec<Qubit>,
    goals_by_state: Vec<Vec<QPair>>,
}

impl CompilationProblem {
    pub fn new(
        hardware: Arc<HardwareGraph>,
        instance: MaxCutInstance,
        p: u32,
        initial: Vec<Qubit>,
    ) -> Result<Self, ProblemError> {
        if p == 0 {
            return Err(ProblemError::BadLevelCount);
        }
        let n = hardware.len();
        if instance.n_states > n {
            return Err(ProblemError::TooLarge { states: instance.n_states, qubits: n });
        }
        if initial.len() != instance.n_states {
            return Err(ProblemError::BadAssignment(format!(
                "{} locations for {} qstates",
                initial.len(),
                instance.n_states
            )));
        }
        let mut taken = vec![false; n];
        for (i, q) in initial.iter().enumerate() {
            if q.0 >= n {
                return Err(ProblemError::BadAssignment(format!("{} placed on unknown qubit", QState(i))));
            }
            if std::mem::replace(&mut taken[q.0], true) {
                return Err(ProblemError::BadAssignment(format!(
                    "qubit {} assigned twice",
                    hardware.name(*q)
                )));
            }
        }
        let mut layout = initial.clone();
        layout.extend((0..n).filter(|&i| !taken[i]).map(Qubit));

        let mut goals_by_state = vec![Vec::new(); n];
        for pair in &instance.edges {
            goals_by_state[pair.lo().0].push(*pair);
            goals_by_state[pair.hi().0].push(*pair);
        }
        Ok(CompilationProblem {
            hardware,
            instance,
            p,
            initial,
            pins: BTreeMap::new(),
            layout,
            goals_by_state,
        })
    }

    /// Requires the goal gates of `pair` to run on PS edges of `duration`.
    pub fn pin_gate(&mut self, pair: QPair, duration: u32) -> Result<(), ProblemError> {
        if !self.instance.edges.contains(&pair) {
            return Err(ProblemError::BadPin { pair: pair.to_string(), reason: "not an instance edge".into() });
        }
        if !self.hardware.edges_of(GateKind::Ps).any(|e| e.duration == duration) {
            return Err(ProblemError::BadPin {
                pair: pair.to_string(),
                reason: format!("no PS gate of duration {duration}"),
            });
        }
        self.pins.insert(pair, duration);
        Ok(())
    }

    pub fn pins(&self) -> &BTreeMap<QPair, u32> {
        &self.pins
    }

    pub fn pin(&self, pair: QPair) -> Option<u32> {
        self.pins.get(&pair).copied()
    }

    /// Whether a PS gate of `duration` may carry out the goal on `pair`.
    pub fn ps_allowed(&self, pair: QPair, duration: u32) -> bool {
        self.pin(pair).map_or(true, |d| d == duration)
    }

    /// Locations of the instance qstates.
    pub fn initial(&self) -> &[Qubit] {
        &self.initial
    }

    /// Full qstate -> qubit layout including padding qstates.
    pub fn initial_layout(&self) -> &[Qubit] {
        &self.layout
    }

    pub fn n_qstates(&self) -> usize {
        self.layout.len()
    }

    pub fn goal_pairs(&self) -> &BTreeSet<QPair> {
        &self.instance.edges
    }

    /// Goal pairs involving `q` (the same at every level).
    pub fn goals_of(&self, q: QState) -> &[QPair] {
        &self.goals_by_state[q.0]
    }

    /// A qstate is used when it takes part in at least one goal.
    pub fn is_used(&self, q: QState) -> bool {
        !self.goals_by_state[q.0].is_empty()
    }

    pub fn used_states(&self) -> impl Iterator<Item = QState> + '_ {
        (0..self.n_qstates()).map(QState).filter(|q| self.is_used(*q))
    }

    pub fn goal_set(&self, level: u32) -> Result<BTreeSet<PsGoal>, ProblemError> {
        if level == 0 || level > self.p {
            return Err(ProblemError::LevelOutOfRange { level, p: self.p });
        }
        Ok(self.instance.edges.iter().map(|&pair| PsGoal { level, pair }).collect())
    }

    /// Total goal count over all levels.
    pub fn goal_count(&self) -> usize {
        self.instance.edges.len() * self.p as usize
    }

    /// The same problem with `p` levels (goals and layout unchanged).
    pub fn with_levels(&self, p: u32) -> Result<Self, ProblemError> {
        if p == 0 {
            return Err(ProblemError::BadLevelCount);
        }
        let mut copy = self.clone();
        copy.p = p;
        Ok(copy)
    }

    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        let hardware = match &file.hardware {
            serde_json::Value::String(s) if hardware::presets::NAMES.contains(&s.as_str()) => {
                hardware::preset(s)?
            }
            serde_json::Value::String(path) => {
                let full = base_dir.map(|b| b.join(path)).unwrap_or_else(|| path.into());
                let text = std::fs::read_to_string(&full)
                    .map_err(|source| ProblemError::Io { path: full.display().to_string(), source })?;
                HardwareGraph::from_json(&text)?
            }
            inline => HardwareGraph::from_json(&inline.to_string())?,
        };
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut instance = MaxCutInstance::new(file.n_states, &edges)?;
        instance.seed = file.seed;
        instance.utilization = file.utilization;
        let mut initial = vec![None; file.n_states];
        for (state, qubit) in &file.initial {
            let s = QState::parse(state)
                .filter(|s| s.0 < file.n_states)
                .ok_or_else(|| ProblemError::BadAssignment(format!("unknown qstate `{state}`")))?;
            let q = hardware
                .qubit(qubit)
                .ok_or_else(|| ProblemError::BadAssignment(format!("unknown qubit `{qubit}`")))?;
            initial[s.0] = Some(q);
        }
        let initial = initial
            .into_iter()
            .enumerate()
            .map(|(i, q)| q.ok_or_else(|| ProblemError::BadAssignment(format!("{} is not placed", QState(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut problem = CompilationProblem::new(Arc::new(hardware), instance, file.p, initial)?;
        for [a, b, d] in file.pins {
            if a >= file.n_states || b >= file.n_states || a == b {
                return Err(ProblemError::BadEdge(a, b));
            }
            problem.pin_gate(QPair::new(QState(a), QState(b)), d as u32)?;
        }
        Ok(problem)
    }

    /// Serializes the problem; `hardware` is written as the given reference
    /// (a preset name or file path) or inline when `None`.
    pub fn to_json(&self, hardware_ref: Option<&str>) -> String {
        let hardware = match hardware_ref {
            Some(r) => serde_json::Value::String(r.to_string()),
            None => serde_json::from_str(&self.hardware.to_json()).expect("valid json"),
        };
        let file = ProblemFile {
            hardware,
            n_states: self.instance.n_states,
            edges: self.instance.edges.iter().map(|p| [p.lo().0, p.hi().0]).collect(),
            p: self.p,
            initial: self
                .initial
                .iter()
                .enumerate()
                .map(|(i, q)| (QState(i).to_string(), self.hardware.name(*q).to_string()))
                .collect(),
            seed: self.instance.seed,
            utilization: self.instance.utilization,
            pins: self.pins.iter().map(|(p, d)| [p.lo().0, p.hi().0, *d as usize]).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("problem serializes");
        s.push('\n');
        s
    }
}

/// Places `instance` on `hardware` with `p` levels. Identity mode maps qstate
/// `i` to the `i`-th qubit in canonical order; random mode draws a seeded
/// uniform injective assignment.
pub fn build_problem(
    instance: MaxCutInstance,
    hardware: Arc<HardwareGraph>,
    p: u32,
    assignment: Assignment,
    seed: u64,
) -> Result<CompilationProblem, ProblemError> {
    let n = hardware.len();
    if instance.n_states > n {
        return Err(ProblemError::TooLarge { states: instance.n_states, qubits: n });
    }
    let initial = match assignment {
        Assignment::Identity => (0..instance.n_states).map(Qubit).collect(),
        Assignment::Random => {
            let mut qubits: Vec<Qubit> = hardware.qubits().collect();
            qubits.shuffle(&mut seeded_rng(seed, ASSIGNMENT_STREAM));
            qubits.truncate(instance.n_states);
            qubits
        }
    };
    CompilationProblem::new(hardware, instance, p, initial)
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    hardware: serde_json::Value,
    n_states: usize,
    edges: Vec<[usize; 2]>,
    p: u32,
    initial: BTreeMap<String, String>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "one")]
    utilization: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pins: Vec<[usize; 3]>,
}

fn one() -> f64 {
    1.0
}
