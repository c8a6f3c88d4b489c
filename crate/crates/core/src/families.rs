//! Graph families for the scaling benchmarks and the test corpus.
//!
//! A family spec reads `name:n[,key=value]...`, for example `cycle:16`,
//! `balanced-r-tree:15,r=2` or `gnp:64,p=1/64,seed=7`. Shapes:
//!
//! * `cycle`: the `n`-ring.
//! * `complete`: `K_n`.
//! * `balanced-r-tree`: the first `n` vertices of the complete `r`-ary tree
//!   in breadth-first order; full trees at `n = (r^(d+1) - 1)/(r - 1)`.
//! * `barbell`: two `K_k` with `k = ⌊n/3⌋` joined by a path through the
//!   remaining `n - 2k` vertices.
//! * `necklace`: `n/4` copies of `K_4` in a row, consecutive copies joined
//!   by one bridge edge.
//! * `glued-cliques`: two cliques of sizes `⌈(n+1)/2⌉` and `⌊(n+1)/2⌋`
//!   sharing vertex 0.
//! * `gnp`: Erdős–Rényi `G(n, p)` with `p = 1/n` unless given, reduced to
//!   its largest connected component. Chains on it are always lazy.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{random_walk_chain, MarkovChain};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Clique size in the necklace.
pub const NECKLACE_CLIQUE: usize = 4;
/// Default branching factor of `balanced-r-tree`.
pub const DEFAULT_ARITY: usize = 2;
/// Resampling budget when a `gnp` draw has no edge at all.
const GNP_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cycle,
    Complete,
    BalancedRTree,
    Barbell,
    Necklace,
    GluedCliques,
    Gnp,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Cycle,
        Family::Complete,
        Family::BalancedRTree,
        Family::Barbell,
        Family::Necklace,
        Family::GluedCliques,
        Family::Gnp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::Complete => "complete",
            Family::BalancedRTree => "balanced-r-tree",
            Family::Barbell => "barbell",
            Family::Necklace => "necklace",
            Family::GluedCliques => "glued-cliques",
            Family::Gnp => "gnp",
        }
    }

    /// Smallest `n` the shape admits.
    pub fn min_n(self) -> usize {
        match self {
            Family::Cycle | Family::GluedCliques => 3,
            Family::Complete | Family::BalancedRTree | Family::Gnp => 2,
            Family::Barbell => 6,
            Family::Necklace => 2 * NECKLACE_CLIQUE,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    /// Branching factor, `balanced-r-tree` only.
    pub r: usize,
    /// Edge probability, `gnp` only; `None` means `1/n`.
    pub p: Option<f64>,
    /// Seed, `gnp` only.
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize) -> Self {
        FamilySpec { family, n, r: DEFAULT_ARITY, p: None, seed: 0 }
    }

    /// Same shape parameters at another size.
    pub fn with_n(&self, n: usize) -> Self {
        FamilySpec { n, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        FamilySpec { seed, ..self.clone() }
    }

    /// Edge probability actually used by `gnp`.
    pub fn edge_probability(&self) -> f64 {
        self.p.unwrap_or(1.0 / self.n as f64)
    }

    /// `gnp` chains are lazy regardless of the request.
    pub fn forces_lazy(&self) -> bool {
        self.family == Family::Gnp
    }

    /// Simple random walk on the generated graph.
    pub fn chain(&self, lazy: bool) -> Result<MarkovChain> {
        random_walk_chain(&gen_family(self)?, lazy || self.forces_lazy())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.n)?;
        match self.family {
            Family::BalancedRTree => write!(f, ",r={}", self.r),
            Family::Gnp => {
                if let Some(p) = self.p {
                    write!(f, ",p={p}")?;
                }
                write!(f, ",seed={}", self.seed)
            }
            _ => Ok(()),
        }
    }
}

fn parse_prob(v: &str) -> Option<f64> {
    match v.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => v.parse().ok(),
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Domain(format!("family spec '{s}': {msg}"));
        let (name, rest) = s.split_once(':').ok_or_else(|| bad("expected name:n".into()))?;
        let family: Family = name.trim().parse()?;
        let mut parts = rest.split(',');
        let n_str = parts.next().unwrap_or("").trim();
        let n = n_str.parse().map_err(|_| bad(format!("size '{n_str}' is not an integer")))?;
        let mut spec = FamilySpec::new(family, n);
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{kv}'")))?;
            let (k, v) = (k.trim(), v.trim());
            match (family, k) {
                (Family::BalancedRTree, "r") => {
                    spec.r = v.parse().map_err(|_| bad(format!("r = '{v}' is not an integer")))?;
                }
                (Family::Gnp, "p") => {
                    spec.p = Some(parse_prob(v).ok_or_else(|| bad(format!("p = '{v}' is not a number")))?);
                }
                (Family::Gnp, "seed") => {
                    spec.seed = v.parse().map_err(|_| bad(format!("seed = '{v}' is not an integer")))?;
                }
                _ => return Err(bad(format!("key '{k}' does not apply to {family}"))),
            }
        }
        Ok(spec)
    }
}

fn clique(vertices: &[usize], edges: &mut Vec<(usize, usize)>) {
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            edges.push((u, v));
        }
    }
}

/// Build the graph a spec describes. Deterministic given the spec.
pub fn gen_family(spec: &FamilySpec) -> Result<Graph> {
    let n = spec.n;
    let family = spec.family;
    if n < family.min_n() {
        return Err(Error::Domain(format!("{family} needs n >= {}, got {n}", family.min_n())));
    }
    let mut edges = Vec::new();
    match family {
        Family::Cycle => edges.extend((0..n).map(|i| (i, (i + 1) % n))),
        Family::Complete => clique(&(0..n).collect::<Vec<_>>(), &mut edges),
        Family::BalancedRTree => {
            if spec.r == 0 {
                return Err(Error::Domain("balanced-r-tree needs r >= 1".into()));
            }
            edges.extend((1..n).map(|i| ((i - 1) / spec.r, i)));
        }
        Family::Barbell => {
            let k = n / 3;
            clique(&(0..k).collect::<Vec<_>>(), &mut edges);
            clique(&(n - k..n).collect::<Vec<_>>(), &mut edges);
            // Path k-1, k, ..., n-k.
            edges.extend((k - 1..n - k).map(|i| (i, i + 1)));
        }
        Family::Necklace => {
            let c = NECKLACE_CLIQUE;
            if n % c != 0 {
                return Err(Error::Domain(format!("necklace needs n divisible by {c}, got {n}")));
            }
            for b in 0..n / c {
                clique(&(b * c..(b + 1) * c).collect::<Vec<_>>(), &mut edges);
                if b > 0 {
                    edges.push((b * c - 1, b * c));
                }
            }
        }
        Family::GluedCliques => {
            let a = (n + 2) / 2;
            clique(&(0..a).collect::<Vec<_>>(), &mut edges);
            let second: Vec<usize> = std::iter::once(0).chain(a..n).collect();
            clique(&second, &mut edges);
        }
        Family::Gnp => return gnp(n, spec.edge_probability(), spec.seed),
    }
    Graph::new(n, &edges)
}

fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("gnp edge probability {p} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GNP_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        if let Some(g) = largest_component(n, &edges)? {
            return Ok(g);
        }
    }
    Err(Error::Graph(format!("gnp({n}, {p}) produced no edges in {GNP_ATTEMPTS} draws")))
}

/// Largest component, relabelled in increasing vertex order; ties go to the
/// component with the smallest vertex. `None` if there is no edge.
fn largest_component(n: usize, edges: &[(usize, usize)]) -> Result<Option<Graph>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    let best = (0..sizes.len()).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).unwrap_or(0);
    if sizes.get(best).copied().unwrap_or(0) < 2 {
        return Ok(None);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if comp[v] == best {
            label[v] = next;
            next += 1;
        }
    }
    let kept: Vec<_> = edges.iter().filter(|&&(u, _)| comp[u] == best).map(|&(u, v)| (label[u], label[v])).collect();
    Graph::new(next, &kept).map(Some)
}

/// A named member of the standard test corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub spec: FamilySpec,
}

impl CorpusEntry {
    /// Corpus chains are lazy: several members are bipartite.
    pub fn chain(&self) -> Result<MarkovChain> {
        self.spec.chain(true)
    }
}

/// Edge probability and seed of the corpus `G(24, p)`: dense enough that
/// the giant component keeps every vertex.
pub const CORPUS_GNP_P: f64 = 0.2;
pub const CORPUS_GNP_SEED: u64 = 3;

/// Triangle, `K_4`, the star `K_{1,3}`, cycles of length 5, 8 and 16,
/// glued cliques on 9 vertices and one seeded `G(24, p)`.
pub fn corpus() -> Vec<CorpusEntry> {
    let entry = |name, family, n| CorpusEntry { name, spec: FamilySpec::new(family, n) };
    vec![
        entry("triangle", Family::Complete, 3),
        entry("k4", Family::Complete, 4),
        CorpusEntry { name: "star", spec: FamilySpec { r: 3, ..FamilySpec::new(Family::BalancedRTree, 4) } },
        entry("cycle5", Family::Cycle, 5),
        entry("cycle8", Family::Cycle, 8),
        entry("cycle16", Family::Cycle, 16),
        entry("glued9", Family::GluedCliques, 9),
        CorpusEntry {
            name: "gnp24",
            spec: FamilySpec { p: Some(CORPUS_GNP_P), seed: CORPUS_GNP_SEED, ..FamilySpec::new(Family::Gnp, 24) },
        },
    ]
}
