//! Subgroups of `Z_N x Z_N`, their fundamental domains and adjoint lattices.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TfError};
use crate::phase_space::{symplectic, PhasePoint};

/// A subgroup of `Z_N x Z_N`, with its elements in sorted order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    n: usize,
    generators: Vec<PhasePoint>,
    elements: Vec<PhasePoint>,
    /// Position of each phase point in `elements`, indexed row-major.
    position: Vec<Option<usize>>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.elements == other.elements
    }
}

impl Eq for Lattice {}

/// JSON layout `{"n": N, "generators": [[k, l], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeRepr {
    pub n: usize,
    pub generators: Vec<[i64; 2]>,
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = TfError;

    fn try_from(r: LatticeRepr) -> Result<Self> {
        if r.n == 0 {
            return Err(TfError::Lattice("N must be positive".into()));
        }
        let gens: Vec<PhasePoint> = r
            .generators
            .iter()
            .map(|g| PhasePoint::new(g[0], g[1], r.n))
            .collect();
        lattice_from_generators(r.n, &gens)
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr {
            n: l.n,
            generators: l.generators.iter().map(|g| [g.k as i64, g.l as i64]).collect(),
        }
    }
}

impl Lattice {
    fn from_membership(n: usize, generators: Vec<PhasePoint>, member: &[bool]) -> Self {
        let mut position = vec![None; n * n];
        let mut elements = Vec::new();
        for (idx, &m) in member.iter().enumerate() {
            if m {
                position[idx] = Some(elements.len());
                elements.push(PhasePoint::from_index(idx, n));
            }
        }
        Lattice { n, generators, elements, position }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PhasePoint] {
        &self.generators
    }

    pub fn elements(&self) -> &[PhasePoint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `s(Lambda) = N^2 / |Lambda|`, an integer by Lagrange's theorem.
    pub fn volume(&self) -> usize {
        self.n * self.n / self.len()
    }

    pub fn contains(&self, z: PhasePoint) -> bool {
        self.position[z.index(self.n)].is_some()
    }

    /// Position of `z` in [`Lattice::elements`].
    pub fn index_of(&self, z: PhasePoint) -> Option<usize> {
        self.position[z.index(self.n)]
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n * self.n
    }
}

/// `a Z_N x b Z_N`; both `a` and `b` must divide `N`.
pub fn separable_lattice(n: usize, a: usize, b: usize) -> Result<Lattice> {
    if n == 0 || a == 0 || b == 0 || !n.is_multiple_of(a) || !n.is_multiple_of(b) {
        return Err(TfError::Lattice(format!(
            "separable lattice needs a | N and b | N (N={n}, a={a}, b={b})"
        )));
    }
    let gens = vec![PhasePoint::new(a as i64, 0, n), PhasePoint::new(0, b as i64, n)];
    lattice_from_generators(n, &gens)
}

/// The subgroup generated by `gens`.
pub fn lattice_from_generators(n: usize, gens: &[PhasePoint]) -> Result<Lattice> {
    if gens.is_empty() {
        return Err(TfError::Lattice("at least one generator is required".into()));
    }
    if n == 0 {
        return Err(TfError::Lattice("N must be positive".into()));
    }
    let gens: Vec<PhasePoint> = gens
        .iter()
        .map(|g| PhasePoint::new(g.k as i64, g.l as i64, n))
        .collect();
    let mut member = vec![false; n * n];
    member[0] = true;
    let mut frontier = vec![PhasePoint::ORIGIN];
    while let Some(z) = frontier.pop() {
        for g in &gens {
            let w = z.add(*g, n);
            if !member[w.index(n)] {
                member[w.index(n)] = true;
                frontier.push(w);
            }
        }
    }
    Ok(Lattice::from_membership(n, gens, &member))
}

/// Greedy generating set for an explicit subgroup given by its sorted elements.
fn minimal_generators(n: usize, elements: &[PhasePoint]) -> Vec<PhasePoint> {
    let mut gens = Vec::new();
    let mut span = lattice_from_generators(n, &[PhasePoint::ORIGIN]).expect("origin");
    for &e in elements {
        if !span.contains(e) {
            gens.push(e);
            span = lattice_from_generators(n, &gens).expect("nonempty");
        }
    }
    if gens.is_empty() {
        gens.push(PhasePoint::ORIGIN);
    }
    gens
}

/// The commutant `{mu : pi(lambda) pi(mu) = pi(mu) pi(lambda) for all lambda}`,
/// found by scanning phase space against the generators.
pub fn adjoint_lattice(lattice: &Lattice) -> Lattice {
    let n = lattice.n;
    let member: Vec<bool> = PhasePoint::all(n)
        .map(|mu| lattice.generators.iter().all(|&g| symplectic(g, mu, n) == 0))
        .collect();
    let elements: Vec<PhasePoint> = PhasePoint::all(n).filter(|z| member[z.index(n)]).collect();
    let gens = minimal_generators(n, &elements);
    Lattice::from_membership(n, gens, &member)
}

/// A fundamental domain `Q` and the induced assignment of phase points to lattice cells.
#[derive(Debug, Clone)]
pub struct CellMap {
    lattice: Lattice,
    /// Coset representatives, in lexicographic order; `Q` itself.
    domain: Vec<PhasePoint>,
    /// For each phase point (row-major) the position of its lattice element.
    owner: Vec<usize>,
}

impl CellMap {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The fundamental domain `Q`.
    pub fn domain(&self) -> &[PhasePoint] {
        &self.domain
    }

    pub fn cell_size(&self) -> usize {
        self.domain.len()
    }

    /// Lattice element whose cell `lambda + Q` contains `z`.
    pub fn representative(&self, z: PhasePoint) -> PhasePoint {
        self.lattice.elements[self.owner[z.index(self.lattice.n)]]
    }

    /// Position (in the lattice's element list) of the cell containing `z`.
    pub fn owner_index(&self, z: PhasePoint) -> usize {
        self.owner[z.index(self.lattice.n)]
    }

    /// Points of the cell `lambda + Q`.
    pub fn cell(&self, lambda: PhasePoint) -> impl Iterator<Item = PhasePoint> + '_ {
        let n = self.lattice.n;
        self.domain.iter().map(move |q| q.add(lambda, n))
    }

    pub fn contains_in_domain(&self, z: PhasePoint) -> bool {
        self.representative(z) == PhasePoint::ORIGIN
    }
}

/// Fundamental domain by greedy lexicographic coset representatives: the
/// smallest unassigned point starts the next coset.
pub fn fundamental_domain(lattice: &Lattice) -> CellMap {
    let n = lattice.n;
    let mut owner = vec![usize::MAX; n * n];
    let mut domain = Vec::new();
    for q in PhasePoint::all(n) {
        if owner[q.index(n)] != usize::MAX {
            continue;
        }
        domain.push(q);
        for (pos, &lambda) in lattice.elements.iter().enumerate() {
            owner[q.add(lambda, n).index(n)] = pos;
        }
    }
    CellMap { lattice: lattice.clone(), domain, owner }
}

/// Every subgroup of `Z_N x Z_N`, deduplicated, sorted by size then elements.
/// Each subgroup of `Z_N^2` is generated by at most two elements.
pub fn enumerate_subgroups(n: usize) -> Vec<Lattice> {
    let mut seen: BTreeSet<Vec<PhasePoint>> = BTreeSet::new();
    let mut out = Vec::new();
    let points: Vec<PhasePoint> = PhasePoint::all(n).collect();
    for (i, &g1) in points.iter().enumerate() {
        for &g2 in &points[i..] {
            let lat = lattice_from_generators(n, &[g1, g2]).expect("nonempty");
            if seen.insert(lat.elements.clone()) {
                out.push(lat);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.elements.cmp(&b.elements)));
    out
}
