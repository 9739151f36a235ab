//! Orbits and stabilizers of pure states under the restricted Clifford
//! group, fixed points of stabilizers, and the minimal-orbit experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::GroupTable;
use crate::designs::{check_2design, DesignReport};
use crate::error::{Error, Result};
use crate::linalg::{intersect_subspaces, normal_eigenspaces, CMatrix};
use crate::scalar::{cone, czero, modulus, tolerance, unit_phase, Real};
use crate::states::{
    canonical_mub, fingerprint, hesse_fiducial, same_state_sets, PureState, StateIndex, StateLabel,
    StateSet,
};

/// `||U psi - lambda psi||` below this counts as fixing `psi`.
pub const STABILIZER_TOL: f64 = 1e-8;
/// Cutoff on `1 - cos^2` of principal angles when intersecting eigenspaces.
pub const INTERSECTION_CUTOFF: f64 = 1e-8;
/// Residual tolerance for the 2-design check of computed orbits.
pub const ORBIT_DESIGN_TOL: f64 = 1e-7;
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Clone, Debug)]
pub struct Orbit<T: Real> {
    pub seed: PureState<T>,
    /// Sorted by fingerprint.
    pub states: Vec<PureState<T>>,
    /// `words[i]` maps the seed to `states[i]`, read as a product of generators.
    pub words: Vec<Vec<u8>>,
    pub group_order: usize,
}

impl<T: Real> Orbit<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn divides_group_order(&self) -> bool {
        !self.states.is_empty() && self.group_order.is_multiple_of(self.states.len())
    }

    pub fn to_state_set(&self, q: usize, provenance: &str) -> StateSet<T> {
        StateSet {
            q,
            field: None,
            states: self.states.clone(),
            labels: self.words.iter().cloned().map(StateLabel::Word).collect(),
            grouping: None,
            provenance: provenance.into(),
        }
    }
}

/// Breadth-first closure of `seed` under `generators`, modulo phase.
///
/// Fails with `BudgetExceeded` once more than `budget` states are found.
pub fn orbit_under<T: Real>(
    seed: &PureState<T>,
    generators: &[CMatrix<T>],
    budget: usize,
) -> Result<Orbit<T>> {
    if let Some(g) = generators.iter().find(|g| g.rows() != seed.dim()) {
        return Err(Error::DimensionMismatch {
            expected: seed.dim(),
            got: g.rows(),
        });
    }
    let mut index = StateIndex::new();
    index.insert(seed);
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let images: Vec<PureState<T>> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let s = &index.states()[i];
                generators
                    .iter()
                    .map(move |g| s.apply(g).expect("unitary preserves the norm"))
            })
            .collect();
        let mut next = Vec::new();
        for (k, img) in images.iter().enumerate() {
            let (j, fresh) = index.insert(img);
            if fresh {
                if index.len() > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                let parent = frontier[k / generators.len()];
                let mut w = Vec::with_capacity(words[parent].len() + 1);
                w.push((k % generators.len()) as u8);
                w.extend_from_slice(&words[parent]);
                words.push(w);
                next.push(j);
            }
        }
        frontier = next;
    }
    let states = index.into_states();
    let keys: Vec<_> = states.iter().map(fingerprint).collect();
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    Ok(Orbit {
        seed: seed.clone(),
        states: order.iter().map(|&i| states[i].clone()).collect(),
        words: order.iter().map(|&i| words[i].clone()).collect(),
        group_order: budget,
    })
}

/// Orbit of `seed` under the group generated by the table's generators.
pub fn orbit<T: Real>(seed: &PureState<T>, g: &GroupTable<T>) -> Result<Orbit<T>> {
    orbit_under(seed, &g.generators, g.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    /// Indices into the group table, ascending.
    pub members: Vec<usize>,
    pub order: usize,
}

impl Stabilizer {
    pub fn is_trivial(&self) -> bool {
        self.order <= 1
    }
}

/// Distance of `u psi` from the ray of `psi`, using the best unit phase.
pub fn fixing_residual<T: Real>(u: &CMatrix<T>, psi: &PureState<T>) -> T {
    let v = u.matvec(psi.amplitudes());
    let overlap = psi
        .amplitudes()
        .iter()
        .zip(&v)
        .fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
    let lambda = if modulus(overlap) > T::zero() {
        unit_phase(overlap)
    } else {
        cone()
    };
    v.iter()
        .zip(psi.amplitudes())
        .map(|(&x, &y)| (x - lambda * y).norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// All table elements fixing `s` up to phase.
pub fn stabilizer<T: Real>(s: &PureState<T>, g: &GroupTable<T>) -> Stabilizer {
    let tol = tolerance::<T>(STABILIZER_TOL);
    let members: Vec<usize> = g
        .elements
        .par_iter()
        .enumerate()
        .filter(|(_, e)| fixing_residual(&e.unitary, s) <= tol)
        .map(|(i, _)| i)
        .collect();
    Stabilizer {
        order: members.len(),
        members,
    }
}

#[derive(Clone, Debug)]
pub struct FixedPoints<T: Real> {
    /// States spanning a one-dimensional joint eigenspace.
    pub isolated: Vec<PureState<T>>,
    /// Dimensions of joint eigenspaces of dimension two or more; every state in
    /// such a subspace is fixed.
    pub subspaces: Vec<usize>,
}

impl<T: Real> FixedPoints<T> {
    pub fn to_state_set(&self, q: usize) -> StateSet<T> {
        StateSet::flat(q, self.isolated.clone(), "fixed points")
    }
}

/// Joint eigenspaces of a set of unitaries: each candidate subspace is
/// intersected with every eigenspace of the next operator.
pub fn fixed_points_of<T: Real>(ops: &[&CMatrix<T>]) -> Result<FixedPoints<T>> {
    let d = ops
        .first()
        .map(|u| u.rows())
        .ok_or(Error::TrivialStabilizer)?;
    let eig_tol = tolerance::<T>(crate::states::EIGEN_TOL);
    let cutoff = tolerance::<T>(INTERSECTION_CUTOFF);
    let fix_tol = tolerance::<T>(STABILIZER_TOL);
    let mut candidates = vec![CMatrix::<T>::identity(d)];
    for u in ops {
        let (lines, spaces): (Vec<_>, Vec<_>) = candidates.into_iter().partition(|c| c.cols() == 1);
        // lines only need a membership test
        let mut next: Vec<CMatrix<T>> = lines
            .into_iter()
            .filter(|c| {
                let psi = PureState::new(c.column(0)).expect("unit column");
                fixing_residual(u, &psi) <= fix_tol
            })
            .collect();
        if !spaces.is_empty() {
            let eigen = normal_eigenspaces(u, eig_tol);
            for v in spaces {
                for e in &eigen {
                    if let Some(w) = intersect_subspaces(&v, &e.basis, cutoff) {
                        next.push(w);
                    }
                }
            }
        }
        candidates = next;
    }
    let mut isolated = Vec::new();
    let mut subspaces = Vec::new();
    for c in candidates {
        if c.cols() == 1 {
            isolated.push(PureState::new(c.column(0))?);
        } else {
            subspaces.push(c.cols());
        }
    }
    isolated.sort_by_key(fingerprint);
    subspaces.sort_unstable();
    Ok(FixedPoints {
        isolated,
        subspaces,
    })
}

/// Fixed points of a stabilizer subgroup; the trivial subgroup is rejected.
pub fn fixed_points<T: Real>(h: &Stabilizer, g: &GroupTable<T>) -> Result<FixedPoints<T>> {
    if h.is_trivial() {
        return Err(Error::TrivialStabilizer);
    }
    let id = g.identity_index();
    let ops: Vec<&CMatrix<T>> = h
        .members
        .iter()
        .filter(|&&i| i != id)
        .map(|&i| &g.elements[i].unitary)
        .collect();
    fixed_points_of(&ops)
}

/// Whether the stabilizer of an orbit state fixes no pure state outside the
/// orbit. One representative suffices since the group acts transitively.
///
/// The residual is the largest infidelity between an isolated fixed point and
/// its nearest orbit state, or 1 if a fixed subspace of dimension > 1 exists.
pub fn highly_symmetric_check<T: Real>(
    o: &Orbit<T>,
    g: &GroupTable<T>,
    tol: f64,
) -> Result<DesignReport> {
    let rep = o.states.first().ok_or(Error::ZeroState)?;
    let stab = stabilizer(rep, g);
    let mut report = DesignReport {
        test: "highly_symmetric".into(),
        pass: true,
        residual: 0.0,
        tolerance: tol,
        metrics: Default::default(),
        flags: Vec::new(),
        details: Vec::new(),
    };
    report.metrics.insert("orbit_size".into(), o.len() as f64);
    report
        .metrics
        .insert("stabilizer_order".into(), stab.order as f64);
    if stab.is_trivial() {
        report.flags.push("trivial stabilizer".into());
        return Ok(report);
    }
    let fixed = fixed_points(&stab, g)?;
    report
        .metrics
        .insert("isolated_fixed_points".into(), fixed.isolated.len() as f64);
    let mut residual = 0.0f64;
    for (k, s) in fixed.isolated.iter().enumerate() {
        let best = o
            .states
            .par_iter()
            .map(|t| t.overlap(s).as_f64())
            .reduce(|| 0.0, f64::max);
        let miss = 1.0 - best;
        if miss > tol {
            report.details.push(format!(
                "fixed point {k} lies outside the orbit (best fidelity {best})"
            ));
        }
        residual = residual.max(miss);
    }
    if !fixed.subspaces.is_empty() {
        residual = residual.max(1.0);
        report.details.push(format!(
            "fixed subspaces of dimension {:?}",
            fixed.subspaces
        ));
    }
    report.residual = residual;
    report.pass = residual <= tol;
    Ok(report)
}

/// Haar-random state from a named, seeded generator.
pub fn seeded_random_state<T: Real>(dim: usize, rng_seed: u64) -> PureState<T> {
    PureState::random(dim, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub q: usize,
    pub seed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub group_order: usize,
    pub size: usize,
    pub divides_group_order: bool,
    pub stabilizer_order: usize,
    pub orbit_stabilizer_holds: bool,
    pub design2: DesignReport,
    pub highly_symmetric: DesignReport,
}

impl OrbitReport {
    pub fn pass(&self) -> bool {
        self.divides_group_order
            && self.orbit_stabilizer_holds
            && self.design2.pass
            && self.highly_symmetric.pass
    }
}

/// Orbit of `seed` with its stabilizer, 2-design and highly-symmetric checks.
pub fn orbit_report<T: Real>(
    name: &str,
    seed: &PureState<T>,
    g: &GroupTable<T>,
    rng_seed: Option<u64>,
) -> Result<(Orbit<T>, OrbitReport)> {
    let q = g.dim();
    let o = orbit(seed, g)?;
    let stab = stabilizer(seed, g);
    let design2 = check_2design(&o.to_state_set(q, name), ORBIT_DESIGN_TOL)?;
    let highly_symmetric = highly_symmetric_check(&o, g, crate::designs::DEFAULT_TOL)?;
    let report = OrbitReport {
        q,
        seed: name.into(),
        rng: rng_seed.map(|_| RNG_NAME.to_string()),
        rng_seed,
        group_order: g.len(),
        size: o.len(),
        divides_group_order: o.divides_group_order(),
        stabilizer_order: stab.order,
        orbit_stabilizer_holds: o.len() * stab.order == g.len(),
        design2,
        highly_symmetric,
    };
    Ok((o, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub seed: String,
    pub size: usize,
    pub stabilizer_order: usize,
    pub divides_group_order: bool,
    pub orbit_stabilizer_holds: bool,
    pub design2_residual: f64,
    pub design2_pass: bool,
}

fn summarize<T: Real>(
    name: String,
    o: &Orbit<T>,
    g: &GroupTable<T>,
    q: usize,
) -> Result<OrbitSummary> {
    let stab = stabilizer(&o.seed, g);
    let design = check_2design(&o.to_state_set(q, &name), ORBIT_DESIGN_TOL)?;
    Ok(OrbitSummary {
        seed: name,
        size: o.len(),
        stabilizer_order: stab.order,
        divides_group_order: o.divides_group_order(),
        orbit_stabilizer_holds: o.len() * stab.order == g.len(),
        design2_residual: design.residual,
        design2_pass: design.pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub q: usize,
    pub group_order: usize,
    pub rng: String,
    pub rng_seed: u64,
    pub samples: usize,
    pub mub_orbit: OrbitSummary,
    pub mub_orbit_equals_canonical_mub: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hesse_orbit: Option<OrbitSummary>,
    pub random_orbits: Vec<OrbitSummary>,
    pub smallest_random_orbit: Option<usize>,
    pub random_exceed_mub_size: bool,
    pub random_exceed_q_squared: bool,
    pub all_sizes_divide_group_order: bool,
    pub all_orbit_stabilizer: bool,
    pub all_design2: bool,
    pub pass: bool,
    pub note: String,
}

/// Constructive and sampled evidence for the minimal orbit: the canonical MUB
/// (and the Hesse SIC at q = 3) against orbits of Haar-random seeds.
pub fn theorem1_experiment<T: Real>(
    g: &GroupTable<T>,
    samples: usize,
    rng_seed: u64,
) -> Result<Theorem1Report> {
    let q = g.dim();
    let mub = canonical_mub(g.hw())?;
    let mub_orbit = orbit(&mub.states[0], g)?;
    let mub_equal = same_state_sets(&mub_orbit.states, &mub.states);
    let mub_summary = summarize("mub0".into(), &mub_orbit, g, q)?;

    let hesse_summary = if q == 3 {
        let o = orbit(&hesse_fiducial(), g)?;
        Some(summarize("hesse".into(), &o, g, q)?)
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let seeds: Vec<PureState<T>> = (0..samples)
        .map(|_| PureState::random(q, &mut rng))
        .collect();
    let mut random = Vec::with_capacity(samples);
    for (k, s) in seeds.iter().enumerate() {
        let o = orbit(s, g)?;
        random.push(summarize(format!("haar{k}"), &o, g, q)?);
    }

    let mub_size = q * (q + 1);
    let all: Vec<&OrbitSummary> = std::iter::once(&mub_summary)
        .chain(hesse_summary.iter())
        .chain(random.iter())
        .collect();
    let random_exceed_mub_size = random.iter().all(|r| r.size > mub_size);
    let random_exceed_q_squared = random.iter().all(|r| r.size > q * q);
    let all_sizes_divide_group_order = all.iter().all(|r| r.divides_group_order);
    let all_orbit_stabilizer = all.iter().all(|r| r.orbit_stabilizer_holds);
    let all_design2 = all.iter().all(|r| r.design2_pass);
    let hesse_ok = hesse_summary.as_ref().is_none_or(|h| h.size == 9);
    let pass = mub_summary.size == mub_size
        && mub_equal
        && hesse_ok
        && random_exceed_mub_size
        && random_exceed_q_squared
        && all_sizes_divide_group_order
        && all_orbit_stabilizer
        && all_design2;
    Ok(Theorem1Report {
        q,
        group_order: g.len(),
        rng: RNG_NAME.into(),
        rng_seed,
        samples,
        smallest_random_orbit: random.iter().map(|r| r.size).min(),
        mub_orbit: mub_summary,
        mub_orbit_equals_canonical_mub: mub_equal,
        hesse_orbit: hesse_summary,
        random_orbits: random,
        random_exceed_mub_size,
        random_exceed_q_squared,
        all_sizes_divide_group_order,
        all_orbit_stabilizer,
        all_design2,
        pass,
        note: "Sampled evidence, not a proof: the known minimal orbits are computed exactly, and random seeds only show that typical orbits are larger.".into(),
    })
}
