//! XYZ ring with an odd number of sites and a uniform field along z:
//! H = Σ_n Σ_α J_α σ^α_n σ^α_{n+1} + h Σ_n σᶻ_n, site L+1 ≡ site 1.
//!
//! In the σᶻ basis H is real symmetric. A bond flips both of its bits
//! with amplitude Jx − Jy when they are equal and Jx + Jy otherwise; the
//! σᶻσᶻ and field terms are diagonal.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpairs, LanczosConfig};
use crate::sector::{SectorHamiltonian, TranslationOrbits};
use crate::state::{
    check_odd, parity_sign, rotate_bits, MomentumIndex, StateVector, C64, EIGENSTATE_TOL,
};

pub const LANCZOS_CAP: usize = 17;
pub const DENSE_CAP: usize = 11;
/// Levels closer than this times max(1, |E₀|) are one degenerate cluster.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    n_sites: usize,
    jx: f64,
    jy: f64,
    jz: f64,
    h: f64,
}

impl ChainParams {
    pub fn new(n_sites: usize, jx: f64, jy: f64, jz: f64, h: f64) -> Result<Self> {
        check_odd(n_sites)?;
        if n_sites < 3 {
            return Err(Error::OutOfRange(format!(
                "the ring needs at least 3 sites, got {n_sites}"
            )));
        }
        if ![jx, jy, jz, h].iter().all(|v| v.is_finite()) {
            return Err(Error::OutOfRange("couplings must be finite".into()));
        }
        if jy.abs() >= 1.0 || jz.abs() >= 1.0 {
            return Err(Error::OutOfRange(format!(
                "|Jy| and |Jz| must be below 1, got Jy = {jy}, Jz = {jz}"
            )));
        }
        Ok(Self {
            n_sites,
            jx,
            jy,
            jz,
            h,
        })
    }

    /// Jx = 1.
    pub fn frustrated(n_sites: usize, jy: f64, jz: f64, h: f64) -> Result<Self> {
        Self::new(n_sites, 1.0, jy, jz, h)
    }

    /// Jx = 1, Jy = Jz = h = 0.
    pub fn classical(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn with_field(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
    pub fn jx(&self) -> f64 {
        self.jx
    }
    pub fn jy(&self) -> f64 {
        self.jy
    }
    pub fn jz(&self) -> f64 {
        self.jz
    }
    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Jx → −Jx, Jy → −Jy.
pub fn nonfrustrated_counterpart(params: &ChainParams) -> ChainParams {
    ChainParams {
        jx: -params.jx,
        jy: -params.jy,
        ..*params
    }
}

#[derive(Debug, Clone)]
pub struct XyzHamiltonian {
    params: ChainParams,
    diag: Vec<f64>,
    /// (both-bit mask, first bit)
    bonds: Vec<(usize, usize)>,
}

impl XyzHamiltonian {
    pub fn new(params: ChainParams) -> Self {
        let n = params.n_sites;
        let bonds: Vec<(usize, usize)> = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                ((1 << i) | (1 << j), i)
            })
            .collect();
        let diag = (0..1usize << n)
            .map(|s| {
                let zz: f64 = bonds
                    .iter()
                    .map(|&(m, _)| if (s & m).count_ones() == 1 { -1.0 } else { 1.0 })
                    .sum();
                let z = n as f64 - 2.0 * s.count_ones() as f64;
                params.jz * zz + params.h * z
            })
            .collect();
        Self {
            params,
            diag,
            bonds,
        }
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    fn flip_amplitude(&self, s: usize, mask: usize) -> f64 {
        if (s & mask).count_ones() == 1 {
            self.params.jx + self.params.jy
        } else {
            self.params.jx - self.params.jy
        }
    }

    /// y = H x.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.par_iter_mut()
            .enumerate()
            .with_min_len(1 << 12)
            .for_each(|(s, out)| {
                let mut acc = x[s] * self.diag[s];
                for &(m, _) in &self.bonds {
                    acc += x[s ^ m] * self.flip_amplitude(s, m);
                }
                *out = acc;
            });
    }

    /// Nonzero entries (s', H_{s',s}) of column s.
    pub fn column(&self, s: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        out.push((s, self.diag[s]));
        for &(m, _) in &self.bonds {
            out.push((s ^ m, self.flip_amplitude(s, m)));
        }
    }

    /// Real symmetric block on basis states with Πᶻ = `parity`, plus the
    /// basis states themselves in block order.
    fn parity_block(&self, parity: f64) -> (DMatrix<f64>, Vec<usize>) {
        let states: Vec<usize> = (0..self.dim())
            .filter(|&s| parity_sign(s) == parity)
            .collect();
        let mut pos = vec![usize::MAX; self.dim()];
        for (i, &s) in states.iter().enumerate() {
            pos[s] = i;
        }
        let k = states.len();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for (i, &s) in states.iter().enumerate() {
            m[(i, i)] = self.diag[s];
            for &(b, _) in &self.bonds {
                m[(pos[s ^ b], i)] += self.flip_amplitude(s, b);
            }
        }
        (m, states)
    }
}

/// H|ψ⟩ as raw (unnormalized) amplitudes.
pub fn hamiltonian_matvec(params: &ChainParams, state: &StateVector) -> Result<Vec<C64>> {
    if state.n_sites() != params.n_sites {
        return Err(Error::LengthMismatch {
            expected: params.n_sites,
            got: state.n_sites(),
        });
    }
    let h = XyzHamiltonian::new(*params);
    let mut out = vec![C64::new(0.0, 0.0); h.dim()];
    h.apply(state.amplitudes(), &mut out);
    Ok(out)
}

/// ⟨ψ|H|ψ⟩.
pub fn energy(params: &ChainParams, state: &StateVector) -> Result<f64> {
    let hv = hamiltonian_matvec(params, state)?;
    Ok(state
        .amplitudes()
        .iter()
        .zip(&hv)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re)
}

/// One eigenstate with definite momentum and Πᶻ.
#[derive(Debug, Clone)]
pub struct Level {
    pub energy: f64,
    pub state: StateVector,
    pub momentum: MomentumIndex,
    /// Πᶻ eigenvalue, ±1.
    pub parity: i8,
}

fn sort_levels(levels: &mut [Level]) {
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.momentum.ell().cmp(&b.momentum.ell()))
            .then(a.parity.cmp(&b.parity))
    });
}

pub fn degeneracy_tol(e0: f64) -> f64 {
    DEGENERACY_REL_TOL * e0.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct GroundManifold {
    levels: Vec<Level>,
}

impl GroundManifold {
    /// Keeps the levels within the degeneracy tolerance of the lowest one.
    pub fn from_levels(mut levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::OutOfRange(
                "no levels to form a ground manifold".into(),
            ));
        }
        sort_levels(&mut levels);
        let e0 = levels[0].energy;
        let tol = degeneracy_tol(e0);
        levels.retain(|l| l.energy - e0 < tol);
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn ground_energy(&self) -> f64 {
        self.levels[0].energy
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn momenta(&self) -> Vec<MomentumIndex> {
        self.levels.iter().map(|l| l.momentum).collect()
    }

    pub fn degeneracy(&self) -> usize {
        self.levels.len()
    }

    pub fn is_unique_zero_momentum(&self) -> bool {
        self.degeneracy() == 1 && self.levels[0].momentum.ell() == 0
    }

    /// The level with the smallest ℓ ≥ 0, preferring Πᶻ = +1; the state
    /// used when one member of the manifold is needed.
    pub fn representative(&self) -> &Level {
        self.levels
            .iter()
            .filter(|l| l.momentum.ell() >= 0)
            .min_by(|a, b| {
                a.momentum
                    .ell()
                    .cmp(&b.momentum.ell())
                    .then(b.parity.cmp(&a.parity))
                    .then(a.energy.total_cmp(&b.energy))
            })
            .unwrap_or(&self.levels[0])
    }
}

/// Momentum- and parity-resolved low-energy eigensolver.
pub trait SpectrumSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Lowest `count` levels in ascending energy.
    fn lowest_levels(&self, params: &ChainParams, count: usize) -> Result<Vec<Level>>;

    fn ground_manifold(&self, params: &ChainParams) -> Result<GroundManifold>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Sector {
    ell: i64,
    parity: i8,
}

fn sectors(n_sites: usize) -> Vec<Sector> {
    let half = (n_sites as i64 - 1) / 2;
    (0..=half)
        .flat_map(|ell| {
            [1i8, -1]
                .into_iter()
                .map(move |parity| Sector { ell, parity })
        })
        .collect()
}

/// ½(1 + πΠᶻ) followed by (1/L) Σ_m e^{ipm} Tᵐ.
fn project_sector(v: &mut [C64], n_sites: usize, sector: Sector) {
    let pf = sector.parity as f64;
    for (s, x) in v.iter_mut().enumerate() {
        if parity_sign(s) != pf {
            *x = C64::new(0.0, 0.0);
        }
    }
    let p = 2.0 * std::f64::consts::PI * sector.ell as f64 / n_sites as f64;
    let phases: Vec<C64> = (0..n_sites)
        .map(|m| C64::from_polar(1.0 / n_sites as f64, p * m as f64))
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (s, &x) in v.iter().enumerate() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for (m, ph) in phases.iter().enumerate() {
            out[rotate_bits(s, m, n_sites)] += ph * x;
        }
    }
    v.copy_from_slice(&out);
}

/// Lanczos on full-length vectors, re-projected onto the sector after
/// every product.
#[derive(Debug, Clone, Default)]
pub struct FullSpaceLanczos {
    pub config: LanczosConfig,
}

fn check_lanczos_cap(params: &ChainParams) -> Result<()> {
    if params.n_sites > LANCZOS_CAP {
        return Err(Error::SizeCap {
            what: "the iterative eigensolver",
            n_sites: params.n_sites,
            cap: LANCZOS_CAP,
        });
    }
    Ok(())
}

fn sector_seed(base: u64, sector: Sector) -> u64 {
    base.wrapping_add(2 * sector.ell as u64 + (sector.parity == 1) as u64)
}

fn random_start(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect()
}

/// Adds the −ℓ partner (complex conjugate) of every ℓ > 0 level.
fn with_partners(
    sector: Sector,
    n_sites: usize,
    values: Vec<(f64, StateVector)>,
) -> Result<Vec<Level>> {
    let ell = MomentumIndex::new(sector.ell, n_sites)?;
    let mut out = Vec::new();
    for (energy, state) in values {
        if sector.ell != 0 {
            out.push(Level {
                energy,
                state: state.conjugated(),
                momentum: ell.negated(),
                parity: sector.parity,
            });
        }
        out.push(Level {
            energy,
            state,
            momentum: ell,
            parity: sector.parity,
        });
    }
    Ok(out)
}

fn collect_sorted(per_sector: Vec<Result<Vec<Level>>>) -> Result<Vec<Level>> {
    let mut levels = Vec::new();
    for r in per_sector {
        levels.extend(r?);
    }
    sort_levels(&mut levels);
    Ok(levels)
}

impl FullSpaceLanczos {
    pub fn new(config: LanczosConfig) -> Self {
        Self { config }
    }

    /// Lowest `nev` levels of every sector with ℓ ≥ 0; −ℓ partners are the
    /// complex conjugates, since H is real.
    fn sector_levels(&self, params: &ChainParams, nev: usize) -> Result<Vec<Level>> {
        check_lanczos_cap(params)?;
        let n = params.n_sites;
        let ham = XyzHamiltonian::new(*params);
        let per_sector: Vec<Result<Vec<Level>>> = sectors(n)
            .into_par_iter()
            .map(|sector| {
                let start = random_start(ham.dim(), sector_seed(self.config.seed, sector));
                let pairs = lowest_eigenpairs(
                    nev,
                    start,
                    |x, y| ham.apply(x, y),
                    |v| project_sector(v, n, sector),
                    &self.config,
                )?;
                let values = pairs
                    .into_iter()
                    .map(|p| Ok((p.value, StateVector::from_amplitudes(n, p.vector)?)))
                    .collect::<Result<Vec<_>>>()?;
                with_partners(sector, n, values)
            })
            .collect();
        collect_sorted(per_sector)
    }
}

/// Lanczos on each sector's translation-orbit basis (dimension about
/// 2^L / 2L). Same sectors and seeds as [`FullSpaceLanczos`].
#[derive(Debug, Clone, Default)]
pub struct LanczosSolver {
    pub config: LanczosConfig,
}

impl LanczosSolver {
    pub fn new(config: LanczosConfig) -> Self {
        Self { config }
    }

    fn sector_levels(&self, params: &ChainParams, nev: usize) -> Result<Vec<Level>> {
        check_lanczos_cap(params)?;
        let n = params.n_sites;
        let ham = XyzHamiltonian::new(*params);
        let orbits = TranslationOrbits::new(n);
        let per_sector: Vec<Result<Vec<Level>>> = sectors(n)
            .into_par_iter()
            .map(|sector| {
                let ell = MomentumIndex::new(sector.ell, n)?;
                let block = SectorHamiltonian::build(&orbits, ell, sector.parity, |s, out| {
                    ham.column(s, out)
                });
                if block.dim() == 0 {
                    return Ok(Vec::new());
                }
                let start = random_start(block.dim(), sector_seed(self.config.seed, sector));
                let pairs =
                    lowest_eigenpairs(nev, start, |x, y| block.apply(x, y), |_| {}, &self.config)?;
                let values = pairs
                    .into_iter()
                    .map(|p| Ok((p.value, block.lift(&p.vector)?)))
                    .collect::<Result<Vec<_>>>()?;
                with_partners(sector, n, values)
            })
            .collect();
        collect_sorted(per_sector)
    }
}

impl SpectrumSolver for LanczosSolver {
    fn name(&self) -> &'static str {
        "lanczos"
    }

    fn lowest_levels(&self, params: &ChainParams, count: usize) -> Result<Vec<Level>> {
        let mut levels = self.sector_levels(params, count)?;
        levels.truncate(count);
        Ok(levels)
    }

    fn ground_manifold(&self, params: &ChainParams) -> Result<GroundManifold> {
        GroundManifold::from_levels(self.sector_levels(params, 1)?)
    }
}

impl SpectrumSolver for FullSpaceLanczos {
    fn name(&self) -> &'static str {
        "lanczos-full"
    }

    fn lowest_levels(&self, params: &ChainParams, count: usize) -> Result<Vec<Level>> {
        let mut levels = self.sector_levels(params, count)?;
        levels.truncate(count);
        Ok(levels)
    }

    fn ground_manifold(&self, params: &ChainParams) -> Result<GroundManifold> {
        GroundManifold::from_levels(self.sector_levels(params, 1)?)
    }
}

/// Full diagonalization of the two Πᶻ blocks. Oracle for small rings.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSolver;

/// Generic weight mixing the cosine and sine parts of the translation
/// eigenvalue so distinct momenta get distinct Hermitian eigenvalues.
const MOMENTUM_MIX: f64 = 0.577_215_664_901_532_9;

/// Rotates an orthonormal set spanning a translation-invariant subspace
/// onto translation eigenstates.
fn resolve_momenta(vectors: Vec<StateVector>) -> Result<Vec<(StateVector, MomentumIndex)>> {
    let k = vectors.len();
    let n = vectors[0].n_sites();
    let shifted: Vec<StateVector> = vectors.iter().map(|v| v.translate(1)).collect();
    let mut u = DMatrix::<C64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            u[(i, j)] = vectors[i].inner(&shifted[j])?;
        }
    }
    let ud = u.adjoint();
    let a = (&u + &ud) * C64::new(0.5, 0.0) + (&u - &ud) * C64::new(0.0, -0.5 * MOMENTUM_MIX);
    let eig = SymmetricEigen::new(a);
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for (j, v) in vectors.iter().enumerate() {
            let y = eig.eigenvectors[(j, c)];
            for (o, x) in amps.iter_mut().zip(v.amplitudes()) {
                *o += y * x;
            }
        }
        let state = StateVector::from_amplitudes(n, amps)?;
        let ell = state.measure_momentum(EIGENSTATE_TOL)?;
        out.push((state, ell));
    }
    Ok(out)
}

impl DenseSolver {
    /// At least `count` lowest levels; a degenerate cluster straddling the
    /// cut is included whole.
    fn levels(&self, params: &ChainParams, count: usize) -> Result<Vec<Level>> {
        let n = params.n_sites;
        if n > DENSE_CAP {
            return Err(Error::SizeCap {
                what: "the dense eigensolver",
                n_sites: n,
                cap: DENSE_CAP,
            });
        }
        let ham = XyzHamiltonian::new(*params);
        let mut raw: Vec<(f64, i8, Vec<C64>)> = Vec::new();
        for parity in [1i8, -1] {
            let (block, states) = ham.parity_block(parity as f64);
            let eig = SymmetricEigen::new(block);
            for (c, &e) in eig.eigenvalues.iter().enumerate() {
                let mut amps = vec![C64::new(0.0, 0.0); ham.dim()];
                for (i, &s) in states.iter().enumerate() {
                    amps[s] = C64::new(eig.eigenvectors[(i, c)], 0.0);
                }
                raw.push((e, parity, amps));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let count = count.min(raw.len()).max(1);
        let cut = raw[count - 1].0 + degeneracy_tol(raw[0].0);
        raw.retain(|r| r.0 < cut);

        // cluster within each parity block, then fix momenta
        let tol = degeneracy_tol(raw[0].0);
        let mut clusters: BTreeMap<(i8, usize), Vec<(f64, Vec<C64>)>> = BTreeMap::new();
        let mut anchors: Vec<(i8, f64, usize)> = Vec::new();
        for (e, parity, amps) in raw {
            let id = match anchors
                .iter()
                .find(|(p, e0, _)| *p == parity && (e - e0).abs() < tol)
            {
                Some(&(_, _, id)) => id,
                None => {
                    anchors.push((parity, e, anchors.len()));
                    anchors.len() - 1
                }
            };
            clusters.entry((parity, id)).or_default().push((e, amps));
        }
        let mut levels = Vec::new();
        for ((parity, _), members) in clusters {
            let energies: Vec<f64> = members.iter().map(|m| m.0).collect();
            let vectors = members
                .into_iter()
                .map(|(_, a)| StateVector::from_amplitudes(n, a))
                .collect::<Result<Vec<_>>>()?;
            let mean = energies.iter().sum::<f64>() / energies.len() as f64;
            for (state, momentum) in resolve_momenta(vectors)? {
                levels.push(Level {
                    energy: if energies.len() == 1 {
                        energies[0]
                    } else {
                        mean
                    },
                    state,
                    momentum,
                    parity,
                });
            }
        }
        sort_levels(&mut levels);
        Ok(levels)
    }
}

impl SpectrumSolver for DenseSolver {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn lowest_levels(&self, params: &ChainParams, count: usize) -> Result<Vec<Level>> {
        let mut levels = self.levels(params, count)?;
        levels.truncate(count);
        Ok(levels)
    }

    fn ground_manifold(&self, params: &ChainParams) -> Result<GroundManifold> {
        GroundManifold::from_levels(self.levels(params, 1)?)
    }
}

pub fn solver_names() -> &'static [&'static str] {
    &["lanczos", "lanczos-full", "dense"]
}

pub fn solver_by_name(name: &str) -> Result<Box<dyn SpectrumSolver>> {
    match name {
        "lanczos" => Ok(Box::new(LanczosSolver::default())),
        "lanczos-full" => Ok(Box::new(FullSpaceLanczos::default())),
        "dense" => Ok(Box::new(DenseSolver)),
        _ => Err(Error::UnknownName {
            kind: "eigensolver",
            name: name.to_string(),
        }),
    }
}

/// Lowest `count` momentum-resolved levels from the iterative solver.
pub fn lowest_eigs(params: &ChainParams, count: usize) -> Result<Vec<Level>> {
    LanczosSolver::default().lowest_levels(params, count)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HstarOptions {
    /// Bracket width at which bisection stops.
    pub tol: f64,
    /// Top of the search range; the ground state here must be the unique
    /// zero-momentum one.
    pub h_max: f64,
    /// Downward scan step used to find the highest crossing.
    pub scan_step: f64,
}

impl Default for HstarOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            h_max: 2.0,
            scan_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HstarStatus {
    Found,
    /// Jz < −Jy.
    NoFinitePhase,
    /// The ground state stays unique with zero momentum down to h = 0.
    NoCrossing,
}

impl HstarStatus {
    pub fn name(self) -> &'static str {
        match self {
            HstarStatus::Found => "found",
            HstarStatus::NoFinitePhase => "no_finite_momentum_phase",
            HstarStatus::NoCrossing => "no_crossing",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HstarResult {
    pub jy: f64,
    pub jz: f64,
    pub n_sites: usize,
    pub hstar: f64,
    pub bracket_width: f64,
    pub status: HstarStatus,
    /// Ground manifold at the upper bracket end.
    pub above: Option<GroundManifold>,
    /// Ground manifold at the lower bracket end.
    pub below: Option<GroundManifold>,
    pub evaluations: usize,
}

fn finite_momentum_phase(m: &GroundManifold) -> bool {
    !m.is_unique_zero_momentum()
}

/// Highest field at which the ground state stops being the unique ℓ = 0
/// state. The range [0, h_max] is scanned downward in `scan_step` steps to
/// the first change, which is then bisected; crossings further down are
/// not examined.
pub fn find_hstar(
    jy: f64,
    jz: f64,
    n_sites: usize,
    opts: &HstarOptions,
    solver: &dyn SpectrumSolver,
) -> Result<HstarResult> {
    if !(opts.tol > 0.0 && opts.scan_step > 0.0 && opts.h_max > 0.0) {
        return Err(Error::OutOfRange(
            "tol, scan step and h_max must be positive".into(),
        ));
    }
    let base = ChainParams::frustrated(n_sites, jy, jz, 0.0)?;
    let mut result = HstarResult {
        jy,
        jz,
        n_sites,
        hstar: 0.0,
        bracket_width: 0.0,
        status: HstarStatus::NoFinitePhase,
        above: None,
        below: None,
        evaluations: 0,
    };
    if jz < -jy {
        return Ok(result);
    }
    let mut eval = |h: f64| -> Result<GroundManifold> {
        result.evaluations += 1;
        solver.ground_manifold(&base.with_field(h))
    };

    let mut hi = opts.h_max;
    let mut m_hi = eval(hi)?;
    if finite_momentum_phase(&m_hi) {
        return Err(Error::Bracket(format!(
            "ground state at h_max = {hi} is not the unique zero-momentum state"
        )));
    }
    let mut k = 1u32;
    let (mut lo, mut m_lo) = loop {
        let h = (opts.h_max - k as f64 * opts.scan_step).max(0.0);
        let m = eval(h)?;
        if finite_momentum_phase(&m) {
            break (h, m);
        }
        if h == 0.0 {
            result.status = HstarStatus::NoCrossing;
            result.above = Some(m);
            return Ok(result);
        }
        hi = h;
        m_hi = m;
        k += 1;
    };
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        let m = eval(mid)?;
        if finite_momentum_phase(&m) {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
    result.hstar = 0.5 * (lo + hi);
    result.bracket_width = hi - lo;
    result.status = HstarStatus::Found;
    result.above = Some(m_hi);
    result.below = Some(m_lo);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{build_kink, KinkLabel};
    use crate::state::ParityAxis;

    fn random(l: usize, seed: u64) -> StateVector {
        StateVector::random(l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn params() -> ChainParams {
        ChainParams::new(5, 0.8, 0.33, -0.2, 0.37).unwrap()
    }

    fn diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn parameter_validation() {
        assert!(ChainParams::new(4, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ChainParams::new(1, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ChainParams::new(5, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ChainParams::new(5, 1.0, 0.0, -1.2, 0.0).is_err());
        assert!(ChainParams::new(5, 1.0, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn counterpart_flips_signs() {
        let p = ChainParams::frustrated(7, 0.33, 0.0, 0.4).unwrap();
        let q = nonfrustrated_counterpart(&p);
        assert_eq!((q.jx(), q.jy(), q.jz(), q.h()), (-1.0, -0.33, 0.0, 0.4));
        assert_eq!(nonfrustrated_counterpart(&q), p);
    }

    #[test]
    fn kinks_at_classical_point() {
        let p = ChainParams::classical(5).unwrap();
        for label in KinkLabel::all(5) {
            let k = build_kink(5, label).unwrap();
            let hk = hamiltonian_matvec(&p, &k).unwrap();
            let want: Vec<C64> = k.amplitudes().iter().map(|a| a * -3.0).collect();
            assert!(diff(&hk, &want) < 1e-12);
        }
    }

    #[test]
    fn matches_pauli_definition() {
        // ⟨ψ|H|ψ⟩ from single-bond Pauli expectations
        use crate::state::PauliAxis;
        let p = params();
        let s = random(5, 3);
        let mut e = 0.0;
        for n in 1..=5 {
            let m = n % 5 + 1;
            for (axis, j) in [
                (PauliAxis::X, p.jx()),
                (PauliAxis::Y, p.jy()),
                (PauliAxis::Z, p.jz()),
            ] {
                let t = s
                    .apply_pauli(s.site(m).unwrap(), axis)
                    .unwrap()
                    .apply_pauli(s.site(n).unwrap(), axis)
                    .unwrap();
                e += j * s.inner(&t).unwrap().re;
            }
            let z = s.apply_pauli(s.site(n).unwrap(), PauliAxis::Z).unwrap();
            e += p.h() * s.inner(&z).unwrap().re;
        }
        assert!((energy(&p, &s).unwrap() - e).abs() < 1e-12);
    }

    #[test]
    fn symmetries() {
        let p = params();
        for seed in 0..3 {
            let s = random(5, seed);
            let hs = hamiltonian_matvec(&p, &s).unwrap();
            let im: C64 = s
                .amplitudes()
                .iter()
                .zip(&hs)
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!(im.im.abs() < 1e-12);

            let ts = s.translate(1);
            let h_ts = hamiltonian_matvec(&p, &ts).unwrap();
            let t_hs = StateVector::from_amplitudes(5, hs.clone())
                .unwrap()
                .translate(1);
            let scale = hs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let t_hs: Vec<C64> = t_hs.amplitudes().iter().map(|x| x * scale).collect();
            assert!(diff(&h_ts, &t_hs) < 1e-12);

            let par: Vec<C64> = s
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| a * parity_sign(i))
                .collect();
            let ps = StateVector::from_amplitudes(5, par).unwrap();
            let h_ps = hamiltonian_matvec(&p, &ps).unwrap();
            let p_hs: Vec<C64> = hs
                .iter()
                .enumerate()
                .map(|(i, a)| a * parity_sign(i))
                .collect();
            assert!(diff(&h_ps, &p_hs) < 1e-12);

            let c = s.site(2).unwrap();
            let rs = s.reflect(c).unwrap();
            let h_rs =
                StateVector::from_amplitudes(5, hamiltonian_matvec(&p, &rs).unwrap()).unwrap();
            let back = h_rs.reflect(c).unwrap();
            let hs_state = StateVector::from_amplitudes(5, hs.clone()).unwrap();
            assert!((back.fidelity(&hs_state).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent_and_selects_momentum() {
        let s = random(5, 9);
        for sector in sectors(5) {
            let mut v = s.amplitudes().to_vec();
            project_sector(&mut v, 5, sector);
            let once = v.clone();
            project_sector(&mut v, 5, sector);
            assert!(diff(&v, &once) < 1e-13);
            let st = StateVector::from_amplitudes(5, v).unwrap();
            assert_eq!(
                st.measure_momentum(EIGENSTATE_TOL).unwrap().ell(),
                sector.ell
            );
            assert!((st.parity_expectation(ParityAxis::Z) - sector.parity as f64).abs() < 1e-12);
        }
    }

    fn check_classical(solver: &dyn SpectrumSolver, l: usize) {
        let m = solver
            .ground_manifold(&ChainParams::classical(l).unwrap())
            .unwrap();
        assert_eq!(m.degeneracy(), 2 * l);
        assert!((m.ground_energy() - (2.0 - l as f64)).abs() < 1e-10);
        let mut counts = BTreeMap::new();
        for ell in m.momenta() {
            *counts.entry(ell.ell()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), l);
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn classical_point_manifold() {
        check_classical(&LanczosSolver::default(), 5);
        check_classical(&DenseSolver, 5);
        check_classical(&LanczosSolver::default(), 7);
        check_classical(&FullSpaceLanczos::default(), 5);
    }

    #[test]
    fn dense_and_lanczos_agree() {
        for l in [5usize, 7] {
            for h in [0.0, 0.3, 1.2] {
                let p = ChainParams::frustrated(l, 0.33, 0.1, h).unwrap();
                let a = DenseSolver.lowest_levels(&p, 4).unwrap();
                let b = LanczosSolver::default().lowest_levels(&p, 4).unwrap();
                let c = FullSpaceLanczos::default().lowest_levels(&p, 4).unwrap();
                assert_eq!(a.len(), 4);
                for ((x, y), z) in a.iter().zip(&b).zip(&c) {
                    assert!((x.energy - y.energy).abs() < 1e-9, "L={l} h={h}");
                    assert!((x.energy - z.energy).abs() < 1e-9, "L={l} h={h}");
                }
            }
        }
    }

    #[test]
    fn manifold_states_are_eigenstates() {
        let p = ChainParams::frustrated(7, 0.33, 0.0, 0.5).unwrap();
        for solver in [
            &LanczosSolver::default() as &dyn SpectrumSolver,
            &FullSpaceLanczos::default(),
            &DenseSolver,
        ] {
            let m = solver.ground_manifold(&p).unwrap();
            for lvl in m.levels() {
                let hv = hamiltonian_matvec(&p, &lvl.state).unwrap();
                let want: Vec<C64> = lvl
                    .state
                    .amplitudes()
                    .iter()
                    .map(|a| a * lvl.energy)
                    .collect();
                assert!(diff(&hv, &want) < 1e-8);
                assert_eq!(
                    lvl.state.measure_momentum(EIGENSTATE_TOL).unwrap(),
                    lvl.momentum
                );
            }
            for (i, a) in m.levels().iter().enumerate() {
                for b in &m.levels()[i + 1..] {
                    assert!(a.state.inner(&b.state).unwrap().norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hstar_small_ring() {
        let opts = HstarOptions::default();
        let r = find_hstar(0.33, 0.0, 5, &opts, &LanczosSolver::default()).unwrap();
        assert_eq!(r.status, HstarStatus::Found);
        assert!(r.hstar > 0.0 && r.bracket_width <= opts.tol);
        assert!((r.hstar - 0.8549).abs() < 2e-3);
        let above = r.above.unwrap();
        assert!(above.is_unique_zero_momentum());
        let below = r.below.unwrap();
        assert_eq!(below.degeneracy(), 2);
        let m = below.momenta();
        assert_eq!(m[0].ell(), -m[1].ell());
        assert_ne!(m[0].ell(), 0);

        let d = find_hstar(0.33, 0.0, 5, &opts, &DenseSolver).unwrap();
        assert!((d.hstar - r.hstar).abs() <= opts.tol);
    }

    #[test]
    fn hstar_outside_validity() {
        let r = find_hstar(0.2, -0.5, 5, &HstarOptions::default(), &DenseSolver).unwrap();
        assert_eq!(r.status, HstarStatus::NoFinitePhase);
        assert_eq!(r.hstar, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn sector_blocks_are_hermitian() {
        let p = params();
        let ham = XyzHamiltonian::new(p);
        let orbits = TranslationOrbits::new(5);
        for sector in sectors(5) {
            let ell = MomentumIndex::new(sector.ell, 5).unwrap();
            let b =
                SectorHamiltonian::build(&orbits, ell, sector.parity, |s, out| ham.column(s, out));
            assert!(b.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn solver_registry() {
        for name in solver_names() {
            assert_eq!(solver_by_name(name).unwrap().name(), *name);
        }
        assert!(solver_by_name("arpack").is_err());
    }
}
