//! Cocycles of local potentials, truncation bounds, specification kernels
//! in cocycle and Boltzmann form, properness and consistency checks, and
//! DLR residuals against cylinder measures.
//!
//! Kernels are computed from the closed form: the weight of an interior
//! pattern is the sum of the potential over every translate whose window
//! meets the volume, which is exact for local potentials. All weights live
//! in log domain and are normalized by log-sum-exp with max subtraction,
//! so couplings up to around 20 stay clear of overflow.

use crate::equilibrium1d::MarkovMeasure;
use crate::error::{Error, Result};
use crate::lattice::{centered_box, LatticeBox, LatticeKind};
use crate::log_sum_exp;
use crate::potentials::{InteractionPotential, LocalPotential, VariationProfile};
use crate::shiftspace::{
    pattern_count, FramedConfiguration, Pattern, PatternsOnBox, PeriodicBackground, SubshiftSpec,
};
use std::collections::BTreeMap;

/// Lattice-summed energy difference between two configurations that share
/// a background: the sum over translates of `f(shifted y) - f(shifted x)`.
/// Only translates whose window meets the disagreement region contribute,
/// so the sum is finite and exact; terms are accumulated in lexicographic
/// translate order.
pub fn cocycle(
    f: &LocalPotential,
    x: &FramedConfiguration,
    y: &FramedConfiguration,
) -> Result<f64> {
    let diff = x.differing_sites(y)?;
    if diff.is_empty() {
        return Ok(0.0);
    }
    let region = LatticeBox::from_points(x.dim(), diff)?;
    let mut total = 0.0;
    for k in region.minkowski_diff(f.window()).points() {
        total += f.eval_shifted(y, k) - f.eval_shifted(x, k);
    }
    Ok(total)
}

/// Certified bound on the absolute cocycle sum for configurations agreeing
/// outside the centered box of radius `m`: twice the volume of the next
/// centered box times the summable-variation norm.
pub fn cocycle_bound(profile: &VariationProfile, m: u64) -> f64 {
    let volume = centered_box(m + 1, profile.dimension, LatticeKind::Full).len() as f64;
    2.0 * volume * profile.norm()
}

/// Partial-tail form of the same bound: what the translates beyond
/// variation radius `n0` can still contribute, `2 |box(m+1)| * sum of
/// n^(d-1) delta_n` from `n0` on. Certifies truncation error when kernels
/// are evaluated with finitely many translates.
pub fn cocycle_tail(profile: &VariationProfile, m: u64, n0: u64) -> f64 {
    let volume = centered_box(m + 1, profile.dimension, LatticeKind::Full).len() as f64;
    2.0 * volume * profile.weighted_tail(n0)
}

/// One row of a specification kernel table.
#[derive(Debug, Clone)]
pub struct KernelEntry {
    pub pattern: Pattern,
    /// Raw log weight (sum of the potential over contributing translates).
    pub score: f64,
    pub prob: f64,
}

/// Probability weights of interior patterns given a boundary
/// configuration; rows are in lexicographic pattern order and only
/// admissible interiors appear.
#[derive(Debug, Clone)]
pub struct KernelTable {
    volume: LatticeBox,
    entries: Vec<KernelEntry>,
    /// Log of the partition sum of the raw scores.
    log_partition: f64,
}

impl KernelTable {
    fn from_scores(volume: LatticeBox, scored: Vec<(Pattern, f64)>) -> Result<KernelTable> {
        if scored.is_empty() {
            return Err(Error::NoAdmissibleInterior);
        }
        let scores: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
        let log_partition = log_sum_exp(&scores);
        let entries = scored
            .into_iter()
            .map(|(pattern, score)| KernelEntry {
                pattern,
                score,
                prob: (score - log_partition).exp(),
            })
            .collect();
        Ok(KernelTable {
            volume,
            entries,
            log_partition,
        })
    }

    pub fn volume(&self) -> &LatticeBox {
        &self.volume
    }

    pub fn entries(&self) -> &[KernelEntry] {
        &self.entries
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    /// Probability of one interior pattern (zero when inadmissible).
    pub fn prob_of(&self, p: &Pattern) -> f64 {
        self.entries
            .binary_search_by(|e| e.pattern.values().cmp(p.values()))
            .map(|ix| self.entries[ix].prob)
            .unwrap_or(0.0)
    }

    /// Sum over the table of entries extending a pattern on part of the
    /// volume.
    pub fn cylinder_prob(&self, p: &Pattern) -> Result<f64> {
        if !p.domain().is_subset_of(&self.volume) {
            return Err(Error::Invalid(
                "cylinder domain is not inside the kernel volume".into(),
            ));
        }
        let mut total = 0.0;
        for e in &self.entries {
            let agrees = p
                .domain()
                .points()
                .iter()
                .all(|q| e.pattern.get(q) == p.get(q));
            if agrees {
                total += e.prob;
            }
        }
        Ok(total)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.prob).sum()
    }
}

/// Translates of the potential window that meet the volume; the finite
/// index set of the kernel's energy sum.
fn contributing_shifts(f: &LocalPotential, volume: &LatticeBox) -> LatticeBox {
    volume.minkowski_diff(f.window())
}

fn admissible_interiors(
    spec: &SubshiftSpec,
    volume: &LatticeBox,
    boundary: &FramedConfiguration,
    cap: u64,
) -> Result<Vec<(Pattern, FramedConfiguration)>> {
    pattern_count(spec.alphabet().len(), volume.len(), cap)?;
    if !spec.is_point(boundary) {
        return Err(Error::Inadmissible(
            "boundary configuration is not a point of the subshift".into(),
        ));
    }
    let mut out = Vec::new();
    for p in PatternsOnBox::new(volume.clone(), spec.alphabet().len()) {
        let glued = boundary.with_pattern(&p);
        if spec.is_point(&glued) {
            out.push((p, glued));
        }
    }
    Ok(out)
}

/// Specification kernel of a local potential: the probability of each
/// admissible interior pattern is proportional to the exponential of its
/// summed energy, normalized over admissible interiors.
pub fn kernel(
    f: &LocalPotential,
    spec: &SubshiftSpec,
    volume: &LatticeBox,
    boundary: &FramedConfiguration,
    cap: u64,
) -> Result<KernelTable> {
    let shifts = contributing_shifts(f, volume);
    let mut scored = Vec::new();
    for (p, glued) in admissible_interiors(spec, volume, boundary, cap)? {
        let score: f64 = shifts
            .points()
            .iter()
            .map(|k| f.eval_shifted(&glued, k))
            .sum();
        scored.push((p, score));
    }
    KernelTable::from_scores(volume.clone(), scored)
}

/// Kernel of a finite-range interaction in Boltzmann form: weights
/// proportional to the exponential of minus the Hamiltonian, with the
/// uniform reference measure absorbed into the normalization.
pub fn kernel_from_interaction(
    phi: &InteractionPotential,
    spec: &SubshiftSpec,
    volume: &LatticeBox,
    boundary: &FramedConfiguration,
    cap: u64,
) -> Result<KernelTable> {
    let mut scored = Vec::new();
    for (p, glued) in admissible_interiors(spec, volume, boundary, cap)? {
        scored.push((p, -phi.hamiltonian(volume, &glued)));
    }
    KernelTable::from_scores(volume.clone(), scored)
}

/// Kernel computed from the truncated energy sum over the centered box of
/// radius `n` instead of the closed form; converges to [`kernel`] as `n`
/// grows and backs the limit-check mode.
pub fn kernel_truncated(
    f: &LocalPotential,
    spec: &SubshiftSpec,
    volume: &LatticeBox,
    boundary: &FramedConfiguration,
    n: u64,
    cap: u64,
) -> Result<KernelTable> {
    let shifts = centered_box(n, spec.dimension(), LatticeKind::Full);
    let mut scored = Vec::new();
    for (p, glued) in admissible_interiors(spec, volume, boundary, cap)? {
        let score: f64 = shifts
            .points()
            .iter()
            .map(|k| f.eval_shifted(&glued, k))
            .sum();
        scored.push((p, score));
    }
    KernelTable::from_scores(volume.clone(), scored)
}

/// Max entrywise probability difference between two kernel tables over the
/// same volume.
pub fn kernel_distance(a: &KernelTable, b: &KernelTable) -> f64 {
    let mut out: f64 = 0.0;
    for e in a.entries() {
        out = out.max((e.prob - b.prob_of(&e.pattern)).abs());
    }
    for e in b.entries() {
        out = out.max((e.prob - a.prob_of(&e.pattern)).abs());
    }
    out
}

/// Composition defect of nested kernels: the outer kernel composed with
/// the inner one must reproduce the outer kernel on every outer cylinder.
/// Returns the max absolute difference.
pub fn consistency_residual(
    f: &LocalPotential,
    spec: &SubshiftSpec,
    inner: &LatticeBox,
    outer: &LatticeBox,
    boundary: &FramedConfiguration,
    cap: u64,
) -> Result<f64> {
    if !inner.is_subset_of(outer) {
        return Err(Error::Invalid(
            "inner volume must sit inside the outer one".into(),
        ));
    }
    let outer_table = kernel(f, spec, outer, boundary, cap)?;
    let rest = outer.difference(inner);
    // composed[a] = sum over outer patterns w of P_outer(w) * P_inner(a | w)
    let mut composed: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for e in outer_table.entries() {
        let y = boundary.with_pattern(&e.pattern);
        let inner_table = kernel(f, spec, inner, &y, cap)?;
        let frame_part = e.pattern.restrict(&rest)?;
        for ie in inner_table.entries() {
            let event = Pattern::juxtapose(&ie.pattern, &frame_part)?;
            *composed.entry(event.values().to_vec()).or_insert(0.0) += e.prob * ie.prob;
        }
    }
    let mut residual: f64 = 0.0;
    for e in outer_table.entries() {
        let lhs = composed.remove(e.pattern.values()).unwrap_or(0.0);
        residual = residual.max((lhs - e.prob).abs());
    }
    // mass the composition assigns to patterns the outer kernel excludes
    for (_, mass) in composed {
        residual = residual.max(mass);
    }
    Ok(residual)
}

/// Properness defect: the kernel mass of an exterior cylinder must be the
/// indicator of the boundary configuration lying in it.
pub fn properness_check(
    table: &KernelTable,
    exterior: &Pattern,
    boundary: &FramedConfiguration,
) -> Result<f64> {
    if exterior
        .domain()
        .points()
        .iter()
        .any(|p| table.volume().contains(p))
    {
        return Err(Error::Invalid(
            "exterior event overlaps the kernel volume".into(),
        ));
    }
    let mut computed = 0.0;
    for e in table.entries() {
        let glued = boundary.with_pattern(&e.pattern);
        let matches = exterior
            .domain()
            .points()
            .iter()
            .all(|q| glued.eval(q) == exterior.get(q).unwrap());
        if matches {
            computed += e.prob;
        }
    }
    let expected = if exterior
        .domain()
        .points()
        .iter()
        .all(|q| boundary.eval(q) == exterior.get(q).unwrap())
    {
        1.0
    } else {
        0.0
    };
    Ok((computed - expected).abs())
}

/// Abstract cylinder-probability evaluator used by the DLR and block
/// entropy checks.
#[derive(Debug, Clone)]
pub enum CylinderMeasure {
    /// Product measure with one weight per symbol.
    Bernoulli { weights: Vec<f64> },
    /// Stationary Markov measure on 1D interval cylinders.
    Markov1d(MarkovMeasure),
    /// Finite-volume Gibbs weights over an outer box.
    FiniteVolumeGibbs(KernelTable),
}

impl CylinderMeasure {
    pub fn bernoulli(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Invalid("negative Bernoulli weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("Bernoulli weights sum to {total}")));
        }
        Ok(CylinderMeasure::Bernoulli { weights })
    }

    /// Probability of the cylinder of a pattern.
    pub fn cylinder_prob(&self, p: &Pattern) -> Result<f64> {
        match self {
            CylinderMeasure::Bernoulli { weights } => {
                Ok(p.values().iter().map(|&v| weights[v]).product())
            }
            CylinderMeasure::Markov1d(m) => m.cylinder_prob(p),
            CylinderMeasure::FiniteVolumeGibbs(table) => table.cylinder_prob(p),
        }
    }
}

/// Outcome of a DLR check: the worst cylinder-level deviation between the
/// measure's conditional probabilities and the specification kernel.
#[derive(Debug, Clone)]
pub struct DlrReport {
    pub max_residual: f64,
    pub argmax_boundary: Option<Pattern>,
    pub argmax_interior: Option<Pattern>,
    /// Boundary patterns skipped because the measure gives them no mass.
    pub skipped_boundaries: usize,
    pub checked_boundaries: usize,
}

/// Compare measure conditionals `mu(interior, boundary) / mu(boundary)`
/// with kernel probabilities over every boundary pattern on the annulus
/// `outer minus inner`. Boundaries of measure zero carry no constraint and
/// are skipped (counted in the report). The annulus must be thick enough
/// to determine the kernel: at least twice the larger of the rule and
/// potential window radii.
pub fn dlr_residual(
    mu: &CylinderMeasure,
    f: &LocalPotential,
    spec: &SubshiftSpec,
    inner: &LatticeBox,
    outer: &LatticeBox,
    background: &PeriodicBackground,
    cap: u64,
) -> Result<DlrReport> {
    if !inner.is_subset_of(outer) {
        return Err(Error::Invalid(
            "inner volume must sit inside the outer one".into(),
        ));
    }
    let annulus = outer.difference(inner);
    let reach = 2 * spec.window_radius().max(f.window_radius());
    let needed = inner.minkowski_sum(&centered_box(
        reach + 1,
        spec.dimension(),
        LatticeKind::Full,
    ));
    if !needed.difference(inner).is_subset_of(&annulus) {
        return Err(Error::BoundaryTooThin(format!(
            "annulus must cover the inner volume dilated by {reach}"
        )));
    }
    pattern_count(spec.alphabet().len(), outer.len(), cap)?;

    let mut report = DlrReport {
        max_residual: 0.0,
        argmax_boundary: None,
        argmax_interior: None,
        skipped_boundaries: 0,
        checked_boundaries: 0,
    };
    for zeta in PatternsOnBox::new(annulus.clone(), spec.alphabet().len()) {
        let mut joint = Vec::new();
        let mut mass = 0.0;
        for omega in PatternsOnBox::new(inner.clone(), spec.alphabet().len()) {
            let full = Pattern::juxtapose(&omega, &zeta)?;
            let p = mu.cylinder_prob(&full)?;
            mass += p;
            joint.push((omega, p));
        }
        if mass <= 0.0 {
            report.skipped_boundaries += 1;
            continue;
        }
        report.checked_boundaries += 1;
        let framed = FramedConfiguration::new(zeta.clone(), background.clone())?;
        let table = kernel(f, spec, inner, &framed, cap)?;
        for (omega, p) in joint {
            let lhs = p / mass;
            let rhs = table.prob_of(&omega);
            let r = (lhs - rhs).abs();
            if r > report.max_residual {
                report.max_residual = r;
                report.argmax_boundary = Some(zeta.clone());
                report.argmax_interior = Some(omega);
            }
        }
    }
    Ok(report)
}
