//! Permutation orbits and transposition decompositions, pattern
//! compatibility, block-swap involutions, decomposition of block
//! automorphisms into generators, and the finite-volume Radon-Nikodym
//! density check.

use crate::error::{Error, Result};
use crate::gibbs::{cocycle, KernelTable};
use crate::lattice::{ball, LatticeBox};
use crate::potentials::LocalPotential;
use crate::shiftspace::{
    pattern_count, FramedConfiguration, Pattern, PatternsOnBox, SubshiftSpec,
};
use std::collections::BTreeSet;

/// A permutation of `0..n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePermutation {
    image: Vec<usize>,
}

impl FinitePermutation {
    pub fn identity(n: usize) -> Self {
        FinitePermutation {
            image: (0..n).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(Error::Invalid("image is not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(FinitePermutation { image })
    }

    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &v) in c.iter().enumerate() {
                if v >= n {
                    return Err(Error::Invalid(format!("cycle element {v} out of range")));
                }
                image[v] = c[(i + 1) % c.len()];
            }
        }
        FinitePermutation::from_image(image)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(a, b);
        FinitePermutation { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &FinitePermutation) -> FinitePermutation {
        FinitePermutation {
            image: (0..self.image.len())
                .map(|i| self.image[other.image[i]])
                .collect(),
        }
    }

    pub fn inverse(&self) -> FinitePermutation {
        let mut image = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v] = i;
        }
        FinitePermutation { image }
    }
}

/// Swap of an orbit representative with another orbit element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transposition {
    pub rep: usize,
    pub other: usize,
}

/// Factor a permutation into transpositions along its orbits. Orbits are
/// walked from the least unvisited element; an orbit of representative `x`
/// and period `n` contributes the swaps with the orbit elements in
/// reverse walk order, so composing the returned sequence right to left
/// reproduces the permutation. Identity factors are dropped.
pub fn orbit_decompose(pi: &FinitePermutation) -> Vec<Transposition> {
    let n = pi.len();
    let mut visited = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut orbit = vec![start];
        visited[start] = true;
        let mut cur = pi.apply(start);
        while cur != start {
            visited[cur] = true;
            orbit.push(cur);
            cur = pi.apply(cur);
        }
        for j in (1..orbit.len()).rev() {
            out.push(Transposition {
                rep: start,
                other: orbit[j],
            });
        }
    }
    out
}

/// Compose transpositions right to left (the last one acts first).
pub fn compose_transpositions(n: usize, ts: &[Transposition]) -> FinitePermutation {
    let mut p = FinitePermutation::identity(n);
    for t in ts.iter().rev() {
        p = FinitePermutation::transposition(n, t.rep, t.other).compose(&p);
    }
    p
}

/// Collar depth used for exact 1D compatibility: the span of the rule
/// window (the Markov property makes that ring sufficient).
pub fn default_collar_depth(spec: &SubshiftSpec) -> u64 {
    let w = match spec.rule() {
        crate::shiftspace::SubshiftRule::Matrices(_) => 2,
        crate::shiftspace::SubshiftRule::Forbidden(f) => f
            .iter()
            .map(|p| p.domain().hull().len() as u64)
            .max()
            .unwrap_or(1),
    };
    w.max(2)
}

/// The set of admissible collar rings of the given depth around a pattern:
/// the exterior completions it accepts, truncated to the ring. Two
/// patterns are compatible exactly when these sets coincide (exact for 1D
/// subshifts of finite type, a flagged approximation for d >= 2).
fn collar_signature(
    spec: &SubshiftSpec,
    region: &LatticeBox,
    a: &Pattern,
    depth: u64,
    cap: u64,
) -> Result<BTreeSet<Vec<usize>>> {
    let ring = region
        .minkowski_sum(&ball(depth, spec.dimension()))
        .difference(region);
    pattern_count(spec.alphabet().len(), ring.len() + region.len(), cap)?;
    let exact = spec.dimension() == 1;
    let mut out = BTreeSet::new();
    for r in PatternsOnBox::new(ring.clone(), spec.alphabet().len()) {
        // the ring must be realizable: some interior content extends it
        let mut realizable = false;
        for c in PatternsOnBox::new(region.clone(), spec.alphabet().len()) {
            let combined = Pattern::juxtapose(&c, &r)?;
            let ok = if exact {
                spec.is_admissible_1d(&combined)?
            } else {
                spec.is_admissible_with_collar(&combined)?
            };
            if ok {
                realizable = true;
                break;
            }
        }
        if !realizable {
            continue;
        }
        // gluability of `a` into a point with this ring is a local check
        let combined = Pattern::juxtapose(a, &r)?;
        if spec.is_locally_admissible(&combined) {
            out.insert(r.values().to_vec());
        }
    }
    Ok(out)
}

/// Do `a` and `b` admit exactly the same exterior completions?
pub fn compatible(
    spec: &SubshiftSpec,
    a: &Pattern,
    b: &Pattern,
    depth: u64,
    cap: u64,
) -> Result<bool> {
    if a.domain() != b.domain() {
        return Err(Error::Invalid("patterns live on different regions".into()));
    }
    if a == b {
        return Ok(true);
    }
    let sa = collar_signature(spec, a.domain(), a, depth, cap)?;
    let sb = collar_signature(spec, b.domain(), b, depth, cap)?;
    Ok(sa == sb)
}

/// Partition of the admissible patterns on a region into compatibility
/// classes.
#[derive(Debug, Clone)]
pub struct CompatibilityClassing {
    region: LatticeBox,
    patterns: Vec<Pattern>,
    /// Class id per pattern index.
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl CompatibilityClassing {
    pub fn new(spec: &SubshiftSpec, region: &LatticeBox, depth: u64, cap: u64) -> Result<Self> {
        let patterns = spec.enumerate_patterns(region, cap)?;
        let mut signatures = Vec::with_capacity(patterns.len());
        for p in &patterns {
            signatures.push(collar_signature(spec, region, p, depth, cap)?);
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_sig: Vec<&BTreeSet<Vec<usize>>> = Vec::new();
        let mut class_of = vec![0usize; patterns.len()];
        for (i, sig) in signatures.iter().enumerate() {
            match class_sig.iter().position(|s| *s == sig) {
                Some(c) => {
                    classes[c].push(i);
                    class_of[i] = c;
                }
                None => {
                    class_of[i] = classes.len();
                    classes.push(vec![i]);
                    class_sig.push(sig);
                }
            }
        }
        Ok(CompatibilityClassing {
            region: region.clone(),
            patterns,
            class_of,
            classes,
        })
    }

    pub fn region(&self) -> &LatticeBox {
        &self.region
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn class_of(&self, pattern_index: usize) -> usize {
        self.class_of[pattern_index]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Number of permutations of the patterns preserving every class,
    /// saturating at `u128::MAX` (the count is a product of factorials).
    pub fn class_preserving_count(&self) -> u128 {
        let mut total: u128 = 1;
        for class in &self.classes {
            for k in 1..=class.len() as u128 {
                total = total.saturating_mul(k);
            }
        }
        total
    }
}

/// The involution swapping two compatible patterns on a finite region and
/// fixing everything else; preserves admissibility.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInvolution {
    region: LatticeBox,
    a: Pattern,
    b: Pattern,
}

impl BlockInvolution {
    pub fn new(spec: &SubshiftSpec, a: Pattern, b: Pattern, cap: u64) -> Result<Self> {
        let depth = default_collar_depth(spec);
        if !compatible(spec, &a, &b, depth, cap)? {
            return Err(Error::IncompatiblePatterns);
        }
        Ok(BlockInvolution {
            region: a.domain().clone(),
            a,
            b,
        })
    }

    /// Trusted constructor for pairs already known compatible (e.g. from a
    /// classing).
    fn from_classed_pair(region: LatticeBox, a: Pattern, b: Pattern) -> Self {
        BlockInvolution { region, a, b }
    }

    pub fn region(&self) -> &LatticeBox {
        &self.region
    }

    pub fn pair(&self) -> (&Pattern, &Pattern) {
        (&self.a, &self.b)
    }

    pub fn is_identity(&self) -> bool {
        self.a == self.b
    }

    /// Swap the pair on the region, fix everything else.
    pub fn apply(&self, x: &FramedConfiguration) -> FramedConfiguration {
        if self.is_identity() {
            return x.clone();
        }
        let current = x.read(&self.region);
        if current == self.a {
            x.with_pattern(&self.b)
        } else if current == self.b {
            x.with_pattern(&self.a)
        } else {
            x.clone()
        }
    }

    /// Same action at pattern level; the pattern's domain must cover the
    /// region.
    pub fn apply_pattern(&self, c: &Pattern) -> Result<Pattern> {
        let current = c.restrict(&self.region)?;
        let replacement = if current == self.a {
            &self.b
        } else if current == self.b {
            &self.a
        } else {
            return Ok(c.clone());
        };
        let outside = c.restrict(&c.domain().difference(&self.region))?;
        Pattern::juxtapose(replacement, &outside)
    }
}

/// Decompose a class-preserving permutation of the admissible patterns on
/// a region into block involutions; composing the result right to left
/// reproduces the permutation's action.
pub fn decompose_block_automorphism(
    pi: &FinitePermutation,
    classing: &CompatibilityClassing,
) -> Result<Vec<BlockInvolution>> {
    if pi.len() != classing.patterns().len() {
        return Err(Error::Invalid(format!(
            "permutation on {} elements, classing has {} patterns",
            pi.len(),
            classing.patterns().len()
        )));
    }
    for i in 0..pi.len() {
        if classing.class_of(i) != classing.class_of(pi.apply(i)) {
            return Err(Error::ClassBreaking(i));
        }
    }
    let out = orbit_decompose(pi)
        .into_iter()
        .map(|t| {
            BlockInvolution::from_classed_pair(
                classing.region().clone(),
                classing.patterns()[t.rep].clone(),
                classing.patterns()[t.other].clone(),
            )
        })
        .collect();
    Ok(out)
}

/// Radon-Nikodym density check at finite volume: for every outer-box
/// cylinder of positive mass, the mass ratio under the involution must
/// equal the exponential of the cocycle between the configuration and its
/// image. Returns the max deviation.
pub fn density_check(
    table: &KernelTable,
    boundary: &FramedConfiguration,
    xi: &BlockInvolution,
    f: &LocalPotential,
    spec: &SubshiftSpec,
) -> Result<f64> {
    let reach = spec.window_radius().max(f.window_radius());
    let needed = xi
        .region()
        .minkowski_sum(&ball(reach, spec.dimension()));
    if !needed.is_subset_of(table.volume()) {
        return Err(Error::BoundaryTooThin(format!(
            "outer box must contain the involution region dilated by {reach}"
        )));
    }
    let mut residual: f64 = 0.0;
    for e in table.entries() {
        if e.prob <= 0.0 {
            continue;
        }
        let image = xi.apply_pattern(&e.pattern)?;
        let mass_ratio = table.prob_of(&image) / e.prob;
        let x = boundary.with_pattern(&e.pattern);
        let y = boundary.with_pattern(&image);
        let expected = cocycle(f, &x, &y)?.exp();
        residual = residual.max((mass_ratio - expected).abs());
    }
    Ok(residual)
}
