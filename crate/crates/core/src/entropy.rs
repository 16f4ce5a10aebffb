//! Entropy of finite partitions on finite weighted spaces, conditional
//! entropy, refinement algebra, chain rules, Bernoulli rates, and block
//! entropy rates of cylinder measures.
//!
//! Natural logarithm throughout; rescale by 1/log 2 for bits.

use crate::error::{Error, Result};
use crate::gibbs::CylinderMeasure;
use crate::lattice::{centered_box, LatticeKind};
use crate::shiftspace::{pattern_count, PatternsOnBox, SubshiftSpec};

/// A finite probability space: ordered outcomes with weights summing to 1.
#[derive(Debug, Clone)]
pub struct WeightedSpace {
    weights: Vec<f64>,
}

impl WeightedSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("weighted space must be nonempty".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Invalid("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(WeightedSpace { weights })
    }

    pub fn uniform(n: usize) -> Self {
        WeightedSpace {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, outcome: usize) -> f64 {
        self.weights[outcome]
    }
}

/// A partition of the outcomes: one block label per outcome, canonically
/// relabeled by first appearance so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    blocks: usize,
}

impl Partition {
    pub fn new(raw_labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw_labels.len());
        for &l in raw_labels {
            let next = map.len();
            let id = *map.entry(l).or_insert(next);
            labels.push(id);
        }
        Partition {
            labels,
            blocks: map.len(),
        }
    }

    /// Everything in one block.
    pub fn trivial(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            blocks: if n == 0 { 0 } else { 1 },
        }
    }

    /// Every outcome its own block.
    pub fn discrete(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            blocks: n,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn label(&self, outcome: usize) -> usize {
        self.labels[outcome]
    }

    fn block_weights(&self, space: &WeightedSpace) -> Vec<f64> {
        let mut w = vec![0.0; self.blocks];
        for (i, &l) in self.labels.iter().enumerate() {
            w[l] += space.weight(i);
        }
        w
    }
}

/// Common refinement: blocks are the nonempty intersections.
pub fn refine(alpha: &Partition, beta: &Partition) -> Result<Partition> {
    if alpha.len() != beta.len() {
        return Err(Error::Invalid("partitions live on different spaces".into()));
    }
    let raw: Vec<usize> = alpha
        .labels
        .iter()
        .zip(&beta.labels)
        .map(|(&a, &b)| a * beta.blocks + b)
        .collect();
    Ok(Partition::new(&raw))
}

/// `sum over blocks of -mu(A) log mu(A)`, with `0 log 0 = 0`.
pub fn entropy(space: &WeightedSpace, alpha: &Partition) -> Result<f64> {
    if alpha.len() != space.len() {
        return Err(Error::Invalid("partition does not match the space".into()));
    }
    Ok(alpha
        .block_weights(space)
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum())
}

/// `sum over pairs of -mu(A and B) log(mu(A and B)/mu(B))` over pairs of
/// positive joint weight.
pub fn conditional_entropy(
    space: &WeightedSpace,
    alpha: &Partition,
    beta: &Partition,
) -> Result<f64> {
    if alpha.len() != space.len() || beta.len() != space.len() {
        return Err(Error::Invalid("partition does not match the space".into()));
    }
    let mut joint = vec![0.0; alpha.blocks * beta.blocks];
    for i in 0..space.len() {
        joint[alpha.label(i) * beta.blocks + beta.label(i)] += space.weight(i);
    }
    let beta_w = beta.block_weights(space);
    let mut h = 0.0;
    for a in 0..alpha.blocks {
        for b in 0..beta.blocks {
            let w = joint[a * beta.blocks + b];
            if w > 0.0 {
                h -= w * (w / beta_w[b]).ln();
            }
        }
    }
    Ok(h)
}

/// True iff every positive-weight block of `alpha` is a union of blocks
/// of `beta` up to null outcomes; equivalent to vanishing conditional
/// entropy of `alpha` given `beta`.
pub fn is_finer(space: &WeightedSpace, beta: &Partition, alpha: &Partition) -> Result<bool> {
    if alpha.len() != space.len() || beta.len() != space.len() {
        return Err(Error::Invalid("partition does not match the space".into()));
    }
    // no beta block of positive weight may straddle two alpha blocks
    let mut seen: Vec<Option<usize>> = vec![None; beta.blocks];
    for i in 0..space.len() {
        if space.weight(i) == 0.0 {
            continue;
        }
        let b = beta.label(i);
        let a = alpha.label(i);
        match seen[b] {
            None => seen[b] = Some(a),
            Some(prev) => {
                if prev != a {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `|H(alpha v beta) - H(alpha) - H(beta | alpha)|`; zero by the chain
/// rule up to rounding.
pub fn chain_rule_residual(
    space: &WeightedSpace,
    alpha: &Partition,
    beta: &Partition,
) -> Result<f64> {
    let joint = entropy(space, &refine(alpha, beta)?)?;
    let first = entropy(space, alpha)?;
    let second = conditional_entropy(space, beta, alpha)?;
    Ok((joint - (first + second)).abs())
}

/// Entropy rate of an i.i.d. symbol source, `-sum p log p`.
pub fn bernoulli_rate(p: &[f64]) -> Result<f64> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 || p.iter().any(|&v| v < 0.0) {
        return Err(Error::Invalid("probability vector must be nonnegative and sum to 1".into()));
    }
    Ok(p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum())
}

/// Entropy of the pattern partition on the centered box of radius `n`,
/// divided by the box volume, for `n = 1..=n_max`. The sequence is
/// nonincreasing toward the dynamical entropy; at desk scale the reported
/// values are upper bounds for the limit.
pub fn block_entropy_rates(
    mu: &CylinderMeasure,
    spec: &SubshiftSpec,
    n_max: u64,
    cap: u64,
) -> Result<Vec<f64>> {
    let d = spec.dimension();
    let k = spec.alphabet().len();
    let mut rates = Vec::new();
    for n in 1..=n_max {
        let region = centered_box(n, d, LatticeKind::Full);
        pattern_count(k, region.len(), cap)?;
        let mut h = 0.0;
        let mut mass = 0.0;
        for p in PatternsOnBox::new(region.clone(), k) {
            let w = mu.cylinder_prob(&p)?;
            mass += w;
            if w > 0.0 {
                h -= w * w.ln();
            }
        }
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "measure mass over the radius-{n} box is {mass}"
            )));
        }
        rates.push(h / region.len() as f64);
    }
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium1d::{equilibrium_markov, PairEnergy, TransferMatrix};
    use crate::shiftspace::SubshiftSpec;
    use crate::DEFAULT_CAP;
    use proptest::prelude::*;

    const QUARTER_ENTROPY: f64 = 0.5623351446188083; // -(1/4)log(1/4) - (3/4)log(3/4)

    #[test]
    fn entropy_basic_values() {
        let space = WeightedSpace::uniform(2);
        let alpha = Partition::discrete(2);
        assert!((entropy(&space, &alpha).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        let one = Partition::trivial(2);
        assert_eq!(entropy(&space, &one).unwrap(), 0.0);
        let space = WeightedSpace::new(vec![0.25, 0.75]).unwrap();
        let h = entropy(&space, &Partition::discrete(2)).unwrap();
        assert!((h - QUARTER_ENTROPY).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_special_cases() {
        let space = WeightedSpace::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let alpha = Partition::new(&[0, 0, 1, 1]);
        assert_eq!(conditional_entropy(&space, &alpha, &alpha).unwrap(), 0.0);
        // trivial conditioning returns the plain entropy
        let trivial = Partition::trivial(4);
        let lhs = conditional_entropy(&space, &alpha, &trivial).unwrap();
        assert!((lhs - entropy(&space, &alpha).unwrap()).abs() < 1e-15);
        // independent pair on a uniform four-point space
        let space = WeightedSpace::uniform(4);
        let rows = Partition::new(&[0, 0, 1, 1]);
        let cols = Partition::new(&[0, 1, 0, 1]);
        let h = conditional_entropy(&space, &rows, &cols).unwrap();
        assert!((h - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn refinement_properties() {
        let space = WeightedSpace::uniform(4);
        let alpha = Partition::new(&[0, 0, 1, 1]);
        let beta = Partition::new(&[0, 1, 0, 1]);
        let joint = refine(&alpha, &beta).unwrap();
        assert_eq!(joint.block_count(), 4);
        assert!(is_finer(&space, &joint, &alpha).unwrap());
        assert!(is_finer(&space, &joint, &beta).unwrap());
        assert_eq!(refine(&alpha, &alpha).unwrap(), alpha);
        let trivial = Partition::trivial(4);
        assert_eq!(refine(&alpha, &trivial).unwrap(), alpha);
    }

    #[test]
    fn finer_detects_straddling() {
        let space = WeightedSpace::uniform(4);
        let alpha = Partition::new(&[0, 0, 1, 1]);
        let beta = Partition::new(&[0, 1, 1, 2]);
        // beta block 1 straddles both alpha blocks
        assert!(!is_finer(&space, &beta, &alpha).unwrap());
        // null outcomes are ignored
        let space = WeightedSpace::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(is_finer(&space, &beta, &alpha).unwrap());
    }

    #[test]
    fn bernoulli_rates() {
        assert!((bernoulli_rate(&[0.5, 0.5]).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(bernoulli_rate(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((bernoulli_rate(&[0.25, 0.75]).unwrap() - QUARTER_ENTROPY).abs() < 1e-12);
        assert!(bernoulli_rate(&[0.2, 0.2]).is_err());
    }

    #[test]
    fn block_rates_of_product_measures_are_constant() {
        let spec = SubshiftSpec::full_shift(crate::shiftspace::Alphabet::binary(), 1);
        for p in [[0.5, 0.5], [0.25, 0.75]] {
            let mu = CylinderMeasure::bernoulli(p.to_vec()).unwrap();
            let rates = block_entropy_rates(&mu, &spec, 5, DEFAULT_CAP).unwrap();
            let expect = bernoulli_rate(&p).unwrap();
            for r in rates {
                assert!((r - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_rates_of_parry_measure_decrease_to_entropy() {
        let spec = SubshiftSpec::golden_mean();
        let m = TransferMatrix::new(&spec, &PairEnergy::zero(2)).unwrap();
        let mu = CylinderMeasure::Markov1d(equilibrium_markov(&m).unwrap());
        let rates = block_entropy_rates(&mu, &spec, 6, DEFAULT_CAP).unwrap();
        let target = 0.4812118250596034; // log golden ratio
        for w in rates.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        // running minimum equals the final term
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, *rates.last().unwrap());
        assert!(*rates.last().unwrap() >= target - 1e-12);
        assert!((rates.last().unwrap() - target).abs() < 0.05);
    }

    #[test]
    fn block_rates_bounded_by_single_site_entropy() {
        let spec = SubshiftSpec::golden_mean();
        let m = TransferMatrix::new(&spec, &PairEnergy::zero(2)).unwrap();
        let parry = equilibrium_markov(&m).unwrap();
        let site_entropy = bernoulli_rate(parry.initial()).unwrap();
        let mu = CylinderMeasure::Markov1d(parry);
        let rates = block_entropy_rates(&mu, &spec, 5, DEFAULT_CAP).unwrap();
        for r in rates {
            assert!(r <= site_entropy + 1e-12);
        }
    }

    fn arb_partition(n: usize, max_blocks: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0..max_blocks, n).prop_map(|raw| Partition::new(&raw))
    }

    fn arb_space(n: usize) -> impl Strategy<Value = WeightedSpace> {
        proptest::collection::vec(0.01f64..1.0, n).prop_map(|raw| {
            let total: f64 = raw.iter().sum();
            WeightedSpace::new(raw.iter().map(|w| w / total).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn chain_rule_and_subadditivity(
            space in arb_space(12),
            alpha in arb_partition(12, 4),
            beta in arb_partition(12, 4),
        ) {
            prop_assert!(chain_rule_residual(&space, &alpha, &beta).unwrap() <= 1e-12);
            let joint = entropy(&space, &refine(&alpha, &beta).unwrap()).unwrap();
            let sum = entropy(&space, &alpha).unwrap() + entropy(&space, &beta).unwrap();
            prop_assert!(joint <= sum + 1e-12);
        }

        #[test]
        fn monotone_and_conditioning_reduces(
            space in arb_space(10),
            alpha in arb_partition(10, 3),
            beta in arb_partition(10, 3),
        ) {
            // refinement increases entropy
            let joint = refine(&alpha, &beta).unwrap();
            prop_assert!(
                entropy(&space, &joint).unwrap() >= entropy(&space, &alpha).unwrap() - 1e-12
            );
            // conditioning reduces entropy
            let cond = conditional_entropy(&space, &alpha, &beta).unwrap();
            prop_assert!(cond <= entropy(&space, &alpha).unwrap() + 1e-12);
        }

        #[test]
        fn finer_iff_zero_conditional_entropy(
            space in arb_space(10),
            alpha in arb_partition(10, 4),
            beta in arb_partition(10, 4),
        ) {
            let finer = is_finer(&space, &beta, &alpha).unwrap();
            let cond = conditional_entropy(&space, &alpha, &beta).unwrap();
            prop_assert_eq!(finer, cond <= 1e-12);
        }
    }
}
