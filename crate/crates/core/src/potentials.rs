//! Local potentials, variation sequences, the summable-variation norm,
//! finite-range interaction potentials, Hamiltonians, and the Ising family.
//!
//! Energies are in natural-log units throughout; there is no separate
//! inverse-temperature parameter (absorb it into the coupling constants).

use crate::error::{Error, Result};
use crate::lattice::{centered_box, LatticeBox, LatticeKind, LatticePoint};
use crate::shiftspace::{FramedConfiguration, Pattern, PatternsOnBox, SubshiftSpec};

/// A function on configurations that depends only on the values inside a
/// finite window, stored as a full table over all window patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPotential {
    window: LatticeBox,
    alphabet_size: usize,
    /// One value per pattern on the window, in lexicographic pattern order.
    table: Vec<f64>,
}

impl LocalPotential {
    pub fn new(window: LatticeBox, alphabet_size: usize, table: Vec<f64>) -> Result<Self> {
        let expected = (alphabet_size as u128).checked_pow(window.len() as u32);
        if expected != Some(table.len() as u128) {
            return Err(Error::Invalid(format!(
                "potential table has {} entries, window of {} sites needs {alphabet_size}^{}",
                table.len(),
                window.len(),
                window.len()
            )));
        }
        Ok(LocalPotential {
            window,
            alphabet_size,
            table,
        })
    }

    /// Build from a closure evaluated on every window pattern.
    pub fn from_fn(
        window: LatticeBox,
        alphabet_size: usize,
        f: impl Fn(&Pattern) -> f64,
    ) -> Self {
        let table = PatternsOnBox::new(window.clone(), alphabet_size)
            .map(|p| f(&p))
            .collect();
        LocalPotential {
            window,
            alphabet_size,
            table,
        }
    }

    pub fn constant(dim: usize, alphabet_size: usize, c: f64) -> Self {
        LocalPotential {
            window: LatticeBox::empty(dim),
            alphabet_size,
            table: vec![c],
        }
    }

    /// Single-site potential `x -> weight(x_0)`.
    pub fn single_site(dim: usize, weights: Vec<f64>) -> Self {
        let window =
            LatticeBox::from_points(dim, vec![LatticePoint::origin(dim)]).expect("origin");
        LocalPotential {
            window,
            alphabet_size: weights.len(),
            table: weights,
        }
    }

    pub fn window(&self) -> &LatticeBox {
        &self.window
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn window_radius(&self) -> u64 {
        self.window.radius()
    }

    fn index_of_values(&self, values: impl Iterator<Item = usize>) -> usize {
        let mut ix = 0usize;
        for v in values {
            ix = ix * self.alphabet_size + v;
        }
        ix
    }

    /// Value on a pattern whose domain contains the window.
    pub fn eval_pattern(&self, p: &Pattern) -> Result<f64> {
        let mut vals = Vec::with_capacity(self.window.len());
        for q in self.window.points() {
            match p.get(q) {
                Some(v) => vals.push(v),
                None => {
                    return Err(Error::Invalid(format!(
                        "pattern does not cover potential window at {q}"
                    )))
                }
            }
        }
        Ok(self.table[self.index_of_values(vals.into_iter())])
    }

    /// Value of `f` composed with the translation by `k`: reads the
    /// configuration on `window + k`.
    pub fn eval_shifted(&self, x: &FramedConfiguration, k: &LatticePoint) -> f64 {
        let ix = self.index_of_values(self.window.points().iter().map(|q| x.eval(&q.add(k))));
        self.table[ix]
    }

    pub fn eval(&self, x: &FramedConfiguration) -> f64 {
        let ix = self.index_of_values(self.window.points().iter().map(|q| x.eval(q)));
        self.table[ix]
    }

    /// Pointwise sum; windows are merged.
    pub fn add(&self, other: &LocalPotential) -> Result<LocalPotential> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::Invalid("alphabet size mismatch".into()));
        }
        let window = self.window.union(&other.window);
        let k = self.alphabet_size;
        let mut table = Vec::new();
        for p in PatternsOnBox::new(window.clone(), k) {
            table.push(self.eval_pattern(&p)? + other.eval_pattern(&p)?);
        }
        LocalPotential::new(window, k, table)
    }

    pub fn scale(&self, c: f64) -> LocalPotential {
        LocalPotential {
            window: self.window.clone(),
            alphabet_size: self.alphabet_size,
            table: self.table.iter().map(|v| c * v).collect(),
        }
    }
}

/// The oscillation of `f` over configurations agreeing on the centered box
/// of radius `n`, computed exactly over admissible pattern pairs. For
/// d >= 2 the collar over-approximation of the pattern language may
/// overestimate it, which is conservative for every bound consuming it.
pub fn variation(f: &LocalPotential, n: u64, spec: &SubshiftSpec, cap: u64) -> Result<f64> {
    let d = spec.dimension();
    let inner = centered_box(n, d, LatticeKind::Full);
    if f.window().is_subset_of(&inner) {
        return Ok(0.0);
    }
    let region = f.window().union(&inner);
    let pats = spec.enumerate_patterns(&region, cap)?;
    // group by the restriction to the agreement box, track min and max of f
    let mut groups: std::collections::HashMap<Vec<usize>, (f64, f64)> =
        std::collections::HashMap::new();
    for p in &pats {
        let key = p.restrict(&inner)?.values().to_vec();
        let v = f.eval_pattern(p)?;
        let entry = groups.entry(key).or_insert((v, v));
        entry.0 = entry.0.min(v);
        entry.1 = entry.1.max(v);
    }
    Ok(groups
        .values()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0, f64::max))
}

/// Variation sequence plus sup norm; everything the truncation bounds need.
#[derive(Debug, Clone)]
pub struct VariationProfile {
    /// `deltas[i]` is the variation at radius `i + 1`; zero beyond the
    /// window radius.
    pub deltas: Vec<f64>,
    pub sup_norm: f64,
    pub dimension: usize,
}

impl VariationProfile {
    /// Sum of `n^(d-1) * delta_n` from `n = n0` on (all terms are zero
    /// past the stored prefix).
    pub fn weighted_tail(&self, n0: u64) -> f64 {
        let d = self.dimension as i32;
        self.deltas
            .iter()
            .enumerate()
            .filter(|(i, _)| (i + 1) as u64 >= n0)
            .map(|(i, &dl)| ((i + 1) as f64).powi(d - 1) * dl)
            .sum()
    }

    /// The summable-variation norm.
    pub fn norm(&self) -> f64 {
        self.sup_norm + self.weighted_tail(1)
    }
}

/// Exact variation profile of a local potential over the subshift.
pub fn variation_profile(
    f: &LocalPotential,
    spec: &SubshiftSpec,
    cap: u64,
) -> Result<VariationProfile> {
    let radius = f.window_radius();
    let mut deltas = Vec::new();
    for n in 1..=radius {
        deltas.push(variation(f, n, spec, cap)?);
    }
    // sup norm over admissible window patterns
    let sup_norm = if f.window().is_empty() {
        f.table()[0].abs()
    } else {
        let pats = spec.enumerate_patterns(f.window(), cap)?;
        if pats.is_empty() {
            return Err(Error::EmptySubshift);
        }
        pats.iter()
            .map(|p| f.eval_pattern(p).map(f64::abs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    };
    Ok(VariationProfile {
        deltas,
        sup_norm,
        dimension: spec.dimension(),
    })
}

/// `||f||_inf + sum n^(d-1) * delta_n(f)`; finite because local potentials
/// have finitely many nonzero variations.
pub fn sv_norm(f: &LocalPotential, spec: &SubshiftSpec, cap: u64) -> Result<f64> {
    Ok(variation_profile(f, spec, cap)?.norm())
}

/// Finite-range translation-invariant interaction: a list of canonical
/// shapes with energy tables; the family is generated by translating each
/// shape over the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionPotential {
    dim: usize,
    alphabet_size: usize,
    terms: Vec<InteractionTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    /// Canonical representative: translated so its least point is the
    /// origin.
    pub shape: LatticeBox,
    /// One value per pattern on the shape, lexicographic order.
    pub table: Vec<f64>,
}

impl InteractionPotential {
    pub fn new(
        dim: usize,
        alphabet_size: usize,
        terms: Vec<(LatticeBox, Vec<f64>)>,
    ) -> Result<Self> {
        let mut canonical = Vec::new();
        for (shape, table) in terms {
            if shape.is_empty() {
                return Err(Error::Invalid("interaction shape must be nonempty".into()));
            }
            if shape.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: shape.dim(),
                });
            }
            let expected = (alphabet_size as u128).checked_pow(shape.len() as u32);
            if expected != Some(table.len() as u128) {
                return Err(Error::Invalid(
                    "interaction table size does not match its shape".into(),
                ));
            }
            // canonicalize: least point at the origin
            let least = shape.points()[0].clone();
            let shape = shape.translate(&least.neg());
            if canonical.iter().any(|t: &InteractionTerm| t.shape == shape) {
                return Err(Error::Invalid("duplicate interaction shape".into()));
            }
            canonical.push(InteractionTerm { shape, table });
        }
        Ok(InteractionPotential {
            dim,
            alphabet_size,
            terms: canonical,
        })
    }

    pub fn zero(dim: usize, alphabet_size: usize) -> Self {
        InteractionPotential {
            dim,
            alphabet_size,
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn terms(&self) -> &[InteractionTerm] {
        &self.terms
    }

    /// Largest sup-norm radius over the shapes.
    pub fn range(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.shape.radius())
            .max()
            .unwrap_or(0)
    }

    fn term_value(
        &self,
        term: &InteractionTerm,
        x: &FramedConfiguration,
        i: &LatticePoint,
    ) -> f64 {
        let mut ix = 0usize;
        for q in term.shape.points() {
            ix = ix * self.alphabet_size + x.eval(&q.add(i));
        }
        term.table[ix]
    }

    /// Energy of `x` in `volume`: the sum over all shape translates that
    /// meet the volume.
    pub fn hamiltonian(&self, volume: &LatticeBox, x: &FramedConfiguration) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            for i in volume.minkowski_diff(&term.shape).points() {
                total += self.term_value(term, x, i);
            }
        }
        total
    }

    /// Per-site local energy: minus the sum over shapes through the origin
    /// of table / |shape|, as a local potential on the union of the
    /// reflected shapes. For the Ising family this reproduces the
    /// nearest-neighbour site energy exactly, table for table.
    pub fn local_form(&self) -> LocalPotential {
        // translates of each shape that contain the origin read sites in
        // the union of shape - p over p in shape
        let mut window = LatticeBox::empty(self.dim);
        for term in &self.terms {
            for p in term.shape.points() {
                window = window.union(&term.shape.translate(&p.neg()));
            }
        }
        let k = self.alphabet_size;
        let mut table = Vec::new();
        for pat in PatternsOnBox::new(window.clone(), k) {
            let mut total = 0.0;
            for term in &self.terms {
                let weight = 1.0 / term.shape.len() as f64;
                for p in term.shape.points() {
                    let translate = p.neg();
                    let mut ix = 0usize;
                    for q in term.shape.points() {
                        ix = ix * k + pat.get(&q.add(&translate)).expect("window covers shape");
                    }
                    total -= weight * term.table[ix];
                }
            }
            table.push(total);
        }
        LocalPotential::new(window, k, table).expect("table built over the window")
    }

    /// Sum of sup norms over all shape translates containing the site;
    /// translation invariance makes the value independent of the site.
    pub fn absolute_sum_at(&self, _site: &LatticePoint) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            let sup = term.table.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            // one translate per point of the shape puts the site inside
            total += term.shape.len() as f64 * sup;
        }
        total
    }
}

/// Spin value of a symbol index over `{-1, +1}` (index 0 is -1).
pub fn spin(v: usize) -> f64 {
    2.0 * v as f64 - 1.0
}

/// The nearest-neighbour Ising pair: the interaction `-J x_i x_j` on
/// neighbouring pairs plus `-h x_i` on sites, and the matching site energy
/// `(J/2) sum of x_0 x_j over neighbours j + h x_0`.
pub fn ising(j: f64, h: f64, d: usize) -> (InteractionPotential, LocalPotential) {
    let k = 2usize;
    let mut terms = Vec::new();
    for axis in 0..d {
        let shape = LatticeBox::from_points(
            d,
            vec![LatticePoint::origin(d), LatticePoint::unit(d, axis)],
        )
        .unwrap();
        let mut table = Vec::with_capacity(4);
        for p in PatternsOnBox::new(shape.clone(), k) {
            let a = spin(p.values()[0]);
            let b = spin(p.values()[1]);
            table.push(-j * a * b);
        }
        terms.push((shape, table));
    }
    let site = LatticeBox::from_points(d, vec![LatticePoint::origin(d)]).unwrap();
    terms.push((site, vec![-h * spin(0), -h * spin(1)]));
    let phi = InteractionPotential::new(d, k, terms).expect("ising terms are well formed");

    let mut window_pts = vec![LatticePoint::origin(d)];
    for axis in 0..d {
        window_pts.push(LatticePoint::unit(d, axis));
        window_pts.push(LatticePoint::unit(d, axis).neg());
    }
    let window = LatticeBox::from_points(d, window_pts).unwrap();
    let origin = LatticePoint::origin(d);
    let f = LocalPotential::from_fn(window, k, |p| {
        let s0 = spin(p.get(&origin).unwrap());
        let mut acc = h * s0;
        for axis in 0..d {
            let e = LatticePoint::unit(d, axis);
            acc += 0.5 * j * s0 * spin(p.get(&e).unwrap());
            acc += 0.5 * j * s0 * spin(p.get(&e.neg()).unwrap());
        }
        acc
    });
    (phi, f)
}
