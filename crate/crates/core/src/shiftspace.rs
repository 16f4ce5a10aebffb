//! Alphabets, patterns, subshift specifications, admissibility oracles,
//! framed configurations, the shift action, and the word metric.
//!
//! Membership in a subshift is undecidable in general for d >= 2, so the
//! admissibility notion exposed here is exact for d = 1 (essential-graph
//! membership) and locally-admissible-with-collar for d >= 2. Framed
//! configurations glue a finite pattern onto a validated periodic
//! background, which makes their admissibility decidable in any dimension.

use crate::error::{Error, Result};
use crate::lattice::{centered_box, LatticeBox, LatticeKind, LatticePoint};
use std::collections::{HashMap, HashSet};

/// Finite ordered set of distinct symbol names; index order is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Invalid("alphabet must be nonempty".into()));
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.clone()) {
                return Err(Error::Invalid(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet::new(vec!["0".into(), "1".into()]).unwrap()
    }

    /// Spin alphabet `{-1, +1}` with index 0 mapped to -1.
    pub fn spins() -> Self {
        Alphabet::new(vec!["-1".into(), "+1".into()]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, idx: usize) -> &str {
        &self.symbols[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// A finite association from lattice points to symbol indices; the unit of
/// cylinders, kernel tables, and potential tables. Values are aligned with
/// the sorted point order of the domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    domain: LatticeBox,
    values: Vec<usize>,
}

impl Pattern {
    pub fn new(domain: LatticeBox, values: Vec<usize>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::Invalid(format!(
                "pattern has {} values for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        Ok(Pattern { domain, values })
    }

    pub fn empty(dim: usize) -> Self {
        Pattern {
            domain: LatticeBox::empty(dim),
            values: Vec::new(),
        }
    }

    /// 1D word on the interval `[start, start + len - 1]`.
    pub fn word(start: i64, values: Vec<usize>) -> Self {
        let domain = LatticeBox::interval(start, start + values.len() as i64 - 1);
        Pattern { domain, values }
    }

    pub fn domain(&self) -> &LatticeBox {
        &self.domain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, p: &LatticePoint) -> Option<usize> {
        self.domain.index_of(p).map(|ix| self.values[ix])
    }

    pub fn translate(&self, j: &LatticePoint) -> Pattern {
        Pattern {
            domain: self.domain.translate(j),
            values: self.values.clone(),
        }
    }

    /// Restriction to `sub`, which must be contained in the domain.
    pub fn restrict(&self, sub: &LatticeBox) -> Result<Pattern> {
        let mut values = Vec::with_capacity(sub.len());
        for p in sub.points() {
            match self.get(p) {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::Invalid(format!(
                        "restriction target point {p} outside pattern domain"
                    )))
                }
            }
        }
        Ok(Pattern {
            domain: sub.clone(),
            values,
        })
    }

    /// Glue two patterns with disjoint domains into one on the union.
    pub fn juxtapose(eta: &Pattern, zeta: &Pattern) -> Result<Pattern> {
        for p in eta.domain.points() {
            if zeta.domain.contains(p) {
                return Err(Error::OverlappingDomains(p.to_string()));
            }
        }
        let domain = eta.domain.union(&zeta.domain);
        let values = domain
            .points()
            .iter()
            .map(|p| eta.get(p).or_else(|| zeta.get(p)).unwrap())
            .collect();
        Ok(Pattern { domain, values })
    }

    /// Symbol string in point order: concatenated when every symbol name is
    /// a single character, comma-separated otherwise.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let single = alphabet.symbols().iter().all(|s| s.chars().count() == 1);
        let names: Vec<&str> = self.values.iter().map(|&v| alphabet.symbol(v)).collect();
        if single {
            names.concat()
        } else {
            names.join(",")
        }
    }
}

/// Iterator over all value assignments on a fixed domain, in lexicographic
/// order (first point most significant).
pub struct PatternsOnBox {
    domain: LatticeBox,
    k: usize,
    current: Option<Vec<usize>>,
}

impl PatternsOnBox {
    pub fn new(domain: LatticeBox, k: usize) -> Self {
        let current = if k == 0 && !domain.is_empty() {
            None
        } else {
            Some(vec![0; domain.len()])
        };
        PatternsOnBox { domain, k, current }
    }
}

impl Iterator for PatternsOnBox {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        let cur = self.current.take()?;
        let out = Pattern {
            domain: self.domain.clone(),
            values: cur.clone(),
        };
        // advance the odometer, last site fastest
        let mut next = cur;
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] + 1 < self.k {
                next[i] += 1;
                for v in next.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Number of patterns on a region, guarded against the enumeration cap.
pub fn pattern_count(k: usize, sites: usize, cap: u64) -> Result<u64> {
    let mut n: u128 = 1;
    for _ in 0..sites {
        n = n.saturating_mul(k as u128);
        if n > cap as u128 {
            return Err(Error::CapExceeded { needed: n, cap });
        }
    }
    Ok(n as u64)
}

/// The defining rule of a subshift.
#[derive(Debug, Clone)]
pub enum SubshiftRule {
    /// Finite family of forbidden patterns on their own domains.
    Forbidden(Vec<Pattern>),
    /// One 0/1 transition matrix per axis, indexed by symbol pairs.
    Matrices(Vec<Vec<Vec<u8>>>),
}

/// Alphabet plus rule; the admissibility oracle for everything downstream.
#[derive(Debug, Clone)]
pub struct SubshiftSpec {
    alphabet: Alphabet,
    dimension: usize,
    rule: SubshiftRule,
    /// Smallest centered box containing all forbidden-pattern domains, or
    /// the hull of `{0, e_1, ..., e_d}` for matrix rules.
    window: LatticeBox,
    /// Forbidden patterns grouped by domain, as value-vector sets.
    groups: Vec<(LatticeBox, HashSet<Vec<usize>>)>,
    oracle_1d: Option<WordOracle>,
}

impl SubshiftSpec {
    pub fn from_forbidden(
        alphabet: Alphabet,
        dimension: usize,
        forbidden: Vec<Pattern>,
    ) -> Result<Self> {
        let k = alphabet.len();
        let mut radius = 0u64;
        for p in &forbidden {
            if p.domain().dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: p.domain().dim(),
                });
            }
            if p.domain().is_empty() {
                return Err(Error::Invalid("forbidden pattern on empty domain".into()));
            }
            if p.values().iter().any(|&v| v >= k) {
                return Err(Error::Invalid("forbidden pattern symbol out of range".into()));
            }
            radius = radius.max(p.domain().radius());
        }
        let window = if forbidden.is_empty() {
            LatticeBox::from_points(dimension, vec![LatticePoint::origin(dimension)])?
        } else {
            centered_box(radius + 1, dimension, LatticeKind::Full)
        };
        let mut groups: Vec<(LatticeBox, HashSet<Vec<usize>>)> = Vec::new();
        for p in &forbidden {
            match groups.iter_mut().find(|(d, _)| d == p.domain()) {
                Some((_, set)) => {
                    set.insert(p.values().to_vec());
                }
                None => {
                    let mut set = HashSet::new();
                    set.insert(p.values().to_vec());
                    groups.push((p.domain().clone(), set));
                }
            }
        }
        let mut spec = SubshiftSpec {
            alphabet,
            dimension,
            rule: SubshiftRule::Forbidden(forbidden),
            window,
            groups,
            oracle_1d: None,
        };
        if dimension == 1 {
            spec.oracle_1d = Some(WordOracle::build(&spec)?);
        }
        Ok(spec)
    }

    pub fn from_matrices(
        alphabet: Alphabet,
        dimension: usize,
        matrices: Vec<Vec<Vec<u8>>>,
    ) -> Result<Self> {
        let k = alphabet.len();
        if matrices.len() != dimension {
            return Err(Error::Invalid(format!(
                "expected {dimension} transition matrices, got {}",
                matrices.len()
            )));
        }
        for m in &matrices {
            if m.len() != k || m.iter().any(|row| row.len() != k) {
                return Err(Error::Invalid("transition matrix is not square over the alphabet".into()));
            }
            if m.iter().flatten().any(|&e| e > 1) {
                return Err(Error::Invalid("transition matrix entries must be 0 or 1".into()));
            }
        }
        let mut pts = vec![LatticePoint::origin(dimension)];
        for axis in 0..dimension {
            pts.push(LatticePoint::unit(dimension, axis));
        }
        let window = LatticeBox::from_points(dimension, pts)?;
        let mut spec = SubshiftSpec {
            alphabet,
            dimension,
            rule: SubshiftRule::Matrices(matrices),
            window,
            groups: Vec::new(),
            oracle_1d: None,
        };
        if dimension == 1 {
            spec.oracle_1d = Some(WordOracle::build(&spec)?);
        }
        Ok(spec)
    }

    pub fn full_shift(alphabet: Alphabet, dimension: usize) -> Self {
        SubshiftSpec::from_forbidden(alphabet, dimension, Vec::new())
            .expect("empty forbidden family is always valid")
    }

    /// Binary shift forbidding two consecutive 1s.
    pub fn golden_mean() -> Self {
        let forbidden = vec![Pattern::word(0, vec![1, 1])];
        SubshiftSpec::from_forbidden(Alphabet::binary(), 1, forbidden).unwrap()
    }

    /// The even shift's forbidden family truncated at window `n`:
    /// the words `1 0^(2k-1) 1` for `k = 1..=n`.
    pub fn even_shift_truncated(n: u64) -> Self {
        let mut forbidden = Vec::new();
        for k in 1..=n {
            let mut vals = vec![0usize; 2 * k as usize + 1];
            vals[0] = 1;
            *vals.last_mut().unwrap() = 1;
            forbidden.push(Pattern::word(-(k as i64), vals));
        }
        SubshiftSpec::from_forbidden(Alphabet::binary(), 1, forbidden).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rule(&self) -> &SubshiftRule {
        &self.rule
    }

    pub fn window(&self) -> &LatticeBox {
        &self.window
    }

    /// Largest sup-norm reach of the rule around a site.
    pub fn window_radius(&self) -> u64 {
        match &self.rule {
            SubshiftRule::Forbidden(_) => self
                .groups
                .iter()
                .map(|(d, _)| d.radius())
                .max()
                .unwrap_or(0),
            SubshiftRule::Matrices(_) => 1,
        }
    }

    /// True iff no translate of a forbidden pattern (or matrix violation)
    /// occurs fully inside the pattern's domain.
    pub fn is_locally_admissible(&self, p: &Pattern) -> bool {
        match &self.rule {
            SubshiftRule::Forbidden(_) => {
                for (dom, set) in &self.groups {
                    // translates j with dom + j inside the pattern's domain
                    for j in p.domain().minkowski_diff(dom).points() {
                        let mut vals = Vec::with_capacity(dom.len());
                        let mut inside = true;
                        for q in dom.points() {
                            match p.get(&q.add(j)) {
                                Some(v) => vals.push(v),
                                None => {
                                    inside = false;
                                    break;
                                }
                            }
                        }
                        if inside && set.contains(&vals) {
                            return false;
                        }
                    }
                }
                true
            }
            SubshiftRule::Matrices(mats) => {
                for (ix, q) in p.domain().points().iter().enumerate() {
                    for (axis, m) in mats.iter().enumerate() {
                        let next = q.add(&LatticePoint::unit(self.dimension, axis));
                        if let Some(v) = p.get(&next) {
                            if m[p.values()[ix]][v] == 0 {
                                return false;
                            }
                        }
                    }
                }
                true
            }
        }
    }

    /// Exact membership oracle for 1D words: locally admissible and both
    /// end blocks survive trimming of the transition graph to its
    /// essential part (so the word extends to a bi-infinite point).
    pub fn is_admissible_1d(&self, p: &Pattern) -> Result<bool> {
        if self.dimension != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dimension,
            });
        }
        let oracle = self.oracle_1d.as_ref().expect("1D specs carry an oracle");
        if p.domain().is_rect() {
            return Ok(oracle.word_admissible(p.values()));
        }
        // gapped domain: admissible iff some filling of the hull is
        let hull = p.domain().hull();
        let free: Vec<usize> = hull
            .points()
            .iter()
            .enumerate()
            .filter(|(_, q)| !p.domain().contains(q))
            .map(|(i, _)| i)
            .collect();
        pattern_count(self.alphabet.len(), free.len(), 1 << 20)?;
        let mut word: Vec<usize> = hull
            .points()
            .iter()
            .map(|q| p.get(q).unwrap_or(0))
            .collect();
        let k = self.alphabet.len();
        let mut assignment = vec![0usize; free.len()];
        loop {
            for (slot, &pos) in assignment.iter().zip(free.iter()) {
                word[pos] = *slot;
            }
            if oracle.word_admissible(&word) {
                return Ok(true);
            }
            let mut i = assignment.len();
            loop {
                if i == 0 {
                    return Ok(false);
                }
                i -= 1;
                if assignment[i] + 1 < k {
                    assignment[i] += 1;
                    for a in assignment.iter_mut().skip(i + 1) {
                        *a = 0;
                    }
                    break;
                }
            }
        }
    }

    /// True when the transition graph trims to nothing (d = 1 only).
    pub fn is_empty_1d(&self) -> bool {
        self.oracle_1d
            .as_ref()
            .map(|o| !o.essential_nonempty())
            .unwrap_or(false)
    }

    /// Collar sites read by rule translates that touch `region`.
    pub fn collar(&self, region: &LatticeBox) -> LatticeBox {
        let mut collar = LatticeBox::empty(self.dimension);
        let domains: Vec<LatticeBox> = match &self.rule {
            SubshiftRule::Forbidden(_) => self.groups.iter().map(|(d, _)| d.clone()).collect(),
            SubshiftRule::Matrices(_) => (0..self.dimension)
                .map(|axis| {
                    LatticeBox::from_points(
                        self.dimension,
                        vec![
                            LatticePoint::origin(self.dimension),
                            LatticePoint::unit(self.dimension, axis),
                        ],
                    )
                    .unwrap()
                })
                .collect(),
        };
        for dom in &domains {
            let translates = region.minkowski_diff(dom);
            collar = collar.union(&translates.minkowski_sum(dom));
        }
        collar.difference(region)
    }

    /// Existence of a locally admissible extension of `p` to its domain
    /// dilated by the rule window (backtracking over collar sites). This is
    /// the d >= 2 stand-in for membership in the pattern language; it may
    /// over-approximate.
    pub fn is_admissible_with_collar(&self, p: &Pattern) -> Result<bool> {
        if !self.is_locally_admissible(p) {
            return Ok(false);
        }
        let collar = self.collar(p.domain());
        pattern_count(self.alphabet.len(), collar.len(), 1 << 22)?;
        let mut assigned: HashMap<LatticePoint, usize> = HashMap::new();
        for (q, &v) in p.domain().points().iter().zip(p.values()) {
            assigned.insert(q.clone(), v);
        }
        Ok(self.extend_collar(&collar, 0, &mut assigned))
    }

    fn extend_collar(
        &self,
        collar: &LatticeBox,
        next: usize,
        assigned: &mut HashMap<LatticePoint, usize>,
    ) -> bool {
        if next == collar.len() {
            return true;
        }
        let site = &collar.points()[next];
        for v in 0..self.alphabet.len() {
            assigned.insert(site.clone(), v);
            if self.partial_ok(site, assigned) && self.extend_collar(collar, next + 1, assigned) {
                return true;
            }
        }
        assigned.remove(site);
        false
    }

    /// Check every rule translate that contains `site` and is fully
    /// assigned.
    fn partial_ok(&self, site: &LatticePoint, assigned: &HashMap<LatticePoint, usize>) -> bool {
        match &self.rule {
            SubshiftRule::Forbidden(_) => {
                for (dom, set) in &self.groups {
                    for q in dom.points() {
                        let j = site.sub(q);
                        let mut vals = Vec::with_capacity(dom.len());
                        let mut complete = true;
                        for r in dom.points() {
                            match assigned.get(&r.add(&j)) {
                                Some(&v) => vals.push(v),
                                None => {
                                    complete = false;
                                    break;
                                }
                            }
                        }
                        if complete && set.contains(&vals) {
                            return false;
                        }
                    }
                }
                true
            }
            SubshiftRule::Matrices(mats) => {
                let v = assigned[site];
                for (axis, m) in mats.iter().enumerate() {
                    let e = LatticePoint::unit(self.dimension, axis);
                    if let Some(&w) = assigned.get(&site.add(&e)) {
                        if m[v][w] == 0 {
                            return false;
                        }
                    }
                    if let Some(&u) = assigned.get(&site.sub(&e)) {
                        if m[u][v] == 0 {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Ordered list of patterns on `region` passing the exact oracle
    /// (d = 1) or the collar over-approximation (d >= 2).
    pub fn enumerate_patterns(&self, region: &LatticeBox, cap: u64) -> Result<Vec<Pattern>> {
        pattern_count(self.alphabet.len(), region.len(), cap)?;
        let mut out = Vec::new();
        if self.dimension == 1 && !region.is_rect() && !region.is_empty() {
            // project admissible hull words onto the gapped region
            let hull = region.hull();
            pattern_count(self.alphabet.len(), hull.len(), cap)?;
            let mut seen = HashSet::new();
            for p in PatternsOnBox::new(hull.clone(), self.alphabet.len()) {
                if self.is_admissible_1d(&p)? {
                    let q = p.restrict(region)?;
                    if seen.insert(q.values().to_vec()) {
                        out.push(q);
                    }
                }
            }
            out.sort();
            return Ok(out);
        }
        for p in PatternsOnBox::new(region.clone(), self.alphabet.len()) {
            let keep = if self.dimension == 1 {
                self.is_admissible_1d(&p)?
            } else {
                self.is_admissible_with_collar(&p)?
            };
            if keep {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Exact admissibility of a glued configuration: the background is
    /// periodic and pre-validated, so it is enough to check every rule
    /// translate that touches the frame.
    pub fn is_point(&self, x: &FramedConfiguration) -> bool {
        if x.frame().is_empty() {
            return true;
        }
        match &self.rule {
            SubshiftRule::Forbidden(_) => {
                for (dom, set) in &self.groups {
                    for j in x.frame().minkowski_diff(dom).points() {
                        let vals: Vec<usize> =
                            dom.points().iter().map(|q| x.eval(&q.add(j))).collect();
                        if set.contains(&vals) {
                            return false;
                        }
                    }
                }
                true
            }
            SubshiftRule::Matrices(mats) => {
                for q in x.frame().points() {
                    for (axis, m) in mats.iter().enumerate() {
                        let e = LatticePoint::unit(self.dimension, axis);
                        if m[x.eval(q)][x.eval(&q.add(&e))] == 0 {
                            return false;
                        }
                        if m[x.eval(&q.sub(&e))][x.eval(q)] == 0 {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }
}

/// Transition graph on (w-1)-blocks for exact 1D membership. Vertices with
/// no outgoing or no incoming edge are trimmed iteratively; the surviving
/// essential part carries exactly the bi-infinite points.
#[derive(Debug, Clone)]
struct WordOracle {
    block_len: usize,
    index: HashMap<Vec<usize>, usize>,
    blocks: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    essential: Vec<bool>,
}

impl WordOracle {
    fn build(spec: &SubshiftSpec) -> Result<WordOracle> {
        let k = spec.alphabet.len();
        let span = match &spec.rule {
            SubshiftRule::Forbidden(f) => f
                .iter()
                .map(|p| p.domain().hull().len())
                .max()
                .unwrap_or(1),
            SubshiftRule::Matrices(_) => 2,
        };
        let w = span.max(2);
        let block_len = w - 1;
        pattern_count(k, block_len, 1 << 24)?;
        let mut blocks = Vec::new();
        let mut index = HashMap::new();
        for p in PatternsOnBox::new(LatticeBox::interval(0, block_len as i64 - 1), k) {
            if spec.is_locally_admissible(&p) {
                index.insert(p.values().to_vec(), blocks.len());
                blocks.push(p.values().to_vec());
            }
        }
        let n = blocks.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut merged = vec![0usize; w];
        for (u, ub) in blocks.iter().enumerate() {
            merged[..block_len].copy_from_slice(ub);
            for c in 0..k {
                merged[block_len] = c;
                let tail = &merged[1..];
                if let Some(&v) = index.get(tail) {
                    let mp = Pattern::word(0, merged.clone());
                    if spec.is_locally_admissible(&mp) {
                        out_edges[u].push(v);
                    }
                }
            }
        }
        // trim to the essential part
        let mut alive = vec![true; n];
        loop {
            let mut removed = false;
            let mut in_deg = vec![0usize; n];
            let mut out_deg = vec![0usize; n];
            for u in 0..n {
                if !alive[u] {
                    continue;
                }
                for &v in &out_edges[u] {
                    if alive[v] {
                        out_deg[u] += 1;
                        in_deg[v] += 1;
                    }
                }
            }
            for u in 0..n {
                if alive[u] && (in_deg[u] == 0 || out_deg[u] == 0) {
                    alive[u] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        Ok(WordOracle {
            block_len,
            index,
            blocks,
            out_edges,
            essential: alive,
        })
    }

    fn essential_nonempty(&self) -> bool {
        self.essential.iter().any(|&e| e)
    }

    fn word_admissible(&self, word: &[usize]) -> bool {
        // local admissibility first: every block and transition must exist
        if word.len() >= self.block_len {
            for t in 0..=(word.len() - self.block_len) {
                let b = &word[t..t + self.block_len];
                match self.index.get(b) {
                    None => return false,
                    Some(&u) => {
                        if t + self.block_len < word.len() {
                            let next = &word[t + 1..t + 1 + self.block_len];
                            match self.index.get(next) {
                                None => return false,
                                Some(&v) => {
                                    if !self.out_edges[u].contains(&v) {
                                        return false;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            let first = self.index[&word[..self.block_len].to_vec()];
            let last = self.index[&word[word.len() - self.block_len..].to_vec()];
            self.essential[first] && self.essential[last]
        } else {
            // short word: an essential block must begin with it
            self.blocks
                .iter()
                .enumerate()
                .any(|(i, b)| self.essential[i] && b[..word.len()] == *word)
        }
    }
}

/// Axis-aligned periodic configuration: a fundamental cell repeated along
/// each axis, with a phase offset so that shifted configurations stay
/// comparable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicBackground {
    dim: usize,
    periods: Vec<u64>,
    cell: Vec<usize>,
    offset: Vec<i64>,
}

impl PeriodicBackground {
    /// `cell` holds the values on the rectangle `[0, p_1) x ... x [0, p_d)`
    /// in lexicographic point order.
    pub fn new(periods: Vec<u64>, cell: Vec<usize>) -> Result<Self> {
        let dim = periods.len();
        if dim == 0 || periods.contains(&0) {
            return Err(Error::Invalid("background periods must be positive".into()));
        }
        let volume: u64 = periods.iter().product();
        if cell.len() as u64 != volume {
            return Err(Error::Invalid(format!(
                "background cell has {} values for a {volume}-site fundamental domain",
                cell.len()
            )));
        }
        Ok(PeriodicBackground {
            dim,
            periods,
            cell,
            offset: vec![0; dim],
        })
    }

    /// Constant background.
    pub fn uniform(dim: usize, symbol: usize) -> Self {
        PeriodicBackground {
            dim,
            periods: vec![1; dim],
            cell: vec![symbol],
            offset: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value_at(&self, p: &LatticePoint) -> usize {
        let mut flat = 0usize;
        for (axis, &c) in p.0.iter().enumerate() {
            let period = self.periods[axis] as i64;
            let reduced = (c + self.offset[axis]).rem_euclid(period) as usize;
            flat = flat * self.periods[axis] as usize + reduced;
        }
        self.cell[flat]
    }

    fn shifted(&self, j: &LatticePoint) -> PeriodicBackground {
        let mut out = self.clone();
        for (axis, o) in out.offset.iter_mut().enumerate() {
            *o = (*o + j.0[axis]).rem_euclid(self.periods[axis] as i64);
        }
        out
    }

    /// Every rule translate based in one fundamental cell must be allowed;
    /// by periodicity that covers the whole lattice.
    pub fn validate(&self, spec: &SubshiftSpec) -> Result<()> {
        if spec.dimension() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                got: self.dim,
            });
        }
        if self.cell.iter().any(|&v| v >= spec.alphabet().len()) {
            return Err(Error::Invalid("background symbol out of range".into()));
        }
        let hi: Vec<i64> = self.periods.iter().map(|&p| p as i64 - 1).collect();
        let cell_box = LatticeBox::rect(&vec![0; self.dim], &hi)?;
        match spec.rule() {
            SubshiftRule::Forbidden(_) => {
                for (dom, set) in &spec.groups {
                    for j in cell_box.points() {
                        let vals: Vec<usize> = dom
                            .points()
                            .iter()
                            .map(|q| self.value_at(&q.add(j)))
                            .collect();
                        if set.contains(&vals) {
                            return Err(Error::Inadmissible(format!(
                                "background hits a forbidden pattern at translate {j}"
                            )));
                        }
                    }
                }
            }
            SubshiftRule::Matrices(mats) => {
                for j in cell_box.points() {
                    for (axis, m) in mats.iter().enumerate() {
                        let e = LatticePoint::unit(self.dim, axis);
                        let a = self.value_at(j);
                        let b = self.value_at(&j.add(&e));
                        if m[a][b] == 0 {
                            return Err(Error::Inadmissible(format!(
                                "background breaks transition matrix {axis} at {j}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A pattern on a finite frame glued onto a periodic admissible
/// background; stands in for a point of the subshift. Equality is
/// pointwise: two configurations are equal when they share a background
/// and agree at every site, whatever their frames.
#[derive(Debug, Clone)]
pub struct FramedConfiguration {
    frame: LatticeBox,
    values: Vec<usize>,
    background: PeriodicBackground,
}

impl PartialEq for FramedConfiguration {
    fn eq(&self, other: &Self) -> bool {
        if self.background != other.background {
            return false;
        }
        let union = self.frame.union(&other.frame);
        union.points().iter().all(|p| self.eval(p) == other.eval(p))
    }
}

impl Eq for FramedConfiguration {}

impl FramedConfiguration {
    pub fn new(interior: Pattern, background: PeriodicBackground) -> Result<Self> {
        if interior.domain().dim() != background.dim() {
            return Err(Error::DimensionMismatch {
                expected: background.dim(),
                got: interior.domain().dim(),
            });
        }
        Ok(FramedConfiguration {
            frame: interior.domain().clone(),
            values: interior.values().to_vec(),
            background,
        })
    }

    pub fn background_only(background: PeriodicBackground) -> Self {
        let dim = background.dim();
        FramedConfiguration {
            frame: LatticeBox::empty(dim),
            values: Vec::new(),
            background,
        }
    }

    pub fn frame(&self) -> &LatticeBox {
        &self.frame
    }

    pub fn background(&self) -> &PeriodicBackground {
        &self.background
    }

    pub fn dim(&self) -> usize {
        self.background.dim()
    }

    /// Value at any lattice point: interior overrides background.
    pub fn eval(&self, p: &LatticePoint) -> usize {
        match self.frame.index_of(p) {
            Some(ix) => self.values[ix],
            None => self.background.value_at(p),
        }
    }

    /// Read the configuration on an arbitrary finite region.
    pub fn read(&self, region: &LatticeBox) -> Pattern {
        let values = region.points().iter().map(|p| self.eval(p)).collect();
        Pattern {
            domain: region.clone(),
            values,
        }
    }

    /// Override with a pattern, enlarging the frame as needed.
    pub fn with_pattern(&self, p: &Pattern) -> FramedConfiguration {
        let frame = self.frame.union(p.domain());
        let values = frame
            .points()
            .iter()
            .map(|q| p.get(q).unwrap_or_else(|| self.eval(q)))
            .collect();
        FramedConfiguration {
            frame,
            values,
            background: self.background.clone(),
        }
    }

    pub fn same_background(&self, other: &FramedConfiguration) -> bool {
        self.background == other.background
    }

    /// Sites where the two configurations disagree (finite because the
    /// backgrounds coincide).
    pub fn differing_sites(&self, other: &FramedConfiguration) -> Result<Vec<LatticePoint>> {
        if !self.same_background(other) {
            return Err(Error::BackgroundMismatch);
        }
        let union = self.frame.union(&other.frame);
        Ok(union
            .points()
            .iter()
            .filter(|p| self.eval(p) != other.eval(p))
            .cloned()
            .collect())
    }
}

/// The translation action: evaluating the result at `i` gives `x` at
/// `i + j`, so the frame moves by `-j`.
pub fn shift(x: &FramedConfiguration, j: &LatticePoint) -> FramedConfiguration {
    let neg = j.neg();
    FramedConfiguration {
        frame: x.frame.translate(&neg),
        values: x.values.clone(),
        background: x.background.shifted(j),
    }
}

/// Distance between two configurations sharing a background, as a dyadic
/// rational kept in exponent form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicDistance {
    Zero,
    /// `2^(-exponent)` with `exponent >= 0`.
    PowerOfTwo { exponent: u64 },
}

impl DyadicDistance {
    pub fn value(&self) -> f64 {
        match self {
            DyadicDistance::Zero => 0.0,
            DyadicDistance::PowerOfTwo { exponent } => 0.5f64.powi(*exponent as i32),
        }
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicDistance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use DyadicDistance::*;
        match (self, other) {
            (Zero, Zero) => std::cmp::Ordering::Equal,
            (Zero, _) => std::cmp::Ordering::Less,
            (_, Zero) => std::cmp::Ordering::Greater,
            // larger exponent means smaller distance
            (PowerOfTwo { exponent: a }, PowerOfTwo { exponent: b }) => b.cmp(a),
        }
    }
}

/// `2^(-n)` where `n` is the radius of the largest centered box on which
/// the two configurations agree; zero when they agree everywhere.
pub fn metric(x: &FramedConfiguration, y: &FramedConfiguration) -> Result<DyadicDistance> {
    let diff = x.differing_sites(y)?;
    match diff.iter().map(|p| p.sup_norm()).min() {
        None => Ok(DyadicDistance::Zero),
        Some(n) => Ok(DyadicDistance::PowerOfTwo { exponent: n }),
    }
}
