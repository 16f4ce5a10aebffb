//! Exact one-dimensional thermodynamics: transfer matrices, pressure via
//! the Perron eigenvalue, equilibrium Markov measures, cylinder
//! probabilities, and variational-principle gap checks.

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::potentials::{spin, LocalPotential};
use crate::shiftspace::{Pattern, SubshiftRule, SubshiftSpec};

const RAYLEIGH_TOL: f64 = 1e-12;
const VECTOR_TOL: f64 = 1e-15;
const MAX_ITERS: usize = 500_000;

/// Energy assigned to one transition `(a, b)`, the pair convention used by
/// the transfer matrix. A site-indexed potential recodes to this form by
/// giving each bond its full pair energy and half of each endpoint's
/// on-site term.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEnergy {
    values: Vec<Vec<f64>>,
}

impl PairEnergy {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.len();
        if k == 0 || values.iter().any(|r| r.len() != k) {
            return Err(Error::Invalid("pair energy table must be square".into()));
        }
        Ok(PairEnergy { values })
    }

    pub fn zero(k: usize) -> Self {
        PairEnergy {
            values: vec![vec![0.0; k]; k],
        }
    }

    /// `J a b + (h/2)(a + b)` over spins; the half field keeps the Birkhoff
    /// sums of the site form and the bond form equal on stationary
    /// measures.
    pub fn ising(j: f64, h: f64) -> Self {
        let mut values = vec![vec![0.0; 2]; 2];
        for (a, row) in values.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = j * spin(a) * spin(b) + 0.5 * h * (spin(a) + spin(b));
            }
        }
        PairEnergy { values }
    }

    /// Recode a local potential to pair form. Accepted windows: empty
    /// (constant), a single site (half-split onto both transition ends),
    /// or two consecutive sites (read directly).
    pub fn from_local(f: &LocalPotential) -> Result<Self> {
        let k = f.alphabet_size();
        let w = f.window();
        if w.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: w.dim(),
            });
        }
        let mut values = vec![vec![0.0; k]; k];
        match w.len() {
            0 => {
                let c = f.table()[0];
                for row in values.iter_mut() {
                    for v in row.iter_mut() {
                        *v = c;
                    }
                }
            }
            1 => {
                for (a, row) in values.iter_mut().enumerate() {
                    for (b, v) in row.iter_mut().enumerate() {
                        let fa = f
                            .eval_pattern(&Pattern::new(w.clone(), vec![a]).unwrap())
                            .unwrap();
                        let fb = f
                            .eval_pattern(&Pattern::new(w.clone(), vec![b]).unwrap())
                            .unwrap();
                        *v = 0.5 * (fa + fb);
                    }
                }
            }
            2 => {
                let pts = w.points();
                let step = pts[1].sub(&pts[0]);
                if step != LatticePoint(vec![1]) {
                    return Err(Error::WindowTooWide(format!(
                        "pair window must be two consecutive sites, got step {step}"
                    )));
                }
                for (a, row) in values.iter_mut().enumerate() {
                    for (b, v) in row.iter_mut().enumerate() {
                        *v = f
                            .eval_pattern(&Pattern::new(w.clone(), vec![a, b]).unwrap())
                            .unwrap();
                    }
                }
            }
            n => {
                return Err(Error::WindowTooWide(format!(
                    "window has {n} sites; recode to a pair potential first"
                )))
            }
        }
        Ok(PairEnergy { values })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a][b]
    }

    pub fn shifted(&self, c: f64) -> PairEnergy {
        PairEnergy {
            values: self
                .values
                .iter()
                .map(|r| r.iter().map(|v| v + c).collect())
                .collect(),
        }
    }
}

/// `M(a, b) = A(a, b) exp(g(a, b))`, stored in log domain (forbidden
/// transitions are negative infinity).
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    log_entries: Vec<Vec<f64>>,
}

/// Extract the 0/1 transition structure of a 1D spec whose rule fits in a
/// two-site window.
fn transition_structure(spec: &SubshiftSpec) -> Result<Vec<Vec<bool>>> {
    if spec.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: spec.dimension(),
        });
    }
    let k = spec.alphabet().len();
    let mut allowed = vec![vec![true; k]; k];
    match spec.rule() {
        SubshiftRule::Matrices(mats) => {
            for (a, row) in allowed.iter_mut().enumerate() {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = mats[0][a][b] == 1;
                }
            }
        }
        SubshiftRule::Forbidden(family) => {
            for p in family {
                let dom = p.domain();
                match dom.len() {
                    1 => {
                        // a forbidden symbol: kill its row and column
                        let s = p.values()[0];
                        for (a, row) in allowed.iter_mut().enumerate() {
                            for (b, v) in row.iter_mut().enumerate() {
                                if a == s || b == s {
                                    *v = false;
                                }
                            }
                        }
                    }
                    2 => {
                        let step = dom.points()[1].sub(&dom.points()[0]);
                        if step != LatticePoint(vec![1]) {
                            return Err(Error::WindowTooWide(format!(
                                "forbidden pattern spans a gap of {step}"
                            )));
                        }
                        allowed[p.values()[0]][p.values()[1]] = false;
                    }
                    n => {
                        return Err(Error::WindowTooWide(format!(
                            "forbidden pattern on {n} sites; the transfer matrix needs a two-site window"
                        )))
                    }
                }
            }
        }
    }
    Ok(allowed)
}

/// Perron data of an irreducible transfer matrix.
#[derive(Debug, Clone)]
pub struct PerronData {
    /// Log of the Perron eigenvalue.
    pub log_lambda: f64,
    /// Right and left eigenvectors over the full alphabet (zero outside
    /// the essential support).
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub support: Vec<bool>,
    pub iterations: usize,
}

impl TransferMatrix {
    pub fn new(spec: &SubshiftSpec, g: &PairEnergy) -> Result<Self> {
        let allowed = transition_structure(spec)?;
        let k = spec.alphabet().len();
        if g.size() != k {
            return Err(Error::Invalid(format!(
                "pair energy over {} symbols, alphabet has {k}",
                g.size()
            )));
        }
        let mut log_entries = vec![vec![f64::NEG_INFINITY; k]; k];
        for (a, row) in log_entries.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                if allowed[a][b] {
                    *v = g.get(a, b);
                }
            }
        }
        Ok(TransferMatrix { log_entries })
    }

    /// Transfer matrix of a site or pair local potential; recoding rules
    /// as in [`PairEnergy::from_local`].
    pub fn from_potential(spec: &SubshiftSpec, f: &LocalPotential) -> Result<Self> {
        TransferMatrix::new(spec, &PairEnergy::from_local(f)?)
    }

    pub fn size(&self) -> usize {
        self.log_entries.len()
    }

    pub fn log_entry(&self, a: usize, b: usize) -> f64 {
        self.log_entries[a][b]
    }

    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.log_entries[a][b].exp()
    }

    fn support_graph(&self) -> Vec<Vec<bool>> {
        self.log_entries
            .iter()
            .map(|r| r.iter().map(|v| v.is_finite()).collect())
            .collect()
    }

    /// Symbols surviving iterative removal of rows/columns with no
    /// outgoing or no incoming transition.
    pub fn essential_support(&self) -> Vec<bool> {
        let g = self.support_graph();
        let k = self.size();
        let mut alive = vec![true; k];
        loop {
            let mut removed = false;
            for a in 0..k {
                if !alive[a] {
                    continue;
                }
                let out = (0..k).any(|b| alive[b] && g[a][b]);
                let inc = (0..k).any(|b| alive[b] && g[b][a]);
                if !out || !inc {
                    alive[a] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        alive
    }

    fn strongly_connected(&self, alive: &[bool]) -> bool {
        let g = self.support_graph();
        let k = self.size();
        let start = match (0..k).find(|&a| alive[a]) {
            Some(s) => s,
            None => return false,
        };
        let reach = |forward: bool| {
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for v in 0..k {
                    let edge = if forward { g[u][v] } else { g[v][u] };
                    if alive[v] && edge && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        };
        let fwd = reach(true);
        let bwd = reach(false);
        (0..k).all(|a| !alive[a] || (fwd[a] && bwd[a]))
    }

    /// Perron eigenvalue and eigenvectors by power iteration on the
    /// rescaled matrix, with a unit diagonal shift so that periodic
    /// irreducible matrices converge too. Uniform start, Rayleigh-quotient
    /// stopping at 1e-12 relative.
    pub fn perron(&self) -> Result<PerronData> {
        let alive = self.essential_support();
        if alive.iter().all(|&a| !a) {
            return Err(Error::EmptySubshift);
        }
        if !self.strongly_connected(&alive) {
            return Err(Error::ReducibleMatrix);
        }
        let k = self.size();
        let idx: Vec<usize> = (0..k).filter(|&a| alive[a]).collect();
        let n = idx.len();
        let c = idx
            .iter()
            .flat_map(|&a| idx.iter().map(move |&b| self.log_entries[a][b]))
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        // rescaled entries plus the identity shift
        let mut m = vec![vec![0.0f64; n]; n];
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                let e = self.log_entries[a][b];
                if e.is_finite() {
                    m[i][j] = (e - c).exp();
                }
            }
            m[i][i] += 1.0;
        }
        let mt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();

        let iterate = |mat: &Vec<Vec<f64>>| -> (Vec<f64>, f64, usize) {
            let mut v = vec![1.0 / n as f64; n];
            let mut rayleigh = f64::NAN;
            let mut iters = 0;
            loop {
                iters += 1;
                let mut w = vec![0.0; n];
                for (i, row) in mat.iter().enumerate() {
                    for (j, &e) in row.iter().enumerate() {
                        w[i] += e * v[j];
                    }
                }
                let vv: f64 = v.iter().map(|x| x * x).sum();
                let vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                let r = vw / vv;
                let norm: f64 = w.iter().sum();
                for x in w.iter_mut() {
                    *x /= norm;
                }
                let step = v
                    .iter()
                    .zip(&w)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let settled = rayleigh.is_finite()
                    && (r - rayleigh).abs() <= RAYLEIGH_TOL * r.abs().max(1.0)
                    && step <= VECTOR_TOL;
                v = w;
                rayleigh = r;
                if settled || iters >= MAX_ITERS {
                    return (v, rayleigh, iters);
                }
            }
        };

        let (r_sub, rayleigh_r, it_r) = iterate(&m);
        let (l_sub, _, it_l) = iterate(&mt);
        let lambda_scaled = rayleigh_r - 1.0;
        if lambda_scaled <= 0.0 {
            return Err(Error::Invalid(
                "power iteration produced a nonpositive eigenvalue".into(),
            ));
        }
        let mut right = vec![0.0; k];
        let mut left = vec![0.0; k];
        for (i, &a) in idx.iter().enumerate() {
            right[a] = r_sub[i];
            left[a] = l_sub[i];
        }
        Ok(PerronData {
            log_lambda: c + lambda_scaled.ln(),
            right,
            left,
            support: alive,
            iterations: it_r + it_l,
        })
    }

    /// Log of the Perron eigenvalue; for d = 1 this realizes the pressure
    /// of the pair potential.
    pub fn pressure(&self) -> Result<f64> {
        Ok(self.perron()?.log_lambda)
    }
}

/// A stationary Markov measure over the alphabet: initial distribution and
/// transition rows, zero outside the supported symbols.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    pi: Vec<f64>,
    rows: Vec<Vec<f64>>,
    support: Vec<bool>,
}

impl MarkovMeasure {
    pub fn new(pi: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = pi.len();
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Invalid(
                "transition rows must be square over the alphabet".into(),
            ));
        }
        if pi.iter().any(|&p| p < 0.0) || rows.iter().flatten().any(|&p| p < 0.0) {
            return Err(Error::Invalid("negative probability".into()));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "initial distribution sums to {total}"
            )));
        }
        let support: Vec<bool> = pi.iter().map(|&p| p > 0.0).collect();
        for (a, row) in rows.iter().enumerate() {
            if support[a] {
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::Invalid(format!("row {a} sums to {s}")));
                }
            }
        }
        Ok(MarkovMeasure { pi, rows, support })
    }

    /// Stationary measure of the given rows: the initial distribution is
    /// computed by iterating the transposed action from uniform until the
    /// stationarity defect reaches rounding level.
    pub fn stationary_from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Invalid("transition rows must be square".into()));
        }
        let mut pi = vec![1.0 / k as f64; k];
        let mut best = f64::INFINITY;
        let mut stalled = 0usize;
        for _ in 0..MAX_ITERS {
            let mut next = vec![0.0; k];
            for (a, row) in rows.iter().enumerate() {
                for (b, &p) in row.iter().enumerate() {
                    next[b] += pi[a] * p;
                }
            }
            let norm: f64 = next.iter().sum();
            for x in next.iter_mut() {
                *x /= norm;
            }
            let defect = pi
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            pi = next;
            if defect <= VECTOR_TOL {
                break;
            }
            // once the step size stops shrinking it sits at rounding level
            if defect < 0.999 * best {
                best = defect;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > 512 {
                    break;
                }
            }
        }
        let m = MarkovMeasure::new(pi, rows)?;
        if m.stationarity_defect() > 1e-12 {
            return Err(Error::Invalid(
                "stationary distribution did not converge".into(),
            ));
        }
        Ok(m)
    }

    pub fn initial(&self) -> &[f64] {
        &self.pi
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    /// `pi(w_1) * product of P(w_t, w_t+1)` along an interval word; zero
    /// on unsupported symbols or disallowed transitions.
    pub fn cylinder_prob(&self, word: &Pattern) -> Result<f64> {
        if word.domain().dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: word.domain().dim(),
            });
        }
        if word.domain().is_empty() {
            return Ok(1.0);
        }
        if !word.domain().is_rect() {
            return Err(Error::Invalid(
                "Markov cylinder probabilities need an interval domain".into(),
            ));
        }
        let vals = word.values();
        let mut p = self.pi[vals[0]];
        for w in vals.windows(2) {
            p *= self.rows[w[0]][w[1]];
        }
        Ok(p)
    }

    /// Entropy rate `-sum pi_a P(a,b) log P(a,b)` in nats.
    pub fn entropy_rate(&self) -> f64 {
        let mut h = 0.0;
        for (a, row) in self.rows.iter().enumerate() {
            if !self.support[a] {
                continue;
            }
            for &p in row {
                if p > 0.0 {
                    h -= self.pi[a] * p * p.ln();
                }
            }
        }
        h
    }

    /// Mean of a pair energy under the stationary pair distribution.
    pub fn mean_pair_energy(&self, g: &PairEnergy) -> f64 {
        let mut total = 0.0;
        for (a, row) in self.rows.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    total += self.pi[a] * p * g.get(a, b);
                }
            }
        }
        total
    }

    /// Stationarity defect `max_b |(pi P)_b - pi_b|`.
    pub fn stationarity_defect(&self) -> f64 {
        let k = self.size();
        let mut out: f64 = 0.0;
        for b in 0..k {
            let mut acc = 0.0;
            for a in 0..k {
                acc += self.pi[a] * self.rows[a][b];
            }
            out = out.max((acc - self.pi[b]).abs());
        }
        out
    }
}

/// The equilibrium Markov measure of a transfer matrix: transitions
/// reweighted by the right Perron vector, initial distribution from the
/// product of left and right vectors.
pub fn equilibrium_markov(matrix: &TransferMatrix) -> Result<MarkovMeasure> {
    let perron = matrix.perron()?;
    equilibrium_markov_from(matrix, &perron)
}

pub fn equilibrium_markov_from(
    matrix: &TransferMatrix,
    perron: &PerronData,
) -> Result<MarkovMeasure> {
    let k = matrix.size();
    let mut rows = vec![vec![0.0; k]; k];
    for (a, row) in rows.iter_mut().enumerate() {
        if !perron.support[a] {
            continue;
        }
        for (b, v) in row.iter_mut().enumerate() {
            if !perron.support[b] {
                continue;
            }
            let e = matrix.log_entry(a, b);
            if e.is_finite() {
                *v = (e - perron.log_lambda).exp() * perron.right[b] / perron.right[a];
            }
        }
        // remove the eigenvector residual so rows are exact distributions
        let s: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    let mut pi: Vec<f64> = (0..k)
        .map(|a| {
            if perron.support[a] {
                perron.left[a] * perron.right[a]
            } else {
                0.0
            }
        })
        .collect();
    let z: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p /= z;
    }
    // polish stationarity down to rounding level
    for _ in 0..64 {
        let mut next = vec![0.0; k];
        for (a, row) in rows.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                next[b] += pi[a] * p;
            }
        }
        let norm: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= norm;
        }
        pi = next;
    }
    MarkovMeasure::new(pi, rows)
}

/// `p_star - (entropy rate + mean pair energy)`; nonnegative for every
/// stationary measure supported on allowed transitions, zero exactly at
/// the equilibrium measure.
pub fn variational_gap(m: &MarkovMeasure, g: &PairEnergy, p_star: f64) -> f64 {
    p_star - (m.entropy_rate() + m.mean_pair_energy(g))
}
