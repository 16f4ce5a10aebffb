//! Declarative text configs (TOML) for subshift specs, potentials, and
//! weighted spaces, shared by the CLI and the test fixtures.

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, LatticePoint};
use crate::potentials::{ising, InteractionPotential, LocalPotential};
use crate::shiftspace::{Alphabet, Pattern, PeriodicBackground, SubshiftSpec};
use serde::Deserialize;

/// On-disk form of a subshift spec.
///
/// ```toml
/// alphabet = ["0", "1"]
/// dimension = 1
/// forbidden = [{ points = [[0], [1]], symbols = ["1", "1"] }]
/// # or: matrices = [[[1, 1], [1, 0]]]
///
/// [background]
/// periods = [1]
/// symbols = ["0"]
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub alphabet: Vec<String>,
    pub dimension: usize,
    #[serde(default)]
    pub forbidden: Option<Vec<PatternField>>,
    #[serde(default)]
    pub matrices: Option<Vec<Vec<Vec<u8>>>>,
    #[serde(default)]
    pub background: Option<BackgroundField>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternField {
    pub points: Vec<Vec<i64>>,
    pub symbols: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundField {
    pub periods: Vec<u64>,
    /// Values on the fundamental cell in lexicographic point order.
    pub symbols: Vec<String>,
}

impl PatternField {
    pub fn to_pattern(&self, alphabet: &Alphabet, dimension: usize) -> Result<Pattern> {
        if self.points.len() != self.symbols.len() {
            return Err(Error::Parse(format!(
                "pattern lists {} points but {} symbols",
                self.points.len(),
                self.symbols.len()
            )));
        }
        let mut pairs = Vec::with_capacity(self.points.len());
        for (coords, name) in self.points.iter().zip(&self.symbols) {
            if coords.len() != dimension {
                return Err(Error::Parse(format!(
                    "point {coords:?} does not have dimension {dimension}"
                )));
            }
            let sym = alphabet
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown symbol {name:?}")))?;
            pairs.push((LatticePoint::new(coords.clone()), sym));
        }
        pairs.sort();
        let (points, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let n = points.len();
        let domain = LatticeBox::from_points(dimension, points)?;
        if domain.len() != n {
            return Err(Error::Parse("pattern repeats a point".into()));
        }
        Pattern::new(domain, values)
    }
}

/// Parsed spec plus its optional background.
pub struct LoadedSpec {
    pub spec: SubshiftSpec,
    pub background: Option<PeriodicBackground>,
}

pub fn parse_spec(text: &str) -> Result<LoadedSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let alphabet = Alphabet::new(file.alphabet.clone())?;
    let spec = match (&file.forbidden, &file.matrices) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse(
                "give either `forbidden` or `matrices`, not both".into(),
            ))
        }
        (None, Some(mats)) => SubshiftSpec::from_matrices(alphabet, file.dimension, mats.clone())?,
        (forbidden, None) => {
            let pats = forbidden
                .iter()
                .flatten()
                .map(|p| p.to_pattern(spec_alphabet(&file)?.as_ref(), file.dimension))
                .collect::<Result<Vec<_>>>()?;
            SubshiftSpec::from_forbidden(Alphabet::new(file.alphabet.clone())?, file.dimension, pats)?
        }
    };
    let background = match &file.background {
        None => None,
        Some(bg) => {
            let cell = bg
                .symbols
                .iter()
                .map(|name| {
                    spec.alphabet()
                        .index_of(name)
                        .ok_or_else(|| Error::Parse(format!("unknown symbol {name:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let background = PeriodicBackground::new(bg.periods.clone(), cell)?;
            background.validate(&spec)?;
            Some(background)
        }
    };
    Ok(LoadedSpec { spec, background })
}

fn spec_alphabet(file: &SpecFile) -> Result<Box<Alphabet>> {
    Ok(Box::new(Alphabet::new(file.alphabet.clone())?))
}

/// On-disk form of a potential: exactly one of the three variants.
///
/// ```toml
/// [ising]
/// j = 1.0
/// h = 0.5
/// ```
///
/// ```toml
/// [local]
/// window = [[-1], [0], [1]]
/// rows = [{ pattern = ["0", "0", "1"], value = 1.0 }]
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    #[serde(default)]
    pub ising: Option<IsingField>,
    #[serde(default)]
    pub local: Option<LocalField>,
    #[serde(default)]
    pub interaction: Option<Vec<InteractionField>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingField {
    pub j: f64,
    pub h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalField {
    pub window: Vec<Vec<i64>>,
    /// Unlisted window patterns default to value zero.
    pub rows: Vec<LocalRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalRow {
    pub pattern: Vec<String>,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionField {
    pub shape: Vec<Vec<i64>>,
    pub rows: Vec<LocalRow>,
}

/// A parsed potential: the local (site) form, plus the interaction form
/// when one was given and the raw Ising parameters when that variant was
/// used (the 1D pair recoding has a closed form for them).
pub struct LoadedPotential {
    pub local: LocalPotential,
    pub interaction: Option<InteractionPotential>,
    pub ising_params: Option<(f64, f64)>,
}

fn table_from_rows(
    window: &LatticeBox,
    rows: &[LocalRow],
    alphabet: &Alphabet,
) -> Result<Vec<f64>> {
    let k = alphabet.len();
    let size = (k as u128)
        .checked_pow(window.len() as u32)
        .ok_or_else(|| Error::Parse("window too large".into()))? as usize;
    let mut table = vec![0.0; size];
    for row in rows {
        if row.pattern.len() != window.len() {
            return Err(Error::Parse(format!(
                "row pattern has {} symbols for a {}-site window",
                row.pattern.len(),
                window.len()
            )));
        }
        let mut ix = 0usize;
        for name in &row.pattern {
            let v = alphabet
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown symbol {name:?}")))?;
            ix = ix * k + v;
        }
        table[ix] = row.value;
    }
    Ok(table)
}

fn points_to_box(points: &[Vec<i64>], dimension: usize) -> Result<LatticeBox> {
    let pts = points
        .iter()
        .map(|c| {
            if c.len() == dimension {
                Ok(LatticePoint::new(c.clone()))
            } else {
                Err(Error::Parse(format!(
                    "point {c:?} does not have dimension {dimension}"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len();
    let bx = LatticeBox::from_points(dimension, pts)?;
    if bx.len() != n {
        return Err(Error::Parse("region repeats a point".into()));
    }
    Ok(bx)
}

pub fn parse_potential(text: &str, spec: &SubshiftSpec) -> Result<LoadedPotential> {
    let file: PotentialFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let given = file.ising.is_some() as u8 + file.local.is_some() as u8 + file.interaction.is_some() as u8;
    if given != 1 {
        return Err(Error::Parse(
            "give exactly one of `ising`, `local`, `interaction`".into(),
        ));
    }
    let alphabet = spec.alphabet();
    if let Some(field) = &file.ising {
        if alphabet.len() != 2 {
            return Err(Error::Parse(
                "the ising potential needs a two-symbol alphabet".into(),
            ));
        }
        let (phi, f) = ising(field.j, field.h, spec.dimension());
        return Ok(LoadedPotential {
            local: f,
            interaction: Some(phi),
            ising_params: Some((field.j, field.h)),
        });
    }
    if let Some(field) = &file.local {
        let window = points_to_box(&field.window, spec.dimension())?;
        let table = table_from_rows(&window, &field.rows, alphabet)?;
        let local = LocalPotential::new(window, alphabet.len(), table)?;
        return Ok(LoadedPotential {
            local,
            interaction: None,
            ising_params: None,
        });
    }
    let fields = file.interaction.as_ref().unwrap();
    let mut terms = Vec::new();
    for field in fields {
        let shape = points_to_box(&field.shape, spec.dimension())?;
        let table = table_from_rows(&shape, &field.rows, alphabet)?;
        terms.push((shape, table));
    }
    let phi = InteractionPotential::new(spec.dimension(), alphabet.len(), terms)?;
    let local = phi.local_form();
    Ok(LoadedPotential {
        local,
        interaction: Some(phi),
        ising_params: None,
    })
}

/// Weighted space with named partitions for the entropy subcommand.
///
/// ```toml
/// outcomes = ["a", "b", "c"]
/// weights = [0.25, 0.5, 0.25]
///
/// [partitions]
/// alpha = ["x", "x", "y"]
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub outcomes: Vec<String>,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub partitions: std::collections::BTreeMap<String, Vec<String>>,
}

pub struct LoadedSpace {
    pub outcomes: Vec<String>,
    pub space: crate::entropy::WeightedSpace,
    /// Named partitions in file order.
    pub partitions: Vec<(String, crate::entropy::Partition)>,
}

pub fn parse_space(text: &str) -> Result<LoadedSpace> {
    let file: SpaceFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.outcomes.len() != file.weights.len() {
        return Err(Error::Parse(format!(
            "{} outcomes but {} weights",
            file.outcomes.len(),
            file.weights.len()
        )));
    }
    let space = crate::entropy::WeightedSpace::new(file.weights.clone())?;
    let mut partitions = Vec::new();
    for (name, labels) in &file.partitions {
        if labels.len() != file.outcomes.len() {
            return Err(Error::Parse(format!(
                "partition {name:?} labels {} outcomes, space has {}",
                labels.len(),
                file.outcomes.len()
            )));
        }
        // map label strings to ids by first appearance
        let mut ids = std::collections::HashMap::new();
        let raw: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        partitions.push((name.clone(), crate::entropy::Partition::new(&raw)));
    }
    Ok(LoadedSpace {
        outcomes: file.outcomes,
        space,
        partitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::SubshiftRule;

    #[test]
    fn parse_golden_mean_spec() {
        let text = r#"
alphabet = ["0", "1"]
dimension = 1
forbidden = [{ points = [[0], [1]], symbols = ["1", "1"] }]

[background]
periods = [1]
symbols = ["0"]
"#;
        let loaded = parse_spec(text).unwrap();
        assert_eq!(loaded.spec.alphabet().len(), 2);
        assert!(matches!(loaded.spec.rule(), SubshiftRule::Forbidden(f) if f.len() == 1));
        assert!(loaded.background.is_some());
        assert!(!loaded
            .spec
            .is_locally_admissible(&Pattern::word(0, vec![1, 1])));
    }

    #[test]
    fn parse_matrix_spec() {
        let text = r#"
alphabet = ["0", "1"]
dimension = 1
matrices = [[[1, 1], [1, 0]]]
"#;
        let loaded = parse_spec(text).unwrap();
        assert!(matches!(loaded.spec.rule(), SubshiftRule::Matrices(_)));
    }

    #[test]
    fn rejects_inadmissible_background_and_double_rule() {
        let bad_bg = r#"
alphabet = ["0", "1"]
dimension = 1
forbidden = [{ points = [[0], [1]], symbols = ["1", "1"] }]

[background]
periods = [1]
symbols = ["1"]
"#;
        assert!(parse_spec(bad_bg).is_err());
        let both = r#"
alphabet = ["0", "1"]
dimension = 1
forbidden = []
matrices = [[[1, 1], [1, 0]]]
"#;
        assert!(parse_spec(both).is_err());
    }

    #[test]
    fn parse_potentials() {
        let spec = SubshiftSpec::full_shift(Alphabet::spins(), 1);
        let loaded = parse_potential("[ising]\nj = 1.0\nh = 0.0\n", &spec).unwrap();
        assert!(loaded.interaction.is_some());
        assert_eq!(loaded.local.window().len(), 3);

        let gm = SubshiftSpec::golden_mean();
        let text = r#"
[local]
window = [[0]]
rows = [{ pattern = ["1"], value = 2.5 }]
"#;
        let loaded = parse_potential(text, &gm).unwrap();
        assert_eq!(loaded.local.table(), &[0.0, 2.5]);

        let text = r#"
[interaction]
shape = [[0], [1]]
rows = [{ pattern = ["1", "1"], value = -1.0 }]
"#;
        // `interaction` must be an array of tables
        assert!(parse_potential(text, &gm).is_err());
        let text = r#"
[[interaction]]
shape = [[0], [1]]
rows = [{ pattern = ["1", "1"], value = -1.0 }]
"#;
        let loaded = parse_potential(text, &gm).unwrap();
        let phi = loaded.interaction.unwrap();
        assert_eq!(phi.terms().len(), 1);
        assert_eq!(phi.terms()[0].table, vec![0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn parse_weighted_space() {
        let text = r#"
outcomes = ["a", "b", "c", "d"]
weights = [0.25, 0.25, 0.25, 0.25]

[partitions]
alpha = ["x", "x", "y", "y"]
beta = ["u", "v", "u", "v"]
"#;
        let loaded = parse_space(text).unwrap();
        assert_eq!(loaded.partitions.len(), 2);
        assert_eq!(loaded.partitions[0].0, "alpha");
        assert_eq!(loaded.partitions[0].1.block_count(), 2);
    }
}
