use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Sorted, duplicate-free set of column indices over a universe of `n` columns.
///
/// Indices are stored 0-based. Text and JSON representations are 1-based,
/// matching the usual mathematical convention `J ⊂ [n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
    universe: usize,
}

impl SupportSet {
    /// Builds a support from 0-based indices in any order. Duplicates are rejected.
    pub fn new(mut indices: Vec<usize>, universe: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate support index"));
        }
        if let Some(&last) = indices.last() {
            if last >= universe {
                return Err(invalid(format!(
                    "support index {} outside [1, {universe}]",
                    last + 1
                )));
            }
        }
        Ok(Self { indices, universe })
    }

    /// Builds a support from 1-based indices.
    pub fn from_one_based(indices: &[usize], universe: usize) -> Result<Self> {
        if indices.contains(&0) {
            return Err(invalid("1-based support index must be >= 1"));
        }
        Self::new(indices.iter().map(|&i| i - 1).collect(), universe)
    }

    pub fn empty(universe: usize) -> Self {
        Self {
            indices: Vec::new(),
            universe,
        }
    }

    /// Parses a comma separated list of 1-based indices such as `1,5,9`.
    pub fn parse(text: &str, universe: usize) -> Result<Self> {
        let parsed = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| invalid(format!("bad support index '{t}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&parsed, universe)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// Indices of the universe not in the set.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.universe).filter(|&i| !self.contains(i)).collect()
    }

    pub fn union(&self, other: &SupportSet) -> Result<SupportSet> {
        if self.universe != other.universe {
            return Err(invalid("support universes differ"));
        }
        let mut all = self.indices.clone();
        all.extend(other.indices.iter().copied().filter(|&i| !self.contains(i)));
        SupportSet::new(all, self.universe)
    }
}

impl std::fmt::Display for SupportSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct SupportRepr {
    indices: Vec<usize>,
    universe: usize,
}

impl Serialize for SupportSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SupportRepr {
            indices: self.one_based(),
            universe: self.universe,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SupportSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SupportRepr::deserialize(deserializer)?;
        SupportSet::from_one_based(&repr.indices, repr.universe).map_err(serde::de::Error::custom)
    }
}

/// Exact support identification.
pub fn support_match(recovered: &SupportSet, truth: &SupportSet) -> Result<bool> {
    if recovered.universe != truth.universe {
        return Err(invalid(format!(
            "universe mismatch: {} vs {}",
            recovered.universe, truth.universe
        )));
    }
    Ok(recovered.indices == truth.indices)
}
