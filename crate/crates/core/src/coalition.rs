//! Agents and coalitions.
//!
//! Agents are the integers `1..=n`. Norms are not anonymous, so a coalition
//! is an explicit set of agent indices rather than a head count.

use std::collections::BTreeSet;
use std::fmt;

/// A 1-based agent index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of agents. The empty coalition is a legitimate value.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    members: BTreeSet<AgentId>,
}

impl Coalition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The grand coalition `{1..n}`.
    pub fn grand(n: u32) -> Self {
        Self::range(1, n)
    }

    /// All agents `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: u32, hi: u32) -> Self {
        (lo..=hi).map(AgentId).collect()
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        indices.into_iter().map(AgentId).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.members.contains(&agent)
    }

    pub fn insert(&mut self, agent: AgentId) -> bool {
        self.members.insert(agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.members.iter().copied()
    }

    /// Largest member index, if any.
    pub fn max_index(&self) -> Option<u32> {
        self.members.iter().next_back().map(|a| a.0)
    }

    /// True when every member lies in `1..=n`.
    pub fn within(&self, n: u32) -> bool {
        self.members.iter().all(|a| a.0 >= 1 && a.0 <= n)
    }

    pub fn intersection(&self, other: &Coalition) -> Coalition {
        self.members.intersection(&other.members).copied().collect()
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        self.members.difference(&other.members).copied().collect()
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        self.members.union(&other.members).copied().collect()
    }

    /// `[n] \ self`.
    pub fn complement(&self, n: u32) -> Coalition {
        (1..=n)
            .map(AgentId)
            .filter(|a| !self.members.contains(a))
            .collect()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Members as maximal runs of consecutive indices.
    pub fn runs(&self) -> Vec<(u32, u32)> {
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for a in &self.members {
            match runs.last_mut() {
                Some((_, hi)) if *hi + 1 == a.0 => *hi = a.0,
                _ => runs.push((a.0, a.0)),
            }
        }
        runs
    }

    pub fn indices(&self) -> Vec<u32> {
        self.members.iter().map(|a| a.0).collect()
    }
}

impl FromIterator<AgentId> for Coalition {
    fn from_iter<I: IntoIterator<Item = AgentId>>(iter: I) -> Self {
        Coalition {
            members: iter.into_iter().collect(),
        }
    }
}

/// Prints as `{1,2,5-9}`; runs of three or more agents collapse to a range.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (lo, hi)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match hi - lo {
                0 => write!(f, "{lo}")?,
                1 => write!(f, "{lo},{hi}")?,
                _ => write!(f, "{lo}-{hi}")?,
            }
        }
        f.write_str("}")
    }
}
