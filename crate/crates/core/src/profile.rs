//! Count vectors over the actions available at a state.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("profile length mismatch: {left} vs {right} (profiles from different states?)")]
    LengthMismatch { left: usize, right: usize },
}

/// How many agents take each action. Index `i` holds the count for action `i + 1`.
///
/// A full profile at `q` has length `A(q)` and sums to `n`; a partial profile
/// for coalition `C` sums to `|C|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(Vec<u32>);

impl Profile {
    pub fn new(counts: Vec<u32>) -> Self {
        Profile(counts)
    }

    pub fn zero(actions: usize) -> Self {
        Profile(vec![0; actions])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Count on 0-based action `action`.
    pub fn get(&self, action: usize) -> u32 {
        self.0[action]
    }

    /// Size of the owning coalition.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    fn same_len(&self, other: &Profile) -> Result<(), ProfileError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(ProfileError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Coordinate-wise `self <= other`.
    pub fn leq(&self, other: &Profile) -> Result<bool, ProfileError> {
        self.same_len(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Coordinate-wise sum.
    pub fn sum(&self, other: &Profile) -> Result<Profile, ProfileError> {
        self.same_len(other)?;
        Ok(Profile(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self - other` when `other <= self`, else `None`.
    pub fn checked_sub(&self, other: &Profile) -> Option<Profile> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Profile)
    }
}

impl From<Vec<u32>> for Profile {
    fn from(counts: Vec<u32>) -> Self {
        Profile(counts)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All weak compositions of `total` into `parts` parts, in descending
/// lexicographic order. `parts == 0` yields the empty vector only when
/// `total == 0`.
pub fn compositions(total: u32, parts: usize) -> Compositions {
    Compositions {
        next: if parts == 0 {
            (total == 0).then(Vec::new)
        } else {
            let mut first = vec![0; parts];
            first[0] = total;
            Some(first)
        },
    }
}

/// Iterator returned by [`compositions`].
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let current = self.next.take()?;
        let m = current.len();
        // Successor in descending lex order: find the rightmost non-zero entry
        // before the last slot, move one unit right, and gather the tail.
        if m >= 2 {
            if let Some(i) = (0..m - 1).rev().find(|&i| current[i] > 0) {
                let mut succ = current.clone();
                let tail: u32 = succ[i + 1..].iter().sum();
                succ[i] -= 1;
                for c in &mut succ[i + 1..] {
                    *c = 0;
                }
                succ[i + 1] = tail + 1;
                self.next = Some(succ);
            }
        }
        Some(Profile(current))
    }
}

/// `C(total + parts - 1, parts - 1)`, saturating at `u128::MAX`.
pub fn composition_count(total: u32, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    // C(total + k, k) = prod_{i=1..k} (total + i) / i, exact at every step.
    for i in 1..=k {
        acc = match acc.checked_mul(u128::from(total) + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}
