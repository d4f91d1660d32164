use serde::{Deserialize, Serialize};

use crate::error::{Result, SteeringError};

/// A steering group `A` and the single site (or mode) `B` it tries to steer.
///
/// Sites are numbered from 1. The group is kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SitePartition {
    steering_group: Vec<usize>,
    target: usize,
}

impl SitePartition {
    pub fn new(steering_group: impl IntoIterator<Item = usize>, target: usize) -> Result<Self> {
        let mut group: Vec<usize> = steering_group.into_iter().collect();
        group.sort_unstable();
        group.dedup();
        if group.is_empty() {
            return Err(SteeringError::invalid("steering group must be non-empty"));
        }
        if target == 0 || group[0] == 0 {
            return Err(SteeringError::invalid("sites are numbered from 1"));
        }
        if group.contains(&target) {
            return Err(SteeringError::OverlappingSupport(target));
        }
        Ok(Self {
            steering_group: group,
            target,
        })
    }

    /// Target `target` steered by every other site in `1..=n`.
    pub fn all_others(n: usize, target: usize) -> Result<Self> {
        Self::new((1..=n).filter(|&s| s != target), target)
    }

    pub fn steering_group(&self) -> &[usize] {
        &self.steering_group
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Checks that every site lies in `1..=n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        let max = self.steering_group.last().copied().unwrap_or(0).max(self.target);
        if max > n {
            return Err(SteeringError::invalid(format!(
                "partition uses site {max} but the state has {n}"
            )));
        }
        Ok(())
    }

    /// Every non-empty proper subset of the steering group, smallest first.
    pub fn proper_subgroups(&self) -> Vec<SitePartition> {
        let m = self.steering_group.len();
        let mut masks: Vec<u32> = (1..(1u32 << m) - 1).collect();
        masks.sort_by_key(|mask| (mask.count_ones(), *mask));
        masks
            .into_iter()
            .map(|mask| SitePartition {
                steering_group: (0..m)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.steering_group[i])
                    .collect(),
                target: self.target,
            })
            .collect()
    }

    pub fn is_disjoint_from(&self, other: &SitePartition) -> bool {
        self.steering_group
            .iter()
            .all(|s| !other.steering_group.contains(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_validates() {
        let p = SitePartition::new([3, 2, 3], 1).unwrap();
        assert_eq!(p.steering_group(), &[2, 3]);
        assert!(SitePartition::new([1, 2], 2).is_err());
        assert!(SitePartition::new(Vec::<usize>::new(), 2).is_err());
        assert!(SitePartition::new([0], 2).is_err());
        assert!(p.check_within(3).is_ok());
        assert!(p.check_within(2).is_err());
    }

    #[test]
    fn proper_subgroups_of_three() {
        let p = SitePartition::new([1, 2, 3], 4).unwrap();
        let groups: Vec<Vec<usize>> = p
            .proper_subgroups()
            .iter()
            .map(|s| s.steering_group().to_vec())
            .collect();
        assert_eq!(
            groups,
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }
}
