//! Per-arm reward log.

/// Samples per sign-table block; one random byte drives one block.
pub(crate) const BLOCK: usize = 8;
const TABLE: usize = 1 << BLOCK;

/// Rewards observed on one arm, with running count and mean.
///
/// Alongside the raw log the history keeps, for every complete block of
/// eight rewards, the 256 signed sums `sum_k ±(y_k - y_0)`. A Rademacher
/// bootstrap draw then costs one table lookup per eight rewards instead of
/// eight multiply-adds. The tables depend only on the data; the signs are
/// drawn fresh on every evaluation.
#[derive(Debug, Clone, Default)]
pub struct ArmHistory {
    rewards: Vec<f64>,
    sum: f64,
    /// Sum of `y_i - y_0`.
    shifted_sum: f64,
    tables: Vec<f64>,
}

impl ArmHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rewards(rewards: &[f64]) -> Self {
        let mut h = Self::new();
        for &r in rewards {
            h.push(r);
        }
        h
    }

    pub fn push(&mut self, reward: f64) {
        self.rewards.push(reward);
        self.sum += reward;
        self.shifted_sum += reward - self.rewards[0];
        if self.rewards.len().is_multiple_of(BLOCK) {
            self.extend_tables();
        }
    }

    fn extend_tables(&mut self) {
        let anchor = self.rewards[0];
        let start = self.rewards.len() - BLOCK;
        let z: Vec<f64> = self.rewards[start..].iter().map(|y| y - anchor).collect();
        let base = self.tables.len();
        self.tables.resize(base + TABLE, 0.0);
        let table = &mut self.tables[base..];
        table[0] = -z.iter().sum::<f64>();
        for m in 1..TABLE {
            let low = m.trailing_zeros() as usize;
            table[m] = table[m & (m - 1)] + 2.0 * z[low];
        }
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// Arithmetic mean; `NaN` for an empty history.
    pub fn mean(&self) -> f64 {
        self.sum / self.rewards.len() as f64
    }

    pub(crate) fn anchor(&self) -> f64 {
        self.rewards[0]
    }

    pub(crate) fn shifted_mean(&self) -> f64 {
        self.shifted_sum / self.rewards.len() as f64
    }

    pub(crate) fn num_blocks(&self) -> usize {
        self.rewards.len() / BLOCK
    }

    pub(crate) fn block_table(&self, block: usize) -> &[f64] {
        &self.tables[block * TABLE..(block + 1) * TABLE]
    }
}

impl PartialEq for ArmHistory {
    fn eq(&self, other: &Self) -> bool {
        self.rewards.len() == other.rewards.len()
            && self.rewards.iter().zip(&other.rewards).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_mean() {
        let mut h = ArmHistory::new();
        assert!(h.mean().is_nan());
        h.push(1.0);
        h.push(2.0);
        let old = h.sum();
        h.push(4.0);
        assert_eq!(h.mean(), (old + 4.0) / 3.0);
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn tables_hold_signed_sums() {
        let ys: Vec<f64> = (0..17).map(|i| (i as f64 * 0.37).sin()).collect();
        let h = ArmHistory::from_rewards(&ys);
        assert_eq!(h.num_blocks(), 2);
        for block in 0..2 {
            let t = h.block_table(block);
            for m in [0usize, 1, 77, 200, 255] {
                let direct: f64 = (0..BLOCK)
                    .map(|k| {
                        let z = ys[block * BLOCK + k] - ys[0];
                        if m >> k & 1 == 1 {
                            z
                        } else {
                            -z
                        }
                    })
                    .sum();
                assert!((t[m] - direct).abs() < 1e-12);
            }
        }
    }
}
