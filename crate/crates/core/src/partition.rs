//! Integer partitions, identified with their Young diagrams, and the cover
//! relations used by the branching graphs: single-box covers and the two-box
//! relation whose added boxes sit in one column or in adjacent columns.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A partition: weakly decreasing positive parts. The empty partition is the
/// root of every branching graph here.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Part at 1-based row index, 0 beyond the last row.
    pub fn part(&self, row: usize) -> u32 {
        if row == 0 || row > self.0.len() {
            0
        } else {
            self.0[row - 1]
        }
    }

    /// m_j: the number of parts equal to j.
    pub fn mult_count(&self, j: u32) -> u32 {
        if j == 0 {
            return 0;
        }
        self.0.iter().filter(|&&p| p == j).count() as u32
    }

    pub fn conjugate(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let max = self.0[0];
        let parts = (1..=max)
            .map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Partition(parts)
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other
            .0
            .iter()
            .enumerate()
            .all(|(i, &p)| self.part(i + 1) >= p)
    }

    /// The column indices (1-based) of the boxes of self \ other, assuming
    /// other is contained in self; within a row, leftmost first.
    pub fn skew_box_columns(&self, other: &Partition) -> Option<Vec<u32>> {
        if !self.contains(other) {
            return None;
        }
        let mut cols = Vec::new();
        for row in 1..=self.0.len() {
            for col in other.part(row) + 1..=self.part(row) {
                cols.push(col);
            }
        }
        Some(cols)
    }

    /// mu covers lambda by a single box: mu -> lambda in the Young graph.
    pub fn covers(mu: &Partition, lambda: &Partition) -> bool {
        lambda.size() == mu.size() + 1 && lambda.contains(mu)
    }

    /// The column of the single added box of a cover, or None.
    pub fn cover_column(mu: &Partition, lambda: &Partition) -> Option<u32> {
        if !Partition::covers(mu, lambda) {
            return None;
        }
        lambda.skew_box_columns(mu).map(|cols| cols[0])
    }

    /// Two added boxes, either in the same column or in adjacent columns.
    pub fn double_covers(mu: &Partition, lambda: &Partition) -> bool {
        if lambda.size() != mu.size() + 2 || !lambda.contains(mu) {
            return false;
        }
        let cols = lambda.skew_box_columns(mu).unwrap();
        debug_assert_eq!(cols.len(), 2);
        let (a, b) = (cols[0].min(cols[1]), cols[0].max(cols[1]));
        b - a <= 1
    }

    /// All partitions of n, in descending lexicographic order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn rec(remaining: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition(prefix.clone()));
                return;
            }
            let top = remaining.min(max);
            for next in (1..=top).rev() {
                prefix.push(next);
                rec(remaining - next, next, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n.max(1), &mut Vec::new(), &mut out);
        out
    }

    /// Dominance order within a fixed size: self <= other.
    pub fn dominated_by(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.size(), other.size());
        let mut sa = 0u32;
        let mut sb = 0u32;
        for i in 1..=self.0.len().max(other.0.len()) {
            sa += self.part(i);
            sb += other.part(i);
            if sa > sb {
                return false;
            }
        }
        true
    }

    /// Sum over rows of (i-1) * lambda_i; the exponent in the branching-graph
    /// gauge functions and the Q-tilde sign.
    pub fn weighted_row_sum(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }
}

/// Parse the `[2,1]` form produced by Display.
impl std::str::FromStr for Partition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| format!("bad partition '{s}'"))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u32>, _> = inner.split(',').map(|t| t.trim().parse()).collect();
        let parts = parts.map_err(|e| format!("bad partition '{s}': {e}"))?;
        let sorted = Partition::new(parts.clone());
        if sorted.0 != parts {
            return Err(format!("partition '{s}' is not weakly decreasing"));
        }
        Ok(sorted)
    }
}
