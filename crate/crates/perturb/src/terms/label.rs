use crate::{Error, Result};
use std::fmt;

/// One symbol of a decomposition group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    /// Contraction: the paired chain indices are equal.
    C,
    /// Anti-contraction: the paired chain indices differ.
    N,
    /// Not decomposed at this level.
    K,
}

impl Mark {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'c' => Some(Mark::C),
            'n' => Some(Mark::N),
            'k' => Some(Mark::K),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Mark::C => 'c',
            Mark::N => 'n',
            Mark::K => 'k',
        }
    }
}

/// A leaf of the g-product decomposition tree of order `l`.
///
/// Group `j` (1-based) has `l - j` marks; its `k`-th mark decides the chain
/// pair `(k, k + j + 1)` over the chain indices `0..=l`. Groups made only of
/// `k` are left out of the display form, so `nnn,cc` stands for
/// `nnn,cc,k` and `nccn,c` for `nccn,kkk,kk,c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermLabel {
    order: usize,
    groups: Vec<Vec<Mark>>,
}

impl TermLabel {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadLabel {
            label: text.to_string(),
            reason: reason.to_string(),
        };
        let text = text.trim();
        if text.is_empty() {
            return Err(bad("empty label"));
        }
        let parts: Vec<&str> = text.split(',').collect();
        let order = parts[0].chars().count() + 1;
        let mut groups = vec![Vec::new(); order - 1];
        let mut previous = usize::MAX;
        for (idx, part) in parts.iter().enumerate() {
            let marks: Vec<Mark> = part
                .chars()
                .map(Mark::from_char)
                .collect::<Option<_>>()
                .ok_or_else(|| bad("marks must be c, n or k"))?;
            if marks.is_empty() {
                return Err(bad("empty group"));
            }
            if marks.len() >= previous {
                return Err(bad("group lengths must strictly decrease"));
            }
            previous = marks.len();
            if idx == 0 && marks.contains(&Mark::K) {
                return Err(bad("the first group cannot contain k"));
            }
            let level = order - marks.len();
            groups[level - 1] = marks;
        }
        for (j, g) in groups.iter_mut().enumerate() {
            if g.is_empty() {
                *g = vec![Mark::K; order - 1 - j];
            }
        }
        Ok(Self { order, groups })
    }

    /// Build from fully padded groups, one per level.
    pub(crate) fn from_groups(groups: Vec<Vec<Mark>>) -> Self {
        Self {
            order: groups.len() + 1,
            groups,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// All `order - 1` groups, including the all-`k` ones.
    pub fn groups(&self) -> &[Vec<Mark>] {
        &self.groups
    }

    /// Chain pair decided by mark `k` of group `level` (both 0-based).
    pub fn pair(level: usize, k: usize) -> (usize, usize) {
        (k, k + level + 2)
    }

    /// Equality classes of the chain indices `0..=order` implied by the
    /// contractions, numbered in order of first appearance.
    pub fn partition(&self) -> Vec<usize> {
        let n = self.order + 1;
        let mut dsu = Dsu::new(n);
        for (level, g) in self.groups.iter().enumerate() {
            for (k, &m) in g.iter().enumerate() {
                if m == Mark::C {
                    let (x, y) = Self::pair(level, k);
                    dsu.union(x, y);
                }
            }
        }
        canonical_classes(&mut dsu, n)
    }

    /// True when contractions and anti-contractions are consistent and
    /// decide the relation of every pair of chain indices. Neighbouring
    /// indices always differ.
    pub fn is_determined(&self) -> bool {
        let n = self.order + 1;
        let classes = self.partition();
        let mut unequal: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        for (level, g) in self.groups.iter().enumerate() {
            for (k, &m) in g.iter().enumerate() {
                if m == Mark::N {
                    unequal.push(Self::pair(level, k));
                }
            }
        }
        let mut separated = std::collections::HashSet::new();
        for &(x, y) in &unequal {
            let (cx, cy) = (classes[x], classes[y]);
            if cx == cy {
                return false;
            }
            separated.insert((cx.min(cy), cx.max(cy)));
        }
        let count = classes.iter().max().map_or(0, |m| m + 1);
        (0..count).all(|a| (a + 1..count).all(|b| separated.contains(&(a, b))))
    }
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, g) in self.groups.iter().enumerate() {
            if j > 0 && g.iter().all(|&m| m == Mark::K) {
                continue;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            for &m in g {
                write!(f, "{}", m.as_char())?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for TermLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Union-find over chain indices.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx] = ry;
        }
    }
}

pub(crate) fn canonical_classes(dsu: &mut Dsu, n: usize) -> Vec<usize> {
    let mut ids: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = dsu.find(i);
        let id = *ids[r].get_or_insert_with(|| {
            next += 1;
            next - 1
        });
        out.push(id);
    }
    out
}
