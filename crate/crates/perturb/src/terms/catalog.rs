use super::label::{Dsu, Mark, TermLabel};
use crate::{Error, Result};
use std::collections::HashMap;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 6;

const FIXTURE_4: &str = include_str!("../../data/order4.txt");
const FIXTURE_5: &str = include_str!("../../data/order5.txt");
const FIXTURE_6: &str = include_str!("../../data/order6.txt");

/// All leaves of the decomposition tree at one order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCatalog {
    pub order: usize,
    pub labels: Vec<TermLabel>,
}

impl TermCatalog {
    pub fn count(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, label: &TermLabel) -> bool {
        self.labels.contains(label)
    }
}

/// The term catalog at order `l`.
///
/// Orders 2 and 3 come from [`rule_catalog`]. Orders 4 to 6 are the
/// bundled reference tables: the rule reaches the same set of index partitions
/// there, but at order 6 nine leaves are written with a different choice of
/// which wider pair settles a relation, and the tables keep their spelling.
pub fn enumerate_catalog(l: usize) -> Result<TermCatalog> {
    check_order(l)?;
    let labels = match l {
        4 => fixture(FIXTURE_4),
        5 => fixture(FIXTURE_5),
        6 => fixture(FIXTURE_6),
        _ => return rule_catalog(l),
    };
    Ok(TermCatalog { order: l, labels })
}

/// Bundled reference table for orders 4 to 6, in table order.
pub fn fixture_catalog(l: usize) -> Result<TermCatalog> {
    let text = match l {
        4 => FIXTURE_4,
        5 => FIXTURE_5,
        6 => FIXTURE_6,
        _ => {
            return Err(Error::UnsupportedOrder {
                order: l,
                min: 4,
                max: 6,
            })
        }
    };
    Ok(TermCatalog {
        order: l,
        labels: fixture(text),
    })
}

fn fixture(text: &str) -> Vec<TermLabel> {
    text.lines()
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.starts_with('#'))
        .map(|s| TermLabel::parse(s).expect("bundled fixture label parses"))
        .collect()
}

/// Generate the decomposition leaves by constraint propagation.
///
/// Pairs are visited level by level and left to right. Each pair of the
/// first level is contracted or anti-contracted. At deeper levels a pair
/// whose relation already follows from the accumulated equalities and
/// inequalities (neighbours always differ) is marked `k`; otherwise both
/// branches are taken. The result matches the bundled reference tables at orders 4
/// and 5 exactly. At order 6 it produces the same 203 index partitions but
/// spells nine of them differently; see [`enumerate_catalog`].
pub fn rule_catalog(l: usize) -> Result<TermCatalog> {
    check_order(l)?;
    let n = l + 1;
    let mut out = Vec::new();
    let mut groups: Vec<Vec<Mark>> = vec![Vec::new(); l - 1];
    let unequal: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    descend(l, 0, 0, &Dsu::new(n), &unequal, &mut groups, &mut out);
    Ok(TermCatalog { order: l, labels: out })
}

fn descend(
    l: usize,
    level: usize,
    idx: usize,
    dsu: &Dsu,
    unequal: &[(usize, usize)],
    groups: &mut Vec<Vec<Mark>>,
    out: &mut Vec<TermLabel>,
) {
    if level == l - 1 {
        out.push(TermLabel::from_groups(groups.clone()));
        return;
    }
    if idx == l - 1 - level {
        descend(l, level + 1, 0, dsu, unequal, groups, out);
        return;
    }
    let (a, b) = TermLabel::pair(level, idx);
    let mut d = dsu.clone();
    let (ra, rb) = (d.find(a), d.find(b));
    let forced_eq = ra == rb;
    let forced_ne = unequal.iter().any(|&(x, y)| {
        let (rx, ry) = (d.find(x), d.find(y));
        (rx == ra && ry == rb) || (rx == rb && ry == ra)
    });

    if level > 0 && (forced_eq || forced_ne) {
        groups[level].push(Mark::K);
        descend(l, level, idx + 1, dsu, unequal, groups, out);
        groups[level].pop();
        return;
    }
    if !forced_ne {
        let mut merged = dsu.clone();
        merged.union(a, b);
        groups[level].push(Mark::C);
        descend(l, level, idx + 1, &merged, unequal, groups, out);
        groups[level].pop();
    }
    if !forced_eq {
        let mut more = unequal.to_vec();
        more.push((a, b));
        groups[level].push(Mark::N);
        descend(l, level, idx + 1, dsu, &more, groups, out);
        groups[level].pop();
    }
}

/// Pair each rule leaf with the reference label of the same index
/// partition. Returns `(rule, reference)` in rule order.
pub fn reconcile(l: usize) -> Result<Vec<(TermLabel, Option<TermLabel>)>> {
    let table: HashMap<Vec<usize>, TermLabel> = fixture_catalog(l)?
        .labels
        .into_iter()
        .map(|lab| (lab.partition(), lab))
        .collect();
    Ok(rule_catalog(l)?
        .labels
        .into_iter()
        .map(|lab| {
            let reference = table.get(&lab.partition()).cloned();
            (lab, reference)
        })
        .collect())
}

fn check_order(l: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&l) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder {
            order: l,
            min: MIN_ORDER,
            max: MAX_ORDER,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(c: &TermCatalog) -> Vec<String> {
        c.labels.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn low_orders() {
        assert_eq!(names(&enumerate_catalog(2).unwrap()), ["c", "n"]);
        assert_eq!(
            names(&enumerate_catalog(3).unwrap()),
            ["cc", "cn", "nc", "nn,c", "nn,n"]
        );
    }

    #[test]
    fn counts() {
        let got: Vec<usize> = (2..=6).map(|l| enumerate_catalog(l).unwrap().count()).collect();
        assert_eq!(got, [2, 5, 15, 52, 203]);
        assert_eq!(rule_catalog(6).unwrap().count(), 203);
    }

    #[test]
    fn unsupported_orders() {
        assert!(enumerate_catalog(1).is_err());
        assert!(enumerate_catalog(7).is_err());
        assert!(fixture_catalog(3).is_err());
    }
}
