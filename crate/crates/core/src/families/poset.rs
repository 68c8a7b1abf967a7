use serde::Serialize;

use crate::embed::embeds;
use crate::error::{Error, Result};
use crate::structure::Structure;

pub const MAX_POSET_ORDER: usize = 64;
pub const MAX_POSET_MEMBERS: usize = 200;

/// The induced-substructure order restricted to a list of structures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetReport {
    /// `below[i][j]` iff member `i` embeds into member `j`.
    pub below: Vec<Vec<bool>>,
    pub antichain: bool,
    pub chain: bool,
    /// Pairs `(i, j)` with `i < j` in the order and nothing strictly between.
    pub covers: Vec<(usize, usize)>,
}

pub fn poset_report(members: &[Structure]) -> Result<PosetReport> {
    if members.len() > MAX_POSET_MEMBERS {
        return Err(Error::Budget(MAX_POSET_MEMBERS));
    }
    if let Some(big) = members.iter().find(|m| m.size() > MAX_POSET_ORDER) {
        return Err(Error::TooLarge {
            what: "poset member",
            size: big.size(),
            limit: MAX_POSET_ORDER,
        });
    }
    let n = members.len();
    let mut below = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            below[i][j] = i == j
                || (members[i].size() <= members[j].size() && embeds(&members[i], &members[j])?);
        }
    }
    let strict = |i: usize, j: usize| i != j && below[i][j] && !below[j][i];
    let antichain = (0..n).all(|i| (0..n).all(|j| i == j || !below[i][j]));
    let chain = (0..n).all(|i| (0..n).all(|j| below[i][j] || below[j][i]));
    let covers = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| strict(i, j) && !(0..n).any(|k| strict(i, k) && strict(k, j)))
        .collect();
    Ok(PosetReport {
        below,
        antichain,
        chain,
        covers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{g_n, g_prime_n, h_n, path};

    #[test]
    fn reports() {
        let ps: Vec<_> = (3..=5).map(|n| path(n).to_structure()).collect();
        let r = poset_report(&ps).unwrap();
        assert!(r.chain && !r.antichain);
        assert_eq!(r.covers, vec![(0, 1), (1, 2)]);
        let gs: Vec<_> = (6..=9).map(|n| g_n(n).unwrap().to_structure()).collect();
        assert!(poset_report(&gs).unwrap().antichain);
        let gp: Vec<_> = [9, 11].iter().map(|&n| g_prime_n(n).unwrap().to_structure()).collect();
        assert!(poset_report(&gp).unwrap().antichain);
        let hs: Vec<_> = (6..=7).map(|n| h_n(n).unwrap().to_structure()).collect();
        assert!(poset_report(&hs).unwrap().chain);
    }
}
