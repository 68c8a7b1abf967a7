use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::Graph;
use crate::substitution::modular_decomposition;

/// Largest graph accepted by [`is_perfect`].
pub const MAX_PERFECT_ORDER: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HereditaryReport {
    pub is_cograph: bool,
    pub is_perfect: bool,
}

/// No prime node in the modular decomposition.
pub fn is_cograph(g: &Graph) -> Result<bool> {
    if g.order() == 0 {
        return Ok(true);
    }
    Ok(!modular_decomposition(g)?.has_prime_node())
}

/// Whether `g` has an induced cycle of odd length at least 5.
pub fn has_odd_hole(g: &Graph) -> bool {
    fn extend(g: &Graph, path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
        let s = path[0];
        let last = *path.last().unwrap();
        for x in g.neighbors(last).ones() {
            if x <= s || on_path[x] {
                continue;
            }
            let inner_chord = path[1..].iter().take(path.len().saturating_sub(2)).any(|&p| g.has_edge(p, x));
            if inner_chord {
                continue;
            }
            if path.len() >= 2 && g.has_edge(s, x) {
                // Cycle s, ..., last, x.
                let len = path.len() + 1;
                if len >= 5 && len % 2 == 1 {
                    return true;
                }
                continue;
            }
            path.push(x);
            on_path[x] = true;
            if extend(g, path, on_path) {
                return true;
            }
            on_path[x] = false;
            path.pop();
        }
        false
    }
    let n = g.order();
    let mut on_path = vec![false; n];
    (0..n).any(|s| {
        on_path[s] = true;
        let found = extend(g, &mut vec![s], &mut on_path);
        on_path[s] = false;
        found
    })
}

/// No odd hole and no odd antihole.
pub fn is_perfect(g: &Graph) -> Result<bool> {
    if g.order() > MAX_PERFECT_ORDER {
        return Err(Error::TooLarge {
            what: "graph order",
            size: g.order(),
            limit: MAX_PERFECT_ORDER,
        });
    }
    Ok(!has_odd_hole(g) && !has_odd_hole(&g.complement()))
}

pub fn hereditary_tests(g: &Graph) -> Result<HereditaryReport> {
    Ok(HereditaryReport {
        is_cograph: is_cograph(g)?,
        is_perfect: is_perfect(g)?,
    })
}
