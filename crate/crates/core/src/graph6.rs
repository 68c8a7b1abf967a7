//! graph6 encoding of simple graphs (McKay's format).

use crate::error::{Error, Result};
use crate::structure::Graph;

const HEADER: &str = ">>graph6<<";

fn push_size(out: &mut String, n: usize) {
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else if n <= 258_047 {
        out.push(126 as char);
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    } else {
        out.push(126 as char);
        out.push(126 as char);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    }
}

pub fn encode(g: &Graph) -> String {
    let n = g.order();
    let mut out = String::new();
    push_size(&mut out, n);
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(((acc << (6 - filled)) + 63) as char);
    }
    out
}

pub fn decode(line: &str) -> Result<Graph> {
    let line = line.trim();
    let line = line.strip_prefix(HEADER).unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(Error::Graph6(format!("invalid character in `{line}`")));
    }
    let val = |i: usize| -> Result<usize> {
        bytes
            .get(i)
            .map(|&b| (b - 63) as usize)
            .ok_or_else(|| Error::Graph6("truncated size".into()))
    };
    let (n, mut pos) = match bytes.first() {
        None => return Err(Error::Graph6("empty input".into())),
        Some(&126) if bytes.get(1) == Some(&126) => {
            let mut n = 0;
            for i in 2..8 {
                n = (n << 6) | val(i)?;
            }
            (n, 8)
        }
        Some(&126) => {
            let mut n = 0;
            for i in 1..4 {
                n = (n << 6) | val(i)?;
            }
            (n, 4)
        }
        Some(&b) => ((b - 63) as usize, 1),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if bytes.len() - pos != need {
        return Err(Error::Graph6(format!(
            "expected {need} data bytes for n={n}, found {}",
            bytes.len() - pos
        )));
    }
    let mut g = Graph::new(n);
    let mut k = 0;
    let mut cur = 0u8;
    for j in 1..n {
        for i in 0..j {
            if k % 6 == 0 {
                cur = bytes[pos] - 63;
                pos += 1;
            }
            if (cur >> (5 - k % 6)) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Decodes every non-empty line.
pub fn decode_lines(text: &str) -> Result<Vec<Graph>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(decode)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_codes() {
        // Reference strings produced by nauty's geng/showg conventions.
        assert_eq!(encode(&Graph::new(0)), "?");
        assert_eq!(encode(&Graph::new(1)), "@");
        assert_eq!(encode(&Graph::complete(2)), "A_");
        assert_eq!(encode(&Graph::complete(4)), "C~");
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(encode(&p4), "Ch");
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(encode(&c5), "Dhc");
        assert_eq!(decode(">>graph6<<Dhc").unwrap(), c5);
    }

    #[test]
    fn large_sizes_round_trip() {
        let mut g = Graph::new(70);
        g.add_edge(0, 69);
        g.add_edge(3, 40);
        let s = encode(&g);
        assert!(s.starts_with('~'));
        assert_eq!(decode(&s).unwrap(), g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode("C").is_err());
        assert!(decode("Chh").is_err());
        assert!(decode("C h").is_err());
    }
}
