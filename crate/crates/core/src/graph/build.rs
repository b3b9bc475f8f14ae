//! Graph spec strings, the adjacency file format and the configuration model.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, VertexId, MAX_VERTICES};

const MAX_PAIRING_RESTARTS: u32 = 1000;

/// A parsed graph description.
///
/// Grammar:
///
/// ```text
/// hypercube:<n>                 1 ≤ n ≤ 30
/// torus:<n>^<d>                 n ≥ 2, d ≥ 1, n^d ≤ 2^30
/// file:<path>                   adjacency file
/// random-regular:<N>,<d>,<seed> configuration model
/// union:<part>+<part>+…         each part a non-union spec, optionally `<count>*<spec>`
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Hypercube(u32),
    Torus { side: u32, dim: u32 },
    File(String),
    RandomRegular { order: usize, degree: usize, seed: u64 },
    Union(Vec<GraphSpec>),
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph, GraphError> {
        match self {
            GraphSpec::Hypercube(n) => Graph::hypercube(*n),
            GraphSpec::Torus { side, dim } => Graph::torus(*side, *dim),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                parse_adjacency(&text)
            }
            GraphSpec::RandomRegular {
                order,
                degree,
                seed,
            } => random_regular(*order, *degree, *seed),
            GraphSpec::Union(parts) => {
                let mut built: Vec<Graph> = Vec::with_capacity(parts.len());
                for (i, part) in parts.iter().enumerate() {
                    // Repeated parts share one construction.
                    let g = match parts[..i].iter().position(|p| p == part) {
                        Some(j) => built[j].clone(),
                        None => part.build()?,
                    };
                    built.push(g);
                }
                Graph::disjoint_union(built)
            }
        }
    }
}

impl std::fmt::Display for GraphSpec {
    /// Canonical spec string; runs of equal union parts print as `count*spec`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphSpec::Hypercube(n) => write!(f, "hypercube:{n}"),
            GraphSpec::Torus { side, dim } => write!(f, "torus:{side}^{dim}"),
            GraphSpec::File(path) => write!(f, "file:{path}"),
            GraphSpec::RandomRegular {
                order,
                degree,
                seed,
            } => write!(f, "random-regular:{order},{degree},{seed}"),
            GraphSpec::Union(parts) => {
                f.write_str("union:")?;
                let mut i = 0;
                while i < parts.len() {
                    let run = parts[i..].iter().take_while(|p| **p == parts[i]).count();
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    if run > 1 {
                        write!(f, "{run}*")?;
                    }
                    write!(f, "{}", parts[i])?;
                    i += run;
                }
                Ok(())
            }
        }
    }
}

fn malformed(spec: &str, reason: impl Into<String>) -> GraphError {
    GraphError::MalformedSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: FromStr>(spec: &str, field: &str, s: &str) -> Result<T, GraphError> {
    s.trim()
        .parse()
        .map_err(|_| malformed(spec, format!("`{s}` is not a valid {field}")))
}

impl FromStr for GraphSpec {
    type Err = GraphError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let spec = spec.trim();
        let (head, rest) = spec
            .split_once(':')
            .ok_or_else(|| malformed(spec, "expected `<family>:<params>`"))?;
        match head {
            "hypercube" => {
                let n: u32 = parse_num(spec, "dimension", rest)?;
                if !(1..=30).contains(&n) {
                    return Err(malformed(spec, "dimension must be in 1..=30"));
                }
                Ok(GraphSpec::Hypercube(n))
            }
            "torus" => {
                let (n, d) = rest
                    .split_once('^')
                    .ok_or_else(|| malformed(spec, "expected `torus:<n>^<d>`"))?;
                let side = parse_num(spec, "side length", n)?;
                let dim = parse_num(spec, "dimension", d)?;
                if side < 2 || dim < 1 {
                    return Err(malformed(spec, "need n ≥ 2 and d ≥ 1"));
                }
                Ok(GraphSpec::Torus { side, dim })
            }
            "file" => {
                if rest.is_empty() {
                    return Err(malformed(spec, "empty path"));
                }
                Ok(GraphSpec::File(rest.to_string()))
            }
            "random-regular" => {
                let fields: Vec<&str> = rest.split(',').collect();
                let [n, d, seed] = fields[..] else {
                    return Err(malformed(spec, "expected `random-regular:<N>,<d>,<seed>`"));
                };
                Ok(GraphSpec::RandomRegular {
                    order: parse_num(spec, "vertex count", n)?,
                    degree: parse_num(spec, "degree", d)?,
                    seed: parse_num(spec, "seed", seed)?,
                })
            }
            "union" => {
                let mut parts = Vec::new();
                for piece in rest.split('+') {
                    let piece = piece.trim();
                    let (count, inner) = match piece.split_once('*') {
                        Some((c, inner)) if c.chars().all(|ch| ch.is_ascii_digit()) => {
                            (parse_num::<usize>(spec, "repeat count", c)?, inner)
                        }
                        _ => (1, piece),
                    };
                    if inner.starts_with("union:") {
                        return Err(malformed(spec, "nested unions are not supported"));
                    }
                    if count == 0 {
                        return Err(malformed(spec, "repeat count must be positive"));
                    }
                    let part: GraphSpec = inner.parse()?;
                    parts.extend(std::iter::repeat(part).take(count));
                }
                if parts.is_empty() {
                    return Err(malformed(spec, "union needs at least one part"));
                }
                Ok(GraphSpec::Union(parts))
            }
            _ => Err(malformed(spec, format!("unknown graph family `{head}`"))),
        }
    }
}

/// Parse the adjacency file format.
///
/// Line 1 is `N d`; line `i + 2` lists the `d` neighbours of vertex `i`,
/// space separated and 0-based. A trailing newline is allowed, blank lines
/// inside the body are not.
pub fn parse_adjacency(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GraphError::Adjacency {
        line: 1,
        reason: "empty file".into(),
    })?;
    let mut fields = header.split_ascii_whitespace();
    let bad_header = || GraphError::Adjacency {
        line: 1,
        reason: "header must be `N d`".into(),
    };
    let order: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad_header)?;
    let degree: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad_header)?;
    if fields.next().is_some() {
        return Err(bad_header());
    }
    if order > MAX_VERTICES {
        return Err(GraphError::TooLarge(order as u128));
    }
    let mut lists = Vec::with_capacity(order);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if lists.len() == order {
            if line.trim().is_empty() {
                continue;
            }
            return Err(GraphError::Adjacency {
                line: line_no,
                reason: format!("more than {order} vertex lines"),
            });
        }
        let mut row = Vec::with_capacity(degree);
        for tok in line.split_ascii_whitespace() {
            let v: VertexId = tok.parse().map_err(|_| GraphError::Adjacency {
                line: line_no,
                reason: format!("`{tok}` is not a vertex index"),
            })?;
            row.push(v);
        }
        if row.len() != degree {
            return Err(GraphError::Adjacency {
                line: line_no,
                reason: format!("expected {degree} neighbours, found {}", row.len()),
            });
        }
        lists.push(row);
    }
    if lists.len() != order {
        return Err(GraphError::Adjacency {
            line: lists.len() + 2,
            reason: format!("expected {order} vertex lines, found {}", lists.len()),
        });
    }
    if order == 0 {
        return Graph::from_adjacency(Vec::new());
    }
    Graph::from_adjacency(lists)
}

/// Uniform-ish random `degree`-regular simple graph on `order` vertices via
/// the configuration model, restarting the whole pairing whenever a loop or
/// a repeated edge appears.
///
/// The stream is ChaCha8 seeded from `seed` and every draw is a `u64`
/// range, so the output is identical on every platform.
pub fn random_regular(order: usize, degree: usize, seed: u64) -> Result<Graph, GraphError> {
    if order > MAX_VERTICES {
        return Err(GraphError::TooLarge(order as u128));
    }
    if (order * degree) % 2 == 1 {
        return Err(GraphError::OddDegreeSum { n: order, d: degree });
    }
    if degree >= order.max(1) {
        return Err(malformed(
            &format!("random-regular:{order},{degree},{seed}"),
            "degree must be smaller than the vertex count",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<VertexId> = (0..order)
        .flat_map(|v| std::iter::repeat(v as VertexId).take(degree))
        .collect();
    let mut stubs = points.clone();
    'attempt: for _ in 0..MAX_PAIRING_RESTARTS {
        stubs.copy_from_slice(&points);
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i as u64) as usize;
            stubs.swap(i, j);
        }
        let mut lists: Vec<Vec<VertexId>> = vec![Vec::with_capacity(degree); order];
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || lists[a as usize].contains(&b) {
                continue 'attempt;
            }
            lists[a as usize].push(b);
            lists[b as usize].push(a);
        }
        return Graph::from_adjacency(lists);
    }
    Err(GraphError::PairingFailed {
        restarts: MAX_PAIRING_RESTARTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_family() {
        assert_eq!("hypercube:4".parse(), Ok(GraphSpec::Hypercube(4)));
        assert_eq!(
            "torus:5^3".parse(),
            Ok(GraphSpec::Torus { side: 5, dim: 3 })
        );
        assert_eq!(
            "random-regular:12,3,9".parse(),
            Ok(GraphSpec::RandomRegular {
                order: 12,
                degree: 3,
                seed: 9
            })
        );
        assert_eq!(
            "union:2*hypercube:2+torus:3^1".parse(),
            Ok(GraphSpec::Union(vec![
                GraphSpec::Hypercube(2),
                GraphSpec::Hypercube(2),
                GraphSpec::Torus { side: 3, dim: 1 },
            ]))
        );
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "hypercube",
            "hypercube:0",
            "hypercube:31",
            "torus:1^3",
            "torus:5",
            "random-regular:12,3",
            "cube:3",
            "union:",
            "union:union:hypercube:2",
            "file:",
        ] {
            assert!(bad.parse::<GraphSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn odd_degree_sum_rejected() {
        assert_eq!(
            random_regular(5, 3, 1).unwrap_err(),
            GraphError::OddDegreeSum { n: 5, d: 3 }
        );
    }

    #[test]
    fn random_regular_is_simple_and_reproducible() {
        let a = random_regular(40, 3, 17).unwrap();
        let b = random_regular(40, 3, 17).unwrap();
        let c = random_regular(40, 3, 18).unwrap();
        assert_eq!(a.degree(), 3);
        assert_eq!(a.to_adjacency_string(), b.to_adjacency_string());
        assert_ne!(a.to_adjacency_string(), c.to_adjacency_string());
    }

    #[test]
    fn adjacency_roundtrip() {
        let g = Graph::torus(3, 2).unwrap();
        let text = g.to_adjacency_string();
        let h = parse_adjacency(&text).unwrap();
        assert_eq!(h.to_adjacency_string(), text);
    }

    #[test]
    fn adjacency_errors() {
        // wrong row length
        assert!(parse_adjacency("3 2\n1 2\n0 2\n0\n").is_err());
        // missing rows
        assert!(parse_adjacency("3 2\n1 2\n0 2\n").is_err());
        // asymmetric: 0-1, 1-2, 2-0 listed one way only
        let err = parse_adjacency("4 1\n1\n2\n3\n0\n").unwrap_err();
        assert!(matches!(err, GraphError::Asymmetric { .. }));
        // duplicate
        assert!(parse_adjacency("3 2\n1 1\n0 2\n0 1\n").is_err());
        // bad header
        assert!(parse_adjacency("3\n").is_err());
    }
}
