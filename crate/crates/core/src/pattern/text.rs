//! Line-oriented pattern files.
//!
//! ```text
//! # vertex-induced 4-cycle
//! v 4
//! e 1 2
//! e 2 3
//! e 3 4
//! e 4 1
//! a 1 3
//! a 2 4
//! l 1 7      # optional; when present every vertex needs a label
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{Label, Pattern, PatternError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParsePatternError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {error}")]
    Invalid { line: usize, error: PatternError },
    #[error("missing `v <count>` directive")]
    MissingVertexCount,
    #[error("{0}")]
    Pattern(PatternError),
}

enum Directive {
    Edge(usize, usize),
    Anti(usize, usize),
    Label(usize, Label),
}

pub fn parse_pattern(input: &str) -> Result<Pattern, ParsePatternError> {
    let mut count: Option<(usize, usize)> = None;
    let mut directives = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| ParsePatternError::Syntax { line, message };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| syntax(format!("expected a non-negative integer, got `{s}`")));
        match (tokens[0], tokens.len()) {
            ("v", 2) => {
                if count.is_some() {
                    return Err(syntax("duplicate `v` directive".into()));
                }
                count = Some((num(tokens[1])? as usize, line));
            }
            ("e" | "a", 3) | ("l", 3) => {
                let u = num(tokens[1])? as usize;
                let second = num(tokens[2])?;
                let d = match tokens[0] {
                    "e" => Directive::Edge(u, second as usize),
                    "a" => Directive::Anti(u, second as usize),
                    _ => {
                        let label = Label::try_from(second).map_err(|_| syntax(format!("label {second} too large")))?;
                        Directive::Label(u, label)
                    }
                };
                directives.push((line, d));
            }
            (kw @ ("v" | "e" | "a" | "l"), k) => {
                return Err(syntax(format!("`{kw}` takes {} argument(s), got {}", if kw == "v" { 1 } else { 2 }, k - 1)))
            }
            (other, _) => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    let (n, vline) = count.ok_or(ParsePatternError::MissingVertexCount)?;
    if n == 0 || n > super::MAX_PATTERN_VERTICES {
        return Err(ParsePatternError::Invalid { line: vline, error: PatternError::VertexCount(n) });
    }

    let mut edges = Vec::new();
    let mut anti = Vec::new();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut any_label = false;
    for (line, d) in &directives {
        let line = *line;
        let check = |v: usize| -> Result<usize, ParsePatternError> {
            if v == 0 || v > n {
                Err(ParsePatternError::Invalid { line, error: PatternError::VertexOutOfRange { vertex: v, count: n } })
            } else {
                Ok(v - 1)
            }
        };
        match *d {
            Directive::Edge(u, v) | Directive::Anti(u, v) => {
                let (u, v) = (check(u)?, check(v)?);
                if u == v {
                    return Err(ParsePatternError::Invalid { line, error: PatternError::SelfLoop(u + 1) });
                }
                let (mine, other) =
                    if matches!(d, Directive::Edge(..)) { (&mut edges, &anti) } else { (&mut anti, &edges) };
                let key = (u.min(v), u.max(v));
                if other.contains(&key) {
                    return Err(ParsePatternError::Invalid {
                        line,
                        error: PatternError::EdgeAntiEdgeOverlap(key.0 + 1, key.1 + 1),
                    });
                }
                mine.push(key);
            }
            Directive::Label(v, l) => {
                let v = check(v)?;
                if labels[v].replace(l).is_some() {
                    return Err(ParsePatternError::Syntax { line, message: format!("vertex {} labeled twice", v + 1) });
                }
                any_label = true;
            }
        }
    }
    let labels = if any_label {
        if let Some(missing) = labels.iter().position(Option::is_none) {
            return Err(ParsePatternError::Syntax {
                line: vline,
                message: format!("vertex {} has no label but others do", missing + 1),
            });
        }
        Some(labels.into_iter().map(|l| l.unwrap()).collect())
    } else {
        None
    };
    Pattern::new(n, &edges, &anti, labels).map_err(ParsePatternError::Pattern)
}

/// Serializes in the format accepted by [`parse_pattern`].
pub fn write_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    writeln!(out, "v {}", p.vertex_count()).unwrap();
    for (u, v) in p.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    for (u, v) in p.anti_edges() {
        writeln!(out, "a {} {}", u + 1, v + 1).unwrap();
    }
    if let Some(labels) = p.labels() {
        for (v, l) in labels.iter().enumerate() {
            writeln!(out, "l {} {}", v + 1, l).unwrap();
        }
    }
    out
}

impl std::str::FromStr for Pattern {
    type Err = ParsePatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_vertex_induced_cycle() {
        let p: Pattern = "# c4\nv 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\na 1 3\na 2 4 # chords\n".parse().unwrap();
        assert_eq!(p, Pattern::cycle(4).vertex_variant());
        assert_eq!(parse_pattern(&write_pattern(&p)).unwrap(), p);
    }

    #[test]
    fn labels_roundtrip() {
        let p = Pattern::path(3).with_labels(vec![4, 5, 4]).unwrap();
        assert_eq!(parse_pattern(&write_pattern(&p)).unwrap(), p);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_pattern("v 3\ne 1 2\ne 2 4\n").unwrap_err();
        assert_eq!(err, ParsePatternError::Invalid { line: 3, error: PatternError::VertexOutOfRange { vertex: 4, count: 3 } });
        let err = parse_pattern("v 2\ne 1 1\n").unwrap_err();
        assert!(matches!(err, ParsePatternError::Invalid { line: 2, .. }));
        let err = parse_pattern("v 2\ne 1 2\na 2 1\n").unwrap_err();
        assert!(matches!(err, ParsePatternError::Invalid { line: 3, error: PatternError::EdgeAntiEdgeOverlap(1, 2) }));
        let err = parse_pattern("v 2\nx 1 2\n").unwrap_err();
        assert!(matches!(err, ParsePatternError::Syntax { line: 2, .. }));
        let err = parse_pattern("v 2\ne 1\n").unwrap_err();
        assert!(matches!(err, ParsePatternError::Syntax { line: 2, .. }));
        assert_eq!(parse_pattern("e 1 2\n").unwrap_err(), ParsePatternError::MissingVertexCount);
        assert_eq!(
            parse_pattern("v 3\ne 1 2\n").unwrap_err(),
            ParsePatternError::Pattern(PatternError::Disconnected)
        );
        let err = parse_pattern("v 2\ne 1 2\nl 1 3\n").unwrap_err();
        assert!(matches!(err, ParsePatternError::Syntax { line: 1, .. }));
    }
}
