use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::label::{BranchLabel, CoordOrder};
use super::{valid_successor, Algorithm};
use crate::error::{McfError, Result};

/// An admissible sequence of branch labels of one algorithm.
///
/// Text form: `T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2` for the triangle sequence,
/// `C:21221` for Cassaigne and `S:(3,2,1);(2,3,1)` for Selmer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    algorithm: Algorithm,
    labels: Vec<BranchLabel>,
}

impl Path {
    /// Checks that all labels belong to `algorithm` and that consecutive labels are admissible.
    pub fn new(algorithm: Algorithm, labels: Vec<BranchLabel>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|l| l.algorithm() != algorithm) {
            return Err(McfError::InvalidInput(format!(
                "label {bad} does not belong to {algorithm}"
            )));
        }
        for w in labels.windows(2) {
            if !valid_successor(&w[0], &w[1])? {
                return Err(McfError::InvalidInput(format!(
                    "{} cannot follow {} in a {algorithm} path",
                    w[1], w[0]
                )));
            }
        }
        Ok(Path { algorithm, labels })
    }

    pub fn empty(algorithm: Algorithm) -> Self {
        Path {
            algorithm,
            labels: Vec::new(),
        }
    }

    /// Cassaigne path from a word over `{1,2}`.
    pub fn cassaigne_word(word: &str) -> Result<Self> {
        format!("C:{word}").parse()
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn labels(&self) -> &[BranchLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Closed path: the first label may follow the last one, so the path can be
    /// repeated indefinitely. The empty path counts as a loop.
    pub fn is_loop(&self) -> bool {
        match (self.labels.first(), self.labels.last()) {
            (Some(first), Some(last)) => valid_successor(last, first).unwrap_or(false),
            _ => true,
        }
    }

    /// Concatenation, checked at the junction.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Path::new(self.algorithm, labels)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.algorithm.path_prefix())?;
        let sep = if self.algorithm == Algorithm::Cassaigne { "" } else { ";" };
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Path {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn parse_order(s: &str) -> Result<(CoordOrder, &str)> {
    let s = s
        .strip_prefix('(')
        .ok_or_else(|| McfError::Parse(format!("expected '(' at '{s}'")))?;
    let close = s
        .find(')')
        .ok_or_else(|| McfError::Parse(format!("missing ')' in '{s}'")))?;
    let digits: Vec<u8> = s[..close]
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<u8>()
                .map_err(|_| McfError::Parse(format!("bad coordinate index '{d}'")))
        })
        .collect::<Result<_>>()?;
    let idx: [u8; 3] = digits
        .try_into()
        .map_err(|_| McfError::Parse(format!("an order needs three indices: '({}'", &s[..=close])))?;
    Ok((CoordOrder::from_one_based(idx)?, &s[close + 1..]))
}

impl FromStr for Path {
    type Err = McfError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (prefix, body) = compact
            .split_once(':')
            .ok_or_else(|| McfError::Parse(format!("path '{s}' lacks an algorithm prefix")))?;
        let algorithm = match prefix {
            "T" => Algorithm::Triangle,
            "C" => Algorithm::Cassaigne,
            "S" => Algorithm::Selmer,
            other => return Err(McfError::Parse(format!("unknown path prefix '{other}'"))),
        };
        let mut labels = Vec::new();
        match algorithm {
            Algorithm::Cassaigne => {
                for ch in body.chars() {
                    let label = match ch {
                        '1' => BranchLabel::cassaigne(1)?,
                        '2' => BranchLabel::cassaigne(2)?,
                        other => {
                            return Err(McfError::Parse(format!(
                                "Cassaigne symbol '{other}' is not 1 or 2"
                            )))
                        }
                    };
                    labels.push(label);
                }
            }
            Algorithm::Triangle | Algorithm::Selmer => {
                for item in body.split(';').filter(|t| !t.is_empty()) {
                    let (order, rest) = parse_order(item)?;
                    let label = if algorithm == Algorithm::Triangle {
                        let q = rest.strip_prefix('b').ok_or_else(|| {
                            McfError::Parse(format!("triangle label '{item}' needs a quotient 'bN'"))
                        })?;
                        let quotient = q
                            .parse::<u64>()
                            .map_err(|_| McfError::Parse(format!("bad quotient in '{item}'")))?;
                        BranchLabel::Triangle { order, quotient }
                    } else {
                        if !rest.is_empty() {
                            return Err(McfError::Parse(format!("trailing text in '{item}'")));
                        }
                        BranchLabel::Selmer { order }
                    };
                    labels.push(label);
                }
            }
        }
        Path::new(algorithm, labels).map_err(|e| match e {
            McfError::InvalidInput(msg) => McfError::Parse(msg),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_triangle_grammar() {
        let p: Path = "T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2".parse().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.labels()[1], BranchLabel::triangle([3, 1, 2], 1).unwrap());
        assert!(p.is_loop());
        assert_eq!(p.to_string(), "T:(1,2,3)b0;(3,1,2)b1;(2,3,1)b2");
    }

    #[test]
    fn rejects_invalid_successors() {
        let err = "T:(1,2,3)b0;(1,2,3)b1".parse::<Path>().unwrap_err();
        assert!(matches!(err, McfError::Parse(_)));
        assert!("S:(1,2,3);(3,2,1)".parse::<Path>().is_err());
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in ["21221", "X:12", "C:123", "T:(1,2)b0", "T:(1,2,3)", "T:(1,2,2)b0", "T:(1,2,3)bx"] {
            assert!(bad.parse::<Path>().is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn cassaigne_words() {
        let p = Path::cassaigne_word("21221").unwrap();
        assert_eq!(p.to_string(), "C:21221");
        assert!(p.is_loop());
        assert_eq!("C:".parse::<Path>().unwrap(), Path::empty(Algorithm::Cassaigne));
    }

    #[test]
    fn triangle_loop_detection() {
        let open: Path = "T:(1,2,3)b0;(3,1,2)b1".parse().unwrap();
        assert!(!open.is_loop());
        let closed: Path = "T:(1,3,2)b0;(2,1,3)b0;(3,2,1)b4".parse().unwrap();
        assert!(closed.is_loop());
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(start in 0usize..6, quotients in prop::collection::vec(0u64..50, 0..10)) {
            let mut order = CoordOrder::all()[start];
            let labels: Vec<_> = quotients.iter().map(|&q| {
                let l = BranchLabel::Triangle { order, quotient: q };
                order = order.rotate();
                l
            }).collect();
            let p = Path::new(Algorithm::Triangle, labels).unwrap();
            prop_assert_eq!(p.to_string().parse::<Path>().unwrap(), p);
        }

        #[test]
        fn cassaigne_roundtrip(word in "[12]{0,16}") {
            let p = Path::cassaigne_word(&word).unwrap();
            prop_assert_eq!(p.to_string(), format!("C:{word}"));
        }
    }
}
