//! Decision-tree corpora.
//!
//! A corpus file lists instances, each a header line `instance N L`
//! followed by `L` trees, one per line in the nested syntax
//! `node i (t0) (t1)` / `leaf b`. Blank lines and lines starting with `#`
//! are ignored.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use pargames_core::influence::{DecisionTree, TreeFunction};
use rand::Rng;

use crate::runner::run_trials;
use crate::Error;

/// A multi-output boolean function `{0,1}^N -> {0,1}^L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub input_len: usize,
    pub trees: Vec<DecisionTree>,
}

impl Instance {
    pub fn depth(&self) -> usize {
        self.trees
            .iter()
            .map(DecisionTree::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn function(&self) -> TreeFunction {
        TreeFunction::new(self.input_len, self.trees.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub instances: Vec<Instance>,
}

impl Corpus {
    /// `count` instances on `input_len` inputs with `1..=max_outputs`
    /// random trees of depth at most `max_depth` each.
    pub fn generate(
        count: u64,
        input_len: usize,
        max_outputs: usize,
        max_depth: usize,
        seed: u64,
    ) -> Corpus {
        let instances = run_trials(seed, count, |_, rng| {
            let l = rng.gen_range(1..=max_outputs.max(1));
            Instance {
                input_len,
                trees: (0..l)
                    .map(|_| DecisionTree::random(rng, input_len, max_depth))
                    .collect(),
            }
        });
        Corpus { instances }
    }

    pub fn read(path: &Path) -> Result<Corpus, Error> {
        std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .parse()
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, inst) in self.instances.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            writeln!(f, "instance {} {}", inst.input_len, inst.trees.len())?;
            for t in &inst.trees {
                writeln!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl FromStr for Corpus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut instances = Vec::new();
        while let Some((k, header)) = lines.next() {
            let fields: Vec<&str> = header.split_whitespace().collect();
            let (input_len, count) = match fields.as_slice() {
                ["instance", n, l] => (
                    n.parse::<usize>()
                        .map_err(|e| parse_error(k, e.to_string()))?,
                    l.parse::<usize>()
                        .map_err(|e| parse_error(k, e.to_string()))?,
                ),
                _ => return Err(parse_error(k, "expected `instance N L`")),
            };
            let mut trees = Vec::with_capacity(count);
            for _ in 0..count {
                let (k, line) = lines.next().ok_or_else(|| parse_error(k, "missing tree"))?;
                let t: DecisionTree = line.parse().map_err(|e| parse_error(k, format!("{e}")))?;
                if t.arity() > input_len {
                    return Err(parse_error(
                        k,
                        format!("tree reads past input length {input_len}"),
                    ));
                }
                trees.push(t);
            }
            instances.push(Instance { input_len, trees });
        }
        Ok(Corpus { instances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Corpus::generate(5, 8, 3, 3, 1);
        let text = c.to_string();
        assert_eq!(text.parse::<Corpus>().unwrap(), c);
        assert!(c
            .instances
            .iter()
            .all(|i| i.depth() <= 3 && (1..=3).contains(&i.trees.len())));
    }

    #[test]
    fn comments_and_errors() {
        let c: Corpus = "# two trees\ninstance 2 2\nleaf 1\nnode 1 (leaf 0) (leaf 1)\n"
            .parse()
            .unwrap();
        assert_eq!(c.instances[0].trees.len(), 2);
        assert!(matches!(
            "instance 2 1\nnode 5 (leaf 0) (leaf 1)".parse::<Corpus>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!("instance 2 2\nleaf 0".parse::<Corpus>().is_err());
        assert!("leaf 0".parse::<Corpus>().is_err());
    }
}
