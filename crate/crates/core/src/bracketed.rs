//! Penn-Treebank-style bracketed trees, one tree per line.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::{ConstChildren, ConstNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("line {line}: unbalanced parentheses at column {column}")]
    Unbalanced { line: usize, column: usize },
    #[error("line {line}: empty node label at column {column}")]
    EmptyLabel { line: usize, column: usize },
    #[error("line {line}: terminal {word:?} at column {column} is not the only child of a preterminal")]
    StrayTerminal {
        line: usize,
        column: usize,
        word: String,
    },
    #[error("line {line}: expected a tree, found {found:?} at column {column}")]
    Unexpected {
        line: usize,
        column: usize,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

/// Tokens with their 1-based character column.
fn lex(line: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut atom_start: Option<(usize, usize)> = None;
    let mut col = 0;
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some((c, b)) = atom_start.take() {
                out.push((c, Tok::Atom(&line[b..byte])));
            }
            match ch {
                '(' => out.push((col, Tok::Open)),
                ')' => out.push((col, Tok::Close)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some((col, byte));
        }
    }
    if let Some((c, b)) = atom_start {
        out.push((c, Tok::Atom(&line[b..])));
    }
    out
}

struct LineParser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    line: usize,
    end_column: usize,
    next_leaf: usize,
}

impl<'a> LineParser<'a> {
    fn unbalanced(&self) -> BracketError {
        BracketError::Unbalanced {
            line: self.line,
            column: self.end_column,
        }
    }

    /// Parses a node whose `(` has just been consumed at `open_col`.
    fn node(&mut self, open_col: usize, outermost: bool) -> Result<ConstNode, BracketError> {
        let label = match self.toks.get(self.at) {
            Some((_, Tok::Atom(a))) => {
                self.at += 1;
                String::from(*a)
            }
            Some((_, Tok::Open)) if outermost => String::new(),
            Some((c, _)) => {
                return Err(BracketError::EmptyLabel {
                    line: self.line,
                    column: *c,
                })
            }
            None => return Err(self.unbalanced()),
        };
        let mut children = Vec::new();
        let mut word: Option<(usize, &'a str)> = None;
        loop {
            match self.toks.get(self.at).cloned() {
                None => return Err(self.unbalanced()),
                Some((_, Tok::Close)) => {
                    self.at += 1;
                    break;
                }
                Some((c, Tok::Open)) => {
                    if let Some((wc, w)) = word {
                        return Err(self.stray(wc, w));
                    }
                    self.at += 1;
                    children.push(self.node(c, false)?);
                }
                Some((c, Tok::Atom(a))) => {
                    if word.is_some() || !children.is_empty() {
                        return Err(self.stray(c, a));
                    }
                    self.at += 1;
                    word = Some((c, a));
                }
            }
        }
        let children = match word {
            Some((_, w)) => {
                self.next_leaf += 1;
                ConstChildren::Leaf {
                    index: self.next_leaf,
                    word: w.into(),
                }
            }
            None if children.is_empty() => {
                return Err(BracketError::Unexpected {
                    line: self.line,
                    column: open_col,
                    found: "()".into(),
                })
            }
            None => ConstChildren::Nodes(children),
        };
        Ok(ConstNode { label, children })
    }

    fn stray(&self, column: usize, word: &str) -> BracketError {
        BracketError::StrayTerminal {
            line: self.line,
            column,
            word: word.into(),
        }
    }
}

/// Parses one bracketed tree. Only the outermost node may be unlabeled,
/// as in `( (S ...))`.
pub fn parse_tree(line: &str, line_no: usize) -> Result<ConstNode, BracketError> {
    let trimmed = line.trim_end();
    let mut p = LineParser {
        toks: lex(trimmed),
        at: 0,
        line: line_no,
        end_column: trimmed.chars().count(),
        next_leaf: 0,
    };
    let tree = match p.toks.first().cloned() {
        Some((c, Tok::Open)) => {
            p.at = 1;
            p.node(c, true)?
        }
        Some((c, Tok::Close)) => {
            return Err(BracketError::Unbalanced {
                line: line_no,
                column: c,
            })
        }
        Some((c, Tok::Atom(a))) => {
            return Err(BracketError::Unexpected {
                line: line_no,
                column: c,
                found: a.into(),
            })
        }
        None => return Err(p.unbalanced()),
    };
    if let Some((c, tok)) = p.toks.get(p.at) {
        return Err(match tok {
            Tok::Close => BracketError::Unbalanced {
                line: line_no,
                column: *c,
            },
            Tok::Open => BracketError::Unexpected {
                line: line_no,
                column: *c,
                found: "(".into(),
            },
            Tok::Atom(a) => BracketError::Unexpected {
                line: line_no,
                column: *c,
                found: (*a).into(),
            },
        });
    }
    Ok(tree)
}

/// Parses every non-blank line as a tree.
pub fn parse_bracketed(input: &str) -> Result<Vec<ConstNode>, BracketError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_tree(l, i + 1))
        .collect()
}

/// Renders a tree on one line with single spaces.
pub fn serialize_tree(tree: &ConstNode) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(node: &ConstNode, out: &mut String) {
    out.push('(');
    out.push_str(&node.label);
    match &node.children {
        ConstChildren::Leaf { word, .. } => {
            out.push(' ');
            out.push_str(word);
        }
        ConstChildren::Nodes(ns) => {
            for n in ns {
                if !out.ends_with('(') {
                    out.push(' ');
                }
                write_node(n, out);
            }
        }
    }
    out.push(')');
}
