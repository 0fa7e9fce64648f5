//! Annotated corpus types shared by every metric.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// The universal part-of-speech inventory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Upos {
    Noun,
    Punct,
    Adp,
    Verb,
    Propn,
    Det,
    Adj,
    Pron,
    Aux,
    Adv,
    Cconj,
    Part,
    Num,
    Sconj,
    Intj,
    Sym,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Noun,
        Upos::Punct,
        Upos::Adp,
        Upos::Verb,
        Upos::Propn,
        Upos::Det,
        Upos::Adj,
        Upos::Pron,
        Upos::Aux,
        Upos::Adv,
        Upos::Cconj,
        Upos::Part,
        Upos::Num,
        Upos::Sconj,
        Upos::Intj,
        Upos::Sym,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Noun => "NOUN",
            Upos::Punct => "PUNCT",
            Upos::Adp => "ADP",
            Upos::Verb => "VERB",
            Upos::Propn => "PROPN",
            Upos::Det => "DET",
            Upos::Adj => "ADJ",
            Upos::Pron => "PRON",
            Upos::Aux => "AUX",
            Upos::Adv => "ADV",
            Upos::Cconj => "CCONJ",
            Upos::Part => "PART",
            Upos::Num => "NUM",
            Upos::Sconj => "SCONJ",
            Upos::Intj => "INTJ",
            Upos::Sym => "SYM",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownUpos;

impl FromStr for Upos {
    type Err = UnknownUpos;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|u| u.as_str() == s)
            .ok_or(UnknownUpos)
    }
}

/// One word of a sentence in its basic (non-enhanced) annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: Upos,
    pub xpos: Option<String>,
    pub feats: BTreeMap<String, String>,
    /// Index of the syntactic head, 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub misc: Option<String>,
}

impl Token {
    /// Convenience constructor for the fields metrics look at.
    pub fn new(index: usize, form: &str, lemma: &str, upos: Upos, head: usize, deprel: &str) -> Self {
        Token {
            index,
            form: form.into(),
            lemma: lemma.into(),
            upos,
            xpos: None,
            feats: BTreeMap::new(),
            head,
            deprel: deprel.into(),
            misc: None,
        }
    }

    pub fn with_feat(mut self, name: &str, value: &str) -> Self {
        self.feats.insert(name.into(), value.into());
        self
    }

    pub fn feat(&self, name: &str) -> Option<&str> {
        self.feats.get(name).map(String::as_str)
    }
}

/// A node of a phrase-structure tree.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConstNode {
    pub label: String,
    pub children: ConstChildren,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum ConstChildren {
    /// The single terminal dominated by a preterminal; `index` is 1-based.
    Leaf { index: usize, word: String },
    Nodes(Vec<ConstNode>),
}

impl ConstNode {
    pub fn leaf(label: &str, index: usize, word: &str) -> Self {
        ConstNode {
            label: label.into(),
            children: ConstChildren::Leaf {
                index,
                word: word.into(),
            },
        }
    }

    pub fn phrase(label: &str, children: Vec<ConstNode>) -> Self {
        ConstNode {
            label: label.into(),
            children: ConstChildren::Nodes(children),
        }
    }

    pub fn is_preterminal(&self) -> bool {
        matches!(self.children, ConstChildren::Leaf { .. })
    }

    /// Number of terminals dominated by this node.
    pub fn leaf_count(&self) -> usize {
        match &self.children {
            ConstChildren::Leaf { .. } => 1,
            ConstChildren::Nodes(ns) => ns.iter().map(ConstNode::leaf_count).sum(),
        }
    }

    /// Leaf indices in left-to-right order.
    pub fn leaf_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match &self.children {
            ConstChildren::Leaf { index, .. } => out.push(*index),
            ConstChildren::Nodes(ns) => ns.iter().for_each(|n| n.collect_leaves(out)),
        }
    }

    /// Checks that the leaves read `1..=n` left to right.
    pub fn has_leaf_coverage(&self) -> bool {
        self.leaf_indices()
            .iter()
            .enumerate()
            .all(|(i, &idx)| idx == i + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub const_tree: Option<ConstNode>,
    pub doc_id: String,
    pub sent_id: Option<String>,
    pub text: Option<String>,
}

impl Sentence {
    pub fn new(doc_id: &str, tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            doc_id: doc_id.into(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Copy of the sentence with punctuation removed and positions renumbered.
    ///
    /// Dependents of a removed token move to its closest kept ancestor. A
    /// punctuation root is kept so the result stays a single tree.
    pub fn without_punct(&self) -> Sentence {
        let n = self.tokens.len();
        let keep: Vec<bool> = self
            .tokens
            .iter()
            .map(|t| t.upos != Upos::Punct || t.head == 0)
            .collect();
        let mut new_index = alloc::vec![0usize; n + 1];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                next += 1;
                new_index[i + 1] = next;
            }
        }
        let tokens = self
            .tokens
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(t, _)| {
                let mut head = t.head;
                // bounded walk: a valid tree reaches a kept ancestor or the root
                let mut guard = n;
                while head != 0 && !keep[head - 1] && guard > 0 {
                    head = self.tokens[head - 1].head;
                    guard -= 1;
                }
                let mut t = t.clone();
                t.index = new_index[t.index];
                t.head = if head == 0 { 0 } else { new_index[head] };
                t
            })
            .collect();
        Sentence {
            tokens,
            const_tree: None,
            doc_id: self.doc_id.clone(),
            sent_id: self.sent_id.clone(),
            text: self.text.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Document {
    pub doc_id: String,
    pub meta: BTreeMap<String, String>,
    pub sentences: Vec<Sentence>,
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Corpus {
    pub name: String,
    pub documents: Vec<Document>,
}

/// Outcome of aligning constituency trees with dependency sentences.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TreeAlignment {
    pub attached: usize,
    pub sentences: usize,
    pub trees: usize,
    /// Sentence ordinals (0-based) whose leaf count differs from their
    /// token count.
    pub leaf_mismatches: Vec<usize>,
}

impl TreeAlignment {
    pub fn is_clean(&self) -> bool {
        self.sentences == self.trees && self.leaf_mismatches.is_empty()
    }
}

impl Corpus {
    pub fn new(name: &str) -> Self {
        Corpus {
            name: name.into(),
            documents: Vec::new(),
        }
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences().flat_map(|s| s.tokens.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn token_count(&self) -> usize {
        self.sentences().map(Sentence::len).sum()
    }

    /// Attaches trees to sentences in corpus order. Trees beyond the last
    /// sentence are dropped; mismatches are reported, never reconciled.
    pub fn attach_trees(&mut self, trees: Vec<ConstNode>) -> TreeAlignment {
        let mut report = TreeAlignment {
            sentences: self.sentence_count(),
            trees: trees.len(),
            ..Default::default()
        };
        let sentences = self.documents.iter_mut().flat_map(|d| d.sentences.iter_mut());
        for (ordinal, (sentence, tree)) in sentences.zip(trees).enumerate() {
            if tree.leaf_count() != sentence.len() {
                report.leaf_mismatches.push(ordinal);
            }
            sentence.const_tree = Some(tree);
            report.attached += 1;
        }
        report
    }
}
