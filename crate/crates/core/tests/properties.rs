use proptest::prelude::*;
use textcontrast_core::bracketed::parse_tree;
use textcontrast_core::constituency::{constituent_spans, span_label_table};
use textcontrast_core::corpus::{ConstChildren, ConstNode, Corpus, Document, Sentence, Token, Upos};
use textcontrast_core::geometry::{binned_arc_stats, omega, sum_dep_lengths, GeometryOptions};
use textcontrast_core::lexical::{mtld, MtldOptions};
use textcontrast_core::morpho::upos_distribution;
use textcontrast_core::semantic::{cosine_similarity, emotion_distribution, EmotionLabel};
use textcontrast_core::stats::welch_t_test;
use textcontrast_core::table::LengthBin;

fn heads_strategy(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<prop::sample::Index>(), 1..max).prop_map(|idx| {
        // token 1 is the root of a random recursive tree, then positions
        // are shuffled by reversing odd-length prefixes
        let n = idx.len();
        let mut parent = vec![0usize; n];
        for i in 1..n {
            parent[i] = idx[i].index(i) + 1;
        }
        let rot = idx[0].index(n);
        let map = |p: usize| (p - 1 + rot) % n + 1;
        let mut heads = vec![0; n];
        for i in 0..n {
            heads[map(i + 1) - 1] = if parent[i] == 0 { 0 } else { map(parent[i]) };
        }
        heads
    })
}

fn sentence(heads: &[usize], upos: &[Upos]) -> Sentence {
    Sentence::new(
        "d",
        heads
            .iter()
            .enumerate()
            .map(|(i, &h)| Token::new(i + 1, "w", "w", upos[i % upos.len()], h, "dep"))
            .collect(),
    )
}

fn corpus(sentences: Vec<Sentence>) -> Corpus {
    let mut c = Corpus::new("c");
    c.documents.push(Document {
        doc_id: "d".into(),
        sentences,
        ..Default::default()
    });
    c
}

fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-100.0f64..100.0, 2..30),
        prop::collection::vec(-100.0f64..100.0, 2..30),
    )
}

/// Straight-line MTLD: every TTR is recomputed from the window itself.
fn reference_pass(tokens: &[&str], threshold: f64) -> Option<f64> {
    let mut factors = 0.0;
    let mut start = 0;
    for end in 1..=tokens.len() {
        let mut w: Vec<&str> = tokens[start..end].to_vec();
        let len = w.len();
        w.sort_unstable();
        w.dedup();
        if (w.len() as f64 / len as f64) < threshold {
            factors += 1.0;
            start = end;
        }
    }
    if start < tokens.len() {
        let mut w: Vec<&str> = tokens[start..].to_vec();
        let len = w.len();
        w.sort_unstable();
        w.dedup();
        factors += (1.0 - w.len() as f64 / len as f64) / (1.0 - threshold);
    }
    (factors > 0.0).then(|| tokens.len() as f64 / factors)
}

fn reference_mtld(tokens: &[&str]) -> Option<f64> {
    let rev: Vec<&str> = tokens.iter().rev().copied().collect();
    Some((reference_pass(tokens, 0.72)? + reference_pass(&rev, 0.72)?) / 2.0)
}

const VOCAB: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

proptest! {
    #[test]
    fn welch_symmetric_and_invariant((xs, ys) in samples(), shift in -50.0f64..50.0, scale in 0.1f64..10.0) {
        let Ok(r) = welch_t_test(&xs, &ys) else { return Ok(()) };
        let swapped = welch_t_test(&ys, &xs).unwrap();
        prop_assert_eq!(r.p, swapped.p);
        prop_assert!((0.0..=1.0).contains(&r.p));
        let sx: Vec<f64> = xs.iter().map(|x| x * scale + shift).collect();
        let sy: Vec<f64> = ys.iter().map(|y| y * scale + shift).collect();
        let moved = welch_t_test(&sx, &sy).unwrap();
        prop_assert!((moved.t - r.t).abs() < 1e-6 * (1.0 + r.t.abs()));
        prop_assert!((moved.df - r.df).abs() < 1e-6 * r.df);
        prop_assert!((moved.p - r.p).abs() < 1e-8);
    }

    #[test]
    fn cosine_symmetric_and_scale_free(
        a in prop::collection::vec(-10.0f64..10.0, 3),
        b in prop::collection::vec(-10.0f64..10.0, 3),
        k in 0.01f64..100.0,
    ) {
        let Ok(c) = cosine_similarity(&a, &b) else { return Ok(()) };
        prop_assert_eq!(c, cosine_similarity(&b, &a).unwrap());
        let ka: Vec<f64> = a.iter().map(|x| x * k).collect();
        prop_assert!((cosine_similarity(&ka, &b).unwrap() - c).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&c));
    }

    #[test]
    fn omega_bounds(heads in heads_strategy(14)) {
        let s = sentence(&heads, &[Upos::Noun]);
        if let Some(r) = omega(&s).unwrap() {
            prop_assert!(r.d_min <= r.d);
            prop_assert!(r.omega <= 1.0);
            prop_assert_eq!(r.omega == 1.0, r.d == r.d_min);
            prop_assert_eq!(r.d, sum_dep_lengths(&s).unwrap());
        }
    }

    #[test]
    fn arc_bins_are_consistent(all in prop::collection::vec(heads_strategy(50), 1..8)) {
        let c = corpus(all.iter().map(|h| sentence(h, &[Upos::Noun, Upos::Verb])).collect());
        let b = binned_arc_stats(&c, &LengthBin::defaults(), &GeometryOptions::default()).unwrap();
        for bin in &b.bins {
            if let Some(s) = bin.stats {
                prop_assert!((s.pct_left + s.pct_right - 100.0).abs() < 1e-9);
                let (l, r) = (bin.left_count as f64, bin.right_count as f64);
                let weighted = (s.mean_len_left.unwrap_or(0.0) * l + s.mean_len_right.unwrap_or(0.0) * r) / (l + r);
                prop_assert!((weighted - s.mean_len).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn upos_shares_sum_to_100(tags in prop::collection::vec(0..17usize, 1..200)) {
        let upos: Vec<Upos> = tags.iter().map(|&t| Upos::ALL[t]).collect();
        let heads: Vec<usize> = (0..upos.len()).collect();
        let t = upos_distribution(&corpus(vec![sentence(&heads, &upos)])).unwrap();
        prop_assert_eq!(t.rows.len(), 17);
        prop_assert!((t.total() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn emotion_shares_sum_to_100(labels in prop::collection::vec(0..7usize, 1..100)) {
        let m = labels.iter().enumerate().map(|(i, &l)| (format!("d{i}"), EmotionLabel::ALL[l])).collect();
        prop_assert!((emotion_distribution(&m).unwrap().total() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn mtld_matches_reference(idx in prop::collection::vec(0..VOCAB.len(), 1..300)) {
        let toks: Vec<&str> = idx.iter().map(|&i| VOCAB[i]).collect();
        let got = mtld(&toks, &MtldOptions::default()).unwrap();
        match (got, reference_mtld(&toks)) {
            (Some(g), Some(w)) => prop_assert!((g - w).abs() < 1e-9, "{} vs {}", g, w),
            (g, w) => prop_assert_eq!(g, w),
        }
    }
}

fn phrase_count(n: &ConstNode) -> usize {
    match &n.children {
        ConstChildren::Leaf { .. } => 0,
        ConstChildren::Nodes(k) => 1 + k.iter().map(phrase_count).sum::<usize>(),
    }
}

#[test]
fn span_counts_match_node_counts() {
    for text in [
        "(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)))",
        "(NP (NP (NN a)) (PP (IN of) (NP (NN b))))",
        "(S (S (NP (PRP I)) (VP (VBD ran))) (CC and) (S (NP (PRP she)) (VP (VBD hid))) (. .))",
    ] {
        let t = parse_tree(text, 1).unwrap();
        let spans = constituent_spans(&t);
        assert_eq!(spans.len(), phrase_count(&t));
        assert_eq!(spans[0].length, t.leaf_count());
        assert!(spans.iter().all(|s| s.length >= 1 && s.length <= t.leaf_count()));
    }
}

#[test]
fn span_shares_sum_to_100() {
    let mut s = sentence(&[0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], &[Upos::Noun]);
    s.const_tree = Some(
        parse_tree(
            "(S (S (NP (PRP I)) (VP (VBD ran))) (CC and) (S (NP (PRP she)) (VP (VBD hid) (PP (IN in) (NP (DT the) (NN shed)))) (ADVP (RB quickly))) (. .))",
            1,
        )
        .unwrap(),
    );
    let t = span_label_table(&corpus(vec![s])).unwrap();
    assert!((t.total() - 100.0).abs() < 1e-9);
}

#[test]
fn mtld_hand_values() {
    let opts = MtldOptions::default();
    assert_eq!(mtld(&["a", "a", "a", "a"], &opts).unwrap(), Some(2.0));
    assert_eq!(mtld(&["a", "b", "a"], &opts).unwrap(), Some(3.0));
    // forward: one factor at token 2, window {b, c} left with TTR 1;
    // backward: no factor, window TTR 3/4 gives a partial of 0.25 / 0.28
    let v = mtld(&["a", "a", "b", "c"], &opts).unwrap().unwrap();
    assert!((v - (4.0 + 4.0 * 28.0 / 25.0) / 2.0).abs() < 1e-12, "{v}");
}
