//! Exact minimum linear arrangement of free trees.
//!
//! The solver follows the centroid-based divide and conquer for trees: an
//! unanchored tree is rooted at a centroid, an anchored tree at the vertex
//! that carries the external edge. Each level keeps the cheapest of:
//!
//! * split off a largest subtree and solve both halves recursively;
//! * place `2p` (unanchored) or `2p - 1` (anchored) subtrees around a
//!   central remainder, alternating sides with the largest ones outermost.
//!   The placed subtrees are the largest ones, or the largest ones but one,
//!   which then stays in the middle.
//!
//! The classic size test picks a single `p`; this solver tries that value
//! and its two neighbours. "Largest" is ambiguous when sizes tie at the
//! cut, and equal sizes do not make subtrees interchangeable, so every
//! tie-break is tried once per isomorphism class. Both widenings were
//! needed to match exhaustive search on random trees.
//!
//! Anchored costs include the distance from the anchored vertex to the left
//! border of its block, counted as its 1-based position.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::TreeError;

/// An undirected tree on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeTree {
    adj: Vec<Vec<usize>>,
}

impl FreeTree {
    /// Builds a tree from an edge list, rejecting anything that is not a
    /// connected acyclic graph on `n >= 1` nodes.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(TreeError::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(TreeError::SelfLoop { node: u });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        if edges.len() > n - 1 {
            return Err(TreeError::Cyclic);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        if reached != n {
            return Err(TreeError::Disconnected);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::Cyclic);
        }
        Ok(FreeTree { adj })
    }

    /// Builds a tree from a parent array where `parents[i] == None` marks the
    /// single root.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self, TreeError> {
        let edges: Vec<(usize, usize)> = parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p)))
            .collect();
        Self::from_edges(parents.len(), &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Each edge once, as `(smaller, larger)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Sum of edge lengths when node `order[i]` sits at position `i`.
    ///
    /// Panics if `order` is not a permutation of the nodes.
    pub fn arrangement_cost(&self, order: &[usize]) -> u64 {
        let n = self.node_count();
        assert_eq!(order.len(), n, "arrangement must place every node");
        let mut pos = vec![usize::MAX; n];
        for (i, &u) in order.iter().enumerate() {
            assert!(pos[u] == usize::MAX, "node {u} placed twice");
            pos[u] = i;
        }
        self.edges().map(|(u, v)| pos[u].abs_diff(pos[v]) as u64).sum()
    }
}

/// Optimal arrangement of a free tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinArrangement {
    /// Minimum sum of edge lengths.
    pub cost: u64,
    /// `order[i]` is the node placed at position `i`.
    pub order: Vec<usize>,
}

/// Computes a minimum linear arrangement of `tree`.
pub fn min_linear_arrangement(tree: &FreeTree) -> MinArrangement {
    let n = tree.node_count();
    let mut solver = Solver::new(tree);
    let order = solver.unanchored(0);
    debug_assert_eq!(order.len(), n);
    let cost = tree.arrangement_cost(&order);
    MinArrangement { cost, order }
}

/// Largest `p` for which laying out the `2p` (free) or `2p - 1`
/// (anchored) largest subtrees around the centre passes the size test of
/// the classic divide and conquer, or 0 when none does. `sizes` must be
/// non-increasing and `n` counts the whole component.
fn size_test_p(n: usize, sizes: &[usize], anchored: bool) -> usize {
    let k = sizes.len();
    let max_p = if anchored { k.div_ceil(2) } else { k / 2 };
    (1..=max_p)
        .rev()
        .find(|&p| {
            let m = if anchored { 2 * p - 1 } else { 2 * p };
            let rest = n - sizes[..m].iter().sum::<usize>();
            let bound = if anchored { rest.div_ceil(2) } else { rest / 2 + 1 };
            sizes[m - 1] > bound
        })
        .unwrap_or(0)
}

/// The `p` tried around the size-test value, clipped to `1..=max_p`.
fn p_window(n: usize, sizes: &[usize], anchored: bool) -> impl Iterator<Item = usize> {
    let max_p = if anchored { sizes.len().div_ceil(2) } else { sizes.len() / 2 };
    let p = size_test_p(n, sizes, anchored);
    (p.saturating_sub(1).max(1)..=(p + 1).min(max_p)).filter(move |&q| q >= 1)
}

/// Calls `emit` with every way of taking `left` items from classes of the
/// given sizes, as per-class counts.
fn choose(classes: &[Vec<usize>], counts: &mut [usize], i: usize, left: usize, emit: &mut impl FnMut(&[usize])) {
    if i == classes.len() {
        if left == 0 {
            emit(counts);
        }
        return;
    }
    for c in 0..=left.min(classes[i].len()) {
        counts[i] = c;
        choose(classes, counts, i + 1, left - c, emit);
    }
    counts[i] = 0;
}

/// Subproblem identity up to isomorphism: whether the root is anchored,
/// and the shape id of the component rooted canonically.
type MemoKey = (bool, usize);

struct Solver {
    adj: Vec<Vec<usize>>,
    /// Optimal orders as indices into the canonical preorder of the shape.
    memo: BTreeMap<MemoKey, Vec<usize>>,
    /// Interned rooted shapes: sorted child shape ids to shape id.
    shapes: BTreeMap<Vec<usize>, usize>,
    // scratch, valid only until the next traversal
    parent: Vec<usize>,
    size: Vec<usize>,
    pos: Vec<usize>,
    mark: Vec<bool>,
}

impl Solver {
    fn new(tree: &FreeTree) -> Self {
        let n = tree.node_count();
        Solver {
            adj: tree.adj.clone(),
            memo: BTreeMap::new(),
            shapes: BTreeMap::new(),
            parent: vec![usize::MAX; n],
            size: vec![0; n],
            pos: vec![0; n],
            mark: vec![false; n],
        }
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        let i = self.adj[u].iter().position(|&x| x == v).expect("edge present");
        self.adj[u].remove(i);
        let j = self.adj[v].iter().position(|&x| x == u).expect("edge present");
        self.adj[v].remove(j);
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    /// Preorder of the component containing `root`, filling `parent` and
    /// `size` for its nodes.
    fn root_at(&mut self, root: usize) -> Vec<usize> {
        let mut order = vec![root];
        self.parent[root] = usize::MAX;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            for k in 0..self.adj[u].len() {
                let v = self.adj[u][k];
                if v != self.parent[u] {
                    self.parent[v] = u;
                    order.push(v);
                }
            }
            i += 1;
        }
        for &u in order.iter().rev() {
            let mut s = 1;
            for &v in &self.adj[u] {
                if v != self.parent[u] {
                    s += self.size[v];
                }
            }
            self.size[u] = s;
        }
        order
    }

    fn centroid(&mut self, x: usize) -> usize {
        let order = self.root_at(x);
        let m = order.len();
        let mut u = x;
        loop {
            let heavy = self.adj[u]
                .iter()
                .copied()
                .find(|&v| v != self.parent[u] && self.size[v] * 2 > m);
            match heavy {
                Some(v) => u = v,
                None => return u,
            }
        }
    }

    /// Children of `root` with their subtree sizes, largest first.
    fn sorted_children(&mut self, root: usize) -> (usize, Vec<(usize, usize)>) {
        let order = self.root_at(root);
        let mut kids: Vec<(usize, usize)> =
            self.adj[root].iter().map(|&v| (self.size[v], v)).collect();
        // stable: equal sizes keep adjacency order
        kids.sort_by_key(|k| core::cmp::Reverse(k.0));
        (order.len(), kids)
    }

    /// Cost of `order` over the edges of its component; with `anchor`,
    /// adds the 1-based position of that node.
    fn evaluate(&mut self, order: &[usize], anchor: Option<usize>) -> u64 {
        for (i, &u) in order.iter().enumerate() {
            self.pos[u] = i;
        }
        let mut cost = 0u64;
        for &u in order {
            for &v in &self.adj[u] {
                if u < v {
                    cost += self.pos[u].abs_diff(self.pos[v]) as u64;
                }
            }
        }
        if let Some(a) = anchor {
            cost += self.pos[a] as u64 + 1;
        }
        cost
    }

    /// Shape id of the component of `root` rooted there, and its preorder
    /// with children visited in shape id order. Isomorphic rooted trees get
    /// the same id and preorders that correspond node for node.
    fn canonical(&mut self, root: usize) -> (usize, Vec<usize>) {
        let order = self.root_at(root);
        let mut ids = BTreeMap::new();
        for &u in order.iter().rev() {
            let mut kids: Vec<usize> = self.adj[u]
                .iter()
                .filter(|&&w| w != self.parent[u])
                .map(|w| ids[w])
                .collect();
            kids.sort_unstable();
            let next = self.shapes.len();
            let id = *self.shapes.entry(kids).or_insert(next);
            ids.insert(u, id);
        }
        let mut seq = Vec::with_capacity(order.len());
        let mut stack = vec![(root, usize::MAX)];
        while let Some((u, p)) = stack.pop() {
            seq.push(u);
            let mut kids: Vec<(usize, usize)> =
                self.adj[u].iter().filter(|&&w| w != p).map(|&w| (ids[&w], w)).collect();
            // reversed so the smallest id is visited first
            kids.sort_unstable_by_key(|k| core::cmp::Reverse(k.0));
            stack.extend(kids.into_iter().map(|(_, w)| (w, u)));
        }
        (ids[&root], seq)
    }

    fn lookup(&self, key: MemoKey, seq: &[usize]) -> Option<Vec<usize>> {
        self.memo.get(&key).map(|idx| idx.iter().map(|&i| seq[i]).collect())
    }

    fn store(&mut self, key: MemoKey, seq: &[usize], order: &[usize]) {
        for (i, &u) in seq.iter().enumerate() {
            self.pos[u] = i;
        }
        let idx = order.iter().map(|&u| self.pos[u]).collect();
        self.memo.insert(key, idx);
    }

    fn unanchored(&mut self, x: usize) -> Vec<usize> {
        // with two centroids, the one giving the smaller id roots the key;
        // equal ids mean an automorphism swaps them
        let c = self.centroid(x);
        let m = self.root_at(c).len();
        let twin = self.adj[c].iter().copied().find(|&v| self.size[v] * 2 == m);
        let mut canon = self.canonical(c);
        if let Some(v) = twin {
            let other = self.canonical(v);
            if other.0 < canon.0 {
                canon = other;
            }
        }
        let (id, seq) = canon;
        if let Some(order) = self.lookup((false, id), &seq) {
            return order;
        }
        let order = self.solve_unanchored(x);
        self.store((false, id), &seq, &order);
        order
    }

    fn anchored(&mut self, r: usize) -> Vec<usize> {
        let (id, seq) = self.canonical(r);
        if let Some(order) = self.lookup((true, id), &seq) {
            return order;
        }
        let order = self.solve_anchored(r);
        self.store((true, id), &seq, &order);
        order
    }

    /// Shape id of the subtree hanging from `v` away from `parent`;
    /// isomorphic rooted subtrees share an id.
    fn shape(&mut self, v: usize, parent: usize) -> usize {
        let mut order = vec![(v, parent)];
        let mut i = 0;
        while i < order.len() {
            let (u, p) = order[i];
            for &w in &self.adj[u] {
                if w != p {
                    order.push((w, u));
                }
            }
            i += 1;
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        for &(u, p) in order.iter().rev() {
            let mut kids: Vec<usize> = self.adj[u].iter().filter(|&&w| w != p).map(|w| ids[w]).collect();
            kids.sort_unstable();
            let next = self.shapes.len();
            let id = *self.shapes.entry(kids).or_insert(next);
            ids.insert(u, id);
        }
        ids[&v]
    }

    /// Every choice of the `m` largest children of `root` (sorted largest
    /// first in `kids`), up to isomorphism. Sizes alone leave the choice open
    /// when they tie at the cut, and subtrees of equal size can still differ
    /// in shape.
    fn largest(&mut self, root: usize, kids: &[(usize, usize)], m: usize) -> Vec<Vec<usize>> {
        let cut = kids[m - 1].0;
        let fixed: Vec<usize> = kids.iter().filter(|k| k.0 > cut).map(|k| k.1).collect();
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(size, v) in kids {
            if size == cut {
                let id = self.shape(v, root);
                classes.entry(id).or_default().push(v);
            }
        }
        let classes: Vec<Vec<usize>> = classes.into_values().collect();
        let mut out = Vec::new();
        let mut counts = vec![0usize; classes.len()];
        choose(&classes, &mut counts, 0, m - fixed.len(), &mut |counts| {
            let mut pick = fixed.clone();
            for (class, &c) in classes.iter().zip(counts) {
                pick.extend_from_slice(&class[..c]);
            }
            out.push(pick);
        });
        out
    }

    /// Candidate sets of `m` subtrees to lay out around the centre: the `m`
    /// largest, or the `m + 1` largest with any one of them kept in the
    /// middle. A larger subtree can be cheaper to keep central than a
    /// smaller one of awkward shape.
    fn outer_sets(&mut self, root: usize, kids: &[(usize, usize)], m: usize) -> Vec<Vec<usize>> {
        if m == kids.len() {
            return self.largest(root, kids, m);
        }
        let mut out = Vec::new();
        for pick in self.largest(root, kids, m + 1) {
            // keeping back isomorphic subtrees gives isomorphic layouts, so
            // only the last of each shape is tried
            let shapes: Vec<usize> = pick.iter().map(|&v| self.shape(v, root)).collect();
            for j in 0..pick.len() {
                if shapes[j + 1..].contains(&shapes[j]) {
                    continue;
                }
                let mut outer = pick.clone();
                outer.remove(j);
                if !out.contains(&outer) {
                    out.push(outer);
                }
            }
        }
        out
    }

    /// Lower bound on the free arrangement cost of the component of `x`:
    /// a vertex of degree `d` sees its neighbours at distances of at least
    /// 1, 1, 2, 2, 3, ..., and every edge is counted from both ends.
    fn lower_bound(&mut self, x: usize) -> u64 {
        let nodes = self.root_at(x);
        let ends: u64 = nodes
            .iter()
            .map(|&u| {
                let d = self.adj[u].len() as u64;
                (d + 1) * (d + 1) / 4
            })
            .sum();
        (ends.div_ceil(2)).max(nodes.len() as u64 - 1)
    }

    fn solve_unanchored(&mut self, x: usize) -> Vec<usize> {
        let u = self.centroid(x);
        let (m, kids) = self.sorted_children(u);
        if m == 1 {
            return vec![u];
        }
        let floor = self.lower_bound(u);
        let mut best: Option<(u64, Vec<usize>)> = None;
        // [T1] [rest], joined by the edge between their borders
        for pick in self.largest(u, &kids, 1) {
            let v1 = pick[0];
            self.remove_edge(u, v1);
            let mut split = self.anchored(v1);
            let right = self.anchored(u);
            self.add_edge(u, v1);
            split.reverse();
            split.extend(right);
            let cost = self.evaluate(&split, None);
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, split));
            }
        }
        // [T1][T3]..[T(2p-1)] [centre] [T(2p)]..[T4][T2]
        let sizes: Vec<usize> = kids.iter().map(|k| k.0).collect();
        for p in p_window(m, &sizes, false) {
            for outer in self.outer_sets(u, &kids, 2 * p) {
                if best.as_ref().is_some_and(|b| b.0 <= floor) {
                    break;
                }
                let bound = best.as_ref().map(|b| b.0);
                if let Some(spread) = self.spread(u, &outer, |i| i % 2 == 0, None, bound) {
                    let cost = self.evaluate(&spread, None);
                    if best.as_ref().is_none_or(|b| cost < b.0) {
                        best = Some((cost, spread));
                    }
                }
            }
        }
        best.expect("at least one layout").1
    }

    fn solve_anchored(&mut self, r: usize) -> Vec<usize> {
        let (m, kids) = self.sorted_children(r);
        if m == 1 {
            return vec![r];
        }
        let mut best: Option<(u64, Vec<usize>)> = None;
        // anchor [rest] [T1]: the anchor and T1 edges pull r both ways, so
        // the rest is solved free
        for pick in self.largest(r, &kids, 1) {
            let v1 = pick[0];
            self.remove_edge(r, v1);
            let mut split = self.unanchored(r);
            let right = self.anchored(v1);
            self.add_edge(r, v1);
            split.extend(right);
            let cost = self.evaluate(&split, Some(r));
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, split));
            }
        }
        // anchor [T2][T4]..[T(2p-2)] [centre] [T(2p-1)]..[T3][T1]
        let sizes: Vec<usize> = kids.iter().map(|k| k.0).collect();
        for p in p_window(m, &sizes, true) {
            for outer in self.outer_sets(r, &kids, 2 * p - 1) {
                let bound = best.as_ref().map(|b| b.0);
                if let Some(spread) = self.spread(r, &outer, |i| i % 2 == 1, Some(r), bound) {
                    let cost = self.evaluate(&spread, Some(r));
                    if best.as_ref().is_none_or(|b| cost < b.0) {
                        best = Some((cost, spread));
                    }
                }
            }
        }
        best.expect("at least one layout").1
    }

    fn detach(&mut self, centre: usize, outer: &[usize]) {
        for &v in outer {
            self.mark[v] = true;
            let j = self.adj[v].iter().position(|&x| x == centre).expect("edge present");
            self.adj[v].swap_remove(j);
        }
        let mark = &self.mark;
        self.adj[centre].retain(|&v| !mark[v]);
        for &v in outer {
            self.mark[v] = false;
        }
    }

    fn reattach(&mut self, centre: usize, outer: &[usize]) {
        for &v in outer {
            self.add_edge(centre, v);
        }
    }

    /// Lays the subtrees rooted at `outer` (largest first) around the
    /// remainder of `centre`'s component. Subtrees for which `goes_left`
    /// holds are placed left of the centre, outermost first.
    ///
    /// The centre has as many pulls to its left (counting the anchor) as to
    /// its right, so where it sits inside the middle does not change the
    /// cost of the connecting edges. That makes a cheap stand-in middle plus
    /// a lower bound on the real one a valid bound on the whole layout;
    /// returns `None` without solving the middle when that bound reaches
    /// `bound`.
    fn spread(
        &mut self,
        centre: usize,
        outer: &[usize],
        goes_left: impl Fn(usize) -> bool,
        anchor: Option<usize>,
        bound: Option<u64>,
    ) -> Option<Vec<usize>> {
        self.detach(centre, outer);
        let blocks: Vec<Vec<usize>> = outer.iter().map(|&v| self.anchored(v)).collect();
        let assemble = |middle: Vec<usize>| {
            let mut out = Vec::new();
            let mut right = Vec::new();
            for (i, block) in blocks.iter().enumerate() {
                if goes_left(i) {
                    out.extend(block.iter().rev());
                } else {
                    right.push(block);
                }
            }
            out.extend(middle);
            for block in right.into_iter().rev() {
                out.extend(block);
            }
            out
        };
        if let Some(bound) = bound {
            let stand_in = self.root_at(centre);
            let inner = self.evaluate(&stand_in, None);
            let floor = self.lower_bound(centre);
            let layout = assemble(stand_in);
            // edges to the centre are detached, so add them by hand
            let mut cost = self.evaluate(&layout, anchor);
            for &v in outer {
                cost += self.pos[centre].abs_diff(self.pos[v]) as u64;
            }
            if cost - inner + floor >= bound {
                self.reattach(centre, outer);
                return None;
            }
        }
        let middle = self.unanchored(centre);
        self.reattach(centre, outer);
        Some(assemble(middle))
    }
}
