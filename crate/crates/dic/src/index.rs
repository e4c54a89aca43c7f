//! Ordered interval index: an AVL tree over closed integer intervals keyed by
//! `(lo, hi, id)`, augmented with subtree max-hi for output-sensitive
//! intersection enumeration. Duplicate geometry is fine; ids must be unique.
//!
//! One tree serves three roles in the engine: the live set, the endpoint set
//! (as degenerate `[t,t]` entries), and the per-level sets.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("interval {id}: lo {lo} exceeds hi {hi}")]
    InvalidInterval { id: u64, lo: i64, hi: i64 },
    #[error("id {0} already present")]
    DuplicateId(u64),
    #[error("id {0} not present")]
    UnknownId(u64),
    #[error("reversed query range [{lo}, {hi}]")]
    InvalidQuery { lo: i64, hi: i64 },
}

/// Borrowed view of one stored entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry<'a, V> {
    pub lo: i64,
    pub hi: i64,
    pub id: u64,
    pub value: &'a V,
}

#[derive(Debug, Clone)]
struct Node<V> {
    lo: i64,
    hi: i64,
    id: u64,
    value: V,
    max_hi: i64,
    height: u16,
    left: Link<V>,
    right: Link<V>,
}

type Link<V> = Option<Box<Node<V>>>;

#[derive(Debug, Clone)]
pub struct IntervalTree<V> {
    root: Link<V>,
    by_id: HashMap<u64, (i64, i64)>,
}

impl<V> Default for IntervalTree<V> {
    fn default() -> Self {
        IntervalTree { root: None, by_id: HashMap::new() }
    }
}

impl<V> Node<V> {
    fn new(lo: i64, hi: i64, id: u64, value: V) -> Box<Self> {
        Box::new(Node { lo, hi, id, value, max_hi: hi, height: 1, left: None, right: None })
    }

    fn key(&self) -> (i64, i64, u64) {
        (self.lo, self.hi, self.id)
    }

    fn refresh(&mut self) {
        self.height = 1 + link_height(&self.left).max(link_height(&self.right));
        self.max_hi = self.hi;
        if let Some(l) = &self.left {
            self.max_hi = self.max_hi.max(l.max_hi);
        }
        if let Some(r) = &self.right {
            self.max_hi = self.max_hi.max(r.max_hi);
        }
    }

    fn balance(&self) -> i32 {
        link_height(&self.left) as i32 - link_height(&self.right) as i32
    }
}

fn link_height<V>(link: &Link<V>) -> u16 {
    link.as_ref().map_or(0, |n| n.height)
}

fn rotate_right<V>(mut node: Box<Node<V>>) -> Box<Node<V>> {
    let mut pivot = node.left.take().expect("rotate_right needs a left child");
    node.left = pivot.right.take();
    node.refresh();
    pivot.right = Some(node);
    pivot.refresh();
    pivot
}

fn rotate_left<V>(mut node: Box<Node<V>>) -> Box<Node<V>> {
    let mut pivot = node.right.take().expect("rotate_left needs a right child");
    node.right = pivot.left.take();
    node.refresh();
    pivot.left = Some(node);
    pivot.refresh();
    pivot
}

fn rebalance<V>(mut node: Box<Node<V>>) -> Box<Node<V>> {
    node.refresh();
    let bal = node.balance();
    if bal > 1 {
        if node.left.as_ref().map_or(0, |l| l.balance()) < 0 {
            node.left = Some(rotate_left(node.left.take().unwrap()));
            node.refresh();
        }
        rotate_right(node)
    } else if bal < -1 {
        if node.right.as_ref().map_or(0, |r| r.balance()) > 0 {
            node.right = Some(rotate_right(node.right.take().unwrap()));
            node.refresh();
        }
        rotate_left(node)
    } else {
        node
    }
}

fn insert_node<V>(link: Link<V>, new: Box<Node<V>>) -> Box<Node<V>> {
    match link {
        None => new,
        Some(mut node) => {
            if new.key() < node.key() {
                node.left = Some(insert_node(node.left.take(), new));
            } else {
                node.right = Some(insert_node(node.right.take(), new));
            }
            rebalance(node)
        }
    }
}

fn pop_min<V>(mut node: Box<Node<V>>) -> (Link<V>, Box<Node<V>>) {
    match node.left.take() {
        None => (node.right.take(), node),
        Some(left) => {
            let (rest, min) = pop_min(left);
            node.left = rest;
            (Some(rebalance(node)), min)
        }
    }
}

fn remove_node<V>(link: Link<V>, key: (i64, i64, u64)) -> (Link<V>, Option<Box<Node<V>>>) {
    let Some(mut node) = link else { return (None, None) };
    if key < node.key() {
        let (rest, removed) = remove_node(node.left.take(), key);
        node.left = rest;
        (Some(rebalance(node)), removed)
    } else if key > node.key() {
        let (rest, removed) = remove_node(node.right.take(), key);
        node.right = rest;
        (Some(rebalance(node)), removed)
    } else {
        match (node.left.take(), node.right.take()) {
            (None, right) => (right, Some(node)),
            (left, None) => (left, Some(node)),
            (left, Some(right)) => {
                let (rest, mut successor) = pop_min(right);
                successor.left = left;
                successor.right = rest;
                (Some(rebalance(successor)), Some(node))
            }
        }
    }
}

fn collect<'a, V>(link: &'a Link<V>, lo: i64, hi: i64, out: &mut Vec<Entry<'a, V>>) {
    let Some(node) = link else { return };
    if node.max_hi < lo {
        return;
    }
    collect(&node.left, lo, hi, out);
    if node.lo > hi {
        return;
    }
    if node.hi >= lo {
        out.push(Entry { lo: node.lo, hi: node.hi, id: node.id, value: &node.value });
    }
    collect(&node.right, lo, hi, out);
}

impl<V> IntervalTree<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.by_id.contains_key(&id)
    }

    pub fn insert(&mut self, lo: i64, hi: i64, id: u64, value: V) -> Result<(), IndexError> {
        if lo > hi {
            return Err(IndexError::InvalidInterval { id, lo, hi });
        }
        if self.by_id.contains_key(&id) {
            return Err(IndexError::DuplicateId(id));
        }
        self.by_id.insert(id, (lo, hi));
        self.root = Some(insert_node(self.root.take(), Node::new(lo, hi, id, value)));
        Ok(())
    }

    pub fn remove(&mut self, id: u64) -> Result<(i64, i64, V), IndexError> {
        let (lo, hi) = self.by_id.remove(&id).ok_or(IndexError::UnknownId(id))?;
        let (rest, removed) = remove_node(self.root.take(), (lo, hi, id));
        self.root = rest;
        let node = removed.expect("id map and tree out of sync");
        Ok((node.lo, node.hi, node.value))
    }

    pub fn get(&self, id: u64) -> Option<(i64, i64, &V)> {
        let &(lo, hi) = self.by_id.get(&id)?;
        let mut cur = &self.root;
        while let Some(node) = cur {
            match (lo, hi, id).cmp(&node.key()) {
                std::cmp::Ordering::Less => cur = &node.left,
                std::cmp::Ordering::Greater => cur = &node.right,
                std::cmp::Ordering::Equal => return Some((node.lo, node.hi, &node.value)),
            }
        }
        None
    }

    pub fn get_mut(&mut self, id: u64) -> Option<&mut V> {
        let &(lo, hi) = self.by_id.get(&id)?;
        let mut cur = &mut self.root;
        while let Some(node) = cur {
            match (lo, hi, id).cmp(&node.key()) {
                std::cmp::Ordering::Less => cur = &mut node.left,
                std::cmp::Ordering::Greater => cur = &mut node.right,
                std::cmp::Ordering::Equal => return Some(&mut node.value),
            }
        }
        None
    }

    /// All entries intersecting the closed query `[lo, hi]`, in key order.
    pub fn overlapping(&self, lo: i64, hi: i64) -> Result<Vec<Entry<'_, V>>, IndexError> {
        if lo > hi {
            return Err(IndexError::InvalidQuery { lo, hi });
        }
        let mut out = Vec::new();
        collect(&self.root, lo, hi, &mut out);
        Ok(out)
    }

    /// Entries containing the point `t`.
    pub fn stab(&self, t: i64) -> Vec<Entry<'_, V>> {
        self.overlapping(t, t).expect("degenerate query cannot be reversed")
    }

    pub fn iter(&self) -> Iter<'_, V> {
        let mut stack = Vec::new();
        push_left(&self.root, &mut stack);
        Iter { stack }
    }
}

fn push_left<'a, V>(mut link: &'a Link<V>, stack: &mut Vec<&'a Node<V>>) {
    while let Some(node) = link {
        stack.push(node);
        link = &node.left;
    }
}

/// In-order iterator: ascending `(lo, hi, id)`.
pub struct Iter<'a, V> {
    stack: Vec<&'a Node<V>>,
}

impl<'a, V> Iterator for Iter<'a, V> {
    type Item = Entry<'a, V>;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        push_left(&node.right, &mut self.stack);
        Some(Entry { lo: node.lo, hi: node.hi, id: node.id, value: &node.value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Linear-scan reference used to validate query results.
    #[derive(Default)]
    struct ListOracle {
        items: Vec<(i64, i64, u64)>,
    }

    impl ListOracle {
        fn insert(&mut self, lo: i64, hi: i64, id: u64) {
            self.items.push((lo, hi, id));
        }

        fn remove(&mut self, id: u64) -> Option<(i64, i64)> {
            let pos = self.items.iter().position(|&(_, _, i)| i == id)?;
            let (lo, hi, _) = self.items.swap_remove(pos);
            Some((lo, hi))
        }

        fn overlapping(&self, lo: i64, hi: i64) -> Vec<(i64, i64, u64)> {
            let mut hits: Vec<_> = self
                .items
                .iter()
                .copied()
                .filter(|&(l, h, _)| l <= hi && lo <= h)
                .collect();
            hits.sort();
            hits
        }
    }

    fn keys<V>(entries: &[Entry<'_, V>]) -> Vec<(i64, i64, u64)> {
        entries.iter().map(|e| (e.lo, e.hi, e.id)).collect()
    }

    fn figure_set() -> [(i64, i64); 6] {
        [(1, 2), (8, 9), (1, 7), (3, 9), (4, 6), (4, 6)]
    }

    #[test]
    fn singleton_roundtrip() {
        let mut tree = IntervalTree::new();
        tree.insert(1, 2, 1, ()).unwrap();
        assert_eq!(tree.len(), 1);
        assert_eq!(keys(&tree.overlapping(0, 3).unwrap()), vec![(1, 2, 1)]);
    }

    #[test]
    fn six_interval_trace() {
        let mut tree = IntervalTree::new();
        for (i, (lo, hi)) in figure_set().into_iter().enumerate() {
            tree.insert(lo, hi, i as u64 + 1, ()).unwrap();
        }
        assert_eq!(tree.len(), 6);
        let at_4: Vec<u64> = tree.stab(4).iter().map(|e| e.id).collect();
        assert_eq!(at_4, vec![3, 4, 5, 6]);
    }

    #[test]
    fn thousand_random_inserts_enumerate_exactly_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tree = IntervalTree::new();
        for id in 0..1000u64 {
            let lo = rng.random_range(-500..500);
            let hi = lo + rng.random_range(0..100);
            tree.insert(lo, hi, id, ()).unwrap();
        }
        let mut ids: Vec<u64> = tree.overlapping(i64::MIN, i64::MAX).unwrap().iter().map(|e| e.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 1000);
    }

    #[test]
    fn delete_only_interval_then_queries_empty() {
        let mut tree = IntervalTree::new();
        tree.insert(5, 9, 3, "x").unwrap();
        let (lo, hi, v) = tree.remove(3).unwrap();
        assert_eq!((lo, hi, v), (5, 9, "x"));
        assert!(tree.is_empty());
        assert!(tree.overlapping(i64::MIN, i64::MAX).unwrap().is_empty());
    }

    #[test]
    fn delete_then_query_matches_oracle_example() {
        let mut tree = IntervalTree::new();
        tree.insert(1, 5, 1, ()).unwrap();
        tree.insert(3, 9, 2, ()).unwrap();
        tree.remove(1).unwrap();
        assert!(tree.overlapping(1, 2).unwrap().is_empty());
        assert_eq!(keys(&tree.overlapping(4, 4).unwrap()), vec![(3, 9, 2)]);
    }

    #[test]
    fn double_delete_is_unknown_id() {
        let mut tree = IntervalTree::new();
        tree.insert(0, 0, 7, ()).unwrap();
        tree.remove(7).unwrap();
        assert_eq!(tree.remove(7), Err(IndexError::UnknownId(7)));
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut tree = IntervalTree::new();
        tree.insert(0, 1, 7, ()).unwrap();
        assert_eq!(tree.insert(5, 6, 7, ()), Err(IndexError::DuplicateId(7)));
    }

    #[test]
    fn reversed_inputs_rejected() {
        let mut tree: IntervalTree<()> = IntervalTree::new();
        assert_eq!(tree.insert(3, 1, 0, ()), Err(IndexError::InvalidInterval { id: 0, lo: 3, hi: 1 }));
        assert_eq!(
            tree.overlapping(2, -2).unwrap_err(),
            IndexError::InvalidQuery { lo: 2, hi: -2 }
        );
    }

    #[test]
    fn touching_endpoints_intersect() {
        let mut tree = IntervalTree::new();
        tree.insert(1, 2, 1, ()).unwrap();
        tree.insert(2, 5, 2, ()).unwrap();
        assert_eq!(keys(&tree.stab(2)), vec![(1, 2, 1), (2, 5, 2)]);
    }

    #[test]
    fn duplicate_geometry_enumerates_by_id() {
        let mut tree = IntervalTree::new();
        tree.insert(4, 6, 9, ()).unwrap();
        tree.insert(4, 6, 2, ()).unwrap();
        tree.insert(4, 6, 5, ()).unwrap();
        let ids: Vec<u64> = tree.stab(5).iter().map(|e| e.id).collect();
        assert_eq!(ids, vec![2, 5, 9]);
    }

    #[test]
    fn randomized_ops_match_list_oracle() {
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut tree = IntervalTree::new();
            let mut oracle = ListOracle::default();
            let mut next_id = 0u64;
            let mut live: Vec<u64> = Vec::new();
            for _ in 0..2000 {
                match rng.random_range(0..10) {
                    0..=4 => {
                        let lo = rng.random_range(-200..200);
                        let hi = lo + rng.random_range(0..80);
                        tree.insert(lo, hi, next_id, ()).unwrap();
                        oracle.insert(lo, hi, next_id);
                        live.push(next_id);
                        next_id += 1;
                    }
                    5..=6 if !live.is_empty() => {
                        let id = live.swap_remove(rng.random_range(0..live.len()));
                        let (lo, hi, ()) = tree.remove(id).unwrap();
                        assert_eq!(oracle.remove(id), Some((lo, hi)));
                    }
                    _ => {
                        let a = rng.random_range(-250..250);
                        let b = a + rng.random_range(0..120);
                        assert_eq!(keys(&tree.overlapping(a, b).unwrap()), oracle.overlapping(a, b));
                    }
                }
                assert_eq!(tree.len(), oracle.items.len());
            }
        }
    }

    fn assert_avl<V>(link: &Link<V>) -> (u16, i64) {
        match link {
            None => (0, i64::MIN),
            Some(node) => {
                let (lh, lmax) = assert_avl(&node.left);
                let (rh, rmax) = assert_avl(&node.right);
                assert!((lh as i32 - rh as i32).abs() <= 1, "unbalanced at id {}", node.id);
                assert_eq!(node.height, 1 + lh.max(rh));
                let max_hi = node.hi.max(lmax).max(rmax);
                assert_eq!(node.max_hi, max_hi, "stale max_hi at id {}", node.id);
                (node.height, max_hi)
            }
        }
    }

    proptest! {
        #[test]
        fn balance_and_augmentation_hold(ops in proptest::collection::vec((0i64..60, 0i64..20, 0u8..3), 1..300)) {
            let mut tree = IntervalTree::new();
            let mut id = 0u64;
            let mut live = Vec::new();
            for (a, len, kind) in ops {
                match kind {
                    0 | 1 => {
                        tree.insert(a, a + len, id, ()).unwrap();
                        live.push(id);
                        id += 1;
                    }
                    _ => {
                        if let Some(&victim) = live.first() {
                            live.remove(0);
                            tree.remove(victim).unwrap();
                        }
                    }
                }
                assert_avl(&tree.root);
            }
            let inorder: Vec<_> = tree.iter().map(|e| (e.lo, e.hi, e.id)).collect();
            let mut sorted = inorder.clone();
            sorted.sort();
            prop_assert_eq!(inorder, sorted);
        }
    }
}
