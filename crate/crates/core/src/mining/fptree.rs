//! Arena-backed FP-tree.

use std::collections::HashMap;

use crate::corpus::ItemId;

const ROOT: usize = 0;

#[derive(Debug, Clone)]
struct Node {
    item: Option<ItemId>,
    count: usize,
    parent: Option<usize>,
    children: Vec<(ItemId, usize)>,
    /// Next node in the header chain for the same item.
    next: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct HeaderEntry {
    pub item: ItemId,
    /// Support count of `item` among the inserted paths.
    pub count: usize,
    head: Option<usize>,
    tail: Option<usize>,
}

/// Prefix tree over frequency-ordered transactions.
///
/// Items are ordered by descending support, ties by ascending id. Only items
/// meeting the tree's `min_count` are stored.
#[derive(Debug, Clone)]
pub struct FpTree {
    nodes: Vec<Node>,
    header: Vec<HeaderEntry>,
    rank: HashMap<ItemId, usize>,
}

impl FpTree {
    /// Builds a tree from weighted paths, discarding items below `min_count`.
    pub fn build<'a, I>(paths: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = (&'a [ItemId], usize)> + Clone,
    {
        let mut support: HashMap<ItemId, usize> = HashMap::new();
        for (path, weight) in paths.clone() {
            for &item in path {
                *support.entry(item).or_default() += weight;
            }
        }
        let mut frequent: Vec<(ItemId, usize)> = support.into_iter().filter(|&(_, count)| count >= min_count).collect();
        frequent.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

        let mut tree = FpTree::with_order(frequent.iter().map(|&(item, _)| item));
        let mut buf = Vec::new();
        for (path, weight) in paths {
            buf.clear();
            buf.extend(path.iter().copied().filter(|item| tree.rank.contains_key(item)));
            tree.insert(&mut buf, weight);
        }
        debug_assert!(tree.validate().is_ok(), "{:?}", tree.validate());
        tree
    }

    /// An empty tree accepting exactly `order`, highest rank first.
    pub fn with_order(order: impl IntoIterator<Item = ItemId>) -> Self {
        let header: Vec<HeaderEntry> =
            order.into_iter().map(|item| HeaderEntry { item, count: 0, head: None, tail: None }).collect();
        let rank = header.iter().enumerate().map(|(rank, e)| (e.item, rank)).collect();
        FpTree {
            nodes: vec![Node { item: None, count: 0, parent: None, children: Vec::new(), next: None }],
            header,
            rank,
        }
    }

    /// Inserts one path. Items outside the tree's order panic; the slice is
    /// reordered in place.
    pub fn insert(&mut self, path: &mut [ItemId], weight: usize) {
        if weight == 0 || path.is_empty() {
            return;
        }
        path.sort_unstable_by_key(|item| self.rank[item]);
        self.nodes[ROOT].count += weight;
        let mut cursor = ROOT;
        for &item in path.iter() {
            let existing =
                self.nodes[cursor].children.iter().find(|(child_item, _)| *child_item == item).map(|&(_, idx)| idx);
            cursor = match existing {
                Some(idx) => {
                    self.nodes[idx].count += weight;
                    idx
                }
                None => self.add_node(cursor, item, weight),
            };
            self.header[self.rank[&item]].count += weight;
        }
    }

    fn add_node(&mut self, parent: usize, item: ItemId, count: usize) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node { item: Some(item), count, parent: Some(parent), children: Vec::new(), next: None });
        self.nodes[parent].children.push((item, idx));
        let entry = &mut self.header[self.rank[&item]];
        match entry.tail {
            Some(tail) => self.nodes[tail].next = Some(idx),
            None => entry.head = Some(idx),
        }
        entry.tail = Some(idx);
        idx
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Header entries from most to least frequent.
    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    fn chain(&self, entry: &HeaderEntry) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(entry.head, move |&idx| self.nodes[idx].next)
    }

    /// Prefix paths (root side first) and weights leading to each node of `entry`.
    pub fn conditional_base(&self, entry: &HeaderEntry) -> Vec<(Vec<ItemId>, usize)> {
        self.chain(entry)
            .filter_map(|idx| {
                let mut prefix = Vec::new();
                let mut cursor = self.nodes[idx].parent;
                while let Some(p) = cursor {
                    if let Some(item) = self.nodes[p].item {
                        prefix.push(item);
                    }
                    cursor = self.nodes[p].parent;
                }
                if prefix.is_empty() {
                    return None;
                }
                prefix.reverse();
                Some((prefix, self.nodes[idx].count))
            })
            .collect()
    }

    /// The `(item, count)` chain when the tree is a single path from root.
    pub fn single_path(&self) -> Option<Vec<(ItemId, usize)>> {
        let mut path = Vec::new();
        let mut cursor = ROOT;
        loop {
            match self.nodes[cursor].children.as_slice() {
                [] => return Some(path),
                [(item, idx)] => {
                    path.push((*item, self.nodes[*idx].count));
                    cursor = *idx;
                }
                _ => return None,
            }
        }
    }

    /// Checks the structural invariants, reporting the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen_in_chains = vec![0usize; self.nodes.len()];
        for (rank, entry) in self.header.iter().enumerate() {
            if self.rank.get(&entry.item) != Some(&rank) {
                return Err(format!("header rank mismatch for {:?}", entry.item));
            }
            let mut total = 0;
            for idx in self.chain(entry) {
                if self.nodes[idx].item != Some(entry.item) {
                    return Err(format!("chain of {:?} reaches node {idx} holding another item", entry.item));
                }
                seen_in_chains[idx] += 1;
                total += self.nodes[idx].count;
            }
            if total != entry.count {
                return Err(format!("chain counts of {:?} sum to {total}, header says {}", entry.item, entry.count));
            }
        }
        for (idx, node) in self.nodes.iter().enumerate().skip(1) {
            if seen_in_chains[idx] != 1 {
                return Err(format!("node {idx} appears {} times in header chains", seen_in_chains[idx]));
            }
            let parent = node.parent.ok_or_else(|| format!("node {idx} has no parent"))?;
            let parent_node = &self.nodes[parent];
            if node.count > parent_node.count {
                return Err(format!("node {idx} count exceeds its parent"));
            }
            if let (Some(item), Some(parent_item)) = (node.item, parent_node.item) {
                if self.rank[&parent_item] >= self.rank[&item] {
                    return Err(format!("path order violated at node {idx}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ItemId> {
        v.iter().map(|&i| ItemId(i)).collect()
    }

    #[test]
    fn invariants_hold_after_every_insertion() {
        let transactions =
            [ids(&[0, 1, 2]), ids(&[0, 1]), ids(&[0, 2]), ids(&[1, 2]), ids(&[0]), ids(&[3, 2, 0]), ids(&[4, 3])];
        let mut support = HashMap::new();
        for t in &transactions {
            for &i in t {
                *support.entry(i).or_insert(0usize) += 1;
            }
        }
        let mut order: Vec<_> = support.into_iter().collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut tree = FpTree::with_order(order.iter().map(|&(i, _)| i));
        for t in &transactions {
            tree.insert(&mut t.clone(), 1);
            tree.validate().unwrap();
        }
        assert_eq!(tree.header()[0].item, ItemId(0));
        assert_eq!(tree.header()[0].count, 5);
    }

    #[test]
    fn build_filters_infrequent_items() {
        let transactions = [ids(&[0, 1]), ids(&[0, 2]), ids(&[0])];
        let tree = FpTree::build(transactions.iter().map(|t| (t.as_slice(), 1)), 2);
        assert_eq!(tree.header().len(), 1);
        assert_eq!(tree.single_path(), Some(vec![(ItemId(0), 3)]));
    }

    #[test]
    fn conditional_base_collects_prefixes() {
        let transactions = [ids(&[0, 1, 2]), ids(&[0, 2]), ids(&[1, 2])];
        let tree = FpTree::build(transactions.iter().map(|t| (t.as_slice(), 1)), 1);
        // Order is 2 (count 3), then 0 and 1 (count 2 each).
        let last = tree.header().last().unwrap();
        assert_eq!(last.item, ItemId(1));
        let mut base = tree.conditional_base(last);
        base.sort();
        assert_eq!(base, vec![(ids(&[2]), 1), (ids(&[2, 0]), 1)]);
        assert!(tree.single_path().is_none());
    }
}
