//! Ordered tree edit distance (Zhang–Shasha) with unit costs, computed
//! after canonical child ordering so part-labelled kinematic trees compare
//! deterministically.

use crate::topology::KinematicTree;

/// A rooted, labelled ordered tree prepared for the edit-distance DP.
#[derive(Debug, Clone)]
pub struct LabeledTree {
    /// Post-order node labels.
    labels: Vec<u64>,
    /// Leftmost leaf descendant per post-order index.
    leftmost: Vec<usize>,
    /// Key roots, ascending.
    key_roots: Vec<usize>,
}

/// Recursive labelled tree; the edit-distance entry points take these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: u64,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn new(label: u64) -> Self {
        TreeNode {
            label,
            children: Vec::new(),
        }
    }

    pub fn with_children(label: u64, children: Vec<TreeNode>) -> Self {
        TreeNode { label, children }
    }

    /// Sort children recursively by label: the canonical ordering.
    pub fn canonicalize(&mut self) {
        for c in &mut self.children {
            c.canonicalize();
        }
        self.children.sort_by_key(|c| c.label);
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TreeNode::size).sum::<usize>()
    }

    fn post_order<'a>(&'a self, out: &mut Vec<&'a TreeNode>) {
        for c in &self.children {
            c.post_order(out);
        }
        out.push(self);
    }
}

/// Build the canonical [`TreeNode`] of a kinematic tree, labelling nodes by
/// part id.
pub fn tree_node_from_kinematic(tree: &KinematicTree) -> TreeNode {
    fn build(tree: &KinematicTree, node: usize) -> TreeNode {
        let mut children: Vec<usize> = tree.children(node);
        children.sort_unstable();
        TreeNode {
            label: node as u64,
            children: children.into_iter().map(|c| build(tree, c)).collect(),
        }
    }
    let mut root = build(tree, tree.root);
    root.canonicalize();
    root
}

impl LabeledTree {
    pub fn build(root: &TreeNode) -> Self {
        let mut order = Vec::new();
        root.post_order(&mut order);
        let n = order.len();

        let mut subtree_size = vec![0usize; n];
        for (i, node) in order.iter().enumerate() {
            subtree_size[i] = node.size();
        }
        let leftmost: Vec<usize> = (0..n).map(|i| i + 1 - subtree_size[i]).collect();

        // Key roots: the highest post-order node of each distinct
        // leftmost-leaf value.
        let mut key_roots = Vec::new();
        for i in 0..n {
            if (i + 1..n).all(|j| leftmost[j] != leftmost[i]) {
                key_roots.push(i);
            }
        }

        LabeledTree {
            labels: order.iter().map(|t| t.label).collect(),
            leftmost,
            key_roots,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

/// Zhang–Shasha ordered tree edit distance with unit insert/delete/relabel
/// costs.
pub fn tree_edit_distance_nodes(a: &TreeNode, b: &TreeNode) -> u64 {
    let ta = LabeledTree::build(a);
    let tb = LabeledTree::build(b);
    let (na, nb) = (ta.len(), tb.len());
    let mut treedist = vec![vec![0u64; nb]; na];

    for &i in &ta.key_roots {
        for &j in &tb.key_roots {
            forest_distance(&ta, &tb, i, j, &mut treedist);
        }
    }
    treedist[na - 1][nb - 1]
}

fn forest_distance(
    ta: &LabeledTree,
    tb: &LabeledTree,
    i: usize,
    j: usize,
    treedist: &mut [Vec<u64>],
) {
    let li = ta.leftmost[i];
    let lj = tb.leftmost[j];
    let m = i - li + 2;
    let n = j - lj + 2;
    let mut fd = vec![vec![0u64; n]; m];
    for x in 1..m {
        fd[x][0] = fd[x - 1][0] + 1;
    }
    for y in 1..n {
        fd[0][y] = fd[0][y - 1] + 1;
    }
    for x in 1..m {
        for y in 1..n {
            let node_a = x + li - 1;
            let node_b = y + lj - 1;
            if ta.leftmost[node_a] == li && tb.leftmost[node_b] == lj {
                let relabel = u64::from(ta.labels[node_a] != tb.labels[node_b]);
                fd[x][y] = (fd[x - 1][y] + 1)
                    .min(fd[x][y - 1] + 1)
                    .min(fd[x - 1][y - 1] + relabel);
                treedist[node_a][node_b] = fd[x][y];
            } else {
                fd[x][y] = (fd[x - 1][y] + 1).min(fd[x][y - 1] + 1).min(
                    fd[ta.leftmost[node_a] - li][tb.leftmost[node_b] - lj]
                        + treedist[node_a][node_b],
                );
            }
        }
    }
}

/// Edit distance between two kinematic trees after canonical ordering.
pub fn tree_edit_distance(pred: &KinematicTree, gt: &KinematicTree) -> u64 {
    tree_edit_distance_nodes(
        &tree_node_from_kinematic(pred),
        &tree_node_from_kinematic(gt),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point3;

    fn leaf(l: u64) -> TreeNode {
        TreeNode::new(l)
    }

    /// Exponential brute-force ordered forest edit distance: the oracle.
    pub(crate) fn brute_force_ted(a: &TreeNode, b: &TreeNode) -> u64 {
        fn forest_size(f: &[TreeNode]) -> u64 {
            f.iter().map(|t| t.size() as u64).sum()
        }
        fn dist(fa: &[TreeNode], fb: &[TreeNode]) -> u64 {
            if fa.is_empty() {
                return forest_size(fb);
            }
            if fb.is_empty() {
                return forest_size(fa);
            }
            // Work on the rightmost roots.
            let (a_rest, a_last) = fa.split_at(fa.len() - 1);
            let (b_rest, b_last) = fb.split_at(fb.len() - 1);
            let a_last = &a_last[0];
            let b_last = &b_last[0];

            // Delete the rightmost root of A: its children splice in.
            let mut fa_del = a_rest.to_vec();
            fa_del.extend(a_last.children.clone());
            let d1 = dist(&fa_del, fb) + 1;

            // Insert (delete from B symmetrically).
            let mut fb_del = b_rest.to_vec();
            fb_del.extend(b_last.children.clone());
            let d2 = dist(fa, &fb_del) + 1;

            // Match the two rightmost roots.
            let relabel = u64::from(a_last.label != b_last.label);
            let d3 = dist(a_rest, b_rest) + dist(&a_last.children, &b_last.children) + relabel;

            d1.min(d2).min(d3)
        }
        dist(std::slice::from_ref(a), std::slice::from_ref(b))
    }

    #[test]
    fn identical_trees_zero() {
        let t =
            TreeNode::with_children(0, vec![leaf(1), TreeNode::with_children(2, vec![leaf(3)])]);
        assert_eq!(tree_edit_distance_nodes(&t, &t), 0);
    }

    #[test]
    fn one_extra_leaf_costs_one() {
        let a = TreeNode::with_children(0, vec![leaf(1), leaf(2)]);
        let b = TreeNode::with_children(0, vec![leaf(1), leaf(2), leaf(3)]);
        assert_eq!(tree_edit_distance_nodes(&a, &b), 1);
        assert_eq!(tree_edit_distance_nodes(&b, &a), 1);
    }

    #[test]
    fn relabel_costs_one() {
        let a = leaf(0);
        let b = leaf(5);
        assert_eq!(tree_edit_distance_nodes(&a, &b), 1);
    }

    #[test]
    fn matches_brute_force_on_random_small_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(314);
        let random_tree = |rng: &mut rand_chacha::ChaCha8Rng| -> TreeNode {
            let n = rng.random_range(1..=5usize);
            let mut nodes: Vec<TreeNode> = (0..n)
                .map(|_| TreeNode::new(rng.random_range(0..4u64)))
                .collect();
            while nodes.len() > 1 {
                let child = nodes.pop().unwrap();
                let k = rng.random_range(0..nodes.len());
                nodes[k].children.push(child);
            }
            let mut root = nodes.pop().unwrap();
            root.canonicalize();
            root
        };
        for _ in 0..100 {
            let a = random_tree(&mut rng);
            let b = random_tree(&mut rng);
            assert_eq!(
                tree_edit_distance_nodes(&a, &b),
                brute_force_ted(&a, &b),
                "a={a:?} b={b:?}"
            );
        }
    }

    #[test]
    fn kinematic_tree_distance_counts_reparenting() {
        let centroids: Vec<Point3<f64>> = (0..4).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let gt = KinematicTree::from_pairs(0, 4, &[(0, 1), (0, 2), (2, 3)], &centroids);
        let same = KinematicTree::from_pairs(0, 4, &[(0, 1), (0, 2), (2, 3)], &centroids);
        assert_eq!(tree_edit_distance(&same, &gt), 0);

        let reparented = KinematicTree::from_pairs(0, 4, &[(0, 1), (0, 2), (1, 3)], &centroids);
        assert!(tree_edit_distance(&reparented, &gt) > 0);
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let random_tree = |rng: &mut rand_chacha::ChaCha8Rng| -> TreeNode {
            let n = rng.random_range(1..=5usize);
            let mut nodes: Vec<TreeNode> = (0..n).map(|i| TreeNode::new((i as u64) % 3)).collect();
            while nodes.len() > 1 {
                let child = nodes.pop().unwrap();
                let k = rng.random_range(0..nodes.len());
                nodes[k].children.push(child);
            }
            let mut root = nodes.pop().unwrap();
            root.canonicalize();
            root
        };
        for _ in 0..40 {
            let a = random_tree(&mut rng);
            let b = random_tree(&mut rng);
            let c = random_tree(&mut rng);
            let dab = tree_edit_distance_nodes(&a, &b);
            let dba = tree_edit_distance_nodes(&b, &a);
            let dac = tree_edit_distance_nodes(&a, &c);
            let dcb = tree_edit_distance_nodes(&c, &b);
            assert_eq!(tree_edit_distance_nodes(&a, &a), 0);
            assert_eq!(dab, dba);
            assert!(dab <= dac + dcb, "triangle inequality violated");
        }
    }
}
