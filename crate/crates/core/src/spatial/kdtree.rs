use std::collections::BinaryHeap;

use super::{Candidate, Point};

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static 2-d tree over a borrowed point slice.
///
/// Queries are exact: candidates are ordered by `(squared distance, index)`
/// and a subtree is skipped only when its bounding half-plane is strictly
/// farther than the current k-th candidate.
#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    points: &'a [Point],
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [Point]) -> Self {
        let mut tree = KdTree {
            points,
            order: (0..points.len()).collect(),
            nodes: Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let pts = self.points;
        let slice = &mut self.order[start..end];
        let spread = |dim: usize| {
            let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let c = pts[i].coord(dim);
                (lo.min(c), hi.max(c))
            });
            hi - lo
        };
        let dim = if spread(0) >= spread(1) { 0 } else { 1 };
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| pts[a].coord(dim).total_cmp(&pts[b].coord(dim)));
        let value = pts[slice[mid]].coord(dim);

        self.nodes.push(Node::Leaf { start, end }); // placeholder
        let left = self.build(start, start + mid);
        let right = self.build(start + mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    /// Fills `out` with the `out.len()` nearest neighbors of point `query`
    /// (excluding itself), closest first.
    pub fn knn_into(&self, query: usize, out: &mut [usize]) {
        let k = out.len();
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        if k > 0 {
            self.search(0, query, k, &mut heap);
        }
        let sorted = heap.into_sorted_vec();
        for (slot, c) in out.iter_mut().zip(sorted) {
            *slot = c.index;
        }
    }

    pub fn knn(&self, query: usize, k: usize) -> Vec<usize> {
        let mut out = vec![0; k.min(self.points.len().saturating_sub(1))];
        self.knn_into(query, &mut out);
        out
    }

    fn search(&self, node: usize, query: usize, k: usize, heap: &mut BinaryHeap<Candidate>) {
        let q = self.points[query];
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == query {
                        continue;
                    }
                    let cand = Candidate {
                        d2: q.dist2(&self.points[j]),
                        index: j,
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q.coord(dim) - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, k, heap);
                let plane = diff * diff;
                if heap.len() < k || plane <= heap.peek().expect("heap is full").d2 {
                    self.search(far, query, k, heap);
                }
            }
        }
    }
}
