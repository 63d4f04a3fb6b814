use nalgebra::Point3;

use super::mesh::{Aabb, TriangleMesh};
use super::{closest_point_on_triangle, TriangleFeature};

/// Result of a nearest-point query against a mesh.
#[derive(Debug, Clone, Copy)]
pub struct ClosestHit {
    pub distance: f64,
    pub point: Point3<f64>,
    pub triangle: usize,
    pub feature: TriangleFeature,
}

enum Node {
    Leaf {
        bounds: Aabb,
        start: usize,
        count: usize,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Median-split AABB tree over mesh triangles for nearest-point queries.
pub struct TriangleBvh {
    nodes: Vec<Node>,
    /// Triangle indices, permuted so leaves own contiguous ranges.
    order: Vec<u32>,
    root: usize,
}

const LEAF_SIZE: usize = 4;

impl TriangleBvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        assert!(!mesh.faces.is_empty(), "cannot build BVH over empty mesh");
        let mut order: Vec<u32> = (0..mesh.faces.len() as u32).collect();
        let centroids: Vec<Point3<f64>> = (0..mesh.faces.len())
            .map(|f| {
                let [a, b, c] = mesh.triangle(f);
                Point3::from((a.coords + b.coords + c.coords) / 3.0)
            })
            .collect();
        let mut nodes = Vec::new();
        let n = order.len();
        let root = Self::build_range(mesh, &centroids, &mut order, 0, n, &mut nodes);
        TriangleBvh { nodes, order, root }
    }

    fn tri_bounds(mesh: &TriangleMesh, f: usize) -> Aabb {
        let [a, b, c] = mesh.triangle(f);
        let mut bb = Aabb::empty();
        bb.grow(&a);
        bb.grow(&b);
        bb.grow(&c);
        bb
    }

    fn build_range(
        mesh: &TriangleMesh,
        centroids: &[Point3<f64>],
        order: &mut [u32],
        start: usize,
        count: usize,
        nodes: &mut Vec<Node>,
    ) -> usize {
        let mut bounds = Aabb::empty();
        for &t in &order[start..start + count] {
            bounds = bounds.union(&Self::tri_bounds(mesh, t as usize));
        }
        if count <= LEAF_SIZE {
            nodes.push(Node::Leaf {
                bounds,
                start,
                count,
            });
            return nodes.len() - 1;
        }

        let mut cb = Aabb::empty();
        for &t in &order[start..start + count] {
            cb.grow(&centroids[t as usize]);
        }
        let ext = cb.extents();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = start + count / 2;
        order[start..start + count].select_nth_unstable_by(count / 2, |&a, &b| {
            centroids[a as usize][axis]
                .partial_cmp(&centroids[b as usize][axis])
                .unwrap()
                .then(a.cmp(&b))
        });

        let left = Self::build_range(mesh, centroids, order, start, mid - start, nodes);
        let right = Self::build_range(mesh, centroids, order, mid, start + count - mid, nodes);
        nodes.push(Node::Inner {
            bounds,
            left,
            right,
        });
        nodes.len() - 1
    }

    /// Nearest point on the mesh to `p`, branch-and-bound over the tree.
    pub fn closest_point(&self, mesh: &TriangleMesh, p: &Point3<f64>) -> ClosestHit {
        let mut best = ClosestHit {
            distance: f64::INFINITY,
            point: *p,
            triangle: usize::MAX,
            feature: TriangleFeature::Face,
        };
        let mut best_sq = f64::INFINITY;
        self.visit(mesh, self.root, p, &mut best, &mut best_sq);
        best
    }

    fn visit(
        &self,
        mesh: &TriangleMesh,
        node: usize,
        p: &Point3<f64>,
        best: &mut ClosestHit,
        best_sq: &mut f64,
    ) {
        match &self.nodes[node] {
            Node::Leaf { start, count, .. } => {
                for &t in &self.order[*start..*start + *count] {
                    let [a, b, c] = mesh.triangle(t as usize);
                    let (cp, feat) = closest_point_on_triangle(p, &a, &b, &c);
                    let d2 = (p - cp).norm_squared();
                    if d2 < *best_sq {
                        *best_sq = d2;
                        *best = ClosestHit {
                            distance: d2.sqrt(),
                            point: cp,
                            triangle: t as usize,
                            feature: feat,
                        };
                    }
                }
            }
            Node::Inner { left, right, .. } => {
                let dl = self.nodes[*left].bounds().distance_sq(p);
                let dr = self.nodes[*right].bounds().distance_sq(p);
                let (first, second, d_first, d_second) = if dl <= dr {
                    (*left, *right, dl, dr)
                } else {
                    (*right, *left, dr, dl)
                };
                if d_first < *best_sq {
                    self.visit(mesh, first, p, best, best_sq);
                }
                if d_second < *best_sq {
                    self.visit(mesh, second, p, best, best_sq);
                }
            }
        }
    }

    /// Unsigned distance from `p` to the mesh surface.
    pub fn distance(&self, mesh: &TriangleMesh, p: &Point3<f64>) -> f64 {
        self.closest_point(mesh, p).distance
    }
}
