//! Axis-aligned bounding volume hierarchy over a [`TriangleMesh`].

use std::sync::Arc;

use super::mesh::TriangleMesh;
use super::raycast::{closer, finish_hit, intersect_triangle, RawHit, SurfaceHit};
use super::vector::{Point3, Ray, Vec3};

const LEAF_SIZE: usize = 4;

/// Relative padding applied to node boxes so the slab test never rejects a ray that the
/// triangle test would accept.
const BOX_PAD: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Point3,
    hi: Point3,
}

impl Aabb {
    fn empty() -> Self {
        let inf = f64::INFINITY;
        Aabb { lo: Vec3::new(inf, inf, inf), hi: Vec3::new(-inf, -inf, -inf) }
    }

    fn grow(&mut self, p: Point3) {
        self.lo = self.lo.min(p);
        self.hi = self.hi.max(p);
    }

    fn padded(self) -> Self {
        let extent = (self.hi - self.lo).to_array().into_iter().fold(0.0f64, f64::max);
        let mag = self.lo.to_array().into_iter().chain(self.hi.to_array()).fold(0.0f64, |m, c| m.max(c.abs()));
        let pad = BOX_PAD * (extent + mag + 1.0);
        let p = Vec3::new(pad, pad, pad);
        Aabb { lo: self.lo - p, hi: self.hi + p }
    }

    /// Entry distance of the ray into the box, if it enters at all.
    #[inline]
    fn entry(&self, ray: &Ray, inv_dir: Vec3) -> Option<f64> {
        let o = ray.origin;
        let d = ray.direction.get();
        let mut t0 = 0.0f64;
        let mut t1 = f64::INFINITY;
        for axis in 0..3 {
            let (oa, da, lo, hi) = (o.axis(axis), d.axis(axis), self.lo.axis(axis), self.hi.axis(axis));
            if da == 0.0 {
                if oa < lo || oa > hi {
                    return None;
                }
                continue;
            }
            let inv = inv_dir.axis(axis);
            let (mut a, mut b) = ((lo - oa) * inv, (hi - oa) * inv);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

/// Immutable acceleration index. Built once per mesh and shared read-only.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let centroids: Vec<Point3> = (0..mesh.triangle_count())
            .map(|i| {
                let [a, b, c] = mesh.corners(i);
                (a + b + c) / 3.0
            })
            .collect();
        let mut order: Vec<u32> = (0..mesh.triangle_count() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * order.len() / LEAF_SIZE + 1);
        build_node(mesh, &centroids, &mut order, 0, &mut nodes);
        Bvh { nodes, order }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nearest hit; identical to [`super::ray_cast_exhaustive`] on the indexed mesh.
    pub fn ray_cast(&self, mesh: &TriangleMesh, ray: &Ray) -> Option<SurfaceHit> {
        let d = ray.direction.get();
        let inv_dir = Vec3::new(1.0 / d.x, 1.0 / d.y, 1.0 / d.z);
        let mut best: Option<(RawHit, u32)> = None;
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        if let Some(t) = self.nodes[0].bounds.entry(ray, inv_dir) {
            stack.push((0, t));
        }
        while let Some((idx, entry)) = stack.pop() {
            if let Some((b, _)) = best {
                if entry > b.t {
                    continue;
                }
            }
            let node = &self.nodes[idx as usize];
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &id in &self.order[start as usize..(start + count) as usize] {
                        let [a, b, c] = mesh.corners(id as usize);
                        if let Some(raw) = intersect_triangle(ray, a, b, c) {
                            if closer(raw.t, id, best) {
                                best = Some((raw, id));
                            }
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let l = self.nodes[left as usize].bounds.entry(ray, inv_dir);
                    let r = self.nodes[right as usize].bounds.entry(ray, inv_dir);
                    // Push the farther child first so the nearer one is popped next.
                    match (l, r) {
                        (Some(tl), Some(tr)) if tl <= tr => {
                            stack.push((right, tr));
                            stack.push((left, tl));
                        }
                        (Some(tl), Some(tr)) => {
                            stack.push((left, tl));
                            stack.push((right, tr));
                        }
                        (Some(tl), None) => stack.push((left, tl)),
                        (None, Some(tr)) => stack.push((right, tr)),
                        (None, None) => {}
                    }
                }
            }
        }
        best.map(|(raw, id)| finish_hit(mesh, ray, raw, id))
    }
}

fn build_node(
    mesh: &TriangleMesh,
    centroids: &[Point3],
    order: &mut [u32],
    start: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for &id in order.iter() {
        for p in mesh.corners(id as usize) {
            bounds.grow(p);
        }
        cbounds.grow(centroids[id as usize]);
    }
    let bounds = bounds.padded();
    let me = nodes.len() as u32;
    let count = order.len();
    let extent = cbounds.hi - cbounds.lo;
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    if count <= LEAF_SIZE || extent.axis(axis) <= 0.0 {
        nodes.push(Node { bounds, kind: NodeKind::Leaf { start: start as u32, count: count as u32 } });
        return me;
    }
    nodes.push(Node { bounds, kind: NodeKind::Leaf { start: 0, count: 0 } });
    let mid = count / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize]
            .axis(axis)
            .total_cmp(&centroids[b as usize].axis(axis))
            .then(a.cmp(&b))
    });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build_node(mesh, centroids, lo, start, nodes);
    let right = build_node(mesh, centroids, hi, start + mid, nodes);
    nodes[me as usize].kind = NodeKind::Inner { left, right };
    me
}

/// A mesh bundled with its BVH. Cheap to clone; safe to share across sessions.
#[derive(Debug, Clone)]
pub struct IndexedMesh {
    inner: Arc<(TriangleMesh, Bvh)>,
}

impl IndexedMesh {
    pub fn new(mesh: TriangleMesh) -> Self {
        let bvh = Bvh::build(&mesh);
        Self { inner: Arc::new((mesh, bvh)) }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.inner.0
    }

    pub fn bvh(&self) -> &Bvh {
        &self.inner.1
    }

    pub fn ray_cast(&self, ray: &Ray) -> Option<SurfaceHit> {
        self.inner.1.ray_cast(&self.inner.0, ray)
    }
}
