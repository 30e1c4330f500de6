//! The orthogonal group O₂(𝔽_p) and the isometries `x ↦ Mx + z` of 𝔽_p².

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::field::{FieldElement, FieldParams, Point};

/// A 2×2 matrix over 𝔽_p stored row-major. Values built by
/// [`OrthogonalGroup`] satisfy `MᵀM = I`; arbitrary candidates can be checked
/// with [`is_orthogonal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrthMatrix {
    pub m11: FieldElement,
    pub m12: FieldElement,
    pub m21: FieldElement,
    pub m22: FieldElement,
}

impl OrthMatrix {
    pub fn identity() -> Self {
        OrthMatrix {
            m11: FieldElement::ONE,
            m12: FieldElement::ZERO,
            m21: FieldElement::ZERO,
            m22: FieldElement::ONE,
        }
    }

    pub fn from_i64(fp: FieldParams, m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        OrthMatrix {
            m11: fp.elem(m11),
            m12: fp.elem(m12),
            m21: fp.elem(m21),
            m22: fp.elem(m22),
        }
    }

    #[inline]
    pub fn apply(&self, fp: FieldParams, v: Point) -> Point {
        let p = fp.modulus() as u64;
        let (x, y) = (v.x.value() as u64, v.y.value() as u64);
        let nx = (self.m11.value() as u64 * x + self.m12.value() as u64 * y) % p;
        let ny = (self.m21.value() as u64 * x + self.m22.value() as u64 * y) % p;
        fp.point(nx as i64, ny as i64)
    }

    pub fn mul(&self, fp: FieldParams, rhs: &OrthMatrix) -> OrthMatrix {
        let dot = |a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement| {
            fp.add(fp.mul(a, b), fp.mul(c, d))
        };
        OrthMatrix {
            m11: dot(self.m11, rhs.m11, self.m12, rhs.m21),
            m12: dot(self.m11, rhs.m12, self.m12, rhs.m22),
            m21: dot(self.m21, rhs.m11, self.m22, rhs.m21),
            m22: dot(self.m21, rhs.m12, self.m22, rhs.m22),
        }
    }

    pub fn transpose(&self) -> OrthMatrix {
        OrthMatrix {
            m11: self.m11,
            m12: self.m21,
            m21: self.m12,
            m22: self.m22,
        }
    }

    pub fn det(&self, fp: FieldParams) -> FieldElement {
        fp.sub(fp.mul(self.m11, self.m22), fp.mul(self.m12, self.m21))
    }

    /// Determinant as a sign; `+1` for rotations and `-1` for reflections.
    pub fn det_sign(&self, fp: FieldParams) -> i8 {
        let d = self.det(fp);
        if d.value() == 1 {
            1
        } else if d == fp.elem(-1) {
            -1
        } else {
            0
        }
    }
}

impl fmt::Display for OrthMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.m11, self.m12, self.m21, self.m22)
    }
}

/// `true` iff `MᵀM = I` over 𝔽_p.
pub fn is_orthogonal(m: &OrthMatrix, fp: FieldParams) -> bool {
    let prod = m.transpose().mul(fp, m);
    prod.m11.value() == 1 && prod.m12.is_zero() && prod.m21.is_zero() && prod.m22.value() == 1
}

/// Every element of O₂(𝔽_p): rotations `(a,−b;b,a)` followed by reflections
/// `(a,b;b,−a)`, both over the `p − χ(−1)` solutions of `a² + b² = 1`,
/// with `a` increasing and then `b` increasing within each half.
pub fn enumerate_orthogonal(fp: FieldParams) -> Vec<OrthMatrix> {
    let p = fp.modulus() as usize;
    let mut roots: Vec<Vec<FieldElement>> = vec![Vec::new(); p];
    for b in fp.elements() {
        roots[fp.mul(b, b).value() as usize].push(b);
    }
    let one = fp.elem(1);
    let mut circle = Vec::new();
    for a in fp.elements() {
        let t = fp.sub(one, fp.mul(a, a));
        for &b in &roots[t.value() as usize] {
            circle.push((a, b));
        }
    }
    let rotations = circle.iter().map(|&(a, b)| OrthMatrix {
        m11: a,
        m12: fp.neg(b),
        m21: b,
        m22: a,
    });
    let reflections = circle.iter().map(|&(a, b)| OrthMatrix {
        m11: a,
        m12: b,
        m21: b,
        m22: fp.neg(a),
    });
    rotations.chain(reflections).collect()
}

/// O₂(𝔽_p) materialized once per modulus.
#[derive(Debug)]
pub struct OrthogonalGroup {
    fp: FieldParams,
    elements: Vec<OrthMatrix>,
}

static GROUP_CACHE: OnceLock<Mutex<HashMap<u32, Arc<OrthogonalGroup>>>> = OnceLock::new();

impl OrthogonalGroup {
    pub fn new(fp: FieldParams) -> Self {
        OrthogonalGroup {
            fp,
            elements: enumerate_orthogonal(fp),
        }
    }

    /// Shared, lazily built group for `fp`.
    pub fn cached(fp: FieldParams) -> Arc<OrthogonalGroup> {
        let cache = GROUP_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(fp.modulus())
            .or_insert_with(|| Arc::new(OrthogonalGroup::new(fp)))
            .clone()
    }

    pub fn params(&self) -> FieldParams {
        self.fp
    }

    pub fn elements(&self) -> &[OrthMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Expected order `2(p − χ(−1))`.
    pub fn expected_order(fp: FieldParams) -> usize {
        2 * (fp.modulus() as i64 - fp.chi_minus_one() as i64) as usize
    }

    pub fn contains(&self, m: &OrthMatrix) -> bool {
        self.elements.contains(m)
    }

    /// The special orthogonal subgroup (det = +1).
    pub fn rotations(&self) -> impl Iterator<Item = &OrthMatrix> {
        let fp = self.fp;
        self.elements.iter().filter(move |m| m.det_sign(fp) == 1)
    }
}

/// `x ↦ rot·x + trans`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub rot: OrthMatrix,
    pub trans: Point,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            rot: OrthMatrix::identity(),
            trans: Point::ORIGIN,
        }
    }

    pub fn translation(trans: Point) -> Self {
        Isometry {
            rot: OrthMatrix::identity(),
            trans,
        }
    }

    #[inline]
    pub fn apply(&self, fp: FieldParams, x: Point) -> Point {
        fp.point_add(self.rot.apply(fp, x), self.trans)
    }

    /// `self ∘ h`: first `h`, then `self`.
    pub fn compose(&self, fp: FieldParams, h: &Isometry) -> Isometry {
        Isometry {
            rot: self.rot.mul(fp, &h.rot),
            trans: fp.point_add(self.rot.apply(fp, h.trans), self.trans),
        }
    }

    /// Inverse, using `M⁻¹ = Mᵀ`; only meaningful when `rot` is orthogonal.
    pub fn inverse(&self, fp: FieldParams) -> Isometry {
        let rt = self.rot.transpose();
        let t = rt.apply(fp, self.trans);
        Isometry {
            rot: rt,
            trans: fp.point_sub(Point::ORIGIN, t),
        }
    }
}

pub fn apply(g: &Isometry, x: Point, fp: FieldParams) -> Point {
    g.apply(fp, x)
}

pub fn compose(g: &Isometry, h: &Isometry, fp: FieldParams) -> Isometry {
    g.compose(fp, h)
}

/// Every isometry sending `src[i]` to `dst[i]` for all `i`. Sequences of
/// different lengths (or empty ones) yield no isometries.
pub fn solve_isometry(src: &[Point], dst: &[Point], group: &OrthogonalGroup) -> Vec<Isometry> {
    if src.len() != dst.len() || src.is_empty() {
        return Vec::new();
    }
    let fp = group.params();
    let rel_src: Vec<Point> = src.iter().map(|&v| fp.point_sub(v, src[0])).collect();
    let rel_dst: Vec<Point> = dst.iter().map(|&v| fp.point_sub(v, dst[0])).collect();
    group
        .elements()
        .iter()
        .filter(|m| {
            rel_src
                .iter()
                .zip(&rel_dst)
                .skip(1)
                .all(|(&s, &d)| m.apply(fp, s) == d)
        })
        .map(|m| Isometry {
            rot: *m,
            trans: fp.point_sub(dst[0], m.apply(fp, src[0])),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn brute_force_orthogonal(f: FieldParams) -> Vec<OrthMatrix> {
        let p = f.modulus() as i64;
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        // MᵀM = I written out entrywise
                        let m = OrthMatrix::from_i64(f, a, b, c, d);
                        let e11 = (a * a + c * c) % p;
                        let e12 = (a * b + c * d) % p;
                        let e22 = (b * b + d * d) % p;
                        if e11 == 1 && e12 == 0 && e22 == 1 {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn group_orders_small_primes() {
        assert_eq!(enumerate_orthogonal(fp(3)).len(), 8);
        assert_eq!(enumerate_orthogonal(fp(5)).len(), 8);
        for p in [3u64, 5, 7, 11, 13, 17] {
            let f = fp(p);
            let g = enumerate_orthogonal(f);
            assert_eq!(g.len(), OrthogonalGroup::expected_order(f));
            let mut dedup = g.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), g.len());
            assert!(g.contains(&OrthMatrix::identity()));
        }
    }

    #[test]
    fn matches_brute_force() {
        for p in [3u64, 5, 7] {
            let f = fp(p);
            let mut g = enumerate_orthogonal(f);
            g.sort();
            assert_eq!(g, brute_force_orthogonal(f), "p={p}");
        }
    }

    #[test]
    fn is_orthogonal_examples() {
        let f5 = fp(5);
        assert!(is_orthogonal(&OrthMatrix::identity(), f5));
        assert!(!is_orthogonal(&OrthMatrix::from_i64(f5, 1, 0, 0, 2), f5));
        for p in [3u64, 5, 7, 11, 101] {
            let f = fp(p);
            assert!(is_orthogonal(&OrthMatrix::from_i64(f, 0, 1, 1, 0), f));
        }
    }

    #[test]
    fn closure() {
        for p in [3u64, 5, 7, 11, 13] {
            let group = OrthogonalGroup::new(fp(p));
            let f = group.params();
            for a in group.elements() {
                assert!(is_orthogonal(a, f));
                for b in group.elements() {
                    assert!(group.contains(&a.mul(f, b)));
                }
            }
        }
    }

    #[test]
    fn determinants_split_evenly() {
        for p in [3u64, 5, 7, 13] {
            let group = OrthogonalGroup::new(fp(p));
            let f = group.params();
            let rot = group.rotations().count();
            assert_eq!(rot * 2, group.len());
            assert!(group.elements().iter().all(|m| m.det_sign(f) != 0));
        }
    }

    #[test]
    fn isometries_preserve_distance() {
        for p in [3u64, 5, 7] {
            let f = fp(p);
            let group = OrthogonalGroup::new(f);
            let pts: Vec<Point> = f.plane().collect();
            for m in group.elements() {
                for z in [Point::ORIGIN, f.point(1, 2), f.point(p as i64 - 1, 3)] {
                    let g = Isometry { rot: *m, trans: z };
                    for &a in &pts {
                        for &b in &pts {
                            assert_eq!(f.distance(g.apply(f, a), g.apply(f, b)), f.distance(a, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn apply_examples() {
        let f5 = fp(5);
        let f7 = fp(7);
        let x = f7.point(3, 4);
        assert_eq!(apply(&Isometry::identity(), x, f7), x);
        let t = Isometry::translation(f5.point(2, 3));
        assert_eq!(apply(&t, Point::ORIGIN, f5), f5.point(2, 3));
        let swap = Isometry {
            rot: OrthMatrix::from_i64(f7, 0, 1, 1, 0),
            trans: Point::ORIGIN,
        };
        assert_eq!(apply(&swap, f7.point(1, 2), f7), f7.point(2, 1));
    }

    #[test]
    fn compose_examples_and_law() {
        let f = fp(7);
        let group = OrthogonalGroup::new(f);
        let t10 = Isometry::translation(f.point(1, 0));
        let t01 = Isometry::translation(f.point(0, 1));
        assert_eq!(compose(&t10, &t01, f), Isometry::translation(f.point(1, 1)));
        for (i, m) in group.elements().iter().enumerate() {
            let g = Isometry { rot: *m, trans: f.point(i as i64, 2 * i as i64 + 1) };
            let h = Isometry {
                rot: group.elements()[(i * 5 + 3) % group.len()],
                trans: f.point(3, i as i64),
            };
            assert_eq!(compose(&Isometry::identity(), &h, f), h);
            assert_eq!(compose(&g, &g.inverse(f), f), Isometry::identity());
            let gh = compose(&g, &h, f);
            for x in f.plane() {
                assert_eq!(gh.apply(f, x), g.apply(f, h.apply(f, x)));
            }
        }
    }

    #[test]
    fn solve_isometry_examples() {
        let f7 = fp(7);
        let g7 = OrthogonalGroup::new(f7);
        let pt = [f7.point(3, 5)];
        let all = solve_isometry(&pt, &pt, &g7);
        assert_eq!(all.len(), OrthogonalGroup::expected_order(f7));
        assert!(all.iter().all(|g| g.apply(f7, pt[0]) == pt[0]));

        let src = [f7.point(0, 0), f7.point(1, 0), f7.point(0, 1)];
        let dst: Vec<Point> = src.iter().map(|&v| f7.point_add(v, f7.point(2, 3))).collect();
        let sols = solve_isometry(&src, &dst, &g7);
        assert!(sols.contains(&Isometry::translation(f7.point(2, 3))));
        assert!(solve_isometry(&src, &src, &g7).contains(&Isometry::identity()));

        let f5 = fp(5);
        let g5 = OrthogonalGroup::new(f5);
        let src = [f5.point(0, 0), f5.point(1, 0)];
        let dst = [f5.point(0, 0), f5.point(0, 1)];
        let sols = solve_isometry(&src, &dst, &g5);
        assert!(!sols.is_empty());
        let quarter_turn = OrthMatrix::from_i64(f5, 0, -1, 1, 0);
        assert!(sols.iter().any(|g| g.rot == quarter_turn));
        // oracle: scan every matrix directly
        let expected = g5
            .elements()
            .iter()
            .filter(|m| m.apply(f5, src[1]) == dst[1])
            .count();
        assert_eq!(sols.len(), expected);

        assert!(solve_isometry(&src, &dst[..1], &g5).is_empty());
    }

    #[test]
    fn cache_returns_shared_group() {
        let f = fp(11);
        let a = OrthogonalGroup::cached(f);
        let b = OrthogonalGroup::cached(f);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 24);
    }
}
