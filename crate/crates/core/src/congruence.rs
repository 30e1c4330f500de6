//! Congruence classes of segments and triangles.
//!
//! Two routes produce a [`CongruenceClassKey`]:
//!
//! * the orbit oracle ([`orbit_canonical_key`]) translates the first vertex
//!   to the origin, applies every element of O₂(𝔽_p) (and every vertex
//!   permutation in unordered mode) and keeps the lexicographic minimum;
//! * the Gram fast path ([`gram_key`]) reads off `(‖u‖, ‖v‖, ⟨u,v⟩)` for
//!   the edge vectors `u = v₂ − v₁`, `v = v₃ − v₁`. When `u, v` are
//!   independent the Gram matrix is a complete invariant; collinear
//!   triangles are handed to the oracle.
//!
//! Lexicographic order compares residues as integers in `0..p`, points as
//! `(x, y)` and tuples left to right, so keys are portable bit-for-bit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, Point};
use crate::isometry::{solve_isometry, OrthogonalGroup};

/// Largest point set the orbit-only classifier accepts.
pub const ORACLE_MAX_POINTS: usize = 40;

const PERMS_2: [[usize; 2]; 2] = [[0, 1], [1, 0]];
const PERMS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ordered,
    Unordered,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ordered => "ordered",
            Mode::Unordered => "unordered",
        })
    }
}

/// Which key route the classifier takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Gram invariant, orbit oracle for degenerate triangles.
    Fast,
    /// Orbit oracle for everything; limited to [`ORACLE_MAX_POINTS`].
    Oracle,
}

/// A segment or triangle with an ordered-vs-unordered interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: ArrayVec<Point, 3>,
    mode: Mode,
}

impl Simplex {
    pub fn new(vertices: &[Point], mode: Mode) -> Result<Self> {
        if !(2..=3).contains(&vertices.len()) {
            return Err(Error::ShapeMismatch(format!(
                "a simplex has 2 or 3 vertices, got {}",
                vertices.len()
            )));
        }
        Ok(Simplex {
            vertices: vertices.iter().copied().collect(),
            mode,
        })
    }

    pub fn segment(a: Point, b: Point, mode: Mode) -> Self {
        Simplex {
            vertices: [a, b].into_iter().collect(),
            mode,
        }
    }

    pub fn triangle(a: Point, b: Point, c: Point, mode: Mode) -> Self {
        Simplex {
            vertices: [a, b, c].into_iter().collect(),
            mode,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `k` in k-simplex.
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn has_repeated_vertex(&self) -> bool {
        let v = &self.vertices;
        (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i] == v[j]))
    }
}

/// Canonical identifier of a congruence class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CongruenceClassKey {
    /// Gram data of a segment: `‖u‖` plus whether `u` is the zero vector.
    Segment { zero_vector: bool, norm: FieldElement },
    /// Gram data `(‖u‖, ‖v‖, ⟨u,v⟩)` of a non-degenerate triangle.
    Gram {
        uu: FieldElement,
        vv: FieldElement,
        uv: FieldElement,
    },
    /// Lexicographically minimal translation-normalized vertex tuple over the orbit.
    Orbit { vertices: ArrayVec<Point, 3> },
}

impl CongruenceClassKey {
    pub fn is_orbit(&self) -> bool {
        matches!(self, CongruenceClassKey::Orbit { .. })
    }

    /// A triangle key is degenerate when its edge vectors are dependent.
    /// Segment keys are degenerate only for the zero segment.
    pub fn is_degenerate(&self, fp: FieldParams) -> bool {
        match self {
            CongruenceClassKey::Segment { zero_vector, .. } => *zero_vector,
            CongruenceClassKey::Gram { .. } => false,
            CongruenceClassKey::Orbit { vertices } => match vertices.len() {
                2 => vertices[1].is_origin(),
                _ => fp
                    .cross(fp.point_sub(vertices[1], vertices[0]), fp.point_sub(vertices[2], vertices[0]))
                    .is_zero(),
            },
        }
    }
}

impl fmt::Display for CongruenceClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceClassKey::Segment { zero_vector: true, .. } => write!(f, "seg:zero"),
            CongruenceClassKey::Segment { norm, .. } => write!(f, "seg:{norm}"),
            CongruenceClassKey::Gram { uu, vv, uv } => write!(f, "gram:{uu}:{vv}:{uv}"),
            CongruenceClassKey::Orbit { vertices } => {
                f.write_str("orbit:")?;
                for v in vertices {
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

fn check_shapes(s: &Simplex, t: &Simplex) -> Result<()> {
    if s.vertices.len() != t.vertices.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} vertices",
            s.vertices.len(),
            t.vertices.len()
        )));
    }
    if s.mode != t.mode {
        return Err(Error::ShapeMismatch(format!("{} vs {} mode", s.mode, t.mode)));
    }
    Ok(())
}

fn vertex_permutations(n: usize) -> Vec<ArrayVec<usize, 3>> {
    match n {
        2 => PERMS_2.iter().map(|p| p.iter().copied().collect()).collect(),
        _ => PERMS_3.iter().map(|p| p.iter().copied().collect()).collect(),
    }
}

/// Definitional congruence test: some isometry maps `s` onto `t` (vertex by
/// vertex in ordered mode, up to relabelling `t` in unordered mode).
pub fn are_congruent(s: &Simplex, t: &Simplex, group: &OrthogonalGroup) -> Result<bool> {
    check_shapes(s, t)?;
    match s.mode {
        Mode::Ordered => Ok(!solve_isometry(&s.vertices, &t.vertices, group).is_empty()),
        Mode::Unordered => Ok(vertex_permutations(t.vertices.len()).iter().any(|perm| {
            let permuted: ArrayVec<Point, 3> = perm.iter().map(|&i| t.vertices[i]).collect();
            !solve_isometry(&s.vertices, &permuted, group).is_empty()
        })),
    }
}

#[inline]
fn tuple_less(a: &[(u32, u32)], b: &[(u32, u32)]) -> bool {
    a < b
}

/// Orbit-minimum key. Deterministic and equal across congruent inputs.
pub fn orbit_canonical_key(s: &Simplex, group: &OrthogonalGroup) -> CongruenceClassKey {
    let fp = group.params();
    let n = s.vertices.len();
    let perms: &[ArrayVec<usize, 3>] = &match s.mode {
        Mode::Ordered => vec![(0..n).collect()],
        Mode::Unordered => vertex_permutations(n),
    };
    let p = fp.modulus() as u64;
    let mut best: ArrayVec<(u32, u32), 2> = ArrayVec::new();
    let mut cand: ArrayVec<(u32, u32), 2> = ArrayVec::new();
    for perm in perms {
        let base = s.vertices[perm[0]];
        let rel: ArrayVec<(u64, u64), 2> = perm[1..]
            .iter()
            .map(|&i| {
                let w = fp.point_sub(s.vertices[i], base);
                (w.x.value() as u64, w.y.value() as u64)
            })
            .collect();
        for m in group.elements() {
            let (a, b, c, d) = (
                m.m11.value() as u64,
                m.m12.value() as u64,
                m.m21.value() as u64,
                m.m22.value() as u64,
            );
            cand.clear();
            for &(x, y) in &rel {
                cand.push((((a * x + b * y) % p) as u32, ((c * x + d * y) % p) as u32));
            }
            if best.is_empty() || tuple_less(&cand, &best) {
                best.clone_from(&cand);
            }
        }
    }
    let mut vertices = ArrayVec::new();
    vertices.push(Point::ORIGIN);
    for &(x, y) in &best {
        vertices.push(fp.point(x as i64, y as i64));
    }
    CongruenceClassKey::Orbit { vertices }
}

/// Gram-invariant key. Segments always get one; triangles with linearly
/// dependent edge vectors (collinear or repeated vertices) return `None`.
pub fn gram_key(s: &Simplex, fp: FieldParams) -> Option<CongruenceClassKey> {
    let v = &s.vertices;
    if v.len() == 2 {
        let u = fp.point_sub(v[1], v[0]);
        return Some(CongruenceClassKey::Segment {
            zero_vector: u.is_origin(),
            norm: fp.quadratic_form(u),
        });
    }
    let u = fp.point_sub(v[1], v[0]);
    let w = fp.point_sub(v[2], v[0]);
    if fp.cross(u, w).is_zero() {
        return None;
    }
    match s.mode {
        Mode::Ordered => Some(CongruenceClassKey::Gram {
            uu: fp.quadratic_form(u),
            vv: fp.quadratic_form(w),
            uv: fp.dot(u, w),
        }),
        Mode::Unordered => {
            // side lengths indexed by the opposite pair; relabelling acts on them as S₃
            let d = [
                [FieldElement::ZERO, fp.distance(v[0], v[1]), fp.distance(v[0], v[2])],
                [fp.distance(v[1], v[0]), FieldElement::ZERO, fp.distance(v[1], v[2])],
                [fp.distance(v[2], v[0]), fp.distance(v[2], v[1]), FieldElement::ZERO],
            ];
            let half = fp.inv(fp.elem(2)).expect("p is odd");
            PERMS_3
                .iter()
                .map(|&[a, b, c]| {
                    let uu = d[a][b];
                    let vv = d[a][c];
                    let uv = fp.mul(fp.sub(fp.add(uu, vv), d[b][c]), half);
                    (uu, vv, uv)
                })
                .min()
                .map(|(uu, vv, uv)| CongruenceClassKey::Gram { uu, vv, uv })
        }
    }
}

/// Options for [`count_classes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// 1 for segments, 2 for triangles.
    pub k: usize,
    pub mode: Mode,
    /// Require pairwise distinct vertices.
    pub distinct: bool,
    pub strategy: Strategy,
}

impl ClassifyOptions {
    pub fn triangles(mode: Mode, distinct: bool) -> Self {
        ClassifyOptions {
            k: 2,
            mode,
            distinct,
            strategy: Strategy::Fast,
        }
    }

    pub fn segments(mode: Mode, distinct: bool) -> Self {
        ClassifyOptions {
            k: 1,
            mode,
            distinct,
            strategy: Strategy::Fast,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// Class multiplicities for every simplex drawn from a point set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassCount {
    pub multiplicities: BTreeMap<CongruenceClassKey, u64>,
    pub simplices: u64,
}

impl ClassCount {
    pub fn total_classes(&self) -> u64 {
        self.multiplicities.len() as u64
    }

    /// Classes whose representatives are non-degenerate.
    pub fn non_degenerate_classes(&self, fp: FieldParams) -> u64 {
        self.multiplicities.keys().filter(|k| !k.is_degenerate(fp)).count() as u64
    }

    /// `N = Σ multiplicity²`, the number of ordered pairs of congruent simplices.
    pub fn congruent_pair_count(&self) -> Result<u64> {
        self.multiplicities.values().try_fold(0u64, |acc, &m| {
            m.checked_mul(m)
                .and_then(|sq| acc.checked_add(sq))
                .ok_or(Error::Overflow("congruent pair count"))
        })
    }

    /// `(Σ m)² ≤ classes · Σ m²`, with equality iff all multiplicities agree.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let sum: u128 = self.multiplicities.values().map(|&m| m as u128).sum();
        let sq: u128 = self.multiplicities.values().map(|&m| (m as u128) * (m as u128)).sum();
        sum * sum <= self.total_classes() as u128 * sq
    }

    /// CSV rows `key,multiplicity` in key order.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["key", "multiplicity"])?;
        for (key, m) in &self.multiplicities {
            w.write_record([key.to_string(), m.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `N` for a class count; see [`ClassCount::congruent_pair_count`].
pub fn congruent_pair_count(cc: &ClassCount) -> Result<u64> {
    cc.congruent_pair_count()
}

/// Classifies simplices over a fixed field with a shared group table.
#[derive(Clone, Debug)]
pub struct Classifier {
    group: Arc<OrthogonalGroup>,
}

type Tally = FxHashMap<CongruenceClassKey, u64>;

fn merge_tallies(mut a: Tally, mut b: Tally) -> Tally {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

impl Classifier {
    pub fn new(fp: FieldParams) -> Self {
        Classifier {
            group: OrthogonalGroup::cached(fp),
        }
    }

    pub fn params(&self) -> FieldParams {
        self.group.params()
    }

    pub fn group(&self) -> &OrthogonalGroup {
        &self.group
    }

    pub fn key(&self, s: &Simplex, strategy: Strategy) -> CongruenceClassKey {
        match strategy {
            Strategy::Oracle => orbit_canonical_key(s, &self.group),
            Strategy::Fast => gram_key(s, self.params()).unwrap_or_else(|| orbit_canonical_key(s, &self.group)),
        }
    }

    /// Counts classes over the simplices of `points` selected by `opts`.
    /// Input order and duplicates do not matter. Parallel work runs on the
    /// current rayon pool; the result is independent of its size.
    pub fn count_classes(&self, points: &[Point], opts: ClassifyOptions) -> Result<ClassCount> {
        if !(1..=2).contains(&opts.k) {
            return Err(Error::Usage(format!("k must be 1 or 2, got {}", opts.k)));
        }
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if opts.strategy == Strategy::Oracle && pts.len() > ORACLE_MAX_POINTS {
            return Err(Error::Infeasible(format!(
                "oracle-only classification is limited to {ORACLE_MAX_POINTS} points, got {}",
                pts.len()
            )));
        }
        let n = pts.len();
        let pts = &pts[..];
        let tally = (0..n)
            .into_par_iter()
            .fold(
                || (Tally::default(), 0u64),
                |(mut tally, mut count), i| {
                    let mut record = |verts: &[Point]| {
                        let s = Simplex {
                            vertices: verts.iter().copied().collect(),
                            mode: opts.mode,
                        };
                        *tally.entry(self.key(&s, opts.strategy)).or_insert(0) += 1;
                        count += 1;
                    };
                    let (lo_j, ok_j): (usize, fn(usize, usize) -> bool) = match (opts.mode, opts.distinct) {
                        (Mode::Ordered, false) => (0, |_, _| true),
                        (Mode::Ordered, true) => (0, |a, b| a != b),
                        (Mode::Unordered, false) => (i, |_, _| true),
                        (Mode::Unordered, true) => (i + 1, |_, _| true),
                    };
                    for j in lo_j..n {
                        if !ok_j(i, j) {
                            continue;
                        }
                        if opts.k == 1 {
                            record(&[pts[i], pts[j]]);
                            continue;
                        }
                        let lo_k = match (opts.mode, opts.distinct) {
                            (Mode::Ordered, _) => 0,
                            (Mode::Unordered, false) => j,
                            (Mode::Unordered, true) => j + 1,
                        };
                        for k in lo_k..n {
                            if opts.mode == Mode::Ordered && opts.distinct && (k == i || k == j) {
                                continue;
                            }
                            record(&[pts[i], pts[j], pts[k]]);
                        }
                    }
                    (tally, count)
                },
            )
            .reduce(
                || (Tally::default(), 0u64),
                |(a, ca), (b, cb)| (merge_tallies(a, b), ca + cb),
            );
        let cc = ClassCount {
            multiplicities: tally.0.into_iter().collect(),
            simplices: tally.1,
        };
        assert!(
            cc.cauchy_schwarz_holds(),
            "Cauchy-Schwarz identity failed on a class count; counting is broken"
        );
        Ok(cc)
    }
}

/// Convenience wrapper around [`Classifier::count_classes`].
pub fn count_classes(points: &[Point], opts: ClassifyOptions, fp: FieldParams) -> Result<ClassCount> {
    Classifier::new(fp).count_classes(points, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::Isometry;

    fn fp(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn grid(f: FieldParams, a: &[i64]) -> Vec<Point> {
        a.iter().flat_map(|&x| a.iter().map(move |&y| f.point(x, y))).collect()
    }

    /// Number of blocks in the partition induced by `are_congruent`.
    fn oracle_class_count(simplices: &[Simplex], group: &OrthogonalGroup) -> usize {
        let mut reps: Vec<&Simplex> = Vec::new();
        for s in simplices {
            if !reps.iter().any(|r| are_congruent(r, s, group).unwrap()) {
                reps.push(s);
            }
        }
        reps.len()
    }

    fn oracle_pair_count(simplices: &[Simplex], group: &OrthogonalGroup) -> usize {
        simplices
            .iter()
            .map(|s| simplices.iter().filter(|t| are_congruent(s, t, group).unwrap()).count())
            .sum()
    }

    #[test]
    fn are_congruent_examples() {
        let f = fp(7);
        let g = OrthogonalGroup::new(f);
        let s = Simplex::triangle(f.point(0, 0), f.point(1, 0), f.point(0, 1), Mode::Ordered);
        assert!(are_congruent(&s, &s, &g).unwrap());
        let shifted = Simplex::triangle(f.point(2, 3), f.point(3, 3), f.point(2, 4), Mode::Ordered);
        assert!(are_congruent(&s, &shifted, &g).unwrap());
        let scaled = Simplex::triangle(f.point(0, 0), f.point(2, 0), f.point(0, 2), Mode::Ordered);
        assert!(!are_congruent(&s, &scaled, &g).unwrap());
    }

    #[test]
    fn are_congruent_rejects_mismatched_shapes() {
        let f = fp(7);
        let g = OrthogonalGroup::new(f);
        let tri = Simplex::triangle(f.point(0, 0), f.point(1, 0), f.point(0, 1), Mode::Ordered);
        let seg = Simplex::segment(f.point(0, 0), f.point(1, 0), Mode::Ordered);
        assert!(matches!(are_congruent(&tri, &seg, &g), Err(Error::ShapeMismatch(_))));
        let tri_u = Simplex::triangle(f.point(0, 0), f.point(1, 0), f.point(0, 1), Mode::Unordered);
        assert!(matches!(are_congruent(&tri, &tri_u, &g), Err(Error::ShapeMismatch(_))));
        assert!(Simplex::new(&[f.point(0, 0)], Mode::Ordered).is_err());
    }

    #[test]
    fn unordered_relabelling() {
        let f = fp(7);
        let g = OrthogonalGroup::new(f);
        let (a, b, c) = (f.point(0, 0), f.point(1, 0), f.point(0, 3));
        let s = Simplex::triangle(a, b, c, Mode::Ordered);
        let t = Simplex::triangle(b, c, a, Mode::Ordered);
        assert!(!are_congruent(&s, &t, &g).unwrap());
        let su = Simplex::triangle(a, b, c, Mode::Unordered);
        let tu = Simplex::triangle(b, c, a, Mode::Unordered);
        assert!(are_congruent(&su, &tu, &g).unwrap());
        assert_eq!(orbit_canonical_key(&su, &g), orbit_canonical_key(&tu, &g));
        assert_eq!(gram_key(&su, f), gram_key(&tu, f));
    }

    #[test]
    fn orbit_key_examples() {
        let f = fp(7);
        let g = OrthogonalGroup::new(f);
        let zero = orbit_canonical_key(&Simplex::segment(f.point(3, 3), f.point(3, 3), Mode::Ordered), &g);
        for q in f.plane() {
            let k = orbit_canonical_key(&Simplex::segment(q, q, Mode::Ordered), &g);
            assert_eq!(k, zero);
        }
        assert!(zero.is_degenerate(f));
        let s = Simplex::triangle(f.point(0, 0), f.point(1, 0), f.point(0, 1), Mode::Ordered);
        let t = Simplex::triangle(f.point(5, 5), f.point(5, 6), f.point(6, 5), Mode::Ordered);
        assert!(are_congruent(&s, &t, &g).unwrap());
        assert_eq!(orbit_canonical_key(&s, &g), orbit_canonical_key(&t, &g));
    }

    #[test]
    fn orbit_key_invariant_under_isometries_p5() {
        let f = fp(5);
        let g = OrthogonalGroup::new(f);
        let shapes = [
            Simplex::triangle(f.point(0, 0), f.point(1, 0), f.point(0, 1), Mode::Ordered),
            Simplex::triangle(f.point(0, 0), f.point(1, 2), f.point(2, 4), Mode::Ordered),
            Simplex::triangle(f.point(1, 1), f.point(3, 4), f.point(1, 1), Mode::Unordered),
            Simplex::segment(f.point(0, 0), f.point(1, 2), Mode::Ordered),
            Simplex::segment(f.point(4, 1), f.point(2, 2), Mode::Unordered),
        ];
        for s in &shapes {
            let key = orbit_canonical_key(s, &g);
            for m in g.elements() {
                for z in f.plane() {
                    let iso = Isometry { rot: *m, trans: z };
                    let moved: Vec<Point> = s.vertices().iter().map(|&v| iso.apply(f, v)).collect();
                    let t = Simplex::new(&moved, s.mode()).unwrap();
                    assert_eq!(orbit_canonical_key(&t, &g), key);
                }
            }
        }
    }

    #[test]
    fn gram_key_examples() {
        let f7 = fp(7);
        let s = Simplex::triangle(f7.point(0, 0), f7.point(1, 0), f7.point(0, 1), Mode::Ordered);
        // polarization: ⟨u,v⟩ = (‖u‖ + ‖v‖ − ‖u−v‖)/2 = (1 + 1 − 2)/2 = 0
        assert_eq!(
            gram_key(&s, f7),
            Some(CongruenceClassKey::Gram {
                uu: f7.elem(1),
                vv: f7.elem(1),
                uv: f7.elem(0)
            })
        );
        let collinear = Simplex::triangle(f7.point(0, 0), f7.point(1, 0), f7.point(2, 0), Mode::Ordered);
        assert_eq!(gram_key(&collinear, f7), None);
        let f5 = fp(5);
        let iso = Simplex::triangle(f5.point(0, 0), f5.point(1, 2), f5.point(2, 4), Mode::Ordered);
        assert_eq!(gram_key(&iso, f5), None);
        let rep = Simplex::triangle(f5.point(1, 1), f5.point(1, 1), f5.point(2, 4), Mode::Unordered);
        assert_eq!(gram_key(&rep, f5), None);
    }

    #[test]
    fn gram_key_matches_polarization() {
        let f = fp(13);
        let half = f.inv(f.elem(2)).unwrap();
        for (a, b, c) in [((0, 0), (1, 5), (7, 2)), ((3, 4), (9, 9), (0, 12)), ((1, 0), (0, 1), (5, 5))] {
            let (a, b, c) = (f.point(a.0, a.1), f.point(b.0, b.1), f.point(c.0, c.1));
            let s = Simplex::triangle(a, b, c, Mode::Ordered);
            let uu = f.distance(a, b);
            let vv = f.distance(a, c);
            let uv = f.mul(f.sub(f.add(uu, vv), f.distance(b, c)), half);
            assert_eq!(gram_key(&s, f), Some(CongruenceClassKey::Gram { uu, vv, uv }));
        }
    }

    #[test]
    fn count_classes_examples() {
        let f7 = fp(7);
        let single = [f7.point(4, 4)];
        let cc = count_classes(&single, ClassifyOptions::triangles(Mode::Ordered, false), f7).unwrap();
        assert_eq!(cc.total_classes(), 1);
        assert_eq!(cc.simplices, 1);

        let tri = [f7.point(0, 0), f7.point(1, 0), f7.point(0, 1)];
        let cc = count_classes(&tri, ClassifyOptions::triangles(Mode::Unordered, true), f7).unwrap();
        assert_eq!(cc.total_classes(), 1);

        let empty = count_classes(&[], ClassifyOptions::triangles(Mode::Unordered, true), f7).unwrap();
        assert_eq!(empty.total_classes(), 0);
        assert_eq!(empty.congruent_pair_count().unwrap(), 0);

        assert!(count_classes(&tri, ClassifyOptions { k: 3, ..ClassifyOptions::triangles(Mode::Ordered, false) }, f7).is_err());
    }

    #[test]
    fn segment_classes_of_small_grid_p7() {
        let f = fp(7);
        let g = OrthogonalGroup::new(f);
        let pts = grid(f, &[0, 1, 2]);
        let mut segs = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                segs.push(Simplex::segment(pts[i], pts[j], Mode::Unordered));
            }
        }
        assert_eq!(segs.len(), 36);
        let oracle = oracle_class_count(&segs, &g);
        let cc = count_classes(&pts, ClassifyOptions::segments(Mode::Unordered, true), f).unwrap();
        assert_eq!(cc.total_classes() as usize, oracle);
        // frozen from the pairwise oracle: distances {1,2,4,5}
        assert_eq!(oracle, 4);
        assert_eq!(cc.simplices, 36);
    }

    #[test]
    fn pair_count_two_points_p5() {
        let f = fp(5);
        let g = OrthogonalGroup::new(f);
        let pts = [f.point(0, 0), f.point(1, 0)];
        let mut tuples = Vec::new();
        for &a in &pts {
            for &b in &pts {
                for &c in &pts {
                    tuples.push(Simplex::triangle(a, b, c, Mode::Ordered));
                }
            }
        }
        assert_eq!(tuples.len(), 8);
        let oracle = oracle_pair_count(&tuples, &g);
        let cc = count_classes(&pts, ClassifyOptions::triangles(Mode::Ordered, false), f).unwrap();
        assert_eq!(cc.simplices, 8);
        assert_eq!(cc.congruent_pair_count().unwrap() as usize, oracle);
        // frozen: classes {aaa, bbb}, {aab, bba}, {aba, bab}, {abb, baa}
        assert_eq!(oracle, 16);
        assert_eq!(cc.total_classes(), 4);
    }

    #[test]
    fn pair_count_edge_cases() {
        let mut cc = ClassCount::default();
        cc.multiplicities.insert(
            CongruenceClassKey::Segment { zero_vector: true, norm: FieldElement::ZERO },
            7,
        );
        cc.simplices = 7;
        assert_eq!(congruent_pair_count(&cc).unwrap(), 49);
        let f = fp(101);
        // distinct, pairwise non-congruent segments
        let pts = [f.point(0, 0), f.point(1, 0)];
        let cc = count_classes(&pts, ClassifyOptions::segments(Mode::Ordered, true), f).unwrap();
        assert_eq!(cc.simplices, 2);
        assert_eq!(cc.total_classes(), 1);
        let mut many = ClassCount::default();
        for v in 1..=5u32 {
            many.multiplicities.insert(
                CongruenceClassKey::Segment { zero_vector: false, norm: f.elem(v as i64) },
                1,
            );
        }
        assert_eq!(many.congruent_pair_count().unwrap(), 5);
        let mut huge = ClassCount::default();
        huge.multiplicities.insert(
            CongruenceClassKey::Segment { zero_vector: true, norm: FieldElement::ZERO },
            u64::MAX / 2,
        );
        assert!(matches!(huge.congruent_pair_count(), Err(Error::Overflow(_))));
    }

    #[test]
    fn oracle_strategy_is_gated() {
        let f = fp(101);
        let pts: Vec<Point> = (0..41).map(|i| f.point(i, 0)).collect();
        let opts = ClassifyOptions::triangles(Mode::Unordered, true).with_strategy(Strategy::Oracle);
        assert!(matches!(count_classes(&pts, opts, f), Err(Error::Infeasible(_))));
    }

    #[test]
    fn fast_and_oracle_counts_agree() {
        for p in [5u64, 7, 13] {
            let f = fp(p);
            let pts = grid(f, &[0, 1, 3]);
            for mode in [Mode::Ordered, Mode::Unordered] {
                for distinct in [true, false] {
                    for k in [1, 2] {
                        let opts = ClassifyOptions { k, mode, distinct, strategy: Strategy::Fast };
                        let fast = count_classes(&pts, opts, f).unwrap();
                        let oracle = count_classes(&pts, opts.with_strategy(Strategy::Oracle), f).unwrap();
                        assert_eq!(fast.total_classes(), oracle.total_classes(), "p={p} {mode} {distinct} k={k}");
                        assert_eq!(fast.simplices, oracle.simplices);
                        assert_eq!(
                            fast.congruent_pair_count().unwrap(),
                            oracle.congruent_pair_count().unwrap()
                        );
                        assert_eq!(fast.non_degenerate_classes(f), oracle.non_degenerate_classes(f));
                    }
                }
            }
        }
    }

    #[test]
    fn simplex_counts_per_convention() {
        let f = fp(11);
        let pts = grid(f, &[0, 1]);
        let n = pts.len() as u64;
        let count = |mode, distinct| {
            count_classes(&pts, ClassifyOptions::triangles(mode, distinct), f)
                .unwrap()
                .simplices
        };
        assert_eq!(count(Mode::Ordered, false), n * n * n);
        assert_eq!(count(Mode::Ordered, true), n * (n - 1) * (n - 2));
        assert_eq!(count(Mode::Unordered, true), n * (n - 1) * (n - 2) / 6);
        assert_eq!(count(Mode::Unordered, false), n * (n + 1) * (n + 2) / 6);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let f = fp(13);
        let pts = grid(f, &[0, 2, 3, 7]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| count_classes(&pts, ClassifyOptions::triangles(Mode::Ordered, false), f).unwrap())
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn input_order_and_duplicates_are_ignored() {
        let f = fp(13);
        let pts = grid(f, &[0, 2, 5]);
        let mut shuffled = pts.clone();
        shuffled.reverse();
        shuffled.push(pts[3]);
        let opts = ClassifyOptions::triangles(Mode::Unordered, true);
        assert_eq!(count_classes(&pts, opts, f).unwrap(), count_classes(&shuffled, opts, f).unwrap());
    }

    #[test]
    fn csv_dump() {
        let f = fp(7);
        let pts = [f.point(0, 0), f.point(1, 0), f.point(0, 1)];
        let cc = count_classes(&pts, ClassifyOptions::segments(Mode::Unordered, true), f).unwrap();
        let mut buf = Vec::new();
        cc.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "key,multiplicity\nseg:1,2\nseg:2,1\n");
    }
}
