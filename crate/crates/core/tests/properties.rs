use proptest::prelude::*;

use fpc::congruence::{are_congruent, gram_key, orbit_canonical_key, Mode, Simplex};
use fpc::isometry::{Isometry, OrthogonalGroup};
use fpc::{FieldParams, Point};

const PRIMES: [u64; 6] = [3, 5, 7, 11, 13, 29];

fn setup(pi: usize, gi: usize, tx: i64, ty: i64) -> (FieldParams, OrthogonalGroup, Isometry) {
    let fp = FieldParams::new(PRIMES[pi]).unwrap();
    let group = OrthogonalGroup::new(fp);
    let rot = group.elements()[gi % group.len()];
    (fp, group, Isometry { rot, trans: fp.point(tx, ty) })
}

proptest! {
    #[test]
    fn isometries_preserve_distance(pi in 0..6usize, gi in 0..64usize, t in any::<(i64, i64)>(),
                                    x in any::<(i64, i64)>(), y in any::<(i64, i64)>()) {
        let (fp, _, g) = setup(pi, gi, t.0, t.1);
        let (x, y) = (fp.point(x.0, x.1), fp.point(y.0, y.1));
        prop_assert_eq!(fp.distance(g.apply(fp, x), g.apply(fp, y)), fp.distance(x, y));
    }

    #[test]
    fn compose_and_inverse(pi in 0..6usize, a in 0..64usize, b in 0..64usize,
                           t in any::<(i64, i64, i64, i64)>(), x in any::<(i64, i64)>()) {
        let (fp, group, g) = setup(pi, a, t.0, t.1);
        let h = Isometry { rot: group.elements()[b % group.len()], trans: fp.point(t.2, t.3) };
        let x: Point = fp.point(x.0, x.1);
        prop_assert_eq!(g.compose(fp, &h).apply(fp, x), g.apply(fp, h.apply(fp, x)));
        prop_assert_eq!(g.inverse(fp).apply(fp, g.apply(fp, x)), x);
    }

    #[test]
    fn keys_are_isometry_invariant(pi in 0..6usize, gi in 0..64usize, t in any::<(i64, i64)>(),
                                   v in prop::collection::vec(any::<(i64, i64)>(), 2..=3),
                                   ordered in any::<bool>()) {
        let (fp, group, g) = setup(pi, gi, t.0, t.1);
        let mode = if ordered { Mode::Ordered } else { Mode::Unordered };
        let pts: Vec<Point> = v.iter().map(|&(x, y)| fp.point(x, y)).collect();
        let moved: Vec<Point> = pts.iter().map(|&x| g.apply(fp, x)).collect();
        let s = Simplex::new(&pts, mode).unwrap();
        let t = Simplex::new(&moved, mode).unwrap();
        prop_assert!(are_congruent(&s, &t, &group).unwrap());
        prop_assert_eq!(orbit_canonical_key(&s, &group), orbit_canonical_key(&t, &group));
        prop_assert_eq!(gram_key(&s, fp), gram_key(&t, fp));
    }
}
