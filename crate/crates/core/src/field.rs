//! Arithmetic in the prime field 𝔽_p and points of the plane 𝔽_p².
//!
//! The distance between two points is the quadratic form
//! `‖u‖ = u₁² + u₂²` evaluated on their difference. It is a field element,
//! not a metric, and it can vanish on nonzero vectors when `p ≡ 1 (mod 4)`.
//! [`quadratic_form`] is the only place the form is defined; every count in
//! the crate goes through it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus, `2^31 - 1`. Products of two residues fit in `u64`.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// An odd prime modulus, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldParams {
    p: u32,
}

/// A canonical residue in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

/// A point (or vector) of 𝔽_p².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    /// Valid for every supported modulus since `p ≥ 3`.
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Point {
    pub const ORIGIN: Point = Point {
        x: FieldElement::ZERO,
        y: FieldElement::ZERO,
    };

    #[inline]
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn is_origin(self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldParams {
    /// Validates `p` as an odd prime in `[3, 2^31 - 1]`.
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(p));
        }
        if p == 2 {
            return Err(Error::EvenModulus);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldParams { p: p as u32 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduces any integer, negative values included, to its canonical residue.
    #[inline]
    pub fn elem(self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn point(self, x: i64, y: i64) -> Point {
        Point::new(self.elem(x), self.elem(y))
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + b.0 as u64;
        FieldElement((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + self.p as u64 - b.0 as u64;
        FieldElement((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement((a.0 as u64 * b.0 as u64 % self.p as u64) as u32)
    }

    pub fn pow(self, a: FieldElement, mut e: u64) -> FieldElement {
        let p = self.p as u64;
        let mut base = a.0 as u64 % p;
        let mut acc = 1u64 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        FieldElement(acc as u32)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// Quadratic character of `a` via Euler's criterion: `0`, `+1` or `-1`.
    pub fn legendre_symbol(self, a: FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let r = self.pow(a, (self.p as u64 - 1) / 2);
        if r.0 == 1 {
            1
        } else {
            -1
        }
    }

    /// `χ(−1)`: `+1` iff `p ≡ 1 (mod 4)`, i.e. iff isotropic vectors exist.
    pub fn chi_minus_one(self) -> i8 {
        self.legendre_symbol(self.elem(-1))
    }

    #[inline]
    pub fn point_add(self, a: Point, b: Point) -> Point {
        Point::new(self.add(a.x, b.x), self.add(a.y, b.y))
    }

    #[inline]
    pub fn point_sub(self, a: Point, b: Point) -> Point {
        Point::new(self.sub(a.x, b.x), self.sub(a.y, b.y))
    }

    /// Symmetric bilinear form associated with [`quadratic_form`].
    #[inline]
    pub fn dot(self, u: Point, v: Point) -> FieldElement {
        let p = self.p as u64;
        let s = (u.x.0 as u64 * v.x.0 as u64) % p + (u.y.0 as u64 * v.y.0 as u64) % p;
        FieldElement((s % p) as u32)
    }

    /// `u₁v₂ − u₂v₁`; zero iff `u` and `v` are linearly dependent.
    #[inline]
    pub fn cross(self, u: Point, v: Point) -> FieldElement {
        self.sub(self.mul(u.x, v.y), self.mul(u.y, v.x))
    }

    /// The quadratic form `‖u‖ = u₁² + u₂²`.
    #[inline]
    pub fn quadratic_form(self, u: Point) -> FieldElement {
        quadratic_form(self, u)
    }

    /// `‖a − b‖`.
    #[inline]
    pub fn distance(self, a: Point, b: Point) -> FieldElement {
        quadratic_form(self, self.point_sub(a, b))
    }

    /// All residues in increasing order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.p).map(FieldElement)
    }

    /// All `p²` points, ordered by `(x, y)`.
    pub fn plane(self) -> impl Iterator<Item = Point> {
        let p = self.p;
        (0..p).flat_map(move |x| (0..p).map(move |y| Point::new(FieldElement(x), FieldElement(y))))
    }
}

/// The quadratic form on 𝔽_p² used as squared distance everywhere in the crate.
#[inline]
pub fn quadratic_form(fp: FieldParams, u: Point) -> FieldElement {
    fp.dot(u, u)
}

/// `‖a − b‖ = (a.x − b.x)² + (a.y − b.y)² mod p`.
#[inline]
pub fn distance(a: Point, b: Point, fp: FieldParams) -> FieldElement {
    fp.distance(a, b)
}

pub fn legendre_symbol(a: FieldElement, fp: FieldParams) -> i8 {
    fp.legendre_symbol(a)
}
