//! Set construction from spec strings and the portable sampling generator.
//!
//! Residue sets (`A ⊆ 𝔽_p`):
//!
//! ```text
//! interval:<a>..<b>        half-open, reduced mod p
//! random:<n>[:<seed>]      n distinct residues; seed defaults to the run seed
//! explicit:v1,v2,...       reduced mod p and deduplicated
//! file:<path>              one integer per line
//! ```
//!
//! Point sets (`E ⊆ 𝔽_p²`) accept `file:<path>` with `x,y` lines (a bare path
//! works too), `explicit:x,y;x,y;...`, `plane`, `plane-minus:x,y;...`,
//! `product:<residue spec>` and `random:<n>[:<seed>]`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, Point};

const LCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const LCG_INCREMENT: u64 = 1_442_695_040_888_963_407;

/// 64-bit linear congruential generator
/// `s ← 6364136223846793005·s + 1442695040888963407 (mod 2^64)`, seeded with
/// `s₀ = seed`. Only the upper 32 bits of each state are used.
#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform-ish draw in `0..bound` as `((s >> 32) · bound) >> 32`.
    pub fn below(&mut self, bound: u32) -> u32 {
        (((self.next_u64() >> 32) * bound as u64) >> 32) as u32
    }
}

/// `n` distinct residues drawn in generator order, returned sorted.
pub fn random_residues(n: usize, seed: u64, fp: FieldParams) -> Result<Vec<FieldElement>> {
    let p = fp.modulus();
    if n as u64 > p as u64 {
        return Err(Error::Infeasible(format!("cannot draw {n} distinct residues mod {p}")));
    }
    let mut rng = Lcg64::new(seed);
    let mut seen = vec![false; p as usize];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = rng.below(p);
        if !seen[v as usize] {
            seen[v as usize] = true;
            out.push(fp.elem(v as i64));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `n` distinct points, each drawn as `x` then `y`, returned sorted.
pub fn random_points(n: usize, seed: u64, fp: FieldParams) -> Result<Vec<Point>> {
    let p = fp.modulus() as u64;
    if n as u64 > p * p {
        return Err(Error::Infeasible(format!("cannot draw {n} distinct points of F_{p}^2")));
    }
    let mut rng = Lcg64::new(seed);
    let mut set = std::collections::BTreeSet::new();
    while set.len() < n {
        let x = rng.below(p as u32);
        let y = rng.below(p as u32);
        set.insert(fp.point(x as i64, y as i64));
    }
    Ok(set.into_iter().collect())
}

/// A resolved set together with the spec string it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSpec<T> {
    pub source: String,
    pub resolved: Vec<T>,
}

impl<T> fmt::Display for SetSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn malformed(spec: &str, reason: impl Into<String>) -> Error {
    Error::SetSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_int(spec: &str, s: &str) -> Result<i64> {
    s.trim()
        .parse::<i64>()
        .map_err(|_| malformed(spec, format!("not an integer: {s:?}")))
}

fn parse_random(spec: &str, rest: &str, seed: u64) -> Result<(usize, u64)> {
    let mut parts = rest.split(':');
    let n = parts
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| malformed(spec, "expected random:<n>[:<seed>]"))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| malformed(spec, format!("bad count {n:?}")))?;
    let seed = match parts.next() {
        Some(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| malformed(spec, format!("bad seed {s:?}")))?,
        None => seed,
    };
    if parts.next().is_some() {
        return Err(malformed(spec, "expected random:<n>[:<seed>]"));
    }
    Ok((n, seed))
}

fn parse_point(spec: &str, s: &str, fp: FieldParams) -> Result<Point> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| malformed(spec, format!("expected x,y, got {s:?}")))?;
    Ok(fp.point(parse_int(spec, x)?, parse_int(spec, y)?))
}

fn read_lines(spec: &str, path: &str) -> Result<Vec<String>> {
    if path.is_empty() {
        return Err(malformed(spec, "empty path"));
    }
    let text = std::fs::read_to_string(Path::new(path))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

fn finish<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Resolves a residue-set spec. Output is sorted and duplicate-free.
pub fn parse_set_spec(spec: &str, fp: FieldParams, seed: u64) -> Result<SetSpec<FieldElement>> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| malformed(spec, "expected <kind>:<args>"))?;
    let resolved = match kind {
        "interval" => {
            let (a, b) = rest
                .split_once("..")
                .ok_or_else(|| malformed(spec, "expected interval:<a>..<b>"))?;
            let (a, b) = (parse_int(spec, a)?, parse_int(spec, b)?);
            let len = (b - a).clamp(0, fp.modulus() as i64);
            (a..a + len).map(|v| fp.elem(v)).collect()
        }
        "random" => {
            let (n, seed) = parse_random(spec, rest, seed)?;
            random_residues(n, seed, fp)?
        }
        "explicit" => {
            if rest.trim().is_empty() {
                Vec::new()
            } else {
                rest.split(',')
                    .map(|v| parse_int(spec, v).map(|v| fp.elem(v)))
                    .collect::<Result<Vec<_>>>()?
            }
        }
        "file" => read_lines(spec, rest)?
            .iter()
            .map(|l| parse_int(spec, l).map(|v| fp.elem(v)))
            .collect::<Result<Vec<_>>>()?,
        other => return Err(malformed(spec, format!("unknown set kind {other:?}"))),
    };
    Ok(SetSpec {
        source: spec.to_string(),
        resolved: finish(resolved),
    })
}

/// `A × A`, ordered by `(x, y)`.
pub fn product(a: &[FieldElement]) -> Vec<Point> {
    a.iter()
        .flat_map(|&x| a.iter().map(move |&y| Point::new(x, y)))
        .collect()
}

/// Resolves a point-set spec. Output is sorted and duplicate-free.
pub fn parse_point_spec(spec: &str, fp: FieldParams, seed: u64) -> Result<SetSpec<Point>> {
    let parse_list = |rest: &str| -> Result<Vec<Point>> {
        rest.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_point(spec, s, fp))
            .collect()
    };
    let resolved = match spec.split_once(':') {
        None if spec == "plane" => fp.plane().collect(),
        Some(("explicit", rest)) => parse_list(rest)?,
        Some(("plane-minus", rest)) => {
            let removed = parse_list(rest)?;
            fp.plane().filter(|q| !removed.contains(q)).collect()
        }
        Some(("product", rest)) => product(&parse_set_spec(rest, fp, seed)?.resolved),
        Some(("random", rest)) => {
            let (n, seed) = parse_random(spec, rest, seed)?;
            random_points(n, seed, fp)?
        }
        Some(("file", rest)) => read_lines(spec, rest)?
            .iter()
            .map(|l| parse_point(spec, l, fp))
            .collect::<Result<Vec<_>>>()?,
        _ if Path::new(spec).is_file() => read_lines(spec, spec)?
            .iter()
            .map(|l| parse_point(spec, l, fp))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(malformed(spec, "unknown point-set spec")),
    };
    Ok(SetSpec {
        source: spec.to_string(),
        resolved: finish(resolved),
    })
}
