//! The max-plus equations and an exhaustive solver for them.
//!
//! Each equation is a table of terms. A term is an integer combination of
//! three amplitude slots plus multiples of `A` and `mQ`, guarded by `S` of a
//! product of the slots' parities. The single equation uses the slots
//! `(Z[m-1], Z[m], Z[m+1])`; the pair of simultaneous equations uses
//! `(Z[m], Y[m], Y[m+1])` and `(Y[m+1], Z[m], Z[m+1])`.
//!
//! [`brute_solve`] treats one slot as unknown. For a fixed unknown parity both
//! sides are convex piecewise-linear in the unknown amplitude, so the solution
//! set is found by splitting the line at every crossing of two affine pieces
//! and testing each breakpoint and each open piece.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tropical::{max_plus_eval, s_fn, Amplitude, MaxPlus, ParityValue, Sign};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "Q")]
    pub q: Amplitude,
    #[serde(rename = "A")]
    pub a: Amplitude,
}

impl Params {
    pub fn new(q: impl Into<Amplitude>, a: impl Into<Amplitude>) -> Result<Params> {
        let (q, a) = (q.into(), a.into());
        if q >= Amplitude::ZERO {
            return Err(Error::NonNegativeQ(q));
        }
        Ok(Params { q, a })
    }

    /// `mQ`.
    pub fn mq(&self, m: i64) -> Amplitude {
        self.q * m
    }

    /// `A + 2mQ`.
    pub fn w(&self, m: i64) -> Amplitude {
        self.a + self.q * (2 * m)
    }
}

/// `(ζ_m, Z_m)` and `(η_m, Y_m)` at one lattice site.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct State {
    pub m: i64,
    pub z: ParityValue,
    pub y: ParityValue,
}

#[derive(Clone, Copy, Debug)]
struct Term {
    coef: [i64; 3],
    a: i64,
    mq: i64,
    s_neg: bool,
    s_mask: [bool; 3],
}

const fn t(coef: [i64; 3], a: i64, mq: i64, s_neg: bool, s_mask: [bool; 3]) -> Term {
    Term { coef, a, mq, s_neg, s_mask }
}

const N: bool = false;
const Y: bool = true;

/// Which table to use.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Equation {
    /// Single equation in `(Z[m-1], Z[m], Z[m+1])`.
    Single,
    /// First simultaneous equation in `(Z[m], Y[m], Y[m+1])`.
    Yyz,
    /// Second simultaneous equation in `(Y[m+1], Z[m], Z[m+1])`.
    Yzz,
}

const SINGLE_LHS: [Term; 8] = [
    t([1, 3, 1], 0, 0, false, [Y, Y, Y]),
    t([0, 2, 1], 0, 0, false, [N, N, Y]),
    t([1, 2, 0], 0, 0, false, [Y, N, N]),
    t([0, 1, 0], 0, 0, false, [N, Y, N]),
    t([0, 1, 0], 1, 2, false, [N, Y, N]),
    t([1, 2, 1], 0, 1, true, [Y, N, Y]),
    t([0, 1, 1], 0, 1, true, [N, Y, Y]),
    t([1, 1, 0], 0, 1, true, [Y, Y, N]),
];

const SINGLE_RHS: [Term; 9] = [
    t([1, 3, 1], 0, 0, true, [Y, Y, Y]),
    t([0, 2, 1], 0, 0, true, [N, N, Y]),
    t([1, 2, 0], 0, 0, true, [Y, N, N]),
    t([0, 1, 0], 0, 0, true, [N, Y, N]),
    t([0, 1, 0], 1, 2, true, [N, Y, N]),
    t([1, 2, 1], 0, 1, false, [Y, N, Y]),
    t([0, 1, 1], 0, 1, false, [N, Y, Y]),
    t([1, 1, 0], 0, 1, false, [Y, Y, N]),
    t([0, 0, 0], 0, 1, false, [N, N, N]),
];

const YYZ_LHS: [Term; 3] =
    [t([-1, 1, 1], 0, 1, false, [N, Y, Y]), t([0, 1, 1], 0, 0, true, [Y, Y, Y]), t([0, 0, 0], 1, 2, true, [Y, N, N])];

const YYZ_RHS: [Term; 3] =
    [t([-1, 1, 1], 0, 1, true, [N, Y, Y]), t([0, 1, 1], 0, 0, false, [Y, Y, Y]), t([0, 0, 0], 1, 2, false, [Y, N, N])];

const YZZ_LHS: [Term; 2] = [t([1, 0, 0], 0, 0, false, [Y, N, N]), t([0, 1, 1], 0, 0, true, [N, Y, Y])];

const YZZ_RHS: [Term; 3] =
    [t([1, 0, 0], 0, 0, true, [Y, N, N]), t([0, 1, 1], 0, 0, false, [N, Y, Y]), t([0, 0, 0], 0, 0, false, [N, N, N])];

impl Equation {
    fn sides(self) -> (&'static [Term], &'static [Term]) {
        match self {
            Equation::Single => (&SINGLE_LHS, &SINGLE_RHS),
            Equation::Yyz => (&YYZ_LHS, &YYZ_RHS),
            Equation::Yzz => (&YZZ_LHS, &YZZ_RHS),
        }
    }
}

impl Term {
    fn guard(&self, signs: [Sign; 3]) -> MaxPlus {
        let mut s = if self.s_neg { Sign::Minus } else { Sign::Plus };
        for (i, &on) in self.s_mask.iter().enumerate() {
            if on {
                s = s * signs[i];
            }
        }
        s_fn(s)
    }

    /// Everything except the contribution of slot `skip`.
    fn constant(&self, p: &Params, m: i64, amps: [Amplitude; 3], skip: Option<usize>) -> Amplitude {
        let mut c = p.a * self.a + p.mq(m) * self.mq;
        for (i, &k) in self.coef.iter().enumerate() {
            if Some(i) != skip {
                c += amps[i] * k;
            }
        }
        c
    }
}

fn side(terms: &[Term], p: &Params, m: i64, vals: [ParityValue; 3]) -> MaxPlus {
    let signs = vals.map(|v| v.sign);
    let amps = vals.map(|v| v.amp);
    max_plus_eval(terms.iter().map(|t| t.guard(signs) + t.constant(p, m, amps, None)))
        .expect("equation sides are non-empty")
}

/// Both sides of `eq` at index `m` for the given slot values.
pub fn sides(eq: Equation, p: &Params, m: i64, vals: [ParityValue; 3]) -> (MaxPlus, MaxPlus) {
    let (l, r) = eq.sides();
    (side(l, p, m, vals), side(r, p, m, vals))
}

/// Exact check of the single equation at `m`.
pub fn check_single(p: &Params, m: i64, prev: ParityValue, cur: ParityValue, next: ParityValue) -> bool {
    let (l, r) = sides(Equation::Single, p, m, [prev, cur, next]);
    l == r
}

/// Outcome of checking both simultaneous equations at `m`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SimulCheck {
    pub yyz: bool,
    pub yzz: bool,
}

impl SimulCheck {
    pub fn ok(&self) -> bool {
        self.yyz && self.yzz
    }
}

/// Exact check of both simultaneous equations at `m`, linking sites `m` and `m+1`.
pub fn check_simul(
    p: &Params,
    m: i64,
    here: (ParityValue, ParityValue),
    next: (ParityValue, ParityValue),
) -> SimulCheck {
    let ((z0, y0), (z1, y1)) = (here, next);
    let (a, b) = sides(Equation::Yyz, p, m, [z0, y0, y1]);
    let (c, d) = sides(Equation::Yzz, p, m, [y1, z0, z1]);
    SimulCheck { yyz: a == b, yzz: c == d }
}

/// A closed interval of amplitudes; `None` is an infinite end.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<Amplitude>,
    pub hi: Option<Amplitude>,
}

impl Interval {
    pub const ALL: Interval = Interval { lo: None, hi: None };

    pub fn point(x: Amplitude) -> Interval {
        Interval { lo: Some(x), hi: Some(x) }
    }

    pub fn contains(&self, x: Amplitude) -> bool {
        self.lo.is_none_or(|l| l <= x) && self.hi.is_none_or(|h| x <= h)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RayDir {
    /// `x >= bound`.
    Ge,
    /// `x <= bound`.
    Le,
}

/// All values of one unknown slot that satisfy an equation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolutionSet {
    Empty,
    Point {
        value: ParityValue,
    },
    Ray {
        dir: RayDir,
        bound: Amplitude,
        parities: Vec<Sign>,
    },
    All,
    /// Anything not of the shapes above, as closed intervals per parity.
    Union {
        pieces: Vec<(Sign, Interval)>,
    },
}

impl SolutionSet {
    pub fn contains(&self, v: ParityValue) -> bool {
        match self {
            SolutionSet::Empty => false,
            SolutionSet::All => true,
            SolutionSet::Point { value } => *value == v,
            SolutionSet::Ray { dir, bound, parities } => {
                parities.contains(&v.sign)
                    && match dir {
                        RayDir::Ge => v.amp >= *bound,
                        RayDir::Le => v.amp <= *bound,
                    }
            }
            SolutionSet::Union { pieces } => pieces.iter().any(|(s, i)| *s == v.sign && i.contains(v.amp)),
        }
    }

    pub fn as_point(&self) -> Option<ParityValue> {
        match self {
            SolutionSet::Point { value } => Some(*value),
            _ => None,
        }
    }

    pub fn ray(dir: RayDir, bound: Amplitude, parities: &[Sign]) -> SolutionSet {
        SolutionSet::Ray { dir, bound, parities: parities.to_vec() }.normalized()
    }

    fn pieces(&self) -> Vec<(Sign, Interval)> {
        match self {
            SolutionSet::Empty => vec![],
            SolutionSet::All => Sign::BOTH.iter().map(|&s| (s, Interval::ALL)).collect(),
            SolutionSet::Point { value } => vec![(value.sign, Interval::point(value.amp))],
            SolutionSet::Ray { dir, bound, parities } => parities
                .iter()
                .map(|&s| {
                    let i = match dir {
                        RayDir::Ge => Interval { lo: Some(*bound), hi: None },
                        RayDir::Le => Interval { lo: None, hi: Some(*bound) },
                    };
                    (s, i)
                })
                .collect(),
            SolutionSet::Union { pieces } => pieces.clone(),
        }
    }

    /// Union of two solution sets, in canonical form.
    pub fn union(&self, other: &SolutionSet) -> SolutionSet {
        let mut pieces = self.pieces();
        pieces.extend(other.pieces());
        SolutionSet::Union { pieces }.normalized()
    }

    /// Canonical form: merged intervals, and the narrowest variant that fits.
    pub fn normalized(&self) -> SolutionSet {
        let mut per: Vec<(Sign, Vec<Interval>)> = Vec::new();
        for s in Sign::BOTH {
            let mut iv: Vec<Interval> = self.pieces().into_iter().filter(|(t, _)| *t == s).map(|(_, i)| i).collect();
            iv.sort_by(|a, b| cmp_lo(a.lo, b.lo));
            let mut merged: Vec<Interval> = Vec::new();
            for i in iv {
                match merged.last_mut() {
                    Some(last) if overlaps(last, &i) => last.hi = max_hi(last.hi, i.hi),
                    _ => merged.push(i),
                }
            }
            per.push((s, merged));
        }
        let flat: Vec<(Sign, Interval)> = per.iter().flat_map(|(s, v)| v.iter().map(move |i| (*s, *i))).collect();
        match flat.as_slice() {
            [] => SolutionSet::Empty,
            [(s, i)] if i.lo.is_some() && i.lo == i.hi => {
                SolutionSet::Point { value: ParityValue::new(*s, i.lo.unwrap()) }
            }
            [(s, i)] => match ray_of(i) {
                Some((dir, bound)) => SolutionSet::Ray { dir, bound, parities: vec![*s] },
                None => SolutionSet::Union { pieces: flat },
            },
            [(_, i), (_, j)] if i == j && *i == Interval::ALL => SolutionSet::All,
            [(_, i), (_, j)] if i == j => match ray_of(i) {
                Some((dir, bound)) => SolutionSet::Ray { dir, bound, parities: Sign::BOTH.to_vec() },
                None => SolutionSet::Union { pieces: flat },
            },
            _ => SolutionSet::Union { pieces: flat },
        }
    }
}

impl fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps = |v: &[Sign]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        match self {
            SolutionSet::Empty => f.write_str("empty"),
            SolutionSet::All => f.write_str("all"),
            SolutionSet::Point { value } => write!(f, "{value}"),
            SolutionSet::Ray { dir: RayDir::Ge, bound, parities } => write!(f, "x >= {bound} [{}]", ps(parities)),
            SolutionSet::Ray { dir: RayDir::Le, bound, parities } => write!(f, "x <= {bound} [{}]", ps(parities)),
            SolutionSet::Union { pieces } => {
                let parts: Vec<String> = pieces
                    .iter()
                    .map(|(s, i)| {
                        let lo = i.lo.map_or("-inf".into(), |x| x.to_string());
                        let hi = i.hi.map_or("inf".into(), |x| x.to_string());
                        format!("{s}:[{lo}, {hi}]")
                    })
                    .collect();
                f.write_str(&parts.join(" u "))
            }
        }
    }
}

fn ray_of(i: &Interval) -> Option<(RayDir, Amplitude)> {
    match (i.lo, i.hi) {
        (Some(l), None) => Some((RayDir::Ge, l)),
        (None, Some(h)) => Some((RayDir::Le, h)),
        _ => None,
    }
}

fn cmp_lo(a: Option<Amplitude>, b: Option<Amplitude>) -> std::cmp::Ordering {
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, _) => std::cmp::Ordering::Less,
        (_, None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(&y),
    }
}

fn overlaps(a: &Interval, b: &Interval) -> bool {
    match (a.hi, b.lo) {
        (None, _) | (_, None) => true,
        (Some(h), Some(l)) => l <= h,
    }
}

fn max_hi(a: Option<Amplitude>, b: Option<Amplitude>) -> Option<Amplitude> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

/// `max_i (slope_i·x + c_i)`; an empty list is `-inf`.
#[derive(Clone, Debug, Default)]
struct Convex(Vec<(i64, Amplitude)>);

impl Convex {
    fn at(&self, x: Amplitude) -> Option<(Amplitude, i64)> {
        self.0.iter().map(|&(s, c)| (x * s + c, s)).max()
    }
}

/// Solution set of `lhs(x) = rhs(x)` as closed intervals.
fn solve_convex(lhs: &Convex, rhs: &Convex) -> Vec<Interval> {
    match (lhs.0.is_empty(), rhs.0.is_empty()) {
        (true, true) => return vec![Interval::ALL],
        (true, false) | (false, true) => return vec![],
        _ => {}
    }
    let all: Vec<(i64, Amplitude)> = lhs.0.iter().chain(rhs.0.iter()).copied().collect();
    let mut bps: Vec<Amplitude> = Vec::new();
    for (i, &(si, ci)) in all.iter().enumerate() {
        for &(sj, cj) in &all[i + 1..] {
            if si != sj {
                bps.push((cj - ci).div_int(si - sj));
            }
        }
    }
    bps.sort();
    bps.dedup();

    let equal_at = |x: Amplitude| lhs.at(x).map(|v| v.0) == rhs.at(x).map(|v| v.0);
    // An open piece is a solution iff both sides agree in value and slope at
    // an interior sample point.
    let piece_solves = |x: Amplitude| lhs.at(x) == rhs.at(x);

    let mut out: Vec<Interval> = Vec::new();
    let push = |i: Interval, out: &mut Vec<Interval>| match out.last_mut() {
        Some(last) if overlaps(last, &i) => last.hi = max_hi(last.hi, i.hi),
        _ => out.push(i),
    };
    if bps.is_empty() {
        if piece_solves(Amplitude::ZERO) {
            push(Interval::ALL, &mut out);
        }
        return out;
    }
    let first = bps[0];
    if piece_solves(first - Amplitude::int(1)) {
        push(Interval { lo: None, hi: Some(first) }, &mut out);
    }
    for (k, &b) in bps.iter().enumerate() {
        if equal_at(b) {
            push(Interval::point(b), &mut out);
        }
        match bps.get(k + 1) {
            Some(&nb) => {
                if piece_solves((b + nb).half()) {
                    push(Interval { lo: Some(b), hi: Some(nb) }, &mut out);
                }
            }
            None => {
                if piece_solves(b + Amplitude::int(1)) {
                    push(Interval { lo: Some(b), hi: None }, &mut out);
                }
            }
        }
    }
    out
}

/// Solve `eq` at index `m` for slot `unknown`, the other two slots being known.
/// The value in the unknown slot of `vals` is ignored.
pub fn brute_solve(eq: Equation, p: &Params, m: i64, vals: [ParityValue; 3], unknown: usize) -> SolutionSet {
    let (l, r) = eq.sides();
    let amps = vals.map(|v| v.amp);
    let mut pieces = Vec::new();
    for s in Sign::BOTH {
        let mut signs = vals.map(|v| v.sign);
        signs[unknown] = s;
        let build = |terms: &[Term]| {
            Convex(
                terms
                    .iter()
                    .filter(|t| !t.guard(signs).is_neg_inf())
                    .map(|t| (t.coef[unknown], t.constant(p, m, amps, Some(unknown))))
                    .collect(),
            )
        };
        for i in solve_convex(&build(l), &build(r)) {
            pieces.push((s, i));
        }
    }
    SolutionSet::Union { pieces }.normalized()
}

fn placeholder() -> ParityValue {
    ParityValue::plus(Amplitude::ZERO)
}

/// All `Z[m+1]` solving the single equation at `m`.
pub fn brute_solve_single(p: &Params, m: i64, prev: ParityValue, cur: ParityValue) -> SolutionSet {
    brute_solve(Equation::Single, p, m, [prev, cur, placeholder()], 2)
}

/// All `Z[m-1]` solving the single equation at `m`.
pub fn brute_solve_single_back(p: &Params, m: i64, cur: ParityValue, next: ParityValue) -> SolutionSet {
    brute_solve(Equation::Single, p, m, [placeholder(), cur, next], 0)
}

/// All `Y[m+1]` solving the first simultaneous equation at `m`.
pub fn brute_solve_y_next(p: &Params, m: i64, z: ParityValue, y: ParityValue) -> SolutionSet {
    brute_solve(Equation::Yyz, p, m, [z, y, placeholder()], 2)
}

/// All `Y[m]` solving the first simultaneous equation at `m`, given `Z[m]` and `Y[m+1]`.
pub fn brute_solve_y_prev(p: &Params, m: i64, z: ParityValue, y_next: ParityValue) -> SolutionSet {
    brute_solve(Equation::Yyz, p, m, [z, placeholder(), y_next], 1)
}

/// All `Z[m+1]` solving the second simultaneous equation at `m`.
pub fn brute_solve_z_next(p: &Params, m: i64, y_next: ParityValue, z: ParityValue) -> SolutionSet {
    brute_solve(Equation::Yzz, p, m, [y_next, z, placeholder()], 2)
}

/// All `Z[m]` solving the second simultaneous equation at `m`, given `Y[m+1]` and `Z[m+1]`.
pub fn brute_solve_z_prev(p: &Params, m: i64, y_next: ParityValue, z_next: ParityValue) -> SolutionSet {
    brute_solve(Equation::Yzz, p, m, [y_next, placeholder(), z_next], 1)
}
