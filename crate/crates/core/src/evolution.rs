//! Closed-form steppers and the trajectory runner.
//!
//! Simultaneous system, forward from site `m`:
//! `Y[m+1] = A + 2mQ - max(mQ - Z[m], 0) - Y[m]` unless `(ζ, Z)[m] = (+1, mQ)`,
//! then `Z[m+1] = -Z[m] + max(Y[m+1], 0)` unless `(η, Y)[m+1] = (+1, 0)`.
//! Backward runs the same relations the other way round.
//!
//! Single equation, forward from `(Z[m-1], Z[m])`: with
//! `s = Z[m-1] + Z[m]`, `u = mQ - Z[m]` and
//! `Z~ = A + 2mQ - max(s, 0) - max(u, 0)`, the amplitude is
//! `Z[m+1] = -Z[m] + max(Z~, 0)` and the parity follows from the signs of
//! `u`, `s` and `Z~` per pair `(ζ[m-1], ζ[m])`. Backward swaps `m-1` and `m+1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equations::{Interval, Params, RayDir, SolutionSet, State};
use crate::trajectory::{Row, Termination, Trajectory};
use crate::tropical::{Amplitude, MaxPlus, ParityValue, Sign};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Variable {
    Y,
    Z,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Y => "Y",
            Variable::Z => "Z",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepOutcome<T> {
    Unique(T),
    /// The equation holds for every value in `constraint`.
    Indefinite {
        constraint: SolutionSet,
        var: Variable,
        index: i64,
    },
}

impl<T> StepOutcome<T> {
    pub fn unique(self) -> Option<T> {
        match self {
            StepOutcome::Unique(v) => Some(v),
            StepOutcome::Indefinite { .. } => None,
        }
    }

    fn map<U>(self, f: impl FnOnce(T) -> U) -> StepOutcome<U> {
        match self {
            StepOutcome::Unique(v) => StepOutcome::Unique(f(v)),
            StepOutcome::Indefinite { constraint, var, index } => StepOutcome::Indefinite { constraint, var, index },
        }
    }
}

/// `Y[m+1]` from `Z[m]` and `Y[m]`.
pub fn step_y_forward(p: &Params, m: i64, z: ParityValue, y: ParityValue) -> StepOutcome<ParityValue> {
    y_across(p, m, z, y, m + 1)
}

/// `Y[m]` from `Z[m]` and `Y[m+1]`.
pub fn step_y_backward(p: &Params, m: i64, z: ParityValue, y_next: ParityValue) -> StepOutcome<ParityValue> {
    y_across(p, m, z, y_next, m)
}

fn y_across(p: &Params, m: i64, z: ParityValue, y_known: ParityValue, index: i64) -> StepOutcome<ParityValue> {
    let mq = p.mq(m);
    if z.sign == Sign::Plus && z.amp == mq {
        return StepOutcome::Indefinite {
            constraint: SolutionSet::ray(RayDir::Ge, p.w(m) - y_known.amp, &Sign::BOTH),
            var: Variable::Y,
            index,
        };
    }
    let amp = p.w(m) - (mq - z.amp).pos() - y_known.amp;
    let prod = if z.amp < mq { z.sign } else { Sign::Minus };
    StepOutcome::Unique(ParityValue::new(prod * y_known.sign, amp))
}

/// `Z[m+1]` from `Y[m+1]` and `Z[m]`.
pub fn step_z_forward(m: i64, y_next: ParityValue, z: ParityValue) -> StepOutcome<ParityValue> {
    z_across(y_next, z, m + 1)
}

/// `Z[m]` from `Y[m+1]` and `Z[m+1]`.
pub fn step_z_backward(m: i64, y_next: ParityValue, z_next: ParityValue) -> StepOutcome<ParityValue> {
    z_across(y_next, z_next, m)
}

fn z_across(y: ParityValue, z_known: ParityValue, index: i64) -> StepOutcome<ParityValue> {
    if y.sign == Sign::Plus && y.amp.is_zero() {
        return StepOutcome::Indefinite {
            constraint: SolutionSet::ray(RayDir::Le, -z_known.amp, &Sign::BOTH),
            var: Variable::Z,
            index,
        };
    }
    let amp = -z_known.amp + y.amp.pos();
    let prod = if y.amp > Amplitude::ZERO { y.sign } else { Sign::Minus };
    StepOutcome::Unique(ParityValue::new(prod * z_known.sign, amp))
}

/// The state at `m + 1`.
pub fn step_forward_simul(p: &Params, s: &State) -> StepOutcome<State> {
    let y1 = match step_y_forward(p, s.m, s.z, s.y) {
        StepOutcome::Unique(v) => v,
        other => return other.map(|_| unreachable!()),
    };
    step_z_forward(s.m, y1, s.z).map(|z1| State { m: s.m + 1, z: z1, y: y1 })
}

/// The state at `m - 1`.
pub fn step_backward_simul(p: &Params, s: &State) -> StepOutcome<State> {
    let m = s.m - 1;
    let z0 = match step_z_backward(m, s.y, s.z) {
        StepOutcome::Unique(v) => v,
        other => return other.map(|_| unreachable!()),
    };
    step_y_backward(p, m, z0, s.y).map(|y0| State { m, z: z0, y: y0 })
}

/// `Z[m+1]` from `Z[m-1]` and `Z[m]` via the single equation.
pub fn step_forward_single(p: &Params, m: i64, prev: ParityValue, cur: ParityValue) -> StepOutcome<ParityValue> {
    single_across(p, m, prev, cur, m + 1)
}

/// `Z[m-1]` from `Z[m]` and `Z[m+1]`.
pub fn step_backward_single(p: &Params, m: i64, cur: ParityValue, next: ParityValue) -> StepOutcome<ParityValue> {
    single_across(p, m, next, cur, m - 1)
}

fn sgn(a: Amplitude) -> i8 {
    match Sign::of(a) {
        Some(Sign::Plus) => 1,
        Some(Sign::Minus) => -1,
        None => 0,
    }
}

/// `other` is the known neighbour of `cur`; the unknown sits on the far side.
fn single_across(p: &Params, m: i64, other: ParityValue, cur: ParityValue, index: i64) -> StepOutcome<ParityValue> {
    let s = other.amp + cur.amp;
    let u = p.mq(m) - cur.amp;
    let zt = p.w(m) - s.pos() - u.pos();
    let amp = -cur.amp + zt.pos();
    let (a, b) = (other.sign, cur.sign);
    let (su, ss, sz) = (sgn(u), sgn(s), sgn(zt));
    let with_zt = || if sz > 0 { b } else { -b };
    let sign = match (a, b) {
        (Sign::Plus, Sign::Plus) if su > 0 && sz != 0 => Some(with_zt()),
        (Sign::Plus, Sign::Plus) if su < 0 => Some(-b),
        (Sign::Plus, Sign::Minus) if ss > 0 && sz != 0 => Some(with_zt()),
        (Sign::Plus, Sign::Minus) if ss < 0 => Some(-b),
        (Sign::Minus, Sign::Plus) if su * ss < 0 && sz != 0 => Some(with_zt()),
        (Sign::Minus, Sign::Plus) if su * ss > 0 => Some(-b),
        (Sign::Minus, Sign::Minus) => Some(-b),
        _ => None,
    };
    match sign {
        Some(sign) => StepOutcome::Unique(ParityValue::new(sign, amp)),
        None => StepOutcome::Indefinite {
            constraint: single_constraint(p.w(m), s, u, a, b).shift(-cur.amp),
            var: Variable::Z,
            index,
        },
    }
}

/// With `v = Z[m±1] + Z[m]`, each parity of the unknown reduces the single
/// equation to `max(v + αL, βL) = max(v + αR, βR)`.
fn single_constraint(w: Amplitude, s: Amplitude, u: Amplitude, a: Sign, b: Sign) -> SolutionSet {
    let pick = |on: bool, x: Amplitude| if on { MaxPlus::Fin(x) } else { MaxPlus::NegInf };
    let su = s + u;
    let zero = Amplitude::ZERO;
    let beta_l = pick(a == Sign::Plus, s)
        .max(pick(b == Sign::Plus, zero))
        .max(pick(b == Sign::Plus, w))
        .max(pick(a * b == Sign::Minus, su));
    let beta_r = pick(a == Sign::Minus, s)
        .max(pick(b == Sign::Minus, zero))
        .max(pick(b == Sign::Minus, w))
        .max(pick(a * b == Sign::Plus, su))
        .max(MaxPlus::Fin(u));
    let mut out = SolutionSet::Empty;
    for sigma in Sign::BOTH {
        let alpha = |flip: Sign| {
            let g = |t: Sign| t * flip == Sign::Plus;
            pick(g(sigma * a * b), s)
                .max(pick(g(sigma), zero))
                .max(pick(g(-(sigma * a)), su))
                .max(pick(g(-(sigma * b)), u))
        };
        let set = two_term(alpha(Sign::Plus), beta_l, alpha(Sign::Minus), beta_r);
        let pieces = set.into_iter().map(|i| (sigma, i)).collect();
        out = out.union(&SolutionSet::Union { pieces });
    }
    out
}

/// Solve `max(v + a1, b1) = max(v + a2, b2)` for `v`.
fn two_term(a1: MaxPlus, b1: MaxPlus, a2: MaxPlus, b2: MaxPlus) -> Option<Interval> {
    use MaxPlus::{Fin, NegInf};
    let ray_le = |x| Some(Interval { lo: None, hi: Some(x) });
    match (a1, a2) {
        (NegInf, NegInf) => (b1 == b2).then_some(Interval::ALL),
        (NegInf, Fin(_)) => two_term(a2, b2, a1, b1),
        (Fin(a1), NegInf) => match (b1, b2) {
            (_, NegInf) => None,
            (Fin(b1), Fin(b2)) if b1 > b2 => None,
            (Fin(b1), Fin(b2)) if b1 == b2 => ray_le(b2 - a1),
            (_, Fin(b2)) => Some(Interval::point(b2 - a1)),
        },
        (Fin(x), Fin(y)) if x == y => {
            if b1 == b2 {
                Some(Interval::ALL)
            } else {
                match b1.max(b2) {
                    Fin(b) => Some(Interval { lo: Some(b - x), hi: None }),
                    NegInf => unreachable!(),
                }
            }
        }
        (Fin(x), Fin(y)) if x < y => two_term(a2, b2, a1, b1),
        (Fin(a1), Fin(_)) => match (b1, b2) {
            (NegInf, NegInf) => None,
            _ if b1 == b2 => ray_le(b1.finite().unwrap() - a1),
            (_, Fin(b2)) if MaxPlus::Fin(b2) > b1 => Some(Interval::point(b2 - a1)),
            _ => None,
        },
    }
}

impl SolutionSet {
    /// Translate every amplitude by `d`.
    pub fn shift(&self, d: Amplitude) -> SolutionSet {
        let mv = |i: Interval| Interval { lo: i.lo.map(|x| x + d), hi: i.hi.map(|x| x + d) };
        match self {
            SolutionSet::Empty | SolutionSet::All => self.clone(),
            SolutionSet::Point { value } => SolutionSet::Point { value: ParityValue::new(value.sign, value.amp + d) },
            SolutionSet::Ray { dir, bound, parities } => {
                SolutionSet::Ray { dir: *dir, bound: *bound + d, parities: parities.clone() }
            }
            SolutionSet::Union { pieces } => {
                SolutionSet::Union { pieces: pieces.iter().map(|&(s, i)| (s, mv(i))).collect() }
            }
        }
    }
}

/// `(η, Y)[m] = (ζ[m-1]ζ[m], Z[m-1] + Z[m])` when the sum is positive.
pub fn y_from_z(prev: ParityValue, cur: ParityValue) -> Option<ParityValue> {
    let sum = prev.amp + cur.amp;
    (sum > Amplitude::ZERO).then(|| ParityValue::new(prev.sign * cur.sign, sum))
}

/// Run the simultaneous system `fwd` steps forward and `bwd` steps backward.
pub fn evolve_simul(p: &Params, seed: State, fwd: usize, bwd: usize) -> Trajectory {
    let mut tr = Trajectory::new(*p);
    tr.put_state(&seed);
    let mut cur = seed;
    tr.forward = Termination::Horizon;
    for _ in 0..fwd {
        match step_forward_simul(p, &cur) {
            StepOutcome::Unique(next) => {
                tr.put_state(&next);
                cur = next;
            }
            StepOutcome::Indefinite { var, index, constraint } => {
                if var == Variable::Z {
                    // Y[m+1] was determined before Z[m+1] stalled.
                    if let StepOutcome::Unique(y) = step_y_forward(p, cur.m, cur.z, cur.y) {
                        tr.row_mut(index).y = Some(y);
                    }
                }
                tr.forward = Termination::Indefinite { index, var, constraint };
                break;
            }
        }
    }
    let mut cur = seed;
    tr.backward = Termination::Horizon;
    for _ in 0..bwd {
        match step_backward_simul(p, &cur) {
            StepOutcome::Unique(prev) => {
                tr.put_state(&prev);
                cur = prev;
            }
            StepOutcome::Indefinite { var, index, constraint } => {
                if var == Variable::Y {
                    if let StepOutcome::Unique(z) = step_z_backward(cur.m - 1, cur.y, cur.z) {
                        tr.row_mut(index).z = Some(z);
                    }
                }
                tr.backward = Termination::Indefinite { index, var, constraint };
                break;
            }
        }
    }
    tr
}

/// Run the single equation from `(Z[m-1], Z[m])`. `Y` is filled wherever it
/// can be read off two consecutive `Z`.
pub fn evolve_single(p: &Params, m: i64, prev: ParityValue, cur: ParityValue, fwd: usize, bwd: usize) -> Trajectory {
    let mut tr = Trajectory::new(*p);
    tr.meta.insert("system".into(), "single".into());
    tr.row_mut(m - 1).z = Some(prev);
    tr.row_mut(m).z = Some(cur);
    tr.forward = Termination::Horizon;
    let (mut a, mut b, mut k) = (prev, cur, m);
    for _ in 0..fwd {
        match step_forward_single(p, k, a, b) {
            StepOutcome::Unique(c) => {
                tr.row_mut(k + 1).z = Some(c);
                (a, b, k) = (b, c, k + 1);
            }
            StepOutcome::Indefinite { var, index, constraint } => {
                tr.forward = Termination::Indefinite { index, var, constraint };
                break;
            }
        }
    }
    tr.backward = Termination::Horizon;
    let (mut b, mut c, mut k) = (prev, cur, m - 1);
    for _ in 0..bwd {
        match step_backward_single(p, k, b, c) {
            StepOutcome::Unique(a) => {
                tr.row_mut(k - 1).z = Some(a);
                (b, c, k) = (a, b, k - 1);
            }
            StepOutcome::Indefinite { var, index, constraint } => {
                tr.backward = Termination::Indefinite { index, var, constraint };
                break;
            }
        }
    }
    let ms: Vec<i64> = tr.rows.keys().copied().collect();
    for m in ms {
        let prev = tr.rows.get(&(m - 1)).and_then(|r| r.z);
        let cur = tr.rows.get(&m).and_then(|r| r.z);
        if let (Some(a), Some(b)) = (prev, cur) {
            if let Some(y) = y_from_z(a, b) {
                tr.row_mut(m).y = Some(y);
            }
        }
    }
    tr
}

impl Trajectory {
    fn put_state(&mut self, s: &State) {
        self.rows.insert(s.m, Row { m: s.m, z: Some(s.z), y: Some(s.y) });
    }
}
