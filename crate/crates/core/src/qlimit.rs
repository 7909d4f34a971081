//! The q-difference system whose ultradiscrete limit is the engine, iterated
//! numerically at high precision.
//!
//! With `q = exp(Q/ε)` and `a = exp(A/ε)` the simultaneous form is
//!
//! ```text
//! y[m+1] y[m] = a q^(2m) z[m] / (q^m - z[m]),    y[m+1] = z[m+1] z[m] + 1.
//! ```
//!
//! Seeding `z = ζ exp(Z/ε)`, `y = η exp(Y/ε)` from an exact trajectory and
//! iterating, `ε log|z[m]|` should approach `Z[m]` and the signs should
//! follow the parities. [`verify_limit`] measures both over a ladder of `ε`.

use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::{Deserialize, Serialize};

use crate::equations::{Params, State};
use crate::trajectory::Trajectory;
use crate::tropical::{Amplitude, Rational, Sign};
use crate::{Error, Result};

pub const DEFAULT_PRECISION_BITS: usize = 256;
/// Overrides [`DEFAULT_PRECISION_BITS`].
pub const PRECISION_ENV: &str = "PUD_PRECISION_BITS";
/// Automatic doubling stops here.
pub const MAX_PRECISION_BITS: usize = 1 << 12;

const RM: RoundingMode = RoundingMode::ToEven;
/// Bits of headroom kept when judging cancellation.
const GUARD_BITS: usize = 32;

pub fn default_precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&b: &usize| b >= 64)
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

#[derive(Clone, Debug)]
pub struct QState {
    pub m: i64,
    pub z: BigFloat,
    pub y: BigFloat,
    pub epsilon: Rational,
    pub precision_bits: usize,
}

/// Why an iteration stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum QFailure {
    /// Leading digits cancelled; more precision may help.
    Cancellation { m: i64, what: &'static str, lost_bits: usize },
    /// An exact or overflowing division.
    Singular { m: i64, what: &'static str },
}

impl fmt::Display for QFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFailure::Cancellation { m, what, lost_bits } => {
                write!(f, "{what} lost {lost_bits} bits at m = {m}; raise the precision ({PRECISION_ENV})")
            }
            QFailure::Singular { m, what } => write!(f, "{what} is zero or not finite at m = {m}"),
        }
    }
}

impl From<QFailure> for Error {
    fn from(e: QFailure) -> Error {
        Error::Numeric(e.to_string())
    }
}

fn rational_to_big(r: Rational, p: usize) -> BigFloat {
    let n = BigFloat::from_i64(*r.numer() as i64, p);
    let d = BigFloat::from_i64(*r.denom() as i64, p);
    n.div(&d, p, RM)
}

fn standard(a: Amplitude, what: &str) -> Result<Rational> {
    if a.is_standard() {
        Ok(a.re())
    } else {
        Err(Error::Params(format!("{what} = {a} has an ε part; the q-side needs plain rationals")))
    }
}

/// `sign · exp(x/ε)`.
fn lift(sign: Sign, x: Rational, eps: Rational, p: usize, cc: &mut Consts) -> BigFloat {
    let v = rational_to_big(x / eps, p).exp(p, RM, cc);
    match sign {
        Sign::Plus => v,
        Sign::Minus => v.neg(),
    }
}

/// `ε log|v|`.
pub fn tropicalize(v: &BigFloat, eps: Rational, p: usize, cc: &mut Consts) -> BigFloat {
    v.abs().ln(p, RM, cc).mul(&rational_to_big(eps, p), p, RM)
}

pub fn to_f64(v: &BigFloat) -> f64 {
    v.to_string().parse().unwrap_or(f64::NAN)
}

fn exponent(v: &BigFloat) -> i64 {
    v.exponent().map(i64::from).unwrap_or(i64::MIN)
}

/// `x - y`, refusing results where more than `p - GUARD_BITS` leading bits cancelled.
fn checked_sub(x: &BigFloat, y: &BigFloat, p: usize, m: i64, what: &'static str) -> Result<BigFloat, QFailure> {
    let d = x.sub(y, p, RM);
    if d.is_zero() || d.is_nan() || d.is_inf() {
        return Err(QFailure::Singular { m, what });
    }
    let lost = exponent(x).max(exponent(y)) - exponent(&d);
    if lost > 0 && lost as usize + GUARD_BITS >= p {
        return Err(QFailure::Cancellation { m, what, lost_bits: lost as usize });
    }
    Ok(d)
}

fn finite(v: BigFloat, m: i64, what: &'static str) -> Result<BigFloat, QFailure> {
    if v.is_nan() || v.is_inf() || v.is_zero() {
        Err(QFailure::Singular { m, what })
    } else {
        Ok(v)
    }
}

impl QState {
    /// `z = ζ exp(Z/ε)`, `y = η exp(Y/ε)` from an exact state.
    pub fn lift(s: &State, epsilon: Rational, precision_bits: usize) -> Result<QState> {
        let mut cc = consts()?;
        let p = precision_bits;
        let z = lift(s.z.sign, standard(s.z.amp, "Z")?, epsilon, p, &mut cc);
        let y = lift(s.y.sign, standard(s.y.amp, "Y")?, epsilon, p, &mut cc);
        Ok(QState { m: s.m, z, y, epsilon, precision_bits })
    }
}

fn consts() -> Result<Consts> {
    Consts::new().map_err(|e| Error::Numeric(format!("{e:?}")))
}

/// The constants `a`, `q^m` and `q^(2m)` at one `m`.
struct Lifted {
    a: BigFloat,
    qm: BigFloat,
    q2m: BigFloat,
}

fn lifted(p: &Params, m: i64, eps: Rational, bits: usize, cc: &mut Consts) -> Result<Lifted> {
    let (q, a) = (standard(p.q, "Q")?, standard(p.a, "A")?);
    let mq = q * Rational::from_integer(m as i128);
    Ok(Lifted {
        a: lift(Sign::Plus, a, eps, bits, cc),
        qm: lift(Sign::Plus, mq, eps, bits, cc),
        q2m: lift(Sign::Plus, mq + mq, eps, bits, cc),
    })
}

fn step_with(s: &QState, p: &Params, cc: &mut Consts) -> Result<Result<QState, QFailure>> {
    let bits = s.precision_bits;
    let l = lifted(p, s.m, s.epsilon, bits, cc)?;
    let m = s.m;
    Ok((|| {
        let den = checked_sub(&l.qm, &s.z, bits, m, "q^m - z[m]")?;
        let num = l.a.mul(&l.q2m, bits, RM).mul(&s.z, bits, RM);
        let y_next = finite(num.div(&den.mul(&s.y, bits, RM), bits, RM), m + 1, "y")?;
        let one = BigFloat::from_i64(1, bits);
        let z_num = checked_sub(&y_next, &one, bits, m + 1, "y[m+1] - 1")?;
        let z_next = finite(z_num.div(&s.z, bits, RM), m + 1, "z")?;
        Ok(QState { m: m + 1, z: z_next, y: y_next, ..s.clone() })
    })())
}

/// One forward step of the simultaneous system.
pub fn q_step(s: &QState, p: &Params) -> Result<QState> {
    let mut cc = consts()?;
    Ok(step_with(s, p, &mut cc)??)
}

/// `|(z[m+1] z[m] + 1)(z[m] z[m-1] + 1)(q^m - z[m]) - a q^(2m) z[m]|` relative
/// to the larger side, for three consecutive `z` ending at `m + 1`.
pub fn relation_residual(p: &Params, m: i64, z: [&BigFloat; 3], eps: Rational, bits: usize) -> Result<f64> {
    let mut cc = consts()?;
    let l = lifted(p, m, eps, bits, &mut cc)?;
    let one = BigFloat::from_i64(1, bits);
    let [zp, zm, zn] = z;
    let left = zn.mul(zm, bits, RM).add(&one, bits, RM).mul(&zm.mul(zp, bits, RM).add(&one, bits, RM), bits, RM).mul(
        &l.qm.sub(zm, bits, RM),
        bits,
        RM,
    );
    let right = l.a.mul(&l.q2m, bits, RM).mul(zm, bits, RM);
    let diff = left.sub(&right, bits, RM).abs();
    if diff.is_zero() {
        return Ok(0.0);
    }
    let scale = exponent(&left).max(exponent(&right));
    Ok((2f64).powi((exponent(&diff) - scale).clamp(-4000, 0) as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub m: i64,
    pub sign_match: bool,
    pub z_error: f64,
    pub y_error: f64,
}

/// One `ε` of the ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRun {
    pub epsilon: String,
    pub precision_bits: usize,
    pub rows: Vec<LimitRow>,
    pub max_error: f64,
    /// Set when the iteration stopped early; later rows are missing.
    pub failure: Option<String>,
}

impl LimitRun {
    pub fn signs_agree(&self) -> bool {
        self.rows.iter().all(|r| r.sign_match)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub runs: Vec<LimitRun>,
    /// `max_error` strictly decreases along the ladder.
    pub decreasing: bool,
}

impl LimitReport {
    pub fn final_max_error(&self) -> Option<f64> {
        self.runs.last().map(|r| r.max_error)
    }

    pub fn complete(&self) -> bool {
        self.runs.iter().all(|r| r.failure.is_none())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,m,sign_match,z_error,y_error\n");
        for run in &self.runs {
            for r in &run.rows {
                out.push_str(&format!("{},{},{},{:e},{:e}\n", run.epsilon, r.m, r.sign_match, r.z_error, r.y_error));
            }
        }
        out
    }
}

fn sign_of(v: &BigFloat) -> Sign {
    if v.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

fn compare(t: &Trajectory, s: &QState, cc: &mut Consts) -> Option<LimitRow> {
    let pz = t.z(s.m)?;
    let py = t.y(s.m)?;
    let bits = s.precision_bits;
    let err = |v: &BigFloat, x: Amplitude, cc: &mut Consts| {
        let e = tropicalize(v, s.epsilon, bits, cc).sub(&rational_to_big(x.re(), bits), bits, RM);
        to_f64(&e.abs())
    };
    Some(LimitRow {
        m: s.m,
        sign_match: sign_of(&s.z) == pz.sign && sign_of(&s.y) == py.sign,
        z_error: err(&s.z, pz.amp, cc),
        y_error: err(&s.y, py.amp, cc),
    })
}

fn max_error(rows: &[LimitRow]) -> f64 {
    rows.iter().map(|r| r.z_error.max(r.y_error)).fold(0.0, f64::max)
}

/// Smallest error distinguishable from rounding at `bits` for amplitudes up to 2^7.
fn resolution(bits: usize) -> f64 {
    2f64.powi((GUARD_BITS + 7) as i32 - bits as i32)
}

fn run_once(
    t: &Trajectory,
    seed: &State,
    eps: Rational,
    steps: usize,
    bits: usize,
) -> Result<(Vec<LimitRow>, Option<QFailure>)> {
    let mut cc = consts()?;
    let mut s = QState::lift(seed, eps, bits)?;
    let mut rows = Vec::new();
    for _ in 0..steps {
        s = match step_with(&s, &t.params, &mut cc)? {
            Ok(next) => next,
            Err(f) => return Ok((rows, Some(f))),
        };
        rows.extend(compare(t, &s, &mut cc));
    }
    Ok((rows, None))
}

/// Iterate from the first full state of `pud` for each `ε` and compare
/// `steps` rows. Cancellation, or an error too small to resolve at the
/// working precision, triggers a rerun at doubled precision. Other failures,
/// or running out of precision, end that run early and are reported in
/// [`LimitRun::failure`].
pub fn verify_limit(pud: &Trajectory, epsilons: &[Rational], steps: usize) -> Result<LimitReport> {
    verify_limit_at(pud, epsilons, steps, default_precision())
}

pub fn verify_limit_at(pud: &Trajectory, epsilons: &[Rational], steps: usize, bits: usize) -> Result<LimitReport> {
    let seed = pud
        .rows
        .keys()
        .find_map(|&m| pud.state(m))
        .ok_or_else(|| Error::Params("trajectory has no row with both Z and Y".into()))?;
    let mut runs = Vec::new();
    for &eps in epsilons {
        if eps <= Rational::from_integer(0) {
            return Err(Error::Params(format!("ε must be positive, got {eps}")));
        }
        let mut p = bits;
        let (rows, failure) = loop {
            let (rows, failure) = run_once(pud, &seed, eps, steps, p)?;
            let more = match failure {
                Some(QFailure::Cancellation { .. }) => true,
                Some(_) => false,
                None => max_error(&rows) < resolution(p),
            };
            if !more || p * 2 > MAX_PRECISION_BITS {
                break (rows, failure);
            }
            p *= 2;
        };
        runs.push(LimitRun {
            epsilon: eps.to_string(),
            precision_bits: p,
            max_error: max_error(&rows),
            rows,
            failure: failure.map(|f| f.to_string()),
        });
    }
    let decreasing = runs.windows(2).all(|w| w[1].max_error < w[0].max_error);
    Ok(LimitReport { runs, decreasing })
}
