//! Exact max-plus scalars.
//!
//! An [`Amplitude`] is an element of `Q + Q·ε`, ordered lexicographically, with
//! `ε` a formal positive infinitesimal. Plain rationals are amplitudes with a
//! zero `ε` part. [`MaxPlus`] adjoins the max-plus zero `-inf`.
//!
//! Text forms: `7/2`, `-32-1E` (that is `-32 - ε`), `0+1/8E`, `-inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

pub type Rational = Ratio<i128>;

/// `re + eps·ε`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Amplitude {
    re: Rational,
    eps: Rational,
}

impl Amplitude {
    pub const ZERO: Amplitude = Amplitude { re: Ratio::new_raw(0, 1), eps: Ratio::new_raw(0, 1) };

    pub fn new(re: Rational, eps: Rational) -> Self {
        Amplitude { re, eps }
    }

    pub fn int(n: i64) -> Self {
        Amplitude::new(Rational::from_integer(n as i128), Rational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Amplitude::new(Rational::new(num as i128, den as i128), Rational::zero())
    }

    /// The infinitesimal `ε` itself.
    pub fn epsilon() -> Self {
        Amplitude::new(Rational::zero(), Rational::from_integer(1))
    }

    pub fn re(&self) -> Rational {
        self.re
    }

    pub fn eps(&self) -> Rational {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }

    /// True when there is no `ε` part.
    pub fn is_standard(&self) -> bool {
        self.eps.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.cmp(&Amplitude::ZERO)
    }

    pub fn abs(self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self
        }
    }

    /// Replace `ε` by the rational `at`.
    pub fn eval(&self, at: Rational) -> Rational {
        self.re + self.eps * at
    }

    /// Same as [`eval`](Self::eval) but keeps the result an amplitude.
    pub fn substitute(&self, at: Rational) -> Self {
        Amplitude::new(self.eval(at), Rational::zero())
    }

    pub fn scale(self, k: Rational) -> Self {
        Amplitude::new(self.re * k, self.eps * k)
    }

    pub fn div_int(self, d: i64) -> Self {
        assert!(d != 0, "division of an amplitude by zero");
        self.scale(Rational::new(1, d as i128))
    }

    pub fn half(self) -> Self {
        self.div_int(2)
    }

    pub fn third(self) -> Self {
        self.div_int(3)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    /// `max(self, 0)`.
    pub fn pos(self) -> Self {
        self.max(Amplitude::ZERO)
    }

    /// Largest absolute value of the two components, as an `f64`.
    pub fn magnitude(&self) -> f64 {
        let f = |r: Rational| (*r.numer() as f64 / *r.denom() as f64).abs();
        f(self.re).max(f(self.eps))
    }
}

impl From<i64> for Amplitude {
    fn from(n: i64) -> Self {
        Amplitude::int(n)
    }
}

impl From<Rational> for Amplitude {
    fn from(r: Rational) -> Self {
        Amplitude::new(r, Rational::zero())
    }
}

impl Add for Amplitude {
    type Output = Amplitude;
    fn add(self, o: Amplitude) -> Amplitude {
        Amplitude::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Amplitude {
    type Output = Amplitude;
    fn sub(self, o: Amplitude) -> Amplitude {
        Amplitude::new(self.re - o.re, self.eps - o.eps)
    }
}

impl AddAssign for Amplitude {
    fn add_assign(&mut self, o: Amplitude) {
        *self = *self + o;
    }
}

impl SubAssign for Amplitude {
    fn sub_assign(&mut self, o: Amplitude) {
        *self = *self - o;
    }
}

impl Neg for Amplitude {
    type Output = Amplitude;
    fn neg(self) -> Amplitude {
        Amplitude::new(-self.re, -self.eps)
    }
}

impl Mul<i64> for Amplitude {
    type Output = Amplitude;
    fn mul(self, k: i64) -> Amplitude {
        self.scale(Rational::from_integer(k as i128))
    }
}

impl Mul<Amplitude> for i64 {
    type Output = Amplitude;
    fn mul(self, a: Amplitude) -> Amplitude {
        a * self
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.re)?;
        if !self.eps.is_zero() {
            let sign = if self.eps.is_negative() { '-' } else { '+' };
            write!(f, "{}{}E", sign, self.eps.abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let body = s.strip_prefix('+').unwrap_or(s);
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    let n: i128 = n.parse().map_err(|_| bad())?;
    let d: i128 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl FromStr for Amplitude {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('E') else {
            return Ok(Amplitude::from(parse_rational(s)?));
        };
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        let (re, eps) = match split {
            Some(i) => (parse_rational(&body[..i])?, &body[i..]),
            None => (Rational::zero(), body),
        };
        let eps = match eps {
            "" | "+" => Rational::from_integer(1),
            "-" => Rational::from_integer(-1),
            e => parse_rational(e)?,
        };
        Ok(Amplitude::new(re, eps))
    }
}

impl Serialize for Amplitude {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An amplitude or the max-plus zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MaxPlus {
    NegInf,
    Fin(Amplitude),
}

impl MaxPlus {
    pub fn is_neg_inf(&self) -> bool {
        matches!(self, MaxPlus::NegInf)
    }

    pub fn finite(self) -> Option<Amplitude> {
        match self {
            MaxPlus::NegInf => None,
            MaxPlus::Fin(a) => Some(a),
        }
    }

    pub fn max(self, o: MaxPlus) -> MaxPlus {
        std::cmp::max(self, o)
    }
}

impl From<Amplitude> for MaxPlus {
    fn from(a: Amplitude) -> Self {
        MaxPlus::Fin(a)
    }
}

impl Add for MaxPlus {
    type Output = MaxPlus;
    fn add(self, o: MaxPlus) -> MaxPlus {
        match (self, o) {
            (MaxPlus::Fin(a), MaxPlus::Fin(b)) => MaxPlus::Fin(a + b),
            _ => MaxPlus::NegInf,
        }
    }
}

impl Add<Amplitude> for MaxPlus {
    type Output = MaxPlus;
    fn add(self, o: Amplitude) -> MaxPlus {
        self + MaxPlus::Fin(o)
    }
}

impl fmt::Display for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPlus::NegInf => f.write_str("-inf"),
            MaxPlus::Fin(a) => a.fmt(f),
        }
    }
}

impl FromStr for MaxPlus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "-inf" => Ok(MaxPlus::NegInf),
            t => t.parse().map(MaxPlus::Fin),
        }
    }
}

/// Max over a non-empty list. An empty list has no max-plus meaning here.
pub fn max_plus_eval<I: IntoIterator<Item = MaxPlus>>(terms: I) -> Result<MaxPlus, Error> {
    terms.into_iter().max().ok_or(Error::EmptyMax)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn from_i64(v: i64) -> Result<Sign, Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("parity must be +1 or -1, got {v}"))),
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(-1)^k`.
    pub fn alt(k: i64) -> Sign {
        if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn pow(self, k: i64) -> Sign {
        match self {
            Sign::Plus => Sign::Plus,
            Sign::Minus => Sign::alt(k),
        }
    }

    /// Sign of a nonzero amplitude.
    pub fn of(a: Amplitude) -> Option<Sign> {
        match a.signum() {
            Ordering::Greater => Some(Sign::Plus),
            Ordering::Less => Some(Sign::Minus),
            Ordering::Equal => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            o => Err(Error::Parse(format!("bad parity `{o}`"))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_i64())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Sign::from_i64(i64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `S(+1) = 0`, `S(-1) = -inf`.
pub fn s_fn(s: Sign) -> MaxPlus {
    match s {
        Sign::Plus => MaxPlus::Fin(Amplitude::ZERO),
        Sign::Minus => MaxPlus::NegInf,
    }
}

/// A parity variable paired with a finite amplitude.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ParityValue {
    pub sign: Sign,
    pub amp: Amplitude,
}

impl ParityValue {
    pub fn new(sign: Sign, amp: impl Into<Amplitude>) -> Self {
        ParityValue { sign, amp: amp.into() }
    }

    pub fn plus(amp: impl Into<Amplitude>) -> Self {
        ParityValue::new(Sign::Plus, amp)
    }

    pub fn minus(amp: impl Into<Amplitude>) -> Self {
        ParityValue::new(Sign::Minus, amp)
    }

    pub fn substitute(self, at: Rational) -> Self {
        ParityValue::new(self.sign, self.amp.substitute(at))
    }
}

impl fmt::Display for ParityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.sign, self.amp)
    }
}

impl FromStr for ParityValue {
    type Err = Error;
    /// `+1:29`, `-1:0-1/8E`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let (sign, amp) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("expected `sign:amplitude`, got `{s}`")))?;
        Ok(ParityValue::new(sign.parse()?, amp.parse::<Amplitude>()?))
    }
}
