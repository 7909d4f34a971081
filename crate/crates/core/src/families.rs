//! The six closed-form solution families.
//!
//! `++` and `--` are the linear 2- and 3-periodic solutions; `-A`, `-B`, `+A`
//! and `+B` grow quadratically inside a window of `K + 1` periods. Every family
//! can be evaluated at any `m`; [`generate`] restricts to the window on which
//! the family is a solution, and [`validate_window`] checks the sign
//! conditions that make it one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equations::Params;
use crate::trajectory::Trajectory;
use crate::tropical::{Amplitude, ParityValue, Sign};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "--")]
    MinusMinus,
    #[serde(rename = "-A")]
    MinusA,
    #[serde(rename = "-B")]
    MinusB,
    #[serde(rename = "+A")]
    PlusA,
    #[serde(rename = "+B")]
    PlusB,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::PlusPlus,
        FamilyKind::MinusMinus,
        FamilyKind::MinusA,
        FamilyKind::MinusB,
        FamilyKind::PlusA,
        FamilyKind::PlusB,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::PlusPlus => "++",
            FamilyKind::MinusMinus => "--",
            FamilyKind::MinusA => "-A",
            FamilyKind::MinusB => "-B",
            FamilyKind::PlusA => "+A",
            FamilyKind::PlusB => "+B",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family `{s}`")))
    }
}

/// Shared parameters of the four windowed families: `K` periods after `m'`,
/// constants `C'`, `D'` and parities `η`, `ζ`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Windowed {
    pub m_prime: i64,
    pub k: i64,
    pub c: Amplitude,
    pub d: Amplitude,
    pub eta: Sign,
    pub zeta: Sign,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Family {
    #[serde(rename = "++")]
    PlusPlus { m_prime: i64, d1: Amplitude, d2: Amplitude, eta: Sign, zeta: Sign },
    /// `c` holds `c[m'-2], c[m'-1], c[m']`, which must sum to zero.
    #[serde(rename = "--")]
    MinusMinus { m_prime: i64, c: [Amplitude; 3], eta: Sign, zeta: Sign },
    #[serde(rename = "-A")]
    MinusA(Windowed),
    #[serde(rename = "-B")]
    MinusB(Windowed),
    #[serde(rename = "+A")]
    PlusA(Windowed),
    #[serde(rename = "+B")]
    PlusB(Windowed),
}

fn pv(s: Sign, a: Amplitude) -> ParityValue {
    ParityValue::new(s, a)
}

impl Family {
    pub fn minus_minus(m_prime: i64, c: [Amplitude; 3], eta: Sign, zeta: Sign) -> Result<Family> {
        if !(c[0] + c[1] + c[2]).is_zero() {
            return Err(Error::Params("c[m'-2] + c[m'-1] + c[m'] must vanish".into()));
        }
        Ok(Family::MinusMinus { m_prime, c, eta, zeta })
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::PlusPlus { .. } => FamilyKind::PlusPlus,
            Family::MinusMinus { .. } => FamilyKind::MinusMinus,
            Family::MinusA(_) => FamilyKind::MinusA,
            Family::MinusB(_) => FamilyKind::MinusB,
            Family::PlusA(_) => FamilyKind::PlusA,
            Family::PlusB(_) => FamilyKind::PlusB,
        }
    }

    pub fn m_prime(&self) -> i64 {
        match self {
            Family::PlusPlus { m_prime, .. } | Family::MinusMinus { m_prime, .. } => *m_prime,
            Family::MinusA(w) | Family::MinusB(w) | Family::PlusA(w) | Family::PlusB(w) => w.m_prime,
        }
    }

    /// Closed-form `(ζ, Z)` at any `m`.
    pub fn z(&self, p: &Params, m: i64) -> ParityValue {
        let q = p.q;
        match *self {
            Family::PlusPlus { m_prime, d1, zeta, .. } => {
                let s = Sign::alt(m - m_prime);
                pv(s * zeta, d1 * s.to_i64())
            }
            Family::MinusMinus { m_prime, c, eta, zeta } => {
                let r = (m_prime - m).rem_euclid(3);
                let sign = [zeta, zeta * eta, eta][r as usize];
                pv(sign, (q * m + p.a).third() + minus_minus_c(m_prime, &c, m))
            }
            Family::MinusA(w) => {
                let (k, r) = split(m - w.m_prime, 3);
                let alt = w.zeta * (-w.eta).pow(k);
                match r {
                    0 => pv(alt, -(q * (k * k)) - w.c - w.d * k),
                    1 => pv(w.eta, q * (w.m_prime + k) + p.a - w.d),
                    _ => pv(w.eta * alt, q * ((k + 1) * (k + 1)) + w.c + w.d * (k + 1)),
                }
            }
            Family::MinusB(w) => {
                let (k, r) = split(m - w.m_prime, 3);
                let alt = (-w.zeta).pow(k);
                match r {
                    0 => pv(w.zeta, q * (w.m_prime + k) + w.d),
                    1 => pv(-(w.eta * w.zeta) * alt, q * (k * (k + 2)) - w.d * (k + 1) + w.c),
                    _ => pv(-w.eta * alt, q * (1 - k * k) + p.a + w.d * k - w.c),
                }
            }
            Family::PlusA(w) => {
                let (_, r) = split(m - w.m_prime, 2);
                match r {
                    0 => pv(w.zeta, -w.d),
                    _ => pv(-w.zeta, w.d),
                }
            }
            Family::PlusB(w) => {
                let (k, r) = split(m - w.m_prime, 2);
                let alt = w.zeta * (-w.eta).pow(k);
                match r {
                    0 => pv(alt, q * (k * (k + 1)) + w.c + w.d * k),
                    _ => pv(-alt, -(q * (k * (k + 1))) - w.c - w.d * k),
                }
            }
        }
    }

    /// Closed-form `(η, Y)` at any `m`.
    pub fn y(&self, p: &Params, m: i64) -> ParityValue {
        let q = p.q;
        match *self {
            Family::PlusPlus { m_prime, d2, eta, .. } => {
                let s = Sign::alt(m - m_prime);
                pv(s * eta, (q * (2 * m - 1) + p.a).half() + d2 * s.to_i64())
            }
            Family::MinusMinus { m_prime, c, eta, zeta } => {
                let r = (m_prime - m).rem_euclid(3);
                let sign = [eta, zeta, zeta * eta][r as usize];
                pv(sign, (q * (2 * m - 1) + p.a * 2).third() - minus_minus_c(m_prime, &c, m + 1))
            }
            Family::MinusA(w) => {
                let (k, r) = split(m - w.m_prime, 3);
                let alt = w.zeta * (-w.eta).pow(k);
                let mp = w.m_prime;
                match r {
                    0 => pv(w.eta, q * (2 * k) + w.d),
                    1 => pv(w.eta * alt, q * (mp - k * k + k) + p.a - w.c - w.d * (k + 1)),
                    _ => pv(alt, q * (mp + k * k + 3 * k + 1) + p.a + w.c + w.d * k),
                }
            }
            Family::MinusB(w) => {
                let (k, r) = split(m - w.m_prime, 3);
                let mp = w.m_prime;
                match r {
                    // Y[m' + 3k] is the "+3" row of period k - 1.
                    0 => pv(w.eta * (-w.zeta).pow(k), q * (mp - k * (k - 3)) + p.a + w.d * k - w.c),
                    1 => pv(-w.eta * (-w.zeta).pow(k), q * (mp + k * (k + 3)) - w.d * k + w.c),
                    _ => pv(w.zeta, q * (2 * k + 1) + p.a - w.d),
                }
            }
            Family::PlusA(w) => {
                let (k, r) = split(m - w.m_prime, 2);
                let alt = w.eta * (-w.zeta).pow(k);
                let mp = w.m_prime;
                match r {
                    0 => pv(alt, q * (k * (mp + k + 1)) + w.d * k + w.c),
                    _ => pv(w.zeta * alt, -(q * ((k - 1) * (mp + k))) + p.a - w.d * (k + 1) - w.c),
                }
            }
            Family::PlusB(w) => {
                let (k, r) = split(m - w.m_prime, 2);
                match r {
                    0 => pv(w.eta, q * (2 * k) + w.d),
                    _ => pv(-w.eta, q * (2 * (w.m_prime + k)) + p.a - w.d),
                }
            }
        }
    }

    /// Index ranges `(z_lo, z_hi, y_lo, y_hi)` on which the family solves the
    /// system. `span` sets the length of the unbounded side for `++` and `--`.
    pub fn window(&self, span: i64) -> (i64, i64, i64, i64) {
        let mp = self.m_prime();
        match self {
            Family::PlusPlus { .. } => (mp, mp + span, mp, mp + span),
            Family::MinusMinus { .. } => (mp - span, mp, mp - span, mp),
            Family::MinusA(w) => (mp, mp + 3 * w.k + 3, mp, mp + 3 * w.k + 3),
            Family::MinusB(w) => (mp, mp + 3 * w.k + 3, mp + 1, mp + 3 * w.k + 4),
            Family::PlusA(w) | Family::PlusB(w) => (mp, mp + 2 * w.k + 2, mp, mp + 2 * w.k + 2),
        }
    }

    /// Rows on which both `Y` and `Z` obey the family's sign template.
    pub fn signed_rows(&self, span: i64) -> (i64, i64) {
        let mp = self.m_prime();
        match self {
            Family::PlusPlus { .. } => (mp, mp + span),
            Family::MinusMinus { .. } => (mp - span, mp - 1),
            Family::MinusA(w) => (mp + 1, mp + 3 * w.k + 2),
            Family::MinusB(w) => (mp + 1, mp + 3 * w.k + 3),
            Family::PlusA(w) | Family::PlusB(w) => (mp + 1, mp + 2 * w.k + 1),
        }
    }
}

/// `(k, r)` with `d = period·k + r`, `0 <= r < period`.
fn split(d: i64, period: i64) -> (i64, i64) {
    (d.div_euclid(period), d.rem_euclid(period))
}

fn minus_minus_c(m_prime: i64, c: &[Amplitude; 3], m: i64) -> Amplitude {
    // c has period 3; c[0] sits at m' - 2.
    c[(m - m_prime + 2).rem_euclid(3) as usize]
}

/// Values of `family` on its window.
pub fn generate(p: &Params, family: &Family, span: i64) -> Trajectory {
    let (zl, zh, yl, yh) = family.window(span);
    let mut t = Trajectory::new(*p);
    for m in zl..=zh {
        t.row_mut(m).z = Some(family.z(p, m));
    }
    for m in yl..=yh {
        t.row_mut(m).y = Some(family.y(p, m));
    }
    t.meta.insert("family".into(), family.kind().to_string());
    t.meta.insert("m_prime".into(), family.m_prime().to_string());
    t
}

/// Check the hypotheses under which `family` solves the system on its window.
/// On failure the error lists every violated condition.
pub fn validate_window(p: &Params, family: &Family) -> Result<()> {
    let mut bad: Vec<String> = Vec::new();
    let q = p.q;
    let mut need = |ok: bool, what: String| {
        if !ok {
            bad.push(what);
        }
    };
    match *family {
        Family::PlusPlus { m_prime, d1, d2, .. } => {
            let mq = q * m_prime;
            need(mq < d1.min(-d1 - q), "m'Q < min(d1, -d1-Q)".into());
            need(mq * 2 < -q - p.a + (d2 * 2).min(q * 2 - d2 * 2), "2m'Q < -Q-A+min(2d2, 2Q-2d2)".into());
        }
        Family::MinusMinus { m_prime, c, .. } => {
            let cc = |m: i64| minus_minus_c(m_prime, &c, m) * 3;
            let two = q * (2 * m_prime);
            need((c[0] + c[1] + c[2]).is_zero(), "c[m'-2]+c[m'-1]+c[m'] = 0".into());
            let r1 = (cc(m_prime + 1)).max(cc(m_prime) + q * 2).max(cc(m_prime - 1) + q * 4);
            need(two > q - p.a * 2 + r1, "2m'Q > Q-2A+max(3c[m'+1], 3c[m']+2Q, 3c[m'-1]+4Q)".into());
            let r2 = (cc(m_prime - 1)).max(cc(m_prime + 1) + q * 2).max(cc(m_prime) + q * 4);
            need(two > q * 2 + p.a + r2, "2m'Q > 2Q+A+max(3c[m'-1], 3c[m'+1]+2Q, 3c[m']+4Q)".into());
        }
        Family::MinusA(w) => {
            let mp = w.m_prime;
            for m in mp..=mp + 3 * w.k + 2 {
                need(family.z(p, m).amp < q * m, format!("Z[{m}] < {m}Q"));
            }
            for k in 0..=w.k {
                let b = mp + 3 * k;
                need(family.y(p, b + 1).amp > Amplitude::ZERO, format!("Y[{}] > 0", b + 1));
                need(family.y(p, b + 2).amp > Amplitude::ZERO, format!("Y[{}] > 0", b + 2));
                need(family.y(p, b + 3).amp < Amplitude::ZERO, format!("Y[{}] < 0", b + 3));
            }
        }
        Family::MinusB(w) => {
            let mp = w.m_prime;
            for m in mp + 1..=mp + 3 * w.k + 3 {
                need(family.y(p, m).amp > Amplitude::ZERO, format!("Y[{m}] > 0"));
            }
            for k in 0..=w.k {
                let b = mp + 3 * k;
                need(family.z(p, b + 1).amp < q * (b + 1), format!("Z[{0}] < {0}Q", b + 1));
                need(family.z(p, b + 2).amp < q * (b + 2), format!("Z[{0}] < {0}Q", b + 2));
                need(family.z(p, b + 3).amp > q * (b + 3), format!("Z[{0}] > {0}Q", b + 3));
            }
        }
        Family::PlusA(w) => {
            let mp = w.m_prime;
            for k in 0..=w.k {
                let b = mp + 2 * k;
                need(family.z(p, b).amp < q * b, format!("Z[{b}] < {b}Q"));
                need(family.z(p, b + 1).amp > q * (b + 1), format!("Z[{0}] > {0}Q", b + 1));
            }
            for m in mp + 1..=mp + 2 * w.k + 2 {
                need(family.y(p, m).amp < Amplitude::ZERO, format!("Y[{m}] < 0"));
            }
        }
        Family::PlusB(w) => {
            let mp = w.m_prime;
            for m in mp..=mp + 2 * w.k + 1 {
                need(family.z(p, m).amp > q * m, format!("Z[{m}] > {m}Q"));
            }
            for k in 0..=w.k {
                let b = mp + 2 * k;
                need(family.y(p, b + 1).amp < Amplitude::ZERO, format!("Y[{}] < 0", b + 1));
                need(family.y(p, b + 2).amp > Amplitude::ZERO, format!("Y[{}] > 0", b + 2));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Window(bad))
    }
}
