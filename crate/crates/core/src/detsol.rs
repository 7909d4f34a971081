//! Ultradiscrete limits of the determinant-type solutions.
//!
//! Two catalogues: `A = (2N+1)Q` with `N >= 0` ([`gen_det_n`]) and
//! `A = (2M+1)Q` with `M < 0` ([`gen_det_m`]). For `M < 0` the table can also
//! be reached from the q-Airy data `(A', B', α, β)` through the functions
//! `γ_k`, `G_k`, `f_k` and the `h` windows ([`appendix_g`], [`appendix_z`]).
//!
//! Z rows come from the closed forms region by region; Y rows are emitted only
//! where the associated closed forms are stated and are left absent elsewhere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equations::Params;
use crate::trajectory::Trajectory;
use crate::tropical::{Amplitude, ParityValue, Rational, Sign};
use crate::{Error, Result};

fn pv(s: Sign, a: Amplitude) -> ParityValue {
    ParityValue::new(s, a)
}

/// `(k, r)` with `d = 3k + r`, `0 <= r < 3`.
fn split3(d: i64) -> (i64, i64) {
    (d.div_euclid(3), d.rem_euclid(3))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DetNParams {
    pub n: i64,
    pub q: Amplitude,
    pub m0: i64,
    pub k0: i64,
    pub c: Amplitude,
    pub chi: Sign,
}

impl DetNParams {
    pub fn new(n: i64, q: impl Into<Amplitude>, m0: i64, k0: i64, c: impl Into<Amplitude>, chi: Sign) -> Result<Self> {
        let p = DetNParams { n, q: q.into(), m0, k0, c: c.into(), chi };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let DetNParams { n, q, m0, k0, c, .. } = *self;
        if n < 0 {
            return Err(Error::Params(format!("N must be >= 0, got {n}")));
        }
        if q >= Amplitude::ZERO {
            return Err(Error::NonNegativeQ(q));
        }
        let bound = (-3 * n - 2).min(-n * (n + 1) / 2 - 1);
        if m0 > bound {
            return Err(Error::Params(format!("m0 = {m0} exceeds {bound}")));
        }
        if !(0..=n).contains(&k0) {
            return Err(Error::Params(format!("k0 = {k0} not in [0, {n}]")));
        }
        let (lo, hi) = if k0 != 0 {
            let r = n - k0;
            (-(q * m0) - q * (r * (r + 1)), -(q * m0) - q * ((r + 1) * (r + 2)))
        } else {
            (-(q * m0) - q * (n * (n + 1)), q * (m0 + 1))
        };
        if !(lo < c && c < hi) {
            return Err(Error::Params(format!("C = {c} outside ({lo}, {hi})")));
        }
        Ok(())
    }

    pub fn params(&self) -> Params {
        Params { q: self.q, a: self.q * (2 * self.n + 1) }
    }

    /// Region label and `(ζ, Z)` at `m`.
    pub fn z(&self, m: i64) -> (&'static str, ParityValue) {
        let DetNParams { n, q, m0, k0, c, chi } = *self;
        let base = m0 - 2 * n;
        let (j, r) = split3(m - base);
        let alt = chi * Sign::alt(j);
        if m < base {
            ("I", pv(Sign::Plus, q * (-m - 2 * n - 1)))
        } else if m <= m0 + n - 3 * k0 + 1 {
            let z = match r {
                0 => pv(alt, -c - q * (j * j)),
                1 => pv(Sign::Plus, q * (m0 + j + 1)),
                _ => pv(alt, c + q * ((j + 1) * (j + 1))),
            };
            ("II", z)
        } else if k0 != 0 && m == m0 + n - 3 * k0 + 2 {
            ("III", pv(Sign::Minus, q * (-m0 - n + k0 - 1)))
        } else if k0 != 0 && m <= m0 + n {
            let z = match r {
                0 => pv(Sign::Plus, q * (m0 + j)),
                1 => pv(alt, c + q * (2 * m0) + q * ((j + 1) * (j + 1))),
                _ => pv(-alt, -c - q * (2 * m0) - q * ((j + 1) * (j + 1))),
            };
            ("IV", z)
        } else if m < -2 * n {
            ("V", pv(Sign::Plus, q * m))
        } else if m <= -1 {
            ("tail", pv(Sign::Plus, q * m))
        } else {
            ("tail", pv(Sign::alt(m), Amplitude::ZERO))
        }
    }

    /// `(η, Y)` at `m` where a closed form is stated.
    pub fn y(&self, m: i64) -> Option<ParityValue> {
        let DetNParams { n, q, m0, k0, c, chi } = *self;
        let base = m0 - 2 * n;
        let (j, r) = split3(m - base);
        let alt = chi * Sign::alt(j);
        if m < base {
            return None;
        }
        // The third case of the first block runs to j = N - k0, one row past
        // the block, when k0 != 0.
        let first_hi = if k0 != 0 { m0 + n - 3 * k0 + 2 } else { m0 + n - 3 * k0 + 1 };
        if m <= first_hi {
            return Some(match r {
                0 => pv(Sign::Plus, q * (2 * j)),
                1 => pv(alt, -c + q * m0 + q * (-j * j + j + 1)),
                _ => pv(alt, c + q * m0 + q * ((j + 1) * (j + 2))),
            });
        }
        if k0 != 0 && m >= m0 + n - 3 * k0 + 3 && m <= m0 + n {
            return Some(match r {
                0 => pv(alt, -c - q * m0 - q * (j * (j - 1))),
                1 => pv(alt, c + q * (3 * m0) + q * (j * j + 3 * j + 1)),
                _ => pv(Sign::Plus, q * (2 * (j + 1))),
            });
        }
        None
    }

    /// Last index with `Z < mQ`; the next one has `Z = mQ`.
    pub fn last_below(&self) -> i64 {
        if self.k0 == 0 {
            self.m0 + self.n
        } else {
            self.m0 + self.n - 1
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AppendixData {
    pub a_prime: Amplitude,
    pub b_prime: Amplitude,
    pub alpha: Sign,
    pub beta: Sign,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DetMParams {
    pub m: i64,
    pub q: Amplitude,
    pub m0: i64,
    pub k0: i64,
    pub c: Amplitude,
    pub chi: Sign,
    pub appendix: Option<AppendixData>,
}

impl DetMParams {
    pub fn new(m: i64, q: impl Into<Amplitude>, m0: i64, k0: i64, c: impl Into<Amplitude>, chi: Sign) -> Result<Self> {
        let p = DetMParams { m, q: q.into(), m0, k0, c: c.into(), chi, appendix: None };
        p.validate(true)?;
        Ok(p)
    }

    /// Parameters from q-Airy data: `(m0, k0)` by [`find_m0_k0`],
    /// `C = B'-A'-(m0²+m0)Q` and `χ = αβ`.
    ///
    /// The `C` window is implied by the bracketing of `B'-A'`, except that
    /// `B'-A'` equal to its lower bracket with `k0 = 0` lands on the open end of
    /// the direct window; that point is accepted here.
    pub fn from_appendix(m: i64, q: impl Into<Amplitude>, data: AppendixData) -> Result<Self> {
        let q = q.into();
        let (m0, k0) = find_m0_k0(data.a_prime, data.b_prime, q, m)?;
        let p = DetMParams {
            m,
            q,
            m0,
            k0,
            c: data.b_prime - data.a_prime - q * (m0 * m0 + m0),
            chi: data.alpha * data.beta,
            appendix: Some(data),
        };
        p.validate(false)?;
        Ok(p)
    }

    fn validate(&self, c_window: bool) -> Result<()> {
        let DetMParams { m, q, m0, k0, c, .. } = *self;
        if m >= 0 {
            return Err(Error::Params(format!("M must be < 0, got {m}")));
        }
        if q >= Amplitude::ZERO {
            return Err(Error::NonNegativeQ(q));
        }
        let bound = m0_bound(m);
        if m0 > bound {
            return Err(Error::Params(format!("m0 = {m0} exceeds {bound}")));
        }
        if !(0..=-m - 1).contains(&k0) {
            return Err(Error::Params(format!("k0 = {k0} not in [0, {}]", -m - 1)));
        }
        if !c_window {
            return Ok(());
        }
        let ok = if k0 != 0 {
            let lo = -(q * m0) - q * ((m + k0 + 1) * (m + k0));
            let hi = -(q * m0) - q * ((m + k0) * (m + k0 - 1));
            lo <= c && c < hi
        } else {
            -(q * m0) - q * (m * (m + 1)) < c && c < q * (m0 + 1)
        };
        if !ok {
            return Err(Error::Params(format!("C = {c} outside the window for k0 = {k0}")));
        }
        Ok(())
    }

    pub fn params(&self) -> Params {
        Params { q: self.q, a: self.q * (2 * self.m + 1) }
    }

    /// First index of the final `(+1, (-m-2M-1)Q)` block.
    fn last_block_start(&self) -> i64 {
        if self.k0 != 0 {
            self.m0 - 2 * self.m - 1
        } else {
            self.m0 - 2 * self.m
        }
    }

    /// Region label and `(ζ, Z)` for `m <= M+1`.
    pub fn z(&self, idx: i64) -> Option<(&'static str, ParityValue)> {
        let DetMParams { m: mm, q, m0, k0, c, chi, .. } = *self;
        if idx > mm + 1 {
            return None;
        }
        let base = m0 + mm;
        // idx = base + 3j + r - 2 with r in 0..3
        let (j, r) = split3(idx - base + 2);
        let alt = chi * Sign::alt(j - 1);
        let second_hi = if k0 != 0 { m0 - 2 * mm - 3 * k0 } else { m0 - 2 * mm - 1 };
        Some(if idx <= base {
            ("i", pv(Sign::Plus, q * idx))
        } else if idx <= second_hi {
            let z = match r {
                0 => pv(Sign::Plus, q * (m0 + mm + j)),
                1 => pv(alt, c + q * (j * j + mm)),
                _ => pv(alt, -c + q * (-j * j + 2 * j + mm)),
            };
            ("ii", z)
        } else if idx < self.last_block_start() {
            let z = match r {
                0 => pv(alt, c + q * (2 * m0 + j * j + mm)),
                1 => pv(alt, -c + q * (-2 * m0 - j * j + 2 * j + mm)),
                _ => pv(Sign::Plus, q * (m0 + mm + j)),
            };
            ("iii", z)
        } else {
            ("iv", pv(Sign::Plus, q * (-idx - 2 * mm - 1)))
        })
    }

    /// `(η, Y)` where a closed form is stated.
    pub fn y(&self, idx: i64) -> Option<ParityValue> {
        let DetMParams { m: mm, q, m0, k0, c, chi, .. } = *self;
        let base = m0 + mm;
        // idx = base + 3j + r - 1 with r in 0..3
        let (j, r) = split3(idx - base + 1);
        let alt = chi * Sign::alt(j - 1);
        if idx >= base + 2 && idx <= m0 - 2 * mm - 3 * k0 {
            return Some(match r {
                0 => pv(alt, c + q * m0 + q * (2 * mm) + q * (j * (j + 1))),
                1 => pv(Sign::Plus, q * (2 * (mm + j))),
                _ => pv(alt, -c + q * m0 + q * (2 * mm) + q * (-j * j + 3 * j + 1)),
            });
        }
        if k0 == 0 {
            return None;
        }
        let special = m0 - 2 * mm - 3 * k0 + 1;
        if idx == special {
            return Some(pv(Sign::Minus, q * (2 * m0 - 2 * mm - 4 * k0 + 1)));
        }
        if idx > special && idx < m0 - 2 * mm {
            return Some(match r {
                0 => pv(Sign::Plus, q * (2 * (mm + j))),
                1 => pv(alt, -c + q * (-m0 + 2 * mm - j * j + 3 * j)),
                _ => pv(-alt, c + q * (3 * m0 + 2 * mm + j * j + 3 * j + 1)),
            });
        }
        None
    }

    /// Index where `Y = 0`.
    pub fn y_zero_at(&self) -> i64 {
        self.last_block_start()
    }
}

fn m0_bound(m: i64) -> i64 {
    (3 * m + 1).min(-m * (m + 1) / 2 - 1)
}

fn region_meta(labels: &[(i64, &'static str)]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let (start, label) = labels[i];
        let mut end = start;
        while i + 1 < labels.len() && labels[i + 1].1 == label {
            i += 1;
            end = labels[i].0;
        }
        out.push(format!("{label}:{start}..{end}"));
        i += 1;
    }
    out.join(" ")
}

/// Rows `lo..=hi` of the `N >= 0` table.
pub fn gen_det_n(d: &DetNParams, lo: i64, hi: i64) -> Trajectory {
    let mut t = Trajectory::new(d.params());
    let mut labels = Vec::new();
    for m in lo..=hi {
        let (label, z) = d.z(m);
        labels.push((m, label));
        let row = t.row_mut(m);
        row.z = Some(z);
        row.y = d.y(m);
    }
    let meta: BTreeMap<String, String> = [
        ("source", "detN".to_string()),
        ("N", d.n.to_string()),
        ("m0", d.m0.to_string()),
        ("k0", d.k0.to_string()),
        ("C", d.c.to_string()),
        ("chi", d.chi.to_string()),
        ("regions", region_meta(&labels)),
        ("z_below_mq_until", d.last_below().to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    t.meta = meta;
    t
}

/// Rows `lo..=min(hi, M+1)` of the `M < 0` table.
pub fn gen_det_m(d: &DetMParams, lo: i64, hi: i64) -> Trajectory {
    let mut t = Trajectory::new(d.params());
    let mut labels = Vec::new();
    for m in lo..=hi.min(d.m + 1) {
        let (label, z) = d.z(m).expect("m <= M+1");
        labels.push((m, label));
        let row = t.row_mut(m);
        row.z = Some(z);
        row.y = d.y(m);
    }
    let meta: BTreeMap<String, String> = [
        ("source", "detM".to_string()),
        ("M", d.m.to_string()),
        ("m0", d.m0.to_string()),
        ("k0", d.k0.to_string()),
        ("C", d.c.to_string()),
        ("chi", d.chi.to_string()),
        ("regions", region_meta(&labels)),
        ("y_zero_at", d.y_zero_at().to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    t.meta = meta;
    t
}

/// The unique `(m0, k0)` with `m0²Q <= B'-A' < (m0+1)²Q` and
/// `P_{k0+1} <= B'-A' < P_{k0}`.
pub fn find_m0_k0(a_prime: Amplitude, b_prime: Amplitude, q: Amplitude, m: i64) -> Result<(i64, i64)> {
    if q >= Amplitude::ZERO {
        return Err(Error::NonNegativeQ(q));
    }
    if m >= 0 {
        return Err(Error::Params(format!("M must be < 0, got {m}")));
    }
    let x = b_prime - a_prime;
    if x >= Amplitude::ZERO {
        return Err(Error::Params(format!("B'-A' = {x} admits no negative m0")));
    }
    let guess = (x.magnitude() / q.magnitude()).abs().sqrt().floor() as i64;
    let mut m0 = -(guess.max(1)) + 2;
    while m0 > -1 || !(q * (m0 * m0) <= x) {
        m0 -= 1;
    }
    while m0 < -1 && q * ((m0 + 1) * (m0 + 1)) <= x {
        m0 += 1;
    }
    if m0 > m0_bound(m) {
        return Err(Error::Params(format!("m0 = {m0} exceeds {}", m0_bound(m))));
    }
    let p = |j: i64| {
        if j == 0 {
            q * ((m0 + 1) * (m0 + 1))
        } else {
            q * (m0 * m0 - (m + j) * (m + j - 1))
        }
    };
    (0..-m)
        .find(|&k| p(k + 1) <= x && x < p(k))
        .map(|k0| (m0, k0))
        .ok_or_else(|| Error::Params(format!("B'-A' = {x} not bracketed by P_j")))
}

/// `γ_k^(M)`.
pub fn gamma_k(m: i64, k: i64, alpha: Sign, beta: Sign) -> Sign {
    Sign::alt(m * k - k * (k + 1) / 2) * alpha.pow(m - k) * beta.pow(k)
}

/// `G_k^(M)(idx)`.
pub fn big_g_k(m: i64, k: i64, idx: i64, data: &AppendixData, q: Amplitude) -> Amplitude {
    let r = |n: i64, d: i64| Rational::new(n as i128, d as i128);
    let (mr, kr, x) = (r(m, 1), r(k, 1), r(idx, 1));
    let poly = (-kr - mr / 2) * x * x + (r(-3, 1) * kr * kr + (r(-4, 1) * mr + 1) * kr - mr * (mr - 2) / 2) * x
        - r(8, 3) * kr * kr * kr
        + (r(-5, 1) * mr + r(3, 2)) * kr * kr
        + (r(-3, 1) * mr * mr + r(2, 1) * mr + r(1, 6)) * kr
        - mr * (mr - 1) * (mr - 2) / 6;
    data.a_prime * (-m - k) + data.b_prime * k + q.scale(poly)
}

/// `f_k^(M)(idx)` in its closed form.
pub fn f_k(m: i64, k: i64, idx: i64, q: Amplitude) -> Amplitude {
    let s = idx + 2 * m + 3 * k - 2;
    q * (s * s - (m + k) * (m + k - 1))
}

/// `(γ^(M)(idx), G^(M)(idx))` for `idx <= M+1`, selecting `k` by the `f_k`
/// windows. `M = 0` gives the constant `(+1, 0)`.
pub fn appendix_g(m: i64, idx: i64, data: &AppendixData, q: Amplitude) -> (Sign, Amplitude) {
    let x = data.b_prime - data.a_prime;
    let k = (1..=-m).rev().find(|&k| f_k(m, k, idx, q) <= x).unwrap_or(0);
    (gamma_k(m, k, data.alpha, data.beta), big_g_k(m, k, idx, data, q))
}

/// `h_{I..IV,l}^(M)(idx)`.
pub fn h(region: usize, m: i64, l: i64, idx: i64, q: Amplitude) -> Amplitude {
    match region {
        1 => f_k(m, l, idx, q),
        2 => f_k(m, l, idx + 1, q),
        3 => f_k(m + 1, l, idx, q),
        _ => f_k(m + 1, l, idx + 1, q),
    }
}

/// `(ζ^(M), Z^(M))` for `idx <= M+1` from the `h` windows containing `B'-A'`.
pub fn appendix_z(m: i64, idx: i64, data: &AppendixData, q: Amplitude) -> ParityValue {
    let x = data.b_prime - data.a_prime;
    let ab = data.alpha * data.beta;
    let i = Rational::from_integer(idx as i128);
    let sq =
        |c1: i64, c0: i64| q.scale(i * i + Rational::from_integer(c1 as i128) * i + Rational::from_integer(c0 as i128));
    if x < h(1, m, 1, idx, q) {
        return pv(Sign::Plus, q * (-idx - 2 * m - 1));
    }
    let mut out = pv(Sign::Plus, q * idx);
    for l in 1..=-m {
        if x < h(1, m, l, idx, q) {
            break;
        }
        if x < h(2, m, l, idx, q) {
            out = pv(
                Sign::alt(m + l) * ab,
                x - sq(6 * l + 4 * m - 3, 8 * l * l + (10 * m - 7) * l + 3 * m * m - 5 * m + 1),
            );
        } else if l == -m || x < h(3, m, l, idx, q) {
            out = pv(Sign::Plus, q * (idx + 2 * m + 2 * l));
        } else {
            out =
                pv(Sign::alt(m + l + 1) * ab, -x + sq(6 * l + 4 * m + 1, 8 * l * l + (10 * m + 1) * l + 3 * m * m + m));
        }
    }
    out
}

/// `(ζ^(M), Z^(M))` for `idx <= M` assembled from `γ` and `G` at levels `M`
/// and `M+1`.
pub fn appendix_z_from_g(m: i64, idx: i64, data: &AppendixData, q: Amplitude) -> ParityValue {
    let (g1a, big1a) = appendix_g(m + 1, idx + 1, data, q);
    let (g1b, big1b) = appendix_g(m + 1, idx, data, q);
    let (g0a, big0a) = appendix_g(m, idx + 1, data, q);
    let (g0b, big0b) = appendix_g(m, idx, data, q);
    pv(g1a * g1b * g0a * g0b, big1a - big1b - big0a + big0b - q * (m + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n_example() -> DetNParams {
        DetNParams::new(3, -3, -12, 2, -29, Sign::Plus).unwrap()
    }

    fn m_example() -> DetMParams {
        DetMParams::new(-3, -2, -10, 1, -10, Sign::Plus).unwrap()
    }

    #[test]
    fn region_rows() {
        let d = n_example();
        assert_eq!(d.z(d.m0 - 2 * d.n - 2).1, ParityValue::plus(d.q * (-(d.m0 - 2 * d.n - 2) - 7)));
        assert_eq!(d.z(d.m0 + d.n + 1).1, ParityValue::plus(d.q * (d.m0 + d.n + 1)));
        let e = m_example();
        let i = e.m0 + e.m - 1;
        assert_eq!(e.z(i).unwrap().1, ParityValue::plus(e.q * i));
        assert_eq!(e.z(e.m + 1).unwrap().1, ParityValue::plus(e.q * (-(e.m + 1) - 2 * e.m - 1)));
    }

    #[test]
    fn windows_are_enforced() {
        assert!(DetNParams::new(3, -3, -12, 2, -30, Sign::Plus).is_err());
        assert!(DetNParams::new(3, -3, -10, 2, -29, Sign::Plus).is_err());
        assert!(DetMParams::new(-3, -2, -10, 1, -8, Sign::Plus).is_err());
        // Left end of the window is closed for k0 != 0.
        assert!(DetMParams::new(-3, -2, -10, 1, -16, Sign::Plus).is_ok());
    }

    #[test]
    fn m0_k0_of_the_example() {
        let a = Amplitude::int(0);
        assert_eq!(find_m0_k0(a, Amplitude::int(-190), Amplitude::int(-2), -3).unwrap(), (-10, 1));
        assert_eq!(find_m0_k0(a, Amplitude::int(-200), Amplitude::int(-2), -3).unwrap().0, -10);
        assert!(find_m0_k0(a, Amplitude::int(-20), Amplitude::int(-2), -3).is_err());
    }

    #[test]
    fn f_of_a_small_case() {
        assert_eq!(f_k(-1, 1, 0, Amplitude::int(1)), Amplitude::int(1));
    }

    #[test]
    fn below_the_first_window_k_is_zero() {
        let data = AppendixData {
            a_prime: Amplitude::int(0),
            b_prime: Amplitude::int(-1000),
            alpha: Sign::Minus,
            beta: Sign::Plus,
        };
        let (g, _) = appendix_g(-3, -4, &data, Amplitude::int(-2));
        assert_eq!(g, Sign::Minus.pow(-3));
    }
}
