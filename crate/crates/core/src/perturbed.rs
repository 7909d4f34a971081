//! Solutions obtained by nudging the determinant-type tables off their
//! indefinite points by a small `ε`.
//!
//! In the `N` case the seed is the row `m0-2N` with `Y = ε`; in the `M` case it
//! is the half step `Z[m0+M+1] = (m0+M+1)Q + ε`, `Y[m0+M+2]` unchanged. Either
//! the formal infinitesimal or a concrete rational can play the role of `ε`.
//!
//! [`perturb_and_run`] evolves the seed with the exact engine.
//! [`gen_perturbed`] writes down the piecewise closed forms on the ranges where
//! they are known; both must agree on that range.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detsol::{DetMParams, DetNParams};
use crate::equations::{Params, State};
use crate::evolution::{evolve_simul, step_y_backward, step_z_forward, StepOutcome};
use crate::trajectory::Trajectory;
use crate::tropical::{Amplitude, ParityValue, Sign};
use crate::{Error, Result};

fn pv(s: Sign, a: Amplitude) -> ParityValue {
    ParityValue::new(s, a)
}

fn split3(d: i64) -> (i64, i64) {
    (d.div_euclid(3), d.rem_euclid(3))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PerturbBase {
    N(DetNParams),
    M(DetMParams),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PerturbSpec {
    pub base: PerturbBase,
    pub eps_sign: Sign,
    /// `None` for the formal infinitesimal, otherwise `|ε|`.
    pub size: Option<Amplitude>,
}

impl PerturbSpec {
    pub fn infinitesimal(base: PerturbBase, eps_sign: Sign) -> Self {
        PerturbSpec { base, eps_sign, size: None }
    }

    /// The signed perturbation as an amplitude.
    pub fn delta(&self) -> Amplitude {
        let e = match self.size {
            None => Amplitude::epsilon(),
            Some(r) => r,
        };
        match self.eps_sign {
            Sign::Plus => e,
            Sign::Minus => -e,
        }
    }

    pub fn params(&self) -> Params {
        match &self.base {
            PerturbBase::N(d) => d.params(),
            PerturbBase::M(d) => d.params(),
        }
    }

    /// Index of the seed: the row `m0-2N`, or the site `m0+M+1` of the
    /// half-step seed `(Z[m], Y[m+1])`.
    pub fn init_index(&self) -> i64 {
        match &self.base {
            PerturbBase::N(d) => d.m0 - 2 * d.n,
            PerturbBase::M(d) => d.m0 + d.m + 1,
        }
    }

    /// The seed `(Z[m], Y[m'])` with `m' = m` in the `N` case and `m+1` in the
    /// `M` case.
    pub fn seed(&self) -> (ParityValue, ParityValue) {
        let e = self.delta();
        match &self.base {
            PerturbBase::N(d) => (pv(d.chi, -d.c), pv(Sign::Plus, e)),
            PerturbBase::M(d) => {
                let m = d.m0 + d.m + 1;
                (pv(Sign::Plus, d.q * m + e), d.y(m + 1).expect("first Y row of the table"))
            }
        }
    }

    /// Last rows covered by the closed forms, `(Y, Z)`.
    pub fn closed_form_end(&self) -> (i64, i64) {
        match &self.base {
            PerturbBase::N(d) if d.k0 == 0 => (d.m0 + d.n + 2, d.m0 + d.n + 2),
            PerturbBase::N(d) => (d.m0 + d.n, d.m0 + d.n),
            PerturbBase::M(d) if d.k0 == 0 => (d.m0 - 2 * d.m, d.m0 - 2 * d.m),
            PerturbBase::M(d) => (d.m0 - 2 * d.m - 1, d.m0 - 2 * d.m - 2),
        }
    }
}

/// Evolve the perturbed seed `fwd` steps forward and `bwd` steps backward of
/// [`PerturbSpec::init_index`].
pub fn perturb_and_run(spec: &PerturbSpec, fwd: usize, bwd: usize) -> Trajectory {
    let p = spec.params();
    let m = spec.init_index();
    let (z, y) = spec.seed();
    let mut t = match spec.base {
        PerturbBase::N(_) => evolve_simul(&p, State { m, z, y }, fwd, bwd),
        PerturbBase::M(_) => match step_y_backward(&p, m, z, y) {
            StepOutcome::Unique(y0) => evolve_simul(&p, State { m, z, y: y0 }, fwd, bwd),
            StepOutcome::Indefinite { .. } => {
                // Z[m] sits on mQ: start one site later and let the runner stop.
                let z1 = step_z_forward(m, y, z).unique().expect("Y[m+1] is nonzero");
                let mut t = evolve_simul(&p, State { m: m + 1, z: z1, y }, fwd.saturating_sub(1), bwd + 1);
                t.row_mut(m).z.get_or_insert(z);
                t
            }
        },
    };
    t.meta = meta(spec, "perturbed-run");
    t
}

fn meta(spec: &PerturbSpec, source: &str) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), source.to_string());
    let (case, m0, k0, c, chi) = match &spec.base {
        PerturbBase::N(d) => (format!("N={}", d.n), d.m0, d.k0, d.c, d.chi),
        PerturbBase::M(d) => (format!("M={}", d.m), d.m0, d.k0, d.c, d.chi),
    };
    meta.insert("case".to_string(), case);
    meta.insert("m0".to_string(), m0.to_string());
    meta.insert("k0".to_string(), k0.to_string());
    meta.insert("C".to_string(), c.to_string());
    meta.insert("chi".to_string(), chi.to_string());
    meta.insert("eps".to_string(), spec.delta().to_string());
    meta
}

/// Closed-form rows `lo..=hi`. Fails when `hi` runs past
/// [`PerturbSpec::closed_form_end`].
pub fn gen_perturbed(spec: &PerturbSpec, lo: i64, hi: i64) -> Result<Trajectory> {
    let (y_end, z_end) = spec.closed_form_end();
    if hi > y_end.max(z_end) || lo > hi {
        return Err(Error::Params(format!(
            "window {lo}..{hi} outside the closed forms (Y up to {y_end}, Z up to {z_end})"
        )));
    }
    let mut t = Trajectory::new(spec.params());
    for m in lo..=hi {
        let (z, y) = match &spec.base {
            PerturbBase::N(d) => (n_z(d, spec, m), n_y(d, spec, m)),
            PerturbBase::M(d) => (m_z(d, spec, m), m_y(d, spec, m)),
        };
        let row = t.row_mut(m);
        row.z = if m <= z_end { Some(z) } else { None };
        row.y = if m <= y_end { Some(y) } else { None };
    }
    t.meta = meta(spec, "perturbed-closed-form");
    Ok(t)
}

fn n_z(d: &DetNParams, spec: &PerturbSpec, m: i64) -> ParityValue {
    let DetNParams { n, q, m0, k0, c, chi } = *d;
    let e = spec.delta();
    let base = m0 - 2 * n;
    let (j, r) = split3(m - base);
    let alt = chi * Sign::alt(j);
    if m < base {
        return match (spec.eps_sign, r) {
            (Sign::Minus, 0) => pv(-chi, q * j - c + e),
            (Sign::Minus, 1) => pv(Sign::Plus, q * (m0 + j + 1) - e),
            (Sign::Minus, _) => pv(-chi, q * (j + 1) + c),
            (Sign::Plus, 0) => pv(chi, q * j - c),
            (Sign::Plus, 1) => pv(Sign::Plus, q * (m0 + j + 1) - e),
            (Sign::Plus, _) => pv(chi, q * (j + 1) + c + e),
        };
    }
    let joint = m0 + n - 3 * k0 + 2;
    if k0 == 0 && m == m0 + n + 2 {
        let y = n_y(d, spec, m);
        if y.amp > Amplitude::ZERO {
            return match spec.eps_sign {
                Sign::Plus => pv(chi * Sign::alt(n), q * ((n + 1) * (n + 1)) + c + e * (n + 1)),
                Sign::Minus => pv(chi * Sign::alt(n + 1), q * ((n + 1) * (n + 1)) + c + e * (n + 2)),
            };
        }
        return pv(Sign::Minus, -(q * (m0 + n + 1)) + e);
    }
    if k0 == 0 || m < joint {
        return match r {
            0 => pv(alt, -(q * (j * j)) - c - e * j),
            1 => pv(Sign::Plus, q * (m0 + j + 1) - e),
            _ => pv(alt, q * ((j + 1) * (j + 1)) + c + e * (j + 1)),
        };
    }
    if m == joint {
        return pv(Sign::Minus, -(q * (m0 + n - k0 + 1)) + e);
    }
    let s = q * (2 * m0 + (j + 1) * (j + 1)) + c + e * (j - 2);
    match r {
        0 => pv(Sign::Plus, q * (m0 + j) - e),
        1 => pv(alt, s),
        _ => pv(-alt, -s),
    }
}

fn n_y(d: &DetNParams, spec: &PerturbSpec, m: i64) -> ParityValue {
    let DetNParams { n, q, m0, k0, c, chi } = *d;
    let e = spec.delta();
    let base = m0 - 2 * n;
    let (j, r) = split3(m - base);
    let alt = chi * Sign::alt(j);
    if m < base {
        return match (spec.eps_sign, r) {
            (_, 0) => pv(Sign::Plus, q * (2 * j) + e),
            (Sign::Minus, 1) => pv(-chi, q * (m0 + 2 * j + 1) - c),
            (Sign::Minus, _) => pv(-chi, q * (m0 + 2 * j + 2) + c - e),
            (Sign::Plus, 1) => pv(chi, q * (m0 + 2 * j + 1) - c - e),
            (Sign::Plus, _) => pv(chi, q * (m0 + 2 * j + 2) + c),
        };
    }
    if k0 == 0 && m == m0 + n + 2 {
        let a = q * (m0 + n * n + 3 * n + 2) + c;
        return match spec.eps_sign {
            Sign::Plus => pv(chi * Sign::alt(n), a + e * n),
            Sign::Minus => pv(chi * Sign::alt(n + 1), a + e * (n + 1)),
        };
    }
    let joint = m0 + n - 3 * k0 + 2;
    if k0 == 0 || m <= joint {
        return match r {
            0 => pv(Sign::Plus, q * (2 * j) + e),
            1 => pv(alt, q * (m0 - j * j + j + 1) - c - e * (j + 1)),
            _ => pv(alt, q * (m0 + j * j + 3 * j + 2) + c + e * j),
        };
    }
    match r {
        0 => pv(alt, q * (-m0 - j * (j - 1)) - c - e * (j - 2)),
        1 => pv(alt, q * (3 * m0 + j * j + 3 * j + 1) + c + e * (j - 3)),
        _ => pv(Sign::Plus, q * (2 * j + 2) + e),
    }
}

fn m_z(d: &DetMParams, spec: &PerturbSpec, idx: i64) -> ParityValue {
    let DetMParams { m: mm, q, m0, k0, c, chi, .. } = *d;
    let e = spec.delta();
    let base = m0 + mm;
    // idx = base + 3j + r - 2
    let (j, r) = split3(idx - base + 2);
    let alt = chi * Sign::alt(j - 1);
    if idx <= base {
        return match (spec.eps_sign, r) {
            (_, 0) => pv(Sign::Plus, q * (m0 + mm + j) + e),
            (Sign::Plus, 1) => pv(-chi, q * (mm + j) + c),
            (Sign::Plus, _) => pv(-chi, q * (mm + j) - e - c),
            (Sign::Minus, 1) => pv(chi, q * (mm + j) - e + c),
            (Sign::Minus, _) => pv(chi, q * (mm + j) - c),
        };
    }
    let first_hi = if k0 != 0 { m0 - 2 * mm - 3 * k0 } else { m0 - 2 * mm - 1 };
    if idx <= first_hi {
        return match r {
            0 => pv(Sign::Plus, q * (m0 + mm + j) + e),
            1 => pv(alt, q * (j * j + mm) - e * j + c),
            _ => pv(alt, q * (-j * j + 2 * j + mm) + e * (j - 1) - c),
        };
    }
    if k0 == 0 {
        // idx = m0 - 2M
        return match spec.eps_sign {
            Sign::Plus => pv(chi * Sign::alt(mm), -(q * (mm * mm + mm)) - e * mm - c),
            Sign::Minus => pv(chi * Sign::alt(mm - 1), -(q * (mm * mm + mm)) - e * (mm + 1) - c),
        };
    }
    match r {
        0 => pv(alt, q * (2 * m0 + mm + j * j) - e * (j - 3) + c),
        1 => pv(alt, q * (-2 * m0 + mm - j * j + 2 * j) + e * (j - 4) - c),
        _ => pv(Sign::Plus, q * (m0 + mm + j) + e),
    }
}

fn m_y(d: &DetMParams, spec: &PerturbSpec, idx: i64) -> ParityValue {
    let DetMParams { m: mm, q, m0, k0, c, chi, .. } = *d;
    let e = spec.delta();
    let base = m0 + mm;
    if idx <= base + 1 {
        // idx = base + 3j + r - 2
        let (j, r) = split3(idx - base + 2);
        return match (spec.eps_sign, r) {
            (Sign::Plus, 0) => pv(-chi, q * (m0 + 2 * mm + 2 * j - 1) - c),
            (Sign::Plus, 1) => pv(-chi, q * (m0 + 2 * mm + 2 * j) + e + c),
            (Sign::Minus, 0) => pv(chi, q * (m0 + 2 * mm + 2 * j - 1) + e - c),
            (Sign::Minus, 1) => pv(chi, q * (m0 + 2 * mm + 2 * j) + c),
            (_, _) => pv(Sign::Plus, q * (2 * (mm + j)) - e),
        };
    }
    // idx = base + 3j + r - 1
    let (j, r) = split3(idx - base + 1);
    let alt = chi * Sign::alt(j - 1);
    let special = m0 - 2 * mm - 3 * k0 + 1;
    if k0 == 0 || idx < special {
        return match r {
            0 => pv(alt, q * (m0 + 2 * mm + j * (j + 1)) - e * (j - 1) + c),
            1 => pv(Sign::Plus, q * (2 * (j + mm)) - e),
            _ => pv(alt, q * (m0 + 2 * mm - j * j + 3 * j + 1) + e * j - c),
        };
    }
    if idx == special {
        return pv(Sign::Minus, q * (2 * m0 - 2 * mm - 4 * k0 + 1) + e);
    }
    match r {
        0 => pv(Sign::Plus, q * (2 * (mm + j)) - e),
        1 => pv(alt, q * (-m0 + 2 * mm - j * j + 3 * j) + e * (j - 3) - c),
        _ => pv(-alt, q * (3 * m0 + 2 * mm + j * j + 3 * j + 1) - e * (j - 3) + c),
    }
}
