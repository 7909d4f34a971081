//! Shared strategies and reference-table loading for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use pud::detsol::{DetMParams, DetNParams};
use pud::equations::SolutionSet;
use pud::evolution::StepOutcome;
use pud::families::{generate, validate_window, Family, Windowed};
use pud::perturbed::{perturb_and_run, PerturbBase, PerturbSpec};
use pud::{Amplitude, Params, ParityValue, Rational, Sign, Termination, Trajectory};

pub type Table = BTreeMap<i64, (ParityValue, ParityValue)>;

/// Rows `m -> (Y, Z)` from a whitespace table `m eta:Y zeta:Z`; `#` starts a comment.
pub fn load_table(text: &str) -> Table {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].parse().unwrap(), (f[1].parse().unwrap(), f[2].parse().unwrap()))
        })
        .collect()
}

/// Rows of `table` on which `t` differs, as `(m, variable, table value, t value)`.
pub fn diff_table(t: &Trajectory, table: &Table) -> Vec<(i64, char, ParityValue, Option<ParityValue>)> {
    let mut out = Vec::new();
    for (&m, &(y, z)) in table {
        if t.y(m) != Some(y) {
            out.push((m, 'Y', y, t.y(m)));
        }
        if t.z(m) != Some(z) {
            out.push((m, 'Z', z, t.z(m)));
        }
    }
    out
}

pub fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

pub fn q() -> impl Strategy<Value = Amplitude> {
    prop_oneof![
        Just(Amplitude::int(-1)),
        Just(Amplitude::int(-2)),
        Just(Amplitude::int(-3)),
        Just(Amplitude::ratio(-1, 2))
    ]
}

/// A point strictly inside `(lo, hi)`, sometimes ε away from an end.
pub fn inside(lo: Amplitude, hi: Amplitude, t: u8) -> Amplitude {
    match t % 4 {
        0 => lo + Amplitude::epsilon(),
        1 => hi - Amplitude::epsilon(),
        _ => lo + (hi - lo).scale(Rational::new(t as i128, 256)),
    }
}

/// Like [`inside`] but never ε-close to an end, for callers adding their own ε.
pub fn inside_standard(lo: Amplitude, hi: Amplitude, t: u8) -> Amplitude {
    lo + (hi - lo).scale(Rational::new(1 + (t as i128 % 254), 256))
}

fn det_n_with(pick: fn(Amplitude, Amplitude, u8) -> Amplitude) -> impl Strategy<Value = DetNParams> {
    (0i64..5, q(), 0i64..4, any::<u8>(), sign(), 0i64..6).prop_map(move |(n, q, back, t, chi, k)| {
        let m0 = (-3 * n - 2).min(-n * (n + 1) / 2 - 1) - back;
        let k0 = k % (n + 1);
        let (lo, hi) = if k0 != 0 {
            let r = n - k0;
            (-(q * m0) - q * (r * (r + 1)), -(q * m0) - q * ((r + 1) * (r + 2)))
        } else {
            (-(q * m0) - q * (n * (n + 1)), q * (m0 + 1))
        };
        DetNParams::new(n, q, m0, k0, pick(lo, hi, t.max(1)), chi).unwrap()
    })
}

fn det_m_with(pick: fn(Amplitude, Amplitude, u8) -> Amplitude) -> impl Strategy<Value = DetMParams> {
    (1i64..6, q(), 0i64..4, any::<u8>(), sign(), 0i64..6).prop_map(move |(neg, q, back, t, chi, k)| {
        let m = -neg;
        let m0 = (3 * m + 1).min(-m * (m + 1) / 2 - 1) - back;
        let k0 = k % (-m);
        let (lo, hi) = if k0 != 0 {
            (-(q * m0) - q * ((m + k0 + 1) * (m + k0)), -(q * m0) - q * ((m + k0) * (m + k0 - 1)))
        } else {
            (-(q * m0) - q * (m * (m + 1)), q * (m0 + 1))
        };
        DetMParams::new(m, q, m0, k0, pick(lo, hi, t.max(1)), chi).unwrap()
    })
}

pub fn det_n() -> impl Strategy<Value = DetNParams> {
    det_n_with(inside)
}

pub fn det_m() -> impl Strategy<Value = DetMParams> {
    det_m_with(inside)
}

/// Determinant parameters with a standard `C` strictly inside its window.
pub fn det_n_standard() -> impl Strategy<Value = DetNParams> {
    det_n_with(inside_standard)
}

pub fn det_m_standard() -> impl Strategy<Value = DetMParams> {
    det_m_with(inside_standard)
}

/// Small rationals with an optional ±ε part.
pub fn amp() -> impl Strategy<Value = Amplitude> {
    (-60i128..60, prop_oneof![Just(1i128), Just(2), Just(3)], -1i128..=1)
        .prop_map(|(n, d, e)| Amplitude::new(Rational::new(n, d), Rational::from_integer(e)))
}

pub fn params() -> impl Strategy<Value = Params> {
    (1i64..4, -25i64..25).prop_map(|(q, a)| Params::new(-q, a).unwrap())
}

pub fn windowed(k: std::ops::Range<i64>) -> impl Strategy<Value = Windowed> {
    (-12i64..12, k, amp(), amp(), sign(), sign()).prop_map(|(m_prime, k, c, d, eta, zeta)| Windowed {
        m_prime,
        k,
        c,
        d,
        eta,
        zeta,
    })
}

pub fn plus_plus() -> impl Strategy<Value = Family> {
    (-30i64..30, amp(), amp(), sign(), sign()).prop_map(|(m_prime, d1, d2, eta, zeta)| Family::PlusPlus {
        m_prime,
        d1,
        d2,
        eta,
        zeta,
    })
}

pub fn minus_minus() -> impl Strategy<Value = Family> {
    (-30i64..30, amp(), amp(), sign(), sign())
        .prop_map(|(m_prime, c0, c1, eta, zeta)| Family::minus_minus(m_prime, [c0, c1, -c0 - c1], eta, zeta).unwrap())
}

pub fn n_example() -> DetNParams {
    DetNParams::new(3, -3, -12, 2, -29, Sign::Plus).unwrap()
}

pub fn m_example() -> DetMParams {
    DetMParams::new(-3, -2, -10, 1, -10, Sign::Plus).unwrap()
}

pub fn as_trajectory(p: Params, table: &Table) -> Trajectory {
    let mut t = Trajectory::new(p);
    for (&m, &(y, z)) in table {
        t.row_mut(m).y = Some(y);
        t.row_mut(m).z = Some(z);
    }
    t
}

/// Apply `(m, var, value)` corrections to a table.
pub fn corrected(mut table: Table, fixes: &[(i64, char, String)]) -> Table {
    for (m, var, v) in fixes {
        let row = table.get_mut(m).unwrap();
        let v: ParityValue = v.parse().unwrap();
        match var {
            'Y' => row.0 = v,
            _ => row.1 = v,
        }
    }
    table
}

/// A given perturbed table and the corrections that make it a solution.
pub struct Reference {
    pub name: &'static str,
    pub spec: PerturbSpec,
    pub given: Table,
    pub fixes: Vec<(i64, char, String)>,
}

impl Reference {
    pub fn fixed(&self) -> Table {
        corrected(self.given.clone(), &self.fixes)
    }

    /// The runner over the rows of the table.
    pub fn run(&self) -> Trajectory {
        let fixed = self.fixed();
        let (lo, hi) = (*fixed.keys().next().unwrap(), *fixed.keys().next_back().unwrap());
        let init = self.spec.init_index();
        perturb_and_run(&self.spec, (hi - init) as usize, (init - lo) as usize)
    }

    /// Runner and corrected table agree, the corrected table solves the
    /// system, and dropping any one correction breaks it.
    pub fn check(&self) -> Result<(), String> {
        let run = self.run();
        if run.forward != Termination::Horizon || run.backward != Termination::Horizon {
            return Err(format!("{}: runner stopped early", self.name));
        }
        let fixed = self.fixed();
        let diff = diff_table(&run, &fixed);
        if !diff.is_empty() {
            return Err(format!("{}: runner differs {diff:?}", self.name));
        }
        let p = self.spec.params();
        let v = as_trajectory(p, &fixed).violations();
        if !v.is_empty() {
            return Err(format!("{}: corrected table violates {v:?}", self.name));
        }
        for i in 0..self.fixes.len() {
            let mut partial = self.fixes.clone();
            let (m, var, _) = partial.remove(i);
            if as_trajectory(p, &corrected(self.given.clone(), &partial)).violations().is_empty() {
                return Err(format!("{}: {var}[{m}] as given is consistent", self.name));
            }
        }
        Ok(())
    }
}

fn owned(fixes: &[(i64, char, &str)]) -> Vec<(i64, char, String)> {
    fixes.iter().map(|&(m, v, s)| (m, v, s.to_string())).collect()
}

pub fn references() -> Vec<Reference> {
    let n = PerturbBase::N(n_example());
    let m = PerturbBase::M(m_example());
    let m_minus = load_table(include_str!("../data/m_eps_minus.txt"));
    // The backward tail has the given amplitudes with every parity +1.
    let m_minus_fixes = m_minus
        .range(..=-9)
        .flat_map(|(&m, &(y, z))| [(m, 'Y', y), (m, 'Z', z)])
        .filter(|(_, _, v)| v.sign == Sign::Minus)
        .map(|(m, var, v)| (m, var, ParityValue::new(Sign::Plus, v.amp).to_string()))
        .collect();
    vec![
        Reference {
            name: "N, eps < 0",
            spec: PerturbSpec::infinitesimal(n, Sign::Minus),
            given: load_table(include_str!("../data/n_eps_minus.txt")),
            fixes: owned(&[(-17, 'Y', "+1:62+1E"), (-14, 'Y', "-1:62+2E"), (3, 'Y', "-1:-22+2E")]),
        },
        Reference {
            name: "N, eps > 0",
            spec: PerturbSpec::infinitesimal(n, Sign::Plus),
            given: load_table(include_str!("../data/n_eps_plus.txt")),
            fixes: owned(&[(-9, 'Z', "+1:27-1E"), (-8, 'Z', "-1:-5+1E"), (-7, 'Z', "+1:5-1E"), (3, 'Y', "+1:-22-1E")]),
        },
        Reference {
            name: "M, eps > 0",
            spec: PerturbSpec::infinitesimal(m, Sign::Plus),
            given: load_table(include_str!("../data/m_eps_plus.txt")),
            fixes: owned(&[(0, 'Z', "-1:-18-1E"), (1, 'Y', "-1:-8+2E"), (1, 'Z', "+1:18+1E"), (2, 'Y', "+1:14-2E")]),
        },
        Reference {
            name: "M, eps < 0",
            spec: PerturbSpec::infinitesimal(m, Sign::Minus),
            given: m_minus,
            fixes: m_minus_fixes,
        },
    ]
}

/// Small rationals, with an ε part (coefficient in `-2..=2`) when `eps` is set.
pub fn small(eps: bool) -> impl Strategy<Value = Amplitude> {
    let e = if eps { (-2i128..=2).boxed() } else { Just(0i128).boxed() };
    (-40i128..40, prop_oneof![Just(1i128), Just(2), Just(3)], e)
        .prop_map(|(n, d, e)| Amplitude::new(Rational::new(n, d), Rational::from_integer(e)))
}

pub fn stepper_params() -> impl Strategy<Value = Params> {
    (q(), -30i64..30).prop_map(|(q, a)| Params::new(q, a).unwrap())
}

/// Amplitudes that sit on the case boundaries of the steppers half the time.
fn pick(special: Vec<Amplitude>, eps: bool) -> impl Strategy<Value = Amplitude> {
    prop_oneof![1 => small(eps), 1 => proptest::sample::select(special)]
}

/// `(Q, A)`, a site and two values for the single equation.
pub fn single_case(eps: bool) -> impl Strategy<Value = (Params, i64, ParityValue, ParityValue)> {
    (stepper_params(), -8i64..8).prop_flat_map(move |(p, m)| {
        let mq = p.mq(m);
        let cur = pick(vec![mq, -p.a - mq, Amplitude::ZERO], eps);
        (Just(p), Just(m), cur, sign(), sign(), small(eps), 0usize..5).prop_map(move |(p, m, c, a, b, r, k)| {
            let other = [-c, p.a + p.mq(m), p.w(m) - c, r, p.w(m) - c + (p.mq(m) - c).pos()][k];
            (p, m, ParityValue::new(a, other), ParityValue::new(b, c))
        })
    })
}

/// `(Q, A)`, a site and a `(Z, Y)` pair for the simultaneous system.
pub fn simul_case(eps: bool) -> impl Strategy<Value = (Params, i64, ParityValue, ParityValue)> {
    (stepper_params(), -8i64..8).prop_flat_map(move |(p, m)| {
        let mq = p.mq(m);
        (Just(p), Just(m), pick(vec![mq, Amplitude::ZERO], eps), pick(vec![Amplitude::ZERO], eps), sign(), sign())
            .prop_map(|(p, m, z, y, s, t)| (p, m, ParityValue::new(s, z), ParityValue::new(t, y)))
    })
}

/// A stepper outcome matches the exhaustive solution set.
pub fn agree(step: StepOutcome<ParityValue>, oracle: &SolutionSet) -> Result<(), TestCaseError> {
    match step {
        StepOutcome::Unique(v) => prop_assert_eq!(oracle, &SolutionSet::Point { value: v }),
        StepOutcome::Indefinite { constraint, .. } => {
            prop_assert!(oracle.as_point().is_none(), "oracle is a point: {}", oracle);
            prop_assert_eq!(&constraint, oracle);
        }
    }
    Ok(())
}

/// The first index `h >= m` with `A + 2hQ < -4 max(|Z[m-1]|, |Z[m]|)`.
pub fn horizon(p: &Params, m: i64, prev: ParityValue, cur: ParityValue) -> i64 {
    let bound = -(prev.amp.abs().max(cur.amp.abs()) * 4);
    let mut h = m;
    while p.a + p.mq(2 * h) >= bound {
        h += 1;
    }
    h
}

/// A `++` instance on `Q = -1, A = -3` from `m' = 10`.
pub fn plus_plus_instance() -> Trajectory {
    let p = Params::new(-1, -3).unwrap();
    let f = Family::PlusPlus {
        m_prime: 10,
        d1: Amplitude::int(0),
        d2: Amplitude::int(0),
        eta: Sign::Plus,
        zeta: Sign::Plus,
    };
    validate_window(&p, &f).unwrap();
    generate(&p, &f, 12)
}

/// A `--` instance on `Q = -2, A = 3` ending at `m' = 0`.
pub fn minus_minus_instance() -> Trajectory {
    let p = Params::new(-2, 3).unwrap();
    let f = Family::minus_minus(0, [Amplitude::int(0); 3], Sign::Plus, Sign::Minus).unwrap();
    validate_window(&p, &f).unwrap();
    let mut t = generate(&p, &f, 12);
    t.restrict(-12, 0);
    t
}

/// Frozen maximal errors over the ladder `1/10, 1/20, 1/40` with 8 steps,
/// from a 2000-bit mpmath run of the same recurrence on the same seeds.
pub const PLUS_PLUS_ERRORS: [f64; 3] = [3.7202449e-45, 6.9194826e-89, 4.787924e-176];
pub const MINUS_MINUS_ERRORS: [f64; 3] = [2.4545962e-26, 3.0125116e-51, 9.0752259e-101];

pub fn ladder() -> [Rational; 3] {
    [Rational::new(1, 10), Rational::new(1, 20), Rational::new(1, 40)]
}
