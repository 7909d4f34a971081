//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    agree, as_trajectory, det_m, horizon, ladder, m_example, minus_minus, minus_minus_instance, n_example, plus_plus,
    plus_plus_instance, references, sign, simul_case, single_case, windowed, MINUS_MINUS_ERRORS, PLUS_PLUS_ERRORS,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use pud::classify::{classify, Label};
use pud::detsol::{
    appendix_z, appendix_z_from_g, big_g_k, f_k, find_m0_k0, gen_det_m, gen_det_n, h, AppendixData, DetMParams,
};
use pud::equations::{
    brute_solve_single, brute_solve_single_back, brute_solve_y_next, brute_solve_y_prev, brute_solve_z_next,
    brute_solve_z_prev, RayDir, SolutionSet,
};
use pud::evolution::{
    evolve_simul, evolve_single, step_backward_single, step_forward_single, step_y_backward, step_y_forward,
    step_z_backward, step_z_forward,
};
use pud::families::{generate, validate_window, Family};
use pud::qlimit::verify_limit;
use pud::{Amplitude, Params, ParityValue, Rational, Sign, State, StepOutcome, Termination, Trajectory};

type Check = Result<(), String>;

/// Name, check and time budget for release builds.
type Criterion = (&'static str, fn() -> Check, Duration);

fn pv(s: &str) -> ParityValue {
    s.parse().unwrap()
}

fn plus(v: i64) -> ParityValue {
    ParityValue::new(Sign::Plus, v)
}

fn minus(v: i64) -> ParityValue {
    ParityValue::new(Sign::Minus, v)
}

fn expect(what: &str, m: i64, got: Option<ParityValue>, want: ParityValue) -> Check {
    if got == Some(want) {
        Ok(())
    } else {
        Err(format!("{what}[{m}] = {got:?}, expected {want}"))
    }
}

fn clean(name: &str, t: &Trajectory) -> Check {
    let v = t.violations();
    let s = t.single_violations();
    if v.is_empty() && s.is_empty() {
        Ok(())
    } else {
        Err(format!("{name}: simultaneous {v:?}, single {s:?}"))
    }
}

fn run_cases<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check {
    let config = Config {
        cases,
        max_global_rejects: 1_000_000,
        max_local_rejects: 1_000_000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(Default::default()))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn golden_n() -> Check {
    let t = gen_det_n(&n_example(), -40, 20);
    let z = |m: i64| -> ParityValue {
        match m {
            ..=-19 => plus(3 * m + 21),
            -18 => plus(29),
            -17 => plus(33),
            -16 => plus(-32),
            -15 => minus(32),
            -14 => plus(30),
            -13 => minus(-30),
            -12 => plus(30),
            -11 => plus(16),
            -10 => minus(-16),
            -9..=-1 => plus(-3 * m),
            _ => ParityValue::new(if m % 2 == 0 { Sign::Plus } else { Sign::Minus }, 0),
        }
    };
    for m in -40..=20 {
        expect("Z", m, t.z(m), z(m))?;
    }
    let y = [plus(0), plus(62), plus(1), plus(-6), minus(62), minus(-11), plus(-1), plus(46), plus(-18), minus(11)];
    let run = evolve_simul(&t.params, t.state(-18).unwrap(), 9, 0);
    for (m, want) in (-18..=-9).zip(y) {
        expect("Y", m, t.y(m), want)?;
        expect("Y (runner)", m, run.y(m), want)?;
        expect("Z (runner)", m, run.z(m), z(m))?;
    }
    Ok(())
}

fn golden_m() -> Check {
    let t = gen_det_m(&m_example(), -30, -2);
    let z = |m: i64| -> ParityValue {
        match m {
            ..=-13 => plus(-2 * m),
            -12 => plus(24),
            -11 => plus(-6),
            -10 => plus(14),
            -9 => plus(22),
            -8 => minus(-12),
            -7 => minus(16),
            -6 => plus(18),
            _ => plus(2 * m - 10),
        }
    };
    for m in -30..=-2 {
        expect("Z", m, t.z(m), z(m))?;
    }
    let y = [plus(18), plus(8), plus(36), minus(10), plus(4), minus(34), plus(0)];
    for (m, want) in (-11..=-5).zip(y) {
        expect("Y", m, t.y(m), want)?;
    }
    Ok(())
}

fn perturbed_tables() -> Check {
    for r in references() {
        r.check()?;
        // At ε = 0 the runner lands on the unperturbed table where that is unique.
        let at_zero = r.run().substitute(Rational::from_integer(0));
        let (table, z_rows, y_rows) = match r.spec.base {
            pud::perturbed::PerturbBase::N(d) => (gen_det_n(&d, -40, 20), -18..=-9, -18..=-9),
            pud::perturbed::PerturbBase::M(d) => (gen_det_m(&d, -30, 10), -12..=-6, -11..=-5),
        };
        for m in z_rows {
            expect(&format!("{}: Z at eps = 0", r.name), m, at_zero.z(m), table.z(m).unwrap())?;
        }
        for m in y_rows {
            expect(&format!("{}: Y at eps = 0", r.name), m, at_zero.y(m), table.y(m).unwrap())?;
        }
        let concrete = pud::perturbed::PerturbSpec { size: Some(Amplitude::ratio(1, 8)), ..r.spec };
        let fixed = r.fixed();
        let (lo, hi) = (*fixed.keys().next().unwrap(), *fixed.keys().next_back().unwrap());
        let init = r.spec.init_index();
        let got = pud::perturbed::perturb_and_run(&concrete, (hi - init) as usize, (init - lo) as usize);
        if got.rows != as_trajectory(r.spec.params(), &fixed).substitute(Rational::new(1, 8)).rows {
            return Err(format!("{}: eps = 1/8 differs from the substituted table", r.name));
        }
    }
    Ok(())
}

fn worked_steps() -> Check {
    let p = Params::new(-3, -21).unwrap();
    match step_forward_single(&p, -16, plus(33), plus(-32)) {
        StepOutcome::Unique(v) if v == minus(32) => {}
        other => return Err(format!("m = -16: {other:?}")),
    }
    match step_forward_single(&p, -15, plus(-32), minus(32)) {
        StepOutcome::Indefinite { constraint: SolutionSet::Ray { dir: RayDir::Ge, bound, parities }, .. }
            if bound == Amplitude::int(24) && parities.contains(&Sign::Plus) && parities.contains(&Sign::Minus) => {}
        other => return Err(format!("m = -15: {other:?}")),
    }
    Ok(())
}

fn free_run() -> Check {
    let p = Params::new(-3, -21).unwrap();
    let seed = State { m: 0, z: pv("-1:-9"), y: pv("-1:11") };
    let t = evolve_simul(&p, seed, 40, 60);
    let (lo, hi) = t.range().ok_or("empty run")?;
    for m in lo.max(-60)..=-16 {
        let j = (-m + 2).div_euclid(3);
        let (y, z) = match m + 3 * j {
            0 => (plus(6 * j - 35), plus(3 * j - 38)),
            1 => (plus(6 * j - 24), plus(3 * j + 14)),
            _ => (plus(6 * j + 14), plus(3 * j)),
        };
        expect("Y", m, t.y(m), y)?;
        expect("Z", m, t.z(m), z)?;
    }
    for m in 7..=hi.min(40) {
        let j = m.div_euclid(2);
        let (y, z) = if m % 2 == 0 { (minus(-6 * j + 20), minus(15)) } else { (plus(-6 * j - 41), plus(-15)) };
        expect("Y", m, t.y(m), y)?;
        expect("Z", m, t.z(m), z)?;
    }
    if lo > -60 || hi < 40 {
        return Err(format!("run stopped early on {lo}..{hi}"));
    }
    let window = {
        let mut w = t.clone();
        w.restrict(-26, 16);
        w
    };
    let seg = classify(&window, &p);
    let brackets =
        [(-26, -16, Label::MinusMinus), (-15, -8, Label::MinusA), (1, 7, Label::PlusB), (8, 16, Label::PlusPlus)];
    for (start, end, label) in brackets {
        if !seg.segments.iter().any(|s| (s.start, s.end, s.label) == (start, end, label)) {
            return Err(format!("no {label} segment on {start}..{end}: {:?}", seg.label_sequence()));
        }
    }
    Ok(())
}

fn oracle(eps: bool, cases: u32) -> Check {
    run_cases(cases, single_case(eps), |(p, m, a, b)| {
        agree(step_forward_single(&p, m, a, b), &brute_solve_single(&p, m, a, b))?;
        agree(step_backward_single(&p, m, b, a), &brute_solve_single_back(&p, m, b, a))
    })?;
    run_cases(cases, simul_case(eps), |(p, m, z, y)| {
        agree(step_y_forward(&p, m, z, y), &brute_solve_y_next(&p, m, z, y))?;
        agree(step_y_backward(&p, m, z, y), &brute_solve_y_prev(&p, m, z, y))?;
        agree(step_z_forward(m, y, z), &brute_solve_z_next(&p, m, y, z))?;
        agree(step_z_backward(m, y, z), &brute_solve_z_prev(&p, m, y, z))
    })
}

fn oracle_equivalence() -> Check {
    oracle(false, 1000)?;
    oracle(true, 200)
}

fn residuals() -> Check {
    clean("N table", &gen_det_n(&n_example(), -40, 20))?;
    clean("M table", &gen_det_m(&m_example(), -30, 10))?;
    for r in references() {
        clean(r.name, &r.run())?;
    }
    let p = Params::new(-3, -21).unwrap();
    clean("free run", &evolve_simul(&p, State { m: 0, z: pv("-1:-9"), y: pv("-1:11") }, 40, 60))?;
    let family = prop_oneof![
        plus_plus(),
        minus_minus(),
        windowed(0..4).prop_map(Family::MinusA),
        windowed(0..4).prop_map(Family::MinusB),
        windowed(0..4).prop_map(Family::PlusA),
        windowed(0..4).prop_map(Family::PlusB),
    ];
    run_cases(500, (common::params(), family), |(p, f)| {
        prop_assume!(validate_window(&p, &f).is_ok());
        let t = generate(&p, &f, 9);
        prop_assert!(t.violations().is_empty(), "{:?}: {:?}", f, t.violations());
        prop_assert!(t.single_violations().is_empty(), "{:?}: {:?}", f, t.single_violations());
        Ok(())
    })
}

fn forward_horizon() -> Check {
    let value = || (sign(), common::amp()).prop_map(|(s, a)| ParityValue::new(s, a));
    run_cases(100, (common::params(), -10i64..10, value(), value()), |(p, m, prev, cur)| {
        prop_assume!(step_forward_single(&p, m, prev, cur).unique().is_some());
        let h = horizon(&p, m, prev, cur);
        let t = evolve_single(&p, m, prev, cur, (h - m + 2) as usize, 0);
        let stalled = matches!(t.forward, Termination::Indefinite { index, .. } if index <= h + 1);
        let nonpositive = (m - 1..=h).any(|k| match (t.z(k), t.z(k + 1)) {
            (Some(a), Some(b)) => a.amp + b.amp <= Amplitude::ZERO,
            _ => false,
        });
        prop_assert!(stalled || nonpositive, "all unique with positive sums up to {}", h);
        Ok(())
    })
}

fn appendix() -> Check {
    let qs = [Amplitude::int(-1), Amplitude::int(-2), Amplitude::int(-3), Amplitude::ratio(-1, 2)];
    for q in qs {
        for m in -6i64..=-1 {
            for (a, b) in [(0, -190), (7, -3), (-11, 40)] {
                let data = AppendixData {
                    a_prime: Amplitude::int(a),
                    b_prime: Amplitude::int(b),
                    alpha: Sign::Plus,
                    beta: Sign::Minus,
                };
                for k in 1..=-m {
                    for idx in -60..=0 {
                        let via_g = big_g_k(m, k - 1, idx, &data, q) - big_g_k(m, k, idx, &data, q) - data.a_prime
                            + data.b_prime;
                        if via_g != f_k(m, k, idx, q) {
                            return Err(format!("f_k two ways: M = {m}, k = {k}, m = {idx}, Q = {q}"));
                        }
                    }
                }
            }
            for l in 1..=-m {
                for d in 0..40 {
                    let idx = m + 1 - d;
                    let hs: Vec<Amplitude> = (1..=4).map(|r| h(r, m, l, idx, q)).collect();
                    let ordered = if l < -m {
                        hs[0] < hs[1] && hs[1] < hs[2] && hs[2] < hs[3] && hs[3] == h(1, m, l + 1, idx, q)
                    } else {
                        hs[0] < hs[1]
                    };
                    if !ordered {
                        return Err(format!("h order: M = {m}, l = {l}, m = {idx}, Q = {q}"));
                    }
                }
            }
        }
    }
    let (q, zero) = (Amplitude::int(-2), Amplitude::int(0));
    let found = find_m0_k0(zero, Amplitude::int(-190), q, -3).map_err(|e| e.to_string())?;
    if found != (-10, 1) {
        return Err(format!("find_m0_k0 = {found:?}"));
    }
    let example = AppendixData { a_prime: zero, b_prime: Amplitude::int(-190), alpha: Sign::Plus, beta: Sign::Plus };
    let routes = |d: &DetMParams, data: &AppendixData| -> Result<(), TestCaseError> {
        for idx in d.m0 + d.m - 4..=d.m + 1 {
            let direct = d.z(idx).unwrap().1;
            prop_assert_eq!(appendix_z(d.m, idx, data, d.q), direct, "m = {}", idx);
            if idx <= d.m {
                prop_assert_eq!(appendix_z_from_g(d.m, idx, data, d.q), direct, "via G at m = {}", idx);
            }
        }
        Ok(())
    };
    let d = DetMParams::from_appendix(-3, q, example).map_err(|e| e.to_string())?;
    if (d.m0, d.k0, d.c, d.chi) != (m_example().m0, m_example().k0, m_example().c, m_example().chi) {
        return Err(format!("example point maps to {d:?}"));
    }
    routes(&d, &example).map_err(|e| e.to_string())?;
    run_cases(200, (det_m(), sign(), 0i64..4), |(d, alpha, off)| {
        let a_prime = Amplitude::int(off * 7 - 5);
        let b_prime = d.c + a_prime + d.q * (d.m0 * d.m0 + d.m0);
        let data = AppendixData { a_prime, b_prime, alpha, beta: alpha * d.chi };
        routes(&d, &data)
    })
}

fn q_limit() -> Check {
    for (name, t, frozen) in
        [("++", plus_plus_instance(), PLUS_PLUS_ERRORS), ("--", minus_minus_instance(), MINUS_MINUS_ERRORS)]
    {
        let r = verify_limit(&t, &ladder(), 8).map_err(|e| e.to_string())?;
        if !r.complete() {
            return Err(format!("{name}: incomplete run"));
        }
        if !r.decreasing {
            return Err(format!("{name}: errors not strictly decreasing"));
        }
        for (run, want) in r.runs.iter().zip(frozen) {
            if !run.signs_agree() {
                return Err(format!("{name}, eps {}: signs differ", run.epsilon));
            }
            if ((run.max_error - want) / want).abs() > 1e-6 {
                return Err(format!("{name}, eps {}: {} against frozen {}", run.epsilon, run.max_error, want));
            }
        }
        let last = r.final_max_error().unwrap();
        if last > 5.0 / 40.0 {
            return Err(format!("{name}: final error {last}"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("golden N table", golden_n, Duration::from_secs(1)),
        ("golden M table", golden_m, Duration::from_secs(1)),
        ("perturbed tables", perturbed_tables, Duration::from_secs(1)),
        ("worked single steps", worked_steps, Duration::from_secs(1)),
        ("free run", free_run, Duration::from_secs(1)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(1)),
        ("residuals", residuals, Duration::from_secs(1)),
        ("forward horizon", forward_horizon, Duration::from_secs(1)),
        ("appendix identities", appendix, Duration::from_secs(1)),
        ("q-side limit", q_limit, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|()| {
            if took <= budget || cfg!(debug_assertions) {
                Ok(())
            } else {
                Err(format!("took {took:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({took:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
