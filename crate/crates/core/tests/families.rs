//! Every family instance that passes its window check solves the system.

mod common;

use common::{minus_minus, params, plus_plus, windowed};
use proptest::prelude::*;
use pud::families::{generate, validate_window, Family};
use pud::Params;

fn solves(p: &Params, f: &Family) -> Result<(), TestCaseError> {
    prop_assume!(validate_window(p, f).is_ok());
    let t = generate(p, f, 9);
    prop_assert!(t.violations().is_empty(), "{:?} fails at {:?}", f, t.violations());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 1_000_000, max_local_rejects: 1_000_000, ..ProptestConfig::default() })]

    #[test]
    fn plus_plus_solves(p in params(), f in plus_plus()) { solves(&p, &f)?; }

    #[test]
    fn minus_minus_solves(p in params(), f in minus_minus()) { solves(&p, &f)?; }

    #[test]
    fn minus_a_solves(p in params(), w in windowed(0..4)) { solves(&p, &Family::MinusA(w))?; }

    #[test]
    fn minus_b_solves(p in params(), w in windowed(0..4)) { solves(&p, &Family::MinusB(w))?; }

    #[test]
    fn plus_a_solves(p in params(), w in windowed(0..4)) { solves(&p, &Family::PlusA(w))?; }

    #[test]
    fn plus_b_solves(p in params(), w in windowed(0..4)) { solves(&p, &Family::PlusB(w))?; }

    #[test]
    fn plus_plus_is_two_periodic(p in params(), f in plus_plus(), m in -20i64..20) {
        prop_assert_eq!(f.y(&p, m + 2).amp, f.y(&p, m).amp + p.q * 2);
        prop_assert_eq!(f.z(&p, m + 2).amp, f.z(&p, m).amp);
    }

    #[test]
    fn minus_minus_is_three_periodic(p in params(), f in minus_minus(), m in -20i64..20) {
        prop_assert_eq!(f.y(&p, m - 3).amp, f.y(&p, m).amp - p.q * 2);
        prop_assert_eq!(f.z(&p, m - 3).amp, f.z(&p, m).amp - p.q);
    }
}

#[test]
fn minus_a_block_of_the_n_table() {
    use pud::detsol::gen_det_n;
    use pud::families::Windowed;
    use pud::{Amplitude, Sign};

    let p = Params::new(-3, -21).unwrap();
    let table = gen_det_n(&common::n_example(), -20, 0);
    let block = |k| {
        Family::MinusA(Windowed {
            m_prime: -18,
            k,
            c: Amplitude::int(-29),
            d: Amplitude::ZERO,
            eta: Sign::Plus,
            zeta: Sign::Plus,
        })
    };
    // One block per remaining step N - k0; the next block is joined, not continued.
    validate_window(&p, &block(0)).unwrap();
    let t = generate(&p, &block(0), 0);
    assert_eq!(t.range(), Some((-18, -15)));
    for m in -18..=-15 {
        assert_eq!(t.state(m), table.state(m), "row {m}");
    }
    assert!(validate_window(&p, &block(1)).is_err());
    let longer = generate(&p, &block(1), 0);
    assert_eq!(longer.state(-14), table.state(-14));
    assert_ne!(longer.z(-13), table.z(-13));
}

#[test]
fn minus_minus_tail_of_the_perturbed_n_table() {
    use pud::{Amplitude, Sign};

    let p = Params::new(-3, -21).unwrap();
    let table = common::load_table(include_str!("data/n_eps_minus.txt"));
    let c = ["18-1E", "23+1E", "-41"].map(|s| s.parse::<Amplitude>().unwrap());
    let f = Family::minus_minus(-19, c, Sign::Minus, Sign::Minus).unwrap();
    validate_window(&p, &f).unwrap();
    let t = generate(&p, &f, 6);
    assert_eq!(t.y(-21), Some("+1:6-1E".parse().unwrap()));
    assert_eq!(t.z(-21), Some("-1:32-1E".parse().unwrap()));
    for m in -25..=-19 {
        assert_eq!((t.y(m), t.z(m)), (Some(table[&m].0), Some(table[&m].1)), "row {m}");
    }
}
