use proptest::prelude::*;
use rug::{Float, Rational};

use resurgence::gfunc::{applicable_methods, g_auto, g_with};
use resurgence::mpcore::{MpComplex, PrecisionContext};
use resurgence::polyengine::{antidifference, PolyTable, RationalPolynomial};
use resurgence::specialfn::hurwitz_zeta;

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).unwrap()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..=10_000, 1i64..=5_000).prop_map(|(n, d)| Rational::from((n, d)))
}

fn polynomial(max_degree: usize) -> impl Strategy<Value = RationalPolynomial> {
    prop::collection::vec(rational(), 1..=max_degree + 1).prop_map(RationalPolynomial::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hurwitz_shift_and_conjugation(s in 1.05f64..8.0, re in 0.1f64..5.0, im in -5.0f64..5.0) {
        let c = ctx(50);
        let s = c.real(s);
        let a = MpComplex::from_f64(&c, re, im);
        let z = hurwitz_zeta(&s, &a, &c).unwrap();
        let z1 = hurwitz_zeta(&s, &a.add_real(&c.int(1)), &c).unwrap();
        let zc = hurwitz_zeta(&s, &a.conj(), &c).unwrap();
        let power = a.pow_real(&Float::with_val(c.bits(), -&s)).unwrap();
        let scale = z.abs() + 1u32;
        prop_assert!((&z - &z1).dist(&power) < c.pow10(-48) * &scale);
        prop_assert!(zc.dist(&z.conj()) < c.pow10(-48) * &scale);
    }

    #[test]
    fn antidifference_solves_the_difference_equation(p in polynomial(15)) {
        let f = antidifference(&p);
        prop_assert_eq!(f.forward_difference(), p.clone());
        prop_assert_eq!(f.coeff(0), Rational::new());
        if let Some(d) = p.degree() {
            prop_assert_eq!(f.degree(), Some(d + 1));
        }
    }

    #[test]
    fn polynomial_line_round_trip(p in polynomial(12)) {
        let line = p.to_line();
        prop_assert_eq!(RationalPolynomial::parse_line(&line).unwrap(), p);
    }

    #[test]
    fn shift_matches_evaluation(p in polynomial(10), x in rational()) {
        let shifted = p.shift_one();
        prop_assert_eq!(shifted.eval(&x), p.eval(&(x.clone() + 1u32)));
    }

    #[test]
    fn evaluators_are_stable_under_precision_doubling(r in 0.05f64..200.0, arg in 0.05f64..3.1, flip in any::<bool>()) {
        let arg = if flip { -arg } else { arg };
        let c = ctx(40);
        let wide = c.doubled();
        let z = MpComplex::from_f64(&c, r * arg.cos(), r * arg.sin());
        for m in applicable_methods(&z, &c) {
            let a = g_with(&z, m, &c).unwrap();
            let b = g_with(&z.with_prec(wide.bits()), m, &wide).unwrap();
            prop_assert!(b.value.with_prec(c.bits()).dist(&a.value) <= a.err, "{}", m);
        }
        let auto = g_auto(&z, &c, true).unwrap();
        prop_assert!(auto.within_budget(&c));
    }
}

#[test]
fn delta_table_text_round_trip() {
    let table = PolyTable::build(12);
    assert_eq!(PolyTable::from_text(&table.to_text()).unwrap(), table);
}
