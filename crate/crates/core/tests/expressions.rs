mod common;

use common::{Draw, EXPR_VARS};
use lielorentz::Expression;
use proptest::prelude::*;

fn random_expr(seed: u64) -> Expression {
    let src = Draw::new(seed).expr(4);
    Expression::parse(&src, &EXPR_VARS).unwrap_or_else(|e| panic!("{src}: {e}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let e = random_expr(seed);
        let printed = e.to_string();
        let again = Expression::parse(&printed, &EXPR_VARS).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn derivative_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0,
                            x in -1.5f64..1.5, t in -1.5f64..1.5) {
        let (f, g) = (random_expr(s1), random_expr(s2));
        let combo = f.scale(a).add(&g.scale(b)).derive("t", 1).unwrap();
        let (df, dg) = (f.derive("t", 1).unwrap(), g.derive("t", 1).unwrap());
        let (Ok(lhs), Ok(u), Ok(v)) = (combo.eval(&[x, t]), df.eval(&[x, t]), dg.eval(&[x, t])) else {
            return Ok(());
        };
        let rhs = a * u + b * v;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn product_rule(s1 in any::<u64>(), s2 in any::<u64>(), x in -1.5f64..1.5, t in -1.5f64..1.5) {
        let (f, g) = (random_expr(s1), random_expr(s2));
        let d = f.mul(&g).derive("x", 1).unwrap();
        let vals = (
            d.eval(&[x, t]),
            f.eval(&[x, t]),
            g.eval(&[x, t]),
            f.derive("x", 1).unwrap().eval(&[x, t]),
            g.derive("x", 1).unwrap().eval(&[x, t]),
        );
        let (Ok(lhs), Ok(fv), Ok(gv), Ok(dfv), Ok(dgv)) = vals else {
            return Ok(());
        };
        let rhs = dfv * gv + fv * dgv;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(seed in any::<u64>(), x in -1.5f64..1.5, t in -1.5f64..1.5) {
        let e = random_expr(seed);
        let xt = e.derive("x", 1).unwrap().derive("t", 1).unwrap();
        let tx = e.derive("t", 1).unwrap().derive("x", 1).unwrap();
        if let (Ok(u), Ok(v)) = (xt.eval(&[x, t]), tx.eval(&[x, t])) {
            prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()), "{} vs {}", u, v);
        }
    }
}

#[test]
fn undeclared_variables_are_rejected() {
    assert!(Expression::parse("x + z", &EXPR_VARS).is_err());
    assert!(Expression::parse("sin(x", &EXPR_VARS).is_err());
    assert!(Expression::parse("foo(x)", &EXPR_VARS).is_err());
}
