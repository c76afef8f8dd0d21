use phss::expr::Expr;
use phss::matrix_market::{read_matrix, write_matrix};
use phss_core::sparse::TripletBuilder;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-300f64..1e-300, Just(0.5), Just(-3.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_market_round_trip(n in 1usize..12, entries in prop::collection::vec((0usize..12, 0usize..12, finite()), 0..60)) {
        let mut b = TripletBuilder::new(n);
        for (i, j, v) in entries {
            b.push(i % n, j % n, v);
        }
        let a = b.build();
        prop_assert_eq!(read_matrix(&write_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn polynomial_expressions(c in prop::collection::vec(-5.0f64..5.0, 4), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let text = format!("{:?} + {:?}*x - ({:?})*y^2 + {:?}*x*y", c[0], c[1], c[2], c[3]);
        let e = Expr::parse(&text).unwrap();
        let want = c[0] + c[1] * x - c[2] * y * y + c[3] * x * y;
        prop_assert!((e.eval(x, y) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        let again = Expr::parse(&e.root().to_string()).unwrap();
        prop_assert_eq!(again.root(), e.root());
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^() xy0-9.a-z,]{0,24}") {
        let _ = Expr::parse(&s);
    }
}
