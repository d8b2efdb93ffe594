use proptest::prelude::*;
use symcore::*;

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("a".to_string()),
        (1i64..6).prop_map(|n| n.to_string()),
        (1i64..5, 2i64..5).prop_map(|(n, d)| format!("({n}/{d})")),
    ]
}

/// Expressions over `x`, `y`, parameter `a` and function `f`.
fn expr_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (1 + {b}^2))")),
            (inner.clone(), 0i64..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            inner.clone().prop_map(|a| format!("f({a})")),
            inner.prop_map(|a| format!("x^a*({a})")),
        ]
    })
}

/// Rational functions of `x` with parameter `a`.
fn rational_text() -> impl Strategy<Value = String> {
    let lin = (-3i64..4, 1i64..4).prop_map(|(c, k)| format!("({k}*x + {c})"));
    (
        proptest::collection::vec(lin.clone(), 0..3),
        proptest::collection::vec(lin, 1..4),
        -3i64..4,
    )
        .prop_map(|(num, den, c)| {
            let n = if num.is_empty() { "1".to_string() } else { num.join("*") };
            format!("({c} + {n})/({})", den.join("*"))
        })
}

fn p(text: &str) -> Expr {
    parse(text, &["a"], &["f"]).unwrap()
}

fn oracle() -> Oracle {
    Oracle::new(ProbeConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(t in expr_text()) {
        let e = p(&t);
        let again = parse(&e.to_string(), &["a"], &["f"]).unwrap();
        prop_assert_eq!(again, e);
    }

    #[test]
    fn normalize_is_idempotent(t in expr_text()) {
        let e = p(&t);
        if let Ok(n) = try_normalize(&e) {
            prop_assert_eq!(normalize(&n), n);
        }
    }

    #[test]
    fn derivative_is_linear(a in expr_text(), b in expr_text()) {
        let (a, b) = (p(&a), p(&b));
        let lhs = diff(&(&a + &b * 3), "x");
        let rhs = diff(&a, "x") + diff(&b, "x") * 3;
        match oracle().zero_test(&(lhs - rhs)) {
            Ok(z) => prop_assert!(z.zero),
            Err(SymError::ProbeFailure { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn integral_differentiates_back(t in rational_text()) {
        let e = p(&t);
        let r = integrate(&e, "x");
        prop_assert!(oracle().is_zero(&(diff(&r, "x") - &e)).unwrap(), "{} -> {}", e, r);
    }

    #[test]
    fn substitution_commutes_with_chain_rule(t in expr_text()) {
        let e = p(&t);
        let u = Expr::powi(Expr::sym("x"), 2) + 1;
        let lhs = diff(&e.subst("y", &u), "x");
        let rhs = (diff(&e, "x") + diff(&e, "y") * diff(&u, "x")).subst("y", &u);
        match oracle().zero_test(&(lhs - rhs)) {
            Ok(z) => prop_assert!(z.zero),
            Err(SymError::ProbeFailure { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn symbolic_verdicts_agree_with_probing(a in expr_text(), b in expr_text()) {
        let e = p(&a) - p(&b);
        let o = oracle();
        if let Ok(z) = o.zero_test(&e) {
            if z.how == Verdict::Symbolic {
                for seed in [3u64, 11] {
                    if let Ok(probed) = o.probe_zero(&e, None, seed) {
                        prop_assert_eq!(probed, z.zero, "{}", e);
                    }
                }
            }
        }
    }
}
