use num_bigint::BigInt;
use num_rational::BigRational as Oracle;
use proptest::prelude::*;
use ratpath::ratnum::{
    arith, is_k_short, sum_balanced, truncate_binary, truncated_numerator, ArithOp, BigRational, WordBudget,
};

fn ours(n: i64, d: i64) -> BigRational {
    BigRational::new(n, d).unwrap()
}

fn oracle(q: &BigRational) -> Oracle {
    q.to_string().parse().unwrap()
}

fn fraction() -> impl Strategy<Value = (i64, i64)> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000)
}

proptest! {
    #[test]
    fn arithmetic_matches_oracle((an, ad) in fraction(), (bn, bd) in fraction()) {
        let (a, b) = (ours(an, ad), ours(bn, bd));
        let (oa, ob) = (oracle(&a), oracle(&b));
        prop_assert_eq!(oracle(&arith(&a, &b, ArithOp::Add).unwrap()), &oa + &ob);
        prop_assert_eq!(oracle(&arith(&a, &b, ArithOp::Sub).unwrap()), &oa - &ob);
        prop_assert_eq!(oracle(&arith(&a, &b, ArithOp::Mul).unwrap()), &oa * &ob);
        if bn != 0 {
            prop_assert_eq!(oracle(&arith(&a, &b, ArithOp::Div).unwrap()), &oa / &ob);
        } else {
            prop_assert!(arith(&a, &b, ArithOp::Div).is_err());
        }
        prop_assert_eq!(a.cmp(&b), oa.cmp(&ob));
    }

    #[test]
    fn text_round_trip((n, d) in fraction()) {
        let q = ours(n, d);
        prop_assert_eq!(q.to_string().parse::<BigRational>().unwrap(), q.clone());
        prop_assert_eq!(oracle(&q), Oracle::new(BigInt::from(n), BigInt::from(d)));
    }

    #[test]
    fn truncation_keeps_j_digits((n, d) in fraction(), j in 0u32..40) {
        let q = ours(n, d);
        let t = truncate_binary(&q, j);
        let ulp = BigRational::dyadic(1, j);
        prop_assert!(t.abs() <= q.abs());
        prop_assert!(&q.abs() - &t.abs() < ulp);
        prop_assert_eq!(BigRational::dyadic(truncated_numerator(&q, j), j), t.clone());
        prop_assert!(t.is_zero() || t.signum() == q.signum());
    }

    #[test]
    fn balanced_sum_is_the_sum(xs in proptest::collection::vec(fraction(), 0..40)) {
        let qs: Vec<BigRational> = xs.iter().map(|&(n, d)| ours(n, d)).collect();
        let want = qs.iter().fold(Oracle::from_integer(BigInt::from(0)), |acc, q| acc + oracle(q));
        prop_assert_eq!(oracle(&sum_balanced(qs)), want);
    }

    #[test]
    fn fitted_budget_makes_everything_one_short(xs in proptest::collection::vec(fraction(), 1..20)) {
        let qs: Vec<BigRational> = xs.iter().map(|&(n, d)| ours(n, d)).collect();
        let b = WordBudget::fitting(qs.iter());
        prop_assert!(qs.iter().all(|q| is_k_short(q, 1, b)));
        if b.bits() > 2 {
            let smaller = WordBudget::new(b.bits() - 1).unwrap();
            prop_assert!(qs.iter().any(|q| !is_k_short(q, 1, smaller)));
        }
    }
}

#[test]
fn malformed_text_is_rejected() {
    for bad in ["", "1/", "/2", "1/0", "a/b", "1//2", "1/-2", "1.5", "--3"] {
        assert!(bad.parse::<BigRational>().is_err(), "{bad}");
    }
    assert_eq!("-6/4".parse::<BigRational>().unwrap(), ours(-3, 2));
    assert_eq!("+7".parse::<BigRational>().unwrap(), ours(7, 1));
}

#[test]
fn decimal_rendering_truncates() {
    assert_eq!(ours(1, 3).to_decimal(4), "0.3333");
    assert_eq!(ours(-2, 3).to_decimal(3), "-0.666");
    assert_eq!(ours(-1, 3000).to_decimal(2), "0.00");
    assert_eq!(ours(7, 2).to_decimal(0), "3");
}
