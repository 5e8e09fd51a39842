mod oracle;

use hyplab::hyperscalar::{hyp_inf, hyp_sup};
use hyplab::json::{self, ScalarFormat};
use hyplab::{BCMatrix, BCVector, Bicomplex, DNormConfig, DPlus, DSeminorm, Hyperbolic, OrderRel};
use proptest::prelude::*;

const REL: f64 = 1e-12;

fn real() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

fn bicomplex() -> impl Strategy<Value = Bicomplex> {
    prop::array::uniform4(real()).prop_map(|w| Bicomplex::from_real4(w).unwrap())
}

fn hyperbolic() -> impl Strategy<Value = Hyperbolic> {
    (real(), real()).prop_map(|(a, b)| Hyperbolic::new(a, b).unwrap())
}

fn dplus() -> impl Strategy<Value = DPlus> {
    (0.0..1e3f64, 0.0..1e3f64).prop_map(|(a, b)| DPlus::new(a, b).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = BCVector> {
    prop::collection::vec(bicomplex(), n).prop_map(|e| BCVector::from_entries(&e).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BCMatrix> {
    prop::collection::vec(bicomplex(), rows * cols).prop_map(move |e| BCMatrix::from_entries(rows, cols, &e).unwrap())
}

fn close4(a: [f64; 4], b: [f64; 4], scale: f64) -> bool {
    let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d <= REL * scale.max(1.0)
}

fn close_bc(a: Bicomplex, b: Bicomplex, scale: f64) -> bool {
    close4(a.to_real4(), b.to_real4(), scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn product_matches_multiplication_table(a in bicomplex(), b in bicomplex()) {
        let want = oracle::table_mul(a.to_real4(), b.to_real4());
        prop_assert!(close4((a * b).to_real4(), want, 4.0 * a.euclid_norm() * b.euclid_norm()));
    }

    #[test]
    fn ring_axioms(a in bicomplex(), b in bicomplex(), c in bicomplex()) {
        let s = 4.0 * a.euclid_norm() * b.euclid_norm() * c.euclid_norm().max(1.0);
        prop_assert!(close_bc(a * b, b * a, s));
        prop_assert!(close_bc((a * b) * c, a * (b * c), s));
        prop_assert!(close_bc(a * (b + c), a * b + a * c, s));
        prop_assert!(close_bc(a + (b + c), (a + b) + c, s));
        prop_assert_eq!(a * Bicomplex::ONE, a);
        prop_assert!((a - a).is_zero());
    }

    #[test]
    fn cartesian_round_trip(w in prop::array::uniform4(real())) {
        let z = Bicomplex::from_real4(w).unwrap();
        prop_assert!(close4(z.to_real4(), w, oracle::real4_norm(w)));
        prop_assert!((z.euclid_norm() - oracle::real4_norm(w)).abs() <= REL * oracle::real4_norm(w).max(1.0));
    }

    #[test]
    fn knorm_properties(a in bicomplex(), b in bicomplex()) {
        let prod = (a * b).knorm();
        let want = a.knorm() * b.knorm();
        for c in 0..2 {
            prop_assert!((prod.components()[c] - want.components()[c]).abs() <= REL * want.components()[c].max(1.0));
            prop_assert!(a.knorm().components()[c] <= 2f64.sqrt() * a.euclid_norm() * (1.0 + REL));
        }
    }

    #[test]
    fn knorm_fixes_the_cone(alpha in dplus()) {
        prop_assert_eq!(Bicomplex::from(alpha).knorm(), alpha);
    }

    #[test]
    fn inverse_is_two_sided(a in bicomplex()) {
        prop_assume!(a.z1().norm() > 1e-3 && a.z2().norm() > 1e-3);
        let inv = a.inverse().unwrap();
        prop_assert!(close_bc(a * inv, Bicomplex::ONE, 1.0));
        prop_assert!(close_bc(inv * a, Bicomplex::ONE, 1.0));
    }

    #[test]
    fn partial_order(a in hyperbolic(), b in hyperbolic(), c in hyperbolic()) {
        prop_assert!(a.le(&a));
        if a.le(&b) && b.le(&a) {
            prop_assert_eq!(a, b);
        }
        if a.le(&b) && b.le(&c) {
            prop_assert!(a.le(&c));
        }
        let rel = a.compare(&b);
        prop_assert_eq!(rel == OrderRel::Incomparable, !a.le(&b) && !b.le(&a));
        prop_assert_eq!(a.le(&b), (b - a).in_cone());
    }

    #[test]
    fn sup_is_least_upper_bound(items in prop::collection::vec(hyperbolic(), 1..12)) {
        let sup = hyp_sup(items.iter().copied()).unwrap();
        let inf = hyp_inf(items.iter().copied()).unwrap();
        let pts: Vec<[f64; 2]> = items.iter().map(|h| h.components()).collect();
        prop_assert_eq!(sup.components(), oracle::brute_force_lub(&pts));
        for h in &items {
            prop_assert!(h.le(&sup));
            prop_assert!(inf.le(h));
        }
    }

    #[test]
    fn dnorm_axioms(x in vector(4), y in vector(4), mu in bicomplex()) {
        let cfg = DNormConfig::L2;
        let (nx, ny) = (x.dnorm(cfg), y.dnorm(cfg));
        prop_assert!(nx.hyperbolic().in_cone());
        prop_assert_eq!(nx.is_zero(), x.is_zero());
        let sum = (&x + &y).dnorm(cfg);
        prop_assert!(sum.le_tol(&(nx + ny), REL * (nx + ny).hyperbolic().max_component().max(1.0)));
        let scaled = x.scale(&mu).dnorm(cfg);
        let want = mu.knorm() * nx;
        for c in 0..2 {
            prop_assert!((scaled.components()[c] - want.components()[c]).abs() <= REL * want.components()[c].max(1.0));
        }
        let [o1, o2] = oracle::dnorm(&x);
        prop_assert!((nx.a1() - o1).abs() <= REL * o1.max(1.0) && (nx.a2() - o2).abs() <= REL * o2.max(1.0));
    }

    #[test]
    fn seminorm_is_subadditive_and_homogeneous(t in matrix(3, 4), x in vector(4), y in vector(4), mu in bicomplex()) {
        let p = DSeminorm::new(t.clone(), DNormConfig::L2);
        let (px, py) = (p.eval(&x).unwrap(), p.eval(&y).unwrap());
        let pxy = p.eval(&(&x + &y)).unwrap();
        let scale = (px + py).hyperbolic().max_component().max(1.0);
        prop_assert!(pxy.le_tol(&(px + py), REL * scale));
        let pmu = p.eval(&x.scale(&mu)).unwrap();
        let want = mu.knorm() * px;
        for c in 0..2 {
            prop_assert!((pmu.components()[c] - want.components()[c]).abs() <= REL * want.components()[c].max(1.0));
        }
        let o = oracle::seminorm(&t, &x);
        prop_assert!((px.a1() - o[0]).abs() <= REL * o[0].max(1.0) && (px.a2() - o[1]).abs() <= REL * o[1].max(1.0));
    }

    #[test]
    fn vector_json_round_trip(x in vector(3)) {
        let text = json::to_string(&x, ScalarFormat::Idempotent).unwrap();
        let back = json::parse_vector(&json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn operator_norm_is_sound(t in matrix(3, 3), x in vector(3)) {
        let m = hyplab::dop::op_dnorm(&t, 1e-10).unwrap().m;
        let tx = t.apply(&x).unwrap().dnorm(DNormConfig::L2);
        let bound = m * x.dnorm(DNormConfig::L2);
        prop_assert!(tx.le_tol(&bound, 1e-12 * bound.hyperbolic().max_component().max(1.0)));
    }
}
