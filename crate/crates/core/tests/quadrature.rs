//! Quadrature-backed checks of the exact layers on one-dimensional arrangements.

use proptest::prelude::*;
use spherule::cohomology::{standard_form, LambdaPoint};
use spherule::indices::dimension;
use spherule::random::random_arrangement;
use spherule::linalg::{frac, int};
use spherule::suites::quadrature_identities;
use spherule::verify::{chambers_1d, verify_gauss_manin, verify_identity, Integrand, Tangent};
use spherule::{Arrangement, IndexSet};

/// `f₁ = x² − 4`, `f₂ = x² − 6x + 5`.
fn standard() -> Arrangement {
    Arrangement::new(1, vec![vec![int(0), int(-4)], vec![int(-3), int(5)]]).unwrap()
}

fn three() -> Arrangement {
    Arrangement::from_centers(&[vec![int(0)], vec![frac(5, 2)], vec![frac(-7, 3)]], &[int(4), frac(9, 4), int(3)])
        .unwrap()
}

#[test]
fn standard_form_at_half_exponents() {
    let a = standard();
    let lam = LambdaPoint::new(vec![frac(1, 2), frac(1, 2)]);
    let chs = chambers_1d(&a).unwrap();
    let lhs = Integrand::f(2, IndexSet::EMPTY).scaled(&int(3));
    let rhs = Integrand::from_class(&a, &standard_form(&a, &lam).unwrap());
    let rep = verify_identity(&a, &[0.5, 0.5], &lhs, &rhs, &chs, 1e-6).unwrap();
    assert_eq!(rep.residuals.len(), 3);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn three_spheres_all_identities() {
    let a = three();
    let lam = LambdaPoint::new(vec![frac(5, 4), frac(3, 2), frac(7, 5)]);
    let cases = quadrature_identities(&a, &lam, 1e-6).unwrap();
    assert!(cases.iter().any(|c| c.name.starts_with("second-kind")));
    assert!(cases.iter().filter(|c| c.name.starts_with("lowering")).count() >= 8);
}

#[test]
fn moving_a_center() {
    let a = standard();
    let lam = LambdaPoint::new(vec![frac(3, 2), frac(5, 4)]);
    let t = Tangent::from([((2, 1), 1.0)]);
    let rep = verify_gauss_manin(&a, &lam, &t, 1e-3, 1e-5).unwrap();
    assert_eq!(rep.checks.len(), 9);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn changing_a_radius() {
    let a = three();
    let lam = LambdaPoint::new(vec![frac(3, 4), frac(4, 3), frac(2, 5)]);
    let t = Tangent::from([((1, 0), -1.0)]);
    let rep = verify_gauss_manin(&a, &lam, &t, 1e-3, 1e-5).unwrap();
    assert_eq!(rep.checks.len(), 25);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn tangent_of_zero_is_exact() {
    let a = three();
    let lam = LambdaPoint::new(vec![frac(3, 4), frac(4, 3), frac(2, 5)]);
    let rep = verify_gauss_manin(&a, &lam, &Tangent::new(), 1e-3, 1e-5).unwrap();
    assert!(rep.checks.iter().all(|c| c.residual == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn chamber_count_matches_dimension(seed in 0u64..10_000, m in 1usize..=5) {
        let a = random_arrangement(seed, 1, m, true).unwrap();
        let chs = chambers_1d(&a).unwrap();
        prop_assert_eq!(chs.len(), dimension(m, 1));
        prop_assert!(chs.iter().all(|c| c.a() < c.b()));
        prop_assert!(chs.windows(2).all(|w| w[0].b() == w[1].a()));
    }
}
