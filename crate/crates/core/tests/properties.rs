use std::sync::OnceLock;

use proptest::prelude::*;
use qspace_core::calculus::Calculus;
use qspace_core::exterior::{Exterior, Form};
use qspace_core::structures::presets;
use qspace_core::suite::{random_poly, random_scalar};
use qspace_core::waves::DispersionModel;
use qspace_core::{NCPoly, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn epsilon() -> &'static Calculus {
    static C: OnceLock<Calculus> = OnceLock::new();
    C.get_or_init(|| Calculus::new(&presets::epsilon(Scalar::from_ratio(1, 2), 5)).unwrap())
}

fn twist() -> &'static Calculus {
    static C: OnceLock<Calculus> = OnceLock::new();
    C.get_or_init(|| Calculus::new(&presets::n2twist(Scalar::from_parts((0, 1), (1, 3)), 6)).unwrap())
}

fn calcs() -> [&'static Calculus; 2] {
    [epsilon(), twist()]
}

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| Scalar::from_parts((a, b), (c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn multiplication_is_associative(seed in any::<u64>(), which in 0usize..2) {
        let calc = calcs()[which];
        let e = calc.engine();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c] = [0; 3].map(|_| random_poly(e, e.cutoff() / 3, 3, &mut rng));
        let left = e.multiply(&e.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = e.multiply(&a, &e.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn normal_form_is_a_projection(seed in any::<u64>(), which in 0usize..2) {
        let e = calcs()[which].engine();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(e, 2, 3, &mut rng);
        let b = random_poly(e, 2, 3, &mut rng);
        let free = a.free_mul(&b);
        let nf = e.normal_form(&free).unwrap();
        prop_assert!(e.is_normal(&nf));
        prop_assert_eq!(e.normal_form(&nf).unwrap(), nf.clone());
        prop_assert_eq!(nf, e.multiply(&a, &b).unwrap());
    }

    #[test]
    fn star_is_an_antilinear_antihomomorphism(seed in any::<u64>(), which in 0usize..2) {
        let e = calcs()[which].engine();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(e, 2, 3, &mut rng);
        let b = random_poly(e, 2, 3, &mut rng);
        let c = random_scalar(&mut rng);
        let ab = e.multiply(&a, &b).unwrap();
        prop_assert_eq!(e.star(&ab).unwrap(), e.multiply(&e.star(&b).unwrap(), &e.star(&a).unwrap()).unwrap());
        prop_assert_eq!(e.star(&a.scale(&c)).unwrap(), e.star(&a).unwrap().scale(&c.conj()));
        prop_assert_eq!(e.star(&e.star(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), which in 0usize..2) {
        let calc = calcs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(calc.engine(), 2, 3, &mut rng);
        let b = random_poly(calc.engine(), 2, 3, &mut rng);
        prop_assert_eq!(calc.check_leibniz(&a, &b), Ok(()));
        prop_assert!(calc.d0(&NCPoly::constant(random_scalar(&mut rng))).unwrap().is_zero());
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in any::<u64>()) {
        let calc = twist();
        let ext = Exterior::new(calc, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for degree in 0..2 {
            let mut w: Form = ext.zero(degree).unwrap();
            for c in w.coeffs.iter_mut() {
                *c = random_poly(calc.engine(), 2, 2, &mut rng);
            }
            prop_assert_eq!(ext.check_dd(&w), Ok(()));
        }
    }

    #[test]
    fn epsilon_mass_is_real_and_parity_even(p in prop::array::uniform4(-4.0f64..4.0)) {
        let model = DispersionModel::new(epsilon().structure(), 0.0).unwrap();
        let m2 = model.mass_squared_complex(&p).unwrap();
        prop_assert!(m2.im.abs() / (1.0 + m2.norm()) < 1e-10);
        let flipped = [p[0], -p[1], p[2], p[3]];
        let m2f = model.mass_squared(&flipped).unwrap();
        prop_assert!((m2.re - m2f).abs() <= 1e-10 * (1.0 + m2.re.abs()));
    }
}
