use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sopq_flags::components::{realize_sign_matrix, sign_matrix_of};
use sopq_flags::flag::ThetaSet;
use sopq_flags::involution::involution_coords;
use sopq_flags::io::CoordsJson;
use sopq_flags::linalg::Matrix;
use sopq_flags::quadratic::{gram_matrix, Signature};
use sopq_flags::sign_matrix::SignMatrix;
use sopq_flags::transversality::{check_identities, s_matrix};
use sopq_flags::unipotent::{psi, psi_inverse, Chart, UnipotentCoords};

const SETS: &[(usize, usize, &str)] = &[
    (4, 2, "1"),
    (4, 2, "1,2"),
    (5, 3, "1,2"),
    (5, 3, "1,3"),
    (5, 3, "1,2,3"),
    (4, 3, "1,2,3"),
    (6, 4, "2,4"),
    (4, 4, "4,qp"),
    (3, 3, "1,3,qp"),
];

fn point(set: usize, seed: u64) -> UnipotentCoords {
    let (p, q, t) = SETS[set];
    let th = ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap();
    UnipotentCoords::random(&Chart::new(&th), &mut ChaCha8Rng::seed_from_u64(seed), 9)
}

fn sample() -> impl Strategy<Value = UnipotentCoords> {
    (0..SETS.len(), any::<u64>()).prop_map(|(s, seed)| point(s, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chart_elements_preserve_the_form(c in sample()) {
        let m = gram_matrix(c.chart.sig());
        let u = psi(&c);
        prop_assert_eq!(&(&u.transpose() * &m) * &u, m);
    }

    #[test]
    fn coordinates_are_recovered_from_the_matrix(c in sample()) {
        prop_assert_eq!(psi_inverse(&c.chart, &psi(&c)).unwrap(), c);
    }

    #[test]
    fn flatten_round_trips(c in sample()) {
        prop_assert_eq!(UnipotentCoords::unflatten(&c.chart, &c.flatten()).unwrap(), c);
    }

    #[test]
    fn json_round_trips(c in sample()) {
        prop_assert_eq!(CoordsJson::from_coords(&c).to_coords().unwrap(), c);
    }

    #[test]
    fn minor_identities_hold(c in sample()) {
        let report = check_identities(&c);
        prop_assert!(report.ok(), "{:?}", report.failed);
    }

    #[test]
    fn involution_inverts_and_transposes(c in sample()) {
        let ic = involution_coords(&c);
        prop_assert_eq!(&psi(&ic) * &psi(&c), Matrix::identity(c.chart.n()));
        prop_assert_eq!(s_matrix(&ic), s_matrix(&c).transpose());
        prop_assert_eq!(involution_coords(&ic), c);
    }

    #[test]
    fn alterations_are_symmetric(q in 2usize..=5, key in any::<u64>()) {
        let total = SignMatrix::all(q).count() as u64;
        let m = SignMatrix::from_key(q, key % total);
        for n in m.alterations() {
            prop_assert!(n.alterations().contains(&m), "{} -> {}", m, n);
        }
    }

    #[test]
    fn sign_matrix_text_round_trips(q in 2usize..=5, key in any::<u64>()) {
        let total = SignMatrix::all(q).count() as u64;
        let m = SignMatrix::from_key(q, key % total);
        prop_assert_eq!(SignMatrix::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn realized_sign_matrices_are_read_back(key in any::<u64>()) {
        let sig = Signature::new(6, 4).unwrap();
        let total = SignMatrix::all(4).count() as u64;
        let m = SignMatrix::from_key(4, key % total);
        if let Ok(c) = realize_sign_matrix(sig, &m) {
            prop_assert_eq!(sign_matrix_of(sig, &sopq_flags::unipotent::psi_chart(&c)).unwrap(), m);
        }
    }
}
