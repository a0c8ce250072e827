use ctoa::dynamics::{expand_packet, ExpandOptions};
use ctoa::kijowski::Kijowski;
use ctoa::spectrum::{eigenvalues, BoxConfig, Parity};
use ctoa::states::{GaussianSpec, Units, WavePacket, WidthConvention};
use num_complex::Complex64;
use proptest::prelude::*;

fn packet(x0: f64, p0: f64, w: f64) -> WavePacket {
    WavePacket::new(&[GaussianSpec::new(x0, p0, w)], WidthConvention::Fwhm, Units::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn box_evolution_is_unitary_and_composes(t1 in -0.5f64..0.5, t2 in -0.5f64..0.5) {
        let e = expand_packet(&packet(-0.5, 6.0, 0.3), &BoxConfig::periodic(3.0).unwrap(), ExpandOptions::default()).unwrap();
        let a = e.evolve(t1).evolve(t2);
        let b = e.evolve(t1 + t2);
        prop_assert!((a.norm_sqr() - e.norm_sqr()).abs() < 1e-12);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn kijowski_density_is_covariant(tau in -0.4f64..0.4, t in -0.3f64..0.6) {
        let pk = packet(-1.0, 4.0, 0.4);
        let k = Kijowski::default();
        let a = k.density(&pk.evolved(tau).unwrap(), t).unwrap();
        let b = k.density(&pk, t + tau).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b.max(1e-300));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn parity_parts_are_orthogonal(x0 in -1.0f64..1.0, p0 in -5.0f64..5.0, w in 0.1f64..0.8, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let pk = WavePacket::new(
            &[GaussianSpec::new(x0, p0, w), GaussianSpec::new(-0.3, 1.0, 0.5).with_weight(Complex64::new(re, im))],
            WidthConvention::Fwhm,
            Units::default(),
        ).unwrap();
        let e = pk.even_part();
        let o = pk.odd_part();
        prop_assert!(e.inner(&o).unwrap().norm() < 1e-12);
        prop_assert!((e.norm_sqr().unwrap() + o.norm_sqr().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_is_symmetric_and_ordered(l in 0.5f64..20.0, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let recs = eigenvalues(&BoxConfig::periodic(l).unwrap(), parity, 30).unwrap();
        let mut pos: Vec<f64> = recs.iter().filter(|r| r.tau > 0.0).map(|r| r.tau).collect();
        let mut neg: Vec<f64> = recs.iter().filter(|r| r.tau < 0.0).map(|r| -r.tau).collect();
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        prop_assert_eq!(&pos, &neg);
        prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }
}
