use capmimo_core::models::{mi_discrete_rx, mi_discrete_trx_at, noise_rx};
use capmimo_core::physics::{green_scalar, kernel_value};
use capmimo_core::spectra::{hermitian_eigenvalues, midpoint_grid, DEFAULT_CLAMP_REL};
use capmimo_core::{Channel, HermitianKernelMatrix, SystemConfig};
use proptest::prelude::*;

const INNER: usize = 256;

fn coarse(d: f64, power: f64) -> SystemConfig {
    SystemConfig::new(0.2, 2.0, d, power, 2.0).unwrap()
}

fn distance() -> impl Strategy<Value = f64> {
    (-1.0f64..2.3).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn green_is_translation_invariant(d in distance(), r in -3.0f64..3.0, s in -3.0f64..3.0, t in -2.0f64..2.0) {
        let c = coarse(d, 1.0);
        let a = green_scalar(r, s, &c);
        let b = green_scalar(r + t, s + t, &c);
        // the offset r − s is recomputed after the shift
        prop_assert!((a - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn kernel_is_hermitian(d in distance(), r in 0.0f64..2.0, rp in 0.0f64..2.0) {
        let c = coarse(d, 1.0);
        let k = kernel_value(r, rp, &c, INNER).unwrap();
        prop_assert_eq!(k, kernel_value(rp, r, &c, INNER).unwrap().conj());
    }

    #[test]
    fn kernel_matrix_spectrum_sums_to_trace(d in distance(), m in 2usize..24) {
        let grid = midpoint_grid(2.0, m).unwrap();
        let k = HermitianKernelMatrix::sampled_kernel(grid.points(), &coarse(d, 1.0), INNER).unwrap();
        let spec = hermitian_eigenvalues(&k, DEFAULT_CLAMP_REL).unwrap();
        prop_assert!((spec.sum() - k.trace()).abs() <= 1e-10 * k.trace());
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn receiver_mi_grows_with_power(d in distance(), m in 2usize..16, p in 0.01f64..10.0, factor in 1.1f64..10.0) {
        let lo = mi_discrete_rx(m, &Channel::new(coarse(d, p), INNER).unwrap()).unwrap();
        let hi = mi_discrete_rx(m, &Channel::new(coarse(d, p * factor), INNER).unwrap()).unwrap();
        prop_assert!(hi.value_nats >= lo.value_nats);
        prop_assert!(lo.value_nats >= 0.0);
    }

    #[test]
    fn noise_control_is_power_free(d in distance(), m in 1usize..40, p in 0.01f64..100.0) {
        let grid = midpoint_grid(2.0, m).unwrap();
        let a = noise_rx(&grid, &Channel::new(coarse(d, 1.0), INNER).unwrap()).unwrap();
        let b = noise_rx(&grid, &Channel::new(coarse(d, p), INNER).unwrap()).unwrap();
        prop_assert_eq!(a.n_value, b.n_value);
    }

    #[test]
    fn receiver_spectrum_is_permutation_invariant(d in distance(), perm in Just((0..10).collect::<Vec<usize>>()).prop_shuffle()) {
        let grid = midpoint_grid(2.0, 10).unwrap();
        let k = HermitianKernelMatrix::sampled_kernel(grid.points(), &coarse(d, 1.0), INNER).unwrap();
        let shuffled: Vec<f64> = perm.iter().map(|&i| grid.points()[i]).collect();
        let kp = HermitianKernelMatrix::sampled_kernel(&shuffled, &coarse(d, 1.0), INNER).unwrap();
        prop_assert_eq!(&kp, &k.permuted(&perm).unwrap());
        let a = hermitian_eigenvalues(&k, DEFAULT_CLAMP_REL).unwrap();
        let b = hermitian_eigenvalues(&kp, DEFAULT_CLAMP_REL).unwrap();
        let top = a.max();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-11 * top);
        }
    }

    #[test]
    fn transceiver_mi_ignores_transmit_order(d in distance(), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let ch = Channel::new(coarse(d, 1.0), INNER).unwrap();
        let rx = midpoint_grid(2.0, 5).unwrap();
        let tx = midpoint_grid(2.0, 6).unwrap();
        let shuffled: Vec<f64> = perm.iter().map(|&i| tx.points()[i]).collect();
        let a = mi_discrete_trx_at(rx.points(), tx.points(), &ch).unwrap();
        let b = mi_discrete_trx_at(rx.points(), &shuffled, &ch).unwrap();
        prop_assert_eq!(a.value_nats, b.value_nats);
    }
}
