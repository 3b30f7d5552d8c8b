//! Weighted nonlinear least squares and the standard fit forms.

mod lm;
mod models;

pub use lm::{fit, fit_with, numeric_jacobian, FitModel, FitOptions, FitResult, GuessFn, JacobianFn, ModelFn, Parameter};
pub use models::{
    four_lorentzian_centers, model_by_name, model_cubic_linewidth, model_damped_rabi, model_exponential, model_fano,
    model_four_lorentzian, model_linear, model_lorentzian, model_saturation, MODEL_NAMES,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, Normal};

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    fn recover(model: &FitModel, truth: &[f64], x: &[f64], tol: f64) {
        let y = model.predict(truth, x);
        let r = fit(model, x, &y, None, None).unwrap();
        for (k, (&got, &want)) in r.parameters.iter().zip(truth).enumerate() {
            let scale = want.abs().max(1e-3);
            assert!((got - want).abs() <= tol * scale, "{} param {k}: got {got}, want {want}", model.name);
        }
    }

    #[test]
    fn zero_noise_recovery() {
        recover(&model_lorentzian(), &[-0.18, 3.0, 40.0, 1.0], &grid(-200.0, 200.0, 201), 1e-8);
        recover(&model_exponential(), &[-0.9, 6.0, 1.0], &grid(-40.0, 40.0, 161), 1e-8);
        recover(&model_saturation(), &[5.0e6, 2.0], &grid(0.05, 20.0, 60), 1e-8);
        recover(&model_damped_rabi(), &[0.35, 0.21, 0.15, 0.4, 0.3], &grid(0.0, 30.0, 400), 1e-8);
        recover(&model_cubic_linewidth(), &[0.0, 1.9e-7, -13.0], &grid(50.0, 300.0, 40), 1e-8);
        recover(&model_linear(), &[19.6, 0.88], &grid(1.0, 10.0, 12), 1e-8);
        recover(&model_fano(), &[0.5, 0.2, 10.0, 30.0, 1.0], &grid(-150.0, 150.0, 151), 1e-8);
    }

    #[test]
    fn four_lorentzian_recovers_centers() {
        let model = model_four_lorentzian();
        let truth = [1.0, -152.0, 30.0, 0.6, 152.0, 30.0, 0.8, 829.0, 30.0, 0.4, 152.0, 30.0, 0.02];
        let x = grid(-400.0, 1200.0, 1601);
        let y = model.predict(&truth, &x);
        let r = fit(&model, &x, &y, None, None).unwrap();
        let want = four_lorentzian_centers(&truth);
        let got = four_lorentzian_centers(&r.parameters);
        for k in 0..4 {
            assert_relative_eq!(got[k], want[k], epsilon = 1e-6);
        }
    }

    #[test]
    fn lorentzian_with_noise_median_error() {
        let model = model_lorentzian();
        let truth = [1.0, 15.0, 20.0, 0.1];
        let x = grid(-100.0, 100.0, 200);
        let clean = model.predict(&truth, &x);
        let mut errs = Vec::new();
        for seed in 0..100 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let y: Vec<f64> = clean.iter().map(|v| v + 0.02 * Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
            let r = fit(&model, &x, &y, None, None).unwrap();
            let center = (r.parameters[1] - truth[1]).abs() / truth[1];
            let fwhm = (r.parameters[2] - truth[2]).abs() / truth[2];
            errs.push(center.max(fwhm));
        }
        errs.sort_by(f64::total_cmp);
        assert!(errs[50] < 0.01, "median error {}", errs[50]);
    }

    #[test]
    fn linear_matches_closed_form_wls() {
        let x = grid(0.0, 9.0, 10);
        let y: Vec<f64> = x.iter().enumerate().map(|(k, v)| 2.0 + 0.5 * v + if k % 2 == 0 { 0.3 } else { -0.2 }).collect();
        let s: Vec<f64> = (0..10).map(|k| 0.1 + 0.05 * k as f64).collect();
        let w: Vec<f64> = s.iter().map(|v| 1.0 / (v * v)).collect();
        let sw: f64 = w.iter().sum();
        let swx: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        let swy: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
        let swxx: f64 = w.iter().zip(&x).map(|(a, b)| a * b * b).sum();
        let swxy: f64 = w.iter().zip(&x).zip(&y).map(|((a, b), c)| a * b * c).sum();
        let det = sw * swxx - swx * swx;
        let slope = (sw * swxy - swx * swy) / det;
        let intercept = (swxx * swy - swx * swxy) / det;
        let r = fit(&model_linear(), &x, &y, Some(&s), None).unwrap();
        assert_relative_eq!(r.parameters[0], intercept, epsilon = 1e-10);
        assert_relative_eq!(r.parameters[1], slope, epsilon = 1e-10);
        assert_relative_eq!(r.uncertainties[1], (sw / det).sqrt(), epsilon = 1e-10);
        assert_relative_eq!(r.uncertainties[0], (swxx / det).sqrt(), epsilon = 1e-10);
    }

    /// Richardson-extrapolated central difference, an independent
    /// derivative oracle for the analytic Jacobians.
    fn richardson(model: &FitModel, p: &[f64], x: f64, k: usize) -> f64 {
        let d = |h: f64| {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[k] += h;
            b[k] -= h;
            (model.eval(&a, x) - model.eval(&b, x)) / (2.0 * h)
        };
        let h = 1e-3 * p[k].abs().max(1e-2);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn analytic_jacobians_match_oracle() {
        let cases: Vec<(FitModel, Vec<f64>, Vec<f64>)> = vec![
            (model_lorentzian(), vec![0.7, 2.0, 15.0, 0.3], grid(-40.0, 40.0, 9)),
            (model_exponential(), vec![0.7, 5.0, 1.0], grid(-20.0, 20.0, 9)),
            (model_saturation(), vec![3.0, 1.5], grid(0.1, 10.0, 9)),
            (model_damped_rabi(), vec![0.4, 0.2, 0.1, 0.3, 0.5], grid(0.0, 20.0, 9)),
            (model_cubic_linewidth(), vec![0.1, 2e-7, -13.0], grid(50.0, 300.0, 9)),
            (model_linear(), vec![1.0, 2.0], grid(-1.0, 1.0, 5)),
        ];
        for (model, p, xs) in cases {
            let j = model.analytic_jacobian(&p, &xs).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                for k in 0..p.len() {
                    let want = richardson(&model, &p, x, k);
                    let scale = want.abs().max(1e-6);
                    assert!((j[(i, k)] - want).abs() < 1e-6 * scale.max(1.0), "{} d/dp{k} at {x}", model.name);
                }
            }
        }
    }

    #[test]
    fn redundant_parameters_are_rank_deficient() {
        let model = FitModel::new("redundant", vec![Parameter::free("a"), Parameter::free("b")], |p, x| (p[0] + p[1]) * x);
        let x = grid(0.0, 1.0, 10);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        match fit(&model, &x, &y, None, Some(&[1.0, 1.0])) {
            Err(Error::RankDeficient { parameter }) => assert!(parameter == "a" || parameter == "b"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn saturation_midpoint_is_isat() {
        let truth = [4.0, 3.0];
        let m = model_saturation();
        assert_relative_eq!(m.eval(&truth, 3.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn model_names_resolve() {
        for n in MODEL_NAMES {
            assert_eq!(model_by_name(n).unwrap().name, n);
        }
        assert!(model_by_name("nope").is_none());
        assert!(model_fano().note.is_some());
    }

    #[test]
    fn bad_inputs_rejected() {
        let m = model_linear();
        assert!(fit(&m, &[1.0, 2.0], &[1.0], None, None).is_err());
        assert!(fit(&m, &[1.0, 2.0], &[1.0, 2.0], None, None).is_err());
        assert!(fit(&m, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], Some(&[1.0, 0.0, 1.0]), None).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn lorentzian_fit_is_scale_equivariant(scale in 0.1f64..10.0, center in -5.0f64..5.0) {
            let m = model_lorentzian();
            let truth = [1.0, center, 8.0, 0.2];
            let x = grid(-50.0, 50.0, 101);
            let mut rng = ChaCha20Rng::seed_from_u64(7);
            let noise: Vec<f64> = (0..x.len()).map(|_| 0.01 * Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
            let y: Vec<f64> = m.predict(&truth, &x).iter().zip(&noise).map(|(a, b)| a + b).collect();
            let base = fit(&m, &x, &y, None, None).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let scaled = fit(&m, &xs, &y, None, None).unwrap();
            prop_assert!((scaled.parameters[1] - base.parameters[1] * scale).abs() < 1e-6 * scale.max(1.0));
            prop_assert!((scaled.parameters[2] - base.parameters[2] * scale).abs() < 1e-6 * scale.max(1.0));
            prop_assert!((scaled.parameters[0] - base.parameters[0]).abs() < 1e-6);
        }

        #[test]
        fn fit_is_permutation_invariant(seed in 0u64..1000) {
            let m = model_lorentzian();
            let x = grid(-50.0, 50.0, 61);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let y: Vec<f64> = m.predict(&[1.0, 1.0, 10.0, 0.0], &x).iter()
                .map(|v| v + 0.01 * Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
            let init = [0.9, 0.5, 12.0, 0.0];
            let a = fit(&m, &x, &y, None, Some(&init)).unwrap();
            let mut idx: Vec<usize> = (0..x.len()).collect();
            idx.reverse();
            idx.rotate_left((seed % 61) as usize);
            let xp: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let yp: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            let b = fit(&m, &xp, &yp, None, Some(&init)).unwrap();
            for k in 0..4 {
                prop_assert!((a.parameters[k] - b.parameters[k]).abs() < 1e-7 * a.parameters[k].abs().max(1.0));
            }
        }
    }
}
