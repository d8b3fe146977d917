//! Exercises the C entry points the way a foreign caller would: raw
//! pointers, status codes, and the opaque model handle lifecycle.

use bmcd_ffi::*;

fn dry_params() -> BmcdHdeGpd {
    BmcdHdeGpd { f1: 0.25, kappa: 1.0, sigma: 12.0, xi: 0.25 }
}

fn wet_params() -> BmcdGeomMix {
    BmcdGeomMix { pi: 0.4, p1: 0.7, p2: 0.2 }
}

#[test]
fn model_lifecycle_and_simulation() {
    unsafe {
        let mut model: *mut BmcdModel = std::ptr::null_mut();
        let status = bmcd_model_new(&dry_params(), &wet_params(), &mut model);
        assert_eq!(status, BmcdStatus::Ok);
        assert!(!model.is_null());

        let mut states = vec![0u8; 5000];
        let status = bmcd_model_simulate(model, states.len(), 7, states.as_mut_ptr());
        assert_eq!(status, BmcdStatus::Ok);
        assert_eq!(states[0], 0, "chain starts dry");
        assert!(states.contains(&1), "wet days occur");
        assert!(states.iter().all(|&s| s <= 1));

        // reproducibility across calls with the same seed
        let mut again = vec![0u8; 5000];
        bmcd_model_simulate(model, again.len(), 7, again.as_mut_ptr());
        assert_eq!(states, again);

        let mut bound = BmcdRiskBound { lower: 0.0, upper: 0.0, width: 0.0, u_used: 0 };
        let status = bmcd_model_mean_residual(model, 20, 1e-5, &mut bound);
        assert_eq!(status, BmcdStatus::Ok);
        assert!(bound.width < 1e-5);
        assert!(bound.lower > 0.0 && bound.lower <= bound.upper);

        let status = bmcd_model_proportion_long_dry(model, 20, 1e-5, &mut bound);
        assert_eq!(status, BmcdStatus::Ok);
        assert!(bound.lower >= 0.0 && bound.upper <= 1.0);

        bmcd_model_free(model);
        bmcd_model_free(std::ptr::null_mut()); // harmless
    }
}

#[test]
fn null_and_invalid_arguments_are_status_codes() {
    unsafe {
        let mut model: *mut BmcdModel = std::ptr::null_mut();
        assert_eq!(
            bmcd_model_new(std::ptr::null(), &wet_params(), &mut model),
            BmcdStatus::NullPointer
        );
        let bad = BmcdHdeGpd { f1: 1.5, kappa: 1.0, sigma: 1.0, xi: 0.0 };
        assert_eq!(
            bmcd_model_new(&bad, &wet_params(), &mut model),
            BmcdStatus::InvalidArgument
        );
        let mut p = 0.0;
        assert_eq!(bmcd_fit_geometric(std::ptr::null(), 3, &mut p), BmcdStatus::NullPointer);
        let durations = [2u32, 2, 2, 2];
        assert_eq!(
            bmcd_fit_geometric(durations.as_ptr(), durations.len(), &mut p),
            BmcdStatus::Ok
        );
        assert_eq!(p, 0.5);
        let zeros = [0u32; 4];
        assert_eq!(
            bmcd_fit_geometric(zeros.as_ptr(), zeros.len(), &mut p),
            BmcdStatus::InvalidArgument
        );
    }
}

#[test]
fn round_trip_fit_through_the_abi() {
    // simulate durations with the library, fit back through the C surface
    use bmcd::distributions::DurationDistribution;
    use bmcd::seeding::rng_from_seed;
    let law = bmcd::distributions::HdeGpdParams::new(0.25, 1.0, 12.0, 0.25).unwrap();
    let mut rng = rng_from_seed(99);
    let dry: Vec<u32> = (0..6000).map(|_| law.sample(&mut rng)).collect();
    unsafe {
        let mut params = BmcdHdeGpd { f1: 0.0, kappa: 0.0, sigma: 0.0, xi: 0.0 };
        let mut diag = BmcdFitDiagnostics {
            converged: 0,
            iterations: 0,
            objective: 0.0,
            restart_index: 0,
        };
        let status = bmcd_fit_hdegpd(dry.as_ptr(), dry.len(), &mut params, &mut diag);
        assert_eq!(status, BmcdStatus::Ok);
        assert_eq!(diag.converged, 1);
        assert!((params.f1 - 0.25).abs() < 0.03, "f1 {}", params.f1);
        assert!(params.xi > 0.1 && params.xi < 0.4, "xi {}", params.xi);

        let mut gof = BmcdGofResult { statistic: 0.0, dof: 0, p_value: 0.0, d_max: 0 };
        let status = bmcd_gof_hdegpd(dry.as_ptr(), dry.len(), &params, 0, 20, &mut gof);
        assert_eq!(status, BmcdStatus::Ok);
        assert!(gof.p_value > 0.0 && gof.p_value <= 1.0);
        assert_eq!(gof.dof, gof.d_max - 1);
    }

    let wet_law = bmcd::distributions::GeomMixParams::new(0.4, 0.7, 0.2).unwrap();
    let mut rng = rng_from_seed(100);
    let wet: Vec<u32> = (0..6000).map(|_| wet_law.sample(&mut rng)).collect();
    unsafe {
        let mut params = BmcdGeomMix { pi: 0.0, p1: 0.0, p2: 0.0 };
        let status = bmcd_fit_geommix(wet.as_ptr(), wet.len(), 5, &mut params, std::ptr::null_mut());
        assert_eq!(status, BmcdStatus::Ok);
        assert!(params.p1 >= params.p2);
        assert!((params.p2 - 0.2).abs() < 0.05, "p2 {}", params.p2);
    }
}

#[test]
fn pmf_and_survival_are_exposed() {
    let p = dry_params();
    let pmf1 = bmcd_hdegpd_pmf(p, 1);
    assert!((pmf1 - 0.25).abs() < 1e-12);
    assert_eq!(bmcd_hdegpd_survival(p, 0), 1.0);
    assert!(bmcd_hdegpd_pmf(p, 0).is_nan());
    let bad = BmcdHdeGpd { f1: 0.2, kappa: -1.0, sigma: 1.0, xi: 0.0 };
    assert!(bmcd_hdegpd_pmf(bad, 2).is_nan());

    let w = wet_params();
    let want = 0.4 * 0.7 + 0.6 * 0.2;
    assert!((bmcd_geommix_pmf(w, 1) - want).abs() < 1e-12);
    assert!((bmcd_geommix_survival(w, 0) - 1.0).abs() < 1e-15);
}

#[test]
fn gof_geometric_against_true_law() {
    use bmcd::distributions::DurationDistribution;
    use bmcd::seeding::rng_from_seed;
    let law = bmcd::distributions::GeometricParams::new(0.4).unwrap();
    let mut rng = rng_from_seed(606);
    let sample: Vec<u32> = (0..5000).map(|_| law.sample(&mut rng)).collect();
    unsafe {
        let mut gof = BmcdGofResult { statistic: 0.0, dof: 0, p_value: 0.0, d_max: 0 };
        let status = bmcd_gof_geometric(sample.as_ptr(), sample.len(), 0.4, 0, 20, &mut gof);
        assert_eq!(status, BmcdStatus::Ok);
        assert!(gof.statistic >= 0.0);
        // invalid p
        assert_eq!(
            bmcd_gof_geometric(sample.as_ptr(), sample.len(), 0.0, 0, 20, &mut gof),
            BmcdStatus::InvalidArgument
        );
    }
}
