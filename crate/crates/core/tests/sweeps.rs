use opo_sideband::config::OpoConfig;
use opo_sideband::pipeline::{sweep, Grid, SweepAxis};

fn grid(s: &str) -> Grid {
    s.parse().unwrap()
}

#[test]
fn cross_block_grows_on_the_low_frequency_branch() {
    // the reference cavity's cross-block norm peaks near 8 MHz
    let points = sweep(&OpoConfig::reference(), SweepAxis::Omega, &grid("1e6:7e6:13"));
    let norms: Vec<f64> = points.iter().map(|p| p.outcome.as_ref().unwrap().blocks.cross_norm()).collect();
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
    assert!(norms[0] < 0.2);
}

#[test]
fn cross_block_vanishes_far_outside_the_linewidth() {
    let points = sweep(&OpoConfig::reference(), SweepAxis::Omega, &grid("1e6:2e8:12"));
    let norms: Vec<f64> = points.iter().map(|p| p.outcome.as_ref().unwrap().blocks.cross_norm()).collect();
    let peak = norms.iter().cloned().fold(0.0, f64::max);
    assert!(norms[11] < 0.1 * peak, "{norms:?}");
}

#[test]
fn sigma_sweep_is_smooth_and_finite() {
    let points = sweep(&OpoConfig::reference(), SweepAxis::Sigma, &grid("1.05:1.75:15"));
    let corr: Vec<f64> = points
        .iter()
        .map(|p| {
            let s = p.outcome.as_ref().unwrap();
            assert!(s.covariance.matrix.iter().all(|x| x.is_finite()));
            s.blocks.v_s[(2, 4)]
        })
        .collect();
    let steps: Vec<f64> = corr.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let largest = steps.iter().cloned().fold(0.0, f64::max);
    assert!(largest < 0.1, "{corr:?}");
}

#[test]
fn twin_beam_noise_is_independent_of_pump() {
    let points = sweep(&OpoConfig::reference(), SweepAxis::Sigma, &grid("1.05:1.75:8"));
    let twin: Vec<f64> =
        points.iter().map(|p| p.outcome.as_ref().unwrap().blocks.amplitude_difference_variance()).collect();
    for t in &twin {
        assert!((t - twin[0]).abs() < 1e-10, "{twin:?}");
    }
}

#[test]
fn detection_loss_pulls_towards_shot_noise() {
    let base = OpoConfig::reference();
    let ideal = sweep(&base, SweepAxis::Sigma, &grid("1.1:1.7:4"));
    let lossy = sweep(&base.with_detection(true), SweepAxis::Sigma, &grid("1.1:1.7:4"));
    for (a, b) in ideal.iter().zip(&lossy) {
        let (a, b) = (a.outcome.as_ref().unwrap(), b.outcome.as_ref().unwrap());
        let ta = a.blocks.amplitude_difference_variance();
        let tb = b.blocks.amplitude_difference_variance();
        assert!(ta < tb && tb < 1.0);
    }
}
