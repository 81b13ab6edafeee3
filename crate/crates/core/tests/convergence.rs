//! Observed orders of the time and depth integrators against the closed-form
//! solutions, which are exact for any discrete detuning ensemble.

mod common;

use common::*;
use mixonium::analytic::{mixonium_density_matrix, mixonium_pulses, AnalyticParams};
use mixonium::matrix::Rho;
use mixonium::medium::{make_detuning_ensemble, Grid};
use mixonium::propagator::{bloch_integrate, propagate, seed_with_analytic, Fields, Scenario};

fn time_error(p: &AnalyticParams, kz: f64, delta: f64, dt: f64) -> f64 {
    let z = kz / p.kappa;
    let (t0, t1) = (-60.0, 40.0);
    let n = ((t1 - t0) / dt).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|j| t0 + j as f64 * dt).collect();
    let (a, b): (Vec<_>, Vec<_>) = times.iter().map(|&t| mixonium_pulses(p, z, t)).unzip();
    let rho0 = Rho::from_matrix(&mixonium_density_matrix(p, delta, z, t0));
    let rhos = bloch_integrate(&rho0, &a, &b, delta, dt).unwrap();
    rhos.iter()
        .zip(&times)
        .map(|(r, &t)| frob(&(r.to_matrix() - mixonium_density_matrix(p, delta, z, t))))
        .fold(0.0, f64::max)
}

#[test]
fn bloch_integrator_is_fourth_order_in_time() {
    let ens = make_detuning_ensemble(1.0, 41).unwrap();
    let mu = half_speed_mu(&ens);
    for (lambda, kz, delta) in [(1.0, -2.0, 0.0), (0.8, 0.5, 0.7), (0.2, 1.5, -1.3)] {
        let p = AnalyticParams::from_medium(prep(0.8, lambda), mu, TAU, &ens);
        let e1 = time_error(&p, kz, delta, 0.2);
        let e2 = time_error(&p, kz, delta, 0.1);
        let order = (e1 / e2).log2();
        println!("λ={lambda}: {e1:.3e} → {e2:.3e}, order {order:.2}");
        assert!((order - 4.0).abs() < 0.3, "λ={lambda}: errors {e1:.3e} → {e2:.3e}, order {order:.2}");
    }
}

fn depth_error(dz_kappa: f64) -> f64 {
    let ens = make_detuning_ensemble(1.0, 9).unwrap();
    let mu = half_speed_mu(&ens);
    let p = AnalyticParams::from_medium(prep(0.8, 0.8), mu, TAU, &ens);
    let (z0, z1) = (-4.0 / p.kappa, -2.0 / p.kappa);
    let n_z = ((z1 - z0) * p.kappa / dz_kappa).round() as usize + 1;
    let grid = Grid::new(-70.0, 50.0, 1601, z0, z1, n_z).unwrap();
    let empty = Fields::new(vec![c(0.0); 1601], vec![c(0.0); 1601]).unwrap();
    let sc = Scenario::with_fields(grid, mu, p.prep, ens, empty).unwrap().with_stride(n_z);
    let (sc, _) = seed_with_analytic(sc, &p, z0).unwrap();
    let traj = propagate(&sc).unwrap();
    let last = traj.last().unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &t) in traj.times.iter().enumerate() {
        let (a, b) = mixonium_pulses(&p, last.z, t);
        num += (last.omega_a[j] - a).norm_sqr() + (last.omega_b[j] - b).norm_sqr();
        den += a.norm_sqr() + b.norm_sqr();
    }
    (num / den).sqrt()
}

#[test]
fn maxwell_stepper_is_second_order_in_depth() {
    let e = [depth_error(0.2), depth_error(0.1), depth_error(0.05)];
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        println!("{:.3e} → {:.3e}, order {order:.2}", w[0], w[1]);
        assert!((order - 2.0).abs() < 0.3, "errors {e:?}, order {order:.2}");
    }
}
