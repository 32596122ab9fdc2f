use std::f64::consts::PI;

use approx::assert_abs_diff_eq;

use super::*;
use crate::reference::exact_reference;

#[test]
fn zero_collisions_keeps_initial_sample() {
    let (p, s0) = exact_reference();
    let out = run(&s0, 0, &p).unwrap();
    assert!(out.events.is_empty() && out.reports.is_empty());
    assert_eq!(out.samples, vec![s0]);
    assert_eq!(out.termination, Termination::Completed);
}

#[test]
fn step_preserves_energy_axis_and_r() {
    let (p, s0) = exact_reference();
    let mut s = s0;
    for _ in 0..50 {
        let (next, ev) = step(&s, &p).unwrap();
        assert_abs_diff_eq!(ev.pre.twice_energy, ev.post.twice_energy, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ev.pre.semi_major_axis(),
            ev.post.semi_major_axis(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            conserved_r(&ev.pre, &p),
            conserved_r(&ev.post, &p),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(ev.lambda + ev.lambda_post, PI, epsilon = 1e-12);
        assert!((next.y - p.h).abs() < tol::EVENT);
        assert!(next.py < 0.0);
        assert!(next.t > s.t);
        s = next;
    }
}

#[test]
fn mirrored_start_gives_mirrored_impacts() {
    // aphelion straight up: the clockwise twin is the mirror image
    let p = Params::default();
    let s = crate::reference::from_elements(-0.5, 0.4, PI / 2.0, 1.0, &p);
    let m = crate::reference::from_elements(-0.5, 0.4, PI / 2.0, -1.0, &p);
    assert_abs_diff_eq!(s.x, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(s.px, -m.px, epsilon = 1e-15);
    let a = run(&s, 40, &p).unwrap();
    let b = run(&m, 40, &p).unwrap();
    assert_eq!(a.events.len(), 40);
    for (ea, eb) in a.events.iter().zip(&b.events) {
        assert_abs_diff_eq!(ea.x_impact, -eb.x_impact, epsilon = 1e-9);
        assert_abs_diff_eq!(ea.t, eb.t, epsilon = 1e-9);
    }
}

#[test]
fn invariants_hold_along_reference_run() {
    let (p, s0) = exact_reference();
    let out = run(&s0, 2000, &p).unwrap();
    assert_eq!(out.events.len(), 2000);
    let r_first = out.reports[0].r_eq16;
    for rep in &out.reports {
        assert!((rep.r_eq16 - r_first).abs() <= 1e-9 * r_first.abs());
        assert!(rep.residual_identity <= 1e-10 * rep.r_eq16.abs().max(1.0));
        assert!(
            rep.lemma_residual <= 1e-10,
            "lemma residual {:e}",
            rep.lemma_residual
        );
        assert!(
            rep.bounds_ok,
            "box violated at {}: {:?}",
            rep.n, rep.margins
        );
    }
}

#[test]
fn collision_points_lie_on_their_level_set() {
    let (p, s0) = exact_reference();
    let out = run(&s0, 300, &p).unwrap();
    let a = out.events[0].post.twice_energy;
    let rv = out.reports[0].r_eq16;
    let curve = level_set_r(a, rv, &p).unwrap();
    for ev in &out.events {
        for lam in [ev.lambda, ev.lambda_post] {
            assert!((r_at_section_point(ev.x_impact, lam, a, &p) - rv).abs() < 1e-8);
        }
        assert!(ev.x_impact.abs() < curve.x_max);
    }
    // the traced polyline passes within one grid cell of each impact
    let dx = 2.0 * curve.x_max / LEVEL_SET_GRID as f64;
    for ev in out.events.iter().take(20) {
        let near = curve
            .points()
            .filter(|(x, _)| (x - ev.x_impact).abs() <= dx)
            .map(|(_, l)| (l - ev.lambda).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(near < 0.05, "impact {} far from curve ({near})", ev.n);
    }
}

#[test]
fn low_orbit_reports_no_collision() {
    let p = Params::default();
    let s = CartesianState::new(0.2, 0.0, 0.0, 1.5);
    let out = run(&s, 5, &p).unwrap();
    assert!(out.events.is_empty());
    assert_eq!(out.termination, Termination::NoCollision);
    assert!(out.samples.len() > 10);
}

#[test]
fn step_rejects_states_above_wall() {
    let p = Params::default();
    let s = CartesianState::new(0.0, 1.2, 0.1, 0.1);
    assert!(matches!(step(&s, &p), Err(Error::Domain(_))));
}

#[test]
fn unbound_start_is_an_error() {
    let p = Params::default();
    let s = CartesianState::new(0.0, 0.5, 3.0, 0.0);
    assert!(matches!(
        run(&s, 3, &p).unwrap_err().root(),
        Error::Unbound(_)
    ));
}

#[test]
fn samples_are_time_ordered_and_below_wall() {
    let (p, s0) = exact_reference();
    let out = run(&s0, 30, &p).unwrap();
    for w in out.samples.windows(2) {
        assert!(w[1].t >= w[0].t);
    }
    for s in &out.samples {
        assert!(s.y <= p.h + 1e-12);
        assert!((s.twice_energy(&p) + 0.5).abs() <= 1e-13 * s.speed_sq().max(1.0));
    }
}
