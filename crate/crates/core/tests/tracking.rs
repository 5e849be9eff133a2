use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use qvortex::anatomy::{winding_number, AnatomyOptions, Contour};
use qvortex::tracker::{
    extract_at, node_speed, sample, track, EventKind, ExtractOptions, Frame, Grid3, TrackOptions,
};
use qvortex::{PhysicalConstants, Solution, SolutionSpec, Vec3, WaveVector};

fn sol(spec: SolutionSpec) -> Solution {
    Solution::new(spec, PhysicalConstants::default()).unwrap()
}

fn cube(half: f64, n: usize) -> Grid3 {
    // Slightly off-centre so symmetric loci avoid grid planes.
    Grid3::cube(Vec3::new(0.0123, -0.0071, 0.0049), half, n).unwrap()
}

#[test]
fn sphere_ring_lifecycle() {
    let s = sol(SolutionSpec::FreeRingSphere { r: 3.0, a: 1.0, k: WaveVector::ZERO });
    let g = cube(4.0, 64);
    let tr = track(&s, &g, -2.0, 2.0, 32, &TrackOptions::default()).unwrap();
    let c: Vec<_> = tr.events.of_kind(EventKind::Creation).collect();
    let a: Vec<_> = tr.events.of_kind(EventKind::Annihilation).collect();
    assert_eq!(c.len(), 1, "{:?}", tr.events);
    assert_eq!(a.len(), 1, "{:?}", tr.events);
    assert!(c[0].contains(-1.0) && a[0].contains(1.0));
    assert!(c[0].width() <= 4.0 / 32.0 + 1e-12);
    assert!(tr.events.of_kind(EventKind::Reconnection).next().is_none());
    // Mirror symmetry of the brackets.
    assert!((c[0].t_lo + a[0].t_hi).abs() < 1e-9 && (c[0].t_hi + a[0].t_lo).abs() < 1e-9);
    let diag = g.cell_diagonal();
    for f in &tr.frames {
        let t: f64 = f.time;
        if t.abs() < 1.0 {
            assert_eq!(f.lines.len(), 1);
            let rho = (9.0 - 9.0 * t * t).sqrt();
            for p in &f.lines[0].points {
                let r = (p.x * p.x + p.y * p.y).sqrt();
                assert!((r - rho).abs() < 0.5 * diag && (p.z + 3.0 * t).abs() < 0.5 * diag);
            }
        } else {
            assert!(f.lines.is_empty());
        }
    }
}

#[test]
fn antiparallel_pair_lifecycle() {
    let s = sol(SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_2, k: WaveVector::ZERO });
    let g = cube(2.0, 48);
    let tr = track(&s, &g, -2.0, 2.0, 32, &TrackOptions::default()).unwrap();
    let c: Vec<_> = tr.events.of_kind(EventKind::Creation).collect();
    let a: Vec<_> = tr.events.of_kind(EventKind::Annihilation).collect();
    assert_eq!((c.len(), a.len()), (1, 1), "{:?}", tr.events);
    assert!(c[0].contains(-1.0) && a[0].contains(1.0));
    assert!(tr.events.of_kind(EventKind::Reconnection).next().is_none());
}

#[test]
fn switchover_reconnects_only_for_oblique_lines() {
    let g = cube(4.0, 48);
    let s = sol(SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_4, k: WaveVector::ZERO });
    let tr = track(&s, &g, -3.0, 3.0, 24, &TrackOptions::default()).unwrap();
    let r: Vec<_> = tr.events.of_kind(EventKind::Reconnection).collect();
    assert!(!r.is_empty(), "{:?}", tr.events);
    assert!(r.iter().any(|e| e.t_hi < 0.0) && r.iter().any(|e| e.t_lo > 0.0));

    let s0 = sol(SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: 0.0, k: WaveVector::ZERO });
    let tr0 = track(&s0, &g, -3.0, 3.0, 24, &TrackOptions::default()).unwrap();
    assert!(tr0.events.events.is_empty(), "{:?}", tr0.events);
}

#[test]
fn moving_line_has_no_events_and_drifts_at_classical_speed() {
    let k = WaveVector::new(0.4, -0.2, 0.3);
    let s = sol(SolutionSpec::FreeLineVortex { chi: FRAC_PI_4, k });
    let g = cube(1.5, 32);
    let tr = track(&s, &g, 0.0, 1.0, 5, &TrackOptions::default()).unwrap();
    assert!(tr.events.events.is_empty());
    for f in &tr.frames {
        assert_eq!(f.lines.len(), 1);
        for p in &f.lines[0].points {
            assert!((p.x - 0.4 * f.time).abs() < 1e-6 && (p.y + 0.2 * f.time).abs() < 1e-6);
        }
    }
}

fn frames_at(s: &Solution, g: &Grid3, times: &[f64]) -> Vec<Frame> {
    times.iter().enumerate().map(|(i, &t)| extract_at(s, g, t, i, &ExtractOptions::default()).unwrap()).collect()
}

#[test]
fn node_speeds() {
    let g = cube(2.0, 40);
    let cut = 3.0 * g.cell_diagonal();
    let ring = sol(SolutionSpec::FreeRingCylinder { r: 1.0, a: 0.8, k: WaveVector::ZERO });
    let v = node_speed(&frames_at(&ring, &g, &[0.0, 0.05, 0.1]), cut).unwrap();
    for s in v.all() {
        assert!((s - 2.0 / 0.8).abs() < 1e-6, "{s}");
    }
    let line = sol(SolutionSpec::FreeLineVortex { chi: FRAC_PI_4, k: WaveVector::ZERO });
    let v = node_speed(&frames_at(&line, &g, &[0.0, 0.5]), cut).unwrap();
    assert!(v.max().unwrap() < 1e-9);

    // Relativistic ring with a small radius-scale a moves faster than light.
    let rel = sol(SolutionSpec::RelRingCylinder { r: 1.0, a: 4.0 / 3.0, k: WaveVector::ZERO });
    let v = node_speed(&frames_at(&rel, &g, &[0.0, 0.02]), cut).unwrap();
    let mean = v.mean().unwrap();
    assert!(mean > 1.0 && (mean - 1.5).abs() < 0.05, "{mean}");
}

#[test]
fn polylines_satisfy_invariants() {
    let s = sol(SolutionSpec::FreeRingSphere { r: 1.0, a: 1.0, k: WaveVector::new(0.2, 0.1, 0.0) });
    let g = cube(1.6, 40);
    let t = 0.1;
    let f = sample(&s, &g, t).unwrap();
    let tol = 1e-9 * f.median_abs();
    let e = qvortex::tracker::extract_frame(&f, Some(&s), &ExtractOptions::default());
    assert_eq!(e.lines.len(), 1);
    let l = &e.lines[0];
    assert!(l.points.len() >= 3 && l.winding != 0);
    for (i, p) in l.points.iter().enumerate() {
        assert!(s.value(p, t).norm() < tol);
        if i % 5 == 0 {
            let c = Contour::new(*p, l.tangent(i), 0.01, 64).unwrap();
            assert_eq!(winding_number(&s, &c, t, &AnatomyOptions::default()).unwrap(), l.winding);
        }
    }
    let d = g.cell_diagonal();
    assert!(l.segments().all(|(a, b)| (b - a).norm() <= d * (1.0 + 1e-9)));
}
