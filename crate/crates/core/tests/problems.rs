use std::sync::Arc;

use laser_magnus::problems::absorber::{residual_mass, DEFAULT_STRENGTH};
use laser_magnus::problems::eigen::energies;
use laser_magnus::problems::{v5, ABSORBER_WIDTH, PROBLEMS};
use laser_magnus::{build_problem, Overrides, Scheme, SplitScheme, SpectralGrid, Stepper};

fn small(points: usize) -> Overrides {
    Overrides {
        points: Some(points),
        ..Overrides::default()
    }
}

#[test]
fn every_problem_builds_a_normalized_state() {
    for name in PROBLEMS {
        let points = match name {
            "ex4_1" | "ex4_2" => 12,
            "ex3" => 32,
            _ => 256,
        };
        let p = build_problem(name, &small(points)).unwrap();
        assert!((p.grid().norm(&p.initial) - 1.0).abs() < 1e-13, "{name}");
        assert_eq!(p.system.grid.dims(), p.centres.first().map_or(1, Vec::len).max(1), "{name}");
        assert_eq!(p.absorber.is_some(), name == "ex5");
    }
}

#[test]
fn soft_coulomb_level_is_resolved_by_the_fine_grids() {
    // The fifth level of V₅ on [−240, 240] settles to 1e-8 between M = 1536
    // and M = 3072.
    let level = |m: usize| {
        let grid = SpectralGrid::new(&[(-240.0, 240.0)], &[m]).unwrap();
        let v: Vec<f64> = grid.nodes(0).iter().map(|&x| v5(x).0).collect();
        energies(&grid, &v, 1.0, 5).unwrap()[4]
    };
    let (coarse, fine) = (level(1536), level(3072));
    assert!((coarse - fine).abs() < 1e-8, "{coarse} {fine}");
    // V₅ tends to 2, so bound levels lie below it.
    assert!(fine > 0.0 && fine < 2.0);
}

#[test]
fn default_absorber_swallows_the_relevant_momenta() {
    let grid = Arc::new(SpectralGrid::new(&[(-240.0, 240.0)], &[768]).unwrap());
    for k in [0.3, 0.5, 1.0] {
        let left = residual_mass(&grid, ABSORBER_WIDTH, DEFAULT_STRENGTH, k).unwrap();
        assert!(left < 1e-3, "k = {k}: {left:e}");
    }
}

#[test]
fn absorbed_norm_never_grows() {
    let p = build_problem("ex5", &small(512)).unwrap();
    let mut stepper = Stepper::new(&p.system, Scheme::parse("S3+OMF85", SplitScheme::builtin).unwrap(), 3).unwrap();
    let mut u = p.initial.clone();
    let h = p.step_size();
    let mut last = p.grid().norm(&u);
    for n in 0..p.steps {
        stepper.step(&mut u, n as f64 * h, h).unwrap();
        let now = p.grid().norm(&u);
        assert!(now <= last, "step {n}: {now} > {last}");
        last = now;
    }
    assert!(last < 1.0);
}
