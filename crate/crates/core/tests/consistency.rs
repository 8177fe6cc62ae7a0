//! Cross-module agreement through the public API.

use std::f64::consts::PI;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use elstat_core::balayage::balayage_measure;
use elstat_core::conformal::{green_infinity, green_two_point, LaurentMap, PlanarDomain};
use elstat_core::domains::{Geometry, UniformDomain};
use elstat_core::gas::{exact_log_partition, Ensemble, GasModel};
use elstat_core::surfaces::shell_potential;
use elstat_core::Complex64;

#[test]
fn ball_acts_as_a_shell_outside() {
    for d in [2u32, 3, 5] {
        let ball = UniformDomain::new(Geometry::Ball { d, radius: 1.2 }, 3.0).unwrap();
        let mut p = vec![0.0; d as usize];
        p[0] = 1.7;
        p[d as usize - 1] += 0.9;
        let shell = shell_potential(d, 1.2, -3.0, &p).unwrap();
        assert_relative_eq!(ball.background_potential(&p).unwrap(), shell, max_relative = 1e-13);
    }
}

#[test]
fn balayage_of_a_disk_is_its_equilibrium_measure() {
    let dom = UniformDomain::new(Geometry::Ball { d: 2, radius: 1.5 }, 2.0).unwrap();
    let mu = balayage_measure(&dom).unwrap();
    assert_abs_diff_eq!(mu.total_mass, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(mu.moment(0).unwrap().re, 2.0, epsilon = 1e-12);
    // outside, the potential is the mass times the Green function with pole at infinity
    // plus the boundary value
    let map = LaurentMap::circle(1.5).unwrap();
    let z = Complex64::new(2.0, 1.0);
    let g = green_infinity(&map, z).unwrap();
    let on_edge = mu.potential(&[1.5, 0.0]).unwrap();
    assert_abs_diff_eq!(mu.potential(&[z.re, z.im]).unwrap(), on_edge - 2.0 * g.g, epsilon = 1e-12);
}

#[test]
fn circle_map_reproduces_the_disk_green_function() {
    let mapped = PlanarDomain::Mapped(LaurentMap::circle(1.0).unwrap());
    let disk = PlanarDomain::Disk { radius: 1.0 };
    for (z, w) in [((1.5, 0.2), (-2.0, 3.0)), ((0.0, 1.1), (4.0, -0.5))] {
        let z = Complex64::new(z.0, z.1);
        let w = Complex64::new(w.0, w.1);
        assert_abs_diff_eq!(
            green_two_point(&mapped, z, w).unwrap(),
            green_two_point(&disk, z, w).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn ellipse_capacity_and_robin_constant() {
    let m = LaurentMap::ellipse(3.0, 1.0).unwrap();
    assert_abs_diff_eq!(m.capacity(), 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(m.robin(), -(2.0f64).ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(m.area(), 3.0 * PI, epsilon = 1e-12);
}

#[test]
fn single_particle_partition_functions() {
    let z = |e| exact_log_partition(&GasModel::new(2.0, 1, e).unwrap()).unwrap();
    assert_abs_diff_eq!(z(Ensemble::Ginibre), PI.ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(z(Ensemble::Elliptic { tau: 0.0 }), PI.ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(z(Ensemble::Sinh { c: 1.0, l: 3.0 }), PI.sqrt().ln(), epsilon = 1e-14);
}
