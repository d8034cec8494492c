use super::*;
use crate::constraint::{ClockId, Constraint};
use crate::rational::{int, ratio};

fn clocks(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn zone(text: &str, names: &[&str]) -> Dbm {
    let names = clocks(names);
    Dbm::from_constraint(&Constraint::parse(text, &names).unwrap(), names.len()).unwrap()
}

#[test]
fn canonical_form_fills_reference_bounds() {
    let d = zone("x >= 8 && x <= 10", &["x"]);
    assert_eq!(d.get(1, 0), Bound::le(10));
    assert_eq!(d.get(0, 1), Bound::le(-8));
    assert_eq!(d.canonicalize(), d);
}

#[test]
fn contradictory_bounds_are_empty() {
    assert!(zone("x >= 3 && x <= 2", &["x"]).is_empty());
    assert!(zone("x > 2 && x < 2", &["x"]).is_empty());
    assert!(!zone("x >= 2 && x <= 2", &["x"]).is_empty());
}

#[test]
fn invariant_zone_membership() {
    let d = zone("x <= 10", &["x"]);
    assert!(d.contains(&[int(0)]).unwrap());
    assert!(d.contains(&[int(10)]).unwrap());
    assert!(!d.contains(&[ratio(101, 10)]).unwrap());
    let g = zone("x >= 8 && x <= 10", &["x"]);
    assert!(g.contains(&[ratio(17, 2)]).unwrap());
    assert!(g.contains(&[ratio(91, 10)]).unwrap());
    assert!(!g.contains(&[int(7)]).unwrap());
    assert!(!zone("x >= 8", &["x"]).contains(&[ratio(7999, 1000)]).unwrap());
}

#[test]
fn true_constraint_is_universe() {
    assert_eq!(zone("", &["x", "y"]), Dbm::universe(2));
    assert!(Dbm::universe(2).contains(&[int(0), int(0)]).unwrap());
}

#[test]
fn unknown_clock_is_rejected() {
    let c = Constraint(vec![crate::constraint::Atom::new(ClockId(3), crate::constraint::Rel::Le, 1)]);
    assert!(Dbm::from_constraint(&c, 1).is_err());
}

#[test]
fn dimension_mismatch_is_an_error() {
    assert!(Dbm::universe(1).contains(&[int(0), int(0)]).is_err());
    assert!(Dbm::universe(1).intersect(&Dbm::universe(2)).is_err());
}

#[test]
fn intersect_of_bounds() {
    let d = zone("x <= 10", &["x"]).intersect(&zone("x >= 8", &["x"])).unwrap();
    assert_eq!(d, zone("x >= 8 && x <= 10", &["x"]));
    assert_eq!(d.intersect(&d).unwrap(), d);
    assert_eq!(d.intersect(&Dbm::universe(1)).unwrap(), d);
}

#[test]
fn up_from_origin_is_diagonal() {
    let d = Dbm::zero(2).up();
    assert!(d.contains(&[int(3), int(3)]).unwrap());
    assert!(!d.contains(&[int(3), int(2)]).unwrap());
    assert_eq!(d.up(), d);
}

#[test]
fn down_of_point() {
    let d = zone("x == 5", &["x"]).down();
    assert_eq!(d, zone("x <= 5", &["x"]));
    assert_eq!(d.down(), d);
}

#[test]
fn reset_examples() {
    let d = zone("x >= 8 && x <= 10", &["x", "y"]);
    assert_eq!(d.reset(&[]), d);
    assert_eq!(Dbm::universe(1).reset(&[ClockId(0)]), zone("x == 0", &["x"]));
    let diag = Dbm::zero(2).up().intersect(&d).unwrap();
    let r = diag.reset(&[ClockId(0)]);
    assert_eq!(r, zone("x == 0 && y >= 8 && y <= 10", &["x", "y"]));
}

#[test]
fn free_examples() {
    let d = zone("x == 0", &["x"]).free(ClockId(0));
    assert_eq!(d, Dbm::universe(1));
    let e = zone("x <= 3 && y >= 2", &["x", "y"]).free(ClockId(0));
    assert_eq!(e.free(ClockId(0)), e);
}

#[test]
fn extrapolation_keeps_small_zones() {
    let d = zone("x >= 1 && x <= 4", &["x"]);
    assert_eq!(d.extrapolate(&[5]), d);
    let big = zone("x >= 7 && x <= 9", &["x"]);
    let e = big.extrapolate(&[5]);
    assert_eq!(e, zone("x > 5", &["x"]));
    assert_eq!(e.extrapolate(&[5]), e);
}

#[test]
fn subtract_examples() {
    let a = Federation::from_dbm(zone("x <= 10", &["x"]));
    assert!(a.subtract(&a).unwrap().is_empty());
    assert_eq!(a.subtract(&Federation::empty(1)).unwrap(), a);
    let hole = a.subtract(&Federation::from_dbm(zone("x >= 3 && x < 5", &["x"]))).unwrap();
    assert!(hole.contains(&[int(2)]).unwrap());
    assert!(!hole.contains(&[int(3)]).unwrap());
    assert!(hole.contains(&[int(5)]).unwrap());
    assert_eq!(hole.len(), 2);
}

#[test]
fn delay_window_on_ray() {
    let d = zone("x >= 8 && x <= 10 && y < 12", &["x", "y"]);
    let w = d.delay_window(&[int(1), int(3)]).unwrap();
    assert_eq!(w.lo, int(7));
    assert!(!w.lo_strict);
    assert_eq!(w.hi, Some((int(9), true)));
    assert!(d.delay_window(&[int(11), int(0)]).is_none());
}

#[test]
fn rendering_round_trips() {
    let names = clocks(&["x", "y"]);
    for text in ["x >= 1 && x < 4 && y == 2", "x > 2", ""] {
        let d = zone(text, &["x", "y"]);
        let back = Dbm::from_constraint(&d.to_constraint(), 2).unwrap();
        assert_eq!(back, d, "{}", d.to_constraint().display(&names));
    }
    let diag = Dbm::zero(2).up().intersect(&zone("x <= 3", &["x", "y"])).unwrap();
    assert_eq!(Dbm::from_constraint(&diag.to_constraint(), 2).unwrap(), diag);
    assert!(diag.to_rectangular_constraint().is_none());
}
