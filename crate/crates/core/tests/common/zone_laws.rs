//! Zone-engine laws checked by point sampling against brute-force oracles.
//!
//! Valuations are drawn from the quarter grid; zone constants are integers,
//! so every interval boundary an oracle searches for lies on the eighth grid.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use tgdc::constraint::ClockId;
use tgdc::rational::ratio;
use tgdc::zone::{Bound, Dbm, Federation};
use tgdc::Rational;

pub const CASES: u32 = 128;
pub const POINTS: usize = 120;

pub type Point = Vec<Rational>;

#[derive(Clone, Debug)]
pub struct Case {
    pub clocks: usize,
    pub a: Dbm,
    pub b: Dbm,
    pub c: Dbm,
    pub points: Vec<Point>,
}

fn dbm_from(n: usize, cons: &[(usize, usize, i64, bool)]) -> Dbm {
    let mut d = Dbm::universe(n);
    for &(i, j, c, strict) in cons {
        let (i, j) = (i % (n + 1), j % (n + 1));
        if i == j {
            continue;
        }
        // Keep most zones nonempty: upper bounds positive, lower bounds negative.
        let c = match (i, j) {
            (_, 0) => c.abs(),
            (0, _) => -c.abs(),
            _ => c.signum() * (c.abs() % 4),
        };
        d.constrain(i, j, Bound::new(c, strict));
    }
    d
}

fn constraints() -> impl Strategy<Value = Vec<(usize, usize, i64, bool)>> {
    prop::collection::vec((0usize..4, 0usize..4, -6i64..=6, any::<bool>()), 0..5)
}

fn points(n: usize, max_quarter: i64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(
        prop::collection::vec(0..=max_quarter, n).prop_map(|v| v.into_iter().map(|k| ratio(k, 4)).collect()),
        POINTS,
    )
}

pub fn cases(max_clocks: usize) -> impl Strategy<Value = Case> {
    (1..=max_clocks).prop_flat_map(|n| {
        (constraints(), constraints(), constraints(), points(n, 32)).prop_map(move |(a, b, c, points)| Case {
            clocks: n,
            a: dbm_from(n, &a),
            b: dbm_from(n, &b),
            c: dbm_from(n, &c),
            points,
        })
    })
}

fn eighths(upto: i64) -> impl Iterator<Item = Rational> {
    (0..=8 * upto).map(|k| ratio(k, 8))
}

fn has(d: &Dbm, v: &[Rational]) -> bool {
    d.contains(v).unwrap()
}

fn fhas(f: &Federation, v: &[Rational]) -> bool {
    f.contains(v).unwrap()
}

fn shift(v: &[Rational], delta: &Rational) -> Point {
    v.iter().map(|x| x + delta).collect()
}

fn with(v: &[Rational], k: usize, value: Rational) -> Point {
    let mut w = v.to_vec();
    w[k] = value;
    w
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn agree(name: &str, v: &[Rational], got: bool, want: bool) -> Result<(), TestCaseError> {
    check(got == want, || format!("{name}: at {v:?} got {got}, oracle says {want}"))
}

pub fn canonical_form(c: &Case) -> Result<(), TestCaseError> {
    let d = &c.a;
    check(d.canonicalize() == *d, || "generated zone not canonical".into())?;
    check(d.canonicalize().canonicalize() == d.canonicalize(), || "canonicalize not idempotent".into())?;
    if !d.is_empty() {
        for i in 0..d.dim() {
            check(d.get(i, i) == Bound::LE_ZERO, || format!("diagonal {i} is {:?}", d.get(i, i)))?;
            check(d.get(0, i) <= Bound::LE_ZERO, || format!("clock {i} may be negative"))?;
        }
    }
    Ok(())
}

pub fn intersection(c: &Case) -> Result<(), TestCaseError> {
    let ab = c.a.intersect(&c.b).unwrap();
    check(ab == c.b.intersect(&c.a).unwrap(), || "intersect not commutative".into())?;
    let left = ab.intersect(&c.c).unwrap();
    let right = c.a.intersect(&c.b.intersect(&c.c).unwrap()).unwrap();
    check(left == right, || "intersect not associative".into())?;
    check(c.a.intersect(&c.a).unwrap() == c.a, || "intersect not idempotent".into())?;
    check(c.a.intersect(&Dbm::universe(c.clocks)).unwrap() == c.a, || "universe is not neutral".into())?;
    for v in &c.points {
        agree("intersect", v, has(&ab, v), has(&c.a, v) && has(&c.b, v))?;
    }
    Ok(())
}

pub fn up(c: &Case) -> Result<(), TestCaseError> {
    let u = c.a.up();
    check(u.up() == u, || "up not idempotent".into())?;
    for v in &c.points {
        let lowest = v.iter().min().unwrap();
        let want = eighths(8).take_while(|t| t <= lowest).any(|t| has(&c.a, &shift(v, &-t)));
        agree("up", v, has(&u, v), want)?;
        check(!has(&c.a, v) || has(&u, v), || "up does not contain the zone".into())?;
    }
    Ok(())
}

pub fn down(c: &Case) -> Result<(), TestCaseError> {
    let dn = c.a.down();
    check(dn.down() == dn, || "down not idempotent".into())?;
    for v in &c.points {
        let want = eighths(16).any(|t| has(&c.a, &shift(v, &t)));
        agree("down", v, has(&dn, v), want)?;
    }
    Ok(())
}

pub fn reset(c: &Case) -> Result<(), TestCaseError> {
    check(c.a.reset(&[]) == c.a, || "empty reset changes the zone".into())?;
    for k in 0..c.clocks {
        let r = c.a.reset(&[ClockId(k)]);
        for v in &c.points {
            let want = v[k] == ratio(0, 1) && eighths(16).any(|u| has(&c.a, &with(v, k, u)));
            agree("reset", v, has(&r, v), want)?;
            let z = with(v, k, ratio(0, 1));
            agree("reset at zero", &z, has(&r, &z), eighths(16).any(|u| has(&c.a, &with(v, k, u))))?;
        }
    }
    Ok(())
}

pub fn free(c: &Case) -> Result<(), TestCaseError> {
    for k in 0..c.clocks {
        let f = c.a.free(ClockId(k));
        check(f.free(ClockId(k)) == f, || "free not idempotent".into())?;
        for v in &c.points {
            let want = eighths(16).any(|u| has(&c.a, &with(v, k, u)));
            agree("free", v, has(&f, v), want)?;
        }
    }
    Ok(())
}

pub fn reset_pred(c: &Case) -> Result<(), TestCaseError> {
    for k in 0..c.clocks {
        let p = c.a.reset_pred(&[ClockId(k)]);
        for v in &c.points {
            agree("reset_pred", v, has(&p, v), has(&c.a, &with(v, k, ratio(0, 1))))?;
        }
    }
    Ok(())
}

pub fn extrapolation(c: &Case) -> Result<(), TestCaseError> {
    let big = vec![c.a.max_constant().max(0); c.clocks];
    check(c.a.extrapolate(&big) == c.a, || "extrapolation above the max constant changed the zone".into())?;
    for m in 0..4 {
        let max = vec![m; c.clocks];
        let e = c.a.extrapolate(&max);
        check(e.extrapolate(&max) == e, || format!("extrapolate({m}) not idempotent"))?;
        for v in &c.points {
            check(!has(&c.a, v) || has(&e, v), || format!("extrapolate({m}) lost {v:?}"))?;
        }
    }
    Ok(())
}

pub fn delay_window(c: &Case) -> Result<(), TestCaseError> {
    for v in c.points.iter().take(40) {
        let w = c.a.delay_window(v);
        for t in eighths(12) {
            let got = w.as_ref().is_some_and(|w| w.contains(&t));
            agree("delay_window", v, got, has(&c.a, &shift(v, &t)))?;
        }
    }
    Ok(())
}

pub fn federation_algebra(c: &Case) -> Result<(), TestCaseError> {
    let n = c.clocks;
    let fa = Federation::from_zones(n, [c.a.clone(), c.c.clone()]);
    let fb = Federation::from_dbm(c.b.clone());
    let empty = Federation::empty(n);
    check(fa.subtract(&fa).unwrap().is_empty(), || "a \\ a not empty".into())?;
    check(fa.subtract(&empty).unwrap().set_eq(&fa).unwrap(), || "a \\ {} differs from a".into())?;
    let diff = fa.subtract(&fb).unwrap();
    let uni = fa.union(&fb);
    let int = fa.intersect(&fb).unwrap();
    let comp = fa.complement();
    for z in diff.zones().iter().chain(comp.zones()) {
        check(!z.is_empty() && z.canonicalize() == *z, || "federation member empty or not canonical".into())?;
    }
    for v in &c.points {
        let (a, b) = (fhas(&fa, v), fhas(&fb, v));
        agree("subtract", v, fhas(&diff, v), a && !b)?;
        agree("union", v, fhas(&uni, v), a || b)?;
        agree("intersect", v, fhas(&int, v), a && b)?;
        agree("complement", v, fhas(&comp, v), !a)?;
        agree("up", v, fhas(&fa.up(), v), fhas(&Federation::from_zones(n, [c.a.up(), c.c.up()]), v))?;
    }
    check(diff.is_subset(&fa).unwrap(), || "a \\ b not inside a".into())?;
    Ok(())
}

/// Emptiness against every quarter-grid point of `[0, 8]^n`, `n <= 2`.
pub fn emptiness(c: &Case) -> Result<(), TestCaseError> {
    let n = c.clocks.min(2);
    let d = if c.clocks <= 2 { c.a.clone() } else { project(&c.a.free(ClockId(2)), 2) };
    let grid: Vec<Rational> = (0..=32).map(|k| ratio(k, 4)).collect();
    let found = match n {
        1 => grid.iter().any(|x| has(&d, std::slice::from_ref(x))),
        _ => grid.iter().any(|x| grid.iter().any(|y| has(&d, &[x.clone(), y.clone()]))),
    };
    check(d.is_empty() == !found, || format!("is_empty={} but a grid point found={found}", d.is_empty()))
}

/// Drops trailing clocks of a zone in which they are unconstrained.
fn project(d: &Dbm, n: usize) -> Dbm {
    if d.is_empty() {
        return Dbm::empty(n);
    }
    let mut out = Dbm::universe(n);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                out.constrain(i, j, d.get(i, j));
            }
        }
    }
    out
}

pub type Law = fn(&Case) -> Result<(), TestCaseError>;

pub const LAWS: &[(&str, Law)] = &[
    ("canonical form", canonical_form),
    ("intersection", intersection),
    ("up", up),
    ("down", down),
    ("reset", reset),
    ("free", free),
    ("reset predecessor", reset_pred),
    ("extrapolation", extrapolation),
    ("delay window", delay_window),
    ("federation algebra", federation_algebra),
    ("emptiness", emptiness),
];

/// Runs one law on `CASES` deterministic cases.
pub fn run_law(law: Law) -> Result<(), String> {
    let config = Config { cases: CASES, failure_persistence: None, max_shrink_iters: 200, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&cases(3), |c| law(&c)).map_err(|e| e.to_string())
}
