use std::fmt;

use super::Bound;
use crate::constraint::{Atom, ClockId, Constraint, Rel};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Difference-bound matrix over `n` clocks plus the reference clock at index 0.
///
/// Entry `(i, j)` bounds `x_i - x_j`. Model clock `ClockId(k)` lives at
/// index `k + 1`. Every value handed out by the public API is canonical:
/// closed under shortest paths, or the normalized empty matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    m: Vec<Bound>,
}

impl Dbm {
    /// All nonnegative valuations over `clocks` clocks.
    pub fn universe(clocks: usize) -> Dbm {
        let dim = clocks + 1;
        let mut m = vec![Bound::INF; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
            m[i] = Bound::LE_ZERO;
        }
        Dbm { dim, m }
    }

    /// The single valuation mapping every clock to 0.
    pub fn zero(clocks: usize) -> Dbm {
        let dim = clocks + 1;
        Dbm { dim, m: vec![Bound::LE_ZERO; dim * dim] }
    }

    pub fn empty(clocks: usize) -> Dbm {
        let mut d = Dbm::zero(clocks);
        d.m[0] = Bound::LT_ZERO;
        d
    }

    /// Builds the zone of a conjunction; fails on clocks outside `0..clocks`.
    pub fn from_constraint(c: &Constraint, clocks: usize) -> Result<Dbm> {
        let mut d = Dbm::universe(clocks);
        for atom in &c.0 {
            for id in atom.clocks() {
                if id.0 >= clocks {
                    return Err(Error::UnknownClock(format!("#{}", id.0)));
                }
            }
            d.constrain_atom(atom);
        }
        Ok(d)
    }

    /// `x REL k` as a zone.
    pub fn atom(clocks: usize, atom: &Atom) -> Dbm {
        let mut d = Dbm::universe(clocks);
        d.constrain_atom(atom);
        d
    }

    fn constrain_atom(&mut self, atom: &Atom) {
        let i = atom.clock.0 + 1;
        let j = atom.other.map_or(0, |o| o.0 + 1);
        let k = atom.constant;
        match atom.rel {
            Rel::Lt => self.constrain(i, j, Bound::lt(k)),
            Rel::Le => self.constrain(i, j, Bound::le(k)),
            Rel::Ge => self.constrain(j, i, Bound::le(-k)),
            Rel::Gt => self.constrain(j, i, Bound::lt(-k)),
            Rel::Eq => {
                self.constrain(i, j, Bound::le(k));
                self.constrain(j, i, Bound::le(-k));
            }
        }
    }

    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    pub fn is_empty(&self) -> bool {
        self.m[0] < Bound::LE_ZERO
    }

    fn make_empty(&mut self) {
        self.m.fill(Bound::LE_ZERO);
        self.m[0] = Bound::LT_ZERO;
    }

    /// Builds a matrix from raw entries (row-major) and closes it.
    pub fn from_raw(clocks: usize, entries: Vec<Bound>) -> Dbm {
        assert_eq!(entries.len(), (clocks + 1) * (clocks + 1));
        let mut d = Dbm { dim: clocks + 1, m: entries };
        d.close();
        d
    }

    /// Floyd-Warshall closure; detects emptiness through negative cycles.
    pub fn canonicalize(&self) -> Dbm {
        let mut d = self.clone();
        d.close();
        d
    }

    fn close(&mut self) {
        if self.is_empty() {
            self.make_empty();
            return;
        }
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik.is_inf() {
                    continue;
                }
                for j in 0..n {
                    let via = ik.add(self.get(k, j));
                    if via < self.get(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
        }
        if (0..n).any(|i| self.get(i, i) < Bound::LE_ZERO) {
            self.make_empty();
        }
    }

    /// Adds `x_i - x_j ≺ b` and restores canonical form in O(n²).
    pub fn constrain(&mut self, i: usize, j: usize, b: Bound) {
        if self.is_empty() || b >= self.get(i, j) {
            return;
        }
        if b.add(self.get(j, i)) < Bound::LE_ZERO {
            self.make_empty();
            return;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.get(k, i);
            if ki.is_inf() {
                continue;
            }
            let kij = ki.add(b);
            for l in 0..n {
                let via = kij.add(self.get(j, l));
                if via < self.get(k, l) {
                    self.set(k, l, via);
                }
            }
        }
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.clocks() {
            return Err(Error::Dimension(v.len(), self.clocks()));
        }
        if self.is_empty() {
            return Ok(false);
        }
        let zero = Rational::from_integer(0.into());
        let value = |i: usize| if i == 0 { &zero } else { &v[i - 1] };
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && !self.get(i, j).admits(&(value(i) - value(j))) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn includes(&self, other: &Dbm) -> bool {
        other.is_empty() || (!self.is_empty() && self.m.iter().zip(&other.m).all(|(a, b)| b <= a))
    }

    pub fn intersect(&self, other: &Dbm) -> Result<Dbm> {
        self.check_dim(other)?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        if other.is_empty() {
            return Ok(other.clone());
        }
        let mut d = self.clone();
        for (a, b) in d.m.iter_mut().zip(&other.m) {
            if *b < *a {
                *a = *b;
            }
        }
        d.close();
        Ok(d)
    }

    pub(crate) fn check_dim(&self, other: &Dbm) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::Dimension(self.clocks(), other.clocks()))
        } else {
            Ok(())
        }
    }

    /// Delay successors: upper bounds dropped.
    pub fn up(&self) -> Dbm {
        let mut d = self.clone();
        if d.is_empty() {
            return d;
        }
        for i in 1..d.dim {
            d.set(i, 0, Bound::INF);
        }
        d
    }

    /// Delay predecessors within the nonnegative orthant.
    pub fn down(&self) -> Dbm {
        let mut d = self.clone();
        if d.is_empty() {
            return d;
        }
        for j in 1..d.dim {
            let mut lower = Bound::LE_ZERO;
            for i in 1..d.dim {
                let b = d.get(i, j);
                if b < lower {
                    lower = b;
                }
            }
            d.set(0, j, lower);
        }
        d.close();
        d
    }

    /// Sets every clock in `clocks` to 0.
    pub fn reset(&self, clocks: &[ClockId]) -> Dbm {
        let mut d = self.clone();
        if d.is_empty() {
            return d;
        }
        for c in clocks {
            let x = c.0 + 1;
            for j in 0..d.dim {
                let (zj, jz) = (d.get(0, j), d.get(j, 0));
                d.set(x, j, zj);
                d.set(j, x, jz);
            }
            d.set(x, x, Bound::LE_ZERO);
        }
        d
    }

    /// Removes every constraint on `clock` except nonnegativity.
    pub fn free(&self, clock: ClockId) -> Dbm {
        let mut d = self.clone();
        if d.is_empty() {
            return d;
        }
        let x = clock.0 + 1;
        for j in 0..d.dim {
            if j != x {
                d.set(x, j, Bound::INF);
                let jz = d.get(j, 0);
                d.set(j, x, jz);
            }
        }
        d.set(0, x, Bound::LE_ZERO);
        d
    }

    /// `{v : v[clocks] ∈ self}`: predecessor through a reset.
    pub fn reset_pred(&self, clocks: &[ClockId]) -> Dbm {
        let mut d = self.clone();
        for c in clocks {
            let x = c.0 + 1;
            d.constrain(x, 0, Bound::LE_ZERO);
            d = d.free(*c);
        }
        d
    }

    /// Classic max-constant widening followed by closure, repeated until
    /// the closed result is stable.
    ///
    /// `max[k]` bounds the constants compared against `ClockId(k)`.
    pub fn extrapolate(&self, max: &[i64]) -> Dbm {
        assert_eq!(max.len(), self.clocks());
        if self.is_empty() {
            return self.clone();
        }
        let k = |i: usize| if i == 0 { 0 } else { max[i - 1] };
        let mut d = self.clone();
        loop {
            let mut next = d.clone();
            for i in 0..d.dim {
                for j in 0..d.dim {
                    let b = d.get(i, j);
                    if i == j || b.is_inf() {
                        continue;
                    }
                    if i != 0 && b > Bound::le(k(i)) {
                        next.set(i, j, Bound::INF);
                    } else if b < Bound::lt(-k(j)) {
                        next.set(i, j, Bound::lt(-k(j)));
                    }
                }
            }
            next.close();
            if next == d {
                return d;
            }
            d = next;
        }
    }

    /// The set of times `δ ≥ 0` with `v + δ` inside the zone, as an interval.
    pub fn delay_window(&self, v: &[Rational]) -> Option<Window> {
        if self.is_empty() {
            return None;
        }
        let zero = Rational::from_integer(0.into());
        let value = |i: usize| if i == 0 { zero.clone() } else { v[i - 1].clone() };
        for i in 1..self.dim {
            for j in 1..self.dim {
                if i != j && !self.get(i, j).admits(&(value(i) - value(j))) {
                    return None;
                }
            }
        }
        let mut lo = (zero.clone(), false);
        let mut hi: Option<(Rational, bool)> = None;
        for i in 1..self.dim {
            let up = self.get(i, 0);
            if !up.is_inf() {
                let t = crate::rational::int(up.constant()) - value(i);
                let tighter = match &hi {
                    None => true,
                    Some((h, s)) => t < *h || (t == *h && up.is_strict() && !s),
                };
                if tighter {
                    hi = Some((t, up.is_strict()));
                }
            }
            let low = self.get(0, i);
            let t = crate::rational::int(-low.constant()) - value(i);
            if t > lo.0 || (t == lo.0 && low.is_strict()) {
                lo = (t, low.is_strict());
            }
        }
        let w = Window { lo: lo.0, lo_strict: lo.1, hi };
        (!w.is_empty()).then_some(w)
    }

    /// Single-clock bounds `(lower, upper)` for `ClockId(k)`.
    pub fn clock_bounds(&self, k: usize) -> (Bound, Bound) {
        (self.get(0, k + 1), self.get(k + 1, 0))
    }

    /// Renders the zone as a conjunction; empty zones render as `x < 0`.
    pub fn to_constraint(&self) -> Constraint {
        let n = self.clocks();
        let mut atoms = Vec::new();
        if self.is_empty() {
            if n > 0 {
                atoms.push(Atom::new(ClockId(0), Rel::Lt, 0));
            }
            return Constraint(atoms);
        }
        for k in 0..n {
            let (lo, hi) = self.clock_bounds(k);
            let lower = -lo.constant();
            if !hi.is_inf() && !hi.is_strict() && !lo.is_strict() && hi.constant() == lower {
                atoms.push(Atom::new(ClockId(k), Rel::Eq, lower));
                continue;
            }
            if lo != Bound::LE_ZERO {
                atoms.push(Atom::new(ClockId(k), if lo.is_strict() { Rel::Gt } else { Rel::Ge }, lower));
            }
            if !hi.is_inf() {
                atoms.push(Atom::new(ClockId(k), if hi.is_strict() { Rel::Lt } else { Rel::Le }, hi.constant()));
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                let b = self.get(i, j);
                if i == j || b.is_inf() {
                    continue;
                }
                // implied by the single-clock bounds
                if self.get(i, 0).add(self.get(0, j)) <= b {
                    continue;
                }
                let rel = if b.is_strict() { Rel::Lt } else { Rel::Le };
                atoms.push(Atom::diff(ClockId(i - 1), ClockId(j - 1), rel, b.constant()));
            }
        }
        Constraint(atoms)
    }

    /// The smallest box containing the zone.
    pub fn bounding_box(&self) -> Dbm {
        let mut d = Dbm::universe(self.clocks());
        if self.is_empty() {
            return Dbm::empty(self.clocks());
        }
        for i in 1..self.dim {
            d.constrain(0, i, self.get(0, i));
            d.constrain(i, 0, self.get(i, 0));
        }
        d
    }

    pub fn is_rectangular(&self) -> bool {
        self.is_empty() || self.bounding_box() == *self
    }

    /// Single-clock rendering of a rectangular zone.
    pub fn to_rectangular_constraint(&self) -> Option<Constraint> {
        (self.is_rectangular() && !self.is_empty()).then(|| self.to_constraint())
    }

    /// Largest finite constant (absolute value) in the matrix.
    pub fn max_constant(&self) -> i64 {
        self.m.iter().filter(|b| !b.is_inf()).map(|b| b.constant().abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("Dbm(empty)");
        }
        f.write_str("Dbm[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:?}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

/// Interval of delays `[lo, hi]` with strictness flags; `hi = None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Rational,
    pub lo_strict: bool,
    pub hi: Option<(Rational, bool)>,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        match &self.hi {
            None => false,
            Some((h, hs)) => *h < self.lo || (*h == self.lo && (*hs || self.lo_strict)),
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let above = if self.lo_strict { *t > self.lo } else { *t >= self.lo };
        let below = match &self.hi {
            None => true,
            Some((h, true)) => t < h,
            Some((h, false)) => t <= h,
        };
        above && below
    }
}
