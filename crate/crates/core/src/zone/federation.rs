use super::Dbm;
use crate::constraint::ClockId;
use crate::error::Result;
use crate::rational::Rational;

/// A finite union of nonempty canonical zones over one clock set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Federation {
    clocks: usize,
    zones: Vec<Dbm>,
}

impl Federation {
    pub fn empty(clocks: usize) -> Federation {
        Federation { clocks, zones: Vec::new() }
    }

    pub fn universe(clocks: usize) -> Federation {
        Federation::from_dbm(Dbm::universe(clocks))
    }

    pub fn from_dbm(d: Dbm) -> Federation {
        let clocks = d.clocks();
        let zones = if d.is_empty() { Vec::new() } else { vec![d] };
        Federation { clocks, zones }
    }

    pub fn from_zones(clocks: usize, zones: impl IntoIterator<Item = Dbm>) -> Federation {
        let mut f = Federation::empty(clocks);
        for z in zones {
            f.add(z);
        }
        f
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    pub fn zones(&self) -> &[Dbm] {
        &self.zones
    }

    pub fn into_zones(self) -> Vec<Dbm> {
        self.zones
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    /// Adds a zone, skipping it if already covered by one member and
    /// dropping members it covers.
    pub fn add(&mut self, d: Dbm) {
        assert_eq!(d.clocks(), self.clocks, "federation dimension");
        if d.is_empty() || self.zones.iter().any(|z| z.includes(&d)) {
            return;
        }
        self.zones.retain(|z| !d.includes(z));
        self.zones.push(d);
    }

    pub fn union(&self, other: &Federation) -> Federation {
        let mut f = self.clone();
        for z in &other.zones {
            f.add(z.clone());
        }
        f
    }

    pub fn union_with(&mut self, other: &Federation) {
        for z in &other.zones {
            self.add(z.clone());
        }
    }

    pub fn intersect(&self, other: &Federation) -> Result<Federation> {
        let mut f = Federation::empty(self.clocks);
        for a in &self.zones {
            for b in &other.zones {
                f.add(a.intersect(b)?);
            }
        }
        Ok(f)
    }

    pub fn intersect_dbm(&self, d: &Dbm) -> Result<Federation> {
        let mut f = Federation::empty(self.clocks);
        for a in &self.zones {
            f.add(a.intersect(d)?);
        }
        Ok(f)
    }

    pub fn subtract(&self, other: &Federation) -> Result<Federation> {
        let mut cur = self.clone();
        for b in &other.zones {
            if cur.is_empty() {
                break;
            }
            cur = cur.subtract_dbm(b)?;
        }
        Ok(cur)
    }

    pub fn subtract_dbm(&self, b: &Dbm) -> Result<Federation> {
        let mut f = Federation::empty(self.clocks);
        for a in &self.zones {
            a.check_dim(b)?;
            for piece in dbm_minus(a, b) {
                f.add(piece);
            }
        }
        Ok(f)
    }

    pub fn complement(&self) -> Federation {
        Federation::universe(self.clocks).subtract(self).expect("same dimension")
    }

    pub fn up(&self) -> Federation {
        self.map(Dbm::up)
    }

    pub fn down(&self) -> Federation {
        self.map(Dbm::down)
    }

    pub fn reset(&self, clocks: &[ClockId]) -> Federation {
        self.map(|d| d.reset(clocks))
    }

    pub fn reset_pred(&self, clocks: &[ClockId]) -> Federation {
        self.map(|d| d.reset_pred(clocks))
    }

    pub fn free(&self, clock: ClockId) -> Federation {
        self.map(|d| d.free(clock))
    }

    pub fn extrapolate(&self, max: &[i64]) -> Federation {
        self.map(|d| d.extrapolate(max))
    }

    fn map(&self, f: impl Fn(&Dbm) -> Dbm) -> Federation {
        Federation::from_zones(self.clocks, self.zones.iter().map(f))
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        for z in &self.zones {
            if z.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Federation) -> Result<bool> {
        Ok(self.subtract(other)?.is_empty())
    }

    pub fn set_eq(&self, other: &Federation) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn max_constant(&self) -> i64 {
        self.zones.iter().map(Dbm::max_constant).max().unwrap_or(0)
    }
}

impl std::fmt::Debug for Federation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.zones).finish()
    }
}

/// `a \ b` as disjoint pieces, split along the facets of `b`.
fn dbm_minus(a: &Dbm, b: &Dbm) -> Vec<Dbm> {
    if a.is_empty() {
        return Vec::new();
    }
    if b.is_empty() {
        return vec![a.clone()];
    }
    if a.intersect(b).map(|d| d.is_empty()).unwrap_or(true) {
        return vec![a.clone()];
    }
    let n = a.dim();
    let mut pieces = Vec::new();
    let mut cur = a.clone();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let bij = b.get(i, j);
            if bij.is_inf() || cur.get(i, j) <= bij {
                continue;
            }
            let mut outside = cur.clone();
            outside.constrain(j, i, bij.complement());
            if !outside.is_empty() {
                pieces.push(outside);
            }
            cur.constrain(i, j, bij);
            if cur.is_empty() {
                return pieces;
            }
        }
    }
    pieces
}
