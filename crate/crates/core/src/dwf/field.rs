//! Finite fields GF(2) and GF(4) and the affine phase-space geometry over them.
//!
//! GF(4) uses the polynomial basis `{1, w}` with `w^2 = w + 1`; the element
//! `a0 + a1*w` has index `a0 + 2*a1`. Addition is XOR of indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GfElem {
    pub order: usize,
    pub index: usize,
}

pub fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDim(d))
    }
}

impl GfElem {
    pub fn new(order: usize, index: usize) -> Result<Self> {
        check_dim(order)?;
        if index >= order {
            return Err(Error::Invalid(format!("field index {index} >= {order}")));
        }
        Ok(GfElem { order, index })
    }

    pub fn zero(order: usize) -> Self {
        GfElem { order, index: 0 }
    }

    pub fn add(self, o: GfElem) -> GfElem {
        debug_assert_eq!(self.order, o.order);
        GfElem { order: self.order, index: self.index ^ o.index }
    }

    /// Characteristic 2: subtraction is addition.
    pub fn sub(self, o: GfElem) -> GfElem {
        self.add(o)
    }

    pub fn mul(self, o: GfElem) -> GfElem {
        debug_assert_eq!(self.order, o.order);
        let index = match self.order {
            2 => self.index & o.index,
            _ => {
                let (a0, a1) = (self.index & 1, self.index >> 1);
                let (b0, b1) = (o.index & 1, o.index >> 1);
                let c0 = (a0 & b0) ^ (a1 & b1);
                let c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1);
                c0 | (c1 << 1)
            }
        };
        GfElem { order: self.order, index }
    }

    pub fn elements(order: usize) -> impl Iterator<Item = GfElem> {
        (0..order).map(move |index| GfElem { order, index })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: GfElem,
    pub p: GfElem,
}

impl PhasePoint {
    pub fn new(d: usize, q: usize, p: usize) -> Result<Self> {
        Ok(PhasePoint { q: GfElem::new(d, q)?, p: GfElem::new(d, p)? })
    }

    pub fn order(&self) -> usize {
        self.q.order
    }

    /// Row-major position in the `d x d` grid (`q` major).
    pub fn flat(&self) -> usize {
        self.q.index * self.q.order + self.p.index
    }

    pub fn all(d: usize) -> Vec<PhasePoint> {
        GfElem::elements(d)
            .flat_map(|q| GfElem::elements(d).map(move |p| PhasePoint { q, p }))
            .collect()
    }
}

/// Line `index` of striation `striation`. Striations `0..d` hold the lines
/// `p = s*q + c` with slope `s = striation`; striation `d` holds the vertical
/// lines `q = c`. The intercept `c` is the line index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub striation: usize,
    pub index: usize,
    pub points: Vec<PhasePoint>,
}

pub type Striation = Vec<Line>;

pub fn build_striations(d: usize) -> Result<Vec<Striation>> {
    check_dim(d)?;
    let mut out = Vec::with_capacity(d + 1);
    for s in 0..=d {
        let mut lines = Vec::with_capacity(d);
        for cidx in 0..d {
            let cst = GfElem { order: d, index: cidx };
            let points = GfElem::elements(d)
                .map(|t| {
                    if s == d {
                        PhasePoint { q: cst, p: t }
                    } else {
                        let slope = GfElem { order: d, index: s };
                        PhasePoint { q: t, p: slope.mul(t).add(cst) }
                    }
                })
                .collect();
            lines.push(Line { striation: s, index: cidx, points });
        }
        out.push(lines);
    }
    Ok(out)
}

/// Index of the line of striation `s` that passes through `alpha`.
pub fn line_through(d: usize, s: usize, alpha: PhasePoint) -> usize {
    if s == d {
        alpha.q.index
    } else {
        let slope = GfElem { order: d, index: s };
        alpha.p.sub(slope.mul(alpha.q)).index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn gf4_is_a_field() {
        let els: Vec<_> = GfElem::elements(4).collect();
        let zero = GfElem::zero(4);
        let one = GfElem { order: 4, index: 1 };
        for &a in &els {
            assert_eq!(a.add(zero), a);
            assert_eq!(a.mul(one), a);
            assert_eq!(a.add(a), zero);
            if a != zero {
                assert_eq!(els.iter().filter(|&&b| a.mul(b) == one).count(), 1, "inverse of {a:?}");
            }
            for &b in &els {
                assert_eq!(a.mul(b), b.mul(a));
                for &cc in &els {
                    assert_eq!(a.mul(b.add(cc)), a.mul(b).add(a.mul(cc)));
                    assert_eq!(a.mul(b).mul(cc), a.mul(b.mul(cc)));
                }
            }
        }
        // w^2 = w + 1
        let w = GfElem { order: 4, index: 2 };
        assert_eq!(w.mul(w), w.add(one));
    }

    #[test]
    fn striation_geometry() {
        for d in [2, 4] {
            let st = build_striations(d).unwrap();
            assert_eq!(st.len(), d + 1);
            for lines in &st {
                assert_eq!(lines.len(), d);
                let mut seen = HashSet::new();
                for l in lines {
                    assert_eq!(l.points.len(), d);
                    for p in &l.points {
                        assert!(seen.insert(*p), "striation lines overlap");
                    }
                }
                assert_eq!(seen.len(), d * d);
            }
            for (i, a) in st.iter().enumerate() {
                for b in st.iter().skip(i + 1) {
                    for la in a {
                        for lb in b {
                            let common = la.points.iter().filter(|p| lb.points.contains(p)).count();
                            assert_eq!(common, 1);
                        }
                    }
                }
            }
            for alpha in PhasePoint::all(d) {
                for s in 0..=d {
                    assert!(st[s][line_through(d, s, alpha)].points.contains(&alpha));
                }
            }
        }
    }

    #[test]
    fn unsupported_dims() {
        assert_eq!(build_striations(3), Err(Error::UnsupportedDim(3)));
        assert!(GfElem::new(8, 0).is_err());
    }
}
