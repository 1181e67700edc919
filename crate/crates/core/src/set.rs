//! Closed convex feasible sets with cheap exact projections.

use crate::error::{Error, Result};
use crate::point::check_dim;

/// A projectable closed convex set.
///
/// Build instances through the checked constructors ([`FeasibleSet::boxed`],
/// [`FeasibleSet::capped_simplex`], ...) so that the variant invariants hold;
/// [`FeasibleSet::validate`] re-checks them for values built by hand.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    /// All of `R^d`.
    FullSpace(usize),
    /// `{ x : lo <= x <= hi }`; infinite bounds are allowed.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The probability simplex `{ x >= 0 : sum x = 1 }`.
    Simplex(usize),
    /// `{ x in [0, 1]^d : sum x = s }`.
    CappedSimplex { d: usize, s: usize },
    /// Cartesian product; coordinates are laid out factor by factor.
    Product(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn full_space(d: usize) -> Self {
        FeasibleSet::FullSpace(d)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let set = FeasibleSet::Box { lo, hi };
        set.validate()?;
        Ok(set)
    }

    /// The box `[lo, hi]^d`.
    pub fn uniform_box(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; d], vec![hi; d])
    }

    pub fn simplex(d: usize) -> Result<Self> {
        let set = FeasibleSet::Simplex(d);
        set.validate()?;
        Ok(set)
    }

    pub fn capped_simplex(d: usize, s: usize) -> Result<Self> {
        let set = FeasibleSet::CappedSimplex { d, s };
        set.validate()?;
        Ok(set)
    }

    pub fn product(factors: Vec<FeasibleSet>) -> Result<Self> {
        let set = FeasibleSet::Product(factors);
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::FullSpace(_) => Ok(()),
            FeasibleSet::Box { lo, hi } => {
                check_dim(lo.len(), hi.len())?;
                for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
                    if l.is_nan() || h.is_nan() || l > h || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                        return Err(Error::InvalidSet(format!(
                            "box bounds at coordinate {i} are inconsistent: [{l}, {h}]"
                        )));
                    }
                }
                Ok(())
            }
            FeasibleSet::Simplex(d) => {
                if *d == 0 {
                    Err(Error::InvalidSet("simplex of dimension 0 is empty".into()))
                } else {
                    Ok(())
                }
            }
            FeasibleSet::CappedSimplex { d, s } => {
                if *s < 1 || s > d {
                    Err(Error::InvalidCardinality { d: *d, s: *s })
                } else {
                    Ok(())
                }
            }
            FeasibleSet::Product(factors) => factors.iter().try_for_each(FeasibleSet::validate),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::FullSpace(d) | FeasibleSet::Simplex(d) => *d,
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::CappedSimplex { d, .. } => *d,
            FeasibleSet::Product(factors) => factors.iter().map(FeasibleSet::dim).sum(),
        }
    }

    /// Leaf factors paired with their coordinate offset. Nested products are
    /// flattened.
    pub fn leaves(&self) -> Vec<(usize, &FeasibleSet)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, offset: usize, out: &mut Vec<(usize, &'a FeasibleSet)>) {
        match self {
            FeasibleSet::Product(factors) => {
                let mut off = offset;
                for f in factors {
                    f.collect_leaves(off, out);
                    off += f.dim();
                }
            }
            leaf => out.push((offset, leaf)),
        }
    }

    /// Per-coordinate bounds when the set is a box (possibly a product of
    /// boxes and full spaces); `None` when a simplex-type factor is present.
    pub fn box_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for (_, leaf) in self.leaves() {
            match leaf {
                FeasibleSet::FullSpace(d) => {
                    lo.extend(std::iter::repeat_n(f64::NEG_INFINITY, *d));
                    hi.extend(std::iter::repeat_n(f64::INFINITY, *d));
                }
                FeasibleSet::Box { lo: l, hi: h } => {
                    lo.extend_from_slice(l);
                    hi.extend_from_slice(h);
                }
                _ => return None,
            }
        }
        Some((lo, hi))
    }

    pub fn is_box_structured(&self) -> bool {
        self.leaves()
            .iter()
            .all(|(_, l)| matches!(l, FeasibleSet::FullSpace(_) | FeasibleSet::Box { .. }))
    }

    /// Whether `z` satisfies every defining constraint up to additive `tol`.
    pub fn contains(&self, z: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), z.len())?;
        Ok(self
            .leaves()
            .into_iter()
            .all(|(off, leaf)| leaf_contains(leaf, &z[off..off + leaf.dim()], tol)))
    }
}

fn leaf_contains(set: &FeasibleSet, z: &[f64], tol: f64) -> bool {
    match set {
        FeasibleSet::FullSpace(_) => z.iter().all(|v| v.is_finite()),
        FeasibleSet::Box { lo, hi } => z
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
        FeasibleSet::Simplex(_) => z.iter().all(|v| *v >= -tol) && (z.iter().sum::<f64>() - 1.0).abs() <= tol,
        FeasibleSet::CappedSimplex { s, .. } => {
            z.iter().all(|v| *v >= -tol && *v <= 1.0 + tol) && (z.iter().sum::<f64>() - *s as f64).abs() <= tol
        }
        FeasibleSet::Product(_) => unreachable!("leaves are never products"),
    }
}

/// Free-function form of [`FeasibleSet::contains`].
pub fn check_feasible(set: &FeasibleSet, z: &[f64], tol: f64) -> Result<bool> {
    set.contains(z, tol)
}
