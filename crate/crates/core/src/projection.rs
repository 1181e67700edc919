//! Euclidean projections onto [`FeasibleSet`] variants.

use crate::error::{Error, Result};
use crate::point::{check_dim, dist, Point};
use crate::set::FeasibleSet;

/// Largest dimension accepted by [`brute_force_projection_oracle`].
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

/// `argmin_{x in set} ||x - z||_2`.
pub fn project(set: &FeasibleSet, z: &[f64]) -> Result<Point> {
    let mut out = Point::zeros(z.len());
    project_into(set, z, &mut out)?;
    Ok(out)
}

/// Same as [`project`], writing into a caller-provided buffer.
pub fn project_into(set: &FeasibleSet, z: &[f64], out: &mut [f64]) -> Result<()> {
    check_dim(set.dim(), z.len())?;
    check_dim(set.dim(), out.len())?;
    for (off, leaf) in set.leaves() {
        let n = leaf.dim();
        let (zs, os) = (&z[off..off + n], &mut out[off..off + n]);
        match leaf {
            FeasibleSet::FullSpace(_) => os.copy_from_slice(zs),
            FeasibleSet::Box { lo, hi } => {
                for i in 0..n {
                    os[i] = zs[i].clamp(lo[i], hi[i]);
                }
            }
            FeasibleSet::Simplex(_) => simplex_into(zs, os),
            FeasibleSet::CappedSimplex { d, s } => {
                let p = project_capped_simplex(*d, *s, zs)?;
                os.copy_from_slice(&p.x);
            }
            FeasibleSet::Product(_) => unreachable!("leaves are never products"),
        }
    }
    Ok(())
}

/// Projection onto the probability simplex by sorting and thresholding.
pub fn project_simplex(z: &[f64]) -> Point {
    let mut out = Point::zeros(z.len());
    simplex_into(z, &mut out);
    out
}

fn simplex_into(z: &[f64], out: &mut [f64]) {
    let mut sorted = z.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    for (o, v) in out.iter_mut().zip(z) {
        *o = (v - tau).max(0.0);
    }
}

/// Result of a capped-simplex projection: `x_i = clamp(z_i - tau, 0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CappedProjection {
    pub x: Point,
    pub tau: f64,
}

fn capped_sum(z: &[f64], tau: f64) -> f64 {
    z.iter().map(|v| (v - tau).clamp(0.0, 1.0)).sum()
}

/// Projection onto `{x in [0,1]^d : sum x = s}`.
///
/// Bisection on the threshold `tau` brackets the active pattern, then `tau`
/// is recovered exactly from the free coordinates. If that pattern turns out
/// inconsistent (bisection stalled on a plateau edge) the breakpoint scan
/// solves the piecewise-linear equation directly in `O(d^2)`.
pub fn project_capped_simplex(d: usize, s: usize, z: &[f64]) -> Result<CappedProjection> {
    if s < 1 || s > d {
        return Err(Error::InvalidCardinality { d, s });
    }
    check_dim(d, z.len())?;
    let target = s as f64;
    let zmin = z.iter().copied().fold(f64::INFINITY, f64::min);
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (zmin - 1.0, zmax);
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        tau = 0.5 * (lo + hi);
        let sum = capped_sum(z, tau);
        if (sum - target).abs() <= 1e-14 * target.max(1.0) {
            break;
        }
        if sum > target {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }

    let (mut free_sum, mut free, mut upper) = (0.0, 0usize, 0usize);
    for v in z {
        let u = v - tau;
        if u >= 1.0 {
            upper += 1;
        } else if u > 0.0 {
            free += 1;
            free_sum += v;
        }
    }
    if free > 0 {
        let exact = (free_sum + upper as f64 - target) / free as f64;
        if (capped_sum(z, exact) - target).abs() <= 1e-12 * target.max(1.0) {
            tau = exact;
        } else {
            tau = breakpoint_scan(z, target);
        }
    } else if upper != s {
        tau = breakpoint_scan(z, target);
    }

    let x: Point = z.iter().map(|v| (v - tau).clamp(0.0, 1.0)).collect();
    Ok(CappedProjection { x, tau })
}

fn breakpoint_scan(z: &[f64], target: f64) -> f64 {
    let mut bps: Vec<f64> = z.iter().flat_map(|v| [*v, v - 1.0]).collect();
    bps.sort_unstable_by(f64::total_cmp);
    bps.dedup();
    // sum(tau) is non-increasing and piecewise linear between breakpoints.
    for pair in bps.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (capped_sum(z, a), capped_sum(z, b));
        if fa >= target && fb <= target {
            if fa == fb {
                return a;
            }
            return a + (fa - target) * (b - a) / (fa - fb);
        }
    }
    bps[0]
}

/// Projection by enumerating every active-set pattern of the bound and
/// equality constraints, keeping the feasible face-projection closest to `z`.
///
/// Exponential in `d`; intended as a test oracle for `d <= 8`.
pub fn brute_force_projection_oracle(set: &FeasibleSet, z: &[f64]) -> Result<Point> {
    let d = set.dim();
    if d > BRUTE_FORCE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: BRUTE_FORCE_MAX_DIM,
        });
    }
    check_dim(d, z.len())?;
    let mut out = Point::zeros(d);
    for (off, leaf) in set.leaves() {
        let n = leaf.dim();
        let zs = &z[off..off + n];
        let best = match leaf {
            FeasibleSet::FullSpace(_) => zs.to_vec(),
            FeasibleSet::Box { lo, hi } => enumerate_box(zs, lo, hi),
            FeasibleSet::Simplex(_) => enumerate_sum_constrained(zs, 1.0, None),
            FeasibleSet::CappedSimplex { s, .. } => enumerate_sum_constrained(zs, *s as f64, Some(1.0)),
            FeasibleSet::Product(_) => unreachable!("leaves are never products"),
        };
        out[off..off + n].copy_from_slice(&best);
    }
    Ok(out)
}

const FEAS_TOL: f64 = 1e-12;

/// Pattern digits: 0 = at lower bound, 1 = at upper bound, 2 = free.
fn enumerate_box(z: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let n = z.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut x = vec![0.0; n];
        let mut ok = true;
        for i in 0..n {
            let digit = c % 3;
            c /= 3;
            x[i] = match digit {
                0 => lo[i],
                1 => hi[i],
                _ => z[i],
            };
            if !x[i].is_finite() || x[i] < lo[i] - FEAS_TOL || x[i] > hi[i] + FEAS_TOL {
                ok = false;
                break;
            }
        }
        if ok {
            keep_closest(&mut best, z, x);
        }
    }
    best.expect("a box always has a feasible vertex pattern").1
}

#[derive(Clone, Copy, PartialEq)]
enum Pin {
    Zero,
    Cap,
    Free,
}

/// Faces of `{x : 0 <= x (<= cap), sum x = total}`: each coordinate is pinned
/// to 0, pinned to `cap`, or free; free coordinates share one multiplier.
fn enumerate_sum_constrained(z: &[f64], total: f64, cap: Option<f64>) -> Vec<f64> {
    let n = z.len();
    let states: &[Pin] = match cap {
        Some(_) => &[Pin::Zero, Pin::Cap, Pin::Free],
        None => &[Pin::Zero, Pin::Free],
    };
    let cap_v = cap.unwrap_or(f64::INFINITY);
    let base = states.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..base.pow(n as u32) {
        let mut c = code;
        let pattern: Vec<Pin> = (0..n)
            .map(|_| {
                let p = states[c % base];
                c /= base;
                p
            })
            .collect();
        let capped = pattern.iter().filter(|&&p| p == Pin::Cap).count() as f64;
        let free: Vec<usize> = (0..n).filter(|&i| pattern[i] == Pin::Free).collect();
        let mut x: Vec<f64> = pattern
            .iter()
            .map(|&p| if p == Pin::Cap { cap_v } else { 0.0 })
            .collect();
        let pinned = if capped > 0.0 { capped * cap_v } else { 0.0 };
        if free.is_empty() {
            if (pinned - total).abs() > FEAS_TOL {
                continue;
            }
        } else {
            let tau = (free.iter().map(|&i| z[i]).sum::<f64>() + pinned - total) / free.len() as f64;
            for &i in &free {
                x[i] = z[i] - tau;
            }
        }
        if x.iter().all(|&v| v >= -FEAS_TOL && v <= cap_v + FEAS_TOL) {
            keep_closest(&mut best, z, x);
        }
    }
    best.expect("the constraint set is nonempty").1
}

fn keep_closest(best: &mut Option<(f64, Vec<f64>)>, z: &[f64], x: Vec<f64>) {
    let d = dist(&x, z);
    if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
        *best = Some((d, x));
    }
}
