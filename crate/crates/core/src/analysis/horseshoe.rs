//! Covering-relation certificates for a full shift in a circle map, and the
//! branch arithmetic of the sine map.

use super::AnalysisError;
use crate::maps::{reduce_angle, LiftedCircleMap};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorseshoeOptions {
    /// Cells used for the derivative bounds.
    pub grid: usize,
    /// Required excess of the derivative lower bound over 1.
    pub min_margin: f64,
}

impl Default for HorseshoeOptions {
    fn default() -> Self {
        Self {
            grid: 8192,
            min_margin: 0.0,
        }
    }
}

/// A closed interval `[start, end]` of lifted phases on which the map is
/// monotone and expanding, with its image interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub start: f64,
    pub end: f64,
    pub image_lo: f64,
    pub image_hi: f64,
    /// Lower bound of `|F'|` on the strip.
    pub derivative_lower_bound: f64,
    /// `+1` if the map increases on the strip, `-1` otherwise.
    pub orientation: i8,
}

impl Strip {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Smallest shift `2πℓ` placing `[lo, hi]` inside the image, if any.
    fn covering_shift(&self, lo: f64, hi: f64) -> Option<f64> {
        let l = ((self.image_lo - lo) / TAU).ceil();
        let shift = TAU * l;
        (hi + shift <= self.image_hi).then_some(shift)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeCertificate {
    pub m: usize,
    pub strips: Vec<Strip>,
    /// Minimum over strips of the derivative lower bound.
    pub expansion_lower_bound: f64,
    /// `sup|F''| * Δ/2`, estimated from grid differences of `F'`.
    pub lipschitz_slack: f64,
    pub grid: usize,
    /// `covering_verified[i][j]`: `F(S_i)` contains a lift of `S_j`.
    pub covering_verified: Vec<Vec<bool>>,
    /// `ln m`, the entropy of the full shift on the all-ones covering matrix.
    pub entropy_lower_bound: f64,
}

impl HorseshoeCertificate {
    pub fn is_full_shift(&self) -> bool {
        self.covering_verified.iter().all(|row| row.iter().all(|b| *b))
    }
}

struct Run {
    /// Lifted phase of the first cell.
    start: f64,
    cells: usize,
    orientation: i8,
    bound: Vec<f64>,
}

/// Searches for `m` disjoint strips whose images each have length at least
/// `2π + max strip length`, which makes every image cover every strip.
///
/// The derivative is bounded below on each grid cell by the smaller endpoint
/// value minus a Lipschitz slack.
pub fn horseshoe_certify<M: LiftedCircleMap>(
    map: &M,
    m: usize,
    opts: HorseshoeOptions,
) -> Result<HorseshoeCertificate, AnalysisError> {
    if m < 2 {
        return Err(AnalysisError::InvalidInput {
            name: "m",
            reason: format!("{m} < 2"),
        });
    }
    let g = opts.grid;
    let dx = TAU / g as f64;
    let phase = |i: usize| dx * i as f64;
    let d: Vec<f64> = (0..g).map(|i| map.deriv(phase(i))).collect();
    let lip = (0..g)
        .map(|i| (d[(i + 1) % g] - d[i]).abs() / dx)
        .fold(0.0, f64::max);
    let slack = lip * dx / 2.0;

    let mut best_margin = f64::NEG_INFINITY;
    let cell: Vec<Option<(i8, f64)>> = (0..g)
        .map(|i| {
            let (a, b) = (d[i], d[(i + 1) % g]);
            let lower = a.abs().min(b.abs()) - slack;
            if a * b > 0.0 {
                best_margin = best_margin.max(lower - 1.0);
            }
            (a * b > 0.0 && lower >= 1.0 + opts.min_margin).then(|| (if a > 0.0 { 1 } else { -1 }, lower))
        })
        .collect();

    // Runs of good cells with a fixed orientation, read cyclically from a break.
    let brk = (0..g).find(|&i| match (cell[i], cell[(i + g - 1) % g]) {
        (None, _) | (_, None) => true,
        (Some((s1, _)), Some((s0, _))) => s1 != s0,
    });
    let start_idx = brk.unwrap_or(0);
    let mut runs: Vec<Run> = Vec::new();
    for k in 0..g {
        let i = (start_idx + k) % g;
        let lift = phase(start_idx) + dx * k as f64;
        match cell[i] {
            Some((s, b)) => match runs.last_mut() {
                Some(r) if r.orientation == s && (r.start + dx * r.cells as f64 - lift).abs() < dx * 0.5 => {
                    r.cells += 1;
                    r.bound.push(b);
                }
                _ => runs.push(Run {
                    start: lift,
                    cells: 1,
                    orientation: s,
                    bound: vec![b],
                }),
            },
            None => {}
        }
    }

    let greedy = |w: f64| -> Vec<Strip> {
        let mut out = Vec::new();
        for r in &runs {
            let mut t = 0;
            while t < r.cells {
                let s = r.start + dx * t as f64;
                let fs = map.lift(s);
                let mut e = t;
                let mut found = None;
                while e < r.cells {
                    let end = r.start + dx * (e + 1) as f64;
                    let fe = map.lift(end);
                    if (fe - fs).abs() >= TAU + w {
                        found = Some((end, fe));
                        break;
                    }
                    e += 1;
                }
                let Some((end, fe)) = found else { break };
                let lower = r.bound[t..=e].iter().cloned().fold(f64::INFINITY, f64::min);
                out.push(Strip {
                    start: s,
                    end,
                    image_lo: fs.min(fe),
                    image_hi: fs.max(fe),
                    derivative_lower_bound: lower,
                    orientation: r.orientation,
                });
                t = e + 2;
            }
        }
        out
    };

    let mut w = 0.0;
    let mut chosen: Vec<Strip> = Vec::new();
    let mut found = 0;
    for _ in 0..200 {
        let mut strips = greedy(w);
        found = strips.len();
        if strips.len() < m {
            chosen.clear();
            break;
        }
        strips.sort_by(|a, b| a.len().partial_cmp(&b.len()).unwrap().then(a.start.partial_cmp(&b.start).unwrap()));
        strips.truncate(m);
        let w_new = strips.iter().map(Strip::len).fold(0.0, f64::max);
        chosen = strips;
        if w_new <= w {
            break;
        }
        w = w_new;
        chosen.clear();
    }
    if chosen.len() < m {
        return Err(AnalysisError::NoHorseshoe {
            m,
            found,
            best_margin,
        });
    }
    chosen.sort_by(|a, b| reduce_angle(a.start).partial_cmp(&reduce_angle(b.start)).unwrap());
    let covering_verified: Vec<Vec<bool>> = chosen
        .iter()
        .map(|si| chosen.iter().map(|sj| si.covering_shift(sj.start, sj.end).is_some()).collect())
        .collect();
    let expansion_lower_bound = chosen.iter().map(|s| s.derivative_lower_bound).fold(f64::INFINITY, f64::min);
    let cert = HorseshoeCertificate {
        m,
        strips: chosen,
        expansion_lower_bound,
        lipschitz_slack: slack,
        grid: g,
        covering_verified,
        entropy_lower_bound: (m as f64).ln(),
    };
    if !cert.is_full_shift() || !strips_disjoint(&cert.strips) || !(expansion_lower_bound > 1.0) {
        return Err(AnalysisError::NoHorseshoe { m, found, best_margin });
    }
    Ok(cert)
}

fn strips_disjoint(strips: &[Strip]) -> bool {
    for (i, a) in strips.iter().enumerate() {
        for b in &strips[i + 1..] {
            // compare on the circle: shift b next to a
            let shift = TAU * ((a.start - b.start) / TAU).round();
            for s in [shift - TAU, shift, shift + TAU] {
                if b.start + s <= a.end && a.start <= b.end + s {
                    return false;
                }
            }
        }
    }
    true
}

/// Nested intervals realizing a symbol sequence: `intervals[k]` lies in
/// strip `symbols[k]` and is mapped onto a lift of `intervals[k + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowOrbit {
    pub symbols: Vec<usize>,
    pub intervals: Vec<(f64, f64)>,
    /// Midpoint of the first interval.
    pub point: f64,
    /// Largest mismatch between `F` at interval endpoints and the next interval.
    pub max_endpoint_error: f64,
}

fn preimage_in_strip<M: LiftedCircleMap>(map: &M, s: &Strip, target: f64) -> f64 {
    let (mut lo, mut hi) = (s.start, s.end);
    let inc = s.orientation > 0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (map.lift(mid) < target) == inc {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pulls the last strip back through the sequence. Fails if a covering
/// relation needed along the way does not hold.
pub fn shadow_sequence<M: LiftedCircleMap>(
    map: &M,
    cert: &HorseshoeCertificate,
    symbols: &[usize],
) -> Result<ShadowOrbit, AnalysisError> {
    if symbols.is_empty() || symbols.iter().any(|&s| s >= cert.m) {
        return Err(AnalysisError::InvalidInput {
            name: "symbols",
            reason: format!("need a non-empty sequence over 0..{}", cert.m),
        });
    }
    let n = symbols.len();
    let mut intervals = vec![(0.0, 0.0); n];
    let last = &cert.strips[symbols[n - 1]];
    intervals[n - 1] = (last.start, last.end);
    let mut max_err: f64 = 0.0;
    for k in (0..n - 1).rev() {
        let s = &cert.strips[symbols[k]];
        let (lo, hi) = intervals[k + 1];
        let shift = s.covering_shift(lo, hi).ok_or(AnalysisError::NoHorseshoe {
            m: cert.m,
            found: cert.strips.len(),
            best_margin: cert.expansion_lower_bound - 1.0,
        })?;
        let a = preimage_in_strip(map, s, lo + shift);
        let b = preimage_in_strip(map, s, hi + shift);
        let (x0, x1) = (a.min(b), a.max(b));
        let (f0, f1) = (map.lift(x0), map.lift(x1));
        let (g0, g1) = (f0.min(f1), f0.max(f1));
        max_err = max_err.max((g0 - lo - shift).abs()).max((g1 - hi - shift).abs());
        intervals[k] = (x0, x1);
    }
    Ok(ShadowOrbit {
        symbols: symbols.to_vec(),
        point: 0.5 * (intervals[0].0 + intervals[0].1),
        intervals,
        max_endpoint_error: max_err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SineBranches {
    pub branches: u32,
    pub full_covers_per_branch: u64,
}

/// Monotone branches of `φ -> A sin φ + ω̃` on one period and the number of
/// full circles each branch image `[ω̃ - A, ω̃ + A]` covers.
pub fn sine_branch_count(amplitude: f64) -> Result<SineBranches, AnalysisError> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(AnalysisError::InvalidInput {
            name: "A",
            reason: format!("{amplitude} is not > 0"),
        });
    }
    Ok(SineBranches {
        branches: 2,
        full_covers_per_branch: (2.0 * amplitude / TAU).floor() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{CircleMap, ModulationProfile, SaddleFocusParams, SineCircleMap};
    use std::f64::consts::PI;

    #[test]
    fn rigid_rotation_has_no_horseshoe() {
        let c = CircleMap::new(&SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(), ModulationProfile::constant(), 0.3);
        assert!(matches!(
            horseshoe_certify(&c, 2, HorseshoeOptions::default()),
            Err(AnalysisError::NoHorseshoe { .. })
        ));
    }

    #[test]
    fn sine_map_three_symbols() {
        let s = SineCircleMap {
            amplitude: 10.0,
            omega_tilde: 0.4,
        };
        let cert = horseshoe_certify(&s, 3, HorseshoeOptions::default()).unwrap();
        assert!(cert.is_full_shift());
        assert!(cert.expansion_lower_bound > 1.0);
        let orbit = shadow_sequence(&s, &cert, &[0, 2, 1, 1, 0, 2]).unwrap();
        assert!(orbit.max_endpoint_error < 1e-9);
    }

    #[test]
    fn steep_profile_two_symbols() {
        let c = CircleMap::new(
            &SaddleFocusParams::from_ratios(1.5, 5.0).unwrap(),
            ModulationProfile::sine(0.96).unwrap(),
            1.0,
        );
        let cert = horseshoe_certify(&c, 2, HorseshoeOptions::default()).unwrap();
        assert_eq!(cert.m, 2);
        assert!((cert.entropy_lower_bound - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn branch_arithmetic() {
        assert_eq!(sine_branch_count(1.0).unwrap().full_covers_per_branch, 0);
        assert_eq!(sine_branch_count(10.0).unwrap().full_covers_per_branch, 3);
        assert_eq!(sine_branch_count(PI).unwrap().full_covers_per_branch, 1);
        assert_eq!(sine_branch_count(10.0).unwrap().branches, 2);
        assert!(sine_branch_count(0.0).is_err());
    }
}
