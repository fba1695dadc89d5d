//! Two-asset grids for plotting: potential surfaces and level-set
//! polylines, emitted as CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::Market;
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone_tight, Direction, RootFindConfig};
use crate::potential::{Domain, PotentialFunction};
use crate::spec::MarketSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Axis { lo, hi, steps }
    }

    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(move |i| if i + 1 == self.steps { self.hi } else { self.lo + h * i as f64 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// `q1,q2,phi` at every grid node.
    Surface,
    /// `level,ray,q1,q2`: for each level, the points where rays from the
    /// origin through the box cross that level. The first axis' step
    /// count sets the number of rays.
    Levels,
}

fn default_levels() -> Vec<f64> {
    vec![0.2, 0.6, 1.0, 1.4, 1.8]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRequest {
    pub market: MarketSpec,
    pub axes: [Axis; 2],
    pub mode: GridMode,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelPoint {
    pub level: f64,
    pub ray: usize,
    pub q: [f64; 2],
}

fn check_axes(phi: &dyn PotentialFunction, axes: &[Axis; 2]) -> Result<()> {
    if phi.dim() != 2 {
        return Err(Error::spec(format!("grids need a two-asset potential, got {}", phi.dim())));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.steps < 2 {
            return Err(Error::spec(format!("axis {} needs at least 2 steps", i + 1)));
        }
        if !(a.lo.is_finite() && a.hi.is_finite() && a.lo < a.hi) {
            return Err(Error::spec(format!("axis {} range [{}, {}] is empty", i + 1, a.lo, a.hi)));
        }
        if phi.domain() == Domain::PositiveOrthant && a.lo <= 0.0 {
            return Err(Error::domain(format!(
                "axis {} starts at {} outside the positive orthant",
                i + 1,
                a.lo
            )));
        }
    }
    Ok(())
}

pub fn surface(phi: &dyn PotentialFunction, axes: &[Axis; 2]) -> Result<Vec<[f64; 3]>> {
    check_axes(phi, axes)?;
    let mut out = Vec::with_capacity(axes[0].steps * axes[1].steps);
    for x in axes[0].points() {
        for y in axes[1].points() {
            out.push([x, y, phi.eval(&[x, y])?]);
        }
    }
    Ok(out)
}

/// Level-set polylines traced along rays from the origin. Ray angles run
/// from the box's lower-right corner to its upper-left corner.
pub fn level_sets(phi: &dyn PotentialFunction, axes: &[Axis; 2], levels: &[f64]) -> Result<Vec<LevelPoint>> {
    check_axes(phi, axes)?;
    let rays = axes[0].steps;
    let from = axes[1].lo.atan2(axes[0].hi);
    let to = axes[1].hi.atan2(axes[0].lo);
    let cfg = RootFindConfig {
        rel_tol: 1e-15,
        ..RootFindConfig::default()
    };
    let mut out = Vec::with_capacity(rays * levels.len());
    for &level in levels {
        for k in 0..rays {
            let theta = from + (to - from) * k as f64 / (rays - 1) as f64;
            let u = [theta.cos(), theta.sin()];
            let along = |t: f64| phi.eval(&[t * u[0], t * u[1]]);
            let seed = ray_bracket(phi.domain(), &along, level)?;
            let t = solve_monotone_tight(along, level, seed, Direction::Increasing, &cfg)?;
            out.push(LevelPoint {
                level,
                ray: k,
                q: [t * u[0], t * u[1]],
            });
        }
    }
    Ok(out)
}

fn ray_bracket<F: Fn(f64) -> Result<f64>>(domain: Domain, along: &F, level: f64) -> Result<(f64, f64)> {
    if domain == Domain::All {
        return Ok((0.0, 1.0));
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..1100 {
        if along(lo)? <= level {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo == 0.0 {
            return Err(Error::bracket(format!("level {level} is below every value along the ray")));
        }
    }
    for _ in 0..1100 {
        if along(hi)? >= level {
            return Ok((lo, hi));
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::bracket(format!("level {level} is never reached along the ray")))
}

impl GridRequest {
    pub fn from_json(s: &str) -> Result<Self> {
        let req: GridRequest = serde_json::from_str(s).map_err(|e| Error::spec(format!("bad grid request: {e}")))?;
        req.market.validate()?;
        Ok(req)
    }

    /// Evaluate the request against the market's potential and render CSV.
    pub fn run(&self) -> Result<String> {
        let market = Market::from_spec(self.market.clone())?;
        let phi = market.potential().as_ref();
        match self.mode {
            GridMode::Surface => Ok(surface_csv(&surface(phi, &self.axes)?)),
            GridMode::Levels => Ok(levels_csv(&level_sets(phi, &self.axes, &self.levels)?)),
        }
    }
}

pub fn surface_csv(rows: &[[f64; 3]]) -> String {
    let mut s = String::from("q1,q2,phi\n");
    for [x, y, v] in rows {
        let _ = writeln!(s, "{x},{y},{v}");
    }
    s
}

pub fn levels_csv(points: &[LevelPoint]) -> String {
    let mut s = String::from("level,ray,q1,q2\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", p.level, p.ray, p.q[0], p.q[1]);
    }
    s
}
