//! Basins of attraction of the interior 2-cycle under the second iterate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Curve;
use crate::map::{self, MapFamily, State};
use crate::orbits::Orbit2;
use crate::sampling::Window;
use crate::stability::STALE_ORBIT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellClass {
    PhaseA,
    PhaseB,
    XExtinct,
    YExtinct,
    Undecided,
    Invalid,
}

impl CellClass {
    pub const ALL: [CellClass; 6] = [
        CellClass::PhaseA,
        CellClass::PhaseB,
        CellClass::XExtinct,
        CellClass::YExtinct,
        CellClass::Undecided,
        CellClass::Invalid,
    ];

    /// Byte code used in class-index exports.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<CellClass> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            CellClass::PhaseA => "PHASE_A",
            CellClass::PhaseB => "PHASE_B",
            CellClass::XExtinct => "X_EXTINCT",
            CellClass::YExtinct => "Y_EXTINCT",
            CellClass::Undecided => "UNDECIDED",
            CellClass::Invalid => "INVALID",
        }
    }

    pub fn is_phase(self) -> bool {
        matches!(self, CellClass::PhaseA | CellClass::PhaseB)
    }

    /// Phase after one application of the map.
    pub fn swapped(self) -> CellClass {
        match self {
            CellClass::PhaseA => CellClass::PhaseB,
            CellClass::PhaseB => CellClass::PhaseA,
            other => other,
        }
    }
}

/// Consecutive even steps near a cycle point needed to declare a phase.
pub const PHASE_CONFIRM: usize = 3;
/// Consecutive steps with a coordinate below `axis_tol` needed to declare extinction.
pub const EXTINCTION_CONFIRM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinSettings {
    pub max_iter: usize,
    pub tol: f64,
    pub axis_tol: f64,
}

impl Default for BasinSettings {
    fn default() -> Self {
        BasinSettings { max_iter: 5000, tol: 1e-4, axis_tol: 1e-10 }
    }
}

impl BasinSettings {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter { name: "tol", value: self.tol });
        }
        if !(self.axis_tol >= 0.0 && self.axis_tol.is_finite()) {
            return Err(Error::InvalidParameter { name: "axis_tol", value: self.axis_tol });
        }
        Ok(())
    }
}

fn check_orbit(f: &MapFamily, o: &Orbit2) -> Result<()> {
    let back = map::step(f, map::step(f, o.p1)?)?;
    let residual = back.dist_max(&o.p1);
    if !(residual <= STALE_ORBIT_TOL) {
        return Err(Error::StaleOrbit { residual });
    }
    Ok(())
}

/// Classifies `s0` by the fate of its forward orbit; `orbit` may be absent
/// when no interior 2-cycle exists, in which case only extinction is detected.
pub fn classify_point(f: &MapFamily, orbit: Option<&Orbit2>, s0: State, settings: &BasinSettings) -> Result<CellClass> {
    settings.validate()?;
    if let Some(o) = orbit {
        check_orbit(f, o)?;
    }
    Ok(classify_unchecked(f, orbit, s0, settings).0)
}

/// Class and the number of map applications spent deciding it.
pub fn classify_point_detailed(
    f: &MapFamily,
    orbit: Option<&Orbit2>,
    s0: State,
    settings: &BasinSettings,
) -> Result<(CellClass, usize)> {
    settings.validate()?;
    if let Some(o) = orbit {
        check_orbit(f, o)?;
    }
    Ok(classify_unchecked(f, orbit, s0, settings))
}

fn classify_unchecked(
    f: &MapFamily,
    orbit: Option<&Orbit2>,
    s0: State,
    settings: &BasinSettings,
) -> (CellClass, usize) {
    if f.check_state(s0).is_err() {
        return (CellClass::Invalid, 0);
    }
    let (mut near_a, mut near_b) = (0usize, 0usize);
    let (mut low_x, mut low_y) = (0usize, 0usize);
    let mut s = s0;
    for n in 0..=settings.max_iter {
        if n % 2 == 0 {
            if let Some(o) = orbit {
                near_a = if s.dist_max(&o.p1) <= settings.tol { near_a + 1 } else { 0 };
                near_b = if s.dist_max(&o.p2) <= settings.tol { near_b + 1 } else { 0 };
                if near_a >= PHASE_CONFIRM {
                    return (CellClass::PhaseA, n);
                }
                if near_b >= PHASE_CONFIRM {
                    return (CellClass::PhaseB, n);
                }
            }
        }
        low_x = if s.x < settings.axis_tol { low_x + 1 } else { 0 };
        low_y = if s.y < settings.axis_tol { low_y + 1 } else { 0 };
        if low_x >= EXTINCTION_CONFIRM {
            return (CellClass::XExtinct, n);
        }
        if low_y >= EXTINCTION_CONFIRM {
            return (CellClass::YExtinct, n);
        }
        if n == settings.max_iter {
            break;
        }
        s = match map::step(f, s) {
            Ok(next) => next,
            Err(_) => return (CellClass::Undecided, n),
        };
    }
    (CellClass::Undecided, settings.max_iter)
}

/// Everything needed to classify one raster cell; shared by sequential and
/// parallel drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinSpec {
    pub family: MapFamily,
    pub orbit: Option<Orbit2>,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub settings: BasinSettings,
}

impl BasinSpec {
    pub fn new(
        family: MapFamily,
        orbit: Option<Orbit2>,
        window: Window,
        nx: usize,
        ny: usize,
        settings: BasinSettings,
    ) -> Result<Self> {
        if !window.is_valid() {
            return Err(Error::Precondition("window needs finite bounds with min < max"));
        }
        if nx < 2 {
            return Err(Error::InvalidParameter { name: "nx", value: nx as f64 });
        }
        if ny < 2 {
            return Err(Error::InvalidParameter { name: "ny", value: ny as f64 });
        }
        settings.validate()?;
        if let Some(o) = &orbit {
            check_orbit(&family, o)?;
        }
        Ok(BasinSpec { family, orbit, window, nx, ny, settings })
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Center of cell `(i, j)`; `j` counts up from `y_min`.
    pub fn cell_center(&self, i: usize, j: usize) -> State {
        let w = &self.window;
        let dx = (w.x_max - w.x_min) / self.nx as f64;
        let dy = (w.y_max - w.y_min) / self.ny as f64;
        State::new(w.x_min + (i as f64 + 0.5) * dx, w.y_min + (j as f64 + 0.5) * dy)
    }

    /// Classifies the cell with row-major index `idx = j * nx + i`.
    pub fn classify_cell(&self, idx: usize) -> (CellClass, usize) {
        let s = self.cell_center(idx % self.nx, idx / self.nx);
        classify_unchecked(&self.family, self.orbit.as_ref(), s, &self.settings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `cells[j * nx + i]`, with `j = 0` the row nearest `y_min`.
    pub cells: Vec<CellClass>,
    /// Map applications spent on each cell.
    pub iters: Vec<u32>,
    pub family: MapFamily,
    pub orbit: Option<Orbit2>,
    pub settings: BasinSettings,
    /// Largest per-cell iteration count.
    pub iters_used: usize,
}

impl BasinGrid {
    /// Assembles a grid from per-cell results given in row-major order.
    pub fn from_results(spec: &BasinSpec, results: Vec<(CellClass, usize)>) -> Result<Self> {
        if results.len() != spec.cell_count() {
            return Err(Error::Precondition("one result per cell is required"));
        }
        let iters_used = results.iter().map(|r| r.1).max().unwrap_or(0);
        let (cells, iters) = results.into_iter().map(|(c, n)| (c, n.min(u32::MAX as usize) as u32)).unzip();
        Ok(BasinGrid {
            window: spec.window,
            nx: spec.nx,
            ny: spec.ny,
            cells,
            iters,
            family: spec.family,
            orbit: spec.orbit,
            settings: spec.settings,
            iters_used,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> CellClass {
        self.cells[j * self.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> State {
        let dx = (self.window.x_max - self.window.x_min) / self.nx as f64;
        let dy = (self.window.y_max - self.window.y_min) / self.ny as f64;
        State::new(self.window.x_min + (i as f64 + 0.5) * dx, self.window.y_min + (j as f64 + 0.5) * dy)
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    /// Fraction of cells with a valid (in-domain) center that fall in `class`.
    pub fn fraction(&self, class: CellClass) -> f64 {
        let valid = self.cells.len() - self.count(CellClass::Invalid);
        if valid == 0 {
            return 0.0;
        }
        self.count(class) as f64 / valid as f64
    }
}

/// Classifies every cell center in order.
pub fn rasterize(spec: &BasinSpec) -> BasinGrid {
    let results = (0..spec.cell_count()).map(|idx| spec.classify_cell(idx)).collect();
    BasinGrid::from_results(spec, results).expect("one result per cell")
}

/// Cells crossed by overlay curves, same layout as the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlay {
    pub nx: usize,
    pub ny: usize,
    pub marked: Vec<bool>,
}

impl Overlay {
    pub fn is_marked(&self, i: usize, j: usize) -> bool {
        self.marked[j * self.nx + i]
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    /// Whether a marked cell lies within `radius` cells (Chebyshev) of `(i, j)`.
    pub fn near(&self, i: usize, j: usize, radius: usize) -> bool {
        let (i0, i1) = (i.saturating_sub(radius), (i + radius).min(self.nx - 1));
        let (j0, j1) = (j.saturating_sub(radius), (j + radius).min(self.ny - 1));
        (j0..=j1).any(|jj| (i0..=i1).any(|ii| self.is_marked(ii, jj)))
    }
}

/// Marks every cell that a curve polyline passes through.
pub fn boundary_overlay(grid: &BasinGrid, curves: &[Curve]) -> Overlay {
    let (nx, ny) = (grid.nx, grid.ny);
    let w = grid.window;
    let dx = (w.x_max - w.x_min) / nx as f64;
    let dy = (w.y_max - w.y_min) / ny as f64;
    let mut marked = vec![false; nx * ny];
    let mut mark = |p: State| {
        if !w.contains(p) {
            return;
        }
        let i = (((p.x - w.x_min) / dx) as usize).min(nx - 1);
        let j = (((p.y - w.y_min) / dy) as usize).min(ny - 1);
        marked[j * nx + i] = true;
    };
    for c in curves {
        if let [only] = c.points.as_slice() {
            mark(*only);
        }
        for (a, b) in c.segments() {
            // sample at a quarter cell so no crossed cell is skipped
            let cells = libm::fmax(libm::fabs(b.x - a.x) / dx, libm::fabs(b.y - a.y) / dy);
            let n = if cells.is_finite() { (libm::ceil(cells * 4.0) as usize).clamp(1, 1 << 20) } else { 1 };
            for k in 0..=n {
                let t = k as f64 / n as f64;
                mark(State::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
        }
    }
    Overlay { nx, ny, marked }
}

/// Fraction of UNDECIDED cells within `radius` cells of an overlay curve;
/// `None` when there are no UNDECIDED cells.
pub fn undecided_near_overlay(grid: &BasinGrid, overlay: &Overlay, radius: usize) -> Option<f64> {
    let mut total = 0usize;
    let mut near = 0usize;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.get(i, j) == CellClass::Undecided {
                total += 1;
                if overlay.near(i, j, radius) {
                    near += 1;
                }
            }
        }
    }
    (total > 0).then(|| near as f64 / total as f64)
}

/// A maximal 4-connected set of cells of one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub class: CellClass,
    pub size: usize,
}

/// 4-connected single-phase components, optionally treating overlay cells as
/// walls. Sorted by decreasing size.
pub fn phase_components(grid: &BasinGrid, walls: Option<&Overlay>) -> Vec<Component> {
    let (nx, ny) = (grid.nx, grid.ny);
    let blocked = |idx: usize| walls.is_some_and(|o| o.marked[idx]);
    let mut seen = vec![false; nx * ny];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        let class = grid.cells[start];
        if seen[start] || !class.is_phase() || blocked(start) {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(idx) = stack.pop() {
            size += 1;
            let (i, j) = (idx % nx, idx / nx);
            let mut visit = |n: usize| {
                if !seen[n] && grid.cells[n] == class && !blocked(n) {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                visit(idx - 1);
            }
            if i + 1 < nx {
                visit(idx + 1);
            }
            if j > 0 {
                visit(idx - nx);
            }
            if j + 1 < ny {
                visit(idx + nx);
            }
        }
        out.push(Component { class, size });
    }
    out.sort_by(|a, b| b.size.cmp(&a.size).then(a.class.cmp(&b.class)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurveSource;
    use crate::orbits;

    fn running() -> (MapFamily, Orbit2) {
        let f = MapFamily::lottery(2.0, 2.2, 0.0).unwrap();
        let o = orbits::interior_2cycle(&f).unwrap();
        (f, o)
    }

    #[test]
    fn cycle_points_classify_as_their_phase() {
        let (f, o) = running();
        let s = BasinSettings::default();
        assert_eq!(classify_point(&f, Some(&o), o.p1, &s).unwrap(), CellClass::PhaseA);
        assert_eq!(classify_point(&f, Some(&o), o.p2, &s).unwrap(), CellClass::PhaseB);
        let img = map::step(&f, o.p2).unwrap();
        assert_eq!(classify_point(&f, Some(&o), img, &s).unwrap(), CellClass::PhaseA);
        let (_, n) = classify_point_detailed(&f, Some(&o), o.p1, &s).unwrap();
        assert_eq!(n, 2 * (PHASE_CONFIRM - 1));
    }

    #[test]
    fn generic_point_is_decided() {
        let (f, o) = running();
        let c = classify_point(&f, Some(&o), State::new(1.0, 0.5), &BasinSettings::default()).unwrap();
        assert!(c.is_phase(), "{c:?}");
    }

    #[test]
    fn origin_is_invalid() {
        let (f, o) = running();
        let c = classify_point(&f, Some(&o), State::new(0.0, 0.0), &BasinSettings::default()).unwrap();
        assert_eq!(c, CellClass::Invalid);
    }

    #[test]
    fn bad_tolerance_and_stale_orbit() {
        let (f, mut o) = running();
        let s = BasinSettings { tol: 0.0, ..Default::default() };
        assert!(classify_point(&f, Some(&o), State::new(1.0, 1.0), &s).is_err());
        o.p1.x += 1e-3;
        let r = classify_point(&f, Some(&o), State::new(1.0, 1.0), &BasinSettings::default());
        assert!(matches!(r, Err(Error::StaleOrbit { .. })));
    }

    #[test]
    fn x_wins_gives_y_extinct() {
        let f = MapFamily::lottery(3.0, 2.0, 0.0).unwrap();
        let c = classify_point(&f, None, State::new(0.5, 1.5), &BasinSettings::default()).unwrap();
        assert_eq!(c, CellClass::YExtinct);
    }

    #[test]
    fn codes_round_trip() {
        for c in CellClass::ALL {
            assert_eq!(CellClass::from_code(c.code()), Some(c));
        }
        assert_eq!(CellClass::from_code(6), None);
    }

    #[test]
    fn small_raster_is_deterministic() {
        let (f, o) = running();
        let spec = BasinSpec::new(f, Some(o), Window::new(0.0, 3.0, 0.0, 4.0), 8, 6, BasinSettings::default()).unwrap();
        let a = rasterize(&spec);
        let b = rasterize(&spec);
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 48);
        assert!(a.count(CellClass::PhaseA) + a.count(CellClass::PhaseB) > 40);
    }

    #[test]
    fn spec_rejects_bad_shape() {
        let (f, o) = running();
        let w = Window::new(0.0, 3.0, 0.0, 4.0);
        assert!(BasinSpec::new(f, Some(o), w, 1, 6, BasinSettings::default()).is_err());
        let bad = Window::new(1.0, 1.0, 0.0, 4.0);
        assert!(BasinSpec::new(f, Some(o), bad, 4, 4, BasinSettings::default()).is_err());
    }

    #[test]
    fn overlay_marks_crossed_cells() {
        let (f, o) = running();
        let spec = BasinSpec::new(f, Some(o), Window::new(0.0, 4.0, 0.0, 4.0), 4, 4, BasinSettings::default()).unwrap();
        let mut grid = rasterize(&spec);
        assert_eq!(boundary_overlay(&grid, &[]).marked_count(), 0);
        let diag = Curve::new(alloc::vec![State::new(0.1, 0.1), State::new(3.9, 3.9)], CurveSource::Heteroclinic);
        let ov = boundary_overlay(&grid, core::slice::from_ref(&diag));
        for k in 0..4 {
            assert!(ov.is_marked(k, k));
        }
        assert!(!ov.is_marked(3, 0));
        grid.cells.iter_mut().for_each(|c| *c = CellClass::Invalid);
        assert_eq!(boundary_overlay(&grid, &[diag]), ov);
    }

    #[test]
    fn components_respect_walls() {
        let (f, o) = running();
        let spec = BasinSpec::new(f, Some(o), Window::new(0.0, 3.0, 0.0, 3.0), 3, 3, BasinSettings::default()).unwrap();
        let mut grid = rasterize(&spec);
        grid.cells.iter_mut().for_each(|c| *c = CellClass::PhaseA);
        assert_eq!(phase_components(&grid, None).len(), 1);
        let mut wall = Overlay { nx: 3, ny: 3, marked: vec![false; 9] };
        for j in 0..3 {
            wall.marked[j * 3 + 1] = true;
        }
        let comps = phase_components(&grid, Some(&wall));
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.size == 3));
    }
}
