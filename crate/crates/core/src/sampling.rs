//! Deterministic low-discrepancy sampling (Halton sequence, bases 2 and 3).

use alloc::vec::Vec;

use crate::map::{InvariantRegion, State};

/// Van der Corput radical inverse of `index` in `base`; lies in `(0, 1)` for `index >= 1`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    acc
}

/// 2-D Halton points starting after `skip` points. Index 0 (the origin) is never produced.
#[derive(Debug, Clone)]
pub struct Halton2 {
    next: u64,
}

impl Halton2 {
    pub fn new(skip: u64) -> Self {
        Halton2 { next: skip.saturating_add(1) }
    }
}

impl Iterator for Halton2 {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let i = self.next;
        self.next += 1;
        Some((radical_inverse(i, 2), radical_inverse(i, 3)))
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Window { x_min, x_max, y_min, y_max }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    pub fn contains(&self, s: State) -> bool {
        s.x >= self.x_min && s.x <= self.x_max && s.y >= self.y_min && s.y <= self.y_max
    }
}

/// `n` quasi-random points strictly inside `w`.
pub fn halton_in_window(w: &Window, n: usize, skip: u64) -> Vec<State> {
    Halton2::new(skip)
        .take(n)
        .map(|(u, v)| State::new(w.x_min + u * (w.x_max - w.x_min), w.y_min + v * (w.y_max - w.y_min)))
        .collect()
}

/// `n` quasi-random interior points of `D_eps`: the total `x + y` is spread
/// over `(eps, upper)` and the split between species over `(0, 1)`.
pub fn halton_in_region(r: &InvariantRegion, n: usize, skip: u64) -> Vec<State> {
    Halton2::new(skip)
        .take(n)
        .map(|(h, share)| {
            let u = r.eps + h * (r.upper - r.eps);
            State::new(share * u, (1.0 - share) * u)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_halton_points() {
        let pts: Vec<_> = Halton2::new(0).take(3).collect();
        assert_eq!(pts[0], (0.5, 1.0 / 3.0));
        assert_eq!(pts[1], (0.25, 2.0 / 3.0));
        assert_eq!(pts[2], (0.75, 1.0 / 9.0));
    }

    #[test]
    fn region_samples_are_interior() {
        let r = InvariantRegion { eps: 1.0, upper: 3.0, r_m: 1.0 };
        for s in halton_in_region(&r, 1000, 7) {
            assert!(s.is_interior());
            assert!(r.contains_within(s, 1e-15));
        }
    }
}
