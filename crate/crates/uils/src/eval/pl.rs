//! Piecewise-linear function machinery.
//!
//! Functions are stored as ordered, contiguous segment lists over
//! `[domain_start, +inf)`. Each segment carries the interval `[start, end]`,
//! the function value at `start` and the slope, so evaluation inside a
//! segment is `value + slope * (t - start)`. A cursor remembers the segment
//! of the previous query; monotone query sequences therefore touch each
//! segment O(1) times.

use std::cell::Cell;

use crate::model::{Cost, Time};

/// Stand-in for an unbounded segment end. Never a valid query point.
pub const T_INF: Time = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Time,
    pub end: Time,
    /// Function value at `start`.
    pub value: Cost,
    pub slope: Cost,
}

impl Segment {
    #[inline]
    fn eval(&self, t: Time) -> Cost {
        self.value + self.slope * (t - self.start)
    }

    #[inline]
    fn end_value(&self) -> Cost {
        debug_assert!(self.end < T_INF);
        self.eval(self.end)
    }
}

#[derive(Debug, Clone)]
pub struct PiecewiseFn {
    segs: Vec<Segment>,
    cursor: Cell<usize>,
}

impl PartialEq for PiecewiseFn {
    fn eq(&self, other: &Self) -> bool {
        self.segs == other.segs
    }
}
impl Eq for PiecewiseFn {}

impl PiecewiseFn {
    fn from_segments(segs: Vec<Segment>) -> Self {
        debug_assert!(!segs.is_empty());
        let f = PiecewiseFn { segs, cursor: Cell::new(0) };
        f.debug_check();
        f
    }

    /// Constant zero on `[0, +inf)`.
    pub fn zero() -> Self {
        PiecewiseFn::constant(0)
    }

    pub fn constant(value: Cost) -> Self {
        PiecewiseFn::from_segments(vec![Segment { start: 0, end: T_INF, value, slope: 0 }])
    }

    /// V-shaped function on `[0, +inf)` with value 0 at `kink`, slope
    /// `-down` before it and `+up` after it. A non-positive kink leaves
    /// only the rising ray, anchored at `up * -kink`.
    pub fn vee(down: Cost, up: Cost, kink: Time) -> Self {
        if kink <= 0 {
            return PiecewiseFn::from_segments(vec![Segment {
                start: 0,
                end: T_INF,
                value: up * -kink,
                slope: up,
            }]);
        }
        let mut f = PiecewiseFn {
            segs: vec![
                Segment { start: 0, end: kink, value: down * kink, slope: -down },
                Segment { start: kink, end: T_INF, value: 0, slope: up },
            ],
            cursor: Cell::new(0),
        };
        f.coalesce();
        f
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segs
    }

    pub fn domain_start(&self) -> Time {
        self.segs[0].start
    }

    /// Evaluates at `t >= domain_start`. The cursor makes monotone scans
    /// (in either direction) amortized O(1) per query.
    pub fn eval(&self, t: Time) -> Cost {
        debug_assert!(t >= self.domain_start(), "query {t} below domain start");
        debug_assert!(t < T_INF / 2);
        let mut idx = self.cursor.get().min(self.segs.len() - 1);
        while t < self.segs[idx].start {
            idx -= 1;
        }
        while t > self.segs[idx].end {
            idx += 1;
        }
        self.cursor.set(idx);
        self.segs[idx].eval(t)
    }

    /// `f(t + delta)`: shifts the graph left for positive `delta`.
    pub fn shift_arg(&self, delta: Time) -> Self {
        let segs = self
            .segs
            .iter()
            .map(|s| Segment {
                start: s.start - delta,
                end: if s.end >= T_INF { T_INF } else { s.end - delta },
                value: s.value,
                slope: s.slope,
            })
            .collect();
        PiecewiseFn::from_segments(segs)
    }

    /// Restricts the domain to `[t0, +inf)`, trimming or dropping segments.
    pub fn clip_below(&self, t0: Time) -> Self {
        if t0 <= self.domain_start() {
            return self.clone();
        }
        let mut segs = Vec::with_capacity(self.segs.len());
        for s in &self.segs {
            if s.end < t0 {
                continue;
            }
            if s.start >= t0 {
                segs.push(s.clone());
            } else {
                segs.push(Segment { start: t0, end: s.end, value: s.eval(t0), slope: s.slope });
            }
        }
        // t0 exactly at a shared breakpoint can leave a zero-length head
        if segs.len() > 1 && segs[0].start == segs[0].end {
            segs.remove(0);
        }
        let mut f = PiecewiseFn::from_segments(segs);
        f.coalesce();
        f
    }

    /// Pointwise sum over the intersection of the domains.
    pub fn add(&self, other: &PiecewiseFn) -> Self {
        let start = self.domain_start().max(other.domain_start());
        let mut a = self.segs.iter().skip_while(|s| s.end <= start).peekable();
        let mut b = other.segs.iter().skip_while(|s| s.end <= start).peekable();
        let mut segs = Vec::with_capacity(self.segs.len() + other.segs.len());
        let mut t = start;
        while let (Some(sa), Some(sb)) = (a.peek(), b.peek()) {
            let end = sa.end.min(sb.end);
            segs.push(Segment {
                start: t,
                end,
                value: sa.eval(t) + sb.eval(t),
                slope: sa.slope + sb.slope,
            });
            if sa.end == end {
                a.next();
            }
            if sb.end == end {
                b.next();
            }
            if end >= T_INF {
                break;
            }
            t = end;
        }
        let mut f = PiecewiseFn::from_segments(segs);
        f.coalesce();
        f
    }

    /// `min_{u <= t} f(u)` for convex `f`: keeps the decreasing part and
    /// continues with the minimum as a constant.
    pub fn prefix_min_flatten(&self) -> Self {
        debug_assert!(self.is_convex());
        let mut segs = Vec::with_capacity(self.segs.len());
        for s in &self.segs {
            if s.slope < 0 {
                segs.push(s.clone());
            } else {
                let floor = s.value;
                segs.push(Segment { start: s.start, end: T_INF, value: floor, slope: 0 });
                break;
            }
        }
        if segs.is_empty() {
            // strictly decreasing everywhere cannot happen with a T_INF tail
            unreachable!("piecewise function without a final non-negative slope");
        }
        if segs.last().unwrap().end < T_INF {
            let last = segs.last().unwrap();
            let value = last.end_value();
            let start = last.end;
            segs.push(Segment { start, end: T_INF, value, slope: 0 });
        }
        let mut f = PiecewiseFn::from_segments(segs);
        f.coalesce();
        f
    }

    /// `min_{u >= max(t, domain_start)} f(u)` for convex `f`, extended to all
    /// `t >= 0`: a constant plateau at the minimum followed by the rising part.
    pub fn suffix_min_flatten(&self) -> Self {
        debug_assert!(self.is_convex());
        let (argmin, min) = self.earliest_argmin();
        let mut segs = vec![Segment { start: 0, end: argmin.max(0), value: min, slope: 0 }];
        for s in &self.segs {
            if s.end <= argmin {
                continue;
            }
            if s.start >= argmin {
                segs.push(s.clone());
            } else {
                segs.push(Segment { start: argmin, end: s.end, value: s.eval(argmin), slope: s.slope });
            }
        }
        if segs.len() > 1 && segs[0].start == segs[0].end {
            segs.remove(0);
        }
        let mut f = PiecewiseFn::from_segments(segs);
        f.coalesce();
        f
    }

    /// Earliest minimiser of a convex function and the minimum value.
    pub fn earliest_argmin(&self) -> (Time, Cost) {
        debug_assert!(self.is_convex());
        for s in &self.segs {
            if s.slope >= 0 {
                return (s.start, s.value);
            }
            if s.end >= T_INF {
                unreachable!("unbounded decreasing tail");
            }
        }
        let last = self.segs.last().unwrap();
        (last.end, last.end_value())
    }

    pub fn min_value(&self) -> Cost {
        self.earliest_argmin().1
    }

    pub fn is_convex(&self) -> bool {
        self.segs.windows(2).all(|w| w[0].slope <= w[1].slope)
    }

    /// Merges adjacent collinear segments and drops empty ones.
    fn coalesce(&mut self) {
        let mut out: Vec<Segment> = Vec::with_capacity(self.segs.len());
        for s in self.segs.drain(..) {
            if s.start == s.end && !out.is_empty() {
                continue;
            }
            match out.last_mut() {
                Some(prev) if prev.slope == s.slope && prev.eval(s.start) == s.value => {
                    prev.end = s.end;
                }
                Some(prev) if prev.start == prev.end => {
                    *prev = s;
                }
                _ => out.push(s),
            }
        }
        self.segs = out;
        self.cursor.set(0);
        self.debug_check();
    }

    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        assert!(!self.segs.is_empty());
        assert_eq!(self.segs.last().unwrap().end, T_INF);
        for w in self.segs.windows(2) {
            assert_eq!(w[0].end, w[1].start, "segments must be contiguous");
            assert_eq!(w[0].eval(w[0].end), w[1].value, "segments must be continuous");
        }
    }

    #[cfg(not(debug_assertions))]
    fn debug_check(&self) {}
}

/// `min_u f(u) + g(u + gap)` for a non-increasing-then-flat `f` and a
/// plateau-then-rising `g` (both convex). The sum is convex, so the minimum
/// is attained at a breakpoint of either operand.
pub fn min_sum_shifted(f: &PiecewiseFn, g: &PiecewiseFn, gap: Time) -> Cost {
    let lo = f.domain_start().max(g.domain_start() - gap);
    let mut best = f.eval(lo) + g.eval(lo + gap);
    let candidates = f
        .segments()
        .iter()
        .map(|s| s.start)
        .chain(g.segments().iter().map(|s| s.start - gap));
    for t in candidates {
        if t <= lo || t >= T_INF / 2 {
            continue;
        }
        let v = f.eval(t) + g.eval(t + gap);
        if v < best {
            best = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vee_shape_and_eval() {
        let f = PiecewiseFn::vee(2, 4, 5);
        assert_eq!(f.segments().len(), 2);
        assert_eq!(f.eval(0), 10);
        assert_eq!(f.eval(5), 0);
        assert_eq!(f.eval(7), 8);
        // degenerate early side
        let g = PiecewiseFn::vee(1, 3, -2);
        assert_eq!(g.segments().len(), 1);
        assert_eq!(g.eval(0), 6);
        assert_eq!(g.eval(4), 18);
    }

    #[test]
    fn cursor_walks_both_directions() {
        let f = PiecewiseFn::vee(1, 1, 10);
        for t in 0..30 {
            assert_eq!(f.eval(t), (t - 10).abs());
        }
        for t in (0..30).rev() {
            assert_eq!(f.eval(t), (t - 10).abs());
        }
    }

    #[test]
    fn add_merges_breakpoints() {
        let f = PiecewiseFn::vee(2, 4, 5);
        let g = PiecewiseFn::vee(1, 2, 2);
        let h = f.add(&g);
        for t in 0..20 {
            assert_eq!(h.eval(t), f.eval(t) + g.eval(t));
        }
        assert!(h.is_convex());
    }

    #[test]
    fn shift_and_clip() {
        let f = PiecewiseFn::vee(2, 4, 5);
        let s = f.shift_arg(3);
        assert_eq!(s.domain_start(), -3);
        for t in -3..15 {
            assert_eq!(s.eval(t), f.eval(t + 3));
        }
        let c = s.clip_below(0);
        assert_eq!(c.domain_start(), 0);
        assert_eq!(c.eval(0), f.eval(3));
    }

    #[test]
    fn flatten_prefix_and_suffix() {
        let f = PiecewiseFn::vee(2, 4, 5);
        let p = f.prefix_min_flatten();
        assert_eq!(p.eval(0), 10);
        assert_eq!(p.eval(5), 0);
        assert_eq!(p.eval(100), 0);
        let s = f.suffix_min_flatten();
        assert_eq!(s.eval(0), 0);
        assert_eq!(s.eval(5), 0);
        assert_eq!(s.eval(8), 12);
    }

    #[test]
    fn min_sum_finds_junction_optimum() {
        // f falls to 0 at 5; g rises from 0 after 3 with slope 2
        let f = PiecewiseFn::vee(2, 4, 5).prefix_min_flatten();
        let g = PiecewiseFn::vee(0, 2, 3).suffix_min_flatten();
        // optimum at u in [3,5]: f(u)=2(5-u) falls at 2/unit, g rises at 2/unit after 3
        // sum at u=3: f=4, g=0 -> 4; at u=5: f=0, g=4 -> 4; between: equal
        assert_eq!(min_sum_shifted(&f, &g, 0), 4);
        // with a gap of 2 the g argument leads: g(u+2) rises from u=1
        assert_eq!(min_sum_shifted(&f, &g, 2), 8);
    }
}
