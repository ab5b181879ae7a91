//! Sampled curves and maximization of a continuous 1-D objective on an
//! interval: a uniform grid scan followed by golden-section refinement around
//! the best sample and a final derivative-based polish.

use crate::error::{Error, Result};

/// Ordered (abscissa, ordinate) samples with axis labels and the peak sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    points: Vec<(f64, f64)>,
    x_label: String,
    y_label: String,
    peak: (f64, f64),
}

impl CurveSeries {
    pub fn new(
        points: Vec<(f64, f64)>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Result<Self> {
        let Some(&first) = points.first() else {
            return Err(Error::Configuration("curve has no points".into()));
        };
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Configuration("curve has non-finite samples".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Configuration(
                "curve abscissa must be strictly increasing".into(),
            ));
        }
        let peak = points
            .iter()
            .copied()
            .fold(first, |best, p| if p.1 > best.1 { p } else { best });
        Ok(Self {
            points,
            x_label: x_label.into(),
            y_label: y_label.into(),
            peak,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn y_label(&self) -> &str {
        &self.y_label
    }

    /// The sample with the largest ordinate (first one on ties).
    pub fn peak(&self) -> (f64, f64) {
        self.peak
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Result of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// Best grid sample the refinement started from.
    pub grid_best: (f64, f64),
    /// Width of the golden-section bracket at the last iteration.
    pub final_bracket: f64,
    /// Separate local maxima found on the grid, best first. More than one
    /// entry means the objective did not look unimodal.
    pub candidates: Vec<(f64, f64)>,
}

impl Maximum {
    pub fn is_unimodal(&self) -> bool {
        self.candidates.len() <= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeOptions {
    pub grid: usize,
    /// Golden-section stops once the bracket is this fraction of its start.
    pub relative_tolerance: f64,
    /// Local maxima must rise this fraction of the peak above the valley
    /// separating them from the global maximum to count as separate.
    pub prominence: f64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            grid: 256,
            relative_tolerance: 1e-10,
            prominence: 1e-6,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[lo, hi]`.
///
/// The returned value is never below the best grid sample.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, options: MaximizeOptions) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain {
            field: "interval",
            value: hi - lo,
            reason: "need finite lo < hi",
        });
    }
    if options.grid < 3 {
        return Err(Error::Domain {
            field: "grid",
            value: options.grid as f64,
            reason: "must be >= 3",
        });
    }
    let n = options.grid;
    let xs: Vec<f64> = (0..n).map(|k| grid_point(lo, hi, k, n)).collect();
    let mut ys = Vec::with_capacity(n);
    for &x in &xs {
        ys.push(f(x)?);
    }
    let best = argmax(&ys);
    let candidates = separate_maxima(&xs, &ys, best, options.prominence);

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(n - 1)];
    let start_width = b - a;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > options.relative_tolerance * start_width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let final_bracket = b - a;
    let (mut x, mut fx) = if fc >= fd { (c, fc) } else { (d, fd) };

    // Comparisons of f stop resolving x near sqrt(eps); a few Newton steps on
    // a central-difference derivative recover the remaining digits.
    let scale = hi - lo;
    let (win_lo, win_hi) = (xs[best.saturating_sub(1)], xs[(best + 1).min(n - 1)]);
    for _ in 0..4 {
        let h1 = 1e-6 * scale;
        let h2 = 1e-4 * scale;
        if x - h2 < lo || x + h2 > hi {
            break;
        }
        let slope = (f(x + h1)? - f(x - h1)?) / (2.0 * h1);
        let curvature = (f(x + h2)? - 2.0 * fx + f(x - h2)?) / (h2 * h2);
        if curvature.is_nan() || curvature >= 0.0 || !slope.is_finite() {
            break;
        }
        let step = -slope / curvature;
        let trial = (x + step).clamp(win_lo, win_hi);
        let ft = f(trial)?;
        if ft < fx - 4.0 * f64::EPSILON * fx.abs() {
            break;
        }
        let moved = (trial - x).abs();
        x = trial;
        fx = ft;
        if moved <= 1e-13 * scale {
            break;
        }
    }

    let grid_best = (xs[best], ys[best]);
    if fx < grid_best.1 {
        x = grid_best.0;
        fx = grid_best.1;
    }
    Ok(Maximum {
        argmax: x,
        value: fx,
        grid_best,
        final_bracket,
        candidates,
    })
}

/// k-th point of an n-point uniform grid including both endpoints.
pub fn grid_point(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (k as f64 / (n - 1) as f64)
    }
}

fn argmax(ys: &[f64]) -> usize {
    ys.iter()
        .enumerate()
        .fold(0, |best, (i, &y)| if y > ys[best] { i } else { best })
}

/// Grid local maxima that are separated from the global one by a valley
/// deeper than `prominence` times the peak magnitude. Global maximum first,
/// then the runner-up, if any.
fn separate_maxima(xs: &[f64], ys: &[f64], best: usize, prominence: f64) -> Vec<(f64, f64)> {
    let n = ys.len();
    let tol = prominence * ys[best].abs().max(f64::MIN_POSITIVE);
    let mut out = vec![(xs[best], ys[best])];
    let mut runner_up: Option<usize> = None;
    for k in 0..n {
        if k == best {
            continue;
        }
        let left = if k == 0 { f64::NEG_INFINITY } else { ys[k - 1] };
        let right = if k + 1 == n {
            f64::NEG_INFINITY
        } else {
            ys[k + 1]
        };
        if !(ys[k] >= left && ys[k] >= right && (ys[k] > left || ys[k] > right)) {
            continue;
        }
        let (i, j) = if k < best { (k, best) } else { (best, k) };
        let valley = ys[i..=j].iter().copied().fold(f64::INFINITY, f64::min);
        if ys[k] - valley > tol && runner_up.is_none_or(|r| ys[k] > ys[r]) {
            runner_up = Some(k);
        }
    }
    if let Some(r) = runner_up {
        out.push((xs[r], ys[r]));
    }
    out
}
