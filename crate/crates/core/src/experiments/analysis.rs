//! Curve statistics used by the embedded anchors: resonance peaks, their
//! prominence, oscillation amplitude and the off-resonance level.

/// Indices of strict interior local maxima. Plateaus count once, at their
/// left edge.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    extrema(y, |a, b| a > b)
}

/// Indices of strict interior local minima.
pub fn local_minima(y: &[f64]) -> Vec<usize> {
    extrema(y, |a, b| a < b)
}

fn extrema(y: &[f64], beats: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let n = y.len();
    let mut i = 1;
    while i + 1 < n {
        if beats(y[i], y[i - 1]) {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && beats(y[i], y[j + 1]) {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Topographic prominence of the peak at `i`: height above the higher of the
/// two lowest points reachable before meeting higher ground.
pub fn prominence(y: &[f64], i: usize) -> f64 {
    let h = y[i];
    let mut left_min = h;
    for &v in y[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Local maxima whose prominence is at least `min_prominence`, with their
/// prominences.
pub fn peaks(y: &[f64], min_prominence: f64) -> Vec<(usize, f64)> {
    local_maxima(y)
        .into_iter()
        .map(|i| (i, prominence(y, i)))
        .filter(|(_, p)| *p >= min_prominence)
        .collect()
}

/// `max - min`.
pub fn amplitude(y: &[f64]) -> f64 {
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Mean of the curve at its interior local minima, i.e. between resonances.
/// `None` if the curve has no interior minimum.
pub fn off_resonance_mean(y: &[f64]) -> Option<f64> {
    let m = local_minima(y);
    (!m.is_empty()).then(|| m.iter().map(|&i| y[i]).sum::<f64>() / m.len() as f64)
}

pub fn strictly_decreasing(y: &[f64]) -> bool {
    y.windows(2).all(|w| w[1] < w[0])
}

pub fn strictly_increasing(y: &[f64]) -> bool {
    y.windows(2).all(|w| w[1] > w[0])
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
            v[n - 1] = end;
            v
        }
    }
}
