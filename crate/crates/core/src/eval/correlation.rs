use crate::error::{Error, Result};

const MIN_LEN: usize = 3;

fn check(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < MIN_LEN {
        return Err(Error::TooFewSamples { needed: MIN_LEN, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NotANumber);
    }
    Ok(())
}

fn spread(v: &[f64]) -> bool {
    v.iter().any(|&x| x != v[0])
}

/// Ranks from 1, with tied values sharing their average rank.
pub fn rank_average(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && v[order[j]] == v[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("first argument"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("second argument"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson linear correlation.
pub fn plcc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    pearson(xs, ys)
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn srocc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    pearson(&rank_average(xs), &rank_average(ys))
}

/// Kendall rank correlation, tau-a: `(concordant - discordant) / (n(n-1)/2)`
/// where pairs tied in either argument count neither way.
///
/// Counted in O(n log n): sort by `(x, y)`, then count the inversions of `y`
/// with a merge sort.
pub fn krocc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    if !spread(xs) {
        return Err(Error::ZeroVariance("first argument"));
    }
    if !spread(ys) {
        return Err(Error::ZeroVariance("second argument"));
    }
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let pairs = |run: u64| run * run.saturating_sub(1) / 2;
    let total = pairs(n as u64);
    let (mut tied_x, mut tied_xy) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in idx.windows(2) {
        let same_x = xs[w[0]] == xs[w[1]];
        let same_xy = same_x && ys[w[0]] == ys[w[1]];
        if same_x { run_x += 1 } else { tied_x += pairs(run_x); run_x = 1 }
        if same_xy { run_xy += 1 } else { tied_xy += pairs(run_xy); run_xy = 1 }
    }
    tied_x += pairs(run_x);
    tied_xy += pairs(run_xy);

    let mut y: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let mut scratch = y.clone();
    let discordant = merge_count(&mut y, &mut scratch);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for w in y.windows(2) {
        if w[0] == w[1] { run_y += 1 } else { tied_y += pairs(run_y); run_y = 1 }
    }
    tied_y += pairs(run_y);

    // pairs untied in both: total - tied_x - tied_y + tied_xy = C + D
    let untied = total - tied_x - tied_y + tied_xy;
    let concordant = untied - discordant;
    Ok((concordant as f64 - discordant as f64) / total as f64)
}

/// Sorts `v` ascending, returning the number of strictly inverted pairs.
fn merge_count(v: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (l, r) = v.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        merge_count(l, sl) + merge_count(r, sr)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            count += (mid - i) as u64;
            scratch[k] = v[j];
            j += 1;
        } else {
            scratch[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    scratch[k..].copy_from_slice(&v[j..]);
    v.copy_from_slice(scratch);
    count
}

/// Root mean squared difference.
pub fn rmse(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    let sq: f64 = xs.iter().zip(ys).map(|(x, y)| (x - y).powi(2)).sum();
    Ok((sq / xs.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 8.0, 16.0, 32.0];
        assert_eq!(srocc(&x, &y).unwrap(), 1.0);
        assert_eq!(krocc(&x, &y).unwrap(), 1.0);
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        assert_eq!(srocc(&x, &rev).unwrap(), -1.0);
        assert_eq!(krocc(&x, &rev).unwrap(), -1.0);
    }

    #[test]
    fn kendall_example() {
        let k = krocc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((k - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ties_share_rank() {
        assert_eq!(rank_average(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
        // a tied pair counts neither way: 5 of 6 pairs concordant-or-tied, 1 tie
        let k = krocc(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((k - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(srocc(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::TooFewSamples { .. })));
        assert!(matches!(plcc(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(Error::LengthMismatch(3, 2))));
        assert!(matches!(plcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ZeroVariance(_))));
        assert!(matches!(krocc(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), Err(Error::ZeroVariance(_))));
        assert!(matches!(srocc(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]), Err(Error::ZeroVariance(_))));
        assert!(plcc(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn rmse_basics() {
        let x = [1.0, 2.0, 3.5];
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0, 0.0], &[3.0, 4.0, 0.0]).unwrap() - (25.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pearson_linear() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
        assert!((plcc(&x, &y).unwrap() - 1.0).abs() < 1e-15);
    }
}
