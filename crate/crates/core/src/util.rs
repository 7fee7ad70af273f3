/// Pairwise (tree) summation. Error growth is O(log n)·eps instead of the
/// O(n)·eps of a running sum, and the result does not depend on how callers
/// chunked their work.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::pairwise_sum;

    #[test]
    fn matches_naive_sum_on_small_inputs() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.5]), 1.5);
        assert_eq!(pairwise_sum(&[0.6, 0.6, -0.2]), 1.0);
        let xs: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-10);
    }
}
