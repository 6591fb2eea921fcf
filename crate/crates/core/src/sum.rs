//! Deterministic reductions.
//!
//! Every reduction in the crate goes through [`pairwise_sum`], so parallel
//! evaluation (which only changes *when* terms are produced, never their
//! order) yields bit-identical totals from run to run.

const LEAF: usize = 32;

/// Sums `values` with a fixed binary tree over index ranges.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_large_inputs() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
        let v = vec![0.1; 1000];
        assert!((pairwise_sum(&v) - 100.0).abs() < 1e-12);
    }

}
