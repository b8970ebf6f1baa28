use crate::error::{check_len, HerdError, Result};

/// L1 distance; on spin vectors this is twice the Hamming distance.
pub fn manhattan<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x.into() - y.into()).abs()).sum()
}

/// Label of the L1-nearest training case, lowest index on ties.
pub fn knn1_manhattan<T: Copy + Into<f64>>(train: &[Vec<T>], labels: &[usize], query: &[T]) -> Result<usize> {
    if train.is_empty() {
        return Err(HerdError::EmptyDataset);
    }
    check_len("training labels", train.len(), labels.len())?;
    let mut best = (0, f64::INFINITY);
    for (n, case) in train.iter().enumerate() {
        check_len("query width", case.len(), query.len())?;
        let d = manhattan(case, query);
        if d < best.1 {
            best = (n, d);
        }
    }
    Ok(labels[best.0])
}
