use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub index: usize,
    pub label: String,
    pub probability: f32,
}

/// The `k` most probable classes, highest first; equal probabilities keep
/// the lower class index first.
pub fn top_k(probabilities: &Tensor, labels: &[String], k: usize) -> Result<Vec<Prediction>> {
    let c = probabilities.dims1()?;
    if labels.len() != c {
        return Err(Error::Shape(format!(
            "{} labels for {c} probabilities",
            labels.len()
        )));
    }
    if k == 0 || k > c {
        return Err(Error::InvalidArgument(format!(
            "top-k needs 1 <= k <= {c}, got {k}"
        )));
    }
    let p = probabilities.data();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|index| Prediction {
            index,
            label: labels[index].clone(),
            probability: p[index],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("label_{i}")).collect()
    }

    #[test]
    fn picks_maximum() {
        let p = Tensor::vector(vec![0.1, 0.7, 0.2]).unwrap();
        let top = top_k(&p, &labels(3), 1).unwrap();
        assert_eq!(
            top,
            vec![Prediction {
                index: 1,
                label: "label_1".into(),
                probability: 0.7
            }]
        );
    }

    #[test]
    fn ties_prefer_lower_index() {
        let p = Tensor::vector(vec![0.4, 0.4, 0.2]).unwrap();
        let idx: Vec<_> = top_k(&p, &labels(3), 2)
            .unwrap()
            .iter()
            .map(|p| p.index)
            .collect();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn k_bounds() {
        let p = Tensor::vector(vec![0.5, 0.5]).unwrap();
        assert!(top_k(&p, &labels(2), 3).is_err());
        assert!(top_k(&p, &labels(2), 0).is_err());
        assert_eq!(crate::DEFAULT_TOP_K, 3);
    }
}
