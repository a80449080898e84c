use crate::error::{Error, Result};
use crate::numerics::{attention_forward, Tensor2};
use crate::scalar::Scalar;

/// Per-class center vectors (mean over each class bank).
#[derive(Clone, Debug, PartialEq)]
pub struct ClassCenters<T> {
    classes: Vec<usize>,
    centers: Tensor2<T>,
}

impl<T: Scalar> ClassCenters<T> {
    /// `classes[k]` labels row `k` of `centers`.
    pub fn new(classes: Vec<usize>, centers: Tensor2<T>) -> Result<Self> {
        if classes.len() != centers.rows() {
            return Err(Error::shape(
                "ClassCenters",
                format!("{} labels for {} centers", classes.len(), centers.rows()),
            ));
        }
        if !centers.is_finite() {
            return Err(Error::NonFinite("ClassCenters"));
        }
        Ok(Self { classes, centers })
    }

    /// Class-wise means of `rows`; classes with no rows are skipped.
    pub fn from_labeled_rows(rows: &Tensor2<T>, labels: &[usize], num_classes: usize) -> Result<Self> {
        if labels.len() != rows.rows() {
            return Err(Error::shape("ClassCenters", "labels and rows differ in length"));
        }
        let mut classes = Vec::new();
        let mut data = Vec::new();
        for c in 0..num_classes {
            let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            if idx.is_empty() {
                continue;
            }
            classes.push(c);
            data.extend(rows.gather_rows(&idx).mean_rows()?.into_data());
        }
        let centers = Tensor2::new(classes.len(), rows.cols(), data)?;
        Self::new(classes, centers)
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn centers(&self) -> &Tensor2<T> {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// `out[i] = Σ_l softmax_l(−‖q_i − c_l‖₂) c_l`.
pub fn attention_aggregate<T: Scalar>(queries: &Tensor2<T>, centers: &ClassCenters<T>) -> Result<Tensor2<T>> {
    if centers.is_empty() {
        return Err(Error::Empty("attention_aggregate: no centers"));
    }
    Ok(attention_forward(queries, centers.centers())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_center_wins() {
        let c = ClassCenters::new(vec![0], Tensor2::row_vector(&[1.0, 2.0])).unwrap();
        let q = Tensor2::from_rows(&[vec![5.0, -3.0], vec![0.0, 0.0]]).unwrap();
        let out = attention_aggregate(&q, &c).unwrap();
        for r in out.iter_rows() {
            assert_eq!(r, &[1.0, 2.0]);
        }
    }

    #[test]
    fn equidistant_query_averages() {
        let c = ClassCenters::new(
            vec![0, 1, 2],
            Tensor2::from_rows(&[vec![1.0, 0.0], vec![-0.5, 0.75f64.sqrt()], vec![-0.5, -(0.75f64.sqrt())]])
                .unwrap(),
        )
        .unwrap();
        let out = attention_aggregate(&Tensor2::zeros(1, 2), &c).unwrap();
        assert!(out.row(0).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn no_centers_is_error() {
        let c = ClassCenters::<f64>::new(vec![], Tensor2::zeros(0, 2)).unwrap();
        assert!(attention_aggregate(&Tensor2::zeros(1, 2), &c).is_err());
    }

    #[test]
    fn centers_from_rows() {
        let rows = Tensor2::from_rows(&[vec![1.0, 1.0], vec![3.0, 5.0], vec![-2.0, 0.0]]).unwrap();
        let c = ClassCenters::from_labeled_rows(&rows, &[0, 0, 2], 3).unwrap();
        assert_eq!(c.classes(), &[0, 2]);
        assert_eq!(c.centers().row(0), &[2.0, 3.0]);
        assert_eq!(c.centers().row(1), &[-2.0, 0.0]);
    }
}
