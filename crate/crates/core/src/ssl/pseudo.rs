use crate::np::Prediction;
use crate::scalar::Scalar;

/// Unlabeled samples admitted by both gates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PseudoLabelBatch<T> {
    pub indices: Vec<usize>,
    pub labels: Vec<usize>,
    pub confidence: Vec<T>,
    pub uncertainty: Vec<T>,
}

impl<T> PseudoLabelBatch<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Keeps rows with `max prob > τ_c` and `uncertainty < τ_u` (both strict).
pub fn select_pseudo_labels<T: Scalar>(pred: &Prediction<T>, tau_c: f64, tau_u: f64) -> PseudoLabelBatch<T> {
    let labels = pred.predicted_labels();
    let conf = pred.confidence();
    let mut out = PseudoLabelBatch {
        indices: Vec::new(),
        labels: Vec::new(),
        confidence: Vec::new(),
        uncertainty: Vec::new(),
    };
    for (i, (&c, &u)) in conf.iter().zip(pred.uncertainty()).enumerate() {
        if c.to_f64_lossy() > tau_c && u.to_f64_lossy() < tau_u {
            out.indices.push(i);
            out.labels.push(labels[i]);
            out.confidence.push(c);
            out.uncertainty.push(u);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::LogBase;
    use crate::numerics::Tensor2;

    fn pred(rows: &[Vec<f64>]) -> Prediction<f64> {
        Prediction::from_sample_list(vec![Tensor2::from_rows(rows).unwrap()], LogBase::Two).unwrap()
    }

    #[test]
    fn confident_certain_selected() {
        // 2 classes: max 0.99 gives entropy ~0.081 bits.
        let p = pred(&[vec![0.99, 0.01], vec![0.01, 0.99]]);
        let sel = select_pseudo_labels(&p, 0.95, 0.4);
        assert_eq!(sel.indices, vec![0, 1]);
        assert_eq!(sel.labels, vec![0, 1]);
    }

    #[test]
    fn uncertainty_gate_rejects() {
        // Max 0.99 over many classes with spread tail: entropy above 0.1.
        let mut row = vec![0.99];
        row.extend(std::iter::repeat_n(0.01 / 9.0, 9));
        let p = pred(&[row]);
        let u = p.uncertainty()[0];
        assert!(u > 0.1);
        assert!(select_pseudo_labels(&p, 0.95, u).is_empty());
        assert_eq!(select_pseudo_labels(&p, 0.95, u + 1e-9).len(), 1);
    }

    #[test]
    fn uniform_rejected_and_tie_rejected() {
        let p = pred(&[vec![0.5, 0.5]]);
        assert!(select_pseudo_labels(&p, 0.5, 2.0).is_empty());
        assert!(select_pseudo_labels(&p, 0.4, 0.5).is_empty());
    }
}
