use super::config::{DivergenceKind, JsOrder, SslConfig};
use crate::error::{Error, Result};
use crate::gaussian::{alpha_u, js_skew, js_skew_dual, js_skew_dual_var, js_skew_var, kl_diag, kl_diag_var, DiagGaussian, DiagGaussianVar};
use crate::numerics::{cross_entropy, Tape, Tensor2, Var, LOG_CLAMP_EPS};
use crate::scalar::Scalar;

/// Mean over rows of the configured divergence between context and target latents.
pub fn divergence<T: Scalar>(
    kind: DivergenceKind,
    order: JsOrder,
    q_context: &[DiagGaussian<T>],
    q_target: &[DiagGaussian<T>],
    alpha: T,
) -> Result<T> {
    if q_context.is_empty() || q_context.len() != q_target.len() {
        return Err(Error::invalid("divergence needs equally many nonempty context and target latents"));
    }
    let mut acc = T::zero();
    for (c, t) in q_context.iter().zip(q_target) {
        let (a, b) = match order {
            JsOrder::ContextTarget => (c, t),
            JsOrder::TargetContext => (t, c),
        };
        acc = acc
            + match kind {
                DivergenceKind::Kl => kl_diag(t, c)?,
                DivergenceKind::Js => js_skew(a, b, alpha)?,
                DivergenceKind::JsDual => js_skew_dual(a, b, alpha)?,
            };
    }
    Ok(acc / T::from_usize_lossy(q_context.len()))
}

/// Tape version of [`divergence`]; returns a `1 x 1` value.
pub fn divergence_var<T: Scalar>(
    tape: &mut Tape<T>,
    kind: DivergenceKind,
    order: JsOrder,
    q_context: DiagGaussianVar,
    q_target: DiagGaussianVar,
    alpha: T,
) -> Result<Var> {
    let (a, b) = match order {
        JsOrder::ContextTarget => (q_context, q_target),
        JsOrder::TargetContext => (q_target, q_context),
    };
    let rows = match kind {
        DivergenceKind::Kl => kl_diag_var(tape, q_target, q_context)?,
        DivergenceKind::Js => js_skew_var(tape, a, b, alpha)?,
        DivergenceKind::JsDual => js_skew_dual_var(tape, a, b, alpha)?,
    };
    tape.mean_all(rows)
}

/// Values of the three loss terms and their weighted sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown<T> {
    pub total: T,
    pub cls: T,
    pub unlabeled: T,
    pub divergence: T,
    pub alpha_u: T,
}

/// Plain-value inputs of [`loss_total`]. Probability tensors hold one entry per latent sample.
#[derive(Clone, Copy, Debug)]
pub struct LossInputs<'a, T> {
    pub labeled_probs: &'a [Tensor2<T>],
    pub labels: &'a [usize],
    pub unlabeled_probs: &'a [Tensor2<T>],
    pub pseudo_labels: &'a [usize],
    pub q_target: &'a [DiagGaussian<T>],
    pub q_context: &'a [DiagGaussian<T>],
    pub context_uncertainty: &'a [T],
    pub target_uncertainty: &'a [T],
}

fn mean<T: Scalar>(v: &[T]) -> T {
    if v.is_empty() {
        T::zero()
    } else {
        v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
    }
}

fn plain_ce<T: Scalar>(samples: &[Tensor2<T>], labels: &[usize]) -> Result<T> {
    let eps = T::lit(LOG_CLAMP_EPS);
    let mut total = T::zero();
    let mut count = 0usize;
    for s in samples {
        if s.rows() != labels.len() {
            return Err(Error::shape("loss_total", "labels not aligned with predictions"));
        }
        for (i, &l) in labels.iter().enumerate() {
            if l >= s.cols() {
                return Err(Error::invalid(format!("label {l} out of range")));
            }
            total = total - s[(i, l)].max(eps).ln();
            count += 1;
        }
    }
    if count == 0 {
        return Ok(T::zero());
    }
    Ok(total / T::from_usize_lossy(count))
}

/// `L_cls + λ_u L^u_cls + β D(q_context, q_target)` on plain values.
///
/// `α_u` comes from the mean context and target uncertainties; an empty
/// unlabeled selection contributes zero.
pub fn loss_total<T: Scalar>(inputs: &LossInputs<'_, T>, cfg: &SslConfig) -> Result<LossBreakdown<T>> {
    if inputs.q_target.is_empty() || inputs.q_context.is_empty() {
        return Err(Error::invalid("loss_total: missing variational distributions"));
    }
    if inputs.labels.is_empty() {
        return Err(Error::Empty("loss_total labeled batch"));
    }
    let cls = plain_ce(inputs.labeled_probs, inputs.labels)?;
    let unlabeled = plain_ce(inputs.unlabeled_probs, inputs.pseudo_labels)?;
    let a = alpha_u(mean(inputs.context_uncertainty), mean(inputs.target_uncertainty))?;
    let div = divergence(cfg.divergence, cfg.js_order, inputs.q_context, inputs.q_target, a)?;
    let total = cls + T::lit(cfg.lambda_u) * unlabeled + T::lit(cfg.beta) * div;
    Ok(LossBreakdown {
        total,
        cls,
        unlabeled,
        divergence: div,
        alpha_u: a,
    })
}

/// Tape-level loss terms.
#[derive(Clone, Copy, Debug)]
pub struct LossVars {
    pub total: Var,
    pub cls: Var,
    pub unlabeled: Option<Var>,
    pub divergence: Var,
}

/// Row indices of every latent sample for the given targets; row `t n + i`.
pub fn sample_rows(targets: &[usize], n: usize, t: usize) -> Vec<usize> {
    (0..t).flat_map(|s| targets.iter().map(move |&i| s * n + i)).collect()
}

/// Tape version of [`loss_total`] over stacked `(T n) x C` probabilities.
#[allow(clippy::too_many_arguments)]
pub fn loss_total_var<T: Scalar>(
    tape: &mut Tape<T>,
    probs: Var,
    samples: usize,
    labeled: (&[usize], &[usize]),
    selected: (&[usize], &[usize]),
    q_context: DiagGaussianVar,
    q_target: DiagGaussianVar,
    alpha: T,
    cfg: &SslConfig,
) -> Result<LossVars> {
    let n = tape.value(probs).rows() / samples;
    let (l_idx, l_lab) = labeled;
    let (s_idx, s_lab) = selected;
    if l_idx.len() != l_lab.len() || s_idx.len() != s_lab.len() {
        return Err(Error::shape("loss_total_var", "indices and labels differ in length"));
    }
    let rep = |lab: &[usize]| -> Vec<usize> { (0..samples).flat_map(|_| lab.iter().copied()).collect() };
    let lp = tape.gather_rows(probs, &sample_rows(l_idx, n, samples))?;
    let cls = cross_entropy(tape, lp, &rep(l_lab))?;
    let mut total = cls;
    let unlabeled = if s_idx.is_empty() {
        None
    } else {
        let up = tape.gather_rows(probs, &sample_rows(s_idx, n, samples))?;
        let u = cross_entropy(tape, up, &rep(s_lab))?;
        let w = tape.scale(u, T::lit(cfg.lambda_u));
        total = tape.add(total, w)?;
        Some(u)
    };
    let div = divergence_var(tape, cfg.divergence, cfg.js_order, q_context, q_target, alpha)?;
    let w = tape.scale(div, T::lit(cfg.beta));
    let total = tape.add(total, w)?;
    Ok(LossVars {
        total,
        cls,
        unlabeled,
        divergence: div,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: &[f64], v: &[f64]) -> DiagGaussian<f64> {
        DiagGaussian::new(m.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn perfect_predictions_and_equal_latents_give_zero() {
        let one_hot = Tensor2::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let q = vec![g(&[0.3, -0.2], &[0.5, 1.5])];
        for kind in DivergenceKind::ALL {
            let cfg = SslConfig { divergence: kind, ..Default::default() };
            let inputs = LossInputs {
                labeled_probs: std::slice::from_ref(&one_hot),
                labels: &[0, 1],
                unlabeled_probs: std::slice::from_ref(&one_hot),
                pseudo_labels: &[0, 1],
                q_target: &q,
                q_context: &q,
                context_uncertainty: &[0.0],
                target_uncertainty: &[0.0],
            };
            let l = loss_total(&inputs, &cfg).unwrap();
            assert!(l.total.abs() < 1e-12, "{kind:?}: {}", l.total);
        }
    }

    #[test]
    fn missing_latents_rejected() {
        let p = Tensor2::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let inputs = LossInputs {
            labeled_probs: std::slice::from_ref(&p),
            labels: &[0],
            unlabeled_probs: &[],
            pseudo_labels: &[],
            q_target: &[],
            q_context: &[],
            context_uncertainty: &[],
            target_uncertainty: &[],
        };
        assert!(loss_total(&inputs, &SslConfig::default()).is_err());
    }

    #[test]
    fn kl_kind_ignores_order_and_alpha() {
        let c = vec![g(&[0.0, 1.0], &[1.0, 2.0])];
        let t = vec![g(&[0.5, -1.0], &[0.3, 0.7])];
        let a = divergence(DivergenceKind::Kl, JsOrder::ContextTarget, &c, &t, 0.1).unwrap();
        let b = divergence(DivergenceKind::Kl, JsOrder::TargetContext, &c, &t, 0.9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, kl_diag(&t[0], &c[0]).unwrap());
    }

    #[test]
    fn js_order_flag_swaps_arguments() {
        let c = vec![g(&[0.0], &[1.0])];
        let t = vec![g(&[2.0], &[0.5])];
        let a = divergence(DivergenceKind::Js, JsOrder::TargetContext, &c, &t, 0.3).unwrap();
        assert_eq!(a, js_skew(&t[0], &c[0], 0.3).unwrap());
    }

    #[test]
    fn tape_matches_plain() {
        let probs = Tensor2::from_rows(&[
            vec![0.7, 0.3],
            vec![0.2, 0.8],
            vec![0.6, 0.4],
            vec![0.55, 0.45],
            vec![0.1, 0.9],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let qc = g(&[0.1, 0.4], &[0.8, 1.2]);
        let qt = g(&[-0.3, 0.2], &[0.5, 0.9]);
        let cfg = SslConfig { divergence: DivergenceKind::JsDual, beta: 0.3, lambda_u: 0.7, ..Default::default() };
        let alpha = 0.35;
        let mut tape = Tape::new();
        let p = tape.constant(probs.clone());
        let put = |tape: &mut Tape<f64>, q: &DiagGaussian<f64>| DiagGaussianVar {
            mean: tape.constant(Tensor2::row_vector(q.mean())),
            std: tape.constant(Tensor2::row_vector(&q.std())),
        };
        let (vc, vt) = (put(&mut tape, &qc), put(&mut tape, &qt));
        let lv = loss_total_var(&mut tape, p, 2, (&[0], &[0]), (&[2], &[1]), vc, vt, alpha, &cfg).unwrap();
        let cls = -(0.7f64.ln() + 0.55f64.ln()) / 2.0;
        let unl = -(0.4f64.ln() + 0.5f64.ln()) / 2.0;
        let div = js_skew_dual(&qc, &qt, alpha).unwrap();
        let expect = cls + 0.7 * unl + 0.3 * div;
        assert!((tape.value(lv.total).item().unwrap() - expect).abs() < 1e-12);
    }
}
