//! Differentiable diagonal-Gaussian divergences recorded on a [`Tape`].
//!
//! Each function works row-wise on `n x D` mean/std tensors and returns an
//! `n x 1` column of per-row divergences. The skew `α` is a constant.

use super::diag::DiagGaussian;
use super::skew::check_alpha;
use crate::error::{Error, Result};
use crate::numerics::{Tape, Var};
use crate::scalar::Scalar;

/// A batch of diagonal Gaussians living on a tape (one per row).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagGaussianVar {
    pub mean: Var,
    pub std: Var,
}

impl DiagGaussianVar {
    pub fn rows<T: Scalar>(&self, tape: &Tape<T>) -> usize {
        tape.value(self.mean).rows()
    }

    pub fn dim<T: Scalar>(&self, tape: &Tape<T>) -> usize {
        tape.value(self.mean).cols()
    }

    /// Current value of row `i` as a plain Gaussian.
    pub fn value_row<T: Scalar>(&self, tape: &Tape<T>, i: usize) -> Result<DiagGaussian<T>> {
        let m = tape.value(self.mean).row(i).to_vec();
        let s = tape.value(self.std).row(i);
        DiagGaussian::from_std(m, s)
    }

    fn check<T: Scalar>(&self, other: &Self, tape: &Tape<T>, op: &'static str) -> Result<()> {
        let a = tape.value(self.mean).shape();
        let b = tape.value(other.mean).shape();
        if a != b || tape.value(self.std).shape() != a || tape.value(other.std).shape() != b {
            return Err(Error::shape(op, format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }
}

/// Row-wise `KL(q ‖ p)`.
pub fn kl_diag_var<T: Scalar>(
    tape: &mut Tape<T>,
    q: DiagGaussianVar,
    p: DiagGaussianVar,
) -> Result<Var> {
    q.check(&p, tape, "kl_diag_var")?;
    let d = T::from_usize_lossy(q.dim(tape));
    let vq = tape.square(q.std);
    let vp = tape.square(p.std);
    let ln_vq = tape.ln(vq)?;
    let ln_vp = tape.ln(vp)?;
    let log_ratio = tape.sub(ln_vp, ln_vq)?;
    let ratio = tape.div(vq, vp)?;
    let diff = tape.sub(p.mean, q.mean)?;
    let diff2 = tape.square(diff);
    let maha = tape.div(diff2, vp)?;
    let s = tape.add(log_ratio, ratio)?;
    let s = tape.add(s, maha)?;
    let s = tape.row_sum(s);
    let s = tape.add_scalar(s, -d);
    Ok(tape.scale(s, T::lit(0.5)))
}

struct MixVars {
    prec: Var,
    var: Var,
    mean: Var,
    v1: Var,
    v2: Var,
}

fn mix_vars<T: Scalar>(
    tape: &mut Tape<T>,
    n1: DiagGaussianVar,
    n2: DiagGaussianVar,
    alpha: T,
) -> Result<MixVars> {
    let beta = T::one() - alpha;
    let v1 = tape.square(n1.std);
    let v2 = tape.square(n2.std);
    let p1 = tape.recip(v1)?;
    let p2 = tape.recip(v2)?;
    let a = tape.scale(p1, beta);
    let b = tape.scale(p2, alpha);
    let prec = tape.add(a, b)?;
    let var = tape.recip(prec)?;
    let h1 = tape.mul(p1, n1.mean)?;
    let h1 = tape.scale(h1, beta);
    let h2 = tape.mul(p2, n2.mean)?;
    let h2 = tape.scale(h2, alpha);
    let h = tape.add(h1, h2)?;
    let mean = tape.mul(var, h)?;
    Ok(MixVars {
        prec,
        var,
        mean,
        v1,
        v2,
    })
}

/// Row-wise skew-geometric JS divergence, closed form.
pub fn js_skew_var<T: Scalar>(
    tape: &mut Tape<T>,
    n1: DiagGaussianVar,
    n2: DiagGaussianVar,
    alpha: T,
) -> Result<Var> {
    n1.check(&n2, tape, "js_skew_var")?;
    check_alpha(alpha)?;
    let beta = T::one() - alpha;
    let d = T::from_usize_lossy(n1.dim(tape));
    let m = mix_vars(tape, n1, n2, alpha)?;

    let a = tape.scale(m.v1, beta);
    let b = tape.scale(m.v2, alpha);
    let blend = tape.add(a, b)?;
    let trace = tape.mul(m.prec, blend)?;

    let d1 = tape.sub(m.mean, n1.mean)?;
    let d1 = tape.square(d1);
    let d1 = tape.mul(m.prec, d1)?;
    let d1 = tape.scale(d1, beta);
    let d2 = tape.sub(m.mean, n2.mean)?;
    let d2 = tape.square(d2);
    let d2 = tape.mul(m.prec, d2)?;
    let d2 = tape.scale(d2, alpha);

    let ln_vm = tape.ln(m.var)?;
    let ln_v1 = tape.ln(m.v1)?;
    let ln_v1 = tape.scale(ln_v1, beta);
    let ln_v2 = tape.ln(m.v2)?;
    let ln_v2 = tape.scale(ln_v2, alpha);

    let s = tape.add(trace, d1)?;
    let s = tape.add(s, d2)?;
    let s = tape.add(s, ln_vm)?;
    let s = tape.sub(s, ln_v1)?;
    let s = tape.sub(s, ln_v2)?;
    let s = tape.row_sum(s);
    let s = tape.add_scalar(s, -d);
    Ok(tape.scale(s, T::lit(0.5)))
}

/// Row-wise dual skew-geometric JS divergence, closed form.
pub fn js_skew_dual_var<T: Scalar>(
    tape: &mut Tape<T>,
    n1: DiagGaussianVar,
    n2: DiagGaussianVar,
    alpha: T,
) -> Result<Var> {
    n1.check(&n2, tape, "js_skew_dual_var")?;
    check_alpha(alpha)?;
    let beta = T::one() - alpha;
    let m = mix_vars(tape, n1, n2, alpha)?;

    let ln_v1 = tape.ln(m.v1)?;
    let ln_v1 = tape.scale(ln_v1, beta);
    let ln_v2 = tape.ln(m.v2)?;
    let ln_v2 = tape.scale(ln_v2, alpha);
    let ln_vm = tape.ln(m.var)?;

    let q1 = tape.square(n1.mean);
    let q1 = tape.div(q1, m.v1)?;
    let q1 = tape.scale(q1, beta);
    let q2 = tape.square(n2.mean);
    let q2 = tape.div(q2, m.v2)?;
    let q2 = tape.scale(q2, alpha);
    let qm = tape.square(m.mean);
    let qm = tape.mul(qm, m.prec)?;

    let s = tape.add(ln_v1, ln_v2)?;
    let s = tape.sub(s, ln_vm)?;
    let s = tape.add(s, q1)?;
    let s = tape.add(s, q2)?;
    let s = tape.sub(s, qm)?;
    let s = tape.row_sum(s);
    Ok(tape.scale(s, T::lit(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{js_skew, js_skew_dual, kl_diag};
    use crate::numerics::Tensor2;

    fn on_tape(tape: &mut Tape<f64>, g: &DiagGaussian<f64>) -> DiagGaussianVar {
        let mean = tape.constant(Tensor2::row_vector(g.mean()));
        let std = tape.constant(Tensor2::row_vector(&g.std()));
        DiagGaussianVar { mean, std }
    }

    #[test]
    fn tape_values_match_plain() {
        let a = DiagGaussian::new(vec![0.1, -0.4, 0.8], vec![0.6, 1.4, 0.9]).unwrap();
        let b = DiagGaussian::new(vec![0.5, 0.2, -0.3], vec![1.2, 0.7, 0.5]).unwrap();
        let mut tape = Tape::new();
        let (ta, tb) = (on_tape(&mut tape, &a), on_tape(&mut tape, &b));
        let kl = kl_diag_var(&mut tape, ta, tb).unwrap();
        let js = js_skew_var(&mut tape, ta, tb, 0.35).unwrap();
        let dual = js_skew_dual_var(&mut tape, ta, tb, 0.35).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        assert!(close(tape.value(kl).item().unwrap(), kl_diag(&a, &b).unwrap()));
        assert!(close(tape.value(js).item().unwrap(), js_skew(&a, &b, 0.35).unwrap()));
        assert!(close(
            tape.value(dual).item().unwrap(),
            js_skew_dual(&a, &b, 0.35).unwrap()
        ));
    }
}
