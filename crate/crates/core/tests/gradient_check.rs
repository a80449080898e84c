//! Full training loss against central finite differences, every parameter.

mod common;

use common::{grad_instance, gradient_check};
use npssl::ssl::DivergenceKind;

fn run(kind: DivergenceKind) {
    let inst = grad_instance(kind, 21);
    assert!(inst.alpha > 0.0 && inst.alpha < 1.0);
    let r = gradient_check(&inst, 1e-5, 1e-6);
    assert!(r.checked > 50);
    assert!(r.max_rel_err < 1e-4, "{kind:?}: {} at {}", r.max_rel_err, r.worst);
}

#[test]
fn js_loss_gradients() {
    run(DivergenceKind::Js);
}

#[test]
fn js_dual_loss_gradients() {
    run(DivergenceKind::JsDual);
}

#[test]
fn kl_loss_gradients() {
    run(DivergenceKind::Kl);
}
