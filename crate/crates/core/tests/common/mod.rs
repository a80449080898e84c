//! Independent oracles shared by the integration and acceptance tests.
//!
//! Densities, sampling and the geometric-mean Gaussian are computed with
//! nalgebra, never with the crate's own Gaussian code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use npssl::gaussian::{DiagGaussian, FullGaussian};
use npssl::np::{NpConfig, NpModel};
use npssl::numerics::{ParamStore, Tape, Tensor2};
use npssl::ssl::{loss_total_var, DivergenceKind, SslConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multivariate normal evaluated with nalgebra.
#[derive(Clone, Debug)]
pub struct Mvn {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub prec: DMatrix<f64>,
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl Mvn {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        let d = mean.len() as f64;
        let ch = cov.clone().cholesky().expect("oracle covariance is SPD");
        let l = ch.l();
        let log_det: f64 = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Self {
            prec: ch.inverse(),
            chol: l,
            log_norm: -0.5 * (d * (2.0 * std::f64::consts::PI).ln() + log_det),
            mean,
            cov,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn log_pdf(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.mean;
        self.log_norm - 0.5 * (d.transpose() * &self.prec * &d)[(0, 0)]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::<f64>::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        &self.mean + &self.chol * z
    }

    pub fn to_full(&self) -> FullGaussian<f64> {
        FullGaussian::from_covariance(self.mean.iter().copied().collect(), &to_tensor(&self.cov)).unwrap()
    }

    /// Diagonal part as the crate's type; only meaningful for diagonal `cov`.
    pub fn to_diag(&self) -> DiagGaussian<f64> {
        DiagGaussian::new(self.mean.iter().copied().collect(), self.cov.diagonal().iter().copied().collect()).unwrap()
    }
}

pub fn to_tensor(m: &DMatrix<f64>) -> Tensor2<f64> {
    Tensor2::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn random_mean<R: Rng>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random_range(-1.5..1.5))
}

/// Well-conditioned SPD matrix `A Aᵀ / d + 0.3 I`.
pub fn random_spd<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    (&a * a.transpose()) / d as f64 + DMatrix::identity(d, d) * 0.3
}

pub fn random_diag<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| rng.random_range(0.3..2.5)))
}

pub fn random_mvn<R: Rng>(d: usize, diag: bool, rng: &mut R) -> Mvn {
    let cov = if diag { random_diag(d, rng) } else { random_spd(d, rng) };
    Mvn::new(random_mean(d, rng), cov)
}

/// `N_α ∝ N₁^{1-α} N₂^{α}` from its definition.
pub fn geometric_mean(n1: &Mvn, n2: &Mvn, alpha: f64) -> Mvn {
    let p = &n1.prec * (1.0 - alpha) + &n2.prec * alpha;
    let cov = p.clone().try_inverse().expect("invertible precision");
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = &cov * (&n1.prec * &n1.mean * (1.0 - alpha) + &n2.prec * &n2.mean * alpha);
    Mvn::new(mean, cov)
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: f64,
    pub se: f64,
}

impl McEstimate {
    /// Error in standard errors. The SE is floored at rounding level: the
    /// dual JS integrand is constant in `x`, so its sample SE is zero.
    pub fn z_score(&self, exact: f64) -> f64 {
        (exact - self.value).abs() / self.se.max(1e-9 * (1.0 + exact.abs()))
    }
}

fn mean_se(f: impl Fn(usize) -> f64, n: usize) -> McEstimate {
    let (mut s, mut s2) = (0.0, 0.0);
    for i in 0..n {
        let v = f(i);
        s += v;
        s2 += v * v;
    }
    let m = s / n as f64;
    let var = ((s2 - n as f64 * m * m) / (n as f64 - 1.0)).max(0.0);
    McEstimate {
        value: m,
        se: (var / n as f64).sqrt(),
    }
}

/// `E_q[log q − log p]` with `n` draws from `q`.
pub fn mc_kl<R: Rng>(q: &Mvn, p: &Mvn, n: usize, rng: &mut R) -> McEstimate {
    let xs: Vec<DVector<f64>> = (0..n).map(|_| q.sample(rng)).collect();
    mean_se(|i| q.log_pdf(&xs[i]) - p.log_pdf(&xs[i]), n)
}

/// `(1−α) KL(N₁‖N_α) + α KL(N₂‖N_α)`; the two halves use independent draws.
pub fn mc_js<R: Rng>(n1: &Mvn, n2: &Mvn, alpha: f64, n: usize, rng: &mut R) -> McEstimate {
    let m = geometric_mean(n1, n2, alpha);
    let a = mc_kl(n1, &m, n, rng);
    let b = mc_kl(n2, &m, n, rng);
    McEstimate {
        value: (1.0 - alpha) * a.value + alpha * b.value,
        se: ((1.0 - alpha).powi(2) * a.se.powi(2) + alpha.powi(2) * b.se.powi(2)).sqrt(),
    }
}

/// `(1−α) KL(N_α‖N₁) + α KL(N_α‖N₂)` with draws from `N_α`.
pub fn mc_js_dual<R: Rng>(n1: &Mvn, n2: &Mvn, alpha: f64, n: usize, rng: &mut R) -> McEstimate {
    let m = geometric_mean(n1, n2, alpha);
    let xs: Vec<DVector<f64>> = (0..n).map(|_| m.sample(rng)).collect();
    mean_se(
        |i| {
            let lm = m.log_pdf(&xs[i]);
            (1.0 - alpha) * (lm - n1.log_pdf(&xs[i])) + alpha * (lm - n2.log_pdf(&xs[i]))
        },
        n,
    )
}

/// Largest minus smallest of `log p(x) − Σ log p_k(x)` over random points;
/// zero up to rounding when `p ∝ Π p_k`.
pub fn product_log_density_spread<R: Rng>(parts: &[Mvn], product: &FullGaussian<f64>, points: usize, rng: &mut R) -> f64 {
    let d = parts[0].dim();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..points {
        let x = random_mean(d, rng);
        let xv: Vec<f64> = x.iter().copied().collect();
        let v = product.log_pdf(&xv) - parts.iter().map(|p| p.log_pdf(&x)).sum::<f64>();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// A complete training-mode loss with every random input frozen.
pub struct GradInstance {
    pub model: NpModel<f64>,
    pub x: Tensor2<f64>,
    pub labels: Vec<usize>,
    pub context: Vec<usize>,
    pub selected: (Vec<usize>, Vec<usize>),
    pub noise: Tensor2<f64>,
    pub cfg: SslConfig,
    pub alpha: f64,
}

/// 2 classes, 4 features, 3 latent samples; three labeled context rows and
/// three pseudo-labeled rows.
pub fn grad_instance(divergence: DivergenceKind, seed: u64) -> GradInstance {
    let np = NpConfig {
        input_dim: 4,
        num_classes: 2,
        backbone: vec![5],
        hidden: Some(3),
        latent_dim: Some(2),
        samples: 3,
        ..Default::default()
    };
    let mut r = rng(seed);
    let model = NpModel::new(np, &mut r).unwrap();
    let x = Tensor2::from_fn(6, 4, |_, _| r.random_range(-1.0..1.0));
    let labels = vec![0, 1, 0, 1, 1, 0];
    let noise = model.sample_noise(6, Some(&mut r));
    let cfg = SslConfig {
        divergence,
        beta: 0.5,
        lambda_u: 0.7,
        samples: 3,
        ..Default::default()
    };
    let mut inst = GradInstance {
        model,
        x,
        labels,
        context: vec![0, 1, 2],
        selected: (vec![3, 4, 5], vec![1, 1, 0]),
        noise,
        cfg,
        alpha: 0.5,
    };
    inst.alpha = inst.current_alpha();
    inst
}

impl GradInstance {
    /// `α_u` from the entropies at the current parameters.
    pub fn current_alpha(&self) -> f64 {
        let mut tape = Tape::new();
        let fwd = self
            .model
            .forward_train(&mut tape, &self.x, &self.labels, &self.context, &self.noise)
            .unwrap();
        let pred = npssl::np::Prediction::from_samples(tape.value(fwd.probs), 3, self.cfg.entropy_base).unwrap();
        let u = pred.uncertainty();
        let uc = u[..3].iter().sum::<f64>() / 3.0;
        let ut = u.iter().sum::<f64>() / u.len() as f64;
        npssl::gaussian::alpha_u(uc, ut).unwrap()
    }

    fn loss_on(&self, tape: &mut Tape<f64>, model: &NpModel<f64>) -> npssl::numerics::Var {
        let fwd = model
            .forward_train(tape, &self.x, &self.labels, &self.context, &self.noise)
            .unwrap();
        let yl: Vec<usize> = self.context.iter().map(|&i| self.labels[i]).collect();
        let lv = loss_total_var(
            tape,
            fwd.probs,
            3,
            (&self.context, &yl),
            (&self.selected.0, &self.selected.1),
            fwd.q_context,
            fwd.q_target,
            self.alpha,
            &self.cfg,
        )
        .unwrap();
        lv.total
    }

    pub fn loss(&self, model: &NpModel<f64>) -> f64 {
        let mut tape = Tape::new();
        let l = self.loss_on(&mut tape, model);
        tape.value(l).item().unwrap()
    }

    pub fn analytic_grads(&self) -> ParamStore<f64> {
        let mut model = self.model.clone();
        let mut tape = Tape::new();
        let l = self.loss_on(&mut tape, &model);
        model.params_mut().zero_grad();
        tape.backward(l, model.params_mut()).unwrap();
        model.params().clone()
    }
}

#[derive(Clone, Debug)]
pub struct GradReport {
    pub checked: usize,
    pub max_rel_err: f64,
    pub worst: String,
}

/// Central differences over every scalar parameter. The relative error uses
/// `max(|analytic|, |numeric|, floor)` as denominator.
pub fn gradient_check(inst: &GradInstance, h: f64, floor: f64) -> GradReport {
    let grads = inst.analytic_grads();
    let mut report = GradReport {
        checked: 0,
        max_rel_err: 0.0,
        worst: String::new(),
    };
    let mut model = inst.model.clone();
    for id in grads.ids() {
        let n = grads.value(id).len();
        for k in 0..n {
            let orig = model.params().value(id).data()[k];
            model.params_mut().value_mut(id).data_mut()[k] = orig + h;
            let up = inst.loss(&model);
            model.params_mut().value_mut(id).data_mut()[k] = orig - h;
            let down = inst.loss(&model);
            model.params_mut().value_mut(id).data_mut()[k] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.grad(id).data()[k];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor);
            report.checked += 1;
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
                report.worst = format!("{}[{k}] analytic {analytic:e} numeric {numeric:e}", grads.name(id));
            }
        }
    }
    report
}

/// One closed-form value against its Monte-Carlo estimate.
#[derive(Clone, Debug)]
pub struct McCheck {
    pub op: &'static str,
    pub dim: usize,
    pub exact: f64,
    pub estimate: McEstimate,
}

impl McCheck {
    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.exact)
    }
}

/// `instances` random problems per op with `D` cycling through 1..=6.
pub fn mc_suite(instances: usize, samples: usize, seed: u64) -> Vec<McCheck> {
    use npssl::gaussian::{js_skew, js_skew_dual, kl_diag, kl_full_to_standard};
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(4 * instances);
    for i in 0..instances {
        let d = 1 + i % 6;
        let std = Mvn::new(DVector::zeros(d), DMatrix::identity(d, d));

        let q = random_mvn(d, false, &mut r);
        out.push(McCheck {
            op: "kl_full_to_standard",
            dim: d,
            exact: kl_full_to_standard(&q.to_full()).unwrap(),
            estimate: mc_kl(&q, &std, samples, &mut r),
        });

        let (q, p) = (random_mvn(d, true, &mut r), random_mvn(d, true, &mut r));
        out.push(McCheck {
            op: "kl_diag",
            dim: d,
            exact: kl_diag(&q.to_diag(), &p.to_diag()).unwrap(),
            estimate: mc_kl(&q, &p, samples, &mut r),
        });

        let (n1, n2) = (random_mvn(d, false, &mut r), random_mvn(d, false, &mut r));
        let alpha = r.random_range(0.05..0.95);
        out.push(McCheck {
            op: "js_skew",
            dim: d,
            exact: js_skew(&n1.to_full(), &n2.to_full(), alpha).unwrap(),
            estimate: mc_js(&n1, &n2, alpha, samples, &mut r),
        });

        let (n1, n2) = (random_mvn(d, false, &mut r), random_mvn(d, false, &mut r));
        let alpha = r.random_range(0.05..0.95);
        out.push(McCheck {
            op: "js_skew_dual",
            dim: d,
            exact: js_skew_dual(&n1.to_full(), &n2.to_full(), alpha).unwrap(),
            estimate: mc_js_dual(&n1, &n2, alpha, samples, &mut r),
        });
    }
    out
}

/// Largest log-density spread over `instances` products of 2..=4 factors.
pub fn product_suite(instances: usize, seed: u64) -> f64 {
    use npssl::gaussian::product_of_gaussians;
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let d = 1 + i % 6;
        let k = 2 + i % 3;
        let parts: Vec<Mvn> = (0..k).map(|_| random_mvn(d, false, &mut r)).collect();
        let full: Vec<FullGaussian<f64>> = parts.iter().map(Mvn::to_full).collect();
        let prod = product_of_gaussians(&full).unwrap();
        worst = worst.max(product_log_density_spread(&parts, &prod, 50, &mut r));
    }
    worst
}

/// Small model with 3 features and 3 classes.
pub fn small_np(mode: npssl::np::LatentMode, seed: u64) -> NpModel<f64> {
    let cfg = NpConfig {
        input_dim: 3,
        num_classes: 3,
        backbone: vec![8],
        hidden: Some(6),
        latent_dim: Some(4),
        samples: 4,
        bank_capacity: 64,
        mode,
    };
    NpModel::new(cfg, &mut rng(seed)).unwrap()
}

pub fn random_batch<R: Rng>(n: usize, d: usize, classes: usize, rng: &mut R) -> (Tensor2<f64>, Vec<usize>) {
    let x = Tensor2::from_fn(n, d, |_, _| rng.random_range(-2.0..2.0));
    let y = (0..n).map(|i| if i < classes { i } else { rng.random_range(0..classes) }).collect();
    (x, y)
}

/// Largest output change of either aggregation path over `perms` random
/// row permutations of one batch. Each evaluation runs on a fresh clone so
/// bank writes cannot leak between them.
pub fn permutation_max_diff(mode: npssl::np::LatentMode, seed: u64, perms: usize) -> f64 {
    use rand::seq::SliceRandom;
    let model = small_np(mode, seed);
    let mut r = rng(seed ^ 0x5eed);
    let (x, y) = random_batch(16, 3, 3, &mut r);
    let eval = |order: &[usize]| {
        let xs = x.gather_rows(order);
        let ys: Vec<usize> = order.iter().map(|&i| y[i]).collect();
        let q = model.clone().latent_path(&xs, &ys).unwrap();
        let d = model.clone().deterministic_path(&xs, &ys).unwrap();
        let mut out: Vec<f64> = q.mean().to_vec();
        out.extend(q.var());
        out.extend(d);
        out
    };
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let base = eval(&order);
    let mut worst: f64 = 0.0;
    for _ in 0..perms {
        order.shuffle(&mut r);
        let out = eval(&order);
        for (a, b) in base.iter().zip(&out) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Row-stochastic random prediction with `t` samples.
pub fn random_prediction<R: Rng>(n: usize, classes: usize, t: usize, rng: &mut R) -> npssl::np::Prediction<f64> {
    let samples = (0..t)
        .map(|_| {
            let mut m = Tensor2::from_fn(n, classes, |_, _| rng.random_range(0.0f64..1.0).powi(4) + 1e-6);
            for i in 0..n {
                let s: f64 = m.row(i).iter().sum();
                for k in 0..classes {
                    m[(i, k)] /= s;
                }
            }
            m
        })
        .collect();
    npssl::np::Prediction::from_sample_list(samples, npssl::gaussian::LogBase::Two).unwrap()
}

/// Number of cases where loosening either gate dropped a selected row.
pub fn gate_inclusion_violations(cases: usize, seed: u64) -> usize {
    use npssl::ssl::select_pseudo_labels;
    let mut r = rng(seed);
    let mut bad = 0;
    for _ in 0..cases {
        let pred = random_prediction(40, 3, 4, &mut r);
        let (c1, u1) = (r.random_range(0.3..0.99), r.random_range(0.05..1.5));
        let (c2, u2) = (c1 - r.random_range(0.0..0.3), u1 + r.random_range(0.0..0.5));
        let strict = select_pseudo_labels(&pred, c1, u1);
        let loose = select_pseudo_labels(&pred, c2, u2);
        if !strict.indices.iter().all(|i| loose.indices.contains(i)) {
            bad += 1;
        }
    }
    bad
}

/// Head count, tail count and tail target `n1 / γ` of an imbalanced subset of
/// a balanced 10-class label vector.
pub fn imbalance_head_tail(n1: usize, gamma: f64, seed: u64) -> (usize, usize, f64) {
    use npssl::datasets::{class_counts, make_imbalanced};
    let labels: Vec<usize> = (0..10 * n1).map(|i| i % 10).collect();
    let idx = make_imbalanced(&labels, n1, gamma, seed).unwrap();
    let picked: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    let counts = class_counts(&picked, 10);
    (counts[0], counts[9], n1 as f64 / gamma)
}
