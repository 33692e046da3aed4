//! Moving learners across the label-embedding construction in both
//! directions, and the learner that simply reads the embedded label.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use robustsim_core::concepts::{maj_decode, phi_encode};
use robustsim_core::hypercube::{ball_size, cube, visit_ball};
use robustsim_core::learners::{pac_sample_size_finite_class, EliminationLearner};
use robustsim_core::reduction::{
    build_reduction_instance, last_bit_cheat, pac_from_robust, robust_from_pac, SupportLookupLearner,
};
use robustsim_core::seed::stream_rng;
use robustsim_core::{Classifier, Concept, DistributionSpec, EvalMode, LabeledSample, RiskEngine};

use crate::config::ScenarioConfig;
use crate::error::{ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const FORWARD_CITATION: &str = "composing a PAC hypothesis with blockwise majority gives a hypothesis whose \
     exact-in-ball risk at radius k on the encoded distribution equals its standard risk on the base distribution";
const RECOVER_CITATION: &str =
    "when the base learner recovers the target exactly, the composed hypothesis is k-robustly correct";
const BACKWARD_CITATION: &str = "a robust learner for the encoded class yields a PAC learner for the base class: \
     the pulled-back hypothesis has standard risk at most the robust risk of the encoded one";
const CHEAT_CITATION: &str = "reading the embedded label bit gives zero standard risk on the encoded distribution \
     but constant-in-ball risk 1 at radius 1";
const STABLE_CITATION: &str =
    "any perturbation of at most k bits of an encoded point decodes to the same base point";

pub fn reduction(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(4);
    let k = cfg.k.unwrap_or(1);
    let seed = cfg.seed_or_default();
    let c_text = cfg.c1.clone().unwrap_or_else(|| "conj:0,2".into());
    let epsilon = cfg.epsilon.unwrap_or(0.1);
    let delta = cfg.delta.unwrap_or(0.05);

    let mut check = Constraints::default();
    check.require((1..=8).contains(&n), || format!("need 1 <= n <= 8, got {n}"));
    check.require(k <= 3, || format!("need k <= 3, got {k}"));
    check.finish()?;
    let spec = cfg.distribution.clone().unwrap_or(DistributionSpec::Uniform { n });
    let mut check = Constraints::default();
    check.require(spec.dim() == n, || format!("distribution has dimension {}, expected {n}", spec.dim()));
    check.finish()?;
    let m = cfg.m.unwrap_or(1u64 << (n - 1).max(1));

    let mut resolved = cfg.clone();
    resolved.scenario = Some("reduction".into());
    resolved.n = Some(n);
    resolved.k = Some(k);
    resolved.m = Some(m);
    resolved.seed = Some(seed);
    resolved.c1 = Some(c_text.clone());
    resolved.epsilon = Some(epsilon);
    resolved.delta = Some(delta);
    resolved.distribution = Some(spec.clone());
    let mut report = ScenarioReport::new("reduction", resolved);

    let c = Concept::parse(&c_text, n)?;
    let base = spec.build::<f64>()?;
    let inst = build_reduction_instance(c.clone(), base.clone(), k)?;
    let induced = &inst.induced_distribution;
    let encoded_c = &inst.encoded_concept;
    let engine = RiskEngine::default();
    let support = base.support()?;
    report.measure("encoded_dim", inst.encoded_dim() as u64);

    // forward: PAC learner on decoded samples, composed with majority
    let encoded_points = support.iter().map(|(x, _)| inst.encode(x)).collect::<Result<Vec<_>, _>>()?;
    let s_enc = LabeledSample::labeled_by(encoded_c, encoded_points)?;
    let h_enc = robust_from_pac(&EliminationLearner, &s_enc, k)?;
    let Concept::MajorityEncoded { inner: h_base, .. } = &h_enc else {
        unreachable!("robust_from_pac composes with majority")
    };
    let fwd_robust = engine.exact_in_ball_risk(&h_enc, encoded_c, induced, k, EvalMode::Exact)?.value;
    let fwd_std = engine.disagreement_risk(h_base.as_ref(), &c, &base, EvalMode::Exact)?.value;
    report.measure("forward_robust_risk", fwd_robust);
    report.measure("forward_base_standard_risk", fwd_std);
    report.measure("forward_hypothesis", h_enc.to_string());
    report.claim(Claim::equal("forward_transport", FORWARD_CITATION, fwd_robust, fwd_std, 1e-12));
    let recovered = support.iter().all(|(x, _)| h_base.eval(x) == c.eval(x));
    if recovered {
        report.claim(Claim::equal("forward_recovered_risk", RECOVER_CITATION, fwd_robust, 0.0, 0.0));
        let rc = engine.constant_in_ball_risk(&h_enc, encoded_c, induced, k, EvalMode::Exact)?.value;
        report.claim(Claim::equal("forward_recovered_constant_risk", RECOVER_CITATION, rc, 0.0, 0.0));
    } else {
        report.note("the elimination learner did not recover the base concept (not a monotone conjunction?)");
    }

    // backward: robust learner on encoded samples, pulled back through phi
    let mut rng = stream_rng(seed, 1);
    let pts = (0..m).map(|_| base.sample(&mut rng)).collect();
    let s = LabeledSample::labeled_by(&c, pts)?;
    let lookup = SupportLookupLearner { k, default: false };
    let h_back = pac_from_robust(&lookup, &s, k)?;
    let back_std = engine.disagreement_risk(&h_back, &c, &base, EvalMode::Exact)?.value;
    let back_robust = engine.exact_in_ball_risk(h_back.inner(), encoded_c, induced, k, EvalMode::Exact)?.value;
    report.measure("backward_standard_risk", back_std);
    report.measure("backward_robust_risk", back_robust);
    report.claim(Claim::at_most("backward_bound", BACKWARD_CITATION, back_std, back_robust, 1e-12));
    report.claim(Claim::equal("backward_transport", BACKWARD_CITATION, back_std, back_robust, 1e-12));
    if h_back.label_bit_exposed() {
        report.note(format!(
            "k = 0: the label bit is unprotected; the pulled-back hypothesis fixes it to 0 ({} support points react to it)",
            h_back.label_bit_sensitivity(support.iter().map(|s| &s.0))
        ));
    }

    // the cheat
    let cheat = last_bit_cheat(inst.encoded_dim())?;
    let cheat_std = engine.disagreement_risk(&cheat, encoded_c, induced, EvalMode::Exact)?.value;
    let cheat_rc = engine.constant_in_ball_risk(&cheat, encoded_c, induced, 1, EvalMode::Exact)?.value;
    report.measure("cheat_standard_risk", cheat_std);
    report.measure("cheat_constant_risk_1", cheat_rc);
    report.claim(Claim::equal("cheat_standard_risk", CHEAT_CITATION, cheat_std, 0.0, 0.0));
    report.claim(Claim::equal("cheat_constant_risk", CHEAT_CITATION, cheat_rc, 1.0, 1e-12));

    // perturbation stability, exhaustive when the balls are small
    let work = ball_size(inst.encoded_dim(), k)? * BigUint::from(2 * support.len());
    if work <= BigUint::from(5_000_000u64) {
        let mut stable = true;
        for (x, _) in &support {
            for b in [false, true] {
                let z = phi_encode(x, b, k)?;
                let broken = visit_ball(&z, k, |w, _| match maj_decode(w, k, n) {
                    Ok(d) if d == *x => ControlFlow::Continue(()),
                    _ => ControlFlow::Break(()),
                });
                stable &= broken.is_none();
            }
        }
        report.claim(Claim::holds("k_perturbation_stability", STABLE_CITATION, stable));
    } else {
        report.note("k-perturbation stability skipped: balls too large for exhaustive scan");
    }
    let round_trip = cube(n)?.all(|x| {
        [false, true]
            .iter()
            .all(|&b| phi_encode(&x, b, k).and_then(|z| maj_decode(&z, k, n)).is_ok_and(|d| d == x))
    });
    report.claim(Claim::holds("round_trip", STABLE_CITATION, round_trip));

    let class = BigUint::from(1u8) << n;
    report.measure("pac_sample_size", pac_sample_size_finite_class(&class, epsilon, delta)?);
    Ok(report)
}
