use poisson_interp::verify::{self, CriterionOutcome, VerifyConfig};

fn report(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_exact_p2_identity() {
    report(verify::exact_p2_identity());
}

#[test]
fn criterion_02_r1_closed_form() {
    report(verify::r1_closed_form());
}

#[test]
fn criterion_03_remainder_double_sum_bound() {
    report(verify::lemma1());
}

#[test]
fn criterion_04_lebesgue_function_asymptotics() {
    report(verify::lebesgue_asymptotics());
}

#[test]
fn criterion_05_lebesgue_type_inequality() {
    report(verify::lebesgue_type_inequality(&VerifyConfig::default()));
}

#[test]
fn criterion_06_kn_constant_p2() {
    report(verify::kn_constant_p2());
}

#[test]
fn criterion_07_limit_relation() {
    report(verify::limit_relation());
}

#[test]
fn criterion_08_duality_sandwich() {
    report(verify::duality_sandwich(&VerifyConfig::default()));
}

#[test]
fn criterion_09_special_functions() {
    report(verify::special_functions());
}

#[test]
fn criterion_10_best_approximation() {
    report(verify::best_approximation(&VerifyConfig::default()));
}

#[test]
fn criterion_11_interpolation_exactness() {
    report(verify::interpolation_exactness(&VerifyConfig::default()));
}
