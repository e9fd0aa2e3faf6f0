use qfa_core::constructions::{neq_mcqfa, rotation_mcqfa};
use qfa_core::cutpoint::{CutpointSpec, Relation};
use qfa_core::languages::{eq_dot_b, lt, oracle, pal};
use qfa_core::numeric::Scalar;
use qfa_core::verify::{dieu_violation, enumerate_agreement};

fn a(n: usize) -> Vec<usize> {
    vec![0; n]
}

fn b(n: usize) -> Vec<usize> {
    vec![1; n]
}

#[test]
fn dieu_families_fail_at_every_parameter() {
    for n in 2..=5 {
        let co_pal = pal().complement();
        let u = [a(n), b(1)].concat();
        assert_eq!(dieu_violation(&co_pal, &u, &a(1), &[], n, n), Some(n), "pal n={n}");

        assert_eq!(dieu_violation(&lt(), &[], &a(1), &b(n), n, n), Some(n), "lt n={n}");
        assert_eq!(dieu_violation(&lt().complement(), &a(n), &b(1), &b(1), n, n), Some(n), "co-lt n={n}");

        assert_eq!(dieu_violation(&eq_dot_b(), &[], &a(1), &b(n), n, n), Some(n), "eq-dot-b n={n}");
        assert_eq!(
            dieu_violation(&eq_dot_b().complement(), &a(n), &b(1), &b(1), n, n),
            Some(n),
            "co-eq-dot-b n={n}"
        );
    }
}

#[test]
fn dieu_returns_none_without_a_violation() {
    assert_eq!(dieu_violation(&pal(), &[], &a(1), &[], 2, 6), None);
    assert_eq!(dieu_violation(&lt(), &b(1), &a(1), &[], 3, 6), None);
}

#[test]
fn rotation_machines_match_their_languages() {
    let spec = CutpointSpec::greater(Scalar::Float(0.0));
    for m in [2u32, 3, 5, 7] {
        let machine = rotation_mcqfa(m).unwrap();
        let report = enumerate_agreement(&machine, &spec, &oracle(&format!("mod-{m}")).unwrap(), 100, 1e-9).unwrap();
        assert!(report.agrees(), "m={m}: {report:?}");
    }
    let neq = neq_mcqfa(1.0);
    let report = enumerate_agreement(&neq, &spec, &oracle("neq").unwrap(), 8, 1e-9).unwrap();
    assert!(report.agrees(), "{report:?}");
    let eq = CutpointSpec::new(Scalar::Float(0.0), Relation::Equal);
    let report = enumerate_agreement(&neq, &eq, &oracle("eq").unwrap(), 8, 1e-9).unwrap();
    assert!(report.agrees());
}
