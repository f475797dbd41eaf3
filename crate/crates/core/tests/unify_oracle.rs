mod support;

use nabla_core::par::par_map;
use nabla_core::term::Fresh;
use support::oracle::{
    extension_shapes, factors_through, judge, mgu_check, problems, render, translate, Problem, Verdict,
};

#[test]
fn sweep_agrees_with_oracle() {
    let ps = problems(7, 2000);
    let verdicts = par_map(&ps, judge);
    let mut counts = [0usize; 3];
    for (p, v) in ps.iter().zip(&verdicts) {
        match v {
            Verdict::Unifiable => counts[0] += 1,
            Verdict::NotUnifiable => counts[1] += 1,
            Verdict::Indeterminate => counts[2] += 1,
            Verdict::Discrepancy(m) => panic!("{} = {}: {m}", render(&p.lhs), render(&p.rhs)),
        }
    }
    assert!(counts[2] * 20 < ps.len());
    assert!(counts[0] > ps.len() / 10 && counts[1] > ps.len() / 10);
}

#[test]
fn extension_shapes_have_most_general_unifiers() {
    for p in extension_shapes() {
        assert!(mgu_check(&p) > 0);
    }
}

#[test]
fn pattern_unifiers_are_most_general() {
    let ps: Vec<Problem> = problems(11, 400)
        .into_iter()
        .filter(|p| judge(p) == Verdict::Unifiable)
        .collect();
    let checked: usize = par_map(&ps, mgu_check).into_iter().sum();
    assert!(checked > 0);
}

#[test]
fn factoring_rejects_a_less_general_unifier() {
    use nabla_core::term::{Subst, Term, Ty};
    // R := λu v. B v also solves B n1 = R M n1, but forgets how R uses M
    let p = &extension_shapes()[1];
    let mut fresh = Fresh::new(100);
    let tr = translate(p, &mut fresh);
    let i = Ty::base("i");
    let body = Term::app(Term::var(&tr.vars[0]), vec![Term::Bound(0)]);
    let mut theta = Subst::new();
    theta.insert(&tr.vars[1], Term::lam("u", i.clone(), Term::lam("v", i, body)));
    assert!(support::oracle::equalizes(&theta, &tr));
    assert!(factors_through(p, &tr, &theta, 400).is_err());
}
