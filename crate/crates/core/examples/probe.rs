use freefield_sl2::fock::{BasisState, ModuleTag, module_basis, GradedVector};
use freefield_sl2::series::{Expo, Series};
use freefield_sl2::vertex::{apply_component, type_i_minus_commutator, Component};
use std::collections::BTreeMap;

fn norm(x: &Series<GradedVector>) -> BTreeMap<(Expo, BasisState), String> {
    let mut m = BTreeMap::new();
    for (e, v) in &x.terms {
        for (st, c) in &v.0 {
            if !c.is_zero() {
                m.insert((*e, st.clone()), format!("{c}"));
            }
        }
    }
    m
}

fn main() {
    for tag in [ModuleTag::TwoLambda0, ModuleTag::TwoLambda1, ModuleTag::Lambda0Lambda1] {
        let mut bad = 0;
        let mut n = 0;
        for s in module_basis(tag, 1) {
            let a = apply_component(Component::TypeIMinus, &s, 12);
            let b = type_i_minus_commutator(&s, 12);
            n += 1;
            if norm(&a) != norm(&b) {
                bad += 1;
                if bad == 1 {
                    println!("first mismatch on {s:?}");
                }
            }
        }
        println!("{tag:?}: {n} states, {bad} mismatches");
    }
}
