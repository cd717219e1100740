use std::hint::black_box;

use bpcalc_core::abloc::{abelian_groups_of_order, fraction_oracle, localize, smith_normal_form, CyclicProduct, InvertedSet};
use bpcalc_core::catfrac::{localize as localize_category, library, zigzag_oracle};
use bpcalc_core::grading::{to_m_basis, to_v_basis};
use bpcalc_core::hopf::verify::{check_relation, commutation_relations};
use bpcalc_core::hopf::Hopf;
use bpcalc_core::opcalc::{betap_pipeline, gamma1_pipeline};
use criterion::{criterion_group, criterion_main, Criterion};

fn coproduct(c: &mut Criterion) {
    let mut g = c.benchmark_group("coproduct");
    g.sample_size(10);
    for p in [5u64, 7] {
        g.bench_function(format!("psi_t3_p{p}"), |b| {
            b.iter(|| {
                let h = Hopf::new(p, 4).unwrap();
                black_box(h.psi_t(3).unwrap().len())
            })
        });
    }
    g.finish();
}

fn basis_change(c: &mut Criterion) {
    let h = Hopf::new(7, 4).unwrap();
    let x = &(&h.v(1).unwrap().pow(8) * &h.v(2).unwrap().pow(3)) + &h.v(3).unwrap();
    c.bench_function("v_to_m_to_v_p7", |b| b.iter(|| to_v_basis(&to_m_basis(black_box(&x)).unwrap()).unwrap()));
}

fn relations(c: &mut Criterion) {
    let h = Hopf::new(7, 4).unwrap();
    let monomials = h.t_monomials(18 * h.q());
    let rels = commutation_relations(&h).unwrap();
    c.bench_function("commutator_window_p7", |b| {
        b.iter(|| {
            for rel in &rels[..3] {
                black_box(check_relation(&h, rel, &monomials, 18).unwrap());
            }
        })
    });
}

fn pipelines(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipelines");
    g.sample_size(10);
    g.bench_function("gamma1_p7", |b| b.iter(|| gamma1_pipeline(&Hopf::new(7, 4).unwrap()).unwrap()));
    g.bench_function("betap_p7", |b| b.iter(|| betap_pipeline(&Hopf::new(7, 4).unwrap()).unwrap()));
    g.finish();
}

fn fractions(c: &mut Criterion) {
    let entries = library::classes().unwrap();
    let fork = entries.iter().find(|e| e.name.contains("fork")).unwrap_or(&entries[0]);
    c.bench_function("localize_fork", |b| b.iter(|| localize_category(&fork.category, &fork.class).unwrap()));
    c.bench_function("zigzag_fork", |b| {
        b.iter(|| {
            let n = fork.category.objects().len();
            for x in 0..n {
                for y in 0..n {
                    black_box(zigzag_oracle(&fork.category, &fork.class, x, y).unwrap());
                }
            }
        })
    });
}

fn abelian(c: &mut Criterion) {
    let groups = abelian_groups_of_order(720);
    let s = InvertedSet::primes([2, 3]).unwrap();
    c.bench_function("fraction_oracle_order_720", |b| {
        b.iter(|| {
            for g in &groups {
                let table = CyclicProduct::from_group(g).unwrap();
                assert_eq!(fraction_oracle(&table, &s, 10_000).unwrap(), localize(g, &s));
            }
        })
    });
    let m: Vec<Vec<i128>> = (0..6).map(|i| (0..8).map(|j| ((i * 7 + j * 3) % 11) as i128 - 5).collect()).collect();
    c.bench_function("smith_6x8", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

criterion_group!(benches, coproduct, basis_change, relations, pipelines, fractions, abelian);
criterion_main!(benches);
