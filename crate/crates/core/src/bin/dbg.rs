use hgc_core::action::conv;
use hgc_core::complex::ValencePolicy;
use hgc_core::parity::{BRACKET_SHIFT, HAIR_TABLE};
use hgc_core::structures::std_bracket;
use hgc_core::verify::*;
use hgc_core::*;
use std::sync::atomic::Ordering;

fn mu_ok() -> bool {
    [(1, 3), (0, 2), (1, 2), (2, 3)].iter().all(|&(m, n)| {
        let ctx = ComplexContext::hairy(m, n, ValencePolicy::AtLeastOne);
        let mu = GraphSum::single(Graph::mu(m, n));
        std_bracket(&mu, &mu, ctx).unwrap().is_zero()
    })
}

fn d22_failures() -> usize {
    use hgc_core::diff::delta_hair_sum;
    let mut bad = 0;
    for (m, n) in [(1, 3), (0, 2), (1, 2), (2, 3)] {
        let ctx = ComplexContext::hairy(m, n, ValencePolicy::AtLeastOne);
        for g in graph_pool(m, n, 6, 11) {
            let x = GraphSum::single(g);
            let d2 = delta_hair_sum(&x, ctx);
            if !delta_hair_sum(&d2, ctx).is_zero() {
                bad += 1;
            }
        }
    }
    bad
}

fn main() {
    for table in 0u8..2 {
        HAIR_TABLE.store(table, Ordering::Relaxed);
        for shift in 0u8..2 {
            BRACKET_SHIFT.store(shift, Ordering::Relaxed);
            for rule in 0u16..256 {
                conv::set_rule(rule);
                if !mu_ok() {
                    continue;
                }
                if d22_failures() > 0 {
                    continue;
                }
                let mini = run_sign_table_suite(3, 4, 2);
                let mf = mini.iter().filter(|c| !c.passed).count();
                if mf == 0 {
                    let grid = run_sign_table_suite(4, 5, 3);
                    let gf = grid.iter().filter(|c| !c.passed).count();
                    println!("table {table} shift {shift} rule {rule:#010b}: grid fails {gf}/{}", grid.len());
                }
            }
        }
    }
    println!("done");
}
