use dioph_core::arcs::*;
use dioph_core::form::{CircleParams, FormParams};
use dioph_core::primes::PrimeTable;
use std::time::Instant;

fn main() {
    let table = PrimeTable::sieve(11000).unwrap();
    let params = FormParams::new([2.0_f64.sqrt(), -1.0, 1.0], 1.2, std::f64::consts::PI, 0.1, 0.05)
        .with_irrational_ratio();
    let opts = IntegrateOpts::default();
    for x in [1e3, 1e4] {
        let cp = CircleParams::derive(&params, x).unwrap();
        let t0 = Instant::now();
        for which in [1usize, 2, 3] {
            let r = minor_arc_l2(&params, &cp, &table, which, &opts).unwrap();
            let bound = match which {
                1 | 2 => cp.eta * x * x.ln(),
                _ => cp.eta * x.powf(1.0 / 1.2) * x.ln().powi(3),
            };
            println!("X={x:>7} j={which}: value={:.4e} fitted={:.4}", r.value, r.value / bound);
        }
        let tt = trivial_arc_tail(&params, &cp, &table, &opts).unwrap();
        let ib_bound = x.powf(1.0 + 1.0 / 1.2) * x.ln() / cp.r;
        println!("X={x:>7}: trivial fitted = {:.4}/{:.4}, |I(t)|bound/shape = {:.4} ({:?})",
            tt.fitted[0], tt.fitted[1], tt.i_trivial_bound / ib_bound, t0.elapsed());
    }
}
