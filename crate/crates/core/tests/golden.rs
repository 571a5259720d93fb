//! 512-bit pole goldens for the `piecewise-sextic` preset.
//!
//! Regenerate with `cargo test -p cauchy-approx --test golden -- --ignored`.

mod common;

use cauchy_approx::kernel::context::PrecisionContext;
use common::*;

#[test]
#[ignore]
fn regenerate_sextic_pole_goldens() {
    let ctx = PrecisionContext::new(512).unwrap();
    let pade = sextic_pade_poles(RING_NS, &ctx);
    write_poles(&golden_path("sextic_pade_poles.csv"), &pade, "piecewise-sextic classical Pade poles, 512 bits");
    let aak = sextic_aak_poles(RING_NS, &ctx);
    write_poles(&golden_path("sextic_aak_poles.csv"), &aak, "piecewise-sextic AAK poles, 512 bits, adaptive truncation");
}

#[test]
fn goldens_cover_the_ring_range() {
    for name in ["sextic_pade_poles.csv", "sextic_aak_poles.csv"] {
        let g = read_poles(&golden_path(name));
        for n in RING_NS {
            assert_eq!(g.get(&n).map(|p| p.len()), Some(n), "{name} at n = {n}");
        }
    }
}
