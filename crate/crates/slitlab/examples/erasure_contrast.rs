//! The eraser contrast on a wider screen: without selection the two-cavity
//! which-slit detector keeps the screen fringe-free; selecting on the
//! plus-detector erases which-slit knowledge and the fringes reappear.
//!
//! ```bash
//! cargo run -p slitlab --example erasure_contrast
//! ```

use slitlab::families::eraser_instance;
use slitlab::interference::{classical_distribution, interference_term, screen_distribution};
use slitlab::screen::{build_screen, ScreenKind};

fn main() {
    let e = eraser_instance();
    let screen = build_screen(e.layout().dim1(), ScreenKind::Dft, e.layout().dim1())
        .expect("visible screen");
    let dim2 = e.decomp().dim2();

    let quantum = screen_distribution(&e.psi, &screen, dim2).unwrap();
    let classical = classical_distribution(&e.psi, &e.ws_property, &screen, dim2).unwrap();
    let unselected = interference_term(&e.psi, &e.ws_property, &screen, dim2, None).unwrap();
    let plus_selected = interference_term(
        &e.psi,
        &e.ws_property,
        &screen,
        dim2,
        Some(&e.plus_detector),
    )
    .unwrap();
    let ws_selected =
        interference_term(&e.psi, &e.ws_property, &screen, dim2, Some(&e.ws_detector)).unwrap();

    println!(
        "{:>4} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "bin", "quantum", "classical", "cross(none)", "cross(T+)", "cross(T)"
    );
    for b in 0..screen.n_bins() {
        println!(
            "{b:>4} {:>10.6} {:>10.6} {:>12.2e} {:>12.6} {:>12.2e}",
            quantum[b], classical[b], unselected[b], plus_selected[b], ws_selected[b]
        );
    }

    let max_plus = plus_selected.iter().map(|v| v.abs()).fold(0.0, f64::max);
    println!(
        "\nunselected and T-selected cross terms vanish; plus-selection revives them (max {max_plus:.3})"
    );
}
