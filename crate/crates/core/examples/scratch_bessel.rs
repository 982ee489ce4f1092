//! scratch: compare both ln_i0 branches to reference values (dev aid)
fn series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0f64;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-18 { break; }
        k += 1.0;
    }
    sum.ln()
}
fn asym(x: f64) -> f64 {
    let r = 1.0 / (8.0 * x);
    let corr = 1.0 + r * (1.0 + r * (4.5 + r * (37.5 + r * (459.375 + r * 7441.875))));
    x - 0.5 * (std::f64::consts::TAU * x).ln() + corr.ln()
}
fn main() {
    let refs = [
        (29.999999, 27.38470044998238),
        (30.000001, 27.38470241636149),
        (30.0, 27.38470143317194),
        (50.0, 47.12757550187180),
    ];
    for (x, r) in refs {
        println!("x={x}: series err {:+.3e}  asym err {:+.3e}", series(x) - r, asym(x) - r);
    }
}
