//! scratch: disk projection isotropy vs size and ray step (dev aid)
use uvt_core::phantom::{make_phantom, PhantomKind};
use uvt_core::radon::radon_forward;
use std::f64::consts::PI;

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn main() {
    for size in [256usize, 320] {
        let img = make_phantom(&PhantomKind::Disk, size).unwrap();
        let sino = radon_forward(&img, &[0.0, PI / 4.0, PI / 2.0, 1.1], size).unwrap();
        let p: Vec<&[f64]> = sino.projections().iter().map(|p| p.samples()).collect();
        println!(
            "S={size}: 0 vs pi/4 = {:.4}%  0 vs pi/2 = {:.4}%  0 vs 1.1 = {:.4}%",
            100.0 * rel_l2(p[0], p[1]),
            100.0 * rel_l2(p[0], p[2]),
            100.0 * rel_l2(p[0], p[3]),
        );
    }
}
