use freefield_sl2::scalars::verify_x_identity;
fn main() {
    let t0 = std::time::Instant::now();
    for n in 0..=8 {
        for m in 0..=8 {
            if n + m == 0 { continue; }
            let r = verify_x_identity(n, m);
            assert!(r.passed(), "fail at {} {}", n, m);
        }
    }
    println!("sweep ok in {:?}", t0.elapsed());
}
