use monofact::factorizer::factorize;
use monofact::testkit::{gen_random_triple, GeneratorConfig};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let mut total_ops = 0usize;
    let mut max_ops = 0usize;
    let mut slow = 0usize;
    for idx in 0..500u64 {
        let n = 1 + (idx % 6) as usize;
        let steps = (idx % 41) as usize;
        let seed = 1000 + idx;
        let cfg = GeneratorConfig::new(n, steps, seed).with_entry_cap(50);
        let t = gen_random_triple(&cfg).unwrap();
        let ti = Instant::now();
        let s = factorize(&t).unwrap();
        let ms = ti.elapsed().as_millis();
        total_ops += s.len();
        max_ops = max_ops.max(s.len());
        if ms > 500 { slow += 1; eprintln!("idx {idx} (n={n}, steps={steps}): {} ops, {} ms", s.len(), ms); }
    }
    eprintln!("total: {:?}; total ops {}, max script {}, slow>500ms: {}", t0.elapsed(), total_ops, max_ops, slow);
}
