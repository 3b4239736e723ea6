// which component of the unit-pair loop emits how many ops, per level
use monofact::factorizer::{
    collapse_first_column, project_quadruple, reduce_beta_once, ActiveIndexFrame, Quadruple,
    make_unit_pair,
};
use monofact::scalar::RadicalScalar;
use monofact::testkit::{gen_random_triple, GeneratorConfig};
use monofact::triple::Triple;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

fn unit_pair_profile(t: &Triple<RadicalScalar>, frame: &ActiveIndexFrame) {
    let pivot = frame.pivot_row();
    let live = frame.live_cols().to_vec();
    let mut cur = t.clone();
    let mut round = 0;
    loop {
        round += 1;
        let (frag, next) = collapse_first_column(&cur, frame).unwrap();
        eprintln!("  round {round}: collapse {} ops (maxA {})", frag.len(), next.a().max_abs_entry());
        cur = next;
        let nz: Vec<(usize, BigInt)> = live
            .iter()
            .filter_map(|&c| {
                let b = cur.b_entry(c, pivot).clone();
                (!b.is_zero()).then_some((c, b))
            })
            .collect();
        match nz.len() {
            1 => {
                eprintln!("  single-nonzero path; w = {:?}", cur.w().iter().map(|x| format!("{x}")).collect::<Vec<_>>());
                return;
            }
            2 => {
                let beta = cur.beta_in_col(pivot);
                if beta == 1u32.into() {
                    eprintln!("  done at round {round}");
                    return;
                }
                let (pos, neg) = if nz[0].1.is_positive() {
                    (nz[0].0, nz[1].0)
                } else {
                    (nz[1].0, nz[0].0)
                };
                let (frag, next) = reduce_beta_once(&cur, frame, pos, neg).unwrap();
                eprintln!(
                    "  round {round}: dance {} ops, beta {} -> {} (maxA {})",
                    frag.len(),
                    beta,
                    next.beta_in_col(pivot),
                    next.a().max_abs_entry()
                );
                cur = next;
            }
            k => {
                eprintln!("  {k} nonzeros?!");
                return;
            }
        }
    }
}

fn main() {
    let idx: u64 = std::env::args().nth(1).unwrap().parse().unwrap();
    let n0 = 1 + (idx % 6) as usize;
    let steps = (idx % 41) as usize;
    let cfg = GeneratorConfig::new(n0, steps, 1000 + idx).with_entry_cap(50);
    let mut t = gen_random_triple(&cfg).unwrap();
    for depth in 0..n0 {
        let n = t.n();
        if t.a().is_identity() || n <= 2 {
            eprintln!("depth {depth}: base n={n} maxA={}", t.a().max_abs_entry());
            break;
        }
        let pivot_row = (1..=n)
            .min_by_key(|&r| {
                let beta = t.beta_in_col(r);
                let nz = (1..=n).filter(|&c| !t.b_entry(c, r).is_zero()).count();
                (beta, nz, r)
            })
            .unwrap();
        let mut live_rows = vec![pivot_row];
        live_rows.extend((1..=n).filter(|&x| x != pivot_row));
        let frame = ActiveIndexFrame::new(live_rows, (1..=n).collect()).unwrap();
        eprintln!(
            "depth {depth}: n={n} maxA={} pivot r={pivot_row} beta_r={}",
            t.a().max_abs_entry(),
            t.beta_in_col(pivot_row)
        );
        unit_pair_profile(&t, &frame);
        let (_, after, p, k) = make_unit_pair(&t, &frame).unwrap();
        let quad = Quadruple::new(after, p, pivot_row, k).unwrap();
        let (sub, _) = project_quadruple(&quad).unwrap();
        t = sub;
    }
}
