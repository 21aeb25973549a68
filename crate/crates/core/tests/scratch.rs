use rps_core::rps::{derive_alignment_chain, derive_root};
use rps_core::{SlotGrid, TimeQuantum, TrafficSpec};

fn phi(m: i64, t1: i64, t2: i64, t3: i64) -> i64 {
    // levels: p0=3 q0=-1 t0=2; p1=3 q1=-1; p2=22 q2=+1; p3=353 q3=+1
    let phi3 = (353 - t3 + m).div_euclid(353);
    let phi2 = (22 - t2 + m - phi3).div_euclid(22);
    let phi1 = (3 - t1 + m + phi2).div_euclid(3); // - q1*phi2 with q1 = -1
    2 + (m - 1) * 3 - phi1
}

fn theta(m: i64, t1: i64, t2: i64, t3: i64) -> i64 {
    (phi(m, t1, t2, t3) - 1) * 353 - 197 - (m - 1) * 936
}

fn valid_up_to(horizon: i64, t1: i64, t2: i64, t3: i64) -> Option<i64> {
    (1..=horizon).find(|&m| {
        let th = theta(m, t1, t2, t3);
        !(0..353).contains(&th)
    })
}

#[test]
fn debug_case() {
    let (w, p, tau) = (353i64, 936i64, 197i64);
    let g = SlotGrid::new(TimeQuantum::new(0), TimeQuantum::new(w)).unwrap();
    let t = TrafficSpec::new(TimeQuantum::new(tau), TimeQuantum::new(p), 200).unwrap();
    let root = derive_root(t.period(), &g).unwrap();
    let chain = derive_alignment_chain(root.gradient, g.slot_width()).unwrap();
    println!("root {root:?} chain p={:?} q={:?} d={:?}", chain.periods, chain.directions, chain.gradients);

    // Does any t3 work with (t1, t2) = (3, 17)?
    let horizon = 30_000;
    let works: Vec<i64> = (1..=800).filter(|&t3| valid_up_to(horizon, 3, 17, t3).is_none()).collect();
    println!("t3 candidates valid to {horizon} with (3,17): {works:?}");

    // Joint fit over (t2, t3).
    let mut found = Vec::new();
    for t2 in 1..=60 {
        for t3 in 1..=800 {
            if valid_up_to(horizon, 3, t2, t3).is_none() {
                found.push((t2, t3));
            }
        }
    }
    println!("joint (t2, t3) fits with t1=3: {:?}", &found[..found.len().min(20)]);

    // And over (t1, t2, t3) if needed.
    if found.is_empty() {
        let mut any = Vec::new();
        for t1 in 1..=12 {
            for t2 in 1..=60 {
                for t3 in (1..=800).step_by(1) {
                    if valid_up_to(horizon, t1, t2, t3).is_none() {
                        any.push((t1, t2, t3));
                        if any.len() > 10 { break; }
                    }
                }
            }
        }
        println!("triple fits: {:?}", &any[..any.len().min(20)]);
    }
}
