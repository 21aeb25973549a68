use rps_core::rps::derive_factors;
use rps_core::{SlotGrid, TimeQuantum, TrafficSpec, DEFAULT_GAMMA};

#[test]
fn jdv_debug() {
    let g = SlotGrid::new(TimeQuantum::new(0), TimeQuantum::new(382)).unwrap();
    let t = TrafficSpec::new(TimeQuantum::new(4402), TimeQuantum::new(11762), 200).unwrap();
    let r = derive_factors(&t, &g, DEFAULT_GAMMA);
    eprintln!("result: {:?}", r.map(|tp| tp.levels().to_vec()));
}
