use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::eval::PenaltyWeights;
use crate::instance::{Instance, Sense};

/// Three rows, three columns, every column covering two rows, unit costs.
pub fn t1() -> Instance {
    Instance::from_rows(
        vec![Sense::Ge; 3],
        vec![1; 3],
        vec![1.0; 3],
        &[vec![0, 2], vec![0, 1], vec![1, 2]],
    )
    .unwrap()
}

/// Random mixed-sense instance with every column nonempty.
pub fn random_instance(rng: &mut impl Rng, m: usize, n: usize, density: f64, integer: bool) -> Instance {
    let mut columns = vec![Vec::new(); n];
    for col in columns.iter_mut() {
        while col.is_empty() {
            col.extend((0..m).filter(|_| rng.random_bool(density)));
        }
    }
    let mut row_len = vec![0u32; m];
    for col in &columns {
        for &i in col {
            row_len[i] += 1;
        }
    }
    let mut senses = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for &len in &row_len {
        let sense = match rng.random_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        let b = if len == 0 { 0 } else { rng.random_range(0..=len.min(3)) };
        senses.push(sense);
        rhs.push(b);
    }
    let costs = (0..n)
        .map(|_| {
            if integer {
                rng.random_range(0..=20) as f64
            } else {
                rng.random_range(0.0..20.0)
            }
        })
        .collect();
    Instance::from_columns(senses, rhs, costs, columns).unwrap()
}

pub fn random_weights(rng: &mut impl Rng, inst: &Instance, integer: bool) -> PenaltyWeights {
    let m = inst.num_rows();
    let mut draw = || {
        if integer {
            rng.random_range(1..=30) as f64
        } else {
            rng.random_range(0.5..30.0)
        }
    };
    let plus = (0..m).map(|_| draw()).collect();
    let minus = (0..m).map(|_| draw()).collect();
    PenaltyWeights::from_vecs(inst, plus, minus).unwrap()
}
