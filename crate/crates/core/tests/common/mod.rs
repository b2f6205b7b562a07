#![allow(dead_code)]

use fourflip_core::{Instance, PenaltyWeights, Sense};
use rand::Rng;

/// Random instance with mixed senses; every column is nonempty and rows
/// without columns get `b = 0`.
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
    let senses = (0..m)
        .map(|_| match rng.random_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        })
        .collect();
    let rhs = row_len
        .iter()
        .map(|&len| if len == 0 { 0 } else { rng.random_range(0..=len.min(3)) })
        .collect();
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

/// Random set-covering instance (all rows `>= 1`).
pub fn random_cover(rng: &mut impl Rng, m: usize, n: usize, density: f64) -> Instance {
    loop {
        let mut columns = vec![Vec::new(); n];
        for col in columns.iter_mut() {
            while col.is_empty() {
                col.extend((0..m).filter(|_| rng.random_bool(density)));
            }
        }
        let costs = (0..n).map(|_| rng.random_range(1..=20) as f64).collect();
        if let Ok(inst) = Instance::from_columns(vec![Sense::Ge; m], vec![1; m], costs, columns) {
            return inst;
        }
    }
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

pub fn random_bits(rng: &mut impl Rng, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(p)).collect()
}
