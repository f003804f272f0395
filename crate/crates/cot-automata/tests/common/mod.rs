#![allow(dead_code)]

use cot_automata::automata::{Pfsa, Ppda, Ptm, TwoPda};
use cot_automata::equiv::{random_machine, Machine, MachineKind, SizeBounds};

pub fn pfsa(seed: u64) -> Pfsa {
    match random_machine(MachineKind::Pfsa, SizeBounds::default(), seed) {
        Machine::Pfsa(a) => a,
        _ => unreachable!(),
    }
}

pub fn ppda(seed: u64) -> Ppda {
    match random_machine(MachineKind::Ppda, SizeBounds::default(), seed) {
        Machine::Ppda(a) => a,
        _ => unreachable!(),
    }
}

pub fn twopda(seed: u64) -> TwoPda {
    match random_machine(MachineKind::TwoPda, SizeBounds::default(), seed) {
        Machine::TwoPda(a) => a,
        _ => unreachable!(),
    }
}

pub fn ptm(seed: u64) -> Ptm {
    match random_machine(MachineKind::Ptm, SizeBounds::default(), seed) {
        Machine::Ptm(a) => a,
        _ => unreachable!(),
    }
}

/// Every string over `n` symbols of length at most `max_len`, shortest first.
pub fn strings(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for y in 0..n {
                let mut t: Vec<usize> = s.clone();
                t.push(y);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
