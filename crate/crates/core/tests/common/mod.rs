#![allow(dead_code)]

use num_complex::Complex64;
use ssmp::mellin::TimeChange;
use ssmp::{BernsteinFunction, WienerHopfPair};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Every library Bernstein function with representative parameters.
pub fn library() -> Vec<BernsteinFunction> {
    let example = WienerHopfPair::stable_example(1.5, 0.4, 0.6).unwrap();
    let brownian = WienerHopfPair::brownian();
    vec![
        BernsteinFunction::identity(),
        BernsteinFunction::affine(2.0, 0.5).unwrap(),
        BernsteinFunction::compound_poisson(0.5, 1.0, 2.0, 1.5).unwrap(),
        BernsteinFunction::compound_poisson(0.0, 0.0, 2.0, 1.0).unwrap(),
        BernsteinFunction::gamma_ratio(1.5, 0.7, 0.2).unwrap(),
        BernsteinFunction::stable_subordinator(0.5).unwrap(),
        BernsteinFunction::stable_subordinator(0.8).unwrap(),
        BernsteinFunction::power(1.3, 0.6).unwrap(),
        BernsteinFunction::affine(1.0, 1.0).unwrap().s_transform().unwrap(),
        example.minus.clone(),
        example.plus.clone(),
        example.plus.s_transform().unwrap(),
        brownian.plus.clone(),
    ]
}

/// Pairs in class N with the time changes used in the product-formula checks.
pub fn models() -> Vec<(WienerHopfPair, TimeChange)> {
    let example = WienerHopfPair::stable_example(1.5, 0.4, 0.6).unwrap();
    let poisson = WienerHopfPair::poisson_pair(1.0, 0.5, 1.0, 0.8, 2.0).unwrap();
    vec![
        (WienerHopfPair::brownian(), TimeChange::stable(0.5).unwrap()),
        (WienerHopfPair::brownian(), TimeChange::identity()),
        (example.clone(), TimeChange::stable(0.7).unwrap()),
        (
            example.clone(),
            TimeChange::from_phi_beta(example.plus.s_transform().unwrap(), 0.5).unwrap(),
        ),
        (
            poisson,
            TimeChange::new(&BernsteinFunction::compound_poisson(0.0, 1.0, 0.5, 2.0).unwrap(), 1.0).unwrap(),
        ),
    ]
}
