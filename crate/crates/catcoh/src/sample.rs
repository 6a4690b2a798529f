//! Seeded random sampling of scalars, cochains and gauges. All sampling is
//! deterministic given the seed, so property checks are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::category::FusionDatum;
use crate::complex::{tuples_lex, Cochain};
use crate::matrix::Mat;
use crate::scalar::{FieldSpec, Scalar};
use crate::tree::{channels, ParenTree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random scalar; over characteristic zero the numerators stay in
/// [-3, 3] to keep exact arithmetic cheap.
pub fn random_scalar(field: &FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        FieldSpec::Rational => field.from_i64(rng.gen_range(-3..=3)),
        FieldSpec::Prime(p) => field.from_i64(rng.gen_range(0..*p) as i64),
        FieldSpec::Cyclotomic(_) => {
            let base = field.from_i64(rng.gen_range(-2..=2));
            if rng.gen_bool(0.5) {
                let z = field.zeta().unwrap();
                base.add(&z.mul(&field.from_i64(rng.gen_range(-2..=2))))
            } else {
                base
            }
        }
    }
}

/// A nonzero random scalar (for gauges and twists).
pub fn random_unit(field: &FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let s = random_scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random cochain of the given degree with small entries.
pub fn random_cochain(datum: &FusionDatum, degree: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let lc = ParenTree::left_comb(degree);
    let rc = ParenTree::right_comb(degree);
    let mut out = Cochain::zero(degree);
    for tuple in tuples_lex(datum.rank(), degree) {
        let sc = channels(datum, &lc, &tuple);
        let tc = channels(datum, &rc, &tuple);
        let mut m = Mat::new(tc.len(), sc.len());
        for (si, s) in sc.iter().enumerate() {
            for (ti, t) in tc.iter().enumerate() {
                if s.total != t.total {
                    continue;
                }
                let v = random_scalar(&datum.field, rng);
                m.set(ti, si, v);
            }
        }
        out.set_component(tuple, m);
    }
    out
}

/// A random gauge beta: G x G -> K^x as a lookup table.
pub fn random_gauge(order: usize, field: &FieldSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Scalar>> {
    (0..order)
        .map(|_| (0..order).map(|_| random_unit(field, rng)).collect())
        .collect()
}
