//! Images of rational points under `x -> (log|x - a_i|)_i` lie on the
//! tropicalization. When `p` exceeds the number of points every residue disc
//! at a branch point has a rational point, so every vertex is reached.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropdol::curve::ExtendedPoint;
use tropdol::{from_padic_points, tropicalize_direct, LogValue, Q};

/// p-adic valuation of a nonzero integer by repeated division.
fn val_int(mut n: i64, p: i64) -> i64 {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

fn log_abs(x: Q, p: i64) -> LogValue {
    if x == Q::from_integer(0) {
        LogValue::NegInf
    } else {
        LogValue::Finite(Q::from_integer(val_int(*x.denom(), p) - val_int(*x.numer(), p)))
    }
}

fn power(p: i64, k: i64) -> Q {
    if k >= 0 {
        Q::from_integer(p.pow(k as u32))
    } else {
        Q::new(1, p.pow((-k) as u32))
    }
}

#[test]
fn images_of_points_lie_on_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2i64, 3, 5, 7] {
        for _ in 0..25 {
            let n = rng.gen_range(1..=5);
            let mut pts: Vec<Q> = Vec::new();
            while pts.len() < n {
                let x = Q::new(rng.gen_range(-60..60), rng.gen_range(1..4));
                if !pts.contains(&x) {
                    pts.push(x);
                }
            }
            let c = tropicalize_direct(&from_padic_points(p, &pts).unwrap()).unwrap();
            let mut hit = BTreeSet::new();
            for a in &pts {
                for k in -3..=5 {
                    for u in 0..(p * p) {
                        let x = a + power(p, k) * Q::from_integer(u);
                        let image = ExtendedPoint(pts.iter().map(|b| log_abs(x - b, p)).collect());
                        assert!(c.contains(&image), "p {p} points {pts:?}: image {image:?} of {x} is off the curve");
                        if let Some(v) = c.vertex_by_coords(&image) {
                            hit.insert(v);
                        }
                    }
                }
            }
            if p <= n as i64 {
                continue;
            }
            for v in 0..c.vertices().len() {
                assert!(hit.contains(&v), "p {p} points {pts:?}: vertex {v} never reached");
            }
        }
    }
}
