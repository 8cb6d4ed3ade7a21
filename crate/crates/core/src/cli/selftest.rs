//! Randomized identity checks behind `tiltlab selftest`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{sha256_hex, Report};
use super::{Output, EXIT_INVARIANT, EXIT_OK};
use crate::bgengine::{abel_summation_check, strss_identity, HNFactor};
use crate::chern::{delta, twist_b, ChernCharacter};
use crate::error::{Error, Result};
use crate::exactform::RationalVector;
use crate::nsgeom::{hypersurface_surface, DivisorClass, NSLattice};
use crate::rational::{int, Rational};
use crate::stabkit::{stability_function_check, MockObject, StabilityPoint};

pub const SEED_VAR: &str = "TILTLAB_SEED";

fn seed() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|e| Error::Parse(format!("{SEED_VAR}={s}: {e}"))),
        Err(_) => Ok(0),
    }
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=4).into())
}

fn class(rng: &mut ChaCha8Rng, lat: &Arc<NSLattice>) -> DivisorClass {
    let coords = (0..lat.rank()).map(|_| small(rng)).collect();
    DivisorClass::new(lat, RationalVector::new(coords)).expect("rank matches")
}

fn character(rng: &mut ChaCha8Rng, lat: &Arc<NSLattice>, ranks: std::ops::RangeInclusive<i64>) -> ChernCharacter {
    let r = rng.gen_range(ranks);
    ChernCharacter::new(r, class(rng, lat), small(rng))
}

/// A factor on the degree-5 point (`H^2 = 5`, `B = 0`) of the requested
/// side, satisfying the corrected Bogomolov inequality when `ch0 > 0`.
fn factor(rng: &mut ChaCha8Rng, pt: &StabilityPoint, upper: bool) -> ChernCharacter {
    let lat = &pt.surface.lattice;
    let rank: i64 = if upper { rng.gen_range(0..=3) } else { rng.gen_range(1..=3) };
    let c: i64 = if upper { rng.gen_range(1..=6) } else { rng.gen_range(-6..=0) };
    let ch1 = DivisorClass::from_ints(lat, &[c]).expect("rank one");
    if rank == 0 {
        if c == 0 || rng.gen_bool(0.2) {
            let zero = DivisorClass::zero(lat);
            return ChernCharacter::new(0, zero, int(rng.gen_range(1..=4)));
        }
        return ChernCharacter::new(0, ch1, small(rng));
    }
    let r = int(rank);
    let bound = (ch1.square() + &pt.c_s * &r * &r) / (int(2) * &r);
    let ch2 = bound - Rational::new(rng.gen_range(0..=8).into(), 2.into());
    ChernCharacter::new(rank, ch1, ch2)
}

pub(crate) fn run(cases: usize, echo: String) -> Result<Output> {
    let seed = seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattices = [
        NSLattice::from_ints(&[&[5]])?,
        NSLattice::from_ints(&[&[0, 1], &[1, 0]])?,
        NSLattice::from_ints(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]])?,
    ];
    let quintic = hypersurface_surface(5, 5)?;
    let pt = StabilityPoint::new(&quintic, quintic.ample_h.clone(), DivisorClass::zero(&quintic.lattice), int(0))?;

    let mut failures = [0usize; 4];
    for i in 0..cases {
        let lat = &lattices[i % lattices.len()];

        let ch = character(&mut rng, lat, -3..=3);
        let b = class(&mut rng, lat);
        if delta(&twist_b(&ch, &b)?) != delta(&ch) {
            failures[0] += 1;
        }

        let (e1, e2) = (character(&mut rng, lat, 1..=4), character(&mut rng, lat, 1..=4));
        if !strss_identity(&e1, &e2, &small(&mut rng), None)?.identity_holds {
            failures[1] += 1;
        }

        let k = rng.gen_range(1..=8);
        let factors =
            (0..k).map(|_| HNFactor::new(rng.gen_range(1..=4), small(&mut rng))).collect::<Result<Vec<_>>>()?;
        if !abel_summation_check(&factors)?.equal {
            failures[2] += 1;
        }

        let shifted = (0..rng.gen_range(0..=2)).map(|_| factor(&mut rng, &pt, false)).collect();
        let mut upper: Vec<_> = (0..rng.gen_range(0..=2)).map(|_| factor(&mut rng, &pt, true)).collect();
        if upper.is_empty() {
            upper.push(factor(&mut rng, &pt, true));
        }
        let obj = MockObject::new(&pt, shifted, upper)?;
        if !stability_function_check(&obj, &pt)?.in_allowed_region {
            failures[3] += 1;
        }
    }

    let digest = sha256_hex(&[seed.to_string().as_bytes(), echo.as_bytes()]);
    let mut r = Report::new(echo, digest);
    r.result("seed", seed).result("cases", cases);
    let names = ["twist_invariance", "strss_identity", "abel_summation", "stability_function"];
    for (name, f) in names.iter().zip(failures) {
        r.verdict(*name, if f == 0 { "pass".to_string() } else { format!("FAIL ({f} counterexamples)") });
    }
    let code = if failures.iter().all(|&f| f == 0) { EXIT_OK } else { EXIT_INVARIANT };
    Ok(Output::Report(r, code))
}
