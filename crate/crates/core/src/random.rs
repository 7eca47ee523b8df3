//! Seeded random complexes and maps, used by the generators and the tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainComplex, ChainMap, Contraction, Cx, DirectSum, GradedMap};
use crate::linalg::Matrix;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut Rand, p: u32, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(p, rows, cols, |_, _| rng.gen_range(0..p))
}

pub fn random_invertible(rng: &mut Rand, p: u32, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, p, n, n);
        if m.rank() == n {
            return m;
        }
    }
}

/// A complex in degrees `lo..lo+len` with at most `max_dim` per degree,
/// built from a split form (boundaries, homology, complement) and then
/// conjugated by random changes of basis.
pub fn random_complex(rng: &mut Rand, p: u32, lo: i32, len: usize, max_dim: usize) -> ChainComplex {
    if len == 0 {
        return ChainComplex::zero(p);
    }
    // c[k] = dimension of the complement in degree lo+k, mapped onto the
    // boundaries of degree lo+k-1
    let mut c = vec![0usize; len];
    let mut h = vec![0usize; len];
    for k in 0..len {
        let room = max_dim.saturating_sub(c[k]);
        if k + 1 < len {
            c[k + 1] = rng.gen_range(0..=room.min(max_dim / 2));
        }
        let used = c[k] + if k + 1 < len { c[k + 1] } else { 0 };
        h[k] = rng.gen_range(0..=max_dim.saturating_sub(used).min(2));
    }
    let dims: Vec<usize> = (0..len).map(|k| c[k] + h[k] + if k + 1 < len { c[k + 1] } else { 0 }).collect();
    let basis: Vec<Matrix> = dims.iter().map(|&n| random_invertible(rng, p, n)).collect();
    let mut ds = Vec::new();
    for k in 1..len {
        // split coordinates in degree n: [boundaries | homology | complement]
        let mut d = Matrix::zeros(p, dims[k - 1], dims[k]);
        for t in 0..c[k] {
            d.set(t, dims[k] - c[k] + t, 1);
        }
        let inv = basis[k].inverse().expect("invertible");
        ds.push(basis[k - 1].mul(&d).mul(&inv));
    }
    ChainComplex::new(p, lo, dims, ds).expect("split complex")
}

pub fn random_graded(rng: &mut Rand, x: &Cx, y: &Cx, shift: i32) -> GradedMap {
    let p = x.p();
    let comps: Vec<Matrix> = x.degrees().map(|n| random_matrix(rng, p, y.dim(n + shift), x.dim(n))).collect();
    GradedMap::from_fn(x, y, shift, |n| comps[(n - x.lo()) as usize].clone()).expect("shapes")
}

/// A random graded map of the given shift that factors through homology,
/// so it commutes with `d` up to the sign convention of any shift.
pub fn random_cycle(rng: &mut Rand, x: &Cx, y: &Cx, shift: i32) -> GradedMap {
    let cx = Contraction::new(x);
    let cy = Contraction::new(y);
    let p = x.p();
    let comps: Vec<Matrix> = x
        .degrees()
        .map(|n| {
            let r = random_matrix(rng, p, cy.homology_dim(n + shift), cx.homology_dim(n));
            cy.iota(n + shift).mul(&r).mul(&cx.pi(n))
        })
        .collect();
    GradedMap::from_fn(x, y, shift, |n| comps[(n - x.lo()) as usize].clone()).expect("shapes")
}

/// A random chain map: a random map on homology plus a random null map.
pub fn random_map(rng: &mut Rand, x: &Cx, y: &Cx) -> ChainMap {
    let base = random_cycle(rng, x, y, 0);
    let a = random_graded(rng, x, y, 1);
    base.add(&a.boundary())
}

/// A random degreewise injective map out of `x`, into `Z ⊕ CX`.
pub fn random_injection(rng: &mut Rand, x: &Cx) -> ChainMap {
    let p = x.p();
    let (lo, hi) = if x.is_zero() { (0, 0) } else { (x.lo(), x.hi()) };
    let z: Cx = random_complex(rng, p, lo, (hi - lo + 1) as usize, 3).into();
    let g = random_map(rng, x, &z);
    let cx = crate::chain::cone(x);
    let sum = DirectSum::new(p, vec![z, cx]);
    let i = crate::chain::cone_inclusion(x);
    sum.pair(x, &[&g, &i]).expect("pair")
}
