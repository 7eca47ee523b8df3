//! Seeded generators of cubical and recursive Toda systems.
//!
//! Maps are chosen with zero composites on homology (and a random null part).
//! Solved nullhomotopies of the top order are perturbed by a random class, so
//! the brackets are often essential; lower ones get a null perturbation.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bridge::{replace_system, v};
use crate::chain::{cone_block_offsets, ChainComplex, DirectSum, cone_structure, ChainMap, ConeTower, Contraction, Cx, GradedMap};
use crate::cubes::full;
use crate::linalg::Matrix;
use crate::random::{random_complex, random_cycle, random_graded, random_matrix, Rand};
use crate::toda_cubical::CubicalTodaSystem;
use crate::toda_recursive::RecursiveTodaSystem;

const ATTEMPTS: usize = 200;

/// Random objects in degrees `0..=2`: a random complex with at most
/// `max_dim` per degree plus a sphere in each degree, so homology is
/// nonzero throughout.
pub fn random_objects(r: &mut Rand, p: u32, count: usize, max_dim: usize) -> Vec<Cx> {
    (0..count)
        .map(|_| {
            let mut parts: Vec<Cx> = vec![Arc::new(random_complex(r, p, 0, 3, max_dim))];
            parts.extend((0..3).map(|k| Arc::new(ChainComplex::sphere(p, k))));
            DirectSum::new(p, parts).object
        })
        .collect()
}

/// Maps `X_1 -> ... -> X_{N+1}` whose consecutive composites vanish on
/// homology: each map on homology kills the image of the previous one.
pub fn exact_maps(r: &mut Rand, objects: &[Cx]) -> Vec<ChainMap> {
    let cs: Vec<Contraction> = objects.iter().map(Contraction::new).collect();
    let p = objects[0].p();
    let mut prev: BTreeMap<i32, Matrix> = BTreeMap::new();
    let mut out = Vec::new();
    for i in 0..objects.len() - 1 {
        let (x, y) = (&objects[i], &objects[i + 1]);
        let mut on_h: BTreeMap<i32, Matrix> = BTreeMap::new();
        for n in x.degrees() {
            let (hx, hy) = (cs[i].homology_dim(n), cs[i + 1].homology_dim(n));
            let m = match prev.get(&n) {
                // rows of q span the functionals killing im(prev)
                Some(pm) => {
                    let q = pm.transpose().kernel().transpose();
                    random_matrix(r, p, hy, q.rows()).mul(&q)
                }
                None => random_matrix(r, p, hy, hx),
            };
            on_h.insert(n, m);
        }
        let base = GradedMap::from_fn(x, y, 0, |n| cs[i + 1].iota(n).mul(&on_h[&n]).mul(&cs[i].pi(n)))
            .expect("shapes");
        out.push(base.add(&random_graded(r, x, y, 1).boundary()));
        prev = on_h;
    }
    out
}

/// The chain map `C^k X -> Y` equal to `top` on the top block and zero
/// elsewhere; a chain map when `top` is a cycle that factors through homology.
pub fn top_extension(t: &ConeTower, k: usize, top: &GradedMap) -> ChainMap {
    let x = t.base();
    let ck = t.get(k);
    let y = top.target();
    let p = x.p();
    GradedMap::from_fn(ck, y, 0, |n| {
        let off = cone_block_offsets(x, k, n);
        let mut m = Matrix::zeros(p, y.dim(n), ck.dim(n));
        let src = n - k as i32;
        if x.dim(src) > 0 && y.dim(n) > 0 {
            m.set_block(0, off[full(k)], &top.comp(src));
        }
        m
    })
    .expect("top block extension")
}

/// A complete cubical system of the given order and length, solved stage
/// by stage with random perturbations; retries when a stage is obstructed.
pub fn random_cubical(r: &mut Rand, p: u32, order: usize, length: usize, max_dim: usize) -> CubicalTodaSystem {
    'retry: for _ in 0..ATTEMPTS {
        let objects = random_objects(r, p, length + 1, max_dim);
        let maps = exact_maps(r, &objects);
        let mut s = CubicalTodaSystem::new(order, objects, maps, BTreeMap::new()).expect("shapes");
        for k in 1..=order {
            for j in 1..=length - k {
                let Some(f) = s.solve_next_nullhomotopy(k, j).expect("in range") else { continue 'retry };
                // an essential class only on top, so lower brackets stay null
                let bump = if k == order {
                    random_cycle(r, s.x(j), s.x(j + k + 1), k as i32)
                } else {
                    random_graded(r, s.x(j), s.x(j + k + 1), k as i32 + 1).boundary()
                };
                let f = f.add(&top_extension(s.tower(j), k, &bump));
                s.set(k, j, f).expect("solved nullhomotopy");
            }
        }
        return s;
    }
    panic!("no unobstructed cubical system after {ATTEMPTS} attempts");
}

/// A strongly cofibrant cubical system: the replacement of [`random_cubical`].
pub fn random_cofibrant_cubical(r: &mut Rand, p: u32, order: usize, length: usize, max_dim: usize) -> CubicalTodaSystem {
    replace_system(&random_cubical(r, p, order, length, max_dim)).expect("replacement").0
}

/// A complete recursive system; each `F̃^(m)_j` is a solved extension plus
/// a random class `Σ̃^m X_j -> cof` composed with the collapse.
pub fn random_recursive(r: &mut Rand, p: u32, order: usize, length: usize, max_dim: usize) -> RecursiveTodaSystem {
    'retry: for _ in 0..ATTEMPTS {
        let objects = random_objects(r, p, length + 1, max_dim);
        let maps = exact_maps(r, &objects);
        let mut s = RecursiveTodaSystem::new(order, objects, maps, BTreeMap::new()).expect("shapes");
        for m in 1..=order {
            for j in 1..=length - m {
                let Some(f) = s.solve_next_nullhomotopy(m, j).expect("in range") else { continue 'retry };
                let a = s.alpha(m - 1, j).expect("lower stage").clone();
                let collapse = cone_structure(a.source()).r().clone();
                let bump = if m == order {
                    random_cycle(r, collapse.target(), f.target(), 0)
                } else {
                    random_graded(r, collapse.target(), f.target(), 1).boundary()
                };
                let f = f.add(&bump.after(&collapse).retarget(f.source(), f.target()).expect("cone"));
                s.set(m, j, f).expect("solved nullhomotopy");
            }
        }
        return s;
    }
    panic!("no unobstructed recursive system after {ATTEMPTS} attempts");
}

/// A recursive system with injective tower maps: `V` of a strongly
/// cofibrant cubical system.
pub fn random_cofibrant_recursive(r: &mut Rand, p: u32, order: usize, length: usize, max_dim: usize) -> RecursiveTodaSystem {
    v(&random_cofibrant_cubical(r, p, order, length, max_dim)).expect("reduction")
}
