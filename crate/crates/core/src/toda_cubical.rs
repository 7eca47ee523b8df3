//! Cubical Toda systems: maps `f_j` with coherent higher nullhomotopies
//! `F^(k)_j : C^k X_j -> X_{j+k+1}` on iterated cones, their cube encodings
//! and the cubical bracket value.

use std::collections::BTreeMap;

use crate::chain::{
    cone_block_offsets, cone_map_between, cone_map_iter, solve_graded_homotopy, ChainMap, ConeTower, Cx, GradedMap,
};
use crate::cubes::{
    bit, colimit, cone_cube, cube_c_with, deg, full, hcof_n, hcof_n_map, hcof_prime, init, is_strongly_cofibrant,
    r_k, Arrow, Certificate, CubeDiagram, CubeMorphism, Diagram,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `δ_k : C^{m-1}X -> C^m X`.
pub fn delta_k(x: &Cx, m: usize, k: usize) -> Result<ChainMap> {
    if k == 0 || k > m {
        return Err(Error::OutOfRange(format!("δ_{k} on C^{m}")));
    }
    Ok(ConeTower::new(x, m).delta(m, k))
}

/// `d_k(F) = F ∘ δ_k` for `F : C^m X -> Y`, with `t` a cone tower on `X`.
pub fn d_k(t: &ConeTower, f: &ChainMap, m: usize, k: usize) -> Result<ChainMap> {
    if k == 0 || k > m || m > t.height() {
        return Err(Error::OutOfRange(format!("d_{k} on maps out of C^{m}")));
    }
    if f.source() != t.get(m) {
        return Err(Error::Dimension(format!("map does not start at C^{m}")));
    }
    Ok(fit(f, t.get(m), f.target()).after(&t.delta(m, k)))
}

/// The same matrices, re-homed on equal complexes.
pub(crate) fn fit(f: &ChainMap, source: &Cx, target: &Cx) -> ChainMap {
    debug_assert!(f.source() == source && f.target() == target);
    f.retarget(source, target).expect("equal complexes")
}

/// Which construction a bracket value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketSource {
    /// `L^n X_1`, the colimit of the punctured cube of cones.
    Cubical(usize),
    /// `Σ̃^n X_1`.
    Recursive(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketValue {
    pub source: BracketSource,
    pub map: ChainMap,
}

/// An `m`-th order cubical Toda system over `X_1 -> ... -> X_{N+1}`.
/// Indices `j` are 1-based as in the usual notation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalTodaSystem {
    order: usize,
    towers: Vec<ConeTower>,
    maps: Vec<ChainMap>,
    nullhomotopies: BTreeMap<(usize, usize), ChainMap>,
}

/// One failed equation: `(k, j, r)` with `d_r(F^(k)_j) - F^(k-r)_{j+r} ∘ C^{k-r}(F^(r-1)_j)`.
/// `r = 0` marks a nullhomotopy that is not a chain map, with its commutator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationFailure {
    pub k: usize,
    pub j: usize,
    pub r: usize,
    pub difference: GradedMap,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<EquationFailure>,
    pub missing: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.missing.is_empty()
    }
}

impl CubicalTodaSystem {
    /// Checks shapes only; the face equations are checked by [`validate`](Self::validate).
    pub fn new(
        order: usize,
        objects: Vec<Cx>,
        maps: Vec<ChainMap>,
        nullhomotopies: BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<CubicalTodaSystem> {
        if objects.len() != maps.len() + 1 {
            return Err(Error::Dimension("need one more object than maps".into()));
        }
        if order + 2 > maps.len() && order > 0 && maps.len() < order + 1 {
            return Err(Error::InvalidSystem(format!("order {order} needs at least {} maps", order + 1)));
        }
        let p = objects[0].p();
        let towers: Vec<ConeTower> = objects.iter().map(|x| ConeTower::new(x, order + 1)).collect();
        let mut fitted = Vec::with_capacity(maps.len());
        for (i, f) in maps.iter().enumerate() {
            if f.p() != p || f.shift() != 0 || f.source() != &objects[i] || f.target() != &objects[i + 1] {
                return Err(Error::Dimension(format!("f_{} is not a map X_{} -> X_{}", i + 1, i + 1, i + 2)));
            }
            if !f.commutes_with_d() {
                return Err(Error::NotChainMap(format!("f_{}", i + 1)));
            }
            fitted.push(fit(f, &objects[i], &objects[i + 1]));
        }
        let mut s = CubicalTodaSystem { order, towers, maps: fitted, nullhomotopies: BTreeMap::new() };
        for ((k, j), f) in nullhomotopies {
            s.set(k, j, f)?;
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of maps `N`.
    pub fn length(&self) -> usize {
        self.maps.len()
    }

    pub fn p(&self) -> u32 {
        self.x(1).p()
    }

    pub fn x(&self, j: usize) -> &Cx {
        self.towers[j - 1].base()
    }

    pub fn objects(&self) -> Vec<Cx> {
        self.towers.iter().map(|t| t.base().clone()).collect()
    }

    pub fn tower(&self, j: usize) -> &ConeTower {
        &self.towers[j - 1]
    }

    pub fn f(&self, j: usize) -> &ChainMap {
        &self.maps[j - 1]
    }

    pub fn maps(&self) -> &[ChainMap] {
        &self.maps
    }

    pub fn nullhomotopies(&self) -> &BTreeMap<(usize, usize), ChainMap> {
        &self.nullhomotopies
    }

    /// Whether `F^(k)_j` belongs to a system of this order and length.
    pub fn in_range(&self, k: usize, j: usize) -> bool {
        k >= 1 && k <= self.order && j >= 1 && j + k <= self.length()
    }

    /// `F^(k)_j`, with `F^(0)_j = f_j`.
    pub fn get(&self, k: usize, j: usize) -> Result<&ChainMap> {
        if k == 0 {
            return self.maps.get(j.wrapping_sub(1)).ok_or_else(|| Error::OutOfRange(format!("f_{j}")));
        }
        self.nullhomotopies.get(&(k, j)).ok_or_else(|| Error::OutOfRange(format!("F^({k})_{j} is not present")))
    }

    pub fn set(&mut self, k: usize, j: usize, f: ChainMap) -> Result<()> {
        if !self.in_range(k, j) {
            return Err(Error::OutOfRange(format!("F^({k})_{j} in an order-{} system of length {}", self.order, self.length())));
        }
        let src = self.tower(j).get(k);
        let tgt = self.x(j + k + 1);
        if f.shift() != 0 || f.source() != src || f.target() != tgt {
            return Err(Error::Dimension(format!("F^({k})_{j} must be a map C^{k}X_{j} -> X_{}", j + k + 1)));
        }
        let f = fit(&f, src, tgt);
        self.nullhomotopies.insert((k, j), f);
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.expected().all(|kj| self.nullhomotopies.contains_key(&kj))
    }

    fn expected(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.order).flat_map(move |k| (1..=self.length().saturating_sub(k)).map(move |j| (k, j)))
    }

    /// `F^(k-r)_{j+r} ∘ C^{k-r}(F^(r-1)_j) : C^{k-1}X_j -> X_{j+k+1}`, the
    /// prescribed value of `d_r(F^(k)_j)`.
    pub fn face_target(&self, k: usize, j: usize, r: usize) -> Result<ChainMap> {
        let inner = self.get(r - 1, j)?;
        let outer = self.get(k - r, j + r)?;
        let c = cone_map_iter(inner, k - r);
        let c = fit(&c, self.tower(j).get(k - 1), self.tower(j + r).get(k - r));
        Ok(outer.after(&c))
    }

    /// Checks every face equation as an exact matrix identity.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (k, j) in self.expected() {
            let Some(f) = self.nullhomotopies.get(&(k, j)) else {
                report.missing.push((k, j));
                continue;
            };
            if !f.commutes_with_d() {
                report.failures.push(EquationFailure { k, j, r: 0, difference: f.commutator() });
            }
            for r in 1..=k {
                let lhs = f.after(&self.tower(j).delta(k, r));
                match self.face_target(k, j, r) {
                    Ok(rhs) if rhs == lhs => {}
                    Ok(rhs) => report.failures.push(EquationFailure { k, j, r, difference: lhs.sub(&rhs) }),
                    Err(_) => {}
                }
            }
        }
        report
    }

    fn require_valid(&self) -> Result<()> {
        let rep = self.validate();
        if let Some((k, j)) = rep.missing.first() {
            return Err(Error::InvalidSystem(format!("F^({k})_{j} is missing")));
        }
        if let Some(e) = rep.failures.first() {
            return Err(Error::InvalidSystem(format!("face equation (k, j, r) = ({}, {}, {}) fails", e.k, e.j, e.r)));
        }
        Ok(())
    }

    /// Solves for `F^(k)_j` given all lower data: the non-top blocks are
    /// forced by the face equations and the top block solves a homotopy
    /// equation. `Ok(None)` means the obstruction class is nonzero.
    pub fn solve_next_nullhomotopy(&self, k: usize, j: usize) -> Result<Option<ChainMap>> {
        if !self.in_range(k, j) {
            return Err(Error::OutOfRange(format!("F^({k})_{j}")));
        }
        let faces: Vec<ChainMap> = (1..=k).map(|r| self.face_target(k, j, r)).collect::<Result<_>>()?;
        solve_on_cone(self.tower(j), k, self.x(j + k + 1), &faces)
    }

    /// Fills every missing nullhomotopy in order of `k`.
    pub fn complete(&mut self) -> Result<Option<()>> {
        let todo: Vec<(usize, usize)> = self.expected().collect();
        for (k, j) in todo {
            if self.nullhomotopies.contains_key(&(k, j)) {
                continue;
            }
            match self.solve_next_nullhomotopy(k, j)? {
                Some(f) => self.set(k, j, f)?,
                None => return Ok(None),
            }
        }
        Ok(Some(()))
    }

    /// `ℂ^(m) X_j`.
    pub fn build_c(&self, m: usize, j: usize) -> CubeDiagram {
        cube_c_with(self.tower(j), m)
    }

    fn check_cube_range(&self, m: usize, j: usize, top: usize) -> Result<()> {
        if m > self.order || j == 0 || top > self.length() + 1 {
            return Err(Error::OutOfRange(format!("cube (m, j) = ({m}, {j})")));
        }
        Ok(())
    }

    /// `M^(m)_j(a) = C^{deg a - init a} X_{j + init a}`.
    pub fn build_m(&self, m: usize, j: usize) -> Result<CubeDiagram> {
        self.check_cube_range(m, j, j + m)?;
        let obj = |a: usize| self.tower(j + init(a)).get(deg(a) - init(a)).clone();
        CubeDiagram::from_fn(m, false, obj, |a, s| {
            let (da, ia) = (deg(a), init(a));
            let t = self.tower(j + ia);
            if s == ia + 1 {
                let b = a | bit(s);
                let ell = init(b) - ia - 1;
                let f = self.get(ell, j + ia)?;
                let c = cone_map_iter(f, da - ia - ell);
                Ok(fit(&c, t.get(da - ia), &obj(b)))
            } else {
                let r = deg(a & (bit(s) - 1));
                Ok(t.delta(da - ia + 1, r - ia + 1))
            }
        })
    }

    /// `𝔄^(m)_j : ℂ^(m)X_j -> M^(m)_{j+1}`, `a ↦ C^{deg a - init a} F^(init a)_j`.
    pub fn build_a(&self, m: usize, j: usize) -> Result<CubeMorphism> {
        let src = self.build_c(m, j);
        let tgt = self.build_m(m, j + 1)?;
        let comps = (0..1usize << m)
            .map(|a| {
                let f = self.get(init(a), j)?;
                let c = cone_map_iter(f, deg(a) - init(a));
                Ok(fit(&c, src.obj(a), tgt.obj(a)))
            })
            .collect::<Result<_>>()?;
        CubeMorphism::new(src, tgt, comps)
    }

    /// The target of `𝔅^(m)_j`: `C M^(m)_j` away from the terminal vertex,
    /// `X_{j+m+1}` there, with `F^(m-k+1)_{j+k-1}` on the edge from `r_k`.
    pub fn build_x(&self, m: usize, j: usize) -> Result<CubeDiagram> {
        self.check_cube_range(m, j, j + m + 1)?;
        let mj = self.build_m(m, j)?;
        let term = full(m);
        let obj = |a: usize| {
            if a == term {
                self.x(j + m + 1).clone()
            } else {
                self.tower(j + init(a)).get(deg(a) - init(a) + 1).clone()
            }
        };
        CubeDiagram::from_fn(m, false, obj, |a, s| {
            let b = a | bit(s);
            if b == term {
                let f = self.get(m - s + 1, j + s - 1)?;
                Ok(fit(f, &obj(a), &obj(b)))
            } else {
                Ok(cone_map_between(mj.edge(a, s), &obj(a), &obj(b)))
            }
        })
    }

    /// `𝔅^(m)_j : M^(m)_j -> 𝔛`, the cone inclusion away from the terminal
    /// vertex and `f_{j+m}` there.
    pub fn build_b(&self, m: usize, j: usize) -> Result<CubeMorphism> {
        let src = self.build_m(m, j)?;
        let tgt = self.build_x(m, j)?;
        let term = full(m);
        let comps = (0..1usize << m)
            .map(|a| {
                if a == term {
                    fit(self.f(j + m), src.obj(a), tgt.obj(a))
                } else {
                    let q = deg(a) - init(a);
                    self.tower(j + init(a)).delta(q + 1, q + 1)
                }
            })
            .collect();
        CubeMorphism::new(src, tgt, comps)
    }

    /// `𝔉^(m)_j : C ℂ^(m-1)X_j -> 𝔛^(m-1)`, the diagrammatic nullhomotopy of
    /// `𝔅^(m-1)_{j+1} ∘ 𝔄^(m-1)_j`.
    pub fn build_fdiag(&self, m: usize, j: usize) -> Result<CubeMorphism> {
        if m == 0 {
            return Err(Error::OutOfRange("𝔉^(0)".into()));
        }
        let (src, _) = cone_cube(&self.build_c(m - 1, j));
        let tgt = self.build_x(m - 1, j + 1)?;
        let term = full(m - 1);
        let comps = (0..1usize << (m - 1))
            .map(|a| {
                let f = if a == term {
                    self.get(m, j)?.clone()
                } else {
                    cone_map_iter(self.get(init(a), j)?, deg(a) - init(a) + 1)
                };
                Ok(fit(&f, src.obj(a), tgt.obj(a)))
            })
            .collect::<Result<_>>()?;
        CubeMorphism::new(src, tgt, comps)
    }

    fn bracket_order(&self) -> Result<usize> {
        let n = self.order;
        if n == 0 || self.length() != n + 2 {
            return Err(Error::InvalidSystem(format!(
                "a bracket needs an order-n system of length n+2, got order {n} and length {}",
                self.length()
            )));
        }
        self.require_valid()?;
        Ok(n)
    }

    /// `T^(n)_1 : L^n X_1 -> X_{n+3}` from the legs
    /// `F^(n-k+1)_{k+1} ∘ C^{n-k+1}(F^(k-1)_1)` at the vertices `r_k`.
    pub fn bracket_cubical(&self) -> Result<BracketValue> {
        let n = self.bracket_order()?;
        let l = crate::cubes::puncture(&self.build_c(n + 1, 1));
        let col = colimit(&l.to_diagram())?;
        let target = self.x(n + 3);
        let mut corner = BTreeMap::new();
        for k in 1..=n + 1 {
            let v = r_k(n + 1, k)?;
            let g = self.get(n + 1 - k, k + 1)?.after(&fit(
                &cone_map_iter(self.get(k - 1, 1)?, n + 1 - k),
                l.obj(v),
                self.tower(k + 1).get(n + 1 - k),
            ));
            corner.insert(v, g);
        }
        let legs = (0..l.objects.len())
            .map(|a| {
                let mut leg: Option<ChainMap> = None;
                for (&v, g) in &corner {
                    if a & !v != 0 {
                        continue;
                    }
                    let cand = g.after(&l.map_between(a, v));
                    match &leg {
                        Some(prev) if *prev != cand => {
                            return Err(Error::BadCocone(format!("legs disagree at vertex {a}")));
                        }
                        Some(_) => {}
                        None => leg = Some(cand),
                    }
                }
                Ok(leg.expect("every vertex lies below some r_k"))
            })
            .collect::<Result<Vec<_>>>()?;
        let map = col.induced(target, &legs)?;
        Ok(BracketValue { source: BracketSource::Cubical(n), map })
    }

    /// `T^(n)_1 = hcof'^(n)(𝔅^(n)_2) ∘ hcof^(n)(𝔄^(n)_1)`.
    pub fn bracket_via_hcof(&self) -> Result<BracketValue> {
        let n = self.bracket_order()?;
        let a = self.build_a(n, 1)?;
        let b = self.build_b(n, 2)?;
        let hc = hcof_n(&a.source)?;
        let hm = hcof_n(&a.target)?;
        let map = hcof_prime(&b, &hm)?.after(&hcof_n_map(&a, &hc, &hm)?);
        Ok(BracketValue { source: BracketSource::Cubical(n), map })
    }

    /// The diagram `ℂ^(n)X_1 -> M^(n)_2 -> 𝔛^(n)_{n+3}` on three layers of
    /// `2^n` vertices (layer `l` holds vertex `a` at index `l·2^n + a`).
    pub fn two_cube_diagram(&self) -> Result<Diagram> {
        let n = self.bracket_order()?;
        let a = self.build_a(n, 1)?;
        let b = self.build_b(n, 2)?;
        let size = 1usize << n;
        let mut objects = a.source.objects.clone();
        objects.extend(a.target.objects.iter().cloned());
        objects.extend(b.target.objects.iter().cloned());
        let mut arrows = Vec::new();
        for (l, cube) in [&a.source, &a.target, &b.target].into_iter().enumerate() {
            for (&(v, s), e) in &cube.edges {
                arrows.push(Arrow { from: l * size + v, to: l * size + (v | bit(s)), map: e.clone() });
            }
        }
        for (l, m) in [&a, &b].into_iter().enumerate() {
            for (v, c) in m.comps.iter().enumerate() {
                arrows.push(Arrow { from: l * size + v, to: (l + 1) * size + v, map: c.clone() });
            }
        }
        Diagram::new(objects, arrows)
    }

    pub fn is_strongly_cofibrant_system(&self) -> Result<Certificate> {
        is_strongly_cofibrant(&self.two_cube_diagram()?)
    }
}

/// Finds `F : C^k X -> Y` with `F ∘ δ_r = faces[r-1]` for all `r`.
pub(crate) fn solve_on_cone(t: &ConeTower, k: usize, y: &Cx, faces: &[ChainMap]) -> Result<Option<ChainMap>> {
    let x = t.base();
    let cx = t.get(k);
    let p = x.p();
    let top = full(k);
    // non-top blocks are copied from the face through the lowest zero bit
    let f0 = GradedMap::from_fn(cx, y, 0, |n| {
        let to = cone_block_offsets(x, k, n);
        let mut mat = Matrix::zeros(p, y.dim(n), cx.dim(n));
        for c in 0..top {
            let r = (!c).trailing_zeros() as usize + 1;
            let b = (c & (bit(r) - 1)) | ((c >> r) << (r - 1));
            let so = cone_block_offsets(x, k - 1, n);
            let w = so[b + 1] - so[b];
            mat.set_block(0, to[c], &faces[r - 1].comp(n).block(0, y.dim(n), so[b], w));
        }
        mat
    })?;
    // the top block T solves dT - (-1)^k T d = F0 ∘ d_C on the top block
    let phi = GradedMap::from_fn(x, y, k as i32 - 1, |n| {
        let deg_top = n + k as i32;
        let off = cone_block_offsets(x, k, deg_top);
        let dtop = cx.d(deg_top).block(0, cx.dim(deg_top - 1), off[top], x.dim(n));
        f0.comp(deg_top - 1).mul(&dtop)
    })?;
    let Some(h) = solve_graded_homotopy(&phi) else {
        return Ok(None);
    };
    let f = GradedMap::from_fn(cx, y, 0, |n| {
        let mut m = f0.comp(n);
        let off = cone_block_offsets(x, k, n);
        m.set_block(0, off[top], &h.comp(n - k as i32));
        m
    })?;
    let ok = f.commutes_with_d() && (1..=k).all(|r| f.after(&t.delta(k, r)) == faces[r - 1]);
    if !ok {
        return Err(Error::InvalidSystem(format!("lower data for a nullhomotopy on C^{k} is inconsistent")));
    }
    Ok(Some(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{cone_inclusion, ChainComplex};
    use crate::cubes::{cube_l, CubeHcofiber};
    use crate::random::{random_complex, random_map, rng, Rand};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn arc(x: ChainComplex) -> Cx {
        Arc::new(x)
    }

    /// A random valid system: random complexes, null maps `f_j`, and the
    /// nullhomotopies solved for (resampling on obstructions).
    pub(crate) fn random_system(r: &mut Rand, p: u32, order: usize, length: usize) -> CubicalTodaSystem {
        loop {
            let mut objects: Vec<Cx> = vec![arc(random_complex(r, p, 0, 3, 2))];
            let mut maps = Vec::new();
            for _ in 0..length {
                let x = objects.last().unwrap().clone();
                let y = arc(random_complex(r, p, 0, 3, 2));
                maps.push(crate::random::random_graded(r, &x, &y, 1).boundary());
                objects.push(y);
            }
            let mut s = CubicalTodaSystem::new(order, objects, maps, BTreeMap::new()).unwrap();
            if s.complete().unwrap().is_some() {
                return s;
            }
        }
    }

    fn zero_system(p: u32, order: usize) -> CubicalTodaSystem {
        let x = arc(ChainComplex::sphere(p, 0));
        let objects = vec![x.clone(); order + 3];
        let maps = vec![GradedMap::zero(&x, &x, 0); order + 2];
        let mut s = CubicalTodaSystem::new(order, objects, maps, BTreeMap::new()).unwrap();
        s.complete().unwrap().unwrap();
        s
    }

    #[test]
    fn delta_and_faces() {
        let x = arc(ChainComplex::disk(2, 1));
        assert_eq!(delta_k(&x, 1, 1).unwrap(), cone_inclusion(&x));
        assert!(delta_k(&x, 2, 3).is_err());
        assert!(delta_k(&x, 2, 0).is_err());
        let t = ConeTower::new(&x, 2);
        let y = arc(ChainComplex::disk(2, 2));
        let mut r = rng(3);
        let f = random_map(&mut r, t.get(1), &y);
        assert_eq!(d_k(&t, &f, 1, 1).unwrap(), f.after(&cone_inclusion(&x)));
    }

    #[test]
    fn face_operator_lemma() {
        // d_k(g ∘ C^m f) for f : C^n X -> Y, g : C^m Y -> Z
        let mut r = rng(4);
        for (n, m) in [(1, 1), (1, 2), (2, 1)] {
            let x = arc(random_complex(&mut r, 5, 0, 2, 2));
            let tx = ConeTower::new(&x, n + m);
            let y = arc(random_complex(&mut r, 5, 0, 3, 2));
            let ty = ConeTower::new(&y, m);
            let z = arc(random_complex(&mut r, 5, 0, 4, 2));
            let f = random_map(&mut r, tx.get(n), &y);
            let g = random_map(&mut r, ty.get(m), &z);
            let cf = fit(&cone_map_iter(&f, m), tx.get(n + m), ty.get(m));
            let whole = g.after(&cf);
            for k in 1..=n + m {
                let lhs = d_k(&tx, &whole, n + m, k).unwrap();
                let rhs = if k <= n {
                    let df = d_k(&tx, &f, n, k).unwrap();
                    g.after(&fit(&cone_map_iter(&df, m), tx.get(n + m - 1), ty.get(m)))
                } else {
                    let dg = d_k(&ty, &g, m, k - n).unwrap();
                    dg.after(&fit(&cone_map_iter(&f, m - 1), tx.get(n + m - 1), ty.get(m - 1)))
                };
                assert_eq!(lhs, rhs, "n={n} m={m} k={k}");
            }
        }
    }

    #[test]
    fn zero_system_examples() {
        for order in 1..=2 {
            let s = zero_system(5, order);
            assert!(s.validate().ok());
            assert!(s.bracket_cubical().unwrap().map.is_zero());
            assert!(s.bracket_via_hcof().unwrap().map.is_zero());
        }
    }

    #[test]
    fn small_cubes() {
        let mut r = rng(5);
        let s = random_system(&mut r, 2, 1, 3);
        let m11 = s.build_m(1, 1).unwrap();
        assert_eq!(m11.objects, vec![s.x(1).clone(), s.x(2).clone()]);
        assert_eq!(m11.edge(0, 1), s.f(1));
        let f1 = s.build_fdiag(1, 2).unwrap();
        assert_eq!(f1.comps, vec![s.get(1, 2).unwrap().clone()]);
        assert_eq!(f1.target.objects, vec![s.x(4).clone()]);
        let x1 = s.build_x(1, 2).unwrap();
        assert_eq!(x1.edge(0, 1), s.get(1, 2).unwrap());
    }

    #[test]
    fn perturbed_system_fails_at_one_place() {
        let mut r = rng(6);
        let mut s = random_system(&mut r, 5, 2, 4);
        let f = s.get(2, 1).unwrap().clone();
        let n = f.source().lo();
        let mut comps: Vec<Matrix> = f.source().degrees().map(|d| f.comp(d)).collect();
        let idx = comps.iter().position(|m| m.rows() > 0 && m.cols() > 0).unwrap();
        let old = comps[idx].get(0, 0);
        comps[idx].set(0, 0, (old + 1) % 5);
        let g = GradedMap::from_fn(f.source(), f.target(), 0, |d| comps[(d - n) as usize].clone()).unwrap();
        s.nullhomotopies.insert((2, 1), g);
        let rep = s.validate();
        assert!(!rep.ok());
        assert!(rep.failures.iter().all(|e| (e.k, e.j) == (2, 1)));
    }

    #[test]
    fn obstruction_reported() {
        // f_2 ∘ f_1 = id on S^0 has no nullhomotopy
        let x = arc(ChainComplex::sphere(2, 0));
        let id = GradedMap::identity(&x);
        let s = CubicalTodaSystem::new(1, vec![x.clone(); 4], vec![id.clone(); 3], BTreeMap::new()).unwrap();
        assert_eq!(s.solve_next_nullhomotopy(1, 1).unwrap(), None);
        // contractible objects: F = 0
        let d = arc(ChainComplex::disk(2, 1));
        let z = GradedMap::zero(&d, &d, 0);
        let s = CubicalTodaSystem::new(1, vec![d.clone(); 4], vec![z; 3], BTreeMap::new()).unwrap();
        assert!(s.solve_next_nullhomotopy(1, 1).unwrap().unwrap().is_zero());
    }

    #[test]
    fn hcof_of_cones_is_l() {
        let mut r = rng(7);
        let s = random_system(&mut r, 2, 2, 4);
        let h: CubeHcofiber = hcof_n(&s.build_c(2, 1)).unwrap();
        let (_, l) = cube_l(s.x(1), 2).unwrap();
        assert_eq!(h.object(), l.object());
    }

    #[test]
    fn order_one_bracket_legs() {
        let mut r = rng(8);
        let s = random_system(&mut r, 5, 1, 3);
        let t = s.bracket_cubical().unwrap();
        let l = crate::cubes::puncture(&s.build_c(2, 1));
        let col = colimit(&l.to_diagram()).unwrap();
        // leg at r_2 = (1, 0): f_3 ∘ F^(1)_1
        let leg = t.map.after(&col.legs[0b01]);
        assert_eq!(leg, s.f(3).after(s.get(1, 1).unwrap()));
        let leg = t.map.after(&col.legs[0b10]);
        let cf = fit(&crate::chain::cone_map(s.f(1)), l.obj(0b10), s.tower(2).get(1));
        assert_eq!(leg, s.get(1, 2).unwrap().after(&cf));
    }

    fn seeds() -> impl Strategy<Value = (u64, u32)> {
        (any::<u64>(), prop_oneof![Just(2u32), Just(5u32)])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn generated_systems_validate((seed, p) in seeds(), order in 1usize..=2) {
            let mut r = rng(seed);
            let s = random_system(&mut r, p, order, order + 2);
            prop_assert!(s.validate().ok());
        }

        #[test]
        fn brackets_agree((seed, p) in seeds(), order in 1usize..=2) {
            let mut r = rng(seed);
            let s = random_system(&mut r, p, order, order + 2);
            prop_assert_eq!(s.bracket_cubical().unwrap(), s.bracket_via_hcof().unwrap());
        }

        #[test]
        fn diagrammatic_nullhomotopy((seed, p) in seeds()) {
            let mut r = rng(seed);
            let s = random_system(&mut r, p, 2, 4);
            for m in 0..=1 {
                for j in 1..=4 - m - 1 {
                    let a = s.build_a(m, j).unwrap();
                    let b = s.build_b(m, j + 1).unwrap();
                    let f = s.build_fdiag(m + 1, j).unwrap();
                    let (_, i) = cone_cube(&a.source);
                    prop_assert_eq!(f.compose(&i).unwrap().comps, b.compose(&a).unwrap().comps);
                }
            }
        }

        #[test]
        fn face_bookkeeping((seed, p) in seeds()) {
            let mut r = rng(seed);
            let s = random_system(&mut r, p, 2, 4);
            let m = 2;
            let j = 1;
            let mm = s.build_m(m, j + 1).unwrap();
            prop_assert_eq!(mm.boundary(1).unwrap(), s.build_a(m - 1, j + 1).unwrap(), "identity 1");
            prop_assert_eq!(mm.boundary(m).unwrap(), s.build_b(m - 1, j + 1).unwrap(), "identity 2");
            let a = s.build_a(m, j).unwrap();
            prop_assert_eq!(a.face(m, 0).unwrap(), s.build_a(m - 1, j).unwrap(), "identity 3");
            prop_assert_eq!(a.face(m, 1).unwrap(), s.build_fdiag(m, j).unwrap(), "identity 4");
            let b = s.build_b(m, j + 1).unwrap();
            let (_, i) = cone_cube(&s.build_c(m - 1, j + 1));
            prop_assert_eq!(b.face(1, 0).unwrap(), i, "identity 5");
            prop_assert_eq!(b.face(1, 1).unwrap(), s.build_b(m - 1, j + 2).unwrap(), "identity 6");
            let x = s.build_x(m, j).unwrap();
            prop_assert_eq!(x.boundary(1).unwrap(), s.build_fdiag(m, j).unwrap(), "identity 7");
        }

        #[test]
        fn solver_is_deterministic((seed, p) in seeds()) {
            let a = random_system(&mut rng(seed), p, 2, 4);
            let b = random_system(&mut rng(seed), p, 2, 4);
            prop_assert_eq!(a, b);
        }
    }
}
