//! Passing between cubical and recursive Toda systems: the reduction `V`,
//! the comparison of the two brackets, lifting a recursive system to a
//! strongly cofibrant cubical one, and the variant rectification.

use std::collections::BTreeMap;

use crate::chain::{
    cone_map_iter, is_quasi_iso, mapping_cylinder, solve_graded_homotopy, solve_homotopy, ChainMap, ConeTower, Cx,
    GradedMap,
};
use crate::cubes::{
    collapse, colimit_over, cof_n, cof_n_map, cube_c_with, deg, full, hcof_n, hcof_n_map, hcof_prime, init, to_fin,
    zeta, Arrow, CubeDiagram, CubeMorphism, Diagram,
};
use crate::error::{Error, Result};
use crate::toda_cubical::CubicalTodaSystem;
use crate::toda_recursive::{
    chain_section, descend_along_cofiber, Nullhomotopy, Obstruction, RecursiveTodaSystem, RectifiedDiagram,
    RectifyOutcome,
};

/// `V(S)`: the recursive system with `F̃^(m)_j = cof^(m-1)(𝔉^(m)_j)`.
pub fn v(s: &CubicalTodaSystem) -> Result<RecursiveTodaSystem> {
    let rep = s.validate();
    if !rep.ok() {
        return Err(Error::InvalidSystem("V needs a complete cubical system satisfying all face equations".into()));
    }
    let mut out = RecursiveTodaSystem::new(s.order(), s.objects(), s.maps().to_vec(), BTreeMap::new())?;
    for m in 1..=s.order() {
        for j in 1..=s.length().saturating_sub(m) {
            let fd = s.build_fdiag(m, j)?;
            let f = cof_n_map(&fd, &cof_n(&fd.source)?, &cof_n(&fd.target)?)?;
            out.set(m, j, f)?;
        }
    }
    out.set_origin(s.clone());
    Ok(out)
}

/// One square of a comparison; `difference` is `lhs - rhs` when the two
/// composites are parallel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareCheck {
    pub name: String,
    pub pass: bool,
    pub difference: Option<GradedMap>,
    /// Set for squares that need only commute up to homotopy.
    pub homotopic: Option<bool>,
}

impl SquareCheck {
    fn exact(name: impl Into<String>, lhs: Result<GradedMap>, rhs: Result<GradedMap>) -> SquareCheck {
        let name = name.into();
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => match l.try_sub(&r) {
                Ok(d) => SquareCheck { name, pass: d.is_zero(), difference: Some(d), homotopic: None },
                Err(_) => SquareCheck { name, pass: false, difference: None, homotopic: None },
            },
            _ => SquareCheck { name, pass: false, difference: None, homotopic: None },
        }
    }

    /// Exact when possible, otherwise checked up to a solved homotopy.
    fn up_to_homotopy(name: impl Into<String>, lhs: Result<GradedMap>, rhs: Result<GradedMap>) -> SquareCheck {
        let (l, r) = match (&lhs, &rhs) {
            (Ok(l), Ok(r)) => (l.clone(), r.clone()),
            _ => return SquareCheck::exact(name, lhs, rhs),
        };
        let mut sq = SquareCheck::exact(name, lhs, rhs);
        if !sq.pass && sq.difference.is_some() {
            sq.homotopic = Some(solve_homotopy(&l, &r).is_some());
        }
        sq
    }

    pub fn ok(&self) -> bool {
        self.pass || self.homotopic == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

fn verdict(name: impl Into<String>, pass: bool) -> Verdict {
    Verdict { name: name.into(), pass }
}

fn quasi(name: impl Into<String>, f: &ChainMap) -> Verdict {
    verdict(name, is_quasi_iso(f))
}

/// Everything checked when comparing the cubical and recursive brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub order: usize,
    pub strongly_cofibrant: bool,
    /// Identities of objects and naturality of cube maps.
    pub literal: Vec<Verdict>,
    pub squares: Vec<SquareCheck>,
    pub quasi_isos: Vec<Verdict>,
    /// `T^(n)_1` of the cubical side.
    pub cubical: Option<ChainMap>,
    /// `T̃^(n)_1` of the recursive side.
    pub recursive: Option<ChainMap>,
}

impl ComparisonReport {
    fn new(order: usize) -> ComparisonReport {
        ComparisonReport {
            order,
            strongly_cofibrant: false,
            literal: vec![],
            squares: vec![],
            quasi_isos: vec![],
            cubical: None,
            recursive: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.strongly_cofibrant
            && self.literal.iter().all(|v| v.pass)
            && self.squares.iter().all(SquareCheck::ok)
            && self.quasi_isos.iter().all(|v| v.pass)
    }

    /// Names of everything that failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.strongly_cofibrant {
            out.push("strongly cofibrant".to_string());
        }
        out.extend(self.literal.iter().filter(|v| !v.pass).map(|v| v.name.clone()));
        out.extend(self.squares.iter().filter(|s| !s.ok()).map(|s| s.name.clone()));
        out.extend(self.quasi_isos.iter().filter(|v| !v.pass).map(|v| format!("quasi-iso {}", v.name)));
        out
    }

    /// Squares that hold only up to homotopy.
    pub fn flags(&self) -> Vec<String> {
        self.squares.iter().filter(|s| !s.pass && s.homotopic == Some(true)).map(|s| s.name.clone()).collect()
    }

    fn absorb(&mut self, prefix: &str, o: ComparisonReport) {
        self.literal.extend(o.literal.into_iter().map(|v| verdict(format!("{prefix}{}", v.name), v.pass)));
        self.literal.push(verdict(format!("{prefix}strongly cofibrant"), o.strongly_cofibrant));
        self.squares.extend(o.squares.into_iter().map(|mut s| {
            s.name = format!("{prefix}{}", s.name);
            s
        }));
        self.quasi_isos.extend(o.quasi_isos.into_iter().map(|v| verdict(format!("{prefix}{}", v.name), v.pass)));
    }
}

fn compose(a: &ChainMap, b: &ChainMap) -> Result<ChainMap> {
    a.compose(b)
}

/// Compares `T^(n)_1(S)` with `T̃^(n)_1(V S)` and checks every map of the
/// comparison ladder.
pub fn compare_def1_def2(s: &CubicalTodaSystem) -> Result<ComparisonReport> {
    let n = s.order();
    let t = s.bracket_cubical()?.map;
    let vs = v(s)?;
    let tt = vs.bracket_recursive()?.map;
    let mut rep = ComparisonReport::new(n);
    rep.strongly_cofibrant = s.is_strongly_cofibrant_system()?.ok;

    let a = s.build_a(n, 1)?;
    let b = s.build_b(n, 2)?;
    let (c, m, x) = (&a.source, &a.target, &b.target);
    let (hc, cc) = (hcof_n(c)?, cof_n(c)?);
    let (hm, cm) = (hcof_n(m)?, cof_n(m)?);
    let cx = cof_n(x)?;
    let zc = zeta(c, &hc, &cc)?;
    let zm = zeta(m, &hm, &cm)?;

    rep.squares.push(SquareCheck::exact("bracket", compose(&tt, &zc), compose(cx.r(), &t)));
    rep.squares.push(SquareCheck::exact(
        "hcof(A)",
        compose(&zm, &hcof_n_map(&a, &hc, &hm)?),
        cof_n_map(&a, &cc, &cm).and_then(|f| compose(&f, &zc)),
    ));
    rep.squares.push(SquareCheck::exact(
        "hcof'(B)",
        compose(cx.r(), &hcof_prime(&b, &hm)?),
        cof_n_map(&b, &cm, &cx).and_then(|f| compose(&f, &zm)),
    ));
    for mm in 1..=n {
        for j in 1..=s.length() - mm {
            let am = s.build_a(mm, j)?;
            let bm = s.build_b(mm, j)?;
            rep.squares.push(SquareCheck::exact(
                format!("alpha({mm},{j})"),
                cof_n_map(&am, &cof_n(&am.source)?, &cof_n(&am.target)?),
                Ok(vs.alpha(mm, j)?.clone()),
            ));
            rep.squares.push(SquareCheck::exact(
                format!("beta({mm},{j})"),
                cof_n_map(&bm, &cof_n(&bm.source)?, &cof_n(&bm.target)?),
                Ok(vs.beta(mm, j)?.clone()),
            ));
        }
    }

    let enc = vs.encode(n)?;
    let (wc, thc) = collapse(c)?;
    let (wm, thm) = collapse(m)?;
    let rx = to_fin(x, cx.r())?;
    rep.literal.push(verdict("W(C) = C~", wc == enc.c));
    rep.literal.push(verdict("W(M) = M~", wm == enc.m));
    rep.literal.push(verdict("Fin(cof X) = X~", rx.target == enc.x));
    for vtx in 0..1usize << n {
        rep.squares.push(SquareCheck::exact(
            format!("theta(A)@{vtx}"),
            compose(&enc.a.comps[vtx], &thc.comps[vtx]),
            compose(&thm.comps[vtx], &a.comps[vtx]),
        ));
        rep.squares.push(SquareCheck::exact(
            format!("theta(B)@{vtx}"),
            compose(&enc.b.comps[vtx], &thm.comps[vtx]),
            compose(&rx.comps[vtx], &b.comps[vtx]),
        ));
        rep.quasi_isos.push(quasi(format!("theta(C)@{vtx}"), &thc.comps[vtx]));
        rep.quasi_isos.push(quasi(format!("theta(M)@{vtx}"), &thm.comps[vtx]));
        rep.quasi_isos.push(quasi(format!("r(X)@{vtx}"), &rx.comps[vtx]));
    }
    rep.quasi_isos.push(quasi("zeta(C)", &zc));
    rep.quasi_isos.push(quasi("zeta(M)", &zm));
    rep.quasi_isos.push(quasi("r(X)", cx.r()));
    rep.cubical = Some(t);
    rep.recursive = Some(tt);
    Ok(rep)
}

/// `Rec(S)` written as a cubical system: `G^(k)_1 = F̃^(k)_1 ∘ ϑ` with
/// `ϑ : C^k X_1 -> CΣ̃^{k-1} X_1` the collapse, and `G^(k)_j = 0` for `j >= 2`.
pub fn cubical_model(s: &RecursiveTodaSystem) -> Result<CubicalTodaSystem> {
    let n = s.order();
    let rec = s.rec()?;
    let mut z = CubicalTodaSystem::new(n, rec.objects().to_vec(), rec.maps().to_vec(), BTreeMap::new())?;
    for k in 1..=n {
        let (_, th) = collapse(&cube_c_with(z.tower(1), k))?;
        let g = rec.nullhomotopy(k, 1)?.compose(&th.comps[full(k)])?;
        z.set(k, 1, g)?;
        for j in 2..=z.length() - k {
            let zero = GradedMap::zero(z.tower(j).get(k), z.x(j + k + 1), 0);
            z.set(k, j, zero)?;
        }
    }
    let rep = z.validate();
    if !rep.ok() {
        return Err(Error::InvalidSystem("the cubical model of Rec(S) fails a face equation".into()));
    }
    Ok(z)
}

/// A cubical system `G` with `ρ_t : X'_t -> X_t` compatible with all maps
/// and nullhomotopies, where every `X'_t` receives an injective map from
/// the colimit of everything that maps into it. Objects whose latching map
/// is already injective are kept.
pub fn replace_system(z: &CubicalTodaSystem) -> Result<(CubicalTodaSystem, Vec<ChainMap>)> {
    let rep = z.validate();
    if !rep.ok() {
        return Err(Error::InvalidSystem("replacement needs a complete valid system".into()));
    }
    let n = z.order();
    let p = z.p();
    let len = z.length();
    let mut objects: Vec<Cx> = Vec::new();
    let mut towers: Vec<ConeTower> = Vec::new();
    let mut rho: Vec<ChainMap> = Vec::new();
    // (k, j) -> G'^(k)_j, with k = 0 the maps
    let mut g: BTreeMap<(usize, usize), ChainMap> = BTreeMap::new();
    for t in 1..=len + 1 {
        let y = z.x(t);
        let top = if t >= 2 { Some(n.min(t - 2)) } else { None };
        let mut objs: Vec<Cx> = Vec::new();
        let mut legs: Vec<ChainMap> = Vec::new();
        let mut arrows: Vec<Arrow> = Vec::new();
        if let Some(top) = top {
            for k in 0..=top {
                let j = t - k - 1;
                objs.push(towers[j - 1].get(k).clone());
                let ck = cone_map_iter(&rho[j - 1], k);
                legs.push(z.get(k, j)?.compose(&ck)?);
            }
            for k in 1..=top {
                let j = t - k - 1;
                for r in 1..=k {
                    let q = objs.len();
                    objs.push(towers[j - 1].get(k - 1).clone());
                    let delta = towers[j - 1].delta(k, r);
                    legs.push(legs[k].compose(&delta)?);
                    arrows.push(Arrow { from: q, to: k, map: delta });
                    let inner = cone_map_iter(&g[&(r - 1, j)], k - r)
                        .retarget(towers[j - 1].get(k - 1), towers[j + r - 1].get(k - r))?;
                    arrows.push(Arrow { from: q, to: k - r, map: inner });
                }
            }
        }
        let col = colimit_over(p, &Diagram::new(objs, arrows)?)?;
        let lam = col.induced(y, &legs)?;
        let (obj, iota, r) = if lam.is_injective() {
            (y.clone(), lam, GradedMap::identity(y))
        } else {
            let cyl = mapping_cylinder(&lam);
            (cyl.object, cyl.j, cyl.rho)
        };
        if let Some(top) = top {
            for k in 0..=top {
                g.insert((k, t - k - 1), iota.after(&col.legs[k]));
            }
        }
        towers.push(ConeTower::new(&obj, n + 1));
        objects.push(obj);
        rho.push(r);
    }
    let maps: Vec<ChainMap> = (1..=len).map(|j| g[&(0, j)].clone()).collect();
    let nulls: BTreeMap<(usize, usize), ChainMap> =
        g.into_iter().filter(|((k, _), _)| *k >= 1).collect();
    let out = CubicalTodaSystem::new(n, objects, maps, nulls)?;
    let rep = out.validate();
    if !rep.ok() {
        return Err(Error::InvalidSystem("replacement fails a face equation".into()));
    }
    Ok((out, rho))
}

/// A strongly cofibrant cubical system together with the ladder from its
/// two-cube diagram to the encoding `C̃ -> M̃ -> Fin` of a recursive system.
#[derive(Clone, Debug)]
pub struct Lift {
    pub system: CubicalTodaSystem,
    /// `ℂ^(n) X_1 -> C̃^(n) X_1`.
    pub theta: CubeMorphism,
    /// `M^(n)_2 -> M̃^(n)_2`.
    pub r_m: CubeMorphism,
    /// `𝔛^(n) -> Fin^n(cof F̃^(n)_2)`.
    pub r_x: CubeMorphism,
    /// `X'_t -> Rec(S)_t`; empty when the known origin was returned.
    pub rho: Vec<ChainMap>,
}

/// Lifts a recursive system of order `n <= max_cube` to a strongly
/// cofibrant cubical one. A system produced by `V` lifts to its origin.
pub fn lift(s: &RecursiveTodaSystem, max_cube: usize) -> Result<Lift> {
    let n = s.order();
    if n > max_cube {
        return Err(Error::CubeCap(n, max_cube));
    }
    s.bracket_recursive()?;
    let enc = s.encode(n)?;
    if let Some(g) = s.origin() {
        let a = g.build_a(n, 1)?;
        let b = g.build_b(n, 2)?;
        let (_, theta) = collapse(&a.source)?;
        let (_, r_m) = collapse(&a.target)?;
        let r_x = to_fin(&b.target, cof_n(&b.target)?.r())?;
        return Ok(Lift { system: g.clone(), theta, r_m, r_x, rho: vec![] });
    }
    let z = cubical_model(s)?;
    let (g, rho) = replace_system(&z)?;
    let a = g.build_a(n, 1)?;
    let b = g.build_b(n, 2)?;
    let (_, theta) = collapse(&a.source)?;
    let term = full(n);
    let r_m = CubeMorphism {
        source: a.target.clone(),
        target: enc.m.clone(),
        comps: (0..=term)
            .map(|v| {
                if deg(v) == init(v) {
                    rho[deg(v) + 1].clone()
                } else {
                    GradedMap::zero(a.target.obj(v), enc.m.obj(v), 0)
                }
            })
            .collect(),
    };
    let r_x = CubeMorphism {
        source: b.target.clone(),
        target: enc.x.clone(),
        comps: (0..=term)
            .map(|v| if v == term { rho[n + 2].clone() } else { GradedMap::zero(b.target.obj(v), enc.x.obj(v), 0) })
            .collect(),
    };
    Ok(Lift { system: g, theta, r_m, r_x, rho })
}

fn cube_target_is(f: &CubeMorphism, c: &CubeDiagram) -> bool {
    f.target == *c
}

/// Lifts `S`, reduces the lift again, and checks the whole round trip:
/// the encoding ladder, the closing square `T̃(S) ∘ ζ = ρ ∘ T(lift S)`, the
/// comparison for the lift, and `cof(ρ) ∘ T̃(V lift S) = T̃(S)`.
pub fn check_roundtrip(s: &RecursiveTodaSystem, max_cube: usize) -> Result<ComparisonReport> {
    let n = s.order();
    let tt = s.bracket_recursive()?.map;
    let enc = s.encode(n)?;
    let l = lift(s, max_cube)?;
    let g = &l.system;
    let mut rep = ComparisonReport::new(n);
    rep.strongly_cofibrant = g.is_strongly_cofibrant_system()?.ok;
    let a = g.build_a(n, 1)?;
    let b = g.build_b(n, 2)?;
    rep.literal.push(verdict("theta target", cube_target_is(&l.theta, &enc.c)));
    rep.literal.push(verdict("r(M) target", cube_target_is(&l.r_m, &enc.m)));
    rep.literal.push(verdict("r(X) target", cube_target_is(&l.r_x, &enc.x)));
    rep.literal.push(verdict("theta natural", l.theta.validate().is_ok()));
    rep.literal.push(verdict("r(M) natural", l.r_m.validate().is_ok()));
    rep.literal.push(verdict("r(X) natural", l.r_x.validate().is_ok()));
    for vtx in 0..1usize << n {
        rep.squares.push(SquareCheck::exact(
            format!("ladder(A)@{vtx}"),
            compose(&enc.a.comps[vtx], &l.theta.comps[vtx]),
            compose(&l.r_m.comps[vtx], &a.comps[vtx]),
        ));
        rep.squares.push(SquareCheck::exact(
            format!("ladder(B)@{vtx}"),
            compose(&enc.b.comps[vtx], &l.r_m.comps[vtx]),
            compose(&l.r_x.comps[vtx], &b.comps[vtx]),
        ));
        rep.quasi_isos.push(quasi(format!("theta@{vtx}"), &l.theta.comps[vtx]));
        rep.quasi_isos.push(quasi(format!("r(M)@{vtx}"), &l.r_m.comps[vtx]));
        rep.quasi_isos.push(quasi(format!("r(X)@{vtx}"), &l.r_x.comps[vtx]));
    }
    for (t, r) in l.rho.iter().enumerate() {
        rep.quasi_isos.push(quasi(format!("rho_{}", t + 1), r));
    }

    let t = g.bracket_cubical()?.map;
    let c = &a.source;
    let zc = zeta(c, &hcof_n(c)?, &cof_n(c)?)?;
    let term = full(n);
    rep.squares.push(SquareCheck::up_to_homotopy(
        "closing",
        compose(&tt, &zc),
        compose(&l.r_x.comps[term], &t),
    ));

    let sub = compare_def1_def2(g)?;
    let tv = sub.recursive.clone().expect("comparison computes T~");
    rep.absorb("V: ", sub);
    let cr = cof_n_map(&l.r_x, &cof_n(&l.r_x.source)?, &cof_n(&l.r_x.target)?)?;
    rep.squares.push(SquareCheck::exact("V bracket", compose(&cr, &tv), Ok(tt.clone())));
    rep.quasi_isos.push(quasi("cof(r(X))", &cr));
    rep.cubical = Some(t);
    rep.recursive = Some(tt);
    Ok(rep)
}

/// Rectifies `X_1 -> ... -> X_{n+3}` keeping `X_{n+3}`, given a
/// nullhomotopy of `f_{n+2} ∘ hcof'^(n)(𝔅^(n)_1)` (searched for when
/// `null` is `None`). The last map is `s ∘ r^{β̃^(n)_1}` with `s` descended
/// from `f_{n+2} ∘ σ` along `β̃^(n)_1`, `σ` a section of `r^𝔛`.
pub fn rectify_variant(s: &CubicalTodaSystem, null: Option<&Nullhomotopy>) -> Result<RectifyOutcome> {
    let n = s.order();
    s.bracket_cubical()?;
    let vs = v(s)?;
    let b1 = s.build_b(n, 1)?;
    let hm = hcof_n(&b1.source)?;
    let phi = s.f(n + 2).compose(&hcof_prime(&b1, &hm)?)?;
    match null {
        Some(nh) => {
            nh.to_graded(&phi)?;
        }
        None => {
            if solve_graded_homotopy(&phi).is_none() {
                return Ok(RectifyOutcome::Obstructed(Obstruction::of(&phi)));
            }
        }
    }
    let r = cof_n(&b1.target)?.r().clone();
    let sigma = chain_section(&r)?;
    let beta = vs.beta(n, 1)?;
    let b = s.f(n + 2).compose(&sigma.retarget(beta.target(), sigma.target())?)?;
    let h = solve_graded_homotopy(&b.compose(beta)?)
        .ok_or_else(|| Error::Other("f ∘ σ ∘ β̃ is not nullhomotopic although the hypothesis holds".into()))?;
    let d = descend_along_cofiber(beta, &b, &h)?;
    let mut maps = vs.beta_chain(1, n)?;
    let r_last = vs.r_beta(Some(n), 1)?;
    let sd = d.s.retarget(r_last.target(), d.s.target())?;
    maps.push(sd.compose(&r_last)?);
    let mut ladder = vec![GradedMap::identity(s.x(1)), GradedMap::identity(s.x(2))];
    for k in 1..=n {
        ladder.push(vs.staircase(1, k)?);
    }
    ladder.push(GradedMap::identity(s.x(n + 3)));
    Ok(RectifyOutcome::Rectified(RectifiedDiagram::check(s.maps().to_vec(), maps, ladder)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_cubical, random_recursive};
    use crate::random::rng;
    use proptest::prelude::*;

    #[test]
    fn v_of_order_one_keeps_the_data() {
        let mut r = rng(3);
        let s = random_cubical(&mut r, 3, 1, 3, 2);
        let vs = v(&s).unwrap();
        assert_eq!(vs.nullhomotopy(1, 1).unwrap(), s.get(1, 1).unwrap());
        assert_eq!(vs.origin(), Some(&s));
    }

    #[test]
    fn model_of_rec_is_a_cubical_system() {
        let mut r = rng(8);
        for order in 1..=2 {
            let s = random_recursive(&mut r, 3, order, order + 2, 2);
            let z = cubical_model(&s).unwrap();
            assert!(z.validate().ok());
        }
    }

    #[test]
    fn lift_of_reduction_is_origin() {
        let mut r = rng(21);
        let (s, _) = replace_system(&random_cubical(&mut r, 2, 1, 3, 2)).unwrap();
        let l = lift(&v(&s).unwrap(), 3).unwrap();
        assert_eq!(l.system, s);
        assert!(l.rho.is_empty());
    }

    #[test]
    fn cube_cap_is_enforced() {
        let mut r = rng(4);
        let s = random_recursive(&mut r, 2, 2, 4, 2);
        assert!(matches!(lift(&s, 1), Err(Error::CubeCap(2, 1))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn replacement_is_strongly_cofibrant(seed in any::<u64>(), order in 1usize..=2, p in prop::sample::select(vec![2u32, 5])) {
            let mut r = rng(seed);
            let z = random_cubical(&mut r, p, order, order + 2, 2);
            let (g, rho) = replace_system(&z).unwrap();
            prop_assert!(g.is_strongly_cofibrant_system().unwrap().ok);
            for (t, rt) in rho.iter().enumerate() {
                prop_assert!(is_quasi_iso(rt));
                if t + 1 <= z.length() {
                    prop_assert_eq!(z.f(t + 1).compose(rt).unwrap(), rho[t + 1].compose(g.f(t + 1)).unwrap());
                }
            }
        }

        #[test]
        fn brackets_agree_after_reduction(seed in any::<u64>(), order in 1usize..=2, p in prop::sample::select(vec![2u32, 5])) {
            let mut r = rng(seed);
            let (s, _) = replace_system(&random_cubical(&mut r, p, order, order + 2, 2)).unwrap();
            let rep = compare_def1_def2(&s).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.failures());
        }

        #[test]
        fn roundtrip_passes(seed in any::<u64>(), order in 1usize..=2, p in prop::sample::select(vec![2u32, 5])) {
            let mut r = rng(seed);
            let s = random_recursive(&mut r, p, order, order + 2, 2);
            let rep = check_roundtrip(&s, 3).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.failures());
        }
    }
}
