//! Bounded chain complexes over F_p, graded maps, homology, and the basic
//! homotopical constructions: cylinder, cone, strict and homotopy cofibers,
//! pushouts and the comparison map ζ.
//!
//! Grading is homological. The cone is `CX_n = X_n ⊕ X_{n-1}` with
//! `d(y, x) = (dy + x, -dx)`; every other construction inherits this choice.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub type Cx = Arc<ChainComplex>;

/// A bounded complex. Stored trimmed, so derived equality is literal
/// equality of complexes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    p: u32,
    lo: i32,
    dims: Vec<usize>,
    // d[k] : degree lo+k+1 -> lo+k
    d: Vec<Matrix>,
}

impl ChainComplex {
    pub fn zero(p: u32) -> ChainComplex {
        ChainComplex { p, lo: 0, dims: Vec::new(), d: Vec::new() }
    }

    /// `dims[k]` is the dimension in degree `lo + k`; `d[k]` is the
    /// differential from degree `lo + k + 1` to `lo + k`.
    pub fn new(p: u32, lo: i32, dims: Vec<usize>, d: Vec<Matrix>) -> Result<ChainComplex> {
        if d.len() + 1 != dims.len().max(1) {
            return Err(Error::Dimension(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                d.len()
            )));
        }
        for (k, m) in d.iter().enumerate() {
            if m.p() != p {
                return Err(Error::ModulusMismatch(p, m.p()));
            }
            if m.shape() != (dims[k], dims[k + 1]) {
                return Err(Error::Dimension(format!(
                    "differential out of degree {} has shape {:?}, expected {:?}",
                    lo + k as i32 + 1,
                    m.shape(),
                    (dims[k], dims[k + 1])
                )));
            }
        }
        for k in 1..d.len() {
            if !d[k - 1].mul(&d[k]).is_zero() {
                return Err(Error::NotDifferential(lo + k as i32 + 1));
            }
        }
        Ok(ChainComplex { p, lo, dims, d }.trimmed())
    }

    /// Builds a complex supported in `[lo, hi]` from closures.
    pub fn from_fn(
        p: u32,
        lo: i32,
        hi: i32,
        dim: impl Fn(i32) -> usize,
        d: impl Fn(i32) -> Matrix,
    ) -> Result<ChainComplex> {
        if hi < lo {
            return Ok(ChainComplex::zero(p));
        }
        let dims = (lo..=hi).map(&dim).collect();
        let ds = (lo + 1..=hi).map(d).collect();
        ChainComplex::new(p, lo, dims, ds)
    }

    fn trimmed(mut self) -> ChainComplex {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
            self.d.pop();
        }
        let lead = self.dims.iter().take_while(|&&n| n == 0).count();
        if lead == self.dims.len() {
            return ChainComplex::zero(self.p);
        }
        if lead > 0 {
            self.dims.drain(..lead);
            self.d.drain(..lead);
            self.lo += lead as i32;
        }
        self
    }

    /// `F_p` concentrated in degree `k`.
    pub fn sphere(p: u32, k: i32) -> ChainComplex {
        ChainComplex { p, lo: k, dims: vec![1], d: Vec::new() }
    }

    /// `D^k = C(S^{k-1})`.
    pub fn disk(p: u32, k: i32) -> ChainComplex {
        ChainComplex { p, lo: k - 1, dims: vec![1, 1], d: vec![Matrix::identity(p, 1)] }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Top degree; `lo - 1` for the zero complex.
    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, n: i32) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.degrees().map(|n| (n, self.dim(n))).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Differential out of degree `n`, of shape `dim(n-1) x dim(n)`.
    pub fn d(&self, n: i32) -> Matrix {
        match self.d_ref(n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.p, self.dim(n - 1), self.dim(n)),
        }
    }

    pub fn d_ref(&self, n: i32) -> Option<&Matrix> {
        if n <= self.lo || n > self.hi() {
            None
        } else {
            Some(&self.d[(n - self.lo - 1) as usize])
        }
    }

    /// Re-checks `d^2 = 0`.
    pub fn check(&self) -> Result<()> {
        for n in self.lo + 2..=self.hi() {
            if !self.d(n - 1).mul(&self.d(n)).is_zero() {
                return Err(Error::NotDifferential(n));
            }
        }
        Ok(())
    }

    /// Same dimensions shifted up by `k`, differential multiplied by `sign`.
    pub fn shifted(&self, k: i32, sign: i64) -> ChainComplex {
        ChainComplex {
            p: self.p,
            lo: self.lo + k,
            dims: self.dims.clone(),
            d: self.d.iter().map(|m| m.scale(sign)).collect(),
        }
    }
}

/// Union of the supports of several complexes.
pub fn degree_span(xs: &[&ChainComplex]) -> (i32, i32) {
    let nz: Vec<_> = xs.iter().filter(|x| !x.is_zero()).collect();
    if nz.is_empty() {
        return (0, -1);
    }
    (nz.iter().map(|x| x.lo()).min().unwrap(), nz.iter().map(|x| x.hi()).max().unwrap())
}

/// A degreewise linear map `X_n -> Y_{n+shift}` with no chain condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: Cx,
    target: Cx,
    shift: i32,
    // comps[k] acts on source degree source.lo + k
    comps: Vec<Matrix>,
}

/// A [`GradedMap`] of shift 0 commuting with the differentials.
pub type ChainMap = GradedMap;

fn same(a: &Cx, b: &Cx) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl GradedMap {
    /// Builds a map from a closure giving the component on each source degree.
    pub fn from_fn(source: &Cx, target: &Cx, shift: i32, f: impl Fn(i32) -> Matrix) -> Result<GradedMap> {
        let p = source.p();
        if target.p() != p {
            return Err(Error::ModulusMismatch(p, target.p()));
        }
        let mut comps = Vec::with_capacity(source.dims.len());
        for n in source.degrees() {
            let m = f(n);
            let want = (target.dim(n + shift), source.dim(n));
            if m.shape() != want || m.p() != p {
                return Err(Error::Dimension(format!(
                    "component in degree {n} has shape {:?}, expected {want:?}",
                    m.shape()
                )));
            }
            comps.push(m);
        }
        Ok(GradedMap { source: source.clone(), target: target.clone(), shift, comps })
    }

    /// Like [`GradedMap::from_fn`] but also checks the chain condition.
    pub fn chain_map(source: &Cx, target: &Cx, f: impl Fn(i32) -> Matrix) -> Result<ChainMap> {
        let m = GradedMap::from_fn(source, target, 0, f)?;
        if !m.commutes_with_d() {
            return Err(Error::NotChainMap("d f != f d".into()));
        }
        Ok(m)
    }

    pub fn zero(source: &Cx, target: &Cx, shift: i32) -> GradedMap {
        let p = source.p();
        GradedMap::from_fn(source, target, shift, |n| Matrix::zeros(p, target.dim(n + shift), source.dim(n)))
            .expect("zero map has consistent shapes")
    }

    pub fn identity(x: &Cx) -> ChainMap {
        GradedMap::from_fn(x, x, 0, |n| Matrix::identity(x.p(), x.dim(n))).expect("identity")
    }

    pub fn source(&self) -> &Cx {
        &self.source
    }

    pub fn target(&self) -> &Cx {
        &self.target
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn p(&self) -> u32 {
        self.source.p()
    }

    /// Component on source degree `n`.
    pub fn comp(&self, n: i32) -> Matrix {
        match self.comp_ref(n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.p(), self.target.dim(n + self.shift), self.source.dim(n)),
        }
    }

    pub fn comp_ref(&self, n: i32) -> Option<&Matrix> {
        if n < self.source.lo() || n > self.source.hi() {
            None
        } else {
            Some(&self.comps[(n - self.source.lo()) as usize])
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if !same(&other.target, &self.source) {
            return Err(Error::Dimension("composition of maps with mismatched complexes".into()));
        }
        let s = other.shift;
        GradedMap::from_fn(&other.source, &self.target, s + self.shift, |n| self.comp(n + s).mul(&other.comp(n)))
    }

    /// `self ∘ other`, panicking on mismatched complexes.
    pub fn after(&self, other: &GradedMap) -> GradedMap {
        self.compose(other).expect("composable maps")
    }

    fn check_parallel(&self, o: &GradedMap) -> Result<()> {
        if self.shift != o.shift || !same(&self.source, &o.source) || !same(&self.target, &o.target) {
            return Err(Error::Dimension("maps are not parallel".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &GradedMap) -> Result<GradedMap> {
        self.check_parallel(o)?;
        GradedMap::from_fn(&self.source, &self.target, self.shift, |n| self.comp(n).add(&o.comp(n)))
    }

    pub fn try_sub(&self, o: &GradedMap) -> Result<GradedMap> {
        self.check_parallel(o)?;
        GradedMap::from_fn(&self.source, &self.target, self.shift, |n| self.comp(n).sub(&o.comp(n)))
    }

    pub fn add(&self, o: &GradedMap) -> GradedMap {
        self.try_add(o).expect("parallel maps")
    }

    pub fn sub(&self, o: &GradedMap) -> GradedMap {
        self.try_sub(o).expect("parallel maps")
    }

    pub fn scale(&self, k: i64) -> GradedMap {
        GradedMap { comps: self.comps.iter().map(|m| m.scale(k)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> GradedMap {
        self.scale(-1)
    }

    /// Same matrices, new endpoints with matching dimensions.
    pub fn retarget(&self, source: &Cx, target: &Cx) -> Result<GradedMap> {
        GradedMap::from_fn(source, target, self.shift, |n| self.comp(n))
    }

    /// `d ∘ self - (-1)^shift self ∘ d`, which vanishes exactly for chain
    /// maps of any degree.
    pub fn commutator(&self) -> GradedMap {
        let s = self.shift;
        let sign = if s.rem_euclid(2) == 0 { 1 } else { -1 };
        GradedMap::from_fn(&self.source, &self.target, s - 1, |n| {
            let dphi = self.target.d(n + s).mul(&self.comp(n));
            let phid = self.comp(n - 1).mul(&self.source.d(n));
            dphi.sub(&phid.scale(sign))
        })
        .expect("shapes")
    }

    pub fn commutes_with_d(&self) -> bool {
        self.commutator().is_zero()
    }

    /// For a homotopy `H` of shift +1 this is `dH + Hd`.
    pub fn boundary(&self) -> GradedMap {
        self.commutator()
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(Matrix::is_injective)
    }

    pub fn is_surjective(&self) -> bool {
        self.target.degrees().all(|n| self.comp(n - self.shift).is_surjective())
    }
}

/// Direct sum with its block offsets.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub object: Cx,
    pub summands: Vec<Cx>,
}

impl DirectSum {
    pub fn new(p: u32, summands: Vec<Cx>) -> DirectSum {
        let refs: Vec<&ChainComplex> = summands.iter().map(|x| x.as_ref()).collect();
        let (lo, hi) = degree_span(&refs);
        let object = ChainComplex::from_fn(
            p,
            lo,
            hi,
            |n| summands.iter().map(|x| x.dim(n)).sum(),
            |n| {
                let ds: Vec<Matrix> = summands.iter().map(|x| x.d(n)).collect();
                Matrix::block_diag(p, &ds.iter().collect::<Vec<_>>())
            },
        )
        .expect("direct sum of complexes is a complex");
        DirectSum { object: Arc::new(object), summands }
    }

    pub fn offset(&self, i: usize, n: i32) -> usize {
        self.summands[..i].iter().map(|x| x.dim(n)).sum()
    }

    pub fn inclusion(&self, i: usize) -> ChainMap {
        let p = self.object.p();
        GradedMap::from_fn(&self.summands[i], &self.object, 0, |n| {
            let mut m = Matrix::zeros(p, self.object.dim(n), self.summands[i].dim(n));
            m.set_block(self.offset(i, n), 0, &Matrix::identity(p, self.summands[i].dim(n)));
            m
        })
        .expect("inclusion")
    }

    pub fn projection(&self, i: usize) -> ChainMap {
        let p = self.object.p();
        GradedMap::from_fn(&self.object, &self.summands[i], 0, |n| {
            let mut m = Matrix::zeros(p, self.summands[i].dim(n), self.object.dim(n));
            m.set_block(0, self.offset(i, n), &Matrix::identity(p, self.summands[i].dim(n)));
            m
        })
        .expect("projection")
    }

    /// The map out of the sum restricting to `maps[i]` on summand `i`.
    pub fn copair(&self, target: &Cx, maps: &[&GradedMap]) -> Result<GradedMap> {
        let shift = maps.first().map_or(0, |m| m.shift());
        GradedMap::from_fn(&self.object, target, shift, |n| {
            let blocks: Vec<Matrix> = maps.iter().map(|m| m.comp(n)).collect();
            Matrix::hcat(target.p(), target.dim(n + shift), &blocks.iter().collect::<Vec<_>>())
        })
    }

    /// The map into the sum with components `maps[i]`.
    pub fn pair(&self, source: &Cx, maps: &[&GradedMap]) -> Result<GradedMap> {
        let shift = maps.first().map_or(0, |m| m.shift());
        GradedMap::from_fn(source, &self.object, shift, |n| {
            let blocks: Vec<Matrix> = maps.iter().map(|m| m.comp(n)).collect();
            Matrix::vcat(source.p(), source.dim(n), &blocks.iter().collect::<Vec<_>>())
        })
    }
}

/// A quotient of a complex by a subcomplex, in canonical coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub object: Cx,
    /// The quotient map from the ambient complex.
    pub projection: ChainMap,
    sections: BTreeMap<i32, Matrix>,
}

impl Quotient {
    /// Quotient of `ambient` by the span of the columns of `relations(n)`
    /// in each degree. The span must be a subcomplex.
    pub fn new(ambient: &Cx, relations: impl Fn(i32) -> Matrix) -> Result<Quotient> {
        let p = ambient.p();
        let mut qs = BTreeMap::new();
        let mut ss = BTreeMap::new();
        for n in ambient.degrees() {
            let rel = relations(n);
            if rel.rows() != ambient.dim(n) {
                return Err(Error::Dimension(format!("relations in degree {n} have wrong row count")));
            }
            let c = rel.cokernel();
            if n > ambient.lo() {
                // the relation span must be closed under d
                let q_prev: &Matrix = &qs[&(n - 1)];
                if !q_prev.mul(&ambient.d(n)).mul(&rel).is_zero() {
                    return Err(Error::Other(format!("relations are not a subcomplex in degree {n}")));
                }
            }
            qs.insert(n, c.projection);
            ss.insert(n, c.section);
        }
        let dim = |n: i32| qs.get(&n).map_or(0, Matrix::rows);
        let object = ChainComplex::from_fn(p, ambient.lo(), ambient.hi(), dim, |n| {
            qs[&(n - 1)].mul(&ambient.d(n)).mul(&ss[&n])
        })?;
        let object = Arc::new(object);
        let projection = GradedMap::from_fn(ambient, &object, 0, |n| qs[&n].clone())?;
        Ok(Quotient { object, projection, sections: ss })
    }

    pub fn ambient(&self) -> &Cx {
        self.projection.source()
    }

    /// Degreewise linear section of the projection.
    pub fn section(&self, n: i32) -> Matrix {
        self.sections
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.object.p(), self.ambient().dim(n), self.object.dim(n)))
    }

    /// The section as a graded map (not a chain map in general).
    pub fn section_map(&self) -> GradedMap {
        GradedMap::from_fn(&self.object, self.ambient(), 0, |n| self.section(n)).expect("section")
    }

    /// Factors a map out of the ambient complex through the quotient.
    pub fn descend(&self, g: &GradedMap) -> Result<GradedMap> {
        if !same(g.source(), self.ambient()) {
            return Err(Error::Dimension("map does not start at the ambient complex".into()));
        }
        let u = GradedMap::from_fn(&self.object, g.target(), g.shift(), |n| g.comp(n).mul(&self.section(n)))?;
        if u.after(&self.projection) != *g {
            return Err(Error::Other("map does not vanish on the relations".into()));
        }
        Ok(u)
    }
}

/// Strict cofiber `cof(f)` with its structure map `r^f`.
#[derive(Clone, Debug)]
pub struct Cofiber {
    pub quotient: Quotient,
}

impl Cofiber {
    pub fn object(&self) -> &Cx {
        &self.quotient.object
    }

    pub fn r(&self) -> &ChainMap {
        &self.quotient.projection
    }
}

pub fn cofiber(f: &ChainMap) -> Result<Cofiber> {
    Ok(Cofiber { quotient: Quotient::new(f.target(), |n| f.comp(n))? })
}

/// Map between cofibers induced by a commuting square `g∘f = f'∘h`.
pub fn cofiber_map(a: &Cofiber, b: &Cofiber, g: &ChainMap) -> Result<ChainMap> {
    a.quotient.descend(&b.r().after(g))
}

/// Pushout of `Y <-f- X -g-> Z`, as `(Y ⊕ Z)/⟨(fx, -gx)⟩`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub sum: DirectSum,
    pub quotient: Quotient,
    pub in_left: ChainMap,
    pub in_right: ChainMap,
}

impl Pushout {
    pub fn object(&self) -> &Cx {
        &self.quotient.object
    }

    /// The map out of the pushout restricting to `a` on `Y` and `b` on `Z`.
    pub fn induced(&self, a: &ChainMap, b: &ChainMap) -> Result<ChainMap> {
        let t = a.target().clone();
        let m = self.sum.copair(&t, &[a, b])?;
        self.quotient.descend(&m).map_err(|_| Error::BadCocone("legs do not agree on the span".into()))
    }
}

pub fn pushout(f: &ChainMap, g: &ChainMap) -> Result<Pushout> {
    if !same(f.source(), g.source()) {
        return Err(Error::Dimension("pushout of maps with different sources".into()));
    }
    let p = f.p();
    let sum = DirectSum::new(p, vec![f.target().clone(), g.target().clone()]);
    let quotient = Quotient::new(&sum.object, |n| f.comp(n).vstack(&g.comp(n).neg()))?;
    let in_left = quotient.projection.after(&sum.inclusion(0));
    let in_right = quotient.projection.after(&sum.inclusion(1));
    Ok(Pushout { sum, quotient, in_left, in_right })
}

/// Mapping cylinder `X ⊗ I` with its end inclusions and collapse.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub object: Cx,
    pub i0: ChainMap,
    pub i1: ChainMap,
    pub l: ChainMap,
}

pub fn cylinder(x: &Cx) -> Cylinder {
    let p = x.p();
    let dim = |n: i32| 2 * x.dim(n) + x.dim(n - 1);
    let obj = ChainComplex::from_fn(p, x.lo(), x.hi() + 1, dim, |n| {
        let (a, b, c) = (x.dim(n), x.dim(n), x.dim(n - 1));
        let (a1, b1, c1) = (x.dim(n - 1), x.dim(n - 1), x.dim(n - 2));
        let mut m = Matrix::zeros(p, a1 + b1 + c1, a + b + c);
        let d = x.d(n);
        m.set_block(0, 0, &d);
        m.set_block(a1, a, &d);
        m.set_block(0, a + b, &Matrix::identity(p, c));
        m.set_block(a1, a + b, &Matrix::identity(p, c).neg());
        m.set_block(a1 + b1, a + b, &x.d(n - 1).neg());
        m
    })
    .expect("cylinder");
    let obj = Arc::new(obj);
    let inj = |slot: usize| {
        GradedMap::from_fn(x, &obj, 0, |n| {
            let mut m = Matrix::zeros(p, obj.dim(n), x.dim(n));
            m.set_block(slot * x.dim(n), 0, &Matrix::identity(p, x.dim(n)));
            m
        })
        .expect("cylinder end")
    };
    let l = GradedMap::from_fn(&obj, x, 0, |n| {
        let mut m = Matrix::zeros(p, x.dim(n), obj.dim(n));
        m.set_block(0, 0, &Matrix::identity(p, x.dim(n)));
        m.set_block(0, x.dim(n), &Matrix::identity(p, x.dim(n)));
        m
    })
    .expect("cylinder collapse");
    Cylinder { i0: inj(0), i1: inj(1), l, object: obj }
}

/// The cone `CX_n = X_n ⊕ X_{n-1}`, `d(y, x) = (dy + x, -dx)`.
pub fn cone(x: &Cx) -> Cx {
    let p = x.p();
    if x.is_zero() {
        return x.clone();
    }
    let obj = ChainComplex::from_fn(
        p,
        x.lo(),
        x.hi() + 1,
        |n| x.dim(n) + x.dim(n - 1),
        |n| {
            let (a, c) = (x.dim(n), x.dim(n - 1));
            let (a1, c1) = (x.dim(n - 1), x.dim(n - 2));
            let mut m = Matrix::zeros(p, a1 + c1, a + c);
            m.set_block(0, 0, &x.d(n));
            m.set_block(0, a, &Matrix::identity(p, c));
            m.set_block(a1, a, &x.d(n - 1).neg());
            m
        },
    )
    .expect("cone");
    Arc::new(obj)
}

/// `C^m X`.
pub fn cone_iter(x: &Cx, m: usize) -> Cx {
    (0..m).fold(x.clone(), |acc, _| cone(&acc))
}

/// The inclusion `i^X : X -> CX`.
pub fn cone_inclusion(x: &Cx) -> ChainMap {
    cone_inclusion_into(x, &cone(x))
}

fn cone_inclusion_into(x: &Cx, cx: &Cx) -> ChainMap {
    let p = x.p();
    GradedMap::from_fn(x, cx, 0, |n| {
        let mut m = Matrix::zeros(p, cx.dim(n), x.dim(n));
        m.set_block(0, 0, &Matrix::identity(p, x.dim(n)));
        m
    })
    .expect("cone inclusion")
}

/// `Cf = diag(f_n, f_{n-1})`.
pub fn cone_map(f: &ChainMap) -> ChainMap {
    cone_map_between(f, &cone(f.source()), &cone(f.target()))
}

pub fn cone_map_between(f: &ChainMap, cs: &Cx, ct: &Cx) -> ChainMap {
    GradedMap::from_fn(cs, ct, 0, |n| Matrix::block_diag(f.p(), &[&f.comp(n), &f.comp(n - 1)])).expect("cone map")
}

/// `C^m f`.
pub fn cone_map_iter(f: &ChainMap, m: usize) -> ChainMap {
    (0..m).fold(f.clone(), |acc, _| cone_map(&acc))
}

/// Offsets of the blocks of `(C^m X)_n`. Blocks are bit strings read with
/// the outermost cone as the most significant bit, in numeric order; block
/// `b` is a copy of `X_{n - popcount(b)}`.
pub fn cone_block_offsets(x: &ChainComplex, m: usize, n: i32) -> Vec<usize> {
    let mut out = Vec::with_capacity((1 << m) + 1);
    let mut off = 0;
    for b in 0..1usize << m {
        out.push(off);
        off += x.dim(n - b.count_ones() as i32);
    }
    out.push(off);
    out
}

/// Inserts a zero bit into an `(m-1)`-bit block string at position `t`,
/// counted from the most significant end.
fn insert_zero_bit(b: usize, m: usize, t: usize) -> usize {
    let low_bits = m - 1 - t;
    let high = b >> low_bits;
    let low = b & ((1 << low_bits) - 1);
    (high << (low_bits + 1)) | low
}

/// Iterated cones `C^0 X, ..., C^m X` sharing storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTower {
    levels: Vec<Cx>,
}

impl ConeTower {
    pub fn new(x: &Cx, m: usize) -> ConeTower {
        let mut levels = vec![x.clone()];
        for _ in 0..m {
            let next = cone(levels.last().unwrap());
            levels.push(next);
        }
        ConeTower { levels }
    }

    pub fn base(&self) -> &Cx {
        &self.levels[0]
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    /// `C^k X`.
    pub fn get(&self, k: usize) -> &Cx {
        &self.levels[k]
    }

    /// `δ_r = C^{m-r}(i^{C^{r-1}X}) : C^{m-1}X -> C^m X`, a 0/1 block
    /// inclusion.
    pub fn delta(&self, m: usize, r: usize) -> ChainMap {
        assert!(1 <= r && r <= m && m <= self.height(), "delta index out of range");
        let x = self.base();
        let p = x.p();
        let (src, tgt) = (self.get(m - 1), self.get(m));
        GradedMap::from_fn(src, tgt, 0, |n| {
            let so = cone_block_offsets(x, m - 1, n);
            let to = cone_block_offsets(x, m, n);
            let mut mat = Matrix::zeros(p, tgt.dim(n), src.dim(n));
            for b in 0..1usize << (m - 1) {
                let k = so[b + 1] - so[b];
                let c = insert_zero_bit(b, m, m - r);
                mat.set_block(to[c], so[b], &Matrix::identity(p, k));
            }
            mat
        })
        .expect("delta")
    }

    /// Restriction of a map out of `C^m X` to the top block (all bits set):
    /// a graded map `X -> Y` of shift `m`.
    pub fn top_block(&self, f: &ChainMap, m: usize) -> GradedMap {
        let x = self.base();
        GradedMap::from_fn(x, f.target(), m as i32, |n| {
            let top = n + m as i32;
            let off = cone_block_offsets(x, m, top);
            let full = (1usize << m) - 1;
            f.comp(top).block(0, f.target().dim(top), off[full], x.dim(n))
        })
        .expect("top block")
    }
}

/// Mapping cylinder of `λ : L -> Y`: `M = L ⊕ L[-1] ⊕ Y` with
/// `d(a, c, y) = (da + c, -dc, dy - λc)`, the inclusion `j(a) = (a, 0, 0)`
/// and the retraction `ρ(a, c, y) = λa + y`.
#[derive(Clone, Debug)]
pub struct MappingCylinder {
    pub object: Cx,
    pub j: ChainMap,
    pub rho: ChainMap,
}

pub fn mapping_cylinder(lambda: &ChainMap) -> MappingCylinder {
    let l = lambda.source();
    let y = lambda.target();
    let p = l.p();
    let (lo, hi) = degree_span(&[l, y]);
    let dim = |n: i32| l.dim(n) + l.dim(n - 1) + y.dim(n);
    let obj = ChainComplex::from_fn(p, lo, hi + 1, dim, |n| {
        let (a, c, b) = (l.dim(n), l.dim(n - 1), y.dim(n));
        let (a1, c1, b1) = (l.dim(n - 1), l.dim(n - 2), y.dim(n - 1));
        let mut m = Matrix::zeros(p, a1 + c1 + b1, a + c + b);
        m.set_block(0, 0, &l.d(n));
        m.set_block(0, a, &Matrix::identity(p, c));
        m.set_block(a1, a, &l.d(n - 1).neg());
        m.set_block(a1 + c1, a, &lambda.comp(n - 1).neg());
        m.set_block(a1 + c1, a + c, &y.d(n));
        m
    })
    .expect("mapping cylinder");
    let obj = Arc::new(obj);
    let j = GradedMap::from_fn(l, &obj, 0, |n| {
        let mut m = Matrix::zeros(p, obj.dim(n), l.dim(n));
        m.set_block(0, 0, &Matrix::identity(p, l.dim(n)));
        m
    })
    .expect("cylinder inclusion");
    let rho = GradedMap::from_fn(&obj, y, 0, |n| {
        let mut m = Matrix::zeros(p, y.dim(n), obj.dim(n));
        m.set_block(0, 0, &lambda.comp(n));
        m.set_block(0, l.dim(n) + l.dim(n - 1), &Matrix::identity(p, y.dim(n)));
        m
    })
    .expect("cylinder retraction");
    MappingCylinder { object: obj, j, rho }
}

/// The collapse `CX -> Σ̃X = cof(i^X)`.
pub fn cone_structure(x: &Cx) -> Cofiber {
    cofiber(&cone_inclusion(x)).expect("cofiber of the cone inclusion")
}

/// `Σ̃X = cof(i^X)`.
pub fn suspension_tilde(x: &Cx) -> Cx {
    cone_structure(x).object().clone()
}

pub fn suspension_tilde_iter(x: &Cx, m: usize) -> Cx {
    (0..m).fold(x.clone(), |acc, _| suspension_tilde(&acc))
}

/// Homotopy cofiber `hcof(f) = CX ∪_X Y`, with its comparison
/// `ζ_f : hcof(f) -> cof(f)`.
#[derive(Clone, Debug)]
pub struct HCofiber {
    pub pushout: Pushout,
    pub zeta: ChainMap,
    pub cofiber: Cofiber,
}

impl HCofiber {
    pub fn object(&self) -> &Cx {
        self.pushout.object()
    }

    /// `CX -> hcof(f)`.
    pub fn in_cone(&self) -> &ChainMap {
        &self.pushout.in_left
    }

    /// `Y -> hcof(f)`.
    pub fn in_target(&self) -> &ChainMap {
        &self.pushout.in_right
    }
}

pub fn hcofiber(f: &ChainMap) -> Result<HCofiber> {
    let i = cone_inclusion(f.source());
    let pushout = pushout(&i, f)?;
    let cof = cofiber(f)?;
    let zero = GradedMap::zero(i.target(), cof.object(), 0);
    let zeta = pushout.induced(&zero, cof.r())?;
    Ok(HCofiber { pushout, zeta, cofiber: cof })
}

/// `ΣX = hcof(i^X)`.
pub fn suspension(x: &Cx) -> HCofiber {
    hcofiber(&cone_inclusion(x)).expect("hcof of the cone inclusion")
}

/// `F(y, x) = gf(y) + H(x)`: turns a homotopy `dH + Hd = gf` into a map out
/// of the cone.
pub fn nullhomotopy_to_cone_map(gf: &ChainMap, h: &GradedMap) -> Result<ChainMap> {
    if h.shift() != 1 || !same(h.source(), gf.source()) || !same(h.target(), gf.target()) {
        return Err(Error::NotNullhomotopy("homotopy has the wrong shape".into()));
    }
    if h.boundary() != *gf {
        return Err(Error::NotNullhomotopy("dH + Hd != gf".into()));
    }
    let x = gf.source();
    let cx = cone(x);
    GradedMap::chain_map(&cx, gf.target(), |n| gf.comp(n).hstack(&h.comp(n - 1)))
}

/// Inverse of [`nullhomotopy_to_cone_map`]: returns `(F∘i, H)`.
pub fn cone_map_to_nullhomotopy(f: &ChainMap, x: &Cx) -> Result<(ChainMap, GradedMap)> {
    let cx = cone(x);
    if !same(f.source(), &cx) {
        return Err(Error::NotNullhomotopy("map does not start at the cone".into()));
    }
    if !f.commutes_with_d() {
        return Err(Error::NotChainMap("cone map".into()));
    }
    let z = f.target();
    let gf = f.after(&cone_inclusion_into(x, &cx));
    let h = GradedMap::from_fn(x, z, 1, |n| f.comp(n + 1).block(0, z.dim(n + 1), x.dim(n + 1), x.dim(n)))?;
    Ok((gf, h))
}

/// A strong deformation retraction of a complex onto its homology:
/// `id - ι π = dh + hd` in every degree.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub complex: Cx,
    iota: BTreeMap<i32, Matrix>,
    pi: BTreeMap<i32, Matrix>,
    h: BTreeMap<i32, Matrix>,
}

impl Contraction {
    pub fn new(x: &Cx) -> Contraction {
        let p = x.p();
        // complement of the cycles, as coordinate vectors
        let mut comp = BTreeMap::new();
        let mut cycles = BTreeMap::new();
        for n in x.degrees() {
            let z = x.d(n).kernel();
            let kept = z.coordinate_complement();
            let c = Matrix::identity(p, x.dim(n)).select_cols(&kept);
            cycles.insert(n, z);
            comp.insert(n, c);
        }
        let mut iota = BTreeMap::new();
        let mut pi = BTreeMap::new();
        let mut h = BTreeMap::new();
        for n in x.degrees() {
            let z = &cycles[&n];
            let c_up = comp.get(&(n + 1)).cloned().unwrap_or_else(|| Matrix::zeros(p, x.dim(n + 1), 0));
            let b = x.d(n + 1).mul(&c_up);
            let beta = z.solve(&b).expect("shapes").expect("boundaries are cycles").particular;
            let keep = beta.coordinate_complement();
            let hom = z.select_cols(&keep);
            let c = &comp[&n];
            let basis = Matrix::hcat(p, x.dim(n), &[&b, &hom, c]);
            let inv = basis.inverse().expect("boundaries, homology and complement span");
            let (nb, nh) = (b.cols(), hom.cols());
            pi.insert(n, inv.block(nb, nh, 0, x.dim(n)));
            h.insert(n, c_up.mul(&inv.block(0, nb, 0, x.dim(n))));
            iota.insert(n, hom);
        }
        Contraction { complex: x.clone(), iota, pi, h }
    }

    pub fn homology_dim(&self, n: i32) -> usize {
        self.iota.get(&n).map_or(0, Matrix::cols)
    }

    pub fn iota(&self, n: i32) -> Matrix {
        self.iota.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.complex.p(), self.complex.dim(n), 0))
    }

    pub fn pi(&self, n: i32) -> Matrix {
        self.pi.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.complex.p(), 0, self.complex.dim(n)))
    }

    /// `h_n : X_n -> X_{n+1}`.
    pub fn h(&self, n: i32) -> Matrix {
        self.h
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.complex.p(), self.complex.dim(n + 1), self.complex.dim(n)))
    }
}

/// Nonzero homology dimensions.
pub fn homology(x: &Cx) -> BTreeMap<i32, usize> {
    let c = Contraction::new(x);
    x.degrees().map(|n| (n, c.homology_dim(n))).filter(|&(_, k)| k > 0).collect()
}

/// Matrices of `H_n(f)` in the bases chosen by [`Contraction`], for every
/// degree where source or target homology is nonzero.
pub fn induced_on_homology(f: &ChainMap) -> BTreeMap<i32, Matrix> {
    let cs = Contraction::new(f.source());
    let ct = Contraction::new(f.target());
    induced_with(f, &cs, &ct)
}

fn induced_with(f: &ChainMap, cs: &Contraction, ct: &Contraction) -> BTreeMap<i32, Matrix> {
    let (lo, hi) = degree_span(&[f.source(), f.target()]);
    let mut out = BTreeMap::new();
    for n in lo..=hi {
        if cs.homology_dim(n) + ct.homology_dim(n + f.shift()) == 0 {
            continue;
        }
        out.insert(n, ct.pi(n + f.shift()).mul(&f.comp(n)).mul(&cs.iota(n)));
    }
    out
}

pub fn is_quasi_iso(f: &ChainMap) -> bool {
    induced_on_homology(f).values().all(|m| m.rows() == m.cols() && m.inverse().is_some())
}

/// True iff the map induces zero on homology.
pub fn is_zero_on_homology(f: &GradedMap) -> bool {
    induced_on_homology(f).values().all(Matrix::is_zero)
}

/// Finds `H` of shift `phi.shift() + 1` with `dH + (-1)^s Hd = phi`, where
/// `s = phi.shift()` and `phi` itself satisfies `d phi = (-1)^s phi d`.
/// Uses the formula `H = h phi + (-1)^s ι π phi h`; a solution exists iff
/// `phi` is zero on homology.
pub fn solve_graded_homotopy(phi: &GradedMap) -> Option<GradedMap> {
    let cs = Contraction::new(phi.source());
    let ct = Contraction::new(phi.target());
    solve_graded_homotopy_with(phi, &cs, &ct)
}

pub fn solve_graded_homotopy_with(phi: &GradedMap, cs: &Contraction, ct: &Contraction) -> Option<GradedMap> {
    if !phi.commutes_with_d() {
        return None;
    }
    if !induced_with(phi, cs, ct).values().all(Matrix::is_zero) {
        return None;
    }
    let s = phi.shift();
    let sign = if s.rem_euclid(2) == 0 { 1 } else { -1 };
    let h = GradedMap::from_fn(phi.source(), phi.target(), s + 1, |n| {
        let a = ct.h(n + s).mul(&phi.comp(n));
        let b = ct.iota(n + s + 1).mul(&ct.pi(n + s + 1)).mul(&phi.comp(n + 1)).mul(&cs.h(n));
        a.add(&b.scale(sign))
    })
    .expect("shapes");
    debug_assert_eq!(h.commutator(), *phi);
    Some(h)
}

/// A homotopy `H` with `dH + Hd = f - g`, if one exists.
pub fn solve_homotopy(f: &ChainMap, g: &ChainMap) -> Option<GradedMap> {
    let phi = f.try_sub(g).ok()?;
    let h = solve_graded_homotopy(&phi)?;
    (h.boundary() == phi).then_some(h)
}

/// Extends a map killed on homology over the cone: returns `F : CX -> Z`
/// with `F ∘ i = phi`.
pub fn solve_cone_extension(phi: &ChainMap) -> Option<ChainMap> {
    let zero = GradedMap::zero(phi.source(), phi.target(), 0);
    let h = solve_homotopy(phi, &zero)?;
    nullhomotopy_to_cone_map(phi, &h).ok()
}
