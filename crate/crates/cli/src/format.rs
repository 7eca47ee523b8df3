//! The system file: a restricted JSON document with fixed key sets.
//!
//! Complexes and maps are named. Matrices are row-major lists of rows with
//! entries in `0..p`; their shapes are implied by the complexes involved.
//! Maps used as nullhomotopies omit `source` and `target`, which the system
//! determines (`C^k X_j -> X_{j+k+1}` for cubical systems and
//! `CΣ̃^{m-1} X_j -> cof(F̃^(m-1)_{j+1})` for recursive ones).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use toda_core::chain::{cone, ChainComplex, Cx, GradedMap};
use toda_core::toda_cubical::CubicalTodaSystem;
use toda_core::toda_recursive::RecursiveTodaSystem;
use toda_core::{linalg::check_prime, Matrix};

use crate::error::InputError;

pub const SCHEMA: u32 = 1;

pub type Rows = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub schema: u32,
    pub p: u32,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
}

/// `dims[k]` is the dimension in degree `lo + k`; `d[k]` is the
/// differential out of degree `lo + k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub lo: i32,
    pub dims: Vec<usize>,
    pub d: Vec<Rows>,
}

/// `components[k]` is the matrix out of source degree `lo + k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub shift: i32,
    pub components: Vec<Rows>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cubical,
    Recursive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub kind: Kind,
    pub order: usize,
    pub objects: Vec<String>,
    pub maps: Vec<String>,
    #[serde(default)]
    pub nullhomotopies: Vec<NullRef>,
}

/// `F^(k)_j` (cubical) or `F̃^(k)_j` (recursive).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullRef {
    pub k: usize,
    pub j: usize,
    pub map: String,
}

#[derive(Clone, Debug)]
pub enum System {
    Cubical(CubicalTodaSystem),
    Recursive(RecursiveTodaSystem),
}

impl System {
    pub fn order(&self) -> usize {
        match self {
            System::Cubical(s) => s.order(),
            System::Recursive(s) => s.order(),
        }
    }
}

/// A parsed file together with its text, used for locating diagnostics.
pub struct Parsed {
    pub file: SystemFile,
    text: String,
}

pub fn parse(text: &str) -> Result<Parsed, InputError> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    if file.schema != SCHEMA {
        return Err(InputError::Schema(file.schema));
    }
    check_prime(file.p as u64).map_err(|e| InputError::Field(e.to_string()))?;
    Ok(Parsed { file, text: text.to_string() })
}

pub fn serialize(file: &SystemFile) -> String {
    to_json(&serde_json::to_value(file).expect("plain data serializes"))
}

/// Indented JSON with arrays of scalars (matrix rows, dims) kept on one line.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("json"));
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("json"));
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        _ => out.push_str(&serde_json::to_string(v).expect("json")),
    }
}

/// Line and column of the first `"key":` in the text.
fn locate(text: &str, key: &str) -> Option<(usize, usize)> {
    let pat = format!("\"{key}\"");
    let mut from = 0;
    while let Some(i) = text[from..].find(&pat) {
        let at = from + i;
        let rest = text[at + pat.len()..].trim_start();
        if rest.starts_with(':') {
            let before = &text[..at];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
            return Some((line, column));
        }
        from = at + pat.len();
    }
    None
}

fn matrix(p: u32, rows: usize, cols: usize, entries: &Rows, at: &str) -> Result<Matrix, InputError> {
    if let Some(v) = entries.iter().flatten().find(|&&v| v < 0 || v >= p as i64) {
        return Err(InputError::Dimension { at: at.to_string(), msg: format!("entry {v} is not reduced mod {p}") });
    }
    Matrix::from_rows_sized(p, rows, cols, entries)
        .map_err(|_| InputError::Dimension { at: at.to_string(), msg: format!("expected a {rows}x{cols} matrix") })
}

fn rows_of(m: &Matrix) -> Rows {
    m.to_rows()
}

impl Parsed {
    fn loc(&self, key: &str) -> Option<(usize, usize)> {
        locate(&self.text, key)
    }

    fn unresolved(&self, name: &str, at: &str, key: &str) -> InputError {
        InputError::Unresolved { name: name.to_string(), at: at.to_string(), loc: self.loc(key) }
    }

    fn complexes(&self) -> Result<BTreeMap<String, Cx>, InputError> {
        let p = self.file.p;
        let mut out = BTreeMap::new();
        for (name, c) in &self.file.complexes {
            let at = format!("complexes.{name}");
            let need = c.dims.len().saturating_sub(1);
            if c.d.len() != need {
                return Err(InputError::Dimension {
                    at,
                    msg: format!("{} degrees need {need} differentials, got {}", c.dims.len(), c.d.len()),
                });
            }
            let d = c
                .d
                .iter()
                .enumerate()
                .map(|(k, rows)| matrix(p, c.dims[k], c.dims[k + 1], rows, &format!("{at}.d[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let cx = ChainComplex::new(p, c.lo, c.dims.clone(), d).map_err(|e| match e {
                toda_core::Error::NotDifferential(n) => {
                    InputError::NotDifferential { name: name.clone(), degree: n, loc: self.loc(name) }
                }
                e => InputError::Dimension { at: at.clone(), msg: e.to_string() },
            })?;
            out.insert(name.clone(), Arc::new(cx));
        }
        Ok(out)
    }

    /// A named map between the given complexes.
    fn graded(&self, name: &str, source: &Cx, target: &Cx) -> Result<GradedMap, InputError> {
        let spec = self.file.maps.get(name).expect("resolved by caller");
        let at = format!("maps.{name}");
        let degrees: Vec<i32> = source.degrees().collect();
        let count = if source.is_zero() { 0 } else { degrees.len() };
        if spec.components.len() != count {
            return Err(InputError::Dimension {
                at,
                msg: format!("source has {count} degrees, got {} components", spec.components.len()),
            });
        }
        let mats = (0..count)
            .map(|k| {
                let n = degrees[k];
                matrix(
                    self.file.p,
                    target.dim(n + spec.shift),
                    source.dim(n),
                    &spec.components[k],
                    &format!("{at}.components[{k}]"),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        GradedMap::from_fn(source, target, spec.shift, |n| {
            let k = (n - source.lo()) as usize;
            mats[k].clone()
        })
        .map_err(|e| InputError::Dimension { at, msg: e.to_string() })
    }

    /// Resolves and builds the system. Missing nullhomotopies are left for
    /// the caller to solve.
    pub fn system(&self) -> Result<System, InputError> {
        let spec = self.file.system.as_ref().ok_or(InputError::NoSystem)?;
        let cxs = self.complexes()?;
        let objects = spec
            .objects
            .iter()
            .map(|o| cxs.get(o).cloned().ok_or_else(|| self.unresolved(o, "system.objects", "objects")))
            .collect::<Result<Vec<_>, _>>()?;
        if spec.maps.len() + 1 != objects.len() {
            return Err(InputError::Dimension {
                at: "system".into(),
                msg: format!("{} objects need {} maps, got {}", objects.len(), objects.len().saturating_sub(1), spec.maps.len()),
            });
        }
        let mut maps = Vec::new();
        for (i, m) in spec.maps.iter().enumerate() {
            let ms = self.file.maps.get(m).ok_or_else(|| self.unresolved(m, "system.maps", "maps"))?;
            let at = format!("maps.{m}");
            let (Some(src), Some(tgt)) = (&ms.source, &ms.target) else {
                return Err(InputError::Dimension { at, msg: "maps of the sequence need a source and a target".into() });
            };
            let s = cxs.get(src).ok_or_else(|| self.unresolved(src, &at, m))?;
            let t = cxs.get(tgt).ok_or_else(|| self.unresolved(tgt, &at, m))?;
            if s != &objects[i] || t != &objects[i + 1] || ms.shift != 0 {
                return Err(InputError::Dimension {
                    at,
                    msg: format!("f_{} must be a degree-0 map X_{} -> X_{}", i + 1, i + 1, i + 2),
                });
            }
            let f = self.graded(m, s, t)?;
            if !f.commutes_with_d() {
                return Err(InputError::NotChainMap { name: m.clone(), loc: self.loc(m) });
            }
            maps.push(f);
        }
        let mut nulls: Vec<&NullRef> = spec.nullhomotopies.iter().collect();
        nulls.sort_by_key(|r| (r.k, r.j));
        for r in &nulls {
            let ms = self.file.maps.get(&r.map).ok_or_else(|| self.unresolved(&r.map, "system.nullhomotopies", "nullhomotopies"))?;
            if ms.source.is_some() || ms.target.is_some() || ms.shift != 0 {
                return Err(InputError::Dimension {
                    at: format!("maps.{}", r.map),
                    msg: "a nullhomotopy takes its source and target from the system and has shift 0".into(),
                });
            }
        }
        let at = |r: &NullRef| format!("nullhomotopy ({}, {}) = {}", r.k, r.j, r.map);
        let order = spec.order;
        let core = |e: toda_core::Error| InputError::Dimension { at: "system".into(), msg: e.to_string() };
        match spec.kind {
            Kind::Cubical => {
                let mut s = CubicalTodaSystem::new(order, objects, maps, BTreeMap::new()).map_err(core)?;
                for r in nulls {
                    if !s.in_range(r.k, r.j) {
                        return Err(InputError::Dimension { at: at(r), msg: "index out of range".into() });
                    }
                    let f = self.graded(&r.map, s.tower(r.j).get(r.k), s.x(r.j + r.k + 1))?;
                    s.set(r.k, r.j, f).map_err(core)?;
                }
                let rep = s.validate();
                if let Some(e) = rep.failures.first() {
                    return Err(InputError::Nullhomotopy {
                        at: format!("F^({})_{}", e.k, e.j),
                        msg: if e.r == 0 { "not a chain map".into() } else { format!("face equation r = {} fails", e.r) },
                        differences: rep.failures.iter().map(|e| (format!("({}, {}, {})", e.k, e.j, e.r), e.difference.clone())).collect(),
                    });
                }
                Ok(System::Cubical(s))
            }
            Kind::Recursive => {
                let mut s = RecursiveTodaSystem::new(order, objects, maps, BTreeMap::new()).map_err(core)?;
                for r in nulls {
                    if !s.in_range(r.k, r.j) {
                        return Err(InputError::Dimension { at: at(r), msg: "index out of range".into() });
                    }
                    let (m, j) = (r.k, r.j);
                    let (src, tgt, phi) = match (s.alpha(m - 1, j), s.beta(m - 1, j + 1)) {
                        (Ok(a), Ok(b)) => (cone(a.source()), b.target().clone(), s.composite(m, j).map_err(core)?),
                        _ => {
                            return Err(InputError::Dimension { at: at(r), msg: "a lower stage is missing".into() })
                        }
                    };
                    let f = self.graded(&r.map, &src, &tgt)?;
                    if let Err(e) = s.set(m, j, f.clone()) {
                        let i = toda_core::chain::cone_inclusion(phi.source());
                        let diff = f.compose(&i).ok().and_then(|fi| fi.try_sub(&phi).ok());
                        return Err(InputError::Nullhomotopy {
                            at: format!("F~^({m})_{j}"),
                            msg: e.to_string(),
                            differences: diff.into_iter().map(|d| ("F o i - composite".to_string(), d)).collect(),
                        });
                    }
                }
                Ok(System::Recursive(s))
            }
        }
    }
}

fn complex_spec(x: &Cx) -> ComplexSpec {
    if x.is_zero() {
        return ComplexSpec { lo: 0, dims: vec![], d: vec![] };
    }
    ComplexSpec {
        lo: x.lo(),
        dims: x.degrees().map(|n| x.dim(n)).collect(),
        d: (x.lo() + 1..=x.hi()).map(|n| rows_of(&x.d(n))).collect(),
    }
}

fn map_spec(f: &GradedMap, ends: Option<(String, String)>) -> MapSpec {
    let x = f.source();
    let components = if x.is_zero() { vec![] } else { x.degrees().map(|n| rows_of(&f.comp(n))).collect() };
    let (source, target) = match ends {
        Some((s, t)) => (Some(s), Some(t)),
        None => (None, None),
    };
    MapSpec { source, target, shift: f.shift(), components }
}

/// The file describing a system; objects that are equal share a name.
pub fn to_file(s: &System) -> SystemFile {
    let (kind, order, objects, maps, nulls): (Kind, usize, Vec<Cx>, Vec<GradedMap>, Vec<((usize, usize), GradedMap)>) =
        match s {
            System::Cubical(s) => (
                Kind::Cubical,
                s.order(),
                s.objects(),
                s.maps().to_vec(),
                s.nullhomotopies().iter().map(|(k, v)| (*k, v.clone())).collect(),
            ),
            System::Recursive(s) => (
                Kind::Recursive,
                s.order(),
                s.objects().to_vec(),
                s.maps().to_vec(),
                s.nullhomotopies().iter().map(|(k, v)| (*k, v.clone())).collect(),
            ),
        };
    let p = objects[0].p();
    let mut complexes = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    for (i, x) in objects.iter().enumerate() {
        let prior = objects[..i].iter().position(|y| y == x);
        let name = match prior {
            Some(k) => names[k].clone(),
            None => {
                let n = format!("X{}", i + 1);
                complexes.insert(n.clone(), complex_spec(x));
                n
            }
        };
        names.push(name);
    }
    let mut map_specs = BTreeMap::new();
    let mut map_names = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        let n = format!("f{}", i + 1);
        map_specs.insert(n.clone(), map_spec(f, Some((names[i].clone(), names[i + 1].clone()))));
        map_names.push(n);
    }
    let mut null_refs = Vec::new();
    for ((k, j), f) in nulls {
        let n = format!("F{k}_{j}");
        map_specs.insert(n.clone(), map_spec(&f, None));
        null_refs.push(NullRef { k, j, map: n });
    }
    SystemFile {
        schema: SCHEMA,
        p,
        complexes,
        maps: map_specs,
        system: Some(SystemSpec { kind, order, objects: names, maps: map_names, nullhomotopies: null_refs }),
    }
}
