//! Field configuration files.
//!
//! ```text
//! file    := line*
//! line    := blank | "#" comment | "[" section "]" | key value*
//! section := "field" | "atom" | "plan"
//!
//! [field]  group K<n>           required, before any atom
//!          class <name>         optional, must match the group
//!          mean <c1 .. cm>      m = trivial multiplicity, default zeros
//! [atom]   p <x y z>            or: lambda <r>  (point on the z axis)
//!          weight <w>
//!          stratum <n>          optional, checked against p
//!          f <row>              d lines of d entries, row-major
//!          u <u1 .. u29>        K2 only, instead of the f rows
//! [plan]   seed <n>  lmax <n>  n <n>  tolerance <x>
//!          grid <file | lattice:nx,ny,nz,h>
//!          pair <x y z x' y' z'>   repeatable
//! ```
//!
//! `f` is in host coordinates of the group (the fixed basis order printed by
//! `elastrf basis`). Numbers are written back with 17 significant digits.

use elastrf_core::covariance::{from_u, U_COUNT};
use elastrf_core::{FMatrix, FieldSpec, GroupId, SpectralAtom, Vec3};
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {field}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub msg: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanDefaults {
    pub seed: Option<u64>,
    pub l_max: Option<usize>,
    pub n: Option<usize>,
    pub tolerance: Option<f64>,
    pub grid: Option<String>,
    pub pairs: Vec<(Vec3, Vec3)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub spec: FieldSpec,
    pub plan: PlanDefaults,
}

#[derive(PartialEq)]
enum Section {
    None,
    Field,
    Atom,
    Plan,
}

struct AtomDraft {
    line: usize,
    p: Option<Vec3>,
    weight: Option<f64>,
    stratum: Option<usize>,
    rows: Vec<Vec<f64>>,
    u: Option<Vec<f64>>,
}

fn err(line: usize, field: &str, msg: impl Into<String>) -> ParseError {
    ParseError { line, field: field.to_string(), msg: msg.into() }
}

fn numbers(line: usize, key: &str, vals: &[&str]) -> Result<Vec<f64>, ParseError> {
    vals.iter()
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line, key, format!("`{v}` is not a finite number")))
        })
        .collect()
}

fn exactly(line: usize, key: &str, vals: &[&str], n: usize) -> Result<Vec<f64>, ParseError> {
    if vals.len() != n {
        return Err(err(line, key, format!("expected {n} values, got {}", vals.len())));
    }
    numbers(line, key, vals)
}

fn single<T: std::str::FromStr>(line: usize, key: &str, vals: &[&str]) -> Result<T, ParseError> {
    match vals {
        [v] => v.parse().map_err(|_| err(line, key, format!("cannot parse `{v}`"))),
        _ => Err(err(line, key, format!("expected one value, got {}", vals.len()))),
    }
}

fn finish(a: AtomDraft, group: GroupId) -> Result<SpectralAtom, ParseError> {
    let d = group.host_dim();
    let p = a.p.ok_or_else(|| err(a.line, "p", "atom has no wavevector"))?;
    let weight = a.weight.ok_or_else(|| err(a.line, "weight", "atom has no weight"))?;
    let f = match (a.u, a.rows.is_empty()) {
        (Some(_), false) => return Err(err(a.line, "f", "give either f rows or u, not both")),
        (Some(u), true) => from_u(&u).map_err(|e| err(a.line, "u", e.to_string()))?,
        (None, true) => return Err(err(a.line, "f", "atom has no density")),
        (None, false) => {
            if a.rows.len() != d {
                return Err(err(a.line, "f", format!("expected {d} rows for {group}, got {}", a.rows.len())));
            }
            FMatrix::from_row_slice(d, &a.rows.concat()).map_err(|e| err(a.line, "f", e.to_string()))?
        }
    };
    Ok(SpectralAtom { p, weight, f, stratum: a.stratum })
}

pub fn parse(text: &str) -> Result<Config, ParseError> {
    let mut section = Section::None;
    let mut group: Option<GroupId> = None;
    let mut mean: Option<Vec<f64>> = None;
    let mut atoms = Vec::new();
    let mut draft: Option<AtomDraft> = None;
    let mut plan = PlanDefaults::default();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some(a) = draft.take() {
                atoms.push(finish(a, group.unwrap())?);
            }
            section = match name.trim() {
                "field" => Section::Field,
                "atom" => {
                    if group.is_none() {
                        return Err(err(line, "atom", "the [field] group must come first"));
                    }
                    draft = Some(AtomDraft { line, p: None, weight: None, stratum: None, rows: vec![], u: None });
                    Section::Atom
                }
                "plan" => Section::Plan,
                other => return Err(err(line, "section", format!("unknown section [{other}]"))),
            };
            continue;
        }
        let mut words = body.split_whitespace();
        let key = words.next().unwrap();
        let vals: Vec<&str> = words.collect();
        match section {
            Section::None => return Err(err(line, key, "entry outside a section")),
            Section::Field => match key {
                "group" => {
                    if group.is_some() {
                        return Err(err(line, key, "group given twice"));
                    }
                    let g: String = single(line, key, &vals)?;
                    group = Some(g.parse().map_err(|e: elastrf_core::groups::GroupError| err(line, key, e.to_string()))?);
                }
                "class" => {
                    let g = group.ok_or_else(|| err(line, key, "give the group first"))?;
                    let c = vals.join(" ");
                    if !c.eq_ignore_ascii_case(g.class().name()) {
                        return Err(err(line, key, format!("{g} belongs to class {}, not {c}", g.class().name())));
                    }
                }
                "mean" => {
                    let g = group.ok_or_else(|| err(line, key, "give the group first"))?;
                    mean = Some(exactly(line, key, &vals, g.trivial_multiplicity())?);
                }
                _ => return Err(err(line, key, "unknown key in [field]")),
            },
            Section::Atom => {
                let a = draft.as_mut().unwrap();
                let g = group.unwrap();
                match key {
                    "p" => {
                        let v = exactly(line, key, &vals, 3)?;
                        a.p = Some(Vec3::new(v[0], v[1], v[2]));
                    }
                    "lambda" => a.p = Some(Vec3::new(0.0, 0.0, single(line, key, &vals)?)),
                    "weight" => a.weight = Some(single(line, key, &vals)?),
                    "stratum" => a.stratum = Some(single(line, key, &vals)?),
                    "f" => a.rows.push(exactly(line, key, &vals, g.host_dim())?),
                    "u" => {
                        if g != GroupId::K2 {
                            return Err(err(line, key, "u-parameters are only defined for K2"));
                        }
                        a.u = Some(exactly(line, key, &vals, U_COUNT)?);
                    }
                    _ => return Err(err(line, key, "unknown key in [atom]")),
                }
            }
            Section::Plan => match key {
                "seed" => plan.seed = Some(single(line, key, &vals)?),
                "lmax" => plan.l_max = Some(single(line, key, &vals)?),
                "n" => plan.n = Some(single(line, key, &vals)?),
                "tolerance" => plan.tolerance = Some(single(line, key, &vals)?),
                "grid" => plan.grid = Some(single(line, key, &vals)?),
                "pair" => {
                    let v = exactly(line, key, &vals, 6)?;
                    plan.pairs.push((Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5])));
                }
                _ => return Err(err(line, key, "unknown key in [plan]")),
            },
        }
    }
    let group = group.ok_or_else(|| err(text.lines().count().max(1), "group", "no group given"))?;
    if let Some(a) = draft.take() {
        atoms.push(finish(a, group)?);
    }
    let mean = mean.unwrap_or_else(|| vec![0.0; group.trivial_multiplicity()]);
    Ok(Config { spec: FieldSpec { group, mean, atoms }, plan })
}

/// Round-trip decimal with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(v: impl IntoIterator<Item = f64>) -> String {
    v.into_iter().map(num).collect::<Vec<_>>().join(" ")
}

pub fn dump(c: &Config) -> String {
    let s = &c.spec;
    let mut out = String::new();
    writeln!(out, "[field]\ngroup {}\nclass {}\nmean {}", s.group, s.group.class().name(), join(s.mean.iter().copied())).unwrap();
    for a in &s.atoms {
        writeln!(out, "\n[atom]\np {}\nweight {}", join(a.p.iter().copied()), num(a.weight)).unwrap();
        if let Some(st) = a.stratum {
            writeln!(out, "stratum {st}").unwrap();
        }
        for row in a.f.matrix().row_iter() {
            writeln!(out, "f {}", join(row.iter().copied())).unwrap();
        }
    }
    let p = &c.plan;
    out.push_str("\n[plan]\n");
    if let Some(v) = p.seed {
        writeln!(out, "seed {v}").unwrap();
    }
    if let Some(v) = p.l_max {
        writeln!(out, "lmax {v}").unwrap();
    }
    if let Some(v) = p.n {
        writeln!(out, "n {v}").unwrap();
    }
    if let Some(v) = p.tolerance {
        writeln!(out, "tolerance {}", num(v)).unwrap();
    }
    if let Some(v) = &p.grid {
        writeln!(out, "grid {v}").unwrap();
    }
    for (x, y) in &p.pairs {
        writeln!(out, "pair {}", join(x.iter().chain(y.iter()).copied())).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const K5: &str = "
# orthotropic, one atom
[field]
group K5
class orthotropic
mean 1 0 0 0 0 0 0 0 0.5

[atom]
p 0.3 0.7 1.1
weight 2
f 0.2 0 0 0 0 0 0 0 0
f 0 0.1 0 0 0 0 0 0 0
f 0 0 0.1 0 0 0 0 0 0
f 0 0 0 0.1 0 0 0 0 0
f 0 0 0 0 0.1 0 0 0 0
f 0 0 0 0 0 0.1 0 0 0
f 0 0 0 0 0 0 0.1 0 0
f 0 0 0 0 0 0 0 0.1 0
f 0 0 0 0 0 0 0 0 0.1

[plan]
seed 7
lmax 4
grid lattice:2,2,1,0.5
pair 0 0 0 1 0 0
";

    #[test]
    fn parses_and_round_trips() {
        let c = parse(K5).unwrap();
        assert_eq!(c.spec.group, GroupId::K5);
        assert_eq!(c.spec.atoms.len(), 1);
        assert_eq!(c.spec.atoms[0].f.matrix()[(0, 0)], 0.2);
        assert_eq!(c.plan.seed, Some(7));
        assert_eq!(c.plan.pairs.len(), 1);
        let again = parse(&dump(&c)).unwrap();
        assert_eq!(again, c);
        assert_eq!(dump(&again), dump(&c));
    }

    #[test]
    fn awkward_numbers_round_trip() {
        let mut c = parse("[field]\ngroup K16\n[atom]\nlambda 3\nweight 1\nf 0.5 0\nf 0 0.5\n").unwrap();
        c.spec.mean = vec![0.1 + 0.2, 1.0 / 3.0];
        c.spec.atoms[0].weight = std::f64::consts::PI * 1e-300;
        c.plan.tolerance = Some(f64::EPSILON);
        assert_eq!(parse(&dump(&c)).unwrap(), c);
    }

    #[test]
    fn isotropic_u_form() {
        let mut u = vec![0.0; U_COUNT];
        u[0] = 1.0;
        let text = format!("[field]\ngroup K2\n[atom]\nlambda 1\nweight 1\nu {}\n", join(u.iter().copied()));
        let c = parse(&text).unwrap();
        assert_eq!(c.spec.atoms[0].f, from_u(&u).unwrap());
        assert_eq!(parse(&dump(&c)).unwrap(), c);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = parse("[field]\ngroup K9\nmean 1 2\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "mean"));
        let e = parse("[field]\ngroup K4\n[atom]\np 1 0 0\nweight x\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (5, "weight"));
        let e = parse("[field]\ngroup K16\n[atom]\nlambda 1\nweight 1\nf 1 0\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "f"));
        assert!(e.msg.contains("2 rows"));
        let e = parse("[field]\ngroup K3\nclass cubic\n").unwrap_err();
        assert_eq!(e.field, "class");
        let e = parse("group K1\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse("[field]\ngroup K17\n").is_err());
        assert!(parse("[field]\ngroup K5\n[atom]\nlambda 1\nweight 1\nu 1\n").is_err());
    }
}
