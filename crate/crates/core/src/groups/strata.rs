//! Orbit strata of the wavenumber domain under each `K`.
//!
//! A point is first mapped to a canonical orbit representative `q` (the
//! lexicographic maximum of its orbit under a per-group key order), then
//! matched against an ordered list of charts. Points on chart boundaries
//! that no chart lists (the lumped axis and mirror classes of the dihedral
//! groups, for instance) fall back to the stratum with the same isotropy
//! type, see [`stratum_of`].

use super::{enumerate_elements, GroupId};
use crate::tensor::{Ortho3, Vec3};
use std::f64::consts::PI;
use std::sync::OnceLock;

const TIE: f64 = 1e-12;
const FIX: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct IsotropySubgroup {
    /// Label of the subgroup in the reference isotropy table.
    pub table_label: &'static str,
    /// Element list for finite subgroups; for the axial subgroup `C∞v` of
    /// the continuous groups this holds a generating set.
    pub elements: Vec<Ortho3>,
    pub continuous: bool,
}

impl IsotropySubgroup {
    pub fn order(&self) -> Option<usize> {
        (!self.continuous).then_some(self.elements.len())
    }

    pub fn proper_count(&self) -> usize {
        self.elements.iter().filter(|g| g.det() > 0.0).count()
    }

    /// Schoenflies symbol computed from the elements.
    pub fn schoenflies(&self) -> String {
        if self.continuous {
            return "Cinfv".into();
        }
        let n = self.elements.len();
        let np = self.proper_count();
        if n > 2 && self.elements.iter().any(|g| g.distance(&Ortho3::inversion()) < FIX) {
            return format!("{}xZ2c", self.proper_name(np));
        }
        match (n, np) {
            (1, _) => "C1".into(),
            (2, 1) => {
                if self.elements.iter().any(|g| g.distance(&Ortho3::inversion()) < FIX) {
                    "Ci".into()
                } else {
                    "Cs".into()
                }
            }
            _ if n == np => format!("C{n}"),
            _ if 2 * np == n => format!("C{np}v"),
            _ => format!("G{n}"),
        }
    }

    fn proper_name(&self, np: usize) -> String {
        let order = |g: &Ortho3| {
            let mut h = *g;
            let mut k = 1;
            while h.distance(&Ortho3::identity()) > FIX && k <= np {
                h = h.compose(g);
                k += 1;
            }
            k
        };
        let m = self.elements.iter().filter(|g| g.det() > 0.0).map(order).max().unwrap_or(1);
        match (np, m) {
            _ if m == np => format!("Z{np}"),
            (12, 3) => "T".into(),
            (24, 4) => "O".into(),
            _ => format!("D{}", np / 2),
        }
    }

    pub fn fixes(&self, p: &Vec3) -> bool {
        let s = p.norm().max(1.0);
        self.elements.iter().all(|g| (g.apply(p) - p).norm() <= TIE * s)
    }
}

#[derive(Debug, Clone)]
pub struct Stratum {
    pub index: usize,
    pub chart: &'static str,
    pub representative: Vec3,
    pub isotropy: IsotropySubgroup,
}

fn key_order(k: GroupId) -> [usize; 3] {
    match k {
        GroupId::K1 | GroupId::K8 | GroupId::K9 | GroupId::K15 => [2, 1, 0],
        _ => [2, 0, 1],
    }
}

fn greater(a: &Vec3, b: &Vec3, order: [usize; 3], tol: f64) -> bool {
    for &i in &order {
        if a[i] > b[i] + tol {
            return true;
        }
        if a[i] < b[i] - tol {
            return false;
        }
    }
    false
}

/// Canonical orbit representative of `p`.
pub fn canonical(k: GroupId, p: &Vec3) -> Vec3 {
    match k {
        GroupId::K2 | GroupId::K16 => Vec3::new(0.0, 0.0, p.norm()),
        GroupId::K4 | GroupId::K14 => Vec3::new(p.x.hypot(p.y), 0.0, p.z.abs()),
        _ => {
            let order = key_order(k);
            let tol = TIE * p.norm().max(f64::MIN_POSITIVE);
            let mut best = *p;
            for g in enumerate_elements(k).unwrap() {
                let q = g.apply(p);
                if greater(&q, &best, order, tol) {
                    best = q;
                }
            }
            best
        }
    }
}

type Chart = (&'static str, [f64; 3], fn(&Vec3, f64, usize) -> bool);

fn rho(q: &Vec3) -> f64 {
    q.x.hypot(q.y)
}

fn dihedral_charts(n: usize) -> Vec<Chart> {
    let (s, c) = (0.5 * PI / n as f64).sin_cos();
    vec![
        ("theta = 0", [0.0, 0.0, 1.0], |q, t, _| rho(q) <= t),
        ("phi = 0, 0 < theta < pi/2", [0.6, 0.0, 0.8], |q, t, _| q.y.abs() <= t && q.x > t && q.z > t),
        ("theta = pi/2, 0 < phi < pi/n", [c, s, 0.0], |q, t, n| q.z.abs() <= t && wedge_ok(q, t, n)),
        ("0 < theta < pi/2, 0 < phi < pi/n", [0.6 * c, 0.6 * s, 0.8], |q, t, n| q.z > t && wedge_ok(q, t, n)),
    ]
}

/// Strictly inside `0 < phi < pi/n`.
fn wedge_ok(q: &Vec3, t: f64, n: usize) -> bool {
    let w = PI / n as f64;
    let phi = q.y.atan2(q.x);
    q.y > t && (w - phi) * rho(q) > t
}

fn dihedral_order(k: GroupId) -> usize {
    use GroupId::*;
    match k {
        K5 => 2,
        K10 => 3,
        K6 | K12 => 4,
        K7 | K11 => 6,
        K13 => 8,
        _ => 0,
    }
}

fn charts(k: GroupId) -> Vec<Chart> {
    use GroupId::*;
    let (s12, c12) = (PI / 12.0).sin_cos();
    let (s6, c6) = (PI / 6.0).sin_cos();
    match k {
        K1 => vec![("p != 0", [0.0, 0.0, 1.0], |q, t, _| q.norm() > t)],
        K2 | K16 => vec![("(0, 0, p3), p3 > 0", [0.0, 0.0, 1.0], |q, t, _| q.z > t)],
        K3 => vec![
            ("(0, 0, p3), p3 > 0", [0.0, 0.0, 1.0], |q, t, _| rho(q) <= t),
            ("p3 = 0", [1.0, 0.3, 0.0], |q, t, _| q.z.abs() <= t),
            ("p3 > 0, (p1, p2) != 0", [0.4, 0.3, 1.0], |q, t, _| q.z > t && rho(q) > t),
        ],
        K4 | K14 => vec![
            ("(p1, 0, 0), p1 > 0", [1.0, 0.0, 0.0], |q, t, _| q.z.abs() <= t),
            ("(0, 0, p3), p3 > 0", [0.0, 0.0, 1.0], |q, t, _| rho(q) <= t),
            ("(p1, 0, p3), p1 > 0, p3 > 0", [1.0, 0.0, 1.0], |q, t, _| q.z > t && rho(q) > t),
        ],
        K5 | K6 | K12 | K7 | K11 | K13 => dihedral_charts(dihedral_order(k)),
        K8 => vec![
            ("0 < p1 = p2 = p3", [1.0, 1.0, 1.0], |q, t, _| (q.x - q.z).abs() <= t && (q.y - q.z).abs() <= t),
            ("(0, 0, p3), p3 > 0", [0.0, 0.0, 1.0], |q, t, _| q.x.abs() <= t && q.y.abs() <= t),
            ("one coordinate zero", [0.0, 0.5, 1.0], |q, t, _| q.x.abs().min(q.y.abs()).min(q.z.abs()) <= t),
            ("all coordinates nonzero", [0.3, 0.6, 1.0], |q, t, _| q.x.abs().min(q.y.abs()).min(q.z.abs()) > t),
        ],
        K9 | K15 => vec![
            ("0 < p1 = p2 = p3", [1.0, 1.0, 1.0], |q, t, _| (q.x - q.z).abs() <= t && (q.y - q.z).abs() <= t),
            ("(0, 0, p3), p3 > 0", [0.0, 0.0, 1.0], |q, t, _| q.x.abs() <= t && q.y.abs() <= t),
            ("(0, p2, p3), 0 < p2 = p3", [0.0, 1.0, 1.0], |q, t, _| q.x.abs() <= t && (q.y - q.z).abs() <= t),
            ("(0, p2, p3), 0 < p2 < p3", [0.0, 0.5, 1.0], |q, t, _| q.x.abs() <= t && q.y > t && q.z - q.y > t),
            ("0 < p1 = p2 < p3", [0.5, 0.5, 1.0], |q, t, _| q.x > t && (q.y - q.x).abs() <= t && q.z - q.y > t),
            ("0 < p1 < p2 < p3", [0.3, 0.6, 1.0], |q, t, _| q.x > t && q.y - q.x > t && q.z - q.y > t),
        ],
        K10 => vec![
            ("theta = 0", [0.0, 0.0, 1.0], |q, t, _| rho(q) <= t),
            ("|phi| = pi/6", [0.6 * c6, 0.6 * s6, 0.8], |q, t, _| {
                let phi = q.y.atan2(q.x).abs();
                (phi - PI / 6.0).abs() * rho(q) <= t
            }),
            ("theta = pi/2, phi = 0", [1.0, 0.0, 0.0], |q, t, _| q.z.abs() <= t && q.y.abs() <= t),
            ("remaining directions", [0.6 * c12, 0.6 * s12, 0.8], |q, t, _| q.norm() > t),
        ],
    }
}

fn table_labels(k: GroupId) -> &'static [&'static str] {
    use GroupId::*;
    match k {
        K1 => &["I"],
        K2 | K16 => &["O(2)"],
        K3 => &["Z2", "Z2-", "I"],
        K4 | K14 => &["O(2)", "Z2-xZ2c", "Z2-"],
        K5 => &["Z2", "Z2-", "I"],
        K6 | K12 => &["Z4", "Z2", "Z2-", "I"],
        K7 | K11 => &["Z3xZ2c", "Z2", "Z2-", "I"],
        K8 => &["D3", "D2", "Z2c", "I"],
        K9 | K15 => &["D3", "D4", "D2", "Z~2", "Z2", "I"],
        K10 => &["Z3", "Z2-", "Z2", "I"],
        K13 => &["Z8", "Z2", "Z2-", "I"],
    }
}

/// Stabilizer of `p` in a finite `K`.
pub fn stabilizer(k: GroupId, p: &Vec3) -> Vec<Ortho3> {
    let s = p.norm().max(f64::MIN_POSITIVE);
    enumerate_elements(k)
        .unwrap()
        .iter()
        .copied()
        .filter(|g| (g.apply(p) - p).norm() <= FIX * s)
        .collect()
}

fn same_set(a: &[Ortho3], b: &[Ortho3]) -> bool {
    a.len() == b.len() && a.iter().all(|g| b.iter().any(|h| g.distance(h) < FIX))
}

/// Whether two subgroups of a finite `K` are conjugate in `K`.
pub fn subgroups_conjugate(k: GroupId, a: &[Ortho3], b: &[Ortho3]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    enumerate_elements(k).unwrap().iter().any(|c| {
        let ci = c.inverse();
        let conj: Vec<Ortho3> = a.iter().map(|h| *c * *h * ci).collect();
        same_set(&conj, b)
    })
}

fn axial_subgroup() -> IsotropySubgroup {
    IsotropySubgroup {
        table_label: "O(2)",
        elements: vec![Ortho3::rot_z(1.0), Ortho3::reflection(&Vec3::y())],
        continuous: true,
    }
}

fn build(k: GroupId) -> Vec<Stratum> {
    let mut out = Vec::new();
    let h0 = IsotropySubgroup {
        table_label: k.group_name(),
        elements: enumerate_elements(k).map(|e| e.to_vec()).unwrap_or_default(),
        continuous: !k.is_finite(),
    };
    out.push(Stratum { index: 0, chart: "{0}", representative: Vec3::zeros(), isotropy: h0 });
    let tl = table_labels(k);
    let labels: Vec<&'static str> = (0..charts(k).len()).map(|m| tl.get(m).copied().unwrap_or("-")).collect();
    for (m, (chart, rep, _)) in charts(k).into_iter().enumerate() {
        let p = Vec3::new(rep[0], rep[1], rep[2]);
        let isotropy = match k {
            GroupId::K2 | GroupId::K16 => axial_subgroup(),
            GroupId::K4 | GroupId::K14 => match m {
                0 => IsotropySubgroup {
                    table_label: labels[0],
                    elements: vec![
                        Ortho3::identity(),
                        Ortho3::rot_x(PI),
                        Ortho3::reflection(&Vec3::z()),
                        Ortho3::reflection(&Vec3::y()),
                    ],
                    continuous: false,
                },
                1 => IsotropySubgroup { table_label: labels[1], ..axial_subgroup() },
                _ => IsotropySubgroup {
                    table_label: labels[2],
                    elements: vec![Ortho3::identity(), Ortho3::reflection(&Vec3::y())],
                    continuous: false,
                },
            },
            _ => IsotropySubgroup { table_label: labels[m], elements: stabilizer(k, &p), continuous: false },
        };
        out.push(Stratum { index: m + 1, chart, representative: p, isotropy });
    }
    out
}

/// Strata `0..` of the orbit space, stratum 0 being the origin.
pub fn orbit_strata(k: GroupId) -> &'static [Stratum] {
    static CACHE: OnceLock<Vec<Vec<Stratum>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| GroupId::ALL.iter().map(|&g| build(g)).collect());
    &all[k as usize]
}

/// Index of the stratum containing `p`.
///
/// The canonical representative is tested against the charts in order. A
/// point that no chart covers goes to the lowest-index stratum whose
/// isotropy subgroup is conjugate in `K` to the point's stabilizer; failing
/// that, to the lowest index with the same isotropy type (order and number
/// of rotations); failing that, to the lowest index among strata of largest
/// isotropy order not exceeding the stabilizer's.
pub fn stratum_of(k: GroupId, p: &Vec3) -> usize {
    let n = p.norm();
    if n <= TIE {
        return 0;
    }
    let q = canonical(k, p);
    let t = TIE * n;
    let n = dihedral_order(k);
    for (m, (_, _, pred)) in charts(k).iter().enumerate() {
        if pred(&q, t, n) {
            return m + 1;
        }
    }
    let st = stabilizer(k, &q);
    let strata = &orbit_strata(k)[1..];
    if let Some(s) = strata.iter().find(|s| subgroups_conjugate(k, &s.isotropy.elements, &st)) {
        return s.index;
    }
    let np = st.iter().filter(|g| g.det() > 0.0).count();
    if let Some(s) = strata
        .iter()
        .find(|s| s.isotropy.elements.len() == st.len() && s.isotropy.proper_count() == np)
    {
        return s.index;
    }
    let best = strata
        .iter()
        .filter(|s| s.isotropy.elements.len() <= st.len())
        .map(|s| s.isotropy.elements.len())
        .max()
        .unwrap_or(1);
    strata.iter().find(|s| s.isotropy.elements.len() == best).map(|s| s.index).unwrap_or(strata.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        use GroupId::*;
        let expect = [
            (K1, 2),
            (K2, 2),
            (K3, 4),
            (K4, 4),
            (K5, 5),
            (K6, 5),
            (K7, 5),
            (K8, 5),
            (K9, 7),
            (K10, 5),
            (K13, 5),
        ];
        for (k, n) in expect {
            assert_eq!(orbit_strata(k).len(), n, "{k}");
        }
    }

    #[test]
    fn representatives_are_fixed_and_classified() {
        for k in GroupId::ALL {
            for s in orbit_strata(k).iter().skip(1) {
                assert!(s.isotropy.fixes(&s.representative), "{k} {}", s.index);
                assert_eq!(stratum_of(k, &s.representative), s.index, "{k} {}", s.index);
            }
        }
    }

    #[test]
    fn known_strata() {
        assert_eq!(stratum_of(GroupId::K2, &Vec3::zeros()), 0);
        assert_eq!(stratum_of(GroupId::K5, &Vec3::new(1.0, 0.0, 0.0)), 1);
        assert_eq!(stratum_of(GroupId::K9, &Vec3::new(1.0, 1.0, 1.0)), 1);
        assert_eq!(stratum_of(GroupId::K2, &Vec3::new(0.3, -2.0, 1.0)), 1);
    }

    #[test]
    fn stabilizer_types() {
        let s = orbit_strata(GroupId::K9);
        let names: Vec<String> = s[1..].iter().map(|s| s.isotropy.schoenflies()).collect();
        assert_eq!(names, ["C3v", "C4v", "C2v", "Cs", "Cs", "C1"]);
        let s = orbit_strata(GroupId::K7);
        assert_eq!(s[1].isotropy.schoenflies(), "C6v");
        // the origin is fixed by the whole group
        for &k in GroupId::ALL.iter().filter(|k| k.is_finite() && **k != GroupId::K1) {
            assert_eq!(orbit_strata(k)[0].isotropy.schoenflies(), k.group_name(), "{k}");
        }
    }
}
