//! Embedded node tables for the certificate test paths, theta-parameterized
//! path construction, and the sweep verifying A_test(theta) < g(theta).

use crate::action::{polyline_action, PolylinePath};
use crate::bounds;
use crate::geometry::{rotation, Configuration, RotationAngle};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TestPathError {
    #[error("theta = {theta} outside the certified range (0, {hi}] for {variant:?}")]
    ThetaOutOfRange {
        variant: Variant,
        theta: f64,
        hi: f64,
    },
    #[error("corrupt embedded table {0}: {1}")]
    Corrupt(&'static str, String),
}

/// Which end-configuration family a path targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    E1,
    E2,
}

/// An exact rational multiple of pi, as p/q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub p: i64,
    pub q: i64,
}

impl Frac {
    pub fn radians(&self) -> f64 {
        self.p as f64 * std::f64::consts::PI / self.q as f64
    }

    fn cmp(&self, other: &Frac) -> std::cmp::Ordering {
        (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128))
    }

    fn reduced(p: i64, q: i64) -> Frac {
        let mut g = {
            let (mut a, mut b) = (p.abs().max(1), q);
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        };
        if p == 0 {
            g = q;
        }
        Frac { p: p / g, q: q / g }
    }
}

/// One applied data repair, kept machine-readable for audits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairEntry {
    pub t: f64,
    pub column: String,
    pub printed: String,
    pub repaired: String,
    pub rule: String,
}

#[derive(Debug, Deserialize)]
struct TableMeta {
    id: String,
    variant: Variant,
    theta0: Frac,
    interval: IntervalMeta,
    repairs: Vec<RepairEntry>,
}

#[derive(Debug, Deserialize)]
struct IntervalMeta {
    lo: Frac,
    hi: Frac,
}

/// An embedded 11-row node table: bodies 1..3 at times 0, 0.1, ..., 1; body
/// 4 closes the center of mass. The t = 1 row is stored in the unrotated
/// frame so the endpoint can be re-rotated for any theta in the table's
/// assignment interval (theta_lo, theta_hi].
#[derive(Debug, Clone)]
pub struct TestPathTable {
    pub id: String,
    pub variant: Variant,
    pub theta0: RotationAngle,
    pub interval: (Frac, Frac),
    pub nodes_q123: [[[f64; 2]; 3]; 11],
    pub repairs: Vec<RepairEntry>,
    pub csv: &'static str,
}

impl TestPathTable {
    /// Node configurations with the final row still unrotated.
    pub fn configurations_unrotated(&self) -> [Configuration; 11] {
        std::array::from_fn(|i| Configuration::from_free3(self.nodes_q123[i]))
    }

    /// Reconstructs the CSV as printed in the source, undoing the repairs.
    pub fn raw_csv(&self) -> String {
        let mut out = self.csv.to_string();
        for r in &self.repairs {
            out = out.replacen(&r.repaired, &r.printed, 1);
        }
        out
    }
}

macro_rules! embed {
    ($($id:literal),+ $(,)?) => {
        &[$((
            include_str!(concat!("../data/", $id, ".csv")),
            include_str!(concat!("../data/", $id, ".meta.json")),
        )),+]
    };
}

static RAW_TABLES: &[(&str, &str)] = embed![
    "e1-0539", "e1-0500", "e1-0400", "e1-0300", "e1-0150", "e1-0060", "e1-0020", "e2-0660",
    "e2-0625", "e2-0530", "e2-0400", "e2-0300", "e2-0200", "e2-0100", "e2-0050", "e2-0012",
];

fn parse_table(csv: &'static str, meta_json: &'static str) -> TestPathTable {
    let meta: TableMeta = serde_json::from_str(meta_json).expect("embedded meta parses");
    let mut nodes = [[[0.0; 2]; 3]; 11];
    let mut lines = csv.lines();
    let header = lines.next().expect("csv header");
    assert_eq!(header, "t,q1x,q1y,q2x,q2y,q3x,q3y", "table {}", meta.id);
    for (i, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.parse().expect("embedded csv numeral"))
            .collect();
        assert_eq!(fields.len(), 7, "table {} row {i}", meta.id);
        assert!((fields[0] - i as f64 / 10.0).abs() < 1e-12);
        for b in 0..3 {
            nodes[i][b] = [fields[1 + 2 * b], fields[2 + 2 * b]];
        }
    }
    TestPathTable {
        id: meta.id,
        variant: meta.variant,
        theta0: RotationAngle::rational(meta.theta0.p, meta.theta0.q).expect("theta0"),
        interval: (meta.interval.lo, meta.interval.hi),
        nodes_q123: nodes,
        repairs: meta.repairs,
        csv,
    }
}

/// All sixteen embedded tables (seven for E1, nine for E2), ordered from the
/// largest assignment interval downward within each variant.
pub fn all_tables() -> &'static [TestPathTable] {
    static TABLES: OnceLock<Vec<TestPathTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        RAW_TABLES
            .iter()
            .map(|&(csv, meta)| parse_table(csv, meta))
            .collect()
    })
}

/// Upper end of the certified theta range for the variant, as p/q of pi.
pub fn certified_max(variant: Variant) -> Frac {
    match variant {
        Variant::E1 => Frac { p: 539, q: 10000 }, // 0.0539 pi
        Variant::E2 => Frac { p: 83, q: 1250 },   // 0.0664 pi
    }
}

/// Returns the table assigned to theta. Intervals are scanned from the
/// largest downward with closed endpoints, so a seam angle shared by two
/// adjacent tables resolves to the higher one (both are valid there). The
/// interval test is exact for rational theta.
pub fn load_table(
    variant: Variant,
    theta: RotationAngle,
) -> Result<&'static TestPathTable, TestPathError> {
    let out_of_range = || {
        let hi = certified_max(variant);
        TestPathError::ThetaOutOfRange {
            variant,
            theta: theta.radians(),
            hi: hi.radians(),
        }
    };
    if theta.cmp_frac(0, 1) != std::cmp::Ordering::Greater {
        return Err(out_of_range());
    }
    for t in all_tables().iter().filter(|t| t.variant == variant) {
        let at_least_lo = theta.cmp_frac(t.interval.0.p, t.interval.0.q) != std::cmp::Ordering::Less;
        let at_most_hi = theta.cmp_frac(t.interval.1.p, t.interval.1.q) != std::cmp::Ordering::Greater;
        if at_least_lo && at_most_hi {
            return Ok(t);
        }
    }
    Err(out_of_range())
}

pub fn table_by_id(id: &str) -> Option<&'static TestPathTable> {
    all_tables().iter().find(|t| t.id == id)
}

/// Builds the 11-node test path for theta: nodes at t = 0..0.9 verbatim from
/// the assigned table, node 10 = the stored unrotated endpoint row rotated
/// by R(theta) (the query angle, not the table's theta0).
pub fn build_test_path(
    variant: Variant,
    theta: RotationAngle,
) -> Result<PolylinePath, TestPathError> {
    let table = load_table(variant, theta)?;
    let r = rotation(theta);
    let mut nodes: Vec<Configuration> = table.nodes_q123[..10]
        .iter()
        .map(|&q123| Configuration::from_free3(q123))
        .collect();
    nodes.push(Configuration::from_free3(table.nodes_q123[10]).rotated(&r));
    let times = (0..=10).map(|i| i as f64 / 10.0).collect();
    Ok(PolylinePath::new(times, nodes).expect("table path is well-formed"))
}

/// One sweep sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertRecord {
    pub theta: Frac,
    pub theta_radians: f64,
    pub table: Option<String>,
    pub a_test: Option<f64>,
    pub g: Option<f64>,
    /// g - A_test; negative (or the -1.0 failure marker) means the
    /// certificate fails at this angle.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub variant: Variant,
    pub grid_step: Frac,
    pub records: Vec<CertRecord>,
    pub overall_pass: bool,
    pub min_margin: f64,
    pub min_margin_theta: Frac,
}

/// Evaluates the certificate inequality A_test(theta) < g(theta) on the
/// grid k * step (k >= 1) up to the certified maximum (or `range_hi`),
/// always including every table-interval endpoint. Lookup or action
/// failures are recorded as negative margins, never thrown.
pub fn certificate_sweep(
    variant: Variant,
    step: Frac,
    range_hi: Option<Frac>,
) -> CertificateReport {
    let hi = range_hi.unwrap_or_else(|| certified_max(variant));
    let mut grid: Vec<Frac> = Vec::new();
    let mut k = 1i64;
    loop {
        let theta = Frac::reduced(k * step.p, step.q);
        if theta.cmp(&hi) == std::cmp::Ordering::Greater {
            break;
        }
        grid.push(theta);
        k += 1;
    }
    for t in all_tables().iter().filter(|t| t.variant == variant) {
        for f in [t.interval.0, t.interval.1] {
            if f.p > 0 && f.cmp(&hi) != std::cmp::Ordering::Greater {
                grid.push(f);
            }
        }
    }
    if hi.p > 0 {
        grid.push(hi);
    }
    grid.sort_by(Frac::cmp);
    grid.dedup_by(|a, b| a.cmp(b) == std::cmp::Ordering::Equal);

    let mut records = Vec::with_capacity(grid.len());
    for theta in grid {
        let angle = RotationAngle::rational(theta.p, theta.q).expect("grid fraction");
        let rad = angle.radians();
        let g = match variant {
            Variant::E1 => bounds::g1(rad).ok(),
            Variant::E2 => bounds::g2(rad).ok(),
        };
        let (table, a_test) = match build_test_path(variant, angle) {
            Ok(path) => {
                let table = load_table(variant, angle).unwrap().id.clone();
                (Some(table), polyline_action(&path).ok().map(|b| b.total))
            }
            Err(_) => (None, None),
        };
        let margin = match (g, a_test) {
            (Some(g), Some(a)) => g - a,
            _ => -1.0,
        };
        records.push(CertRecord {
            theta,
            theta_radians: rad,
            table,
            a_test,
            g,
            margin,
        });
    }
    let (mut min_margin, mut min_theta) = (f64::INFINITY, Frac { p: 0, q: 1 });
    for r in &records {
        if r.margin < min_margin {
            min_margin = r.margin;
            min_theta = r.theta;
        }
    }
    CertificateReport {
        overall_pass: records.iter().all(|r| r.margin > 0.0),
        min_margin,
        min_margin_theta: min_theta,
        variant,
        grid_step: step,
        records,
    }
}

/// Default sweep grid step: 0.0001 pi.
pub const DEFAULT_GRID_STEP: Frac = Frac { p: 1, q: 10000 };

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rotate_row;
    use std::f64::consts::PI;

    #[test]
    fn sixteen_tables_embed() {
        let tables = all_tables();
        assert_eq!(tables.len(), 16);
        assert_eq!(tables.iter().filter(|t| t.variant == Variant::E1).count(), 7);
        assert_eq!(tables.iter().filter(|t| t.variant == Variant::E2).count(), 9);
    }

    #[test]
    fn intervals_tile_the_certified_range() {
        for variant in [Variant::E1, Variant::E2] {
            let mut tables: Vec<_> = all_tables()
                .iter()
                .filter(|t| t.variant == variant)
                .collect();
            tables.sort_by(|a, b| b.interval.1.cmp(&a.interval.1));
            assert_eq!(tables[0].interval.1.cmp(&certified_max(variant)), std::cmp::Ordering::Equal);
            for w in tables.windows(2) {
                assert_eq!(w[0].interval.0.cmp(&w[1].interval.1), std::cmp::Ordering::Equal);
            }
            assert_eq!(tables.last().unwrap().interval.0.p, 0);
        }
    }

    #[test]
    fn rows_satisfy_boundary_families() {
        for t in all_tables() {
            let cfgs = t.configurations_unrotated();
            // t = 0 row in the start family
            let s = &cfgs[0].bodies;
            assert!(s[0][1].abs() < 1e-6 && s[1][1].abs() < 1e-6);
            assert!(s[0][0] <= s[1][0]);
            assert!((s[2][0] - s[3][0]).abs() < 1e-3);
            assert!((s[2][1] + s[3][1]).abs() < 1e-3);
            // t = 1 row (unrotated) in the end family
            let e = &cfgs[10].bodies;
            match t.variant {
                Variant::E1 => {
                    assert!((e[0][1] + e[1][1]).abs() < 1e-6);
                    assert!((e[1][1] - e[2][1]).abs() < 1e-6);
                    assert!((e[1][0] + e[2][0]).abs() < 1e-6);
                    assert!((e[0][0] + e[3][0]).abs() < 1e-6);
                }
                Variant::E2 => {
                    assert!((e[0][0] - e[1][0]).abs() < 1e-6);
                    assert!((e[0][1] + e[1][1]).abs() < 1e-6);
                    assert!((e[0][0] + e[2][0]).abs() < 1e-6);
                    assert!((e[2][1] + e[3][1]).abs() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn lookup_follows_interval_assignment() {
        let t = load_table(Variant::E1, RotationAngle::rational(53, 1000).unwrap()).unwrap();
        assert_eq!(t.id, "e1-0539");
        let t = load_table(Variant::E1, RotationAngle::rational(1, 100).unwrap()).unwrap();
        assert_eq!(t.id, "e1-0150");
        let t = load_table(Variant::E2, RotationAngle::rational(1, 1000).unwrap()).unwrap();
        assert_eq!(t.id, "e2-0012");
        assert!(load_table(Variant::E1, RotationAngle::rational(6, 100).unwrap()).is_err());
        assert!(load_table(Variant::E1, RotationAngle::rational(0, 1).unwrap()).is_err());
    }

    #[test]
    fn built_path_endpoint_rotates_with_query_angle() {
        let theta0 = RotationAngle::rational(539, 10000).unwrap();
        let path = build_test_path(Variant::E1, theta0).unwrap();
        let table = table_by_id("e1-0539").unwrap();
        let r = rotation(theta0);
        for b in 0..3 {
            let expect = rotate_row(table.nodes_q123[10][b], &r);
            let got = path.nodes()[10].bodies[b];
            assert!((got[0] - expect[0]).abs() < 1e-15);
            assert!((got[1] - expect[1]).abs() < 1e-15);
        }
        // same table, smaller angle: interior nodes unchanged, endpoint moves
        let other = build_test_path(Variant::E1, RotationAngle::rational(52, 1000).unwrap()).unwrap();
        assert_eq!(path.nodes()[..10], other.nodes()[..10]);
        assert_ne!(path.nodes()[10], other.nodes()[10]);
    }

    #[test]
    fn all_tables_give_collision_free_paths_at_endpoints() {
        for t in all_tables() {
            let (lo, hi) = t.interval;
            let mid = Frac::reduced(lo.p * hi.q + hi.p * lo.q, 2 * lo.q * hi.q);
            for theta in [hi, mid] {
                let angle = RotationAngle::rational(theta.p, theta.q).unwrap();
                let path = build_test_path(t.variant, angle).unwrap();
                assert!(polyline_action(&path).is_ok(), "table {}", t.id);
                assert!(path.min_pair_distance() > 0.05, "table {}", t.id);
            }
        }
    }

    #[test]
    fn certificate_holds_at_range_endpoints() {
        // frozen high-precision bound values at the two headline angles
        let th1 = 0.0539 * PI;
        let g1v = crate::bounds::g1(th1).unwrap();
        assert!((g1v - 3.47198700199960007).abs() < 1e-13);
        let path = build_test_path(Variant::E1, RotationAngle::rational(539, 10000).unwrap()).unwrap();
        let a = polyline_action(&path).unwrap().total;
        assert!(a < g1v, "A_test = {a} vs g1 = {g1v}");

        let th2 = 0.0664 * PI;
        let g2v = crate::bounds::g2(th2).unwrap();
        assert!((g2v - 3.41448795704391811).abs() < 1e-13);
        let path = build_test_path(Variant::E2, RotationAngle::rational(83, 1250).unwrap()).unwrap();
        let a = polyline_action(&path).unwrap().total;
        assert!(a < g2v, "A_test = {a} vs g2 = {g2v}");
    }

    #[test]
    fn coarse_sweep_passes() {
        for variant in [Variant::E1, Variant::E2] {
            let report = certificate_sweep(variant, Frac { p: 1, q: 1000 }, None);
            assert!(report.overall_pass, "{variant:?}: {report:?}");
            assert!(report.min_margin > 0.0);
        }
    }

    #[test]
    fn widened_sweep_fails() {
        let report = certificate_sweep(Variant::E1, Frac { p: 1, q: 1000 }, Some(Frac { p: 6, q: 100 }));
        assert!(!report.overall_pass);
    }

    #[test]
    fn raw_csv_reconstructs_printed_typos() {
        let t = table_by_id("e1-0400").unwrap();
        assert!(t.raw_csv().contains("-0.4.8401120"));
        assert!(!t.csv.contains("-0.4.8401120"));
        let t = table_by_id("e1-0539").unwrap();
        assert_eq!(t.repairs.len(), 2);
        assert!(t.raw_csv().contains("0.077483714"));
    }
}
