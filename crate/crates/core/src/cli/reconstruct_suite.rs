use std::f64::consts::PI;

use super::config::{require, Reader};
use super::report::{CheckRecord, TableRow};
use crate::error::{Error, Result};
use crate::green::{homotopy_reconstruct, AnalyticSolution, BoundaryTrace, DomainSpec, Shape, SolutionKind};
use crate::stokes::StokesSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructConfig {
    pub spec: StokesSpec,
    pub domain: DomainSpec,
    pub kinds: Vec<SolutionKind>,
    pub pole: Vec<f64>,
    pub pole_row: usize,
    pub interior_points: usize,
    pub exterior_points: usize,
    pub tol_interior: f64,
    pub tol_exterior: f64,
    pub tol_pole: f64,
}

fn kind_name(k: SolutionKind) -> &'static str {
    match k {
        SolutionKind::ConstantPressure => "constant_pressure",
        SolutionKind::ExteriorPole => "exterior_pole",
        SolutionKind::Manufactured => "manufactured",
    }
}

fn parse_point(text: &str, n: usize, key: &str) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("{key}: cannot parse '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    require(v.len() == n, || format!("{key}: expected {n} coordinates, got {}", v.len()))?;
    Ok(v)
}

/// Centre, inradius and circumradius of the domain.
fn geometry(d: &DomainSpec) -> (Vec<f64>, f64, f64) {
    match d.shape() {
        Shape::Ball { center, radius } => (center.clone(), *radius, *radius),
        Shape::Box { lo, hi } => {
            let c = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let inr = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).fold(f64::INFINITY, f64::min);
            (c, inr, 0.5 * d.diameter())
        }
    }
}

/// `count` well-spread unit directions (golden-angle spiral).
fn directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let t = golden * k as f64 + 0.3;
            if n == 2 {
                vec![t.cos(), t.sin()]
            } else {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                let s = (1.0 - z * z).sqrt();
                vec![s * t.cos(), s * t.sin(), z]
            }
        })
        .collect()
}

impl ReconstructConfig {
    pub fn from_reader(r: &Reader) -> Result<Self> {
        let n = r.parse_or("n", 3usize)?;
        let q = r.parse_or("q", 1usize)?;
        let j0 = r.parse_or("j0", q)?;
        if q != 1 || j0 != 1 {
            return Err(Error::Unsupported(format!("reconstruction covers q = j0 = 1, got q = {q}, j0 = {j0}")));
        }
        if n != 2 && n != 3 {
            return Err(Error::Unsupported(format!("reconstruction covers n ∈ {{2, 3}}, got {n}")));
        }
        let spec = StokesSpec::scalar(n, 1, 1, r.parse_or("a", 1.0)?, r.parse_or("a_tilde", 1.0)?)
            .map_err(|e| Error::Config(e.to_string()))?;
        let m = r.parse_or("quad.nodes_per_axis", 48usize)?;
        require(m >= 2 && m <= 4096, || format!("quad.nodes_per_axis = {m} outside 2..=4096"))?;
        let shape = r.parse_or("domain.shape", "ball".to_string())?;
        let domain = match shape.as_str() {
            "ball" => {
                r.allow("domain.box");
                let radius = r.parse_or("domain.radius", 1.0)?;
                let center = match r.optional::<String>("domain.center")? {
                    Some(text) => parse_point(&text, n, "domain.center")?,
                    None => vec![0.0; n],
                };
                DomainSpec::ball(center, radius, m)
            }
            "box" => {
                r.allow("domain.radius");
                r.allow("domain.center");
                let text = r.optional::<String>("domain.box")?.ok_or_else(|| {
                    Error::Config("domain.box = lo_1,…,lo_n,hi_1,…,hi_n is required for a box".into())
                })?;
                let v = parse_point(&text, 2 * n, "domain.box")?;
                DomainSpec::cuboid(v[..n].to_vec(), v[n..].to_vec(), m)
            }
            other => return Err(Error::Config(format!("domain.shape: expected ball|box, got '{other}'"))),
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        let kinds_text = r.parse_or("solution.kind", "constant_pressure,exterior_pole,manufactured".to_string())?;
        let kinds = kinds_text.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<SolutionKind>>>()?;
        let (c, _, outer) = geometry(&domain);
        let pole = match r.optional::<String>("solution.pole")? {
            Some(text) => parse_point(&text, n, "solution.pole")?,
            None => {
                let mut z = c.clone();
                z[0] += 1.5 * outer;
                z[1] += 0.3 * outer;
                z
            }
        };
        require(domain.signed_distance(&pole) > 0.0, || "solution.pole must lie outside the domain".into())?;
        let pole_row = r.parse_or("solution.row", 0usize)?;
        require(pole_row <= n, || format!("solution.row = {pole_row} outside 0..={n}"))?;
        Ok(Self {
            spec,
            domain,
            kinds,
            pole,
            pole_row,
            interior_points: r.parse_or("points.interior", 10usize)?,
            exterior_points: r.parse_or("points.exterior", 10usize)?,
            tol_interior: r.parse_or("tol.interior", 1e-3)?,
            tol_exterior: r.parse_or("tol.exterior", 1e-3)?,
            tol_pole: r.parse_or("tol.pole", 1e-2)?,
        })
    }

    /// Interior points at depth ≥ 0.2·diam where the inradius allows
    /// (otherwise the centre region), exterior points at distance
    /// ≥ 0.5·diam from the closure.
    pub fn points(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.spec.n();
        let (c, inner, outer) = geometry(&self.domain);
        let diam = self.domain.diameter();
        let reach = (inner - 0.2 * diam).max(0.0).min(0.6 * inner);
        let interior = directions(n, self.interior_points)
            .into_iter()
            .enumerate()
            .map(|(k, dir)| {
                let s = reach * (k as f64 + 1.0) / self.interior_points.max(1) as f64;
                c.iter().zip(&dir).map(|(ci, di)| ci + s * di).collect()
            })
            .collect();
        let exterior = directions(n, self.exterior_points)
            .into_iter()
            .enumerate()
            .map(|(k, dir)| {
                let s = outer + 0.5 * diam + 0.1 * outer * (1.0 + k as f64 / self.exterior_points.max(1) as f64);
                c.iter().zip(&dir).map(|(ci, di)| ci + s * di).collect()
            })
            .collect();
        (interior, exterior)
    }

    pub fn solution(&self, kind: SolutionKind) -> Result<AnalyticSolution> {
        match kind {
            SolutionKind::ConstantPressure => AnalyticSolution::constant_pressure(&self.spec),
            SolutionKind::Manufactured => AnalyticSolution::manufactured(&self.spec),
            SolutionKind::ExteriorPole => AnalyticSolution::exterior_pole(&self.spec, &self.pole, self.pole_row),
        }
    }
}

/// Largest relative interior error and largest absolute exterior value.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionErrors {
    pub interior_rel: f64,
    pub exterior_abs: f64,
    pub near_boundary: usize,
    pub rows: Vec<TableRow>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn measure(cfg: &ReconstructConfig, domain: &DomainSpec, kind: SolutionKind) -> Result<ReconstructionErrors> {
    let sol = cfg.solution(kind)?;
    let trace = BoundaryTrace::sample(domain, |y| sol.node_data(y))?;
    let (interior, exterior) = cfg.points();
    let mut out = ReconstructionErrors { interior_rel: 0.0, exterior_abs: 0.0, near_boundary: 0, rows: Vec::new() };
    for (region, points) in [("interior", &interior), ("exterior", &exterior)] {
        for (i, x) in points.iter().enumerate() {
            let rec = homotopy_reconstruct(&cfg.spec, domain, &trace, x)?;
            out.near_boundary += rec.near_boundary as usize;
            let reference = if region == "interior" { sol.values(x)? } else { vec![0.0; rec.values.len()] };
            let diff: Vec<f64> = rec.values.iter().zip(&reference).map(|(a, b)| a - b).collect();
            if region == "interior" {
                out.interior_rel = out.interior_rel.max(norm(&diff) / norm(&reference));
            } else {
                out.exterior_abs = out.exterior_abs.max(norm(&diff));
            }
            let coords = x.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(";");
            for (component, (got, want)) in rec.values.iter().zip(&reference).enumerate() {
                out.rows.push(TableRow {
                    solution: kind_name(kind).to_string(),
                    point: i,
                    region: region.to_string(),
                    coords: coords.clone(),
                    component,
                    reconstructed: *got,
                    reference: *want + 0.0,
                    abs_err: (got - want).abs(),
                });
            }
        }
    }
    Ok(out)
}

/// Below this the quadrature error is at round-off and refinement cannot
/// halve it further.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;

/// One report record per solution kind plus the rows of the table.
pub fn run(cfg: &ReconstructConfig, parallel: bool) -> (Vec<CheckRecord>, Vec<TableRow>) {
    use rayon::prelude::*;
    let one = |&kind: &SolutionKind| -> (CheckRecord, Vec<TableRow>) {
        let name = format!("homotopy reconstruction of {}", kind_name(kind));
        let anchor = "Prop t.Green, eq.Green.Sqmu.2";
        let go = || -> Result<(CheckRecord, Vec<TableRow>)> {
            let fine = measure(cfg, &cfg.domain, kind)?;
            let coarse = measure(cfg, &cfg.domain.with_nodes((cfg.domain.nodes_per_axis() / 2).max(1))?, kind)?;
            let tol_in = if kind == SolutionKind::ExteriorPole { cfg.tol_pole } else { cfg.tol_interior };
            let worst_fine = fine.interior_rel.max(fine.exterior_abs);
            let worst_coarse = coarse.interior_rel.max(coarse.exterior_abs);
            let halves = worst_fine <= 0.5 * worst_coarse || worst_fine <= ROUNDOFF_FLOOR;
            let ok = fine.interior_rel <= tol_in && fine.exterior_abs <= cfg.tol_exterior && halves;
            let rec = CheckRecord::pass_if(name.clone(), anchor, ok)
                .metric("nodes", cfg.domain.nodes().len())
                .metric("interior_max_rel_err", fine.interior_rel)
                .metric("exterior_max_abs", fine.exterior_abs)
                .metric("coarse_nodes", cfg.domain.with_nodes((cfg.domain.nodes_per_axis() / 2).max(1))?.nodes().len())
                .metric("coarse_interior_max_rel_err", coarse.interior_rel)
                .metric("coarse_exterior_max_abs", coarse.exterior_abs)
                .metric("near_boundary_points", fine.near_boundary);
            Ok((rec, fine.rows))
        };
        go().unwrap_or_else(|e| (CheckRecord::from_error(name, anchor, &e), Vec::new()))
    };
    let results: Vec<(CheckRecord, Vec<TableRow>)> =
        if parallel { cfg.kinds.par_iter().map(one).collect() } else { cfg.kinds.iter().map(one).collect() };
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (rec, r) in results {
        records.push(rec);
        rows.extend(r);
    }
    (records, rows)
}
