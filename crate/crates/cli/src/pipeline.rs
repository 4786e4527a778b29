//! End-to-end orchestration: quiver → map → Kasteleyn → diagram →
//! geometry → dessin, with optional mutation and invariance stages, a
//! consolidated pass/fail report, and artifact files.

use serde::Serialize;
use std::fmt::Write as _;
use tilingforge_core::dessin;
use tilingforge_core::fixtures::Fixture;
use tilingforge_core::geometry;
use tilingforge_core::kasteleyn;
use tilingforge_core::map::{self, CombinatorialMap};
use tilingforge_core::mutation;
use tilingforge_core::poly;
use tilingforge_core::quiver::{validate_quiver, Quiver};

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub name: String,
    pub ok: bool,
    pub lines: Vec<String>,
}

impl StageReport {
    fn new(name: &str) -> Self {
        StageReport {
            name: name.into(),
            ok: true,
            lines: Vec::new(),
        }
    }

    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    fn check(&mut self, ok: bool, what: &str) {
        self.lines
            .push(format!("[{}] {}", if ok { "pass" } else { "FAIL" }, what));
        self.ok &= ok;
    }

    fn fail(&mut self, err: impl std::fmt::Display) {
        self.lines.push(format!("error: {}", err));
        self.ok = false;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub source: String,
    pub stages: Vec<StageReport>,
}

impl PipelineReport {
    pub fn all_ok(&self) -> bool {
        self.stages.iter().all(|s| s.ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pipeline: {}", self.source);
        for stage in &self.stages {
            let _ = writeln!(
                out,
                "== {} [{}]",
                stage.name,
                if stage.ok { "ok" } else { "FAILED" }
            );
            for line in &stage.lines {
                let _ = writeln!(out, "   {}", line);
            }
        }
        let _ = writeln!(
            out,
            "result: {}",
            if self.all_ok() { "PASS" } else { "FAIL" }
        );
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct StageSelection {
    pub validate: bool,
    pub map: bool,
    pub kasteleyn: bool,
    pub matchings: bool,
    pub geometry: bool,
    pub dessin: bool,
    pub mutate_node: Option<String>,
    pub check_invariance: bool,
}

impl StageSelection {
    pub fn all() -> Self {
        StageSelection {
            validate: true,
            map: true,
            kasteleyn: true,
            matchings: true,
            geometry: true,
            dessin: true,
            mutate_node: None,
            check_invariance: false,
        }
    }

    pub fn any(&self) -> bool {
        self.validate
            || self.map
            || self.kasteleyn
            || self.matchings
            || self.geometry
            || self.dessin
            || self.mutate_node.is_some()
    }
}

type WeightsAndSigns = (Vec<(i64, i64)>, Vec<i8>);

pub struct PipelineInput {
    pub source: String,
    pub quiver: Option<Quiver>,
    pub map: CombinatorialMap,
    pub pinned_weights: Option<Vec<(i64, i64)>>,
    pub pinned_signs: Option<Vec<i8>>,
    pub fixture: Option<Fixture>,
}

impl PipelineInput {
    pub fn from_fixture(f: Fixture) -> Result<Self, String> {
        let map = f.map().map_err(|e| e.to_string())?;
        let quiver = if f.stores_map() {
            None
        } else {
            f.quiver().ok()
        };
        Ok(PipelineInput {
            source: format!("fixture {}", f.name),
            quiver,
            map,
            pinned_weights: f.pinned_weights(),
            pinned_signs: f.pinned_signs(),
            fixture: Some(f),
        })
    }

    pub fn from_quiver(label: String, q: Quiver) -> Result<Self, String> {
        let map = map::quiver_to_map(&q).map_err(|e| e.to_string())?;
        Ok(PipelineInput {
            source: label,
            quiver: Some(q),
            map,
            pinned_weights: None,
            pinned_signs: None,
            fixture: None,
        })
    }
}

pub fn format_float(x: f64) -> String {
    format!("{:.10}", x)
}

pub fn format_complex(z: num::complex::Complex64) -> String {
    if z.im >= 0.0 {
        format!("{:.10} + {:.10}i", z.re, z.im)
    } else {
        format!("{:.10} - {:.10}i", z.re, -z.im)
    }
}

/// Run the selected stages in dependency order; every internal invariant
/// becomes a pass/fail line. `seed` feeds the optimizer; `tolerance`
/// applies to comparisons against a fixture's reference values.
pub fn run_pipeline(
    input: &PipelineInput,
    stages: &StageSelection,
    seed: u64,
    tolerance: f64,
) -> PipelineReport {
    let mut report = PipelineReport {
        source: input.source.clone(),
        stages: Vec::new(),
    };
    let m = &input.map;

    if stages.validate {
        let mut stage = StageReport::new("validate");
        match &input.quiver {
            Some(q) => {
                let rep = validate_quiver(q);
                let (n0, n1, n2) = rep.counts;
                stage.line(format!("N0={} N1={} N2={}", n0, n1, n2));
                for c in &rep.checks {
                    stage.check(c.passed, &format!("{}: {}", c.name, c.detail));
                }
            }
            None => match map::map_to_quiver(m) {
                Ok(q) => {
                    let rep = validate_quiver(&q);
                    stage.line("quiver derived from the stored map".to_string());
                    for c in &rep.checks {
                        stage.check(c.passed, &format!("{}: {}", c.name, c.detail));
                    }
                }
                Err(e) => stage.fail(e),
            },
        }
        report.stages.push(stage);
    }

    if stages.map {
        let mut stage = StageReport::new("map");
        stage.line(format!(
            "edges={} black={} white={} faces={}",
            m.edge_count(),
            m.black_nodes().len(),
            m.white_nodes().len(),
            m.face_count()
        ));
        match m.genus() {
            Ok(g) => stage.check(g == 1, &format!("genus = {}", g)),
            Err(e) => stage.fail(e),
        }
        if let Some(q) = &input.quiver {
            stage.check(
                m.face_count() == q.nodes.len(),
                &format!("faces = quiver nodes ({})", q.nodes.len()),
            );
        }
        report.stages.push(stage);
    }

    let weights_signs = || -> Result<WeightsAndSigns, String> {
        let weights = match &input.pinned_weights {
            Some(w) => w.clone(),
            None => map::homology_weights(m).map_err(|e| e.to_string())?.weights,
        };
        let signs = match &input.pinned_signs {
            Some(s) => s.clone(),
            None => kasteleyn::kasteleyn_signs(m).map_err(|e| e.to_string())?,
        };
        Ok((weights, signs))
    };

    if stages.kasteleyn || stages.matchings {
        let mut stage = StageReport::new("kasteleyn");
        match weights_signs() {
            Ok((weights, signs)) => {
                stage.check(
                    kasteleyn::signs_valid(m, &signs),
                    "sign assignment satisfies face parities",
                );
                if input.pinned_weights.is_some() {
                    match map::homology_weights(m) {
                        Ok(hw) => stage.check(
                            map::HomologyWeights::is_cocycle(&weights, m)
                                && hw.unimodular(&weights),
                            "pinned weights form a unimodular cocycle",
                        ),
                        Err(e) => stage.fail(e),
                    }
                }
                match kasteleyn::kasteleyn_matrix(m, &signs, &weights) {
                    Ok(k) => {
                        let det = kasteleyn::laurent_det(&k);
                        stage.line(format!("det K = {}", det));
                        match poly::toric_diagram(&det) {
                            Ok(d) => {
                                for line in d.to_text().lines() {
                                    stage.line(format!("diagram: {}", line));
                                }
                                match poly::mirror_equation(&d, None) {
                                    Ok(eq) => stage.line(format!("mirror: {}", eq)),
                                    Err(e) => stage.fail(e),
                                }
                                if stages.matchings {
                                    match kasteleyn::enumerate_matchings(m, &weights, None) {
                                        Ok(ms) => {
                                            stage.line(format!("perfect matchings: {}", ms.len()));
                                            stage.check(
                                                kasteleyn::determinant_matches_matchings(&det, &ms),
                                                "matching multiplicities equal |det| coefficients",
                                            );
                                        }
                                        Err(e) => stage.fail(e),
                                    }
                                }
                            }
                            Err(e) => stage.fail(e),
                        }
                    }
                    Err(e) => stage.fail(e),
                }
            }
            Err(e) => stage.fail(e),
        }
        report.stages.push(stage);
    }

    if stages.geometry {
        let mut stage = StageReport::new("geometry");
        match geometry::maximize_a_seeded(m, seed) {
            Ok(a) => {
                for (edge, &r) in m.edges.iter().zip(&a.r) {
                    stage.line(format!("R[{}] = {}", edge, format_float(r)));
                }
                stage.line(format!("a(R) = {}", format_float(a.objective)));
                stage.check(
                    !a.uniqueness_warning,
                    "maximum unique across converged restarts",
                );
                match geometry::modular_data(m, &a.r) {
                    Ok(md) => {
                        stage.line(format!("tau = {}", format_complex(md.tau_reduced)));
                        stage.line(format!("j = {}", format_complex(md.j)));
                        stage.line(format!("J = {}", format_complex(md.j_normalized)));
                        if let Some(f) = &input.fixture {
                            if let Some(expected) = f.expected.j_normalized {
                                stage.check(
                                    (md.j_normalized.re - expected).abs() < tolerance
                                        && md.j_normalized.im.abs() < tolerance,
                                    &format!("J matches reference {}", expected),
                                );
                            }
                            if let Some(rcharges) = f.expected.rcharges {
                                let ok = rcharge_multiset_matches(&a.r, rcharges, tolerance);
                                stage.check(ok, "R-charges match reference multiset");
                            }
                        }
                    }
                    Err(e) => stage.fail(e),
                }
            }
            Err(e) => stage.fail(e),
        }
        report.stages.push(stage);
    }

    if stages.dessin {
        let mut stage = StageReport::new("dessin");
        match dessin::permutation_triple(m) {
            Ok(t) => {
                for line in t.to_string().lines() {
                    stage.line(line.to_string());
                }
                let p = dessin::passport(&t);
                stage.line(format!("passport = {}", p));
                stage.line(format!("degree = {}", p.degree()));
                stage.check(p.rows_sum_to_degree(), "passport rows sum to the degree");
                match dessin::rh_genus(&t) {
                    Ok(g) => {
                        stage.line(format!("genus = {}", g));
                        stage.check(
                            Ok(g) == m.genus().map_err(|_| ()),
                            "Riemann-Hurwitz genus equals map genus",
                        );
                    }
                    Err(e) => stage.fail(e),
                }
                if let Some(f) = &input.fixture {
                    if let Some(expected) = f.expected.passport {
                        stage.check(
                            p.to_string() == expected,
                            &format!("passport matches reference {}", expected),
                        );
                    }
                }
            }
            Err(e) => stage.fail(e),
        }
        report.stages.push(stage);
    }

    if let Some(node) = &stages.mutate_node {
        let mut stage = StageReport::new("mutate");
        let quiver = match &input.quiver {
            Some(q) => Ok(q.clone()),
            None => map::map_to_quiver(m).map_err(|e| e.to_string()),
        };
        match quiver {
            Ok(q) => match mutation::seiberg_mutate(&q, node) {
                Ok((mutated, record)) => {
                    stage.line(format!(
                        "mutated at node {}: {} mesons, terms {} -> {}",
                        record.node,
                        record.mesons.len(),
                        record.terms_before,
                        record.terms_after
                    ));
                    match mutation::reduce_mass_terms_with_record(&mutated) {
                        Ok((reduced, removed)) => {
                            stage.line(format!("mass pairs removed: {}", removed.len()));
                            stage.check(
                                validate_quiver(&reduced).all_passed(),
                                "mutated+reduced quiver passes validation",
                            );
                            if stages.check_invariance {
                                match mutation::check_duality_invariance(&q, &reduced) {
                                    Ok(inv) => {
                                        for line in inv.first_polygon.lines() {
                                            stage.line(format!("polygon before: {}", line));
                                        }
                                        for line in inv.second_polygon.lines() {
                                            stage.line(format!("polygon after:  {}", line));
                                        }
                                        stage.check(
                                            inv.equal,
                                            "canonical polygon invariant under mutation",
                                        );
                                    }
                                    Err(e) => stage.fail(e),
                                }
                            }
                        }
                        Err(e) => stage.fail(e),
                    }
                }
                Err(e) => stage.fail(e),
            },
            Err(e) => stage.fail(e),
        }
        report.stages.push(stage);
    }

    report
}

fn rcharge_multiset_matches(r: &[f64], expected: &[(f64, usize)], tol: f64) -> bool {
    let total: usize = expected.iter().map(|(_, n)| n).sum();
    if r.len() != total {
        return false;
    }
    let mut used = vec![false; r.len()];
    for &(value, count) in expected {
        let mut found = 0;
        for (i, &x) in r.iter().enumerate() {
            if !used[i] && (x - value).abs() < tol {
                used[i] = true;
                found += 1;
                if found == count {
                    break;
                }
            }
        }
        if found != count {
            return false;
        }
    }
    used.iter().all(|&u| u)
}
