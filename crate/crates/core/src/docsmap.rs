//! Provenance manifest checking.
//!
//! The repository ships a manifest (`paper_map.json`) that anchors each
//! documented formula or statement to the library operation implementing it.
//! This module holds the authoritative registry of those operations — each
//! entry is compile-checked against the actual item, so renaming or deleting
//! an operation without updating the registry breaks the build — and a
//! checker that enforces an exact bijection between the manifest's targets
//! and the registry.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One manifest entry: a labelled source anchor with a verbatim quote and the
/// `module.operation` path of the implementing item.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestAnchor {
    pub label: String,
    pub quote: String,
    pub target: String,
}

/// A documented statement deliberately not implemented.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutOfScopeEntry {
    pub label: String,
    pub quote: String,
    pub reason: String,
}

/// The full manifest file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub anchors: Vec<ManifestAnchor>,
    #[serde(default)]
    pub out_of_scope: Vec<OutOfScopeEntry>,
    /// Symbols that appear in the documentation but intentionally have no
    /// code counterpart (with a one-line explanation each).
    #[serde(default)]
    pub unhoused: Vec<String>,
}

/// Outcome of checking a manifest against the registry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestReport {
    /// Registry operations no manifest anchor points to.
    pub missing: Vec<String>,
    /// Manifest targets that name no registered operation.
    pub unknown: Vec<String>,
    /// Targets referenced by more than one anchor.
    pub duplicates: Vec<String>,
    /// Labels of anchors with an empty label, quote, or target.
    pub malformed: Vec<String>,
    pub passed: bool,
}

// Each registry entry evaluates a path expression (for functions and methods)
// or takes a type's size (for types), so the string stays tied to a real item.
macro_rules! op {
    ($name:literal, fn $p:expr) => {{
        let _ = $p;
        $name
    }};
    ($name:literal, ty $t:ty) => {{
        let _ = std::mem::size_of::<$t>;
        $name
    }};
}

/// The registered operations, in manifest target syntax
/// (`module.item` or `module.Type.method`).
pub fn registered_targets() -> Vec<&'static str> {
    vec![
        op!("model.dual_density", fn crate::model::dual_density),
        op!("model.reduce_problem", fn crate::model::reduce_problem),
        op!("model.transition_density", fn crate::model::transition_density),
        op!("kernels.green_1d", fn crate::kernels::green_1d),
        op!("kernels.Kernel2D", ty crate::kernels::Kernel2D),
        op!("kernels.b_rho", fn crate::kernels::b_rho),
        op!("kernels.a_rho", fn crate::kernels::a_rho),
        op!("kernels.resolvent_2d", fn crate::kernels::resolvent_2d),
        op!("kernels.SpaceTimeKernel", ty crate::kernels::SpaceTimeKernel),
        op!("kernels.spacetime_kernel", fn crate::kernels::spacetime_kernel),
        op!("special.bessel_k0", fn crate::special::bessel_k0),
        op!("riesz.sigma_density", fn crate::riesz::sigma_density),
        op!("riesz.RepresentingDensity", ty crate::riesz::RepresentingDensity),
        op!(
            "riesz.RepresentingDensity.terminal_mass",
            fn crate::riesz::RepresentingDensity::terminal_mass
        ),
        op!("riesz.candidate_value_1d", fn crate::riesz::candidate_value_1d),
        op!("riesz.candidate_value_2d", fn crate::riesz::candidate_value_2d),
        op!(
            "riesz.candidate_value_spacetime",
            fn crate::riesz::candidate_value_spacetime
        ),
        op!("riesz.CandidateSet", ty crate::riesz::CandidateSet),
        op!("perpetual.PerpetualSolution", ty crate::perpetual::PerpetualSolution),
        op!("perpetual.solve_perpetual", fn crate::perpetual::solve_perpetual),
        op!("perpetual.perpetual_value", fn crate::perpetual::perpetual_value),
        op!("invest2d.EllipsoidBoundary", ty crate::invest2d::EllipsoidBoundary),
        op!("invest2d.boundary_gamma", fn crate::invest2d::boundary_gamma),
        op!("invest2d.residual_at", fn crate::invest2d::residual_at),
        op!("invest2d.fit_boundary", fn crate::invest2d::fit_boundary),
        op!("invest2d.uniqueness_gate", fn crate::invest2d::uniqueness_gate),
        op!("amput.ExerciseBoundary", ty crate::amput::ExerciseBoundary),
        op!("amput.ExerciseBoundary.at", fn crate::amput::ExerciseBoundary::at),
        op!("amput.crossing_prob", fn crate::amput::crossing_prob),
        op!("amput.european_put", fn crate::amput::european_put),
        op!("amput.eep_value", fn crate::amput::eep_value),
        op!("amput.solve_boundary", fn crate::amput::solve_boundary),
        op!("verify.check_duality", fn crate::verify::check_duality),
        op!("verify.check_dynkin", fn crate::verify::check_dynkin),
        op!("verify.policy_value_mc", fn crate::verify::policy_value_mc),
    ]
}

/// Checks a parsed manifest against the registry: every anchor well-formed,
/// every registered operation covered exactly once, no unknown targets.
pub fn verify_manifest(manifest: &Manifest) -> ManifestReport {
    let registry: BTreeSet<&str> = registered_targets().into_iter().collect();

    let mut malformed = Vec::new();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, a) in manifest.anchors.iter().enumerate() {
        if a.label.trim().is_empty() || a.quote.trim().is_empty() || a.target.trim().is_empty() {
            malformed.push(if a.label.trim().is_empty() {
                format!("anchor #{i}")
            } else {
                a.label.clone()
            });
        }
        *counts.entry(a.target.as_str()).or_insert(0) += 1;
    }
    for e in &manifest.out_of_scope {
        if e.label.trim().is_empty() || e.quote.trim().is_empty() || e.reason.trim().is_empty() {
            malformed.push(format!("out_of_scope: {}", e.label));
        }
    }

    let targets: BTreeSet<&str> = counts.keys().copied().collect();
    let missing: Vec<String> =
        registry.difference(&targets).map(|s| s.to_string()).collect();
    let unknown: Vec<String> =
        targets.difference(&registry).map(|s| s.to_string()).collect();
    let duplicates: Vec<String> = counts
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(t, _)| t.to_string())
        .collect();

    let passed =
        missing.is_empty() && unknown.is_empty() && duplicates.is_empty() && malformed.is_empty();
    ManifestReport { missing, unknown, duplicates, malformed, passed }
}

/// Loads and checks the manifest at `path`.
pub fn check_manifest(path: &Path) -> Result<ManifestReport> {
    let text = std::fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    Ok(verify_manifest(&manifest))
}

/// Location of the manifest shipped at the repository root.
pub fn default_manifest_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../paper_map.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shipped() -> Manifest {
        let text = std::fs::read_to_string(default_manifest_path()).unwrap();
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn shipped_manifest_passes() {
        let report = verify_manifest(&shipped());
        assert!(
            report.passed,
            "missing {:?}, unknown {:?}, duplicates {:?}, malformed {:?}",
            report.missing, report.unknown, report.duplicates, report.malformed
        );
    }

    #[test]
    fn removing_an_anchor_fails() {
        let mut m = shipped();
        m.anchors.pop();
        let report = verify_manifest(&m);
        assert!(!report.passed);
        assert_eq!(report.missing.len(), 1);
    }

    #[test]
    fn renamed_target_is_unknown_and_missing() {
        let mut m = shipped();
        m.anchors[0].target = "model.no_such_operation".into();
        let report = verify_manifest(&m);
        assert!(!report.passed);
        assert!(report.unknown.contains(&"model.no_such_operation".to_string()));
        assert_eq!(report.missing.len(), 1);
    }

    #[test]
    fn duplicate_target_fails() {
        let mut m = shipped();
        let t = m.anchors[0].target.clone();
        m.anchors.push(ManifestAnchor {
            label: "dup".into(),
            quote: "dup".into(),
            target: t.clone(),
        });
        let report = verify_manifest(&m);
        assert!(!report.passed);
        assert!(report.duplicates.contains(&t));
    }

    #[test]
    fn empty_quote_is_malformed() {
        let mut m = shipped();
        m.anchors[0].quote = "  ".into();
        assert!(!verify_manifest(&m).passed);
    }

    #[test]
    fn registry_targets_are_unique() {
        let targets = registered_targets();
        let set: std::collections::BTreeSet<_> = targets.iter().collect();
        assert_eq!(set.len(), targets.len());
    }
}
