//! Machine-readable check reports and the identity suite run by `verify`.
//!
//! A [`Report`] passes exactly when every entry in `checks` passes. Entries in
//! `findings` are informational (memberships, kernel dimensions, which
//! factorizations exist) and never affect the verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::decompose::{delta_decompose, delta_from_gamma, gamma_from_delta, IntertwineReport};
use crate::error::Result;
use crate::halmos::{abs_2p_minus_i, corner_weights, halmos_symmetry, min_positive_symmetry, HalmosRoute};
use crate::idempotent::{kernel_dims_corner, kernel_dims_direct, range_kernel_projections, Idempotent};
use crate::linalg::{
    abs_value, c64, dist, hermitian_eigen, identity, inverse_abs_value, op_norm,
    projector, scaled, svd, symmetrize, unitary_residual, ComplexMatrix,
};
use crate::symmetry::{membership, positive_residual, symmetry_residual, Membership};

/// What was analyzed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub name: Option<String>,
    pub n: usize,
    pub rank: usize,
    pub seed: Option<u64>,
    pub norm_cap: Option<f64>,
}

impl Instance {
    pub fn of(p: &Idempotent) -> Self {
        Self {
            name: None,
            n: p.dim(),
            rank: p.block_form().rank(),
            seed: None,
            norm_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub check_id: String,
    /// The identity being tested.
    pub anchor: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub instance: Instance,
    pub checks: Vec<CheckEntry>,
    pub findings: BTreeMap<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(instance: Instance) -> Self {
        Self {
            instance,
            checks: Vec::new(),
            findings: BTreeMap::new(),
            pass: true,
        }
    }

    /// Records a residual that passes when at most `bound`.
    pub fn check(&mut self, id: &str, anchor: &str, residual: f64, bound: f64) {
        self.record(id, anchor, residual, residual <= bound);
    }

    pub fn record(&mut self, id: &str, anchor: &str, residual: f64, pass: bool) {
        self.pass &= pass;
        self.checks.push(CheckEntry {
            check_id: id.to_owned(),
            anchor: anchor.to_owned(),
            residual,
            pass,
        });
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.findings.insert(key.to_owned(), value);
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let inst = &self.instance;
        let _ = write!(out, "instance: n={} rank={}", inst.n, inst.rank);
        if let Some(name) = &inst.name {
            let _ = write!(out, " name={name}");
        }
        if let Some(seed) = inst.seed {
            let _ = write!(out, " seed={seed}");
        }
        if let Some(cap) = inst.norm_cap {
            let _ = write!(out, " norm_cap={cap}");
        }
        out.push('\n');
        let width = self.checks.iter().map(|c| c.check_id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  {} {:width$}  {:>10.3e}  {}",
                if c.pass { "ok  " } else { "FAIL" },
                c.check_id,
                c.residual,
                c.anchor,
            );
        }
        for (k, v) in &self.findings {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let failed = self.failed().count();
        let _ = writeln!(
            out,
            "{}: {} checks, {failed} failed",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        out
    }
}

fn half(m: &ComplexMatrix) -> ComplexMatrix {
    scaled(m, c64::new(0.5, 0.0))
}

/// Every identity that holds for an arbitrary idempotent.
///
/// Residuals are normalized by `1 + ‖P‖` (or its square for products of two
/// operators of size `‖P‖`); rank equalities report the absolute difference.
/// The suite aggregates: a failing computation is recorded as an infinite
/// residual, and later checks still run.
pub fn identity_suite(p: &Idempotent, instance: Instance) -> Report {
    let mut report = Report::new(instance);
    let tol = *p.tolerance();
    let atol = tol.residual_atol;
    let n = p.dim();
    let scale = 1.0 + p.norm();
    let id = identity(n);
    let reflection = p.reflection();
    let adjoint_p = p.adjoint();
    let adjoint_reflection = adjoint_p.reflection();
    let sum_minus_i = p.hermitian_sum() - &id;

    let run = |r: &mut Report, check_id: &str, anchor: &str, f: &dyn Fn() -> Result<f64>| {
        let residual = f().unwrap_or(f64::INFINITY);
        r.check(check_id, anchor, residual, atol);
    };

    let abs_reflection = abs_value(&reflection, &tol);
    let abs_adjoint_reflection = abs_value(&adjoint_reflection, &tol);

    run(&mut report, "abs_adjoint_is_inverse", "|2P*-I| = |2P-I|^-1", &|| {
        let closed_inverse = abs_2p_minus_i(p, true)?;
        Ok(dist(abs_adjoint_reflection.as_ref().map_err(Clone::clone)?, &closed_inverse) / scale)
    });
    run(&mut report, "abs_product_is_identity", "|2P*-I| |2P-I| = I", &|| {
        let a = abs_adjoint_reflection.as_ref().map_err(Clone::clone)?;
        let b = abs_reflection.as_ref().map_err(Clone::clone)?;
        Ok(dist(&(a * b), &id) / (scale * scale))
    });

    let routes = || -> Result<[ComplexMatrix; 3]> {
        Ok([
            halmos_symmetry(p, HalmosRoute::Reflection)?.into_matrix(),
            halmos_symmetry(p, HalmosRoute::HermitianSum)?.into_matrix(),
            halmos_symmetry(p, HalmosRoute::Block)?.into_matrix(),
        ])
    };
    let routes = routes();
    let block_route = routes.as_ref().map(|r| r[2].clone()).map_err(Clone::clone);

    run(&mut report, "halmos_is_symmetry", "J' = J'* = J'^-1 for J' = (2P-I)|2P-I|^-1", &|| {
        let r = routes.as_ref().map_err(Clone::clone)?;
        Ok(symmetry_residual(&r[0]))
    });
    run(&mut report, "halmos_adjoint_invariance", "(2P-I)|2P-I|^-1 = (2P*-I)|2P*-I|^-1", &|| {
        let r = routes.as_ref().map_err(Clone::clone)?;
        let other = halmos_symmetry(&adjoint_p, HalmosRoute::Reflection)?;
        Ok(dist(&r[0], other.matrix()))
    });
    run(&mut report, "halmos_hermitian_sum_route", "(2P-I)|2P-I|^-1 = (P+P*-I)|P+P*-I|^-1", &|| {
        let r = routes.as_ref().map_err(Clone::clone)?;
        Ok(dist(&r[0], &r[1]))
    });
    run(&mut report, "halmos_block_route", "(2P-I)|2P-I|^-1 = [[A, A P1], [P1* A, -B]]", &|| {
        let r = routes.as_ref().map_err(Clone::clone)?;
        Ok(dist(&r[0], &r[2]))
    });

    run(&mut report, "abs_closed_form", "|2P-I| = [[A, A P1], [P1* A, (I+2P1*P1) B]]", &|| {
        let direct = abs_reflection.as_ref().map_err(Clone::clone)?;
        Ok(dist(direct, &abs_2p_minus_i(p, false)?) / scale)
    });
    run(&mut report, "abs_inverse_closed_form", "|2P-I|^-1 = [[(I+2P1P1*) A, -A P1], [-P1* A, B]]", &|| {
        let direct = inverse_abs_value(&reflection, &tol)?;
        Ok(dist(&direct, &abs_2p_minus_i(p, true)?) / scale)
    });
    run(&mut report, "abs_average", "(|2P-I| + |2P*-I|) / 2 = |P+P*-I|", &|| {
        let a = abs_reflection.as_ref().map_err(Clone::clone)?;
        let b = abs_adjoint_reflection.as_ref().map_err(Clone::clone)?;
        Ok(dist(&half(&(a + b)), &abs_value(&sum_minus_i, &tol)?) / scale)
    });

    let bf = p.block_form();
    run(&mut report, "corner_commutation", "P1 (I+P1*P1)^-1/2 = (I+P1P1*)^-1/2 P1", &|| {
        let w = corner_weights(bf, &tol)?;
        let p1 = bf.corner();
        Ok(dist(&(p1 * &w.b), &(&w.a * p1)) / (1.0 + op_norm(p1)))
    });

    match &block_route {
        Ok(j) => {
            let pos = positive_residual(p, j);
            let floor = tol.psd_tol * scale;
            let negativity = (-pos.min_eigenvalue).max(0.0) / scale;
            report.record(
                "halmos_positive",
                "J'P >= 0",
                pos.hermitian_residual.max(negativity),
                pos.hermitian_residual <= atol && pos.min_eigenvalue >= floor,
            );
        }
        Err(_) => report.record("halmos_positive", "J'P >= 0", f64::INFINITY, false),
    }
    run(&mut report, "halmos_is_min_positive", "J' = 2 P_R((P+P*)+) - I", &|| {
        let j = block_route.as_ref().map_err(Clone::clone)?;
        Ok(dist(j, min_positive_symmetry(p)?.matrix()))
    });

    let ranks = kernel_dims_direct(p).and_then(|d| Ok((d, kernel_dims_corner(p)?)));
    let (plus, minus) = match &ranks {
        Ok((d, c)) => (
            (d.d_plus as f64 - c.d_plus as f64).abs(),
            (d.d_minus as f64 - c.d_minus as f64).abs(),
        ),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    report.check("kernel_rank_plus", "dim N(P1) = dim N(P+P*)", plus, 0.0);
    report.check("kernel_rank_minus", "dim N(P1*) = dim N(2I-P-P*)", minus, 0.0);

    let projections = range_kernel_projections(p);
    let dec = svd(p.matrix(), tol.rank_rtol);
    run(&mut report, "projection_range", "P(P+P*-I)^-1 = P_R(P)", &|| {
        let pr = projections.as_ref().map_err(Clone::clone)?;
        let d = dec.as_ref().map_err(Clone::clone)?;
        Ok(dist(&pr.range, &projector(&d.range_basis())))
    });
    run(&mut report, "projection_kernel", "-(I-P)(P+P*-I)^-1 = P_N(P)", &|| {
        let pr = projections.as_ref().map_err(Clone::clone)?;
        let d = dec.as_ref().map_err(Clone::clone)?;
        Ok(dist(&pr.kernel, &projector(&d.kernel_basis())))
    });
    run(&mut report, "projection_inverse", "(P_R(P) - P_N(P))(P+P*-I) = I", &|| {
        let pr = projections.as_ref().map_err(Clone::clone)?;
        Ok(dist(&((&pr.range - &pr.kernel) * &sum_minus_i), &id) / scale)
    });
    run(&mut report, "projection_recovers_p", "P = P_R(P)(P_R(P) - P_N(P))^-1", &|| {
        let pr = projections.as_ref().map_err(Clone::clone)?;
        let diff = symmetrize(&(&pr.range - &pr.kernel));
        let inverse = hermitian_eigen(&diff)?.map(|l| 1.0 / l);
        Ok(dist(&(&pr.range * inverse), p.matrix()) / scale)
    });

    report.check("block_basis_unitary", "[range_basis | perp_basis] is unitary", unitary_residual(&bf.unitary()), atol);
    report.check(
        "block_reconstruction",
        "P = [[I, P1], [0, 0]] in R(P) + R(P)^perp",
        dist(&bf.reconstruct(), p.matrix()) / scale,
        atol,
    );

    if let Ok((d, _)) = &ranks {
        report.note("kernel_dims", d);
        report.note("gamma_exists", d.d_plus == d.d_minus);
    }
    report
}

/// Membership of `J` in the three families. The only check is that `J`
/// is a symmetry of the right size; the memberships go to the findings.
pub fn membership_report(p: &Idempotent, j: &ComplexMatrix, instance: Instance) -> Report {
    let mut report = Report::new(instance);
    let m: Membership = membership(p, j);
    report.record(
        "input_is_symmetry",
        "J = J* = J^-1",
        m.symmetry_residual,
        m.is_symmetry,
    );
    report.note("in_gamma", m.in_gamma);
    report.note("in_delta", m.in_delta);
    report.note("positive_pair", m.positive);
    report.note("membership", m);
    report
}

/// Output of [`decomposition_report`].
#[derive(Debug, Clone)]
pub struct DecompositionOutput {
    pub report: Report,
    /// The Δ_P member that was factored.
    pub delta: ComplexMatrix,
    pub j1: ComplexMatrix,
    pub j2: ComplexMatrix,
    /// Image of the Δ_P member in Γ_P, equal to `J₁`.
    pub gamma_image: ComplexMatrix,
}

/// Factors `J`; a member of Γ_P that is not in Δ_P is first carried to Δ_P.
pub fn decomposition_report(
    p: &Idempotent,
    j: &ComplexMatrix,
    instance: Instance,
) -> Result<DecompositionOutput> {
    let tol = *p.tolerance();
    let atol = tol.residual_atol;
    let m = membership(p, j);
    let (delta, family) = if m.in_delta {
        (j.clone(), "delta")
    } else {
        (delta_from_gamma(p, j)?.into_matrix(), "gamma")
    };
    let d = delta_decompose(p, &delta)?;
    let gamma_image = gamma_from_delta(p, &delta)?;
    let back = delta_from_gamma(p, gamma_image.matrix())?;

    let mut report = Report::new(instance);
    report.note("input_family", family);
    report.check("reconstruction", "J = -i J1 J2 = i J2 J1", d.residual, atol);
    let j1m = membership(p, d.j1.matrix());
    report.check("j1_in_gamma", "J1 P J1 = I - P", j1m.gamma_residual.max(j1m.symmetry_residual), atol);
    let jmin = min_positive_symmetry(p)?;
    report.check("j2_is_min_positive", "J2 = 2 P_R((P+P*)+) - I", dist(d.j2.matrix(), jmin.matrix()), atol);
    report.check("j1_unique", "J1 = i J J' for J' = (2P-I)|2P-I|^-1", d.uniqueness_residual, atol);
    report.check("bijection_roundtrip", "-i (i J J2) J2 = J", dist(back.matrix(), &delta), atol);
    if family == "gamma" {
        report.check("input_roundtrip", "i (-i J J2) J2 = J", dist(gamma_image.matrix(), j), atol);
    }
    report.note("commuting_factorization_exists", p.is_orthogonal());
    Ok(DecompositionOutput {
        report,
        delta,
        j1: d.j1.into_matrix(),
        j2: d.j2.into_matrix(),
        gamma_image: gamma_image.into_matrix(),
    })
}

/// The three equivalent conditions must agree; their values go to the findings.
pub fn intertwine_report(r: &IntertwineReport, instance: Instance) -> Report {
    let mut report = Report::new(instance);
    let spread = [r.residual_i, r.residual_ii, r.residual_iii];
    let worst = spread.iter().copied().fold(0.0, f64::max);
    report.record(
        "conditions_agree",
        "UPU* = Q <=> U P_R U* = Q_R, U P_N U* = Q_N <=> U(P_R-P_N)U* = Q_R-Q_N, U(P-P*)U* = Q-Q*",
        if r.i { worst } else { spread.iter().copied().fold(f64::INFINITY, f64::min) },
        r.consistent,
    );
    report.note("conjugation", r.i);
    report.note("projections", r.ii);
    report.note("reflection_and_skew_part", r.iii);
    report.note("residuals", spread);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idempotent::random_idempotent;
    use crate::linalg::{diag, from_real_rows, ToleranceConfig};

    #[test]
    fn suite_passes_on_oblique_fixture() {
        let p = Idempotent::new(
            from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]),
            &ToleranceConfig::default(),
        )
        .unwrap();
        let r = identity_suite(&p, Instance::of(&p));
        assert!(r.pass, "{}", r.to_table());
        assert_eq!(r.checks.len(), 20);
    }

    #[test]
    fn suite_passes_on_degenerate_ranks() {
        for r in [0, 3] {
            let p = random_idempotent(3, r, 10.0, 4).unwrap();
            let rep = identity_suite(&p, Instance::of(&p));
            assert!(rep.pass, "{}", rep.to_table());
        }
    }

    #[test]
    fn suite_passes_on_random_instance() {
        let p = random_idempotent(9, 4, 10.0, 21).unwrap();
        let rep = identity_suite(&p, Instance::of(&p));
        assert!(rep.pass, "{}", rep.to_table());
    }

    #[test]
    fn overall_verdict_tracks_entries() {
        let p = Idempotent::new(diag(&[1.0, 0.0]), &ToleranceConfig::default()).unwrap();
        let mut r = Report::new(Instance::of(&p));
        r.check("a", "x", 0.0, 1e-8);
        assert!(r.pass);
        r.check("b", "y", 1.0, 1e-8);
        assert!(!r.pass);
        assert_eq!(r.failed().count(), 1);
        let json: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["checks"][1]["pass"], Value::Bool(false));
    }
}
