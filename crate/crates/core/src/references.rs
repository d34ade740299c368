//! Known leafwise cohomology and rigidity results that this crate does not
//! compute. They rely on representation theory or hyperbolic dynamics of
//! homogeneous spaces and are kept here so callers can cite them.

use serde::Serialize;

use crate::error::{Error, Result};

pub const NOT_COMPUTED: &str = "reference only — not computed by this tool";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Reference {
    pub id: &'static str,
    pub setting: &'static str,
    pub statement: &'static str,
    pub value: &'static str,
    pub source: &'static str,
    pub status: &'static str,
}

const fn entry(
    id: &'static str,
    setting: &'static str,
    statement: &'static str,
    value: &'static str,
    source: &'static str,
) -> Reference {
    Reference {
        id,
        setting,
        statement,
        value,
        source,
        status: NOT_COMPUTED,
    }
}

pub const REGISTRY: &[Reference] = &[
    entry(
        "weyl-chamber",
        "Weyl chamber flow of the positive diagonal subgroup A on Γ\\SL(p+1,R), Γ cocompact",
        "H^1(A_p) ≅ R^p, p ≥ 2",
        "dim H^1 = p",
        "Katok and Spatzier (1994)",
    ),
    entry(
        "upper-triangular",
        "orbit foliation F_p of the upper triangular subgroup with positive diagonal on Γ\\SL(p+1,R)",
        "H^1(F_p) ≅ R^p, p ≥ 2",
        "dim H^1 = p",
        "consequence of Katok and Spatzier (1994)",
    ),
    entry(
        "sl2-parabolic",
        "orbit foliation F_1 of the upper triangular subgroup on Γ\\SL(2,R), Γ cocompact",
        "H^1(sl_2(R)) ⊕ H^1(Γ\\SL(2,R)) → H^1(F_1) is an isomorphism",
        "H^1(F_1) ≅ H^1(M)",
        "Matsumoto and Mitsumatsu (2003)",
    ),
    entry(
        "sl2c-parabolic",
        "orbit foliation of the unipotent C-action z ↦ u(z) on M = Γ\\SL(2,C), Γ cocompact",
        "H^1(F) ≅ R² ⊕ H^1(M)",
        "dim H^1 = 2 + b_1(M)",
        "Mieczkowski (2007)",
    ),
    entry(
        "ga-rigid",
        "GA action on the suspension of a hyperbolic toral automorphism A",
        "the action ρ_A is parameter rigid",
        "parameter rigid",
        "Matsumoto and Mitsumatsu (2003)",
    ),
    entry(
        "ga-deformation",
        "standard GA action ρ_Γ on Γ\\SL(2,R), Γ cocompact",
        "when H^1(M_Γ) is non-trivial, ρ_Γ is not parameter rigid",
        "not parameter rigid if b_1(M_Γ) > 0",
        "Asaoka (2009)",
    ),
    entry(
        "gac-local-rigid",
        "standard GA_C action on Γ\\SL(2,C), Γ cocompact",
        "the standard GA_C action on Γ\\SL(2,C) is locally parameter rigid",
        "locally parameter rigid",
        "Asaoka (preprint)",
    ),
];

/// Exact id match first, then case-insensitive substring search over ids and
/// statements. An empty query lists everything.
pub fn lookup(query: &str) -> Result<Vec<&'static Reference>> {
    let q = query.trim();
    if q.is_empty() {
        return Ok(REGISTRY.iter().collect());
    }
    if let Some(r) = REGISTRY.iter().find(|r| r.id == q) {
        return Ok(vec![r]);
    }
    let lower = q.to_lowercase();
    let hits: Vec<_> = REGISTRY
        .iter()
        .filter(|r| {
            r.id.contains(&lower)
                || r.statement.to_lowercase().contains(&lower)
                || r.setting.to_lowercase().contains(&lower)
        })
        .collect();
    if hits.is_empty() {
        return Err(Error::Invalid(format!("unknown reference id {q:?}")));
    }
    Ok(hits)
}
