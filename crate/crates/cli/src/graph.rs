//! The registered web of maps between phase-space models, and path-finding
//! over it.
//!
//! Edges point only in directions that are single-valued: duality maps both
//! ways, chart maps both ways, coverings downward, slices into the level
//! set, and projections out of it.  Upward covering lifts are multivalued
//! (deck ambiguity), so no edge exists and such requests fail with a
//! path error.  Paths are found by breadth-first search over a fixed edge
//! order, so a given request always composes the same maps.

use dualpair_core::coverings::{psi1_i, psi1_ii, psi2};
use dualpair_core::duality::{
    dual_invert, dual_transform, project_to_dual, project_to_sutherland, su_dual_invert,
    su_dual_transform, zx_invert, zx_map,
};
use dualpair_core::phase::{Coupling, CoveringPoint1, CoveringPoint2, RelPoint};
use dualpair_core::reduction::{completed_slice, dual_slice_interior, sutherland_slice};

use crate::doc::{CliError, Model, ModelPoint, Result};

type EdgeFn = fn(&ModelPoint, &Coupling) -> Result<ModelPoint>;

struct Edge {
    from: Model,
    to: Model,
    apply: EdgeFn,
}

macro_rules! expect_variant {
    ($point:expr, $variant:ident) => {
        match $point {
            ModelPoint::$variant(p) => p,
            _ => unreachable!("edge applied to wrong model"),
        }
    };
}

fn rel_to_ii(rel: &RelPoint, c: &Coupling) -> Result<RelPoint> {
    match rel {
        RelPoint::I(p) => Ok(RelPoint::II(su_dual_transform(p, c)?)),
        RelPoint::II(_) => unreachable!("edge applied to wrong sector"),
    }
}

fn rel_to_i(rel: &RelPoint, c: &Coupling) -> Result<RelPoint> {
    match rel {
        RelPoint::II(p) => Ok(RelPoint::I(su_dual_invert(p, c)?)),
        RelPoint::I(_) => unreachable!("edge applied to wrong sector"),
    }
}

const EDGES: &[Edge] = &[
    // Center-of-mass duality on the relative factor; the center leg rides
    // along unchanged.
    Edge {
        from: Model::P2I,
        to: Model::P2II,
        apply: |pt, c| {
            let p = expect_variant!(pt, Covering2);
            Ok(ModelPoint::Covering2(CoveringPoint2 {
                u0: p.u0,
                w0: p.w0,
                rel: rel_to_ii(&p.rel, c)?,
            }))
        },
    },
    Edge {
        from: Model::P2II,
        to: Model::P2I,
        apply: |pt, c| {
            let p = expect_variant!(pt, Covering2);
            Ok(ModelPoint::Covering2(CoveringPoint2 {
                u0: p.u0,
                w0: p.w0,
                rel: rel_to_i(&p.rel, c)?,
            }))
        },
    },
    Edge {
        from: Model::P1I,
        to: Model::P1II,
        apply: |pt, c| {
            let p = expect_variant!(pt, Covering1);
            Ok(ModelPoint::Covering1(CoveringPoint1::new(
                p.zeta0,
                p.v0,
                rel_to_ii(&p.rel, c)?,
            )?))
        },
    },
    Edge {
        from: Model::P1II,
        to: Model::P1I,
        apply: |pt, c| {
            let p = expect_variant!(pt, Covering1);
            Ok(ModelPoint::Covering1(CoveringPoint1::new(
                p.zeta0,
                p.v0,
                rel_to_i(&p.rel, c)?,
            )?))
        },
    },
    Edge {
        from: Model::CmI,
        to: Model::CmII,
        apply: |pt, c| {
            Ok(ModelPoint::CmII(su_dual_transform(
                expect_variant!(pt, CmI),
                c,
            )?))
        },
    },
    Edge {
        from: Model::CmII,
        to: Model::CmI,
        apply: |pt, c| {
            Ok(ModelPoint::CmI(su_dual_invert(
                expect_variant!(pt, CmII),
                c,
            )?))
        },
    },
    // Downward covering maps.
    Edge {
        from: Model::P2I,
        to: Model::P1I,
        apply: |pt, _c| Ok(ModelPoint::Covering1(psi2(expect_variant!(pt, Covering2))?)),
    },
    Edge {
        from: Model::P2II,
        to: Model::P1II,
        apply: |pt, _c| Ok(ModelPoint::Covering1(psi2(expect_variant!(pt, Covering2))?)),
    },
    Edge {
        from: Model::P1I,
        to: Model::P,
        apply: |pt, c| {
            Ok(ModelPoint::Sutherland(psi1_i(
                expect_variant!(pt, Covering1),
                c,
            )?))
        },
    },
    Edge {
        from: Model::P1II,
        to: Model::PhatC,
        apply: |pt, c| {
            Ok(ModelPoint::DualCompleted(psi1_ii(
                expect_variant!(pt, Covering1),
                c,
            )?))
        },
    },
    // The duality symplectomorphism and its inverse.
    Edge {
        from: Model::P,
        to: Model::PhatC,
        apply: |pt, c| {
            Ok(ModelPoint::DualCompleted(dual_transform(
                expect_variant!(pt, Sutherland),
                c,
            )?))
        },
    },
    Edge {
        from: Model::PhatC,
        to: Model::P,
        apply: |pt, c| {
            Ok(ModelPoint::Sutherland(dual_invert(
                expect_variant!(pt, DualCompleted),
                c,
            )?))
        },
    },
    // Chart maps between the interior action-angle chart and the completed
    // chart.
    Edge {
        from: Model::Phat,
        to: Model::PhatC,
        apply: |pt, c| {
            Ok(ModelPoint::DualCompleted(zx_map(
                expect_variant!(pt, DualInterior),
                c,
            )?))
        },
    },
    Edge {
        from: Model::PhatC,
        to: Model::Phat,
        apply: |pt, c| {
            Ok(ModelPoint::DualInterior(zx_invert(
                expect_variant!(pt, DualCompleted),
                c,
            )?))
        },
    },
    // Slice embeddings into the moment level set.
    Edge {
        from: Model::P,
        to: Model::Level,
        apply: |pt, c| {
            Ok(ModelPoint::Level(sutherland_slice(
                expect_variant!(pt, Sutherland),
                c,
            )?))
        },
    },
    Edge {
        from: Model::Phat,
        to: Model::Level,
        apply: |pt, c| {
            Ok(ModelPoint::Level(dual_slice_interior(
                expect_variant!(pt, DualInterior),
                c,
            )?))
        },
    },
    Edge {
        from: Model::PhatC,
        to: Model::Level,
        apply: |pt, c| {
            Ok(ModelPoint::Level(completed_slice(
                expect_variant!(pt, DualCompleted),
                c,
            )?))
        },
    },
    // Projections out of the level set (gauge fixing onto a slice).
    Edge {
        from: Model::Level,
        to: Model::P,
        apply: |pt, c| {
            Ok(ModelPoint::Sutherland(project_to_sutherland(
                expect_variant!(pt, Level),
                c,
            )?))
        },
    },
    Edge {
        from: Model::Level,
        to: Model::PhatC,
        apply: |pt, c| {
            Ok(ModelPoint::DualCompleted(project_to_dual(
                expect_variant!(pt, Level),
                c,
            )?))
        },
    },
];

/// Finds the breadth-first path from `from` to `to` over the registered
/// edges, as a list of edge indices.  Returns `None` when no composition of
/// registered maps connects the two models.
fn find_path(from: Model, to: Model) -> Option<Vec<usize>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut parent: Vec<Option<(Model, usize)>> = Vec::new();
    let mut seen = vec![from];
    let mut frontier = vec![from];
    parent.push(None);
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &node in &frontier {
            for (idx, edge) in EDGES.iter().enumerate() {
                if edge.from != node || seen.contains(&edge.to) {
                    continue;
                }
                seen.push(edge.to);
                parent.push(Some((node, idx)));
                if edge.to == to {
                    // Walk back through the parent records.
                    let mut path = vec![idx];
                    let mut cursor = node;
                    while cursor != from {
                        let pos = seen.iter().position(|&m| m == cursor).unwrap();
                        let (prev, via) = parent[pos].unwrap();
                        path.push(via);
                        cursor = prev;
                    }
                    path.reverse();
                    return Some(path);
                }
                next.push(edge.to);
            }
        }
        frontier = next;
    }
    None
}

/// Applies the unique registered composition taking `point` to the `target`
/// model.  The identity request (`target` equals the current model) returns
/// the point unchanged, which the caller may use for canonicalization.
pub fn transform(point: &ModelPoint, target: Model, c: &Coupling) -> Result<ModelPoint> {
    let source = point.model();
    let path = find_path(source, target).ok_or_else(|| {
        CliError::Usage(format!(
            "no registered map path from {source} to {target} \
             (covering lifts are multivalued and not provided)"
        ))
    })?;
    let mut current = point.clone();
    for idx in path {
        current = (EDGES[idx].apply)(&current, c)?;
    }
    Ok(current)
}
