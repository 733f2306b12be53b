//! Small named structures used throughout the tests, benches and docs.
//!
//! Visible variables are binary unless stated otherwise.

use crate::structure::CausalStructure;

fn build(visible: &[(&str, u32)], latent: &[&str], edges: &[(&str, &str)]) -> CausalStructure {
    let mut b = CausalStructure::builder();
    for &(name, card) in visible {
        b = b.visible(name, card);
    }
    for name in latent {
        b = b.latent(name);
    }
    b.edges(edges).build().expect("scenario structure is valid")
}

const BINARY_ABC: [(&str, u32); 3] = [("a", 2), ("b", 2), ("c", 2)];

/// Two latents with overlapping children `{a, b}` and `{b, c}`.
pub fn w_structure() -> CausalStructure {
    build(
        &BINARY_ABC,
        &["mu", "nu"],
        &[("mu", "a"), ("mu", "b"), ("nu", "b"), ("nu", "c")],
    )
}

/// `a -> b -> c` with a latent `nu` confounding `b` and `c`.
pub fn instrumental() -> CausalStructure {
    build(
        &BINARY_ABC,
        &["mu", "nu"],
        &[("mu", "a"), ("a", "b"), ("nu", "b"), ("b", "c"), ("nu", "c")],
    )
}

/// Settings `x`, `y`, outcomes `a`, `b`, shared source `rho`.
pub fn bell() -> CausalStructure {
    build(
        &[("x", 2), ("a", 2), ("b", 2), ("y", 2)],
        &["mu", "rho", "nu"],
        &[
            ("mu", "x"),
            ("x", "a"),
            ("rho", "a"),
            ("rho", "b"),
            ("y", "b"),
            ("nu", "y"),
        ],
    )
}

/// Three pairwise latent sources, no visible edges.
pub fn triangle() -> CausalStructure {
    build(
        &BINARY_ABC,
        &["mu", "nu", "rho"],
        &[
            ("mu", "a"),
            ("mu", "b"),
            ("nu", "a"),
            ("nu", "c"),
            ("rho", "b"),
            ("rho", "c"),
        ],
    )
}

/// Four-variable chain `a -> b -> c -> d` with three confounders.
pub fn evans() -> CausalStructure {
    build(
        &[("a", 2), ("b", 2), ("c", 2), ("d", 2)],
        &["mu", "nu", "rho"],
        &[
            ("mu", "a"),
            ("rho", "a"),
            ("a", "b"),
            ("nu", "b"),
            ("b", "c"),
            ("mu", "c"),
            ("c", "d"),
            ("nu", "d"),
            ("rho", "d"),
        ],
    )
}

/// `v2` has visible parents `v1`, `v4` and latent parents `l1`, `l2`.
pub fn mixed_parents() -> CausalStructure {
    build(
        &[("v1", 2), ("v2", 2), ("v3", 2), ("v4", 2), ("v5", 2)],
        &["l1", "l2", "l3"],
        &[
            ("l1", "v1"),
            ("v1", "v2"),
            ("v4", "v2"),
            ("l1", "v2"),
            ("l2", "v2"),
            ("l2", "v3"),
            ("v2", "v3"),
            ("l3", "v4"),
            ("l3", "v5"),
        ],
    )
}

/// Latent `l` with visible parents `v1..v3` and children `v4`, `v5`.
pub fn latent_with_visible_parents() -> CausalStructure {
    build(
        &[("v1", 2), ("v2", 2), ("v3", 2), ("v4", 2), ("v5", 2)],
        &["l"],
        &[("v1", "l"), ("v2", "l"), ("v3", "l"), ("l", "v4"), ("l", "v5")],
    )
}

/// Latent `l2` whose only parent is the latent `l1`.
pub fn latent_with_latent_parent() -> CausalStructure {
    build(
        &[("v1", 2), ("v2", 2), ("v3", 2)],
        &["l1", "l2"],
        &[("l1", "l2"), ("l1", "v1"), ("l2", "v2"), ("l2", "v3")],
    )
}

/// Latent `l` with a visible parent and no children.
pub fn childless_latent() -> CausalStructure {
    build(
        &[("v1", 2), ("v2", 2)],
        &["m", "l"],
        &[("m", "v1"), ("m", "v2"), ("v1", "l")],
    )
}

/// The children of `l2` are a strict subset of those of `l1`.
pub fn nested_latents() -> CausalStructure {
    build(
        &[("v1", 2), ("v2", 2), ("v3", 2)],
        &["l1", "l2"],
        &[
            ("l1", "v1"),
            ("l1", "v2"),
            ("l1", "v3"),
            ("l2", "v2"),
            ("l2", "v3"),
        ],
    )
}

/// `mu` drives `a` and `b`, which collide with private noise `nu` at a
/// four-valued `c`.
pub fn shared_cause_collider() -> CausalStructure {
    build(
        &[("a", 2), ("b", 2), ("c", 4)],
        &["mu", "nu"],
        &[("mu", "a"), ("mu", "b"), ("nu", "c"), ("a", "c"), ("b", "c")],
    )
}

/// `a -> b -> c` where `b` and `c` are four-valued, `mu` confounds `a` and `c`
/// and `nu` confounds `b` and `c`.
pub fn quaternary_chain() -> CausalStructure {
    build(
        &[("a", 2), ("b", 4), ("c", 4)],
        &["mu", "nu"],
        &[
            ("mu", "a"),
            ("a", "b"),
            ("nu", "b"),
            ("b", "c"),
            ("mu", "c"),
            ("nu", "c"),
        ],
    )
}
