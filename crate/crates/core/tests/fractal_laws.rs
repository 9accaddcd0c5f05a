//! Structural laws of the self-generation trees: closed-form counts checked
//! by independent enumeration, self-similarity of subtrees at matching
//! remaining depth, and well-formedness of the DOT export under a minimal
//! graph-description grammar.

use std::collections::BTreeMap;

use trihelix_core::fractal::{grow, seed_tree, tree_stats, HelixMode, VertexTree};

/// Independent recount: walks the raw node and edge lists rather than
/// trusting `tree_stats`.
fn enumerate_counts(tree: &VertexTree) -> (usize, usize) {
    let nodes = tree.nodes.iter().count();
    let open = tree.edges.iter().filter(|e| e.to.is_none()).count();
    (nodes, open)
}

#[test]
fn count_laws_hold_up_to_depth_twelve() {
    for d in 0..=12u32 {
        let tree = grow(&seed_tree(HelixMode::Th), d).tree;
        tree.validate().unwrap();
        let (nodes, open) = enumerate_counts(&tree);
        let expect_open = 3 * 2usize.pow(d);
        let expect_nodes = 3 * 2usize.pow(d) - 2;
        assert_eq!(open, expect_open, "open edges at depth {d}");
        assert_eq!(nodes, expect_nodes, "nodes at depth {d}");

        let stats = tree_stats(&tree);
        assert_eq!(stats.open_edges, expect_open);
        assert_eq!(stats.nodes, expect_nodes);
        assert_eq!(tree.depth, d);
    }
}

#[test]
fn dh_trees_stay_inert_at_every_requested_depth() {
    let seed = seed_tree(HelixMode::Dh);
    for d in 0..=12u32 {
        let outcome = grow(&seed, d);
        assert!(outcome.no_growth);
        assert_eq!(enumerate_counts(&outcome.tree), (1, 3));
    }
}

/// Canonical encoding of the subtree hanging below a node: vertex kind plus
/// the sorted encodings of its children, with open slots as leaves. Two
/// subtrees are isomorphic as typed trees iff their encodings match.
fn canonical(tree: &VertexTree, node: u32) -> String {
    let mut children: Vec<String> = Vec::new();
    for e in &tree.edges {
        if e.from == node {
            match e.to {
                Some(c) => children.push(canonical(tree, c)),
                None => children.push("open".to_owned()),
            }
        }
    }
    children.sort();
    format!("({:?} {})", tree.nodes[node as usize].kind, children.join(" "))
}

#[test]
fn subtrees_at_equal_remaining_depth_are_isomorphic() {
    // Growth is self-similar: what hangs below a vertex depends only on the
    // generations grown after it appeared, so depth-k subtrees of a d-deep
    // tree match depth-(k+1) subtrees of a (d+1)-deep tree, and all
    // same-depth siblings match each other.
    for d in 1..=6u32 {
        let tree = grow(&seed_tree(HelixMode::Th), d).tree;
        let bigger = grow(&seed_tree(HelixMode::Th), d + 1).tree;

        let mut by_depth: BTreeMap<u32, Vec<String>> = BTreeMap::new();
        for n in &tree.nodes {
            by_depth.entry(n.depth).or_default().push(canonical(&tree, n.id));
        }
        for (depth, encodings) in &by_depth {
            for enc in encodings {
                assert_eq!(
                    enc, &encodings[0],
                    "siblings at depth {depth} are not isomorphic"
                );
            }
        }

        // Cross-scale: a depth-1 subtree of the d-generation tree matches a
        // depth-2 subtree of the (d+1)-generation tree.
        let sample_small = tree.nodes.iter().find(|n| n.depth == 1).unwrap();
        let sample_large = bigger.nodes.iter().find(|n| n.depth == 2).unwrap();
        assert_eq!(
            canonical(&tree, sample_small.id),
            canonical(&bigger, sample_large.id),
            "self-similarity across scales broken at d = {d}"
        );
    }
}

/// Minimal validating scanner for the emitted DOT subset:
/// `graph NAME { stmt* }` with node statements `id [attrs];` and edge
/// statements `id -- id [attrs];`, where attrs are comma-separated
/// `key=value` pairs with optionally quoted values.
fn assert_parses_as_dot(text: &str) {
    let text = text.trim();
    let rest = text
        .strip_prefix("graph")
        .expect("must start with 'graph'")
        .trim_start();
    let brace = rest.find('{').expect("missing opening brace");
    let name = rest[..brace].trim();
    assert!(
        !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_'),
        "bad graph name {name:?}"
    );
    let body = rest[brace + 1..].trim_end();
    let body = body.strip_suffix('}').expect("missing closing brace");

    let ident_ok = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_');
    let attrs_ok = |s: &str| {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or_else(|| panic!("attributes not bracketed: {s:?}"));
        inner.split(',').all(|pair| {
            let mut kv = pair.splitn(2, '=');
            let key = kv.next().unwrap_or("").trim();
            let value = kv.next().unwrap_or("").trim();
            ident_ok(key)
                && (!value.is_empty())
                && (value.starts_with('"') == value.ends_with('"'))
        })
    };

    for line in body.lines() {
        let stmt = line.trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix(';')
            .unwrap_or_else(|| panic!("statement missing semicolon: {stmt:?}"));
        if let Some((endpoints, _)) = stmt.split_once('[').map(|(a, _)| {
            let attr_start = stmt.find('[').unwrap();
            (a.trim(), &stmt[attr_start..])
        }) {
            let attr_start = stmt.find('[').unwrap();
            assert!(attrs_ok(&stmt[attr_start..]), "bad attrs in {stmt:?}");
            if let Some((a, b)) = endpoints.split_once("--") {
                assert!(ident_ok(a.trim()) && ident_ok(b.trim()), "bad edge {stmt:?}");
            } else {
                assert!(ident_ok(endpoints), "bad node id {stmt:?}");
            }
        } else {
            panic!("statement without attributes: {stmt:?}");
        }
    }
}

#[test]
fn dot_export_is_well_formed() {
    for tree in [
        seed_tree(HelixMode::Th),
        seed_tree(HelixMode::Dh),
        grow(&seed_tree(HelixMode::Th), 2).tree,
        grow(&seed_tree(HelixMode::Th), 5).tree,
    ] {
        assert_parses_as_dot(&tree.to_dot());
    }
}

#[test]
fn json_round_trip_at_depth_five() {
    let tree = grow(&seed_tree(HelixMode::Th), 5).tree;
    let restored = VertexTree::from_json(&tree.to_json()).unwrap();
    assert_eq!(restored, tree);
    assert_eq!(restored.to_dot(), tree.to_dot());
}
