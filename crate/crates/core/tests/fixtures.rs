mod common;

use common::*;
use morphmine::aggregation::{aggregate, Enumerate, Mni};
use morphmine::graph::load_graph;
use morphmine::matcher::{collect_matches, count};
use morphmine::morph::execute_plan;
use morphmine::pattern::text::parse_pattern;
use morphmine::{choose_plan, Count, DataGraph, Mode, Pattern};

fn square() -> DataGraph {
    DataGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap()
}

#[test]
fn example_graph_degrees() {
    let g = letter_graph();
    let degrees: Vec<usize> = (0..7).map(|v| g.degree(v)).collect();
    assert_eq!(degrees, [4, 2, 4, 4, 3, 5, 2]);
}

#[test]
fn chordal_square_in_example_graph() {
    let g = letter_graph();
    let p = diamond().vertex_variant();
    let found: Vec<Vec<u32>> = collect_matches(&p, &g)
        .into_iter()
        .map(|mut m| {
            m.sort_unstable();
            m
        })
        .collect();
    // d, c, g, f: the chord c-f closes two triangles, d-g is absent
    assert!(found.contains(&vec![2, 3, 5, 6]), "{found:?}");
    assert_eq!(found.len() as u64, brute_count(&p, &g));
}

#[test]
fn wedges_in_a_square() {
    let g = square();
    assert_eq!(count(&Pattern::path(3), &g), 4);
    assert_eq!(count(&Pattern::path(3).vertex_variant(), &g), 4);
    assert_eq!(count(&Pattern::cycle(4), &g), 1);
    assert_eq!(count(&Pattern::clique(3), &g), 0);
}

#[test]
fn clique_contains_three_squares_but_no_induced_one() {
    assert_eq!(count(&Pattern::cycle(4), &k4()), 3);
    assert_eq!(count(&Pattern::cycle(4).vertex_variant(), &k4()), 0);
    let list = aggregate(&Enumerate, &Pattern::cycle(4), &k4()).0;
    assert_eq!(list.len(), 3);
}

#[test]
fn motif_plans_agree_on_example_graph() {
    let g = letter_graph();
    let motifs: Vec<Pattern> = morphmine::pattern::connected_patterns(4).iter().map(Pattern::vertex_variant).collect();
    let direct: Vec<u64> = motifs.iter().map(|p| brute_count(p, &g)).collect();
    for mode in [Mode::Off, Mode::Naive] {
        let plan = choose_plan(&motifs, &Count, &morphmine::cost::SampledCostModel::new(&g, Default::default(), 0), mode)
            .unwrap()
            .chosen
            .plan;
        assert_eq!(execute_plan(&plan, &Count, &g).unwrap().values, direct, "{mode}");
    }
}

#[test]
fn labeled_triangle_support() {
    let text = "v 3\ne 1 2\ne 2 3\ne 3 1\nl 1 0\nl 2 0\nl 3 0\n";
    let edges = "0 1\n1 2\n2 0\n2 3\n";
    let labels = "0 0\n1 0\n2 0\n3 0\n";
    let (g, _) = load_graph(edges.as_bytes(), Some(labels.as_bytes())).unwrap();
    let p = parse_pattern(text).unwrap();
    let table = aggregate(&Mni, &p, &g).0;
    assert_eq!(table.support(), 3);
    assert_eq!(table.support(), brute_mni(&p, &g));
}
