//! Builds an annotated graph in code, saves it as JSON and asks which
//! estimator form it supports.
use proxicause::graph::{check_assumption_new, decompose_proxies, tsr_case, CausalDag, Node};

fn main() -> proxicause::Result<()> {
    let dag = CausalDag::new(
        vec![
            Node::observed("dose"),
            Node::observed("recovery"),
            Node::observed("age"),
            Node::observed("side_effects"),
            Node::selection("enrolled"),
        ],
        &[
            ("age", "dose"),
            ("age", "recovery"),
            ("dose", "side_effects"),
            ("side_effects", "recovery"),
            ("dose", "recovery"),
            ("side_effects", "enrolled"),
            ("dose", "enrolled"),
        ],
    )?
    .with_roles(&["dose"], "recovery", &["age", "side_effects"])?
    .with_scopes(&["dose", "recovery", "age", "side_effects"], &["dose", "age", "side_effects"])?;

    let (plus, minus) = decompose_proxies(&dag)?;
    println!("Z+ = {:?}, Z- = {:?}", dag.names(&plus), dag.names(&minus));
    println!("{}", check_assumption_new(&dag)?);
    println!("case: {}", tsr_case(&dag, true)?);
    println!("{}", dag.to_json());
    Ok(())
}
