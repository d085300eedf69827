//! d-separation queries, open-path witnesses, mutilated graphs and the
//! do-calculus rules on a small confounded graph.
use proxicause::graph::{
    check_do_calculus_rule, d_separated, mutilate, open_path, CausalDag, DoRule, Node, NodeSet,
};

fn main() -> proxicause::Result<()> {
    // U -> X -> M -> Y, U -> Y, U latent
    let dag = CausalDag::new(
        ["X", "M", "Y"].into_iter().map(Node::observed).chain([Node::latent("U")]).collect(),
        &[("U", "X"), ("U", "Y"), ("X", "M"), ("M", "Y")],
    )?;
    let (x, m, y) = (dag.set(&["X"])?, dag.set(&["M"])?, dag.set(&["Y"])?);
    let none = NodeSet::new();

    println!("X _||_ Y          : {}", d_separated(&dag, &x, &y, &none)?);
    if let Some(p) = open_path(&dag, &x, &y, &m)? {
        println!("open path given M : {}", dag.render_path(&p));
    }

    // removing edges out of X leaves only the backdoor through U
    let under_x = mutilate(&dag, &none, &x)?;
    println!("edges without X's outgoing: {}", under_x.edge_count());
    println!("X _||_ Y in G_(under X): {}", d_separated(&under_x, &x, &y, &none)?);

    // front-door style steps
    println!("rule 2, P(m|do(x)) = P(m|x): {}", check_do_calculus_rule(&dag, DoRule::Two, &m, &x, &none, &none)?);
    println!("rule 3, P(y|do(m),do(x)) = P(y|do(m)): {}", check_do_calculus_rule(&dag, DoRule::Three, &y, &x, &m, &none)?);
    Ok(())
}
