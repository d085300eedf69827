use proxicause::graph::*;
use proxicause::Error;

fn set(g: &CausalDag, names: &[&str]) -> NodeSet {
    g.set(names).unwrap()
}

fn all_fixtures() -> Vec<(&'static str, CausalDag)> {
    FIXTURES.iter().map(|(n, _)| (*n, fixture(n).unwrap())).collect()
}

#[test]
fn descendants_on_printed_graphs() {
    let a = fixture("fig2a").unwrap();
    assert_eq!(descendants(&a, &set(&a, &["X"])).unwrap(), set(&a, &["Y", "S"]));
    assert!(descendants(&a, &NodeSet::new()).unwrap().is_empty());
    let d = fixture("fig2d").unwrap();
    assert_eq!(
        descendants(&d, &set(&d, &["X"])).unwrap(),
        set(&d, &["Y", "S", "Zminus"])
    );
}

#[test]
fn mutilation_on_fig2c() {
    let c = fixture("fig2c").unwrap();
    let x = set(&c, &["X"]);
    let (xi, yi, si, zi) = (c.id("X").unwrap(), c.id("Y").unwrap(), c.id("S").unwrap(), c.id("Zplus").unwrap());
    let under = mutilate(&c, &NodeSet::new(), &x).unwrap();
    assert!(!under.has_edge(xi, yi) && !under.has_edge(xi, si));
    assert!(under.has_edge(zi, xi));
    assert_eq!(under.edge_count(), c.edge_count() - 2);
    let over = mutilate(&c, &x, &NodeSet::new()).unwrap();
    assert!(!over.has_edge(zi, xi));
    assert_eq!(over.edge_count(), c.edge_count() - 1);
    assert_eq!(mutilate(&c, &NodeSet::new(), &NodeSet::new()).unwrap(), c);
}

#[test]
fn d_separation_examples() {
    let a = fixture("fig2a").unwrap();
    assert!(d_separated(&a, &set(&a, &["S"]), &set(&a, &["Y"]), &set(&a, &["X", "Zplus"])).unwrap());
    let d = fixture("fig2d").unwrap();
    let (zm, y, cond) = (set(&d, &["Zminus"]), set(&d, &["Y"]), set(&d, &["X", "Zplus"]));
    assert!(!d_separated(&d, &zm, &y, &cond).unwrap());
    let p = open_path(&d, &zm, &y, &cond).unwrap().unwrap();
    let shown = d.render_path(&p);
    assert!(shown == "Zminus -> Y" || shown == "Zminus <- U -> Y", "{shown}");
}

#[test]
fn proxy_decomposition() {
    let d = fixture("fig2d").unwrap();
    let (p, m) = decompose_proxies(&d).unwrap();
    assert_eq!(p, set(&d, &["Zplus"]));
    assert_eq!(m, set(&d, &["Zminus"]));
    let b = fixture("fig2b").unwrap();
    let (p, m) = decompose_proxies(&b).unwrap();
    assert!(p.is_empty());
    assert_eq!(m, set(&b, &["Zminus"]));
    let none = b.reassign_roles(&["X"], "Y", &[]).unwrap();
    let (p, m) = decompose_proxies(&none).unwrap();
    assert!(p.is_empty() && m.is_empty());
}

#[test]
fn pmar_on_loan_graph() {
    let g = fixture("fig1").unwrap();
    assert!(check_pmar(&g).unwrap().holds);
    assert!(check_pmar(&fixture("fig2a").unwrap()).unwrap().holds);
}

#[test]
fn assumption_holds_on_every_figure() {
    for (name, g) in all_fixtures() {
        let rep = check_assumption_new(&g).unwrap();
        assert!(rep.holds, "{name}: {rep}");
    }
}

#[test]
fn assumption_scope_and_backdoor_failures() {
    let d = fixture("fig2d").unwrap();
    let no_x_in_t = d
        .clone()
        .with_scopes(&["X", "Y", "Zplus", "Zminus"], &["Zplus", "Zminus"])
        .unwrap();
    let rep = check_assumption_new(&no_x_in_t).unwrap();
    assert_eq!(rep.failed_conditions(), vec![3]);
    assert!(matches!(
        &rep.failures[0].witness,
        Witness::MissingScope { node, scope: 'T' } if node == "X"
    ));

    let c = fixture("fig2c").unwrap().reassign_roles(&["X"], "Y", &[]).unwrap();
    let rep = check_assumption_new(&c).unwrap();
    assert!(rep.failed_conditions().contains(&2));
    let back = rep.failures.iter().find(|f| f.condition == 2).unwrap();
    assert_eq!(back.witness, Witness::Path("Y <- Zplus -> X".into()));
}

#[test]
fn selection_backdoor_classification() {
    for (name, fails) in [
        ("fig2a", false),
        ("fig2b", true),
        ("fig2c", false),
        ("fig2d", true),
        ("fig4a", false),
        ("fig4b", false),
        ("fig4c", true),
        ("fig1", true),
    ] {
        let rep = check_selection_backdoor(&fixture(name).unwrap()).unwrap();
        assert_eq!(!rep.holds, fails, "{name}: {rep}");
        if fails {
            assert_eq!(rep.failed_conditions(), vec![3], "{name}");
        }
    }
}

#[test]
fn gact3_classification() {
    for (name, holds) in [
        ("fig2a", true),
        ("fig2b", true),
        ("fig2c", true),
        ("fig2d", false),
        ("fig4a", true),
        ("fig4b", true),
        ("fig4c", true),
    ] {
        let g = fixture(name).unwrap();
        let zt = g.roles().unwrap().z.clone();
        let rep = check_gact3(&g, &zt).unwrap();
        assert_eq!(rep.holds, holds, "{name}: {rep}");
    }
    let d = fixture("fig2d").unwrap();
    let rep = check_gact3(&d, &set(&d, &["Zplus"])).unwrap();
    assert!(rep.failed_conditions().contains(&2), "{rep}");
    let a = fixture("fig2a").unwrap();
    assert!(check_gact3(&a, &set(&a, &["Zplus"])).unwrap().holds);
    assert!(check_gact3(&a, &set(&a, &["Y"])).is_err());
}

#[test]
fn do_calculus_rules() {
    let c = fixture("fig2c").unwrap();
    let (x, y, zp) = (set(&c, &["X"]), set(&c, &["Y"]), set(&c, &["Zplus"]));
    let none = NodeSet::new();
    // exchanging do(X) for X given Z+
    assert!(check_do_calculus_rule(&c, DoRule::Two, &none, &y, &x, &zp).unwrap());
    assert!(!check_do_calculus_rule(&c, DoRule::Two, &none, &y, &x, &none).unwrap());
    // Z+ is d-connected to Y given X in the graph without edges into X
    assert!(!check_do_calculus_rule(&c, DoRule::One, &x, &y, &zp, &none).unwrap());

    let g = CausalDag::new(
        vec![Node::observed("X"), Node::observed("Y"), Node::observed("Z")],
        &[("X", "Y")],
    )
    .unwrap();
    let (gx, gy, gz) = (set(&g, &["X"]), set(&g, &["Y"]), set(&g, &["Z"]));
    assert!(check_do_calculus_rule(&g, DoRule::Three, &gx, &gy, &gz, &NodeSet::new()).unwrap());
    assert!(matches!(
        check_do_calculus_rule(&g, DoRule::One, &gx, &gx, &gz, &NodeSet::new()),
        Err(Error::OverlappingSets(_))
    ));
}

#[test]
fn rule_three_uses_ancestors_of_w() {
    // Z -> W -> Y, Z -> Y. do(Z) matters; with W observed, Z is an ancestor
    // of W so its incoming edges stay, but the direct edge keeps it relevant.
    let g = CausalDag::new(
        vec![Node::observed("Z"), Node::observed("W"), Node::observed("Y")],
        &[("Z", "W"), ("W", "Y")],
    )
    .unwrap();
    let none = NodeSet::new();
    let (z, w, y) = (set(&g, &["Z"]), set(&g, &["W"]), set(&g, &["Y"]));
    // given W, the chain is blocked: the action on Z can be dropped
    assert!(check_do_calculus_rule(&g, DoRule::Three, &none, &y, &z, &w).unwrap());
    // without W, do(Z) changes Y
    assert!(!check_do_calculus_rule(&g, DoRule::Three, &none, &y, &z, &none).unwrap());
}

#[test]
fn tsr_cases_for_figures() {
    for (name, case) in [
        ("fig2a", TsrCase::ZplusOnly),
        ("fig2b", TsrCase::ZminusOnlyUnconfounded),
        ("fig2c", TsrCase::ZplusOnly),
        ("fig2d", TsrCase::FullLinearShortcut),
        ("fig4a", TsrCase::ZplusOnly),
        ("fig4b", TsrCase::ZplusOnly),
        ("fig4c", TsrCase::ZminusOnlyUnconfounded),
        ("fig1", TsrCase::FullLinearShortcut),
    ] {
        assert_eq!(tsr_case(&fixture(name).unwrap(), true).unwrap(), case, "{name}");
    }
    assert_eq!(
        tsr_case(&fixture("fig2d").unwrap(), false).unwrap(),
        TsrCase::FullIntegral
    );
    let none = CausalDag::new(
        vec![Node::observed("X"), Node::observed("Y"), Node::selection("S")],
        &[("X", "Y"), ("X", "S")],
    )
    .unwrap()
    .with_roles(&["X"], "Y", &[])
    .unwrap()
    .with_scopes(&["X", "Y"], &[])
    .unwrap();
    assert_eq!(tsr_case(&none, true).unwrap(), TsrCase::NoProxies);
    let broken = fixture("fig2c").unwrap().reassign_roles(&["X"], "Y", &[]).unwrap();
    assert!(matches!(tsr_case(&broken, true), Err(Error::AssumptionViolated(_))));
}

#[test]
fn fixtures_round_trip_through_json() {
    for (name, g) in all_fixtures() {
        assert_eq!(CausalDag::from_json(&g.to_json()).unwrap(), g, "{name}");
    }
}
