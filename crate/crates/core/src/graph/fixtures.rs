use super::dag::CausalDag;
use crate::error::{Error, Result};

/// Bundled graphs: the loan example, the four selection settings and the
/// three confounded experiment graphs.
pub const FIXTURES: [(&str, &str); 8] = [
    ("fig1", include_str!("../../fixtures/fig1.json")),
    ("fig2a", include_str!("../../fixtures/fig2a.json")),
    ("fig2b", include_str!("../../fixtures/fig2b.json")),
    ("fig2c", include_str!("../../fixtures/fig2c.json")),
    ("fig2d", include_str!("../../fixtures/fig2d.json")),
    ("fig4a", include_str!("../../fixtures/fig4a.json")),
    ("fig4b", include_str!("../../fixtures/fig4b.json")),
    ("fig4c", include_str!("../../fixtures/fig4c.json")),
];

pub fn fixture(name: &str) -> Result<CausalDag> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled graph '{name}'")))?;
    CausalDag::from_json(text)
}
