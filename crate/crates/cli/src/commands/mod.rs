pub mod analyze;
pub mod scan;
pub mod simulate;
pub mod theory;

use clickkit::theory::qb_of;
use clickkit::ClickDistribution;

use crate::output::{Cell, Table};

/// `Q_B` when defined; degenerate means give an empty cell.
pub(crate) fn qb_cell(c: &ClickDistribution) -> Cell {
    qb_of(c).ok().into()
}

pub(crate) fn clicks_table(name: &str, rows: impl IntoIterator<Item = (String, ClickDistribution)>) -> Table {
    let mut t = Table::new(name, &["state", "k", "c_k"]);
    for (label, c) in rows {
        for (k, &p) in c.probs().iter().enumerate() {
            t.push(vec![label.clone().into(), k.into(), p.into()]);
        }
    }
    t
}
