//! Inspect the candidate library and evaluate a few terms by hand.

use sparse_hysteresis::prelude::*;
use sparse_hysteresis::term::Sample;

fn main() -> Result<()> {
    for spec in [LibrarySpec::duhem_bouc_wen_poly(), LibrarySpec::butterfly_aux()] {
        let terms = enumerate_terms(&spec)?;
        println!("{} ({} terms)", spec.preset_name, terms.len());
        let names: Vec<String> = terms.iter().map(|t| t.name()).collect();
        println!("  {}", names.join(", "));
    }

    let s = Sample { u: 2.0, du: -1.0, w: -3.0, y: 0.5 };
    for name in ["|u'|*u", "u'*|w|", "|u'|*w*|w|", "u'*u^2*y"] {
        let term: TermDescriptor = name.parse()?;
        println!("{name:>12} at (u, u', w, y) = (2, -1, -3, 0.5): {}", term.evaluate(&s));
    }
    Ok(())
}
