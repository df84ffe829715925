//! Builds certificate records by hand, writes them as deterministic JSON
//! and reads them back.

use bindcert::onebody::{binding_certificate, ground_state, SolveOptions};
use bindcert::operators::{GridSpec, KineticProfile, PotentialSpec};
use bindcert::report::{digest_of, emit_json, parse_json, CertificateRecord, RecordKind};

fn main() -> bindcert::Result<()> {
    let grid = GridSpec::new(2, 12.0, 32)?;
    let potential = PotentialSpec::GaussianWell { depth: 1.0, width: 1.0 };
    let r = ground_state(&KineticProfile::semi_relativistic(1.0)?, &potential, &grid, &SolveOptions::default())?;
    let digest = digest_of(&(grid, &potential))?;
    let cert = binding_certificate(r.result.eigenvalue, 1e-3).with_grids([grid]);
    let records = vec![
        CertificateRecord::binding(&digest, &cert, Some(&r.result)),
        CertificateRecord::new(RecordKind::Hypothesis, "note", &digest).value("answer", 42.0).flag("demo", true),
    ];
    let text = emit_json(&records)?;
    println!("{text}");
    assert_eq!(emit_json(&parse_json(&text)?)?, text);
    eprintln!("round trip is byte-identical");
    Ok(())
}
