use bindcert::report::*;
use proptest::prelude::*;

fn record() -> impl Strategy<Value = CertificateRecord> {
    (
        prop::collection::btree_map("[a-z_]{1,8}", prop::num::f64::NORMAL | prop::num::f64::ZERO, 0..6),
        prop::collection::btree_map("[a-z]{1,6}", any::<bool>(), 0..4),
        prop::collection::vec(".{0,20}", 0..3),
        any::<bool>(),
    )
        .prop_map(|(values, flags, notes, pass)| {
            let mut r = CertificateRecord::new(RecordKind::Theorem, "x", "digest");
            r.values = values;
            r.flags = flags;
            r.notes = notes;
            r.pass = pass;
            r
        })
}

proptest! {
    #[test]
    fn json_roundtrip_is_byte_identical(records in prop::collection::vec(record(), 0..4)) {
        let text = emit_json(&records).unwrap();
        let back = parse_json(&text).unwrap();
        prop_assert_eq!(&back, &records);
        prop_assert_eq!(emit_json(&back).unwrap(), text);
    }
}

#[test]
fn unknown_schema_is_rejected() {
    assert!(parse_json(r#"{"schema":"2","records":[]}"#).is_err());
    assert!(parse_json(r#"{"schema":"1","records":[],"extra":1}"#).is_err());
}
