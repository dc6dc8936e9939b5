mod common;

use common::checks;

#[test]
fn algebraic_identities_hold() {
    let check = checks::identities(50);
    assert!(check.pass, "{}", check.detail);
}
