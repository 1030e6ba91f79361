// temporary suite probe
use syzygium::scenario::{suite_run, Profile};

#[test]
#[ignore]
fn quick_suite() {
    let reports = suite_run(Profile::Full, Some(4));
    for r in &reports {
        println!("{}", r.render_text());
    }
    assert!(reports.iter().all(|r| r.passed()));
}
