use bayesbd_wasm::{prior_draws_svg, Demo, DemoSettings};

#[test]
fn binary_demo_fits_and_rebands() {
    let demo = Demo::run(&DemoSettings::default()).unwrap();
    assert!(demo.error().unwrap() < 0.05);
    let narrow = demo.summary(0.5).unwrap();
    let wide = demo.summary(0.99).unwrap();
    assert!(narrow.l0 < wide.l0);
    let svg = demo.svg(0.9).unwrap();
    assert_eq!(svg.matches("<path").count(), 3);
    assert_eq!(svg.matches("class=\"pixel\"").count(), 40 * 40);
}

#[test]
fn gaussian_triangle_demo_runs() {
    let s = DemoSettings {
        gaussian: true,
        triangle: true,
        inside: 3.0,
        outside: 0.0,
        m: 30,
        nrun: 200,
        nburn: 100,
        ..DemoSettings::default()
    };
    let a = Demo::run(&s).unwrap();
    let b = Demo::run(&s).unwrap();
    assert_eq!(a.svg(0.95).unwrap(), b.svg(0.95).unwrap());
    assert!(a.error().unwrap() < 0.05);
}

#[test]
fn prior_draws_plot_has_one_path_per_draw() {
    let svg = prior_draws_svg(1.0, 200.0, 10, 7, 3).unwrap();
    assert_eq!(svg.matches("class=\"draw\"").count(), 7);
    assert!(prior_draws_svg(1.0, 0.0, 10, 7, 3).is_err());
    assert!(prior_draws_svg(-1.0, 10.0, 10, 7, 3).is_err());
}

#[test]
fn bad_settings_are_errors() {
    let s = DemoSettings { m: 1, ..DemoSettings::default() };
    assert!(Demo::run(&s).is_err());
    let s = DemoSettings { inside: 1.5, ..DemoSettings::default() };
    assert!(Demo::run(&s).is_err());
}
