// temporary scale probe; replaced by the acceptance suite
use std::time::Instant;

use syzygium::bundle::{curve_from_texts, BundleSpec};
use syzygium::cech::{connecting_class, is_zero_in_h1_bundle, CechClass};
use syzygium::poly::parse_poly;

fn lemma_setup(p: u64, l: u32) -> (BundleSpec, syzygium::bundle::Section, CechClass) {
    let d = 3 * (p as u32) * l - 1;
    let pl = (p as u32) * l;
    let desc = format!("GF({p})(t)");
    let eq = format!("x^{d}+y^{d}+z^{d}+x^{pl}*z^{}", 2 * pl - 1);
    let curve = curve_from_texts(&desc, &eq, ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly(&format!("x^{}", 2 * l), &field).unwrap()),
        curve.element(&parse_poly(&format!("y^{}", 2 * l), &field).unwrap()),
        curve.element(&parse_poly(&format!("z^{} + t*x^{l}*z^{l}", 2 * l), &field).unwrap()),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3 * l as i64).unwrap();
    let fs = spec.pullback(1);
    // s1 = ((t^p - t^2p) z^pl - x^{pl-1} z, -y^{pl-1} z, (t^p - 1) x^pl - z^pl)
    let s1 = fs
        .section_from_texts(
            &[
                &format!("(t^{p}-t^{})*z^{pl} - x^{}*z", 2 * p, pl - 1),
                &format!("-y^{}*z", pl - 1),
                &format!("(t^{p}-1)*x^{pl} - z^{pl}"),
            ],
            Some(3 * pl),
        )
        .unwrap();
    // the paper-shaped class c
    let mut c = CechClass::zero(curve.clone(), 0);
    for i in 1..=pl {
        let coeff = field
            .parse_elem(&format!("(t^{p}-1)^{}*(t^{p}-t^{})^{}", i - 1, 2 * p, i - 1))
            .unwrap();
        c.add_coeff(2 * pl - i, i, coeff); // y^{2pl}/(x^{2pl-i} z^i)
    }
    for i in 1..=(pl - 1) {
        let coeff = field
            .parse_elem(&format!("(t^{p}-1)^{}*(t^{p}-t^{})^{}", i, 2 * p, i - 1))
            .unwrap();
        c.add_coeff(pl - i, pl + i, coeff); // y^{2pl}/(x^{pl-i} z^{pl+i})
    }
    (fs, s1, c)
}

#[test]
#[ignore]
fn lemma_p3_connecting_class() {
    let t0 = Instant::now();
    let (fs, s1, c_paper) = lemma_setup(3, 1);
    assert!(fs.verify_syzygy(&s1.components).unwrap());
    assert!(fs.nowhere_vanishing(&s1, None).is_yes());
    println!("setup+verify {:?}", t0.elapsed());
    let t1 = Instant::now();
    let cc = connecting_class(&fs, &s1, None).unwrap();
    println!("connecting class in {:?}", t1.elapsed());
    println!("computed: {}", cc.pretty());
    println!("paper:    {}", c_paper.pretty());
    assert!(!cc.is_zero());
    assert!(cc.projectively_equal(&c_paper), "classes differ projectively");
    let t2 = Instant::now();
    let r = is_zero_in_h1_bundle(&c_paper, &fs, &s1, None).unwrap();
    println!("coboundary test in {:?}: {}", t2.elapsed(), r.is_yes());
    assert!(r.is_yes());
    println!("total {:?}", t0.elapsed());
}

#[test]
#[ignore]
fn lemma_p5_connecting_class() {
    let t0 = Instant::now();
    let (fs, s1, c_paper) = lemma_setup(5, 1);
    assert!(fs.verify_syzygy(&s1.components).unwrap());
    assert!(fs.nowhere_vanishing(&s1, None).is_yes());
    println!("setup+verify {:?}", t0.elapsed());
    let t1 = Instant::now();
    let cc = connecting_class(&fs, &s1, None).unwrap();
    println!("connecting class in {:?}", t1.elapsed());
    assert!(!cc.is_zero());
    assert!(cc.projectively_equal(&c_paper), "classes differ projectively");
    let t2 = Instant::now();
    let r = is_zero_in_h1_bundle(&c_paper, &fs, &s1, None).unwrap();
    println!("coboundary test in {:?}: {}", t2.elapsed(), r.is_yes());
    assert!(r.is_yes());
    println!("total {:?}", t0.elapsed());
}

fn char2_setup(n: u32, l: u32) -> BundleSpec {
    let d = 2u32.pow(n) + 2 * l + 1;
    let curve = curve_from_texts("GF(2)(s)(t)", &format!("x^{d}+y^{d}+z^{d}"), ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field).unwrap()),
        curve.element(&parse_poly("y^2", &field).unwrap()),
        curve.element(&parse_poly("t*z^2+s*x*y", &field).unwrap()),
    ];
    BundleSpec::new(curve, gens, 3).unwrap()
}

#[test]
#[ignore]
fn char2_syzygy_variants() {
    for (n, l) in [(2u32, 0u32), (3, 0), (4, 1)] {
        let q = 2u32.pow(n);
        let spec = char2_setup(n, l);
        let pb = spec.pullback(n);
        // literal transcription
        let s1_lit = [
            format!("x^{}*z^{}*t^{}", 3 + 6 * l, q - 3 - 6 * l, 2 * q),
            format!(
                "x^{}*y^{}*z^{}*t^{} + y^{}*z^{}*t^{q}*s + x^{q}*s^{}",
                1 + 2 * l, 2 + 4 * l, q - 3 - 6 * l, q + 1,
                1 + 2 * l, q - 2 * l - 1, q + 1
            ),
            format!("x^{}*z^{}*t^{q} + s^{}*y^{q}", 1 + 2 * l, q - 2 * l - 1, 2 * n),
        ];
        // exponent-consistent reading: t^{2q} and s^{q}/s^{2q} throughout
        let s1_fix = [
            format!("x^{}*z^{}*t^{}", 3 + 6 * l, q - 3 - 6 * l, 2 * q),
            format!(
                "x^{}*y^{}*z^{}*t^{} + y^{}*z^{}*t^{q}*s^{q} + x^{q}*s^{}",
                1 + 2 * l, 2 + 4 * l, q - 3 - 6 * l, 2 * q,
                1 + 2 * l, q - 2 * l - 1, 2 * q
            ),
            format!("x^{}*z^{}*t^{q} + s^{q}*y^{q}", 1 + 2 * l, q - 2 * l - 1),
        ];
        let s2_fix = [
            format!(
                "y^{}*x^{}*z^{}*t^{} + x^{}*z^{}*t^{q}*s^{q} + y^{q}*s^{}",
                1 + 2 * l, 2 + 4 * l, q - 3 - 6 * l, 2 * q,
                1 + 2 * l, q - 2 * l - 1, 2 * q
            ),
            format!("y^{}*z^{}*t^{}", 3 + 6 * l, q - 3 - 6 * l, 2 * q),
            format!("y^{}*z^{}*t^{q} + s^{q}*x^{q}", 1 + 2 * l, q - 2 * l - 1),
        ];
        fn to_refs(a: &[String]) -> Vec<&str> {
            a.iter().map(|s| s.as_str()).collect()
        }
        let lit = pb.section_from_texts(&to_refs(&s1_lit), Some(3 * q)).unwrap();
        let lit_ok = pb.verify_syzygy(&lit.components).unwrap();
        let fix1 = pb.section_from_texts(&to_refs(&s1_fix), Some(3 * q)).unwrap();
        let fix1_ok = pb.verify_syzygy(&fix1.components).unwrap();
        let fix2 = pb.section_from_texts(&to_refs(&s2_fix), Some(3 * q)).unwrap();
        let fix2_ok = pb.verify_syzygy(&fix2.components).unwrap();
        println!("(n,l)=({n},{l}): literal={lit_ok} fixed_s1={fix1_ok} fixed_s2={fix2_ok}");
        if fix1_ok && fix2_ok {
            let w = pb.wedge_scalar(&fix1, &fix2).unwrap();
            println!("  wedge nonzero: {}", !pb.field().is_zero(&w));
        }
    }
}

#[test]
#[ignore]
fn ex335_section_resolution() {
    let curve = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field).unwrap()),
        curve.element(&parse_poly("y^2", &field).unwrap()),
        curve.element(&parse_poly("z^2", &field).unwrap()),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3).unwrap();
    let pb = spec.pullback(2);
    println!("pullback gens: {:?}, twist {}", pb.generator_strings(), pb.twist);
    let secs = pb.sections(27);
    println!("section space dim = {}", secs.len());
    let s1 = ["x^6*z^3", "y^6*z^3", "x*y^8 - x^4*z^5 + x*z^8 + z^9"];
    let s2 = [
        "x^7*y^2 - x^3*y^2*z^4 - y^2*z^7",
        "x*y^8 + x^5*z^4 + x^2*z^7 - z^9",
        "x^6*y^2*z + x^5*y^2*z^2 + x^3*y^2*z^4 - x^2*y^2*z^5 + x*y^2*z^6 + y^2*z^7",
    ];
    for (name, lit) in [("s1", &s1), ("s2", &s2)] {
        let cand = pb.section_from_texts(&lit.map(|s| s), Some(27)).unwrap();
        let ok = pb.verify_syzygy(&cand.components).unwrap();
        println!("{name} literal verifies: {ok}");
        if ok {
            continue;
        }
        // try solving for each component in turn from the other two
        for fix_idx in 0..3 {
            let mut acc = syzygium::poly::HomogeneousPoly::zero(field.clone(), 27);
            for i in 0..3 {
                if i == fix_idx {
                    continue;
                }
                acc = acc
                    .add(&pb.generators[i].rep.mul(&cand.components[i].rep))
                    .unwrap();
            }
            // solve gen_fix * g = -acc in the curve ring
            let target = curve.nf(&acc.neg());
            let m = curve.mult_map(&pb.generators[fix_idx], 9);
            let rhs = curve.coords(&target, 27);
            if let Some(x) = syzygium::linalg::solve(&m, &rhs) {
                let g = curve.from_coords(&x, 9);
                println!("  {name}: component {fix_idx} resolved to: {g}");
            } else {
                println!("  {name}: component {fix_idx} unsolvable");
            }
        }
    }
}

#[test]
#[ignore]
fn ex335_basis_and_minus_curve() {
    // computed basis on the spec curve
    let curve = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field).unwrap()),
        curve.element(&parse_poly("y^2", &field).unwrap()),
        curve.element(&parse_poly("z^2", &field).unwrap()),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3).unwrap();
    let pb = spec.pullback(2);
    for (i, s) in pb.sections(27).iter().enumerate() {
        println!("basis[{i}]:");
        for c in &s.components {
            println!("   {c}");
        }
    }
    // literal sections on the sign-flipped curve
    let curve2 = curve_from_texts("GF(3)", "x^8+y^8+z^8-x^3*z^5", ("x", "z")).unwrap();
    let f2 = curve2.field().clone();
    let gens2 = vec![
        curve2.element(&parse_poly("x^2", &f2).unwrap()),
        curve2.element(&parse_poly("y^2", &f2).unwrap()),
        curve2.element(&parse_poly("z^2", &f2).unwrap()),
    ];
    let spec2 = BundleSpec::new(curve2.clone(), gens2, 3).unwrap();
    let pb2 = spec2.pullback(2);
    let s1 = ["x^6*z^3", "y^6*z^3", "x*y^8 - x^4*z^5 + x*z^8 + z^9"];
    let s2 = [
        "x^7*y^2 - x^3*y^2*z^4 - y^2*z^7",
        "x*y^8 + x^5*z^4 + x^2*z^7 - z^9",
        "x^6*y^2*z + x^5*y^2*z^2 + x^3*y^2*z^4 - x^2*y^2*z^5 + x*y^2*z^6 + y^2*z^7",
    ];
    for (name, lit) in [("s1", &s1), ("s2", &s2)] {
        let cand = pb2.section_from_texts(&lit.map(|s| s), Some(27)).unwrap();
        println!(
            "minus-curve {name} verifies: {}",
            pb2.verify_syzygy(&cand.components).unwrap()
        );
    }
}

#[test]
#[ignore]
fn deg11_sections_probe() {
    use syzygium::poly::{parse_poly_graded, HomogeneousPoly};
    let t0 = Instant::now();
    let curve = curve_from_texts("GF(2)(t)", "x^11+y^11+z^11", ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field).unwrap()),
        curve.element(&parse_poly("y^2", &field).unwrap()),
        curve.element(&parse_poly("t*z^2+(1-t)*x*y", &field).unwrap()),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3).unwrap();
    let pb = spec.pullback(5);
    assert_eq!(pb.twist, 96);
    println!("setup {:?}", t0.elapsed());
    let mut resolved_sections = Vec::new();
    for (name, raw) in [
        ("s1", include_str!("../data/deg11_s1.txt")),
        ("s2", include_str!("../data/deg11_s2.txt")),
    ] {
        let t1 = Instant::now();
        let mut comps: Vec<syzygium::curve::RingElement> = Vec::new();
        let mut bad_component: Option<usize> = None;
        for (idx, block) in raw.split('\n').collect::<Vec<_>>().join("\n").split("\n;\n").enumerate() {
            let pieces = parse_poly_graded(block, &field).unwrap();
            let good: Vec<&HomogeneousPoly> = pieces.iter().filter(|p| p.degree == 32).collect();
            if pieces.len() > 1 {
                println!(
                    "{name} component {idx}: {} off-degree pieces dropped",
                    pieces.len() - 1
                );
                bad_component = Some(idx);
            }
            comps.push(curve.element(good[0]));
        }
        let ok = pb
            .verify_syzygy(&comps)
            .unwrap();
        println!("{name} literal (after drop) verifies: {ok} in {:?}", t1.elapsed());
        if !ok {
            let fix = bad_component.expect("some component must be off");
            // solve for the broken component from the others
            let t2 = Instant::now();
            let mut acc = HomogeneousPoly::zero(field.clone(), 96);
            for i in 0..3 {
                if i == fix {
                    continue;
                }
                acc = acc.add(&pb.generators[i].rep.mul(&comps[i].rep)).unwrap();
            }
            let target = curve.nf(&acc.neg());
            let m = curve.mult_map(&pb.generators[fix], 32);
            let rhs = curve.coords(&target, 96);
            let x = syzygium::linalg::solve(&m, &rhs).expect("component resolvable");
            let g = curve.from_coords(&x, 32);
            println!("  solved component {fix} in {:?}", t2.elapsed());
            // diff against the parsed (dropped) component
            let diff = g.sub(&comps[fix].rep).unwrap();
            println!("  diff from printed: {diff}");
            comps[fix] = curve.element(&g);
            assert!(pb.verify_syzygy(&comps).unwrap());
        }
        resolved_sections.push(syzygium::bundle::Section {
            total_degree: 96,
            components: comps,
        });
    }
    // generic independence: some 2x2 minor of the coordinate matrix is nonzero
    let w = pb
        .wedge_scalar(&resolved_sections[0], &resolved_sections[1])
        .unwrap();
    println!("wedge zero: {}", pb.field().is_zero(&w));
    println!("total {:?}", t0.elapsed());
}

#[test]
#[ignore]
fn quintic_family_pullback_sections() {
    let t0 = Instant::now();
    let curve = curve_from_texts("GF(3)(t)", "x^5+y^5+z^5+t*x^2*y^3", ("x", "z")).unwrap();
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field).unwrap()),
        curve.element(&parse_poly("y^2", &field).unwrap()),
        curve.element(&parse_poly("z^2", &field).unwrap()),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3).unwrap();
    println!("built spec in {:?}", t0.elapsed());
    let t1 = Instant::now();
    let pb = spec.pullback(3);
    assert_eq!(pb.twist, 81);
    let secs = pb.sections(81);
    println!("sections computed in {:?}", t1.elapsed());
    println!("dim = {}", secs.len());
    for s in &secs {
        assert!(pb.verify_syzygy(&s.components).unwrap());
    }
    assert_eq!(secs.len(), 2);
    let t2 = Instant::now();
    let w = pb.wedge_scalar(&secs[0], &secs[1]).unwrap();
    println!("wedge in {:?}: zero = {}", t2.elapsed(), pb.field().is_zero(&w));
    assert!(!pb.field().is_zero(&w));
    println!("total {:?}", t0.elapsed());
}
