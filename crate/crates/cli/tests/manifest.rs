use tcsp_cli::manifest::{parse_manifest, parse_relation_arg, BuiltInstance};
use tcsp_core::solvers::{solve_combined_oracle, solve_oracle, Side};
use tcsp_core::{builtin, Error};

const SAMPLE: &str = "\
# Two structures and an instance over each and over both.
structure A {
  rel Lt/2 := x1 < x2;
  rel Le := @Le;
}
structure B { rel Ne := @Neq; rel S/3 := x1 != x2 | x1 >= x3 }
instance I over A { Lt(x, y); Le(y, z); x = z }
instance J over A, B { A.Lt(x, y); B.Ne(y, z); A.Le(z, x) }
";

#[test]
fn sample_manifest_builds() {
    let m = parse_manifest(SAMPLE).unwrap();
    assert_eq!(m.structures.len(), 2);
    assert_eq!(m.instances.len(), 2);

    let a = m.structure(Some("A"), 6).unwrap();
    assert_eq!(a.lookup("Lt").unwrap(), &builtin("<").unwrap());
    assert_eq!(a.lookup("Le").unwrap(), &builtin("<=").unwrap());
    let b = m.structure(Some("B"), 6).unwrap();
    assert_eq!(b.lookup("S").unwrap(), &builtin("Smi").unwrap());

    // x < y <= z = x is unsatisfiable.
    let BuiltInstance::Single(i) = m.instance(Some("I"), 6).unwrap() else {
        panic!("I is over one structure");
    };
    assert!(!solve_oracle(&i).unwrap().is_sat());

    let BuiltInstance::Combined(j) = m.instance(Some("J"), 6).unwrap() else {
        panic!("J is over two structures");
    };
    assert_eq!(j.constraints(Side::First).len(), 2);
    assert_eq!(j.constraints(Side::Second).len(), 1);
    assert!(solve_combined_oracle(&j).unwrap().is_sat());
}

#[test]
fn display_round_trips() {
    let m = parse_manifest(SAMPLE).unwrap();
    let text = m.to_string();
    let again = parse_manifest(&text).unwrap();
    assert_eq!(again.to_string(), text);
    for name in ["A", "B"] {
        assert_eq!(
            m.structure(Some(name), 6).unwrap(),
            again.structure(Some(name), 6).unwrap()
        );
    }
}

fn parse_error(text: &str) -> (usize, usize, String) {
    match parse_manifest(text) {
        Err(Error::Parse { line, col, msg }) => (line, col, msg),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn errors_carry_positions() {
    let (line, col, _) = parse_error("structure A {\n  rel Lt/2 := x1 < ;\n}");
    assert_eq!((line, col), (2, 20));

    let (line, _, msg) = parse_error("structure A { rel R := @Lt }\nstructure A { rel R := @Le }");
    assert_eq!(line, 2);
    assert!(msg.contains("A"), "{msg}");

    let (line, _, msg) = parse_error("structure A { rel R := @Lt }\ninstance I over A { R(x, y, z) }");
    assert_eq!(line, 2);
    assert!(msg.contains("arity"), "{msg}");

    let (line, _, _) = parse_error("structure A { rel R := @Lt }\ninstance I over Z { R(x, y) }");
    assert_eq!(line, 2);

    let (line, _, _) = parse_error("structure A { rel R/2 := x1 < x3 }");
    assert_eq!(line, 1);
}

#[test]
fn unqualified_atoms_are_rejected_in_combined_instances() {
    let m = parse_manifest(
        "structure A { rel R := @Lt }\nstructure B { rel S := @Neq }\ninstance J over A, B { R(x, y) }",
    );
    let err = m.and_then(|m| m.instance(Some("J"), 6).map(|_| ())).unwrap_err();
    assert!(matches!(err, Error::Signature(_) | Error::Parse { .. }), "{err:?}");
}

#[test]
fn relation_arguments() {
    assert_eq!(parse_relation_arg("@Betw", None, 6).unwrap(), builtin("Betw").unwrap());
    let r = parse_relation_arg("x1 = x2 | (x3 < x1 & x3 < x2)", Some(3), 6).unwrap();
    assert_eq!(r, builtin("Rmix").unwrap());
    assert!(parse_relation_arg("x1 < x2", None, 6).is_err());
    assert!(matches!(
        parse_relation_arg("x1 < x2", Some(7), 6),
        Err(Error::ArityCap { .. })
    ));
}

#[test]
fn small_examples() {
    let m = parse_manifest("structure A { rel Lt/2 := x1 < x2 }").unwrap();
    let a = m.structure(None, 6).unwrap();
    assert_eq!(a.len(), 1);
    let orbits: Vec<Vec<u8>> = a.lookup("Lt").unwrap().orbits().iter().map(|w| w.ranks().to_vec()).collect();
    assert_eq!(orbits, vec![vec![0, 1]]);

    let m = parse_manifest("structure M { rel Rmix/3 := (x1>=x2 | x1>x3) & (x2>=x1 | x2>x3); rel B := @Rmix }").unwrap();
    let a = m.structure(None, 6).unwrap();
    assert_eq!(a.lookup("Rmix").unwrap(), a.lookup("B").unwrap());
    assert_eq!(a.lookup("B").unwrap(), &builtin("Rmix").unwrap());

    let m = parse_manifest(
        "structure A { rel Lt/2 := x1 < x2 }\nstructure B { rel Lt/2 := x1 < x2 }\ninstance I over A,B { A.Lt(x,y); B.Lt(y,x); }",
    )
    .unwrap();
    let BuiltInstance::Combined(i) = m.instance(None, 6).unwrap() else {
        panic!("I is over two structures");
    };
    assert_eq!(i.num_vars(), 2);
    // The two orders only share equality, so opposite strict orders coexist.
    assert!(solve_combined_oracle(&i).unwrap().is_sat());
}
