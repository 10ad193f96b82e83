//! Frozen reference values. They were produced by an independent
//! straight-line evaluation of the transfer-matrix products and are checked
//! against both the monodromy engine and the configuration sum.

use v19_core::bruteforce::{partition_bruteforce, BoundaryKind, BoundarySpec};
use v19_core::field::{int, parse_rational, rat, Rational};
use v19_core::monodromy::{compute_f, compute_fbar, compute_z};
use v19_core::weights::{weight, WeightName};
use v19_core::{make_context, Model};

fn r(text: &str) -> Rational {
    parse_rational(text).unwrap()
}

struct Frozen {
    model: Model,
    z2: &'static str,
    f2: &'static str,
    fbar2: &'static str,
    z3: &'static str,
}

const FROZEN: [Frozen; 2] = [
    Frozen {
        model: Model::Ik,
        z2: "36122261903329910087/1099511627776",
        f2: "-5712796453082639451674750900397/180143985094819840000",
        fbar2: "-22293614251663998396604587513/2251799813685248000",
        z3: "-31176764144456182279918704000000/16807",
    },
    Frozen {
        model: Model::Fz,
        z2: "152394799375/16777216",
        f2: "254800045271499/85899345920",
        fbar2: "2686853179564281/21474836480",
        z3: "-8912811401002080000/2401",
    },
];

#[test]
fn two_site_values() {
    for f in &FROZEN {
        let ctx = make_context(f.model, rat(3, 2), vec![int(2), rat(5, 3)]).unwrap();
        let (u, y1, y2) = (int(7), rat(11, 3), rat(-2, 5));
        assert_eq!(compute_z(&ctx, &[int(7), rat(11, 3)]).unwrap(), r(f.z2));
        assert_eq!(
            compute_f(&ctx, std::slice::from_ref(&u), &y1, &y2).unwrap(),
            r(f.f2)
        );
        assert_eq!(
            compute_fbar(&ctx, &y1, &y2, std::slice::from_ref(&u)).unwrap(),
            r(f.fbar2)
        );

        let z = BoundarySpec::preset(BoundaryKind::Z, 2).unwrap();
        let fb = BoundarySpec::preset(BoundaryKind::F, 2).unwrap();
        let fbb = BoundarySpec::preset(BoundaryKind::Fbar, 2).unwrap();
        assert_eq!(
            partition_bruteforce(&ctx, &z, &[int(7), rat(11, 3)]).unwrap(),
            r(f.z2)
        );
        assert_eq!(
            partition_bruteforce(&ctx, &fb, &[y1.clone(), y2.clone(), u.clone()]).unwrap(),
            r(f.f2)
        );
        assert_eq!(
            partition_bruteforce(&ctx, &fbb, &[u, y1, y2]).unwrap(),
            r(f.fbar2)
        );
    }
}

#[test]
fn three_site_values() {
    for f in &FROZEN {
        let ctx = make_context(f.model, int(2), vec![int(1), int(3), rat(-1, 2)]).unwrap();
        let xs = [int(5), rat(2, 7), int(-3)];
        assert_eq!(compute_z(&ctx, &xs).unwrap(), r(f.z3));
        let z = BoundarySpec::preset(BoundaryKind::Z, 3).unwrap();
        assert_eq!(partition_bruteforce(&ctx, &z, &xs).unwrap(), r(f.z3));
    }
}

#[test]
fn single_weight_values() {
    // FZ at q = 4: a(5) = (5 − 4)(5 − 16), d22(2) from the diagonal formula.
    let ctx = make_context(Model::Fz, int(2), vec![int(1)]).unwrap();
    assert_eq!(weight(&ctx, WeightName::A, &int(5)).unwrap(), int(-11));
    assert_eq!(weight(&ctx, WeightName::D(2, 2), &int(2)).unwrap(), int(82));
    // One site: Z is the corner weight d13 at X/m.
    let ctx = make_context(Model::Ik, rat(3, 2), vec![int(2)]).unwrap();
    assert_eq!(
        compute_z(&ctx, &[int(7)]).unwrap(),
        weight(&ctx, WeightName::D(1, 3), &rat(7, 2)).unwrap()
    );
}
