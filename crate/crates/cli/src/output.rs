//! JSON encoding of library values. Small counts are JSON numbers, anything
//! arbitrary precision is a decimal string.

use num_bigint::BigInt;
use num_rational::BigRational;
use quadlat_core::criteria::{UCertificate, UVerdict};
use quadlat_core::isometric::is_isometric_small;
use quadlat_core::lattice::Sublattice;
use quadlat_core::matrix::IntMatrix;
use quadlat_core::verdict::Verdict;
use quadlat_core::{Lattice, Vector};
use serde_json::{json, Value};

pub fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn rational(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

pub fn bigs(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big).collect())
}

pub fn vector(v: &Vector) -> Value {
    bigs(&v.0)
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| bigs(m.row(i))).collect())
}

/// Rank, signature, determinant, parity, discriminant group and Gram matrix.
pub fn lattice(l: &Lattice) -> Value {
    let sig = l.signature();
    json!({
        "rank": l.rank(),
        "signature": [sig.positive, sig.negative],
        "determinant": big(&l.determinant()),
        "even": l.is_even(),
        "disc_invariant_factors": bigs(&l.invariant_factors()),
        "gram": matrix(l.gram()),
    })
}

pub fn sublattice(s: &Sublattice) -> Value {
    let mut v = json!({ "basis": matrix(s.basis()), "primitive": s.is_primitive() });
    if let Ok(l) = s.lattice() {
        if let (Value::Object(dst), Value::Object(src)) = (&mut v, lattice(&l)) {
            dst.extend(src);
        }
    } else {
        v["rank"] = json!(s.rank());
        v["gram"] = matrix(&s.gram());
    }
    v
}

pub fn certificate(c: &UCertificate) -> Value {
    let mut v = json!({ "kind": c.tag(), "detail": c.to_string() });
    match c {
        UCertificate::Definite => {}
        UCertificate::ScaledGram { m } => v["m"] = big(m),
        UCertificate::LengthObstruction { length, rank } => {
            v["length"] = json!(length);
            v["rank"] = json!(rank);
        }
        UCertificate::RepresentedValues { p } => v["p"] = Value::String(p.to_string()),
    }
    v
}

pub fn u_verdict(v: &UVerdict) -> Value {
    match v {
        Verdict::Yes(split) => json!({
            "state": "Yes",
            "witness": {
                "e": vector(&split.e),
                "f": vector(&split.f),
                "complement": lattice(&split.complement_lattice()),
            },
        }),
        Verdict::No(c) => json!({ "state": "No", "certificate": certificate(c) }),
        Verdict::Unknown(b) => json!({
            "state": "Unknown",
            "bound": { "height": b.height, "candidates": b.candidates },
        }),
    }
}

pub fn u_verdict_text(v: &UVerdict) -> String {
    match v {
        Verdict::Yes(split) => format!("Yes (e = {}, f = {}, complement {})", split.e, split.f, split.complement_lattice()),
        Verdict::No(c) => format!("No: {c}"),
        Verdict::Unknown(b) => format!("Unknown: no hyperbolic pair up to {b}"),
    }
}

/// A conventional name for small lattices, when one applies.
pub fn recognize(l: &Lattice) -> Option<String> {
    match l.rank() {
        0 => Some("0".into()),
        1 => Some(format!("<{}>", l.gram()[(0, 0)])),
        2 => {
            let names: [(&str, [[i64; 2]; 2]); 7] = [
                ("U", [[0, 1], [1, 0]]),
                ("U(2)", [[0, 2], [2, 0]]),
                ("A2", [[2, -1], [-1, 2]]),
                ("A2(-1)", [[-2, 1], [1, -2]]),
                ("<2>+<-2>", [[2, 0], [0, -2]]),
                ("A1^2", [[2, 0], [0, 2]]),
                ("A1(-1)^2", [[-2, 0], [0, -2]]),
            ];
            names.iter().find_map(|(name, g)| {
                let m = Lattice::from_i64(g).ok()?;
                is_isometric_small(l, &m, 4).ok()?.is_yes().then(|| name.to_string())
            })
        }
        _ => None,
    }
}
