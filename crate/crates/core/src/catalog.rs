//! Named invariants: Hu's seven, the nine primitive invariants, nineteen
//! affine invariants and three 3D rotation invariants, each stored both as
//! a generating-function core and as a published moment polynomial.

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use crate::genfun::{CoreSum, Group, InvariantCore};
use crate::poly::{int, MomentPolynomial};

#[derive(Debug, Clone)]
pub struct NamedInvariant {
    pub name: String,
    pub group: Group,
    /// Core used for translation.
    pub core: CoreSum,
    /// Core text exactly as published. Equal to `core` except where `note` says otherwise.
    pub printed_core: String,
    /// Published moment polynomial (numerator only for affine entries).
    pub reference: MomentPolynomial,
    /// Power of `mu00` in the denominator of the absolute invariant.
    pub k: u32,
    /// Denominator power as published, where one is printed.
    pub printed_k: Option<u32>,
    pub skew: bool,
    pub note: Option<String>,
}

impl NamedInvariant {
    pub fn dim(&self) -> usize {
        self.core.dim()
    }

    pub fn translated(&self) -> MomentPolynomial {
        self.core.translate()
    }

    /// Translation divided by its scalar relative to the reference, so it
    /// coincides with the published polynomial when the entry verifies.
    pub fn normalized_translation(&self) -> MomentPolynomial {
        let t = self.translated();
        match t.ratio_to(&self.reference) {
            Some(s) => t.scale(&s.recip()),
            None => t,
        }
    }
}

// Hu's invariants, primitive invariants: (name, printed core, reference).
const HU: &[(&str, &str, &str)] = &[
    ("I1", "f(1,1)", "mu20 + mu02"),
    ("I2", "f(1,2)^2 - 2*g(1,2)^2", "(mu20 - mu02)^2 + 4*mu11^2"),
    (
        "I3",
        "f(1,2)^3 - 3*g(1,2)^2*f(1,2)",
        "(mu30 - 3*mu12)^2 + (3*mu21 - mu03)^2",
    ),
    (
        "I4",
        "f(1,2)*f(1,1)*f(2,2)",
        "(mu30 + mu12)^2 + (mu21 + mu03)^2",
    ),
    (
        "I5",
        "f(2,2)*f(3,3)*f(4,4)*(f(2,1)*f(3,1)*f(4,1) - f(2,1)*g(3,1)*g(4,1) \
         - g(2,1)*g(3,1)*f(4,1) - g(2,1)*f(3,1)*g(4,1))",
        "(mu30 - 3*mu12)*(mu30 + mu12)*((mu30 + mu12)^2 - 3*(mu21 + mu03)^2) \
         + (3*mu21 - mu03)*(mu21 + mu03)*(3*(mu30 + mu12)^2 - (mu21 + mu03)^2)",
    ),
    (
        "I6",
        "f(2,2)*f(3,3)*(f(1,2)*f(1,3) - g(1,2)*g(1,3))",
        "(mu20 - mu02)*((mu30 + mu12)^2 - (mu21 + mu03)^2) \
         + 4*mu11*(mu30 + mu12)*(mu21 + mu03)",
    ),
    (
        "I7",
        "f(2,2)*f(3,3)*f(4,4)*(g(2,1)*f(3,1)*f(4,1) - g(2,1)*g(3,1)*g(4,1) \
         + f(2,1)*g(3,1)*f(4,1) + f(2,1)*f(3,1)*g(4,1))",
        "(3*mu21 - mu03)*(mu30 + mu12)*((mu30 + mu12)^2 - 3*(mu21 + mu03)^2) \
         - (mu30 - 3*mu12)*(mu21 + mu03)*(3*(mu30 + mu12)^2 - (mu21 + mu03)^2)",
    ),
];

/// The printed I2 core weights `g(1,2)^2` by -2, but `g(1,2)^2` translates
/// to twice `IP3`, so that coefficient yields `IP2 - 4*IP3`. Weight -1 gives I2.
const I2_CORE: &str = "f(1,2)^2 - g(1,2)^2";

const PRIMITIVE: &[(&str, &str, &str)] = &[
    ("IP1", "f(1,1)", "mu20 + mu02"),
    ("IP2", "f(1,2)^2", "mu20^2 + mu02^2 + 2*mu11^2"),
    ("IP3", "g(1,2)^2", "mu20*mu02 - mu11^2"),
    (
        "IP4",
        "f(2,2)*f(3,3)*f(1,2)*f(1,3)",
        "mu20*(mu30 + mu12)^2 + 2*mu11*(mu30 + mu12)*(mu21 + mu03) + mu02*(mu21 + mu03)^2",
    ),
    (
        "IP5",
        "1/2*g(1,2)^2*f(1,2)",
        "mu21*(mu03 - mu21) + mu12*(mu30 - mu12)",
    ),
    ("IP6", "f(1,2)^3", "mu30^2 + 3*mu21^2 + 3*mu12^2 + mu03^2"),
    (
        "IP7",
        "f(2,2)*f(3,3)*g(1,2)*g(1,3)",
        "mu20*(mu03 + mu21)^2 - 2*mu11*(mu30 + mu12)*(mu21 + mu03) + mu02*(mu30 + mu12)^2",
    ),
    (
        "IP8",
        "f(2,2)*f(3,3)*f(4,4)*f(2,1)*f(3,1)*f(4,1)",
        "mu30*(mu30 + mu12)^3 + 3*(mu30 + mu12)*(mu21 + mu03)\
         *(mu03*mu12 + 2*mu12*mu21 + mu21*mu30) + mu03*(mu21 + mu03)^3",
    ),
    (
        "IP9",
        "f(2,2)*f(3,3)*f(4,4)*f(2,1)*g(3,1)*g(4,1)",
        "mu21*(mu21 + mu03)^3 - (mu30 + mu12)*(mu21 + mu03)\
         *(mu03*mu12 - 2*mu03*mu30 + 4*mu12*mu21 + mu21*mu30) + mu12*(mu30 + mu12)^3",
    ),
];

const ROTATION_3D: &[(&str, &str, &str)] = &[
    ("J1", "f(1,1)", "mu200 + mu020 + mu002"),
    (
        "J2",
        "g(1,2,3)^2",
        "mu200*mu020*mu002 + 2*mu110*mu101*mu011 - mu011^2*mu200 - mu110^2*mu002 \
         - mu101^2*mu020",
    ),
    (
        "J3",
        "f(1,1)*f(2,2) - f(1,2)^2",
        "mu020*mu002 - mu011^2 + mu200*mu002 - mu101^2 + mu200*mu020 - mu110^2",
    ),
];

// Affine invariants: (name, printed core, printed power of mu00, numerator).
const AFFINE: &[(&str, &str, u32, &str)] = &[
    ("IA1", "g(1,2)^2", 4, "mu20*mu02 - mu11^2"),
    (
        "IA2",
        "g(1,2)^2*g(3,4)^2*g(1,3)*g(2,4)",
        10,
        "-mu03^2*mu30^2 + 6*mu03*mu12*mu21*mu30 - 4*mu03*mu21^3 - 4*mu12^3*mu30 + \
         3*mu12^2*mu21^2",
    ),
    (
        "IA3",
        "g(1,2)*g(1,3)*g(2,3)^2",
        7,
        "mu02*mu12*mu30 - mu02*mu21^2 - mu03*mu11*mu30 + mu03*mu20*mu21 + mu11*mu12*mu21 - \
         mu12^2*mu20",
    ),
    (
        "IA4",
        "g(1,2)*g(1,3)*g(2,4)*g(3,4)*g(1,5)*g(4,5)",
        11,
        "mu02^3*mu30^2 - 6*mu02^2*mu11*mu21*mu30 + 3*mu02^2*mu20*mu21^2 + \
         6*mu02*mu11^2*mu12*mu30 + 6*mu02*mu11^2*mu21^2 - 12*mu02*mu11*mu12*mu20*mu21 + \
         3*mu02*mu12^2*mu20^2 + mu03^2*mu20^3 - 2*mu03*mu11^3*mu30 + 6*mu03*mu11^2*mu20*mu21 \
         - 6*mu03*mu11*mu12*mu20^2 - 6*mu11^3*mu12*mu21 + 6*mu11^2*mu12^2*mu20",
    ),
    ("IA5", "g(1,2)^4", 6, "mu04*mu40 - 4*mu13*mu31 + 3*mu22^2"),
    (
        "IA6",
        "g(1,2)^2*g(1,3)^2*g(2,3)^2",
        9,
        "mu04*mu22*mu40 - mu04*mu31^2 - mu13^2*mu40 + 2*mu13*mu22*mu31 - mu22^3",
    ),
    (
        "IA7",
        "g(1,2)^2*g(1,3)^2",
        7,
        "mu02^2*mu40 - 4*mu02*mu11*mu31 + 2*mu02*mu20*mu22 + mu04*mu20^2 + 4*mu11^2*mu22 - \
         4*mu11*mu13*mu20",
    ),
    (
        "IA8",
        "g(1,2)^2*g(2,3)^2*g(3,4)^2",
        10,
        "mu02^2*mu22*mu40 - mu02^2*mu31^2 + mu02*mu04*mu20*mu40 - 2*mu02*mu11*mu13*mu40 + \
         2*mu02*mu11*mu22*mu31 - 2*mu02*mu13*mu20*mu31 + mu02*mu20*mu22^2 - \
         2*mu04*mu11*mu20*mu31 + mu04*mu20^2*mu22 + 4*mu11^2*mu13*mu31 - 4*mu11^2*mu22^2 + \
         2*mu11*mu13*mu20*mu22 - mu13^2*mu20^2",
    ),
    (
        "IA9",
        "g(1,2)^2*g(2,3)*g(3,4)^2*g(4,5)*g(2,5)*g(1,5)",
        13,
        "mu03^2*mu21^2*mu40 - 2*mu03^2*mu21*mu30*mu31 + mu03^2*mu22*mu30^2 - \
         2*mu03*mu12^2*mu21*mu40 + 2*mu03*mu12^2*mu30*mu31 - 2*mu03*mu12*mu13*mu30^2 + \
         2*mu03*mu12*mu21^2*mu31 + 2*mu03*mu13*mu21^2*mu30 - 2*mu03*mu21^3*mu22 + \
         mu04*mu12^2*mu30^2 - 2*mu04*mu12*mu21^2*mu30 + mu04*mu21^4 + mu12^4*mu40 - \
         2*mu12^3*mu21*mu31 - 2*mu12^3*mu22*mu30+ 2*mu12^2*mu13*mu21*mu30 + \
         3*mu12^2*mu21^2*mu22 - 2*mu12*mu13*mu21^3",
    ),
    (
        "IA10",
        "g(1,2)^4*g(3,4)^4*g(1,3)*g(2,4)",
        14,
        "-mu05^2*mu50^2 + 10*mu05*mu14*mu41*mu50 - 4*mu05*mu23*mu32*mu50 - \
         16*mu05*mu23*mu41^2 + 12*mu05*mu32^2*mu41 - 16*mu14^2*mu32*mu50 - 9*mu14^2*mu41^2 + \
         12*mu14*mu23^2*mu50 + 76*mu14*mu23*mu32*mu41 - 48*mu14*mu32^3 - 48*mu23^3*mu41 + \
         32*mu23^2*mu32^2",
    ),
    (
        "IA11",
        "g(1,2)^3*g(2,4)^2*g(3,4)^3",
        12,
        "3*mu30*mu23^2*mu12 + 9*mu41*mu23*mu12^2 + mu23*mu05*mu30^2 + 9*mu32*mu14*mu21^2 + \
         3*mu21*mu32^2*mu03 + mu50*mu32*mu03^2 - mu41^2*mu03^2 - 9*mu32^2*mu12^2 - \
         9*mu23^2*mu21^2 - mu14^2*mu30^2 - mu50*mu03*mu05*mu30 + 3*mu50*mu03*mu14*mu21 - \
         3*mu50*mu03*mu23*mu12 + 3*mu41*mu12*mu05*mu30 + 2*mu41*mu03*mu14*mu30 + \
         3*mu41*mu12*mu32*mu03 - 6*mu41*mu03*mu23*mu21 - 9*mu41*mu12*mu14*mu21 - \
         3*mu32*mu21*mu05*mu30 + 9*mu32*mu21*mu23*mu12 - mu32*mu03*mu23*mu30 - \
         6*mu32*mu12*mu14*mu30 + 3*mu23*mu30*mu14*mu21",
    ),
    (
        "IA12",
        "g(1,2)*g(1,3)^2*g(2,3)^3",
        9,
        "mu50*mu13*mu03 - mu50*mu04*mu12 - 3*mu41*mu22*mu03 + mu41*mu13*mu12 + \
         2*mu41*mu04*mu21 + 3*mu32*mu31*mu03 - 5*mu32*mu13*mu21 + 3*mu32*mu22*mu12 - \
         mu32*mu04*mu30 - mu23*mu40*mu03 - 5*mu23*mu31*mu12 + 3*mu23*mu22*mu21 + \
         3*mu23*mu13*mu30 + 2*mu14*mu40*mu12 + mu14*mu31*mu21 - 3*mu14*mu22*mu30 - \
         mu05*mu40*mu21 + mu05*mu31*mu30",
    ),
    (
        "IA13",
        "g(1,2)*g(1,3)^3*g(1,4)*g(2,4)*g(3,4)^2",
        12,
        "-mu02*mu05*mu31*mu50 + mu02*mu05*mu40*mu41 + mu02*mu14*mu22*mu50 + \
         3*mu02*mu14*mu31*mu41 - 4*mu02*mu14*mu32*mu40 - 4*mu02*mu22*mu23*mu41 + \
         3*mu02*mu22*mu32^2 + 3*mu02*mu23^2*mu40 - 2*mu02*mu23*mu31*mu32 + \
         mu04*mu14*mu20*mu50 - 4*mu04*mu20*mu23*mu41 + 3*mu04*mu20*mu32^2 + \
         2*mu05*mu11*mu22*mu50 - 2*mu05*mu11*mu31*mu41 - mu05*mu13*mu20*mu50 + \
         mu05*mu20*mu22*mu41 - 2*mu11*mu13*mu14*mu50 + 8*mu11*mu13*mu23*mu41 - \
         6*mu11*mu13*mu32^2 - 6*mu11*mu14*mu22*mu41 + 8*mu11*mu14*mu31*mu32 + \
         4*mu11*mu22*mu23*mu32 - 6*mu11*mu23^2*mu31 + 3*mu13*mu14*mu20*mu41 - \
         2*mu13*mu20*mu23*mu32 - 4*mu14*mu20*mu22*mu32 + 3*mu20*mu22*mu23^2",
    ),
    (
        "IA14",
        "g(1,3)*g(1,4)*g(2,4)^2*g(3,4)^2",
        10,
        "mu02^2*mu12*mu50 - 2*mu02^2*mu21*mu41 + mu02^2*mu30*mu32 - mu02*mu03*mu11*mu50 + \
         mu02*mu03*mu20*mu41 - mu02*mu11*mu12*mu41 + 5*mu02*mu11*mu21*mu32 - \
         3*mu02*mu11*mu23*mu30 - mu02*mu12*mu20*mu32 + mu02*mu14*mu20*mu30 - \
         mu02*mu20*mu21*mu23 + 2*mu03*mu11^2*mu41 - 3*mu03*mu11*mu20*mu32 + mu03*mu20^2*mu23 \
         - mu05*mu11*mu20*mu30 + mu05*mu20^2*mu21 - 2*mu11^2*mu12*mu32 + 2*mu11^2*mu14*mu30 - \
         2*mu11^2*mu21*mu23 + 5*mu11*mu12*mu20*mu23 - mu11*mu14*mu20*mu21 - \
         2*mu12*mu14*mu20^2",
    ),
    (
        "IA15",
        "g(1,2)^3*g(1,3)^2*g(2,4)^2*g(3,4)",
        12,
        "- mu03*mu05*mu30*mu50 + 2*mu03*mu14*mu21*mu50 + 3*mu03*mu14*mu30*mu41 - \
         8*mu03*mu21*mu23*mu41 + 6*mu03*mu21*mu32^2 - 2*mu03*mu23*mu30*mu32 + \
         mu05*mu12*mu21*mu50 + 2*mu05*mu12*mu30*mu41 - 2*mu05*mu21^2*mu41 - \
         2*mu12^2*mu14*mu50 + 8*mu12^2*mu23*mu41 - 6*mu12^2*mu32^2 - 3*mu12*mu14*mu21*mu41 - \
         8*mu12*mu14*mu30*mu32 + 2*mu12*mu21*mu23*mu32 + 6*mu12*mu23^2*mu30 + \
         8*mu14*mu21^2*mu32 - 6*mu21^2*mu23^2",
    ),
    (
        "IA16",
        "g(1,2)*g(1,3)*g(1,4)^2*g(2,4)*g(3,4)",
        10,
        "-2*mu40*mu11*mu02*mu13 + mu40*mu11^2*mu04 + mu40*mu02^2*mu22 - 2*mu31*mu20*mu11*mu04 \
         + 2*mu31*mu11*mu02*mu22 - mu02^2*mu31^2 + 2*mu31*mu20*mu02*mu13 + \
         2*mu22*mu20*mu11*mu13 + mu22*mu20^2*mu04 - mu11^2*mu22^2 - 2*mu20*mu02*mu22^2 - \
         mu20^2*mu13^2",
    ),
    (
        "IA17",
        "g(1,2)*g(1,3)*g(1,4)*g(2,3)^2*g(2,4)",
        10,
        "mu20*mu30*mu13*mu03 + mu20*mu04*mu21^2 - mu20*mu21*mu22*mu03 - mu20*mu21*mu13*mu12 + \
         mu20*mu22*mu12^2 - mu20*mu30*mu04*mu12 + 2*mu11*mu21*mu22*mu12 + \
         2*mu11*mu21*mu31*mu03 + 2*mu11*mu12*mu13*mu30 - 2*mu11*mu30*mu22*mu03 - \
         2*mu11*mu31*mu12^2 - 2*mu11*mu13*mu21^2 + mu02*mu22*mu21^2 - mu02*mu21*mu31*mu12 + \
         mu02*mu40*mu12^2 - mu02*mu03*mu40*mu21 + mu02*mu03*mu31*mu30 - mu02*mu30*mu22*mu12",
    ),
    (
        "IA18",
        "g(1,3)^2*g(2,4)^3*g(3,4)",
        10,
        "mu02*mu03*mu40*mu21 - 2*mu40*mu12*mu03*mu11 + mu40*mu03^2*mu20 - \
         3*mu02*mu21*mu31*mu12 + 2*mu11*mu21*mu31*mu03 - mu02*mu03*mu31*mu30 + \
         6*mu11*mu31*mu12^2 - 4*mu31*mu12*mu03*mu20 + 3*mu02*mu30*mu22*mu12 - \
         12*mu11*mu21*mu22*mu12 + 3*mu20*mu22*mu12^2 + 3*mu02*mu22*mu21^2 + \
         3*mu20*mu21*mu22*mu03 - 4*mu13*mu30*mu21*mu02 + 6*mu11*mu13*mu21^2 - \
         mu20*mu30*mu13*mu03 + 2*mu11*mu12*mu13*mu30 - 3*mu20*mu21*mu13*mu12 + \
         mu04*mu30^2*mu02 - 2*mu04*mu21*mu30*mu11 + mu20*mu30*mu04*mu12",
    ),
    (
        "IA19",
        "g(1,2)*g(1,3)*g(2,3)^4",
        9,
        "mu02*mu14*mu50 - 4*mu02*mu23*mu41 + 3*mu02*mu32^2 - mu05*mu11*mu50 + mu05*mu20*mu41 \
         + 3*mu11*mu14*mu41 - 2*mu11*mu23*mu32 - 4*mu14*mu20*mu32 + 3*mu20*mu23^2",
    ),
];

#[allow(clippy::too_many_arguments)]
fn build(
    group: Group,
    dim: usize,
    name: &str,
    printed_core: &str,
    core_text: &str,
    reference: &str,
    printed_k: Option<u32>,
    note: Option<&str>,
) -> NamedInvariant {
    let core = CoreSum::parse(core_text, dim)
        .unwrap_or_else(|e| panic!("catalog core {name} does not parse: {e}"));
    let reference = MomentPolynomial::parse(reference, dim)
        .unwrap_or_else(|e| panic!("catalog reference {name} does not parse: {e}"));
    let k = core
        .normalization_exponent(group)
        .unwrap_or_else(|e| panic!("catalog core {name} has no normalization: {e}"));
    NamedInvariant {
        name: name.to_string(),
        group,
        skew: core.is_skew(),
        core,
        printed_core: printed_core.to_string(),
        reference,
        k,
        printed_k,
        note: note.map(str::to_string),
    }
}

fn build_catalog(group: Group) -> Vec<NamedInvariant> {
    match group {
        Group::Similarity => {
            let mut out: Vec<NamedInvariant> = HU
                .iter()
                .map(|&(name, printed, reference)| {
                    let (core, note) = if name == "I2" {
                        (
                            I2_CORE,
                            Some(
                                "printed coefficient -2 on g(1,2)^2 translates to IP2 - 4*IP3; \
                                 the shipped core uses -1",
                            ),
                        )
                    } else {
                        (printed, None)
                    };
                    build(group, 2, name, printed, core, reference, None, note)
                })
                .collect();
            out.extend(PRIMITIVE.iter().map(|&(name, core, reference)| {
                build(group, 2, name, core, core, reference, None, None)
            }));
            out
        }
        Group::Affine => AFFINE
            .iter()
            .map(|&(name, core, k, numerator)| {
                build(group, 2, name, core, core, numerator, Some(k), None)
            })
            .collect(),
        Group::Rotation3D => ROTATION_3D
            .iter()
            .map(|&(name, core, reference)| {
                build(group, 3, name, core, core, reference, None, None)
            })
            .collect(),
    }
}

/// The full named set for a group. Built once and shared.
pub fn get_catalog(group: Group) -> &'static [NamedInvariant] {
    static SIM: OnceLock<Vec<NamedInvariant>> = OnceLock::new();
    static AFF: OnceLock<Vec<NamedInvariant>> = OnceLock::new();
    static ROT: OnceLock<Vec<NamedInvariant>> = OnceLock::new();
    let cell = match group {
        Group::Similarity => &SIM,
        Group::Affine => &AFF,
        Group::Rotation3D => &ROT,
    };
    cell.get_or_init(|| build_catalog(group))
}

/// Looks an entry up by name across all groups.
pub fn find(name: &str) -> Option<&'static NamedInvariant> {
    [Group::Similarity, Group::Affine, Group::Rotation3D]
        .into_iter()
        .flat_map(get_catalog)
        .find(|e| e.name.eq_ignore_ascii_case(name))
}

/// Entries of a named descriptor set: `hu`, `pi`, `affine19` or `3d`.
pub fn descriptor_set(set: &str) -> Option<Vec<&'static NamedInvariant>> {
    let sim = || get_catalog(Group::Similarity).iter();
    match set.to_ascii_lowercase().as_str() {
        "hu" => Some(sim().filter(|e| !e.name.starts_with("IP")).collect()),
        "pi" => Some(sim().filter(|e| e.name.starts_with("IP")).collect()),
        "affine19" => Some(get_catalog(Group::Affine).iter().collect()),
        "3d" => Some(get_catalog(Group::Rotation3D).iter().collect()),
        _ => None,
    }
}

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

pub(crate) fn ser_opt_rational<S: Serializer>(
    r: &Option<BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rational(r, s),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_poly<S: Serializer>(p: &MomentPolynomial, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Outcome of re-translating one catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogCheck {
    pub name: String,
    pub group: Group,
    pub core: String,
    /// Translation equals the reference up to a nonzero rational scalar.
    pub matches: bool,
    /// `translate(core) = scalar * reference`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub scalar: Option<BigRational>,
    pub k: u32,
    pub printed_k: Option<u32>,
    /// Same comparison for the published core text.
    pub printed_core_matches: bool,
    #[serde(serialize_with = "ser_opt_rational")]
    pub printed_core_scalar: Option<BigRational>,
    pub skew: bool,
    /// Canonical translation minus canonical reference, when they differ.
    pub diff: Option<String>,
    pub note: Option<String>,
}

impl CatalogCheck {
    /// Matches with a positive scalar and agrees with any published denominator power.
    pub fn passed(&self) -> bool {
        self.matches
            && self.scalar.as_ref().is_some_and(|s| s.is_positive())
            && self.printed_k.is_none_or(|k| k == self.k)
    }
}

pub fn check_entry(entry: &NamedInvariant) -> CatalogCheck {
    let translated = entry.translated();
    let scalar = translated.ratio_to(&entry.reference);
    let diff = if scalar.is_none() {
        Some((&translated.canonical() - &entry.reference.canonical()).to_string())
    } else {
        None
    };
    let printed_scalar = CoreSum::parse(&entry.printed_core, entry.dim())
        .ok()
        .and_then(|c| c.translate().ratio_to(&entry.reference));
    CatalogCheck {
        name: entry.name.clone(),
        group: entry.group,
        core: entry.core.to_string(),
        matches: scalar.is_some(),
        scalar,
        k: entry.k,
        printed_k: entry.printed_k,
        printed_core_matches: printed_scalar.is_some(),
        printed_core_scalar: printed_scalar,
        skew: entry.skew,
        diff,
        note: entry.note.clone(),
    }
}

/// Re-translates every entry of a group and compares it with its reference polynomial.
pub fn verify_catalog(group: Group) -> Vec<CatalogCheck> {
    get_catalog(group).iter().map(check_entry).collect()
}

/// An exact polynomial identity between invariants.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
    #[serde(serialize_with = "ser_poly")]
    pub residual: MomentPolynomial,
}

fn relation(name: &str, residual: MomentPolynomial) -> RelationCheck {
    RelationCheck {
        relation: name.to_string(),
        holds: residual.is_zero(),
        residual,
    }
}

/// The four primitive cores whose sum (with signs) is Hu's I5: `I51..I54`.
pub fn i5_primitives() -> [(&'static str, InvariantCore); 4] {
    let c = |s: &str| InvariantCore::parse(s, 2).expect("valid I5 primitive");
    [
        ("I51", c("f(2,2)*f(3,3)*f(4,4)*f(2,1)*f(3,1)*f(4,1)")),
        ("I52", c("f(2,2)*f(3,3)*f(4,4)*f(2,1)*g(3,1)*g(4,1)")),
        ("I53", c("f(2,2)*f(3,3)*f(4,4)*g(2,1)*g(3,1)*f(4,1)")),
        ("I54", c("f(2,2)*f(3,3)*f(4,4)*g(2,1)*f(3,1)*g(4,1)")),
    ]
}

fn entry(name: &str) -> &'static NamedInvariant {
    find(name).expect("catalog entry")
}

/// Checks the linear relations among primitive invariants and Hu's invariants.
///
/// The `I51..I54` relations are stated on raw translations of the primitive
/// cores. The Hu/PI relations use each entry's translation divided by its
/// catalog scalar. The I7 checks compare its four signed summands.
pub fn verify_relations() -> Vec<RelationCheck> {
    let [i51, i52, i53, i54] = i5_primitives().map(|(_, c)| c.translate());
    let three = int(3);
    let mut out = vec![
        relation("I51 = 3*I52", &i51 - &i52.scale(&three)),
        relation("I52 = I53", &i52 - &i53),
        relation("I52 = I54", &i52 - &i54),
    ];

    let n = |name: &str| entry(name).normalized_translation();
    let lin = |parts: &[(i64, &str)]| {
        parts
            .iter()
            .fold(MomentPolynomial::zero(2), |acc, (c, name)| {
                &acc + &n(name).scale(&int(*c))
            })
    };
    type Identity<'a> = (&'a str, &'a str, Vec<(i64, &'a str)>);
    let hu_pi: [Identity; 6] = [
        ("I1 = IP1", "I1", vec![(1, "IP1")]),
        ("I2 = IP2 - 2*IP3", "I2", vec![(1, "IP2"), (-2, "IP3")]),
        ("I3 = -6*IP5 + IP6", "I3", vec![(-6, "IP5"), (1, "IP6")]),
        ("I4 = 2*IP5 + IP6", "I4", vec![(2, "IP5"), (1, "IP6")]),
        ("I5 = IP8 - 3*IP9", "I5", vec![(1, "IP8"), (-3, "IP9")]),
        ("I6 = IP4 - IP7", "I6", vec![(1, "IP4"), (-1, "IP7")]),
    ];
    for (label, lhs, rhs) in hu_pi {
        out.push(relation(label, &n(lhs) - &lin(&rhs)));
    }

    let i7 = &entry("I7").core;
    let summands: Vec<MomentPolynomial> = i7
        .terms()
        .iter()
        .map(|(c, core)| core.translate().scale(c))
        .collect();
    for (i, s) in summands.iter().enumerate().skip(1) {
        out.push(relation(
            &format!("I7 summand 1 = I7 summand {}", i + 1),
            &summands[0] - s,
        ));
    }
    out
}

/// Scalar such that `translate(core) = scalar * reference`, or `None`.
pub fn translation_scalar(entry: &NamedInvariant) -> Option<BigRational> {
    entry.translated().ratio_to(&entry.reference)
}

/// True when the scalar is exactly one.
pub fn is_exact(entry: &NamedInvariant) -> bool {
    translation_scalar(entry).is_some_and(|s| s.is_one())
}
