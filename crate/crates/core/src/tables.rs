//! Transcribed coefficient tables.
//!
//! Monomials are written over the spins a droplet label acts on (one axis
//! character per involved spin, in increasing spin order) and carry their raw
//! coefficient, i.e. `I_{xxz}` has coefficient 1 and `2I_{kx}I_{lx}` has 2.

/// Which family of droplet labels a row applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelFamily {
    Single,
    Pair,
    Tau(u8),
}

/// One axial tensor `T_{j0}` expressed as a real combination of products.
#[derive(Debug)]
pub struct AxialRow {
    pub family: LabelFamily,
    pub j: u32,
    pub scale: f64,
    pub terms: &'static [(f64, &'static str)],
}

/// One detection pair `C → M` of the measurement table.
#[derive(Debug)]
pub struct DetectionRow {
    pub family: LabelFamily,
    pub j: u32,
    pub index: usize,
    pub cartesian: &'static str,
    pub measurable: &'static str,
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

pub fn axial_rows() -> Vec<AxialRow> {
    use LabelFamily::*;
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s6 = 6f64.sqrt();
    let s8 = 8f64.sqrt();
    let s15 = 15f64.sqrt();
    vec![
        AxialRow {
            family: Single,
            j: 1,
            scale: SQRT2,
            terms: &[(1.0, "z")],
        },
        AxialRow {
            family: Pair,
            j: 0,
            scale: 1.0 / s3,
            terms: &[(2.0, "xx"), (2.0, "yy"), (2.0, "zz")],
        },
        AxialRow {
            family: Pair,
            j: 1,
            scale: 1.0 / SQRT2,
            terms: &[(2.0, "xy"), (-2.0, "yx")],
        },
        AxialRow {
            family: Pair,
            j: 2,
            scale: 1.0 / s6,
            terms: &[(-2.0, "xx"), (-2.0, "yy"), (4.0, "zz")],
        },
        AxialRow {
            family: Tau(1),
            j: 1,
            scale: s8 / s15,
            terms: &[
                (1.0, "xxz"),
                (1.0, "xzx"),
                (1.0, "zxx"),
                (1.0, "yyz"),
                (1.0, "yzy"),
                (1.0, "zyy"),
                (3.0, "zzz"),
            ],
        },
        AxialRow {
            family: Tau(1),
            j: 3,
            scale: -2.0 / s5,
            terms: &[
                (1.0, "xxz"),
                (1.0, "xzx"),
                (1.0, "zxx"),
                (1.0, "yyz"),
                (1.0, "yzy"),
                (1.0, "zyy"),
                (-2.0, "zzz"),
            ],
        },
        AxialRow {
            family: Tau(2),
            j: 1,
            scale: SQRT2 / s3,
            terms: &[
                (-2.0, "xxz"),
                (-2.0, "yyz"),
                (1.0, "zxx"),
                (1.0, "xzx"),
                (1.0, "zyy"),
                (1.0, "yzy"),
            ],
        },
        AxialRow {
            family: Tau(2),
            j: 2,
            scale: SQRT2,
            terms: &[(1.0, "yzx"), (1.0, "zyx"), (-1.0, "xzy"), (-1.0, "zxy")],
        },
        AxialRow {
            family: Tau(3),
            j: 1,
            scale: SQRT2,
            terms: &[(1.0, "zxx"), (-1.0, "xzx"), (1.0, "zyy"), (-1.0, "yzy")],
        },
        AxialRow {
            family: Tau(3),
            j: 2,
            scale: SQRT2 / s3,
            terms: &[
                (-2.0, "xyz"),
                (2.0, "yxz"),
                (1.0, "zxy"),
                (-1.0, "xzy"),
                (1.0, "yzx"),
                (-1.0, "zyx"),
            ],
        },
        AxialRow {
            family: Tau(4),
            j: 0,
            scale: 2.0 / s3,
            terms: &[
                (1.0, "xyz"),
                (-1.0, "xzy"),
                (-1.0, "yxz"),
                (1.0, "yzx"),
                (1.0, "zxy"),
                (-1.0, "zyx"),
            ],
        },
    ]
}

macro_rules! det {
    ($fam:expr, $j:expr, $( ($n:expr, $c:expr, $m:expr) ),* $(,)?) => {
        vec![ $( DetectionRow { family: $fam, j: $j, index: $n, cartesian: $c, measurable: $m } ),* ]
    };
}

/// `C_j^{(ℓ,n)} → M_j^{(ℓ,n)}` pairs. Pair rows for `j = 0` and `j = 2` share
/// the same operators; they are listed once per rank.
pub fn detection_rows() -> Vec<DetectionRow> {
    use LabelFamily::*;
    let mut rows = Vec::new();
    rows.extend(det!(Single, 1, (1, "z", "x")));
    for j in [0, 2] {
        rows.extend(det!(
            Pair,
            j,
            (1, "xx", "xz"),
            (2, "yy", "yz"),
            (3, "zz", "yz")
        ));
    }
    rows.extend(det!(Pair, 1, (1, "xy", "xz"), (2, "yx", "yz")));
    for j in [1, 3] {
        rows.extend(det!(
            Tau(1),
            j,
            (1, "xxz", "xzz"),
            (2, "xzx", "xzz"),
            (3, "yyz", "yzz"),
            (4, "yzy", "yzz"),
            (5, "zxx", "xzz"),
            (6, "zyy", "xzz"),
            (7, "zzz", "xzz"),
        ));
    }
    rows.extend(det!(
        Tau(2),
        1,
        (1, "xxz", "xzz"),
        (2, "xzx", "xzz"),
        (3, "yyz", "yzz"),
        (4, "yzy", "yzz"),
        (5, "zxx", "xzz"),
        (6, "zyy", "xzz"),
    ));
    rows.extend(det!(
        Tau(2),
        2,
        (1, "xzy", "xzz"),
        (2, "yzx", "yzz"),
        (3, "zxy", "xzz"),
        (4, "zyx", "xzz"),
    ));
    rows.extend(det!(
        Tau(3),
        1,
        (1, "xzx", "xzz"),
        (2, "yzy", "yzz"),
        (3, "zxx", "xzz"),
        (4, "zyy", "xzz"),
    ));
    rows.extend(det!(
        Tau(3),
        2,
        (1, "xyz", "xzz"),
        (2, "xzy", "xzz"),
        (3, "yxz", "yzz"),
        (4, "yzx", "yzz"),
        (5, "zxy", "xzz"),
        (6, "zyx", "xzz"),
    ));
    rows.extend(det!(
        Tau(4),
        0,
        (1, "xyz", "xzz"),
        (2, "xzy", "xzz"),
        (3, "yxz", "yzz"),
        (4, "yzx", "yzz"),
        (5, "zxy", "xzz"),
        (6, "zyx", "xzz"),
    ));
    rows
}
