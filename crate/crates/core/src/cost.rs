//! Operation counts per time step for the three 1D methods, as affine
//! functions of the cell count: ((a·Gp + b)·J + c)·Nτ for each operation type.

use std::fmt::Write as _;

use crate::error::{DgError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeFamily {
    Lwdg,
    Tsdg,
    Rkdg,
}

impl SchemeFamily {
    pub const ALL: [SchemeFamily; 3] = [SchemeFamily::Lwdg, SchemeFamily::Tsdg, SchemeFamily::Rkdg];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeFamily::Lwdg => "LWDG",
            SchemeFamily::Tsdg => "TSDG",
            SchemeFamily::Rkdg => "RKDG",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lwdg" => Ok(SchemeFamily::Lwdg),
            "tsdg" => Ok(SchemeFamily::Tsdg),
            "rkdg" | "rkdg-rk4" | "rkdg-tvdrk3" => Ok(SchemeFamily::Rkdg),
            _ => Err(DgError::Config(format!("unknown scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCount {
    pub adds: u128,
    pub muls: u128,
    pub assigns: u128,
}

impl OpCount {
    pub fn total(&self) -> u128 {
        self.adds + self.muls + self.assigns
    }
}

/// (a, b, c) for +/−, ×/÷ and = in that order.
pub type Coeffs = [(u128, u128, u128); 3];

pub fn coefficients(scheme: SchemeFamily, q: usize) -> Result<Coeffs> {
    use SchemeFamily::*;
    Ok(match (scheme, q) {
        (Lwdg, 2) => [(166, 270, 220), (207, 284, 256), (95, 192, 152)],
        (Lwdg, 3) => [(186, 294, 220), (231, 308, 257), (99, 212, 152)],
        (Tsdg, 2) => [(122, 228, 72), (136, 156, 60), (104, 208, 69)],
        (Tsdg, 3) => [(154, 276, 72), (168, 204, 62), (116, 240, 79)],
        (Rkdg, 2) => [(128, 260, 50), (148, 152, 23), (116, 208, 57)],
        (Rkdg, 3) => [(176, 320, 50), (196, 208, 25), (132, 240, 59)],
        _ => return Err(DgError::Unsupported(q)),
    })
}

pub fn predicted_ops(scheme: SchemeFamily, q: usize, gp: u64, j: u64, n_tau: u64) -> Result<OpCount> {
    let c = coefficients(scheme, q)?;
    let f = |(a, b, k): (u128, u128, u128)| ((a * gp as u128 + b) * j as u128 + k) * n_tau as u128;
    Ok(OpCount { adds: f(c[0]), muls: f(c[1]), assigns: f(c[2]) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub q: usize,
    pub gp: u64,
    pub j: u64,
    pub n_tau: u64,
    pub rows: Vec<(SchemeFamily, OpCount)>,
    /// Whether LWDG strictly exceeds both others in adds, muls and total;
    /// `None` when J = 0 and only boundary constants remain.
    pub lwdg_dominates: Option<bool>,
}

pub fn compare_schemes(q: usize, gp: u64, j: u64, n_tau: u64) -> Result<Comparison> {
    let rows: Vec<(SchemeFamily, OpCount)> = SchemeFamily::ALL
        .iter()
        .map(|&s| predicted_ops(s, q, gp, j, n_tau).map(|c| (s, c)))
        .collect::<Result<_>>()?;
    let lwdg_dominates = if j == 0 || n_tau == 0 {
        None
    } else {
        let lw = rows[0].1;
        Some(rows[1..].iter().all(|(_, o)| lw.adds > o.adds && lw.muls > o.muls && lw.total() > o.total()))
    };
    Ok(Comparison { q, gp, j, n_tau, rows, lwdg_dominates })
}

impl Comparison {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "P{}  Gp={}  J={}  Ntau={}", self.q, self.gp, self.j, self.n_tau);
        let _ = writeln!(s, "{:<8} {:>16} {:>16} {:>16} {:>16}", "scheme", "+/-", "x/div", "=", "total");
        for (sch, o) in &self.rows {
            let _ = writeln!(s, "{:<8} {:>16} {:>16} {:>16} {:>16}", sch.name(), o.adds, o.muls, o.assigns, o.total());
        }
        match self.lwdg_dominates {
            Some(true) => s.push_str("LWDG has the largest counts\n"),
            Some(false) => s.push_str("LWDG does not have the largest counts\n"),
            None => s.push_str("boundary constants only, no ordering\n"),
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_examples() {
        assert_eq!(predicted_ops(SchemeFamily::Lwdg, 2, 3, 10, 1).unwrap().adds, 7900);
        assert_eq!(predicted_ops(SchemeFamily::Rkdg, 2, 3, 10, 1).unwrap().muls, 5983);
        for s in SchemeFamily::ALL {
            assert_eq!(predicted_ops(s, 3, 4, 77, 0).unwrap(), OpCount::default());
        }
        assert!(matches!(predicted_ops(SchemeFamily::Tsdg, 1, 2, 10, 1), Err(DgError::Unsupported(1))));
    }

    #[test]
    fn ordering_example() {
        let c = compare_schemes(2, 3, 1000, 1).unwrap();
        let adds: Vec<u128> = c.rows.iter().map(|r| r.1.adds).collect();
        assert_eq!(adds, vec![768_220, 594_072, 644_050]);
        assert_eq!(c.lwdg_dominates, Some(true));
        assert_eq!(compare_schemes(3, 4, 1000, 1).unwrap().lwdg_dominates, Some(true));
        assert_eq!(compare_schemes(2, 3, 0, 1).unwrap().lwdg_dominates, None);
        assert!(c.to_text().contains("768220"));
    }

    #[test]
    fn two_point_rule_breaks_the_cubic_ordering() {
        // 186·2 + 294 < 176·2 + 320: with Gp = 2 the cubic RKDG additions exceed LWDG's
        let c = compare_schemes(3, 2, 29, 1).unwrap();
        assert_eq!(c.lwdg_dominates, Some(false));
        assert_eq!(compare_schemes(2, 2, 29, 1).unwrap().lwdg_dominates, Some(true));
    }

    proptest! {
        #[test]
        fn affine_in_cells(q in 2usize..4, gp in 2u64..10, j in 1u64..100_000, nt in 0u64..1000) {
            for s in SchemeFamily::ALL {
                let one = predicted_ops(s, q, gp, j, nt).unwrap();
                let two = predicted_ops(s, q, gp, 2 * j, nt).unwrap();
                let c = coefficients(s, q).unwrap();
                prop_assert_eq!(2 * one.adds - two.adds, c[0].2 * nt as u128);
                prop_assert_eq!(2 * one.muls - two.muls, c[1].2 * nt as u128);
                prop_assert_eq!(2 * one.assigns - two.assigns, c[2].2 * nt as u128);
            }
        }

        // Gp ≥ 3 covers Gp = q+1 for both degrees; Gp = 2 is checked separately above.
        #[test]
        fn lwdg_is_most_expensive(q in 2usize..4, gp in 3u64..20, j in 1u64..1_000_000, nt in 1u64..100) {
            prop_assert_eq!(compare_schemes(q, gp, j, nt).unwrap().lwdg_dominates, Some(true));
        }
    }
}
