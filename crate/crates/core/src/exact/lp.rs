use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::mip::MipInstance;

const TERMS_PER_LINE: usize = 8;

struct Expr {
    out: String,
    terms: usize,
}

impl Expr {
    fn new(label: &str) -> Self {
        let mut out = String::new();
        let _ = write!(out, " {label}:");
        Expr { out, terms: 0 }
    }

    fn term(&mut self, coef: f64, var: &str) {
        if self.terms > 0 && self.terms.is_multiple_of(TERMS_PER_LINE) {
            self.out.push_str("\n   ");
        }
        let coef = if coef == 0.0 { 0.0 } else { coef };
        let sign = if coef < 0.0 { "-" } else { "+" };
        let mag = libm::fabs(coef);
        if self.terms == 0 && sign == "+" {
            let _ = write!(self.out, " {mag} {var}");
        } else {
            let _ = write!(self.out, " {sign} {mag} {var}");
        }
        self.terms += 1;
    }

    fn finish(mut self, sense: &str, rhs: f64, into: &mut String) {
        let _ = writeln!(self.out, " {sense} {rhs}");
        into.push_str(&self.out);
    }
}

fn psi(k: usize, m: usize) -> String {
    alloc::format!("psi_{k}_{m}")
}

fn phi(m: usize) -> String {
    alloc::format!("phi_{m}")
}

/// Writes the instance in CPLEX-LP format.
///
/// Variables are `phi_<m>` (binary) and `psi_<k>_<m>` (declared free so the
/// explicit nonnegativity rows carry that bound). Constraint labels are
/// `card`, `couple_<k>_<m>`, `nonneg_<k>_<m>` and `rowsum_<k>`.
pub fn export_lp(instance: &MipInstance) -> String {
    let (k_count, m_count) = (instance.datasets(), instance.columns());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ default set selection: {k_count} datasets, {m_count} configurations, n = {}",
        instance.n
    );
    out.push_str("Minimize\n");
    let mut obj = Expr::new("obj");
    for k in 0..k_count {
        for m in 0..m_count {
            obj.term(instance.risks.get(k, m), &psi(k, m));
        }
    }
    obj.out.push('\n');
    out.push_str(&obj.out);

    out.push_str("Subject To\n");
    let mut card = Expr::new("card");
    for m in 0..m_count {
        card.term(1.0, &phi(m));
    }
    card.finish("=", instance.n as f64, &mut out);

    for k in 0..k_count {
        for m in 0..m_count {
            let mut e = Expr::new(&alloc::format!("couple_{k}_{m}"));
            e.term(1.0, &psi(k, m));
            e.term(-1.0, &phi(m));
            let mut better: Vec<usize> = instance.precedence.set(k, m).to_vec();
            better.sort_unstable();
            for s in better {
                e.term(1.0, &phi(s));
            }
            e.finish(">=", 0.0, &mut out);
        }
    }
    for k in 0..k_count {
        for m in 0..m_count {
            let mut e = Expr::new(&alloc::format!("nonneg_{k}_{m}"));
            e.term(1.0, &psi(k, m));
            e.finish(">=", 0.0, &mut out);
        }
    }
    for k in 0..k_count {
        let mut e = Expr::new(&alloc::format!("rowsum_{k}"));
        for m in 0..m_count {
            e.term(1.0, &psi(k, m));
        }
        e.finish("=", 1.0, &mut out);
    }

    out.push_str("Bounds\n");
    for k in 0..k_count {
        for m in 0..m_count {
            let _ = writeln!(out, " {} free", psi(k, m));
        }
    }
    out.push_str("Binary\n");
    for m in 0..m_count {
        let _ = writeln!(out, " {}", phi(m));
    }
    out.push_str("End\n");
    out
}
