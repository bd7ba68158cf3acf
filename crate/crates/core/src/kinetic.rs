//! Kinetic densities `ψ(μ)` written as small expressions.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := NUMBER | 'mu' | 'exp' '(' expr ')' | 'dirac' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `dirac(c)` is a unit point mass at the constant `c`; it may only appear
//! as an additive term, optionally scaled by constant factors.

use std::fmt;

use crate::closures::pn::legendre_all;
use crate::error::{MomentError, Result};
use crate::moments::{Atom, AtomicDensity, Density, Interval};
use crate::quadrature::CompositeRule;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Mu,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Dirac(Box<Expr>),
}

impl Expr {
    /// Value at `mu`, with point masses contributing nothing.
    pub fn eval(&self, mu: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Mu => mu,
            Expr::Neg(a) => -a.eval(mu),
            Expr::Add(a, b) => a.eval(mu) + b.eval(mu),
            Expr::Sub(a, b) => a.eval(mu) - b.eval(mu),
            Expr::Mul(a, b) => a.eval(mu) * b.eval(mu),
            Expr::Div(a, b) => a.eval(mu) / b.eval(mu),
            Expr::Pow(a, b) => {
                let (x, e) = (a.eval(mu), b.eval(mu));
                if e.fract() == 0.0 && e.abs() < 1024.0 {
                    x.powi(e as i32)
                } else {
                    x.powf(e)
                }
            }
            Expr::Exp(a) => a.eval(mu).exp(),
            Expr::Dirac(_) => 0.0,
        }
    }

    fn has_mu(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Mu => true,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Dirac(a) => a.has_mu(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.has_mu() || b.has_mu()
            }
        }
    }

    fn has_dirac(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Mu => false,
            Expr::Dirac(_) => true,
            Expr::Neg(a) | Expr::Exp(a) => a.has_dirac(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.has_dirac() || b.has_dirac()
            }
        }
    }

    fn is_constant(&self) -> bool {
        !self.has_mu() && !self.has_dirac()
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        write!(f, "{v:e}")
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let p = self.precedence();
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Mu => f.write_str("mu"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                wrap(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                wrap(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, b) => {
                wrap(f, a, a.precedence() < 5)?;
                f.write_str("^")?;
                wrap(f, b, b.precedence() < 3)
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Dirac(a) => write!(f, "dirac({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl Parser {
    fn err<T>(&self, col: usize, message: impl Into<String>) -> Result<T> {
        Err(MomentError::Parse { line: self.line, column: self.col0 + col - 1, message: message.into() })
    }

    fn lex(src: &str, line: usize, col0: usize) -> Result<Self> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        let fail = |col: usize, m: String| -> Result<Self> {
            Err(MomentError::Parse { line, column: col0 + col - 1, message: m })
        };
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let save = i;
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    if i < chars.len() && chars[i].is_ascii_digit() {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        i = save;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                match text.parse::<f64>() {
                    Ok(v) => toks.push((Tok::Num(v), start + 1)),
                    Err(_) => return fail(start + 1, format!("malformed number '{text}'")),
                }
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start + 1));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Sym(c), i + 1));
                i += 1;
            } else {
                return fail(i + 1, format!("unexpected character '{c}'"));
            }
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Self { toks, pos: 0, line, col0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(self.col(), format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "mu" => Ok(Expr::Mu),
                "exp" | "dirac" => {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(if name == "exp" { Expr::Exp(Box::new(e)) } else { Expr::Dirac(Box::new(e)) })
                }
                _ => self.err(col, format!("unknown identifier '{name}'")),
            },
            Tok::End => self.err(col, "unexpected end of expression"),
            Tok::Sym(c) => self.err(col, format!("unexpected '{c}'")),
        }
    }
}

/// Parses an expression; `line` and `col0` locate it in a surrounding file.
pub fn parse_expr(src: &str, line: usize, col0: usize) -> Result<Expr> {
    let mut p = Parser::lex(src, line, col0)?;
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(p.col(), "unexpected trailing input");
    }
    Ok(e)
}

/// Weight and position of a scaled point mass.
fn dirac_term(e: &Expr) -> Option<(f64, f64)> {
    match e {
        Expr::Dirac(p) if p.is_constant() => Some((1.0, p.eval(0.0))),
        Expr::Neg(a) => dirac_term(a).map(|(w, p)| (-w, p)),
        Expr::Mul(a, b) if a.is_constant() => dirac_term(b).map(|(w, p)| (a.eval(0.0) * w, p)),
        Expr::Mul(a, b) if b.is_constant() => dirac_term(a).map(|(w, p)| (b.eval(0.0) * w, p)),
        Expr::Div(a, b) if b.is_constant() => dirac_term(a).map(|(w, p)| (w / b.eval(0.0), p)),
        _ => None,
    }
}

fn collect_atoms(e: &Expr, sign: f64, out: &mut Vec<(f64, f64)>) -> std::result::Result<(), ()> {
    match e {
        Expr::Add(a, b) => {
            collect_atoms(a, sign, out)?;
            collect_atoms(b, sign, out)
        }
        Expr::Sub(a, b) => {
            collect_atoms(a, sign, out)?;
            collect_atoms(b, -sign, out)
        }
        Expr::Neg(a) if a.has_dirac() => collect_atoms(a, -sign, out),
        _ if !e.has_dirac() => Ok(()),
        _ => {
            let (w, p) = dirac_term(e).ok_or(())?;
            out.push((sign * w, p));
            Ok(())
        }
    }
}

/// A kinetic density: smooth part plus point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticDensity {
    expr: Expr,
    atoms: Vec<(f64, f64)>,
    smooth: bool,
}

impl KineticDensity {
    pub fn parse(src: &str) -> Result<Self> {
        Self::parse_at(src, 1, 1)
    }

    pub(crate) fn parse_at(src: &str, line: usize, col0: usize) -> Result<Self> {
        let expr = parse_expr(src, line, col0)?;
        Self::from_expr(expr).map_err(|m| MomentError::Parse { line, column: col0, message: m })
    }

    fn from_expr(expr: Expr) -> std::result::Result<Self, String> {
        let mut atoms = Vec::new();
        collect_atoms(&expr, 1.0, &mut atoms)
            .map_err(|_| "dirac(c) may only appear as a constant multiple in a sum".to_string())?;
        let smooth = Self::has_smooth(&expr);
        Ok(Self { expr, atoms, smooth })
    }

    fn has_smooth(e: &Expr) -> bool {
        match e {
            Expr::Add(a, b) | Expr::Sub(a, b) => Self::has_smooth(a) || Self::has_smooth(b),
            Expr::Neg(a) => Self::has_smooth(a),
            _ => !e.has_dirac(),
        }
    }

    pub fn constant(v: f64) -> Self {
        Self { expr: Expr::Num(v), atoms: Vec::new(), smooth: true }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Point masses as `(weight, position)`.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Smooth part at `mu`.
    pub fn smooth_value(&self, mu: f64) -> f64 {
        if self.smooth {
            self.expr.eval(mu)
        } else {
            0.0
        }
    }

    /// Checks nonnegativity of the smooth part (sampled) and of the atoms on `interval`.
    pub fn validate(&self, interval: Interval, what: &str) -> Result<()> {
        for &(w, p) in &self.atoms {
            if !(w >= 0.0) {
                return Err(MomentError::Validation(format!("{what}: negative point mass {w}")));
            }
            if !interval.contains(p) {
                return Err(MomentError::Validation(format!(
                    "{what}: point mass at {p} outside [{}, {}]",
                    interval.a, interval.b
                )));
            }
        }
        let n = 2000;
        for i in 0..=n {
            let mu = interval.a + (interval.b - interval.a) * i as f64 / n as f64;
            let v = self.smooth_value(mu);
            if !v.is_finite() || v < 0.0 {
                return Err(MomentError::Validation(format!("{what}: density is {v} at mu = {mu}")));
            }
        }
        Ok(())
    }

    fn atomic(&self, side: crate::moments::ZeroSide) -> AtomicDensity {
        AtomicDensity {
            atoms: self.atoms.iter().map(|&(w, p)| Atom { weight: w, position: p, zero_side: side }).collect(),
        }
    }

    /// Moments over `interval` where atoms at 0 belong to that interval.
    pub fn half_moments(&self, n: usize, interval: Interval) -> Vec<f64> {
        let side = if interval.a >= 0.0 { crate::moments::ZeroSide::Plus } else { crate::moments::ZeroSide::Minus };
        let mut m = self.smooth_moments(n, interval);
        for (a, b) in m.iter_mut().zip(self.atomic(side).moments_on(n, interval)) {
            *a += b;
        }
        m
    }

    /// `∫ P_l(μ) ψ(μ) dμ` over `interval` for `l = 0..=n`; a point mass at 0
    /// counts unless `interval` ends at 0.
    pub fn legendre_moments(&self, n: usize, interval: Interval) -> Vec<f64> {
        let mut m = vec![0.0; n + 1];
        if self.smooth {
            let rule = CompositeRule::new(interval.a, interval.b, 32, 16);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = w * self.expr.eval(x);
                for (a, p) in m.iter_mut().zip(legendre_all(n, x)) {
                    *a += v * p;
                }
            }
        }
        for &(w, pos) in &self.atoms {
            if interval.contains(pos) && !(pos == 0.0 && interval.b == 0.0) {
                for (a, p) in m.iter_mut().zip(legendre_all(n, pos)) {
                    *a += w * p;
                }
            }
        }
        m
    }

    fn smooth_moments(&self, n: usize, interval: Interval) -> Vec<f64> {
        if !self.smooth {
            return vec![0.0; n + 1];
        }
        let rule = CompositeRule::new(interval.a, interval.b, 32, 16);
        let vals: Vec<f64> = rule.nodes.iter().map(|&m| self.expr.eval(m)).collect();
        (0..=n)
            .map(|j| rule.nodes.iter().zip(&rule.weights).zip(&vals).map(|((x, w), v)| w * v * x.powi(j as i32)).sum())
            .collect()
    }
}

impl Density for KineticDensity {
    fn moments_on(&self, n: usize, interval: Interval) -> Vec<f64> {
        let mut m = self.smooth_moments(n, interval);
        for (a, b) in m.iter_mut().zip(self.atomic(Default::default()).moments_on(n, interval)) {
            *a += b;
        }
        m
    }
}

impl fmt::Display for KineticDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluates_one_beam_inflow() {
        let d = KineticDensity::parse("3*exp(3*mu+3)/(exp(6)-1)").unwrap();
        let mu: f64 = 0.3;
        let expect = 3.0 * (3.0 * mu + 3.0).exp() / (6.0_f64.exp() - 1.0);
        assert!((d.smooth_value(mu) - expect).abs() < 1e-15);
        // the profile integrates to one over the full interval
        let full = d.moments_on(0, Interval::FULL)[0];
        assert!((full - 1.0).abs() < 1e-13);
        let plus = d.half_moments(1, Interval::PLUS);
        let e3 = 3.0_f64.exp();
        assert!((plus[0] - e3 / (e3 + 1.0)).abs() < 1e-13);
        // ∫₀¹ μ·3e^{3μ+3}/(e⁶−1) = e³(2e³ + 1)/(3(e⁶ − 1))
        let m1 = e3 * (2.0 * e3 + 1.0) / (3.0 * (e3 * e3 - 1.0));
        assert!((plus[1] - m1).abs() < 1e-13);
    }

    #[test]
    fn dirac_terms() {
        let d = KineticDensity::parse("100*dirac(1)").unwrap();
        assert_eq!(d.atoms(), &[(100.0, 1.0)]);
        assert_eq!(d.half_moments(3, Interval::PLUS), vec![100.0; 4]);
        let d = KineticDensity::parse("1e-4 + dirac(-1)/2 - -dirac(0.5)*3").unwrap();
        assert_eq!(d.atoms(), &[(0.5, -1.0), (3.0, 0.5)]);
        assert!((d.smooth_value(0.2) - 1e-4).abs() < 1e-20);
        for bad in ["exp(dirac(1))", "mu*dirac(1)", "dirac(mu)", "dirac(1)^2"] {
            assert!(matches!(KineticDensity::parse(bad), Err(MomentError::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn legendre_moments_of_beam() {
        let d = KineticDensity::parse("2*dirac(1) + 0.5").unwrap();
        let m = d.legendre_moments(3, Interval::FULL);
        assert!((m[0] - 3.0).abs() < 1e-14);
        for v in &m[1..] {
            assert!((v - 2.0).abs() < 1e-14);
        }
        let half = d.legendre_moments(2, Interval::PLUS);
        // ∫₀¹ P₁ = 1/2, ∫₀¹ P₂ = 0
        assert!((half[1] - 2.25).abs() < 1e-14 && (half[2] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn parse_errors_carry_location() {
        match parse_expr("1 + * 2", 7, 10) {
            Err(MomentError::Parse { line, column, .. }) => {
                assert_eq!(line, 7);
                assert_eq!(column, 14);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("1..2", 1, 1).is_err());
        assert!(parse_expr("sin(mu)", 1, 1).is_err());
        assert!(parse_expr("(1", 1, 1).is_err());
        assert!(parse_expr("1 2", 1, 1).is_err());
    }

    #[test]
    fn validation() {
        assert!(KineticDensity::parse("mu").unwrap().validate(Interval::FULL, "x").is_err());
        assert!(KineticDensity::parse("mu").unwrap().validate(Interval::PLUS, "x").is_ok());
        assert!(KineticDensity::parse("-2*dirac(1)").unwrap().validate(Interval::FULL, "x").is_err());
        assert!(KineticDensity::parse("dirac(-1)").unwrap().validate(Interval::PLUS, "x").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf =
            prop_oneof![(0.0..100.0f64).prop_map(Expr::Num), Just(Expr::Mu), (1e-9..1e-5f64).prop_map(Expr::Num),];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Exp(Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse_expr(&text, 1, 1).unwrap(), e, "{}", text);
        }
    }
}
