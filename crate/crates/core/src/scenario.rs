//! Test problems: coefficients, kinetic initial and boundary data, and a
//! plain-text configuration format.
//!
//! ```text
//! # comments start with '#'
//! name = two-beams
//! domain = -0.5 0.5
//! t_end = 4
//! snapshots = 4
//! char_time = 4
//!
//! [sigma_a]          # also [transport] and [source]
//! default = 4
//! -0.1 0.2 = 10      # closed interval; later lines win
//!
//! [initial]          # piecewise in x, expressions in mu
//! default = 0.0001
//!
//! [left]             # incoming and outgoing halves of the ghost density
//! plus = 100*dirac(1)
//! minus = 0.0001
//!
//! [right]
//! plus = 0.0001
//! minus = 100*dirac(-1)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MomentError, Result};
use crate::kinetic::KineticDensity;
use crate::moments::{Density, Interval};

pub const BUILTIN_NAMES: [&str; 4] = ["one-beam", "two-beams", "rectangular-ic", "source-beam"];

/// Value on the closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment<T> {
    pub lo: f64,
    pub hi: f64,
    pub value: T,
}

/// Piecewise data in x: a default overridden by segments, later ones winning.
#[derive(Clone, Debug, PartialEq)]
pub struct Piecewise<T> {
    pub default: T,
    pub segments: Vec<Segment<T>>,
}

impl<T> Piecewise<T> {
    pub fn constant(v: T) -> Self {
        Self { default: v, segments: Vec::new() }
    }

    pub fn at(&self, x: f64) -> &T {
        self.segments.iter().rev().find(|s| x >= s.lo && x <= s.hi).map_or(&self.default, |s| &s.value)
    }

    /// Pieces of `[xl, xr]` on which the data is constant, as `(length fraction, value)`.
    pub fn pieces(&self, xl: f64, xr: f64) -> Vec<(f64, &T)> {
        let mut cuts = vec![xl, xr];
        for s in &self.segments {
            for c in [s.lo, s.hi] {
                if c > xl && c < xr {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let len = xr - xl;
        cuts.windows(2).map(|w| ((w[1] - w[0]) / len, self.at(0.5 * (w[0] + w[1])))).collect()
    }
}

impl Piecewise<f64> {
    pub fn cell_average(&self, xl: f64, xr: f64) -> f64 {
        self.pieces(xl, xr).into_iter().map(|(f, v)| f * v).sum()
    }
}

/// Ghost density split into its `μ > 0` and `μ < 0` halves.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub plus: KineticDensity,
    pub minus: KineticDensity,
}

impl BoundaryData {
    /// Half moments `(plus, minus)` up to `n`.
    pub fn half_moments(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        (self.plus.half_moments(n, Interval::PLUS), self.minus.half_moments(n, Interval::MINUS))
    }

    /// Full monomial moments up to `n`.
    pub fn full_moments(&self, n: usize) -> Vec<f64> {
        let (p, m) = self.half_moments(n);
        p.iter().zip(&m).map(|(a, b)| a + b).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub x_min: f64,
    pub x_max: f64,
    pub sigma_a: Piecewise<f64>,
    pub transport: Piecewise<f64>,
    pub source: Piecewise<f64>,
    pub initial: Piecewise<KineticDensity>,
    pub left: BoundaryData,
    pub right: BoundaryData,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    /// Time at which characteristic errors are measured.
    pub char_time: f64,
}

const ONE_BEAM: &str = "\
name = one-beam
domain = -0.5 0.5
t_end = 4
snapshots = 0.5 1 2 4
char_time = 2
[sigma_a]
default = 0
-0.1 0.2 = 10
[initial]
default = 0.0001
[left]
plus = 3*exp(3*mu + 3)/(exp(6) - 1)
minus = 0.0001
[right]
plus = 0.0001
minus = 0.0001
";

const TWO_BEAMS: &str = "\
name = two-beams
domain = -0.5 0.5
t_end = 4
snapshots = 4
char_time = 4
[sigma_a]
default = 4
[initial]
default = 0.0001
[left]
plus = 100*dirac(1)
minus = 0.0001
[right]
plus = 0.0001
minus = 100*dirac(-1)
";

const RECTANGULAR_IC: &str = "\
name = rectangular-ic
domain = 0 7
t_end = 1.5
snapshots = 1
char_time = 1
[transport]
default = 0.01
[initial]
default = 0.0001
3 4 = 10
[left]
plus = 0.0001
minus = 0.0001
[right]
plus = 0.0001
minus = 0.0001
";

const SOURCE_BEAM: &str = "\
name = source-beam
domain = 0 3
t_end = 4
snapshots = 0.5 1 2 4
char_time = 2
[sigma_a]
default = 0
0 2 = 1
[transport]
default = 10
1 2 = 2
0 1 = 0
[source]
default = 0
1 1.5 = 1
[initial]
default = 0.0001
[left]
plus = dirac(1)
minus = 0.0001
[right]
plus = 0.0001
minus = 0.0001
";

impl Scenario {
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "one-beam" => ONE_BEAM,
            "two-beams" => TWO_BEAMS,
            "rectangular-ic" => RECTANGULAR_IC,
            "source-beam" => SOURCE_BEAM,
            _ => return Err(MomentError::UnknownScenario(name.to_string())),
        };
        Self::parse(text)
    }

    /// A builtin name or a path to a config file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if BUILTIN_NAMES.contains(&name_or_path) {
            return Self::builtin(name_or_path);
        }
        let path = Path::new(name_or_path);
        if path.exists() {
            Self::load(path)
        } else {
            Err(MomentError::UnknownScenario(name_or_path.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s = ConfigParser::default().run(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MomentError::Validation(m));
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return bad(format!("invalid domain [{}, {}]", self.x_min, self.x_max));
        }
        for (what, c) in [("sigma_a", &self.sigma_a), ("transport", &self.transport), ("source", &self.source)] {
            if !(c.default.is_finite() && c.default >= 0.0) {
                return bad(format!("{what}: default must be nonnegative, got {}", c.default));
            }
            for s in &c.segments {
                self.check_segment(what, s.lo, s.hi)?;
                if !(s.value.is_finite() && s.value >= 0.0) {
                    return bad(format!("{what}: value must be nonnegative, got {}", s.value));
                }
            }
        }
        self.initial.default.validate(Interval::FULL, "initial")?;
        for s in &self.initial.segments {
            self.check_segment("initial", s.lo, s.hi)?;
            s.value.validate(Interval::FULL, "initial")?;
        }
        for (what, b) in [("left", &self.left), ("right", &self.right)] {
            b.plus.validate(Interval::PLUS, &format!("{what}.plus"))?;
            b.minus.validate(Interval::MINUS, &format!("{what}.minus"))?;
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.snapshots.is_empty() {
            return bad("at least one snapshot time is required".into());
        }
        let mut prev = 0.0;
        for &t in &self.snapshots {
            if !(t > prev && t <= self.t_end) {
                return bad(format!("snapshot times must increase inside (0, t_end], got {t}"));
            }
            prev = t;
        }
        if !(self.char_time > 0.0 && self.char_time <= self.t_end) {
            return bad(format!("char_time {} outside (0, t_end]", self.char_time));
        }
        Ok(())
    }

    fn check_segment(&self, what: &str, lo: f64, hi: f64) -> Result<()> {
        if !(lo < hi && lo >= self.x_min && hi <= self.x_max) {
            return Err(MomentError::Validation(format!(
                "{what}: segment [{lo}, {hi}] not inside the domain [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    /// Initial density moments on `interval`, averaged over the cell `[xl, xr]`.
    pub fn initial_cell_moments(&self, xl: f64, xr: f64, n: usize, interval: Interval) -> Vec<f64> {
        let mut m = vec![0.0; n + 1];
        for (f, d) in self.initial.pieces(xl, xr) {
            for (a, b) in m.iter_mut().zip(d.moments_on(n, interval)) {
                *a += f * b;
            }
        }
        m
    }

    /// Initial half moments with point masses at 0 assigned to the plus half.
    pub fn initial_cell_half_moments(&self, xl: f64, xr: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut p = vec![0.0; n + 1];
        let mut m = vec![0.0; n + 1];
        for (f, d) in self.initial.pieces(xl, xr) {
            for (a, b) in p.iter_mut().zip(d.half_moments(n, Interval::PLUS)) {
                *a += f * b;
            }
            let mut minus = d.half_moments(n, Interval::MINUS);
            // an atom at 0 would otherwise count on both sides
            for &(w, pos) in d.atoms() {
                if pos == 0.0 {
                    minus[0] -= w;
                }
            }
            for (a, b) in m.iter_mut().zip(minus) {
                *a += f * b;
            }
        }
        (p, m)
    }

    /// Config text that parses back to an equal scenario.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "domain = {} {}", self.x_min, self.x_max);
        let _ = writeln!(out, "t_end = {}", self.t_end);
        let snaps: Vec<String> = self.snapshots.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(out, "snapshots = {}", snaps.join(" "));
        let _ = writeln!(out, "char_time = {}", self.char_time);
        for (what, c) in [("sigma_a", &self.sigma_a), ("transport", &self.transport), ("source", &self.source)] {
            let _ = writeln!(out, "[{what}]\ndefault = {}", c.default);
            for s in &c.segments {
                let _ = writeln!(out, "{} {} = {}", s.lo, s.hi, s.value);
            }
        }
        let _ = writeln!(out, "[initial]\ndefault = {}", self.initial.default);
        for s in &self.initial.segments {
            let _ = writeln!(out, "{} {} = {}", s.lo, s.hi, s.value);
        }
        for (what, b) in [("left", &self.left), ("right", &self.right)] {
            let _ = writeln!(out, "[{what}]\nplus = {}\nminus = {}", b.plus, b.minus);
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    Coefficient(usize),
    Initial,
    Boundary(usize),
}

#[derive(Default)]
struct ConfigParser {
    name: Option<String>,
    domain: Option<(f64, f64)>,
    t_end: Option<f64>,
    snapshots: Option<Vec<f64>>,
    char_time: Option<f64>,
    coefficients: [Option<Piecewise<f64>>; 3],
    initial: Option<Piecewise<Option<KineticDensity>>>,
    boundaries: [(Option<KineticDensity>, Option<KineticDensity>); 2],
}

const COEFFICIENTS: [&str; 3] = ["sigma_a", "transport", "source"];
const BOUNDARIES: [&str; 2] = ["left", "right"];

fn perr<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(MomentError::Parse { line, column, message: message.into() })
}

fn parse_number(text: &str, line: usize, column: usize) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => perr(line, column, format!("malformed number '{text}'")),
    }
}

/// Whitespace-separated numbers with their columns.
fn parse_numbers(text: &str, line: usize, col0: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut rest = text;
    let mut col = col0;
    loop {
        let trimmed = rest.trim_start();
        col += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return Ok(out);
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        out.push(parse_number(&trimmed[..end], line, col)?);
        col += end;
        rest = &trimmed[end..];
    }
}

impl ConfigParser {
    fn run(mut self, text: &str) -> Result<Scenario> {
        let mut section = Section::Top;
        let mut seen_sections: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let content = content.trim_end();
            let body = &content[indent..];
            if let Some(rest) = body.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return perr(line, indent + 1, "unterminated section header");
                };
                let name = name.trim();
                if seen_sections.iter().any(|s| s == name) {
                    return perr(line, indent + 1, format!("duplicate section [{name}]"));
                }
                seen_sections.push(name.to_string());
                section = if let Some(k) = COEFFICIENTS.iter().position(|&c| c == name) {
                    Section::Coefficient(k)
                } else if let Some(k) = BOUNDARIES.iter().position(|&c| c == name) {
                    Section::Boundary(k)
                } else if name == "initial" {
                    Section::Initial
                } else {
                    return perr(line, indent + 2, format!("unknown section [{name}]"));
                };
                continue;
            }
            let Some(eq) = body.find('=') else {
                return perr(line, indent + 1, "expected 'key = value'");
            };
            let key = body[..eq].trim();
            let after = &body[eq + 1..];
            let value = after.trim_start();
            let vcol = indent + eq + 2 + (after.len() - value.len());
            if key.is_empty() {
                return perr(line, indent + 1, "missing key");
            }
            if value.is_empty() {
                return perr(line, vcol, "missing value");
            }
            match section {
                Section::Top => self.top(key, value, line, indent + 1, vcol)?,
                Section::Coefficient(k) => {
                    let c = self.coefficients[k].get_or_insert_with(|| Piecewise::constant(0.0));
                    let v = parse_number(value, line, vcol)?;
                    if key == "default" {
                        c.default = v;
                    } else {
                        let (lo, hi) = Self::range(key, line, indent + 1)?;
                        c.segments.push(Segment { lo, hi, value: v });
                    }
                }
                Section::Initial => {
                    let c = self.initial.get_or_insert_with(|| Piecewise::constant(None));
                    let d = KineticDensity::parse_at(value, line, vcol)?;
                    if key == "default" {
                        c.default = Some(d);
                    } else {
                        let (lo, hi) = Self::range(key, line, indent + 1)?;
                        c.segments.push(Segment { lo, hi, value: Some(d) });
                    }
                }
                Section::Boundary(k) => {
                    let d = KineticDensity::parse_at(value, line, vcol)?;
                    let slot = match key {
                        "plus" => &mut self.boundaries[k].0,
                        "minus" => &mut self.boundaries[k].1,
                        _ => return perr(line, indent + 1, format!("unknown key '{key}', expected plus or minus")),
                    };
                    if slot.is_some() {
                        return perr(line, indent + 1, format!("duplicate key '{key}'"));
                    }
                    *slot = Some(d);
                }
            }
        }
        self.finish()
    }

    fn range(key: &str, line: usize, col: usize) -> Result<(f64, f64)> {
        let v = parse_numbers(key, line, col)?;
        if v.len() != 2 {
            return perr(line, col, "expected 'default' or 'lo hi'");
        }
        Ok((v[0], v[1]))
    }

    fn top(&mut self, key: &str, value: &str, line: usize, kcol: usize, vcol: usize) -> Result<()> {
        let dup = |present: bool| if present { perr(line, kcol, format!("duplicate key '{key}'")) } else { Ok(()) };
        match key {
            "name" => {
                dup(self.name.is_some())?;
                self.name = Some(value.to_string());
            }
            "domain" => {
                dup(self.domain.is_some())?;
                let v = parse_numbers(value, line, vcol)?;
                if v.len() != 2 {
                    return perr(line, vcol, "domain needs two numbers");
                }
                self.domain = Some((v[0], v[1]));
            }
            "t_end" => {
                dup(self.t_end.is_some())?;
                self.t_end = Some(parse_number(value, line, vcol)?);
            }
            "snapshots" => {
                dup(self.snapshots.is_some())?;
                self.snapshots = Some(parse_numbers(value, line, vcol)?);
            }
            "char_time" => {
                dup(self.char_time.is_some())?;
                self.char_time = Some(parse_number(value, line, vcol)?);
            }
            _ => return perr(line, kcol, format!("unknown key '{key}'")),
        }
        Ok(())
    }

    fn finish(self) -> Result<Scenario> {
        let missing = |what: &str| MomentError::Validation(format!("missing {what}"));
        let (x_min, x_max) = self.domain.ok_or_else(|| missing("domain"))?;
        let t_end = self.t_end.ok_or_else(|| missing("t_end"))?;
        let snapshots = self.snapshots.unwrap_or_else(|| vec![t_end]);
        let char_time = self.char_time.unwrap_or(*snapshots.last().unwrap_or(&t_end));
        let [sigma_a, transport, source] = self.coefficients.map(|c| c.unwrap_or(Piecewise::constant(0.0)));
        let initial = self.initial.ok_or_else(|| missing("[initial] section"))?;
        let initial = Piecewise {
            default: initial.default.ok_or_else(|| missing("initial default"))?,
            segments: initial
                .segments
                .into_iter()
                .map(|s| Segment { lo: s.lo, hi: s.hi, value: s.value.expect("segments always carry a value") })
                .collect(),
        };
        let [left, right] = self.boundaries;
        let bd = |b: (Option<KineticDensity>, Option<KineticDensity>), what: &str| -> Result<BoundaryData> {
            Ok(BoundaryData {
                plus: b.0.ok_or_else(|| missing(&format!("{what}.plus")))?,
                minus: b.1.ok_or_else(|| missing(&format!("{what}.minus")))?,
            })
        };
        Ok(Scenario {
            name: self.name.unwrap_or_else(|| "custom".to_string()),
            x_min,
            x_max,
            sigma_a,
            transport,
            source,
            initial,
            left: bd(left, "left")?,
            right: bd(right, "right")?,
            t_end,
            snapshots,
            char_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MixedMomentVector;
    use crate::moments::MomentVector;
    use crate::realizability::{is_realizable_full, is_realizable_mixed};

    #[test]
    fn builtin_coefficients() {
        let s = Scenario::builtin("one-beam").unwrap();
        assert_eq!(*s.sigma_a.at(0.0), 10.0);
        assert_eq!(*s.sigma_a.at(0.3), 0.0);
        assert_eq!(*s.sigma_a.at(-0.1), 10.0);
        assert_eq!((s.x_min, s.x_max), (-0.5, 0.5));
        let s = Scenario::builtin("two-beams").unwrap();
        for x in [-0.5, 0.0, 0.4] {
            assert_eq!(*s.sigma_a.at(x), 4.0);
            assert_eq!(*s.transport.at(x), 0.0);
        }
        assert_eq!(s.left.half_moments(3).0, vec![100.0; 4]);
        assert_eq!(s.right.half_moments(2).1, vec![100.0, -100.0, 100.0]);
        let s = Scenario::builtin("source-beam").unwrap();
        assert_eq!(*s.transport.at(1.5), 2.0);
        assert_eq!(*s.transport.at(1.0), 0.0);
        assert_eq!(*s.transport.at(2.0), 2.0);
        assert_eq!(*s.transport.at(2.5), 10.0);
        assert_eq!(*s.source.at(1.2), 1.0);
        assert_eq!(*s.source.at(1.6), 0.0);
        assert_eq!(*s.sigma_a.at(2.0), 1.0);
        assert_eq!(*s.sigma_a.at(2.1), 0.0);
        let s = Scenario::builtin("rectangular-ic").unwrap();
        assert_eq!(s.initial.at(3.5).smooth_value(0.2), 10.0);
        assert_eq!(s.initial.at(5.0).smooth_value(0.2), 1e-4);
        assert_eq!(*s.transport.at(1.0), 1e-2);
        assert!(matches!(Scenario::builtin("three-beams"), Err(MomentError::UnknownScenario(_))));
    }

    #[test]
    fn builtins_round_trip() {
        for name in BUILTIN_NAMES {
            let s = Scenario::builtin(name).unwrap();
            let text = s.serialize();
            assert_eq!(Scenario::parse(&text).unwrap(), s, "{text}");
        }
    }

    #[test]
    fn hand_written_two_beams_matches_builtin() {
        let text = "
            # two beams, spelled differently
            name = two-beams
            domain = -0.5   0.5
            t_end = 4.0
            snapshots = 4
            [left]
            minus = 1e-4
            plus = 100 * dirac(1)
            [right]
            plus = 1.0e-4
            minus = 100*dirac(-1)
            [sigma_a]
            default = 4
            [initial]
            default = 0.0001
        ";
        assert_eq!(Scenario::parse(text).unwrap(), Scenario::builtin("two-beams").unwrap());
    }

    #[test]
    fn parse_and_validation_errors() {
        let base = Scenario::builtin("two-beams").unwrap().serialize();
        let bad_num = base.replace("t_end = 4", "t_end = 4.x");
        match Scenario::parse(&bad_num) {
            Err(MomentError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 9);
            }
            other => panic!("{other:?}"),
        }
        let negative = base.replace("[sigma_a]\ndefault = 4", "[sigma_a]\ndefault = -4");
        assert!(matches!(Scenario::parse(&negative), Err(MomentError::Validation(_))));
        let outside = base.replace("[sigma_a]\ndefault = 4", "[sigma_a]\ndefault = 4\n0 2 = 1");
        assert!(matches!(Scenario::parse(&outside), Err(MomentError::Validation(_))));
        let neg_density = base.replace("plus = 0.0001", "plus = mu - 0.5");
        assert!(matches!(Scenario::parse(&neg_density), Err(MomentError::Validation(_))));
        let bad_expr = base.replace("plus = 0.0001", "plus = 2*(mu");
        assert!(matches!(Scenario::parse(&bad_expr), Err(MomentError::Parse { line: 18, .. })));
        assert!(matches!(Scenario::parse("[bogus]\n"), Err(MomentError::Parse { line: 1, .. })));
        assert!(Scenario::parse(&format!("{base}t_end = 3\n")).is_err());
    }

    #[test]
    fn cell_averages() {
        let s = Scenario::builtin("one-beam").unwrap();
        assert!((s.sigma_a.cell_average(0.15, 0.25) - 5.0).abs() < 1e-14);
        let s = Scenario::builtin("rectangular-ic").unwrap();
        let m = s.initial_cell_moments(2.5, 3.5, 2, Interval::FULL);
        let expect = 0.5 * 10.0 * 2.0 + 0.5 * 1e-4 * 2.0;
        assert!((m[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn builtin_data_is_strictly_realizable() {
        for name in BUILTIN_NAMES {
            let s = Scenario::builtin(name).unwrap();
            for n in 1..=10 {
                let h = 0.05 * (s.x_max - s.x_min);
                for k in 0..20 {
                    let xl = s.x_min + k as f64 * h;
                    let full = s.initial_cell_moments(xl, xl + h, n, Interval::FULL);
                    let v = is_realizable_full(&MomentVector::full(full.clone()).unwrap(), 0.0);
                    assert!(v.realizable && v.margin > 0.0, "{name} n={n} {v:?} {full:?}");
                    let (p, m) = s.initial_cell_half_moments(xl, xl + h, n);
                    let psi0 = p[0] + m[0];
                    let u = MixedMomentVector::new(psi0, p[1..].to_vec(), m[1..].to_vec()).unwrap();
                    let v = is_realizable_mixed(&u, 0.0);
                    assert!(v.realizable, "{name} n={n} {v:?} {u:?}");
                }
            }
        }
    }
}
