//! Plain-text coefficient caches.
//!
//! ```text
//! # family: a_n
//! # digits: 50
//! # method: cnp-sum
//! # generator: xili 0.1.0
//! # param R: 300
//! 1	2.3095708966121033814310247906495291621932127152051e-2
//! ```
//!
//! Header lines are `# key: value`; every other line is `index<TAB>decimal`.
//! Decimals are written in scientific form with `digits` significant digits,
//! so a file is a deterministic function of the values and the header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{digits_to_bits, format_decimal, parse_float};
use crate::GENERATOR_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    XiR,
    An,
    LambdaLi,
    LambdaKeiper,
    Aj,
    Bn,
    Rn,
    CRow,
    SigmaP,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::XiR,
        Family::An,
        Family::LambdaLi,
        Family::LambdaKeiper,
        Family::Aj,
        Family::Bn,
        Family::Rn,
        Family::CRow,
        Family::SigmaP,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::XiR => "xi_r",
            Family::An => "a_n",
            Family::LambdaLi => "lambda_n",
            Family::LambdaKeiper => "lambda_n_keiper",
            Family::Aj => "A_j",
            Family::Bn => "b_n",
            Family::Rn => "R_n",
            Family::CRow => "C-row",
            Family::SigmaP => "Sigma_p",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == s)
    }

    /// First index of the family.
    pub fn start(&self) -> usize {
        match self {
            Family::XiR | Family::Aj | Family::Bn | Family::SigmaP => 0,
            Family::An | Family::LambdaLi | Family::LambdaKeiper | Family::Rn | Family::CRow => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheFile {
    pub family: Family,
    pub digits: u32,
    pub method: String,
    pub generator: String,
    /// Truncation and configuration parameters, sorted by key.
    pub params: BTreeMap<String, String>,
    pub rows: Vec<(usize, String)>,
}

impl CacheFile {
    /// Cache of `values` indexed from the family's natural start.
    pub fn from_floats(family: Family, digits: u32, method: &str, params: BTreeMap<String, String>, values: &[Float]) -> Self {
        let start = family.start();
        let rows = values.iter().enumerate().map(|(i, v)| (start + i, format_decimal(v, digits))).collect();
        Self {
            family,
            digits,
            method: method.to_string(),
            generator: GENERATOR_VERSION.to_string(),
            params,
            rows,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# family: {}", self.family.tag());
        let _ = writeln!(out, "# digits: {}", self.digits);
        let _ = writeln!(out, "# method: {}", self.method);
        let _ = writeln!(out, "# generator: {}", self.generator);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# param {k}: {v}");
        }
        for (i, s) in &self.rows {
            let _ = writeln!(out, "{i}\t{s}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut params = BTreeMap::new();
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix("# ") {
                let (k, v) = h
                    .split_once(": ")
                    .ok_or_else(|| Error::CacheFormat(format!("line {}: header without ': '", ln + 1)))?;
                match k.strip_prefix("param ") {
                    Some(p) => params.insert(p.to_string(), v.to_string()),
                    None => header.insert(k.to_string(), v.to_string()),
                };
                continue;
            }
            let (i, s) = line
                .split_once('\t')
                .ok_or_else(|| Error::CacheFormat(format!("line {}: expected index<TAB>decimal", ln + 1)))?;
            let i: usize = i
                .parse()
                .map_err(|_| Error::CacheFormat(format!("line {}: bad index {i:?}", ln + 1)))?;
            rows.push((i, s.to_string()));
        }
        let get = |k: &str| header.get(k).cloned().ok_or_else(|| Error::CacheFormat(format!("missing header {k}")));
        let family = Family::from_tag(&get("family")?)
            .ok_or_else(|| Error::CacheFormat(format!("unknown family {:?}", header["family"])))?;
        let digits = get("digits")?
            .parse()
            .map_err(|_| Error::CacheFormat("digits is not an integer".into()))?;
        let file = Self { family, digits, method: get("method")?, generator: get("generator")?, params, rows };
        file.check_indices()?;
        Ok(file)
    }

    fn check_indices(&self) -> Result<()> {
        for (k, (i, _)) in self.rows.iter().enumerate() {
            if *i != self.family.start() + k {
                return Err(Error::CacheFormat(format!(
                    "index {i} at row {k}; expected contiguous indices from {}",
                    self.family.start()
                )));
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Values at the declared digits plus `guard` extra digits of binary
    /// precision.
    pub fn values(&self, guard: u32) -> Result<Vec<Float>> {
        let prec = digits_to_bits(self.digits + guard);
        self.rows.iter().map(|(_, s)| parse_float(s, prec)).collect()
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }
}

/// Offline invariant checks of a cache file; returns human-readable problems.
pub fn verify_cache(file: &CacheFile) -> Result<Vec<String>> {
    file.check_indices()?;
    let v = file.values(10)?;
    let mut problems = Vec::new();
    for (i, s) in &file.rows {
        let x = parse_float(s, digits_to_bits(file.digits + 10))?;
        if format_decimal(&x, file.digits) != *s {
            problems.push(format!("row {i}: {s} does not round-trip at {} digits", file.digits));
        }
    }
    let start = file.family.start();
    let positive = |problems: &mut Vec<String>, from: usize| {
        for (k, x) in v.iter().enumerate().skip(from) {
            if *x <= 0 {
                problems.push(format!("{}[{}] = {} is not positive", file.family.tag(), start + k, x.to_f64()));
            }
        }
    };
    let increasing = |problems: &mut Vec<String>, from: usize| {
        for k in from.max(1)..v.len() {
            if v[k] <= v[k - 1] {
                problems.push(format!("{}[{}] does not exceed the previous value", file.family.tag(), start + k));
            }
        }
    };
    match file.family {
        Family::XiR | Family::Bn | Family::Rn => positive(&mut problems, 0),
        Family::An | Family::LambdaLi => {
            positive(&mut problems, 0);
            increasing(&mut problems, 1);
        }
        Family::LambdaKeiper => positive(&mut problems, 0),
        Family::SigmaP => {
            positive(&mut problems, 0);
            increasing(&mut problems, 2);
        }
        Family::Aj => {
            if v.first().is_some_and(|a0| *a0 != 1) {
                problems.push("A_0 is not 1".into());
            }
            // A_j < 0 for j ≤ 25; the sign first turns at j = 26
            for (j, x) in v.iter().enumerate().take(26).skip(1) {
                if *x >= 0 {
                    problems.push(format!("A_{j} = {} is not negative", x.to_f64()));
                }
            }
        }
        Family::CRow => {
            let n = v.len();
            let mut sum = Float::new(digits_to_bits(file.digits + 10));
            for (k, x) in v.iter().enumerate() {
                let p = k + 1;
                let admissible = (n + p) % 2 == 0;
                if admissible && *x <= 0 {
                    problems.push(format!("C_{{{n},{p}}} is not positive"));
                }
                if !admissible && !x.is_zero() {
                    problems.push(format!("C_{{{n},{p}}} should vanish"));
                }
                sum += x;
            }
            let rel = ((sum - 4.0 * n as f64) / (4.0 * n as f64)).to_f64().abs();
            if rel > 10f64.powi(-(file.digits as i32) + 3) {
                problems.push(format!("row sum differs from 4n by {rel:e} relative"));
            }
        }
    }
    Ok(problems)
}
