//! Typed access to config values, with errors naming the field.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::str::FromStr;

use qkelly::entropy::ProbVector;
use qkelly::helper::OptimizerConfig;
use qkelly::kelly::OddsVector;
use qkelly::qmath::{parse_matrix_literal, ComplexMatrix, DensityMatrix, validate_density};
use qkelly::roulette::Measurement;
use qkelly::sim::SimConfig;
use qkelly::states::{self, BuiltinKind};

use crate::config::{Entry, Ini};
use crate::error::{CliError, CliResult};

/// Odds as written in a config, before the outcome count is known.
#[derive(Debug, Clone, PartialEq)]
pub enum OddsSpec {
    Uniform(f64),
    List(Vec<f64>),
}

impl OddsSpec {
    pub fn resolve(&self, n: usize, path: &str) -> CliResult<OddsVector> {
        let odds = match self {
            OddsSpec::Uniform(o) => OddsVector::uniform(*o, n),
            OddsSpec::List(v) => {
                if v.len() != n {
                    return Err(CliError::validation(
                        path,
                        format!("{} odds given for {n} outcomes", v.len()),
                    ));
                }
                OddsVector::new(v.clone())
            }
        };
        odds.map_err(|e| CliError::lib(path, e))
    }
}

pub struct Fields<'a> {
    ini: &'a Ini,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Fields<'a> {
    pub fn new(ini: &'a Ini) -> Self {
        Self {
            ini,
            used: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn entry(&self, key: &str) -> Option<&'a Entry> {
        let e = self.ini.get(key);
        if e.is_some() {
            self.used.borrow_mut().insert(key.to_string());
        }
        e
    }

    pub fn has(&self, key: &str) -> bool {
        self.ini.get(key).is_some()
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.ini.has_section(section)
    }

    pub fn require(&self, key: &str) -> CliResult<&'a Entry> {
        self.entry(key)
            .ok_or_else(|| CliError::validation(key, "required field is missing"))
    }

    pub fn text(&self, key: &str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| CliError::validation(key, format!("cannot parse `{}`", e.value))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        let v: f64 = self.parse_or(key, default)?;
        if !v.is_finite() {
            return Err(CliError::validation(key, "value must be finite"));
        }
        Ok(v)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.text(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(other) => Err(CliError::validation(key, format!("expected true or false, found `{other}`"))),
        }
    }

    /// Numbers separated by commas and/or whitespace.
    pub fn f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        parse_numbers(&e.value).map(Some).map_err(|m| CliError::validation(key, m))
    }

    pub fn usize_list(&self, key: &str) -> CliResult<Option<Vec<usize>>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        e.value
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| format!("`{t}` is not a nonnegative integer")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|m| CliError::validation(key, m))
    }

    pub fn prob_vector(&self, key: &str) -> CliResult<ProbVector> {
        let v = self
            .f64_list(key)?
            .ok_or_else(|| CliError::validation(key, "required field is missing"))?;
        ProbVector::new(v).map_err(|e| CliError::lib(key, e))
    }

    /// `uniform:o` or an explicit list.
    pub fn odds_spec(&self, key: &str) -> CliResult<Option<OddsSpec>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        if let Some(rest) = e.value.strip_prefix("uniform:") {
            let o: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::validation(key, format!("cannot parse odds `{rest}`")))?;
            return Ok(Some(OddsSpec::Uniform(o)));
        }
        parse_numbers(&e.value)
            .map(|v| Some(OddsSpec::List(v)))
            .map_err(|m| CliError::validation(key, m))
    }

    pub fn odds(&self, key: &str, n: usize, default: OddsSpec) -> CliResult<OddsVector> {
        self.odds_spec(key)?.unwrap_or(default).resolve(n, key)
    }

    pub fn matrix(&self, key: &str) -> CliResult<ComplexMatrix> {
        let e = self.require(key)?;
        parse_literal_at(&e.value, e.line, key)
    }

    /// Matrix literals separated by lines holding only `---`.
    pub fn matrix_blocks(&self, key: &str) -> CliResult<Vec<ComplexMatrix>> {
        let e = self.require(key)?;
        let mut blocks = Vec::new();
        let mut current = String::new();
        let mut start = 1;
        for (idx, line) in e.value.lines().enumerate() {
            if line.trim() == "---" {
                blocks.push((start, std::mem::take(&mut current)));
                start = idx + 2;
            } else {
                current.push_str(line);
                current.push('\n');
            }
        }
        blocks.push((start, current));
        blocks
            .into_iter()
            .map(|(offset, text)| parse_literal_at(&text, shift(e.line, offset), key))
            .collect()
    }

    /// Real rows, one per line.
    pub fn real_rows(&self, key: &str) -> CliResult<Vec<Vec<f64>>> {
        let e = self.require(key)?;
        let mut rows = Vec::new();
        for (idx, line) in e.value.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = parse_numbers(line)
                .map_err(|m| CliError::validation(key, format!("{}: {m}", line_label(e.line, idx + 1))))?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::validation(key, "no rows given"));
        }
        Ok(rows)
    }

    /// `[section]` holding `builtin = name` or `matrix = literal`, with
    /// optional `dims`.
    pub fn state(&self, section: &str) -> CliResult<(DensityMatrix, Vec<usize>)> {
        let builtin_key = format!("{section}.builtin");
        let matrix_key = format!("{section}.matrix");
        let dims_key = format!("{section}.dims");
        let dims = self.usize_list(&dims_key)?;
        let (rho, default_dims) = match (self.text(&builtin_key), self.has(&matrix_key)) {
            (Some(_), true) => {
                return Err(CliError::validation(section, "give either `builtin` or `matrix`, not both"));
            }
            (Some(name), false) => {
                let b = states::find_builtin(name)
                    .ok_or_else(|| CliError::validation(&builtin_key, format!("unknown builtin `{name}`")))?;
                if b.kind != BuiltinKind::State {
                    return Err(CliError::validation(
                        &builtin_key,
                        format!("`{name}` is a classical scenario, not a quantum state"),
                    ));
                }
                (states::builtin_state(name).expect("listed builtin"), b.dims.to_vec())
            }
            (None, true) => {
                let m = self.matrix(&matrix_key)?;
                if !m.is_square() {
                    return Err(CliError::validation(
                        &matrix_key,
                        format!("matrix is {}x{}, expected square", m.rows(), m.cols()),
                    ));
                }
                let rho = validate_density(&m).map_err(|e| CliError::lib(&matrix_key, e))?;
                let d = rho.dim();
                (rho, vec![d])
            }
            (None, false) => {
                return Err(CliError::validation(section, "missing `builtin` or `matrix`"));
            }
        };
        let dims = dims.unwrap_or(default_dims);
        if dims.contains(&0) || dims.iter().product::<usize>() != rho.dim() {
            return Err(CliError::validation(
                &dims_key,
                format!("dims {dims:?} do not multiply to the state dimension {}", rho.dim()),
            ));
        }
        Ok((rho, dims))
    }

    /// `[section]` with `kind` one of computational, trivial, hadamard,
    /// unitary (columns of `unitary`), projectors or povm (`operators`).
    pub fn measurement(&self, section: &str, dim: usize, default_kind: &str) -> CliResult<Measurement> {
        let kind_key = format!("{section}.kind");
        let kind = self.text(&kind_key).unwrap_or(default_kind);
        let m = match kind {
            "computational" => Measurement::computational(dim),
            "trivial" => Measurement::trivial(dim),
            "hadamard" => {
                if dim != 2 {
                    return Err(CliError::validation(&kind_key, format!("hadamard basis needs dimension 2, not {dim}")));
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let u = ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2");
                Measurement::from_basis(&u).expect("unitary")
            }
            "unitary" => {
                let key = format!("{section}.unitary");
                Measurement::from_basis(&self.matrix(&key)?).map_err(|e| CliError::lib(&key, e))?
            }
            "projectors" | "povm" => {
                let key = format!("{section}.operators");
                let ops = self.matrix_blocks(&key)?;
                let m = if kind == "povm" {
                    Measurement::povm(ops)
                } else {
                    Measurement::projective(ops)
                };
                m.map_err(|e| CliError::lib(&key, e))?
            }
            other => {
                return Err(CliError::validation(
                    &kind_key,
                    format!("unknown measurement kind `{other}` (expected computational, trivial, hadamard, unitary, projectors or povm)"),
                ));
            }
        };
        if m.dim() != dim {
            return Err(CliError::validation(
                section,
                format!("measurement acts on dimension {}, expected {dim}", m.dim()),
            ));
        }
        Ok(m)
    }

    pub fn optimizer(&self, seed: u64) -> CliResult<OptimizerConfig> {
        let d = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            restarts: self.parse_or("optimizer.restarts", d.restarts)?,
            max_iterations: self.parse_or("optimizer.max_iterations", d.max_iterations)?,
            diameter_tol: self.f64_or("optimizer.diameter_tol", d.diameter_tol)?,
            initial_step: self.f64_or("optimizer.initial_step", d.initial_step)?,
            seeded_step: self.f64_or("optimizer.seeded_step", d.seeded_step)?,
            grid_seed: self.bool_or("optimizer.grid_seed", d.grid_seed)?,
            require_convergence: self.bool_or("optimizer.require_convergence", d.require_convergence)?,
            seed,
        };
        if cfg.restarts == 0 {
            return Err(CliError::validation("optimizer.restarts", "must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn sim(&self, seed: u64) -> CliResult<SimConfig> {
        let num_gambles = self.parse_or("sim.num_gambles", 100_000usize)?;
        let cfg = SimConfig {
            num_gambles,
            seed,
            trials: self.parse_or("sim.trials", 1usize)?,
            log_every: self.parse_or("sim.log_every", (num_gambles / 1000).max(1))?,
        };
        cfg.validate().map_err(|e| CliError::lib("sim", e))?;
        Ok(cfg)
    }

    /// Fails on keys that no part of the experiment read.
    pub fn finish(&self) -> CliResult<()> {
        let used = self.used.borrow();
        match self.ini.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(CliError::validation(k, "unknown or unused field for this experiment")),
            None => Ok(()),
        }
    }
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    let v = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("`{t}` is not a finite number")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("no numbers given".into());
    }
    Ok(v)
}

/// File line of line `k` (1-based) of a value whose key sits on `key_line`.
fn shift(key_line: usize, k: usize) -> usize {
    if key_line == 0 {
        0
    } else {
        key_line + k - 1
    }
}

fn line_label(key_line: usize, k: usize) -> String {
    if key_line == 0 {
        format!("override line {k}")
    } else {
        format!("line {}", key_line + k - 1)
    }
}

fn parse_literal_at(text: &str, key_line: usize, key: &str) -> CliResult<ComplexMatrix> {
    parse_matrix_literal(text).map_err(|e| match e {
        qkelly::Error::Parse { line, message } => {
            CliError::validation(key, format!("{}: {message}", line_label(key_line, line)))
        }
        other => CliError::lib(key, other),
    })
}
