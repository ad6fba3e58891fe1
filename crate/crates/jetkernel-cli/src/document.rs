//! Operator and family documents: the `.dop` text format and the JSON
//! schema, plus field-name parsing shared by both.
//!
//! A `.dop` file is a small header plus one matrix literal:
//!
//! ```text
//! # comment lines start with '#'
//! nvars = 1
//! r = 2
//! field = rationals
//! D = [ h(1,1), 0 ; x1*h(1,1), h(1,1) ]
//! ```
//!
//! The JSON form carries the same data with entries as DSL strings; rational
//! numbers ride inside those strings (`"num/den"`), so nothing passes through
//! floating point.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use jetkernel_core::field::FieldSpec;
use jetkernel_core::operator::MatrixOperator;
use jetkernel_core::poly::Poly;

use crate::dsl::{parse_matrix_operator, parse_scalar_operator, print_scalar_operator};

pub const SCHEMA_VERSION: u32 = 1;

/// Parses a field name: `rationals`/`Q`, or `F<p>`/`GF(<p>)`.
pub fn parse_field(name: &str) -> anyhow::Result<FieldSpec> {
    let t = name.trim();
    if t.eq_ignore_ascii_case("rationals") || t.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Rationals);
    }
    let body = if let Some(rest) = t.strip_prefix('F').or_else(|| t.strip_prefix('f')) {
        rest.to_string()
    } else if let (Some(rest), true) = (
        t.strip_prefix("GF(").or_else(|| t.strip_prefix("gf(")),
        t.ends_with(')'),
    ) {
        rest[..rest.len() - 1].to_string()
    } else {
        bail!("unknown field {t:?}: use 'rationals', 'F<p>' or 'GF(<p>)'");
    };
    let p: u64 = body.trim().parse().with_context(|| format!("bad prime in field {t:?}"))?;
    Ok(FieldSpec::prime_field(p)?)
}

/// A matrix operator as an interchange document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub schema_version: u32,
    pub nvars: usize,
    pub r: usize,
    pub field: String,
    pub entries: Vec<Vec<String>>,
}

impl OperatorDocument {
    pub fn from_operator(d: &MatrixOperator) -> Self {
        let entries = (0..d.rank())
            .map(|i| (0..d.rank()).map(|j| print_scalar_operator(d.entry(i, j))).collect())
            .collect();
        OperatorDocument {
            schema_version: SCHEMA_VERSION,
            nvars: d.nvars(),
            r: d.rank(),
            field: d.field().name(),
            entries,
        }
    }

    pub fn to_operator(&self) -> anyhow::Result<MatrixOperator> {
        let field = parse_field(&self.field)?;
        if self.entries.len() != self.r || self.entries.iter().any(|row| row.len() != self.r) {
            bail!("entries grid is not {r} x {r}", r = self.r);
        }
        let mut rows = Vec::with_capacity(self.r);
        for (i, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(self.r);
            for (j, text) in row.iter().enumerate() {
                let op = parse_scalar_operator(text, self.nvars, field)
                    .map_err(|e| anyhow!("entry ({i},{j}): {e}"))?;
                out.push(op);
            }
            rows.push(out);
        }
        Ok(MatrixOperator::new(rows)?)
    }
}

/// Renders an operator as `.dop` text.
pub fn to_dop_text(d: &MatrixOperator) -> String {
    format!(
        "schema = {SCHEMA_VERSION}\nnvars = {}\nr = {}\nfield = {}\nD = {}\n",
        d.nvars(),
        d.rank(),
        d.field().name(),
        crate::dsl::print_matrix_operator(d)
    )
}

/// Parses `.dop` text into an operator.
pub fn from_dop_text(text: &str) -> anyhow::Result<MatrixOperator> {
    let mut nvars: Option<usize> = None;
    let mut r: Option<usize> = None;
    let mut field: Option<FieldSpec> = None;
    let mut matrix_text: Option<String> = None;

    let mut lines = text.lines().enumerate().peekable();
    while let Some((lineno, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected 'key = value', got {line:?}", lineno + 1);
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "schema" => {
                let v: u32 = value.parse().with_context(|| format!("line {}", lineno + 1))?;
                if v != SCHEMA_VERSION {
                    bail!("unsupported schema version {v} (this build reads {SCHEMA_VERSION})");
                }
            }
            "nvars" => nvars = Some(value.parse().with_context(|| format!("line {}", lineno + 1))?),
            "r" => r = Some(value.parse().with_context(|| format!("line {}", lineno + 1))?),
            "field" => field = Some(parse_field(value)?),
            "D" => {
                // The matrix literal may continue over the remaining lines.
                let mut body = value.to_string();
                for (_, rest) in lines.by_ref() {
                    let rest_t = rest.trim();
                    if rest_t.starts_with('#') {
                        continue;
                    }
                    body.push(' ');
                    body.push_str(rest_t);
                }
                matrix_text = Some(body);
            }
            other => bail!("line {}: unknown key {other:?}", lineno + 1),
        }
    }

    let nvars = nvars.ok_or_else(|| anyhow!("missing 'nvars ='"))?;
    let field = field.ok_or_else(|| anyhow!("missing 'field ='"))?;
    let body = matrix_text.ok_or_else(|| anyhow!("missing 'D ='"))?;
    let d = parse_matrix_operator(&body, nvars, field).map_err(|e| anyhow!("{e}"))?;
    if let Some(r) = r {
        if d.rank() != r {
            bail!("declared r = {r} but the matrix has rank {}", d.rank());
        }
    }
    Ok(d)
}

/// Reads an operator from a `.dop` or `.json` file, dispatching on extension.
pub fn read_operator_file(path: &Path) -> anyhow::Result<MatrixOperator> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let doc: OperatorDocument =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            doc.to_operator()
        }
        _ => from_dop_text(&text).with_context(|| format!("parsing {}", path.display())),
    }
}

/// A family specification as an interchange document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub schema_version: u32,
    /// `universal`, `constant-coefficient`, `triangular-unit`,
    /// `zero-constant-term-triangular`, or `subspace-l`.
    pub mode: String,
    pub r: usize,
    pub nvars: usize,
    pub order: usize,
    pub coefdeg: usize,
    /// Diagonal polynomials for `triangular-unit` (DSL polynomial strings).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<String>>,
}

impl FamilyDocument {
    pub fn to_spec(&self) -> anyhow::Result<jetkernel_core::family::FamilySpec> {
        use jetkernel_core::family as fam;
        match self.mode.as_str() {
            "universal" => Ok(fam::universal_family(self.r, self.nvars, self.order, self.coefdeg)?),
            "constant-coefficient" => {
                Ok(fam::constant_coefficient_family(self.r, self.nvars, self.order)?)
            }
            "triangular-unit" => {
                let texts = self
                    .diagonal
                    .as_ref()
                    .ok_or_else(|| anyhow!("triangular-unit mode needs 'diagonal' polynomials"))?;
                if texts.len() != self.r {
                    bail!("diagonal has {} entries for rank {}", texts.len(), self.r);
                }
                let diagonal = texts
                    .iter()
                    .map(|t| parse_poly(t, self.nvars, FieldSpec::Rationals))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Ok(fam::triangular_unit_family(self.nvars, diagonal, self.order, self.coefdeg)?)
            }
            "zero-constant-term-triangular" => {
                if self.nvars != 1 {
                    bail!("zero-constant-term-triangular mode is one-variable");
                }
                Ok(fam::zero_constant_term_triangular_family(self.r, self.order, self.coefdeg)?)
            }
            "subspace-l" => {
                Ok(fam::subspace_l_family(self.r, self.nvars, self.order, self.coefdeg)?)
            }
            other => bail!(
                "unknown family mode {other:?}: use universal, constant-coefficient, \
                 triangular-unit, zero-constant-term-triangular or subspace-l"
            ),
        }
    }
}

/// Parses a DSL expression that must be an order-0 operator, returning its
/// coefficient polynomial.
pub fn parse_poly(text: &str, nvars: usize, field: FieldSpec) -> anyhow::Result<Poly> {
    let op = parse_scalar_operator(text, nvars, field).map_err(|e| anyhow!("{e}"))?;
    match op.order() {
        None => Ok(Poly::zero(nvars, field)),
        Some(0) => Ok(op.coefficient(&jetkernel_core::multiindex::MultiIndex::zero(nvars))),
        Some(k) => bail!("expected a polynomial, got an operator of order {k}"),
    }
}
