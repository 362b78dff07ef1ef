//! VH-data: two symmetric alphabets `V`, `H` and a set `R ⊂ V×H×H×V` of
//! square relations, read as Wang tiles `(left, top, bottom, right)`.
//!
//! Quaternionic data are built from the ζ-twist and certified against the
//! quaternion oracle; generic data (arbitrary symbol names) are first-class.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ffield::{FieldError, FieldRecord, FieldSpec, Fq2Elem, FqElem, QuadExt};
use crate::io;
use crate::quaternion::{QuatAlgebra, QuatError};

#[derive(Debug, Error)]
pub enum DatumError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error("tau and sigma must be distinct")]
    EqualParameters,
    #[error("tau and sigma must be nonzero")]
    ZeroParameter,
    #[error("zeta_alpha(beta) is undefined when beta = 0 or N(alpha) = N(beta)")]
    ZetaUndefined,
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("{what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("symbol {0} occurs twice")]
    DuplicateSymbol(String),
    #[error("value {0} produced by the twist is not a symbol of the datum")]
    NotASymbol(String),
    #[error("invalid datum:\n{0}")]
    Invalid(ValidationReport),
    #[error("malformed datum file at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which alphabet a symbol belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    V,
    H,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::V => "V",
            Side::H => "H",
        })
    }
}

/// Field data attached to a quaternionic datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithTag {
    pub field: FieldSpec,
    pub tau: FqElem,
    pub sigma: FqElem,
    pub v_values: Vec<Fq2Elem>,
    pub h_values: Vec<Fq2Elem>,
}

/// A VH-datum with indexed symbols. `relations[i] = [a, b, c, d]` indexes
/// `V`, `H`, `H`, `V` respectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VHDatum {
    pub v_names: Vec<String>,
    pub h_names: Vec<String>,
    pub inv_v: Vec<usize>,
    pub inv_h: Vec<usize>,
    pub relations: Vec<[usize; 4]>,
    pub arith: Option<ArithTag>,
}

impl VHDatum {
    /// Checks only shapes and index ranges; use [`validate_datum`] for the axioms.
    pub fn new(
        v_names: Vec<String>,
        h_names: Vec<String>,
        inv_v: Vec<usize>,
        inv_h: Vec<usize>,
        relations: Vec<[usize; 4]>,
    ) -> Result<Self, DatumError> {
        let d = VHDatum {
            v_names,
            h_names,
            inv_v,
            inv_h,
            relations,
            arith: None,
        };
        d.check_shape()?;
        Ok(d)
    }

    fn check_shape(&self) -> Result<(), DatumError> {
        let (nv, nh) = (self.v_names.len(), self.h_names.len());
        if self.inv_v.len() != nv {
            return Err(DatumError::LengthMismatch {
                what: "inv_V",
                got: self.inv_v.len(),
                expected: nv,
            });
        }
        if self.inv_h.len() != nh {
            return Err(DatumError::LengthMismatch {
                what: "inv_H",
                got: self.inv_h.len(),
                expected: nh,
            });
        }
        for names in [&self.v_names, &self.h_names] {
            let mut seen = HashSet::new();
            for n in names.iter() {
                if !seen.insert(n) {
                    return Err(DatumError::DuplicateSymbol(n.clone()));
                }
            }
        }
        let range = |what, index: usize, size| {
            if index < size {
                Ok(())
            } else {
                Err(DatumError::IndexOutOfRange { what, index, size })
            }
        };
        for &i in &self.inv_v {
            range("inv_V", i, nv)?;
        }
        for &i in &self.inv_h {
            range("inv_H", i, nh)?;
        }
        for r in &self.relations {
            range("R (a)", r[0], nv)?;
            range("R (b)", r[1], nh)?;
            range("R (c)", r[2], nh)?;
            range("R (d)", r[3], nv)?;
        }
        if let Some(tag) = &self.arith {
            if tag.v_values.len() != nv {
                return Err(DatumError::LengthMismatch {
                    what: "V values",
                    got: tag.v_values.len(),
                    expected: nv,
                });
            }
            if tag.h_values.len() != nh {
                return Err(DatumError::LengthMismatch {
                    what: "H values",
                    got: tag.h_values.len(),
                    expected: nh,
                });
            }
        }
        Ok(())
    }

    pub fn n_v(&self) -> usize {
        self.v_names.len()
    }

    pub fn n_h(&self) -> usize {
        self.h_names.len()
    }

    pub fn name(&self, side: Side, i: usize) -> &str {
        match side {
            Side::V => &self.v_names[i],
            Side::H => &self.h_names[i],
        }
    }

    pub fn index_of(&self, side: Side, name: &str) -> Option<usize> {
        let names = match side {
            Side::V => &self.v_names,
            Side::H => &self.h_names,
        };
        names.iter().position(|n| n == name)
    }

    pub fn format_tuple(&self, t: [usize; 4]) -> String {
        format!(
            "({}, {}, {}, {})",
            self.v_names[t[0]], self.h_names[t[1]], self.h_names[t[2]], self.v_names[t[3]]
        )
    }

    /// The relation with the given `(a, b)` projection, if any.
    pub fn find_ab(&self, a: usize, b: usize) -> Option<[usize; 4]> {
        self.relations
            .iter()
            .copied()
            .find(|r| r[0] == a && r[1] == b)
    }

    /// The free group `F_2 x F_2` presented by `V = {a, b}^±`, `H = {x, y}^±`
    /// and the commuting squares `(v, h, h, v)`.
    pub fn free_product_example() -> VHDatum {
        let v: Vec<String> = ["a", "a^-1", "b", "b^-1"].map(String::from).to_vec();
        let h: Vec<String> = ["x", "x^-1", "y", "y^-1"].map(String::from).to_vec();
        let inv = vec![1, 0, 3, 2];
        let mut r = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                r.push([a, b, b, a]);
            }
        }
        VHDatum::new(v, h, inv.clone(), inv, r).expect("static example is well-formed")
    }
}

/// `ζ_α(β) = (1 + α/β) / (1 + conj(α)/conj(β))`.
pub fn zeta(ext: QuadExt<'_>, alpha: Fq2Elem, beta: Fq2Elem) -> Result<Fq2Elem, DatumError> {
    if beta == ext.zero() || ext.norm(alpha) == ext.norm(beta) {
        return Err(DatumError::ZetaUndefined);
    }
    let num = ext.add(ext.one(), ext.div(alpha, beta)?);
    let den = ext.add(ext.one(), ext.div(ext.conj(alpha), ext.conj(beta))?);
    Ok(ext.div(num, den)?)
}

/// The datum `D_{τ,σ}`: `V = N^{-1}(τ^{-1})`, `H = N^{-1}(σ^{-1})`, inverses by
/// negation and `R = {(α, β, ζ_α(β)β, ζ_β(α)α)}`.
pub fn build_quaternionic_datum(
    field: &FieldSpec,
    tau: FqElem,
    sigma: FqElem,
) -> Result<VHDatum, DatumError> {
    if tau == field.zero() || sigma == field.zero() {
        return Err(DatumError::ZeroParameter);
    }
    if tau == sigma {
        return Err(DatumError::EqualParameters);
    }
    let ext = field.ext();
    let v = ext.norm_fiber(field.inv(tau)?)?;
    let h = ext.norm_fiber(field.inv(sigma)?)?;
    let pos = |set: &[Fq2Elem], x: Fq2Elem| {
        set.iter()
            .position(|&y| y == x)
            .ok_or_else(|| DatumError::NotASymbol(ext.format(x)))
    };
    let inv_v = v
        .iter()
        .map(|&a| pos(&v, ext.neg(a)))
        .collect::<Result<Vec<_>, _>>()?;
    let inv_h = h
        .iter()
        .map(|&b| pos(&h, ext.neg(b)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut relations = Vec::with_capacity(v.len() * h.len());
    for (ia, &alpha) in v.iter().enumerate() {
        for (ib, &beta) in h.iter().enumerate() {
            let c = ext.mul(zeta(ext, alpha, beta)?, beta);
            let d = ext.mul(zeta(ext, beta, alpha)?, alpha);
            relations.push([ia, ib, pos(&h, c)?, pos(&v, d)?]);
        }
    }
    let d = VHDatum {
        v_names: v.iter().map(|&x| ext.format(x)).collect(),
        h_names: h.iter().map(|&x| ext.format(x)).collect(),
        inv_v,
        inv_h,
        relations,
        arith: Some(ArithTag {
            field: field.clone(),
            tau,
            sigma,
            v_values: v,
            h_values: h,
        }),
    };
    d.check_shape()?;
    Ok(d)
}

/// The four coordinate projections that must be bijective.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    AB,
    CD,
    AC,
    BD,
}

impl Projection {
    pub const ALL: [Projection; 4] = [
        Projection::AB,
        Projection::CD,
        Projection::AC,
        Projection::BD,
    ];

    fn coords(self) -> (usize, usize) {
        match self {
            Projection::AB => (0, 1),
            Projection::CD => (2, 3),
            Projection::AC => (0, 2),
            Projection::BD => (1, 3),
        }
    }

    fn sides(self) -> (Side, Side) {
        match self {
            Projection::AB | Projection::AC => (Side::V, Side::H),
            Projection::CD | Projection::BD => (Side::H, Side::V),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Projection::AB => "(a,b)",
            Projection::CD => "(c,d)",
            Projection::AC => "(a,c)",
            Projection::BD => "(b,d)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `inv(i) == i` or `inv(inv(i)) != i`.
    Involution { side: Side, index: usize },
    /// A companion tuple required by the closure axiom is missing.
    Closure {
        tuple: [usize; 4],
        companion: [usize; 4],
    },
    /// A tuple of the form `(a, b, b^-1, a^-1)`.
    Degenerate { tuple: [usize; 4] },
    /// A pair hit `count != 1` times by a projection.
    Projection {
        projection: Projection,
        pair: (usize, usize),
        count: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Human-readable rendering of each violation, in the same order.
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation, msg: String) {
        self.violations.push(v);
        self.messages.push(msg);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.messages.is_empty() {
            return writeln!(f, "valid");
        }
        for m in &self.messages {
            writeln!(f, "  - {m}")?;
        }
        Ok(())
    }
}

/// Checks the involution axioms, closure (1), non-degeneracy (2) and
/// projection bijectivity (3). Never fails; violations are collected.
pub fn validate_datum(d: &VHDatum) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for (side, inv) in [(Side::V, &d.inv_v), (Side::H, &d.inv_h)] {
        for (i, &j) in inv.iter().enumerate() {
            if j == i || inv[j] != i {
                rep.push(
                    Violation::Involution { side, index: i },
                    format!(
                        "inv_{side} is not a fixed-point-free involution at {}",
                        d.name(side, i)
                    ),
                );
            }
        }
    }
    if !rep.is_valid() {
        // Companion tuples are meaningless without involutions.
        return rep;
    }
    let set: HashSet<[usize; 4]> = d.relations.iter().copied().collect();
    let (iv, ih) = (&d.inv_v, &d.inv_h);
    for &t in &d.relations {
        let [a, b, c, dd] = t;
        let companions = [
            [iv[a], c, b, iv[dd]],
            [iv[dd], ih[c], ih[b], iv[a]],
            [dd, ih[b], ih[c], a],
        ];
        for comp in companions {
            if !set.contains(&comp) {
                rep.push(
                    Violation::Closure {
                        tuple: t,
                        companion: comp,
                    },
                    format!(
                        "closure: {} in R but {} is not",
                        d.format_tuple(t),
                        d.format_tuple(comp)
                    ),
                );
            }
        }
        if c == ih[b] && dd == iv[a] {
            rep.push(
                Violation::Degenerate { tuple: t },
                format!("degenerate tuple {}", d.format_tuple(t)),
            );
        }
    }
    for proj in Projection::ALL {
        let (i, j) = proj.coords();
        let (si, sj) = proj.sides();
        let size = |s| if s == Side::V { d.n_v() } else { d.n_h() };
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for x in 0..size(si) {
            for y in 0..size(sj) {
                counts.insert((x, y), 0);
            }
        }
        for t in &d.relations {
            *counts.entry((t[i], t[j])).or_default() += 1;
        }
        for (pair, count) in counts {
            if count != 1 {
                rep.push(
                    Violation::Projection {
                        projection: proj,
                        pair,
                        count,
                    },
                    format!(
                        "projection {proj}: pair ({}, {}) is hit {count} times",
                        d.name(si, pair.0),
                        d.name(sj, pair.1)
                    ),
                );
            }
        }
    }
    rep
}

/// One failed quaternion identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    pub what: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub squares_checked: usize,
    pub inverses_checked: usize,
    pub failures: Vec<RelationFailure>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Is `[1 + αF][1 + βF] = [1 + γF][1 + δF]` projectively?
pub fn square_holds(field: &FieldSpec, t: [Fq2Elem; 4]) -> Result<bool, DatumError> {
    let qa = QuatAlgebra::new(field);
    let lhs = qa.mul(&qa.one_plus(t[0]), &qa.one_plus(t[1]))?;
    let rhs = qa.mul(&qa.one_plus(t[2]), &qa.one_plus(t[3]))?;
    Ok(qa.proportional(&lhs, &rhs)?)
}

/// Certifies every square relation and every inverse relation
/// `(1 + αF)(1 - αF) ∈ F_q[t]` with the quaternion oracle.
pub fn verify_relations(d: &VHDatum) -> Result<RelationReport, DatumError> {
    let tag = d.arith.as_ref().ok_or_else(|| DatumError::Parse {
        path: "field".into(),
        message: "datum carries no field values".into(),
    })?;
    let qa = QuatAlgebra::new(&tag.field);
    let ext = qa.ext();
    let mut rep = RelationReport::default();
    for &r in &d.relations {
        let [a, b, c, dd] = r;
        let lhs = qa.mul(&qa.one_plus(tag.v_values[a]), &qa.one_plus(tag.h_values[b]))?;
        let rhs = qa.mul(
            &qa.one_plus(tag.h_values[c]),
            &qa.one_plus(tag.v_values[dd]),
        )?;
        rep.squares_checked += 1;
        if !qa.proportional(&lhs, &rhs)? {
            rep.failures.push(RelationFailure {
                what: format!("square {}", d.format_tuple(r)),
                lhs: qa.format(&lhs),
                rhs: qa.format(&rhs),
            });
        }
    }
    for &alpha in tag.v_values.iter().chain(&tag.h_values) {
        let g = qa.mul(&qa.one_plus(alpha), &qa.one_plus(ext.neg(alpha)))?;
        rep.inverses_checked += 1;
        if !qa.is_scalar(&g) {
            rep.failures.push(RelationFailure {
                what: format!("inverse of 1+({})F", ext.format(alpha)),
                lhs: qa.format(&g),
                rhs: "scalar".into(),
            });
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Wang tiles

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTile {
    pub left: String,
    pub top: String,
    pub bottom: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangTileSet {
    pub tiles: Vec<WangTile>,
}

pub fn wang_tiles(d: &VHDatum) -> WangTileSet {
    let tiles = d
        .relations
        .iter()
        .map(|&[a, b, c, dd]| WangTile {
            left: d.v_names[a].clone(),
            top: d.h_names[b].clone(),
            bottom: d.h_names[c].clone(),
            right: d.v_names[dd].clone(),
        })
        .collect();
    WangTileSet { tiles }
}

impl WangTileSet {
    fn sides(t: &WangTile) -> [&str; 4] {
        // clockwise: left, top, right, bottom
        [&t.left, &t.top, &t.right, &t.bottom]
    }

    /// Any two adjacent side colors determine the tile.
    pub fn is_four_way_deterministic(&self) -> bool {
        (0..4).all(|k| {
            let mut seen = HashSet::new();
            self.tiles.iter().all(|t| {
                let s = Self::sides(t);
                seen.insert((s[k], s[(k + 1) % 4]))
            })
        })
    }

    /// If every color occurs the same number of times at each side position,
    /// returns that number.
    pub fn color_regularity(&self) -> Option<usize> {
        let mut common = None;
        for k in 0..4 {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for t in &self.tiles {
                *counts.entry(Self::sides(t)[k]).or_default() += 1;
            }
            for &c in counts.values() {
                match common {
                    None => common = Some(c),
                    Some(x) if x != c => return None,
                    _ => {}
                }
            }
        }
        common
    }

    /// SVG with one 100x100 tile per relation, four per row. Each side is a
    /// colored triangle labeled with its symbol.
    pub fn to_svg(&self) -> String {
        const PALETTE: [&str; 12] = [
            "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
            "#bcf60c", "#fabebe", "#008080", "#e6beff",
        ];
        let mut colors: BTreeMap<&str, &str> = BTreeMap::new();
        for t in &self.tiles {
            for s in Self::sides(t) {
                let n = colors.len();
                colors.entry(s).or_insert(PALETTE[n % PALETTE.len()]);
            }
        }
        let cols = 4;
        let rows = self.tiles.len().div_ceil(cols).max(1);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
            cols * 110 + 10,
            rows * 110 + 10,
            cols * 110 + 10,
            rows * 110 + 10
        );
        for (i, t) in self.tiles.iter().enumerate() {
            let x = 10 + (i % cols) * 110;
            let y = 10 + (i / cols) * 110;
            out.push_str(&format!("  <g transform=\"translate({x},{y})\">\n"));
            // (triangle points, label position, label)
            let parts = [
                ("0,0 50,50 0,100", (14, 54), &t.left),
                ("0,0 100,0 50,50", (50, 18), &t.top),
                ("100,0 100,100 50,50", (86, 54), &t.right),
                ("0,100 100,100 50,50", (50, 92), &t.bottom),
            ];
            for (pts, (lx, ly), label) in parts {
                out.push_str(&format!(
                    "    <polygon points=\"{pts}\" fill=\"{}\" stroke=\"black\" stroke-width=\"1\"/>\n",
                    colors[label.as_str()]
                ));
                out.push_str(&format!(
                    "    <text x=\"{lx}\" y=\"{ly}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
                    xml_escape(label)
                ));
            }
            out.push_str("    <rect x=\"0\" y=\"0\" width=\"100\" height=\"100\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n");
            out.push_str("  </g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn export_tiles(ts: &WangTileSet, path: &Path) -> Result<(), DatumError> {
    io::write_atomic(path, ts.to_svg().as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Datum files

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Symbols {
    Values(Vec<Fq2Elem>),
    Names(Vec<String>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<FieldRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<u32>,
    #[serde(rename = "V")]
    v: Symbols,
    #[serde(rename = "H")]
    h: Symbols,
    #[serde(rename = "inv_V")]
    inv_v: Vec<usize>,
    #[serde(rename = "inv_H")]
    inv_h: Vec<usize>,
    #[serde(rename = "R")]
    r: Vec<[usize; 4]>,
}

/// Canonical JSON text of a datum, with an optional provenance header.
/// Field elements (`tau`, `sigma`, the `[u, v]` pairs) are integer codes.
pub fn datum_to_json(d: &VHDatum, config: Option<&Value>) -> String {
    let file = DatumFile {
        config: config.cloned(),
        field: d.arith.as_ref().map(|t| FieldRecord::from(&t.field)),
        tau: d.arith.as_ref().map(|t| t.tau.code()),
        sigma: d.arith.as_ref().map(|t| t.sigma.code()),
        v: match &d.arith {
            Some(t) => Symbols::Values(t.v_values.clone()),
            None => Symbols::Names(d.v_names.clone()),
        },
        h: match &d.arith {
            Some(t) => Symbols::Values(t.h_values.clone()),
            None => Symbols::Names(d.h_names.clone()),
        },
        inv_v: d.inv_v.clone(),
        inv_h: d.inv_h.clone(),
        r: d.relations.clone(),
    };
    io::to_json_string(&serde_json::to_value(file).expect("datum serializes"))
}

fn parse_err(path: &str, message: impl fmt::Display) -> DatumError {
    DatumError::Parse {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// Parses and validates a datum file; returns the datum and its header.
pub fn datum_from_json(text: &str) -> Result<(VHDatum, Option<Value>), DatumError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: DatumFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_err(&path, e.into_inner())
    })?;
    let d = match (&file.field, file.tau, file.sigma, file.v, file.h) {
        (Some(rec), Some(tau), Some(sigma), Symbols::Values(v), Symbols::Values(h)) => {
            let field = FieldSpec::try_from(rec).map_err(|e| parse_err("field", e))?;
            let ext = field.ext();
            let tau = field.elem(tau).map_err(|e| parse_err("tau", e))?;
            let sigma = field.elem(sigma).map_err(|e| parse_err("sigma", e))?;
            for (what, vals) in [("V", &v), ("H", &h)] {
                if let Some(x) = vals.iter().find(|&&x| !ext.is_valid(x)) {
                    return Err(parse_err(what, format!("{x:?} is not an element of F_q[Z]")));
                }
            }
            let d = VHDatum {
                v_names: v.iter().map(|&x| ext.format(x)).collect(),
                h_names: h.iter().map(|&x| ext.format(x)).collect(),
                inv_v: file.inv_v,
                inv_h: file.inv_h,
                relations: file.r,
                arith: Some(ArithTag { field: field.clone(), tau, sigma, v_values: v, h_values: h }),
            };
            d.check_shape()?;
            d
        }
        (None, None, None, Symbols::Names(v), Symbols::Names(h)) => {
            VHDatum::new(v, h, file.inv_v, file.inv_h, file.r)?
        }
        _ => {
            return Err(parse_err(
                "",
                "expected either field/tau/sigma with [u, v] symbols, or plain string symbols without field data",
            ))
        }
    };
    let rep = validate_datum(&d);
    if !rep.is_valid() {
        return Err(DatumError::Invalid(rep));
    }
    Ok((d, file.config))
}

pub fn read_datum(path: &Path) -> Result<(VHDatum, Option<Value>), DatumError> {
    datum_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_datum(path: &Path, d: &VHDatum, config: Option<&Value>) -> Result<(), DatumError> {
    io::write_atomic(path, datum_to_json(d, config).as_bytes())?;
    Ok(())
}
