//! Interchange formats: the JSON bank file, coefficient-table CSV (with an
//! origin anchor and optional global scale), sparse grid CSV, and PGM
//! images. Rationals are serialized as strings so round trips are exact.

use std::collections::BTreeMap;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{BankMask, BankSymmetryKind, FilterBank, MaskMeta, MaskPair};
use crate::gauss::{format_rat, parse_rat, rat_to_f64, GaussRat, Rat};
use crate::lattice::DilationContext;
use crate::laurent::{Key, LaurentPoly};
use crate::mat::{HalfVec, IMat};
use crate::verify::SymmetryDescriptor;

pub const BANK_FORMAT_VERSION: &str = "symwave-bank/1";

#[derive(Serialize, Deserialize)]
struct CoeffDto {
    k: Vec<i64>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct MaskMetaDto {
    sum_rule: usize,
    vanishing_moments: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry: Option<SymmetryDescriptor>,
}

#[derive(Serialize, Deserialize)]
struct MaskDto {
    role: String,
    dual: bool,
    index: usize,
    sigma: Vec<String>,
    scale_pow_m_half: i32,
    coeffs: Vec<CoeffDto>,
    meta: MaskMetaDto,
}

#[derive(Serialize, Deserialize)]
struct SymmetryDto {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
struct BankDto {
    version: String,
    dim: usize,
    dilation: Vec<i64>,
    digits: Vec<Vec<i64>>,
    center: Vec<String>,
    symmetry: SymmetryDto,
    masks: Vec<MaskDto>,
    provenance: String,
}

fn poly_to_dto(p: &LaurentPoly, role: &str, dual: bool, index: usize, meta: &MaskMeta) -> MaskDto {
    let coeffs = p
        .keys_graded_lex()
        .into_iter()
        .map(|k| {
            let c = p.coeff(&k);
            CoeffDto {
                k,
                re: format_rat(&c.re),
                im: format_rat(&c.im),
            }
        })
        .collect();
    MaskDto {
        role: role.to_string(),
        dual,
        index,
        sigma: p
            .sigma()
            .iter()
            .map(|&s| if s { "1/2".to_string() } else { "0".to_string() })
            .collect(),
        scale_pow_m_half: if p.root().is_some() { 1 } else { 0 },
        coeffs,
        meta: MaskMetaDto {
            sum_rule: meta.sum_rule,
            vanishing_moments: meta.vanishing_moments,
            symmetry: meta.symmetry.clone(),
        },
    }
}

fn dto_to_poly(dto: &MaskDto, dim: usize, m: u64) -> Result<LaurentPoly> {
    let sigma: Vec<bool> = dto
        .sigma
        .iter()
        .map(|s| match s.as_str() {
            "0" => Ok(false),
            "1/2" => Ok(true),
            other => Err(Error::BadBankFile(format!("bad sigma entry {other:?}"))),
        })
        .collect::<Result<_>>()?;
    if sigma.len() != dim {
        return Err(Error::BadBankFile("sigma dimension mismatch".into()));
    }
    let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
    for c in &dto.coeffs {
        if c.k.len() != dim {
            return Err(Error::BadBankFile("coefficient key dimension mismatch".into()));
        }
        let val = GaussRat::new(parse_rat(&c.re)?, parse_rat(&c.im)?);
        if val.is_zero() {
            return Err(Error::BadBankFile("zero coefficient serialized".into()));
        }
        if coeffs.insert(c.k.clone(), val).is_some() {
            return Err(Error::BadBankFile("duplicate coefficient key".into()));
        }
    }
    let mut p = LaurentPoly::from_coeffs(dim, sigma, None, coeffs);
    if dto.scale_pow_m_half != 0 {
        p = p.mul_sqrt(m, dto.scale_pow_m_half);
    }
    Ok(p)
}

fn kind_to_dto(kind: &BankSymmetryKind) -> SymmetryDto {
    match kind {
        BankSymmetryKind::PointA => SymmetryDto {
            kind: "point-a".into(),
            group: None,
        },
        BankSymmetryKind::PointB => SymmetryDto {
            kind: "point-b".into(),
            group: None,
        },
        BankSymmetryKind::Axial => SymmetryDto {
            kind: "axial".into(),
            group: None,
        },
        BankSymmetryKind::Group(els) => SymmetryDto {
            kind: "group".into(),
            group: Some(els.iter().map(|e| e.a.clone()).collect()),
        },
    }
}

/// Serialize a bank to the versioned JSON format.
pub fn bank_to_json(bank: &FilterBank) -> String {
    let mut masks = Vec::new();
    masks.push(poly_to_dto(
        &bank.refinable.primal.poly,
        "refinable",
        false,
        0,
        &bank.refinable.primal.meta,
    ));
    masks.push(poly_to_dto(
        &bank.refinable.dual.poly,
        "refinable",
        true,
        0,
        &bank.refinable.dual.meta,
    ));
    for (i, w) in bank.wavelets.iter().enumerate() {
        masks.push(poly_to_dto(&w.primal.poly, "wavelet", false, i + 1, &w.primal.meta));
        masks.push(poly_to_dto(&w.dual.poly, "wavelet", true, i + 1, &w.dual.meta));
    }
    let dto = BankDto {
        version: BANK_FORMAT_VERSION.into(),
        dim: bank.ctx.dim(),
        dilation: bank.ctx.mat.a.clone(),
        digits: bank.ctx.digits.clone(),
        center: bank.center.as_rats().iter().map(format_rat).collect(),
        symmetry: kind_to_dto(&bank.kind),
        masks,
        provenance: bank.provenance.clone(),
    };
    serde_json::to_string_pretty(&dto).expect("bank serializes")
}

/// Parse and validate a bank file; the polyphase identity is re-checked by
/// the caller (see `extension::bank_identity_holds`).
pub fn bank_from_json(s: &str) -> Result<FilterBank> {
    let dto: BankDto = serde_json::from_str(s)?;
    if dto.version != BANK_FORMAT_VERSION {
        return Err(Error::BadBankFile(format!(
            "unsupported version {:?}",
            dto.version
        )));
    }
    let d = dto.dim;
    if dto.dilation.len() != d * d {
        return Err(Error::BadBankFile("dilation entry count".into()));
    }
    let mat = IMat::new(d, dto.dilation.clone());
    let ctx = DilationContext::with_digits(mat, dto.digits.clone())?;
    let center_rats: Vec<Rat> = dto
        .center
        .iter()
        .map(|s| parse_rat(s))
        .collect::<Result<_>>()?;
    let center = HalfVec::from_rats(&center_rats)?;
    let kind = match dto.symmetry.kind.as_str() {
        "point-a" => BankSymmetryKind::PointA,
        "point-b" => BankSymmetryKind::PointB,
        "axial" => BankSymmetryKind::Axial,
        "group" => {
            let els = dto
                .symmetry
                .group
                .as_ref()
                .ok_or_else(|| Error::BadBankFile("group symmetry without elements".into()))?
                .iter()
                .map(|a| IMat::new(d, a.clone()))
                .collect();
            BankSymmetryKind::Group(els)
        }
        other => return Err(Error::BadBankFile(format!("unknown symmetry {other:?}"))),
    };
    let mut refinable_primal = None;
    let mut refinable_dual = None;
    let mut wavelets: BTreeMap<usize, (Option<BankMask>, Option<BankMask>)> = BTreeMap::new();
    for mask in &dto.masks {
        let poly = dto_to_poly(mask, d, ctx.m as u64)?;
        let bm = BankMask {
            poly,
            meta: MaskMeta {
                sum_rule: mask.meta.sum_rule,
                vanishing_moments: mask.meta.vanishing_moments,
                symmetry: mask.meta.symmetry.clone(),
            },
        };
        match (mask.role.as_str(), mask.dual) {
            ("refinable", false) => refinable_primal = Some(bm),
            ("refinable", true) => refinable_dual = Some(bm),
            ("wavelet", dual) => {
                let slot = wavelets.entry(mask.index).or_insert((None, None));
                if dual {
                    slot.1 = Some(bm);
                } else {
                    slot.0 = Some(bm);
                }
            }
            (other, _) => {
                return Err(Error::BadBankFile(format!("unknown mask role {other:?}")))
            }
        }
    }
    let refinable = MaskPair {
        primal: refinable_primal
            .ok_or_else(|| Error::BadBankFile("missing refinable mask".into()))?,
        dual: refinable_dual
            .ok_or_else(|| Error::BadBankFile("missing dual refinable mask".into()))?,
    };
    let mut pairs = Vec::new();
    for (idx, (p, dl)) in wavelets {
        let primal = p.ok_or_else(|| Error::BadBankFile(format!("missing wavelet {idx}")))?;
        let dual =
            dl.ok_or_else(|| Error::BadBankFile(format!("missing dual wavelet {idx}")))?;
        pairs.push(MaskPair { primal, dual });
    }
    Ok(FilterBank {
        ctx,
        kind,
        center,
        refinable,
        wavelets: pairs,
        provenance: dto.provenance,
    })
}

pub fn save_bank(bank: &FilterBank, path: &Path) -> Result<()> {
    std::fs::write(path, bank_to_json(bank))?;
    Ok(())
}

pub fn load_bank(path: &Path) -> Result<FilterBank> {
    let s = std::fs::read_to_string(path)?;
    bank_from_json(&s)
}

/// A dense coefficient table with an origin anchor, as stored in CSV.
/// Row index increases with the second coordinate; column index with the
/// first. Directives: `# origin: col,row` locates the (0,...,0) cell,
/// `# scale: p/q` and `# scale_pow_m_half: 0|1` set a global factor.
pub struct MaskTable {
    pub rows: Vec<Vec<Rat>>,
    pub origin_col: usize,
    pub origin_row: usize,
    pub scale: Rat,
    pub scale_pow_m_half: i32,
}

impl MaskTable {
    pub fn parse(text: &str) -> Result<MaskTable> {
        let mut rows = Vec::new();
        let mut origin = (0usize, 0usize);
        let mut scale = Rat::from_integer(1.into());
        let mut pow = 0i32;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("origin:") {
                    let parts: Vec<&str> = v.split(',').map(|s| s.trim()).collect();
                    if parts.len() != 2 {
                        return Err(Error::Parse("origin needs col,row".into()));
                    }
                    origin = (
                        parts[0]
                            .parse()
                            .map_err(|_| Error::Parse("bad origin column".into()))?,
                        parts[1]
                            .parse()
                            .map_err(|_| Error::Parse("bad origin row".into()))?,
                    );
                } else if let Some(v) = rest.strip_prefix("scale:") {
                    scale = parse_rat(v.trim())?;
                } else if let Some(v) = rest.strip_prefix("scale_pow_m_half:") {
                    pow = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse("bad scale power".into()))?;
                }
                continue;
            }
            let row: Vec<Rat> = line
                .split(',')
                .map(|cell| parse_rat(cell.trim()))
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty mask table".into()));
        }
        let w = rows[0].len();
        if rows.iter().any(|r| r.len() != w) {
            return Err(Error::Parse("ragged mask table".into()));
        }
        Ok(MaskTable {
            rows,
            origin_col: origin.0,
            origin_row: origin.1,
            scale,
            scale_pow_m_half: pow,
        })
    }

    pub fn load(path: &Path) -> Result<MaskTable> {
        let s = std::fs::read_to_string(path)?;
        Self::parse(&s)
    }

    /// Convert to a polynomial. One row means one dimension; otherwise the
    /// column offset is the first coordinate and the row offset the second.
    pub fn to_poly(&self, m: u64) -> LaurentPoly {
        let one_dim = self.rows.len() == 1 && self.origin_row == 0;
        let dim = if one_dim { 1 } else { 2 };
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let val = GaussRat::real(v * &self.scale);
                let key: Key = if one_dim {
                    vec![c as i64 - self.origin_col as i64]
                } else {
                    vec![
                        c as i64 - self.origin_col as i64,
                        r as i64 - self.origin_row as i64,
                    ]
                };
                coeffs.insert(key, val);
            }
        }
        let mut p = LaurentPoly::from_coeffs(dim, vec![false; dim], None, coeffs);
        if self.scale_pow_m_half != 0 {
            p = p.mul_sqrt(m, self.scale_pow_m_half);
        }
        p
    }
}

/// Sparse grid CSV: one line per sample, `k1,...,kd,value`. Exact rationals
/// in rational mode, decimals in float mode.
pub fn grid_to_csv_exact(grid: &LaurentPoly) -> String {
    let mut out = format!("# dim: {}\n", grid.dim());
    if let Some(b) = grid.root() {
        out.push_str(&format!("# scale_sqrt: {b}\n"));
    }
    for k in grid.keys_graded_lex() {
        let c = grid.coeff(&k);
        let coords: Vec<String> = k.iter().map(|x| x.to_string()).collect();
        if c.im.is_zero() {
            out.push_str(&format!("{},{}\n", coords.join(","), format_rat(&c.re)));
        } else {
            out.push_str(&format!(
                "{},{},{}\n",
                coords.join(","),
                format_rat(&c.re),
                format_rat(&c.im)
            ));
        }
    }
    out
}

pub fn grid_from_csv_exact(text: &str) -> Result<LaurentPoly> {
    let mut dim = None;
    let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
    let mut root: Option<u64> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("dim:") {
                dim = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse("bad dim".into()))?,
                );
            } else if let Some(v) = rest.strip_prefix("scale_sqrt:") {
                root = Some(
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse("bad scale".into()))?,
                );
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(|s| s.trim()).collect();
        let d = dim.ok_or_else(|| Error::Parse("grid csv needs a dim header".into()))?;
        if parts.len() != d + 1 && parts.len() != d + 2 {
            return Err(Error::Parse(format!("bad grid line {line:?}")));
        }
        let key: Key = parts[..d]
            .iter()
            .map(|s| s.parse::<i64>().map_err(|_| Error::Parse("bad index".into())))
            .collect::<Result<_>>()?;
        let re = parse_rat(parts[d])?;
        let im = if parts.len() == d + 2 {
            parse_rat(parts[d + 1])?
        } else {
            Rat::zero()
        };
        coeffs.insert(key, GaussRat::new(re, im));
    }
    let d = dim.ok_or_else(|| Error::Parse("grid csv needs a dim header".into()))?;
    let mut p = LaurentPoly::from_coeffs(d, vec![false; d], None, coeffs);
    if let Some(b) = root {
        p = p.mul_sqrt(b, 1);
    }
    Ok(p)
}

pub fn grid_to_csv_f64(grid: &std::collections::HashMap<Key, f64>, dim: usize) -> String {
    let mut keys: Vec<&Key> = grid.keys().collect();
    keys.sort();
    let mut out = format!("# dim: {dim}\n");
    for k in keys {
        let coords: Vec<String> = k.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{},{:.17e}\n", coords.join(","), grid[k]));
    }
    out
}

/// Read an 8- or 16-bit PGM (P2 or P5) as a 2-D grid; pixel (row, col)
/// becomes the sample at key (col, row).
pub fn read_pgm(path: &Path) -> Result<(LaurentPoly, u16)> {
    let mut file = BufReader::new(std::fs::File::open(path)?);
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut token = || -> Result<String> {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated pgm".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let w: usize = token()?
        .parse()
        .map_err(|_| Error::Parse("bad pgm width".into()))?;
    let h: usize = token()?
        .parse()
        .map_err(|_| Error::Parse("bad pgm height".into()))?;
    let maxval: u32 = token()?
        .parse()
        .map_err(|_| Error::Parse("bad pgm maxval".into()))?;
    let mut samples: Vec<u32> = Vec::with_capacity(w * h);
    match magic.as_str() {
        "P2" => {
            for _ in 0..w * h {
                samples.push(
                    token()?
                        .parse()
                        .map_err(|_| Error::Parse("bad pgm sample".into()))?,
                );
            }
        }
        "P5" => {
            pos += 1; // single whitespace after maxval
            if maxval < 256 {
                for i in 0..w * h {
                    samples.push(bytes[pos + i] as u32);
                }
            } else {
                for i in 0..w * h {
                    samples.push(
                        ((bytes[pos + 2 * i] as u32) << 8) | bytes[pos + 2 * i + 1] as u32,
                    );
                }
            }
        }
        other => return Err(Error::Parse(format!("unsupported pgm magic {other:?}"))),
    }
    let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
    for r in 0..h {
        for c in 0..w {
            let v = samples[r * w + c] as i64;
            if v != 0 {
                coeffs.insert(vec![c as i64, r as i64], GaussRat::from_i64(v));
            }
        }
    }
    Ok((
        LaurentPoly::from_coeffs(2, vec![false, false], None, coeffs),
        maxval as u16,
    ))
}

/// Write a 2-D grid as binary PGM over its bounding box, clamping to the
/// sample range.
pub fn write_pgm(grid: &LaurentPoly, maxval: u16, path: &Path) -> Result<()> {
    let (lo, hi) = grid
        .support_box_twice()
        .map(|(lo, hi)| {
            (
                lo.iter().map(|x| x / 2).collect::<Vec<i64>>(),
                hi.iter().map(|x| x / 2).collect::<Vec<i64>>(),
            )
        })
        .unwrap_or((vec![0, 0], vec![0, 0]));
    let w = (hi[0] - lo[0] + 1) as usize;
    let h = (hi[1] - lo[1] + 1) as usize;
    let mut out = Vec::new();
    write!(out, "P5\n{w} {h}\n{maxval}\n")?;
    let wide = maxval >= 256;
    for r in 0..h {
        for c in 0..w {
            let key = vec![lo[0] + c as i64, lo[1] + r as i64];
            let v = rat_to_f64(&grid.coeff(&key).re).round();
            let v = v.clamp(0.0, maxval as f64) as u32;
            if wide {
                out.push((v >> 8) as u8);
                out.push((v & 0xff) as u8);
            } else {
                out.push(v as u8);
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{bank_from_masks, orbits_from_point};
    use crate::gauss::rat;
    use crate::lattice::pair_digits;

    #[test]
    fn mask_table_round_trip() {
        let text = "# origin: 1,1\n# scale: 1/4\n0,1,0\n1,0,1\n0,1,0\n";
        let t = MaskTable::parse(text).unwrap();
        let p = t.to_poly(4);
        assert_eq!(p.coeff(&[0, -1]), GaussRat::real(rat(1, 4)));
        assert_eq!(p.coeff(&[-1, 0]), GaussRat::real(rat(1, 4)));
        assert_eq!(p.coeff(&[0, 0]), GaussRat::zero());
        assert_eq!(p.num_terms(), 4);
    }

    #[test]
    fn bank_json_round_trip() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::zero(1)).unwrap();
        let hat = LaurentPoly::monomial(vec![-1], GaussRat::real(rat(1, 4)))
            .add(&LaurentPoly::monomial(vec![0], GaussRat::real(rat(1, 2))))
            .unwrap()
            .add(&LaurentPoly::monomial(vec![1], GaussRat::real(rat(1, 4))))
            .unwrap();
        let bank = bank_from_masks(
            &ctx2,
            &hat,
            &LaurentPoly::one(1),
            &orbits_from_point(&part),
            BankSymmetryKind::PointA,
            HalfVec::zero(1),
            "round-trip test".into(),
        )
        .unwrap();
        let json = bank_to_json(&bank);
        let back = bank_from_json(&json).unwrap();
        assert_eq!(back.refinable.primal.poly, bank.refinable.primal.poly);
        assert_eq!(back.wavelets.len(), bank.wavelets.len());
        for (a, b) in back.wavelets.iter().zip(&bank.wavelets) {
            assert_eq!(a.primal.poly, b.primal.poly);
            assert_eq!(a.dual.poly, b.dual.poly);
        }
        assert!(crate::extension::bank_identity_holds(&back));
    }

    #[test]
    fn grid_csv_round_trip() {
        let g = LaurentPoly::monomial(vec![2, -1], GaussRat::real(rat(7, 3)))
            .add(&LaurentPoly::monomial(vec![0, 4], GaussRat::real(rat(-1, 2))))
            .unwrap();
        let text = grid_to_csv_exact(&g);
        let back = grid_from_csv_exact(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = std::env::temp_dir().join("symwave_pgm_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.pgm");
        let mut coeffs = BTreeMap::new();
        for r in 0..4i64 {
            for c in 0..4i64 {
                coeffs.insert(vec![c, r], GaussRat::from_i64(16 * r + c + 1));
            }
        }
        let g = LaurentPoly::from_coeffs(2, vec![false, false], None, coeffs);
        write_pgm(&g, 255, &path).unwrap();
        let (back, maxval) = read_pgm(&path).unwrap();
        assert_eq!(maxval, 255);
        assert_eq!(back, g);
    }
}
