//! Space files. Text form: a header line
//! `#lsa-space<TAB>1<TAB>k<TAB>vocab size<TAB>density m`, then one line per
//! term `word<TAB>density<TAB>v1 v2 ... vk` using shortest round-trip
//! decimals. The binary form stores the same fields little-endian behind the
//! magic `LSAB`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::space::SemanticSpace;
use crate::error::{Error, Result};

const TEXT_MAGIC: &str = "#lsa-space";
const BINARY_MAGIC: &[u8; 4] = b"LSAB";
const VERSION: u32 = 1;

pub fn write_text<W: Write>(space: &SemanticSpace, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(
        out,
        "{TEXT_MAGIC}\t{VERSION}\t{}\t{}\t{}",
        space.dims(),
        space.len(),
        space.density_m()
    )?;
    for (id, word) in space.words().iter().enumerate() {
        let id = id as u32;
        let comps: Vec<String> = space.vector_by_id(id).iter().map(|x| x.to_string()).collect();
        writeln!(out, "{word}\t{}\t{}", space.density_by_id(id), comps.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

fn header_field(fields: &[&str], i: usize) -> Result<usize> {
    fields
        .get(i)
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::parse(1, "malformed space header"))
}

pub fn read_text<R: BufRead>(input: R) -> Result<SemanticSpace> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty space file"))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.first() != Some(&TEXT_MAGIC) || header_field(&fields, 1)? != VERSION as usize {
        return Err(Error::parse(1, "not a version-1 text space file"));
    }
    let (k, n, m) = (
        header_field(&fields, 2)?,
        header_field(&fields, 3)?,
        header_field(&fields, 4)?,
    );
    let mut entries = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let (Some(word), Some(d), Some(vec)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(lineno, "expected word, density and vector"));
        };
        let d: f64 = d.parse().map_err(|_| Error::parse(lineno, "bad density"))?;
        let v: Vec<f64> = vec
            .split(' ')
            .map(|x| x.parse().map_err(|_| Error::parse(lineno, "bad vector component")))
            .collect::<Result<_>>()?;
        if v.len() != k {
            return Err(Error::parse(lineno, format!("expected {k} components, found {}", v.len())));
        }
        entries.push((word.to_string(), v));
        density.push(d);
    }
    if entries.len() != n {
        return Err(Error::parse(0, format!("header declares {n} terms, file has {}", entries.len())));
    }
    SemanticSpace::with_densities(entries, density, m)
}

pub fn write_binary<W: Write>(space: &SemanticSpace, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    out.write_all(BINARY_MAGIC)?;
    for x in [VERSION, space.dims() as u32, space.len() as u32, space.density_m() as u32] {
        out.write_all(&x.to_le_bytes())?;
    }
    for (id, word) in space.words().iter().enumerate() {
        let id = id as u32;
        out.write_all(&(word.len() as u32).to_le_bytes())?;
        out.write_all(word.as_bytes())?;
        out.write_all(&space.density_by_id(id).to_le_bytes())?;
        for x in space.vector_by_id(id) {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut input: R) -> Result<SemanticSpace> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::parse(0, "not a binary space file"));
    }
    if read_u32(&mut input)? != VERSION {
        return Err(Error::parse(0, "unsupported binary space version"));
    }
    let k = read_u32(&mut input)? as usize;
    let n = read_u32(&mut input)? as usize;
    let m = read_u32(&mut input)? as usize;
    let mut entries = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    for _ in 0..n {
        let len = read_u32(&mut input)? as usize;
        let mut bytes = vec![0u8; len];
        input.read_exact(&mut bytes)?;
        let word = String::from_utf8(bytes).map_err(|_| Error::parse(0, "word is not UTF-8"))?;
        density.push(read_f64(&mut input)?);
        let v = (0..k).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
        entries.push((word, v));
    }
    SemanticSpace::with_densities(entries, density, m)
}

/// Writes the binary form when the path ends in `.bin`, text otherwise.
pub fn save_space(space: &SemanticSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path)?;
    if path.extension().is_some_and(|e| e == "bin") {
        write_binary(space, file)
    } else {
        write_text(space, file)
    }
}

/// Reads either form, detected from the leading bytes.
pub fn load_space(path: impl AsRef<Path>) -> Result<SemanticSpace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Load {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = BufReader::new(file);
    let head = reader.fill_buf()?;
    if head.starts_with(BINARY_MAGIC) {
        read_binary(reader)
    } else {
        read_text(reader)
    }
}
