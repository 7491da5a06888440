//! Binary visual-descriptor file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes   "LNUPDSC1"
//! version  u32       1
//! dim      u32       descriptor length d (> 0)
//! count    u32       number of entries
//! entry    count x { id_len: u16, id: id_len bytes UTF-8, values: d x f32 }
//! ```

use std::io::{Read, Write};

use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"LNUPDSC1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorFile {
    pub dim: usize,
    pub entries: Vec<(String, Vec<f32>)>,
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::DescriptorFormat(format!(
                "truncated {what} at byte {}",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
}

pub fn read_descriptor_file<R: Read>(mut source: R) -> Result<DescriptorFile> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    let mut cur = Cursor { buf: &buf, pos: 0 };
    if cur.take(8, "magic")? != MAGIC {
        return Err(Error::DescriptorFormat("bad magic bytes".into()));
    }
    let version = cur.u32("version")?;
    if version != VERSION {
        return Err(Error::DescriptorFormat(format!(
            "unsupported version {version}"
        )));
    }
    let dim = cur.u32("dimension")? as usize;
    if dim == 0 {
        return Err(Error::DescriptorFormat("dimension must be positive".into()));
    }
    let count = cur.u32("entry count")? as usize;
    let mut entries = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let id_len = cur.u16("id length")? as usize;
        let id = std::str::from_utf8(cur.take(id_len, "person id")?)
            .map_err(|_| Error::DescriptorFormat(format!("non UTF-8 id at byte {}", cur.pos)))?
            .to_string();
        if cur.remaining() < dim * 4 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cur.remaining() / 4,
            });
        }
        let raw = cur.take(dim * 4, "values")?;
        let values: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDescriptor(id));
        }
        entries.push((id, values));
    }
    if cur.remaining() != 0 {
        return Err(Error::DescriptorFormat(format!(
            "{} trailing bytes after {count} entries",
            cur.remaining()
        )));
    }
    Ok(DescriptorFile { dim, entries })
}

pub fn write_descriptor_file<W: Write>(mut out: W, file: &DescriptorFile) -> Result<()> {
    if file.dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let as_u32 = |n: usize, what: &str| {
        u32::try_from(n).map_err(|_| Error::InvalidParameter(format!("{what} exceeds u32")))
    };
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&as_u32(file.dim, "dimension")?.to_le_bytes())?;
    out.write_all(&as_u32(file.entries.len(), "entry count")?.to_le_bytes())?;
    for (id, values) in &file.entries {
        if values.len() != file.dim {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDescriptor(id.clone()));
        }
        let id_len = u16::try_from(id.len())
            .map_err(|_| Error::InvalidParameter(format!("person id too long: {id:?}")))?;
        out.write_all(&id_len.to_le_bytes())?;
        out.write_all(id.as_bytes())?;
        for v in values {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}
