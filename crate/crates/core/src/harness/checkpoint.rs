//! Binary checkpoint container.
//!
//! Layout (all integers little-endian):
//!   magic "RDN1" (4 bytes)
//!   u32 version = 1
//!   u32 tensor count
//!   per tensor: u16 name length, UTF-8 name, u8 rank, rank x u64 extents,
//!               extent-product x f64 values
//!
//! Training metadata (seed, epoch, learning rate) rides along as reserved
//! scalar tensors named "meta/..." so the byte layout stays exactly the
//! table format above. The seed is split into two 32-bit halves so a full
//! 64-bit value survives the f64 payload exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"RDN1";
pub const VERSION: u32 = 1;

const META_SEED: &str = "meta/seed";
const META_EPOCH: &str = "meta/epoch";
const META_LR: &str = "meta/learning_rate";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epoch: u64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub tensors: Vec<(String, Tensor)>,
    pub meta: Option<TrainingMeta>,
}

impl Checkpoint {
    pub fn new(tensors: Vec<(String, Tensor)>) -> Checkpoint {
        Checkpoint {
            tensors,
            meta: None,
        }
    }

    pub fn with_meta(tensors: Vec<(String, Tensor)>, meta: TrainingMeta) -> Checkpoint {
        Checkpoint {
            tensors,
            meta: Some(meta),
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_checkpoint(path, self)
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        load_checkpoint(path)
    }
}

fn encode(ckpt: &Checkpoint) -> Result<Vec<u8>> {
    let mut table: Vec<(&str, Tensor)> = ckpt
        .tensors
        .iter()
        .map(|(n, t)| (n.as_str(), t.clone()))
        .collect();
    let meta_tensors;
    if let Some(meta) = &ckpt.meta {
        meta_tensors = [
            (
                META_SEED.to_string(),
                Tensor::from_vec(
                    &[2],
                    vec![(meta.seed >> 32) as f64, (meta.seed & 0xFFFF_FFFF) as f64],
                )?,
            ),
            (META_EPOCH.to_string(), Tensor::scalar(meta.epoch as f64)),
            (META_LR.to_string(), Tensor::scalar(meta.learning_rate)),
        ];
        for (n, t) in &meta_tensors {
            table.push((n, t.clone()));
        }
    }

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(table.len() as u32).to_le_bytes());
    for (name, tensor) in &table {
        let name_bytes = name.as_bytes();
        if name_bytes.len() > u16::MAX as usize {
            return Err(Error::format(format!("tensor name too long: {name}")));
        }
        out.extend_from_slice(&(name_bytes.len() as u16).to_le_bytes());
        out.extend_from_slice(name_bytes);
        let rank = tensor.shape().len();
        if rank > u8::MAX as usize {
            return Err(Error::format(format!("tensor rank {rank} too large")));
        }
        out.push(rank as u8);
        for &e in tensor.shape() {
            out.extend_from_slice(&(e as u64).to_le_bytes());
        }
        for v in tensor.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::CheckpointTruncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode(buf: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::CheckpointBadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::CheckpointVersion(version));
    }
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = r.u16()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::format("tensor name is not UTF-8".to_string()))?
            .to_string();
        let rank = r.take(1)?[0] as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(r.u64()? as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(r.f64()?);
        }
        tensors.push((name, Tensor::from_vec(&shape, data)?));
    }
    if r.pos != buf.len() {
        return Err(Error::format(format!(
            "{} trailing bytes after checkpoint table",
            buf.len() - r.pos
        )));
    }

    // Peel off metadata tensors.
    let mut meta_seed = None;
    let mut meta_epoch = None;
    let mut meta_lr = None;
    let mut plain = Vec::with_capacity(tensors.len());
    for (name, t) in tensors {
        match name.as_str() {
            META_SEED if t.len() == 2 => {
                meta_seed = Some(((t.data()[0] as u64) << 32) | t.data()[1] as u64);
            }
            META_EPOCH if t.len() == 1 => meta_epoch = Some(t.data()[0] as u64),
            META_LR if t.len() == 1 => meta_lr = Some(t.data()[0]),
            _ => plain.push((name, t)),
        }
    }
    let meta = match (meta_seed, meta_epoch, meta_lr) {
        (Some(seed), Some(epoch), Some(learning_rate)) => Some(TrainingMeta {
            seed,
            epoch,
            learning_rate,
        }),
        _ => None,
    };
    Ok(Checkpoint {
        tensors: plain,
        meta,
    })
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    fs::write(path, encode(ckpt)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::gaussian_init;
    use crate::rng::RngStream;

    fn sample_checkpoint() -> Checkpoint {
        let mut rng = RngStream::new(3);
        Checkpoint::with_meta(
            vec![
                ("a/weight".into(), gaussian_init(&[3, 4], 1.0, &mut rng).unwrap()),
                ("a/bias".into(), gaussian_init(&[4], 1.0, &mut rng).unwrap()),
                ("dfc/scan1/0".into(), gaussian_init(&[2, 2], 1.0, &mut rng).unwrap()),
            ],
            TrainingMeta {
                seed: 0xDEAD_BEEF_1234_5678,
                epoch: 42,
                learning_rate: 5e-4,
            },
        )
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        let ckpt = sample_checkpoint();
        ckpt.save(&p1).unwrap();
        let loaded = Checkpoint::load(&p1).unwrap();
        loaded.save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(loaded.meta, ckpt.meta);
        for ((n1, t1), (n2, t2)) in ckpt.tensors.iter().zip(&loaded.tensors) {
            assert_eq!(n1, n2);
            assert_eq!(t1.shape(), t2.shape());
            assert_eq!(t1.data(), t2.data());
        }
    }

    #[test]
    fn truncation_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ckpt");
        sample_checkpoint().save(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        for cut in [3, 7, 11, bytes.len() / 2, bytes.len() - 1] {
            let r = decode(&bytes[..cut]);
            assert!(
                matches!(r, Err(Error::CheckpointTruncated)),
                "cut {cut}: {r:?}"
            );
        }
    }

    #[test]
    fn bad_magic_and_version_are_distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.ckpt");
        sample_checkpoint().save(&p).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();

        let mut wrong_magic = bytes.clone();
        wrong_magic[0] = b'X';
        assert!(matches!(decode(&wrong_magic), Err(Error::CheckpointBadMagic)));

        bytes[4] = 9; // version little-endian low byte
        match decode(&bytes) {
            Err(Error::CheckpointVersion(v)) => assert_eq!(v, 9),
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn names_preserved_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("n.ckpt");
        let ckpt = sample_checkpoint();
        ckpt.save(&p).unwrap();
        let loaded = Checkpoint::load(&p).unwrap();
        assert!(loaded.tensor("dfc/scan1/0").is_some());
        assert!(loaded.tensor("a/weight").is_some());
        assert!(loaded.tensor("missing").is_none());
    }
}
