//! Network checkpoint file format.
//!
//! Layout (all integers little-endian):
//!   magic          4 bytes  "GMEG"
//!   version        u32      currently 1
//!   net_count      u32
//!   per network:
//!     width_count  u32
//!     widths       u32 * width_count
//!     act_count    u32      = width_count - 1 (hidden acts, then final)
//!     acts         u8 * act_count (0 identity, 1 relu, 2 tanh)
//!     param_count  u64
//!     params       f64 * param_count

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Activation, Mlp, MlpSpec, NdError, NdResult};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"GMEG";
const VERSION: u32 = 1;

pub fn save_networks(path: &Path, nets: &[&Mlp]) -> NdResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(nets.len() as u32).to_le_bytes())?;
    for net in nets {
        let spec = net.spec();
        w.write_all(&(spec.widths.len() as u32).to_le_bytes())?;
        for &width in &spec.widths {
            w.write_all(&(width as u32).to_le_bytes())?;
        }
        let act_count = spec.layer_count();
        w.write_all(&(act_count as u32).to_le_bytes())?;
        for l in 0..act_count {
            w.write_all(&[spec.activation(l).code()])?;
        }
        w.write_all(&(net.params().len() as u64).to_le_bytes())?;
        for &p in net.params() {
            w.write_all(&p.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_networks(path: &Path) -> NdResult<Vec<Mlp>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| NdError::Format("checkpoint shorter than header".into()))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(NdError::Format("bad checkpoint magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(NdError::Format(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let net_count = read_u32(&mut r)? as usize;
    let mut nets = Vec::with_capacity(net_count);
    for _ in 0..net_count {
        let width_count = read_u32(&mut r)? as usize;
        if width_count < 2 {
            return Err(NdError::Format("network needs at least two widths".into()));
        }
        let mut widths = Vec::with_capacity(width_count);
        for _ in 0..width_count {
            widths.push(read_u32(&mut r)? as usize);
        }
        let act_count = read_u32(&mut r)? as usize;
        if act_count != width_count - 1 {
            return Err(NdError::Format(format!(
                "activation count {} does not match {} layers",
                act_count,
                width_count - 1
            )));
        }
        let mut acts = Vec::with_capacity(act_count);
        for _ in 0..act_count {
            let mut code = [0u8; 1];
            r.read_exact(&mut code)
                .map_err(|_| NdError::Format("truncated activation block".into()))?;
            acts.push(Activation::from_code(code[0])?);
        }
        let final_act = *acts.last().expect("act_count >= 1");
        let hidden = acts[..act_count - 1].to_vec();
        let spec = MlpSpec::new(widths, hidden, final_act)?;
        let param_count = read_u64(&mut r)? as usize;
        if param_count != spec.param_count() {
            return Err(NdError::Format(format!(
                "stored parameter count {} does not match spec count {}",
                param_count,
                spec.param_count()
            )));
        }
        let mut params = Vec::with_capacity(param_count);
        let mut buf = [0u8; 8];
        for _ in 0..param_count {
            r.read_exact(&mut buf)
                .map_err(|_| NdError::Format("truncated parameter payload".into()))?;
            params.push(f64::from_le_bytes(buf));
        }
        nets.push(Mlp::new(spec, params)?);
    }
    Ok(nets)
}

fn read_u32(r: &mut impl Read) -> NdResult<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| NdError::Format("truncated header field".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> NdResult<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)
        .map_err(|_| NdError::Format("truncated header field".into()))?;
    Ok(u64::from_le_bytes(buf))
}
