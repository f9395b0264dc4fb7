//! Episode logs as NPZ archives: a ZIP container holding one `.npy` member
//! per log array.
//!
//! Writes are byte-deterministic: members are stored uncompressed in a
//! fixed order with zeroed timestamps, so identical logs produce identical
//! archives. The reader additionally accepts deflate-compressed members
//! (the format produced by compressed reference writers), verifies CRCs,
//! ignores unknown arrays with a warning, and reports missing required
//! arrays as a schema error.

use super::npy::{
    decode_npy, encode_npy_f64, encode_npy_i64, NpyDescriptor, NpyError, NpyValues,
};
use crate::attack::AttackSpec;
use crate::filters::{FilterKind, FilterStatus};
use crate::sim::{EpisodeLog, SimConfig};
use crate::world::RobotKind;
use flate2::read::DeflateDecoder;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Required array names of a valid episode archive, in write order.
pub const REQUIRED_ARRAYS: [&str; 13] = [
    "dist_robot_to_env",
    "dist_goal_arm",
    "q_trace",
    "u_nominal_trace",
    "u_safe_trace",
    "filter_status_trace",
    "self_dist_trace",
    "meta_robot_kind",
    "meta_filter_kind",
    "meta_attack_kind",
    "meta_attack_param",
    "meta_seed",
    "meta_config",
];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("not a ZIP archive: {0}")]
    NotZip(String),
    #[error("corrupt ZIP archive: {0}")]
    ZipCorrupt(String),
    #[error("member {member}: unsupported compression method {method}")]
    UnsupportedCompression { member: String, method: u16 },
    #[error("member {member}: CRC mismatch")]
    CrcMismatch { member: String },
    #[error("member {member}: {source}")]
    Npy { member: String, source: NpyError },
    #[error("archive is missing required arrays: {}", missing.join(", "))]
    MissingArrays { missing: Vec<String> },
    #[error("member {member}: {message}")]
    Malformed { member: String, message: String },
}

// ---------------------------------------------------------------------------
// CRC-32 (IEEE), table driven
// ---------------------------------------------------------------------------

fn crc32_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut c = i as u32;
        let mut k = 0;
        while k < 8 {
            c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
            k += 1;
        }
        table[i] = c;
        i += 1;
    }
    table
}

fn crc32(data: &[u8]) -> u32 {
    static TABLE: std::sync::OnceLock<[u32; 256]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(crc32_table);
    let mut c = 0xFFFF_FFFFu32;
    for &b in data {
        c = table[((c ^ b as u32) & 0xFF) as usize] ^ (c >> 8);
    }
    c ^ 0xFFFF_FFFF
}

// ---------------------------------------------------------------------------
// ZIP writing (stored members, deterministic bytes)
// ---------------------------------------------------------------------------

const LOCAL_SIG: u32 = 0x0403_4B50;
const CENTRAL_SIG: u32 = 0x0201_4B50;
const EOCD_SIG: u32 = 0x0605_4B50;
// 1980-01-01, the DOS epoch; keeps rewrites byte-identical.
const DOS_DATE: u16 = 0x0021;
const DOS_TIME: u16 = 0x0000;

fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Serialize (name, member bytes) pairs into a stored ZIP archive.
fn write_zip(members: &[(String, Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut central = Vec::new();
    for (name, data) in members {
        let offset = out.len() as u32;
        let crc = crc32(data);
        let name_bytes = name.as_bytes();
        let len = data.len() as u32;

        put_u32(&mut out, LOCAL_SIG);
        put_u16(&mut out, 20); // version needed
        put_u16(&mut out, 0); // flags
        put_u16(&mut out, 0); // method: stored
        put_u16(&mut out, DOS_TIME);
        put_u16(&mut out, DOS_DATE);
        put_u32(&mut out, crc);
        put_u32(&mut out, len);
        put_u32(&mut out, len);
        put_u16(&mut out, name_bytes.len() as u16);
        put_u16(&mut out, 0); // extra length
        out.extend_from_slice(name_bytes);
        out.extend_from_slice(data);

        put_u32(&mut central, CENTRAL_SIG);
        put_u16(&mut central, 20); // version made by
        put_u16(&mut central, 20); // version needed
        put_u16(&mut central, 0);
        put_u16(&mut central, 0);
        put_u16(&mut central, DOS_TIME);
        put_u16(&mut central, DOS_DATE);
        put_u32(&mut central, crc);
        put_u32(&mut central, len);
        put_u32(&mut central, len);
        put_u16(&mut central, name_bytes.len() as u16);
        put_u16(&mut central, 0); // extra
        put_u16(&mut central, 0); // comment
        put_u16(&mut central, 0); // disk number
        put_u16(&mut central, 0); // internal attrs
        put_u32(&mut central, 0); // external attrs
        put_u32(&mut central, offset);
        central.extend_from_slice(name_bytes);
    }
    let cd_offset = out.len() as u32;
    let cd_size = central.len() as u32;
    out.extend_from_slice(&central);
    put_u32(&mut out, EOCD_SIG);
    put_u16(&mut out, 0);
    put_u16(&mut out, 0);
    put_u16(&mut out, members.len() as u16);
    put_u16(&mut out, members.len() as u16);
    put_u32(&mut out, cd_size);
    put_u32(&mut out, cd_offset);
    put_u16(&mut out, 0); // comment length
    out
}

// ---------------------------------------------------------------------------
// ZIP reading (stored + deflate)
// ---------------------------------------------------------------------------

/// Location and type of one member inside the archive.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberExtent {
    /// Offset of the (possibly compressed) member data in the file.
    pub data_offset: usize,
    pub compressed_len: usize,
    pub uncompressed_len: usize,
    /// ZIP compression method: 0 stored, 8 deflate.
    pub method: u16,
}

/// Parsed index of an episode archive: array name to NPY descriptor and
/// byte extent.
#[derive(Debug, Clone, Default)]
pub struct ArchiveManifest {
    pub entries: BTreeMap<String, (NpyDescriptor, MemberExtent)>,
}

struct RawMember {
    name: String,
    extent: MemberExtent,
    crc: u32,
    data: Vec<u8>,
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16, StoreError> {
    bytes
        .get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| StoreError::ZipCorrupt(format!("truncated at byte {at}")))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, StoreError> {
    bytes
        .get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| StoreError::ZipCorrupt(format!("truncated at byte {at}")))
}

/// Parse the container and inflate every member.
fn read_zip(bytes: &[u8]) -> Result<Vec<RawMember>, StoreError> {
    if bytes.len() < 22 {
        return Err(StoreError::NotZip("shorter than an end-of-directory record".into()));
    }
    // Scan backwards for the EOCD signature (comment may pad the tail).
    let mut eocd = None;
    let lo = bytes.len().saturating_sub(22 + 65_536);
    for at in (lo..=bytes.len() - 22).rev() {
        if bytes[at..at + 4] == EOCD_SIG.to_le_bytes() {
            eocd = Some(at);
            break;
        }
    }
    let Some(eocd) = eocd else {
        return Err(StoreError::NotZip("no end-of-directory signature".into()));
    };
    let entry_count = read_u16(bytes, eocd + 10)? as usize;
    let cd_offset = read_u32(bytes, eocd + 16)? as usize;

    let mut members = Vec::with_capacity(entry_count);
    let mut at = cd_offset;
    for _ in 0..entry_count {
        if read_u32(bytes, at)? != CENTRAL_SIG {
            return Err(StoreError::ZipCorrupt(format!(
                "bad central directory signature at byte {at}"
            )));
        }
        let method = read_u16(bytes, at + 10)?;
        let crc = read_u32(bytes, at + 16)?;
        let compressed_len = read_u32(bytes, at + 20)? as usize;
        let uncompressed_len = read_u32(bytes, at + 24)? as usize;
        let name_len = read_u16(bytes, at + 28)? as usize;
        let extra_len = read_u16(bytes, at + 30)? as usize;
        let comment_len = read_u16(bytes, at + 32)? as usize;
        let local_offset = read_u32(bytes, at + 42)? as usize;
        let name_bytes = bytes
            .get(at + 46..at + 46 + name_len)
            .ok_or_else(|| StoreError::ZipCorrupt("truncated member name".into()))?;
        let name = String::from_utf8_lossy(name_bytes).into_owned();
        at += 46 + name_len + extra_len + comment_len;

        // The local header repeats name/extra lengths; data follows them.
        if read_u32(bytes, local_offset)? != LOCAL_SIG {
            return Err(StoreError::ZipCorrupt(format!(
                "bad local header signature for member {name}"
            )));
        }
        let l_name = read_u16(bytes, local_offset + 26)? as usize;
        let l_extra = read_u16(bytes, local_offset + 28)? as usize;
        let data_offset = local_offset + 30 + l_name + l_extra;
        let raw = bytes
            .get(data_offset..data_offset + compressed_len)
            .ok_or_else(|| StoreError::ZipCorrupt(format!("truncated data for member {name}")))?;

        let data = match method {
            0 => raw.to_vec(),
            8 => {
                let mut out = Vec::with_capacity(uncompressed_len);
                DeflateDecoder::new(raw).read_to_end(&mut out).map_err(|e| {
                    StoreError::ZipCorrupt(format!("member {name}: inflate failed: {e}"))
                })?;
                out
            }
            other => {
                return Err(StoreError::UnsupportedCompression { member: name, method: other })
            }
        };
        if data.len() != uncompressed_len {
            return Err(StoreError::ZipCorrupt(format!(
                "member {name}: expected {uncompressed_len} bytes, inflated {}",
                data.len()
            )));
        }
        if crc32(&data) != crc {
            return Err(StoreError::CrcMismatch { member: name });
        }
        members.push(RawMember {
            name,
            extent: MemberExtent { data_offset, compressed_len, uncompressed_len, method },
            crc,
            data,
        });
    }
    Ok(members)
}

// ---------------------------------------------------------------------------
// EpisodeLog encoding
// ---------------------------------------------------------------------------

/// Encode an episode log as deterministic NPZ bytes.
pub fn encode_npz(log: &EpisodeLog) -> Vec<u8> {
    let t = log.steps();
    let status_codes: Vec<i64> = log.filter_status_trace.iter().map(|s| s.code()).collect();
    let meta_config = vec![
        log.config.dt,
        log.config.u_max,
        log.config.k_p,
        log.config.goal[0],
        log.config.goal[1],
        log.config.goal[2],
    ];
    let members: Vec<(String, Vec<u8>)> = vec![
        (
            "dist_robot_to_env.npy".into(),
            encode_npy_f64(&log.dist_robot_to_env, &[t, log.volumes, log.obstacles]),
        ),
        ("dist_goal_arm.npy".into(), encode_npy_f64(&log.dist_goal_arm, &[t])),
        ("q_trace.npy".into(), encode_npy_f64(&log.q_trace, &[t, log.dof])),
        ("u_nominal_trace.npy".into(), encode_npy_f64(&log.u_nominal_trace, &[t, log.dof])),
        ("u_safe_trace.npy".into(), encode_npy_f64(&log.u_safe_trace, &[t, log.dof])),
        ("filter_status_trace.npy".into(), encode_npy_i64(&status_codes, &[t])),
        ("self_dist_trace.npy".into(), encode_npy_f64(&log.self_dist_trace, &[t, log.self_pairs])),
        ("meta_robot_kind.npy".into(), encode_npy_i64(&[robot_code(log.robot)], &[])),
        ("meta_filter_kind.npy".into(), encode_npy_i64(&[filter_code(log.filter)], &[])),
        ("meta_attack_kind.npy".into(), encode_npy_i64(&[log.attack.kind_code()], &[])),
        ("meta_attack_param.npy".into(), encode_npy_f64(&[log.attack.magnitude()], &[])),
        ("meta_seed.npy".into(), encode_npy_i64(&[log.config.seed as i64], &[])),
        ("meta_config.npy".into(), encode_npy_f64(&meta_config, &[6])),
    ];
    write_zip(&members)
}

/// Write an episode archive to disk.
pub fn write_npz(log: &EpisodeLog, path: &Path) -> Result<(), StoreError> {
    let bytes = encode_npz(log);
    std::fs::write(path, bytes)
        .map_err(|source| StoreError::Io { path: path.to_path_buf(), source })
}

fn robot_code(kind: RobotKind) -> i64 {
    match kind {
        RobotKind::RigidCluster => 0,
        RobotKind::PlanarArm => 1,
    }
}

fn robot_from_code(code: i64) -> Option<RobotKind> {
    match code {
        0 => Some(RobotKind::RigidCluster),
        1 => Some(RobotKind::PlanarArm),
        _ => None,
    }
}

fn filter_code(kind: FilterKind) -> i64 {
    FilterKind::ALL.iter().position(|k| *k == kind).unwrap() as i64
}

fn filter_from_code(code: i64) -> Option<FilterKind> {
    usize::try_from(code).ok().and_then(|i| FilterKind::ALL.get(i).copied())
}

// ---------------------------------------------------------------------------
// EpisodeLog decoding
// ---------------------------------------------------------------------------

/// A decoded archive: the log plus warnings about ignored members.
#[derive(Debug, Clone)]
pub struct LoadedEpisode {
    pub log: EpisodeLog,
    pub manifest: ArchiveManifest,
    pub warnings: Vec<String>,
}

/// Decode NPZ bytes into an episode log.
pub fn decode_npz(bytes: &[u8]) -> Result<LoadedEpisode, StoreError> {
    let members = read_zip(bytes)?;
    let mut manifest = ArchiveManifest::default();
    let mut arrays: BTreeMap<String, (NpyDescriptor, NpyValues)> = BTreeMap::new();
    let mut warnings = Vec::new();

    for m in members {
        let Some(array_name) = m.name.strip_suffix(".npy") else {
            warnings.push(format!("ignored non-array member {:?}", m.name));
            continue;
        };
        let array_name = array_name.to_string();
        let (desc, values) = decode_npy(&m.data)
            .map_err(|source| StoreError::Npy { member: m.name.clone(), source })?;
        manifest.entries.insert(array_name.clone(), (desc.clone(), m.extent.clone()));
        if !REQUIRED_ARRAYS.contains(&array_name.as_str()) {
            warnings.push(format!("ignored unknown array {array_name:?}"));
            continue;
        }
        let _ = m.crc;
        arrays.insert(array_name, (desc, values));
    }

    let missing: Vec<String> = REQUIRED_ARRAYS
        .iter()
        .filter(|n| !arrays.contains_key(**n))
        .map(|n| n.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(StoreError::MissingArrays { missing });
    }

    let f64_array = |name: &str| -> Result<(&NpyDescriptor, &[f64]), StoreError> {
        let (desc, values) = &arrays[name];
        match values {
            NpyValues::F64(v) => Ok((desc, v)),
            _ => Err(StoreError::Malformed {
                member: name.into(),
                message: format!("expected f64 data, found {:?}", desc.dtype),
            }),
        }
    };
    let i64_array = |name: &str| -> Result<(&NpyDescriptor, &[i64]), StoreError> {
        let (desc, values) = &arrays[name];
        match values {
            NpyValues::I64(v) => Ok((desc, v)),
            _ => Err(StoreError::Malformed {
                member: name.into(),
                message: format!("expected i64 data, found {:?}", desc.dtype),
            }),
        }
    };
    let malformed = |member: &str, message: String| StoreError::Malformed {
        member: member.into(),
        message,
    };

    let (goal_desc, dist_goal_arm) = f64_array("dist_goal_arm")?;
    if goal_desc.shape.len() != 1 {
        return Err(malformed("dist_goal_arm", "expected a 1-d array".into()));
    }
    let t = goal_desc.shape[0];

    let (env_desc, dist_env) = f64_array("dist_robot_to_env")?;
    if env_desc.shape.len() != 3 || env_desc.shape[0] != t {
        return Err(malformed(
            "dist_robot_to_env",
            format!("expected shape ({t}, volumes, obstacles), found {:?}", env_desc.shape),
        ));
    }
    let volumes = env_desc.shape[1];
    let obstacles = env_desc.shape[2];

    let trace_2d = |name: &str| -> Result<(usize, Vec<f64>), StoreError> {
        let (desc, v) = f64_array(name)?;
        if desc.shape.len() != 2 || desc.shape[0] != t {
            return Err(malformed(
                name,
                format!("expected shape ({t}, _), found {:?}", desc.shape),
            ));
        }
        Ok((desc.shape[1], v.to_vec()))
    };
    let (dof, q_trace) = trace_2d("q_trace")?;
    let (dof_nom, u_nominal_trace) = trace_2d("u_nominal_trace")?;
    let (dof_safe, u_safe_trace) = trace_2d("u_safe_trace")?;
    if dof_nom != dof || dof_safe != dof {
        return Err(malformed("u_nominal_trace", "control dof differs from q_trace".into()));
    }
    let (self_pairs, self_dist_trace) = trace_2d("self_dist_trace")?;

    let (status_desc, status_codes) = i64_array("filter_status_trace")?;
    if status_desc.shape != vec![t] {
        return Err(malformed(
            "filter_status_trace",
            format!("expected shape ({t},), found {:?}", status_desc.shape),
        ));
    }
    let filter_status_trace: Vec<FilterStatus> = status_codes
        .iter()
        .map(|&c| {
            FilterStatus::from_code(c)
                .ok_or_else(|| malformed("filter_status_trace", format!("unknown status {c}")))
        })
        .collect::<Result<_, _>>()?;

    let scalar_i64 = |name: &str| -> Result<i64, StoreError> {
        let (desc, v) = i64_array(name)?;
        if desc.element_count() != 1 {
            return Err(malformed(name, "expected a scalar".into()));
        }
        Ok(v[0])
    };
    let scalar_f64 = |name: &str| -> Result<f64, StoreError> {
        let (desc, v) = f64_array(name)?;
        if desc.element_count() != 1 {
            return Err(malformed(name, "expected a scalar".into()));
        }
        Ok(v[0])
    };

    let robot = robot_from_code(scalar_i64("meta_robot_kind")?)
        .ok_or_else(|| malformed("meta_robot_kind", "unknown robot kind code".into()))?;
    let filter = filter_from_code(scalar_i64("meta_filter_kind")?)
        .ok_or_else(|| malformed("meta_filter_kind", "unknown filter kind code".into()))?;
    let attack = AttackSpec::from_code(scalar_i64("meta_attack_kind")?, scalar_f64("meta_attack_param")?)
        .ok_or_else(|| malformed("meta_attack_kind", "unknown attack kind code".into()))?;
    let seed = scalar_i64("meta_seed")? as u64;

    let (cfg_desc, cfg) = f64_array("meta_config")?;
    if cfg_desc.shape != vec![6] {
        return Err(malformed("meta_config", format!("expected shape (6,), found {:?}", cfg_desc.shape)));
    }
    let config = SimConfig {
        dt: cfg[0],
        steps: t,
        seed,
        u_max: cfg[1],
        k_p: cfg[2],
        goal: [cfg[3], cfg[4], cfg[5]],
    };

    let log = EpisodeLog {
        robot,
        filter,
        attack,
        config,
        dof,
        volumes,
        obstacles,
        self_pairs,
        dist_robot_to_env: dist_env.to_vec(),
        dist_goal_arm: dist_goal_arm.to_vec(),
        q_trace,
        u_nominal_trace,
        u_safe_trace,
        filter_status_trace,
        self_dist_trace,
    };
    log.validate_shape()
        .map_err(|m| malformed("archive", m))?;
    Ok(LoadedEpisode { log, manifest, warnings })
}

/// Read an episode archive from disk.
pub fn read_npz(path: &Path) -> Result<LoadedEpisode, StoreError> {
    let bytes = std::fs::read(path)
        .map_err(|source| StoreError::Io { path: path.to_path_buf(), source })?;
    decode_npz(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::npy::parse_npy_header;
    use crate::testkit::random_episode_log;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_random_logs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let log = random_episode_log(&mut rng);
            let bytes = encode_npz(&log);
            let loaded = decode_npz(&bytes).unwrap();
            assert_eq!(loaded.log, log);
            assert!(loaded.warnings.is_empty());
        }
    }

    #[test]
    fn writer_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let log = random_episode_log(&mut rng);
        assert_eq!(encode_npz(&log), encode_npz(&log));
    }

    #[test]
    fn member_parses_standalone_with_expected_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let log = random_episode_log(&mut rng);
        let bytes = encode_npz(&log);
        let loaded = decode_npz(&bytes).unwrap();
        let (_, extent) = &loaded.manifest.entries["dist_goal_arm"];
        assert_eq!(extent.method, 0);
        let member = &bytes[extent.data_offset..extent.data_offset + extent.compressed_len];
        let (desc, offset) = parse_npy_header(member).unwrap();
        assert_eq!(desc.shape, vec![log.steps()]);
        assert_eq!(offset % 64, 0);
    }

    #[test]
    fn unknown_array_warns_and_is_ignored() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let log = random_episode_log(&mut rng);
        let bytes = encode_npz(&log);
        let mut members = read_zip(&bytes)
            .unwrap()
            .into_iter()
            .map(|m| (m.name, m.data))
            .collect::<Vec<_>>();
        members.push(("debug_misc.npy".into(), encode_npy_f64(&[1.0, 2.0], &[2])));
        let with_extra = write_zip(&members);
        let loaded = decode_npz(&with_extra).unwrap();
        assert_eq!(loaded.log, log);
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("debug_misc"));
    }

    #[test]
    fn missing_required_arrays_listed_in_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let log = random_episode_log(&mut rng);
        let bytes = encode_npz(&log);
        let members = read_zip(&bytes)
            .unwrap()
            .into_iter()
            .filter(|m| m.name != "dist_goal_arm.npy" && m.name != "meta_seed.npy")
            .map(|m| (m.name, m.data))
            .collect::<Vec<_>>();
        let err = decode_npz(&write_zip(&members)).unwrap_err();
        match err {
            StoreError::MissingArrays { missing } => {
                assert_eq!(missing, vec!["dist_goal_arm".to_string(), "meta_seed".to_string()]);
            }
            other => panic!("expected MissingArrays, got {other:?}"),
        }
    }

    #[test]
    fn corrupt_bytes_do_not_panic() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let log = random_episode_log(&mut rng);
        let good = encode_npz(&log);
        for _ in 0..200 {
            let mut bad = good.clone();
            for _ in 0..rng.gen_range(1..8) {
                let i = rng.gen_range(0..bad.len());
                bad[i] = rng.gen();
            }
            let _ = decode_npz(&bad); // error or success, never a panic
        }
        assert!(decode_npz(&[0u8; 4]).is_err());
        assert!(decode_npz(b"").is_err());
    }

    #[test]
    fn seed_round_trips_through_bit_cast() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut log = random_episode_log(&mut rng);
        log.config.seed = u64::MAX - 3;
        let loaded = decode_npz(&encode_npz(&log)).unwrap();
        assert_eq!(loaded.log.config.seed, u64::MAX - 3);
    }
}
