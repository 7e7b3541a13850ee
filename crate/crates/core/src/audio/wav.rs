//! RIFF/WAVE parsing and writing.
//!
//! Reads PCM 16-bit, PCM 24-bit, and IEEE float-32 (fmt codes 1 and 3,
//! plus WAVE_FORMAT_EXTENSIBLE when its sub-format resolves to one of
//! those). Writes the canonical 44-byte-header PCM 16-bit form. Integer
//! samples scale to `[-1, 1]` by `2^(bits-1)` on read; writing clamps,
//! scales by 32767, and rounds half away from zero, so a round trip is
//! exact to within one LSB.

use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use super::{AudioBuffer, AudioError};
use crate::Scalar;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Header-level description of a WAV file, without decoding samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavInfo {
    pub sample_rate: u32,
    pub channels: u16,
    pub bits_per_sample: u16,
    pub frames: usize,
}

impl WavInfo {
    pub fn duration_secs(&self) -> f64 {
        self.frames as f64 / self.sample_rate as f64
    }
}

fn malformed(offset: usize, reason: impl Into<String>) -> AudioError {
    AudioError::MalformedWav { offset, reason: reason.into() }
}

struct Fmt {
    code: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
    offset: usize,
}

fn read_u16(data: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([data[at], data[at + 1]])
}

fn read_u32(data: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([data[at], data[at + 1], data[at + 2], data[at + 3]])
}

fn parse_fmt(data: &[u8], pos: usize, size: usize) -> Result<Fmt, AudioError> {
    if size < 16 {
        return Err(malformed(pos, format!("fmt chunk too short ({size} bytes)")));
    }
    let body = pos + 8;
    let mut code = read_u16(data, body);
    let channels = read_u16(data, body + 2);
    let sample_rate = read_u32(data, body + 4);
    let bits = read_u16(data, body + 14);
    if code == FORMAT_EXTENSIBLE {
        // Sub-format GUID starts at fmt offset 24; its first two bytes are
        // the effective format code.
        if size < 40 {
            return Err(malformed(pos, "extensible fmt chunk shorter than 40 bytes"));
        }
        code = read_u16(data, body + 24);
    }
    if channels == 0 {
        return Err(malformed(pos, "zero channels"));
    }
    if sample_rate == 0 {
        return Err(malformed(pos, "zero sample rate"));
    }
    match (code, bits) {
        (FORMAT_PCM, 16) | (FORMAT_PCM, 24) | (FORMAT_IEEE_FLOAT, 32) => {}
        _ => {
            return Err(malformed(
                pos,
                format!("unsupported codec: format {code}, {bits} bits per sample"),
            ))
        }
    }
    Ok(Fmt { code, channels, sample_rate, bits, offset: pos })
}

/// Decodes a WAV file held in memory.
pub fn parse_wav<S: Scalar>(data: &[u8]) -> Result<AudioBuffer<S>, AudioError> {
    if data.len() < 4 || &data[0..4] != b"RIFF" {
        return Err(malformed(0, "missing RIFF magic"));
    }
    if data.len() < 12 || &data[8..12] != b"WAVE" {
        return Err(malformed(8, "missing WAVE marker"));
    }

    let mut fmt: Option<Fmt> = None;
    let mut data_chunk: Option<(usize, usize)> = None;
    let mut pos = 12;
    while pos + 8 <= data.len() {
        let id = &data[pos..pos + 4];
        let size = read_u32(data, pos + 4) as usize;
        if pos + 8 + size > data.len() {
            return Err(malformed(pos, format!("chunk {:?} truncated", String::from_utf8_lossy(id))));
        }
        match id {
            b"fmt " => fmt = Some(parse_fmt(data, pos, size)?),
            b"data" if data_chunk.is_none() => data_chunk = Some((pos + 8, size)),
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        pos += 8 + size + (size & 1);
    }
    let fmt = fmt.ok_or_else(|| malformed(12, "no fmt chunk"))?;
    let (data_off, data_len) = data_chunk.ok_or_else(|| malformed(12, "no data chunk"))?;

    let block_align = fmt.channels as usize * (fmt.bits as usize / 8);
    if data_len % block_align != 0 {
        return Err(malformed(
            data_off,
            format!("data length {data_len} is not a multiple of block align {block_align}"),
        ));
    }
    let frames = data_len / block_align;
    if frames == 0 {
        return Err(AudioError::EmptyAudio);
    }

    let bytes = &data[data_off..data_off + data_len];
    let count = frames * fmt.channels as usize;
    let mut samples = Vec::with_capacity(count);
    match (fmt.code, fmt.bits) {
        (FORMAT_PCM, 16) => {
            let scale = S::from_f64(1.0 / 32768.0).unwrap();
            for b in bytes.chunks_exact(2) {
                let v = i16::from_le_bytes([b[0], b[1]]);
                samples.push(S::from_i16(v).unwrap() * scale);
            }
        }
        (FORMAT_PCM, 24) => {
            let scale = S::from_f64(1.0 / 8_388_608.0).unwrap();
            for b in bytes.chunks_exact(3) {
                let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
                samples.push(S::from_i32(v).unwrap() * scale);
            }
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            let one = S::one();
            for b in bytes.chunks_exact(4) {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                // Out-of-range float content is clamped; non-finite is zeroed.
                let s = if v.is_finite() { S::from_f32(v).unwrap() } else { S::zero() };
                samples.push(s.min(one).max(-one));
            }
        }
        _ => unreachable!("validated in parse_fmt"),
    }
    AudioBuffer::new(samples, fmt.sample_rate, fmt.channels)
}

/// Reads and decodes a WAV file from disk.
pub fn read_wav<S: Scalar>(path: impl AsRef<Path>) -> Result<AudioBuffer<S>, AudioError> {
    let data = std::fs::read(path)?;
    parse_wav(&data)
}

/// Reads rate/channels/frame-count from the headers alone, skipping sample
/// payloads, so large files probe in constant time.
pub fn probe_wav(path: impl AsRef<Path>) -> Result<WavInfo, AudioError> {
    let mut file = std::fs::File::open(path)?;
    let mut preamble = [0u8; 12];
    file.read_exact(&mut preamble)
        .map_err(|_| malformed(0, "file shorter than RIFF preamble"))?;
    if &preamble[0..4] != b"RIFF" {
        return Err(malformed(0, "missing RIFF magic"));
    }
    if &preamble[8..12] != b"WAVE" {
        return Err(malformed(8, "missing WAVE marker"));
    }
    let file_len = file.seek(SeekFrom::End(0))? as usize;
    file.seek(SeekFrom::Start(12))?;

    let mut fmt: Option<Fmt> = None;
    let mut data_len: Option<usize> = None;
    let mut pos = 12usize;
    let mut header = [0u8; 8];
    while pos + 8 <= file_len {
        file.read_exact(&mut header)?;
        let size = u32::from_le_bytes([header[4], header[5], header[6], header[7]]) as usize;
        if pos + 8 + size > file_len {
            return Err(malformed(pos, "chunk truncated"));
        }
        if &header[0..4] == b"fmt " {
            let mut body = vec![0u8; size];
            file.read_exact(&mut body)?;
            // parse_fmt indexes relative to the chunk start.
            let mut chunk = header.to_vec();
            chunk.extend_from_slice(&body);
            let parsed = parse_fmt(&chunk, 0, size)?;
            fmt = Some(Fmt { offset: pos, ..parsed });
            if size & 1 == 1 {
                file.seek(SeekFrom::Current(1))?;
            }
        } else {
            if &header[0..4] == b"data" && data_len.is_none() {
                data_len = Some(size);
            }
            file.seek(SeekFrom::Current((size + (size & 1)) as i64))?;
        }
        pos += 8 + size + (size & 1);
    }
    let fmt = fmt.ok_or_else(|| malformed(12, "no fmt chunk"))?;
    let data_len = data_len.ok_or_else(|| malformed(12, "no data chunk"))?;
    let block_align = fmt.channels as usize * (fmt.bits as usize / 8);
    if data_len % block_align != 0 {
        return Err(malformed(fmt.offset, "data length not frame-aligned"));
    }
    let frames = data_len / block_align;
    if frames == 0 {
        return Err(AudioError::EmptyAudio);
    }
    Ok(WavInfo {
        sample_rate: fmt.sample_rate,
        channels: fmt.channels,
        bits_per_sample: fmt.bits,
        frames,
    })
}

/// Encodes a buffer as canonical PCM 16-bit WAV bytes.
pub fn encode_wav<S: Scalar>(buffer: &AudioBuffer<S>) -> Vec<u8> {
    let data_len = buffer.samples().len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    let byte_rate = buffer.sample_rate() * buffer.channels() as u32 * 2;
    let block_align = buffer.channels() * 2;

    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&buffer.channels().to_le_bytes());
    out.extend_from_slice(&buffer.sample_rate().to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());

    let one = S::one();
    let scale = S::from_f64(32767.0).unwrap();
    for &s in buffer.samples() {
        let clamped = s.min(one).max(-one);
        // round() is half-away-from-zero.
        let v = (clamped * scale).round().to_f64().unwrap() as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Writes a buffer to disk as canonical PCM 16-bit WAV.
pub fn write_wav<S: Scalar>(buffer: &AudioBuffer<S>, path: impl AsRef<Path>) -> Result<(), AudioError> {
    let bytes = encode_wav(buffer);
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wav_bytes(samples: &[f32], rate: u32, channels: u16) -> Vec<u8> {
        encode_wav(&AudioBuffer::new(samples.to_vec(), rate, channels).unwrap())
    }

    #[test]
    fn sixteen_bit_scaling() {
        // A single stored sample of 16384 decodes as 16384/32768 = 0.5.
        let mut bytes = wav_bytes(&[0.0], 16000, 1);
        let data_off = bytes.len() - 2;
        bytes[data_off..].copy_from_slice(&16384i16.to_le_bytes());
        let buf: AudioBuffer = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[0.5]);
        assert_eq!(buf.sample_rate(), 16000);
        assert_eq!(buf.channels(), 1);
    }

    #[test]
    fn bad_magic_errors_at_offset_zero() {
        let err = parse_wav::<f32>(b"JUNKdata").unwrap_err();
        match err {
            AudioError::MalformedWav { offset, .. } => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_chunk_reports_offset() {
        let mut bytes = wav_bytes(&[0.0, 0.1], 8000, 1);
        bytes.truncate(bytes.len() - 1);
        assert!(matches!(parse_wav::<f32>(&bytes), Err(AudioError::MalformedWav { .. })));
    }

    #[test]
    fn zero_frames_is_empty_audio() {
        let bytes = {
            let mut b = wav_bytes(&[0.0], 16000, 1);
            let len = b.len();
            b.truncate(len - 2); // drop the one sample
            let data_size_at = 40;
            b[data_size_at..data_size_at + 4].copy_from_slice(&0u32.to_le_bytes());
            let riff_size = (b.len() - 8) as u32;
            b[4..8].copy_from_slice(&riff_size.to_le_bytes());
            b
        };
        assert!(matches!(parse_wav::<f32>(&bytes), Err(AudioError::EmptyAudio)));
    }

    #[test]
    fn write_clamps_and_rounds() {
        let buf = AudioBuffer::mono(vec![1.5f32], 16000).unwrap();
        let bytes = encode_wav(&buf);
        let stored = i16::from_le_bytes([bytes[44], bytes[45]]);
        assert_eq!(stored, 32767);

        let buf = AudioBuffer::mono(vec![0.0f32], 16000).unwrap();
        let bytes = encode_wav(&buf);
        assert_eq!(bytes.len(), 46);
        assert_eq!(i16::from_le_bytes([bytes[44], bytes[45]]), 0);
    }

    #[test]
    fn round_trip_sine_within_one_lsb() {
        let rate = 16000u32;
        let samples: Vec<f32> = (0..rate)
            .map(|n| 0.8 * (2.0 * std::f32::consts::PI * 440.0 * n as f32 / rate as f32).sin())
            .collect();
        let original = AudioBuffer::mono(samples, rate).unwrap();
        let decoded: AudioBuffer = parse_wav(&encode_wav(&original)).unwrap();
        assert_eq!(decoded.frames(), original.frames());
        assert_eq!(decoded.sample_rate(), original.sample_rate());
        // Asymmetric scaling (write x32767, read /32768) bounds the
        // round-trip error by (0.5 + |v|)/32768.
        let lsb = 1.0 / 32768.0;
        for (a, b) in decoded.samples().iter().zip(original.samples()) {
            let bound = (0.5 + b.abs()) * lsb;
            assert!((a - b).abs() <= bound, "{a} vs {b}");
        }
    }

    #[test]
    fn float32_and_pcm24_decode() {
        // Hand-build a float32 WAV with one out-of-range and one NaN sample.
        let mut bytes = Vec::new();
        let payload: Vec<f32> = vec![0.5, 1.5, f32::NAN];
        let data_len = payload.len() * 4;
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&3u16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&8000u32.to_le_bytes());
        bytes.extend_from_slice(&32000u32.to_le_bytes());
        bytes.extend_from_slice(&4u16.to_le_bytes());
        bytes.extend_from_slice(&32u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
        for v in payload {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let buf: AudioBuffer = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[0.5, 1.0, 0.0]);

        // PCM 24-bit: -8388608 maps to -1.0, 4194304 to 0.5.
        let mut bytes = Vec::new();
        let data_len = 6;
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&8000u32.to_le_bytes());
        bytes.extend_from_slice(&24000u32.to_le_bytes());
        bytes.extend_from_slice(&3u16.to_le_bytes());
        bytes.extend_from_slice(&24u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
        bytes.extend_from_slice(&[0x00, 0x00, 0x80]); // -8388608
        bytes.extend_from_slice(&[0x00, 0x00, 0x40]); // 4194304
        let buf: AudioBuffer = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[-1.0, 0.5]);
    }

    #[test]
    fn extensible_resolves_subformat() {
        let mut bytes = Vec::new();
        let fmt_len = 40u32;
        let data_len = 2u32;
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(4 + 8 + fmt_len + 8 + data_len).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&fmt_len.to_le_bytes());
        bytes.extend_from_slice(&0xFFFEu16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&16000u32.to_le_bytes());
        bytes.extend_from_slice(&32000u32.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(&22u16.to_le_bytes()); // cbSize
        bytes.extend_from_slice(&16u16.to_le_bytes()); // valid bits
        bytes.extend_from_slice(&0u32.to_le_bytes()); // channel mask
        bytes.extend_from_slice(&1u16.to_le_bytes()); // sub-format: PCM
        bytes.extend_from_slice(&[0u8; 14]); // rest of GUID
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&data_len.to_le_bytes());
        bytes.extend_from_slice(&16384i16.to_le_bytes());
        let buf: AudioBuffer = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[0.5]);

        // Unsupported sub-format (e.g. ALAW=6) is rejected.
        bytes[44] = 6;
        assert!(matches!(parse_wav::<f32>(&bytes), Err(AudioError::MalformedWav { .. })));
    }

    #[test]
    fn trailing_chunks_are_ignored() {
        let mut bytes = wav_bytes(&[0.25, -0.25], 22050, 1);
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&4u32.to_le_bytes());
        bytes.extend_from_slice(b"INFO");
        let total = bytes.len() as u32 - 8;
        bytes[4..8].copy_from_slice(&total.to_le_bytes());
        let buf: AudioBuffer = parse_wav(&bytes).unwrap();
        assert_eq!(buf.frames(), 2);
    }

    #[test]
    fn probe_matches_full_decode() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("probe.wav");
        let buf = AudioBuffer::new(vec![0.1f32; 4 * 320], 8000, 4).unwrap();
        write_wav(&buf, &path).unwrap();
        let info = probe_wav(&path).unwrap();
        assert_eq!(info.sample_rate, 8000);
        assert_eq!(info.channels, 4);
        assert_eq!(info.frames, 320);
        let full: AudioBuffer = read_wav(&path).unwrap();
        assert_eq!(full.frames(), info.frames);
        assert!((info.duration_secs() - full.duration_secs()).abs() < 1e-12);
    }
}
