//! Unsigned LEB128 for 32-bit values.

/// Longest accepted encoding of a `u32`.
pub const MAX_LEN: usize = 5;

#[inline]
pub fn write(buf: &mut Vec<u8>, mut value: u32) {
    while value >= 0x80 {
        buf.push((value as u8) | 0x80);
        value >>= 7;
    }
    buf.push(value as u8);
}

/// Always five octets, padding with zero-payload continuation octets, so the
/// value can be rewritten in place.
pub fn write_padded(buf: &mut [u8], mut value: u32) {
    for (i, slot) in buf.iter_mut().take(MAX_LEN).enumerate() {
        let last = i == MAX_LEN - 1;
        *slot = (value & 0x7f) as u8 | if last { 0 } else { 0x80 };
        value >>= 7;
    }
}

pub fn encoded_len(value: u32) -> usize {
    match value {
        0..=0x7f => 1,
        0x80..=0x3fff => 2,
        0x4000..=0x1f_ffff => 3,
        0x20_0000..=0x0fff_ffff => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadError {
    /// Ran out of input before the final octet.
    Incomplete,
    /// More than five octets, or a value that does not fit 32 bits.
    Overflow,
}

/// Decodes one varint from the front of `buf`, returning the value and
/// the number of octets consumed. Redundant padding octets are accepted.
#[inline]
pub fn read(buf: &[u8]) -> Result<(u32, usize), ReadError> {
    let mut value: u32 = 0;
    for i in 0..MAX_LEN {
        let byte = *buf.get(i).ok_or(ReadError::Incomplete)?;
        let payload = (byte & 0x7f) as u32;
        if i == MAX_LEN - 1 && (byte & 0x80 != 0 || payload > 0x0f) {
            return Err(ReadError::Overflow);
        }
        value |= payload << (7 * i);
        if byte & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    unreachable!("fifth octet always terminates or errors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        let mut buf = Vec::new();
        write(&mut buf, 0);
        write(&mut buf, 127);
        write(&mut buf, 128);
        write(&mut buf, 300);
        assert_eq!(buf, [0x00, 0x7f, 0x80, 0x01, 0xac, 0x02]);
    }

    #[test]
    fn padded_zero_and_max() {
        let mut buf = [0u8; 5];
        write_padded(&mut buf, 0);
        assert_eq!(buf, [0x80, 0x80, 0x80, 0x80, 0x00]);
        assert_eq!(read(&buf), Ok((0, 5)));
        write_padded(&mut buf, u32::MAX);
        assert_eq!(buf, [0xff, 0xff, 0xff, 0xff, 0x0f]);
        assert_eq!(read(&buf), Ok((u32::MAX, 5)));
    }

    #[test]
    fn rejects_overlong_and_overflowing() {
        assert_eq!(read(&[0x80; 6]), Err(ReadError::Overflow));
        assert_eq!(
            read(&[0xff, 0xff, 0xff, 0xff, 0x1f]),
            Err(ReadError::Overflow)
        );
        assert_eq!(read(&[0x80, 0x80]), Err(ReadError::Incomplete));
        assert_eq!(read(&[]), Err(ReadError::Incomplete));
    }

    proptest! {
        #[test]
        fn round_trip(v in any::<u32>()) {
            let mut buf = Vec::new();
            write(&mut buf, v);
            prop_assert_eq!(buf.len(), encoded_len(v));
            prop_assert_eq!(read(&buf), Ok((v, buf.len())));
            let mut padded = [0u8; 5];
            write_padded(&mut padded, v);
            prop_assert_eq!(read(&padded), Ok((v, 5)));
        }
    }
}
