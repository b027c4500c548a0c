use super::{varint, write_circuit, write_fixed_header, BisError, Reader, FIXED_HEADER_LEN};
use crate::circuit::Circuit;

/// Incremental encoder: circuits are appended one at a time.
///
/// While open, the header's circuit count occupies a fixed five-octet
/// varint that is rewritten after every append, so [`bytes_so_far`]
/// is always a complete, decodable stream. [`finish`] shrinks the count to
/// its minimal encoding, giving the same bytes as a batch [`encode`].
///
/// [`bytes_so_far`]: StreamEncoder::bytes_so_far
/// [`finish`]: StreamEncoder::finish
/// [`encode`]: super::encode
#[derive(Debug)]
pub struct StreamEncoder {
    buf: Vec<u8>,
    compressed: bool,
    count: u32,
    finished: bool,
}

impl StreamEncoder {
    pub fn new(compressed: bool) -> Self {
        let mut buf = Vec::with_capacity(64);
        write_fixed_header(&mut buf, compressed);
        buf.extend_from_slice(&[0; varint::MAX_LEN]);
        varint::write_padded(&mut buf[FIXED_HEADER_LEN..], 0);
        StreamEncoder {
            buf,
            compressed,
            count: 0,
            finished: false,
        }
    }

    pub fn append(&mut self, circuit: &Circuit) -> Result<(), BisError> {
        if self.finished {
            return Err(BisError::StreamFinished);
        }
        let rollback = self.buf.len();
        if let Err(e) = write_circuit(&mut self.buf, circuit, self.compressed) {
            self.buf.truncate(rollback);
            return Err(e);
        }
        self.count += 1;
        varint::write_padded(&mut self.buf[FIXED_HEADER_LEN..], self.count);
        Ok(())
    }

    pub fn circuit_count(&self) -> u32 {
        self.count
    }

    /// The stream as it stands, with the padded count.
    pub fn bytes_so_far(&self) -> &[u8] {
        &self.buf
    }

    /// Closes the stream and returns its canonical bytes. Further appends
    /// fail with [`BisError::StreamFinished`].
    pub fn finish(&mut self) -> Result<Vec<u8>, BisError> {
        if self.finished {
            return Err(BisError::StreamFinished);
        }
        self.finished = true;
        let mut count = Vec::with_capacity(varint::MAX_LEN);
        varint::write(&mut count, self.count);
        let mut out = std::mem::take(&mut self.buf);
        out.splice(FIXED_HEADER_LEN..FIXED_HEADER_LEN + varint::MAX_LEN, count);
        Ok(out)
    }
}

#[derive(Debug)]
enum State {
    Header,
    CircuitHeader {
        remaining: u32,
    },
    Body {
        circuit: Circuit,
        instructions_left: u32,
        remaining: u32,
    },
    Done,
}

/// Incremental decoder: bytes arrive in arbitrary chunks and each circuit
/// is yielded as soon as its last record is complete.
#[derive(Debug)]
pub struct StreamDecoder {
    buf: Vec<u8>,
    /// Absolute stream offset of `buf[0]`.
    base: usize,
    compressed: bool,
    state: State,
}

impl Default for StreamDecoder {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamDecoder {
    pub fn new() -> Self {
        StreamDecoder {
            buf: Vec::new(),
            base: 0,
            compressed: false,
            state: State::Header,
        }
    }

    /// Consumes `chunk` and returns the circuits it completed.
    pub fn feed(&mut self, chunk: &[u8]) -> Result<Vec<Circuit>, BisError> {
        self.buf.extend_from_slice(chunk);
        let mut ready = Vec::new();
        let mut r = Reader::new(&self.buf, self.base);
        loop {
            let mark = r.pos();
            let step = match &mut self.state {
                State::Header => r.stream_header().map(|(compressed, count)| {
                    self.compressed = compressed;
                    self.state = finish_or(count, State::CircuitHeader { remaining: count });
                }),
                State::CircuitHeader { remaining } => {
                    let remaining = *remaining;
                    r.circuit_header(self.compressed).map(|(circuit, n)| {
                        self.state = State::Body {
                            circuit,
                            instructions_left: n,
                            remaining,
                        };
                    })
                }
                State::Body {
                    circuit,
                    instructions_left,
                    remaining,
                } => {
                    if *instructions_left == 0 {
                        let done = std::mem::replace(circuit, Circuit::new(0, 0));
                        let left = *remaining - 1;
                        ready.push(done);
                        self.state = finish_or(left, State::CircuitHeader { remaining: left });
                        continue;
                    }
                    r.instruction(self.compressed, circuit).map(|instr| {
                        circuit.push_unchecked(instr);
                        *instructions_left -= 1;
                    })
                }
                State::Done => {
                    if r.remaining() > 0 {
                        return Err(BisError::TrailingBytes {
                            offset: r.offset(),
                            count: r.remaining(),
                        });
                    }
                    break;
                }
            };
            match step {
                Ok(()) => {}
                Err(BisError::Truncated { .. }) => {
                    // Wait for more input; resume at the incomplete item.
                    r.rewind(mark);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let consumed = r.pos();
        self.buf.drain(..consumed);
        self.base += consumed;
        Ok(ready)
    }

    /// True once every declared circuit has been yielded.
    pub fn is_complete(&self) -> bool {
        matches!(self.state, State::Done)
    }

    /// Ends the input. Fails if the stream stopped short.
    pub fn finish(self) -> Result<(), BisError> {
        match self.state {
            State::Done => Ok(()),
            _ => Err(BisError::Truncated { offset: self.base }),
        }
    }
}

fn finish_or(remaining: u32, next: State) -> State {
    if remaining == 0 {
        State::Done
    } else {
        next
    }
}
