import struct
from collections import namedtuple

from onoffprivacy.scheme import QUERY_A, QUERY_B, QUERY_AB

MAGIC = b'\x4f\x50'
VERSION = 0x01

KIND_QUERY = 1
KIND_ANSWER = 2
KIND_ERROR = 3
KINDS = (KIND_QUERY, KIND_ANSWER, KIND_ERROR)

# magic, version, kind, time, body length
HEADER = struct.Struct('>2sBBQI')
HEADER_SIZE = HEADER.size

MAX_TIME = 2 ** 64 - 1
MAX_BODY = 2 ** 32 - 1

_MASKS = {QUERY_A: 1, QUERY_B: 2, QUERY_AB: 3}
_SYMBOLS = {mask: q for q, mask in _MASKS.items()}


class ProtocolError(Exception):
    """
    Exception that is thrown if a frame violates the wire format. Subclasses carry the one-byte code used in
    ERROR frames. If the header could be parsed, `time` holds the time field of the offending frame.
    """
    code = 0
    time = None


class BadMagic(ProtocolError):
    """
    The frame does not start with 0x4F 0x50
    """
    code = 1


class BadVersion(ProtocolError):
    """
    The frame has an unsupported version
    """
    code = 2


class BadKind(ProtocolError):
    """
    The frame kind is not QUERY, ANSWER or ERROR
    """
    code = 3


class TruncatedFrame(ProtocolError):
    """
    The stream ended inside a frame
    """
    code = 4


class BadQueryMask(ProtocolError):
    """
    The query body is not a single byte mask in {1, 2, 3}
    """
    code = 5


class BadLength(ProtocolError):
    """
    The body length field does not match the actual body
    """
    code = 6


class UnexpectedKind(ProtocolError):
    """
    A valid frame of a kind the receiver does not accept (e.g., an ANSWER sent to the server)
    """
    code = 7


ERRORS_BY_CODE = {cls.code: cls for cls in (BadMagic, BadVersion, BadKind, TruncatedFrame, BadQueryMask,
                                            BadLength, UnexpectedKind)}

Frame = namedtuple('Frame', ['kind', 'time', 'body'])
Frame.__doc__ = 'One protocol frame; magic and version are implied'


def mask_of(q):
    """
    Query bitmask: bit 0 is source A, bit 1 is source B
    """
    return _MASKS[q]


def symbol_of_mask(mask):
    if mask not in _SYMBOLS:
        raise BadQueryMask('Query mask %d is not one of 1, 2, 3' % mask)
    return _SYMBOLS[mask]


def query_frame(t, q):
    return Frame(KIND_QUERY, t, bytes([mask_of(q)]))


def answer_frame(t, payload):
    return Frame(KIND_ANSWER, t, payload)


def error_frame(t, code):
    return Frame(KIND_ERROR, t, bytes([code]))


def _check_body(kind, body):
    if kind == KIND_QUERY:
        if len(body) != 1:
            raise BadQueryMask('Query body must be one byte, got %d' % len(body))
        symbol_of_mask(body[0])


def encode_frame(frame):
    """
    Serializes a frame

    :param frame: object of class :class:`Frame`
    """
    if frame.kind not in KINDS:
        raise BadKind('Unknown frame kind %s' % frame.kind)
    if not 0 <= frame.time <= MAX_TIME:
        raise ValueError('Time %d does not fit into 8 bytes' % frame.time)
    if len(frame.body) > MAX_BODY:
        raise ValueError('Body of %d bytes is too long' % len(frame.body))
    _check_body(frame.kind, frame.body)

    return HEADER.pack(MAGIC, VERSION, frame.kind, frame.time, len(frame.body)) + bytes(frame.body)


def decode_header(data):
    """
    Parses and checks the fixed-size header

    :param data: the first :data:`HEADER_SIZE` bytes of a frame
    :return: tuple (kind, time, body length)
    """
    if len(data) < HEADER_SIZE:
        raise TruncatedFrame('Header needs %d bytes, got %d' % (HEADER_SIZE, len(data)))

    magic, version, kind, t, body_len = HEADER.unpack(data[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagic('Bad magic %s' % magic.hex())
    if version != VERSION:
        raise BadVersion('Unsupported version %d' % version)
    if kind not in KINDS:
        raise BadKind('Unknown frame kind %d' % kind)
    return kind, t, body_len


def decode_frame(data):
    """
    Parses exactly one frame

    :param data: bytes of the frame
    """
    kind, t, body_len = decode_header(data)
    body = bytes(data[HEADER_SIZE:])
    if len(body) < body_len:
        raise TruncatedFrame('Body needs %d bytes, got %d' % (body_len, len(body)))
    if len(body) > body_len:
        raise BadLength('Body length field says %d, got %d bytes' % (body_len, len(body)))
    _check_body(kind, body)
    return Frame(kind, t, body)


def read_frame(stream):
    """
    Reads one frame from a binary stream (e.g., a socket file)

    :param stream: readable binary file object
    :return: the frame, or None if the stream ended cleanly before a new frame
    """
    header = _read_exactly(stream, HEADER_SIZE)
    if not header:
        return None
    kind, t, body_len = decode_header(header)
    if kind == KIND_QUERY and body_len != 1:
        e = BadQueryMask('Query body must be one byte, length field says %d' % body_len)
        e.time = t
        raise e
    body = _read_exactly(stream, body_len)
    if len(body) < body_len:
        e = TruncatedFrame('Stream ended after %d of %d body bytes' % (len(body), body_len))
        e.time = t
        raise e
    try:
        return decode_frame(header + body)
    except ProtocolError as e:
        e.time = t
        raise


def _read_exactly(stream, size):
    data = b''
    while len(data) < size:
        chunk = stream.read(size - len(data))
        if not chunk:
            if data:
                raise TruncatedFrame('Stream ended after %d of %d bytes' % (len(data), size))
            break
        data += chunk
    return data


def write_frame(stream, frame):
    stream.write(encode_frame(frame))
    stream.flush()
