#include "smate/packet_wire.hpp"

#include <zlib.h>

#include <algorithm>
#include <boost/algorithm/hex.hpp>
#include <cctype>
#include <iterator>
#include <sstream>

#include "seeding.hpp"

namespace smate {
namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return (static_cast<std::uint32_t>(b[at]) << 24) |
         (static_cast<std::uint32_t>(b[at + 1]) << 16) |
         (static_cast<std::uint32_t>(b[at + 2]) << 8) | b[at + 3];
}

void check_invariants(const Packet& p) {
  const bool encoded = p.kind == PacketKind::kEncoded;
  if (p.kind != PacketKind::kPlain && !encoded) {
    throw WireError(WireError::Code::kMalformed, "unknown packet kind");
  }
  if (encoded != (p.parity_index >= 1)) {
    throw WireError(WireError::Code::kMalformed,
                    "encoded packets and only encoded packets carry a parity index");
  }
  if (p.payload_len > p.payload.size()) {
    throw WireError(WireError::Code::kMalformed, "payload_len exceeds physical payload");
  }
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers piecewise.
  while (!bytes.empty()) {
    const std::size_t n = std::min<std::size_t>(bytes.size(), 1U << 30);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(n));
    bytes = bytes.subspan(n);
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> seal(const Packet& packet) {
  check_invariants(packet);
  std::vector<std::uint8_t> out;
  out.reserve(kMinFrameSize + packet.payload.size());
  for (std::uint8_t b : kFrameMagic) out.push_back(b);
  out.push_back(kFrameVersion);
  out.push_back(packet.scheme);
  out.push_back(static_cast<std::uint8_t>(packet.kind));
  out.push_back(packet.parity_index);
  put32(out, packet.session);
  put32(out, packet.round);
  put16(out, packet.path);
  put16(out, packet.sender_id);
  put32(out, packet.payload_len);
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  put32(out, crc32(out));
  return out;
}

Packet parse(std::span<const std::uint8_t> frame) {
  if (frame.size() < kMinFrameSize) {
    throw WireError(WireError::Code::kTruncated,
                    "frame of " + std::to_string(frame.size()) + " bytes is below the " +
                        std::to_string(kMinFrameSize) + "-byte minimum");
  }
  if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), frame.begin())) {
    throw WireError(WireError::Code::kBadMagic, "bad frame magic");
  }
  const std::size_t body = frame.size() - kFrameTrailerSize;
  if (crc32(frame.first(body)) != get32(frame, body)) {
    throw WireError(WireError::Code::kChecksumMismatch, "frame checksum mismatch");
  }
  if (frame[4] != kFrameVersion) {
    throw WireError(WireError::Code::kUnknownVersion,
                    "unknown frame version " + std::to_string(frame[4]));
  }
  Packet p;
  p.scheme = frame[5];
  if (frame[6] > 1) throw WireError(WireError::Code::kMalformed, "unknown packet kind");
  p.kind = static_cast<PacketKind>(frame[6]);
  p.parity_index = frame[7];
  p.session = get32(frame, 8);
  p.round = get32(frame, 12);
  p.path = get16(frame, 16);
  p.sender_id = get16(frame, 18);
  p.payload_len = get32(frame, 20);
  p.payload.assign(frame.begin() + kFrameHeaderSize, frame.begin() + body);
  check_invariants(p);
  return p;
}

std::string describe_frame(std::span<const std::uint8_t> frame) {
  const Packet p = parse(frame);
  std::ostringstream os;
  os << "version      " << static_cast<int>(kFrameVersion) << '\n'
     << "scheme       " << static_cast<int>(p.scheme) << '\n'
     << "kind         " << (p.kind == PacketKind::kEncoded ? "encoded" : "plain") << '\n'
     << "parity_index " << static_cast<int>(p.parity_index) << '\n'
     << "session      " << p.session << '\n'
     << "round        " << p.round << '\n'
     << "path         " << p.path << '\n'
     << "sender_id    " << p.sender_id << '\n'
     << "payload_len  " << p.payload_len << " (physical " << p.payload.size() << ")\n"
     << "payload      " << to_hex(p.payload) << '\n'
     << "crc32        " << to_hex(frame.last(kFrameTrailerSize)) << '\n';
  return os.str();
}

Chunks chunk(std::span<const std::uint8_t> payload, std::size_t chunk_size) {
  if (chunk_size == 0) {
    throw WireError(WireError::Code::kMalformed, "chunk size must be at least 1");
  }
  Chunks out;
  for (std::size_t at = 0; at < payload.size(); at += chunk_size) {
    const std::size_t n = std::min(chunk_size, payload.size() - at);
    std::vector<std::uint8_t> symbol(chunk_size, 0);
    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(at), n, symbol.begin());
    out.symbols.push_back(std::move(symbol));
    out.lengths.push_back(static_cast<std::uint32_t>(n));
  }
  return out;
}

std::vector<std::uint8_t> reassemble(const Chunks& chunks) {
  if (chunks.symbols.size() != chunks.lengths.size()) {
    throw WireError(WireError::Code::kMalformed, "chunk and length counts differ");
  }
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < chunks.symbols.size(); ++i) {
    const auto& s = chunks.symbols[i];
    if (chunks.lengths[i] > s.size()) {
      throw WireError(WireError::Code::kMalformed, "chunk length exceeds chunk size");
    }
    out.insert(out.end(), s.begin(), s.begin() + chunks.lengths[i]);
  }
  return out;
}

CipherTransform CipherTransform::identity(std::size_t key_id) {
  return CipherTransform(key_id, 0, true);
}

CipherTransform CipherTransform::xor_keystream(std::size_t key_id, std::uint64_t key_seed) {
  return CipherTransform(key_id, key_seed, false);
}

std::vector<std::uint8_t> CipherTransform::apply(std::span<const std::uint8_t> payload,
                                                 std::uint64_t nonce) const {
  std::vector<std::uint8_t> out(payload.begin(), payload.end());
  if (identity_) return out;
  auto engine = detail::make_engine(seed_, {key_id_, nonce});
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i % 8 == 0) word = engine();
    out[i] ^= static_cast<std::uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

KeyRing::KeyRing(std::size_t keys, std::uint64_t seed, bool identity) {
  keys_.reserve(keys);
  for (std::size_t i = 0; i < keys; ++i) {
    keys_.push_back(identity ? CipherTransform::identity(i)
                             : CipherTransform::xor_keystream(i, seed));
  }
}

const CipherTransform& KeyRing::key(std::size_t key_id) const {
  if (key_id >= keys_.size()) {
    throw WireError(WireError::Code::kUnknownKey,
                    "unknown key id " + std::to_string(key_id) + " (ring holds " +
                        std::to_string(keys_.size()) + " keys)");
  }
  return keys_[key_id];
}

std::vector<std::uint8_t> apply_cipher(const CipherTransform& transform,
                                       std::span<const std::uint8_t> payload,
                                       std::uint64_t nonce) {
  return transform.apply(payload, nonce);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  boost::algorithm::hex_lower(bytes.begin(), bytes.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  std::string compact;
  for (char c : hex) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  std::vector<std::uint8_t> out;
  try {
    boost::algorithm::unhex(compact.begin(), compact.end(), std::back_inserter(out));
  } catch (const boost::algorithm::hex_decode_error&) {
    throw WireError(WireError::Code::kMalformed, "invalid hex string");
  }
  return out;
}

}  // namespace smate
