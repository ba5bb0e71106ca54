#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smate/error.hpp"

namespace smate {

// Frame layout (big-endian integers):
//
//   0..3   magic "SMTE"
//   4      version (1)
//   5      scheme tag
//   6      kind (0 plain, 1 encoded)
//   7      parity index (0 for plain)
//   8..11  session
//   12..15 round
//   16..17 path
//   18..19 sender id
//   20..23 logical payload length
//   24..   payload
//   last 4 CRC-32 (IEEE, reflected) of every preceding byte
inline constexpr std::array<std::uint8_t, 4> kFrameMagic = {'S', 'M', 'T', 'E'};
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 24;
inline constexpr std::size_t kFrameTrailerSize = 4;
inline constexpr std::size_t kMinFrameSize = kFrameHeaderSize + kFrameTrailerSize;

enum class PacketKind : std::uint8_t { kPlain = 0, kEncoded = 1 };

struct Packet {
  std::uint16_t sender_id = 0;
  std::uint16_t path = 0;
  std::uint32_t session = 0;
  std::uint32_t round = 0;
  PacketKind kind = PacketKind::kPlain;
  std::uint8_t scheme = 0;
  std::uint8_t parity_index = 0;
  // Logical length; the physical payload may carry zero padding beyond it.
  std::uint32_t payload_len = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Packet&, const Packet&) = default;
};

class WireError : public Error {
 public:
  enum class Code { kTruncated, kBadMagic, kUnknownVersion, kChecksumMismatch, kMalformed, kUnknownKey };

  WireError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Throws WireError(kMalformed) if the packet breaks its invariants
// (encoded <=> parity_index >= 1, payload_len <= payload size).
std::vector<std::uint8_t> seal(const Packet& packet);
Packet parse(std::span<const std::uint8_t> frame);

// Human-readable dump of a frame, used by the CLI.
std::string describe_frame(std::span<const std::uint8_t> frame);

struct Chunks {
  std::vector<std::vector<std::uint8_t>> symbols;
  std::vector<std::uint32_t> lengths;
};

// Splits into ceil(len/S) chunks of exactly S bytes, zero-padding the last.
Chunks chunk(std::span<const std::uint8_t> payload, std::size_t chunk_size);
std::vector<std::uint8_t> reassemble(const Chunks& chunks);

// Invertible per-key payload transform standing in for symmetric encryption.
class CipherTransform {
 public:
  static CipherTransform identity(std::size_t key_id);
  // XOR with a keystream derived from (key seed, key id, nonce).
  static CipherTransform xor_keystream(std::size_t key_id, std::uint64_t key_seed);

  std::size_t key_id() const { return key_id_; }
  bool is_identity() const { return identity_; }

  std::vector<std::uint8_t> apply(std::span<const std::uint8_t> payload,
                                  std::uint64_t nonce = 0) const;
  std::vector<std::uint8_t> invert(std::span<const std::uint8_t> payload,
                                   std::uint64_t nonce = 0) const {
    return apply(payload, nonce);
  }

 private:
  CipherTransform(std::size_t key_id, std::uint64_t seed, bool identity)
      : key_id_(key_id), seed_(seed), identity_(identity) {}

  std::size_t key_id_;
  std::uint64_t seed_;
  bool identity_;
};

// The k keys shared by ingress and egress; key i protects path i.
class KeyRing {
 public:
  KeyRing(std::size_t keys, std::uint64_t seed, bool identity = false);

  std::size_t size() const { return keys_.size(); }
  // Throws WireError(kUnknownKey) for key_id >= size().
  const CipherTransform& key(std::size_t key_id) const;

 private:
  std::vector<CipherTransform> keys_;
};

std::vector<std::uint8_t> apply_cipher(const CipherTransform& transform,
                                       std::span<const std::uint8_t> payload,
                                       std::uint64_t nonce = 0);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Accepts upper or lower case with optional whitespace; throws WireError.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace smate
