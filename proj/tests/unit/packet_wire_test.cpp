#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "smate/packet_wire.hpp"

using namespace smate;

namespace {

std::vector<std::uint8_t> read_fixture(const std::string& name) {
  std::ifstream in(std::string(SMATE_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_hex(ss.str());
}

Packet golden_packet() {
  Packet p;
  p.sender_id = 1;
  p.path = 3;
  p.session = 1;
  p.round = 2;
  p.kind = PacketKind::kPlain;
  p.scheme = 2;
  p.payload = {'A', 'B'};
  p.payload_len = 2;
  return p;
}

Packet random_packet(std::mt19937_64& rng) {
  Packet p;
  p.sender_id = static_cast<std::uint16_t>(rng());
  p.path = static_cast<std::uint16_t>(rng());
  p.session = static_cast<std::uint32_t>(rng());
  p.round = static_cast<std::uint32_t>(rng());
  p.scheme = static_cast<std::uint8_t>(rng());
  p.kind = rng() & 1 ? PacketKind::kEncoded : PacketKind::kPlain;
  p.parity_index = p.kind == PacketKind::kEncoded ? static_cast<std::uint8_t>(1 + rng() % 255) : 0;
  p.payload.resize(rng() % 200);
  for (auto& b : p.payload) b = static_cast<std::uint8_t>(rng());
  p.payload_len = static_cast<std::uint32_t>(rng() % (p.payload.size() + 1));
  return p;
}

WireError::Code parse_error(const std::vector<std::uint8_t>& frame) {
  try {
    parse(frame);
  } catch (const WireError& e) {
    return e.code();
  }
  ADD_FAILURE() << "frame parsed";
  return WireError::Code::kMalformed;
}

}  // namespace

TEST(Crc32, MatchesBitwiseOracle) {
  const std::string check = "123456789";
  const std::vector<std::uint8_t> bytes(check.begin(), check.end());
  EXPECT_EQ(crc32(bytes), 0xCBF43926u);
  EXPECT_EQ(oracle::crc32(bytes), 0xCBF43926u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> v(rng() % 300);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(crc32(v), oracle::crc32(v));
  }
}

TEST(Seal, EmptyPayloadIs28Bytes) {
  Packet p;
  EXPECT_EQ(seal(p).size(), kMinFrameSize);
  EXPECT_EQ(kMinFrameSize, 28u);
}

TEST(Seal, GoldenFixtures) {
  EXPECT_EQ(seal(golden_packet()), read_fixture("golden_packet.hex"));
  EXPECT_EQ(parse(read_fixture("golden_packet.hex")), golden_packet());

  Packet enc;
  enc.sender_id = 1;
  enc.path = 5;
  enc.session = 7;
  enc.round = 9;
  enc.kind = PacketKind::kEncoded;
  enc.scheme = 4;
  enc.parity_index = 2;
  enc.payload = {0xDE, 0xAD, 0xBE, 0xEF};
  enc.payload_len = 3;
  EXPECT_EQ(seal(enc), read_fixture("golden_encoded.hex"));
}

TEST(Seal, Layout) {
  const auto f = seal(golden_packet());
  EXPECT_EQ(std::string(f.begin(), f.begin() + 4), "SMTE");
  EXPECT_EQ(f[4], 1);
  EXPECT_EQ(f[5], 2);
  EXPECT_EQ(f[8 + 3], 1);   // session, big-endian
  EXPECT_EQ(f[12 + 3], 2);  // round
  EXPECT_EQ(f[16 + 1], 3);  // path
  const std::vector<std::uint8_t> body(f.begin(), f.end() - 4);
  const std::uint32_t crc = oracle::crc32(body);
  EXPECT_EQ(f[f.size() - 4], crc >> 24);
  EXPECT_EQ(f[f.size() - 1], crc & 0xFF);
}

TEST(Seal, RejectsInvalidPackets) {
  Packet p = golden_packet();
  p.kind = PacketKind::kEncoded;
  EXPECT_THROW(seal(p), WireError);
  p = golden_packet();
  p.parity_index = 1;
  EXPECT_THROW(seal(p), WireError);
  p = golden_packet();
  p.payload_len = 3;
  EXPECT_THROW(seal(p), WireError);
}

TEST(Parse, RoundTripProperty) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const Packet p = random_packet(rng);
    ASSERT_EQ(parse(seal(p)), p);
  }
}

TEST(Parse, Errors) {
  auto f = seal(golden_packet());
  EXPECT_EQ(parse_error(std::vector<std::uint8_t>(f.begin(), f.begin() + 27)),
            WireError::Code::kTruncated);
  auto bad = f;
  bad[25] ^= 0x01;
  EXPECT_EQ(parse_error(bad), WireError::Code::kChecksumMismatch);
  bad = f;
  bad[0] = 'X';
  EXPECT_EQ(parse_error(bad), WireError::Code::kBadMagic);

  // A well-formed frame of a future version.
  std::vector<std::uint8_t> v2(f.begin(), f.end() - 4);
  v2[4] = 2;
  const std::uint32_t crc = oracle::crc32(v2);
  for (int s = 24; s >= 0; s -= 8) v2.push_back(static_cast<std::uint8_t>(crc >> s));
  EXPECT_EQ(parse_error(v2), WireError::Code::kUnknownVersion);
}

TEST(Parse, EverySingleByteCorruptionDetected) {
  for (const char* name : {"golden_packet.hex", "golden_encoded.hex"}) {
    const auto f = read_fixture(name);
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (int delta = 1; delta < 256; ++delta) {
        auto bad = f;
        bad[i] = static_cast<std::uint8_t>(bad[i] ^ delta);
        ASSERT_THROW(parse(bad), WireError) << name << " byte " << i;
      }
    }
  }
}

TEST(Describe, PrintsFields) {
  const auto text = describe_frame(seal(golden_packet()));
  EXPECT_NE(text.find("session      1"), std::string::npos);
  EXPECT_NE(text.find("payload      4142"), std::string::npos);
}

TEST(Chunk, Arithmetic) {
  const std::vector<std::uint8_t> ten = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto c = chunk(ten, 4);
  ASSERT_EQ(c.symbols.size(), 3u);
  for (const auto& s : c.symbols) EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(c.lengths, (std::vector<std::uint32_t>{4, 4, 2}));
  EXPECT_EQ(c.symbols[2], (std::vector<std::uint8_t>{9, 10, 0, 0}));
  EXPECT_TRUE(chunk({}, 4).symbols.empty());
  EXPECT_THROW(chunk(ten, 0), WireError);
}

TEST(Chunk, ReassembleProperty) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint8_t> v(rng() % 500);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(reassemble(chunk(v, 1 + rng() % 64)), v);
  }
}

TEST(Cipher, IdentityAndInvolution) {
  const std::vector<std::uint8_t> msg = {1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(apply_cipher(CipherTransform::identity(0), msg), msg);
  const auto x = CipherTransform::xor_keystream(2, 99);
  const auto once = apply_cipher(x, msg, 7);
  EXPECT_NE(once, msg);
  EXPECT_EQ(apply_cipher(x, once, 7), msg);
  EXPECT_EQ(x.invert(x.apply(msg, 3), 3), msg);
  EXPECT_NE(x.apply(msg, 3), x.apply(msg, 4));
}

TEST(Cipher, KeyRing) {
  const KeyRing ring(4, 1234);
  const std::vector<std::uint8_t> msg(16, 0x5A);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      EXPECT_NE(apply_cipher(ring.key(i), msg), apply_cipher(ring.key(j), msg));
    }
  }
  EXPECT_THROW(ring.key(4), WireError);
  EXPECT_TRUE(KeyRing(2, 0, true).key(1).is_identity());
}

TEST(Hex, RoundTrip) {
  const std::vector<std::uint8_t> v = {0x00, 0xAB, 0xff};
  EXPECT_EQ(to_hex(v), "00abff");
  EXPECT_EQ(from_hex("00 AB\nff"), v);
  EXPECT_THROW(from_hex("abc"), WireError);
  EXPECT_THROW(from_hex("zz"), WireError);
}
