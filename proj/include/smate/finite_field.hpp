#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smate/error.hpp"

namespace smate {

// An element of GF(2^m). The value is the polynomial-basis bit pattern.
struct FieldElement {
  std::uint16_t value = 0;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint16_t v) : value(v) {}

  friend constexpr bool operator==(FieldElement, FieldElement) = default;
  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

// Arithmetic context for GF(2^m), 1 <= m <= 16.
//
// Construction verifies that the reduction polynomial is irreducible of
// degree m and that the generator has multiplicative order 2^m - 1, then
// builds log/antilog tables. The object is immutable afterwards and can be
// shared freely between threads.
class FieldContext {
 public:
  static constexpr unsigned kDefaultDegree = 8;
  static constexpr std::uint32_t kDefaultPolynomial = 0x11B;
  static constexpr std::uint32_t kDefaultGenerator = 0x03;

  explicit FieldContext(unsigned degree = kDefaultDegree,
                        std::uint32_t polynomial = kDefaultPolynomial,
                        std::uint32_t generator = kDefaultGenerator);

  // Shared GF(2^8) context with polynomial 0x11B and generator 0x03.
  static std::shared_ptr<const FieldContext> gf256();

  // A primitive polynomial for the given degree, with x (0x02) primitive.
  // For degree 8 this returns the default 0x11B, whose generator is 0x03.
  static std::uint32_t default_polynomial(unsigned degree);
  static std::uint32_t default_generator(unsigned degree);

  unsigned degree() const { return degree_; }
  std::uint32_t polynomial() const { return polynomial_; }
  std::uint32_t order() const { return order_; }
  FieldElement generator() const { return FieldElement(generator_); }

  // Checked conversion; throws FieldError when v >= q.
  FieldElement element(std::uint32_t v) const;
  bool contains(FieldElement a) const { return a.value < order_; }

  FieldElement add(FieldElement a, FieldElement b) const {
    return FieldElement(static_cast<std::uint16_t>(a.value ^ b.value));
  }
  FieldElement sub(FieldElement a, FieldElement b) const { return add(a, b); }
  FieldElement mul(FieldElement a, FieldElement b) const;
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const;
  FieldElement pow(FieldElement a, std::int64_t e) const;

  // generator^e, e reduced mod q-1.
  FieldElement alpha_pow(std::int64_t e) const;
  // Discrete log base the generator; a must be nonzero.
  std::uint32_t log(FieldElement a) const;

  // Bytes per independent symbol lane group: 1 when m divides 8 (each byte
  // packs 8/m elements), 2 for m = 16 (big-endian 16-bit elements), 0 when
  // byte strings cannot be interpreted as vectors over this field.
  std::size_t symbol_unit() const;

  // dst[i] ^= coeff * src[i] over every field element packed in the bytes.
  void multiply_accumulate(FieldElement coeff, std::span<const std::uint8_t> src,
                           std::span<std::uint8_t> dst) const;

 private:
  unsigned degree_;
  std::uint32_t polynomial_;
  std::uint32_t generator_;
  std::uint32_t order_;
  std::vector<std::uint16_t> log_;
  std::vector<std::uint16_t> exp_;  // 2(q-1) entries so log sums need no mod
  std::vector<std::uint16_t> mul_table_;  // q*q entries, only for m <= 8
};

// Dense row-major matrix over a field.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static FieldMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& at(std::size_t r, std::size_t c);
  FieldElement at(std::size_t r, std::size_t c) const;

  FieldMatrix select(std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols) const;
  FieldMatrix select_columns(std::span<const std::size_t> cols) const;

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElement> data_;
};

// Rows of H: entry (l, i) = alpha^(i*l), 0-based. Row 0 is all ones.
using CoefficientMatrix = FieldMatrix;

// Requires 1 <= t <= n <= q-1 so the column nodes alpha^i are distinct.
CoefficientMatrix build_vandermonde(const FieldContext& field, std::size_t t,
                                    std::size_t n);

// Solves A x = b for square A; throws SingularMatrixError if rank < r.
std::vector<FieldElement> gauss_solve(const FieldContext& field,
                                      const FieldMatrix& a,
                                      std::span<const FieldElement> b);

FieldMatrix invert(const FieldContext& field, const FieldMatrix& a);

std::vector<FieldElement> multiply(const FieldContext& field,
                                   const FieldMatrix& a,
                                   std::span<const FieldElement> x);

bool is_invertible(const FieldContext& field, const FieldMatrix& a);

// Returns the first set of rows() columns whose square submatrix is
// singular, or nullopt when every such minor is invertible.
std::optional<std::vector<std::size_t>> find_singular_minor(
    const FieldContext& field, const CoefficientMatrix& h);

}  // namespace smate
